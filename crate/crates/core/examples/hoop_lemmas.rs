//! Hoop lemmas on positively curved domains: lower bounds on the maximal stretch.

use std::sync::Arc;

use kahler::bounds::{hoop_check, BoundSettings, HoopMode};
use kahler::geometry::catalog;
use kahler::maps::HoloMap;
use kahler::sampling::Sampler;

fn main() -> kahler::Result<()> {
    let fs1 = Arc::new(catalog("fubini_study", 1, Some(1.0))?);
    let fs2 = Arc::new(catalog("fubini_study", 1, Some(2.0))?);
    let s = BoundSettings::default();
    let pts = Sampler::ball(50, 2.0, 10).points(1)?;

    let id = HoloMap::parse(fs1.clone(), fs2, &["z1"])?;
    let sq = HoloMap::parse(fs1.clone(), fs1, &["z1^2"])?;
    for (name, f, k, kappa) in [("identity", &id, 2.0, 1.0), ("z^2", &sq, 2.0, 2.0)] {
        for mode in [HoopMode::Volume, HoopMode::Stretching] {
            let r = hoop_check(f, &pts, mode, Some(k), Some(kappa), &s)?;
            println!("{name:<9} {mode:?}: max {:.10} >= K/kappa = {} : {:?}", r.observed, r.bound, r.status);
        }
    }
    Ok(())
}
