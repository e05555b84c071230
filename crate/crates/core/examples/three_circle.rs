//! Three-circle inequality for maps out of a flat domain.

use std::sync::Arc;

use kahler::bounds::three_circle_check;
use kahler::geometry::catalog;
use kahler::identities::HypothesisSampling;
use kahler::maps::HoloMap;

fn main() -> kahler::Result<()> {
    let flat = Arc::new(catalog("flat", 1, None)?);
    let hs = HypothesisSampling::default();
    let cases = [
        (HoloMap::parse(flat.clone(), flat.clone(), &["z1^2"])?, [0.5, 1.0, 2.0]),
        (HoloMap::parse(flat.clone(), Arc::new(catalog("complex_hyperbolic_ball", 2, None)?), &["z1/2", "z1^2/2"])?, [0.2, 0.4, 0.6]),
        (HoloMap::parse(flat, Arc::new(catalog("complex_hyperbolic_ball", 2, None)?), &["z1/2 + z1^2/5", "z1^2/4"])?, [0.2, 0.4, 0.6]),
    ];
    for (f, radii) in &cases {
        for count in [64, 128] {
            let r = three_circle_check(f, *radii, count, 13, 1e-9, &hs)?;
            println!("{:?} with {count:>3} samples/sphere: {:?}, slack {}", f.components().iter().map(|c| c.to_string()).collect::<Vec<_>>(), r.status, r.values["slack"]);
        }
    }
    Ok(())
}
