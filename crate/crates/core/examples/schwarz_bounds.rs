//! Schwarz, volume and Royden bounds, with analytic and with sampled constants.

use std::sync::Arc;

use kahler::bounds::{royden_bound_report, schwarz_bound_report, volume_bound_report, BoundSettings};
use kahler::geometry::catalog;
use kahler::maps::HoloMap;
use kahler::report::BoundReport;
use kahler::sampling::Sampler;

fn show(r: &BoundReport) {
    println!(
        "{:<8} {:?}: observed {:.10} vs bound {:.10} (slack {:+.2e}{})",
        r.kind,
        r.status,
        r.observed,
        r.bound,
        r.slack,
        if r.equality_case { ", equality" } else { "" }
    );
    for h in &r.hypotheses {
        println!("         {} = {} ({:?})", h.name, h.value, h.source);
    }
}

fn main() -> kahler::Result<()> {
    let disk = Arc::new(catalog("poincare_disk", 1, Some(1.0))?);
    let disk2 = Arc::new(catalog("poincare_disk", 1, Some(2.0))?);
    let s = BoundSettings::default();
    let pts = Sampler::ball(50, 0.9, 1).points(1)?;

    let id = HoloMap::parse(disk.clone(), disk2.clone(), &["z1"])?;
    show(&schwarz_bound_report(&id, &pts, Some(2.0), Some(1.0), &s)?);
    show(&volume_bound_report(&id, &pts, Some(2.0), Some(1.0), &s)?);
    show(&royden_bound_report(&id, &pts, Some(2.0), Some(1.0), &s)?);

    let sq = HoloMap::parse(disk, disk2, &["z1^2"])?;
    show(&schwarz_bound_report(&sq, &pts, None, None, &s)?);

    let b1 = Arc::new(catalog("complex_hyperbolic_ball", 2, Some(1.0))?);
    let b2 = Arc::new(catalog("complex_hyperbolic_ball", 2, Some(2.0))?);
    let f = HoloMap::parse(b1, b2, &["z1", "z2"])?;
    let pts2 = Sampler::ball(50, 0.8, 2).points(2)?;
    let r = royden_bound_report(&f, &pts2, Some(3.0), Some(1.0), &s)?;
    println!("rank-2 Royden coefficient: {}", r.coefficient_text.clone().unwrap_or_default());
    show(&r);
    Ok(())
}
