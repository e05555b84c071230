//! Curvature of the catalog models at the origin and at an off-center point.

use kahler::functionals::{bisectional_range, holo_sectional, ricci_extremes, scalar};
use kahler::geometry::{catalog, catalog_names, curvature_tensor};
use kahler::C64;

fn main() -> kahler::Result<()> {
    let points = [vec![C64::new(0.0, 0.0); 2], vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.4)]];
    for name in catalog_names().iter().filter(|n| **n != "poincare_disk") {
        let chart = catalog(name, 2, None)?;
        for p in &points {
            let cp = curvature_tensor(&chart, p)?;
            let (_, h) = holo_sectional(&cp, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?;
            let (blo, bhi) = bisectional_range(&cp, 64, 7)?;
            let (rlo, rhi) = ricci_extremes(&cp)?;
            println!(
                "{:<34} at {:>5.2}: H(e1) = {h:+.6}  bisectional [{blo:+.4}, {bhi:+.4}]  Ric [{rlo:+.4}, {rhi:+.4}]  scalar {:+.4}",
                chart.name(),
                p[0].norm(),
                scalar(&cp)
            );
        }
    }
    let cp = curvature_tensor(&catalog("complex_hyperbolic_ball", 2, None)?, &points[0])?;
    println!("\nball origin: R_1111 = {:.3}, R_1122 = {:.3}", cp.riem(0, 0, 0, 0).re, cp.riem(0, 0, 1, 1).re);
    Ok(())
}
