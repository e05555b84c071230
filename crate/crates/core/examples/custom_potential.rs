//! A chart from a user potential: metric, Kähler check, curvature and normal coordinates.

use kahler::expr::parse_expression;
use kahler::functionals::holo_sectional;
use kahler::geometry::{curvature_tensor, kahler_residual, normal_chart, KahlerChart, Region};
use kahler::C64;

fn main() -> kahler::Result<()> {
    // a perturbation of the flat potential
    let phi = parse_expression("abs2(z1) + abs2(z2) + abs2(z1)^2/4 + abs2(z1*z2)/2")?;
    let chart = KahlerChart::from_potential("quartic", 2, phi, Region::Ball { radius: 1.0 })?;
    let p = vec![C64::new(0.2, -0.1), C64::new(0.1, 0.3)];

    println!("g(p) = {}", chart.metric_at(&p)?);
    println!("Kähler residual at p: {:e}", kahler_residual(&chart.metric_jets_at(&p, 2)?)?);

    let cp = curvature_tensor(&chart, &p)?;
    let e1 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    println!("H(e1) at p = {:.8}", holo_sectional(&cp, &e1)?.1);

    let nc = normal_chart(&chart, &p)?;
    let zero = vec![C64::new(0.0, 0.0); 2];
    let cn = curvature_tensor(&nc, &zero)?;
    let id = kahler::linalg::CMatrix::identity(2, 2);
    println!("normal chart: |g(0) - I| = {:e}", (&cn.g - &id).norm());
    println!("normal chart first derivatives at 0 vanish: Γ(0,0,0) = {:e}", cn.gamma(0, 0, 0).norm());
    Ok(())
}
