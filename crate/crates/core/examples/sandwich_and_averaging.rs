//! Singular value sandwich for a pencil (A, G) and the sphere averaging identity.

use kahler::geometry::{catalog, curvature_tensor};
use kahler::identities::{averaging_identity_check, sandwich_check, sandwich_random_check};
use kahler::linalg::CMatrix;
use kahler::report::{ConstantSource, Hypothesis};
use kahler::C64;

fn main() -> kahler::Result<()> {
    let a = CMatrix::from_row_slice(2, 2, &[C64::new(2.0, 0.0), C64::new(0.5, 0.5), C64::new(0.5, -0.5), C64::new(1.0, 0.0)]);
    let g = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.2, 0.0), C64::new(0.2, 0.0), C64::new(1.5, 0.0)]);
    for s in 0..2 {
        let sw = sandwich_check(&a, &g, s)?;
        println!("s = {s}: inf {:.6} <= middle {:.6} <= sup {:.6}", sw.inf, sw.middle, sw.sup);
    }
    let r = sandwich_random_check(100, 3, 1e-10)?;
    println!("100 random pairs: {:?}, min slack {}", r.status, r.values["min_slack"]);

    let cp = curvature_tensor(&catalog("complex_hyperbolic_ball", 2, None)?, &[C64::new(0.0, 0.0); 2])?;
    let kappa = Hypothesis {
        name: "kappa".into(),
        statement: "H <= -kappa".into(),
        value: 2.0,
        source: ConstantSource::Analytic,
        sampled_extreme: None,
        holds_on_samples: true,
    };
    for w in [[1.0, 1.0], [1.0, 2.0]] {
        let weights = [C64::new(w[0], 0.0), C64::new(w[1], 0.0)];
        let avg = averaging_identity_check(&cp, &weights, Some(kappa.clone()), 20_000, 21, 1e-8)?;
        println!(
            "weights {w:?}: algebraic {:.6}, quadrature {:.6} ± {:.1e}",
            avg.algebraic, avg.estimate, avg.stderr
        );
        if let Some(ineq) = avg.inequality {
            println!("  (a1) with coefficient {}: observed {:.6} <= bound {:.6}, slack {:.2e}", ineq.coefficient_text.unwrap_or_default(), ineq.observed, ineq.bound, ineq.slack);
        }
    }
    Ok(())
}
