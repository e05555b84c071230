//! Plurisubharmonicity of log(1 + |df|^2) and log D under curvature sign conditions.

use std::sync::Arc;

use kahler::geometry::catalog;
use kahler::identities::{psh_check, HypothesisSampling, PshQuantity};
use kahler::maps::HoloMap;
use kahler::sampling::Sampler;

fn main() -> kahler::Result<()> {
    let hs = HypothesisSampling::default();
    let ball = Arc::new(catalog("complex_hyperbolic_ball", 2, None)?);

    let f = HoloMap::parse(Arc::new(catalog("flat", 1, None)?), ball.clone(), &["z1/2", "z1^2/2"])?;
    let r = psh_check(PshQuantity::Log1pEnergy, &f, &Sampler::ball(200, 0.9, 17).points(1)?, 1e-8, 4, &hs)?;
    println!("log(1 + energy): {:?}, min eigenvalue {}", r.status, r.values["min_eigenvalue"]);

    let g = HoloMap::parse(Arc::new(catalog("flat", 2, None)?), ball, &["z1/2", "z2/2"])?;
    let r = psh_check(PshQuantity::LogD, &g, &Sampler::ball(200, 0.9, 19).points(2)?, 1e-8, 4, &hs)?;
    println!("log D: {:?}, min eigenvalue {}", r.status, r.values["min_eigenvalue"]);

    // positively curved target: the hypothesis fails and the check is not applicable
    let h = HoloMap::parse(Arc::new(catalog("poincare_disk", 1, None)?), Arc::new(catalog("fubini_study", 1, None)?), &["z1/3"])?;
    let r = psh_check(PshQuantity::Log1pEnergy, &h, &Sampler::ball(20, 0.9, 5).points(1)?, 1e-8, 4, &hs)?;
    println!("disk -> FS: {:?} ({})", r.status, r.notes.join("; "));
    Ok(())
}
