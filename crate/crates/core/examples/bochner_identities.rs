//! The two Bochner identities and the identity for log of the top singular value,
//! evaluated term by term and then over seeded samples.

use std::sync::Arc;

use kahler::geometry::catalog;
use kahler::identities::{check_identity, identity_terms, IdentityKind, DEFAULT_IDENTITY_TOL};
use kahler::maps::HoloMap;
use kahler::sampling::Sampler;
use kahler::C64;

fn main() -> kahler::Result<()> {
    let f = HoloMap::parse(
        Arc::new(catalog("poincare_disk", 1, None)?),
        Arc::new(catalog("complex_hyperbolic_ball", 2, None)?),
        &["z1/2", "z1^2/2"],
    )?;
    let p = [C64::new(0.3, -0.2)];
    let v = [C64::new(1.0, 0.5)];
    for kind in [IdentityKind::Boch1, IdentityKind::Boch2, IdentityKind::LogW] {
        let t = identity_terms(kind, &f, &p, &v, 4)?;
        println!("{:<6} lhs {:+.12}  rhs {:+.12}", kind.name(), t.lhs, t.rhs);
        for (name, value) in &t.terms {
            println!("         {name:<24} {value:+.12}");
        }
    }

    let sampler = Sampler::ball(50, 0.85, 11);
    let points = sampler.points(1)?;
    let directions = sampler.directions(1);
    for kind in [IdentityKind::Boch1, IdentityKind::Boch2, IdentityKind::LogW] {
        let r = check_identity(kind, &f, &points, &directions, DEFAULT_IDENTITY_TOL, 4)?;
        println!("{:<6} {:?}: {} points, max residual {:.2e}", kind.name(), r.status, r.points_checked, r.max_abs_residual.unwrap_or(f64::NAN));
    }
    Ok(())
}
