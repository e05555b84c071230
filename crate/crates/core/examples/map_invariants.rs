//! Pointwise invariants of a holomorphic map: singular values, D, energy, map Hessian.

use std::sync::Arc;

use kahler::geometry::catalog;
use kahler::maps::{map_hessian, map_point_data, sigma_k, HoloMap};
use kahler::C64;

fn main() -> kahler::Result<()> {
    let domain = Arc::new(catalog("complex_hyperbolic_ball", 2, None)?);
    let target = Arc::new(catalog("complex_hyperbolic_ball", 3, Some(2.0))?);
    let f = HoloMap::parse(domain.clone(), target, &["z1/2 + z2^2/4", "z2/2", "z1*z2/3"])?;

    for p in [vec![C64::new(0.0, 0.0); 2], vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.2)]] {
        let d = map_point_data(&f, &p)?;
        println!("p = {:?}", p);
        println!("  image          {:?}", d.image);
        println!("  |lambda|^2     {:?} (rank {})", d.singular_values, d.rank);
        println!("  D = {:.6}  energy = {:.6}  max = {:.6}", d.volume_ratio(), d.energy_density(), d.max_norm());
        println!("  sigma_1 = {:.6}", sigma_k(&d.singular_values, 1)?);
        println!("  max |map Hessian| = {:.6}", map_hessian(&f, &p)?.max_abs());
    }

    // the identity between rescaled balls is totally geodesic
    let id = HoloMap::parse(domain, Arc::new(catalog("complex_hyperbolic_ball", 2, Some(2.0))?), &["z1", "z2"])?;
    let q = [C64::new(0.4, 0.0), C64::new(0.1, -0.3)];
    println!("identity: singular values {:?}, Hessian {:.1e}", map_point_data(&id, &q)?.singular_values, map_hessian(&id, &q)?.max_abs());
    Ok(())
}
