//! Singular value profiles along rays for flat maps.

use std::sync::Arc;

use kahler::bounds::degeneracy_profile;
use kahler::geometry::catalog;
use kahler::maps::HoloMap;
use kahler::C64;

fn main() -> kahler::Result<()> {
    let flat = Arc::new(catalog("flat", 2, None)?);
    let radii = [0.5, 1.0, 2.0, 4.0, 8.0];
    let dirs = vec![
        vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        vec![C64::new(0.6, 0.0), C64::new(0.8, 0.0)],
    ];
    for comps in [["z1", "2*z2"], ["z1", "z1*z2"], ["z1", "0"]] {
        let f = HoloMap::parse(flat.clone(), flat.clone(), &comps)?;
        println!("f = ({}, {})", comps[0], comps[1]);
        for row in degeneracy_profile(&f, &dirs, &radii)?.rows {
            println!(
                "  ray {} r = {:<4} min |lambda|^2 = {:<10.6} sigma_1 = {:<10.6} D = {:.6}",
                row.direction, row.radius, row.min_singular_value, row.sigma_m_minus_1, row.volume_ratio
            );
        }
    }
    Ok(())
}
