//! Truncated Taylor jets in (z, z̄): derivatives, complex Hessians and Levi forms.

use kahler::expr::parse_expression;
use kahler::jet::WirtingerJet;
use kahler::C64;

fn main() -> kahler::Result<()> {
    let p = [C64::new(0.3, 0.2), C64::new(-0.1, 0.4)];
    let z = WirtingerJet::coordinates(&p, 4)?;

    let phi = parse_expression("-log(1 - abs2(z1) - abs2(z2))")?;
    let jet = phi.eval_jet(&z)?;
    println!("phi(p)           = {}", jet.value());
    println!("d/dz1 phi        = {}", jet.derivative(&[1, 0], &[0, 0])?);
    println!("d2/dz1 dz2bar    = {}", jet.derivative(&[1, 0], &[0, 1])?);
    println!("d4/dz1^2 dz1bar^2 = {}", jet.derivative(&[2, 0], &[2, 0])?);
    println!("complex Hessian  =\n{}", jet.complex_hessian()?);

    // arithmetic on jets directly
    let w = (&z[0] * &z[0].conj() + &z[1] * &z[1].conj()).exp();
    let v = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
    println!("Levi form of exp(|z|^2) along v = {}", w.levi_form(&v)?);
    println!("antiholomorphic part of z1^3: {:e}", z[0].powi(3).antiholomorphic_residual());
    Ok(())
}
