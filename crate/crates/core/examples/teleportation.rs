//! Teleportation as a three-edge model: Bell pair, input state, Bell-basis effect.
//!
//! cargo run --example teleportation

use nalgebra::DVector;
use num_complex::Complex64;

use holoprop::bp::{run_bp, BpConfig};
use holoprop::model::exact_value;
use holoprop::quantum::{build_teleportation_model, CMatrix};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn main() -> holoprop::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phi = DVector::from_vec(vec![c(s), c(0.0), c(0.0), c(s)]);
    let bell = &phi * phi.adjoint();
    let id = CMatrix::identity(2, 2);

    // any input: the Bell outcome on Alice's side has probability 1/4
    for theta in [0.0, 0.7, 1.9] {
        let psi = DVector::from_vec(vec![c((theta / 2.0f64).cos()), Complex64::from_polar((theta / 2.0f64).sin(), 0.4)]);
        let rho = &psi * psi.adjoint();
        let m = build_teleportation_model(&bell, &rho, &id, &bell)?;
        println!("theta {theta}: P(Bell outcome) = {:.15}", exact_value(&m)?);

        // conditioned on it, Bob holds ρ: his outcome on ρ's support has probability 1/4 too
        let m = build_teleportation_model(&bell, &rho, &rho, &bell)?;
        let r = run_bp(&m, &BpConfig::default())?;
        println!("  with Bob projecting on the input: {:.15} (Bethe {:.15})", exact_value(&m)?, r.bethe);
    }
    Ok(())
}
