//! Born-rule probabilities as single-edge PSD models.
//!
//! cargo run --example quantum_measurement

use num_complex::Complex64;

use holoprop::bp::{run_bp, BpConfig};
use holoprop::model::exact_value;
use holoprop::quantum::{build_measurement_model, herm_to_coords, CMatrix};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn main() -> holoprop::Result<()> {
    // |+⟩⟨+| measured along |0⟩⟨0|
    let plus = CMatrix::from_element(2, 2, c(0.5));
    let zero = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let m = build_measurement_model(&plus, &zero)?;
    println!("Tr(|+><+| |0><0|) = {}", exact_value(&m)?);
    println!("coordinates of |+><+|: {:?}", herm_to_coords(&plus)?);

    // a qutrit state with complex coherences
    let i = Complex64::i();
    let rho = CMatrix::from_row_slice(
        3,
        3,
        &[c(0.5), 0.1 * i, c(0.1), -0.1 * i, c(0.3), c(0.0), c(0.1), c(0.0), c(0.2)],
    );
    let effect = CMatrix::from_row_slice(3, 3, &[c(0.5), c(0.5), c(0.0), c(0.5), c(0.5), c(0.0), c(0.0), c(0.0), c(0.0)]);
    let m = build_measurement_model(&rho, &effect)?;
    let direct = (&rho * &effect).trace().re;
    let bp = run_bp(&m, &BpConfig::default())?;
    println!("qutrit: model {:.15}, trace {:.15}, Bethe {:.15}", exact_value(&m)?, direct, bp.bethe);

    let not_a_state = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(1.0)]);
    println!("rejected: {}", build_measurement_model(&not_a_state, &zero).unwrap_err());
    Ok(())
}
