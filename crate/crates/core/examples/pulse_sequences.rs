//! Builds the main sequences, expands them into the double-quantum basis,
//! forms a differential readout pair and prints the text form.

use spinbath::model::{surface_spin_larmor, NvParams, GAMMA_ELECTRON_MHZ_PER_G};
use spinbath::pulses::{
    build_decoupling, build_deer, differential_pair, from_text, to_text, validate, with_continuous_drive, Basis,
    DecouplingKind, PulseCalibration,
};

fn main() -> spinbath::error::Result<()> {
    let nv = NvParams::with_field(281.0);
    let cal = PulseCalibration::resonant(&nv, 13.7)?;

    let cpmg = build_decoupling(DecouplingKind::Cpmg(4), Basis::Sq, 20.0, &cal)?;
    println!("CPMG-4, SQ:\n{}", to_text(&cpmg));

    let dq = build_decoupling(DecouplingKind::Hahn, Basis::Dq, 10.0, &cal)?;
    println!("Hahn, DQ ({} pulses):\n{}", dq.pulses.len(), to_text(&dq));

    let (plain, swap) = differential_pair(&dq)?;
    println!("differential pair: {} and {} pulses", plain.pulses.len(), swap.pulses.len());

    let f_ss = surface_spin_larmor(281.0, GAMMA_ELECTRON_MHZ_PER_G)?;
    let deer = build_deer(10.0, f_ss, 0.036, 13.7, &cal)?;
    println!("\nDEER:\n{}", to_text(&deer));

    let driven = with_continuous_drive(&build_decoupling(DecouplingKind::Hahn, Basis::Sq, 10.0, &cal)?, f_ss, 10.0)?;
    println!("Hahn with continuous surface drive:\n{}", to_text(&driven));

    assert_eq!(from_text(&to_text(&driven))?, driven);
    println!("timing violations: {}", validate(&driven).len());
    Ok(())
}
