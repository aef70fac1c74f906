//! Microwave AC Stark shift of the 0 <-> -1 line from the surface-spin drive,
//! full expression against the far-detuned leading term.

use spinbath::analysis::{stark_shift, stark_shift_leading, StarkInputs};

fn main() -> spinbath::error::Result<()> {
    let inputs = StarkInputs::from_surface_rabi(13.7, 1292.0, 2866.0, 790.0);
    println!("drive 790 MHz, Omega_SS 13.7 MHz: shift {:.4} MHz", stark_shift(inputs)?);
    println!("leading term at Omega_NV 20 MHz, 1 GHz detuning: {:.4} MHz", stark_shift_leading(20.0, 1000.0)?);

    println!("\ndetuning_MHz  full      leading");
    for d in [-200.0, -50.0, 50.0, 200.0, 1000.0] {
        let i = StarkInputs { omega_nv: 5.5, delta_m1: d, delta_p1: 2866.0, omega: 790.0 };
        println!("{d:12.0}  {:+.5}  {:+.5}", stark_shift(i)?, stark_shift_leading(5.5, d)?);
    }
    Ok(())
}
