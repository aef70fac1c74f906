//! NV ground-state transition frequencies versus axial field, and how an axial
//! electric field moves the single-quantum lines but not the double-quantum one.

use spinbath::model::{exact_transition_frequencies, surface_spin_larmor, transition_frequencies, NvParams, GAMMA_ELECTRON_MHZ_PER_G};

fn main() -> spinbath::error::Result<()> {
    println!("Bz_G   f(0->-1)   f(0->+1)   f(-1->+1)   g=2 Larmor");
    for bz in [100.0, 281.0, 382.0, 500.0] {
        let f = transition_frequencies(&NvParams::with_field(bz))?;
        let larmor = surface_spin_larmor(bz, GAMMA_ELECTRON_MHZ_PER_G)?;
        println!(
            "{bz:5.0}  {:9.2}  {:9.2}  {:9.2}   {larmor:8.2}",
            f.f_0_to_minus1, f.f_0_to_plus1, f.f_minus1_to_plus1
        );
    }

    let base = NvParams {
        pi_perp: 2e4,
        ..NvParams::with_field(281.0)
    };
    let strained = NvParams {
        pi_par: 1e5,
        ..base.clone()
    };
    let (a, b) = (exact_transition_frequencies(&base)?, exact_transition_frequencies(&strained)?);
    println!("\naxial field 1e5 V/cm at 281 G:");
    println!("  SQ line moves by {:.4} MHz", b.f_0_to_minus1 - a.f_0_to_minus1);
    println!("  DQ line moves by {:.2e} MHz", b.f_minus1_to_plus1 - a.f_minus1_to_plus1);
    Ok(())
}
