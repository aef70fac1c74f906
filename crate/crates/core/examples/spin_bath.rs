//! Samples a surface electron-spin bath above a shallow NV and summarises the
//! dipolar couplings it produces.

use spinbath::model::{default_nv_axis, sample_bath};

fn main() -> spinbath::error::Result<()> {
    println!("depth_nm  spins  rms_kHz  strongest_kHz");
    for depth in [4.0, 7.0, 10.0, 15.0] {
        let bath = sample_bath(0.04, depth, 10.0 * depth, default_nv_axis(), 1)?;
        let strongest = bath.strongest(1).couplings.first().copied().unwrap_or(0.0);
        println!(
            "{depth:8.1}  {:5}  {:7.2}  {strongest:13.2}",
            bath.len(),
            bath.field_rms() * 1e3
        );
    }
    Ok(())
}
