//! Surface-spin density bounds: a lower bound from the spread of decoupled
//! rates across NVs and an upper bound from the surface-spin linewidth.

use spinbath::analysis::{
    density_from_stats, density_upper_bound, linewidth_fwhm_from_density, second_moment_default,
};

fn main() -> spinbath::error::Result<()> {
    let lower = density_from_stats(7.75, 2.9, 10.0)?;
    println!(
        "spread std/mean {:.3} -> about {:.1} spins -> lower bound {:.4} nm^-2",
        lower.ratio, lower.n_spins, lower.density
    );
    println!("5 MHz rms linewidth -> upper bound {:.3} nm^-2", density_upper_bound(5.0)?);
    println!("1 nm^-2 -> FWHM {:.0} MHz", linewidth_fwhm_from_density(1.0));
    println!("nearest-shell second moment at 0.1 nm^-2: {:.1} MHz^2", second_moment_default(0.1)?);
    Ok(())
}
