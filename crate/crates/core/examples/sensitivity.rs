//! AC magnetometry figure of merit for SQ and DQ echoes, with and without the
//! surface-spin drive, from stretched-exponential decay parameters.

use spinbath::analysis::{enhancement, sensitivity_curve, DecayFit};

fn main() -> spinbath::error::Result<()> {
    let sq = DecayFit::new(65.0, 1.6, 1.0)?;
    let configs = [
        ("sq", sq),
        ("sq_drive", DecayFit::new(94.0, 1.6, 1.0)?),
        ("dq", DecayFit::new(41.0, 1.6, 2.0)?),
        ("dq_drive", DecayFit::new(75.0, 1.6, 2.0)?),
    ];
    for (label, fit) in configs {
        println!(
            "{label:9} best T {:6.1} us, enhancement {:.2}x",
            fit.peak_time(),
            enhancement(fit, sq)
        );
    }
    let curve = sensitivity_curve(configs[3].1, 200.0, 9)?;
    for (t, v) in curve.t.iter().zip(&curve.value) {
        println!("  T {t:6.1} us  {v:8.1}");
    }
    Ok(())
}
