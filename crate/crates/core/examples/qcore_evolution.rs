//! Resonant Rabi flopping of a spin-1 on the 0 <-> -1 transition, coherent and
//! with pure dephasing, using the dense propagator and the Lindblad integrator.

use spinbath::qcore::{evolve, propagator, spin_operators, Complex64, Dephaser, QuantumState, Segment};

fn main() -> spinbath::error::Result<()> {
    let s = spin_operators(1.0)?;
    // rotating frame, drive only on |0> <-> |-1> (indices 1 and 2)
    let rabi = 5.0;
    let mut h = spinbath::qcore::ComplexMatrix::zeros(3, 3);
    h[(1, 2)] = Complex64::new(rabi / 2.0, 0.0);
    h[(2, 1)] = Complex64::new(rabi / 2.0, 0.0);

    let start = QuantumState::basis(1, vec![3])?;
    println!("t_us   p0_coherent  p0_dephased");
    for i in 0..=10 {
        let t = 0.02 * i as f64;
        let u = propagator(&h, t)?;
        let psi = &u * start.density() * u.adjoint();
        let coherent = psi[(1, 1)].re;
        let seg = Segment {
            hamiltonian: h.clone(),
            duration: t,
            dephasers: vec![Dephaser { op: s.sz.clone(), rate: 2.0 }],
        };
        let open = evolve(&start, &[seg])?;
        println!("{t:.2}   {coherent:.4}       {:.4}", open.populations()[1]);
    }
    Ok(())
}
