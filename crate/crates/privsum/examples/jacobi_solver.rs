//! Solving a diagonally dominant linear system with the distributed Jacobi
//! iteration, including a spectral-radius convergence check.

use privsum::numerics::{jacobi_solve, spectral_radius_check, SparseSystem};

fn main() {
    // 4x4 diagonally dominant system.
    let triples = [
        (0, 0, 10.0), (0, 1, -1.0), (0, 3, 2.0),
        (1, 0, -1.0), (1, 1, 11.0), (1, 2, -1.0), (1, 3, 3.0),
        (2, 1, -1.0), (2, 2, 10.0), (2, 3, -1.0),
        (3, 0, 2.0), (3, 1, -1.0), (3, 2, -1.0), (3, 3, 8.0),
    ];
    let b = vec![6.0, 25.0, -11.0, 15.0];
    let system = SparseSystem::from_triples(4, &triples, b).unwrap();

    let rho = spectral_radius_check(&system, 60);
    println!("estimated spectral radius of iteration matrix: {rho:.4}");
    assert!(rho < 1.0, "iteration would diverge");

    let (state, converged) = jacobi_solve(&system, vec![0.0; 4], 1e-10, 200).unwrap();
    println!("converged: {converged} after {} rounds", state.round);
    println!("solution:  {:?}", state.x);
    println!("residual:  {:.3e}", system.residual_inf(&state.x));
    assert!(converged);
    assert!(system.residual_inf(&state.x) < 1e-9);
}
