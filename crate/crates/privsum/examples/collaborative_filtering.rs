//! User-weight estimation for collaborative filtering: the augmented
//! symmetric system solved with the toolkit matches the least-squares
//! solution from the normal equations.

use privsum::numerics::{build_augmented, normal_equations_solve, RatingsMatrix};

fn main() {
    // 4 users rating 6 items; find per-user weights so the weighted blend of
    // the users' rating rows best reproduces each item's observed target
    // score (overdetermined: 6 equations, 4 unknowns).
    let ratings = RatingsMatrix {
        users: 4,
        items: 6,
        entries: vec![
            (0, 0, 5.0), (0, 1, 3.0), (0, 4, 2.0),
            (1, 1, 4.0), (1, 2, 1.0), (1, 5, 3.0),
            (2, 0, 2.0), (2, 3, 5.0), (2, 4, 4.0),
            (3, 2, 3.0), (3, 3, 2.0), (3, 5, 1.0),
        ],
    };
    let observed = vec![4.1, 2.9, 3.5, 2.4, 3.8, 1.9];

    let eps = 1e-8;
    let augmented = build_augmented(&ratings, &observed, eps).unwrap();
    let users = ratings.users;
    println!(
        "augmented system: {} unknowns ({} user weights + {} slack)",
        augmented.dimension(),
        users,
        augmented.dimension() - users
    );

    let (dense, rhs) = augmented.to_dense();
    let full = privsum::numerics::dense_solve(&dense, &rhs).unwrap();
    let weights_aug: Vec<f64> = full[..users].to_vec();

    let weights_ls = normal_equations_solve(&ratings, &observed).unwrap();

    println!("augmented-system weights: {weights_aug:.4?}");
    println!("least-squares weights:    {weights_ls:.4?}");

    let max_rel = weights_aug
        .iter()
        .zip(&weights_ls)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0f64, f64::max);
    println!("max relative difference:  {max_rel:.3e}");
    assert!(max_rel < 1e-4);

}
