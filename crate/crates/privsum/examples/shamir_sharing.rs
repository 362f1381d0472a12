//! Shamir secret sharing: deal, reconstruct, and the additive degenerate
//! mode.

use privsum::field::FieldParams;
use privsum::shamir::{deal, deal_additive, precompute_lagrange, reconstruct};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() {
    let field = FieldParams::mersenne61();
    let mut rng = ChaCha12Rng::seed_from_u64(7);

    // split a secret with threshold 3 among 6 parties
    let secret = field.element(424_242);
    let points: Vec<_> = (1..=6u64).map(|x| field.element(x)).collect();
    let dealing = deal(secret, 3, &points, &mut rng).unwrap();
    println!("dealt {} shares with threshold 3", dealing.shares.len());

    // any 3 shares recover the secret, 2 do not pin it down
    let recovered = reconstruct(&dealing.shares[2..5]).unwrap();
    println!("recovered from shares 3..5: {recovered}");
    assert_eq!(recovered, secret);

    // interpolation weights depend only on the points, so a vicinity
    // computes them once and reuses them every round
    let weights = precompute_lagrange(&points[..3]).unwrap();
    println!(
        "precomputed {} interpolation weights at zero",
        weights.weights().len()
    );

    // additive mode: the threshold equals the party count and every
    // summand is required
    let parts = deal_additive(secret, 4, &mut rng).unwrap();
    let mut sum = field.element(0);
    for p in &parts {
        sum = sum.add(p).unwrap();
    }
    println!("additive parts sum back to {sum}");
    assert_eq!(sum, secret);
}
