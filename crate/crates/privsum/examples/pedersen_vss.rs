//! Pedersen verifiable secret sharing: dealt shares carry commitments any
//! holder can check, and commitments combine linearly.

use num_bigint::BigUint;
use privsum::pedersen::{combine_commitments, vss_deal, vss_verify, GroupParams};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() {
    let group = GroupParams::mersenne61_profile();
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    let parties = [1u64, 2, 3, 4];

    let s = BigUint::from(123_456u64);
    let t = group.random_exponent(&mut rng);
    let dealing = vss_deal(&group, &s, &t, 2, &parties, &mut rng).unwrap();
    println!("dealt {} verifiable shares", dealing.shares.len());

    // every holder validates its own share against the public commitments
    for share in &dealing.shares {
        let ok = vss_verify(
            &group,
            share.point,
            (&share.s_share, &share.t_share),
            &dealing.commitments,
        );
        println!("share at point {}: {}", share.point, if ok { "valid" } else { "INVALID" });
        assert!(ok);
    }

    // a corrupted share fails the same check
    let mut bad = dealing.shares[0].clone();
    bad.s_share = group.q_add(&bad.s_share, &BigUint::from(1u32));
    assert!(!vss_verify(
        &group,
        bad.point,
        (&bad.s_share, &bad.t_share),
        &dealing.commitments
    ));
    println!("tampered share rejected");

    // commitments are linear: the combination of two dealings verifies the
    // combination of their shares
    let s2 = BigUint::from(777u64);
    let t2 = group.random_exponent(&mut rng);
    let second = vss_deal(&group, &s2, &t2, 2, &parties, &mut rng).unwrap();
    let coeffs = [BigUint::from(5u32), BigUint::from(9u32)];
    let combined = combine_commitments(
        &group,
        &[&dealing.commitments, &second.commitments],
        &coeffs,
    )
    .unwrap();
    for (a, b) in dealing.shares.iter().zip(&second.shares) {
        let s_comb = group.q_add(
            &group.q_mul(&coeffs[0], &a.s_share),
            &group.q_mul(&coeffs[1], &b.s_share),
        );
        let t_comb = group.q_add(
            &group.q_mul(&coeffs[0], &a.t_share),
            &group.q_mul(&coeffs[1], &b.t_share),
        );
        assert!(vss_verify(&group, a.point, (&s_comb, &t_comb), &combined));
    }
    println!("combined shares verify against combined commitments");
}
