//! The same weighted sum collected under every protection scheme: the
//! field-based schemes agree exactly, the perturbation scheme only in
//! expectation.

use privsum::field::FieldParams;
use privsum::pedersen::GroupParams;
use privsum::schemes::{
    homomorphic_round, malicious_sss_round, perturb_round, plain_round, semi_honest,
    sss_round, MaliciousScript, MaliciousVicinity, MessageLedger, NoiseParams, OutcomeValue,
    SssMode, WeightVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::{BTreeMap, BTreeSet};

fn main() {
    let field = FieldParams::mersenne61();
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    let collector = 0u64;
    let neighbors = [1u64, 2, 3];
    let values = [100u64, 200, 300];
    let coeffs = [7u64, 1, 2];
    let truth: u64 = values.iter().zip(&coeffs).map(|(v, c)| v * c).sum();

    let secrets: BTreeMap<_, _> = neighbors
        .iter()
        .zip(&values)
        .map(|(&j, &v)| (j, field.element(v)))
        .collect();
    let weights: WeightVector = neighbors
        .iter()
        .zip(&coeffs)
        .map(|(&j, &c)| (j, field.element(c)))
        .collect();
    let real_msgs: BTreeMap<_, _> = neighbors
        .iter()
        .zip(&values)
        .map(|(&j, &v)| (j, v as f64))
        .collect();
    let real_weights: BTreeMap<_, _> = neighbors
        .iter()
        .zip(&coeffs)
        .map(|(&j, &c)| (j, c as f64))
        .collect();

    let mut ledger = MessageLedger::new();
    let plain = plain_round(collector, 1, &real_msgs, &real_weights, &mut ledger).unwrap();
    println!("plain:       {:?}", plain.value);

    let noisy = perturb_round(
        collector,
        1,
        &real_msgs,
        &real_weights,
        NoiseParams { sigma: 5.0 },
        &mut rng,
        &mut ledger,
    )
    .unwrap();
    if let OutcomeValue::Real(v) = noisy.value {
        println!("perturbed:   {v:.2} (true sum {truth})");
    }

    for mode in [SssMode::PerMessage, SssMode::SingleBroadcast, SssMode::Additive] {
        let out = sss_round(
            collector, 1, &secrets, &weights, 2, mode,
            &BTreeSet::new(), &mut rng, &mut ledger,
        )
        .unwrap();
        println!("sss {mode:?}: {}", out.field_value().unwrap());
        assert_eq!(out.field_value().unwrap().value(), truth);
    }

    let (pk, sk) = privsum::paillier::keygen(256, &mut rng);
    let key_shares = privsum::paillier::split_key(sk, &neighbors, 2, &mut rng).unwrap();
    let vic = semi_honest::HomomorphicVicinity {
        owner: collector,
        pk,
        key_shares,
    };
    let out = homomorphic_round(
        collector, 1, &secrets, &weights, &vic,
        &BTreeSet::new(), &mut rng, &mut ledger,
    )
    .unwrap();
    println!("homomorphic: {}", out.field_value().unwrap());
    assert_eq!(out.field_value().unwrap().value(), truth);

    let vic = MaliciousVicinity::new(GroupParams::mersenne61_profile(), 2, 1).unwrap();
    let res = malicious_sss_round(
        collector, 1, &secrets, &weights, &vic,
        &MaliciousScript::honest(), &mut rng, &mut ledger,
    )
    .unwrap();
    println!(
        "malicious:   {} (verified: {})",
        res.outcome.field_value().unwrap(),
        res.outcome.verified
    );
    assert_eq!(res.outcome.field_value().unwrap().value(), truth);

    println!("\ntotal messages across all schemes: {}", ledger.count());
}
