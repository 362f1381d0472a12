//! Active-adversary behavior against the verifiable secret-sharing scheme:
//! every scripted deviation is either detected and attributed or forces an
//! abort — the collector never accepts an unverified wrong value.

use privsum::field::FieldParams;
use privsum::pedersen::GroupParams;
use privsum::schemes::{
    bs6_expected_commitment, malicious_sss_round, Deviation, ForwardRule, MaliciousScript,
    MaliciousVicinity, MessageLedger, WeightVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;

fn main() {
    let field = FieldParams::mersenne61();
    let group = GroupParams::mersenne61_profile();
    let vicinity = MaliciousVicinity::new(group.clone(), 3, 1).unwrap();
    let collector = 0u64;
    let neighbors = [1u64, 2, 3, 4];

    let secrets: BTreeMap<_, _> = neighbors
        .iter()
        .map(|&j| (j, field.element(10 * j)))
        .collect();
    let weights: WeightVector = neighbors.iter().map(|&j| (j, field.element(j))).collect();
    let truth: u64 = neighbors.iter().map(|&j| 10 * j * j).sum();

    let mut rng = ChaCha12Rng::seed_from_u64(9);
    let mut ledger = MessageLedger::new();

    // Honest baseline with a verification certificate.
    let honest = malicious_sss_round(
        collector, 1, &secrets, &weights, &vicinity,
        &MaliciousScript::honest(), &mut rng, &mut ledger,
    )
    .unwrap();
    let value = honest.outcome.field_value().unwrap();
    println!("honest round: value {value}, verified {}", honest.outcome.verified);
    assert_eq!(value.value(), truth);

    // Certificate chaining: the next round's expected commitment for an
    // affine forward rule is derived from this round's certificate.
    let cert = honest.certificate.as_ref().unwrap();
    let rule = ForwardRule {
        alpha: 5u32.into(),
        beta: 3u32.into(),
    };
    let expected = bs6_expected_commitment(&group, &cert.e0, &rule);
    let (m_next, _t_next) = rule.apply(&group, cert);
    println!("forward rule: next value {m_next}, chained commitment {expected:?}");

    // Scripted deviations, one at a time.
    let scripts = [
        ("tampered share", Deviation::TamperShare { dealer: 2, holder: 3 }),
        ("tampered aggregate", Deviation::TamperAggregateS { aggregator: 1 }),
        ("equivocating dealer", Deviation::EquivocateCommitments { dealer: 4 }),
        ("withheld shares", Deviation::WithholdShares { dealer: 3 }),
        ("withheld aggregate", Deviation::WithholdAggregate { aggregator: 2 }),
    ];
    for (label, dev) in scripts {
        let script = MaliciousScript { deviations: vec![dev] };
        let res = malicious_sss_round(
            collector, 1, &secrets, &weights, &vicinity,
            &script, &mut rng, &mut ledger,
        )
        .unwrap();
        match res.outcome.field_value() {
            Ok(v) => {
                // Tolerated deviation: output must still be verified correct.
                assert!(res.outcome.verified);
                assert_eq!(v.value(), truth);
                println!(
                    "{label}: tolerated, correct value recovered (invalid dealers {:?}, \
                     invalid aggregators {:?}, complaints {:?})",
                    res.invalid_dealers, res.invalid_aggregators, res.complaints
                );
            }
            Err(_) => {
                println!(
                    "{label}: aborted ({})",
                    res.outcome.abort_reason.as_deref().unwrap_or("unspecified")
                );
            }
        }
    }
}
