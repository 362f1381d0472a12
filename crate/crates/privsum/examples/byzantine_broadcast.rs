//! Authenticated Byzantine broadcast: an honest general gets its value
//! through; an equivocating general is forced to a unanimous default.

use privsum::byzagree::{
    run_broadcast, AgreementInstance, BroadcastAdversary, GeneralBehavior, InstanceMetrics,
};
use std::collections::BTreeMap;

fn main() {
    let participants: Vec<u64> = (0..5).collect();

    // honest general, one tolerated fault: everyone decides 42 in 2 rounds
    let instance = AgreementInstance::new(0, participants.clone(), 1).unwrap();
    let mut metrics = InstanceMetrics::default();
    let outcomes =
        run_broadcast(&instance, 42u64, &BroadcastAdversary::honest(), &mut metrics).unwrap();
    for (id, o) in &outcomes {
        println!("node {id}: decided {:?} after round {}", o.decided, o.decided_round);
        assert_eq!(o.decided, Some(42));
    }
    println!("{} messages, {} signature tags\n", metrics.messages, metrics.tags);

    // equivocating general: half the nodes are told 1, half are told 2;
    // the relay rounds expose the conflict and everyone defaults together
    let mut plan = BTreeMap::new();
    for &to in &participants[1..] {
        plan.insert(to, Some(if to % 2 == 0 { 1u64 } else { 2u64 }));
    }
    let adversary = BroadcastAdversary {
        corrupted: [0u64].into_iter().collect(),
        general: GeneralBehavior::Equivocate(plan),
        relays: BTreeMap::new(),
    };
    let mut metrics = InstanceMetrics::default();
    let outcomes = run_broadcast(&instance, 1u64, &adversary, &mut metrics).unwrap();
    for (id, o) in &outcomes {
        if !adversary.corrupted.contains(id) {
            println!(
                "node {id}: decided {:?} (default used: {})",
                o.decided, o.default_used
            );
            assert_eq!(o.decided, None);
        }
    }
    println!("equivocation neutralized: all honest nodes agree on the default");
}
