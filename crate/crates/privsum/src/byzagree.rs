//! Authenticated Byzantine broadcast.
//!
//! A signature-based relay protocol in the Dolev-Strong style: the general
//! signs and sends its value, every node that newly extracts a properly
//! chained value appends its own tag and relays, and after `f + 1` relay
//! rounds each honest node decides the unique extracted value or falls
//! back to the default (zero / none).
//!
//! Signatures are simulator-issued unforgeable tags: the tag registry only
//! records a (signer, value) pair when that signer actually submitted the
//! value, so a faulty node can lie about its own tags but cannot fabricate
//! anyone else's.

use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// Static metadata of one broadcast instance. All participants observe the
/// same metadata; `participants` includes the general.
#[derive(Debug, Clone)]
pub struct AgreementInstance {
    pub general: u64,
    pub participants: Vec<u64>,
    pub f_bound: usize,
}

impl AgreementInstance {
    pub fn new(general: u64, participants: Vec<u64>, f_bound: usize) -> Result<Self> {
        if !participants.contains(&general) {
            return Err(Error::Argument("general must participate".into()));
        }
        let unique: BTreeSet<u64> = participants.iter().copied().collect();
        if unique.len() != participants.len() {
            return Err(Error::Argument("duplicate participant ids".into()));
        }
        Ok(AgreementInstance {
            general,
            participants,
            f_bound,
        })
    }

    /// Number of relay rounds the protocol always runs.
    pub fn rounds(&self) -> usize {
        self.f_bound + 1
    }
}

/// A value plus its authenticating tag chain, oldest signer first.
#[derive(Debug, Clone)]
pub struct SignedRelay<V> {
    pub value: V,
    pub chain: Vec<u64>,
}

/// What one honest participant decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementOutcome<V> {
    /// `None` means the default value (zero) was decided.
    pub decided: Option<V>,
    pub decided_round: usize,
    pub default_used: bool,
}

/// Behavior of a corrupted general in round 1.
#[derive(Debug, Clone)]
pub enum GeneralBehavior<V> {
    Honest,
    /// Per-recipient initial value; `None` withholds entirely.
    Equivocate(BTreeMap<u64, Option<V>>),
}

/// Behavior of a corrupted relayer in rounds 2 and later.
#[derive(Debug, Clone)]
pub enum RelayBehavior<V> {
    Faithful,
    /// Never relay anything.
    Drop,
    /// Relay only to the listed participants.
    OnlyTo(BTreeSet<u64>),
    /// Sit on extracted values until the given round, then send to the
    /// listed participants only.
    DelayUntil { round: usize, to: BTreeSet<u64> },
    /// Try to relay a fabricated value with a chain the node cannot
    /// legitimately build; receivers reject it at tag validation.
    ForgeAttempt(V),
}

/// A scripted adversary for one broadcast instance.
#[derive(Debug, Clone)]
pub struct BroadcastAdversary<V> {
    pub corrupted: BTreeSet<u64>,
    pub general: GeneralBehavior<V>,
    pub relays: BTreeMap<u64, RelayBehavior<V>>,
}

impl<V> BroadcastAdversary<V> {
    pub fn honest() -> Self {
        BroadcastAdversary {
            corrupted: BTreeSet::new(),
            general: GeneralBehavior::Honest,
            relays: BTreeMap::new(),
        }
    }
}

/// Message and tag volume of one instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstanceMetrics {
    pub messages: usize,
    pub tags: usize,
}

struct NodeState<V> {
    extracted: BTreeSet<V>,
    /// Values already relayed (honest nodes stop after two distinct ones:
    /// a third extraction cannot change any decision).
    relayed: usize,
}

/// Run one broadcast instance to completion and return each participant's
/// outcome, keyed by id. Corrupted participants are reported too; their
/// entries carry whatever their (scripted) state ended with and make no
/// guarantee.
pub fn run_broadcast<V>(
    instance: &AgreementInstance,
    general_value: V,
    adversary: &BroadcastAdversary<V>,
    metrics: &mut InstanceMetrics,
) -> Result<BTreeMap<u64, AgreementOutcome<V>>>
where
    V: Clone + Eq + Ord + std::fmt::Debug,
{
    if adversary.corrupted.len() > instance.f_bound {
        return Err(Error::Config(format!(
            "{} corrupted participants exceed the fault bound {}",
            adversary.corrupted.len(),
            instance.f_bound
        )));
    }
    for id in adversary.corrupted.iter().chain(adversary.relays.keys()) {
        if !instance.participants.contains(id) {
            return Err(Error::Argument(format!("scripted node {id} not in instance")));
        }
    }
    let rounds = instance.rounds();
    let mut registry: BTreeSet<(u64, V)> = BTreeSet::new();
    let mut states: BTreeMap<u64, NodeState<V>> = instance
        .participants
        .iter()
        .map(|&id| {
            (
                id,
                NodeState {
                    extracted: BTreeSet::new(),
                    relayed: 0,
                },
            )
        })
        .collect();
    // delayed payloads held by scripted nodes: (release_round, sender, to, value)
    let mut delayed: Vec<(usize, u64, BTreeSet<u64>, V)> = Vec::new();

    // round 1: the general's sends
    let mut inboxes: BTreeMap<u64, Vec<SignedRelay<V>>> = BTreeMap::new();
    let general_corrupt = adversary.corrupted.contains(&instance.general);
    match (&adversary.general, general_corrupt) {
        (GeneralBehavior::Equivocate(plan), true) => {
            for (&to, val) in plan {
                if let Some(v) = val {
                    // the general did submit this value, so its tag is real
                    registry.insert((instance.general, v.clone()));
                    inboxes.entry(to).or_default().push(SignedRelay {
                        value: v.clone(),
                        chain: vec![instance.general],
                    });
                    metrics.messages += 1;
                    metrics.tags += 1;
                }
            }
        }
        _ => {
            registry.insert((instance.general, general_value.clone()));
            for &to in &instance.participants {
                inboxes.entry(to).or_default().push(SignedRelay {
                    value: general_value.clone(),
                    chain: vec![instance.general],
                });
                metrics.messages += 1;
                metrics.tags += 1;
            }
        }
    }

    for round in 1..=rounds {
        // deliver and extract
        let mut newly: BTreeMap<u64, Vec<V>> = BTreeMap::new();
        for (&node, inbox) in &inboxes {
            let state = states.get_mut(&node).unwrap();
            for relay in inbox {
                if relay.chain.len() != round {
                    continue;
                }
                if relay.chain[0] != instance.general {
                    continue;
                }
                let unique: BTreeSet<u64> = relay.chain.iter().copied().collect();
                if unique.len() != relay.chain.len() {
                    continue;
                }
                if relay
                    .chain
                    .iter()
                    .any(|signer| !registry.contains(&(*signer, relay.value.clone())))
                {
                    continue; // forged tag somewhere in the chain
                }
                if state.extracted.insert(relay.value.clone()) {
                    newly.entry(node).or_default().push(relay.value.clone());
                }
            }
        }
        if round == rounds {
            break; // nothing to relay after the last round
        }
        // relay phase feeding the next round
        inboxes = BTreeMap::new();
        let next_round = round + 1;
        // release matured delayed sends
        let (due, rest): (Vec<_>, Vec<_>) = delayed
            .into_iter()
            .partition(|(release, _, _, _)| *release == next_round);
        delayed = rest;
        for (_, sender, to, value) in due {
            registry.insert((sender, value.clone()));
            // a delayed chain: general + the delaying signer claims it just
            // extracted; chain must have next_round entries to be accepted,
            // which only works when the script delays by legitimate chain
            // growth among colluders. A single delayer pads with nothing and
            // its message is simply rejected later when too short.
            let mut chain = vec![instance.general];
            chain.push(sender);
            for &target in &to {
                inboxes.entry(target).or_default().push(SignedRelay {
                    value: value.clone(),
                    chain: chain.clone(),
                });
                metrics.messages += 1;
                metrics.tags += chain.len();
            }
        }
        for &node in &instance.participants {
            let fresh = newly.remove(&node).unwrap_or_default();
            if fresh.is_empty() {
                continue;
            }
            let behavior = if adversary.corrupted.contains(&node) {
                adversary
                    .relays
                    .get(&node)
                    .cloned()
                    .unwrap_or(RelayBehavior::Faithful)
            } else {
                RelayBehavior::Faithful
            };
            let targets: Vec<u64> = match &behavior {
                RelayBehavior::Faithful => instance.participants.clone(),
                RelayBehavior::Drop => Vec::new(),
                RelayBehavior::OnlyTo(set) => set.iter().copied().collect(),
                RelayBehavior::DelayUntil { round: r, to } => {
                    for v in &fresh {
                        delayed.push((*r, node, to.clone(), v.clone()));
                    }
                    Vec::new()
                }
                RelayBehavior::ForgeAttempt(_) => instance.participants.clone(),
            };
            let values: Vec<V> = match &behavior {
                RelayBehavior::ForgeAttempt(forged) => {
                    // the forger signs its fabrication, but nobody else did
                    registry.insert((node, forged.clone()));
                    vec![forged.clone()]
                }
                _ => {
                    let state = states.get_mut(&node).unwrap();
                    let mut out = Vec::new();
                    for v in fresh {
                        if state.relayed >= 2 && !adversary.corrupted.contains(&node) {
                            break;
                        }
                        state.relayed += 1;
                        registry.insert((node, v.clone()));
                        out.push(v);
                    }
                    out
                }
            };
            for v in values {
                let chain: Vec<u64> = match &behavior {
                    RelayBehavior::ForgeAttempt(_) => {
                        // fabricated chain: pretends the general signed it
                        let mut c = vec![instance.general];
                        c.push(node);
                        while c.len() < next_round {
                            // pad with ids it also cannot speak for
                            let filler = instance
                                .participants
                                .iter()
                                .copied()
                                .find(|p| !c.contains(p))
                                .unwrap_or(node);
                            c.push(filler);
                        }
                        c
                    }
                    _ => {
                        // honest chain: reuse the accepted chain and append
                        // own tag; reconstructing from the registry is
                        // equivalent because tags are per (signer, value)
                        let mut c: Vec<u64> = registry
                            .iter()
                            .filter(|(signer, val)| val == &v && *signer != node)
                            .map(|(signer, _)| *signer)
                            .take(next_round - 1)
                            .collect();
                        if let Some(pos) = c.iter().position(|&s| s == instance.general) {
                            c.swap(0, pos);
                        }
                        c.push(node);
                        c
                    }
                };
                for &to in &targets {
                    inboxes.entry(to).or_default().push(SignedRelay {
                        value: v.clone(),
                        chain: chain.clone(),
                    });
                    metrics.messages += 1;
                    metrics.tags += chain.len();
                }
            }
        }
    }

    let outcomes = states
        .into_iter()
        .map(|(id, state)| {
            let decided = if state.extracted.len() == 1 {
                Some(state.extracted.into_iter().next().unwrap())
            } else {
                None
            };
            let default_used = decided.is_none();
            (
                id,
                AgreementOutcome {
                    decided,
                    decided_round: rounds,
                    default_used,
                },
            )
        })
        .collect();
    Ok(outcomes)
}

/// Check Agreement/Validity over the honest participants of a finished run.
pub fn check_properties<V: Clone + Eq + std::fmt::Debug>(
    instance: &AgreementInstance,
    general_value: &V,
    adversary: &BroadcastAdversary<V>,
    outcomes: &BTreeMap<u64, AgreementOutcome<V>>,
) -> Result<()> {
    let honest: Vec<u64> = instance
        .participants
        .iter()
        .copied()
        .filter(|id| !adversary.corrupted.contains(id))
        .collect();
    let first = &outcomes[&honest[0]];
    for id in &honest {
        let o = &outcomes[id];
        if o.decided != first.decided {
            return Err(Error::Corruption(format!(
                "agreement violated: node {id} decided {:?}, node {} decided {:?}",
                o.decided, honest[0], first.decided
            )));
        }
        if o.decided_round != instance.rounds() {
            return Err(Error::Corruption(format!(
                "termination violated: decided in round {}",
                o.decided_round
            )));
        }
    }
    if !adversary.corrupted.contains(&instance.general)
        && first.decided.as_ref() != Some(general_value)
    {
        return Err(Error::Corruption(format!(
            "validity violated: honest general sent {general_value:?}, decided {:?}",
            first.decided
        )));
    }
    Ok(())
}

/// Exhaustively enumerate adversary scripts on instances of up to
/// `max_participants` nodes and check Agreement, Validity, and Termination
/// for each. Covers an honest baseline, every equivocation plan of a
/// corrupted general, and (for f = 2) every combination with a corrupted
/// relayer running each relay behavior over each target subset. Returns the
/// number of scripts verified.
pub fn exhaustive_property_check(max_participants: u64) -> Result<usize> {
    let mut verified = 0usize;
    for n in 2..=max_participants {
        let participants: Vec<u64> = (0..n).collect();
        let others: Vec<u64> = (1..n).collect();
        let all_subsets: Vec<BTreeSet<u64>> = (0u32..(1 << (n as u32)))
            .map(|mask| {
                (0..n)
                    .filter(|&i| mask & (1 << (i as u32)) != 0)
                    .collect()
            })
            .collect();

        // honest baseline at every fault bound
        for f in 0..n as usize {
            let inst = AgreementInstance::new(0, participants.clone(), f)?;
            let mut m = InstanceMetrics::default();
            let outcomes = run_broadcast(&inst, 41u64, &BroadcastAdversary::honest(), &mut m)?;
            check_properties(&inst, &41u64, &BroadcastAdversary::honest(), &outcomes)?;
            verified += 1;
        }

        // corrupted general: every per-recipient plan over {v1, v2, nothing}
        let options = [Some(1u64), Some(2u64), None];
        let plan_count = 3usize.pow(n as u32 - 1);
        for f in 1..=2.min(n as usize - 1) {
            let inst = AgreementInstance::new(0, participants.clone(), f)?;
            for mut idx in 0..plan_count {
                let mut plan = BTreeMap::new();
                for &to in &others {
                    plan.insert(to, options[idx % 3].clone());
                    idx /= 3;
                }
                let adversary = BroadcastAdversary {
                    corrupted: [0u64].into_iter().collect(),
                    general: GeneralBehavior::Equivocate(plan.clone()),
                    relays: BTreeMap::new(),
                };
                let mut m = InstanceMetrics::default();
                let outcomes = run_broadcast(&inst, 1u64, &adversary, &mut m)?;
                check_properties(&inst, &1u64, &adversary, &outcomes)?;
                verified += 1;

                // f = 2: additionally corrupt one relayer per behavior family
                if f == 2 && n >= 3 {
                    let relayer = 1u64;
                    let mut behaviors: Vec<RelayBehavior<u64>> =
                        vec![RelayBehavior::Drop, RelayBehavior::ForgeAttempt(9)];
                    for subset in &all_subsets {
                        behaviors.push(RelayBehavior::OnlyTo(subset.clone()));
                        behaviors.push(RelayBehavior::DelayUntil {
                            round: f + 1,
                            to: subset.clone(),
                        });
                    }
                    for b in behaviors {
                        let adversary = BroadcastAdversary {
                            corrupted: [0u64, relayer].into_iter().collect(),
                            general: GeneralBehavior::Equivocate(plan.clone()),
                            relays: [(relayer, b)].into_iter().collect(),
                        };
                        let mut m = InstanceMetrics::default();
                        let outcomes = run_broadcast(&inst, 1u64, &adversary, &mut m)?;
                        check_properties(&inst, &1u64, &adversary, &outcomes)?;
                        verified += 1;
                    }
                }
            }
        }

        // honest general with corrupted relayers: validity must hold
        for f in 1..=2.min(n as usize - 1) {
            let inst = AgreementInstance::new(0, participants.clone(), f)?;
            for &relayer in &others {
                let mut behaviors: Vec<RelayBehavior<u64>> =
                    vec![RelayBehavior::Drop, RelayBehavior::ForgeAttempt(9)];
                for subset in &all_subsets {
                    behaviors.push(RelayBehavior::OnlyTo(subset.clone()));
                }
                for b in behaviors {
                    let adversary = BroadcastAdversary {
                        corrupted: [relayer].into_iter().collect(),
                        general: GeneralBehavior::Honest,
                        relays: [(relayer, b)].into_iter().collect(),
                    };
                    let mut m = InstanceMetrics::default();
                    let outcomes = run_broadcast(&inst, 6u64, &adversary, &mut m)?;
                    check_properties(&inst, &6u64, &adversary, &outcomes)?;
                    for (&id, o) in &outcomes {
                        if id != relayer && o.decided != Some(6) {
                            return Err(Error::Corruption(
                                "validity violated under honest general".into(),
                            ));
                        }
                    }
                    verified += 1;
                }
            }
        }
    }
    Ok(verified)
}
