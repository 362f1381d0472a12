//! Verified weighted-sum collection for the malicious model.
//!
//! Every message m_ji is dealt as a Pedersen-committed verifiable sharing
//! whose commitment vector is fixed by Byzantine agreement, so a cheating
//! dealer cannot equivocate and a cheating aggregator cannot forge its
//! reported linear combination: node i checks each reported pair
//! (S_li, T_li) against the product of the agreed commitment vectors raised
//! to the public coefficients. Across rounds, the chaining check pins node
//! i's next outgoing commitment to the combination its neighbors can compute
//! themselves, so i cannot forward anything but the sum it provably
//! received.
//!
//! The scheme requires the sharing field to be the commitment group's
//! exponent ring Z_q, so polynomial identities over shares and commitment
//! identities over the group agree.

use super::{MessageLedger, Payload, SchemeOutcome, WeightVector};
use crate::byzagree::{
    run_broadcast, AgreementInstance, BroadcastAdversary, GeneralBehavior, InstanceMetrics,
};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::pedersen::{
    combine_commitments, vss_deal, vss_verify, Commitment, CommitmentVector, GroupParams,
    VssDealing,
};
use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Group and threshold parameters shared by a collecting node's vicinity.
#[derive(Debug, Clone)]
pub struct MaliciousVicinity {
    pub group: GroupParams,
    pub d: usize,
    /// Byzantine fault bound; must stay below `d`.
    pub f: usize,
}

impl MaliciousVicinity {
    pub fn new(group: GroupParams, d: usize, f: usize) -> Result<Self> {
        if f >= d {
            return Err(Error::Config(format!(
                "fault bound {f} must stay below threshold {d}"
            )));
        }
        Ok(MaliciousVicinity { group, d, f })
    }

    fn q64(&self) -> Result<u64> {
        let digits = self.group.q().to_u64_digits();
        match digits.as_slice() {
            [q] => Ok(*q),
            _ => Err(Error::Config(
                "group order does not fit the message field".into(),
            )),
        }
    }
}

/// One scripted deviation by a corrupted vicinity member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Deviation {
    /// The dealer corrupts the share it sends to one holder.
    TamperShare { dealer: u64, holder: u64 },
    /// The aggregator inflates its reported S value by one.
    TamperAggregateS { aggregator: u64 },
    /// The aggregator inflates its reported blinding aggregate by one.
    TamperAggregateT { aggregator: u64 },
    /// The dealer broadcasts conflicting commitment vectors.
    EquivocateCommitments { dealer: u64 },
    /// The dealer never sends its shares.
    WithholdShares { dealer: u64 },
    /// The aggregator never reports.
    WithholdAggregate { aggregator: u64 },
}

#[derive(Debug, Clone, Default)]
pub struct MaliciousScript {
    pub deviations: Vec<Deviation>,
}

impl MaliciousScript {
    pub fn honest() -> Self {
        Self::default()
    }

    fn corrupted(&self) -> BTreeSet<u64> {
        self.deviations
            .iter()
            .map(|dev| match dev {
                Deviation::TamperShare { dealer, .. }
                | Deviation::EquivocateCommitments { dealer }
                | Deviation::WithholdShares { dealer } => *dealer,
                Deviation::TamperAggregateS { aggregator }
                | Deviation::TamperAggregateT { aggregator }
                | Deviation::WithholdAggregate { aggregator } => *aggregator,
            })
            .collect()
    }
}

/// What node i can hand to the next round so its neighbors can verify the
/// forwarded value: the combined free-coefficient commitment and the
/// openings it binds.
#[derive(Debug, Clone)]
pub struct Bs6Certificate {
    pub e0: Commitment,
    pub m_prime: u64,
    pub t_prime: u64,
}

/// Result of one verified collection round.
#[derive(Debug, Clone)]
pub struct MaliciousRoundResult {
    pub outcome: SchemeOutcome,
    pub certificate: Option<Bs6Certificate>,
    /// Dealers whose commitments failed agreement or who withheld shares.
    pub invalid_dealers: BTreeSet<u64>,
    /// Aggregators whose reported pair failed the commitment equation.
    pub invalid_aggregators: BTreeSet<u64>,
    /// (holder, dealer) share complaints raised before aggregation.
    pub complaints: Vec<(u64, u64)>,
}

fn point_of(l: u64) -> u64 {
    l + 1
}

/// Run one verified collection round for node `i`.
///
/// `secrets` maps each sender j to its message m_ji; the field modulus must
/// equal the commitment group order q. The scripted deviations are executed
/// faithfully; the returned outcome is either a verified correct sum or an
/// abort that names its cause — never an unverified wrong value.
pub fn malicious_sss_round<R: Rng + ?Sized>(
    i: u64,
    round: usize,
    secrets: &BTreeMap<u64, FieldElement>,
    weights: &WeightVector,
    vicinity: &MaliciousVicinity,
    script: &MaliciousScript,
    rng: &mut R,
    ledger: &mut MessageLedger,
) -> Result<MaliciousRoundResult> {
    let group = &vicinity.group;
    let q64 = vicinity.q64()?;
    let neighbors: Vec<u64> = weights.keys().copied().collect();
    if neighbors.is_empty() {
        return Err(Error::Argument("empty vicinity".into()));
    }
    if vicinity.d > neighbors.len() {
        return Err(Error::Config(format!(
            "threshold {} exceeds vicinity size {}",
            vicinity.d,
            neighbors.len()
        )));
    }
    for (j, m) in secrets {
        if m.modulus() != q64 {
            return Err(Error::Config(format!(
                "message field of node {j} does not match the group order"
            )));
        }
    }
    let corrupted = script.corrupted();
    if corrupted.len() > vicinity.f {
        return Err(Error::Config(format!(
            "{} corrupted members exceed the fault bound {}",
            corrupted.len(),
            vicinity.f
        )));
    }

    let mut invalid_dealers: BTreeSet<u64> = BTreeSet::new();
    let mut invalid_aggregators: BTreeSet<u64> = BTreeSet::new();
    let mut complaints: Vec<(u64, u64)> = Vec::new();

    // dealing: each sender shares its message under a fresh blinding and
    // fixes the commitment vector by Byzantine agreement
    let party_points: Vec<u64> = neighbors.iter().map(|&l| point_of(l)).collect();
    let mut dealings: BTreeMap<u64, VssDealing> = BTreeMap::new();
    let mut agreed: BTreeMap<u64, CommitmentVector> = BTreeMap::new();
    let mut participants: Vec<u64> = neighbors.clone();
    if !participants.contains(&i) {
        participants.push(i);
    }
    for &j in &neighbors {
        if script
            .deviations
            .contains(&Deviation::WithholdShares { dealer: j })
        {
            invalid_dealers.insert(j);
            ledger.record_withheld();
            continue;
        }
        let m = secrets
            .get(&j)
            .ok_or_else(|| Error::Round(format!("missing message from node {j}")))?;
        let t = group.random_exponent(rng);
        let dealing = vss_deal(group, &BigUint::from(m.value()), &t, vicinity.d, &party_points, rng)?;

        // commitment agreement: honest dealers broadcast one vector, an
        // equivocating dealer splits the vicinity, and the agreement
        // protocol forces a single (possibly default) decision
        let commitment_values: Vec<BigUint> = dealing
            .commitments
            .entries()
            .iter()
            .map(|c| c.value().clone())
            .collect();
        let instance = AgreementInstance::new(j, participants.clone(), vicinity.f)?;
        let adversary = if script
            .deviations
            .contains(&Deviation::EquivocateCommitments { dealer: j })
        {
            let mut twisted = commitment_values.clone();
            twisted[0] = (twisted[0].clone() * group.g()) % group.p();
            let mut plan = BTreeMap::new();
            for (idx, &to) in participants.iter().enumerate() {
                let v = if idx % 2 == 0 {
                    commitment_values.clone()
                } else {
                    twisted.clone()
                };
                plan.insert(to, Some(v));
            }
            BroadcastAdversary {
                corrupted: [j].into_iter().collect(),
                general: GeneralBehavior::Equivocate(plan),
                relays: BTreeMap::new(),
            }
        } else {
            BroadcastAdversary::honest()
        };
        let mut metrics = InstanceMetrics::default();
        let outcomes = run_broadcast(&instance, commitment_values, &adversary, &mut metrics)?;
        ledger.record_relays(metrics.messages);
        // adopt the decision of the collecting node; agreement guarantees
        // every honest member saw the same one
        match &outcomes[&i].decided {
            Some(values) => {
                agreed.insert(
                    j,
                    CommitmentVector::new(
                        values.iter().cloned().map(Commitment::from_value).collect(),
                    ),
                );
            }
            None => {
                invalid_dealers.insert(j);
                continue;
            }
        }

        // share delivery, with scripted per-holder tampering
        for &l in &neighbors {
            let mut share = dealing.share_for(point_of(l)).unwrap().clone();
            if script.deviations.contains(&Deviation::TamperShare {
                dealer: j,
                holder: l,
            }) {
                share.s_share = group.q_add(&share.s_share, &BigUint::one());
            }
            ledger.record(j, l, round, Payload::Share(FieldElement::new(
                share.s_share.to_u64_digits().first().copied().unwrap_or(0),
                q64,
            )));
            // holder-side verification against the agreed commitments
            let ok = vss_verify(
                group,
                point_of(l),
                (&share.s_share, &share.t_share),
                &agreed[&j],
            );
            if !ok {
                complaints.push((l, j));
            }
            dealings.entry(j).or_insert_with(|| dealing.clone());
            if ok {
                // store the (possibly tampered) share the holder accepted
                if let Some(d) = dealings.get_mut(&j) {
                    if let Some(slot) = d.shares.iter_mut().find(|s| s.point == point_of(l)) {
                        *slot = share;
                    }
                }
            }
        }
    }

    if !invalid_dealers.is_empty() {
        // a dealer the vicinity cannot include makes the full weighted sum
        // uncomputable; report and stop
        return Ok(MaliciousRoundResult {
            outcome: SchemeOutcome::abort(format!(
                "dealers {invalid_dealers:?} failed commitment agreement or withheld"
            )),
            certificate: None,
            invalid_dealers,
            invalid_aggregators,
            complaints,
        });
    }

    // aggregation: holders that complained about any dealer refuse to
    // aggregate, everyone else reports its weighted share combination
    let weight_big = |j: u64| BigUint::from(weights[&j].value());
    let mut reported: Vec<(u64, BigUint, BigUint)> = Vec::new();
    for &l in &neighbors {
        if script
            .deviations
            .contains(&Deviation::WithholdAggregate { aggregator: l })
        {
            ledger.record_withheld();
            continue;
        }
        if complaints.iter().any(|&(holder, _)| holder == l) {
            // the holder told i about the bad share instead of aggregating
            ledger.record(l, i, round, Payload::Relay(16));
            continue;
        }
        let mut s_li = BigUint::ZERO;
        let mut t_li = BigUint::ZERO;
        for &j in &neighbors {
            let share = dealings[&j].share_for(point_of(l)).unwrap();
            s_li = group.q_add(&s_li, &group.q_mul(&weight_big(j), &share.s_share));
            t_li = group.q_add(&t_li, &group.q_mul(&weight_big(j), &share.t_share));
        }
        if script
            .deviations
            .contains(&Deviation::TamperAggregateS { aggregator: l })
        {
            s_li = group.q_add(&s_li, &BigUint::one());
        }
        if script
            .deviations
            .contains(&Deviation::TamperAggregateT { aggregator: l })
        {
            t_li = group.q_add(&t_li, &BigUint::one());
        }
        ledger.record(
            l,
            i,
            round,
            Payload::AggregatePair(
                s_li.to_u64_digits().first().copied().unwrap_or(0),
                t_li.to_u64_digits().first().copied().unwrap_or(0),
            ),
        );
        reported.push((l, s_li, t_li));
    }

    // node i verifies every reported pair against the combined commitments
    let vectors: Vec<&CommitmentVector> = neighbors.iter().map(|j| &agreed[j]).collect();
    let coefficients: Vec<BigUint> = neighbors.iter().map(|&j| weight_big(j)).collect();
    let combined = combine_commitments(group, &vectors, &coefficients)?;
    let mut valid: Vec<(u64, BigUint, BigUint)> = Vec::new();
    for (l, s_li, t_li) in reported {
        if vss_verify(group, point_of(l), (&s_li, &t_li), &combined) {
            valid.push((l, s_li, t_li));
        } else {
            invalid_aggregators.insert(l);
        }
    }

    if valid.len() < vicinity.d {
        return Ok(MaliciousRoundResult {
            outcome: SchemeOutcome::abort(format!(
                "only {} of the required {} aggregates verified",
                valid.len(),
                vicinity.d
            )),
            certificate: None,
            invalid_dealers,
            invalid_aggregators,
            complaints,
        });
    }

    // interpolate the weighted sum and its blinding combination
    let chosen = &valid[..vicinity.d];
    let points: Vec<u64> = chosen.iter().map(|(l, _, _)| point_of(*l)).collect();
    let s_values: Vec<BigUint> = chosen.iter().map(|(_, s, _)| s.clone()).collect();
    let t_values: Vec<BigUint> = chosen.iter().map(|(_, _, t)| t.clone()).collect();
    let m_prime = group.q_interpolate_at_zero(&points, &s_values)?;
    let t_prime = group.q_interpolate_at_zero(&points, &t_values)?;
    let m_prime_u64 = m_prime.to_u64_digits().first().copied().unwrap_or(0);
    let t_prime_u64 = t_prime.to_u64_digits().first().copied().unwrap_or(0);

    let certificate = Bs6Certificate {
        e0: combined.entry(0).clone(),
        m_prime: m_prime_u64,
        t_prime: t_prime_u64,
    };
    Ok(MaliciousRoundResult {
        outcome: SchemeOutcome::field(FieldElement::new(m_prime_u64, q64), true),
        certificate: Some(certificate),
        invalid_dealers,
        invalid_aggregators,
        complaints,
    })
}

/// Affine forwarding rule for the chaining check: the value node i must
/// send next is `alpha + beta * m'` (mod q), blinded by `beta * t'`.
#[derive(Debug, Clone)]
pub struct ForwardRule {
    pub alpha: BigUint,
    pub beta: BigUint,
}

impl ForwardRule {
    pub fn identity() -> Self {
        ForwardRule {
            alpha: BigUint::ZERO,
            beta: BigUint::one(),
        }
    }

    pub fn apply(&self, group: &GroupParams, cert: &Bs6Certificate) -> (BigUint, BigUint) {
        let m = group.q_add(
            &self.alpha,
            &group.q_mul(&self.beta, &BigUint::from(cert.m_prime)),
        );
        let t = group.q_mul(&self.beta, &BigUint::from(cert.t_prime));
        (m, t)
    }
}

/// What node i's neighbors expect as the free-coefficient commitment of its
/// next dealing: g^alpha * (E_0)^beta, computable from public data alone.
pub fn bs6_expected_commitment(
    group: &GroupParams,
    prev_e0: &Commitment,
    rule: &ForwardRule,
) -> Commitment {
    let g_alpha = Commitment::from_value(group.g().modpow(&rule.alpha, group.p()));
    g_alpha.mul(&prev_e0.pow(&rule.beta, group), group)
}
