//! Weighted-sum protection schemes.
//!
//! Everything a protocol round does reduces to one primitive: node `i`
//! collects `sum over j in N_i of a_ji * m_ji` from its neighbors. The five
//! schemes here compute that sum with different privacy and robustness
//! guarantees:
//!
//! * `plain_round` — no protection, the baseline.
//! * `perturb_round` — zero-mean random noise added to each message.
//! * `sss_round` — semi-honest Shamir secret sharing (three share modes).
//! * `homomorphic_round` — additively homomorphic encryption with threshold
//!   decryption by the vicinity.
//! * `malicious_sss_round` — Pedersen-committed sharing with share
//!   verification and Byzantine-agreed commitments; tolerates actively
//!   cheating neighbors.
//!
//! Each round function simulates the vicinity-local message flow and records
//! every message in a [`MessageLedger`], so callers can audit exact traffic
//! and privacy tests can replay coalition views.

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::topio::Topology;
use num_bigint::BigUint;
use rand::Rng;
use std::collections::BTreeMap;

pub mod malicious;
pub mod semi_honest;

pub use malicious::{
    bs6_expected_commitment, malicious_sss_round, Bs6Certificate, Deviation, ForwardRule,
    MaliciousRoundResult, MaliciousScript, MaliciousVicinity,
};
pub use semi_honest::{
    homomorphic_keygen, homomorphic_round, privacy_exhaustion_f17, sss_round,
    HomomorphicVicinity, SssMode,
};

/// Per-node sharing threshold policy plus the Byzantine fault bound.
/// `d_i - 1` is the largest neighbor coalition that learns nothing.
#[derive(Debug, Clone)]
pub struct VicinityPolicy {
    pub uniform_d: usize,
    pub overrides: BTreeMap<u64, usize>,
    /// Fault bound for the verified scheme; must stay below every d_i.
    pub f: usize,
}

impl VicinityPolicy {
    pub fn uniform(d: usize, f: usize) -> Result<Self> {
        let policy = VicinityPolicy {
            uniform_d: d,
            overrides: BTreeMap::new(),
            f,
        };
        policy.check()?;
        Ok(policy)
    }

    fn check(&self) -> Result<()> {
        for &d in std::iter::once(&self.uniform_d).chain(self.overrides.values()) {
            if d < 1 {
                return Err(Error::Config("threshold d must be at least 1".into()));
            }
            if self.f >= d {
                return Err(Error::Config(format!(
                    "fault bound {} must stay below threshold {d}",
                    self.f
                )));
            }
        }
        Ok(())
    }

    pub fn with_override(mut self, node: u64, d: usize) -> Result<Self> {
        self.overrides.insert(node, d);
        self.check()?;
        Ok(self)
    }

    pub fn d_for(&self, node: u64) -> usize {
        self.overrides.get(&node).copied().unwrap_or(self.uniform_d)
    }

    /// A threshold is only usable when the vicinity is big enough.
    pub fn validate_for(&self, topology: &Topology) -> Result<()> {
        for node in 0..topology.node_count() as u64 {
            let d = self.d_for(node);
            let degree = topology.degree(node as usize);
            if degree > 0 && d > degree {
                return Err(Error::Config(format!(
                    "node {node}: threshold {d} exceeds vicinity size {degree}"
                )));
            }
        }
        Ok(())
    }
}

/// Field coefficients a_ji for one collecting node, keyed by sender.
pub type WeightVector = BTreeMap<u64, FieldElement>;

/// Real-valued coefficients for the plain and perturbation schemes.
pub type RealWeights = BTreeMap<u64, f64>;

/// What a single message carries; the variant must match the scheme phase.
#[derive(Debug, Clone)]
pub enum Payload {
    Raw(f64),
    Noisy(f64),
    Share(FieldElement),
    /// Aggregated share pair (S_li, T_li) of the verified scheme.
    AggregatePair(u64, u64),
    Aggregate(FieldElement),
    Ciphertext(BigUint),
    PartialDecryption(BigUint),
    CommitmentVector(Vec<BigUint>),
    /// Bundled public key plus key share, sized in bytes.
    KeyMaterial(usize),
    /// Byzantine-agreement relay traffic, pre-counted in bytes.
    Relay(usize),
}

impl Payload {
    pub fn byte_len(&self) -> usize {
        match self {
            Payload::Raw(_) | Payload::Noisy(_) | Payload::Share(_) => 8,
            Payload::AggregatePair(_, _) => 16,
            Payload::Aggregate(_) => 8,
            Payload::Ciphertext(c) | Payload::PartialDecryption(c) => c.to_bytes_be().len(),
            Payload::CommitmentVector(v) => v.iter().map(|c| c.to_bytes_be().len()).sum(),
            Payload::KeyMaterial(bytes) | Payload::Relay(bytes) => *bytes,
        }
    }
}

/// One delivered message of a protocol round.
#[derive(Debug, Clone)]
pub struct RoundMessage {
    pub sender: u64,
    pub receiver: u64,
    pub round: usize,
    pub payload: Payload,
    pub bytes: usize,
}

/// Exact record of everything sent; every round function appends here.
#[derive(Debug, Clone, Default)]
pub struct MessageLedger {
    pub messages: Vec<RoundMessage>,
    pub withheld: usize,
    /// Byzantine-agreement relay traffic, counted per message but not
    /// individually logged.
    pub relay_messages: usize,
}

impl MessageLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, sender: u64, receiver: u64, round: usize, payload: Payload) {
        let bytes = payload.byte_len();
        self.messages.push(RoundMessage {
            sender,
            receiver,
            round,
            payload,
            bytes,
        });
    }

    pub fn record_withheld(&mut self) {
        self.withheld += 1;
    }

    pub fn record_relays(&mut self, n: usize) {
        self.relay_messages += n;
    }

    pub fn count(&self) -> usize {
        self.messages.len()
    }

    pub fn bytes(&self) -> usize {
        self.messages.iter().map(|m| m.bytes).sum()
    }

    /// Every payload a coalition of receivers observed, for privacy audits.
    pub fn view_of(&self, coalition: &[u64]) -> Vec<&RoundMessage> {
        self.messages
            .iter()
            .filter(|m| coalition.contains(&m.receiver))
            .collect()
    }
}

/// The computed weighted sum plus how much to trust it.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    pub value: OutcomeValue,
    /// Only the verified scheme sets this; semi-honest outcomes are trusted
    /// by assumption.
    pub verified: bool,
    pub abort_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutcomeValue {
    Real(f64),
    Field(FieldElement),
    /// An abort produced no value.
    None,
}

impl SchemeOutcome {
    pub fn field(value: FieldElement, verified: bool) -> Self {
        SchemeOutcome {
            value: OutcomeValue::Field(value),
            verified,
            abort_reason: None,
        }
    }

    pub fn real(value: f64) -> Self {
        SchemeOutcome {
            value: OutcomeValue::Real(value),
            verified: false,
            abort_reason: None,
        }
    }

    pub fn abort(reason: impl Into<String>) -> Self {
        SchemeOutcome {
            value: OutcomeValue::None,
            verified: false,
            abort_reason: Some(reason.into()),
        }
    }

    pub fn field_value(&self) -> Result<FieldElement> {
        match &self.value {
            OutcomeValue::Field(v) => Ok(*v),
            _ => Err(Error::Round(
                self.abort_reason
                    .clone()
                    .unwrap_or_else(|| "no field value".into()),
            )),
        }
    }
}

/// Unprotected baseline: each neighbor sends its raw message.
pub fn plain_round(
    i: u64,
    round: usize,
    messages: &BTreeMap<u64, f64>,
    weights: &RealWeights,
    ledger: &mut MessageLedger,
) -> Result<SchemeOutcome> {
    let mut sum = 0.0;
    for (&j, &a) in weights {
        let m = *messages
            .get(&j)
            .ok_or_else(|| Error::Round(format!("missing message from node {j}")))?;
        ledger.record(j, i, round, Payload::Raw(m));
        sum += a * m;
    }
    Ok(SchemeOutcome::real(sum))
}

/// Noise distribution for the perturbation scheme: uniform on [-sigma, sigma],
/// which has zero mean so the perturbed sums converge to the true sums.
#[derive(Debug, Clone, Copy)]
pub struct NoiseParams {
    pub sigma: f64,
}

/// Each neighbor adds fresh zero-mean noise before sending. The result is
/// only statistically close to the true sum; variance is
/// `sum a_ji^2 * Var(noise)`.
pub fn perturb_round<R: Rng>(
    i: u64,
    round: usize,
    messages: &BTreeMap<u64, f64>,
    weights: &RealWeights,
    noise: NoiseParams,
    rng: &mut R,
    ledger: &mut MessageLedger,
) -> Result<SchemeOutcome> {
    if noise.sigma < 0.0 {
        return Err(Error::Argument("noise width must be non-negative".into()));
    }
    let mut sum = 0.0;
    for (&j, &a) in weights {
        let m = *messages
            .get(&j)
            .ok_or_else(|| Error::Round(format!("missing message from node {j}")))?;
        let r = if noise.sigma == 0.0 {
            0.0
        } else {
            rng.gen_range(-noise.sigma..=noise.sigma)
        };
        ledger.record(j, i, round, Payload::Noisy(m + r));
        sum += a * (m + r);
    }
    Ok(SchemeOutcome::real(sum))
}

/// Closed-form message count of one secret-sharing round when every node in
/// `collectors` gathers its weighted sum: each sender fans a share to the
/// whole vicinity (|N_i|^2) and each aggregator reports once (|N_i|).
pub fn sss_message_count(topology: &Topology, collectors: &[u64]) -> usize {
    collectors
        .iter()
        .map(|&i| {
            let deg = topology.degree(i as usize);
            deg * deg + deg
        })
        .sum()
}

/// Closed-form message count of one homomorphic round: per collector,
/// |N_i| ciphertexts in, |N_i| aggregate broadcasts out, |N_i| partial
/// decryptions back.
pub fn homomorphic_message_count(topology: &Topology, collectors: &[u64]) -> usize {
    collectors
        .iter()
        .map(|&i| 3 * topology.degree(i as usize))
        .sum()
}

/// Key dissemination volume: one bundled (public key + key share) message
/// per directed edge, i.e. 2e in total.
pub fn keygen_message_count(topology: &Topology) -> usize {
    2 * topology.edge_count()
}
