//! Deterministic synchronous round engine.
//!
//! Hosts per-node states over a topology, runs one weighted-sum collection
//! per node per round under the configured protection scheme, applies the
//! update rule of the workload (a preconditioned Jacobi step), and records
//! exact message metrics. Everything is derived from (topology, config,
//! seed): per-node randomness comes from generators seeded off the master
//! seed, so repeated runs are bit-identical except for wall-clock timings.

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams, FixedPointCodec};
use crate::numerics::SparseSystem;
use crate::pedersen::GroupParams;
use crate::schemes::{
    self, homomorphic_round, malicious_sss_round, perturb_round, plain_round, sss_round,
    HomomorphicVicinity, MaliciousScript, MaliciousVicinity, MessageLedger, NoiseParams,
    OutcomeValue, SssMode, VicinityPolicy, WeightVector,
};
use crate::topio::Topology;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::time::Instant;

/// Which protection layer carries the weighted sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Plain,
    Perturb,
    Sss(SssMode),
    Homomorphic,
    Malicious,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Plain => "plain",
            SchemeKind::Perturb => "perturb",
            SchemeKind::Sss(SssMode::PerMessage) => "sss",
            SchemeKind::Sss(SssMode::SingleBroadcast) => "sss-broadcast",
            SchemeKind::Sss(SssMode::Additive) => "sss-additive",
            SchemeKind::Homomorphic => "homomorphic",
            SchemeKind::Malicious => "malicious",
        }
    }

    /// Communication rounds one collection costs; sharing doubles the
    /// plain scheme's single round, the homomorphic exchange triples it.
    pub fn comm_rounds_per_iteration(&self) -> usize {
        match self {
            SchemeKind::Plain | SchemeKind::Perturb => 1,
            SchemeKind::Sss(_) => 2,
            SchemeKind::Homomorphic => 3,
            SchemeKind::Malicious => 3,
        }
    }
}

/// Full run configuration; validated before anything starts.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub scheme: SchemeKind,
    pub field: FieldParams,
    pub codec: FixedPointCodec,
    pub policy: VicinityPolicy,
    pub noise_sigma: f64,
    pub key_bits: u64,
    pub rounds: usize,
    pub seed: u64,
    /// Commitment group for the malicious scheme; its order must equal the
    /// field modulus.
    pub group: Option<GroupParams>,
}

impl SimConfig {
    /// Stable digest of every run-relevant knob, cited in emitted CSV so
    /// results stay attributable to their exact configuration.
    pub fn digest(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.scheme.name().hash(&mut h);
        self.field.modulus().hash(&mut h);
        self.codec.scale().hash(&mut h);
        self.policy.uniform_d.hash(&mut h);
        for (k, v) in &self.policy.overrides {
            k.hash(&mut h);
            v.hash(&mut h);
        }
        self.policy.f.hash(&mut h);
        self.noise_sigma.to_bits().hash(&mut h);
        self.key_bits.hash(&mut h);
        self.rounds.hash(&mut h);
        self.seed.hash(&mut h);
        h.finish()
    }
}

/// Scripted misbehavior for a run. Semi-honest corrupted nodes follow the
/// protocol and only pool observations; deviations apply to the malicious
/// scheme only.
#[derive(Debug, Clone, Default)]
pub struct AdversaryScript {
    pub corrupted: BTreeSet<u64>,
    pub deviations: Vec<schemes::Deviation>,
}

/// State one node carries between rounds.
#[derive(Debug, Clone)]
pub struct NodeState {
    pub id: u64,
    pub estimate: f64,
    pub neighbors: Vec<u64>,
    pub aborted: bool,
}

/// Per-round accounting.
#[derive(Debug, Clone)]
pub struct RoundMetrics {
    pub round: usize,
    pub messages: usize,
    pub relay_messages: usize,
    pub bytes: usize,
    pub millis: f64,
    pub aborts: usize,
    pub detections: usize,
}

/// Whole-run accounting.
#[derive(Debug, Clone, Default)]
pub struct RunMetrics {
    pub per_round: Vec<RoundMetrics>,
    pub keygen_messages: usize,
    pub withheld: usize,
    pub comm_rounds: usize,
}

impl RunMetrics {
    pub fn total_messages(&self) -> usize {
        self.per_round.iter().map(|r| r.messages).sum()
    }

    pub fn total_bytes(&self) -> usize {
        self.per_round.iter().map(|r| r.bytes).sum()
    }

    pub fn total_aborts(&self) -> usize {
        self.per_round.iter().map(|r| r.aborts).sum()
    }

    /// Everything except wall-clock timings, which are the one
    /// non-reproducible quantity. Two runs with equal fingerprints carried
    /// identical traffic.
    pub fn fingerprint(&self) -> String {
        let mut out = format!(
            "keygen={} withheld={} comm_rounds={}",
            self.keygen_messages, self.withheld, self.comm_rounds
        );
        for r in &self.per_round {
            out.push_str(&format!(
                ";r{}:m{} rel{} b{} a{} d{}",
                r.round, r.messages, r.relay_messages, r.bytes, r.aborts, r.detections
            ));
        }
        out
    }

    /// CSV rows: round, scheme, messages, bytes, millis, aborts.
    pub fn to_csv(&self, scheme: &str, config_digest: u64, seed: u64) -> String {
        let mut out = format!("# config {config_digest:016x} seed {seed}\n");
        out.push_str("round,scheme,messages,bytes,millis,aborts\n");
        for r in &self.per_round {
            out.push_str(&format!(
                "{},{},{},{},{:.3},{}\n",
                r.round, scheme, r.messages, r.bytes, r.millis, r.aborts
            ));
        }
        out
    }
}

/// Everything a finished run exposes.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub metrics: RunMetrics,
    pub estimates: Vec<f64>,
    pub ledger: MessageLedger,
    pub config_digest: u64,
}

impl RunResult {
    /// The exact payload log a coalition observed; the raw material of the
    /// privacy analyses.
    pub fn transcript_view(&self, coalition: &[u64]) -> Vec<&schemes::RoundMessage> {
        self.ledger.view_of(coalition)
    }
}

fn node_rng(master: u64, node: u64) -> ChaCha12Rng {
    // distinct, deterministic stream per node
    ChaCha12Rng::seed_from_u64(master ^ (node.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Run the workload system under the configured scheme for the configured
/// number of Jacobi rounds. The system must have the topology's sparsity
/// pattern; it is preconditioned internally so every update is exactly one
/// weighted-sum collection.
pub fn run(
    topology: &Topology,
    config: &SimConfig,
    system: &SparseSystem,
    adversary: &AdversaryScript,
) -> Result<RunResult> {
    let n = topology.node_count();
    if system.dimension() != n {
        return Err(Error::Config(format!(
            "system dimension {} does not match topology size {n}",
            system.dimension()
        )));
    }
    for i in 0..n {
        for &(j, _) in system.off_diagonal(i) {
            if !topology.neighbors(i).contains(&j) {
                return Err(Error::Config(format!(
                    "matrix entry ({i}, {j}) has no topology edge"
                )));
            }
        }
    }
    config.policy.validate_for(topology)?;
    if config.scheme == SchemeKind::Malicious {
        let group = config
            .group
            .as_ref()
            .ok_or_else(|| Error::Config("malicious scheme needs a commitment group".into()))?;
        let q = group.q().to_u64_digits();
        if q.len() != 1 || q[0] != config.field.modulus() {
            return Err(Error::Config(
                "commitment group order must equal the field modulus".into(),
            ));
        }
    }
    if config.scheme == SchemeKind::Homomorphic {
        // exact field reduction needs N larger than any integer weighted sum
        let max_deg = (0..n).map(|i| topology.degree(i)).max().unwrap_or(0) as u32;
        let p = config.field.modulus() as f64;
        let bound_bits = (max_deg as f64).log2() + 2.0 * p.log2();
        if (config.key_bits as f64) <= bound_bits + 1.0 {
            return Err(Error::Config(format!(
                "key size {} bits cannot hold weighted sums of this field",
                config.key_bits
            )));
        }
    }

    let system = system.precondition();
    let mut ledger = MessageLedger::new();
    let mut metrics = RunMetrics::default();

    // per-node weight maps: the scheme collects sum_j a_ij x_j
    let mut real_weights: Vec<BTreeMap<u64, f64>> = Vec::with_capacity(n);
    let mut field_weights: Vec<WeightVector> = Vec::with_capacity(n);
    for i in 0..n {
        let mut rw = BTreeMap::new();
        let mut fw = WeightVector::new();
        for &(j, a) in system.off_diagonal(i) {
            rw.insert(j as u64, a);
            fw.insert(j as u64, config.codec.encode(a)?);
        }
        // neighbors with a zero coefficient still participate
        for &j in topology.neighbors(i) {
            rw.entry(j as u64).or_insert(0.0);
            fw.entry(j as u64)
                .or_insert_with(|| FieldElement::zero(config.field.modulus()));
        }
        real_weights.push(rw);
        field_weights.push(fw);
    }

    // key setup for the homomorphic scheme, one vicinity key per collector
    let mut vicinity_keys: BTreeMap<u64, HomomorphicVicinity> = BTreeMap::new();
    if config.scheme == SchemeKind::Homomorphic {
        for i in 0..n {
            if topology.degree(i) == 0 {
                continue;
            }
            let neighbors: Vec<u64> = topology.neighbors(i).iter().map(|&j| j as u64).collect();
            let d = config.policy.d_for(i as u64).min(neighbors.len());
            let mut rng = node_rng(config.seed, i as u64);
            let vic = schemes::semi_honest::homomorphic_keygen(
                i as u64,
                &neighbors,
                d,
                config.key_bits,
                &mut rng,
                &mut ledger,
            )?;
            vicinity_keys.insert(i as u64, vic);
        }
        metrics.keygen_messages = ledger.count();
    }
    let malicious_vicinity = if config.scheme == SchemeKind::Malicious {
        Some(MaliciousVicinity::new(
            config.group.clone().unwrap(),
            config.policy.uniform_d,
            config.policy.f,
        )?)
    } else {
        None
    };

    let mut states: Vec<NodeState> = (0..n)
        .map(|i| NodeState {
            id: i as u64,
            estimate: 0.0,
            neighbors: topology.neighbors(i).iter().map(|&j| j as u64).collect(),
            aborted: false,
        })
        .collect();

    let mut consumed = ledger.count();
    let mut consumed_relay = ledger.relay_messages;
    for round in 1..=config.rounds {
        let started = Instant::now();
        let previous: Vec<f64> = states.iter().map(|s| s.estimate).collect();
        let mut aborts = 0usize;
        let mut detections = 0usize;
        for i in 0..n {
            if states[i].neighbors.is_empty() {
                states[i].estimate = system.rhs()[i];
                continue;
            }
            let mut rng = node_rng(
                config.seed ^ (round as u64).wrapping_mul(0xD134_2543_DE82_EF95),
                i as u64,
            );
            let weighted_sum: Option<f64> = match config.scheme {
                SchemeKind::Plain | SchemeKind::Perturb => {
                    let msgs: BTreeMap<u64, f64> = states[i]
                        .neighbors
                        .iter()
                        .map(|&j| (j, previous[j as usize]))
                        .collect();
                    let out = if config.scheme == SchemeKind::Plain {
                        plain_round(i as u64, round, &msgs, &real_weights[i], &mut ledger)?
                    } else {
                        perturb_round(
                            i as u64,
                            round,
                            &msgs,
                            &real_weights[i],
                            NoiseParams {
                                sigma: config.noise_sigma,
                            },
                            &mut rng,
                            &mut ledger,
                        )?
                    };
                    match out.value {
                        OutcomeValue::Real(v) => Some(v),
                        _ => None,
                    }
                }
                SchemeKind::Sss(mode) => {
                    let secrets = encode_neighbors(&states[i].neighbors, &previous, &config.codec)?;
                    let d = config
                        .policy
                        .d_for(i as u64)
                        .min(states[i].neighbors.len());
                    let out = sss_round(
                        i as u64,
                        round,
                        &secrets,
                        &field_weights[i],
                        d,
                        mode,
                        &BTreeSet::new(),
                        &mut rng,
                        &mut ledger,
                    )?;
                    decode_outcome(&out, &config.codec)?
                }
                SchemeKind::Homomorphic => {
                    let secrets = encode_neighbors(&states[i].neighbors, &previous, &config.codec)?;
                    let out = homomorphic_round(
                        i as u64,
                        round,
                        &secrets,
                        &field_weights[i],
                        &vicinity_keys[&(i as u64)],
                        &BTreeSet::new(),
                        &mut rng,
                        &mut ledger,
                    )?;
                    decode_outcome(&out, &config.codec)?
                }
                SchemeKind::Malicious => {
                    let secrets = encode_neighbors(&states[i].neighbors, &previous, &config.codec)?;
                    let script = MaliciousScript {
                        deviations: adversary
                            .deviations
                            .iter()
                            .filter(|dev| deviation_in_vicinity(dev, &states[i].neighbors))
                            .cloned()
                            .collect(),
                    };
                    let res = malicious_sss_round(
                        i as u64,
                        round,
                        &secrets,
                        &field_weights[i],
                        malicious_vicinity.as_ref().unwrap(),
                        &script,
                        &mut rng,
                        &mut ledger,
                    )?;
                    detections += res.invalid_dealers.len()
                        + res.invalid_aggregators.len()
                        + res.complaints.len();
                    decode_outcome(&res.outcome, &config.codec)?
                }
            };
            match weighted_sum {
                Some(s) => {
                    // preconditioned Jacobi update: x_i = b_i - sum
                    states[i].estimate = system.rhs()[i] - s;
                    states[i].aborted = false;
                }
                None => {
                    aborts += 1;
                    states[i].aborted = true;
                    // the abort is recorded; the node keeps its estimate
                }
            }
        }
        let messages = ledger.count() - consumed;
        let relay = ledger.relay_messages - consumed_relay;
        let bytes: usize = ledger.messages[consumed..].iter().map(|m| m.bytes).sum();
        consumed = ledger.count();
        consumed_relay = ledger.relay_messages;
        metrics.per_round.push(RoundMetrics {
            round,
            messages,
            relay_messages: relay,
            bytes,
            millis: started.elapsed().as_secs_f64() * 1000.0,
            aborts,
            detections,
        });
    }
    metrics.withheld = ledger.withheld;
    metrics.comm_rounds = config.rounds * config.scheme.comm_rounds_per_iteration();
    Ok(RunResult {
        metrics,
        estimates: states.iter().map(|s| s.estimate).collect(),
        ledger,
        config_digest: config.digest(),
    })
}

fn encode_neighbors(
    neighbors: &[u64],
    previous: &[f64],
    codec: &FixedPointCodec,
) -> Result<BTreeMap<u64, FieldElement>> {
    neighbors
        .iter()
        .map(|&j| Ok((j, codec.encode(previous[j as usize])?)))
        .collect()
}

/// Field outcomes carry the product of two encodings, so the decode divides
/// by the squared scale.
fn decode_outcome(out: &schemes::SchemeOutcome, codec: &FixedPointCodec) -> Result<Option<f64>> {
    match &out.value {
        OutcomeValue::Field(v) => {
            let scale = codec.scale() as f64;
            Ok(Some(v.signed() as f64 / (scale * scale)))
        }
        OutcomeValue::Real(v) => Ok(Some(*v)),
        OutcomeValue::None => Ok(None),
    }
}

fn deviation_in_vicinity(dev: &schemes::Deviation, neighbors: &[u64]) -> bool {
    let involved = |id: &u64| neighbors.contains(id);
    match dev {
        schemes::Deviation::TamperShare { dealer, holder } => involved(dealer) && involved(holder),
        schemes::Deviation::EquivocateCommitments { dealer }
        | schemes::Deviation::WithholdShares { dealer } => involved(dealer),
        schemes::Deviation::TamperAggregateS { aggregator }
        | schemes::Deviation::TamperAggregateT { aggregator }
        | schemes::Deviation::WithholdAggregate { aggregator } => involved(aggregator),
    }
}
