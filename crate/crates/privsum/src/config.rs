//! Run configuration: a key = value text format plus programmatic
//! overrides, resolved into everything a simulator run needs.
//!
//! Recognized keys (all optional, with defaults):
//!
//! ```text
//! scheme       = plain | perturb | sss | sss-broadcast | sss-additive |
//!                homomorphic | malicious
//! d            = sharing threshold (default 2)
//! f            = Byzantine fault bound (default 0)
//! noise_sigma  = perturbation noise half-width (default 0.1)
//! key_bits     = Paillier modulus size (default 1024)
//! rounds       = Jacobi iterations (default 8)
//! seed         = master seed (default 1)
//! scale        = fixed-point scale c (default 1000000)
//! topology     = er:<n>:<p> | pa:<n>:<k> | bipartite:<m>:<n>:<density> |
//!                file:<path> (default er:100:0.1)
//! system       = path to a sparse-system file (default: synthesized
//!                diagonally dominant system on the topology)
//! eps          = augmented-system regularization (default 1e-6)
//! ```

use crate::error::{Error, Result};
use crate::field::{FieldParams, FixedPointCodec, DEFAULT_SCALE};
use crate::numerics::SparseSystem;
use crate::pedersen::GroupParams;
use crate::schemes::{SssMode, VicinityPolicy};
use crate::simulator::{SchemeKind, SimConfig};
use crate::topio::{self, GraphModel, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    pub d: usize,
    pub f: usize,
    pub noise_sigma: f64,
    pub key_bits: u64,
    pub rounds: usize,
    pub seed: u64,
    pub scale: u64,
    pub topology: String,
    pub system_path: Option<String>,
    pub eps: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scheme: SchemeKind::Plain,
            d: 2,
            f: 0,
            noise_sigma: 0.1,
            key_bits: 1024,
            rounds: 8,
            seed: 1,
            scale: DEFAULT_SCALE,
            topology: "er:100:0.1".into(),
            system_path: None,
            eps: 1e-6,
        }
    }
}

pub fn parse_scheme(name: &str) -> Result<SchemeKind> {
    match name {
        "plain" => Ok(SchemeKind::Plain),
        "perturb" => Ok(SchemeKind::Perturb),
        "sss" => Ok(SchemeKind::Sss(SssMode::PerMessage)),
        "sss-broadcast" => Ok(SchemeKind::Sss(SssMode::SingleBroadcast)),
        "sss-additive" => Ok(SchemeKind::Sss(SssMode::Additive)),
        "homomorphic" => Ok(SchemeKind::Homomorphic),
        "malicious" => Ok(SchemeKind::Malicious),
        other => Err(Error::Config(format!("unknown scheme {other}"))),
    }
}

impl RunConfig {
    /// Parse a key = value config file; '#' starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: no + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            config
                .set(key.trim(), value.trim())
                .map_err(|e| Error::Parse {
                    line: no + 1,
                    msg: e.to_string(),
                })?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Apply one override; keys match the config-file grammar.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
        }
        match key {
            "scheme" => self.scheme = parse_scheme(value)?,
            "d" => self.d = num(key, value)?,
            "f" => self.f = num(key, value)?,
            "noise_sigma" => self.noise_sigma = num(key, value)?,
            "key_bits" => self.key_bits = num(key, value)?,
            "rounds" => self.rounds = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "scale" => self.scale = num(key, value)?,
            "topology" => self.topology = value.to_string(),
            "system" => self.system_path = Some(value.to_string()),
            "eps" => self.eps = num(key, value)?,
            other => return Err(Error::Config(format!("unknown config key {other}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::Config("rounds must be positive".into()));
        }
        if self.d == 0 {
            return Err(Error::Config("threshold d must be positive".into()));
        }
        if self.f >= self.d {
            return Err(Error::Config(format!(
                "fault bound {} must stay below threshold {}",
                self.f, self.d
            )));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::Config("noise_sigma must be non-negative".into()));
        }
        if self.eps <= 0.0 {
            return Err(Error::Config("eps must be positive".into()));
        }
        Ok(())
    }

    /// Resolve into the simulator's configuration.
    pub fn to_sim_config(&self) -> Result<SimConfig> {
        let field = FieldParams::mersenne61();
        let codec = FixedPointCodec::new(self.scale, field.modulus())?;
        let policy = VicinityPolicy::uniform(self.d, self.f)?;
        let group = match self.scheme {
            SchemeKind::Malicious => Some(GroupParams::mersenne61_profile()),
            _ => None,
        };
        Ok(SimConfig {
            scheme: self.scheme,
            field,
            codec,
            policy,
            noise_sigma: self.noise_sigma,
            key_bits: self.key_bits,
            rounds: self.rounds,
            seed: self.seed,
            group,
        })
    }
}

/// Parse a topology spec: a generator shorthand or `file:<path>`.
pub fn resolve_topology(spec: &str, seed: u64) -> Result<Topology> {
    let parts: Vec<&str> = spec.split(':').collect();
    fn num<T: std::str::FromStr>(spec: &str, value: &str) -> Result<T> {
        value
            .parse()
            .map_err(|_| Error::Config(format!("bad number {value:?} in topology spec {spec:?}")))
    }
    match parts.as_slice() {
        ["er", n, p] => topio::generate(
            &GraphModel::ErdosRenyi {
                n: num(spec, n)?,
                p: num(spec, p)?,
            },
            seed,
        ),
        ["pa", n, k] => topio::generate(
            &GraphModel::PreferentialAttachment {
                n: num(spec, n)?,
                k: num(spec, k)?,
            },
            seed,
        ),
        ["bipartite", m, n, density] => topio::generate(
            &GraphModel::Bipartite {
                m: num(spec, m)?,
                n: num(spec, n)?,
                density: num(spec, density)?,
            },
            seed,
        ),
        ["file", path] => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read topology {path}: {e}")))?;
            topio::parse_edge_list(&text)
        }
        _ => Err(Error::Config(format!("unrecognized topology spec {spec:?}"))),
    }
}

/// Deterministically synthesize a diagonally dominant system whose sparsity
/// pattern is the topology, so Jacobi converges and every matrix entry has a
/// carrying edge.
pub fn synthesize_system(topology: &Topology, seed: u64) -> Result<SparseSystem> {
    let n = topology.node_count();
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xA5A5_5A5A_DEAD_BEEF);
    let mut triples = Vec::new();
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let mut off_sum = 0.0;
        for &j in topology.neighbors(i) {
            let v: f64 = rng.gen_range(-1.0..1.0);
            off_sum += v.abs();
            triples.push((i, j, v));
        }
        triples.push((i, i, off_sum + rng.gen_range(1.0..3.0)));
        b.push(rng.gen_range(-5.0..5.0));
    }
    SparseSystem::from_triples(n, &triples, b)
}
