//! Command-line front end: micro-benchmarks, scheme-under-workload runs,
//! topology generation, and verification suites.
//!
//! Exit codes: 0 success, 1 run abort, 2 configuration error,
//! 3 verification failure.

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use privsum::config::{resolve_topology, synthesize_system, RunConfig};
use privsum::field::FieldParams;
use privsum::schemes::{self, Deviation};
use privsum::simulator::{self, AdversaryScript, SchemeKind};
use privsum::{byzagree, paillier, pedersen, shamir};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "privsum",
    about = "Privacy-preserving distributed weighted-sum toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Micro-benchmark the primitive operations and report a CSV of mean
    /// latencies and payload sizes.
    BenchOps {
        /// Paillier modulus size in bits.
        #[arg(long, default_value_t = 2048)]
        key_bits: u64,
        /// Repetitions for the cheap operations.
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        /// Repetitions for key generation.
        #[arg(long, default_value_t = 10)]
        keygen_reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run a scheme under the Jacobi workload and emit metrics and final
    /// estimates.
    Run {
        /// Config file of key = value lines.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides, e.g. --set scheme=sss --set rounds=4.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long)]
        out_metrics: Option<PathBuf>,
        #[arg(long)]
        out_estimates: Option<PathBuf>,
        /// Also run the plain scheme on the same workload and report the
        /// largest estimate difference.
        #[arg(long, default_value_t = false)]
        compare_plain: bool,
        /// Corrupt one vicinity member with a scripted aggregate tamper
        /// (malicious scheme only).
        #[arg(long, default_value_t = false)]
        tamper: bool,
    },
    /// Generate a topology file from a model spec.
    GenTopology {
        /// er:<n>:<p> | pa:<n>:<k> | bipartite:<m>:<n>:<density>
        spec: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite: shamir | privacy-f17 | byzantine | paillier | all.
    Verify { suite: String },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::BenchOps {
            key_bits,
            reps,
            keygen_reps,
            seed,
        } => bench_ops(key_bits, reps, keygen_reps, seed),
        Command::Run {
            config,
            sets,
            out_metrics,
            out_estimates,
            compare_plain,
            tamper,
        } => run_cmd(config, sets, out_metrics, out_estimates, compare_plain, tamper),
        Command::GenTopology { spec, seed, out } => gen_topology(&spec, seed, out),
        Command::Verify { suite } => verify(&suite),
    };
    std::process::exit(code);
}

fn time_us<F: FnMut()>(reps: usize, mut f: F) -> f64 {
    let start = Instant::now();
    for _ in 0..reps {
        f();
    }
    start.elapsed().as_secs_f64() * 1e6 / reps as f64
}

fn bench_ops(key_bits: u64, reps: usize, keygen_reps: usize, seed: u64) -> i32 {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let field = FieldParams::mersenne61();
    println!("# bench key_bits {key_bits} reps {reps} seed {seed}");
    println!("op,mean_us,bytes");

    let mut sink = 0.0f64;
    let noise = time_us(reps, || {
        sink += 1.5 + rng.gen_range(-0.1..0.1);
    });
    println!("noise_add,{noise:.3},8");
    let _ = sink;

    let points: Vec<_> = (1..=8u64).map(|x| field.element(x)).collect();
    let poly = time_us(reps, || {
        let secret = field.random_element(&mut rng);
        let p = shamir::SharingPolynomial::random(secret, 2, &mut rng).unwrap();
        for x in &points {
            std::hint::black_box(p.eval(x).unwrap());
        }
    });
    println!("poly_gen_eval,{poly:.3},8");

    let secret = field.random_element(&mut rng);
    let set = shamir::deal(secret, 8, &points, &mut rng).unwrap();
    let weights = shamir::precompute_lagrange(&points).unwrap();
    let extrapolate = time_us(reps, || {
        std::hint::black_box(shamir::interpolate_at_zero(&set.shares, &weights).unwrap());
    });
    println!("extrapolate,{extrapolate:.3},8");

    let keygen = time_us(keygen_reps, || {
        std::hint::black_box(paillier::keygen(key_bits, &mut rng));
    });
    let (pk, sk) = paillier::keygen(key_bits, &mut rng);
    println!("paillier_keygen,{keygen:.3},{}", key_bits / 8);

    let enc_reps = (reps / 100).max(10);
    let m = BigUint::from(123_456u64);
    let encrypt = time_us(enc_reps, || {
        std::hint::black_box(paillier::encrypt(&pk, &m, &mut rng).unwrap());
    });
    println!("paillier_encrypt,{encrypt:.3},{}", pk.ciphertext_bytes());

    let c = paillier::encrypt(&pk, &m, &mut rng).unwrap();
    let decrypt = time_us(enc_reps, || {
        std::hint::black_box(paillier::decrypt(&sk, &pk, &c).unwrap());
    });
    println!("paillier_decrypt,{decrypt:.3},{}", pk.ciphertext_bytes());

    let c2 = paillier::encrypt(&pk, &m, &mut rng).unwrap();
    let multiply = time_us(reps, || {
        std::hint::black_box(paillier::hom_add(&pk, &c, &c2).unwrap());
    });
    println!("paillier_multiply,{multiply:.3},{}", pk.ciphertext_bytes());
    0
}

fn run_cmd(
    config_path: Option<PathBuf>,
    sets: Vec<String>,
    out_metrics: Option<PathBuf>,
    out_estimates: Option<PathBuf>,
    compare_plain: bool,
    tamper: bool,
) -> i32 {
    let mut config = match config_path {
        Some(path) => match std::fs::read_to_string(&path) {
            Ok(text) => match RunConfig::from_text(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return 2;
                }
            },
            Err(e) => {
                eprintln!("config error: cannot read {}: {e}", path.display());
                return 2;
            }
        },
        None => RunConfig::default(),
    };
    for s in &sets {
        let Some((k, v)) = s.split_once('=') else {
            eprintln!("config error: override {s:?} is not KEY=VALUE");
            return 2;
        };
        if let Err(e) = config.set(k.trim(), v.trim()) {
            eprintln!("config error: {e}");
            return 2;
        }
    }
    if let Err(e) = config.validate() {
        eprintln!("config error: {e}");
        return 2;
    }

    let setup = (|| -> privsum::Result<_> {
        let topology = resolve_topology(&config.topology, config.seed)?;
        let system = match &config.system_path {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(privsum::Error::from)?;
                privsum::numerics::parse_system(&text)?
            }
            None => synthesize_system(&topology, config.seed)?,
        };
        let sim = config.to_sim_config()?;
        Ok((topology, system, sim))
    })();
    let (topology, system, sim) = match setup {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: {e}");
            return 2;
        }
    };

    let rho = privsum::numerics::spectral_radius_check(&system, 100);
    if rho >= 1.0 {
        eprintln!("warning: iteration matrix spectral radius estimate {rho:.3} >= 1; Jacobi may diverge");
    }

    let adversary = if tamper {
        // corrupt the lowest-id node as an aggregate tamperer
        AdversaryScript {
            corrupted: [0u64].into_iter().collect(),
            deviations: vec![Deviation::TamperAggregateS { aggregator: 0 }],
        }
    } else {
        AdversaryScript::default()
    };

    let result = match simulator::run(&topology, &sim, &system, &adversary) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("run failed: {e}");
            return 1;
        }
    };

    let scheme = sim.scheme.name();
    let csv = result
        .metrics
        .to_csv(scheme, result.config_digest, config.seed);
    match &out_metrics {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &csv) {
                eprintln!("run failed: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{csv}"),
    }
    if let Some(path) = &out_estimates {
        let mut text = format!("# config {:016x} seed {}\n", result.config_digest, config.seed);
        for v in &result.estimates {
            text.push_str(&format!("{v:.12}\n"));
        }
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("run failed: cannot write {}: {e}", path.display());
            return 1;
        }
    }

    let aborts = result.metrics.total_aborts();
    let detections: usize = result.metrics.per_round.iter().map(|r| r.detections).sum();
    println!(
        "scheme {scheme}: {} rounds, {} messages, {} bytes, {} aborts, {} detections",
        config.rounds,
        result.metrics.total_messages(),
        result.metrics.total_bytes(),
        aborts,
        detections,
    );

    if compare_plain {
        let mut plain_cfg = sim.clone();
        plain_cfg.scheme = SchemeKind::Plain;
        match simulator::run(&topology, &plain_cfg, &system, &AdversaryScript::default()) {
            Ok(plain) => {
                let max_diff = result
                    .estimates
                    .iter()
                    .zip(&plain.estimates)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                println!("max deviation from plain run: {max_diff:.3e}");
            }
            Err(e) => eprintln!("warning: paired plain run failed: {e}"),
        }
    }

    if aborts > 0 {
        return 1;
    }
    0
}

fn gen_topology(spec: &str, seed: u64, out: Option<PathBuf>) -> i32 {
    match resolve_topology(spec, seed) {
        Ok(topology) => {
            let text = topology.to_edge_list();
            match out {
                Some(path) => match std::fs::write(&path, text) {
                    Ok(()) => {
                        println!(
                            "wrote {} nodes, {} edges to {}",
                            topology.node_count(),
                            topology.edge_count(),
                            path.display()
                        );
                        0
                    }
                    Err(e) => {
                        eprintln!("cannot write {}: {e}", path.display());
                        2
                    }
                },
                None => {
                    print!("{text}");
                    0
                }
            }
        }
        Err(e) => {
            eprintln!("config error: {e}");
            2
        }
    }
}

fn verify(suite: &str) -> i32 {
    let suites: Vec<&str> = match suite {
        "all" => vec!["shamir", "privacy-f17", "byzantine", "paillier"],
        s => vec![s],
    };
    for s in &suites {
        let outcome: privsum::Result<String> = match *s {
            "shamir" => verify_shamir(),
            "privacy-f17" => schemes::privacy_exhaustion_f17(2)
                .and_then(|a| schemes::privacy_exhaustion_f17(3).map(|b| a + b))
                .map(|n| format!("{n} coalition/secret combinations")),
            "byzantine" => byzagree::exhaustive_property_check(5)
                .map(|n| format!("{n} adversary scripts")),
            "paillier" => verify_paillier(),
            other => {
                eprintln!("unknown suite {other}");
                return 2;
            }
        };
        match outcome {
            Ok(detail) => println!("{s}: ok ({detail})"),
            Err(e) => {
                eprintln!("{s}: FAILED: {e}");
                return 3;
            }
        }
    }
    0
}

fn verify_shamir() -> privsum::Result<String> {
    let field = FieldParams::mersenne61();
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    let mut checked = 0;
    for _ in 0..200 {
        let d = rng.gen_range(1..=6usize);
        let n = rng.gen_range(d..=12usize);
        let points: Vec<_> = (1..=n as u64).map(|x| field.element(x)).collect();
        let secret = field.random_element(&mut rng);
        let set = shamir::deal(secret, d, &points, &mut rng)?;
        let got = shamir::reconstruct(&set.shares[..d])?;
        if got != secret {
            return Err(privsum::Error::Corruption(
                "reconstruction mismatch".into(),
            ));
        }
        checked += 1;
    }
    // commitment linearity smoke check on the small group
    let group = pedersen::GroupParams::test_profile();
    let a = group.commit(&BigUint::from(3u32), &BigUint::from(4u32))?;
    let b = group.commit(&BigUint::from(5u32), &BigUint::from(2u32))?;
    let sum = group.commit(&BigUint::from(8u32), &BigUint::from(6u32))?;
    if a.mul(&b, &group) != sum {
        return Err(privsum::Error::Corruption("commitment linearity".into()));
    }
    Ok(format!("{checked} dealings"))
}

fn verify_paillier() -> privsum::Result<String> {
    let mut rng = ChaCha12Rng::seed_from_u64(2);
    let (pk, sk) = paillier::keygen(512, &mut rng);
    let mut checked = 0;
    for _ in 0..25 {
        let a = BigUint::from(rng.gen_range(0..1u64 << 40));
        let b = BigUint::from(rng.gen_range(0..1u64 << 40));
        let k = BigUint::from(rng.gen_range(1..1000u64));
        let ca = paillier::encrypt(&pk, &a, &mut rng)?;
        let cb = paillier::encrypt(&pk, &b, &mut rng)?;
        let sum = paillier::decrypt(&sk, &pk, &paillier::hom_add(&pk, &ca, &cb)?)?;
        if sum != &a + &b {
            return Err(privsum::Error::Corruption("additive homomorphism".into()));
        }
        let scaled = paillier::decrypt(&sk, &pk, &paillier::hom_scale(&pk, &ca, &k)?)?;
        if scaled != &a * &k {
            return Err(privsum::Error::Corruption("scalar homomorphism".into()));
        }
        checked += 1;
    }
    Ok(format!("{checked} homomorphism checks"))
}
