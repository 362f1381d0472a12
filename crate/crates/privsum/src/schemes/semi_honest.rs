//! Semi-honest weighted-sum schemes: Shamir secret sharing in three share
//! modes, and additively homomorphic encryption with threshold decryption.
//!
//! Both assume corrupted parties follow the protocol and only pool what they
//! observed. Missing messages abort the collecting node's round instead of
//! being substituted by zeros, which would silently corrupt the workload.

use super::{MessageLedger, Payload, SchemeOutcome, WeightVector};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::paillier::{
    self, encrypt, hom_add, hom_scale, keygen, partial_decrypt, split_key, Ciphertext,
    PaillierPublicKey, ThresholdKeyShares, ThresholdMode,
};
use crate::shamir::{self, Share};
use num_bigint::BigUint;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};

/// How secrets are split across the vicinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SssMode {
    /// One polynomial per (sender, collector) message; free coefficient is
    /// m_ji, the aggregation coefficients a_ji are applied by the
    /// aggregating neighbors.
    PerMessage,
    /// One polynomial per sender, broadcast to the whole vicinity; usable
    /// when every neighbor of the sender has at least d neighbors itself.
    SingleBroadcast,
    /// Additive split: threshold equals the vicinity size, every aggregate
    /// is required, no redundancy.
    Additive,
}

/// One secret-sharing collection round for node `i`.
///
/// `secrets` holds each sender's message m_ji (or, in broadcast mode, the
/// sender's raw state to which the weight is applied at aggregation).
/// `withhold` lists aggregators that never report — their absence aborts the
/// round only when fewer than `d` aggregates remain (additive mode: any
/// absence aborts).
pub fn sss_round<R: Rng + ?Sized>(
    i: u64,
    round: usize,
    secrets: &BTreeMap<u64, FieldElement>,
    weights: &WeightVector,
    d: usize,
    mode: SssMode,
    withhold: &BTreeSet<u64>,
    rng: &mut R,
    ledger: &mut MessageLedger,
) -> Result<SchemeOutcome> {
    let neighbors: Vec<u64> = weights.keys().copied().collect();
    if neighbors.is_empty() {
        return Err(Error::Argument("empty vicinity".into()));
    }
    for j in &neighbors {
        if !secrets.contains_key(j) {
            return Err(Error::Round(format!("missing message from node {j}")));
        }
    }
    let modulus = secrets[&neighbors[0]].modulus();
    if d < 1 || d > neighbors.len() {
        return Err(Error::Config(format!(
            "threshold {d} invalid for vicinity of {}",
            neighbors.len()
        )));
    }
    // evaluation point of neighbor l: its id shifted off zero
    let point_of = |l: u64| FieldElement::new((l + 1) % modulus, modulus);
    let points: Vec<FieldElement> = neighbors.iter().map(|&l| point_of(l)).collect();

    // deal phase: every sender fans shares across the vicinity
    let effective_d = if mode == SssMode::Additive {
        neighbors.len()
    } else {
        d
    };
    let mut received: BTreeMap<u64, BTreeMap<u64, FieldElement>> = BTreeMap::new();
    for &j in &neighbors {
        let shares: Vec<FieldElement> = if mode == SssMode::Additive {
            shamir::deal_additive(secrets[&j], neighbors.len(), rng)?
        } else {
            shamir::deal(secrets[&j], effective_d, &points, rng)?
                .shares
                .into_iter()
                .map(|s| s.value)
                .collect()
        };
        for (&l, share) in neighbors.iter().zip(shares) {
            ledger.record(j, l, round, Payload::Share(share));
            received.entry(l).or_default().insert(j, share);
        }
    }

    // aggregate phase: S_li = sum over j of a_ji * C_jil
    let mut aggregates: Vec<(u64, FieldElement)> = Vec::new();
    for &l in &neighbors {
        if withhold.contains(&l) {
            ledger.record_withheld();
            continue;
        }
        let mut s_li = FieldElement::zero(modulus);
        for &j in &neighbors {
            s_li = s_li.add(&weights[&j].mul(&received[&l][&j])?)?;
        }
        ledger.record(l, i, round, Payload::Aggregate(s_li));
        aggregates.push((l, s_li));
    }

    // reconstruction at node i
    match mode {
        SssMode::Additive => {
            if aggregates.len() < neighbors.len() {
                return Ok(SchemeOutcome::abort(format!(
                    "additive mode needs all {} aggregates, got {}",
                    neighbors.len(),
                    aggregates.len()
                )));
            }
            let mut sum = FieldElement::zero(modulus);
            for (_, v) in &aggregates {
                sum = sum.add(v)?;
            }
            Ok(SchemeOutcome::field(sum, false))
        }
        _ => {
            if aggregates.len() < effective_d {
                return Ok(SchemeOutcome::abort(format!(
                    "needed {effective_d} aggregates, got {}",
                    aggregates.len()
                )));
            }
            let chosen = &aggregates[..effective_d];
            let shares: Vec<Share> = chosen
                .iter()
                .map(|&(l, value)| Share {
                    point: point_of(l),
                    value,
                })
                .collect();
            let value = shamir::reconstruct(&shares)?;
            Ok(SchemeOutcome::field(value, false))
        }
    }
}

/// Key material of one collecting node's vicinity: the node's public key and
/// the per-neighbor decryption shares dealt by a trusted party.
#[derive(Debug, Clone)]
pub struct HomomorphicVicinity {
    pub owner: u64,
    pub pk: PaillierPublicKey,
    pub key_shares: ThresholdKeyShares,
}

/// Trusted-dealer key setup for node `i`: generate a keypair, split the
/// private key among the neighbors, and record one bundled
/// (public key + share) message per neighbor.
pub fn homomorphic_keygen<R: Rng + ?Sized>(
    i: u64,
    neighbors: &[u64],
    d: usize,
    bits: u64,
    rng: &mut R,
    ledger: &mut MessageLedger,
) -> Result<HomomorphicVicinity> {
    let (pk, sk) = keygen(bits, rng);
    let key_shares = split_key(sk, neighbors, d, rng)?;
    let bundle = pk.ciphertext_bytes() / 2 + (bits as usize / 8 + 16);
    for &l in neighbors {
        ledger.record(i, l, 0, Payload::KeyMaterial(bundle));
    }
    Ok(HomomorphicVicinity {
        owner: i,
        pk,
        key_shares,
    })
}

/// One homomorphic collection round: neighbors encrypt under i's key, i
/// aggregates in ciphertext space, the vicinity threshold-decrypts. Node i
/// never touches the private key.
pub fn homomorphic_round<R: Rng + ?Sized>(
    i: u64,
    round: usize,
    secrets: &BTreeMap<u64, FieldElement>,
    weights: &WeightVector,
    vicinity: &HomomorphicVicinity,
    withhold: &BTreeSet<u64>,
    rng: &mut R,
    ledger: &mut MessageLedger,
) -> Result<SchemeOutcome> {
    let neighbors: Vec<u64> = weights.keys().copied().collect();
    if neighbors.is_empty() {
        return Err(Error::Argument("empty vicinity".into()));
    }
    let modulus = secrets
        .values()
        .next()
        .ok_or_else(|| Error::Round("no messages".into()))?
        .modulus();
    let pk = &vicinity.pk;

    // encrypt and send
    let mut incoming: Vec<(u64, Ciphertext)> = Vec::new();
    for &j in &neighbors {
        let m = secrets
            .get(&j)
            .ok_or_else(|| Error::Round(format!("missing message from node {j}")))?;
        let c = encrypt(pk, &BigUint::from(m.value()), rng)?;
        ledger.record(j, i, round, Payload::Ciphertext(c.value().clone()));
        incoming.push((j, c));
    }

    // in-ciphertext weighted sum
    let mut agg: Option<Ciphertext> = None;
    for (j, c) in &incoming {
        let scaled = hom_scale(pk, c, &BigUint::from(weights[j].value()))?;
        agg = Some(match agg {
            None => scaled,
            Some(acc) => hom_add(pk, &acc, &scaled)?,
        });
    }
    let agg = agg.unwrap();

    // broadcast the aggregate, collect partial decryptions
    let meta = vicinity.key_shares.combine_meta();
    let mut partials = Vec::new();
    for &l in &neighbors {
        ledger.record(i, l, round, Payload::Ciphertext(agg.value().clone()));
        if withhold.contains(&l) {
            ledger.record_withheld();
            continue;
        }
        let share = vicinity
            .key_shares
            .share_for(l)
            .ok_or_else(|| Error::Config(format!("node {l} holds no key share")))?;
        let part = partial_decrypt(pk, &agg, share)?;
        ledger.record(l, i, round, Payload::PartialDecryption(part.value.clone()));
        partials.push(part);
    }
    let needed = match meta.mode {
        ThresholdMode::Additive => meta.group_size,
        ThresholdMode::Shamir => meta.threshold_d,
    };
    if partials.len() < needed {
        return Ok(SchemeOutcome::abort(format!(
            "needed {needed} partial decryptions, got {}",
            partials.len()
        )));
    }
    let chosen = &partials[..needed];
    let plaintext = paillier::combine_partials(pk, &meta, chosen)?;
    let reduced = (plaintext % BigUint::from(modulus))
        .to_u64_digits()
        .first()
        .copied()
        .unwrap_or(0);
    Ok(SchemeOutcome::field(
        FieldElement::new(reduced, modulus),
        false,
    ))
}

/// Exhaustive privacy-threshold check over F_17.
///
/// For the given threshold `d` and a vicinity of `d + 1` share points, this
/// enumerates every sharing polynomial of every candidate secret and counts
/// coalition views:
///
/// * every coalition of `d - 1` points sees exactly the same view
///   distribution for all 17 secrets — it learns nothing;
/// * every coalition of `d` points interpolates the secret from every
///   polynomial — the threshold is tight.
///
/// Returns the number of coalition/secret combinations checked.
pub fn privacy_exhaustion_f17(d: usize) -> Result<usize> {
    use crate::field::FieldParams;
    use crate::shamir::{reconstruct, Share, SharingPolynomial};

    if !(2..=3).contains(&d) {
        return Err(Error::Argument(
            "exhaustion is tractable for d of 2 or 3".into(),
        ));
    }
    let f = FieldParams::new(17, "F17")?;
    let n = d + 1;
    let points: Vec<FieldElement> = (1..=n as u64).map(|x| f.element(x)).collect();
    let mut checked = 0usize;

    // all (d-1)-subsets and d-subsets of the point indices
    let subsets = |k: usize| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
            }
        }
        out
    };

    // enumerate non-constant coefficients as a base-17 counter
    let polynomials = |secret: u64| -> Vec<SharingPolynomial> {
        let count = 17usize.pow(d as u32 - 1);
        (0..count)
            .map(|mut idx| {
                let mut coeffs = vec![f.element(secret)];
                for _ in 1..d {
                    coeffs.push(f.element((idx % 17) as u64));
                    idx /= 17;
                }
                SharingPolynomial::from_coeffs(coeffs).unwrap()
            })
            .collect()
    };

    for coalition in subsets(d - 1) {
        // view distribution per secret: map from observed share tuple to count
        let mut reference: Option<BTreeMap<Vec<u64>, usize>> = None;
        for secret in 0..17u64 {
            let mut counts: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
            for poly in polynomials(secret) {
                let view: Vec<u64> = coalition
                    .iter()
                    .map(|&i| poly.eval(&points[i]).unwrap().value())
                    .collect();
                *counts.entry(view).or_insert(0) += 1;
            }
            match &reference {
                None => reference = Some(counts),
                Some(r) => {
                    if *r != counts {
                        return Err(Error::Corruption(format!(
                            "coalition {coalition:?} distinguishes secret {secret}"
                        )));
                    }
                }
            }
            checked += 1;
        }
    }

    for coalition in subsets(d) {
        for secret in 0..17u64 {
            for poly in polynomials(secret) {
                let shares: Vec<Share> = coalition
                    .iter()
                    .map(|&i| Share {
                        point: points[i],
                        value: poly.eval(&points[i]).unwrap(),
                    })
                    .collect();
                if reconstruct(&shares)?.value() != secret {
                    return Err(Error::Corruption(format!(
                        "coalition {coalition:?} failed to reconstruct {secret}"
                    )));
                }
            }
            checked += 1;
        }
    }
    Ok(checked)
}
