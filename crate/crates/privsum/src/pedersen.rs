//! Pedersen commitments and non-interactive verifiable secret sharing.
//!
//! Commitments live in an order-q subgroup of Z_p* (a Schnorr group);
//! share arithmetic happens in the exponent field Z_q. The malicious-model
//! scheme demands that Z_q coincide with the message field, so the stock
//! profiles pin q to the field modulus in use.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use sha2::{Digest, Sha256};

/// Schnorr-group parameters: p prime, q prime with q | p-1, and two
/// independent generators of the order-q subgroup. `h` is derived by
/// hashing a public seed into the subgroup, so no dealer knows log_g(h).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupParams {
    p: BigUint,
    q: BigUint,
    g: BigUint,
    h: BigUint,
}

fn hash_to_subgroup(p: &BigUint, q: &BigUint, seed: &[u8]) -> BigUint {
    let cofactor = (p - 1u32) / q;
    let mut counter = 0u64;
    loop {
        let mut hasher = Sha256::new();
        hasher.update(seed);
        hasher.update(counter.to_be_bytes());
        let digest = hasher.finalize();
        let cand = BigUint::from_bytes_be(&digest) % p;
        let elem = cand.modpow(&cofactor, p);
        if !elem.is_zero() && !elem.is_one() {
            return elem;
        }
        counter += 1;
    }
}

impl GroupParams {
    pub fn new(p: BigUint, q: BigUint, g: BigUint, h: BigUint) -> Result<Self> {
        if ((&p - 1u32) % &q) != BigUint::zero() {
            return Err(Error::Config("q does not divide p - 1".into()));
        }
        for gen in [&g, &h] {
            if gen.is_zero() || gen.is_one() || gen >= &p {
                return Err(Error::Config("generator outside the group".into()));
            }
            if !gen.modpow(&q, &p).is_one() {
                return Err(Error::Config("generator does not have order q".into()));
            }
        }
        Ok(GroupParams { p, q, g, h })
    }

    /// Tiny test group: p = 23, q = 11, g = 4, h = 9.
    pub fn test_profile() -> Self {
        GroupParams {
            p: BigUint::from(23u32),
            q: BigUint::from(11u32),
            g: BigUint::from(4u32),
            h: BigUint::from(9u32),
        }
    }

    /// Group whose exponent field is the default message field: q is the
    /// Mersenne prime 2^61 - 1 and p = 52q + 1.
    pub fn mersenne61_profile() -> Self {
        let p: BigUint = "119903836479112085453".parse().unwrap();
        let q = BigUint::from((1u64 << 61) - 1);
        // 2^52 = 2^(p-1)/q mod p, a generator of the order-q subgroup
        let g = BigUint::from(1u64 << 52);
        let h = hash_to_subgroup(&p, &q, b"privsum pedersen h / mersenne61");
        GroupParams { p, q, g, h }
    }

    /// Production-scale group: 2048-bit p = k*q + 1 with the same Mersenne
    /// exponent field q = 2^61 - 1, so commitments gain full-strength
    /// discrete-log hardness without changing any share arithmetic.
    /// g = 2^((p-1)/q) mod p generates the order-q subgroup.
    pub fn production2048_profile() -> Self {
        let p_hex = concat!(
            "8000000000000000000000000000000000000000000000000000000000000000",
            "0000000000000000000000000000000000000000000000000000000000000000",
            "0000000000000000000000000000000000000000000000000000000000000000",
            "0000000000000000000000000000000000000000000000000000000000000000",
            "0000000000000000000000000000000000000000000000000000000000000000",
            "0000000000000000000000000000000000000000000000000000000000000000",
            "0000000000000000000000000000000000000000000000000000000000000000",
            "0000000000000000000000000000000000000000000001353ffffffbfffff657",
        );
        let g_hex = concat!(
            "c1d7c4674a2452f02d9f75bf7cbf8c7bfbee0b42e4a6468c0dc9d9e3652ce848",
            "b7c8e87eb4177020d51bbed8cff3ae445e919730c2eb65141d29395ee21fbad2",
            "e915cf0bc19546e90a578db4f4114398805afdd8e3dfe4eda11a9ee9477f9823",
            "0f170df59f6d51c86fc302db0f8c97934204a6ef49e0f4253f64b8d6d8b588b7",
            "8aa15337d01ff600cb90db6356aaeef374e0c7e84fece30fae80d38fa8b4f584",
            "dfdc4116083e5c5b63781173c006ac41206805cfd440430ce5a4891e46a82af7",
            "17a2f71e6a07e36e058362a43706aa6d48a740d6792e5fef366e3ba60bfc2d3f",
            "535b891dae62d747bd0b666af11e6c6db488f4657f2a7d7cc44b2196551bbbf",
        );
        let p = BigUint::parse_bytes(p_hex.as_bytes(), 16).unwrap();
        let q = BigUint::from((1u64 << 61) - 1);
        let g = BigUint::parse_bytes(g_hex.as_bytes(), 16).unwrap();
        let h = hash_to_subgroup(&p, &q, b"privsum pedersen h / production2048");
        GroupParams { p, q, g, h }
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    /// Order of the commitment subgroup; also the share field modulus.
    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn g(&self) -> &BigUint {
        &self.g
    }

    pub fn h(&self) -> &BigUint {
        &self.h
    }

    pub fn random_exponent<R: Rng + ?Sized>(&self, rng: &mut R) -> BigUint {
        rng.gen_biguint_below(&self.q)
    }

    /// g^s h^t mod p.
    pub fn commit(&self, s: &BigUint, t: &BigUint) -> Result<Commitment> {
        if s >= &self.q || t >= &self.q {
            return Err(Error::Argument("commitment exponent outside Z_q".into()));
        }
        Ok(Commitment {
            value: self.g.modpow(s, &self.p) * self.h.modpow(t, &self.p) % &self.p,
        })
    }

    // ---- Z_q scalar helpers (shared by VSS and the malicious scheme) ----

    pub fn q_add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.q
    }

    pub fn q_mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b % &self.q
    }

    pub fn q_sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + &self.q - b % &self.q) % &self.q
    }

    pub fn q_inv(&self, a: &BigUint) -> Result<BigUint> {
        let a_int = BigInt::from_biguint(Sign::Plus, a % &self.q);
        let q_int = BigInt::from_biguint(Sign::Plus, self.q.clone());
        let ext = a_int.extended_gcd(&q_int);
        if !ext.gcd.is_one() {
            return Err(Error::Domain("no inverse in Z_q".into()));
        }
        Ok(ext.x.mod_floor(&q_int).to_biguint().unwrap())
    }

    /// Evaluate a Z_q polynomial (free coefficient first) at integer x.
    pub fn q_poly_eval(&self, coeffs: &[BigUint], x: u64) -> BigUint {
        let x = BigUint::from(x) % &self.q;
        let mut acc = BigUint::zero();
        for c in coeffs.iter().rev() {
            acc = (acc * &x + c) % &self.q;
        }
        acc
    }

    /// Interpolate the free coefficient from (point, value) pairs in Z_q.
    pub fn q_interpolate_at_zero(&self, points: &[u64], values: &[BigUint]) -> Result<BigUint> {
        if points.len() != values.len() || points.is_empty() {
            return Err(Error::Argument("mismatched interpolation inputs".into()));
        }
        let mut acc = BigUint::zero();
        for (j, (&xj, vj)) in points.iter().zip(values.iter()).enumerate() {
            let mut num = BigUint::one();
            let mut den = BigUint::one();
            let xj_q = BigUint::from(xj) % &self.q;
            for (k, &xk) in points.iter().enumerate() {
                if k == j {
                    continue;
                }
                let xk_q = BigUint::from(xk) % &self.q;
                num = self.q_mul(&num, &xk_q);
                den = self.q_mul(&den, &self.q_sub(&xk_q, &xj_q));
            }
            let lam = self.q_mul(&num, &self.q_inv(&den)?);
            acc = self.q_add(&acc, &self.q_mul(&lam, vj));
        }
        Ok(acc)
    }
}

/// A Pedersen commitment g^s h^t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commitment {
    value: BigUint,
}

impl Commitment {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn from_value(value: BigUint) -> Self {
        Commitment { value }
    }

    pub fn mul(&self, other: &Commitment, params: &GroupParams) -> Commitment {
        Commitment {
            value: &self.value * &other.value % params.p(),
        }
    }

    pub fn pow(&self, exp: &BigUint, params: &GroupParams) -> Commitment {
        Commitment {
            value: self.value.modpow(exp, params.p()),
        }
    }

    pub fn inv(&self, params: &GroupParams) -> Result<Commitment> {
        // order-q subgroup: x^(q-1) is the inverse
        Ok(Commitment {
            value: self.value.modpow(&(params.q() - 1u32), params.p()),
        })
    }
}

/// The commitment vector (E_0 .. E_{d-1}) published with a dealing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitmentVector {
    entries: Vec<Commitment>,
}

impl CommitmentVector {
    pub fn new(entries: Vec<Commitment>) -> Self {
        CommitmentVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Commitment] {
        &self.entries
    }

    pub fn entry(&self, k: usize) -> &Commitment {
        &self.entries[k]
    }
}

/// One party's verifiable share: evaluations of the secret polynomial P
/// and the blinding polynomial R at the party's point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiableShare {
    pub point: u64,
    pub s_share: BigUint,
    pub t_share: BigUint,
}

/// Everything the dealer produces: per-party shares plus the commitment
/// vector whose first entry commits to (s, t).
#[derive(Debug, Clone)]
pub struct VssDealing {
    pub shares: Vec<VerifiableShare>,
    pub commitments: CommitmentVector,
}

impl VssDealing {
    pub fn share_for(&self, point: u64) -> Option<&VerifiableShare> {
        self.shares.iter().find(|s| s.point == point)
    }
}

/// Deal a verifiable sharing of secret `s` blinded by `t` with threshold
/// `d` to the given nonzero, distinct party points.
pub fn vss_deal<R: Rng + ?Sized>(
    params: &GroupParams,
    s: &BigUint,
    t: &BigUint,
    d: usize,
    party_points: &[u64],
    rng: &mut R,
) -> Result<VssDealing> {
    if d == 0 {
        return Err(Error::Argument("threshold must be at least 1".into()));
    }
    if party_points.len() < d {
        return Err(Error::Argument(format!(
            "need at least {d} parties, got {}",
            party_points.len()
        )));
    }
    if s >= params.q() || t >= params.q() {
        return Err(Error::Argument("secret or blinding outside Z_q".into()));
    }
    for (i, pt) in party_points.iter().enumerate() {
        if *pt == 0 || BigUint::from(*pt) % params.q() == BigUint::zero() {
            return Err(Error::Argument("party point is zero in Z_q".into()));
        }
        if party_points[..i].contains(pt) {
            return Err(Error::Argument(format!("repeated party point {pt}")));
        }
    }
    let mut p_coeffs = vec![s.clone()];
    let mut r_coeffs = vec![t.clone()];
    for _ in 1..d {
        p_coeffs.push(params.random_exponent(rng));
        r_coeffs.push(params.random_exponent(rng));
    }
    let commitments = CommitmentVector::new(
        p_coeffs
            .iter()
            .zip(r_coeffs.iter())
            .map(|(pk, rk)| params.commit(pk, rk))
            .collect::<Result<Vec<_>>>()?,
    );
    let shares = party_points
        .iter()
        .map(|&pt| VerifiableShare {
            point: pt,
            s_share: params.q_poly_eval(&p_coeffs, pt),
            t_share: params.q_poly_eval(&r_coeffs, pt),
        })
        .collect();
    Ok(VssDealing {
        shares,
        commitments,
    })
}

/// Check the share equation E(sigma, tau) = prod_j E_j^(i^j).
pub fn vss_verify(
    params: &GroupParams,
    point: u64,
    share: (&BigUint, &BigUint),
    commitments: &CommitmentVector,
) -> bool {
    let (sigma, tau) = share;
    if sigma >= params.q() || tau >= params.q() {
        return false;
    }
    let lhs = match params.commit(sigma, tau) {
        Ok(c) => c,
        Err(_) => return false,
    };
    let x = BigUint::from(point) % params.q();
    let mut x_pow = BigUint::one();
    let mut rhs = Commitment {
        value: BigUint::one(),
    };
    for e in commitments.entries() {
        rhs = rhs.mul(&e.pow(&x_pow, params), params);
        x_pow = params.q_mul(&x_pow, &x);
    }
    lhs == rhs
}

/// Entrywise product of commitment vectors raised to the coefficients:
/// the commitment vector of the corresponding linear combination of
/// dealings.
pub fn combine_commitments(
    params: &GroupParams,
    vectors: &[&CommitmentVector],
    coefficients: &[BigUint],
) -> Result<CommitmentVector> {
    if vectors.is_empty() || vectors.len() != coefficients.len() {
        return Err(Error::Argument(
            "need matching, non-empty vectors and coefficients".into(),
        ));
    }
    let d = vectors[0].len();
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::Argument("commitment vector length mismatch".into()));
    }
    let mut entries = Vec::with_capacity(d);
    for k in 0..d {
        let mut acc = Commitment {
            value: BigUint::one(),
        };
        for (v, a) in vectors.iter().zip(coefficients.iter()) {
            acc = acc.mul(&v.entry(k).pow(&(a % params.q()), params), params);
        }
        entries.push(acc);
    }
    Ok(CommitmentVector::new(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::collections::HashMap;

    fn tiny() -> GroupParams {
        GroupParams::test_profile()
    }

    #[test]
    fn profiles_are_valid() {
        let t = tiny();
        GroupParams::new(t.p.clone(), t.q.clone(), t.g.clone(), t.h.clone()).unwrap();
        let m = GroupParams::mersenne61_profile();
        GroupParams::new(m.p.clone(), m.q.clone(), m.g.clone(), m.h.clone()).unwrap();
    }

    #[test]
    fn commit_identity_and_oracle() {
        let params = tiny();
        let zero = BigUint::zero();
        assert_eq!(
            params.commit(&zero, &zero).unwrap().value(),
            &BigUint::one()
        );
        // 4^3 * 9^5 mod 23, by an independent modpow
        let oracle = BigUint::from(4u32).modpow(&BigUint::from(3u32), &BigUint::from(23u32))
            * BigUint::from(9u32).modpow(&BigUint::from(5u32), &BigUint::from(23u32))
            % BigUint::from(23u32);
        assert_eq!(
            params
                .commit(&BigUint::from(3u32), &BigUint::from(5u32))
                .unwrap()
                .value(),
            &oracle
        );
        assert!(params
            .commit(&BigUint::from(11u32), &BigUint::zero())
            .is_err());
    }

    #[test]
    fn commit_is_homomorphic() {
        let params = tiny();
        let mut rng = ChaCha12Rng::seed_from_u64(40);
        for _ in 0..100 {
            let (s1, t1) = (params.random_exponent(&mut rng), params.random_exponent(&mut rng));
            let (s2, t2) = (params.random_exponent(&mut rng), params.random_exponent(&mut rng));
            let lhs = params
                .commit(&s1, &t1)
                .unwrap()
                .mul(&params.commit(&s2, &t2).unwrap(), &params);
            let rhs = params
                .commit(&params.q_add(&s1, &s2), &params.q_add(&t1, &t2))
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn honest_dealing_verifies() {
        let params = tiny();
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for d in 1..=3usize {
            let s = params.random_exponent(&mut rng);
            let t = params.random_exponent(&mut rng);
            let dealing = vss_deal(&params, &s, &t, d, &[1, 2, 3, 4], &mut rng).unwrap();
            assert_eq!(dealing.commitments.len(), d);
            for share in &dealing.shares {
                assert!(vss_verify(
                    &params,
                    share.point,
                    (&share.s_share, &share.t_share),
                    &dealing.commitments
                ));
            }
        }
    }

    #[test]
    fn degree_one_dealing_is_constant() {
        let params = tiny();
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let s = BigUint::from(7u32);
        let t = BigUint::from(3u32);
        let dealing = vss_deal(&params, &s, &t, 1, &[1, 2, 3], &mut rng).unwrap();
        for share in &dealing.shares {
            assert_eq!(share.s_share, s);
            assert_eq!(share.t_share, t);
        }
        assert_eq!(dealing.commitments.len(), 1);
        assert_eq!(
            dealing.commitments.entry(0),
            &params.commit(&s, &t).unwrap()
        );
    }

    #[test]
    fn two_shares_interpolate_secret() {
        let params = tiny();
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        let s = BigUint::from(9u32);
        let t = BigUint::from(2u32);
        let dealing = vss_deal(&params, &s, &t, 2, &[1, 2, 3], &mut rng).unwrap();
        for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let pts = [dealing.shares[a].point, dealing.shares[b].point];
            let vals = [
                dealing.shares[a].s_share.clone(),
                dealing.shares[b].s_share.clone(),
            ];
            assert_eq!(params.q_interpolate_at_zero(&pts, &vals).unwrap(), s);
        }
    }

    #[test]
    fn tampered_share_rejected() {
        let params = tiny();
        let mut rng = ChaCha12Rng::seed_from_u64(44);
        for _ in 0..50 {
            let s = params.random_exponent(&mut rng);
            let t = params.random_exponent(&mut rng);
            let dealing = vss_deal(&params, &s, &t, 2, &[1, 2, 3, 4], &mut rng).unwrap();
            for share in &dealing.shares {
                let bumped = params.q_add(&share.s_share, &BigUint::one());
                assert!(!vss_verify(
                    &params,
                    share.point,
                    (&bumped, &share.t_share),
                    &dealing.commitments
                ));
            }
        }
    }

    #[test]
    fn cross_dealing_rejected_except_predicted_collisions() {
        // Shares of dealing B checked against commitments of dealing A
        // fail except for accidental collisions, which in the tiny group
        // happen exactly when sigma + x*tau matches A's share equation
        // (x = log_g h). The oracle predicts each outcome.
        let params = tiny();
        let x = {
            let mut pow = BigUint::one();
            let mut found = 0u32;
            for e in 0u32..11 {
                if &pow == params.h() {
                    found = e;
                    break;
                }
                pow = pow * params.g() % params.p();
            }
            BigUint::from(found)
        };
        let mut rng = ChaCha12Rng::seed_from_u64(45);
        let mut collisions = 0u32;
        let trials = 1000;
        for _ in 0..trials {
            let a = vss_deal(
                &params,
                &params.random_exponent(&mut rng),
                &params.random_exponent(&mut rng),
                2,
                &[1, 2, 3],
                &mut rng,
            )
            .unwrap();
            let b = vss_deal(
                &params,
                &params.random_exponent(&mut rng),
                &params.random_exponent(&mut rng),
                2,
                &[1, 2, 3],
                &mut rng,
            )
            .unwrap();
            for share in &b.shares {
                let truth = a.share_for(share.point).unwrap();
                let predicted = params.q_add(&share.s_share, &params.q_mul(&x, &share.t_share))
                    == params.q_add(&truth.s_share, &params.q_mul(&x, &truth.t_share));
                let verified = vss_verify(
                    &params,
                    share.point,
                    (&share.s_share, &share.t_share),
                    &a.commitments,
                );
                assert_eq!(verified, predicted);
                if verified {
                    collisions += 1;
                }
            }
        }
        // expected collision rate is 1/11 per share; 3000 checks
        assert!(collisions < 500, "collisions = {collisions}");
    }

    #[test]
    fn combined_commitments_verify_combined_shares() {
        let params = tiny();
        let mut rng = ChaCha12Rng::seed_from_u64(46);
        for _ in 0..100 {
            let n_deals = 3;
            let points = [1u64, 2, 3, 4];
            let dealings: Vec<VssDealing> = (0..n_deals)
                .map(|_| {
                    vss_deal(
                        &params,
                        &params.random_exponent(&mut rng),
                        &params.random_exponent(&mut rng),
                        2,
                        &points,
                        &mut rng,
                    )
                    .unwrap()
                })
                .collect();
            let coeffs: Vec<BigUint> =
                (0..n_deals).map(|_| params.random_exponent(&mut rng)).collect();
            let vectors: Vec<&CommitmentVector> =
                dealings.iter().map(|d| &d.commitments).collect();
            let combined = combine_commitments(&params, &vectors, &coeffs).unwrap();
            for &pt in &points {
                let mut s_acc = BigUint::zero();
                let mut t_acc = BigUint::zero();
                for (dealing, a) in dealings.iter().zip(coeffs.iter()) {
                    let share = dealing.share_for(pt).unwrap();
                    s_acc = params.q_add(&s_acc, &params.q_mul(a, &share.s_share));
                    t_acc = params.q_add(&t_acc, &params.q_mul(a, &share.t_share));
                }
                assert!(vss_verify(&params, pt, (&s_acc, &t_acc), &combined));
            }
        }
    }

    #[test]
    fn combine_commitments_edge_cases() {
        let params = tiny();
        let mut rng = ChaCha12Rng::seed_from_u64(47);
        let d = vss_deal(
            &params,
            &BigUint::from(5u32),
            &BigUint::from(6u32),
            2,
            &[1, 2],
            &mut rng,
        )
        .unwrap();
        let same = combine_commitments(&params, &[&d.commitments], &[BigUint::one()]).unwrap();
        assert_eq!(same, d.commitments);
        let zeroed = combine_commitments(&params, &[&d.commitments], &[BigUint::zero()]).unwrap();
        for e in zeroed.entries() {
            assert_eq!(e.value(), &BigUint::one());
        }
        let short = CommitmentVector::new(vec![d.commitments.entry(0).clone()]);
        assert!(combine_commitments(
            &params,
            &[&d.commitments, &short],
            &[BigUint::one(), BigUint::one()]
        )
        .is_err());
    }

    #[test]
    fn binding_exhaustive_tiny_group() {
        // commitments are perfectly hiding, so collisions with s' != s do
        // exist; binding rests on every such collision revealing log_g(h).
        // Exhaust Z_11^2 and check the equation s + x*t = s' + x*t' pins x
        // to the true discrete log each time.
        let params = tiny();
        let mut x_true = None;
        let mut pow = BigUint::one();
        for e in 0u32..11 {
            if &pow == params.h() {
                x_true = Some(e);
                break;
            }
            pow = pow * params.g() % params.p();
        }
        let x_true = x_true.expect("h must be a power of g in a cyclic subgroup");
        let s = 4u32;
        let t = 7u32;
        let target = params
            .commit(&BigUint::from(s), &BigUint::from(t))
            .unwrap();
        let mut collisions = 0u32;
        for s2 in 0u32..11 {
            for t2 in 0u32..11 {
                if s2 == s {
                    continue;
                }
                let c = params
                    .commit(&BigUint::from(s2), &BigUint::from(t2))
                    .unwrap();
                if c == target {
                    collisions += 1;
                    // x = (s - s2) / (t2 - t) mod 11
                    let ds = params.q_sub(&BigUint::from(s), &BigUint::from(s2));
                    let dt = params.q_sub(&BigUint::from(t2), &BigUint::from(t));
                    let x = params.q_mul(&ds, &params.q_inv(&dt).unwrap());
                    assert_eq!(x, BigUint::from(x_true));
                }
            }
        }
        // exactly one collision per candidate secret
        assert_eq!(collisions, 10);
    }

    #[test]
    fn hiding_uniform_tiny_group() {
        // for fixed s, commitments over all t cover the subgroup uniformly
        let params = tiny();
        let s = BigUint::from(3u32);
        let mut seen = HashMap::new();
        for t in 0u32..11 {
            let c = params.commit(&s, &BigUint::from(t)).unwrap();
            *seen.entry(c.value().clone()).or_insert(0u32) += 1;
        }
        assert_eq!(seen.len(), 11);
        assert!(seen.values().all(|&v| v == 1));
    }

    #[test]
    fn production_2048_profile_is_well_formed() {
        let p = GroupParams::production2048_profile();
        assert_eq!(p.p().bits(), 2048);
        assert_eq!(p.q(), &BigUint::from((1u64 << 61) - 1));
        // the constructor re-checks q | p-1 and both generator orders
        GroupParams::new(p.p().clone(), p.q().clone(), p.g().clone(), p.h().clone()).unwrap();
        // commitment linearity still holds at this size
        let a = p.commit(&BigUint::from(5u32), &BigUint::from(7u32)).unwrap();
        let b = p.commit(&BigUint::from(11u32), &BigUint::from(13u32)).unwrap();
        let sum = p.commit(&BigUint::from(16u32), &BigUint::from(20u32)).unwrap();
        assert_eq!(a.mul(&b, &p), sum);
    }
}
