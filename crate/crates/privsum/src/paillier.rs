//! Paillier additively homomorphic cryptosystem with dealer-based
//! threshold decryption.
//!
//! The private key `lambda` is never handed to the node that owns the key
//! pair: a dealer splits it into per-neighbor shares, either additively
//! (threshold = neighborhood size) or as integer Shamir shares combined by
//! Lagrange interpolation in the exponent.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use sha2::{Digest, Sha256};

fn modinv(a: &BigUint, m: &BigUint) -> Result<BigUint> {
    let a = BigInt::from_biguint(Sign::Plus, a.clone());
    let m_int = BigInt::from_biguint(Sign::Plus, m.clone());
    let ext = a.extended_gcd(&m_int);
    if !ext.gcd.is_one() {
        return Err(Error::Domain(format!(
            "value shares factor {} with modulus",
            ext.gcd
        )));
    }
    Ok(ext.x.mod_floor(&m_int).to_biguint().unwrap())
}

/// Modular exponentiation with a signed exponent.
fn pow_signed(base: &BigUint, exp: &BigInt, modulus: &BigUint) -> Result<BigUint> {
    if exp.is_negative() {
        let inv = modinv(base, modulus)?;
        Ok(inv.modpow(&exp.magnitude().clone(), modulus))
    } else {
        Ok(base.modpow(&exp.magnitude().clone(), modulus))
    }
}

const MILLER_RABIN_ROUNDS: usize = 40;

fn is_probable_prime<R: Rng + ?Sized>(n: &BigUint, rng: &mut R) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for p in [
        2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
        83, 89, 97,
    ] {
        let sp = BigUint::from(p);
        if n == &sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for _ in 0..MILLER_RABIN_ROUNDS {
        let a = rng.gen_biguint_range(&two, &(n - 2u32));
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gen_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    loop {
        let mut cand = rng.gen_biguint(bits);
        // force full length and oddness; forcing the second bit keeps the
        // product of two such primes at exactly 2*bits
        cand.set_bit(bits - 1, true);
        cand.set_bit(bits - 2, true);
        cand.set_bit(0, true);
        if is_probable_prime(&cand, rng) {
            return cand;
        }
    }
}

fn key_fingerprint(n: &BigUint) -> u64 {
    let digest = Sha256::digest(n.to_bytes_be());
    u64::from_be_bytes(digest[..8].try_into().unwrap())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaillierPublicKey {
    n: BigUint,
    n_squared: BigUint,
    g: BigUint,
    security_bits: u64,
    key_id: u64,
}

impl PaillierPublicKey {
    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn n_squared(&self) -> &BigUint {
        &self.n_squared
    }

    pub fn g(&self) -> &BigUint {
        &self.g
    }

    pub fn security_bits(&self) -> u64 {
        self.security_bits
    }

    pub fn key_id(&self) -> u64 {
        self.key_id
    }

    /// Ciphertext payload size in bytes (an element of Z_{N^2}).
    pub fn ciphertext_bytes(&self) -> usize {
        ((2 * self.security_bits + 7) / 8) as usize
    }
}

#[derive(Debug, Clone)]
pub struct PaillierPrivateKey {
    lambda: BigUint,
    mu: BigUint,
}

impl PaillierPrivateKey {
    pub fn lambda(&self) -> &BigUint {
        &self.lambda
    }

    pub fn mu(&self) -> &BigUint {
        &self.mu
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    value: BigUint,
    key_id: u64,
}

impl Ciphertext {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn key_id(&self) -> u64 {
        self.key_id
    }
}

/// Generate a key pair. `g = N + 1`, which satisfies `g = 1 mod N` and
/// makes encryption a single multiplication plus one exponentiation.
pub fn keygen<R: Rng + ?Sized>(
    security_bits: u64,
    rng: &mut R,
) -> (PaillierPublicKey, PaillierPrivateKey) {
    loop {
        let p = gen_prime(security_bits / 2, rng);
        let q = gen_prime(security_bits / 2, rng);
        if p == q {
            continue;
        }
        if let Ok(pair) = from_primes(&p, &q) {
            if pair.0.n.bits() == security_bits {
                return pair;
            }
        }
    }
}

/// Build a key pair from explicit primes (toy keys for tests).
pub fn from_primes(p: &BigUint, q: &BigUint) -> Result<(PaillierPublicKey, PaillierPrivateKey)> {
    if p == q {
        return Err(Error::Argument("primes must differ".into()));
    }
    let n = p * q;
    let n_squared = &n * &n;
    let g = &n + 1u32;
    let lambda = (p - 1u32).lcm(&(q - 1u32));
    // mu = (L(g^lambda mod N^2))^-1 mod N
    let glam = g.modpow(&lambda, &n_squared);
    let l = l_function(&glam, &n)?;
    let mu = modinv(&l, &n)?;
    let key_id = key_fingerprint(&n);
    Ok((
        PaillierPublicKey {
            security_bits: n.bits(),
            n_squared,
            g,
            key_id,
            n,
        },
        PaillierPrivateKey { lambda, mu },
    ))
}

fn l_function(x: &BigUint, n: &BigUint) -> Result<BigUint> {
    let minus_one = x - 1u32;
    let (quot, rem) = minus_one.div_rem(n);
    if !rem.is_zero() {
        return Err(Error::Corruption(
            "L-function input is not 1 mod N".into(),
        ));
    }
    Ok(quot)
}

/// Encrypt with a caller-chosen blinding factor `r` in Z*_N.
pub fn encrypt_with(pk: &PaillierPublicKey, m: &BigUint, r: &BigUint) -> Result<Ciphertext> {
    if m >= &pk.n {
        return Err(Error::Argument(format!("message {m} outside [0, N)")));
    }
    if r.is_zero() || !r.gcd(&pk.n).is_one() {
        return Err(Error::Argument("blinding factor not coprime to N".into()));
    }
    // g = N+1 so g^m = 1 + mN mod N^2
    let gm = (1u32 + m * &pk.n) % &pk.n_squared;
    let rn = r.modpow(&pk.n, &pk.n_squared);
    Ok(Ciphertext {
        value: (gm * rn) % &pk.n_squared,
        key_id: pk.key_id,
    })
}

pub fn encrypt<R: Rng + ?Sized>(
    pk: &PaillierPublicKey,
    m: &BigUint,
    rng: &mut R,
) -> Result<Ciphertext> {
    let r = loop {
        let cand = rng.gen_biguint_range(&BigUint::one(), &pk.n);
        if cand.gcd(&pk.n).is_one() {
            break cand;
        }
    };
    encrypt_with(pk, m, &r)
}

pub fn decrypt(
    sk: &PaillierPrivateKey,
    pk: &PaillierPublicKey,
    c: &Ciphertext,
) -> Result<BigUint> {
    if c.key_id != pk.key_id {
        return Err(Error::Argument("ciphertext under a different key".into()));
    }
    let clam = c.value.modpow(&sk.lambda, &pk.n_squared);
    Ok(l_function(&clam, &pk.n)? * &sk.mu % &pk.n)
}

/// Homomorphic addition: multiply ciphertexts.
pub fn hom_add(pk: &PaillierPublicKey, c1: &Ciphertext, c2: &Ciphertext) -> Result<Ciphertext> {
    if c1.key_id != c2.key_id || c1.key_id != pk.key_id {
        return Err(Error::Argument("key mismatch in homomorphic addition".into()));
    }
    Ok(Ciphertext {
        value: (&c1.value * &c2.value) % &pk.n_squared,
        key_id: c1.key_id,
    })
}

/// Homomorphic scalar multiplication: exponentiate by the scalar.
pub fn hom_scale(pk: &PaillierPublicKey, c: &Ciphertext, k: &BigUint) -> Result<Ciphertext> {
    if c.key_id != pk.key_id {
        return Err(Error::Argument("key mismatch in homomorphic scaling".into()));
    }
    Ok(Ciphertext {
        value: c.value.modpow(k, &pk.n_squared),
        key_id: c.key_id,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    /// Every neighbor holds an additive summand of lambda.
    Additive,
    /// Integer Shamir shares of lambda; any d of them reconstruct in the
    /// exponent via factorial-scaled Lagrange coefficients.
    Shamir,
}

#[derive(Debug, Clone)]
pub struct KeyShare {
    /// Neighbor that holds this share.
    pub holder: u64,
    /// Evaluation point (1-based position; 0 in additive mode).
    pub point: u64,
    pub value: BigInt,
}

/// Public data the combining node needs: everything except lambda.
#[derive(Debug, Clone)]
pub struct CombineMeta {
    pub mode: ThresholdMode,
    pub threshold_d: usize,
    pub group_size: usize,
    pub mu: BigUint,
}

/// The dealer's output of a key split. Consumes the private key; the
/// owning node only ever sees [`CombineMeta`].
#[derive(Debug, Clone)]
pub struct ThresholdKeyShares {
    mode: ThresholdMode,
    threshold_d: usize,
    mu: BigUint,
    shares: Vec<KeyShare>,
}

impl ThresholdKeyShares {
    pub fn mode(&self) -> ThresholdMode {
        self.mode
    }

    pub fn threshold_d(&self) -> usize {
        self.threshold_d
    }

    pub fn shares(&self) -> &[KeyShare] {
        &self.shares
    }

    pub fn share_for(&self, holder: u64) -> Option<&KeyShare> {
        self.shares.iter().find(|s| s.holder == holder)
    }

    pub fn combine_meta(&self) -> CombineMeta {
        CombineMeta {
            mode: self.mode,
            threshold_d: self.threshold_d,
            group_size: self.shares.len(),
            mu: self.mu.clone(),
        }
    }
}

/// Split a private key among neighbors. Additive when `d = |N_i|`, integer
/// Shamir otherwise.
pub fn split_key<R: Rng + ?Sized>(
    sk: PaillierPrivateKey,
    neighbor_ids: &[u64],
    d: usize,
    rng: &mut R,
) -> Result<ThresholdKeyShares> {
    let n = neighbor_ids.len();
    if d == 0 || d > n {
        return Err(Error::Argument(format!(
            "threshold {d} out of range for {n} neighbors"
        )));
    }
    let lambda_int = BigInt::from_biguint(Sign::Plus, sk.lambda.clone());
    if d == n {
        // additive: n-1 uniform values plus a balancing term
        let bound = BigInt::one() << (sk.lambda.bits() + 64);
        let mut shares = Vec::with_capacity(n);
        let mut running = BigInt::zero();
        for &holder in &neighbor_ids[..n - 1] {
            let v = rng.gen_bigint_range(&BigInt::zero(), &bound);
            running += &v;
            shares.push(KeyShare {
                holder,
                point: 0,
                value: v,
            });
        }
        shares.push(KeyShare {
            holder: neighbor_ids[n - 1],
            point: 0,
            value: &lambda_int - running,
        });
        Ok(ThresholdKeyShares {
            mode: ThresholdMode::Additive,
            threshold_d: d,
            mu: sk.mu,
            shares,
        })
    } else {
        // integer Shamir: random integer coefficients, evaluation at 1..n;
        // integer arithmetic (no reduction) keeps exponent combination exact
        let bound = BigInt::one() << (sk.lambda.bits() + 128);
        let coeffs: Vec<BigInt> = (1..d)
            .map(|_| rng.gen_bigint_range(&BigInt::zero(), &bound))
            .collect();
        let shares = neighbor_ids
            .iter()
            .enumerate()
            .map(|(idx, &holder)| {
                let x = BigInt::from(idx as u64 + 1);
                let mut acc = BigInt::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * &x + c;
                }
                KeyShare {
                    holder,
                    point: idx as u64 + 1,
                    value: acc * &x + &lambda_int,
                }
            })
            .collect();
        Ok(ThresholdKeyShares {
            mode: ThresholdMode::Shamir,
            threshold_d: d,
            mu: sk.mu,
            shares,
        })
    }
}

#[derive(Debug, Clone)]
pub struct PartialDecryption {
    pub holder: u64,
    pub point: u64,
    pub value: BigUint,
}

/// One neighbor's decryption help: the ciphertext raised to its key share.
pub fn partial_decrypt(
    pk: &PaillierPublicKey,
    c: &Ciphertext,
    share: &KeyShare,
) -> Result<PartialDecryption> {
    if c.key_id != pk.key_id {
        return Err(Error::Argument("ciphertext under a different key".into()));
    }
    Ok(PartialDecryption {
        holder: share.holder,
        point: share.point,
        value: pow_signed(&c.value, &share.value, &pk.n_squared)?,
    })
}

fn factorial(n: usize) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * k)
}

/// Combine partial decryptions into the plaintext.
///
/// Additive mode multiplies all partials, yielding `c^lambda`. Shamir mode
/// interpolates in the exponent with Lagrange coefficients scaled by
/// `delta = group_size!` so every exponent is an integer, yielding
/// `c^(delta * lambda)`; the extra `delta` is divided out mod N at the end.
pub fn combine_partials(
    pk: &PaillierPublicKey,
    meta: &CombineMeta,
    partials: &[PartialDecryption],
) -> Result<BigUint> {
    match meta.mode {
        ThresholdMode::Additive => {
            if partials.len() < meta.group_size {
                return Err(Error::InsufficientShares(format!(
                    "additive combination needs all {} partials, got {}",
                    meta.group_size,
                    partials.len()
                )));
            }
            let mut acc = BigUint::one();
            for p in partials {
                acc = acc * &p.value % &pk.n_squared;
            }
            Ok(l_function(&acc, &pk.n)? * &meta.mu % &pk.n)
        }
        ThresholdMode::Shamir => {
            if partials.len() < meta.threshold_d {
                return Err(Error::InsufficientShares(format!(
                    "need {} partials, got {}",
                    meta.threshold_d,
                    partials.len()
                )));
            }
            let chosen = &partials[..meta.threshold_d];
            let delta = factorial(meta.group_size);
            let mut acc = BigUint::one();
            for pj in chosen {
                let xj = BigInt::from(pj.point);
                let mut num = delta.clone();
                let mut den = BigInt::one();
                for pk_ in chosen {
                    if pk_.point == pj.point {
                        continue;
                    }
                    let xk = BigInt::from(pk_.point);
                    num *= &xk;
                    den *= xk - &xj;
                }
                let (coeff, rem) = num.div_rem(&den);
                if !rem.is_zero() {
                    return Err(Error::Corruption(
                        "scaled Lagrange coefficient is not integral".into(),
                    ));
                }
                acc = acc * pow_signed(&pj.value, &coeff, &pk.n_squared)? % &pk.n_squared;
            }
            // acc = c^(delta * lambda)
            let l = l_function(&acc, &pk.n)?;
            let delta_mod = delta
                .mod_floor(&BigInt::from_biguint(Sign::Plus, pk.n.clone()))
                .to_biguint()
                .unwrap();
            let delta_inv = modinv(&delta_mod, &pk.n).map_err(|_| {
                Error::Config("group size factorial shares a factor with N".into())
            })?;
            Ok(l * &meta.mu % &pk.n * delta_inv % &pk.n)
        }
    }
}

/// Reconstruct lambda from at least d Shamir key shares over a prime field
/// larger than lambda. Test oracle for the dealing; protocol code never
/// calls this.
pub fn reconstruct_lambda_mod(shares: &[&KeyShare], prime: &BigUint) -> Result<BigUint> {
    let p = BigInt::from_biguint(Sign::Plus, prime.clone());
    let mut acc = BigInt::zero();
    for sj in shares {
        let xj = BigInt::from(sj.point);
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for sk in shares {
            if sk.point == sj.point {
                continue;
            }
            let xk = BigInt::from(sk.point);
            num = num * &xk % &p;
            den = den * (xk - &xj) % &p;
        }
        let den_inv = BigInt::from_biguint(
            Sign::Plus,
            modinv(&den.mod_floor(&p).to_biguint().unwrap(), prime)?,
        );
        acc += sj.value.mod_floor(&p) * num % &p * den_inv;
    }
    Ok(acc.mod_floor(&p).to_biguint().unwrap())
}

#[allow(unused)]
fn to_u64(x: &BigUint) -> u64 {
    x.to_u64().unwrap()
}
