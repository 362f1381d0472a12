//! Prime-field arithmetic and the fixed-point real <-> field encoding.
//!
//! All protocol arithmetic happens on [`FieldElement`] values. Real-valued
//! workload data enters the field through [`FixedPointCodec`], which scales
//! by a constant `c` and rounds, giving an accuracy of `1/c` under addition.
//! Negative reals occupy the upper half of the field.

use crate::error::{Error, Result};
use rand::Rng;

/// Default modulus: the Mersenne prime 2^61 - 1.
pub const MERSENNE61: u64 = (1u64 << 61) - 1;

/// Default fixed-point scaling constant.
pub const DEFAULT_SCALE: u64 = 1_000_000;

/// Deterministic Miller-Rabin primality test, exact for all u64 inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This witness set decides primality for every n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Parameters of a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldParams {
    modulus: u64,
    name: String,
}

impl FieldParams {
    pub fn new(modulus: u64, name: impl Into<String>) -> Result<Self> {
        if !is_prime_u64(modulus) {
            return Err(Error::Config(format!("modulus {modulus} is not prime")));
        }
        Ok(FieldParams {
            modulus,
            name: name.into(),
        })
    }

    pub fn mersenne61() -> Self {
        FieldParams {
            modulus: MERSENNE61,
            name: "F_2^61-1".into(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement::new(value, self.modulus)
    }

    /// Embed a signed integer, mapping negatives to the upper half.
    pub fn element_from_i128(&self, value: i128) -> Result<FieldElement> {
        let m = self.modulus as i128;
        if value.abs() >= m {
            return Err(Error::Overflow(format!(
                "signed value {value} out of range for modulus {}",
                self.modulus
            )));
        }
        let v = value.rem_euclid(m) as u64;
        Ok(self.element(v))
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.element(rng.gen_range(0..self.modulus))
    }
}

/// An element of a prime field. Carries its modulus so that mixing fields
/// fails loudly instead of coercing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    pub fn new(value: u64, modulus: u64) -> Self {
        FieldElement {
            value: value % modulus,
            modulus,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn zero(modulus: u64) -> Self {
        FieldElement { value: 0, modulus }
    }

    pub fn one(modulus: u64) -> Self {
        FieldElement { value: 1, modulus }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check_same(&self, other: &FieldElement) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::Config(format!(
                "modulus mismatch: {} vs {}",
                self.modulus, other.modulus
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        let sum = (self.value as u128 + other.value as u128) % self.modulus as u128;
        Ok(FieldElement::new(sum as u64, self.modulus))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        Ok(FieldElement::new(
            mul_mod(self.value, other.value, self.modulus),
            self.modulus,
        ))
    }

    pub fn neg(&self) -> FieldElement {
        if self.value == 0 {
            *self
        } else {
            FieldElement::new(self.modulus - self.value, self.modulus)
        }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.value == 0 {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(FieldElement::new(
            pow_mod(self.value, self.modulus - 2, self.modulus),
            self.modulus,
        ))
    }

    pub fn pow(&self, exp: u64) -> FieldElement {
        FieldElement::new(pow_mod(self.value, exp, self.modulus), self.modulus)
    }

    /// Signed representative in (-modulus/2, modulus/2].
    pub fn signed(&self) -> i128 {
        if self.value as u128 > self.modulus as u128 / 2 {
            self.value as i128 - self.modulus as i128
        } else {
            self.value as i128
        }
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Fixed-point encoding of reals into the field: multiply by `scale_c`,
/// round, embed negatives in the upper half.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointCodec {
    scale_c: u64,
    modulus: u64,
}

impl FixedPointCodec {
    pub fn new(scale_c: u64, modulus: u64) -> Result<Self> {
        if scale_c == 0 {
            return Err(Error::Config("scale constant must be positive".into()));
        }
        if modulus <= 1u64 << 40 {
            return Err(Error::Config(format!(
                "modulus {modulus} too small for fixed-point use (need > 2^40)"
            )));
        }
        if !is_prime_u64(modulus) {
            return Err(Error::Config(format!("modulus {modulus} is not prime")));
        }
        Ok(FixedPointCodec { scale_c, modulus })
    }

    pub fn default_mersenne61() -> Self {
        FixedPointCodec {
            scale_c: DEFAULT_SCALE,
            modulus: MERSENNE61,
        }
    }

    pub fn scale(&self) -> u64 {
        self.scale_c
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Accuracy bound of the encoding under addition.
    pub fn accuracy(&self) -> f64 {
        1.0 / self.scale_c as f64
    }

    pub fn encode(&self, x: f64) -> Result<FieldElement> {
        if !x.is_finite() {
            return Err(Error::Argument(format!("cannot encode {x}")));
        }
        let scaled = (x * self.scale_c as f64).round();
        if scaled.abs() >= (self.modulus / 2) as f64 {
            return Err(Error::Overflow(format!(
                "|{x}| * {} exceeds modulus/2",
                self.scale_c
            )));
        }
        let v = scaled as i128;
        let m = self.modulus as i128;
        Ok(FieldElement::new(v.rem_euclid(m) as u64, self.modulus))
    }

    pub fn decode(&self, e: &FieldElement) -> Result<f64> {
        if e.modulus() != self.modulus {
            return Err(Error::Config(format!(
                "codec modulus {} does not match element modulus {}",
                self.modulus,
                e.modulus()
            )));
        }
        Ok(e.signed() as f64 / self.scale_c as f64)
    }

    /// Multiply `x` by lcm(divisors) so that later division by any listed
    /// divisor is exact on the decoded integer. Returns the scaled element
    /// and the multiplier that was applied.
    pub fn premultiply_lcm(
        &self,
        x: &FieldElement,
        divisors: &[u64],
    ) -> Result<(FieldElement, u128)> {
        if e_mismatch(x, self.modulus) {
            return Err(Error::Config("element modulus does not match codec".into()));
        }
        if divisors.is_empty() || divisors.contains(&0) {
            return Err(Error::Argument(
                "divisor set must be non-empty and positive".into(),
            ));
        }
        let mut l: u128 = 1;
        for &d in divisors {
            l = num_integer::lcm(l, d as u128);
            if l >= self.modulus as u128 {
                return Err(Error::Overflow(format!(
                    "lcm of divisors exceeds modulus {}",
                    self.modulus
                )));
            }
        }
        let signed = x.signed();
        let scaled = signed
            .checked_mul(l as i128)
            .ok_or_else(|| Error::Overflow("lcm premultiply overflow".into()))?;
        if scaled.unsigned_abs() >= self.modulus as u128 / 2 {
            return Err(Error::Overflow(
                "lcm premultiply leaves representable range".into(),
            ));
        }
        let m = self.modulus as i128;
        Ok((
            FieldElement::new(scaled.rem_euclid(m) as u64, self.modulus),
            l,
        ))
    }
}

fn e_mismatch(e: &FieldElement, modulus: u64) -> bool {
    e.modulus() != modulus
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn primality_check() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(17));
        assert!(is_prime_u64(MERSENNE61));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(2u64.pow(61)));
        assert!(!is_prime_u64(3 * 5 * 7));
    }

    #[test]
    fn add_basics() {
        let f = FieldParams::mersenne61();
        assert_eq!(f.element(1).add(&f.element(2)).unwrap(), f.element(3));
        let p = f.modulus();
        assert_eq!(f.element(p - 1).add(&f.element(1)).unwrap(), f.element(0));
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x = f.random_element(&mut rng);
            assert_eq!(x.add(&f.element(0)).unwrap(), x);
        }
    }

    #[test]
    fn mul_inv_neg() {
        let f17 = FieldParams::new(17, "F17").unwrap();
        assert_eq!(
            f17.element(3).mul(&f17.element(5)).unwrap(),
            f17.element(15)
        );
        assert_eq!(FieldElement::zero(17).neg(), FieldElement::zero(17));
        assert!(FieldElement::zero(17).inv().is_err());
        let f = FieldParams::mersenne61();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = f.random_element(&mut rng);
            if x.is_zero() {
                continue;
            }
            assert_eq!(x.mul(&x.inv().unwrap()).unwrap(), f.element(1));
        }
    }

    #[test]
    fn modulus_mixing_rejected() {
        let a = FieldElement::new(1, 17);
        let b = FieldElement::new(1, 31);
        assert!(a.add(&b).is_err());
        assert!(a.mul(&b).is_err());
        assert!(a.sub(&b).is_err());
    }

    #[test]
    fn field_axioms_randomized() {
        let f = FieldParams::mersenne61();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let a = f.random_element(&mut rng);
            let b = f.random_element(&mut rng);
            let c = f.random_element(&mut rng);
            // associativity
            assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            // commutativity
            assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            // distributivity
            assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn codec_direct_values() {
        let codec = FixedPointCodec::default_mersenne61();
        assert_eq!(codec.encode(1.5).unwrap().value(), 1_500_000);
        assert_eq!(
            codec.encode(-2.0).unwrap().value(),
            MERSENNE61 - 2_000_000
        );
    }

    #[test]
    fn codec_round_trip() {
        let codec = FixedPointCodec::default_mersenne61();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(-1000.0..1000.0);
            let back = codec.decode(&codec.encode(x).unwrap()).unwrap();
            assert!((back - x).abs() <= 1e-6, "{x} -> {back}");
        }
        // field-side round trip is exact
        for _ in 0..1000 {
            let v = rng.gen_range(0..2_000_000_000u64);
            let e = FieldElement::new(v, MERSENNE61);
            let re = codec.encode(codec.decode(&e).unwrap()).unwrap();
            assert_eq!(re, e);
        }
    }

    #[test]
    fn codec_monotone_positive() {
        let codec = FixedPointCodec::default_mersenne61();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(0.0..1000.0);
            let y = x + rng.gen_range(0.001..10.0);
            assert!(codec.encode(x).unwrap().value() <= codec.encode(y).unwrap().value());
        }
    }

    #[test]
    fn codec_overflow_is_error() {
        let codec = FixedPointCodec::default_mersenne61();
        assert!(codec.encode(1e18).is_err());
        assert!(codec.encode(f64::INFINITY).is_err());
    }

    #[test]
    fn lcm_premultiply() {
        let codec = FixedPointCodec::new(1, MERSENNE61).unwrap();
        let x = FieldElement::new(7, MERSENNE61);
        let (scaled, mult) = codec.premultiply_lcm(&x, &[1, 2, 3, 4]).unwrap();
        assert_eq!(mult, 12);
        assert_eq!(scaled.value(), 84);
        assert_eq!(scaled.signed() / 3, 28);

        let (same, one) = codec.premultiply_lcm(&x, &[1]).unwrap();
        assert_eq!(one, 1);
        assert_eq!(same, x);

        // iterative pairwise-lcm oracle over 1..=40, checked against the
        // codec's recorded multiplier
        let divisors: Vec<u64> = (1..=40).collect();
        let mut oracle: u128 = 1;
        for &d in &divisors {
            let g = {
                let (mut a, mut b) = (oracle, d as u128);
                while b != 0 {
                    let t = a % b;
                    a = b;
                    b = t;
                }
                a
            };
            oracle = oracle / g * d as u128;
        }
        let one = FieldElement::new(1, MERSENNE61);
        let (_, mult) = codec.premultiply_lcm(&one, &divisors).unwrap();
        assert_eq!(mult, oracle);

        // lcm(1..100) is about 6.97e40 and exceeds the modulus; the codec
        // must refuse rather than wrap.
        let big: Vec<u64> = (1..=100).collect();
        assert!(codec.premultiply_lcm(&x, &big).is_err());
    }

    #[test]
    fn small_modulus_rejected_for_codec() {
        assert!(FixedPointCodec::new(1_000_000, 17).is_err());
    }
}
