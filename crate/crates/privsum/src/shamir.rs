//! Shamir secret sharing: polynomial dealing, Lagrange interpolation at
//! zero with precomputed coefficients, and the degenerate additive-share
//! variant used when the threshold equals the neighborhood size.

use crate::error::{Error, Result};
use crate::field::FieldElement;
use rand::Rng;

/// A sharing polynomial, free coefficient first. The free coefficient is
/// the secret; the remaining coefficients are uniform random.
#[derive(Debug, Clone)]
pub struct SharingPolynomial {
    coeffs: Vec<FieldElement>,
}

impl SharingPolynomial {
    pub fn random<R: Rng + ?Sized>(
        secret: FieldElement,
        threshold_d: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if threshold_d == 0 {
            return Err(Error::Argument("threshold must be at least 1".into()));
        }
        let m = secret.modulus();
        let mut coeffs = vec![secret];
        for _ in 1..threshold_d {
            coeffs.push(FieldElement::new(rng.gen_range(0..m), m));
        }
        Ok(SharingPolynomial { coeffs })
    }

    /// Explicit coefficients, low to high; coeffs[0] is the secret. Used by
    /// exhaustive small-field analyses that must enumerate all polynomials.
    pub fn from_coeffs(coeffs: Vec<FieldElement>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Argument("polynomial needs coefficients".into()));
        }
        Ok(SharingPolynomial { coeffs })
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn secret(&self) -> FieldElement {
        self.coeffs[0]
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        let mut acc = FieldElement::zero(x.modulus());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }
}

/// One share: the polynomial evaluated at a nonzero point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Share {
    pub point: FieldElement,
    pub value: FieldElement,
}

/// A full dealing.
#[derive(Debug, Clone)]
pub struct ShareSet {
    pub shares: Vec<Share>,
    pub threshold_d: usize,
}

/// Precomputed Lagrange coefficients for interpolation at zero over a fixed
/// point set. Depends only on the points, so one vicinity computes it once.
#[derive(Debug, Clone)]
pub struct LagrangeWeights {
    points: Vec<FieldElement>,
    weights: Vec<FieldElement>,
}

impl LagrangeWeights {
    pub fn points(&self) -> &[FieldElement] {
        &self.points
    }

    pub fn weights(&self) -> &[FieldElement] {
        &self.weights
    }
}

fn check_points(points: &[FieldElement]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if p.is_zero() {
            return Err(Error::Argument(
                "evaluation point zero is reserved for the secret".into(),
            ));
        }
        for q in &points[..i] {
            if p == q {
                return Err(Error::Argument(format!("repeated evaluation point {p}")));
            }
            if p.modulus() != q.modulus() {
                return Err(Error::Config("mixed moduli in point set".into()));
            }
        }
    }
    Ok(())
}

/// Deal shares of `secret` with the given threshold at the given points.
pub fn deal<R: Rng + ?Sized>(
    secret: FieldElement,
    threshold_d: usize,
    points: &[FieldElement],
    rng: &mut R,
) -> Result<ShareSet> {
    if points.len() < threshold_d {
        return Err(Error::Argument(format!(
            "need at least {} points, got {}",
            threshold_d,
            points.len()
        )));
    }
    check_points(points)?;
    let poly = SharingPolynomial::random(secret, threshold_d, rng)?;
    let shares = points
        .iter()
        .map(|p| {
            Ok(Share {
                point: *p,
                value: poly.eval(p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShareSet {
        shares,
        threshold_d,
    })
}

/// Precompute the Lagrange coefficients for interpolation at zero.
pub fn precompute_lagrange(points: &[FieldElement]) -> Result<LagrangeWeights> {
    if points.is_empty() {
        return Err(Error::Argument("empty point set".into()));
    }
    check_points(points)?;
    let mut weights = Vec::with_capacity(points.len());
    for (j, xj) in points.iter().enumerate() {
        let mut num = FieldElement::one(xj.modulus());
        let mut den = FieldElement::one(xj.modulus());
        for (k, xk) in points.iter().enumerate() {
            if k == j {
                continue;
            }
            num = num.mul(xk)?;
            den = den.mul(&xk.sub(xj)?)?;
        }
        weights.push(num.mul(&den.inv()?)?);
    }
    Ok(LagrangeWeights {
        points: points.to_vec(),
        weights,
    })
}

/// Recover the free coefficient as the weighted sum of share values.
pub fn interpolate_at_zero(shares: &[Share], weights: &LagrangeWeights) -> Result<FieldElement> {
    if shares.len() != weights.points.len() {
        return Err(Error::Argument(format!(
            "share count {} does not match weight count {}",
            shares.len(),
            weights.points.len()
        )));
    }
    let m = weights.points[0].modulus();
    let mut acc = FieldElement::zero(m);
    for (share, (point, w)) in shares
        .iter()
        .zip(weights.points.iter().zip(weights.weights.iter()))
    {
        if share.point != *point {
            return Err(Error::Argument(format!(
                "share point {} does not match weight point {}",
                share.point, point
            )));
        }
        acc = acc.add(&w.mul(&share.value)?)?;
    }
    Ok(acc)
}

/// Convenience: interpolate an arbitrary d-subset of a dealing.
pub fn reconstruct(shares: &[Share]) -> Result<FieldElement> {
    let points: Vec<FieldElement> = shares.iter().map(|s| s.point).collect();
    interpolate_at_zero(shares, &precompute_lagrange(&points)?)
}

/// Additive sharing: n values whose sum is the secret. The degenerate case
/// of dealing with threshold equal to the neighborhood size; no redundancy,
/// every summand is required for recovery.
pub fn deal_additive<R: Rng + ?Sized>(
    secret: FieldElement,
    n: usize,
    rng: &mut R,
) -> Result<Vec<FieldElement>> {
    if n == 0 {
        return Err(Error::Argument("cannot split into zero parts".into()));
    }
    let m = secret.modulus();
    let mut parts = Vec::with_capacity(n);
    let mut running = FieldElement::zero(m);
    for _ in 0..n - 1 {
        let v = FieldElement::new(rng.gen_range(0..m), m);
        running = running.add(&v)?;
        parts.push(v);
    }
    parts.push(secret.sub(&running)?);
    Ok(parts)
}
