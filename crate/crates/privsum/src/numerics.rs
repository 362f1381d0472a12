//! Jacobi iteration expressed as per-round weighted sums, plus the
//! collaborative-filtering construction: preconditioning, the augmented
//! symmetric system, and the normal-equations reference path.
//!
//! One Jacobi step at row i is `x_i = (b_i - sum_{j != i} a_ij x_j) / a_ii`
//! — exactly one weighted-sum collection per node per round, which is what
//! lets every protection scheme carry the solver unchanged.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Sparse square system Ax = b stored by row; every diagonal entry must be
/// nonzero.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    n: usize,
    /// Off-diagonal nonzeros per row.
    rows: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
    b: Vec<f64>,
}

impl SparseSystem {
    /// Build from (row, col, value) triples, 0-indexed. Duplicate entries
    /// accumulate.
    pub fn from_triples(n: usize, triples: &[(usize, usize, f64)], b: Vec<f64>) -> Result<Self> {
        if b.len() != n {
            return Err(Error::Config(format!(
                "rhs length {} does not match dimension {n}",
                b.len()
            )));
        }
        let mut diag = vec![0.0; n];
        let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for &(i, j, v) in triples {
            if i >= n || j >= n {
                return Err(Error::Config(format!("entry ({i}, {j}) out of range")));
            }
            if i == j {
                diag[i] += v;
            } else {
                *maps[i].entry(j).or_insert(0.0) += v;
            }
        }
        for (i, &d) in diag.iter().enumerate() {
            if d == 0.0 {
                return Err(Error::Config(format!("zero diagonal at row {i}")));
            }
        }
        let rows = maps
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        Ok(SparseSystem { n, rows, diag, b })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn off_diagonal(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Scale every row (and its rhs entry) by 1/a_ii, giving a unit
    /// diagonal without moving the solution.
    pub fn precondition(&self) -> SparseSystem {
        let mut out = self.clone();
        for i in 0..self.n {
            let d = self.diag[i];
            for entry in &mut out.rows[i] {
                entry.1 /= d;
            }
            out.b[i] /= d;
            out.diag[i] = 1.0;
        }
        out
    }

    pub fn residual_inf(&self, x: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| {
                let mut r = self.diag[i] * x[i] - self.b[i];
                for &(j, a) in &self.rows[i] {
                    r += a * x[j];
                }
                r.abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for i in 0..self.n {
            a[i][i] = self.diag[i];
            for &(j, v) in &self.rows[i] {
                a[i][j] = v;
            }
        }
        (a, self.b.clone())
    }
}

/// One Jacobi iterate and its bookkeeping.
#[derive(Debug, Clone)]
pub struct JacobiState {
    pub x: Vec<f64>,
    pub round: usize,
    pub residual: f64,
}

impl JacobiState {
    pub fn start(system: &SparseSystem, x0: Vec<f64>) -> Result<Self> {
        if x0.len() != system.dimension() {
            return Err(Error::Argument("initial guess has wrong length".into()));
        }
        let residual = system.residual_inf(&x0);
        Ok(JacobiState {
            x: x0,
            round: 0,
            residual,
        })
    }
}

/// One synchronous Jacobi step: every row update uses only the previous
/// iterate.
pub fn jacobi_step(state: &JacobiState, system: &SparseSystem) -> JacobiState {
    let n = system.dimension();
    let mut next = vec![0.0; n];
    for i in 0..n {
        let mut acc = system.b[i];
        for &(j, a) in &system.rows[i] {
            acc -= a * state.x[j];
        }
        next[i] = acc / system.diag[i];
    }
    let residual = system.residual_inf(&next);
    JacobiState {
        x: next,
        round: state.round + 1,
        residual,
    }
}

/// Iterate until successive iterates differ by less than `tol` in the max
/// norm, or the round cap is reached. Returns the final state and whether
/// the tolerance was met.
pub fn jacobi_solve(
    system: &SparseSystem,
    x0: Vec<f64>,
    tol: f64,
    max_rounds: usize,
) -> Result<(JacobiState, bool)> {
    let mut state = JacobiState::start(system, x0)?;
    for _ in 0..max_rounds {
        let next = jacobi_step(&state, system);
        let delta = state
            .x
            .iter()
            .zip(&next.x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        state = next;
        if delta < tol {
            return Ok((state, true));
        }
    }
    Ok((state, false))
}

/// Power-iteration estimate of the spectral radius of the Jacobi iteration
/// matrix I - D^{-1}A. Convergence is guaranteed when this is below one;
/// the bound is sufficient, not necessary, so the estimate is advisory.
pub fn spectral_radius_check(system: &SparseSystem, iterations: usize) -> f64 {
    let n = system.dimension();
    if n == 0 {
        return 0.0;
    }
    // deterministic, non-degenerate start vector, normalized
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.7).sin()).collect();
    let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm0);
    // the step ratios oscillate when leading eigenvalues pair up as +-r,
    // so the growth rate is read off as the geometric mean of the ratios
    let mut log_sum = 0.0;
    for round in 0..iterations {
        // w = (I - D^{-1} A) v, with the diagonal of A cancelling the identity
        let mut w = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for &(j, a) in &system.rows[i] {
                acc += a * v[j];
            }
            w[i] = -acc / system.diag[i];
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        log_sum += norm.ln();
        if round + 1 == iterations {
            return (log_sum / iterations as f64).exp();
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    0.0
}

/// Sparse user-item ratings matrix, m users by n items.
#[derive(Debug, Clone)]
pub struct RatingsMatrix {
    pub users: usize,
    pub items: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl RatingsMatrix {
    pub fn new(users: usize, items: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(u, v, _) in &entries {
            if u >= users || v >= items {
                return Err(Error::Config(format!("rating ({u}, {v}) out of range")));
            }
        }
        Ok(RatingsMatrix {
            users,
            items,
            entries,
        })
    }
}

/// Build the symmetric augmented system
/// `[[I_m, R^T], [R, eps*I_n]] (u, z) = (0, b)`.
///
/// Eliminating the auxiliary block at eps = 0 gives exactly the normal
/// equations R^T R u = R^T b, so the first m entries of the solution
/// approach the least-squares weights as eps shrinks; the regularization
/// exists only to satisfy the solver's nonzero-diagonal requirement and
/// perturbs the solution by O(eps).
pub fn build_augmented(r: &RatingsMatrix, b: &[f64], eps: f64) -> Result<SparseSystem> {
    if eps < 0.0 {
        return Err(Error::Argument("regularization must be non-negative".into()));
    }
    if eps == 0.0 {
        return Err(Error::Config(
            "zero regularization leaves a zero diagonal block".into(),
        ));
    }
    if b.len() != r.items {
        return Err(Error::Config(format!(
            "rhs length {} does not match item count {}",
            b.len(),
            r.items
        )));
    }
    let m = r.users;
    let n = r.items;
    let mut triples = Vec::with_capacity(2 * r.entries.len() + m + n);
    for i in 0..m {
        triples.push((i, i, 1.0));
    }
    for i in 0..n {
        triples.push((m + i, m + i, eps));
    }
    for &(u, v, value) in &r.entries {
        triples.push((u, m + v, value)); // R^T block
        triples.push((m + v, u, value)); // R block
    }
    let mut rhs = vec![0.0; m + n];
    rhs[m..].copy_from_slice(b);
    SparseSystem::from_triples(m + n, &triples, rhs)
}

/// Dense Gaussian elimination with partial pivoting; the reference path
/// that iterative results are judged against.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Argument("matrix shape mismatch".into()));
    }
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].abs().partial_cmp(&m[y][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col].abs() < 1e-14 {
            return Err(Error::Domain("singular matrix".into()));
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = m[i][n];
        for j in i + 1..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    Ok(x)
}

/// Least-squares weights through the normal equations R^T R w = R^T b;
/// the desk-scale oracle for the augmented path.
pub fn normal_equations_solve(r: &RatingsMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let m = r.users;
    let mut rtr = vec![vec![0.0; m]; m];
    let mut rtb = vec![0.0; m];
    // dense accumulate via the sparse entries: (R^T R)_{uv} = sum_i R_iu R_iv
    // with our orientation R being n x m (items by users)
    let mut by_item: Vec<Vec<(usize, f64)>> = vec![Vec::new(); r.items];
    for &(u, v, value) in &r.entries {
        by_item[v].push((u, value));
    }
    for (item, row) in by_item.iter().enumerate() {
        for &(u, vu) in row {
            rtb[u] += vu * b[item];
            for &(w, vw) in row {
                rtr[u][w] += vu * vw;
            }
        }
    }
    dense_solve(&rtr, &rtb)
}

/// Parse a sparse system: header "n nnz", then nnz lines "i j value"
/// (1-indexed), then n rhs values one per line.
pub fn parse_system(text: &str) -> Result<SparseSystem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(no, l)| (no + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 0,
            msg: "empty input".into(),
        })?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let (n, nnz) = match parts.as_slice() {
        [n, nnz] => (
            n.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad dimension {n}"),
            })?,
            nnz.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad nonzero count {nnz}"),
            })?,
        ),
        _ => {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected header \"n nnz\"".into(),
            })
        }
    };
    let mut triples = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let (line_no, line) = lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing matrix entries".into(),
        })?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            [i, j, v] => {
                let i = i.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad row index {i}"),
                })?;
                let j = j.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad column index {j}"),
                })?;
                let v = v.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad value {v}"),
                })?;
                if i == 0 || j == 0 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "indices are 1-based".into(),
                    });
                }
                triples.push((i - 1, j - 1, v));
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected \"i j value\"".into(),
                })
            }
        }
    }
    let mut b = Vec::with_capacity(n);
    for _ in 0..n {
        let (line_no, line) = lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing rhs values".into(),
        })?;
        b.push(line.parse::<f64>().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad rhs value {line}"),
        })?);
    }
    SparseSystem::from_triples(n, &triples, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn two_by_two() -> SparseSystem {
        SparseSystem::from_triples(
            2,
            &[(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)],
            vec![1.0, 2.0],
        )
        .unwrap()
    }

    #[test]
    fn identity_converges_in_one_step() {
        let sys = SparseSystem::from_triples(
            3,
            &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)],
            vec![3.0, -1.0, 0.5],
        )
        .unwrap();
        let state = JacobiState::start(&sys, vec![9.0, 9.0, 9.0]).unwrap();
        let next = jacobi_step(&state, &sys);
        assert_eq!(next.x, vec![3.0, -1.0, 0.5]);
        assert_eq!(next.round, 1);
        assert!(next.residual < 1e-15);
    }

    #[test]
    fn zero_diagonal_rejected() {
        assert!(SparseSystem::from_triples(2, &[(0, 0, 1.0), (0, 1, 5.0)], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn two_by_two_fixed_point() {
        let sys = two_by_two();
        let (state, converged) = jacobi_solve(&sys, vec![0.0, 0.0], 1e-12, 200).unwrap();
        assert!(converged);
        assert!((state.x[0] - 1.0 / 11.0).abs() < 1e-9);
        assert!((state.x[1] - 7.0 / 11.0).abs() < 1e-9);
        // fixed points solve the system
        assert!(sys.residual_inf(&state.x) < 1e-9);
    }

    #[test]
    fn dominant_system_monotone_residual() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let n = 50;
        let mut triples = Vec::new();
        for i in 0..n {
            let mut off_sum = 0.0;
            for j in 0..n {
                if i != j && rng.gen_bool(0.1) {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    off_sum += v.abs();
                    triples.push((i, j, v));
                }
            }
            triples.push((i, i, off_sum + rng.gen_range(0.5..2.0)));
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let sys = SparseSystem::from_triples(n, &triples, b).unwrap();
        assert!(spectral_radius_check(&sys, 200) < 1.0);
        let mut state = JacobiState::start(&sys, vec![0.0; n]).unwrap();
        let mut last = f64::INFINITY;
        for _ in 0..30 {
            state = jacobi_step(&state, &sys);
            assert!(state.residual <= last * (1.0 + 1e-12));
            last = state.residual;
        }
    }

    #[test]
    fn spectral_radius_estimates() {
        let sys = SparseSystem::from_triples(2, &[(0, 0, 1.0), (1, 1, 1.0)], vec![0.0, 0.0]).unwrap();
        assert_eq!(spectral_radius_check(&sys, 50), 0.0);
        // closed form for [[4,1],[1,3]]: eigenvalues of the iteration
        // matrix are +-sqrt(1/12)
        let rho = spectral_radius_check(&two_by_two(), 500);
        assert!((rho - (1.0f64 / 12.0).sqrt()).abs() < 1e-3, "estimate {rho}");
        // constructed divergent system
        let bad = SparseSystem::from_triples(
            2,
            &[(0, 0, 1.0), (0, 1, 3.0), (1, 0, 3.0), (1, 1, 1.0)],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(spectral_radius_check(&bad, 200) > 1.0);
    }

    #[test]
    fn preconditioning_preserves_solutions() {
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        for _ in 0..20 {
            let n = rng.gen_range(2..8);
            let mut triples = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        triples.push((i, j, rng.gen_range(2.0..9.0)));
                    } else if rng.gen_bool(0.4) {
                        triples.push((i, j, rng.gen_range(-1.0..1.0)));
                    }
                }
            }
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let sys = SparseSystem::from_triples(n, &triples, b).unwrap();
            let pre = sys.precondition();
            for i in 0..n {
                assert_eq!(pre.diagonal(i), 1.0);
            }
            let (a1, b1) = sys.to_dense();
            let (a2, b2) = pre.to_dense();
            let x1 = dense_solve(&a1, &b1).unwrap();
            let x2 = dense_solve(&a2, &b2).unwrap();
            for (u, v) in x1.iter().zip(&x2) {
                assert!((u - v).abs() < 1e-9);
            }
        }
        // already unit-diagonal systems come back unchanged, and scaling a
        // row first makes no difference
        let unit =
            SparseSystem::from_triples(2, &[(0, 0, 1.0), (1, 1, 1.0), (0, 1, 0.5)], vec![1.0, 2.0])
                .unwrap();
        let again = unit.precondition();
        assert_eq!(again.to_dense(), unit.to_dense());
        let scaled =
            SparseSystem::from_triples(2, &[(0, 0, 5.0), (1, 1, 1.0), (0, 1, 2.5)], vec![5.0, 2.0])
                .unwrap();
        assert_eq!(scaled.precondition().to_dense(), unit.to_dense());
    }

    #[test]
    fn augmented_scalar_matches_normal_equations() {
        let r = RatingsMatrix::new(1, 1, vec![(0, 0, 2.0)]).unwrap();
        let b = [3.0];
        let sys = build_augmented(&r, &b, 1e-9).unwrap();
        let (a, rhs) = sys.to_dense();
        let sol = dense_solve(&a, &rhs).unwrap();
        // w = beta / r
        assert!((sol[0] - 1.5).abs() < 1e-6);
        let oracle = normal_equations_solve(&r, &b).unwrap();
        assert!((oracle[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn augmented_converges_to_least_squares() {
        // 3 items rating 2 users, overdetermined
        let r = RatingsMatrix::new(
            2,
            3,
            vec![
                (0, 0, 1.0),
                (1, 0, 2.0),
                (0, 1, 3.0),
                (1, 1, 1.0),
                (0, 2, 1.0),
            ],
        )
        .unwrap();
        let b = [1.0, 2.0, 0.5];
        let oracle = normal_equations_solve(&r, &b).unwrap();
        let sys = build_augmented(&r, &b, 1e-6).unwrap();
        let (a, rhs) = sys.to_dense();
        let sol = dense_solve(&a, &rhs).unwrap();
        for (got, want) in sol[..2].iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-4, "{got} vs {want}");
        }
        // zero rhs gives zero weights
        let zero = [0.0; 3];
        let sys = build_augmented(&r, &zero, 1e-6).unwrap();
        let (a, rhs) = sys.to_dense();
        let sol = dense_solve(&a, &rhs).unwrap();
        assert!(sol.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let text = "# comment\n2 4\n1 1 4\n1 2 1\n2 1 1\n2 2 3\n1\n2\n";
        let sys = parse_system(text).unwrap();
        assert_eq!(sys.to_dense(), two_by_two().to_dense());
        assert!(parse_system("").is_err());
        assert!(parse_system("2 1\n0 1 4\n1\n2\n").is_err());
        assert!(parse_system("2 1\n1 1 x\n1\n2\n").is_err());
        assert!(parse_system("2 1\n1 1 4\n1\n").is_err());
    }
}
