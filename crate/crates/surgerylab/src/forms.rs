//! Exact linear algebra for symmetric integer bilinear forms: signatures by
//! simultaneous row/column reduction over the rationals, determinants,
//! Smith normal form and discriminant groups.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A symmetric integer matrix; symmetry is enforced on construction.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct GramMatrix {
    entries: Vec<Vec<BigInt>>,
}

impl GramMatrix {
    pub fn new(entries: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has length {} in a {n}x{n} matrix",
                    row.len()
                )));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        Ok(GramMatrix { entries })
    }

    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![vec![BigInt::zero(); n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = BigInt::one();
        }
        GramMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Vec<BigInt>> {
        self.entries
    }

    /// Congruence transform U^T G U for an arbitrary integer matrix U
    /// (columns express the new basis in the old one).
    pub fn congruence(&self, u: &[Vec<BigInt>]) -> Result<Self> {
        let n = self.dim();
        if u.len() != n || u.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("congruence matrix shape".into()));
        }
        // gu = G * U
        let mut gu = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for k in 0..n {
                    s += &self.entries[i][k] * &u[k][j];
                }
                gu[i][j] = s;
            }
        }
        let mut out = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for k in 0..n {
                    s += &u[k][i] * &gu[k][j];
                }
                out[i][j] = s;
            }
        }
        GramMatrix::new(out)
    }
}

impl TryFrom<Vec<Vec<i64>>> for GramMatrix {
    type Error = Error;
    fn try_from(v: Vec<Vec<i64>>) -> Result<Self> {
        GramMatrix::new(
            v.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        )
    }
}

impl From<GramMatrix> for Vec<Vec<i64>> {
    fn from(g: GramMatrix) -> Self {
        g.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| i64::try_from(x).expect("entry fits i64"))
                    .collect()
            })
            .collect()
    }
}

/// Eigenvalue sign counts of a symmetric form.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SignatureTriple {
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
}

impl SignatureTriple {
    pub fn signature(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    pub fn is_positive_definite(&self) -> bool {
        self.n_zero == 0 && self.n_minus == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.n_zero == 0 && self.n_plus == 0
    }
}

/// Invariant factors d1 | d2 | ..., with zeros only at the end.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SmithForm {
    pub invariant_factors: Vec<BigInt>,
}

impl SmithForm {
    /// Factors > 1 (the cyclic orders of the torsion presentation).
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_one() && !d.is_zero())
            .cloned()
            .collect()
    }

    pub fn is_trivial_group(&self) -> bool {
        self.nontrivial_factors().is_empty()
            && self.invariant_factors.iter().all(|d| !d.is_zero())
    }
}

/// Exact signature by simultaneous row/column pivoting over the rationals.
///
/// A zero diagonal entry with a nonzero off-diagonal partner is split off as
/// a hyperbolic pair contributing (1,0,1).
pub fn signature(g: &GramMatrix) -> SignatureTriple {
    let n = g.dim();
    let mut m: Vec<Vec<BigRational>> = g
        .entries
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut sig = SignatureTriple {
        n_plus: 0,
        n_zero: 0,
        n_minus: 0,
    };
    while !alive.is_empty() {
        // diagonal pivot if available
        if let Some(pos) = alive.iter().position(|&k| !m[k][k].is_zero()) {
            let k = alive[pos];
            let pivot = m[k][k].clone();
            if pivot.is_positive() {
                sig.n_plus += 1;
            } else {
                sig.n_minus += 1;
            }
            alive.remove(pos);
            let coeffs: Vec<(usize, BigRational)> = alive
                .iter()
                .map(|&i| (i, &m[i][k] / &pivot))
                .collect();
            for &(i, ref ci) in &coeffs {
                for &(j, ref cj) in &coeffs {
                    let delta = ci * cj * &pivot;
                    m[i][j] -= delta;
                }
            }
            continue;
        }
        // all diagonal entries zero: look for a hyperbolic pair
        let mut pair = None;
        'outer: for (a, &i) in alive.iter().enumerate() {
            for &j in &alive[a + 1..] {
                if !m[i][j].is_zero() {
                    pair = Some((i, j));
                    break 'outer;
                }
            }
        }
        match pair {
            None => {
                sig.n_zero += alive.len();
                break;
            }
            Some((i, j)) => {
                let b = m[i][j].clone();
                sig.n_plus += 1;
                sig.n_minus += 1;
                alive.retain(|&k| k != i && k != j);
                // v_k' = v_k - (m[k][j]/b) v_i - (m[k][i]/b) v_j
                let coeffs: Vec<(usize, BigRational, BigRational)> = alive
                    .iter()
                    .map(|&k| (k, &m[k][j] / &b, &m[k][i] / &b))
                    .collect();
                for &(k, ref ak, ref bk) in &coeffs {
                    for &(l, ref al, ref bl) in &coeffs {
                        let delta = ak * &m[i][l] + bk * &m[j][l] + al * &m[k][i]
                            + bl * &m[k][j]
                            - (ak * bl + bk * al) * &b;
                        m[k][l] -= delta;
                    }
                }
                // zero out the cleared cross entries for the removed pair
                for &(k, _, _) in &coeffs {
                    m[k][i] = BigRational::zero();
                    m[k][j] = BigRational::zero();
                    m[i][k] = BigRational::zero();
                    m[j][k] = BigRational::zero();
                }
            }
        }
    }
    debug_assert_eq!(sig.n_plus + sig.n_zero + sig.n_minus, n);
    sig
}

/// Signature of the tridiagonal chain form with diagonal `a` and off-diagonal
/// ones, by the counting formula #{a_i > 0} - #{a_i < 0}.
///
/// Requires a_1 >= 1, |a_i| >= 2 in the interior, and |a_n| >= 2 or a_n = -1;
/// the formula is not claimed outside that range.
pub fn tridiagonal_signature(a: &[i64]) -> Result<i64> {
    if !tridiagonal_preconditions(a) {
        return Err(Error::InvalidArgument(format!(
            "sequence {a:?} outside the validated coefficient range"
        )));
    }
    Ok(a.iter().filter(|&&x| x > 0).count() as i64 - a.iter().filter(|&&x| x < 0).count() as i64)
}

/// The coefficient range on which the counting formula is validated.
pub fn tridiagonal_preconditions(a: &[i64]) -> bool {
    let n = a.len();
    if n == 0 {
        return false;
    }
    let first_ok = a[0] >= 1;
    let interior_ok = n <= 2 || a[1..n - 1].iter().all(|&x| x.abs() >= 2);
    let last = a[n - 1];
    let last_ok = last.abs() >= 2 || last == -1;
    first_ok && interior_ok && last_ok
}

/// Exact determinant by rational elimination with partial pivoting.
pub fn determinant(g: &GramMatrix) -> BigInt {
    determinant_of(g.entries())
}

pub(crate) fn determinant_of(entries: &[Vec<BigInt>]) -> BigInt {
    let n = entries.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigRational>> = entries
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot_row = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(r) => r,
            None => return BigInt::zero(),
        };
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pivot;
            for c in col..n {
                let delta = &f * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    debug_assert!(det.is_integer());
    det.to_integer()
}

/// Smith normal form invariant factors of an arbitrary integer matrix,
/// nonnegative with the divisibility chain d1 | d2 | ... and zeros at the end.
pub fn smith_invariants(matrix: &[Vec<BigInt>]) -> SmithForm {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, |r| r.len());
    let rank_bound = rows.min(cols);
    let mut m = matrix.to_vec();
    let mut factors: Vec<BigInt> = Vec::with_capacity(rank_bound);

    let mut t = 0;
    while t < rank_bound {
        // find entry of minimal nonzero absolute value in the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero()
                    && pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        // clear row and column t by Euclidean steps
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = num::Integer::div_floor(&m[i][t], &m[t][t]);
                for j in t..cols {
                    let delta = &q * &m[t][j];
                    m[i][j] -= delta;
                }
                if !m[i][t].is_zero() {
                    m.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = num::Integer::div_floor(&m[t][j], &m[t][t]);
                for row in m.iter_mut().take(rows).skip(t) {
                    let delta = &q * &row[t];
                    row[j] -= delta;
                }
                if !m[t][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
        }
        // pivot must divide the rest of the block; if not, fold the offending
        // row in and redo this step
        let mut offender = None;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&m[i][j] % &m[t][t]).is_zero() {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            for j in t..cols {
                let add = m[i][j].clone();
                m[t][j] += add;
            }
            continue;
        }
        factors.push(m[t][t].abs());
        t += 1;
    }
    while factors.len() < rank_bound {
        factors.push(BigInt::zero());
    }
    SmithForm {
        invariant_factors: factors,
    }
}

/// The finite abelian group presented by a nondegenerate symmetric form,
/// as Smith invariant factors; their product equals |det|.
pub fn discriminant_group(g: &GramMatrix) -> Result<SmithForm> {
    let det = determinant(g);
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let smith = smith_invariants(g.entries());
    debug_assert_eq!(
        smith
            .invariant_factors
            .iter()
            .product::<BigInt>(),
        det.abs()
    );
    Ok(smith)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(rows: &[&[i64]]) -> GramMatrix {
        GramMatrix::from_rows(rows).unwrap()
    }

    fn sig(rows: &[&[i64]]) -> (usize, usize, usize) {
        let s = signature(&gram(rows));
        (s.n_plus, s.n_zero, s.n_minus)
    }

    #[test]
    fn symmetry_enforced() {
        assert!(GramMatrix::from_rows(&[&[1, 2], &[3, 4]]).is_err());
    }

    #[test]
    fn signature_examples() {
        assert_eq!(sig(&[&[2, 1], &[1, 2]]), (2, 0, 0));
        assert_eq!(sig(&[&[0]]), (0, 1, 0));
        assert_eq!(sig(&[&[1, 1, 0], &[1, -2, 1], &[0, 1, -2]]), (1, 0, 2));
    }

    #[test]
    fn signature_hyperbolic_pair() {
        assert_eq!(sig(&[&[0, 1], &[1, 0]]), (1, 0, 1));
        assert_eq!(sig(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]), (1, 0, 2));
        assert_eq!(sig(&[&[0, 0], &[0, 0]]), (0, 2, 0));
        // zero diagonal pair plus a spectator vector coupled to both
        assert_eq!(sig(&[&[0, 2, 1], &[2, 0, 1], &[1, 1, 3]]), (2, 0, 1));
    }

    #[test]
    fn tridiagonal_examples() {
        assert_eq!(tridiagonal_signature(&[2, 2, 2]).unwrap(), 3);
        assert_eq!(tridiagonal_signature(&[1, -2, -2]).unwrap(), -1);
        assert_eq!(tridiagonal_signature(&[3, -1]).unwrap(), 0);
        assert!(tridiagonal_signature(&[0, 2]).is_err());
        assert!(tridiagonal_signature(&[2, 1, 2]).is_err());
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&GramMatrix::identity(4)), BigInt::from(1));
        assert_eq!(
            determinant(&gram(&[&[2, 1], &[1, 2]])),
            BigInt::from(3)
        );
        assert_eq!(determinant(&gram(&[&[1, 1], &[1, 1]])), BigInt::from(0));
        assert_eq!(determinant(&GramMatrix::new(vec![]).unwrap()), BigInt::from(1));
    }

    #[test]
    fn smith_examples() {
        let m: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(4)],
        ];
        assert_eq!(
            smith_invariants(&m).invariant_factors,
            vec![BigInt::from(2), BigInt::from(4)]
        );
        let z: Vec<Vec<BigInt>> = vec![vec![BigInt::from(0)]];
        assert_eq!(smith_invariants(&z).invariant_factors, vec![BigInt::from(0)]);
        // a matrix needing the divisibility fixup: diag(2,3) has SNF (1,6)
        let m: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(3)],
        ];
        assert_eq!(
            smith_invariants(&m).invariant_factors,
            vec![BigInt::from(1), BigInt::from(6)]
        );
    }

    #[test]
    fn discriminant_group_examples() {
        let g = gram(&[&[2, 1], &[1, 2]]);
        assert_eq!(
            discriminant_group(&g).unwrap().nontrivial_factors(),
            vec![BigInt::from(3)]
        );
        assert!(discriminant_group(&GramMatrix::identity(3))
            .unwrap()
            .is_trivial_group());
        assert!(discriminant_group(&gram(&[&[1, 1], &[1, 1]])).is_err());
    }

    #[test]
    fn smith_divisibility_chain_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let r = rng.gen_range(1..=4);
            let c = rng.gen_range(1..=4);
            let m: Vec<Vec<BigInt>> = (0..r)
                .map(|_| (0..c).map(|_| BigInt::from(rng.gen_range(-6..=6))).collect())
                .collect();
            let s = smith_invariants(&m);
            let f = &s.invariant_factors;
            assert_eq!(f.len(), r.min(c));
            for w in f.windows(2) {
                if w[1].is_zero() {
                    continue;
                }
                assert!(!w[0].is_zero(), "zero before nonzero in {f:?}");
                assert!((&w[1] % &w[0]).is_zero(), "chain broken in {f:?}");
            }
        }
    }
}
