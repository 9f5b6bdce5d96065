//! Linking-matrix calculus for framed links: blow-ups, blow-downs and a
//! deterministic reduction search.
//!
//! Diagrams are modeled only by their linking matrices (diagonal = framings,
//! off-diagonal = pairwise linking numbers); every verification downstream
//! factors through signatures, determinants and blow-downs of this matrix.

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{determinant_of, GramMatrix};

/// Symmetric integer matrix of a framed link; dimension 0 is the empty link.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct FramedLinkMatrix {
    entries: Vec<Vec<BigInt>>,
}

impl FramedLinkMatrix {
    pub fn new(entries: Vec<Vec<BigInt>>) -> Result<Self> {
        // reuse the symmetry checks
        let g = GramMatrix::new(entries)?;
        Ok(FramedLinkMatrix {
            entries: g.into_entries(),
        })
    }

    pub fn empty() -> Self {
        FramedLinkMatrix { entries: vec![] }
    }

    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        Ok(FramedLinkMatrix {
            entries: GramMatrix::from_rows(rows)?.into_entries(),
        })
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

    pub fn gram(&self) -> GramMatrix {
        GramMatrix::new(self.entries.clone()).expect("already symmetric")
    }

    pub fn det(&self) -> BigInt {
        determinant_of(&self.entries)
    }

    /// Orientation reversal: every framing and linking number flips sign.
    pub fn negated(&self) -> Self {
        FramedLinkMatrix {
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|x| -x).collect())
                .collect(),
        }
    }

    /// Number of other components this one links.
    pub fn degree(&self, k: usize) -> usize {
        (0..self.dim())
            .filter(|&j| j != k && !self.entries[k][j].is_zero())
            .count()
    }

    /// Block sum with another framed link (no linking between the parts).
    pub fn direct_sum(&self, other: &FramedLinkMatrix) -> Self {
        let n = self.dim();
        let m = other.dim();
        let mut entries = vec![vec![BigInt::zero(); n + m]; n + m];
        for i in 0..n {
            entries[i][..n].clone_from_slice(&self.entries[i]);
        }
        for i in 0..m {
            for j in 0..m {
                entries[n + i][n + j] = other.entries[i][j].clone();
            }
        }
        FramedLinkMatrix { entries }
    }
}

impl TryFrom<Vec<Vec<i64>>> for FramedLinkMatrix {
    type Error = Error;
    fn try_from(v: Vec<Vec<i64>>) -> Result<Self> {
        Ok(FramedLinkMatrix {
            entries: GramMatrix::try_from(v)?.into_entries(),
        })
    }
}

impl From<FramedLinkMatrix> for Vec<Vec<i64>> {
    fn from(m: FramedLinkMatrix) -> Self {
        GramMatrix::new(m.entries).expect("symmetric").into()
    }
}

/// Removes a (+1)- or (-1)-framed component, twisting everything that links
/// it: M'[i,j] = M[i,j] - e * M[i,k] * M[j,k]. |det| is preserved and the
/// signature loses exactly one eigenvalue of sign e.
pub fn blow_down(m: &FramedLinkMatrix, k: usize) -> Result<FramedLinkMatrix> {
    let n = m.dim();
    if k >= n {
        return Err(Error::IndexOutOfRange(k, n));
    }
    let eps = m.entry(k, k);
    if !eps.abs().is_one() {
        return Err(Error::NotUnitFraming(k));
    }
    let keep: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    let entries = keep
        .iter()
        .map(|&i| {
            keep.iter()
                .map(|&j| m.entry(i, j) - eps * m.entry(i, k) * m.entry(j, k))
                .collect()
        })
        .collect();
    Ok(FramedLinkMatrix { entries })
}

/// Appends a (+1)- or (-1)-framed component with the given linking numbers,
/// twisting the existing matrix so that blowing the new component back down
/// returns the original.
pub fn blow_up(m: &FramedLinkMatrix, sign: i64, links: &[BigInt]) -> Result<FramedLinkMatrix> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument(format!("sign must be +1 or -1, got {sign}")));
    }
    let n = m.dim();
    if links.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} linking numbers, got {}",
            links.len()
        )));
    }
    let eps = BigInt::from(sign);
    let mut entries: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| m.entry(i, j) + &eps * &links[i] * &links[j])
                .collect()
        })
        .collect();
    for (i, row) in entries.iter_mut().enumerate() {
        row.push(links[i].clone());
    }
    let mut last: Vec<BigInt> = links.to_vec();
    last.push(eps);
    entries.push(last);
    Ok(FramedLinkMatrix { entries })
}

/// Appends a component with the given framing and linking numbers, leaving
/// the existing entries untouched (a new handle, not a blow-up).
pub fn append_vertex(m: &FramedLinkMatrix, framing: i64, links: &[BigInt]) -> Result<FramedLinkMatrix> {
    let n = m.dim();
    if links.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} linking numbers, got {}",
            links.len()
        )));
    }
    let mut entries = m.entries.clone();
    for (i, row) in entries.iter_mut().enumerate() {
        row.push(links[i].clone());
    }
    let mut last: Vec<BigInt> = links.to_vec();
    last.push(BigInt::from(framing));
    entries.push(last);
    Ok(FramedLinkMatrix { entries })
}

/// Tridiagonal chain: diagonal = weights, super/subdiagonal = 1.
pub fn chain_matrix(weights: &[i64]) -> FramedLinkMatrix {
    let n = weights.len();
    let mut entries = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        entries[i][i] = BigInt::from(weights[i]);
        if i + 1 < n {
            entries[i][i + 1] = BigInt::one();
            entries[i + 1][i] = BigInt::one();
        }
    }
    FramedLinkMatrix { entries }
}

#[derive(Clone, Copy, Debug)]
pub struct ReduceConfig {
    /// Backtracking budget: total search nodes visited before giving up.
    pub max_nodes: usize,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig {
            max_nodes: 1 << 20,
        }
    }
}

/// Outcome of `reduce_to_zero`; failure carries the residue at which the
/// search got stuck (the smallest matrix reached with no usable framing).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ReduceOutcome {
    Success {
        /// Blow-down indices, each relative to the matrix current at its
        /// step (0-based here; 1-based in serialized reports).
        sequence: Vec<usize>,
    },
    Failure {
        residue: FramedLinkMatrix,
        exhausted: bool,
    },
}

impl ReduceOutcome {
    pub fn succeeded(&self) -> bool {
        matches!(self, ReduceOutcome::Success { .. })
    }
}

/// Searches for a blow-down order reducing the matrix to the single
/// zero-framed component [0].
///
/// Candidates are the +/-1 framed components, tried in order of
/// (degree, index); exhaustive backtracking within the node budget.
pub fn reduce_to_zero(m: &FramedLinkMatrix, config: &ReduceConfig) -> ReduceOutcome {
    if m.dim() == 0 {
        return ReduceOutcome::Failure {
            residue: m.clone(),
            exhausted: true,
        };
    }
    // a successful reduction ends at [0], so |det| must already be 0
    if !m.det().is_zero() {
        return ReduceOutcome::Failure {
            residue: m.clone(),
            exhausted: true,
        };
    }
    struct Search {
        budget: usize,
        exhausted: bool,
        best_residue: Option<FramedLinkMatrix>,
    }
    impl Search {
        fn dfs(&mut self, m: &FramedLinkMatrix, path: &mut Vec<usize>) -> bool {
            if m.dim() == 1 {
                if m.entry(0, 0).is_zero() {
                    return true;
                }
                self.note_residue(m);
                return false;
            }
            if self.budget == 0 {
                self.exhausted = false;
                return false;
            }
            self.budget -= 1;
            let mut candidates: Vec<usize> =
                (0..m.dim()).filter(|&k| m.entry(k, k).abs().is_one()).collect();
            if candidates.is_empty() {
                self.note_residue(m);
                return false;
            }
            candidates.sort_by_key(|&k| (m.degree(k), k));
            for k in candidates {
                let next = blow_down(m, k).expect("unit framing");
                path.push(k);
                if self.dfs(&next, path) {
                    return true;
                }
                path.pop();
            }
            false
        }

        fn note_residue(&mut self, m: &FramedLinkMatrix) {
            if self
                .best_residue
                .as_ref()
                .map_or(true, |r| m.dim() < r.dim())
            {
                self.best_residue = Some(m.clone());
            }
        }
    }
    let mut search = Search {
        budget: config.max_nodes,
        exhausted: true,
        best_residue: None,
    };
    let mut path = Vec::new();
    if search.dfs(m, &mut path) {
        ReduceOutcome::Success { sequence: path }
    } else {
        ReduceOutcome::Failure {
            residue: search.best_residue.unwrap_or_else(|| m.clone()),
            exhausted: search.exhausted,
        }
    }
}

/// Replays a blow-down sequence, checking |det| preservation at every step.
pub fn replay_blow_downs(m: &FramedLinkMatrix, sequence: &[usize]) -> Result<FramedLinkMatrix> {
    let mut current = m.clone();
    let det = current.det().abs();
    for &k in sequence {
        current = blow_down(&current, k)?;
        if current.det().abs() != det {
            return Err(Error::InvalidArgument(
                "blow-down changed |det|, sequence invalid".into(),
            ));
        }
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::signature;

    #[test]
    fn blow_down_examples() {
        let m = FramedLinkMatrix::from_rows(&[&[2, 1], &[1, 1]]).unwrap();
        let r = blow_down(&m, 1).unwrap();
        assert_eq!(r, FramedLinkMatrix::from_rows(&[&[1]]).unwrap());
        assert_eq!(m.det().abs(), r.det().abs());

        let chain = chain_matrix(&[2, 1, 2]);
        let r = blow_down(&chain, 1).unwrap();
        assert_eq!(r, FramedLinkMatrix::from_rows(&[&[1, -1], &[-1, 1]]).unwrap());
        assert_eq!(chain.det(), BigInt::zero());
        assert_eq!(r.det(), BigInt::zero());

        let single = FramedLinkMatrix::from_rows(&[&[-1]]).unwrap();
        assert_eq!(blow_down(&single, 0).unwrap(), FramedLinkMatrix::empty());

        assert!(blow_down(&chain_matrix(&[2, 2]), 0).is_err());
    }

    #[test]
    fn blow_down_signature_drop() {
        let m = chain_matrix(&[3, 1, -2]);
        let before = signature(&m.gram());
        let after = signature(&blow_down(&m, 1).unwrap().gram());
        assert_eq!(before.n_plus, after.n_plus + 1);
        assert_eq!(before.n_minus, after.n_minus);
    }

    #[test]
    fn blow_up_examples() {
        let e = FramedLinkMatrix::empty();
        assert_eq!(
            blow_up(&e, 1, &[]).unwrap(),
            FramedLinkMatrix::from_rows(&[&[1]]).unwrap()
        );
        let m = FramedLinkMatrix::from_rows(&[&[2]]).unwrap();
        let up = blow_up(&m, -1, &[BigInt::one()]).unwrap();
        assert_eq!(up, FramedLinkMatrix::from_rows(&[&[1, 1], &[1, -1]]).unwrap());
        assert_eq!(blow_down(&up, 1).unwrap(), m);
    }

    #[test]
    fn blow_up_round_trip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let mut rows = vec![vec![BigInt::zero(); 4]; 4];
            for i in 0..4 {
                for j in i..4 {
                    let v = BigInt::from(rng.gen_range(-3i64..=3));
                    rows[i][j] = v.clone();
                    rows[j][i] = v;
                }
            }
            let m = FramedLinkMatrix::new(rows).unwrap();
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let links: Vec<BigInt> =
                (0..4).map(|_| BigInt::from(rng.gen_range(-2i64..=2))).collect();
            let up = blow_up(&m, sign, &links).unwrap();
            assert_eq!(blow_down(&up, 4).unwrap(), m);
        }
    }

    #[test]
    fn chain_matrix_determinant() {
        assert_eq!(chain_matrix(&[2, 2]).det(), BigInt::from(3));
        assert_eq!(chain_matrix(&[5]).det(), BigInt::from(5));
        assert_eq!(chain_matrix(&[3, 2, 2, 3, 2]).det(), BigInt::from(25));
    }

    #[test]
    fn reduce_chain_example() {
        let m = chain_matrix(&[2, 3, 1, 2, 3]);
        match reduce_to_zero(&m, &ReduceConfig::default()) {
            ReduceOutcome::Success { sequence } => {
                assert_eq!(sequence.len(), 4);
                let end = replay_blow_downs(&m, &sequence).unwrap();
                assert_eq!(end, FramedLinkMatrix::from_rows(&[&[0]]).unwrap());
            }
            other => panic!("expected success, got {other:?}"),
        }
    }

    #[test]
    fn reduce_failure_cases() {
        // nonzero determinant can never reach [0]
        let m = chain_matrix(&[2, 2]);
        assert!(!reduce_to_zero(&m, &ReduceConfig::default()).succeeded());
        // zero determinant but no unit framing anywhere
        let m = FramedLinkMatrix::from_rows(&[&[2, 2], &[2, 2]]).unwrap();
        match reduce_to_zero(&m, &ReduceConfig::default()) {
            ReduceOutcome::Failure { exhausted, .. } => assert!(exhausted),
            _ => panic!("expected failure"),
        }
    }
}
