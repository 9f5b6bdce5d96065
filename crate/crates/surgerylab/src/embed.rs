//! Exhaustive search for embeddings of positive-definite Gram matrices into
//! the standard diagonal lattice Z^k.
//!
//! The search assigns an integer vector to each lattice generator in
//! breadth-first order. Fresh coordinates are forced to appear contiguously,
//! with positive non-increasing entries, which quotients out signed
//! coordinate permutations without losing any embedding class. With
//! k_max = sum of the diagonal (a vector of norm w needs at most w
//! coordinates) a failed search is a nonexistence certificate.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::One;
use serde::{Deserialize, Serialize};


use crate::error::{Error, Result};
use crate::forms::{signature, smith_invariants, GramMatrix};
use crate::par::{map_items, RunMode};
use crate::rational::Rational;
use crate::surgery::{surgery_plumbing, TorusSurgery};

/// Rows are the images of the lattice generators in Z^target_rank.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Embedding {
    pub rows: Vec<Vec<i64>>,
    pub target_rank: usize,
}

impl Embedding {
    /// Exact check that rows * rows^T reproduces the Gram matrix.
    pub fn verify(&self, g: &GramMatrix) -> bool {
        let n = self.rows.len();
        if g.dim() != n {
            return false;
        }
        for i in 0..n {
            if self.rows[i].len() != self.target_rank {
                return false;
            }
            for j in 0..n {
                let dot: i64 = self.rows[i]
                    .iter()
                    .zip(&self.rows[j])
                    .map(|(a, b)| a * b)
                    .sum();
                if BigInt::from(dot) != *g.entry(i, j) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub found: bool,
    pub witnesses: Vec<Embedding>,
    pub exhausted: bool,
}

/// Default coordinate budget: the sum of diagonal weights.
pub fn default_k_max(g: &GramMatrix) -> Result<usize> {
    let mut total: i64 = 0;
    for i in 0..g.dim() {
        total += entry_i64(g, i, i)?;
    }
    usize::try_from(total).map_err(|_| Error::InvalidArgument("diagonal sum overflow".into()))
}

fn entry_i64(g: &GramMatrix, i: usize, j: usize) -> Result<i64> {
    i64::try_from(g.entry(i, j))
        .map_err(|_| Error::InvalidArgument("Gram entry exceeds machine range".into()))
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Breadth-first vertex order starting from the highest-degree vertex of
/// each component; keeps the fresh-coordinate pruning effective on trees.
fn bfs_order(g: &[Vec<i64>]) -> Vec<usize> {
    let n = g.len();
    let degree = |v: usize| (0..n).filter(|&u| u != v && g[v][u] != 0).count();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    loop {
        let start = (0..n)
            .filter(|&v| !seen[v])
            .max_by_key(|&v| (degree(v), std::cmp::Reverse(v)));
        let Some(start) = start else { break };
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for u in 0..n {
                if !seen[u] && g[v][u] != 0 {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    order
}

struct Search {
    gp: Vec<Vec<i64>>,
    n: usize,
    k_max: usize,
    rows: Vec<Vec<i64>>,
    used: usize,
    collect_all: bool,
    solutions: Vec<Vec<Vec<i64>>>,
    done: bool,
}

impl Search {
    fn vertex(&mut self, v: usize) {
        if self.done {
            return;
        }
        if v == self.n {
            self.solutions.push(self.rows.clone());
            if !self.collect_all {
                self.done = true;
            }
            return;
        }
        // suffix norms of earlier rows over the already-used coordinates,
        // for the Cauchy-Schwarz cut on unmatched products
        let mut sfx = vec![vec![0i64; self.used + 1]; v];
        for t in 0..v {
            for pos in (0..self.used).rev() {
                sfx[t][pos] = sfx[t][pos + 1] + self.rows[t][pos] * self.rows[t][pos];
            }
        }
        let mut row = vec![0i64; self.k_max];
        let mut partial = vec![0i64; v];
        self.place(v, 0, self.gp[v][v], &sfx, &mut row, &mut partial);
    }

    fn place(
        &mut self,
        v: usize,
        pos: usize,
        rem: i64,
        sfx: &[Vec<i64>],
        row: &mut Vec<i64>,
        partial: &mut Vec<i64>,
    ) {
        if self.done {
            return;
        }
        if pos == self.used {
            for t in 0..v {
                if partial[t] != self.gp[v][t] {
                    return;
                }
            }
            self.fill_new(v, pos, rem, i64::MAX, row);
            return;
        }
        let s = isqrt(rem);
        for a in -s..=s {
            let rem2 = rem - a * a;
            let mut ok = true;
            for t in 0..v {
                let d = self.gp[v][t] - partial[t] - a * self.rows[t][pos];
                if d * d > rem2 * sfx[t][pos + 1] {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            row[pos] = a;
            for t in 0..v {
                partial[t] += a * self.rows[t][pos];
            }
            self.place(v, pos + 1, rem2, sfx, row, partial);
            for t in 0..v {
                partial[t] -= a * self.rows[t][pos];
            }
            row[pos] = 0;
        }
    }

    fn fill_new(&mut self, v: usize, pos: usize, rem: i64, prev: i64, row: &mut Vec<i64>) {
        if self.done {
            return;
        }
        if rem == 0 {
            let old_used = self.used;
            self.used = pos;
            self.rows.push(row.clone());
            self.vertex(v + 1);
            self.rows.pop();
            self.used = old_used;
            return;
        }
        if pos == self.k_max {
            return;
        }
        let top = prev.min(isqrt(rem));
        for c in (1..=top).rev() {
            row[pos] = c;
            self.fill_new(v, pos + 1, rem - c * c, c, row);
            row[pos] = 0;
        }
    }
}

/// Canonical form: zero columns dropped, each column's first nonzero entry
/// made positive, columns sorted descending; rows stay in generator order.
fn normalize(rows: &[Vec<i64>]) -> Embedding {
    let k = rows.first().map_or(0, |r| r.len());
    let mut cols: Vec<Vec<i64>> = Vec::new();
    for j in 0..k {
        let mut col: Vec<i64> = rows.iter().map(|r| r[j]).collect();
        if let Some(first) = col.iter().find(|&&x| x != 0) {
            if *first < 0 {
                for x in &mut col {
                    *x = -*x;
                }
            }
            cols.push(col);
        }
    }
    cols.sort();
    cols.reverse();
    let target_rank = cols.len();
    let rows = (0..rows.len())
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    Embedding { rows, target_rank }
}

fn run_search(g: &GramMatrix, k_max: usize, collect_all: bool) -> Result<Vec<Embedding>> {
    if !signature(g).is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = g.dim();
    if k_max < n {
        return Err(Error::InvalidArgument(format!(
            "k_max {k_max} below rank {n}"
        )));
    }
    let mut raw = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            raw[i][j] = entry_i64(g, i, j)?;
        }
    }
    let order = bfs_order(&raw);
    let gp: Vec<Vec<i64>> = order
        .iter()
        .map(|&i| order.iter().map(|&j| raw[i][j]).collect())
        .collect();
    let mut search = Search {
        gp,
        n,
        k_max,
        rows: Vec::new(),
        used: 0,
        collect_all,
        solutions: Vec::new(),
        done: false,
    };
    search.vertex(0);
    let mut classes = BTreeSet::new();
    for sol in &search.solutions {
        let mut orig = vec![Vec::new(); n];
        for (idx, &v) in order.iter().enumerate() {
            orig[v] = sol[idx].clone();
        }
        classes.insert(normalize(&orig));
    }
    let out: Vec<Embedding> = classes.into_iter().collect();
    debug_assert!(out.iter().all(|e| e.verify(g)));
    Ok(out)
}

/// Finds one embedding of `g` into Z^k for some k <= k_max, or certifies
/// there is none.
pub fn find_embedding(g: &GramMatrix, k_max: usize) -> Result<EmbeddingReport> {
    let witnesses = run_search(g, k_max, false)?;
    let found = !witnesses.is_empty();
    Ok(EmbeddingReport {
        found,
        // an early-stopped successful search is not a full enumeration
        exhausted: !found,
        witnesses,
    })
}

/// All embeddings of `g` up to signed coordinate permutation, sorted.
pub fn enumerate_embeddings(g: &GramMatrix, k_max: usize) -> Result<Vec<Embedding>> {
    run_search(g, k_max, true)
}

/// Reference enumerator with no canonical pruning: per-norm candidate lists
/// over all of Z^k, filtered by exact pairwise products. Test oracle only.
#[cfg(test)]
pub(crate) fn naive_enumerate(g: &GramMatrix, k_max: usize) -> Result<Vec<Embedding>> {
    fn vectors_of_norm(k: usize, norm: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut cur = vec![0i64; k];
        fn rec(cur: &mut Vec<i64>, pos: usize, rem: i64, out: &mut Vec<Vec<i64>>) {
            if pos == cur.len() {
                if rem == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let s = isqrt(rem);
            for a in -s..=s {
                cur[pos] = a;
                rec(cur, pos + 1, rem - a * a, out);
                cur[pos] = 0;
            }
        }
        rec(&mut cur, 0, norm, &mut out);
        out
    }
    if !signature(g).is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = g.dim();
    let mut raw = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            raw[i][j] = entry_i64(g, i, j)?;
        }
    }
    let candidates: Vec<Vec<Vec<i64>>> = (0..n)
        .map(|i| vectors_of_norm(k_max, raw[i][i]))
        .collect();
    let mut classes = BTreeSet::new();
    let mut stack: Vec<Vec<i64>> = Vec::new();
    fn rec(
        v: usize,
        n: usize,
        raw: &[Vec<i64>],
        candidates: &[Vec<Vec<i64>>],
        stack: &mut Vec<Vec<i64>>,
        classes: &mut BTreeSet<Embedding>,
    ) {
        if v == n {
            classes.insert(normalize(stack));
            return;
        }
        'cand: for c in &candidates[v] {
            for (t, prev) in stack.iter().enumerate() {
                let dot: i64 = c.iter().zip(prev).map(|(a, b)| a * b).sum();
                if dot != raw[v][t] {
                    continue 'cand;
                }
            }
            stack.push(c.clone());
            rec(v + 1, n, raw, candidates, stack, classes);
            stack.pop();
        }
    }
    rec(0, n, &raw, &candidates, &mut stack, &mut classes);
    Ok(classes.into_iter().collect())
}

/// True iff the image lattice is a direct summand of Z^k: the Smith normal
/// form of the row matrix has every nonzero invariant factor equal to 1.
pub fn is_primitive(e: &Embedding) -> bool {
    let big: Vec<Vec<BigInt>> = e
        .rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    smith_invariants(&big)
        .invariant_factors
        .iter()
        .all(|f| f.is_one())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum BlowupStep {
    Left,
    Right,
}

/// Generates the embeddings of a center-plus-two-legs chain by repeated
/// blow-up of the base sequence (-e1-e2, e2, e1-e2):
/// Left rewrites (v, e, w) to (v-e', e', e-e', w) and Right rewrites it to
/// (v, e-e', e', w-e'), with e' a fresh basis vector; the final pure basis
/// vector then gains f1 and becomes the central vertex.
pub fn two_leg_recursion(steps: &[BlowupStep]) -> Vec<Vec<i64>> {
    let mut dims = 2usize;
    let mut seq: Vec<Vec<i64>> = vec![vec![-1, -1], vec![0, 1], vec![1, -1]];
    let mut center = 1usize;
    for step in steps {
        for row in &mut seq {
            row.push(0);
        }
        dims += 1;
        let new = dims - 1;
        match step {
            BlowupStep::Left => {
                seq[center - 1][new] -= 1;
                seq[center][new] -= 1;
                let mut fresh = vec![0i64; dims];
                fresh[new] = 1;
                seq.insert(center, fresh);
            }
            BlowupStep::Right => {
                seq[center][new] -= 1;
                seq[center + 1][new] -= 1;
                let mut fresh = vec![0i64; dims];
                fresh[new] = 1;
                seq.insert(center + 1, fresh);
                center += 1;
            }
        }
    }
    // adjoin f1 to the central vector
    for row in &mut seq {
        row.push(0);
    }
    seq[center][dims] = 1;
    seq
}

/// Least r = a/b with b <= denom_bound in [r_min, r_max] whose plumbing
/// Gram embeds in the standard lattice; every smaller candidate must fail
/// with a completed search.
pub fn mu_threshold_oracle(
    p: i64,
    q: i64,
    denom_bound: i64,
    r_min: &Rational,
    r_max: &Rational,
    mode: RunMode,
) -> Result<Rational> {
    if !(p > q && q >= 2 && denom_bound >= 1) {
        return Err(Error::InvalidArgument(
            "need p > q >= 2 and a positive denominator bound".into(),
        ));
    }
    let mut candidates: Vec<Rational> = Vec::new();
    let upper = Rational::int(p * q) - Rational::one();
    for b in 1..=denom_bound {
        let lo = (r_min * &Rational::int(b)).ceil_int();
        let hi = (r_max * &Rational::int(b)).floor_int();
        let lo = i64::try_from(&lo).map_err(|_| Error::InvalidArgument("window too wide".into()))?;
        let hi = i64::try_from(&hi).map_err(|_| Error::InvalidArgument("window too wide".into()))?;
        for a in lo..=hi {
            if a <= 0 || num::integer::gcd(a, b) != 1 {
                continue;
            }
            let r = Rational::ratio(a, b)?;
            if r < upper {
                candidates.push(r);
            }
        }
    }
    candidates.sort();
    let check = |r: &Rational| -> Result<bool> {
        let tree = surgery_plumbing(&TorusSurgery::new(p, q, r.clone())?)?;
        let gram = tree.gram();
        let report = find_embedding(&gram, default_k_max(&gram)?)?;
        if !report.found && !report.exhausted {
            return Err(Error::InvalidArgument(format!(
                "search for r = {r} ended without a certificate"
            )));
        }
        Ok(report.found)
    };
    // chunked scan: evaluate a block in parallel, then take the first hit
    let chunk = match mode {
        RunMode::Sequential => 1,
        RunMode::Parallel => 8,
    };
    for block in candidates.chunks(chunk) {
        let results = map_items(mode, block, |r| check(r));
        for (r, res) in block.iter().zip(results) {
            if res? {
                return Ok(r.clone());
            }
        }
    }
    Err(Error::NoEmbeddableSlope)
}

/// Chain weights of the two-leg sequence (consecutive norms), for tests.
pub fn sequence_chain_weights(seq: &[Vec<i64>]) -> Vec<i64> {
    seq.iter()
        .map(|v| v.iter().map(|x| x * x).sum())
        .collect()
}

/// Verifies the chain shape: |product| = 1 on consecutive pairs, 0 otherwise.
pub fn is_chain_sequence(seq: &[Vec<i64>]) -> bool {
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            let dot: i64 = seq[i].iter().zip(&seq[j]).map(|(a, b)| a * b).sum();
            let want = if j == i + 1 { 1 } else { 0 };
            if dot.abs() != want {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::determinant;
    use crate::kirby::chain_matrix;

    fn gram(rows: &[&[i64]]) -> GramMatrix {
        GramMatrix::from_rows(rows).unwrap()
    }

    fn plumbing_gram(p: i64, q: i64, rn: i64, rd: i64) -> GramMatrix {
        surgery_plumbing(&TorusSurgery::new(p, q, Rational::ratio(rn, rd).unwrap()).unwrap())
            .unwrap()
            .gram()
    }

    #[test]
    fn trivial_and_small() {
        let g = gram(&[&[1]]);
        let rep = find_embedding(&g, 1).unwrap();
        assert!(rep.found);
        assert_eq!(rep.witnesses[0].rows, vec![vec![1]]);

        let g = gram(&[&[2]]);
        let all = enumerate_embeddings(&g, 2).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].rows, vec![vec![1, 1]]);

        let g = gram(&[&[3]]);
        let all = enumerate_embeddings(&g, 3).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].rows, vec![vec![1, 1, 1]]);
    }

    #[test]
    fn rejects_bad_input() {
        let g = gram(&[&[0]]);
        assert!(matches!(
            find_embedding(&g, 4),
            Err(Error::NotPositiveDefinite)
        ));
        let g = gram(&[&[2, 0], &[0, 2]]);
        assert!(find_embedding(&g, 1).is_err());
    }

    #[test]
    fn plumbing_324_embeds_and_fails_primitivity() {
        let g = plumbing_gram(3, 2, 4, 1);
        let k = default_k_max(&g).unwrap();
        let rep = find_embedding(&g, k).unwrap();
        assert!(rep.found);
        assert!(rep.witnesses[0].verify(&g));
        let all = enumerate_embeddings(&g, k).unwrap();
        assert!(!all.is_empty());
        for e in &all {
            assert!(e.verify(&g));
            assert!(!is_primitive(e));
        }
    }

    #[test]
    fn plumbing_32_72_fails_exhausted() {
        let g = plumbing_gram(3, 2, 7, 2);
        let rep = find_embedding(&g, default_k_max(&g).unwrap()).unwrap();
        assert!(!rep.found);
        assert!(rep.exhausted);
    }

    #[test]
    fn e8_has_no_embedding() {
        let g = plumbing_gram(3, 2, 1, 1);
        assert_eq!(determinant(&g), BigInt::from(1));
        let rep = find_embedding(&g, 16).unwrap();
        assert!(!rep.found);
        assert!(rep.exhausted);
    }

    #[test]
    fn primitivity_examples() {
        let e = Embedding {
            rows: vec![vec![2, 0]],
            target_rank: 2,
        };
        assert!(!is_primitive(&e));
        let e = Embedding {
            rows: vec![vec![1, 1, 1, 1]],
            target_rank: 4,
        };
        assert!(is_primitive(&e));
    }

    #[test]
    fn matches_naive_oracle() {
        let cases: Vec<(GramMatrix, usize)> = vec![
            (gram(&[&[1]]), 1),
            (gram(&[&[2]]), 2),
            (gram(&[&[4]]), 4),
            (gram(&[&[2, 1], &[1, 2]]), 4),
            (gram(&[&[3, 1], &[1, 2]]), 5),
            (gram(&[&[4, 1], &[1, 3]]), 7),
            (gram(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]]), 6),
            (
                gram(&[&[2, 1, 0, 0], &[1, 2, 1, 0], &[0, 1, 2, 1], &[0, 0, 1, 2]]),
                8,
            ),
            (gram(&[&[3, 1, 0], &[1, 2, 1], &[0, 1, 2]]), 7),
        ];
        for (g, k) in cases {
            let fast = enumerate_embeddings(&g, k).unwrap();
            let slow = naive_enumerate(&g, k).unwrap();
            assert_eq!(fast, slow, "mismatch on {:?}", g);
        }
    }

    #[test]
    fn sign_flip_equivalence() {
        // flipping vertex signs preserves embeddability for tree Grams
        let g = plumbing_gram(3, 2, 4, 1);
        let mut u = vec![vec![BigInt::from(0); 5]; 5];
        for (i, row) in u.iter_mut().enumerate() {
            row[i] = BigInt::from(if i % 2 == 0 { 1 } else { -1 });
        }
        let flipped = g.congruence(&u).unwrap();
        let k = default_k_max(&g).unwrap();
        let a = enumerate_embeddings(&g, k).unwrap();
        let b = enumerate_embeddings(&flipped, k).unwrap();
        assert_eq!(a.len(), b.len());
        assert_eq!(a.is_empty(), b.is_empty());
    }

    #[test]
    fn two_leg_base_case() {
        let seq = two_leg_recursion(&[]);
        assert_eq!(
            seq,
            vec![vec![-1, -1, 0], vec![0, 1, 1], vec![1, -1, 0]]
        );
        assert!(is_chain_sequence(&seq));
        let weights = sequence_chain_weights(&seq);
        assert_eq!(weights, vec![2, 2, 2]);
        let det = chain_matrix(&weights).det();
        assert_eq!(det, BigInt::from(4));
    }

    #[test]
    fn two_leg_single_left() {
        let seq = two_leg_recursion(&[BlowupStep::Left]);
        assert!(is_chain_sequence(&seq));
        let weights = sequence_chain_weights(&seq);
        assert_eq!(weights, vec![3, 2, 2, 2]);
        assert_eq!(chain_matrix(&weights).det(), BigInt::from(9));
    }

    #[test]
    fn two_leg_determinants_are_squares() {
        let step_sets: Vec<Vec<BlowupStep>> = vec![
            vec![BlowupStep::Right],
            vec![BlowupStep::Left, BlowupStep::Left],
            vec![BlowupStep::Left, BlowupStep::Right],
            vec![BlowupStep::Right, BlowupStep::Left],
            vec![BlowupStep::Right, BlowupStep::Right, BlowupStep::Left],
        ];
        for steps in step_sets {
            let seq = two_leg_recursion(&steps);
            assert!(is_chain_sequence(&seq), "steps {:?}", steps);
            let weights = sequence_chain_weights(&seq);
            let det = chain_matrix(&weights).det();
            let root = det.sqrt();
            assert_eq!(&root * &root, det, "det {det} not square for {:?}", steps);
            assert!(det > BigInt::from(1));
        }
    }

    #[test]
    fn five_three_chain_determinant() {
        // first leg + center + second leg of plumbing(5,3, 25/2)
        assert_eq!(chain_matrix(&[3, 2, 2, 3, 2]).det(), BigInt::from(25));
    }

    #[test]
    fn oracle_three_two() {
        let r = mu_threshold_oracle(
            3,
            2,
            2,
            &Rational::int(1),
            &Rational::int(5),
            RunMode::Sequential,
        )
        .unwrap();
        assert_eq!(r, Rational::int(4));
        let r = mu_threshold_oracle(
            3,
            2,
            2,
            &Rational::int(1),
            &Rational::int(5),
            RunMode::Parallel,
        )
        .unwrap();
        assert_eq!(r, Rational::int(4));
    }

    #[test]
    fn oracle_empty_window() {
        let err = mu_threshold_oracle(
            3,
            2,
            1,
            &Rational::int(1),
            &Rational::int(3),
            RunMode::Sequential,
        );
        assert!(matches!(err, Err(Error::NoEmbeddableSlope)));
    }
}
