//! Batch verification suites: grid-scale checks of every identity and
//! construction in the crate. The CLI `verify-all` command and the
//! integration tests both run these.

use num::bigint::BigInt;
use num::integer::gcd;
use num::Signed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cf::{
    cf_complement, cf_minus, cf_plus, cf_tail_check, eval_cf, eval_minus_values, plus_to_minus,
    reverse_dual,
};
use crate::cobordism::{
    step_cobordism_chain, sum_cobordism_half, sum_cobordism_integer, verify_chain_stages,
};
use crate::embed::{default_k_max, enumerate_embeddings, find_embedding, is_primitive,
    mu_threshold_oracle};
use crate::error::Result;
use crate::forms::{
    determinant, signature, tridiagonal_preconditions, tridiagonal_signature, SignatureTriple,
};
use crate::kirby::{chain_matrix, reduce_to_zero, ReduceConfig};
use crate::par::{map_items, RunMode};
use crate::rational::{mod_inverse, ExtendedRational, Rational};
use crate::surgery::{augmented_mu_diagram, mu, surgery_plumbing, PlumbingTree, TorusSurgery};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn coprime_pairs(q_min: i64, p_max: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for p in 2..=p_max {
        for q in q_min..p {
            if gcd(p, q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

fn collect(name: &str, per_item: Vec<Vec<String>>) -> SuiteResult {
    SuiteResult {
        name: name.into(),
        checks: per_item.len(),
        failures: per_item.into_iter().flatten().collect(),
    }
}

/// Round trips, the four expansion identities, and the plus/minus head
/// equation, for all coprime 1 <= q < p <= pmax.
pub fn cf_suite(pmax: i64, mode: RunMode) -> SuiteResult {
    let pairs = coprime_pairs(1, pmax);
    let results = map_items(mode, &pairs, |&(p, q)| cf_pair_failures(p, q));
    collect("continued fractions", results)
}

fn cf_pair_failures(p: i64, q: i64) -> Vec<String> {
    let mut fails = Vec::new();
    macro_rules! check {
        ($ok:expr, $what:expr $(,)?) => {
            if !$ok {
                fails.push(format!("({p},{q}): {}", $what));
            }
        };
    }
    let x = Rational::ratio(p, q).unwrap();
    let plus = match cf_plus(&x) {
        Ok(v) => v,
        Err(e) => {
            fails.push(format!("({p},{q}): plus expansion failed: {e}"));
            return fails;
        }
    };
    let minus = cf_minus(&x).unwrap();
    check!(
        eval_cf(&plus) == ExtendedRational::Finite(x.clone()),
        "plus round trip",
    );
    check!(
        eval_cf(&minus) == ExtendedRational::Finite(x.clone()),
        "minus round trip",
    );
    if q > 1 {
        match cf_tail_check(p, q) {
            Ok((c1, tail)) => {
                let full = plus.finite_coefficients().unwrap();
                check!(c1 == full[0], "head coefficient");
                check!(
                    tail.finite_coefficients().unwrap() == full[1..],
                    "tail split",
                );
            }
            Err(e) => fails.push(format!("({p},{q}): tail split failed: {e}")),
        }
        match plus_to_minus(&plus) {
            Ok(converted) => check!(converted == minus, "plus-to-minus conversion"),
            Err(e) => fails.push(format!("({p},{q}): conversion failed: {e}")),
        }
        // head equation: y = [c, z]+ implies y/(y-1) = [2 x (c-1), 1+z]-
        let coeffs = plus.finite_coefficients().unwrap();
        let tail_value = {
            use crate::cf::eval_plus_values;
            let vals: Vec<ExtendedRational> = coeffs[1..]
                .iter()
                .map(|&c| ExtendedRational::int(c))
                .collect();
            eval_plus_values(&vals)
        };
        if let ExtendedRational::Finite(z) = tail_value {
            let mut vals = vec![ExtendedRational::int(2); (coeffs[0] - 1) as usize];
            vals.push(ExtendedRational::Finite(&z + &Rational::one()));
            let rhs = eval_minus_values(&vals);
            let lhs = &x / &(&x - &Rational::one());
            check!(rhs == ExtendedRational::Finite(lhs), "head equation");
        } else {
            fails.push(format!("({p},{q}): infinite tail value"));
        }
    }
    match cf_complement(p, q) {
        Ok(comp) => {
            let direct = cf_minus(&Rational::ratio(p, p - q).unwrap()).unwrap();
            check!(comp == direct, "complement pattern");
        }
        Err(e) => fails.push(format!("({p},{q}): complement failed: {e}")),
    }
    match reverse_dual(p, q) {
        Ok((qstar, reversed)) => {
            check!(qstar == mod_inverse(q, p).unwrap(), "reversal dual inverse");
            check!(
                eval_cf(&reversed)
                    == ExtendedRational::Finite(Rational::ratio(p, qstar).unwrap()),
                "reversal evaluation",
            );
        }
        Err(e) => fails.push(format!("({p},{q}): reversal failed: {e}")),
    }
    fails
}

/// The tridiagonal counting formula against the exact oracle, exhaustively
/// over valid sequences of length <= 6 with entries in [-5,5].
pub fn signature_suite(mode: RunMode) -> SuiteResult {
    let mut sequences: Vec<Vec<i64>> = Vec::new();
    fn extend(prefix: &mut Vec<i64>, max_len: usize, out: &mut Vec<Vec<i64>>) {
        if !prefix.is_empty() && tridiagonal_preconditions(prefix) {
            out.push(prefix.clone());
        }
        if prefix.len() == max_len {
            return;
        }
        for a in -5..=5 {
            // grow only prefixes that can still satisfy the interior rule
            let pos = prefix.len();
            let ok = if pos == 0 { a >= 1 } else { a != 0 };
            if ok {
                prefix.push(a);
                extend(prefix, max_len, out);
                prefix.pop();
            }
        }
    }
    extend(&mut Vec::new(), 6, &mut sequences);
    let results = map_items(mode, &sequences, |a| {
        // interior entries must still pass once the sequence is closed off
        if !tridiagonal_preconditions(a) {
            return Vec::new();
        }
        let formula = tridiagonal_signature(a).unwrap();
        let oracle = signature(&chain_matrix(a).gram());
        if oracle.n_zero != 0 || oracle.signature() != formula {
            vec![format!("{a:?}: formula {formula}, oracle {oracle:?}")]
        } else {
            Vec::new()
        }
    });
    collect("tridiagonal signature", results)
}

/// Closed-form invariant values, the independent embedding-scan oracle for
/// the first three, and the fail-below / succeed-at split for all seven
/// tabulated pairs.
pub fn mu_golden(mode: RunMode) -> SuiteResult {
    let mut failures = Vec::new();
    let golden: Vec<(i64, i64, Rational)> = vec![
        (3, 2, Rational::int(4)),
        (5, 2, Rational::int(8)),
        (5, 3, Rational::ratio(25, 2).unwrap()),
        (7, 2, Rational::int(12)),
        (7, 3, Rational::int(18)),
        (7, 4, Rational::ratio(49, 2).unwrap()),
        (7, 5, Rational::ratio(98, 3).unwrap()),
    ];
    for (p, q, want) in &golden {
        match mu(*p, *q) {
            Ok(got) if got == *want => {}
            Ok(got) => failures.push(format!("mu({p},{q}) = {got}, expected {want}")),
            Err(e) => failures.push(format!("mu({p},{q}) failed: {e}")),
        }
    }
    let windows = [
        (3i64, 2i64, Rational::int(1), Rational::int(5)),
        (5, 2, Rational::int(6), Rational::int(9)),
        (5, 3, Rational::ratio(23, 2).unwrap(), Rational::int(14)),
    ];
    let oracle_fails = map_items(mode, &windows, |(p, q, lo, hi)| {
        match mu_threshold_oracle(*p, *q, 2, lo, hi, RunMode::Sequential) {
            Ok(r) => {
                let want = mu(*p, *q).unwrap();
                if r == want {
                    Vec::new()
                } else {
                    vec![format!("oracle({p},{q}) = {r}, formula {want}")]
                }
            }
            Err(e) => vec![format!("oracle({p},{q}) failed: {e}")],
        }
    });
    failures.extend(oracle_fails.into_iter().flatten());
    // split: no embedding just below the threshold, one exactly at it
    let split_fails = map_items(mode, &golden, |(p, q, value)| {
        let mut fails = Vec::new();
        let below = largest_below(value, 3);
        for (r, want_found) in [(below, false), (value.clone(), true)] {
            let tree =
                surgery_plumbing(&TorusSurgery::new(*p, *q, r.clone()).unwrap()).unwrap();
            let gram = tree.gram();
            match find_embedding(&gram, default_k_max(&gram).unwrap()) {
                Ok(rep) => {
                    if rep.found != want_found {
                        fails.push(format!(
                            "({p},{q}) at {r}: found={}, expected {}",
                            rep.found, want_found
                        ));
                    }
                    if !rep.found && !rep.exhausted {
                        fails.push(format!("({p},{q}) at {r}: no certificate"));
                    }
                }
                Err(e) => fails.push(format!("({p},{q}) at {r}: {e}")),
            }
        }
        fails
    });
    failures.extend(split_fails.into_iter().flatten());
    SuiteResult {
        name: "threshold invariant".into(),
        checks: golden.len() + windows.len() + 2 * golden.len(),
        failures,
    }
}

/// Largest a/b < x with denominator b <= bound.
fn largest_below(x: &Rational, bound: i64) -> Rational {
    let mut best: Option<Rational> = None;
    for b in 1..=bound {
        let mut a = (x * &Rational::int(b)).ceil_int() - BigInt::from(1);
        loop {
            let cand = Rational::new(a.clone(), BigInt::from(b)).unwrap();
            if cand < *x {
                if best.as_ref().map_or(true, |c| cand > *c) {
                    best = Some(cand);
                }
                break;
            }
            a -= 1;
        }
    }
    best.expect("nonempty")
}

/// The two anecdotes: the unimodular rank-8 plumbing with no embedding, and
/// the |det| = 5 lens-space Seifert matrix.
pub fn obstruction_sanity() -> SuiteResult {
    let mut failures = Vec::new();
    let tree = surgery_plumbing(&TorusSurgery::new(3, 2, Rational::int(1)).unwrap()).unwrap();
    let gram = tree.gram();
    if determinant(&gram) != BigInt::from(1) {
        failures.push("rank-8 plumbing determinant != 1".into());
    }
    if gram.dim() != 8 {
        failures.push(format!("rank-8 plumbing has rank {}", gram.dim()));
    }
    match find_embedding(&gram, 16) {
        Ok(rep) => {
            if rep.found || !rep.exhausted {
                failures.push("rank-8 unimodular plumbing unexpectedly embeds".into());
            }
        }
        Err(e) => failures.push(format!("search failed: {e}")),
    }
    let seifert = crate::surgery::torus_surgery_to_seifert(
        &TorusSurgery::new(3, 2, Rational::int(5)).unwrap(),
    )
    .unwrap();
    match crate::surgery::seifert_to_matrix(&seifert) {
        Ok(m) => {
            if m.det().abs() != BigInt::from(5) {
                failures.push(format!("lens-space matrix |det| = {}", m.det().abs()));
            }
        }
        Err(e) => failures.push(format!("lens-space matrix failed: {e}")),
    }
    SuiteResult {
        name: "obstruction sanity".into(),
        checks: 3,
        failures,
    }
}

/// Exact leaf-to-center elimination pivots of a star plumbing; the product
/// is the determinant and positivity of all pivots is definiteness.
fn star_pivots(tree: &PlumbingTree) -> Option<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut center = Rational::int(tree.center);
    for leg in &tree.legs {
        let mut cur: Option<Rational> = None;
        for &w in leg.iter().rev() {
            let next = match &cur {
                None => Rational::int(w),
                Some(c) => {
                    if c.is_zero() {
                        return None;
                    }
                    Rational::int(w) - c.recip().unwrap()
                }
            };
            pivots.push(next.clone());
            cur = Some(next);
        }
        if let Some(c) = cur {
            if c.is_zero() {
                return None;
            }
            center = center - c.recip().unwrap();
        }
    }
    pivots.push(center);
    Some(pivots)
}

/// |det| = numerator of r and positive-definiteness over the full grid of
/// plumbings with 2 <= q < p <= pmax, denominators <= 3.
pub fn determinant_law(pmax: i64, mode: RunMode) -> SuiteResult {
    let mut cases = Vec::new();
    for (p, q) in coprime_pairs(2, pmax) {
        let pq = p * q;
        for b in 1..=3i64 {
            for a in 1..=(3 * pq) {
                if gcd(a, b) != 1 {
                    continue;
                }
                // 0 < a/b < pq - 1
                if a >= b * (pq - 1) {
                    continue;
                }
                cases.push((p, q, a, b));
            }
        }
    }
    let results = map_items(mode, &cases, |&(p, q, a, b)| {
        let r = Rational::ratio(a, b).unwrap();
        let tree = match surgery_plumbing(&TorusSurgery::new(p, q, r).unwrap()) {
            Ok(t) => t,
            Err(e) => return vec![format!("({p},{q},{a}/{b}): plumbing failed: {e}")],
        };
        let Some(pivots) = star_pivots(&tree) else {
            return vec![format!("({p},{q},{a}/{b}): singular pivot")];
        };
        let mut fails = Vec::new();
        if !pivots.iter().all(|d| d.is_positive()) {
            fails.push(format!("({p},{q},{a}/{b}): not positive-definite"));
        }
        let det = pivots
            .iter()
            .fold(Rational::one(), |acc, d| &acc * d);
        if !(det.is_integer() && det.numer().abs() == BigInt::from(a)) {
            fails.push(format!("({p},{q},{a}/{b}): |det| = {det}, expected {a}"));
        }
        // dense-oracle cross-check at small scale
        if p * q <= 35 && b == 2 {
            let g = tree.gram();
            if determinant(&g).abs() != BigInt::from(a)
                || !signature(&g).is_positive_definite()
            {
                fails.push(format!("({p},{q},{a}/{b}): dense oracle disagrees"));
            }
        }
        fails
    });
    collect("determinant law", results)
}

/// Full blow-down of the augmented minimal-slope diagram over the grid.
pub fn blowdown_grid(pmax: i64, mode: RunMode) -> SuiteResult {
    let pairs = coprime_pairs(2, pmax);
    let results = map_items(mode, &pairs, |&(p, q)| {
        let m = match augmented_mu_diagram(p, q) {
            Ok(m) => m,
            Err(e) => return vec![format!("({p},{q}): diagram failed: {e}")],
        };
        let outcome = reduce_to_zero(&m, &ReduceConfig::default());
        if outcome.succeeded() {
            Vec::new()
        } else {
            vec![format!("({p},{q}): reduction failed on dim {}", m.dim())]
        }
    });
    collect("blow-down reduction", results)
}

/// Every embedding class of the minimal-slope plumbing has a nontrivial
/// invariant factor, for the three tabulated pairs.
pub fn torsion_suite(mode: RunMode) -> SuiteResult {
    let pairs = [(3i64, 2i64), (5, 2), (5, 3)];
    let results = map_items(mode, &pairs, |&(p, q)| {
        let slope = mu(p, q).unwrap();
        let tree = surgery_plumbing(&TorusSurgery::new(p, q, slope).unwrap()).unwrap();
        let gram = tree.gram();
        let classes = match enumerate_embeddings(&gram, default_k_max(&gram).unwrap()) {
            Ok(c) => c,
            Err(e) => return vec![format!("({p},{q}): enumeration failed: {e}")],
        };
        let mut fails = Vec::new();
        if classes.is_empty() {
            fails.push(format!("({p},{q}): no embedding classes"));
        }
        for e in &classes {
            if is_primitive(e) {
                fails.push(format!("({p},{q}): primitive class {:?}", e.rows));
            }
        }
        fails
    });
    collect("torsion obstruction", results)
}

/// Random chain-cobordism pairs plus the two connected-sum grids.
pub fn cobordism_suite(mode: RunMode) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5347_4c41);
    let mut pairs = Vec::new();
    while pairs.len() < 200 {
        let a = (rng.gen_range(1..=40i64), rng.gen_range(1..=6i64));
        let b = (rng.gen_range(1..=40i64), rng.gen_range(1..=6i64));
        let x = Rational::ratio(a.0, a.1).unwrap();
        let y = Rational::ratio(b.0, b.1).unwrap();
        if x == y {
            continue;
        }
        let (s, r) = if x < y { (x, y) } else { (y, x) };
        pairs.push((s, r));
    }
    let chain_results = map_items(mode, &pairs, |(s, r)| {
        match step_cobordism_chain(s, r) {
            Ok(stages) => {
                let mut fails = Vec::new();
                if !verify_chain_stages(&stages, s, r) {
                    fails.push(format!("({s},{r}): stage bookkeeping failed"));
                }
                for st in &stages {
                    // tridiagonal stages must satisfy the counting lemma
                    let diag: Vec<i64> = (0..st.matrix.dim())
                        .map(|i| i64::try_from(st.matrix.entry(i, i)).unwrap())
                        .collect();
                    if tridiagonal_preconditions(&diag)
                        && chain_matrix(&diag) == st.matrix
                    {
                        let formula = tridiagonal_signature(&diag).unwrap();
                        let oracle = signature(&st.matrix.gram());
                        if oracle.signature() != formula {
                            fails.push(format!("({s},{r}): counting lemma mismatch"));
                        }
                    }
                }
                fails
            }
            Err(e) => vec![format!("({s},{r}): {e}")],
        }
    });
    let mut failures: Vec<String> = chain_results.into_iter().flatten().collect();
    let mut checks = pairs.len();
    for m in 1..=5 {
        for n in 1..=5 {
            checks += 1;
            if let Err(e) = sum_cobordism_integer(m, n) {
                failures.push(format!("integer sum ({m},{n}): {e}"));
            }
        }
    }
    for l in 2..=5 {
        for m in 0..=4 {
            for n in 0..=4 {
                checks += 1;
                match sum_cobordism_half(l, m, n) {
                    Ok(st) => {
                        if st.matrix.det().abs() != BigInt::from(l * (m + n) + 1) {
                            failures.push(format!("half sum ({l},{m},{n}): wrong det"));
                        }
                    }
                    Err(e) => failures.push(format!("half sum ({l},{m},{n}): {e}")),
                }
            }
        }
    }
    checks += 1;
    match sum_cobordism_half(2, 1, 1) {
        Ok(st) => {
            let sg = signature(&st.matrix.gram());
            if st.matrix.det().abs() != BigInt::from(5)
                || sg
                    != (SignatureTriple {
                        n_plus: 2,
                        n_zero: 0,
                        n_minus: 4,
                    })
            {
                failures.push("half sum (2,1,1): wrong det or signature".into());
            }
        }
        Err(e) => failures.push(format!("half sum (2,1,1): {e}")),
    }
    SuiteResult {
        name: "cobordism bookkeeping".into(),
        checks,
        failures,
    }
}

/// Runs every suite; `pmax` scales the continued-fraction grid (the other
/// grids use their specified bounds).
pub fn run_all(pmax: i64, mode: RunMode) -> Result<Vec<SuiteResult>> {
    Ok(vec![
        cf_suite(pmax, mode),
        signature_suite(mode),
        mu_golden(mode),
        obstruction_sanity(),
        determinant_law(12, mode),
        blowdown_grid(12, mode),
        torsion_suite(mode),
        cobordism_suite(mode),
    ])
}
