//! Continued fractions in both sign conventions, and the four expansion
//! identities used throughout the crate: head/tail splitting, plus-to-minus
//! conversion, the complement expansion of p/(p-q), and reversal duality
//! p/q <-> p/q*.
//!
//! The `Minus` convention with coefficients >= 2 is the Hirzebruch-Jung
//! expansion; its coefficient sequences become plumbing leg weights.

use std::fmt;

use num::bigint::BigInt;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{mod_inverse, ExtendedRational, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Plus,
    Minus,
}

/// An extended-integer coefficient: an integer or `inf`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Coeff {
    Finite(i64),
    Infinity,
}

impl Coeff {
    fn to_extended(self) -> ExtendedRational {
        match self {
            Coeff::Finite(c) => ExtendedRational::int(c),
            Coeff::Infinity => ExtendedRational::Infinity,
        }
    }
}

impl From<i64> for Coeff {
    fn from(c: i64) -> Self {
        Coeff::Finite(c)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Finite(c) => write!(f, "{c}"),
            Coeff::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coeff::Finite(c) => serializer.serialize_i64(*c),
            Coeff::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        match v {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(Coeff::Finite)
                .ok_or_else(|| de::Error::custom("coefficient out of range")),
            serde_json::Value::String(s) if s == "inf" => Ok(Coeff::Infinity),
            other => Err(de::Error::custom(format!("bad coefficient {other}"))),
        }
    }
}

/// A continued fraction: a sign convention and a nonempty coefficient list.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ContinuedFraction {
    pub convention: Convention,
    pub coefficients: Vec<Coeff>,
}

impl ContinuedFraction {
    pub fn plus(coefficients: Vec<i64>) -> Self {
        ContinuedFraction {
            convention: Convention::Plus,
            coefficients: coefficients.into_iter().map(Coeff::Finite).collect(),
        }
    }

    pub fn minus(coefficients: Vec<i64>) -> Self {
        ContinuedFraction {
            convention: Convention::Minus,
            coefficients: coefficients.into_iter().map(Coeff::Finite).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Finite coefficients, or an error if any is `inf`.
    pub fn finite_coefficients(&self) -> Result<Vec<i64>> {
        self.coefficients
            .iter()
            .map(|c| match c {
                Coeff::Finite(v) => Ok(*v),
                Coeff::Infinity => Err(Error::InvalidArgument(
                    "infinite coefficient where an integer is required".into(),
                )),
            })
            .collect()
    }

    pub fn reversed(&self) -> Self {
        let mut coefficients = self.coefficients.clone();
        coefficients.reverse();
        ContinuedFraction {
            convention: self.convention,
            coefficients,
        }
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        let sign = match self.convention {
            Convention::Plus => "+",
            Convention::Minus => "-",
        };
        write!(f, "[{}]{}", coeffs.join(","), sign)
    }
}

/// Right-to-left fold x -> c + 1/x over extended-rational values.
pub fn eval_plus_values(values: &[ExtendedRational]) -> ExtendedRational {
    fold(values, false)
}

/// Right-to-left fold x -> c - 1/x over extended-rational values.
pub fn eval_minus_values(values: &[ExtendedRational]) -> ExtendedRational {
    fold(values, true)
}

fn fold(values: &[ExtendedRational], minus: bool) -> ExtendedRational {
    let mut acc: Option<ExtendedRational> = None;
    for c in values.iter().rev() {
        acc = Some(match acc {
            None => c.clone(),
            Some(x) => match c.as_finite() {
                // an infinite coefficient absorbs everything to its right
                None => ExtendedRational::Infinity,
                Some(c) => {
                    let t = x.recip();
                    if minus {
                        t.sub_from_finite(c)
                    } else {
                        t.add_finite(c)
                    }
                }
            },
        });
    }
    acc.expect("nonempty coefficient list")
}

/// Exact evaluation of a continued fraction in its convention.
pub fn eval_cf(cf: &ContinuedFraction) -> ExtendedRational {
    let values: Vec<ExtendedRational> = cf.coefficients.iter().map(|c| c.to_extended()).collect();
    match cf.convention {
        Convention::Plus => eval_plus_values(&values),
        Convention::Minus => eval_minus_values(&values),
    }
}

fn require_positive(x: &Rational) -> Result<()> {
    if !x.is_positive() {
        return Err(Error::NotPositive(x.to_string()));
    }
    Ok(())
}

fn big_to_i64(b: &BigInt) -> Result<i64> {
    i64::try_from(b).map_err(|_| Error::InvalidArgument(format!("{b} does not fit in i64")))
}

/// Canonical `Plus` expansion of a positive rational, via the Euclidean
/// algorithm: c1 >= 0, interior coefficients positive, last coefficient > 1
/// (single-term for integers).
pub fn cf_plus(x: &Rational) -> Result<ContinuedFraction> {
    require_positive(x)?;
    let mut p = x.numer().clone();
    let mut q = x.denom().clone();
    let mut coefficients = Vec::new();
    loop {
        let (c, r) = num::Integer::div_rem(&p, &q);
        coefficients.push(big_to_i64(&c)?);
        if r == BigInt::from(0) {
            break;
        }
        p = q;
        q = r;
    }
    Ok(ContinuedFraction::plus(coefficients))
}

/// Canonical `Minus` (Hirzebruch-Jung) expansion of a positive rational,
/// via the greedy ceiling algorithm: all coefficients positive and > 1
/// beyond the first.
pub fn cf_minus(x: &Rational) -> Result<ContinuedFraction> {
    require_positive(x)?;
    let mut v = x.clone();
    let mut coefficients = Vec::new();
    loop {
        let c = v.ceil_int();
        coefficients.push(big_to_i64(&c)?);
        let diff = Rational::int(c) - v;
        if diff.is_zero() {
            break;
        }
        v = diff.recip()?;
    }
    Ok(ContinuedFraction::minus(coefficients))
}

/// Is this a canonical `Plus` expansion (as produced by `cf_plus`)?
pub fn is_canonical_plus(cf: &ContinuedFraction) -> bool {
    if cf.convention != Convention::Plus || cf.is_empty() {
        return false;
    }
    let coeffs = match cf.finite_coefficients() {
        Ok(c) => c,
        Err(_) => return false,
    };
    let n = coeffs.len();
    if n == 1 {
        return true;
    }
    coeffs[0] >= 0
        && coeffs[1..n - 1].iter().all(|&c| c > 0)
        && coeffs[n - 1] > 1
}

/// Splits p/q = [c1, tail]+ at the first Euclidean step p = c1*q + r,
/// returning c1 and the expansion of q/r, and checking that the latter is
/// exactly the tail of the expansion of p/q.
pub fn cf_tail_check(p: i64, q: i64) -> Result<(i64, ContinuedFraction)> {
    if !(p > q && q > 1) {
        return Err(Error::InvalidArgument(format!(
            "need p > q > 1, got ({p},{q})"
        )));
    }
    if num::integer::gcd(p, q) != 1 {
        return Err(Error::NotCoprime(p, q));
    }
    let c1 = p.div_euclid(q);
    let r = p - c1 * q;
    let tail = cf_plus(&Rational::ratio(q, r)?)?;
    let full = cf_plus(&Rational::ratio(p, q)?)?;
    let expected: Vec<Coeff> = full.coefficients[1..].to_vec();
    debug_assert_eq!(tail.coefficients, expected);
    if tail.coefficients != expected {
        return Err(Error::InvalidArgument(
            "tail mismatch against full expansion".into(),
        ));
    }
    Ok((c1, tail))
}

/// Converts a canonical `Plus` expansion of length >= 2 into the equivalent
/// `Minus` expansion: [c1+1, 2 x (c2-1), c3+2, ...], ending with c_n+1 when
/// n is odd and with c_n-1 twos when n is even.
///
/// Length-1 input is rejected: the pattern would give [c1+1], which does not
/// evaluate to c1. Integer values should use `cf_minus` directly.
pub fn plus_to_minus(cf: &ContinuedFraction) -> Result<ContinuedFraction> {
    if !is_canonical_plus(cf) {
        return Err(Error::InvalidArgument(
            "expected a canonical plus expansion".into(),
        ));
    }
    let c = cf.finite_coefficients()?;
    let n = c.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "plus-to-minus conversion needs length >= 2".into(),
        ));
    }
    let mut out = vec![c[0] + 1];
    let mut i = 1; // 0-based index of the next even-position coefficient
    loop {
        // run of twos of length c[i]-1
        out.extend(std::iter::repeat(2).take((c[i] - 1) as usize));
        if i == n - 1 {
            break; // n even: ends with the run of twos
        }
        if i + 1 == n - 1 {
            out.push(c[n - 1] + 1); // n odd: ends with c_n + 1
            break;
        }
        out.push(c[i + 1] + 2);
        i += 2;
    }
    Ok(ContinuedFraction::minus(out))
}

/// The `Minus` expansion of p/(p-q), built from the `Plus` expansion of p/q
/// by the complement pattern [2 x (c1-1), c2+2, ...] and cross-checked
/// against the direct Hirzebruch-Jung expansion.
pub fn cf_complement(p: i64, q: i64) -> Result<ContinuedFraction> {
    if !(p > q && q > 0) {
        return Err(Error::InvalidArgument(format!(
            "need p > q > 0, got ({p},{q})"
        )));
    }
    if num::integer::gcd(p, q) != 1 {
        return Err(Error::NotCoprime(p, q));
    }
    let c = cf_plus(&Rational::ratio(p, q)?)?.finite_coefficients()?;
    let n = c.len();
    let mut out = Vec::new();
    let mut i = 0; // 0-based index of the next odd-position coefficient
    loop {
        out.extend(std::iter::repeat(2).take((c[i] - 1) as usize));
        if i == n - 1 {
            break; // n odd: ends with the run of twos
        }
        if i + 1 == n - 1 {
            out.push(c[n - 1] + 1); // n even: ends with c_n + 1
            break;
        }
        out.push(c[i + 1] + 2);
        i += 2;
    }
    let pattern = ContinuedFraction::minus(out);
    let direct = cf_minus(&Rational::ratio(p, p - q)?)?;
    if pattern != direct {
        return Err(Error::InvalidArgument(format!(
            "complement pattern {pattern} disagrees with direct expansion {direct}"
        )));
    }
    Ok(pattern)
}

/// Reversing the Hirzebruch-Jung expansion of p/q yields p/q*, where q* is
/// the inverse of q modulo p. Returns (q*, reversed expansion).
pub fn reverse_dual(p: i64, q: i64) -> Result<(i64, ContinuedFraction)> {
    if !(p > q && q > 0) {
        return Err(Error::InvalidArgument(format!(
            "need p > q > 0, got ({p},{q})"
        )));
    }
    if num::integer::gcd(p, q) != 1 {
        return Err(Error::NotCoprime(p, q));
    }
    let reversed = cf_minus(&Rational::ratio(p, q)?)?.reversed();
    let qstar = mod_inverse(q, p)?;
    let expected = ExtendedRational::Finite(Rational::ratio(p, qstar)?);
    if eval_cf(&reversed) != expected {
        return Err(Error::InvalidArgument(format!(
            "reversal of the expansion of {p}/{q} does not evaluate to {p}/{qstar}"
        )));
    }
    Ok((qstar, reversed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d).unwrap()
    }

    fn fin(n: i64, d: i64) -> ExtendedRational {
        ExtendedRational::Finite(rat(n, d))
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_cf(&ContinuedFraction::plus(vec![1, 2])), fin(3, 2));
        assert_eq!(eval_cf(&ContinuedFraction::minus(vec![2, 2, 3])), fin(7, 5));
        let with_inf = ContinuedFraction {
            convention: Convention::Minus,
            coefficients: vec![Coeff::Finite(2), Coeff::Infinity],
        };
        assert_eq!(eval_cf(&with_inf), fin(2, 1));
        for c in [-3, 0, 5] {
            assert_eq!(eval_cf(&ContinuedFraction::plus(vec![c])), fin(c, 1));
        }
    }

    #[test]
    fn zero_coefficient_in_evaluation() {
        // [1,0,2]+ = 1 + 1/(0 + 1/2) = 1 + 2 = 3; infinity absorbs div by zero
        assert_eq!(eval_cf(&ContinuedFraction::plus(vec![1, 0, 2])), fin(3, 1));
    }

    #[test]
    fn plus_expansion() {
        assert_eq!(
            cf_plus(&rat(7, 5)).unwrap(),
            ContinuedFraction::plus(vec![1, 2, 2])
        );
        assert_eq!(cf_plus(&rat(3, 1)).unwrap(), ContinuedFraction::plus(vec![3]));
        assert_eq!(
            cf_plus(&rat(3, 2)).unwrap(),
            ContinuedFraction::plus(vec![1, 2])
        );
        assert_eq!(
            cf_plus(&rat(2, 3)).unwrap(),
            ContinuedFraction::plus(vec![0, 1, 2])
        );
        assert!(cf_plus(&rat(-1, 2)).is_err());
    }

    #[test]
    fn minus_expansion() {
        assert_eq!(
            cf_minus(&rat(7, 5)).unwrap(),
            ContinuedFraction::minus(vec![2, 2, 3])
        );
        assert_eq!(cf_minus(&rat(2, 1)).unwrap(), ContinuedFraction::minus(vec![2]));
        assert_eq!(
            cf_minus(&rat(5, 4)).unwrap(),
            ContinuedFraction::minus(vec![2, 2, 2, 2])
        );
        assert!(cf_minus(&rat(0, 1)).is_err());
    }

    #[test]
    fn tail_check_examples() {
        let (c1, tail) = cf_tail_check(7, 5).unwrap();
        assert_eq!((c1, tail), (1, ContinuedFraction::plus(vec![2, 2])));
        let (c1, tail) = cf_tail_check(3, 2).unwrap();
        assert_eq!((c1, tail), (1, ContinuedFraction::plus(vec![2])));
        let (c1, tail) = cf_tail_check(5, 2).unwrap();
        assert_eq!((c1, tail), (2, ContinuedFraction::plus(vec![2])));
    }

    #[test]
    fn plus_to_minus_examples() {
        for (input, expected) in [
            (vec![1, 2], vec![2, 2]),
            (vec![1, 2, 2], vec![2, 2, 3]),
            (vec![2, 2], vec![3, 2]),
        ] {
            let got = plus_to_minus(&ContinuedFraction::plus(input.clone())).unwrap();
            assert_eq!(got, ContinuedFraction::minus(expected), "input {input:?}");
            assert_eq!(
                eval_cf(&got),
                eval_cf(&ContinuedFraction::plus(input.clone()))
            );
        }
        assert!(plus_to_minus(&ContinuedFraction::plus(vec![3])).is_err());
        // non-canonical: last coefficient 1
        assert!(plus_to_minus(&ContinuedFraction::plus(vec![1, 1])).is_err());
    }

    #[test]
    fn complement_examples() {
        assert_eq!(
            cf_complement(5, 3).unwrap(),
            ContinuedFraction::minus(vec![3, 2])
        );
        assert_eq!(
            cf_complement(7, 5).unwrap(),
            ContinuedFraction::minus(vec![4, 2])
        );
        assert_eq!(cf_complement(3, 2).unwrap(), ContinuedFraction::minus(vec![3]));
        assert!(cf_complement(4, 2).is_err());
    }

    #[test]
    fn reverse_dual_examples() {
        let (qstar, rev) = reverse_dual(7, 5).unwrap();
        assert_eq!(qstar, 3);
        assert_eq!(rev, ContinuedFraction::minus(vec![3, 2, 2]));
        let (qstar, rev) = reverse_dual(5, 2).unwrap();
        assert_eq!(qstar, 3);
        assert_eq!(rev, ContinuedFraction::minus(vec![2, 3]));
        let (qstar, rev) = reverse_dual(9, 1).unwrap();
        assert_eq!(qstar, 1);
        assert_eq!(rev, ContinuedFraction::minus(vec![9]));
    }

    #[test]
    fn json_round_trip() {
        let cf = ContinuedFraction {
            convention: Convention::Minus,
            coefficients: vec![Coeff::Finite(2), Coeff::Infinity],
        };
        let s = serde_json::to_string(&cf).unwrap();
        assert_eq!(s, r#"{"convention":"minus","coefficients":[2,"inf"]}"#);
        let back: ContinuedFraction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cf);
    }
}
