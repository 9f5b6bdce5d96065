//! Rational surgery on torus knots: the minimal negative-definite slope
//! mu(p,q), the Seifert description of the surgered manifold, the
//! three-legged positive-definite plumbing realizing it, and the meridian
//! augmentation whose blow-down reduction certifies the construction.

use num::bigint::BigInt;
use num::Signed;
use serde::{Deserialize, Serialize};

use crate::cf::{cf_minus, cf_plus};
use crate::error::{Error, Result};
use crate::forms::GramMatrix;
use crate::kirby::FramedLinkMatrix;
use crate::rational::{mod_inverse, ExtendedRational, Rational};

/// r-surgery on the torus knot T(p,q); q < 0 encodes the negative knot.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TorusSurgery {
    pub p: i64,
    pub q: i64,
    pub r: Rational,
}

impl TorusSurgery {
    pub fn new(p: i64, q: i64, r: Rational) -> Result<Self> {
        validate_torus_knot(p, q)?;
        Ok(TorusSurgery { p, q, r })
    }
}

fn validate_torus_knot(p: i64, q: i64) -> Result<()> {
    let qa = q.abs();
    let ok = (p > qa && qa >= 1 && num::integer::gcd(p, qa) == 1) || (p == 1 && qa == 1);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "({p},{q}) is not a valid torus knot parameter pair"
        )))
    }
}

/// Seifert description: Euler weight e and fractional fibre coefficients,
/// which may be 0 or infinity.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SeifertData {
    pub e: i64,
    pub fibres: Vec<ExtendedRational>,
}

/// Star-shaped plumbing: central weight plus three ordered legs.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PlumbingTree {
    pub center: i64,
    pub legs: [Vec<i64>; 3],
}

impl PlumbingTree {
    pub fn rank(&self) -> usize {
        1 + self.legs.iter().map(|l| l.len()).sum::<usize>()
    }

    /// Vertex order: center, then each leg from the center outwards.
    pub fn matrix(&self) -> FramedLinkMatrix {
        let n = self.rank();
        let mut rows = vec![vec![0i64; n]; n];
        rows[0][0] = self.center;
        let mut idx = 1;
        for leg in &self.legs {
            for (pos, &w) in leg.iter().enumerate() {
                rows[idx][idx] = w;
                let prev = if pos == 0 { 0 } else { idx - 1 };
                rows[idx][prev] = 1;
                rows[prev][idx] = 1;
                idx += 1;
            }
        }
        FramedLinkMatrix::from_rows(&rows.iter().map(|r| r.as_slice()).collect::<Vec<_>>())
            .expect("symmetric by construction")
    }

    pub fn gram(&self) -> GramMatrix {
        self.matrix().gram()
    }

    /// 0-based vertex indices of the given leg in the matrix ordering.
    pub fn leg_indices(&self, leg: usize) -> Vec<usize> {
        let start = 1 + self.legs[..leg].iter().map(|l| l.len()).sum::<usize>();
        (start..start + self.legs[leg].len()).collect()
    }

    /// Plain-text graph description for external rendering.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph plumbing {\n");
        out.push_str(&format!("  v0 [label=\"{}\"];\n", self.center));
        let mut idx = 1;
        for leg in &self.legs {
            for (pos, w) in leg.iter().enumerate() {
                out.push_str(&format!("  v{idx} [label=\"{w}\"];\n"));
                let prev = if pos == 0 { 0 } else { idx - 1 };
                out.push_str(&format!("  v{prev} -- v{idx};\n"));
                idx += 1;
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Number of Euclidean-algorithm steps for p/q (the length of the canonical
/// plus expansion).
fn euclid_length(p: i64, q: i64) -> Result<usize> {
    Ok(cf_plus(&Rational::ratio(p, q)?)?.len())
}

/// The minimal slope whose surgery on T(p,q) bounds a negative-definite
/// four-manifold: pq - q/p* when the Euclidean algorithm for (p,q) has an
/// even number of steps, pq - p/q* when odd; 0 for q = 1 and for negative
/// torus knots.
pub fn mu(p: i64, q: i64) -> Result<Rational> {
    validate_torus_knot(p, q)?;
    if q < 0 {
        return Ok(Rational::zero());
    }
    if q == 1 {
        return Ok(Rational::zero());
    }
    let pq = Rational::int(p * q);
    let n = euclid_length(p, q)?;
    let value = if n % 2 == 0 {
        let pstar = mod_inverse(p, q)?;
        pq - Rational::ratio(q, pstar)?
    } else {
        let qstar = mod_inverse(q, p)?;
        pq - Rational::ratio(p, qstar)?
    };
    Ok(value)
}

/// The Seifert description Y(2; p/q*, q/p*, (pq-r)/(pq-r-1)) of r-surgery on
/// the positive torus knot T(p,q).
pub fn torus_surgery_to_seifert(t: &TorusSurgery) -> Result<SeifertData> {
    if t.q < 1 {
        return Err(Error::InvalidArgument(
            "Seifert description implemented for positive torus knots".into(),
        ));
    }
    let (p, q) = (t.p, t.q);
    let qstar = mod_inverse(q, p)?;
    let pstar = mod_inverse(p, q)?;
    // consistency of the fibre coefficients: q*b1 + p*b2 - 1 = 0
    // with b1 = q*, b2 = p* - q
    assert_eq!(q * qstar + p * (pstar - q) - 1, 0);
    let pq = Rational::int(p * q);
    let num = &pq - &t.r;
    let den = &num - &Rational::one();
    let third = if den.is_zero() {
        ExtendedRational::Infinity
    } else {
        ExtendedRational::Finite(num / den)
    };
    Ok(SeifertData {
        e: 2,
        fibres: vec![
            ExtendedRational::Finite(Rational::ratio(p, qstar)?),
            ExtendedRational::Finite(Rational::ratio(q, pstar)?),
            third,
        ],
    })
}

/// Star-shaped linking matrix of a Seifert description: central vertex of
/// weight e, one leg per finite fibre coefficient with weights from its
/// Hirzebruch-Jung expansion; infinite coefficients contribute nothing.
pub fn seifert_to_matrix(s: &SeifertData) -> Result<FramedLinkMatrix> {
    let mut legs: Vec<Vec<i64>> = Vec::new();
    for f in &s.fibres {
        match f {
            ExtendedRational::Infinity => continue,
            ExtendedRational::Finite(r) => {
                if r.is_zero() {
                    return Err(Error::InfiniteHomology);
                }
                if !r.is_positive() {
                    return Err(Error::NotPositive(r.to_string()));
                }
                legs.push(cf_minus(r)?.finite_coefficients()?);
            }
        }
    }
    let n = 1 + legs.iter().map(|l| l.len()).sum::<usize>();
    let mut rows = vec![vec![0i64; n]; n];
    rows[0][0] = s.e;
    let mut idx = 1;
    for leg in &legs {
        for (pos, &w) in leg.iter().enumerate() {
            rows[idx][idx] = w;
            let prev = if pos == 0 { 0 } else { idx - 1 };
            rows[idx][prev] = 1;
            rows[prev][idx] = 1;
            idx += 1;
        }
    }
    FramedLinkMatrix::from_rows(&rows.iter().map(|r| r.as_slice()).collect::<Vec<_>>())
}

/// The three-legged positive-definite plumbing bounded by r-surgery on
/// T(p,q) for 0 < r < pq-1: central weight 2, first leg from
/// (pq-r)/(pq-r-1), second and third legs from p/q* and q/p* in the
/// parity-dependent order.
pub fn surgery_plumbing(t: &TorusSurgery) -> Result<PlumbingTree> {
    let (p, q) = (t.p, t.q);
    if q < 2 {
        return Err(Error::InvalidArgument(
            "plumbing construction needs q >= 2".into(),
        ));
    }
    let pq = Rational::int(p * q);
    let upper = &pq - &Rational::one();
    if !(t.r.is_positive() && t.r < upper) {
        return Err(Error::InvalidArgument(format!(
            "slope {} outside (0, {})",
            t.r, upper
        )));
    }
    let num = &pq - &t.r;
    let den = &num - &Rational::one();
    let first = cf_minus(&(num / den))?.finite_coefficients()?;
    let qstar = mod_inverse(q, p)?;
    let pstar = mod_inverse(p, q)?;
    let from_p = cf_minus(&Rational::ratio(p, qstar)?)?.finite_coefficients()?;
    let from_q = cf_minus(&Rational::ratio(q, pstar)?)?.finite_coefficients()?;
    let n = euclid_length(p, q)?;
    let (second, third) = if n % 2 == 1 {
        (from_p, from_q)
    } else {
        (from_q, from_p)
    };
    Ok(PlumbingTree {
        center: 2,
        legs: [first, second, third],
    })
}

/// Leg weight patterns read off the plus expansion of p/q; used as an
/// independent route to the second and third legs of `surgery_plumbing`.
#[cfg(test)]
pub(crate) fn leg_patterns(c: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let n = c.len();
    assert!(n >= 2);
    // second leg: c_n+1, 2 x (c_{n-1}-1), c_{n-2}+2, ... down to c_1+1 (n odd)
    // or c_2+1 (n > 2 even), plain c_2 when n = 2
    let second = if n == 2 {
        vec![c[1]]
    } else {
        let mut out = vec![c[n - 1] + 1];
        let mut i = n - 2; // 0-based; supplies a run of twos
        loop {
            out.extend(std::iter::repeat(2).take((c[i] - 1) as usize));
            if i == 0 {
                break;
            }
            if i == 1 {
                out.push(c[0] + 1); // n odd: ends at c_1+1
                break;
            }
            if i == 2 {
                out.push(c[1] + 1); // n even: ends at c_2+1
                break;
            }
            out.push(c[i - 1] + 2);
            i -= 2;
        }
        out
    };
    // third leg: 2 x (c_n-1), c_{n-1}+2, ... down to c_2+1 (n odd) or
    // c_1+1 (n even)
    let mut third = Vec::new();
    let mut i = n - 1;
    loop {
        third.extend(std::iter::repeat(2).take((c[i] - 1) as usize));
        if i == 0 {
            break;
        }
        if i == 1 {
            third.push(c[0] + 1); // n even: ends at c_1+1
            break;
        }
        if i == 2 {
            third.push(c[1] + 1); // n odd: ends at c_2+1
            break;
        }
        third.push(c[i - 1] + 2);
        i -= 2;
    }
    (second, third)
}

/// |det| of a linking matrix: the order of the first homology of its
/// boundary, with 0 encoding an infinite group.
pub fn h1_order(m: &FramedLinkMatrix) -> BigInt {
    m.det().abs()
}

/// The plumbing for the minimal slope mu(p,q), augmented on the third leg:
/// each vertex of weight w and tree-valency v gains w-v meridians framed +1,
/// each linking that vertex once. The result reduces to [0] by blow-downs.
pub fn augmented_mu_diagram(p: i64, q: i64) -> Result<FramedLinkMatrix> {
    if !(p > q && q >= 2) {
        return Err(Error::InvalidArgument(format!(
            "need p > q >= 2, got ({p},{q})"
        )));
    }
    let slope = mu(p, q)?;
    let tree = surgery_plumbing(&TorusSurgery::new(p, q, slope)?)?;
    let base = tree.matrix();
    let third = tree.leg_indices(2);
    let mut rows: Vec<Vec<BigInt>> = base.entries().to_vec();
    let leg_len = third.len();
    for (pos, &v_idx) in third.iter().enumerate() {
        let weight = base.entry(v_idx, v_idx).clone();
        let valency: i64 = if leg_len == 1 || pos == leg_len - 1 { 1 } else { 2 };
        let meridians = &weight - BigInt::from(valency);
        let count = u64::try_from(&meridians).map_err(|_| {
            Error::InvalidArgument("negative meridian count on third leg".into())
        })?;
        for _ in 0..count {
            let dim = rows.len();
            for (i, row) in rows.iter_mut().enumerate() {
                row.push(if i == v_idx { BigInt::from(1) } else { BigInt::from(0) });
            }
            let mut new_row = vec![BigInt::from(0); dim + 1];
            new_row[v_idx] = BigInt::from(1);
            new_row[dim] = BigInt::from(1);
            rows.push(new_row);
        }
    }
    FramedLinkMatrix::new(rows)
}

/// Asserts the defining evaluation identities behind a Seifert description
/// produced from a torus surgery; used by tests and the CLI verifier.
pub fn seifert_third_coefficient(t: &TorusSurgery) -> Result<ExtendedRational> {
    Ok(torus_surgery_to_seifert(t)?.fibres[2].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{determinant, signature};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d).unwrap()
    }

    #[test]
    fn mu_golden_values() {
        assert_eq!(mu(3, 2).unwrap(), rat(4, 1));
        assert_eq!(mu(5, 3).unwrap(), rat(25, 2));
        assert_eq!(mu(7, 5).unwrap(), rat(98, 3));
        assert_eq!(mu(5, -2).unwrap(), Rational::zero());
        assert_eq!(mu(7, 1).unwrap(), Rational::zero());
        assert!(mu(4, 2).is_err());
    }

    #[test]
    fn seifert_examples() {
        let s = torus_surgery_to_seifert(&TorusSurgery::new(3, 2, rat(4, 1)).unwrap()).unwrap();
        assert_eq!(s.e, 2);
        assert_eq!(
            s.fibres,
            vec![
                ExtendedRational::Finite(rat(3, 2)),
                ExtendedRational::Finite(rat(2, 1)),
                ExtendedRational::Finite(rat(2, 1)),
            ]
        );
        let s = torus_surgery_to_seifert(&TorusSurgery::new(3, 2, rat(5, 1)).unwrap()).unwrap();
        assert_eq!(s.fibres[2], ExtendedRational::Infinity);
        let s = torus_surgery_to_seifert(&TorusSurgery::new(5, 3, Rational::zero()).unwrap())
            .unwrap();
        assert_eq!(
            s.fibres,
            vec![
                ExtendedRational::Finite(rat(5, 2)),
                ExtendedRational::Finite(rat(3, 2)),
                ExtendedRational::Finite(rat(15, 14)),
            ]
        );
    }

    #[test]
    fn seifert_matrix_examples() {
        let s = SeifertData {
            e: 2,
            fibres: vec![
                ExtendedRational::Finite(rat(3, 2)),
                ExtendedRational::int(2),
                ExtendedRational::int(2),
            ],
        };
        let m = seifert_to_matrix(&s).unwrap();
        assert_eq!(m.dim(), 5);
        assert_eq!(h1_order(&m), BigInt::from(4));

        let s = SeifertData {
            e: 2,
            fibres: vec![
                ExtendedRational::Finite(rat(3, 2)),
                ExtendedRational::int(2),
                ExtendedRational::Infinity,
            ],
        };
        let m = seifert_to_matrix(&s).unwrap();
        assert_eq!(m.dim(), 4);
        assert_eq!(h1_order(&m), BigInt::from(5));

        let s = SeifertData {
            e: 0,
            fibres: vec![ExtendedRational::Infinity; 3],
        };
        let m = seifert_to_matrix(&s).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(h1_order(&m), BigInt::from(0));

        let s = SeifertData {
            e: 1,
            fibres: vec![ExtendedRational::int(0)],
        };
        assert!(matches!(seifert_to_matrix(&s), Err(Error::InfiniteHomology)));
    }

    #[test]
    fn plumbing_examples() {
        let t = surgery_plumbing(&TorusSurgery::new(3, 2, rat(4, 1)).unwrap()).unwrap();
        assert_eq!(t.center, 2);
        assert_eq!(t.legs, [vec![2], vec![2], vec![2, 2]]);
        assert_eq!(determinant(&t.gram()), BigInt::from(4));

        let t = surgery_plumbing(&TorusSurgery::new(3, 2, rat(1, 1)).unwrap()).unwrap();
        assert_eq!(t.legs, [vec![2, 2, 2, 2], vec![2], vec![2, 2]]);
        assert_eq!(t.rank(), 8);
        assert_eq!(determinant(&t.gram()), BigInt::from(1));
        assert!(signature(&t.gram()).is_positive_definite());

        let t = surgery_plumbing(&TorusSurgery::new(5, 3, rat(25, 2)).unwrap()).unwrap();
        assert_eq!(t.legs, [vec![2, 3], vec![3, 2], vec![2, 2]]);
        assert_eq!(determinant(&t.gram()), BigInt::from(25));

        assert!(surgery_plumbing(&TorusSurgery::new(3, 2, rat(5, 1)).unwrap()).is_err());
        assert!(surgery_plumbing(&TorusSurgery::new(3, 2, rat(-1, 1)).unwrap()).is_err());
    }

    #[test]
    fn plumbing_h1_example() {
        let t = surgery_plumbing(&TorusSurgery::new(3, 2, rat(7, 2)).unwrap()).unwrap();
        assert_eq!(h1_order(&t.matrix()), BigInt::from(7));
    }

    #[test]
    fn leg_patterns_match_expansions() {
        for (p, q) in [(3i64, 2i64), (5, 2), (5, 3), (7, 3), (7, 5), (11, 7), (12, 5)] {
            let c = cf_plus(&rat(p, q)).unwrap().finite_coefficients().unwrap();
            let (second, third) = leg_patterns(&c);
            let qstar = mod_inverse(q, p).unwrap();
            let pstar = mod_inverse(p, q).unwrap();
            let from_p = cf_minus(&rat(p, qstar)).unwrap().finite_coefficients().unwrap();
            let from_q = cf_minus(&rat(q, pstar)).unwrap().finite_coefficients().unwrap();
            if c.len() % 2 == 1 {
                assert_eq!(second, from_p, "second leg ({p},{q})");
                assert_eq!(third, from_q, "third leg ({p},{q})");
            } else {
                assert_eq!(second, from_q, "second leg ({p},{q})");
                assert_eq!(third, from_p, "third leg ({p},{q})");
            }
        }
    }

    #[test]
    fn augmented_diagram_examples() {
        let m = augmented_mu_diagram(3, 2).unwrap();
        assert_eq!(m.dim(), 6);
        let m = augmented_mu_diagram(5, 3).unwrap();
        // rank-7 plumbing; third leg [2,2]: outer vertex gains one meridian
        assert_eq!(m.dim(), 7 + 1);
        let m = augmented_mu_diagram(5, 2).unwrap();
        // third leg [2,3]: outer weight-3 vertex gains two meridians
        assert_eq!(m.dim(), 5 + 2);
    }

    #[test]
    fn seifert_consistency_with_plumbing() {
        // the Seifert matrix and the plumbing have the same |H1|
        for (p, q, r) in [(3i64, 2i64, rat(4, 1)), (5, 3, rat(7, 2)), (7, 4, rat(19, 3))] {
            let t = TorusSurgery::new(p, q, r.clone()).unwrap();
            let seifert = seifert_to_matrix(&torus_surgery_to_seifert(&t).unwrap()).unwrap();
            assert_eq!(h1_order(&seifert), r.numer().abs());
        }
    }

    #[test]
    fn eval_first_leg_fraction() {
        // first leg of plumbing(5,3, 25/2) comes from (5/2)/(3/2) = 5/3
        let first = cf_minus(&rat(5, 3)).unwrap();
        assert_eq!(
            crate::cf::eval_cf(&first),
            ExtendedRational::Finite(rat(5, 3))
        );
    }
}
