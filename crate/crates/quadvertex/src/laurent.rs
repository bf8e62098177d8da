//! Exact Laurent-polynomial algebra in `t1..t4` and `y`.
//!
//! Everything upstream of the bracket is computed pre-relation, i.e. in the
//! ring `Z[t1^±1, .., t4^±1, y^±1]` with four independent torus variables.
//! The Calabi-Yau relation `t1 t2 t3 t4 = 1` is imposed only at the very end
//! by [`reduce_cy`], after all poles have been cleared. Weights after the
//! reduction are stored with doubled exponents ([`KWeight`]) so that the
//! half-integer powers coming from square roots stay exact integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::QvError;

/// Exponents of `(t1, t2, t3, t4, y)`, pre-relation.
pub type Exponents = [i32; 5];

/// A Laurent polynomial with arbitrary-precision integer coefficients.
///
/// No zero coefficient is ever stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<Exponents, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial([0; 5], BigInt::one())
    }

    pub fn monomial(exp: Exponents, coeff: BigInt) -> Self {
        let mut p = Self::default();
        p.add_term(exp, coeff);
        p
    }

    /// `t_i` for `axis` in `0..4`, or `y` for `axis == 4`.
    pub fn var(axis: usize) -> Self {
        let mut e = [0; 5];
        e[axis] = 1;
        Self::monomial(e, BigInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &Exponents) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, exp: Exponents, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::default();
        for (e, c) in &self.terms {
            out.terms.insert(*e, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = *ea;
                for i in 0..5 {
                    e[i] += eb[i];
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn mul_monomial(&self, exp: Exponents, coeff: &BigInt) -> Self {
        let mut out = Self::default();
        for (e, c) in &self.terms {
            let mut ne = *e;
            for i in 0..5 {
                ne[i] += exp[i];
            }
            out.add_term(ne, c * coeff);
        }
        out
    }

    /// The involution `t_i -> t_i^{-1}`. Acts on the torus part only; the
    /// `y`-grading is untouched (`y`-carrying terms are always written out
    /// explicitly as `y * bar(..)` by the callers).
    pub fn bar(&self) -> Self {
        let mut out = Self::default();
        for (e, c) in &self.terms {
            let ne = [-e[0], -e[1], -e[2], -e[3], e[4]];
            out.terms.insert(ne, c.clone());
        }
        out
    }

    /// Substitute each torus variable by a torus monomial. Column `j` of
    /// `m` is the exponent vector of the image of `t_{j+1}`. `y` is fixed.
    pub fn subst_t(&self, m: &[[i32; 4]; 4]) -> Self {
        let mut out = Self::default();
        for (e, c) in &self.terms {
            let mut ne = [0i32; 5];
            ne[4] = e[4];
            for j in 0..4 {
                for i in 0..4 {
                    ne[i] += e[j] * m[j][i];
                }
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Set `t_{axis+1} = 1` (collapse that exponent).
    pub fn subst_axis_one(&self, axis: usize) -> Self {
        let mut out = Self::default();
        for (e, c) in &self.terms {
            let mut ne = *e;
            ne[axis] = 0;
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Keep only terms with the given `y`-exponent, as a polynomial with
    /// that exponent still in place.
    pub fn y_part(&self, y_exp: i32) -> Self {
        let mut out = Self::default();
        for (e, c) in &self.terms {
            if e[4] == y_exp {
                out.terms.insert(*e, c.clone());
            }
        }
        out
    }

    /// Sum of all coefficients, i.e. the value at `t_i = y = 1`.
    pub fn rank(&self) -> BigInt {
        let mut r = BigInt::zero();
        for c in self.terms.values() {
            r += c;
        }
        r
    }

    /// Exponent sum weighted by coefficients; the `(det)` exponent vector.
    /// Integer powers of `t` in the bracketed class are equivalent to all
    /// four torus components being even.
    pub fn det_exponents(&self) -> [BigInt; 5] {
        let mut d = [
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
        ];
        for (e, c) in &self.terms {
            for i in 0..5 {
                d[i] += c * BigInt::from(e[i]);
            }
        }
        d
    }

    pub fn eval(&self, pt: &EvalPoint) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            acc += pt.monomial_value(e) * BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Exact division by `(1 - t_{axis+1})`.
    ///
    /// Works slice-wise: grouping terms by all exponents except `axis`, the
    /// quotient coefficients are prefix sums; divisibility is equivalent to
    /// every prefix-sum telescope ending at zero.
    pub fn exact_divide(&self, axis: usize) -> Result<Self, QvError> {
        debug_assert!(axis < 4);
        // residual exponent pattern -> (exponent along axis -> coefficient)
        let mut slices: BTreeMap<Exponents, BTreeMap<i32, BigInt>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut key = *e;
            let k = key[axis];
            key[axis] = 0;
            slices.entry(key).or_default().insert(k, c.clone());
        }
        let mut out = Self::default();
        for (key, slice) in slices {
            let mut acc = BigInt::zero();
            let lo = *slice.keys().next().expect("nonempty slice");
            let hi = *slice.keys().next_back().expect("nonempty slice");
            for k in lo..=hi {
                if let Some(c) = slice.get(&k) {
                    acc += c;
                }
                if !acc.is_zero() {
                    let mut e = key;
                    e[axis] = k;
                    out.terms.insert(e, acc.clone());
                }
            }
            if !acc.is_zero() {
                return Err(QvError::NotDivisible { axis: axis + 1 });
            }
        }
        Ok(out)
    }
}

/// A Laurent polynomial over the explicit denominator
/// `(1-t1)^k1 (1-t2)^k2 (1-t3)^k3 (1-t4)^k4`.
///
/// This is the controlled intermediate form used while assembling vertex and
/// edge classes; [`RationalExpr::clear`] removes the denominator by repeated
/// exact division and fails loudly if a pole does not cancel.
#[derive(Clone, Debug)]
pub struct RationalExpr {
    pub num: LaurentPoly,
    pub den: [u32; 4],
}

impl RationalExpr {
    pub fn from_poly(p: LaurentPoly) -> Self {
        Self { num: p, den: [0; 4] }
    }

    pub fn zero() -> Self {
        Self::from_poly(LaurentPoly::zero())
    }

    /// `p / (1-t_{axis+1})^k`
    pub fn over_pole(p: LaurentPoly, axis: usize, k: u32) -> Self {
        let mut den = [0; 4];
        den[axis] = k;
        Self { num: p, den }
    }

    fn raise_to(&self, den: [u32; 4]) -> LaurentPoly {
        let mut num = self.num.clone();
        for axis in 0..4 {
            debug_assert!(den[axis] >= self.den[axis]);
            for _ in self.den[axis]..den[axis] {
                let mut e = [0; 5];
                e[axis] = 1;
                let one_minus_t = LaurentPoly::one().sub(&LaurentPoly::monomial(e, BigInt::one()));
                num = num.mul(&one_minus_t);
            }
        }
        num
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut den = [0; 4];
        for i in 0..4 {
            den[i] = self.den[i].max(other.den[i]);
        }
        let num = self.raise_to(den).add(&other.raise_to(den));
        Self { num, den }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut den = [0; 4];
        for i in 0..4 {
            den[i] = self.den[i] + other.den[i];
        }
        Self { num: self.num.mul(&other.num), den }
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        Self { num: self.num.mul(p), den: self.den }
    }

    /// The involution applied to the whole expression. Uses
    /// `bar(1/(1-t_i)) = -t_i/(1-t_i)`, so the denominator shape is kept and
    /// the numerator picks up a sign and a monomial.
    pub fn bar(&self) -> Self {
        let mut num = self.num.bar();
        let mut mono = [0i32; 5];
        let mut total: u32 = 0;
        for i in 0..4 {
            mono[i] = self.den[i] as i32;
            total += self.den[i];
        }
        let sign = if total % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        num = num.mul_monomial(mono, &sign);
        Self { num, den: self.den }
    }

    /// Clear every `(1-t_i)` factor by exact division. Errors indicate a
    /// formula-assembly bug upstream.
    pub fn clear(&self) -> Result<LaurentPoly, QvError> {
        let mut p = self.num.clone();
        for axis in 0..4 {
            for _ in 0..self.den[axis] {
                p = p.exact_divide(axis)?;
            }
        }
        Ok(p)
    }
}

/// A torus/`C^*` weight after imposing `t1 t2 t3 t4 = 1`, with doubled
/// exponents: `c` doubles the reduced exponents of `(t1, t2, t3)` (obtained
/// from a 4-vector `w` as `w_i - w_4`) and `d` doubles the `y`-exponent.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct KWeight {
    pub c: [i32; 3],
    pub d: i32,
}

impl KWeight {
    pub const ZERO: KWeight = KWeight { c: [0, 0, 0], d: 0 };

    /// Reduce a pre-relation exponent vector.
    pub fn reduce(e: &Exponents) -> Self {
        KWeight {
            c: [2 * (e[0] - e[3]), 2 * (e[1] - e[3]), 2 * (e[2] - e[3])],
            d: 2 * e[4],
        }
    }

    /// Weight of the monomial `t1^a t2^b t3^c` with integer exponents.
    pub fn from_t(a: i32, b: i32, c: i32) -> Self {
        KWeight { c: [2 * a, 2 * b, 2 * c], d: 0 }
    }

    /// Weight of `y^n`.
    pub fn from_y(n: i32) -> Self {
        KWeight { c: [0, 0, 0], d: 2 * n }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn negated(&self) -> Self {
        KWeight { c: [-self.c[0], -self.c[1], -self.c[2]], d: -self.d }
    }

    /// Scale all exponents, as in the plethystic substitution
    /// `t_i -> t_i^n, y -> y^n`.
    pub fn scale(&self, n: i32) -> Self {
        KWeight {
            c: [self.c[0] * n, self.c[1] * n, self.c[2] * n],
            d: self.d * n,
        }
    }

    /// Substitute `y = t4`, merging the `y`-grading into the torus part.
    pub fn dim_reduce(&self) -> Self {
        KWeight {
            c: [self.c[0] - self.d, self.c[1] - self.d, self.c[2] - self.d],
            d: 0,
        }
    }

    /// Canonical sign orientation: the first nonzero component positive.
    /// Returns `(flipped, canonical)`; flipping a bracket factor negates it.
    pub fn canonical(&self) -> (bool, Self) {
        for v in self.c.iter().chain(std::iter::once(&self.d)) {
            if *v > 0 {
                return (false, *self);
            }
            if *v < 0 {
                return (true, self.negated());
            }
        }
        (false, *self)
    }
}

/// Collect the coefficients of a pre-relation Laurent polynomial under the
/// Calabi-Yau reduction. Cancellations across the relation are merged; no
/// zero coefficient is kept.
pub fn reduce_cy(p: &LaurentPoly) -> BTreeMap<KWeight, BigInt> {
    let mut out: BTreeMap<KWeight, BigInt> = BTreeMap::new();
    for (e, c) in p.terms() {
        let w = KWeight::reduce(e);
        let entry = out.entry(w).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            out.remove(&w);
        }
    }
    out
}

/// A rational evaluation point: values for `t_i^{1/2}` and `y^{1/2}`, with
/// `t4^{1/2} = (t1^{1/2} t2^{1/2} t3^{1/2})^{-1}` so the relation holds on
/// the nose.
#[derive(Clone, Debug)]
pub struct EvalPoint {
    pub s: [BigRational; 4],
    pub eta: BigRational,
}

impl EvalPoint {
    pub fn new(s1: BigRational, s2: BigRational, s3: BigRational, eta: BigRational) -> Self {
        let s4 = (s1.clone() * s2.clone() * s3.clone()).recip();
        Self { s: [s1, s2, s3, s4], eta }
    }

    /// Deterministic pseudo-random point for `(seed, index)`.
    pub fn random(seed: u64, index: u64) -> Self {
        let mut rng = SplitMix64::new(seed.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        let mut draw = || {
            let num = 2 + (rng.next() % 97) as i64;
            let den = 2 + (rng.next() % 89) as i64;
            BigRational::new(BigInt::from(num), BigInt::from(den))
        };
        Self::new(draw(), draw(), draw(), draw())
    }

    fn pow(base: &BigRational, e: i32) -> BigRational {
        if e == 0 {
            return BigRational::one();
        }
        let p = base.pow(e.unsigned_abs() as u32 as i32);
        if e < 0 {
            p.recip()
        } else {
            p
        }
    }

    /// Value of a pre-relation monomial (`t_i = s_i^2`, `y = eta^2`).
    pub fn monomial_value(&self, e: &Exponents) -> BigRational {
        let mut v = BigRational::one();
        for i in 0..4 {
            v *= Self::pow(&self.s[i], 2 * e[i]);
        }
        v *= Self::pow(&self.eta, 2 * e[4]);
        v
    }

    /// Value of a reduced weight monomial `tau^w` (doubled exponents).
    pub fn weight_value(&self, w: &KWeight) -> BigRational {
        let mut v = BigRational::one();
        for i in 0..3 {
            v *= Self::pow(&self.s[i], w.c[i]);
        }
        v *= Self::pow(&self.eta, w.d);
        v
    }

    /// Value of the bracket `[tau^w] = tau^{w/2} - tau^{-w/2}`.
    ///
    /// Requires all doubled exponents even (integer true exponents), which
    /// holds for every weight coming out of a character computation.
    pub fn bracket_value(&self, w: &KWeight) -> Result<BigRational, QvError> {
        if w.c.iter().any(|c| c % 2 != 0) || w.d % 2 != 0 {
            return Err(QvError::HalfIntegerBracket);
        }
        let mut half = BigRational::one();
        for i in 0..3 {
            half *= Self::pow(&self.s[i], w.c[i] / 2);
        }
        half *= Self::pow(&self.eta, w.d / 2);
        Ok(half.clone() - half.recip())
    }
}

/// SplitMix64: a small deterministic generator so random points are
/// reproducible from `(seed, index)` across platforms.
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(axis: usize) -> LaurentPoly {
        LaurentPoly::var(axis)
    }

    #[test]
    fn exact_divide_examples() {
        // (1 - t1) / (1 - t1) = 1
        let p = LaurentPoly::one().sub(&t(0));
        assert_eq!(p.exact_divide(0).unwrap(), LaurentPoly::one());
        // (1 - t1^2) / (1 - t1) = 1 + t1
        let p = LaurentPoly::one().sub(&LaurentPoly::monomial([2, 0, 0, 0, 0], 1.into()));
        assert_eq!(p.exact_divide(0).unwrap(), LaurentPoly::one().add(&t(0)));
        // (t2 - t1 t2) / (1 - t1) = t2
        let p = t(1).sub(&t(0).mul(&t(1)));
        assert_eq!(p.exact_divide(0).unwrap(), t(1));
    }

    #[test]
    fn exact_divide_rejects_non_multiples() {
        let p = LaurentPoly::one().add(&t(0));
        assert!(p.exact_divide(0).is_err());
    }

    #[test]
    fn exact_divide_roundtrip_random() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..50 {
            let mut p = LaurentPoly::zero();
            for _ in 0..6 {
                let mut e = [0i32; 5];
                for v in e.iter_mut() {
                    *v = (rng.next() % 7) as i32 - 3;
                }
                p.add_term(e, BigInt::from((rng.next() % 9) as i64 - 4));
            }
            for axis in 0..4 {
                let mut de = [0; 5];
                de[axis] = 1;
                let factor = LaurentPoly::one().sub(&LaurentPoly::monomial(de, 1.into()));
                let q = p.mul(&factor).exact_divide(axis).unwrap();
                assert_eq!(q, p);
            }
        }
    }

    #[test]
    fn reduce_cy_examples() {
        // t4 -> t1^-1 t2^-1 t3^-1
        let m = reduce_cy(&t(3));
        assert_eq!(m.len(), 1);
        let (w, c) = m.iter().next().unwrap();
        assert_eq!(w, &KWeight { c: [-2, -2, -2], d: 0 });
        assert_eq!(c, &BigInt::one());
        // the relation itself collapses to nothing
        let rel = t(0).mul(&t(1)).mul(&t(2)).mul(&t(3)).sub(&LaurentPoly::one());
        assert!(reduce_cy(&rel).is_empty());
        // y t4^2
        let p = LaurentPoly::monomial([0, 0, 0, 2, 1], 1.into());
        let m = reduce_cy(&p);
        let (w, _) = m.iter().next().unwrap();
        assert_eq!(w, &KWeight { c: [-4, -4, -4], d: 2 });
    }

    #[test]
    fn eval_examples() {
        let pt = EvalPoint::new(
            BigRational::from_integer(2.into()),
            BigRational::from_integer(3.into()),
            BigRational::from_integer(5.into()),
            BigRational::from_integer(7.into()),
        );
        // weight t1 at t1^{1/2} = 2 evaluates to 4
        let w = KWeight::from_t(1, 0, 0);
        assert_eq!(pt.weight_value(&w), BigRational::from_integer(4.into()));
        // bracket [t1] = 2 - 1/2
        assert_eq!(
            pt.bracket_value(&w).unwrap(),
            BigRational::new(3.into(), 2.into())
        );
        // the relation monomial evaluates to 1 at every point
        let rel = t(0).mul(&t(1)).mul(&t(2)).mul(&t(3));
        assert_eq!(rel.eval(&pt), BigRational::one());
    }

    #[test]
    fn eval_is_ring_hom_random() {
        let mut rng = SplitMix64::new(99);
        for trial in 0..100 {
            let pt = EvalPoint::random(41, trial);
            let mut mk = |n: u64| {
                let mut p = LaurentPoly::zero();
                for _ in 0..n {
                    let mut e = [0i32; 5];
                    for v in e.iter_mut() {
                        *v = (rng.next() % 5) as i32 - 2;
                    }
                    p.add_term(e, BigInt::from((rng.next() % 7) as i64 - 3));
                }
                p
            };
            let a = mk(4);
            let b = mk(4);
            assert_eq!(a.add(&b).eval(&pt), a.eval(&pt) + b.eval(&pt));
            assert_eq!(a.mul(&b).eval(&pt), a.eval(&pt) * b.eval(&pt));
        }
    }

    #[test]
    fn reduce_cy_is_ring_map_at_points() {
        // reduce(pq) evaluates like reduce(p) * reduce(q)
        let mut rng = SplitMix64::new(5);
        for trial in 0..20 {
            let pt = EvalPoint::random(17, trial);
            let mut mk = |n: u64| {
                let mut p = LaurentPoly::zero();
                for _ in 0..n {
                    let mut e = [0i32; 5];
                    for v in e.iter_mut() {
                        *v = (rng.next() % 5) as i32 - 2;
                    }
                    p.add_term(e, BigInt::from((rng.next() % 7) as i64 - 3));
                }
                p
            };
            let a = mk(5);
            let b = mk(5);
            let eval_reduced = |m: &BTreeMap<KWeight, BigInt>| -> BigRational {
                m.iter()
                    .map(|(w, c)| pt.weight_value(w) * BigRational::from_integer(c.clone()))
                    .sum()
            };
            let lhs = eval_reduced(&reduce_cy(&a.mul(&b)));
            let rhs = eval_reduced(&reduce_cy(&a)) * eval_reduced(&reduce_cy(&b));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn bar_is_an_involution_fixing_y() {
        let p = LaurentPoly::monomial([1, -2, 3, 0, 2], 5.into());
        assert_eq!(p.bar().bar(), p);
        let barred = p.bar();
        let (e, _) = barred.terms().next().unwrap();
        assert_eq!(e, &[-1, 2, -3, 0, 2]);
    }

    #[test]
    fn rational_expr_bar_matches_direct_eval() {
        // bar(p/(1-t1)) should evaluate like bar(p)/(1-t1^{-1})
        let p = t(1).add(&LaurentPoly::one());
        let r = RationalExpr::over_pole(p.clone(), 0, 1);
        let b = r.bar();
        for trial in 0..5 {
            let pt = EvalPoint::random(3, trial);
            let t1 = pt.monomial_value(&[1, 0, 0, 0, 0]);
            let lhs = b.num.eval(&pt)
                / (BigRational::one() - t1.clone()).pow(1);
            let rhs = p.bar().eval(&pt) / (BigRational::one() - t1.recip());
            assert_eq!(lhs, rhs);
        }
    }
}
