//! The square-rooted and insertion-twisted vertex and edge classes, their
//! plain counterparts, and the multiplicative bracket.
//!
//! Assembly happens pre-relation: the four torus variables stay independent
//! until every `(1-t_i)` pole has been cleared by exact division, and only
//! then is the Calabi-Yau reduction applied. The twisted classes carry their
//! structural checks (rank zero, integer torus powers, no fixed deformation
//! term, `y`-part equal to `-y bar(W)`) and fail loudly when any is violated.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::character::{leg_poly, VertexCharacter};
use crate::error::QvError;
use crate::laurent::{reduce_cy, KWeight, LaurentPoly, RationalExpr};
use crate::partitions::PlanePartition;

/// Normal-bundle degrees along an invariant line; they sum to `-2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDegrees {
    pub m: [i32; 3],
}

impl EdgeDegrees {
    pub fn new(m: [i32; 3]) -> Result<Self, QvError> {
        if m.iter().sum::<i32>() != -2 {
            return Err(QvError::InvalidInput(format!(
                "edge degrees {m:?} must sum to -2"
            )));
        }
        Ok(Self { m })
    }

    /// Exponent substitution of the chart transition
    /// `(t1,t2,t3,t4) -> (t1^-1, t2 t1^-m, t3 t1^-m', t4 t1^-m'')`.
    pub fn transition(&self) -> [[i32; 4]; 4] {
        [
            [-1, 0, 0, 0],
            [-self.m[0], 1, 0, 0],
            [-self.m[1], 0, 1, 0],
            [-self.m[2], 0, 0, 1],
        ]
    }
}

fn one_minus_t(axis: usize) -> LaurentPoly {
    let mut e = [0i32; 5];
    e[axis] = 1;
    LaurentPoly::one().sub(&LaurentPoly::monomial(e, BigInt::one()))
}

fn one_minus_t_inv(axis: usize) -> LaurentPoly {
    let mut e = [0i32; 5];
    e[axis] = -1;
    LaurentPoly::one().sub(&LaurentPoly::monomial(e, BigInt::one()))
}

/// `(1 - t_{i}^{-1})(1 - t_{j}^{-1})(1 - t_{k}^{-1})` for `{i,j,k} = {1,2,3}`.
fn p_bar_123() -> LaurentPoly {
    one_minus_t_inv(0).mul(&one_minus_t_inv(1)).mul(&one_minus_t_inv(2))
}

/// `(1-t_i)(1-t_j) / (t_i t_j)` as a Laurent polynomial.
fn p_pair_over(i: usize, j: usize) -> LaurentPoly {
    let mut e = [0i32; 5];
    e[i] -= 1;
    e[j] -= 1;
    one_minus_t(i).mul(&one_minus_t(j)).mul_monomial(e, &BigInt::one())
}

/// `t_i y` as a monomial.
fn ty_monomial(axis: usize) -> LaurentPoly {
    let mut e = [0i32; 5];
    e[axis] = 1;
    e[4] = 1;
    LaurentPoly::monomial(e, BigInt::one())
}

/// The complementary pair used by the leg-`i` redistribution polynomial:
/// the two axes other than `i` and `4` (the fourth leg pairs `1,2` instead,
/// which is the deliberate asymmetry of the square root).
fn redistribution_pair(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (0, 2),
        2 => (0, 1),
        3 => (0, 1),
        _ => unreachable!(),
    }
}

/// Square-root leg polynomial `f_i`, with or without the insertion block.
fn f_leg(axis: usize, leg: &LaurentPoly, twisted: bool) -> LaurentPoly {
    let (a, b) = redistribution_pair(axis);
    let mut f = leg.neg();
    if twisted {
        f = f.sub(&ty_monomial(axis).mul(&leg.bar()));
    }
    f.add(&p_pair_over(a, b).mul(leg).mul(&leg.bar()))
}

/// Assemble the square root `v` (plain) or its insertion twist `v~` as a
/// pre-relation Laurent polynomial. All poles are cleared exactly.
fn assemble_vertex(ch: &VertexCharacter, twisted: bool) -> Result<LaurentPoly, QvError> {
    let w = RationalExpr::from_poly(ch.w.clone());
    let mut z = w;
    for axis in 0..4 {
        if !ch.legs[axis].is_zero() {
            z = z.add(&RationalExpr::over_pole(ch.legs[axis].clone(), axis, 1));
        }
    }
    let z_bar = z.bar();
    let pbar = p_bar_123();

    let mut acc = z.sub(&z.mul(&z_bar).mul_poly(&pbar));
    if twisted {
        let y = LaurentPoly::monomial([0, 0, 0, 0, 1], BigInt::one());
        acc = acc.sub(&z_bar.mul_poly(&y));
    }
    for axis in 0..3 {
        if ch.legs[axis].is_zero() {
            continue;
        }
        let f = f_leg(axis, &ch.legs[axis], twisted);
        acc = acc.add(&RationalExpr::over_pole(f, axis, 1));
    }
    // the fourth-leg block, written verbatim with its poles in (1-t4)
    let l4 = &ch.legs[3];
    if !l4.is_zero() {
        let mut inner = l4.neg();
        if twisted {
            inner = inner.sub(&ty_monomial(3).mul(&l4.bar()));
        }
        let mut block = RationalExpr::from_poly(inner);
        block = block.add(
            &z_bar
                .mul_poly(l4)
                .sub(&z.mul_poly(&l4.bar()))
                .mul_poly(&pbar),
        );
        acc = acc.add(&RationalExpr::over_pole(LaurentPoly::one(), 3, 1).mul(&block));
        acc = acc.add(&RationalExpr::over_pole(
            pbar.mul(l4).mul(&l4.bar()),
            3,
            2,
        ));
    }
    acc.clear().map_err(|_| QvError::PoleCancellation { context: "vertex" })
}

/// The insertion-twisted square-root vertex `v~`, pre-relation, checked.
pub fn twisted_vertex(ch: &VertexCharacter) -> Result<LaurentPoly, QvError> {
    let v = assemble_vertex(ch, true)?;
    // rank zero
    if !v.rank().is_zero() {
        return Err(QvError::PoleCancellation { context: "vertex rank" });
    }
    // integer torus powers of the bracketed class
    let det = v.det_exponents();
    for d in det.iter().take(4) {
        if (d % BigInt::from(2)).abs() != BigInt::zero() {
            return Err(QvError::PoleCancellation { context: "vertex parity" });
        }
    }
    // the y-carrying part is exactly -y bar(W)
    let y_part = v.y_part(1);
    let expected = ch
        .w
        .bar()
        .mul(&LaurentPoly::monomial([0, 0, 0, 0, 1], BigInt::one()))
        .neg();
    if y_part != expected || v.sub(&y_part).y_part(0) != v.sub(&y_part) {
        return Err(QvError::PoleCancellation { context: "vertex y-part" });
    }
    // no fixed term with positive coefficient after the reduction
    let reduced = reduce_cy(&v);
    if let Some(c) = reduced.get(&KWeight::ZERO) {
        if c > &BigInt::zero() {
            return Err(QvError::FixedTermInDeformation);
        }
    }
    Ok(v)
}

/// The plain square root `v` (no insertion terms), pre-relation.
pub fn sqrt_vertex(ch: &VertexCharacter) -> Result<LaurentPoly, QvError> {
    assemble_vertex(ch, false)
}

/// The full (pre-square-root) vertex class `V`, pre-relation.
pub fn full_vertex(ch: &VertexCharacter) -> Result<LaurentPoly, QvError> {
    let mut z = RationalExpr::from_poly(ch.w.clone());
    for axis in 0..4 {
        if !ch.legs[axis].is_zero() {
            z = z.add(&RationalExpr::over_pole(ch.legs[axis].clone(), axis, 1));
        }
    }
    let z_bar = z.bar();
    let inv_all = LaurentPoly::monomial([-1, -1, -1, -1, 0], BigInt::one());
    let p1234 = one_minus_t(0)
        .mul(&one_minus_t(1))
        .mul(&one_minus_t(2))
        .mul(&one_minus_t(3));
    let mut acc = z.add(&z_bar.mul_poly(&inv_all));
    acc = acc.sub(&z.mul(&z_bar).mul_poly(&p1234.mul(&inv_all)));
    for axis in 0..4 {
        let leg = &ch.legs[axis];
        if leg.is_zero() {
            continue;
        }
        let mut inv_comp = [0i32; 5];
        let mut p_comp = LaurentPoly::one();
        for j in 0..4 {
            if j != axis {
                inv_comp[j] = -1;
                p_comp = p_comp.mul(&one_minus_t(j));
            }
        }
        let inv_comp = LaurentPoly::monomial(inv_comp, BigInt::one());
        let f = leg
            .neg()
            .add(&leg.bar().mul(&inv_comp))
            .sub(&p_comp.mul(&inv_comp).mul(leg).mul(&leg.bar()));
        acc = acc.add(&RationalExpr::over_pole(f, axis, 1));
    }
    acc.clear().map_err(|_| QvError::PoleCancellation { context: "full vertex" })
}

/// Checks `V = v + bar(v)` after the Calabi-Yau reduction (exact multiset
/// equality). Returns `false` on mismatch.
pub fn vertex_decomposition_check(ch: &VertexCharacter) -> Result<bool, QvError> {
    let v = sqrt_vertex(ch)?;
    let big_v = full_vertex(ch)?;
    Ok(reduce_cy(&big_v) == reduce_cy(&v.add(&v.bar())))
}

/// Edge classes in the standard orientation: the invariant line runs along
/// `x1`, the transverse coordinates sit in slots `2, 3, 4` and carry the
/// normal-bundle degrees `(m, m', m'')` in that order.
fn assemble_edge(
    lambda: &PlanePartition,
    degrees: EdgeDegrees,
    twisted: bool,
) -> Result<LaurentPoly, QvError> {
    let leg = leg_poly(0, lambda);
    let f = f_leg(0, &leg, twisted);
    let transformed = f.subst_t(&degrees.transition());
    let numerator = f.sub(&LaurentPoly::var(0).mul(&transformed));
    numerator
        .exact_divide(0)
        .map(|q| q.neg())
        .map_err(|_| QvError::PoleCancellation { context: "edge" })
}

/// The insertion-twisted square-root edge `e~`, pre-relation, checked.
pub fn twisted_edge(lambda: &PlanePartition, degrees: EdgeDegrees) -> Result<LaurentPoly, QvError> {
    let e = assemble_edge(lambda, degrees, true)?;
    if !e.rank().is_zero() {
        return Err(QvError::PoleCancellation { context: "edge rank" });
    }
    let reduced = reduce_cy(&e);
    if let Some(c) = reduced.get(&KWeight::ZERO) {
        if c > &BigInt::zero() {
            return Err(QvError::FixedTermInDeformation);
        }
    }
    Ok(e)
}

/// The plain square-root edge `e`.
pub fn sqrt_edge(lambda: &PlanePartition, degrees: EdgeDegrees) -> Result<LaurentPoly, QvError> {
    assemble_edge(lambda, degrees, false)
}

/// The full edge class `E`, pre-relation.
pub fn full_edge(lambda: &PlanePartition, degrees: EdgeDegrees) -> Result<LaurentPoly, QvError> {
    let leg = leg_poly(0, lambda);
    let inv234 = LaurentPoly::monomial([0, -1, -1, -1, 0], BigInt::one());
    let p234 = one_minus_t(1).mul(&one_minus_t(2)).mul(&one_minus_t(3));
    let f = leg
        .neg()
        .add(&leg.bar().mul(&inv234))
        .sub(&p234.mul(&inv234).mul(&leg).mul(&leg.bar()));
    let transformed = f.subst_t(&degrees.transition());
    let numerator = f.sub(&LaurentPoly::var(0).mul(&transformed));
    numerator
        .exact_divide(0)
        .map(|q| q.neg())
        .map_err(|_| QvError::PoleCancellation { context: "full edge" })
}

/// Checks `E = e + bar(e)` after reduction.
pub fn edge_decomposition_check(
    lambda: &PlanePartition,
    degrees: EdgeDegrees,
) -> Result<bool, QvError> {
    let e = sqrt_edge(lambda, degrees)?;
    let big_e = full_edge(lambda, degrees)?;
    Ok(reduce_cy(&big_e) == reduce_cy(&e.add(&e.bar())))
}

/// The expected `y`-part of the twisted edge at `t1 = 1`: minus `y` times
/// `bar(Z_edge)` corrected by the derivative of the transformed character.
/// Used as an independent check of the edge assembly.
pub fn edge_y_part_expected(lambda: &PlanePartition, degrees: EdgeDegrees) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for cell in lambda.cells() {
        let (a, b, h) = (cell[0], cell[1], cell[2]);
        let coeff = 1i64
            - degrees.m[0] as i64 * (a as i64 - 1)
            - degrees.m[1] as i64 * (b as i64 - 1)
            - degrees.m[2] as i64 * (h as i64 - 1);
        out.add_term([0, 1 - a, 1 - b, 1 - h, 1], BigInt::from(-coeff));
    }
    out
}

/// Serialize weight->multiplicity maps as `[{w: [c1,c2,c3,d], n}, ..]`
/// (JSON objects cannot key on tuples).
pub mod factor_map_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        w: [i32; 4],
        n: i64,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<KWeight, i64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = map
            .iter()
            .map(|(w, n)| Entry { w: [w.c[0], w.c[1], w.c[2], w.d], n: *n })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<KWeight, i64>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries
            .into_iter()
            .map(|e| (KWeight { c: [e.w[0], e.w[1], e.w[2]], d: e.w[3] }, e.n))
            .collect())
    }
}

/// A bracket value in factored form: the multiset of weights with signed
/// multiplicities representing `prod_w [tau^w]^{n_w}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredContribution {
    #[serde(with = "factor_map_serde")]
    pub factors: BTreeMap<KWeight, i64>,
    pub vanished: bool,
}

impl FactoredContribution {
    pub fn one() -> Self {
        Self { factors: BTreeMap::new(), vanished: false }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (w, n) in &other.factors {
            let e = factors.entry(*w).or_insert(0);
            *e += n;
            if *e == 0 {
                factors.remove(w);
            }
        }
        Self { factors, vanished: self.vanished || other.vanished }
    }

    /// Net count of factors, numerator minus denominator.
    pub fn rank_balance(&self) -> i64 {
        self.factors.values().sum()
    }

    /// Substitute torus exponents through an integer matrix (chart frames).
    /// Must be applied before the relation collapses information, so the
    /// caller passes pre-relation data through [`crate::laurent::LaurentPoly::subst_t`]
    /// instead where possible; this variant acts on reduced weights and is
    /// only valid for matrices preserving the relation ideal.
    pub fn scale_weights(&self, n: i32) -> Self {
        let mut factors = BTreeMap::new();
        for (w, k) in &self.factors {
            factors.insert(w.scale(n), *k);
        }
        Self { factors, vanished: self.vanished }
    }

    /// Canonical orientation of every factor: flipping `[w] -> [-w]` costs a
    /// sign per multiplicity. Returns the overall sign and the oriented map.
    pub fn canonical(&self) -> (i64, BTreeMap<KWeight, i64>) {
        let mut sign = 1i64;
        let mut out = BTreeMap::new();
        for (w, n) in &self.factors {
            let (flipped, cw) = w.canonical();
            if flipped && n % 2 != 0 {
                sign = -sign;
            }
            let e = out.entry(cw).or_insert(0);
            *e += n;
            if *e == 0 {
                out.remove(&cw);
            }
        }
        (sign, out)
    }

    /// Exact value at an evaluation point; vanished contributions are zero.
    pub fn eval(
        &self,
        pt: &crate::laurent::EvalPoint,
    ) -> Result<num_rational::BigRational, QvError> {
        use num_traits::Zero;
        if self.vanished {
            return Ok(num_rational::BigRational::zero());
        }
        let mut val = num_rational::BigRational::one();
        for (w, n) in &self.factors {
            let b = pt.bracket_value(w)?;
            if b.is_zero() {
                return Err(QvError::SingularPoint);
            }
            let mut p = num_rational::BigRational::one();
            for _ in 0..n.unsigned_abs() {
                p *= &b;
            }
            if *n > 0 {
                val *= p;
            } else {
                val /= p;
            }
        }
        Ok(val)
    }

    /// Substitute `y = t4` in every factor. A zero weight surfacing in the
    /// numerator kills the contribution; in the denominator it is an error.
    pub fn dim_reduce(&self) -> Result<Self, QvError> {
        let mut factors: BTreeMap<KWeight, i64> = BTreeMap::new();
        for (w, n) in &self.factors {
            let e = factors.entry(w.dim_reduce()).or_insert(0);
            *e += n;
        }
        factors.retain(|_, n| *n != 0);
        let mut vanished = self.vanished;
        if let Some(&n) = factors.get(&KWeight::ZERO) {
            if n < 0 {
                return Err(QvError::ZeroWeightDenominator);
            }
            vanished = true;
            factors.remove(&KWeight::ZERO);
        }
        Ok(Self { factors, vanished })
    }
}

/// Bracket of the negated class: weights with negative multiplicity in the
/// input become numerator factors, positive ones denominators. A zero weight
/// on the numerator side flags the contribution as vanished; on the
/// denominator side it is undefined.
pub fn bracket(reduced: &BTreeMap<KWeight, BigInt>) -> Result<FactoredContribution, QvError> {
    let mut out = FactoredContribution::one();
    for (w, c) in reduced {
        let n = i64::try_from(c.clone())
            .map_err(|_| QvError::InvalidInput("bracket multiplicity overflow".into()))?;
        if w.is_zero() {
            if n > 0 {
                return Err(QvError::ZeroWeightDenominator);
            }
            out.vanished = true;
            continue;
        }
        out.factors.insert(*w, -n);
    }
    Ok(out)
}
