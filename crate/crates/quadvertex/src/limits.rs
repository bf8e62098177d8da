//! The three specializations of the twisted vertex: dimensional reduction
//! `y = t4` checked against an independent 3-fold vertex, the cohomological
//! limit sending every bracket factor to its linear form, and the double
//! limit that regrades by the curve-class variable.
//!
//! The 3-fold vertex here is a deliberately separate code path sharing only
//! the Laurent-polynomial layer with the 4-fold classes; it exists to be an
//! oracle, not a dependency.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet};

use crate::error::QvError;
use crate::laurent::{reduce_cy, KWeight, LaurentPoly, RationalExpr};
use crate::partitions::{BoxConfiguration, PlanePartition, SolidPartition};
use crate::series::{Atom, QSeries};
use crate::vertexcore::{bracket, FactoredContribution};

/// A linear form `(c1 λ1 + c2 λ2 + c3 λ3 + d m) / 2` in doubled integer
/// coefficients, with `λ4` already eliminated as `-(λ1+λ2+λ3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearForm {
    pub l: [i64; 3],
    pub m: i64,
}

impl LinearForm {
    pub fn from_weight(w: &KWeight) -> Self {
        Self { l: [w.c[0] as i64, w.c[1] as i64, w.c[2] as i64], m: w.d as i64 }
    }

    pub fn is_zero(&self) -> bool {
        self.l == [0; 3] && self.m == 0
    }

    fn negated(&self) -> Self {
        Self { l: [-self.l[0], -self.l[1], -self.l[2]], m: -self.m }
    }

    /// Orient so the first nonzero coefficient is positive; reports a flip.
    pub fn canonical(&self) -> (bool, Self) {
        for v in self.l.iter().chain(std::iter::once(&self.m)) {
            if *v > 0 {
                return (false, *self);
            }
            if *v < 0 {
                return (true, self.negated());
            }
        }
        (false, *self)
    }

    pub fn eval(&self, lambda: &[BigRational; 3], m: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..3 {
            acc += BigRational::from_integer(self.l[i].into()) * &lambda[i];
        }
        acc += BigRational::from_integer(self.m.into()) * m;
        acc / BigRational::from_integer(2.into())
    }
}

/// A scalar times a quotient of products of linear forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFormProduct {
    pub scalar: BigRational,
    pub num: Vec<LinearForm>,
    pub den: Vec<LinearForm>,
}

impl LinearFormProduct {
    pub fn one() -> Self {
        Self { scalar: BigRational::one(), num: Vec::new(), den: Vec::new() }
    }

    pub fn zero() -> Self {
        Self { scalar: BigRational::zero(), num: Vec::new(), den: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    fn push(&mut self, form: LinearForm, mult: i64) {
        let (flipped, cf) = form.canonical();
        if flipped && mult % 2 != 0 {
            self.scalar = -self.scalar.clone();
        }
        for _ in 0..mult.unsigned_abs() {
            if mult > 0 {
                self.num.push(cf);
            } else {
                self.den.push(cf);
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.num.sort();
        self.den.sort();
        self
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.scalar *= &other.scalar;
        out.num.extend(other.num.iter().copied());
        out.den.extend(other.den.iter().copied());
        out.normalized()
    }

    pub fn eval(&self, lambda: &[BigRational; 3], m: &BigRational) -> Result<BigRational, QvError> {
        let mut acc = self.scalar.clone();
        if acc.is_zero() {
            return Ok(acc);
        }
        for f in &self.num {
            acc *= f.eval(lambda, m);
        }
        for f in &self.den {
            let v = f.eval(lambda, m);
            if v.is_zero() {
                return Err(QvError::SingularPoint);
            }
            acc /= v;
        }
        Ok(acc)
    }
}

/// Cohomological limit of a factored contribution: every bracket factor
/// becomes its linear form, numerator and denominator side preserved.
pub fn coho_limit_1(c: &FactoredContribution) -> Result<LinearFormProduct, QvError> {
    if c.vanished {
        return Ok(LinearFormProduct::zero());
    }
    if c.rank_balance() != 0 {
        return Err(QvError::InvalidInput(
            "cohomological limits require rank-balanced contributions".into(),
        ));
    }
    let mut out = LinearFormProduct::one();
    for (w, n) in &c.factors {
        let form = LinearForm::from_weight(w);
        if form.is_zero() {
            if *n < 0 {
                return Err(QvError::ZeroLinearForm);
            }
            return Ok(LinearFormProduct::zero());
        }
        out.push(form, *n);
    }
    Ok(out.normalized())
}

/// Double limit: `m`-carrying factors must net to exactly the `q`-power and
/// turn into the regrading `Q^{q_power}`; the `m`-free factors survive as an
/// equivariant Euler-class ratio. A leading coefficient `prod (d/2)^n` from
/// the `m`-factors multiplies the scalar.
pub fn coho_limit_2(
    c: &FactoredContribution,
    q_power: i64,
) -> Result<(LinearFormProduct, i64), QvError> {
    if c.vanished {
        return Ok((LinearFormProduct::zero(), q_power));
    }
    if c.rank_balance() != 0 {
        return Err(QvError::InvalidInput(
            "cohomological limits require rank-balanced contributions".into(),
        ));
    }
    let mut net_m: i64 = 0;
    let mut scalar = BigRational::one();
    let mut out = LinearFormProduct::one();
    for (w, n) in &c.factors {
        if w.d != 0 {
            net_m += n;
            let lead = BigRational::from_integer(BigInt::from(w.d / 2));
            let p = pow_signed(&lead, *n);
            scalar *= p;
        } else {
            let form = LinearForm::from_weight(w);
            if form.is_zero() {
                if *n < 0 {
                    return Err(QvError::ZeroLinearForm);
                }
                return Ok((LinearFormProduct::zero(), q_power));
            }
            out.push(form, *n);
        }
    }
    if net_m > q_power {
        return Err(QvError::DivergentLimit { got: net_m, expected: q_power });
    }
    if net_m < q_power {
        return Ok((LinearFormProduct::zero(), q_power));
    }
    out.scalar *= scalar;
    Ok((out.normalized(), q_power))
}

fn pow_signed(base: &BigRational, e: i64) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= base;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Substitute `y = t4` in every atom of a series, dropping contributions
/// that vanish.
pub fn dim_reduce_series(s: &QSeries) -> Result<QSeries, QvError> {
    let mut out = QSeries::zero(s.q_max, s.d_max);
    out.meta = s.meta.clone();
    out.meta.mode = format!("{}|y=t4", s.meta.mode);
    for (key, atoms) in &s.coeffs {
        let slot = out.coeffs.entry(*key).or_default();
        for a in atoms {
            let fc = FactoredContribution { factors: a.factors.clone(), vanished: false };
            let red = fc.dim_reduce()?;
            if !red.vanished {
                slot.push(Atom { coeff: a.coeff.clone(), factors: red.factors });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// the independent 3-fold vertex oracle
// ---------------------------------------------------------------------------

/// A line partition: weakly decreasing positive parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinePartition {
    parts: Vec<u32>,
}

impl LinePartition {
    pub fn new(parts: Vec<u32>) -> Result<Self, QvError> {
        if parts.iter().any(|&p| p == 0) || parts.windows(2).any(|w| w[1] > w[0]) {
            return Err(QvError::InvalidInput(
                "line partition parts must be positive and weakly decreasing".into(),
            ));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> i64 {
        self.parts.iter().map(|&p| p as i64).sum()
    }

    pub fn contains(&self, a: i32, b: i32) -> bool {
        a >= 1 && b >= 1 && self.parts.get((a - 1) as usize).is_some_and(|&p| b <= p as i32)
    }

    /// `(row count, largest part)`.
    pub fn extents(&self) -> (i32, i32) {
        (self.parts.len() as i32, self.parts.first().copied().unwrap_or(0) as i32)
    }

    pub fn cells(&self) -> Vec<[i32; 2]> {
        let mut out = Vec::new();
        for (a, &p) in self.parts.iter().enumerate() {
            for b in 1..=p {
                out.push([a as i32 + 1, b as i32]);
            }
        }
        out
    }

    /// Embed as a height-one plane partition (the hyperplane inclusion).
    pub fn as_plane_partition(&self) -> PlanePartition {
        PlanePartition::new(self.parts.iter().map(|&p| vec![1u32; p as usize]).collect())
            .expect("height-one embedding is always valid")
    }

    pub fn all_of_size(n: u32) -> Vec<LinePartition> {
        fn rec(remaining: u32, max_part: u32, acc: &mut Vec<u32>, out: &mut Vec<LinePartition>) {
            if remaining == 0 {
                out.push(LinePartition { parts: acc.clone() });
                return;
            }
            let top = remaining.min(max_part);
            for p in (1..=top).rev() {
                acc.push(p);
                rec(remaining - p, p, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n.max(1), &mut Vec::new(), &mut out);
        if n == 0 {
            return vec![LinePartition::empty()];
        }
        out
    }
}

/// A 3D partition with line-partition asymptotics and embedded boxes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partition3 {
    pub legs: [LinePartition; 3],
    pub embedded: BTreeSet<[i32; 3]>,
}

impl Partition3 {
    pub fn cohen_macaulay(legs: [LinePartition; 3]) -> Self {
        Self { legs, embedded: BTreeSet::new() }
    }

    pub fn leg_contains(&self, axis: usize, w: [i32; 3]) -> bool {
        let [i, j, k] = w;
        match axis {
            0 => self.legs[0].contains(j, k),
            1 => self.legs[1].contains(i, k),
            2 => self.legs[2].contains(i, j),
            _ => unreachable!(),
        }
    }

    pub fn legs_containing(&self, w: [i32; 3]) -> u32 {
        (0..3).filter(|&a| self.leg_contains(a, w)).count() as u32
    }

    pub fn cm_contains(&self, w: [i32; 3]) -> bool {
        if w.iter().any(|&c| c < 1) {
            return false;
        }
        (0..3).any(|a| self.leg_contains(a, w))
    }

    pub fn contains(&self, w: [i32; 3]) -> bool {
        self.cm_contains(w) || self.embedded.contains(&w)
    }

    pub fn bounds(&self) -> [i32; 3] {
        let (la, lb) = self.legs[0].extents();
        let (ma, mb) = self.legs[1].extents();
        let (na, nb) = self.legs[2].extents();
        let mut b = [ma.max(na), la.max(nb), lb.max(mb)];
        for w in &self.embedded {
            for i in 0..3 {
                b[i] = b[i].max(w[i]);
            }
        }
        for v in b.iter_mut() {
            *v += 1;
        }
        b
    }

    pub fn renormalized_volume(&self) -> i64 {
        let n = self.bounds().iter().copied().max().unwrap_or(1);
        let mut count = 0i64;
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    if self.contains([i, j, k]) {
                        count += 1;
                    }
                }
            }
        }
        count - (n as i64) * self.legs.iter().map(|l| l.size()).sum::<i64>()
    }

    fn addable(&self, w: [i32; 3]) -> bool {
        if self.contains(w) {
            return false;
        }
        (0..3).all(|i| {
            let mut p = w;
            p[i] -= 1;
            p[i] < 1 || self.contains(p)
        })
    }

    /// Convert to the hyperplane-embedded 4D solid partition.
    pub fn to_solid(&self) -> SolidPartition {
        let mut s = SolidPartition::cohen_macaulay(
            self.legs[0].as_plane_partition(),
            self.legs[1].as_plane_partition(),
            self.legs[2].as_plane_partition(),
            PlanePartition::empty(),
        );
        for w in &self.embedded {
            s.embedded.insert([w[0], w[1], w[2], 1]);
        }
        s
    }
}

/// All 3D partitions with given legs and up to `extra_max` embedded boxes.
pub fn enumerate_dt_3d(
    legs: [LinePartition; 3],
    extra_max: u32,
    node_cap: usize,
) -> Result<Vec<Vec<Partition3>>, QvError> {
    let cm = Partition3::cohen_macaulay(legs);
    let mut levels = vec![vec![cm]];
    let mut total = 1usize;
    for _ in 0..extra_max {
        let mut seen: HashSet<BTreeSet<[i32; 3]>> = HashSet::new();
        let mut next = Vec::new();
        for pi in levels.last().unwrap() {
            let b = pi.bounds();
            for i in 1..=b[0] {
                for j in 1..=b[1] {
                    for k in 1..=b[2] {
                        let w = [i, j, k];
                        if pi.addable(w) {
                            let mut cand = pi.clone();
                            cand.embedded.insert(w);
                            if seen.insert(cand.embedded.clone()) {
                                total += 1;
                                if total > node_cap {
                                    return Err(QvError::BudgetExceeded { cap: node_cap });
                                }
                                next.push(cand);
                            }
                        }
                    }
                }
            }
        }
        next.sort();
        levels.push(next);
    }
    Ok(levels)
}

/// A 3D box configuration over a Cohen-Macaulay curve with at most two legs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BoxConfig3 {
    pub legs: [LinePartition; 3],
    pub boxes: BTreeSet<[i32; 3]>,
}

impl BoxConfig3 {
    fn in_leg(&self, axis: usize, w: [i32; 3]) -> bool {
        let q: Vec<i32> = (0..3).filter(|&i| i != axis).map(|i| w[i] + 1).collect();
        self.legs[axis].contains(q[0], q[1])
    }

    fn region(&self, w: [i32; 3]) -> bool {
        if let Some(neg) = (0..3).find(|&i| w[i] < 0) {
            if w.iter().filter(|&&c| c < 0).count() > 1 {
                return false;
            }
            return self.in_leg(neg, w);
        }
        (0..3).filter(|&a| self.in_leg(a, w)).count() == 2
    }

    pub fn to_boxconfig4(&self) -> BoxConfiguration {
        let legs = [
            self.legs[0].as_plane_partition(),
            self.legs[1].as_plane_partition(),
            self.legs[2].as_plane_partition(),
            PlanePartition::empty(),
        ];
        let mut cfg = BoxConfiguration::empty(legs).expect("at most two legs");
        for w in &self.boxes {
            cfg.boxes.insert([w[0], w[1], w[2], 0]);
        }
        cfg
    }
}

/// All 3D box configurations of length up to `len_max`.
pub fn enumerate_pt_3d(
    legs: [LinePartition; 3],
    len_max: u32,
    node_cap: usize,
) -> Result<Vec<Vec<BoxConfig3>>, QvError> {
    if legs.iter().filter(|l| !l.is_empty()).count() > 2 {
        return Err(QvError::InvalidInput("at most two legs".into()));
    }
    let base = BoxConfig3 { legs, boxes: BTreeSet::new() };
    // candidate window
    let mut window = Vec::new();
    let mut lo = [0i32; 3];
    let mut hi = [0i32; 3];
    for axis in 0..3 {
        if !base.legs[axis].is_empty() {
            lo[axis] = -(len_max as i32);
        }
        let mut e = 0;
        for other in 0..3 {
            if other == axis || base.legs[other].is_empty() {
                continue;
            }
            let (ra, rb) = base.legs[other].extents();
            let pos = (0..3).filter(|&i| i != other).position(|i| i == axis).unwrap();
            e = e.max(if pos == 0 { ra } else { rb });
        }
        hi[axis] = e;
    }
    for i in lo[0]..hi[0] {
        for j in lo[1]..hi[1] {
            for k in lo[2]..hi[2] {
                let w = [i, j, k];
                if base.region(w) {
                    window.push(w);
                }
            }
        }
    }
    let mut levels = vec![vec![base]];
    let mut total = 1usize;
    for _ in 0..len_max {
        let mut seen: HashSet<BTreeSet<[i32; 3]>> = HashSet::new();
        let mut next = Vec::new();
        for cfg in levels.last().unwrap() {
            for &w in &window {
                if cfg.boxes.contains(&w) {
                    continue;
                }
                let ok = (0..3).all(|i| {
                    let mut s = w;
                    s[i] += 1;
                    !cfg.region(s) || cfg.boxes.contains(&s)
                });
                if ok {
                    let mut cand = cfg.clone();
                    cand.boxes.insert(w);
                    if seen.insert(cand.boxes.clone()) {
                        total += 1;
                        if total > node_cap {
                            return Err(QvError::BudgetExceeded { cap: node_cap });
                        }
                        next.push(cand);
                    }
                }
            }
        }
        next.sort();
        levels.push(next);
    }
    Ok(levels)
}

/// Leg characters of the 3-fold vertex in complementary variables:
/// axis 1 -> (t2,t3), axis 2 -> (t1,t3), axis 3 -> (t1,t2).
fn leg_poly_3d(axis: usize, lp: &LinePartition) -> LaurentPoly {
    let slots: [usize; 2] = match axis {
        0 => [1, 2],
        1 => [0, 2],
        2 => [0, 1],
        _ => unreachable!(),
    };
    let mut out = LaurentPoly::zero();
    for cell in lp.cells() {
        let mut e = [0i32; 5];
        e[slots[0]] = cell[0] - 1;
        e[slots[1]] = cell[1] - 1;
        out.add_term(e, BigInt::one());
    }
    out
}

fn one_minus_t(axis: usize) -> LaurentPoly {
    let mut e = [0i32; 5];
    e[axis] = 1;
    LaurentPoly::one().sub(&LaurentPoly::monomial(e, BigInt::one()))
}

/// The full equivariant 3-fold vertex class for a fixed point described by
/// its finite correction `w3` and leg characters. This mirrors the classical
/// redistribution: `Q - bar(Q)/t1t2t3 + Q bar(Q) (1-t1)(1-t2)(1-t3)/t1t2t3`
/// plus per-leg counterterms over `1 - t_i`.
fn vertex_class_3d(legs: &[LaurentPoly; 3], w3: &LaurentPoly) -> Result<LaurentPoly, QvError> {
    let mut z = RationalExpr::from_poly(w3.clone());
    for axis in 0..3 {
        if !legs[axis].is_zero() {
            z = z.add(&RationalExpr::over_pole(legs[axis].clone(), axis, 1));
        }
    }
    let z_bar = z.bar();
    let inv123 = LaurentPoly::monomial([-1, -1, -1, 0, 0], BigInt::one());
    let p123 = one_minus_t(0).mul(&one_minus_t(1)).mul(&one_minus_t(2));
    let mut acc = z.sub(&z_bar.mul_poly(&inv123));
    acc = acc.add(&z.mul(&z_bar).mul_poly(&p123.mul(&inv123)));
    for axis in 0..3 {
        let leg = &legs[axis];
        if leg.is_zero() {
            continue;
        }
        let (a, b) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            2 => (0, 1),
            _ => unreachable!(),
        };
        let mut inv_pair = [0i32; 5];
        inv_pair[a] = -1;
        inv_pair[b] = -1;
        let inv_pair = LaurentPoly::monomial(inv_pair, BigInt::one());
        let p_pair = one_minus_t(a).mul(&one_minus_t(b));
        let f = leg
            .neg()
            .sub(&leg.bar().mul(&inv_pair))
            .add(&p_pair.mul(&inv_pair).mul(leg).mul(&leg.bar()));
        acc = acc.add(&RationalExpr::over_pole(f, axis, 1));
    }
    acc.clear().map_err(|_| QvError::PoleCancellation { context: "3d vertex" })
}

fn w3_of_partition(pi: &Partition3) -> LaurentPoly {
    let b = pi.bounds();
    let mut w = LaurentPoly::zero();
    for i in 1..=b[0] {
        for j in 1..=b[1] {
            for k in 1..=b[2] {
                let v = [i, j, k];
                let legs = pi.legs_containing(v);
                if pi.cm_contains(v) && legs >= 2 {
                    w.add_term([i - 1, j - 1, k - 1, 0, 0], BigInt::from(1 - legs as i64));
                }
            }
        }
    }
    for v in &pi.embedded {
        w.add_term([v[0] - 1, v[1] - 1, v[2] - 1, 0, 0], BigInt::one());
    }
    w
}

/// The twisted-vertex analogue on the oracle side for a subscheme fixed
/// point: the full (not square-rooted) 3-fold vertex class.
pub fn vertex_3d_of_partition(pi: &Partition3) -> Result<LaurentPoly, QvError> {
    let legs = [
        leg_poly_3d(0, &pi.legs[0]),
        leg_poly_3d(1, &pi.legs[1]),
        leg_poly_3d(2, &pi.legs[2]),
    ];
    vertex_class_3d(&legs, &w3_of_partition(pi))
}

/// Same for a stable-pair fixed point over the Cohen-Macaulay curve.
pub fn vertex_3d_of_boxconfig(cfg: &BoxConfig3) -> Result<LaurentPoly, QvError> {
    let cm = Partition3::cohen_macaulay(cfg.legs.clone());
    let legs = [
        leg_poly_3d(0, &cfg.legs[0]),
        leg_poly_3d(1, &cfg.legs[1]),
        leg_poly_3d(2, &cfg.legs[2]),
    ];
    let mut w = w3_of_partition(&cm);
    for v in &cfg.boxes {
        w.add_term([v[0], v[1], v[2], 0, 0], BigInt::one());
    }
    vertex_class_3d(&legs, &w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode3d {
    Dt,
    Pt,
}

/// The 3-fold vertex series (normalized to start at `q^0`), used solely as
/// a dimensional-reduction oracle. Contributions carry no orientation signs.
pub fn vertex3d_oracle(
    legs: [LinePartition; 3],
    q_max: i64,
    mode: Mode3d,
    node_cap: usize,
) -> Result<QSeries, QvError> {
    let mut series = QSeries::zero(q_max, 0);
    series.meta.mode = match mode {
        Mode3d::Dt => "dt-3d".into(),
        Mode3d::Pt => "pt-3d".into(),
    };
    match mode {
        Mode3d::Dt => {
            for (extra, level) in enumerate_dt_3d(legs, q_max as u32, node_cap)?.iter().enumerate()
            {
                let slot = series.coeffs.entry((extra as i64, 0)).or_default();
                for pi in level {
                    let v = vertex_3d_of_partition(pi)?;
                    let c = bracket(&reduce_cy(&v))?;
                    if let Some(atom) = Atom::from_contribution(1, &c) {
                        slot.push(atom);
                    }
                }
            }
        }
        Mode3d::Pt => {
            for (len, level) in enumerate_pt_3d(legs, q_max as u32, node_cap)?.iter().enumerate() {
                let slot = series.coeffs.entry((len as i64, 0)).or_default();
                for cfg in level {
                    let v = vertex_3d_of_boxconfig(cfg)?;
                    let c = bracket(&reduce_cy(&v))?;
                    if let Some(atom) = Atom::from_contribution(1, &c) {
                        slot.push(atom);
                    }
                }
            }
        }
    }
    Ok(series)
}

// ---------------------------------------------------------------------------
// dense rational power series helpers for the MacMahon comparisons
// ---------------------------------------------------------------------------

/// Coefficients `0..=n` of MacMahon's generating function
/// `prod_k (1 - q^k)^{-k}`, by repeated geometric multiplication.
pub fn macmahon_coeffs(n: usize) -> Vec<BigRational> {
    let mut m = vec![BigRational::zero(); n + 1];
    m[0] = BigRational::one();
    for k in 1..=n {
        for _ in 0..k {
            let mut next = vec![BigRational::zero(); n + 1];
            for (i, slot) in next.iter_mut().enumerate() {
                let mut acc = BigRational::zero();
                let mut j = 0;
                while j <= i {
                    acc += m[i - j].clone();
                    j += k;
                }
                *slot = acc;
            }
            m = next;
        }
    }
    m
}

fn series_log(f: &[BigRational]) -> Vec<BigRational> {
    let n = f.len() - 1;
    assert!(f[0].is_one());
    let mut g = vec![BigRational::zero(); n + 1];
    for k in 1..=n {
        let mut acc = f[k].clone();
        for j in 1..k {
            let jr = BigRational::from_integer(BigInt::from(j));
            let kr = BigRational::from_integer(BigInt::from(k));
            acc -= jr / kr * g[j].clone() * f[k - j].clone();
        }
        g[k] = acc;
    }
    g
}

fn series_exp(g: &[BigRational]) -> Vec<BigRational> {
    let n = g.len() - 1;
    assert!(g[0].is_zero());
    let mut h = vec![BigRational::zero(); n + 1];
    h[0] = BigRational::one();
    for k in 1..=n {
        let mut acc = BigRational::zero();
        for j in 1..=k {
            let jr = BigRational::from_integer(BigInt::from(j));
            acc += jr * g[j].clone() * h[k - j].clone();
        }
        h[k] = acc / BigRational::from_integer(BigInt::from(k));
    }
    h
}

/// Coefficients of `M(-q)^E` for a rational exponent value.
pub fn macmahon_neg_pow(e: &BigRational, n: usize) -> Vec<BigRational> {
    let mut m = macmahon_coeffs(n);
    for (k, v) in m.iter_mut().enumerate() {
        if k % 2 == 1 {
            *v = -v.clone();
        }
    }
    let logm = series_log(&m);
    let scaled: Vec<BigRational> = logm.into_iter().map(|c| c * e).collect();
    series_exp(&scaled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::dt_character;
    use crate::laurent::SplitMix64;
    use crate::partitions::DEFAULT_NODE_CAP;
    use crate::series::{nekrasov_f, series_equal};
    use crate::signs::SignRule;
    use crate::vertexcore::twisted_vertex;

    fn rational_point(seed: u64) -> ([BigRational; 3], BigRational) {
        let mut rng = SplitMix64::new(seed);
        let mut draw = || {
            let num = 1 + (rng.next() % 23) as i64;
            let den = 1 + (rng.next() % 17) as i64;
            BigRational::new(BigInt::from(num), BigInt::from(den))
        };
        (
            [
                draw(),
                draw() + BigRational::from_integer(7.into()),
                draw() + BigRational::from_integer(29.into()),
            ],
            draw() + BigRational::from_integer(101.into()),
        )
    }

    fn one_box_contribution() -> FactoredContribution {
        let pi = SolidPartition::point_like([[1, 1, 1, 1]]);
        let v = twisted_vertex(&dt_character(&pi)).unwrap();
        bracket(&reduce_cy(&v)).unwrap()
    }

    #[test]
    fn one_box_limit_matches_closed_form() {
        let c = one_box_contribution();
        let lim = coho_limit_1(&c).unwrap();
        for seed in 0..5 {
            let (lambda, m) = rational_point(seed);
            let got = lim.eval(&lambda, &m).unwrap();
            let s = lambda[0].clone() + &lambda[1] + &lambda[2];
            let expect = m.clone()
                * (lambda[0].clone() + &lambda[1])
                * (lambda[0].clone() + &lambda[2])
                * (lambda[1].clone() + &lambda[2])
                / (lambda[0].clone() * &lambda[1] * &lambda[2] * -s.clone());
            assert_eq!(got, expect, "lambda4 carries the minus sign");
            // with the one-box sign the value is the displayed positive form
            let signed = -got;
            let display = m.clone()
                * (lambda[0].clone() + &lambda[1])
                * (lambda[0].clone() + &lambda[2])
                * (lambda[1].clone() + &lambda[2])
                / (lambda[0].clone() * &lambda[1] * &lambda[2] * s);
            assert_eq!(signed, display);
        }
    }

    #[test]
    fn simple_factor_limits() {
        // [t1]/[t2] -> lambda1/lambda2
        let mut c = FactoredContribution::one();
        c.factors.insert(KWeight::from_t(1, 0, 0), 1);
        c.factors.insert(KWeight::from_t(0, 1, 0), -1);
        let lim = coho_limit_1(&c).unwrap();
        let (lambda, m) = rational_point(3);
        assert_eq!(
            lim.eval(&lambda, &m).unwrap(),
            lambda[0].clone() / lambda[1].clone()
        );
        // vanished contributions limit to zero
        let mut v = FactoredContribution::one();
        v.vanished = true;
        assert!(coho_limit_1(&v).unwrap().is_zero());
    }

    #[test]
    fn double_limit_of_one_box() {
        let c = one_box_contribution();
        let (lim, qpow) = coho_limit_2(&c, 1).unwrap();
        assert_eq!(qpow, 1);
        let (lambda, m) = rational_point(1);
        let got = lim.eval(&lambda, &m).unwrap();
        let s = lambda[0].clone() + &lambda[1] + &lambda[2];
        let expect = (lambda[0].clone() + &lambda[1])
            * (lambda[0].clone() + &lambda[2])
            * (lambda[1].clone() + &lambda[2])
            / (lambda[0].clone() * &lambda[1] * &lambda[2] * -s);
        assert_eq!(got, expect);
    }

    #[test]
    fn hilbert_scheme_double_limit_vanishes_beyond_degree_one() {
        // the closed-form coefficients carry one m-factor each, so only the
        // q^1 coefficient survives the double limit
        let f = nekrasov_f(3, 5).unwrap();
        for n in 1..=3i64 {
            let atoms = f.coeff((n, 0));
            assert_eq!(atoms.len(), 1);
            let c = FactoredContribution { factors: atoms[0].factors.clone(), vanished: false };
            let (lim, _) = coho_limit_2(&c, n).unwrap();
            if n == 1 {
                let (lambda, m) = rational_point(n as u64);
                let s = lambda[0].clone() + &lambda[1] + &lambda[2];
                let expect = (lambda[0].clone() + &lambda[1])
                    * (lambda[0].clone() + &lambda[2])
                    * (lambda[1].clone() + &lambda[2])
                    / (lambda[0].clone() * &lambda[1] * &lambda[2] * -s);
                // atom sign is -1, so the coefficient value is -expect... the
                // sign lives on the atom, not the contribution
                assert_eq!(lim.eval(&lambda, &m).unwrap(), expect);
            } else {
                assert!(lim.is_zero(), "degree {n} must vanish");
            }
        }
    }

    #[test]
    fn limit_commutes_with_products() {
        let c = one_box_contribution();
        let prod = c.mul(&c);
        let (lambda, m) = rational_point(9);
        let l1 = coho_limit_1(&c).unwrap().eval(&lambda, &m).unwrap();
        let l2 = coho_limit_1(&prod).unwrap().eval(&lambda, &m).unwrap();
        assert_eq!(l2, l1.clone() * l1);
    }

    #[test]
    fn plane_partition_counts_from_oracle() {
        let empty = [LinePartition::empty(), LinePartition::empty(), LinePartition::empty()];
        let levels = enumerate_dt_3d(empty, 4, DEFAULT_NODE_CAP).unwrap();
        let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 6, 13]);
    }

    #[test]
    fn one_box_reduction_matches_oracle() {
        // dim-reduced 4D one-box bracket equals the 3D one-box vertex value
        let c = one_box_contribution().dim_reduce().unwrap();
        let pi3 = Partition3 {
            legs: [LinePartition::empty(), LinePartition::empty(), LinePartition::empty()],
            embedded: [[1, 1, 1]].into_iter().collect(),
        };
        let v3 = vertex_3d_of_partition(&pi3).unwrap();
        let c3 = bracket(&reduce_cy(&v3)).unwrap();
        assert_eq!(c.factors, c3.factors);
        assert!(!c.vanished);
    }

    #[test]
    fn off_hyperplane_boxes_vanish_under_reduction() {
        // the line along x1 with an embedded box sticking out of x4 = 0
        let mut pi = SolidPartition::cohen_macaulay(
            PlanePartition::unit(),
            PlanePartition::empty(),
            PlanePartition::empty(),
            PlanePartition::empty(),
        );
        pi.embedded.insert([1, 1, 1, 2]);
        let v = twisted_vertex(&dt_character(&pi)).unwrap();
        let c = bracket(&reduce_cy(&v)).unwrap();
        let red = c.dim_reduce().unwrap();
        assert!(red.vanished);
    }

    #[test]
    fn single_leg_vertex_reduction_matches_oracle_per_point() {
        // every hyperplane-supported fixed point with a single leg matches
        // the oracle's class exactly, weight multiset by weight multiset
        let legs3 = [
            LinePartition::new(vec![1]).unwrap(),
            LinePartition::empty(),
            LinePartition::empty(),
        ];
        let levels = enumerate_dt_3d(legs3, 2, DEFAULT_NODE_CAP).unwrap();
        for level in &levels {
            for pi3 in level {
                let v3 = vertex_3d_of_partition(pi3).unwrap();
                let pi4 = pi3.to_solid();
                let v4 = twisted_vertex(&dt_character(&pi4)).unwrap();
                let c4 = bracket(&reduce_cy(&v4)).unwrap().dim_reduce().unwrap();
                let c3 = bracket(&reduce_cy(&v3)).unwrap();
                assert_eq!(c4.factors, c3.factors);
                assert_eq!(c4.vanished, c3.vanished);
            }
        }
    }

    #[test]
    fn dimred_series_identity_single_leg() {
        // V4D(sign = dimred)|_{y=t4}(q) = V3D(-q), here to order q^2
        use crate::series::dt_vertex_series;
        let legs4 = [
            LinePartition::new(vec![1]).unwrap().as_plane_partition(),
            PlanePartition::empty(),
            PlanePartition::empty(),
            PlanePartition::empty(),
        ];
        let s4 = dt_vertex_series(&legs4, 2, SignRule::DimRed, DEFAULT_NODE_CAP).unwrap();
        let reduced = dim_reduce_series(&s4).unwrap();
        let legs3 = [
            LinePartition::new(vec![1]).unwrap(),
            LinePartition::empty(),
            LinePartition::empty(),
        ];
        let oracle = vertex3d_oracle(legs3, 2, Mode3d::Dt, DEFAULT_NODE_CAP)
            .unwrap()
            .negate_q();
        let cert = series_equal(&reduced, &oracle, 31, 5).unwrap();
        assert!(cert.pass, "{:#?}", cert.orders);
    }

    #[test]
    fn macmahon_series_helpers() {
        let m = macmahon_coeffs(5);
        let expect = [1i64, 1, 3, 6, 13, 24];
        for (k, e) in expect.iter().enumerate() {
            assert_eq!(m[k], BigRational::from_integer((*e).into()));
        }
        // M(-q)^1 is just M(-q)
        let p = macmahon_neg_pow(&BigRational::one(), 4);
        assert_eq!(p[1], BigRational::from_integer((-1).into()));
        assert_eq!(p[2], BigRational::from_integer(3.into()));
        assert_eq!(p[3], BigRational::from_integer((-6).into()));
    }

    #[test]
    fn macmahon_limit_of_closed_form() {
        // limit-I of Exp(F) with m specialized to minus the bundle weight
        // equals M(-q)^E with E = m e3 / e4, checked at rational points
        let q_max = 3i64;
        let exp_f = nekrasov_f(q_max, 5).unwrap().plethystic_exp().unwrap();
        for seed in 0..3u64 {
            let (lambda, _) = rational_point(seed);
            // bundle weight (d1..d4), m = -(d . lambda)
            let d = [1i64, -1, 2, 1];
            let l4 = -(lambda[0].clone() + &lambda[1] + &lambda[2]);
            let m = -(BigRational::from_integer(d[0].into()) * &lambda[0]
                + BigRational::from_integer(d[1].into()) * &lambda[1]
                + BigRational::from_integer(d[2].into()) * &lambda[2]
                + BigRational::from_integer(d[3].into()) * &l4);
            // E = m * e3 / e4 with lambda4 eliminated
            let e3 = lambda[0].clone() * &lambda[1] * &lambda[2]
                + lambda[0].clone() * &lambda[1] * &l4
                + lambda[0].clone() * &lambda[2] * &l4
                + lambda[1].clone() * &lambda[2] * &l4;
            let e4 = lambda[0].clone() * &lambda[1] * &lambda[2] * &l4;
            let e_exp = m.clone() * e3 / e4;
            let target = macmahon_neg_pow(&e_exp, q_max as usize);
            for n in 0..=q_max {
                let mut acc = BigRational::zero();
                for atom in exp_f.coeff((n, 0)) {
                    let fc = FactoredContribution {
                        factors: atom.factors.clone(),
                        vanished: false,
                    };
                    let lim = coho_limit_1(&fc).unwrap();
                    acc += atom.coeff.clone() * lim.eval(&lambda, &m).unwrap();
                }
                // the q -> -q regrading sits between the two conventions
                let expect = if n % 2 == 0 {
                    target[n as usize].clone()
                } else {
                    -target[n as usize].clone()
                };
                assert_eq!(acc, expect, "order {n}");
            }
        }
    }
}
