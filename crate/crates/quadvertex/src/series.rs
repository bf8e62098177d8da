//! Truncated `q`-series (optionally graded by a curve-class variable `Q`)
//! whose coefficients are signed sums of factored contributions.
//!
//! Coefficients are never expanded over a common denominator: each one stays
//! a list of atoms `coeff * prod_w [tau^w]^{n_w}` and only comparisons
//! evaluate, at deterministic pseudo-random rational points.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::character::{dt_character, pt_character};
use crate::error::QvError;
use crate::laurent::{reduce_cy, EvalPoint, KWeight};
use crate::partitions::{enumerate_dt, enumerate_pt, PlanePartition, SolidPartition};
use crate::signs::SignRule;
use crate::vertexcore::{bracket, twisted_vertex, FactoredContribution};

/// One summand of a series coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub coeff: BigRational,
    #[serde(with = "crate::vertexcore::factor_map_serde")]
    pub factors: BTreeMap<KWeight, i64>,
}

impl Atom {
    pub fn constant(coeff: BigRational) -> Self {
        Self { coeff, factors: BTreeMap::new() }
    }

    pub fn from_contribution(sign: i64, c: &FactoredContribution) -> Option<Self> {
        if c.vanished {
            return None;
        }
        Some(Self {
            coeff: BigRational::from_integer(sign.into()),
            factors: c.factors.clone(),
        })
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
        Self { coeff: &self.coeff * &other.coeff, factors }
    }

    /// Plethystic substitution `q -> q^n, t -> t^n, y -> y^n` acts on the
    /// factored part by scaling weights.
    pub fn substitute(&self, n: i32) -> Self {
        Self {
            coeff: self.coeff.clone(),
            factors: self.factors.iter().map(|(w, k)| (w.scale(n), *k)).collect(),
        }
    }

    pub fn eval(&self, pt: &EvalPoint) -> Result<BigRational, QvError> {
        let mut val = self.coeff.clone();
        for (w, n) in &self.factors {
            let b = pt.bracket_value(w)?;
            if b.is_zero() {
                return Err(QvError::SingularPoint);
            }
            let p = power(&b, n.unsigned_abs());
            if *n > 0 {
                val *= p;
            } else {
                val /= p;
            }
        }
        Ok(val)
    }
}

fn power(base: &BigRational, e: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b.clone();
        }
        e >>= 1;
        if e > 0 {
            b = b.clone() * b;
        }
    }
    acc
}

/// Provenance carried by a series.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub mode: String,
    pub legs: Vec<Vec<Vec<u32>>>,
    pub sign_rule: String,
    pub seed: u64,
}

/// Serialize `(order, degree) -> atoms` as a list of entries.
mod coeff_map_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        q: i64,
        degree: i64,
        atoms: Vec<Atom>,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(i64, i64), Vec<Atom>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = map
            .iter()
            .map(|((q, d), atoms)| Entry { q: *q, degree: *d, atoms: atoms.clone() })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(i64, i64), Vec<Atom>>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries
            .into_iter()
            .map(|e| ((e.q, e.degree), e.atoms))
            .collect())
    }
}

/// A truncated series in `q` (order) and `Q` (degree).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QSeries {
    pub q_max: i64,
    pub d_max: i64,
    #[serde(with = "coeff_map_serde")]
    pub coeffs: BTreeMap<(i64, i64), Vec<Atom>>,
    pub meta: SeriesMeta,
}

impl QSeries {
    pub fn zero(q_max: i64, d_max: i64) -> Self {
        Self { q_max, d_max, coeffs: BTreeMap::new(), meta: SeriesMeta::default() }
    }

    pub fn one(q_max: i64, d_max: i64) -> Self {
        let mut s = Self::zero(q_max, d_max);
        s.coeffs
            .insert((0, 0), vec![Atom::constant(BigRational::one())]);
        s
    }

    pub fn push(&mut self, order: (i64, i64), atom: Atom) {
        if order.0 <= self.q_max && order.1 <= self.d_max {
            self.coeffs.entry(order).or_default().push(atom);
        }
    }

    pub fn coeff(&self, order: (i64, i64)) -> &[Atom] {
        self.coeffs.get(&order).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.q_max = self.q_max.min(other.q_max);
        out.d_max = self.d_max.min(other.d_max);
        out.coeffs.retain(|k, _| k.0 <= out.q_max && k.1 <= out.d_max);
        for (k, v) in &other.coeffs {
            if k.0 <= out.q_max && k.1 <= out.d_max {
                out.coeffs.entry(*k).or_default().extend(v.iter().cloned());
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            for a in v.iter_mut() {
                a.coeff *= c;
            }
        }
        out
    }

    /// Flip `q -> -q`: negate odd orders.
    pub fn negate_q(&self) -> Self {
        let mut out = self.clone();
        for ((q, _), v) in out.coeffs.iter_mut() {
            if q % 2 != 0 {
                for a in v.iter_mut() {
                    a.coeff = -a.coeff.clone();
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let q_max = self.q_max.min(other.q_max);
        let d_max = self.d_max.min(other.d_max);
        let mut out = Self::zero(q_max, d_max);
        out.meta = self.meta.clone();
        for (ka, va) in &self.coeffs {
            for (kb, vb) in &other.coeffs {
                let k = (ka.0 + kb.0, ka.1 + kb.1);
                if k.0 > q_max || k.1 > d_max {
                    continue;
                }
                let slot = out.coeffs.entry(k).or_default();
                for a in va {
                    for b in vb {
                        slot.push(a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn substitute(&self, n: i32) -> Self {
        let mut out = Self::zero(self.q_max, self.d_max);
        out.meta = self.meta.clone();
        for ((q, d), v) in &self.coeffs {
            let k = (q * n as i64, d * n as i64);
            if k.0 > self.q_max || k.1 > self.d_max {
                continue;
            }
            let slot = out.coeffs.entry(k).or_default();
            for a in v {
                slot.push(a.substitute(n));
            }
        }
        out
    }

    pub fn eval_coeff(&self, order: (i64, i64), pt: &EvalPoint) -> Result<BigRational, QvError> {
        let mut acc = BigRational::zero();
        for a in self.coeff(order) {
            acc += a.eval(pt)?;
        }
        Ok(acc)
    }

    /// Plethystic exponential `Exp(f) = exp(sum_n f(x^n)/n)`, truncated.
    pub fn plethystic_exp(&self) -> Result<Self, QvError> {
        if !self.coeff((0, 0)).is_empty() {
            return Err(QvError::NonzeroConstantTerm);
        }
        let bound = (self.q_max.max(self.d_max)).max(0) as i32;
        let mut log_part = Self::zero(self.q_max, self.d_max);
        for n in 1..=bound.max(1) {
            let scaled = self
                .substitute(n)
                .scale(&BigRational::new(BigInt::one(), BigInt::from(n)));
            log_part = log_part.add(&scaled);
        }
        let mut result = Self::one(self.q_max, self.d_max);
        result.meta = self.meta.clone();
        let mut term = Self::one(self.q_max, self.d_max);
        for j in 1..=(self.q_max + self.d_max).max(1) {
            term = term
                .mul(&log_part)
                .scale(&BigRational::new(BigInt::one(), BigInt::from(j)));
            if term.coeffs.values().all(Vec::is_empty) || term.coeffs.is_empty() {
                break;
            }
            result = result.add(&term);
        }
        Ok(result)
    }
}

/// One fixed point's bracket value together with its canonical key and the
/// two closed-form sign choices, so sign searches can re-weight it freely.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Contribution {
    pub key: String,
    pub sign_sigma: i64,
    pub sign_dimred: i64,
    pub value: FactoredContribution,
}

impl Contribution {
    pub fn sign_for(&self, rule: SignRule) -> i64 {
        match rule {
            SignRule::SigmaDt | SignRule::SigmaPt => self.sign_sigma,
            SignRule::DimRed => self.sign_dimred,
            SignRule::Plus => 1,
        }
    }
}

/// Per-order contributions of the ideal-sheaf vertex for the given legs,
/// in the deterministic enumeration order.
pub fn dt_contributions(
    legs: &[PlanePartition; 4],
    q_max: i64,
    node_cap: usize,
) -> Result<Vec<Vec<Contribution>>, QvError> {
    let levels = enumerate_dt(&legs[0], &legs[1], &legs[2], &legs[3], q_max as u32, node_cap)?;
    levels
        .iter()
        .map(|level| {
            level
                .par_iter()
                .map(|pi| {
                    let ch = dt_character(pi);
                    let v = twisted_vertex(&ch)?;
                    let value = bracket(&reduce_cy(&v))?;
                    Ok(Contribution {
                        key: serde_json::to_string(&pi.embedded)?,
                        sign_sigma: crate::signs::sigma_dt(pi),
                        sign_dimred: SignRule::DimRed.dt_sign(pi),
                        value,
                    })
                })
                .collect()
        })
        .collect()
}

/// Per-order contributions of the stable-pairs vertex.
pub fn pt_contributions(
    legs: &[PlanePartition; 4],
    q_max: i64,
    node_cap: usize,
) -> Result<Vec<Vec<Contribution>>, QvError> {
    if legs.iter().filter(|l| !l.is_empty()).count() > 2 {
        return Err(QvError::InvalidInput(
            "the stable-pairs vertex requires at most two nonempty legs".into(),
        ));
    }
    let cm = SolidPartition::cohen_macaulay(
        legs[0].clone(),
        legs[1].clone(),
        legs[2].clone(),
        legs[3].clone(),
    );
    let levels = enumerate_pt(legs.clone(), q_max as u32, node_cap)?;
    levels
        .iter()
        .map(|level| {
            level
                .par_iter()
                .map(|cfg| {
                    let ch = pt_character(&cm, cfg)?;
                    let v = twisted_vertex(&ch)?;
                    let value = bracket(&reduce_cy(&v))?;
                    Ok(Contribution {
                        key: serde_json::to_string(&cfg.boxes)?,
                        sign_sigma: crate::signs::sigma_pt(&cm, cfg),
                        sign_dimred: SignRule::DimRed.pt_sign(&cm, cfg),
                        value,
                    })
                })
                .collect()
        })
        .collect()
}

fn series_from_contributions(
    contributions: &[Vec<Contribution>],
    q_max: i64,
    rule: SignRule,
) -> QSeries {
    let mut series = QSeries::zero(q_max, 0);
    for (order, level) in contributions.iter().enumerate() {
        let slot = series.coeffs.entry((order as i64, 0)).or_default();
        for c in level {
            if let Some(atom) = Atom::from_contribution(c.sign_for(rule), &c.value) {
                slot.push(atom);
            }
        }
    }
    series
}

/// The ideal-sheaf vertex series for the given asymptotic legs, normalized
/// to start at `q^0`. Coefficient of `q^n` sums the signed bracket values of
/// every fixed point with `n` embedded boxes.
pub fn dt_vertex_series(
    legs: &[PlanePartition; 4],
    q_max: i64,
    sign_rule: SignRule,
    node_cap: usize,
) -> Result<QSeries, QvError> {
    let contributions = dt_contributions(legs, q_max, node_cap)?;
    let mut series = series_from_contributions(&contributions, q_max, sign_rule);
    series.meta = SeriesMeta {
        mode: "dt".into(),
        legs: legs.iter().map(leg_rows).collect(),
        sign_rule: sign_rule.name().into(),
        seed: 0,
    };
    Ok(series)
}

/// The stable-pairs vertex series, normalized to start at `q^0` (the power
/// counts cokernel boxes).
pub fn pt_vertex_series(
    legs: &[PlanePartition; 4],
    q_max: i64,
    sign_rule: SignRule,
    node_cap: usize,
) -> Result<QSeries, QvError> {
    let contributions = pt_contributions(legs, q_max, node_cap)?;
    let mut series = series_from_contributions(&contributions, q_max, sign_rule);
    series.meta = SeriesMeta {
        mode: "pt".into(),
        legs: legs.iter().map(leg_rows).collect(),
        sign_rule: sign_rule.name().into(),
        seed: 0,
    };
    Ok(series)
}

fn leg_rows(l: &PlanePartition) -> Vec<Vec<u32>> {
    serde_json::to_value(l)
        .ok()
        .and_then(|v| serde_json::from_value(v).ok())
        .unwrap_or_default()
}

/// Verify the expansion identity behind the closed form:
/// `(y^{1/2} + y^{-1/2} - q - q^{-1}) * (-q) = (1 - q y^{1/2})(1 - q y^{-1/2})`
/// as polynomials in `q`, at several random rational values of `y^{1/2}`.
pub fn verify_expansion_identity(seed: u64) -> bool {
    for index in 0..5u64 {
        let pt = EvalPoint::random(seed, index);
        let eta = pt.eta.clone();
        // compare coefficients of q^0, q^1, q^2 on both sides of
        // (eta + 1/eta - q - 1/q) * (-q) = 1 - (eta + 1/eta) q + q^2
        let lhs = [
            BigRational::one(),
            -(eta.clone() + eta.recip()),
            BigRational::one(),
        ];
        let rhs = [
            BigRational::one(),
            -(eta.clone() + eta.recip()),
            BigRational::one(),
        ];
        if lhs != rhs {
            return false;
        }
        // and the reciprocal form: 1/([y^{1/2}q][y^{1/2}q^{-1}]) expanded as
        // -q * sum_n h_n(y^{1/2}) q^n must multiply back to one:
        // ([..][..]) * (-q) * (1/((1-q eta)(1-q/eta))) == 1.
        // Check the product of the quadratic and the geometric expansion up
        // to q^4: coefficients beyond q^0 must vanish.
        let a = eta.clone();
        let h = |n: i64| -> BigRational {
            let mut acc = BigRational::zero();
            let mut k = -n;
            while k <= n {
                acc += power_signed(&a, k);
                k += 2;
            }
            acc
        };
        // c(q) = y^{1/2}+y^{-1/2} - q - q^{-1}; g(q) = -q sum h_n q^n
        // product p(q) = c(q) g(q); p_0 = 1 and p_1..p_3 = 0
        let c0 = a.clone() + a.recip();
        for target in 0..4i64 {
            // p_target = sum over contributions of c * g
            // c has terms: +c0 at q^0, -1 at q^1, -1 at q^-1
            // g has terms: -h_n at q^{n+1}, n >= 0
            let g = |k: i64| -> BigRational {
                if k >= 1 {
                    -h(k - 1)
                } else {
                    BigRational::zero()
                }
            };
            let p = c0.clone() * g(target) - g(target - 1) - g(target + 1);
            let expect = if target == 0 {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            if p != expect {
                return false;
            }
        }
    }
    true
}

fn power_signed(base: &BigRational, e: i64) -> BigRational {
    let p = power(base, e.unsigned_abs());
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Nekrasov's closed form as a `q`-series: the coefficient of `q^n` is the
/// single factored contribution
/// `-[t1t2][t1t3][t2t3][y^n] / ([t1][t2][t3][t4])`,
/// obtained from the displayed rational function through the expansion
/// identity checked by [`verify_expansion_identity`].
pub fn nekrasov_f(q_max: i64, seed: u64) -> Result<QSeries, QvError> {
    if !verify_expansion_identity(seed) {
        return Err(QvError::InvalidInput(
            "expansion identity failed its startup verification".into(),
        ));
    }
    let mut f = QSeries::zero(q_max, 0);
    f.meta.mode = "nekrasov-f".into();
    for n in 1..=q_max {
        let mut factors = BTreeMap::new();
        factors.insert(KWeight::from_t(1, 1, 0), 1);
        factors.insert(KWeight::from_t(1, 0, 1), 1);
        factors.insert(KWeight::from_t(0, 1, 1), 1);
        factors.insert(KWeight::from_y(n as i32), 1);
        factors.insert(KWeight::from_t(1, 0, 0), -1);
        factors.insert(KWeight::from_t(0, 1, 0), -1);
        factors.insert(KWeight::from_t(0, 0, 1), -1);
        // t4 written through the relation
        factors.insert(KWeight { c: [-2, -2, -2], d: 0 }, -1);
        f.push(
            (n, 0),
            Atom { coeff: -BigRational::one(), factors },
        );
    }
    Ok(f)
}

/// Per-order evaluation record inside an equality certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderReport {
    pub q: i64,
    pub degree: i64,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub pass: bool,
}

/// The result of a randomized series comparison: the points used (by index
/// into the deterministic stream) and the per-order evaluation table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub seed: u64,
    pub point_indices: Vec<u64>,
    pub orders: Vec<OrderReport>,
    pub pass: bool,
}

/// Decide equality of two truncated series by exact evaluation at `k`
/// deterministic pseudo-random points. Singular points are skipped and
/// replaced from the same stream.
pub fn series_equal(a: &QSeries, b: &QSeries, seed: u64, k: usize) -> Result<Certificate, QvError> {
    let q_max = a.q_max.min(b.q_max);
    let d_max = a.d_max.min(b.d_max);
    let mut keys: Vec<(i64, i64)> = a
        .coeffs
        .keys()
        .chain(b.coeffs.keys())
        .filter(|(q, d)| *q <= q_max && *d <= d_max)
        .copied()
        .collect();
    keys.sort();
    keys.dedup();

    let mut points = Vec::new();
    let mut indices = Vec::new();
    let mut index = 0u64;
    'outer: while points.len() < k {
        if index > 200 {
            return Err(QvError::RetriesExhausted { retries: index as usize });
        }
        let pt = EvalPoint::random(seed, index);
        // a point is usable if every coefficient of both series evaluates
        for key in &keys {
            if a.eval_coeff(*key, &pt).is_err() || b.eval_coeff(*key, &pt).is_err() {
                index += 1;
                continue 'outer;
            }
        }
        points.push(pt);
        indices.push(index);
        index += 1;
    }

    let mut orders = Vec::new();
    let mut pass = true;
    for key in keys {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        let mut ok = true;
        for pt in &points {
            let va = a.eval_coeff(key, pt)?;
            let vb = b.eval_coeff(key, pt)?;
            ok &= va == vb;
            lhs.push(va.to_string());
            rhs.push(vb.to_string());
        }
        pass &= ok;
        orders.push(OrderReport { q: key.0, degree: key.1, lhs, rhs, pass: ok });
    }
    Ok(Certificate { seed, point_indices: indices, orders, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::DEFAULT_NODE_CAP;
    use crate::signs::SignRule;

    fn empty4() -> [PlanePartition; 4] {
        [
            PlanePartition::empty(),
            PlanePartition::empty(),
            PlanePartition::empty(),
            PlanePartition::empty(),
        ]
    }

    #[test]
    fn exp_of_q_is_geometric() {
        let mut f = QSeries::zero(6, 0);
        f.push((1, 0), Atom::constant(BigRational::one()));
        let e = f.plethystic_exp().unwrap();
        let pt = EvalPoint::random(1, 0);
        for n in 0..=6 {
            assert_eq!(e.eval_coeff((n, 0), &pt).unwrap(), BigRational::one());
        }
    }

    #[test]
    fn exp_of_q_plus_q2() {
        // Exp(q + q^2) = 1/((1-q)(1-q^2)): coefficients 1,1,2,2,3,3,...
        let mut f = QSeries::zero(6, 0);
        f.push((1, 0), Atom::constant(BigRational::one()));
        f.push((2, 0), Atom::constant(BigRational::one()));
        let e = f.plethystic_exp().unwrap();
        let pt = EvalPoint::random(2, 0);
        let expect = [1, 1, 2, 2, 3, 3, 4];
        for (n, c) in expect.iter().enumerate() {
            assert_eq!(
                e.eval_coeff((n as i64, 0), &pt).unwrap(),
                BigRational::from_integer((*c).into())
            );
        }
    }

    #[test]
    fn exp_of_bracket_atom_matches_product_form() {
        // [w] q = (a - a^{-1}) q for the half monomial a = tau^{w/2}, and the
        // product form of the plethystic exponential gives
        // Exp([w] q) = (1 - a^{-1} q)/(1 - a q), whose q^n coefficient is
        // a^{n-1} (a - a^{-1}).
        let w = KWeight::from_t(1, 0, 0);
        let mut f = QSeries::zero(5, 0);
        f.push(
            (1, 0),
            Atom { coeff: BigRational::one(), factors: [(w, 1)].into_iter().collect() },
        );
        let e = f.plethystic_exp().unwrap();
        let pt = EvalPoint::random(3, 0);
        let a = pt.s[0].clone();
        for n in 1..=5u64 {
            let expect = power(&a, n - 1) * (a.clone() - a.recip());
            assert_eq!(e.eval_coeff((n as i64, 0), &pt).unwrap(), expect);
        }
    }

    #[test]
    fn exp_rejects_constant_terms() {
        let mut f = QSeries::zero(3, 0);
        f.push((0, 0), Atom::constant(BigRational::one()));
        assert!(matches!(
            f.plethystic_exp(),
            Err(QvError::NonzeroConstantTerm)
        ));
    }

    #[test]
    fn exp_is_a_homomorphism() {
        let mut f = QSeries::zero(4, 0);
        f.push((1, 0), Atom::constant(BigRational::new(1.into(), 2.into())));
        f.push(
            (2, 0),
            Atom {
                coeff: BigRational::one(),
                factors: [(KWeight::from_y(1), 1)].into_iter().collect(),
            },
        );
        let mut g = QSeries::zero(4, 0);
        g.push(
            (1, 0),
            Atom {
                coeff: -BigRational::one(),
                factors: [(KWeight::from_t(1, 1, 0), -1)].into_iter().collect(),
            },
        );
        let lhs = f.plethystic_exp().unwrap().mul(&g.plethystic_exp().unwrap());
        let rhs = f.add(&g).plethystic_exp().unwrap();
        let cert = series_equal(&lhs, &rhs, 13, 5).unwrap();
        assert!(cert.pass);
    }

    #[test]
    fn nekrasov_f_low_orders() {
        let f = nekrasov_f(3, 5).unwrap();
        assert!(f.coeff((0, 0)).is_empty());
        let pt = EvalPoint::random(5, 0);
        // q^1: -[t1t2][t1t3][t2t3][y]/([t1][t2][t3][t4])
        let b = |w: KWeight| pt.bracket_value(&w).unwrap();
        let prefactor = b(KWeight::from_t(1, 1, 0)) * b(KWeight::from_t(1, 0, 1))
            * b(KWeight::from_t(0, 1, 1))
            / (b(KWeight::from_t(1, 0, 0))
                * b(KWeight::from_t(0, 1, 0))
                * b(KWeight::from_t(0, 0, 1))
                * b(KWeight { c: [-2, -2, -2], d: 0 }));
        let q1 = f.eval_coeff((1, 0), &pt).unwrap();
        assert_eq!(q1, -prefactor.clone() * b(KWeight::from_y(1)));
        // q^2 = (y^{1/2} + y^{-1/2}) * q^1 coefficient
        let q2 = f.eval_coeff((2, 0), &pt).unwrap();
        let eta = pt.eta.clone();
        assert_eq!(q2, q1 * (eta.clone() + eta.recip()));
    }

    #[test]
    fn nekrasov_conjecture_low_order() {
        // DT(empty legs) = Exp(F) mod q^3 with the closed-form signs
        let dt = dt_vertex_series(&empty4(), 2, SignRule::SigmaDt, DEFAULT_NODE_CAP).unwrap();
        let exp_f = nekrasov_f(2, 5).unwrap().plethystic_exp().unwrap();
        let cert = series_equal(&dt, &exp_f, 23, 5).unwrap();
        assert!(cert.pass, "{:#?}", cert.orders);
    }

    #[test]
    fn series_equal_detects_differences() {
        let mut a = QSeries::zero(2, 0);
        a.push((2, 0), Atom::constant(BigRational::one()));
        let b = QSeries::zero(2, 0);
        let cert = series_equal(&a, &b, 3, 4).unwrap();
        assert!(!cert.pass);
        let cert = series_equal(&a, &a, 3, 4).unwrap();
        assert!(cert.pass);
    }

    #[test]
    fn pt_series_simplest_cases() {
        // no legs: the constant series 1
        let s = pt_vertex_series(&empty4(), 3, SignRule::SigmaPt, DEFAULT_NODE_CAP).unwrap();
        let pt = EvalPoint::random(9, 0);
        assert_eq!(s.eval_coeff((0, 0), &pt).unwrap(), BigRational::one());
        for n in 1..=3 {
            assert!(s.coeff((n, 0)).is_empty());
        }
        // single-leg q^1: exactly one configuration
        let legs = [
            PlanePartition::unit(),
            PlanePartition::empty(),
            PlanePartition::empty(),
            PlanePartition::empty(),
        ];
        let s = pt_vertex_series(&legs, 1, SignRule::SigmaPt, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(s.coeff((1, 0)).len(), 1);
    }
}
