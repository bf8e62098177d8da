//! Equivariant characters of fixed points.
//!
//! A vertex character is kept in redistributed form `Z = sum_i L_i/(1-t_i) + W`
//! where `L_i` is the leg cross-section character in its complementary
//! variables and `W` is the finite correction: embedded (or cokernel) boxes
//! with coefficient one plus, for each Cohen-Macaulay box, `1 - #legs`.
//! The correction is computed by closed formula, never by subtracting
//! truncated geometric series.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::QvError;
use crate::laurent::LaurentPoly;
use crate::partitions::{BoxConfiguration, PlanePartition, SolidPartition};

/// Character of a plane partition placed as the leg along `axis`, expressed
/// in the three complementary variables. One shared table fixes the variable
/// order for every caller:
/// axis 1 -> (t2,t3,t4), axis 2 -> (t1,t3,t4), axis 3 -> (t1,t2,t4),
/// axis 4 -> (t1,t2,t3).
pub fn leg_poly(axis: usize, pp: &PlanePartition) -> LaurentPoly {
    let slots: [usize; 3] = match axis {
        0 => [1, 2, 3],
        1 => [0, 2, 3],
        2 => [0, 1, 3],
        3 => [0, 1, 2],
        _ => unreachable!(),
    };
    let mut out = LaurentPoly::zero();
    for cell in pp.cells() {
        let mut e = [0i32; 5];
        for (pos, &slot) in slots.iter().enumerate() {
            e[slot] = cell[pos] - 1;
        }
        out.add_term(e, BigInt::one());
    }
    out
}

/// A fixed-point character in redistributed form.
#[derive(Clone, Debug)]
pub struct VertexCharacter {
    /// Leg characters by axis, already embedded in complementary variables.
    pub legs: [LaurentPoly; 4],
    /// Finite correction `W`.
    pub w: LaurentPoly,
    /// The `q`-exponent of this fixed point: renormalized volume on the
    /// ideal-sheaf side, cokernel length plus curve volume on the pair side.
    pub q_weight: i64,
}

impl VertexCharacter {
    pub fn leg_count_nonempty(&self) -> usize {
        self.legs.iter().filter(|l| !l.is_zero()).count()
    }

    /// `sum_i L_i (1 + t_i + .. + t_i^{N-1}) + W`: agrees with the naive box
    /// sum on `[0, N)^4` once `N` clears every finite feature.
    pub fn truncated(&self, n: i32) -> LaurentPoly {
        let mut acc = self.w.clone();
        for axis in 0..4 {
            if self.legs[axis].is_zero() {
                continue;
            }
            let mut geom = LaurentPoly::zero();
            for k in 0..n {
                let mut e = [0i32; 5];
                e[axis] = k;
                geom.add_term(e, BigInt::one());
            }
            acc = acc.add(&self.legs[axis].mul(&geom));
        }
        acc
    }
}

/// The finite CM correction shared by both sides: boxes lying in two or more
/// legs, weighted by `1 - #legs`.
fn cm_overlap_correction(pi: &SolidPartition) -> LaurentPoly {
    let bounds = pi.bounds();
    let mut w = LaurentPoly::zero();
    for i in 1..=bounds[0] {
        for j in 1..=bounds[1] {
            for k in 1..=bounds[2] {
                for l in 1..=bounds[3] {
                    let b = [i, j, k, l];
                    let legs = pi.legs_containing(b);
                    if legs >= 2 {
                        let e = [i - 1, j - 1, k - 1, l - 1, 0];
                        w.add_term(e, BigInt::from(1 - legs as i64));
                    }
                }
            }
        }
    }
    w
}

/// Character of a subscheme fixed point.
pub fn dt_character(pi: &SolidPartition) -> VertexCharacter {
    let legs = [
        leg_poly(0, pi.leg(0)),
        leg_poly(1, pi.leg(1)),
        leg_poly(2, pi.leg(2)),
        leg_poly(3, pi.leg(3)),
    ];
    let mut w = cm_overlap_correction(pi);
    for b in &pi.embedded {
        w.add_term([b[0] - 1, b[1] - 1, b[2] - 1, b[3] - 1, 0], BigInt::one());
    }
    VertexCharacter {
        legs,
        w,
        q_weight: pi.renormalized_volume(),
    }
}

/// Character of a stable-pair fixed point: Cohen-Macaulay curve plus box
/// configuration.
pub fn pt_character(
    cm: &SolidPartition,
    boxes: &BoxConfiguration,
) -> Result<VertexCharacter, QvError> {
    if !cm.embedded.is_empty() {
        return Err(QvError::InvalidInput(
            "the support curve of a stable pair has no embedded boxes".into(),
        ));
    }
    if boxes.legs != cm.asymptotics {
        return Err(QvError::IncompatibleLegs);
    }
    let legs = [
        leg_poly(0, cm.leg(0)),
        leg_poly(1, cm.leg(1)),
        leg_poly(2, cm.leg(2)),
        leg_poly(3, cm.leg(3)),
    ];
    let mut w = cm_overlap_correction(cm);
    for b in &boxes.boxes {
        w.add_term([b[0], b[1], b[2], b[3], 0], BigInt::one());
    }
    Ok(VertexCharacter {
        legs,
        w,
        q_weight: cm.renormalized_volume() + boxes.len() as i64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{enumerate_dt, enumerate_pt, DEFAULT_NODE_CAP};
    use num_traits::Zero;

    fn unit() -> PlanePartition {
        PlanePartition::unit()
    }

    fn empty() -> PlanePartition {
        PlanePartition::empty()
    }

    /// Naive character of the boxes of `pi` inside `[1, N]^4`.
    fn naive_box_sum(pi: &SolidPartition, n: i32) -> LaurentPoly {
        let mut acc = LaurentPoly::zero();
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    for l in 1..=n {
                        if pi.contains([i, j, k, l]) {
                            acc.add_term([i - 1, j - 1, k - 1, l - 1, 0], BigInt::one());
                        }
                    }
                }
            }
        }
        acc
    }

    #[test]
    fn one_box_character() {
        let pi = SolidPartition::point_like([[1, 1, 1, 1]]);
        let ch = dt_character(&pi);
        assert_eq!(ch.w, LaurentPoly::one());
        assert!(ch.legs.iter().all(|l| l.is_zero()));
        assert_eq!(ch.q_weight, 1);
    }

    #[test]
    fn single_leg_has_no_correction() {
        let cm = SolidPartition::cohen_macaulay(unit(), empty(), empty(), empty());
        let ch = dt_character(&cm);
        assert!(ch.w.is_zero());
        assert_eq!(ch.legs[0], LaurentPoly::one());
    }

    #[test]
    fn two_legs_correct_the_overlap() {
        let cm = SolidPartition::cohen_macaulay(unit(), unit(), empty(), empty());
        let ch = dt_character(&cm);
        assert_eq!(ch.w, LaurentPoly::monomial([0; 5], (-1).into()));
    }

    #[test]
    fn pt_examples() {
        let cm = SolidPartition::cohen_macaulay(unit(), empty(), empty(), empty());
        let b0 = BoxConfiguration::empty(cm.asymptotics.clone()).unwrap();
        let ch = pt_character(&cm, &b0).unwrap();
        assert!(ch.w.is_zero());
        assert_eq!(ch.q_weight, 0);

        let mut b1 = b0.clone();
        b1.boxes.insert([-1, 0, 0, 0]);
        let ch = pt_character(&cm, &b1).unwrap();
        assert_eq!(ch.w, LaurentPoly::monomial([-1, 0, 0, 0, 0], 1.into()));

        let cm2 = SolidPartition::cohen_macaulay(unit(), unit(), empty(), empty());
        let b = BoxConfiguration::empty(cm2.asymptotics.clone()).unwrap();
        let ch = pt_character(&cm2, &b).unwrap();
        assert_eq!(ch.w, LaurentPoly::monomial([0; 5], (-1).into()));
        assert_eq!(ch.q_weight, -1);
    }

    #[test]
    fn pt_rejects_mismatched_legs() {
        let cm = SolidPartition::cohen_macaulay(unit(), empty(), empty(), empty());
        let other = BoxConfiguration::empty([empty(), unit(), empty(), empty()]).unwrap();
        assert!(matches!(
            pt_character(&cm, &other),
            Err(QvError::IncompatibleLegs)
        ));
    }

    #[test]
    fn rank_of_w_is_the_q_weight() {
        let levels = enumerate_dt(&unit(), &unit(), &empty(), &empty(), 2, DEFAULT_NODE_CAP)
            .unwrap();
        for level in &levels {
            for pi in level {
                let ch = dt_character(pi);
                assert_eq!(ch.w.rank(), BigInt::from(ch.q_weight));
            }
        }
        let legs = [unit(), unit(), empty(), empty()];
        let cm = SolidPartition::cohen_macaulay(unit(), unit(), empty(), empty());
        for level in &enumerate_pt(legs, 2, DEFAULT_NODE_CAP).unwrap() {
            for cfg in level {
                let ch = pt_character(&cm, cfg).unwrap();
                assert_eq!(ch.w.rank(), BigInt::from(ch.q_weight));
            }
        }
    }

    #[test]
    fn truncation_consistency() {
        let mut pool: Vec<SolidPartition> = Vec::new();
        for legs in [
            (empty(), empty(), empty(), empty()),
            (unit(), empty(), empty(), empty()),
            (unit(), unit(), empty(), empty()),
            (empty(), unit(), empty(), unit()),
        ] {
            let levels =
                enumerate_dt(&legs.0, &legs.1, &legs.2, &legs.3, 2, DEFAULT_NODE_CAP).unwrap();
            for level in &levels {
                pool.extend(level.iter().cloned());
            }
        }
        for pi in &pool {
            let ch = dt_character(pi);
            let n = pi.bounds().iter().copied().max().unwrap() + 1;
            for nn in [n, n + 2] {
                let diff = ch.truncated(nn).sub(&naive_box_sum(pi, nn));
                assert!(diff.is_zero() || diff.rank().is_zero() && diff.is_zero());
                assert!(diff.is_zero(), "truncation mismatch at N={nn}");
            }
        }
    }
}
