//! The Inc/Dec point calculus and the polytope spanned by the points `Inc^n(z)`.
//!
//! Everything is exact. [`GadgetConstants`] carries λ, the start point `z`, δ
//! and ϱ together with the interval endpoints, which are stored rather than
//! recomputed so that a deliberately inconsistent set of constants can be
//! exercised by the lemma suites.

pub mod lemmas;

use std::fmt;
use std::sync::Mutex;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{fmt_fraction, rat, rational_sqrt, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),
    #[error("irrational endpoints: 1-4*lambda = {0} is not the square of a rational")]
    IrrationalEndpoints(String),
    #[error("lambda = {0} is not in (0,1/4)")]
    LambdaOutOfRange(String),
    #[error("gadget constraint violated: {0}")]
    Constraint(String),
    #[error("vertical line: both points have first component {0}")]
    VerticalLine(String),
    #[error("inconclusive: the query needs edges up to index {needed}, above the limit {limit}")]
    Inconclusive { needed: usize, limit: usize },
    #[error("weights sum to {0}, not 1")]
    WeightSum(String),
    #[error("weights must be positive and match the points")]
    BadWeights,
    #[error("point #{0} lies outside the polytope")]
    OutsideRegion(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vec2 {
    pub v1: Rat,
    pub v2: Rat,
}

impl Vec2 {
    pub fn new(v1: Rat, v2: Rat) -> Vec2 {
        Vec2 { v1, v2 }
    }

    pub fn scale(&self, w: &Rat) -> Vec2 {
        Vec2::new(&self.v1 * w, &self.v2 * w)
    }

    pub fn add(&self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.v1 + &o.v1, &self.v2 + &o.v2)
    }

    pub fn sub(&self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.v1 - &o.v1, &self.v2 - &o.v2)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_fraction(&self.v1), fmt_fraction(&self.v2))
    }
}

/// `(b - a) × (c - a)`; zero exactly when the three points are collinear.
pub fn cross(a: &Vec2, b: &Vec2, c: &Vec2) -> Rat {
    let (ab, ac) = (b.sub(a), c.sub(a));
    &ab.v1 * &ac.v2 - &ab.v2 * &ac.v1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetConstants {
    pub lambda: Rat,
    pub z: Vec2,
    pub delta: Rat,
    pub rho: Rat,
    pub i_lo: Rat,
    pub i_hi: Rat,
}

impl Default for GadgetConstants {
    /// λ = 14/225, z = (1/12, 1/15), δ = 1/11, ϱ = 1/13.
    fn default() -> Self {
        GadgetConstants::new(rat(14, 225), Vec2::new(rat(1, 12), rat(1, 15)), rat(1, 11), rat(1, 13))
            .expect("default constants are consistent")
    }
}

impl GadgetConstants {
    /// Derives the endpoints from λ and checks every constraint.
    pub fn new(lambda: Rat, z: Vec2, delta: Rat, rho: Rat) -> Result<GadgetConstants, GeometryError> {
        let (i_lo, i_hi) = interval_endpoints(&lambda)?;
        let c = GadgetConstants { lambda, z, delta, rho, i_lo, i_hi };
        c.validate()?;
        Ok(c)
    }

    /// Lower endpoint of `I_λ`, the limit of `Inc^n(z)₁`.
    pub fn beta_low(&self) -> &Rat {
        &self.i_lo
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let (lo, hi) = interval_endpoints(&self.lambda)?;
        if lo != self.i_lo || hi != self.i_hi {
            return Err(GeometryError::Constraint("stored endpoints do not match lambda".into()));
        }
        let z = &self.z;
        if !(self.i_lo < z.v1 && z.v1 < self.i_hi) {
            return Err(GeometryError::Constraint(format!("z1 = {} not in I_lambda", fmt_fraction(&z.v1))));
        }
        if !(Rat::zero() < z.v2 && z.v2 < Rat::one()) {
            return Err(GeometryError::Constraint(format!("z2 = {} not in (0,1)", fmt_fraction(&z.v2))));
        }
        if !(z.v2 < self.rho && self.rho < z.v1 && z.v1 < self.delta) {
            return Err(GeometryError::Constraint("need z2 < rho < z1 < delta".into()));
        }
        let two = Rat::from_integer(2.into());
        if &two * (&self.lambda + &self.delta + &z.v1 + &z.v2) >= Rat::one() {
            return Err(GeometryError::Constraint("need 2*lambda + 2*delta + 2*z1 + 2*z2 < 1".into()));
        }
        Ok(())
    }

    pub fn in_interval(&self, x: &Rat) -> bool {
        &self.i_lo < x && x < &self.i_hi
    }
}

/// Roots of `x² - x + λ`, which must be rational.
pub fn interval_endpoints(lambda: &Rat) -> Result<(Rat, Rat), GeometryError> {
    if !(lambda > &Rat::zero() && lambda < &rat(1, 4)) {
        return Err(GeometryError::LambdaOutOfRange(fmt_fraction(lambda)));
    }
    let disc = Rat::one() - lambda * Rat::from_integer(4.into());
    let root = rational_sqrt(&disc).ok_or_else(|| GeometryError::IrrationalEndpoints(fmt_fraction(&disc)))?;
    let half = rat(1, 2);
    Ok(((Rat::one() - &root) * &half, (Rat::one() + &root) * &half))
}

/// `Inc(v) = (λ/(1-v₁), v₂·λ/(1-v₁))`.
pub fn inc(c: &GadgetConstants, v: &Vec2) -> Result<Vec2, GeometryError> {
    let den = Rat::one() - &v.v1;
    if den.is_zero() {
        return Err(GeometryError::DivisionByZero("inc"));
    }
    let a = &c.lambda / den;
    Ok(Vec2::new(a.clone(), &v.v2 * a))
}

/// `Dec(v) = ((v₁-λ)/v₁, v₂/v₁)`.
pub fn dec(c: &GadgetConstants, v: &Vec2) -> Result<Vec2, GeometryError> {
    if v.v1.is_zero() {
        return Err(GeometryError::DivisionByZero("dec"));
    }
    Ok(Vec2::new((&v.v1 - &c.lambda) / &v.v1, &v.v2 / &v.v1))
}

pub fn slope(u: &Vec2, v: &Vec2) -> Result<Rat, GeometryError> {
    if u.v1 == v.v1 {
        return Err(GeometryError::VerticalLine(fmt_fraction(&u.v1)));
    }
    Ok((&v.v2 - &u.v2) / (&v.v1 - &u.v1))
}

/// Constants plus an append-only table of `Inc^n(z)`.
#[derive(Debug)]
pub struct Geometry {
    pub consts: GadgetConstants,
    vertices: Mutex<Vec<Vec2>>,
}

impl Clone for Geometry {
    fn clone(&self) -> Self {
        Geometry { consts: self.consts.clone(), vertices: Mutex::new(self.vertices.lock().expect("memo").clone()) }
    }
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry::new(GadgetConstants::default())
    }
}

impl Geometry {
    pub fn new(consts: GadgetConstants) -> Geometry {
        let z = consts.z.clone();
        Geometry { consts, vertices: Mutex::new(vec![z]) }
    }

    pub fn inc(&self, v: &Vec2) -> Result<Vec2, GeometryError> {
        inc(&self.consts, v)
    }

    pub fn dec(&self, v: &Vec2) -> Result<Vec2, GeometryError> {
        dec(&self.consts, v)
    }

    /// `Inc^n(z)`.
    pub fn inc_iter(&self, n: usize) -> Result<Vec2, GeometryError> {
        let mut memo = self.vertices.lock().expect("memo");
        while memo.len() <= n {
            let next = inc(&self.consts, memo.last().expect("seeded with z"))?;
            memo.push(next);
        }
        Ok(memo[n].clone())
    }

    /// Whether `v` lies in the polytope: `i_lo ≤ v₁ ≤ z₁`, `0 ≤ v₂ ≤ 1`, and on or
    /// above every edge line whose segment is not entirely left of `v`. Edges
    /// further left lie below the chain, so they cannot exclude `v`.
    pub fn in_region(&self, v: &Vec2, n_max: usize) -> Result<bool, GeometryError> {
        let c = &self.consts;
        if v.v1 < c.i_lo || v.v1 > c.z.v1 || v.v2 < Rat::zero() || v.v2 > Rat::one() {
            return Ok(false);
        }
        if v.v1 == c.i_lo {
            return Ok(true);
        }
        let mut n = 0;
        loop {
            let (p, q) = (self.inc_iter(n)?, self.inc_iter(n + 1)?);
            // negative: `v` is to the right of the upward edge direction, i.e. below it
            if cross(&q, &p, v) < Rat::zero() {
                return Ok(false);
            }
            if q.v1 < v.v1 {
                return Ok(true);
            }
            if n == n_max {
                return Err(GeometryError::Inconclusive { needed: n + 1, limit: n_max });
            }
            n += 1;
        }
    }

    /// Validates that a convex combination hitting the vertex `Inc^n(z)` uses
    /// only that vertex. Returns `true` when the implication holds.
    pub fn vertex_carrier_check(&self, points: &[Vec2], weights: &[Rat], n: usize) -> Result<bool, GeometryError> {
        if points.len() != weights.len() || weights.iter().any(|w| w <= &Rat::zero()) {
            return Err(GeometryError::BadWeights);
        }
        let total: Rat = weights.iter().sum();
        if !total.is_one() {
            return Err(GeometryError::WeightSum(fmt_fraction(&total)));
        }
        let depth = n + 64;
        for (i, p) in points.iter().enumerate() {
            if !self.in_region(p, depth)? {
                return Err(GeometryError::OutsideRegion(i));
            }
        }
        let mut mix = Vec2::new(Rat::zero(), Rat::zero());
        for (p, w) in points.iter().zip(weights) {
            mix = mix.add(&p.scale(w));
        }
        let vertex = self.inc_iter(n)?;
        Ok(mix != vertex || points.iter().all(|p| *p == vertex))
    }

    /// For `v` below the edge between `Inc^n(z)` and `Inc^{n+1}(z)`, the point
    /// `u` with `u₁ = Inc^{n+1}(z)₁` such that `v` lies on the segment `[u, Dec(u)]`.
    pub fn outlineseg_witness(&self, v: &Vec2, n: usize) -> Result<Vec2, GeometryError> {
        let (hi, lo) = (self.inc_iter(n)?, self.inc_iter(n + 1)?);
        if v.v1 < lo.v1 || v.v1 > hi.v1 {
            return Err(GeometryError::Precondition(format!("v1 not between the edge endpoints for n = {n}")));
        }
        if self.in_region(v, n + 64)? {
            return Err(GeometryError::Precondition("v lies in the polytope".into()));
        }
        let u1 = lo.v1;
        // slope(u, Dec(u)) = u₂(1-u₁)/k must equal slope(u, v) = (v₂-u₂)/(v₁-u₁)
        let k = &u1 * (Rat::one() - &u1) - &self.consts.lambda;
        let den = (Rat::one() - &u1) * (&v.v1 - &u1) + &k;
        if den.is_zero() {
            return Err(GeometryError::DivisionByZero("outlineseg_witness"));
        }
        Ok(Vec2::new(u1, &v.v2 * k / den))
    }

    /// Points file: `n x y` rows for `n = 0..=depth`, then one `edge` row per
    /// consecutive pair with its slope.
    pub fn points_file(&self, depth: usize) -> Result<String, GeometryError> {
        let mut out = String::new();
        for n in 0..=depth {
            let p = self.inc_iter(n)?;
            out.push_str(&format!("{n} {} {}\n", fmt_fraction(&p.v1), fmt_fraction(&p.v2)));
        }
        for n in 0..depth {
            let s = slope(&self.inc_iter(n + 1)?, &self.inc_iter(n)?)?;
            out.push_str(&format!("edge {n} {} {}\n", n + 1, fmt_fraction(&s)));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: (i64, i64), b: (i64, i64)) -> Vec2 {
        Vec2::new(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn endpoints() {
        assert_eq!(interval_endpoints(&rat(14, 225)).unwrap(), (rat(1, 15), rat(14, 15)));
        assert_eq!(interval_endpoints(&rat(3, 16)).unwrap(), (rat(1, 4), rat(3, 4)));
        assert!(matches!(interval_endpoints(&rat(14, 255)), Err(GeometryError::IrrationalEndpoints(_))));
        assert!(interval_endpoints(&rat(1, 4)).is_err());
    }

    #[test]
    fn inc_and_dec_values() {
        let c = GadgetConstants::default();
        let i = inc(&c, &c.z).unwrap();
        assert_eq!(i, v((56, 825), (56, 12375)));
        assert_eq!(dec(&c, &i).unwrap(), c.z);
        let lam = Vec2::new(c.lambda.clone(), rat(1, 7));
        assert_eq!(dec(&c, &lam).unwrap(), Vec2::new(rat(0, 1), rat(1, 7) / &c.lambda));
        assert!(inc(&c, &v((1, 1), (0, 1))).is_err());
        assert!(dec(&c, &v((0, 1), (1, 2))).is_err());
    }

    #[test]
    fn constants_are_checked() {
        assert!(GadgetConstants::new(rat(14, 255), v((1, 12), (1, 15)), rat(1, 11), rat(1, 13)).is_err());
        // rho above z1
        assert!(GadgetConstants::new(rat(14, 225), v((1, 12), (1, 15)), rat(1, 11), rat(1, 10)).is_err());
        assert_eq!(GadgetConstants::default().beta_low(), &rat(1, 15));
    }

    #[test]
    fn slopes() {
        assert_eq!(slope(&v((0, 1), (0, 1)), &v((1, 1), (1, 1))).unwrap(), rat(1, 1));
        let (a, b) = (v((1, 3), (1, 5)), v((2, 7), (4, 9)));
        assert_eq!(slope(&a, &b).unwrap(), slope(&b, &a).unwrap());
        assert!(slope(&a, &a).is_err());
    }

    #[test]
    fn region_examples() {
        let g = Geometry::default();
        for k in 0..6 {
            assert!(g.in_region(&g.inc_iter(k).unwrap(), 64).unwrap());
        }
        let z1 = g.consts.z.v1.clone();
        assert!(!g.in_region(&Vec2::new(z1, rat(0, 1)), 64).unwrap());
        assert!(g.in_region(&Vec2::new(rat(1, 15), rat(1, 1)), 64).unwrap());
        let deep = Vec2::new(g.inc_iter(20).unwrap().v1, rat(1, 2));
        assert!(matches!(g.in_region(&deep, 3), Err(GeometryError::Inconclusive { .. })));
    }

    #[test]
    fn vertex_carriers() {
        let g = Geometry::default();
        let (p1, p2, p3) = (g.inc_iter(1).unwrap(), g.inc_iter(2).unwrap(), g.inc_iter(3).unwrap());
        assert!(g.vertex_carrier_check(std::slice::from_ref(&p2), &[rat(1, 1)], 2).unwrap());
        let mix = p1.scale(&rat(1, 2)).add(&p3.scale(&rat(1, 2)));
        assert_ne!(mix, p2);
        assert!(g.vertex_carrier_check(&[p1.clone(), p3], &[rat(1, 2), rat(1, 2)], 2).unwrap());
        assert!(matches!(g.vertex_carrier_check(&[p1], &[rat(1, 2)], 1), Err(GeometryError::WeightSum(_))));
    }

    #[test]
    fn outline_segment() {
        let g = Geometry::default();
        let (hi, lo) = (g.inc_iter(0).unwrap(), g.inc_iter(1).unwrap());
        let x = (&hi.v1 + &lo.v1) * rat(1, 2);
        let below = Vec2::new(x, rat(1, 1000));
        let u = g.outlineseg_witness(&below, 0).unwrap();
        let d = g.dec(&u).unwrap();
        assert_eq!(cross(&u, &d, &below), rat(0, 1));
        assert!(u.v2 >= rat(0, 1) && u.v2 < lo.v2);
        let mid = u.add(&d).scale(&rat(1, 2));
        assert_eq!(g.outlineseg_witness(&mid, 0).unwrap(), u);
        assert!(g.outlineseg_witness(&hi, 0).is_err());
        // without the (1-u1) factor in the denominator the three points are not collinear
        let k = &u.v1 * (rat(1, 1) - &u.v1) - &g.consts.lambda;
        let short = &below.v2 * &k / (&below.v1 - &u.v1 + &k);
        let w = Vec2::new(u.v1.clone(), short);
        assert_ne!(cross(&w, &g.dec(&w).unwrap(), &below), rat(0, 1));
    }

    #[test]
    fn points_file_rows() {
        let g = Geometry::default();
        let text = g.points_file(4).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with("edge")).count(), 5);
        assert!(text.starts_with("0 1/12 1/15\n1 56/825 56/12375\n"));
    }
}
