//! Seeded exact property suites for the Inc/Dec calculus.
//!
//! Samples are rationals with bounded denominators drawn from `I_λ × (0,1)`.
//! One draw in eight is pushed against an endpoint of `I_λ`, where a wrong λ
//! shows up first. Membership tests use the stored endpoints, not ones derived
//! from λ.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cross, dec, inc, slope, GadgetConstants, Geometry, GeometryError, Vec2};
use crate::rational::{fmt_fraction, rat, Rat};

pub const DEFAULT_SEED: u64 = 0x5eed_2c0f;
pub const DEFAULT_MAX_DEN: i64 = 10_000;

pub const CHECKS: [&str; 6] =
    ["inc-stays-in-strip", "dec-inverts-inc", "inc-contracts", "slope-identity", "slope-strict", "segment-mapping"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub check: &'static str,
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub samples: usize,
    pub seed: u64,
    /// Number of exact checks performed per property.
    pub checked: BTreeMap<&'static str, usize>,
    pub counterexamples: Vec<Counterexample>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn failures(&self, check: &str) -> usize {
        self.counterexamples.iter().filter(|c| c.check == check).count()
    }
}

/// Draws a rational strictly between `lo` and `hi` with denominator at most `max_den`.
pub fn sample_between(rng: &mut ChaCha8Rng, lo: &Rat, hi: &Rat, max_den: i64, edge: bool) -> Option<Rat> {
    for _ in 0..64 {
        let q: i64 = rng.random_range((max_den / 2).max(1)..=max_den);
        let qb = BigInt::from(q);
        // smallest p with p/q > lo and largest with p/q < hi
        let p_lo: BigInt = (lo * Rat::from_integer(qb.clone())).floor().to_integer() + 1;
        let p_hi: BigInt = (hi * Rat::from_integer(qb.clone())).ceil().to_integer() - 1;
        if p_lo > p_hi {
            continue;
        }
        let (a, b) = (p_lo.to_i64()?, p_hi.to_i64()?);
        let p = if edge {
            let off: i64 = rng.random_range(0..=(b - a).min(3));
            if rng.random_bool(0.5) {
                a + off
            } else {
                b - off
            }
        } else {
            rng.random_range(a..=b)
        };
        return Some(Rat::new(BigInt::from(p), qb));
    }
    None
}

/// A fraction in `[0,1)` (or `[0,1]` when `closed`).
fn unit_fraction(rng: &mut ChaCha8Rng, max_den: i64, closed: bool) -> Rat {
    let q: i64 = rng.random_range(1..=max_den);
    let p: i64 = if closed { rng.random_range(0..=q) } else { rng.random_range(0..q) };
    rat(p, q)
}

pub fn sample_point(rng: &mut ChaCha8Rng, c: &GadgetConstants, max_den: i64) -> Vec2 {
    let edge = rng.random_ratio(1, 8);
    let v1 = sample_between(rng, &c.i_lo, &c.i_hi, max_den, edge).expect("I_lambda has rationals of small height");
    let v2 = sample_between(rng, &Rat::zero(), &Rat::one(), max_den, false).expect("(0,1) is non-empty");
    Vec2::new(v1, v2)
}

fn between(x: &Rat, a: &Rat, b: &Rat) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    lo <= x && x <= hi
}

/// Runs every property on `samples` seeded points.
pub fn run_suite(c: &GadgetConstants, samples: usize, seed: u64) -> Result<SuiteReport, GeometryError> {
    run_suite_with(c, samples, seed, DEFAULT_MAX_DEN)
}

pub fn run_suite_with(
    c: &GadgetConstants,
    samples: usize,
    seed: u64,
    max_den: i64,
) -> Result<SuiteReport, GeometryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport { samples, seed, ..SuiteReport::default() };
    let fail = |rep: &mut SuiteReport, check: &'static str, detail: String| {
        rep.counterexamples.push(Counterexample { check, detail });
    };
    for _ in 0..samples {
        let v = sample_point(&mut rng, c, max_den);
        let iv = inc(c, &v)?;
        let iiv = inc(c, &iv)?;

        *rep.checked.entry(CHECKS[0]).or_default() += 1;
        if !(c.in_interval(&iv.v1) && iv.v2 >= Rat::zero() && iv.v2 <= Rat::one()) {
            fail(&mut rep, CHECKS[0], format!("v = {v}, inc(v) = {iv}"));
        }

        *rep.checked.entry(CHECKS[1]).or_default() += 1;
        let back = dec(c, &iv)?;
        if back != v {
            fail(&mut rep, CHECKS[1], format!("v = {v}, dec(inc(v)) = {back}"));
        }

        *rep.checked.entry(CHECKS[2]).or_default() += 1;
        if iv.v1 >= v.v1 || (v.v2.is_positive() && iv.v2 >= v.v2) {
            fail(&mut rep, CHECKS[2], format!("v = {v}, inc(v) = {iv}"));
        }

        *rep.checked.entry(CHECKS[3]).or_default() += 1;
        let foot = Vec2::new(iiv.v1.clone(), Rat::zero());
        let (s1, s2) = (slope(&foot, &iv)?, slope(&iv, &v)?);
        if s1 != s2 {
            fail(&mut rep, CHECKS[3], format!("v = {v}: {} != {}", fmt_fraction(&s1), fmt_fraction(&s2)));
        }

        *rep.checked.entry(CHECKS[4]).or_default() += 1;
        let u = Vec2::new(iv.v1.clone(), &iv.v2 * unit_fraction(&mut rng, max_den, false));
        let du = dec(c, &u)?;
        let (lhs, rhs) = (slope(&u, &du)?, slope(&iv, &v)?);
        if lhs >= rhs {
            fail(&mut rep, CHECKS[4], format!("v = {v}, u = {u}: {} >= {}", fmt_fraction(&lhs), fmt_fraction(&rhs)));
        }

        *rep.checked.entry(CHECKS[5]).or_default() += 1;
        let t = unit_fraction(&mut rng, max_den, true);
        let w = iiv.scale(&(Rat::one() - &t)).add(&iv.scale(&t));
        let dw = dec(c, &w)?;
        if !cross(&iv, &v, &dw).is_zero() || !between(&dw.v1, &iv.v1, &v.v1) {
            fail(&mut rep, CHECKS[5], format!("v = {v}, u = {w}, dec(u) = {dw}"));
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitReport {
    pub depth: usize,
    pub strictly_decreasing: bool,
    /// `Inc^depth(z)₁ - i_lo`.
    pub gap: Rat,
    pub tolerance: Rat,
}

impl LimitReport {
    pub fn passed(&self) -> bool {
        self.strictly_decreasing && self.gap.is_positive() && self.gap < self.tolerance
    }
}

/// Checks that `Inc^n(z)₁ - i_lo` decreases strictly up to `depth` and ends below 10⁻⁶.
pub fn limit_proxy(g: &Geometry, depth: usize) -> Result<LimitReport, GeometryError> {
    let lo = g.consts.beta_low().clone();
    let mut prev = &g.inc_iter(0)?.v1 - &lo;
    let mut strictly_decreasing = true;
    for n in 1..=depth {
        let gap = &g.inc_iter(n)?.v1 - &lo;
        if gap >= prev {
            strictly_decreasing = false;
        }
        prev = gap;
    }
    let tolerance = Rat::new(BigInt::one(), BigInt::from(10).pow(6));
    Ok(LimitReport { depth, strictly_decreasing, gap: prev, tolerance })
}

/// Seeded in-region point sets whose mixtures are tested against a vertex.
/// Returns every counterexample found: a mixture equal to `Inc^n(z)` that uses
/// some other point.
pub fn vertex_suite(g: &Geometry, trials: usize, seed: u64) -> Result<Vec<Counterexample>, GeometryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..trials {
        let n = rng.random_range(0..6usize);
        let vertex = g.inc_iter(n)?;
        let k = rng.random_range(1..=4usize);
        // points spread around the vertex: vertex plus random offsets inside the region,
        // and their mirror images, which mix back to the vertex whenever both lie inside
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for _ in 0..k {
            let d = Vec2::new(rat(rng.random_range(-50..=50), 100_000), rat(rng.random_range(-50..=50), 100_000));
            let (a, b) = (vertex.add(&d), vertex.sub(&d));
            if g.in_region(&a, n + 64)? && g.in_region(&b, n + 64)? {
                points.push(a);
                points.push(b);
                weights.push(Rat::one());
                weights.push(Rat::one());
            }
        }
        if points.is_empty() {
            points.push(vertex.clone());
            weights.push(Rat::one());
        }
        let total: Rat = weights.iter().sum();
        let weights: Vec<Rat> = weights.iter().map(|w| w / &total).collect();
        if !g.vertex_carrier_check(&points, &weights, n)? {
            let shown: Vec<String> = points.iter().map(|p| p.to_string()).collect();
            out.push(Counterexample { check: "vertex-extremal", detail: format!("n = {n}: {}", shown.join(" ")) });
        }
    }
    Ok(out)
}
