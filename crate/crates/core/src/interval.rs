//! Floating-point interval arithmetic with outward rounding.
//!
//! Every operation returns an interval guaranteed to contain the exact
//! real image of its inputs. Bounds are computed in round-to-nearest and
//! then stepped one unit in the last place outward, except when an
//! error-free transformation proves the rounded result exact (in which
//! case the step is skipped and the bound is tight). No hardware rounding
//! modes are touched, so values are portable across targets.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Magnitudes below this are treated as potentially-underflowing: the
/// error-free transformations used to detect exact results are not
/// reliable once residuals fall out of the subnormal range, so bounds
/// this small are always stepped outward.
const UNDERFLOW_GUARD: f64 = 1e-300;

/// Number of ulp steps applied around libm transcendentals (exp, log,
/// sin, cos), which are faithful but not correctly rounded.
const LIBM_SLOP_STEPS: u32 = 3;

#[inline]
fn step_down(v: f64, n: u32) -> f64 {
    let mut v = v;
    for _ in 0..n {
        v = v.next_down();
    }
    v
}

#[inline]
fn step_up(v: f64, n: u32) -> f64 {
    let mut v = v;
    for _ in 0..n {
        v = v.next_up();
    }
    v
}

/// Exact rounding error of a floating-point addition (Knuth's TwoSum).
#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    debug_assert!(!a.is_nan() && !b.is_nan());
    let s = a + b;
    if s.is_infinite() {
        if s == f64::INFINITY && a.is_finite() && b.is_finite() {
            return f64::MAX;
        }
        return s;
    }
    let e = two_sum_err(a, b, s);
    if e < 0.0 || !e.is_finite() {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    debug_assert!(!a.is_nan() && !b.is_nan());
    let s = a + b;
    if s.is_infinite() {
        if s == f64::NEG_INFINITY && a.is_finite() && b.is_finite() {
            return f64::MIN;
        }
        return s;
    }
    let e = two_sum_err(a, b, s);
    if e > 0.0 || !e.is_finite() {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub(crate) fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Product of two bounds, rounded toward -inf. Follows the interval
/// endpoint convention 0 * inf = 0.
#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    debug_assert!(!a.is_nan() && !b.is_nan());
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.is_infinite() {
        if p == f64::INFINITY && a.is_finite() && b.is_finite() {
            return f64::MAX;
        }
        return p;
    }
    if p.abs() < UNDERFLOW_GUARD {
        return p.next_down();
    }
    let e = f64::mul_add(a, b, -p);
    if e < 0.0 || !e.is_finite() {
        p.next_down()
    } else {
        p
    }
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    debug_assert!(!a.is_nan() && !b.is_nan());
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.is_infinite() {
        if p == f64::NEG_INFINITY && a.is_finite() && b.is_finite() {
            return f64::MIN;
        }
        return p;
    }
    if p.abs() < UNDERFLOW_GUARD {
        return p.next_up();
    }
    let e = f64::mul_add(a, b, -p);
    if e > 0.0 || !e.is_finite() {
        p.next_up()
    } else {
        p
    }
}

/// Quotient of two bounds, rounded toward -inf. The divisor must be
/// nonzero (zero denominators are resolved by the interval division
/// case analysis before bound arithmetic happens).
#[inline]
pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    debug_assert!(!a.is_nan() && !b.is_nan() && b != 0.0);
    if a == 0.0 {
        return 0.0;
    }
    if b.is_infinite() {
        return if a.is_infinite() { f64::NEG_INFINITY } else { a / b };
    }
    let q = a / b;
    if q.is_infinite() {
        if q == f64::INFINITY && a.is_finite() {
            return f64::MAX;
        }
        return q;
    }
    if q.abs() < UNDERFLOW_GUARD || a.abs() < UNDERFLOW_GUARD {
        return q.next_down();
    }
    // residual = q*b - a; q overshoots the true quotient iff the
    // residual has the same sign as b
    let e = f64::mul_add(q, b, -a);
    let overshoot = if b > 0.0 { e > 0.0 } else { e < 0.0 };
    if overshoot || !e.is_finite() {
        q.next_down()
    } else {
        q
    }
}

#[inline]
pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    debug_assert!(!a.is_nan() && !b.is_nan() && b != 0.0);
    if a == 0.0 {
        return 0.0;
    }
    if b.is_infinite() {
        return if a.is_infinite() { f64::INFINITY } else { a / b };
    }
    let q = a / b;
    if q.is_infinite() {
        if q == f64::NEG_INFINITY && a.is_finite() {
            return f64::MIN;
        }
        return q;
    }
    if q.abs() < UNDERFLOW_GUARD || a.abs() < UNDERFLOW_GUARD {
        return q.next_up();
    }
    let e = f64::mul_add(q, b, -a);
    let undershoot = if b > 0.0 { e < 0.0 } else { e > 0.0 };
    if undershoot || !e.is_finite() {
        q.next_up()
    } else {
        q
    }
}

/// Square root rounded toward -inf. IEEE sqrt is correctly rounded, so
/// the residual test yields the exact directed rounding.
#[inline]
pub(crate) fn sqrt_down(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 || x.is_infinite() {
        return x.sqrt();
    }
    let r = x.sqrt();
    if x < UNDERFLOW_GUARD {
        return r.next_down().max(0.0);
    }
    let e = f64::mul_add(r, r, -x);
    if e > 0.0 || !e.is_finite() {
        r.next_down()
    } else {
        r
    }
}

#[inline]
pub(crate) fn sqrt_up(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 || x.is_infinite() {
        return x.sqrt();
    }
    let r = x.sqrt();
    if x < UNDERFLOW_GUARD {
        return r.next_up();
    }
    let e = f64::mul_add(r, r, -x);
    if e < 0.0 || !e.is_finite() {
        r.next_up()
    } else {
        r
    }
}

fn exp_down(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return f64::MAX;
    }
    if x == 0.0 {
        return 1.0;
    }
    let v = x.exp();
    if v.is_infinite() {
        return f64::MAX;
    }
    step_down(v, LIBM_SLOP_STEPS).max(0.0)
}

fn exp_up(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        // exp is strictly positive; the limit 0 is approached from above
        return f64::MIN_POSITIVE;
    }
    if x == f64::INFINITY {
        return f64::INFINITY;
    }
    if x == 0.0 {
        return 1.0;
    }
    let v = x.exp();
    if v.is_infinite() {
        return v;
    }
    step_up(v, LIBM_SLOP_STEPS)
}

fn ln_down(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if x == 1.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::MAX;
    }
    step_down(x.ln(), LIBM_SLOP_STEPS)
}

fn ln_up(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if x == 1.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    step_up(x.ln(), LIBM_SLOP_STEPS)
}

fn sin_down(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    step_down(x.sin(), LIBM_SLOP_STEPS).max(-1.0)
}

fn sin_up(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    step_up(x.sin(), LIBM_SLOP_STEPS).min(1.0)
}

fn cos_down(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    step_down(x.cos(), LIBM_SLOP_STEPS).max(-1.0)
}

fn cos_up(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    step_up(x.cos(), LIBM_SLOP_STEPS).min(1.0)
}

/// A closed interval with floating-point bounds, possibly unbounded on
/// either side. The empty interval is the distinguished sentinel with
/// `lo > hi`; bounds are never NaN.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// The empty set.
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };

    /// The whole real line.
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Builds `[lo, hi]`. Panics if the bounds are NaN or inverted.
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(!lo.is_nan() && !hi.is_nan(), "interval bounds must not be NaN");
        assert!(lo <= hi, "inverted interval bounds: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// Builds `[lo, hi]`, collapsing inverted bounds to the empty set.
    pub fn checked(lo: f64, hi: f64) -> Interval {
        assert!(!lo.is_nan() && !hi.is_nan(), "interval bounds must not be NaN");
        if lo <= hi {
            Interval { lo, hi }
        } else {
            Interval::EMPTY
        }
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Set containment: does `self` contain every point of `other`?
    #[inline]
    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.is_empty() || (self.lo <= other.lo && other.hi <= self.hi)
    }

    /// Width `hi - lo`, rounded up. Empty intervals have width 0.
    pub fn width(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            sub_up(self.hi, self.lo)
        }
    }

    /// A representative inner point. For half-unbounded intervals the
    /// finite bound is offset by a large fixed constant so that search
    /// probes stay usable; the midpoint of the whole line is 0.
    pub fn midpoint(&self) -> f64 {
        const UNBOUNDED_OFFSET: f64 = 1e8;
        debug_assert!(!self.is_empty());
        match (self.lo.is_infinite(), self.hi.is_infinite()) {
            (true, true) => 0.0,
            (true, false) => self.hi - UNBOUNDED_OFFSET,
            (false, true) => self.lo + UNBOUNDED_OFFSET,
            (false, false) => {
                let m = 0.5 * (self.lo + self.hi);
                let m = if m.is_finite() {
                    m
                } else {
                    0.5 * self.lo + 0.5 * self.hi
                };
                m.clamp(self.lo, self.hi)
            }
        }
    }

    /// Magnitude: the largest absolute value in the interval.
    pub fn mag(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.lo.abs().max(self.hi.abs())
        }
    }

    /// Smallest interval containing both operands; the empty interval is
    /// the identity.
    pub fn hull(&self, other: &Interval) -> Interval {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Exact set intersection.
    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::EMPTY;
        }
        Interval::checked(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Image of x^2 (tighter than `self * self` when the interval
    /// straddles zero).
    pub fn sqr(&self) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b) = (self.lo, self.hi);
        if a >= 0.0 {
            Interval::new(mul_down(a, a), mul_up(b, b))
        } else if b <= 0.0 {
            Interval::new(mul_down(b, b), mul_up(a, a))
        } else {
            Interval::new(0.0, mul_up(a, a).max(mul_up(b, b)))
        }
    }

    /// Square root after intersecting with the domain [0, +inf).
    /// Entirely-negative inputs yield the empty set.
    pub fn sqrt(&self) -> Interval {
        if self.is_empty() || self.hi < 0.0 {
            return Interval::EMPTY;
        }
        let lo = self.lo.max(0.0);
        Interval::new(sqrt_down(lo), sqrt_up(self.hi))
    }

    pub fn exp(&self) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        Interval::new(exp_down(self.lo), exp_up(self.hi))
    }

    /// Natural log after intersecting with the domain (0, +inf).
    pub fn ln(&self) -> Interval {
        if self.is_empty() || self.hi <= 0.0 {
            return Interval::EMPTY;
        }
        let lo = self.lo.max(0.0);
        Interval::new(ln_down(lo), ln_up(self.hi))
    }

    /// Integer power, computed as the image of x^n (not repeated
    /// interval multiplication). Negative exponents go through the
    /// reciprocal; `[0,0]^-n` is empty.
    pub fn powi(&self, n: i32) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        if n == 0 {
            return Interval::point(1.0);
        }
        if n < 0 {
            return Interval::point(1.0) / self.powi(-n);
        }
        if n == 1 {
            return *self;
        }
        let (a, b) = (self.lo, self.hi);
        if n % 2 == 0 {
            if a >= 0.0 {
                Interval::new(pow_down_nonneg(a, n), pow_up_nonneg(b, n))
            } else if b <= 0.0 {
                Interval::new(pow_down_nonneg(-b, n), pow_up_nonneg(-a, n))
            } else {
                Interval::new(0.0, pow_up_nonneg((-a).max(b), n))
            }
        } else {
            Interval::new(pow_signed_down(a, n), pow_signed_up(b, n))
        }
    }

    /// n-th root of the nonnegative part, n >= 2. Used by backward power
    /// projections; goes through exp(ln(x)/n) so it is rigorous but not
    /// tight to the last ulp.
    pub fn nth_root(&self, n: i32) -> Interval {
        debug_assert!(n >= 2);
        let x = self.intersect(&Interval::new(0.0, f64::INFINITY));
        if x.is_empty() {
            return Interval::EMPTY;
        }
        let ni = Interval::point(n as f64);
        let root_hi = if x.hi == 0.0 {
            0.0
        } else if x.hi.is_infinite() {
            f64::INFINITY
        } else {
            (Interval::point(x.hi).ln() / ni).exp().hi
        };
        let root_lo = if x.lo == 0.0 {
            0.0
        } else {
            (Interval::point(x.lo).ln() / ni).exp().lo.max(0.0)
        };
        Interval::new(root_lo, root_hi)
    }

    pub fn sin(&self) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b) = (self.lo, self.hi);
        if !a.is_finite() || !b.is_finite() || sub_up(b, a) >= two_pi_enclosure().hi {
            return Interval::new(-1.0, 1.0);
        }
        let mut lo = sin_down(a).min(sin_down(b));
        let mut hi = sin_up(a).max(sin_up(b));
        if contains_turn_angle(a, b, 0.25) {
            hi = 1.0;
        }
        if contains_turn_angle(a, b, 0.75) {
            lo = -1.0;
        }
        Interval::new(lo.max(-1.0), hi.min(1.0))
    }

    pub fn cos(&self) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b) = (self.lo, self.hi);
        if !a.is_finite() || !b.is_finite() || sub_up(b, a) >= two_pi_enclosure().hi {
            return Interval::new(-1.0, 1.0);
        }
        let mut lo = cos_down(a).min(cos_down(b));
        let mut hi = cos_up(a).max(cos_up(b));
        if contains_turn_angle(a, b, 0.0) {
            hi = 1.0;
        }
        if contains_turn_angle(a, b, 0.5) {
            lo = -1.0;
        }
        Interval::new(lo.max(-1.0), hi.min(1.0))
    }

    /// Generalized division: up to two disjoint intervals whose union
    /// contains every quotient x/y with y != 0. The second piece is
    /// empty whenever the quotient set is connected; division by [0,0]
    /// yields two empty pieces.
    pub fn extended_div(&self, other: &Interval) -> (Interval, Interval) {
        if self.is_empty() || other.is_empty() {
            return (Interval::EMPTY, Interval::EMPTY);
        }
        let (a, b) = (self.lo, self.hi);
        let (c, d) = (other.lo, other.hi);
        if c == 0.0 && d == 0.0 {
            return (Interval::EMPTY, Interval::EMPTY);
        }
        if c > 0.0 || d < 0.0 {
            return (div_nonzero(self, other), Interval::EMPTY);
        }
        // denominator touches or straddles zero
        if a == 0.0 && b == 0.0 {
            return (Interval::point(0.0), Interval::EMPTY);
        }
        if a < 0.0 && b > 0.0 {
            return (Interval::ENTIRE, Interval::EMPTY);
        }
        let (p, q) = if a >= 0.0 {
            // numerator nonnegative (with b > 0)
            match (c < 0.0, d > 0.0) {
                (true, true) => (
                    Interval::new(f64::NEG_INFINITY, div_up(a, c)),
                    Interval::new(div_down(a, d), f64::INFINITY),
                ),
                (true, false) => (Interval::new(f64::NEG_INFINITY, div_up(a, c)), Interval::EMPTY),
                (false, true) => (Interval::new(div_down(a, d), f64::INFINITY), Interval::EMPTY),
                (false, false) => unreachable!(),
            }
        } else {
            // numerator nonpositive (with a < 0)
            match (c < 0.0, d > 0.0) {
                (true, true) => (
                    Interval::new(f64::NEG_INFINITY, div_up(b, d)),
                    Interval::new(div_down(b, c), f64::INFINITY),
                ),
                (true, false) => (Interval::new(div_down(b, c), f64::INFINITY), Interval::EMPTY),
                (false, true) => (Interval::new(f64::NEG_INFINITY, div_up(b, d)), Interval::EMPTY),
                (false, false) => unreachable!(),
            }
        };
        // a zero numerator endpoint makes the half-lines meet at 0;
        // collapse to one connected piece
        if !q.is_empty() && p.hi >= q.lo {
            (p.hull(&q), Interval::EMPTY)
        } else {
            (p, q)
        }
    }
}

fn pow_down_nonneg(x: f64, n: i32) -> f64 {
    debug_assert!(x >= 0.0 && n >= 1);
    let mut acc = 1.0_f64;
    let mut base = x;
    let mut e = n as u32;
    loop {
        if e & 1 == 1 {
            acc = mul_down(acc, base);
        }
        e >>= 1;
        if e == 0 {
            return acc;
        }
        base = mul_down(base, base);
    }
}

fn pow_up_nonneg(x: f64, n: i32) -> f64 {
    debug_assert!(x >= 0.0 && n >= 1);
    let mut acc = 1.0_f64;
    let mut base = x;
    let mut e = n as u32;
    loop {
        if e & 1 == 1 {
            acc = mul_up(acc, base);
        }
        e >>= 1;
        if e == 0 {
            return acc;
        }
        base = mul_up(base, base);
    }
}

fn pow_signed_down(x: f64, n: i32) -> f64 {
    if x >= 0.0 {
        pow_down_nonneg(x, n)
    } else {
        -pow_up_nonneg(-x, n)
    }
}

fn pow_signed_up(x: f64, n: i32) -> f64 {
    if x >= 0.0 {
        pow_up_nonneg(x, n)
    } else {
        -pow_down_nonneg(-x, n)
    }
}

/// Tight enclosure of 2*pi. The f64 TAU constant lies below the true
/// value by well under one ulp, so one upward step encloses it.
fn two_pi_enclosure() -> Interval {
    let lo = std::f64::consts::TAU;
    Interval { lo, hi: lo.next_up() }
}

/// Conservative test for whether some angle `(k + frac) * 2*pi` with
/// integer k lands in `[a, b]`. May report true for angles a few ulps
/// outside the range (which only widens enclosures), never false for an
/// angle inside it. Requires `b - a < 2*pi` and finite bounds.
fn contains_turn_angle(a: f64, b: f64, frac: f64) -> bool {
    let turns = std::f64::consts::TAU;
    let k0 = (a / turns - frac).floor() as i64 - 1;
    let k1 = (b / turns - frac).ceil() as i64 + 1;
    let two_pi = two_pi_enclosure();
    for k in k0..=k1 {
        let t = Interval::point(k as f64 + frac);
        let angle = t * two_pi;
        if angle.hi >= a && angle.lo <= b {
            return true;
        }
    }
    false
}

/// Division with a denominator of constant sign (no zero inside).
fn div_nonzero(x: &Interval, y: &Interval) -> Interval {
    let (a, b) = (x.lo, x.hi);
    let (c, d) = (y.lo, y.hi);
    debug_assert!(c > 0.0 || d < 0.0);
    if c > 0.0 {
        if a >= 0.0 {
            Interval::new(div_down(a, d), div_up(b, c))
        } else if b <= 0.0 {
            Interval::new(div_down(a, c), div_up(b, d))
        } else {
            Interval::new(div_down(a, c), div_up(b, c))
        }
    } else if a >= 0.0 {
        Interval::new(div_down(b, d), div_up(a, c))
    } else if b <= 0.0 {
        Interval::new(div_down(b, c), div_up(a, d))
    } else {
        Interval::new(div_down(b, d), div_up(a, d))
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval::new(add_down(self.lo, rhs.lo), add_up(self.hi, rhs.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval::new(sub_down(self.lo, rhs.hi), sub_up(self.hi, rhs.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        Interval::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b) = (self.lo, self.hi);
        let (c, d) = (rhs.lo, rhs.hi);
        if a >= 0.0 {
            if c >= 0.0 {
                Interval::new(mul_down(a, c), mul_up(b, d))
            } else if d <= 0.0 {
                Interval::new(mul_down(b, c), mul_up(a, d))
            } else {
                Interval::new(mul_down(b, c), mul_up(b, d))
            }
        } else if b <= 0.0 {
            if c >= 0.0 {
                Interval::new(mul_down(a, d), mul_up(b, c))
            } else if d <= 0.0 {
                Interval::new(mul_down(b, d), mul_up(a, c))
            } else {
                Interval::new(mul_down(a, d), mul_up(a, c))
            }
        } else if c >= 0.0 {
            Interval::new(mul_down(a, d), mul_up(b, d))
        } else if d <= 0.0 {
            Interval::new(mul_down(b, c), mul_up(a, c))
        } else {
            Interval::new(
                mul_down(a, d).min(mul_down(b, c)),
                mul_up(a, c).max(mul_up(b, d)),
            )
        }
    }
}

impl Div for Interval {
    type Output = Interval;
    /// Division per the single-interval contract: a zero-straddling
    /// denominator yields the hull of the two extended-quotient pieces;
    /// division by `[0,0]` is empty. Callers that need the pieces use
    /// [`Interval::extended_div`].
    fn div(self, rhs: Interval) -> Interval {
        let (p, q) = self.extended_div(&rhs);
        p.hull(&q)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[empty]")
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A Cartesian product of intervals, one component per variable. The
/// box is empty as soon as any component is empty.
#[derive(Clone, PartialEq)]
pub struct IntervalBox {
    comps: Vec<Interval>,
}

impl IntervalBox {
    pub fn new(comps: Vec<Interval>) -> IntervalBox {
        IntervalBox { comps }
    }

    /// The box `[x, x]` around a point.
    pub fn degenerate(x: &[f64]) -> IntervalBox {
        IntervalBox {
            comps: x.iter().map(|&v| Interval::point(v)).collect(),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    #[inline]
    pub fn comp(&self, i: usize) -> &Interval {
        &self.comps[i]
    }

    pub fn set_comp(&mut self, i: usize, v: Interval) {
        self.comps[i] = v;
    }

    pub fn components(&self) -> &[Interval] {
        &self.comps
    }

    pub fn is_empty(&self) -> bool {
        self.comps.iter().any(|c| c.is_empty())
    }

    /// Maximum width over the components.
    pub fn width(&self) -> f64 {
        self.comps.iter().map(|c| c.width()).fold(0.0, f64::max)
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.comps.iter().map(|c| c.midpoint()).collect()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        !self.is_empty() && x.iter().zip(&self.comps).all(|(&v, c)| c.contains(v))
    }

    pub fn contains_box(&self, other: &IntervalBox) -> bool {
        debug_assert_eq!(other.dim(), self.dim());
        other.is_empty()
            || self
                .comps
                .iter()
                .zip(&other.comps)
                .all(|(a, b)| a.contains_interval(b))
    }

    pub fn hull(&self, other: &IntervalBox) -> IntervalBox {
        debug_assert_eq!(other.dim(), self.dim());
        IntervalBox {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.hull(b))
                .collect(),
        }
    }

    pub fn intersect(&self, other: &IntervalBox) -> IntervalBox {
        debug_assert_eq!(other.dim(), self.dim());
        IntervalBox {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.intersect(b))
                .collect(),
        }
    }

    /// Splits the box at the midpoint of component `i` into two halves
    /// that partition it.
    pub fn bisect_at(&self, i: usize) -> (IntervalBox, IntervalBox) {
        let c = &self.comps[i];
        let m = c.midpoint();
        let mut left = self.clone();
        let mut right = self.clone();
        left.comps[i] = Interval::new(c.lo(), m);
        right.comps[i] = Interval::new(m, c.hi());
        (left, right)
    }
}

impl fmt::Debug for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{c:?}")?;
        }
        Ok(())
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Coordinate-wise distance from a point to a box: the sum over
/// components of the distance from `x[i]` to the nearest bound of the
/// component (0 when inside). Empty boxes are infinitely far, so they
/// sort last under any farthest-first policy.
pub fn point_box_distance(x: &[f64], b: &IntervalBox) -> f64 {
    debug_assert_eq!(x.len(), b.dim());
    if b.is_empty() {
        return f64::INFINITY;
    }
    x.iter()
        .zip(b.components())
        .map(|(&v, c)| {
            if v < c.lo() {
                c.lo() - v
            } else if v > c.hi() {
                v - c.hi()
            } else {
                0.0
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn sub_is_exact_on_representable_bounds() {
        // dependency effect: X - X is the full difference set
        assert_eq!(iv(-5.0, 5.0) - iv(-5.0, 5.0), iv(-10.0, 10.0));
        assert_eq!(iv(0.0, 4.0) - iv(-2.0, 0.5), iv(-0.5, 6.0));
    }

    #[test]
    fn add_identity() {
        let y = iv(-3.25, 7.5);
        assert_eq!(iv(0.0, 0.0) + y, y);
    }

    #[test]
    fn sqr_is_image_not_product() {
        assert_eq!(iv(-2.0, 0.5).sqr(), iv(0.0, 4.0));
        let x = iv(-2.0, 0.5);
        assert!((x * x).contains_interval(&x.sqr()));
        assert!(x.sqr().lo() > (x * x).lo());
    }

    #[test]
    fn neg_is_exact() {
        assert_eq!(-iv(-2.0, 0.5), iv(-0.5, 2.0));
    }

    #[test]
    fn sqrt_intersects_domain() {
        // dense-sampling oracle over the valid part of the domain
        let r = iv(-4.0, 9.0).sqrt();
        assert_eq!(r, iv(0.0, 3.0));
        for i in 0..=1000 {
            let x = 9.0 * i as f64 / 1000.0;
            assert!(r.contains(x.sqrt()));
        }
        assert!(iv(-4.0, -1.0).sqrt().is_empty());
    }

    #[test]
    fn extended_div_two_pieces() {
        // grid oracle: every sampled quotient is covered by the pieces
        let x = iv(1.0, 2.0);
        let y = iv(-1.0, 1.0);
        let (p, q) = x.extended_div(&y);
        assert_eq!(p, Interval::new(f64::NEG_INFINITY, -1.0));
        assert_eq!(q, Interval::new(1.0, f64::INFINITY));
        for i in 0..=100 {
            for j in 0..=100 {
                let xv = 1.0 + i as f64 / 100.0;
                let yv = -1.0 + 2.0 * j as f64 / 100.0;
                if yv != 0.0 {
                    let quot = xv / yv;
                    assert!(p.contains(quot) || q.contains(quot), "{quot} not covered");
                }
            }
        }
        assert!(p.intersect(&q).is_empty());
    }

    #[test]
    fn extended_div_connected() {
        let (p, q) = iv(1.0, 2.0).extended_div(&iv(1.0, 2.0));
        assert_eq!(p, iv(0.5, 2.0));
        assert!(q.is_empty());
    }

    #[test]
    fn extended_div_by_zero_is_empty() {
        let (p, q) = iv(0.0, 1.0).extended_div(&iv(0.0, 0.0));
        assert!(p.is_empty() && q.is_empty());
    }

    #[test]
    fn div_hulls_zero_straddling_denominator() {
        assert_eq!(iv(1.0, 2.0) / iv(-1.0, 1.0), Interval::ENTIRE);
        assert!((iv(1.0, 2.0) / iv(0.0, 0.0)).is_empty());
        assert_eq!(iv(2.0, 4.0) / iv(1.0, 2.0), iv(1.0, 4.0));
    }

    #[test]
    fn hull_cases() {
        assert_eq!(iv(0.0, 1.0).hull(&iv(2.0, 3.0)), iv(0.0, 3.0));
        assert_eq!(Interval::EMPTY.hull(&iv(1.0, 2.0)), iv(1.0, 2.0));
        assert_eq!(iv(0.0, 5.0).hull(&iv(1.0, 2.0)), iv(0.0, 5.0));
    }

    #[test]
    fn width_midpoint_box_width() {
        assert_eq!(iv(-2.0, 0.5).width(), 2.5);
        assert_eq!(iv(-2.0, 0.5).midpoint(), -0.75);
        let b = IntervalBox::new(vec![iv(0.0, 1.0), iv(0.0, 10.0)]);
        assert_eq!(b.width(), 10.0);
    }

    #[test]
    fn midpoint_of_unbounded_intervals_is_finite_and_inside() {
        let half = Interval::new(f64::NEG_INFINITY, 3.0);
        let m = half.midpoint();
        assert!(m.is_finite() && half.contains(m));
        assert_eq!(Interval::ENTIRE.midpoint(), 0.0);
        let up = Interval::new(2.0, f64::INFINITY);
        let m2 = up.midpoint();
        assert!(m2.is_finite() && up.contains(m2));
    }

    #[test]
    fn intersect_cases() {
        assert_eq!(iv(0.0, 3.0).intersect(&iv(2.0, 5.0)), iv(2.0, 3.0));
        assert!(iv(0.0, 1.0).intersect(&iv(2.0, 3.0)).is_empty());
        let x = iv(-1.5, 2.25);
        assert_eq!(x.intersect(&x), x);
    }

    #[test]
    fn point_box_distance_cases() {
        let b = IntervalBox::new(vec![iv(2.0, 3.0), iv(0.0, 0.5)]);
        assert_eq!(point_box_distance(&[1.0, 1.0], &b), 1.5);
        assert_eq!(point_box_distance(&[2.5, 0.2], &b), 0.0);
        let b1 = IntervalBox::new(vec![iv(-1.0, 1.0)]);
        assert_eq!(point_box_distance(&[0.0], &b1), 0.0);
        let empty = IntervalBox::new(vec![Interval::EMPTY]);
        assert_eq!(point_box_distance(&[0.0], &empty), f64::INFINITY);
    }

    #[test]
    fn powi_even_odd_negative() {
        assert_eq!(iv(-2.0, 1.0).powi(2), iv(0.0, 4.0));
        assert_eq!(iv(-2.0, 1.0).powi(3), iv(-8.0, 1.0));
        assert_eq!(iv(2.0, 4.0).powi(-1), iv(0.25, 0.5));
        assert_eq!(iv(-1.0, 2.0).powi(0), iv(1.0, 1.0));
        assert!(iv(0.0, 0.0).powi(-2).is_empty());
    }

    #[test]
    fn exp_ln_enclose_and_invert() {
        let x = iv(0.5, 2.0);
        let e = x.exp();
        assert!(e.contains(0.5_f64.exp()) && e.contains(2.0_f64.exp()));
        let l = e.ln();
        assert!(l.contains_interval(&x));
        assert!(iv(-3.0, -1.0).ln().is_empty());
        // domain is intersected, not rejected
        let partial = iv(-1.0, std::f64::consts::E).ln();
        assert!(partial.lo() == f64::NEG_INFINITY && partial.contains(1.0));
    }

    #[test]
    fn sin_cos_critical_points() {
        use std::f64::consts::{FRAC_PI_2, PI};
        let s = iv(0.0, PI).sin();
        assert!(s.hi() == 1.0 && s.contains(0.0));
        let c = iv(0.0, PI).cos();
        assert!(c.contains(1.0) && c.contains(-1.0));
        let s2 = iv(PI, 2.0 * PI).sin();
        assert!(s2.lo() == -1.0);
        // narrow monotone stretch stays narrow
        let s3 = iv(0.1, 0.2).sin();
        assert!(s3.width() < 0.11 && s3.contains(0.15_f64.sin()));
        let s4 = iv(FRAC_PI_2 - 0.1, FRAC_PI_2 + 0.1).sin();
        assert_eq!(s4.hi(), 1.0);
        let huge = iv(1.0e18, 2.0e18).sin();
        assert_eq!(huge, iv(-1.0, 1.0));
    }

    #[test]
    fn empty_propagates() {
        let e = Interval::EMPTY;
        let x = iv(1.0, 2.0);
        assert!((e + x).is_empty());
        assert!((x * e).is_empty());
        assert!(e.sqr().is_empty());
        assert!(e.sin().is_empty());
        assert!((-e).is_empty());
    }

    #[test]
    fn box_bisect_partitions() {
        let b = IntervalBox::new(vec![iv(0.0, 4.0), iv(0.0, 1.0)]);
        let (l, r) = b.bisect_at(0);
        assert_eq!(l.comp(0), &iv(0.0, 2.0));
        assert_eq!(r.comp(0), &iv(2.0, 4.0));
        assert_eq!(l.comp(1), b.comp(1));
    }

    #[test]
    fn directed_rounding_brackets_inexact_results() {
        // 1/10 is inexact: bounds must straddle the true value
        let tenth = iv(1.0, 1.0) / iv(10.0, 10.0);
        assert!(tenth.lo() < tenth.hi());
        assert!(tenth.contains(0.1));
        // 1/4 is exact: degenerate result
        let quarter = iv(1.0, 1.0) / iv(4.0, 4.0);
        assert_eq!(quarter, iv(0.25, 0.25));
    }
}
