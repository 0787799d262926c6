//! Constraint-based box narrowing.
//!
//! [`hc4_revise`] runs the two-phase forward/backward traversal over one
//! constraint's syntax tree: the forward phase evaluates every node with
//! interval arithmetic, the backward phase inverts each elementary
//! operation and intersects the projections into the children. [`hc4`]
//! drives revises over a constraint set with an AC3-style agenda until a
//! quasi-fixed point controlled by the tolerance `eta`.
//!
//! Contractions are sound: no point satisfying the constraints is ever
//! removed from the box.

use crate::expr::{BinOp, Expr, Node, UnOp};
use crate::interval::{Interval, IntervalBox};

/// A constraint of the form `expr in bound`, e.g. `(-inf, 0]` for an
/// inequality `g <= 0`, `[-eps, eps]` for a relaxed equality, or
/// `(-inf, f_best]` for the objective cut.
#[derive(Clone, Debug)]
pub struct RelationalConstraint {
    expr: Expr,
    bound: Interval,
    var_mask: Vec<bool>,
}

impl RelationalConstraint {
    pub fn new(expr: Expr, bound: Interval) -> RelationalConstraint {
        assert!(!bound.is_empty());
        let var_mask = expr.variable_mask();
        RelationalConstraint {
            expr,
            bound,
            var_mask,
        }
    }

    /// The inequality `expr <= 0`.
    pub fn le_zero(expr: Expr) -> RelationalConstraint {
        RelationalConstraint::new(expr, Interval::new(f64::NEG_INFINITY, 0.0))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn bound(&self) -> Interval {
        self.bound
    }

    pub fn mentions(&self, var: usize) -> bool {
        self.var_mask[var]
    }
}

/// Result of one revise: the contracted box and the raw forward range of
/// the constraint expression (before intersection with the bound), which
/// doubles as a bound on the expression over the input box.
pub struct ReviseOutcome {
    pub contracted: IntervalBox,
    pub forward: Interval,
}

/// Two-phase forward evaluation / backward projection of a single
/// constraint. Returns an empty box when no point of `b` can satisfy the
/// constraint. `store` is scratch reused across calls; after the call it
/// holds the constraint-narrowed range of every node.
pub fn hc4_revise(
    c: &RelationalConstraint,
    b: &IntervalBox,
    store: &mut Vec<Interval>,
) -> ReviseOutcome {
    revise_bound(&c.expr, c.bound, b, store)
}

/// [`hc4_revise`] against an ad-hoc bound, without wrapping the
/// expression in a constraint. Used for the objective cut, whose bound
/// tightens as the incumbent improves.
pub fn revise_bound(
    expr: &Expr,
    bound: Interval,
    b: &IntervalBox,
    store: &mut Vec<Interval>,
) -> ReviseOutcome {
    let forward = expr.forward(b, store);
    let root = expr.root();
    let rooted = forward.intersect(&bound);
    let mut out = b.clone();
    if rooted.is_empty() {
        for comp in 0..out.dim() {
            out.set_comp(comp, Interval::EMPTY);
        }
        return ReviseOutcome {
            contracted: out,
            forward,
        };
    }
    store[root] = rooted;
    let nodes = expr.nodes();
    for id in (0..=root).rev() {
        let p = store[id];
        if p.is_empty() {
            // an emptied node range means the constraint is unsatisfiable
            for comp in 0..out.dim() {
                out.set_comp(comp, Interval::EMPTY);
            }
            return ReviseOutcome {
                contracted: out,
                forward,
            };
        }
        match nodes[id] {
            Node::Const { .. } => {}
            Node::Var(i) => {
                let narrowed = out.comp(i).intersect(&p);
                out.set_comp(i, narrowed);
                if narrowed.is_empty() {
                    return ReviseOutcome {
                        contracted: out,
                        forward,
                    };
                }
            }
            Node::Bin(op, l, r) => {
                let (lv, rv) = (store[l], store[r]);
                match op {
                    BinOp::Add => {
                        store[l] = lv.intersect(&(p - rv));
                        store[r] = rv.intersect(&(p - store[l]));
                    }
                    BinOp::Sub => {
                        store[l] = lv.intersect(&(p + rv));
                        store[r] = rv.intersect(&(store[l] - p));
                    }
                    BinOp::Mul => {
                        store[l] = project_factor(lv, p, rv);
                        store[r] = project_factor(rv, p, store[l]);
                    }
                    BinOp::Div => {
                        // p = l / r  =>  l = p * r,  r = l / p
                        store[l] = lv.intersect(&(p * rv));
                        store[r] = project_factor(rv, store[l], p);
                    }
                }
            }
            Node::Un(op, ch) => {
                let cv = store[ch];
                store[ch] = match op {
                    UnOp::Neg => cv.intersect(&(-p)),
                    UnOp::Sqr => project_even_power(cv, p, 2),
                    UnOp::Sqrt => {
                        let nonneg = p.intersect(&Interval::new(0.0, f64::INFINITY));
                        cv.intersect(&nonneg.sqr())
                    }
                    UnOp::Exp => cv.intersect(&p.ln()),
                    UnOp::Ln => cv.intersect(&p.exp()),
                    UnOp::Sin => project_sin(cv, p),
                    UnOp::Cos => project_cos(cv, p),
                };
            }
            Node::Pow(ch, n) => {
                let cv = store[ch];
                store[ch] = project_power(cv, p, n);
            }
        }
    }
    ReviseOutcome {
        contracted: out,
        forward,
    }
}

/// Backward projection through a product: the factor values consistent
/// with `child * other = p`. When both `p` and `other` contain zero any
/// factor value works, so no contraction is possible.
fn project_factor(child: Interval, p: Interval, other: Interval) -> Interval {
    if p.contains(0.0) && other.contains(0.0) {
        return child;
    }
    let (a, b) = p.extended_div(&other);
    a.intersect(&child).hull(&b.intersect(&child))
}

/// Backward projection through an even power: |child| lies in the n-th
/// root of the nonnegative part of `p`.
fn project_even_power(child: Interval, p: Interval, n: i32) -> Interval {
    let root = if n == 2 {
        p.intersect(&Interval::new(0.0, f64::INFINITY)).sqrt()
    } else {
        p.nth_root(n)
    };
    if root.is_empty() {
        return Interval::EMPTY;
    }
    root.intersect(&child).hull(&(-root).intersect(&child))
}

fn project_power(child: Interval, p: Interval, n: i32) -> Interval {
    match n {
        0 => {
            if p.contains(1.0) {
                child
            } else {
                Interval::EMPTY
            }
        }
        1 => child.intersect(&p),
        _ if n < 0 => {
            // child^n = p  <=>  child^(-n) = 1/p
            let inv = Interval::point(1.0) / p;
            if inv.is_empty() {
                return child; // p = [0,0]: no finite reciprocal constrains the child
            }
            project_power(child, inv, -n)
        }
        _ if n % 2 == 0 => project_even_power(child, p, n),
        _ => {
            // odd: strictly monotone, invert by sign
            let pos = p.intersect(&Interval::new(0.0, f64::INFINITY)).nth_root(n);
            let neg = -(-p).intersect(&Interval::new(0.0, f64::INFINITY)).nth_root(n);
            child.intersect(&pos.hull(&neg))
        }
    }
}

/// Enclosure of pi.
fn pi_enclosure() -> Interval {
    let lo = std::f64::consts::PI;
    Interval::new(lo, lo.next_up())
}

const INV_TRIG_SLOP: u32 = 3;

fn step_down_n(v: f64, n: u32) -> f64 {
    let mut v = v;
    for _ in 0..n {
        v = v.next_down();
    }
    v
}

fn step_up_n(v: f64, n: u32) -> f64 {
    let mut v = v;
    for _ in 0..n {
        v = v.next_up();
    }
    v
}

fn asin_enclosure(y: Interval) -> Interval {
    let y = y.intersect(&Interval::new(-1.0, 1.0));
    if y.is_empty() {
        return Interval::EMPTY;
    }
    Interval::new(
        step_down_n(y.lo().asin(), INV_TRIG_SLOP),
        step_up_n(y.hi().asin(), INV_TRIG_SLOP),
    )
}

fn acos_enclosure(y: Interval) -> Interval {
    let y = y.intersect(&Interval::new(-1.0, 1.0));
    if y.is_empty() {
        return Interval::EMPTY;
    }
    Interval::new(
        step_down_n(y.hi().acos(), INV_TRIG_SLOP),
        step_up_n(y.lo().acos(), INV_TRIG_SLOP),
    )
}

/// Verifies `child` is inside `[lo_mult * pi, hi_mult * pi]` using
/// conservative (inner) bounds of the branch, so a `true` answer is a
/// guarantee.
fn within_pi_multiples(child: Interval, lo_mult: f64, hi_mult: f64) -> bool {
    let pi = pi_enclosure();
    let lo = Interval::point(lo_mult) * pi;
    let hi = Interval::point(hi_mult) * pi;
    child.lo() >= lo.hi() && child.hi() <= hi.lo()
}

/// Backward projection through sine: narrows the child only when its
/// current range provably sits in a single monotone branch; otherwise
/// leaves it unchanged (a sound no-op).
fn project_sin(child: Interval, p: Interval) -> Interval {
    if child.is_empty() {
        return child;
    }
    if !child.lo().is_finite() || !child.hi().is_finite() {
        return child;
    }
    let k = (child.midpoint() / std::f64::consts::PI).round();
    if k.abs() > 1e15 || !within_pi_multiples(child, k - 0.5, k + 0.5) {
        return child;
    }
    let asin = asin_enclosure(p);
    if asin.is_empty() {
        return Interval::EMPTY;
    }
    let pi = pi_enclosure();
    let k_even = (k / 2.0).fract() == 0.0;
    let inverse = if k_even {
        // increasing branch around k*pi: c = k*pi + asin(p)
        Interval::point(k) * pi + asin
    } else {
        // decreasing branch: c = k*pi - asin(p)
        Interval::point(k) * pi - asin
    };
    child.intersect(&inverse)
}

/// Backward projection through cosine, same single-branch policy.
fn project_cos(child: Interval, p: Interval) -> Interval {
    if child.is_empty() {
        return child;
    }
    if !child.lo().is_finite() || !child.hi().is_finite() {
        return child;
    }
    let k = (child.midpoint() / std::f64::consts::PI).floor();
    if k.abs() > 1e15 || !within_pi_multiples(child, k, k + 1.0) {
        return child;
    }
    let pi = pi_enclosure();
    let k_even = (k / 2.0).fract() == 0.0;
    let inverse = if k_even {
        // decreasing branch: c = k*pi + acos(p)
        let acos = acos_enclosure(p);
        if acos.is_empty() {
            return Interval::EMPTY;
        }
        Interval::point(k) * pi + acos
    } else {
        // increasing branch: cos(k*pi + t) = -cos(t), so c = k*pi + acos(-p)
        let acos = acos_enclosure(-p);
        if acos.is_empty() {
            return Interval::EMPTY;
        }
        Interval::point(k) * pi + acos
    };
    child.intersect(&inverse)
}

/// AC3-style propagation loop. Each pass revises the pending
/// constraints once, re-queueing those that mention a changed variable.
/// Passes repeat while the box keeps shrinking below `eta` times its
/// width before the pass; `eta = 0` therefore runs a single pass and
/// `eta = 1` runs to a full fixed point.
pub fn hc4(constraints: &[RelationalConstraint], b: &IntervalBox, eta: f64) -> IntervalBox {
    debug_assert!((0.0..=1.0).contains(&eta));
    let mut current = b.clone();
    if constraints.is_empty() || current.is_empty() {
        return current;
    }
    let mut store = Vec::new();
    let mut agenda: Vec<usize> = (0..constraints.len()).collect();
    loop {
        let w0 = current.width();
        let mut requeue = vec![false; constraints.len()];
        let mut changed_any = false;
        for &ci in &agenda {
            let outcome = hc4_revise(&constraints[ci], &current, &mut store);
            let next = outcome.contracted;
            if next.is_empty() {
                return next;
            }
            for v in 0..current.dim() {
                if next.comp(v) != current.comp(v) {
                    changed_any = true;
                    for (cj, constraint) in constraints.iter().enumerate() {
                        if constraint.mentions(v) {
                            requeue[cj] = true;
                        }
                    }
                }
            }
            current = next;
        }
        if !changed_any {
            return current;
        }
        agenda = requeue
            .iter()
            .enumerate()
            .filter_map(|(i, &r)| r.then_some(i))
            .collect();
        if agenda.is_empty() || current.width() > eta * w0 {
            return current;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{BinOp, ExprBuilder, UnOp};

    fn ibox(ranges: &[(f64, f64)]) -> IntervalBox {
        IntervalBox::new(ranges.iter().map(|&(l, h)| Interval::new(l, h)).collect())
    }

    /// x + y as a 2-variable expression.
    fn x_plus_y() -> Expr {
        let mut b = ExprBuilder::new(2);
        let x = b.var(0);
        let y = b.var(1);
        let root = b.bin(BinOp::Add, x, y);
        b.finish(root)
    }

    #[test]
    fn revise_contracts_sum_constraint() {
        let c = RelationalConstraint::le_zero(x_plus_y());
        let out = hc4_revise(&c, &ibox(&[(-5.0, 5.0), (2.0, 3.0)]), &mut Vec::new());
        let contracted = out.contracted;
        assert_eq!(contracted.comp(0), &Interval::new(-5.0, -2.0));
        assert_eq!(contracted.comp(1), &Interval::new(2.0, 3.0));
        // oracle: densely sampled feasible points all survive
        for i in 0..=200 {
            for j in 0..=100 {
                let x = -5.0 + 10.0 * i as f64 / 200.0;
                let y = 2.0 + j as f64 / 100.0;
                if x + y <= 0.0 {
                    assert!(contracted.contains_point(&[x, y]));
                }
            }
        }
    }

    #[test]
    fn revise_inverts_square_equality() {
        let mut b = ExprBuilder::new(1);
        let x = b.var(0);
        let root = b.un(UnOp::Sqr, x);
        let c = RelationalConstraint::new(b.finish(root), Interval::point(4.0));
        let out = hc4_revise(&c, &ibox(&[(0.0, 10.0)]), &mut Vec::new());
        assert_eq!(out.contracted.comp(0), &Interval::new(2.0, 2.0));
    }

    #[test]
    fn revise_detects_infeasible_box() {
        let c = RelationalConstraint::le_zero(x_plus_y());
        let out = hc4_revise(&c, &ibox(&[(1.0, 2.0), (3.0, 4.0)]), &mut Vec::new());
        assert!(out.contracted.is_empty());
        assert_eq!(out.forward, Interval::new(4.0, 6.0));
    }

    #[test]
    fn revise_is_at_least_forward_rejection() {
        // whenever the forward range misses the bound the result is empty
        let mut b = ExprBuilder::new(1);
        let x = b.var(0);
        let root = b.un(UnOp::Sqr, x);
        let c = RelationalConstraint::new(b.finish(root), Interval::new(-5.0, -1.0));
        let out = hc4_revise(&c, &ibox(&[(-3.0, 3.0)]), &mut Vec::new());
        assert!(out.contracted.is_empty());
    }

    /// The two-constraint model used throughout: 20/x^2 - y <= 0 and
    /// x^2 + 8y - 75 <= 0.
    fn banana_constraints() -> Vec<RelationalConstraint> {
        let mut b = ExprBuilder::new(2);
        let twenty = b.constant(20.0);
        let x = b.var(0);
        let x2 = b.un(UnOp::Sqr, x);
        let q = b.bin(BinOp::Div, twenty, x2);
        let y = b.var(1);
        let g1 = b.bin(BinOp::Sub, q, y);
        let c1 = RelationalConstraint::le_zero(b.finish(g1));

        let mut b = ExprBuilder::new(2);
        let x = b.var(0);
        let x2 = b.un(UnOp::Sqr, x);
        let eight = b.constant(8.0);
        let y = b.var(1);
        let ey = b.bin(BinOp::Mul, eight, y);
        let s = b.bin(BinOp::Add, x2, ey);
        let s75 = b.constant(75.0);
        let g2 = b.bin(BinOp::Sub, s, s75);
        let c2 = RelationalConstraint::le_zero(b.finish(g2));
        vec![c1, c2]
    }

    #[test]
    fn hc4_reproduces_initial_domain_contraction() {
        let cs = banana_constraints();
        let out = hc4(&cs, &ibox(&[(0.0, 10.0), (0.0, 10.0)]), 0.0);
        assert!((out.comp(0).lo() - 1.4142).abs() < 1e-3);
        assert!((out.comp(0).hi() - 8.5674).abs() < 1e-3);
        assert!((out.comp(1).lo() - 0.2).abs() < 1e-3);
        assert!((out.comp(1).hi() - 9.125).abs() < 1e-3);
    }

    #[test]
    fn hc4_with_no_constraints_is_identity() {
        let b = ibox(&[(0.0, 1.0), (-2.0, 2.0)]);
        assert_eq!(hc4(&[], &b, 0.5), b);
    }

    #[test]
    fn hc4_detects_contradiction() {
        // x <= 0 and 1 - x <= 0 cannot both hold
        let mut b = ExprBuilder::new(1);
        let x = b.var(0);
        let c1 = RelationalConstraint::le_zero(b.finish(x));
        let mut b = ExprBuilder::new(1);
        let one = b.constant(1.0);
        let x = b.var(0);
        let root = b.bin(BinOp::Sub, one, x);
        let c2 = RelationalConstraint::le_zero(b.finish(root));
        let out = hc4(&[c1, c2], &ibox(&[(-1.0, 2.0)]), 0.0);
        assert!(out.is_empty());
    }

    #[test]
    fn hc4_fixed_point_is_idempotent() {
        let cs = banana_constraints();
        let b0 = ibox(&[(0.0, 10.0), (0.0, 10.0)]);
        let once = hc4(&cs, &b0, 1.0);
        let twice = hc4(&cs, &once, 1.0);
        assert_eq!(once, twice);
        assert!(b0.contains_box(&once));
    }

    #[test]
    fn backward_sin_single_branch() {
        // sin(x) = 0.5 with x in [0, pi/2]: monotone branch, contracts
        let mut b = ExprBuilder::new(1);
        let x = b.var(0);
        let root = b.un(UnOp::Sin, x);
        let c = RelationalConstraint::new(b.finish(root), Interval::point(0.5));
        let out = hc4_revise(&c, &ibox(&[(0.0, 1.5)]), &mut Vec::new());
        let got = out.contracted.comp(0);
        let expected = 0.5_f64.asin();
        assert!(got.contains(expected));
        assert!(got.width() < 1e-10);
    }

    #[test]
    fn backward_sin_multi_branch_is_noop() {
        let mut b = ExprBuilder::new(1);
        let x = b.var(0);
        let root = b.un(UnOp::Sin, x);
        let c = RelationalConstraint::new(b.finish(root), Interval::point(0.5));
        let wide = ibox(&[(0.0, 20.0)]);
        let out = hc4_revise(&c, &wide, &mut Vec::new());
        assert_eq!(out.contracted, wide);
    }

    #[test]
    fn projections_never_lose_feasible_samples() {
        // soundness fuzz at module scale; the acceptance suite runs the
        // larger randomized version
        let cs = banana_constraints();
        let b0 = ibox(&[(0.0, 10.0), (0.0, 10.0)]);
        let contracted = hc4(&cs, &b0, 1.0);
        for i in 0..=60 {
            for j in 0..=60 {
                let x = 10.0 * i as f64 / 60.0;
                let y = 10.0 * j as f64 / 60.0;
                if x == 0.0 {
                    continue;
                }
                let feasible = 20.0 / (x * x) - y <= 0.0 && x * x + 8.0 * y - 75.0 <= 0.0;
                if feasible {
                    assert!(
                        contracted.contains_point(&[x, y]),
                        "lost feasible point ({x}, {y})"
                    );
                }
            }
        }
    }
}
