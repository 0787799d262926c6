//! Expression trees for objectives and constraints.
//!
//! Trees are stored as flat arenas in topological order (children before
//! parents), which gives every node a stable index. Interval evaluation
//! fills a per-call node-range store; the same store is reused by the
//! backward projection phase of the contractor and by the reverse sweep
//! that accumulates interval adjoints for gradients.

use crate::interval::{Interval, IntervalBox};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UnOp {
    Neg,
    Sqr,
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
}

pub type NodeId = usize;

#[derive(Clone, PartialEq, Debug)]
pub(crate) enum Node {
    /// A literal. `range` is the degenerate interval when the literal is
    /// exactly representable, and the one-ulp-widened enclosure of the
    /// decimal text otherwise.
    Const { value: f64, range: Interval },
    Var(usize),
    Bin(BinOp, NodeId, NodeId),
    Un(UnOp, NodeId),
    Pow(NodeId, i32),
}

/// An immutable expression over `dim` variables.
#[derive(Clone, PartialEq, Debug)]
pub struct Expr {
    nodes: Vec<Node>,
    root: NodeId,
    dim: usize,
}

/// Incremental construction of an [`Expr`]; children are appended before
/// their parents, so arena order is topological by construction.
#[derive(Clone)]
pub struct ExprBuilder {
    nodes: Vec<Node>,
    dim: usize,
}

impl ExprBuilder {
    pub fn new(dim: usize) -> ExprBuilder {
        ExprBuilder { nodes: Vec::new(), dim }
    }

    fn push(&mut self, n: Node) -> NodeId {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    /// An exactly-representable constant.
    pub fn constant(&mut self, value: f64) -> NodeId {
        self.push(Node::Const {
            value,
            range: Interval::point(value),
        })
    }

    /// A constant whose decimal text is not exactly representable: the
    /// interval form is widened one ulp each side so the true decimal
    /// value stays enclosed.
    pub fn constant_inexact(&mut self, value: f64) -> NodeId {
        self.push(Node::Const {
            value,
            range: Interval::new(value.next_down(), value.next_up()),
        })
    }

    pub fn var(&mut self, index: usize) -> NodeId {
        assert!(index < self.dim, "variable index {index} out of range");
        self.push(Node::Var(index))
    }

    pub fn bin(&mut self, op: BinOp, left: NodeId, right: NodeId) -> NodeId {
        self.push(Node::Bin(op, left, right))
    }

    pub fn un(&mut self, op: UnOp, child: NodeId) -> NodeId {
        self.push(Node::Un(op, child))
    }

    pub fn pow(&mut self, child: NodeId, exponent: i32) -> NodeId {
        self.push(Node::Pow(child, exponent))
    }

    pub fn finish(self, root: NodeId) -> Expr {
        assert!(root < self.nodes.len());
        Expr {
            nodes: self.nodes,
            root,
            dim: self.dim,
        }
    }
}

impl Expr {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub(crate) fn root(&self) -> NodeId {
        self.root
    }

    /// Marks which variables occur in the tree.
    pub fn variable_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.dim];
        for n in &self.nodes {
            if let Node::Var(i) = n {
                mask[*i] = true;
            }
        }
        mask
    }

    /// Plain floating-point evaluation. Domain violations (square root
    /// of a negative, log of a nonpositive, division by zero, zero to a
    /// negative power) surface as NaN.
    pub fn eval_real(&self, x: &[f64]) -> f64 {
        let mut buf = Vec::with_capacity(self.nodes.len());
        self.eval_real_buf(x, &mut buf)
    }

    /// Same as [`Expr::eval_real`] with a caller-owned scratch buffer.
    pub fn eval_real_buf(&self, x: &[f64], buf: &mut Vec<f64>) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        buf.clear();
        for n in &self.nodes {
            let v = match *n {
                Node::Const { value, .. } => value,
                Node::Var(i) => x[i],
                Node::Bin(op, l, r) => {
                    let (a, b) = (buf[l], buf[r]);
                    match op {
                        BinOp::Add => a + b,
                        BinOp::Sub => a - b,
                        BinOp::Mul => a * b,
                        BinOp::Div => {
                            if b == 0.0 {
                                f64::NAN
                            } else {
                                a / b
                            }
                        }
                    }
                }
                Node::Un(op, c) => {
                    let a = buf[c];
                    match op {
                        UnOp::Neg => -a,
                        UnOp::Sqr => a * a,
                        UnOp::Sqrt => a.sqrt(),
                        UnOp::Exp => a.exp(),
                        UnOp::Ln => {
                            if a <= 0.0 {
                                f64::NAN
                            } else {
                                a.ln()
                            }
                        }
                        UnOp::Sin => a.sin(),
                        UnOp::Cos => a.cos(),
                    }
                }
                Node::Pow(c, n) => {
                    let a = buf[c];
                    if a == 0.0 && n < 0 {
                        f64::NAN
                    } else {
                        a.powi(n)
                    }
                }
            };
            buf.push(v);
        }
        buf[self.root]
    }

    /// Forward interval sweep: fills `store` with the range of every
    /// node over `b` and returns the root range (the natural interval
    /// extension). An empty result means the box is empty or the
    /// expression's domain is violated on all of it.
    pub fn forward(&self, b: &IntervalBox, store: &mut Vec<Interval>) -> Interval {
        debug_assert_eq!(b.dim(), self.dim);
        store.clear();
        if b.is_empty() {
            store.resize(self.nodes.len(), Interval::EMPTY);
            return Interval::EMPTY;
        }
        for n in &self.nodes {
            let v = match *n {
                Node::Const { range, .. } => range,
                Node::Var(i) => *b.comp(i),
                Node::Bin(op, l, r) => {
                    let (x, y) = (store[l], store[r]);
                    match op {
                        BinOp::Add => x + y,
                        BinOp::Sub => x - y,
                        BinOp::Mul => x * y,
                        BinOp::Div => x / y,
                    }
                }
                Node::Un(op, c) => {
                    let x = store[c];
                    match op {
                        UnOp::Neg => -x,
                        UnOp::Sqr => x.sqr(),
                        UnOp::Sqrt => x.sqrt(),
                        UnOp::Exp => x.exp(),
                        UnOp::Ln => x.ln(),
                        UnOp::Sin => x.sin(),
                        UnOp::Cos => x.cos(),
                    }
                }
                Node::Pow(c, n) => store[c].powi(n),
            };
            store.push(v);
        }
        store[self.root]
    }

    /// Natural interval extension over `b`.
    pub fn eval_natural(&self, b: &IntervalBox) -> Interval {
        let mut store = Vec::with_capacity(self.nodes.len());
        self.forward(b, &mut store)
    }

    /// Reverse sweep over an already-filled node-range store,
    /// accumulating interval adjoints. The store may hold ranges that a
    /// contractor narrowed; narrower node ranges give narrower
    /// gradients. Returns one enclosure of the partial derivative per
    /// variable.
    pub fn gradient_from_store(&self, store: &[Interval]) -> Vec<Interval> {
        debug_assert_eq!(store.len(), self.nodes.len());
        let mut adj = vec![Interval::point(0.0); self.nodes.len()];
        let mut grad = vec![Interval::point(0.0); self.dim];
        adj[self.root] = Interval::point(1.0);
        let zero = Interval::point(0.0);
        for id in (0..=self.root).rev() {
            let a = adj[id];
            if a == zero || a.is_empty() {
                continue;
            }
            match self.nodes[id] {
                Node::Const { .. } => {}
                Node::Var(i) => grad[i] = grad[i] + a,
                Node::Bin(op, l, r) => match op {
                    BinOp::Add => {
                        adj[l] = adj[l] + a;
                        adj[r] = adj[r] + a;
                    }
                    BinOp::Sub => {
                        adj[l] = adj[l] + a;
                        adj[r] = adj[r] - a;
                    }
                    BinOp::Mul => {
                        adj[l] = adj[l] + a * store[r];
                        adj[r] = adj[r] + a * store[l];
                    }
                    BinOp::Div => {
                        adj[l] = adj[l] + grad_div(a, store[r]);
                        adj[r] = adj[r] - grad_div(a * store[id], store[r]);
                    }
                },
                Node::Un(op, c) => {
                    let contrib = match op {
                        UnOp::Neg => -a,
                        UnOp::Sqr => a * Interval::point(2.0) * store[c],
                        UnOp::Sqrt => grad_div(a, Interval::point(2.0) * store[id]),
                        UnOp::Exp => a * store[id],
                        UnOp::Ln => grad_div(a, store[c]),
                        UnOp::Sin => a * store[c].cos(),
                        UnOp::Cos => -(a * store[c].sin()),
                    };
                    adj[c] = adj[c] + contrib;
                }
                Node::Pow(c, n) => {
                    if n != 0 {
                        let d = Interval::point(n as f64) * store[c].powi(n - 1);
                        let d = if d.is_empty() { Interval::ENTIRE } else { d };
                        adj[c] = adj[c] + a * d;
                    }
                }
            }
        }
        grad
    }

    /// Interval gradient over `b`, or `None` when the expression is
    /// undefined on all of `b`.
    pub fn gradient(&self, b: &IntervalBox) -> Option<Vec<Interval>> {
        let mut store = Vec::with_capacity(self.nodes.len());
        if self.forward(b, &mut store).is_empty() {
            return None;
        }
        Some(self.gradient_from_store(&store))
    }

    /// First-order centered form at `c`: `F(c) + sum G_i(b) * (b_i - c_i)`.
    /// Falls back to the whole line when the gradient is unavailable, so
    /// callers can always take the max of this and the natural bound.
    pub fn eval_taylor(&self, b: &IntervalBox, c: &[f64]) -> Interval {
        debug_assert_eq!(c.len(), self.dim);
        if b.is_empty() {
            return Interval::EMPTY;
        }
        let fc = self.eval_natural(&IntervalBox::degenerate(c));
        if fc.is_empty() {
            return Interval::ENTIRE;
        }
        let g = match self.gradient(b) {
            Some(g) => g,
            None => return Interval::ENTIRE,
        };
        let mut acc = fc;
        for i in 0..self.dim {
            let offset = *b.comp(i) - Interval::point(c[i]);
            acc = acc + g[i] * offset;
            if acc.is_empty() {
                return Interval::ENTIRE;
            }
        }
        acc
    }

    /// Infix rendering compatible with the model grammar.
    pub fn print_infix(&self, names: &[String]) -> String {
        self.print_node(self.root, names)
    }

    fn print_node(&self, id: NodeId, names: &[String]) -> String {
        match &self.nodes[id] {
            Node::Const { value, .. } => {
                if *value < 0.0 {
                    format!("({value})")
                } else {
                    format!("{value}")
                }
            }
            Node::Var(i) => names[*i].clone(),
            Node::Bin(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                format!(
                    "({} {} {})",
                    self.print_node(*l, names),
                    sym,
                    self.print_node(*r, names)
                )
            }
            Node::Un(op, c) => {
                let name = match op {
                    UnOp::Neg => "neg",
                    UnOp::Sqr => "sqr",
                    UnOp::Sqrt => "sqrt",
                    UnOp::Exp => "exp",
                    UnOp::Ln => "log",
                    UnOp::Sin => "sin",
                    UnOp::Cos => "cos",
                };
                format!("{}({})", name, self.print_node(*c, names))
            }
            Node::Pow(c, n) => format!("({} ^ {})", self.print_node(*c, names), n),
        }
    }
}

/// Adjoint division: a denominator of exactly [0,0] makes the derivative
/// undefined, which widens to the whole line instead of the (unsound for
/// this purpose) empty set.
fn grad_div(a: Interval, b: Interval) -> Interval {
    let d = a / b;
    if d.is_empty() && !a.is_empty() && !b.is_empty() {
        Interval::ENTIRE
    } else {
        d
    }
}
