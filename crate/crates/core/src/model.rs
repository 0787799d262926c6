//! The optimization problem model and its text format.
//!
//! A model file declares box-bounded variables, one objective and any
//! number of constraints:
//!
//! ```text
//! # comments run to end of line
//! var x in [0, 10];
//! var y in [0, 10];
//! minimize -sqr(x + y - 10) / 30 - sqr(x - y + 10) / 120;
//! subject to 20 / sqr(x) - y <= 0;
//! subject to sqr(x) + 8 * y - 75 <= 0;
//! ```
//!
//! Expressions use infix `+ - * / ^` (integer exponents), parentheses
//! and the calls `sqr sqrt exp log sin cos neg`. Equality constraints
//! `expr = 0` are normalized at parse time into the two inequalities
//! `expr - eps <= 0` and `-expr - eps <= 0`.

use std::error::Error;
use std::fmt;

use crate::expr::{BinOp, Expr, ExprBuilder, NodeId, UnOp};
use crate::interval::{Interval, IntervalBox};

/// Relation of a constraint as written in the model.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Le,
    Eq,
}

/// A parsed, normalized problem: minimize the objective over the domain
/// subject to every constraint expression being nonpositive.
#[derive(Clone, Debug)]
pub struct Problem {
    names: Vec<String>,
    domain: IntervalBox,
    objective: Expr,
    constraints: Vec<Expr>,
    constraint_labels: Vec<String>,
    raw_constraints: Vec<(Expr, Relation)>,
    eq_tolerance: f64,
}

impl Problem {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn domain(&self) -> &IntervalBox {
        &self.domain
    }

    pub fn objective(&self) -> &Expr {
        &self.objective
    }

    /// The normalized inequality constraints, each meaning `expr <= 0`.
    pub fn constraints(&self) -> &[Expr] {
        &self.constraints
    }

    pub fn constraint_labels(&self) -> &[String] {
        &self.constraint_labels
    }

    pub fn eq_tolerance(&self) -> f64 {
        self.eq_tolerance
    }

    /// Renders the model in the input grammar, with floats printed in
    /// round-trip precision. Equalities are printed as written; parsing
    /// the output re-normalizes them identically.
    pub fn print_model(&self) -> String {
        let mut out = String::new();
        for (name, comp) in self.names.iter().zip(self.domain.components()) {
            out.push_str(&format!("var {} in [{}, {}];\n", name, comp.lo(), comp.hi()));
        }
        out.push_str(&format!(
            "minimize {};\n",
            self.objective.print_infix(&self.names)
        ));
        for (c, rel) in &self.raw_constraints {
            let sym = match rel {
                Relation::Le => "<=",
                Relation::Eq => "=",
            };
            out.push_str(&format!(
                "subject to {} {} 0;\n",
                c.print_infix(&self.names),
                sym
            ));
        }
        out
    }
}

impl PartialEq for Problem {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.domain == other.domain
            && self.objective == other.objective
            && self.constraints == other.constraints
            && self.raw_constraints == other.raw_constraints
    }
}

/// A syntax or semantic error in model text, with its source position.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64, bool), // value, exactly representable
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Le,
    Eq,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        message: message.into(),
    })
}

/// Whether the decimal literal `digits * 10^exp10` (digits given without
/// a decimal point) is exactly representable as an f64. Conservative:
/// answering "no" for a representable value only widens its interval
/// form by one ulp, never the reverse.
fn decimal_is_exact(digits: &str, exp10: i32) -> bool {
    let trimmed = digits.trim_start_matches('0');
    if trimmed.is_empty() {
        return true; // zero
    }
    let mut ds: Vec<u8> = trimmed.bytes().collect();
    let mut e = exp10;
    while ds.last() == Some(&b'0') {
        ds.pop();
        e += 1;
    }
    if ds.len() > 30 {
        return false;
    }
    let mut m: i128 = 0;
    for d in &ds {
        m = m * 10 + i128::from(d - b'0');
    }
    const MAX_ODD: i128 = 1 << 53;
    if e >= 0 {
        if e > 60 {
            return false;
        }
        for _ in 0..e {
            m = match m.checked_mul(5) {
                Some(v) if v <= MAX_ODD => v,
                _ => return false,
            };
        }
        m <= MAX_ODD
    } else {
        let d = -e;
        if d > 1020 {
            return false;
        }
        for _ in 0..d {
            if m % 5 == 0 {
                m /= 5;
            } else {
                return false;
            }
        }
        while m % 2 == 0 {
            m /= 2;
        }
        m <= MAX_ODD
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    while i < bytes.len() {
        let c = bytes[i];
        let (tline, tcol) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '#' => {
                while i < bytes.len() && bytes[i] != '\n' {
                    i += 1;
                }
            }
            '+' => {
                tokens.push(Token { tok: Tok::Plus, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '-' => {
                tokens.push(Token { tok: Tok::Minus, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '*' => {
                tokens.push(Token { tok: Tok::Star, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '/' => {
                tokens.push(Token { tok: Tok::Slash, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '^' => {
                tokens.push(Token { tok: Tok::Caret, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '(' => {
                tokens.push(Token { tok: Tok::LParen, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            ')' => {
                tokens.push(Token { tok: Tok::RParen, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '[' => {
                tokens.push(Token { tok: Tok::LBracket, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            ']' => {
                tokens.push(Token { tok: Tok::RBracket, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            ',' => {
                tokens.push(Token { tok: Tok::Comma, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            ';' => {
                tokens.push(Token { tok: Tok::Semi, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '<' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '=' {
                    tokens.push(Token { tok: Tok::Le, line: tline, col: tcol });
                    advance(2, &mut i, &mut col);
                } else {
                    return err(tline, tcol, "expected `<=`");
                }
            }
            '=' => {
                tokens.push(Token { tok: Tok::Eq, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().collect();
                col += i - start;
                tokens.push(Token { tok: Tok::Ident(s), line: tline, col: tcol });
            }
            c if c.is_ascii_digit() => {
                let start = i;
                let mut mantissa = String::new();
                let mut frac_digits = 0i32;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    mantissa.push(bytes[i]);
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == '.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        mantissa.push(bytes[i]);
                        frac_digits += 1;
                        i += 1;
                    }
                }
                let mut exp10 = 0i32;
                if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                    let mut j = i + 1;
                    let mut sign = 1i32;
                    if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                        if bytes[j] == '-' {
                            sign = -1;
                        }
                        j += 1;
                    }
                    let dstart = j;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == dstart {
                        return err(tline, tcol, "malformed exponent in numeric literal");
                    }
                    let digits: String = bytes[dstart..j].iter().collect();
                    exp10 = sign
                        * digits
                            .parse::<i32>()
                            .map_err(|_| ParseError {
                                line: tline,
                                col: tcol,
                                message: "exponent out of range".into(),
                            })?;
                    i = j;
                }
                let text: String = bytes[start..i].iter().collect();
                col += i - start;
                let value: f64 = text.parse().map_err(|_| ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("invalid numeric literal `{text}`"),
                })?;
                let exact = decimal_is_exact(&mantissa, exp10 - frac_digits);
                tokens.push(Token {
                    tok: Tok::Number(value, exact),
                    line: tline,
                    col: tcol,
                });
            }
            other => return err(tline, tcol, format!("unexpected character `{other}`")),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1))
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<Token, ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Some(t) if t.tok == *want => Ok(t),
            Some(t) => err(t.line, t.col, format!("expected {what}")),
            None => err(line, col, format!("expected {what}, found end of input")),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Token {
                tok: Tok::Ident(s),
                line,
                col,
            }) => Ok((s, line, col)),
            Some(t) => err(t.line, t.col, format!("expected {what}")),
            None => err(line, col, format!("expected {what}, found end of input")),
        }
    }

    fn expect_signed_number(&mut self) -> Result<f64, ParseError> {
        let mut sign = 1.0;
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::Minus)) {
            self.next();
            sign = -1.0;
        } else if matches!(self.peek().map(|t| &t.tok), Some(Tok::Plus)) {
            self.next();
        }
        let (line, col) = self.here();
        match self.next() {
            Some(Token {
                tok: Tok::Number(v, _),
                ..
            }) => Ok(sign * v),
            Some(t) => err(t.line, t.col, "expected a numeric literal"),
            None => err(line, col, "expected a numeric literal, found end of input"),
        }
    }

    /// expr := term { (+|-) term }
    fn parse_expr(
        &mut self,
        b: &mut ExprBuilder,
        vars: &[String],
    ) -> Result<NodeId, ParseError> {
        let mut acc = self.parse_term(b, vars)?;
        loop {
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Plus) => {
                    self.next();
                    let rhs = self.parse_term(b, vars)?;
                    acc = b.bin(BinOp::Add, acc, rhs);
                }
                Some(Tok::Minus) => {
                    self.next();
                    let rhs = self.parse_term(b, vars)?;
                    acc = b.bin(BinOp::Sub, acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    /// term := unary { (*|/) unary }
    fn parse_term(
        &mut self,
        b: &mut ExprBuilder,
        vars: &[String],
    ) -> Result<NodeId, ParseError> {
        let mut acc = self.parse_unary(b, vars)?;
        loop {
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Star) => {
                    self.next();
                    let rhs = self.parse_unary(b, vars)?;
                    acc = b.bin(BinOp::Mul, acc, rhs);
                }
                Some(Tok::Slash) => {
                    self.next();
                    let rhs = self.parse_unary(b, vars)?;
                    acc = b.bin(BinOp::Div, acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    /// unary := '-' unary | power
    fn parse_unary(
        &mut self,
        b: &mut ExprBuilder,
        vars: &[String],
    ) -> Result<NodeId, ParseError> {
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::Minus)) {
            self.next();
            let child = self.parse_unary(b, vars)?;
            return Ok(b.un(UnOp::Neg, child));
        }
        self.parse_power(b, vars)
    }

    /// power := atom [ '^' signed-integer ]
    fn parse_power(
        &mut self,
        b: &mut ExprBuilder,
        vars: &[String],
    ) -> Result<NodeId, ParseError> {
        let base = self.parse_atom(b, vars)?;
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::Caret)) {
            self.next();
            let (line, col) = self.here();
            let mut sign = 1i64;
            if matches!(self.peek().map(|t| &t.tok), Some(Tok::Minus)) {
                self.next();
                sign = -1;
            }
            match self.next() {
                Some(Token {
                    tok: Tok::Number(v, exact),
                    line,
                    col,
                }) => {
                    if !exact || v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
                        return err(
                            line,
                            col,
                            "exponent must be an integer literal (use exp/log for general powers)",
                        );
                    }
                    let n = sign * v as i64;
                    Ok(b.pow(base, n as i32))
                }
                Some(t) => err(t.line, t.col, "expected an integer exponent after `^`"),
                None => err(line, col, "expected an integer exponent after `^`"),
            }
        } else {
            Ok(base)
        }
    }

    /// atom := number | ident | ident '(' expr ')' | '(' expr ')'
    fn parse_atom(
        &mut self,
        b: &mut ExprBuilder,
        vars: &[String],
    ) -> Result<NodeId, ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Token {
                tok: Tok::Number(v, exact),
                ..
            }) => Ok(if exact {
                b.constant(v)
            } else {
                b.constant_inexact(v)
            }),
            Some(Token {
                tok: Tok::LParen, ..
            }) => {
                let inner = self.parse_expr(b, vars)?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Token {
                tok: Tok::Ident(name),
                line,
                col,
            }) => {
                if matches!(self.peek().map(|t| &t.tok), Some(Tok::LParen)) {
                    let op = match name.as_str() {
                        "neg" => UnOp::Neg,
                        "sqr" => UnOp::Sqr,
                        "sqrt" => UnOp::Sqrt,
                        "exp" => UnOp::Exp,
                        "log" => UnOp::Ln,
                        "sin" => UnOp::Sin,
                        "cos" => UnOp::Cos,
                        _ => return err(line, col, format!("unknown function `{name}`")),
                    };
                    self.next();
                    let inner = self.parse_expr(b, vars)?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(b.un(op, inner))
                } else {
                    match vars.iter().position(|v| *v == name) {
                        Some(i) => Ok(b.var(i)),
                        None => err(line, col, format!("unknown identifier `{name}`")),
                    }
                }
            }
            Some(t) => err(t.line, t.col, "expected an expression"),
            None => err(line, col, "expected an expression, found end of input"),
        }
    }
}

/// Parses model text into a normalized [`Problem`]. Equality
/// constraints are relaxed into two inequalities using `eq_tolerance`.
pub fn parse_problem(text: &str, eq_tolerance: f64) -> Result<Problem, ParseError> {
    assert!(eq_tolerance >= 0.0);
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };

    let mut names: Vec<String> = Vec::new();
    let mut bounds: Vec<Interval> = Vec::new();

    // header: variable declarations
    while let Some(Token {
        tok: Tok::Ident(w), ..
    }) = p.peek()
    {
        if w != "var" {
            break;
        }
        p.next();
        let (name, nline, ncol) = p.expect_ident("a variable name")?;
        if names.contains(&name) {
            return err(nline, ncol, format!("duplicate variable `{name}`"));
        }
        let (kw, kline, kcol) = p.expect_ident("`in`")?;
        if kw != "in" {
            return err(kline, kcol, "expected `in`");
        }
        p.expect(&Tok::LBracket, "`[`")?;
        let lo = p.expect_signed_number()?;
        p.expect(&Tok::Comma, "`,`")?;
        let hi = p.expect_signed_number()?;
        let (bline, bcol) = p.here();
        p.expect(&Tok::RBracket, "`]`")?;
        p.expect(&Tok::Semi, "`;`")?;
        if !(lo <= hi) {
            return err(bline, bcol, format!("empty domain for `{name}`: [{lo}, {hi}]"));
        }
        names.push(name);
        bounds.push(Interval::new(lo, hi));
    }
    if names.is_empty() {
        let (line, col) = p.here();
        return err(line, col, "model declares no variables");
    }

    let dim = names.len();
    let mut objective: Option<Expr> = None;
    let mut constraints: Vec<Expr> = Vec::new();
    let mut constraint_labels: Vec<String> = Vec::new();
    let mut raw_constraints: Vec<(Expr, Relation)> = Vec::new();

    while p.peek().is_some() {
        let (word, wline, wcol) = p.expect_ident("`minimize` or `subject`")?;
        match word.as_str() {
            "minimize" => {
                if objective.is_some() {
                    return err(wline, wcol, "multiple `minimize` statements");
                }
                let mut b = ExprBuilder::new(dim);
                let root = p.parse_expr(&mut b, &names)?;
                p.expect(&Tok::Semi, "`;`")?;
                objective = Some(b.finish(root));
            }
            "subject" => {
                let (to, tline, tcol) = p.expect_ident("`to`")?;
                if to != "to" {
                    return err(tline, tcol, "expected `to`");
                }
                let mut b = ExprBuilder::new(dim);
                let root = p.parse_expr(&mut b, &names)?;
                let (rline, rcol) = p.here();
                let relation = p.next();
                let zero = p.expect_signed_number()?;
                if zero != 0.0 {
                    return err(rline, rcol, "constraint right-hand side must be 0");
                }
                p.expect(&Tok::Semi, "`;`")?;
                let idx = raw_constraints.len() + 1;
                match relation.map(|t| t.tok) {
                    Some(Tok::Le) => {
                        let e = b.finish(root);
                        raw_constraints.push((e.clone(), Relation::Le));
                        constraints.push(e);
                        constraint_labels.push(format!("g{idx}"));
                    }
                    Some(Tok::Eq) => {
                        // h = 0 becomes h - eps <= 0 and -h - eps <= 0
                        raw_constraints.push((b.clone().finish(root), Relation::Eq));
                        let mut b_low = b.clone();
                        let eps = b_low.constant(eq_tolerance);
                        let r1 = b_low.bin(BinOp::Sub, root, eps);
                        constraints.push(b_low.finish(r1));
                        constraint_labels.push(format!("h{idx}+"));
                        let mut b_high = b;
                        let negated = b_high.un(UnOp::Neg, root);
                        let eps = b_high.constant(eq_tolerance);
                        let r2 = b_high.bin(BinOp::Sub, negated, eps);
                        constraints.push(b_high.finish(r2));
                        constraint_labels.push(format!("h{idx}-"));
                    }
                    _ => return err(rline, rcol, "expected `<=` or `=`"),
                }
            }
            other => {
                return err(
                    wline,
                    wcol,
                    format!("expected `minimize` or `subject`, found `{other}`"),
                )
            }
        }
    }

    let objective = match objective {
        Some(o) => o,
        None => {
            return Err(ParseError {
                line: 1,
                col: 1,
                message: "model has no `minimize` statement".into(),
            })
        }
    };

    Ok(Problem {
        names,
        domain: IntervalBox::new(bounds),
        objective,
        constraints,
        constraint_labels,
        raw_constraints,
        eq_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BANANA: &str = "\
# 2-D constrained model with a banana-shaped feasible set
var x in [0, 10];
var y in [0, 10];
minimize -sqr(x + y - 10) / 30 - sqr(x - y + 10) / 120;
subject to 20 / sqr(x) - y <= 0;
subject to sqr(x) + 8 * y - 75 <= 0;
";

    #[test]
    fn parses_the_two_constraint_model() {
        let p = parse_problem(BANANA, 1e-8).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.constraints().len(), 2);
        assert_eq!(p.domain().comp(0), &Interval::new(0.0, 10.0));
        // spot value of the objective at a known point:
        // -(9)/30 - (49)/120 = -0.3 - 0.4083...
        let f = p.objective().eval_real(&[2.0, 5.0]);
        assert!((f - (-0.7083333333333334)).abs() < 1e-12);
        // first constraint boundary point
        assert_eq!(p.constraints()[0].eval_real(&[2.0, 5.0]), 0.0);
    }

    #[test]
    fn unconstrained_model_is_fine() {
        let p = parse_problem("var x1 in [0, 1]; minimize x1;", 1e-8).unwrap();
        assert_eq!(p.constraints().len(), 0);
        assert_eq!(p.dim(), 1);
    }

    #[test]
    fn equality_splits_into_two_inequalities() {
        let p = parse_problem(
            "var x in [0, 2]; minimize x; subject to x - 1 = 0;",
            1e-8,
        )
        .unwrap();
        assert_eq!(p.constraints().len(), 2);
        // h - eps <= 0 rejects x = 1 + 2e-8, accepts x = 1
        let h_plus = &p.constraints()[0];
        assert!(h_plus.eval_real(&[1.0 + 2e-8]) > 0.0);
        assert!(h_plus.eval_real(&[1.0]) < 0.0);
        // -h - eps <= 0 rejects x = 1 - 2e-8
        let h_minus = &p.constraints()[1];
        assert!(h_minus.eval_real(&[1.0 - 2e-8]) > 0.0);
        assert!(h_minus.eval_real(&[1.0]) < 0.0);
    }

    #[test]
    fn reports_positions_in_errors() {
        let e = parse_problem("var x in [0, 1];\nminimize x @;", 1e-8).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("unexpected character"));

        let e = parse_problem("var x in [0, 1]; minimize y;", 1e-8).unwrap_err();
        assert!(e.message.contains("unknown identifier"));

        let e = parse_problem("var x in [0, 1]; minimize sqr(x, x);", 1e-8).unwrap_err();
        assert!(e.message.contains("expected `)`"));

        let e = parse_problem("var x in [0, 1]; minimize x ^ 0.5;", 1e-8).unwrap_err();
        assert!(e.message.contains("integer"));
    }

    #[test]
    fn print_parse_round_trip_is_structural_identity() {
        for text in [
            BANANA,
            "var x in [0, 2]; minimize exp(x) - log(x + 1); subject to x - 1 = 0;",
            "var a in [-5, 5]; var b in [-5, 5]; minimize sqr(a) + sqr(b) - 0.125 * a * b;",
            "var x in [-1, 1]; minimize sin(x) * cos(x ^ 3) + 2e-3;",
        ] {
            let p = parse_problem(text, 1e-8).unwrap();
            let printed = p.print_model();
            let q = parse_problem(&printed, 1e-8).unwrap();
            assert_eq!(p, q, "round-trip mismatch for:\n{printed}");
        }
    }

    #[test]
    fn exactness_analysis() {
        assert!(decimal_is_exact("20", 0));
        assert!(decimal_is_exact("05", -1)); // 0.5
        assert!(decimal_is_exact("9125", -3)); // 9.125
        assert!(!decimal_is_exact("02", -1)); // 0.2
        assert!(!decimal_is_exact("1", -8)); // 1e-8
        assert!(decimal_is_exact("1", 2)); // 100
        assert!(!decimal_is_exact("1", 300)); // 1e300
    }
}
