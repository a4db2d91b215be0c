//! Scalar expression language for chart component fields.
//!
//! Grammar, smallest-binding first: `+ -`, then `* /`, then unary minus,
//! then `^` (right associative, so unary minus binds looser than `^`),
//! then atoms: decimal literals, coordinate names, `pi`, `e`, one-argument
//! functions `sin cos tan sinh cosh tanh exp log sqrt abs`, and
//! parenthesized subexpressions.
//!
//! Evaluation runs once over the tree carrying a dual number with one
//! partial per coordinate (vector-forward mode), so values and exact first
//! derivatives come out of a single pass. Integer powers are expanded by
//! repeated multiplication; fractional powers require a positive base.

use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NamedConst {
    Pi,
    E,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(f64),
    Coord { index: usize, name: String },
    Const(NamedConst),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed, immutable expression over a fixed coordinate list.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    ast: Node,
}

impl Expression {
    pub fn ast(&self) -> &Node {
        &self.ast
    }

    /// Fully parenthesized form; re-parsing it yields an identical AST.
    pub fn to_canonical_string(&self) -> String {
        print_node(&self.ast)
    }
}

/// Evaluation result: the value and one partial derivative per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct DualValue {
    pub value: f64,
    pub partials: Vec<f64>,
}

#[derive(Error, Debug, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdent { pos: usize, name: String },
    #[error("function `{name}` at byte {pos} takes exactly one argument")]
    Arity { pos: usize, name: String },
    #[error("domain error in `{expr}`: {msg}")]
    Domain { expr: String, msg: String },
}

// ─── Lexer ───

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' | '\u{2212}' => {
                toks.push((Tok::Minus, i));
                i += c.len_utf8();
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // Exponent part only when it is unambiguously one.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| ExprError::Syntax {
                    pos: start,
                    msg: format!("bad number literal `{lit}`"),
                })?;
                toks.push((Tok::Num(v), start));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(ExprError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(toks)
}

// ─── Parser ───

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    coords: &'a [String],
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        match self.bump() {
            Some((t, _)) if t == tok => Ok(()),
            Some((t, p)) => Err(ExprError::Syntax {
                pos: p,
                msg: format!("expected {what}, found {t:?}"),
            }),
            None => Err(ExprError::Syntax {
                pos: self.len,
                msg: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<Node, ExprError> {
        let mut node = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    node = Node::Bin(BinOp::Add, Box::new(node), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    node = Node::Bin(BinOp::Sub, Box::new(node), Box::new(rhs));
                }
                _ => return Ok(node),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Node, ExprError> {
        let mut node = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.parse_unary()?;
                    node = Node::Bin(BinOp::Mul, Box::new(node), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.parse_unary()?;
                    node = Node::Bin(BinOp::Div, Box::new(node), Box::new(rhs));
                }
                _ => return Ok(node),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Node, ExprError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.parse_unary()?;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Node, ExprError> {
        let base = self.parse_atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            // Right associative; the exponent may carry its own unary minus.
            let expo = self.parse_unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(expo)));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Node, ExprError> {
        match self.bump() {
            Some((Tok::Num(v), _)) => Ok(Node::Num(v)),
            Some((Tok::LParen, _)) => {
                let node = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(node)
            }
            Some((Tok::Ident(name), pos)) => self.parse_ident(name, pos),
            Some((t, p)) => Err(ExprError::Syntax {
                pos: p,
                msg: format!("expected a value, found {t:?}"),
            }),
            None => Err(ExprError::Syntax {
                pos: self.len,
                msg: "expected a value, found end of input".into(),
            }),
        }
    }

    fn parse_ident(&mut self, name: String, pos: usize) -> Result<Node, ExprError> {
        if let Some(f) = Func::from_name(&name) {
            self.expect(Tok::LParen, "`(` after function name")?;
            if matches!(self.peek(), Some(Tok::RParen)) {
                return Err(ExprError::Arity { pos, name });
            }
            let arg = self.parse_expr()?;
            if matches!(self.peek(), Some(Tok::Comma)) {
                return Err(ExprError::Arity { pos, name });
            }
            self.expect(Tok::RParen, "`)` closing the function argument")?;
            return Ok(Node::Call(f, Box::new(arg)));
        }
        if let Some(index) = self.coords.iter().position(|c| c == &name) {
            if matches!(self.peek(), Some(Tok::LParen)) {
                return Err(ExprError::Syntax {
                    pos,
                    msg: format!("coordinate `{name}` is not a function"),
                });
            }
            return Ok(Node::Coord { index, name });
        }
        match name.as_str() {
            "pi" => Ok(Node::Const(NamedConst::Pi)),
            "e" => Ok(Node::Const(NamedConst::E)),
            _ => Err(ExprError::UnknownIdent { pos, name }),
        }
    }
}

/// Parse `text` over the given coordinate names.
pub fn parse_expression(text: &str, coordinates: &[String]) -> Result<Expression, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        coords: coordinates,
        len: text.len(),
    };
    let ast = p.parse_expr()?;
    if let Some((t, pos)) = p.toks.get(p.pos) {
        return Err(ExprError::Syntax {
            pos: *pos,
            msg: format!("unexpected trailing {t:?}"),
        });
    }
    Ok(Expression { ast })
}

// ─── Canonical printer ───

fn print_node(n: &Node) -> String {
    match n {
        Node::Num(v) => format!("{v}"),
        Node::Coord { name, .. } => name.clone(),
        Node::Const(NamedConst::Pi) => "pi".into(),
        Node::Const(NamedConst::E) => "e".into(),
        Node::Neg(x) => format!("(-{})", print_node(x)),
        Node::Bin(op, l, r) => format!("({} {} {})", print_node(l), op.symbol(), print_node(r)),
        Node::Call(f, x) => format!("{}({})", f.name(), print_node(x)),
    }
}

// ─── Dual-number evaluation ───

#[derive(Clone, Debug)]
struct Dual {
    v: f64,
    d: Vec<f64>,
}

impl Dual {
    fn constant(v: f64, n: usize) -> Dual {
        Dual { v, d: vec![0.0; n] }
    }

    fn map(&self, v: f64, dv: f64) -> Dual {
        Dual {
            v,
            d: self.d.iter().map(|x| dv * x).collect(),
        }
    }

    fn zip(&self, other: &Dual, v: f64, da: f64, db: f64) -> Dual {
        Dual {
            v,
            d: self
                .d
                .iter()
                .zip(&other.d)
                .map(|(x, y)| da * x + db * y)
                .collect(),
        }
    }
}

fn domain_err(node: &Node, msg: impl Into<String>) -> ExprError {
    ExprError::Domain {
        expr: print_node(node),
        msg: msg.into(),
    }
}

fn eval_node(node: &Node, point: &[f64]) -> Result<Dual, ExprError> {
    let n = point.len();
    match node {
        Node::Num(v) => Ok(Dual::constant(*v, n)),
        Node::Const(NamedConst::Pi) => Ok(Dual::constant(std::f64::consts::PI, n)),
        Node::Const(NamedConst::E) => Ok(Dual::constant(std::f64::consts::E, n)),
        Node::Coord { index, .. } => {
            let mut d = vec![0.0; n];
            d[*index] = 1.0;
            Ok(Dual {
                v: point[*index],
                d,
            })
        }
        Node::Neg(x) => {
            let a = eval_node(x, point)?;
            Ok(a.map(-a.v, -1.0))
        }
        Node::Bin(op, l, r) => {
            let a = eval_node(l, point)?;
            let b = eval_node(r, point)?;
            match op {
                BinOp::Add => Ok(a.zip(&b, a.v + b.v, 1.0, 1.0)),
                BinOp::Sub => Ok(a.zip(&b, a.v - b.v, 1.0, -1.0)),
                BinOp::Mul => Ok(a.zip(&b, a.v * b.v, b.v, a.v)),
                BinOp::Div => {
                    if b.v == 0.0 {
                        return Err(domain_err(node, "division by zero"));
                    }
                    Ok(a.zip(&b, a.v / b.v, 1.0 / b.v, -a.v / (b.v * b.v)))
                }
                BinOp::Pow => eval_pow(node, a, b),
            }
        }
        Node::Call(f, x) => {
            let a = eval_node(x, point)?;
            eval_call(node, *f, a)
        }
    }
}

fn eval_pow(node: &Node, base: Dual, expo: Dual) -> Result<Dual, ExprError> {
    let expo_is_const = expo.d.iter().all(|&d| d == 0.0);
    let k = expo.v.round();
    if expo_is_const && expo.v == k && k.abs() <= 1_000_000.0 {
        // Integer exponent: repeated multiplication, exact for e.g. squares.
        let times = k.abs() as u64;
        let mut acc = Dual::constant(1.0, base.d.len());
        for _ in 0..times {
            acc = acc.zip(&base, acc.v * base.v, base.v, acc.v);
        }
        if k < 0.0 {
            if acc.v == 0.0 {
                return Err(domain_err(node, "zero raised to a negative power"));
            }
            let one = Dual::constant(1.0, base.d.len());
            return Ok(one.zip(&acc, 1.0 / acc.v, 1.0 / acc.v, -1.0 / (acc.v * acc.v)));
        }
        return Ok(acc);
    }
    if base.v <= 0.0 {
        return Err(domain_err(
            node,
            "non-integer power requires a positive base",
        ));
    }
    let v = base.v.powf(expo.v);
    // d(b^e) = b^e * (e' ln b + e b'/b)
    Ok(base.zip(&expo, v, v * expo.v / base.v, v * base.v.ln()))
}

fn eval_call(node: &Node, f: Func, a: Dual) -> Result<Dual, ExprError> {
    let v = a.v;
    Ok(match f {
        Func::Sin => a.map(v.sin(), v.cos()),
        Func::Cos => a.map(v.cos(), -v.sin()),
        Func::Tan => {
            if v.cos() == 0.0 {
                return Err(domain_err(node, "tangent pole"));
            }
            a.map(v.tan(), 1.0 / (v.cos() * v.cos()))
        }
        Func::Sinh => a.map(v.sinh(), v.cosh()),
        Func::Cosh => a.map(v.cosh(), v.sinh()),
        Func::Tanh => a.map(v.tanh(), 1.0 - v.tanh() * v.tanh()),
        Func::Exp => a.map(v.exp(), v.exp()),
        Func::Log => {
            if v <= 0.0 {
                return Err(domain_err(node, "logarithm of a non-positive value"));
            }
            a.map(v.ln(), 1.0 / v)
        }
        Func::Sqrt => {
            if v < 0.0 {
                return Err(domain_err(node, "square root of a negative value"));
            }
            let s = v.sqrt();
            if s == 0.0 {
                if a.d.iter().any(|&d| d != 0.0) {
                    return Err(domain_err(node, "derivative of sqrt at zero"));
                }
                a.map(0.0, 0.0)
            } else {
                a.map(s, 0.5 / s)
            }
        }
        Func::Abs => {
            let sign = if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            };
            a.map(v.abs(), sign)
        }
    })
}

/// Evaluate with exact first derivatives; `point` is one value per
/// coordinate of the chart the expression was parsed against.
pub fn eval_with_gradient(expr: &Expression, point: &[f64]) -> Result<DualValue, ExprError> {
    let d = eval_node(&expr.ast, point)?;
    Ok(DualValue {
        value: d.v,
        partials: d.d,
    })
}

/// Evaluate the value alone.
pub fn eval_value(expr: &Expression, point: &[f64]) -> Result<f64, ExprError> {
    Ok(eval_with_gradient(expr, point)?.value)
}
