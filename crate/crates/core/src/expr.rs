//! Univariate real expressions in `x`.
//!
//! Grammar (lowest to highest binding):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          -- right associative
//! atom    := number | 'x' | 'e' | 'pi' | func '(' sum ')' | '(' sum ')'
//! ```
//!
//! There is no implicit multiplication; identifiers are lowercase and
//! case-sensitive; whitespace is ignored.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Log,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "log" => Func::Log,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Log => "log",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Num(f64),
    Var,
    E,
    Pi,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// An AST node together with the byte offset of the source text it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub offset: usize,
}

impl Node {
    pub fn new(kind: NodeKind) -> Self {
        Node { kind, offset: 0 }
    }

    pub fn num(v: f64) -> Self {
        Node::new(NodeKind::Num(v))
    }

    pub fn var() -> Self {
        Node::new(NodeKind::Var)
    }

    pub fn negate(inner: Node) -> Self {
        Node::new(NodeKind::Neg(Box::new(inner)))
    }

    pub fn binary(op: BinOp, lhs: Node, rhs: Node) -> Self {
        Node::new(NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    pub fn call(func: Func, arg: Node) -> Self {
        Node::new(NodeKind::Call(func, Box::new(arg)))
    }

    fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let domain = |what: &'static str| EvalError {
            offset: self.offset,
            kind: EvalErrorKind::Domain(what),
        };
        Ok(match &self.kind {
            NodeKind::Num(v) => *v,
            NodeKind::Var => x,
            NodeKind::E => std::f64::consts::E,
            NodeKind::Pi => std::f64::consts::PI,
            NodeKind::Neg(inner) => -inner.eval(x)?,
            NodeKind::Binary(op, lhs, rhs) => {
                let a = lhs.eval(x)?;
                let b = rhs.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(domain("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => power(a, b).ok_or_else(|| domain("power of a non-positive base"))?,
                }
            }
            NodeKind::Call(func, arg) => {
                let a = arg.eval(x)?;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(domain("sqrt of a negative number"));
                        }
                        a.sqrt()
                    }
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(domain("log of a non-positive number"));
                        }
                        a.ln()
                    }
                }
            }
        })
    }

    fn uses_variable(&self) -> bool {
        match &self.kind {
            NodeKind::Var => true,
            NodeKind::Num(_) | NodeKind::E | NodeKind::Pi => false,
            NodeKind::Neg(inner) | NodeKind::Call(_, inner) => inner.uses_variable(),
            NodeKind::Binary(_, lhs, rhs) => lhs.uses_variable() || rhs.uses_variable(),
        }
    }
}

/// Integer exponents use repeated multiplication; anything else goes
/// through `exp(b ln a)` and needs a positive base.
fn power(a: f64, b: f64) -> Option<f64> {
    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
        if a == 0.0 && b < 0.0 {
            return None;
        }
        return Some(a.powi(b as i32));
    }
    if a <= 0.0 {
        return None;
    }
    Some((b * a.ln()).exp())
}

/// Fully parenthesized rendering; parsing it back yields an AST that
/// evaluates bit-identically.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            NodeKind::Num(v) => {
                if v.is_sign_negative() {
                    write!(f, "(-{:?})", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            NodeKind::Var => f.write_str("x"),
            NodeKind::E => f.write_str("e"),
            NodeKind::Pi => f.write_str("pi"),
            NodeKind::Neg(inner) => write!(f, "(-{inner})"),
            NodeKind::Binary(op, lhs, rhs) => write!(f, "({lhs} {} {rhs})", op.symbol()),
            NodeKind::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected token {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("malformed number `{0}`")]
    BadNumber(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalErrorKind {
    #[error("{0}")]
    Domain(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation error at byte {offset}: {kind}")]
pub struct EvalError {
    pub offset: usize,
    pub kind: EvalErrorKind,
}

/// A parsed expression together with the source it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    source: String,
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let tokens = lex(source)?;
        if tokens.is_empty() {
            return Err(ParseError {
                offset: 0,
                kind: ParseErrorKind::Empty,
            });
        }
        let mut parser = Parser {
            tokens: &tokens,
            pos: 0,
            end: source.len(),
        };
        let root = parser.sum()?;
        if let Some(tok) = parser.peek() {
            let kind = if tok.tok == Tok::RParen {
                ParseErrorKind::Unbalanced
            } else {
                ParseErrorKind::UnexpectedToken(tok.tok.to_string())
            };
            return Err(ParseError {
                offset: tok.offset,
                kind,
            });
        }
        Ok(Expression {
            root,
            source: source.to_string(),
        })
    }

    /// Wraps a hand-built AST; the stored source is its printed form.
    pub fn from_node(root: Node) -> Self {
        let source = root.to_string();
        Expression { root, source }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64, EvalError> {
        self.root.eval(x)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// True when the expression depends on `x`.
    pub fn uses_variable(&self) -> bool {
        self.root.uses_variable()
    }
}

impl FromStr for Expression {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expression::parse(s)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

pub fn parse(source: &str) -> Result<Expression, ParseError> {
    Expression::parse(source)
}

pub fn evaluate(expr: &Expression, x: f64) -> Result<f64, EvalError> {
    expr.evaluate(x)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "`{v}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Op(c) => write!(f, "`{c}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
        }
    }
}

#[derive(Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // Exponent only when digits follow, so `2*e` and `e` stay constants.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &source[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::BadNumber(text.to_string()),
                })?;
                out.push(Token {
                    tok: Tok::Num(value),
                    offset: start,
                });
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(source[start..i].to_string()),
                    offset: start,
                });
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => out.push(Token {
                tok: Tok::Op(c as char),
                offset: start,
            }),
            b'(' => out.push(Token {
                tok: Tok::LParen,
                offset: start,
            }),
            b')' => out.push(Token {
                tok: Tok::RParen,
                offset: start,
            }),
            _ => {
                let ch = source[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::UnexpectedChar(ch),
                });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<&Token, ParseError> {
        let end = self.end;
        let tok = self.tokens.get(self.pos).ok_or(ParseError {
            offset: end,
            kind: ParseErrorKind::UnexpectedEnd,
        })?;
        self.pos += 1;
        Ok(tok)
    }

    fn peek_op(&self) -> Option<(char, usize)> {
        match self.peek() {
            Some(Token {
                tok: Tok::Op(c),
                offset,
            }) => Some((*c, *offset)),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.product()?;
        while let Some((c @ ('+' | '-'), offset)) = self.peek_op() {
            self.pos += 1;
            let rhs = self.product()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node {
                kind: NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some((c @ ('*' | '/'), offset)) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node {
                kind: NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if let Some(('-', offset)) = self.peek_op() {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Node {
                kind: NodeKind::Neg(Box::new(inner)),
                offset,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if let Some(('^', offset)) = self.peek_op() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Node {
                kind: NodeKind::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)),
                offset,
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let Token { tok, offset } = self.next()?;
        let offset = *offset;
        let kind = match tok {
            Tok::Num(v) => NodeKind::Num(*v),
            Tok::LParen => {
                let inner = self.sum()?;
                self.close_paren(offset)?;
                return Ok(inner);
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => NodeKind::Var,
                "e" => NodeKind::E,
                "pi" => NodeKind::Pi,
                other => {
                    let func = Func::from_name(other).ok_or_else(|| ParseError {
                        offset,
                        kind: ParseErrorKind::UnknownIdentifier(other.to_string()),
                    })?;
                    let open = self.next()?;
                    if open.tok != Tok::LParen {
                        return Err(ParseError {
                            offset: open.offset,
                            kind: ParseErrorKind::UnexpectedToken(open.tok.to_string()),
                        });
                    }
                    let open_offset = open.offset;
                    let arg = self.sum()?;
                    self.close_paren(open_offset)?;
                    NodeKind::Call(func, Box::new(arg))
                }
            },
            Tok::RParen => {
                return Err(ParseError {
                    offset,
                    kind: ParseErrorKind::Unbalanced,
                })
            }
            Tok::Op(_) => {
                return Err(ParseError {
                    offset,
                    kind: ParseErrorKind::UnexpectedToken(tok.to_string()),
                })
            }
        };
        Ok(Node { kind, offset })
    }

    fn close_paren(&mut self, open_offset: usize) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token {
                tok: Tok::RParen, ..
            }) => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(ParseError {
                offset: tok.offset,
                kind: ParseErrorKind::UnexpectedToken(tok.tok.to_string()),
            }),
            None => Err(ParseError {
                offset: open_offset,
                kind: ParseErrorKind::Unbalanced,
            }),
        }
    }
}
