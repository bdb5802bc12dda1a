//! Text syntax for operator expressions.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | primary ;
//! primary = integer | atom | call | "(" expr ")" ;
//! atom    = ("H" | "m" | "i") | ("P" | "J" | "K" | "Phat") [ "[" index "]" ] ;
//! call    = "Comm" "(" expr "," expr ")" | "Adjoint" "(" expr ")"
//!         | "Dot" "(" expr "," expr ")" | "Cross" "(" expr "," expr ")"
//!         | "Pow" "(" expr "," ["-"] integer ")" ;
//! index   = "1" | "2" | "3" ;
//! ```
//!
//! Products keep their written order. `a / c` is `a * c^-1` and requires `c`
//! to be a pure coefficient. Unindexed `P`, `J`, `K`, `Phat` are vectors.

mod lexer;
mod lower;
mod parser;

use std::fmt;

use num_bigint::BigInt;

pub use lower::{eval_str, lower, Value};
pub use parser::parse;

/// Identities stated in the text syntax as `(lhs, rhs)` pairs.
pub const CATALOG: &[(&str, &str)] = &[
    ("Comm(K[1],K[2])", "-i*J[3]"),
    ("Comm(J[1],K[2])", "i*K[3]"),
    ("Comm(K[2],P[2])", "i*H"),
    ("Comm(K[3],H)", "i*P[3]"),
    ("Comm(J[1],P[2])", "i*P[3]"),
    ("Comm(K[1],Pow(H,-3))", "-3*i*P[1]*Pow(H,-4)"),
    ("Comm(K[2],Pow(Dot(Phat,P),3))", "3*i*H*P[2]*Dot(Phat,P)"),
    ("Comm(Dot(P,K),P[1])", "i*H*P[1]"),
    ("Comm(Phat[1],K[2])", "i*H*P[1]*P[2]/Pow(Dot(Phat,P),3)"),
    ("Comm(H*K[1],P[1]/H)", "i*H - i*P[1]*P[1]/H"),
    ("Comm(K[2]/H,H*P[3])", "i*P[2]*P[3]/H"),
    ("Dot(Phat,K) - Dot(K,Phat)", "-2*i*H/Dot(Phat,P)"),
    ("Dot(P,K) - Dot(K,P)", "-3*i*H"),
    ("Comm(K[1]/H,K[2]/H)", "-i*J[3]/Pow(H,2) + i*(P[2]*K[1] - P[1]*K[2])/Pow(H,3)"),
    ("Comm(K[1]/H,P[2]/Pow(H,2))", "-2*i*P[1]*P[2]/Pow(H,4)"),
    ("Comm(P[1]/Pow(H,2),K[2]/H)", "2*i*P[1]*P[2]/Pow(H,4)"),
    ("Adjoint(Cross(P,J))", "Cross(P,J) - 2*i*P"),
    ("Cross(Phat,Cross(Phat,J))", "Phat*Dot(Phat,J) - J"),
    ("Adjoint(1/H*K - i*P/(2*Pow(H,2)))", "1/H*K - i*P/(2*Pow(H,2))"),
    ("K/H", "1/H*K - i*P/Pow(H,2)"),
];

/// Token fragments for fuzzing the parser and lowering: atoms, calls,
/// punctuation and deliberate junk.
pub const FUZZ_TOKENS: &[&str] = &[
    "H", "m", "i", "P", "J", "K", "Phat", "P[1]", "K[2]", "J[3]", "[", "]", "(", ")", ",", "+",
    "-", "*", "/", "0", "1", "2", "7", "Comm(", "Adjoint(", "Dot(", "Cross(", "Pow(", "Q", "\n",
    " ", "K[9]", "?", "99999999999999999999",
];

/// Byte range plus 1-based line and column of the first character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
            ..self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LangErrorKind {
    Syntax,
    UnknownIdentifier,
    IndexOutOfRange,
    /// Vector where a scalar is required or the reverse.
    Arity,
    DivisionByOperator,
    Algebra,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct LangError {
    pub kind: LangErrorKind,
    pub message: String,
    pub line: usize,
    pub col: usize,
}

impl LangError {
    pub(crate) fn new(kind: LangErrorKind, span: Span, message: impl Into<String>) -> Self {
        LangError {
            kind,
            message: message.into(),
            line: span.line,
            col: span.col,
        }
    }

    pub(crate) fn syntax(span: Span, message: impl Into<String>) -> Self {
        Self::new(LangErrorKind::Syntax, span, message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    H,
    M,
    I,
    P,
    J,
    K,
    Phat,
}

impl Atom {
    fn from_ident(s: &str) -> Option<Atom> {
        Some(match s {
            "H" => Atom::H,
            "m" => Atom::M,
            "i" => Atom::I,
            "P" => Atom::P,
            "J" => Atom::J,
            "K" => Atom::K,
            "Phat" => Atom::Phat,
            _ => return None,
        })
    }

    fn is_vector(self) -> bool {
        matches!(self, Atom::P | Atom::J | Atom::K | Atom::Phat)
    }

    fn text(self) -> &'static str {
        match self {
            Atom::H => "H",
            Atom::M => "m",
            Atom::I => "i",
            Atom::P => "P",
            Atom::J => "J",
            Atom::K => "K",
            Atom::Phat => "Phat",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Comm,
    Adjoint,
    Dot,
    Cross,
    Pow,
}

impl Func {
    fn from_ident(s: &str) -> Option<Func> {
        Some(match s {
            "Comm" => Func::Comm,
            "Adjoint" => Func::Adjoint,
            "Dot" => Func::Dot,
            "Cross" => Func::Cross,
            "Pow" => Func::Pow,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Adjoint => 1,
            _ => 2,
        }
    }

    fn text(self) -> &'static str {
        match self {
            Func::Comm => "Comm",
            Func::Adjoint => "Adjoint",
            Func::Dot => "Dot",
            Func::Cross => "Cross",
            Func::Pow => "Pow",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    /// Index is zero-based after parsing.
    Atom(Atom, Option<u8>),
    Neg(Box<Ast>),
    Bin(BinOp, Box<Ast>, Box<Ast>),
    Call(Func, Vec<Ast>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ast {
    pub expr: Expr,
    pub span: Span,
}

impl Ast {
    fn precedence(&self) -> u8 {
        match &self.expr {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(..) => 2,
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Ast, min: u8) -> fmt::Result {
    if child.precedence() < min {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.expr {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Atom(a, None) => write!(f, "{}", a.text()),
            Expr::Atom(a, Some(k)) => write!(f, "{}[{}]", a.text(), k + 1),
            Expr::Neg(x) => {
                write!(f, "-")?;
                write_child(f, x, 3)
            }
            Expr::Bin(op, l, r) => {
                let (p, sym) = match op {
                    BinOp::Add => (1, " + "),
                    BinOp::Sub => (1, " - "),
                    BinOp::Mul => (2, "*"),
                    BinOp::Div => (2, "/"),
                };
                write_child(f, l, p)?;
                write!(f, "{sym}")?;
                write_child(f, r, p + 1)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.text())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
