use num_bigint::BigInt;
use num_rational::BigRational;

use super::parser::parse;
use super::{Ast, Atom, BinOp, Expr, Func, LangError, LangErrorKind, Span};
use crate::algebra::{Algebra, AlgebraError, OperatorExpr, ScalarCoeff, VectorExpr};

/// Largest accepted `|n|` in `Pow(x, n)`.
pub const MAX_EXPONENT: i64 = 32;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(OperatorExpr),
    Vector(VectorExpr),
}

impl Value {
    pub fn into_scalar(self) -> Option<OperatorExpr> {
        match self {
            Value::Scalar(e) => Some(e),
            Value::Vector(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Scalar(e) => e.is_zero(),
            Value::Vector(v) => v.is_zero(),
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Scalar(e) => write!(f, "{e}"),
            Value::Vector(v) => write!(f, "[{}, {}, {}]", v.0[0], v.0[1], v.0[2]),
        }
    }
}

fn alg_err(span: Span, e: AlgebraError) -> LangError {
    LangError::new(LangErrorKind::Algebra, span, e.to_string())
}

fn arity(span: Span, msg: &str) -> LangError {
    LangError::new(LangErrorKind::Arity, span, msg)
}

fn scalar(v: Value, span: Span, what: &str) -> Result<OperatorExpr, LangError> {
    match v {
        Value::Scalar(e) => Ok(e),
        Value::Vector(_) => Err(arity(span, &format!("{what} needs a scalar, got a vector"))),
    }
}

fn vector(v: Value, span: Span, what: &str) -> Result<VectorExpr, LangError> {
    match v {
        Value::Vector(e) => Ok(e),
        Value::Scalar(_) => Err(arity(span, &format!("{what} needs a vector, got a scalar"))),
    }
}

fn exponent(ast: &Ast) -> Result<i32, LangError> {
    let (neg, inner) = match &ast.expr {
        Expr::Neg(x) => (true, x.as_ref()),
        _ => (false, ast),
    };
    let Expr::Int(n) = &inner.expr else {
        return Err(LangError::syntax(ast.span, "Pow exponent must be an integer literal"));
    };
    let n = if neg { -n.clone() } else { n.clone() };
    let lim = BigInt::from(MAX_EXPONENT);
    if n > lim || n < -lim {
        return Err(LangError::new(
            LangErrorKind::Algebra,
            ast.span,
            format!("exponent {n} exceeds the limit {MAX_EXPONENT}"),
        ));
    }
    Ok(i32::try_from(&n).expect("bounded"))
}

/// Maps an AST onto the algebra. Products keep the written order.
pub fn lower(ast: &Ast, alg: &Algebra) -> Result<Value, LangError> {
    let span = ast.span;
    let ae = |e| alg_err(span, e);
    Ok(match &ast.expr {
        Expr::Int(n) => Value::Scalar(OperatorExpr::scalar(ScalarCoeff::from_rational(
            BigRational::from_integer(n.clone()),
        ))),
        Expr::Atom(a, idx) => {
            let comp = |k: usize| match a {
                Atom::P => alg.p(k),
                Atom::J => alg.j(k),
                Atom::K => alg.k(k),
                Atom::Phat => alg.phat(k),
                _ => unreachable!("scalar atoms carry no index"),
            };
            match (a, idx) {
                (Atom::H, _) => Value::Scalar(alg.h()),
                (Atom::M, _) => Value::Scalar(alg.m()),
                (Atom::I, _) => Value::Scalar(alg.i()),
                (_, Some(k)) => Value::Scalar(comp(*k as usize)),
                (_, None) => Value::Vector(VectorExpr::from_fn(comp)),
            }
        }
        Expr::Neg(x) => match lower(x, alg)? {
            Value::Scalar(e) => Value::Scalar(e.neg()),
            Value::Vector(v) => Value::Vector(VectorExpr::from_fn(|k| v.0[k].neg())),
        },
        Expr::Bin(op, l, r) => {
            let a = lower(l, alg)?;
            let b = lower(r, alg)?;
            match op {
                BinOp::Add | BinOp::Sub => {
                    let sign = |x: &OperatorExpr, y: &OperatorExpr| {
                        if *op == BinOp::Add {
                            x.add(y)
                        } else {
                            x.sub(y)
                        }
                    };
                    match (a, b) {
                        (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(sign(&x, &y)),
                        (Value::Vector(x), Value::Vector(y)) => {
                            Value::Vector(VectorExpr::from_fn(|k| sign(&x.0[k], &y.0[k])))
                        }
                        _ => return Err(arity(span, "cannot add a scalar and a vector")),
                    }
                }
                BinOp::Mul => match (a, b) {
                    (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(alg.mul(&x, &y).map_err(ae)?),
                    (Value::Scalar(x), Value::Vector(y)) => {
                        Value::Vector(alg.scalar_vec(&x, &y).map_err(ae)?)
                    }
                    (Value::Vector(x), Value::Scalar(y)) => {
                        Value::Vector(alg.vec_scalar(&x, &y).map_err(ae)?)
                    }
                    (Value::Vector(_), Value::Vector(_)) => {
                        return Err(arity(span, "product of two vectors; use Dot or Cross"))
                    }
                },
                BinOp::Div => {
                    let d = scalar(b, r.span, "a divisor")?;
                    let c = d.as_scalar().ok_or_else(|| {
                        LangError::new(
                            LangErrorKind::DivisionByOperator,
                            r.span,
                            "division by an expression containing J or K",
                        )
                    })?;
                    let inv = OperatorExpr::scalar(c.inv().map_err(|e| alg_err(r.span, e))?);
                    match a {
                        Value::Scalar(x) => Value::Scalar(alg.mul(&x, &inv).map_err(ae)?),
                        Value::Vector(x) => Value::Vector(alg.vec_scalar(&x, &inv).map_err(ae)?),
                    }
                }
            }
        }
        Expr::Call(func, args) => match func {
            Func::Comm => {
                let x = scalar(lower(&args[0], alg)?, args[0].span, "Comm")?;
                let y = scalar(lower(&args[1], alg)?, args[1].span, "Comm")?;
                Value::Scalar(alg.commutator(&x, &y).map_err(ae)?)
            }
            Func::Adjoint => match lower(&args[0], alg)? {
                Value::Scalar(x) => Value::Scalar(alg.adjoint(&x).map_err(ae)?),
                Value::Vector(v) => Value::Vector(alg.adjoint_vec(&v).map_err(ae)?),
            },
            Func::Dot => {
                let x = vector(lower(&args[0], alg)?, args[0].span, "Dot")?;
                let y = vector(lower(&args[1], alg)?, args[1].span, "Dot")?;
                Value::Scalar(alg.dot(&x, &y).map_err(ae)?)
            }
            Func::Cross => {
                let x = vector(lower(&args[0], alg)?, args[0].span, "Cross")?;
                let y = vector(lower(&args[1], alg)?, args[1].span, "Cross")?;
                Value::Vector(alg.cross(&x, &y).map_err(ae)?)
            }
            Func::Pow => {
                let n = exponent(&args[1])?;
                let x = scalar(lower(&args[0], alg)?, args[0].span, "Pow")?;
                Value::Scalar(alg.pow(&x, n).map_err(ae)?)
            }
        },
    })
}

/// Parses and lowers in one step.
pub fn eval_str(src: &str, alg: &Algebra) -> Result<Value, LangError> {
    lower(&parse(src)?, alg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Mode;

    fn eval(s: &str) -> Value {
        eval_str(s, &Algebra::new(Mode::Massive)).unwrap()
    }

    #[test]
    fn energy_power_commutator() {
        let alg = Algebra::new(Mode::Massive);
        let v = eval("Comm(K[1], Pow(H,2))");
        let expect = alg.mul(&alg.p(0), &alg.h()).unwrap().left_scale(&ScalarCoeff::int(2).mul(&ScalarCoeff::i()));
        assert_eq!(v, Value::Scalar(expect));
    }

    #[test]
    fn trivial_zeros() {
        assert!(eval("Comm(J[1],J[1])").is_zero());
        assert!(eval("Dot(P,Cross(P,J))").is_zero());
    }

    #[test]
    fn appendix_form_is_zero() {
        assert!(eval("Dot(Phat,K) - Dot(K,Phat) + 2*i*H/Pow(Dot(P,P),1)*Dot(Phat,P)").is_zero());
    }

    #[test]
    fn division_by_operator_is_rejected() {
        let err = eval_str("H/K[1]", &Algebra::new(Mode::Massive)).unwrap_err();
        assert_eq!(err.kind, LangErrorKind::DivisionByOperator);
        let err = eval_str("H/(m-m)", &Algebra::new(Mode::Massive)).unwrap_err();
        assert_eq!(err.kind, LangErrorKind::Algebra);
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let alg = Algebra::new(Mode::Massive);
        assert_eq!(eval_str("P + H", &alg).unwrap_err().kind, LangErrorKind::Arity);
        assert_eq!(eval_str("Dot(H, P)", &alg).unwrap_err().kind, LangErrorKind::Arity);
        assert_eq!(eval_str("P*J", &alg).unwrap_err().kind, LangErrorKind::Arity);
    }

    #[test]
    fn rotation_generator_prints_canonically() {
        assert_eq!(eval("Comm(K[1],K[2])").to_string(), "-i*J[3]");
    }
}
