use super::lexer::{tokenize, Tok, Token};
use super::{Ast, Atom, BinOp, Expr, Func, LangError, LangErrorKind, Span};

/// Nesting deeper than this is rejected instead of risking stack exhaustion.
const MAX_DEPTH: usize = 200;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

pub fn parse(src: &str) -> Result<Ast, LangError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        depth: 0,
    };
    let ast = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::Eof {
        return Err(LangError::syntax(t.span, format!("unexpected token {:?}", t.tok)));
    }
    Ok(ast)
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Span, LangError> {
        let t = self.bump();
        if t.tok == want {
            Ok(t.span)
        } else {
            Err(LangError::syntax(
                t.span,
                format!("expected {what}, found {:?}", t.tok),
            ))
        }
    }

    fn enter(&mut self) -> Result<(), LangError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(LangError::syntax(self.peek().span, "expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Ast, LangError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            let span = lhs.span.join(rhs.span);
            lhs = Ast {
                expr: Expr::Bin(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast, LangError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            let span = lhs.span.join(rhs.span);
            lhs = Ast {
                expr: Expr::Bin(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, LangError> {
        if self.peek().tok == Tok::Minus {
            let start = self.bump().span;
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            let span = start.join(inner.span);
            return Ok(Ast {
                expr: Expr::Neg(Box::new(inner)),
                span,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ast, LangError> {
        let t = self.bump();
        match t.tok {
            Tok::Int(n) => Ok(Ast {
                expr: Expr::Int(n),
                span: t.span,
            }),
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.expect(Tok::RParen, "')'")?;
                Ok(Ast {
                    span: t.span.join(close),
                    ..inner
                })
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_ident(&name) {
                    return self.call(func, t.span);
                }
                let Some(atom) = Atom::from_ident(&name) else {
                    return Err(LangError::new(
                        LangErrorKind::UnknownIdentifier,
                        t.span,
                        format!("unknown identifier {name:?}"),
                    ));
                };
                if self.peek().tok != Tok::LBracket {
                    return Ok(Ast {
                        expr: Expr::Atom(atom, None),
                        span: t.span,
                    });
                }
                self.bump();
                let idx_tok = self.bump();
                let idx = match &idx_tok.tok {
                    Tok::Int(n) => n.clone(),
                    other => {
                        return Err(LangError::syntax(
                            idx_tok.span,
                            format!("expected an index, found {other:?}"),
                        ))
                    }
                };
                let close = self.expect(Tok::RBracket, "']'")?;
                if !atom.is_vector() {
                    return Err(LangError::new(
                        LangErrorKind::IndexOutOfRange,
                        idx_tok.span,
                        format!("{} takes no index", atom.text()),
                    ));
                }
                let k: u8 = match u8::try_from(&idx) {
                    Ok(k @ 1..=3) => k - 1,
                    _ => {
                        return Err(LangError::new(
                            LangErrorKind::IndexOutOfRange,
                            idx_tok.span,
                            format!("index {idx} is outside 1..=3"),
                        ))
                    }
                };
                Ok(Ast {
                    expr: Expr::Atom(atom, Some(k)),
                    span: t.span.join(close),
                })
            }
            other => Err(LangError::syntax(
                t.span,
                format!("expected an expression, found {other:?}"),
            )),
        }
    }

    fn call(&mut self, func: Func, start: Span) -> Result<Ast, LangError> {
        self.expect(Tok::LParen, "'('")?;
        let mut args = vec![self.expr()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        let close = self.expect(Tok::RParen, "')'")?;
        if args.len() != func.arity() {
            return Err(LangError::syntax(
                start,
                format!(
                    "{} takes {} argument(s), got {}",
                    func.text(),
                    func.arity(),
                    args.len()
                ),
            ));
        }
        Ok(Ast {
            expr: Expr::Call(func, args),
            span: start.join(close),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comm_of_quotients() {
        let ast = parse("Comm(K[1]/H, K[2]/H)").unwrap();
        match ast.expr {
            Expr::Call(Func::Comm, args) => {
                assert!(matches!(args[0].expr, Expr::Bin(BinOp::Div, ..)));
                assert!(matches!(args[1].expr, Expr::Bin(BinOp::Div, ..)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_located() {
        let err = parse("J - i*Cross(P, Q)").unwrap_err();
        assert_eq!(err.kind, LangErrorKind::UnknownIdentifier);
        assert_eq!((err.line, err.col), (1, 16));
    }

    #[test]
    fn index_range_is_checked() {
        assert_eq!(parse("K[4]").unwrap_err().kind, LangErrorKind::IndexOutOfRange);
        assert_eq!(parse("K[0]").unwrap_err().kind, LangErrorKind::IndexOutOfRange);
        assert_eq!(parse("H[1]").unwrap_err().kind, LangErrorKind::IndexOutOfRange);
    }

    #[test]
    fn multiline_positions() {
        let err = parse("K[1] +\n  * H").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
    }

    #[test]
    fn precedence_and_associativity() {
        let ast = parse("a").unwrap_err();
        assert_eq!(ast.kind, LangErrorKind::UnknownIdentifier);
        let ast = parse("1 - 2 - 3*4/5").unwrap();
        assert_eq!(ast.to_string(), "1 - 2 - 3*4/5");
        let ast = parse("1 - (2 - 3)").unwrap();
        assert_eq!(ast.to_string(), "1 - (2 - 3)");
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = format!("{}1{}", "(".repeat(5000), ")".repeat(5000));
        assert_eq!(parse(&src).unwrap_err().kind, LangErrorKind::Syntax);
        let src = format!("{}1", "-".repeat(5000));
        assert_eq!(parse(&src).unwrap_err().kind, LangErrorKind::Syntax);
    }
}
