//! Recursive-descent parser for variety expressions.
//!
//! ```text
//! expr   := term { ("+" | "-") term }
//! term   := factor { "*" factor }
//! factor := INT | "L" | NAME | "Bl(" NAME ";" NAME ")" | "E(" NAME ";" NAME ")" | "(" expr ")"
//! ```

use num_bigint::BigInt;

use super::expr::{DerivedTerm, Generator, VarietyExpr};
use super::relations::{Relation, RelationSet};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Semi,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b';' => Tok::Semi,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(text[start..i].parse().unwrap()), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((Tok::Name(text[start..i].to_owned()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(Error::Syntax {
                    pos: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    rels: &'a RelationSet,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        let found = match self.peek() {
            Tok::End => "end of input".to_owned(),
            t => format!("{t:?}"),
        };
        Error::Syntax {
            pos: self.pos(),
            message: format!("expected {what}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<VarietyExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = VarietyExpr::sum(acc, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = VarietyExpr::diff(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<VarietyExpr> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = VarietyExpr::prod(acc, self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<VarietyExpr> {
        let pos = self.pos();
        let tok = self.peek().clone();
        match tok {
            Tok::Int(n) => {
                self.bump();
                Ok(VarietyExpr::Int(n))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Name(n) if n == "L" => {
                self.bump();
                Ok(VarietyExpr::Lefschetz)
            }
            Tok::Name(n) if (n == "Bl" || n == "E") && self.toks[self.at + 1].0 == Tok::LParen => {
                self.bump();
                self.bump();
                let (base, base_pos) = self.name()?;
                self.expect(Tok::Semi, "`;`")?;
                let (center, center_pos) = self.name()?;
                self.expect(Tok::RParen, "`)`")?;
                self.resolve(&base, base_pos)?;
                self.resolve(&center, center_pos)?;
                let term = if n == "Bl" {
                    DerivedTerm::BlowupTotal
                } else {
                    DerivedTerm::Exceptional
                };
                self.derived(term, base, center)
            }
            Tok::Name(n) => {
                self.bump();
                self.resolve(&n, pos)?;
                Ok(VarietyExpr::Gen(Generator::from_name(&n)))
            }
            _ => Err(self.unexpected("a factor")),
        }
    }

    fn name(&mut self) -> Result<(String, usize)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Name(n) if n != "L" => {
                self.bump();
                Ok((n, pos))
            }
            _ => Err(self.unexpected("a generator name")),
        }
    }

    fn resolve(&self, name: &str, pos: usize) -> Result<()> {
        if self.rels.is_known(name) {
            Ok(())
        } else {
            Err(Error::UnknownGenerator {
                name: name.to_owned(),
                pos,
            })
        }
    }

    fn derived(&self, term: DerivedTerm, base: String, center: String) -> Result<VarietyExpr> {
        let Some((relation, rel)) = self.rels.find_blowup(&base, &center) else {
            let msg = if self.rels.find_open(&base, &center).is_some() {
                format!("({base};{center}) is declared as an open decomposition, not a blowup")
            } else {
                format!("no blowup relation with base `{base}` and center `{center}`")
            };
            return Err(Error::ShapeMismatch(msg));
        };
        let Relation::Blowup {
            exceptional, total, ..
        } = rel
        else {
            unreachable!("find_blowup returns blowup relations")
        };
        let name = match term {
            DerivedTerm::BlowupTotal => total.clone(),
            _ => exceptional.clone(),
        };
        Ok(VarietyExpr::Derived {
            term,
            relation,
            base,
            center,
            name,
        })
    }
}

/// Parses `text` against the generators and relations of `rels`.
pub fn parse_expr(text: &str, rels: &RelationSet) -> Result<VarietyExpr> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        rels,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}
