use crate::envelope::Connective;
use crate::error::{Error, Result};

use super::ast::{Formula, Language, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    At,
    End,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let digit_at = |k: usize| k < bytes.len() && bytes[k].is_ascii_digit();
        match c {
            _ if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '[' => out.push((start, Tok::LBracket)),
            ']' => out.push((start, Tok::RBracket)),
            ',' => out.push((start, Tok::Comma)),
            '@' => out.push((start, Tok::At)),
            '.' if !digit_at(i + 1) => out.push((start, Tok::Dot)),
            _ if c.is_ascii_digit() || c == '.' || (c == '-' && (digit_at(i + 1) || (bytes.get(i + 1) == Some(&b'.') && digit_at(i + 2)))) => {
                i += 1;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    let exp_sign = (d == '-' || d == '+') && matches!(bytes[i - 1], b'e' | b'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| syntax(start, format!("bad number `{s}`")))?;
                out.push((start, Tok::Num(v)));
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_owned())));
                continue;
            }
            _ => return Err(syntax(start, format!("unexpected character `{}`", &text[start..].chars().next().unwrap()))),
        }
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    lang: &'a Language,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn next(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let (pos, t) = self.next();
        if t == want {
            Ok(())
        } else {
            Err(syntax(pos, format!("expected {what}, found {}", describe(&t))))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.next() {
            (_, Tok::Ident(s)) => Ok(s),
            (pos, t) => Err(syntax(pos, format!("expected {what}, found {}", describe(&t)))),
        }
    }

    fn number(&mut self) -> Result<f64> {
        match self.next() {
            (_, Tok::Num(v)) => Ok(v),
            (pos, t) => Err(syntax(pos, format!("expected a number, found {}", describe(&t)))),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let pos = self.pos();
        match self.next().1 {
            Tok::Num(v) => Formula::constant(v).map_err(|e| at(pos, e)),
            Tok::Ident(name) => match name.as_str() {
                "sup" | "inf" => {
                    let var = self.ident("a variable")?;
                    self.expect(Tok::Dot, "`.`")?;
                    let body = self.formula()?;
                    let r = if name == "sup" { Formula::sup(&var, body) } else { Formula::inf(&var, body) };
                    r.map_err(|e| at(pos, e))
                }
                "scale" | "proj" => {
                    self.expect(Tok::LBracket, "`[`")?;
                    let npos = self.pos();
                    let v = self.number()?;
                    self.expect(Tok::RBracket, "`]`")?;
                    let op = if name == "scale" {
                        Connective::Scale(v)
                    } else {
                        if v < 0.0 || v.fract() != 0.0 {
                            return Err(syntax(npos, "projection index must be a nonnegative integer"));
                        }
                        Connective::Proj(v as usize)
                    };
                    let args = self.formula_list()?;
                    Formula::apply(op, args).map_err(|e| at(pos, e))
                }
                "add" | "sub" | "max" | "min" | "monus" | "dist" => {
                    let op = match name.as_str() {
                        "add" => Connective::Add,
                        "sub" => Connective::Sub,
                        "max" => Connective::Max,
                        "min" => Connective::Min,
                        "monus" => Connective::Monus,
                        _ => Connective::Dist,
                    };
                    let args = self.formula_list()?;
                    Formula::apply(op, args).map_err(|e| at(pos, e))
                }
                _ => {
                    let args = self.term_list()?;
                    Formula::atomic(self.lang, &name, args)
                }
            },
            t => Err(syntax(pos, format!("expected a formula, found {}", describe(&t)))),
        }
    }

    fn formula_list(&mut self) -> Result<Vec<Formula>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = Vec::new();
        if *self.peek() == Tok::RParen {
            self.next();
            return Ok(out);
        }
        loop {
            out.push(self.formula()?);
            match self.next() {
                (_, Tok::Comma) => {}
                (_, Tok::RParen) => return Ok(out),
                (pos, t) => return Err(syntax(pos, format!("expected `,` or `)`, found {}", describe(&t)))),
            }
        }
    }

    fn term_list(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = Vec::new();
        if *self.peek() == Tok::RParen {
            self.next();
            return Ok(out);
        }
        loop {
            let t = if *self.peek() == Tok::At {
                self.next();
                Term::Element(self.ident("an element label")?)
            } else {
                Term::Var(self.ident("a variable")?)
            };
            out.push(t);
            match self.next() {
                (_, Tok::Comma) => {}
                (_, Tok::RParen) => return Ok(out),
                (pos, t) => return Err(syntax(pos, format!("expected `,` or `)`, found {}", describe(&t)))),
            }
        }
    }
}

fn at(pos: usize, e: Error) -> Error {
    match e {
        Error::QuantifierGuard(m) => Error::QuantifierGuard(format!("at {pos}: body envelope {m} is not contained in [0, inf)")),
        other => other,
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(v) => format!("number {v}"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::At => "`@`".into(),
        Tok::End => "end of input".into(),
    }
}

/// Parses a formula.
///
/// ```text
/// formula := number
///          | ("sup" | "inf") ident "." formula
///          | ("add" | "sub" | "max" | "min" | "monus" | "dist") "(" formula "," formula ")"
///          | ("scale" | "proj") "[" number "]" "(" formula ")"
///          | ident "(" [term {"," term}] ")"
/// term    := ident | "@" ident
/// ```
pub fn parse_formula(text: &str, lang: &Language) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, at: 0, lang };
    let f = p.formula()?;
    match p.next() {
        (_, Tok::End) => Ok(f),
        (pos, t) => Err(syntax(pos, format!("trailing input starting at {}", describe(&t)))),
    }
}
