//! Witness file format.
//!
//! ```text
//! # comment
//! name: I
//! maximize:
//!   2*sqrt(P(0,0,0)) + 2*sqrt(P(1,0,1)) + 3*sqrt(P(1,1,0))
//!   - 18*abs(P_B(0) - 1/4)
//! ```
//!
//! Atoms are `P(a,b,c)`, `PdoA(a|b)`, `PdoC(c|b)` and numeric constants
//! (integers, decimals, `p/q`). Correlator sugar `P_B(b)`, `E_A(b)`, `E_C(b)`,
//! `E_AC(b)`, `EdoA(b)`, `EdoC(b)` expands to probabilities when parsed.
//! Square roots and absolute values take linear arguments only.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use super::{FunctionalSpec, LinearForm, Rational, Term, COORDS, DO_OFFSET};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    Bar,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn parse_decimal(text: &str, line: usize, column: usize) -> Result<Rational> {
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    let digits = format!("{int}{frac}");
    let numer: i64 = digits
        .parse()
        .map_err(|_| syntax(line, column, format!("bad number `{text}`")))?;
    let denom = 10i64
        .checked_pow(frac.len() as u32)
        .ok_or_else(|| syntax(line, column, format!("too many decimals in `{text}`")))?;
    Ok(Rational::new(numer, denom))
}

fn tokenize(source: &str, first_line: usize, first_col: usize) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, raw_line) in source.lines().enumerate() {
        let line = first_line + li;
        let offset = if li == 0 { first_col - 1 } else { 0 };
        let text = raw_line.split('#').next().unwrap_or("");
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let column = offset + i + 1;
            let single = match ch {
                '+' => Some(Tok::Plus),
                '-' => Some(Tok::Minus),
                '*' => Some(Tok::Star),
                '/' => Some(Tok::Slash),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ',' => Some(Tok::Comma),
                '|' => Some(Tok::Bar),
                _ => None,
            };
            if let Some(tok) = single {
                out.push(Spanned { tok, line, column });
                i += 1;
            } else if ch.is_whitespace() {
                i += 1;
            } else if ch.is_ascii_digit() || ch == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value = parse_decimal(&text, line, column)?;
                out.push(Spanned {
                    tok: Tok::Num(value),
                    line,
                    column,
                });
            } else if ch.is_ascii_alphabetic() || ch == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line,
                    column,
                });
            } else {
                return Err(syntax(line, column, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(out)
}

/// Intermediate value while parsing: linear part plus accumulated
/// square-root and absolute-value terms.
#[derive(Debug, Clone)]
struct Expr {
    linear: LinearForm,
    sqrt: Vec<Term>,
    abs: Vec<Term>,
}

impl Expr {
    fn linear(form: LinearForm) -> Self {
        Self {
            linear: form,
            sqrt: Vec::new(),
            abs: Vec::new(),
        }
    }

    fn as_constant(&self) -> Option<Rational> {
        (self.sqrt.is_empty() && self.abs.is_empty() && self.linear.is_constant())
            .then(|| self.linear.constant_term())
    }

    fn as_linear(&self) -> Option<&LinearForm> {
        (self.sqrt.is_empty() && self.abs.is_empty()).then_some(&self.linear)
    }

    fn scale(mut self, k: Rational) -> Self {
        self.linear = self.linear.scale(k);
        for t in self.sqrt.iter_mut().chain(self.abs.iter_mut()) {
            t.coefficient *= k;
        }
        self
    }

    fn add(mut self, rhs: Expr) -> Self {
        self.linear = self.linear + rhs.linear;
        self.sqrt.extend(rhs.sqrt);
        self.abs.extend(rhs.abs);
        self
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.column))
            .unwrap_or(self.end)
    }

    fn err(&self, message: impl Into<String>) -> Error {
        let (line, column) = self.here();
        syntax(line, column, message)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.add(self.term()?.scale(Rational::from_integer(-1)));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    let at = self.here();
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = match (acc.as_constant(), rhs.as_constant()) {
                        (Some(k), _) => rhs.scale(k),
                        (_, Some(k)) => acc.scale(k),
                        _ => {
                            return Err(Error::Semantic(format!(
                                "line {}, column {}: product of two non-constant expressions",
                                at.0, at.1
                            )))
                        }
                    };
                }
                Some(Tok::Slash) => {
                    let at = self.here();
                    self.pos += 1;
                    let rhs = self.unary()?;
                    match rhs.as_constant() {
                        Some(k) if !k.is_zero() => acc = acc.scale(k.recip()),
                        _ => {
                            return Err(Error::Semantic(format!(
                                "line {}, column {}: division by a non-constant or zero",
                                at.0, at.1
                            )))
                        }
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.scale(Rational::from_integer(-1)))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn bit(&mut self) -> Result<usize> {
        match self.peek() {
            Some(Tok::Num(n)) if *n == Rational::zero() || *n == Rational::from_integer(1) => {
                let v = usize::from(!n.is_zero());
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("expected an outcome 0 or 1")),
        }
    }

    fn bits(&mut self, count: usize, sep: Tok, sep_name: &str) -> Result<Vec<usize>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = vec![self.bit()?];
        for _ in 1..count {
            self.expect(sep.clone(), sep_name)?;
            out.push(self.bit()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(out)
    }

    fn primary(&mut self) -> Result<Expr> {
        let (line, column) = self.here();
        match self.next() {
            Some(Tok::Num(n)) => Ok(Expr::linear(LinearForm::constant(n))),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.call(&name, line, column),
            Some(_) => {
                self.pos -= 1;
                Err(self.err("expected a number, `(` or a function"))
            }
            None => Err(self.err("unexpected end of expression")),
        }
    }

    fn call(&mut self, name: &str, line: usize, column: usize) -> Result<Expr> {
        let form = match name {
            "sqrt" | "abs" => {
                self.expect(Tok::LParen, "`(`")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let Some(form) = inner.as_linear().cloned() else {
                    return Err(Error::Semantic(format!(
                        "line {line}, column {column}: `{name}` of a non-linear expression"
                    )));
                };
                let mut e = Expr::linear(LinearForm::zero());
                let term = Term::new(Rational::from_integer(1), form);
                if name == "sqrt" {
                    if !term.form.is_nonnegative_combination() {
                        return Err(Error::Semantic(format!(
                            "line {line}, column {column}: sqrt argument is not a nonnegative combination of probabilities"
                        )));
                    }
                    e.sqrt.push(term);
                } else {
                    e.abs.push(term);
                }
                return Ok(e);
            }
            "P" => {
                let v = self.bits(3, Tok::Comma, "`,`")?;
                LinearForm::prob(v[0], v[1], v[2])
            }
            "PdoA" => {
                let v = self.bits(2, Tok::Bar, "`|`")?;
                LinearForm::do_a(v[0], v[1])
            }
            "PdoC" => {
                let v = self.bits(2, Tok::Bar, "`|`")?;
                LinearForm::do_c(v[0], v[1])
            }
            "P_B" => LinearForm::p_b(self.bits(1, Tok::Comma, "`,`")?[0]),
            "E_A" => LinearForm::correlator(1, 0, self.bits(1, Tok::Comma, "`,`")?[0]),
            "E_C" => LinearForm::correlator(0, 1, self.bits(1, Tok::Comma, "`,`")?[0]),
            "E_AC" => LinearForm::correlator(1, 1, self.bits(1, Tok::Comma, "`,`")?[0]),
            "EdoA" => LinearForm::do_a_mean(self.bits(1, Tok::Comma, "`,`")?[0]),
            "EdoC" => LinearForm::do_c_mean(self.bits(1, Tok::Comma, "`,`")?[0]),
            other => return Err(syntax(line, column, format!("unknown function `{other}`"))),
        };
        Ok(Expr::linear(form))
    }
}

/// Parses a witness file.
pub fn parse(text: &str) -> Result<FunctionalSpec> {
    let mut name: Option<String> = None;
    let mut body: Option<(usize, usize, String)> = None;
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        if let Some((_, _, acc)) = body.as_mut() {
            acc.push('\n');
            acc.push_str(raw);
            continue;
        }
        let stripped = raw.split('#').next().unwrap_or("");
        if stripped.trim().is_empty() {
            continue;
        }
        let indent = stripped.len() - stripped.trim_start().len();
        let trimmed = stripped.trim();
        if let Some(rest) = trimmed.strip_prefix("name:") {
            let n = rest.trim();
            if n.is_empty() {
                return Err(syntax(line, indent + 1, "empty witness name"));
            }
            name = Some(n.to_string());
        } else if trimmed.starts_with("maximize:") {
            let start = stripped.find("maximize:").expect("prefix present") + "maximize:".len();
            body = Some((line, start + 1, stripped[start..].to_string()));
        } else {
            return Err(syntax(line, indent + 1, "expected `name:` or `maximize:`"));
        }
    }
    let name = name.ok_or_else(|| syntax(1, 1, "missing `name:` header"))?;
    let (line, column, source) = body.ok_or_else(|| syntax(1, 1, "missing `maximize:` section"))?;
    let toks = tokenize(&source, line, column)?;
    let last_line = line + source.lines().count().saturating_sub(1);
    let mut p = Parser {
        toks,
        pos: 0,
        end: (last_line, source.lines().last().map_or(column, |l| l.len() + 1)),
    };
    if p.peek().is_none() {
        return Err(p.err("empty expression"));
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("unexpected trailing input"));
    }
    let keep = |ts: Vec<Term>| ts.into_iter().filter(|t| !t.coefficient.is_zero()).collect();
    let linear_terms = if e.linear.is_zero() {
        vec![]
    } else {
        vec![Term::new(Rational::from_integer(1), e.linear)]
    };
    FunctionalSpec::new(name, keep(e.sqrt), keep(e.abs), linear_terms)
}

fn fmt_rational(x: Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn coord_name(k: usize) -> String {
    if k < DO_OFFSET {
        format!("P({},{},{})", k >> 2, (k >> 1) & 1, k & 1)
    } else if k < DO_OFFSET + 4 {
        let j = k - DO_OFFSET;
        format!("PdoA({}|{})", j & 1, j >> 1)
    } else {
        let j = k - DO_OFFSET - 4;
        format!("PdoC({}|{})", j & 1, j >> 1)
    }
}

fn fmt_form(form: &LinearForm) -> String {
    let mut out = String::new();
    let mut push = |coef: Rational, atom: Option<String>| {
        let neg = coef.is_negative();
        let mag = coef.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        match atom {
            Some(a) if mag == Rational::from_integer(1) => out.push_str(&a),
            Some(a) => {
                let _ = write!(out, "{}*{}", fmt_rational(mag), a);
            }
            None => out.push_str(&fmt_rational(mag)),
        }
    };
    for k in 0..COORDS {
        let c = form.coeffs()[k];
        if !c.is_zero() {
            push(c, Some(coord_name(k)));
        }
    }
    if !form.constant_term().is_zero() || form.is_zero() {
        push(form.constant_term(), None);
    }
    out
}

/// Canonical text of a witness; [`parse`] reads it back to an equal spec.
pub fn print(spec: &FunctionalSpec) -> String {
    let mut out = format!("name: {}\nmaximize:\n", spec.name);
    let mut first = true;
    let mut line = |coef: Rational, body: String| {
        let sign = if coef.is_negative() { "-" } else if first { " " } else { "+" };
        first = false;
        let mag = coef.abs();
        if mag == Rational::from_integer(1) {
            let _ = writeln!(out, "  {sign} {body}");
        } else {
            let _ = writeln!(out, "  {sign} {}*{body}", fmt_rational(mag));
        }
    };
    for t in &spec.sqrt_terms {
        line(t.coefficient, format!("sqrt({})", fmt_form(&t.form)));
    }
    for t in &spec.abs_terms {
        line(t.coefficient, format!("abs({})", fmt_form(&t.form)));
    }
    for t in &spec.linear_terms {
        line(t.coefficient, format!("({})", fmt_form(&t.form)));
    }
    if first {
        out.push_str("  0\n");
    }
    out
}
