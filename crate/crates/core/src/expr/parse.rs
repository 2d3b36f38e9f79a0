//! Recursive-descent parser for the integrand grammar.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := "-" factor | number | "(" expr ")" | leaf
//! leaf   := chirp(args) | pow(args) | step(seq) | indicator(num, num)
//!         | sin(lin) | cos(lin) | exp(lin) | poly(num, ...) | periodic(num; expr) | x
//! ```

use super::{Expr, SeqExpr, Side, Smooth, Trig};
use crate::error::{DistError, ParseDiagnostics, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

fn diag(position: usize, message: impl Into<String>, expected: &[&str]) -> DistError {
    DistError::Parse(ParseDiagnostics {
        position,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    })
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && i + 1 < b.len() && (b[i + 1] as char).is_ascii_digit()) {
            let start = i;
            while i < b.len() && ((b[i] as char).is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && (b[j] as char).is_ascii_digit() {
                    while j < b.len() && (b[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text
                .parse()
                .map_err(|_| diag(start, format!("malformed number '{text}'"), &["number"]))?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if "()+-*/^,;=".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(diag(i, format!("unexpected character '{c}'"), &[]));
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

const LEAVES: &[&str] = &[
    "number", "(", "-", "chirp", "pow", "step", "indicator", "sin", "cos", "exp", "poly", "periodic", "x",
];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let s = c.to_string();
            Err(diag(self.pos(), format!("unexpected {}", describe(self.peek())), &[s.as_str()]))
        }
    }

    fn ident(&mut self, expected: &[&str]) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => Err(diag(self.pos(), format!("unexpected {}", describe(&t)), expected)),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let neg = self.eat('-');
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            t => Err(diag(self.pos(), format!("unexpected {}", describe(&t)), &["number"])),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(negate(self.term()?));
            } else {
                break;
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Sym('*') {
            self.bump();
            let at = self.pos();
            let f = self.factor()?;
            acc = combine(acc, f).map_err(|m| diag(at, m, &[]))?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        let at = self.pos();
        match self.peek().clone() {
            Tok::Sym('-') => {
                self.bump();
                Ok(negate(self.factor()?))
            }
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.leaf(&name, at)
            }
            t => Err(diag(at, format!("unexpected {}", describe(&t)), LEAVES)),
        }
    }

    fn leaf(&mut self, name: &str, at: usize) -> Result<Expr> {
        let semantic = |e: DistError| match e {
            DistError::InvalidInput(m) => diag(at, m, &[]),
            other => other,
        };
        match name {
            "x" => Ok(Expr::Smooth(Smooth::Poly(vec![0.0, 1.0]))),
            "chirp" | "pow" => {
                self.expect('(')?;
                let a = self.args(name == "chirp")?;
                if name == "chirp" {
                    Expr::chirp(a.center, a.alpha, a.beta, a.kind, a.side, a.signed).map_err(semantic)
                } else {
                    Expr::power(a.center, a.alpha, a.side, a.signed).map_err(semantic)
                }
            }
            "step" => {
                self.expect('(')?;
                if let Tok::Ident(s) = self.peek() {
                    if s == "cn" && self.toks[self.i + 1].0 == Tok::Sym('=') {
                        self.bump();
                        self.bump();
                    }
                }
                let coeff = self.seq()?;
                let mut center = 0.0;
                if self.eat(',') {
                    let k = self.ident(&["a"])?;
                    if k != "a" {
                        return Err(diag(self.pos(), format!("unknown step key '{k}'"), &["a"]));
                    }
                    self.expect('=')?;
                    center = self.number()?;
                }
                self.expect(')')?;
                Ok(Expr::StepSeq { center, coeff })
            }
            "indicator" => {
                self.expect('(')?;
                let lo = self.number()?;
                self.expect(',')?;
                let hi = self.number()?;
                self.expect(')')?;
                Expr::indicator(lo, hi).map_err(semantic)
            }
            "sin" | "cos" | "exp" => {
                self.expect('(')?;
                let p = self.lin()?;
                self.expect(')')?;
                Ok(Expr::Smooth(match name {
                    "sin" => Smooth::Sin(p),
                    "cos" => Smooth::Cos(p),
                    _ => Smooth::Exp(p),
                }))
            }
            "poly" => {
                self.expect('(')?;
                let mut c = vec![self.number()?];
                while self.eat(',') {
                    c.push(self.number()?);
                }
                self.expect(')')?;
                Ok(Expr::Smooth(Smooth::Poly(c)))
            }
            "periodic" => {
                self.expect('(')?;
                let period = self.number()?;
                self.expect(';')?;
                let base = self.expr()?;
                self.expect(')')?;
                Expr::periodic(period, base).map_err(semantic)
            }
            other => Err(diag(at, format!("unknown function '{other}'"), LEAVES)),
        }
    }

    fn args(&mut self, chirp: bool) -> Result<Args> {
        let mut a = Args::default();
        let mut seen: Vec<String> = Vec::new();
        let keys: &[&str] = if chirp {
            &["a", "alpha", "beta", "side", "signed", "sin", "cos"]
        } else {
            &["a", "alpha", "side", "signed"]
        };
        if self.eat(')') {
            return Ok(a);
        }
        loop {
            let at = self.pos();
            let k = self.ident(keys)?;
            if seen.contains(&k) {
                return Err(diag(at, format!("duplicate argument '{k}'"), keys));
            }
            seen.push(k.clone());
            match k.as_str() {
                "sin" | "cos" if chirp => {
                    if seen.iter().any(|s| s != &k && (s == "sin" || s == "cos")) {
                        return Err(diag(at, "both sin and cos given", &[]));
                    }
                    a.kind = if k == "sin" { Trig::Sin } else { Trig::Cos };
                }
                "a" | "alpha" | "side" | "signed" => {
                    self.expect('=')?;
                    self.arg_value(&k, &mut a)?;
                }
                "beta" if chirp => {
                    self.expect('=')?;
                    self.arg_value(&k, &mut a)?;
                }
                _ => return Err(diag(at, format!("unknown argument '{k}'"), keys)),
            }
            if self.eat(')') {
                return Ok(a);
            }
            if !self.eat(',') {
                return Err(diag(self.pos(), format!("unexpected {}", describe(self.peek())), &[",", ")"]));
            }
        }
    }

    fn arg_value(&mut self, key: &str, a: &mut Args) -> Result<()> {
        match key {
            "a" => a.center = self.number()?,
            "alpha" => a.alpha = self.number()?,
            "beta" => a.beta = self.number()?,
            "side" => {
                let at = self.pos();
                a.side = match self.ident(&["both", "right", "left"])?.as_str() {
                    "both" => Side::Both,
                    "right" => Side::Right,
                    "left" => Side::Left,
                    s => return Err(diag(at, format!("unknown side '{s}'"), &["both", "right", "left"])),
                }
            }
            _ => {
                let at = self.pos();
                a.signed = match self.ident(&["true", "false"])?.as_str() {
                    "true" => true,
                    "false" => false,
                    s => return Err(diag(at, format!("expected boolean, got '{s}'"), &["true", "false"])),
                }
            }
        }
        Ok(())
    }

    /// Polynomial in `x`: sums of `c`, `c*x`, `c*x^k`, `x`, `x^k`.
    fn lin(&mut self) -> Result<Vec<f64>> {
        let mut coeffs: Vec<f64> = Vec::new();
        let mut sign = 1.0;
        loop {
            while self.eat('-') {
                sign = -sign;
            }
            let (c, k) = self.mono()?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0.0);
            }
            coeffs[k] += sign * c;
            sign = 1.0;
            if self.eat('+') {
                continue;
            }
            if self.eat('-') {
                sign = -1.0;
                continue;
            }
            return Ok(coeffs);
        }
    }

    fn mono(&mut self) -> Result<(f64, usize)> {
        let at = self.pos();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                if self.eat('*') {
                    let at = self.pos();
                    if self.ident(&["x"])? != "x" {
                        return Err(diag(at, "expected the variable x", &["x"]));
                    }
                    Ok((v, self.degree()?))
                } else {
                    Ok((v, 0))
                }
            }
            Tok::Ident(s) if s == "x" => {
                self.bump();
                Ok((1.0, self.degree()?))
            }
            t => Err(diag(at, format!("unexpected {}", describe(&t)), &["number", "x"])),
        }
    }

    fn degree(&mut self) -> Result<usize> {
        if !self.eat('^') {
            return Ok(1);
        }
        let at = self.pos();
        match self.bump() {
            Tok::Num(v) if v.fract() == 0.0 && (0.0..=64.0).contains(&v) => Ok(v as usize),
            t => Err(diag(at, format!("bad exponent {}", describe(&t)), &["integer 0..64"])),
        }
    }

    fn seq(&mut self) -> Result<SeqExpr> {
        let mut acc = self.seq_term()?;
        loop {
            if self.eat('+') {
                acc = SeqExpr::Add(Box::new(acc), Box::new(self.seq_term()?));
            } else if self.eat('-') {
                acc = SeqExpr::Sub(Box::new(acc), Box::new(self.seq_term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn seq_term(&mut self) -> Result<SeqExpr> {
        let mut acc = self.seq_unary()?;
        loop {
            if self.eat('*') {
                acc = SeqExpr::Mul(Box::new(acc), Box::new(self.seq_unary()?));
            } else if self.eat('/') {
                acc = SeqExpr::Div(Box::new(acc), Box::new(self.seq_unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn seq_unary(&mut self) -> Result<SeqExpr> {
        if self.eat('-') {
            return Ok(match self.seq_unary()? {
                SeqExpr::Num(c) => SeqExpr::Num(-c),
                e => SeqExpr::Neg(Box::new(e)),
            });
        }
        let base = self.seq_primary()?;
        if self.eat('^') {
            let e = self.seq_unary()?;
            return Ok(SeqExpr::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn seq_primary(&mut self) -> Result<SeqExpr> {
        let at = self.pos();
        match self.bump() {
            Tok::Num(v) => Ok(SeqExpr::Num(v)),
            Tok::Ident(s) if s == "n" => Ok(SeqExpr::N),
            Tok::Sym('(') => {
                let e = self.seq()?;
                self.expect(')')?;
                Ok(e)
            }
            t => Err(diag(at, format!("unexpected {} in sequence formula", describe(&t)), &["n", "number", "("])),
        }
    }
}

struct Args {
    center: f64,
    alpha: f64,
    beta: f64,
    kind: Trig,
    side: Side,
    signed: bool,
}

impl Default for Args {
    fn default() -> Self {
        Args { center: 0.0, alpha: 0.0, beta: 1.0, kind: Trig::Sin, side: Side::Both, signed: false }
    }
}

fn negate(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        e => Expr::Scale(-1.0, Box::new(e)),
    }
}

/// Fold one more factor into a product.
fn combine(acc: Expr, f: Expr) -> std::result::Result<Expr, String> {
    Ok(match (acc, f) {
        (Expr::Const(k), f) => Expr::Scale(k, Box::new(f)),
        (Expr::Indicator { lo, hi }, f) => Expr::Restrict { lo, hi, inner: Box::new(f) },
        (acc, f) if acc.is_smooth() => Expr::SmoothProduct(Box::new(acc), Box::new(f)),
        (acc, Expr::Const(k)) => Expr::Scale(k, Box::new(acc)),
        (acc, Expr::Indicator { lo, hi }) => Expr::Restrict { lo, hi, inner: Box::new(acc) },
        (acc, f) if f.is_smooth() => Expr::SmoothProduct(Box::new(f), Box::new(acc)),
        _ => return Err("two non-smooth factors".into()),
    })
}

/// Parse an integrand.
pub fn parse(text: &str) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser { toks, i: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(diag(p.pos(), format!("unexpected {}", describe(p.peek())), &["+", "*", "end of input"]));
    }
    Ok(e)
}
