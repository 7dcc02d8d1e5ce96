//! Problem files and the polynomial / form expression grammar.
//!
//! ```text
//! vars = [x, y, z]
//! weights = [1, 1, 1]
//! map = ["x*z", "x^2 + y^2 - z^2"]
//! form.w1 = "z*d[x] - x*d[z]"
//! point.p = "1, 0"
//! ```
//!
//! Statements end at a newline or `;`, `#` starts a comment. In expressions `*`
//! multiplies polynomials and wedges forms, `d[u,v]` is `du∧dv`, `/` divides by a
//! nonzero constant and `^` takes a non-negative integer power of a polynomial.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::fibre::FibrePoint;
use crate::polyform::{KForm, Polynomial, Rational, Weights};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn error(self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn advance(mut self, c: char) -> Pos {
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        self
    }
}

const START: Pos = Pos { line: 1, column: 1 };

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub vars: Vec<String>,
    pub weights: Weights,
    pub map: Vec<Polynomial>,
    pub forms: BTreeMap<String, KForm>,
    pub points: BTreeMap<String, FibrePoint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str, origin: Pos) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut pos = origin;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = pos;
        if c.is_whitespace() {
            pos = pos.advance(c);
            i += 1;
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                pos = pos.advance(chars[i]);
                i += 1;
            }
            out.push((Tok::Num(s.parse().unwrap()), start));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                pos = pos.advance(chars[i]);
                i += 1;
            }
            out.push((Tok::Ident(s), start));
        } else if "+-*/^()[],".contains(c) {
            out.push((Tok::Sym(c), start));
            pos = pos.advance(c);
            i += 1;
        } else if c == '−' {
            out.push((Tok::Sym('-'), start));
            pos = pos.advance(c);
            i += 1;
        } else {
            return Err(start.error(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
    vars: &'a [String],
    named: &'a BTreeMap<String, KForm>,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.pos().error(format!("expected '{c}'")))
        }
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn var_index(&self, name: &str, pos: Pos) -> Result<usize, ParseError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| pos.error(format!("unknown variable '{name}'")))
    }

    fn expr(&mut self) -> Result<KForm, ParseError> {
        let negate = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            let pos = self.pos();
            let sub = if self.eat('+') {
                false
            } else if self.eat('-') {
                true
            } else {
                return Ok(acc);
            };
            let rhs = self.term()?;
            if rhs.degree() != acc.degree() {
                return Err(pos.error(format!("cannot add a {}-form to a {}-form", rhs.degree(), acc.degree())));
            }
            if sub {
                acc -= &rhs;
            } else {
                acc += &rhs;
            }
        }
    }

    fn term(&mut self) -> Result<KForm, ParseError> {
        let mut acc = self.factor()?;
        loop {
            let pos = self.pos();
            if self.eat('*') {
                let rhs = self.factor()?;
                if acc.degree() + rhs.degree() > self.nvars() {
                    return Err(pos.error("form degree exceeds the number of variables"));
                }
                acc = acc.wedge(&rhs);
            } else if self.eat('/') {
                let rhs = self.factor()?;
                let c = rhs.as_polynomial().and_then(|p| p.as_constant());
                match c {
                    Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                    _ => return Err(pos.error("division only by a nonzero constant")),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<KForm, ParseError> {
        let base = self.atom()?;
        let pos = self.pos();
        if !self.eat('^') {
            return Ok(base);
        }
        let Some(Tok::Num(e)) = self.peek().cloned() else {
            return Err(self.pos().error("expected a non-negative integer exponent"));
        };
        self.at += 1;
        let e: u32 = e.try_into().map_err(|_| pos.error("exponent too large"))?;
        let Some(p) = base.as_polynomial() else {
            return Err(pos.error("only polynomials can be raised to a power"));
        };
        Ok(KForm::from_poly(p.pow(e)))
    }

    fn atom(&mut self) -> Result<KForm, ParseError> {
        let pos = self.pos();
        let n = self.nvars();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.at += 1;
                Ok(KForm::from_poly(Polynomial::constant(n, Rational::from_integer(v))))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if name == "d" && self.peek() == Some(&Tok::Sym('[')) {
                    return self.differential();
                }
                if let Some(f) = self.named.get(&name) {
                    if !self.vars.contains(&name) {
                        return Ok(f.clone());
                    }
                }
                let i = self.var_index(&name, pos)?;
                Ok(KForm::from_poly(Polynomial::var(n, i)))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Sym(c)) => Err(pos.error(format!("unexpected '{c}'"))),
            None => Err(pos.error("unexpected end of expression")),
        }
    }

    fn differential(&mut self) -> Result<KForm, ParseError> {
        self.expect('[')?;
        let mut idx = Vec::new();
        if !self.eat(']') {
            loop {
                let pos = self.pos();
                let Some(Tok::Ident(name)) = self.peek().cloned() else {
                    return Err(pos.error("expected a variable name"));
                };
                self.at += 1;
                idx.push(self.var_index(&name, pos)?);
                if self.eat(']') {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(KForm::monomial_form(Polynomial::one(self.nvars()), &idx))
    }
}

fn end_of(text: &str, origin: Pos) -> Pos {
    text.chars().fold(origin, Pos::advance)
}

fn parse_form_at(
    text: &str,
    vars: &[String],
    named: &BTreeMap<String, KForm>,
    origin: Pos,
) -> Result<KForm, ParseError> {
    let toks = tokenize(text, origin)?;
    let end = end_of(text, origin);
    if toks.is_empty() {
        return Err(end.error("empty expression"));
    }
    let mut p = ExprParser {
        toks,
        at: 0,
        end,
        vars,
        named,
    };
    let form = p.expr()?;
    if p.at < p.toks.len() {
        return Err(p.pos().error("unexpected trailing input"));
    }
    Ok(form)
}

/// Parses a differential form over `vars`; polynomials are 0-forms.
pub fn parse_form(text: &str, vars: &[String]) -> Result<KForm, ParseError> {
    parse_form_at(text, vars, &BTreeMap::new(), START)
}

/// Like [`parse_form`], with previously defined forms usable by name.
pub fn parse_form_with(text: &str, vars: &[String], named: &BTreeMap<String, KForm>) -> Result<KForm, ParseError> {
    parse_form_at(text, vars, named, START)
}

pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Polynomial, ParseError> {
    let form = parse_form(text, vars)?;
    form.as_polynomial()
        .ok_or_else(|| START.error("expected a polynomial, found a differential form"))
}

/// `"a/b"` or an integer, optionally signed.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim().replace('−', "-");
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Rational::new(n, d))
        }
        None => Some(Rational::from_integer(t.parse().ok()?)),
    }
}

fn parse_point_at(text: &str, q: usize, origin: Pos) -> Result<FibrePoint, ParseError> {
    let t = text.trim();
    let t = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(t);
    let mut coords = Vec::new();
    for part in t.split(',') {
        coords.push(parse_rational(part).ok_or_else(|| origin.error(format!("invalid rational '{}'", part.trim())))?);
    }
    if coords.len() != q {
        return Err(origin.error(format!("point needs {q} coordinates, got {}", coords.len())));
    }
    Ok(FibrePoint(coords))
}

/// A point of the target space written `"r1, .., rq"` (brackets optional).
pub fn parse_point(text: &str, q: usize) -> Result<FibrePoint, ParseError> {
    parse_point_at(text, q, START)
}

/// Statements split at top-level newlines and `;`, comments removed.
fn statements(text: &str) -> Result<Vec<(String, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut cur_start = START;
    let mut pos = START;
    let mut depth = 0i32;
    let mut in_quote: Option<Pos> = None;
    let mut in_comment = false;
    for c in text.chars() {
        if in_comment {
            if c == '\n' {
                in_comment = false;
            } else {
                pos = pos.advance(c);
                continue;
            }
        }
        let split = in_quote.is_none() && depth == 0 && (c == '\n' || c == ';');
        if split {
            if !cur.trim().is_empty() {
                out.push((std::mem::take(&mut cur), cur_start));
            }
            cur.clear();
            pos = pos.advance(c);
            cur_start = pos;
            continue;
        }
        match c {
            '"' if in_quote.is_some() => in_quote = None,
            '"' => in_quote = Some(pos),
            '#' if in_quote.is_none() => {
                in_comment = true;
                pos = pos.advance(c);
                continue;
            }
            '[' | '(' if in_quote.is_none() => depth += 1,
            ']' | ')' if in_quote.is_none() => depth -= 1,
            _ => {}
        }
        if cur.is_empty() {
            cur_start = pos;
        }
        cur.push(c);
        pos = pos.advance(c);
    }
    if let Some(q) = in_quote {
        return Err(q.error("unterminated string"));
    }
    if depth != 0 {
        return Err(cur_start.error("unbalanced brackets"));
    }
    if !cur.trim().is_empty() {
        out.push((cur, cur_start));
    }
    Ok(out)
}

fn skip_ws(s: &str, pos: Pos) -> (&str, Pos) {
    let trimmed = s.trim_start();
    let skipped = &s[..s.len() - trimmed.len()];
    (trimmed, end_of(skipped, pos))
}

/// Removes surrounding quotes, returning the inner text and where it starts.
fn unquote(s: &str, pos: Pos) -> Result<(&str, Pos), ParseError> {
    let (s, pos) = skip_ws(s, pos);
    let s = s.trim_end();
    if let Some(rest) = s.strip_prefix('"') {
        let inner = rest.strip_suffix('"').ok_or_else(|| pos.error("unterminated string"))?;
        Ok((inner, pos.advance('"')))
    } else {
        Ok((s, pos))
    }
}

/// Items of `[a, b, ..]`, split at top-level commas outside quotes.
fn list_items(value: &str, pos: Pos) -> Result<Vec<(&str, Pos)>, ParseError> {
    let (v, pos) = skip_ws(value, pos);
    let v = v.trim_end();
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| pos.error("expected a bracketed list"))?;
    let mut items = Vec::new();
    let mut start = 0;
    let mut item_pos = pos.advance('[');
    let mut p = item_pos;
    let mut depth = 0;
    let mut quoted = false;
    for (i, c) in inner.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '[' | '(' if !quoted => depth += 1,
            ']' | ')' if !quoted => depth -= 1,
            ',' if !quoted && depth == 0 => {
                items.push((&inner[start..i], item_pos));
                start = i + 1;
                item_pos = p.advance(c);
            }
            _ => {}
        }
        p = p.advance(c);
    }
    if !inner[start..].trim().is_empty() || !items.is_empty() {
        items.push((&inner[start..], item_pos));
    }
    Ok(items)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses and validates a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let mut entries: BTreeMap<String, (String, Pos, Pos)> = BTreeMap::new();
    for (stmt, pos) in statements(text)? {
        let (stmt, pos) = skip_ws(&stmt, pos);
        let Some((key, value)) = stmt.split_once('=') else {
            return Err(pos.error("expected 'key = value'"));
        };
        let key = key.trim().to_string();
        let value_pos = end_of(&stmt[..stmt.len() - value.len()], pos);
        if entries.contains_key(&key) {
            return Err(pos.error(format!("duplicate key '{key}'")));
        }
        entries.insert(key, (value.to_string(), pos, value_pos));
    }

    let (vars_text, vars_key, vars_pos) = entries.remove("vars").ok_or_else(|| START.error("missing 'vars'"))?;
    let mut vars = Vec::new();
    for (item, p) in list_items(&vars_text, vars_pos)? {
        let (name, p) = unquote(item, p)?;
        if !is_identifier(name) {
            return Err(p.error(format!("invalid variable name '{name}'")));
        }
        if name == "d" {
            return Err(p.error("'d' is reserved for differentials"));
        }
        if vars.iter().any(|v| v == name) {
            return Err(p.error(format!("duplicate variable '{name}'")));
        }
        vars.push(name.to_string());
    }
    if vars.is_empty() {
        return Err(vars_key.error("no variables declared"));
    }
    let n = vars.len();

    let weights = match entries.remove("weights") {
        None => Weights::standard(n),
        Some((text, key, pos)) => {
            let mut w = Vec::new();
            for (item, p) in list_items(&text, pos)? {
                let (s, p) = skip_ws(item, p);
                let v: i64 = s
                    .trim()
                    .parse()
                    .map_err(|_| p.error(format!("invalid weight '{}'", s.trim())))?;
                if v <= 0 {
                    return Err(p.error(format!("weight {v} is not positive")));
                }
                w.push(u32::try_from(v).map_err(|_| p.error("weight too large"))?);
            }
            if w.len() != n {
                return Err(key.error(format!("{} weights for {n} variables", w.len())));
            }
            Weights::new(w).map_err(|e| key.error(e.to_string()))?
        }
    };

    let (map_text, map_key, map_pos) = entries.remove("map").ok_or_else(|| START.error("missing 'map'"))?;
    let mut map = Vec::new();
    for (item, p) in list_items(&map_text, map_pos)? {
        let (expr, p) = unquote(item, p)?;
        let form = parse_form_at(expr, &vars, &BTreeMap::new(), p)?;
        map.push(
            form.as_polynomial()
                .ok_or_else(|| p.error("map components must be polynomials"))?,
        );
    }
    if map.is_empty() {
        return Err(map_key.error("map has no components"));
    }
    if map.len() >= n {
        return Err(map_key.error(format!(
            "need fewer components than variables (q = {}, n = {n})",
            map.len()
        )));
    }
    let q = map.len();

    let mut forms = BTreeMap::new();
    let mut points = BTreeMap::new();
    // file order, so a form may refer to forms defined above it
    let mut rest: Vec<_> = entries.into_iter().collect();
    rest.sort_by_key(|(_, (_, p, _))| (p.line, p.column));
    for (key, (value, key_pos, value_pos)) in rest {
        if let Some(name) = key.strip_prefix("form.") {
            if !is_identifier(name) {
                return Err(key_pos.error(format!("invalid form name '{name}'")));
            }
            let (expr, p) = unquote(&value, value_pos)?;
            let form = parse_form_at(expr, &vars, &forms, p)?;
            forms.insert(name.to_string(), form);
        } else if let Some(name) = key.strip_prefix("point.") {
            if !is_identifier(name) {
                return Err(key_pos.error(format!("invalid point name '{name}'")));
            }
            let (text, p) = unquote(&value, value_pos)?;
            points.insert(name.to_string(), parse_point_at(text, q, p)?);
        } else {
            return Err(key_pos.error(format!("unknown key '{key}'")));
        }
    }
    Ok(ProblemFile {
        vars,
        weights,
        map,
        forms,
        points,
    })
}
