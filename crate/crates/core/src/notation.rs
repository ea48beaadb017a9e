//! Link vectors, connect sums and swaps in plain-text rational-tangle notation.
//!
//! A vector is written `(2h_n, v_{n-1}^{q_{n-1}}, 2h_{n-1}^{p_{n-1}}, ..., v_1^{q_1}, 2h_1^{p_1})`.
//! Expressions are `vector # vector # ...`, optionally prefixed by `~` for the swap.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotationError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid link vector: {rule}")]
    Validation { rule: String },
}

fn invalid(rule: impl Into<String>) -> NotationError {
    NotationError::Validation { rule: rule.into() }
}

/// One written entry: a value and its flype superscript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Entry {
    pub value: u32,
    pub flype: u32,
}

/// A validated link vector.
///
/// Indices are 1-based in the mathematics and 0-based here: `h[0]` is `h_1`,
/// `v[0]` is `v_1`, and so on. `p` has length `n` with `p[n-1] = 0` (the leading
/// entry carries no superscript); `q` has length `n-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkVector {
    h: Vec<u32>,
    v: Vec<u32>,
    p: Vec<u32>,
    q: Vec<u32>,
}

impl LinkVector {
    /// Builds a vector from half-values `h_1..h_n`, `v_1..v_{n-1}` and flype counts.
    /// `p` may have length `n-1` or `n` (in which case `p_n` must be zero).
    pub fn new(h: Vec<u32>, v: Vec<u32>, p: Vec<u32>, q: Vec<u32>) -> Result<Self, NotationError> {
        let n = h.len();
        if n == 0 {
            return Err(invalid("a vector needs at least one entry"));
        }
        if v.len() != n - 1 {
            return Err(invalid("a vector has one vertical entry between consecutive horizontal entries"));
        }
        let mut p = p;
        if p.len() == n - 1 {
            p.push(0);
        }
        if p.len() != n || q.len() != n - 1 {
            return Err(invalid("flype counts must match the entries"));
        }
        if p[n - 1] != 0 {
            return Err(invalid("the leading entry carries no flype count"));
        }
        for i in 1..n {
            if h[i] == 0 {
                return Err(invalid(format!("interior horizontal entry 2h_{} must be positive", i + 1)));
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                return Err(invalid(format!("vertical entry v_{} must be positive", i + 1)));
            }
            if q[i] > vi {
                return Err(invalid(format!("flype count q_{} = {} exceeds v_{} = {}", i + 1, q[i], i + 1, vi)));
            }
        }
        for i in 0..n - 1 {
            if p[i] > 2 * h[i] {
                return Err(invalid(format!(
                    "flype count p_{} = {} exceeds 2h_{} = {}",
                    i + 1,
                    p[i],
                    i + 1,
                    2 * h[i]
                )));
            }
        }
        Ok(Self { h, v, p, q })
    }

    /// The standard vector with all flype counts zero.
    pub fn standard(h: Vec<u32>, v: Vec<u32>) -> Result<Self, NotationError> {
        let n = h.len();
        let m = n.saturating_sub(1);
        Self::new(h, v, vec![0; m], vec![0; m])
    }

    /// Builds from the written entry list `(2h_n, v_{n-1}^{q}, ..., 2h_1^{p_1})`.
    pub fn from_entries(entries: &[Entry]) -> Result<Self, NotationError> {
        if entries.len().is_multiple_of(2) {
            return Err(invalid("a vector has odd length"));
        }
        let n = entries.len().div_ceil(2);
        let mut h = vec![0; n];
        let mut p = vec![0; n];
        let mut v = vec![0; n - 1];
        let mut q = vec![0; n - 1];
        if entries[0].flype != 0 {
            return Err(invalid("the leading entry carries no flype count"));
        }
        for (pos, e) in entries.iter().enumerate() {
            if pos % 2 == 0 {
                let i = n - 1 - pos / 2;
                if e.value % 2 != 0 {
                    return Err(invalid(format!("horizontal entry {} is odd", e.value)));
                }
                h[i] = e.value / 2;
                p[i] = e.flype;
            } else {
                let i = n - 1 - pos.div_ceil(2);
                v[i] = e.value;
                q[i] = e.flype;
            }
        }
        if h[0] == 0 && p[0] != 0 {
            return Err(invalid("h_1 = 0 forces p_1 = 0"));
        }
        Self::new(h, v, p, q)
    }

    /// Written entries, left to right.
    pub fn entries(&self) -> Vec<Entry> {
        let n = self.n();
        let mut out = Vec::with_capacity(2 * n - 1);
        for i in (0..n).rev() {
            out.push(Entry { value: 2 * self.h[i], flype: self.p[i] });
            if i > 0 {
                out.push(Entry { value: self.v[i - 1], flype: self.q[i - 1] });
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }
    /// `h_1..h_n`.
    pub fn h(&self) -> &[u32] {
        &self.h
    }
    /// `v_1..v_{n-1}`.
    pub fn v(&self) -> &[u32] {
        &self.v
    }
    /// `p_1..p_n` with `p_n = 0`.
    pub fn p(&self) -> &[u32] {
        &self.p
    }
    /// `q_1..q_{n-1}`.
    pub fn q(&self) -> &[u32] {
        &self.q
    }

    pub fn weight(&self) -> u32 {
        2 * self.h.iter().sum::<u32>() + self.v.iter().sum::<u32>()
    }

    pub fn is_standard(&self) -> bool {
        self.p.iter().all(|&x| x == 0) && self.q.iter().all(|&x| x == 0)
    }

    /// The same vector with every flype count cleared.
    pub fn standardized(&self) -> LinkVector {
        let n = self.n();
        LinkVector { h: self.h.clone(), v: self.v.clone(), p: vec![0; n], q: vec![0; n - 1] }
    }

    pub fn with_flypes(&self, p: Vec<u32>, q: Vec<u32>) -> Result<LinkVector, NotationError> {
        LinkVector::new(self.h.clone(), self.v.clone(), p, q)
    }
}

impl fmt::Display for LinkVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, e) in self.entries().iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", e.value)?;
            if e.flype != 0 {
                write!(f, "^{}", e.flype)?;
            }
        }
        f.write_str(")")
    }
}

/// A connect sum of vectors, possibly swapped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkExpr {
    pub components: Vec<LinkVector>,
    pub swapped: bool,
}

impl LinkExpr {
    pub fn single(v: LinkVector) -> Self {
        Self { components: vec![v], swapped: false }
    }

    pub fn sum(components: Vec<LinkVector>) -> Self {
        assert!(!components.is_empty(), "a connect sum needs a component");
        Self { components, swapped: false }
    }

    pub fn swap(&self) -> Self {
        Self { components: self.components.clone(), swapped: !self.swapped }
    }

    pub fn weight(&self) -> u32 {
        self.components.iter().map(LinkVector::weight).sum()
    }

    pub fn is_single(&self) -> bool {
        self.components.len() == 1
    }
}

impl fmt::Display for LinkExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.swapped {
            f.write_str("~")?;
        }
        for (k, c) in self.components.iter().enumerate() {
            if k > 0 {
                f.write_str("#")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for LinkExpr {
    type Err = NotationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_link_expr(s)
    }
}

impl Serialize for LinkExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LinkExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_link_expr(&text).map_err(serde::de::Error::custom)
    }
}

impl Serialize for LinkVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LinkVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_link_vector(&text).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> NotationError {
        NotationError::Syntax { offset: self.pos, message: message.into() }
    }

    fn expect(&mut self, c: u8) -> Result<(), NotationError> {
        match self.peek() {
            Some(b) if b == c => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => Err(self.err(format!("expected '{}', found '{}'", c as char, b as char))),
            None => Err(self.err(format!("expected '{}', found end of input", c as char))),
        }
    }

    fn uint(&mut self) -> Result<u32, NotationError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an unsigned integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<u32>()
            .map_err(|_| NotationError::Syntax { offset: start, message: "integer out of range".into() })
    }

    fn entry(&mut self) -> Result<Entry, NotationError> {
        let value = self.uint()?;
        let flype = if self.peek() == Some(b'^') {
            self.pos += 1;
            self.uint()?
        } else {
            0
        };
        Ok(Entry { value, flype })
    }

    fn vector(&mut self) -> Result<LinkVector, NotationError> {
        self.expect(b'(')?;
        let mut entries = vec![self.entry()?];
        loop {
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    entries.push(self.entry()?);
                }
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(b) => return Err(self.err(format!("expected ',' or ')', found '{}'", b as char))),
                None => return Err(self.err("unterminated vector")),
            }
        }
        LinkVector::from_entries(&entries)
    }
}

/// Parses `expr := term | "~" term`, `term := vector {"#" vector}`.
pub fn parse_link_expr(text: &str) -> Result<LinkExpr, NotationError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let swapped = if p.peek() == Some(b'~') {
        p.pos += 1;
        true
    } else {
        false
    };
    let mut components = vec![p.vector()?];
    while p.peek() == Some(b'#') {
        p.pos += 1;
        components.push(p.vector()?);
    }
    if let Some(b) = p.peek() {
        return Err(p.err(format!("unexpected trailing '{}'", b as char)));
    }
    Ok(LinkExpr { components, swapped })
}

/// Parses a single unswapped vector.
pub fn parse_link_vector(text: &str) -> Result<LinkVector, NotationError> {
    let e = parse_link_expr(text)?;
    if e.swapped || e.components.len() != 1 {
        return Err(invalid("expected a single unswapped vector"));
    }
    Ok(e.components.into_iter().next().expect("one component"))
}

pub fn format_link_expr(e: &LinkExpr) -> String {
    e.to_string()
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A nonnegative rational in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rational {
    pub numerator: u128,
    pub denominator: u128,
}

impl Rational {
    pub fn new(numerator: u128, denominator: u128) -> Self {
        assert!(denominator > 0, "zero denominator");
        let g = gcd(numerator, denominator).max(1);
        Self { numerator: numerator / g, denominator: denominator / g }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// `2h_1 + 1/(v_1 + 1/(2h_2 + ... + 1/(2h_n)))`, evaluated from the innermost term out.
pub fn rational_value(v: &LinkVector) -> Rational {
    // Terms in continued-fraction order a_0 = 2h_1, a_1 = v_1, a_2 = 2h_2, ...
    let n = v.n();
    let mut terms = Vec::with_capacity(2 * n - 1);
    for i in 0..n {
        terms.push(2 * v.h[i] as u128);
        if i + 1 < n {
            terms.push(v.v[i] as u128);
        }
    }
    // Value as num/den, starting from the last term.
    let mut num = *terms.last().expect("nonempty");
    let mut den = 1u128;
    for &a in terms.iter().rev().skip(1) {
        // a + 1/(num/den) = (a*num + den)/num
        let next = a * num + den;
        den = num;
        num = next;
    }
    Rational::new(num, den)
}

/// Applies only the proven identifications: all-zero horizontal flypes clear the
/// vertical ones, `q_{n-1}` is always cleared, and for single-vector expressions
/// `p_1` is reduced mod 2.
pub fn normalize_equivalence(e: &LinkExpr) -> LinkExpr {
    let single = e.components.len() == 1;
    let components = e
        .components
        .iter()
        .map(|c| {
            let n = c.n();
            let mut p = c.p.clone();
            let mut q = c.q.clone();
            // Parity first, so a p_1 reduced to zero can enable the flype clearing.
            if single && n >= 2 {
                p[0] %= 2;
            }
            if p.iter().all(|&x| x == 0) {
                q.iter_mut().for_each(|x| *x = 0);
            }
            if n >= 2 {
                q[n - 2] = 0;
            }
            LinkVector { h: c.h.clone(), v: c.v.clone(), p, q }
        })
        .collect();
    LinkExpr { components, swapped: e.swapped }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_of(s: &str) -> LinkVector {
        parse_link_vector(s).unwrap()
    }

    #[test]
    fn parses_flyped_three_block_vector() {
        let v = vec_of("(2,1,2^1,1,0)");
        assert_eq!(v.n(), 3);
        assert_eq!(v.h(), &[0, 1, 1]);
        assert_eq!(v.v(), &[1, 1]);
        assert_eq!(v.p(), &[0, 1, 0]);
        assert_eq!(v.q(), &[0, 0]);
    }

    #[test]
    fn parses_swap_and_sum() {
        let e = parse_link_expr("~(0)").unwrap();
        assert!(e.swapped);
        assert_eq!(e.components[0].h(), &[0]);
        let s = parse_link_expr(" ( 2 , 1 , 2 ) # (2,1,2^2)").unwrap();
        assert_eq!(s.components.len(), 2);
        assert_eq!(s.components[1].p(), &[2, 0]);
    }

    #[test]
    fn rejects_bad_vectors() {
        let odd = parse_link_expr("(3,1,2)").unwrap_err();
        assert!(matches!(odd, NotationError::Validation { ref rule } if rule.contains("odd")));
        let q = parse_link_expr("(2,1^2,0)").unwrap_err();
        assert!(matches!(q, NotationError::Validation { ref rule } if rule.contains("q_1")));
        assert!(matches!(parse_link_expr("(2^1,1,2)"), Err(NotationError::Validation { .. })));
        assert!(matches!(parse_link_expr("(2,1)"), Err(NotationError::Validation { .. })));
        assert!(matches!(parse_link_expr("(2,0,2)"), Err(NotationError::Validation { .. })));
        assert!(matches!(parse_link_expr("(0,1,2)"), Err(NotationError::Validation { .. })));
        assert!(matches!(parse_link_expr("(2,1,0^1)"), Err(NotationError::Validation { .. })));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(
            parse_link_expr("(2,,1)").unwrap_err(),
            NotationError::Syntax { offset: 3, message: "expected an unsigned integer".into() }
        );
        assert!(matches!(parse_link_expr("(2"), Err(NotationError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_link_expr("(2)x"), Err(NotationError::Syntax { offset: 3, .. })));
        assert!(matches!(parse_link_expr(""), Err(NotationError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_link_expr("~~(2)"), Err(NotationError::Syntax { offset: 1, .. })));
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(LinkVector::standard(vec![2], vec![]).unwrap().to_string(), "(4)");
        assert_eq!(vec_of("(2,1,2^1,1,0)").to_string(), "(2,1,2^1,1,0)");
        assert_eq!(parse_link_expr("~ (2,1,2) # (2,1,2)").unwrap().to_string(), "~(2,1,2)#(2,1,2)");
        assert_eq!(vec_of("(2,1^0,2^0)").to_string(), "(2,1,2)");
    }

    #[test]
    fn rational_values() {
        assert_eq!(rational_value(&vec_of("(4,3,2)")), Rational::new(30, 13));
        assert_eq!(rational_value(&vec_of("(0)")).to_string(), "0/1");
        assert_eq!(rational_value(&vec_of("(2,1,0)")), Rational::new(2, 3));
    }

    #[test]
    fn normalization_rules() {
        let n = |s: &str| normalize_equivalence(&parse_link_expr(s).unwrap()).to_string();
        assert_eq!(n("(2,1^1,0)"), "(2,1,0)");
        assert_eq!(n("(2,1,2^2)"), "(2,1,2)");
        assert_eq!(n("(2,1,2^2)#(2,1,2)"), "(2,1,2^2)#(2,1,2)");
        assert_eq!(n("(2,2^1,2,1^1,2^1)"), "(2,2,2,1^1,2^1)");
    }
}
