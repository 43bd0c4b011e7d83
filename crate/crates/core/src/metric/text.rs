//! Plain-text form of space descriptors, as used in config files:
//! `circle(2pi+0.2)`, `graph(2; 0-1:pi, 0-1:pi, 0-1:pi)`,
//! `suspension(circle(2pi))`, `cone(circle(2pi))`, `sphere(2)`, `euclidean(3)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

use super::graph::Edge;
use super::SpaceDescriptor;

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceDescriptor::Circle { length } => write!(f, "circle({length})"),
            SpaceDescriptor::MetricGraph(g) => {
                write!(f, "graph({};", g.vertex_count())?;
                for (i, e) in g.edges().iter().enumerate() {
                    let sep = if i == 0 { " " } else { ", " };
                    write!(f, "{sep}{}-{}:{}", e.a, e.b, e.length)?;
                }
                write!(f, ")")
            }
            SpaceDescriptor::Suspension(b) => write!(f, "suspension({b})"),
            SpaceDescriptor::EuclideanCone(b) => write!(f, "cone({b})"),
            SpaceDescriptor::RoundSphere { dim } => write!(f, "sphere({dim})"),
            SpaceDescriptor::Euclidean { dim } => write!(f, "euclidean({dim})"),
        }
    }
}

impl FromStr for SpaceDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        let open = t.find('(').ok_or_else(|| fail("expected `name(...)`"))?;
        if !t.ends_with(')') {
            return Err(fail("missing closing parenthesis"));
        }
        let name = t[..open].trim();
        let inner = &t[open + 1..t.len() - 1];
        match name {
            "circle" => SpaceDescriptor::circle(parse_length(inner)?),
            "suspension" => SpaceDescriptor::suspension(inner.parse()?),
            "cone" => SpaceDescriptor::cone(inner.parse()?),
            "sphere" | "round_sphere" => SpaceDescriptor::round_sphere(parse_dim(inner)?),
            "euclidean" => SpaceDescriptor::euclidean(parse_dim(inner)?),
            "theta" => {
                let lens = inner
                    .split(',')
                    .map(parse_length)
                    .collect::<Result<Vec<_>>>()?;
                match lens.as_slice() {
                    [a, b, c] => SpaceDescriptor::theta(*a, *b, *c),
                    _ => Err(fail("theta graph takes three lengths")),
                }
            }
            "graph" => {
                let (n, rest) = inner
                    .split_once(';')
                    .ok_or_else(|| fail("expected `graph(n; a-b:len, ...)`"))?;
                let n = parse_dim(n)?;
                let mut edges = Vec::new();
                for item in rest.split(',').filter(|x| !x.trim().is_empty()) {
                    let (ends, len) = item
                        .split_once(':')
                        .ok_or_else(|| fail("edge must read `a-b:length`"))?;
                    let (a, b) = ends
                        .split_once('-')
                        .ok_or_else(|| fail("edge must read `a-b:length`"))?;
                    edges.push(Edge {
                        a: parse_dim(a)?,
                        b: parse_dim(b)?,
                        length: parse_length(len)?,
                    });
                }
                SpaceDescriptor::graph(n, edges)
            }
            _ => Err(fail("unknown space name")),
        }
    }
}

fn parse_dim(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Parse {
        input: s.to_string(),
        reason: "expected a nonnegative integer".into(),
    })
}

/// Parses a length expression: sums and differences of products and
/// quotients of numbers and `pi`, where `2pi` means `2*pi`.
pub fn parse_length(s: &str) -> Result<f64> {
    let mut p = Lexer {
        src: s,
        chars: s.char_indices().peekable(),
    };
    let v = p.sum()?;
    p.skip_ws();
    if p.chars.peek().is_some() {
        return Err(p.fail("trailing characters"));
    }
    if !v.is_finite() {
        return Err(p.fail("value is not finite"));
    }
    Ok(v)
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
}

impl Lexer<'_> {
    fn fail(&self, reason: &str) -> Error {
        Error::Parse {
            input: self.src.to_string(),
            reason: reason.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn sum(&mut self) -> Result<f64> {
        self.skip_ws();
        let mut sign = 1.0;
        if let Some((_, c @ ('+' | '-'))) = self.chars.peek().copied() {
            self.chars.next();
            if c == '-' {
                sign = -1.0;
            }
        }
        let mut acc = sign * self.product()?;
        loop {
            self.skip_ws();
            match self.chars.peek().copied() {
                Some((_, '+')) => {
                    self.chars.next();
                    acc += self.product()?;
                }
                Some((_, '-')) => {
                    self.chars.next();
                    acc -= self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<f64> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.chars.peek().copied() {
                Some((_, '*')) => {
                    self.chars.next();
                    acc *= self.factor()?;
                }
                Some((_, '/')) => {
                    self.chars.next();
                    acc /= self.factor()?;
                }
                Some((_, 'p' | 'π')) => acc *= self.factor()?,
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<f64> {
        self.skip_ws();
        match self.chars.peek().copied() {
            Some((_, 'π')) => {
                self.chars.next();
                Ok(PI)
            }
            Some((_, 'p')) => {
                self.chars.next();
                match self.chars.next() {
                    Some((_, 'i')) => Ok(PI),
                    _ => Err(self.fail("expected `pi`")),
                }
            }
            Some((start, c)) if c.is_ascii_digit() || c == '.' => {
                let mut end = start;
                while let Some((i, c)) = self.chars.peek().copied() {
                    let exp_sign = matches!(c, '+' | '-')
                        && matches!(self.src[..i].chars().last(), Some('e' | 'E'));
                    if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                        end = i + c.len_utf8();
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                self.src[start..end]
                    .parse()
                    .map_err(|_| self.fail("malformed number"))
            }
            _ => Err(self.fail("expected a number or `pi`")),
        }
    }
}
