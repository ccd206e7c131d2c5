//! Lattice expressions: `expr := term ('+' term)*`,
//! `term := atom ('(' int ')')?`, `atom := A<n> | D<n> | E6 | E7 | E8 | U | '(' expr ')'`.

use super::{Lattice, LatticeError};
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Int(i64),
    Plus,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, LatticeError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' | '⊕' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::Open));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::Close));
                i += 1;
            }
            '-' | '0'..='9' => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse().map_err(|_| LatticeError::Parse {
                    position: start,
                    token: text.clone(),
                })?;
                out.push((start, Tok::Int(v)));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Name(chars[start..i].iter().collect())));
            }
            other => {
                return Err(LatticeError::Parse {
                    position: i,
                    token: other.to_string(),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn err_here(&self) -> LatticeError {
        match self.toks.get(self.pos) {
            Some((p, t)) => LatticeError::Parse {
                position: *p,
                token: render(t),
            },
            None => LatticeError::Parse {
                position: self.end,
                token: "<end of input>".into(),
            },
        }
    }

    fn expr(&mut self) -> Result<Lattice, LatticeError> {
        let mut acc = self.term()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            acc = acc.direct_sum(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Lattice, LatticeError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Open) {
            if let Some((_, Tok::Int(m))) = self.toks.get(self.pos + 1) {
                let m = *m;
                if self.toks.get(self.pos + 2).map(|t| &t.1) == Some(&Tok::Close) {
                    if m == 0 {
                        self.pos += 1;
                        return Err(self.err_here());
                    }
                    self.pos += 3;
                    return base.twist(&BigInt::from(m));
                }
            }
            return Err(self.err_here());
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Lattice, LatticeError> {
        let here = self.pos;
        match self.peek().cloned() {
            Some(Tok::Open) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(self.err_here());
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Tok::Name(name)) => {
                let lat = named(&name).ok_or_else(|| {
                    let (p, t) = &self.toks[here];
                    LatticeError::Parse {
                        position: *p,
                        token: render(t),
                    }
                })?;
                self.pos += 1;
                Ok(lat)
            }
            _ => Err(self.err_here()),
        }
    }
}

fn render(t: &Tok) -> String {
    match t {
        Tok::Name(s) => s.clone(),
        Tok::Int(v) => v.to_string(),
        Tok::Plus => "+".into(),
        Tok::Open => "(".into(),
        Tok::Close => ")".into(),
    }
}

fn named(name: &str) -> Option<Lattice> {
    let (head, digits) = name.split_at(1);
    if head == "U" && digits.is_empty() {
        return Some(hyperbolic_plane());
    }
    let n: usize = digits.parse().ok()?;
    match head {
        "A" if n >= 1 => Some(root_lattice('A', n)),
        "D" if n >= 4 => Some(root_lattice('D', n)),
        "E" if (6..=8).contains(&n) => Some(root_lattice('E', n)),
        _ => None,
    }
}

pub fn hyperbolic_plane() -> Lattice {
    let g = vec![
        vec![BigInt::zero(), BigInt::from(1)],
        vec![BigInt::from(1), BigInt::zero()],
    ];
    Lattice::new(vec!["u1".into(), "u2".into()], g).expect("U is valid")
}

/// Negated Cartan matrix of `A_n`, `D_n` or `E_n` (negative definite).
pub fn root_lattice(family: char, n: usize) -> Lattice {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    match family {
        'A' => edges.extend((1..n).map(|i| (i - 1, i))),
        'D' => {
            // chain 0..n-2, fork at n-3
            edges.extend((1..n - 1).map(|i| (i - 1, i)));
            edges.push((n - 3, n - 1));
        }
        'E' => {
            // chain 0..n-2, branch node n-1 attached to node 2
            edges.extend((1..n - 1).map(|i| (i - 1, i)));
            edges.push((2, n - 1));
        }
        _ => panic!("unknown root family {family}"),
    }
    let mut g = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = BigInt::from(-2);
    }
    for (a, b) in edges {
        g[a][b] = BigInt::from(1);
        g[b][a] = BigInt::from(1);
    }
    let labels = (1..=n).map(|i| format!("{family}{n}.{i}")).collect();
    Lattice::new(labels, g).expect("root lattices are valid")
}

pub fn parse(src: &str) -> Result<Lattice, LatticeError> {
    let toks = lex(src)?;
    let mut p = Parser {
        end: src.chars().count(),
        toks,
        pos: 0,
    };
    if p.toks.is_empty() {
        return Err(p.err_here());
    }
    let lat = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err_here());
    }
    Ok(lat)
}
