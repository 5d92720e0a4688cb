//! Positive homogeneous monoid presentations: data model, text format and
//! the built-in example families.
//!
//! File grammar (line oriented, `#` starts a comment):
//!
//! ```text
//! gen NAME : RATIONAL      # RATIONAL is INT or INT/INT, strictly positive
//! rel WORD = WORD          # WORD is a non-empty list of declared names
//! ```
//!
//! Every generator has strictly positive degree, so the monoid has no
//! non-trivial units and left-divisibility is already a partial order on
//! the elements themselves.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::degree::{parse_rational, DegreeKey};
use crate::model::MonoidDef;
use crate::mp::MpSpec;

/// Index of a generator in declaration order.
pub type GenIndex = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: BigRational,
}

/// A defining relation `lhs = rhs`. It is used in both directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Vec<GenIndex>,
    pub rhs: Vec<GenIndex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Presentation {
    generators: Vec<Generator>,
    relations: Vec<Relation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown symbol `{name}`{}", at(*.line, *.column))]
    UnknownSymbol {
        name: String,
        line: Option<usize>,
        column: Option<usize>,
    },
    #[error("relation is not homogeneous: left side has degree {lhs}, right side has degree {rhs}{}", at(*.line, None))]
    NonHomogeneousRelation {
        lhs: BigRational,
        rhs: BigRational,
        line: Option<usize>,
    },
    #[error("generator `{name}` has non-positive degree {degree}{}", at(*.line, None))]
    NonPositiveDegree {
        name: String,
        degree: BigRational,
        line: Option<usize>,
    },
    #[error("generator `{name}` is declared twice{}", at(*.line, None))]
    DuplicateGenerator { name: String, line: Option<usize> },
    #[error("relation has an empty side{}", at(*.line, None))]
    EmptyWord { line: Option<usize> },
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
}

fn at(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

impl Presentation {
    /// Builds and validates a presentation from named generators and
    /// relations whose sides are whitespace-separated generator names.
    pub fn new<'a, N: Into<String>>(
        generators: impl IntoIterator<Item = (N, BigRational)>,
        relations: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, PresentationError> {
        let mut p = Presentation::default();
        for (name, degree) in generators {
            p.push_generator(name.into(), degree, None)?;
        }
        for (lhs, rhs) in relations {
            let lhs = p.resolve(lhs.split_whitespace())?;
            let rhs = p.resolve(rhs.split_whitespace())?;
            p.push_relation(lhs, rhs, None)?;
        }
        Ok(p)
    }

    /// Builds a presentation from index-based relations.
    pub fn from_parts(
        generators: Vec<Generator>,
        relations: Vec<Relation>,
    ) -> Result<Self, PresentationError> {
        let mut p = Presentation::default();
        for g in generators {
            p.push_generator(g.name, g.degree, None)?;
        }
        for r in relations {
            if let Some(&bad) = r
                .lhs
                .iter()
                .chain(&r.rhs)
                .find(|&&i| i >= p.generators.len())
            {
                return Err(PresentationError::UnknownSymbol {
                    name: format!("#{bad}"),
                    line: None,
                    column: None,
                });
            }
            p.push_relation(r.lhs, r.rhs, None)?;
        }
        Ok(p)
    }

    fn resolve<'a>(
        &self,
        names: impl Iterator<Item = &'a str>,
    ) -> Result<Vec<GenIndex>, PresentationError> {
        names
            .map(|n| {
                self.index_of(n)
                    .ok_or_else(|| PresentationError::UnknownSymbol {
                        name: n.to_string(),
                        line: None,
                        column: None,
                    })
            })
            .collect()
    }

    fn push_generator(
        &mut self,
        name: String,
        degree: BigRational,
        line: Option<usize>,
    ) -> Result<(), PresentationError> {
        if !is_valid_name(&name) {
            return Err(PresentationError::InvalidName(name));
        }
        if self.index_of(&name).is_some() {
            return Err(PresentationError::DuplicateGenerator { name, line });
        }
        if !degree.is_positive() {
            return Err(PresentationError::NonPositiveDegree { name, degree, line });
        }
        self.generators.push(Generator { name, degree });
        Ok(())
    }

    fn push_relation(
        &mut self,
        lhs: Vec<GenIndex>,
        rhs: Vec<GenIndex>,
        line: Option<usize>,
    ) -> Result<(), PresentationError> {
        if lhs.is_empty() || rhs.is_empty() {
            return Err(PresentationError::EmptyWord { line });
        }
        let (dl, dr) = (self.word_degree(&lhs), self.word_degree(&rhs));
        if dl != dr {
            return Err(PresentationError::NonHomogeneousRelation {
                lhs: dl,
                rhs: dr,
                line,
            });
        }
        self.relations.push(Relation { lhs, rhs });
        Ok(())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn index_of(&self, name: &str) -> Option<GenIndex> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn word_degree(&self, word: &[GenIndex]) -> BigRational {
        word.iter().fold(BigRational::zero(), |acc, &g| {
            acc + &self.generators[g].degree
        })
    }

    /// Renders a word as space-separated generator names (`1` for the empty word).
    pub fn render_word(&self, word: &[GenIndex]) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        let names: Vec<&str> = word
            .iter()
            .map(|&g| self.generators[g].name.as_str())
            .collect();
        names.join(" ")
    }

    /// Parses a word given as whitespace-separated generator names.
    pub fn parse_word(&self, text: &str) -> Result<Vec<GenIndex>, PresentationError> {
        let text = text.trim();
        if text == "1" {
            return Ok(Vec::new());
        }
        self.resolve(text.split_whitespace())
    }

    /// Canonical text form, accepted back by [`parse_presentation`].
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.generators {
            writeln!(f, "gen {} : {}", g.name, g.degree)?;
        }
        for r in &self.relations {
            writeln!(
                f,
                "rel {} = {}",
                self.render_word(&r.lhs),
                self.render_word(&r.rhs)
            )?;
        }
        Ok(())
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None; // (byte offset, column)
    for (column, (offset, ch)) in line.char_indices().enumerate() {
        let column = column + 1;
        let single = ch == ':' || ch == '=';
        if ch.is_whitespace() || single {
            if let Some((s, c)) = start.take() {
                tokens.push(Token {
                    text: &line[s..offset],
                    column: c,
                });
            }
            if single {
                tokens.push(Token {
                    text: &line[offset..offset + ch.len_utf8()],
                    column,
                });
            }
        } else if start.is_none() {
            start = Some((offset, column));
        }
    }
    if let Some((s, c)) = start {
        tokens.push(Token {
            text: &line[s..],
            column: c,
        });
    }
    tokens
}

/// Parses the presentation file format.
pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let mut p = Presentation::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        let Some(head) = tokens.first() else { continue };
        let syntax = |column: usize, message: &str| PresentationError::Syntax {
            line: line_no,
            column,
            message: message.to_string(),
        };
        let end_column = content.chars().count() + 1;
        match head.text {
            "gen" => {
                let name = tokens
                    .get(1)
                    .ok_or_else(|| syntax(end_column, "expected generator name"))?;
                if !is_valid_name(name.text) {
                    return Err(syntax(name.column, "invalid generator name"));
                }
                match tokens.get(2) {
                    Some(t) if t.text == ":" => {}
                    Some(t) => return Err(syntax(t.column, "expected `:`")),
                    None => return Err(syntax(end_column, "expected `:`")),
                }
                let deg = tokens
                    .get(3)
                    .ok_or_else(|| syntax(end_column, "expected degree"))?;
                if let Some(extra) = tokens.get(4) {
                    return Err(syntax(extra.column, "unexpected token after degree"));
                }
                let degree = parse_rational(deg.text)
                    .map_err(|_| syntax(deg.column, "expected INT or INT/INT degree"))?;
                p.push_generator(name.text.to_string(), degree, Some(line_no))?;
            }
            "rel" => {
                let eq_positions: Vec<usize> = tokens
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.text == "=")
                    .map(|(i, _)| i)
                    .collect();
                let eq = match eq_positions.as_slice() {
                    [i] => *i,
                    [] => return Err(syntax(end_column, "expected `=`")),
                    [_, second, ..] => {
                        return Err(syntax(tokens[*second].column, "more than one `=`"))
                    }
                };
                if let Some(colon) = tokens.iter().find(|t| t.text == ":") {
                    return Err(syntax(colon.column, "unexpected `:`"));
                }
                let side = |range: &[Token]| -> Result<Vec<GenIndex>, PresentationError> {
                    range
                        .iter()
                        .map(|t| {
                            p.index_of(t.text)
                                .ok_or_else(|| PresentationError::UnknownSymbol {
                                    name: t.text.to_string(),
                                    line: Some(line_no),
                                    column: Some(t.column),
                                })
                        })
                        .collect()
                };
                let lhs_tokens = &tokens[1..eq];
                let rhs_tokens = &tokens[eq + 1..];
                if lhs_tokens.is_empty() {
                    return Err(syntax(tokens[eq].column, "empty left-hand word"));
                }
                if rhs_tokens.is_empty() {
                    return Err(syntax(end_column, "empty right-hand word"));
                }
                let lhs = side(lhs_tokens)?;
                let rhs = side(rhs_tokens)?;
                p.push_relation(lhs, rhs, Some(line_no))?;
            }
            _ => return Err(syntax(head.column, "expected `gen` or `rel`")),
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuiltinError {
    #[error("unknown builtin `{0}` (expected free, example3, braid3, zpos or mp)")]
    UnknownBuiltin(String),
    #[error("invalid parameters for `{name}`: {reason}")]
    InvalidParams { name: String, reason: String },
}

/// Parameters of a builtin: positional values and `key=value` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuiltinParams {
    pub positional: Vec<String>,
    pub named: BTreeMap<String, String>,
}

impl BuiltinParams {
    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.named.insert(key.to_string(), value.to_string());
        self
    }
}

/// A builtin monoid together with the cutoff it is enumerated to by default.
#[derive(Clone, Debug)]
pub struct Builtin {
    pub name: String,
    pub def: MonoidDef,
    pub default_cutoff: DegreeKey,
}

pub const DEFAULT_CUTOFF: i64 = 8;
pub const DEFAULT_NMAX: u64 = 50;

/// Splits a preset string such as `mp:p=4,8,16:K=3` or `zpos:50`.
pub fn parse_preset(spec: &str) -> Result<(String, BuiltinParams), BuiltinError> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or("").trim().to_string();
    let mut params = BuiltinParams::default();
    for part in parts {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        match part.split_once('=') {
            Some((k, v)) => {
                params
                    .named
                    .insert(k.trim().to_string(), v.trim().to_string());
            }
            None => params.positional.push(part.to_string()),
        }
    }
    Ok((name, params))
}

/// Resolves a preset string into a builtin.
pub fn preset(spec: &str) -> Result<Builtin, BuiltinError> {
    let (name, params) = parse_preset(spec)?;
    builtin(&name, &params)
}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Constructs one of the named example monoids.
///
/// * `free` – free monoid; `n` (or first positional) generators, optional
///   `deg=d1,d2,...` degrees (default 1 each).
/// * `example3` – `<a,b | aa = bb, ab = ba>`, degrees 1.
/// * `braid3` – positive braid monoid `<a,b | aba = bab>`, degrees 1.
/// * `zpos` – positive integers under multiplication, degree `log n`;
///   `nmax` (or first positional) sets the default cutoff.
/// * `mp` – the dyadic family with `p=p1,p2,...` (or `p=pow2`) and depth cap `K`.
pub fn builtin(name: &str, params: &BuiltinParams) -> Result<Builtin, BuiltinError> {
    let invalid = |reason: &str| BuiltinError::InvalidParams {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    let get = |key: &str, pos: usize| -> Option<&str> {
        params
            .named
            .get(key)
            .map(String::as_str)
            .or_else(|| params.positional.get(pos).map(String::as_str))
    };
    let check_keys = |allowed: &[&str], max_positional: usize| -> Result<(), BuiltinError> {
        if let Some(k) = params.named.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(invalid(&format!("unexpected parameter `{k}`")));
        }
        if params.positional.len() > max_positional {
            return Err(invalid("too many positional parameters"));
        }
        Ok(())
    };
    let default_cutoff = DegreeKey::integer(DEFAULT_CUTOFF);
    match name {
        "free" => {
            check_keys(&["n", "deg"], 1)?;
            let degrees: Option<Vec<BigRational>> = match params.named.get("deg") {
                Some(list) => Some(
                    list.split(',')
                        .map(|d| parse_rational(d.trim()).map_err(|e| invalid(&e.to_string())))
                        .collect::<Result<_, _>>()?,
                ),
                None => None,
            };
            let n = match get("n", 0) {
                Some(v) => v
                    .parse::<usize>()
                    .map_err(|_| invalid("n must be a positive integer"))?,
                None => degrees.as_ref().map_or(2, Vec::len),
            };
            if n == 0 {
                return Err(invalid("n must be a positive integer"));
            }
            let degrees = degrees.unwrap_or_else(|| vec![rational(1); n]);
            if degrees.len() != n {
                return Err(invalid("deg list length differs from n"));
            }
            let gens = degrees.into_iter().enumerate().map(|(i, d)| Generator {
                name: free_name(i, n),
                degree: d,
            });
            let p = Presentation::from_parts(gens.collect(), Vec::new())
                .map_err(|e| invalid(&e.to_string()))?;
            Ok(Builtin {
                name: format!("free:{n}"),
                def: MonoidDef::Presented(p),
                default_cutoff,
            })
        }
        "example3" => {
            check_keys(&[], 0)?;
            Ok(Builtin {
                name: "example3".into(),
                def: MonoidDef::Presented(example3()),
                default_cutoff,
            })
        }
        "braid3" => {
            check_keys(&[], 0)?;
            Ok(Builtin {
                name: "braid3".into(),
                def: MonoidDef::Presented(braid3()),
                default_cutoff,
            })
        }
        "zpos" => {
            check_keys(&["nmax"], 1)?;
            let nmax = match get("nmax", 0) {
                Some(v) => v
                    .parse::<u64>()
                    .map_err(|_| invalid("nmax must be an integer"))?,
                None => DEFAULT_NMAX,
            };
            if nmax < 2 {
                return Err(invalid("nmax must be at least 2"));
            }
            Ok(Builtin {
                name: format!("zpos:{nmax}"),
                def: MonoidDef::Integers,
                default_cutoff: DegreeKey::MultInt(nmax),
            })
        }
        "mp" => {
            check_keys(&["p", "K"], 0)?;
            let p_text = params.named.get("p").ok_or_else(|| invalid("missing p"))?;
            let k = match params.named.get("K") {
                Some(v) => Some(
                    v.parse::<usize>()
                        .map_err(|_| invalid("K must be an integer"))?,
                ),
                None => None,
            };
            let spec = if p_text == "pow2" {
                let k = k.ok_or_else(|| invalid("p=pow2 requires K"))?;
                MpSpec::pow2(k)
            } else {
                let p: Vec<u64> = p_text
                    .split(',')
                    .map(|v| v.trim().parse::<u64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| invalid("p must be a list of non-negative integers"))?;
                let k = k.unwrap_or(p.len());
                if k > p.len() {
                    return Err(invalid("K exceeds the length of p"));
                }
                MpSpec::new(p[..k].to_vec())
            }
            .map_err(|e| invalid(&e.to_string()))?;
            Ok(Builtin {
                name: format!("mp:p={}:K={}", join_p(spec.p()), spec.depth_cap()),
                def: MonoidDef::Mp(spec),
                default_cutoff,
            })
        }
        other => Err(BuiltinError::UnknownBuiltin(other.to_string())),
    }
}

fn join_p(p: &[u64]) -> String {
    p.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn free_name(i: usize, n: usize) -> String {
    if n <= 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{}", i + 1)
    }
}

/// `<a, b | a a = b b, a b = b a>` with both generators of degree 1.
pub fn example3() -> Presentation {
    Presentation::new(
        [("a", rational(1)), ("b", rational(1))],
        [("a a", "b b"), ("a b", "b a")],
    )
    .expect("example3 is homogeneous")
}

/// The positive braid monoid on three strands.
pub fn braid3() -> Presentation {
    Presentation::new(
        [("a", rational(1)), ("b", rational(1))],
        [("a b a", "b a b")],
    )
    .expect("braid3 is homogeneous")
}
