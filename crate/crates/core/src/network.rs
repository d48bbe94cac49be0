//! Reaction networks and their text format.
//!
//! One reaction per line, terms separated by `+`, each term `k X` or `X`
//! with a positive integer coefficient. `->` marks an irreversible reaction,
//! `<->` a reversible one. `0` stands for an empty side. Everything after
//! `#` is a comment. Species are numbered in order of first appearance.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{int, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input: no reactions found")]
    Empty,
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: species {species} appears on both sides of the reaction")]
    BothSides { line: usize, species: String },
    #[error(transparent)]
    Invalid(#[from] NetworkError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("duplicate species name {0}")]
    DuplicateSpecies(String),
    #[error("reaction {reaction} refers to unknown species {species}")]
    UnknownSpecies { reaction: usize, species: String },
    #[error("reaction {reaction}: species {species} appears on both sides")]
    BothSides { reaction: usize, species: String },
    #[error("reaction {0} has no species on either side")]
    EmptyReaction(usize),
    #[error("reaction {reaction}: coefficient of {species} must be positive")]
    ZeroCoefficient { reaction: usize, species: String },
    #[error("species {0} takes part in no reaction")]
    UnusedSpecies(String),
    #[error("network has no reactions")]
    NoReactions,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Species {
    pub name: String,
    pub index: usize,
}

/// A reaction, with stoichiometric coefficients keyed by species index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Reaction {
    pub left: BTreeMap<usize, u32>,
    pub right: BTreeMap<usize, u32>,
    pub reversible: bool,
}

impl Reaction {
    /// Species that can be produced by this reaction.
    pub fn producible(&self) -> impl Iterator<Item = usize> + '_ {
        let back = if self.reversible { Some(self.left.keys()) } else { None };
        self.right.keys().chain(back.into_iter().flatten()).copied()
    }

    pub fn participants(&self) -> impl Iterator<Item = usize> + '_ {
        self.left.keys().chain(self.right.keys()).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    species: Vec<Species>,
    reactions: Vec<Reaction>,
}

impl Network {
    /// Validates and assembles a network.
    pub fn new(names: Vec<String>, reactions: Vec<Reaction>) -> Result<Network, NetworkError> {
        if reactions.is_empty() {
            return Err(NetworkError::NoReactions);
        }
        let mut seen = BTreeMap::new();
        for name in &names {
            if seen.insert(name.as_str(), ()).is_some() {
                return Err(NetworkError::DuplicateSpecies(name.clone()));
            }
        }
        let n = names.len();
        let mut used = vec![false; n];
        for (j, r) in reactions.iter().enumerate() {
            if r.left.is_empty() && r.right.is_empty() {
                return Err(NetworkError::EmptyReaction(j));
            }
            for (&i, &k) in r.left.iter().chain(&r.right) {
                let Some(name) = names.get(i) else {
                    return Err(NetworkError::UnknownSpecies {
                        reaction: j,
                        species: format!("#{i}"),
                    });
                };
                if k == 0 {
                    return Err(NetworkError::ZeroCoefficient {
                        reaction: j,
                        species: name.clone(),
                    });
                }
                used[i] = true;
            }
            if let Some(i) = r.left.keys().find(|i| r.right.contains_key(i)) {
                return Err(NetworkError::BothSides {
                    reaction: j,
                    species: names[*i].clone(),
                });
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(NetworkError::UnusedSpecies(names[i].clone()));
        }
        let species = names
            .into_iter()
            .enumerate()
            .map(|(index, name)| Species { name, index })
            .collect();
        Ok(Network { species, reactions })
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.name == name)
    }

    pub fn species_name(&self, i: usize) -> &str {
        &self.species[i].name
    }

    pub fn all_reversible(&self) -> bool {
        self.reactions.iter().all(|r| r.reversible)
    }

    /// Γ with `Γ_ij = right_j(i) − left_j(i)`.
    pub fn stoichiometric_matrix(&self) -> RationalMatrix {
        let mut g = RationalMatrix::zeros(self.n_species(), self.n_reactions());
        for (j, r) in self.reactions.iter().enumerate() {
            for (&i, &k) in &r.left {
                g[(i, j)] -= int(i64::from(k));
            }
            for (&i, &k) in &r.right {
                g[(i, j)] += int(i64::from(k));
            }
        }
        g
    }

    /// Pairs `(earlier, later)` of reactions that are identical up to
    /// orientation of a reversible reaction.
    pub fn duplicate_reactions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ra) in self.reactions.iter().enumerate() {
            for (b, rb) in self.reactions.iter().enumerate().skip(a + 1) {
                let same = ra == rb
                    || (ra.reversible
                        && rb.reversible
                        && ra.left == rb.right
                        && ra.right == rb.left);
                if same {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn format_reaction(&self, j: usize) -> String {
        let r = &self.reactions[j];
        let side = |m: &BTreeMap<usize, u32>| {
            if m.is_empty() {
                return "0".to_string();
            }
            m.iter()
                .map(|(&i, &k)| {
                    if k == 1 {
                        self.species[i].name.clone()
                    } else {
                        format!("{k} {}", self.species[i].name)
                    }
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        let arrow = if r.reversible { "<->" } else { "->" };
        format!("{} {arrow} {}", side(&r.left), side(&r.right))
    }
}

/// Pretty-prints in the text format. Re-parsing the output reproduces the
/// network whenever species are indexed in first-appearance order, which
/// holds for every parsed network.
impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.reactions.len() {
            writeln!(f, "{}", self.format_reaction(j))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ReactionJson {
    left: BTreeMap<String, u32>,
    right: BTreeMap<String, u32>,
    reversible: bool,
}

#[derive(Serialize, Deserialize)]
struct NetworkJson {
    species: Vec<String>,
    reactions: Vec<ReactionJson>,
}

impl Serialize for Network {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let name = |m: &BTreeMap<usize, u32>| {
            m.iter()
                .map(|(&i, &k)| (self.species[i].name.clone(), k))
                .collect()
        };
        NetworkJson {
            species: self.species.iter().map(|s| s.name.clone()).collect(),
            reactions: self
                .reactions
                .iter()
                .map(|r| ReactionJson {
                    left: name(&r.left),
                    right: name(&r.right),
                    reversible: r.reversible,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Network {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = NetworkJson::deserialize(d)?;
        let lookup = |m: BTreeMap<String, u32>, j: usize| {
            m.into_iter()
                .map(|(name, k)| {
                    raw.species
                        .iter()
                        .position(|s| *s == name)
                        .map(|i| (i, k))
                        .ok_or_else(|| {
                            D::Error::custom(NetworkError::UnknownSpecies {
                                reaction: j,
                                species: name,
                            })
                        })
                })
                .collect::<Result<BTreeMap<_, _>, _>>()
        };
        let mut reactions = Vec::new();
        for (j, r) in raw.reactions.into_iter().enumerate() {
            reactions.push(Reaction {
                left: lookup(r.left, j)?,
                right: lookup(r.right, j)?,
                reversible: r.reversible,
            });
        }
        Network::new(raw.species.clone(), reactions).map_err(D::Error::custom)
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let rest = self.rest();
        let end = rest.find(|c: char| !f(c)).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Parses one side of a reaction into `(name, coefficient)` terms.
fn parse_side(cur: &mut Cursor<'_>) -> Result<Vec<(String, u32)>, ParseError> {
    cur.skip_ws();
    let rest = cur.rest();
    if rest.starts_with('0') && !rest[1..].starts_with(is_ident_char) {
        cur.pos += 1;
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    loop {
        cur.skip_ws();
        let digits = cur.take_while(|c| c.is_ascii_digit());
        let coeff = if digits.is_empty() {
            1
        } else {
            let k: u32 = digits
                .parse()
                .map_err(|_| cur.err(format!("coefficient {digits} out of range")))?;
            if k == 0 {
                return Err(cur.err("coefficients must be positive"));
            }
            cur.skip_ws();
            k
        };
        if !cur.rest().starts_with(is_ident_start) {
            return Err(cur.err("expected species name"));
        }
        let name = cur.take_while(is_ident_char);
        terms.push((name.to_string(), coeff));
        if !cur.eat("+") {
            return Ok(terms);
        }
    }
}

/// Parses the text format into a validated [`Network`].
pub fn parse_network(text: &str) -> Result<Network, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut reactions = Vec::new();
    let index_of = |name: &str, names: &mut Vec<String>| match names.iter().position(|s| s == name) {
        Some(i) => i,
        None => {
            names.push(name.to_string());
            names.len() - 1
        }
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor {
            text: body,
            pos: 0,
            line,
        };
        let left = parse_side(&mut cur)?;
        let reversible = if cur.eat("<->") {
            true
        } else if cur.eat("->") {
            false
        } else {
            return Err(cur.err("expected '->' or '<->'"));
        };
        let right = parse_side(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.err(format!("unexpected trailing input {:?}", cur.rest())));
        }
        if left.is_empty() && right.is_empty() {
            return Err(cur.err("reaction has no species"));
        }
        if let Some((name, _)) = left.iter().find(|(a, _)| right.iter().any(|(b, _)| a == b)) {
            return Err(ParseError::BothSides {
                line,
                species: name.clone(),
            });
        }
        let mut collect = |terms: Vec<(String, u32)>| {
            let mut m = BTreeMap::new();
            for (name, k) in terms {
                *m.entry(index_of(&name, &mut names)).or_insert(0) += k;
            }
            m
        };
        let left = collect(left);
        let right = collect(right);
        reactions.push(Reaction {
            left,
            right,
            reversible,
        });
    }
    if reactions.is_empty() {
        return Err(ParseError::Empty);
    }
    let net = Network::new(names, reactions)?;
    for (a, b) in net.duplicate_reactions() {
        log::warn!("reaction {} duplicates reaction {}", b + 1, a + 1);
    }
    Ok(net)
}
