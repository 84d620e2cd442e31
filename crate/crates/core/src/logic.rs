//! The multi-agent modal language: syntax, a text grammar, evaluation over
//! equivalence frames, and per-frame validity checking.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! imp   := or ( "->" imp )?            right associative
//! or    := and ( "|" and )*
//! and   := unary ( "&" unary )*
//! unary := "~" unary | MODAL unary | atom
//! MODAL := ("M" | "K") ( digits | "{" digits ("," digits)* "}" ) "."
//! atom  := "true" | "false" | ident | "(" imp ")"
//! ```
//!
//! Identifiers of the form `M<digits>` / `K<digits>` are modalities, not
//! variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::frames::{Frame, FrameError, Valuation, ValuationFile, WorldSet};
use crate::label::Label;
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("formula mentions agent {agent}, frame has {agents}")]
    AgentOutOfRange { agent: usize, agents: usize },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// The agents a modality speaks about: a single agent `i` or a group `α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agents {
    One(usize),
    Group(BTreeSet<usize>),
}

impl Agents {
    pub fn set(&self) -> BTreeSet<usize> {
        match self {
            Agents::One(i) => BTreeSet::from([*i]),
            Agents::Group(g) => g.clone(),
        }
    }
}

impl fmt::Display for Agents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agents::One(i) => write!(f, "{i}"),
            Agents::Group(g) => {
                let items: Vec<String> = g.iter().map(ToString::to_string).collect();
                write!(f, "{{{}}}", items.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    False,
    True,
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `M_α φ`: some `~_α`-related world satisfies `φ`.
    Possible(Agents, Box<Formula>),
    /// `K_α φ`, i.e. `¬M_α¬φ`.
    Knows(Agents, Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn possible(agent: usize, f: Formula) -> Formula {
        Formula::Possible(Agents::One(agent), Box::new(f))
    }

    pub fn knows(agent: usize, f: Formula) -> Formula {
        Formula::Knows(Agents::One(agent), Box::new(f))
    }

    pub fn possible_group(group: BTreeSet<usize>, f: Formula) -> Formula {
        Formula::Possible(Agents::Group(group), Box::new(f))
    }

    pub fn knows_group(group: BTreeSet<usize>, f: Formula) -> Formula {
        Formula::Knows(Agents::Group(group), Box::new(f))
    }

    /// Propositional variables, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::False | Formula::True => {}
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Not(a) | Formula::Possible(_, a) | Formula::Knows(_, a) => a.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Largest agent index mentioned, 0 if none.
    pub fn max_agent(&self) -> usize {
        match self {
            Formula::False | Formula::True | Formula::Var(_) => 0,
            Formula::Not(a) => a.max_agent(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.max_agent().max(b.max_agent())
            }
            Formula::Possible(g, a) | Formula::Knows(g, a) => {
                g.set().into_iter().max().unwrap_or(0).max(a.max_agent())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) | Formula::Possible(..) | Formula::Knows(..) => 4,
            Formula::False | Formula::True | Formula::Var(_) => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            Formula::False => write!(f, "false"),
            Formula::True => write!(f, "true"),
            Formula::Var(v) => write!(f, "{v}"),
            Formula::Not(a) => {
                write!(f, "~")?;
                write_child(f, a, a.precedence() < p)
            }
            Formula::Possible(g, a) | Formula::Knows(g, a) => {
                let op = if matches!(self, Formula::Possible(..)) { 'M' } else { 'K' };
                write!(f, "{op}{g}.")?;
                write_child(f, a, a.precedence() < p)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let op = if matches!(self, Formula::And(..)) { "&" } else { "|" };
                write_child(f, a, a.precedence() < p)?;
                write!(f, " {op} ")?;
                write_child(f, b, b.precedence() <= p)
            }
            Formula::Implies(a, b) => {
                write_child(f, a, a.precedence() <= p)?;
                write!(f, " -> ")?;
                write_child(f, b, b.precedence() < p)
            }
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    True,
    False,
    Modal(bool, Agents),
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, position: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(start, "expected an agent index");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        match text.parse::<usize>() {
            Ok(0) => self.err(start, "agent indices start at 1"),
            Ok(n) => Ok(n),
            Err(_) => self.err(start, "agent index too large"),
        }
    }

    fn next(&mut self) -> Result<(usize, Token), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((start, Token::End));
        };
        let next = self.src.get(self.pos + 1).copied();
        let tok = match c {
            b'(' => {
                self.pos += 1;
                Token::LParen
            }
            b')' => {
                self.pos += 1;
                Token::RParen
            }
            b'~' => {
                self.pos += 1;
                Token::Not
            }
            b'&' => {
                self.pos += 1;
                Token::And
            }
            b'|' => {
                self.pos += 1;
                Token::Or
            }
            b'-' if next == Some(b'>') => {
                self.pos += 2;
                Token::Arrow
            }
            b'M' | b'K' if matches!(next, Some(d) if d.is_ascii_digit() || d == b'{') => {
                self.pos += 1;
                let agents = if self.src[self.pos] == b'{' {
                    self.pos += 1;
                    let mut group = BTreeSet::new();
                    loop {
                        self.skip_ws();
                        group.insert(self.number()?);
                        self.skip_ws();
                        match self.src.get(self.pos) {
                            Some(b',') => self.pos += 1,
                            Some(b'}') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return self.err(self.pos, "expected ',' or '}' in agent group"),
                        }
                    }
                    Agents::Group(group)
                } else {
                    Agents::One(self.number()?)
                };
                if self.src.get(self.pos) != Some(&b'.') {
                    return self.err(self.pos, "expected '.' after modality");
                }
                self.pos += 1;
                Token::Modal(c == b'M', agents)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match word {
                    "true" => Token::True,
                    "false" => Token::False,
                    w => Token::Ident(w.to_string()),
                }
            }
            _ => return self.err(start, format!("unexpected character '{}'", c as char)),
        };
        Ok((start, tok))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: (usize, Token),
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(usize, Token), ParseError> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.peeked, next))
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peeked.1 == Token::Arrow {
            self.bump()?;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peeked.1 == Token::Or {
            self.bump()?;
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peeked.1 == Token::And {
            self.bump()?;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let (pos, tok) = self.bump()?;
        match tok {
            Token::Not => Ok(Formula::not(self.unary()?)),
            Token::Modal(true, g) => Ok(Formula::Possible(g, Box::new(self.unary()?))),
            Token::Modal(false, g) => Ok(Formula::Knows(g, Box::new(self.unary()?))),
            Token::True => Ok(Formula::True),
            Token::False => Ok(Formula::False),
            Token::Ident(v) => Ok(Formula::Var(v)),
            Token::LParen => {
                let inner = self.implication()?;
                let (pos, tok) = self.bump()?;
                if tok != Token::RParen {
                    return Err(ParseError {
                        position: pos,
                        message: "expected ')'".into(),
                    });
                }
                Ok(inner)
            }
            Token::End => Err(ParseError {
                position: pos,
                message: "missing operand".into(),
            }),
            other => Err(ParseError {
                position: pos,
                message: format!("unexpected {other:?}"),
            }),
        }
    }
}

/// Parses the text grammar described in the module docs.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut lexer = Lexer {
        src: text.as_bytes(),
        pos: 0,
    };
    let first = lexer.next()?;
    let mut parser = Parser {
        lexer,
        peeked: first,
    };
    let f = parser.implication()?;
    match parser.peeked {
        (_, Token::End) => Ok(f),
        (pos, ref tok) => Err(ParseError {
            position: pos,
            message: format!("trailing input starting with {tok:?}"),
        }),
    }
}

/// Evaluates formulas over one frame and valuation, caching the group
/// relations it meets.
pub struct Evaluator<'a> {
    frame: &'a Frame,
    valuation: &'a Valuation,
    groups: BTreeMap<BTreeSet<usize>, Partition>,
}

impl<'a> Evaluator<'a> {
    pub fn new(frame: &'a Frame, valuation: &'a Valuation) -> Self {
        Evaluator {
            frame,
            valuation,
            groups: BTreeMap::new(),
        }
    }

    fn relation(&mut self, agents: &Agents) -> Result<&Partition, LogicError> {
        let set = agents.set();
        if !self.groups.contains_key(&set) {
            let p = self.frame.group_partition(&set)?;
            self.groups.insert(set.clone(), p);
        }
        Ok(&self.groups[&set])
    }

    /// Worlds where `phi` holds.
    pub fn satisfying_set(&mut self, phi: &Formula) -> Result<WorldSet, LogicError> {
        let agents = self.frame.agents();
        let top = phi.max_agent();
        if top > agents {
            return Err(LogicError::AgentOutOfRange { agent: top, agents });
        }
        self.sat(phi)
    }

    fn sat(&mut self, phi: &Formula) -> Result<WorldSet, LogicError> {
        let n = self.frame.num_worlds();
        Ok(match phi {
            Formula::False => WorldSet::empty(n),
            Formula::True => WorldSet::full(n),
            Formula::Var(v) => self.valuation.truth_set(v),
            Formula::Not(a) => self.sat(a)?.complement(),
            Formula::And(a, b) => self.sat(a)?.intersection(&self.sat(b)?),
            Formula::Or(a, b) => self.sat(a)?.union(&self.sat(b)?),
            Formula::Implies(a, b) => self.sat(a)?.complement().union(&self.sat(b)?),
            Formula::Possible(g, a) => {
                let inner = self.sat(a)?;
                inner.saturate(self.relation(g)?)
            }
            Formula::Knows(g, a) => {
                let inner = self.sat(a)?.complement();
                inner.saturate(self.relation(g)?).complement()
            }
        })
    }
}

/// Worlds of `frame` where `phi` holds under `valuation`.
pub fn satisfying_set(frame: &Frame, valuation: &Valuation, phi: &Formula) -> Result<WorldSet, LogicError> {
    Evaluator::new(frame, valuation).satisfying_set(phi)
}

/// Truth of `phi` at `world`.
pub fn eval(frame: &Frame, valuation: &Valuation, world: &Label, phi: &Formula) -> Result<bool, LogicError> {
    let w = frame.world_index(world)?;
    Ok(satisfying_set(frame, valuation, phi)?.contains(w))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// True at every world under every valuation of its variables.
    ProvenValid,
    Counterexample {
        world: Label,
        valuation: ValuationFile,
    },
    /// No counterexample among this many random valuations.
    SampledNoCounterexample { samples: usize },
}

/// Settings for [`valid_on`].
#[derive(Debug, Clone, Copy)]
pub struct ValidityBudget {
    /// Largest number of valuations enumerated exhaustively.
    pub exhaustive_limit: u64,
    /// Random valuations tried when exhaustive search is too large.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ValidityBudget {
    fn default() -> Self {
        ValidityBudget {
            exhaustive_limit: crate::DEFAULT_CAP as u64,
            samples: 1000,
            seed: 0,
        }
    }
}

/// Checks `phi` at every world of `frame`. All `2^(vars·worlds)`
/// valuations are enumerated when that count fits the budget, otherwise
/// random valuations are sampled.
pub fn valid_on(frame: &Frame, phi: &Formula, budget: ValidityBudget) -> Result<Verdict, LogicError> {
    let vars: Vec<String> = phi.variables().into_iter().collect();
    let worlds = frame.num_worlds();
    let bits = vars.len() * worlds;
    let exhaustive = bits < 64 && (1u64 << bits) <= budget.exhaustive_limit;

    let check = |bitmap: &dyn Fn(usize) -> bool| -> Result<Option<Verdict>, LogicError> {
        let sets = vars
            .iter()
            .enumerate()
            .map(|(v, name)| {
                let mask = (0..worlds).map(|w| bitmap(v * worlds + w)).collect();
                (name.clone(), WorldSet::from_mask(mask))
            })
            .collect();
        let valuation = Valuation::from_sets(worlds, sets);
        let holds = satisfying_set(frame, &valuation, phi)?;
        Ok((0..worlds).find(|&w| !holds.contains(w)).map(|w| Verdict::Counterexample {
            world: frame.world(w).clone(),
            valuation: valuation.to_file(frame),
        }))
    };

    if exhaustive {
        for code in 0u64..(1u64 << bits) {
            if let Some(v) = check(&|bit| code >> bit & 1 == 1)? {
                return Ok(v);
            }
        }
        Ok(Verdict::ProvenValid)
    } else {
        let mut rng = StdRng::seed_from_u64(budget.seed);
        for _ in 0..budget.samples {
            let bitmap: Vec<bool> = (0..bits).map(|_| rng.gen()).collect();
            if let Some(v) = check(&|bit| bitmap[bit])? {
                return Ok(v);
            }
        }
        Ok(Verdict::SampledNoCounterexample {
            samples: budget.samples,
        })
    }
}

/// The axiom schemata of the normal logic of equivalence frames, written
/// with the possibility operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    /// `M_i(ψ ∨ χ) → M_iψ ∨ M_iχ`
    K,
    /// `¬M_i⊥`
    N,
    /// `φ → M_iφ`
    T,
    /// `M_iM_iφ → M_iφ`
    Four,
    /// `φ → K_iM_iφ`
    B,
}

impl Schema {
    pub const ALL: [Schema; 5] = [Schema::K, Schema::N, Schema::T, Schema::Four, Schema::B];

    /// Instance for agent `i`. `K` uses both `phi` and `psi`, `N` neither,
    /// the others only `phi`.
    pub fn instance(self, i: usize, phi: &Formula, psi: &Formula) -> Formula {
        let m = |f: Formula| Formula::possible(i, f);
        match self {
            Schema::K => Formula::implies(
                m(Formula::or(phi.clone(), psi.clone())),
                Formula::or(m(phi.clone()), m(psi.clone())),
            ),
            Schema::N => Formula::not(m(Formula::False)),
            Schema::T => Formula::implies(phi.clone(), m(phi.clone())),
            Schema::Four => Formula::implies(m(m(phi.clone())), m(phi.clone())),
            Schema::B => Formula::implies(phi.clone(), Formula::knows(i, m(phi.clone()))),
        }
    }
}
