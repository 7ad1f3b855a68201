//! The external event specification language.
//!
//! Regular expressions over the external alphabet extended with a parallel
//! operator and a testing operator:
//!
//! ```text
//! S ::= S + S | S · S | S* | (S) | S ‖ S | a | ⟨a⟩ | λ
//! ```
//!
//! Precedence, tightest first: `*`, `·` (also `.` or juxtaposition), `‖`
//! (also `||`), `+`. All binary operators are left-associative. `⟨a⟩` may be
//! written `<a>`.
//!
//! Expressions are desugared into plain regular expressions (plus an internal
//! interleaving node) and compiled into an unambiguous right-linear grammar.

mod automata;
mod grammar;

use std::fmt;

use thiserror::Error;

use crate::model::{is_marker_event, BEGIN_P, END_P, TEST_SF};

pub use automata::{Dfa, Nfa};
pub use grammar::{Grammar, Production, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EeslError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("`{0}` is not an external event")]
    UnknownEvent(String),
    #[error("grammar line {line}: {message}")]
    GrammarSyntax { line: usize, message: String },
    #[error("grammar is not right-linear")]
    NotRightLinear,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Eesl {
    /// λ, the empty word.
    Empty,
    Atom(String),
    Union(Box<Eesl>, Box<Eesl>),
    Concat(Box<Eesl>, Box<Eesl>),
    Star(Box<Eesl>),
    Group(Box<Eesl>),
    Par(Box<Eesl>, Box<Eesl>),
    /// Always wraps an [`Eesl::Atom`].
    Test(Box<Eesl>),
    /// Interleaving product; only produced by [`desugar`].
    Shuffle(Box<Eesl>, Box<Eesl>),
}

impl Eesl {
    pub fn atom(name: &str) -> Self {
        Eesl::Atom(name.to_string())
    }

    pub fn union(a: Eesl, b: Eesl) -> Self {
        Eesl::Union(Box::new(a), Box::new(b))
    }

    pub fn concat(a: Eesl, b: Eesl) -> Self {
        Eesl::Concat(Box::new(a), Box::new(b))
    }

    pub fn star(a: Eesl) -> Self {
        Eesl::Star(Box::new(a))
    }

    pub fn group(a: Eesl) -> Self {
        Eesl::Group(Box::new(a))
    }

    pub fn par(a: Eesl, b: Eesl) -> Self {
        Eesl::Par(Box::new(a), Box::new(b))
    }

    pub fn test(name: &str) -> Self {
        Eesl::Test(Box::new(Eesl::atom(name)))
    }

    /// Whether a `‖` or `⟨⟩` node remains.
    pub fn has_sugar(&self) -> bool {
        match self {
            Eesl::Par(..) | Eesl::Test(_) => true,
            Eesl::Empty | Eesl::Atom(_) => false,
            Eesl::Star(a) | Eesl::Group(a) => a.has_sugar(),
            Eesl::Union(a, b) | Eesl::Concat(a, b) | Eesl::Shuffle(a, b) => {
                a.has_sugar() || b.has_sugar()
            }
        }
    }

    /// Event names in order of first appearance.
    pub fn events(&self) -> Vec<String> {
        fn walk(e: &Eesl, out: &mut Vec<String>) {
            match e {
                Eesl::Empty => {}
                Eesl::Atom(a) => {
                    if !out.contains(a) {
                        out.push(a.clone());
                    }
                }
                Eesl::Star(a) | Eesl::Group(a) | Eesl::Test(a) => walk(a, out),
                Eesl::Union(a, b) | Eesl::Concat(a, b) | Eesl::Par(a, b) | Eesl::Shuffle(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Eesl::Union(..) => 0,
            Eesl::Par(..) | Eesl::Shuffle(..) => 1,
            Eesl::Concat(..) => 2,
            Eesl::Star(_) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Eesl {
    /// Canonical text with `·`, `+`, `‖`, `⟨⟩` and `λ`; associative chains
    /// print flat.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, e: &Eesl, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Eesl::Empty => f.write_str("λ"),
            Eesl::Atom(a) => f.write_str(a),
            Eesl::Union(a, b) => {
                child(f, a, 0)?;
                f.write_str("+")?;
                child(f, b, 0)
            }
            Eesl::Par(a, b) => {
                child(f, a, 1)?;
                f.write_str("‖")?;
                child(f, b, 2)
            }
            Eesl::Shuffle(a, b) => {
                child(f, a, 2)?;
                f.write_str("⧢")?;
                child(f, b, 2)
            }
            Eesl::Concat(a, b) => {
                child(f, a, 2)?;
                f.write_str("·")?;
                child(f, b, 2)
            }
            Eesl::Star(a) => {
                child(f, a, 4)?;
                f.write_str("*")
            }
            Eesl::Group(a) => write!(f, "({a})"),
            Eesl::Test(a) => write!(f, "⟨{a}⟩"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lambda,
    LParen,
    RParen,
    Star,
    Plus,
    Dot,
    Par,
    LAngle,
    RAngle,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, EeslError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        let tok = match c {
            c if c.is_whitespace() => continue,
            c if c.is_alphanumeric() || c == '_' => {
                let mut s = c.to_string();
                while let Some(&(_, c)) = it.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        s.push(c);
                        it.next();
                    } else {
                        break;
                    }
                }
                if s == "λ" || s == "ε" {
                    Tok::Lambda
                } else {
                    Tok::Ident(s)
                }
            }
            'λ' | 'ε' => Tok::Lambda,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            '.' | '·' => Tok::Dot,
            '‖' => Tok::Par,
            '|' => match it.next() {
                Some((_, '|')) => Tok::Par,
                _ => {
                    return Err(EeslError::Syntax {
                        offset: i,
                        message: "expected `||`".into(),
                    })
                }
            },
            '<' | '⟨' => Tok::LAngle,
            '>' | '⟩' => Tok::RAngle,
            other => {
                return Err(EeslError::Syntax {
                    offset: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, i));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    alphabet: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn fail<T>(&self, message: &str) -> Result<T, EeslError> {
        Err(EeslError::Syntax {
            offset: self.offset(),
            message: message.to_string(),
        })
    }

    fn union(&mut self) -> Result<Eesl, EeslError> {
        let mut lhs = self.par()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            lhs = Eesl::union(lhs, self.par()?);
        }
        Ok(lhs)
    }

    fn par(&mut self) -> Result<Eesl, EeslError> {
        let mut lhs = self.concat()?;
        while self.peek() == Some(&Tok::Par) {
            self.pos += 1;
            lhs = Eesl::par(lhs, self.concat()?);
        }
        Ok(lhs)
    }

    fn starts_primary(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_) | Tok::Lambda | Tok::LParen | Tok::LAngle)
        )
    }

    fn concat(&mut self) -> Result<Eesl, EeslError> {
        let mut lhs = self.postfix()?;
        loop {
            if self.peek() == Some(&Tok::Dot) {
                self.pos += 1;
            } else if !self.starts_primary() {
                return Ok(lhs);
            }
            lhs = Eesl::concat(lhs, self.postfix()?);
        }
    }

    fn postfix(&mut self) -> Result<Eesl, EeslError> {
        let mut e = self.primary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            e = Eesl::star(e);
        }
        Ok(e)
    }

    fn event(&mut self) -> Result<String, EeslError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                if !self.alphabet.contains(&name) && !is_marker_event(&name) {
                    return Err(EeslError::UnknownEvent(name));
                }
                self.pos += 1;
                Ok(name)
            }
            _ => self.fail("expected an event name"),
        }
    }

    fn primary(&mut self) -> Result<Eesl, EeslError> {
        match self.peek() {
            Some(Tok::Ident(_)) => Ok(Eesl::Atom(self.event()?)),
            Some(Tok::Lambda) => {
                self.pos += 1;
                Ok(Eesl::Empty)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.union()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.fail("expected `)`");
                }
                self.pos += 1;
                Ok(Eesl::group(inner))
            }
            Some(Tok::LAngle) => {
                self.pos += 1;
                let name = self.event()?;
                if self.peek() != Some(&Tok::RAngle) {
                    return self.fail("expected `>` closing the testing operator");
                }
                self.pos += 1;
                Ok(Eesl::Test(Box::new(Eesl::Atom(name))))
            }
            Some(_) => self.fail("expected an event, `λ`, `(` or `<`"),
            None => self.fail("unexpected end of expression"),
        }
    }
}

/// Parses an expression. Event names must belong to `alphabet` or be one of
/// the marker events.
pub fn parse_eesl(text: &str, alphabet: &[String]) -> Result<Eesl, EeslError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.len(),
        alphabet,
    };
    let ast = parser.union()?;
    if parser.pos != parser.toks.len() {
        return parser.fail("unexpected trailing input");
    }
    Ok(ast)
}

/// Rewrites `S1 ‖ S2` into `beginP·(S1 + S2 + S1⧢S2)·endP` and `⟨a⟩` into
/// `testSF·a`, bottom-up. For two atoms the interleaving is spelled out as
/// `a·b + b·a`.
pub fn desugar(ast: &Eesl) -> Eesl {
    match ast {
        Eesl::Empty | Eesl::Atom(_) => ast.clone(),
        Eesl::Union(a, b) => Eesl::union(desugar(a), desugar(b)),
        Eesl::Concat(a, b) => Eesl::concat(desugar(a), desugar(b)),
        Eesl::Shuffle(a, b) => Eesl::Shuffle(Box::new(desugar(a)), Box::new(desugar(b))),
        Eesl::Star(a) => Eesl::star(desugar(a)),
        Eesl::Group(a) => Eesl::group(desugar(a)),
        Eesl::Test(a) => Eesl::concat(Eesl::atom(TEST_SF), desugar(a)),
        Eesl::Par(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            let interleaved = match (&a, &b) {
                (Eesl::Atom(_), Eesl::Atom(_)) => Eesl::union(
                    Eesl::concat(a.clone(), b.clone()),
                    Eesl::concat(b.clone(), a.clone()),
                ),
                _ => Eesl::Shuffle(Box::new(a.clone()), Box::new(b.clone())),
            };
            let alternatives = match interleaved {
                Eesl::Union(ab, ba) => Eesl::union(Eesl::union(Eesl::union(a, b), *ab), *ba),
                other => Eesl::union(Eesl::union(a, b), other),
            };
            Eesl::concat(
                Eesl::concat(Eesl::atom(BEGIN_P), Eesl::group(alternatives)),
                Eesl::atom(END_P),
            )
        }
    }
}

/// Inserts `testSF` before every external event and before every parallel
/// group. Runs on the sugared tree; `⟨a⟩` is already triggered and marker
/// events are left alone.
pub fn apply_testing_mode(ast: &Eesl) -> Eesl {
    match ast {
        Eesl::Empty | Eesl::Test(_) => ast.clone(),
        Eesl::Atom(a) if is_marker_event(a) => ast.clone(),
        Eesl::Atom(_) | Eesl::Par(..) | Eesl::Shuffle(..) => {
            Eesl::concat(Eesl::atom(TEST_SF), ast.clone())
        }
        Eesl::Union(a, b) => Eesl::union(apply_testing_mode(a), apply_testing_mode(b)),
        Eesl::Concat(a, b) => Eesl::concat(apply_testing_mode(a), apply_testing_mode(b)),
        Eesl::Star(a) => Eesl::star(apply_testing_mode(a)),
        Eesl::Group(a) => Eesl::group(apply_testing_mode(a)),
    }
}

/// Thompson construction, determinization, minimization and one production
/// per DFA transition. The result is right-linear and unambiguous; sugar is
/// removed first if present.
pub fn compile_to_grammar(ast: &Eesl) -> Grammar {
    let ast = if ast.has_sugar() {
        desugar(ast)
    } else {
        ast.clone()
    };
    let nfa = Nfa::thompson(&ast);
    let dfa = Dfa::from_nfa(&nfa).minimize();
    Grammar::from_dfa(&dfa)
}
