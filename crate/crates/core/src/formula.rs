//! Formulas of multi-agent modal logic K.
//!
//! Only four constructors exist: atom, negation, conjunction and one box per
//! agent. The parser accepts disjunction (`|`) and diamond (`<a>`) and
//! rewrites them on the spot:
//!
//! ```text
//! φ | ψ  ==>  !(!φ & !ψ)
//! <a>φ   ==>  ![a]!φ
//! ```
//!
//! Concrete syntax, loosest first:
//!
//! ```text
//! formula := disj
//! disj    := conj ('|' conj)*
//! conj    := unary ('&' unary)*
//! unary   := '!' unary | '[' ident ']' unary | '<' ident '>' unary | atom | '(' formula ')'
//! atom    := ident
//! ```

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::arena::{AgentId, Arena, AtomId};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(AtomId),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Box(AgentId, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<AtomId>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn negation(inner: Formula) -> Formula {
        Formula::Not(Arc::new(inner))
    }

    pub fn and(left: Formula, right: Formula) -> Formula {
        Formula::And(Arc::new(left), Arc::new(right))
    }

    pub fn boxed(agent: impl Into<AgentId>, inner: Formula) -> Formula {
        Formula::Box(agent.into(), Arc::new(inner))
    }

    /// `!(!left & !right)`
    pub fn or(left: Formula, right: Formula) -> Formula {
        Formula::negation(Formula::and(Formula::negation(left), Formula::negation(right)))
    }

    /// `![agent]!inner`
    pub fn diamond(agent: impl Into<AgentId>, inner: Formula) -> Formula {
        Formula::negation(Formula::boxed(agent, Formula::negation(inner)))
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(inner) | Formula::Box(_, inner) => 1 + inner.size(),
            Formula::And(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Maximum nesting of box operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(inner) => inner.modal_depth(),
            Formula::And(l, r) => l.modal_depth().max(r.modal_depth()),
            Formula::Box(_, inner) => 1 + inner.modal_depth(),
        }
    }

    /// Visits every atom and agent name in the formula.
    fn names(&self, atoms: &mut Vec<AtomId>, agents: &mut Vec<AgentId>) {
        match self {
            Formula::Atom(p) => atoms.push(p.clone()),
            Formula::Not(inner) => inner.names(atoms, agents),
            Formula::And(l, r) => {
                l.names(atoms, agents);
                r.names(atoms, agents);
            }
            Formula::Box(a, inner) => {
                agents.push(a.clone());
                inner.names(atoms, agents);
            }
        }
    }

    fn fmt_unary(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::And(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

/// Canonical text: `&` is left-associative, so only a right operand that is
/// itself a conjunction (or a conjunction under `!`/`[a]`) is parenthesized.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::Not(inner) => {
                f.write_str("!")?;
                inner.fmt_unary(f)
            }
            Formula::Box(a, inner) => {
                write!(f, "[{a}]")?;
                inner.fmt_unary(f)
            }
            Formula::And(l, r) => {
                write!(f, "{l} & ")?;
                r.fmt_unary(f)
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(AtomId),
    #[error("unknown agent `{0}`")]
    UnknownAgent(AgentId),
}

/// Parses `text` and checks every atom and agent name against `arena`.
pub fn parse_formula<A: Arena + ?Sized>(text: &str, arena: &A) -> Result<Formula, FormulaError> {
    let phi = parse_unchecked(text)?;
    let (mut atoms, mut agents) = (Vec::new(), Vec::new());
    phi.names(&mut atoms, &mut agents);
    if let Some(p) = atoms.into_iter().find(|p| !arena.has_atom(p)) {
        return Err(FormulaError::UnknownAtom(p));
    }
    if let Some(a) = agents.into_iter().find(|a| !arena.has_agent(a)) {
        return Err(FormulaError::UnknownAgent(a));
    }
    Ok(phi)
}

/// Parses `text` without resolving names.
pub fn parse_unchecked(text: &str) -> Result<Formula, FormulaError> {
    let mut parser = Parser { text, pos: 0 };
    let phi = parser.disj()?;
    parser.skip_ws();
    if parser.pos < text.len() {
        return Err(parser.error(format!("unexpected `{}`", parser.rest_char())));
    }
    Ok(phi)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> FormulaError {
        FormulaError::Syntax { column: self.text[..self.pos].chars().count() + 1, message: message.into() }
    }

    fn rest_char(&self) -> char {
        self.text[self.pos..].chars().next().unwrap_or(' ')
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), FormulaError> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => Err(self.error(format!("expected `{c}`, found `{found}`"))),
                None => Err(self.error(format!("expected `{c}`, found end of input"))),
            }
        }
    }

    fn ident(&mut self) -> Result<&'a str, FormulaError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
            Some((_, c)) => return Err(self.error(format!("expected identifier, found `{c}`"))),
            None => return Err(self.error("expected identifier, found end of input")),
        }
        let end = chars.find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_')).map_or(rest.len(), |(i, _)| i);
        self.pos += end;
        Ok(&rest[..end])
    }

    fn disj(&mut self) -> Result<Formula, FormulaError> {
        let mut phi = self.conj()?;
        while self.eat('|') {
            let rhs = self.conj()?;
            phi = Formula::or(phi, rhs);
        }
        Ok(phi)
    }

    fn conj(&mut self) -> Result<Formula, FormulaError> {
        let mut phi = self.unary()?;
        while self.eat('&') {
            let rhs = self.unary()?;
            phi = Formula::and(phi, rhs);
        }
        Ok(phi)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some('!') => {
                self.pos += 1;
                Ok(Formula::negation(self.unary()?))
            }
            Some('[') => {
                self.pos += 1;
                let agent = self.ident()?;
                self.expect(']')?;
                Ok(Formula::boxed(agent, self.unary()?))
            }
            Some('<') => {
                self.pos += 1;
                let agent = self.ident()?;
                self.expect('>')?;
                Ok(Formula::diamond(agent, self.unary()?))
            }
            Some('(') => {
                self.pos += 1;
                let phi = self.disj()?;
                self.expect(')')?;
                Ok(phi)
            }
            _ => Ok(Formula::atom(self.ident()?)),
        }
    }
}
