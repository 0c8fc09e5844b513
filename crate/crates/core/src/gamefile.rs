//! Text format for Muller games.
//!
//! ```text
//! muller 3;
//! 0 1 0,1;            # id owner successors ["name"]
//! 1 0 0,2 "hub";
//! 2 1 1,2;
//! F0: {0},{2},{0,1,2};
//! start: 1;           # optional
//! ```
//!
//! Statements end with `;`, `#` starts a comment that runs to the end of the line.
//! The condition's universe is the arena's vertex set; unlisted sets belong to Player 1.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::arena::{Arena, ArenaError};
use crate::condition::MullerCondition;
use crate::vertex_set::{Player, VertexId, VertexSet, MAX_VERTICES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{0}")]
    Semantic(String),
}

impl ParseError {
    fn semantic(msg: impl Into<String>) -> Self {
        ParseError::Semantic(msg.into())
    }
}

/// A parsed game: arena, winning condition and an optional start vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameFile {
    pub arena: Arena,
    pub condition: MullerCondition,
    pub start: Option<VertexId>,
}

impl GameFile {
    pub fn new(
        arena: Arena,
        condition: MullerCondition,
        start: Option<VertexId>,
    ) -> Result<Self, ParseError> {
        if !arena.vertices().is_subset(condition.universe()) {
            return Err(ParseError::semantic("condition universe does not cover the arena"));
        }
        if let Some(s) = start {
            if s >= arena.vertex_count() {
                return Err(ParseError::semantic(format!("start vertex {s} is not in the arena")));
            }
        }
        Ok(GameFile { arena, condition, start })
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Parser::new(text)?.game()
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GameFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.arena;
        writeln!(f, "muller {};", g.vertex_count())?;
        for v in 0..g.vertex_count() {
            let succ: Vec<String> = g.successors(v).iter().map(|w| w.to_string()).collect();
            write!(f, "{v} {} {}", g.owner(v), succ.join(","))?;
            if let Some(name) = g.name(v) {
                write!(f, " \"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))?;
            }
            writeln!(f, ";")?;
        }
        let mut sets = String::new();
        for (i, s) in self.condition.f0().enumerate() {
            if i > 0 {
                sets.push(',');
            }
            write!(sets, "{s}")?;
        }
        writeln!(f, "F0: {sets};")?;
        if let Some(s) = self.start {
            writeln!(f, "start: {s};")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Num(u64),
    Str(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let err = |message: String| ParseError::Syntax { line, column, message };
            match c {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '0'..='9' => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    let n = s.parse().map_err(|_| err(format!("number {s} is too large")))?;
                    out.push(Token { tok: Tok::Num(n), line, column });
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    out.push(Token { tok: Tok::Word(chars[start..i].iter().collect()), line, column });
                }
                '"' => {
                    i += 1;
                    let mut s = String::new();
                    loop {
                        match chars.get(i) {
                            None => return Err(err("unterminated string".into())),
                            Some('"') => {
                                i += 1;
                                break;
                            }
                            Some('\\') => {
                                match chars.get(i + 1) {
                                    Some(&e @ ('"' | '\\')) => s.push(e),
                                    _ => return Err(err("invalid escape in string".into())),
                                }
                                i += 2;
                            }
                            Some(&ch) => {
                                s.push(ch);
                                i += 1;
                            }
                        }
                    }
                    out.push(Token { tok: Tok::Str(s), line, column });
                }
                ';' | ',' | ':' | '{' | '}' => {
                    out.push(Token { tok: Tok::Sym(c), line, column });
                    i += 1;
                }
                other => return Err(err(format!("unexpected character '{other}'"))),
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let line = text.lines().count().max(1);
        let column = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
        Ok(Parser { tokens: tokenize(text)?, pos: 0, end: (line, column) })
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let (line, column) =
            self.tokens.get(self.pos).map_or(self.end, |t| (t.line, t.column));
        ParseError::Syntax { line, column, message: message.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Sym(s)) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_here(format!("expected '{c}'"))),
        }
    }

    fn number(&mut self, what: &str) -> Result<u64, ParseError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn set(&mut self) -> Result<Vec<u64>, ParseError> {
        self.expect_sym('{')?;
        let mut ids = Vec::new();
        if let Some(Tok::Sym('}')) = self.peek() {
            self.pos += 1;
            return Ok(ids);
        }
        loop {
            ids.push(self.number("vertex id")?);
            match self.bump() {
                Some(Tok::Sym(',')) => continue,
                Some(Tok::Sym('}')) => return Ok(ids),
                _ => {
                    self.pos -= 1;
                    return Err(self.error_here("expected ',' or '}'"));
                }
            }
        }
    }

    fn game(mut self) -> Result<GameFile, ParseError> {
        match self.bump() {
            Some(Tok::Word(w)) if w == "muller" => {}
            _ => {
                self.pos -= 1;
                return Err(self.error_here("expected header 'muller <num_vertices>;'"));
            }
        }
        let n = self.number("vertex count")?;
        self.expect_sym(';')?;
        if n as usize > MAX_VERTICES {
            return Err(ParseError::semantic(format!(
                "{n} vertices declared, at most {MAX_VERTICES} are supported"
            )));
        }
        let n = n as usize;
        if n == 0 {
            return Err(ParseError::semantic("a game needs at least one vertex"));
        }

        let mut owners: Vec<Option<Player>> = vec![None; n];
        let mut succ: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        let mut names: Vec<Option<String>> = vec![None; n];
        let mut f0: Option<Vec<Vec<u64>>> = None;
        let mut start: Option<u64> = None;

        while let Some(tok) = self.peek().cloned() {
            match tok {
                Tok::Num(id) => {
                    self.pos += 1;
                    let owner = match self.number("owner (0 or 1)")? {
                        0 => Player::Zero,
                        1 => Player::One,
                        _ => {
                            self.pos -= 1;
                            return Err(self.error_here("owner must be 0 or 1"));
                        }
                    };
                    let mut targets = vec![self.number("successor")?];
                    while let Some(Tok::Sym(',')) = self.peek() {
                        self.pos += 1;
                        targets.push(self.number("successor")?);
                    }
                    let name = match self.peek() {
                        Some(Tok::Str(s)) => {
                            let s = s.clone();
                            self.pos += 1;
                            Some(s)
                        }
                        _ => None,
                    };
                    self.expect_sym(';')?;
                    let id = id as usize;
                    if id >= n {
                        return Err(ParseError::semantic(format!(
                            "vertex id {id} out of range for {n} vertices"
                        )));
                    }
                    if owners[id].is_some() {
                        return Err(ParseError::semantic(format!("vertex {id} declared twice")));
                    }
                    owners[id] = Some(owner);
                    succ[id] = targets.into_iter().map(|t| t as usize).collect();
                    names[id] = name;
                }
                Tok::Word(w) if w == "F0" => {
                    self.pos += 1;
                    self.expect_sym(':')?;
                    if f0.is_some() {
                        return Err(ParseError::semantic("F0 declared twice"));
                    }
                    let mut sets = Vec::new();
                    if let Some(Tok::Sym('{')) = self.peek() {
                        sets.push(self.set()?);
                        while let Some(Tok::Sym(',')) = self.peek() {
                            self.pos += 1;
                            sets.push(self.set()?);
                        }
                    }
                    self.expect_sym(';')?;
                    f0 = Some(sets);
                }
                Tok::Word(w) if w == "start" => {
                    self.pos += 1;
                    self.expect_sym(':')?;
                    let s = self.number("start vertex")?;
                    self.expect_sym(';')?;
                    if start.replace(s).is_some() {
                        return Err(ParseError::semantic("start declared twice"));
                    }
                }
                _ => return Err(self.error_here("expected a vertex line, 'F0:' or 'start:'")),
            }
        }

        let owners = owners
            .into_iter()
            .enumerate()
            .map(|(v, o)| o.ok_or_else(|| ParseError::semantic(format!("vertex {v} is not declared"))))
            .collect::<Result<Vec<_>, _>>()?;
        let arena = Arena::with_names(owners, succ, names).map_err(|e| match e {
            ArenaError::NoSuccessor(v) => ParseError::semantic(format!("vertex {v} has no successor")),
            other => ParseError::semantic(other.to_string()),
        })?;
        let universe = arena.vertices();
        let mut family = Vec::new();
        for ids in f0.unwrap_or_default() {
            let mut set = VertexSet::EMPTY;
            for id in ids {
                if id as usize >= n {
                    return Err(ParseError::semantic(format!(
                        "F0 set mentions vertex {id} outside the universe {universe}"
                    )));
                }
                set.insert(id as usize);
            }
            family.push(set);
        }
        let condition = MullerCondition::new(universe, family)
            .map_err(|e| ParseError::semantic(e.to_string()))?;
        GameFile::new(arena, condition, start.map(|s| s as usize))
    }
}
