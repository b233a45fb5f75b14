//! Reader for the canonical text grammar.
//!
//! Precedence, loosest to tightest: `:=` / `=`, `<-`, `->` (right
//! associative), `name : pattern`, postfix `...`, application `f[...]`.
//! Whitespace is insignificant except that, between top-level statements
//! of a program, a newline ends an expression that is already complete.
//! Comments are `(* ... *)` and do not nest.

use std::collections::BTreeSet;
use std::fmt;

use crate::expr::{names, Expr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{position}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub position: Position,
    pub message: String,
    pub expected: BTreeSet<String>,
}

fn expected_suffix(expected: &BTreeSet<String>) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        let list: Vec<&str> = expected.iter().map(String::as_str).collect();
        format!(" (expected {})", list.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Blank {
        name: Option<String>,
        sequence: bool,
        head: Option<String>,
    },
    Int(i64),
    Str(String),
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Rule,
    LeftArrow,
    Colon,
    ColonEq,
    Eq,
    Ellipsis,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Blank { .. } => "blank".into(),
            Tok::Int(i) => format!("integer `{i}`"),
            Tok::Str(_) => "string".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Rule => "`->`".into(),
            Tok::LeftArrow => "`<-`".into(),
            Tok::Colon => "`:`".into(),
            Tok::ColonEq => "`:=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ellipsis => "`...`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: Position,
    newline_before: bool,
}

struct Lexer {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            idx: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.idx + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.idx).copied()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    fn error(pos: Position, message: impl Into<String>) -> ParseError {
        ParseError {
            position: pos,
            message: message.into(),
            expected: BTreeSet::new(),
        }
    }

    /// Skips whitespace and comments; reports whether a newline was crossed.
    fn skip_trivia(&mut self) -> Result<bool, ParseError> {
        let mut newline = false;
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    newline |= c == '\n';
                    self.bump();
                }
                Some('(') if self.peek_at(1) == Some('*') => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek() {
                            None => return Err(Self::error(start, "unterminated comment")),
                            Some('*') if self.peek_at(1) == Some(')') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            Some(c) => {
                                newline |= c == '\n';
                                self.bump();
                            }
                        }
                    }
                }
                _ => return Ok(newline),
            }
        }
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    /// Reads the underscores (and optional head) of a blank.
    fn blank(&mut self, name: Option<String>, start: Position) -> Result<Tok, ParseError> {
        let mut count = 0;
        while self.peek() == Some('_') {
            self.bump();
            count += 1;
        }
        let sequence = match count {
            1 => false,
            3 => true,
            2 => return Err(Self::error(start, "double blank `__` is not supported")),
            _ => return Err(Self::error(start, "too many underscores in blank")),
        };
        let head = match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => Some(self.ident()),
            _ => None,
        };
        Ok(Tok::Blank {
            name,
            sequence,
            head,
        })
    }

    fn integer(&mut self, start: Position) -> Result<Tok, ParseError> {
        let mut s = String::new();
        if self.peek() == Some('-') {
            s.push('-');
            self.bump();
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s.parse::<i64>()
            .map(Tok::Int)
            .map_err(|_| Self::error(start, format!("integer `{s}` out of range")))
    }

    fn string(&mut self, start: Position) -> Result<Tok, ParseError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(Self::error(start, "unterminated string")),
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('r') => s.push('\r'),
                    Some(c @ ('"' | '\\')) => s.push(c),
                    _ => return Err(Self::error(start, "invalid escape in string")),
                },
                Some(c) => s.push(c),
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, ParseError> {
        let newline_before = self.skip_trivia()?;
        let pos = self.pos();
        let tok = match self.peek() {
            None => Tok::Eof,
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                if self.peek() == Some('_') {
                    self.blank(Some(name), pos)?
                } else {
                    Tok::Ident(name)
                }
            }
            Some('_') => self.blank(None, pos)?,
            Some(c) if c.is_ascii_digit() => self.integer(pos)?,
            Some('-') => match self.peek_at(1) {
                Some('>') => {
                    self.bump();
                    self.bump();
                    Tok::Rule
                }
                Some(d) if d.is_ascii_digit() => self.integer(pos)?,
                _ => return Err(Self::error(pos, "unexpected `-`")),
            },
            Some('<') if self.peek_at(1) == Some('-') => {
                self.bump();
                self.bump();
                Tok::LeftArrow
            }
            Some(':') => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    Tok::ColonEq
                } else {
                    Tok::Colon
                }
            }
            Some('.') => {
                let mut dots = 0;
                while self.peek() == Some('.') && dots < 3 {
                    self.bump();
                    dots += 1;
                }
                if dots == 3 {
                    Tok::Ellipsis
                } else {
                    return Err(Self::error(
                        pos,
                        "only `...` repetition is supported (`..` is not)",
                    ));
                }
            }
            Some('"') => self.string(pos)?,
            Some('$') => {
                return Err(Self::error(pos, "identifiers may not begin with `$`"));
            }
            Some(c) => {
                self.bump();
                match c {
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '=' => Tok::Eq,
                    other => {
                        return Err(Self::error(pos, format!("unexpected character `{other}`")))
                    }
                }
            }
        };
        Ok(Token {
            tok,
            pos,
            newline_before,
        })
    }

    fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            let t = self.next_token()?;
            let done = t.tok == Tok::Eof;
            out.push(t);
            if done {
                return Ok(out);
            }
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    /// Bracket nesting; newlines only end statements at depth zero.
    depth: usize,
    statements: bool,
}

impl Parser {
    fn new(src: &str, statements: bool) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: Lexer::new(src).tokenize()?,
            idx: 0,
            depth: 0,
            statements,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.idx]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    /// True if the next token is `tok` and may continue the current expression.
    fn at_operator(&self, tok: &Tok) -> bool {
        let t = self.peek();
        t.tok == *tok && !(self.statements && self.depth == 0 && t.newline_before)
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            position: t.pos,
            message: format!("unexpected {}", t.tok.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn assign(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.arrow()?;
        for (tok, head) in [(Tok::ColonEq, names::SET_DELAYED), (Tok::Eq, names::SET)] {
            if self.at_operator(&tok) {
                self.advance();
                let rhs = self.arrow()?;
                return Ok(Expr::call(head, vec![lhs, rhs]));
            }
        }
        Ok(lhs)
    }

    fn arrow(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.rule()?;
        if self.at_operator(&Tok::LeftArrow) {
            self.advance();
            let rhs = self.rule()?;
            return Ok(Expr::left_arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn rule(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.named()?;
        if self.at_operator(&Tok::Rule) {
            self.advance();
            let rhs = self.rule()?;
            return Ok(Expr::rule(lhs, rhs));
        }
        Ok(lhs)
    }

    fn named(&mut self) -> Result<Expr, ParseError> {
        let start = self.peek().pos;
        let lhs = self.postfix()?;
        if self.at_operator(&Tok::Colon) {
            if lhs.as_symbol().is_none() {
                return Err(ParseError {
                    position: start,
                    message: "the name in `name : pattern` must be a symbol".into(),
                    expected: BTreeSet::new(),
                });
            }
            self.advance();
            let pattern = self.postfix()?;
            return Ok(Expr::call(names::PATTERN, vec![lhs, pattern]));
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.application()?;
        while self.at_operator(&Tok::Ellipsis) {
            self.advance();
            e = Expr::call(names::REPEATED_NULL, vec![e]);
        }
        Ok(e)
    }

    fn application(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        while self.at_operator(&Tok::LBracket) {
            self.advance();
            let args = self.arguments(Tok::RBracket)?;
            e = Expr::compound(e, args);
        }
        Ok(e)
    }

    fn arguments(&mut self, close: Tok) -> Result<Vec<Expr>, ParseError> {
        self.depth += 1;
        let mut args = Vec::new();
        if self.peek().tok != close {
            loop {
                args.push(self.assign()?);
                if self.peek().tok == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        if self.peek().tok != close {
            return Err(self.unexpected(&["`,`", &close.describe()]));
        }
        self.depth -= 1;
        self.advance();
        Ok(args)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        let e = match t.tok {
            Tok::Ident(name) => Expr::sym(&name),
            Tok::Int(i) => Expr::int(i),
            Tok::Str(s) => Expr::string(&s),
            Tok::Blank {
                name,
                sequence,
                head,
            } => {
                let kind = if sequence {
                    names::BLANK_NULL_SEQUENCE
                } else {
                    names::BLANK
                };
                let blank = Expr::call(kind, head.iter().map(|h| Expr::sym(h)).collect());
                match name {
                    Some(n) => Expr::call(names::PATTERN, vec![Expr::sym(&n), blank]),
                    None => blank,
                }
            }
            Tok::LBrace => {
                self.advance();
                return Ok(Expr::list(self.arguments(Tok::RBrace)?));
            }
            _ => return Err(self.unexpected(&["expression"])),
        };
        self.advance();
        Ok(e)
    }
}

/// Parses exactly one expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src, false)?;
    let e = p.assign()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected(&["end of input"]));
    }
    Ok(e)
}

/// Parses a script: expressions separated by `;` or by newlines.
pub fn parse_program(src: &str) -> Result<Vec<Expr>, ParseError> {
    Ok(parse_program_spanned(src)?
        .into_iter()
        .map(|(e, _)| e)
        .collect())
}

/// Like [`parse_program`], also returning where each statement starts.
pub fn parse_program_spanned(src: &str) -> Result<Vec<(Expr, Position)>, ParseError> {
    let mut p = Parser::new(src, true)?;
    let mut out = Vec::new();
    loop {
        while p.peek().tok == Tok::Semi {
            p.advance();
        }
        if p.peek().tok == Tok::Eof {
            return Ok(out);
        }
        let start = p.peek().pos;
        out.push((p.assign()?, start));
        let next = p.peek();
        match next.tok {
            Tok::Semi | Tok::Eof => {}
            _ if next.newline_before => {}
            _ => return Err(p.unexpected(&["`;`", "newline", "end of input"])),
        }
    }
}
