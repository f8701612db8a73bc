//! Tokenizer shared by the SDL and query parsers.

use std::fmt;

use crate::error::SyntaxError;

/// 1-based source position.
#[derive(Debug, Clone, Copy, Default, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl Pos {
    pub fn new(line: u32, column: u32) -> Self {
        Pos { line, column }
    }
}

// Positions are metadata: two ASTs that differ only in where things were
// written are the same AST.
impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Name(String),
    Int(i64),
    Float(f64),
    Str(String),
    Punct(char),
    Spread,
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Name(n) => write!(f, "`{n}`"),
            Token::Int(i) => write!(f, "`{i}`"),
            Token::Float(x) => write!(f, "`{x}`"),
            Token::Str(_) => f.write_str("string"),
            Token::Punct(c) => write!(f, "`{c}`"),
            Token::Spread => f.write_str("`...`"),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

const PUNCT: &str = "{}()[]:!@=|$&,";

pub fn tokenize(src: &str) -> Result<Vec<(Token, Pos)>, SyntaxError> {
    let mut lx = Lexer {
        chars: src.chars().collect(),
        i: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        lx.skip_ignored();
        let pos = lx.pos();
        let Some(c) = lx.peek() else {
            out.push((Token::Eof, pos));
            return Ok(out);
        };
        let tok = if c == '_' || c.is_ascii_alphabetic() {
            Token::Name(lx.take_while(|c| c == '_' || c.is_ascii_alphanumeric()))
        } else if c == '-' || c.is_ascii_digit() {
            lx.number(pos)?
        } else if c == '"' {
            lx.string(pos)?
        } else if c == '.' {
            for _ in 0..3 {
                if lx.bump() != Some('.') {
                    return Err(SyntaxError::new(pos, "expected `...`"));
                }
            }
            Token::Spread
        } else if PUNCT.contains(c) {
            lx.bump();
            if c == ',' {
                continue;
            }
            Token::Punct(c)
        } else {
            return Err(SyntaxError::new(pos, format!("unexpected character {c:?}")));
        };
        out.push((tok, pos));
    }
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: u32,
    column: u32,
}

impl Lexer {
    fn pos(&self) -> Pos {
        Pos::new(self.line, self.column)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| f(*c)) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn skip_ignored(&mut self) {
        while let Some(c) = self.peek() {
            match c {
                ' ' | '\t' | '\r' | '\n' | '\u{feff}' => {
                    self.bump();
                }
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn number(&mut self, pos: Pos) -> Result<Token, SyntaxError> {
        let mut s = String::new();
        if self.peek() == Some('-') {
            s.push('-');
            self.bump();
        }
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Err(SyntaxError::new(pos, "expected digits"));
        }
        if digits.len() > 1 && digits.starts_with('0') {
            return Err(SyntaxError::new(pos, "leading zeros are not allowed"));
        }
        s.push_str(&digits);
        let mut is_float = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            self.bump();
            s.push('.');
            s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            is_float = true;
            s.push('e');
            self.bump();
            if let Some(sign @ ('+' | '-')) = self.peek() {
                s.push(sign);
                self.bump();
            }
            let exp = self.take_while(|c| c.is_ascii_digit());
            if exp.is_empty() {
                return Err(SyntaxError::new(pos, "malformed exponent"));
            }
            s.push_str(&exp);
        }
        if self
            .peek()
            .is_some_and(|c| c == '_' || c.is_ascii_alphabetic() || c == '.')
        {
            return Err(SyntaxError::new(pos, format!("malformed number near {s:?}")));
        }
        if is_float {
            s.parse()
                .map(Token::Float)
                .map_err(|_| SyntaxError::new(pos, format!("malformed float {s:?}")))
        } else {
            s.parse()
                .map(Token::Int)
                .map_err(|_| SyntaxError::new(pos, format!("integer {s} out of range")))
        }
    }

    fn string(&mut self, pos: Pos) -> Result<Token, SyntaxError> {
        if self.peek_at(1) == Some('"') && self.peek_at(2) == Some('"') {
            for _ in 0..3 {
                self.bump();
            }
            let mut s = String::new();
            loop {
                match self.bump() {
                    None => return Err(SyntaxError::new(pos, "unterminated block string")),
                    Some('"') if self.peek() == Some('"') && self.peek_at(1) == Some('"') => {
                        self.bump();
                        self.bump();
                        return Ok(Token::Str(s));
                    }
                    Some(c) => s.push(c),
                }
            }
        }
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(SyntaxError::new(pos, "unterminated string")),
                Some('"') => return Ok(Token::Str(s)),
                Some('\\') => {
                    let esc = self.bump();
                    let c = match esc {
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('/') => '/',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('t') => '\t',
                        Some('u') => {
                            let hex: String = (0..4).filter_map(|_| self.bump()).collect();
                            u32::from_str_radix(&hex, 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| SyntaxError::new(pos, "bad unicode escape"))?
                        }
                        _ => return Err(SyntaxError::new(pos, "bad escape sequence")),
                    };
                    s.push(c);
                }
                Some(c) => s.push(c),
            }
        }
    }
}

/// Cursor over a token vector with the usual expect/eat helpers.
pub(crate) struct Tokens {
    toks: Vec<(Token, Pos)>,
    i: usize,
}

impl Tokens {
    pub fn new(src: &str) -> Result<Self, SyntaxError> {
        Ok(Tokens {
            toks: tokenize(src)?,
            i: 0,
        })
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.i].0
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    pub fn next(&mut self) -> (Token, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Token::Eof)
    }

    pub fn is_punct(&self, c: char) -> bool {
        *self.peek() == Token::Punct(c)
    }

    pub fn eat_punct(&mut self, c: char) -> bool {
        if self.is_punct(c) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect_punct(&mut self, c: char) -> Result<Pos, SyntaxError> {
        let (tok, pos) = self.next();
        if tok == Token::Punct(c) {
            Ok(pos)
        } else {
            Err(SyntaxError::new(pos, format!("expected `{c}`, found {tok}")))
        }
    }

    pub fn expect_name(&mut self) -> Result<(String, Pos), SyntaxError> {
        match self.next() {
            (Token::Name(n), pos) => Ok((n, pos)),
            (tok, pos) => Err(SyntaxError::new(pos, format!("expected a name, found {tok}"))),
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<Pos, SyntaxError> {
        match self.next() {
            (Token::Name(n), pos) if n == kw => Ok(pos),
            (tok, pos) => Err(SyntaxError::new(pos, format!("expected `{kw}`, found {tok}"))),
        }
    }
}
