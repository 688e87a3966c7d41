//! Concrete syntax of p-programs: lexer, recursive-descent parser and
//! canonical renderer.
//!
//! ```text
//! p(X,Y) <[1,1],[0,0]> <- e(X,Z), p(Z,Y) ; conj=ind, disj=pc.
//! e(1,2) <[1,1],[0,0]>.
//! @default(conj=ind).
//! ```

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::calculus::Mode;
use crate::lang::{Atom, Constant, DiagCode, Diagnostic, PProgram, PRule, Severity, Term};
use crate::trilattice::{format_probability, ConfidenceLevel};

/// Location of a piece of source text. Offsets are bytes; line and column
/// are 1-based, the column counted in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SourceSpan {
    pub begin: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}:{}: {message}", span.line, span.column)]
pub struct ParseError {
    pub code: DiagCode,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            code: self.code,
            message: self.message.clone(),
            rule: None,
            span: Some(self.span),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    /// Identifier starting with a lowercase letter.
    Lower(String),
    /// Identifier starting with an uppercase letter.
    Upper(String),
    Number { text: String, value: f64, int: Option<i64> },
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Comma,
    Dot,
    Semi,
    Eq,
    Arrow,
    At,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => format!("`{s}`"),
            Tok::Number { text, .. } => format!("number `{text}`"),
            Tok::Str(_) => "string".to_string(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::At => "`@`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn mark(&self) -> SourceSpan {
        SourceSpan {
            begin: self.pos,
            end: self.pos,
            line: self.line,
            column: self.column,
        }
    }

    fn error(&self, start: SourceSpan, code: DiagCode, message: String) -> ParseError {
        ParseError {
            code,
            message,
            span: SourceSpan {
                end: self.pos.max(start.begin),
                ..start
            },
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&f) {
            self.bump();
        }
    }

    fn next_token(&mut self) -> Result<(Tok, SourceSpan), ParseError> {
        self.skip_trivia();
        let start = self.mark();
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, start));
        };
        let single = |tok| Some(tok);
        let punct = match c {
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '[' => single(Tok::LBracket),
            ']' => single(Tok::RBracket),
            '>' => single(Tok::Gt),
            ',' => single(Tok::Comma),
            '.' if !self.peek2().is_some_and(|d| d.is_ascii_digit()) => single(Tok::Dot),
            ';' => single(Tok::Semi),
            '=' => single(Tok::Eq),
            '@' => single(Tok::At),
            _ => None,
        };
        let tok = if let Some(tok) = punct {
            self.bump();
            tok
        } else if c == '<' {
            self.bump();
            if self.peek() == Some('-') && !self.peek2().is_some_and(|d| d.is_ascii_digit() || d == '.') {
                self.bump();
                Tok::Arrow
            } else {
                Tok::Lt
            }
        } else if c.is_ascii_alphabetic() {
            let begin = self.pos;
            self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
            let text = self.src[begin..self.pos].to_string();
            if c.is_ascii_uppercase() {
                Tok::Upper(text)
            } else {
                Tok::Lower(text)
            }
        } else if c == '_' {
            return Err(self.error(
                start,
                DiagCode::Syntax,
                "identifiers must start with a letter".into(),
            ));
        } else if c.is_ascii_digit() || c == '-' || c == '.' {
            self.number(start)?
        } else if c == '\'' {
            self.string(start)?
        } else {
            self.bump();
            return Err(self.error(start, DiagCode::Syntax, format!("unexpected character `{c}`")));
        };
        let span = SourceSpan {
            end: self.pos,
            ..start
        };
        Ok((tok, span))
    }

    fn number(&mut self, start: SourceSpan) -> Result<Tok, ParseError> {
        let begin = self.pos;
        if self.peek() == Some('-') {
            self.bump();
        }
        self.take_while(|c| c.is_ascii_digit());
        if self.peek() == Some('.') && self.peek2().is_some_and(|d| d.is_ascii_digit()) {
            self.bump();
            self.take_while(|c| c.is_ascii_digit());
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = (self.pos, self.line, self.column);
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if self.peek().is_some_and(|d| d.is_ascii_digit()) {
                self.take_while(|c| c.is_ascii_digit());
            } else {
                (self.pos, self.line, self.column) = save;
            }
        }
        let text = &self.src[begin..self.pos];
        let value: f64 = text
            .parse()
            .map_err(|_| self.error(start, DiagCode::Syntax, format!("malformed number `{text}`")))?;
        let int = text.parse::<i64>().ok();
        Ok(Tok::Number {
            text: text.to_string(),
            value,
            int,
        })
    }

    fn string(&mut self, start: SourceSpan) -> Result<Tok, ParseError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => {
                    return Err(self.error(start, DiagCode::Syntax, "unterminated string".into()))
                }
                Some('\'') => return Ok(Tok::Str(out)),
                Some('\\') => match self.bump() {
                    Some(c @ ('\'' | '\\')) => out.push(c),
                    _ => {
                        return Err(self.error(
                            start,
                            DiagCode::Syntax,
                            "only \\' and \\\\ escapes are allowed".into(),
                        ))
                    }
                },
                Some(c) => out.push(c),
            }
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    span: SourceSpan,
    default_conj: Mode,
    default_disj: Mode,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, span) = lexer.next_token()?;
        Ok(Parser {
            lexer,
            tok,
            span,
            default_conj: PRule::DEFAULT_CONJ,
            default_disj: PRule::DEFAULT_DISJ,
        })
    }

    fn advance(&mut self) -> Result<(Tok, SourceSpan), ParseError> {
        let (tok, span) = self.lexer.next_token()?;
        let prev_tok = std::mem::replace(&mut self.tok, tok);
        let prev_span = std::mem::replace(&mut self.span, span);
        Ok((prev_tok, prev_span))
    }

    fn error_here(&self, message: String) -> ParseError {
        ParseError {
            code: DiagCode::Syntax,
            message,
            span: self.span,
        }
    }

    fn expected(&self, what: &str) -> ParseError {
        self.error_here(format!("expected {what}, found {}", self.tok.describe()))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<SourceSpan, ParseError> {
        if self.tok == tok {
            Ok(self.advance()?.1)
        } else {
            Err(self.expected(what))
        }
    }

    fn program(&mut self) -> Result<PProgram, ParseError> {
        let mut rules = Vec::new();
        while self.tok != Tok::Eof {
            if self.tok == Tok::At {
                self.directive()?;
            } else {
                rules.push(self.rule()?);
            }
            self.expect(Tok::Dot, "`.` at end of statement")?;
        }
        Ok(PProgram { rules })
    }

    fn directive(&mut self) -> Result<(), ParseError> {
        self.advance()?;
        match &self.tok {
            Tok::Lower(s) if s == "default" => {
                self.advance()?;
            }
            _ => return Err(self.expected("`default` after `@`")),
        }
        self.expect(Tok::LParen, "`(`")?;
        let mut conj = self.default_conj;
        let mut disj = self.default_disj;
        loop {
            self.modespec(&mut conj, &mut disj)?;
            if self.tok == Tok::Comma {
                self.advance()?;
            } else {
                break;
            }
        }
        self.expect(Tok::RParen, "`)` or `,`")?;
        self.default_conj = conj;
        self.default_disj = disj;
        Ok(())
    }

    fn rule(&mut self) -> Result<PRule, ParseError> {
        let start = self.span;
        let head = self.atom()?;
        let conf = self.conf()?;
        let mut body = Vec::new();
        if self.tok == Tok::Arrow {
            self.advance()?;
            loop {
                body.push(self.atom()?);
                if self.tok == Tok::Comma {
                    self.advance()?;
                } else {
                    break;
                }
            }
        }
        let mut conj = self.default_conj;
        let mut disj = self.default_disj;
        if self.tok == Tok::Semi {
            self.advance()?;
            loop {
                self.modespec(&mut conj, &mut disj)?;
                if self.tok == Tok::Comma {
                    self.advance()?;
                } else {
                    break;
                }
            }
        }
        let span = SourceSpan {
            end: self.lexer.pos.min(self.span.begin).max(start.begin),
            ..start
        };
        Ok(PRule {
            head,
            body,
            conf,
            conj,
            disj,
            span: Some(span),
        })
    }

    fn modespec(&mut self, conj: &mut Mode, disj: &mut Mode) -> Result<(), ParseError> {
        let is_conj = match &self.tok {
            Tok::Lower(s) if s == "conj" => true,
            Tok::Lower(s) if s == "disj" => false,
            _ => return Err(self.expected("`conj` or `disj`")),
        };
        self.advance()?;
        self.expect(Tok::Eq, "`=`")?;
        let mode = match &self.tok {
            Tok::Lower(s) => s
                .parse::<Mode>()
                .map_err(|e| self.error_here(e.to_string()))?,
            _ => return Err(self.expected("a mode (ign, ind, pc, nc, me)")),
        };
        self.advance()?;
        if is_conj {
            *conj = mode;
        } else {
            *disj = mode;
        }
        Ok(())
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let pred = match &self.tok {
            Tok::Lower(s) | Tok::Upper(s) => s.clone(),
            _ => return Err(self.expected("a predicate name")),
        };
        self.advance()?;
        let mut args = Vec::new();
        if self.tok == Tok::LParen {
            self.advance()?;
            loop {
                args.push(self.term()?);
                if self.tok == Tok::Comma {
                    self.advance()?;
                } else {
                    break;
                }
            }
            self.expect(Tok::RParen, "`)` or `,`")?;
        }
        Ok(Atom {
            pred: Arc::from(pred),
            args,
        })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let term = match &self.tok {
            Tok::Upper(s) => Term::Var(Arc::from(s.as_str())),
            Tok::Lower(s) => Term::Const(Constant::Sym(Arc::from(s.as_str()))),
            Tok::Str(s) => Term::Const(Constant::Str(Arc::from(s.as_str()))),
            Tok::Number { int: Some(n), .. } => Term::Const(Constant::Int(*n)),
            Tok::Number { text, .. } => {
                return Err(self.error_here(format!("term `{text}` is not an integer")))
            }
            _ => return Err(self.expected("a term")),
        };
        self.advance()?;
        Ok(term)
    }

    fn probability(&mut self) -> Result<f64, ParseError> {
        match &self.tok {
            Tok::Number { value, text, .. } => {
                if !(0.0..=1.0).contains(value) {
                    return Err(ParseError {
                        code: DiagCode::ValueRange,
                        message: format!("probability {text} is outside [0,1]"),
                        span: self.span,
                    });
                }
                let v = *value;
                self.advance()?;
                Ok(v)
            }
            _ => Err(self.expected("a probability")),
        }
    }

    fn interval(&mut self, name: &str) -> Result<(f64, f64), ParseError> {
        let start = self.expect(Tok::LBracket, "`[`")?;
        let lo = self.probability()?;
        self.expect(Tok::Comma, "`,`")?;
        let hi = self.probability()?;
        let end = self.expect(Tok::RBracket, "`]`")?;
        if lo > hi {
            return Err(ParseError {
                code: DiagCode::EmptyInterval,
                message: format!("{name} interval empty: lower bound {lo} exceeds upper bound {hi}"),
                span: SourceSpan {
                    end: end.end,
                    ..start
                },
            });
        }
        Ok((lo, hi))
    }

    fn conf(&mut self) -> Result<ConfidenceLevel, ParseError> {
        let start = self.expect(Tok::Lt, "a confidence level `<[..],[..]>`")?;
        let (a, b) = self.interval("belief")?;
        self.expect(Tok::Comma, "`,`")?;
        let (g, d) = self.interval("doubt")?;
        self.expect(Tok::Gt, "`>`")?;
        ConfidenceLevel::new(a, b, g, d).map_err(|e| ParseError {
            code: DiagCode::ValueRange,
            message: e.to_string(),
            span: start,
        })
    }
}

pub fn parse_program(text: &str) -> Result<PProgram, ParseError> {
    Parser::new(text)?.program()
}

/// Parses a single atom, optionally followed by `.`.
pub fn parse_query(text: &str) -> Result<Atom, ParseError> {
    let mut p = Parser::new(text)?;
    let atom = p.atom()?;
    if p.tok == Tok::Dot {
        p.advance()?;
    }
    if p.tok != Tok::Eof {
        return Err(p.expected("end of query"));
    }
    Ok(atom)
}

/// Shortest decimal text that parses back to `x`, preferring six
/// significant digits whenever those are exact.
pub fn format_exact(x: f64) -> String {
    let short = format_probability(x);
    if short.parse::<f64>().ok() == Some(x) {
        short
    } else {
        format!("{x}")
    }
}

pub fn render_confidence(c: &ConfidenceLevel) -> String {
    format!(
        "<[{},{}],[{},{}]>",
        format_exact(c.alpha()),
        format_exact(c.beta()),
        format_exact(c.gamma()),
        format_exact(c.delta())
    )
}

pub fn render_rule(rule: &PRule) -> String {
    let mut s = format!("{} {}", rule.head, render_confidence(&rule.conf));
    if !rule.body.is_empty() {
        s.push_str(" <- ");
        for (i, a) in rule.body.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "{a}");
        }
    }
    let mut modes = Vec::new();
    if rule.conj != PRule::DEFAULT_CONJ {
        modes.push(format!("conj={}", rule.conj));
    }
    if rule.disj != PRule::DEFAULT_DISJ {
        modes.push(format!("disj={}", rule.disj));
    }
    if !modes.is_empty() {
        s.push_str(" ; ");
        s.push_str(&modes.join(", "));
    }
    s.push('.');
    s
}

/// Canonical text: one rule per line in program order, modes spelled out
/// only where they differ from `conj=ign, disj=pc`.
pub fn render(program: &PProgram) -> String {
    let mut out = String::new();
    for rule in &program.rules {
        out.push_str(&render_rule(rule));
        out.push('\n');
    }
    out
}
