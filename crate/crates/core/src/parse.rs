//! Parsers for the ASCII surface syntax: formulas (`.ielf`), terms
//! (`.ielt`), Hilbert proofs (`.ielh`) and Kripke models (`.kr`).
//!
//! `--` starts a comment that runs to the end of the line in every format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::hilbert::{AxiomScheme, HilbertProof, Instantiation, Justification, Line, Meta};
use crate::kripke::KripkeModel;
use crate::syntax::{Binding, Context, Formula, Name, Term};

/// Byte offsets `start..end` into the parsed input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> SourceSpan {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at bytes {span}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    /// Tokens that would have been accepted at `span`; empty when the error
    /// is not about an unexpected token.
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected one of: {})", expected.join(", "))
    }
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>) -> ParseError {
        ParseError {
            span,
            message: message.into(),
            expected: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    Arrow,
    And,
    Or,
    Tilde,
    BoxOp,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Lt,
    Gt,
    Le,
    Comma,
    Dot,
    Colon,
    Assign,
    Eq,
    Backslash,
    LBrace,
    RBrace,
    Bar,
    Semi,
    At,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Num(n) => return write!(f, "`{n}`"),
            Tok::Arrow => "`->`",
            Tok::And => "`/\\`",
            Tok::Or => "`\\/`",
            Tok::Tilde => "`~`",
            Tok::BoxOp => "`[]`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Le => "`<=`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Colon => "`:`",
            Tok::Assign => "`:=`",
            Tok::Eq => "`=`",
            Tok::Backslash => "`\\`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Bar => "`|`",
            Tok::Semi => "`;`",
            Tok::At => "`@`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits `src` into tokens. Offsets are shifted by `base` so that spans
/// point into the original file when a single line is lexed.
fn lex(src: &str, base: usize) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let span = |a: usize, b: usize| SourceSpan::new(base + a, base + b);
    while i < bytes.len() {
        let c = bytes[i] as char;
        let next = bytes.get(i + 1).map(|&b| b as char);
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' && next == Some('-') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let two = |tok: Tok| (tok, 2);
        let one = |tok: Tok| (tok, 1);
        let (tok, len) = match (c, next) {
            ('-', Some('>')) => two(Tok::Arrow),
            ('/', Some('\\')) => two(Tok::And),
            ('\\', Some('/')) => two(Tok::Or),
            ('\\', _) => one(Tok::Backslash),
            ('[', Some(']')) => two(Tok::BoxOp),
            ('[', _) => one(Tok::LBrack),
            (']', _) => one(Tok::RBrack),
            ('(', _) => one(Tok::LParen),
            (')', _) => one(Tok::RParen),
            ('<', Some('=')) => two(Tok::Le),
            ('<', _) => one(Tok::Lt),
            ('>', _) => one(Tok::Gt),
            (',', _) => one(Tok::Comma),
            ('.', _) => one(Tok::Dot),
            (':', Some('=')) => two(Tok::Assign),
            (':', _) => one(Tok::Colon),
            ('=', _) => one(Tok::Eq),
            ('~', _) => one(Tok::Tilde),
            ('{', _) => one(Tok::LBrace),
            ('}', _) => one(Tok::RBrace),
            ('|', _) => one(Tok::Bar),
            (';', _) => one(Tok::Semi),
            ('@', _) => one(Tok::At),
            (c, _) if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let n = text
                    .parse()
                    .map_err(|_| ParseError::new(span(start, i), "number too large"))?;
                out.push((Tok::Num(n), span(start, i)));
                continue;
            }
            (c, _) if is_ident_start(c) => {
                let start = i;
                while i < bytes.len() && is_ident_char(bytes[i] as char) {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), span(start, i)));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::new(
                    span(i, i + ch.len_utf8()),
                    format!("unexpected character `{ch}`"),
                ));
            }
        };
        out.push((tok, span(i, i + len)));
        i += len;
    }
    out.push((Tok::Eof, span(bytes.len(), bytes.len())));
    Ok(out)
}

const TERM_KEYWORDS: &[&str] = &[
    "fst", "snd", "inl", "inr", "case", "of", "abort", "triv", "box", "in",
];

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn new(src: &str, base: usize) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(src, base)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError {
            span: self.span(),
            message: format!("unexpected {}", self.peek()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&[&tok.to_string()]))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{kw}`")]))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&["end of input"]))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().1;
                Ok((s, span))
            }
            _ => Err(self.unexpected(&[what])),
        }
    }

    fn number(&mut self) -> Result<(usize, SourceSpan), ParseError> {
        match *self.peek() {
            Tok::Num(n) => {
                let span = self.bump().1;
                Ok((n, span))
            }
            _ => Err(self.unexpected(&["a number"])),
        }
    }

    // formula := disj ('->' formula)?
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conj()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conj()?;
            acc = Formula::disj(acc, rhs);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.prefix()?;
        while self.eat(&Tok::And) {
            let rhs = self.prefix()?;
            acc = Formula::conj(acc, rhs);
        }
        Ok(acc)
    }

    fn prefix(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::neg(self.prefix()?))
            }
            Tok::BoxOp => {
                self.bump();
                Ok(Formula::boxed(self.prefix()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "Top" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(s) if s == "Bot" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Ident(s) if s.starts_with(|c: char| c.is_ascii_lowercase()) => {
                self.bump();
                Ok(Formula::Atom(s.as_str().into()))
            }
            Tok::Ident(s) => Err(ParseError {
                span: self.span(),
                message: format!("`{s}` is not an atom; atoms are lowercase identifiers"),
                expected: vec!["an atom".into()],
            }),
            _ => Err(self.unexpected(&["an atom", "`Top`", "`Bot`", "`~`", "`[]`", "`(`"])),
        }
    }

    fn variable(&mut self) -> Result<Name, ParseError> {
        let (name, span) = self.ident("a variable")?;
        if TERM_KEYWORDS.contains(&name.as_str()) {
            return Err(ParseError {
                span,
                message: format!("keyword `{name}` cannot be used as a variable"),
                expected: vec!["a variable".into()],
            });
        }
        Ok(name.as_str().into())
    }

    // term := '\' x ':' F '.' term | 'box' binders 'in' term | app
    fn term(&mut self) -> Result<Term, ParseError> {
        if let Some(t) = self.binder_form()? {
            return Ok(t);
        }
        self.application()
    }

    fn binder_form(&mut self) -> Result<Option<Term>, ParseError> {
        if self.eat(&Tok::Backslash) {
            let x = self.variable()?;
            self.expect(Tok::Colon)?;
            let a = self.formula()?;
            self.expect(Tok::Dot)?;
            let body = self.term()?;
            return Ok(Some(Term::Lam(x, a, Box::new(body))));
        }
        if self.is_keyword("box") {
            self.bump();
            let bindings = self.box_bindings()?;
            self.expect_keyword("in")?;
            let body = self.term()?;
            return Ok(Some(Term::BoxIntro(bindings, Box::new(body))));
        }
        Ok(None)
    }

    fn box_bindings(&mut self) -> Result<Vec<Binding>, ParseError> {
        if self.eat(&Tok::BoxOp) {
            return Ok(Vec::new());
        }
        self.expect(Tok::LBrack)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RBrack) {
            return Ok(out);
        }
        loop {
            let var = self.variable()?;
            self.expect(Tok::Colon)?;
            let annot = self.formula()?;
            self.expect(Tok::Eq)?;
            let arg = self.term()?;
            out.push(Binding { var, annot, arg });
            if self.eat(&Tok::Comma) {
                continue;
            }
            if self.eat(&Tok::RBrack) {
                return Ok(out);
            }
            return Err(self.unexpected(&["`,`", "`]`"]));
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::LParen | Tok::Lt => true,
            Tok::Ident(s) => s == "case" || !TERM_KEYWORDS.contains(&s.as_str()),
            _ => false,
        }
    }

    // app := head atom* (lambda | box)?
    fn application(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.head()?;
        loop {
            if self.starts_atom() {
                let arg = self.atom()?;
                acc = Term::app(acc, arg);
            } else if let Some(arg) = self.binder_form()? {
                return Ok(Term::app(acc, arg));
            } else {
                return Ok(acc);
            }
        }
    }

    fn annotation(&mut self) -> Result<Formula, ParseError> {
        self.expect(Tok::LBrack)?;
        let f = self.formula()?;
        self.expect(Tok::RBrack)?;
        Ok(f)
    }

    fn head(&mut self) -> Result<Term, ParseError> {
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.atom(),
        };
        match kw.as_str() {
            "fst" | "snd" | "triv" => {
                self.bump();
                let arg = self.atom()?;
                Ok(match kw.as_str() {
                    "fst" => Term::proj1(arg),
                    "snd" => Term::proj2(arg),
                    _ => Term::triv(arg),
                })
            }
            "inl" | "inr" | "abort" => {
                self.bump();
                let annot = self.annotation()?;
                let arg = self.atom()?;
                Ok(match kw.as_str() {
                    "inl" => Term::inj1(annot, arg),
                    "inr" => Term::inj2(annot, arg),
                    _ => Term::exfalso(annot, arg),
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Lt => {
                self.bump();
                let a = self.term()?;
                self.expect(Tok::Comma)?;
                let b = self.term()?;
                self.expect(Tok::Gt)?;
                Ok(Term::pair(a, b))
            }
            Tok::Ident(s) if s == "case" => {
                self.bump();
                let scrut = self.term()?;
                self.expect_keyword("of")?;
                self.expect(Tok::LBrace)?;
                self.expect_keyword("inl")?;
                let x = self.variable()?;
                self.expect(Tok::Arrow)?;
                let u = self.term()?;
                self.expect(Tok::Bar)?;
                self.expect_keyword("inr")?;
                let y = self.variable()?;
                self.expect(Tok::Arrow)?;
                let v = self.term()?;
                self.expect(Tok::RBrace)?;
                Ok(Term::Case(Box::new(scrut), x, Box::new(u), y, Box::new(v)))
            }
            Tok::Ident(_) => Ok(Term::Var(self.variable()?)),
            _ => Err(self.unexpected(&["a variable", "`(`", "`<`", "`case`", "`\\`", "`box`"])),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, 0)?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, 0)?;
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parses a context written `x:F, y:G`; the empty string is the empty
/// context.
pub fn parse_context(text: &str) -> Result<Context, ParseError> {
    let mut p = Parser::new(text, 0)?;
    let mut ctx = Context::new();
    if *p.peek() == Tok::Eof {
        return Ok(ctx);
    }
    loop {
        let span = p.span();
        let x = p.variable()?;
        p.expect(Tok::Colon)?;
        let f = p.formula()?;
        ctx.push(&x, f)
            .map_err(|e| ParseError::new(span, e.to_string()))?;
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.expect_end()?;
    Ok(ctx)
}

/// Non-blank lines of `src` with their byte offsets, comments left in place
/// for the lexer to drop.
fn lines_with_offsets(src: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0;
    src.split('\n').map(move |line| {
        let start = offset;
        offset += line.len() + 1;
        (start, line)
    })
}

fn parse_scheme(p: &mut Parser) -> Result<AxiomScheme, ParseError> {
    let (id, span) = p.ident("an axiom scheme")?;
    AxiomScheme::from_id(&id).ok_or_else(|| ParseError {
        span,
        message: format!("unknown axiom scheme `{id}`"),
        expected: AxiomScheme::ALL.iter().map(|s| s.id().to_string()).collect(),
    })
}

fn parse_instantiation(p: &mut Parser) -> Result<Instantiation, ParseError> {
    let mut inst = Instantiation::new();
    if !p.eat(&Tok::LBrace) {
        return Ok(inst);
    }
    if p.eat(&Tok::RBrace) {
        return Ok(inst);
    }
    loop {
        let (name, span) = p.ident("a metavariable")?;
        let meta = Meta::from_name(&name).ok_or_else(|| ParseError {
            span,
            message: format!("unknown metavariable `{name}`"),
            expected: vec!["A".into(), "B".into(), "C".into()],
        })?;
        p.expect(Tok::Assign)?;
        let f = p.formula()?;
        if inst.get(meta).is_some() {
            return Err(ParseError::new(span, format!("metavariable `{name}` assigned twice")));
        }
        inst.set(meta, f);
        if p.eat(&Tok::Comma) {
            continue;
        }
        p.expect(Tok::RBrace)?;
        return Ok(inst);
    }
}

/// Parses the `.ielh` format:
///
/// ```text
/// hyps: p; q
/// 1. p hyp 1
/// 2. p -> []p ax CR {A := p}
/// 3. []p mp 2 1
/// ```
pub fn parse_hilbert(src: &str) -> Result<HilbertProof, ParseError> {
    let mut hyps = Vec::new();
    let mut lines = Vec::new();
    let mut seen_hyps = false;
    for (offset, text) in lines_with_offsets(src) {
        let mut p = Parser::new(text, offset)?;
        if *p.peek() == Tok::Eof {
            continue;
        }
        if matches!(p.peek(), Tok::Ident(s) if s == "hyps") && *p.peek_at(1) == Tok::Colon {
            if seen_hyps || !lines.is_empty() {
                return Err(ParseError::new(
                    p.span(),
                    "the `hyps:` header must come once, before the first line",
                ));
            }
            seen_hyps = true;
            p.bump();
            p.bump();
            if *p.peek() != Tok::Eof {
                loop {
                    hyps.push(p.formula()?);
                    if !p.eat(&Tok::Semi) {
                        break;
                    }
                }
            }
            p.expect_end()?;
            continue;
        }
        let (n, span) = p.number()?;
        if n != lines.len() + 1 {
            return Err(ParseError::new(
                span,
                format!("expected line number {}, found {n}", lines.len() + 1),
            ));
        }
        p.expect(Tok::Dot)?;
        let formula = p.formula()?;
        let (kw, kw_span) = p.ident("`hyp`, `ax` or `mp`")?;
        let just = match kw.as_str() {
            "hyp" => Justification::Hyp(p.number()?.0),
            "mp" => {
                let m = p.number()?.0;
                let k = p.number()?.0;
                Justification::Mp(m, k)
            }
            "ax" => {
                let scheme = parse_scheme(&mut p)?;
                let inst = parse_instantiation(&mut p)?;
                Justification::Axiom(scheme, inst)
            }
            _ => {
                return Err(ParseError {
                    span: kw_span,
                    message: format!("unknown justification `{kw}`"),
                    expected: vec!["`hyp`".into(), "`ax`".into(), "`mp`".into()],
                })
            }
        };
        p.expect_end()?;
        lines.push(Line { formula, just });
    }
    Ok(HilbertProof { hyps, lines })
}

/// Parses the `.kr` format:
///
/// ```text
/// worlds: w0 w1
/// le: w0 <= w1
/// E: w0 E w1, w1 E w1
/// val: p @ w1
/// ```
///
/// `le` lists generators; the preorder is their reflexive-transitive closure.
pub fn parse_model(src: &str) -> Result<KripkeModel, ParseError> {
    let mut worlds: Option<Vec<Name>> = None;
    let mut le_raw: Vec<(String, SourceSpan, String, SourceSpan)> = Vec::new();
    let mut e_raw: Vec<(String, SourceSpan, String, SourceSpan)> = Vec::new();
    let mut val_raw: Vec<(String, SourceSpan, Vec<(String, SourceSpan)>)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut end = 0;
    for (offset, text) in lines_with_offsets(src) {
        end = offset + text.len();
        let mut p = Parser::new(text, offset)?;
        if *p.peek() == Tok::Eof {
            continue;
        }
        let (key, key_span) = p.ident("`worlds`, `le`, `E` or `val`")?;
        p.expect(Tok::Colon)?;
        if !seen.insert(key.clone()) {
            return Err(ParseError::new(key_span, format!("section `{key}` given twice")));
        }
        match key.as_str() {
            "worlds" => {
                let mut names = Vec::new();
                while *p.peek() != Tok::Eof {
                    let (w, span) = p.ident("a world name")?;
                    if names.iter().any(|n: &Name| **n == *w) {
                        return Err(ParseError::new(span, format!("world `{w}` declared twice")));
                    }
                    names.push(w.as_str().into());
                }
                worlds = Some(names);
            }
            "le" | "E" => {
                let sep = if key == "le" { Tok::Le } else { Tok::Ident("E".into()) };
                if *p.peek() != Tok::Eof {
                    loop {
                        let (a, sa) = p.ident("a world name")?;
                        if *p.peek() != sep {
                            return Err(p.unexpected(&[&sep.to_string()]));
                        }
                        p.bump();
                        let (b, sb) = p.ident("a world name")?;
                        let target = if key == "le" { &mut le_raw } else { &mut e_raw };
                        target.push((a, sa, b, sb));
                        if !p.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
            }
            "val" => {
                if *p.peek() != Tok::Eof {
                    loop {
                        let (atom, span) = p.ident("an atom")?;
                        p.expect(Tok::At)?;
                        let mut ws = Vec::new();
                        while let Tok::Ident(_) = p.peek() {
                            ws.push(p.ident("a world name")?);
                        }
                        val_raw.push((atom, span, ws));
                        if !p.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
            }
            _ => {
                return Err(ParseError {
                    span: key_span,
                    message: format!("unknown section `{key}`"),
                    expected: vec!["`worlds`".into(), "`le`".into(), "`E`".into(), "`val`".into()],
                })
            }
        }
        p.expect_end()?;
    }
    let worlds = worlds.ok_or_else(|| {
        ParseError::new(SourceSpan::new(end, end), "missing `worlds:` section")
    })?;
    let index = |w: &str, span: SourceSpan| {
        worlds
            .iter()
            .position(|n| **n == *w)
            .ok_or_else(|| ParseError::new(span, format!("unknown world `{w}`")))
    };
    let mut le = BTreeSet::new();
    for (a, sa, b, sb) in &le_raw {
        le.insert((index(a, *sa)?, index(b, *sb)?));
    }
    let mut e = BTreeSet::new();
    for (a, sa, b, sb) in &e_raw {
        e.insert((index(a, *sa)?, index(b, *sb)?));
    }
    let mut val: BTreeMap<Name, BTreeSet<usize>> = BTreeMap::new();
    for (atom, span, ws) in &val_raw {
        if !atom.starts_with(|c: char| c.is_ascii_lowercase()) {
            return Err(ParseError::new(*span, format!("`{atom}` is not an atom")));
        }
        let entry = val.entry(atom.as_str().into()).or_default();
        for (w, ws_span) in ws {
            entry.insert(index(w, *ws_span)?);
        }
    }
    KripkeModel::new(worlds, le, e, val)
        .map_err(|err| ParseError::new(SourceSpan::new(0, end), err.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(
            parse_formula("p -> q -> p").unwrap(),
            Formula::imp(p(), Formula::imp(q(), p()))
        );
    }

    #[test]
    fn k_scheme_formula() {
        let k = parse_formula("[](p -> q) -> []p -> []q").unwrap();
        let expected = Formula::imp(
            Formula::boxed(Formula::imp(p(), q())),
            Formula::imp(Formula::boxed(p()), Formula::boxed(q())),
        );
        assert_eq!(k, expected);
    }

    #[test]
    fn negation_desugars() {
        assert_eq!(
            parse_formula("~[]Bot").unwrap(),
            Formula::imp(Formula::boxed(Formula::Bot), Formula::Bot)
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse_formula("p /\\ q \\/ p -> q").unwrap(),
            Formula::imp(Formula::disj(Formula::conj(p(), q()), p()), q())
        );
        assert_eq!(
            parse_formula("p /\\ q /\\ p").unwrap(),
            Formula::conj(Formula::conj(p(), q()), p())
        );
        assert_eq!(
            parse_formula("p \\/ q \\/ p").unwrap(),
            Formula::disj(Formula::disj(p(), q()), p())
        );
        assert_eq!(
            parse_formula("[]p /\\ ~q").unwrap(),
            Formula::conj(Formula::boxed(p()), Formula::neg(q()))
        );
    }

    #[test]
    fn formula_errors_carry_spans() {
        let err = parse_formula("p -> (q").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(7, 7));
        assert!(err.expected.contains(&"`)`".to_string()));
        let err = parse_formula("p -> Q").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(5, 6));
        let err = parse_formula("p q").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(2, 3));
        let err = parse_formula("p ∧ q").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(2, 5));
    }

    #[test]
    fn co_reflection_term() {
        let t = parse_term("\\x:p. box [] in x").unwrap();
        assert_eq!(t, Term::lam("x", p(), Term::boxed(vec![], Term::var("x"))));
    }

    #[test]
    fn k_body_term() {
        let t = parse_term("box [g:p->q = f, x:p = a] in g x").unwrap();
        let expected = Term::boxed(
            vec![
                Binding::new("g", Formula::imp(p(), q()), Term::var("f")),
                Binding::new("x", p(), Term::var("a")),
            ],
            Term::app(Term::var("g"), Term::var("x")),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn projection_of_pair() {
        assert_eq!(
            parse_term("fst <x, y>").unwrap(),
            Term::proj1(Term::pair(Term::var("x"), Term::var("y")))
        );
    }

    #[test]
    fn application_is_left_associative() {
        assert_eq!(
            parse_term("f x y").unwrap(),
            Term::app(Term::app(Term::var("f"), Term::var("x")), Term::var("y"))
        );
        assert_eq!(
            parse_term("fst x y").unwrap(),
            Term::app(Term::proj1(Term::var("x")), Term::var("y"))
        );
    }

    #[test]
    fn lambda_body_extends_right() {
        assert_eq!(
            parse_term("\\x:p. x y").unwrap(),
            Term::lam("x", p(), Term::app(Term::var("x"), Term::var("y")))
        );
        assert_eq!(
            parse_term("f \\x:p. x").unwrap(),
            Term::app(Term::var("f"), Term::lam("x", p(), Term::var("x")))
        );
    }

    #[test]
    fn case_and_injections() {
        let t = parse_term("case d of { inl a -> inr[q \\/ p] a | inr b -> inl[q\\/p] b }").unwrap();
        let sum = Formula::disj(q(), p());
        let expected = Term::case(
            Term::var("d"),
            "a",
            Term::inj2(sum.clone(), Term::var("a")),
            "b",
            Term::inj1(sum, Term::var("b")),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn box_annotation_with_box_formula() {
        let t = parse_term("inl[[]p \\/ q] x").unwrap();
        assert_eq!(
            t,
            Term::inj1(Formula::disj(Formula::boxed(p()), q()), Term::var("x"))
        );
        let t = parse_term("box [ ] in triv(\\x:Bot. x)").unwrap();
        assert_eq!(
            t,
            Term::boxed(vec![], Term::triv(Term::lam("x", Formula::Bot, Term::var("x"))))
        );
    }

    #[test]
    fn keywords_are_not_variables() {
        let err = parse_term("\\in:p. in").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(1, 3));
    }

    #[test]
    fn comments_are_skipped() {
        let t = parse_term("-- identity\n\\x:p. -- body follows\n x\n").unwrap();
        assert_eq!(t, Term::lam("x", p(), Term::var("x")));
    }

    #[test]
    fn context_syntax() {
        let ctx = parse_context("x:p, f:[]p -> q").unwrap();
        assert_eq!(ctx.lookup("f"), Some(&Formula::imp(Formula::boxed(p()), q())));
        assert!(parse_context("").unwrap().is_empty());
        assert!(parse_context("x:p, x:q").is_err());
    }

    #[test]
    fn hilbert_file() {
        let src = "-- box p from p\nhyps: p\n1. p hyp 1\n2. p -> []p ax CR {A := p}\n3. []p mp 2 1\n";
        let proof = parse_hilbert(src).unwrap();
        assert_eq!(proof.hyps, vec![p()]);
        assert_eq!(proof.lines.len(), 3);
        assert_eq!(proof.lines[2].just, Justification::Mp(2, 1));
        assert_eq!(proof.to_string(), "hyps: p\n1. p hyp 1\n2. p -> []p ax CR {A := p}\n3. []p mp 2 1\n");
    }

    #[test]
    fn hilbert_errors() {
        let err = parse_hilbert("1. p hyp 1\n3. p hyp 1\n").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(11, 12));
        let err = parse_hilbert("1. p ax Z9\n").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(8, 10));
        assert!(parse_hilbert("1. Top ax A10\n").is_ok());
    }

    #[test]
    fn model_file() {
        let src = "worlds: w0 w1\nle: w0 <= w1\nE: w0 E w1, w1 E w1\nval: p @ w1\n";
        let m = parse_model(src).unwrap();
        assert_eq!(m.worlds().len(), 2);
        assert!(m.le(0, 1) && !m.le(1, 0) && m.le(1, 1));
        assert!(m.e(0, 1) && m.e(1, 1) && !m.e(0, 0));
        assert_eq!(m.to_string(), src);
    }

    #[test]
    fn model_errors() {
        let err = parse_model("worlds: w0\nle: w0 <= w9\n").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(21, 23));
        assert!(parse_model("le: \n").is_err());
        assert!(parse_model("worlds: a a\n").is_err());
    }
}
