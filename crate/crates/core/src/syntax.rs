//! Abstract syntax of IMP, a parser for its concrete syntax and a printer.
//!
//! Grammar (tightest binding first):
//!
//! ```text
//! stmt  ::= simple (";" stmt)?
//! simple::= "skip" | "fail" | VAR "=" aexpr | "(" stmt ")"
//!         | "while" bexpr "do" stmt "od"
//!         | "if" bexpr "then" stmt "else" stmt "fi"
//! bexpr ::= conj ("or" conj)*
//! conj  ::= neg ("and" neg)*
//! neg   ::= "not" neg | "true" | "false" | "(" bexpr ")" | aexpr CMP aexpr
//! aexpr ::= atom (("+" | "-") atom)*
//! atom  ::= INT | VAR | "(" aexpr ")" | "-" atom
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

/// Variable identifier. Cheap to clone.
pub type Ident = Arc<str>;

pub const RESERVED: &[&str] =
    &["skip", "fail", "while", "do", "od", "if", "then", "else", "fi", "true", "false", "and", "or", "not"];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

/// Arithmetic expressions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Aexpr {
    Int(BigInt),
    Var(Ident),
    Add(Arc<Aexpr>, Arc<Aexpr>),
    Sub(Arc<Aexpr>, Arc<Aexpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Le,
    Lt,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn holds<T: Ord>(self, left: &T, right: &T) -> bool {
        match self {
            CmpOp::Eq => left == right,
            CmpOp::Le => left <= right,
            CmpOp::Lt => left < right,
            CmpOp::Ge => left >= right,
            CmpOp::Gt => left > right,
        }
    }
}

/// Boolean expressions. Path conditions are ordinary `Bexpr` values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bexpr {
    True,
    False,
    And(Arc<Bexpr>, Arc<Bexpr>),
    Or(Arc<Bexpr>, Arc<Bexpr>),
    Not(Arc<Bexpr>),
    Cmp(CmpOp, Aexpr, Aexpr),
}

/// Statements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stmt {
    Skip,
    Fail,
    Assign(Ident, Aexpr),
    Seq(Arc<Stmt>, Arc<Stmt>),
    While(Bexpr, Arc<Stmt>),
    If(Bexpr, Arc<Stmt>, Arc<Stmt>),
}

#[allow(clippy::should_implement_trait)]
impl Aexpr {
    pub fn int(value: impl Into<BigInt>) -> Self {
        Aexpr::Int(value.into())
    }

    pub fn var(name: &str) -> Self {
        Aexpr::Var(Ident::from(name))
    }

    pub fn add(left: Aexpr, right: Aexpr) -> Self {
        Aexpr::Add(Arc::new(left), Arc::new(right))
    }

    pub fn sub(left: Aexpr, right: Aexpr) -> Self {
        Aexpr::Sub(Arc::new(left), Arc::new(right))
    }

    /// Pushes every variable occurring in the expression onto `out`.
    pub fn collect_vars(&self, out: &mut std::collections::BTreeSet<Ident>) {
        match self {
            Aexpr::Int(_) => {}
            Aexpr::Var(x) => {
                out.insert(x.clone());
            }
            Aexpr::Add(l, r) | Aexpr::Sub(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

impl Bexpr {
    pub fn and(left: Bexpr, right: Bexpr) -> Self {
        Bexpr::And(Arc::new(left), Arc::new(right))
    }

    pub fn or(left: Bexpr, right: Bexpr) -> Self {
        Bexpr::Or(Arc::new(left), Arc::new(right))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Bexpr) -> Self {
        Bexpr::Not(Arc::new(inner))
    }

    pub fn cmp(op: CmpOp, left: Aexpr, right: Aexpr) -> Self {
        Bexpr::Cmp(op, left, right)
    }

    pub fn collect_vars(&self, out: &mut std::collections::BTreeSet<Ident>) {
        match self {
            Bexpr::True | Bexpr::False => {}
            Bexpr::And(l, r) | Bexpr::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Bexpr::Not(b) => b.collect_vars(out),
            Bexpr::Cmp(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Free variables in sorted order.
    pub fn vars(&self) -> std::collections::BTreeSet<Ident> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

impl Stmt {
    pub fn assign(var: &str, rhs: Aexpr) -> Self {
        Stmt::Assign(Ident::from(var), rhs)
    }

    pub fn seq(first: Stmt, second: Stmt) -> Self {
        Stmt::Seq(Arc::new(first), Arc::new(second))
    }

    pub fn while_do(cond: Bexpr, body: Stmt) -> Self {
        Stmt::While(cond, Arc::new(body))
    }

    pub fn if_then_else(cond: Bexpr, then: Stmt, otherwise: Stmt) -> Self {
        Stmt::If(cond, Arc::new(then), Arc::new(otherwise))
    }

    pub fn collect_vars(&self, out: &mut std::collections::BTreeSet<Ident>) {
        match self {
            Stmt::Skip | Stmt::Fail => {}
            Stmt::Assign(x, e) => {
                out.insert(x.clone());
                e.collect_vars(out);
            }
            Stmt::Seq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Stmt::While(c, body) => {
                c.collect_vars(out);
                body.collect_vars(out);
            }
            Stmt::If(c, a, b) => {
                c.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Ident> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

// ---------------------------------------------------------------------------
// Printing

impl fmt::Display for Aexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Negative literals have no surface syntax of their own.
            Aexpr::Int(n) if n.is_negative() => write!(f, "(0 - {})", n.abs()),
            Aexpr::Int(n) => write!(f, "{n}"),
            Aexpr::Var(x) => write!(f, "{x}"),
            Aexpr::Add(l, r) | Aexpr::Sub(l, r) => {
                let op = if matches!(self, Aexpr::Add(..)) { "+" } else { "-" };
                write!(f, "{l} {op} ")?;
                if matches!(**r, Aexpr::Add(..) | Aexpr::Sub(..)) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Bexpr {
    /// 0 = or, 1 = and, 2 = not / atom.
    fn level(&self) -> u8 {
        match self {
            Bexpr::Or(..) => 0,
            Bexpr::And(..) => 1,
            _ => 2,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Bexpr::True => f.write_str("true"),
            Bexpr::False => f.write_str("false"),
            Bexpr::Or(l, r) => {
                l.fmt_at(f, 0)?;
                f.write_str(" or ")?;
                r.fmt_at(f, 1)
            }
            Bexpr::And(l, r) => {
                l.fmt_at(f, 1)?;
                f.write_str(" and ")?;
                r.fmt_at(f, 2)
            }
            Bexpr::Not(b) => {
                f.write_str("not ")?;
                b.fmt_at(f, 2)
            }
            Bexpr::Cmp(op, l, r) => write!(f, "{l} {op} {r}"),
        }
    }
}

impl fmt::Display for Bexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl Stmt {
    fn fmt_stmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Skip => f.write_str("skip"),
            Stmt::Fail => f.write_str("fail"),
            Stmt::Assign(x, e) => write!(f, "{x} = {e}"),
            Stmt::Seq(a, b) => {
                if matches!(**a, Stmt::Seq(..)) {
                    write!(f, "(")?;
                    a.fmt_stmt(f)?;
                    write!(f, ")")?;
                } else {
                    a.fmt_stmt(f)?;
                }
                f.write_str(" ; ")?;
                b.fmt_stmt(f)
            }
            Stmt::While(c, body) => {
                write!(f, "while {c} do ")?;
                body.fmt_stmt(f)?;
                f.write_str(" od")
            }
            Stmt::If(c, a, b) => {
                write!(f, "if {c} then ")?;
                a.fmt_stmt(f)?;
                f.write_str(" else ")?;
                b.fmt_stmt(f)?;
                f.write_str(" fi")
            }
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_stmt(f)
    }
}

/// Renders a statement on a single line in concrete syntax.
pub fn pretty(s: &Stmt) -> String {
    s.to_string()
}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(Ident),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer `{n}`"),
            Tok::Ident(x) => write!(f, "identifier `{x}`"),
            Tok::Kw(k) => write!(f, "`{k}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const SYMBOLS: &[&str] = &["==", "<=", ">=", "<", ">", "=", "+", "-", ";", "(", ")"];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += i - start;
            let value = digits.parse::<BigInt>().expect("digit run parses");
            tokens.push(Token { tok: Tok::Int(value), line: start_line, column: start_col });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match RESERVED.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(Ident::from(word.as_str())),
            };
            tokens.push(Token { tok, line: start_line, column: start_col });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                i += sym.len();
                col += sym.len();
                tokens.push(Token { tok: Tok::Sym(sym), line: start_line, column: start_col });
            }
            None => return Err(ParseError { line, column: col, message: format!("unexpected character `{c}`") }),
        }
    }
    tokens.push(Token { tok: Tok::Eof, line, column: col });
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// Parsing

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

fn cmp_op(tok: &Tok) -> Option<CmpOp> {
    match tok {
        Tok::Sym("==") => Some(CmpOp::Eq),
        Tok::Sym("<=") => Some(CmpOp::Le),
        Tok::Sym("<") => Some(CmpOp::Lt),
        Tok::Sym(">=") => Some(CmpOp::Ge),
        Tok::Sym(">") => Some(CmpOp::Gt),
        _ => None,
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn advance(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error_here(&self, message: String) -> ParseError {
        let t = &self.tokens[self.pos];
        ParseError { line: t.line, column: t.column, message }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error_here(format!("expected {expected}, found {}", self.peek()))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let first = self.simple_stmt()?;
        if self.eat(&Tok::Sym(";")) {
            let rest = self.stmt()?;
            Ok(Stmt::seq(first, rest))
        } else {
            Ok(first)
        }
    }

    fn simple_stmt(&mut self) -> PResult<Stmt> {
        match self.peek().clone() {
            Tok::Kw("skip") => {
                self.advance();
                Ok(Stmt::Skip)
            }
            Tok::Kw("fail") => {
                self.advance();
                Ok(Stmt::Fail)
            }
            Tok::Kw("while") => {
                self.advance();
                let cond = self.bexpr()?;
                self.expect(Tok::Kw("do"))?;
                let body = self.stmt()?;
                self.expect(Tok::Kw("od"))?;
                Ok(Stmt::while_do(cond, body))
            }
            Tok::Kw("if") => {
                self.advance();
                let cond = self.bexpr()?;
                self.expect(Tok::Kw("then"))?;
                let then = self.stmt()?;
                self.expect(Tok::Kw("else"))?;
                let otherwise = self.stmt()?;
                self.expect(Tok::Kw("fi"))?;
                Ok(Stmt::if_then_else(cond, then, otherwise))
            }
            Tok::Sym("(") => {
                self.advance();
                let inner = self.stmt()?;
                self.expect(Tok::Sym(")"))?;
                Ok(inner)
            }
            Tok::Ident(x) => {
                self.advance();
                self.expect(Tok::Sym("="))?;
                let rhs = self.aexpr()?;
                Ok(Stmt::Assign(x, rhs))
            }
            Tok::Kw(k) => Err(self.error_here(format!("reserved word `{k}` cannot start a statement"))),
            _ => Err(self.unexpected("a statement")),
        }
    }

    fn bexpr(&mut self) -> PResult<Bexpr> {
        let mut acc = self.conj()?;
        while self.eat(&Tok::Kw("or")) {
            let rhs = self.conj()?;
            acc = Bexpr::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> PResult<Bexpr> {
        let mut acc = self.neg()?;
        while self.eat(&Tok::Kw("and")) {
            let rhs = self.neg()?;
            acc = Bexpr::and(acc, rhs);
        }
        Ok(acc)
    }

    fn neg(&mut self) -> PResult<Bexpr> {
        match self.peek() {
            Tok::Kw("not") => {
                self.advance();
                Ok(Bexpr::not(self.neg()?))
            }
            Tok::Kw("true") => {
                self.advance();
                Ok(Bexpr::True)
            }
            Tok::Kw("false") => {
                self.advance();
                Ok(Bexpr::False)
            }
            Tok::Sym("(") => {
                // Either a parenthesised boolean or a comparison whose left
                // operand starts with a parenthesis; try the former first.
                let start = self.pos;
                self.advance();
                let grouped = self.bexpr().and_then(|b| {
                    self.expect(Tok::Sym(")"))?;
                    Ok(b)
                });
                match grouped {
                    Ok(b) if cmp_op(self.peek()).is_none() => Ok(b),
                    Ok(_) => {
                        self.pos = start;
                        self.comparison()
                    }
                    Err(bool_err) => {
                        let bool_pos = self.pos;
                        self.pos = start;
                        self.comparison().map_err(|cmp_err| if bool_pos > self.pos { bool_err } else { cmp_err })
                    }
                }
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> PResult<Bexpr> {
        let left = self.aexpr()?;
        let op = match cmp_op(self.peek()) {
            Some(op) => op,
            None => return Err(self.unexpected("a comparison operator")),
        };
        self.advance();
        let right = self.aexpr()?;
        if cmp_op(self.peek()).is_some() {
            return Err(self.error_here("comparison operators cannot be chained".into()));
        }
        Ok(Bexpr::Cmp(op, left, right))
    }

    fn aexpr(&mut self) -> PResult<Aexpr> {
        let mut acc = self.atom()?;
        loop {
            if self.eat(&Tok::Sym("+")) {
                acc = Aexpr::add(acc, self.atom()?);
            } else if self.eat(&Tok::Sym("-")) {
                acc = Aexpr::sub(acc, self.atom()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn atom(&mut self) -> PResult<Aexpr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.advance();
                Ok(Aexpr::Int(n))
            }
            Tok::Ident(x) => {
                self.advance();
                Ok(Aexpr::Var(x))
            }
            Tok::Sym("-") => {
                self.advance();
                let inner = self.atom()?;
                Ok(Aexpr::sub(Aexpr::int(0), inner))
            }
            Tok::Sym("(") => {
                self.advance();
                let inner = self.aexpr()?;
                self.expect(Tok::Sym(")"))?;
                Ok(inner)
            }
            Tok::Kw(k) => {
                Err(self.error_here(format!("reserved word `{k}` cannot be used as an arithmetic expression")))
            }
            _ => Err(self.unexpected("an arithmetic expression")),
        }
    }

    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

/// Parses a whole IMP program.
pub fn parse_program(text: &str) -> Result<Stmt, ParseError> {
    let mut parser = Parser { tokens: lex(text)?, pos: 0 };
    let s = parser.stmt()?;
    parser.finish()?;
    Ok(s)
}

/// Parses a standalone boolean expression.
pub fn parse_bexpr(text: &str) -> Result<Bexpr, ParseError> {
    let mut parser = Parser { tokens: lex(text)?, pos: 0 };
    let b = parser.bexpr()?;
    parser.finish()?;
    Ok(b)
}

/// Parses a standalone arithmetic expression.
pub fn parse_aexpr(text: &str) -> Result<Aexpr, ParseError> {
    let mut parser = Parser { tokens: lex(text)?, pos: 0 };
    let a = parser.aexpr()?;
    parser.finish()?;
    Ok(a)
}
