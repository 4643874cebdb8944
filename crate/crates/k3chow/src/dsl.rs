//! A small script language for ad-hoc characteristic-class computations:
//! `let` bindings and `print` statements over exact rationals, graded
//! classes, bundles and weighted bundles.
//!
//! Grammar (LL(1), one token of lookahead everywhere):
//!
//! ```text
//! script    := statement* EOF
//! statement := "let" NAME "=" expr ";" | "print" expr ";"
//! expr      := term (("+" | "-") term)*
//! term      := factor (("*" | "/") factor)*
//! factor    := "-" factor | power
//! power     := atom ("^" INT)?
//! atom      := INT | NAME | NAME "(" args ")" | "(" expr ")"
//!            | "(" expr "," expr ")" | "[" (expr ("," expr)*)? "]"
//! args      := (arg ("," arg)*)?      arg := (NAME "=")? expr
//! ```
//!
//! Number literals are non-negative integers; exact rationals are spelled
//! with the division operator (`3/4`). Scripts are typechecked (number,
//! class, bundle, weighted bundle, series) before anything is evaluated,
//! and bindings are single-assignment.
//!
//! Every class lives in one ambient ring, `Q[H, E, t, z, tau, c2, c3]`,
//! whose generators are bound as identifiers. One bundle is predefined:
//! `W`, the rank-2 bundle whose symmetric square is the standard rank-3
//! bundle `1 + c2 + c3`, so `c1(W) = 0` and `c2(W) = c2/4`. Builtins that
//! need a smaller ring (`push`, `normal_form`) move classes across by
//! generator name and reject classes that mention anything the target
//! does not have.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::bundle::{BundleClass, WeightedBundle};
use crate::pipeline;
use crate::poly::{GradedPoly, RingSignature};
use crate::rational::{rat_int, rat_render, rat_to_i64, Rat};
use crate::tower;
use crate::Error;

/// The ring every script value lives in.
pub fn script_sig() -> Arc<RingSignature> {
    RingSignature::new(&[
        ("H", 1),
        ("E", 1),
        ("t", 1),
        ("z", 1),
        ("tau", 1),
        ("c2", 2),
        ("c3", 3),
    ])
}

// ---------------------------------------------------------------------
// Errors

/// What went wrong with a script, as a family: the four parse/eval error
/// classes are distinct so callers (and tests) can tell them apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptErrorKind {
    /// A character the lexer does not know.
    Lexical,
    /// A token sequence outside the grammar.
    Syntax,
    /// A name that is neither bound nor builtin.
    UnknownIdentifier,
    /// An operation applied to values of the wrong type or arity.
    TypeMismatch,
    /// A `let` for a name that is already bound.
    Rebind,
}

impl ScriptErrorKind {
    fn label(self) -> &'static str {
        match self {
            ScriptErrorKind::Lexical => "lexical error",
            ScriptErrorKind::Syntax => "syntax error",
            ScriptErrorKind::UnknownIdentifier => "unknown identifier",
            ScriptErrorKind::TypeMismatch => "type mismatch",
            ScriptErrorKind::Rebind => "rebinding",
        }
    }
}

/// A script problem with its kind and, for lexer/parser errors, the
/// 1-based position in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptError {
    pub kind: ScriptErrorKind,
    pub position: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some((line, col)) => {
                write!(f, "{line}:{col}: {}: {}", self.kind.label(), self.message)
            }
            None => write!(f, "{}: {}", self.kind.label(), self.message),
        }
    }
}

impl std::error::Error for ScriptError {}

impl From<ScriptError> for Error {
    fn from(e: ScriptError) -> Error {
        Error::Parse(e.to_string())
    }
}

fn err_at(
    kind: ScriptErrorKind,
    line: usize,
    col: usize,
    message: impl Into<String>,
) -> ScriptError {
    ScriptError { kind, position: Some((line, col)), message: message.into() }
}

fn err(kind: ScriptErrorKind, message: impl Into<String>) -> ScriptError {
    ScriptError { kind, position: None, message: message.into() }
}

type ScriptResult<T> = std::result::Result<T, ScriptError>;

// ---------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Let,
    Print,
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Let => "'let'".into(),
            Tok::Print => "'print'".into(),
            Tok::Ident(n) => format!("identifier '{n}'"),
            Tok::Int(n) => format!("number {n}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Assign => "'='".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.i];
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }
}

fn lex(text: &str) -> ScriptResult<Vec<Spanned>> {
    let mut lx = Lexer { chars: text.chars().collect(), i: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(c) = lx.peek() {
        let (tline, tcol) = (lx.line, lx.col);
        if c.is_whitespace() {
            lx.bump();
            continue;
        }
        if c.is_ascii_digit() {
            let mut n: u64 = 0;
            while let Some(d) = lx.peek().and_then(|c| c.to_digit(10)) {
                n = n.checked_mul(10).and_then(|n| n.checked_add(u64::from(d))).ok_or_else(
                    || err_at(ScriptErrorKind::Lexical, tline, tcol, "number literal overflows"),
                )?;
                lx.bump();
            }
            out.push(Spanned { tok: Tok::Int(n), line: tline, col: tcol });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut name = String::new();
            while lx.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                name.push(lx.bump());
            }
            let tok = match name.as_str() {
                "let" => Tok::Let,
                "print" => Tok::Print,
                _ => Tok::Ident(name),
            };
            out.push(Spanned { tok, line: tline, col: tcol });
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '=' => Tok::Assign,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            other => {
                return Err(err_at(
                    ScriptErrorKind::Lexical,
                    tline,
                    tcol,
                    format!("unexpected character '{other}'"),
                ))
            }
        };
        lx.bump();
        out.push(Spanned { tok, line: tline, col: tcol });
    }
    out.push(Spanned { tok: Tok::Eof, line: lx.line, col: lx.col });
    Ok(out)
}

// ---------------------------------------------------------------------
// AST

/// One function-call argument, optionally named (`rank=3`).
#[derive(Debug, Clone, PartialEq)]
pub struct Arg {
    pub name: Option<String>,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(u64),
    Ident(String),
    Call { name: String, args: Vec<Arg> },
    List(Vec<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Let(String, Expr),
    Print(Expr),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Script {
    pub statements: Vec<Stmt>,
}

// ---------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> &Spanned {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &str) -> ScriptResult<T> {
        let t = self.peek();
        Err(err_at(
            ScriptErrorKind::Syntax,
            t.line,
            t.col,
            format!("expected {expected}, found {}", t.tok.describe()),
        ))
    }

    fn expect(&mut self, want: Tok, expected: &str) -> ScriptResult<()> {
        if self.peek().tok == want {
            self.advance();
            Ok(())
        } else {
            self.unexpected(expected)
        }
    }

    fn script(&mut self) -> ScriptResult<Script> {
        let mut statements = Vec::new();
        loop {
            match &self.peek().tok {
                Tok::Eof => break,
                Tok::Let => {
                    self.advance();
                    let name = self.ident("a binding name")?;
                    self.expect(Tok::Assign, "'='")?;
                    let value = self.expr()?;
                    self.expect(Tok::Semi, "';'")?;
                    statements.push(Stmt::Let(name, value));
                }
                Tok::Print => {
                    self.advance();
                    let value = self.expr()?;
                    self.expect(Tok::Semi, "';'")?;
                    statements.push(Stmt::Print(value));
                }
                _ => return self.unexpected("one of 'let', 'print'"),
            }
        }
        Ok(Script { statements })
    }

    fn ident(&mut self, expected: &str) -> ScriptResult<String> {
        if let Tok::Ident(n) = &self.peek().tok {
            let n = n.clone();
            self.advance();
            Ok(n)
        } else {
            self.unexpected(expected)
        }
    }

    fn expr(&mut self) -> ScriptResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.advance();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.advance();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> ScriptResult<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.advance();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.advance();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> ScriptResult<Expr> {
        if self.peek().tok == Tok::Minus {
            self.advance();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> ScriptResult<Expr> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Caret {
            self.advance();
            if let Tok::Int(n) = self.peek().tok {
                let n = u32::try_from(n).map_err(|_| {
                    let t = self.peek();
                    err_at(ScriptErrorKind::Syntax, t.line, t.col, "exponent too large")
                })?;
                self.advance();
                return Ok(Expr::Pow(Box::new(base), n));
            }
            return self.unexpected("an integer exponent");
        }
        Ok(base)
    }

    fn atom(&mut self) -> ScriptResult<Expr> {
        match self.peek().tok.clone() {
            Tok::Int(n) => {
                self.advance();
                Ok(Expr::Number(n))
            }
            Tok::Ident(name) => {
                self.advance();
                if self.peek().tok == Tok::LParen {
                    self.advance();
                    let args = self.args()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Expr::Call { name, args })
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            Tok::LParen => {
                self.advance();
                let first = self.expr()?;
                if self.peek().tok == Tok::Comma {
                    self.advance();
                    let second = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Expr::Pair(Box::new(first), Box::new(second)))
                } else {
                    self.expect(Tok::RParen, "')' or ','")?;
                    Ok(first)
                }
            }
            Tok::LBracket => {
                self.advance();
                let mut items = Vec::new();
                if self.peek().tok != Tok::RBracket {
                    items.push(self.expr()?);
                    while self.peek().tok == Tok::Comma {
                        self.advance();
                        items.push(self.expr()?);
                    }
                }
                self.expect(Tok::RBracket, "']' or ','")?;
                Ok(Expr::List(items))
            }
            _ => self.unexpected("one of: number, identifier, '(', '[', '-'"),
        }
    }

    fn args(&mut self) -> ScriptResult<Vec<Arg>> {
        let mut args = Vec::new();
        if self.peek().tok == Tok::RParen {
            return Ok(args);
        }
        loop {
            args.push(self.arg()?);
            if self.peek().tok == Tok::Comma {
                self.advance();
            } else {
                return Ok(args);
            }
        }
    }

    fn arg(&mut self) -> ScriptResult<Arg> {
        // `NAME =` starts a named argument; plain `NAME` is an expression.
        if let Tok::Ident(name) = self.peek().tok.clone() {
            if self.toks[self.pos + 1].tok == Tok::Assign {
                self.advance();
                self.advance();
                return Ok(Arg { name: Some(name), value: self.expr()? });
            }
        }
        Ok(Arg { name: None, value: self.expr()? })
    }
}

/// Parses source text to a [`Script`]. Errors carry the 1-based line and
/// column of the offending token.
pub fn parse(text: &str) -> ScriptResult<Script> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    p.script()
}

// ---------------------------------------------------------------------
// Rendering (the inverse of parsing, up to whitespace)

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, min: u8) -> fmt::Result {
    if prec(child) < min {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(n) => write!(f, "{n}"),
            Expr::Ident(n) => write!(f, "{n}"),
            Expr::Call { name, args } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    if let Some(n) = &a.name {
                        write!(f, "{n}=")?;
                    }
                    write!(f, "{}", a.value)?;
                }
                write!(f, ")")
            }
            Expr::List(items) => {
                write!(f, "[")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "]")
            }
            Expr::Pair(a, b) => write!(f, "({a}, {b})"),
            Expr::Neg(x) => {
                write!(f, "-")?;
                write_child(f, x, 3)
            }
            Expr::Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " + ")?;
                write_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " - ")?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_child(f, a, 2)?;
                write!(f, " * ")?;
                write_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_child(f, a, 2)?;
                write!(f, " / ")?;
                write_child(f, b, 3)
            }
            Expr::Pow(base, n) => {
                write_child(f, base, 5)?;
                write!(f, "^{n}")
            }
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Let(name, e) => write!(f, "let {name} = {e};"),
            Stmt::Print(e) => write!(f, "print {e};"),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.statements.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------
// Types and values

/// The value families a script expression can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Type {
    Number,
    Class,
    Bundle,
    Weighted,
    Series,
    Pair,
    List,
}

impl Type {
    fn label(self) -> &'static str {
        match self {
            Type::Number => "number",
            Type::Class => "class",
            Type::Bundle => "bundle",
            Type::Weighted => "weighted bundle",
            Type::Series => "series",
            Type::Pair => "pair",
            Type::List => "list",
        }
    }
}

/// A script value.
#[derive(Debug, Clone)]
pub enum Value {
    Number(Rat),
    Class(GradedPoly),
    Bundle(BundleClass),
    Weighted(WeightedBundle),
    Series(Vec<i64>),
    Pair(u32, BundleClass),
    List(Vec<Value>),
}

impl Value {
    fn type_of(&self) -> Type {
        match self {
            Value::Number(_) => Type::Number,
            Value::Class(_) => Type::Class,
            Value::Bundle(_) => Type::Bundle,
            Value::Weighted(_) => Type::Weighted,
            Value::Series(_) => Type::Series,
            Value::Pair(..) => Type::Pair,
            Value::List(_) => Type::List,
        }
    }
}

/// Canonical text form of a value, used by `print`.
pub fn render_value(v: &Value) -> String {
    match v {
        Value::Number(x) => rat_render(x),
        Value::Class(p) => p.to_string(),
        Value::Bundle(b) => {
            let classes: Vec<String> = (1..=b.rank()).map(|i| b.chern(i).to_string()).collect();
            format!("bundle(rank={}, c=[{}])", b.rank(), classes.join(", "))
        }
        Value::Weighted(w) => {
            let parts: Vec<String> = w
                .summands()
                .iter()
                .map(|(wt, b)| format!("({wt}, {})", render_value(&Value::Bundle(b.clone()))))
                .collect();
            format!("wsum({})", parts.join(", "))
        }
        Value::Series(coeffs) => {
            let parts: Vec<String> = coeffs.iter().map(i64::to_string).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Pair(w, b) => format!("({w}, {})", render_value(&Value::Bundle(b.clone()))),
        Value::List(items) => {
            let parts: Vec<String> = items.iter().map(render_value).collect();
            format!("[{}]", parts.join(", "))
        }
    }
}

// ---------------------------------------------------------------------
// Builtin environment

fn builtin_bindings(sig: &Arc<RingSignature>) -> Vec<(String, Value)> {
    let mut out: Vec<(String, Value)> = sig
        .gens()
        .map(|(name, _)| (name.to_string(), Value::Class(GradedPoly::generator(sig, name))))
        .collect();
    let quarter_c2 = GradedPoly::generator(sig, "c2").scale(&crate::rational::rat(1, 4));
    let w = BundleClass::new(2, sig, vec![GradedPoly::zero(sig), quarter_c2]);
    out.push(("W".to_string(), Value::Bundle(w)));
    out
}

const FUNCTIONS: [&str; 12] = [
    "bundle",
    "dual",
    "sym",
    "tensor",
    "chern",
    "segre",
    "wsum",
    "wtop",
    "wsegre",
    "push",
    "normal_form",
    "hilbert",
];

// ---------------------------------------------------------------------
// Type checking

fn type_error<T>(message: impl Into<String>) -> ScriptResult<T> {
    Err(err(ScriptErrorKind::TypeMismatch, message))
}

fn check_args(
    name: &str,
    args: &[Arg],
    want: &[&str],
    env: &HashMap<String, Type>,
) -> ScriptResult<Vec<Type>> {
    if args.len() != want.len() {
        return type_error(format!(
            "{name} takes {} argument(s), got {}",
            want.len(),
            args.len()
        ));
    }
    args.iter().map(|a| check_expr(&a.value, env)).collect()
}

fn expect_type(name: &str, what: &str, got: Type, want: Type) -> ScriptResult<()> {
    if got == want || (want == Type::Class && got == Type::Number) {
        Ok(())
    } else {
        type_error(format!("{name}: {what} must be a {}, got a {}", want.label(), got.label()))
    }
}

fn check_expr(e: &Expr, env: &HashMap<String, Type>) -> ScriptResult<Type> {
    match e {
        Expr::Number(_) => Ok(Type::Number),
        Expr::Ident(name) => env.get(name).copied().ok_or_else(|| {
            err(ScriptErrorKind::UnknownIdentifier, format!("'{name}' is not bound"))
        }),
        Expr::List(items) => {
            for item in items {
                check_expr(item, env)?;
            }
            Ok(Type::List)
        }
        Expr::Pair(a, b) => {
            expect_type("pair", "the weight", check_expr(a, env)?, Type::Number)?;
            let second = check_expr(b, env)?;
            if second != Type::Bundle {
                return type_error(format!(
                    "pair: the second component must be a bundle, got a {}",
                    second.label()
                ));
            }
            Ok(Type::Pair)
        }
        Expr::Neg(x) => {
            let t = check_expr(x, env)?;
            match t {
                Type::Number | Type::Class => Ok(t),
                other => type_error(format!("cannot negate a {}", other.label())),
            }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (ta, tb) = (check_expr(a, env)?, check_expr(b, env)?);
            match (ta, tb) {
                (Type::Number, Type::Number) => Ok(Type::Number),
                (Type::Number | Type::Class, Type::Number | Type::Class) => Ok(Type::Class),
                (Type::Bundle, Type::Bundle) if matches!(e, Expr::Add(..)) => Ok(Type::Bundle),
                _ => type_error(format!(
                    "cannot combine a {} and a {}",
                    ta.label(),
                    tb.label()
                )),
            }
        }
        Expr::Mul(a, b) => {
            let (ta, tb) = (check_expr(a, env)?, check_expr(b, env)?);
            match (ta, tb) {
                (Type::Number, Type::Number) => Ok(Type::Number),
                (Type::Number | Type::Class, Type::Number | Type::Class) => Ok(Type::Class),
                _ => type_error(format!(
                    "cannot multiply a {} by a {}",
                    ta.label(),
                    tb.label()
                )),
            }
        }
        Expr::Div(a, b) => {
            let (ta, tb) = (check_expr(a, env)?, check_expr(b, env)?);
            match (ta, tb) {
                (Type::Number, Type::Number) => Ok(Type::Number),
                (Type::Class, Type::Number) => Ok(Type::Class),
                _ => type_error(format!(
                    "cannot divide a {} by a {}",
                    ta.label(),
                    tb.label()
                )),
            }
        }
        Expr::Pow(base, _) => {
            let t = check_expr(base, env)?;
            match t {
                Type::Number | Type::Class => Ok(t),
                other => type_error(format!("cannot raise a {} to a power", other.label())),
            }
        }
        Expr::Call { name, args } => check_call(name, args, env),
    }
}

fn check_call(name: &str, args: &[Arg], env: &HashMap<String, Type>) -> ScriptResult<Type> {
    match name {
        "bundle" => {
            let mut rank = None;
            let mut classes = None;
            for a in args {
                match a.name.as_deref() {
                    Some("rank") => rank = Some(check_expr(&a.value, env)?),
                    Some("c") => classes = Some(check_expr(&a.value, env)?),
                    Some(other) => {
                        return type_error(format!("bundle: unknown argument '{other}'"))
                    }
                    None => {
                        return type_error(
                            "bundle: arguments must be named (rank=..., c=[...])",
                        )
                    }
                }
            }
            match (rank, classes) {
                (Some(Type::Number), Some(Type::List)) => Ok(Type::Bundle),
                (Some(r), Some(c)) => type_error(format!(
                    "bundle: rank must be a number and c a list, got {} and {}",
                    r.label(),
                    c.label()
                )),
                _ => type_error("bundle: needs both rank=... and c=[...]"),
            }
        }
        "dual" => {
            let ts = check_args(name, args, &["bundle"], env)?;
            expect_type(name, "the argument", ts[0], Type::Bundle)?;
            Ok(Type::Bundle)
        }
        "sym" => {
            let ts = check_args(name, args, &["power", "bundle"], env)?;
            expect_type(name, "the power", ts[0], Type::Number)?;
            expect_type(name, "the bundle", ts[1], Type::Bundle)?;
            Ok(Type::Bundle)
        }
        "tensor" => {
            let ts = check_args(name, args, &["bundle", "line class"], env)?;
            expect_type(name, "the bundle", ts[0], Type::Bundle)?;
            expect_type(name, "the twist", ts[1], Type::Class)?;
            Ok(Type::Bundle)
        }
        "chern" | "segre" => {
            let ts = check_args(name, args, &["bundle", "degree"], env)?;
            expect_type(name, "the bundle", ts[0], Type::Bundle)?;
            expect_type(name, "the degree", ts[1], Type::Number)?;
            Ok(Type::Class)
        }
        "wsum" => {
            if args.is_empty() {
                return type_error("wsum: needs at least one (weight, bundle) pair");
            }
            for a in args {
                let t = check_expr(&a.value, env)?;
                if t != Type::Pair {
                    return type_error(format!(
                        "wsum: every argument must be a (weight, bundle) pair, got a {}",
                        t.label()
                    ));
                }
            }
            Ok(Type::Weighted)
        }
        "wtop" => {
            let ts = check_args(name, args, &["weighted bundle"], env)?;
            expect_type(name, "the argument", ts[0], Type::Weighted)?;
            Ok(Type::Class)
        }
        "wsegre" => {
            let ts = check_args(name, args, &["weighted bundle", "degree"], env)?;
            expect_type(name, "the argument", ts[0], Type::Weighted)?;
            expect_type(name, "the degree", ts[1], Type::Number)?;
            Ok(Type::Class)
        }
        "push" | "normal_form" => {
            let ts = check_args(name, args, &["class"], env)?;
            expect_type(name, "the argument", ts[0], Type::Class)?;
            Ok(Type::Class)
        }
        "hilbert" => {
            check_args(name, args, &[], env)?;
            Ok(Type::Series)
        }
        other => Err(err(
            ScriptErrorKind::UnknownIdentifier,
            format!("'{other}' is not a function"),
        )),
    }
}

/// Checks the whole script without evaluating anything: every expression
/// must type-check and every binding must be fresh.
pub fn typecheck(script: &Script) -> ScriptResult<()> {
    let sig = script_sig();
    let mut env: HashMap<String, Type> = builtin_bindings(&sig)
        .into_iter()
        .map(|(n, v)| (n, v.type_of()))
        .collect();
    for stmt in &script.statements {
        match stmt {
            Stmt::Let(name, e) => {
                if env.contains_key(name) || FUNCTIONS.contains(&name.as_str()) {
                    return Err(err(
                        ScriptErrorKind::Rebind,
                        format!("'{name}' is already bound; bindings are single-assignment"),
                    ));
                }
                let t = check_expr(e, &env)?;
                env.insert(name.clone(), t);
            }
            Stmt::Print(e) => {
                check_expr(e, &env)?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Evaluation

fn as_class(sig: &Arc<RingSignature>, v: &Value) -> ScriptResult<GradedPoly> {
    match v {
        Value::Class(p) => Ok(p.clone()),
        Value::Number(x) => Ok(GradedPoly::constant(sig, x.clone())),
        other => type_error(format!("expected a class, got a {}", other.type_of().label())),
    }
}

fn as_count(what: &str, v: &Value) -> ScriptResult<u32> {
    if let Value::Number(x) = v {
        if let Some(n) = rat_to_i64(x) {
            if let Ok(n) = u32::try_from(n) {
                return Ok(n);
            }
        }
    }
    type_error(format!("{what} must be a small non-negative integer"))
}

/// Moves a class into `target` by generator name; errors if the class
/// mentions a generator the target ring does not have.
fn retract(x: &GradedPoly, target: &Arc<RingSignature>) -> ScriptResult<GradedPoly> {
    let sig = x.signature().clone();
    let mut terms: Vec<(Vec<u16>, Rat)> = Vec::new();
    for (m, c) in x.sorted_terms() {
        let mut exp = vec![0u16; target.len()];
        for i in 0..sig.len() {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            match target.index_of(sig.name(i)) {
                Some(j) => exp[j] = e,
                None => {
                    return type_error(format!(
                        "the class involves {}, which {} does not have",
                        sig.name(i),
                        target.describe()
                    ))
                }
            }
        }
        terms.push((exp, c.clone()));
    }
    GradedPoly::from_terms(target, terms)
        .map_err(|e| err(ScriptErrorKind::TypeMismatch, e.to_string()))
}

struct Evaluator {
    sig: Arc<RingSignature>,
    env: HashMap<String, Value>,
}

impl Evaluator {
    fn new() -> Self {
        let sig = script_sig();
        let env = builtin_bindings(&sig).into_iter().collect();
        Evaluator { sig, env }
    }

    fn eval(&self, e: &Expr) -> ScriptResult<Value> {
        match e {
            Expr::Number(n) => Ok(Value::Number(rat_int(i64::try_from(*n).map_err(
                |_| err(ScriptErrorKind::TypeMismatch, "number literal overflows"),
            )?))),
            Expr::Ident(name) => self.env.get(name).cloned().ok_or_else(|| {
                err(ScriptErrorKind::UnknownIdentifier, format!("'{name}' is not bound"))
            }),
            Expr::List(items) => {
                Ok(Value::List(items.iter().map(|e| self.eval(e)).collect::<ScriptResult<_>>()?))
            }
            Expr::Pair(a, b) => {
                let weight = as_count("a summand weight", &self.eval(a)?)?;
                if weight == 0 {
                    return type_error("a summand weight must be positive");
                }
                match self.eval(b)? {
                    Value::Bundle(bundle) => Ok(Value::Pair(weight, bundle)),
                    other => type_error(format!(
                        "the second component of a pair must be a bundle, got a {}",
                        other.type_of().label()
                    )),
                }
            }
            Expr::Neg(x) => match self.eval(x)? {
                Value::Number(v) => Ok(Value::Number(-v)),
                Value::Class(p) => Ok(Value::Class(p.neg())),
                other => type_error(format!("cannot negate a {}", other.type_of().label())),
            },
            Expr::Add(a, b) => self.combine(a, b, false),
            Expr::Sub(a, b) => self.combine(a, b, true),
            Expr::Mul(a, b) => {
                let (va, vb) = (self.eval(a)?, self.eval(b)?);
                match (&va, &vb) {
                    (Value::Number(x), Value::Number(y)) => Ok(Value::Number(x * y)),
                    _ => {
                        let x = as_class(&self.sig, &va)?;
                        let y = as_class(&self.sig, &vb)?;
                        Ok(Value::Class(x.mul(&y)))
                    }
                }
            }
            Expr::Div(a, b) => {
                let (va, vb) = (self.eval(a)?, self.eval(b)?);
                let Value::Number(y) = &vb else {
                    return type_error(format!(
                        "cannot divide by a {}",
                        vb.type_of().label()
                    ));
                };
                if y.is_zero() {
                    return type_error("division by zero");
                }
                match va {
                    Value::Number(x) => Ok(Value::Number(x / y)),
                    Value::Class(p) => Ok(Value::Class(p.scale(&(Rat::one() / y)))),
                    other => type_error(format!(
                        "cannot divide a {}",
                        other.type_of().label()
                    )),
                }
            }
            Expr::Pow(base, n) => match self.eval(base)? {
                Value::Number(x) => {
                    let mut out = Rat::one();
                    for _ in 0..*n {
                        out *= &x;
                    }
                    Ok(Value::Number(out))
                }
                Value::Class(p) => Ok(Value::Class(p.pow(*n))),
                other => type_error(format!(
                    "cannot raise a {} to a power",
                    other.type_of().label()
                )),
            },
            Expr::Call { name, args } => self.call(name, args),
        }
    }

    fn combine(&self, a: &Expr, b: &Expr, subtract: bool) -> ScriptResult<Value> {
        let (va, vb) = (self.eval(a)?, self.eval(b)?);
        match (&va, &vb) {
            (Value::Number(x), Value::Number(y)) => {
                Ok(Value::Number(if subtract { x - y } else { x + y }))
            }
            (Value::Bundle(x), Value::Bundle(y)) if !subtract => {
                Ok(Value::Bundle(x.direct_sum(y)))
            }
            _ => {
                let x = as_class(&self.sig, &va)?;
                let y = as_class(&self.sig, &vb)?;
                Ok(Value::Class(if subtract { x.sub(&y) } else { x.add(&y) }))
            }
        }
    }

    fn eval_args(&self, args: &[Arg]) -> ScriptResult<Vec<Value>> {
        args.iter().map(|a| self.eval(&a.value)).collect()
    }

    fn call(&self, name: &str, args: &[Arg]) -> ScriptResult<Value> {
        match name {
            "bundle" => self.make_bundle(args),
            "dual" => match &self.eval_args(args)?[..] {
                [Value::Bundle(b)] => Ok(Value::Bundle(b.dual())),
                _ => type_error("dual: takes one bundle"),
            },
            "sym" => match &self.eval_args(args)?[..] {
                [k, Value::Bundle(b)] => {
                    Ok(Value::Bundle(b.sym_power(as_count("the power", k)?)))
                }
                _ => type_error("sym: takes a power and a bundle"),
            },
            "tensor" => match &self.eval_args(args)?[..] {
                [Value::Bundle(b), twist] => {
                    let l = as_class(&self.sig, twist)?;
                    if !(l.is_homogeneous() && l.max_degree().map_or(true, |d| d == 1)) {
                        return type_error(
                            "tensor: the twist must be homogeneous of degree 1",
                        );
                    }
                    Ok(Value::Bundle(b.tensor_line(&l)))
                }
                _ => type_error("tensor: takes a bundle and a degree-1 class"),
            },
            "chern" => match &self.eval_args(args)?[..] {
                [Value::Bundle(b), k] => Ok(Value::Class(b.chern(as_count("the degree", k)?))),
                _ => type_error("chern: takes a bundle and a degree"),
            },
            "segre" => match &self.eval_args(args)?[..] {
                [Value::Bundle(b), k] => {
                    let k = as_count("the degree", k)?;
                    Ok(Value::Class(b.segre_table(k)[k as usize].clone()))
                }
                _ => type_error("segre: takes a bundle and a degree"),
            },
            "wsum" => {
                let mut summands = Vec::new();
                for v in self.eval_args(args)? {
                    match v {
                        Value::Pair(w, b) => summands.push((w, b)),
                        other => {
                            return type_error(format!(
                                "wsum: every argument must be a (weight, bundle) pair, got a {}",
                                other.type_of().label()
                            ))
                        }
                    }
                }
                if summands.is_empty() {
                    return type_error("wsum: needs at least one (weight, bundle) pair");
                }
                Ok(Value::Weighted(WeightedBundle::new(summands)))
            }
            "wtop" => match &self.eval_args(args)?[..] {
                [Value::Weighted(w)] => {
                    self.reject_parameter_mixing(w)?;
                    Ok(Value::Class(w.weighted_chern_poly(&self.sig, "t")))
                }
                _ => type_error("wtop: takes one weighted bundle"),
            },
            "wsegre" => match &self.eval_args(args)?[..] {
                [Value::Weighted(w), k] => {
                    self.reject_parameter_mixing(w)?;
                    let k = as_count("the degree", k)?;
                    Ok(Value::Class(
                        w.weighted_segre(k).homogeneous_component(k).untruncated(),
                    ))
                }
                _ => type_error("wsegre: takes a weighted bundle and a degree"),
            },
            "push" => match &self.eval_args(args)?[..] {
                [v] => {
                    let x = retract(&as_class(&self.sig, v)?, &tower::tangent_sig())?;
                    let pushed = tower::tangent_tower()
                        .push_to_base(&x)
                        .map_err(|e| err(ScriptErrorKind::TypeMismatch, e.to_string()))?;
                    Ok(Value::Class(tower::inject(&pushed, &self.sig)))
                }
                _ => type_error("push: takes one class"),
            },
            "normal_form" => match &self.eval_args(args)?[..] {
                [v] => {
                    let x = retract(&as_class(&self.sig, v)?, &crate::blowup::moduli_sig())?;
                    let top = pipeline::TOP_DEGREE;
                    if x.max_degree().is_some_and(|d| d > top) {
                        return type_error(format!(
                            "normal_form: degree {} is beyond the cached range {top}",
                            x.max_degree().unwrap()
                        ));
                    }
                    let ring = pipeline::moduli_ring();
                    let mut out = GradedPoly::zero(ring.signature());
                    for (_, part) in x.components() {
                        out = out.add(&ring.normal_form(&part));
                    }
                    Ok(Value::Class(tower::inject(&out, &self.sig)))
                }
                _ => type_error("normal_form: takes one class"),
            },
            "hilbert" => {
                if !args.is_empty() {
                    return type_error("hilbert: takes no arguments");
                }
                Ok(Value::Series(pipeline::betti_table()))
            }
            other => Err(err(
                ScriptErrorKind::UnknownIdentifier,
                format!("'{other}' is not a function"),
            )),
        }
    }

    /// The weighted Chern polynomial introduces the fresh parameter `t`;
    /// summand classes that already mention `t` would be conflated.
    fn reject_parameter_mixing(&self, w: &WeightedBundle) -> ScriptResult<()> {
        let it = self.sig.index_of("t").expect("script ring names t");
        for (_, b) in w.summands() {
            for i in 1..=b.rank() {
                for (m, _) in b.chern(i).sorted_terms() {
                    if m.exponent(it) != 0 {
                        return type_error(
                            "the summand classes mention t, the weighted parameter",
                        );
                    }
                }
            }
        }
        Ok(())
    }

    fn make_bundle(&self, args: &[Arg]) -> ScriptResult<Value> {
        let mut rank = None;
        let mut classes = None;
        for a in args {
            match a.name.as_deref() {
                Some("rank") => rank = Some(self.eval(&a.value)?),
                Some("c") => classes = Some(self.eval(&a.value)?),
                Some(other) => {
                    return type_error(format!("bundle: unknown argument '{other}'"))
                }
                None => {
                    return type_error("bundle: arguments must be named (rank=..., c=[...])")
                }
            }
        }
        let (Some(rank), Some(classes)) = (rank, classes) else {
            return type_error("bundle: needs both rank=... and c=[...]");
        };
        let rank = as_count("the rank", &rank)?;
        let Value::List(items) = classes else {
            return type_error(format!(
                "bundle: c must be a list of classes, got a {}",
                classes.type_of().label()
            ));
        };
        if items.len() > rank as usize {
            return type_error(format!(
                "bundle: {} Chern classes for rank {rank}",
                items.len()
            ));
        }
        let mut chern = Vec::new();
        for (i, item) in items.iter().enumerate() {
            let c = as_class(&self.sig, item)?;
            let want = i as u32 + 1;
            if !(c.is_homogeneous() && c.max_degree().map_or(true, |d| d == want)) {
                return type_error(format!(
                    "bundle: c_{want} must be homogeneous of degree {want}"
                ));
            }
            chern.push(c);
        }
        Ok(Value::Bundle(BundleClass::new(rank, &self.sig, chern)))
    }
}

/// Typechecks and runs a script; returns the values printed, in order.
pub fn run(script: &Script) -> ScriptResult<Vec<Value>> {
    typecheck(script)?;
    let mut ev = Evaluator::new();
    let mut printed = Vec::new();
    for stmt in &script.statements {
        match stmt {
            Stmt::Let(name, e) => {
                let v = ev.eval(e)?;
                ev.env.insert(name.clone(), v);
            }
            Stmt::Print(e) => printed.push(ev.eval(e)?),
        }
    }
    Ok(printed)
}

/// Parses, typechecks and runs in one step.
pub fn run_text(text: &str) -> ScriptResult<Vec<Value>> {
    run(&parse(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn kind_of(r: ScriptResult<Vec<Value>>) -> ScriptErrorKind {
        r.expect_err("script should fail").kind
    }

    #[test]
    fn the_script_from_the_grammar_notes_runs() {
        let printed = run_text(
            "let V = bundle(rank=3, c=[0, c2, c3]); \
             let S = sym(6, dual(V)); \
             print chern(S, 3);",
        )
        .unwrap();
        assert_eq!(printed.len(), 1);
        let Value::Class(p) = &printed[0] else { panic!("expected a class") };
        // Oracle: the library's own rank-28 sextic bundle.
        let direct = tower::sym_dual_v(&script_sig(), 6).chern(3);
        assert_eq!(p, &direct);
    }

    #[test]
    fn weighted_top_chern_reproduces_the_center_polynomial() {
        let printed = run_text(
            "let N = wsum((2, sym(8, dual(W))), (3, sym(12, dual(W)))); print wtop(N);",
        )
        .unwrap();
        let Value::Class(p) = &printed[0] else { panic!("expected a class") };
        assert_eq!(p.coeff_named(&[("t", 22)]), rat_int(816293376));
        assert_eq!(
            p.coeff_named(&[("t", 2), ("c2", 10)]),
            rat_int(1791590400)
        );
        // Same class as the blowup module computes, injected upward.
        let direct = tower::inject(&crate::blowup::normal_chern_poly(), &script_sig());
        assert_eq!(p, &direct);
    }

    #[test]
    fn weighted_segre_leading_term() {
        let printed =
            run_text("let N = wsum((2, sym(8, dual(W))), (3, sym(12, dual(W)))); print wsegre(N, 0);")
                .unwrap();
        let Value::Class(p) = &printed[0] else { panic!("expected a class") };
        // The summands have ranks 9 and 13, so P(1) starts at 2^9 * 3^13.
        assert_eq!(p.coeff(&[0, 0, 0, 0, 0, 0, 0]), rat(1, 816293376));
    }

    #[test]
    fn rationals_bindings_and_arithmetic() {
        let printed = run_text(
            "let a = 3/4; let b = a^2 - 1/2; print b; print (1 + 2) * c2 - c2 / 2;",
        )
        .unwrap();
        let Value::Number(x) = &printed[0] else { panic!("expected a number") };
        assert_eq!(x, &rat(1, 16));
        let Value::Class(p) = &printed[1] else { panic!("expected a class") };
        assert_eq!(p.coeff_named(&[("c2", 1)]), rat(5, 2));
    }

    #[test]
    fn pushforward_and_normal_form_builtins() {
        // tau^3 pushes to 6z^2 - c2 at the tangent level, then the plane
        // level sends z^2 to 1... the composite drops all three fiber
        // degrees: push(tau^3 * z^2) lands in degree 0.
        let printed = run_text("print push(tau^2); print normal_form(H^2 * E);").unwrap();
        let Value::Class(p) = &printed[0] else { panic!("expected a class") };
        assert!(p.is_zero(), "tau^2 has fiber degree 2 < 3: {p}");
        let Value::Class(nf) = &printed[1] else { panic!("expected a class") };
        assert!(nf.is_zero(), "E H^2 lies in the ideal: {nf}");
    }

    #[test]
    fn hilbert_builtin_is_the_betti_table() {
        let printed = run_text("print hilbert();").unwrap();
        let Value::Series(s) = &printed[0] else { panic!("expected a series") };
        assert_eq!(s, &pipeline::betti_table());
    }

    #[test]
    fn error_kinds_are_distinct() {
        assert_eq!(kind_of(run_text("let a = 1 ~ 2;")), ScriptErrorKind::Lexical);
        assert_eq!(kind_of(run_text("let S = sym(,V);")), ScriptErrorKind::Syntax);
        assert_eq!(kind_of(run_text("print missing;")), ScriptErrorKind::UnknownIdentifier);
        assert_eq!(kind_of(run_text("print nosuchfn(1);")), ScriptErrorKind::UnknownIdentifier);
        assert_eq!(kind_of(run_text("print dual(3);")), ScriptErrorKind::TypeMismatch);
        assert_eq!(kind_of(run_text("print sym(V);")), ScriptErrorKind::TypeMismatch);
        assert_eq!(kind_of(run_text("let c2 = 5; print c2;")), ScriptErrorKind::Rebind);
        assert_eq!(kind_of(run_text("let x = 1; let x = 2;")), ScriptErrorKind::Rebind);
    }

    #[test]
    fn syntax_errors_point_at_the_offending_column() {
        let e = parse("let S = sym(,V);").expect_err("malformed call");
        assert_eq!(e.kind, ScriptErrorKind::Syntax);
        // `,` is the 13th character.
        assert_eq!(e.position, Some((1, 13)));
        let e = parse("let x = 1;\nprint 2 +;").expect_err("missing operand");
        assert_eq!(e.position, Some((2, 10)));
    }

    #[test]
    fn typecheck_runs_before_evaluation() {
        // The first statement would be expensive to evaluate; the type
        // error in the second is reported without evaluating anything.
        let script =
            parse("let S = sym(12, dual(bundle(rank=3, c=[0, c2, c3]))); print chern(S, c2);")
                .unwrap();
        let e = typecheck(&script).expect_err("bad chern degree");
        assert_eq!(e.kind, ScriptErrorKind::TypeMismatch);
    }

    #[test]
    fn render_and_reparse_fixed_scripts() {
        for text in [
            "let U = bundle(rank=3, c=[0, c2, c3]);\nprint chern(sym(6, dual(U)), 3);",
            "print -(H + E) * (H - E)^2 / 3;",
            "print wsum((2, sym(8, dual(W))), (3, sym(12, dual(W))));",
            "print 1 - 2 - 3 - H^2;",
            "print [1, 2/3, H * z];",
        ] {
            let ast = parse(text).unwrap();
            let rendered = ast.to_string();
            let reparsed = parse(&rendered).unwrap();
            assert_eq!(ast, reparsed, "{text} -> {rendered}");
        }
    }
}
