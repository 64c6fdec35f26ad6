//! Reading BGPs from the canonical text format and extracting them from
//! SPARQL query files.
//!
//! The canonical `.bgp` format is a strict subset of SPARQL triple-block
//! syntax: optional `PREFIX` lines followed by one triple per `.` terminator,
//! no `;`/`,` abbreviations. `#` starts a comment. The query reader accepts a
//! broader subset (SELECT/ASK/CONSTRUCT/DESCRIBE, nested groups, UNION,
//! OPTIONAL, SERVICE, GRAPH, FILTER/BIND/VALUES) and yields one BGP per
//! maximal contiguous block of triples within a group.

use crate::term::{
    classify_iri, Bgp, NodeKind, PatternNode, TriplePattern, WellKnown, FX_NS, RDF_NS, RDF_TYPE,
    XSD_NS, XYZ_NS,
};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("literal subject at {line}:{column}: such patterns cannot have a solution")]
    LiteralSubject { line: usize, column: usize },
    #[error("unknown prefix '{prefix}' at {line}:{column}")]
    UnknownPrefix { prefix: String, line: usize, column: usize },
}

/// Result of reading a full query document.
#[derive(Debug, Clone, Default)]
pub struct ParsedDocument {
    pub bgps: Vec<Bgp>,
    pub prefixes: BTreeMap<String, String>,
    pub diagnostics: Vec<String>,
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Iri(String),
    PrefixedName(String, String),
    Variable(String),
    BlankNode(String),
    Literal { lexical: String, datatype: Option<DatatypeRef> },
    Keyword(String),
    A,
    Dot,
    Semicolon,
    Comma,
    OpenBrace,
    CloseBrace,
    /// A balanced `( ... )` region, kept opaque: expression syntax inside
    /// FILTER/BIND bodies is skipped, never interpreted.
    ParenBlock(String),
}

#[derive(Debug, Clone, PartialEq)]
enum DatatypeRef {
    Iri(String),
    Prefixed(String, String),
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
    column: usize,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Iri(i) => write!(f, "<{i}>"),
            Token::PrefixedName(p, l) => write!(f, "{p}:{l}"),
            Token::Variable(v) => write!(f, "?{v}"),
            Token::BlankNode(b) => write!(f, "_:{b}"),
            Token::Literal { lexical, .. } => write!(f, "\"{lexical}\""),
            Token::Keyword(k) => f.write_str(k),
            Token::A => f.write_str("a"),
            Token::Dot => f.write_str("."),
            Token::Semicolon => f.write_str(";"),
            Token::Comma => f.write_str(","),
            Token::OpenBrace => f.write_str("{"),
            Token::CloseBrace => f.write_str("}"),
            Token::ParenBlock(_) => f.write_str("(...)"),
        }
    }
}

struct Tokenizer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(input: &'a str) -> Self {
        Tokenizer { chars: input.chars().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, column: self.column, message: message.into() }
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c == '#' {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                } else if c.is_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, column) = (self.line, self.column);
            let Some(&c) = self.chars.peek() else { break };
            let token = match c {
                '<' => {
                    self.bump();
                    let mut iri = String::new();
                    loop {
                        match self.bump() {
                            Some('>') => break,
                            Some(c) if c.is_whitespace() => {
                                return Err(self.error("whitespace inside IRI"))
                            }
                            Some(c) => iri.push(c),
                            None => return Err(self.error("unterminated IRI")),
                        }
                    }
                    if iri.is_empty() {
                        return Err(self.error("empty IRI"));
                    }
                    Token::Iri(iri)
                }
                '?' | '$' => {
                    self.bump();
                    let name = self.take_name();
                    if name.is_empty() {
                        return Err(self.error("empty variable name"));
                    }
                    Token::Variable(name)
                }
                '"' | '\'' => {
                    let quote = c;
                    self.bump();
                    let mut lexical = String::new();
                    loop {
                        match self.bump() {
                            Some(c) if c == quote => break,
                            Some('\\') => match self.bump() {
                                Some('n') => lexical.push('\n'),
                                Some('t') => lexical.push('\t'),
                                Some('r') => lexical.push('\r'),
                                Some('\\') => lexical.push('\\'),
                                Some(c) if c == quote => lexical.push(quote),
                                Some('"') => lexical.push('"'),
                                Some('\'') => lexical.push('\''),
                                _ => return Err(self.error("bad escape in literal")),
                            },
                            Some('\n') | None => return Err(self.error("unterminated literal")),
                            Some(c) => lexical.push(c),
                        }
                    }
                    // Optional language tag or datatype.
                    let mut datatype = None;
                    if self.chars.peek() == Some(&'@') {
                        self.bump();
                        let tag = self.take_name();
                        if tag.is_empty() {
                            return Err(self.error("empty language tag"));
                        }
                        // Language tags are not modelled; the lexical form is kept.
                    } else if self.chars.peek() == Some(&'^') {
                        self.bump();
                        if self.bump() != Some('^') {
                            return Err(self.error("expected '^^' before datatype"));
                        }
                        match self.chars.peek() {
                            Some('<') => {
                                self.bump();
                                let mut iri = String::new();
                                loop {
                                    match self.bump() {
                                        Some('>') => break,
                                        Some(c) => iri.push(c),
                                        None => return Err(self.error("unterminated datatype IRI")),
                                    }
                                }
                                datatype = Some(DatatypeRef::Iri(iri));
                            }
                            _ => {
                                let name = self.take_name();
                                if self.chars.peek() == Some(&':') {
                                    self.bump();
                                    let local = self.take_name();
                                    datatype = Some(DatatypeRef::Prefixed(name, local));
                                } else {
                                    return Err(self.error("expected datatype IRI or prefixed name"));
                                }
                            }
                        }
                    }
                    Token::Literal { lexical, datatype }
                }
                '_' => {
                    self.bump();
                    if self.bump() != Some(':') {
                        return Err(self.error("expected ':' after '_' in blank node"));
                    }
                    let name = self.take_name();
                    if name.is_empty() {
                        return Err(self.error("empty blank node id"));
                    }
                    Token::BlankNode(name)
                }
                '.' => {
                    self.bump();
                    Token::Dot
                }
                ';' => {
                    self.bump();
                    Token::Semicolon
                }
                ',' => {
                    self.bump();
                    Token::Comma
                }
                '{' => {
                    self.bump();
                    Token::OpenBrace
                }
                '}' => {
                    self.bump();
                    Token::CloseBrace
                }
                '(' => {
                    self.bump();
                    let mut depth = 1;
                    let mut body = String::new();
                    while depth > 0 {
                        match self.bump() {
                            Some('(') => {
                                depth += 1;
                                body.push('(');
                            }
                            Some(')') => {
                                depth -= 1;
                                if depth > 0 {
                                    body.push(')');
                                }
                            }
                            Some(q @ ('"' | '\'')) => {
                                body.push(q);
                                loop {
                                    match self.bump() {
                                        Some('\\') => {
                                            body.push('\\');
                                            if let Some(c) = self.bump() {
                                                body.push(c);
                                            }
                                        }
                                        Some(c) => {
                                            body.push(c);
                                            if c == q {
                                                break;
                                            }
                                        }
                                        None => {
                                            return Err(
                                                self.error("unterminated literal in parentheses")
                                            )
                                        }
                                    }
                                }
                            }
                            Some(c) => body.push(c),
                            None => return Err(self.error("unterminated parentheses")),
                        }
                    }
                    Token::ParenBlock(body)
                }
                ')' => return Err(self.error("unmatched ')'")),
                c if c.is_ascii_digit() || c == '-' || c == '+' => {
                    let mut num = String::new();
                    num.push(self.bump().unwrap());
                    let mut is_decimal = false;
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_digit() {
                            num.push(self.bump().unwrap());
                        } else if c == '.' {
                            // A trailing dot is the triple terminator, not a
                            // decimal point; only consume when a digit follows.
                            let mut clone = self.chars.clone();
                            clone.next();
                            if clone.peek().is_some_and(|d| d.is_ascii_digit()) {
                                is_decimal = true;
                                num.push(self.bump().unwrap());
                            } else {
                                break;
                            }
                        } else {
                            break;
                        }
                    }
                    if num == "-" || num == "+" {
                        return Err(self.error("stray sign"));
                    }
                    let dt = if is_decimal { "decimal" } else { "integer" };
                    Token::Literal {
                        lexical: num,
                        datatype: Some(DatatypeRef::Iri(format!("{XSD_NS}{dt}"))),
                    }
                }
                c if is_name_start(c) => {
                    let name = self.take_name();
                    if self.chars.peek() == Some(&':') {
                        self.bump();
                        let local = self.take_local_name();
                        Token::PrefixedName(name, local)
                    } else if name == "a" {
                        Token::A
                    } else {
                        Token::Keyword(name)
                    }
                }
                ':' => {
                    // Default-prefix name, e.g. `:p`.
                    self.bump();
                    let local = self.take_local_name();
                    Token::PrefixedName(String::new(), local)
                }
                '*' => {
                    self.bump();
                    Token::Keyword("*".to_string())
                }
                c => return Err(self.error(format!("unexpected character '{c}'"))),
            };
            out.push(Spanned { token, line, column });
        }
        Ok(out)
    }

    fn take_name(&mut self) -> String {
        let mut name = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' {
                name.push(self.bump().unwrap());
            } else {
                break;
            }
        }
        name
    }

    fn take_local_name(&mut self) -> String {
        let mut name = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' || c == '.' {
                // A trailing dot terminates the triple instead.
                if c == '.' {
                    let mut clone = self.chars.clone();
                    clone.next();
                    match clone.peek() {
                        Some(&n) if n.is_alphanumeric() || n == '_' => {}
                        _ => break,
                    }
                }
                name.push(self.bump().unwrap());
            } else {
                break;
            }
        }
        name
    }
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

// ---------------------------------------------------------------------------
// Prefix environment
// ---------------------------------------------------------------------------

fn builtin_prefixes() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("rdf".to_string(), RDF_NS.to_string()),
        ("xyz".to_string(), XYZ_NS.to_string()),
        ("fx".to_string(), FX_NS.to_string()),
        ("xsd".to_string(), XSD_NS.to_string()),
    ])
}

struct Env {
    prefixes: BTreeMap<String, String>,
}

impl Env {
    fn new() -> Self {
        Env { prefixes: builtin_prefixes() }
    }

    fn expand(&self, prefix: &str, local: &str, line: usize, column: usize) -> Result<String, ParseError> {
        match self.prefixes.get(prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => Err(ParseError::UnknownPrefix { prefix: prefix.to_string(), line, column }),
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical BGP parsing
// ---------------------------------------------------------------------------

struct TokenStream {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl TokenStream {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Spanned { token: Token::Keyword(k), .. }) if k.eq_ignore_ascii_case(kw))
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self
            .peek()
            .map(|s| (s.line, s.column))
            .unwrap_or((0, 0));
        ParseError::Syntax { line, column, message: message.into() }
    }
}

fn node_from_token(
    spanned: &Spanned,
    env: &Env,
) -> Result<PatternNode, ParseError> {
    let Spanned { token, line, column } = spanned;
    match token {
        Token::Iri(iri) => Ok(PatternNode::iri(iri.clone())),
        Token::PrefixedName(p, l) => Ok(PatternNode::iri(env.expand(p, l, *line, *column)?)),
        Token::Variable(v) => Ok(PatternNode::variable(v.clone())),
        Token::BlankNode(b) => Ok(PatternNode::blank(b.clone())),
        Token::A => Ok(PatternNode::iri(RDF_TYPE)),
        Token::Literal { lexical, datatype } => {
            let dt = match datatype {
                None => None,
                Some(DatatypeRef::Iri(iri)) => Some(iri.clone()),
                Some(DatatypeRef::Prefixed(p, l)) => Some(env.expand(p, l, *line, *column)?),
            };
            Ok(PatternNode { kind: NodeKind::Literal, label: lexical.clone(), datatype: dt })
        }
        other => Err(ParseError::Syntax {
            line: *line,
            column: *column,
            message: format!("expected a term, found '{other}'"),
        }),
    }
}

fn check_positions(
    subject: &PatternNode,
    predicate: &PatternNode,
    spans: (&Spanned, &Spanned),
) -> Result<(), ParseError> {
    if subject.kind == NodeKind::Literal {
        return Err(ParseError::LiteralSubject { line: spans.0.line, column: spans.0.column });
    }
    if matches!(predicate.kind, NodeKind::Literal | NodeKind::BlankNode) {
        return Err(ParseError::Syntax {
            line: spans.1.line,
            column: spans.1.column,
            message: "predicate must be an IRI or variable".to_string(),
        });
    }
    Ok(())
}

/// Parses the canonical BGP text format.
pub fn parse_bgp_text(input: &str) -> Result<Bgp, ParseError> {
    let tokens = Tokenizer::new(input).tokenize()?;
    let mut stream = TokenStream { tokens, pos: 0 };
    let mut env = Env::new();
    let mut triples = Vec::new();

    loop {
        if stream.at_keyword("prefix") {
            stream.next();
            parse_prefix_decl(&mut stream, &mut env)?;
            continue;
        }
        let Some(s_tok) = stream.next() else { break };
        let subject = node_from_token(&s_tok, &env)?;
        let p_tok = stream
            .next()
            .ok_or_else(|| stream.error_here("expected predicate"))?;
        let predicate = node_from_token(&p_tok, &env)?;
        check_positions(&subject, &predicate, (&s_tok, &p_tok))?;
        let o_tok = stream
            .next()
            .ok_or_else(|| stream.error_here("expected object"))?;
        let object = node_from_token(&o_tok, &env)?;
        match stream.next() {
            Some(Spanned { token: Token::Dot, .. }) => {}
            Some(s) => {
                return Err(ParseError::Syntax {
                    line: s.line,
                    column: s.column,
                    message: format!("expected '.', found '{}'", s.token),
                })
            }
            None => {
                return Err(ParseError::Syntax {
                    line: 0,
                    column: 0,
                    message: "expected '.' at end of triple".to_string(),
                })
            }
        }
        triples.push(TriplePattern { subject, predicate, object });
    }
    Ok(Bgp::new(triples))
}

fn parse_prefix_decl(stream: &mut TokenStream, env: &mut Env) -> Result<(), ParseError> {
    let name = match stream.next() {
        Some(Spanned { token: Token::PrefixedName(p, l), line, column }) => {
            if !l.is_empty() {
                return Err(ParseError::Syntax {
                    line,
                    column,
                    message: "prefix declaration must end with ':'".to_string(),
                });
            }
            p
        }
        other => {
            let (line, column) = other.map(|s| (s.line, s.column)).unwrap_or((0, 0));
            return Err(ParseError::Syntax {
                line,
                column,
                message: "expected prefix label".to_string(),
            });
        }
    };
    match stream.next() {
        Some(Spanned { token: Token::Iri(iri), .. }) => {
            env.prefixes.insert(name, iri);
            Ok(())
        }
        other => {
            let (line, column) = other.map(|s| (s.line, s.column)).unwrap_or((0, 0));
            Err(ParseError::Syntax { line, column, message: "expected namespace IRI".to_string() })
        }
    }
}

/// Renders a BGP in the canonical format with fully expanded IRIs. The output
/// parses back to an equal BGP.
pub fn serialize_bgp(bgp: &Bgp) -> String {
    let mut out = String::new();
    for t in &bgp.triples {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Configuration stripping
// ---------------------------------------------------------------------------

/// Removes triples whose predicate is an engine-configuration IRI in the
/// `fx:` namespace. `fx:root` is a model term and is never stripped.
pub fn strip_config_triples(bgp: &Bgp) -> Bgp {
    let triples = bgp
        .triples
        .iter()
        .filter(|t| {
            !(t.predicate.kind == NodeKind::Iri
                && classify_iri(&t.predicate.label) == WellKnown::FxConfigNamespace)
        })
        .cloned()
        .collect();
    Bgp { triples, source_label: bgp.source_label.clone() }
}

// ---------------------------------------------------------------------------
// Query extraction
// ---------------------------------------------------------------------------

/// Extracts BGPs from a SPARQL query in the supported subset.
///
/// UNION branches, OPTIONAL bodies, SERVICE bodies, GRAPH bodies and nested
/// groups each contribute their own BGPs; FILTER, BIND and VALUES contents
/// are skipped. Property paths and subqueries are outside the subset and
/// reject the document.
pub fn extract_bgps_from_query(input: &str) -> Result<ParsedDocument, ParseError> {
    let tokens = Tokenizer::new(input).tokenize()?;
    let mut stream = TokenStream { tokens, pos: 0 };
    let mut env = Env::new();
    let mut doc = ParsedDocument::default();

    // Prologue and query form. Everything up to the first '{' is sugar we
    // only need prefixes from, except CONSTRUCT whose template block is
    // skipped rather than extracted.
    let mut construct = false;
    loop {
        if stream.at_keyword("prefix") {
            stream.next();
            parse_prefix_decl(&mut stream, &mut env)?;
            continue;
        }
        if stream.at_keyword("base") {
            stream.next();
            stream.next(); // the IRI
            continue;
        }
        match stream.peek() {
            Some(Spanned { token: Token::Keyword(k), .. }) => {
                if k.eq_ignore_ascii_case("construct") {
                    construct = true;
                }
                stream.next();
            }
            Some(Spanned { token: Token::OpenBrace, .. }) => break,
            Some(Spanned { token: Token::Variable(_), .. })
            | Some(Spanned { token: Token::ParenBlock(_), .. })
            | Some(Spanned { token: Token::Iri(_), .. })
            | Some(Spanned { token: Token::PrefixedName(_, _), .. }) => {
                stream.next();
            }
            Some(s) => {
                return Err(ParseError::Syntax {
                    line: s.line,
                    column: s.column,
                    message: format!("unexpected token '{}' before group", s.token),
                })
            }
            None => {
                return Err(stream.error_here("query has no group graph pattern"));
            }
        }
    }

    if construct {
        skip_group(&mut stream)?;
        // Skip over WHERE keyword if present.
        if stream.at_keyword("where") {
            stream.next();
        }
    }

    expect_open_brace(&mut stream)?;
    parse_group(&mut stream, &env, &mut doc)?;
    // Trailing solution modifiers (LIMIT, ORDER BY, ...) are ignored.

    doc.prefixes = env.prefixes;
    doc.bgps = doc
        .bgps
        .iter()
        .map(strip_config_triples)
        .collect();
    Ok(doc)
}

fn expect_open_brace(stream: &mut TokenStream) -> Result<(), ParseError> {
    match stream.next() {
        Some(Spanned { token: Token::OpenBrace, .. }) => Ok(()),
        other => {
            let (line, column) = other.map(|s| (s.line, s.column)).unwrap_or((0, 0));
            Err(ParseError::Syntax { line, column, message: "expected '{'".to_string() })
        }
    }
}

/// Skips a balanced `{ ... }` block without interpreting it.
fn skip_group(stream: &mut TokenStream) -> Result<(), ParseError> {
    expect_open_brace(stream)?;
    let mut depth = 1;
    while depth > 0 {
        match stream.next() {
            Some(Spanned { token: Token::OpenBrace, .. }) => depth += 1,
            Some(Spanned { token: Token::CloseBrace, .. }) => depth -= 1,
            Some(_) => {}
            None => return Err(stream.error_here("unterminated group")),
        }
    }
    Ok(())
}

/// Consumes one opaque `( ... )` block.
fn skip_parens(stream: &mut TokenStream) -> Result<(), ParseError> {
    match stream.next() {
        Some(Spanned { token: Token::ParenBlock(_), .. }) => Ok(()),
        other => {
            let (line, column) = other.map(|s| (s.line, s.column)).unwrap_or((0, 0));
            Err(ParseError::Syntax { line, column, message: "expected '('".to_string() })
        }
    }
}

/// Parses the inside of a group after its '{' has been consumed. Each
/// maximal contiguous run of triples becomes one BGP.
fn parse_group(
    stream: &mut TokenStream,
    env: &Env,
    doc: &mut ParsedDocument,
) -> Result<(), ParseError> {
    let mut block: Vec<TriplePattern> = Vec::new();

    macro_rules! flush {
        () => {
            if !block.is_empty() {
                doc.bgps.push(Bgp::new(std::mem::take(&mut block)));
            }
        };
    }

    loop {
        let Some(spanned) = stream.peek().cloned() else {
            return Err(stream.error_here("unterminated group"));
        };
        match &spanned.token {
            Token::CloseBrace => {
                stream.next();
                flush!();
                return Ok(());
            }
            Token::OpenBrace => {
                // Nested group: its triples form separate BGPs. A UNION may
                // follow, each branch parsed the same way.
                flush!();
                stream.next();
                parse_group(stream, env, doc)?;
                while stream.at_keyword("union") {
                    stream.next();
                    expect_open_brace(stream)?;
                    parse_group(stream, env, doc)?;
                }
            }
            Token::Keyword(k) if k.eq_ignore_ascii_case("optional") || k.eq_ignore_ascii_case("minus") => {
                flush!();
                stream.next();
                expect_open_brace(stream)?;
                parse_group(stream, env, doc)?;
            }
            Token::Keyword(k) if k.eq_ignore_ascii_case("service") => {
                flush!();
                stream.next();
                if stream.at_keyword("silent") {
                    stream.next();
                }
                // Service endpoint: IRI, prefixed name or variable.
                match stream.peek() {
                    Some(Spanned { token: Token::Iri(_), .. })
                    | Some(Spanned { token: Token::PrefixedName(_, _), .. })
                    | Some(Spanned { token: Token::Variable(_), .. }) => {
                        stream.next();
                    }
                    _ => return Err(stream.error_here("expected SERVICE endpoint")),
                }
                expect_open_brace(stream)?;
                parse_group(stream, env, doc)?;
            }
            Token::Keyword(k) if k.eq_ignore_ascii_case("graph") => {
                doc.diagnostics.push(
                    "GRAPH body treated as a group graph pattern".to_string(),
                );
                flush!();
                stream.next();
                match stream.peek() {
                    Some(Spanned { token: Token::Iri(_), .. })
                    | Some(Spanned { token: Token::PrefixedName(_, _), .. })
                    | Some(Spanned { token: Token::Variable(_), .. }) => {
                        stream.next();
                    }
                    _ => return Err(stream.error_here("expected GRAPH name")),
                }
                expect_open_brace(stream)?;
                parse_group(stream, env, doc)?;
            }
            Token::Keyword(k) if k.eq_ignore_ascii_case("filter") => {
                stream.next();
                if stream.at_keyword("exists") || stream.at_keyword("not") {
                    // FILTER [NOT] EXISTS { ... }
                    while stream.at_keyword("exists") || stream.at_keyword("not") {
                        stream.next();
                    }
                    skip_group(stream)?;
                } else {
                    // Optional function name before the argument list,
                    // e.g. FILTER regex(?x, "p") or FILTER ex:fn(?x).
                    if matches!(
                        stream.peek(),
                        Some(Spanned { token: Token::Keyword(_), .. })
                            | Some(Spanned { token: Token::PrefixedName(_, _), .. })
                            | Some(Spanned { token: Token::Iri(_), .. })
                    ) {
                        stream.next();
                    }
                    skip_parens(stream)?;
                }
            }
            Token::Keyword(k) if k.eq_ignore_ascii_case("bind") => {
                stream.next();
                skip_parens(stream)?;
            }
            Token::Keyword(k) if k.eq_ignore_ascii_case("values") => {
                stream.next();
                // VALUES ?v { ... } or VALUES ( ... ) { ... }
                match stream.peek() {
                    Some(Spanned { token: Token::Variable(_), .. }) => {
                        stream.next();
                    }
                    Some(Spanned { token: Token::ParenBlock(_), .. }) => skip_parens(stream)?,
                    _ => return Err(stream.error_here("expected VALUES variables")),
                }
                skip_group(stream)?;
            }
            Token::Keyword(k) if k.eq_ignore_ascii_case("select") => {
                return Err(ParseError::Syntax {
                    line: spanned.line,
                    column: spanned.column,
                    message: "subqueries are not supported".to_string(),
                });
            }
            Token::Dot => {
                stream.next();
            }
            _ => {
                parse_triples_same_subject(stream, env, &mut block)?;
            }
        }
    }
}

/// Parses `subject predicate object (';' predicate object)* (',' object)*`.
fn parse_triples_same_subject(
    stream: &mut TokenStream,
    env: &Env,
    block: &mut Vec<TriplePattern>,
) -> Result<(), ParseError> {
    let s_tok = stream.next().unwrap();
    let subject = node_from_token(&s_tok, env)?;
    loop {
        let p_tok = stream
            .next()
            .ok_or_else(|| stream.error_here("expected predicate"))?;
        // Property paths are outside the subset; a bare '^' or path operator
        // shows up as an unexpected character already, but 'a'/'*' sequences
        // reach here.
        let predicate = node_from_token(&p_tok, env)?;
        check_positions(&subject, &predicate, (&s_tok, &p_tok))?;
        loop {
            let o_tok = stream
                .next()
                .ok_or_else(|| stream.error_here("expected object"))?;
            let object = node_from_token(&o_tok, env)?;
            block.push(TriplePattern {
                subject: subject.clone(),
                predicate: predicate.clone(),
                object,
            });
            match stream.peek() {
                Some(Spanned { token: Token::Comma, .. }) => {
                    stream.next();
                }
                _ => break,
            }
        }
        match stream.peek() {
            Some(Spanned { token: Token::Semicolon, .. }) => {
                stream.next();
                // A dangling ';' before '.' or '}' is permitted.
                if matches!(
                    stream.peek(),
                    Some(Spanned { token: Token::Dot, .. })
                        | Some(Spanned { token: Token::CloseBrace, .. })
                ) {
                    break;
                }
            }
            _ => break,
        }
    }
    if let Some(Spanned { token: Token::Dot, .. }) = stream.peek() {
        stream.next();
    }
    Ok(())
}
