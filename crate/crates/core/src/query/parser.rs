use std::collections::HashMap;

use super::ast::{CompareOp, Filter, OrderBy, PatternTerm, Query, TriplePattern};
use super::QueryError;
use crate::rdf::Term;
use crate::vocab::{Iri, TermRegistry, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER};

/// Keywords of SPARQL 1.1 that the subset deliberately rejects.
const UNSUPPORTED: &[&str] = &[
    "OPTIONAL", "UNION", "SERVICE", "GRAPH", "MINUS", "BIND", "VALUES", "GROUP", "HAVING",
    "DISTINCT", "REDUCED", "OFFSET", "CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE", "LOAD",
    "CLEAR", "CREATE", "DROP", "FROM", "NAMED", "BASE", "EXISTS", "NOT", "COUNT", "SUM", "MIN",
    "MAX", "AVG", "SAMPLE", "REGEX", "STR", "LANG", "BOUND", "IF", "COALESCE",
];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    IriRef(String),
    PName(String, String),
    Var(String),
    Str(String),
    Number(String),
    Word(String),
    Punct(&'static str),
    LangTag,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

fn is_iri_char(c: char) -> bool {
    !(c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn err(&self, offset: usize, message: impl Into<String>) -> QueryError {
        QueryError::syntax(self.src, offset, message)
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let rest = self.rest();
        let end = rest.find(|c| !f(c)).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn local_name(&mut self) -> String {
        // Local part of a prefixed name; a trailing '.' ends the statement.
        let rest = self.rest();
        let mut end = 0;
        for (i, c) in rest.char_indices() {
            if is_name_char(c) || c == '.' {
                end = i + c.len_utf8();
            } else {
                break;
            }
        }
        let local = rest[..end].trim_end_matches('.');
        self.pos += local.len();
        local.to_string()
    }

    fn next(&mut self) -> Result<Spanned, QueryError> {
        self.skip_ws();
        let offset = self.pos;
        let Some(c) = self.peek() else {
            return Ok(Spanned { tok: Tok::Eof, offset });
        };
        let tok = match c {
            '<' => {
                let body = &self.rest()[1..];
                let end = body.find(|c| !is_iri_char(c)).unwrap_or(body.len());
                if body[end..].starts_with('>') {
                    self.pos += end + 2;
                    Tok::IriRef(body[..end].to_string())
                } else if body.starts_with('=') {
                    self.pos += 2;
                    Tok::Punct("<=")
                } else {
                    self.pos += 1;
                    Tok::Punct("<")
                }
            }
            '>' | '!' | '=' => {
                let two = self.rest().get(..2).unwrap_or("");
                let (p, n) = match two {
                    ">=" => (">=", 2),
                    "!=" => ("!=", 2),
                    _ if c == '>' => (">", 1),
                    _ if c == '=' => ("=", 1),
                    _ => return Err(self.err(offset, "unexpected '!'")),
                };
                self.pos += n;
                Tok::Punct(p)
            }
            '{' | '}' | '(' | ')' | '.' | ';' | ',' | '*' => {
                self.pos += 1;
                Tok::Punct(match c {
                    '{' => "{",
                    '}' => "}",
                    '(' => "(",
                    ')' => ")",
                    '.' => ".",
                    ';' => ";",
                    ',' => ",",
                    _ => "*",
                })
            }
            '^' => {
                if self.rest().starts_with("^^") {
                    self.pos += 2;
                    Tok::Punct("^^")
                } else {
                    return Err(self.err(offset, "property paths are not supported"));
                }
            }
            '@' => {
                self.pos += 1;
                self.take_while(is_name_char);
                Tok::LangTag
            }
            '?' | '$' => {
                self.pos += 1;
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(self.err(offset, "empty variable name"));
                }
                Tok::Var(name.to_string())
            }
            '"' | '\'' => Tok::Str(self.string(c)?),
            '0'..='9' | '+' | '-' => Tok::Number(self.number()?),
            ':' => {
                self.pos += 1;
                Tok::PName(String::new(), self.local_name())
            }
            c if is_name_start(c) => {
                let word = self.take_while(is_name_char);
                if self.peek() == Some(':') {
                    self.pos += 1;
                    Tok::PName(word.to_string(), self.local_name())
                } else {
                    Tok::Word(word.to_string())
                }
            }
            other => return Err(self.err(offset, format!("unexpected character {other:?}"))),
        };
        Ok(Spanned { tok, offset })
    }

    fn string(&mut self, quote: char) -> Result<String, QueryError> {
        let start = self.pos;
        self.pos += 1;
        let mut out = String::new();
        let mut chars = self.rest().char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                c if c == quote => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\n' | '\r' => break,
                '\\' => match chars.next() {
                    Some((_, 'n')) => out.push('\n'),
                    Some((_, 'r')) => out.push('\r'),
                    Some((_, 't')) => out.push('\t'),
                    Some((_, '"')) => out.push('"'),
                    Some((_, '\'')) => out.push('\''),
                    Some((_, '\\')) => out.push('\\'),
                    _ => return Err(self.err(start + 1 + i, "invalid escape sequence")),
                },
                c => out.push(c),
            }
        }
        Err(self.err(start, "unterminated string"))
    }

    fn number(&mut self) -> Result<String, QueryError> {
        let start = self.pos;
        let rest = self.rest();
        let mut end = 0;
        let bytes = rest.as_bytes();
        if matches!(bytes.first(), Some(b'+' | b'-')) {
            end = 1;
        }
        let digits = |from: usize| from + bytes[from..].iter().take_while(|b| b.is_ascii_digit()).count();
        let int_end = digits(end);
        end = int_end;
        let mut frac = false;
        if bytes.get(end) == Some(&b'.') && bytes.get(end + 1).is_some_and(u8::is_ascii_digit) {
            end = digits(end + 1);
            frac = true;
        }
        if int_end == usize::from(matches!(bytes.first(), Some(b'+' | b'-'))) && !frac {
            return Err(self.err(start, "expected a number"));
        }
        if matches!(bytes.get(end), Some(b'e' | b'E')) {
            let mut e = end + 1;
            if matches!(bytes.get(e), Some(b'+' | b'-')) {
                e += 1;
            }
            let exp_end = digits(e);
            if exp_end == e {
                return Err(self.err(start + end, "malformed exponent"));
            }
            end = exp_end;
        }
        self.pos += end;
        Ok(rest[..end].to_string())
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Spanned>,
    at: usize,
    reg: &'a TermRegistry,
    prefixes: HashMap<String, String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.at].offset
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> QueryError {
        QueryError::syntax(self.src, self.offset(), message)
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::IriRef(i) => format!("<{i}>"),
            Tok::PName(p, l) => format!("{p}:{l}"),
            Tok::Var(v) => format!("?{v}"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::Number(n) => n.clone(),
            Tok::Word(w) => w.clone(),
            Tok::Punct(p) => format!("'{p}'"),
            Tok::LangTag => "language tag".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    /// Turns a bare word into an unsupported-feature error when it names one.
    fn check_word(&self, t: &Tok) -> Result<(), QueryError> {
        if let Tok::Word(w) = t {
            let upper = w.to_ascii_uppercase();
            if UNSUPPORTED.contains(&upper.as_str()) {
                return Err(QueryError::Unsupported(upper));
            }
        }
        Ok(())
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), QueryError> {
        if self.is_keyword(kw) {
            self.bump();
            return Ok(());
        }
        let t = self.peek().clone();
        self.check_word(&t)?;
        Err(self.err(format!("expected {kw}, found {}", Self::describe(&t))))
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), QueryError> {
        if self.peek() == &Tok::Punct(static_punct(p)) {
            self.bump();
            return Ok(());
        }
        let t = self.peek().clone();
        self.check_word(&t)?;
        Err(self.err(format!("expected '{p}', found {}", Self::describe(&t))))
    }

    fn resolve_iri(&self, text: &str) -> Result<Iri, QueryError> {
        let has_scheme = text
            .split_once(':')
            .is_some_and(|(s, _)| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c)));
        let full = if has_scheme {
            text.to_string()
        } else {
            format!("{}{text}", self.reg.base())
        };
        Iri::new(&full).map_err(|e| self.err(e.to_string()))
    }

    fn expand(&self, prefix: &str, local: &str) -> Result<Iri, QueryError> {
        let ns = match self.prefixes.get(prefix) {
            Some(ns) => ns.as_str(),
            None => self
                .reg
                .namespace(prefix)
                .ok_or_else(|| QueryError::UnknownPrefix(prefix.to_string()))?,
        };
        Iri::new(format!("{ns}{local}")).map_err(|e| self.err(e.to_string()))
    }

    fn iri_token(&self, t: &Tok) -> Result<Option<Iri>, QueryError> {
        match t {
            Tok::IriRef(i) => self.resolve_iri(i).map(Some),
            Tok::PName(p, l) => self.expand(p, l).map(Some),
            _ => Ok(None),
        }
    }

    fn query(mut self) -> Result<Query, QueryError> {
        while self.is_keyword("PREFIX") {
            self.bump();
            let Tok::PName(p, l) = self.bump() else {
                return Err(self.err("expected a prefix name such as 'ex:'"));
            };
            if !l.is_empty() {
                return Err(self.err(format!("prefix declaration {p}:{l} has a local part")));
            }
            let at = self.offset();
            let Tok::IriRef(ns) = self.bump() else {
                return Err(QueryError::syntax(self.src, at, "expected <namespace IRI>"));
            };
            let ns = self.resolve_iri(&ns)?;
            self.prefixes.insert(p, ns.as_str().to_string());
        }

        self.expect_keyword("SELECT")?;
        let mut select = Vec::new();
        let mut star = false;
        if self.peek() == &Tok::Punct("*") {
            self.bump();
            star = true;
        } else {
            while let Tok::Var(v) = self.peek().clone() {
                self.bump();
                if select.contains(&v) {
                    return Err(self.err(format!("?{v} is selected twice")));
                }
                select.push(v);
            }
            if select.is_empty() {
                let t = self.peek().clone();
                self.check_word(&t)?;
                return Err(self.err("expected '*' or at least one variable after SELECT"));
            }
        }

        if self.is_keyword("WHERE") {
            self.bump();
        }
        self.expect_punct("{")?;
        let mut patterns = Vec::new();
        let mut filters = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Punct("}") => {
                    self.bump();
                    break;
                }
                Tok::Punct(".") => {
                    self.bump();
                }
                Tok::Punct("{") => return Err(QueryError::Unsupported("nested group".into())),
                Tok::Word(w) if w.eq_ignore_ascii_case("FILTER") => {
                    self.bump();
                    filters.push(self.filter()?);
                }
                _ => self.triples(&mut patterns)?,
            }
        }

        let mut order_by = None;
        if self.is_keyword("ORDER") {
            self.bump();
            self.expect_keyword("BY")?;
            order_by = Some(self.order_key()?);
            if matches!(self.peek(), Tok::Var(_))
                || self.is_keyword("ASC")
                || self.is_keyword("DESC")
            {
                return Err(QueryError::Unsupported("multiple ORDER BY keys".into()));
            }
        }
        let mut limit = None;
        if self.is_keyword("LIMIT") {
            self.bump();
            let at = self.offset();
            let n = match self.bump() {
                Tok::Number(n) => n.parse::<usize>().ok().filter(|n| *n > 0),
                _ => None,
            };
            limit = Some(n.ok_or_else(|| QueryError::syntax(self.src, at, "LIMIT expects a positive integer"))?);
        }
        match self.peek().clone() {
            Tok::Eof => {}
            t => {
                self.check_word(&t)?;
                return Err(self.err(format!("unexpected {} after the query", Self::describe(&t))));
            }
        }

        let mut q = Query {
            select,
            patterns,
            filters,
            order_by,
            limit,
        };
        let vars = q.pattern_vars();
        if star {
            q.select = vars.clone();
        }
        let mentioned = q
            .select
            .iter()
            .chain(q.filters.iter().map(|f| &f.var))
            .chain(q.order_by.iter().map(|o| &o.var));
        for v in mentioned {
            if !vars.contains(v) {
                return Err(QueryError::UnboundVariable(v.clone()));
            }
        }
        Ok(q)
    }

    fn order_key(&mut self) -> Result<OrderBy, QueryError> {
        if self.is_keyword("ASC") || self.is_keyword("DESC") {
            let descending = self.is_keyword("DESC");
            self.bump();
            self.expect_punct("(")?;
            let var = self.var()?;
            self.expect_punct(")")?;
            return Ok(OrderBy { var, descending });
        }
        Ok(OrderBy {
            var: self.var()?,
            descending: false,
        })
    }

    fn var(&mut self) -> Result<String, QueryError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(v)
            }
            t => {
                self.check_word(&t)?;
                Err(self.err(format!("expected a variable, found {}", Self::describe(&t))))
            }
        }
    }

    fn triples(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), QueryError> {
        let subject = self.subject_or_predicate("subject")?;
        loop {
            let predicate = if self.is_keyword("a") {
                self.bump();
                PatternTerm::Const(Term::Iri(self.reg.terms().rdf_type.clone()))
            } else {
                self.subject_or_predicate("predicate")?
            };
            loop {
                let object = self.object()?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if self.peek() == &Tok::Punct(",") {
                    self.bump();
                } else {
                    break;
                }
            }
            if self.peek() != &Tok::Punct(";") {
                break;
            }
            while self.peek() == &Tok::Punct(";") {
                self.bump();
            }
            if matches!(self.peek(), Tok::Punct("." | "}")) {
                break;
            }
        }
        match self.peek() {
            Tok::Punct("." | "}") => Ok(()),
            Tok::Word(w) if w.eq_ignore_ascii_case("FILTER") => Ok(()),
            t => {
                let t = t.clone();
                self.check_word(&t)?;
                Err(self.err(format!("expected '.' or '}}', found {}", Self::describe(&t))))
            }
        }
    }

    fn subject_or_predicate(&mut self, what: &str) -> Result<PatternTerm, QueryError> {
        let t = self.peek().clone();
        if let Tok::Var(v) = t {
            self.bump();
            return Ok(PatternTerm::Var(v));
        }
        if let Some(iri) = self.iri_token(&t)? {
            self.bump();
            return Ok(PatternTerm::Const(Term::Iri(iri)));
        }
        self.check_word(&t)?;
        Err(self.err(format!(
            "expected a variable or IRI as {what}, found {}",
            Self::describe(&t)
        )))
    }

    fn object(&mut self) -> Result<PatternTerm, QueryError> {
        if let Tok::Var(v) = self.peek().clone() {
            self.bump();
            return Ok(PatternTerm::Var(v));
        }
        Ok(PatternTerm::Const(self.constant()?))
    }

    fn constant(&mut self) -> Result<Term, QueryError> {
        let at = self.offset();
        let t = self.peek().clone();
        if let Some(iri) = self.iri_token(&t)? {
            self.bump();
            return Ok(Term::Iri(iri));
        }
        match t {
            Tok::Str(s) => {
                self.bump();
                match self.peek().clone() {
                    Tok::LangTag => Err(QueryError::Unsupported("language-tagged literal".into())),
                    Tok::Punct("^^") => {
                        self.bump();
                        let dt_tok = self.bump();
                        let dt = self
                            .iri_token(&dt_tok)?
                            .ok_or_else(|| self.err("expected a datatype IRI after '^^'"))?;
                        Term::typed(s, dt).map_err(|e| QueryError::syntax(self.src, at, e.to_string()))
                    }
                    _ => Ok(Term::plain(s)),
                }
            }
            Tok::Number(n) => {
                self.bump();
                let dt = if n.contains(['e', 'E']) {
                    XSD_DOUBLE
                } else if n.contains('.') {
                    XSD_DECIMAL
                } else {
                    XSD_INTEGER
                };
                Term::typed(n, Iri::new(dt).expect("static IRI"))
                    .map_err(|e| QueryError::syntax(self.src, at, e.to_string()))
            }
            t => {
                self.check_word(&t)?;
                Err(self.err(format!("expected an RDF term, found {}", Self::describe(&t))))
            }
        }
    }

    fn filter(&mut self) -> Result<Filter, QueryError> {
        let open = self.offset();
        self.expect_punct("(")?;
        let lhs = self.operand()?;
        let op = match self.peek().clone() {
            Tok::Punct("=") => CompareOp::Eq,
            Tok::Punct("!=") => CompareOp::Ne,
            Tok::Punct("<") => CompareOp::Lt,
            Tok::Punct("<=") => CompareOp::Le,
            Tok::Punct(">") => CompareOp::Gt,
            Tok::Punct(">=") => CompareOp::Ge,
            t => {
                self.check_word(&t)?;
                return Err(self.err(format!(
                    "expected a comparison operator, found {}",
                    Self::describe(&t)
                )));
            }
        };
        self.bump();
        let rhs = self.operand()?;
        self.expect_punct(")")?;
        match (lhs, rhs) {
            (PatternTerm::Var(var), PatternTerm::Const(constant)) => Ok(Filter { var, op, constant }),
            (PatternTerm::Const(constant), PatternTerm::Var(var)) => Ok(Filter {
                var,
                op: op.flip(),
                constant,
            }),
            _ => Err(QueryError::syntax(
                self.src,
                open,
                "FILTER must compare one variable with one constant",
            )),
        }
    }

    fn operand(&mut self) -> Result<PatternTerm, QueryError> {
        if let Tok::Word(w) = self.peek().clone() {
            if self.toks.get(self.at + 1).is_some_and(|n| n.tok == Tok::Punct("(")) {
                return Err(QueryError::Unsupported(w.to_ascii_uppercase()));
            }
        }
        self.object()
    }
}

fn static_punct(p: &str) -> &'static str {
    ["{", "}", "(", ")", ".", ";", ",", "*", "^^", "=", "!=", "<", "<=", ">", ">="]
        .into_iter()
        .find(|s| *s == p)
        .expect("known punctuation")
}

/// Parses the supported subset: `PREFIX` declarations, `SELECT` with
/// variables or `*`, a `WHERE` block of triple patterns and
/// `FILTER(?var op constant)`, then optional `ORDER BY` and `LIMIT`.
///
/// Relative IRIs such as `<pv>` resolve against the registry base; prefixed
/// names expand through query `PREFIX`es first, then the registry.
pub fn parse_query(text: &str, reg: &TermRegistry) -> Result<Query, QueryError> {
    let mut lexer = Lexer { src: text, pos: 0 };
    let mut toks = Vec::new();
    loop {
        let t = lexer.next()?;
        let eof = t.tok == Tok::Eof;
        toks.push(t);
        if eof {
            break;
        }
    }
    Parser {
        src: text,
        toks,
        at: 0,
        reg,
        prefixes: HashMap::new(),
    }
    .query()
}
