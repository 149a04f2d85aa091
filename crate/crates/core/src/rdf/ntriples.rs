//! Line-based N-Triples reader and writer (no blank nodes, no language tags).

use thiserror::Error;

use super::{Graph, Term, Triple};
use crate::exec::Parallelism;
use crate::vocab::Iri;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("N-Triples line {line}, column {column}: {message}")]
pub struct NTriplesError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub(crate) fn write_triple(t: &Triple, out: &mut String) {
    out.push('<');
    out.push_str(t.subject.as_str());
    out.push_str("> <");
    out.push_str(t.predicate.as_str());
    out.push_str("> ");
    t.object.write_ntriples(out);
    out.push_str(" .\n");
}

/// One line per triple, in the given order.
pub fn serialize_ntriples(triples: &[Triple]) -> String {
    let mut out = String::with_capacity(triples.len() * 96);
    for t in triples {
        write_triple(t, &mut out);
    }
    out
}

pub fn parse_ntriples(text: &str) -> Result<Graph, NTriplesError> {
    parse_ntriples_with(text, Parallelism::default())
}

/// Lines are parsed independently (in parallel when enabled) and then inserted
/// in document order. The reported error is the first one in the document.
pub fn parse_ntriples_with(text: &str, par: Parallelism) -> Result<Graph, NTriplesError> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let parsed = par.try_map(&lines, |(n, l)| parse_line(l, *n))?;
    Ok(parsed.into_iter().flatten().collect())
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> NTriplesError {
        NTriplesError {
            line: self.line,
            column: self.text[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn hex_escape(&mut self, digits: usize) -> Result<char, NTriplesError> {
        let start = self.pos;
        let end = start + digits;
        let hex = self
            .text
            .get(start..end)
            .filter(|h| h.bytes().all(|b| b.is_ascii_hexdigit()))
            .ok_or_else(|| self.err("malformed \\u escape"))?;
        let code = u32::from_str_radix(hex, 16).map_err(|_| self.err("malformed \\u escape"))?;
        self.pos = end;
        char::from_u32(code).ok_or_else(|| self.err("escape is not a Unicode scalar value"))
    }

    fn iri(&mut self) -> Result<Iri, NTriplesError> {
        if self.eat("_:") {
            return Err(self.err("blank nodes are not supported"));
        }
        if !self.eat("<") {
            return Err(self.err("expected '<'"));
        }
        let rest = &self.text[self.pos..];
        if let Some(end) = rest.find(['>', '\\']).filter(|&i| rest.as_bytes()[i] == b'>') {
            self.pos += end + 1;
            return Iri::new(&rest[..end]).map_err(|e| self.err(e.to_string()));
        }
        let mut text = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err("unterminated IRI")),
                Some('>') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('u') => self.hex_escape(4)?,
                        Some('U') => self.hex_escape(8)?,
                        _ => return Err(self.err("invalid escape in IRI")),
                    };
                    text.push(c);
                }
                Some(c) => text.push(c),
            }
        }
        Iri::new(&text).map_err(|e| self.err(e.to_string()))
    }

    fn object(&mut self) -> Result<Term, NTriplesError> {
        if self.peek() != Some('"') {
            return self.iri().map(Term::Iri);
        }
        self.pos += 1;
        let rest = &self.text[self.pos..];
        let lexical = match rest.find(['"', '\\', '\n', '\r']) {
            Some(end) if rest.as_bytes()[end] == b'"' => {
                self.pos += end + 1;
                rest[..end].to_string()
            }
            _ => self.escaped_literal()?,
        };
        if self.eat("^^") {
            let datatype = self.iri()?;
            Term::typed(lexical, datatype).map_err(|e| self.err(e.to_string()))
        } else if self.peek() == Some('@') {
            Err(self.err("language-tagged literals are not supported"))
        } else {
            Ok(Term::Plain(lexical))
        }
    }

    fn escaped_literal(&mut self) -> Result<String, NTriplesError> {
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err("unterminated literal")),
                Some('"') => return Ok(lexical),
                Some('\n' | '\r') => return Err(self.err("raw line break in literal")),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_escape(4)?,
                        Some('U') => self.hex_escape(8)?,
                        _ => return Err(self.err("invalid escape in literal")),
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
    }
}

fn parse_line(line: &str, number: usize) -> Result<Option<Triple>, NTriplesError> {
    let mut c = Cursor {
        text: line.trim_end_matches('\r'),
        pos: 0,
        line: number,
    };
    c.skip_ws();
    if matches!(c.peek(), None | Some('#')) {
        return Ok(None);
    }
    let subject = c.iri()?;
    c.skip_ws();
    let predicate = c.iri()?;
    c.skip_ws();
    let object = c.object()?;
    c.skip_ws();
    if !c.eat(".") {
        return Err(c.err("expected '.'"));
    }
    c.skip_ws();
    if !matches!(c.peek(), None | Some('#')) {
        return Err(c.err("trailing content after '.'"));
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_document() {
        assert!(parse_ntriples("").unwrap().is_empty());
        assert_eq!(serialize_ntriples(&[]), "");
        assert!(parse_ntriples("# only a comment\n\n   \n").unwrap().is_empty());
    }

    #[test]
    fn single_triple_round_trip() {
        let t = Triple::new(
            &Iri::new("http://x/s").unwrap(),
            &Iri::new("http://x/p").unwrap(),
            Term::double(7.2).unwrap(),
        );
        let text = serialize_ntriples(std::slice::from_ref(&t));
        assert_eq!(
            text,
            "<http://x/s> <http://x/p> \"7.2\"^^<http://www.w3.org/2001/XMLSchema#double> .\n"
        );
        let g = parse_ntriples(&text).unwrap();
        assert_eq!(g.triples(), vec![t]);
    }

    #[test]
    fn escapes_are_decoded() {
        let g = parse_ntriples(
            "<http://x/s> <http://x/p> \"a\\tb\\u00e9\\U0001F600\\\"\" . # trailing\n<http://x/\\u0073> <http://x/p> <http://x/o> .",
        )
        .unwrap();
        let objects: Vec<String> = g.triples().iter().map(|t| t.object.value().to_string()).collect();
        assert!(objects.contains(&"a\tbé😀\"".to_string()));
        assert!(g.triples().iter().any(|t| t.subject.as_str() == "http://x/s"));
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let doc = "<http://x/s> <http://x/p> <http://x/o> .\n_:b0 <http://x/p> <http://x/o> .\n";
        let e = parse_ntriples(doc).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("blank"));

        let cases = [
            ("<http://x/s> <http://x/p> _:b .", "blank"),
            ("<http://x/s> <http://x/p> \"x\"@en .", "language"),
            ("<http://x/s> <http://x/p> <http://x/o>", "expected '.'"),
            ("<http://x/s> <http://x/p> <http://x/o> . extra", "trailing"),
            ("<s> <http://x/p> <http://x/o> .", "scheme"),
            ("\"lit\" <http://x/p> <http://x/o> .", "expected '<'"),
            ("<http://x/s> <http://x/p> \"INF\"^^<http://www.w3.org/2001/XMLSchema#double> .", "xsd:double"),
            ("<http://x/s> <http://x/p> \"open .", "unterminated"),
        ];
        for (doc, needle) in cases {
            let e = parse_ntriples(doc).unwrap_err();
            assert_eq!(e.line, 1);
            assert!(e.message.contains(needle), "{doc}: {}", e.message);
        }
    }

    #[test]
    fn reports_first_error_in_document_order() {
        let mut doc = String::new();
        for i in 0..500 {
            if i == 120 || i == 400 {
                doc.push_str("garbage\n");
            } else {
                doc.push_str(&format!("<http://x/s{i}> <http://x/p> \"{i}\" .\n"));
            }
        }
        for par in [Parallelism::Sequential, Parallelism::Parallel] {
            assert_eq!(parse_ntriples_with(&doc, par).unwrap_err().line, 121);
        }
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            "[a-z]{1,5}".prop_map(|s| Term::Iri(Iri::new(format!("http://r/{s}")).unwrap())),
            any::<String>().prop_map(Term::Plain),
            any::<f64>()
                .prop_filter("finite", |v| v.is_finite())
                .prop_map(|v| Term::double(v).unwrap()),
            (0i64..4_000_000_000).prop_map(|s| Term::date_time(&chrono::DateTime::from_timestamp(s, 0).unwrap())),
        ]
    }

    proptest! {
        #[test]
        fn round_trip_is_set_equal(
            triples in prop::collection::vec(("[a-c]{1,3}", "[p-q]{1,2}", arb_term()), 0..200)
        ) {
            let g: Graph = triples
                .into_iter()
                .map(|(s, p, o)| Triple::new(
                    &Iri::new(format!("http://r/{s}")).unwrap(),
                    &Iri::new(format!("http://r/{p}")).unwrap(),
                    o,
                ))
                .collect();
            let text = serialize_ntriples(&g.triples());
            let back = parse_ntriples(&text).unwrap();
            prop_assert_eq!(back.triples(), g.triples());
        }
    }
}
