//! Line-oriented N-Quads reader and writer.
//!
//! Each statement line is `subject predicate object graph .` where the graph
//! label must be an IRI. Lines without a graph label (plain N-Triples) or with
//! a blank-node graph label are rejected because every quad needs a context
//! IRI to be assigned to a pay-level domain.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use super::term::{BlankNode, Interner, Iri, Literal, Quad, RdfObject, Subject};
use super::IngestError;

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Fail on the first malformed line instead of skipping it.
    pub strict: bool,
    /// Prefix applied to every blank-node label, e.g. `f3` turns `_:b1`
    /// into `_:f3_b1`.
    pub blank_scope: Option<String>,
}

impl ParseOptions {
    pub fn strict() -> Self {
        ParseOptions {
            strict: true,
            blank_scope: None,
        }
    }

    pub fn scoped(mut self, scope: impl Into<String>) -> Self {
        self.blank_scope = Some(scope.into());
        self
    }
}

/// Streaming quad reader. In lenient mode malformed lines are counted in
/// [`QuadReader::skipped`] and never surface as errors.
pub struct QuadReader<'a, R> {
    reader: R,
    options: ParseOptions,
    interner: &'a mut Interner,
    line_no: usize,
    skipped: usize,
    buf: String,
}

impl<'a, R: BufRead> QuadReader<'a, R> {
    pub fn new(reader: R, options: ParseOptions, interner: &'a mut Interner) -> Self {
        QuadReader {
            reader,
            options,
            interner,
            line_no: 0,
            skipped: 0,
            buf: String::new(),
        }
    }

    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn lines_read(&self) -> usize {
        self.line_no
    }
}

impl<R: BufRead> Iterator for QuadReader<'_, R> {
    type Item = Result<Quad, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) if e.kind() == io::ErrorKind::InvalidData && !self.options.strict => {
                    // Non-UTF-8 line; read_line already consumed it.
                    self.line_no += 1;
                    self.skipped += 1;
                    continue;
                }
                Err(e) => return Some(Err(IngestError::Io(e))),
            }
            self.line_no += 1;
            let mut parser = LineParser {
                line: self.buf.trim_end_matches(['\n', '\r']),
                pos: 0,
                line_no: self.line_no,
                interner: self.interner,
                scope: self.options.blank_scope.as_deref(),
            };
            match parser.statement() {
                Ok(Some(quad)) => return Some(Ok(quad)),
                Ok(None) => continue,
                Err(e) if self.options.strict => return Some(Err(e)),
                Err(e) => {
                    log::debug!("skipping malformed line: {e}");
                    self.skipped += 1;
                }
            }
        }
    }
}

#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub quads: Vec<Quad>,
    pub skipped: usize,
}

/// Parses a whole stream into memory.
pub fn parse_nquads<R: BufRead>(
    reader: R,
    options: &ParseOptions,
    interner: &mut Interner,
) -> Result<ParseOutcome, IngestError> {
    let mut quad_reader = QuadReader::new(reader, options.clone(), interner);
    let mut quads = Vec::new();
    for quad in quad_reader.by_ref() {
        quads.push(quad?);
    }
    Ok(ParseOutcome {
        quads,
        skipped: quad_reader.skipped(),
    })
}

/// Parses a string in strict mode with a throwaway interner.
pub fn parse_str(input: &str) -> Result<Vec<Quad>, IngestError> {
    let mut interner = Interner::new();
    parse_nquads(input.as_bytes(), &ParseOptions::strict(), &mut interner).map(|o| o.quads)
}

struct LineParser<'l, 'i> {
    line: &'l str,
    pos: usize,
    line_no: usize,
    interner: &'i mut Interner,
    scope: Option<&'l str>,
}

impl LineParser<'_, '_> {
    fn statement(&mut self) -> Result<Option<Quad>, IngestError> {
        self.skip_ws();
        if self.at_end() || self.peek() == Some('#') {
            return Ok(None);
        }
        let subject = match self.peek() {
            Some('<') => Subject::Iri(self.iri()?),
            Some('_') => Subject::Blank(self.blank()?),
            _ => return Err(self.error("expected subject IRI or blank node")),
        };
        self.skip_ws();
        if self.peek() != Some('<') {
            return Err(self.error("expected predicate IRI"));
        }
        let predicate = self.iri()?;
        self.skip_ws();
        let object = match self.peek() {
            Some('<') => RdfObject::Iri(self.iri()?),
            Some('_') => RdfObject::Blank(self.blank()?),
            Some('"') => RdfObject::Literal(self.literal()?),
            _ => return Err(self.error("expected object")),
        };
        self.skip_ws();
        let context = match self.peek() {
            Some('<') => self.iri()?,
            Some('_') => return Err(self.error("blank-node graph labels are not supported")),
            Some('.') => return Err(self.error("missing graph label")),
            _ => return Err(self.error("expected graph IRI")),
        };
        self.skip_ws();
        if self.peek() != Some('.') {
            return Err(self.error("expected '.'"));
        }
        self.pos += 1;
        self.skip_ws();
        if !self.at_end() && self.peek() != Some('#') {
            return Err(self.error("trailing content after '.'"));
        }
        Ok(Some(Quad::new(subject, predicate, object, context)))
    }

    fn rest(&self) -> &str {
        &self.line[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.line.len()
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start_matches([' ', '\t']);
        self.pos = self.line.len() - trimmed.len();
    }

    fn token(&self) -> String {
        let rest = self.rest();
        let end = rest.find([' ', '\t']).unwrap_or(rest.len());
        rest[..end].chars().take(80).collect()
    }

    fn error(&self, message: &str) -> IngestError {
        IngestError::Parse {
            line: self.line_no,
            token: self.token(),
            message: message.to_owned(),
        }
    }

    fn iri(&mut self) -> Result<Iri, IngestError> {
        debug_assert_eq!(self.peek(), Some('<'));
        let start = self.pos;
        let rest = &self.line[start + 1..];
        let Some(end) = rest.find('>') else {
            return Err(self.error("unterminated IRI"));
        };
        let raw = &rest[..end];
        let value = if raw.contains('\\') {
            unescape(raw, false).map_err(|m| self.error(m))?
        } else {
            raw.to_owned()
        };
        let iri = self.interner.iri(&value).map_err(|e| self.error(&e.to_string()))?;
        self.pos = start + 1 + end + 1;
        Ok(iri)
    }

    fn blank(&mut self) -> Result<BlankNode, IngestError> {
        let rest = self.rest();
        if !rest.starts_with("_:") {
            return Err(self.error("expected blank node"));
        }
        let body = &rest[2..];
        let mut len = body
            .find(|c: char| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.')))
            .unwrap_or(body.len());
        // A trailing '.' terminates the statement rather than the label.
        while len > 0 && body[..len].ends_with('.') {
            len -= 1;
        }
        if len == 0 {
            return Err(self.error("empty blank node label"));
        }
        let label = &body[..len];
        let scoped = match self.scope {
            Some(scope) => format!("{scope}_{label}"),
            None => label.to_owned(),
        };
        let node = BlankNode::new(scoped).map_err(|e| self.error(&e.to_string()))?;
        self.pos += 2 + len;
        Ok(node)
    }

    fn literal(&mut self) -> Result<Literal, IngestError> {
        let body_start = self.pos + 1;
        let bytes = self.line.as_bytes();
        let mut i = body_start;
        let mut has_escape = false;
        loop {
            match bytes.get(i) {
                None => return Err(self.error("unterminated literal")),
                Some(b'\\') => {
                    has_escape = true;
                    i += 2;
                }
                Some(b'"') => break,
                Some(_) => i += 1,
            }
        }
        let raw = &self.line[body_start..i];
        let lexical = if has_escape {
            unescape(raw, true).map_err(|m| self.error(m))?
        } else {
            raw.to_owned()
        };
        self.pos = i + 1;
        let mut literal = Literal::simple(lexical);
        if self.rest().starts_with('@') {
            let tag_src = &self.rest()[1..];
            let len = tag_src
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(tag_src.len());
            let tag = &tag_src[..len];
            let valid = !tag.is_empty()
                && tag.split('-').all(|part| !part.is_empty())
                && tag.starts_with(|c: char| c.is_ascii_alphabetic());
            if !valid {
                return Err(self.error("malformed language tag"));
            }
            literal.language = Some(tag.to_owned());
            self.pos += 1 + len;
        } else if self.rest().starts_with("^^") {
            self.pos += 2;
            if self.peek() != Some('<') {
                return Err(self.error("expected datatype IRI"));
            }
            literal.datatype = Some(self.iri()?);
        }
        Ok(literal)
    }
}

fn unescape(raw: &str, literal: bool) -> Result<String, &'static str> {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        let esc = chars.next().ok_or("dangling escape")?;
        let hex_len = match esc {
            'u' => 4,
            'U' => 8,
            _ if !literal => return Err("only \\u and \\U escapes are allowed in IRIs"),
            't' => {
                out.push('\t');
                continue;
            }
            'b' => {
                out.push('\u{8}');
                continue;
            }
            'n' => {
                out.push('\n');
                continue;
            }
            'r' => {
                out.push('\r');
                continue;
            }
            'f' => {
                out.push('\u{c}');
                continue;
            }
            '"' | '\'' | '\\' => {
                out.push(esc);
                continue;
            }
            _ => return Err("unknown escape sequence"),
        };
        let hex: String = chars.by_ref().take(hex_len).collect();
        if hex.len() != hex_len {
            return Err("truncated unicode escape");
        }
        let code = u32::from_str_radix(&hex, 16).map_err(|_| "invalid unicode escape")?;
        out.push(char::from_u32(code).ok_or("invalid code point")?);
    }
    Ok(out)
}

fn escape_literal(lexical: &str, out: &mut String) {
    for c in lexical.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
}

/// Serializes one quad as an N-Quads line without the trailing newline.
pub fn format_quad(quad: &Quad) -> String {
    let mut out = String::with_capacity(128);
    match &quad.subject {
        Subject::Iri(iri) => {
            let _ = write!(out, "<{iri}>");
        }
        Subject::Blank(b) => out.push_str(b.as_str()),
    }
    let _ = write!(out, " <{}> ", quad.predicate);
    match &quad.object {
        RdfObject::Iri(iri) => {
            let _ = write!(out, "<{iri}>");
        }
        RdfObject::Blank(b) => out.push_str(b.as_str()),
        RdfObject::Literal(lit) => {
            out.push('"');
            escape_literal(&lit.lexical, &mut out);
            out.push('"');
            if let Some(lang) = &lit.language {
                let _ = write!(out, "@{lang}");
            } else if let Some(dt) = &lit.datatype {
                let _ = write!(out, "^^<{dt}>");
            }
        }
    }
    let _ = write!(out, " <{}> .", quad.context);
    out
}

pub fn write_nquads<'q, W: Write>(
    mut writer: W,
    quads: impl IntoIterator<Item = &'q Quad>,
) -> io::Result<usize> {
    let mut n = 0;
    for quad in quads {
        writeln!(writer, "{}", format_quad(quad))?;
        n += 1;
    }
    Ok(n)
}
