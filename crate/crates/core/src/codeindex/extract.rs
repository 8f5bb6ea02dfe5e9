//! Lexical extraction of types and methods from Java-like source text.
//!
//! This is not a parser. Comments and literals are lexed out, braces are
//! tracked, and the token run preceding each `{` (or `;` for body-less
//! methods) at type-body depth is classified as a type header, a method
//! header, or something else. Anything unrecognized is skipped.

use crate::ProjectId;

use super::{CodeEntity, EntityKind, Visibility};

/// Maximum number of lines kept in an entity's display snippet.
pub const SNIPPET_LINES: usize = 12;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extraction {
    pub entities: Vec<CodeEntity>,
    pub warnings: Vec<String>,
}

/// Extracts entities from one source file. Entity ids are numbered from 0
/// in declaration order; [`super::assign_ids`] renumbers them for an index.
pub fn extract_entities(project: &ProjectId, file_path: &str, source: &str) -> Extraction {
    let chars: Vec<char> = source.chars().collect();
    let lexed = lex(&chars);
    let mut scanner = Scanner {
        chars: &chars,
        toks: &lexed.toks,
        comments: &lexed.comments,
        project,
        file_path,
        package: None,
        frames: Vec::new(),
        entities: Vec::new(),
        warnings: lexed.warnings,
    };
    scanner.run();
    Extraction {
        entities: scanner.entities,
        warnings: scanner
            .warnings
            .into_iter()
            .map(|w| format!("{file_path}: {w}"))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Punct(char),
    Literal,
}

#[derive(Debug)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

impl Token {
    fn ident(&self) -> Option<&str> {
        match &self.tok {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    fn is(&self, c: char) -> bool {
        self.tok == Tok::Punct(c)
    }

    fn is_word(&self, w: &str) -> bool {
        self.ident() == Some(w)
    }
}

struct Comment {
    start: usize,
    end: usize,
    text: String,
}

struct Lexed {
    toks: Vec<Token>,
    comments: Vec<Comment>,
    warnings: Vec<String>,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

fn line_of(chars: &[char], pos: usize) -> usize {
    chars[..pos.min(chars.len())].iter().filter(|&&c| c == '\n').count() + 1
}

fn lex(chars: &[char]) -> Lexed {
    let mut toks = Vec::new();
    let mut comments = Vec::new();
    let mut warnings = Vec::new();
    let n = chars.len();
    let mut i = 0;
    while i < n {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c.is_whitespace() {
            i += 1;
        } else if c == '/' && next == Some('/') {
            let start = i;
            while i < n && chars[i] != '\n' {
                i += 1;
            }
            comments.push(Comment {
                start,
                end: i,
                text: chars[start..i].iter().collect(),
            });
        } else if c == '/' && next == Some('*') {
            let start = i;
            i += 2;
            loop {
                if i + 1 >= n {
                    warnings.push(format!("line {}: unterminated block comment", line_of(chars, start)));
                    i = n;
                    break;
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            comments.push(Comment {
                start,
                end: i,
                text: chars[start..i].iter().collect(),
            });
        } else if c == '"' || c == '\'' {
            let start = i;
            let text_block = c == '"' && next == Some('"') && chars.get(i + 2) == Some(&'"');
            let (end, terminated) = if text_block {
                skip_text_block(chars, i + 3)
            } else {
                skip_quoted(chars, i + 1, c)
            };
            if !terminated {
                warnings.push(format!("line {}: unterminated literal", line_of(chars, start)));
            }
            i = end;
            toks.push(Token {
                tok: Tok::Literal,
                start,
                end: i,
            });
        } else if is_ident_char(c) {
            let start = i;
            while i < n && is_ident_char(chars[i]) {
                i += 1;
            }
            toks.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                start,
                end: i,
            });
        } else {
            toks.push(Token {
                tok: Tok::Punct(c),
                start: i,
                end: i + 1,
            });
            i += 1;
        }
    }
    Lexed {
        toks,
        comments,
        warnings,
    }
}

/// Returns the index just past the literal and whether it was closed. An
/// unclosed literal ends at the next newline.
fn skip_quoted(chars: &[char], mut i: usize, quote: char) -> (usize, bool) {
    while i < chars.len() {
        match chars[i] {
            '\\' if chars.get(i + 1).is_some_and(|&c| c != '\n') => i += 2,
            '\n' => return (i, false),
            c if c == quote => return (i + 1, true),
            _ => i += 1,
        }
    }
    (chars.len(), false)
}

fn skip_text_block(chars: &[char], mut i: usize) -> (usize, bool) {
    while i + 2 < chars.len() {
        if chars[i] == '\\' {
            i += 2;
        } else if chars[i..i + 3] == ['"', '"', '"'] {
            return (i + 3, true);
        } else {
            i += 1;
        }
    }
    (chars.len(), false)
}

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "sealed",
    "non",
    "strictfp",
    "synchronized",
    "native",
    "transient",
    "volatile",
    "default",
];

const NOT_METHOD_NAMES: &[&str] = &[
    "if",
    "for",
    "while",
    "switch",
    "catch",
    "synchronized",
    "return",
    "new",
    "throw",
    "else",
    "do",
    "try",
    "assert",
    "super",
    "this",
];

enum FrameKind {
    /// Body of a class/interface/enum; carries the entity index.
    Type(usize),
    Method(usize),
    /// Any other block (initializers, anonymous bodies, array literals).
    Other,
    /// A brace group opened inside parentheses; closing it does not end the
    /// enclosing declaration header.
    Nested,
}

struct Frame {
    kind: FrameKind,
    open: usize,
    saved_seg: Segment,
}

#[derive(Clone, Copy, Default)]
struct Segment {
    /// Index of the first token of the current header run.
    start: usize,
    /// Char position after the previous boundary token; comments between it
    /// and the declaration belong to the declaration.
    boundary: usize,
    paren_depth: usize,
}

struct Scanner<'a> {
    chars: &'a [char],
    toks: &'a [Token],
    comments: &'a [Comment],
    project: &'a ProjectId,
    file_path: &'a str,
    package: Option<String>,
    frames: Vec<Frame>,
    entities: Vec<CodeEntity>,
    warnings: Vec<String>,
}

/// Parsed declaration header.
enum Header {
    Type {
        kind: EntityKind,
        name: String,
        name_tok: usize,
        visibility: Visibility,
        interfaces: Vec<String>,
    },
    Method {
        name: String,
        name_tok: usize,
        visibility: Visibility,
    },
}

impl<'a> Scanner<'a> {
    fn in_declaration_context(&self) -> bool {
        matches!(self.frames.last().map(|f| &f.kind), None | Some(FrameKind::Type(_)))
    }

    fn in_type_body(&self) -> bool {
        matches!(self.frames.last().map(|f| &f.kind), Some(FrameKind::Type(_)))
    }

    fn run(&mut self) {
        let mut seg = Segment::default();
        for i in 0..self.toks.len() {
            let tok = &self.toks[i];
            let declaring = self.in_declaration_context();
            match tok.tok {
                Tok::Punct('(') if declaring => seg.paren_depth += 1,
                Tok::Punct(')') if declaring => seg.paren_depth = seg.paren_depth.saturating_sub(1),
                Tok::Punct('{') => {
                    let kind = if !declaring {
                        FrameKind::Other
                    } else if seg.paren_depth > 0 {
                        FrameKind::Nested
                    } else {
                        match self.classify(seg, i, true) {
                            Some(header) => self.open_entity(header, seg),
                            None => FrameKind::Other,
                        }
                    };
                    let nested = matches!(kind, FrameKind::Nested);
                    self.frames.push(Frame {
                        kind,
                        open: i,
                        saved_seg: seg,
                    });
                    if !nested {
                        seg = Segment {
                            start: i + 1,
                            boundary: tok.end,
                            paren_depth: 0,
                        };
                    }
                }
                Tok::Punct('}') => match self.frames.pop() {
                    Some(frame) => {
                        let nested = matches!(frame.kind, FrameKind::Nested);
                        self.close(frame.kind, frame.open, i);
                        seg = if nested {
                            frame.saved_seg
                        } else {
                            Segment {
                                start: i + 1,
                                boundary: tok.end,
                                paren_depth: 0,
                            }
                        };
                    }
                    None => {
                        self.warnings.push(format!(
                            "line {}: unmatched closing brace",
                            line_of(self.chars, tok.start)
                        ));
                        seg = Segment {
                            start: i + 1,
                            boundary: tok.end,
                            paren_depth: 0,
                        };
                    }
                },
                Tok::Punct(';') if declaring && seg.paren_depth == 0 => {
                    if self.frames.is_empty() {
                        self.maybe_package(seg.start, i);
                    } else if let Some(header @ Header::Method { .. }) = self.classify(seg, i, false) {
                        if let FrameKind::Method(idx) = self.open_entity(header, seg) {
                            self.finish(idx, String::new());
                        }
                    }
                    seg = Segment {
                        start: i + 1,
                        boundary: tok.end,
                        paren_depth: 0,
                    };
                }
                _ => {}
            }
        }
        while let Some(frame) = self.frames.pop() {
            self.warnings.push(format!(
                "line {}: unclosed brace",
                line_of(self.chars, self.toks[frame.open].start)
            ));
            self.close(frame.kind, frame.open, self.toks.len());
        }
    }

    fn maybe_package(&mut self, start: usize, end: usize) {
        let run = &self.toks[start..end];
        if run.first().is_some_and(|t| t.is_word("package")) {
            let name: String = run[1..]
                .iter()
                .filter_map(|t| t.ident().map(str::to_owned).or(t.is('.').then(|| ".".to_owned())))
                .collect();
            if !name.is_empty() {
                self.package = Some(name);
            }
        }
    }

    /// Indices of the header tokens in `start..end` with annotations removed.
    fn strip_annotations(&self, start: usize, end: usize) -> Vec<usize> {
        let mut kept = Vec::new();
        let mut i = start;
        while i < end {
            let t = &self.toks[i];
            if t.is('@') && !self.toks.get(i + 1).is_some_and(|n| n.is_word("interface")) {
                i += 1;
                while i < end && self.toks[i].ident().is_some() {
                    i += 1;
                    if i + 1 < end && self.toks[i].is('.') && self.toks[i + 1].ident().is_some() {
                        i += 1;
                    } else {
                        break;
                    }
                }
                if i < end && self.toks[i].is('(') {
                    let mut depth = 0usize;
                    while i < end {
                        if self.toks[i].is('(') {
                            depth += 1;
                        } else if self.toks[i].is(')') {
                            depth -= 1;
                            if depth == 0 {
                                i += 1;
                                break;
                            }
                        }
                        i += 1;
                    }
                }
                continue;
            }
            kept.push(i);
            i += 1;
        }
        kept
    }

    fn classify(&self, seg: Segment, end: usize, has_body: bool) -> Option<Header> {
        let run = self.strip_annotations(seg.start.min(end), end);
        if run.is_empty() {
            return None;
        }
        if let Some(header) = self.type_header(&run) {
            return has_body.then_some(header);
        }
        if self.in_type_body() {
            return self.method_header(&run, has_body);
        }
        None
    }

    fn modifiers_visibility(&self, idx: &[usize]) -> Visibility {
        let mut vis = Visibility::Default;
        for &i in idx {
            match self.toks[i].ident() {
                Some("public") => vis = Visibility::Public,
                Some("protected") => vis = Visibility::Protected,
                Some("private") => vis = Visibility::Private,
                _ => {}
            }
        }
        vis
    }

    fn type_header(&self, run: &[usize]) -> Option<Header> {
        let mut k = 0;
        while k < run.len() {
            let t = &self.toks[run[k]];
            let is_modifier = t.ident().is_some_and(|w| MODIFIERS.contains(&w)) || t.is('-');
            if !is_modifier {
                break;
            }
            k += 1;
        }
        let mut kind_at = k;
        if self.toks[*run.get(kind_at)?].is('@') {
            kind_at += 1;
        }
        let kind = match self.toks.get(run.get(kind_at).copied()?)?.ident()? {
            "class" => EntityKind::Class,
            "interface" => EntityKind::Interface,
            "enum" => EntityKind::Enum,
            _ => return None,
        };
        let name_pos = kind_at + 1;
        let name_tok = *run.get(name_pos)?;
        let name = self.toks[name_tok].ident()?.to_owned();

        let mut interfaces = Vec::new();
        let mut collecting = false;
        let mut current = String::new();
        let mut angle = 0usize;
        for &i in &run[name_pos + 1..] {
            let t = &self.toks[i];
            if t.is('<') {
                angle += 1;
            } else if t.is('>') {
                angle = angle.saturating_sub(1);
            } else if angle > 0 {
                continue;
            } else if let Some(w) = t.ident() {
                match w {
                    "extends" | "implements" => {
                        flush(&mut current, &mut interfaces);
                        collecting = true;
                    }
                    "permits" => {
                        flush(&mut current, &mut interfaces);
                        collecting = false;
                    }
                    _ if collecting => {
                        if !current.is_empty() && !current.ends_with('.') {
                            flush(&mut current, &mut interfaces);
                        }
                        current.push_str(w);
                    }
                    _ => {}
                }
            } else if collecting && t.is('.') {
                current.push('.');
            } else if t.is(',') {
                flush(&mut current, &mut interfaces);
            }
        }
        flush(&mut current, &mut interfaces);

        Some(Header::Type {
            kind,
            name,
            name_tok,
            visibility: self.modifiers_visibility(&run[..k]),
            interfaces,
        })
    }

    fn method_header(&self, run: &[usize], has_body: bool) -> Option<Header> {
        let open = run.iter().position(|&i| self.toks[i].is('('))?;
        if open == 0 {
            return None;
        }
        let name_tok = run[open - 1];
        let name = self.toks[name_tok].ident()?;
        if NOT_METHOD_NAMES.contains(&name) || name.starts_with(|c: char| c.is_ascii_digit()) {
            return None;
        }
        let prefix_ok = run[..open - 1].iter().all(|&i| {
            let t = &self.toks[i];
            t.ident().is_some_and(|w| w != "new") || ['<', '>', ',', '.', '[', ']', '?', '&'].iter().any(|&c| t.is(c))
        });
        if !prefix_ok {
            return None;
        }

        let mut depth = 0usize;
        let mut close = None;
        for (k, &i) in run.iter().enumerate().skip(open) {
            if self.toks[i].is('(') {
                depth += 1;
            } else if self.toks[i].is(')') {
                depth -= 1;
                if depth == 0 {
                    close = Some(k);
                    break;
                }
            }
        }
        let tail = &run[close? + 1..];
        let tail_ok = match tail.first().map(|&i| &self.toks[i]) {
            None => true,
            Some(t) if t.is_word("throws") => tail[1..].iter().all(|&i| {
                let t = &self.toks[i];
                t.ident().is_some() || t.is('.') || t.is(',')
            }),
            Some(t) if t.is_word("default") => !has_body,
            Some(t) if t.is('[') => tail.iter().all(|&i| self.toks[i].is('[') || self.toks[i].is(']')),
            Some(_) => false,
        };
        if !tail_ok {
            return None;
        }
        Some(Header::Method {
            name: name.to_owned(),
            name_tok,
            visibility: self.modifiers_visibility(&run[..open - 1]),
        })
    }

    fn enclosing_path(&self) -> Vec<&str> {
        let mut path: Vec<&str> = self.package.iter().map(String::as_str).collect();
        for frame in &self.frames {
            if let FrameKind::Type(idx) = frame.kind {
                path.push(&self.entities[idx].name);
            }
        }
        path
    }

    fn open_entity(&mut self, header: Header, seg: Segment) -> FrameKind {
        let (kind, name, name_tok, visibility, interfaces) = match header {
            Header::Type {
                kind,
                name,
                name_tok,
                visibility,
                interfaces,
            } => (kind, name, name_tok, visibility, interfaces),
            Header::Method {
                name,
                name_tok,
                visibility,
            } => (EntityKind::Method, name, name_tok, visibility, Vec::new()),
        };
        let decl_start = self.toks[name_tok].start;
        let comments = self
            .comments
            .iter()
            .filter(|c| c.start >= seg.boundary && c.end <= decl_start)
            .map(|c| clean_comment(&c.text))
            .filter(|c| !c.is_empty())
            .collect::<Vec<_>>()
            .join("\n");
        let mut path = self.enclosing_path();
        path.push(&name);
        let qualified_name = path.join(".");

        let idx = self.entities.len();
        self.entities.push(CodeEntity {
            id: idx as u32,
            project: self.project.clone(),
            file_path: self.file_path.to_owned(),
            kind,
            name,
            qualified_name,
            visibility,
            interfaces,
            body: String::new(),
            comments,
            snippet: String::new(),
        });
        match kind {
            EntityKind::Method => FrameKind::Method(idx),
            _ => FrameKind::Type(idx),
        }
    }

    fn close(&mut self, kind: FrameKind, open: usize, close: usize) {
        let idx = match kind {
            FrameKind::Type(idx) | FrameKind::Method(idx) => idx,
            FrameKind::Other | FrameKind::Nested => return,
        };
        let from = self.toks[open].end;
        let to = self.toks.get(close).map_or(self.chars.len(), |t| t.start);
        let body: String = self.chars[from..to].iter().collect();
        self.finish(idx, tidy_body(&body));
    }

    fn finish(&mut self, idx: usize, body: String) {
        let entity = &mut self.entities[idx];
        entity.snippet = make_snippet(&entity.comments, &body);
        entity.body = body;
    }
}

fn flush(current: &mut String, out: &mut Vec<String>) {
    let name = current.trim_end_matches('.');
    if !name.is_empty() {
        out.push(name.to_owned());
    }
    current.clear();
}

/// Strips comment delimiters and leading `*` gutters, dropping blank edge lines.
fn clean_comment(raw: &str) -> String {
    let inner = if let Some(rest) = raw.strip_prefix("//") {
        rest
    } else {
        let rest = raw.strip_prefix("/*").unwrap_or(raw);
        let rest = rest.strip_prefix('*').unwrap_or(rest);
        rest.strip_suffix("*/").unwrap_or(rest)
    };
    let lines: Vec<&str> = inner
        .lines()
        .map(|l| {
            let l = l.trim();
            l.strip_prefix('*').map_or(l, str::trim)
        })
        .collect();
    let first = lines.iter().position(|l| !l.is_empty());
    let last = lines.iter().rposition(|l| !l.is_empty());
    match (first, last) {
        (Some(a), Some(b)) => lines[a..=b].join("\n"),
        _ => String::new(),
    }
}

/// Drops blank leading lines and trailing whitespace.
fn tidy_body(raw: &str) -> String {
    let mut start = 0;
    for line in raw.split_inclusive('\n') {
        if !line.trim().is_empty() {
            break;
        }
        start += line.len();
    }
    raw[start..].trim_end().to_owned()
}

fn make_snippet(comments: &str, body: &str) -> String {
    comments
        .lines()
        .chain(body.lines())
        .take(SNIPPET_LINES)
        .collect::<Vec<_>>()
        .join("\n")
}
