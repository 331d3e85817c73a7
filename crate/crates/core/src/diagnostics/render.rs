use serde::Serialize;

use crate::syntax::SourceFile;

use super::{BugCategory, Diagnostic, DiagnosticKind, Provenance, Severity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    Text,
    Structured,
}

/// Diagnostics in source order; ties keep their original order.
pub fn sorted<'a>(ds: &'a [Diagnostic], src: &SourceFile) -> Vec<&'a Diagnostic> {
    let mut v: Vec<&Diagnostic> = ds.iter().collect();
    v.sort_by_key(|d| {
        let lc = src.line_col(d.span);
        (!d.span.is_dummy(), lc.line, lc.col_start)
    });
    v
}

pub fn render_line(d: &Diagnostic, src: &SourceFile) -> String {
    let loc = if d.span.is_dummy() {
        src.name.clone()
    } else {
        format!("{}, {}", src.name, src.line_col(d.span))
    };
    let mut s = match d.severity {
        Severity::Error => format!("{loc}: error {}", d.message),
        Severity::Warning => format!("{loc}: warning: {}", d.message),
    };
    for n in &d.notes {
        s.push_str("\n  note: ");
        s.push_str(n);
    }
    s
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

pub fn summary(ds: &[Diagnostic]) -> String {
    let errors = ds.iter().filter(|d| d.is_error()).count();
    format!("{}, {}", plural(errors, "error"), plural(ds.len() - errors, "warning"))
}

/// Byte-stable text: one line per diagnostic in source order, then a count
/// summary. Empty input renders as the empty string.
pub fn render_text(ds: &[Diagnostic], src: &SourceFile) -> String {
    if ds.is_empty() {
        return String::new();
    }
    let mut out = String::new();
    for d in sorted(ds, src) {
        out.push_str(&render_line(d, src));
        out.push('\n');
    }
    out.push_str(&summary(ds));
    out.push('\n');
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticRecord {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub category: Option<BugCategory>,
    pub instance: Option<String>,
    pub provenance: Option<Provenance>,
    pub file: String,
    pub line: usize,
    pub col_start: usize,
    pub col_end: usize,
    pub message: String,
    pub notes: Vec<String>,
}

pub fn records(ds: &[Diagnostic], src: &SourceFile) -> Vec<DiagnosticRecord> {
    sorted(ds, src)
        .into_iter()
        .map(|d| {
            let lc = src.line_col(d.span);
            DiagnosticRecord {
                severity: d.severity,
                kind: d.kind,
                category: d.category,
                instance: d.instance.clone(),
                provenance: d.provenance.clone(),
                file: src.name.clone(),
                line: lc.line,
                col_start: lc.col_start,
                col_end: lc.col_end,
                message: d.message.clone(),
                notes: d.notes.clone(),
            }
        })
        .collect()
}

pub fn render(ds: &[Diagnostic], src: &SourceFile, mode: RenderMode) -> String {
    match mode {
        RenderMode::Text => render_text(ds, src),
        RenderMode::Structured => {
            let mut s = serde_json::to_string_pretty(&records(ds, src)).unwrap_or_default();
            s.push('\n');
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Span;

    #[test]
    fn error_line_format() {
        let text = format!("{}\n{}tcp.srcPort = 1:16", "\n".repeat(348), " ".repeat(11));
        let src = SourceFile::new("./h.p4", text);
        let start = src.text.find("tcp.srcPort").unwrap();
        let d = Diagnostic::error(
            DiagnosticKind::InvalidHeader,
            "tcp not guaranteed to be valid",
            Span::new(start, start + 10),
        );
        assert_eq!(
            render_line(&d, &src),
            "./h.p4, line 350, cols 12-21: error tcp not guaranteed to be valid"
        );
    }

    #[test]
    fn empty_renders_nothing() {
        assert_eq!(render_text(&[], &SourceFile::new("f", "")), "");
    }

    #[test]
    fn warnings_have_colon_and_sorting_is_by_position() {
        let src = SourceFile::new("p", "aaaa\nbbbb\n");
        let w = Diagnostic::warning(DiagnosticKind::Assumption, "w", Span::new(5, 6));
        let e = Diagnostic::error(DiagnosticKind::InvalidHeader, "e", Span::new(0, 1));
        let out = render_text(&[w, e], &src);
        assert_eq!(out, "p, line 1, cols 1-1: error e\np, line 2, cols 1-1: warning: w\n1 error, 1 warning\n");
    }
}
