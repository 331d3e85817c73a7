use std::fmt;

use serde::Serialize;

/// Half-open byte range into a source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn is_dummy(&self) -> bool {
        self.start == 0 && self.end == 0
    }
}

/// One-based line and column range of a span, as printed in diagnostics.
/// `col_end` is inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LineCol {
    pub line: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl fmt::Display for LineCol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, cols {}-{}", self.line, self.col_start, self.col_end)
    }
}

/// A named source text with a precomputed line index.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub name: String,
    pub text: String,
    line_starts: Vec<usize>,
}

impl SourceFile {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        SourceFile {
            name: name.into(),
            text,
            line_starts,
        }
    }

    fn line_of(&self, offset: usize) -> usize {
        match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    fn column(&self, line: usize, offset: usize) -> usize {
        let start = self.line_starts[line];
        let offset = offset.min(self.text.len()).max(start);
        self.text[start..offset].chars().count() + 1
    }

    pub fn line_col(&self, span: Span) -> LineCol {
        let line = self.line_of(span.start);
        let col_start = self.column(line, span.start);
        let last = if span.end > span.start { span.end - 1 } else { span.start };
        let end_line = self.line_of(last);
        // Spans over several lines are cut at the end of their first line.
        let col_end = if end_line == line {
            self.column(line, last).max(col_start)
        } else {
            let eol = self.line_starts.get(line + 1).map_or(self.text.len(), |n| n - 1);
            self.column(line, eol).max(col_start)
        };
        LineCol {
            line: line + 1,
            col_start,
            col_end,
        }
    }

    pub fn snippet(&self, span: Span) -> &str {
        let end = span.end.min(self.text.len());
        &self.text[span.start.min(end)..end]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_columns_are_one_based_and_inclusive() {
        let src = SourceFile::new("t.sp4", "abc\n  tcp.syn\n");
        let span = Span::new(6, 13);
        assert_eq!(src.snippet(span), "tcp.syn");
        let lc = src.line_col(span);
        assert_eq!(lc, LineCol { line: 2, col_start: 3, col_end: 9 });
        assert_eq!(lc.to_string(), "line 2, cols 3-9");
    }

    #[test]
    fn first_line() {
        let src = SourceFile::new("t", "x");
        assert_eq!(src.line_col(Span::new(0, 1)).line, 1);
    }
}
