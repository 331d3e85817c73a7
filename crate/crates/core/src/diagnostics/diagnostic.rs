use std::fmt;

use serde::Serialize;

use crate::syntax::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Syntax,
    Duplicate,
    UnknownName,
    Arity,
    Malformed,
    InvalidHeader,
    TypeMismatch,
    Assumption,
    ResourceLimit,
    ControlPlane,
    Runtime,
}

/// Syntactic context in which a checker diagnostic arose.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "context", rename_all = "snake_case")]
pub enum Provenance {
    Control,
    TableReads { table: String },
    TableAction { table: String, action: String },
    TableDefault { table: String, action: String },
}

impl Provenance {
    pub fn table(&self) -> Option<&str> {
        match self {
            Provenance::Control => None,
            Provenance::TableReads { table }
            | Provenance::TableAction { table, .. }
            | Provenance::TableDefault { table, .. } => Some(table),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BugCategory {
    ParserBug,
    ControlBug,
    TableReadsBug,
    TableActionBug,
    DefaultActionBug,
    Unclassified,
}

impl fmt::Display for BugCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BugCategory::ParserBug => "parser",
            BugCategory::ControlBug => "control",
            BugCategory::TableReadsBug => "table reads",
            BugCategory::TableActionBug => "table action",
            BugCategory::DefaultActionBug => "default action",
            BugCategory::Unclassified => "unclassified",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub span: Span,
    pub message: String,
    /// Faulting instance for validity errors.
    pub instance: Option<String>,
    pub provenance: Option<Provenance>,
    pub category: Option<BugCategory>,
    pub notes: Vec<String>,
}

impl Diagnostic {
    pub fn new(severity: Severity, kind: DiagnosticKind, message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity,
            kind,
            span,
            message: message.into(),
            instance: None,
            provenance: None,
            category: None,
            notes: Vec::new(),
        }
    }

    pub fn error(kind: DiagnosticKind, message: impl Into<String>, span: Span) -> Self {
        Diagnostic::new(Severity::Error, kind, message, span)
    }

    pub fn warning(kind: DiagnosticKind, message: impl Into<String>, span: Span) -> Self {
        Diagnostic::new(Severity::Warning, kind, message, span)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_instance(mut self, inst: impl Into<String>) -> Self {
        self.instance = Some(inst.into());
        self
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    pub fn is_validity_error(&self) -> bool {
        self.is_error() && self.kind == DiagnosticKind::InvalidHeader
    }
}

pub fn has_errors(ds: &[Diagnostic]) -> bool {
    ds.iter().any(Diagnostic::is_error)
}
