//! Located diagnostics, bug classification and rendering.

pub mod classify;
pub mod diagnostic;
pub mod render;

pub use classify::{classify_all, classify_site, fold_bugs, BugRecord};
pub use diagnostic::*;
pub use render::{records, summary, DiagnosticRecord, render, render_line, render_text, RenderMode};
