use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hvc::algebra::DEFAULT_MAX_DENOTATION;
use hvc::check::{check_program_with, CheckOptions, CheckResult, PointKind};
use hvc::control::{load_entries, validate_well_behaved, TableState};
use hvc::diagnostics::{fold_bugs, records, render, render_line, summary, Diagnostic, RenderMode};
use hvc::interp::{format_trace, run, to_hex, BitStream, Fault};
use hvc::syntax::{parse_program, Program, SourceFile};

/// Header-validity checker and interpreter.
#[derive(Parser)]
#[command(name = "hvc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check a program and report header-validity violations.
    Check(Common),
    /// Execute a program on one packet.
    Run {
        #[command(flatten)]
        common: Common,
        /// Input packet as hex digits.
        #[arg(long)]
        packet: String,
        /// Print every reduction step.
        #[arg(long)]
        trace: bool,
    },
    /// Print the inferred header type at each program point.
    Types(Common),
}

#[derive(Args)]
struct Common {
    program: PathBuf,
    /// Table entries file.
    #[arg(long)]
    entries: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long)]
    structured: bool,
    /// Exit with status 1 when there are warnings.
    #[arg(long)]
    fail_on_warning: bool,
    /// Largest denotation the checker will expand.
    #[arg(long, default_value_t = DEFAULT_MAX_DENOTATION)]
    max_denotation: usize,
}

/// `println!` into the output buffer.
macro_rules! outln {
    ($out:expr, $($arg:tt)*) => {{
        $out.push_str(&format!($($arg)*));
        $out.push('\n');
    }};
}

/// Exit statuses.
const OK: u8 = 0;
const FAILED: u8 = 1;
const UNUSABLE: u8 = 2;

struct Loaded {
    src: SourceFile,
    program: Program,
    result: CheckResult,
    entries: Option<(SourceFile, TableState)>,
    /// Control-plane violations, located in the entries file.
    entry_diags: Vec<Diagnostic>,
}

fn read(path: &Path) -> Result<SourceFile> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(SourceFile::new(path.display().to_string(), text))
}

/// Parse and check the program, then load the entries. `Err` carries the
/// exit status after the problem has been reported.
fn load(c: &Common, out: &mut String) -> std::result::Result<Loaded, u8> {
    let mode = if c.structured { RenderMode::Structured } else { RenderMode::Text };
    let src = read(&c.program).map_err(|e| {
        eprintln!("hvc: {e:#}");
        UNUSABLE
    })?;
    let program = parse_program(&src.text).map_err(|ds| {
        out.push_str(&render(&ds, &src, mode));
        UNUSABLE
    })?;
    let opts = CheckOptions {
        max_denotation: c.max_denotation,
        ..CheckOptions::default()
    };
    let result = check_program_with(&program, &opts);

    let mut entries = None;
    let mut entry_diags = Vec::new();
    if let Some(path) = &c.entries {
        let esrc = read(path).map_err(|e| {
            eprintln!("hvc: {e:#}");
            UNUSABLE
        })?;
        let st = load_entries(&esrc.text, &program).map_err(|ds| {
            out.push_str(&render(&ds, &esrc, mode));
            UNUSABLE
        })?;
        entry_diags = validate_well_behaved(&program, &st, &result.assumptions);
        entries = Some((esrc, st));
    }
    Ok(Loaded {
        src,
        program,
        result,
        entries,
        entry_diags,
    })
}

fn status(c: &Common, ds: &[Diagnostic]) -> u8 {
    let errors = ds.iter().any(|d| d.is_error());
    let warnings = ds.iter().any(|d| !d.is_error());
    if errors || (c.fail_on_warning && warnings) {
        FAILED
    } else {
        OK
    }
}

fn cmd_check(c: &Common, out: &mut String) -> u8 {
    let l = match load(c, out) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let bugs = fold_bugs(&l.program, &l.result);
    let ds = &l.result.diagnostics;
    if c.structured {
        let bugs: Vec<_> = bugs
            .iter()
            .map(|b| {
                json!({
                    "category": b.category,
                    "instance": b.instance,
                    "table": b.table,
                    "lines": b.spans.iter().map(|s| l.src.line_col(*s).line).collect::<Vec<_>>(),
                })
            })
            .collect();
        let entry_records = match &l.entries {
            Some((esrc, _)) => records(&l.entry_diags, esrc),
            None => Vec::new(),
        };
        let doc = json!({
            "diagnostics": records(ds, &l.src),
            "bugs": bugs,
            "entries": entry_records,
        });
        outln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap_or_default());
    } else {
        out.push_str(&render(ds, &l.src, RenderMode::Text));
        for b in &bugs {
            let mut line = format!("bug: {}", b.category);
            if let Some(h) = &b.instance {
                line.push_str(&format!(", header {h}"));
            }
            if let Some(t) = &b.table {
                line.push_str(&format!(", table {t}"));
            }
            let mut lines: Vec<usize> = b.spans.iter().map(|s| l.src.line_col(*s).line).collect();
            lines.sort_unstable();
            lines.dedup();
            let lines: Vec<String> = lines.iter().map(|n| n.to_string()).collect();
            line.push_str(&format!(", line {}", lines.join(", ")));
            outln!(out, "{line}");
        }
        if let Some((esrc, _)) = &l.entries {
            out.push_str(&render(&l.entry_diags, esrc, RenderMode::Text));
        }
    }
    let all: Vec<Diagnostic> = ds.iter().chain(&l.entry_diags).cloned().collect();
    status(c, &all)
}

fn cmd_types(c: &Common, out: &mut String) -> u8 {
    let l = match load(c, out) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let kind = |k: PointKind| match k {
        PointKind::Entry => "entry",
        PointKind::Join => "join",
        PointKind::Exit => "exit",
    };
    if c.structured {
        let points: Vec<_> = l
            .result
            .point_types
            .iter()
            .map(|pt| {
                let lc = l.src.line_col(pt.span);
                json!({
                    "line": lc.line,
                    "col_start": lc.col_start,
                    "col_end": lc.col_end,
                    "kind": pt.kind,
                    "type": pt.ty.display(&l.program).to_string(),
                })
            })
            .collect();
        outln!(out, "{}", serde_json::to_string_pretty(&points).unwrap_or_default());
    } else {
        for pt in &l.result.point_types {
            let lc = l.src.line_col(pt.span);
            outln!(out, "{lc} {}: {}", kind(pt.kind), pt.ty.display(&l.program));
        }
    }
    let ds = &l.result.diagnostics;
    if !ds.is_empty() {
        eprintln!("{}", summary(ds));
    }
    status(c, ds)
}

fn cmd_run(c: &Common, packet: &str, trace: bool, out: &mut String) -> u8 {
    let l = match load(c, out) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let input = match BitStream::from_hex(packet) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("hvc: {e}");
            return UNUSABLE;
        }
    };
    if let Some((esrc, _)) = &l.entries {
        if !l.entry_diags.is_empty() {
            out.push_str(&render(&l.entry_diags, esrc, RenderMode::Text));
            return UNUSABLE;
        }
    }
    if !l.result.is_ok() {
        eprintln!("hvc: running a program that does not check ({})", summary(&l.result.diagnostics));
    }
    let st = l.entries.map(|(_, st)| st).unwrap_or_default();
    let r = run(&l.program, input, &st);
    let out_hex = to_hex(&r.config.output);
    let dom = r.config.headers.dom_names(&l.program);
    let fault_line = r.fault.as_ref().map(|f| {
        let d = match f {
            Fault::InvalidAccess { dom, .. } => Diagnostic::error(
                hvc::diagnostics::DiagnosticKind::Runtime,
                format!("{f} (valid: {{{}}})", dom.join(",")),
                f.span(),
            ),
            Fault::Stuck { .. } => Diagnostic::error(hvc::diagnostics::DiagnosticKind::Runtime, f.to_string(), f.span()),
        };
        render_line(&d, &l.src)
    });
    if c.structured {
        let doc = json!({
            "output": out_hex,
            "output_bits": r.config.output.len(),
            "valid": dom,
            "zero_extended": r.config.input.zero_extended,
            "fault": fault_line,
            "trace": if trace { serde_json::to_value(&r.trace).unwrap_or_default() } else { json!(null) },
        });
        outln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap_or_default());
    } else {
        if trace {
            out.push_str(&format_trace(&r.trace, &l.src));
        }
        outln!(out, "output: {out_hex} ({} bits)", r.config.output.len());
        outln!(out, "valid: {{{}}}", dom.join(","));
        if r.config.input.zero_extended > 0 {
            outln!(out, "read {} bits past the end of the packet", r.config.input.zero_extended);
        }
        if let Some(line) = &fault_line {
            outln!(out, "{line}");
        }
    }
    if r.fault.is_some() {
        FAILED
    } else {
        OK
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let code = match &cli.command {
        Command::Check(c) => cmd_check(c, &mut out),
        Command::Types(c) => cmd_types(c, &mut out),
        Command::Run { common, packet, trace } => cmd_run(common, packet, *trace, &mut out),
    };
    // A closed pipe is not an error worth reporting.
    let _ = io::stdout().lock().write_all(out.as_bytes());
    ExitCode::from(code)
}
