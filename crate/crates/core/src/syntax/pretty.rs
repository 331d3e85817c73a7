use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

/// Canonical source text for a program. Printing the result of parsing this
/// text yields the same text again.
pub fn pretty_program(p: &Program) -> String {
    let mut out = String::new();
    for h in p.header_types.values() {
        let _ = writeln!(out, "header {} {{", h.name);
        for f in &h.fields {
            let _ = writeln!(out, "{INDENT}{}: {};", f.name, f.width);
        }
        out.push_str("}\n\n");
    }
    for i in p.instances.values() {
        let _ = writeln!(out, "instance {}: {};", i.name, i.header_type);
    }
    if !p.instances.is_empty() {
        out.push('\n');
    }
    for a in p.actions.values() {
        let params: Vec<String> = a
            .params
            .iter()
            .map(|prm| match prm.ty {
                BaseType::Bool => format!("{}: bool", prm.name),
                BaseType::Bits(w) => format!("{}: {w}", prm.name),
            })
            .collect();
        let _ = writeln!(out, "action {}({}) {{", a.name, params.join(", "));
        pretty_block_body(&a.body, 1, &mut out);
        out.push_str("}\n\n");
    }
    for t in p.tables.values() {
        let _ = writeln!(out, "table {} {{", t.name);
        if !t.valids.is_empty() || !t.reads.is_empty() {
            let _ = writeln!(out, "{INDENT}reads {{");
            for h in &t.valids {
                let _ = writeln!(out, "{INDENT}{INDENT}{h}: valid;");
            }
            for r in &t.reads {
                let _ = writeln!(out, "{INDENT}{INDENT}{}: {};", pretty_expr(&r.expr), r.kind);
            }
            let _ = writeln!(out, "{INDENT}}}");
        }
        let _ = writeln!(out, "{INDENT}actions {{");
        for a in &t.actions {
            let _ = writeln!(out, "{INDENT}{INDENT}{a};");
        }
        let _ = writeln!(out, "{INDENT}}}");
        if let Some(d) = &t.default_action {
            let args: Vec<String> = d.args.iter().map(pretty_expr).collect();
            let _ = writeln!(out, "{INDENT}default_action: {}({});", d.action, args.join(", "));
        }
        out.push_str("}\n\n");
    }
    out.push_str("control {\n");
    pretty_block_body(&p.body, 1, &mut out);
    out.push_str("}\n");
    out
}

pub fn pretty_command(c: &Command) -> String {
    let mut out = String::new();
    pretty_block_body(c, 0, &mut out);
    out
}

fn pretty_block_body(c: &Command, depth: usize, out: &mut String) {
    if c.is_skip() {
        return;
    }
    for cmd in c.spine() {
        pretty_single(cmd, depth, out);
    }
}

fn pretty_single(c: &Command, depth: usize, out: &mut String) {
    let pad = INDENT.repeat(depth);
    match &c.kind {
        CmdKind::Skip => {
            let _ = writeln!(out, "{pad}skip;");
        }
        CmdKind::Extract(h) => {
            let _ = writeln!(out, "{pad}extract({h});");
        }
        CmdKind::Emit(h) => {
            let _ = writeln!(out, "{pad}emit({h});");
        }
        CmdKind::Add(h) => {
            let _ = writeln!(out, "{pad}add({h});");
        }
        CmdKind::Remove(h) => {
            let _ = writeln!(out, "{pad}remove({h});");
        }
        CmdKind::Apply(t) => {
            let _ = writeln!(out, "{pad}apply({t});");
        }
        CmdKind::Modify { inst, field, value } => {
            let _ = writeln!(out, "{pad}{inst}.{field} = {};", pretty_expr(value));
        }
        CmdKind::Seq(..) => pretty_block_body(c, depth, out),
        CmdKind::If { cond, then, els } => {
            let _ = writeln!(out, "{pad}if ({}) {{", pretty_expr(cond));
            pretty_branches(then, els, depth, out);
        }
        CmdKind::IfValid { inst, then, els } => {
            let _ = writeln!(out, "{pad}if (valid({inst})) {{");
            pretty_branches(then, els, depth, out);
        }
    }
}

fn pretty_branches(then: &Command, els: &Command, depth: usize, out: &mut String) {
    let pad = INDENT.repeat(depth);
    pretty_block_body(then, depth + 1, out);
    if els.is_skip() {
        let _ = writeln!(out, "{pad}}}");
    } else {
        let _ = writeln!(out, "{pad}}} else {{");
        pretty_block_body(els, depth + 1, out);
        let _ = writeln!(out, "{pad}}}");
    }
}

pub fn pretty_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn write_expr(e: &Expr, out: &mut String) {
    match &e.kind {
        ExprKind::Value(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Field { inst, field } => {
            let _ = write!(out, "{inst}.{field}");
        }
        ExprKind::Var(x) => out.push_str(&x.name),
        ExprKind::App { op: Op::Not, args } => {
            out.push('!');
            write_operand(&args[0], |_| true, out);
        }
        ExprKind::App { op, args } => {
            let prec = op.precedence();
            let cmp = matches!(op, Op::Eq | Op::Ne);
            write_operand(&args[0], |c| c < prec || (cmp && c == prec), out);
            let _ = write!(out, " {} ", op.symbol());
            write_operand(&args[1], |c| c <= prec, out);
        }
    }
}

/// Writes `e`, parenthesized when it is a binary application whose
/// precedence satisfies `needs_parens`.
fn write_operand(e: &Expr, needs_parens: impl Fn(u8) -> bool, out: &mut String) {
    let wrap = match &e.kind {
        ExprKind::App { op, .. } if *op != Op::Not => needs_parens(op.precedence()),
        _ => false,
    };
    if wrap {
        out.push('(');
        write_expr(e, out);
        out.push(')');
    } else {
        write_expr(e, out);
    }
}
