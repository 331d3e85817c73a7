use crate::diagnostics::{Diagnostic, DiagnosticKind};

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::span::Span;

/// A declaration as written, before name resolution.
#[derive(Debug, Clone)]
pub enum RawDecl {
    HeaderType(HeaderTypeDecl),
    Instance(InstanceDecl),
    Action(ActionDecl),
    Table(TableDecl),
    Control(Command, Span),
}

type PResult<T> = Result<T, Diagnostic>;

pub fn parse_decls(src: &str) -> PResult<Vec<RawDecl>> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut decls = Vec::new();
    while !p.at_eof() {
        decls.push(p.decl()?);
    }
    Ok(decls)
}

/// Parse a standalone expression (used by tests and tools).
pub fn parse_expr(src: &str) -> PResult<Expr> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parse a standalone command sequence.
pub fn parse_command(src: &str) -> PResult<Command> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let c = p.commands_until_eof()?;
    Ok(c)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

const CMD_KEYWORDS: [&str; 5] = ["extract", "emit", "add", "remove", "apply"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn error<T>(&self, what: &str) -> PResult<T> {
        Err(Diagnostic::error(
            DiagnosticKind::Syntax,
            format!("expected {what}, found {}", self.peek().describe()),
            self.span(),
        ))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if *self.peek() == t {
            Ok(self.bump().span)
        } else {
            self.error(&t.describe())
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok(Ident::new(name, span))
            }
            _ => self.error("identifier"),
        }
    }

    fn width(&mut self) -> PResult<u32> {
        match self.peek().clone() {
            Tok::Int { value, width: None } => {
                let span = self.bump().span;
                if value == 0 || value > MAX_WIDTH as u128 {
                    return Err(Diagnostic::error(
                        DiagnosticKind::Malformed,
                        format!("width must be between 1 and {MAX_WIDTH}"),
                        span,
                    ));
                }
                Ok(value as u32)
            }
            _ => self.error("bit width"),
        }
    }

    fn decl(&mut self) -> PResult<RawDecl> {
        let Tok::Ident(kw) = self.peek().clone() else {
            return self.error("declaration");
        };
        match kw.as_str() {
            "header" => self.header_decl(),
            "instance" => self.instance_decl(),
            "action" => self.action_decl(),
            "table" => self.table_decl(),
            "control" => {
                let start = self.bump().span;
                let body = self.block()?;
                Ok(RawDecl::Control(body, start.to(self.prev_span())))
            }
            _ => self.error("`header`, `instance`, `action`, `table` or `control`"),
        }
    }

    fn header_decl(&mut self) -> PResult<RawDecl> {
        self.bump();
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut fields = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let fname = self.ident()?;
            self.expect(Tok::Colon)?;
            let width = self.width()?;
            fields.push(FieldDecl { name: fname, width });
            if !self.eat(&Tok::Semi) {
                self.eat(&Tok::Comma);
            }
        }
        Ok(RawDecl::HeaderType(HeaderTypeDecl { name, fields }))
    }

    fn instance_decl(&mut self) -> PResult<RawDecl> {
        self.bump();
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let header_type = self.ident()?;
        self.eat(&Tok::Semi);
        Ok(RawDecl::Instance(InstanceDecl { name, header_type }))
    }

    fn action_decl(&mut self) -> PResult<RawDecl> {
        self.bump();
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                let pname = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = if self.is_word("bool") {
                    self.bump();
                    BaseType::Bool
                } else {
                    BaseType::Bits(self.width()?)
                };
                params.push(Param { name: pname, ty });
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        let body = self.block()?;
        Ok(RawDecl::Action(ActionDecl { name, params, body }))
    }

    fn table_decl(&mut self) -> PResult<RawDecl> {
        self.bump();
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut table = TableDecl {
            name,
            valids: Vec::new(),
            reads: Vec::new(),
            actions: Vec::new(),
            default_action: None,
        };
        while !self.eat(&Tok::RBrace) {
            if self.is_word("reads") {
                self.bump();
                self.expect(Tok::LBrace)?;
                while !self.eat(&Tok::RBrace) {
                    let expr = self.expr()?;
                    self.expect(Tok::Colon)?;
                    let kind = self.ident()?;
                    match kind.name.as_str() {
                        "valid" => match expr.kind {
                            ExprKind::Var(h) => table.valids.push(h),
                            _ => {
                                return Err(Diagnostic::error(
                                    DiagnosticKind::Syntax,
                                    "a valid match takes a header instance name",
                                    expr.span,
                                ))
                            }
                        },
                        "exact" => table.reads.push(Read { expr, kind: MatchKind::Exact }),
                        "ternary" => table.reads.push(Read { expr, kind: MatchKind::Ternary }),
                        _ => {
                            return Err(Diagnostic::error(
                                DiagnosticKind::Syntax,
                                format!("unknown match kind `{}`", kind.name),
                                kind.span,
                            ))
                        }
                    }
                    self.eat(&Tok::Semi);
                }
            } else if self.is_word("actions") {
                self.bump();
                self.expect(Tok::LBrace)?;
                while !self.eat(&Tok::RBrace) {
                    table.actions.push(self.ident()?);
                    if !self.eat(&Tok::Semi) {
                        self.eat(&Tok::Comma);
                    }
                }
            } else if self.is_word("default_action") {
                let start = self.bump().span;
                self.expect(Tok::Colon)?;
                let action = self.ident()?;
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
                    loop {
                        args.push(self.expr()?);
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                let span = start.to(self.prev_span());
                self.eat(&Tok::Semi);
                if table.default_action.is_some() {
                    return Err(Diagnostic::error(
                        DiagnosticKind::Duplicate,
                        format!("duplicate default_action in table {}", table.name),
                        span,
                    ));
                }
                table.default_action = Some(DefaultAction { action, args, span });
            } else {
                return self.error("`reads`, `actions` or `default_action`");
            }
        }
        Ok(RawDecl::Table(table))
    }

    fn block(&mut self) -> PResult<Command> {
        let open = self.expect(Tok::LBrace)?;
        let mut cmds = Vec::new();
        while !self.eat(&Tok::RBrace) {
            if self.at_eof() {
                return Err(Diagnostic::error(DiagnosticKind::Syntax, "unclosed block", open));
            }
            if self.eat(&Tok::Semi) {
                continue;
            }
            cmds.push(self.command()?);
        }
        Ok(Command::seq(cmds))
    }

    fn commands_until_eof(&mut self) -> PResult<Command> {
        let mut cmds = Vec::new();
        while !self.at_eof() {
            if self.eat(&Tok::Semi) {
                continue;
            }
            cmds.push(self.command()?);
        }
        Ok(Command::seq(cmds))
    }

    fn command(&mut self) -> PResult<Command> {
        let start = self.span();
        let Tok::Ident(word) = self.peek().clone() else {
            return self.error("command");
        };
        if word == "skip" && !matches!(self.peek_at(1), Tok::Dot) {
            self.bump();
            return Ok(Command::new(CmdKind::Skip, start));
        }
        if word == "if" && matches!(self.peek_at(1), Tok::LParen) {
            return self.if_command();
        }
        if CMD_KEYWORDS.contains(&word.as_str()) && matches!(self.peek_at(1), Tok::LParen) {
            self.bump();
            self.expect(Tok::LParen)?;
            let h = self.ident()?;
            self.expect(Tok::RParen)?;
            let span = start.to(self.prev_span());
            let kind = match word.as_str() {
                "extract" => CmdKind::Extract(h),
                "emit" => CmdKind::Emit(h),
                "add" => CmdKind::Add(h),
                "remove" => CmdKind::Remove(h),
                _ => CmdKind::Apply(h),
            };
            return Ok(Command::new(kind, span));
        }
        let inst = self.ident()?;
        self.expect(Tok::Dot)?;
        let field = self.ident()?;
        self.expect(Tok::Assign)?;
        let value = self.expr()?;
        let span = start.to(value.span);
        Ok(Command::new(CmdKind::Modify { inst, field, value }, span))
    }

    fn if_command(&mut self) -> PResult<Command> {
        let start = self.bump().span;
        self.expect(Tok::LParen)?;
        let valid_test = self.is_word("valid") && matches!(self.peek_at(1), Tok::LParen);
        let head = if valid_test {
            let vstart = self.bump().span;
            self.expect(Tok::LParen)?;
            let h = self.ident()?;
            self.expect(Tok::RParen)?;
            if !matches!(self.peek(), Tok::RParen) {
                return Err(Diagnostic::error(
                    DiagnosticKind::Syntax,
                    "`valid(h)` must be the whole condition of an `if`",
                    vstart.to(self.prev_span()),
                ));
            }
            Err(h)
        } else {
            Ok(self.expr()?)
        };
        self.expect(Tok::RParen)?;
        let then = self.block()?;
        let els = if self.is_word("else") {
            self.bump();
            if self.is_word("if") && matches!(self.peek_at(1), Tok::LParen) {
                self.if_command()?
            } else {
                self.block()?
            }
        } else {
            Command::skip()
        };
        let span = start.to(self.prev_span());
        let kind = match head {
            Ok(cond) => CmdKind::If {
                cond,
                then: Box::new(then),
                els: Box::new(els),
            },
            Err(inst) => CmdKind::IfValid {
                inst,
                then: Box::new(then),
                els: Box::new(els),
            },
        };
        Ok(Command::new(kind, span))
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::OrOr => Op::Or,
                Tok::AndAnd => Op::And,
                Tok::EqEq => Op::Eq,
                Tok::NotEq => Op::Ne,
                Tok::Plus => Op::Add,
                Tok::Minus => Op::Sub,
                _ => return Ok(lhs),
            };
            let prec = op.precedence();
            if prec < min_prec {
                return Ok(lhs);
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            if matches!(op, Op::Eq | Op::Ne) && matches!(self.peek(), Tok::EqEq | Tok::NotEq) {
                return self.error("parentheses around chained comparison");
            }
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::App { op, args: vec![lhs, rhs] }, span);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if matches!(self.peek(), Tok::Bang) {
            let start = self.bump().span;
            let arg = self.unary()?;
            let span = start.to(arg.span);
            return Ok(Expr::new(ExprKind::App { op: Op::Not, args: vec![arg] }, span));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int { value, width } => {
                self.bump();
                let Some(w) = width else {
                    return Err(Diagnostic::error(
                        DiagnosticKind::Syntax,
                        format!("integer literal needs a width, as in `{value}:8`"),
                        start,
                    ));
                };
                if w == 0 || w > MAX_WIDTH {
                    return Err(Diagnostic::error(
                        DiagnosticKind::Malformed,
                        format!("width must be between 1 and {MAX_WIDTH}"),
                        start,
                    ));
                }
                if value > mask(w) {
                    return Err(Diagnostic::error(
                        DiagnosticKind::Malformed,
                        format!("literal {value} does not fit in {w} bits"),
                        start,
                    ));
                }
                Ok(Expr::new(ExprKind::Value(Value::bits(w, value)), start))
            }
            Tok::LParen => {
                self.bump();
                let mut e = self.expr()?;
                self.expect(Tok::RParen)?;
                e.span = start.to(self.prev_span());
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "true" => return Ok(Expr::new(ExprKind::Value(Value::Bool(true)), start)),
                    "false" => return Ok(Expr::new(ExprKind::Value(Value::Bool(false)), start)),
                    _ => {}
                }
                let id = Ident::new(name, start);
                if self.eat(&Tok::Dot) {
                    let field = self.ident()?;
                    let span = start.to(field.span);
                    Ok(Expr::new(ExprKind::Field { inst: id, field }, span))
                } else {
                    Ok(Expr::new(ExprKind::Var(id), start))
                }
            }
            _ => self.error("expression"),
        }
    }
}
