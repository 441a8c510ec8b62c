use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::error::{ErrorCode, ParseError, Pos};
use super::lexer::{tokenize, Tok, Token};
use super::session::{BracketDef, BundleDecl, CheckDef, Command, DensityDef, OpDef, Session, Verdict};
use crate::algebroid::BiDiffOp;
use crate::homological::ClassicalAlgebroidSpec;
use crate::jetcore::{Bundle, DiffPoly, MultiIndex, Parity, Rational};
use crate::operators::{ScalarOp, TotalDiffOp};

/// Default cap on derivative orders, overridable through `JETS_MAX_ORDER`.
pub const DEFAULT_MAX_ORDER: u32 = 16;

/// Cap on derivative orders taken from the environment.
pub fn max_order_from_env() -> u32 {
    std::env::var("JETS_MAX_ORDER")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
}

/// Parse with the order cap taken from the environment.
pub fn parse_session(text: &str) -> Result<Session, ParseError> {
    parse_session_with(text, max_order_from_env())
}

pub fn parse_session_with(text: &str, max_order: u32) -> Result<Session, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        at: 0,
        max_order,
        session: Session::default(),
        has_base: false,
    };
    p.session_body()?;
    Ok(p.session)
}

#[derive(Clone, Debug)]
enum Expr {
    Num(BigInt),
    Name(String),
    Deriv(Vec<(String, Pos)>),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
}

#[derive(Clone, Debug)]
struct Node {
    expr: Expr,
    pos: Pos,
}

/// One `(i,j)=[...]` entry of a classical block, with source positions.
type ConstantEntry = ((usize, Pos), (usize, Pos), Vec<Node>, Pos);

fn err(code: ErrorCode, pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::new(code, pos, msg)
}

/// Bundles visible to an expression, by symbol.
type Scope = BTreeMap<String, Bundle>;

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    max_order: u32,
    session: Session,
    has_base: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        let t = self.next();
        if t.tok == tok {
            Ok(t.pos)
        } else {
            Err(err(
                ErrorCode::Syntax,
                t.pos,
                format!("expected `{}`, found {}", tok.symbol(), t.tok.describe()),
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.pos)),
            other => Err(err(
                ErrorCode::Syntax,
                t.pos,
                format!("expected identifier, found {}", other.describe()),
            )),
        }
    }

    fn integer(&mut self) -> Result<(usize, Pos), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Int(n) => n
                .to_usize()
                .map(|v| (v, t.pos))
                .ok_or_else(|| err(ErrorCode::InvalidExpression, t.pos, "integer out of range")),
            other => Err(err(
                ErrorCode::Syntax,
                t.pos,
                format!("expected integer, found {}", other.describe()),
            )),
        }
    }

    fn session_body(&mut self) -> Result<(), ParseError> {
        while self.peek() != &Tok::Eof {
            let (kw, pos) = self.ident()?;
            match kw.as_str() {
                "base" => self.base_stmt(pos)?,
                "even" => self.bundle_stmt(Parity::Even)?,
                "odd" => self.bundle_stmt(Parity::Odd)?,
                "op" => self.op_stmt()?,
                "bracket" => self.bracket_stmt()?,
                "density" => self.density_stmt()?,
                "classical" => self.classical_stmt()?,
                "check" => self.check_stmt()?,
                other => {
                    return Err(err(ErrorCode::Syntax, pos, format!("unknown statement `{other}`")))
                }
            }
        }
        Ok(())
    }

    fn name_taken(&self, name: &str) -> bool {
        self.session.bases.iter().any(|b| b == name)
            || self.session.bundle(name).is_some()
            || self.session.kind_of(name).is_some()
            || name == "D"
    }

    fn fresh_name(&self, name: &str, pos: Pos) -> Result<(), ParseError> {
        if self.name_taken(name) {
            Err(err(ErrorCode::Duplicate, pos, format!("`{name}` is already defined")))
        } else {
            Ok(())
        }
    }

    fn base_stmt(&mut self, pos: Pos) -> Result<(), ParseError> {
        if self.has_base || !self.session.bundles.is_empty() {
            return Err(err(
                ErrorCode::Syntax,
                pos,
                "`base` must appear once, before any bundle",
            ));
        }
        self.has_base = true;
        while self.peek() != &Tok::Semi {
            let (name, npos) = self.ident()?;
            let single = name.len() == 1 && name.chars().all(|c| c.is_ascii_lowercase());
            if !single {
                return Err(err(
                    ErrorCode::InvalidExpression,
                    npos,
                    format!("base variable `{name}` must be a single lowercase letter"),
                ));
            }
            self.fresh_name(&name, npos)?;
            self.session.bases.push(name);
            self.eat(&Tok::Comma);
        }
        self.expect(Tok::Semi)?;
        Ok(())
    }

    fn base_index(&self, name: &str, pos: Pos) -> Result<usize, ParseError> {
        self.session
            .bases
            .iter()
            .position(|b| b == name)
            .ok_or_else(|| err(ErrorCode::UnknownName, pos, format!("unknown base variable {name}")))
    }

    fn bundle_stmt(&mut self, parity: Parity) -> Result<(), ParseError> {
        let (sym, pos) = self.ident()?;
        if !sym.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(err(
                ErrorCode::InvalidExpression,
                pos,
                format!("bundle symbol `{sym}` must consist of letters only"),
            ));
        }
        self.fresh_name(&sym, pos)?;
        self.expect(Tok::Colon)?;
        let (dim, dpos) = self.integer()?;
        if dim == 0 {
            return Err(err(ErrorCode::Arity, dpos, "bundle dimension must be positive"));
        }
        let mut depends = None;
        let mut dual = None;
        loop {
            match self.peek().clone() {
                Tok::Ident(s) if s == "depends" => {
                    self.next();
                    let mut idx = Vec::new();
                    while let Tok::Ident(s) = self.peek().clone() {
                        if s == "dual" {
                            break;
                        }
                        let p = self.pos();
                        self.next();
                        idx.push(self.base_index(&s, p)?);
                        self.eat(&Tok::Comma);
                    }
                    depends = Some(idx);
                }
                Tok::Ident(s) if s == "dual" => {
                    self.next();
                    let (w, wpos) = self.ident()?;
                    let target = self
                        .session
                        .bundle(&w)
                        .ok_or_else(|| err(ErrorCode::UnknownName, wpos, format!("unknown bundle {w}")))?;
                    if target.bundle.parity() == parity {
                        return Err(err(
                            ErrorCode::Parity,
                            wpos,
                            format!("`{sym}` and its dual `{w}` must have opposite parity"),
                        ));
                    }
                    if target.bundle.dim() != dim {
                        return Err(err(
                            ErrorCode::Arity,
                            wpos,
                            format!("`{sym}` and its dual `{w}` must have equal dimension"),
                        ));
                    }
                    dual = Some(w);
                }
                _ => break,
            }
        }
        self.expect(Tok::Semi)?;
        let depends = depends.unwrap_or_else(|| (0..self.session.bases.len()).collect());
        self.session.bundles.push(BundleDecl {
            bundle: Bundle::new(&sym, dim, parity, depends),
            dual,
        });
        Ok(())
    }

    fn declared_bundle(&self, name: &str, pos: Pos) -> Result<Bundle, ParseError> {
        self.session
            .bundle(name)
            .map(|d| d.bundle.clone())
            .ok_or_else(|| err(ErrorCode::UnknownName, pos, format!("unknown bundle {name}")))
    }

    fn scope(&self) -> Scope {
        self.session
            .bundles
            .iter()
            .map(|d| (d.bundle.symbol().to_string(), d.bundle.clone()))
            .collect()
    }

    fn op_stmt(&mut self) -> Result<(), ParseError> {
        let (name, pos) = self.ident()?;
        self.fresh_name(&name, pos)?;
        self.expect(Tok::Colon)?;
        let (dom, dpos) = self.ident()?;
        let domain = self.declared_bundle(&dom, dpos)?;
        self.expect(Tok::Arrow)?;
        let (cod, cpos) = self.ident()?;
        let codomain = self.declared_bundle(&cod, cpos)?;
        if codomain.parity().is_odd() {
            return Err(err(ErrorCode::Parity, cpos, format!("codomain `{cod}` must be even")));
        }
        self.expect(Tok::Eq)?;
        let epos = self.pos();
        let cells = self.matrix_or_expr()?;
        self.expect(Tok::Semi)?;
        let scope = self.scope();
        let (rows, cols) = (codomain.dim(), domain.dim());
        let cells = match cells {
            Cells::Scalar(e) if rows == 1 && cols == 1 => vec![vec![e]],
            Cells::Scalar(_) => {
                return Err(err(
                    ErrorCode::Arity,
                    epos,
                    format!("operator {dom} -> {cod} needs a {rows}x{cols} matrix"),
                ))
            }
            Cells::Matrix(m) => m,
        };
        if cells.len() != rows || cells.iter().any(|r| r.len() != cols) {
            return Err(err(
                ErrorCode::Arity,
                epos,
                format!("operator {dom} -> {cod} needs a {rows}x{cols} matrix"),
            ));
        }
        let mut entries = Vec::with_capacity(rows);
        for row in &cells {
            let mut out = Vec::with_capacity(cols);
            for cell in row {
                let op = self.eval_op(cell, &scope)?;
                if op.order() > self.max_order {
                    return Err(err(
                        ErrorCode::OrderLimit,
                        cell.pos,
                        format!("operator order {} exceeds the limit {}", op.order(), self.max_order),
                    ));
                }
                out.push(op);
            }
            entries.push(out);
        }
        let op = TotalDiffOp::new(domain, codomain, entries).map_err(|e| ParseError::from_engine(epos, e))?;
        self.session.ops.push(OpDef { name, op });
        Ok(())
    }

    fn bracket_stmt(&mut self) -> Result<(), ParseError> {
        let (name, pos) = self.ident()?;
        let op = self
            .session
            .op(&name)
            .ok_or_else(|| err(ErrorCode::UnknownName, pos, format!("unknown operator {name}")))?
            .op
            .clone();
        if self.session.bracket(&name).is_some() {
            return Err(err(ErrorCode::Duplicate, pos, format!("bracket for `{name}` already defined")));
        }
        self.expect(Tok::LParen)?;
        let (p, ppos) = self.ident()?;
        self.expect(Tok::Comma)?;
        let (q, qpos) = self.ident()?;
        self.expect(Tok::RParen)?;
        for (s, sp) in [(&p, ppos), (&q, qpos)] {
            self.fresh_name(s, sp)?;
            if !s.chars().all(|c| c.is_ascii_alphabetic()) {
                return Err(err(
                    ErrorCode::InvalidExpression,
                    sp,
                    format!("slot name `{s}` must consist of letters only"),
                ));
            }
        }
        if p == q {
            return Err(err(ErrorCode::Duplicate, qpos, "bracket slots must differ"));
        }
        self.expect(Tok::Eq)?;
        let epos = self.pos();
        let values = self.tuple_or_expr()?;
        self.expect(Tok::Semi)?;
        let pb = op.domain().renamed(&p, Parity::Even);
        let qb = op.domain().renamed(&q, Parity::Even);
        let mut scope = self.scope();
        scope.insert(p.clone(), pb.clone());
        scope.insert(q.clone(), qb.clone());
        if values.len() != op.cols() {
            return Err(err(
                ErrorCode::Arity,
                epos,
                format!("bracket of `{name}` needs {} components, got {}", op.cols(), values.len()),
            ));
        }
        let mut polys = Vec::new();
        for v in &values {
            let poly = self.eval_poly(v, &scope)?;
            for var in poly.jet_vars() {
                if var.is_odd() {
                    return Err(err(
                        ErrorCode::Parity,
                        v.pos,
                        format!("bracket coefficients must be even; `{}` is odd", var.bundle().symbol()),
                    ));
                }
            }
            polys.push(poly);
        }
        let bracket = BiDiffOp::from_bilinear(&polys, &pb, &qb).map_err(|e| ParseError::from_engine(epos, e))?;
        self.session.brackets.push(BracketDef {
            op: name,
            p: pb,
            q: qb,
            bracket,
        });
        Ok(())
    }

    fn density_stmt(&mut self) -> Result<(), ParseError> {
        let (name, pos) = self.ident()?;
        self.fresh_name(&name, pos)?;
        self.expect(Tok::LParen)?;
        let (u, upos) = self.ident()?;
        self.expect(Tok::Comma)?;
        let (b, bpos) = self.ident()?;
        self.expect(Tok::RParen)?;
        let ub = self.declared_bundle(&u, upos)?;
        let bb = self.declared_bundle(&b, bpos)?;
        if ub.parity().is_odd() {
            return Err(err(ErrorCode::Parity, upos, format!("`{u}` must be even")));
        }
        if !bb.parity().is_odd() {
            return Err(err(ErrorCode::Parity, bpos, format!("`{b}` must be odd")));
        }
        if ub.dim() != bb.dim() {
            return Err(err(ErrorCode::Arity, bpos, format!("`{u}` and `{b}` must have equal dimension")));
        }
        self.expect(Tok::Eq)?;
        let e = self.expr()?;
        self.expect(Tok::Semi)?;
        let density = self.eval_poly(&e, &self.scope())?;
        if density.parity() != Ok(Parity::Even) {
            return Err(err(ErrorCode::Parity, e.pos, "density must be even"));
        }
        self.session.densities.push(DensityDef {
            name,
            u: ub,
            b: bb,
            density,
        });
        Ok(())
    }

    fn classical_stmt(&mut self) -> Result<(), ParseError> {
        let (name, pos) = self.ident()?;
        self.fresh_name(&name, pos)?;
        self.expect(Tok::LBrace)?;
        let mut m = None;
        let mut d = None;
        let mut anchors: Option<(Vec<Vec<Node>>, Pos)> = None;
        let mut constants: Vec<ConstantEntry> = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let (field, fpos) = self.ident()?;
            self.expect(Tok::Eq)?;
            match field.as_str() {
                "coords" => m = Some(self.integer()?.0),
                "rank" => d = Some(self.integer()?.0),
                "anchors" => {
                    let apos = self.pos();
                    let rows = match self.matrix_or_expr()? {
                        Cells::Matrix(rows) => rows,
                        Cells::Scalar(_) => {
                            return Err(err(ErrorCode::Syntax, apos, "anchors must be a list of rows"))
                        }
                    };
                    anchors = Some((rows, apos));
                }
                "constants" => {
                    self.expect(Tok::LBrace)?;
                    while !self.eat(&Tok::RBrace) {
                        let cpos = self.expect(Tok::LParen)?;
                        let i = self.integer()?;
                        self.expect(Tok::Comma)?;
                        let j = self.integer()?;
                        self.expect(Tok::RParen)?;
                        self.expect(Tok::Eq)?;
                        self.expect(Tok::LBracket)?;
                        let v = self.list_items(Tok::RBracket)?;
                        self.expect(Tok::Semi)?;
                        constants.push((i, j, v, cpos));
                    }
                }
                other => {
                    return Err(err(ErrorCode::Syntax, fpos, format!("unknown classical field `{other}`")))
                }
            }
            self.expect(Tok::Semi)?;
        }
        let (m, d) = match (m, d) {
            (Some(m), Some(d)) => (m, d),
            _ => return Err(err(ErrorCode::Syntax, pos, "classical block needs `coords` and `rank`")),
        };
        let (u, _) = ClassicalAlgebroidSpec::coordinates(m, d);
        let scope: Scope = [("u".to_string(), u)].into_iter().collect();
        let (rows, apos) = anchors.ok_or_else(|| err(ErrorCode::Syntax, pos, "classical block needs `anchors`"))?;
        if rows.len() != d || rows.iter().any(|r| r.len() != m) {
            return Err(err(ErrorCode::Arity, apos, format!("anchors must be {d} rows of {m} entries")));
        }
        let mut anchor_polys = Vec::new();
        for row in &rows {
            let mut out = Vec::new();
            for e in row {
                out.push(self.eval_poly(e, &scope)?);
            }
            anchor_polys.push(out);
        }
        let mut c = vec![vec![vec![DiffPoly::zero(); d]; d]; d];
        let mut seen = Vec::new();
        for ((i, ipos), (j, jpos), v, cpos) in &constants {
            for (k, kpos) in [(*i, *ipos), (*j, *jpos)] {
                if k == 0 || k > d {
                    return Err(err(ErrorCode::Arity, kpos, format!("generator index {k} outside 1..{d}")));
                }
            }
            if i == j {
                return Err(err(ErrorCode::InvalidExpression, *cpos, "c^k_ii vanishes by antisymmetry"));
            }
            let key = ((*i).min(*j), (*i).max(*j));
            if seen.contains(&key) {
                return Err(err(ErrorCode::Duplicate, *cpos, format!("constants ({i},{j}) given twice")));
            }
            seen.push(key);
            if v.len() != d {
                return Err(err(ErrorCode::Arity, *cpos, format!("constants ({i},{j}) need {d} entries")));
            }
            for (k, e) in v.iter().enumerate() {
                let val = self.eval_poly(e, &scope)?;
                c[k][j - 1][i - 1] = -&val;
                c[k][i - 1][j - 1] = val;
            }
        }
        let spec =
            ClassicalAlgebroidSpec::new(name, anchor_polys, c, m).map_err(|e| ParseError::from_engine(pos, e))?;
        self.session.classical.push(spec);
        Ok(())
    }

    fn check_stmt(&mut self) -> Result<(), ParseError> {
        let (first, pos) = self.ident()?;
        let mut cmd = first;
        while self.peek() == &Tok::Minus {
            self.next();
            cmd.push('-');
            cmd.push_str(&self.ident()?.0);
        }
        let command =
            Command::parse(&cmd).ok_or_else(|| err(ErrorCode::UnknownName, pos, format!("unknown check command {cmd}")))?;
        let (target, tpos) = self.ident()?;
        let kind = self
            .session
            .kind_of(&target)
            .ok_or_else(|| err(ErrorCode::UnknownName, tpos, format!("unknown name {target}")))?;
        if !command.accepts().contains(&kind) {
            let wanted: Vec<&str> = command.accepts().iter().map(|k| k.label()).collect();
            return Err(err(
                ErrorCode::Arity,
                tpos,
                format!("`{command}` expects {}, `{target}` is a {}", wanted.join(" or "), kind.label()),
            ));
        }
        let mut expect = Verdict::Pass;
        if let Tok::Ident(s) = self.peek() {
            if s == "expect" {
                self.next();
                let (v, vpos) = self.ident()?;
                expect = match v.as_str() {
                    "pass" => Verdict::Pass,
                    "fail" => Verdict::Fail,
                    _ => return Err(err(ErrorCode::Syntax, vpos, "expected `pass` or `fail`")),
                };
            }
        }
        self.expect(Tok::Semi)?;
        self.session.checks.push(CheckDef {
            command,
            target,
            expect,
        });
        Ok(())
    }

    // Expressions.

    fn list_items(&mut self, close: Tok) -> Result<Vec<Node>, ParseError> {
        let mut items = Vec::new();
        if self.eat(&close) {
            return Ok(items);
        }
        loop {
            items.push(self.expr()?);
            if self.eat(&close) {
                return Ok(items);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn matrix_or_expr(&mut self) -> Result<Cells, ParseError> {
        if !self.eat(&Tok::LBracket) {
            return Ok(Cells::Scalar(self.expr()?));
        }
        let mut rows = Vec::new();
        if self.eat(&Tok::RBracket) {
            return Ok(Cells::Matrix(rows));
        }
        loop {
            self.expect(Tok::LBracket)?;
            rows.push(self.list_items(Tok::RBracket)?);
            if self.eat(&Tok::RBracket) {
                return Ok(Cells::Matrix(rows));
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn tuple_or_expr(&mut self) -> Result<Vec<Node>, ParseError> {
        if self.eat(&Tok::LBracket) {
            self.list_items(Tok::RBracket)
        } else {
            Ok(vec![self.expr()?])
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.pos();
            let ctor: fn(Box<Node>, Box<Node>) -> Expr = match self.peek() {
                Tok::Plus => Expr::Add,
                Tok::Minus => Expr::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.term()?;
            lhs = Node {
                expr: ctor(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            let ctor: fn(Box<Node>, Box<Node>) -> Expr = match self.peek() {
                Tok::Star => Expr::Mul,
                Tok::Slash => Expr::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Node {
                expr: ctor(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        if self.eat(&Tok::Minus) {
            let inner = self.unary()?;
            return Ok(Node {
                expr: Expr::Neg(Box::new(inner)),
                pos,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let (k, kpos) = self.integer()?;
        let k = u32::try_from(k).map_err(|_| err(ErrorCode::InvalidExpression, kpos, "exponent too large"))?;
        let pos = base.pos;
        Ok(Node {
            expr: Expr::Pow(Box::new(base), k),
            pos,
        })
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let t = self.next();
        let pos = t.pos;
        let expr = match t.tok {
            Tok::Int(n) => Expr::Num(n),
            Tok::Ident(s) if s == "D" => {
                self.expect(Tok::LBracket)?;
                let mut vars = Vec::new();
                loop {
                    let (v, vpos) = self.ident()?;
                    vars.push((v, vpos));
                    if self.eat(&Tok::RBracket) {
                        break;
                    }
                    self.expect(Tok::Comma)?;
                }
                Expr::Deriv(vars)
            }
            Tok::Ident(s) => Expr::Name(s),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(inner);
            }
            other => {
                return Err(err(
                    ErrorCode::Syntax,
                    pos,
                    format!("expected an expression, found {}", other.describe()),
                ))
            }
        };
        Ok(Node { expr, pos })
    }

    // Evaluation.

    fn resolve_name(&self, name: &str, pos: Pos, scope: &Scope) -> Result<DiffPoly, ParseError> {
        if let Some(i) = self.session.bases.iter().position(|b| b == name) {
            return Ok(DiffPoly::base(i));
        }
        let (head, tail) = match name.split_once('_') {
            Some((h, t)) => (h, Some(t)),
            None => (name, None),
        };
        let split = head.find(|c: char| c.is_ascii_digit()).unwrap_or(head.len());
        let (sym, digits) = head.split_at(split);
        let bundle = scope
            .get(sym)
            .ok_or_else(|| err(ErrorCode::UnknownName, pos, format!("unknown identifier {name}")))?;
        let component = if bundle.dim() == 1 {
            if !digits.is_empty() {
                return Err(err(ErrorCode::Arity, pos, format!("`{sym}` has a single component")));
            }
            0
        } else {
            let c: usize = digits.parse().map_err(|_| {
                err(
                    ErrorCode::Arity,
                    pos,
                    format!("`{sym}` has {} components; write {sym}1..{sym}{}", bundle.dim(), bundle.dim()),
                )
            })?;
            if c == 0 || c > bundle.dim() {
                return Err(err(
                    ErrorCode::Arity,
                    pos,
                    format!("component {c} of `{sym}` outside 1..{}", bundle.dim()),
                ));
            }
            c - 1
        };
        let mut counts = vec![0u32; self.session.bases.len()];
        if let Some(tail) = tail {
            if tail.is_empty() {
                return Err(err(ErrorCode::Syntax, pos, format!("empty jet suffix in `{name}`")));
            }
            for ch in tail.chars() {
                let i = self.base_index(&ch.to_string(), pos)?;
                counts[i] += 1;
            }
        }
        let sigma = MultiIndex::from_counts(counts);
        if sigma.order() > self.max_order {
            return Err(err(
                ErrorCode::OrderLimit,
                pos,
                format!("jet order {} exceeds the limit {}", sigma.order(), self.max_order),
            ));
        }
        match bundle.jet(component, sigma.clone()) {
            Some(v) => Ok(DiffPoly::var(v)),
            None => {
                let missing: Vec<&str> = sigma
                    .iter()
                    .filter(|(i, _)| !bundle.depends_on_base(*i))
                    .map(|(i, _)| self.session.bases[i].as_str())
                    .collect();
                Err(err(
                    ErrorCode::InvalidExpression,
                    pos,
                    format!("`{sym}` does not depend on {}", missing.join(", ")),
                ))
            }
        }
    }

    fn eval_poly(&self, node: &Node, scope: &Scope) -> Result<DiffPoly, ParseError> {
        Ok(match &node.expr {
            Expr::Num(n) => DiffPoly::constant(Rational::from_integer(n.clone())),
            Expr::Name(s) => self.resolve_name(s, node.pos, scope)?,
            Expr::Deriv(_) => {
                return Err(err(
                    ErrorCode::InvalidExpression,
                    node.pos,
                    "total derivatives are only allowed in operators",
                ))
            }
            Expr::Neg(a) => -self.eval_poly(a, scope)?,
            Expr::Add(a, b) => self.eval_poly(a, scope)? + self.eval_poly(b, scope)?,
            Expr::Sub(a, b) => self.eval_poly(a, scope)? - self.eval_poly(b, scope)?,
            Expr::Mul(a, b) => self.eval_poly(a, scope)?.times(&self.eval_poly(b, scope)?),
            Expr::Div(a, b) => {
                let d = self.divisor(&self.eval_poly(b, scope)?, b.pos)?;
                self.eval_poly(a, scope)?.scale(&d)
            }
            Expr::Pow(a, k) => self.eval_poly(a, scope)?.pow(*k),
        })
    }

    fn divisor(&self, p: &DiffPoly, pos: Pos) -> Result<Rational, ParseError> {
        match p.as_constant() {
            Some(c) if !c.is_zero() => Ok(c.recip()),
            Some(_) => Err(err(ErrorCode::InvalidExpression, pos, "division by zero")),
            None => Err(err(ErrorCode::InvalidExpression, pos, "division by a non-constant")),
        }
    }

    fn eval_op(&self, node: &Node, scope: &Scope) -> Result<ScalarOp, ParseError> {
        Ok(match &node.expr {
            Expr::Num(_) | Expr::Name(_) => {
                let c = self.eval_poly(node, scope)?;
                if let Some(v) = c.jet_vars().into_iter().find(|v| v.is_odd()) {
                    return Err(err(
                        ErrorCode::Parity,
                        node.pos,
                        format!("operator coefficients must be even; `{}` is odd", v.bundle().symbol()),
                    ));
                }
                ScalarOp::mult(c)
            }
            Expr::Deriv(vars) => {
                let mut counts = vec![0u32; self.session.bases.len()];
                for (v, pos) in vars {
                    counts[self.base_index(v, *pos)?] += 1;
                }
                ScalarOp::derivative(MultiIndex::from_counts(counts))
            }
            Expr::Neg(a) => self.eval_op(a, scope)?.neg(),
            Expr::Add(a, b) => self.eval_op(a, scope)?.add(&self.eval_op(b, scope)?),
            Expr::Sub(a, b) => self.eval_op(a, scope)?.sub(&self.eval_op(b, scope)?),
            Expr::Mul(a, b) => self.eval_op(a, scope)?.compose(&self.eval_op(b, scope)?),
            Expr::Div(a, b) => {
                let d = self.eval_op(b, scope)?;
                let c = match (d.order(), d.terms().count()) {
                    (0, 0) => DiffPoly::zero(),
                    (0, _) => d.coeff(&MultiIndex::empty()),
                    _ => return Err(err(ErrorCode::InvalidExpression, b.pos, "division by a non-constant")),
                };
                let d = self.divisor(&c, b.pos)?;
                self.eval_op(a, scope)?.map_coeffs(|c| c.scale(&d))
            }
            Expr::Pow(a, k) => {
                let base = self.eval_op(a, scope)?;
                if base.order().saturating_mul(*k) > self.max_order {
                    return Err(err(
                        ErrorCode::OrderLimit,
                        node.pos,
                        format!("operator order exceeds the limit {}", self.max_order),
                    ));
                }
                let mut acc = ScalarOp::identity();
                for _ in 0..*k {
                    acc = acc.compose(&base);
                }
                acc
            }
        })
    }
}

enum Cells {
    Scalar(Node),
    Matrix(Vec<Vec<Node>>),
}
