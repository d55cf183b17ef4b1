//! MiniLua: parallel assignment, multi-binder `local` declarations, only
//! calls as expression statements, and `elseif` chains.

use crate::fragments::{self, generic, OpsError, IDENT_L};
use crate::lang::syntax::{ident_str, is_keyword, print_expr, print_list, Dialect, ParseError, Parser, Printer, Tok};
use crate::lang::{
    gleaf, join, list_elem_path, minic::classify_c_like, ExprClass, Frontend, IpsError, LanguageDef, LanguageSpec,
    Path, SlotRole, StmtShape, TacHooks,
};
use crate::modularizer::GenericValue as V;
use crate::term::{build_list, extract_list, Payload, Sort, Term};

pub struct MiniLua;

pub const SCHEMA: &str = "\
type Program = Program [FunDef]
type FunDef = FunDef Ident [Ident] Block
type Block = Block [Stat]
type Stat = AssignStat [Expr] [Expr] | LocalStat LocalDecl | CallStat Expr | LuaIf Expr Block [ElseIf] OptElse | While Expr Block | ForNum Ident Expr Expr OptExpr Block | Return OptExpr | Break | Do Block
type LocalDecl = Local [Ident] OptInit
type OptInit = NoInit | JustInit [Expr]
type ElseIf = ElseIf Expr Block
type OptElse = NoElse | Else Block
type OptExpr = NoExpr | JustExpr Expr
type Expr = Nil | IntLit Int | BoolLit Bool | Var Ident | Index Expr Expr | Field Expr Ident | Call Ident [Expr] | Unary String Expr | Binary String Expr Expr
type Ident = Ident String
";

pub const SPEC: LanguageSpec = LanguageSpec {
    name: "MiniLua",
    key: "minilua",
    ext: "mlua",
    dialect: Dialect::Lua,
    schema: SCHEMA,
    identify: &[
        ("Ident", "IdentL"),
        ("Block", "BlockL"),
        ("Stat", "BlockItemL"),
        ("LocalDecl", "MultiLocalVarDeclL"),
        ("OptInit", "OptLocalVarInitL"),
    ],
    remove: &["Ident", "Block", "AssignStat", "Local", "NoInit", "JustInit"],
    generic: &[
        "Ident",
        "Assign",
        "AssignOpEquals",
        "Block",
        "EmptyBlockEnd",
        "MultiLocalVarDecl",
        "SingleLocalVarDecl",
        "JustLocalVarInit",
        "NoLocalVarInit",
        "EmptyCommonAttrs",
        "EmptyDeclAttrs",
    ],
    extra: &[
        ("AssignIsStat", &[], &["AssignL"], "BlockItemL"),
        ("ExprsIsLhs", &[], &["[MiniLua.ExprL]"], "LhsL"),
        ("ExprsIsRhs", &[], &["[MiniLua.ExprL]"], "RhsL"),
        ("ExprsIsLocalVarInit", &[], &["[MiniLua.ExprL]"], "LocalVarInitL"),
        ("IdentsIsBinder", &[], &["[IdentL]"], "VarDeclBinderL"),
    ],
    injections: &[
        ("AssignL", "BlockItemL", &["MiniLua.AssignIsStat"]),
        ("MultiLocalVarDeclL", "BlockItemL", &["MiniLua.LocalStat"]),
        ("[MiniLua.ExprL]", "LhsL", &["MiniLua.ExprsIsLhs"]),
        ("[MiniLua.ExprL]", "RhsL", &["MiniLua.ExprsIsRhs"]),
        ("[MiniLua.ExprL]", "LocalVarInitL", &["MiniLua.ExprsIsLocalVarInit"]),
        ("[IdentL]", "VarDeclBinderL", &["MiniLua.IdentsIsBinder"]),
    ],
    compose: &[],
};

fn starts_expr(p: &Parser) -> bool {
    match p.peek() {
        Tok::Int(_) => true,
        Tok::Sym(s) => matches!(*s, "(" | "-"),
        Tok::Ident(s) => !is_keyword(s, Dialect::Lua) || matches!(s.as_str(), "true" | "false" | "nil" | "not"),
        _ => false,
    }
}

/// Statements up to one of the closing keywords, which is left unconsumed.
fn parse_block(p: &mut Parser, closers: &[&str]) -> Result<V, ParseError> {
    let mut items = Vec::new();
    while !closers.iter().any(|k| p.is_kw(k)) {
        if p.at_eof() {
            return Err(p.error(&format!("`{}`", closers[0])));
        }
        items.push(parse_stat(p)?);
    }
    Ok(V::ctor("Block", vec![V::List(items)]))
}

fn block_to_end(p: &mut Parser) -> Result<V, ParseError> {
    let b = parse_block(p, &["end"])?;
    p.expect_kw("end")?;
    Ok(b)
}

fn parse_stat(p: &mut Parser) -> Result<V, ParseError> {
    if p.eat_kw("local") {
        let ids = p.comma_list("=", |p| p.ident())?;
        if ids.is_empty() {
            return Err(p.error("identifier"));
        }
        let init = if p.eat_sym("=") {
            let es = p.comma_list("", |p| p.expr())?;
            V::ctor("JustInit", vec![V::List(es)])
        } else {
            V::leaf("NoInit")
        };
        return Ok(V::ctor("LocalStat", vec![V::ctor("Local", vec![V::List(ids), init])]));
    }
    if p.eat_kw("if") {
        let c = p.expr()?;
        p.expect_kw("then")?;
        let then = parse_block(p, &["elseif", "else", "end"])?;
        let mut elifs = Vec::new();
        while p.eat_kw("elseif") {
            let c = p.expr()?;
            p.expect_kw("then")?;
            let b = parse_block(p, &["elseif", "else", "end"])?;
            elifs.push(V::ctor("ElseIf", vec![c, b]));
        }
        let els = if p.eat_kw("else") { V::ctor("Else", vec![parse_block(p, &["end"])?]) } else { V::leaf("NoElse") };
        p.expect_kw("end")?;
        return Ok(V::ctor("LuaIf", vec![c, then, V::List(elifs), els]));
    }
    if p.eat_kw("while") {
        let c = p.expr()?;
        p.expect_kw("do")?;
        return Ok(V::ctor("While", vec![c, block_to_end(p)?]));
    }
    if p.eat_kw("for") {
        let i = p.ident()?;
        p.expect_sym("=")?;
        let lo = p.expr()?;
        p.expect_sym(",")?;
        let hi = p.expr()?;
        let step = if p.eat_sym(",") { V::ctor("JustExpr", vec![p.expr()?]) } else { V::leaf("NoExpr") };
        p.expect_kw("do")?;
        return Ok(V::ctor("ForNum", vec![i, lo, hi, step, block_to_end(p)?]));
    }
    if p.eat_kw("do") {
        return Ok(V::ctor("Do", vec![block_to_end(p)?]));
    }
    if p.eat_kw("return") {
        let e = if starts_expr(p) { V::ctor("JustExpr", vec![p.expr()?]) } else { V::leaf("NoExpr") };
        p.eat_sym(";");
        return Ok(V::ctor("Return", vec![e]));
    }
    if p.eat_kw("break") {
        return Ok(V::leaf("Break"));
    }
    let first = p.expr()?;
    if p.is_sym("=") || p.is_sym(",") {
        let mut targets = vec![first];
        while p.eat_sym(",") {
            targets.push(p.expr()?);
        }
        if !targets.iter().all(crate::lang::syntax::is_lvalue) {
            return Err(p.error("assignable expressions before `=`"));
        }
        p.expect_sym("=")?;
        let es = p.comma_list("", |p| p.expr())?;
        if es.is_empty() {
            return Err(p.error("expression"));
        }
        return Ok(V::ctor("AssignStat", vec![V::List(targets), V::List(es)]));
    }
    if first.ctor_name() != "Call" {
        return Err(p.error("`=` or a call statement"));
    }
    Ok(V::ctor("CallStat", vec![first]))
}

pub fn parse(src: &str) -> Result<V, ParseError> {
    let mut p = Parser::new(src, Dialect::Lua)?;
    let mut funs = Vec::new();
    while !p.at_eof() {
        p.expect_kw("function")?;
        let name = p.ident()?;
        p.expect_sym("(")?;
        let params = p.comma_list(")", |p| p.ident())?;
        p.expect_sym(")")?;
        let body = block_to_end(&mut p)?;
        funs.push(V::ctor("FunDef", vec![name, V::List(params), body]));
    }
    Ok(V::ctor("Program", vec![V::List(funs)]))
}

fn e(v: &V) -> String {
    print_expr(v, Dialect::Lua)
}

fn block_body(pr: &mut Printer, b: &V) {
    pr.depth += 1;
    let items = b.arg(0).as_list();
    for (i, s) in items.iter().enumerate() {
        print_stat(pr, s, i + 1 == items.len());
    }
    pr.depth -= 1;
}

fn names(ids: &[V]) -> String {
    ids.iter().map(ident_str).collect::<Vec<_>>().join(", ")
}

/// `last` tells whether nothing follows in the block; a bare `return`
/// elsewhere gets a `;` so the next statement is not read as its value.
fn print_stat(pr: &mut Printer, s: &V, last: bool) {
    match s.ctor_name() {
        "AssignStat" => pr.line(&format!(
            "{} = {}",
            print_list(s.arg(0).as_list(), Dialect::Lua),
            print_list(s.arg(1).as_list(), Dialect::Lua)
        )),
        "LocalStat" => {
            let d = s.arg(0);
            let ids = names(d.arg(0).as_list());
            match d.arg(1).ctor_name() {
                "JustInit" => {
                    pr.line(&format!("local {ids} = {}", print_list(d.arg(1).arg(0).as_list(), Dialect::Lua)))
                }
                _ => pr.line(&format!("local {ids}")),
            }
        }
        "CallStat" => pr.line(&e(s.arg(0))),
        "LuaIf" => {
            pr.line(&format!("if {} then", e(s.arg(0))));
            block_body(pr, s.arg(1));
            for ei in s.arg(2).as_list() {
                pr.line(&format!("elseif {} then", e(ei.arg(0))));
                block_body(pr, ei.arg(1));
            }
            if s.arg(3).ctor_name() == "Else" {
                pr.line("else");
                block_body(pr, s.arg(3).arg(0));
            }
            pr.line("end");
        }
        "While" => {
            pr.line(&format!("while {} do", e(s.arg(0))));
            block_body(pr, s.arg(1));
            pr.line("end");
        }
        "ForNum" => {
            let step = match s.arg(3).ctor_name() {
                "JustExpr" => format!(", {}", e(s.arg(3).arg(0))),
                _ => String::new(),
            };
            pr.line(&format!("for {} = {}, {}{step} do", ident_str(s.arg(0)), e(s.arg(1)), e(s.arg(2))));
            block_body(pr, s.arg(4));
            pr.line("end");
        }
        "Return" => match s.arg(0).ctor_name() {
            "JustExpr" => pr.line(&format!("return {}", e(s.arg(0).arg(0)))),
            _ if last => pr.line("return"),
            _ => pr.line("return;"),
        },
        "Break" => pr.line("break"),
        "Do" => {
            pr.line("do");
            block_body(pr, s.arg(0));
            pr.line("end");
        }
        other => pr.line(&format!("<{other}>")),
    }
}

pub fn pretty(ast: &V) -> String {
    let mut pr = Printer::new();
    for (i, f) in ast.arg(0).as_list().iter().enumerate() {
        if i > 0 {
            pr.out.push('\n');
        }
        pr.line(&format!("function {}({})", ident_str(f.arg(0)), names(f.arg(1).as_list())));
        block_body(&mut pr, f.arg(2));
        pr.line("end");
    }
    pr.out
}

fn expr_sort() -> Sort {
    Sort::atomic("MiniLua.ExprL")
}

fn exprs(items: Vec<Term>) -> Result<Term, IpsError> {
    Ok(build_list(&expr_sort(), items)?)
}

fn local_decl(lang: &LanguageDef, ids: Term, init: Term) -> Result<Term, IpsError> {
    let single = lang.mk(
        "SingleLocalVarDecl",
        vec![],
        vec![gleaf("EmptyDeclAttrs"), lang.mkl("IdentsIsBinder", vec![], vec![ids])?, init],
    )?;
    let list = build_list(&fragments::sort(fragments::SINGLE_DECL_L), [single])?;
    Ok(lang.mk("MultiLocalVarDecl", vec![], vec![gleaf("EmptyCommonAttrs"), list])?)
}

fn assign_stat(lang: &LanguageDef, lhs: Term, rhs: Term) -> Result<Term, IpsError> {
    let a =
        generic().mk_assign(lang.mkl("ExprsIsLhs", vec![], vec![lhs])?, lang.mkl("ExprsIsRhs", vec![], vec![rhs])?)?;
    Ok(lang.mkl("AssignIsStat", vec![], vec![a])?)
}

impl Frontend for MiniLua {
    fn parse(&self, src: &str) -> Result<V, ParseError> {
        parse(src)
    }

    fn pretty(&self, ast: &V) -> String {
        pretty(ast)
    }

    fn trans_node(
        &self,
        lang: &LanguageDef,
        kind: &str,
        payloads: &[Payload],
        kids: &[Term],
    ) -> Result<Option<Term>, IpsError> {
        let g = generic();
        let k = kind.strip_prefix("MiniLua.").unwrap_or(kind);
        Ok(Some(match k {
            "Ident" => Term::new(&g.ident, payloads.to_vec(), vec![])?,
            "Block" => g.mk_block(extract_list(&kids[0])?)?,
            "AssignStat" => assign_stat(lang, kids[0].clone(), kids[1].clone())?,
            "Local" => local_decl(lang, kids[0].clone(), kids[1].clone())?,
            "NoInit" => gleaf("NoLocalVarInit"),
            "JustInit" => lang.mk(
                "JustLocalVarInit",
                vec![],
                vec![lang.mkl("ExprsIsLocalVarInit", vec![], vec![kids[0].clone()])?],
            )?,
            _ => return Ok(None),
        }))
    }

    fn untrans_node(&self, lang: &LanguageDef, t: &Term) -> Result<Option<Term>, IpsError> {
        let bad = || lang.unrepresentable(t.to_sexpr());
        let u = |x: &Term| lang.untrans_ips(x);
        Ok(Some(match t.name() {
            "Ident" => lang.mk_mod("Ident", t.payloads().to_vec(), vec![])?,
            "Block" => {
                if !t.child(1).is("EmptyBlockEnd") {
                    return Err(bad());
                }
                lang.mk_mod("Block", vec![], vec![u(t.child(0))?])?
            }
            "MiniLua.AssignIsStat" => {
                let a = t.child(0);
                let (l, op, r) = (a.child(0), a.child(1), a.child(2));
                if !op.is("AssignOpEquals") || !lang.is(l, "ExprsIsLhs") || !lang.is(r, "ExprsIsRhs") {
                    return Err(bad());
                }
                lang.mk_mod("AssignStat", vec![], vec![u(l.child(0))?, u(r.child(0))?])?
            }
            "MultiLocalVarDecl" => {
                let ds = extract_list(t.child(1))?;
                let [d] = ds.as_slice() else {
                    return Err(lang.unrepresentable("a local declaration has exactly one binder list"));
                };
                let b = d.child(1);
                if !t.child(0).is("EmptyCommonAttrs")
                    || !d.child(0).is("EmptyDeclAttrs")
                    || !lang.is(b, "IdentsIsBinder")
                {
                    return Err(bad());
                }
                lang.mk_mod("Local", vec![], vec![u(b.child(0))?, u(d.child(2))?])?
            }
            "NoLocalVarInit" => lang.mk_mod("NoInit", vec![], vec![])?,
            "JustLocalVarInit" => {
                let i = t.child(0);
                if !lang.is(i, "ExprsIsLocalVarInit") {
                    return Err(bad());
                }
                lang.mk_mod("JustInit", vec![], vec![u(i.child(0))?])?
            }
            _ => return Ok(None),
        }))
    }

    fn var_init_to_rhs(
        &self,
        lang: &LanguageDef,
        _common: &Term,
        _attrs: &Term,
        init: &Term,
    ) -> Result<Term, OpsError> {
        if !lang.is(init, "ExprsIsLocalVarInit") {
            return Err(OpsError::UnconvertibleInit(init.to_sexpr()));
        }
        Ok(lang.mkl("ExprsIsRhs", vec![], vec![init.child(0).clone()])?)
    }

    fn var_decl_binder_to_lhs(&self, lang: &LanguageDef, binder: &Term) -> Result<Term, OpsError> {
        if !lang.is(binder, "IdentsIsBinder") {
            return Err(OpsError::UnexpectedBinder(binder.to_sexpr()));
        }
        let vars = extract_list(binder.child(0))
            .map_err(OpsError::Term)?
            .into_iter()
            .map(|id| lang.mkl("Var", vec![], vec![id]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(lang.mkl("ExprsIsLhs", vec![], vec![exprs(vars)?])?)
    }

    fn stmt_shape(&self, lang: &LanguageDef, s: &Term) -> StmtShape {
        match s.name().strip_prefix("MiniLua.").unwrap_or("") {
            "LuaIf" => {
                let n = extract_list(s.child(2)).map(|l| l.len()).unwrap_or(0);
                let mut arms = vec![(vec![0], vec![1])];
                for k in 0..n {
                    let p = list_elem_path(&[2], k);
                    arms.push((join(&p, &[0]), join(&p, &[1])));
                }
                StmtShape::IfChain { arms, els: lang.is(s.child(3), "Else").then(|| vec![3, 0]) }
            }
            "While" => StmtShape::While { cond: vec![0], body: vec![1] },
            "ForNum" => StmtShape::CountedFor { body: vec![4] },
            "Do" => StmtShape::Nested { block: vec![0] },
            "Return" => StmtShape::Return,
            "Break" => StmtShape::Break,
            _ => StmtShape::Plain,
        }
    }

    fn functions(&self, _lang: &LanguageDef, program: &Term) -> Vec<(String, Path)> {
        let n = extract_list(program.child(0)).map(|l| l.len()).unwrap_or(0);
        (0..n)
            .map(|k| {
                let p = list_elem_path(&[0], k);
                let f = program.at(&p).expect("function path");
                let name = f.child(0).payload(0).as_str().unwrap_or_default().to_string();
                (name, join(&p, &[2]))
            })
            .collect()
    }

    fn cov_lhs(&self, lang: &LanguageDef, i: usize) -> Result<Term, IpsError> {
        let g = generic();
        let tc = lang.mkl("Var", vec![], vec![g.mk_ident("TC")])?;
        let arr = lang.mkl("Field", vec![], vec![tc, g.mk_ident("cov")])?;
        let idx = lang.mkl("IntLit", vec![Payload::Int(i as i64)], vec![])?;
        let e = lang.mkl("Index", vec![], vec![arr, idx])?;
        Ok(lang.mkl("ExprsIsLhs", vec![], vec![exprs(vec![e])?])?)
    }

    fn true_rhs(&self, lang: &LanguageDef) -> Result<Term, IpsError> {
        let t = lang.mkl("BoolLit", vec![Payload::Bool(true)], vec![])?;
        Ok(lang.mkl("ExprsIsRhs", vec![], vec![exprs(vec![t])?])?)
    }

    fn clear_for_header(&self, lang: &LanguageDef, _item: &Term) -> Result<Term, IpsError> {
        Err(lang.unrepresentable("numeric for loops have no init or step statement"))
    }

    fn expr_item(&self, lang: &LanguageDef, e: Term) -> Result<Term, IpsError> {
        if !lang.is(&e, "Call") {
            return Err(lang.unrepresentable(format!("only calls are statements: {}", e.to_sexpr())));
        }
        Ok(lang.mkl("CallStat", vec![], vec![e])?)
    }

    fn tac(&self) -> Option<&dyn TacHooks> {
        Some(self)
    }
}

impl TacHooks for MiniLua {
    fn classify(&self, lang: &LanguageDef, e: &Term) -> ExprClass {
        classify_c_like(lang, e)
    }

    fn item_slots(&self, lang: &LanguageDef, item: &Term) -> Vec<(Path, SlotRole)> {
        let elems = |list: &[usize], role: SlotRole| -> Vec<(Path, SlotRole)> {
            let n = item.at(list).and_then(|l| extract_list(l).ok()).map(|l| l.len()).unwrap_or(0);
            (0..n).map(|k| (list_elem_path(list, k), role)).collect()
        };
        match item.name().strip_prefix("MiniLua.").unwrap_or("") {
            "AssignIsStat" => {
                let mut out = elems(&[0, 0, 0], SlotRole::Target);
                out.extend(elems(&[0, 2, 0], SlotRole::Top));
                out
            }
            "LocalStat" => {
                let init = [0, 1, 0, 2];
                match item.at(&init) {
                    Some(i) if i.is("JustLocalVarInit") => elems(&[0, 1, 0, 2, 0, 0], SlotRole::Top),
                    _ => vec![],
                }
            }
            "CallStat" => vec![(vec![0], SlotRole::Top)],
            "Return" if lang.is(item.child(0), "JustExpr") => vec![(vec![0, 0], SlotRole::Top)],
            "ForNum" => {
                let mut out = vec![(vec![1], SlotRole::Top), (vec![2], SlotRole::Top)];
                if lang.is(item.child(3), "JustExpr") {
                    out.push((vec![3, 0], SlotRole::Top));
                }
                out
            }
            _ => vec![],
        }
    }

    fn var_expr(&self, lang: &LanguageDef, name: &str) -> Result<Term, IpsError> {
        Ok(lang.mkl("Var", vec![], vec![generic().mk_ident(name)])?)
    }

    fn not_expr(&self, lang: &LanguageDef, e: Term) -> Result<Term, IpsError> {
        Ok(lang.mkl("Unary", vec![Payload::str("!")], vec![e])?)
    }

    fn assign_item(&self, lang: &LanguageDef, name: &str, value: Term) -> Result<Term, IpsError> {
        assign_stat(lang, exprs(vec![self.var_expr(lang, name)?])?, exprs(vec![value])?)
    }

    fn if_item(&self, lang: &LanguageDef, cond: Term, then: Vec<Term>) -> Result<Term, IpsError> {
        let elifs = Term::nil(Sort::atomic("MiniLua.ElseIfL"));
        Ok(lang.mkl(
            "LuaIf",
            vec![],
            vec![cond, generic().mk_block(then)?, elifs, lang.mkl("NoElse", vec![], vec![])?],
        )?)
    }

    fn temp_decl(&self, lang: &LanguageDef, names: &[String]) -> Result<Term, IpsError> {
        let g = generic();
        let ids = build_list(&fragments::sort(IDENT_L), names.iter().map(|n| g.mk_ident(n)))?;
        let d = local_decl(lang, ids, gleaf("NoLocalVarInit"))?;
        Ok(lang.mkl("LocalStat", vec![], vec![d])?)
    }

    fn split_if_chain(&self, lang: &LanguageDef, item: &Term, k: usize) -> Result<Term, IpsError> {
        let elifs = extract_list(item.child(2))?;
        if !lang.is(item, "LuaIf") || k == 0 || k > elifs.len() {
            return Err(lang.unrepresentable(format!("no arm {k} to split off")));
        }
        let elif_sort = Sort::atomic("MiniLua.ElseIfL");
        let moved = &elifs[k - 1];
        let inner = lang.mkl(
            "LuaIf",
            vec![],
            vec![
                moved.child(0).clone(),
                moved.child(1).clone(),
                build_list(&elif_sort, elifs[k..].iter().cloned())?,
                item.child(3).clone(),
            ],
        )?;
        let els = lang.mkl("Else", vec![], vec![generic().mk_block(vec![inner])?])?;
        Ok(lang.mkl(
            "LuaIf",
            vec![],
            vec![
                item.child(0).clone(),
                item.child(1).clone(),
                build_list(&elif_sort, elifs[..k - 1].iter().cloned())?,
                els,
            ],
        )?)
    }
}
