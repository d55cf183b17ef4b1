//! MiniJS: untyped `var` declarations that are statements, directives kept
//! apart from block items, and assignment as an expression.

use crate::fragments::{generic, OpsError, BLOCK_ITEM_L};
use crate::lang::syntax::{ident_str, print_expr, quote, Dialect, ParseError, Parser, Printer, Tok};
use crate::lang::{
    gleaf, join, list_elem_path, minic::classify_c_like, ExprClass, Frontend, IpsError, LanguageDef, LanguageSpec,
    Path, SlotRole, StmtShape, TacHooks,
};
use crate::modularizer::GenericValue as V;
use crate::term::{build_list, extract_list, Payload, PayloadType, Sort, Term};

pub struct MiniJs;

pub const SCHEMA: &str = "\
type Program = Program [FunDef]
type FunDef = FunDef Ident [Ident] Block
type Block = Block [String] [Stmt]
type Stmt = ExprStmt Expr | VarStmt VarDecl | If Expr Block OptElse | While Expr Block | For OptExpr OptExpr OptExpr Block | Return OptExpr | Break | Continue
type VarDecl = VarDecl [Declarator]
type Declarator = Declarator Ident OptInit
type OptInit = NoInit | JustInit Expr
type OptElse = NoElse | Else Block
type OptExpr = NoExpr | JustExpr Expr
type Expr = IntLit Int | BoolLit Bool | Var Ident | Index Expr Expr | Field Expr Ident | Call Ident [Expr] | ArrayLit [Expr] | Unary String Expr | Binary String Expr Expr | Assign Expr Expr
type Ident = Ident String
";

pub const SPEC: LanguageSpec = LanguageSpec {
    name: "MiniJS",
    key: "minijs",
    ext: "mjs",
    dialect: Dialect::Js,
    schema: SCHEMA,
    identify: &[
        ("Ident", "IdentL"),
        ("Stmt", "BlockItemL"),
        ("VarDecl", "MultiLocalVarDeclL"),
        ("Declarator", "SingleLocalVarDeclL"),
        ("OptInit", "OptLocalVarInitL"),
    ],
    remove: &["Ident", "Block", "VarDecl", "Declarator", "NoInit", "JustInit", "Assign"],
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
        "IdentIsVarDeclBinder",
    ],
    extra: &[
        ("AssignIsExpr", &[], &["AssignL"], "MiniJS.ExprL"),
        ("ExprIsLhs", &[], &["MiniJS.ExprL"], "LhsL"),
        ("ExprIsRhs", &[], &["MiniJS.ExprL"], "RhsL"),
        ("ExprIsLocalVarInit", &[], &["MiniJS.ExprL"], "LocalVarInitL"),
        ("DirBlock", &[], &["[String]", "BlockL"], "MiniJS.BlockL"),
    ],
    injections: &[
        ("AssignL", "MiniJS.ExprL", &["MiniJS.AssignIsExpr"]),
        ("MiniJS.ExprL", "BlockItemL", &["MiniJS.ExprStmt"]),
        ("MultiLocalVarDeclL", "BlockItemL", &["MiniJS.VarStmt"]),
        ("MiniJS.ExprL", "LhsL", &["MiniJS.ExprIsLhs"]),
        ("MiniJS.ExprL", "RhsL", &["MiniJS.ExprIsRhs"]),
        ("MiniJS.ExprL", "LocalVarInitL", &["MiniJS.ExprIsLocalVarInit"]),
        ("IdentL", "VarDeclBinderL", &["IdentIsVarDeclBinder"]),
        ("BlockL", "MiniJS.BlockL", &["MiniJS.DirBlock"]),
    ],
    compose: &[("AssignL", "MiniJS.ExprL", "BlockItemL")],
};

fn parse_block(p: &mut Parser) -> Result<V, ParseError> {
    p.expect_sym("{")?;
    let mut dirs = Vec::new();
    while let Tok::Str(s) = p.peek().clone() {
        p.bump();
        p.expect_sym(";")?;
        dirs.push(V::Str(s));
    }
    let mut items = Vec::new();
    while !p.is_sym("}") {
        items.push(parse_stmt(p)?);
    }
    p.expect_sym("}")?;
    Ok(V::ctor("Block", vec![V::List(dirs), V::List(items)]))
}

fn opt_expr(p: &mut Parser, close: &str) -> Result<V, ParseError> {
    if p.is_sym(close) {
        Ok(V::leaf("NoExpr"))
    } else {
        Ok(V::ctor("JustExpr", vec![p.expr()?]))
    }
}

fn parse_stmt(p: &mut Parser) -> Result<V, ParseError> {
    if p.eat_kw("var") {
        let ds = p.comma_list(";", |p| {
            let id = p.ident()?;
            let init = if p.eat_sym("=") { V::ctor("JustInit", vec![p.expr()?]) } else { V::leaf("NoInit") };
            Ok(V::ctor("Declarator", vec![id, init]))
        })?;
        if ds.is_empty() {
            return Err(p.error("declarator"));
        }
        p.expect_sym(";")?;
        return Ok(V::ctor("VarStmt", vec![V::ctor("VarDecl", vec![V::List(ds)])]));
    }
    if p.eat_kw("if") {
        p.expect_sym("(")?;
        let c = p.expr()?;
        p.expect_sym(")")?;
        let then = parse_block(p)?;
        let els = if p.eat_kw("else") { V::ctor("Else", vec![parse_block(p)?]) } else { V::leaf("NoElse") };
        return Ok(V::ctor("If", vec![c, then, els]));
    }
    if p.eat_kw("while") {
        p.expect_sym("(")?;
        let c = p.expr()?;
        p.expect_sym(")")?;
        return Ok(V::ctor("While", vec![c, parse_block(p)?]));
    }
    if p.eat_kw("for") {
        p.expect_sym("(")?;
        let init = opt_expr(p, ";")?;
        p.expect_sym(";")?;
        let cond = opt_expr(p, ";")?;
        p.expect_sym(";")?;
        let step = opt_expr(p, ")")?;
        p.expect_sym(")")?;
        return Ok(V::ctor("For", vec![init, cond, step, parse_block(p)?]));
    }
    if p.eat_kw("return") {
        let e = opt_expr(p, ";")?;
        p.expect_sym(";")?;
        return Ok(V::ctor("Return", vec![e]));
    }
    if p.eat_kw("break") {
        p.expect_sym(";")?;
        return Ok(V::leaf("Break"));
    }
    if p.eat_kw("continue") {
        p.expect_sym(";")?;
        return Ok(V::leaf("Continue"));
    }
    let e = p.expr()?;
    p.expect_sym(";")?;
    Ok(V::ctor("ExprStmt", vec![e]))
}

pub fn parse(src: &str) -> Result<V, ParseError> {
    let mut p = Parser::new(src, Dialect::Js)?;
    let mut funs = Vec::new();
    while !p.at_eof() {
        p.expect_kw("function")?;
        let name = p.ident()?;
        p.expect_sym("(")?;
        let params = p.comma_list(")", |p| p.ident())?;
        p.expect_sym(")")?;
        let body = parse_block(&mut p)?;
        funs.push(V::ctor("FunDef", vec![name, V::List(params), body]));
    }
    Ok(V::ctor("Program", vec![V::List(funs)]))
}

fn opt_text(o: &V) -> String {
    match o.ctor_name() {
        "JustExpr" => print_expr(o.arg(0), Dialect::Js),
        _ => String::new(),
    }
}

fn block_body(pr: &mut Printer, b: &V) {
    pr.depth += 1;
    for d in b.arg(0).as_list() {
        pr.line(&format!("{};", quote(d.as_str())));
    }
    for s in b.arg(1).as_list() {
        print_stmt(pr, s);
    }
    pr.depth -= 1;
}

fn print_block(pr: &mut Printer, head: &str, b: &V) {
    pr.line(&format!("{head}{{"));
    block_body(pr, b);
    pr.line("}");
}

fn print_stmt(pr: &mut Printer, s: &V) {
    let e = |v: &V| print_expr(v, Dialect::Js);
    match s.ctor_name() {
        "ExprStmt" => pr.line(&format!("{};", e(s.arg(0)))),
        "VarStmt" => {
            let ds: Vec<String> = s
                .arg(0)
                .arg(0)
                .as_list()
                .iter()
                .map(|d| match d.arg(1).ctor_name() {
                    "JustInit" => format!("{} = {}", ident_str(d.arg(0)), e(d.arg(1).arg(0))),
                    _ => ident_str(d.arg(0)).to_string(),
                })
                .collect();
            pr.line(&format!("var {};", ds.join(", ")));
        }
        "If" => {
            let head = format!("if ({}) ", e(s.arg(0)));
            if s.arg(2).ctor_name() == "Else" {
                pr.line(&format!("{head}{{"));
                block_body(pr, s.arg(1));
                print_block(pr, "} else ", s.arg(2).arg(0));
            } else {
                print_block(pr, &head, s.arg(1));
            }
        }
        "While" => print_block(pr, &format!("while ({}) ", e(s.arg(0))), s.arg(1)),
        "For" => print_block(
            pr,
            &format!("for ({}; {}; {}) ", opt_text(s.arg(0)), opt_text(s.arg(1)), opt_text(s.arg(2))),
            s.arg(3),
        ),
        "Return" => match s.arg(0).ctor_name() {
            "JustExpr" => pr.line(&format!("return {};", opt_text(s.arg(0)))),
            _ => pr.line("return;"),
        },
        "Break" => pr.line("break;"),
        "Continue" => pr.line("continue;"),
        other => pr.line(&format!("<{other}>;")),
    }
}

pub fn pretty(ast: &V) -> String {
    let mut pr = Printer::new();
    for (i, f) in ast.arg(0).as_list().iter().enumerate() {
        if i > 0 {
            pr.out.push('\n');
        }
        let params: Vec<&str> = f.arg(1).as_list().iter().map(ident_str).collect();
        print_block(&mut pr, &format!("function {}({}) ", ident_str(f.arg(0)), params.join(", ")), f.arg(2));
    }
    pr.out
}

/// Shared by the C-like languages: `AssignIsExpr(Assign(ExprIsLhs l, =, ExprIsRhs r))`.
pub(crate) fn trans_assign_expr(lang: &LanguageDef, l: Term, r: Term) -> Result<Term, IpsError> {
    let a = generic().mk_assign(lang.mkl("ExprIsLhs", vec![], vec![l])?, lang.mkl("ExprIsRhs", vec![], vec![r])?)?;
    Ok(lang.mkl("AssignIsExpr", vec![], vec![a])?)
}

pub(crate) fn untrans_assign_expr(lang: &LanguageDef, t: &Term) -> Result<Term, IpsError> {
    let a = t.child(0);
    let (l, op, r) = (a.child(0), a.child(1), a.child(2));
    if !op.is("AssignOpEquals") || !lang.is(l, "ExprIsLhs") || !lang.is(r, "ExprIsRhs") {
        return Err(lang.unrepresentable(t.to_sexpr()));
    }
    Ok(lang.mk_mod("Assign", vec![], vec![lang.untrans_ips(l.child(0))?, lang.untrans_ips(r.child(0))?])?)
}

fn str_list(items: Vec<Term>) -> Result<Term, IpsError> {
    Ok(build_list(&Sort::primitive(PayloadType::String), items)?)
}

impl Frontend for MiniJs {
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
        let k = kind.strip_prefix("MiniJS.").unwrap_or(kind);
        Ok(Some(match k {
            "Ident" => Term::new(&g.ident, payloads.to_vec(), vec![])?,
            "Block" => lang.mkl("DirBlock", vec![], vec![kids[0].clone(), g.mk_block(extract_list(&kids[1])?)?])?,
            "VarDecl" => lang.mk("MultiLocalVarDecl", vec![], vec![gleaf("EmptyCommonAttrs"), kids[0].clone()])?,
            "Declarator" => lang.mk(
                "SingleLocalVarDecl",
                vec![],
                vec![
                    gleaf("EmptyDeclAttrs"),
                    lang.mk("IdentIsVarDeclBinder", vec![], vec![kids[0].clone()])?,
                    kids[1].clone(),
                ],
            )?,
            "NoInit" => gleaf("NoLocalVarInit"),
            "JustInit" => lang.mk(
                "JustLocalVarInit",
                vec![],
                vec![lang.mkl("ExprIsLocalVarInit", vec![], vec![kids[0].clone()])?],
            )?,
            "Assign" => trans_assign_expr(lang, kids[0].clone(), kids[1].clone())?,
            _ => return Ok(None),
        }))
    }

    fn untrans_node(&self, lang: &LanguageDef, t: &Term) -> Result<Option<Term>, IpsError> {
        let bad = || lang.unrepresentable(t.to_sexpr());
        let u = |x: &Term| lang.untrans_ips(x);
        Ok(Some(match t.name() {
            "Ident" => lang.mk_mod("Ident", t.payloads().to_vec(), vec![])?,
            "MiniJS.DirBlock" => {
                let b = t.child(1);
                if !b.is("Block") || !b.child(1).is("EmptyBlockEnd") {
                    return Err(bad());
                }
                lang.mk_mod("Block", vec![], vec![u(t.child(0))?, u(b.child(0))?])?
            }
            "MultiLocalVarDecl" => {
                if !t.child(0).is("EmptyCommonAttrs") {
                    return Err(bad());
                }
                lang.mk_mod("VarDecl", vec![], vec![u(t.child(1))?])?
            }
            "SingleLocalVarDecl" => {
                let b = t.child(1);
                if !t.child(0).is("EmptyDeclAttrs") || !b.is("IdentIsVarDeclBinder") {
                    return Err(bad());
                }
                lang.mk_mod("Declarator", vec![], vec![u(b.child(0))?, u(t.child(2))?])?
            }
            "NoLocalVarInit" => lang.mk_mod("NoInit", vec![], vec![])?,
            "JustLocalVarInit" => {
                let i = t.child(0);
                if !lang.is(i, "ExprIsLocalVarInit") {
                    return Err(bad());
                }
                lang.mk_mod("JustInit", vec![], vec![u(i.child(0))?])?
            }
            "MiniJS.AssignIsExpr" => untrans_assign_expr(lang, t)?,
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
        if !lang.is(init, "ExprIsLocalVarInit") {
            return Err(OpsError::UnconvertibleInit(init.to_sexpr()));
        }
        Ok(lang.mkl("ExprIsRhs", vec![], vec![init.child(0).clone()])?)
    }

    fn var_decl_binder_to_lhs(&self, lang: &LanguageDef, binder: &Term) -> Result<Term, OpsError> {
        if !binder.is("IdentIsVarDeclBinder") {
            return Err(OpsError::UnexpectedBinder(binder.to_sexpr()));
        }
        let v = lang.mkl("Var", vec![], vec![binder.child(0).clone()])?;
        Ok(lang.mkl("ExprIsLhs", vec![], vec![v])?)
    }

    fn stmt_shape(&self, lang: &LanguageDef, s: &Term) -> StmtShape {
        let opt = |i: usize| lang.is(s.child(i), "JustExpr").then(|| vec![i, 0]);
        match s.name().strip_prefix("MiniJS.").unwrap_or("") {
            "If" => StmtShape::IfChain {
                arms: vec![(vec![0], vec![1, 1])],
                els: lang.is(s.child(2), "Else").then(|| vec![2, 0, 1]),
            },
            "While" => StmtShape::While { cond: vec![0], body: vec![1, 1] },
            "For" => StmtShape::For { init: opt(0), cond: opt(1), step: opt(2), body: vec![3, 1] },
            "Return" => StmtShape::Return,
            "Break" => StmtShape::Break,
            "Continue" => StmtShape::Continue,
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
                (name, join(&p, &[2, 1]))
            })
            .collect()
    }

    fn cov_lhs(&self, lang: &LanguageDef, i: usize) -> Result<Term, IpsError> {
        let g = generic();
        let tc = lang.mkl("Var", vec![], vec![g.mk_ident("TC")])?;
        let arr = lang.mkl("Field", vec![], vec![tc, g.mk_ident("cov")])?;
        let idx = lang.mkl("IntLit", vec![Payload::Int(i as i64)], vec![])?;
        let e = lang.mkl("Index", vec![], vec![arr, idx])?;
        Ok(lang.mkl("ExprIsLhs", vec![], vec![e])?)
    }

    fn true_rhs(&self, lang: &LanguageDef) -> Result<Term, IpsError> {
        let t = lang.mkl("BoolLit", vec![Payload::Bool(true)], vec![])?;
        Ok(lang.mkl("ExprIsRhs", vec![], vec![t])?)
    }

    fn clear_for_header(&self, lang: &LanguageDef, item: &Term) -> Result<Term, IpsError> {
        let none = lang.mkl("NoExpr", vec![], vec![])?;
        Ok(item.with_child(0, none.clone())?.with_child(2, none)?)
    }

    fn tac(&self) -> Option<&dyn TacHooks> {
        Some(self)
    }
}

impl TacHooks for MiniJs {
    fn classify(&self, lang: &LanguageDef, e: &Term) -> ExprClass {
        classify_c_like(lang, e)
    }

    fn item_slots(&self, lang: &LanguageDef, item: &Term) -> Vec<(Path, SlotRole)> {
        if lang.is(item, "ExprStmt") {
            return vec![(vec![0], SlotRole::Top)];
        }
        if lang.is(item, "Return") && lang.is(item.child(0), "JustExpr") {
            return vec![(vec![0, 0], SlotRole::Top)];
        }
        if lang.is(item, "VarStmt") {
            let ds = extract_list(item.child(0).child(1)).unwrap_or_default();
            return ds
                .iter()
                .enumerate()
                .filter(|(_, d)| d.child(2).is("JustLocalVarInit"))
                .map(|(k, _)| (join(&list_elem_path(&[0, 1], k), &[2, 0, 0]), SlotRole::Top))
                .collect();
        }
        vec![]
    }

    fn var_expr(&self, lang: &LanguageDef, name: &str) -> Result<Term, IpsError> {
        Ok(lang.mkl("Var", vec![], vec![generic().mk_ident(name)])?)
    }

    fn not_expr(&self, lang: &LanguageDef, e: Term) -> Result<Term, IpsError> {
        Ok(lang.mkl("Unary", vec![Payload::str("!")], vec![e])?)
    }

    fn assign_item(&self, lang: &LanguageDef, name: &str, value: Term) -> Result<Term, IpsError> {
        let a = generic().mk_assign(
            lang.mkl("ExprIsLhs", vec![], vec![self.var_expr(lang, name)?])?,
            lang.mkl("ExprIsRhs", vec![], vec![value])?,
        )?;
        Ok(lang.injections.inj_f(a, &crate::fragments::sort(BLOCK_ITEM_L))?)
    }

    fn if_item(&self, lang: &LanguageDef, cond: Term, then: Vec<Term>) -> Result<Term, IpsError> {
        let b = lang.mkl("DirBlock", vec![], vec![str_list(vec![])?, generic().mk_block(then)?])?;
        Ok(lang.mkl("If", vec![], vec![cond, b, lang.mkl("NoElse", vec![], vec![])?])?)
    }

    fn temp_decl(&self, lang: &LanguageDef, names: &[String]) -> Result<Term, IpsError> {
        let g = generic();
        let ds = names
            .iter()
            .map(|n| {
                lang.mk(
                    "SingleLocalVarDecl",
                    vec![],
                    vec![
                        gleaf("EmptyDeclAttrs"),
                        lang.mk("IdentIsVarDeclBinder", vec![], vec![g.mk_ident(n)])?,
                        gleaf("NoLocalVarInit"),
                    ],
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let list = build_list(&crate::fragments::sort(crate::fragments::SINGLE_DECL_L), ds)?;
        let d = lang.mk("MultiLocalVarDecl", vec![], vec![gleaf("EmptyCommonAttrs"), list])?;
        Ok(lang.injections.inj_f(d, &crate::fragments::sort(BLOCK_ITEM_L))?)
    }

    fn split_if_chain(&self, lang: &LanguageDef, _item: &Term, _k: usize) -> Result<Term, IpsError> {
        Err(lang.unrepresentable("MiniJS if statements have a single arm"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::language;

    const SRC: &str = "function main() {\n  \"use strict\";\n  var x = 1, y;\n  y = [1, 2];\n  if (x < 2) {\n    print(y[0]);\n  } else {\n    TC.cov[0] = true;\n  }\n  for (; x < 3; x = x + 1) {\n    continue;\n  }\n  return;\n}\n";

    #[test]
    fn round_trips() {
        let ast = parse(SRC).unwrap();
        assert_eq!(pretty(&ast), SRC);
        let js = language("minijs").unwrap();
        let t = js.decompose(&ast).unwrap();
        assert!(js.ips.check_term(&t).is_ok());
        assert_eq!(js.recompose(&t).unwrap(), ast);
    }

    #[test]
    fn directives_are_not_items() {
        let ast = parse(SRC).unwrap();
        let body = ast.arg(0).as_list()[0].arg(2);
        assert_eq!(body.arg(0).as_list(), &[V::str("use strict")]);
        assert_eq!(body.arg(1).as_list()[0].ctor_name(), "VarStmt");
    }

    #[test]
    fn generic_decl_recomposes_to_var() {
        let js = language("minijs").unwrap();
        let d = js.frontend.tac().unwrap().temp_decl(js, &["a".into(), "b".into()]).unwrap();
        let m = js.untrans_ips(&d).unwrap();
        let v = js.modular.from_modular(&m).unwrap();
        let mut pr = Printer::new();
        print_stmt(&mut pr, &v);
        assert_eq!(pr.out, "var a, b;\n");
    }
}
