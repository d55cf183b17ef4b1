//! MiniC: typed declarations that are block items but not statements,
//! braced array initializers, and assignment as an expression.

use crate::fragments::{generic, OpsError};
use crate::lang::syntax::{ident_str, print_expr, print_list, Dialect, ParseError, Parser, Printer};
use crate::lang::{gleaf, list_elem_path, ExprClass, Frontend, IpsError, LanguageDef, LanguageSpec, Path, StmtShape};
use crate::modularizer::GenericValue as V;
use crate::term::{extract_list, Payload, Term};

pub struct MiniC;

pub const SCHEMA: &str = "\
type Program = Program [FunDef]
type FunDef = FunDef CType Ident [Param] Block
type Param = Param CType Ident
type CType = TInt | TBool | TIntArray | TVoid
type Block = Block [BlockItem]
type BlockItem = BlockStmt Stmt | BlockDecl Decl
type Decl = Decl CType [Declarator]
type Declarator = Declarator Ident OptInit
type OptInit = NoInit | JustInit Init
type Init = InitExpr Expr | InitList [Expr]
type Stmt = ExprStmt Expr | If Expr Block OptElse | While Expr Block | For OptExpr OptExpr OptExpr Block | Return OptExpr | Break | Continue | Compound Block
type OptElse = NoElse | Else Block
type OptExpr = NoExpr | JustExpr Expr
type Expr = IntLit Int | BoolLit Bool | Var Ident | Index Expr Expr | Call Ident [Expr] | Unary String Expr | Binary String Expr Expr | Assign Expr Expr
type Ident = Ident String
";

pub const SPEC: LanguageSpec = LanguageSpec {
    name: "MiniC",
    key: "minic",
    ext: "mc",
    dialect: Dialect::C,
    schema: SCHEMA,
    identify: &[
        ("Ident", "IdentL"),
        ("Block", "BlockL"),
        ("BlockItem", "BlockItemL"),
        ("Decl", "MultiLocalVarDeclL"),
        ("Declarator", "SingleLocalVarDeclL"),
        ("OptInit", "OptLocalVarInitL"),
        ("Init", "LocalVarInitL"),
    ],
    remove: &["Ident", "Block", "Decl", "Declarator", "NoInit", "JustInit", "Assign"],
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
        "EmptyDeclAttrs",
        "IdentIsVarDeclBinder",
    ],
    extra: &[
        ("AssignIsExpr", &[], &["AssignL"], "MiniC.ExprL"),
        ("ExprIsLhs", &[], &["MiniC.ExprL"], "LhsL"),
        ("ExprIsRhs", &[], &["MiniC.ExprL"], "RhsL"),
        ("TypeIsCommonAttrs", &[], &["MiniC.CTypeL"], "MultiLocalVarDeclCommonAttrsL"),
    ],
    injections: &[
        ("AssignL", "MiniC.ExprL", &["MiniC.AssignIsExpr"]),
        ("MiniC.ExprL", "MiniC.StmtL", &["MiniC.ExprStmt"]),
        ("MiniC.StmtL", "BlockItemL", &["MiniC.BlockStmt"]),
        ("MultiLocalVarDeclL", "BlockItemL", &["MiniC.BlockDecl"]),
        ("MiniC.ExprL", "LhsL", &["MiniC.ExprIsLhs"]),
        ("MiniC.ExprL", "RhsL", &["MiniC.ExprIsRhs"]),
        ("IdentL", "VarDeclBinderL", &["IdentIsVarDeclBinder"]),
        ("MiniC.CTypeL", "MultiLocalVarDeclCommonAttrsL", &["MiniC.TypeIsCommonAttrs"]),
    ],
    compose: &[
        ("MiniC.ExprL", "MiniC.StmtL", "BlockItemL"),
        ("AssignL", "MiniC.ExprL", "MiniC.StmtL"),
        ("AssignL", "MiniC.ExprL", "BlockItemL"),
    ],
};

fn is_type_kw(p: &Parser) -> bool {
    p.is_kw("int") || p.is_kw("bool") || p.is_kw("void")
}

fn parse_type(p: &mut Parser) -> Result<V, ParseError> {
    if p.eat_kw("int") {
        if p.eat_sym("[") {
            p.expect_sym("]")?;
            return Ok(V::leaf("TIntArray"));
        }
        Ok(V::leaf("TInt"))
    } else if p.eat_kw("bool") {
        Ok(V::leaf("TBool"))
    } else if p.eat_kw("void") {
        Ok(V::leaf("TVoid"))
    } else {
        Err(p.error("a type"))
    }
}

fn parse_block(p: &mut Parser) -> Result<V, ParseError> {
    p.expect_sym("{")?;
    let mut items = Vec::new();
    while !p.is_sym("}") {
        items.push(parse_item(p)?);
    }
    p.expect_sym("}")?;
    Ok(V::ctor("Block", vec![V::List(items)]))
}

fn parse_item(p: &mut Parser) -> Result<V, ParseError> {
    if is_type_kw(p) {
        let ty = parse_type(p)?;
        let ds = p.comma_list(";", |p| {
            let id = p.ident()?;
            let init = if p.eat_sym("=") {
                let i = if p.eat_sym("{") {
                    let es = p.comma_list("}", |p| p.expr())?;
                    p.expect_sym("}")?;
                    V::ctor("InitList", vec![V::List(es)])
                } else {
                    V::ctor("InitExpr", vec![p.expr()?])
                };
                V::ctor("JustInit", vec![i])
            } else {
                V::leaf("NoInit")
            };
            Ok(V::ctor("Declarator", vec![id, init]))
        })?;
        if ds.is_empty() {
            return Err(p.error("declarator"));
        }
        p.expect_sym(";")?;
        return Ok(V::ctor("BlockDecl", vec![V::ctor("Decl", vec![ty, V::List(ds)])]));
    }
    Ok(V::ctor("BlockStmt", vec![parse_stmt(p)?]))
}

fn opt_expr(p: &mut Parser, close: &str) -> Result<V, ParseError> {
    if p.is_sym(close) {
        Ok(V::leaf("NoExpr"))
    } else {
        Ok(V::ctor("JustExpr", vec![p.expr()?]))
    }
}

fn parse_stmt(p: &mut Parser) -> Result<V, ParseError> {
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
    if p.is_sym("{") {
        return Ok(V::ctor("Compound", vec![parse_block(p)?]));
    }
    let e = p.expr()?;
    p.expect_sym(";")?;
    Ok(V::ctor("ExprStmt", vec![e]))
}

pub fn parse(src: &str) -> Result<V, ParseError> {
    let mut p = Parser::new(src, Dialect::C)?;
    let mut funs = Vec::new();
    while !p.at_eof() {
        let ty = parse_type(&mut p)?;
        let name = p.ident()?;
        p.expect_sym("(")?;
        let params = p.comma_list(")", |p| {
            let t = parse_type(p)?;
            Ok(V::ctor("Param", vec![t, p.ident()?]))
        })?;
        p.expect_sym(")")?;
        let body = parse_block(&mut p)?;
        funs.push(V::ctor("FunDef", vec![ty, name, V::List(params), body]));
    }
    Ok(V::ctor("Program", vec![V::List(funs)]))
}

fn type_text(t: &V) -> &'static str {
    match t.ctor_name() {
        "TInt" => "int",
        "TBool" => "bool",
        "TIntArray" => "int[]",
        _ => "void",
    }
}

fn opt_text(o: &V) -> String {
    match o.ctor_name() {
        "JustExpr" => print_expr(o.arg(0), Dialect::C),
        _ => String::new(),
    }
}

fn print_block(pr: &mut Printer, head: &str, b: &V, tail: &str) {
    pr.line(&format!("{head}{{"));
    pr.depth += 1;
    for it in b.arg(0).as_list() {
        print_item(pr, it);
    }
    pr.depth -= 1;
    pr.line(&format!("}}{tail}"));
}

/// Prints `head {`, the block's items, and `}`; an else branch continues
/// on the closing line.
fn print_block_with_else(pr: &mut Printer, head: &str, b: &V, els: &V) {
    if els.ctor_name() == "Else" {
        pr.line(&format!("{head}{{"));
        pr.depth += 1;
        for it in b.arg(0).as_list() {
            print_item(pr, it);
        }
        pr.depth -= 1;
        print_block(pr, "} else ", els.arg(0), "");
    } else {
        print_block(pr, head, b, "");
    }
}

fn print_item(pr: &mut Printer, it: &V) {
    if it.ctor_name() == "BlockDecl" {
        let d = it.arg(0);
        let ds: Vec<String> = d
            .arg(1)
            .as_list()
            .iter()
            .map(|dc| {
                let name = ident_str(dc.arg(0));
                let oi = dc.arg(1);
                if oi.ctor_name() != "JustInit" {
                    return name.to_string();
                }
                let i = oi.arg(0);
                if i.ctor_name() == "InitList" {
                    format!("{name} = {{{}}}", print_list(i.arg(0).as_list(), Dialect::C))
                } else {
                    format!("{name} = {}", print_expr(i.arg(0), Dialect::C))
                }
            })
            .collect();
        pr.line(&format!("{} {};", type_text(d.arg(0)), ds.join(", ")));
        return;
    }
    let s = it.arg(0);
    match s.ctor_name() {
        "ExprStmt" => pr.line(&format!("{};", print_expr(s.arg(0), Dialect::C))),
        "If" => print_block_with_else(pr, &format!("if ({}) ", print_expr(s.arg(0), Dialect::C)), s.arg(1), s.arg(2)),
        "While" => print_block(pr, &format!("while ({}) ", print_expr(s.arg(0), Dialect::C)), s.arg(1), ""),
        "For" => print_block(
            pr,
            &format!("for ({}; {}; {}) ", opt_text(s.arg(0)), opt_text(s.arg(1)), opt_text(s.arg(2))),
            s.arg(3),
            "",
        ),
        "Return" => match s.arg(0).ctor_name() {
            "JustExpr" => pr.line(&format!("return {};", opt_text(s.arg(0)))),
            _ => pr.line("return;"),
        },
        "Break" => pr.line("break;"),
        "Continue" => pr.line("continue;"),
        "Compound" => print_block(pr, "", s.arg(0), ""),
        other => pr.line(&format!("<{other}>;")),
    }
}

pub fn pretty(ast: &V) -> String {
    let mut pr = Printer::new();
    for (i, f) in ast.arg(0).as_list().iter().enumerate() {
        if i > 0 {
            pr.out.push('\n');
        }
        let params: Vec<String> =
            f.arg(2).as_list().iter().map(|p| format!("{} {}", type_text(p.arg(0)), ident_str(p.arg(1)))).collect();
        let head = format!("{} {}({}) ", type_text(f.arg(0)), ident_str(f.arg(1)), params.join(", "));
        print_block(&mut pr, &head, f.arg(3), "");
    }
    pr.out
}

/// The statement inside a `BlockStmt` item.
fn stmt_of(lang: &LanguageDef, item: &Term) -> Option<Term> {
    lang.is(item, "BlockStmt").then(|| item.child(0).clone())
}

impl Frontend for MiniC {
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
        let k = kind.strip_prefix("MiniC.").unwrap_or(kind);
        Ok(Some(match k {
            "Ident" => Term::new(&g.ident, payloads.to_vec(), vec![])?,
            "Block" => g.mk_block(extract_list(&kids[0])?)?,
            "Decl" => lang.mk(
                "MultiLocalVarDecl",
                vec![],
                vec![lang.mkl("TypeIsCommonAttrs", vec![], vec![kids[0].clone()])?, kids[1].clone()],
            )?,
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
            "JustInit" => lang.mk("JustLocalVarInit", vec![], vec![kids[0].clone()])?,
            "Assign" => {
                let a = g.mk_assign(
                    lang.mkl("ExprIsLhs", vec![], vec![kids[0].clone()])?,
                    lang.mkl("ExprIsRhs", vec![], vec![kids[1].clone()])?,
                )?;
                lang.mkl("AssignIsExpr", vec![], vec![a])?
            }
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
            "MultiLocalVarDecl" => {
                let attrs = t.child(0);
                if !lang.is(attrs, "TypeIsCommonAttrs") {
                    return Err(bad());
                }
                lang.mk_mod("Decl", vec![], vec![u(attrs.child(0))?, u(t.child(1))?])?
            }
            "SingleLocalVarDecl" => {
                let b = t.child(1);
                if !t.child(0).is("EmptyDeclAttrs") || !b.is("IdentIsVarDeclBinder") {
                    return Err(bad());
                }
                lang.mk_mod("Declarator", vec![], vec![u(b.child(0))?, u(t.child(2))?])?
            }
            "NoLocalVarInit" => lang.mk_mod("NoInit", vec![], vec![])?,
            "JustLocalVarInit" => lang.mk_mod("JustInit", vec![], vec![u(t.child(0))?])?,
            "MiniC.AssignIsExpr" => {
                let a = t.child(0);
                let (l, op, r) = (a.child(0), a.child(1), a.child(2));
                if !op.is("AssignOpEquals") || !lang.is(l, "ExprIsLhs") || !lang.is(r, "ExprIsRhs") {
                    return Err(bad());
                }
                lang.mk_mod("Assign", vec![], vec![u(l.child(0))?, u(r.child(0))?])?
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
        let e = if lang.is(init, "InitExpr") {
            init.child(0).clone()
        } else if lang.is(init, "InitList") {
            let f = generic().mk_ident("array");
            lang.mkl("Call", vec![], vec![f, init.child(0).clone()])?
        } else {
            return Err(OpsError::UnconvertibleInit(init.to_sexpr()));
        };
        Ok(lang.mkl("ExprIsRhs", vec![], vec![e])?)
    }

    fn var_decl_binder_to_lhs(&self, lang: &LanguageDef, binder: &Term) -> Result<Term, OpsError> {
        if !binder.is("IdentIsVarDeclBinder") {
            return Err(OpsError::UnexpectedBinder(binder.to_sexpr()));
        }
        let v = lang.mkl("Var", vec![], vec![binder.child(0).clone()])?;
        Ok(lang.mkl("ExprIsLhs", vec![], vec![v])?)
    }

    fn stmt_shape(&self, lang: &LanguageDef, item: &Term) -> StmtShape {
        let Some(s) = stmt_of(lang, item) else {
            return StmtShape::Plain;
        };
        let opt = |i: usize| lang.is(s.child(i), "JustExpr").then(|| vec![0, i, 0]);
        match s.name().strip_prefix("MiniC.").unwrap_or("") {
            "If" => StmtShape::IfChain {
                arms: vec![(vec![0, 0], vec![0, 1])],
                els: lang.is(s.child(2), "Else").then(|| vec![0, 2, 0]),
            },
            "While" => StmtShape::While { cond: vec![0, 0], body: vec![0, 1] },
            "For" => StmtShape::For { init: opt(0), cond: opt(1), step: opt(2), body: vec![0, 3] },
            "Return" => StmtShape::Return,
            "Break" => StmtShape::Break,
            "Continue" => StmtShape::Continue,
            "Compound" => StmtShape::Nested { block: vec![0, 0] },
            _ => StmtShape::Plain,
        }
    }

    fn functions(&self, _lang: &LanguageDef, program: &Term) -> Vec<(String, Path)> {
        let n = extract_list(program.child(0)).map(|l| l.len()).unwrap_or(0);
        (0..n)
            .map(|k| {
                let p = list_elem_path(&[0], k);
                let f = program.at(&p).expect("function path");
                let name = f.child(1).payload(0).as_str().unwrap_or_default().to_string();
                let mut body = p;
                body.push(3);
                (name, body)
            })
            .collect()
    }

    fn cov_lhs(&self, lang: &LanguageDef, i: usize) -> Result<Term, IpsError> {
        let arr = lang.mkl("Var", vec![], vec![generic().mk_ident("cov")])?;
        let idx = lang.mkl("IntLit", vec![Payload::Int(i as i64)], vec![])?;
        let e = lang.mkl("Index", vec![], vec![arr, idx])?;
        Ok(lang.mkl("ExprIsLhs", vec![], vec![e])?)
    }

    fn true_rhs(&self, lang: &LanguageDef) -> Result<Term, IpsError> {
        let t = lang.mkl("BoolLit", vec![Payload::Bool(true)], vec![])?;
        Ok(lang.mkl("ExprIsRhs", vec![], vec![t])?)
    }

    fn clear_for_header(&self, lang: &LanguageDef, item: &Term) -> Result<Term, IpsError> {
        let s = stmt_of(lang, item).ok_or_else(|| lang.unrepresentable("not a for statement"))?;
        let none = lang.mkl("NoExpr", vec![], vec![])?;
        let s2 = s.with_child(0, none.clone())?.with_child(2, none)?;
        Ok(item.with_child(0, s2)?)
    }
}

/// Expression classes shared by the C-like languages.
pub(crate) fn classify_c_like(lang: &LanguageDef, e: &Term) -> ExprClass {
    let Some(k) = e.name().strip_prefix(lang.name).and_then(|r| r.strip_prefix('.')) else {
        return ExprClass::Other;
    };
    match k {
        "IntLit" | "BoolLit" | "Var" | "Nil" => ExprClass::Atom,
        "Unary" => ExprClass::Op(vec![vec![0]]),
        "Binary" => match e.payload(0).as_str() {
            Some("&&") => ExprClass::ShortCircuit { and: true },
            Some("||") => ExprClass::ShortCircuit { and: false },
            _ => ExprClass::Op(vec![vec![0], vec![1]]),
        },
        "Index" => ExprClass::Op(vec![vec![0], vec![1]]),
        "Field" => ExprClass::Op(vec![vec![0]]),
        "Call" | "ArrayLit" => {
            let list = if k == "Call" { 1 } else { 0 };
            let n = extract_list(e.child(list)).map(|l| l.len()).unwrap_or(0);
            ExprClass::Op((0..n).map(|i| list_elem_path(&[list], i)).collect())
        }
        "AssignIsExpr" => ExprClass::Assign { target: vec![0, 0, 0], value: vec![0, 2, 0] },
        _ => ExprClass::Other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::language;

    pub const HOIST_SRC: &str = "int f(int a,int b,int s) {\n  int t1 = 0, t2 = 1;\n  if (s) {\n    int r1 = t1*a+t2*b;\n    return r1;\n  }\n  int r2 = t2*a+t1*b;\n  return r2;\n}\n";

    #[test]
    fn parses_multi_declarator() {
        let ast = parse(HOIST_SRC).unwrap();
        let body = ast.arg(0).as_list()[0].arg(3);
        let first = &body.arg(0).as_list()[0];
        assert_eq!(first.ctor_name(), "BlockDecl");
        assert_eq!(first.arg(0).arg(1).as_list().len(), 2);
    }

    #[test]
    fn declaration_is_not_a_statement() {
        let err = parse("int f(int s) { if (s) int r = 1; }").unwrap_err();
        assert!(err.expected.contains('{'), "{err}");
    }

    #[test]
    fn empty_body() {
        let ast = parse("void main() {}").unwrap();
        assert!(ast.arg(0).as_list()[0].arg(3).arg(0).as_list().is_empty());
        assert_eq!(pretty(&ast), "void main() {\n}\n");
    }

    #[test]
    fn pretty_round_trip() {
        let ast = parse(HOIST_SRC).unwrap();
        let text = pretty(&ast);
        assert_eq!(parse(&text).unwrap(), ast);
        assert_eq!(pretty(&parse(&text).unwrap()), text);
        let src = "int main() {\n  int[] a = {1, 2};\n  int i;\n  for (i = 0; i < 2; i = i + 1) {\n    if (a[i] == 1) {\n      continue;\n    } else {\n      print(a[i]);\n    }\n  }\n  for (; ; ) {\n    break;\n  }\n  {\n  }\n  return 0;\n}\n";
        assert_eq!(pretty(&parse(src).unwrap()), src);
    }

    #[test]
    fn assignment_decomposes_to_generic() {
        let c = language("minic").unwrap();
        let ast = parse("void main() { x = 1; 7; }").unwrap();
        let t = c.decompose(&ast).unwrap();
        let body = t.at(&[0, 0, 3]).unwrap();
        let items = extract_list(body.child(0)).unwrap();
        assert_eq!(
            items[0].to_sexpr(),
            "(MiniC.BlockStmt (MiniC.ExprStmt (MiniC.AssignIsExpr (Assign (MiniC.ExprIsLhs (MiniC.Var (Ident \"x\"))) (AssignOpEquals) (MiniC.ExprIsRhs (MiniC.IntLit 1))))))"
        );
        assert_eq!(items[1].to_sexpr(), "(MiniC.BlockStmt (MiniC.ExprStmt (MiniC.IntLit 7)))");
        assert_eq!(c.recompose(&t).unwrap(), ast);
        assert!(c.ips.check_term(&t).is_ok());
    }
}
