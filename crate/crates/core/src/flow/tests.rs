use super::*;
use crate::lang::{language, syntax::token_texts, Dialect};

fn ips(key: &str, src: &str) -> (&'static LanguageDef, Term) {
    let lang = language(key).unwrap();
    let t = lang.decompose(&lang.parse(src).unwrap()).unwrap();
    (lang, t)
}

fn text(lang: &LanguageDef, t: &Term) -> String {
    lang.pretty(&lang.recompose(t).unwrap())
}

/// Leaders computed from syntax alone: the first item of every block, every
/// item following a compound or jumping statement, and every empty block.
fn syntactic_leaders(lang: &LanguageDef, t: &Term, block: &[usize], out: &mut Vec<Path>) {
    let items = block_items(t.at(block).unwrap()).unwrap();
    if items.is_empty() {
        out.push(block.to_vec());
    }
    let mut prev_plain = false;
    for (i, it) in items.iter().enumerate() {
        let p = list_elem_path(&join(block, &[0]), i);
        if !prev_plain {
            out.push(p.clone());
        }
        let shape = lang.stmt_shape(it);
        prev_plain = shape == StmtShape::Plain;
        for b in shape.blocks() {
            syntactic_leaders(lang, t, &join(&p, &b), out);
        }
    }
}

fn leader_paths(cfg: &Cfg) -> Vec<Path> {
    basic_blocks(cfg).into_iter().map(|b| b.start.path().clone()).collect()
}

const COUNT_F: &str = "function countF() { var count = 0; var i; for (i = 0; i < 9; i = i + 1) { if (f(i)) { count = count + 1; break; } else { print(i); } } return count; }";

#[test]
fn straight_line_is_one_block() {
    let (lang, t) = ips("minic", "void main() { int x = 1; x = x + 1; print(x); }");
    let cfg = build_cfg(&t, lang).unwrap();
    assert_eq!(cfg.nodes.len(), 3 + 2);
    let bbs = basic_blocks(&cfg);
    assert_eq!(bbs.len(), 1);
    assert_eq!(bbs[0].nodes.len(), 3);
}

#[test]
fn empty_body_is_one_block() {
    for (key, src) in
        [("minic", "void main() {}"), ("minijs", "function main() {}"), ("minilua", "function main()\nend")]
    {
        let (lang, t) = ips(key, src);
        let bbs = basic_blocks(&build_cfg(&t, lang).unwrap());
        assert_eq!(bbs.len(), 1, "{key}");
        assert!(matches!(bbs[0].start, BlockStart::Empty(_)));
    }
}

#[test]
fn if_else_has_four_blocks() {
    let (lang, t) = ips("minic", "void main() { int x = 1; if (x) { x = 2; } else { x = 3; } print(x); }");
    assert_eq!(basic_blocks(&build_cfg(&t, lang).unwrap()).len(), 4);
}

#[test]
fn while_has_back_edge() {
    let (lang, t) = ips("minijs", "function main() { var i = 0; while (i < 3) { i = i + 1; print(i); } }");
    let cfg = build_cfg(&t, lang).unwrap();
    let body = &lang.frontend.functions(lang, &t)[0].1;
    let lp = list_elem_path(&join(body, &[0]), 1);
    let cond = cfg.find(CfgNodeKind::Cond(0), &lp).unwrap();
    let last = cfg.find(CfgNodeKind::Stmt, &list_elem_path(&join(&lp, &[1, 1, 0]), 1)).unwrap();
    assert!(cfg.edges.contains(&(last, cond)));
    assert_eq!(cfg.preds(cond).len(), 2);
}

#[test]
fn count_f_has_five_blocks() {
    let (lang, t) = ips("minijs", COUNT_F);
    let cfg = build_cfg(&t, lang).unwrap();
    let bbs = basic_blocks(&cfg);
    let firsts: Vec<String> = bbs.iter().map(|b| t.at(b.start.path()).unwrap().name().to_string()).collect();
    assert_eq!(firsts, ["MiniJS.VarStmt", "MiniJS.If", "MiniJS.ExprStmt", "MiniJS.ExprStmt", "MiniJS.Return"]);
    assert_eq!(bbs.iter().map(|b| b.id).collect::<Vec<_>>(), [0, 1, 2, 3, 4]);
    assert!(bbs.iter().all(|b| b.reachable));
}

#[test]
fn leaders_match_syntactic_oracle() {
    let cases = [
        ("minic", "int main() { int i = 0; while (i < 4) { if (i == 2) { i = i + 2; continue; } else { { } } i = i + 1; if (i) { break; } } for (;;) { return i; } print(1); return 0; }"),
        ("minijs", "function main() { var a = 1 && f(2); for (a = 0; a < 2 || g(a); a = a + 1) { if (a) { } } while (a) { a = 0; } return a; }"),
        ("minilua", "function main()\n local x = 1\n for i = 1, 3 do\n  if x then\n   x = 2\n  elseif x == 2 then\n  else\n   break\n  end\n  x = x and g(x)\n end\n do\n  return x\n end\n x = 4\nend"),
    ];
    for (key, src) in cases {
        let (lang, t) = ips(key, src);
        let cfg = build_cfg(&t, lang).unwrap();
        let mut want = Vec::new();
        for (_, body) in lang.frontend.functions(lang, &t) {
            syntactic_leaders(lang, &t, &body, &mut want);
        }
        want.sort();
        assert_eq!(leader_paths(&cfg), want, "{key}");
    }
}

#[test]
fn unreachable_is_marked() {
    let (lang, t) = ips("minic", "int main() { return 1; print(2); }");
    let cfg = build_cfg(&t, lang).unwrap();
    let bbs = basic_blocks(&cfg);
    assert_eq!(bbs.len(), 2);
    assert!(bbs[0].reachable && !bbs[1].reachable);
    for n in &cfg.nodes {
        assert!(n.reachable || cfg.preds(n.id).is_empty() || n.kind == CfgNodeKind::Exit);
    }
}

#[test]
fn dot_is_line_per_node_and_edge() {
    let (lang, t) = ips("minic", "void main() { print(1); }");
    let cfg = build_cfg(&t, lang).unwrap();
    let dot = cfg.to_dot();
    assert!(dot.contains("  n0 [label=\"entry main\"]\n"));
    assert!(dot.contains("  n0 -> n2\n"));
    assert!(dot.contains("  n2 -> n1\n"));
    assert_eq!(dot, build_cfg(&t, lang).unwrap().to_dot());
}

fn marker(lang: &LanguageDef) -> Term {
    let e = lang.frontend.tac().unwrap().var_expr(lang, "c0").unwrap();
    lang.frontend.tac().unwrap().assign_item(lang, "t", e).unwrap()
}

fn first_item_path(lang: &LanguageDef, t: &Term, k: usize) -> Path {
    let body = &lang.frontend.functions(lang, t)[0].1;
    list_elem_path(&join(body, &[0]), k)
}

#[test]
fn site_count_matches_condition_preds() {
    for (src, n) in [
        ("function main() { while (c) { f(); } }", 2),
        ("function main() { while (c) { if (d) { continue; } f(); } }", 3),
        ("function main() { while (c) { while (d) { continue; } if (e) { continue; } f(); } }", 3),
    ] {
        let (lang, t) = ips("minijs", src);
        let lp = first_item_path(lang, &t, 0);
        let cfg = build_cfg(&t, lang).unwrap();
        let cond = cfg.find(CfgNodeKind::Cond(0), &lp).unwrap();
        assert_eq!(cfg.preds(cond).len(), n, "{src}");
        assert_eq!(loop_sites(lang, t.at(&lp).unwrap()).unwrap().len() + 1, n, "{src}");
    }
}

#[test]
fn before_loop_condition_with_continue() {
    let (lang, t) = ips("minijs", "function main() { while (c) { if (d) { continue; } f(); } }");
    let lp = first_item_path(lang, &t, 0);
    let out = insert_at(&t, &InsertionPoint::BeforeLoopCondition(lp), &[marker(lang)], lang).unwrap();
    let want = "function main() { t = c0; while (c) { if (d) { t = c0; continue; } f(); t = c0; } }";
    assert_eq!(token_texts(&text(lang, &out), Dialect::Js).unwrap(), token_texts(want, Dialect::Js).unwrap());
}

#[test]
fn for_header_is_detached() {
    let (lang, t) = ips("minijs", "function main() { for (i = 0; i < 3; i = i + 1) { if (d) { continue; } } }");
    let lp = first_item_path(lang, &t, 0);
    let out = insert_at(&t, &InsertionPoint::BeforeLoopCondition(lp), &[marker(lang)], lang).unwrap();
    let want = "function main() { i = 0; t = c0; for (; i < 3; ) { if (d) { i = i + 1; t = c0; continue; } i = i + 1; t = c0; } }";
    assert_eq!(token_texts(&text(lang, &out), Dialect::Js).unwrap(), token_texts(want, Dialect::Js).unwrap());
}

#[test]
fn counted_for_gets_two_sites() {
    let (lang, t) = ips("minilua", "function main()\n for i = 1, 3 do\n  f(i)\n end\nend");
    let lp = first_item_path(lang, &t, 0);
    let out = insert_at(&t, &InsertionPoint::BeforeLoopCondition(lp), &[marker(lang)], lang).unwrap();
    assert_eq!(text(lang, &out), "function main()\n  t = c0\n  for i = 1, 3 do\n    f(i)\n    t = c0\n  end\nend\n");
}

#[test]
fn before_first_stmt_is_block_entry() {
    let (lang, t) = ips("minijs", "function main() { f(); g(); }");
    let body = lang.frontend.functions(lang, &t)[0].1.clone();
    let a = insert_at(&t, &InsertionPoint::BeforeStmt(first_item_path(lang, &t, 0)), &[marker(lang)], lang).unwrap();
    let b = insert_at(&t, &InsertionPoint::BlockEntry(body), &[marker(lang)], lang).unwrap();
    assert_eq!(a, b);
}

#[test]
fn invalid_paths_are_rejected() {
    let (lang, t) = ips("minijs", "function main() { f(); }");
    let bad = InsertionPoint::BeforeStmt(vec![0, 0, 1]);
    assert!(matches!(insert_at(&t, &bad, &[marker(lang)], lang), Err(FlowError::InvalidPath(_))));
    let not_loop = InsertionPoint::BeforeLoopCondition(first_item_path(lang, &t, 0));
    assert!(matches!(insert_at(&t, &not_loop, &[marker(lang)], lang), Err(FlowError::NotALoop(_))));
}

/// Every path into the condition test passes through a copy of the
/// inserted statement since the previous test.
#[test]
fn inserted_copies_dominate_condition() {
    let srcs = [
        "function main() { while (c) { if (d) { continue; } else { if (e) { continue; } } f(); } }",
        "function main() { for (i = 0; i < 3; i = i + 1) { if (d) { continue; } while (e) { continue; } } }",
        "function main() { for (; c; ) { if (d) { break; } } }",
    ];
    for src in srcs {
        let (lang, t) = ips("minijs", src);
        let lp = first_item_path(lang, &t, 0);
        let out = insert_at(&t, &InsertionPoint::BeforeLoopCondition(lp.clone()), &[marker(lang)], lang).unwrap();
        let items = block_items(out.at(&lang.frontend.functions(lang, &out)[0].1).unwrap()).unwrap();
        let k = items.iter().position(|it| lang.stmt_shape(it).is_loop()).unwrap();
        let lp2 = first_item_path(lang, &out, k);
        let cfg = build_cfg(&out, lang).unwrap();
        let cond = cfg.find(CfgNodeKind::Cond(0), &lp2).unwrap();
        let m = marker(lang);
        for p in cfg.preds(cond) {
            let mut n = &cfg.nodes[cfg.owner_of(p)];
            if n.path == lp2 || lang.stmt_shape(out.at(&n.path).unwrap()) == StmtShape::Continue {
                n = &cfg.nodes[n.prev_sibling.unwrap()];
            }
            assert_eq!(n.kind, CfgNodeKind::Stmt, "{src}");
            assert_eq!(out.at(&n.path).unwrap(), &m, "{src}");
        }
    }
}
