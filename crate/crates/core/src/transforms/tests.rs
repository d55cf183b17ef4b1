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

fn run(key: &str, pass: Pass, src: &str) -> String {
    let (lang, t) = ips(key, src);
    text(lang, &pass.run(&t, lang).unwrap())
}

fn same_tokens(dialect: Dialect, got: &str, want: &str) {
    assert_eq!(token_texts(got, dialect).unwrap(), token_texts(want, dialect).unwrap(), "\n{got}");
}

const HOIST_C: &str = "int f(int a,int b,int s) {\n  int t1 = 0, t2 = 1;\n  if (s) {\n    int r1 = t1*a+t2*b;\n    return r1;\n  }\n  int r2 = t2*a+t1*b;\n  return r2;\n}\n";
const HOISTED_C: &str = "int f(int a,int b,int s) {\n  int t1, t2; int r2;\n  t1 = 0; t2 = 1;\n  if (s) {\n    int r1;\n    r1 = t1*a+t2*b;\n    return r1;\n  }\n  r2 = t2*a+t1*b;\n  return r2;\n}\n";

#[test]
fn elementary_hoist_matches_c89_rewrite() {
    same_tokens(Dialect::C, &run("minic", Pass::Ehoist, HOIST_C), HOISTED_C);
}

#[test]
fn hoist_without_shadowing_equals_elementary() {
    assert_eq!(run("minic", Pass::Hoist, HOIST_C), run("minic", Pass::Ehoist, HOIST_C));
}

#[test]
fn uninitialized_declaration_emits_no_assignment() {
    same_tokens(
        Dialect::C,
        &run("minic", Pass::Ehoist, "void main() { print(1); int y; y = 2; }"),
        "void main() { int y; print(1); y = 2; }",
    );
}

#[test]
fn empty_block_is_unchanged() {
    let (lang, t) = ips("minic", "void main() { { } }");
    assert_eq!(elementary_hoist(&t, lang).unwrap(), t);
    assert_eq!(hoist(&t, lang).unwrap(), t);
}

#[test]
fn lua_multi_binder_becomes_parallel_assignment() {
    let got = run("minilua", Pass::Hoist, "function main()\n print(1)\n local x, y = 1, 2\n print(x)\nend\n");
    assert_eq!(got, "function main()\n  local x, y\n  print(1)\n  x, y = 1, 2\n  print(x)\nend\n");
}

#[test]
fn declaration_after_outer_use_stays() {
    let src = "int main() { int x = 1; { print(x); int x = 2; print(x); } return x; }";
    same_tokens(
        Dialect::C,
        &run("minic", Pass::Hoist, src),
        "int main() { int x; x = 1; { print(x); int x = 2; print(x); } return x; }",
    );
    same_tokens(
        Dialect::C,
        &run("minic", Pass::Ehoist, src),
        "int main() { int x; x = 1; { int x; print(x); x = 2; print(x); } return x; }",
    );
}

#[test]
fn own_initializer_reference_stays() {
    let src = "function main()\n local x = 1\n do\n  print(2)\n  local x = x + 1\n end\nend\n";
    assert_eq!(
        run("minilua", Pass::Hoist, src),
        "function main()\n  local x\n  x = 1\n  do\n    print(2)\n    local x = x + 1\n  end\nend\n"
    );
}

#[test]
fn redeclaration_stays() {
    let src = "function main() { var a = 1; print(a); var a = 2; print(a); }";
    same_tokens(
        Dialect::Js,
        &run("minijs", Pass::Hoist, src),
        "function main() { var a; a = 1; print(a); var a = 2; print(a); }",
    );
}

#[test]
fn names_bound_in_nested_blocks_do_not_block_hoisting() {
    let src = "int main() { { int y = 1; print(y); } int y = 2; return y; }";
    same_tokens(
        Dialect::C,
        &run("minic", Pass::Hoist, src),
        "int main() { int y; { int y; y = 1; print(y); } y = 2; return y; }",
    );
}

#[test]
fn hoist_is_idempotent_and_meets_postcondition() {
    let cases = [
        ("minic", HOIST_C),
        ("minic", "int main() { int x = 1; { print(x); int x = 2; int z = x; } return x; }"),
        ("minijs", "function main() { print(1); var a = 1, b = a; if (a) { var c = b; } return c; }"),
        ("minilua", "function main()\n local a = 1\n print(b)\n local b = a\n local a, c = a, 3\nend\n"),
    ];
    for (key, src) in cases {
        let (lang, t) = ips(key, src);
        let once = hoist(&t, lang).unwrap();
        assert_eq!(hoist(&once, lang).unwrap(), once, "{src}");
        assert_eq!(hoist_violations(&once, lang, true).unwrap(), Vec::<String>::new(), "{src}");
        let e = elementary_hoist(&t, lang).unwrap();
        assert_eq!(hoist_violations(&e, lang, false).unwrap(), Vec::<String>::new(), "{src}");
    }
}

#[test]
fn postcondition_scan_flags_unhoisted_input() {
    let (lang, t) = ips("minic", HOIST_C);
    assert_eq!(hoist_violations(&t, lang, false).unwrap().len(), 3);
}

const COUNT_F: &str = "function countF() { var count = 0; var i; for (i = 0; i < 9; i = i + 1) { if (f(i)) { count = count + 1; break; } else { print(i); } } return count; }";

#[test]
fn testcov_marks_the_five_blocks_of_count_f() {
    let (lang, t) = ips("minijs", COUNT_F);
    let (out, n) = testcov(&t, lang).unwrap();
    assert_eq!(n, 5);
    same_tokens(
        Dialect::Js,
        &text(lang, &out),
        "function countF() { TC.cov[0] = true; var count = 0; var i; for (i = 0; i < 9; i = i + 1) { TC.cov[1] = true; if (f(i)) { TC.cov[2] = true; count = count + 1; break; } else { TC.cov[3] = true; print(i); } } TC.cov[4] = true; return count; }",
    );
}

#[test]
fn testcov_on_empty_body_has_one_marker() {
    for (key, src, want) in [
        ("minic", "void main() {}", "void main() {\n  cov[0] = true;\n}\n"),
        ("minijs", "function main() {}", "function main() {\n  TC.cov[0] = true;\n}\n"),
        ("minilua", "function main()\nend\n", "function main()\n  TC.cov[0] = true\nend\n"),
    ] {
        let (lang, t) = ips(key, src);
        let (out, n) = testcov(&t, lang).unwrap();
        assert_eq!(n, 1);
        assert_eq!(text(lang, &out), want);
    }
}

#[test]
fn testcov_marks_unreachable_blocks_and_loop_exits() {
    same_tokens(
        Dialect::C,
        &run("minic", Pass::Testcov, "int main() { while (1) { break; } return 0; print(1); }"),
        "int main() { cov[0] = true; while (1) { cov[1] = true; break; } cov[2] = true; return 0; cov[3] = true; print(1); }",
    );
}

#[test]
fn tac_splits_nested_addition() {
    same_tokens(
        Dialect::Js,
        &run("minijs", Pass::Tac, "function main() { var x; x = 1 + 1 + 1; }"),
        "function main() { var __t0; var x; __t0 = 1 + 1; x = __t0 + 1; }",
    );
    assert_eq!(
        run("minilua", Pass::Tac, "function main()\n local x = 1 + 1 + 1\nend\n"),
        "function main()\n  local __t0\n  __t0 = 1 + 1\n  local x = __t0 + 1\nend\n"
    );
}

#[test]
fn tac_leaves_atomic_code_alone() {
    let src = "function main() { var x, a = 1; x = a; x = a + 1; print(x, a); }";
    let (lang, t) = ips("minijs", src);
    assert_eq!(tac(&t, lang).unwrap(), t);
}

#[test]
fn tac_lowers_short_circuit() {
    same_tokens(
        Dialect::Js,
        &run("minijs", Pass::Tac, "function main() { var x; x = f(1) && g(2); x = f(3) || x; }"),
        "function main() { var __t0, __t1; var x; __t0 = f(1); if (__t0) { __t0 = g(2); } x = __t0; __t1 = f(3); if (!__t1) { __t1 = x; } x = __t1; }",
    );
    assert_eq!(
        run("minilua", Pass::Tac, "function main()\n local x = f(1) or g(2) + 1\nend\n"),
        "function main()\n  local __t0, __t1\n  __t0 = f(1)\n  if not __t0 then\n    __t1 = g(2)\n    __t0 = __t1 + 1\n  end\n  local x = __t0\nend\n"
    );
}

#[test]
fn tac_keeps_atomic_short_circuit() {
    let src = "function main() { var a = 1, b = 2, x; x = a && b; }";
    let (lang, t) = ips("minijs", src);
    assert_eq!(tac(&t, lang).unwrap(), t);
}

#[test]
fn tac_recomputes_loop_condition_at_every_entry() {
    let src = "function main() { var a = [5]; var i = 0; while (i < a[0] + 1) { i = i + 1; if (i == 2) { continue; } print(i); } }";
    let want = "function main() { var __t0, __t1; var a = [5]; var i = 0; __t0 = a[0]; __t1 = __t0 + 1; while (i < __t1) { i = i + 1; if (i == 2) { __t0 = a[0]; __t1 = __t0 + 1; continue; } print(i); __t0 = a[0]; __t1 = __t0 + 1; } }";
    same_tokens(Dialect::Js, &run("minijs", Pass::Tac, src), want);
}

#[test]
fn tac_detaches_for_header_with_prelude() {
    let src = "function main() { var i; for (i = g(f(0)); i < 3; i = i + f(1)) { print(i); } }";
    let want = "function main() { var __t0, __t1, __t2; var i; __t0 = f(0); i = g(__t0); for (; i < 3; ) { print(i); __t2 = i; __t1 = f(1); i = __t2 + __t1; } }";
    same_tokens(Dialect::Js, &run("minijs", Pass::Tac, src), want);
}

#[test]
fn tac_saves_reads_before_a_prelude_that_writes() {
    same_tokens(
        Dialect::Js,
        &run("minijs", Pass::Tac, "function main() { var a = 1, x; x = a + (a = 2) * 3; }"),
        "function main() { var __t0, __t1, __t2; var a = 1, x; __t2 = a; __t0 = 2; a = __t0; __t1 = __t0 * 3; x = __t2 + __t1; }",
    );
}

#[test]
fn tac_splits_declarators_when_a_later_one_needs_a_prelude() {
    same_tokens(
        Dialect::Js,
        &run("minijs", Pass::Tac, "function main() { var a = 1, b = a * 2 + 1; }"),
        "function main() { var __t0; var a = 1; __t0 = a * 2; var b = __t0 + 1; }",
    );
}

#[test]
fn tac_splits_lua_elseif_needing_a_prelude() {
    let src =
        "function main()\n local x = 1\n if x == 1 then\n  print(1)\n elseif x + 1 == 3 then\n  print(2)\n end\nend\n";
    assert_eq!(
        run("minilua", Pass::Tac, src),
        "function main()\n  local __t0\n  local x = 1\n  if x == 1 then\n    print(1)\n  else\n    __t0 = x + 1\n    if __t0 == 3 then\n      print(2)\n    end\n  end\nend\n"
    );
}

#[test]
fn tac_temporaries_avoid_existing_names() {
    same_tokens(
        Dialect::Js,
        &run("minijs", Pass::Tac, "function main() { var __t0 = 1; print(__t0 + 1 + 1); }"),
        "function main() { var __t1, __t2; var __t0 = 1; __t1 = __t0 + 1; __t2 = __t1 + 1; print(__t2); }",
    );
}

#[test]
fn tac_output_is_atomic_and_stable() {
    let cases = [
        ("minijs", "function main() { var a = [1, 2], x = 0; while (x < a[1] * 2 && f(x)) { x = x + a[x % 2] * 3; } return a[0] + f(g(x), x = x + 1); }"),
        ("minilua", "function main()\n local a, b = 1, f(2) * 3\n a, b = b + f(a) * 2, a\n for i = 1, a + b * 2 do\n  print(i * i + 1)\n end\n return a and (b or f(a))\nend\n"),
    ];
    for (key, src) in cases {
        let (lang, t) = ips(key, src);
        assert!(!non_atomic_operands(&t, lang).is_empty());
        let once = tac(&t, lang).unwrap();
        assert_eq!(non_atomic_operands(&once, lang), Vec::<String>::new(), "{src}");
        assert_eq!(tac(&once, lang).unwrap(), once, "{src}");
        let reparsed = lang.decompose(&lang.parse(&text(lang, &once)).unwrap()).unwrap();
        assert_eq!(reparsed, once);
    }
}

#[test]
fn tac_refuses_typed_language() {
    let (lang, t) = ips("minic", "void main() { print(1 + 2 + 3); }");
    match tac(&t, lang) {
        Err(TransformError::RequirementMissing { pass, lang, missing }) => {
            assert_eq!(pass, Pass::Tac);
            assert_eq!(lang, "MiniC");
            assert_eq!(missing, ["operation tac"]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn requirements_met_elsewhere() {
    for lang in crate::lang::languages() {
        for p in [Pass::Ident, Pass::Ehoist, Pass::Hoist, Pass::Testcov] {
            assert!(p.requirements().missing(lang).is_empty(), "{} {p}", lang.name);
        }
    }
}

#[test]
fn pass_names_round_trip() {
    for p in Pass::ALL {
        assert_eq!(p.name().parse::<Pass>().unwrap(), p);
    }
    assert!("nope".parse::<Pass>().is_err());
}
