//! Declaration hoisting: every block starts with its declarations, stripped
//! of initializers, and each initializer becomes an assignment in the
//! declaration's old position.

use std::collections::BTreeSet;

use crate::flow::{block_items, with_items};
use crate::fragments::{collect_names, generic, ident_name, sort, LanguageOps, BLOCK_ITEM_L, MULTI_DECL_L};
use crate::lang::LanguageDef;
use crate::term::{build_list, extract_list, Term};
use crate::traversal::query_collect;

use super::{map_blocks, Pass, TransformError};

pub fn elementary_hoist(term: &Term, lang: &LanguageDef) -> Result<Term, TransformError> {
    Pass::Ehoist.requirements().check(Pass::Ehoist, lang)?;
    map_blocks(term, &mut |b| hoist_block(b, lang, false))
}

/// Like `elementary_hoist`, but leaves a declaration where it is when moving
/// it to the top of its block could change what a name refers to.
pub fn hoist(term: &Term, lang: &LanguageDef) -> Result<Term, TransformError> {
    Pass::Hoist.requirements().check(Pass::Hoist, lang)?;
    map_blocks(term, &mut |b| hoist_block(b, lang, true))
}

fn as_decl(lang: &LanguageDef, item: &Term) -> Result<Option<Term>, TransformError> {
    Ok(lang.injections.proj_f(item, &sort(MULTI_DECL_L)).map_err(crate::lang::IpsError::from)?)
}

fn to_item(lang: &LanguageDef, t: Term) -> Result<Term, TransformError> {
    Ok(lang.injections.inj_f(t, &sort(BLOCK_ITEM_L)).map_err(crate::lang::IpsError::from)?)
}

fn singles(decl: &Term) -> Result<Vec<Term>, TransformError> {
    Ok(extract_list(decl.child(1))?)
}

fn init_of(single: &Term) -> Option<&Term> {
    let oi = single.child(2);
    oi.is("JustLocalVarInit").then(|| oi.child(0))
}

fn remove_init(decl: &Term) -> Result<Term, TransformError> {
    let none = generic().leaf(&generic().no_init);
    let ss = singles(decl)?.iter().map(|s| s.with_child(2, none.clone())).collect::<Result<Vec<_>, _>>()?;
    Ok(decl.with_child(1, build_list(decl.child(1).sort().list_elem().expect("list"), ss)?)?)
}

/// One assignment per initialized declarator.
fn decl_to_assigns(lang: &LanguageDef, decl: &Term) -> Result<Vec<Term>, TransformError> {
    let common = decl.child(0);
    let mut out = Vec::new();
    for s in singles(decl)? {
        if let Some(init) = init_of(&s) {
            let lhs = lang.var_decl_binder_to_lhs(s.child(1))?;
            let rhs = lang.var_init_to_rhs(common, s.child(0), init)?;
            out.push(generic().mk_assign(lhs, rhs)?);
        }
    }
    Ok(out)
}

fn hoist_block(block: &Term, lang: &LanguageDef, shadow_aware: bool) -> Result<Term, TransformError> {
    let items = block_items(block)?;
    let mut decls = Vec::new();
    let mut stmts = Vec::new();
    let mut changed = false;
    for (i, item) in items.iter().enumerate() {
        let Some(d) = as_decl(lang, item)? else {
            stmts.push(item.clone());
            continue;
        };
        if shadow_aware && must_stay(&d, &items[..i])? {
            stmts.push(item.clone());
            continue;
        }
        let assigns = decl_to_assigns(lang, &d)?;
        changed |= !stmts.is_empty() || !assigns.is_empty();
        decls.push(to_item(lang, remove_init(&d)?)?);
        for a in assigns {
            stmts.push(to_item(lang, a)?);
        }
    }
    if !changed {
        return Ok(block.clone());
    }
    decls.extend(stmts);
    Ok(with_items(block, decls)?)
}

fn binder_names(single: &Term) -> BTreeSet<String> {
    collect_names(single.child(1))
}

/// Whether hoisting `decl`, preceded in its block by `before`, could change
/// the binding of some name occurrence: a name it binds is visible in an
/// earlier item, or an initializer mentions a name bound by the same or a
/// later declarator.
fn must_stay(decl: &Term, before: &[Term]) -> Result<bool, TransformError> {
    let ss = singles(decl)?;
    let visible = visible_names(before);
    for (i, s) in ss.iter().enumerate() {
        if !binder_names(s).is_disjoint(&visible) {
            return Ok(true);
        }
        if let Some(init) = init_of(s) {
            let used = collect_names(init);
            if ss[i..].iter().any(|later| !binder_names(later).is_disjoint(&used)) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Names occurring in `items` that resolve at the level of their block or
/// further out. Names bound by declarations inside nested blocks are
/// excluded where those declarations are in scope.
fn visible_names(items: &[Term]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for it in items {
        scan(it, &BTreeSet::new(), &mut out);
    }
    out
}

fn scan(t: &Term, bound: &BTreeSet<String>, out: &mut BTreeSet<String>) {
    if t.is("Block") {
        scan_nested(t, bound.clone(), out);
    } else if let Some(n) = ident_name(t) {
        if !bound.contains(n) {
            out.insert(n.to_string());
        }
    } else {
        for c in t.children() {
            scan(c, bound, out);
        }
    }
}

fn scan_nested(block: &Term, mut bound: BTreeSet<String>, out: &mut BTreeSet<String>) {
    let Ok(items) = block_items(block) else { return };
    for it in &items {
        let decl = find_decl(it);
        match decl.and_then(|d| extract_list(d.child(1)).ok()) {
            Some(ss) => {
                for s in &ss {
                    if let Some(init) = init_of(s) {
                        scan(init, &bound, out);
                    }
                    bound.extend(binder_names(s));
                }
            }
            None => scan(it, &bound, out),
        }
    }
}

/// The declaration an item wraps, found without the injection table: the
/// first node along single-child wrappers.
fn find_decl(item: &Term) -> Option<&Term> {
    let mut t = item;
    loop {
        if t.is("MultiLocalVarDecl") {
            return Some(t);
        }
        match t.children() {
            [only] => t = only,
            _ => return None,
        }
    }
}

/// Declarations in `term` that sit after a non-declaration item or keep an
/// initializer, described by their block and index. With `shadow_aware`,
/// declarations that hoisting leaves in place are exempt.
pub fn hoist_violations(term: &Term, lang: &LanguageDef, shadow_aware: bool) -> Result<Vec<String>, TransformError> {
    let blocks = query_collect(&|t: &Term| if t.is("Block") { vec![t.clone()] } else { vec![] }, term);
    let mut out = Vec::new();
    for (bi, b) in blocks.iter().enumerate() {
        let items = block_items(b)?;
        let mut seen_stmt = false;
        for (i, it) in items.iter().enumerate() {
            let Some(d) = as_decl(lang, it)? else {
                seen_stmt = true;
                continue;
            };
            let has_init = singles(&d)?.iter().any(|s| init_of(s).is_some());
            if (seen_stmt || has_init) && !(shadow_aware && must_stay(&d, &items[..i])?) {
                out.push(format!("block {bi} item {i}"));
            }
        }
    }
    Ok(out)
}
