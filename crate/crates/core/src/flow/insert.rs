use crate::fragments::{sort, BLOCK_ITEM_L};
use crate::lang::{join, list_elem_path, LanguageDef, Path, StmtShape};
use crate::term::{build_list, extract_list, Term};

use super::FlowError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InsertionPoint {
    /// Immediately before the block item at this path.
    BeforeStmt(Path),
    /// Everywhere control flows into the condition test of the loop item
    /// at this path.
    BeforeLoopCondition(Path),
    /// At the start of the block at this path.
    BlockEntry(Path),
}

/// Items of a generic block.
pub fn block_items(block: &Term) -> Result<Vec<Term>, FlowError> {
    Ok(extract_list(block.child(0))?)
}

pub fn with_items(block: &Term, items: Vec<Term>) -> Result<Term, FlowError> {
    Ok(block.with_child(0, build_list(&sort(BLOCK_ITEM_L), items)?)?)
}

/// Block path and index of the item at `path`.
fn item_slot(term: &Term, path: &[usize]) -> Result<(Path, usize), FlowError> {
    let invalid = || FlowError::InvalidPath(path.to_vec());
    let (&last, rest) = path.split_last().ok_or_else(invalid)?;
    if last != 0 {
        return Err(invalid());
    }
    let ones = rest.iter().rev().take_while(|&&x| x == 1).count();
    let head = &rest[..rest.len() - ones];
    let (&zero, block) = head.split_last().ok_or_else(invalid)?;
    if zero != 0 || !term.at(block).is_some_and(|b| b.is("Block")) || term.at(path).is_none() {
        return Err(invalid());
    }
    Ok((block.to_vec(), ones))
}

/// Replaces `remove` items at `index` of the block at `block` by `insert`.
fn splice(term: &Term, block: &[usize], index: usize, remove: usize, insert: Vec<Term>) -> Result<Term, FlowError> {
    let b = term.at(block).filter(|b| b.is("Block")).ok_or_else(|| FlowError::InvalidPath(block.to_vec()))?;
    let mut items = block_items(b)?;
    if index + remove > items.len() {
        return Err(FlowError::InvalidPath(block.to_vec()));
    }
    items.splice(index..index + remove, insert);
    Ok(term.replace_at(block, with_items(b, items)?)?)
}

fn as_items(lang: &LanguageDef, stmts: &[Term]) -> Result<Vec<Term>, FlowError> {
    stmts
        .iter()
        .map(|s| Ok(lang.injections.inj_f(s.clone(), &sort(BLOCK_ITEM_L)).map_err(crate::lang::IpsError::from)?))
        .collect()
}

pub fn insert_at(term: &Term, point: &InsertionPoint, stmts: &[Term], lang: &LanguageDef) -> Result<Term, FlowError> {
    let stmts = as_items(lang, stmts)?;
    match point {
        InsertionPoint::BeforeStmt(p) => {
            let (b, i) = item_slot(term, p)?;
            splice(term, &b, i, 0, stmts)
        }
        InsertionPoint::BlockEntry(b) => splice(term, b, 0, 0, stmts),
        InsertionPoint::BeforeLoopCondition(p) => {
            let (b, i) = item_slot(term, p)?;
            let item = term.at(p).expect("checked by item_slot");
            let expanded = expand_loop_condition(lang, item, &stmts)?;
            splice(term, &b, i, 1, expanded)
        }
    }
}

/// Moves the init and step of a C-style `for` out of its header:
/// returns the init items, the loop without init and step, and the step
/// items, which belong at the end of every iteration.
pub fn detach_for(lang: &LanguageDef, item: &Term) -> Result<(Vec<Term>, Term, Vec<Term>), FlowError> {
    let StmtShape::For { init, step, .. } = lang.stmt_shape(item) else {
        return Ok((vec![], item.clone(), vec![]));
    };
    if init.is_none() && step.is_none() {
        return Ok((vec![], item.clone(), vec![]));
    }
    let as_item = |p: &Option<Path>| -> Result<Vec<Term>, FlowError> {
        match p {
            Some(p) => {
                let e = item.at(p).ok_or_else(|| FlowError::InvalidPath(p.clone()))?;
                Ok(vec![lang.frontend.expr_item(lang, e.clone())?])
            }
            None => Ok(vec![]),
        }
    };
    let pre = as_item(&init)?;
    let post = as_item(&step)?;
    let cleared = lang.frontend.clear_for_header(lang, item)?;
    Ok((pre, cleared, post))
}

/// Sites inside a loop item, as (block path, index) relative to the item,
/// from which control goes to the condition test: the end of the body and
/// before each `continue` that targets this loop.
pub fn loop_sites(lang: &LanguageDef, item: &Term) -> Result<Vec<(Path, usize)>, FlowError> {
    let body = match lang.stmt_shape(item) {
        StmtShape::While { body, .. } | StmtShape::For { body, .. } | StmtShape::CountedFor { body } => body,
        _ => return Err(FlowError::NotALoop(vec![])),
    };
    let b = item.at(&body).ok_or_else(|| FlowError::InvalidPath(body.clone()))?;
    let mut sites = vec![(body.clone(), block_items(b)?.len())];
    continues(lang, item, &body, &mut sites)?;
    Ok(sites)
}

fn continues(lang: &LanguageDef, root: &Term, block: &[usize], out: &mut Vec<(Path, usize)>) -> Result<(), FlowError> {
    let b = root.at(block).ok_or_else(|| FlowError::InvalidPath(block.to_vec()))?;
    for (i, it) in block_items(b)?.iter().enumerate() {
        let shape = lang.stmt_shape(it);
        if shape == StmtShape::Continue {
            out.push((block.to_vec(), i));
        } else if !shape.is_loop() {
            let p = list_elem_path(&join(block, &[0]), i);
            for nb in shape.blocks() {
                continues(lang, root, &join(&p, &nb), out)?;
            }
        }
    }
    Ok(())
}

/// The items replacing a loop so that `stmts` run before every test of
/// its condition. C-style `for` headers are detached first.
pub fn expand_loop_condition(lang: &LanguageDef, item: &Term, stmts: &[Term]) -> Result<Vec<Term>, FlowError> {
    if !lang.stmt_shape(item).is_loop() {
        return Err(FlowError::NotALoop(vec![]));
    }
    let stmts = as_items(lang, stmts)?;
    let (pre, lp, step) = detach_for(lang, item)?;
    let tail: Vec<Term> = step.into_iter().chain(stmts.iter().cloned()).collect();
    let lp = insert_at_loop_sites(lang, &lp, &tail)?;
    Ok(pre.into_iter().chain(stmts).chain([lp]).collect())
}

/// Inserts `items` at the end of the loop body and before each `continue`
/// targeting the loop.
pub fn insert_at_loop_sites(lang: &LanguageDef, item: &Term, items: &[Term]) -> Result<Term, FlowError> {
    let items = as_items(lang, items)?;
    let mut sites = loop_sites(lang, item)?;
    sites.sort_by_key(|(b, i)| std::cmp::Reverse(list_elem_path(&join(b, &[0]), *i)));
    let mut lp = item.clone();
    for (b, i) in sites {
        lp = splice(&lp, &b, i, 0, items.clone())?;
    }
    Ok(lp)
}
