//! Generic rewriting and querying over sorted terms.
//!
//! A rewrite returns `Ok(None)` when it does not apply. Every rewrite must
//! preserve the sort of the term it fires on; violations are reported.

use thiserror::Error;

use crate::term::{Sort, Term, TermError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TraversalError {
    #[error("rewrite at {kind} changed sort {expected} to {actual}")]
    SortViolation { kind: String, expected: Sort, actual: Sort },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("{0}")]
    Other(String),
}

pub type RewriteResult = Result<Option<Term>, TraversalError>;

/// Lifts an infallible partial function into a rewrite.
pub fn rule(f: impl Fn(&Term) -> Option<Term>) -> impl Fn(&Term) -> RewriteResult {
    move |t| Ok(f(t))
}

pub fn identity(t: &Term) -> RewriteResult {
    Ok(Some(t.clone()))
}

pub fn fail(_: &Term) -> RewriteResult {
    Ok(None)
}

fn checked(before: &Term, after: Option<Term>) -> RewriteResult {
    match after {
        Some(a) if a.sort() != before.sort() => Err(TraversalError::SortViolation {
            kind: before.name().to_string(),
            expected: before.sort().clone(),
            actual: a.sort().clone(),
        }),
        other => Ok(other),
    }
}

/// Applies `r` at every node, children first. Nodes where `r` does not fire
/// are kept.
pub fn transform_bottom_up(r: &impl Fn(&Term) -> RewriteResult, t: &Term) -> Result<Term, TraversalError> {
    let kids = t.children().iter().map(|c| transform_bottom_up(r, c)).collect::<Result<Vec<_>, _>>()?;
    let rebuilt = t.with_children(kids)?;
    Ok(checked(&rebuilt, r(&rebuilt)?)?.unwrap_or(rebuilt))
}

/// Concatenates `q` over all nodes in pre-order.
pub fn query_collect<T>(q: &impl Fn(&Term) -> Vec<T>, t: &Term) -> Vec<T> {
    let mut out = Vec::new();
    t.for_each(&mut |n| out.extend(q(n)));
    out
}

/// Never fails: keeps the input when `r` does not apply.
pub fn try_(r: impl Fn(&Term) -> RewriteResult) -> impl Fn(&Term) -> RewriteResult {
    move |t| Ok(Some(checked(t, r(t)?)?.unwrap_or_else(|| t.clone())))
}

/// `r1` then `r2`; fails if either fails.
pub fn seq(
    r1: impl Fn(&Term) -> RewriteResult,
    r2: impl Fn(&Term) -> RewriteResult,
) -> impl Fn(&Term) -> RewriteResult {
    move |t| match checked(t, r1(t)?)? {
        Some(mid) => checked(&mid, r2(&mid)?),
        None => Ok(None),
    }
}

/// Fires at the first node in pre-order where `r` applies.
pub fn once_top_down(r: impl Fn(&Term) -> RewriteResult) -> impl Fn(&Term) -> RewriteResult {
    fn go(r: &impl Fn(&Term) -> RewriteResult, t: &Term) -> RewriteResult {
        if let Some(out) = checked(t, r(t)?)? {
            return Ok(Some(out));
        }
        for (i, c) in t.children().iter().enumerate() {
            if let Some(nc) = go(r, c)? {
                return Ok(Some(t.with_child(i, nc)?));
            }
        }
        Ok(None)
    }
    move |t| go(&r, t)
}

/// Applies `r` to every immediate child; fails if it fails on any.
pub fn all_children(r: impl Fn(&Term) -> RewriteResult) -> impl Fn(&Term) -> RewriteResult {
    move |t| {
        let mut kids = Vec::with_capacity(t.children().len());
        for c in t.children() {
            match checked(c, r(c)?)? {
                Some(nc) => kids.push(nc),
                None => return Ok(None),
            }
        }
        Ok(Some(t.with_children(kids)?))
    }
}
