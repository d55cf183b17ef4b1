//! Sort injections: terms of one sort embedded at another through a chain
//! of wrapper nodes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{NodeKind, Payload, Signature, Sort, Term, TermError};

/// One link of an injection chain. The wrapped term goes at `child_index`;
/// `fill` occupies the remaining child positions in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wrapper {
    pub kind: Arc<NodeKind>,
    pub child_index: usize,
    pub fill: Vec<Term>,
    pub payloads: Vec<Payload>,
}

impl Wrapper {
    pub fn unary(kind: &Arc<NodeKind>) -> Wrapper {
        Wrapper { kind: kind.clone(), child_index: 0, fill: Vec::new(), payloads: Vec::new() }
    }

    pub fn with_fill(kind: &Arc<NodeKind>, child_index: usize, fill: Vec<Term>, payloads: Vec<Payload>) -> Wrapper {
        Wrapper { kind: kind.clone(), child_index, fill, payloads }
    }

    fn wrap(&self, inner: Term) -> Result<Term, TermError> {
        let mut children = self.fill.clone();
        children.insert(self.child_index.min(children.len()), inner);
        Term::new(&self.kind, self.payloads.clone(), children)
    }

    fn unwrap<'a>(&self, outer: &'a Term) -> Option<&'a Term> {
        if outer.kind().map(|k| **k != *self.kind).unwrap_or(true) || outer.payloads() != self.payloads.as_slice() {
            return None;
        }
        let others = outer.children().iter().enumerate().filter(|(i, _)| *i != self.child_index).map(|(_, c)| c);
        if !others.eq(self.fill.iter()) {
            return None;
        }
        outer.children().get(self.child_index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectionDecl {
    pub from: Sort,
    pub to: Sort,
    /// Innermost wrapper first.
    pub path: Vec<Wrapper>,
    pub derived: bool,
}

impl InjectionDecl {
    pub fn new(from: Sort, to: Sort, path: Vec<Wrapper>) -> InjectionDecl {
        InjectionDecl { from, to, path, derived: false }
    }

    /// A chain of unary wrappers.
    pub fn chain(from: Sort, to: Sort, kinds: &[&Arc<NodeKind>]) -> InjectionDecl {
        InjectionDecl::new(from, to, kinds.iter().map(|k| Wrapper::unary(k)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InjectionError {
    #[error("ill-typed injection path {from} -> {to}: {reason}")]
    IllTypedPath { from: Sort, to: Sort, reason: String },
    #[error("injection {0} -> {1} already declared")]
    DuplicateInjection(Sort, Sort),
    #[error("no injection from {0} to {1}")]
    NoInjection(Sort, Sort),
    #[error("cannot compose: missing edge {0} -> {1}")]
    MissingEdge(Sort, Sort),
    #[error("two different derived paths for {0} -> {1}")]
    AmbiguousDerivation(Sort, Sort),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Clone, Debug, Default)]
pub struct InjectionTable {
    entries: BTreeMap<(Sort, Sort), InjectionDecl>,
}

impl InjectionTable {
    pub fn new() -> InjectionTable {
        InjectionTable::default()
    }

    /// Registers a declared edge after checking its path against `sig`.
    pub fn declare(&mut self, sig: &Signature, decl: InjectionDecl) -> Result<(), InjectionError> {
        let ill =
            |reason: String| InjectionError::IllTypedPath { from: decl.from.clone(), to: decl.to.clone(), reason };
        if decl.path.is_empty() {
            return Err(ill("empty path".into()));
        }
        let mut cur = decl.from.clone();
        for w in &decl.path {
            let k = &w.kind;
            if !sig.contains(k) {
                return Err(ill(format!("{} is not in signature {}", k.name, sig.name)));
            }
            if w.child_index >= k.child_sorts.len() {
                return Err(ill(format!("{} has no child {}", k.name, w.child_index)));
            }
            if k.child_sorts[w.child_index] != cur {
                return Err(ill(format!(
                    "{} expects {} at child {}, got {}",
                    k.name, k.child_sorts[w.child_index], w.child_index, cur
                )));
            }
            if w.fill.len() + 1 != k.child_sorts.len() {
                return Err(ill(format!("{} fill has wrong length", k.name)));
            }
            let others = k.child_sorts.iter().enumerate().filter(|(i, _)| *i != w.child_index).map(|(_, s)| s);
            if others.zip(&w.fill).any(|(s, t)| s != t.sort()) {
                return Err(ill(format!("{} fill has wrong sorts", k.name)));
            }
            if w.payloads.len() != k.payloads.len() || w.payloads.iter().zip(&k.payloads).any(|(p, t)| p.ty() != *t) {
                return Err(ill(format!("{} default payloads do not match", k.name)));
            }
            cur = k.produced.clone();
        }
        if cur != decl.to {
            return Err(ill(format!("chain produces {cur}")));
        }
        let key = (decl.from.clone(), decl.to.clone());
        match self.entries.get(&key) {
            Some(existing) if !existing.derived => Err(InjectionError::DuplicateInjection(key.0, key.1)),
            _ => {
                self.entries.insert(key, InjectionDecl { derived: false, ..decl });
                Ok(())
            }
        }
    }

    /// The path for a pair; reflexive pairs have the empty path.
    pub fn path(&self, from: &Sort, to: &Sort) -> Result<&[Wrapper], InjectionError> {
        if from == to {
            return Ok(&[]);
        }
        self.entries
            .get(&(from.clone(), to.clone()))
            .map(|d| d.path.as_slice())
            .ok_or_else(|| InjectionError::NoInjection(from.clone(), to.clone()))
    }

    pub fn has(&self, from: &Sort, to: &Sort) -> bool {
        from == to || self.entries.contains_key(&(from.clone(), to.clone()))
    }

    pub fn get(&self, from: &Sort, to: &Sort) -> Option<&InjectionDecl> {
        self.entries.get(&(from.clone(), to.clone()))
    }

    pub fn entries(&self) -> impl Iterator<Item = &InjectionDecl> {
        self.entries.values()
    }

    /// Sources with an edge into `to`, in sort order.
    pub fn sources_of(&self, to: &Sort) -> Vec<Sort> {
        self.entries.keys().filter(|(_, t)| t == to).map(|(f, _)| f.clone()).collect()
    }

    pub fn inj_f(&self, term: Term, target: &Sort) -> Result<Term, InjectionError> {
        let path = self.path(term.sort(), target)?;
        let mut cur = term;
        for w in path {
            cur = w.wrap(cur)?;
        }
        Ok(cur)
    }

    /// Recovers the term of sort `source` wrapped inside `term`, if `term`
    /// has exactly the shape `inj_f` produces.
    pub fn proj_f(&self, term: &Term, source: &Sort) -> Result<Option<Term>, InjectionError> {
        let path = self.path(source, term.sort())?;
        let mut cur = term;
        for w in path.iter().rev() {
            match w.unwrap(cur) {
                Some(inner) => cur = inner,
                None => return Ok(None),
            }
        }
        Ok(Some(cur.clone()))
    }

    /// Tries every registered source in order and returns the first that
    /// projects.
    pub fn proj_any(&self, term: &Term) -> Option<(Sort, Term)> {
        for src in self.sources_of(term.sort()) {
            if let Ok(Some(t)) = self.proj_f(term, &src) {
                return Some((src, t));
            }
        }
        None
    }

    /// Adds a derived edge a -> c by concatenating a -> b and b -> c.
    pub fn compose(&mut self, a: &Sort, b: &Sort, c: &Sort) -> Result<(), InjectionError> {
        let first = self.path(a, b).map_err(|_| InjectionError::MissingEdge(a.clone(), b.clone()))?.to_vec();
        let second = self.path(b, c).map_err(|_| InjectionError::MissingEdge(b.clone(), c.clone()))?;
        let mut path = first;
        path.extend(second.iter().cloned());
        if a == c {
            return Ok(());
        }
        let key = (a.clone(), c.clone());
        match self.entries.get(&key) {
            Some(existing) if !existing.derived => Ok(()),
            Some(existing) if existing.path != path => Err(InjectionError::AmbiguousDerivation(key.0, key.1)),
            _ => {
                self.entries.insert(key, InjectionDecl { from: a.clone(), to: c.clone(), path, derived: true });
                Ok(())
            }
        }
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for d in self.entries.values() {
            let chain: Vec<String> = d
                .path
                .iter()
                .map(|w| {
                    if w.kind.child_sorts.len() == 1 {
                        w.kind.name.clone()
                    } else {
                        format!("{}@{}", w.kind.name, w.child_index)
                    }
                })
                .collect();
            let _ = writeln!(
                out,
                "{} -> {} {}: {}",
                d.from,
                d.to,
                if d.derived { "derived" } else { "declared" },
                chain.join(", ")
            );
        }
        out
    }
}
