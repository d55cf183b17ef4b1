//! Sorted terms over a signature of node kinds.
//!
//! A [`Term`] is an immutable tree whose every node is labelled with a
//! [`Head`]: either a user-declared [`NodeKind`] or one of the built-in
//! container heads (lists, pairs, options and boxed primitives). Every
//! constructor checks child sorts, so a `Term` value is always well-sorted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Syntactic category of a term position.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Atomic(Arc<str>),
    ListOf(Arc<Sort>),
    PairOf(Arc<Sort>, Arc<Sort>),
    OptionOf(Arc<Sort>),
}

impl Sort {
    pub fn atomic(name: &str) -> Sort {
        Sort::Atomic(Arc::from(name))
    }

    pub fn list_of(elem: Sort) -> Sort {
        Sort::ListOf(Arc::new(elem))
    }

    pub fn pair_of(a: Sort, b: Sort) -> Sort {
        Sort::PairOf(Arc::new(a), Arc::new(b))
    }

    pub fn option_of(elem: Sort) -> Sort {
        Sort::OptionOf(Arc::new(elem))
    }

    /// Sort of the leaf terms that box a primitive inside a container.
    pub fn primitive(ty: PayloadType) -> Sort {
        Sort::atomic(ty.name())
    }

    pub fn list_elem(&self) -> Option<&Sort> {
        match self {
            Sort::ListOf(s) => Some(s),
            _ => None,
        }
    }

    pub fn atomic_name(&self) -> Option<&str> {
        match self {
            Sort::Atomic(n) => Some(n),
            _ => None,
        }
    }

    /// Atomic sorts mentioned anywhere inside this sort.
    pub fn atoms(&self, out: &mut BTreeSet<Sort>) {
        match self {
            Sort::Atomic(_) => {
                out.insert(self.clone());
            }
            Sort::ListOf(s) | Sort::OptionOf(s) => s.atoms(out),
            Sort::PairOf(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    /// Replace atomic sorts according to `map`.
    pub fn rename(&self, map: &BTreeMap<Sort, Sort>) -> Sort {
        if let Some(s) = map.get(self) {
            return s.clone();
        }
        match self {
            Sort::Atomic(_) => self.clone(),
            Sort::ListOf(s) => Sort::list_of(s.rename(map)),
            Sort::OptionOf(s) => Sort::option_of(s.rename(map)),
            Sort::PairOf(a, b) => Sort::pair_of(a.rename(map), b.rename(map)),
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Atomic(n) => f.write_str(n),
            Sort::ListOf(s) => write!(f, "[{s}]"),
            Sort::PairOf(a, b) => write!(f, "({a},{b})"),
            Sort::OptionOf(s) => write!(f, "{s}?"),
        }
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PayloadType {
    Int,
    Bool,
    String,
}

impl PayloadType {
    pub fn name(self) -> &'static str {
        match self {
            PayloadType::Int => "Int",
            PayloadType::Bool => "Bool",
            PayloadType::String => "String",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    Int(i64),
    Bool(bool),
    Str(Arc<str>),
}

impl Payload {
    pub fn str(s: &str) -> Payload {
        Payload::Str(Arc::from(s))
    }

    pub fn ty(&self) -> PayloadType {
        match self {
            Payload::Int(_) => PayloadType::Int,
            Payload::Bool(_) => PayloadType::Bool,
            Payload::Str(_) => PayloadType::String,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Payload::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Payload::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Payload::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Int(i) => write!(f, "{i}"),
            Payload::Bool(b) => write!(f, "{b}"),
            Payload::Str(s) => write_quoted(f, s),
        }
    }
}

fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

/// A constructor descriptor: payload slots come before children.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeKind {
    pub name: String,
    pub payloads: Vec<PayloadType>,
    pub child_sorts: Vec<Sort>,
    pub produced: Sort,
}

impl NodeKind {
    pub fn new(
        name: impl Into<String>,
        payloads: Vec<PayloadType>,
        child_sorts: Vec<Sort>,
        produced: Sort,
    ) -> Arc<NodeKind> {
        Arc::new(NodeKind { name: name.into(), payloads, child_sorts, produced })
    }

    pub fn rename_sorts(&self, map: &BTreeMap<Sort, Sort>) -> NodeKind {
        NodeKind {
            name: self.name.clone(),
            payloads: self.payloads.clone(),
            child_sorts: self.child_sorts.iter().map(|s| s.rename(map)).collect(),
            produced: self.produced.rename(map),
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, p) in self.payloads.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(p.name())?;
        }
        f.write_str(") :")?;
        for s in &self.child_sorts {
            write!(f, " {s}")?;
        }
        write!(f, " -> {}", self.produced)
    }
}

/// The label of a term node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Head {
    Node(Arc<NodeKind>),
    /// Empty list; carries the element sort.
    Nil(Sort),
    /// Non-empty list cell; carries the element sort.
    Cons(Sort),
    Pair(Sort, Sort),
    Nothing(Sort),
    Just(Sort),
    /// A boxed primitive, used for primitives stored inside containers.
    Prim(PayloadType),
}

impl Head {
    pub fn name(&self) -> &str {
        match self {
            Head::Node(k) => &k.name,
            Head::Nil(_) => "NilF",
            Head::Cons(_) => "ConsF",
            Head::Pair(..) => "PairF",
            Head::Nothing(_) => "NothingF",
            Head::Just(_) => "JustF",
            Head::Prim(p) => match p {
                PayloadType::Int => "IntF",
                PayloadType::Bool => "BoolF",
                PayloadType::String => "StringF",
            },
        }
    }

    pub fn kind(&self) -> Option<&Arc<NodeKind>> {
        match self {
            Head::Node(k) => Some(k),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("arity mismatch for {kind}: expected {expected_payloads} payloads and {expected_children} children, got {got_payloads} and {got_children}")]
    ArityMismatch {
        kind: String,
        expected_payloads: usize,
        expected_children: usize,
        got_payloads: usize,
        got_children: usize,
    },
    #[error("payload {position} of {kind} must be {expected:?}, got {actual:?}")]
    PayloadMismatch { kind: String, position: usize, expected: PayloadType, actual: PayloadType },
    #[error("child {position} of {kind} must have sort {expected}, got {actual}")]
    SortMismatch { kind: String, position: usize, expected: Sort, actual: Sort },
    #[error("unknown kind {0}")]
    UnknownKind(String),
    #[error("term of sort {0} is not a list")]
    NotAListTerm(Sort),
    #[error("term of sort {0} is not an option")]
    NotAnOptionTerm(Sort),
}

struct TermData {
    head: Head,
    payloads: Vec<Payload>,
    children: Vec<Term>,
    sort: Sort,
}

/// An immutable, well-sorted term. Cloning is cheap.
#[derive(Clone)]
pub struct Term(Arc<TermData>);

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.head == other.0.head
                && self.0.payloads == other.0.payloads
                && self.0.children == other.0.children)
    }
}

impl Eq for Term {}

fn check_children(kind: &str, expected: &[Sort], children: &[Term]) -> Result<(), TermError> {
    for (i, (s, c)) in expected.iter().zip(children).enumerate() {
        if c.sort() != s {
            return Err(TermError::SortMismatch {
                kind: kind.to_string(),
                position: i,
                expected: s.clone(),
                actual: c.sort().clone(),
            });
        }
    }
    Ok(())
}

impl Term {
    fn raw(head: Head, payloads: Vec<Payload>, children: Vec<Term>, sort: Sort) -> Term {
        Term(Arc::new(TermData { head, payloads, children, sort }))
    }

    /// Build a node of a declared kind, checking payloads and child sorts.
    pub fn new(kind: &Arc<NodeKind>, payloads: Vec<Payload>, children: Vec<Term>) -> Result<Term, TermError> {
        if payloads.len() != kind.payloads.len() || children.len() != kind.child_sorts.len() {
            return Err(TermError::ArityMismatch {
                kind: kind.name.clone(),
                expected_payloads: kind.payloads.len(),
                expected_children: kind.child_sorts.len(),
                got_payloads: payloads.len(),
                got_children: children.len(),
            });
        }
        for (i, (ty, p)) in kind.payloads.iter().zip(&payloads).enumerate() {
            if p.ty() != *ty {
                return Err(TermError::PayloadMismatch {
                    kind: kind.name.clone(),
                    position: i,
                    expected: *ty,
                    actual: p.ty(),
                });
            }
        }
        check_children(&kind.name, &kind.child_sorts, &children)?;
        Ok(Term::raw(Head::Node(kind.clone()), payloads, children, kind.produced.clone()))
    }

    pub fn nil(elem: Sort) -> Term {
        let sort = Sort::list_of(elem.clone());
        Term::raw(Head::Nil(elem), vec![], vec![], sort)
    }

    pub fn cons(elem: Sort, head: Term, tail: Term) -> Result<Term, TermError> {
        let sort = Sort::list_of(elem.clone());
        check_children("ConsF", &[elem.clone(), sort.clone()], &[head.clone(), tail.clone()])?;
        Ok(Term::raw(Head::Cons(elem), vec![], vec![head, tail], sort))
    }

    pub fn pair(first: Term, second: Term) -> Term {
        let (a, b) = (first.sort().clone(), second.sort().clone());
        let sort = Sort::pair_of(a.clone(), b.clone());
        Term::raw(Head::Pair(a, b), vec![], vec![first, second], sort)
    }

    pub fn nothing(elem: Sort) -> Term {
        let sort = Sort::option_of(elem.clone());
        Term::raw(Head::Nothing(elem), vec![], vec![], sort)
    }

    pub fn just(elem: Sort, value: Term) -> Result<Term, TermError> {
        check_children("JustF", std::slice::from_ref(&elem), std::slice::from_ref(&value))?;
        let sort = Sort::option_of(elem.clone());
        Ok(Term::raw(Head::Just(elem), vec![], vec![value], sort))
    }

    pub fn prim(value: Payload) -> Term {
        let ty = value.ty();
        Term::raw(Head::Prim(ty), vec![value], vec![], Sort::primitive(ty))
    }

    pub fn head(&self) -> &Head {
        &self.0.head
    }

    pub fn kind(&self) -> Option<&Arc<NodeKind>> {
        self.0.head.kind()
    }

    /// Name of the head: the kind name or the container constructor name.
    pub fn name(&self) -> &str {
        self.0.head.name()
    }

    pub fn is(&self, kind_name: &str) -> bool {
        matches!(&self.0.head, Head::Node(k) if k.name == kind_name)
    }

    pub fn sort(&self) -> &Sort {
        &self.0.sort
    }

    pub fn payloads(&self) -> &[Payload] {
        &self.0.payloads
    }

    pub fn payload(&self, i: usize) -> &Payload {
        &self.0.payloads[i]
    }

    pub fn children(&self) -> &[Term] {
        &self.0.children
    }

    pub fn child(&self, i: usize) -> &Term {
        &self.0.children[i]
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Same head and payloads, new children (sorts re-checked).
    pub fn with_children(&self, children: Vec<Term>) -> Result<Term, TermError> {
        if children.len() != self.0.children.len() {
            return Err(TermError::ArityMismatch {
                kind: self.name().to_string(),
                expected_payloads: self.0.payloads.len(),
                expected_children: self.0.children.len(),
                got_payloads: self.0.payloads.len(),
                got_children: children.len(),
            });
        }
        if children.iter().zip(&self.0.children).all(|(a, b)| a.ptr_eq(b)) {
            return Ok(self.clone());
        }
        let expected: Vec<Sort> = self.0.children.iter().map(|c| c.sort().clone()).collect();
        check_children(self.name(), &expected, &children)?;
        Ok(Term::raw(self.0.head.clone(), self.0.payloads.clone(), children, self.0.sort.clone()))
    }

    pub fn with_child(&self, i: usize, child: Term) -> Result<Term, TermError> {
        let mut cs = self.0.children.clone();
        cs[i] = child;
        self.with_children(cs)
    }

    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in path {
            cur = cur.0.children.get(i)?;
        }
        Some(cur)
    }

    /// Replace the subterm at `path`; the replacement must keep the sort.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Result<Term, TermError> {
        match path.split_first() {
            None => {
                if new.sort() != self.sort() {
                    return Err(TermError::SortMismatch {
                        kind: self.name().to_string(),
                        position: 0,
                        expected: self.sort().clone(),
                        actual: new.sort().clone(),
                    });
                }
                Ok(new)
            }
            Some((&i, rest)) => {
                let child = self.0.children.get(i).ok_or_else(|| TermError::ArityMismatch {
                    kind: self.name().to_string(),
                    expected_payloads: self.0.payloads.len(),
                    expected_children: self.0.children.len(),
                    got_payloads: self.0.payloads.len(),
                    got_children: i + 1,
                })?;
                let replaced = child.replace_at(rest, new)?;
                self.with_child(i, replaced)
            }
        }
    }

    pub fn size(&self) -> usize {
        1 + self.0.children.iter().map(Term::size).sum::<usize>()
    }

    /// Pre-order visit of every subterm.
    pub fn for_each(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for c in &self.0.children {
            c.for_each(f);
        }
    }

    /// The parenthesized debug form `(Kind payload* child*)`.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(&mut out).expect("writing to a String cannot fail");
        out
    }

    fn write_sexpr(&self, out: &mut String) -> fmt::Result {
        use fmt::Write;
        out.push('(');
        out.push_str(self.name());
        for p in &self.0.payloads {
            write!(out, " {p}")?;
        }
        for c in &self.0.children {
            out.push(' ');
            c.write_sexpr(out)?;
        }
        out.push(')');
        Ok(())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

/// Returns the payloads and children of `term` iff its kind is `kind`.
pub fn project<'a>(term: &'a Term, kind: &NodeKind) -> Option<(&'a [Payload], &'a [Term])> {
    match term.head() {
        Head::Node(k) if k.name == kind.name && **k == *kind => Some((term.payloads(), term.children())),
        _ => None,
    }
}

pub fn extract_list(term: &Term) -> Result<Vec<Term>, TermError> {
    if term.sort().list_elem().is_none() {
        return Err(TermError::NotAListTerm(term.sort().clone()));
    }
    let mut items = Vec::new();
    let mut cur = term;
    loop {
        match cur.head() {
            Head::Nil(_) => return Ok(items),
            Head::Cons(_) => {
                items.push(cur.child(0).clone());
                cur = cur.child(1);
            }
            // A list-sorted term with a user kind at the spine is not a plain list.
            _ => return Err(TermError::NotAListTerm(cur.sort().clone())),
        }
    }
}

pub fn build_list(elem: &Sort, items: impl IntoIterator<Item = Term>) -> Result<Term, TermError> {
    let items: Vec<Term> = items.into_iter().collect();
    let mut acc = Term::nil(elem.clone());
    for item in items.into_iter().rev() {
        acc = Term::cons(elem.clone(), item, acc)?;
    }
    Ok(acc)
}

pub fn map_list(f: impl Fn(&Term) -> Term, term: &Term) -> Result<Term, TermError> {
    let elem = term.sort().list_elem().ok_or_else(|| TermError::NotAListTerm(term.sort().clone()))?.clone();
    let items = extract_list(term)?;
    build_list(&elem, items.iter().map(f))
}

pub fn extract_option(term: &Term) -> Result<Option<Term>, TermError> {
    match term.head() {
        Head::Nothing(_) => Ok(None),
        Head::Just(_) => Ok(Some(term.child(0).clone())),
        _ => Err(TermError::NotAnOptionTerm(term.sort().clone())),
    }
}

/// A named set of node kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    kinds: BTreeMap<String, Arc<NodeKind>>,
}

impl Signature {
    pub fn new(name: impl Into<String>, kinds: impl IntoIterator<Item = Arc<NodeKind>>) -> Signature {
        Signature { name: name.into(), kinds: kinds.into_iter().map(|k| (k.name.clone(), k)).collect() }
    }

    pub fn kind(&self, name: &str) -> Option<&Arc<NodeKind>> {
        self.kinds.get(name)
    }

    pub fn kinds(&self) -> impl Iterator<Item = &Arc<NodeKind>> {
        self.kinds.values()
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn contains(&self, kind: &NodeKind) -> bool {
        self.kinds.get(&kind.name).is_some_and(|k| **k == *kind)
    }

    /// Build a node by kind name.
    pub fn mk(&self, name: &str, payloads: Vec<Payload>, children: Vec<Term>) -> Result<Term, TermError> {
        let kind = self.kind(name).ok_or_else(|| TermError::UnknownKind(name.to_string()))?;
        Term::new(kind, payloads, children)
    }

    pub fn produced_sorts(&self) -> BTreeSet<Sort> {
        self.kinds.values().map(|k| k.produced.clone()).collect()
    }

    /// Atomic sorts used in child positions that no kind produces.
    pub fn frontier_sorts(&self) -> BTreeSet<Sort> {
        let produced = self.produced_sorts();
        let mut used = BTreeSet::new();
        for k in self.kinds.values() {
            for s in &k.child_sorts {
                s.atoms(&mut used);
            }
        }
        for p in [PayloadType::Int, PayloadType::Bool, PayloadType::String] {
            used.remove(&Sort::primitive(p));
        }
        used.difference(&produced).cloned().collect()
    }

    /// Checks that every node of `term` uses a kind of this signature.
    pub fn check_term(&self, term: &Term) -> Result<(), TermError> {
        let mut err = None;
        term.for_each(&mut |t| {
            if err.is_none() {
                if let Head::Node(k) = t.head() {
                    if !self.contains(k) {
                        err = Some(TermError::UnknownKind(k.name.clone()));
                    }
                }
            }
        });
        err.map_or(Ok(()), Err)
    }
}

/// Recomputes the well-sortedness of a term from scratch.
pub fn is_well_sorted(term: &Term) -> bool {
    let ok_here = match term.head() {
        Head::Node(k) => {
            k.child_sorts.len() == term.children().len()
                && k.payloads.len() == term.payloads().len()
                && k.payloads.iter().zip(term.payloads()).all(|(t, p)| p.ty() == *t)
                && k.child_sorts.iter().zip(term.children()).all(|(s, c)| c.sort() == s)
                && *term.sort() == k.produced
        }
        Head::Nil(e) => term.children().is_empty() && *term.sort() == Sort::list_of(e.clone()),
        Head::Cons(e) => {
            term.children().len() == 2
                && term.child(0).sort() == e
                && *term.child(1).sort() == Sort::list_of(e.clone())
                && *term.sort() == Sort::list_of(e.clone())
        }
        Head::Pair(a, b) => {
            term.children().len() == 2
                && term.child(0).sort() == a
                && term.child(1).sort() == b
                && *term.sort() == Sort::pair_of(a.clone(), b.clone())
        }
        Head::Nothing(e) => term.children().is_empty() && *term.sort() == Sort::option_of(e.clone()),
        Head::Just(e) => {
            term.children().len() == 1 && term.child(0).sort() == e && *term.sort() == Sort::option_of(e.clone())
        }
        Head::Prim(p) => term.payloads().len() == 1 && term.payload(0).ty() == *p,
    };
    ok_here && term.children().iter().all(is_well_sorted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(n: &str) -> Sort {
        Sort::atomic(n)
    }

    fn assign_kinds() -> Signature {
        Signature::new(
            "t",
            [
                NodeKind::new("AssignOpEquals", vec![], vec![], s("AssignOpL")),
                NodeKind::new("Assign", vec![], vec![s("LhsL"), s("AssignOpL"), s("RhsL")], s("AssignL")),
                NodeKind::new("Ident", vec![PayloadType::String], vec![], s("IdentL")),
                NodeKind::new("IdentIsLhs", vec![], vec![s("IdentL")], s("LhsL")),
                NodeKind::new("IdentIsRhs", vec![], vec![s("IdentL")], s("RhsL")),
            ],
        )
    }

    fn ident(sig: &Signature, n: &str) -> Term {
        sig.mk("Ident", vec![Payload::str(n)], vec![]).unwrap()
    }

    #[test]
    fn nullary_kind_has_its_sort() {
        let sig = assign_kinds();
        let t = sig.mk("AssignOpEquals", vec![], vec![]).unwrap();
        assert_eq!(*t.sort(), s("AssignOpL"));
    }

    #[test]
    fn assign_checks_child_sorts() {
        let sig = assign_kinds();
        let x = ident(&sig, "x");
        let lhs = sig.mk("IdentIsLhs", vec![], vec![x.clone()]).unwrap();
        let rhs = sig.mk("IdentIsRhs", vec![], vec![ident(&sig, "y")]).unwrap();
        let op = sig.mk("AssignOpEquals", vec![], vec![]).unwrap();
        let a = sig.mk("Assign", vec![], vec![lhs, op.clone(), rhs.clone()]).unwrap();
        assert_eq!(*a.sort(), s("AssignL"));
        assert_eq!(project(&a, sig.kind("Assign").unwrap()).unwrap().1.len(), 3);
        assert!(project(&x, sig.kind("Assign").unwrap()).is_none());

        let err = sig.mk("Assign", vec![], vec![x, op, rhs]).unwrap_err();
        assert_eq!(
            err,
            TermError::SortMismatch { kind: "Assign".into(), position: 0, expected: s("LhsL"), actual: s("IdentL") }
        );
    }

    #[test]
    fn arity_and_unknown_kind_errors() {
        let sig = assign_kinds();
        assert!(matches!(sig.mk("Assign", vec![], vec![]), Err(TermError::ArityMismatch { .. })));
        assert!(matches!(sig.mk("Ident", vec![Payload::Int(3)], vec![]), Err(TermError::PayloadMismatch { .. })));
        assert_eq!(sig.mk("Nope", vec![], vec![]), Err(TermError::UnknownKind("Nope".into())));
    }

    #[test]
    fn list_spines() {
        let sig = assign_kinds();
        let elem = s("IdentL");
        let nil = Term::nil(elem.clone());
        assert!(extract_list(&nil).unwrap().is_empty());
        let (a, b) = (ident(&sig, "a"), ident(&sig, "b"));
        let l = build_list(&elem, vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(l.to_sexpr(), r#"(ConsF (Ident "a") (ConsF (Ident "b") (NilF)))"#);
        assert_eq!(extract_list(&l).unwrap(), vec![a.clone(), b]);
        assert_eq!(build_list(&elem, vec![a.clone()]).unwrap().name(), "ConsF");
        assert!(matches!(extract_list(&a), Err(TermError::NotAListTerm(_))));
        assert!(matches!(build_list(&s("LhsL"), vec![a]), Err(TermError::SortMismatch { .. })));
    }

    #[test]
    fn map_list_identity_and_rewrite() {
        let sig = assign_kinds();
        let elem = s("IdentL");
        let l = build_list(&elem, ["p", "q"].map(|n| ident(&sig, n))).unwrap();
        assert_eq!(map_list(|t| t.clone(), &l).unwrap(), l);
        let renamed = map_list(|_| ident(&sig, "z"), &l).unwrap();
        assert_eq!(extract_list(&renamed).unwrap().len(), 2);
    }

    #[test]
    fn sexpr_quotes_strings() {
        let sig = assign_kinds();
        assert_eq!(ident(&sig, "a\"b").to_sexpr(), r#"(Ident "a\"b")"#);
        assert_eq!(Term::prim(Payload::Int(-3)).to_sexpr(), "(IntF -3)");
    }

    #[test]
    fn frontier_records_unproduced_sorts() {
        let sig = Signature::new("f", [NodeKind::new("Wrap", vec![], vec![Sort::list_of(s("Open"))], s("W"))]);
        assert_eq!(sig.frontier_sorts().into_iter().collect::<Vec<_>>(), vec![s("Open")]);
    }

    #[test]
    fn replace_at_keeps_sorts() {
        let sig = assign_kinds();
        let l = build_list(&s("IdentL"), ["a", "b"].map(|n| ident(&sig, n))).unwrap();
        let r = l.replace_at(&[1, 0], ident(&sig, "c")).unwrap();
        assert_eq!(extract_list(&r).unwrap()[1], ident(&sig, "c"));
        assert!(l.replace_at(&[1], ident(&sig, "c")).is_err());
    }

    fn arb_kind() -> impl Strategy<Value = Arc<NodeKind>> {
        let sorts = prop::sample::select(vec!["A", "B", "C"]);
        (
            "[A-Z][a-z]{0,5}",
            prop::collection::vec(
                prop::sample::select(vec![PayloadType::Int, PayloadType::Bool, PayloadType::String]),
                0..3,
            ),
            prop::collection::vec(sorts.clone(), 0..3),
            sorts,
        )
            .prop_map(|(n, p, c, r)| NodeKind::new(n, p, c.into_iter().map(s).collect(), s(r)))
    }

    fn leaf_for(sort: &Sort) -> Term {
        let k = NodeKind::new(format!("Leaf{sort}"), vec![], vec![], sort.clone());
        Term::new(&k, vec![], vec![]).unwrap()
    }

    fn payload_for(ty: PayloadType, seed: i64) -> Payload {
        match ty {
            PayloadType::Int => Payload::Int(seed),
            PayloadType::Bool => Payload::Bool(seed % 2 == 0),
            PayloadType::String => Payload::str(&format!("s{seed}")),
        }
    }

    proptest! {
        #[test]
        fn project_inverts_construction(kind in arb_kind(), seed in any::<i64>()) {
            let payloads: Vec<Payload> = kind.payloads.iter().map(|t| payload_for(*t, seed)).collect();
            let children: Vec<Term> = kind.child_sorts.iter().map(leaf_for).collect();
            let t = Term::new(&kind, payloads.clone(), children.clone()).unwrap();
            prop_assert!(is_well_sorted(&t));
            let (p, c) = project(&t, &kind).unwrap();
            prop_assert_eq!(p, &payloads[..]);
            prop_assert_eq!(c, &children[..]);
        }

        #[test]
        fn list_roundtrip(names in prop::collection::vec("[a-z]{1,4}", 0..20)) {
            let sig = assign_kinds();
            let items: Vec<Term> = names.iter().map(|n| ident(&sig, n)).collect();
            let l = build_list(&s("IdentL"), items.clone()).unwrap();
            prop_assert!(is_well_sorted(&l));
            // independent spine walk
            let mut n = 0;
            let mut cur = l.clone();
            while cur.name() == "ConsF" { n += 1; cur = cur.child(1).clone(); }
            prop_assert_eq!(n, items.len());
            prop_assert_eq!(extract_list(&l).unwrap(), items);
            prop_assert_eq!(build_list(&s("IdentL"), extract_list(&l).unwrap()).unwrap(), l.clone());
            let mapped = map_list(|t| t.clone(), &l).unwrap();
            prop_assert_eq!(extract_list(&mapped).unwrap().len(), names.len());
        }

        #[test]
        fn equality_is_an_equivalence(a in "[a-c]", b in "[a-c]", c in "[a-c]") {
            let sig = assign_kinds();
            let (x, y, z) = (ident(&sig, &a), ident(&sig, &b), ident(&sig, &c));
            prop_assert!(x == x.clone());
            prop_assert_eq!(x == y, y == x);
            if x == y && y == z { prop_assert!(x == z); }
        }
    }
}
