//! Three-address code: every operator and call gets atomic operands, with
//! subexpressions bound to fresh temporaries in evaluation order.
//!
//! Short-circuit operators whose operands are not atoms become a guarded
//! assignment, so the right operand runs exactly when it did before. Loop
//! conditions that need a prelude get it recomputed at every entry to the
//! test.

use std::collections::BTreeSet;

use crate::flow::{block_items, detach_for, insert_at_loop_sites, with_items};
use crate::fragments::{collect_names, sort, MULTI_DECL_L};
use crate::lang::{ExprClass, IpsError, LanguageDef, Path, SlotRole, StmtShape, TacHooks};
use crate::term::{build_list, extract_list, Term};

use super::{Pass, TransformError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    /// Whole expression of a statement: may stay one operator.
    Top,
    /// Operand: must become a literal or variable.
    Atom,
    /// Store target: only its operands are atomized.
    Target,
}

impl From<SlotRole> for Role {
    fn from(r: SlotRole) -> Role {
        match r {
            SlotRole::Top => Role::Top,
            SlotRole::Target => Role::Target,
        }
    }
}

type Flat = (Vec<Term>, Term);

pub fn tac(term: &Term, lang: &LanguageDef) -> Result<Term, TransformError> {
    Pass::Tac.requirements().check(Pass::Tac, lang)?;
    let hooks = lang.frontend.tac().expect("checked by requirements");
    let avoid = collect_names(term);
    let mut out = term.clone();
    for (_, body) in lang.frontend.functions(lang, term) {
        let mut st = Tac { lang, hooks, avoid: &avoid, next: 0, temps: Vec::new() };
        let b = out.at(&body).ok_or_else(|| crate::flow::FlowError::InvalidPath(body.clone()))?;
        let mut b2 = st.block(b)?;
        if !st.temps.is_empty() {
            let mut items = vec![hooks.temp_decl(lang, &st.temps)?];
            items.extend(block_items(&b2)?);
            b2 = with_items(&b2, items)?;
        }
        out = out.replace_at(&body, b2)?;
    }
    Ok(out)
}

/// Operator and short-circuit nodes with a non-atomic operand, described.
/// Empty for languages without three-address-code hooks.
pub fn non_atomic_operands(term: &Term, lang: &LanguageDef) -> Vec<String> {
    let Some(hooks) = lang.frontend.tac() else { return vec![] };
    let atomic = |e: &Term| hooks.classify(lang, e) == ExprClass::Atom;
    let mut out = Vec::new();
    term.for_each(&mut |n| {
        let operands: Vec<Path> = match hooks.classify(lang, n) {
            ExprClass::Op(ps) => ps,
            ExprClass::ShortCircuit { .. } => vec![vec![0], vec![1]],
            _ => return,
        };
        for p in operands {
            if let Some(o) = n.at(&p) {
                if !atomic(o) {
                    out.push(format!("{} operand {:?}: {}", n.name(), p, o.to_sexpr()));
                }
            }
        }
    });
    out
}

struct Tac<'a> {
    lang: &'a LanguageDef,
    hooks: &'a dyn TacHooks,
    avoid: &'a BTreeSet<String>,
    next: usize,
    temps: Vec<String>,
}

/// What running a prelude may have changed.
struct Effects {
    assigned: BTreeSet<String>,
    calls: bool,
}

impl Effects {
    fn of(items: &[Term]) -> Effects {
        let mut e = Effects { assigned: BTreeSet::new(), calls: false };
        for it in items {
            it.for_each(&mut |n| {
                if n.is("Assign") {
                    e.assigned.extend(collect_names(n.child(0)));
                } else if n.name().ends_with(".Call") {
                    e.calls = true;
                }
            });
        }
        e
    }
}

impl Tac<'_> {
    fn fresh(&mut self) -> String {
        loop {
            let n = format!("__t{}", self.next);
            self.next += 1;
            if !self.avoid.contains(&n) {
                self.temps.push(n.clone());
                return n;
            }
        }
    }

    fn class(&self, e: &Term) -> ExprClass {
        self.hooks.classify(self.lang, e)
    }

    fn is_atom(&self, e: &Term) -> bool {
        self.class(e) == ExprClass::Atom
    }

    fn var(&self, name: &str) -> Result<Term, TransformError> {
        Ok(self.hooks.var_expr(self.lang, name)?)
    }

    /// Binds `e` to a fresh temporary, returning the temporary.
    fn bind(&mut self, e: Term, pre: &mut Vec<Term>) -> Result<Term, TransformError> {
        let t = self.fresh();
        pre.push(self.hooks.assign_item(self.lang, &t, e)?);
        self.var(&t)
    }

    /// Whether reading atom `e` after `fx` could see a different value than
    /// reading it before. Callees are assumed to leave temporaries alone.
    fn stale(&self, e: &Term, fx: &Effects) -> bool {
        self.is_atom(e)
            && collect_names(e).iter().any(|n| fx.assigned.contains(n) || (fx.calls && !self.temps.contains(n)))
    }

    fn needs_prelude(&mut self, e: &Term, role: Role) -> Result<bool, TransformError> {
        let (next, ntemps) = (self.next, self.temps.len());
        let (pre, _) = self.flatten(e, role)?;
        self.next = next;
        self.temps.truncate(ntemps);
        Ok(!pre.is_empty())
    }

    fn flatten(&mut self, e: &Term, role: Role) -> Result<Flat, TransformError> {
        let class = self.class(e);
        if role == Role::Target {
            return match class {
                ExprClass::Op(paths) => self.seq(e, paths.into_iter().map(|p| (p, Role::Atom)).collect()),
                _ => Ok((vec![], e.clone())),
            };
        }
        match class {
            ExprClass::Atom | ExprClass::Other => Ok((vec![], e.clone())),
            ExprClass::Op(paths) => {
                let (mut pre, e2) = self.seq(e, paths.into_iter().map(|p| (p, Role::Atom)).collect())?;
                if role == Role::Atom {
                    let v = self.bind(e2, &mut pre)?;
                    return Ok((pre, v));
                }
                Ok((pre, e2))
            }
            ExprClass::ShortCircuit { and } => {
                let (l, r) = (e.child(0), e.child(1));
                if self.is_atom(l) && self.is_atom(r) {
                    let mut pre = Vec::new();
                    if role == Role::Atom {
                        let v = self.bind(e.clone(), &mut pre)?;
                        return Ok((pre, v));
                    }
                    return Ok((pre, e.clone()));
                }
                let (mut pre, l2) = self.flatten(l, Role::Top)?;
                let t = self.fresh();
                pre.push(self.hooks.assign_item(self.lang, &t, l2)?);
                let (mut then, r2) = self.flatten(r, Role::Top)?;
                then.push(self.hooks.assign_item(self.lang, &t, r2)?);
                let test = self.var(&t)?;
                let cond = if and { test } else { self.hooks.not_expr(self.lang, test)? };
                pre.push(self.hooks.if_item(self.lang, cond, then)?);
                Ok((pre, self.var(&t)?))
            }
            ExprClass::Assign { target, value } => {
                let v = e.at(&value).ok_or_else(|| IpsError::UnrepresentableTerm {
                    lang: self.lang.name.into(),
                    detail: format!("assignment without value at {value:?}"),
                })?;
                let vrole = if matches!(self.class(v), ExprClass::Assign { .. }) { Role::Atom } else { Role::Top };
                let (mut pre, e2) = self.seq(e, vec![(target, Role::Target), (value.clone(), vrole)])?;
                if role == Role::Top {
                    return Ok((pre, e2));
                }
                let v2 = e2.at(&value).expect("rebuilt in place").clone();
                let t = self.bind(v2, &mut pre)?;
                let stored = e2.replace_at(&value, t.clone())?;
                pre.push(self.lang.frontend.expr_item(self.lang, stored)?);
                Ok((pre, t))
            }
        }
    }

    /// Flattens the subterms of `e` at `slots` left to right. When a later
    /// slot needs a prelude, earlier results that the prelude could
    /// invalidate or reorder are first saved in temporaries.
    fn seq(&mut self, e: &Term, slots: Vec<(Path, Role)>) -> Result<Flat, TransformError> {
        let mut pre = Vec::new();
        let mut outs: Vec<(Path, Role, Term)> = Vec::new();
        for (p, role) in slots {
            let sub = e.at(&p).ok_or_else(|| crate::flow::FlowError::InvalidPath(p.clone()))?.clone();
            let (pk, ek) = self.flatten(&sub, role)?;
            if !pk.is_empty() {
                let fx = Effects::of(&pk);
                for (_, r, out) in outs.iter_mut() {
                    *out = self.protect(out.clone(), *r, &fx, &mut pre)?;
                }
                pre.extend(pk);
            }
            outs.push((p, role, ek));
        }
        let mut e2 = e.clone();
        for (p, _, o) in outs {
            e2 = e2.replace_at(&p, o)?;
        }
        Ok((pre, e2))
    }

    fn protect(&mut self, out: Term, role: Role, fx: &Effects, pre: &mut Vec<Term>) -> Result<Term, TransformError> {
        if role == Role::Target {
            let ExprClass::Op(paths) = self.class(&out) else { return Ok(out) };
            let mut t = out;
            for p in paths {
                let o = t.at(&p).expect("operand path").clone();
                if self.stale(&o, fx) {
                    let v = self.bind(o, pre)?;
                    t = t.replace_at(&p, v)?;
                }
            }
            return Ok(t);
        }
        if !self.is_atom(&out) || self.stale(&out, fx) {
            return self.bind(out, pre);
        }
        Ok(out)
    }

    fn block(&mut self, b: &Term) -> Result<Term, TransformError> {
        let mut out = Vec::new();
        for it in block_items(b)? {
            out.extend(self.item(&it)?);
        }
        Ok(with_items(b, out)?)
    }

    fn blocks_of(&mut self, item: Term) -> Result<Term, TransformError> {
        let mut it = item;
        for p in self.lang.stmt_shape(&it).blocks() {
            let b = self.block(it.at(&p).expect("shape path"))?;
            it = it.replace_at(&p, b)?;
        }
        Ok(it)
    }

    fn slots(&self, item: &Term) -> Vec<(Path, Role)> {
        self.hooks.item_slots(self.lang, item).into_iter().map(|(p, r)| (p, r.into())).collect()
    }

    fn item(&mut self, it: &Term) -> Result<Vec<Term>, TransformError> {
        let at = |p: &Path| it.at(p).expect("shape path");
        match self.lang.stmt_shape(it) {
            StmtShape::IfChain { arms, .. } => {
                for (k, (cond, _)) in arms.iter().enumerate().skip(1) {
                    if self.needs_prelude(at(cond), Role::Top)? {
                        let split = self.hooks.split_if_chain(self.lang, it, k)?;
                        return self.item(&split);
                    }
                }
                let (mut pre, it2) = self.seq(it, vec![(arms[0].0.clone(), Role::Top)])?;
                pre.push(self.blocks_of(it2)?);
                Ok(pre)
            }
            StmtShape::While { cond, .. } => {
                let (mut pre, lp) = self.seq(it, vec![(cond, Role::Top)])?;
                let mut lp = self.blocks_of(lp)?;
                if !pre.is_empty() {
                    lp = insert_at_loop_sites(self.lang, &lp, &pre)?;
                }
                pre.push(lp);
                Ok(pre)
            }
            StmtShape::For { init, cond, step, .. } => {
                let mut need = false;
                for p in [&init, &cond, &step].into_iter().flatten() {
                    need |= self.needs_prelude(at(p), Role::Top)?;
                }
                if !need {
                    return Ok(vec![self.blocks_of(it.clone())?]);
                }
                let (init_items, lp, step_items) = detach_for(self.lang, it)?;
                let mut out = Vec::new();
                for i in &init_items {
                    out.extend(self.item(i)?);
                }
                let mut tail = Vec::new();
                for s in &step_items {
                    tail.extend(self.item(s)?);
                }
                let (p, lp) = match cond {
                    Some(c) => self.seq(&lp, vec![(c, Role::Top)])?,
                    None => (vec![], lp),
                };
                let mut lp = self.blocks_of(lp)?;
                tail.extend(p.iter().cloned());
                if !tail.is_empty() {
                    lp = insert_at_loop_sites(self.lang, &lp, &tail)?;
                }
                out.extend(p);
                out.push(lp);
                Ok(out)
            }
            StmtShape::CountedFor { .. } => {
                let (mut pre, it2) = self.seq(it, self.slots(it))?;
                pre.push(self.blocks_of(it2)?);
                Ok(pre)
            }
            StmtShape::Nested { .. } => Ok(vec![self.blocks_of(it.clone())?]),
            StmtShape::Plain | StmtShape::Return | StmtShape::Break | StmtShape::Continue => {
                if let Some(parts) = self.split_decl(it)? {
                    let mut out = Vec::new();
                    for p in &parts {
                        out.extend(self.item(p)?);
                    }
                    return Ok(out);
                }
                let (mut pre, it2) = self.seq(it, self.slots(it))?;
                pre.push(it2);
                Ok(pre)
            }
        }
    }

    /// A declaration of several variables where a later initializer needs
    /// a prelude, split into one declaration per variable so that each
    /// prelude runs after the earlier initializations.
    fn split_decl(&mut self, it: &Term) -> Result<Option<Vec<Term>>, TransformError> {
        let decl_sort = sort(MULTI_DECL_L);
        let Some(d) = self.lang.injections.proj_f(it, &decl_sort).map_err(IpsError::from)? else {
            return Ok(None);
        };
        let singles = extract_list(d.child(1))?;
        if singles.len() < 2 {
            return Ok(None);
        }
        let mut need = false;
        for (p, r) in self.slots(it).into_iter().skip(1) {
            need |= self.needs_prelude(it.at(&p).expect("slot path"), r)?;
        }
        if !need {
            return Ok(None);
        }
        let elem = d.child(1).sort().list_elem().expect("list").clone();
        singles
            .into_iter()
            .map(|s| {
                let one = d.with_child(1, build_list(&elem, [s])?)?;
                Ok(self.lang.injections.inj_f(one, it.sort()).map_err(IpsError::from)?)
            })
            .collect::<Result<Vec<_>, TransformError>>()
            .map(Some)
    }
}
