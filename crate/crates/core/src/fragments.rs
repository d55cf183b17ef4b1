//! Shared generic node kinds and the per-language operations that the
//! generic transformations rely on.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::term::{NodeKind, Payload, PayloadType, Signature, Sort, Term, TermError};

pub const IDENT_L: &str = "IdentL";
pub const ASSIGN_L: &str = "AssignL";
pub const LHS_L: &str = "LhsL";
pub const RHS_L: &str = "RhsL";
pub const ASSIGN_OP_L: &str = "AssignOpL";
pub const BLOCK_L: &str = "BlockL";
pub const BLOCK_ITEM_L: &str = "BlockItemL";
pub const BLOCK_END_L: &str = "BlockEndL";
pub const MULTI_DECL_L: &str = "MultiLocalVarDeclL";
pub const SINGLE_DECL_L: &str = "SingleLocalVarDeclL";
pub const LOCAL_INIT_L: &str = "LocalVarInitL";
pub const OPT_INIT_L: &str = "OptLocalVarInitL";
pub const COMMON_ATTRS_L: &str = "MultiLocalVarDeclCommonAttrsL";
pub const DECL_ATTRS_L: &str = "LocalVarDeclAttrsL";
pub const BINDER_L: &str = "VarDeclBinderL";

/// Every sort owned by the generic fragments.
pub const RESERVED_SORTS: [&str; 15] = [
    IDENT_L,
    ASSIGN_L,
    LHS_L,
    RHS_L,
    ASSIGN_OP_L,
    BLOCK_L,
    BLOCK_ITEM_L,
    BLOCK_END_L,
    MULTI_DECL_L,
    SINGLE_DECL_L,
    LOCAL_INIT_L,
    OPT_INIT_L,
    COMMON_ATTRS_L,
    DECL_ATTRS_L,
    BINDER_L,
];

pub fn sort(name: &str) -> Sort {
    Sort::atomic(name)
}

/// The generic kinds. Languages without declaration attributes use the two
/// empty attribute kinds.
pub struct GenericFragments {
    pub ident: Arc<NodeKind>,
    pub assign: Arc<NodeKind>,
    pub assign_op_equals: Arc<NodeKind>,
    pub block: Arc<NodeKind>,
    pub empty_block_end: Arc<NodeKind>,
    pub multi_decl: Arc<NodeKind>,
    pub single_decl: Arc<NodeKind>,
    pub just_init: Arc<NodeKind>,
    pub no_init: Arc<NodeKind>,
    pub empty_common_attrs: Arc<NodeKind>,
    pub empty_decl_attrs: Arc<NodeKind>,
    pub ident_is_binder: Arc<NodeKind>,
}

pub fn generic() -> &'static GenericFragments {
    static G: OnceLock<GenericFragments> = OnceLock::new();
    G.get_or_init(|| {
        let s = sort;
        GenericFragments {
            ident: NodeKind::new("Ident", vec![PayloadType::String], vec![], s(IDENT_L)),
            assign: NodeKind::new("Assign", vec![], vec![s(LHS_L), s(ASSIGN_OP_L), s(RHS_L)], s(ASSIGN_L)),
            assign_op_equals: NodeKind::new("AssignOpEquals", vec![], vec![], s(ASSIGN_OP_L)),
            block: NodeKind::new("Block", vec![], vec![Sort::list_of(s(BLOCK_ITEM_L)), s(BLOCK_END_L)], s(BLOCK_L)),
            empty_block_end: NodeKind::new("EmptyBlockEnd", vec![], vec![], s(BLOCK_END_L)),
            multi_decl: NodeKind::new(
                "MultiLocalVarDecl",
                vec![],
                vec![s(COMMON_ATTRS_L), Sort::list_of(s(SINGLE_DECL_L))],
                s(MULTI_DECL_L),
            ),
            single_decl: NodeKind::new(
                "SingleLocalVarDecl",
                vec![],
                vec![s(DECL_ATTRS_L), s(BINDER_L), s(OPT_INIT_L)],
                s(SINGLE_DECL_L),
            ),
            just_init: NodeKind::new("JustLocalVarInit", vec![], vec![s(LOCAL_INIT_L)], s(OPT_INIT_L)),
            no_init: NodeKind::new("NoLocalVarInit", vec![], vec![], s(OPT_INIT_L)),
            empty_common_attrs: NodeKind::new("EmptyCommonAttrs", vec![], vec![], s(COMMON_ATTRS_L)),
            empty_decl_attrs: NodeKind::new("EmptyDeclAttrs", vec![], vec![], s(DECL_ATTRS_L)),
            ident_is_binder: NodeKind::new("IdentIsVarDeclBinder", vec![], vec![s(IDENT_L)], s(BINDER_L)),
        }
    })
}

impl GenericFragments {
    pub fn all(&self) -> Vec<Arc<NodeKind>> {
        vec![
            self.ident.clone(),
            self.assign.clone(),
            self.assign_op_equals.clone(),
            self.block.clone(),
            self.empty_block_end.clone(),
            self.multi_decl.clone(),
            self.single_decl.clone(),
            self.just_init.clone(),
            self.no_init.clone(),
            self.empty_common_attrs.clone(),
            self.empty_decl_attrs.clone(),
            self.ident_is_binder.clone(),
        ]
    }

    pub fn signature(&self) -> Signature {
        Signature::new("Generic", self.all())
    }

    pub fn mk_ident(&self, name: &str) -> Term {
        Term::new(&self.ident, vec![Payload::str(name)], vec![]).expect("ident is well-formed")
    }

    pub fn mk_assign(&self, lhs: Term, rhs: Term) -> Result<Term, TermError> {
        let op = Term::new(&self.assign_op_equals, vec![], vec![])?;
        Term::new(&self.assign, vec![], vec![lhs, op, rhs])
    }

    pub fn mk_block(&self, items: Vec<Term>) -> Result<Term, TermError> {
        let list = crate::term::build_list(&sort(BLOCK_ITEM_L), items)?;
        Term::new(&self.block, vec![], vec![list, Term::new(&self.empty_block_end, vec![], vec![])?])
    }

    pub fn leaf(&self, kind: &Arc<NodeKind>) -> Term {
        Term::new(kind, vec![], vec![]).expect("nullary generic kind")
    }
}

/// Name carried by a generic `Ident` term.
pub fn ident_name(t: &Term) -> Option<&str> {
    if t.is("Ident") {
        t.payload(0).as_str()
    } else {
        None
    }
}

/// All identifier names occurring in a term.
pub fn collect_names(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    t.for_each(&mut |n| {
        if let Some(s) = ident_name(n) {
            out.insert(s.to_string());
        }
    });
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OpsError {
    #[error("initializer has no expression form: {0}")]
    UnconvertibleInit(String),
    #[error("unexpected binder shape: {0}")]
    UnexpectedBinder(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// Language-specific conversions needed to turn declarations into
/// assignments.
pub trait LanguageOps: Send + Sync {
    /// Right-hand side equivalent to a declaration initializer.
    fn var_init_to_rhs(&self, common_attrs: &Term, decl_attrs: &Term, init: &Term) -> Result<Term, OpsError>;
    /// L-value naming the variables a binder binds, in order.
    fn var_decl_binder_to_lhs(&self, binder: &Term) -> Result<Term, OpsError>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_kinds_produce_reserved_sorts() {
        let g = generic();
        let reserved: BTreeSet<Sort> = RESERVED_SORTS.iter().map(|s| sort(s)).collect();
        for k in g.all() {
            assert!(reserved.contains(&k.produced), "{}", k.name);
        }
        assert_eq!(g.signature().len(), 12);
    }

    #[test]
    fn block_has_explicit_end() {
        let g = generic();
        let b = g.mk_block(vec![]).unwrap();
        assert_eq!(b.to_sexpr(), "(Block (NilF) (EmptyBlockEnd))");
        assert_eq!(*b.sort(), sort(BLOCK_L));
    }

    #[test]
    fn assign_shape() {
        let g = generic();
        let lhs_kind = NodeKind::new("L", vec![], vec![sort(IDENT_L)], sort(LHS_L));
        let rhs_kind = NodeKind::new("R", vec![], vec![sort(IDENT_L)], sort(RHS_L));
        let a = g
            .mk_assign(
                Term::new(&lhs_kind, vec![], vec![g.mk_ident("x")]).unwrap(),
                Term::new(&rhs_kind, vec![], vec![g.mk_ident("y")]).unwrap(),
            )
            .unwrap();
        assert_eq!(*a.sort(), sort(ASSIGN_L));
        assert_eq!(collect_names(&a).into_iter().collect::<Vec<_>>(), ["x", "y"]);
    }
}
