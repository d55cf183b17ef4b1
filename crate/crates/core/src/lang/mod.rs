//! The three mini-language frontends and the machinery that turns each
//! modularized language into its incremental parametric syntax (IPS): the
//! modularized kinds with some replaced by generic fragments.

pub mod minic;
pub mod minijs;
pub mod minilua;
pub mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::fragments::{self, generic, LanguageOps, OpsError, RESERVED_SORTS};
use crate::injections::{InjectionDecl, InjectionError, InjectionTable, Wrapper};
use crate::modularizer::{
    identify_sorts, modularize_schema, sorts_of, sum_signatures, GenericValue, ModularizeError, ModularizedLanguage,
    Schema,
};
use crate::term::{Head, NodeKind, Payload, PayloadType, Signature, Sort, Term, TermError};

pub use syntax::{Dialect, ParseError};

pub type Path = Vec<usize>;

pub fn join(base: &[usize], rel: &[usize]) -> Path {
    base.iter().chain(rel).copied().collect()
}

/// Path of element `i` inside a cons list rooted at `list`.
pub fn list_elem_path(list: &[usize], i: usize) -> Path {
    let mut p = list.to_vec();
    p.extend(std::iter::repeat_n(1, i));
    p.push(0);
    p
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IpsError {
    #[error("term has no rendering in {lang}: {detail}")]
    UnrepresentableTerm { lang: String, detail: String },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Modularize(#[from] ModularizeError),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RegistrationError {
    #[error("schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Modularize(#[from] ModularizeError),
    #[error(transparent)]
    Injection(#[from] InjectionError),
    #[error("generated sort {0} collides with a reserved generic sort")]
    ReservedSortCollision(Sort),
    #[error("sort {0} is used but never produced")]
    UnproducedSort(Sort),
    #[error("unknown kind {0} in registration")]
    UnknownKind(String),
}

/// Control-flow shape of a block item. Paths are relative to the item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtShape {
    Plain,
    Return,
    Break,
    Continue,
    Nested {
        block: Path,
    },
    IfChain {
        arms: Vec<(Path, Path)>,
        els: Option<Path>,
    },
    While {
        cond: Path,
        body: Path,
    },
    For {
        init: Option<Path>,
        cond: Option<Path>,
        step: Option<Path>,
        body: Path,
    },
    /// A counted loop whose bounds are evaluated once, before the first
    /// iteration.
    CountedFor {
        body: Path,
    },
}

impl StmtShape {
    pub fn is_loop(&self) -> bool {
        matches!(self, StmtShape::While { .. } | StmtShape::For { .. } | StmtShape::CountedFor { .. })
    }

    /// Blocks nested directly in the statement, in source order.
    pub fn blocks(&self) -> Vec<Path> {
        match self {
            StmtShape::Nested { block } => vec![block.clone()],
            StmtShape::IfChain { arms, els } => {
                arms.iter().map(|(_, b)| b.clone()).chain(els.iter().cloned()).collect()
            }
            StmtShape::While { body, .. } | StmtShape::For { body, .. } | StmtShape::CountedFor { body } => {
                vec![body.clone()]
            }
            _ => vec![],
        }
    }
}

/// How the three-address-code pass sees an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprClass {
    /// Literal or variable.
    Atom,
    /// Operator whose operands sit at the given relative paths.
    Op(Vec<Path>),
    ShortCircuit {
        and: bool,
    },
    /// Assignment used as an expression.
    Assign {
        target: Path,
        value: Path,
    },
    /// Not an expression this pass understands.
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotRole {
    /// A whole expression: may stay an operator with atomic operands.
    Top,
    /// A store target.
    Target,
}

/// Hooks needed by the three-address-code pass.
pub trait TacHooks: Send + Sync {
    fn classify(&self, lang: &LanguageDef, e: &Term) -> ExprClass;
    /// Expression positions of a non-control item, in evaluation order.
    fn item_slots(&self, lang: &LanguageDef, item: &Term) -> Vec<(Path, SlotRole)>;
    fn var_expr(&self, lang: &LanguageDef, name: &str) -> Result<Term, IpsError>;
    fn not_expr(&self, lang: &LanguageDef, e: Term) -> Result<Term, IpsError>;
    fn assign_item(&self, lang: &LanguageDef, name: &str, value: Term) -> Result<Term, IpsError>;
    fn if_item(&self, lang: &LanguageDef, cond: Term, then: Vec<Term>) -> Result<Term, IpsError>;
    /// Declares the given names, uninitialized.
    fn temp_decl(&self, lang: &LanguageDef, names: &[String]) -> Result<Term, IpsError>;
    /// Rewrites an if chain so that arm `k` moves into a nested `if` in
    /// the else branch of arm `k - 1`.
    fn split_if_chain(&self, lang: &LanguageDef, item: &Term, k: usize) -> Result<Term, IpsError>;
}

/// Per-language behavior.
pub trait Frontend: Send + Sync {
    fn parse(&self, src: &str) -> Result<GenericValue, ParseError>;
    fn pretty(&self, ast: &GenericValue) -> String;
    /// Translates one modularized node whose children are already in IPS
    /// form; `None` keeps the node as is.
    fn trans_node(
        &self,
        lang: &LanguageDef,
        kind: &str,
        payloads: &[Payload],
        kids: &[Term],
    ) -> Result<Option<Term>, IpsError>;
    /// Translates an IPS node back; `None` falls through to the default
    /// same-name rebuild.
    fn untrans_node(&self, lang: &LanguageDef, t: &Term) -> Result<Option<Term>, IpsError>;
    fn var_init_to_rhs(&self, lang: &LanguageDef, common: &Term, attrs: &Term, init: &Term) -> Result<Term, OpsError>;
    fn var_decl_binder_to_lhs(&self, lang: &LanguageDef, binder: &Term) -> Result<Term, OpsError>;
    fn stmt_shape(&self, lang: &LanguageDef, item: &Term) -> StmtShape;
    /// Function names and body block paths of a program term.
    fn functions(&self, lang: &LanguageDef, program: &Term) -> Vec<(String, Path)>;
    /// Left-hand side `<coverage array>[i]`.
    fn cov_lhs(&self, lang: &LanguageDef, i: usize) -> Result<Term, IpsError>;
    /// Right-hand side `true`.
    fn true_rhs(&self, lang: &LanguageDef) -> Result<Term, IpsError>;
    /// Removes the init and step expressions from a C-style `for`.
    fn clear_for_header(&self, lang: &LanguageDef, item: &Term) -> Result<Term, IpsError>;
    /// Expression-statement wrapping a call, for languages where only calls
    /// are statements; defaults to the declared injection.
    fn expr_item(&self, lang: &LanguageDef, e: Term) -> Result<Term, IpsError> {
        Ok(lang.injections.inj_f(e, &fragments::sort(fragments::BLOCK_ITEM_L))?)
    }
    fn is_short_circuit(&self, e: &Term) -> bool {
        e.name().ends_with(".Binary") && matches!(e.payload(0).as_str(), Some("&&" | "||"))
    }
    fn tac(&self) -> Option<&dyn TacHooks> {
        None
    }
}

impl From<InjectionError> for IpsError {
    fn from(e: InjectionError) -> Self {
        match e {
            InjectionError::Term(t) => IpsError::Term(t),
            other => IpsError::UnrepresentableTerm { lang: String::new(), detail: other.to_string() },
        }
    }
}

impl From<IpsError> for OpsError {
    fn from(e: IpsError) -> Self {
        match e {
            IpsError::Term(t) => OpsError::Term(t),
            other => OpsError::UnconvertibleInit(other.to_string()),
        }
    }
}

/// Everything known about one registered language.
pub struct LanguageDef {
    pub name: &'static str,
    pub key: &'static str,
    pub ext: &'static str,
    pub dialect: Dialect,
    pub modular: ModularizedLanguage,
    pub ips: Signature,
    pub injections: InjectionTable,
    rename: BTreeMap<Sort, Sort>,
    unrename: BTreeMap<Sort, Sort>,
    removed: BTreeSet<String>,
    pub frontend: Box<dyn Frontend>,
}

/// Registration recipe for a language.
pub struct LanguageSpec {
    pub name: &'static str,
    pub key: &'static str,
    pub ext: &'static str,
    pub dialect: Dialect,
    pub schema: &'static str,
    /// Modularized type names identified with generic sorts.
    pub identify: &'static [(&'static str, &'static str)],
    /// Modularized constructor names replaced by generic fragments.
    pub remove: &'static [&'static str],
    /// Generic kinds this language uses, by name.
    pub generic: &'static [&'static str],
    /// Extra language kinds: name, payloads, child sorts, produced sort.
    /// Sort names without a dot are generic; `Lang.X` names are the
    /// language's own; `[S]` denotes a list.
    pub extra: &'static [(&'static str, &'static [PayloadType], &'static [&'static str], &'static str)],
    /// Declared injections as (from, to, chain of kind names).
    pub injections: &'static [(&'static str, &'static str, &'static [&'static str])],
    /// Compositions (a, b, c) to derive.
    pub compose: &'static [(&'static str, &'static str, &'static str)],
}

pub fn parse_sort(s: &str) -> Sort {
    if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        Sort::list_of(parse_sort(inner))
    } else {
        match s {
            "Int" => Sort::primitive(PayloadType::Int),
            "Bool" => Sort::primitive(PayloadType::Bool),
            "String" => Sort::primitive(PayloadType::String),
            _ => Sort::atomic(s),
        }
    }
}

impl LanguageDef {
    pub fn register(spec: &LanguageSpec, frontend: Box<dyn Frontend>) -> Result<LanguageDef, RegistrationError> {
        let schema = Schema::parse(spec.name, spec.schema).map_err(|e| RegistrationError::Schema(e.to_string()))?;
        let modular = modularize_schema(&schema)?;
        let reserved: BTreeSet<Sort> = RESERVED_SORTS.iter().map(|s| fragments::sort(s)).collect();
        for s in sorts_of(&modular.signature) {
            if reserved.contains(&s) {
                return Err(RegistrationError::ReservedSortCollision(s));
            }
        }
        let rename: BTreeMap<Sort, Sort> =
            spec.identify.iter().map(|(ty, g)| (modular.sort(ty).clone(), fragments::sort(g))).collect();
        let unrename = rename.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        let renamed = identify_sorts(&modular.signature, &rename);
        let removed: Vec<String> = spec.remove.iter().map(|c| modular.kind_name(c)).collect();
        let removed_refs: Vec<&str> = removed.iter().map(|s| s.as_str()).collect();
        let g = generic();
        let mut plus: Vec<Arc<NodeKind>> = Vec::new();
        for name in spec.generic {
            let k = g
                .all()
                .into_iter()
                .find(|k| k.name == *name)
                .ok_or_else(|| RegistrationError::UnknownKind(name.to_string()))?;
            plus.push(k);
        }
        for (name, payloads, kids, produced) in spec.extra {
            plus.push(NodeKind::new(
                format!("{}.{}", spec.name, name),
                payloads.to_vec(),
                kids.iter().map(|s| parse_sort(s)).collect(),
                parse_sort(produced),
            ));
        }
        let ips = sum_signatures(spec.name, &[&renamed], &removed_refs, &plus)?;
        if let Some(s) = ips.frontier_sorts().into_iter().next() {
            return Err(RegistrationError::UnproducedSort(s));
        }
        let mut injections = InjectionTable::new();
        for (from, to, chain) in spec.injections {
            let mut path = Vec::new();
            for k in chain.iter() {
                let kind = ips.kind(k).ok_or_else(|| RegistrationError::UnknownKind(k.to_string()))?;
                path.push(default_wrapper(kind)?);
            }
            injections.declare(&ips, InjectionDecl::new(parse_sort(from), parse_sort(to), path))?;
        }
        for (a, b, c) in spec.compose {
            injections.compose(&parse_sort(a), &parse_sort(b), &parse_sort(c))?;
        }
        Ok(LanguageDef {
            name: spec.name,
            key: spec.key,
            ext: spec.ext,
            dialect: spec.dialect,
            modular,
            ips,
            injections,
            rename,
            unrename,
            removed: removed.into_iter().collect(),
            frontend,
        })
    }

    /// Builds an IPS node by kind name.
    pub fn mk(&self, name: &str, payloads: Vec<Payload>, kids: Vec<Term>) -> Result<Term, TermError> {
        self.ips.mk(name, payloads, kids)
    }

    /// Builds a language kind, `Lang.<name>`, of the IPS signature.
    pub fn mkl(&self, name: &str, payloads: Vec<Payload>, kids: Vec<Term>) -> Result<Term, TermError> {
        self.ips.mk(&format!("{}.{}", self.name, name), payloads, kids)
    }

    /// Builds a modularized node, `Lang.<name>`.
    pub fn mk_mod(&self, name: &str, payloads: Vec<Payload>, kids: Vec<Term>) -> Result<Term, TermError> {
        self.modular.signature.mk(&format!("{}.{}", self.name, name), payloads, kids)
    }

    pub fn is(&self, t: &Term, name: &str) -> bool {
        t.name().strip_prefix(self.name).and_then(|r| r.strip_prefix('.')) == Some(name)
    }

    pub fn ips_sort(&self, s: &Sort) -> Sort {
        s.rename(&self.rename)
    }

    pub fn unrepresentable(&self, detail: impl Into<String>) -> IpsError {
        IpsError::UnrepresentableTerm { lang: self.name.to_string(), detail: detail.into() }
    }

    pub fn parse(&self, src: &str) -> Result<GenericValue, ParseError> {
        self.frontend.parse(src)
    }

    pub fn pretty(&self, ast: &GenericValue) -> String {
        self.frontend.pretty(ast)
    }

    /// Modularized term to IPS term.
    pub fn trans_ips(&self, t: &Term) -> Result<Term, IpsError> {
        let kids = t.children().iter().map(|c| self.trans_ips(c)).collect::<Result<Vec<_>, _>>()?;
        match t.head() {
            Head::Node(k) => {
                if let Some(out) = self.frontend.trans_node(self, &k.name, t.payloads(), &kids)? {
                    return Ok(out);
                }
                if self.removed.contains(&k.name) {
                    return Err(self.unrepresentable(format!("no translation for {}", k.name)));
                }
                Ok(self.ips.mk(&k.name, t.payloads().to_vec(), kids)?)
            }
            Head::Nil(e) => Ok(Term::nil(self.ips_sort(e))),
            Head::Cons(e) => Ok(Term::cons(self.ips_sort(e), kids[0].clone(), kids[1].clone())?),
            Head::Pair(..) => Ok(Term::pair(kids[0].clone(), kids[1].clone())),
            _ => Ok(t.clone()),
        }
    }

    /// IPS term back to the modularized term.
    pub fn untrans_ips(&self, t: &Term) -> Result<Term, IpsError> {
        if let Some(out) = self.frontend.untrans_node(self, t)? {
            return Ok(out);
        }
        match t.head() {
            Head::Node(k) => {
                if self.removed.contains(&k.name) {
                    return Err(self.unrepresentable(k.name.clone()));
                }
                let kind = self
                    .modular
                    .signature
                    .kind(&k.name)
                    .ok_or_else(|| self.unrepresentable(format!("{} outside the language", k.name)))?
                    .clone();
                let kids = self.untrans_children(t)?;
                Ok(Term::new(&kind, t.payloads().to_vec(), kids)?)
            }
            Head::Nil(e) => Ok(Term::nil(e.rename(&self.unrename))),
            Head::Cons(e) => {
                let kids = self.untrans_children(t)?;
                Ok(Term::cons(e.rename(&self.unrename), kids[0].clone(), kids[1].clone())?)
            }
            Head::Pair(..) => {
                let kids = self.untrans_children(t)?;
                Ok(Term::pair(kids[0].clone(), kids[1].clone()))
            }
            _ => Ok(t.clone()),
        }
    }

    pub fn untrans_children(&self, t: &Term) -> Result<Vec<Term>, IpsError> {
        t.children().iter().map(|c| self.untrans_ips(c)).collect()
    }

    pub fn decompose(&self, ast: &GenericValue) -> Result<Term, IpsError> {
        self.trans_ips(&self.modular.to_modular(ast)?)
    }

    pub fn recompose(&self, t: &Term) -> Result<GenericValue, IpsError> {
        Ok(self.modular.from_modular(&self.untrans_ips(t)?)?)
    }

    pub fn stmt_shape(&self, item: &Term) -> StmtShape {
        self.frontend.stmt_shape(self, item)
    }
}

impl LanguageOps for LanguageDef {
    fn var_init_to_rhs(&self, common: &Term, attrs: &Term, init: &Term) -> Result<Term, OpsError> {
        self.frontend.var_init_to_rhs(self, common, attrs, init)
    }

    fn var_decl_binder_to_lhs(&self, binder: &Term) -> Result<Term, OpsError> {
        self.frontend.var_decl_binder_to_lhs(self, binder)
    }
}

/// A wrapper for a chain link: the wrapped child is the only child whose
/// sort cannot be filled with a nullary default.
fn default_wrapper(kind: &Arc<NodeKind>) -> Result<Wrapper, RegistrationError> {
    if kind.child_sorts.len() == 1 && kind.payloads.is_empty() {
        return Ok(Wrapper::unary(kind));
    }
    let payloads = kind
        .payloads
        .iter()
        .map(|p| match p {
            PayloadType::Int => Payload::Int(0),
            PayloadType::Bool => Payload::Bool(false),
            PayloadType::String => Payload::str(""),
        })
        .collect();
    // Lists are filled with the empty list; the wrapped position is the
    // single non-list child.
    let wrapped = kind
        .child_sorts
        .iter()
        .position(|s| s.list_elem().is_none())
        .ok_or_else(|| RegistrationError::UnknownKind(kind.name.clone()))?;
    let fill = kind
        .child_sorts
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != wrapped)
        .map(|(_, s)| Term::nil(s.list_elem().expect("non-wrapped children are lists").clone()))
        .collect();
    Ok(Wrapper::with_fill(kind, wrapped, fill, payloads))
}

/// All registered languages, in a fixed order.
pub fn languages() -> &'static [LanguageDef] {
    static LANGS: OnceLock<Vec<LanguageDef>> = OnceLock::new();
    LANGS.get_or_init(|| {
        vec![
            LanguageDef::register(&minic::SPEC, Box::new(minic::MiniC)).expect("MiniC registers"),
            LanguageDef::register(&minijs::SPEC, Box::new(minijs::MiniJs)).expect("MiniJS registers"),
            LanguageDef::register(&minilua::SPEC, Box::new(minilua::MiniLua)).expect("MiniLua registers"),
        ]
    })
}

/// Looks a language up by key (`minic`, `minijs`, `minilua`) or name.
pub fn language(key: &str) -> Option<&'static LanguageDef> {
    languages().iter().find(|l| l.key == key || l.name.eq_ignore_ascii_case(key))
}

/// Shorthand used by the frontends for nullary generic kinds.
pub(crate) fn gleaf(name: &str) -> Term {
    let g = generic();
    let k = g.all().into_iter().find(|k| k.name == name).expect("generic kind");
    g.leaf(&k)
}
