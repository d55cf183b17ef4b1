//! Turns a family of datatype definitions into a sum-of-signatures
//! representation: one sort per datatype, one node kind per constructor,
//! and the two translations between values and terms.

mod schema;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use schema::{
    validate_schema, ConstructorDecl, Kind, Schema, SchemaParseError, SchemaType, TypeDef, TypeExpr, ValidationReport,
    Violation, ViolationKind,
};

use crate::term::{build_list, extract_list, Head, NodeKind, Payload, PayloadType, Signature, Sort, Term, TermError};

/// A neutral encoding of a value of the original datatypes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum GenericValue {
    Int(i64),
    Bool(bool),
    Str(String),
    Ctor(String, Vec<GenericValue>),
    List(Vec<GenericValue>),
    Pair(Box<GenericValue>, Box<GenericValue>),
}

impl GenericValue {
    pub fn ctor(name: &str, args: Vec<GenericValue>) -> GenericValue {
        GenericValue::Ctor(name.to_string(), args)
    }

    pub fn leaf(name: &str) -> GenericValue {
        GenericValue::Ctor(name.to_string(), Vec::new())
    }

    pub fn str(s: &str) -> GenericValue {
        GenericValue::Str(s.to_string())
    }

    pub fn pair(a: GenericValue, b: GenericValue) -> GenericValue {
        GenericValue::Pair(Box::new(a), Box::new(b))
    }

    /// Constructor name and arguments, if this is a constructor value.
    pub fn as_ctor(&self) -> Option<(&str, &[GenericValue])> {
        match self {
            GenericValue::Ctor(n, a) => Some((n, a)),
            _ => None,
        }
    }

    pub fn ctor_name(&self) -> &str {
        match self {
            GenericValue::Ctor(n, _) => n,
            _ => "",
        }
    }

    pub fn args(&self) -> &[GenericValue] {
        match self {
            GenericValue::Ctor(_, a) => a,
            _ => &[],
        }
    }

    pub fn arg(&self, i: usize) -> &GenericValue {
        &self.args()[i]
    }

    pub fn as_list(&self) -> &[GenericValue] {
        match self {
            GenericValue::List(v) => v,
            _ => &[],
        }
    }

    pub fn as_int(&self) -> i64 {
        match self {
            GenericValue::Int(i) => *i,
            _ => 0,
        }
    }

    pub fn as_bool(&self) -> bool {
        matches!(self, GenericValue::Bool(true))
    }

    pub fn as_str(&self) -> &str {
        match self {
            GenericValue::Str(s) => s,
            _ => "",
        }
    }

    pub fn as_pair(&self) -> Option<(&GenericValue, &GenericValue)> {
        match self {
            GenericValue::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl fmt::Debug for GenericValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenericValue::Int(i) => write!(f, "{i}"),
            GenericValue::Bool(b) => write!(f, "{b}"),
            GenericValue::Str(s) => write!(f, "{s:?}"),
            GenericValue::Ctor(n, args) => {
                if args.is_empty() {
                    return f.write_str(n);
                }
                write!(f, "({n}")?;
                for a in args {
                    write!(f, " {a:?}")?;
                }
                f.write_str(")")
            }
            GenericValue::List(items) => f.debug_list().entries(items).finish(),
            GenericValue::Pair(a, b) => write!(f, "<{a:?}, {b:?}>"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModularizeError {
    #[error("invalid schema: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidSchema(Vec<Violation>),
    #[error("value does not conform to the schema: {0}")]
    NonConformingValue(String),
    #[error("term uses kind {0} outside the modularized signature")]
    ForeignKind(String),
    #[error("kind {0} appears twice")]
    DuplicateKind(String),
    #[error("cannot remove kind {0}: not present")]
    RemovedKindNotPresent(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

struct CtorInfo {
    type_name: String,
    args: Vec<SchemaType>,
    kind: Arc<NodeKind>,
}

/// The output of [`modularize_schema`].
pub struct ModularizedLanguage {
    pub schema: Schema,
    pub signature: Signature,
    /// The label sort of each datatype.
    pub sort_of: BTreeMap<String, Sort>,
    /// Kinds generated for each datatype.
    pub fragment_of: BTreeMap<String, Vec<Arc<NodeKind>>>,
    ctors: BTreeMap<String, CtorInfo>,
    by_kind: BTreeMap<String, String>,
}

impl ModularizedLanguage {
    pub fn kind_name(&self, ctor: &str) -> String {
        format!("{}.{}", self.schema.name, ctor)
    }

    /// Sort of a datatype, e.g. `Calc.AtomL` for `Atom`.
    pub fn sort(&self, type_name: &str) -> &Sort {
        &self.sort_of[type_name]
    }

    pub fn root_sort(&self) -> &Sort {
        self.sort(&self.schema.root)
    }

    /// The sort that a schema argument type translates to.
    pub fn translate_type(&self, t: &SchemaType) -> Sort {
        match t {
            SchemaType::Prim(p) => Sort::primitive(*p),
            SchemaType::Named(n) => self.sort_of[n].clone(),
            SchemaType::List(e) => Sort::list_of(self.translate_type(e)),
            SchemaType::Pair(a, b) => Sort::pair_of(self.translate_type(a), self.translate_type(b)),
        }
    }

    /// Deterministic textual listing of sorts and kinds.
    pub fn dump(&self) -> String {
        let mut out = format!("schema {} (root {})\n", self.schema.name, self.schema.root);
        for t in &self.schema.types {
            out.push_str(&format!("sort {}\n", self.sort_of[&t.name]));
        }
        for t in &self.schema.types {
            for k in &self.fragment_of[&t.name] {
                out.push_str(&format!("kind {k}\n"));
            }
        }
        out
    }

    /// Encodes a conforming value as a term.
    pub fn to_modular(&self, value: &GenericValue) -> Result<Term, ModularizeError> {
        let (name, _) = value
            .as_ctor()
            .ok_or_else(|| ModularizeError::NonConformingValue(format!("{value:?} is not a constructor")))?;
        let info = self
            .ctors
            .get(name)
            .ok_or_else(|| ModularizeError::NonConformingValue(format!("unknown constructor {name}")))?;
        self.encode(value, &SchemaType::Named(info.type_name.clone()))
    }

    fn encode(&self, value: &GenericValue, ty: &SchemaType) -> Result<Term, ModularizeError> {
        let bad = || ModularizeError::NonConformingValue(format!("{value:?} is not a {ty}"));
        match (ty, value) {
            (SchemaType::Prim(PayloadType::Int), GenericValue::Int(i)) => Ok(Term::prim(Payload::Int(*i))),
            (SchemaType::Prim(PayloadType::Bool), GenericValue::Bool(b)) => Ok(Term::prim(Payload::Bool(*b))),
            (SchemaType::Prim(PayloadType::String), GenericValue::Str(s)) => Ok(Term::prim(Payload::str(s))),
            (SchemaType::List(elem), GenericValue::List(items)) => {
                let terms = items.iter().map(|v| self.encode(v, elem)).collect::<Result<Vec<_>, _>>()?;
                Ok(build_list(&self.translate_type(elem), terms)?)
            }
            (SchemaType::Pair(a, b), GenericValue::Pair(x, y)) => {
                Ok(Term::pair(self.encode(x, a)?, self.encode(y, b)?))
            }
            (SchemaType::Named(tn), GenericValue::Ctor(cn, args)) => {
                let info = self.ctors.get(cn).ok_or_else(bad)?;
                if &info.type_name != tn || info.args.len() != args.len() {
                    return Err(bad());
                }
                let mut payloads = Vec::new();
                let mut children = Vec::new();
                for (t, v) in info.args.iter().zip(args) {
                    match (t, v) {
                        (SchemaType::Prim(PayloadType::Int), GenericValue::Int(i)) => payloads.push(Payload::Int(*i)),
                        (SchemaType::Prim(PayloadType::Bool), GenericValue::Bool(b)) => {
                            payloads.push(Payload::Bool(*b))
                        }
                        (SchemaType::Prim(PayloadType::String), GenericValue::Str(s)) => payloads.push(Payload::str(s)),
                        (SchemaType::Prim(_), _) => return Err(bad()),
                        _ => children.push(self.encode(v, t)?),
                    }
                }
                Ok(Term::new(&info.kind, payloads, children)?)
            }
            _ => Err(bad()),
        }
    }

    /// Decodes a term built from this language's signature.
    pub fn from_modular(&self, term: &Term) -> Result<GenericValue, ModularizeError> {
        match term.head() {
            Head::Prim(_) => Ok(match term.payload(0) {
                Payload::Int(i) => GenericValue::Int(*i),
                Payload::Bool(b) => GenericValue::Bool(*b),
                Payload::Str(s) => GenericValue::Str(s.to_string()),
            }),
            Head::Nil(_) | Head::Cons(_) => Ok(GenericValue::List(
                extract_list(term)?.iter().map(|t| self.from_modular(t)).collect::<Result<_, _>>()?,
            )),
            Head::Pair(..) => {
                Ok(GenericValue::pair(self.from_modular(term.child(0))?, self.from_modular(term.child(1))?))
            }
            Head::Nothing(_) | Head::Just(_) => Err(ModularizeError::ForeignKind(term.name().to_string())),
            Head::Node(k) => {
                let ctor = self
                    .by_kind
                    .get(&k.name)
                    .filter(|_| self.signature.contains(k))
                    .ok_or_else(|| ModularizeError::ForeignKind(k.name.clone()))?;
                let info = &self.ctors[ctor];
                let mut payloads = term.payloads().iter();
                let mut children = term.children().iter();
                let mut args = Vec::with_capacity(info.args.len());
                for t in &info.args {
                    args.push(match t {
                        SchemaType::Prim(_) => match payloads.next().expect("arity checked at construction") {
                            Payload::Int(i) => GenericValue::Int(*i),
                            Payload::Bool(b) => GenericValue::Bool(*b),
                            Payload::Str(s) => GenericValue::Str(s.to_string()),
                        },
                        _ => self.from_modular(children.next().expect("arity checked at construction"))?,
                    });
                }
                Ok(GenericValue::Ctor(ctor.clone(), args))
            }
        }
    }
}

/// Generates one sort per datatype and one kind per constructor.
pub fn modularize_schema(schema: &Schema) -> Result<ModularizedLanguage, ModularizeError> {
    let report = validate_schema(schema);
    if !report.is_valid() {
        return Err(ModularizeError::InvalidSchema(report.violations));
    }
    let sort_of: BTreeMap<String, Sort> =
        schema.types.iter().map(|t| (t.name.clone(), Sort::atomic(&format!("{}.{}L", schema.name, t.name)))).collect();
    let mut lang = ModularizedLanguage {
        schema: schema.clone(),
        signature: Signature::new(schema.name.clone(), []),
        sort_of,
        fragment_of: BTreeMap::new(),
        ctors: BTreeMap::new(),
        by_kind: BTreeMap::new(),
    };
    let mut all = Vec::new();
    for t in &schema.types {
        let mut frag = Vec::new();
        for c in &t.ctors {
            let args: Vec<SchemaType> =
                c.args.iter().map(|a| a.to_schema_type().expect("validated schema types are well-formed")).collect();
            let payloads = args
                .iter()
                .filter_map(|a| match a {
                    SchemaType::Prim(p) => Some(*p),
                    _ => None,
                })
                .collect();
            let child_sorts =
                args.iter().filter(|a| !matches!(a, SchemaType::Prim(_))).map(|a| lang.translate_type(a)).collect();
            let kind = NodeKind::new(lang.kind_name(&c.name), payloads, child_sorts, lang.sort_of[&t.name].clone());
            lang.by_kind.insert(kind.name.clone(), c.name.clone());
            lang.ctors.insert(c.name.clone(), CtorInfo { type_name: t.name.clone(), args, kind: kind.clone() });
            frag.push(kind.clone());
            all.push(kind);
        }
        lang.fragment_of.insert(t.name.clone(), frag);
    }
    lang.signature = Signature::new(schema.name.clone(), all);
    Ok(lang)
}

/// Sums signatures, removing and adding kinds by name.
pub fn sum_signatures(
    name: &str,
    parts: &[&Signature],
    minus: &[&str],
    plus: &[Arc<NodeKind>],
) -> Result<Signature, ModularizeError> {
    let mut kinds: BTreeMap<String, Arc<NodeKind>> = BTreeMap::new();
    for part in parts {
        for k in part.kinds() {
            match kinds.get(&k.name) {
                Some(existing) if existing != k => return Err(ModularizeError::DuplicateKind(k.name.clone())),
                _ => {
                    kinds.insert(k.name.clone(), k.clone());
                }
            }
        }
    }
    for m in minus {
        if kinds.remove(*m).is_none() {
            return Err(ModularizeError::RemovedKindNotPresent(m.to_string()));
        }
    }
    for k in plus {
        if kinds.insert(k.name.clone(), k.clone()).is_some() {
            return Err(ModularizeError::DuplicateKind(k.name.clone()));
        }
    }
    Ok(Signature::new(name, kinds.into_values()))
}

/// Renames sorts throughout a signature, identifying a language's sort with
/// a shared one (for example its block-item sort with the generic one).
pub fn identify_sorts(sig: &Signature, map: &BTreeMap<Sort, Sort>) -> Signature {
    Signature::new(sig.name.clone(), sig.kinds().map(|k| Arc::new(k.rename_sorts(map))))
}

/// Sorts that appear in a signature's kinds, for disjointness checks.
pub fn sorts_of(sig: &Signature) -> BTreeSet<Sort> {
    let mut out = BTreeSet::new();
    for k in sig.kinds() {
        k.produced.atoms(&mut out);
        for s in &k.child_sorts {
            s.atoms(&mut out);
        }
    }
    out
}
