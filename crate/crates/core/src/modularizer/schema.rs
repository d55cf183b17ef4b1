//! Families of mutually recursive algebraic datatypes and their kinding.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::term::PayloadType;

/// A base type as written in a constructor signature, before kinding.
///
/// Application is explicit so that ill-kinded types such as `List Int Int`
/// or `Int Bool` can be represented and rejected.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Prim(PayloadType),
    Con(String),
    Var(String),
    List,
    Pair,
    App(Box<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn con(name: &str) -> TypeExpr {
        TypeExpr::Con(name.to_string())
    }

    pub fn app(f: TypeExpr, arg: TypeExpr) -> TypeExpr {
        TypeExpr::App(Box::new(f), Box::new(arg))
    }

    pub fn list(elem: TypeExpr) -> TypeExpr {
        TypeExpr::app(TypeExpr::List, elem)
    }

    pub fn pair(a: TypeExpr, b: TypeExpr) -> TypeExpr {
        TypeExpr::app(TypeExpr::app(TypeExpr::Pair, a), b)
    }

    /// The kinded form, if this expression is one of the shapes a schema
    /// type may take.
    pub fn to_schema_type(&self) -> Option<SchemaType> {
        match self {
            TypeExpr::Prim(p) => Some(SchemaType::Prim(*p)),
            TypeExpr::Con(n) => Some(SchemaType::Named(n.clone())),
            TypeExpr::App(f, a) => match &**f {
                TypeExpr::List => Some(SchemaType::List(Box::new(a.to_schema_type()?))),
                TypeExpr::App(g, x) if **g == TypeExpr::Pair => {
                    Some(SchemaType::Pair(Box::new(x.to_schema_type()?), Box::new(a.to_schema_type()?)))
                }
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = self.to_schema_type() {
            return write!(f, "{t}");
        }
        match self {
            TypeExpr::Prim(p) => f.write_str(p.name()),
            TypeExpr::Con(n) | TypeExpr::Var(n) => f.write_str(n),
            TypeExpr::List => f.write_str("List"),
            TypeExpr::Pair => f.write_str("Pair"),
            TypeExpr::App(a, b) => write!(f, "({a} {b})"),
        }
    }
}

/// A well-kinded argument type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SchemaType {
    Prim(PayloadType),
    Named(String),
    List(Box<SchemaType>),
    Pair(Box<SchemaType>, Box<SchemaType>),
}

impl SchemaType {
    pub fn named(n: &str) -> SchemaType {
        SchemaType::Named(n.to_string())
    }

    pub fn list(t: SchemaType) -> SchemaType {
        SchemaType::List(Box::new(t))
    }

    pub fn pair(a: SchemaType, b: SchemaType) -> SchemaType {
        SchemaType::Pair(Box::new(a), Box::new(b))
    }

    pub fn to_expr(&self) -> TypeExpr {
        match self {
            SchemaType::Prim(p) => TypeExpr::Prim(*p),
            SchemaType::Named(n) => TypeExpr::con(n),
            SchemaType::List(t) => TypeExpr::list(t.to_expr()),
            SchemaType::Pair(a, b) => TypeExpr::pair(a.to_expr(), b.to_expr()),
        }
    }
}

impl fmt::Display for SchemaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaType::Prim(p) => f.write_str(p.name()),
            SchemaType::Named(n) => f.write_str(n),
            SchemaType::List(t) => write!(f, "[{t}]"),
            SchemaType::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructorDecl {
    pub name: String,
    pub args: Vec<TypeExpr>,
}

impl ConstructorDecl {
    pub fn new(name: &str, args: Vec<SchemaType>) -> ConstructorDecl {
        ConstructorDecl { name: name.to_string(), args: args.iter().map(SchemaType::to_expr).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDef {
    pub name: String,
    pub ctors: Vec<ConstructorDecl>,
}

/// A family of datatype definitions; the first definition is the root
/// unless stated otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub name: String,
    pub types: Vec<TypeDef>,
    pub root: String,
}

impl Schema {
    pub fn new(name: &str, types: Vec<TypeDef>) -> Schema {
        let root = types.first().map(|t| t.name.clone()).unwrap_or_default();
        Schema { name: name.to_string(), types, root }
    }

    pub fn type_def(&self, name: &str) -> Option<&TypeDef> {
        self.types.iter().find(|t| t.name == name)
    }

    pub fn ctor_count(&self) -> usize {
        self.types.iter().map(|t| t.ctors.len()).sum()
    }

    /// Parses the line-oriented `type Name = Ctor args | ...` format.
    pub fn parse(name: &str, text: &str) -> Result<Schema, SchemaParseError> {
        let mut types = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| SchemaParseError { line: lineno + 1, message: msg.to_string() };
            let rest = line.strip_prefix("type ").ok_or_else(|| err("expected `type <Name> = ...`"))?;
            let (tname, body) = rest.split_once('=').ok_or_else(|| err("missing `=`"))?;
            let tname = tname.trim();
            if !is_upper_ident(tname) {
                return Err(err("type names must start with an uppercase letter"));
            }
            let mut ctors = Vec::new();
            for alt in split_top_level(body, '|') {
                let toks = tokenize_type(alt.trim()).map_err(|m| err(&m))?;
                let mut p = TypeParser { toks: &toks, pos: 0 };
                let cname = match p.next() {
                    Some(TypeTok::Name(n)) if is_upper_ident(&n) => n,
                    _ => return Err(err("expected a constructor name")),
                };
                let mut args = Vec::new();
                while p.peek().is_some() {
                    args.push(p.arg().map_err(|m| err(&m))?);
                }
                ctors.push(ConstructorDecl { name: cname, args });
            }
            types.push(TypeDef { name: tname.to_string(), ctors });
        }
        if types.is_empty() {
            return Err(SchemaParseError { line: 0, message: "schema defines no types".into() });
        }
        Ok(Schema::new(name, types))
    }

    /// Renders the schema back into the textual format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.types {
            out.push_str("type ");
            out.push_str(&t.name);
            out.push_str(" =");
            for (i, c) in t.ctors.iter().enumerate() {
                if i > 0 {
                    out.push_str(" |");
                }
                out.push(' ');
                out.push_str(&c.name);
                for a in &c.args {
                    out.push(' ');
                    out.push_str(&a.to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

fn is_upper_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_uppercase()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

#[derive(Clone, Debug, PartialEq)]
enum TypeTok {
    Name(String),
    Sym(char),
}

fn tokenize_type(s: &str) -> Result<Vec<TypeTok>, String> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if "[](),".contains(c) {
            out.push(TypeTok::Sym(c));
            chars.next();
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let mut n = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    n.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(TypeTok::Name(n));
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

struct TypeParser<'a> {
    toks: &'a [TypeTok],
    pos: usize,
}

impl TypeParser<'_> {
    fn peek(&self) -> Option<&TypeTok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<TypeTok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        match self.next() {
            Some(TypeTok::Sym(d)) if d == c => Ok(()),
            other => Err(format!("expected `{c}`, found {other:?}")),
        }
    }

    fn arg(&mut self) -> Result<TypeExpr, String> {
        match self.next() {
            Some(TypeTok::Name(n)) => Ok(match n.as_str() {
                "Int" => TypeExpr::Prim(PayloadType::Int),
                "Bool" => TypeExpr::Prim(PayloadType::Bool),
                "String" => TypeExpr::Prim(PayloadType::String),
                _ if is_upper_ident(&n) => TypeExpr::Con(n),
                _ => TypeExpr::Var(n),
            }),
            Some(TypeTok::Sym('[')) => {
                let t = self.arg()?;
                self.expect(']')?;
                Ok(TypeExpr::list(t))
            }
            Some(TypeTok::Sym('(')) => {
                let a = self.arg()?;
                self.expect(',')?;
                let b = self.arg()?;
                self.expect(')')?;
                Ok(TypeExpr::pair(a, b))
            }
            other => Err(format!("expected an argument type, found {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("schema line {line}: {message}")]
pub struct SchemaParseError {
    pub line: usize,
    pub message: String,
}

/// Kinds of the base-type language: `*` and arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Star,
    Arrow(Box<Kind>, Box<Kind>),
}

impl Kind {
    fn arrow(a: Kind, b: Kind) -> Kind {
        Kind::Arrow(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Star => f.write_str("*"),
            Kind::Arrow(a, b) => match **a {
                Kind::Star => write!(f, "* -> {b}"),
                _ => write!(f, "({a}) -> {b}"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A type constructor or variable that is not in scope (rules CON, VAR).
    UnknownTypeName(String),
    /// A container applied to the wrong number of arguments, or a type of
    /// kind other than `*` in argument position (rules APP, ARR).
    BadArity {
        ty: String,
        kind: String,
    },
    /// A primitive used as a type function (rule PRIM).
    PrimitiveApplied(PayloadType),
    DuplicateConstructor(String),
    DuplicateType(String),
    UnknownRoot(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub ctor: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {:?}", self.rule, self.ctor, self.kind)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Local type variables and declared type constructors.
struct KindEnv<'a> {
    locals: BTreeMap<&'a str, Kind>,
    declared: BTreeSet<&'a str>,
}

impl KindEnv<'_> {
    fn kind_of(&self, t: &TypeExpr) -> Result<Kind, (&'static str, ViolationKind)> {
        match t {
            TypeExpr::Prim(_) => Ok(Kind::Star),
            TypeExpr::List => Ok(Kind::arrow(Kind::Star, Kind::Star)),
            TypeExpr::Pair => Ok(Kind::arrow(Kind::Star, Kind::arrow(Kind::Star, Kind::Star))),
            TypeExpr::Var(v) => {
                self.locals.get(v.as_str()).cloned().ok_or_else(|| ("VAR", ViolationKind::UnknownTypeName(v.clone())))
            }
            TypeExpr::Con(c) => {
                if self.declared.contains(c.as_str()) {
                    Ok(Kind::Star)
                } else {
                    Err(("CON", ViolationKind::UnknownTypeName(c.clone())))
                }
            }
            TypeExpr::App(f, a) => {
                if let TypeExpr::Prim(p) = **f {
                    return Err(("PRIM", ViolationKind::PrimitiveApplied(p)));
                }
                let fk = self.kind_of(f)?;
                let ak = self.kind_of(a)?;
                match fk {
                    Kind::Arrow(dom, cod) if *dom == ak => Ok(*cod),
                    other => Err(("APP", ViolationKind::BadArity { ty: t.to_string(), kind: other.to_string() })),
                }
            }
        }
    }
}

/// Checks every constructor argument kinds to `*`.
pub fn validate_schema(schema: &Schema) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen_types = BTreeSet::new();
    for t in &schema.types {
        if !seen_types.insert(t.name.as_str()) {
            report.violations.push(Violation {
                rule: "CON",
                ctor: t.name.clone(),
                kind: ViolationKind::DuplicateType(t.name.clone()),
            });
        }
    }
    if !seen_types.contains(schema.root.as_str()) {
        report.violations.push(Violation {
            rule: "CON",
            ctor: schema.root.clone(),
            kind: ViolationKind::UnknownRoot(schema.root.clone()),
        });
    }
    let env = KindEnv { locals: BTreeMap::new(), declared: seen_types };
    let mut seen_ctors = BTreeSet::new();
    for t in &schema.types {
        for c in &t.ctors {
            if !seen_ctors.insert(c.name.as_str()) {
                report.violations.push(Violation {
                    rule: "CON",
                    ctor: c.name.clone(),
                    kind: ViolationKind::DuplicateConstructor(c.name.clone()),
                });
            }
            for a in &c.args {
                match env.kind_of(a) {
                    Ok(Kind::Star) => {}
                    Ok(k) => report.violations.push(Violation {
                        rule: "ARR",
                        ctor: c.name.clone(),
                        kind: ViolationKind::BadArity { ty: a.to_string(), kind: k.to_string() },
                    }),
                    Err((rule, kind)) => report.violations.push(Violation { rule, ctor: c.name.clone(), kind }),
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    const CALC: &str = "\
# arithmetic
type Arith = Add Atom Atom
type Atom = Var String | Const Lit
type Lit = Lit Int
";

    #[test]
    fn parses_and_validates_calc() {
        let s = Schema::parse("Calc", CALC).unwrap();
        assert_eq!(s.types.len(), 3);
        assert_eq!(s.root, "Arith");
        assert_eq!(s.ctor_count(), 4);
        assert!(validate_schema(&s).is_valid());
        assert_eq!(Schema::parse("Calc", &s.to_text()).unwrap(), s);
    }

    #[test]
    fn unknown_type_name_is_reported() {
        let s = Schema::parse("X", "type T = A Undefined").unwrap();
        let r = validate_schema(&s);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].rule, "CON");
        assert_eq!(r.violations[0].kind, ViolationKind::UnknownTypeName("Undefined".into()));
    }

    #[test]
    fn nested_containers_are_valid() {
        let s = Schema::parse("X", "type T = A ([T], (Int,[Bool])) | B").unwrap();
        assert!(validate_schema(&s).is_valid());
    }

    #[test]
    fn bad_arity_and_primitive_application() {
        let mk = |arg: TypeExpr| {
            Schema::new(
                "X",
                vec![TypeDef { name: "T".into(), ctors: vec![ConstructorDecl { name: "A".into(), args: vec![arg] }] }],
            )
        };
        let int = TypeExpr::Prim(PayloadType::Int);
        // List needs exactly one argument
        let r = validate_schema(&mk(TypeExpr::List));
        assert!(matches!(r.violations[0].kind, ViolationKind::BadArity { .. }));
        assert_eq!(r.violations[0].rule, "ARR");
        let r = validate_schema(&mk(TypeExpr::app(TypeExpr::list(int.clone()), int.clone())));
        assert!(matches!(r.violations[0].kind, ViolationKind::BadArity { .. }));
        assert_eq!(r.violations[0].rule, "APP");
        // Pair needs two
        let r = validate_schema(&mk(TypeExpr::app(TypeExpr::Pair, int.clone())));
        assert!(matches!(r.violations[0].kind, ViolationKind::BadArity { .. }));
        let r = validate_schema(&mk(TypeExpr::app(TypeExpr::Prim(PayloadType::Bool), int.clone())));
        assert_eq!(r.violations[0].kind, ViolationKind::PrimitiveApplied(PayloadType::Bool));
        assert_eq!(r.violations[0].rule, "PRIM");
        let r = validate_schema(&mk(TypeExpr::Var("a".into())));
        assert_eq!(r.violations[0].rule, "VAR");
        // well-kinded counterparts
        assert!(validate_schema(&mk(TypeExpr::list(int.clone()))).is_valid());
        assert!(validate_schema(&mk(TypeExpr::pair(int.clone(), TypeExpr::con("T")))).is_valid());
    }

    #[test]
    fn duplicate_constructor_is_rejected() {
        let s = Schema::parse("X", "type T = A | B\ntype U = A Int").unwrap();
        let r = validate_schema(&s);
        assert_eq!(r.violations[0].kind, ViolationKind::DuplicateConstructor("A".into()));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = Schema::parse("X", "type T = A\nfoo").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(Schema::parse("X", "type T = A [Int").is_err());
    }
}
