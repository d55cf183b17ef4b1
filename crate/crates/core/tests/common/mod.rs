//! Generators and oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sortweave::flow::{basic_blocks, build_cfg, Cfg, CfgNodeKind};
use sortweave::harness::interp::{interpret, Event, DEFAULT_FUEL};
use sortweave::lang::LanguageDef;
use sortweave::modularizer::{ConstructorDecl, GenericValue as V, Schema, SchemaType, TypeDef};
use sortweave::term::{build_list, Payload, PayloadType, Signature, Sort, Term};
use sortweave::transforms::testcov;

const PRIMS: [PayloadType; 3] = [PayloadType::Int, PayloadType::Bool, PayloadType::String];

/// A schema of up to 6 types with up to 4 constructors each. The first
/// constructor of type `i` mentions only primitives, lists and types
/// before `i`, so every type has finite values.
pub fn random_schema(rng: &mut ChaCha8Rng, name: &str) -> Schema {
    let ntypes = rng.gen_range(1..=6);
    let names: Vec<String> = (0..ntypes).map(|i| format!("T{i}")).collect();
    let types = (0..ntypes)
        .map(|i| {
            let nctors = rng.gen_range(1..=4);
            let ctors = (0..nctors)
                .map(|k| {
                    let arity = rng.gen_range(0..=3);
                    let visible = if k == 0 { &names[..i] } else { &names[..] };
                    let args = (0..arity).map(|_| random_arg(rng, visible, 2)).collect();
                    ConstructorDecl::new(&format!("C{i}x{k}"), args)
                })
                .collect();
            TypeDef { name: names[i].clone(), ctors }
        })
        .collect();
    Schema::new(name, types)
}

fn random_arg(rng: &mut ChaCha8Rng, named: &[String], depth: usize) -> SchemaType {
    match rng.gen_range(0..6) {
        0 if depth > 0 => SchemaType::list(random_arg(rng, named, depth - 1)),
        1 if depth > 0 => SchemaType::pair(random_arg(rng, named, depth - 1), random_arg(rng, named, depth - 1)),
        2 | 3 if !named.is_empty() => SchemaType::named(named.choose(rng).expect("nonempty")),
        _ => SchemaType::Prim(*PRIMS.choose(rng).expect("nonempty")),
    }
}

pub fn random_value(rng: &mut ChaCha8Rng, schema: &Schema, ty: &SchemaType, depth: usize) -> V {
    match ty {
        SchemaType::Prim(PayloadType::Int) => V::Int(rng.gen_range(-1000..1000)),
        SchemaType::Prim(PayloadType::Bool) => V::Bool(rng.gen()),
        SchemaType::Prim(PayloadType::String) => {
            let n = rng.gen_range(0..4);
            V::Str((0..n).map(|_| rng.gen_range(b'a'..=b'z') as char).collect())
        }
        SchemaType::List(e) => {
            let n = if depth == 0 { 0 } else { rng.gen_range(0..3) };
            V::List((0..n).map(|_| random_value(rng, schema, e, depth.saturating_sub(1))).collect())
        }
        SchemaType::Pair(a, b) => V::pair(random_value(rng, schema, a, depth), random_value(rng, schema, b, depth)),
        SchemaType::Named(n) => {
            let def = schema.type_def(n).expect("declared type");
            let c = if depth == 0 { &def.ctors[0] } else { def.ctors.choose(rng).expect("nonempty") };
            let args = c
                .args
                .iter()
                .map(|a| random_value(rng, schema, &a.to_schema_type().expect("well-formed"), depth.saturating_sub(1)))
                .collect();
            V::ctor(&c.name, args)
        }
    }
}

fn random_payload(rng: &mut ChaCha8Rng, ty: PayloadType) -> Payload {
    match ty {
        PayloadType::Int => Payload::Int(rng.gen_range(-50..50)),
        PayloadType::Bool => Payload::Bool(rng.gen()),
        PayloadType::String => Payload::str(["x", "y", "f", "tmp", "a1"].choose(rng).expect("nonempty")),
    }
}

/// Random well-sorted terms over a signature.
pub struct TermGen<'a> {
    sig: &'a Signature,
    /// Least term height per atomic sort; absent when no finite term exists.
    height: BTreeMap<Sort, usize>,
}

impl<'a> TermGen<'a> {
    pub fn new(sig: &'a Signature) -> TermGen<'a> {
        let mut g = TermGen { sig, height: BTreeMap::new() };
        for p in PRIMS {
            g.height.insert(Sort::primitive(p), 0);
        }
        loop {
            let mut changed = false;
            for k in sig.kinds() {
                if let Some(h) = k.child_sorts.iter().map(|s| g.sort_height(s)).try_fold(0, |m, h| h.map(|h| m.max(h)))
                {
                    let cur = g.height.get(&k.produced).copied();
                    if cur.is_none_or(|c| h + 1 < c) {
                        g.height.insert(k.produced.clone(), h + 1);
                        changed = true;
                    }
                }
            }
            if !changed {
                return g;
            }
        }
    }

    fn sort_height(&self, s: &Sort) -> Option<usize> {
        match s {
            Sort::ListOf(_) | Sort::OptionOf(_) => Some(0),
            Sort::PairOf(a, b) => Some(self.sort_height(a)?.max(self.sort_height(b)?)),
            Sort::Atomic(_) => self.height.get(s).copied(),
        }
    }

    pub fn can_generate(&self, s: &Sort) -> bool {
        self.sort_height(s).is_some()
    }

    /// A term of sort `s` at most `budget` levels taller than necessary.
    pub fn term(&self, rng: &mut ChaCha8Rng, s: &Sort, budget: usize) -> Term {
        match s {
            Sort::ListOf(e) => {
                let n = if budget == 0 || !self.can_generate(e) { 0 } else { rng.gen_range(0..3) };
                let items: Vec<Term> = (0..n).map(|_| self.term(rng, e, budget - 1)).collect();
                build_list(e, items).expect("well-sorted list")
            }
            Sort::OptionOf(e) => {
                if budget > 0 && self.can_generate(e) && rng.gen() {
                    Term::just((**e).clone(), self.term(rng, e, budget - 1)).expect("well-sorted option")
                } else {
                    Term::nothing((**e).clone())
                }
            }
            Sort::PairOf(a, b) => Term::pair(self.term(rng, a, budget), self.term(rng, b, budget)),
            Sort::Atomic(_) => {
                if let Some(p) = PRIMS.iter().find(|p| Sort::primitive(**p) == *s) {
                    return Term::prim(random_payload(rng, *p));
                }
                let least = self.height[s];
                let fits: Vec<_> = self
                    .sig
                    .kinds()
                    .filter(|k| &k.produced == s)
                    .filter(|k| k.child_sorts.iter().all(|c| self.sort_height(c).is_some_and(|h| h < least + budget)))
                    .collect();
                let k = fits.choose(rng).expect("the least-height kind always fits");
                let payloads = k.payloads.iter().map(|p| random_payload(rng, *p)).collect();
                let spare = (least + budget).saturating_sub(1);
                let children = k
                    .child_sorts
                    .iter()
                    .map(|c| {
                        let h = self.sort_height(c).expect("fits");
                        self.term(rng, c, spare - h)
                    })
                    .collect();
                Term::new(k, payloads, children).expect("well-sorted node")
            }
        }
    }
}

/// Checks that the coverage markers of an instrumented run trace a path of
/// the original program's control-flow graph. Returns the number of
/// markers seen.
pub fn check_coverage_path(lang: &LanguageDef, src: &str) -> Result<usize, String> {
    let term = lang.decompose(&lang.parse(src).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let (inst, _) = testcov(&term, lang).map_err(|e| e.to_string())?;
    let inst = lang.pretty(&lang.recompose(&inst).map_err(|e| e.to_string())?);
    check_marker_path(lang, src, &inst)
}

/// As [`check_coverage_path`], for a given instrumented version of `src`.
pub fn check_marker_path(lang: &LanguageDef, src: &str, instrumented: &str) -> Result<usize, String> {
    let term = lang.decompose(&lang.parse(src).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let cfg = build_cfg(&term, lang).map_err(|e| e.to_string())?;
    let inst = lang.parse(instrumented).map_err(|e| e.to_string())?;
    let paths = BlockPaths::new(&cfg);
    let trace = interpret(lang.dialect, &inst, DEFAULT_FUEL);
    // (function, current block)
    let mut frames: Vec<(usize, usize)> = Vec::new();
    let mut seen = 0;
    for (step, e) in trace.0.iter().enumerate() {
        match e {
            Event::Cover(i) => {
                seen += 1;
                let b = *i as usize;
                let f = *paths.function.get(&b).ok_or(format!("step {step}: unknown block {b}"))?;
                match frames.last_mut() {
                    Some((g, cur)) if *g == f => {
                        if !paths.next[&*cur].contains(&Some(b)) {
                            return Err(format!("step {step}: no path from block {cur} to block {b}"));
                        }
                        *cur = b;
                    }
                    _ => {
                        if paths.entry[&f] != Some(b) {
                            return Err(format!("step {step}: block {b} entered without a call"));
                        }
                        frames.push((f, b));
                    }
                }
            }
            Event::Return(_) => {
                let (_, cur) = frames.pop().ok_or(format!("step {step}: return outside a function"))?;
                if !paths.next[&cur].contains(&None) {
                    return Err(format!("step {step}: block {cur} cannot reach the function exit"));
                }
            }
            _ => {}
        }
    }
    if trace.trap().is_none() && !frames.is_empty() {
        return Err("run ended inside a function".to_string());
    }
    Ok(seen)
}

struct BlockPaths {
    function: BTreeMap<usize, usize>,
    /// Entry block per function index.
    entry: BTreeMap<usize, Option<usize>>,
    /// Blocks that can start right after each block; `None` is the exit.
    next: BTreeMap<usize, BTreeSet<Option<usize>>>,
}

impl BlockPaths {
    fn new(cfg: &Cfg) -> BlockPaths {
        let blocks = basic_blocks(cfg);
        let mut leader_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut member_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut function = BTreeMap::new();
        for b in &blocks {
            leader_of.insert(b.nodes[0], b.id);
            function.insert(b.id, cfg.nodes[b.nodes[0]].function);
            for &n in &b.nodes {
                member_of.insert(n, b.id);
            }
        }
        let succ = |n: usize| cfg.succs(n);
        // Successor blocks reachable from `starts` without passing another leader.
        let follow = |starts: Vec<usize>, own: Option<usize>| {
            let mut out = BTreeSet::new();
            let mut seen = BTreeSet::new();
            let mut work = starts;
            while let Some(n) = work.pop() {
                if !seen.insert(n) {
                    continue;
                }
                if let Some(&b) = leader_of.get(&n) {
                    out.insert(Some(b));
                    continue;
                }
                if cfg.nodes[n].kind == CfgNodeKind::Exit {
                    out.insert(None);
                    continue;
                }
                if let (Some(o), Some(m)) = (own, member_of.get(&n)) {
                    assert_eq!(*m, o, "non-leader reached from a different block");
                }
                work.extend(succ(n));
            }
            out
        };
        let mut next = BTreeMap::new();
        for b in &blocks {
            let starts = b.nodes.iter().flat_map(|&n| succ(n)).collect();
            next.insert(b.id, follow(starts, Some(b.id)));
        }
        let entry = cfg
            .functions
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let e = follow(succ(f.entry), None);
                assert!(e.len() == 1, "function entry leads to one block");
                (i, e.into_iter().next().flatten())
            })
            .collect();
        BlockPaths { function, entry, next }
    }
}
