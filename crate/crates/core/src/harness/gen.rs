//! Seeded random programs for differential testing.
//!
//! Programs use integer variables and small integer arrays only, declare
//! every variable before use, and bound every loop by a counter the body
//! never writes. Helpers may call only helpers defined before them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{Dialect, LanguageDef};
use crate::modularizer::GenericValue as V;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub max_depth: usize,
    pub max_stmts_per_block: usize,
    pub loops: bool,
    pub short_circuit: bool,
    /// Declarations that reuse the name of an enclosing variable.
    pub shadowing: bool,
    /// Multi-variable declarations and, in MiniLua, parallel assignment.
    pub parallel_assign: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_depth: 6,
            max_stmts_per_block: 5,
            loops: true,
            short_circuit: true,
            shadowing: true,
            parallel_assign: true,
        }
    }
}

impl GenConfig {
    pub fn with_seed(&self, seed: u64) -> GenConfig {
        GenConfig { seed, ..self.clone() }
    }
}

pub fn gen_program(lang: &LanguageDef, cfg: &GenConfig) -> String {
    lang.pretty(&gen_ast(lang.dialect, cfg))
}

/// `n` programs with seeds `cfg.seed`, `cfg.seed + 1`, ...
pub fn corpus(lang: &LanguageDef, cfg: &GenConfig, n: usize) -> Vec<String> {
    (0..n as u64).map(|i| gen_program(lang, &cfg.with_seed(cfg.seed.wrapping_add(i)))).collect()
}

pub fn gen_ast(dialect: Dialect, cfg: &GenConfig) -> V {
    let mut g = Gen {
        d: dialect,
        cfg: cfg.clone(),
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        scopes: Vec::new(),
        next: 0,
        helpers: Vec::new(),
        hidden: Vec::new(),
    };
    let n = g.rng.gen_range(0..=2);
    let mut funs = Vec::new();
    for k in 0..n {
        let arity = g.rng.gen_range(0..=2);
        let params: Vec<String> = (0..arity).map(|j| format!("p{j}")).collect();
        funs.push(g.function(&format!("h{k}"), &params));
        g.helpers.push((format!("h{k}"), arity));
    }
    funs.push(g.function("main", &[]));
    V::ctor("Program", vec![V::List(funs)])
}

#[derive(Clone)]
struct Var {
    name: String,
    array: bool,
    /// Loop counters: readable, never written.
    frozen: bool,
}

struct Gen {
    d: Dialect,
    cfg: GenConfig,
    rng: ChaCha8Rng,
    scopes: Vec<Vec<Var>>,
    next: usize,
    helpers: Vec<(String, usize)>,
    /// Names declared but not yet assigned; expressions must not read them.
    hidden: Vec<String>,
}

fn ident(s: &str) -> V {
    V::ctor("Ident", vec![V::str(s)])
}

fn var(s: &str) -> V {
    V::ctor("Var", vec![ident(s)])
}

fn lit(n: i64) -> V {
    V::ctor("IntLit", vec![V::Int(n)])
}

fn bin(op: &str, a: V, b: V) -> V {
    V::ctor("Binary", vec![V::str(op), a, b])
}

fn call(f: &str, args: Vec<V>) -> V {
    V::ctor("Call", vec![ident(f), V::List(args)])
}

impl Gen {
    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next - 1)
    }

    fn visible(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        for s in &self.scopes {
            for v in s {
                out.retain(|o| o.name != v.name);
                out.push(v.clone());
            }
        }
        out.retain(|v| !self.hidden.contains(&v.name));
        out
    }

    fn declare(&mut self, v: Var) {
        let top = self.scopes.last_mut().expect("scope");
        top.retain(|o| o.name != v.name);
        top.push(v);
    }

    fn pick<T: Clone>(&mut self, xs: &[T]) -> Option<T> {
        if xs.is_empty() {
            None
        } else {
            Some(xs[self.rng.gen_range(0..xs.len())].clone())
        }
    }

    fn atom(&mut self) -> V {
        let vis = self.visible();
        let ints: Vec<Var> = vis.iter().filter(|v| !v.array).cloned().collect();
        let arrays: Vec<Var> = vis.iter().filter(|v| v.array).cloned().collect();
        match self.rng.gen_range(0..6) {
            0 | 1 => lit(self.rng.gen_range(0..10)),
            5 if !arrays.is_empty() => {
                let a = self.pick(&arrays).expect("nonempty");
                V::ctor("Index", vec![var(&a.name), lit(self.rng.gen_range(0..3))])
            }
            _ => match self.pick(&ints) {
                Some(v) => var(&v.name),
                None => lit(self.rng.gen_range(0..10)),
            },
        }
    }

    fn expr(&mut self, depth: usize) -> V {
        if depth == 0 || self.chance(0.35) {
            return self.atom();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..10) {
            0..=3 => {
                let op = ["+", "-", "*"][self.rng.gen_range(0..3)];
                bin(op, self.expr(d), self.expr(d))
            }
            4 => {
                let op = if self.chance(0.5) { "/" } else { "%" };
                bin(op, self.expr(d), lit(self.rng.gen_range(1..10)))
            }
            5 => V::ctor("Unary", vec![V::str("-"), self.expr(d)]),
            6 => self.call_expr(d),
            7 if self.cfg.short_circuit => {
                let op = if self.chance(0.5) { "&&" } else { "||" };
                bin(op, self.expr(d), self.expr(d))
            }
            _ => self.atom(),
        }
    }

    fn call_expr(&mut self, depth: usize) -> V {
        if !self.helpers.is_empty() && self.chance(0.6) {
            let (f, n) = self.pick(&self.helpers.clone()).expect("nonempty");
            let args = (0..n).map(|_| self.expr(depth)).collect();
            return call(&f, args);
        }
        let f = format!("ext{}", self.rng.gen_range(0..2));
        let n = self.rng.gen_range(0..=2);
        let args = (0..n).map(|_| self.expr(depth)).collect();
        call(&f, args)
    }

    fn cond(&mut self, depth: usize) -> V {
        let d = depth.saturating_sub(1);
        match self.rng.gen_range(0..7) {
            0..=2 => {
                let op = ["<", "<=", ">", ">=", "==", "!="][self.rng.gen_range(0..6)];
                bin(op, self.expr(d), self.expr(d))
            }
            3 if depth > 0 => V::ctor("Unary", vec![V::str("!"), self.cond(d)]),
            4 if depth > 0 && self.cfg.short_circuit => {
                let op = if self.chance(0.5) { "&&" } else { "||" };
                bin(op, self.cond(d), self.cond(d))
            }
            _ => self.expr(d),
        }
    }

    fn expr_depth(&self) -> usize {
        self.cfg.max_depth.min(3)
    }

    fn function(&mut self, name: &str, params: &[String]) -> V {
        self.scopes.push(params.iter().map(|p| Var { name: p.clone(), array: false, frozen: false }).collect());
        let mut items = self.items(self.cfg.max_depth, false);
        let ed = self.expr_depth();
        let ret = self.expr(ed);
        items.push(self.stmt(V::ctor("Return", vec![V::ctor("JustExpr", vec![ret])])));
        self.scopes.pop();
        let body = self.block_of(items);
        match self.d {
            Dialect::C => V::ctor(
                "FunDef",
                vec![
                    V::leaf("TInt"),
                    ident(name),
                    V::List(params.iter().map(|p| V::ctor("Param", vec![V::leaf("TInt"), ident(p)])).collect()),
                    body,
                ],
            ),
            _ => V::ctor("FunDef", vec![ident(name), V::List(params.iter().map(|p| ident(p)).collect()), body]),
        }
    }

    fn block_of(&self, items: Vec<V>) -> V {
        match self.d {
            Dialect::Js => V::ctor("Block", vec![V::List(vec![]), V::List(items)]),
            _ => V::ctor("Block", vec![V::List(items)]),
        }
    }

    /// Wraps a statement as a block item.
    fn stmt(&self, s: V) -> V {
        match self.d {
            Dialect::C => V::ctor("BlockStmt", vec![s]),
            _ => s,
        }
    }

    fn block(&mut self, depth: usize, in_loop: bool) -> V {
        self.scopes.push(Vec::new());
        let items = self.items(depth, in_loop);
        self.scopes.pop();
        self.block_of(items)
    }

    fn items(&mut self, depth: usize, in_loop: bool) -> Vec<V> {
        let n = self.rng.gen_range(1..=self.cfg.max_stmts_per_block.max(1));
        let mut out = Vec::new();
        for _ in 0..n {
            self.item(depth, in_loop, &mut out);
        }
        out
    }

    fn expr_stmt(&self, e: V) -> V {
        match self.d {
            Dialect::Lua => V::ctor("CallStat", vec![e]),
            _ => self.stmt(V::ctor("ExprStmt", vec![e])),
        }
    }

    fn assign_stmt(&self, targets: Vec<V>, values: Vec<V>) -> V {
        match self.d {
            Dialect::Lua => V::ctor("AssignStat", vec![V::List(targets), V::List(values)]),
            _ => {
                let (t, v) = (targets.into_iter().next(), values.into_iter().next());
                self.expr_stmt(V::ctor("Assign", vec![t.expect("target"), v.expect("value")]))
            }
        }
    }

    fn if_stmt(&mut self, c: V, then: V, els: Option<V>) -> V {
        let opt_else = match els {
            Some(b) => V::ctor("Else", vec![b]),
            None => V::leaf("NoElse"),
        };
        match self.d {
            Dialect::Lua => V::ctor("LuaIf", vec![c, then, V::List(vec![]), opt_else]),
            _ => self.stmt(V::ctor("If", vec![c, then, opt_else])),
        }
    }

    /// A name for a new variable: fresh, or with shadowing on, sometimes an
    /// enclosing integer variable's name.
    fn decl_name(&mut self, prefix: &str) -> String {
        if self.cfg.shadowing && prefix == "v" && self.chance(0.3) {
            let own: Vec<String> =
                self.scopes.last().map(|s| s.iter().map(|v| v.name.clone()).collect()).unwrap_or_default();
            let outer: Vec<String> = self
                .visible()
                .into_iter()
                .filter(|v| !v.array && !v.frozen && (self.d != Dialect::C || !own.contains(&v.name)))
                .map(|v| v.name)
                .collect();
            if let Some(n) = self.pick(&outer) {
                return n;
            }
        }
        self.fresh(prefix)
    }

    fn decl(&mut self, out: &mut Vec<V>) {
        let ed = self.expr_depth();
        let count = if self.cfg.parallel_assign && self.chance(0.25) { 2 } else { 1 };
        let names: Vec<String> = (0..count).map(|_| self.decl_name("v")).collect();
        if names.len() == 2 && names[0] == names[1] {
            return self.decl(out);
        }
        let with_init = self.chance(0.8);
        match self.d {
            Dialect::Lua => {
                let init = if with_init {
                    V::ctor("JustInit", vec![V::List((0..count).map(|_| self.expr(ed)).collect())])
                } else {
                    V::leaf("NoInit")
                };
                out.push(V::ctor(
                    "LocalStat",
                    vec![V::ctor("Local", vec![V::List(names.iter().map(|n| ident(n)).collect()), init])],
                ));
                for n in &names {
                    self.declare(Var { name: n.clone(), array: false, frozen: false });
                }
            }
            _ => {
                let mut ds = Vec::new();
                for n in &names {
                    let init = if with_init {
                        if self.d == Dialect::C {
                            self.hidden = vec![n.clone()];
                        }
                        let e = self.expr(ed);
                        self.hidden.clear();
                        let e = if self.d == Dialect::C { V::ctor("InitExpr", vec![e]) } else { e };
                        V::ctor("JustInit", vec![e])
                    } else {
                        V::leaf("NoInit")
                    };
                    ds.push(V::ctor("Declarator", vec![ident(n), init]));
                    self.declare(Var { name: n.clone(), array: false, frozen: false });
                }
                out.push(match self.d {
                    Dialect::C => V::ctor("BlockDecl", vec![V::ctor("Decl", vec![V::leaf("TInt"), V::List(ds)])]),
                    _ => V::ctor("VarStmt", vec![V::ctor("VarDecl", vec![V::List(ds)])]),
                });
            }
        }
        if !with_init {
            self.hidden = names.clone();
            for n in &names {
                let v = self.expr(ed);
                self.hidden.retain(|h| h != n);
                out.push(self.assign_stmt(vec![var(n)], vec![v]));
            }
        }
    }

    fn array_decl(&mut self, out: &mut Vec<V>) {
        let ed = self.expr_depth();
        let name = self.fresh("a");
        let items: Vec<V> = (0..3).map(|_| self.expr(ed)).collect();
        out.push(match self.d {
            Dialect::C => {
                let d = V::ctor(
                    "Declarator",
                    vec![ident(&name), V::ctor("JustInit", vec![V::ctor("InitList", vec![V::List(items)])])],
                );
                V::ctor("BlockDecl", vec![V::ctor("Decl", vec![V::leaf("TIntArray"), V::List(vec![d])])])
            }
            Dialect::Js => {
                let d = V::ctor(
                    "Declarator",
                    vec![ident(&name), V::ctor("JustInit", vec![V::ctor("ArrayLit", vec![V::List(items)])])],
                );
                V::ctor("VarStmt", vec![V::ctor("VarDecl", vec![V::List(vec![d])])])
            }
            Dialect::Lua => V::ctor(
                "LocalStat",
                vec![V::ctor(
                    "Local",
                    vec![V::List(vec![ident(&name)]), V::ctor("JustInit", vec![V::List(vec![call("array", items)])])],
                )],
            ),
        });
        self.declare(Var { name, array: true, frozen: false });
    }

    fn assign(&mut self, out: &mut Vec<V>) {
        let ed = self.expr_depth();
        let writable: Vec<Var> = self.visible().into_iter().filter(|v| !v.frozen).collect();
        let Some(first) = self.pick(&writable) else {
            return self.decl(out);
        };
        let target = |g: &mut Gen, v: &Var| {
            if v.array {
                V::ctor("Index", vec![var(&v.name), lit(g.rng.gen_range(0..3))])
            } else {
                var(&v.name)
            }
        };
        let mut targets = vec![target(self, &first)];
        if self.d == Dialect::Lua && self.cfg.parallel_assign && self.chance(0.3) {
            if let Some(second) = self.pick(&writable) {
                if second.name != first.name {
                    targets.push(target(self, &second));
                }
            }
        }
        let values = targets.iter().map(|_| self.expr(ed)).collect();
        out.push(self.assign_stmt(targets, values));
    }

    fn loop_stmt(&mut self, depth: usize, out: &mut Vec<V>) {
        let n = lit(self.rng.gen_range(0..4));
        let i = self.fresh("i");
        let counter = Var { name: i.clone(), array: false, frozen: true };
        let inc = |g: &Gen| g.assign_stmt(vec![var(&i)], vec![bin("+", var(&i), lit(1))]);
        if self.d == Dialect::Lua && self.chance(0.5) {
            self.scopes.push(vec![counter]);
            let body = self.block(depth - 1, true);
            self.scopes.pop();
            out.push(V::ctor("ForNum", vec![ident(&i), lit(1), n, V::leaf("NoExpr"), body]));
            return;
        }
        let zero = match self.d {
            Dialect::C => V::ctor("JustInit", vec![V::ctor("InitExpr", vec![lit(0)])]),
            Dialect::Js => V::ctor("JustInit", vec![lit(0)]),
            Dialect::Lua => V::ctor("JustInit", vec![V::List(vec![lit(0)])]),
        };
        out.push(match self.d {
            Dialect::C => V::ctor(
                "BlockDecl",
                vec![V::ctor(
                    "Decl",
                    vec![V::leaf("TInt"), V::List(vec![V::ctor("Declarator", vec![ident(&i), zero])])],
                )],
            ),
            Dialect::Js => V::ctor(
                "VarStmt",
                vec![V::ctor("VarDecl", vec![V::List(vec![V::ctor("Declarator", vec![ident(&i), zero])])])],
            ),
            Dialect::Lua => V::ctor("LocalStat", vec![V::ctor("Local", vec![V::List(vec![ident(&i)]), zero])]),
        });
        self.declare(counter);
        let test = bin("<", var(&i), n);
        if self.d != Dialect::Lua && self.chance(0.5) {
            let body = self.block(depth - 1, true);
            let step = V::ctor("Assign", vec![var(&i), bin("+", var(&i), lit(1))]);
            let init = V::ctor("Assign", vec![var(&i), lit(0)]);
            let f = V::ctor(
                "For",
                vec![
                    V::ctor("JustExpr", vec![init]),
                    V::ctor("JustExpr", vec![test]),
                    V::ctor("JustExpr", vec![step]),
                    body,
                ],
            );
            out.push(self.stmt(f));
            return;
        }
        self.scopes.push(Vec::new());
        let mut items = vec![inc(self)];
        items.extend(self.items(depth - 1, true));
        self.scopes.pop();
        let body = self.block_of(items);
        out.push(self.stmt(V::ctor("While", vec![test, body])));
    }

    fn item(&mut self, depth: usize, in_loop: bool, out: &mut Vec<V>) {
        let ed = self.expr_depth();
        let nested = depth > 0;
        match self.rng.gen_range(0..20) {
            0..=3 => self.decl(out),
            4 => self.array_decl(out),
            5..=8 => self.assign(out),
            9 | 10 => {
                let n = self.rng.gen_range(1..=2);
                let args = (0..n).map(|_| self.expr(ed)).collect();
                out.push(self.expr_stmt(call("print", args)));
            }
            11 => {
                let e = self.call_expr(ed.saturating_sub(1));
                out.push(self.expr_stmt(e));
            }
            12..=14 if nested => {
                let c = self.cond(ed);
                let then = self.block(depth - 1, in_loop);
                let els = if self.chance(0.5) { Some(self.block(depth - 1, in_loop)) } else { None };
                match els {
                    Some(e) if self.d == Dialect::Lua && self.chance(0.4) => {
                        let c2 = self.cond(ed);
                        let b2 = self.block(depth - 1, in_loop);
                        let elif = V::ctor("ElseIf", vec![c2, b2]);
                        out.push(V::ctor("LuaIf", vec![c, then, V::List(vec![elif]), V::ctor("Else", vec![e])]));
                    }
                    els => {
                        let s = self.if_stmt(c, then, els);
                        out.push(s);
                    }
                }
            }
            15 | 16 if nested && self.cfg.loops => self.loop_stmt(depth, out),
            17 if nested && self.d != Dialect::Js => {
                let b = self.block(depth - 1, in_loop);
                out.push(self.stmt(V::ctor(if self.d == Dialect::Lua { "Do" } else { "Compound" }, vec![b])));
            }
            18 if in_loop => {
                let jump = if self.d != Dialect::Lua && self.chance(0.4) { "Continue" } else { "Break" };
                let c = self.cond(ed);
                let b = self.block_of(vec![self.stmt(V::leaf(jump))]);
                let s = self.if_stmt(c, b, None);
                out.push(s);
            }
            19 if nested => {
                let c = self.cond(ed);
                let e = self.expr(ed);
                let b = self.block_of(vec![self.stmt(V::ctor("Return", vec![V::ctor("JustExpr", vec![e])]))]);
                let s = self.if_stmt(c, b, None);
                out.push(s);
            }
            _ => self.assign(out),
        }
    }
}
