//! Reference interpreters for the three languages, over their plain ASTs.
//!
//! Evaluation is deterministic and fuel-limited. Every failure ends the
//! trace with a trap event instead of returning an error.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use crate::lang::Dialect;
use crate::modularizer::GenericValue as V;

pub const DEFAULT_FUEL: u64 = 100_000;
const MAX_DEPTH: usize = 64;
const PRINT_DEPTH: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TrapKind {
    Fuel,
    DivZero,
    /// An operation applied to a value of the wrong kind.
    Type,
    Bounds,
    /// Read of a declared but unassigned variable.
    Uninit,
    Unbound,
    Stack,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Print(String),
    /// Call to a function that is neither defined nor built in.
    Call(String, Vec<String>),
    Return(String),
    Trap(TrapKind),
    /// Store to the coverage array.
    Cover(i64),
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Print(s) => write!(f, "print {s}"),
            Event::Call(n, args) => write!(f, "call {n}({})", args.join(", ")),
            Event::Return(v) => write!(f, "return {v}"),
            Event::Trap(k) => write!(f, "trap {k:?}"),
            Event::Cover(i) => write!(f, "cover {i}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace(pub Vec<Event>);

impl Trace {
    pub fn without_cover(&self) -> Trace {
        Trace(self.0.iter().filter(|e| !matches!(e, Event::Cover(_))).cloned().collect())
    }

    pub fn trap(&self) -> Option<TrapKind> {
        match self.0.last() {
            Some(Event::Trap(k)) => Some(*k),
            _ => None,
        }
    }

    /// Coverage indices stored, in order.
    pub fn covered(&self) -> Vec<i64> {
        self.0.iter().filter_map(|e| if let Event::Cover(i) = e { Some(*i) } else { None }).collect()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.0 {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum Value {
    Int(i64),
    Bool(bool),
    /// `undefined`, `nil`, or the result of a `void` function.
    Undef,
    Uninit,
    Array(Rc<RefCell<Vec<Value>>>),
}

impl Value {
    pub fn array(items: Vec<Value>) -> Value {
        Value::Array(Rc::new(RefCell::new(items)))
    }
}

type R<T> = Result<T, TrapKind>;

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Value),
}

enum Loc {
    Var(String),
    Elem(Rc<RefCell<Vec<Value>>>, i64),
    Cover(i64),
}

struct Frame {
    scopes: Vec<BTreeMap<String, Value>>,
}

struct Machine<'a> {
    dialect: Dialect,
    funcs: BTreeMap<&'a str, &'a V>,
    globals: BTreeMap<String, Value>,
    events: Vec<Event>,
    fuel: u64,
    depth: usize,
}

/// Runs `main()` of a program.
pub fn interpret(dialect: Dialect, program: &V, fuel: u64) -> Trace {
    run_function(dialect, program, "main", &[], fuel)
}

pub fn run_function(dialect: Dialect, program: &V, name: &str, args: &[Value], fuel: u64) -> Trace {
    let funcs = program.arg(0).as_list().iter().map(|f| (fn_parts(dialect, f).0, f)).collect();
    let mut m = Machine { dialect, funcs, globals: BTreeMap::new(), events: Vec::new(), fuel, depth: 0 };
    if let Err(k) = m.call(name, args.to_vec()) {
        m.events.push(Event::Trap(k));
    }
    Trace(m.events)
}

fn ident(v: &V) -> &str {
    v.arg(0).as_str()
}

/// Name, parameter names, and body of a function definition.
fn fn_parts(dialect: Dialect, f: &V) -> (&str, Vec<&str>, &V) {
    match dialect {
        Dialect::C => (ident(f.arg(1)), f.arg(2).as_list().iter().map(|p| ident(p.arg(1))).collect(), f.arg(3)),
        _ => (ident(f.arg(0)), f.arg(1).as_list().iter().map(ident).collect(), f.arg(2)),
    }
}

fn block_items(dialect: Dialect, b: &V) -> &[V] {
    match dialect {
        Dialect::Js => b.arg(1).as_list(),
        _ => b.arg(0).as_list(),
    }
}

/// Names declared with `var` anywhere in a MiniJS function body.
fn js_vars<'v>(b: &'v V, out: &mut Vec<&'v str>) {
    for s in b.arg(1).as_list() {
        match s.ctor_name() {
            "VarStmt" => out.extend(s.arg(0).arg(0).as_list().iter().map(|d| ident(d.arg(0)))),
            "If" => {
                js_vars(s.arg(1), out);
                if s.arg(2).ctor_name() == "Else" {
                    js_vars(s.arg(2).arg(0), out);
                }
            }
            "While" => js_vars(s.arg(1), out),
            "For" => js_vars(s.arg(3), out),
            _ => {}
        }
    }
}

fn is_cov_array(dialect: Dialect, e: &V) -> bool {
    match dialect {
        Dialect::C => e.ctor_name() == "Var" && ident(e.arg(0)) == "cov",
        _ => {
            e.ctor_name() == "Field"
                && ident(e.arg(1)) == "cov"
                && e.arg(0).ctor_name() == "Var"
                && ident(e.arg(0).arg(0)) == "TC"
        }
    }
}

impl Machine<'_> {
    fn tick(&mut self) -> R<()> {
        if self.fuel == 0 {
            return Err(TrapKind::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn show(&self, v: &Value) -> String {
        show(self.dialect, v, PRINT_DEPTH)
    }

    fn truthy(&self, v: &Value) -> bool {
        match (self.dialect, v) {
            (_, Value::Bool(b)) => *b,
            (Dialect::Lua, Value::Int(_)) => true,
            (_, Value::Int(n)) => *n != 0,
            (_, Value::Undef | Value::Uninit) => false,
            (_, Value::Array(_)) => true,
        }
    }

    fn int(&self, v: &Value) -> R<i64> {
        match (self.dialect, v) {
            (_, Value::Int(n)) => Ok(*n),
            (Dialect::C, Value::Bool(b)) => Ok(*b as i64),
            _ => Err(TrapKind::Type),
        }
    }

    fn boolean(&self, b: bool) -> Value {
        match self.dialect {
            Dialect::C => Value::Int(b as i64),
            _ => Value::Bool(b),
        }
    }

    fn equal(&self, a: &Value, b: &Value) -> bool {
        match (a, b) {
            (Value::Int(x), Value::Int(y)) => x == y,
            (Value::Bool(x), Value::Bool(y)) => x == y,
            (Value::Undef, Value::Undef) => true,
            (Value::Array(x), Value::Array(y)) => Rc::ptr_eq(x, y),
            (Value::Int(_), Value::Bool(_)) | (Value::Bool(_), Value::Int(_)) if self.dialect == Dialect::C => {
                self.int(a) == self.int(b)
            }
            _ => false,
        }
    }

    fn call(&mut self, name: &str, args: Vec<Value>) -> R<Value> {
        self.tick()?;
        match name {
            "print" => {
                let s = args.iter().map(|a| self.show(a)).collect::<Vec<_>>().join(" ");
                self.events.push(Event::Print(s));
                return Ok(Value::Undef);
            }
            "array" => return Ok(Value::array(args)),
            _ => {}
        }
        let Some(&f) = self.funcs.get(name) else {
            let shown = args.iter().map(|a| self.show(a)).collect();
            self.events.push(Event::Call(name.to_string(), shown));
            let mut sum = name.bytes().fold(0i64, |s, b| s.wrapping_add(b as i64));
            for a in &args {
                if let Value::Int(n) = a {
                    sum = sum.wrapping_add(*n);
                }
            }
            return Ok(Value::Int(sum.rem_euclid(5)));
        };
        if self.depth >= MAX_DEPTH {
            return Err(TrapKind::Stack);
        }
        let (_, params, body) = fn_parts(self.dialect, f);
        let mut scope = BTreeMap::new();
        let mut args = args.into_iter();
        for p in &params {
            scope.insert(p.to_string(), args.next().unwrap_or(Value::Undef));
        }
        if self.dialect == Dialect::Js {
            let mut vars = Vec::new();
            js_vars(body, &mut vars);
            for v in vars {
                scope.entry(v.to_string()).or_insert(Value::Undef);
            }
        }
        let mut frame = Frame { scopes: vec![scope] };
        self.depth += 1;
        let flow = self.block(&mut frame, body);
        self.depth -= 1;
        let v = match flow? {
            Flow::Return(v) => v,
            _ => Value::Undef,
        };
        let shown = self.show(&v);
        self.events.push(Event::Return(shown));
        Ok(v)
    }

    fn lookup(&self, fr: &Frame, name: &str) -> R<Value> {
        let found = fr.scopes.iter().rev().find_map(|s| s.get(name)).or_else(|| self.globals.get(name));
        match found {
            Some(Value::Uninit) => Err(TrapKind::Uninit),
            Some(v) => Ok(v.clone()),
            None if self.dialect == Dialect::Lua => Ok(Value::Undef),
            None => Err(TrapKind::Unbound),
        }
    }

    fn assign(&mut self, fr: &mut Frame, name: &str, v: Value) -> R<()> {
        if let Some(slot) = fr.scopes.iter_mut().rev().find_map(|s| s.get_mut(name)) {
            *slot = v;
        } else if let Some(slot) = self.globals.get_mut(name) {
            *slot = v;
        } else if self.dialect == Dialect::C {
            return Err(TrapKind::Unbound);
        } else {
            self.globals.insert(name.to_string(), v);
        }
        Ok(())
    }

    fn declare(fr: &mut Frame, name: &str, v: Value) {
        fr.scopes.last_mut().expect("scope").insert(name.to_string(), v);
    }

    fn loc(&mut self, fr: &mut Frame, e: &V) -> R<Loc> {
        match e.ctor_name() {
            "Var" => Ok(Loc::Var(ident(e.arg(0)).to_string())),
            "Index" if is_cov_array(self.dialect, e.arg(0)) => {
                let i = self.eval(fr, e.arg(1))?;
                Ok(Loc::Cover(self.int(&i)?))
            }
            "Index" => {
                let a = self.eval(fr, e.arg(0))?;
                let i = self.eval(fr, e.arg(1))?;
                match a {
                    Value::Array(a) => Ok(Loc::Elem(a, self.int(&i)?)),
                    _ => Err(TrapKind::Type),
                }
            }
            _ => Err(TrapKind::Type),
        }
    }

    fn store(&mut self, fr: &mut Frame, loc: Loc, v: Value) -> R<()> {
        match loc {
            Loc::Var(n) => self.assign(fr, &n, v),
            Loc::Elem(a, i) => {
                let mut a = a.borrow_mut();
                let slot = usize::try_from(i).ok().and_then(|i| a.get_mut(i)).ok_or(TrapKind::Bounds)?;
                *slot = v;
                Ok(())
            }
            Loc::Cover(i) => {
                self.events.push(Event::Cover(i));
                Ok(())
            }
        }
    }

    fn eval(&mut self, fr: &mut Frame, e: &V) -> R<Value> {
        self.tick()?;
        match e.ctor_name() {
            "IntLit" => Ok(Value::Int(e.arg(0).as_int())),
            "BoolLit" => Ok(Value::Bool(e.arg(0).as_bool())),
            "Nil" => Ok(Value::Undef),
            "Var" => self.lookup(fr, ident(e.arg(0))),
            "Index" => {
                let a = self.eval(fr, e.arg(0))?;
                let i = self.eval(fr, e.arg(1))?;
                let i = self.int(&i)?;
                match a {
                    Value::Array(a) => {
                        usize::try_from(i).ok().and_then(|i| a.borrow().get(i).cloned()).ok_or(TrapKind::Bounds)
                    }
                    _ => Err(TrapKind::Type),
                }
            }
            "Field" => Err(TrapKind::Type),
            "Call" => {
                let mut args = Vec::new();
                for a in e.arg(1).as_list() {
                    args.push(self.eval(fr, a)?);
                }
                self.call(ident(e.arg(0)), args)
            }
            "ArrayLit" => {
                let mut items = Vec::new();
                for a in e.arg(0).as_list() {
                    items.push(self.eval(fr, a)?);
                }
                Ok(Value::array(items))
            }
            "Unary" => {
                let v = self.eval(fr, e.arg(1))?;
                match e.arg(0).as_str() {
                    "-" => Ok(Value::Int(self.int(&v)?.wrapping_neg())),
                    _ => Ok(self.boolean(!self.truthy(&v))),
                }
            }
            "Binary" => self.binary(fr, e.arg(0).as_str(), e.arg(1), e.arg(2)),
            "Assign" => {
                let loc = self.loc(fr, e.arg(0))?;
                let v = self.eval(fr, e.arg(1))?;
                self.store(fr, loc, v.clone())?;
                Ok(v)
            }
            _ => Err(TrapKind::Type),
        }
    }

    fn binary(&mut self, fr: &mut Frame, op: &str, l: &V, r: &V) -> R<Value> {
        let a = self.eval(fr, l)?;
        if op == "&&" || op == "||" {
            let short = self.truthy(&a) == (op == "||");
            let v = if short { a } else { self.eval(fr, r)? };
            return Ok(match self.dialect {
                Dialect::C => self.boolean(self.truthy(&v)),
                _ => v,
            });
        }
        let b = self.eval(fr, r)?;
        match op {
            "==" => return Ok(self.boolean(self.equal(&a, &b))),
            "!=" => return Ok(self.boolean(!self.equal(&a, &b))),
            _ => {}
        }
        let (x, y) = (self.int(&a)?, self.int(&b)?);
        Ok(match op {
            "<" => self.boolean(x < y),
            "<=" => self.boolean(x <= y),
            ">" => self.boolean(x > y),
            ">=" => self.boolean(x >= y),
            "+" => Value::Int(x.wrapping_add(y)),
            "-" => Value::Int(x.wrapping_sub(y)),
            "*" => Value::Int(x.wrapping_mul(y)),
            "/" | "%" if y == 0 => return Err(TrapKind::DivZero),
            "/" => Value::Int(x.wrapping_div(y)),
            "%" => Value::Int(x.wrapping_rem(y)),
            _ => return Err(TrapKind::Type),
        })
    }

    fn block(&mut self, fr: &mut Frame, b: &V) -> R<Flow> {
        fr.scopes.push(BTreeMap::new());
        let out = self.items(fr, block_items(self.dialect, b));
        fr.scopes.pop();
        out
    }

    fn items(&mut self, fr: &mut Frame, items: &[V]) -> R<Flow> {
        for s in items {
            match self.stmt(fr, s)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn cond(&mut self, fr: &mut Frame, e: &V) -> R<bool> {
        let v = self.eval(fr, e)?;
        Ok(self.truthy(&v))
    }

    fn opt_expr(&mut self, fr: &mut Frame, o: &V) -> R<Option<Value>> {
        match o.ctor_name() {
            "JustExpr" => Ok(Some(self.eval(fr, o.arg(0))?)),
            _ => Ok(None),
        }
    }

    fn stmt(&mut self, fr: &mut Frame, s: &V) -> R<Flow> {
        self.tick()?;
        match s.ctor_name() {
            "BlockStmt" => self.stmt(fr, s.arg(0)),
            "BlockDecl" => {
                let d = s.arg(0);
                for dc in d.arg(1).as_list() {
                    let name = ident(dc.arg(0));
                    Self::declare(fr, name, Value::Uninit);
                    let oi = dc.arg(1);
                    if oi.ctor_name() == "JustInit" {
                        let init = oi.arg(0);
                        let v = if init.ctor_name() == "InitList" {
                            let mut items = Vec::new();
                            for e in init.arg(0).as_list() {
                                items.push(self.eval(fr, e)?);
                            }
                            Value::array(items)
                        } else {
                            self.eval(fr, init.arg(0))?
                        };
                        Self::declare(fr, name, v);
                    }
                }
                Ok(Flow::Normal)
            }
            "ExprStmt" | "CallStat" => {
                self.eval(fr, s.arg(0))?;
                Ok(Flow::Normal)
            }
            "VarStmt" => {
                for dc in s.arg(0).arg(0).as_list() {
                    if dc.arg(1).ctor_name() == "JustInit" {
                        let v = self.eval(fr, dc.arg(1).arg(0))?;
                        self.assign(fr, ident(dc.arg(0)), v)?;
                    }
                }
                Ok(Flow::Normal)
            }
            "AssignStat" => {
                let mut locs = Vec::new();
                for t in s.arg(0).as_list() {
                    locs.push(self.loc(fr, t)?);
                }
                let mut vals = Vec::new();
                for e in s.arg(1).as_list() {
                    vals.push(self.eval(fr, e)?);
                }
                let mut vals = vals.into_iter();
                for l in locs {
                    let v = vals.next().unwrap_or(Value::Undef);
                    self.store(fr, l, v)?;
                }
                Ok(Flow::Normal)
            }
            "LocalStat" => {
                let d = s.arg(0);
                let mut vals = Vec::new();
                if d.arg(1).ctor_name() == "JustInit" {
                    for e in d.arg(1).arg(0).as_list() {
                        vals.push(self.eval(fr, e)?);
                    }
                }
                let mut vals = vals.into_iter();
                for id in d.arg(0).as_list() {
                    Self::declare(fr, ident(id), vals.next().unwrap_or(Value::Undef));
                }
                Ok(Flow::Normal)
            }
            "If" => {
                if self.cond(fr, s.arg(0))? {
                    self.block(fr, s.arg(1))
                } else if s.arg(2).ctor_name() == "Else" {
                    self.block(fr, s.arg(2).arg(0))
                } else {
                    Ok(Flow::Normal)
                }
            }
            "LuaIf" => {
                if self.cond(fr, s.arg(0))? {
                    return self.block(fr, s.arg(1));
                }
                for ei in s.arg(2).as_list() {
                    if self.cond(fr, ei.arg(0))? {
                        return self.block(fr, ei.arg(1));
                    }
                }
                if s.arg(3).ctor_name() == "Else" {
                    return self.block(fr, s.arg(3).arg(0));
                }
                Ok(Flow::Normal)
            }
            "While" => {
                while self.cond(fr, s.arg(0))? {
                    match self.block(fr, s.arg(1))? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        _ => {}
                    }
                }
                Ok(Flow::Normal)
            }
            "For" => {
                self.opt_expr(fr, s.arg(0))?;
                loop {
                    if let Some(c) = self.opt_expr(fr, s.arg(1))? {
                        if !self.truthy(&c) {
                            break;
                        }
                    }
                    match self.block(fr, s.arg(3))? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        _ => {}
                    }
                    self.opt_expr(fr, s.arg(2))?;
                }
                Ok(Flow::Normal)
            }
            "ForNum" => {
                let start = self.eval(fr, s.arg(1))?;
                let limit = self.eval(fr, s.arg(2))?;
                let step = self.opt_expr(fr, s.arg(3))?.unwrap_or(Value::Int(1));
                let (mut i, limit, step) = (self.int(&start)?, self.int(&limit)?, self.int(&step)?);
                if step == 0 {
                    return Err(TrapKind::Type);
                }
                while if step > 0 { i <= limit } else { i >= limit } {
                    self.tick()?;
                    fr.scopes.push(BTreeMap::from([(ident(s.arg(0)).to_string(), Value::Int(i))]));
                    let flow = self.block(fr, s.arg(4));
                    fr.scopes.pop();
                    match flow? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        _ => {}
                    }
                    match i.checked_add(step) {
                        Some(n) => i = n,
                        None => break,
                    }
                }
                Ok(Flow::Normal)
            }
            "Return" => Ok(Flow::Return(self.opt_expr(fr, s.arg(0))?.unwrap_or(Value::Undef))),
            "Break" => Ok(Flow::Break),
            "Continue" => Ok(Flow::Continue),
            "Compound" | "Do" => self.block(fr, s.arg(0)),
            _ => Err(TrapKind::Type),
        }
    }
}

pub fn show(dialect: Dialect, v: &Value, depth: usize) -> String {
    match v {
        Value::Int(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Undef => match dialect {
            Dialect::C => "void",
            Dialect::Js => "undefined",
            Dialect::Lua => "nil",
        }
        .to_string(),
        Value::Uninit => "uninit".to_string(),
        Value::Array(_) if depth == 0 => "[...]".to_string(),
        Value::Array(a) => {
            let items: Vec<String> = a.borrow().iter().map(|x| show(dialect, x, depth - 1)).collect();
            format!("[{}]", items.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::language;

    fn trace(key: &str, src: &str) -> Vec<String> {
        let lang = language(key).unwrap();
        interpret(lang.dialect, &lang.parse(src).unwrap(), DEFAULT_FUEL).0.iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn hoisting_example_returns_three() {
        let c = language("minic").unwrap();
        let src = "int f(int a,int b,int s) {\n  int t1 = 0, t2 = 1;\n  if (s) {\n    int r1 = t1*a+t2*b;\n    return r1;\n  }\n  int r2 = t2*a+t1*b;\n  return r2;\n}\n";
        let p = c.parse(src).unwrap();
        let t = run_function(c.dialect, &p, "f", &[Value::Int(2), Value::Int(3), Value::Int(1)], DEFAULT_FUEL);
        assert_eq!(t.0, [Event::Return("3".into())]);
        let t = run_function(c.dialect, &p, "f", &[Value::Int(2), Value::Int(3), Value::Int(0)], DEFAULT_FUEL);
        assert_eq!(t.0, [Event::Return("2".into())]);
    }

    #[test]
    fn print_is_an_event() {
        assert_eq!(trace("minic", "void main() { print(1); }"), ["print 1", "return void"]);
    }

    #[test]
    fn lua_parallel_swap() {
        let src = "function main()\n local x, y = 1, 2\n x, y = y, x\n print(x)\nend\n";
        assert_eq!(trace("minilua", src), ["print 2", "return nil"]);
    }

    #[test]
    fn lua_parallel_targets_use_old_index() {
        let src = "function main()\n local a, i = array(0, 0), 0\n i, a[i] = 1, 5\n print(a[0], a[1], i)\nend\n";
        assert_eq!(trace("minilua", src)[0], "print 5 0 1");
    }

    #[test]
    fn short_circuit_skips_right_operand() {
        let src = "function main() { var x; x = 0 && f(1); print(x); x = 2 || f(2); print(x); x = 1 && f(3); }";
        assert_eq!(trace("minijs", src), ["print 0", "print 2", "call f(3)", "return undefined"]);
    }

    #[test]
    fn truthiness_differs() {
        assert_eq!(trace("minilua", "function main()\n if 0 then\n  print(1)\n end\nend\n")[0], "print 1");
        assert_eq!(trace("minijs", "function main() { if (0) { print(1); } }"), ["return undefined"]);
        assert_eq!(trace("minic", "void main() { print(3 && 2, !5); }")[0], "print 1 0");
    }

    #[test]
    fn unknown_calls_are_mocked() {
        // f: 102, plus the argument.
        assert_eq!(trace("minijs", "function main() { return f(1); }"), ["call f(1)", "return 3"]);
    }

    #[test]
    fn traps_end_the_trace() {
        assert_eq!(trace("minic", "int main() { int x; print(1); return x; }"), ["print 1", "trap Uninit"]);
        assert_eq!(trace("minijs", "function main() { return 1 / 0; }"), ["trap DivZero"]);
        assert_eq!(trace("minijs", "function main() { while (true) { } }"), ["trap Fuel"]);
        assert_eq!(trace("minijs", "function main() { var a = [1]; return a[1]; }"), ["trap Bounds"]);
        assert_eq!(trace("minilua", "function main()\n for i = 1, 2, 0 do\n end\nend\n"), ["trap Type"]);
    }

    #[test]
    fn js_var_is_function_scoped() {
        let src = "function main() { print(x); if (true) { var x = 2; } print(x); var x; print(x); }";
        assert_eq!(trace("minijs", src), ["print undefined", "print 2", "print 2", "return undefined"]);
    }

    #[test]
    fn lua_locals_are_block_scoped() {
        let src = "function main()\n local x = 1\n do\n  local x = x + 1\n  print(x)\n end\n print(x, y)\n y = 3\n print(y)\nend\n";
        assert_eq!(trace("minilua", src), ["print 2", "print 1 nil", "print 3", "return nil"]);
    }

    #[test]
    fn counted_for_evaluates_bounds_once() {
        let src =
            "function main()\n local n = 3\n for i = 1, n do\n  n = 1\n  local i = i * 10\n  print(i)\n end\nend\n";
        assert_eq!(trace("minilua", src)[..3], ["print 10", "print 20", "print 30"]);
    }

    #[test]
    fn for_continue_runs_step() {
        let src =
            "int main() { int i; for (i = 0; i < 4; i = i + 1) { if (i % 2 == 0) { continue; } print(i); } return i; }";
        assert_eq!(trace("minic", src), ["print 1", "print 3", "return 4"]);
    }

    #[test]
    fn coverage_stores_are_events() {
        assert_eq!(trace("minijs", "function main() { TC.cov[2] = true; }"), ["cover 2", "return undefined"]);
        assert_eq!(trace("minic", "void main() { cov[0] = true; }"), ["cover 0", "return void"]);
    }

    #[test]
    fn c_braced_initializer_builds_array() {
        assert_eq!(trace("minic", "int main() { int[] a = {4, 5}; return a[1]; }"), ["return 5"]);
    }
}
