//! Control-flow graphs over IPS terms, basic blocks, and the control-flow
//! aware statement inserter.
//!
//! Nodes are statement-level: one per block item, plus nodes for loop
//! condition tests, `for` steps, the conditionally evaluated operand of a
//! short-circuit operator, and empty blocks.

mod insert;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::lang::{join, list_elem_path, IpsError, LanguageDef, Path, StmtShape};
use crate::term::{extract_list, Term, TermError};

pub use insert::{
    block_items, detach_for, expand_loop_condition, insert_at, insert_at_loop_sites, loop_sites, with_items,
    InsertionPoint,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("no block item or block at path {0:?}")]
    InvalidPath(Path),
    #[error("item at {0:?} is not a loop")]
    NotALoop(Path),
    #[error("unstructured construct at {0:?}")]
    UnstructuredConstruct(Path),
    #[error(transparent)]
    Ips(#[from] IpsError),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CfgNodeKind {
    Entry,
    Exit,
    /// A block item.
    Stmt,
    /// The test of an if arm or a loop; the index is the arm.
    Cond(usize),
    /// The step expression of a C-style `for`.
    Step,
    /// The right operand of a short-circuit operator.
    Operand,
    EmptyBlock,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfgNode {
    pub id: usize,
    pub kind: CfgNodeKind,
    /// Item path for statements, conditions and steps; expression path for
    /// operands; block path for empty blocks; body path for entry and exit.
    pub path: Path,
    /// For operands: the node whose evaluation they belong to.
    pub owner: Option<usize>,
    /// For statements: the containing block path and the item index.
    pub slot: Option<(Path, usize)>,
    /// For statements: the node of the previous item in the same block.
    pub prev_sibling: Option<usize>,
    pub function: usize,
    pub reachable: bool,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfgFunction {
    pub name: String,
    pub body: Path,
    pub entry: usize,
    pub exit: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    pub nodes: Vec<CfgNode>,
    pub edges: BTreeSet<(usize, usize)>,
    pub functions: Vec<CfgFunction>,
}

pub fn path_text(p: &[usize]) -> String {
    if p.is_empty() {
        return "root".into();
    }
    p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
}

struct LoopCtx {
    cont: usize,
    breaks: Vec<usize>,
}

struct Builder<'a> {
    lang: &'a LanguageDef,
    term: &'a Term,
    nodes: Vec<CfgNode>,
    edges: BTreeSet<(usize, usize)>,
    function: usize,
    exit: usize,
    loops: Vec<LoopCtx>,
}

impl Builder<'_> {
    fn at(&self, p: &[usize]) -> Result<&Term, FlowError> {
        self.term.at(p).ok_or_else(|| FlowError::InvalidPath(p.to_vec()))
    }

    fn node(&mut self, kind: CfgNodeKind, path: Path, owner: Option<usize>, preds: &[usize]) -> usize {
        let id = self.nodes.len();
        let what = self.term.at(&path).map(|t| t.name().to_string()).unwrap_or_default();
        let tag = match kind {
            CfgNodeKind::Entry => "entry",
            CfgNodeKind::Exit => "exit",
            CfgNodeKind::Stmt => "stmt",
            CfgNodeKind::Cond(_) => "cond",
            CfgNodeKind::Step => "step",
            CfgNodeKind::Operand => "operand",
            CfgNodeKind::EmptyBlock => "empty",
        };
        let label = match kind {
            CfgNodeKind::Cond(k) => format!("{tag}{k} {what} @{}", path_text(&path)),
            _ => format!("{tag} {what} @{}", path_text(&path)),
        };
        self.nodes.push(CfgNode {
            id,
            kind,
            path,
            owner,
            slot: None,
            prev_sibling: None,
            function: self.function,
            reachable: false,
            label,
        });
        for &p in preds {
            self.edges.insert((p, id));
        }
        id
    }

    fn connect(&mut self, from: &[usize], to: usize) {
        for &f in from {
            self.edges.insert((f, to));
        }
    }

    /// Threads control through the short-circuit operators of the
    /// expression at `path`, in evaluation order.
    fn expr_flow(&mut self, path: &[usize], owner: usize, preds: Vec<usize>) -> Result<Vec<usize>, FlowError> {
        let t = self.at(path)?.clone();
        if self.lang.frontend.is_short_circuit(&t) {
            let left = self.expr_flow(&join(path, &[0]), owner, preds)?;
            let o = self.node(CfgNodeKind::Operand, join(path, &[1]), Some(owner), &left);
            let right = self.expr_flow(&join(path, &[1]), owner, vec![o])?;
            return Ok(union(left, right));
        }
        let mut cur = preds;
        for i in 0..t.children().len() {
            cur = self.expr_flow(&join(path, &[i]), owner, cur)?;
        }
        Ok(cur)
    }

    fn block(&mut self, block: &[usize], preds: Vec<usize>) -> Result<Vec<usize>, FlowError> {
        let b = self.at(block)?;
        if !b.is("Block") {
            return Err(FlowError::InvalidPath(block.to_vec()));
        }
        let items = extract_list(b.child(0))?;
        if items.is_empty() {
            let e = self.node(CfgNodeKind::EmptyBlock, block.to_vec(), None, &preds);
            return Ok(vec![e]);
        }
        let mut cur = preds;
        let mut prev = None;
        for (i, item) in items.iter().enumerate() {
            let p = list_elem_path(&join(block, &[0]), i);
            let n = self.node(CfgNodeKind::Stmt, p.clone(), None, &cur);
            self.nodes[n].slot = Some((block.to_vec(), i));
            self.nodes[n].prev_sibling = prev;
            cur = self.stmt(n, &p, item)?;
            prev = Some(n);
        }
        Ok(cur)
    }

    fn stmt(&mut self, n: usize, p: &[usize], item: &Term) -> Result<Vec<usize>, FlowError> {
        let abs = |rel: &Path| join(p, rel);
        match self.lang.stmt_shape(item) {
            StmtShape::Plain => self.expr_flow(p, n, vec![n]),
            StmtShape::Return => {
                let out = self.expr_flow(p, n, vec![n])?;
                let exit = self.exit;
                self.connect(&out, exit);
                Ok(vec![])
            }
            StmtShape::Break => {
                let lp = self.loops.last_mut().ok_or_else(|| FlowError::UnstructuredConstruct(p.to_vec()))?;
                lp.breaks.push(n);
                Ok(vec![])
            }
            StmtShape::Continue => {
                let cont = self.loops.last().ok_or_else(|| FlowError::UnstructuredConstruct(p.to_vec()))?.cont;
                self.edges.insert((n, cont));
                Ok(vec![])
            }
            StmtShape::Nested { block } => self.block(&abs(&block), vec![n]),
            StmtShape::IfChain { arms, els } => {
                let mut out = Vec::new();
                let mut test = vec![n];
                for (k, (cond, body)) in arms.iter().enumerate() {
                    let owner = if k == 0 { n } else { self.node(CfgNodeKind::Cond(k), p.to_vec(), None, &test) };
                    let start = if k == 0 { test.clone() } else { vec![owner] };
                    let c = self.expr_flow(&abs(cond), owner, start)?;
                    out.extend(self.block(&abs(body), c.clone())?);
                    test = c;
                }
                match els {
                    Some(b) => out.extend(self.block(&abs(&b), test)?),
                    None => out.extend(test),
                }
                Ok(dedup(out))
            }
            StmtShape::While { cond, body } => {
                let c = self.node(CfgNodeKind::Cond(0), p.to_vec(), None, &[n]);
                let t = self.expr_flow(&abs(&cond), c, vec![c])?;
                self.loop_body(&abs(&body), t.clone(), c, c).map(|breaks| union(t, breaks))
            }
            StmtShape::For { init, cond, step, body } => {
                let pre = match &init {
                    Some(i) => self.expr_flow(&abs(i), n, vec![n])?,
                    None => vec![n],
                };
                let c = self.node(CfgNodeKind::Cond(0), p.to_vec(), None, &pre);
                let t = match &cond {
                    Some(e) => self.expr_flow(&abs(e), c, vec![c])?,
                    None => vec![c],
                };
                let cont = match &step {
                    Some(_) => self.node(CfgNodeKind::Step, p.to_vec(), None, &[]),
                    None => c,
                };
                let breaks = self.loop_body(&abs(&body), t.clone(), cont, cont)?;
                if let Some(s) = &step {
                    let after = self.expr_flow(&abs(s), cont, vec![cont])?;
                    self.connect(&after, c);
                }
                Ok(if cond.is_some() { union(t, breaks) } else { breaks })
            }
            StmtShape::CountedFor { body } => {
                let c = self.node(CfgNodeKind::Cond(0), p.to_vec(), None, &[n]);
                let breaks = self.loop_body(&abs(&body), vec![c], c, c)?;
                Ok(union(vec![c], breaks))
            }
        }
    }

    /// Builds a loop body entered from `preds`; its fall-through and
    /// `continue`s go to `cont`, and the end of the body goes to `back`.
    /// Returns the `break` nodes.
    fn loop_body(
        &mut self,
        body: &[usize],
        preds: Vec<usize>,
        cont: usize,
        back: usize,
    ) -> Result<Vec<usize>, FlowError> {
        self.loops.push(LoopCtx { cont, breaks: vec![] });
        let out = self.block(body, preds);
        let ctx = self.loops.pop().expect("pushed above");
        let out = out?;
        self.connect(&out, back);
        Ok(ctx.breaks)
    }
}

fn union(mut a: Vec<usize>, b: Vec<usize>) -> Vec<usize> {
    a.extend(b);
    dedup(a)
}

fn dedup(v: Vec<usize>) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    v.into_iter().filter(|x| seen.insert(*x)).collect()
}

/// Builds the CFG of a whole program, or of a single block treated as a
/// function body.
pub fn build_cfg(term: &Term, lang: &LanguageDef) -> Result<Cfg, FlowError> {
    let bodies = if term.is("Block") { vec![(String::new(), Vec::new())] } else { lang.frontend.functions(lang, term) };
    let mut b =
        Builder { lang, term, nodes: Vec::new(), edges: BTreeSet::new(), function: 0, exit: 0, loops: Vec::new() };
    let mut functions = Vec::new();
    for (k, (name, body)) in bodies.into_iter().enumerate() {
        b.function = k;
        let entry = b.node(CfgNodeKind::Entry, body.clone(), None, &[]);
        let exit = b.node(CfgNodeKind::Exit, body.clone(), None, &[]);
        b.nodes[entry].label = format!("entry {name}");
        b.nodes[exit].label = format!("exit {name}");
        b.exit = exit;
        let out = b.block(&body, vec![entry])?;
        b.connect(&out, exit);
        functions.push(CfgFunction { name, body, entry, exit });
    }
    let mut cfg = Cfg { nodes: b.nodes, edges: b.edges, functions };
    cfg.mark_reachable();
    Ok(cfg)
}

impl Cfg {
    fn mark_reachable(&mut self) {
        let succ = self.succ_map();
        let mut queue: VecDeque<usize> = self.functions.iter().map(|f| f.entry).collect();
        while let Some(n) = queue.pop_front() {
            if std::mem::replace(&mut self.nodes[n].reachable, true) {
                continue;
            }
            queue.extend(succ.get(&n).into_iter().flatten().copied());
        }
    }

    fn succ_map(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(a, b) in &self.edges {
            m.entry(a).or_default().push(b);
        }
        m
    }

    pub fn preds(&self, n: usize) -> Vec<usize> {
        self.edges.iter().filter(|(_, b)| *b == n).map(|(a, _)| *a).collect()
    }

    pub fn succs(&self, n: usize) -> Vec<usize> {
        self.edges.iter().filter(|(a, _)| *a == n).map(|(_, b)| *b).collect()
    }

    /// The node of kind `kind` at `path`.
    pub fn find(&self, kind: CfgNodeKind, path: &[usize]) -> Option<usize> {
        self.nodes.iter().find(|n| n.kind == kind && n.path == path).map(|n| n.id)
    }

    /// Follows operand nodes to the node whose evaluation they are part of.
    pub fn owner_of(&self, mut n: usize) -> usize {
        while let Some(o) = self.nodes[n].owner {
            n = o;
        }
        n
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph cfg {\n");
        for n in &self.nodes {
            let _ = writeln!(s, "  n{} [label=\"{}\"]", n.id, n.label.replace('"', "\\\""));
        }
        for (a, b) in &self.edges {
            let _ = writeln!(s, "  n{a} -> n{b}");
        }
        s.push_str("}\n");
        s
    }
}

/// Where a basic block starts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockStart {
    /// Before the item at this path.
    Item(Path),
    /// Inside this empty block.
    Empty(Path),
}

impl BlockStart {
    pub fn path(&self) -> &Path {
        match self {
            BlockStart::Item(p) | BlockStart::Empty(p) => p,
        }
    }

    pub fn insertion_point(&self) -> InsertionPoint {
        match self {
            BlockStart::Item(p) => InsertionPoint::BeforeStmt(p.clone()),
            BlockStart::Empty(p) => InsertionPoint::BlockEntry(p.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicBlock {
    pub id: usize,
    pub start: BlockStart,
    /// Statement and empty-block nodes, in order.
    pub nodes: Vec<usize>,
    pub reachable: bool,
}

/// Whether a statement or empty-block node starts a basic block.
pub fn is_leader(cfg: &Cfg, n: usize) -> bool {
    let node = &cfg.nodes[n];
    match node.kind {
        CfgNodeKind::EmptyBlock => true,
        CfgNodeKind::Stmt => match node.prev_sibling {
            None => true,
            Some(prev) => {
                let preds: BTreeSet<usize> = cfg.preds(n).into_iter().map(|p| cfg.owner_of(p)).collect();
                preds != BTreeSet::from([prev])
            }
        },
        _ => false,
    }
}

/// Basic blocks numbered densely in pre-order of their leaders.
pub fn basic_blocks(cfg: &Cfg) -> Vec<BasicBlock> {
    let mut leaders: Vec<(BlockStart, usize)> = cfg
        .nodes
        .iter()
        .filter(|n| is_leader(cfg, n.id))
        .map(|n| {
            let start = match n.kind {
                CfgNodeKind::EmptyBlock => BlockStart::Empty(n.path.clone()),
                _ => BlockStart::Item(n.path.clone()),
            };
            (start, n.id)
        })
        .collect();
    leaders.sort_by(|a, b| a.0.path().cmp(b.0.path()));
    let index: BTreeMap<usize, usize> = leaders.iter().enumerate().map(|(i, (_, n))| (*n, i)).collect();
    let mut blocks: Vec<BasicBlock> = leaders
        .iter()
        .enumerate()
        .map(|(id, (start, n))| BasicBlock {
            id,
            start: start.clone(),
            nodes: vec![],
            reachable: cfg.nodes[*n].reachable,
        })
        .collect();
    for n in &cfg.nodes {
        if !matches!(n.kind, CfgNodeKind::Stmt | CfgNodeKind::EmptyBlock) {
            continue;
        }
        let mut m = n.id;
        while !index.contains_key(&m) {
            m = cfg.nodes[m].prev_sibling.expect("non-leaders have a previous sibling");
        }
        blocks[index[&m]].nodes.push(n.id);
    }
    for b in &mut blocks {
        b.nodes.sort_by(|x, y| cfg.nodes[*x].path.cmp(&cfg.nodes[*y].path));
    }
    blocks
}

/// The basic block containing each statement node.
pub fn block_of(blocks: &[BasicBlock]) -> BTreeMap<usize, usize> {
    blocks.iter().flat_map(|b| b.nodes.iter().map(move |n| (*n, b.id))).collect()
}

#[cfg(test)]
mod tests;
