use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use super::name::SubseqName;
use crate::error::{domain, Result};
use crate::sieve::oracle_primes_up_to;
use crate::wheel::{cofactor_seq, is_prime, SeqId};

/// How a sub-sequence relates to the two main sub-sequences of its host.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    /// Stretch 5 or 7 inside the host; every prime factor first appears here.
    Main,
    /// Spawned by a prime cofactor of a main node.
    Direct,
    /// Spawned by a composite cofactor of a main node.
    Internal,
    /// Spawned by any node that is not main.
    Nondirect,
}

impl NodeClass {
    pub const fn as_str(self) -> &'static str {
        match self {
            NodeClass::Main => "main",
            NodeClass::Direct => "direct",
            NodeClass::Internal => "internal",
            NodeClass::Nondirect => "nondirect",
        }
    }
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationNode {
    pub name: SubseqName,
    pub class: NodeClass,
    pub parent: Option<SubseqName>,
    /// Value whose factorisation spawned the node; the first member for main nodes.
    pub origin_value: u64,
    pub depth: usize,
    /// Children were not expanded because the depth limit was reached.
    pub truncated: bool,
}

impl DerivationNode {
    /// The two main nodes of `host`: stretch 5 and stretch 7.
    pub fn mains(host: SeqId) -> Result<[DerivationNode; 2]> {
        if host == SeqId::Sq3 {
            return Err(domain("derivation graphs are rooted at SQ1 or SQ2"));
        }
        let mk = |x: u64| -> Result<DerivationNode> {
            let name = SubseqName::in_host(host, x)?;
            Ok(DerivationNode {
                name,
                class: NodeClass::Main,
                parent: None,
                origin_value: name.member(0)?,
                depth: 0,
                truncated: false,
            })
        };
        // SQ1 lists SQ 1-7 before SQ 2-5
        let (a, b) = (mk(7)?, mk(5)?);
        Ok(if a.name.base() <= b.name.base() { [a, b] } else { [b, a] })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationEdge {
    pub parent: SubseqName,
    pub child: SubseqName,
    pub class: NodeClass,
    pub origin_value: u64,
}

/// Sub-sequences derived from one host sequence, bounded by a value limit.
///
/// Each name appears once as a node, classed by its first derivation in
/// breadth-first order. Every derivation is kept as an edge with its own class,
/// so a name reached both from a main node and from a non-main node carries
/// an `internal` node and a `nondirect` edge.
#[derive(Debug, Clone)]
pub struct DerivationGraph {
    pub host: SeqId,
    pub value_limit: u64,
    pub nodes: Vec<DerivationNode>,
    pub edges: Vec<DerivationEdge>,
}

impl DerivationGraph {
    pub fn node(&self, name: SubseqName) -> Option<&DerivationNode> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn mains(&self) -> impl Iterator<Item = &DerivationNode> {
        self.nodes.iter().filter(|n| n.class == NodeClass::Main)
    }

    /// Nodes whose member list contains `v`.
    pub fn covering(&self, v: u64) -> Vec<&DerivationNode> {
        self.nodes.iter().filter(|n| n.name.contains(v)).collect()
    }

    /// Sorted distinct member values of all nodes, up to the graph's value limit.
    pub fn member_values(&self) -> Vec<u64> {
        let mut seen = HashSet::new();
        for node in &self.nodes {
            seen.extend(node.name.members_up_to(self.value_limit).map(|(v, _)| v));
        }
        let mut out: Vec<u64> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }
}

/// Primality lookup for cofactors up to `limit / 5`.
struct Expander {
    host: SeqId,
    value_limit: u64,
    mains: [SubseqName; 2],
    prime: Vec<bool>,
}

impl Expander {
    fn new(host: SeqId, value_limit: u64) -> Result<Self> {
        let [a, b] = DerivationNode::mains(host)?;
        let cap = value_limit / 5;
        let mut prime = vec![false; cap as usize + 1];
        if cap <= crate::sieve::ORACLE_LIMIT {
            for p in oracle_primes_up_to(cap)? {
                prime[p as usize] = true;
            }
        }
        Ok(Expander { host, value_limit, mains: [a.name, b.name], prime })
    }

    fn is_prime(&self, c: u64) -> bool {
        self.prime.get(c as usize).copied().unwrap_or_else(|| is_prime(c))
    }

    /// Smallest composite of the host divisible by the prime `p`.
    fn first_occurrence(&self, p: u64) -> Option<u64> {
        let k = match cofactor_seq(p, self.host)? {
            SeqId::Sq1 => 5,
            _ => 7,
        };
        p.checked_mul(k)
    }

    fn children(&self, node: &DerivationNode) -> Vec<DerivationNode> {
        let mut out = Vec::new();
        for (v, c) in node.name.members_up_to(self.value_limit) {
            let prime = self.is_prime(c);
            if prime && self.first_occurrence(c) != Some(v) {
                continue;
            }
            let Ok(name) = SubseqName::in_host(self.host, c) else {
                continue;
            };
            if self.mains.contains(&name) {
                continue;
            }
            let class = match (node.class, prime) {
                (NodeClass::Main, true) => NodeClass::Direct,
                (NodeClass::Main, false) => NodeClass::Internal,
                _ => NodeClass::Nondirect,
            };
            out.push(DerivationNode {
                name,
                class,
                parent: Some(node.name),
                origin_value: v,
                depth: node.depth + 1,
                truncated: false,
            });
        }
        out
    }
}

/// Descendants of `node` down to `depth_limit` levels, in derivation order.
pub fn derive_children(node: &DerivationNode, depth_limit: usize, value_limit: u64) -> Result<Vec<DerivationNode>> {
    if value_limit < 25 {
        return Err(domain("value_limit must be at least 25"));
    }
    if depth_limit == 0 {
        return Ok(Vec::new());
    }
    let ex = Expander::new(node.name.host(), value_limit)?;
    let mut out = Vec::new();
    let mut frontier = vec![node.clone()];
    let base_depth = node.depth;
    while let Some(n) = frontier.pop() {
        if n.depth - base_depth >= depth_limit {
            continue;
        }
        let kids = ex.children(&n);
        for k in kids.iter().rev() {
            frontier.push(k.clone());
        }
        out.extend(kids);
    }
    out.sort_by_key(|n| (n.depth, n.origin_value, n.name));
    Ok(out)
}

pub fn build_derivation_graph(host: SeqId, value_limit: u64) -> Result<DerivationGraph> {
    build_graph_with_depth(host, value_limit, usize::MAX)
}

/// Breadth-first expansion from the two main nodes; `depth_limit = 1` keeps mains and their children.
pub fn build_graph_with_depth(host: SeqId, value_limit: u64, depth_limit: usize) -> Result<DerivationGraph> {
    let ex = Expander::new(host, value_limit)?;
    let mains = DerivationNode::mains(host)?;
    let mut index: HashMap<SubseqName, usize> = HashMap::new();
    let mut nodes: Vec<DerivationNode> = Vec::new();
    let mut edges = Vec::new();
    let mut queue = VecDeque::new();
    for m in mains {
        index.insert(m.name, nodes.len());
        queue.push_back(nodes.len());
        nodes.push(m);
    }
    while let Some(i) = queue.pop_front() {
        if nodes[i].depth >= depth_limit {
            let name = nodes[i].name;
            nodes[i].truncated = name.members_up_to(value_limit).next().is_some();
            continue;
        }
        let children = ex.children(&nodes[i]);
        for child in children {
            edges.push(DerivationEdge {
                parent: nodes[i].name,
                child: child.name,
                class: child.class,
                origin_value: child.origin_value,
            });
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(child.name) {
                e.insert(nodes.len());
                queue.push_back(nodes.len());
                nodes.push(child);
            }
        }
    }
    nodes.sort_by_key(|n| (n.origin_value, n.class, n.name));
    edges.sort_by_key(|e| (e.origin_value, e.parent, e.child));
    Ok(DerivationGraph { host, value_limit, nodes, edges })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub host: SeqId,
    pub value_limit: u64,
    /// Host members in `[5, limit]`.
    pub members: usize,
    pub composites: usize,
    /// Members not covered by a main or direct node, ascending.
    pub uncovered: Vec<u64>,
    /// Composites missing from main and direct nodes (expected empty).
    pub uncovered_composites: Vec<u64>,
    /// Composites reached only through internal or nondirect nodes (expected empty).
    pub internal_only: Vec<u64>,
    /// `uncovered` equals the primes of the host in range.
    pub uncovered_are_primes: bool,
}

impl CoverageReport {
    pub fn holds(&self) -> bool {
        self.uncovered_composites.is_empty() && self.internal_only.is_empty() && self.uncovered_are_primes
    }
}

/// Checks that every composite host member lies in a main or direct sub-sequence.
///
/// Primality of the members is decided by the classical oracle, not by the graph.
pub fn coverage_check(host: SeqId, value_limit: u64) -> Result<CoverageReport> {
    let graph = build_graph_with_depth(host, value_limit.max(25), 1)?;
    let first = match host {
        SeqId::Sq1 => 5,
        SeqId::Sq2 => 7,
        SeqId::Sq3 => return Err(domain("coverage is defined for SQ1 and SQ2")),
    };
    let slots = if value_limit >= first { ((value_limit - first) / 6 + 1) as usize } else { 0 };
    let slot = |v: u64| ((v - first) / 6) as usize;
    let mut strong = vec![false; slots];
    let mut weak = vec![false; slots];
    for node in &graph.nodes {
        let target = match node.class {
            NodeClass::Main | NodeClass::Direct => &mut strong,
            _ => &mut weak,
        };
        for (v, _) in node.name.members_up_to(value_limit) {
            target[slot(v)] = true;
        }
    }
    let mut prime = vec![false; slots];
    for p in oracle_primes_up_to(value_limit)? {
        if p >= first && p % 6 == host.residue() {
            prime[slot(p)] = true;
        }
    }
    let value = |i: usize| first + 6 * i as u64;
    let uncovered: Vec<u64> = (0..slots).filter(|&i| !strong[i]).map(value).collect();
    let uncovered_composites: Vec<u64> = (0..slots).filter(|&i| !strong[i] && !prime[i]).map(value).collect();
    let internal_only: Vec<u64> = (0..slots).filter(|&i| !strong[i] && weak[i] && !prime[i]).map(value).collect();
    let uncovered_are_primes = (0..slots).all(|i| strong[i] != prime[i]);
    Ok(CoverageReport {
        host,
        value_limit,
        members: slots,
        composites: prime.iter().filter(|p| !**p).count(),
        uncovered,
        uncovered_composites,
        internal_only,
        uncovered_are_primes,
    })
}
