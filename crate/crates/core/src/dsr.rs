//! The reduced DSR graph at interior points and its strong connectedness.
//!
//! Vertices are numbered species first (`0..n`), then reactions (`n..n+m`).

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::network::Network;
use crate::scc::tarjan_scc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Vertex {
    Species(usize),
    Reaction(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub from: Vertex,
    pub to: Vertex,
    pub sign: i8,
}

/// Bipartite digraph; immutable after [`build_dsr`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsrGraph {
    species_names: Vec<String>,
    n_reactions: usize,
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsrSummary {
    pub species_vertices: usize,
    pub reaction_vertices: usize,
    pub reaction_to_species_arcs: usize,
    pub species_to_reaction_arcs: usize,
    pub scc_count: usize,
    pub strongly_connected: bool,
}

/// Spanning out- and in-trees rooted at vertex 0. Each parent entry names
/// the neighbour through which the vertex is reached from (or reaches) the
/// root; together they prove strong connectedness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachabilityWitness {
    pub root: usize,
    pub forward_parent: Vec<Option<usize>>,
    pub backward_parent: Vec<Option<usize>>,
}

/// Builds the graph: `R_j → S_i` when `Γ_ij ≠ 0`, and `S_i → R_j` when
/// `∂v_j/∂x_i` is nonzero at interior points, i.e. for every participant of
/// a reversible reaction and for the reactants of an irreversible one.
pub fn build_dsr(net: &Network) -> DsrGraph {
    let n = net.n_species();
    let gamma = net.stoichiometric_matrix();
    let mut arcs = Vec::new();
    for (j, r) in net.reactions().iter().enumerate() {
        for i in 0..n {
            let g = &gamma[(i, j)];
            if num::Zero::is_zero(g) {
                continue;
            }
            let sign = if num::Signed::is_positive(g) { 1 } else { -1 };
            arcs.push(Arc {
                from: Vertex::Reaction(j),
                to: Vertex::Species(i),
                sign,
            });
        }
        for &i in r.left.keys() {
            arcs.push(Arc {
                from: Vertex::Species(i),
                to: Vertex::Reaction(j),
                sign: 1,
            });
        }
        if r.reversible {
            for &i in r.right.keys() {
                arcs.push(Arc {
                    from: Vertex::Species(i),
                    to: Vertex::Reaction(j),
                    sign: -1,
                });
            }
        }
    }
    let names = net.species().iter().map(|s| s.name.clone()).collect();
    DsrGraph::from_arcs(names, net.n_reactions(), arcs)
}

impl DsrGraph {
    fn from_arcs(species_names: Vec<String>, n_reactions: usize, arcs: Vec<Arc>) -> DsrGraph {
        let n = species_names.len();
        let mut adj = vec![Vec::new(); n + n_reactions];
        let id = |v: Vertex| match v {
            Vertex::Species(i) => i,
            Vertex::Reaction(j) => n + j,
        };
        for a in &arcs {
            adj[id(a.from)].push(id(a.to));
        }
        DsrGraph {
            species_names,
            n_reactions,
            arcs,
            adj,
        }
    }

    pub fn n_species(&self) -> usize {
        self.species_names.len()
    }

    pub fn n_reactions(&self) -> usize {
        self.n_reactions
    }

    pub fn n_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Out-neighbours by vertex id.
    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn vertex(&self, id: usize) -> Vertex {
        let n = self.n_species();
        if id < n {
            Vertex::Species(id)
        } else {
            Vertex::Reaction(id - n)
        }
    }

    pub fn vertex_name(&self, v: Vertex) -> String {
        match v {
            Vertex::Species(i) => format!("S:{}", self.species_names[i]),
            Vertex::Reaction(j) => format!("R:{j}"),
        }
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.adj.get(from).is_some_and(|out| out.contains(&to))
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        tarjan_scc(&self.adj)
    }

    pub fn scc_count(&self) -> usize {
        self.components().len()
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.scc_count() == 1
    }

    pub fn reaction_to_species_arcs(&self) -> usize {
        self.arcs
            .iter()
            .filter(|a| matches!(a.from, Vertex::Reaction(_)))
            .count()
    }

    pub fn species_to_reaction_arcs(&self) -> usize {
        self.arcs.len() - self.reaction_to_species_arcs()
    }

    pub fn summary(&self) -> DsrSummary {
        let scc_count = self.scc_count();
        DsrSummary {
            species_vertices: self.n_species(),
            reaction_vertices: self.n_reactions,
            reaction_to_species_arcs: self.reaction_to_species_arcs(),
            species_to_reaction_arcs: self.species_to_reaction_arcs(),
            scc_count,
            strongly_connected: scc_count == 1,
        }
    }

    /// BFS trees from and to vertex 0; `None` unless strongly connected.
    pub fn reachability_witness(&self) -> Option<ReachabilityWitness> {
        let nv = self.n_vertices();
        let mut reverse = vec![Vec::new(); nv];
        for (v, out) in self.adj.iter().enumerate() {
            for &w in out {
                reverse[w].push(v);
            }
        }
        let forward_parent = bfs_tree(&self.adj, 0)?;
        let backward_parent = bfs_tree(&reverse, 0)?;
        Some(ReachabilityWitness {
            root: 0,
            forward_parent,
            backward_parent,
        })
    }

    /// Independent check of a witness against this graph.
    pub fn verify_witness(&self, w: &ReachabilityWitness) -> bool {
        let nv = self.n_vertices();
        if w.root >= nv || w.forward_parent.len() != nv || w.backward_parent.len() != nv {
            return false;
        }
        let reaches_root = |parents: &[Option<usize>], forward: bool| {
            (0..nv).all(|start| {
                let mut v = start;
                for _ in 0..nv {
                    if v == w.root {
                        return true;
                    }
                    let Some(p) = parents[v] else { return false };
                    let arc_ok = if forward { self.has_arc(p, v) } else { self.has_arc(v, p) };
                    if p >= nv || !arc_ok {
                        return false;
                    }
                    v = p;
                }
                v == w.root
            })
        };
        reaches_root(&w.forward_parent, true) && reaches_root(&w.backward_parent, false)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dsr {\n");
        for i in 0..self.n_species() {
            let _ = writeln!(out, "  \"{}\" [shape=ellipse];", self.vertex_name(Vertex::Species(i)));
        }
        for j in 0..self.n_reactions {
            let _ = writeln!(out, "  \"{}\" [shape=box];", self.vertex_name(Vertex::Reaction(j)));
        }
        for a in &self.arcs {
            let style = if a.sign > 0 { "solid" } else { "dashed" };
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [style={style}];",
                self.vertex_name(a.from),
                self.vertex_name(a.to)
            );
        }
        out.push_str("}\n");
        out
    }
}

fn bfs_tree(adj: &[Vec<usize>], root: usize) -> Option<Vec<Option<usize>>> {
    let nv = adj.len();
    let mut parent = vec![None; nv];
    let mut seen = vec![false; nv];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                queue.push_back(w);
            }
        }
    }
    seen.iter().all(|&s| s).then_some(parent)
}
