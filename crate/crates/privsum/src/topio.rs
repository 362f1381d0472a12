//! Topology ingestion and synthesis: edge-list parsing, random-graph
//! generators, and bipartite ratings graphs.
//!
//! Edge-list grammar: whitespace-separated `u v` integer pairs, one per
//! line, `#` comments allowed. Ratings files extend lines to `u v rating`.

use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeSet;

/// An undirected simple graph with dense node ids in `[0, n)`.
#[derive(Debug, Clone)]
pub struct Topology {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    /// For bipartite graphs: the first `m` nodes are one side.
    bipartite_split: Option<usize>,
}

impl Topology {
    pub fn from_edges(n: usize, raw_edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(u, v) in raw_edges {
            if u >= n || v >= n {
                return Err(Error::Argument(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(Error::Argument(format!("self-loop at node {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(Topology {
            n,
            edges,
            adjacency,
            bipartite_split: None,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn bipartite_split(&self) -> Option<usize> {
        self.bipartite_split
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Canonical edge-list text form; parsing it back yields an identical
    /// topology.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# nodes {}\n", self.n));
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Parse an edge-list text into a topology. Node count is one past the
/// largest id seen, or the `# nodes` header when present.
pub fn parse_edge_list(text: &str) -> Result<Topology> {
    let mut edges = Vec::new();
    let mut declared_n: Option<usize> = None;
    let mut max_id = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(count) = rest.strip_prefix("nodes") {
                declared_n = Some(count.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad node count in header: {rest}"),
                })?);
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (u, v) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected 'u v', got '{line}'"),
                })
            }
        };
        let u: usize = u.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad node id '{u}'"),
        })?;
        let v: usize = v.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad node id '{v}'"),
        })?;
        if u == v {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("self-loop at node {u}"),
            });
        }
        max_id = max_id.max(u).max(v);
        edges.push((u, v));
    }
    let n = match declared_n {
        Some(n) => {
            if !edges.is_empty() && max_id >= n {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("node id {max_id} out of declared range {n}"),
                });
            }
            n
        }
        None => {
            if edges.is_empty() {
                0
            } else {
                max_id + 1
            }
        }
    };
    Topology::from_edges(n, &edges)
}

/// A sparse ratings graph: bipartite edges with real ratings attached.
#[derive(Debug, Clone)]
pub struct RatingsGraph {
    pub users: usize,
    pub items: usize,
    /// (user, item, rating)
    pub ratings: Vec<(usize, usize, f64)>,
}

/// Parse `u v rating` lines; `u` indexes users, `v` items.
pub fn parse_ratings(text: &str) -> Result<RatingsGraph> {
    let mut ratings = Vec::new();
    let mut users = 0;
    let mut items = 0;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 'u v rating', got '{line}'"),
            });
        }
        let u: usize = parts[0].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad user id '{}'", parts[0]),
        })?;
        let v: usize = parts[1].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad item id '{}'", parts[1]),
        })?;
        let r: f64 = parts[2].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad rating '{}'", parts[2]),
        })?;
        users = users.max(u + 1);
        items = items.max(v + 1);
        ratings.push((u, v, r));
    }
    Ok(RatingsGraph {
        users,
        items,
        ratings,
    })
}

/// Random-graph models standing in for the real experiment topologies.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphModel {
    ErdosRenyi { n: usize, p: f64 },
    PreferentialAttachment { n: usize, k: usize },
    Bipartite { m: usize, n: usize, density: f64 },
}

/// Generate a topology, deterministic for a fixed seed.
pub fn generate(model: &GraphModel, seed: u64) -> Result<Topology> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    match model {
        GraphModel::ErdosRenyi { n, p } => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::Argument(format!("edge probability {p} out of [0,1]")));
            }
            let mut edges = Vec::new();
            for u in 0..*n {
                for v in u + 1..*n {
                    if rng.gen_bool(*p) {
                        edges.push((u, v));
                    }
                }
            }
            let mut topo = Topology::from_edges(*n, &edges)?;
            topo.bipartite_split = None;
            Ok(topo)
        }
        GraphModel::PreferentialAttachment { n, k } => {
            if *k == 0 || *n <= *k {
                return Err(Error::Argument(format!(
                    "preferential attachment needs n > k >= 1, got n={n} k={k}"
                )));
            }
            // seed clique on the first k+1 nodes, then attach by degree
            let mut edges: Vec<(usize, usize)> = Vec::new();
            let mut endpoint_pool: Vec<usize> = Vec::new();
            for u in 0..=*k {
                for v in u + 1..=*k {
                    edges.push((u, v));
                    endpoint_pool.push(u);
                    endpoint_pool.push(v);
                }
            }
            for u in k + 1..*n {
                let mut chosen = BTreeSet::new();
                while chosen.len() < *k {
                    let target = endpoint_pool[rng.gen_range(0..endpoint_pool.len())];
                    if target != u {
                        chosen.insert(target);
                    }
                }
                for v in chosen {
                    edges.push((u, v));
                    endpoint_pool.push(u);
                    endpoint_pool.push(v);
                }
            }
            Topology::from_edges(*n, &edges)
        }
        GraphModel::Bipartite { m, n, density } => {
            if !(0.0..=1.0).contains(density) {
                return Err(Error::Argument(format!("density {density} out of [0,1]")));
            }
            let mut edges = Vec::new();
            for u in 0..*m {
                for v in 0..*n {
                    if rng.gen_bool(*density) {
                        edges.push((u, m + v));
                    }
                }
            }
            let mut topo = Topology::from_edges(m + n, &edges)?;
            topo.bipartite_split = Some(*m);
            Ok(topo)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_path() {
        let t = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.edge_count(), 2);
        assert_eq!(t.neighbors(1), &[0, 2]);
    }

    #[test]
    fn duplicate_edges_dedup() {
        let t = parse_edge_list("0 1\n1 0\n0 1").unwrap();
        assert_eq!(t.edge_count(), 1);
    }

    #[test]
    fn malformed_lines_located() {
        match parse_edge_list("0 1\nnope").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse_edge_list("0 0").is_err());
        assert!(parse_edge_list("# nodes 2\n0 5").is_err());
        assert!(parse_edge_list("1 2 3 4").is_err());
    }

    #[test]
    fn emit_parse_round_trip() {
        for seed in 0..100u64 {
            let t = generate(
                &GraphModel::ErdosRenyi {
                    n: 20,
                    p: 0.2 + (seed as f64 % 5.0) * 0.1,
                },
                seed,
            )
            .unwrap();
            let back = parse_edge_list(&t.to_edge_list()).unwrap();
            assert_eq!(back.node_count(), t.node_count());
            assert_eq!(back.edges(), t.edges());
        }
    }

    #[test]
    fn er_zero_probability_empty() {
        let t = generate(&GraphModel::ErdosRenyi { n: 10, p: 0.0 }, 1).unwrap();
        assert_eq!(t.edge_count(), 0);
        assert_eq!(t.node_count(), 10);
    }

    #[test]
    fn bipartite_complete() {
        let t = generate(
            &GraphModel::Bipartite {
                m: 3,
                n: 4,
                density: 1.0,
            },
            1,
        )
        .unwrap();
        assert_eq!(t.edge_count(), 12);
        assert_eq!(t.bipartite_split(), Some(3));
        // edges only cross the split
        for &(u, v) in t.edges() {
            assert!(u < 3 && v >= 3);
        }
    }

    #[test]
    fn generators_seed_deterministic() {
        let a = generate(&GraphModel::ErdosRenyi { n: 50, p: 0.1 }, 9).unwrap();
        let b = generate(&GraphModel::ErdosRenyi { n: 50, p: 0.1 }, 9).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = generate(&GraphModel::PreferentialAttachment { n: 50, k: 3 }, 9).unwrap();
        let d = generate(&GraphModel::PreferentialAttachment { n: 50, k: 3 }, 9).unwrap();
        assert_eq!(c.edges(), d.edges());
    }

    #[test]
    fn preferential_attachment_heavier_tail_than_er() {
        let pa = generate(&GraphModel::PreferentialAttachment { n: 5000, k: 3 }, 42).unwrap();
        let p = 2.0 * pa.edge_count() as f64 / (5000.0 * 4999.0);
        let er = generate(&GraphModel::ErdosRenyi { n: 5000, p }, 42).unwrap();
        let max_deg = |t: &Topology| (0..t.node_count()).map(|i| t.degree(i)).max().unwrap();
        // tail ratio: the hub degree of the PA graph dwarfs the ER maximum
        assert!(
            max_deg(&pa) as f64 > 2.0 * max_deg(&er) as f64,
            "pa {} er {}",
            max_deg(&pa),
            max_deg(&er)
        );
    }

    #[test]
    fn ratings_parse() {
        let r = parse_ratings("# comment\n0 0 4.5\n1 2 -1.25").unwrap();
        assert_eq!(r.users, 2);
        assert_eq!(r.items, 3);
        assert_eq!(r.ratings[1], (1, 2, -1.25));
        assert!(parse_ratings("0 0").is_err());
    }
}
