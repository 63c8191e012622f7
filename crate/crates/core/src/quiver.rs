//! Finite acyclic quivers and their path combinatorics.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;

use crate::error::{Error, Result};

/// A path is a sequence of arrow indices, composed left to right.
pub type Path = Vec<usize>;

/// An acyclic quiver. Vertices are 0-based internally and 1-based in every text format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Quiver {
    n: usize,
    arrows: Vec<(usize, usize)>,
    #[serde(skip)]
    topo: Vec<usize>,
    // paths[v][u]: all paths v -> u, trivial path first when v == u
    #[serde(skip)]
    paths: Vec<Vec<Vec<Path>>>,
    #[serde(skip)]
    path_lookup: Vec<Vec<HashMap<Path, usize>>>,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.arrows == other.arrows
    }
}
impl Eq for Quiver {}

pub const PRESETS: &[&str] = &["A1", "A2", "A3", "A3b", "A3c", "A4", "A5", "D4", "D5", "E6"];

const PATH_LIMIT: usize = 10_000;

impl Quiver {
    pub fn new(n: usize, arrows: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("a quiver needs at least one vertex".into()));
        }
        for &(s, t) in &arrows {
            if s >= n || t >= n {
                return Err(Error::Config(format!("arrow {}->{} out of range", s + 1, t + 1)));
            }
        }
        let topo = topo_order(n, &arrows).ok_or_else(|| Error::Config("quiver has an oriented cycle".into()))?;
        let mut q = Quiver { n, arrows, topo, paths: Vec::new(), path_lookup: Vec::new() };
        q.build_paths()?;
        Ok(q)
    }

    /// Linear orientation `1 -> 2 -> ... -> n`.
    pub fn linear_a(n: usize) -> Result<Self> {
        Quiver::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect())
    }

    pub fn preset(name: &str) -> Result<Self> {
        let one = |pairs: &[(usize, usize)]| pairs.iter().map(|&(s, t)| (s - 1, t - 1)).collect::<Vec<_>>();
        match name {
            "A1" => Quiver::linear_a(1),
            "A2" => Quiver::linear_a(2),
            "A3" => Quiver::linear_a(3),
            "A3b" => Quiver::new(3, one(&[(1, 2), (3, 2)])),
            "A3c" => Quiver::new(3, one(&[(2, 1), (2, 3)])),
            "A4" => Quiver::linear_a(4),
            "A5" => Quiver::linear_a(5),
            "D4" => Quiver::new(4, one(&[(1, 4), (2, 4), (3, 4)])),
            "D5" => Quiver::new(5, one(&[(1, 2), (2, 3), (3, 4), (3, 5)])),
            "E6" => Quiver::new(6, one(&[(1, 2), (2, 3), (4, 3), (5, 4), (6, 3)])),
            _ => Err(Error::Config(format!("unknown quiver preset '{name}'"))),
        }
    }

    /// Parses the `vertices <n>` / `arrow <s> <t>` format. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut arrows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["vertices", k] => {
                    if n.is_some() {
                        return Err(err("duplicate 'vertices' declaration".into()));
                    }
                    let k: usize = k.parse().map_err(|_| err(format!("bad vertex count '{k}'")))?;
                    if k == 0 {
                        return Err(err("vertex count must be positive".into()));
                    }
                    n = Some(k);
                }
                ["arrow", s, t] => {
                    let Some(k) = n else {
                        return Err(err("'arrow' before 'vertices'".into()));
                    };
                    let s: usize = s.parse().map_err(|_| err(format!("bad vertex '{s}'")))?;
                    let t: usize = t.parse().map_err(|_| err(format!("bad vertex '{t}'")))?;
                    if s == 0 || t == 0 || s > k || t > k {
                        return Err(err(format!("vertex out of range 1..={k}")));
                    }
                    arrows.push((s - 1, t - 1));
                }
                _ => return Err(err(format!("unrecognised declaration '{line}'"))),
            }
        }
        let n = n.ok_or(Error::Parse { line: 0, msg: "missing 'vertices' declaration".into() })?;
        Quiver::new(n, arrows)
    }

    /// Canonical text form; round-trips through [`Quiver::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("vertices {}\n", self.n);
        for &(a, b) in &self.arrows {
            s.push_str(&format!("arrow {} {}\n", a + 1, b + 1));
        }
        s
    }

    /// Restores derived data after deserialisation.
    pub fn rehydrate(self) -> Result<Quiver> {
        Quiver::new(self.n, self.arrows)
    }

    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }
    #[inline]
    pub fn source(&self, a: usize) -> usize {
        self.arrows[a].0
    }
    #[inline]
    pub fn target(&self, a: usize) -> usize {
        self.arrows[a].1
    }
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    /// All paths `v -> u`.
    pub fn paths(&self, v: usize, u: usize) -> &[Path] {
        &self.paths[v][u]
    }

    pub fn path_index(&self, v: usize, u: usize, p: &[usize]) -> Option<usize> {
        self.path_lookup[v][u].get(p).copied()
    }

    /// Symmetric Euler form `(x,y) = <x,y> + <y,x>`.
    pub fn symmetric_form(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s: i64 = 2 * x.iter().zip(y).map(|(a, b)| a * b).sum::<i64>();
        for &(a, b) in &self.arrows {
            s -= x[a] * y[b] + x[b] * y[a];
        }
        s
    }

    fn build_paths(&mut self) -> Result<()> {
        let n = self.n;
        let mut paths = vec![vec![Vec::<Path>::new(); n]; n];
        let mut total = 0usize;
        for v in 0..n {
            paths[v][v].push(Vec::new());
            // extend along the topological order so every prefix is present first
            for &u in &self.topo {
                let current = paths[v][u].clone();
                for (a, &(s, t)) in self.arrows.iter().enumerate() {
                    if s != u {
                        continue;
                    }
                    for p in &current {
                        let mut q = p.clone();
                        q.push(a);
                        paths[v][t].push(q);
                        total += 1;
                        if total > PATH_LIMIT {
                            return Err(Error::SearchSpace(format!("more than {PATH_LIMIT} paths")));
                        }
                    }
                }
            }
        }
        let lookup = paths
            .iter()
            .map(|row| row.iter().map(|ps| ps.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect()).collect())
            .collect();
        self.paths = paths;
        self.path_lookup = lookup;
        Ok(())
    }
}

fn topo_order(n: usize, arrows: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    for &(_, t) in arrows {
        indeg[t] += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &(s, t) in arrows {
            if s == v {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.insert(t);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build() {
        for name in PRESETS {
            Quiver::preset(name).unwrap();
        }
        assert!(Quiver::preset("Z9").is_err());
    }

    #[test]
    fn parse_round_trip() {
        let q = Quiver::parse("vertices 3\narrow 1 2\n\n# comment\narrow 3 2\n").unwrap();
        assert_eq!(q.arrows(), &[(0, 1), (2, 1)]);
        let again = Quiver::parse(&q.to_text()).unwrap();
        assert_eq!(q, again);
        assert_eq!(q.content_hash(), again.content_hash());
    }

    #[test]
    fn parse_errors_carry_line() {
        match Quiver::parse("vertices 2\narow 1 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Quiver::parse("vertices 2\narrow 1 3\n").is_err());
        assert!(Quiver::parse("arrow 1 2\n").is_err());
        assert!(Quiver::parse("vertices 2\narrow 1 2\narrow 2 1\n").is_err());
    }

    #[test]
    fn path_counts_a3() {
        let q = Quiver::linear_a(3).unwrap();
        assert_eq!(q.paths(0, 2).len(), 1);
        assert_eq!(q.paths(0, 0).len(), 1);
        assert_eq!(q.paths(2, 0).len(), 0);
        assert_eq!(q.path_index(0, 2, &[0, 1]), Some(0));
    }
}
