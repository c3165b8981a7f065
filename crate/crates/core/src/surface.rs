//! Flag-level encoding of maps on arbitrary surfaces.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{MapError, Result};

/// Index into the flag set `[0, 4e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flag(pub usize);

/// Index of a vertex orbit, numbered by first appearance in flag order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(pub usize);

/// Surface of type `h`, stored as `2h` so that half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceType {
    pub h2: u32,
    pub orientable: bool,
}

impl SurfaceType {
    pub const SPHERE: SurfaceType = SurfaceType { h2: 0, orientable: true };
    pub const PROJECTIVE_PLANE: SurfaceType = SurfaceType { h2: 1, orientable: false };
    pub const TORUS: SurfaceType = SurfaceType { h2: 2, orientable: true };
    pub const KLEIN_BOTTLE: SurfaceType = SurfaceType { h2: 2, orientable: false };

    /// Orientable surfaces need integer type; the sphere counts as orientable only.
    pub fn new(h2: u32, orientable: bool) -> Result<Self> {
        if (orientable && h2 % 2 == 1) || (!orientable && h2 == 0) {
            return Err(MapError::UnsupportedSurface(format!(
                "h={} orientable={orientable}",
                h2 as f64 / 2.0
            )));
        }
        Ok(SurfaceType { h2, orientable })
    }

    pub fn h(&self) -> f64 {
        self.h2 as f64 / 2.0
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - self.h2 as i64
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orientable {
            write!(f, "S{}", self.h2 / 2)
        } else if self.h2 % 2 == 0 {
            write!(f, "N{}", self.h2 / 2)
        } else {
            write!(f, "N{}.5", self.h2 / 2)
        }
    }
}

impl FromStr for SurfaceType {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || MapError::UnsupportedSurface(s.to_string());
        let (orientable, rest) = match s.chars().next() {
            Some('S') => (true, &s[1..]),
            Some('N') => (false, &s[1..]),
            _ => return Err(bad()),
        };
        let h: f64 = rest.parse().map_err(|_| bad())?;
        let h2 = (h * 2.0).round();
        if h2 < 0.0 || (h2 - h * 2.0).abs() > 1e-9 {
            return Err(bad());
        }
        SurfaceType::new(h2 as u32, orientable)
    }
}

/// A map given by three involutions on its flags.
///
/// tau0 moves to the other endpoint of the edge, tau1 to the other edge of the
/// corner and tau2 to the other side of the edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedMap {
    tau: [Vec<usize>; 3],
    root: usize,
    vertex: Vec<usize>,
    edge: Vec<usize>,
    face: Vec<usize>,
    counts: [usize; 3],
}

fn orbits(a: &[usize], b: &[usize]) -> (Vec<usize>, usize) {
    let mut id = vec![usize::MAX; a.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..a.len() {
        if id[start] != usize::MAX {
            continue;
        }
        id[start] = count;
        stack.push(start);
        while let Some(f) = stack.pop() {
            for g in [a[f], b[f]] {
                if id[g] == usize::MAX {
                    id[g] = count;
                    stack.push(g);
                }
            }
        }
        count += 1;
    }
    (id, count)
}

impl EmbeddedMap {
    pub fn new(tau0: Vec<usize>, tau1: Vec<usize>, tau2: Vec<usize>, root: usize) -> Result<Self> {
        let len = tau0.len();
        if len == 0 || len % 4 != 0 || tau1.len() != len || tau2.len() != len {
            return Err(MapError::BadFlagCount(len));
        }
        if root >= len {
            return Err(MapError::IndexOutOfRange { index: root, bound: len });
        }
        for (which, t) in [&tau0, &tau1, &tau2].into_iter().enumerate() {
            for f in 0..len {
                let g = t[f];
                if g >= len {
                    return Err(MapError::IndexOutOfRange { index: g, bound: len });
                }
                if g == f || t[g] != f {
                    return Err(MapError::NotInvolution { which, flag: f });
                }
            }
        }
        for f in 0..len {
            if tau0[tau2[f]] != tau2[tau0[f]] {
                return Err(MapError::NotCommuting(f));
            }
            // an edge has exactly four flags
            if tau0[f] == tau2[f] {
                return Err(MapError::NotCommuting(f));
            }
        }
        let mut seen = vec![false; len];
        let mut stack = vec![root];
        seen[root] = true;
        let mut reached = 1;
        while let Some(f) = stack.pop() {
            for t in [&tau0, &tau1, &tau2] {
                if !seen[t[f]] {
                    seen[t[f]] = true;
                    reached += 1;
                    stack.push(t[f]);
                }
            }
        }
        if reached != len {
            return Err(MapError::Disconnected);
        }
        let (vertex, nv) = orbits(&tau1, &tau2);
        let (edge, ne) = orbits(&tau0, &tau2);
        let (face, nf) = orbits(&tau0, &tau1);
        Ok(EmbeddedMap { tau: [tau0, tau1, tau2], root, vertex, edge, face, counts: [nv, ne, nf] })
    }

    pub fn flag_count(&self) -> usize {
        self.tau[0].len()
    }

    pub fn root(&self) -> Flag {
        Flag(self.root)
    }

    pub fn tau(&self, which: usize, f: Flag) -> Flag {
        Flag(self.tau[which][f.0])
    }

    pub fn tau0(&self, f: Flag) -> Flag {
        Flag(self.tau[0][f.0])
    }

    pub fn tau1(&self, f: Flag) -> Flag {
        Flag(self.tau[1][f.0])
    }

    pub fn tau2(&self, f: Flag) -> Flag {
        Flag(self.tau[2][f.0])
    }

    pub fn involution(&self, which: usize) -> &[usize] {
        &self.tau[which]
    }

    pub fn vertex_of(&self, f: Flag) -> Vertex {
        Vertex(self.vertex[f.0])
    }

    pub fn edge_of(&self, f: Flag) -> usize {
        self.edge[f.0]
    }

    pub fn face_of(&self, f: Flag) -> usize {
        self.face[f.0]
    }

    pub fn vertex_count(&self) -> usize {
        self.counts[0]
    }

    pub fn edge_count(&self) -> usize {
        self.counts[1]
    }

    pub fn face_count(&self) -> usize {
        self.counts[2]
    }

    pub fn root_vertex(&self) -> Vertex {
        self.vertex_of(self.root())
    }

    /// Same map with another root flag.
    pub fn reroot(&self, root: Flag) -> EmbeddedMap {
        assert!(root.0 < self.flag_count());
        EmbeddedMap { root: root.0, ..self.clone() }
    }

    /// Number of edge-ends at `v` (a loop counts twice).
    pub fn degree(&self, v: Vertex) -> usize {
        self.vertex.iter().filter(|&&x| x == v.0).count() / 2
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count()];
        for &v in &self.vertex {
            d[v] += 1;
        }
        d.iter().map(|x| x / 2).collect()
    }

    /// One flag per edge, pointing from `vertex_of(f)` to `vertex_of(tau0 f)`.
    pub fn edge_flags(&self) -> Vec<Flag> {
        let mut rep = vec![usize::MAX; self.edge_count()];
        for f in 0..self.flag_count() {
            if rep[self.edge[f]] == usize::MAX {
                rep[self.edge[f]] = f;
            }
        }
        rep.into_iter().map(Flag).collect()
    }

    /// Vertex adjacency lists with multiplicity.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for f in self.edge_flags() {
            let a = self.vertex[f.0];
            let b = self.vertex[self.tau[0][f.0]];
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Face degrees, counted in edge-sides.
    pub fn face_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.face_count()];
        for &x in &self.face {
            d[x] += 1;
        }
        d.iter().map(|x| x / 2).collect()
    }

    pub fn is_orientable(&self) -> bool {
        let len = self.flag_count();
        let mut color = vec![u8::MAX; len];
        color[0] = 0;
        let mut stack = vec![0];
        while let Some(f) = stack.pop() {
            for t in &self.tau {
                let g = t[f];
                if color[g] == u8::MAX {
                    color[g] = 1 - color[f];
                    stack.push(g);
                } else if color[g] == color[f] {
                    return false;
                }
            }
        }
        true
    }

    pub fn euler_type(&self) -> SurfaceType {
        let h2 = self.edge_count() as i64 - self.vertex_count() as i64 - self.face_count() as i64 + 2;
        debug_assert!(h2 >= 0);
        SurfaceType { h2: h2 as u32, orientable: self.is_orientable() }
    }

    /// Proper two-colouring of the vertices with the root vertex coloured 0.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let d = bfs_distances(self, self.root_vertex());
        let adj = self.adjacency();
        for (a, list) in adj.iter().enumerate() {
            for &b in list {
                if d[a] % 2 == d[b] % 2 {
                    return None;
                }
            }
        }
        Some(d.iter().map(|x| (x % 2) as u8).collect())
    }

    pub fn is_quadrangulation(&self) -> bool {
        self.face_degrees().iter().all(|&d| d == 4)
    }

    /// Validates a bipartite quadrangulation.
    pub fn check_quadrangulation(&self) -> Result<()> {
        if !self.is_quadrangulation() {
            return Err(MapError::NotQuadrangulation);
        }
        if self.bipartition().is_none() {
            return Err(MapError::NotBipartite);
        }
        Ok(())
    }
}

/// Graph distances from `v`.
pub fn bfs_distances(m: &EmbeddedMap, v: Vertex) -> Vec<u32> {
    multi_source_distances(m, &[(v, 0)])
}

/// `min_j (d(x, w_j) + delay_j)` for every vertex `x`.
pub fn multi_source_distances(m: &EmbeddedMap, sources: &[(Vertex, u32)]) -> Vec<u32> {
    let adj = m.adjacency();
    let mut dist = vec![u32::MAX; m.vertex_count()];
    // delays are small, so a bucket queue keeps this linear
    let maxd = sources.iter().map(|s| s.1).max().unwrap_or(0) as usize;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); maxd + 1];
    for &(w, d) in sources {
        buckets[d as usize].push(w.0);
    }
    let mut level = 0usize;
    let mut queue = VecDeque::new();
    loop {
        if level < buckets.len() {
            for &w in &buckets[level] {
                if dist[w] > level as u32 {
                    dist[w] = level as u32;
                    queue.push_back(w);
                }
            }
        }
        let mut next = VecDeque::new();
        while let Some(x) = queue.pop_front() {
            if dist[x] as usize != level {
                continue;
            }
            for &y in &adj[x] {
                if dist[y] > level as u32 + 1 {
                    dist[y] = level as u32 + 1;
                    next.push_back(y);
                }
            }
        }
        level += 1;
        if next.is_empty() && level >= buckets.len() {
            break;
        }
        queue = next;
    }
    dist
}

/// Relabeling-invariant encoding of a rooted map.
///
/// Flags are numbered in breadth-first order from the root, neighbours taken in
/// the order tau0, tau1, tau2; the code lists the three images of every flag.
pub fn canonical_code(m: &EmbeddedMap) -> Vec<u8> {
    let (order, index) = bfs_order(m);
    let mut out = Vec::with_capacity(4 + 12 * order.len());
    out.extend_from_slice(&(order.len() as u32).to_le_bytes());
    for &f in &order {
        for t in 0..3 {
            out.extend_from_slice(&(index[m.tau[t][f]] as u32).to_le_bytes());
        }
    }
    out
}

/// Canonical code extended by the label of every flag's vertex.
pub fn canonical_code_labeled(m: &EmbeddedMap, vertex_labels: &[i64]) -> Vec<u8> {
    let (order, _) = bfs_order(m);
    let mut out = canonical_code(m);
    for &f in &order {
        out.extend_from_slice(&vertex_labels[m.vertex[f]].to_le_bytes());
    }
    out
}

/// Canonical code extended by the canonical indices of some marked flags, in order.
pub fn canonical_code_marked(m: &EmbeddedMap, marks: &[Flag]) -> Vec<u8> {
    let (_, index) = bfs_order(m);
    let mut out = canonical_code(m);
    for f in marks {
        out.extend_from_slice(&(index[f.0] as u32).to_le_bytes());
    }
    out
}

/// Position of every flag in the canonical traversal from the root.
pub fn canonical_flag_index(m: &EmbeddedMap) -> Vec<usize> {
    bfs_order(m).1
}

/// Vertices in order of their first flag in the canonical traversal.
pub fn canonical_vertex_order(m: &EmbeddedMap) -> Vec<Vertex> {
    let (order, _) = bfs_order(m);
    let mut seen = vec![false; m.vertex_count()];
    let mut out = Vec::with_capacity(m.vertex_count());
    for f in order {
        let v = m.vertex[f];
        if !seen[v] {
            seen[v] = true;
            out.push(Vertex(v));
        }
    }
    out
}

/// First flag of each vertex in the canonical traversal.
pub fn canonical_vertex_flags(m: &EmbeddedMap) -> Vec<Flag> {
    let (order, _) = bfs_order(m);
    let mut out = vec![Flag(usize::MAX); m.vertex_count()];
    for f in order {
        if out[m.vertex[f]].0 == usize::MAX {
            out[m.vertex[f]] = Flag(f);
        }
    }
    out
}

fn bfs_order(m: &EmbeddedMap) -> (Vec<usize>, Vec<usize>) {
    let len = m.flag_count();
    let mut index = vec![usize::MAX; len];
    let mut order = Vec::with_capacity(len);
    index[m.root] = 0;
    order.push(m.root);
    let mut head = 0;
    while head < order.len() {
        let f = order[head];
        head += 1;
        for t in 0..3 {
            let g = m.tau[t][f];
            if index[g] == usize::MAX {
                index[g] = order.len();
                order.push(g);
            }
        }
    }
    (order, index)
}

/// Quadrangulation whose vertices are the vertices and faces of `m` and whose
/// edges are the corners of `m`.
///
/// Flag `(g, end)` of the result is `2g + end`, with `end = 0` at the vertex of
/// `m` and `end = 1` at the face; the root is `(root of m, 0)`.
pub fn tutte_quadrangulation(m: &EmbeddedMap) -> EmbeddedMap {
    let len = m.flag_count();
    let mut t0 = vec![0; 2 * len];
    let mut t1 = vec![0; 2 * len];
    let mut t2 = vec![0; 2 * len];
    for g in 0..len {
        for end in 0..2 {
            let x = 2 * g + end;
            t0[x] = 2 * g + (1 - end);
            t2[x] = 2 * m.tau[1][g] + end;
            t1[x] = if end == 0 { 2 * m.tau[2][g] } else { 2 * m.tau[0][g] + 1 };
        }
    }
    EmbeddedMap::new(t0, t1, t2, 2 * m.root).expect("corner quadrangulation is a valid map")
}

/// Inverse of [`tutte_quadrangulation`]: the map on the colour class of the root vertex.
pub fn tutte_map(q: &EmbeddedMap) -> Result<EmbeddedMap> {
    q.check_quadrangulation()?;
    let colour = q.bipartition().ok_or(MapError::NotBipartite)?;
    let black: Vec<usize> = (0..q.flag_count()).filter(|&f| colour[q.vertex[f]] == 0).collect();
    let mut id = vec![usize::MAX; q.flag_count()];
    for (i, &f) in black.iter().enumerate() {
        id[f] = i;
    }
    let (a, b, c) = (&q.tau[0], &q.tau[1], &q.tau[2]);
    let t0 = black.iter().map(|&f| id[a[b[a[f]]]]).collect();
    let t1 = black.iter().map(|&f| id[c[f]]).collect();
    let t2 = black.iter().map(|&f| id[b[f]]).collect();
    EmbeddedMap::new(t0, t1, t2, id[q.root])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plane map with one edge: two vertices, one face.
    fn one_edge() -> EmbeddedMap {
        // flags (end, side): 0=(a,L) 1=(b,L) 2=(a,R) 3=(b,R)
        EmbeddedMap::new(vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![2, 3, 0, 1], 0).unwrap()
    }

    #[test]
    fn one_edge_counts() {
        let m = one_edge();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (2, 1, 1));
        assert_eq!(m.euler_type(), SurfaceType::SPHERE);
    }

    #[test]
    fn invalid_involution_rejected() {
        let e = EmbeddedMap::new(vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![0, 3, 2, 1], 0);
        assert!(matches!(e, Err(MapError::NotInvolution { which: 2, .. })));
    }

    #[test]
    fn tutte_of_one_edge_has_one_face() {
        let q = tutte_quadrangulation(&one_edge());
        assert_eq!(q.face_count(), 1);
        assert_eq!(q.edge_count(), 2);
        assert_eq!(q.vertex_count(), 3);
        assert!(q.is_quadrangulation());
        assert_eq!(canonical_code(&tutte_map(&q).unwrap()), canonical_code(&one_edge()));
    }

    #[test]
    fn surface_names_round_trip() {
        for s in ["S0", "S1", "S2", "N0.5", "N1", "N1.5", "N2"] {
            assert_eq!(s.parse::<SurfaceType>().unwrap().to_string(), s);
        }
        assert!("S0.5".parse::<SurfaceType>().is_err());
        assert!("N0".parse::<SurfaceType>().is_err());
    }

    #[test]
    fn delayed_distances() {
        let q = tutte_quadrangulation(&one_edge());
        let d = bfs_distances(&q, q.root_vertex());
        assert_eq!(d[q.root_vertex().0], 0);
        let mut sorted = d.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2]);
    }
}
