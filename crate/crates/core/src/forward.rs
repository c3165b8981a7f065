//! Forward construction: the dual exploration graph of a quadrangulation and
//! the labeled one-face map read from it.
//!
//! Blue vertices live in corners of faces of `q`. A blue vertex owns the
//! edge-sides its edges cross; an edge-side is the pair `{f, tau0 f}` and is
//! indexed by either flag.

use crate::error::{MapError, Result};
use crate::polygon::{FacedMap, UnicellularMap};
use crate::surface::{multi_source_distances, EmbeddedMap, Flag, Vertex};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceType {
    /// Corner labels `(i-1, i, i-1, i)`.
    Simple(i64),
    /// Corner labels `(i-1, i, i+1, i)`.
    Growing(i64),
}

/// Blue content of a growing face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceKind {
    NoBlue,
    OneDeg2,
    OneDeg3,
    Two12,
    Two13,
}

impl FaceKind {
    fn allowed(self, next: FaceKind) -> bool {
        use FaceKind::*;
        matches!(
            (self, next),
            (NoBlue, OneDeg2) | (OneDeg2, OneDeg3) | (OneDeg2, Two12) | (OneDeg3, Two13) | (Two12, Two13)
        )
    }
}

/// A delayed source given by a flag at the source vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceFlag {
    pub root: Flag,
    pub delay: u32,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DegOptions {
    /// Check the blue-graph and face-kind invariants after every step.
    pub check_invariants: bool,
}

#[derive(Debug, Clone)]
pub struct BlueVertex {
    pub face: usize,
    /// Flags of the edge-sides crossed by the edges at this vertex.
    pub sides: Vec<Flag>,
    /// Edge of `q` crossed by the outgoing blue edge.
    pub out_edge: usize,
    pub component: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlueEdge {
    pub tail: usize,
    pub head: usize,
    /// Flag of the tail-side edge-side of the crossed black edge.
    pub tail_side: Flag,
}

/// Terminated dual exploration graph.
#[derive(Debug, Clone)]
pub struct DegState {
    pub labels: Vec<i64>,
    pub face_types: Vec<FaceType>,
    pub face_kinds: Vec<Option<FaceKind>>,
    pub blue_vertices: Vec<BlueVertex>,
    /// Indexed by the edges of `q`.
    pub blue_edges: Vec<Option<BlueEdge>>,
    /// Crossed edges of `q` in creation order.
    pub blue_order: Vec<usize>,
    /// Number of edges drawn by the initial cycles.
    pub initial_edges: usize,
    /// Final position of each component's last visited corner.
    pub lvc: Vec<Flag>,
    pub current_level: i64,
    pub steps: usize,
}

fn face_flags(q: &EmbeddedMap) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); q.face_count()];
    let mut done = vec![false; q.face_count()];
    for f in 0..q.flag_count() {
        let fc = q.face_of(Flag(f));
        if done[fc] {
            continue;
        }
        done[fc] = true;
        let mut g = Flag(f);
        loop {
            out[fc].push(g.0);
            let e = q.tau0(g);
            out[fc].push(e.0);
            g = q.tau1(e);
            if g.0 == f {
                break;
            }
        }
    }
    out
}

/// Tags every face as simple or growing; labels must change by 1 along edges.
pub fn classify_faces(q: &EmbeddedMap, labels: &[i64]) -> Result<Vec<FaceType>> {
    if !q.is_quadrangulation() {
        return Err(MapError::NotQuadrangulation);
    }
    let mut out = Vec::with_capacity(q.face_count());
    for flags in face_flags(q) {
        let ls: Vec<i64> = flags.iter().step_by(2).map(|&f| labels[q.vertex_of(Flag(f)).0]).collect();
        for k in 0..4 {
            if (ls[k] - ls[(k + 1) % 4]).abs() != 1 {
                return Err(MapError::LabelsNotDistances);
            }
        }
        let min = *ls.iter().min().unwrap();
        let max = *ls.iter().max().unwrap();
        out.push(if max == min + 1 { FaceType::Simple(max) } else { FaceType::Growing(min + 1) });
    }
    Ok(out)
}

/// Checks that `labels` are the graph distances from the vertex labeled 0.
pub fn check_distance_labels(q: &EmbeddedMap, root: Vertex, labels: &[i64]) -> Result<()> {
    let d = crate::surface::bfs_distances(q, root);
    if d.iter().zip(labels).any(|(&a, &b)| a as i64 != b) {
        return Err(MapError::LabelsNotDistances);
    }
    Ok(())
}

struct Deg<'a> {
    q: &'a EmbeddedMap,
    t: [&'a [usize]; 3],
    labels: Vec<i64>,
    face_types: Vec<FaceType>,
    kinds: Vec<Option<FaceKind>>,
    blue: Vec<BlueVertex>,
    face_blue: Vec<Vec<usize>>,
    side_owner: Vec<usize>,
    cross: Vec<Option<BlueEdge>>,
    order: Vec<usize>,
    lvc: Vec<usize>,
    check: bool,
}

impl<'a> Deg<'a> {
    fn lab(&self, f: usize) -> i64 {
        self.labels[self.q.vertex_of(Flag(f)).0]
    }

    fn edge(&self, f: usize) -> usize {
        self.q.edge_of(Flag(f))
    }

    fn face(&self, f: usize) -> usize {
        self.q.face_of(Flag(f))
    }

    fn own(&mut self, b: usize, f: usize) {
        debug_assert_eq!(self.side_owner[f], NONE);
        self.side_owner[f] = b;
        self.side_owner[self.t[0][f]] = b;
        self.blue[b].sides.push(Flag(f));
    }

    fn add_blue(&mut self, face: usize, component: usize) -> usize {
        self.blue.push(BlueVertex { face, sides: Vec::new(), out_edge: NONE, component });
        self.face_blue[face].push(self.blue.len() - 1);
        self.blue.len() - 1
    }

    fn set_kind(&mut self, face: usize, next: FaceKind) -> Result<()> {
        if let Some(k) = self.kinds[face] {
            if !k.allowed(next) {
                return Err(MapError::InternalInvariantViolated(format!("face {face} moved from {k:?} to {next:?}")));
            }
            self.kinds[face] = Some(next);
        }
        Ok(())
    }

    fn cross_edge(&mut self, tail: usize, head: usize, tail_side: usize) {
        let e = self.edge(tail_side);
        debug_assert!(self.cross[e].is_none());
        self.cross[e] = Some(BlueEdge { tail, head, tail_side: Flag(tail_side) });
        self.blue[tail].out_edge = e;
        self.order.push(e);
    }

    /// Blue cycle around a source vertex, rotating from its root flag.
    fn init_cycle(&mut self, r: usize, component: usize) -> Result<()> {
        let mut corners = Vec::new();
        let mut x = r;
        loop {
            corners.push(x);
            x = self.t[2][self.t[1][x]];
            if x == r {
                break;
            }
        }
        let ids: Vec<usize> = corners.iter().map(|&x| self.add_blue(self.face(x), component)).collect();
        for (k, &x) in corners.iter().enumerate() {
            let b = ids[k];
            self.own(b, x);
            self.own(b, self.t[1][x]);
            let face = self.face(x);
            if matches!(self.face_types[face], FaceType::Growing(_)) {
                self.set_kind(face, FaceKind::OneDeg2)?;
            }
        }
        for k in 0..corners.len() {
            let next = ids[(k + 1) % corners.len()];
            self.cross_edge(ids[k], next, self.t[1][corners[k]]);
        }
        self.lvc.push(self.t[0][r]);
        Ok(())
    }

    fn tour_step(&self, h: usize) -> usize {
        let b = self.side_owner[h];
        let mut x = self.t[1][h];
        while self.side_owner[x] != b {
            x = self.t[1][self.t[0][x]];
        }
        self.t[2][x]
    }

    fn free_sides(&self, face_flags: &[usize]) -> Vec<usize> {
        face_flags.iter().step_by(2).copied().filter(|&f| self.side_owner[f] == NONE).collect()
    }

    fn selectable(&self, face: usize, i: i64) -> bool {
        self.face_types[face] == FaceType::Growing(i) && self.face_blue[face].len() == 1
    }

    /// Edge-side of the branch start in a selected face, as the flag at its label-i end.
    fn choose_side(&self, face: usize, flags: &[usize], i: i64) -> Result<usize> {
        let free = self.free_sides(flags);
        let side = match free.len() {
            1 => free[0],
            2 => {
                let u = self.face_blue[face][0];
                let be = self.cross[self.blue[u].out_edge].expect("out edge is crossed");
                let t = be.tail_side.0;
                let g_a = if self.lab(t) == i - 1 { t } else { self.t[0][t] };
                self.t[1][self.t[0][g_a]]
            }
            _ => return Err(MapError::InternalInvariantViolated(format!("selected face {face} has {} free sides", free.len()))),
        };
        Ok(if self.lab(side) == i { side } else { self.t[0][side] })
    }

    /// The blue vertex at the label-(i-1) corner of a growing face.
    fn low_corner_vertex(&self, face: usize, i: i64) -> Option<usize> {
        self.face_blue[face].iter().copied().find(|&b| {
            self.blue[b].sides.iter().any(|&s| self.lab(s.0).min(self.lab(self.t[0][s.0])) == i - 1)
        })
    }

    fn branch(&mut self, face: usize, g: usize, i: i64) -> Result<()> {
        let bad = |m: String| MapError::InternalInvariantViolated(m);
        let u = self.face_blue[face][0];
        let component = self.blue[u].component;
        let next_kind = match self.kinds[face] {
            Some(FaceKind::OneDeg2) => FaceKind::Two12,
            Some(FaceKind::OneDeg3) => FaceKind::Two13,
            k => return Err(bad(format!("selected face of kind {k:?}"))),
        };
        self.set_kind(face, next_kind)?;
        let first = self.add_blue(face, component);
        self.own(first, g);
        let mut cur_blue = first;
        let mut cur = g;
        loop {
            let x = self.t[2][cur];
            let f2 = self.face(x);
            let has_low = match self.face_types[f2] {
                FaceType::Growing(j) => j == i,
                FaceType::Simple(_) => false,
            };
            if has_low {
                let target = self.low_corner_vertex(f2, i).ok_or_else(|| bad(format!("face {f2} has no low blue vertex")))?;
                let next_kind = match self.kinds[f2] {
                    Some(FaceKind::OneDeg2) => FaceKind::OneDeg3,
                    Some(FaceKind::Two12) => FaceKind::Two13,
                    k => return Err(bad(format!("branch ends in face of kind {k:?}"))),
                };
                self.set_kind(f2, next_kind)?;
                self.own(target, x);
                self.cross_edge(cur_blue, target, cur);
                let lvc = self.t[0][x];
                self.lvc[component] = lvc;
                return Ok(());
            }
            let y = self.t[1][x];
            if self.side_owner[y] != NONE {
                return Err(bad(format!("branch runs into a crossed edge in face {f2}")));
            }
            if let FaceType::Growing(_) = self.face_types[f2] {
                self.set_kind(f2, FaceKind::OneDeg2)?;
            }
            let w = self.add_blue(f2, component);
            self.own(w, x);
            self.own(w, y);
            self.cross_edge(cur_blue, w, cur);
            cur_blue = w;
            cur = y;
        }
    }

    fn check_invariants(&self, components: usize) -> Result<()> {
        let bad = |m: String| MapError::InternalInvariantViolated(m);
        // out-degree one makes every component unicyclic
        for (b, v) in self.blue.iter().enumerate() {
            if v.out_edge == NONE || self.cross[v.out_edge].map(|c| c.tail) != Some(b) {
                return Err(bad(format!("blue vertex {b} has no outgoing edge")));
            }
        }
        let mut parent: Vec<usize> = (0..self.blue.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for c in self.cross.iter().flatten() {
            let (a, b) = (find(&mut parent, c.tail), find(&mut parent, c.head));
            parent[a] = b;
        }
        let roots = (0..self.blue.len()).filter(|&x| find(&mut parent, x) == x).count();
        if roots != components {
            return Err(bad(format!("blue graph has {roots} components, expected {components}")));
        }
        for (face, kind) in self.kinds.iter().enumerate() {
            let Some(kind) = kind else { continue };
            let mut degs: Vec<usize> = self.face_blue[face]
                .iter()
                .map(|&b| self.blue[b].sides.iter().filter(|s| self.face(s.0) == face).count())
                .collect();
            degs.sort();
            let expect: &[usize] = match kind {
                FaceKind::NoBlue => &[],
                FaceKind::OneDeg2 => &[2],
                FaceKind::OneDeg3 => &[3],
                FaceKind::Two12 => &[1, 2],
                FaceKind::Two13 => &[1, 3],
            };
            if degs != expect {
                return Err(bad(format!("face {face} recorded as {kind:?} has blue degrees {degs:?}")));
            }
        }
        Ok(())
    }
}

/// Runs the exploration from the given sources; labels are the delayed distances.
pub fn build_deg_sources(q: &EmbeddedMap, sources: &[SourceFlag], opts: DegOptions) -> Result<DegState> {
    q.check_quadrangulation()?;
    let src: Vec<(Vertex, u32)> = sources.iter().map(|s| (q.vertex_of(s.root), s.delay)).collect();
    let labels: Vec<i64> = multi_source_distances(q, &src).into_iter().map(|x| x as i64).collect();
    let face_types = classify_faces(q, &labels)?;
    let kinds = face_types
        .iter()
        .map(|t| matches!(t, FaceType::Growing(_)).then_some(FaceKind::NoBlue))
        .collect();
    let fflags = face_flags(q);
    let t = [q.involution(0), q.involution(1), q.involution(2)];
    let mut d = Deg {
        q,
        t,
        labels,
        face_types,
        kinds,
        blue: Vec::new(),
        face_blue: vec![Vec::new(); q.face_count()],
        side_owner: vec![NONE; q.flag_count()],
        cross: vec![None; q.edge_count()],
        order: Vec::new(),
        lvc: Vec::new(),
        check: opts.check_invariants,
    };
    for (j, s) in sources.iter().enumerate() {
        d.init_cycle(s.root.0, j)?;
    }
    let initial_edges = d.order.len();
    if d.check {
        d.check_invariants(sources.len())?;
    }
    // free edges counted per label
    let max_label = *d.labels.iter().max().unwrap();
    let mut free_by_label = vec![0usize; max_label as usize + 2];
    for f in q.edge_flags() {
        if d.cross[q.edge_of(f)].is_none() {
            let l = d.lab(f.0).min(d.lab(q.tau0(f).0));
            free_by_label[l as usize] += 1;
        }
    }
    let mut free_total: usize = free_by_label.iter().sum();
    let mut i = 1i64;
    let mut current = 0usize;
    let mut steps = 0;
    let total_flags = q.flag_count();
    while free_total > 0 {
        if free_by_label[i as usize] == 0 {
            i += 1;
            continue;
        }
        let mut h = d.lvc[current];
        let mut walked = 0usize;
        let mut tried = 0usize;
        let face = loop {
            let f = d.face(h);
            if d.selectable(f, i) {
                break f;
            }
            h = d.tour_step(h);
            walked += 1;
            if h == d.lvc[current] {
                tried += 1;
                if tried >= sources.len() {
                    return Err(MapError::InternalInvariantViolated(format!("no selectable face at level {i}")));
                }
                current = (current + 1) % sources.len();
                h = d.lvc[current];
                walked = 0;
            }
            if walked > 2 * total_flags {
                return Err(MapError::InternalInvariantViolated("blue tour does not close".into()));
            }
        };
        let g = d.choose_side(face, &fflags[face], i)?;
        let before = d.order.len();
        d.branch(face, g, i)?;
        for k in before..d.order.len() {
            let e = d.order[k];
            let f = d.cross[e].expect("just crossed").tail_side.0;
            let l = d.lab(f).min(d.lab(d.t[0][f]));
            free_by_label[l as usize] -= 1;
            free_total -= 1;
        }
        current = d.blue[d.face_blue[face][0]].component;
        steps += 1;
        if d.check {
            d.check_invariants(sources.len())?;
        }
    }
    Ok(DegState {
        labels: d.labels,
        face_types: d.face_types,
        face_kinds: d.kinds,
        blue_vertices: d.blue,
        blue_edges: d.cross,
        blue_order: d.order,
        initial_edges,
        lvc: d.lvc.into_iter().map(Flag).collect(),
        current_level: i,
        steps,
    })
}

/// Dual exploration graph from the root vertex of `q`.
pub fn build_deg(q: &EmbeddedMap) -> Result<DegState> {
    build_deg_sources(q, &[SourceFlag { root: q.root(), delay: 0 }], DegOptions::default())
}

/// Reads the red one-face map off a terminated exploration; one root per source.
pub fn extract_red_edges(q: &EmbeddedMap, deg: &DegState, roots: &[Flag]) -> Result<FacedMap> {
    let bad = |m: String| MapError::InternalInvariantViolated(m);
    let t = [q.involution(0), q.involution(1), q.involution(2)];
    let len = q.flag_count();
    let corner = |f: usize| f.min(t[1][f]);
    let lab = |f: usize| deg.labels[q.vertex_of(Flag(f)).0];
    let mut other = vec![NONE; len];
    for (face, flags) in face_flags(q).iter().enumerate() {
        // corners of the face are {flags[2k+1], flags[2k+2]}
        let corners: Vec<usize> = (0..4).map(|k| corner(flags[2 * k + 1])).collect();
        let (x, y) = match deg.face_types[face] {
            FaceType::Simple(i) => {
                let hi: Vec<usize> = corners.iter().copied().filter(|&c| lab(c) == i).collect();
                (hi[0], hi[1])
            }
            FaceType::Growing(i) => {
                let top = corners.iter().copied().find(|&c| lab(c) == i + 1).unwrap();
                let leaf = deg
                    .blue_vertices
                    .iter()
                    .find(|b| b.face == face && b.sides.iter().filter(|s| q.face_of(**s) == face).count() == 1)
                    .ok_or_else(|| bad(format!("growing face {face} has no degree-1 blue vertex")))?;
                let s = leaf.sides.iter().find(|s| q.face_of(**s) == face).unwrap().0;
                let low_end = if lab(s) == i { s } else { t[0][s] };
                (top, corner(low_end))
            }
        };
        other[x] = y;
        other[y] = x;
    }
    let red_corner = |f: usize| other[corner(f)] != NONE;
    let red: Vec<usize> = (0..len).filter(|&f| red_corner(f)).collect();
    let mut id = vec![NONE; len];
    for (k, &f) in red.iter().enumerate() {
        id[f] = k;
    }
    let mut r0 = Vec::with_capacity(red.len());
    let mut r1 = Vec::with_capacity(red.len());
    let mut r2 = Vec::with_capacity(red.len());
    for &g in &red {
        r2.push(id[t[1][g]]);
        let mut z = t[2][g];
        while !red_corner(z) {
            z = t[2][t[1][z]];
        }
        r1.push(id[z]);
        let target = other[corner(g)];
        let mut z = t[0][g];
        while corner(z) != target {
            z = t[0][t[1][z]];
        }
        r0.push(id[z]);
    }
    let mut red_roots = Vec::with_capacity(roots.len());
    for &r in roots {
        let mut z = t[0][r.0];
        while !red_corner(z) {
            z = t[2][t[1][z]];
        }
        red_roots.push(id[z]);
    }
    let m = EmbeddedMap::new(r0, r1, r2, red_roots[0])?;
    let mut vl = vec![0i64; m.vertex_count()];
    for (k, &f) in red.iter().enumerate() {
        vl[m.vertex_of(Flag(k)).0] = lab(f);
    }
    let rr: Vec<Flag> = red_roots.into_iter().map(Flag).collect();
    FacedMap::from_embedded(&m, &rr, Some(&vl))
}

/// Labeled one-face map of a rooted bipartite quadrangulation.
pub fn phi(q: &EmbeddedMap) -> Result<UnicellularMap> {
    phi_checked(q, DegOptions::default())
}

pub fn phi_checked(q: &EmbeddedMap, opts: DegOptions) -> Result<UnicellularMap> {
    let deg = build_deg_sources(q, &[SourceFlag { root: q.root(), delay: 0 }], opts)?;
    let u = extract_red_edges(q, &deg, &[q.root()])?;
    UnicellularMap::from_faced(u)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::enumeration::enumerate_quadrangulations;
    use crate::surface::{bfs_distances, SurfaceType};

    const SMALL: [SurfaceType; 4] =
        [SurfaceType::SPHERE, SurfaceType::PROJECTIVE_PLANE, SurfaceType::TORUS, SurfaceType::KLEIN_BOTTLE];

    /// The quadrangulation of the sphere whose graph is a 4-cycle.
    fn four_cycle() -> EmbeddedMap {
        enumerate_quadrangulations(2, SurfaceType::SPHERE)
            .unwrap()
            .into_iter()
            .find(|q| q.vertex_count() == 4 && q.degrees().iter().all(|&d| d == 2))
            .unwrap()
    }

    fn distances(q: &EmbeddedMap) -> Vec<i64> {
        bfs_distances(q, q.root_vertex()).into_iter().map(i64::from).collect()
    }

    #[test]
    fn four_cycle_faces_grow_at_level_one() {
        let q = four_cycle();
        assert_eq!(classify_faces(&q, &distances(&q)).unwrap(), vec![FaceType::Growing(1); 2]);
    }

    #[test]
    fn one_face_sphere_quadrangulations() {
        let mut kinds: Vec<FaceType> = enumerate_quadrangulations(1, SurfaceType::SPHERE)
            .unwrap()
            .iter()
            .map(|q| classify_faces(q, &distances(q)).unwrap()[0])
            .collect();
        kinds.sort_by_key(|k| format!("{k:?}"));
        // rooted at the leaf of the path the face reads (0,1,2,1); rooted at the middle, (0,1,0,1)
        assert_eq!(kinds, vec![FaceType::Growing(1), FaceType::Simple(1)]);
    }

    #[test]
    fn labels_must_be_distances() {
        let q = four_cycle();
        let mut l = distances(&q);
        l[q.root_vertex().0] = 5;
        assert!(check_distance_labels(&q, q.root_vertex(), &l).is_err());
    }

    #[test]
    fn every_edge_is_crossed_once() {
        for s in SMALL {
            for n in 1..=3 {
                for q in enumerate_quadrangulations(n, s).unwrap() {
                    let deg = build_deg_sources(&q, &[SourceFlag { root: q.root(), delay: 0 }], DegOptions { check_invariants: true })
                        .unwrap();
                    assert!(deg.blue_edges.iter().all(|e| e.is_some()));
                    assert_eq!(deg.blue_order.len(), 2 * n);
                }
            }
        }
    }

    #[test]
    fn image_shape_and_injectivity() {
        for s in SMALL {
            for n in 1..=3 {
                let qs = enumerate_quadrangulations(n, s).unwrap();
                let mut images = HashSet::new();
                for q in &qs {
                    let u = phi(q).unwrap();
                    assert_eq!(u.n(), n);
                    assert_eq!(u.surface_type(), s);
                    assert_eq!(u.vertex_count() as i64, n as i64 + 1 - s.h2 as i64);
                    u.check_well_labeled().unwrap();
                    images.insert(u);
                }
                assert_eq!(images.len(), qs.len(), "{s} n={n}");
            }
        }
    }

    #[test]
    fn rejects_non_quadrangulations() {
        // a single edge bounds a face of degree 2
        let u = crate::polygon::UnicellularMap::build_from_polygon(1, &[(1, 2)], &[], 1, true).unwrap();
        assert!(matches!(phi(&u.to_embedded()), Err(crate::error::MapError::NotQuadrangulation)));
    }
}
