//! Reverse construction: from labeled polygons to a quadrangulation.
//!
//! Internal edges are drawn inside each polygon, splitting it into areas whose
//! boundaries are kept as short counterclockwise element lists. Every area holds
//! one blue vertex; the blue tour moves between areas across internal edges.

use crate::error::{MapError, Result};
use crate::polygon::{FacedMap, UnicellularMap};
use crate::surface::{EmbeddedMap, Flag, Vertex};

/// A point of the planar picture: a polygon corner or the centre of polygon `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pt {
    Corner(usize),
    Center(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Elem {
    /// `len` consecutive polygon sides starting with side `start`.
    Arc { start: usize, len: usize },
    Seg { edge: usize, from: Pt, to: Pt },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AreaType {
    T1,
    T2,
    T3,
}

/// T2 areas are stored as `[W -> P_a, arc, P_b -> W]`; T1 and T3 start with their side.
#[derive(Debug, Clone)]
struct Area {
    kind: AreaType,
    elems: Vec<Elem>,
}

#[derive(Debug, Clone)]
struct InternalEdge {
    upper: Pt,
    lower: Pt,
    /// Side 0 is traversed upper to lower, side 1 lower to upper.
    sides: [(usize, usize); 2],
    tail: usize,
    head: usize,
}

/// Position of the blue tour: at segment `idx` of `area`, sweeping onward in `ccw` sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct TourState {
    area: usize,
    idx: usize,
    ccw: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LambdaOptions {
    /// Check the area invariant after every step and the termination counts.
    pub check_invariants: bool,
}

/// Output of the reverse construction.
#[derive(Debug, Clone)]
pub struct LambdaOutput {
    pub q: EmbeddedMap,
    /// Label of every vertex of `q`.
    pub labels: Vec<i64>,
    /// Vertex of `q` at the centre of each polygon.
    pub centers: Vec<Vertex>,
    /// Flag at each centre on the edge to the polygon's root corner.
    pub root_flags: Vec<Flag>,
    /// Vertex of `q` for each polygon corner.
    pub corner_vertex: Vec<Vertex>,
    /// Lower corner linked to each corner, `None` when it is a centre.
    pub successor: Vec<Option<usize>>,
    /// Internal edges in creation order, as edges of `q`.
    pub blue_order: Vec<usize>,
    /// Number of steps after the initial cycle.
    pub steps: usize,
    pub t1_count: usize,
    pub t3_count: usize,
}

struct Builder<'a> {
    u: &'a FacedMap,
    labels: &'a [i64],
    center_label: Vec<i64>,
    areas: Vec<Area>,
    edges: Vec<InternalEdge>,
    side_area: Vec<usize>,
    down_edge: Vec<usize>,
    lvc: Vec<TourState>,
    last_t3: Option<usize>,
    check: bool,
}

impl Pt {
    fn corner(self) -> Option<usize> {
        match self {
            Pt::Corner(c) => Some(c),
            Pt::Center(_) => None,
        }
    }
}

impl<'a> Builder<'a> {
    fn label(&self, p: Pt) -> i64 {
        match p {
            Pt::Corner(c) => self.labels[c],
            Pt::Center(j) => self.center_label[j],
        }
    }

    fn arc_sides(&self, start: usize, len: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(len);
        let mut s = start;
        for _ in 0..len {
            out.push(s);
            s = self.u.next(s);
        }
        out
    }

    fn new_edge(&mut self, upper: Pt, lower: Pt) -> usize {
        self.edges.push(InternalEdge { upper, lower, sides: [(usize::MAX, 0); 2], tail: 0, head: 0 });
        let e = self.edges.len() - 1;
        if let Pt::Corner(c) = upper {
            self.down_edge[c] = e;
        }
        e
    }

    /// Refreshes the back references of the elements of area `a`.
    fn reindex(&mut self, a: usize) {
        for (k, el) in self.areas[a].elems.clone().into_iter().enumerate() {
            match el {
                Elem::Seg { edge, from, .. } => {
                    let side = usize::from(from != self.edges[edge].upper);
                    self.edges[edge].sides[side] = (a, k);
                }
                Elem::Arc { start, len } => {
                    for s in self.arc_sides(start, len) {
                        self.side_area[s] = a;
                    }
                }
            }
        }
    }

    fn push_area(&mut self, kind: AreaType, elems: Vec<Elem>) -> usize {
        self.areas.push(Area { kind, elems });
        let a = self.areas.len() - 1;
        self.reindex(a);
        a
    }

    fn seg(&self, a: usize, k: usize) -> (usize, Pt, Pt) {
        match self.areas[a].elems[k] {
            Elem::Seg { edge, from, to } => (edge, from, to),
            Elem::Arc { .. } => unreachable!("tour state on a polygon side"),
        }
    }

    fn step(&self, st: TourState) -> TourState {
        let elems = &self.areas[st.area].elems;
        let m = elems.len();
        let mut k = st.idx;
        loop {
            k = if st.ccw { (k + 1) % m } else { (k + m - 1) % m };
            if let Elem::Seg { edge, from, .. } = elems[k] {
                let side = usize::from(from != self.edges[edge].upper);
                let (area, idx) = self.edges[edge].sides[1 - side];
                return TourState { area, idx, ccw: st.ccw };
            }
        }
    }

    /// Whether the blue graph turns counterclockwise around the centre of a T2 area.
    fn t2_ccw(&self, a: usize) -> bool {
        let (e0, _, _) = self.seg(a, 0);
        let (e2, _, _) = self.seg(a, 2);
        e0 == e2 || self.edges[e0].head == a
    }

    /// Side `e(F)` of a T2 or T3 area for level `i`, if defined.
    fn distinguished_side(&self, a: usize, i: i64) -> Option<usize> {
        let area = &self.areas[a];
        match area.kind {
            AreaType::T1 => None,
            AreaType::T3 => match area.elems[0] {
                Elem::Arc { start, .. } => Some(start),
                _ => unreachable!(),
            },
            AreaType::T2 => {
                let (start, len) = match area.elems[1] {
                    Elem::Arc { start, len } => (start, len),
                    _ => unreachable!(),
                };
                let sides = self.arc_sides(start, len);
                let s = if self.t2_ccw(a) { *sides.last().unwrap() } else { sides[0] };
                let (x, y) = (self.labels[s], self.labels[self.u.next(s)]);
                (x.min(y) == i && x.max(y) == i + 1).then_some(s)
            }
        }
    }

    fn min_label(&self, a: usize) -> i64 {
        let area = &self.areas[a];
        match area.kind {
            AreaType::T2 => {
                let (_, w, _) = self.seg(a, 0);
                self.label(w)
            }
            _ => area
                .elems
                .iter()
                .filter_map(|el| match el {
                    Elem::Seg { from, to, .. } => Some(self.label(*from).min(self.label(*to))),
                    _ => None,
                })
                .min()
                .unwrap(),
        }
    }

    fn eligible(&self, a: usize, i: i64) -> Option<(usize, usize)> {
        if self.areas[a].kind == AreaType::T1 || self.min_label(a) != i - 1 {
            return None;
        }
        let e = self.distinguished_side(a, i)?;
        let et = self.u.partner(e);
        let coarea = self.side_area[et];
        (self.areas[coarea].kind == AreaType::T2).then_some((et, coarea))
    }

    fn cotype(&self, a: usize) -> Option<AreaType> {
        let i = self.min_label(a) + 1;
        let e = self.distinguished_side(a, i)?;
        Some(self.areas[self.side_area[self.u.partner(e)]].kind)
    }

    fn check_area_invariant(&self) -> Result<()> {
        let mut n_t2_t1 = 0;
        for a in 0..self.areas.len() {
            match self.areas[a].kind {
                AreaType::T3 => {
                    let ct = self.cotype(a);
                    let ok = if Some(a) == self.last_t3 {
                        matches!(ct, Some(AreaType::T1) | Some(AreaType::T2))
                    } else {
                        ct == Some(AreaType::T1)
                    };
                    if !ok {
                        return Err(MapError::InternalInvariantViolated(format!("T3 area {a} has cotype {ct:?}")));
                    }
                }
                AreaType::T2 => {
                    if self.cotype(a) == Some(AreaType::T1) {
                        n_t2_t1 += 1;
                    }
                }
                AreaType::T1 => {}
            }
        }
        if n_t2_t1 > 1 {
            return Err(MapError::InternalInvariantViolated(format!("{n_t2_t1} T2 areas have cotype T1")));
        }
        Ok(())
    }

    fn init(&mut self) -> Result<()> {
        for j in 0..self.u.face_count() {
            let off = self.u.face_offset(j);
            let size = self.u.face_sizes()[j];
            let m = self.center_label[j] + 1;
            let mins: Vec<usize> = (off..off + size).filter(|&c| self.labels[c] == m).collect();
            if mins[0] != off {
                return Err(MapError::NotWellLabeled(format!("root corner of face {} is not of minimum label", j + 1)));
            }
            let edges: Vec<usize> = mins.iter().map(|&c| self.new_edge(Pt::Corner(c), Pt::Center(j))).collect();
            let k = mins.len();
            let mut ids = Vec::with_capacity(k);
            for t in 0..k {
                let (c, c2) = (mins[t], mins[(t + 1) % k]);
                let len = if k == 1 { size } else { (c2 + size - c) % size };
                let elems = vec![
                    Elem::Seg { edge: edges[t], from: Pt::Center(j), to: Pt::Corner(c) },
                    Elem::Arc { start: c, len },
                    Elem::Seg { edge: edges[(t + 1) % k], from: Pt::Corner(c2), to: Pt::Center(j) },
                ];
                ids.push(self.push_area(AreaType::T2, elems));
            }
            // counterclockwise loop around the centre
            for t in 0..k {
                let e = edges[t];
                self.edges[e].tail = ids[(t + k - 1) % k];
                self.edges[e].head = ids[t];
            }
            self.lvc.push(TourState { area: ids[0], idx: 0, ccw: true });
        }
        Ok(())
    }

    /// Links the label-`i` end of `et` to the label-`i+1` corners of its T2 area.
    fn split(&mut self, ft: usize, et: usize, i: i64) -> Result<TourState> {
        let bad = |msg: &str| MapError::InternalInvariantViolated(msg.to_string());
        let elems = self.areas[ft].elems.clone();
        let (s0, s2) = (elems[0], elems[2]);
        let (start, len) = match elems[1] {
            Elem::Arc { start, len } => (start, len),
            _ => return Err(bad("coarea is not a T2 area")),
        };
        let sides = self.arc_sides(start, len);
        let mut corners: Vec<usize> = sides.clone();
        corners.push(self.u.next(sides[len - 1]));
        let at_start = if sides[0] == et {
            true
        } else if sides[len - 1] == et {
            false
        } else {
            return Err(bad("matched side is inside the arc of its area"));
        };
        let pos: Vec<usize> = (1..len).filter(|&t| self.labels[corners[t]] == i + 1).collect();
        let r = pos.len();
        if r == 0 || (at_start && pos[0] != 1) || (!at_start && pos[r - 1] != len - 1) {
            return Err(bad("coarea arc has unexpected labels"));
        }
        let side = |p: usize| -> usize { sides[p] };
        if at_start {
            let v = Pt::Corner(corners[0]);
            let es: Vec<usize> = pos.iter().map(|&p| self.new_edge(Pt::Corner(corners[p]), v)).collect();
            let mut path = Vec::with_capacity(r + 1);
            path.push(self.push_area(
                AreaType::T1,
                vec![
                    Elem::Arc { start: side(0), len: 1 },
                    Elem::Seg { edge: es[0], from: Pt::Corner(corners[pos[0]]), to: v },
                ],
            ));
            for t in 1..r {
                path.push(self.push_area(
                    AreaType::T2,
                    vec![
                        Elem::Seg { edge: es[t - 1], from: v, to: Pt::Corner(corners[pos[t - 1]]) },
                        Elem::Arc { start: side(pos[t - 1]), len: pos[t] - pos[t - 1] },
                        Elem::Seg { edge: es[t], from: Pt::Corner(corners[pos[t]]), to: v },
                    ],
                ));
            }
            if len - pos[r - 1] != 1 {
                return Err(bad("last piece of the arc is not a single side"));
            }
            self.areas[ft] = Area {
                kind: AreaType::T3,
                elems: vec![
                    Elem::Arc { start: side(pos[r - 1]), len: 1 },
                    s2,
                    s0,
                    Elem::Seg { edge: es[r - 1], from: v, to: Pt::Corner(corners[pos[r - 1]]) },
                ],
            };
            self.reindex(ft);
            path.push(ft);
            for t in 0..r {
                self.edges[es[t]].tail = path[t];
                self.edges[es[t]].head = path[t + 1];
            }
            self.last_t3 = Some(ft);
            Ok(TourState { area: ft, idx: 3, ccw: true })
        } else {
            let v = Pt::Corner(corners[len]);
            // c_1 is nearest to v, i.e. the largest position
            let pos: Vec<usize> = pos.into_iter().rev().collect();
            let es: Vec<usize> = pos.iter().map(|&p| self.new_edge(Pt::Corner(corners[p]), v)).collect();
            let mut path = Vec::with_capacity(r + 1);
            path.push(self.push_area(
                AreaType::T1,
                vec![
                    Elem::Arc { start: side(len - 1), len: 1 },
                    Elem::Seg { edge: es[0], from: v, to: Pt::Corner(corners[pos[0]]) },
                ],
            ));
            for t in 1..r {
                path.push(self.push_area(
                    AreaType::T2,
                    vec![
                        Elem::Seg { edge: es[t], from: v, to: Pt::Corner(corners[pos[t]]) },
                        Elem::Arc { start: side(pos[t]), len: pos[t - 1] - pos[t] },
                        Elem::Seg { edge: es[t - 1], from: Pt::Corner(corners[pos[t - 1]]), to: v },
                    ],
                ));
            }
            if pos[r - 1] != 1 {
                return Err(bad("first piece of the arc is not a single side"));
            }
            self.areas[ft] = Area {
                kind: AreaType::T3,
                elems: vec![
                    Elem::Arc { start: side(0), len: 1 },
                    Elem::Seg { edge: es[r - 1], from: Pt::Corner(corners[pos[r - 1]]), to: v },
                    s2,
                    s0,
                ],
            };
            self.reindex(ft);
            path.push(ft);
            for t in 0..r {
                self.edges[es[t]].tail = path[t];
                self.edges[es[t]].head = path[t + 1];
            }
            self.last_t3 = Some(ft);
            Ok(TourState { area: ft, idx: 1, ccw: false })
        }
    }

    fn run(&mut self) -> Result<usize> {
        self.init()?;
        if self.check {
            self.check_area_invariant()?;
        }
        let total = self.u.side_count();
        let max_label = *self.labels.iter().max().unwrap();
        let mut i = 1i64;
        let mut current = 0usize;
        let mut steps = 0;
        loop {
            if i + 1 > max_label {
                break;
            }
            if (0..total).all(|c| self.labels[c] != i + 1 || self.down_edge[c] != usize::MAX) {
                i += 1;
                continue;
            }
            // walk the blue graph from the current LVC, switching components on return
            let mut st = self.lvc[current];
            let mut visited_here = 0usize;
            let mut components_tried = 0usize;
            let found = loop {
                if let Some(hit) = self.eligible(st.area, i) {
                    break hit;
                }
                st = self.step(st);
                visited_here += 1;
                if st == self.lvc[current] {
                    components_tried += 1;
                    if components_tried >= self.lvc.len() {
                        return Err(MapError::InternalInvariantViolated(format!("no eligible area at level {i}")));
                    }
                    current = (current + 1) % self.lvc.len();
                    st = self.lvc[current];
                    visited_here = 0;
                }
                if visited_here > 8 * total + 8 {
                    return Err(MapError::InternalInvariantViolated("blue tour does not close".into()));
                }
            };
            let (et, ft) = found;
            let polygon = self.u.face_of_side(et);
            self.lvc[polygon] = self.split(ft, et, i)?;
            current = polygon;
            steps += 1;
            if self.check {
                self.check_area_invariant()?;
            }
        }
        Ok(steps)
    }

    fn assemble(self, steps: usize) -> Result<LambdaOutput> {
        let bad = |msg: String| MapError::InternalInvariantViolated(msg);
        let u = self.u;
        let total = u.side_count();
        if let Some(c) = (0..total).find(|&c| self.down_edge[c] == usize::MAX) {
            return Err(bad(format!("corner {c} left unlinked")));
        }
        let t1_count = self.areas.iter().filter(|a| a.kind == AreaType::T1).count();
        let t3_count = self.areas.iter().filter(|a| a.kind == AreaType::T3).count();
        if self.check && t1_count != t3_count {
            return Err(bad(format!("{t1_count} T1 areas but {t3_count} T3 areas")));
        }
        let ne = self.edges.len();
        let side_of_elem = |a: usize, k: usize| -> (usize, usize) {
            match self.areas[a].elems[k] {
                Elem::Seg { edge, from, .. } => (edge, usize::from(from != self.edges[edge].upper)),
                _ => unreachable!(),
            }
        };
        let flag = |e: usize, end: usize, side: usize| 4 * e + 2 * end + side;
        let end_at = |e: usize, p: Pt| -> usize { usize::from(self.edges[e].upper != p) };
        let mut t0 = vec![0; 4 * ne];
        let mut t1 = vec![0; 4 * ne];
        let mut t2 = vec![0; 4 * ne];
        for e in 0..ne {
            for end in 0..2 {
                for side in 0..2 {
                    let f = flag(e, end, side);
                    t0[f] = flag(e, 1 - end, side);
                    t2[f] = flag(e, end, 1 - side);
                    let (a, k) = self.edges[e].sides[side];
                    let elems = &self.areas[a].elems;
                    let m = elems.len();
                    let p = if end == 0 { self.edges[e].upper } else { self.edges[e].lower };
                    let (_, _, to) = self.seg(a, k);
                    let after = p == to;
                    let nk = if after { (k + 1) % m } else { (k + m - 1) % m };
                    t1[f] = match elems[nk] {
                        Elem::Seg { edge, .. } => {
                            let (e2, s2) = side_of_elem(a, nk);
                            flag(edge, end_at(e2, p), s2)
                        }
                        Elem::Arc { start, len } => {
                            if len != 1 {
                                return Err(bad("arc of length > 1 at termination".into()));
                            }
                            // p is the start of side `start` when the arc follows the segment
                            let s = start;
                            let sp = u.partner(s);
                            let p_is_start = after;
                            let q_is_start = if u.is_twisted(s) { p_is_start } else { !p_is_start };
                            let corner = if q_is_start { sp } else { u.next(sp) };
                            let a2 = self.side_area[sp];
                            let el2 = &self.areas[a2].elems;
                            let m2 = el2.len();
                            let k2 = el2
                                .iter()
                                .position(|x| matches!(x, Elem::Arc { start, .. } if *start == sp))
                                .ok_or_else(|| bad("matched side not found".into()))?;
                            let nk2 = if q_is_start { (k2 + m2 - 1) % m2 } else { (k2 + 1) % m2 };
                            let (e2, s2) = side_of_elem(a2, nk2);
                            flag(e2, end_at(e2, Pt::Corner(corner)), s2)
                        }
                    };
                }
            }
        }
        let mut root_flags = Vec::with_capacity(u.face_count());
        for j in 0..u.face_count() {
            let e = self.down_edge[u.face_offset(j)];
            root_flags.push(flag(e, 1, 1));
        }
        let q = EmbeddedMap::new(t0, t1, t2, root_flags[0])?;
        // labels and vertex correspondences
        let mut labels = vec![i64::MIN; q.vertex_count()];
        let mut corner_vertex = vec![Vertex(0); total];
        let mut centers = vec![Vertex(0); u.face_count()];
        for e in 0..ne {
            for (end, p) in [(0, self.edges[e].upper), (1, self.edges[e].lower)] {
                let v = q.vertex_of(Flag(flag(e, end, 0)));
                labels[v.0] = self.label(p);
                match p {
                    Pt::Corner(c) => corner_vertex[c] = v,
                    Pt::Center(j) => centers[j] = v,
                }
            }
        }
        let successor = (0..total).map(|c| self.edges[self.down_edge[c]].lower.corner()).collect();
        let blue_order = (0..ne).map(|e| q.edge_of(Flag(flag(e, 0, 0)))).collect();
        Ok(LambdaOutput {
            q,
            labels,
            centers,
            root_flags: root_flags.into_iter().map(Flag).collect(),
            corner_vertex,
            successor,
            blue_order,
            steps,
            t1_count,
            t3_count,
        })
    }
}

/// Reverse construction on labeled polygons, one centre per polygon.
///
/// The centre of polygon `j` gets label `min_j - 1`; each polygon must be rooted
/// at a corner of its minimum label and the global minimum must be 1.
pub fn lambda_faced(u: &FacedMap, opts: LambdaOptions) -> Result<LambdaOutput> {
    u.check_well_labeled()?;
    let labels = u.labels().unwrap();
    let mut center_label = Vec::with_capacity(u.face_count());
    for j in 0..u.face_count() {
        let off = u.face_offset(j);
        let m = labels[off..off + u.face_sizes()[j]].iter().min().unwrap();
        center_label.push(m - 1);
    }
    let mut b = Builder {
        u,
        labels,
        center_label,
        areas: Vec::new(),
        edges: Vec::new(),
        side_area: vec![usize::MAX; u.side_count()],
        down_edge: vec![usize::MAX; u.side_count()],
        lvc: Vec::new(),
        last_t3: None,
        check: opts.check_invariants,
    };
    let steps = b.run()?;
    b.assemble(steps)
}

/// The quadrangulation of a well-labeled one-face map, rooted at the centre.
pub fn lambda(u: &UnicellularMap) -> Result<EmbeddedMap> {
    Ok(lambda_full(u, LambdaOptions::default())?.q)
}

pub fn lambda_full(u: &UnicellularMap, opts: LambdaOptions) -> Result<LambdaOutput> {
    u.check_well_labeled()?;
    lambda_faced(u.as_faced(), opts)
}

/// Corner linked to corner `c` (0-based) by the edge towards the centre.
pub fn successor(u: &UnicellularMap, c: usize) -> Result<usize> {
    u.check_well_labeled()?;
    let l = u.labels().unwrap();
    if c >= l.len() {
        return Err(MapError::IndexOutOfRange { index: c, bound: l.len() });
    }
    if l[c] <= 1 {
        return Err(MapError::LabelTooSmall(l[c]));
    }
    let out = lambda_full(u, LambdaOptions::default())?;
    Ok(out.successor[c].expect("label >= 2 links to a corner"))
}

/// Report of the distance bound between two corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceBound {
    pub bound: i64,
    pub actual: i64,
    pub ok: bool,
}

/// Bound from the label minima along the two boundary intervals between the corners.
pub fn distance_bound(u: &UnicellularMap, out: &LambdaOutput, dist_from_c1: &[u32], c1: usize, c2: usize) -> DistanceBound {
    let l = u.labels().unwrap();
    let total = l.len();
    let interval_min = |a: usize, b: usize| -> i64 {
        let mut m = l[a];
        let mut x = a;
        while x != b {
            x = (x + 1) % total;
            m = m.min(l[x]);
        }
        m
    };
    let best = interval_min(c1, c2).max(interval_min(c2, c1));
    let bound = l[c1] + l[c2] - 2 * (best - 1);
    let actual = dist_from_c1[out.corner_vertex[c2].0] as i64;
    DistanceBound { bound, actual, ok: actual <= bound }
}

pub fn distance_bound_check(u: &UnicellularMap, c1: usize, c2: usize) -> Result<DistanceBound> {
    let out = lambda_full(u, LambdaOptions::default())?;
    let d = crate::surface::bfs_distances(&out.q, out.corner_vertex[c1]);
    Ok(distance_bound(u, &out, &d, c1, c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{enumerate_labelings, enumerate_unicellular};
    use crate::surface::{bfs_distances, SurfaceType};

    fn one_edge(labels: &[i64]) -> UnicellularMap {
        UnicellularMap::build_from_polygon(1, &[(1, 2)], &[], 1, true).unwrap().with_corner_labels(labels.to_vec()).unwrap()
    }

    fn sorted_distances(q: &EmbeddedMap) -> Vec<u32> {
        let mut d = bfs_distances(q, q.root_vertex());
        d.sort();
        d
    }

    #[test]
    fn single_edge_images() {
        let path = lambda(&one_edge(&[1, 2])).unwrap();
        assert_eq!((path.face_count(), path.vertex_count()), (1, 3));
        assert_eq!(sorted_distances(&path), vec![0, 1, 2]);
        let flat = lambda(&one_edge(&[1, 1])).unwrap();
        assert_eq!(sorted_distances(&flat), vec![0, 1, 1]);
    }

    #[test]
    fn rejects_labels_below_one() {
        assert!(matches!(lambda(&one_edge(&[1, 0])), Err(MapError::NotWellLabeled(_))));
    }

    #[test]
    fn labels_are_distances_and_successors_are_geodesics() {
        for s in [SurfaceType::SPHERE, SurfaceType::PROJECTIVE_PLANE, SurfaceType::TORUS, SurfaceType::KLEIN_BOTTLE] {
            for n in 1..=3 {
                for u in enumerate_unicellular(n, Some(s)) {
                    for w in enumerate_labelings(&u, true) {
                        let out = lambda_full(&w, LambdaOptions { check_invariants: true }).unwrap();
                        assert_eq!(out.t1_count, out.t3_count);
                        assert!(out.q.is_quadrangulation());
                        assert_eq!(out.q.euler_type(), s);
                        let d = bfs_distances(&out.q, out.centers[0]);
                        for v in 0..out.q.vertex_count() {
                            assert_eq!(out.labels[v], i64::from(d[v]));
                        }
                        let l = w.labels().unwrap();
                        for c in 0..l.len() {
                            // following successors reaches the centre in exactly l[c] steps
                            let (mut x, mut steps) = (c, 1);
                            while let Some(y) = out.successor[x] {
                                assert_eq!(l[y], l[x] - 1);
                                x = y;
                                steps += 1;
                            }
                            assert_eq!(l[x], 1);
                            assert_eq!(steps, l[c]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn successor_needs_label_two() {
        let w = one_edge(&[1, 2]);
        assert_eq!(successor(&w, 1).unwrap(), 0);
        assert!(matches!(successor(&w, 0), Err(MapError::LabelTooSmall(1))));
        assert!(matches!(successor(&w, 2), Err(MapError::IndexOutOfRange { .. })));
    }

    #[test]
    fn distance_bound_same_corner() {
        let w = one_edge(&[1, 2]);
        for c in 0..2 {
            let b = distance_bound_check(&w, c, c).unwrap();
            assert_eq!(b.actual, 0);
            assert!(b.ok);
        }
    }

    #[test]
    fn distance_bound_along_successor_chain_is_tight() {
        for u in enumerate_unicellular(3, Some(SurfaceType::KLEIN_BOTTLE)) {
            for w in enumerate_labelings(&u, true) {
                let out = lambda_full(&w, LambdaOptions::default()).unwrap();
                for c in 0..w.labels().unwrap().len() {
                    if let Some(p) = out.successor[c] {
                        let d = bfs_distances(&out.q, out.corner_vertex[c]);
                        let b = distance_bound(&w, &out, &d, c, p);
                        assert_eq!(b.actual, 1);
                        assert!(b.ok);
                    }
                }
            }
        }
    }
}
