//! Maps given as polygons whose sides are glued by pairs.
//!
//! Sides are 0-based internally; side `s` runs from corner `s` to corner
//! `next(s)` of its polygon. Flag `2s` sits at the start of side `s` and flag
//! `2s + 1` at its end, both on the inner side of the polygon.

use crate::error::{MapError, Result};
use crate::surface::{EmbeddedMap, Flag, SurfaceType, Vertex};

/// Polygons glued along a perfect matching of their sides, optionally labeled.
///
/// Each polygon is rooted at its first side; `UnicellularMap` is the one-polygon case.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FacedMap {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    face_of: Vec<usize>,
    partner: Vec<usize>,
    twisted: Vec<bool>,
    labels: Option<Vec<i64>>,
    corner_vertex: Vec<usize>,
    vertex_count: usize,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

impl FacedMap {
    /// `labels` are per corner and must agree on corners of the same vertex.
    pub fn new(sizes: Vec<usize>, partner: Vec<usize>, twisted: Vec<bool>, labels: Option<Vec<i64>>) -> Result<Self> {
        let total: usize = sizes.iter().sum();
        if total == 0 || total % 2 == 1 || sizes.iter().any(|&s| s == 0) {
            return Err(MapError::MatchingInvalid(format!("bad polygon sizes {sizes:?}")));
        }
        if partner.len() != total || twisted.len() != total {
            return Err(MapError::MatchingInvalid("matching does not cover every side".into()));
        }
        for s in 0..total {
            let p = partner[s];
            if p >= total {
                return Err(MapError::IndexOutOfRange { index: p, bound: total });
            }
            if p == s || partner[p] != s || twisted[p] != twisted[s] {
                return Err(MapError::MatchingInvalid(format!("side {} is not properly paired", s + 1)));
            }
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut face_of = Vec::with_capacity(total);
        let mut acc = 0;
        for (j, &m) in sizes.iter().enumerate() {
            offsets.push(acc);
            face_of.extend(std::iter::repeat(j).take(m));
            acc += m;
        }
        let mut map = FacedMap {
            sizes,
            offsets,
            face_of,
            partner,
            twisted,
            labels: None,
            corner_vertex: Vec::new(),
            vertex_count: 0,
        };
        map.compute_vertices();
        if let Some(l) = labels {
            map.set_corner_labels(l)?;
        }
        Ok(map)
    }

    fn compute_vertices(&mut self) {
        let total = self.partner.len();
        let mut parent: Vec<usize> = (0..total).collect();
        for s in 0..total {
            let p = self.partner[s];
            if p < s {
                continue;
            }
            let (a, b) = (s, self.next(s));
            let (c, d) = (p, self.next(p));
            let (x, y) = if self.twisted[s] { ((a, c), (b, d)) } else { ((a, d), (b, c)) };
            for (u, v) in [x, y] {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru] = rv;
                }
            }
        }
        let mut id = vec![usize::MAX; total];
        let mut corner_vertex = vec![0; total];
        let mut count = 0;
        for c in 0..total {
            let r = find(&mut parent, c);
            if id[r] == usize::MAX {
                id[r] = count;
                count += 1;
            }
            corner_vertex[c] = id[r];
        }
        self.corner_vertex = corner_vertex;
        self.vertex_count = count;
    }

    pub fn set_corner_labels(&mut self, labels: Vec<i64>) -> Result<()> {
        if labels.len() != self.side_count() {
            return Err(MapError::BadLabels(format!("expected {} corner labels", self.side_count())));
        }
        let mut per_vertex = vec![None; self.vertex_count];
        for (c, &l) in labels.iter().enumerate() {
            match per_vertex[self.corner_vertex[c]] {
                None => per_vertex[self.corner_vertex[c]] = Some(l),
                Some(x) if x != l => {
                    return Err(MapError::BadLabels(format!("corners of vertex {} disagree", self.corner_vertex[c])))
                }
                _ => {}
            }
        }
        for s in 0..self.side_count() {
            if (labels[s] - labels[self.next(s)]).abs() > 1 {
                return Err(MapError::BadLabels(format!("side {} has labels differing by more than 1", s + 1)));
            }
        }
        self.labels = Some(labels);
        Ok(())
    }

    pub fn set_vertex_labels(&mut self, vertex_labels: &[i64]) -> Result<()> {
        if vertex_labels.len() != self.vertex_count {
            return Err(MapError::BadLabels(format!("expected {} vertex labels", self.vertex_count)));
        }
        let l = self.corner_vertex.iter().map(|&v| vertex_labels[v]).collect();
        self.set_corner_labels(l)
    }

    pub fn without_labels(&self) -> FacedMap {
        FacedMap { labels: None, ..self.clone() }
    }

    pub fn edge_count(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn side_count(&self) -> usize {
        self.partner.len()
    }

    pub fn face_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn face_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn face_offset(&self, j: usize) -> usize {
        self.offsets[j]
    }

    pub fn face_of_side(&self, s: usize) -> usize {
        self.face_of[s]
    }

    pub fn next(&self, s: usize) -> usize {
        let j = self.face_of[s];
        let o = self.offsets[j];
        o + (s - o + 1) % self.sizes[j]
    }

    pub fn prev(&self, s: usize) -> usize {
        let j = self.face_of[s];
        let o = self.offsets[j];
        o + (s - o + self.sizes[j] - 1) % self.sizes[j]
    }

    pub fn partner(&self, s: usize) -> usize {
        self.partner[s]
    }

    pub fn is_twisted(&self, s: usize) -> bool {
        self.twisted[s]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Vertex of the corner at the start of side `s`.
    pub fn corner_vertex(&self, s: usize) -> Vertex {
        Vertex(self.corner_vertex[s])
    }

    pub fn corner_vertices(&self) -> &[usize] {
        &self.corner_vertex
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn corner_label(&self, s: usize) -> Option<i64> {
        self.labels.as_ref().map(|l| l[s])
    }

    /// Labels indexed by vertex id (vertices numbered by first corner).
    pub fn vertex_labels(&self) -> Option<Vec<i64>> {
        let l = self.labels.as_ref()?;
        let mut out = vec![0; self.vertex_count];
        for (c, &v) in self.corner_vertex.iter().enumerate() {
            out[v] = l[c];
        }
        Some(out)
    }

    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count];
        for &v in &self.corner_vertex {
            d[v] += 1;
        }
        d
    }

    pub fn is_orientable(&self) -> bool {
        if self.face_count() == 1 {
            return self.twisted.iter().all(|t| !t);
        }
        self.to_embedded().is_orientable()
    }

    pub fn surface_type(&self) -> SurfaceType {
        let h2 = self.edge_count() as i64 - self.vertex_count as i64 - self.face_count() as i64 + 2;
        SurfaceType { h2: h2 as u32, orientable: self.is_orientable() }
    }

    /// Root flag of polygon `j` in [`FacedMap::to_embedded`].
    pub fn root_flag(&self, j: usize) -> Flag {
        Flag(2 * self.offsets[j])
    }

    pub fn to_embedded(&self) -> EmbeddedMap {
        let total = self.side_count();
        let mut t0 = vec![0; 2 * total];
        let mut t1 = vec![0; 2 * total];
        let mut t2 = vec![0; 2 * total];
        for s in 0..total {
            t0[2 * s] = 2 * s + 1;
            t0[2 * s + 1] = 2 * s;
            let n = self.next(s);
            t1[2 * s + 1] = 2 * n;
            t1[2 * n] = 2 * s + 1;
            let p = self.partner[s];
            if self.twisted[s] {
                t2[2 * s] = 2 * p;
                t2[2 * s + 1] = 2 * p + 1;
            } else {
                t2[2 * s] = 2 * p + 1;
                t2[2 * s + 1] = 2 * p;
            }
        }
        EmbeddedMap::new(t0, t1, t2, 0).expect("glued polygons form a connected map")
    }

    /// Reads the faces of `m` as polygons, face `j` rooted at `roots[j]`.
    ///
    /// `vertex_labels` is indexed by the vertices of `m`.
    pub fn from_embedded(m: &EmbeddedMap, roots: &[Flag], vertex_labels: Option<&[i64]>) -> Result<FacedMap> {
        let len = m.flag_count();
        // side index and end bit of every flag
        let mut side = vec![usize::MAX; len];
        let mut is_end = vec![false; len];
        let mut sizes = Vec::with_capacity(roots.len());
        let mut starts = Vec::new();
        for &r in roots {
            if side[r.0] != usize::MAX {
                return Err(MapError::MatchingInvalid("two roots in the same face".into()));
            }
            let mut f = r;
            let mut size = 0;
            loop {
                let e = m.tau0(f);
                side[f.0] = starts.len();
                side[e.0] = starts.len();
                is_end[e.0] = true;
                starts.push(f);
                size += 1;
                f = m.tau1(e);
                if f == r {
                    break;
                }
                if side[f.0] != usize::MAX {
                    return Err(MapError::InternalInvariantViolated("face walk does not close".into()));
                }
            }
            sizes.push(size);
        }
        if starts.len() * 2 != len {
            return Err(MapError::MatchingInvalid("roots do not cover every face".into()));
        }
        let mut partner = vec![0; starts.len()];
        let mut twisted = vec![false; starts.len()];
        for (s, &f) in starts.iter().enumerate() {
            let g = m.tau2(f);
            partner[s] = side[g.0];
            twisted[s] = !is_end[g.0];
        }
        let labels = vertex_labels.map(|vl| starts.iter().map(|&f| vl[m.vertex_of(f).0]).collect());
        FacedMap::new(sizes, partner, twisted, labels)
    }

    /// Checks edge differences and a global minimum label of 1.
    pub fn check_well_labeled(&self) -> Result<()> {
        let l = self.labels.as_ref().ok_or(MapError::NotLabeled)?;
        let min = *l.iter().min().unwrap();
        if min != 1 {
            return Err(MapError::NotWellLabeled(format!("minimum label is {min}, expected 1")));
        }
        Ok(())
    }
}

/// A one-face map: a `2n`-gon with its sides glued by a perfect matching.
///
/// Invariant: the root is the start of side 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnicellularMap(FacedMap);

/// A corner met along the face boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TourCorner {
    /// 1-based index of the side leaving this corner.
    pub side: usize,
    pub vertex: Vertex,
}

impl UnicellularMap {
    /// Pairs are 1-based; `forward = false` reads the polygon backwards from the
    /// end of `root_side`. The result is renumbered so that its root is side 1.
    pub fn build_from_polygon(
        n: usize,
        straight: &[(usize, usize)],
        twisted: &[(usize, usize)],
        root_side: usize,
        forward: bool,
    ) -> Result<Self> {
        let total = 2 * n;
        if n == 0 {
            return Err(MapError::MatchingInvalid("no edges".into()));
        }
        let mut partner = vec![usize::MAX; total];
        let mut tw = vec![false; total];
        for (pairs, t) in [(straight, false), (twisted, true)] {
            for &(a, b) in pairs {
                for x in [a, b] {
                    if x == 0 || x > total {
                        return Err(MapError::IndexOutOfRange { index: x, bound: total });
                    }
                }
                let (a, b) = (a - 1, b - 1);
                if a == b || partner[a] != usize::MAX || partner[b] != usize::MAX {
                    return Err(MapError::MatchingInvalid(format!("pair ({}, {}) overlaps", a + 1, b + 1)));
                }
                partner[a] = b;
                partner[b] = a;
                tw[a] = t;
                tw[b] = t;
            }
        }
        if partner.iter().any(|&p| p == usize::MAX) {
            return Err(MapError::MatchingInvalid("matching is incomplete".into()));
        }
        if root_side == 0 || root_side > total {
            return Err(MapError::IndexOutOfRange { index: root_side, bound: total });
        }
        let raw = FacedMap::new(vec![total], partner, tw, None)?;
        let root = Flag(2 * (root_side - 1) + usize::from(!forward));
        Ok(UnicellularMap::from_faced(FacedMap::from_embedded(&raw.to_embedded(), &[root], None)?)?)
    }

    pub fn from_faced(m: FacedMap) -> Result<Self> {
        if m.face_count() != 1 {
            return Err(MapError::NotUnicellular);
        }
        Ok(UnicellularMap(m))
    }

    /// Reads a one-face map from its flags; labels are indexed by the vertices of `m`.
    pub fn from_embedded(m: &EmbeddedMap, vertex_labels: Option<&[i64]>) -> Result<Self> {
        if m.face_count() != 1 {
            return Err(MapError::NotUnicellular);
        }
        Ok(UnicellularMap(FacedMap::from_embedded(m, &[m.root()], vertex_labels)?))
    }

    pub fn as_faced(&self) -> &FacedMap {
        &self.0
    }

    pub fn into_faced(self) -> FacedMap {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.edge_count()
    }

    /// 1-based pairs with `a < b`.
    pub fn straight_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs(false)
    }

    pub fn twisted_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs(true)
    }

    fn pairs(&self, twisted: bool) -> Vec<(usize, usize)> {
        (0..self.0.side_count())
            .filter(|&s| s < self.0.partner(s) && self.0.is_twisted(s) == twisted)
            .map(|s| (s + 1, self.0.partner(s) + 1))
            .collect()
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.0.labels()
    }

    pub fn vertex_labels(&self) -> Option<Vec<i64>> {
        self.0.vertex_labels()
    }

    pub fn with_vertex_labels(&self, vertex_labels: &[i64]) -> Result<Self> {
        let mut m = self.0.clone();
        m.set_vertex_labels(vertex_labels)?;
        Ok(UnicellularMap(m))
    }

    pub fn with_corner_labels(&self, labels: Vec<i64>) -> Result<Self> {
        let mut m = self.0.clone();
        m.set_corner_labels(labels)?;
        Ok(UnicellularMap(m))
    }

    pub fn without_labels(&self) -> Self {
        UnicellularMap(self.0.without_labels())
    }

    pub fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    pub fn to_embedded(&self) -> EmbeddedMap {
        self.0.to_embedded()
    }

    pub fn surface_type(&self) -> SurfaceType {
        self.0.surface_type()
    }

    /// Corners along the face boundary starting at the root.
    pub fn tour(&self) -> Vec<TourCorner> {
        (0..self.0.side_count())
            .map(|s| TourCorner { side: s + 1, vertex: self.0.corner_vertex(s) })
            .collect()
    }

    /// The same map rooted at the start of side `side` (0-based), read
    /// backwards from the end of that side when `forward` is false.
    pub fn rerooted(&self, side: usize, forward: bool) -> Result<Self> {
        let total = self.0.side_count();
        if side >= total {
            return Err(MapError::IndexOutOfRange { index: side, bound: total });
        }
        let m = self.0.to_embedded();
        let vertex_labels = self.0.labels().map(|l| {
            let mut vl = vec![0; m.vertex_count()];
            for (s, &x) in l.iter().enumerate() {
                vl[m.vertex_of(Flag(2 * s)).0] = x;
            }
            vl
        });
        let root = Flag(2 * side + usize::from(!forward));
        UnicellularMap::from_faced(FacedMap::from_embedded(&m, &[root], vertex_labels.as_deref())?)
    }

    /// Labels shifted by `delta`; unlabeled maps are returned unchanged.
    pub fn shifted(&self, delta: i64) -> Self {
        let mut m = self.0.clone();
        if let Some(l) = m.labels.as_mut() {
            l.iter_mut().for_each(|x| *x += delta);
        }
        UnicellularMap(m)
    }

    /// Root label 1 and edge differences at most 1.
    pub fn check_labeled(&self) -> Result<()> {
        let l = self.0.labels().ok_or(MapError::NotLabeled)?;
        if l[0] != 1 {
            return Err(MapError::BadLabels(format!("root label is {}, expected 1", l[0])));
        }
        Ok(())
    }

    /// Additionally every label is positive.
    pub fn check_well_labeled(&self) -> Result<()> {
        self.check_labeled().map_err(|e| MapError::NotWellLabeled(e.to_string()))?;
        let l = self.0.labels().unwrap();
        if let Some(c) = l.iter().position(|&x| x < 1) {
            return Err(MapError::NotWellLabeled(format!("corner {} has label {}", c + 1, l[c])));
        }
        Ok(())
    }
}
