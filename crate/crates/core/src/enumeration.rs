//! Exhaustive generation of one-face maps and their labelings, and the count
//! tables built from them.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{MapError, Result};
use crate::polygon::{FacedMap, UnicellularMap};
use crate::reverse::{lambda_full, LambdaOptions};
use crate::surface::{canonical_code, canonical_flag_index, tutte_quadrangulation, EmbeddedMap, Flag, SurfaceType, Vertex};

/// Perfect matchings of `0..2n`, smallest unmatched side first, in lexicographic order.
pub fn matchings(n: usize) -> Vec<Vec<usize>> {
    fn rec(partner: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(a) = partner.iter().position(|&p| p == usize::MAX) else {
            out.push(partner.clone());
            return;
        };
        for b in a + 1..partner.len() {
            if partner[b] == usize::MAX {
                partner[a] = b;
                partner[b] = a;
                rec(partner, out);
                partner[a] = usize::MAX;
                partner[b] = usize::MAX;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![usize::MAX; 2 * n], &mut out);
    out
}

fn pair_lows(partner: &[usize]) -> Vec<usize> {
    (0..partner.len()).filter(|&s| s < partner[s]).collect()
}

/// Every rooted one-face map with `n` edges, optionally restricted to one surface.
///
/// Raw objects are a matching plus one twist bit per pair; twist bits vary
/// fastest. Orientable targets skip twisted gluings outright.
pub fn enumerate_unicellular(n: usize, filter: Option<SurfaceType>) -> Vec<UnicellularMap> {
    if n == 0 {
        return Vec::new();
    }
    let straight_only = filter.is_some_and(|s| s.orientable);
    let ms = matchings(n);
    let per: Vec<Vec<UnicellularMap>> = ms
        .par_iter()
        .map(|partner| {
            let lows = pair_lows(partner);
            let masks = if straight_only { 1u64 } else { 1u64 << n };
            let mut out = Vec::new();
            for mask in 0..masks {
                let mut tw = vec![false; 2 * n];
                for (k, &a) in lows.iter().enumerate() {
                    if mask >> (n - 1 - k) & 1 == 1 {
                        tw[a] = true;
                        tw[partner[a]] = true;
                    }
                }
                let m = FacedMap::new(vec![2 * n], partner.clone(), tw, None).expect("valid matching");
                if filter.map_or(true, |s| m.surface_type() == s) {
                    out.push(UnicellularMap::from_faced(m).expect("one polygon"));
                }
            }
            out
        })
        .collect();
    per.into_iter().flatten().collect()
}

/// Number of raw objects before filtering: `(2n-1)!! * 2^n`.
pub fn raw_count(n: usize) -> u128 {
    (1..=n as u128).map(|k| 2 * k - 1).product::<u128>() << n
}

/// All vertex labelings with root label 1 and edge differences at most 1.
///
/// Vertices are numbered by first corner along the tour, so each new vertex
/// follows an already labeled one along a side; its label is that label plus an
/// increment in `{-1, 0, 1}`, and every side is checked as soon as both ends are set.
pub fn enumerate_labelings(u: &UnicellularMap, well: bool) -> Vec<UnicellularMap> {
    let mut out = Vec::new();
    for_each_labeling(u, well, |labels| out.push(u.with_vertex_labels(labels).expect("consistent labels")));
    out
}

/// Number of labelings of `u`, without building the labeled maps.
pub fn count_labelings(u: &UnicellularMap, well: bool) -> u64 {
    let mut count = 0;
    for_each_labeling(u, well, |_| count += 1);
    count
}

/// Labeled unicellular maps with `n` edges on the surface.
pub fn labeled_count(surface: SurfaceType, n: usize) -> u64 {
    enumerate_unicellular(n, Some(surface)).par_iter().map(|u| count_labelings(u, false)).sum()
}

/// Calls `visit` with every vertex labeling (indexed by vertex id) having root
/// label 1 and edge differences at most 1; with `well`, also labels >= 1.
pub fn for_each_labeling(u: &UnicellularMap, well: bool, mut visit: impl FnMut(&[i64])) {
    let f = u.as_faced();
    let vc = f.vertex_count();
    let total = f.side_count();
    // for each vertex: the vertex preceding its first corner, and its neighbors with smaller id
    let mut first_prev = vec![usize::MAX; vc];
    let mut back: Vec<Vec<usize>> = vec![Vec::new(); vc];
    for s in 0..total {
        let (a, b) = (f.corner_vertex(s).0, f.corner_vertex(f.next(s)).0);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if lo != hi {
            back[hi].push(lo);
        }
    }
    for s in 1..total {
        let v = f.corner_vertex(s).0;
        if first_prev[v] == usize::MAX && v != 0 {
            first_prev[v] = f.corner_vertex(s - 1).0;
        }
    }
    let mut labels = vec![0i64; vc];
    labels[0] = 1;
    fn rec(
        v: usize,
        labels: &mut Vec<i64>,
        first_prev: &[usize],
        back: &[Vec<usize>],
        well: bool,
        visit: &mut dyn FnMut(&[i64]),
    ) {
        if v == labels.len() {
            visit(labels);
            return;
        }
        let base = labels[first_prev[v]];
        for d in [-1i64, 0, 1] {
            let l = base + d;
            if well && l < 1 {
                continue;
            }
            if back[v].iter().all(|&w| (labels[w] - l).abs() <= 1) {
                labels[v] = l;
                rec(v + 1, labels, first_prev, back, well, visit);
            }
        }
    }
    rec(1, &mut labels, &first_prev, &back, well, &mut visit);
}

/// Rooted quadrangulations with `n` faces, as the image of the reverse
/// construction over every well-labeled map, deduplicated by canonical code.
pub fn enumerate_quadrangulations(n: usize, surface: SurfaceType) -> Result<Vec<EmbeddedMap>> {
    let maps = enumerate_unicellular(n, Some(surface));
    let images: Vec<Result<Vec<(Vec<u8>, EmbeddedMap)>>> = maps
        .par_iter()
        .map(|u| {
            enumerate_labelings(u, true)
                .iter()
                .map(|w| {
                    let q = lambda_full(w, LambdaOptions::default())?.q;
                    Ok((canonical_code(&q), q))
                })
                .collect()
        })
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for batch in images {
        for (code, q) in batch? {
            if seen.insert(code) {
                out.push(q);
            }
        }
    }
    Ok(out)
}

/// One row of the golden count tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub surface: SurfaceType,
    pub n: usize,
    pub unicellular: u64,
    pub labeled: u64,
    pub well_labeled: u64,
    /// Distinct images of the reverse construction.
    pub quadrangulations: u64,
    /// Sum over quadrangulations of their vertex count.
    pub pointed_pairs: u64,
}

impl CountTable {
    pub const CSV_HEADER: &'static str = "surface,h,orientable,n,unicellular,labeled,well_labeled,quadrangulations";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.surface,
            self.surface.h(),
            self.surface.orientable,
            self.n,
            self.unicellular,
            self.labeled,
            self.well_labeled,
            self.quadrangulations
        )
    }
}

/// Counts every column of the table for one surface and size.
pub fn count_table(surface: SurfaceType, n: usize) -> Result<CountTable> {
    let maps = enumerate_unicellular(n, Some(surface));
    let per: Vec<Result<(u64, u64, Vec<(Vec<u8>, u64)>)>> = maps
        .par_iter()
        .map(|u| {
            let labeled = enumerate_labelings(u, false).len() as u64;
            let well = enumerate_labelings(u, true);
            let mut codes = Vec::with_capacity(well.len());
            for w in &well {
                let q = lambda_full(w, LambdaOptions::default())?.q;
                codes.push((canonical_code(&q), q.vertex_count() as u64));
            }
            Ok((labeled, well.len() as u64, codes))
        })
        .collect();
    let mut t = CountTable {
        surface,
        n,
        unicellular: maps.len() as u64,
        labeled: 0,
        well_labeled: 0,
        quadrangulations: 0,
        pointed_pairs: 0,
    };
    let mut seen = HashSet::new();
    for r in per {
        let (l, w, codes) = r?;
        t.labeled += l;
        t.well_labeled += w;
        for (code, v) in codes {
            if seen.insert(code) {
                t.quadrangulations += 1;
                t.pointed_pairs += v;
            }
        }
    }
    Ok(t)
}

/// First failing identity of a table, if any.
pub fn check_identities(t: &CountTable) -> std::result::Result<(), String> {
    if t.well_labeled != t.quadrangulations {
        return Err(format!(
            "{} n={}: {} well-labeled maps but {} quadrangulations",
            t.surface, t.n, t.well_labeled, t.quadrangulations
        ));
    }
    if 2 * t.labeled != t.pointed_pairs {
        return Err(format!(
            "{} n={}: 2*{} labeled maps but {} pointed quadrangulations",
            t.surface, t.n, t.labeled, t.pointed_pairs
        ));
    }
    Ok(())
}

/// Count tables for `n = 1..=n_max`, stopping at the first failed identity.
pub fn verify_counts(surface: SurfaceType, n_max: usize) -> Result<Vec<CountTable>> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        let t = count_table(surface, n)?;
        check_identities(&t).map_err(MapError::InternalInvariantViolated)?;
        out.push(t);
    }
    Ok(out)
}

fn polygons_connected(sizes: &[usize], partner: &[usize]) -> bool {
    let mut face = Vec::with_capacity(partner.len());
    for (j, &s) in sizes.iter().enumerate() {
        face.extend(std::iter::repeat(j).take(s));
    }
    let mut reached = vec![false; sizes.len()];
    let mut stack = vec![0usize];
    reached[0] = true;
    while let Some(j) = stack.pop() {
        for s in 0..partner.len() {
            if face[s] == j && !reached[face[partner[s]]] {
                reached[face[partner[s]]] = true;
                stack.push(face[partner[s]]);
            }
        }
    }
    reached.iter().all(|&r| r)
}

/// Every connected gluing of polygons with the given sizes, each rooted at its first side.
pub fn enumerate_faced(sizes: &[usize], filter: Option<SurfaceType>) -> Vec<FacedMap> {
    let total: usize = sizes.iter().sum();
    if total == 0 || total % 2 == 1 || sizes.iter().any(|&s| s == 0) {
        return Vec::new();
    }
    let n = total / 2;
    let mut out = Vec::new();
    for partner in matchings(n) {
        if !polygons_connected(sizes, &partner) {
            continue;
        }
        let lows = pair_lows(&partner);
        for mask in 0..1u64 << n {
            let mut tw = vec![false; total];
            for (k, &a) in lows.iter().enumerate() {
                if mask >> (n - 1 - k) & 1 == 1 {
                    tw[a] = true;
                    tw[partner[a]] = true;
                }
            }
            let m = FacedMap::new(sizes.to_vec(), partner.clone(), tw, None).expect("valid matching");
            if filter.map_or(true, |s| m.surface_type() == s) {
                out.push(m);
            }
        }
    }
    out
}

/// Ordered size vectors of `k` polygons with `2n` sides in total.
pub fn compositions(total: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(k - 1) {
        for mut rest in compositions(total - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Labelings where every polygon is rooted at a corner of its own minimum
/// label and the smallest root label is 1.
pub fn enumerate_rooted_labelings(f: &FacedMap) -> Vec<FacedMap> {
    let vc = f.vertex_count();
    let mut adj = vec![Vec::new(); vc];
    for s in 0..f.side_count() {
        let (a, b) = (f.corner_vertex(s).0, f.corner_vertex(f.next(s)).0);
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    // breadth-first order gives every later vertex an earlier neighbour
    let mut order = vec![0usize];
    let mut parent = vec![usize::MAX; vc];
    let mut seen = vec![false; vc];
    seen[0] = true;
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                order.push(y);
            }
        }
    }
    let mut labels = vec![0i64; vc];
    let mut out = Vec::new();
    fn rec(k: usize, order: &[usize], parent: &[usize], adj: &[Vec<usize>], labels: &mut Vec<i64>, placed: &mut Vec<bool>, f: &FacedMap, out: &mut Vec<FacedMap>) {
        if k == order.len() {
            let corner: Vec<i64> = f.corner_vertices().iter().map(|&v| labels[v]).collect();
            let mut root_min = i64::MAX;
            for j in 0..f.face_count() {
                let off = f.face_offset(j);
                let fmin = *corner[off..off + f.face_sizes()[j]].iter().min().unwrap();
                if corner[off] != fmin {
                    return;
                }
                root_min = root_min.min(fmin);
            }
            let shifted: Vec<i64> = labels.iter().map(|l| l - root_min + 1).collect();
            let mut g = f.clone();
            g.set_vertex_labels(&shifted).expect("consistent labels");
            out.push(g);
            return;
        }
        let v = order[k];
        let base = labels[parent[v]];
        for d in [-1i64, 0, 1] {
            let l = base + d;
            if adj[v].iter().all(|&w| !placed[w] || (labels[w] - l).abs() <= 1) {
                labels[v] = l;
                placed[v] = true;
                rec(k + 1, order, parent, adj, labels, placed, f, out);
                placed[v] = false;
            }
        }
    }
    let mut placed = vec![false; vc];
    placed[0] = true;
    rec(1, &order, &parent, &adj, &mut labels, &mut placed, f, &mut out);
    out
}

/// Well-labeled maps with `n` edges and `k` ordered rooted faces.
pub fn enumerate_multi_rooted(n: usize, k: usize, filter: Option<SurfaceType>) -> Vec<FacedMap> {
    compositions(2 * n, k)
        .par_iter()
        .flat_map_iter(|sizes| {
            enumerate_faced(sizes, filter).into_iter().flat_map(|m| enumerate_rooted_labelings(&m)).collect::<Vec<_>>()
        })
        .collect()
}

/// Rooted maps with `n` edges on the surface, read directly off flag systems:
/// every edge is a fixed block of four flags and every fixed-point-free
/// involution is tried as the corner involution. Independent of the bijections.
pub fn enumerate_rooted_maps_by_flags(n: usize, surface: SurfaceType) -> Result<Vec<EmbeddedMap>> {
    if n > FLAG_SYSTEM_LIMIT {
        return Err(MapError::SizeTooLarge(n));
    }
    let len = 4 * n;
    let tau0: Vec<usize> = (0..len).map(|f| f ^ 1).collect();
    let tau2: Vec<usize> = (0..len).map(|f| f ^ 2).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for tau1 in matchings(len / 2) {
        let Ok(m) = EmbeddedMap::new(tau0.clone(), tau1, tau2.clone(), 0) else { continue };
        if m.euler_type() != surface {
            continue;
        }
        for r in 0..len {
            let rooted = m.reroot(Flag(r));
            if seen.insert(canonical_code(&rooted)) {
                out.push(rooted);
            }
        }
    }
    Ok(out)
}

/// Largest edge count accepted by [`enumerate_rooted_maps_by_flags`].
pub const FLAG_SYSTEM_LIMIT: usize = 3;

/// Rooted bipartite quadrangulations with `n` faces obtained through the
/// corner construction from [`enumerate_rooted_maps_by_flags`], every flag
/// taken as a root.
pub fn enumerate_quadrangulations_by_flags(n: usize, surface: SurfaceType) -> Result<Vec<EmbeddedMap>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for m in enumerate_rooted_maps_by_flags(n, surface)? {
        let q = tutte_quadrangulation(&m);
        for r in 0..q.flag_count() {
            let rooted = q.reroot(Flag(r));
            if seen.insert(canonical_code(&rooted)) {
                out.push(rooted);
            }
        }
    }
    Ok(out)
}

/// Largest face count accepted by [`build_oracle_matching`].
pub const ORACLE_LIMIT: usize = 4;

/// A rooted quadrangulation with a pointed vertex.
#[derive(Debug, Clone)]
pub struct PointedQuad {
    pub q: EmbeddedMap,
    pub v0: Vertex,
}

/// A rooted labeled one-face map with a sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedLabeled {
    pub map: UnicellularMap,
    pub positive: bool,
}

/// Incidence graph between pointed quadrangulations whose point has degree
/// `d` and signed labeled maps with `d` corners of minimum label, together
/// with a perfect matching of it.
#[derive(Debug, Clone)]
pub struct OracleMatching {
    pub surface: SurfaceType,
    pub n: usize,
    pub d: usize,
    pub left: Vec<PointedQuad>,
    pub right: Vec<SignedLabeled>,
    /// For each left node, one entry per root choice at the point: (right node, chosen root).
    pub incidence: Vec<Vec<(usize, Flag)>>,
    /// Incidences received by each right node, with multiplicity.
    pub right_degree: Vec<usize>,
    /// For each left node, its matched right node and the root choice realizing it.
    pub matching: Vec<(usize, Flag)>,
}

impl OracleMatching {
    /// Every node on both sides meets exactly `2d` incidences.
    pub fn is_regular(&self) -> bool {
        let d2 = 2 * self.d;
        self.incidence.iter().all(|e| e.len() == d2) && self.right_degree.iter().all(|&x| x == d2)
    }

    /// Recomputes the image of every matched pair and checks that the matching is a bijection.
    pub fn verify(&self) -> Result<()> {
        let mut used = vec![false; self.right.len()];
        for (i, &(j, rho)) in self.matching.iter().enumerate() {
            let p = &self.left[i];
            if p.q.vertex_of(rho) != p.v0 {
                return Err(MapError::InternalInvariantViolated(format!("root choice of node {i} is not at the point")));
            }
            if signed_image(&p.q, rho)? != self.right[j] {
                return Err(MapError::InternalInvariantViolated(format!("node {i} is not matched to its image")));
            }
            if std::mem::replace(&mut used[j], true) {
                return Err(MapError::InternalInvariantViolated(format!("right node {j} matched twice")));
            }
        }
        if self.matching.len() != self.right.len() {
            return Err(MapError::InternalInvariantViolated("matching is not perfect".into()));
        }
        Ok(())
    }
}

/// Image of the quadrangulation `q` pointed at the vertex of `rho`, with `rho` as the chosen root.
///
/// The original root becomes a mark on the rerooted quadrangulation; its
/// position `j` in the canonical traversal of the rerooted map selects the
/// oriented corner `j / 2` of the one-face map (numbered along the face from
/// its root, two orientations per corner) and the sign `j % 2`. Labels are
/// then shifted so that the marked corner gets label 1.
pub fn signed_image(q: &EmbeddedMap, rho: Flag) -> Result<SignedLabeled> {
    let rerooted = q.reroot(rho);
    let u = crate::forward::phi(&rerooted)?;
    let j = canonical_flag_index(&rerooted)[q.root().0];
    let oriented = j / 2;
    let marked = u.rerooted(oriented / 2, oriented % 2 == 0)?;
    let root_label = marked.labels().ok_or(MapError::NotLabeled)?[0];
    Ok(SignedLabeled { map: marked.shifted(1 - root_label), positive: j % 2 == 0 })
}

fn min_label_corners(u: &UnicellularMap) -> usize {
    let l = u.labels().expect("labeled");
    let m = *l.iter().min().expect("nonempty");
    l.iter().filter(|&&x| x == m).count()
}

/// Builds the incidence graph for quadrangulations with `n` faces whose point
/// has degree `d`, and finds a perfect matching by augmenting paths.
pub fn build_oracle_matching(surface: SurfaceType, n: usize, d: usize) -> Result<OracleMatching> {
    if n > ORACLE_LIMIT {
        return Err(MapError::SizeTooLarge(n));
    }
    let mut left = Vec::new();
    for q in enumerate_quadrangulations(n, surface)? {
        for v in 0..q.vertex_count() {
            if q.degree(Vertex(v)) == d {
                left.push(PointedQuad { q: q.clone(), v0: Vertex(v) });
            }
        }
    }
    let mut right = Vec::new();
    for u in enumerate_unicellular(n, Some(surface)) {
        for m in enumerate_labelings(&u, false) {
            if min_label_corners(&m) == d {
                for positive in [true, false] {
                    right.push(SignedLabeled { map: m.clone(), positive });
                }
            }
        }
    }
    let index: std::collections::HashMap<&SignedLabeled, usize> = right.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut incidence = Vec::with_capacity(left.len());
    let mut right_degree = vec![0usize; right.len()];
    for p in &left {
        let mut edges = Vec::new();
        for f in 0..p.q.flag_count() {
            if p.q.vertex_of(Flag(f)) != p.v0 {
                continue;
            }
            let image = signed_image(&p.q, Flag(f))?;
            let &j = index.get(&image).ok_or_else(|| {
                MapError::InternalInvariantViolated("image is not a labeled map with the expected minimum corners".into())
            })?;
            right_degree[j] += 1;
            edges.push((j, Flag(f)));
        }
        incidence.push(edges);
    }
    let matching = perfect_matching(&incidence, right.len()).ok_or_else(|| {
        MapError::InternalInvariantViolated(format!("{surface} n={n} d={d}: incidence graph has no perfect matching"))
    })?;
    Ok(OracleMatching { surface, n, d, left, right, incidence, right_degree, matching })
}

/// Maximum matching by repeated augmenting paths; `None` unless it saturates both sides.
fn perfect_matching(incidence: &[Vec<(usize, Flag)>], right_len: usize) -> Option<Vec<(usize, Flag)>> {
    if incidence.len() != right_len {
        return None;
    }
    let mut owner: Vec<Option<(usize, Flag)>> = vec![None; right_len];
    fn augment(
        i: usize,
        incidence: &[Vec<(usize, Flag)>],
        owner: &mut [Option<(usize, Flag)>],
        visited: &mut [bool],
    ) -> bool {
        for &(j, rho) in &incidence[i] {
            if std::mem::replace(&mut visited[j], true) {
                continue;
            }
            if owner[j].map_or(true, |(k, _)| augment(k, incidence, owner, visited)) {
                owner[j] = Some((i, rho));
                return true;
            }
        }
        false
    }
    for i in 0..incidence.len() {
        let mut visited = vec![false; right_len];
        if !augment(i, incidence, &mut owner, &mut visited) {
            return None;
        }
    }
    let mut out = vec![(usize::MAX, Flag(0)); incidence.len()];
    for (j, o) in owner.iter().enumerate() {
        let (i, rho) = o.expect("saturated");
        out[i] = (j, rho);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_counts() {
        for n in 1..=4 {
            let all = enumerate_unicellular(n, None).len() as u128;
            assert_eq!(all, raw_count(n));
        }
        assert_eq!(enumerate_unicellular(1, Some(SurfaceType::SPHERE)).len(), 1);
        assert_eq!(enumerate_unicellular(1, Some(SurfaceType::PROJECTIVE_PLANE)).len(), 1);
    }

    #[test]
    fn single_edge_labelings() {
        let u = &enumerate_unicellular(1, Some(SurfaceType::SPHERE))[0];
        assert_eq!(count_labelings(u, false), 3);
        assert_eq!(count_labelings(u, true), 2);
    }

    #[test]
    fn sphere_two_edges_labeled() {
        assert_eq!(labeled_count(SurfaceType::SPHERE, 2), 18);
    }

    #[test]
    fn flag_generator_agrees_with_reverse_images() {
        for s in [SurfaceType::SPHERE, SurfaceType::PROJECTIVE_PLANE, SurfaceType::TORUS, SurfaceType::KLEIN_BOTTLE] {
            for n in 1..=2 {
                let a: HashSet<Vec<u8>> = enumerate_quadrangulations(n, s).unwrap().iter().map(canonical_code).collect();
                let b: HashSet<Vec<u8>> =
                    enumerate_quadrangulations_by_flags(n, s).unwrap().iter().map(canonical_code).collect();
                assert_eq!(a, b, "{s} n={n}");
            }
        }
        assert_eq!(enumerate_quadrangulations_by_flags(2, SurfaceType::SPHERE).unwrap().len(), 9);
        assert!(matches!(enumerate_rooted_maps_by_flags(4, SurfaceType::SPHERE), Err(MapError::SizeTooLarge(4))));
    }

    #[test]
    fn oracle_matching_sphere() {
        for n in 1..=3 {
            let mut pointed = 0;
            for d in 1..=2 * n {
                let m = build_oracle_matching(SurfaceType::SPHERE, n, d).unwrap();
                assert!(m.is_regular(), "n={n} d={d}");
                m.verify().unwrap();
                pointed += m.left.len();
            }
            let labeled = labeled_count(SurfaceType::SPHERE, n) as usize;
            assert_eq!(pointed, 2 * labeled);
        }
    }

    #[test]
    fn oracle_matching_nonorientable() {
        for s in [SurfaceType::PROJECTIVE_PLANE, SurfaceType::KLEIN_BOTTLE] {
            for d in 1..=6 {
                let m = build_oracle_matching(s, 3, d).unwrap();
                assert!(m.is_regular(), "{s} d={d}");
                m.verify().unwrap();
            }
        }
        assert!(matches!(build_oracle_matching(SurfaceType::SPHERE, 5, 1), Err(MapError::SizeTooLarge(5))));
    }
}
