//! Quadrangulations with several delayed sources, and pointed quadrangulations
//! read through their extremal vertices.

use std::collections::VecDeque;

use thiserror::Error;

use crate::error::{MapError, Result};
use crate::forward::{build_deg_sources, extract_red_edges, DegOptions, SourceFlag};
use crate::polygon::FacedMap;
use crate::reverse::{lambda_faced, LambdaOptions, LambdaOutput};
use crate::surface::{bfs_distances, canonical_vertex_flags, canonical_vertex_order, EmbeddedMap, Flag, Vertex};

/// Sources with delays; `corners[j]` is a flag at `vertices[j]` when marked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayedSources {
    pub vertices: Vec<Vertex>,
    pub delays: Vec<i64>,
    pub corners: Option<Vec<Flag>>,
}

impl DelayedSources {
    /// Sources marked by flags; the vertices are read off the flags.
    pub fn marked(q: &EmbeddedMap, corners: &[Flag], delays: &[i64]) -> Self {
        DelayedSources {
            vertices: corners.iter().map(|&f| q.vertex_of(f)).collect(),
            delays: delays.to_vec(),
            corners: Some(corners.to_vec()),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// First violated source condition, with witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SourceViolation {
    #[error("no sources")]
    Empty,
    #[error("{vertices} vertices but {delays} delays")]
    LengthMismatch { vertices: usize, delays: usize },
    #[error("source {index} is vertex {vertex}, out of range")]
    OutOfRange { index: usize, vertex: usize },
    #[error("sources {i} and {j} are the same vertex")]
    Repeated { i: usize, j: usize },
    #[error("marked corner of source {index} is not incident to it")]
    CornerMismatch { index: usize },
    #[error("minimum delay is {min}, expected 0")]
    MinDelay { min: i64 },
    #[error("sources {i} and {j}: delay gap {gap} is not below their distance {distance}")]
    DelayGap { i: usize, j: usize, gap: i64, distance: i64 },
    #[error("sources {i} and {j}: delay difference plus distance is {value}, which is odd")]
    Parity { i: usize, j: usize, value: i64 },
}

/// Checks the three source conditions in order; indices are 0-based.
pub fn validate_sources(q: &EmbeddedMap, s: &DelayedSources) -> std::result::Result<(), SourceViolation> {
    let k = s.vertices.len();
    if k == 0 {
        return Err(SourceViolation::Empty);
    }
    if s.delays.len() != k {
        return Err(SourceViolation::LengthMismatch { vertices: k, delays: s.delays.len() });
    }
    for (index, v) in s.vertices.iter().enumerate() {
        if v.0 >= q.vertex_count() {
            return Err(SourceViolation::OutOfRange { index, vertex: v.0 });
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            if s.vertices[i] == s.vertices[j] {
                return Err(SourceViolation::Repeated { i, j });
            }
        }
    }
    if let Some(c) = &s.corners {
        if c.len() != k {
            return Err(SourceViolation::CornerMismatch { index: c.len().min(k) });
        }
        for (index, (f, v)) in c.iter().zip(&s.vertices).enumerate() {
            if f.0 >= q.flag_count() || q.vertex_of(*f) != *v {
                return Err(SourceViolation::CornerMismatch { index });
            }
        }
    }
    let min = *s.delays.iter().min().unwrap();
    if min != 0 {
        return Err(SourceViolation::MinDelay { min });
    }
    let dist: Vec<Vec<u32>> = s.vertices.iter().map(|&w| bfs_distances(q, w)).collect();
    for i in 0..k {
        for j in i + 1..k {
            let distance = dist[i][s.vertices[j].0] as i64;
            let gap = (s.delays[i] - s.delays[j]).abs();
            if gap >= distance {
                return Err(SourceViolation::DelayGap { i, j, gap, distance });
            }
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            let value = s.delays[i] - s.delays[j] + dist[i][s.vertices[j].0] as i64;
            if value.rem_euclid(2) != 0 {
                return Err(SourceViolation::Parity { i, j, value });
            }
        }
    }
    Ok(())
}

/// Distance from the delayed sources, `min_j d(v, w_j) + delay_j`.
pub fn ell_d(q: &EmbeddedMap, s: &DelayedSources) -> Result<Vec<i64>> {
    validate_sources(q, s).map_err(|e| MapError::SourcesInvalid(e.to_string()))?;
    let src: Vec<(Vertex, u32)> = s.vertices.iter().zip(&s.delays).map(|(&w, &d)| (w, d as u32)).collect();
    Ok(crate::surface::multi_source_distances(q, &src).into_iter().map(i64::from).collect())
}

/// Labeled map with one face per source, face `j` rooted at the image of corner `j`.
pub fn phi_multi(q: &EmbeddedMap, s: &DelayedSources) -> Result<FacedMap> {
    phi_multi_checked(q, s, DegOptions::default())
}

pub fn phi_multi_checked(q: &EmbeddedMap, s: &DelayedSources, opts: DegOptions) -> Result<FacedMap> {
    validate_sources(q, s).map_err(|e| MapError::SourcesInvalid(e.to_string()))?;
    let corners = s.corners.as_ref().ok_or_else(|| MapError::SourcesInvalid("sources need marked corners".into()))?;
    let flags: Vec<SourceFlag> =
        corners.iter().zip(&s.delays).map(|(&root, &d)| SourceFlag { root, delay: d as u32 }).collect();
    let deg = build_deg_sources(q, &flags, opts)?;
    extract_red_edges(q, &deg, corners)
}

/// Quadrangulation with marked delayed sources rebuilt from a multi-rooted map.
#[derive(Debug, Clone)]
pub struct MultiQuadrangulation {
    /// Rooted at the marked corner of the first source.
    pub q: EmbeddedMap,
    pub sources: DelayedSources,
    /// Label of every vertex of `q`; equals the distance from the delayed sources.
    pub labels: Vec<i64>,
    pub detail: LambdaOutput,
}

/// Inverse of [`phi_multi`]: each face must be rooted at a corner of its
/// minimum label, and the smallest root label must be 1.
pub fn lambda_multi(m: &FacedMap) -> Result<MultiQuadrangulation> {
    lambda_multi_checked(m, LambdaOptions::default())
}

pub fn lambda_multi_checked(m: &FacedMap, opts: LambdaOptions) -> Result<MultiQuadrangulation> {
    let labels = m.labels().ok_or(MapError::NotLabeled)?;
    for j in 0..m.face_count() {
        let off = m.face_offset(j);
        let min = labels[off..off + m.face_sizes()[j]].iter().min().unwrap();
        if labels[off] != *min {
            return Err(MapError::NotWellLabeled(format!("root corner of face {} is not of minimum label", j + 1)));
        }
    }
    let out = lambda_faced(m, opts)?;
    let delays: Vec<i64> = out.centers.iter().map(|c| out.labels[c.0]).collect();
    let sources = DelayedSources { vertices: out.centers.clone(), delays, corners: Some(out.root_flags.clone()) };
    Ok(MultiQuadrangulation { q: out.q.clone(), sources, labels: out.labels.clone(), detail: out })
}

/// Vertices strictly farther from `v0` than each of their neighbours.
pub fn extremal_vertices(q: &EmbeddedMap, v0: Vertex) -> Vec<Vertex> {
    let d = bfs_distances(q, v0);
    let adj = q.adjacency();
    (0..q.vertex_count())
        .filter(|&u| adj[u].iter().all(|&w| d[w] < d[u]))
        .map(Vertex)
        .collect()
}

/// `max_w d(w, v0) - d(v, v0)`; its local minima are the extremal vertices.
pub fn ab_labels(q: &EmbeddedMap, v0: Vertex) -> Vec<i64> {
    let d = bfs_distances(q, v0);
    let max = *d.iter().max().unwrap() as i64;
    d.into_iter().map(|x| max - x as i64).collect()
}

/// Extremal vertices in canonical order, each marked by its first canonical flag.
pub fn ab_default_marks(q: &EmbeddedMap, v0: Vertex) -> Vec<Flag> {
    let ext = extremal_vertices(q, v0);
    let first = canonical_vertex_flags(q);
    canonical_vertex_order(q).into_iter().filter(|v| ext.contains(v)).map(|v| first[v.0]).collect()
}

/// Labeled map with a pointed vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedMap {
    /// Faces in source order, each rooted at a corner of its minimum label.
    pub map: FacedMap,
    /// Vertex id within `map`.
    pub point: Vertex,
}

/// Graph distances in a polygon-encoded map.
pub fn faced_distances(m: &FacedMap, from: Vertex) -> Vec<u32> {
    let mut adj = vec![Vec::new(); m.vertex_count()];
    for s in 0..m.side_count() {
        let (a, b) = (m.corner_vertex(s).0, m.corner_vertex(m.next(s)).0);
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut d = vec![u32::MAX; m.vertex_count()];
    d[from.0] = 0;
    let mut queue = VecDeque::from([from.0]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if d[y] == u32::MAX {
                d[y] = d[x] + 1;
                queue.push_back(y);
            }
        }
    }
    d
}

/// Pointed map of a pointed quadrangulation; `marks` holds one flag per
/// extremal vertex, in the order the faces should get.
pub fn ab_forward(q: &EmbeddedMap, v0: Vertex, marks: &[Flag]) -> Result<PointedMap> {
    let ext = extremal_vertices(q, v0);
    let marked: Vec<Vertex> = marks.iter().map(|&f| q.vertex_of(f)).collect();
    let mut sorted = marked.clone();
    sorted.sort();
    if marks.iter().any(|f| f.0 >= q.flag_count()) || sorted != ext {
        return Err(MapError::SourcesInvalid("marks must cover the extremal vertices once each".into()));
    }
    let labels = ab_labels(q, v0);
    let delays: Vec<i64> = marked.iter().map(|v| labels[v.0]).collect();
    let map = phi_multi(q, &DelayedSources::marked(q, marks, &delays))?;
    let l = map.vertex_labels().expect("labeled output");
    let max = *l.iter().max().unwrap();
    let point = l.iter().position(|&x| x == max).expect("nonempty");
    Ok(PointedMap { map, point: Vertex(point) })
}

/// Pointed quadrangulation of a pointed map, with its extremal vertices as sources.
#[derive(Debug, Clone)]
pub struct PointedQuadrangulation {
    pub q: EmbeddedMap,
    pub point: Vertex,
    pub sources: DelayedSources,
}

/// Inverse of [`ab_forward`]; the labels of `p.map` are recomputed from the
/// distances to the pointed vertex.
pub fn ab_backward(p: &PointedMap) -> Result<PointedQuadrangulation> {
    let d = faced_distances(&p.map, p.point);
    let max = *d.iter().max().unwrap() as i64;
    // labels decrease away from the point; the smallest becomes 1
    let labels: Vec<i64> = d.iter().map(|&x| max - x as i64 + 1).collect();
    let mut m = p.map.clone();
    m.set_vertex_labels(&labels)?;
    let roots_min = (0..m.face_count()).map(|j| m.labels().unwrap()[m.face_offset(j)]).min().unwrap();
    if roots_min != 1 {
        return Err(MapError::NotWellLabeled(format!("smallest root label is {roots_min}, expected 1")));
    }
    let mq = lambda_multi(&m)?;
    let corner = (0..m.side_count()).find(|&c| m.corner_vertex(c) == p.point).expect("point has a corner");
    Ok(PointedQuadrangulation { point: mq.detail.corner_vertex[corner], q: mq.q, sources: mq.sources })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::enumerate_quadrangulations;
    use crate::forward::phi;
    use crate::surface::SurfaceType;

    /// The 4-cycle quadrangulation of the sphere.
    fn four_cycle() -> EmbeddedMap {
        enumerate_quadrangulations(2, SurfaceType::SPHERE)
            .unwrap()
            .into_iter()
            .find(|q| q.vertex_count() == 4 && q.degrees().iter().all(|&d| d == 2))
            .unwrap()
    }

    fn opposite(q: &EmbeddedMap) -> (Vertex, Vertex) {
        let v0 = q.root_vertex();
        let d = bfs_distances(q, v0);
        (v0, Vertex(d.iter().position(|&x| x == 2).unwrap()))
    }

    fn sources(v: &[Vertex], d: &[i64]) -> DelayedSources {
        DelayedSources { vertices: v.to_vec(), delays: d.to_vec(), corners: None }
    }

    #[test]
    fn source_conditions_on_four_cycle() {
        let q = four_cycle();
        let (a, b) = opposite(&q);
        assert!(validate_sources(&q, &sources(&[a], &[0])).is_ok());
        assert!(validate_sources(&q, &sources(&[a, b], &[0, 0])).is_ok());
        assert!(matches!(validate_sources(&q, &sources(&[a, b], &[0, 1])), Err(SourceViolation::Parity { .. })));
        assert!(matches!(validate_sources(&q, &sources(&[a, b], &[0, 2])), Err(SourceViolation::DelayGap { .. })));
        assert!(matches!(validate_sources(&q, &sources(&[a, b], &[1, 1])), Err(SourceViolation::MinDelay { min: 1 })));
        assert!(matches!(validate_sources(&q, &sources(&[a, a], &[0, 0])), Err(SourceViolation::Repeated { .. })));
    }

    #[test]
    fn delayed_distances_on_four_cycle() {
        let q = four_cycle();
        let (a, b) = opposite(&q);
        let l = ell_d(&q, &sources(&[a, b], &[0, 0])).unwrap();
        for v in 0..4 {
            let expected = if Vertex(v) == a || Vertex(v) == b { 0 } else { 1 };
            assert_eq!(l[v], expected);
        }
        let single = ell_d(&q, &sources(&[a], &[0])).unwrap();
        let d: Vec<i64> = bfs_distances(&q, a).into_iter().map(i64::from).collect();
        assert_eq!(single, d);
    }

    #[test]
    fn one_source_agrees_with_phi() {
        for s in [SurfaceType::SPHERE, SurfaceType::KLEIN_BOTTLE] {
            for q in enumerate_quadrangulations(3, s).unwrap() {
                let m = phi_multi(&q, &DelayedSources::marked(&q, &[q.root()], &[0])).unwrap();
                assert_eq!(&m, phi(&q).unwrap().as_faced());
            }
        }
    }

    #[test]
    fn unmarked_sources_are_rejected() {
        let q = four_cycle();
        assert!(matches!(phi_multi(&q, &sources(&[q.root_vertex()], &[0])), Err(MapError::SourcesInvalid(_))));
    }

    #[test]
    fn pointed_four_cycle() {
        let q = four_cycle();
        let (a, b) = opposite(&q);
        assert_eq!(extremal_vertices(&q, a), vec![b]);
        let p = ab_forward(&q, a, &ab_default_marks(&q, a)).unwrap();
        assert_eq!((p.map.edge_count(), p.map.face_count(), p.map.vertex_count()), (2, 1, 3));
        let mut d = faced_distances(&p.map, p.point);
        d.sort();
        assert_eq!(d, vec![0, 1, 1]);
        assert!(ab_forward(&q, a, &[]).is_err());
    }

    #[test]
    fn point_is_never_extremal() {
        for q in enumerate_quadrangulations(3, SurfaceType::PROJECTIVE_PLANE).unwrap() {
            for v in 0..q.vertex_count() {
                let ext = extremal_vertices(&q, Vertex(v));
                assert!(!ext.is_empty());
                assert!(!ext.contains(&Vertex(v)));
            }
        }
    }
}
