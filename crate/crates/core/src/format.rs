//! Plain-text file formats.
//!
//! `.umap` holds a one-face map as a glued polygon, `.emap` a map as three flag
//! involutions and `.kmap` a map with several rooted faces and/or a list of
//! delayed sources on a quadrangulation. Printing always produces the
//! canonical form, so `print(parse(print(x))) == print(x)`.

use std::fmt::Write as _;

use crate::error::{MapError, Result};
use crate::polygon::{FacedMap, UnicellularMap};
use crate::surface::{EmbeddedMap, Flag};

fn parse_err(line: usize, msg: impl Into<String>) -> MapError {
    MapError::Parse { line, msg: msg.into() }
}

/// Non-empty lines without `#` comments, with their 1-based line numbers.
fn content_lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, w)| !w.is_empty())
        .collect()
}

fn num<T: std::str::FromStr>(line: usize, word: &str) -> Result<T> {
    word.parse().map_err(|_| parse_err(line, format!("expected a number, found `{word}`")))
}

fn orientation(line: usize, word: &str) -> Result<bool> {
    match word {
        "+" => Ok(true),
        "-" => Ok(false),
        _ => Err(parse_err(line, format!("expected `+` or `-`, found `{word}`"))),
    }
}

/// Pairs given as `a b s|t` lines over 1-based sides, into partner and twist vectors.
fn read_pairs(lines: &[(usize, Vec<&str>)], total: usize) -> Result<(Vec<usize>, Vec<bool>)> {
    let mut partner = vec![usize::MAX; total];
    let mut twisted = vec![false; total];
    for (line, w) in lines {
        let line = *line;
        if w.len() != 3 {
            return Err(parse_err(line, "expected `a b s` or `a b t`"));
        }
        let (a, b): (usize, usize) = (num(line, w[0])?, num(line, w[1])?);
        let t = match w[2] {
            "s" => false,
            "t" => true,
            other => return Err(parse_err(line, format!("expected `s` or `t`, found `{other}`"))),
        };
        if a == 0 || b == 0 || a > total || b > total || a >= b {
            return Err(parse_err(line, format!("pair ({a}, {b}) needs 1 <= a < b <= {total}")));
        }
        if partner[a - 1] != usize::MAX || partner[b - 1] != usize::MAX {
            return Err(parse_err(line, format!("side in pair ({a}, {b}) is already glued")));
        }
        partner[a - 1] = b - 1;
        partner[b - 1] = a - 1;
        twisted[a - 1] = t;
        twisted[b - 1] = t;
    }
    if let Some(s) = partner.iter().position(|&p| p == usize::MAX) {
        return Err(MapError::MatchingInvalid(format!("side {} is not glued", s + 1)));
    }
    Ok((partner, twisted))
}

fn write_pairs(out: &mut String, m: &FacedMap) {
    for s in 0..m.side_count() {
        let p = m.partner(s);
        if s < p {
            let _ = writeln!(out, "{} {} {}", s + 1, p + 1, if m.is_twisted(s) { 't' } else { 's' });
        }
    }
}

/// Vertex labels in order of first visit along the polygons.
fn write_labels(out: &mut String, m: &FacedMap) {
    if let Some(vl) = m.vertex_labels() {
        let words: Vec<String> = vl.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "labels {}", words.join(" "));
    }
}

/// Glues the polygons as written, attaches labels by first visit and rereads
/// the faces from the given roots.
fn build_faced(
    sizes: Vec<usize>,
    partner: Vec<usize>,
    twisted: Vec<bool>,
    labels: Option<(usize, Vec<i64>)>,
    roots: &[Flag],
) -> Result<FacedMap> {
    let raw = FacedMap::new(sizes, partner, twisted, None)?;
    let vertex_labels = match labels {
        Some((line, l)) => {
            if l.len() != raw.vertex_count() {
                return Err(parse_err(line, format!("{} labels for {} vertices", l.len(), raw.vertex_count())));
            }
            Some(l)
        }
        None => None,
    };
    let m = raw.to_embedded();
    // vertices of `raw` are numbered by first corner; carry labels through the flags
    let per_vertex = vertex_labels.map(|l| {
        let mut vl = vec![0; m.vertex_count()];
        for s in 0..raw.side_count() {
            vl[m.vertex_of(Flag(2 * s)).0] = l[raw.corner_vertex(s).0];
        }
        vl
    });
    FacedMap::from_embedded(&m, roots, per_vertex.as_deref())
}

fn labels_line(line: usize, w: &[&str]) -> Result<(usize, Vec<i64>)> {
    Ok((line, w[1..].iter().map(|x| num(line, x)).collect::<Result<_>>()?))
}

pub fn print_umap(u: &UnicellularMap) -> String {
    let mut out = format!("umap {} 1 +\n", u.n());
    write_pairs(&mut out, u.as_faced());
    write_labels(&mut out, u.as_faced());
    out
}

pub fn parse_umap(text: &str) -> Result<UnicellularMap> {
    let lines = content_lines(text);
    let Some((l0, head)) = lines.first() else { return Err(parse_err(1, "empty input")) };
    if head.len() != 4 || head[0] != "umap" {
        return Err(parse_err(*l0, "expected `umap <n> <root_side> <+|->`"));
    }
    let n: usize = num(*l0, head[1])?;
    let root_side: usize = num(*l0, head[2])?;
    let forward = orientation(*l0, head[3])?;
    if n == 0 {
        return Err(parse_err(*l0, "a map needs at least one edge"));
    }
    if root_side == 0 || root_side > 2 * n {
        return Err(MapError::IndexOutOfRange { index: root_side, bound: 2 * n });
    }
    let mut body = &lines[1..];
    let mut labels = None;
    if let Some((line, w)) = body.last() {
        if w[0] == "labels" {
            labels = Some(labels_line(*line, w)?);
            body = &body[..body.len() - 1];
        }
    }
    if body.len() != n {
        return Err(MapError::MatchingInvalid(format!("{} pairs for {} edges", body.len(), n)));
    }
    let (partner, twisted) = read_pairs(body, 2 * n)?;
    let root = Flag(2 * (root_side - 1) + usize::from(!forward));
    UnicellularMap::from_faced(build_faced(vec![2 * n], partner, twisted, labels, &[root])?)
}

pub fn print_emap(m: &EmbeddedMap) -> String {
    let mut out = format!("emap {} {}\n", m.flag_count(), m.root().0);
    for t in 0..3 {
        let words: Vec<String> = m.involution(t).iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "tau{t}: {}", words.join(" "));
    }
    out
}

pub fn parse_emap(text: &str) -> Result<EmbeddedMap> {
    let lines = content_lines(text);
    let Some((l0, head)) = lines.first() else { return Err(parse_err(1, "empty input")) };
    if head.len() != 3 || head[0] != "emap" {
        return Err(parse_err(*l0, "expected `emap <flag_count> <root_flag>`"));
    }
    let len: usize = num(*l0, head[1])?;
    let root: usize = num(*l0, head[2])?;
    if lines.len() != 4 {
        return Err(parse_err(*l0, "expected three involution lines"));
    }
    let mut tau: Vec<Vec<usize>> = Vec::with_capacity(3);
    for (t, (line, w)) in lines[1..].iter().enumerate() {
        if w[0] != format!("tau{t}:") {
            return Err(parse_err(*line, format!("expected `tau{t}:`")));
        }
        let images: Vec<usize> = w[1..].iter().map(|x| num(*line, x)).collect::<Result<_>>()?;
        if images.len() != len {
            return Err(parse_err(*line, format!("{} images for {len} flags", images.len())));
        }
        tau.push(images);
    }
    let t2 = tau.pop().unwrap();
    let t1 = tau.pop().unwrap();
    let t0 = tau.pop().unwrap();
    EmbeddedMap::new(t0, t1, t2, root)
}

/// One delayed source on a quadrangulation: vertex id, delay and a flag at the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceLine {
    pub vertex: usize,
    pub delay: i64,
    pub corner: usize,
}

/// Contents of a `.kmap` file; either part may be absent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KMap {
    /// Faces in order, each rooted at its first side.
    pub map: Option<FacedMap>,
    /// Pointed vertex of `map`, numbered by first visit.
    pub point: Option<usize>,
    pub sources: Vec<SourceLine>,
}

/// ```text
/// kmap <n>
/// faces <k>
/// sizes <s_1> .. <s_k>
/// roots <side><+|-> ..      one root per face, 1-based global side
/// <a> <b> <s|t>             n pair lines
/// labels ..                 optional
/// point <v>                 optional
/// sources <m>               optional, then m lines `<w_j> <d_j> <corner_j>`
/// ```
/// A sources-only file starts directly with the `sources` line.
pub fn print_kmap(k: &KMap) -> String {
    let mut out = String::new();
    if let Some(m) = &k.map {
        let _ = writeln!(out, "kmap {}", m.edge_count());
        let _ = writeln!(out, "faces {}", m.face_count());
        let sizes: Vec<String> = m.face_sizes().iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "sizes {}", sizes.join(" "));
        let roots: Vec<String> = (0..m.face_count()).map(|j| format!("{}+", m.face_offset(j) + 1)).collect();
        let _ = writeln!(out, "roots {}", roots.join(" "));
        write_pairs(&mut out, m);
        write_labels(&mut out, m);
        if let Some(p) = k.point {
            let _ = writeln!(out, "point {p}");
        }
    }
    if !k.sources.is_empty() {
        let _ = writeln!(out, "sources {}", k.sources.len());
        for s in &k.sources {
            let _ = writeln!(out, "{} {} {}", s.vertex, s.delay, s.corner);
        }
    }
    out
}

pub fn parse_kmap(text: &str) -> Result<KMap> {
    let lines = content_lines(text);
    let mut k = KMap::default();
    let mut rest = &lines[..];
    if let Some((l0, head)) = rest.first() {
        if head[0] == "kmap" {
            let l0 = *l0;
            if head.len() != 2 || rest.len() < 4 {
                return Err(parse_err(l0, "expected `kmap <n>` followed by faces, sizes and roots"));
            }
            let n: usize = num(l0, head[1])?;
            let field = |i: usize, name: &str| -> Result<(usize, &[&str])> {
                let (line, w) = &rest[i];
                if w[0] != name {
                    return Err(parse_err(*line, format!("expected `{name}`")));
                }
                Ok((*line, &w[1..]))
            };
            let (lf, fw) = field(1, "faces")?;
            if fw.len() != 1 {
                return Err(parse_err(lf, "expected `faces <k>`"));
            }
            let faces: usize = num(lf, fw[0])?;
            let (ls, sw) = field(2, "sizes")?;
            let sizes: Vec<usize> = sw.iter().map(|x| num(ls, x)).collect::<Result<_>>()?;
            if sizes.len() != faces || sizes.iter().sum::<usize>() != 2 * n {
                return Err(parse_err(ls, format!("need {faces} sizes summing to {}", 2 * n)));
            }
            let (lr, rw) = field(3, "roots")?;
            if rw.len() != faces {
                return Err(parse_err(lr, format!("need {faces} roots")));
            }
            let mut roots = Vec::with_capacity(faces);
            for r in rw {
                let (side, o) = r.split_at(r.len().saturating_sub(1));
                let side: usize = num(lr, side)?;
                if side == 0 || side > 2 * n {
                    return Err(MapError::IndexOutOfRange { index: side, bound: 2 * n });
                }
                roots.push(Flag(2 * (side - 1) + usize::from(!orientation(lr, o)?)));
            }
            rest = &rest[4..];
            let pair_end = rest.iter().position(|(_, w)| !matches!(w[2..].first(), Some(&"s" | &"t")) || w.len() != 3);
            let pair_end = pair_end.unwrap_or(rest.len());
            if pair_end != n {
                return Err(MapError::MatchingInvalid(format!("{pair_end} pairs for {n} edges")));
            }
            let (partner, twisted) = read_pairs(&rest[..n], 2 * n)?;
            rest = &rest[n..];
            let mut labels = None;
            if let Some((line, w)) = rest.first() {
                if w[0] == "labels" {
                    labels = Some(labels_line(*line, w)?);
                    rest = &rest[1..];
                }
            }
            k.map = Some(build_faced(sizes, partner, twisted, labels, &roots)?);
            if let Some((line, w)) = rest.first() {
                if w[0] == "point" {
                    if w.len() != 2 {
                        return Err(parse_err(*line, "expected `point <v>`"));
                    }
                    k.point = Some(num(*line, w[1])?);
                    rest = &rest[1..];
                }
            }
        }
    }
    if let Some((line, w)) = rest.first() {
        if w[0] != "sources" || w.len() != 2 {
            return Err(parse_err(*line, "expected `sources <m>`"));
        }
        let m: usize = num(*line, w[1])?;
        if rest.len() != m + 1 {
            return Err(parse_err(*line, format!("expected {m} source lines")));
        }
        for (line, w) in &rest[1..] {
            if w.len() != 3 {
                return Err(parse_err(*line, "expected `<vertex> <delay> <corner>`"));
            }
            k.sources.push(SourceLine { vertex: num(*line, w[0])?, delay: num(*line, w[1])?, corner: num(*line, w[2])? });
        }
    } else if k.map.is_none() {
        return Err(parse_err(1, "empty input"));
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{enumerate_labelings, enumerate_multi_rooted, enumerate_unicellular};

    #[test]
    fn umap_round_trip() {
        for u in enumerate_unicellular(3, None) {
            for m in enumerate_labelings(&u, false).into_iter().take(5).chain([u.clone()]) {
                let text = print_umap(&m);
                assert_eq!(parse_umap(&text).unwrap(), m, "{text}");
            }
        }
    }

    #[test]
    fn umap_reroots_on_parse() {
        let a = parse_umap("umap 2 2 +\n1 2 s\n3 4 s\n").unwrap();
        assert_eq!(a.straight_pairs(), vec![(1, 4), (2, 3)]);
        assert_eq!(print_umap(&a), "umap 2 1 +\n1 4 s\n2 3 s\n");
        let labeled = parse_umap("umap 1 2 +\n1 2 s\nlabels 1 2\n").unwrap();
        assert_eq!(labeled.labels().unwrap(), &[2, 1]);
    }

    #[test]
    fn umap_errors() {
        assert!(matches!(parse_umap(""), Err(MapError::Parse { .. })));
        assert!(matches!(parse_umap("umap 2 1 +\n1 2 s\n2 3 s\n"), Err(MapError::Parse { line: 3, .. })));
        assert!(matches!(parse_umap("umap 2 1 +\n1 2 s\n"), Err(MapError::MatchingInvalid(_))));
        assert!(matches!(parse_umap("umap 1 3 +\n1 2 s\n"), Err(MapError::IndexOutOfRange { .. })));
        assert!(matches!(parse_umap("umap 1 1 +\n1 2 x\n"), Err(MapError::Parse { line: 2, .. })));
        assert!(matches!(parse_umap("umap 1 1 +\n1 2 s\nlabels 1\n"), Err(MapError::Parse { .. })));
    }

    #[test]
    fn emap_round_trip() {
        for u in enumerate_unicellular(2, None) {
            let m = u.to_embedded().reroot(Flag(3));
            let text = print_emap(&m);
            let back = parse_emap(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(print_emap(&back), text);
        }
        assert!(matches!(
            parse_emap("emap 4 0\ntau0: 1 0 3 2\ntau1: 2 3 0 1\ntau2: 0 3 2 1\n"),
            Err(MapError::NotInvolution { which: 2, .. })
        ));
        assert!(matches!(parse_emap("emap 4 0\ntau0: 1 0 3 2\n"), Err(MapError::Parse { .. })));
    }

    #[test]
    fn kmap_round_trip() {
        for m in enumerate_multi_rooted(2, 2, None) {
            let k = KMap { map: Some(m), point: Some(0), sources: vec![SourceLine { vertex: 1, delay: 0, corner: 3 }] };
            let text = print_kmap(&k);
            assert_eq!(parse_kmap(&text).unwrap(), k, "{text}");
        }
        let only = KMap { map: None, point: None, sources: vec![SourceLine { vertex: 0, delay: 2, corner: 5 }] };
        assert_eq!(parse_kmap(&print_kmap(&only)).unwrap(), only);
        assert!(parse_kmap("kmap 1\nfaces 2\nsizes 1 1\nroots 1+ 1+\n1 2 s\n").is_err());
    }
}
