//! Uniform random labeled one-face maps of a given size on a given surface, and
//! distance statistics of the associated pointed quadrangulations.
//!
//! A labeled one-face map is cut into a core and a forest. The core is the
//! scheme with each scheme edge replaced by a labeled path (a lattice walk
//! with steps in {-1, 0, 1}); every corner of the core carries a labeled plane
//! tree. Walk and forest sizes are drawn from exact coefficient tables, or from
//! floating tables scaled by `3^-m` when the size is beyond [`EXACT_LIMIT`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::factorial::ln_binomial;

use crate::error::{MapError, Result};
use crate::genfun::{enumerate_schemes, normalized_labelings, NormalizedScheme, Signature};
use crate::polygon::{FacedMap, UnicellularMap};
use crate::reverse::{lambda_full, LambdaOptions};
use crate::surface::{EmbeddedMap, SurfaceType};

/// Largest size sampled with exact integer weights by [`SampleMode::Auto`].
pub const EXACT_LIMIT: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Exact,
    Float,
    /// Exact up to [`EXACT_LIMIT`] edges, floating beyond.
    Auto,
}

impl fmt::Display for SampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SampleMode::Exact => "exact",
            SampleMode::Float => "float",
            SampleMode::Auto => "auto",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub surface: SurfaceType,
    pub n: usize,
    pub seed: u64,
    pub replicates: usize,
}

/// Generator for replicate `r` of a run seeded with `seed`; independent of
/// scheduling because each replicate has its own stream.
pub fn replicate_rng(seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    rng
}

/// Nonnegative weights, either exact or floating and scaled by `3^-m` at size `m`.
trait Weight: Clone + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    /// Weight of one walk step.
    fn step() -> Self;
    fn from_u64(x: u64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// Proportional in `m` (for fixed `n`) to `C(2n, n-m) 3^(n-m) step^-m`.
    fn forest_binomial(n: usize, m: usize) -> Self;
    /// Index drawn with probability proportional to its weight.
    fn pick<R: Rng>(ws: &[Self], rng: &mut R) -> usize;
}

impl Weight for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn step() -> Self {
        One::one()
    }
    fn from_u64(x: u64) -> Self {
        BigUint::from(x)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn forest_binomial(n: usize, m: usize) -> Self {
        let mut c = <BigUint as One>::one();
        let k = (n - m) as u64;
        for i in 0..k {
            c = c * BigUint::from(2 * n as u64 - i) / BigUint::from(i + 1);
        }
        c * BigUint::from(3u32).pow(k as u32)
    }
    fn pick<R: Rng>(ws: &[Self], rng: &mut R) -> usize {
        let total: BigUint = ws.iter().sum();
        assert!(!Zero::is_zero(&total), "all weights are zero");
        let mut r = rng.gen_biguint_below(&total);
        for (i, w) in ws.iter().enumerate() {
            if &r < w {
                return i;
            }
            r -= w;
        }
        unreachable!("draw below the total")
    }
}

impl Weight for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn step() -> Self {
        1.0 / 3.0
    }
    fn from_u64(x: u64) -> Self {
        x as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn forest_binomial(n: usize, m: usize) -> Self {
        let n2 = 2 * n as u64;
        (ln_binomial(n2, (n - m) as u64) - ln_binomial(n2, n as u64)).exp()
    }
    fn pick<R: Rng>(ws: &[Self], rng: &mut R) -> usize {
        let total: f64 = ws.iter().sum();
        assert!(total > 0.0, "all weights are zero");
        let mut r = rng.gen::<f64>() * total;
        let mut last = 0;
        for (i, &w) in ws.iter().enumerate() {
            if w > 0.0 {
                if r < w {
                    return i;
                }
                r -= w;
                last = i;
            }
        }
        last
    }
}

fn series_mul<W: Weight>(a: &[W], b: &[W]) -> Vec<W> {
    let len = a.len().min(b.len());
    let mut out = vec![W::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

/// `1 / (1 - a)` for `a` without constant term.
fn inv_one_minus<W: Weight>(a: &[W]) -> Vec<W> {
    let mut r = vec![W::zero(); a.len()];
    r[0] = W::one();
    for m in 1..a.len() {
        let mut acc = W::zero();
        for i in 1..=m {
            if !a[i].is_zero() {
                acc = acc.add(&a[i].mul(&r[m - i]));
            }
        }
        r[m] = acc;
    }
    r
}

/// Draws `i` in `lo..=m` with weight `a[i] * b[m - i]`.
fn pick_split<W: Weight, R: Rng>(a: &[W], b: &[W], lo: usize, m: usize, rng: &mut R) -> usize {
    let ws: Vec<W> = (lo..=m).map(|i| a[i].mul(&b[m - i])).collect();
    lo + W::pick(&ws, rng)
}

/// Schemes sharing one signature.
#[derive(Debug, Clone)]
struct SignatureClass<W> {
    signature: Signature,
    members: Vec<NormalizedScheme>,
    /// `suffix[i]` is the product of the gap series for cuts `i..` and the bridge series.
    suffix: Vec<Vec<W>>,
}

/// Coefficient tables for walks measured in steps, up to order `n`.
#[derive(Debug, Clone)]
struct Tables<W> {
    /// `v_pow[k] = V^k` where `V = x(1 + V + V^2)` counts first passages one level up.
    v_pow: Vec<Vec<W>>,
    /// `gaps[d] = V^d / (1 - V^d)`.
    gaps: Vec<Vec<W>>,
    /// Bridges: `Br = 1 + x Br + 2 x V Br`.
    br: Vec<W>,
    nonempty_br: Vec<W>,
    /// `prod[a][b]` is `nonempty_br^a br^b`.
    prod: Vec<Vec<Vec<W>>>,
}

impl<W: Weight> Tables<W> {
    fn new(n: usize, max_edges: usize) -> Self {
        let len = n + 1;
        let step = W::step();
        let mut v = vec![W::zero(); len];
        let mut br = vec![W::zero(); len];
        br[0] = W::one();
        for m in 1..len {
            // V_m = x([m = 1] + V_{m-1} + (V^2)_{m-1})
            let mut acc = if m == 1 { W::one() } else { v[m - 1].clone() };
            let mut vb = W::zero();
            for i in 1..m {
                if i < m - 1 {
                    acc = acc.add(&v[i].mul(&v[m - 1 - i]));
                }
                vb = vb.add(&v[i].mul(&br[m - 1 - i]));
            }
            v[m] = step.mul(&acc);
            br[m] = step.mul(&br[m - 1].add(&W::from_u64(2).mul(&vb)));
        }
        let mut v_pow = vec![{
            let mut one = vec![W::zero(); len];
            one[0] = W::one();
            one
        }];
        for k in 1..=max_edges.max(2) {
            v_pow.push(series_mul(&v_pow[k - 1], &v));
        }
        let mut gaps = vec![Vec::new()];
        for d in 1..=max_edges {
            let mut g = inv_one_minus(&v_pow[d]);
            g[0] = W::zero();
            gaps.push(g);
        }
        let mut nonempty_br = br.clone();
        nonempty_br[0] = W::zero();
        let mut prod: Vec<Vec<Vec<W>>> = Vec::new();
        for a in 0..=max_edges {
            let mut row: Vec<Vec<W>> = Vec::new();
            for b in 0..=max_edges - a {
                let s = if a == 0 && b == 0 {
                    v_pow[0].clone()
                } else if b > 0 {
                    series_mul(&row[b - 1], &br)
                } else {
                    series_mul(&prod[a - 1][0], &nonempty_br)
                };
                row.push(s);
            }
            prod.push(row);
        }
        Tables { v_pow, gaps, br, nonempty_br, prod }
    }

    /// Steps of a uniform first passage from 0 to 1 with `m` steps.
    fn first_passage<R: Rng>(&self, m: usize, rng: &mut R, out: &mut Vec<i8>) {
        let v = &self.v_pow[1];
        let mut stack = vec![m];
        while let Some(m) = stack.pop() {
            let up = if m == 1 { W::one() } else { W::zero() };
            let flat = v[m - 1].clone();
            let down = self.v_pow[2][m - 1].clone();
            match W::pick(&[up, flat, down], rng) {
                0 => out.push(1),
                1 => {
                    out.push(0);
                    stack.push(m - 1);
                }
                _ => {
                    out.push(-1);
                    let i = pick_split(v, v, 1, m - 1, rng);
                    stack.push(m - 1 - i);
                    stack.push(i);
                }
            }
        }
    }

    /// Steps of a uniform bridge with `m` steps.
    fn bridge<R: Rng>(&self, mut m: usize, rng: &mut R, out: &mut Vec<i8>) {
        let v = &self.v_pow[1];
        while m > 0 {
            // first step flat, or a step away and the first passage back
            let mut ws = vec![self.br[m - 1].clone()];
            ws.extend((1..m).map(|i| W::from_u64(2).mul(&v[i].mul(&self.br[m - 1 - i]))));
            let k = W::pick(&ws, rng);
            if k == 0 {
                out.push(0);
                m -= 1;
            } else {
                let sign: i8 = if rng.gen() { 1 } else { -1 };
                out.push(sign);
                let start = out.len();
                self.first_passage(k, rng, out);
                // the passage goes back towards 0
                out[start..].iter_mut().for_each(|s| *s = -*s * sign);
                m -= 1 + k;
            }
        }
    }
}

/// A sampled core: a labeled one-face map whose corners still await trees.
struct Core {
    partner: Vec<usize>,
    twisted: Vec<bool>,
    labels: Vec<i64>,
}

#[derive(Debug, Clone)]
enum Plan<W> {
    /// Plane trees: no core.
    Sphere,
    /// A single cycle with a Möbius neighbourhood.
    Cycle { weights: Vec<W> },
    Schemes { classes: Vec<SignatureClass<W>>, joint: Vec<W>, joint_index: Vec<(usize, usize)> },
}

#[derive(Debug, Clone)]
struct Engine<W> {
    n: usize,
    tables: Tables<W>,
    plan: Plan<W>,
}

impl<W: Weight> Engine<W> {
    fn new(surface: SurfaceType, n: usize) -> Result<Self> {
        if surface.h2 == 0 {
            return Ok(Engine { n, tables: Tables::<W>::new(n, 0), plan: Plan::Sphere });
        }
        if surface.h2 == 1 {
            let tables = Tables::<W>::new(n, 1);
            let weights = (0..=n)
                .map(|k| if k == 0 { W::zero() } else { tables.br[k].mul(&W::forest_binomial(n, k)) })
                .collect();
            return Ok(Engine { n, tables, plan: Plan::Cycle { weights } });
        }
        let schemes = enumerate_schemes(surface)?;
        let max_edges = schemes.iter().map(|s| s.map.n()).max().unwrap_or(1);
        let tables = Tables::<W>::new(n, max_edges);
        let mut by_sig: BTreeMap<Signature, Vec<NormalizedScheme>> = BTreeMap::new();
        for s in &schemes {
            for ns in normalized_labelings(s) {
                by_sig.entry(ns.signature()).or_default().push(ns);
            }
        }
        let lcm = by_sig.keys().fold(1u64, |acc, s| acc.lcm(&(s.edges as u64)));
        let classes: Vec<SignatureClass<W>> = by_sig
            .into_iter()
            .map(|(signature, members)| {
                let mut suffix = vec![tables.prod[signature.same][signature.different].clone()];
                for &d in signature.cuts.iter().rev() {
                    let next = series_mul(&tables.gaps[d], &suffix[0]);
                    suffix.insert(0, next);
                }
                SignatureClass { signature, members, suffix }
            })
            .collect();
        let mut joint = Vec::new();
        let mut joint_index = Vec::new();
        for (c, class) in classes.iter().enumerate() {
            // scheme rootings are compensated by 1/|E|
            let mult = W::from_u64(class.members.len() as u64 * (lcm / class.signature.edges as u64));
            for m in 1..=n {
                let w = class.suffix[0][m].mul(&W::from_u64(m as u64)).mul(&W::forest_binomial(n, m)).mul(&mult);
                joint.push(w);
                joint_index.push((c, m));
            }
        }
        if joint.iter().all(|w| w.is_zero()) {
            return Err(MapError::SizeTooLarge(0));
        }
        Ok(Engine { n, tables, plan: Plan::Schemes { classes, joint, joint_index } })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Result<UnicellularMap> {
        let core = match &self.plan {
            Plan::Sphere => Core { partner: Vec::new(), twisted: Vec::new(), labels: Vec::new() },
            Plan::Cycle { weights } => self.cycle_core(W::pick(weights, rng), rng),
            Plan::Schemes { classes, joint, joint_index } => {
                let (c, m) = joint_index[W::pick(joint, rng)];
                self.scheme_core(&classes[c], m, rng)?
            }
        };
        let u = attach_forest(core, self.n, rng)?;
        let side = rng.gen_range(0..2 * self.n);
        let u = u.rerooted(side, rng.gen())?;
        let root = u.labels().expect("labeled")[0];
        Ok(u.shifted(1 - root))
    }

    fn cycle_core<R: Rng>(&self, k: usize, rng: &mut R) -> Core {
        let mut steps = Vec::with_capacity(k);
        self.tables.bridge(k, rng, &mut steps);
        let mut labels = Vec::with_capacity(2 * k);
        let mut l = 0i64;
        for &s in &steps {
            labels.push(l);
            l += i64::from(s);
        }
        labels.extend_from_within(..);
        let partner = (0..2 * k).map(|i| (i + k) % (2 * k)).collect();
        Core { partner, twisted: vec![true; 2 * k], labels }
    }

    fn scheme_core<R: Rng>(&self, class: &SignatureClass<W>, m: usize, rng: &mut R) -> Result<Core> {
        let t = &self.tables;
        let ns = &class.members[rng.gen_range(0..class.members.len())];
        let sig = &class.signature;
        let f = ns.scheme.map.as_faced();
        let level = |s: usize| ns.labels[f.corner_vertex(s).0];
        let edges: Vec<usize> = (0..f.side_count()).filter(|&s| s < f.partner(s)).collect();
        let ends: Vec<(usize, usize)> = edges.iter().map(|&s| (level(s), level(f.next(s)))).collect();

        // walk sizes: gap series per cut, then bridges of unequal and equal edges
        let mut rem = m;
        let mut gap_sizes = Vec::with_capacity(sig.cuts.len());
        for (i, &d) in sig.cuts.iter().enumerate() {
            let s = pick_split(&t.gaps[d], &class.suffix[i + 1], 1, rem, rng);
            gap_sizes.push(s);
            rem -= s;
        }
        let (mut a, mut b) = (sig.same, sig.different);
        let mut bridge_size = vec![0usize; edges.len()];
        for (e, &(x, y)) in ends.iter().enumerate() {
            if x != y {
                b -= 1;
                bridge_size[e] = pick_split(&t.br, &t.prod[a][b], 0, rem, rng);
            }
            rem -= bridge_size[e];
        }
        for (e, &(x, y)) in ends.iter().enumerate() {
            if x == y {
                a -= 1;
                bridge_size[e] = pick_split(&t.nonempty_br, &t.prod[a][0], 1, rem, rng);
                rem -= bridge_size[e];
            }
        }
        debug_assert_eq!(rem, 0);

        // first passages per level unit, handed to the edges crossing that level
        let mut steps: Vec<Vec<i8>> = vec![Vec::new(); edges.len()];
        let mut level_label = vec![0i64; sig.cuts.len() + 2];
        for (i, &d) in sig.cuts.iter().enumerate() {
            let j = i + 2;
            let crossing: Vec<usize> = (0..edges.len())
                .filter(|&e| {
                    let (x, y) = ends[e];
                    x.min(y) < j && j <= x.max(y)
                })
                .collect();
            debug_assert_eq!(crossing.len(), d);
            let mut left = gap_sizes[i];
            let mut units = 0;
            while left > 0 {
                // one unit of gap uses d first passages; stop or continue
                let ws: Vec<W> = (1..=left)
                    .map(|s| {
                        let rest = if s == left { W::one() } else { t.gaps[d][left - s].clone() };
                        t.v_pow[d][s].mul(&rest)
                    })
                    .collect();
                let mut block = 1 + W::pick(&ws, rng);
                left -= block;
                units += 1;
                for (k, &e) in crossing.iter().enumerate() {
                    let pieces_left = d - k;
                    let s = if pieces_left == 1 {
                        block
                    } else {
                        pick_split(&t.v_pow[1], &t.v_pow[pieces_left - 1], 1, block, rng)
                    };
                    t.first_passage(s, rng, &mut steps[e]);
                    block -= s;
                }
            }
            level_label[j] = level_label[j - 1] + units;
        }
        for (e, st) in steps.iter_mut().enumerate() {
            t.bridge(bridge_size[e], rng, st);
        }

        // core polygon: side s of the scheme becomes the walk of its edge
        let mut first = vec![0usize; f.side_count()];
        let mut acc = 0;
        let len_of = |s: usize| steps[edges.iter().position(|&x| x == s.min(f.partner(s))).unwrap()].len();
        for (s, slot) in first.iter_mut().enumerate() {
            *slot = acc;
            acc += len_of(s);
        }
        let total = acc;
        let mut partner = vec![0usize; total];
        let mut twisted = vec![false; total];
        let mut labels = vec![0i64; total];
        for (e, &a_side) in edges.iter().enumerate() {
            let (x, y) = ends[e];
            // labels along side a_side, from its start to its end
            let walk: Vec<i8> = if x <= y { steps[e].clone() } else { steps[e].iter().rev().map(|s| -s).collect() };
            let mut w = vec![level_label[x]];
            for &s in &walk {
                w.push(w.last().unwrap() + i64::from(s));
            }
            if *w.last().unwrap() != level_label[y] {
                return Err(MapError::InternalInvariantViolated("core walk misses its end label".into()));
            }
            let len = walk.len();
            let b_side = f.partner(a_side);
            let tw = f.is_twisted(a_side);
            for i in 0..len {
                let pa = first[a_side] + i;
                labels[pa] = w[i];
                let pb = if tw { first[b_side] + i } else { first[b_side] + len - 1 - i };
                labels[pb] = if tw { w[i] } else { w[i + 1] };
                partner[pa] = pb;
                partner[pb] = pa;
                twisted[pa] = tw;
                twisted[pb] = tw;
            }
        }
        Ok(Core { partner, twisted, labels })
    }
}

/// Uniform plane forest with `k` trees and `edges` edges, one up/down word per tree.
fn sample_forest<R: Rng>(k: usize, edges: usize, rng: &mut R) -> Vec<Vec<bool>> {
    let mut word: Vec<bool> = std::iter::repeat(true).take(edges).chain(std::iter::repeat(false).take(edges + k)).collect();
    word.shuffle(rng);
    let len = word.len();
    let mut prefix = vec![0i64; len + 1];
    for (i, &u) in word.iter().enumerate() {
        prefix[i + 1] = prefix[i] + if u { 1 } else { -1 };
    }
    // rotation at i first reaches -k at its end; exactly k such i
    let mut suffix_min = vec![i64::MAX; len + 1];
    for i in (0..len).rev() {
        suffix_min[i] = suffix_min[i + 1].min(if i + 1 < len { prefix[i + 1] } else { i64::MAX });
    }
    let mut good = Vec::with_capacity(k);
    let mut prefix_min = i64::MAX;
    for i in 0..len {
        if (i == 0 || prefix[i] < prefix_min) && suffix_min[i] > prefix[i] - k as i64 {
            good.push(i);
        }
        prefix_min = prefix_min.min(prefix[i]);
    }
    debug_assert_eq!(good.len(), k);
    let start = good[rng.gen_range(0..good.len())];
    let mut trees = vec![Vec::new(); k];
    let (mut tree, mut depth) = (0, 0i64);
    for i in 0..len {
        let u = word[(start + i) % len];
        if !u && depth == 0 {
            tree += 1;
            continue;
        }
        depth += if u { 1 } else { -1 };
        trees[tree].push(u);
    }
    trees
}

/// Hangs a uniform labeled forest in the corners of `core`, for `n` edges in total.
fn attach_forest<R: Rng>(core: Core, n: usize, rng: &mut R) -> Result<UnicellularMap> {
    let core_sides = core.labels.len();
    let k = core_sides.max(1);
    let trees = sample_forest(k, n - core_sides / 2, rng);
    let total = 2 * n;
    let mut partner = vec![0usize; total];
    let mut twisted = vec![false; total];
    let mut labels = Vec::with_capacity(total);
    let mut core_pos = vec![0usize; core_sides];
    for c in 0..k {
        let base = if core_sides == 0 { 0 } else { core.labels[c] };
        let mut stack: Vec<(usize, i64)> = Vec::new();
        let mut here = base;
        for &u in &trees[c] {
            let pos = labels.len();
            labels.push(here);
            if u {
                stack.push((pos, here));
                here += i64::from(rng.gen_range(-1i8..=1));
            } else {
                let (p, parent) = stack.pop().expect("balanced tree word");
                partner[p] = pos;
                partner[pos] = p;
                here = parent;
            }
        }
        if core_sides > 0 {
            core_pos[c] = labels.len();
            labels.push(base);
        }
    }
    for c in 0..core_sides {
        partner[core_pos[c]] = core_pos[core.partner[c]];
        twisted[core_pos[c]] = core.twisted[c];
    }
    UnicellularMap::from_faced(FacedMap::new(vec![total], partner, twisted, Some(labels))?)
}

#[derive(Debug, Clone)]
enum EngineKind {
    Exact(Box<Engine<BigUint>>),
    Float(Box<Engine<f64>>),
}

/// Uniform sampler of labeled one-face maps with `n` edges on a surface.
#[derive(Debug, Clone)]
pub struct LabeledSampler {
    pub surface: SurfaceType,
    pub n: usize,
    engine: EngineKind,
}

impl LabeledSampler {
    pub fn new(surface: SurfaceType, n: usize, mode: SampleMode) -> Result<Self> {
        if n == 0 {
            return Err(MapError::SizeTooLarge(0));
        }
        if n < surface.h2 as usize {
            return Err(MapError::InsufficientData(format!("no one-face map with {n} edges on {surface}")));
        }
        let exact = match mode {
            SampleMode::Exact => true,
            SampleMode::Float => false,
            SampleMode::Auto => n <= EXACT_LIMIT,
        };
        let engine = if exact {
            EngineKind::Exact(Box::new(Engine::new(surface, n)?))
        } else {
            EngineKind::Float(Box::new(Engine::new(surface, n)?))
        };
        Ok(LabeledSampler { surface, n, engine })
    }

    pub fn mode(&self) -> SampleMode {
        match self.engine {
            EngineKind::Exact(_) => SampleMode::Exact,
            EngineKind::Float(_) => SampleMode::Float,
        }
    }

    /// A labeled map with root label 1.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<UnicellularMap> {
        match &self.engine {
            EngineKind::Exact(e) => e.sample(rng),
            EngineKind::Float(e) => e.sample(rng),
        }
    }
}

/// `cfg.replicates` independent samples, replicate `r` drawn from [`replicate_rng`].
pub fn sample_labeled_unicellular(cfg: &SampleConfig) -> Result<Vec<UnicellularMap>> {
    if cfg.replicates == 0 {
        return Err(MapError::InsufficientData("at least one replicate".into()));
    }
    let sampler = LabeledSampler::new(cfg.surface, cfg.n, SampleMode::Auto)?;
    (0..cfg.replicates as u64).into_par_iter().map(|r| sampler.sample(&mut replicate_rng(cfg.seed, r))).collect()
}

/// Distances from the pointed vertex, read off the labels.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRecord {
    pub radius: i64,
    /// `profile[i]` vertices at distance `i`; `profile[0] = 1` is the pointed vertex.
    pub profile: Vec<usize>,
    /// `radius / (8n/9)^(1/4)`.
    pub normalized_radius: f64,
}

pub fn stats(u: &UnicellularMap) -> Result<StatsRecord> {
    let labels = u.vertex_labels().ok_or(MapError::NotLabeled)?;
    let min = *labels.iter().min().unwrap();
    let max = *labels.iter().max().unwrap();
    let radius = max - min + 1;
    let mut profile = vec![0usize; radius as usize + 1];
    profile[0] = 1;
    for l in labels {
        profile[(l - min + 1) as usize] += 1;
    }
    let n = u.n() as f64;
    Ok(StatsRecord { radius, profile, normalized_radius: radius as f64 / (8.0 * n / 9.0).powf(0.25) })
}

/// One row per replicate of a scaling experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub surface: SurfaceType,
    pub n: usize,
    pub seed: u64,
    pub replicate: usize,
    pub stats: StatsRecord,
    pub mode: SampleMode,
}

pub const SCALING_CSV_HEADER: &str = "surface,h,n,seed,replicate,radius,norm_radius,profile_json,mode";

impl ScalingRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6},\"{}\",{}",
            self.surface,
            self.surface.h(),
            self.n,
            self.seed,
            self.replicate,
            self.stats.radius,
            self.stats.normalized_radius,
            serde_json::to_string(&self.stats.profile).expect("integers serialize"),
            self.mode
        )
    }
}

/// Replicates for every size; replicate `r` at size index `i` uses stream `i * 2^32 + r`.
pub fn experiment_scaling(surface: SurfaceType, sizes: &[usize], replicates: usize, seed: u64) -> Result<Vec<ScalingRow>> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MapError::InsufficientData("sizes must be strictly ascending".into()));
    }
    let mut rows = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let sampler = LabeledSampler::new(surface, n, SampleMode::Auto)?;
        let batch: Result<Vec<ScalingRow>> = (0..replicates)
            .into_par_iter()
            .map(|r| {
                let mut rng = replicate_rng(seed, ((i as u64) << 32) + r as u64);
                let u = sampler.sample(&mut rng)?;
                Ok(ScalingRow { surface, n, seed, replicate: r, stats: stats(&u)?, mode: sampler.mode() })
            })
            .collect();
        rows.extend(batch?);
    }
    Ok(rows)
}

/// Median and interquartile range of the normalized radius at one size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSummary {
    pub n: usize,
    pub median: f64,
    pub iqr: f64,
}

pub fn scaling_summary(rows: &[ScalingRow]) -> Vec<ScalingSummary> {
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in rows {
        by_n.entry(r.n).or_default().push(r.stats.normalized_radius);
    }
    by_n.into_iter()
        .map(|(n, mut v)| {
            v.sort_by(f64::total_cmp);
            ScalingSummary { n, median: quantile(&v, 0.5), iqr: quantile(&v, 0.75) - quantile(&v, 0.25) }
        })
        .collect()
}

/// Linear interpolation between order statistics of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let x = p * (sorted.len() - 1) as f64;
    let (lo, hi) = (x.floor() as usize, x.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (x - lo as f64)
}

/// A uniform rooted quadrangulation with its well-labeled map and the number
/// of labeled maps drawn to get it.
#[derive(Debug, Clone)]
pub struct SampledQuadrangulation {
    pub q: EmbeddedMap,
    pub map: UnicellularMap,
    pub attempts: u64,
}

/// Uniform well-labeled map with `n` edges, by rejection from labeled maps.
pub fn sample_well_labeled<R: Rng>(sampler: &LabeledSampler, budget: u64, rng: &mut R) -> Result<(UnicellularMap, u64)> {
    for attempt in 1..=budget {
        let u = sampler.sample(rng)?;
        let min = *u.labels().expect("labeled").iter().min().unwrap();
        // after shifting the minimum to 1, the root must still carry label 1
        if min == 1 {
            return Ok((u, attempt));
        }
    }
    Err(MapError::RejectionBudgetExceeded(budget))
}

pub fn sample_quadrangulation(surface: SurfaceType, n: usize, seed: u64, budget: u64) -> Result<SampledQuadrangulation> {
    let sampler = LabeledSampler::new(surface, n, SampleMode::Auto)?;
    let mut rng = replicate_rng(seed, 0);
    let (map, attempts) = sample_well_labeled(&sampler, budget, &mut rng)?;
    let q = lambda_full(&map, LambdaOptions::default())?.q;
    Ok(SampledQuadrangulation { q, map, attempts })
}

/// Fraction of labeled maps that are well-labeled, estimated from `draws` samples.
pub fn acceptance_rate(surface: SurfaceType, n: usize, draws: u64, seed: u64) -> Result<f64> {
    let sampler = LabeledSampler::new(surface, n, SampleMode::Auto)?;
    let mut rng = replicate_rng(seed, 0);
    let mut hits = 0u64;
    for _ in 0..draws {
        let u = sampler.sample(&mut rng)?;
        if u.labels().unwrap().iter().all(|&l| l >= 1) {
            hits += 1;
        }
    }
    Ok(hits as f64 / draws as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::bfs_distances;

    /// The same statistics computed on the quadrangulation itself.
    fn stats_by_bfs(u: &UnicellularMap) -> StatsRecord {
        let min = *u.labels().unwrap().iter().min().unwrap();
        let w = u.shifted(1 - min);
        let c = w.labels().unwrap().iter().position(|&l| l == 1).unwrap();
        let w = w.rerooted(c, true).unwrap();
        let out = lambda_full(&w, LambdaOptions::default()).unwrap();
        let d = bfs_distances(&out.q, out.centers[0]);
        let radius = *d.iter().max().unwrap() as usize;
        let mut profile = vec![0usize; radius + 1];
        for x in d {
            profile[x as usize] += 1;
        }
        let n = u.n() as f64;
        StatsRecord { radius: radius as i64, profile, normalized_radius: radius as f64 / (8.0 * n / 9.0).powf(0.25) }
    }

    #[test]
    fn label_statistics_match_graph_distances() {
        for s in [SurfaceType::SPHERE, SurfaceType::KLEIN_BOTTLE] {
            let sampler = LabeledSampler::new(s, 30, SampleMode::Auto).unwrap();
            for r in 0..50 {
                let u = sampler.sample(&mut replicate_rng(7, r)).unwrap();
                assert_eq!(stats(&u).unwrap(), stats_by_bfs(&u));
            }
        }
    }

    #[test]
    fn samples_are_well_formed() {
        for s in [SurfaceType::SPHERE, SurfaceType::PROJECTIVE_PLANE, SurfaceType::TORUS, SurfaceType::KLEIN_BOTTLE] {
            for mode in [SampleMode::Exact, SampleMode::Float] {
                let sampler = LabeledSampler::new(s, 12, mode).unwrap();
                assert_eq!(sampler.mode(), mode);
                for r in 0..20 {
                    let u = sampler.sample(&mut replicate_rng(3, r)).unwrap();
                    assert_eq!(u.n(), 12);
                    assert_eq!(u.surface_type(), s);
                    assert_eq!(u.labels().unwrap()[0], 1);
                    u.check_labeled().unwrap();
                }
            }
        }
    }

    #[test]
    fn replicates_are_deterministic() {
        let cfg = SampleConfig { surface: SurfaceType::TORUS, n: 20, seed: 11, replicates: 8 };
        let a = sample_labeled_unicellular(&cfg).unwrap();
        assert_eq!(a, sample_labeled_unicellular(&cfg).unwrap());
        let other = sample_labeled_unicellular(&SampleConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn auto_mode_switches_at_the_limit() {
        let s = SurfaceType::SPHERE;
        assert_eq!(LabeledSampler::new(s, EXACT_LIMIT, SampleMode::Auto).unwrap().mode(), SampleMode::Exact);
        assert_eq!(LabeledSampler::new(s, EXACT_LIMIT + 1, SampleMode::Auto).unwrap().mode(), SampleMode::Float);
    }

    #[test]
    fn sampled_quadrangulations_are_valid() {
        let s = SurfaceType::PROJECTIVE_PLANE;
        let out = sample_quadrangulation(s, 15, 5, 1_000_000).unwrap();
        assert!(out.q.is_quadrangulation());
        assert_eq!(out.q.euler_type(), s);
        assert_eq!(out.q.face_count(), 15);
        out.map.check_well_labeled().unwrap();
        assert!(out.attempts >= 1);
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(LabeledSampler::new(SurfaceType::SPHERE, 0, SampleMode::Auto).is_err());
        // a one-face map on the Klein bottle needs at least 2 edges
        assert!(matches!(
            LabeledSampler::new(SurfaceType::KLEIN_BOTTLE, 1, SampleMode::Auto),
            Err(MapError::InsufficientData(_))
        ));
        let cfg = SampleConfig { surface: SurfaceType::SPHERE, n: 3, seed: 0, replicates: 0 };
        assert!(sample_labeled_unicellular(&cfg).is_err());
        assert!(matches!(
            sample_quadrangulation(SurfaceType::SPHERE, 40, 1, 0),
            Err(MapError::RejectionBudgetExceeded(0))
        ));
    }
}
