//! Standard-position fronts in the `(q, z)` annulus.
//!
//! Strand 0 of an unswapped expression is the constant graph `z = 0`. The
//! other strand is laid out along its traversal: a cyclic word of features
//! (oscillations across `z = 0`, the top pair) and cusps. Sheets between
//! cusps always run from a left cusp to a right cusp and rise monotonically
//! outside their features.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::notation::{LinkExpr, LinkVector};

pub const TAU_GEOM: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontError {
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("inconsistent branch indices: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Knot {
    pub q: f64,
    pub z: f64,
    pub slope: f64,
}

impl Knot {
    pub fn new(q: f64, z: f64, slope: f64) -> Self {
        Knot { q, z, slope }
    }
}

/// Cubic Hermite interpolation on `[a.q, b.q]`, returning `(z, slope)`.
pub fn hermite(a: &Knot, b: &Knot, q: f64) -> (f64, f64) {
    let h = b.q - a.q;
    let t = (q - a.q) / h;
    let (t2, t3) = (t * t, t * t * t);
    let z = (2.0 * t3 - 3.0 * t2 + 1.0) * a.z
        + (t3 - 2.0 * t2 + t) * h * a.slope
        + (-2.0 * t3 + 3.0 * t2) * b.z
        + (t3 - t2) * h * b.slope;
    let dz = ((6.0 * t2 - 6.0 * t) * a.z
        + (3.0 * t2 - 4.0 * t + 1.0) * h * a.slope
        + (-6.0 * t2 + 6.0 * t) * b.z
        + (3.0 * t2 - 2.0 * t) * h * b.slope)
        / h;
    (z, dz)
}

fn eval_knots(knots: &[Knot], q: f64) -> (f64, f64) {
    let i = knots.partition_point(|k| k.q <= q).clamp(1, knots.len() - 1);
    hermite(&knots[i - 1], &knots[i], q)
}

/// One branch chart: a single-valued Hermite graph over `[q_lo, q_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Arc {
    pub id: usize,
    pub strand: u8,
    pub knots: Vec<Knot>,
}

impl Arc {
    pub fn q_lo(&self) -> f64 {
        self.knots[0].q
    }

    pub fn q_hi(&self) -> f64 {
        self.knots[self.knots.len() - 1].q
    }

    /// `(z, slope)` at `q`, extrapolating the end pieces outside the interval.
    pub fn eval(&self, q: f64) -> (f64, f64) {
        eval_knots(&self.knots, q)
    }

    pub fn start(&self) -> Knot {
        self.knots[0]
    }

    pub fn end(&self) -> Knot {
        self.knots[self.knots.len() - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CuspKind {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cusp {
    pub q: f64,
    pub z: f64,
    pub slope: f64,
    pub kind: CuspKind,
    pub joins: [usize; 2],
    /// The locally upper arc, one of `joins`.
    pub upper: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Horizontal,
    Vertical,
    Closing,
    TopPair,
}

/// `q_lo` lies in `[0, 1)`; `q_hi` can exceed 1 when the block wraps the seam.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub component: usize,
    pub kind: BlockKind,
    pub index: usize,
    pub q_lo: f64,
    pub q_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontDiagram {
    pub arcs: Vec<Arc>,
    pub cusps: Vec<Cusp>,
    /// Index-0 reference arc of strand 0 and strand 1.
    pub basepoints: [usize; 2],
    pub blocks: Vec<Block>,
}

/// A branch of a strand over a given `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    pub arc: usize,
    pub z: f64,
    pub slope: f64,
}

impl FrontDiagram {
    /// Assembles a diagram from explicit pieces, checking the cusp and circuit invariants.
    pub fn from_parts(
        arcs: Vec<Arc>,
        cusps: Vec<Cusp>,
        basepoints: [usize; 2],
        blocks: Vec<Block>,
    ) -> Result<Self, FrontError> {
        let d = FrontDiagram { arcs, cusps, basepoints, blocks };
        d.validate()?;
        Ok(d)
    }

    pub fn strand_arcs(&self, strand: u8) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(move |a| a.strand == strand)
    }

    pub fn cusp_count(&self, strand: u8) -> usize {
        self.cusps.iter().filter(|c| self.arcs[c.joins[0]].strand == strand).count()
    }

    /// Structural checks: ids, single-valued arcs, cusp matching and closed circuits.
    pub fn validate(&self) -> Result<(), FrontError> {
        let geo = |m: String| Err(FrontError::Geometry(m));
        for (i, a) in self.arcs.iter().enumerate() {
            if a.id != i {
                return geo(format!("arc {i} carries id {}", a.id));
            }
            if a.knots.len() < 2 || a.knots.windows(2).any(|w| w[1].q <= w[0].q) {
                return geo(format!("arc {i} is not a graph over an interval"));
            }
            if a.q_lo() < -TAU_GEOM || a.q_hi() > 1.0 + TAU_GEOM {
                return geo(format!("arc {i} leaves [0, 1]"));
            }
            if a.knots.iter().any(|k| !k.z.is_finite() || !k.slope.is_finite()) {
                return geo(format!("arc {i} has a non-finite knot"));
            }
        }
        // Every arc end must be met by exactly one cusp or continuation.
        let n = self.arcs.len();
        let mut ends = vec![0u32; n];
        let mut starts = vec![0u32; n];
        for c in &self.cusps {
            let [a, b] = c.joins;
            if a >= n || b >= n || a == b || self.arcs[a].strand != self.arcs[b].strand {
                return geo(format!("cusp at q = {} joins invalid arcs", c.q));
            }
            if c.upper != a && c.upper != b {
                return geo(format!("cusp at q = {} records a foreign upper arc", c.q));
            }
            for &x in &c.joins {
                let k = match c.kind {
                    CuspKind::Left => self.arcs[x].start(),
                    CuspKind::Right => self.arcs[x].end(),
                };
                if (k.q - c.q).abs() > TAU_GEOM || (k.z - c.z).abs() > TAU_GEOM || (k.slope - c.slope).abs() > TAU_GEOM {
                    return geo(format!("arc {x} does not reach the cusp at q = {}", c.q));
                }
                match c.kind {
                    CuspKind::Left => starts[x] += 1,
                    CuspKind::Right => ends[x] += 1,
                }
            }
        }
        for (a, b) in self.continuations() {
            ends[a] += 1;
            starts[b] += 1;
        }
        for i in 0..n {
            if ends[i] != 1 || starts[i] != 1 {
                return geo(format!("arc {i} is not closed up ({} ends, {} starts)", ends[i], starts[i]));
            }
        }
        for s in 0..2u8 {
            let b = self.basepoints[s as usize];
            if b >= n || self.arcs[b].strand != s {
                return geo(format!("basepoint of strand {s} is not on that strand"));
            }
            let lefts = self.cusps.iter().filter(|c| self.arcs[c.joins[0]].strand == s && c.kind == CuspKind::Left).count();
            if 2 * lefts != self.cusp_count(s) {
                return geo(format!("strand {s} has unbalanced cusps"));
            }
        }
        Ok(())
    }

    /// Pairs `(a, b)` where arc `a` continues smoothly into arc `b`, possibly across the seam.
    pub fn continuations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in &self.arcs {
            let e = a.end();
            for b in &self.arcs {
                if a.strand != b.strand {
                    continue;
                }
                let s = b.start();
                if a.id == b.id && !(e.q >= 1.0 - TAU_GEOM && s.q <= TAU_GEOM) {
                    continue;
                }
                let dq = (s.q - e.q).rem_euclid(1.0);
                let same_q = !(TAU_GEOM..=1.0 - TAU_GEOM).contains(&dq);
                if same_q && (s.z - e.z).abs() < TAU_GEOM && (s.slope - e.slope).abs() < TAU_GEOM {
                    out.push((a.id, b.id));
                }
            }
        }
        out
    }

    /// All branches of `strand` over `q ∈ [0, 1)`, highest first.
    pub fn eval_strand(&self, strand: u8, q: f64) -> Vec<BranchPoint> {
        let mut out: Vec<BranchPoint> = self
            .strand_arcs(strand)
            .filter(|a| a.q_lo() <= q && q < a.q_hi())
            .map(|a| {
                let (z, slope) = a.eval(q);
                BranchPoint { arc: a.id, z, slope }
            })
            .collect();
        out.sort_by(|x, y| y.z.total_cmp(&x.z).then(x.arc.cmp(&y.arc)));
        out
    }

    /// Branch index of every arc of `strand`, keyed by arc id; other arcs map to `None`.
    pub fn branch_indices(&self, strand: u8) -> Result<Vec<Option<i64>>, FrontError> {
        let n = self.arcs.len();
        let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
        for c in &self.cusps {
            if self.arcs[c.joins[0]].strand != strand {
                continue;
            }
            let lower = if c.upper == c.joins[0] { c.joins[1] } else { c.joins[0] };
            adj[lower].push((c.upper, 1));
            adj[c.upper].push((lower, -1));
        }
        for (a, b) in self.continuations() {
            if self.arcs[a].strand == strand {
                adj[a].push((b, 0));
                adj[b].push((a, 0));
            }
        }
        let mut idx = vec![None; n];
        let base = self.basepoints[strand as usize];
        idx[base] = Some(0);
        let mut queue = VecDeque::from([base]);
        while let Some(a) = queue.pop_front() {
            let ia = idx[a].unwrap();
            for &(b, step) in &adj[a] {
                match idx[b] {
                    None => {
                        idx[b] = Some(ia + step);
                        queue.push_back(b);
                    }
                    Some(ib) if ib != ia + step => {
                        return Err(FrontError::Inconsistent(format!(
                            "arc {b} reached with index {} and {ib}",
                            ia + step
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        for a in self.strand_arcs(strand) {
            if idx[a.id].is_none() {
                return Err(FrontError::Inconsistent(format!("arc {} is not connected to the basepoint", a.id)));
            }
        }
        Ok(idx)
    }

    /// Splits arc `id` at an interior point; the new piece is appended with a fresh id.
    pub fn split_arc(&self, id: usize, q: f64) -> FrontDiagram {
        let mut d = self.clone();
        let a = &d.arcs[id];
        assert!(a.q_lo() < q && q < a.q_hi());
        let (z, slope) = a.eval(q);
        let mid = Knot::new(q, z, slope);
        let left: Vec<Knot> = a.knots.iter().copied().filter(|k| k.q < q).chain([mid]).collect();
        let right: Vec<Knot> = [mid].into_iter().chain(a.knots.iter().copied().filter(|k| k.q > q)).collect();
        let new_id = d.arcs.len();
        let strand = a.strand;
        d.arcs[id].knots = left;
        d.arcs.push(Arc { id: new_id, strand, knots: right });
        for c in &mut d.cusps {
            if c.kind == CuspKind::Right {
                for j in c.joins.iter_mut() {
                    if *j == id {
                        *j = new_id;
                    }
                }
                if c.upper == id {
                    c.upper = new_id;
                }
            }
        }
        d
    }

    /// The image under `z ↦ -z`.
    pub fn negate_z(&self) -> FrontDiagram {
        let mut d = self.clone();
        for a in &mut d.arcs {
            for k in &mut a.knots {
                k.z = -k.z;
                k.slope = -k.slope;
            }
        }
        for c in &mut d.cusps {
            c.z = -c.z;
            c.slope = -c.slope;
            c.upper = if c.upper == c.joins[0] { c.joins[1] } else { c.joins[0] };
        }
        d
    }

    /// The image under `q ↦ 1 - q`.
    pub fn reverse_q(&self) -> FrontDiagram {
        let mut d = self.clone();
        for a in &mut d.arcs {
            a.knots = a.knots.iter().rev().map(|k| Knot::new(1.0 - k.q, k.z, -k.slope)).collect();
        }
        for c in &mut d.cusps {
            c.q = 1.0 - c.q;
            c.slope = -c.slope;
            c.kind = match c.kind {
                CuspKind::Left => CuspKind::Right,
                CuspKind::Right => CuspKind::Left,
            };
        }
        for b in &mut d.blocks {
            let w = b.q_hi - b.q_lo;
            b.q_lo = (1.0 - b.q_hi).rem_euclid(1.0);
            b.q_hi = b.q_lo + w;
        }
        d
    }

    /// Points where strand 1 crosses strand 0, sorted by `q`.
    pub fn strand_crossings(&self, samples_per_unit: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for a in self.strand_arcs(1) {
            for b in self.strand_arcs(0) {
                let lo = a.q_lo().max(b.q_lo());
                let hi = a.q_hi().min(b.q_hi());
                if hi <= lo {
                    continue;
                }
                let diff = |q: f64| a.eval(q).0 - b.eval(q).0;
                let steps = (((hi - lo) * samples_per_unit as f64).ceil() as usize).max(2);
                for s in 0..steps {
                    let (mut l, mut r) = (lo + (hi - lo) * s as f64 / steps as f64, lo + (hi - lo) * (s + 1) as f64 / steps as f64);
                    if diff(l) * diff(r) >= 0.0 {
                        continue;
                    }
                    for _ in 0..60 {
                        let m = 0.5 * (l + r);
                        if diff(l) * diff(m) <= 0.0 {
                            r = m;
                        } else {
                            l = m;
                        }
                    }
                    let q = 0.5 * (l + r);
                    out.push((q, b.eval(q).0));
                }
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }

    /// Checks that every crossing between two arcs is transversal.
    pub fn check_transversality(&self, samples_per_unit: usize) -> Result<(), FrontError> {
        for (i, a) in self.arcs.iter().enumerate() {
            for b in &self.arcs[i + 1..] {
                let lo = a.q_lo().max(b.q_lo());
                let hi = a.q_hi().min(b.q_hi());
                if hi - lo <= TAU_GEOM {
                    continue;
                }
                let steps = (((hi - lo) * samples_per_unit as f64).ceil() as usize).max(2);
                let diff = |q: f64| a.eval(q).0 - b.eval(q).0;
                let mut q0 = lo;
                let mut f0 = diff(q0);
                for s in 1..=steps {
                    let q1 = lo + (hi - lo) * s as f64 / steps as f64;
                    let f1 = diff(q1);
                    if f0 * f1 <= 0.0 && !(f0 == 0.0 && s == 1 && q0 == lo) {
                        let (mut l, mut r) = (q0, q1);
                        for _ in 0..60 {
                            let m = 0.5 * (l + r);
                            if diff(l) * diff(m) <= 0.0 {
                                r = m;
                            } else {
                                l = m;
                            }
                        }
                        let m = 0.5 * (l + r);
                        let ds = (a.eval(m).1 - b.eval(m).1).abs();
                        let at_end = |x: &Arc| (m - x.q_lo()).abs() < 1e-7 || (m - x.q_hi()).abs() < 1e-7;
                        if ds < 1e-6 && !(at_end(a) && at_end(b)) {
                            return Err(FrontError::Geometry(format!(
                                "arcs {} and {} are tangent at q = {m}",
                                a.id, b.id
                            )));
                        }
                    }
                    q0 = q1;
                    f0 = f1;
                }
            }
        }
        Ok(())
    }
}

// ---- construction ----

const TOP_LOW: f64 = 1.5;
const TOP_HIGH: f64 = 2.0;
const TOP_EXIT: f64 = 1.75;
const NEAR_HI: f64 = 1.4;
const NEAR_LO: f64 = 0.7;
const NEAR_R: f64 = 0.05;
const BODY_MIN: f64 = 0.5;
const BODY_MAX: f64 = 2.0;
const DRIFT: f64 = 0.5;

#[derive(Debug, Clone, Copy)]
enum Item {
    Osc { comp: usize, block: usize, h: u32, split: u32, amp: f64 },
    Top,
    Cusp { up: bool, moved: bool, comp: usize, kind: BlockKind, block: usize },
}

fn component_word(comp: usize, v: &LinkVector, rank0: usize) -> Vec<Item> {
    let n = v.n();
    let osc = |i: usize| Item::Osc {
        comp,
        block: i,
        h: v.h()[i - 1],
        split: v.p()[i - 1],
        amp: 0.5f64.powi((rank0 + i - 1) as i32),
    };
    let mut t = vec![osc(n)];
    for k in (1..n).rev() {
        for j in 0..v.v()[k - 1] {
            t.push(Item::Cusp { up: true, moved: j < v.q()[k - 1], comp, kind: BlockKind::Vertical, block: k });
        }
        if v.p()[k - 1] % 2 == 1 {
            for it in &mut t {
                if let Item::Cusp { up, .. } = it {
                    *up = !*up;
                }
            }
        }
        t.push(osc(k));
    }
    let h1 = t.pop().unwrap();
    let closing = t.iter().rev().filter_map(|it| match *it {
        Item::Cusp { up, .. } => Some(Item::Cusp { up: !up, moved: false, comp, kind: BlockKind::Closing, block: 0 }),
        _ => None,
    });
    let mut word = vec![h1];
    word.extend(closing.collect::<Vec<_>>());
    word.extend(t);
    word
}

/// A sheet in progress: local abscissa `x` from its left end.
#[derive(Debug, Clone, Default)]
struct Sheet {
    items: Vec<Item>,
    dir: f64,
    left_cusp: Option<usize>,
    right_cusp: Option<usize>,
    knots: Vec<Knot>,
    left: f64,
    len: f64,
    body_start: (f64, f64, f64),
    spans: Vec<(usize, BlockKind, usize, f64, f64)>,
}

fn lowest_amp(items: &[Item]) -> f64 {
    items
        .iter()
        .filter_map(|it| match *it {
            Item::Osc { h, amp, .. } if h > 0 => Some(amp),
            _ => None,
        })
        .fold(1.0, f64::min)
}

/// Appends the feature knots; the cursor is the last knot.
fn place_features(sheet: &mut Sheet, low: f64) {
    let items: Vec<Item> = if sheet.dir < 0.0 { sheet.items.iter().rev().copied().collect() } else { sheet.items.clone() };
    for it in items {
        let Knot { q: x, z, slope: s } = *sheet.knots.last().unwrap();
        match it {
            Item::Osc { comp, block, h, split, amp: m } => {
                if h == 0 {
                    sheet.spans.push((comp, BlockKind::Horizontal, block, x, x));
                    continue;
                }
                let k = 8.0 * m;
                let gap = |c: u32| split > 0 && split < 2 * h && (c == split || c == split + 1);
                let mut cx = x + 2.0 * (m - z) / s;
                sheet.knots.push(Knot::new(cx, m, 0.0));
                for c in 1..=2 * h {
                    let kk = if gap(c) { k / 3.0 } else { k };
                    let down = c % 2 == 1;
                    cx += 2.0 * m / kk;
                    sheet.knots.push(Knot::new(cx, 0.0, if down { -kk } else { kk }));
                    if c < 2 * h {
                        cx += 2.0 * m / kk;
                        sheet.knots.push(Knot::new(cx, if down { -m } else { m }, 0.0));
                    } else {
                        cx += 2.0 * low / (kk + 1.0);
                        sheet.knots.push(Knot::new(cx, low, 1.0));
                    }
                }
                sheet.spans.push((comp, BlockKind::Horizontal, block, x, cx));
            }
            Item::Top => {
                let kt = 4.0 * (TOP_HIGH - TOP_LOW);
                let mut cx = x + 2.0 * (TOP_HIGH - z) / s;
                sheet.knots.push(Knot::new(cx, TOP_HIGH, 0.0));
                cx += (TOP_HIGH - TOP_LOW) / kt;
                sheet.knots.push(Knot::new(cx, 0.5 * (TOP_HIGH + TOP_LOW), -kt));
                cx += (TOP_HIGH - TOP_LOW) / kt;
                sheet.knots.push(Knot::new(cx, TOP_LOW, 0.0));
                cx += 2.0 * (TOP_EXIT - TOP_LOW);
                sheet.knots.push(Knot::new(cx, TOP_EXIT, 1.0));
                sheet.spans.push((0, BlockKind::TopPair, 0, x, cx));
            }
            Item::Cusp { .. } => unreachable!("cusps separate sheets"),
        }
    }
}

pub fn build_front(e: &LinkExpr) -> Result<FrontDiagram, FrontError> {
    let mut word = Vec::new();
    let mut rank = 0;
    for (c, v) in e.components.iter().enumerate() {
        word.extend(component_word(c, v, rank));
        rank += v.n();
    }
    if e.components.iter().all(|v| v.h()[0] == 0) {
        word.insert(1, Item::Top);
    }
    let cusp_pos: Vec<usize> = word.iter().enumerate().filter(|(_, it)| matches!(it, Item::Cusp { .. })).map(|(i, _)| i).collect();
    let m = cusp_pos.len();

    let mut sheets: Vec<Sheet> = Vec::new();
    if m == 0 {
        sheets.push(Sheet { items: word.clone(), dir: 1.0, ..Default::default() });
    } else {
        let mut first: Vec<Item> = word[cusp_pos[m - 1] + 1..].to_vec();
        first.extend_from_slice(&word[..cusp_pos[0]]);
        sheets.push(Sheet { items: first, ..Default::default() });
        for j in 1..m {
            sheets.push(Sheet { items: word[cusp_pos[j - 1] + 1..cusp_pos[j]].to_vec(), ..Default::default() });
        }
        for (j, s) in sheets.iter_mut().enumerate() {
            s.dir = if j % 2 == 0 { 1.0 } else { -1.0 };
            let (before, after) = ((j + m - 1) % m, j);
            // Sheet j is entered at cusp j-1 and left at cusp j.
            if s.dir > 0.0 {
                s.left_cusp = Some(before);
                s.right_cusp = Some(after);
            } else {
                s.right_cusp = Some(before);
                s.left_cusp = Some(after);
            }
        }
    }
    // upper sheet of every cusp
    let cusp_items: Vec<Item> = cusp_pos.iter().map(|&i| word[i]).collect();
    let upper_sheet: Vec<usize> = cusp_items
        .iter()
        .enumerate()
        .map(|(j, it)| match *it {
            Item::Cusp { up: true, .. } => (j + 1) % m,
            _ => j,
        })
        .collect();
    let moved_after: Vec<bool> = (0..m)
        .map(|j| matches!(cusp_items[(j + m - 1) % m], Item::Cusp { moved: true, .. }))
        .collect();

    let lows: Vec<f64> = sheets.iter().map(|s| 0.25 * lowest_amp(&s.items)).collect();
    let cusp_low: Vec<f64> = (0..m).map(|j| lows[j].min(lows[(j + 1) % m])).collect();

    // Feature knots, left ends first.
    for (j, s) in sheets.iter_mut().enumerate() {
        match s.left_cusp {
            None => {
                let z = if s.items.iter().any(|it| matches!(it, Item::Top)) { TOP_EXIT } else { lows[j] };
                s.knots.push(Knot::new(0.0, z, 1.0));
            }
            Some(c) => {
                let zl = cusp_low[c];
                let wn = zl / 4.0;
                let sigma = if upper_sheet[c] == j { NEAR_HI } else { NEAR_LO };
                s.knots.push(Knot::new(0.0, zl, 1.0));
                s.knots.push(Knot::new(wn, zl + wn * (1.0 + sigma) / 2.0, sigma));
            }
        }
        place_features(s, lows[j]);
        let last = *s.knots.last().unwrap();
        s.body_start = (last.q, last.z, last.slope);
    }

    let scale;
    if m == 0 {
        let s = &mut sheets[0];
        let end = *s.knots.last().unwrap();
        let start = s.knots[0];
        if (end.z - start.z).abs() > 1e-12 || (end.slope - start.slope).abs() > 1e-12 {
            return Err(FrontError::Geometry("periodic sheet does not close".into()));
        }
        s.len = end.q;
        s.left = 0.0;
        scale = 1.0 / s.len;
    } else {
        let feat: f64 = sheets.iter().map(|s| s.body_start.0 + NEAR_R).sum();
        let rho: Vec<f64> = (0..m).map(|j| if moved_after[j] { -0.5 } else { 1.0 }).collect();
        let rho_sum: f64 = rho.iter().sum();
        if rho_sum <= 0.0 {
            return Err(FrontError::Geometry("no positive drift".into()));
        }
        let base = f64::max(12.0, 2.0 * (feat + 1.0) / (DRIFT * rho_sum));
        let body: Vec<f64> = sheets.iter().enumerate().map(|(j, s)| base * (1.0 + DRIFT * s.dir * rho[j])).collect();
        // Right cusp heights from the feasible body slopes of both sheets.
        let ramp = |j: usize| (body[j] / 8.0).min(0.5);
        let zr_range = |j: usize, s: &Sheet, b: f64| {
            let (_, z, sl) = s.body_start;
            let sigma = if upper_sheet[s.right_cusp.unwrap()] == j { NEAR_LO } else { NEAR_HI };
            let e = ramp(j);
            z + e * (sl + sigma) / 2.0 + (body[j] - e) * b + NEAR_R * (1.0 + sigma) / 2.0
        };
        let mut zr = vec![f64::NAN; m];
        for c in 0..m {
            let pair: Vec<usize> = (0..m).filter(|&j| sheets[j].right_cusp == Some(c)).collect();
            if pair.is_empty() {
                continue;
            }
            let lo = pair.iter().map(|&j| zr_range(j, &sheets[j], BODY_MIN)).fold(f64::MIN, f64::max);
            let hi = pair.iter().map(|&j| zr_range(j, &sheets[j], BODY_MAX)).fold(f64::MAX, f64::min);
            if pair.len() != 2 || lo > hi {
                return Err(FrontError::Geometry(format!("no common height for right cusp {c}")));
            }
            zr[c] = 0.5 * (lo + hi);
        }
        let ramps: Vec<f64> = (0..m).map(ramp).collect();
        for (j, s) in sheets.iter_mut().enumerate() {
            let c = s.right_cusp.unwrap();
            let sigma = if upper_sheet[c] == j { NEAR_LO } else { NEAR_HI };
            let (x, z, sl) = s.body_start;
            let lb = body[j];
            let z2 = zr[c] - NEAR_R * (1.0 + sigma) / 2.0;
            let e = ramps[j];
            let b = (z2 - z - e * (sl + sigma) / 2.0) / (lb - e);
            let z1 = z + e * (sl + b) / 2.0;
            s.knots.push(Knot::new(x + e, z1, b));
            s.knots.push(Knot::new(x + lb - e, z1 + (lb - 2.0 * e) * b, b));
            s.knots.push(Knot::new(x + lb, z2, sigma));
            s.knots.push(Knot::new(x + lb + NEAR_R, zr[c], 1.0));
            s.len = x + lb + NEAR_R;
        }
        let mut pos = 0.0;
        for s in sheets.iter_mut() {
            if s.dir > 0.0 {
                s.left = pos;
                pos += s.len;
            } else {
                pos -= s.len;
                s.left = pos;
            }
        }
        if pos <= 0.0 {
            return Err(FrontError::Geometry(format!("strand drifts by {pos}")));
        }
        scale = 1.0 / pos;
    }

    // Seam offset keeping every knot away from q = 0.
    let offset = (0..200)
        .map(|t| 0.0173 + 0.00731 * t as f64)
        .find(|o| {
            sheets.iter().all(|s| {
                s.knots.iter().all(|k| {
                    let f = ((s.left + k.q) * scale + o).rem_euclid(1.0);
                    f > 1e-6 && f < 1.0 - 1e-6
                })
            })
        })
        .ok_or_else(|| FrontError::Geometry("no seam offset".into()))?;
    let uni = |s: &Sheet, x: f64| (s.left + x) * scale + offset;

    let (flat, cusped): (u8, u8) = if e.swapped { (1, 0) } else { (0, 1) };
    let mut arcs: Vec<Arc> = Vec::new();
    let flat_arc = Arc { id: 0, strand: flat, knots: vec![Knot::new(0.0, 0.0, 0.0), Knot::new(1.0, 0.0, 0.0)] };
    let mut sheet_arcs: Vec<Vec<usize>> = Vec::new();
    if !e.swapped {
        arcs.push(flat_arc.clone());
    }
    for s in &sheets {
        let knots: Vec<Knot> = s.knots.iter().map(|k| Knot::new(uni(s, k.q), k.z * scale, k.slope)).collect();
        let (q0, q1) = (knots[0].q, knots[knots.len() - 1].q);
        let mut cuts: Vec<f64> = Vec::new();
        let mut t = q0.floor() + 1.0;
        while t < q1 {
            cuts.push(t);
            t += 1.0;
        }
        let mut pieces: Vec<Vec<Knot>> = vec![Vec::new()];
        let mut ci = 0;
        for w in 0..knots.len() {
            let k = knots[w];
            while ci < cuts.len() && cuts[ci] < k.q {
                let (z, sl) = hermite(&knots[w - 1], &k, cuts[ci]);
                pieces.last_mut().unwrap().push(Knot::new(cuts[ci], z, sl));
                pieces.push(vec![Knot::new(cuts[ci], z, sl)]);
                ci += 1;
            }
            pieces.last_mut().unwrap().push(k);
        }
        let mut ids = Vec::new();
        for p in pieces {
            let shift = p[0].q.floor();
            let shift = if p[0].q - shift > 1.0 - 1e-12 { shift + 1.0 } else { shift };
            let id = arcs.len();
            arcs.push(Arc { id, strand: cusped, knots: p.iter().map(|k| Knot::new(k.q - shift, k.z, k.slope)).collect() });
            ids.push(id);
        }
        sheet_arcs.push(ids);
    }
    if e.swapped {
        let id = arcs.len();
        arcs.push(Arc { id, ..flat_arc });
    }
    let flat_id = if e.swapped { arcs.len() - 1 } else { 0 };

    let mut cusps = Vec::new();
    for c in 0..m {
        let js: Vec<usize> = (0..m).filter(|&j| sheets[j].left_cusp == Some(c) || sheets[j].right_cusp == Some(c)).collect();
        let kind = if sheets[js[0]].left_cusp == Some(c) { CuspKind::Left } else { CuspKind::Right };
        let arc_of = |j: usize| match kind {
            CuspKind::Left => sheet_arcs[j][0],
            CuspKind::Right => *sheet_arcs[j].last().unwrap(),
        };
        let (a, b) = (arc_of(js[0]), arc_of(js[1]));
        let k = match kind {
            CuspKind::Left => arcs[a].start(),
            CuspKind::Right => arcs[a].end(),
        };
        // Decide the upper arc from the geometry just inside the cusp.
        let zl = cusp_low[c].min(NEAR_R);
        let probe = 0.25 * zl / 4.0 * scale;
        let qs = match kind {
            CuspKind::Left => k.q + probe,
            CuspKind::Right => k.q - probe,
        };
        let upper = if arcs[a].eval(qs).0 > arcs[b].eval(qs).0 { a } else { b };
        let intended = arc_of(upper_sheet[c]);
        if upper != intended {
            return Err(FrontError::Geometry(format!("cusp {c} has the wrong upper sheet")));
        }
        cusps.push(Cusp { q: k.q, z: k.z, slope: k.slope, kind, joins: [a, b], upper });
    }

    let mut blocks = Vec::new();
    let mut add_block = |comp, kind, index, lo: f64, hi: f64| {
        let q_lo = lo.rem_euclid(1.0);
        blocks.push(Block { component: comp, kind, index, q_lo, q_hi: q_lo + (hi - lo) });
    };
    let mut basepoint = None;
    for (j, s) in sheets.iter().enumerate() {
        for &(comp, kind, index, lo, hi) in &s.spans {
            let (ulo, uhi) = (uni(s, lo), uni(s, hi));
            add_block(comp, kind, index, ulo, uhi);
            if comp == 0 && kind == BlockKind::Horizontal && index == 1 && basepoint.is_none() {
                let mid = if hi > lo { 0.5 * (ulo + uhi) } else { uni(s, 0.5 * s.len) };
                basepoint = Some((j, mid));
            }
        }
    }
    let mut cusp_q: Vec<(usize, BlockKind, usize, f64)> = Vec::new();
    for (c, it) in cusp_items.iter().enumerate() {
        if let Item::Cusp { comp, kind, block, .. } = *it {
            let j = (0..m).find(|&j| sheets[j].right_cusp == Some(c) || sheets[j].left_cusp == Some(c)).unwrap();
            let s = &sheets[j];
            let x = if s.left_cusp == Some(c) { 0.0 } else { s.len };
            cusp_q.push((comp, kind, block, uni(s, x)));
        }
    }
    let mut keys: Vec<(usize, BlockKind, usize)> = cusp_q.iter().map(|&(a, b, c, _)| (a, b, c)).collect();
    keys.dedup();
    for key in keys {
        let qs: Vec<f64> = cusp_q.iter().filter(|&&(a, b, c, _)| (a, b, c) == key).map(|t| t.3).collect();
        let lo = qs.iter().copied().fold(f64::MAX, f64::min);
        let hi = qs.iter().copied().fold(f64::MIN, f64::max);
        add_block(key.0, key.1, key.2, lo, hi);
    }
    let (bj, bq) = basepoint.ok_or_else(|| FrontError::Geometry("no H_1 block".into()))?;
    let bq = bq - bq.floor();
    let base_arc = sheet_arcs[bj]
        .iter()
        .copied()
        .find(|&a| arcs[a].q_lo() <= bq && bq <= arcs[a].q_hi())
        .ok_or_else(|| FrontError::Geometry("basepoint outside its sheet".into()))?;
    let mut basepoints = [0; 2];
    basepoints[flat as usize] = flat_id;
    basepoints[cusped as usize] = base_arc;

    let d = FrontDiagram::from_parts(arcs, cusps, basepoints, blocks)?;
    d.branch_indices(cusped)?;
    Ok(d)
}
