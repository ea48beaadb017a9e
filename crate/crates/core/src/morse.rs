//! Critical points of the difference function `z₁ - z₀` read off a front,
//! and the counting assembly of `Γ⁺`/`Γ⁻` from them.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::front::{build_front, Arc, FrontDiagram, FrontError, TAU_GEOM};
use crate::gamma::GammaPair;
use crate::laurent::LaurentPoly;
use crate::notation::LinkExpr;

pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorseError {
    #[error("tangency at q = {q}: z1 - z0 = {value} vanishes at a critical point")]
    Tangency { q: f64, value: f64 },
    #[error("degenerate critical point near q = {q}")]
    Degenerate { q: f64 },
    #[error("inconclusive: ladder does not match a counting template\n{0}")]
    Inconclusive(ValueLadder),
    #[error("normalization suspect: Γ⁺ = {plus} exceeds λΓ⁻ + (1+λ) with Γ⁻ = {minus}")]
    NormalizationSuspect { minus: LaurentPoly, plus: LaurentPoly },
    #[error(transparent)]
    Front(#[from] FrontError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Samples per unit of `q`.
    pub grid: usize,
    /// Bisection tolerance.
    pub tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { grid: DEFAULT_GRID, tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPair {
    pub q: f64,
    pub arc1: usize,
    pub arc0: usize,
    pub value_sign: Sign,
    pub value: f64,
    /// 0 for a minimum of `z₁ - z₀`, 1 for a maximum.
    pub graph_index: u8,
    pub shifted_index: i64,
}

fn scan_pair(a1: &Arc, a0: &Arc, opts: &OracleOptions, out: &mut Vec<CriticalPair>) -> Result<(), MorseError> {
    let lo = a1.q_lo().max(a0.q_lo());
    let hi = a1.q_hi().min(a0.q_hi());
    if hi - lo <= 0.0 {
        return Ok(());
    }
    let f = |q: f64| a1.eval(q).1 - a0.eval(q).1;
    let g = opts.grid as f64;
    let mut qs = vec![lo];
    let mut j = (lo * g).floor() as i64 + 1;
    while (j as f64) / g < hi {
        qs.push(j as f64 / g);
        j += 1;
    }
    qs.push(hi);
    let fs: Vec<f64> = qs.iter().map(|&q| f(q)).collect();
    let mut roots = Vec::new();
    for i in 0..qs.len() {
        if fs[i] == 0.0 {
            roots.push(qs[i]);
        } else if i + 1 < qs.len() && fs[i] * fs[i + 1] < 0.0 {
            let (mut l, mut r) = (qs[i], qs[i + 1]);
            let fl = fs[i];
            while r - l > opts.tol {
                let m = 0.5 * (l + r);
                let fm = f(m);
                if fm == 0.0 {
                    l = m;
                    r = m;
                } else if (fm < 0.0) == (fl < 0.0) {
                    l = m;
                } else {
                    r = m;
                }
            }
            roots.push(0.5 * (l + r));
        }
    }
    let step = (100.0 * opts.tol).max(1e-8);
    for q in roots {
        let (before, after) = (f(q - step), f(q + step));
        if before * after >= 0.0 {
            return Err(MorseError::Degenerate { q });
        }
        let value = a1.eval(q).0 - a0.eval(q).0;
        if value.abs() < TAU_GEOM {
            return Err(MorseError::Tangency { q, value });
        }
        let graph_index = if before < 0.0 { 0 } else { 1 };
        out.push(CriticalPair {
            q,
            arc1: a1.id,
            arc0: a0.id,
            value_sign: if value > 0.0 { Sign::Plus } else { Sign::Minus },
            value,
            graph_index,
            shifted_index: 0,
        });
    }
    Ok(())
}

/// All critical points of `z₁ - z₀` over pairs of overlapping arcs.
pub fn critical_pairs(d: &FrontDiagram, opts: &OracleOptions) -> Result<Vec<CriticalPair>, MorseError> {
    let mut out = Vec::new();
    for a1 in d.strand_arcs(1) {
        for a0 in d.strand_arcs(0) {
            scan_pair(a1, a0, opts, &mut out)?;
        }
    }
    out.sort_by(|x, y| x.q.total_cmp(&y.q).then(x.arc1.cmp(&y.arc1)).then(x.arc0.cmp(&y.arc0)));
    // A root on a shared arc end is seen from both sides.
    let mut merged: Vec<CriticalPair> = Vec::new();
    for p in out {
        let dup = merged.iter().rev().take_while(|m| p.q - m.q <= 10.0 * opts.tol).any(|m| {
            let (z1, _) = d.arcs[m.arc1].eval(p.q);
            let (z0, _) = d.arcs[m.arc0].eval(p.q);
            ((z1 - z0) - p.value).abs() < 1e3 * TAU_GEOM
        });
        if !dup {
            merged.push(p);
        }
    }
    Ok(merged)
}

/// Fills `shifted_index = i_B(arc1) - i_B(arc0) + graph_index`.
pub fn shifted_indices(d: &FrontDiagram, pairs: &[CriticalPair]) -> Result<Vec<CriticalPair>, FrontError> {
    let i1 = d.branch_indices(1)?;
    let i0 = d.branch_indices(0)?;
    Ok(pairs
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p.shifted_index = i1[p.arc1].unwrap() - i0[p.arc0].unwrap() + p.graph_index as i64;
            p
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub multiplicity: usize,
    pub shifted_index: i64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    /// Band `k` below zero at index `i` is mirrored above zero at `i + 1`.
    Mirror,
    /// Mirror bands plus an extra pair at indices 0 and 1 above every other value.
    TopPair,
    /// The swapped image of `TopPair`: an extra pair below every other value.
    BottomPair,
}

/// Negative bands ascending by value, positive bands descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueLadder {
    pub negative: Vec<Band>,
    pub positive: Vec<Band>,
    /// `None` is the no-match marker.
    pub template: Option<Template>,
}

impl ValueLadder {
    pub fn is_match(&self) -> bool {
        self.template.is_some()
    }
}

impl fmt::Display for ValueLadder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.template {
            Some(t) => writeln!(f, "template: {}", serde_json::to_string(&t).unwrap().trim_matches('"'))?,
            None => writeln!(f, "template: NO_MATCH")?,
        }
        for (name, bands) in [("negative", &self.negative), ("positive", &self.positive)] {
            for b in bands {
                writeln!(f, "{name} band: {} at index {} in [{:.6e}, {:.6e}]", b.multiplicity, b.shifted_index, b.lo, b.hi)?;
            }
        }
        Ok(())
    }
}

fn bands(sorted: &[&CriticalPair]) -> Vec<Band> {
    let mut out: Vec<Band> = Vec::new();
    for p in sorted {
        match out.last_mut() {
            Some(b) if b.shifted_index == p.shifted_index => {
                b.multiplicity += 1;
                b.lo = b.lo.min(p.value);
                b.hi = b.hi.max(p.value);
            }
            _ => out.push(Band { multiplicity: 1, shifted_index: p.shifted_index, lo: p.value, hi: p.value }),
        }
    }
    out
}

fn mirrored(neg: &[Band], pos: &[Band]) -> bool {
    neg.len() == pos.len()
        && neg.iter().zip(pos).all(|(n, p)| n.multiplicity == p.multiplicity && p.shifted_index == n.shifted_index + 1)
}

pub fn build_ladder(pairs: &[CriticalPair]) -> ValueLadder {
    let mut neg: Vec<&CriticalPair> = pairs.iter().filter(|p| p.value < 0.0).collect();
    let mut pos: Vec<&CriticalPair> = pairs.iter().filter(|p| p.value > 0.0).collect();
    neg.sort_by(|a, b| a.value.total_cmp(&b.value));
    pos.sort_by(|a, b| b.value.total_cmp(&a.value));
    let all = ValueLadder { negative: bands(&neg), positive: bands(&pos), template: None };
    if pairs.is_empty() {
        return all;
    }
    if mirrored(&all.negative, &all.positive) {
        return ValueLadder { template: Some(Template::Mirror), ..all };
    }
    let idx = |v: &[&CriticalPair]| v.iter().take(2).map(|p| p.shifted_index).collect::<Vec<_>>();
    if idx(&pos) == [1, 0] && mirrored(&bands(&neg), &bands(&pos[2..])) {
        return ValueLadder { template: Some(Template::TopPair), ..all };
    }
    if idx(&neg) == [0, 1] && mirrored(&bands(&neg[2..]), &bands(&pos)) {
        return ValueLadder { template: Some(Template::BottomPair), ..all };
    }
    all
}

/// Everything the oracle computed for one expression.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub front: FrontDiagram,
    pub pairs: Vec<CriticalPair>,
    pub ladder: ValueLadder,
}

impl OracleRun {
    pub fn gamma(&self) -> Result<GammaPair, MorseError> {
        if !self.ladder.is_match() {
            return Err(MorseError::Inconclusive(self.ladder.clone()));
        }
        let mut minus = LaurentPoly::zero();
        let mut plus = LaurentPoly::zero();
        for p in &self.pairs {
            match p.value_sign {
                Sign::Minus => minus.add_term(p.shifted_index, 1),
                Sign::Plus => plus.add_term(p.shifted_index, 1),
            }
        }
        let bound = minus.shift(1).add(&LaurentPoly::one_plus_lambda());
        if !plus.le_termwise(&bound) {
            return Err(MorseError::NormalizationSuspect { minus, plus });
        }
        Ok(GammaPair { minus, plus })
    }
}

pub fn oracle_run(e: &LinkExpr, opts: &OracleOptions) -> Result<OracleRun, MorseError> {
    let front = build_front(e)?;
    let pairs = critical_pairs(&front, opts)?;
    let pairs = shifted_indices(&front, &pairs)?;
    let ladder = build_ladder(&pairs);
    Ok(OracleRun { front, pairs, ladder })
}

pub fn oracle_gamma(e: &LinkExpr, opts: &OracleOptions) -> Result<GammaPair, MorseError> {
    oracle_run(e, opts)?.gamma()
}

/// CSV with columns `q,value,graph_index,shifted_index,sign`.
pub fn pairs_csv(pairs: &[CriticalPair]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["q", "value", "graph_index", "shifted_index", "sign"]).unwrap();
    for p in pairs {
        w.write_record([
            format!("{:.12}", p.q),
            format!("{:.12e}", p.value),
            p.graph_index.to_string(),
            p.shifted_index.to_string(),
            p.value_sign.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
