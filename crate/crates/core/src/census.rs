//! Enumeration of link vectors, polynomial classes and the counting bounds.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamma::{gamma_expr, orderedness, GammaError, GammaPair, OrderStatus};
use crate::laurent::LaurentPoly;
use crate::notation::{normalize_equivalence, rational_value, LinkExpr, LinkVector};

pub const DSS_MAX: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("d.s.s. check is capped at {DSS_MAX} elements, got {0}")]
    Size(usize),
    #[error("expected a vector without flypes, got {0}")]
    NotStandard(String),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

fn compositions(total: u32, parts: usize, min: u32, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
    if cur.len() == parts {
        if total == 0 {
            out.push(cur.clone());
        }
        return;
    }
    let rest = (parts - cur.len() - 1) as u32 * min;
    let mut x = min;
    while x + rest <= total {
        cur.push(x);
        compositions(total - x, parts, min, out, cur);
        cur.pop();
        x += 1;
    }
}

/// Every flype assignment `p` of `v` with `q = 0`.
pub fn horizontal_flypes(v: &LinkVector) -> Vec<LinkVector> {
    let n = v.n();
    let mut ps: Vec<Vec<u32>> = vec![vec![]];
    for i in 0..n - 1 {
        let top = 2 * v.h()[i];
        ps = ps.into_iter().flat_map(|p| (0..=top).map(move |x| [p.clone(), vec![x]].concat())).collect();
    }
    ps.into_iter()
        .map(|mut p| {
            p.push(0);
            v.with_flypes(p, vec![0; n - 1]).expect("flype counts in range")
        })
        .collect()
}

/// Every vertical flype assignment of `v` with `Σq_i ≤ max_sum`, keeping its `p`.
pub fn vertical_flypes(v: &LinkVector, max_sum: u32) -> Vec<LinkVector> {
    let n = v.n();
    let mut qs: Vec<Vec<u32>> = vec![vec![]];
    for i in 0..n - 1 {
        qs = qs
            .into_iter()
            .flat_map(|q| {
                let used: u32 = q.iter().sum();
                (0..=v.v()[i].min(max_sum - used)).map(move |x| [q.clone(), vec![x]].concat())
            })
            .collect();
    }
    qs.into_iter().map(|q| v.with_flypes(v.p().to_vec(), q).expect("flype counts in range")).collect()
}

/// All valid vectors of weight `≤ max_weight`, ordered by `(n, h_n..h_1, v_{n-1}..v_1, p)`.
pub fn enumerate_vectors(max_weight: u32, with_flypes: bool) -> Vec<LinkVector> {
    let mut out = Vec::new();
    let mut n = 1usize;
    // The lightest vector with n blocks is (2, 1, 2, ..., 1, 0).
    while 2 * (n as u32 - 1) + (n as u32 - 1) <= max_weight {
        let mut batch = Vec::new();
        for w in 0..=max_weight {
            // w splits as Σ2h + Σv.
            for hsum in 0..=w / 2 {
                let vsum = w - 2 * hsum;
                let mut hs = Vec::new();
                if n == 1 {
                    hs.push(vec![hsum]);
                } else {
                    for h1 in 0..=hsum {
                        let mut rest = Vec::new();
                        compositions(hsum - h1, n - 1, 1, &mut rest, &mut Vec::new());
                        hs.extend(rest.into_iter().map(|r| [vec![h1], r].concat()));
                    }
                }
                let mut vs = Vec::new();
                compositions(vsum, n - 1, 1, &mut vs, &mut Vec::new());
                for h in &hs {
                    for v in &vs {
                        batch.push(LinkVector::standard(h.clone(), v.clone()).expect("valid by construction"));
                    }
                }
            }
        }
        let key = |x: &LinkVector| {
            let h: Vec<u32> = x.h().iter().rev().copied().collect();
            let v: Vec<u32> = x.v().iter().rev().copied().collect();
            (h, v)
        };
        batch.sort_by_key(key);
        for v in batch {
            if with_flypes {
                out.extend(horizontal_flypes(&v));
            } else {
                out.push(v);
            }
        }
        n += 1;
    }
    out
}

/// Census rows with the JSON field names `expr, rational, gamma_minus, gamma_plus, ordered, class, orbit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub expr: LinkExpr,
    /// `p/q` per component, joined by `#` for connect sums.
    pub rational: String,
    #[serde(flatten)]
    pub gammas: GammaPair,
    pub ordered: OrderStatus,
    pub class: usize,
    pub orbit: usize,
}

fn rational_text(e: &LinkExpr) -> String {
    e.components.iter().map(|c| rational_value(c).to_string()).collect::<Vec<_>>().join("#")
}

fn orbit_key(e: &LinkExpr) -> Vec<LinkVector> {
    e.components.iter().map(LinkVector::standardized).collect()
}

/// Groups by exact polynomial equality; groups are numbered by first occurrence.
pub fn polynomial_classes(gammas: &[GammaPair]) -> Vec<Vec<usize>> {
    let mut seen: HashMap<&GammaPair, usize> = HashMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, g) in gammas.iter().enumerate() {
        let k = *seen.entry(g).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[k].push(i);
    }
    out
}

pub fn build_census(exprs: &[LinkExpr]) -> Result<Vec<CensusRecord>, CensusError> {
    let rows: Vec<(GammaPair, OrderStatus)> = exprs
        .par_iter()
        .map(|e| Ok((gamma_expr(e)?, orderedness(e)?.status)))
        .collect::<Result<_, GammaError>>()?;
    let gammas: Vec<GammaPair> = rows.iter().map(|r| r.0.clone()).collect();
    let mut class = vec![0; exprs.len()];
    for (k, members) in polynomial_classes(&gammas).iter().enumerate() {
        for &i in members {
            class[i] = k;
        }
    }
    let mut orbits: HashMap<Vec<LinkVector>, usize> = HashMap::new();
    let mut records = Vec::with_capacity(exprs.len());
    for (i, (e, (g, status))) in exprs.iter().zip(rows).enumerate() {
        let next = orbits.len();
        let orbit = *orbits.entry(orbit_key(e)).or_insert(next);
        records.push(CensusRecord {
            expr: e.clone(),
            rational: rational_text(e),
            gammas: g,
            ordered: status,
            class: class[i],
            orbit,
        });
    }
    Ok(records)
}

/// Standard (or flyped, with `flypes`) vectors of weight `≤ max_weight`, optionally with their swaps.
pub fn census_expressions(max_weight: u32, flypes: bool, swaps: bool) -> Vec<LinkExpr> {
    let mut out = Vec::new();
    for v in enumerate_vectors(max_weight, flypes) {
        let e = LinkExpr::single(v);
        if swaps {
            out.push(e.clone());
            out.push(e.swap());
        } else {
            out.push(e);
        }
    }
    out
}

/// Every single vector of weight `≤ max_weight` with all horizontal flypes and vertical flypes
/// of total `≤ max_q`, plus every ordered connect sum of two flyped summands of weight
/// `≤ max_summand`; each with and without swap.
pub fn sweep_expressions(max_weight: u32, max_q: u32, max_summand: u32) -> Vec<LinkExpr> {
    let mut singles = Vec::new();
    for v in enumerate_vectors(max_weight, true) {
        for w in vertical_flypes(&v, max_q) {
            singles.push(LinkExpr::single(w));
        }
    }
    let parts = enumerate_vectors(max_summand, true);
    for a in &parts {
        for b in &parts {
            singles.push(LinkExpr::sum(vec![a.clone(), b.clone()]));
        }
    }
    singles.into_iter().flat_map(|e| [e.swap(), e].into_iter().rev()).collect()
}

/// The proven identifications: flype normalization, `(2h) = ~(2h)` for `h ≥ 1`, and the
/// swap-flype rule `~L^0 = L^1` for `h_1 ≥ 1` with `v_1..v_{n-2}` even and no other flypes.
fn canonical(e: &LinkExpr) -> LinkExpr {
    let mut out = normalize_equivalence(e);
    if let [v] = out.components.as_slice() {
        let n = v.n();
        if n == 1 && v.h()[0] >= 1 {
            out.swapped = false;
        } else if n >= 2
            && v.h()[0] >= 1
            && v.p()[0] == 1
            && v.p()[1..].iter().all(|&x| x == 0)
            && v.q().iter().all(|&x| x == 0)
            && v.v()[..n - 2].iter().all(|&x| x % 2 == 0)
        {
            let mut p = v.p().to_vec();
            p[0] = 0;
            let flipped = v.with_flypes(p, v.q().to_vec()).expect("clearing a flype stays valid");
            out = LinkExpr { components: vec![flipped], swapped: !out.swapped };
        }
    }
    out
}

/// Same class, same rational value, same orbit, yet not identified by the proven equivalences.
pub fn open_pairs(records: &[CensusRecord]) -> Vec<(LinkExpr, LinkExpr)> {
    let mut groups: HashMap<(usize, usize, &str), Vec<usize>> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        groups.entry((r.class, r.orbit, r.rational.as_str())).or_default().push(i);
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.sort_by_key(|k| groups[k][0]);
    let mut out = Vec::new();
    for k in keys {
        let members = &groups[&k];
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                let (x, y) = (&records[i].expr, &records[j].expr);
                if canonical(x) != canonical(y) {
                    out.push((x.clone(), y.clone()));
                }
            }
        }
    }
    out
}

pub fn records_csv(records: &[CensusRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["expr", "rational", "gamma_minus", "gamma_plus", "ordered", "class", "orbit"]).unwrap();
    for r in records {
        w.write_record([
            r.expr.to_string(),
            r.rational.clone(),
            r.gammas.minus.to_string(),
            r.gammas.plus.to_string(),
            r.ordered.to_string(),
            r.class.to_string(),
            r.orbit.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DssReport {
    pub set: Vec<u64>,
    pub is_dss: bool,
    /// Two different subsets with the same sum.
    pub witness: Option<(Vec<u64>, Vec<u64>)>,
}

pub fn dss_check(set: &[u64]) -> Result<DssReport, CensusError> {
    let n = set.len();
    if n > DSS_MAX {
        return Err(CensusError::Size(n));
    }
    let pick = |mask: u32| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| set[i]).collect::<Vec<_>>();
    let mut sums: HashMap<u64, u32> = HashMap::with_capacity(1 << n);
    for mask in 0u32..(1u32 << n) {
        let s: u64 = pick(mask).iter().sum();
        if let Some(&other) = sums.get(&s) {
            let common = other & mask;
            return Ok(DssReport {
                set: set.to_vec(),
                is_dss: false,
                witness: Some((pick(other & !common), pick(mask & !common))),
            });
        }
        sums.insert(s, mask);
    }
    Ok(DssReport { set: set.to_vec(), is_dss: true, witness: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundStatus {
    Pass,
    HypothesisNotMet,
    Fail,
}

impl fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundStatus::Pass => "PASS",
            BoundStatus::HypothesisNotMet => "HYPOTHESIS_NOT_MET",
            BoundStatus::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub vector: LinkVector,
    pub family: Vec<LinkExpr>,
    pub classes: usize,
    /// `None` when no counting theorem covers the vector.
    pub bound: Option<usize>,
    pub status: BoundStatus,
}

/// The witness family is the parity flypes on `p_1..p_{n-1}` when `h_1 ≥ 1`, and the
/// parity flypes on `p_2..p_{n-1}` together with their swaps when `h_1 = 0`.
pub fn verify_lower_bounds(standard: &LinkVector) -> Result<LowerBoundReport, CensusError> {
    if !standard.is_standard() {
        return Err(CensusError::NotStandard(standard.to_string()));
    }
    let n = standard.n();
    let h = standard.h();
    let zero = h[0] == 0;
    let free = if zero { n.saturating_sub(2) } else { n - 1 };
    let first = if zero { 1 } else { 0 };
    let mut family = Vec::new();
    for bits in 0u32..(1 << free) {
        let mut p = vec![0; n];
        for b in 0..free {
            p[first + b] = bits >> b & 1;
        }
        let v = standard.with_flypes(p, vec![0; n - 1]).expect("parity flypes are valid");
        let e = LinkExpr::single(v);
        if zero {
            family.push(e.clone());
            family.push(e.swap());
        } else {
            family.push(e);
        }
    }
    let gammas: Vec<GammaPair> = family.iter().map(gamma_expr).collect::<Result<_, _>>()?;
    let classes = polynomial_classes(&gammas).len();
    let bound = match n {
        1 => None,
        2 => Some(2),
        3 => {
            let v = standard.v();
            (zero || h[1] != h[2] || v[1] != 2 * v[0]).then_some(4)
        }
        _ => {
            let set: Vec<u64> = h.iter().enumerate().map(|(i, &x)| if i == 0 && zero { 1 } else { x as u64 }).collect();
            let dss = set.len() <= DSS_MAX && dss_check(&set)?.is_dss;
            dss.then_some(1 << (n - 1))
        }
    };
    let status = match bound {
        None => BoundStatus::HypothesisNotMet,
        Some(b) if classes >= b => BoundStatus::Pass,
        Some(_) => BoundStatus::Fail,
    };
    Ok(LowerBoundReport { vector: standard.clone(), family, classes, bound, status })
}

/// `Γ⁺ - λΓ⁻` when it is a polynomial with nonnegative coefficients.
pub fn plus_excess(g: &GammaPair) -> Option<LaurentPoly> {
    g.plus.checked_sub(&g.minus.shift(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::{parse_link_expr, parse_link_vector};

    fn exprs(list: &[&str]) -> Vec<LinkExpr> {
        list.iter().map(|s| parse_link_expr(s).unwrap()).collect()
    }

    #[test]
    fn small_enumerations() {
        let names: Vec<String> = enumerate_vectors(2, false).iter().map(|v| v.to_string()).collect();
        assert_eq!(names, ["(0)", "(2)"]);
        let n2: Vec<String> =
            enumerate_vectors(5, false).iter().filter(|v| v.n() == 2).map(|v| v.to_string()).collect();
        assert_eq!(n2, ["(2,1,0)", "(2,2,0)", "(2,3,0)", "(2,1,2)", "(4,1,0)"]);
        let flyped = enumerate_vectors(5, true);
        assert!(flyped.iter().any(|v| v.to_string() == "(2,1,2^2)"));
        assert!(flyped.iter().all(|v| v.q().iter().all(|&q| q == 0)));
        for v in &flyped {
            assert_eq!(parse_link_vector(&v.to_string()).unwrap(), *v);
        }
    }

    #[test]
    fn class_examples() {
        let r = build_census(&exprs(&["(2,1,2)", "(2,1,2^1)", "~(2,1,2)", "~(2,1,2^1)"])).unwrap();
        let classes = polynomial_classes(&r.iter().map(|x| x.gammas.clone()).collect::<Vec<_>>());
        assert_eq!(classes.len(), 2);
        assert_eq!(r[2].class, r[1].class);
        let r = build_census(&exprs(&["(2,1,2,1,2)", "(2,1,2^1,1,2)", "(2,1,2,1,2^1)", "(2,1,2^1,1,2^1)"])).unwrap();
        assert_eq!(r.iter().map(|x| x.class).max(), Some(3));
        let r = build_census(&exprs(&["(2,1,2,1,0)", "(2,1,2^2,1,0)"])).unwrap();
        assert_eq!(r[0].class, r[1].class);
        assert_eq!(r[0].orbit, r[1].orbit);
    }

    #[test]
    fn dss_examples() {
        let r = dss_check(&[1, 2, 3]).unwrap();
        assert!(!r.is_dss);
        assert_eq!(r.witness, Some((vec![1, 2], vec![3])));
        assert!(dss_check(&[2, 3, 4, 8]).unwrap().is_dss);
        assert!(dss_check(&[]).unwrap().is_dss);
        assert!(matches!(dss_check(&[1; 25]), Err(CensusError::Size(25))));
        for k in 1..=12 {
            let set: Vec<u64> = (0..k).map(|i| 1 << i).collect();
            assert!(dss_check(&set).unwrap().is_dss);
        }
    }

    #[test]
    fn lower_bound_examples() {
        let check = |s: &str, classes: usize| {
            let r = verify_lower_bounds(&parse_link_vector(s).unwrap()).unwrap();
            assert_eq!((r.status, r.classes), (BoundStatus::Pass, classes), "{s}");
        };
        check("(2,1,2)", 2);
        check("(2,1,2,1,2)", 4);
        check("(2,1,2,1,0)", 4);
        check("(16,1,8,1,4,1,2)", 8);
        assert!(verify_lower_bounds(&parse_link_vector("(2,1,2^1)").unwrap()).is_err());
    }

    #[test]
    fn open_pair_examples() {
        let r = build_census(&exprs(&[
            "(2,1,2,1,0)",
            "(2,1,2^1,1,0)",
            "(2,1,2^2,1,0)",
            "(2,1,2,1,2^1,1,2)",
            "(2,1,2,1,2^1,1,2^1)",
            "(2,1,0)#(2,2,0)",
        ]))
        .unwrap();
        let pairs: Vec<(String, String)> = open_pairs(&r).iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        assert_eq!(
            pairs,
            [
                ("(2,1,2,1,0)".to_string(), "(2,1,2^2,1,0)".to_string()),
                ("(2,1,2,1,2^1,1,2)".to_string(), "(2,1,2,1,2^1,1,2^1)".to_string()),
            ]
        );
        let small = build_census(&census_expressions(5, true, true)).unwrap();
        let found: Vec<String> = open_pairs(&small).iter().map(|(a, b)| format!("{a} {b}")).collect();
        assert!(found.is_empty(), "{found:?}");
    }

    #[test]
    fn json_and_csv_columns() {
        let r = build_census(&exprs(&["(4,3,2)", "~(0)"])).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with(r#"[{"expr":"(4,3,2)","rational":"30/13","gamma_minus":"#));
        let back: Vec<CensusRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let csv = records_csv(&r);
        assert!(csv.starts_with("expr,rational,gamma_minus,gamma_plus,ordered,class,orbit\n"));
    }
}
