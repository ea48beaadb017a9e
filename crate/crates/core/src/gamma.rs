//! Closed-form homology polynomials and the orderedness test.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{one_shift_palindromic, LaurentPoly};
use crate::notation::{LinkExpr, LinkVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error("negative coefficient while removing 1+λ from {0}")]
    NegativeCoeff(String),
}

/// `(Γ⁻, Γ⁺)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GammaPair {
    #[serde(rename = "gamma_minus")]
    pub minus: LaurentPoly,
    #[serde(rename = "gamma_plus")]
    pub plus: LaurentPoly,
}

impl GammaPair {
    /// The pair of the swapped link.
    pub fn swapped(&self) -> GammaPair {
        GammaPair { minus: self.plus.reverse().shift(1), plus: self.minus.reverse().shift(1) }
    }
}

/// `σ(j) = (1 + p_1 + ... + p_j) mod 2` for `j = 1..n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector {
    pub sigma: Vec<u8>,
}

impl SignVector {
    pub fn of(v: &LinkVector) -> SignVector {
        let mut acc = 1u32;
        let sigma = v.p()[..v.n() - 1]
            .iter()
            .map(|&p| {
                acc += p;
                (acc % 2) as u8
            })
            .collect();
        SignVector { sigma }
    }
}

pub fn gamma_vector(v: &LinkVector) -> GammaPair {
    let sigma = SignVector::of(v).sigma;
    let mut minus = LaurentPoly::monomial(0, v.h()[0] as u64);
    let mut e = 0i64;
    for i in 1..v.n() {
        let vj = v.v()[i - 1] as i64;
        e += if sigma[i - 1] == 0 { vj } else { -vj };
        minus.add_term(e, v.h()[i] as u64);
    }
    let mut plus = minus.shift(1);
    if v.h()[0] == 0 {
        plus = plus.add(&LaurentPoly::one_plus_lambda());
    }
    GammaPair { minus, plus }
}

/// Connect sums add `Γ⁻`; `Γ⁺` keeps a single `1+λ` only when every summand has `h_1 = 0`.
/// Swaps go through `dim H_k⁺(L) = dim H_{1-k}⁻(L̄)`.
pub fn gamma_expr(e: &LinkExpr) -> Result<GammaPair, GammaError> {
    let parts: Vec<GammaPair> = e.components.iter().map(gamma_vector).collect();
    let k = parts.len();
    let zeros = e.components.iter().filter(|c| c.h()[0] == 0).count();
    let mut minus = LaurentPoly::zero();
    let mut plus = LaurentPoly::zero();
    for g in &parts {
        minus = minus.add(&g.minus);
        plus = plus.add(&g.plus);
    }
    let removals = if zeros == k { k - 1 } else { zeros };
    for _ in 0..removals {
        plus = plus
            .checked_sub(&LaurentPoly::one_plus_lambda())
            .ok_or_else(|| GammaError::NegativeCoeff(plus.to_string()))?;
    }
    let pair = GammaPair { minus, plus };
    Ok(if e.swapped { pair.swapped() } else { pair })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OrderStatus {
    Ordered,
    Unordered,
    Unknown,
}

impl fmt::Display for OrderStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderStatus::Ordered => "ORDERED",
            OrderStatus::Unordered => "UNORDERED",
            OrderStatus::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub status: OrderStatus,
    pub reason: String,
}

impl fmt::Display for OrderVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.status, self.reason)
    }
}

pub fn orderedness(e: &LinkExpr) -> Result<OrderVerdict, GammaError> {
    if let [v] = e.components.as_slice() {
        if v.n() == 1 && v.h()[0] >= 1 {
            return Ok(OrderVerdict {
                status: OrderStatus::Unordered,
                reason: "integral link L = (2h1) with h1 >= 1 is isotopic to its swap".into(),
            });
        }
    }
    let g = gamma_expr(e)?;
    Ok(if !one_shift_palindromic(&g.plus, &g.minus) {
        OrderVerdict {
            status: OrderStatus::Ordered,
            reason: "Γ⁺ is not λ times the palindrome of Γ⁻".into(),
        }
    } else {
        OrderVerdict {
            status: OrderStatus::Unknown,
            reason: "Γ⁺ = λ·Γ⁻(1/λ), so the polynomial test cannot separate L from its swap".into(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_link_expr;

    fn g(s: &str) -> GammaPair {
        gamma_expr(&parse_link_expr(s).unwrap()).unwrap()
    }

    fn poly(terms: &[(i64, u64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn sign_vector_runs_over_first_n_minus_one() {
        let v = crate::notation::parse_link_vector("(2,1,2^1,1,2^1)").unwrap();
        // p = (1,1): σ(1) = 0, σ(2) = 1.
        assert_eq!(SignVector::of(&v).sigma, vec![0, 1]);
    }

    #[test]
    fn single_vector_values() {
        assert_eq!(g("(2,2,2^1,1,2^1)").minus, poly(&[(-1, 1), (0, 1), (1, 1)]));
        assert_eq!(g("(2,2,2^1,1,2^1)").plus, poly(&[(0, 1), (1, 1), (2, 1)]));
        assert_eq!(g("(2,1,2^1,1,2^1)").minus, poly(&[(0, 2), (1, 1)]));
        assert_eq!(g("(2,1,2,1,2^1,1,2)").minus, poly(&[(-1, 1), (0, 2), (1, 1)]));
        assert_eq!(g("(2,1,2,1,4^1,1,2)").minus, poly(&[(-1, 2), (0, 2), (1, 1)]));
        assert_eq!(g("(2,1,2,1,4^1,1,2^1)").minus, poly(&[(-1, 1), (0, 2), (1, 2)]));
        assert_eq!(g("(0)"), GammaPair { minus: LaurentPoly::zero(), plus: LaurentPoly::one_plus_lambda() });
        // h_1 = 1, h_2 = 2 at -v_1 = -1, h_3 = 1 at -3.
        assert_eq!(g("(2,2,4,1,2)").minus, poly(&[(0, 1), (-1, 2), (-3, 1)]));
    }

    #[test]
    fn sums_and_swaps() {
        let s = g("(2,1,2)#(2,1,2)");
        assert_eq!(s.minus, poly(&[(0, 2), (-1, 2)]));
        assert_eq!(s.plus, poly(&[(1, 2), (0, 2)]));
        assert_eq!(g("(0)#(0)"), g("(0)"));
        // ~(2h_2, v_1, 0) with h_2 = 3, v_1 = 2.
        assert_eq!(g("~(6,2,0)").minus, poly(&[(0, 1), (1, 1), (2, 3)]));
        assert_eq!(g("~(0)").minus, poly(&[(0, 1), (1, 1)]));
        // Γ⁺[~E] = λ·reverse(Γ⁻[E]) and Γ⁻[(0)] = 0.
        assert_eq!(g("~(0)").plus, LaurentPoly::zero());
        let e = parse_link_expr("(4,1,2^1)#(2,3,0)").unwrap();
        assert_eq!(gamma_expr(&e.swap().swap()).unwrap(), gamma_expr(&e).unwrap());
    }

    #[test]
    fn verdicts() {
        let o = |s: &str| orderedness(&parse_link_expr(s).unwrap()).unwrap().status;
        assert_eq!(o("(0)"), OrderStatus::Ordered);
        assert_eq!(o("(2)"), OrderStatus::Unordered);
        assert_eq!(o("~(4)"), OrderStatus::Unordered);
        assert_eq!(o("(2,2,2^1,1,2^1)"), OrderStatus::Unknown);
        assert_eq!(o("(4,2,2^1,1,2^1)"), OrderStatus::Ordered);
    }
}
