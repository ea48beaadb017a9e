//! Laurent polynomials in `λ` with positive integer coefficients.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exponent to coefficient; zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, u64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c·λ^k`.
    pub fn monomial(k: i64, c: u64) -> Self {
        let mut p = Self::zero();
        p.add_term(k, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, u64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    /// `1 + λ`.
    pub fn one_plus_lambda() -> Self {
        Self::from_terms([(0, 1), (1, 1)])
    }

    pub fn add_term(&mut self, k: i64, c: u64) {
        if c > 0 {
            *self.terms.entry(k).or_insert(0) += c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: i64) -> u64 {
        self.terms.get(&k).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    /// Value at `λ = 1`.
    pub fn total(&self) -> u64 {
        self.terms.values().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c);
        }
        out
    }

    /// Multiplication by `λ^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { terms: self.terms.iter().map(|(&e, &c)| (e + k, c)).collect() }
    }

    /// `λ^k ↦ λ^{-k}`.
    pub fn reverse(&self) -> Self {
        Self { terms: self.terms.iter().map(|(&e, &c)| (-e, c)).collect() }
    }

    /// Termwise `self ≤ other`.
    pub fn le_termwise(&self, other: &Self) -> bool {
        self.terms().all(|(k, c)| c <= other.coeff(k))
    }

    /// `self - other` when every coefficient stays nonnegative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            let have = out.coeff(k);
            if have < c {
                return None;
            }
            if have == c {
                out.terms.remove(&k);
            } else {
                out.terms.insert(k, have - c);
            }
        }
        Some(out)
    }
}

/// True iff `a = λ·reverse(b)`.
pub fn one_shift_palindromic(a: &LaurentPoly, b: &LaurentPoly) -> bool {
    *a == b.reverse().shift(1)
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("λ")?,
                (1, c) => write!(f, "{c}λ")?,
                (k, 1) => write!(f, "λ^{k}")?,
                (k, c) => write!(f, "{c}λ^{k}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.terms.iter().map(|(k, c)| (k.to_string(), *c)))
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, u64>::deserialize(d)?;
        let mut p = LaurentPoly::zero();
        for (k, c) in raw {
            let e: i64 = k.parse().map_err(|_| D::Error::custom(format!("bad exponent {k:?}")))?;
            if c == 0 {
                return Err(D::Error::custom("zero coefficients are not stored"));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(terms: &[(i64, u64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn add_shift_reverse() {
        let a = poly(&[(0, 1), (-1, 1)]);
        let b = poly(&[(0, 1), (1, 1)]);
        assert_eq!(a.add(&b), poly(&[(-1, 1), (0, 2), (1, 1)]));
        assert_eq!(a.add(&LaurentPoly::zero()), a);
        assert_eq!(poly(&[(0, 3)]).shift(1), poly(&[(1, 3)]));
        assert_eq!(poly(&[(-1, 1), (0, 1)]).shift(2), poly(&[(1, 1), (2, 1)]));
        assert_eq!(poly(&[(0, 1), (-1, 1), (-3, 2)]).reverse(), poly(&[(0, 1), (1, 1), (3, 2)]));
    }

    #[test]
    fn palindromic_pairs() {
        assert!(one_shift_palindromic(&poly(&[(1, 2)]), &poly(&[(0, 2)])));
        assert!(!one_shift_palindromic(&LaurentPoly::one_plus_lambda(), &LaurentPoly::zero()));
    }

    #[test]
    fn text_and_json() {
        assert_eq!(poly(&[(-1, 1), (0, 1), (1, 1)]).to_string(), "λ^-1 + 1 + λ");
        assert_eq!(poly(&[(0, 1), (1, 1), (2, 1)]).to_string(), "1 + λ + λ^2");
        assert_eq!(poly(&[(-3, 2), (1, 4)]).to_string(), "2λ^-3 + 4λ");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        let p = poly(&[(-1, 1), (0, 2), (1, 1)]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"-1":1,"0":2,"1":1}"#);
        assert_eq!(serde_json::from_str::<LaurentPoly>(&json).unwrap(), p);
        assert!(serde_json::from_str::<LaurentPoly>(r#"{"x":1}"#).is_err());
    }

    #[test]
    fn checked_removal() {
        let p = poly(&[(0, 2), (1, 1)]);
        assert_eq!(p.checked_sub(&LaurentPoly::one_plus_lambda()), Some(poly(&[(0, 1)])));
        assert_eq!(poly(&[(0, 1)]).checked_sub(&LaurentPoly::one_plus_lambda()), None);
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-6i64..6, 0u64..4), 0..6).prop_map(LaurentPoly::from_terms)
    }

    proptest! {
        #[test]
        fn reverse_is_involution(p in arb_poly()) {
            prop_assert_eq!(p.reverse().reverse(), p);
        }

        #[test]
        fn reverse_of_shift(p in arb_poly(), k in -5i64..5) {
            prop_assert_eq!(p.shift(k).reverse(), p.reverse().shift(-k));
        }

        #[test]
        fn add_laws(a in arb_poly(), b in arb_poly(), c in arb_poly(), k in -4i64..4) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.add(&b).shift(k), a.shift(k).add(&b.shift(k)));
        }

        #[test]
        fn palindromic_relation_is_symmetric(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(one_shift_palindromic(&a, &b), one_shift_palindromic(&b, &a));
            prop_assert!(one_shift_palindromic(&b.reverse().shift(1), &b));
        }

        #[test]
        fn json_round_trip(p in arb_poly()) {
            let s = serde_json::to_string(&p).unwrap();
            prop_assert_eq!(serde_json::from_str::<LaurentPoly>(&s).unwrap(), p);
        }
    }
}
