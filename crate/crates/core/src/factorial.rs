//! Factorial number system over arbitrary-precision integers.
//!
//! Every `v < (n+1)!` is uniquely `c_1·1! + c_2·2! + … + c_n·n!` with
//! `0 <= c_k <= k`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorialError {
    #[error("value does not fit in {n} factorial digits (needs < (n+1)!)")]
    Overflow { n: usize },
    #[error("digit c_{k} = {value} is out of range 0..={k}")]
    DigitOutOfRange { k: usize, value: u64 },
    #[error("digit count must be positive")]
    NoDigits,
}

/// Digits `c_1..c_n`, stored at index `k-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FactorialDigits {
    digits: Vec<u64>,
}

impl FactorialDigits {
    pub fn new(digits: Vec<u64>) -> Result<Self, FactorialError> {
        if digits.is_empty() {
            return Err(FactorialError::NoDigits);
        }
        for (i, &c) in digits.iter().enumerate() {
            if c > i as u64 + 1 {
                return Err(FactorialError::DigitOutOfRange { k: i + 1, value: c });
            }
        }
        Ok(FactorialDigits { digits })
    }

    pub fn n(&self) -> usize {
        self.digits.len()
    }

    /// `c_k` for `1 <= k <= n`.
    pub fn digit(&self, k: usize) -> u64 {
        self.digits[k - 1]
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// `(k, c_k)` for every nonzero digit.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.digits
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| (i + 1, *c))
    }

    pub fn value(&self) -> BigUint {
        let mut fact = BigUint::one();
        let mut total = BigUint::zero();
        for (i, &c) in self.digits.iter().enumerate() {
            fact *= (i + 1) as u64;
            if c != 0 {
                total += &fact * c;
            }
        }
        total
    }
}

impl TryFrom<Vec<u64>> for FactorialDigits {
    type Error = FactorialError;
    fn try_from(v: Vec<u64>) -> Result<Self, Self::Error> {
        FactorialDigits::new(v)
    }
}

impl From<FactorialDigits> for Vec<u64> {
    fn from(d: FactorialDigits) -> Self {
        d.digits
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// `(n+1)! - 1`, the largest value with `n` digits.
pub fn max_value(n: usize) -> BigUint {
    factorial(n + 1) - 1u32
}

/// Encodes `v` with exactly `n` digits, most significant digit first.
pub fn encode(v: &BigUint, n: usize) -> Result<FactorialDigits, FactorialError> {
    if n == 0 {
        return Err(FactorialError::NoDigits);
    }
    let mut fact = factorial(n);
    if *v >= &fact * (n as u64 + 1) {
        return Err(FactorialError::Overflow { n });
    }
    let mut rest = v.clone();
    let mut digits = vec![0u64; n];
    for k in (1..=n).rev() {
        let (q, r) = rest.div_rem(&fact);
        digits[k - 1] = q.to_u64().expect("digit bounded by k");
        rest = r;
        fact /= k as u64;
    }
    Ok(FactorialDigits { digits })
}

/// Evaluates raw digits, rejecting any `c_k > k`.
pub fn decode(digits: &[u64]) -> Result<BigUint, FactorialError> {
    Ok(FactorialDigits::new(digits.to_vec())?.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// Direct evaluation of Σ c_k·k! with machine integers.
    fn eval(digits: &[u64]) -> u64 {
        let mut f = 1;
        let mut s = 0;
        for (i, c) in digits.iter().enumerate() {
            f *= i as u64 + 1;
            s += c * f;
        }
        s
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&big(0), 3).unwrap().digits(), &[0, 0, 0]);
        assert_eq!(encode(&big(5), 2).unwrap().digits(), &[1, 2]);
        assert_eq!(eval(&[1, 2]), 5);
        assert_eq!(encode(&big(719), 5).unwrap().digits(), &[1, 2, 3, 4, 5]);
        assert_eq!(eval(&[1, 2, 3, 4, 5]), 719);
        assert_eq!(encode(&big(720), 5), Err(FactorialError::Overflow { n: 5 }));
        assert_eq!(encode(&big(6), 2), Err(FactorialError::Overflow { n: 2 }));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(&[0, 0]).unwrap(), big(0));
        assert_eq!(decode(&[1, 2]).unwrap(), big(5));
        assert_eq!(decode(&[1, 0, 0]).unwrap(), big(1));
        assert_eq!(
            decode(&[2]),
            Err(FactorialError::DigitOutOfRange { k: 1, value: 2 })
        );
        assert_eq!(decode(&[]), Err(FactorialError::NoDigits));
    }

    #[test]
    fn max_value_examples() {
        assert_eq!(max_value(1), big(1));
        assert_eq!(max_value(2), big(5));
        assert_eq!(max_value(5), big(719));
    }

    fn all_digit_vectors(n: usize) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for k in 1..=n as u64 {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..=k).map(move |c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn representations_are_unique() {
        // 1000 < 7! so six digits reach every v <= 1000.
        let mut hits = vec![0u32; 5040];
        for d in all_digit_vectors(6) {
            hits[eval(&d) as usize] += 1;
        }
        assert!(hits.iter().all(|&h| h == 1));
        for v in 0..=1000u64 {
            let n = (1..).find(|&n| max_value(n) >= big(v)).unwrap();
            let matching: Vec<_> = all_digit_vectors(n).into_iter().filter(|d| eval(d) == v).collect();
            assert_eq!(matching.len(), 1);
            assert_eq!(encode(&big(v), n).unwrap().digits(), matching[0].as_slice());
        }
    }

    #[test]
    fn encoding_preserves_order() {
        let codes: Vec<Vec<u64>> = (0..=720u64)
            .map(|v| {
                let mut d = encode(&big(v), 6).unwrap().digits().to_vec();
                d.reverse();
                d
            })
            .collect();
        for v in 0..codes.len() {
            for w in 0..codes.len() {
                assert_eq!(v < w, codes[v] < codes[w]);
            }
        }
    }

    #[test]
    fn serde_validates_digits() {
        let d: FactorialDigits = serde_json::from_str("[1,2,0]").unwrap();
        assert_eq!(d.value(), big(5));
        assert!(serde_json::from_str::<FactorialDigits>("[1,3]").is_err());
        assert_eq!(serde_json::to_string(&d).unwrap(), "[1,2,0]");
    }

    proptest! {
        #[test]
        fn roundtrip_random(n in 2usize..=50, bytes in proptest::collection::vec(any::<u8>(), 1..40)) {
            let v = BigUint::from_bytes_le(&bytes) % factorial(n + 1);
            let d = encode(&v, n).unwrap();
            prop_assert_eq!(d.n(), n);
            prop_assert_eq!(decode(d.digits()).unwrap(), v);
        }
    }
}
