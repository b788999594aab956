//! Truncated integer power series with exact arbitrary-precision
//! coefficients, for the generating function `prod_s (1 + x^s)^(n-1)`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// A power series truncated at a fixed degree, coefficients `c_0..c_hmax`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    /// The constant series 1, truncated at degree `h_max`.
    pub fn one(h_max: usize) -> Self {
        let mut coeffs = vec![BigInt::from(0); h_max + 1];
        coeffs[0] = BigInt::from(1);
        TruncatedSeries { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        TruncatedSeries { coeffs: coeffs.into_iter().map(BigInt::from).collect() }
    }

    pub fn truncation_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, h: usize) -> &BigInt {
        &self.coeffs[h]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Cauchy product, truncated at the common degree. Panics when the
    /// truncation degrees differ.
    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(
            self.truncation_degree(),
            other.truncation_degree(),
            "series must share a truncation degree"
        );
        let m = self.coeffs.len();
        let mut out = vec![BigInt::from(0); m];
        for i in 0..m {
            if self.coeffs[i] == BigInt::from(0) {
                continue;
            }
            for j in 0..m - i {
                if other.coeffs[j] != BigInt::from(0) {
                    out[i + j] += &self.coeffs[i] * &other.coeffs[j];
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// `1 + x^s`, truncated at `h_max`.
    pub fn one_plus_power(s: usize, h_max: usize) -> Self {
        let mut coeffs = vec![BigInt::from(0); h_max + 1];
        coeffs[0] = BigInt::from(1);
        if s <= h_max {
            coeffs[s] = BigInt::from(1);
        }
        TruncatedSeries { coeffs }
    }
}

/// `prod_{s=1}^{h_max} (1 + x^s)^exponent` truncated at `h_max`; factors
/// with `s > h_max` cannot affect the kept degrees.
pub fn distinct_parts_product(exponent: u32, h_max: usize) -> TruncatedSeries {
    let mut acc = TruncatedSeries::one(h_max);
    for s in 1..=h_max.max(1) {
        let factor = TruncatedSeries::one_plus_power(s, h_max);
        for _ in 0..exponent {
            acc = acc.mul(&factor);
        }
    }
    acc
}
