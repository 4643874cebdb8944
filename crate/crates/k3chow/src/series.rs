//! Truncated univariate power series over exact rationals.
//!
//! A [`PowerSeries`] stores coefficients `c_0 .. c_trunc` of a named formal
//! variable. All arithmetic is exact and truncates to the shorter operand.
//! The appendix bookkeeping only ever divides by products of `1 - q^k`
//! factors, but [`PowerSeries::invert`] handles any unit.

use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{rat_int, rat_render, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    var: String,
    coeffs: Vec<Rat>, // index = exponent, length = trunc + 1
}

impl PowerSeries {
    pub fn zero(var: &str, trunc: usize) -> Self {
        PowerSeries { var: var.to_string(), coeffs: vec![Rat::zero(); trunc + 1] }
    }

    pub fn one(var: &str, trunc: usize) -> Self {
        let mut s = Self::zero(var, trunc);
        s.coeffs[0] = Rat::one();
        s
    }

    /// The monomial `c * var^k`, truncated (terms beyond `trunc` vanish).
    pub fn monomial(var: &str, c: Rat, k: usize, trunc: usize) -> Self {
        let mut s = Self::zero(var, trunc);
        if k <= trunc {
            s.coeffs[k] = c;
        }
        s
    }

    /// Build from `(exponent, coefficient)` pairs.
    pub fn from_terms(var: &str, terms: &[(usize, Rat)], trunc: usize) -> Self {
        let mut s = Self::zero(var, trunc);
        for (k, c) in terms {
            if *k <= trunc {
                s.coeffs[*k] += c;
            }
        }
        s
    }

    /// Build from a dense integer coefficient list starting at exponent 0.
    pub fn from_ints(var: &str, coeffs: &[i64], trunc: usize) -> Self {
        let mut s = Self::zero(var, trunc);
        for (k, c) in coeffs.iter().enumerate() {
            if k <= trunc {
                s.coeffs[k] = rat_int(*c);
            }
        }
        s
    }

    pub fn variable(&self) -> &str {
        &self.var
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(trunc + 1);
        coeffs.resize(trunc + 1, Rat::zero());
        PowerSeries { var: self.var.clone(), coeffs }
    }

    fn assert_same_var(&self, other: &Self) {
        assert_eq!(self.var, other.var, "series variable mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_var(other);
        let trunc = self.truncation().min(other.truncation());
        let mut out = Self::zero(&self.var, trunc);
        for k in 0..=trunc {
            out.coeffs[k] = &self.coeffs[k] + &other.coeffs[k];
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_var(other);
        let trunc = self.truncation().min(other.truncation());
        let mut out = Self::zero(&self.var, trunc);
        for k in 0..=trunc {
            out.coeffs[k] = &self.coeffs[k] - &other.coeffs[k];
        }
        out
    }

    pub fn neg(&self) -> Self {
        PowerSeries {
            var: self.var.clone(),
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        PowerSeries { var: self.var.clone(), coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_var(other);
        let trunc = self.truncation().min(other.truncation());
        let mut out = Self::zero(&self.var, trunc);
        for (i, a) in self.coeffs.iter().enumerate().take(trunc + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(trunc + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }

    /// Multiplicative inverse at the series' own truncation. Errors when the
    /// constant term vanishes.
    pub fn invert(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::NonUnit(format!("series in {} with zero constant term", self.var)));
        }
        let trunc = self.truncation();
        let inv0 = Rat::one() / self.coeffs[0].clone();
        let mut out = Self::zero(&self.var, trunc);
        out.coeffs[0] = inv0.clone();
        for k in 1..=trunc {
            let mut acc = Rat::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &out.coeffs[k - j];
                }
            }
            out.coeffs[k] = -acc * &inv0;
        }
        Ok(out)
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rat::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if wrote {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            wrote = true;
            match k {
                0 => write!(f, "{}", rat_render(&mag))?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{}*", rat_render(&mag))?;
                    }
                    if k == 1 {
                        write!(f, "{}", self.var)?;
                    } else {
                        write!(f, "{}^{}", self.var, k)?;
                    }
                }
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", self.var, self.truncation() + 1)
    }
}

/// Expand `numerator / prod (1 - var^k)` to order `trunc`. The numerator is
/// given as `(exponent, coefficient)` pairs; `den_powers` lists the `k` of
/// each `1 - var^k` factor. Errors if any factor has `k == 0` (non-unit).
pub fn series_expand(
    var: &str,
    numerator: &[(usize, Rat)],
    den_powers: &[usize],
    trunc: usize,
) -> Result<PowerSeries> {
    let mut out = PowerSeries::from_terms(var, numerator, trunc);
    for &k in den_powers {
        if k == 0 {
            return Err(Error::NonUnit("denominator factor 1 - q^0 = 0".into()));
        }
        let factor = PowerSeries::from_terms(var, &[(0, rat_int(1)), (k, rat_int(-1))], trunc);
        out = out.mul(&factor.invert().expect("1 - q^k is a unit"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn invert_round_trips_against_multiplication() {
        let s = PowerSeries::from_terms(
            "q",
            &[(0, rat_int(2)), (1, rat(1, 3)), (4, rat_int(-5))],
            12,
        );
        let inv = s.invert().unwrap();
        assert_eq!(s.mul(&inv), PowerSeries::one("q", 12));
    }

    #[test]
    fn invert_rejects_non_units() {
        let s = PowerSeries::monomial("q", rat_int(1), 2, 8);
        assert!(matches!(s.invert(), Err(Error::NonUnit(_))));
        assert!(series_expand("q", &[(0, rat_int(1))], &[0], 8).is_err());
    }

    #[test]
    fn geometric_series_from_expansion() {
        // 1/(1-q) = 1 + q + q^2 + ...
        let s = series_expand("q", &[(0, rat_int(1))], &[1], 10).unwrap();
        for k in 0..=10 {
            assert_eq!(s.coeff(k), rat_int(1));
        }
    }

    #[test]
    fn expansion_matches_partition_counting_oracle() {
        // 1/((1-q^2)(1-q^4)(1-q^6)): coefficient of q^(2m) counts partitions
        // of m into parts of size at most 3. Oracle: direct triple loop.
        let s = series_expand("q", &[(0, rat_int(1))], &[2, 4, 6], 23).unwrap();
        for m in 0..=11usize {
            let mut count = 0u32;
            for threes in 0..=m / 3 {
                for twos in 0..=(m - 3 * threes) / 2 {
                    let rest = m - 3 * threes - 2 * twos;
                    let _ones = rest; // everything else is a part of size 1
                    count += 1;
                }
            }
            assert_eq!(s.coeff(2 * m), rat_int(i64::from(count)), "q^{}", 2 * m);
            if 2 * m + 1 <= 23 {
                assert_eq!(s.coeff(2 * m + 1), rat_int(0));
            }
        }
    }

    #[test]
    fn corrected_footnote_expansion_has_the_derived_coefficients() {
        // (1 - q^50)/((1-q^2)(1-q^4)(1-q^6)) - (q^20 - q^28)/(1-q^2)^3,
        // expanded to order 22. Even coefficients derived by hand from the
        // partition count minus the shifted binomial tail.
        let a = series_expand("q", &[(0, rat_int(1)), (50, rat_int(-1))], &[2, 4, 6], 22).unwrap();
        let b = series_expand("q", &[(20, rat_int(1)), (28, rat_int(-1))], &[2, 2, 2], 22).unwrap();
        let s = a.sub(&b);
        let expected = [1, 1, 2, 3, 4, 5, 7, 8, 10, 12, 13, 13];
        for (m, want) in expected.iter().enumerate() {
            assert_eq!(s.coeff(2 * m), rat_int(*want), "q^{}", 2 * m);
        }
    }

    #[test]
    fn mul_truncates_to_the_shorter_operand() {
        let a = PowerSeries::one("q", 10);
        let b = PowerSeries::one("q", 4);
        assert_eq!(a.mul(&b).truncation(), 4);
        assert_eq!(a.add(&b).truncation(), 4);
    }
}
