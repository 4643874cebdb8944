//! Committed copies of every printed polynomial and series the engine must
//! reproduce, plus the comparison helpers used by `verify` and the test suite.
//!
//! Each fixture is a small JSON file under `fixtures/` with `"schema": 1`,
//! a `"kind"` of `"polynomial"` or `"series"`, and the value itself either as
//! polynomial text over an explicit signature or as a coefficient list.
//! Comparisons are exact; a mismatch reports the first differing monomial in
//! canonical order together with both coefficients.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_traits::Zero;
use serde_json::Value;

use crate::poly::{GradedPoly, Monomial, RingSignature};
use crate::rational::Rat;
use crate::{Error, Result};

/// Environment variable that overrides the fixture directory.
pub const FIXTURE_DIR_VAR: &str = "K3CHOW_FIXTURES";

/// A directory of fixture files, addressed by file stem.
#[derive(Debug, Clone)]
pub struct FixtureSet {
    dir: PathBuf,
}

impl FixtureSet {
    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// The fixtures committed with the crate, unless the environment variable
    /// points somewhere else.
    pub fn bundled() -> Self {
        match env::var(FIXTURE_DIR_VAR) {
            Ok(dir) if !dir.is_empty() => Self::at(dir),
            _ => Self::at(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn raw(&self, name: &str) -> Result<Value> {
        let path = self.dir.join(format!("{name}.json"));
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Fixture(format!("{name}: invalid JSON: {e}")))?;
        match value.get("schema").and_then(Value::as_u64) {
            Some(1) => Ok(value),
            other => Err(Error::Fixture(format!("{name}: unsupported schema {other:?}"))),
        }
    }

    fn kind<'v>(&self, name: &str, value: &'v Value, want: &str) -> Result<&'v Value> {
        match value.get("kind").and_then(Value::as_str) {
            Some(kind) if kind == want => Ok(value),
            other => Err(Error::Fixture(format!("{name}: expected kind {want:?}, found {other:?}"))),
        }
    }

    /// Load a polynomial fixture over its own signature.
    pub fn polynomial(&self, name: &str) -> Result<GradedPoly> {
        let value = self.raw(name)?;
        self.kind(name, &value, "polynomial")?;
        let sig = parse_signature(name, &value)?;
        let text = value
            .get("polynomial")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Fixture(format!("{name}: missing polynomial text")))?;
        GradedPoly::parse_text(&sig, text)
    }

    /// Load a series fixture as its coefficient list.
    pub fn series(&self, name: &str) -> Result<Vec<i64>> {
        let value = self.raw(name)?;
        self.kind(name, &value, "series")?;
        let coeffs = value
            .get("coefficients")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Fixture(format!("{name}: missing coefficient list")))?;
        coeffs
            .iter()
            .map(|c| {
                c.as_i64()
                    .ok_or_else(|| Error::Fixture(format!("{name}: non-integer coefficient {c}")))
            })
            .collect()
    }

    /// Compare a computed polynomial against a fixture, reporting the first
    /// differing monomial on mismatch.
    pub fn expect_polynomial(&self, name: &str, computed: &GradedPoly) -> Result<()> {
        let expected = self.polynomial(name)?;
        require_equal(name, &expected, computed)
    }

    /// Compare a computed coefficient list against a series fixture.
    /// Trailing zeros on either side are immaterial.
    pub fn expect_series(&self, name: &str, computed: &[i64]) -> Result<()> {
        let expected = self.series(name)?;
        require_series_equal(name, &expected, computed)
    }

    /// Sorted stems of every fixture file in the directory.
    pub fn names(&self) -> Result<Vec<String>> {
        let entries = fs::read_dir(&self.dir)
            .map_err(|e| Error::Fixture(format!("{}: {e}", self.dir.display())))?;
        let mut names = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::Fixture(e.to_string()))?.path();
            if path.extension().is_some_and(|e| e == "json") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    names.push(stem.to_string());
                }
            }
        }
        names.sort();
        Ok(names)
    }
}

/// The first structural difference between two polynomials, in canonical
/// (degree, then lexicographic) monomial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub monomial: String,
    pub expected: Rat,
    pub computed: Rat,
}

pub fn first_difference(expected: &GradedPoly, computed: &GradedPoly) -> Option<Mismatch> {
    let sig = expected.signature();
    let mut monomials: Vec<&Monomial> =
        expected.sorted_terms().into_iter().map(|(m, _)| m).collect();
    for (m, _) in computed.sorted_terms() {
        if expected.coeff(&m.0).is_zero() {
            monomials.push(m);
        }
    }
    monomials.sort_by(|a, b| crate::poly::cmp_graded(sig, a, b));
    for m in monomials {
        let e = expected.coeff(&m.0);
        let c = computed.coeff(&m.0);
        if e != c {
            return Some(Mismatch { monomial: monomial_label(sig, m), expected: e, computed: c });
        }
    }
    None
}

pub fn require_equal(name: &str, expected: &GradedPoly, computed: &GradedPoly) -> Result<()> {
    if expected.signature() != computed.signature() {
        return Err(Error::SignatureMismatch {
            left: format!("{:?}", expected.signature()),
            right: format!("{:?}", computed.signature()),
        });
    }
    match first_difference(expected, computed) {
        None => Ok(()),
        Some(d) => Err(Error::Fixture(format!(
            "{name}: coefficient of {} should be {}, computed {}",
            d.monomial, d.expected, d.computed
        ))),
    }
}

pub fn require_series_equal(name: &str, expected: &[i64], computed: &[i64]) -> Result<()> {
    let len = expected.len().max(computed.len());
    for k in 0..len {
        let e = expected.get(k).copied().unwrap_or(0);
        let c = computed.get(k).copied().unwrap_or(0);
        if e != c {
            return Err(Error::Fixture(format!(
                "{name}: coefficient of q^{k} should be {e}, computed {c}"
            )));
        }
    }
    Ok(())
}

fn parse_signature(name: &str, value: &Value) -> Result<Arc<RingSignature>> {
    let sig_v = value
        .get("signature")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Fixture(format!("{name}: missing signature")))?;
    let mut gens = Vec::new();
    for pair in sig_v {
        let entry = pair
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Fixture(format!("{name}: signature entries are [name, degree]")))?;
        let gen_name = entry[0]
            .as_str()
            .ok_or_else(|| Error::Fixture(format!("{name}: generator name must be a string")))?;
        let weight = entry[1]
            .as_u64()
            .filter(|w| *w > 0)
            .ok_or_else(|| Error::Fixture(format!("{name}: generator degree must be positive")))?;
        gens.push((gen_name.to_string(), weight as u32));
    }
    let gens_ref: Vec<(&str, u32)> = gens.iter().map(|(n, w)| (n.as_str(), *w)).collect();
    Ok(RingSignature::new(&gens_ref))
}

fn monomial_label(sig: &Arc<RingSignature>, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(sig.name(i).to_string()),
            _ => parts.push(format!("{}^{}", sig.name(i), e)),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}
