//! Sparse multivariate polynomials graded by weighted total degree.
//!
//! A [`RingSignature`] fixes an ordered list of generators with positive
//! integer degrees, e.g. `{H:1, c2:2, c3:3}`. A [`GradedPoly`] is a sparse
//! term map over such a signature together with an optional truncation order.
//!
//! Invariants:
//! * no zero coefficients are stored;
//! * every exponent vector has the signature's length;
//! * when `trunc = Some(d)`, no stored term has weighted degree `> d`;
//! * multiplication intersects truncations (`min`), addition requires equal
//!   signatures and intersects truncations as well.
//!
//! Canonical term order (used by rendering, JSON output and
//! [`monomial_basis`]): ascending weighted degree, then descending
//! lexicographic on the exponent vector. This matches the basis order
//! `{H^5, H^3 c2, H^2 c3, H c2^2, c2 c3}` in degree 5 over `{H, c2, c3}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::rational::{rat_int, rat_parse, rat_render, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSignature {
    gens: Vec<(String, u32)>,
}

impl RingSignature {
    pub fn new(gens: &[(&str, u32)]) -> Arc<Self> {
        assert!(!gens.is_empty(), "signature needs at least one generator");
        for (name, w) in gens {
            assert!(*w > 0, "generator {name} must have positive degree");
        }
        let mut seen = std::collections::BTreeSet::new();
        for (name, _) in gens {
            assert!(seen.insert(*name), "duplicate generator {name}");
        }
        Arc::new(RingSignature {
            gens: gens.iter().map(|(n, w)| (n.to_string(), *w)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.gens[i].0
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.gens[i].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|(n, _)| n == name)
    }

    pub fn degree_of(&self, exp: &[u16]) -> u32 {
        exp.iter()
            .zip(&self.gens)
            .map(|(e, (_, w))| u32::from(*e) * w)
            .sum()
    }

    pub fn gens(&self) -> impl Iterator<Item = (&str, u32)> {
        self.gens.iter().map(|(n, w)| (n.as_str(), *w))
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.gens.iter().map(|(n, w)| format!("{n}:{w}")).collect();
        format!("[{}]", parts.join(", "))
    }
}

/// Exponent vector. The derived `Ord` (plain lexicographic on the vector) is
/// only used for deterministic map storage; ranking by degree goes through
/// [`cmp_graded`] which needs the signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn unit(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.0[i]
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }
}

/// Canonical order: ascending weighted degree, then descending lex.
pub fn cmp_graded(sig: &RingSignature, a: &Monomial, b: &Monomial) -> Ordering {
    let da = sig.degree_of(&a.0);
    let db = sig.degree_of(&b.0);
    da.cmp(&db).then_with(|| b.0.cmp(&a.0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPoly {
    sig: Arc<RingSignature>,
    terms: BTreeMap<Monomial, Rat>,
    trunc: Option<u32>,
}

impl GradedPoly {
    pub fn zero(sig: &Arc<RingSignature>) -> Self {
        GradedPoly { sig: sig.clone(), terms: BTreeMap::new(), trunc: None }
    }

    pub fn one(sig: &Arc<RingSignature>) -> Self {
        Self::constant(sig, rat_int(1))
    }

    pub fn constant(sig: &Arc<RingSignature>, c: Rat) -> Self {
        let mut p = Self::zero(sig);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(sig.len()), c);
        }
        p
    }

    /// The generator named `name`, as a polynomial.
    pub fn generator(sig: &Arc<RingSignature>, name: &str) -> Self {
        let i = sig
            .index_of(name)
            .unwrap_or_else(|| panic!("no generator {name} in {}", sig.describe()));
        let mut exp = vec![0u16; sig.len()];
        exp[i] = 1;
        let mut p = Self::zero(sig);
        p.terms.insert(Monomial(exp), rat_int(1));
        p
    }

    pub fn from_terms(
        sig: &Arc<RingSignature>,
        terms: impl IntoIterator<Item = (Vec<u16>, Rat)>,
    ) -> Result<Self> {
        let mut p = Self::zero(sig);
        for (exp, c) in terms {
            if exp.len() != sig.len() {
                return Err(Error::MalformedExponent { expected: sig.len(), got: exp.len() });
            }
            p.add_term(Monomial(exp), c);
        }
        Ok(p)
    }

    pub fn signature(&self) -> &Arc<RingSignature> {
        &self.sig
    }

    pub fn truncation(&self) -> Option<u32> {
        self.trunc
    }

    /// Drop all terms of weighted degree `> d` and record the truncation.
    pub fn truncate(mut self, d: u32) -> Self {
        self.terms.retain(|m, _| self.sig.degree_of(&m.0) <= d);
        self.trunc = Some(match self.trunc {
            Some(t) => t.min(d),
            None => d,
        });
        self
    }

    /// Forget the truncation marker (the terms are kept as-is).
    pub fn untruncated(mut self) -> Self {
        self.trunc = None;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u16]) -> Rat {
        self.terms.get(&Monomial(exp.to_vec())).cloned().unwrap_or_else(Rat::zero)
    }

    /// Coefficient of a monomial written as `(name, exponent)` pairs.
    pub fn coeff_named(&self, factors: &[(&str, u16)]) -> Rat {
        let mut exp = vec![0u16; self.sig.len()];
        for (name, e) in factors {
            let i = self.sig.index_of(name).expect("unknown generator");
            exp[i] = *e;
        }
        self.coeff(&exp)
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        if let Some(t) = self.trunc {
            if self.sig.degree_of(&m.0) > t {
                return;
            }
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn assert_same_sig(&self, other: &GradedPoly) {
        assert!(
            self.sig == other.sig,
            "signature mismatch: {} vs {}",
            self.sig.describe(),
            other.sig.describe()
        );
    }

    fn merge_trunc(a: Option<u32>, b: Option<u32>) -> Option<u32> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        }
    }

    pub fn add(&self, other: &GradedPoly) -> GradedPoly {
        self.assert_same_sig(other);
        let trunc = Self::merge_trunc(self.trunc, other.trunc);
        let mut out = GradedPoly { sig: self.sig.clone(), terms: self.terms.clone(), trunc };
        if let Some(t) = trunc {
            out.terms.retain(|m, _| out.sig.degree_of(&m.0) <= t);
        }
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GradedPoly) -> GradedPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedPoly {
        GradedPoly {
            sig: self.sig.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &Rat) -> GradedPoly {
        if c.is_zero() {
            let mut z = GradedPoly::zero(&self.sig);
            z.trunc = self.trunc;
            return z;
        }
        GradedPoly {
            sig: self.sig.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn mul(&self, other: &GradedPoly) -> GradedPoly {
        self.assert_same_sig(other);
        let trunc = Self::merge_trunc(self.trunc, other.trunc);
        let mut out = GradedPoly { sig: self.sig.clone(), terms: BTreeMap::new(), trunc };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> GradedPoly {
        let mut out = GradedPoly::one(&self.sig);
        out.trunc = self.trunc;
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// The homogeneous part of weighted degree `d`.
    pub fn homogeneous_component(&self, d: u32) -> GradedPoly {
        GradedPoly {
            sig: self.sig.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| self.sig.degree_of(&m.0) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            trunc: self.trunc,
        }
    }

    /// All nonzero homogeneous parts, keyed by degree.
    pub fn components(&self) -> BTreeMap<u32, GradedPoly> {
        let mut out: BTreeMap<u32, GradedPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = self.sig.degree_of(&m.0);
            out.entry(d)
                .or_insert_with(|| {
                    let mut z = GradedPoly::zero(&self.sig);
                    z.trunc = self.trunc;
                    z
                })
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Largest weighted degree of a stored term (`None` for the zero poly).
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| self.sig.degree_of(&m.0)).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| self.sig.degree_of(&m.0));
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    /// Substitute `images[i]` for generator `i`. All images must share one
    /// signature, which becomes the signature of the result.
    pub fn substitute(&self, images: &[GradedPoly]) -> GradedPoly {
        assert_eq!(images.len(), self.sig.len(), "one image per generator");
        let target = images
            .first()
            .map(|p| p.sig.clone())
            .expect("signature needs at least one generator");
        for im in images {
            assert!(im.sig == target, "images must share a signature");
        }
        let trunc = images.iter().fold(None, |acc, im| Self::merge_trunc(acc, im.trunc));
        let mut out = GradedPoly { sig: target.clone(), terms: BTreeMap::new(), trunc };
        // Cache generator powers; exponents in this codebase stay small.
        let mut powers: Vec<BTreeMap<u16, GradedPoly>> = vec![BTreeMap::new(); images.len()];
        for (m, c) in &self.terms {
            let mut term = GradedPoly::constant(&target, c.clone());
            term.trunc = trunc;
            for (i, e) in m.0.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                let p = powers[i]
                    .entry(*e)
                    .or_insert_with(|| images[i].pow(u32::from(*e)))
                    .clone();
                term = term.mul(&p);
            }
            out = out.add(&term);
        }
        out
    }

    /// Evaluate at rational values for every generator.
    pub fn eval_rat(&self, values: &[Rat]) -> Rat {
        assert_eq!(values.len(), self.sig.len());
        let mut total = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.0.iter().enumerate() {
                for _ in 0..*e {
                    t *= &values[i];
                }
            }
            total += t;
        }
        total
    }

    /// Multiplicative inverse through weighted degree `order`. Requires a
    /// nonzero constant term; the result carries `trunc = Some(order)`.
    pub fn inverse_up_to(&self, order: u32) -> Result<GradedPoly> {
        let c0 = self.coeff(&vec![0u16; self.sig.len()]);
        if c0.is_zero() {
            return Err(Error::NonUnit(format!("constant term 0 in {self}")));
        }
        let a = self.clone().truncate(order);
        let inv_c0 = Rat::one() / c0;
        // b_0 = 1/a_0; b_k = -(sum_{j=1..k} a_j b_{k-j}) / a_0 degreewise.
        let a_comp = a.components();
        let mut b_comp: Vec<GradedPoly> = Vec::with_capacity(order as usize + 1);
        b_comp.push(GradedPoly::constant(&self.sig, inv_c0.clone()).truncate(order));
        for k in 1..=order {
            let mut acc = GradedPoly::zero(&self.sig).truncate(order);
            for j in 1..=k {
                if let Some(aj) = a_comp.get(&j) {
                    acc = acc.add(&aj.mul(&b_comp[(k - j) as usize]));
                }
            }
            b_comp.push(acc.neg().scale(&inv_c0));
        }
        let mut out = GradedPoly::zero(&self.sig).truncate(order);
        for b in b_comp {
            out = out.add(&b);
        }
        Ok(out)
    }

    /// Terms in canonical order (degree ascending, lex descending).
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rat)> {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| cmp_graded(&self.sig, a, b));
        terms
    }

    /// Coefficient vector with respect to an ordered monomial basis; the basis
    /// must cover every stored term of that degree.
    pub fn coords(&self, basis: &[Monomial]) -> Vec<Rat> {
        basis.iter().map(|m| self.terms.get(m).cloned().unwrap_or_else(Rat::zero)).collect()
    }

    // ---- serialization ----

    pub fn to_json(&self) -> Value {
        let sig: Vec<Value> = self.sig.gens().map(|(n, w)| json!([n, w])).collect();
        let terms: Vec<Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| {
                json!({
                    "exp": m.0,
                    "num": c.numer().to_string(),
                    "den": c.denom().to_string(),
                })
            })
            .collect();
        json!({ "signature": sig, "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<GradedPoly> {
        let sig_v = v
            .get("signature")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("polynomial JSON needs a signature array".into()))?;
        let mut gens: Vec<(String, u32)> = Vec::new();
        for g in sig_v {
            let pair = g
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Parse("signature entries are [name, degree]".into()))?;
            let name = pair[0]
                .as_str()
                .ok_or_else(|| Error::Parse("generator name must be a string".into()))?;
            let w = pair[1]
                .as_u64()
                .filter(|w| *w > 0)
                .ok_or_else(|| Error::Parse("generator degree must be positive".into()))?;
            gens.push((name.to_string(), w as u32));
        }
        let gens_ref: Vec<(&str, u32)> = gens.iter().map(|(n, w)| (n.as_str(), *w)).collect();
        let sig = RingSignature::new(&gens_ref);
        let terms_v = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("polynomial JSON needs a terms array".into()))?;
        let mut terms = Vec::new();
        for t in terms_v {
            let exp_v = t
                .get("exp")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("term needs an exp array".into()))?;
            let mut exp = Vec::with_capacity(exp_v.len());
            for e in exp_v {
                let e = e
                    .as_u64()
                    .filter(|e| *e <= u64::from(u16::MAX))
                    .ok_or_else(|| Error::Parse("exponent out of range".into()))?;
                exp.push(e as u16);
            }
            let num = t
                .get("num")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse("term needs a num string".into()))?;
            let den = t
                .get("den")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse("term needs a den string".into()))?;
            terms.push((exp, rat_parse(&format!("{num}/{den}"))?));
        }
        GradedPoly::from_terms(&sig, terms)
    }

    /// Parse the canonical text form, e.g. `-646575*H^9 + 1/2*c2*c3^2`.
    /// `*` between factors is optional; whitespace separates tokens freely.
    pub fn parse_text(sig: &Arc<RingSignature>, text: &str) -> Result<GradedPoly> {
        let mut out = GradedPoly::zero(sig);
        let cleaned: String = text.replace(['\n', '\t'], " ");
        let mut rest = cleaned.trim();
        if rest.is_empty() {
            return Ok(out);
        }
        let mut first = true;
        while !rest.is_empty() {
            let (sign, after_sign) = match rest.as_bytes()[0] {
                b'+' => (1i64, rest[1..].trim_start()),
                b'-' => (-1i64, rest[1..].trim_start()),
                _ if first => (1i64, rest),
                _ => {
                    return Err(Error::Parse(format!("expected + or - before {rest:?}")));
                }
            };
            first = false;
            // A term ends at the next top-level + or - (no parentheses here).
            let end = after_sign
                .char_indices()
                .find(|(i, c)| (*c == '+' || *c == '-') && *i > 0)
                .map(|(i, _)| i)
                .unwrap_or(after_sign.len());
            let (term_s, tail) = after_sign.split_at(end);
            let (m, c) = Self::parse_term(sig, term_s.trim())?;
            out.add_term(m, c * rat_int(sign));
            rest = tail.trim_start();
        }
        Ok(out)
    }

    fn parse_term(sig: &Arc<RingSignature>, term: &str) -> Result<(Monomial, Rat)> {
        if term.is_empty() {
            return Err(Error::Parse("empty term".into()));
        }
        let mut coeff = Rat::one();
        let mut exp = vec![0u16; sig.len()];
        for factor in term.split(['*', ' ']).filter(|f| !f.is_empty()) {
            let bytes = factor.as_bytes();
            if bytes[0].is_ascii_digit() {
                coeff *= rat_parse(factor)?;
                continue;
            }
            let (name, power) = match factor.split_once('^') {
                Some((n, p)) => {
                    let p: u16 = p
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?;
                    (n, p)
                }
                None => (factor, 1),
            };
            let i = sig
                .index_of(name)
                .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))?;
            exp[i] = exp[i]
                .checked_add(power)
                .ok_or_else(|| Error::Parse("exponent overflow".into()))?;
        }
        Ok((Monomial(exp), coeff))
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c < &Rat::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = m.0.iter().all(|e| *e == 0);
            if !mag.is_one() || is_const {
                factors.push(rat_render(&mag));
            }
            for (i, e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.sig.name(i).to_string()),
                    _ => factors.push(format!("{}^{}", self.sig.name(i), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// All monomials of weighted degree exactly `d`, in canonical order.
pub fn monomial_basis(sig: &Arc<RingSignature>, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exp = vec![0u16; sig.len()];
    fn rec(sig: &RingSignature, i: usize, left: u32, exp: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if i == sig.len() {
            if left == 0 {
                out.push(Monomial(exp.clone()));
            }
            return;
        }
        let w = sig.weight(i);
        let max = left / w;
        for e in 0..=max {
            exp[i] = e as u16;
            rec(sig, i + 1, left - e * w, exp, out);
        }
        exp[i] = 0;
    }
    rec(sig, 0, d, &mut exp, &mut out);
    out.sort_by(|a, b| cmp_graded(sig, a, b));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn sig_hc() -> Arc<RingSignature> {
        RingSignature::new(&[("H", 1), ("c2", 2), ("c3", 3)])
    }

    fn h(sig: &Arc<RingSignature>) -> GradedPoly {
        GradedPoly::generator(sig, "H")
    }

    #[test]
    fn ring_laws_hold_on_small_values() {
        let s = sig_hc();
        let p = h(&s).add(&GradedPoly::generator(&s, "c2"));
        let q = GradedPoly::generator(&s, "c3").sub(&GradedPoly::one(&s));
        let r = h(&s).pow(2);
        // distributivity and associativity
        assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        // zero annihilates, one is neutral
        assert_eq!(p.mul(&GradedPoly::zero(&s)), GradedPoly::zero(&s));
        assert_eq!(p.mul(&GradedPoly::one(&s)), p);
    }

    #[test]
    fn no_zero_terms_survive_cancellation() {
        let s = sig_hc();
        let p = h(&s).sub(&h(&s));
        assert!(p.is_zero());
        let q = h(&s).add(&GradedPoly::generator(&s, "c2"));
        let diff = q.sub(&q);
        assert_eq!(diff.len(), 0);
    }

    #[test]
    fn multiplication_intersects_truncations() {
        let s = sig_hc();
        let p = h(&s).add(&GradedPoly::one(&s)).truncate(5);
        let q = GradedPoly::generator(&s, "c2").add(&GradedPoly::one(&s)).truncate(3);
        let prod = p.mul(&q);
        assert_eq!(prod.truncation(), Some(3));
        assert!(prod.max_degree().unwrap() <= 3);
    }

    #[test]
    fn monomial_basis_matches_expected_order_in_degree_5() {
        let s = sig_hc();
        let basis = monomial_basis(&s, 5);
        let names: Vec<String> = basis
            .iter()
            .map(|m| {
                let mut p = GradedPoly::zero(&s);
                p.add_term(m.clone(), rat_int(1));
                p.to_string()
            })
            .collect();
        assert_eq!(names, vec!["H^5", "H^3*c2", "H^2*c3", "H*c2^2", "c2*c3"]);
    }

    #[test]
    fn monomial_basis_agrees_with_brute_force_count() {
        // Oracle: count integer points of {a + 2b + 3c = d} by triple loop.
        let s = sig_hc();
        for d in 0..=12u32 {
            let mut count = 0;
            for a in 0..=d {
                for b in 0..=d / 2 {
                    for c in 0..=d / 3 {
                        if a + 2 * b + 3 * c == d {
                            count += 1;
                        }
                    }
                }
            }
            assert_eq!(monomial_basis(&s, d).len(), count as usize, "degree {d}");
        }
    }

    #[test]
    fn substitution_is_a_ring_map() {
        let s = sig_hc();
        let t = RingSignature::new(&[("x", 1), ("y", 1)]);
        let images = vec![
            GradedPoly::generator(&t, "x").add(&GradedPoly::generator(&t, "y")),
            GradedPoly::generator(&t, "x").mul(&GradedPoly::generator(&t, "y")),
            GradedPoly::generator(&t, "y").pow(3),
        ];
        let p = h(&s).mul(&GradedPoly::generator(&s, "c2"));
        let q = GradedPoly::generator(&s, "c3").add(&h(&s));
        let lhs = p.mul(&q).substitute(&images);
        let rhs = p.substitute(&images).mul(&q.substitute(&images));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_up_to_matches_long_division_oracle() {
        let s = sig_hc();
        // 1/(1 + H + c2): long-division oracle computed degree by degree.
        let u = GradedPoly::one(&s).add(&h(&s)).add(&GradedPoly::generator(&s, "c2"));
        let inv = u.inverse_up_to(7).unwrap();
        let prod = u.mul(&inv);
        assert_eq!(prod.homogeneous_component(0), GradedPoly::one(&s).truncate(7));
        for d in 1..=7 {
            assert!(prod.homogeneous_component(d).is_zero(), "degree {d} residue");
        }
        // Non-unit rejection.
        assert!(h(&s).inverse_up_to(3).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let s = sig_hc();
        let p = h(&s)
            .pow(9)
            .scale(&rat(-646575, 1))
            .add(&GradedPoly::generator(&s, "c2").mul(&GradedPoly::generator(&s, "c3")).scale(&rat(7, 3)));
        let v = p.to_json();
        let q = GradedPoly::from_json(&v).unwrap();
        assert_eq!(p, q);
        assert_eq!(serde_json::to_string(&v).unwrap(), serde_json::to_string(&q.to_json()).unwrap());
    }

    #[test]
    fn text_round_trip_parses_what_display_renders() {
        let s = sig_hc();
        let p = h(&s)
            .pow(3)
            .sub(&GradedPoly::generator(&s, "c3").scale(&rat(1, 2)))
            .add(&GradedPoly::constant(&s, rat(22, 7)));
        let text = p.to_string();
        let q = GradedPoly::parse_text(&s, &text).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn text_parser_accepts_space_separated_factors() {
        let s = sig_hc();
        let p = GradedPoly::parse_text(&s, "3 H^2 c2 - c3").unwrap();
        assert_eq!(p.coeff_named(&[("H", 2), ("c2", 1)]), rat_int(3));
        assert_eq!(p.coeff_named(&[("c3", 1)]), rat_int(-1));
    }

    #[test]
    fn text_parser_rejects_unknown_generators() {
        let s = sig_hc();
        assert!(GradedPoly::parse_text(&s, "2*q^3").is_err());
    }

    #[test]
    fn homogeneous_components_partition_the_poly() {
        let s = sig_hc();
        let p = h(&s)
            .pow(2)
            .add(&GradedPoly::generator(&s, "c2"))
            .add(&GradedPoly::generator(&s, "c3").mul(&h(&s)))
            .add(&GradedPoly::one(&s));
        let mut sum = GradedPoly::zero(&s);
        for (_, part) in p.components() {
            assert!(part.is_homogeneous());
            sum = sum.add(&part);
        }
        assert_eq!(sum, p);
    }
}
