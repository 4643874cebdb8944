//! Graded quotient rings presented by homogeneous ideals. Everything is
//! computed degreewise with exact linear algebra: the ideal's span in
//! each degree is the row space of all monomial multiples of the
//! generators, and the quotient keeps the non-pivot monomials as its
//! working basis.

use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::matrix::{nullspace, rank, solve, RatMat};
use crate::poly::{monomial_basis, GradedPoly, Monomial, RingSignature};
use crate::rational::Rat;
use crate::{Error, Result};

/// Row-echelon basis of a subspace, held sparsely and keyed by pivot
/// column. Rows are normalized to a unit pivot but not back-substituted:
/// clearing every pivot column of a vector in one ascending sweep already
/// yields the unique representative supported on the free columns.
struct Echelon {
    rows: std::collections::BTreeMap<usize, Vec<(usize, Rat)>>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: Default::default() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Reduce a sparse row in place against the basis; whatever survives
    /// leads with a fresh pivot column.
    fn sweep(&self, row: &mut std::collections::BTreeMap<usize, Rat>) {
        let mut from = 0usize;
        while let Some((&j, _)) = row.range(from..).next() {
            let Some(pivot_row) = self.rows.get(&j) else {
                from = j + 1;
                continue;
            };
            let factor = row.remove(&j).expect("leading entry");
            for (k, c) in pivot_row.iter().skip(1) {
                let entry = row.entry(*k).or_insert_with(Rat::zero);
                *entry -= &factor * c;
                if entry.is_zero() {
                    row.remove(k);
                }
            }
        }
    }

    /// Sweep and, if anything survives, keep it as a new basis row.
    /// Returns whether the row was independent.
    fn insert(&mut self, mut row: std::collections::BTreeMap<usize, Rat>) -> bool {
        self.sweep(&mut row);
        let Some((&lead, _)) = row.iter().next() else {
            return false;
        };
        let scale = row[&lead].clone();
        let normalized: Vec<(usize, Rat)> =
            row.into_iter().map(|(k, c)| (k, c / &scale)).collect();
        self.rows.insert(lead, normalized);
        true
    }
}

/// A homogeneous ideal, held by its generators.
pub struct GradedIdeal {
    sig: Arc<RingSignature>,
    gens: Vec<GradedPoly>,
}

impl GradedIdeal {
    pub fn new(sig: &Arc<RingSignature>, gens: Vec<GradedPoly>) -> Self {
        for g in &gens {
            assert!(g.signature() == sig, "generators must share the ambient signature");
            assert!(g.is_homogeneous(), "ideal generators must be homogeneous");
        }
        GradedIdeal { sig: sig.clone(), gens }
    }

    pub fn signature(&self) -> &Arc<RingSignature> {
        &self.sig
    }

    pub fn generators(&self) -> &[GradedPoly] {
        &self.gens
    }
}

struct DegreeData {
    basis: Vec<Monomial>,
    span: Echelon,
    complement: Vec<usize>,
}

impl DegreeData {
    /// The unique coset representative supported on non-pivot columns.
    fn reduce(&self, v: Vec<Rat>) -> Vec<Rat> {
        let mut sparse: std::collections::BTreeMap<usize, Rat> =
            v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        self.span.sweep(&mut sparse);
        let mut out = vec![Rat::zero(); self.basis.len()];
        for (k, c) in sparse {
            out[k] = c;
        }
        out
    }
}

/// A graded quotient with per-degree caches, ready through a fixed top
/// degree. Construction does all the linear algebra; queries read the
/// cached reduced row echelon forms.
pub struct QuotientPresentation {
    ideal: GradedIdeal,
    degrees: Vec<DegreeData>,
}

fn degree_data(ideal: &GradedIdeal, d: u32) -> DegreeData {
    let sig = ideal.signature();
    let basis = monomial_basis(sig, d);
    let index: std::collections::BTreeMap<&Monomial, usize> =
        basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows: Vec<std::collections::BTreeMap<usize, Rat>> = Vec::new();
    for g in ideal.generators() {
        let e = match g.max_degree() {
            Some(e) if e <= d => e,
            _ => continue,
        };
        for m in monomial_basis(sig, d - e) {
            let row = g
                .sorted_terms()
                .into_iter()
                .map(|(gm, c)| {
                    let exp: Vec<u16> =
                        gm.0.iter().zip(&m.0).map(|(a, b)| a + b).collect();
                    (index[&Monomial(exp)], c.clone())
                })
                .collect();
            rows.push(row);
        }
    }
    // Inserting in leading-column order keeps most reductions short.
    rows.sort_by_key(|r| r.keys().next().copied().unwrap_or(usize::MAX));
    let mut span = Echelon::new();
    for row in rows {
        span.insert(row);
    }
    let pivot_set: std::collections::BTreeSet<usize> = span.pivots().collect();
    let complement = (0..basis.len()).filter(|i| !pivot_set.contains(i)).collect();
    DegreeData { basis, span, complement }
}

impl QuotientPresentation {
    pub fn new(ideal: GradedIdeal, d_max: u32) -> Self {
        let ds: Vec<u32> = (0..=d_max).collect();
        let degrees = ds.into_par_iter().map(|d| degree_data(&ideal, d)).collect();
        QuotientPresentation { ideal, degrees }
    }

    pub fn ideal(&self) -> &GradedIdeal {
        &self.ideal
    }

    pub fn signature(&self) -> &Arc<RingSignature> {
        self.ideal.signature()
    }

    pub fn top_degree(&self) -> u32 {
        (self.degrees.len() - 1) as u32
    }

    fn data(&self, d: u32) -> &DegreeData {
        assert!(d <= self.top_degree(), "degree {d} not cached");
        &self.degrees[d as usize]
    }

    /// Dimension of the quotient in one degree.
    pub fn dimension(&self, d: u32) -> usize {
        self.data(d).complement.len()
    }

    /// Dimension of the ideal's span in one degree.
    pub fn ideal_dimension(&self, d: u32) -> usize {
        self.data(d).span.rank()
    }

    /// Quotient dimensions for degrees `0..=d_max`.
    pub fn hilbert_function(&self, d_max: u32) -> Vec<i64> {
        (0..=d_max).map(|d| self.dimension(d) as i64).collect()
    }

    /// The monomials representing the quotient in one degree.
    pub fn complement_basis(&self, d: u32) -> Vec<Monomial> {
        let data = self.data(d);
        data.complement.iter().map(|&i| data.basis[i].clone()).collect()
    }

    /// The unique representative supported on the complement monomials.
    /// Linear, idempotent, and kills exactly the ideal's span.
    pub fn normal_form(&self, x: &GradedPoly) -> GradedPoly {
        assert!(x.is_homogeneous(), "normal form needs a homogeneous input");
        let Some(d) = x.max_degree() else {
            return GradedPoly::zero(self.signature());
        };
        let data = self.data(d);
        let reduced = data.reduce(x.coords(&data.basis));
        GradedPoly::from_terms(
            self.signature(),
            data.basis
                .iter()
                .zip(reduced)
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m.0.clone(), c)),
        )
        .expect("exponent width")
    }

    /// Membership test for homogeneous classes within the cached range.
    pub fn contains(&self, x: &GradedPoly) -> bool {
        self.normal_form(x).is_zero()
    }

    /// Coordinates of the normal form on the complement basis.
    pub fn coords(&self, x: &GradedPoly) -> Vec<Rat> {
        assert!(x.is_homogeneous(), "coordinates need a homogeneous input");
        let Some(d) = x.max_degree() else {
            return Vec::new();
        };
        let data = self.data(d);
        let reduced = data.reduce(x.coords(&data.basis));
        data.complement.iter().map(|&i| reduced[i].clone()).collect()
    }

    /// Matrix of the intersection pairing between degrees `k` and
    /// `d_top - k`, in the chosen complement bases, with values in the
    /// one-dimensional degree-`d_top` quotient.
    pub fn pairing_matrix(&self, k: u32, d_top: u32) -> Result<RatMat> {
        if self.dimension(d_top) != 1 {
            return Err(Error::Internal(format!(
                "pairing needs a one-dimensional socle; degree {d_top} has dimension {}",
                self.dimension(d_top)
            )));
        }
        let left = self.complement_polys(k);
        let right = self.complement_polys(d_top - k);
        let mut m = RatMat::new(left.len(), right.len());
        for (i, a) in left.iter().enumerate() {
            for (j, b) in right.iter().enumerate() {
                let c = self.coords(&a.mul(b));
                m.set(i, j, c[0].clone());
            }
        }
        Ok(m)
    }

    /// Basis of the pairing's kernel on the degree-`k` side, lifted to
    /// normal-form polynomials.
    pub fn pairing_kernel(&self, k: u32, d_top: u32) -> Result<Vec<GradedPoly>> {
        let m = self.pairing_matrix(k, d_top)?;
        let mut mt = RatMat::new(m.cols(), m.rows());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                mt.set(j, i, m.at(i, j).clone());
            }
        }
        let basis = self.complement_basis(k);
        let kernel = nullspace(&mt)
            .into_iter()
            .map(|v| {
                GradedPoly::from_terms(
                    self.signature(),
                    basis
                        .iter()
                        .zip(v)
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(m, c)| (m.0.clone(), c)),
                )
                .expect("exponent width")
            })
            .collect();
        Ok(kernel)
    }

    /// The unique combination of the given monomials congruent to `x`
    /// modulo the ideal. Different runs of the same computation may pick
    /// different complement bases; this re-expresses a class on any
    /// preferred support, provided the support is linearly independent in
    /// the quotient and actually spans the coset.
    pub fn representative_on(
        &self,
        x: &GradedPoly,
        support: &[Monomial],
    ) -> Result<GradedPoly> {
        assert!(x.is_homogeneous(), "representative needs a homogeneous input");
        let Some(d) = x.max_degree() else {
            return Ok(GradedPoly::zero(self.signature()));
        };
        let target = self.coords(x);
        let mut a = RatMat::new(target.len(), support.len());
        for (j, m) in support.iter().enumerate() {
            if self.signature().degree_of(&m.0) != d {
                return Err(Error::Internal(format!(
                    "support monomial of degree {} in a degree-{d} rewrite",
                    self.signature().degree_of(&m.0)
                )));
            }
            let p = GradedPoly::from_terms(self.signature(), [(m.0.clone(), Rat::one())])?;
            for (i, c) in self.coords(&p).into_iter().enumerate() {
                a.set(i, j, c);
            }
        }
        if rank(&a) < support.len() {
            return Err(Error::Unsolvable(
                "support monomials are linearly dependent in the quotient".into(),
            ));
        }
        let sol = solve(&a, &target)?;
        GradedPoly::from_terms(
            self.signature(),
            support.iter().zip(sol).map(|(m, c)| (m.0.clone(), c)),
        )
    }

    fn complement_polys(&self, d: u32) -> Vec<GradedPoly> {
        self.complement_basis(d)
            .into_iter()
            .map(|m| {
                GradedPoly::from_terms(self.signature(), [(m.0, Rat::one())])
                    .expect("exponent width")
            })
            .collect()
    }
}

/// Rescale a class so the coefficient of one anchor monomial takes a
/// prescribed value; `None` when that coefficient vanishes and the
/// normalization is meaningless.
pub fn normalize_to_anchor(
    p: &GradedPoly,
    anchor: &[(&str, u16)],
    value: &Rat,
) -> Option<GradedPoly> {
    let have = p.coeff_named(anchor);
    if have.is_zero() {
        return None;
    }
    Some(p.scale(&(value / &have)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::FixtureSet;
    use crate::rational::rat_int;

    fn sig_hcc() -> Arc<RingSignature> {
        RingSignature::new(&[("H", 1), ("c2", 2), ("c3", 3)])
    }

    fn gen(sig: &Arc<RingSignature>, n: &str) -> GradedPoly {
        GradedPoly::generator(sig, n)
    }

    #[test]
    fn zero_ideal_counts_monomials() {
        let sig = sig_hcc();
        let q = QuotientPresentation::new(GradedIdeal::new(&sig, vec![]), 8);
        assert_eq!(q.dimension(5), 5);
        for d in 0..=8u32 {
            assert_eq!(q.dimension(d), monomial_basis(&sig, d).len());
            assert_eq!(q.ideal_dimension(d), 0);
        }
    }

    #[test]
    fn zero_ideal_matches_the_generating_function() {
        let sig = sig_hcc();
        let q = QuotientPresentation::new(GradedIdeal::new(&sig, vec![]), 12);
        // 1 / ((1-t)(1-t^2)(1-t^3)) expanded exactly.
        let trunc = 13usize;
        let mut series = crate::series::PowerSeries::one("t", trunc);
        for w in [1usize, 2, 3] {
            let mut c = vec![0i64; trunc];
            c[0] = 1;
            c[w] = -1;
            series = series.mul(&crate::series::PowerSeries::from_ints("t", &c, trunc).invert().unwrap());
        }
        for d in 0..=12u32 {
            assert_eq!(rat_int(q.dimension(d) as i64), series.coeff(d as usize));
        }
    }

    #[test]
    fn representatives_can_change_support() {
        let sig = RingSignature::new(&[("a", 1), ("b", 1)]);
        let a = gen(&sig, "a");
        let b = gen(&sig, "b");
        let ideal = GradedIdeal::new(&sig, vec![a.pow(2).sub(&b.pow(2))]);
        let q = QuotientPresentation::new(ideal, 4);
        let bb = Monomial(vec![0, 2]);
        let ab = Monomial(vec![1, 1]);
        let rep = q.representative_on(&a.pow(2), &[bb.clone(), ab.clone()]).unwrap();
        assert_eq!(rep, b.pow(2));
        // a^2 and b^2 agree in the quotient, so together they are dependent.
        let aa = Monomial(vec![2, 0]);
        assert!(q.representative_on(&a.pow(2), &[aa, bb]).is_err());
        // A support that misses the coset is unsolvable.
        assert!(q.representative_on(&a.mul(&b), &[Monomial(vec![0, 2])]).is_err());
    }

    #[test]
    fn ideal_and_quotient_dimensions_are_complementary() {
        let sig = sig_hcc();
        let h = gen(&sig, "H");
        let c2 = gen(&sig, "c2");
        let ideal = GradedIdeal::new(&sig, vec![h.pow(2), c2.mul(&h).scale(&rat_int(3))]);
        let q = QuotientPresentation::new(ideal, 10);
        for d in 0..=10u32 {
            assert_eq!(
                q.ideal_dimension(d) + q.dimension(d),
                monomial_basis(&sig, d).len(),
                "degree {d}"
            );
        }
    }

    #[test]
    fn joint_kernel_ideal_span_dimensions() {
        let sig = sig_hcc();
        let h = gen(&sig, "H");
        let c2 = gen(&sig, "c2");
        let c3 = gen(&sig, "c3");
        let disc = c2.pow(3).scale(&rat_int(4)).add(&c3.pow(2).scale(&rat_int(27)));
        let ideal = GradedIdeal::new(&sig, vec![h.pow(2), h.mul(&disc), h.pow(28)]);
        let q = QuotientPresentation::new(ideal, 11);
        let expected = FixtureSet::bundled().series("joint_kernel_ideal").expect("fixture");
        for k in 0..=11u32 {
            let want = expected.get(2 * k as usize).copied().unwrap_or(0);
            assert_eq!(q.ideal_dimension(k) as i64, want, "ideal span in degree {k}");
        }
    }

    #[test]
    fn normal_forms_kill_the_ideal_and_are_idempotent() {
        let sig = sig_hcc();
        let h = gen(&sig, "H");
        let c2 = gen(&sig, "c2");
        let c3 = gen(&sig, "c3");
        let g1 = h.pow(2).add(&c2);
        let g2 = c3.add(&h.mul(&c2));
        let ideal = GradedIdeal::new(&sig, vec![g1.clone(), g2.clone()]);
        let q = QuotientPresentation::new(ideal, 9);
        assert!(q.normal_form(&g1).is_zero());
        assert!(q.normal_form(&g2).is_zero());
        let x = h.pow(3).add(&c3.scale(&rat_int(7)));
        let nf = q.normal_form(&x);
        assert_eq!(q.normal_form(&nf), nf);
        // Adding ideal elements does not change the normal form.
        let shifted = x.add(&g2.scale(&rat_int(2))).sub(&g1.mul(&h).scale(&rat_int(5)));
        assert_eq!(q.normal_form(&shifted), nf);
        assert!(q.contains(&x.sub(&nf)));
    }

    #[test]
    fn toy_gorenstein_pairing_is_perfect() {
        let sig = RingSignature::new(&[("a", 1), ("b", 1)]);
        let a = gen(&sig, "a");
        let b = gen(&sig, "b");
        let ideal = GradedIdeal::new(&sig, vec![a.pow(3), b.pow(3)]);
        let q = QuotientPresentation::new(ideal, 4);
        assert_eq!(q.hilbert_function(4), vec![1, 2, 3, 2, 1]);
        for k in 0..=4u32 {
            let m = q.pairing_matrix(k, 4).expect("socle is one-dimensional");
            assert_eq!(crate::matrix::rank(&m), q.dimension(k).min(q.dimension(4 - k)));
            assert!(q.pairing_kernel(k, 4).expect("kernel").is_empty());
        }
    }

    #[test]
    fn pairing_matrices_transpose_under_side_exchange() {
        let sig = RingSignature::new(&[("a", 1), ("b", 1)]);
        let a = gen(&sig, "a");
        let b = gen(&sig, "b");
        let ideal = GradedIdeal::new(&sig, vec![a.pow(3), b.pow(3)]);
        let q = QuotientPresentation::new(ideal, 4);
        for k in 0..=4u32 {
            let m = q.pairing_matrix(k, 4).unwrap();
            let n = q.pairing_matrix(4 - k, 4).unwrap();
            assert_eq!(m.rows(), n.cols());
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    assert_eq!(m.at(i, j), n.at(j, i));
                }
            }
        }
    }

    #[test]
    fn degenerate_pairing_detects_its_kernel() {
        // With ab = b^2 = 0 the class b pairs to zero against everything.
        let sig = RingSignature::new(&[("a", 1), ("b", 1)]);
        let a = gen(&sig, "a");
        let b = gen(&sig, "b");
        let ideal = GradedIdeal::new(&sig, vec![a.mul(&b), b.pow(2)]);
        let q = QuotientPresentation::new(ideal, 2);
        assert_eq!(q.dimension(2), 1);
        let m = q.pairing_matrix(1, 2).expect("socle is one-dimensional");
        assert_eq!(crate::matrix::rank(&m), 1);
        let kernel = q.pairing_kernel(1, 2).expect("kernel");
        assert_eq!(kernel.len(), 1);
        let scale = kernel[0].coeff_named(&[("b", 1)]);
        assert!(!scale.is_zero());
        assert_eq!(kernel[0], b.scale(&scale));
    }

    #[test]
    fn socle_error_mentions_the_degree() {
        let sig = RingSignature::new(&[("a", 1), ("b", 1)]);
        let q = QuotientPresentation::new(GradedIdeal::new(&sig, vec![]), 3);
        let err = q.pairing_matrix(1, 3).unwrap_err();
        assert!(err.to_string().contains("degree 3"));
    }

    #[test]
    fn anchor_normalization() {
        let sig = sig_hcc();
        let p = gen(&sig, "H").pow(2).scale(&rat_int(3)).add(&gen(&sig, "c2"));
        let n = normalize_to_anchor(&p, &[("H", 2)], &rat_int(-6)).expect("anchor present");
        assert_eq!(n.coeff_named(&[("H", 2)]), rat_int(-6));
        assert_eq!(n.coeff_named(&[("c2", 1)]), rat_int(-2));
        assert!(normalize_to_anchor(&gen(&sig, "c2"), &[("H", 2)], &rat_int(1)).is_none());
    }
}
