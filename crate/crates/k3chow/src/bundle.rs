//! Chern and Segre calculus for equivariant vector bundles.
//!
//! A [`BundleClass`] is a rank together with the Chern classes `c_1 .. c_r`
//! as homogeneous polynomials over a shared base signature. Operations:
//! duals, direct sums (Whitney), tensor by a line class, symmetric powers of
//! bundles of rank at most 3, formal quotients (kernel bundles), Segre
//! classes, and the weighted variants used by the weighted blowup: the
//! weighted Chern polynomial `P(t) = prod_w prod_roots (w t + root)` of a sum
//! of weighted summands, and the weighted Segre class `1 / P(1)`.
//!
//! Symmetric powers go through the splitting principle: the Chern classes of
//! `Sym^k` of the universal rank-`r` bundle are computed once as polynomials
//! in the elementary symmetric classes `e_1 .. e_r` (degreewise linear solve
//! against a formal-root expansion) and then evaluated at the concrete
//! `c_i(E)`. Results are cached per `(r, k)`.
//!
//! Invariants: `c_0 = 1`; `c_i` is homogeneous of degree `i`; all Chern
//! classes of one bundle share a signature.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;

use crate::matrix::{solve, RatMat};
use crate::poly::{monomial_basis, GradedPoly, RingSignature};
use crate::rational::{rat_int, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleClass {
    rank: u32,
    sig: Arc<RingSignature>,
    chern: Vec<GradedPoly>, // index i = c_i, length rank + 1, chern[0] = 1
}

impl BundleClass {
    /// Build from `c_1 .. c_r` (shorter lists are padded with zeros).
    pub fn new(rank: u32, sig: &Arc<RingSignature>, classes: Vec<GradedPoly>) -> Self {
        assert!(classes.len() <= rank as usize, "more Chern classes than rank");
        let mut chern = Vec::with_capacity(rank as usize + 1);
        chern.push(GradedPoly::one(sig));
        for (i, c) in classes.iter().enumerate() {
            assert!(c.signature() == sig, "Chern classes must share the base signature");
            assert!(
                c.is_homogeneous()
                    && c.max_degree().map_or(true, |d| d == i as u32 + 1),
                "c_{} must be homogeneous of degree {}",
                i + 1,
                i + 1
            );
            chern.push(c.clone());
        }
        chern.resize(rank as usize + 1, GradedPoly::zero(sig));
        BundleClass { rank, sig: sig.clone(), chern }
    }

    pub fn trivial(rank: u32, sig: &Arc<RingSignature>) -> Self {
        Self::new(rank, sig, vec![])
    }

    /// Line bundle with first Chern class `c1` (homogeneous of degree 1).
    pub fn line(c1: GradedPoly) -> Self {
        let sig = c1.signature().clone();
        Self::new(1, &sig, vec![c1])
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn signature(&self) -> &Arc<RingSignature> {
        &self.sig
    }

    /// `c_i`; zero beyond the rank.
    pub fn chern(&self, i: u32) -> GradedPoly {
        self.chern
            .get(i as usize)
            .cloned()
            .unwrap_or_else(|| GradedPoly::zero(&self.sig))
    }

    /// Total Chern class `1 + c_1 + ... + c_r`.
    pub fn total_chern(&self) -> GradedPoly {
        let mut t = GradedPoly::zero(&self.sig);
        for c in &self.chern {
            t = t.add(c);
        }
        t
    }

    /// Dual bundle: `c_i -> (-1)^i c_i`.
    pub fn dual(&self) -> Self {
        let chern = self
            .chern
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { c.clone() } else { c.neg() })
            .collect();
        BundleClass { rank: self.rank, sig: self.sig.clone(), chern }
    }

    /// Whitney sum: total Chern classes multiply.
    pub fn direct_sum(&self, other: &BundleClass) -> Self {
        assert!(self.sig == other.sig, "direct sum needs a shared signature");
        let rank = self.rank + other.rank;
        let total = self.total_chern().mul(&other.total_chern());
        Self::from_total(rank, &self.sig, &total)
    }

    /// Formal quotient `self / sub`: the bundle `Q` with
    /// `c(Q) = c(self) / c(sub)`, truncated at its rank.
    pub fn quotient_by(&self, sub: &BundleClass) -> Self {
        assert!(self.sig == sub.sig, "quotient needs a shared signature");
        assert!(self.rank >= sub.rank, "quotient of smaller by larger rank");
        let rank = self.rank - sub.rank;
        let inv = sub
            .total_chern()
            .inverse_up_to(rank)
            .expect("total Chern class is a unit");
        let total = self.total_chern().truncate(rank).mul(&inv);
        Self::from_total(rank, &self.sig, &total.untruncated())
    }

    fn from_total(rank: u32, sig: &Arc<RingSignature>, total: &GradedPoly) -> Self {
        let mut chern = Vec::with_capacity(rank as usize + 1);
        for i in 0..=rank {
            chern.push(total.homogeneous_component(i).untruncated());
        }
        debug_assert!(chern[0] == GradedPoly::one(sig));
        BundleClass { rank, sig: sig.clone(), chern }
    }

    /// Whitney product of filtration pieces (order does not matter).
    pub fn filtration(pieces: &[BundleClass]) -> Self {
        let mut it = pieces.iter();
        let first = it.next().expect("empty filtration").clone();
        it.fold(first, |acc, p| acc.direct_sum(p))
    }

    /// Tensor by a line class `l`:
    /// `c_k(E (x) L) = sum_i binom(r - i, k - i) c_i(E) l^(k-i)`.
    pub fn tensor_line(&self, l: &GradedPoly) -> Self {
        assert!(l.signature() == &self.sig, "line class over a different signature");
        assert!(
            l.is_homogeneous() && l.max_degree().map_or(true, |d| d == 1),
            "line class must be homogeneous of degree 1"
        );
        let r = self.rank;
        let mut classes = Vec::new();
        for k in 1..=r {
            let mut ck = GradedPoly::zero(&self.sig);
            for i in 0..=k {
                let b = binom(r - i, k - i);
                if b == BigInt::from(0) {
                    continue;
                }
                let term = self.chern[i as usize]
                    .mul(&l.pow(k - i))
                    .scale(&Rat::from_integer(b));
                ck = ck.add(&term);
            }
            classes.push(ck);
        }
        Self::new(r, &self.sig, classes)
    }

    /// `Sym^k` of a bundle of rank at most 3.
    pub fn sym_power(&self, k: u32) -> Self {
        assert!(self.rank >= 1 && self.rank <= 3, "sym_power supports ranks 1 to 3");
        if self.rank == 1 {
            return Self::line(self.chern[1].scale(&rat_int(i64::from(k))));
        }
        let universal = universal_sym_chern(self.rank, k);
        let e_values: Vec<GradedPoly> =
            (1..=self.rank).map(|i| self.chern[i as usize].clone()).collect();
        let out_rank = multiset_count(self.rank, k);
        let classes = universal
            .iter()
            .skip(1)
            .map(|c| evaluate_e_poly(c, &e_values, &self.sig))
            .collect();
        Self::new(out_rank, &self.sig, classes)
    }

    /// Total Segre class `1 / c(E)` through degree `order`.
    pub fn total_segre(&self, order: u32) -> GradedPoly {
        self.total_chern()
            .inverse_up_to(order)
            .expect("total Chern class is a unit")
    }

    /// Segre classes `s_0 .. s_order` as a vector of homogeneous parts.
    pub fn segre_table(&self, order: u32) -> Vec<GradedPoly> {
        let total = self.total_segre(order);
        (0..=order).map(|d| total.homogeneous_component(d).untruncated()).collect()
    }
}

/// A direct sum of bundles carrying integer weights for a one-parameter
/// scaling action: the fiber of weight `w` scales by `t^w`.
#[derive(Debug, Clone)]
pub struct WeightedBundle {
    summands: Vec<(u32, BundleClass)>,
}

impl WeightedBundle {
    pub fn new(summands: Vec<(u32, BundleClass)>) -> Self {
        assert!(!summands.is_empty(), "weighted bundle needs at least one summand");
        let sig = summands[0].1.signature().clone();
        for (w, b) in &summands {
            assert!(*w > 0, "weights must be positive");
            assert!(b.signature() == &sig, "summands must share a signature");
        }
        WeightedBundle { summands }
    }

    pub fn rank(&self) -> u32 {
        self.summands.iter().map(|(_, b)| b.rank()).sum()
    }

    pub fn summands(&self) -> &[(u32, BundleClass)] {
        &self.summands
    }

    /// Weighted Chern polynomial
    /// `P(t) = prod_w sum_i c_i(E_w) (w t)^(r_w - i)`
    /// over the base signature extended by the degree-1 variable `t_name`.
    /// Homogeneous of degree equal to the total rank.
    pub fn weighted_chern_poly(&self, ext_sig: &Arc<RingSignature>, t_name: &str) -> GradedPoly {
        let base_sig = self.summands[0].1.signature().clone();
        let images: Vec<GradedPoly> = base_sig
            .gens()
            .map(|(n, _)| GradedPoly::generator(ext_sig, n))
            .collect();
        let t = GradedPoly::generator(ext_sig, t_name);
        let mut out = GradedPoly::one(ext_sig);
        for (w, b) in &self.summands {
            let wt = t.scale(&rat_int(i64::from(*w)));
            let mut factor = GradedPoly::zero(ext_sig);
            for i in 0..=b.rank() {
                let ci = b.chern(i).substitute(&images);
                factor = factor.add(&ci.mul(&wt.pow(b.rank() - i)));
            }
            out = out.mul(&factor);
        }
        out
    }

    /// `P(1)` over the base signature (no `t` variable).
    pub fn weighted_chern_at_one(&self) -> GradedPoly {
        let sig = self.summands[0].1.signature().clone();
        let mut out = GradedPoly::one(&sig);
        for (w, b) in &self.summands {
            let mut factor = GradedPoly::zero(&sig);
            for i in 0..=b.rank() {
                let scale = BigInt::from(*w).pow(b.rank() - i);
                factor = factor.add(&b.chern(i).scale(&Rat::from_integer(scale)));
            }
            out = out.mul(&factor);
        }
        out
    }

    /// Weighted Segre class `1 / P(1)` through degree `order`.
    pub fn weighted_segre(&self, order: u32) -> GradedPoly {
        self.weighted_chern_at_one()
            .inverse_up_to(order)
            .expect("P(1) has nonzero constant term")
    }
}

/// Binomial coefficient as a big integer (zero when `k > n`).
pub fn binom(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    let k = k.min(n - k);
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Number of degree-`k` monomials in `r` variables, the rank of `Sym^k` of a
/// rank-`r` bundle.
pub fn multiset_count(r: u32, k: u32) -> u32 {
    let b = binom(k + r - 1, r - 1);
    u32::try_from(b).expect("sym rank fits in u32")
}

// ---- universal symmetric-power Chern classes ----

type SymKey = (u32, u32);

fn sym_cache() -> &'static Mutex<HashMap<SymKey, Arc<Vec<GradedPoly>>>> {
    static CACHE: OnceLock<Mutex<HashMap<SymKey, Arc<Vec<GradedPoly>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Chern classes of `Sym^k` of the universal rank-`r` bundle, as polynomials
/// in elementary symmetric classes over the signature `{e1:1, .., er:r}`.
/// Index `i` of the result is `c_i`; length is `rank(Sym^k) + 1`.
pub fn universal_sym_chern(r: u32, k: u32) -> Arc<Vec<GradedPoly>> {
    if let Some(hit) = sym_cache().lock().unwrap().get(&(r, k)) {
        return hit.clone();
    }
    let computed = Arc::new(compute_universal_sym_chern(r, k));
    sym_cache().lock().unwrap().insert((r, k), computed.clone());
    computed
}

fn compute_universal_sym_chern(r: u32, k: u32) -> Vec<GradedPoly> {
    let root_names: Vec<String> = (1..=r).map(|i| format!("x{i}")).collect();
    let root_gens: Vec<(&str, u32)> = root_names.iter().map(|n| (n.as_str(), 1)).collect();
    let xsig = RingSignature::new(&root_gens);
    let e_names: Vec<String> = (1..=r).map(|i| format!("e{i}")).collect();
    let e_gens: Vec<(&str, u32)> = e_names.iter().enumerate().map(|(i, n)| (n.as_str(), i as u32 + 1)).collect();
    let esig = RingSignature::new(&e_gens);

    // Product of (1 + m.x) over exponent multisets |m| = k.
    let mut product = GradedPoly::one(&xsig);
    for m in exponent_multisets(r, k) {
        let mut form = GradedPoly::one(&xsig);
        for (i, mult) in m.iter().enumerate() {
            if *mult > 0 {
                let x = GradedPoly::generator(&xsig, &root_names[i]);
                form = form.add(&x.scale(&rat_int(i64::from(*mult))));
            }
        }
        product = product.mul(&form);
    }

    // Elementary symmetric polynomials e_1..e_r in the roots.
    let elementary: Vec<GradedPoly> = (1..=r as usize)
        .map(|i| {
            let mut e = GradedPoly::zero(&xsig);
            for combo in combinations(r as usize, i) {
                let mut term = GradedPoly::one(&xsig);
                for &j in &combo {
                    term = term.mul(&GradedPoly::generator(&xsig, &root_names[j]));
                }
                e = e.add(&term);
            }
            e
        })
        .collect();

    // Degreewise reduction to the e-basis by linear solve.
    let sym_rank = multiset_count(r, k);
    let mut out = Vec::with_capacity(sym_rank as usize + 1);
    out.push(GradedPoly::one(&esig));
    for d in 1..=sym_rank {
        let target = product.homogeneous_component(d);
        let e_monos = monomial_basis(&esig, d);
        let x_monos = monomial_basis(&xsig, d);
        let x_index: HashMap<_, _> =
            x_monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut mat = RatMat::new(x_monos.len(), e_monos.len());
        for (col, em) in e_monos.iter().enumerate() {
            let mut expanded = GradedPoly::one(&xsig);
            for (i, exp) in em.0.iter().enumerate() {
                if *exp > 0 {
                    expanded = expanded.mul(&elementary[i].pow(u32::from(*exp)));
                }
            }
            for (m, c) in expanded.sorted_terms() {
                mat.set(x_index[m], col, c.clone());
            }
        }
        let rhs: Vec<Rat> = x_monos.iter().map(|m| target.coeff(&m.0)).collect();
        let coeffs = solve(&mat, &rhs)
            .expect("symmetric polynomial must reduce to the e-basis");
        let ci = GradedPoly::from_terms(
            &esig,
            e_monos.into_iter().zip(coeffs).map(|(m, c)| (m.0, c)),
        )
        .expect("well-formed e-monomials");
        out.push(ci);
    }
    out
}

/// Evaluate a polynomial in `e1..er` at concrete Chern classes.
fn evaluate_e_poly(
    p: &GradedPoly,
    e_values: &[GradedPoly],
    sig: &Arc<RingSignature>,
) -> GradedPoly {
    let _ = sig;
    p.substitute(e_values)
}

/// All exponent vectors `(m_1..m_r)` with nonnegative entries summing to `k`.
fn exponent_multisets(r: u32, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; r as usize];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    rec(0, k, &mut cur, &mut out);
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
