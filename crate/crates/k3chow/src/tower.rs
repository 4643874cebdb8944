//! Pushforwards along towers of projective bundles and the relation
//! polynomials they produce.
//!
//! Convention, used for every level: on `P(E) -> B` with `rank E = r` and
//! hyperplane class `u = c1(O(1))`, the fiber relation is
//! `sum_i c_i(E) u^(r-i) = 0` and the pushforward acts on monomials by
//! `u^(r-1+k) -> s_k(E)` with `s(E) = 1/c(E)` and `s_k = 0` for `k < 0`.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::bundle::{binom, BundleClass};
use crate::poly::{GradedPoly, RingSignature};
use crate::rational::{rat_int, Rat};
use crate::{Error, Result};

/// Classifying-base coefficient ring: two generators of degrees 2 and 3.
pub fn base_sig() -> Arc<RingSignature> {
    RingSignature::new(&[("c2", 2), ("c3", 3)])
}

/// The ambient sextic space: hyperplane class over the base.
pub fn ambient_sig() -> Arc<RingSignature> {
    RingSignature::new(&[("H", 1), ("c2", 2), ("c3", 3)])
}

/// The plane bundle level: hyperplane class `z` over the base.
pub fn plane_sig() -> Arc<RingSignature> {
    RingSignature::new(&[("z", 1), ("c2", 2), ("c3", 3)])
}

/// The projectivized relative tangent level: `tau` over the plane level.
pub fn tangent_sig() -> Arc<RingSignature> {
    RingSignature::new(&[("tau", 1), ("z", 1), ("c2", 2), ("c3", 3)])
}

/// The standard rank-3 bundle, `c = 1 + c2 + c3`, over any signature that
/// names both base generators.
pub fn standard_v(sig: &Arc<RingSignature>) -> BundleClass {
    let c2 = GradedPoly::generator(sig, "c2");
    let c3 = GradedPoly::generator(sig, "c3");
    BundleClass::new(3, sig, vec![GradedPoly::zero(sig), c2, c3])
}

/// `Sym^k` of the dual standard bundle (`c = 1 + c2 - c3` before powers).
pub fn sym_dual_v(sig: &Arc<RingSignature>, k: u32) -> BundleClass {
    standard_v(sig).dual().sym_power(k)
}

/// Rank-28 bundle of sextic forms over the classifying base, computed once.
pub fn sextic_bundle() -> &'static BundleClass {
    static CELL: OnceLock<BundleClass> = OnceLock::new();
    CELL.get_or_init(|| sym_dual_v(&base_sig(), 6))
}

/// The single ambient relation `p = sum_i c_i(Sym^6 V*) H^(28-i)`; inert in
/// every degree the presentation reports, but part of the ideal.
pub fn ambient_relation() -> GradedPoly {
    let sig = ambient_sig();
    let h = GradedPoly::generator(&sig, "H");
    let mut p = GradedPoly::zero(&sig);
    for i in 0..=28u32 {
        let ci = inject(&sextic_bundle().chern(i), &sig);
        p = p.add(&ci.mul(&h.pow(28 - i)));
    }
    p
}

/// Relative tangent bundle of the plane level: quotient of the Euler
/// sequence `0 -> O -> V(z) -> T -> 0`. The dropped degree-3 component of
/// `c(V(z))` is exactly the fiber relation `z^3 + c2 z + c3`.
pub fn relative_tangent(sig: &Arc<RingSignature>) -> BundleClass {
    let z = GradedPoly::generator(sig, "z");
    standard_v(sig).tensor_line(&z).quotient_by(&BundleClass::trivial(1, sig))
}

/// Re-express a polynomial over a signature containing the same generator
/// names (used for base-to-total-space pullbacks, a no-op on coordinates).
pub fn inject(class: &GradedPoly, target: &Arc<RingSignature>) -> GradedPoly {
    let src = class.signature();
    let map: Vec<usize> = (0..src.len())
        .map(|i| {
            target
                .index_of(src.name(i))
                .filter(|&j| target.weight(j) == src.weight(i))
                .unwrap_or_else(|| panic!("generator {} missing from {}", src.name(i), target.describe()))
        })
        .collect();
    let mut terms = Vec::with_capacity(class.len());
    for (m, c) in class.sorted_terms() {
        let mut exp = vec![0u16; target.len()];
        for (i, e) in m.0.iter().enumerate() {
            exp[map[i]] = *e;
        }
        terms.push((exp, c.clone()));
    }
    let mut out = GradedPoly::from_terms(target, terms).expect("injected exponents are valid");
    if let Some(d) = class.truncation() {
        out = out.truncate(d);
    }
    out
}

/// Pushforward along one projective bundle `P(fiber) -> base`. The class may
/// live over any signature naming `hyper` plus a subset of `out`; a nonzero
/// exponent on any other generator is a structural error.
pub fn pb_push(
    class: &GradedPoly,
    hyper: &str,
    fiber: &BundleClass,
    out: &Arc<RingSignature>,
) -> Result<GradedPoly> {
    let src = class.signature();
    let h = src.index_of(hyper).ok_or_else(|| Error::SignatureMismatch {
        left: format!("{hyper} not in {}", src.describe()),
        right: out.describe(),
    })?;
    if fiber.signature() != out {
        return Err(Error::SignatureMismatch {
            left: fiber.signature().describe(),
            right: out.describe(),
        });
    }
    // Generators other than `hyper` map into `out` by name; unmapped ones are
    // hyperplane classes of higher levels and must not occur.
    let map: Vec<Option<usize>> = (0..src.len())
        .map(|i| out.index_of(src.name(i)).filter(|&j| out.weight(j) == src.weight(i)))
        .collect();
    let r = fiber.rank();
    let max_order = class
        .sorted_terms()
        .iter()
        .map(|(m, _)| u32::from(m.0[h]))
        .max()
        .unwrap_or(0)
        .saturating_sub(r - 1);
    let segre = fiber.segre_table(max_order);
    let mut out_poly = GradedPoly::zero(out);
    for (m, c) in class.sorted_terms() {
        let hyper_exp = u32::from(m.0[h]);
        if hyper_exp < r - 1 {
            continue;
        }
        let mut exp = vec![0u16; out.len()];
        for (i, e) in m.0.iter().enumerate() {
            if i == h || *e == 0 {
                continue;
            }
            match map[i] {
                Some(j) => exp[j] = *e,
                None => {
                    return Err(Error::SignatureMismatch {
                        left: format!("{} is not a base class", src.name(i)),
                        right: out.describe(),
                    })
                }
            }
        }
        let base_mono = GradedPoly::from_terms(out, vec![(exp, c.clone())])?;
        out_poly = out_poly.add(&base_mono.mul(&segre[(hyper_exp - (r - 1)) as usize]));
    }
    if let Some(d) = class.truncation() {
        out_poly = out_poly.truncate(d.saturating_sub(r - 1));
    }
    Ok(out_poly)
}

struct Level {
    hyper: String,
    fiber: BundleClass,
    total: Arc<RingSignature>,
}

/// A chain of projective bundles over a fixed base; level `i` lives over the
/// total space of level `i - 1`. Hyperplane generators carry degree 1 and
/// pushing one level lowers degree by `rank - 1`.
pub struct BundleTower {
    base: Arc<RingSignature>,
    levels: Vec<Level>,
}

impl BundleTower {
    pub fn new(base: &Arc<RingSignature>) -> Self {
        BundleTower { base: base.clone(), levels: Vec::new() }
    }

    /// Add a level: `fiber` must live over the current top signature and the
    /// new hyperplane name must be fresh.
    pub fn extend(mut self, hyper: &str, fiber: BundleClass) -> Result<Self> {
        let top = self.top_signature().clone();
        if fiber.signature() != &top {
            return Err(Error::SignatureMismatch {
                left: fiber.signature().describe(),
                right: top.describe(),
            });
        }
        if top.index_of(hyper).is_some() {
            return Err(Error::Internal(format!("hyperplane name {hyper} already used")));
        }
        let mut gens: Vec<(&str, u32)> = vec![(hyper, 1)];
        gens.extend(top.gens());
        let total = RingSignature::new(&gens);
        self.levels.push(Level { hyper: hyper.to_string(), fiber, total });
        Ok(self)
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Signature of the total space after `level` levels (0 = the base).
    pub fn signature(&self, level: usize) -> &Arc<RingSignature> {
        if level == 0 {
            &self.base
        } else {
            &self.levels[level - 1].total
        }
    }

    pub fn top_signature(&self) -> &Arc<RingSignature> {
        self.signature(self.depth())
    }

    /// Total fiber dimension, i.e. the degree drop of `push_to_base`.
    pub fn fiber_dimension(&self) -> u32 {
        self.levels.iter().map(|l| l.fiber.rank() - 1).sum()
    }

    /// Push from the total space of `level` one step down.
    pub fn push_level(&self, level: usize, class: &GradedPoly) -> Result<GradedPoly> {
        if level == 0 || level > self.depth() {
            return Err(Error::Internal(format!("no level {level} to push along")));
        }
        let l = &self.levels[level - 1];
        pb_push(class, &l.hyper, &l.fiber, self.signature(level - 1))
    }

    /// Push a top-level class all the way to the base.
    pub fn push_to_base(&self, class: &GradedPoly) -> Result<GradedPoly> {
        let mut c = class.clone();
        for level in (1..=self.depth()).rev() {
            c = self.push_level(level, &c)?;
        }
        Ok(c)
    }
}

/// The plane bundle over the classifying base.
pub fn plane_tower() -> BundleTower {
    BundleTower::new(&base_sig())
        .extend("z", standard_v(&base_sig()))
        .expect("fresh hyperplane name")
}

/// Plane bundle, then its projectivized relative tangent bundle.
pub fn tangent_tower() -> BundleTower {
    plane_tower()
        .extend("tau", relative_tangent(&plane_sig()))
        .expect("fresh hyperplane name")
}

/// The ambient sextic space as a one-level tower.
pub fn ambient_tower() -> BundleTower {
    BundleTower::new(&base_sig())
        .extend("H", sextic_bundle().clone())
        .expect("fresh hyperplane name")
}

/// Pushforward to the base from the product of the quartic and dual-plane
/// bundles: `h1^a h2^b -> s_(a-14)(Sym^4 V*) * s_(b-2)(V*)`.
pub fn product_push(a: u32, b: u32) -> GradedPoly {
    let sig = base_sig();
    if a < 14 || b < 2 {
        return GradedPoly::zero(&sig);
    }
    let s4 = sym_dual_v(&sig, 4).segre_table(a - 14);
    let s1 = sym_dual_v(&sig, 1).segre_table(b - 2);
    s4[(a - 14) as usize].mul(&s1[(b - 2) as usize])
}

/// Segre table of the sextic bundle through degree 28, computed once.
fn sextic_segre() -> &'static Vec<GradedPoly> {
    static CELL: OnceLock<Vec<GradedPoly>> = OnceLock::new();
    CELL.get_or_init(|| sextic_bundle().segre_table(28))
}

/// Solve `value_k = sum_(j >= k) alpha_j s_(j-k)(Sym^6 V*)` for the
/// `alpha_j` given the pushforward values, top degree first, and assemble
/// `sum_j alpha_j H^j`. This inverts multiplication by powers of `H`
/// followed by pushforward from the ambient space.
fn image_class_from_pushforwards(values: &[GradedPoly], top: usize) -> GradedPoly {
    let s6 = sextic_segre();
    let mut alpha: Vec<GradedPoly> = vec![GradedPoly::zero(&base_sig()); top + 1];
    for k in (0..=top).rev() {
        let mut a = values[k].clone();
        for j in k + 1..=top {
            a = a.sub(&alpha[j].mul(&s6[j - k]));
        }
        alpha[k] = a;
    }
    let sig = ambient_sig();
    let h = GradedPoly::generator(&sig, "H");
    let mut out = GradedPoly::zero(&sig);
    for (k, a) in alpha.iter().enumerate() {
        out = out.add(&inject(a, &sig).mul(&h.pow(k as u32)));
    }
    out
}

/// The three multiple-line relations, degrees 11, 12, 13. The `i`-th class
/// is the image of `h2^i` under the product map with `m*H = h1 + 2 h2`.
pub fn ml_relations() -> [GradedPoly; 3] {
    let sig = base_sig();
    let s4 = sym_dual_v(&sig, 4).segre_table(13);
    let s1 = sym_dual_v(&sig, 1).segre_table(13);
    let rel = |i: u32| -> GradedPoly {
        let top = (11 + i) as usize;
        // gamma_k = push of (h1 + 2 h2)^(27-k) h2^i, expanded binomially.
        let values: Vec<GradedPoly> = (0..=top)
            .map(|k| {
                let mut acc = GradedPoly::zero(&sig);
                for m in 0..=(27 - k as u32) {
                    let (q, p) = (13i64 - k as i64 - i64::from(m), i64::from(m + i) - 2);
                    if !(0..=13).contains(&q) || !(0..=13).contains(&p) {
                        continue;
                    }
                    let coeff = Rat::from_integer(
                        binom(27 - k as u32, m) * BigInt::from(2).pow(m),
                    );
                    acc = acc.add(&s4[q as usize].mul(&s1[p as usize]).scale(&coeff));
                }
                acc
            })
            .collect();
        image_class_from_pushforwards(&values, top)
    };
    [rel(0), rel(1), rel(2)]
}

/// Order-`order` principal parts of `O(d)` on the plane level: filtration
/// pieces `Sym^k Omega (x) O(dz)` for `k = 0..order`.
pub fn plane_parts(sig: &Arc<RingSignature>, order: u32, d: u32) -> BundleClass {
    let omega = relative_tangent(sig).dual();
    let dz = GradedPoly::generator(sig, "z").scale(&rat_int(i64::from(d)));
    let pieces: Vec<BundleClass> = (0..=order)
        .map(|k| {
            if k == 0 {
                BundleClass::line(dz.clone())
            } else {
                omega.sym_power(k).tensor_line(&dz)
            }
        })
        .collect();
    BundleClass::filtration(&pieces)
}

/// The three quadruple-point relations, degrees 8, 9, 10: for `j = 0, 1, 2`
/// the class `sum_i push(z^j c_i(P^3(O(6)))) H^(10-i)`.
pub fn qp_relations() -> [GradedPoly; 3] {
    let sig_z = plane_sig();
    let jets = plane_parts(&sig_z, 3, 6);
    debug_assert_eq!(jets.rank(), 10);
    let tower = plane_tower();
    let out = ambient_sig();
    let h = GradedPoly::generator(&out, "H");
    let rel = |j: u32| -> GradedPoly {
        let zj = GradedPoly::generator(&sig_z, "z").pow(j);
        let mut acc = GradedPoly::zero(&out);
        for i in 0..=10u32 {
            let pushed = tower.push_to_base(&zj.mul(&jets.chern(i))).expect("plane push");
            acc = acc.add(&inject(&pushed, &out).mul(&h.pow(10 - i)));
        }
        acc
    };
    [rel(0), rel(1), rel(2)]
}

/// Monomial set cutting out consecutive triple points: the sextic lies in
/// `(x, y^2)^3` iff these twelve Taylor coefficients vanish.
pub const CTP_MONOMIALS: [(u32, u32); 12] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (2, 1),
    (1, 2),
    (0, 3),
    (1, 3),
    (0, 4),
    (0, 5),
];

/// Principal parts of `O(d)` refined along a monomial set on the tangent
/// level. The piece at `x^i y^j` is the line with
/// `c1 = (d - 3j) z + (i - j) tau`, from `c1(Omega_x) = tau` and
/// `c1(Omega_y) = -3z - tau`.
pub fn refined_parts(sig: &Arc<RingSignature>, set: &[(u32, u32)], d: u32) -> BundleClass {
    let z = GradedPoly::generator(sig, "z");
    let tau = GradedPoly::generator(sig, "tau");
    let pieces: Vec<BundleClass> = set
        .iter()
        .map(|&(i, j)| {
            let c1 = z
                .scale(&rat_int(i64::from(d) - 3 * i64::from(j)))
                .add(&tau.scale(&rat_int(i64::from(i) - i64::from(j))));
            BundleClass::line(c1)
        })
        .collect();
    BundleClass::filtration(&pieces)
}

/// The six consecutive-triple-point main terms, keyed by `(i, j)` with
/// `tau^j z^i`; degrees `9 + i + j`. Exceptional corrections from the
/// weighted blowup are handled separately and subtracted downstream.
pub fn ctp_main_terms() -> Vec<((u32, u32), GradedPoly)> {
    let sig_t = tangent_sig();
    let jets = refined_parts(&sig_t, &CTP_MONOMIALS, 6);
    debug_assert_eq!(jets.rank(), 12);
    let chern: Vec<GradedPoly> = (0..=12).map(|k| jets.chern(k)).collect();
    let pairs: Vec<(u32, u32)> = vec![(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)];
    pairs
        .into_par_iter()
        .map(|(i, j)| {
            let tower = tangent_tower();
            let out = ambient_sig();
            let h = GradedPoly::generator(&out, "H");
            let weight = GradedPoly::generator(&sig_t, "tau")
                .pow(j)
                .mul(&GradedPoly::generator(&sig_t, "z").pow(i));
            let mut acc = GradedPoly::zero(&out);
            for (k, ck) in chern.iter().enumerate() {
                let pushed =
                    tower.push_to_base(&weight.mul(ck)).expect("tangent push");
                acc = acc.add(&inject(&pushed, &out).mul(&h.pow(12 - k as u32)));
            }
            ((i, j), acc)
        })
        .collect()
}

/// Class of the closure of the triple-conic locus, degree 22: the image of
/// the cubing map from the conic bundle, recovered by the same triangular
/// inversion as the multiple-line classes using `m*H = 3h`.
pub fn tc_class() -> GradedPoly {
    let sig = base_sig();
    let s2 = sym_dual_v(&sig, 2).segre_table(22);
    let values: Vec<GradedPoly> = (0..=22usize)
        .map(|k| {
            let three = Rat::from_integer(BigInt::from(3).pow(27 - k as u32));
            s2[22 - k].scale(&three)
        })
        .collect();
    image_class_from_pushforwards(&values, 22)
}
