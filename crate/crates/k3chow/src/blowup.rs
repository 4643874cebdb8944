//! Chow calculus for the weighted blowup along the triple-conic locus:
//! the normal-bundle Chern polynomial, the presentation of the blown-up
//! ring, Gysin maps, the strict-transform formula, and the exceptional
//! corrections to the six consecutive-triple-point relations.
//!
//! Junction-side classes live on the tangent level with the relations of
//! the conic locus imposed: `c3 = 0`, `tau^2 = -3 z tau - 3 z^2 - c2`,
//! `z^3 = -c2 z`. Canonical form keeps the `tau` exponent at most 1 and
//! the `z` exponent at most 2; the fiber integral of a canonical class is
//! then the coefficient of `tau z^2`.

use std::sync::{Arc, OnceLock};

use num_traits::Zero;
use rayon::prelude::*;

use crate::bundle::{BundleClass, WeightedBundle};
use crate::poly::{GradedPoly, RingSignature};
use crate::rational::{rat, rat_int, Rat};
use crate::tower::{self, inject, refined_parts, tangent_sig};
use crate::{Error, Result};

/// Classes on the triple-conic side of the blowup: the exceptional
/// variable and the surviving base generator.
pub fn center_sig() -> Arc<RingSignature> {
    RingSignature::new(&[("t", 1), ("c2", 2)])
}

/// The blown-up ambient ring before restriction: hyperplane, exceptional
/// variable, base generators.
pub fn blowup_sig() -> Arc<RingSignature> {
    RingSignature::new(&[("H", 1), ("t", 1), ("c2", 2), ("c3", 3)])
}

/// Generators of the moduli ring: `E` is the elliptic boundary class,
/// equal to `-t` after restriction.
pub fn moduli_sig() -> Arc<RingSignature> {
    RingSignature::new(&[("H", 1), ("E", 1), ("c2", 2), ("c3", 3)])
}

/// Canonical rewrite of `z^b`: a `(z exponent, extra c2 exponent, sign)`
/// triple, from `z^3 = -c2 z`.
fn z_normal(b: u16) -> (u16, u16, i64) {
    if b <= 2 {
        return (b, 0, 1);
    }
    let (ze, steps) = if b % 2 == 1 { (1, (b - 1) / 2) } else { (2, (b - 2) / 2) };
    (ze, steps, if steps % 2 == 1 { -1 } else { 1 })
}

/// Rewrite into canonical form modulo the conic-locus relations. Works
/// over any signature naming `tau`, `z`, `c2`, `c3`; other generators
/// pass through untouched. Degree-preserving and idempotent.
pub fn reduce_conic(class: &GradedPoly) -> GradedPoly {
    let sig = class.signature().clone();
    let it = sig.index_of("tau").expect("signature names tau");
    let iz = sig.index_of("z").expect("signature names z");
    let ic2 = sig.index_of("c2").expect("signature names c2");
    let ic3 = sig.index_of("c3").expect("signature names c3");
    // Canonical forms of tau^a as (tau exp, z exp, c2 exp) -> coefficient
    // tables, built by multiplying by tau and renormalizing once each:
    // tau^2 = -3 z tau - 3 z^2 - c2 leaves the tau exponent at most 1 and
    // z_normal caps the z exponent, so every table stays small.
    let mut tau_tables: Vec<Vec<((u16, u16, u16), Rat)>> = vec![vec![((0, 0, 0), rat_int(1))]];
    let grow = |table: &Vec<((u16, u16, u16), Rat)>| {
        let mut next: std::collections::BTreeMap<(u16, u16, u16), Rat> = Default::default();
        let mut put = |key: (u16, u16, u16), v: Rat| {
            let (zz, extra, sign) = z_normal(key.1);
            let entry =
                next.entry((key.0, zz, key.2 + extra)).or_insert_with(Rat::zero);
            *entry += if sign == 1 { v } else { -v };
        };
        for ((a, b, c), v) in table {
            if *a == 0 {
                put((1, *b, *c), v.clone());
            } else {
                // tau * tau = -3 z tau - 3 z^2 - c2.
                put((1, b + 1, *c), v * &rat_int(-3));
                put((0, b + 2, *c), v * &rat_int(-3));
                put((0, *b, c + 1), -v);
            }
        }
        next.into_iter().filter(|(_, v)| !v.is_zero()).collect::<Vec<_>>()
    };
    let mut out: std::collections::BTreeMap<Vec<u16>, Rat> = Default::default();
    for (m, coeff) in class.sorted_terms() {
        if m.exponent(ic3) > 0 {
            continue;
        }
        let a = m.exponent(it) as usize;
        while tau_tables.len() <= a {
            let next = grow(tau_tables.last().expect("nonempty"));
            tau_tables.push(next);
        }
        for ((ta, tb, tc), v) in &tau_tables[a] {
            let (zz, extra, sign) = z_normal(tb + m.exponent(iz));
            let mut exp = m.0.clone();
            exp[it] = *ta;
            exp[iz] = zz;
            exp[ic2] = m.exponent(ic2) + tc + extra;
            let value = coeff * v;
            let entry = out.entry(exp).or_insert_with(Rat::zero);
            *entry += if sign == 1 { value } else { -value };
        }
    }
    GradedPoly::from_terms(&sig, out.into_iter().filter(|(_, v)| !v.is_zero()))
        .expect("exponent width preserved")
}

/// Fiber integral over the junction: reduce to canonical form, keep the
/// coefficient of `tau z^2`, and carry every other generator into the
/// target signature by name.
pub fn junction_push(class: &GradedPoly, target: &Arc<RingSignature>) -> GradedPoly {
    let red = reduce_conic(class);
    let sig = red.signature().clone();
    let it = sig.index_of("tau").expect("signature names tau");
    let iz = sig.index_of("z").expect("signature names z");
    let mut terms: Vec<(Vec<u16>, Rat)> = Vec::new();
    for (m, c) in red.sorted_terms() {
        if m.exponent(it) != 1 || m.exponent(iz) != 2 {
            continue;
        }
        let mut exp = vec![0u16; target.len()];
        for i in 0..sig.len() {
            if i == it || i == iz {
                continue;
            }
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let j = target.index_of(sig.name(i)).expect("generator present in target");
            exp[j] = e;
        }
        terms.push((exp, c.clone()));
    }
    GradedPoly::from_terms(target, terms).expect("exponent width")
}

/// Chern polynomial of the weighted normal bundle of the triple-conic
/// locus: `Sym^8 W*` in weight 2 plus `Sym^12 W*` in weight 3, where `W`
/// is the rank-2 bundle with `Sym^2 W = V`, so `c1(W) = 0` and
/// `c2(W) = c2/4`. Degree 22; no constant term.
pub fn normal_chern_poly() -> GradedPoly {
    let wsig = RingSignature::new(&[("c2", 2)]);
    let c2 = GradedPoly::generator(&wsig, "c2").scale(&rat(1, 4));
    let w = BundleClass::new(2, &wsig, vec![GradedPoly::zero(&wsig), c2]);
    let weighted = WeightedBundle::new(vec![(2, w.sym_power(8).dual()), (3, w.sym_power(12).dual())]);
    weighted.weighted_chern_poly(&center_sig(), "t")
}

/// Monomial sets refining the jets of `O(2)` and `O(4)` along the flag of
/// tangent conditions: `{1, y}` and `{1, x, y, xy, y^2, y^3}`.
const REFINED_TWO: [(u32, u32); 2] = [(0, 0), (0, 1)];
const REFINED_FOUR: [(u32, u32); 6] = [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (0, 3)];

/// Class of the junction inside the tangent level: `c2` of the refined
/// jets of `O(2)`, which is `-2 z^2 - 2 z tau`.
pub fn junction_class(sig: &Arc<RingSignature>) -> GradedPoly {
    refined_parts(sig, &REFINED_TWO, 2).chern(2)
}

/// Total class of one graded piece of the kernel filtration, in
/// canonical form: `c(Sym^a V*) c(top_{a-2}) / (c(Sym^{a-2} V*) c(top_a))`
/// where `top_d` is the refined jet bundle of `O(d)`. Components above
/// the piece's rank vanish modulo the conic-locus relations.
fn kernel_quotient_total(rank: u32, order: u32) -> GradedPoly {
    let sig = tangent_sig();
    let (num_sym, num_jets, den_sym, den_jets): (u32, &[(u32, u32)], u32, &[(u32, u32)]) =
        match rank {
            5 => (4, &REFINED_TWO, 2, &REFINED_FOUR),
            7 => (6, &REFINED_FOUR, 4, &tower::CTP_MONOMIALS),
            _ => unreachable!("filtration has pieces of rank 5 and 7"),
        };
    let numerator = tower::sym_dual_v(&sig, num_sym)
        .total_chern()
        .mul(&refined_parts(&sig, num_jets, num_sym - 2).total_chern());
    let denominator = tower::sym_dual_v(&sig, den_sym)
        .total_chern()
        .mul(&refined_parts(&sig, den_jets, den_sym + 2).total_chern());
    reduce_conic(&numerator.mul(&denominator.inverse_up_to(order).expect("unit total class")))
}

/// The same piece packaged as a bundle on the tangent level.
fn kernel_quotient(rank: u32, order: u32) -> BundleClass {
    let total = kernel_quotient_total(rank, order);
    let sig = tangent_sig();
    let classes: Vec<GradedPoly> =
        (1..=rank).map(|d| total.homogeneous_component(d).untruncated()).collect();
    BundleClass::new(rank, &sig, classes)
}

/// Weighted Segre series of the junction's normal bundle inside the
/// center, in canonical form, with weights 2 and 3 on the two graded
/// pieces of the kernel filtration.
pub fn junction_normal_segre(order: u32) -> GradedPoly {
    let weighted =
        WeightedBundle::new(vec![(2, kernel_quotient(5, order)), (3, kernel_quotient(7, order))]);
    reduce_conic(&weighted.weighted_segre(order))
}

/// The six exceptional corrections, keyed like the main terms by `(i, j)`
/// with fiber weight `tau^j z^i`; homogeneous of degree `9 + i + j` in
/// the subring generated by `c2` and `E`.
pub fn ctp_exceptional_corrections() -> Vec<((u32, u32), GradedPoly)> {
    static CELL: OnceLock<Vec<((u32, u32), GradedPoly)>> = OnceLock::new();
    CELL.get_or_init(|| corrections_with_margins(12, 11)).clone()
}

/// Corrections with explicit truncation margins, so the defaults can be
/// checked against wider ones. `segre_order` caps the Segre series,
/// `geo_len` the geometric series of the strict-transform bracket.
pub fn corrections_with_margins(segre_order: u32, geo_len: u32) -> Vec<((u32, u32), GradedPoly)> {
    let bsig = RingSignature::new(&[("tau", 1), ("z", 1), ("t", 1), ("c2", 2), ("c3", 3)]);
    let tsig = tangent_sig();
    // P_N(1) as a polynomial in c2 alone.
    let pn1 = eval_at_t(&normal_chern_poly(), &GradedPoly::one(&bsig));
    let carrier = inject(&junction_class(&tsig), &bsig);
    let segre = inject(&junction_normal_segre(segre_order).untruncated(), &bsig);
    let weighted = reduce_conic(&pn1.mul(&carrier).mul(&segre));
    // {P_N(1) (1 + t + t^2 + ...) zeta_* s^wt} in codegree 11 on the
    // product of the tangent level with the blown-up center.
    let pieces = weighted.components();
    let t = GradedPoly::generator(&bsig, "t");
    let mut bracket = GradedPoly::zero(&bsig);
    for m in 0..=geo_len.min(11) {
        if let Some(g) = pieces.get(&(11 - m)) {
            bracket = bracket.add(&t.pow(m).mul(g));
        }
    }
    let out = moduli_sig();
    let minus_e = GradedPoly::generator(&out, "E").neg();
    let c2 = GradedPoly::generator(&out, "c2");
    let pairs: Vec<(u32, u32)> = vec![(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)];
    pairs
        .into_par_iter()
        .map(|(i, j)| {
            let weight = GradedPoly::generator(&bsig, "tau")
                .pow(j)
                .mul(&GradedPoly::generator(&bsig, "z").pow(i));
            let pushed = junction_push(&bracket.mul(&weight), &center_sig());
            // The exceptional pushforward multiplies by -t; then t = -E.
            let on_blowup = pushed.mul(&GradedPoly::generator(&center_sig(), "t")).neg();
            ((i, j), on_blowup.substitute(&[minus_e.clone(), c2.clone()]))
        })
        .collect()
}

/// The corrected consecutive-triple-point relations on the moduli ring:
/// main term minus exceptional correction, degrees `9 + i + j`.
pub fn ctp_relations() -> Vec<((u32, u32), GradedPoly)> {
    let out = moduli_sig();
    let corrections = ctp_exceptional_corrections();
    tower::ctp_main_terms()
        .into_iter()
        .zip(corrections)
        .map(|((key, main), (ckey, corr))| {
            debug_assert_eq!(key, ckey);
            (key, inject(&main, &out).sub(&corr))
        })
        .collect()
}

/// Substitute the value of `t` into a polynomial over a signature naming
/// `t`; every other generator maps to its namesake in the target.
fn eval_at_t(p: &GradedPoly, value: &GradedPoly) -> GradedPoly {
    let target = value.signature();
    let images: Vec<GradedPoly> = p
        .signature()
        .gens()
        .map(|(n, _)| {
            if n == "t" {
                value.clone()
            } else {
                GradedPoly::generator(target, n)
            }
        })
        .collect();
    p.substitute(&images)
}

/// Exact division by `t`; errors on any `t`-free term.
fn divide_by_t(p: &GradedPoly) -> Result<GradedPoly> {
    let sig = p.signature().clone();
    let it = sig.index_of("t").expect("signature names t");
    let mut terms: Vec<(Vec<u16>, Rat)> = Vec::new();
    for (m, c) in p.sorted_terms() {
        if m.exponent(it) == 0 {
            return Err(Error::InexactDivision(format!("t does not divide {p}")));
        }
        let mut exp = m.0.clone();
        exp[it] -= 1;
        terms.push((exp, c.clone()));
    }
    GradedPoly::from_terms(&sig, terms)
}

/// Data of a subvariety's intersection with the blowup center, enough to
/// run the strict-transform formula: the center's weighted normal Chern
/// polynomial, the weighted Segre series of the normal bundle of the
/// intersection inside the center, and the class realizing the embedding
/// pushforward as multiplication.
pub struct CenterData {
    pub normal_chern: GradedPoly,
    pub weighted_segre: GradedPoly,
    pub embedding: GradedPoly,
}

/// Class of the strict transform: the total transform plus `t` times the
/// codegree-`k` part of `P_N(1) (1 + t + ...) zeta_* s^wt`, everything
/// over the signature of `total`. The geometric series is truncated two
/// steps past `k`, which the codegree cut makes immaterial.
pub fn strict_transform(total: &GradedPoly, data: &CenterData, k: u32) -> GradedPoly {
    let sig = total.signature().clone();
    let one = GradedPoly::one(&sig);
    let pn1 = eval_at_t(&data.normal_chern, &one);
    let t = GradedPoly::generator(&sig, "t");
    let mut geo = GradedPoly::zero(&sig);
    for m in 0..=k + 2 {
        geo = geo.add(&t.pow(m));
    }
    let inner = pn1
        .mul(&geo)
        .mul(&inject(&data.embedding, &sig))
        .mul(&inject(&data.weighted_segre, &sig));
    let bracket = inner.homogeneous_component(k).untruncated();
    total.add(&t.mul(&bracket))
}

/// Presentation of the Chow ring of a weighted blowup: the base
/// relations, the exceptional variable `t` of degree 1, the kernel
/// generators of restriction to the complement, and the key relation
/// `Q(t)`. The relations are `t g` for each kernel generator `g`,
/// together with `Q(t)`; the exceptional divisor's class is `-t`.
pub struct BlowupPresentation {
    base: Vec<GradedPoly>,
    ker_gens: Vec<GradedPoly>,
    q: GradedPoly,
    sig: Arc<RingSignature>,
}

/// Build the blowup presentation from the base presentation, the kernel
/// generators of `i*`, the weighted normal Chern polynomial, and the
/// center's class: `Q(t) = P_N(t) - P_N(0) + [Z]`. Surjectivity of `i*`
/// is the caller's responsibility.
pub fn blowup_ring(
    base: Vec<GradedPoly>,
    ker_gens: Vec<GradedPoly>,
    p_n: &GradedPoly,
    center_class: &GradedPoly,
) -> BlowupPresentation {
    let sig = center_class.signature().clone();
    assert!(sig.index_of("t").is_some(), "presentation signature must name t");
    for g in base.iter().chain(ker_gens.iter()) {
        assert!(g.signature() == &sig, "relations must share the presentation signature");
    }
    let pn = inject(p_n, &sig);
    let pn0 = eval_at_t(&pn, &GradedPoly::zero(&sig));
    let q = pn.sub(&pn0).add(center_class);
    BlowupPresentation { base, ker_gens, q, sig }
}

impl BlowupPresentation {
    pub fn signature(&self) -> &Arc<RingSignature> {
        &self.sig
    }

    pub fn base_relations(&self) -> &[GradedPoly] {
        &self.base
    }

    pub fn kernel_generators(&self) -> &[GradedPoly] {
        &self.ker_gens
    }

    pub fn q_poly(&self) -> &GradedPoly {
        &self.q
    }

    /// Class of the exceptional divisor.
    pub fn exceptional_class(&self) -> GradedPoly {
        GradedPoly::generator(&self.sig, "t").neg()
    }

    /// All relations of the presentation: the base relations, `t g` for
    /// each kernel generator, and `Q(t)`.
    pub fn relations(&self) -> Vec<GradedPoly> {
        let t = GradedPoly::generator(&self.sig, "t");
        let mut out = self.base.clone();
        out.extend(self.ker_gens.iter().map(|g| t.mul(g)));
        out.push(self.q.clone());
        out
    }

    /// The Gysin class `f^!(alpha) = g^* alpha (P_N(t) - P_N(0)) / t` on
    /// the exceptional divisor.
    pub fn f_shriek(&self, alpha: &GradedPoly) -> Result<GradedPoly> {
        // Q(t) - Q(0) = P_N(t) - P_N(0), divisible by t.
        let delta = divide_by_t(&self.q.sub(&self.tail()))?;
        Ok(inject(alpha, &self.sig).mul(&delta))
    }

    /// Pushforward from the exceptional divisor: lift the class through
    /// `i*` by name and multiply by `-t`. Well defined because the
    /// relations `t ker(i*)` kill the ambiguity of the lift.
    pub fn exceptional_push(&self, beta: &GradedPoly) -> GradedPoly {
        let t = GradedPoly::generator(&self.sig, "t");
        inject(beta, &self.sig).mul(&t).neg()
    }

    /// The center's class, recovered as `Q(0)`.
    pub fn center_class(&self) -> GradedPoly {
        self.tail()
    }

    fn tail(&self) -> GradedPoly {
        eval_at_t(&self.q, &GradedPoly::zero(&self.sig))
    }
}

/// The presentation used by the pipeline: multiple-line and
/// quadruple-point relations over the blown-up signature, kernel
/// generators `H` and `c3`, the weighted normal polynomial, and the
/// triple-conic class as the center.
pub fn standard_blowup() -> BlowupPresentation {
    let sig = blowup_sig();
    let mut base: Vec<GradedPoly> = Vec::new();
    for r in tower::ml_relations() {
        base.push(inject(&r, &sig));
    }
    for r in tower::qp_relations() {
        base.push(inject(&r, &sig));
    }
    base.push(inject(&tower::ambient_relation(), &sig));
    let ker = vec![GradedPoly::generator(&sig, "H"), GradedPoly::generator(&sig, "c3")];
    let center = inject(&tower::tc_class(), &sig);
    blowup_ring(base, ker, &normal_chern_poly(), &center)
}

/// Carry a class on the blowup into the moduli ring: `t` becomes `-E`,
/// everything else keeps its name.
pub fn restrict_to_moduli(p: &GradedPoly) -> GradedPoly {
    let out = moduli_sig();
    eval_at_t(p, &GradedPoly::generator(&out, "E").neg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::FixtureSet;

    fn gen(sig: &Arc<RingSignature>, n: &str) -> GradedPoly {
        GradedPoly::generator(sig, n)
    }

    #[test]
    fn reduction_rewrites_and_is_idempotent() {
        let sig = tangent_sig();
        let tau = gen(&sig, "tau");
        let z = gen(&sig, "z");
        let c2 = gen(&sig, "c2");
        let c3 = gen(&sig, "c3");
        let expect = z
            .mul(&tau)
            .scale(&rat_int(-3))
            .add(&z.pow(2).scale(&rat_int(-3)))
            .sub(&c2);
        assert_eq!(reduce_conic(&tau.pow(2)), expect);
        assert_eq!(reduce_conic(&z.pow(3)), c2.mul(&z).neg());
        assert!(reduce_conic(&c3.mul(&tau)).is_zero());
        let messy = tau.pow(3).mul(&z.pow(4)).add(&c2.mul(&tau));
        assert_eq!(reduce_conic(&reduce_conic(&messy)), reduce_conic(&messy));
        // tau^3 = 6 z^2 tau - c2 tau - 6 c2 z in canonical form, so the
        // fiber pushforward of tau^3 along the tangent level is 6 z^2 - c2.
        let t3 = reduce_conic(&tau.pow(3));
        assert_eq!(t3.coeff_named(&[("tau", 1), ("z", 2)]), rat_int(6));
        assert_eq!(t3.coeff_named(&[("tau", 1), ("c2", 1)]), rat_int(-1));
        assert_eq!(t3.coeff_named(&[("z", 1), ("c2", 1)]), rat_int(-6));
        assert_eq!(t3.len(), 3);
    }

    #[test]
    fn junction_push_reads_off_the_fiber_cell() {
        let sig = tangent_sig();
        let out = tower::base_sig();
        let cell = gen(&sig, "tau").mul(&gen(&sig, "z").pow(2));
        assert_eq!(junction_push(&cell, &out), GradedPoly::one(&out));
        assert!(junction_push(&gen(&sig, "z").pow(2), &out).is_zero());
        let weighted = cell.mul(&gen(&sig, "c2"));
        assert_eq!(junction_push(&weighted, &out), gen(&out, "c2"));
    }

    #[test]
    fn normal_chern_poly_matches_print() {
        FixtureSet::bundled()
            .expect_polynomial("normal_chern_poly", &normal_chern_poly())
            .unwrap();
    }

    #[test]
    fn normal_poly_shape() {
        let pn = normal_chern_poly();
        assert_eq!(pn.coeff_named(&[("t", 22)]), rat_int(816293376));
        assert!(eval_at_t(&pn, &GradedPoly::zero(&center_sig())).is_zero());
        assert!(pn.is_homogeneous());
        assert_eq!(pn.max_degree(), Some(22));
    }

    #[test]
    fn kernel_quotients_vanish_above_their_ranks() {
        for rank in [5u32, 7] {
            let total = kernel_quotient_total(rank, 12);
            assert_eq!(total.homogeneous_component(0).untruncated(), GradedPoly::one(&tangent_sig()));
            for d in rank + 1..=12 {
                assert!(
                    total.homogeneous_component(d).is_zero(),
                    "degree {d} class of the rank-{rank} piece should vanish"
                );
            }
        }
    }

    #[test]
    fn junction_class_is_the_refined_jet_c2() {
        let sig = tangent_sig();
        let z = gen(&sig, "z");
        let tau = gen(&sig, "tau");
        let expect = z.pow(2).scale(&rat_int(-2)).add(&z.mul(&tau).scale(&rat_int(-2)));
        assert_eq!(junction_class(&sig), expect);
    }

    #[test]
    fn weighted_segre_matches_printed_low_terms() {
        let fixtures = FixtureSet::bundled();
        let printed = fixtures.polynomial("weighted_segre_low").expect("fixture");
        let expect = reduce_conic(&printed);
        let computed = junction_normal_segre(12).untruncated();
        for d in 0..=2u32 {
            assert_eq!(
                computed.homogeneous_component(d).untruncated(),
                expect.homogeneous_component(d).untruncated(),
                "degree {d} of the weighted Segre series"
            );
        }
    }

    #[test]
    fn corrections_match_print() {
        let fixtures = FixtureSet::bundled();
        for ((i, j), corr) in ctp_exceptional_corrections() {
            fixtures.expect_polynomial(&format!("correction_{i}{j}"), &corr).unwrap();
        }
    }

    #[test]
    fn corrections_stay_in_the_c2_e_subring() {
        let sig = moduli_sig();
        let ih = sig.index_of("H").unwrap();
        let ic3 = sig.index_of("c3").unwrap();
        for ((i, j), corr) in ctp_exceptional_corrections() {
            assert!(corr.is_homogeneous());
            assert_eq!(corr.max_degree(), Some(9 + i + j));
            for (m, _) in corr.sorted_terms() {
                assert_eq!(m.exponent(ih), 0, "no H in correction ({i},{j})");
                assert_eq!(m.exponent(ic3), 0, "no c3 in correction ({i},{j})");
            }
        }
    }

    #[test]
    fn truncation_margins_do_not_matter() {
        let narrow = corrections_with_margins(12, 11);
        let wide = corrections_with_margins(24, 24);
        for ((ka, a), (kb, b)) in narrow.iter().zip(wide.iter()) {
            assert_eq!(ka, kb);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn ctp_relations_are_homogeneous_of_expected_degree() {
        for ((i, j), rel) in ctp_relations() {
            assert!(rel.is_homogeneous());
            assert_eq!(rel.max_degree(), Some(9 + i + j), "degree of relation ({i},{j})");
        }
    }

    #[test]
    fn presentation_relations_and_q_invariants() {
        let pres = standard_blowup();
        let sig = pres.signature().clone();
        let q = pres.q_poly();
        assert_eq!(q.coeff_named(&[("t", 22)]), rat_int(816293376));
        assert_eq!(pres.center_class(), inject(&tower::tc_class(), &sig));
        let rels = pres.relations();
        let t = gen(&sig, "t");
        assert!(rels.contains(&t.mul(&gen(&sig, "H"))));
        assert!(rels.contains(&t.mul(&gen(&sig, "c3"))));
        assert_eq!(pres.exceptional_class(), t.neg());
    }

    #[test]
    fn gysin_square_commutes() {
        let pres = standard_blowup();
        let sig = pres.signature().clone();
        let one = GradedPoly::one(&sig);
        // j_* f^!(1) - f^* i_*(1) = -Q(t).
        let delta = pres.f_shriek(&one).expect("divisible");
        let lhs = pres.exceptional_push(&delta).sub(&pres.center_class());
        assert_eq!(lhs, pres.q_poly().neg());
        // delta itself: P_N / t, with the printed extreme coefficients.
        assert_eq!(delta.coeff_named(&[("t", 21)]), rat_int(816293376));
        assert_eq!(delta.coeff_named(&[("t", 1), ("c2", 10)]), rat_int(1791590400));
    }

    #[test]
    fn exceptional_push_basics() {
        let pres = standard_blowup();
        let sig = pres.signature().clone();
        let t = gen(&sig, "t");
        assert_eq!(pres.exceptional_push(&GradedPoly::one(&sig)), t.neg());
        let beta = gen(&sig, "c2").mul(&t);
        assert_eq!(pres.exceptional_push(&beta), gen(&sig, "c2").mul(&t.pow(2)).neg());
    }

    #[test]
    fn divisor_case_q_is_t_plus_center() {
        let sig = blowup_sig();
        let center = gen(&sig, "H").pow(2);
        let pres = blowup_ring(vec![], vec![], &gen(&sig, "t"), &center);
        assert_eq!(pres.q_poly(), &gen(&sig, "t").add(&center));
    }

    #[test]
    fn strict_transform_of_a_disjoint_class_is_the_pullback() {
        let sig = RingSignature::new(&[("tau", 1), ("z", 1), ("H", 1), ("t", 1), ("c2", 2), ("c3", 3)]);
        let total = gen(&sig, "H").pow(3).mul(&gen(&sig, "c2"));
        let data = CenterData {
            normal_chern: normal_chern_poly(),
            weighted_segre: GradedPoly::one(&tangent_sig()),
            embedding: GradedPoly::zero(&tangent_sig()),
        };
        assert_eq!(strict_transform(&total, &data, 11), total);
    }

    #[test]
    fn strict_transform_reproduces_the_correction_bracket() {
        // Run the generic formula on the paper's center data and check its
        // exceptional part pushes to the dedicated corrections.
        let sig = RingSignature::new(&[("tau", 1), ("z", 1), ("t", 1), ("c2", 2), ("c3", 3)]);
        let total = GradedPoly::zero(&sig);
        let data = CenterData {
            normal_chern: normal_chern_poly(),
            weighted_segre: junction_normal_segre(12).untruncated(),
            embedding: junction_class(&tangent_sig()),
        };
        let tilde = strict_transform(&total, &data, 11);
        // tilde = t * bracket; push tau^j z^i times -1 * (that) after
        // dividing out one t and flipping sign, i.e. j_* = -t * lift.
        let bracket = divide_by_t(&tilde).expect("pure exceptional part");
        let out = moduli_sig();
        let minus_e = gen(&out, "E").neg();
        let c2 = gen(&out, "c2");
        for ((i, j), corr) in ctp_exceptional_corrections() {
            let weight = gen(&sig, "tau").pow(j).mul(&gen(&sig, "z").pow(i));
            let pushed = junction_push(&bracket.mul(&weight), &center_sig());
            let on_blowup = pushed.mul(&gen(&center_sig(), "t")).neg();
            let restricted = on_blowup.substitute(&[minus_e.clone(), c2.clone()]);
            assert_eq!(restricted, corr, "correction ({i},{j}) via strict_transform");
        }
    }
}
