//! Algebraic laws across the crate, checked with property tests on small
//! random instances and with seeded generator corpora.

use proptest::prelude::*;

use valdiff_core::coarsen::CoarseContext;
use valdiff_core::cuts::{classify_delta, ddeg_along_cut, growth_diagnostic, CutApprox};
use valdiff_core::diffpoly::DiffPoly;
use valdiff_core::oracle::{
    standard_rank1, standard_rank2, standard_rank2_inner_shift, GenConfig, InstanceGen,
};
use valdiff_core::ordgroup::{convex_subgroups, ConvexLevel, GroupVector};
use valdiff_core::residue::{RatFunc, Rationals, ResidueField};
use valdiff_core::series::{Frontier, Series};

const Q: Rationals = Rationals;

fn coords(rank: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, rank)
}

fn triple(rank: usize) -> impl Strategy<Value = (Vec<i64>, Vec<i64>, Vec<i64>)> {
    (coords(rank), coords(rank), coords(rank))
}

proptest! {
    #[test]
    fn lex_order_is_total_and_translation_invariant(
        (a, b, c) in prop_oneof![triple(1), triple(2), triple(3)]
    ) {
        let a = GroupVector::from_i64(&a);
        let b = GroupVector::from_i64(&b);
        let c = GroupVector::from_i64(&c);
        let lt = a < b;
        let eq = a == b;
        let gt = a > b;
        prop_assert_eq!([lt, eq, gt].iter().filter(|&&x| x).count(), 1);
        if lt {
            prop_assert!(a.add(&c) < b.add(&c));
        }
    }

    #[test]
    fn quotient_projection_is_an_ordered_homomorphism(
        (a, b, _) in triple(3),
        k in 0usize..=3
    ) {
        let level = ConvexLevel::new(k, 3).unwrap();
        let a = GroupVector::from_i64(&a);
        let b = GroupVector::from_i64(&b);
        prop_assert_eq!(level.project(&a.add(&b)), level.project(&a).add(&level.project(&b)));
        prop_assert_eq!(level.exceeds(&a), level.project(&a).is_positive());
    }

    #[test]
    fn arch_classes_are_convex_levels(
        (a, b, c) in triple(3)
    ) {
        let a = GroupVector::from_i64(&a);
        let b = GroupVector::from_i64(&b);
        let c = GroupVector::from_i64(&c);
        // o(.) as a class comparison is transitive.
        let o = |x: &GroupVector, y: &GroupVector| x.arch_class() > y.arch_class();
        if o(&a, &b) && o(&b, &c) {
            prop_assert!(o(&a, &c));
        }
        // Membership in each convex level is exactly a class threshold, and
        // levels are convex on sampled chains 0 <= x <= y.
        for level in convex_subgroups(3) {
            if !a.is_negative() && !b.sub(&a).is_negative() && level.contains(&b) {
                prop_assert!(level.contains(&a));
            }
        }
    }

    #[test]
    fn series_valuation_laws(
        (ea, eb) in (coords(2), coords(2)),
        (ca, cb) in (1i64..=5, -5i64..=-1)
    ) {
        // Monomials times units: v(ab) = v(a) + v(b).
        let a = Series::monomial(&Q, GroupVector::from_i64(&ea), Q.from_i64(ca));
        let b = Series::monomial(&Q, GroupVector::from_i64(&eb), Q.from_i64(cb));
        let ab = a.mul(&Q, &b);
        prop_assert_eq!(
            ab.valuation().unwrap(),
            a.valuation().unwrap().add(&b.valuation().unwrap())
        );
        // v(a+b) >= min, with equality at distinct valuations.
        let sum = a.add(&Q, &b);
        let min = a.valuation().unwrap().min(b.valuation().unwrap());
        if let Ok(v) = sum.valuation() {
            prop_assert!(v >= min.clone());
            if a.valuation().unwrap() != b.valuation().unwrap() {
                prop_assert_eq!(v, min);
            }
        }
    }
}

#[test]
fn product_valuations_on_generated_series() {
    let (f, spec) = standard_rank2();
    let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
    for _ in 0..300 {
        let a = gen.series_nonzero();
        let b = gen.series_nonzero();
        let ab = a.mul(&f, &b);
        assert_eq!(
            ab.valuation().unwrap(),
            a.valuation().unwrap().add(&b.valuation().unwrap())
        );
    }
}

#[test]
fn leibniz_rule_on_generated_series() {
    for (f, spec) in [standard_rank1(), standard_rank2(), standard_rank2_inner_shift()] {
        let mut gen = InstanceGen::new(&f, spec.clone(), GenConfig::default());
        for _ in 0..200 {
            let a = gen.series();
            let b = gen.series();
            let lhs = a.mul(&f, &b).derive(&f, &spec);
            let rhs = a
                .derive(&f, &spec)
                .mul(&f, &b)
                .add(&f, &a.mul(&f, &b.derive(&f, &spec)));
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn leibniz_rule_over_rational_functions() {
    use valdiff_core::series::{CoefDerivation, DerivationSpec};
    let f = RatFunc::default();
    let spec: DerivationSpec<RatFunc> = DerivationSpec::new(
        GroupVector::from_i64(&[0]),
        vec![f.parse_elem("x").unwrap()],
        CoefDerivation::Field,
    )
    .unwrap();
    let mut gen = InstanceGen::new(&f, spec.clone(), GenConfig::default());
    for _ in 0..60 {
        let a = gen.series();
        let b = gen.series();
        let lhs = a.mul(&f, &b).derive(&f, &spec);
        let rhs = a
            .derive(&f, &spec)
            .mul(&f, &b)
            .add(&f, &a.mul(&f, &b.derive(&f, &spec)));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn frontier_soundness_under_truncation() {
    // Recomputing with larger input frontiers never changes certified
    // coefficients below the smaller output frontier.
    let (f, spec) = standard_rank1();
    let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
    let cut = Frontier::Finite(GroupVector::from_i64(&[2]));
    for _ in 0..200 {
        let a = gen.series_nonzero();
        let b = gen.series_nonzero();
        let exact = a.mul(&f, &b);
        let coarse = a.truncate(&f, &cut).mul(&f, &b.truncate(&f, &cut));
        assert!(exact.equals_below(&f, &coarse, coarse.frontier()));
        let exact_sum = a.add(&f, &b);
        let coarse_sum = a.truncate(&f, &cut).add(&f, &b.truncate(&f, &cut));
        assert!(exact_sum.equals_below(&f, &coarse_sum, coarse_sum.frontier()));
    }
}

#[test]
fn ratfunc_lin_solve_order_zero_always_succeeds() {
    let f = RatFunc::default();
    let mut gen = InstanceGen::new(
        &f,
        valdiff_core::series::DerivationSpec::new(
            GroupVector::from_i64(&[0]),
            vec![f.one()],
            valdiff_core::series::CoefDerivation::Field,
        )
        .unwrap(),
        GenConfig::default(),
    );
    for _ in 0..100 {
        let a0 = {
            let mut c = gen.coef();
            while f.is_zero(&c) {
                c = gen.coef();
            }
            c
        };
        let y = f.lin_solve(std::slice::from_ref(&a0)).unwrap();
        assert_eq!(y, f.neg(&f.inv(&a0).unwrap()));
    }
}

#[test]
fn conjugation_laws_on_generated_polynomials() {
    for (f, spec) in [standard_rank1(), standard_rank2()] {
        let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
        for _ in 0..150 {
            let p = gen.poly();
            let a = gen.series();
            let b = gen.series_nonzero();
            let y = gen.series();
            // P_{+(a+b)} = (P_{+a})_{+b} and evaluation compatibility.
            assert_eq!(
                p.add_conj(&f, &a.add(&f, &b)),
                p.add_conj(&f, &a).add_conj(&f, &b)
            );
            assert_eq!(p.add_conj(&f, &a).eval(&f, &y), p.eval(&f, &a.add(&f, &y)));
            // P_{x(bc)} = (P_{xb})_{xc} on nonzero scalars.
            let c = gen.unit();
            assert_eq!(
                p.mul_conj(&f, &b.mul(&f, &c)).unwrap(),
                p.mul_conj(&f, &b).unwrap().mul_conj(&f, &c).unwrap()
            );
            assert_eq!(
                p.mul_conj(&f, &b).unwrap().eval(&f, &y),
                p.eval(&f, &b.mul(&f, &y))
            );
            // Degree is preserved by additive conjugation.
            assert_eq!(p.add_conj(&f, &a).degree(), p.degree());
            // Homogeneous parts decompose the polynomial.
            let mut acc = DiffPoly::zero(p.derivation().clone());
            for d in 0..=p.degree().unwrap() {
                acc = acc.add(&f, &p.hom_part(d));
            }
            assert_eq!(acc, p);
        }
    }
}

#[test]
fn scaling_shifts_coefficient_valuations() {
    let (f, spec) = standard_rank1();
    let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
    let t = Series::monomial(&f, GroupVector::from_i64(&[1]), f.one());
    for _ in 0..100 {
        let p = gen.poly();
        let scaled = p.scale_series(&f, &t);
        assert_eq!(
            scaled.v_poly(&f).unwrap(),
            p.v_poly(&f).unwrap().add(&GroupVector::from_i64(&[1]))
        );
    }
}

#[test]
fn dominant_degree_is_bounded_by_degree() {
    for (f, spec) in [standard_rank1(), standard_rank2()] {
        let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
        for _ in 0..200 {
            let p = gen.poly();
            assert!(p.ddeg(&f).unwrap() <= p.degree().unwrap());
        }
    }
}

#[test]
fn dominant_part_is_stable_under_small_perturbation() {
    let (f, spec) = standard_rank2();
    let mut gen = InstanceGen::new(&f, spec.clone(), GenConfig::default());
    for _ in 0..100 {
        let p = gen.poly();
        let v = p.v_poly(&f).unwrap();
        // Rescale a random polynomial so its coefficients sit strictly above
        // v(P), then perturb.
        let noise = gen.poly();
        let shift = v
            .sub(&noise.v_poly(&f).unwrap())
            .add(&GroupVector::from_i64(&[0, 1]));
        let q = p.add(
            &f,
            &noise.scale_series(&f, &Series::monomial(&f, shift, f.one())),
        );
        assert_eq!(p.dominant(&f).unwrap(), q.dominant(&f).unwrap());
    }
}

#[test]
fn specialization_is_a_ring_homomorphism_with_kernel_the_coarse_ideal() {
    let (f, spec) = standard_rank2();
    let ctx = CoarseContext::new(ConvexLevel::new(1, 2).unwrap()).unwrap();
    let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
    for _ in 0..200 {
        let a = gen.coarse_ring_element(&ctx);
        let b = gen.coarse_ring_element(&ctx);
        let sa = ctx.specialize_series(&f, &a).unwrap();
        let sb = ctx.specialize_series(&f, &b).unwrap();
        assert_eq!(ctx.specialize_series(&f, &a.add(&f, &b)).unwrap(), sa.add(&f, &sb));
        assert_eq!(ctx.specialize_series(&f, &a.mul(&f, &b)).unwrap(), sa.mul(&f, &sb));
        // Kernel: the image vanishes exactly when the coarse valuation is
        // positive.
        let in_kernel = sa.is_exact_zero();
        let positive = a
            .valuation()
            .map(|v| ctx.level().project(&v).is_positive())
            .unwrap_or(true);
        assert_eq!(in_kernel, positive);
    }
}

#[test]
fn specialization_commutes_with_derivation_and_conjugation() {
    for (f, spec) in [standard_rank2(), standard_rank2_inner_shift()] {
        let ctx = CoarseContext::new(ConvexLevel::new(1, 2).unwrap()).unwrap();
        let induced = ctx.specialize_derivation(&f, &spec).unwrap();
        let mut gen = InstanceGen::new(&f, spec.clone(), GenConfig::default());
        for _ in 0..150 {
            let a = gen.coarse_ring_element(&ctx);
            // Derivation compatibility on the coarse valuation ring.
            let lhs = ctx.specialize_series(&f, &a.derive(&f, &spec)).unwrap();
            let rhs = ctx.specialize_series(&f, &a).unwrap().derive(&f, &induced);
            assert_eq!(lhs, rhs);

            // Additive and multiplicative conjugation commute with
            // specialization.
            let p = gen.poly_in_coarse_ring(&ctx);
            let b = gen.coarse_ring_element(&ctx);
            let h = gen.coarse_unit(&ctx);
            let lhs = ctx.specialize_poly(&f, &p.add_conj(&f, &b)).unwrap();
            let rhs = ctx
                .specialize_poly(&f, &p)
                .unwrap()
                .add_conj(&f, &ctx.specialize_series(&f, &b).unwrap());
            assert_eq!(lhs, rhs);
            let lhs = ctx
                .specialize_poly(&f, &p.mul_conj(&f, &h).unwrap())
                .unwrap();
            let rhs = ctx
                .specialize_poly(&f, &p)
                .unwrap()
                .mul_conj(&f, &ctx.specialize_series(&f, &h).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn dominant_degree_transfers_to_the_specialization() {
    // ddeg Q = ddeg of the specialized polynomial for Q in the coarse ring
    // with a coarse-unit coefficient.
    let (f, spec) = standard_rank2();
    let ctx = CoarseContext::new(ConvexLevel::new(1, 2).unwrap()).unwrap();
    let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
    for _ in 0..200 {
        let q = gen.poly_in_coarse_ring(&ctx);
        let up = q.ddeg(&f).unwrap();
        let down = ctx.specialize_poly(&f, &q).unwrap().ddeg(&f).unwrap();
        assert_eq!(up, down);
    }
}

#[test]
fn cut_classification_is_invariant_under_transforms() {
    let (f, spec) = standard_rank2();
    let ctx = CoarseContext::new(ConvexLevel::new(1, 2).unwrap()).unwrap();
    let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
    for _ in 0..50 {
        let cut = gen.jammed_cut(&ctx, 3);
        let class = classify_delta(&cut, &ctx);
        // Shift by anything.
        let shifted = cut.shift(&f, &gen.series());
        assert_eq!(classify_delta(&shifted, &ctx), class);
        // Scale by a monomial with exponent inside the subgroup.
        let delta_exp = ctx
            .level()
            .embed_tail(&GroupVector::from_i64(&[2]));
        let scaled = cut
            .scale(&f, &Series::monomial(&f, delta_exp, f.one()))
            .unwrap();
        assert_eq!(classify_delta(&scaled, &ctx), class);
    }
}

#[test]
fn scale_law_links_cut_and_multiplicative_conjugate() {
    let (f, spec) = standard_rank1();
    let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
    for _ in 0..80 {
        let cut = gen.cut(3);
        let p = gen.poly();
        let y = gen.unit().mul(
            &f,
            &Series::monomial(&f, gen.exponent(), f.one()),
        );
        let lhs = ddeg_along_cut(&f, &p.mul_conj(&f, &y).unwrap(), &cut).unwrap();
        let rhs = ddeg_along_cut(&f, &p, &cut.scale(&f, &y).unwrap()).unwrap();
        assert_eq!(lhs.values, rhs.values);
    }
}

#[test]
fn cut_window_is_additive_over_products() {
    let (f, spec) = standard_rank1();
    let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
    for _ in 0..80 {
        let cut = gen.cut(3);
        let p = gen.poly();
        let q = gen.poly();
        let dp = ddeg_along_cut(&f, &p, &cut).unwrap();
        let dq = ddeg_along_cut(&f, &q, &cut).unwrap();
        let dpq = ddeg_along_cut(&f, &p.mul(&f, &q), &cut).unwrap();
        for i in 0..dpq.values.len() {
            assert_eq!(dpq.values[i], dp.values[i] + dq.values[i]);
        }
    }
}

#[test]
fn equivalent_prefixes_give_the_same_window() {
    let (f, spec) = standard_rank1();
    let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
    for _ in 0..80 {
        let cut = gen.cut(3);
        let p = gen.poly();
        // Perturb each point strictly above its gamma.
        let perturbed: Vec<Series<Rationals>> = cut
            .points()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let g = cut.gammas()[i.min(cut.gammas().len() - 1)].clone();
                let eps = Series::monomial(
                    &f,
                    g.add(&GroupVector::from_i64(&[1])),
                    f.from_i64(3),
                );
                a.add(&f, &eps)
            })
            .collect();
        let other = CutApprox::validate(&f, perturbed).unwrap();
        assert_eq!(other.gammas(), cut.gammas());
        let lhs = ddeg_along_cut(&f, &p, &cut).unwrap();
        let rhs = ddeg_along_cut(&f, &p, &other).unwrap();
        assert_eq!(lhs.values, rhs.values);
    }
}

#[test]
fn root_factor_forces_positive_window_values() {
    // For P = (Y - l) Q and a cut pseudoconverging to l, every window value
    // is at least one.
    let (f, spec) = standard_rank1();
    let mut gen = InstanceGen::new(&f, spec.clone(), GenConfig::default());
    for _ in 0..60 {
        let gammas = gen.increasing_exponents(3);
        let cut = gen.cut_along(&gammas);
        // The cut's pseudolimit target: extend the last point once more.
        let ell = cut.points().last().unwrap().add(
            &f,
            &Series::monomial(
                &f,
                gammas.last().unwrap().add(&GroupVector::from_i64(&[1])),
                f.one(),
            ),
        );
        let q = gen.poly();
        let p = DiffPoly::variable(&f, spec.clone(), 0)
            .sub(&f, &DiffPoly::constant(spec.clone(), ell))
            .mul(&f, &q);
        let window = ddeg_along_cut(&f, &p, &cut).unwrap();
        for d in &window.values {
            assert!(*d >= 1);
        }
    }
}

#[test]
fn growth_diagnostic_passes_on_small_contexts() {
    let (f, spec) = standard_rank2();
    let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
    for e in 1..=3usize {
        for _ in 0..20 {
            let p = gen.homogeneous_poly(e);
            let cut = gen.cut(3);
            let report = growth_diagnostic(&f, &p, &cut).unwrap();
            assert!(
                report.pass,
                "violation {:?} for degree {}",
                report.violation, e
            );
        }
    }
}
