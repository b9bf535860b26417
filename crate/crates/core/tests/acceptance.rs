//! Acceptance suite: one test per shipping criterion, each printing a
//! pass/fail line with its case count. Every tolerance and corpus size is
//! pinned here; run with `cargo test --test acceptance -- --nocapture` to see
//! the lines.

use std::time::Instant;

use valdiff_core::coarsen::CoarseContext;
use valdiff_core::cuts::{classify_delta, ddeg_along_cut, growth_diagnostic, DeltaClass};
use valdiff_core::dhensel::{dh_solve, Residual, SolveOptions, SolveStatus};
use valdiff_core::diffpoly::DiffPoly;
use valdiff_core::oracle::{
    brute_dominant, standard_rank1, standard_rank2, standard_rank2_inner_shift, GenConfig,
    InstanceGen,
};
use valdiff_core::ordgroup::{ConvexLevel, GroupVector};
use valdiff_core::residue::{RatFunc, Rationals, ResidueField};
use valdiff_core::series::{CoefDerivation, DerivationSpec, Frontier, Series};

const Q: Rationals = Rationals;

fn report(name: &str, cases: usize, failures: usize) {
    let verdict = if failures == 0 { "PASS" } else { "FAIL" };
    println!("[{}] {}: {} cases, {} failures", verdict, name, cases, failures);
    assert_eq!(failures, 0, "{}: {} of {} cases failed", name, failures, cases);
}

#[test]
fn criterion_01_dominant_multiplicativity() {
    let start = Instant::now();
    let mut cases = 0;
    let mut failures = 0;
    for (seed, (f, spec)) in [(11u64, standard_rank1()), (12, standard_rank2())] {
        let mut gen = InstanceGen::new(&f, spec, GenConfig { seed, ..GenConfig::default() });
        for _ in 0..250 {
            let p = gen.poly();
            let q = gen.poly();
            cases += 1;
            let dp = p.dominant(&f).unwrap();
            let dq = q.dominant(&f).unwrap();
            let dpq = p.mul(&f, &q).dominant(&f).unwrap();
            let additive = dpq.ddeg == dp.ddeg + dq.ddeg;
            let scalar = dpq
                .dpart
                .scalar_ratio(&f, &dp.dpart.mul(&f, &dq.dpart))
                .is_some();
            if !additive || !scalar {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {:?}", elapsed);
    report("dominant multiplicativity", cases, failures);
}

#[test]
fn criterion_02_ddeg_geq_well_defined_and_antitone() {
    let mut cases = 0;
    let mut failures = 0;
    for (seed, (f, spec)) in [(21u64, standard_rank1()), (22, standard_rank2())] {
        let mut gen = InstanceGen::new(&f, spec, GenConfig { seed, ..GenConfig::default() });
        for _ in 0..150 {
            let p = gen.poly();
            let gamma = gen.exponent();
            let unit = gen.unit();
            let higher = gamma.add(&gen.exponent_nonnegative());
            cases += 1;
            let base = p.ddeg_geq(&f, &gamma).unwrap();
            let conjugator = unit.mul(&f, &Series::monomial(&f, gamma.clone(), f.one()));
            let with_unit = p.mul_conj(&f, &conjugator).unwrap().ddeg(&f).unwrap();
            let above = p.ddeg_geq(&f, &higher).unwrap();
            if with_unit != base || above > base {
                failures += 1;
            }
        }
    }
    report("ddeg at-or-beyond well-definedness and antitonicity", cases, failures);
}

#[test]
fn criterion_03_root_necessity() {
    let mut cases = 0;
    let mut failures = 0;
    for (seed, (f, spec)) in [(31u64, standard_rank1()), (32, standard_rank2())] {
        let mut gen = InstanceGen::new(&f, spec.clone(), GenConfig { seed, ..GenConfig::default() });
        for _ in 0..100 {
            let root = gen.series_nonzero();
            let q = gen.poly();
            let p = DiffPoly::variable(&f, spec.clone(), 0)
                .sub(&f, &DiffPoly::constant(spec.clone(), root.clone()))
                .mul(&f, &q);
            let below = root.valuation().unwrap().sub(&gen.exponent_nonnegative());
            cases += 1;
            if p.ddeg_geq(&f, &below).unwrap() < 1 {
                failures += 1;
            }
        }
    }
    report("conjugate degree of a polynomial with a small root", cases, failures);
}

#[test]
fn criterion_04_specialization_transfer() {
    let mut cases = 0;
    let mut failures = 0;
    let level = ConvexLevel::new(1, 2).unwrap();
    let ctx = CoarseContext::new(level).unwrap();
    // Conjugation transfer on 200 random triples.
    for (seed, (f, spec)) in [
        (41u64, standard_rank2()),
        (42, standard_rank2_inner_shift()),
    ] {
        let mut gen = InstanceGen::new(&f, spec, GenConfig { seed, ..GenConfig::default() });
        for _ in 0..100 {
            let p = gen.poly_in_coarse_ring(&ctx);
            let b = gen.coarse_ring_element(&ctx);
            let h = gen.coarse_unit(&ctx);
            cases += 1;
            let p_dot = ctx.specialize_poly(&f, &p).unwrap();
            let b_dot = ctx.specialize_series(&f, &b).unwrap();
            let h_dot = ctx.specialize_series(&f, &h).unwrap();

            let up_add = p.add_conj(&f, &b).ddeg(&f).unwrap();
            let down_add = p_dot.add_conj(&f, &b_dot).ddeg(&f).unwrap();
            let up_mul = p.mul_conj(&f, &h).unwrap().ddeg(&f).unwrap();
            let down_mul = p_dot.mul_conj(&f, &h_dot).unwrap().ddeg(&f).unwrap();
            if up_add != down_add || up_mul != down_mul {
                failures += 1;
            }
        }
    }
    // Jammed-cut transfer on 50 constructed cuts.
    let (f, spec) = standard_rank2();
    let mut gen = InstanceGen::new(&f, spec, GenConfig { seed: 43, ..GenConfig::default() });
    for _ in 0..50 {
        let p = gen.poly_in_coarse_ring(&ctx);
        let cut = gen.jammed_cut(&ctx, 4);
        cases += 1;
        assert_eq!(classify_delta(&cut, &ctx), DeltaClass::Jammed);
        let p_dot = ctx.specialize_poly(&f, &p).unwrap();
        let points_dot = cut
            .points()
            .iter()
            .map(|a| ctx.specialize_series(&f, a).unwrap())
            .collect::<Vec<_>>();
        let cut_dot =
            valdiff_core::cuts::CutApprox::validate(&f, points_dot).unwrap();
        let up = ddeg_along_cut(&f, &p, &cut).unwrap();
        let down = ddeg_along_cut(&f, &p_dot, &cut_dot).unwrap();
        if up.values != down.values
            || up.stabilized != down.stabilized
            || up.approx() != down.approx()
        {
            failures += 1;
        }
    }
    report("transfer of dominant degree under specialization", cases, failures);
}

#[test]
fn criterion_05_coarse_bound_on_fluent_cuts() {
    let mut cases = 0;
    let mut failures = 0;
    let ctx = CoarseContext::new(ConvexLevel::new(1, 2).unwrap()).unwrap();
    let (f, spec) = standard_rank2();
    let mut gen = InstanceGen::new(&f, spec, GenConfig { seed: 51, ..GenConfig::default() });
    for _ in 0..100 {
        let p = gen.poly();
        let cut = gen.fluent_cut(&ctx, 3);
        cases += 1;
        assert_eq!(classify_delta(&cut, &ctx), DeltaClass::Fluent);
        let fine = ddeg_along_cut(&f, &p, &cut).unwrap();
        // Coarse analogue, pointwise along the same window.
        let mut ok = true;
        let mut coarse_values = Vec::new();
        for (point, gamma) in cut.points().iter().zip(cut.gammas()) {
            let conj = p.add_conj(&f, point);
            let coarse = ctx
                .ddeg_coarse(&f, &conj, &ctx.level().project(gamma))
                .unwrap();
            coarse_values.push(coarse);
        }
        for (fine_d, coarse_d) in fine.values.iter().zip(&coarse_values) {
            if fine_d > coarse_d {
                ok = false;
            }
        }
        if fine.stabilized && *coarse_values.last().unwrap() < fine.approx() {
            ok = false;
        }
        if !ok {
            failures += 1;
        }
    }
    report("coarse dominant degree bounds the fine one on fluent cuts", cases, failures);
}

#[test]
fn criterion_06_cut_monotonicity() {
    let mut cases = 0;
    let mut failures = 0;
    for (seed, (f, spec)) in [(61u64, standard_rank1()), (62, standard_rank2())] {
        let mut gen = InstanceGen::new(&f, spec, GenConfig { seed, ..GenConfig::default() });
        for _ in 0..150 {
            let p = gen.poly();
            let cut = gen.cut(4);
            cases += 1;
            let window = ddeg_along_cut(&f, &p, &cut).unwrap();
            if window.values.windows(2).any(|w| w[1] > w[0]) {
                failures += 1;
            }
        }
    }
    report("window values along a cut never increase", cases, failures);
}

#[test]
fn criterion_07_growth_diagnostic() {
    let mut cases = 0;
    let mut failures = 0;
    let (f, spec) = standard_rank2();
    let mut gen = InstanceGen::new(&f, spec, GenConfig { seed: 71, ..GenConfig::default() });
    let ctx = CoarseContext::new(ConvexLevel::new(1, 2).unwrap()).unwrap();
    for i in 0..100 {
        let degree = 1 + (i % 4);
        let p = gen.homogeneous_poly(degree);
        // Alternate between cuts inside the convex subgroup (class 1) and
        // cuts at a fixed head (class 0).
        let cut = if i % 2 == 0 {
            gen.jammed_cut(&ctx, 3)
        } else {
            let head = 1 + (i as i64 % 3);
            let mut tails = Vec::new();
            let mut b = -2i64;
            for _ in 0..3 {
                tails.push(b);
                b += 2;
            }
            let gammas: Vec<GroupVector> = tails
                .iter()
                .map(|&b| GroupVector::from_i64(&[head, b]))
                .collect();
            gen.cut_along(&gammas)
        };
        cases += 1;
        let diag = growth_diagnostic(&f, &p, &cut).unwrap();
        if !diag.pass {
            failures += 1;
        }
    }
    report("homogeneous growth profile along class-uniform cuts", cases, failures);
}

#[test]
fn criterion_08_rank1_small_implies_monotone() {
    let mut cases = 0;
    let mut failures = 0;
    // Exhaustive over shifts in [-3,3] and a grid of weight patterns, for
    // both residue fields and both coefficient derivations.
    let rationals_weights: Vec<<Rationals as ResidueField>::Elem> = ["0", "1", "-1", "2", "1/2"]
        .iter()
        .map(|s| Q.parse_elem(s).unwrap())
        .collect();
    for rho in -3i64..=3 {
        for w in &rationals_weights {
            for coef in [CoefDerivation::Trivial, CoefDerivation::Field] {
                let spec = DerivationSpec::new(
                    GroupVector::from_i64(&[rho]),
                    vec![w.clone()],
                    coef,
                )
                .unwrap();
                cases += 1;
                if spec.small_check(&Q).pass && !spec.monotone_check(&Q).pass {
                    failures += 1;
                }
            }
        }
    }
    let rf = RatFunc::default();
    let ratfunc_weights: Vec<<RatFunc as ResidueField>::Elem> = ["0", "1", "x", "-x+1"]
        .iter()
        .map(|s| rf.parse_elem(s).unwrap())
        .collect();
    for rho in -3i64..=3 {
        for w in &ratfunc_weights {
            for coef in [CoefDerivation::Trivial, CoefDerivation::Field] {
                let spec = DerivationSpec::new(
                    GroupVector::from_i64(&[rho]),
                    vec![w.clone()],
                    coef,
                )
                .unwrap();
                cases += 1;
                if spec.small_check(&rf).pass && !spec.monotone_check(&rf).pass {
                    failures += 1;
                }
            }
        }
    }
    report("rank-1 small derivations are monotone", cases, failures);
}

#[test]
fn criterion_09_hensel_refiner() {
    let start = Instant::now();
    let mut cases = 0;
    let mut failures = 0;
    let (f, spec) = standard_rank1();
    let target = GroupVector::from_i64(&[12]);
    let mut gen = InstanceGen::new(&f, spec.clone(), GenConfig { seed: 91, ..GenConfig::default() });
    for _ in 0..100 {
        let p = gen.dh_instance();
        cases += 1;
        let report = dh_solve(&f, &p, &SolveOptions::new(target.clone())).unwrap();
        let solved = report.status == SolveStatus::Solved;
        // Independent confirmation by direct evaluation.
        let residual = p.eval(&f, &report.y);
        let confirmed = residual.is_exact_zero()
            || residual.valuation().map(|v| v > target).unwrap_or(false);
        if !solved || !confirmed {
            failures += 1;
        }
    }

    // The three worked examples.
    let t = Series::monomial(&f, GroupVector::from_i64(&[1]), f.one());
    let y_var = DiffPoly::variable(&f, spec.clone(), 0);
    let y1_var = DiffPoly::variable(&f, spec.clone(), 1);

    // t + Y + Y' -> -t/2 exactly.
    cases += 1;
    let p = DiffPoly::constant(spec.clone(), t.clone())
        .add(&f, &y_var)
        .add(&f, &y1_var);
    let rep = dh_solve(&f, &p, &SolveOptions::new(GroupVector::from_i64(&[10]))).unwrap();
    let expected = t.scale_coef(&f, &f.parse_elem("-1/2").unwrap());
    if rep.status != SolveStatus::Solved || rep.residual != Residual::ExactZero || rep.y != expected
    {
        failures += 1;
    }

    // t + Y -> -t exactly.
    cases += 1;
    let p = DiffPoly::constant(spec.clone(), t.clone()).add(&f, &y_var);
    let rep = dh_solve(&f, &p, &SolveOptions::new(GroupVector::from_i64(&[10]))).unwrap();
    if rep.status != SolveStatus::Solved
        || rep.residual != Residual::ExactZero
        || rep.y != t.neg(&f)
    {
        failures += 1;
    }

    // t + Y + tY^2 -> -t - t^3 + O(t^5) at target 5.
    cases += 1;
    let p = DiffPoly::constant(spec.clone(), t.clone())
        .add(&f, &y_var)
        .add(&f, &y_var.pow(&f, 2).scale_series(&f, &t));
    let rep = dh_solve(&f, &p, &SolveOptions::new(GroupVector::from_i64(&[5]))).unwrap();
    let prefix = t.neg(&f).sub(&f, &Series::monomial(&f, GroupVector::from_i64(&[3]), f.one()));
    let matches_prefix = rep
        .y
        .equals_below(&f, &prefix, &Frontier::Finite(GroupVector::from_i64(&[5])));
    let deep = match &rep.residual {
        Residual::ExactZero => true,
        Residual::Valuation(v) => *v > GroupVector::from_i64(&[5]),
        Residual::BeyondFrontier(fr) => *fr > GroupVector::from_i64(&[5]),
    };
    if rep.status != SolveStatus::Solved || !matches_prefix || !deep {
        failures += 1;
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {:?}", elapsed);
    report("hensel refiner solves generated and worked instances", cases, failures);
}

#[test]
fn criterion_10_oracle_equivalence() {
    let mut cases = 0;
    let mut failures = 0;
    // Dominant data: implementation vs brute force, 1000 instances.
    for (seed, (f, spec)) in [(101u64, standard_rank1()), (102, standard_rank2())] {
        let mut gen = InstanceGen::new(&f, spec, GenConfig { seed, ..GenConfig::default() });
        for _ in 0..500 {
            let p = gen.poly();
            cases += 1;
            if p.dominant(&f).unwrap() != brute_dominant(&f, &p).unwrap() {
                failures += 1;
            }
        }
    }
    // Conjugation evaluation identities, 500 instances.
    for (seed, (f, spec)) in [(103u64, standard_rank1()), (104, standard_rank2())] {
        let mut gen = InstanceGen::new(&f, spec, GenConfig { seed, ..GenConfig::default() });
        for _ in 0..250 {
            let p = gen.poly();
            let a = gen.series();
            let y = gen.series();
            let b = gen.series_nonzero();
            cases += 1;
            let add_ok = p.add_conj(&f, &a).eval(&f, &y) == p.eval(&f, &a.add(&f, &y));
            let mul_ok = p.mul_conj(&f, &b).unwrap().eval(&f, &y)
                == p.eval(&f, &b.mul(&f, &y));
            if !add_ok || !mul_ok {
                failures += 1;
            }
        }
    }
    report("brute-force oracles agree with the implementation", cases, failures);
}
