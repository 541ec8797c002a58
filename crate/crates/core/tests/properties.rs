use proptest::prelude::*;
use weakval::algebra::{apply, fidelity, hermitian_eigensystem, inner, projector_onto, tensor_ket, Cplx, Ket, Op};
use weakval::interferometer::{
    build_nested_mzi, detector_amplitude, projector_weak_value_at, propagate, propagate_first_order, propagate_paths,
    Element, NestedMziParams, NetworkState, PathNetwork, TapSpec,
};
use weakval::weakmeas::{
    analytic_weak_value, derailment_check, exact_coupled_joint, g_sweep, CoupledJoint, MeterModel, PointerShiftProbe,
    SweepTarget,
};
use weakval::{tolerances, Error};

fn cplx() -> impl Strategy<Value = Cplx> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Cplx::new(re, im))
}

fn ket(dim: usize) -> impl Strategy<Value = Ket> {
    prop::collection::vec(cplx(), dim)
        .prop_filter("non-zero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|v| Ket::new(v).unwrap())
}

fn hermitian(dim: usize) -> impl Strategy<Value = Op> {
    prop::collection::vec(cplx(), dim * dim).prop_map(move |raw| {
        let m = Op::new(dim, raw).unwrap();
        m.add(&m.adjoint()).unwrap().scaled(Cplx::new(0.5, 0.0)).verified()
    })
}

fn dim_and<T: std::fmt::Debug>(
    lo: usize,
    hi: usize,
    f: impl Fn(usize) -> BoxedStrategy<T> + 'static,
) -> impl Strategy<Value = T> {
    (lo..=hi).prop_flat_map(f)
}

fn max_abs(a: &[Cplx], b: &[Cplx]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn self_inner_is_norm_squared(a in dim_and(1, 12, |d| ket(d).boxed())) {
        let v = inner(&a, &a).unwrap();
        prop_assert!((v.norm() - a.norm_sqr()).abs() <= 1e-12);
        prop_assert!(v.im.abs() <= 1e-12);
    }

    #[test]
    fn apply_is_linear(
        (m, a, b) in dim_and(1, 8, |d| (hermitian(d), ket(d), ket(d)).boxed()),
        alpha in cplx(),
        beta in cplx(),
    ) {
        let combo = a.scaled(alpha).add_scaled(beta, &b).unwrap();
        let lhs = apply(&m, &combo).unwrap();
        let rhs = apply(&m, &a).unwrap().scaled(alpha).add_scaled(beta, &apply(&m, &b).unwrap()).unwrap();
        prop_assert!(max_abs(lhs.amps(), rhs.amps()) <= 1e-12);
    }

    #[test]
    fn projector_onto_is_a_projector(v in dim_and(1, 10, |d| ket(d).boxed())) {
        let p = projector_onto(&v).unwrap();
        prop_assert!(p.idempotence_deviation() <= 1e-12);
        prop_assert!(p.hermitian_deviation() <= 1e-12);
        prop_assert!(p.flags().projector.is_verified());
    }

    #[test]
    fn tensor_round_trip((a, b) in (1usize..=6, 1usize..=6).prop_flat_map(|(x, y)| (ket(x), ket(y)))) {
        let (sa, sb) = tensor_ket(&a, &b).factorize().unwrap();
        prop_assert!(fidelity(&sa, &a).unwrap() >= 1.0 - 1e-12);
        prop_assert!(fidelity(&sb, &b).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn eigensystem_reconstructs(m in dim_and(1, 16, |d| hermitian(d).boxed())) {
        let sys = hermitian_eigensystem(&m).unwrap();
        prop_assert!(max_abs(sys.reconstruct().entries(), m.entries()) <= 1e-10);
        for (i, u) in sys.vectors.iter().enumerate() {
            for (j, w) in sys.vectors.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((inner(u, w).unwrap() - expect).norm() <= 1e-10);
            }
        }
        prop_assert!(sys.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn weak_value_phase_and_scale_invariance(
        (s, a, b) in dim_and(2, 5, |d| (hermitian(d), ket(d), ket(d)).boxed()),
        theta in 0.0..6.3f64, phi in 0.0..6.3f64, c in 0.1..10.0f64, d in 0.1..10.0f64,
    ) {
        prop_assume!(inner(&b.normalized().unwrap(), &a.normalized().unwrap()).unwrap().norm() > 0.1);
        let w = analytic_weak_value(&s, &a, &b).unwrap().value;
        let a2 = a.scaled(Cplx::from_polar(c, theta));
        let b2 = b.scaled(Cplx::from_polar(d, phi));
        let w2 = analytic_weak_value(&s, &a2, &b2).unwrap().value;
        prop_assert!((w - w2).norm() <= 1e-12 * (1.0 + w.norm()));
    }

    #[test]
    fn weak_value_is_linear_in_the_observable(
        (s, a, b) in dim_and(2, 5, |d| (hermitian(d), ket(d), ket(d)).boxed()),
        alpha in cplx(),
    ) {
        prop_assume!(inner(&b.normalized().unwrap(), &a.normalized().unwrap()).unwrap().norm() > 0.1);
        let w = analytic_weak_value(&s, &a, &b).unwrap().value;
        let ws = analytic_weak_value(&s.scaled(alpha), &a, &b).unwrap().value;
        prop_assert!((ws - alpha * w).norm() <= 1e-10 * (1.0 + w.norm()));
        let wi = analytic_weak_value(&Op::identity(a.dim()), &a, &b).unwrap().value;
        prop_assert!((wi - 1.0).norm() <= 1e-12);
    }

    #[test]
    fn derailment_paths_agree(
        (s, a) in dim_and(2, 6, |d| (hermitian(d), ket(d)).boxed()),
        centered in any::<bool>(),
    ) {
        let a = a.normalized().unwrap();
        // Subtracting the expectation value forces ⟨in|S|in⟩ = 0.
        let s = if centered {
            let e = inner(&a, &apply(&s, &a).unwrap()).unwrap().re;
            s.sub(&Op::identity(a.dim()).scaled(Cplx::new(e, 0.0))).unwrap()
        } else {
            s
        };
        let tol = 1e-10;
        let r = derailment_check(&s, &a, tol).unwrap();
        let s_in = apply(&s, &a).unwrap();
        let direct = inner(&a, &s_in).unwrap().norm() <= tol && s_in.norm() > tol;
        prop_assert_eq!(r.derailed, direct);
        prop_assert!((r.expectation - r.overlap_with_in).norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_coupling_is_unitary(
        (s, a) in dim_and(1, 8, |d| (hermitian(d), ket(d)).boxed()),
        g in 0.0..=1.0f64,
        grid in any::<bool>(),
    ) {
        let a = a.normalized().unwrap();
        let meter = if grid { MeterModel::grid_default(1.0).unwrap() } else { MeterModel::analytic(1.0).unwrap() };
        let joint = exact_coupled_joint(&a, &meter, &s, g).unwrap();
        prop_assert!((joint.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn raw_pointer_shift_sweep_is_continuous(
        (s, a, b) in dim_and(2, 3, |d| (hermitian(d), ket(d), ket(d)).boxed()),
    ) {
        prop_assume!(inner(&b.normalized().unwrap(), &a.normalized().unwrap()).unwrap().norm() > 0.1);
        let probe = PointerShiftProbe {
            observable: s,
            input: a,
            fin: b,
            meter: MeterModel::analytic(1.0).unwrap(),
        };
        let r = g_sweep(&probe, &[1e-3, 5e-4, 2.5e-4, 1.25e-4], SweepTarget::Raw, tolerances::DISCONTINUITY).unwrap();
        prop_assert!(!r.discontinuity_flag, "limit {}", r.extrapolated_limit);
    }
}

#[derive(Debug, Clone)]
enum StageSpec {
    Bs(usize, usize, f64),
    Phase(usize, f64),
    Relabel(usize, usize),
    Tap(usize, f64),
}

fn stage_spec(n: usize) -> impl Strategy<Value = StageSpec> {
    prop_oneof![
        (0..n, 0..n, 0.0..=1.0f64).prop_map(|(a, b, t)| StageSpec::Bs(a, b, t)),
        (0..n, -3.2..3.2f64).prop_map(|(a, p)| StageSpec::Phase(a, p)),
        (0..n, 0..n).prop_map(|(a, b)| StageSpec::Relabel(a, b)),
        (0..n, 0.0..0.5f64).prop_map(|(a, g)| StageSpec::Tap(a, g)),
    ]
}

fn random_network(n: usize, specs: &[StageSpec], meter: MeterModel, taps: bool) -> PathNetwork {
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let stages = specs
        .iter()
        .filter_map(|s| match *s {
            StageSpec::Bs(a, b, t) if a != b => Some(Element::beam_splitter(&names[a], &names[b], t)),
            StageSpec::Phase(a, p) => Some(Element::phase(&names[a], p)),
            StageSpec::Relabel(a, b) if a != b => Some(Element::relabel(&names[a], &names[b])),
            StageSpec::Tap(a, g) if taps => Some(Element::tap(&names[a], g, meter)),
            _ => None,
        })
        .take(12)
        .collect();
    PathNetwork::new(names.clone(), stages, names[0].clone(), names[n - 1].clone()).unwrap()
}

fn network_case() -> impl Strategy<Value = (usize, Vec<StageSpec>)> {
    (2usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(stage_spec(n), 0..=12)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn network_propagation_preserves_norm((n, specs) in network_case()) {
        let analytic = random_network(n, &specs, MeterModel::analytic(0.8).unwrap(), true);
        prop_assert!((propagate(&analytic, None).unwrap().norm() - 1.0).abs() <= 1e-12);
        prop_assert!(analytic.path_unitary().unitary_deviation() <= 1e-12);
    }

    #[test]
    fn zero_strength_taps_change_nothing((n, specs) in network_case()) {
        let tapped = random_network(n, &specs, MeterModel::analytic(1.0).unwrap(), true)
            .with_tap_strength(0.0)
            .unwrap();
        let plain = tapped.without_taps();
        let reference = propagate_paths(&plain, plain.stages().len()).unwrap();
        match propagate(&tapped, None).unwrap() {
            NetworkState::Paths(k) => prop_assert_eq!(k, reference),
            NetworkState::Joint(CoupledJoint::Branches(b)) => {
                prop_assert_eq!(b.branches().len(), 1);
                prop_assert_eq!(&b.branches()[0].system, &reference);
            }
            NetworkState::Joint(_) => prop_assert!(false, "analytic meters expected"),
        }
    }

    #[test]
    fn projector_weak_values_are_complete((n, specs) in network_case()) {
        let net = random_network(n, &specs, MeterModel::analytic(1.0).unwrap(), false);
        // Weak values scale like 1/⟨fin|in⟩, so near-dark detectors amplify round-off.
        prop_assume!(detector_amplitude(&net).unwrap().norm() > 1e-3);
        for stage in 0..=net.stages().len() {
            let mut total = Cplx::new(0.0, 0.0);
            let mut defined = true;
            for label in net.paths() {
                match projector_weak_value_at(&net, label, stage) {
                    Ok(w) => total += w.value,
                    Err(Error::OrthogonalPostselection { .. }) => { defined = false; break; }
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                }
            }
            if defined {
                prop_assert!((total - 1.0).norm() <= 1e-10, "stage {}: {}", stage, total);
            }
        }
    }
}

#[test]
fn first_order_tap_remainder_is_quadratic() {
    let meter = MeterModel::grid_default(1.0).unwrap();
    let remainder = |g: f64| {
        let net = build_nested_mzi(NestedMziParams::default(), Some(TapSpec { arm: "B", g, meter })).unwrap();
        let (NetworkState::Joint(CoupledJoint::Grid(exact)), NetworkState::Joint(CoupledJoint::Grid(first))) = (
            propagate(&net, None).unwrap(),
            propagate_first_order(&net, None).unwrap(),
        ) else {
            panic!("grid joint states expected");
        };
        max_l2(exact.amps(), first.amps())
    };
    let (r1, r2) = (remainder(1e-2), remainder(5e-3));
    let ratio = r1 / r2;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

fn max_l2(a: &[Cplx], b: &[Cplx]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}
