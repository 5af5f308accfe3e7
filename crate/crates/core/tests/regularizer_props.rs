use csreg::linalg::{eig_real, orthonormal_columns, singular_values, standard_normal_matrix};
use csreg::regularizers::{
    auto_scale_value, closed_form_beta, cs_grad, cs_value, eval_bin, eval_om, holder_value,
    scale_invariant_value, BetaMode,
};
use csreg::{DenseMatrix, DenseVector, RegularizerKind, RngStream};
use proptest::prelude::*;

const N: usize = 8;
const K: usize = 3;

/// Every kind with the flat input length it expects.
fn all_kinds(rng: &mut RngStream) -> Vec<(RegularizerKind, usize)> {
    let c = standard_normal_matrix(N, N, rng);
    let ns = standard_normal_matrix(N - 3, N, rng);
    vec![
        (RegularizerKind::Bin, N),
        (RegularizerKind::Osb, N),
        (RegularizerKind::Ter, N),
        (RegularizerKind::Eig(c), N),
        (RegularizerKind::Om { k: K }, N * K),
        (RegularizerKind::Equ { bits: 2 }, 2 * N),
        (RegularizerKind::Equ { bits: 3 }, 3 * N),
        (RegularizerKind::BBin, N),
        (RegularizerKind::BinExp, N),
        (RegularizerKind::NonDiffSq, N),
        (RegularizerKind::NonDiffRoot, N),
        (RegularizerKind::FixedScale(0.7), N),
        (RegularizerKind::Ns(ns), N),
        (RegularizerKind::BaselineBinBeta(BetaMode::Fixed(1.0)), N),
        (RegularizerKind::BaselineBinBeta(BetaMode::Joint), N + 1),
    ]
}

/// `‖g‖²‖h‖²`, or a comparable magnitude for kinds without a pair.
fn first_term(kind: &RegularizerKind, x: &DenseVector) -> f64 {
    match kind.pair() {
        Some(pair) => {
            let (g, h) = (pair.g(x), pair.h(x));
            match kind {
                RegularizerKind::NonDiffRoot => g.norm() * h.norm(),
                _ => g.norm_squared() * h.norm_squared(),
            }
        }
        None => x.iter().map(|v| v.powi(4)).sum::<f64>() + 1.0,
    }
}

fn sign_vector(rng: &mut RngStream, n: usize) -> DenseVector {
    DenseVector::from_fn(n, |_, _| if rng.coin() { 1.0 } else { -1.0 })
}

/// A random member of the zero set of `kind`.
fn member(kind: &RegularizerKind, alpha: f64, rng: &mut RngStream) -> DenseVector {
    match kind {
        RegularizerKind::Bin | RegularizerKind::BBin | RegularizerKind::BinExp => {
            sign_vector(rng, N) * alpha
        }
        RegularizerKind::Osb => {
            DenseVector::from_fn(N, |_, _| if rng.coin() { alpha } else { 0.0 })
        }
        RegularizerKind::Ter => DenseVector::from_fn(N, |_, _| match rng.index(3) {
            0 => -alpha,
            1 => 0.0,
            _ => alpha,
        }),
        RegularizerKind::Eig(c) => {
            let pairs = eig_real(c).unwrap();
            let (_, v) = &pairs[rng.index(pairs.len())];
            v * alpha
        }
        RegularizerKind::Om { k } => {
            let q = orthonormal_columns(&standard_normal_matrix(N, *k, rng));
            DenseVector::from_column_slice(q.as_slice()) * alpha
        }
        RegularizerKind::Equ { bits } => {
            let mut parts = Vec::new();
            for b in 0..*bits {
                let part = sign_vector(rng, N) * (alpha * 2f64.powi(b as i32));
                parts.extend(part.iter().copied());
            }
            DenseVector::from_vec(parts)
        }
        RegularizerKind::FixedScale(a) => sign_vector(rng, N) * *a,
        other => panic!("no member generator for {}", other.name()),
    }
}

fn random_point(rng: &mut RngStream, len: usize, log_scale: f64) -> DenseVector {
    rng.normal_vector(len) * 10f64.powf(log_scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn every_kind_is_nonnegative(seed in any::<u64>(), log_scale in -2.0f64..2.0) {
        let mut rng = RngStream::new(seed, 0);
        for (kind, len) in all_kinds(&mut rng) {
            let x = random_point(&mut rng, len, log_scale);
            let value = kind.value(&x).unwrap();
            prop_assert!(value >= -1e-12 * first_term(&kind, &x), "{}: {value}", kind.name());
        }
    }

    #[test]
    fn no_spurious_stationary_points(seed in any::<u64>(), log_scale in -1.0f64..1.0) {
        let mut rng = RngStream::new(seed, 1);
        let kinds = [
            (RegularizerKind::Bin, N),
            (RegularizerKind::Osb, N),
            (RegularizerKind::Ter, N),
            (RegularizerKind::Om { k: K }, N * K),
            (RegularizerKind::Equ { bits: 2 }, 2 * N),
        ];
        for (kind, len) in kinds {
            let x = random_point(&mut rng, len, log_scale);
            let grad = kind.gradient(&x).unwrap();
            let scale = x.norm().powi(3);
            prop_assert!(grad.norm() > 1e-12 * scale, "{} at {x}", kind.name());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn zero_set_soundness(seed in any::<u64>(), alpha in 0.3f64..3.0) {
        let mut rng = RngStream::new(seed, 2);
        let c = standard_normal_matrix(N, N, &mut rng);
        let sym = (&c + c.transpose()) * 0.5;
        let kinds = [
            RegularizerKind::Bin,
            RegularizerKind::Osb,
            RegularizerKind::Ter,
            RegularizerKind::Eig(sym),
            RegularizerKind::Om { k: K },
            RegularizerKind::Equ { bits: 2 },
            RegularizerKind::BBin,
            RegularizerKind::BinExp,
            RegularizerKind::FixedScale(alpha),
        ];
        for kind in kinds {
            let x = member(&kind, alpha, &mut rng);
            let threshold = match kind {
                // bounded by N², so a norm-based threshold would swamp them
                RegularizerKind::BBin | RegularizerKind::BinExp => 1e-12 * (N * N) as f64,
                _ => 1e-9 * (1.0 + x.norm().powi(8)),
            };
            let on = kind.value(&x).unwrap();
            prop_assert!(on <= threshold, "{} member: {on}", kind.name());
            let noisy = &x + rng.normal_vector(x.len()) * 0.1;
            let off = kind.value(&noisy).unwrap();
            prop_assert!(off > threshold, "{} non-member: {off} ≤ {threshold}", kind.name());
        }
    }

    #[test]
    fn equ_zero_part_beside_nonzero_part_is_not_a_member(seed in any::<u64>(), alpha in 0.3f64..3.0) {
        let mut rng = RngStream::new(seed, 10);
        let kind = RegularizerKind::Equ { bits: 2 };
        let mut x = member(&kind, alpha, &mut rng);
        x.rows_mut(0, N).fill(0.0);
        prop_assert!(kind.value(&x).unwrap() > 1e-9 * (1.0 + x.norm().powi(8)));
        prop_assert_eq!(kind.value(&DenseVector::zeros(2 * N)).unwrap(), 0.0);
    }

    #[test]
    fn auto_scale_identity(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 3);
        for (kind, len) in all_kinds(&mut rng).into_iter().take(5) {
            let x = rng.normal_vector(len);
            let pair = kind.pair().unwrap();
            let expected = kind.value(&x).unwrap();
            let (g, h) = (pair.g(&x), pair.h(&x));
            let beta = closed_form_beta(&g, &h).unwrap();
            let by_hand = h.norm_squared() * (&g - &h * beta).norm_squared();
            prop_assert!((by_hand - expected).abs() <= 1e-9 * expected.abs());
            let via = auto_scale_value(pair.as_ref(), &x).unwrap();
            prop_assert!((via - expected).abs() <= 1e-9 * expected.abs());
        }
    }

    #[test]
    fn om_matches_bin_of_singular_values(seed in any::<u64>(), square in any::<bool>()) {
        let mut rng = RngStream::new(seed, 4);
        let (n, k) = if square { (10, 10) } else { (6, 4) };
        let x = standard_normal_matrix(n, k, &mut rng);
        let om = eval_om(&x).unwrap();
        let bin = eval_bin(&singular_values(&x));
        prop_assert!((om - bin).abs() <= 1e-8 * om.abs(), "{om} vs {bin}");
    }

    #[test]
    fn generic_pair_matches_specialized(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 5);
        for (kind, len) in all_kinds(&mut rng) {
            let Some(pair) = kind.pair() else { continue };
            if !kind.is_differentiable() {
                continue;
            }
            let x = rng.normal_vector(len);
            let generic = cs_value(pair.as_ref(), &x).unwrap();
            let special = kind.value(&x).unwrap();
            prop_assert!(
                (generic - special).abs() <= 1e-10 * special.abs().max(1e-300),
                "{}: {generic} vs {special}", kind.name()
            );
            let gg = cs_grad(pair.as_ref(), &x).unwrap();
            let gs = kind.gradient(&x).unwrap();
            prop_assert!(
                (&gg - &gs).norm() <= 1e-10 * gs.norm(),
                "{} gradient mismatch", kind.name()
            );
        }
    }

    #[test]
    fn holder_and_scale_invariant_collapse(seed in any::<u64>(), r in 0.5f64..3.0) {
        let mut rng = RngStream::new(seed, 6);
        for (kind, len) in all_kinds(&mut rng).into_iter().take(9) {
            let pair = kind.pair().unwrap();
            let x = rng.normal_vector(len);
            let cs = cs_value(pair.as_ref(), &x).unwrap();
            let holder = holder_value(pair.as_ref(), &x, 2.0, 2.0, 2.0).unwrap();
            prop_assert!((cs - holder).abs() <= 1e-10 * cs.abs(), "{}", kind.name());

            for (p, q) in [(2.0, 2.0), (4.0 / 3.0, 4.0)] {
                let h = holder_value(pair.as_ref(), &x, p, q, r).unwrap();
                let (g, hv) = (pair.g(&x), pair.h(&x));
                let inner = g.dot(&hv).abs().powf(r);
                let si = scale_invariant_value(pair.as_ref(), &x, p, q, r, 0.0).unwrap();
                // both sides are differences of terms of size `inner`
                let scale = h.abs().max(inner);
                prop_assert!((si * inner - h).abs() <= 1e-10 * scale, "{} p = {p}", kind.name());
            }
        }
    }

    #[test]
    fn scale_invariance_of_homogeneous_pairs(seed in any::<u64>(), c in 0.01f64..100.0) {
        let mut rng = RngStream::new(seed, 7);
        for kind in [RegularizerKind::Bin, RegularizerKind::Osb, RegularizerKind::Ter] {
            let pair = kind.pair().unwrap();
            let x = rng.normal_vector(N);
            let a = scale_invariant_value(pair.as_ref(), &x, 2.0, 2.0, 2.0, 0.0).unwrap();
            let b = scale_invariant_value(pair.as_ref(), &(&x * c), 2.0, 2.0, 2.0, 0.0).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn sign_flip_leaves_even_kinds_unchanged(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 8);
        let c = standard_normal_matrix(N, N, &mut rng);
        let kinds = [
            (RegularizerKind::Bin, N),
            (RegularizerKind::Equ { bits: 2 }, 2 * N),
            (RegularizerKind::Eig(c), N),
        ];
        for (kind, len) in kinds {
            let x = rng.normal_vector(len);
            let a = kind.value(&x).unwrap();
            let b = kind.value(&-&x).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn eigenvectors_are_eigenvectors(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 9);
        let c: DenseMatrix = standard_normal_matrix(N, N, &mut rng);
        for (lambda, v) in eig_real(&c).unwrap() {
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
            prop_assert!((&c * &v - &v * lambda).norm() <= 1e-6 * c.norm());
        }
    }
}
