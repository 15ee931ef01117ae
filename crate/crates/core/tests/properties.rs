use angle_gauge::angle::{
    cosine, make_angle_pair, rng_from_seed, sample_orthonormal_pair, symmetric_angle_pairs,
    AngleConstant,
};
use angle_gauge::eps::{
    eps_hat, eps_hat_from_ratio, extremal_witness, gamma_certificate, min_modulus_bound,
    orthogonality_eps,
};
use angle_gauge::io::{parse_json, to_canonical_json};
use angle_gauge::linalg::{min_modulus, operator_norm, singular_basis, svd, Matrix};
use proptest::prelude::*;

fn matrix(max_dim: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(m, n)| {
        prop::collection::vec(-10.0..10.0f64, m * n)
            .prop_map(move |d| Matrix::new(m, n, d).unwrap())
    })
}

/// Square or tall, at least 2 columns, generically injective.
fn tall_matrix() -> impl Strategy<Value = Matrix> {
    (2..=6usize).prop_flat_map(|n| {
        (n..=6usize).prop_flat_map(move |m| {
            prop::collection::vec(-5.0..5.0f64, m * n)
                .prop_map(move |d| Matrix::new(m, n, d).unwrap())
        })
    })
}

fn injective() -> impl Strategy<Value = Matrix> {
    tall_matrix().prop_filter("well conditioned", |t| {
        let d = svd(t).unwrap();
        d.min_modulus() > 1e-3 * d.operator_norm()
    })
}

fn angle() -> impl Strategy<Value = f64> {
    -0.95..0.95f64
}

fn ac(c: f64) -> AngleConstant {
    AngleConstant::new(c).unwrap()
}

fn oracle_singular_values(t: &Matrix) -> Vec<f64> {
    let m = nalgebra::DMatrix::from_row_slice(t.rows(), t.cols(), t.data());
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

fn gram_defect(q: &Matrix) -> f64 {
    let g = q.transpose().matmul(q);
    let mut worst = 0.0_f64;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let e = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g.get(i, j) - e).abs());
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn svd_matches_oracle_and_reconstructs(t in matrix(8)) {
        let d = svd(&t).unwrap();
        let scale = t.frobenius_norm().max(1.0);
        let s = d.singular_values();
        let o = oracle_singular_values(&t);
        prop_assert_eq!(s.len(), o.len());
        for (a, b) in s.iter().zip(&o) {
            prop_assert!((a - b).abs() <= 1e-10 * scale, "{} vs {}", a, b);
        }
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let r = d.reconstruct().add_scaled(-1.0, &t).frobenius_norm();
        prop_assert!(r <= 1e-10 * scale, "residual {}", r);
        prop_assert!(gram_defect(d.left()) <= 1e-10);
        prop_assert!(gram_defect(d.right()) <= 1e-10);
    }

    #[test]
    fn norm_bounds_and_homogeneity(t in matrix(6), alpha in -100.0..100.0f64, seed in any::<u64>()) {
        let op = operator_norm(&t).unwrap();
        let mm = min_modulus(&t).unwrap();
        prop_assert!(0.0 <= mm && mm <= op * (1.0 + 1e-12));
        let mut rng = rng_from_seed(seed);
        let x = angle_gauge::angle::sample_unit(&mut rng, t.cols());
        let img = t.apply(&x).norm();
        prop_assert!(img <= op * (1.0 + 1e-12) + 1e-300);
        prop_assert!(img >= mm * (1.0 - 1e-12) - 1e-12 * op);
        let s = t.scaled(alpha);
        let a = alpha.abs();
        prop_assert!((operator_norm(&s).unwrap() - a * op).abs() <= 1e-12 * (a * op).max(1e-300));
        prop_assert!((min_modulus(&s).unwrap() - a * mm).abs() <= 1e-10 * (a * op).max(1e-300));
    }

    #[test]
    fn singular_basis_properties(t in injective()) {
        let basis = singular_basis(&t).unwrap();
        let op = operator_norm(&t).unwrap();
        let mm = min_modulus(&t).unwrap();
        prop_assert_eq!(basis.len(), t.cols());
        for (i, x) in basis.iter().enumerate() {
            prop_assert!((x.norm() - 1.0).abs() <= 1e-10);
            for y in &basis[i + 1..] {
                prop_assert!(x.dot(y).abs() <= 1e-10);
                let (tx, ty) = (t.apply(x), t.apply(y));
                prop_assert!(tx.dot(&ty).abs() <= 1e-10 * op * op);
            }
        }
        let first = t.apply(&basis[0]).norm();
        let last = t.apply(basis.last().unwrap()).norm();
        prop_assert!((first - mm).abs() <= 1e-10 * op);
        prop_assert!((last - op).abs() <= 1e-10 * op);
    }

    #[test]
    fn angle_relation_is_weakly_homogeneous(
        c in angle(), a in 0.01..100.0f64, b in 0.01..100.0f64, seed in any::<u64>(), dim in 2..6usize
    ) {
        let mut rng = rng_from_seed(seed);
        let (x, w) = sample_orthonormal_pair(&mut rng, dim);
        let (x, y) = make_angle_pair(&x, &w, ac(c)).unwrap();
        prop_assert!((cosine(&x, &y).unwrap() - c).abs() <= 1e-12);
        prop_assert!((cosine(&x.scaled(a), &y.scaled(b)).unwrap() - c).abs() <= 1e-12);
        prop_assert!((cosine(&y, &x).unwrap() - cosine(&x, &y).unwrap()).abs() == 0.0);
        prop_assert!((cosine(&x.scaled(-a), &y.scaled(b)).unwrap() + c).abs() <= 1e-12);
    }

    #[test]
    fn symmetric_pairs_have_cosine_c(c in 0.0..0.95f64, seed in any::<u64>(), dim in 2..6usize) {
        let mut rng = rng_from_seed(seed);
        let (x, y) = sample_orthonormal_pair(&mut rng, dim);
        let p = symmetric_angle_pairs(&x, &y, ac(c)).unwrap();
        prop_assert!((cosine(&p.about_y.0, &p.about_y.1).unwrap() - c).abs() <= 1e-12);
        prop_assert!((cosine(&p.about_x.0, &p.about_x.1).unwrap() - c).abs() <= 1e-12);
    }

    #[test]
    fn eps_hat_symmetries(t in injective(), c in angle(), alpha in 0.001..1000.0f64, neg in any::<bool>()) {
        let e = eps_hat(&t, ac(c)).unwrap().eps_hat;
        prop_assert!((0.0..=1.0 + c.abs()).contains(&e));
        prop_assert_eq!(e, eps_hat(&t, ac(-c)).unwrap().eps_hat);
        let alpha = if neg { -alpha } else { alpha };
        let es = eps_hat(&t.scaled(alpha), ac(c)).unwrap().eps_hat;
        prop_assert!((e - es).abs() <= 1e-9);
        if t.is_square() {
            let ei = eps_hat(&t.inverse().unwrap(), ac(c)).unwrap().eps_hat;
            prop_assert!((e - ei).abs() <= 1e-9, "{} vs {}", e, ei);
        }
    }

    #[test]
    fn eps_hat_is_monotone_in_ratio(r1 in 0.0..1.0f64, r2 in 0.0..1.0f64, c in angle()) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(eps_hat_from_ratio(lo, ac(c)) >= eps_hat_from_ratio(hi, ac(c)));
        prop_assert_eq!(eps_hat_from_ratio(1.0, ac(c)), 0.0);
        prop_assert!((eps_hat_from_ratio(0.0, ac(c)) - (1.0 + c.abs())).abs() <= 1e-15);
    }

    #[test]
    fn zero_eps_hat_only_for_scaled_isometries(t in injective(), c in angle()) {
        let d = svd(&t).unwrap();
        let e = eps_hat(&t, ac(c)).unwrap().eps_hat;
        let ratio = d.min_modulus() / d.operator_norm();
        // eps_hat vanishes exactly when the singular values coincide
        prop_assert_eq!(e == 0.0, ratio == 1.0);
        // and is bounded below by a multiple of the spread
        prop_assert!(e >= (1.0 - c.abs()) * (1.0 - ratio) / 2.0 - 1e-12);
    }

    #[test]
    fn min_modulus_bound_inverts_eps_hat(t in injective(), c in angle()) {
        let r = eps_hat(&t, ac(c)).unwrap();
        let g = min_modulus_bound(r.eps_hat, ac(c)).unwrap();
        prop_assert!((g * r.op_norm - r.min_mod).abs() <= 1e-9 * r.op_norm);
    }

    #[test]
    fn witness_attains_eps_hat(t in injective(), c in angle()) {
        let w = extremal_witness(&t, ac(c)).unwrap();
        let e = eps_hat(&t, ac(c)).unwrap().eps_hat;
        prop_assert!((w.cosine - c).abs() <= 1e-12);
        prop_assert!((w.value - e).abs() <= 1e-9, "{} vs {}", w.value, e);
        prop_assert!(((w.image_cosine - c).abs() - w.value).abs() <= 1e-12);
    }

    #[test]
    fn eps_hat_is_continuous(t in injective(), c in angle(), seed in any::<u64>()) {
        let op = operator_norm(&t).unwrap();
        let mm = min_modulus(&t).unwrap();
        let mut rng = rng_from_seed(seed);
        let data: Vec<f64> = (0..t.rows() * t.cols())
            .map(|_| angle_gauge::angle::sample_unit(&mut rng, 1).as_slice()[0])
            .collect();
        let e = Matrix::new(t.rows(), t.cols(), data).unwrap();
        let e = e.scaled(1e-8 * mm / operator_norm(&e).unwrap());
        let d = (eps_hat(&t, ac(c)).unwrap().eps_hat
            - eps_hat(&t.add_scaled(1.0, &e), ac(c)).unwrap().eps_hat)
            .abs();
        // Lipschitz in [T]/||T|| with constant at most 4 / (1 - |c|)
        prop_assert!(d <= 1e-6, "{} (cond {})", d, op / mm);
    }

    #[test]
    fn orthogonality_and_gamma(t in injective(), seed in any::<u64>()) {
        let eps_t = orthogonality_eps(&t).unwrap();
        let mut rng = rng_from_seed(seed);
        for _ in 0..50 {
            let (x, y) = sample_orthonormal_pair(&mut rng, t.cols());
            let cos = cosine(&t.apply(&x), &t.apply(&y)).unwrap();
            prop_assert!(cos.abs() <= eps_t + 1e-9);
        }
        let g = gamma_certificate(&t).unwrap();
        prop_assert!(g.is_valid(1e-9));
    }

    #[test]
    fn canonical_json_round_trips(t in matrix(6), scale in -300i32..300) {
        let t = t.scaled(10f64.powi(scale / 10));
        let back = parse_json(&to_canonical_json(&t)).unwrap();
        prop_assert_eq!(back.rows(), t.rows());
        prop_assert!(back.data().iter().zip(t.data()).all(|(a, b)| a.to_bits() == b.to_bits()
            || (*a == 0.0 && *b == 0.0)));
    }

    #[test]
    fn cli_exit_code_contract(
        rows in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 1..4), 1..4),
        garble in 0..4u8,
        c in -1.5..1.5f64,
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let mut text: String = rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n");
        match garble {
            1 => text.push_str("\n1,zz"),
            2 => text.push_str("\ninf"),
            3 => text.insert_str(0, "# header\n\n"),
            _ => {}
        }
        std::fs::write(&path, &text).unwrap();
        let p = path.to_str().unwrap();
        let cs = c.to_string();
        let out = angle_gauge::cli::run_args(["angle-gauge", "analyze", "--matrix", p, "--c", &cs, "--samples", "0"]);
        let ragged = rows.iter().any(|r| r.len() != rows[0].len());
        let all_zero = rows.iter().flatten().all(|x| *x == 0.0);
        let c_ok = c > -1.0 && c < 1.0;
        let valid = c_ok && !ragged && matches!(garble, 0 | 3) && !all_zero;
        if valid {
            prop_assert_eq!(out.code, 0, "{}", out.stderr);
            let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
            prop_assert!(v["reports"][0]["eps_hat"].as_f64().unwrap() <= 1.0 + c.abs());
        } else {
            prop_assert_eq!(out.code, 2);
            prop_assert!(!out.stderr.is_empty());
            if c_ok {
                // input errors also produce a structured document
                let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
                prop_assert!(v["error"]["kind"].is_string());
            }
        }
    }
}
