//! Quantitative angle distortion of a linear map.
//!
//! For `c` in `(-1, 1)`, `eps_hat(T, c)` is the smallest `eps` such that
//! every pair at cosine `c` is mapped to a pair whose cosine lies within
//! `eps` of `c`. It depends only on the ratio `r = [T] / ||T||`:
//!
//! ```text
//! eps_hat = (1 - c^2)(1 - r^2) / ((1 - |c|) + (1 + |c|) r^2)      ([T] > 0)
//! eps_hat = 1 + |c|                                                ([T] = 0)
//! ```
//!
//! The supremum is attained by the pair `x1 ± l x2`, `l = sqrt((1-|c|)/(1+|c|))`,
//! where `x1`, `x2` are the right singular vectors for `[T]` and `||T||`:
//! the pair hugs the least-stretched direction and is pushed apart, so the
//! image cosine drops below `c`. The mirrored pair `x2 ± l x1` hugs the
//! most-stretched direction and raises the cosine; its deviation is
//! [`closing_deviation`], which is never larger.

use serde::Serialize;

use crate::angle::{cosine, rng_from_seed, sample_angle_pair, AngleConstant};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, singular_basis, svd, Matrix, Vector};
use crate::{INJECTIVE_REL_TOL, ZERO_NORM};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPair {
    pub u: Vector,
    pub v: Vector,
}

/// `eps_hat(T, c)` together with the spectral data it came from and,
/// optionally, a witness pair and a sampled estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsReport {
    pub c: AngleConstant,
    pub op_norm: f64,
    pub min_mod: f64,
    pub eps_hat: f64,
    pub degenerate: bool,
    pub witness: Option<WitnessPair>,
    pub witness_value: Option<f64>,
    pub empirical_sup: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

/// Extremal pair `(u, v)` with `u ∠_c v` whose images deviate from `c` by
/// exactly `eps_hat(T, c)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalWitness {
    pub u: Vector,
    pub v: Vector,
    pub image_u: Vector,
    pub image_v: Vector,
    /// `cos(u, v)`, equal to `c`.
    pub cosine: f64,
    /// `cos(Tu, Tv)`.
    pub image_cosine: f64,
    /// `|cos(Tu, Tv) - c|`.
    pub value: f64,
}

/// A scalar `gamma` with `|<Tx, Ty> - gamma <x, y>| <= bound ||x|| ||y||`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaCertificate {
    pub gamma: f64,
    /// `||T^T T - gamma I||`, computed from the matrix itself.
    pub defect: f64,
    /// `(1 - [T]^2 / ||T||^2) ||T||^2`
    pub bound: f64,
    /// `[T]^2`
    pub lower: f64,
    /// `2 ||T||^2 - [T]^2`
    pub upper: f64,
}

impl GammaCertificate {
    pub fn is_valid(&self, slack: f64) -> bool {
        self.defect <= self.bound + slack
            && self.lower <= self.gamma + slack
            && self.gamma <= self.upper + slack
    }
}

/// Closed form of `eps_hat` for an injective map in terms of
/// `ratio = [T] / ||T||` in `(0, 1]`.
pub fn eps_hat_from_ratio(ratio: f64, c: AngleConstant) -> f64 {
    let a = c.abs();
    let r2 = ratio * ratio;
    (1.0 - a * a) * ((1.0 - ratio) * (1.0 + ratio)) / ((1.0 - a) + (1.0 + a) * r2)
}

/// Largest increase `cos(Tx, Ty) - |c|` over pairs at cosine `|c|` (the
/// angle-closing side), `ratio = [T] / ||T||`. Equals `eps_hat` at `c = 0`
/// and is strictly smaller otherwise unless `T` is a scaled isometry.
pub fn closing_deviation(ratio: f64, c: AngleConstant) -> f64 {
    let a = c.abs();
    let r2 = ratio * ratio;
    (1.0 - a * a) * ((1.0 - ratio) * (1.0 + ratio)) / ((1.0 + a) + (1.0 - a) * r2)
}

fn is_zero_map(t: &Matrix) -> bool {
    t.data().iter().all(|x| *x == 0.0)
}

fn is_degenerate(op: f64, min: f64) -> bool {
    min <= INJECTIVE_REL_TOL * op
}

/// `eps_hat(T, c)` with the spectral data. Degenerate maps (`[T]` at most
/// `1e-12 ||T||`) get the sentinel `1 + |c|`.
pub fn eps_hat(t: &Matrix, c: AngleConstant) -> Result<EpsReport> {
    let d = svd(t)?;
    let (op, min) = (d.operator_norm(), d.min_modulus());
    if op == 0.0 {
        return Err(Error::ZeroMap);
    }
    let degenerate = is_degenerate(op, min);
    let eps = if degenerate {
        c.sentinel()
    } else {
        eps_hat_from_ratio(min / op, c)
    };
    Ok(EpsReport {
        c,
        op_norm: op,
        min_mod: min,
        eps_hat: eps,
        degenerate,
        witness: None,
        witness_value: None,
        empirical_sup: None,
        samples: None,
        seed: None,
    })
}

/// Everything known about `(T, c)`: closed form, witness when the map is
/// injective with a domain of dimension >= 2, and a pure sampling estimate
/// when `samples > 0`.
pub fn analyze(t: &Matrix, c: AngleConstant, samples: u64, seed: u64) -> Result<EpsReport> {
    let mut report = eps_hat(t, c)?;
    let planar = t.cols() >= 2;
    if planar && !report.degenerate {
        let w = extremal_witness(t, c)?;
        report.witness_value = Some(w.value);
        report.witness = Some(WitnessPair { u: w.u, v: w.v });
    }
    if planar && samples > 0 {
        match eps_hat_empirical(t, c, samples, seed, false) {
            Ok(sup) => {
                report.empirical_sup = Some(sup);
                report.samples = Some(samples);
                report.seed = Some(seed);
            }
            Err(Error::ImageCollapse) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// The pair attaining `eps_hat(T, c)`. For `c < 0` the pair for `|c|` is
/// returned with `v` negated.
pub fn extremal_witness(t: &Matrix, c: AngleConstant) -> Result<ExtremalWitness> {
    if is_zero_map(t) {
        return Err(Error::ZeroMap);
    }
    if t.cols() > t.rows() {
        return Err(Error::NotInjective {
            min_mod: 0.0,
            op_norm: operator_norm(t)?,
        });
    }
    if t.cols() < 2 {
        return Err(Error::ShapeError(
            "angle pairs need a domain of dimension >= 2".into(),
        ));
    }
    let basis = singular_basis(t)?;
    let (x_min, x_max) = (&basis[0], &basis[basis.len() - 1]);
    let a = c.abs();
    let l = ((1.0 - a) / (1.0 + a)).sqrt();
    let u = x_min.add_scaled(l, x_max);
    let mut v = x_min.add_scaled(-l, x_max);
    if c.value() < 0.0 {
        v = -&v;
    }
    let (image_u, image_v) = (t.apply(&u), t.apply(&v));
    let image_cosine = cosine(&image_u, &image_v)?;
    Ok(ExtremalWitness {
        cosine: cosine(&u, &v)?,
        value: (image_cosine - c.value()).abs(),
        u,
        v,
        image_u,
        image_v,
        image_cosine,
    })
}

/// Sampled lower estimate of `eps_hat`: the largest `|cos(Tx, Ty) - c|`
/// over `samples` uniformly oriented unit pairs at cosine `c`, plus the
/// extremal witness when `include_witness` is set. Deterministic in
/// `(seed, samples)`.
pub fn eps_hat_empirical(
    t: &Matrix,
    c: AngleConstant,
    samples: u64,
    seed: u64,
    include_witness: bool,
) -> Result<f64> {
    if is_zero_map(t) {
        return Err(Error::ZeroMap);
    }
    if samples == 0 {
        return Err(Error::DomainError("samples must be >= 1".into()));
    }
    if t.cols() < 2 {
        return Err(Error::ShapeError(
            "angle pairs need a domain of dimension >= 2".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let mut sup = 0.0_f64;
    for _ in 0..samples {
        let (x, y) = sample_angle_pair(&mut rng, t.cols(), c);
        sup = sup.max(image_deviation(t, &x, &y, c)?);
    }
    if include_witness {
        let w = extremal_witness(t, c)?;
        let (u, v) = (w.u.normalized()?, w.v.normalized()?);
        sup = sup.max(image_deviation(t, &u, &v, c)?);
    }
    Ok(sup)
}

fn image_deviation(t: &Matrix, x: &Vector, y: &Vector, c: AngleConstant) -> Result<f64> {
    let (tx, ty) = (t.apply(x), t.apply(y));
    if tx.norm() <= ZERO_NORM || ty.norm() <= ZERO_NORM {
        return Err(Error::ImageCollapse);
    }
    Ok((cosine(&tx, &ty)? - c.value()).abs())
}

fn injective_spectrum(t: &Matrix) -> Result<(f64, f64)> {
    let d = svd(t)?;
    let (op, min) = (d.operator_norm(), d.min_modulus());
    if op == 0.0 {
        return Err(Error::ZeroMap);
    }
    if is_degenerate(op, min) {
        return Err(Error::NotInjective {
            min_mod: min,
            op_norm: op,
        });
    }
    Ok((op, min))
}

/// `eps_T = 1 - [T]^2 / ||T||^2`: orthogonal pairs map to pairs with
/// `|cos| <= eps_T`.
pub fn orthogonality_eps(t: &Matrix) -> Result<f64> {
    let (op, min) = injective_spectrum(t)?;
    let r = min / op;
    Ok((1.0 - r) * (1.0 + r))
}

/// Certificate with `gamma = (||T||^2 + [T]^2) / 2`, the midpoint of the
/// spectrum of `T^T T`.
pub fn gamma_certificate(t: &Matrix) -> Result<GammaCertificate> {
    let (op, min) = injective_spectrum(t)?;
    let (a2, b2) = (op * op, min * min);
    let gamma = 0.5 * (a2 + b2);
    let n = t.cols();
    let shifted = t
        .transpose()
        .matmul(t)
        .add_scaled(-gamma, &Matrix::identity(n));
    Ok(GammaCertificate {
        gamma,
        defect: operator_norm(&shifted)?,
        bound: (op - min) * (op + min),
        lower: b2,
        upper: 2.0 * a2 - b2,
    })
}

/// Inner-product defect bound implied by `(eps, c)`-angle preservation
/// alone: `(1 - g(eps, c)^2) ||T||^2`, with `g` from [`min_modulus_bound`].
pub fn angle_gamma_bound(op_norm: f64, eps: f64, c: AngleConstant) -> Result<f64> {
    let g = min_modulus_bound(eps, c)?;
    Ok((1.0 - g * g) * op_norm * op_norm)
}

/// Guaranteed ratio `[T] / ||T||` for any map whose `eps_hat(T, c)` is at
/// most `eps`:
///
/// ```text
/// g(eps, c) = sqrt((1 - |c|)(1 + |c| - eps) / ((1 + |c|)(1 - |c| + eps)))
/// ```
///
/// This inverts the closed form exactly, so `g(eps_hat(T, c), c) ||T|| = [T]`.
pub fn min_modulus_bound(eps: f64, c: AngleConstant) -> Result<f64> {
    let a = c.abs();
    if !eps.is_finite() || eps < 0.0 || eps > 1.0 + a {
        return Err(Error::DomainError(format!(
            "eps must lie in [0, {}], got {eps}",
            1.0 + a
        )));
    }
    let radicand = (1.0 - a) * (1.0 + a - eps) / ((1.0 + a) * (1.0 - a + eps));
    Ok(radicand.max(0.0).sqrt())
}

/// `[T] > rel_tol ||T||`.
pub fn is_bounded_below(t: &Matrix, rel_tol: f64) -> Result<bool> {
    let d = svd(t)?;
    let (op, min) = (d.operator_norm(), d.min_modulus());
    if op == 0.0 {
        return Err(Error::ZeroMap);
    }
    Ok(min > rel_tol * op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::is_angle_c;

    fn ac(c: f64) -> AngleConstant {
        AngleConstant::new(c).unwrap()
    }

    fn d21() -> Matrix {
        Matrix::diag(&[2.0, 1.0])
    }

    /// Dense sweep over all unit pairs at cosine `c` in the plane: the pair
    /// `(cos t, sin t), (cos(t + a), sin(t + a))` with `cos a = c`.
    fn planar_sweep_sup(s1: f64, s2: f64, c: f64) -> f64 {
        let alpha = c.acos();
        let steps = 400_000;
        let mut sup = 0.0_f64;
        for k in 0..steps {
            let th = std::f64::consts::TAU * k as f64 / steps as f64;
            let (x0, x1) = (s1 * th.cos(), s2 * th.sin());
            let (y0, y1) = (s1 * (th + alpha).cos(), s2 * (th + alpha).sin());
            let cos = (x0 * y0 + x1 * y1) / (x0.hypot(x1) * y0.hypot(y1));
            sup = sup.max((cos - c).abs());
        }
        sup
    }

    #[test]
    fn sweep_oracle_values_for_diag21() {
        // frozen from planar_sweep_sup; exact values are 0.6 and 2.25/3.5
        assert!((planar_sweep_sup(2.0, 1.0, 0.0) - 0.6).abs() < 1e-9);
        assert!((planar_sweep_sup(2.0, 1.0, 0.5) - 2.25 / 3.5).abs() < 1e-9);
        assert!((planar_sweep_sup(2.0, 1.0, -0.5) - 2.25 / 3.5).abs() < 1e-9);
        assert!((planar_sweep_sup(3.0, 1.0, 0.3) - 0.957_894_736_842_105_5).abs() < 1e-9);
    }

    #[test]
    fn closed_form_examples() {
        let r = eps_hat(&Matrix::identity(3), ac(0.4)).unwrap();
        assert_eq!(r.eps_hat, 0.0);
        assert!(!r.degenerate);

        for c in [-0.7, 0.0, 0.5] {
            let r = eps_hat(&Matrix::diag(&[1.0, 0.0]), ac(c)).unwrap();
            assert!(r.degenerate);
            assert_eq!(r.eps_hat, 1.0 + f64::abs(c));
        }

        assert!((eps_hat(&d21(), ac(0.0)).unwrap().eps_hat - 0.6).abs() < 1e-15);
        assert!((eps_hat(&d21(), ac(0.5)).unwrap().eps_hat - 2.25 / 3.5).abs() < 1e-15);
        assert!((eps_hat(&d21(), ac(-0.5)).unwrap().eps_hat - 2.25 / 3.5).abs() < 1e-15);
        // (1 - 0.09)(9 - 1) / (0.7 * 9 + 1.3)
        let r = eps_hat(&Matrix::diag(&[3.0, 1.0]), ac(0.3)).unwrap();
        assert!((r.eps_hat - 0.91 * 8.0 / 7.6).abs() < 1e-15);
    }

    #[test]
    fn zero_map_is_rejected() {
        let z = Matrix::new(2, 2, vec![0.0; 4]).unwrap();
        assert_eq!(eps_hat(&z, ac(0.0)), Err(Error::ZeroMap));
        assert_eq!(extremal_witness(&z, ac(0.0)), Err(Error::ZeroMap));
        assert_eq!(
            eps_hat_empirical(&z, ac(0.0), 10, 0, false),
            Err(Error::ZeroMap)
        );
        assert_eq!(is_bounded_below(&z, 1e-12), Err(Error::ZeroMap));
    }

    #[test]
    fn closing_deviation_is_the_mirrored_pair() {
        // x2 ± l x1 around the max direction, as in the closed form of the
        // one-sided sup; for diag(2,1), c = 0.5 this is 2.25 / 6.5
        let c = ac(0.5);
        assert!((closing_deviation(0.5, c) - 2.25 / 6.5).abs() < 1e-15);
        let l = (1.0_f64 / 3.0).sqrt();
        let u = Vector::new(vec![1.0, l]).unwrap();
        let v = Vector::new(vec![1.0, -l]).unwrap();
        assert!(is_angle_c(&u, &v, c, 1e-12).unwrap());
        let t = d21();
        let cos = cosine(&t.apply(&u), &t.apply(&v)).unwrap();
        assert!((cos - 0.5 - 2.25 / 6.5).abs() < 1e-12);
        for r in [0.1, 0.5, 0.9, 1.0] {
            for cv in [0.0, 0.3, 0.9] {
                assert!(closing_deviation(r, ac(cv)) <= eps_hat_from_ratio(r, ac(cv)) + 1e-15);
            }
        }
        assert_eq!(
            closing_deviation(0.3, ac(0.0)),
            eps_hat_from_ratio(0.3, ac(0.0))
        );
    }

    #[test]
    fn witness_diag21() {
        let w = extremal_witness(&d21(), ac(0.0)).unwrap();
        assert_eq!(w.u.as_slice(), &[1.0, 1.0]);
        assert_eq!(w.v.as_slice(), &[-1.0, 1.0]);
        assert_eq!(w.image_u.as_slice(), &[2.0, 1.0]);
        assert_eq!(w.image_v.as_slice(), &[-2.0, 1.0]);
        assert!((w.value - 0.6).abs() < 1e-15);

        let w = extremal_witness(&d21(), ac(-0.5)).unwrap();
        assert!((w.cosine + 0.5).abs() < 1e-12);
        assert!((w.value - 2.25 / 3.5).abs() < 1e-12);
        let wp = extremal_witness(&d21(), ac(0.5)).unwrap();
        assert_eq!(w.u, wp.u);
        assert_eq!(w.v, -&wp.v);
    }

    #[test]
    fn witness_identity_and_errors() {
        let w = extremal_witness(&Matrix::identity(2), ac(0.5)).unwrap();
        assert!((w.image_cosine - 0.5).abs() < 1e-15);
        assert!(w.value < 1e-15);
        assert!(matches!(
            extremal_witness(&Matrix::diag(&[1.0, 0.0]), ac(0.0)),
            Err(Error::NotInjective { .. })
        ));
        let wide = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(
            extremal_witness(&wide, ac(0.0)),
            Err(Error::NotInjective { .. })
        ));
        let col = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert!(matches!(
            extremal_witness(&col, ac(0.0)),
            Err(Error::ShapeError(_))
        ));
    }

    #[test]
    fn empirical_examples() {
        for c in [-0.5, 0.0, 0.8] {
            let e = eps_hat_empirical(&Matrix::identity(3), ac(c), 500, 1, false).unwrap();
            assert!(e < 1e-14);
        }
        let with = eps_hat_empirical(&d21(), ac(0.0), 100, 3, true).unwrap();
        assert!((with - 0.6).abs() < 1e-9);
        let without = eps_hat_empirical(&d21(), ac(0.0), 200_000, 3, false).unwrap();
        assert!((0.55..=0.6 + 1e-12).contains(&without), "{without}");
        let again = eps_hat_empirical(&d21(), ac(0.0), 200_000, 3, false).unwrap();
        assert_eq!(without, again);
        assert!(eps_hat_empirical(&d21(), ac(0.0), 0, 3, false).is_err());
    }

    #[test]
    fn image_collapse_is_reported() {
        // nonzero map whose images all have norm below 1e-300
        let t = Matrix::from_rows(&[[0.0, 0.0], [0.0, 0.0], [1e-310, 0.0]]).unwrap();
        assert_eq!(
            eps_hat_empirical(&t, ac(0.0), 10, 0, false),
            Err(Error::ImageCollapse)
        );
    }

    #[test]
    fn orthogonality_eps_examples() {
        assert_eq!(orthogonality_eps(&Matrix::identity(2)).unwrap(), 0.0);
        assert!((orthogonality_eps(&Matrix::diag(&[3.0, 1.0])).unwrap() - 8.0 / 9.0).abs() < 1e-15);
        assert!((orthogonality_eps(&d21()).unwrap() - 0.75).abs() < 1e-15);
        assert!(matches!(
            orthogonality_eps(&Matrix::diag(&[1.0, 0.0])),
            Err(Error::NotInjective { .. })
        ));
    }

    #[test]
    fn gamma_certificate_examples() {
        let g = gamma_certificate(&Matrix::identity(2)).unwrap();
        assert_eq!((g.gamma, g.defect, g.bound), (1.0, 0.0, 0.0));
        let g = gamma_certificate(&d21()).unwrap();
        assert_eq!(g.gamma, 2.5);
        assert!((g.defect - 1.5).abs() < 1e-14);
        assert_eq!((g.bound, g.lower, g.upper), (3.0, 1.0, 7.0));
        assert!(g.is_valid(1e-9));
        // eps-based bound dominates the spectral one once eps >= eps_hat
        let eps = eps_hat(&d21(), ac(0.5)).unwrap().eps_hat;
        let b = angle_gamma_bound(2.0, eps, ac(0.5)).unwrap();
        assert!((b - 3.0).abs() < 1e-12);
        assert!(angle_gamma_bound(2.0, 0.9, ac(0.5)).unwrap() > b);
    }

    #[test]
    fn min_modulus_bound_examples() {
        for c in [-0.9, 0.0, 0.5] {
            assert_eq!(min_modulus_bound(0.0, ac(c)).unwrap(), 1.0);
            assert_eq!(min_modulus_bound(1.0 + f64::abs(c), ac(c)).unwrap(), 0.0);
        }
        assert!((min_modulus_bound(0.6, ac(0.0)).unwrap() - 0.5).abs() < 1e-15);
        let eps = eps_hat(&d21(), ac(0.5)).unwrap().eps_hat;
        assert!((min_modulus_bound(eps, ac(0.5)).unwrap() * 2.0 - 1.0).abs() < 1e-15);
        // the whole range [0, 1 + |c|] is admissible
        assert!(min_modulus_bound(0.9, ac(0.5)).is_ok());
        assert!(matches!(
            min_modulus_bound(1.6, ac(0.5)),
            Err(Error::DomainError(_))
        ));
        assert!(matches!(
            min_modulus_bound(-0.1, ac(0.5)),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn bounded_below_examples() {
        assert!(is_bounded_below(&Matrix::identity(2), 1e-12).unwrap());
        assert!(!is_bounded_below(&Matrix::diag(&[1.0, 0.0]), 1e-12).unwrap());
        let shear = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(is_bounded_below(&shear, 1e-12).unwrap());
    }

    #[test]
    fn analyze_fills_optional_fields() {
        let r = analyze(&d21(), ac(0.0), 1000, 5).unwrap();
        assert!((r.witness_value.unwrap() - 0.6).abs() < 1e-12);
        assert!(r.empirical_sup.unwrap() <= r.eps_hat + 1e-9);
        assert_eq!((r.samples, r.seed), (Some(1000), Some(5)));
        let r = analyze(&d21(), ac(0.0), 0, 5).unwrap();
        assert_eq!((r.empirical_sup, r.samples, r.seed), (None, None, None));
        let r = analyze(&Matrix::diag(&[1.0, 0.0]), ac(0.2), 100, 5).unwrap();
        assert!(r.degenerate && r.witness.is_none());
        assert!(r.empirical_sup.unwrap() <= 1.2);
    }
}
