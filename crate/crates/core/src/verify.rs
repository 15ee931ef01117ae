//! Executable checks of the identities and inequalities around `eps_hat`,
//! collected into a [`VerificationReport`].

use serde::Serialize;

use crate::angle::{cosine, rng_from_seed, sample_orthonormal_pair, sample_unit, AngleConstant};
use crate::corpus::{derive_seed, gaussian, random_orthogonal};
use crate::eps::{
    analyze, eps_hat, eps_hat_empirical, gamma_certificate, min_modulus_bound, orthogonality_eps,
    EpsReport,
};
use crate::error::{Error, Result};
use crate::io::matrix_digest;
use crate::linalg::{operator_norm, Matrix};

/// Scale factors for the homogeneity check.
pub const SCALE_FACTORS: [f64; 3] = [-3.0, 0.01, 7.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Identity-type checks, relative.
    pub identity: f64,
    /// Sampled inequalities, absolute slack per evaluation.
    pub sample_slack: f64,
    /// Allowed change of `eps_hat` under the continuity perturbation.
    pub continuity: f64,
    /// Size of that perturbation relative to `[T]`.
    pub perturbation: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            identity: 1e-9,
            sample_slack: 1e-9,
            continuity: 1e-6,
            perturbation: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Passed,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub c: Option<f64>,
    pub status: CheckStatus,
    pub passed: bool,
    /// Worst deviation found; `None` when skipped.
    pub measured: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

impl CheckResult {
    pub fn evaluated(
        name: &str,
        c: Option<f64>,
        measured: f64,
        threshold: f64,
        detail: String,
    ) -> Self {
        let passed = measured <= threshold;
        CheckResult {
            name: name.to_string(),
            c,
            status: if passed {
                CheckStatus::Passed
            } else {
                CheckStatus::Failed
            },
            passed,
            measured: Some(measured),
            threshold: Some(threshold),
            detail,
        }
    }

    pub fn skipped(name: &str, c: Option<f64>, reason: impl Into<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            c,
            status: CheckStatus::Skipped,
            passed: false,
            measured: None,
            threshold: None,
            detail: reason.into(),
        }
    }

    pub fn is_failure(&self) -> bool {
        self.status == CheckStatus::Failed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub matrix_digest: String,
    pub rows: usize,
    pub cols: usize,
    pub c_values: Vec<f64>,
    pub seed: u64,
    pub samples: u64,
    pub degenerate: bool,
    pub eps: Vec<EpsReport>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    /// Wall time; left at 0 by [`full_report`] so reports stay reproducible.
    pub elapsed_ms: f64,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.is_failure())
    }
}

pub const INVARIANCE_CHECKS: [&str; 4] = [
    "inverse_invariance",
    "isometry_composition",
    "scale_invariance",
    "sign_invariance",
];
pub const BOUND_CHECKS: [&str; 5] = [
    "gamma_certificate",
    "orthogonality_bound",
    "sandwich_bound",
    "tightness",
    "two_vector_bound",
];

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// Invariance of `eps_hat` under scaling of `T`, `c -> -c`, composition
/// with `2Q` for a random orthogonal `Q`, and inversion (square maps).
pub fn verify_invariances(
    t: &Matrix,
    c: AngleConstant,
    seed: u64,
    th: &Thresholds,
) -> Result<Vec<CheckResult>> {
    let cv = Some(c.value());
    let base = eps_hat(t, c)?;
    let e = base.eps_hat;
    let mut out = Vec::with_capacity(4);

    let mut worst = 0.0_f64;
    for alpha in SCALE_FACTORS {
        worst = worst.max(rel_diff(eps_hat(&t.scaled(alpha), c)?.eps_hat, e));
    }
    out.push(CheckResult::evaluated(
        "scale_invariance",
        cv,
        worst,
        th.identity,
        format!("eps_hat(a T, c) vs eps_hat(T, c) = {e} for a in {SCALE_FACTORS:?}"),
    ));

    let neg = eps_hat(t, c.negated())?.eps_hat;
    out.push(CheckResult::evaluated(
        "sign_invariance",
        cv,
        (neg - e).abs(),
        0.0,
        format!("eps_hat(T, -c) = {neg}, eps_hat(T, c) = {e}"),
    ));

    let mut rng = rng_from_seed(derive_seed(seed, 1));
    let q = random_orthogonal(&mut rng, t.rows()).scaled(2.0);
    let composed = eps_hat(&q.matmul(t), c)?.eps_hat;
    out.push(CheckResult::evaluated(
        "isometry_composition",
        cv,
        rel_diff(composed, e),
        th.identity,
        format!("eps_hat(2 Q T, c) = {composed}"),
    ));

    out.push(if !t.is_square() {
        CheckResult::skipped("inverse_invariance", cv, "matrix is not square")
    } else if base.degenerate {
        CheckResult::skipped("inverse_invariance", cv, "matrix is not invertible")
    } else {
        let inv = eps_hat(&t.inverse()?, c)?.eps_hat;
        CheckResult::evaluated(
            "inverse_invariance",
            cv,
            rel_diff(inv, e),
            th.identity,
            format!("eps_hat(T^-1, c) = {inv}"),
        )
    });
    Ok(out)
}

fn require_injective(report: &EpsReport) -> Result<()> {
    if report.degenerate {
        Err(Error::NotInjective {
            min_mod: report.min_mod,
            op_norm: report.op_norm,
        })
    } else {
        Ok(())
    }
}

/// Lower bounds implied by `eps_hat`, the orthogonality bound `eps_T`, and
/// the `gamma` certificate. Sampled checks draw `samples` unit vectors or
/// pairs; deviations are scaled by `||T||` (or `||T||^2`) so the slack is
/// scale free.
pub fn verify_bounds(
    t: &Matrix,
    c: AngleConstant,
    seed: u64,
    samples: u64,
    th: &Thresholds,
) -> Result<Vec<CheckResult>> {
    let cv = Some(c.value());
    let report = eps_hat(t, c)?;
    require_injective(&report)?;
    let (op, min) = (report.op_norm, report.min_mod);
    let g = min_modulus_bound(report.eps_hat, c)?;
    let n = t.cols();
    let mut out = Vec::with_capacity(5);

    out.push(CheckResult::evaluated(
        "tightness",
        cv,
        (g * op - min).abs() / op,
        th.identity,
        format!("g(eps_hat, c) ||T|| = {}, [T] = {min}", g * op),
    ));

    let mut rng = rng_from_seed(derive_seed(seed, 2));
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let (x, y) = (sample_unit(&mut rng, n), sample_unit(&mut rng, n));
        let (tx, ty) = (t.apply(&x).norm(), t.apply(&y).norm());
        worst = worst.max((g * tx - ty) / op);
    }
    out.push(CheckResult::evaluated(
        "two_vector_bound",
        cv,
        worst,
        th.sample_slack,
        format!("g ||Tx|| ||y|| <= ||Ty|| ||x|| over {samples} pairs, g = {g}"),
    ));

    let mut rng = rng_from_seed(derive_seed(seed, 3));
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let tx = t.apply(&sample_unit(&mut rng, n)).norm();
        worst = worst.max((g * op - tx) / op).max((tx - op) / op);
    }
    out.push(CheckResult::evaluated(
        "sandwich_bound",
        cv,
        worst,
        th.sample_slack,
        format!("g ||T|| <= ||Tx|| <= ||T|| over {samples} unit vectors"),
    ));

    out.push(if n < 2 {
        CheckResult::skipped("orthogonality_bound", cv, "domain has dimension 1")
    } else {
        let eps_t = orthogonality_eps(t)?;
        let mut rng = rng_from_seed(derive_seed(seed, 4));
        let mut worst = 0.0_f64;
        for _ in 0..samples {
            let (x, y) = sample_orthonormal_pair(&mut rng, n);
            let cos = cosine(&t.apply(&x), &t.apply(&y))?;
            worst = worst.max(cos.abs() - eps_t);
        }
        CheckResult::evaluated(
            "orthogonality_bound",
            cv,
            worst.max(0.0),
            th.sample_slack,
            format!("|cos(Tx, Ty)| <= eps_T = {eps_t} over {samples} orthogonal pairs"),
        )
    });

    let cert = gamma_certificate(t)?;
    let op2 = op * op;
    let mut worst = (cert.defect - cert.bound)
        .max(cert.lower - cert.gamma)
        .max(cert.gamma - cert.upper)
        / op2;
    let mut rng = rng_from_seed(derive_seed(seed, 5));
    for _ in 0..samples {
        let (x, y) = (sample_unit(&mut rng, n), sample_unit(&mut rng, n));
        let lhs = (t.apply(&x).dot(&t.apply(&y)) - cert.gamma * x.dot(&y)).abs();
        worst = worst.max((lhs - cert.bound) / op2);
    }
    out.push(CheckResult::evaluated(
        "gamma_certificate",
        cv,
        worst.max(0.0),
        th.sample_slack,
        format!(
            "gamma = {}, defect = {}, bound = {}, window = [{}, {}]",
            cert.gamma, cert.defect, cert.bound, cert.lower, cert.upper
        ),
    ));
    Ok(out)
}

/// Closed form against the sampled supremum: random pairs never exceed
/// it, and adding the extremal witness reaches it.
pub fn verify_sampling_consistency(
    t: &Matrix,
    c: AngleConstant,
    seed: u64,
    samples: u64,
    th: &Thresholds,
) -> Result<CheckResult> {
    let cv = Some(c.value());
    let report = eps_hat(t, c)?;
    require_injective(&report)?;
    if t.cols() < 2 {
        return Ok(CheckResult::skipped(
            "sampling_consistency",
            cv,
            "domain has dimension 1",
        ));
    }
    let e = report.eps_hat;
    let random = eps_hat_empirical(t, c, samples, seed, false)?;
    let with_witness = eps_hat_empirical(t, c, samples, seed, true)?;
    let measured = (e - with_witness).abs().max(random - e).max(0.0);
    Ok(CheckResult::evaluated(
        "sampling_consistency",
        cv,
        measured,
        th.sample_slack,
        format!("eps_hat = {e}, sampled = {random}, sampled+witness = {with_witness}"),
    ))
}

/// Moves `T` by a random `E` with `||E|| = perturbation * [T]` and compares
/// `eps_hat`. Empirical threshold.
pub fn verify_continuity(
    t: &Matrix,
    c: AngleConstant,
    seed: u64,
    th: &Thresholds,
) -> Result<CheckResult> {
    let cv = Some(c.value());
    let report = eps_hat(t, c)?;
    require_injective(&report)?;
    let mut rng = rng_from_seed(derive_seed(seed, 6));
    let e = gaussian(&mut rng, t.rows(), t.cols());
    let size = th.perturbation * report.min_mod;
    let e = e.scaled(size / operator_norm(&e)?);
    let moved = eps_hat(&t.add_scaled(1.0, &e), c)?.eps_hat;
    Ok(CheckResult::evaluated(
        "continuity",
        cv,
        (moved - report.eps_hat).abs(),
        th.continuity,
        format!(
            "||E|| = {size:e}: eps_hat moved from {} to {moved}",
            report.eps_hat
        ),
    ))
}

/// Runs every check for each `c`, ordered by check name then `c`.
/// Degenerate maps get the sentinel `eps_hat` and skipped bound checks.
pub fn full_report(
    t: &Matrix,
    c_values: &[AngleConstant],
    seed: u64,
    samples: u64,
    th: &Thresholds,
) -> Result<VerificationReport> {
    let mut eps = Vec::with_capacity(c_values.len());
    let mut checks = Vec::new();
    let mut degenerate = false;
    for (i, &c) in c_values.iter().enumerate() {
        let cseed = derive_seed(seed, 100 + i as u64);
        let cv = Some(c.value());
        let report = analyze(t, c, samples, cseed)?;
        degenerate = report.degenerate;
        checks.extend(verify_invariances(t, c, cseed, th)?);
        if report.degenerate {
            let why = "map is not injective ([T] = 0)";
            for name in BOUND_CHECKS {
                checks.push(CheckResult::skipped(name, cv, why));
            }
            checks.push(CheckResult::skipped("sampling_consistency", cv, why));
            checks.push(CheckResult::skipped("continuity", cv, why));
        } else {
            checks.extend(verify_bounds(t, c, cseed, samples, th)?);
            checks.push(verify_sampling_consistency(t, c, cseed, samples, th)?);
            checks.push(verify_continuity(t, c, cseed, th)?);
        }
        eps.push(report);
    }
    if c_values.is_empty() {
        degenerate = eps_hat(t, AngleConstant::new(0.0)?)?.degenerate;
    }
    checks.sort_by(|a, b| {
        a.name
            .cmp(&b.name)
            .then(a.c.unwrap_or(0.0).total_cmp(&b.c.unwrap_or(0.0)))
    });
    let passed = !checks.iter().any(CheckResult::is_failure);
    Ok(VerificationReport {
        matrix_digest: matrix_digest(t),
        rows: t.rows(),
        cols: t.cols(),
        c_values: c_values.iter().map(|c| c.value()).collect(),
        seed,
        samples,
        degenerate,
        eps,
        checks,
        passed,
        elapsed_ms: 0.0,
    })
}
