//! The angle relation `x ∠_c y` (`<x, y> = c ||x|| ||y||`), its
//! approximate version, and constructors and samplers for vector pairs at a
//! prescribed cosine.

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::ZERO_NORM;

/// Seedable generator used everywhere randomness is needed.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tolerance used for the orthonormality preconditions of the pair builders.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Recommended tolerance for [`is_angle_c`], relative to `||x|| ||y||`.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-10;

/// A cosine `c` in the open interval `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AngleConstant(f64);

impl AngleConstant {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > -1.0 && c < 1.0 {
            Ok(AngleConstant(c))
        } else {
            Err(Error::DomainError(format!(
                "c must lie in (-1, 1), got {c}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> f64 {
        self.0.abs()
    }

    pub fn negated(self) -> Self {
        AngleConstant(-self.0)
    }

    /// `1 + |c|`: the value of `eps_hat` for maps that preserve nothing.
    pub fn sentinel(self) -> f64 {
        1.0 + self.0.abs()
    }
}

impl Serialize for AngleConstant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

/// A deviation bound `eps` attached to the cosine it refers to.
///
/// `0 <= eps <= 1 + |c|`; the upper end is the "not approximately
/// preserving" sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epsilon {
    eps: f64,
    c: AngleConstant,
}

impl Epsilon {
    pub fn new(eps: f64, c: AngleConstant) -> Result<Self> {
        if eps.is_finite() && (0.0..=c.sentinel()).contains(&eps) {
            Ok(Epsilon { eps, c })
        } else {
            Err(Error::DomainError(format!(
                "eps must lie in [0, {}], got {eps}",
                c.sentinel()
            )))
        }
    }

    pub fn sentinel(c: AngleConstant) -> Self {
        Epsilon {
            eps: c.sentinel(),
            c,
        }
    }

    pub fn value(self) -> f64 {
        self.eps
    }

    pub fn angle(self) -> AngleConstant {
        self.c
    }

    /// True when the bound says something, i.e. `eps < 1 + |c|`.
    pub fn is_usable(self) -> bool {
        self.eps < self.c.sentinel()
    }
}

fn nonzero_norms(x: &Vector, y: &Vector) -> Result<(f64, f64)> {
    let (nx, ny) = (x.norm(), y.norm());
    if nx <= ZERO_NORM || ny <= ZERO_NORM {
        return Err(Error::ZeroVector);
    }
    Ok((nx, ny))
}

/// `<x, y> / (||x|| ||y||)`, clamped to `[-1, 1]`.
pub fn cosine(x: &Vector, y: &Vector) -> Result<f64> {
    let (nx, ny) = nonzero_norms(x, y)?;
    // normalize first so huge or tiny inputs cannot overflow the product
    let d = x.scaled(1.0 / nx).dot(&y.scaled(1.0 / ny));
    Ok(d.clamp(-1.0, 1.0))
}

/// `|<x, y> - c ||x|| ||y||| <= tol ||x|| ||y||`.
pub fn is_angle_c(x: &Vector, y: &Vector, c: AngleConstant, tol: f64) -> Result<bool> {
    is_approx_angle_c(x, y, c, tol)
}

/// `x ∠_c^eps y`: the cosine of `(x, y)` lies within `eps` of `c`. Always
/// true once `eps >= 1 + |c|`.
pub fn is_approx_angle_c(x: &Vector, y: &Vector, c: AngleConstant, eps: f64) -> Result<bool> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::DomainError(format!("eps must be >= 0, got {eps}")));
    }
    let cos = cosine(x, y)?;
    Ok(eps >= c.sentinel() || (cos - c.value()).abs() <= eps)
}

fn check_orthonormal(x: &Vector, w: &Vector) -> Result<()> {
    if x.dim() != w.dim() {
        return Err(Error::NotOrthonormal("dimension mismatch".into()));
    }
    let (nx, nw, d) = (x.norm(), w.norm(), x.dot(w));
    if (nx - 1.0).abs() > ORTHONORMAL_TOL
        || (nw - 1.0).abs() > ORTHONORMAL_TOL
        || d.abs() > ORTHONORMAL_TOL
    {
        return Err(Error::NotOrthonormal(format!(
            "||x|| = {nx}, ||w|| = {nw}, <x, w> = {d}"
        )));
    }
    Ok(())
}

/// Unit pair at cosine `c`: `(x, c x + sqrt(1 - c^2) w)` for orthonormal
/// `x`, `w`.
pub fn make_angle_pair(x: &Vector, w: &Vector, c: AngleConstant) -> Result<(Vector, Vector)> {
    check_orthonormal(x, w)?;
    let c = c.value();
    let s = (1.0 - c * c).sqrt();
    let y = x.scaled(c).add_scaled(s, w);
    Ok((x.clone(), y))
}

/// The two symmetric pairs at cosine `c >= 0` spanned by orthonormal `x`, `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPairs {
    /// `(x + l y, -x + l y)` with `l = sqrt((1+c)/(1-c))`: mirror images
    /// about the `y` axis.
    pub about_y: (Vector, Vector),
    /// `(x + l y, x - l y)` with `l = sqrt((1-c)/(1+c))`: mirror images
    /// about the `x` axis.
    pub about_x: (Vector, Vector),
}

pub fn symmetric_angle_pairs(x: &Vector, y: &Vector, c: AngleConstant) -> Result<SymmetricPairs> {
    check_orthonormal(x, y)?;
    let c = c.value();
    if c < 0.0 {
        return Err(Error::DomainError(format!(
            "symmetric pairs are built for c >= 0 (use |c| and negate one vector), got {c}"
        )));
    }
    let wide = ((1.0 + c) / (1.0 - c)).sqrt();
    let narrow = ((1.0 - c) / (1.0 + c)).sqrt();
    Ok(SymmetricPairs {
        about_y: (
            y.scaled(wide).add_scaled(1.0, x),
            y.scaled(wide).add_scaled(-1.0, x),
        ),
        about_x: (x.add_scaled(narrow, y), x.add_scaled(-narrow, y)),
    })
}

/// Uniform point on the unit sphere in `dim` dimensions.
pub fn sample_unit(rng: &mut Rng, dim: usize) -> Vector {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = crate::linalg::norm(&g);
        if n > 1e-8 {
            return Vector::from_vec(g.into_iter().map(|x| x / n).collect());
        }
    }
}

/// Uniformly oriented orthonormal pair `(x, w)`, `dim >= 2`.
pub fn sample_orthonormal_pair(rng: &mut Rng, dim: usize) -> (Vector, Vector) {
    assert!(dim >= 2, "orthonormal pair needs dim >= 2");
    let x = sample_unit(rng, dim);
    loop {
        let g = sample_unit(rng, dim);
        let r = g.add_scaled(-g.dot(&x), &x);
        // second pass cleans up cancellation
        let r = r.add_scaled(-r.dot(&x), &x);
        let n = r.norm();
        if n >= 1e-3 {
            return (x, r.scaled(1.0 / n));
        }
    }
}

/// Unit pair at cosine `c`, uniformly oriented.
pub fn sample_angle_pair(rng: &mut Rng, dim: usize, c: AngleConstant) -> (Vector, Vector) {
    let (x, w) = sample_orthonormal_pair(rng, dim);
    make_angle_pair(&x, &w, c).expect("sampled pair is orthonormal")
}
