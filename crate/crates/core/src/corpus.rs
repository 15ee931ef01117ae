//! Seeded random matrices for tests and the acceptance suite.
//!
//! Every generator is a pure function of its seed. The standard corpus
//! mixes Gaussian maps, maps with a prescribed condition number (1 to 1e6),
//! exact and scaled isometries, and maps with a kernel.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::angle::{rng_from_seed, Rng};
use crate::linalg::{dot, norm, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    Gaussian,
    Conditioned,
    Isometry,
    ScaledIsometry,
    RankDeficient,
    Wide,
}

impl CorpusKind {
    /// Whether the map is injective by construction.
    pub fn is_injective(self) -> bool {
        !matches!(self, CorpusKind::RankDeficient | CorpusKind::Wide)
    }
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub label: String,
    pub kind: CorpusKind,
    pub matrix: Matrix,
}

pub fn gaussian(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    Matrix::from_raw(rows, cols, data)
}

/// Haar-ish random orthogonal `n x n` matrix: Gram-Schmidt on Gaussian
/// columns.
pub fn random_orthogonal(rng: &mut Rng, n: usize) -> Matrix {
    orthonormal_columns(rng, n, n)
}

/// `rows x cols` matrix with orthonormal columns, `rows >= cols`.
pub fn orthonormal_columns(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
    assert!(rows >= cols);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cols);
    while basis.len() < cols {
        let mut g: Vec<f64> = (0..rows).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&g, b);
                g.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
        }
        let n = norm(&g);
        if n > 1e-6 {
            basis.push(g.into_iter().map(|x| x / n).collect());
        }
    }
    let mut data = vec![0.0; rows * cols];
    for (j, b) in basis.iter().enumerate() {
        for (i, x) in b.iter().enumerate() {
            data[i * cols + j] = *x;
        }
    }
    Matrix::from_raw(rows, cols, data)
}

/// `U diag(sigma) V^T` with random orthonormal `U` (rows x k), `V` (cols x k).
pub fn with_singular_values(rng: &mut Rng, rows: usize, cols: usize, sigma: &[f64]) -> Matrix {
    let k = sigma.len();
    assert!(k <= rows.min(cols));
    let u = orthonormal_columns(rng, rows, k);
    let v = orthonormal_columns(rng, cols, k);
    let mut us = u.clone();
    for i in 0..rows {
        for (j, s) in sigma.iter().enumerate() {
            us.data_mut()[i * k + j] = u.get(i, j) * s;
        }
    }
    us.matmul(&v.transpose())
}

/// Singular values log-spaced from `scale` down to `scale / cond`.
pub fn conditioned(rng: &mut Rng, rows: usize, cols: usize, cond: f64, scale: f64) -> Matrix {
    let k = cols.min(rows);
    let sigma: Vec<f64> = (0..k)
        .map(|i| {
            let t = if k == 1 {
                0.0
            } else {
                i as f64 / (k - 1) as f64
            };
            scale * cond.powf(-t)
        })
        .collect();
    with_singular_values(rng, rows, cols, &sigma)
}

fn dims(rng: &mut Rng, tall: bool) -> (usize, usize) {
    let n = rng.gen_range(2..=6);
    if tall && n < 6 {
        (rng.gen_range(n + 1..=6), n)
    } else {
        (n, n)
    }
}

/// `count` matrices with 2 to 6 rows and columns covering every
/// [`CorpusKind`].
pub fn standard_corpus(seed: u64, count: usize) -> Vec<CorpusEntry> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|i| {
            let (kind, matrix) = match i % 6 {
                0 => {
                    let (m, n) = dims(&mut rng, i % 4 == 0);
                    (CorpusKind::Gaussian, gaussian(&mut rng, m, n))
                }
                1 | 2 => {
                    let (m, n) = dims(&mut rng, i % 4 == 1);
                    let cond = 10f64.powi(((i / 6) % 7) as i32);
                    let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
                    (
                        CorpusKind::Conditioned,
                        conditioned(&mut rng, m, n, cond, scale),
                    )
                }
                3 => {
                    let (m, n) = dims(&mut rng, i % 4 == 3);
                    if (i / 6) % 2 == 0 {
                        (CorpusKind::Isometry, orthonormal_columns(&mut rng, m, n))
                    } else {
                        let s = 10f64.powf(rng.gen_range(-2.0..2.0));
                        (
                            CorpusKind::ScaledIsometry,
                            orthonormal_columns(&mut rng, m, n).scaled(s),
                        )
                    }
                }
                4 => {
                    let (m, n) = dims(&mut rng, false);
                    let r = rng.gen_range(1..n);
                    let left = gaussian(&mut rng, m, r);
                    let right = gaussian(&mut rng, r, n);
                    (CorpusKind::RankDeficient, left.matmul(&right))
                }
                _ => {
                    let m = rng.gen_range(2..=5);
                    let n = rng.gen_range(m + 1..=6);
                    (CorpusKind::Wide, gaussian(&mut rng, m, n))
                }
            };
            CorpusEntry {
                label: format!("{i:03}-{kind:?}-{}x{}", matrix.rows(), matrix.cols()),
                kind,
                matrix,
            }
        })
        .collect()
}

/// `count` Gaussian injective matrices (square or tall), 2 to 6 dims.
pub fn injective_corpus(seed: u64, count: usize) -> Vec<Matrix> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|i| {
            let (m, n) = dims(&mut rng, i % 2 == 1);
            gaussian(&mut rng, m, n)
        })
        .collect()
}

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
