//! Seeded random sampling of matrices, states and maps.
//!
//! Every draw goes through [`ExperimentRng`], a ChaCha8 stream selected by
//! `(seed, stream)`, so results are reproducible across runs and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::CpMap;
use crate::tensor::{eigh, Mat, SquareOperator, C64};

#[derive(Debug, Clone)]
pub struct ExperimentRng {
    inner: ChaCha8Rng,
}

impl ExperimentRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        self.inner.gen_range(lo..=hi)
    }

    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }
}

pub fn gaussian_matrix(rng: &mut ExperimentRng, rows: usize, cols: usize) -> Mat {
    // fill row-major so the draw order does not depend on storage layout
    let mut m = Mat::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = rng.complex_normal();
        }
    }
    m
}

/// Full-rank Wishart density operator `G G† / Tr(G G†)`.
pub fn random_density(rng: &mut ExperimentRng, dims: &[usize]) -> SquareOperator {
    let n: usize = dims.iter().product();
    random_density_with_rank(rng, dims, n)
}

/// Wishart density operator of rank at most `rank`.
pub fn random_density_with_rank(rng: &mut ExperimentRng, dims: &[usize], rank: usize) -> SquareOperator {
    let n: usize = dims.iter().product();
    let g = gaussian_matrix(rng, n, rank.max(1));
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    SquareOperator::new(w / C64::new(tr, 0.0), dims.to_vec()).expect("dims multiply to n")
}

/// Normalized random pure state vector.
pub fn random_pure_vector(rng: &mut ExperimentRng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| rng.complex_normal()).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-like unitary from the QR decomposition of a Gaussian matrix.
pub fn random_unitary(rng: &mut ExperimentRng, d: usize) -> Mat {
    let g = gaussian_matrix(rng, d, d);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Random CP map with `kraus_count` Gaussian Kraus operators.
///
/// With `trace_preserving` the Kraus operators are right-multiplied by
/// `(Σ K†K)^{-1/2}`.
pub fn random_cp_map(
    rng: &mut ExperimentRng,
    d_in: usize,
    d_out: usize,
    kraus_count: usize,
    trace_preserving: bool,
) -> CpMap {
    let mut kraus: Vec<Mat> = (0..kraus_count.max(1))
        .map(|_| gaussian_matrix(rng, d_out, d_in))
        .collect();
    if trace_preserving {
        let s: Mat = kraus.iter().map(|k| k.adjoint() * k).fold(Mat::zeros(d_in, d_in), |a, b| a + b);
        let inv_sqrt = eigh(&s).map_eigenvalues(|x| 1.0 / x.sqrt());
        for k in kraus.iter_mut() {
            *k = &*k * &inv_sqrt;
        }
    }
    CpMap::new(kraus).expect("nonempty Kraus list with consistent shapes")
}

/// Random CPTP map; the Kraus count is drawn uniformly from `⌈d_in/d_out⌉..=d_in`,
/// the lower end being the fewest operators that can satisfy `Σ K†K = I`.
pub fn random_channel(rng: &mut ExperimentRng, d_in: usize, d_out: usize) -> CpMap {
    let lo = d_in.div_ceil(d_out.max(1)).max(1);
    let r = rng.int_inclusive(lo, d_in.max(lo));
    random_cp_map(rng, d_in, d_out, r, true)
}
