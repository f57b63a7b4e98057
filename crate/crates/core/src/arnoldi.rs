//! Arnoldi projection of the core block `S_cc`.
//!
//! One Krylov sweep of dimension `n_A`, classical Gram–Schmidt applied twice
//! per step, no restarts. Ritz values come from the dense Hessenberg
//! eigensolver in [`crate::dense`]; Ritz vectors are reconstructed on demand
//! and their residuals are evaluated against the operator.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dense::{self, DenseMatrix};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::graph::DirectedGraph;
use crate::operator::{LinearOperator, StochasticOperator};
use crate::subspaces::SubspaceDecomposition;

/// Default cap on Krylov basis storage: 4 GiB.
pub const DEFAULT_MEMORY_BUDGET: usize = 4 << 30;

/// Ritz pairs with an estimated residual above this are flagged.
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-6;

/// Relative size of the new direction below which the Krylov space is
/// taken to be invariant.
const BREAKDOWN_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ArnoldiOptions {
    pub n_arnoldi: usize,
    /// Bytes allowed for the `n_A + 1` basis vectors.
    pub memory_budget: usize,
    pub exec: Execution,
}

impl ArnoldiOptions {
    pub fn new(n_arnoldi: usize) -> Self {
        ArnoldiOptions {
            n_arnoldi,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            exec: Execution::default(),
        }
    }
}

/// Orthonormal Krylov vectors stored one after another.
#[derive(Clone, Debug)]
pub struct KrylovBasis {
    dim: usize,
    data: Vec<f64>,
    breakdown_step: Option<usize>,
}

impl KrylovBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored vectors: `n_A + 1`, or `k` after a breakdown at
    /// step `k`.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn vector(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    /// Step at which the residual vanished, if it did.
    pub fn breakdown_step(&self) -> Option<usize> {
        self.breakdown_step
    }

    /// `V y` for a coefficient vector over the first `y.len()` vectors.
    pub fn combine(&self, exec: Execution, y: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        exec::for_each_chunk_mut(exec, &mut out, |first, block| {
            for (j, c) in y.iter().enumerate() {
                let v = &self.vector(j)[first..first + block.len()];
                for (o, &x) in block.iter_mut().zip(v) {
                    *o += c * x;
                }
            }
        });
        out
    }
}

/// `(k + 1) × k` upper Hessenberg matrix of projection coefficients.
#[derive(Clone, Debug)]
pub struct HessenbergMatrix {
    m: DenseMatrix,
}

impl HessenbergMatrix {
    /// Number of Arnoldi steps `k`.
    pub fn steps(&self) -> usize {
        self.m.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    /// The full rectangular matrix.
    pub fn matrix(&self) -> &DenseMatrix {
        &self.m
    }

    /// Leading `k × k` block.
    pub fn square(&self) -> DenseMatrix {
        self.m.leading(self.steps())
    }

    /// `h_{k+1,k}`, zero after a breakdown.
    pub fn last_subdiagonal(&self) -> f64 {
        let k = self.steps();
        if k == 0 {
            0.0
        } else {
            self.m[(k, k - 1)]
        }
    }
}

/// Runs `n_A` Arnoldi steps of `op` from `start`.
pub fn arnoldi_iterate(
    op: &dyn LinearOperator,
    start: &[f64],
    opts: &ArnoldiOptions,
) -> Result<(KrylovBasis, HessenbergMatrix)> {
    let dim = op.dim();
    let n_a = opts.n_arnoldi;
    let exec = opts.exec;
    if start.len() != dim {
        return Err(Error::Dimension {
            expected: dim,
            found: start.len(),
        });
    }
    if n_a == 0 || n_a > dim {
        return Err(Error::InvalidArgument(format!(
            "Arnoldi dimension {n_a} outside [1, {dim}]"
        )));
    }
    if start.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("start vector".into()));
    }
    let required = (n_a + 1).saturating_mul(dim).saturating_mul(8);
    if required > opts.memory_budget {
        return Err(Error::MemoryBudget {
            required,
            budget: opts.memory_budget,
        });
    }
    let norm = exec::norm2(exec, start);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }

    let mut data: Vec<f64> = Vec::new();
    data.try_reserve_exact((n_a + 1) * dim)
        .map_err(|_| Error::MemoryBudget {
            required,
            budget: opts.memory_budget,
        })?;
    data.extend(start.iter().map(|x| x / norm));
    let mut h = DenseMatrix::zeros(n_a + 1, n_a);
    let mut w = vec![0.0; dim];
    let mut breakdown_step = None;

    for k in 0..n_a {
        op.apply_to(&data[k * dim..(k + 1) * dim], &mut w);
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::ArnoldiBreakdown { step: k });
        }
        let w_norm = exec::norm2(exec, &w);
        let count = k + 1;
        for _pass in 0..2 {
            let coeffs = project(exec, &data, dim, count, &w);
            subtract(exec, &data, dim, &coeffs, &mut w);
            for (j, c) in coeffs.into_iter().enumerate() {
                h[(j, k)] += c;
            }
        }
        let beta = exec::norm2(exec, &w);
        // A full basis leaves no room for another direction: whatever is
        // left of `w` is rounding error.
        if beta <= BREAKDOWN_TOL * w_norm || count == dim {
            breakdown_step = Some(count);
            h = truncate(&h, count);
            break;
        }
        h[(k + 1, k)] = beta;
        data.extend(w.iter().map(|x| x / beta));
    }

    Ok((
        KrylovBasis {
            dim,
            data,
            breakdown_step,
        },
        HessenbergMatrix { m: h },
    ))
}

/// `V_{0..count}ᵀ w`, with per-chunk partial sums combined in chunk order.
fn project(exec: Execution, basis: &[f64], dim: usize, count: usize, w: &[f64]) -> Vec<f64> {
    let partials = exec::map_ranges(exec, dim, |r| {
        (0..count)
            .map(|j| {
                let v = &basis[j * dim + r.start..j * dim + r.end];
                v.iter().zip(&w[r.clone()]).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect::<Vec<f64>>()
    });
    let mut out = vec![0.0; count];
    for p in partials {
        for (o, x) in out.iter_mut().zip(p) {
            *o += x;
        }
    }
    out
}

fn subtract(exec: Execution, basis: &[f64], dim: usize, coeffs: &[f64], w: &mut [f64]) {
    exec::for_each_chunk_mut(exec, w, |first, block| {
        for (j, &c) in coeffs.iter().enumerate() {
            let v = &basis[j * dim + first..j * dim + first + block.len()];
            for (x, &b) in block.iter_mut().zip(v) {
                *x -= c * b;
            }
        }
    });
}

/// First `k` columns and `k + 1` rows, with the last row cleared.
fn truncate(h: &DenseMatrix, k: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(k + 1, k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = h[(i, j)];
        }
    }
    m
}

/// Ritz values of the leading square block, in spectral order.
pub fn hessenberg_eigen(h: &HessenbergMatrix) -> Result<Vec<Complex64>> {
    Ok(dense::eigen_hessenberg(&h.square(), false)?.values)
}

/// Ritz value with the cheap residual estimate `h_{k+1,k} |y_k|`.
#[derive(Clone, Debug, Serialize)]
pub struct RitzValue {
    /// 1-based position in spectral order.
    pub m: usize,
    pub lambda: Complex64,
    pub estimate: f64,
    pub converged: bool,
}

/// Eigenvalue with its explicitly checked eigenvector.
#[derive(Clone, Debug)]
pub struct EigenPair {
    /// 1-based position in spectral order.
    pub m: usize,
    pub lambda: Complex64,
    /// `arg λ` in `(-π, π]`.
    pub phase: f64,
    /// Unit 2-norm, largest-modulus entry real and positive.
    pub psi: Vec<Complex64>,
    /// `‖A ψ − λ ψ‖₂`.
    pub residual: f64,
}

/// Principal argument with `-π` folded onto `π`.
pub(crate) fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

struct RitzSystem {
    values: Vec<Complex64>,
    /// Unit-norm Hessenberg eigenvectors in the same order.
    vectors: Vec<Vec<Complex64>>,
}

fn ritz_system(h: &HessenbergMatrix) -> Result<RitzSystem> {
    let mut eig = dense::eigen_hessenberg(&h.square(), true)?;
    for y in eig.vectors.iter_mut() {
        dense::normalize_phase(y);
    }
    Ok(RitzSystem {
        values: eig.values,
        vectors: eig.vectors,
    })
}

fn estimates(h: &HessenbergMatrix, sys: &RitzSystem, tol: f64) -> Vec<RitzValue> {
    let beta = h.last_subdiagonal();
    let k = h.steps();
    sys.values
        .iter()
        .zip(&sys.vectors)
        .enumerate()
        .map(|(i, (&lambda, y))| {
            let estimate = beta * y[k - 1].norm();
            RitzValue {
                m: i + 1,
                lambda,
                estimate,
                converged: estimate <= tol,
            }
        })
        .collect()
}

/// Ritz pairs for the selected 0-based positions of the Hessenberg
/// spectrum. `psi` lives in the operator's own index space.
pub fn ritz_vectors(
    op: &dyn LinearOperator,
    basis: &KrylovBasis,
    h: &HessenbergMatrix,
    selection: &[usize],
    exec: Execution,
) -> Result<Vec<EigenPair>> {
    let sys = ritz_system(h)?;
    if let Some(&bad) = selection.iter().find(|&&i| i >= sys.values.len()) {
        return Err(Error::InvalidArgument(format!(
            "selection index {bad} outside spectrum of size {}",
            sys.values.len()
        )));
    }
    Ok(build_pairs(op, basis, &sys, selection, exec))
}

fn build_pairs(
    op: &dyn LinearOperator,
    basis: &KrylovBasis,
    sys: &RitzSystem,
    selection: &[usize],
    exec: Execution,
) -> Vec<EigenPair> {
    exec::map_items(exec, selection, |&i| {
        let lambda = sys.values[i];
        let mut psi = basis.combine(exec, &sys.vectors[i]);
        dense::normalize_phase(&mut psi);
        let residual = residual_norm(op, lambda, &psi);
        EigenPair {
            m: i + 1,
            lambda,
            phase: principal_arg(lambda),
            psi,
            residual,
        }
    })
}

/// `‖A ψ − λ ψ‖₂` for a complex vector.
pub fn residual_norm(op: &dyn LinearOperator, lambda: Complex64, psi: &[Complex64]) -> f64 {
    let n = op.dim();
    let re: Vec<f64> = psi.iter().map(|z| z.re).collect();
    let im: Vec<f64> = psi.iter().map(|z| z.im).collect();
    let mut ar = vec![0.0; n];
    let mut ai = vec![0.0; n];
    op.apply_to(&re, &mut ar);
    op.apply_to(&im, &mut ai);
    (0..n)
        .map(|i| (Complex64::new(ar[i], ai[i]) - lambda * psi[i]).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug)]
pub struct CoreSpectrumConfig {
    pub n_arnoldi: usize,
    /// Seeded random start vector; uniform when absent.
    pub seed: Option<u64>,
    pub convergence_tol: f64,
    /// Upper bound on reconstructed eigenvectors (leading converged ones).
    pub max_vectors: usize,
    pub memory_budget: usize,
    pub exec: Execution,
}

impl Default for CoreSpectrumConfig {
    fn default() -> Self {
        CoreSpectrumConfig {
            n_arnoldi: 500,
            seed: None,
            convergence_tol: DEFAULT_CONVERGENCE_TOL,
            max_vectors: 200,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoreSpectrum {
    /// Every Ritz value, spectral order.
    pub values: Vec<RitzValue>,
    /// Converged pairs, `psi` over all nodes with zeros on subspace nodes.
    pub pairs: Vec<EigenPair>,
    /// Steps actually taken.
    pub n_arnoldi: usize,
    /// The requested dimension exceeded `N_c` and was lowered.
    pub clamped: bool,
    pub breakdown_step: Option<usize>,
}

/// Start vector over `dim` core positions.
pub fn start_vector(dim: usize, seed: Option<u64>) -> Vec<f64> {
    match seed {
        None => vec![1.0 / (dim as f64).sqrt(); dim],
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (0..dim).map(|_| rng.gen::<f64>() + 0.5).collect()
        }
    }
}

/// Leading core eigenvalues of `S_cc` (or `S*_cc`, following the
/// decomposition's direction).
pub fn core_spectrum(
    g: &DirectedGraph,
    decomp: &SubspaceDecomposition,
    config: &CoreSpectrumConfig,
) -> Result<CoreSpectrum> {
    let op = StochasticOperator::new(g, decomp.direction()).with_execution(config.exec);
    let core = op.core_operator(decomp)?;
    let n_c = core.dim();
    if n_c == 0 {
        return Ok(CoreSpectrum {
            values: Vec::new(),
            pairs: Vec::new(),
            n_arnoldi: 0,
            clamped: config.n_arnoldi > 0,
            breakdown_step: None,
        });
    }
    if config.n_arnoldi == 0 {
        return Err(Error::InvalidArgument("Arnoldi dimension must be positive".into()));
    }
    let n_a = config.n_arnoldi.min(n_c);
    let opts = ArnoldiOptions {
        n_arnoldi: n_a,
        memory_budget: config.memory_budget,
        exec: config.exec,
    };
    let start = start_vector(n_c, config.seed);
    let (basis, h) = arnoldi_iterate(&core, &start, &opts)?;
    let sys = ritz_system(&h)?;
    let values = estimates(&h, &sys, config.convergence_tol);
    let selection: Vec<usize> = values
        .iter()
        .filter(|v| v.converged)
        .map(|v| v.m - 1)
        .take(config.max_vectors)
        .collect();
    let mut pairs = build_pairs(&core, &basis, &sys, &selection, config.exec);
    let order = decomp.core_order();
    for pair in pairs.iter_mut() {
        let mut full = vec![Complex64::new(0.0, 0.0); g.node_count()];
        for (p, z) in pair.psi.iter().enumerate() {
            full[order[p] as usize] = *z;
        }
        pair.psi = full;
    }
    Ok(CoreSpectrum {
        values,
        pairs,
        n_arnoldi: h.steps(),
        clamped: n_a < config.n_arnoldi,
        breakdown_step: basis.breakdown_step(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::FnOperator;
    use crate::subspaces::detect_subspaces;

    fn swap() -> FnOperator<impl Fn(&[f64], &mut [f64]) + Sync> {
        FnOperator::new(2, |x: &[f64], y: &mut [f64]| {
            y[0] = x[1];
            y[1] = x[0];
        })
    }

    #[test]
    fn two_cycle_projection() {
        let (basis, h) = arnoldi_iterate(&swap(), &[1.0, 0.0], &ArnoldiOptions::new(2)).unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis.vector(0), &[1.0, 0.0]);
        assert_eq!(basis.vector(1), &[0.0, 1.0]);
        assert_eq!(h.square(), DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]));
        assert_eq!(h.last_subdiagonal(), 0.0);
    }

    #[test]
    fn identity_breaks_down_at_first_step() {
        let id = FnOperator::new(1, |x: &[f64], y: &mut [f64]| y.copy_from_slice(x));
        let (basis, h) = arnoldi_iterate(&id, &[3.0], &ArnoldiOptions::new(1)).unwrap();
        assert_eq!(basis.breakdown_step(), Some(1));
        assert_eq!(basis.len(), 1);
        assert_eq!(h.square(), DenseMatrix::from_rows(&[vec![1.0]]));
    }

    #[test]
    fn early_breakdown_truncates() {
        let id = FnOperator::new(4, |x: &[f64], y: &mut [f64]| y.copy_from_slice(x));
        let (basis, h) =
            arnoldi_iterate(&id, &[1.0, 2.0, 3.0, 4.0], &ArnoldiOptions::new(3)).unwrap();
        assert_eq!(basis.breakdown_step(), Some(1));
        assert_eq!(h.steps(), 1);
        assert_eq!(h.matrix().rows(), 2);
    }

    #[test]
    fn argument_errors() {
        let op = swap();
        assert!(matches!(
            arnoldi_iterate(&op, &[0.0, 0.0], &ArnoldiOptions::new(1)),
            Err(Error::ZeroVector)
        ));
        assert!(arnoldi_iterate(&op, &[1.0, 0.0], &ArnoldiOptions::new(3)).is_err());
        assert!(arnoldi_iterate(&op, &[1.0], &ArnoldiOptions::new(1)).is_err());
        let tight = ArnoldiOptions {
            memory_budget: 16,
            ..ArnoldiOptions::new(2)
        };
        assert!(matches!(
            arnoldi_iterate(&op, &[1.0, 0.0], &tight),
            Err(Error::MemoryBudget { required: 48, budget: 16 })
        ));
        let nan = FnOperator::new(2, |_: &[f64], y: &mut [f64]| y.fill(f64::NAN));
        assert!(matches!(
            arnoldi_iterate(&nan, &[1.0, 0.0], &ArnoldiOptions::new(2)),
            Err(Error::ArnoldiBreakdown { step: 0 })
        ));
    }

    #[test]
    fn two_cycle_ritz_pairs() {
        let op = swap();
        let (basis, h) = arnoldi_iterate(&op, &[1.0, 0.0], &ArnoldiOptions::new(2)).unwrap();
        let pairs = ritz_vectors(&op, &basis, &h, &[0, 1], Execution::Sequential).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pairs[0].lambda - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((pairs[0].psi[0] - r).norm() < 1e-14 && (pairs[0].psi[1] - r).norm() < 1e-14);
        assert!(pairs[0].residual <= 1e-12);
        assert!((pairs[1].lambda + 1.0).norm() < 1e-14);
        // largest-modulus entry is the first on ties, made positive
        assert!((pairs[1].psi[0] - r).norm() < 1e-14 && (pairs[1].psi[1] + r).norm() < 1e-14);
        assert_eq!(pairs[1].phase, std::f64::consts::PI);
        assert!(ritz_vectors(&op, &basis, &h, &[2], Execution::Sequential).is_err());
    }

    #[test]
    fn t3_core_spectrum() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 0)]).unwrap();
        let d = detect_subspaces(&g);
        let cfg = CoreSpectrumConfig {
            n_arnoldi: 5,
            ..CoreSpectrumConfig::default()
        };
        let s = core_spectrum(&g, &d, &cfg).unwrap();
        assert!(s.clamped);
        assert_eq!(s.n_arnoldi, 1);
        assert_eq!(s.values.len(), 1);
        assert!((s.values[0].lambda.re - 1.0 / 3.0).abs() < 1e-15);
        let p = &s.pairs[0];
        assert_eq!(p.psi.len(), 3);
        assert_eq!(p.psi[2], Complex64::new(1.0, 0.0));
        assert_eq!(p.psi[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn seeded_start_is_reproducible() {
        assert_eq!(start_vector(10, Some(7)), start_vector(10, Some(7)));
        assert_ne!(start_vector(10, Some(7)), start_vector(10, Some(8)));
        assert!(start_vector(10, Some(7)).iter().all(|&x| x >= 0.5));
    }

    #[test]
    fn empty_core() {
        let g = DirectedGraph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        let d = detect_subspaces(&g);
        let s = core_spectrum(&g, &d, &CoreSpectrumConfig::default()).unwrap();
        assert!(s.values.is_empty() && s.pairs.is_empty());
    }
}
