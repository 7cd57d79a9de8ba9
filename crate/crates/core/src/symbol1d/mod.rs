//! Symbol calculus on the circle: Fourier-basis matrices of `Op(a)`, Sobolev
//! weights and norms, smooth cutoffs and the cut-off resolvent symbol.

mod cutoff;
mod presets;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use rustfft::FftPlanner;

pub use cutoff::CutoffFunction;
pub use presets::{abs_xi_m, c_theta_times_xi, c_theta_times_xi_pow, constant, pauli_monopole, shift, xi};

use crate::contour::{quad_nodes, ContourSpec};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm_2, ComplexMatrix, LuFactors};
use crate::scalar::{Real, C};

/// Relative size of the Fourier tail above which a discretization is
/// flagged as possibly aliased.
pub const ALIASING_TOLERANCE: f64 = 1e-10;

type BlockFn<T> = Arc<dyn Fn(T, T, &mut [C<T>]) + Send + Sync>;

/// A symbol `a(theta, xi)` on `S^1 x R` with values in `N x N` blocks
/// (row-major), its order and its principal part.
#[derive(Clone)]
pub struct SymbolFunction<T> {
    name: String,
    order: f64,
    fiber_dim: usize,
    full: BlockFn<T>,
    principal: BlockFn<T>,
}

impl<T> fmt::Debug for SymbolFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolFunction")
            .field("name", &self.name)
            .field("order", &self.order)
            .field("fiber_dim", &self.fiber_dim)
            .finish_non_exhaustive()
    }
}

impl<T: Real> SymbolFunction<T> {
    pub fn new(
        name: impl Into<String>,
        order: f64,
        fiber_dim: usize,
        full: impl Fn(T, T, &mut [C<T>]) + Send + Sync + 'static,
        principal: impl Fn(T, T, &mut [C<T>]) + Send + Sync + 'static,
    ) -> Self {
        assert!(fiber_dim >= 1, "fiber dimension must be positive");
        Self { name: name.into(), order, fiber_dim, full: Arc::new(full), principal: Arc::new(principal) }
    }

    /// Scalar symbol from closures returning one value.
    pub fn scalar(
        name: impl Into<String>,
        order: f64,
        full: impl Fn(T, T) -> C<T> + Send + Sync + 'static,
        principal: impl Fn(T, T) -> C<T> + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, order, 1, move |t, x, out| out[0] = full(t, x), move |t, x, out| out[0] = principal(t, x))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn eval_into(&self, theta: T, xi: T, out: &mut [C<T>]) {
        (self.full)(theta, xi, out)
    }

    pub fn principal_into(&self, theta: T, xi: T, out: &mut [C<T>]) {
        (self.principal)(theta, xi, out)
    }

    pub fn eval(&self, theta: T, xi: T) -> Vec<C<T>> {
        let mut out = vec![C::zero(); self.fiber_dim * self.fiber_dim];
        self.eval_into(theta, xi, &mut out);
        out
    }

    pub fn principal(&self, theta: T, xi: T) -> Vec<C<T>> {
        let mut out = vec![C::zero(); self.fiber_dim * self.fiber_dim];
        self.principal_into(theta, xi, &mut out);
        out
    }

    /// Renamed copy.
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `self + other` with the order of the larger term.
    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.fiber_dim, other.fiber_dim, "fiber dimensions differ");
        let (a, b) = (self.clone(), other.clone());
        let (pa, pb) = (self.clone(), other.clone());
        let order = self.order.max(other.order);
        let keep_a = self.order >= other.order;
        let keep_b = other.order >= self.order;
        let n2 = self.fiber_dim * self.fiber_dim;
        Self::new(
            format!("{}+{}", self.name, other.name),
            order,
            self.fiber_dim,
            move |t, x, out| {
                a.eval_into(t, x, out);
                let mut tmp = vec![C::zero(); n2];
                b.eval_into(t, x, &mut tmp);
                out.iter_mut().zip(&tmp).for_each(|(o, v)| *o += *v);
            },
            move |t, x, out| {
                out.iter_mut().for_each(|o| *o = C::zero());
                let mut tmp = vec![C::zero(); n2];
                if keep_a {
                    pa.principal_into(t, x, &mut tmp);
                    out.iter_mut().zip(&tmp).for_each(|(o, v)| *o += *v);
                }
                if keep_b {
                    pb.principal_into(t, x, &mut tmp);
                    out.iter_mut().zip(&tmp).for_each(|(o, v)| *o += *v);
                }
            },
        )
    }

    /// `c * self`.
    pub fn scaled(&self, c: C<T>) -> Self {
        let (a, p) = (self.clone(), self.clone());
        Self::new(
            format!("{}*{}", c, self.name),
            self.order,
            self.fiber_dim,
            move |t, x, out| {
                a.eval_into(t, x, out);
                out.iter_mut().for_each(|o| *o *= c);
            },
            move |t, x, out| {
                p.principal_into(t, x, out);
                out.iter_mut().for_each(|o| *o *= c);
            },
        )
    }

    /// Pointwise block product `self * other` with additive order.
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.fiber_dim, other.fiber_dim, "fiber dimensions differ");
        let n = self.fiber_dim;
        let (a, b) = (self.clone(), other.clone());
        let (pa, pb) = (self.clone(), other.clone());
        Self::new(
            format!("({})({})", self.name, other.name),
            self.order + other.order,
            n,
            move |t, x, out| {
                let (u, v) = (a.eval(t, x), b.eval(t, x));
                block_mul(n, &u, &v, out);
            },
            move |t, x, out| {
                let (u, v) = (pa.principal(t, x), pb.principal(t, x));
                block_mul(n, &u, &v, out);
            },
        )
    }

    /// Largest defect of `principal(theta, r xi) = r^m principal(theta, xi)`
    /// over the sample grid, relative to the sampled magnitude.
    pub fn homogeneity_defect(&self, thetas: &[T], xis: &[T], scales: &[T]) -> f64 {
        let mut worst = 0.0f64;
        for &t in thetas {
            for &x in xis {
                if x.abs() < T::one() {
                    continue;
                }
                let base = self.principal(t, x);
                for &r in scales {
                    if r < T::one() {
                        continue;
                    }
                    let scaled = self.principal(t, r * x);
                    let factor = r.powf(T::lit(self.order));
                    for (s, b) in scaled.iter().zip(&base) {
                        let d = (*s - *b * factor).norm().as_f64();
                        let mag = (b.norm() * factor).as_f64().max(1e-300);
                        worst = worst.max(d / mag.max(1.0));
                    }
                }
            }
        }
        worst
    }

    /// `max |(eval - principal)(theta, xi)| / (1 + |xi|)^(m - 1)` over the grid.
    pub fn lower_order_constant(&self, thetas: &[T], xis: &[T]) -> f64 {
        let mut worst = 0.0f64;
        for &t in thetas {
            for &x in xis {
                let e = self.eval(t, x);
                let p = self.principal(t, x);
                let diff = e.iter().zip(&p).map(|(a, b)| (*a - *b).norm().as_f64()).fold(0.0, f64::max);
                let w = (1.0 + x.abs().as_f64()).powf(self.order - 1.0);
                worst = worst.max(diff / w);
            }
        }
        worst
    }
}

fn block_mul<T: Real>(n: usize, a: &[C<T>], b: &[C<T>], out: &mut [C<T>]) {
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).fold(C::zero(), |acc, k| acc + a[i * n + k] * b[k * n + j]);
        }
    }
}

/// Matrix of an operator in the Fourier basis `e^{ik theta}`, `k = -K..K`,
/// with blocks of size `N` per mode.
#[derive(Clone, Debug)]
pub struct DiscretizedOperator<T> {
    pub matrix: ComplexMatrix<T>,
    pub k_max: usize,
    pub order: f64,
    pub fiber_dim: usize,
    /// Name of the symbol the matrix was built from, if any.
    pub symbol: Option<String>,
    /// Set when the Fourier tail of the symbol exceeded [`ALIASING_TOLERANCE`].
    pub aliasing_risk: bool,
}

impl<T: Real> DiscretizedOperator<T> {
    pub fn from_matrix(matrix: ComplexMatrix<T>, k_max: usize, fiber_dim: usize, order: f64) -> Result<Self> {
        let expected = fiber_dim * (2 * k_max + 1);
        if matrix.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: matrix.dim() });
        }
        Ok(Self { matrix, k_max, order, fiber_dim, symbol: None, aliasing_risk: false })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Fourier mode of basis index `i`.
    pub fn mode_of(&self, i: usize) -> i64 {
        (i / self.fiber_dim) as i64 - self.k_max as i64
    }

    /// Restriction to the centred window of modes `|k| <= k`.
    pub fn window(&self, k: usize) -> Self {
        assert!(k <= self.k_max, "window larger than the discretization");
        let offset = self.fiber_dim * (self.k_max - k);
        let size = self.fiber_dim * (2 * k + 1);
        Self { matrix: self.matrix.block(offset, size), k_max: k, ..self.clone() }
    }

    /// Same operator data with another matrix (same basis).
    pub fn with_matrix(&self, matrix: ComplexMatrix<T>) -> Self {
        assert_eq!(matrix.dim(), self.dim(), "basis mismatch");
        Self { matrix, ..self.clone() }
    }

    /// `||W_t M W_s^{-1}||_2`, the discrete norm `H^s -> H^t`.
    pub fn sobolev_norm(&self, s: f64, t: f64) -> T {
        sobolev_matrix_norm(&self.matrix, self.k_max, self.fiber_dim, s, t)
    }
}

/// Fourier grid size used by [`op_from_symbol`].
pub fn oversampled_grid_len(k_max: usize) -> usize {
    4 * (2 * k_max + 1)
}

/// `Op(a)` on modes `-K..K`: block `(j, k)` is the `(j - k)`-th Fourier
/// coefficient of `theta -> a(theta, k)`, computed by FFT on the
/// oversampled grid of [`oversampled_grid_len`] points.
pub fn op_from_symbol<T: Real>(a: &SymbolFunction<T>, k_max: usize) -> Result<DiscretizedOperator<T>> {
    if k_max < 1 {
        return Err(Error::InvalidSymbol { reason: "mode cutoff K must be at least 1".into() });
    }
    let n = a.fiber_dim();
    let modes = 2 * k_max + 1;
    let dim = n * modes;
    let l = oversampled_grid_len(k_max);
    let thetas: Vec<T> = (0..l).map(|i| T::two_pi() * T::lit(i as f64) / T::lit(l as f64)).collect();
    let fft = FftPlanner::<T>::new().plan_fft_forward(l);
    let inv_l = T::one() / T::lit(l as f64);

    // Column blocks: for each input mode k, the coefficients of every entry.
    let columns: Vec<Result<(Vec<C<T>>, f64, f64)>> = (0..modes)
        .into_par_iter()
        .map(|ci| {
            let k = ci as i64 - k_max as i64;
            let xi = T::lit(k as f64);
            // samples[e][l] for entry e of the block.
            let mut samples = vec![vec![C::zero(); l]; n * n];
            let mut block = vec![C::zero(); n * n];
            for (li, &t) in thetas.iter().enumerate() {
                a.eval_into(t, xi, &mut block);
                for (e, v) in block.iter().enumerate() {
                    if !(v.re.is_finite() && v.im.is_finite()) {
                        return Err(Error::SymbolNonFinite { theta: t.as_f64(), xi: k as f64 });
                    }
                    samples[e][li] = *v;
                }
            }
            let mut col = vec![C::zero(); dim * n];
            let (mut head, mut tail) = (0.0f64, 0.0f64);
            for (e, s) in samples.iter_mut().enumerate() {
                fft.process(s);
                for (p, c) in s.iter().enumerate() {
                    let freq = if p <= l / 2 { p as i64 } else { p as i64 - l as i64 };
                    let mag = c.norm().as_f64() * inv_l.as_f64();
                    if freq.unsigned_abs() as usize > 2 * k_max {
                        tail = tail.max(mag);
                    } else {
                        head = head.max(mag);
                    }
                }
                let (bi, bj) = (e / n, e % n);
                for ri in 0..modes {
                    let j = ri as i64 - k_max as i64;
                    let idx = (j - k).rem_euclid(l as i64) as usize;
                    // Row (ri, bi), column (ci, bj) stored column-major within this block column.
                    col[(ri * n + bi) * n + bj] = s[idx] * inv_l;
                }
            }
            Ok((col, head, tail))
        })
        .collect();

    let mut matrix = ComplexMatrix::zeros(dim);
    let (mut head, mut tail) = (0.0f64, 0.0f64);
    for (ci, column) in columns.into_iter().enumerate() {
        let (col, h, t) = column?;
        head = head.max(h);
        tail = tail.max(t);
        for r in 0..dim {
            for bj in 0..n {
                matrix[(r, ci * n + bj)] = col[r * n + bj];
            }
        }
    }
    Ok(DiscretizedOperator {
        matrix,
        k_max,
        order: a.order(),
        fiber_dim: n,
        symbol: Some(a.name().to_string()),
        aliasing_risk: tail > ALIASING_TOLERANCE * head.max(f64::MIN_POSITIVE),
    })
}

/// Diagonal entries `(1 + k^2)^(s/2)` of the Sobolev weight, one per basis index.
pub fn sobolev_weights<T: Real>(k_max: usize, s: f64, fiber_dim: usize) -> Vec<T> {
    let mut w = Vec::with_capacity(fiber_dim * (2 * k_max + 1));
    for k in -(k_max as i64)..=(k_max as i64) {
        let v = T::lit((1.0 + (k * k) as f64).powf(0.5 * s));
        w.extend(std::iter::repeat(v).take(fiber_dim));
    }
    w
}

pub fn sobolev_weight<T: Real>(k_max: usize, s: f64, fiber_dim: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_real_diag(&sobolev_weights(k_max, s, fiber_dim))
}

/// `||W_t M W_s^{-1}||_2` for a matrix in the Fourier basis.
pub fn sobolev_matrix_norm<T: Real>(m: &ComplexMatrix<T>, k_max: usize, fiber_dim: usize, s: f64, t: f64) -> T {
    let left = sobolev_weights::<T>(k_max, t, fiber_dim);
    let right = sobolev_weights::<T>(k_max, -s, fiber_dim);
    operator_norm_2(&m.diag_scale(&left, &right))
}

pub fn sobolev_op_norm<T: Real>(op: &DiscretizedOperator<T>, s: f64, t: f64) -> T {
    op.sobolev_norm(s, t)
}

/// Sample grid used to check invertibility of `a_m - lambda` where the
/// cutoff is nonzero: 32 angles and geometrically spaced `|xi| >= rho`.
fn check_grid(rho: f64) -> (Vec<f64>, Vec<f64>) {
    let thetas: Vec<f64> = (0..32).map(|i| std::f64::consts::TAU * i as f64 / 32.0).collect();
    let mut xis = Vec::new();
    for j in 0..=48 {
        let x = rho * 10f64.powf(j as f64 / 8.0);
        xis.push(x);
        xis.push(-x);
    }
    (thetas, xis)
}

/// Inverse of `block - lambda I`, `None` when numerically singular.
fn shifted_inverse<T: Real>(n: usize, block: &[C<T>], lambda: C<T>) -> Option<Vec<C<T>>> {
    let scale = block.iter().map(|z| z.norm()).fold(lambda.norm(), T::max).max(T::one());
    if n == 1 {
        let d = block[0] - lambda;
        return (d.norm() > T::tol(1e-13) * scale).then(|| vec![d.inv()]);
    }
    let m = ComplexMatrix::from_fn(n, |i, j| block[i * n + j] - if i == j { lambda } else { C::zero() });
    let lu = LuFactors::new(&m).ok()?;
    Some(lu.inverse().as_slice().to_vec())
}

/// The smoothed resolvent symbol `psi(xi) (a_m(theta, xi) - lambda)^-1`,
/// of order `-m`.
pub fn cutoff_resolvent_symbol<T: Real>(
    a: &SymbolFunction<T>,
    psi: &CutoffFunction,
    lambda: C<T>,
) -> Result<SymbolFunction<T>> {
    let n = a.fiber_dim();
    let (thetas, xis) = check_grid(psi.rho);
    for &t in &thetas {
        for &x in &xis {
            let block = a.principal(T::lit(t), T::lit(x));
            if shifted_inverse(n, &block, lambda).is_none() {
                return Err(Error::SymbolSingular { theta: t, xi: x });
            }
        }
    }
    let (am, psi) = (a.clone(), *psi);
    let f = move |t: T, x: T, out: &mut [C<T>]| {
        let w = psi.eval(x.as_f64());
        if w == 0.0 {
            out.iter_mut().for_each(|o| *o = C::zero());
            return;
        }
        let block = am.principal(t, x);
        match shifted_inverse(n, &block, lambda) {
            Some(inv) => out.iter_mut().zip(inv).for_each(|(o, v)| *o = v * T::lit(w)),
            None => out.iter_mut().for_each(|o| *o = C::new(T::nan(), T::nan())),
        }
    };
    let g = f.clone();
    Ok(SymbolFunction::new(format!("r_psi[{}]", a.name()), -a.order(), n, f, g))
}

/// First approximation `Phi_0 = sum_i w_i lambda_i^-1 Op(r^psi(., ., lambda_i))`
/// of `Phi(A)` for a sector contour, assembled as `Op` of the summed symbol.
pub fn parametrix_phi0<T: Real>(
    a: &SymbolFunction<T>,
    psi: &CutoffFunction,
    c: &ContourSpec,
    k_max: usize,
) -> Result<DiscretizedOperator<T>> {
    let rule = quad_nodes::<T>(c);
    let coeffs: Vec<(C<T>, C<T>)> =
        rule.nodes.iter().zip(&rule.weights).map(|(&l, &w)| (l, w / l)).collect();
    let n = a.fiber_dim();
    // Spot-check invertibility on the contour where the cutoff is active.
    let (thetas, xis) = check_grid(psi.rho);
    for &t in thetas.iter().step_by(4) {
        for &x in xis.iter().step_by(3) {
            let block = a.principal(T::lit(t), T::lit(x));
            for &(l, _) in &coeffs {
                if shifted_inverse(n, &block, l).is_none() {
                    return Err(Error::SymbolSingular { theta: t, xi: x });
                }
            }
        }
    }
    let (am, psi_c) = (a.clone(), *psi);
    let summed = move |t: T, x: T, out: &mut [C<T>]| {
        out.iter_mut().for_each(|o| *o = C::zero());
        let w = psi_c.eval(x.as_f64());
        if w == 0.0 {
            return;
        }
        let block = am.principal(t, x);
        for &(l, c) in &coeffs {
            match shifted_inverse(n, &block, l) {
                Some(inv) => out.iter_mut().zip(inv).for_each(|(o, v)| *o += c * v),
                None => {
                    out.iter_mut().for_each(|o| *o = C::new(T::nan(), T::nan()));
                    return;
                }
            }
        }
        out.iter_mut().for_each(|o| *o = *o * T::lit(w));
    };
    let p = summed.clone();
    let sym = SymbolFunction::new(format!("phi0[{}]", a.name()), -a.order(), n, summed, p);
    let mut op = op_from_symbol(&sym, k_max).map_err(|e| match e {
        Error::SymbolNonFinite { theta, xi } => Error::SymbolSingular { theta, xi },
        other => other,
    })?;
    op.order = -a.order();
    Ok(op)
}

/// Smallest integer `rho >= 1` such that `a_m(theta, xi) - lambda` is
/// invertible for every `|xi| >= rho` and every `lambda` on the contour,
/// found by grid search over the contour's quadrature nodes.
pub fn auto_rho<T: Real>(a: &SymbolFunction<T>, c: &ContourSpec, rho_max: usize) -> Result<usize> {
    let rule = quad_nodes::<f64>(c);
    let n = a.fiber_dim();
    'candidates: for rho in 1..=rho_max {
        let (thetas, xis) = check_grid(rho as f64);
        for &t in &thetas {
            for &x in &xis {
                let block: Vec<Complex64> = a
                    .principal(T::lit(t), T::lit(x))
                    .iter()
                    .map(|z| Complex64::new(z.re.as_f64(), z.im.as_f64()))
                    .collect();
                for &l in &rule.nodes {
                    if shifted_inverse(n, &block, l).is_none() {
                        continue 'candidates;
                    }
                }
                // Nodes are discrete; the spectrum must also stay off the
                // contour itself.
                if n == 1 && c.distance(block[0]) < 1e-9 * (1.0 + block[0].norm()) {
                    continue 'candidates;
                }
            }
        }
        return Ok(rho);
    }
    Err(Error::InvalidSymbol { reason: format!("no admissible cutoff radius rho <= {rho_max}") })
}
