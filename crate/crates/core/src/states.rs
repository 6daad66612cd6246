//! Density matrices, pure product-state parameterization and the named state
//! families (Bell, Werner, GHZ/W mixture, one-parameter two-qutrit family).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{FewError, Result};
use crate::qops::{pauli_x, pauli_z, tensor_all, CMatrix};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates `matrix` against the density-matrix invariants.
    pub fn new(matrix: CMatrix, dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        if !matrix.is_square() {
            return Err(FewError::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        let total: usize = dims.iter().product();
        if matrix.rows() != total {
            return Err(FewError::DimensionMismatch { expected: total, found: matrix.rows() });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(FewError::NotHermitian { deviation });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(FewError::TraceNotOne { trace: tr.re });
        }
        let min_eigenvalue = matrix.hermitian_eigenvalues()?[0];
        if min_eigenvalue < -PSD_TOL {
            return Err(FewError::NotPositive { min_eigenvalue });
        }
        Ok(DensityMatrix { matrix, dims: dims.to_vec() })
    }

    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        let n: usize = dims.iter().product();
        Ok(DensityMatrix { matrix: CMatrix::identity(n).scale(1.0 / n as f64), dims: dims.to_vec() })
    }

    /// `|psi><psi|` for a normalized ket.
    pub fn pure(ket: &[C64], dims: &[usize]) -> Result<Self> {
        Self::new(CMatrix::outer(ket), dims)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        crate::qops::trace_product_re(&self.matrix, &self.matrix).expect("square")
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix.hermitian_eigenvalues().expect("square")
    }

    /// `lambda * self + (1 - lambda) * other`
    pub fn mix(&self, lambda: f64, other: &DensityMatrix) -> Result<Self> {
        check_range("lambda", lambda, 0.0, 1.0)?;
        if self.dims != other.dims {
            return Err(FewError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let mut m = self.matrix.scale(lambda);
        m.add_scaled(1.0 - lambda, &other.matrix)?;
        Self::new(m, &self.dims)
    }

    /// Partial transpose on the subsystems flagged in `which`.
    pub fn partial_transpose(&self, which: &[bool]) -> Result<CMatrix> {
        partial_transpose(&self.matrix, &self.dims, which)
    }

    /// Minimum eigenvalue of the partial transpose on `which`.
    pub fn min_partial_transpose_eigenvalue(&self, which: &[bool]) -> Result<f64> {
        Ok(self.partial_transpose(which)?.hermitian_eigenvalues()?[0])
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(FewError::InvalidConfig("no subsystems".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(FewError::UnsupportedDimension(d));
    }
    Ok(())
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo..=hi).contains(&value) {
        return Err(FewError::OutOfRange { name, value, lo, hi });
    }
    Ok(())
}

/// Transposes the subsystems flagged in `which` of an operator on `dims`.
pub fn partial_transpose(m: &CMatrix, dims: &[usize], which: &[bool]) -> Result<CMatrix> {
    if which.len() != dims.len() {
        return Err(FewError::DimensionMismatch { expected: dims.len(), found: which.len() });
    }
    let n: usize = dims.iter().product();
    if m.rows() != n || m.cols() != n {
        return Err(FewError::DimensionMismatch { expected: n, found: m.rows() });
    }
    let digits = |mut idx: usize| {
        let mut out = vec![0usize; dims.len()];
        for s in (0..dims.len()).rev() {
            out[s] = idx % dims[s];
            idx /= dims[s];
        }
        out
    };
    let compose = |ds: &[usize]| ds.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x);
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        let rd = digits(r);
        for c in 0..n {
            let cd = digits(c);
            let mut nr = rd.clone();
            let mut nc = cd.clone();
            for s in 0..dims.len() {
                if which[s] {
                    nr[s] = cd[s];
                    nc[s] = rd[s];
                }
            }
            out[(compose(&nr), compose(&nc))] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Number of angles that parameterize a pure state of one subsystem.
pub fn angles_per_subsystem(d: usize) -> Result<usize> {
    match d {
        2 => Ok(2),
        3 => Ok(4),
        _ => Err(FewError::UnsupportedDimension(d)),
    }
}

pub fn param_count(dims: &[usize]) -> Result<usize> {
    dims.iter().map(|&d| angles_per_subsystem(d)).sum()
}

/// Angles for a pure product state, concatenated per subsystem.
///
/// Qubit: `(alpha, beta)` giving `cos(beta)|0> + e^{i alpha} sin(beta)|1>`.
/// Qutrit: `(eta, xi, theta, phi)` giving
/// `e^{i eta} sin(theta) sin(phi)|0> + e^{i xi} sin(theta) cos(phi)|1> + cos(theta)|2>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductStateParams {
    angles: Vec<f64>,
}

impl ProductStateParams {
    pub fn new(angles: Vec<f64>, dims: &[usize]) -> Result<Self> {
        let expected = param_count(dims)?;
        if angles.len() != expected {
            return Err(FewError::DimensionMismatch { expected, found: angles.len() });
        }
        Ok(ProductStateParams { angles })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Uniform draw over the angle rectangles (periodic angles on `[0, 2pi)`,
    /// amplitude angles on `[0, pi/2]`). Not Haar-uniform.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        let mut angles = Vec::with_capacity(param_count(dims)?);
        for &d in dims {
            match d {
                2 => {
                    angles.push(rng.gen::<f64>() * TAU);
                    angles.push(rng.gen::<f64>() * FRAC_PI_2);
                }
                3 => {
                    angles.push(rng.gen::<f64>() * TAU);
                    angles.push(rng.gen::<f64>() * TAU);
                    angles.push(rng.gen::<f64>() * FRAC_PI_2);
                    angles.push(rng.gen::<f64>() * FRAC_PI_2);
                }
                _ => return Err(FewError::UnsupportedDimension(d)),
            }
        }
        Ok(ProductStateParams { angles })
    }

    /// Maps every angle into its declared range without changing the state
    /// (up to a global phase).
    pub fn canonicalize(&mut self, dims: &[usize]) {
        let mut off = 0;
        for &d in dims {
            let a = &mut self.angles[off..off + if d == 2 { 2 } else { 4 }];
            if d == 2 {
                // beta has period pi up to a global sign; beta -> pi - beta is alpha -> alpha + pi
                let mut beta = rem(a[1], PI);
                if beta > FRAC_PI_2 {
                    beta = PI - beta;
                    a[0] += PI;
                }
                a[1] = beta;
                a[0] = rem(a[0], TAU);
                off += 2;
            } else {
                let mut theta = rem(a[2], PI);
                if theta > FRAC_PI_2 {
                    // flips the sign of the |2> amplitude only
                    theta = PI - theta;
                    a[0] += PI;
                    a[1] += PI;
                }
                // phi -> phi + pi negates the |0> and |1> amplitudes
                if libm::floor(a[3] / PI) as i64 % 2 != 0 {
                    a[0] += PI;
                    a[1] += PI;
                }
                let mut phi = rem(a[3], PI);
                if phi > FRAC_PI_2 {
                    phi = PI - phi;
                    a[1] += PI;
                }
                a[2] = theta;
                a[3] = phi;
                a[0] = rem(a[0], TAU);
                a[1] = rem(a[1], TAU);
                off += 4;
            }
        }
    }

    pub fn ket(&self, dims: &[usize]) -> Vec<C64> {
        let n: usize = dims.iter().product();
        let mut out = vec![C64::new(0.0, 0.0); n];
        product_ket_into(dims, &self.angles, &mut out);
        out
    }
}

fn rem(x: f64, period: f64) -> f64 {
    let r = x - period * libm::floor(x / period);
    if r >= period {
        0.0
    } else {
        r
    }
}

fn cis(t: f64) -> C64 {
    let (s, c) = libm::sincos(t);
    C64::new(c, s)
}

/// Writes the product ket for `angles` into `out` (length `prod dims`).
/// Dims must be 2 or 3; the caller validates.
pub fn product_ket_into(dims: &[usize], angles: &[f64], out: &mut [C64]) {
    let mut len = 1;
    out[0] = C64::new(1.0, 0.0);
    let mut off = 0;
    let mut local = [C64::new(0.0, 0.0); 3];
    for &d in dims {
        if d == 2 {
            let (sb, cb) = libm::sincos(angles[off + 1]);
            local[0] = C64::new(cb, 0.0);
            local[1] = cis(angles[off]) * sb;
            off += 2;
        } else {
            let (st, ct) = libm::sincos(angles[off + 2]);
            let (sp, cp) = libm::sincos(angles[off + 3]);
            local[0] = cis(angles[off]) * (st * sp);
            local[1] = cis(angles[off + 1]) * (st * cp);
            local[2] = C64::new(ct, 0.0);
            off += 4;
        }
        // expand in place from the back so unread entries are never clobbered
        for i in (0..len).rev() {
            let x = out[i];
            for j in (0..d).rev() {
                out[i * d + j] = x * local[j];
            }
        }
        len *= d;
    }
}

pub fn product_pure_state(params: &ProductStateParams, dims: &[usize]) -> Result<DensityMatrix> {
    let expected = param_count(dims)?;
    if params.angles.len() != expected {
        return Err(FewError::DimensionMismatch { expected, found: params.angles.len() });
    }
    DensityMatrix::pure(&params.ket(dims), dims)
}

fn basis_ket(n: usize, amplitudes: &[(usize, f64)]) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    for &(i, a) in amplitudes {
        v[i] = C64::new(a, 0.0);
    }
    v
}

fn apply(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

/// `(sz^i (x) sx^j) |psi_00>` with `|psi_00> = (|00> + |11>)/sqrt 2`.
pub fn bell_ket(i: bool, j: bool) -> Vec<C64> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let psi00 = basis_ket(4, &[(0, s), (3, s)]);
    let a = if i { pauli_z() } else { CMatrix::identity(2) };
    let b = if j { pauli_x() } else { CMatrix::identity(2) };
    apply(&tensor_all([&a, &b]), &psi00)
}

pub fn bell_state(i: bool, j: bool) -> DensityMatrix {
    DensityMatrix::pure(&bell_ket(i, j), &[2, 2]).expect("Bell state is valid")
}

/// `F psi_00 + (1-F)/3 (psi_10 + psi_01 + psi_11)`
pub fn werner(fidelity: f64) -> Result<DensityMatrix> {
    check_range("F", fidelity, 0.0, 1.0)?;
    let mut m = bell_state(false, false).into_matrix().scale(fidelity);
    let rest = (1.0 - fidelity) / 3.0;
    for (i, j) in [(true, false), (false, true), (true, true)] {
        m.add_scaled(rest, bell_state(i, j).matrix())?;
    }
    DensityMatrix::new(m, &[2, 2])
}

pub fn ghz_ket() -> Vec<C64> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    basis_ket(8, &[(0b000, s), (0b111, s)])
}

pub fn w_ket() -> Vec<C64> {
    let s = 1.0 / libm::sqrt(3.0);
    basis_ket(8, &[(0b100, s), (0b010, s), (0b001, s)])
}

/// `q |GHZ><GHZ| + (1-q) |W><W|` on three qubits.
pub fn ghz_w_mixture(q: f64) -> Result<DensityMatrix> {
    check_range("q", q, 0.0, 1.0)?;
    let mut m = CMatrix::outer(&ghz_ket()).scale(q);
    m.add_scaled(1.0 - q, &CMatrix::outer(&w_ket()))?;
    DensityMatrix::new(m, &[2, 2, 2])
}

/// `2/7 |phi+><phi+| + alpha/7 sigma_+ + (5-alpha)/7 sigma_-` on two qutrits.
pub fn two_qutrit_alpha(alpha: f64) -> Result<DensityMatrix> {
    check_range("alpha", alpha, 2.0, 5.0)?;
    let s = 1.0 / libm::sqrt(3.0);
    let phi_plus = basis_ket(9, &[(0, s), (4, s), (8, s)]);
    let mut m = CMatrix::outer(&phi_plus).scale(2.0 / 7.0);
    let idx = |a: usize, b: usize| 3 * a + b;
    // sigma_+ on |01>,|12>,|20>; sigma_- on |10>,|21>,|02>
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        m[(idx(a, b), idx(a, b))] += C64::new(alpha / 21.0, 0.0);
        m[(idx(b, a), idx(b, a))] += C64::new((5.0 - alpha) / 21.0, 0.0);
    }
    DensityMatrix::new(m, &[3, 3])
}

/// Default mixture size for [`random_separable`]: `(prod d_i)^2`.
pub fn default_component_count(dims: &[usize]) -> usize {
    let n: usize = dims.iter().product();
    n * n
}

/// Convex mixture of `k` random pure product states with flat-Dirichlet weights.
pub fn random_separable<R: Rng + ?Sized>(dims: &[usize], k: usize, rng: &mut R) -> Result<DensityMatrix> {
    if k == 0 {
        return Err(FewError::InvalidConfig("component count must be at least 1".into()));
    }
    let n: usize = dims.iter().product();
    let mut weights: Vec<f64> = (0..k)
        .map(|_| {
            let u: f64 = rng.gen();
            -libm::log(1.0 - u)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut m = CMatrix::zeros(n, n);
    for &w in &weights {
        let p = ProductStateParams::random(dims, rng)?;
        m.add_scaled(w, &CMatrix::outer(&p.ket(dims)))?;
    }
    // renormalize the trace against accumulated rounding
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / tr), dims)
}

/// `(U_1 (x) ... (x) U_n) rho (U_1 (x) ... (x) U_n)^dag`
pub fn apply_local_unitary(rho: &DensityMatrix, unitaries: &[CMatrix]) -> Result<DensityMatrix> {
    if unitaries.len() != rho.dims.len() {
        return Err(FewError::DimensionMismatch { expected: rho.dims.len(), found: unitaries.len() });
    }
    for (s, (u, &d)) in unitaries.iter().zip(&rho.dims).enumerate() {
        if u.rows() != d || u.cols() != d {
            return Err(FewError::DimensionMismatch { expected: d, found: u.rows() });
        }
        let deviation = u.adjoint().matmul(u)?.max_abs_diff(&CMatrix::identity(d));
        if deviation > UNITARY_TOL {
            return Err(FewError::NotUnitary { subsystem: s, deviation });
        }
    }
    let u = tensor_all(unitaries);
    let out = u.matmul(rho.matrix())?.matmul(&u.adjoint())?;
    // symmetrize away rounding so the Hermitian check stays tight
    let sym = out.add(&out.adjoint())?.scale(0.5);
    DensityMatrix::new(sym, &rho.dims)
}

/// Haar-random `d x d` unitary via Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let gauss = |rng: &mut R| {
        // Box-Muller
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(TAU * u2)
    };
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for _ in 0..d {
        let mut v: Vec<C64> = (0..d).map(|_| C64::new(gauss(rng), gauss(rng))).collect();
        for c in &cols {
            let proj: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= proj * y;
            }
        }
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        for x in &mut v {
            *x /= norm;
        }
        cols.push(v);
    }
    let mut u = CMatrix::zeros(d, d);
    for (j, c) in cols.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            u[(i, j)] = x;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::trace_product_re;
    use crate::seed;

    #[test]
    fn qubit_parameterization_examples() {
        let p = ProductStateParams::new(vec![1.3, 0.0], &[2]).unwrap();
        let rho = product_pure_state(&p, &[2]).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);

        let q = core::f64::consts::FRAC_PI_4;
        let p = ProductStateParams::new(vec![0.0, q, 0.0, q], &[2, 2]).unwrap();
        let rho = product_pure_state(&p, &[2, 2]).unwrap();
        for z in rho.matrix().as_slice() {
            assert!((z - C64::new(0.25, 0.0)).norm() < 1e-15);
        }
        assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn qutrit_theta_zero_is_level_two() {
        let p = ProductStateParams::new(vec![0.4, 1.1, 0.0, 0.7], &[3]).unwrap();
        let rho = product_pure_state(&p, &[3]).unwrap();
        assert!((rho.matrix()[(2, 2)].re - 1.0).abs() < 1e-15);
        assert!(product_pure_state(&p, &[4]).is_err());
        assert!(ProductStateParams::new(vec![0.0; 3], &[3]).is_err());
    }

    #[test]
    fn canonicalize_preserves_state() {
        let dims = [2, 3];
        let mut rng = seed::rng(5);
        for _ in 0..200 {
            let angles: Vec<f64> = (0..6).map(|_| (rng.gen::<f64>() - 0.5) * 30.0).collect();
            let mut p = ProductStateParams::new(angles, &dims).unwrap();
            let before = CMatrix::outer(&p.ket(&dims));
            p.canonicalize(&dims);
            let after = CMatrix::outer(&p.ket(&dims));
            assert!(before.max_abs_diff(&after) < 1e-12);
            let a = p.angles();
            assert!((0.0..TAU).contains(&a[0]) && (0.0..=FRAC_PI_2).contains(&a[1]));
            assert!((0.0..TAU).contains(&a[2]) && (0.0..TAU).contains(&a[3]));
            assert!((0.0..=FRAC_PI_2).contains(&a[4]) && (0.0..=FRAC_PI_2).contains(&a[5]));
        }
    }

    #[test]
    fn bell_states() {
        let b00 = bell_state(false, false);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((b00.matrix()[(i, j)].re - 0.5).abs() < 1e-15);
        }
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let k01 = bell_ket(false, true);
        let expected = [0.0, s, s, 0.0];
        for (z, e) in k01.iter().zip(expected) {
            assert!((z - C64::new(e, 0.0)).norm() < 1e-15);
        }
        let all: Vec<_> = [(false, false), (false, true), (true, false), (true, true)]
            .iter()
            .map(|&(i, j)| bell_state(i, j))
            .collect();
        for (a, ra) in all.iter().enumerate() {
            for (b, rb) in all.iter().enumerate() {
                let t = trace_product_re(ra.matrix(), rb.matrix()).unwrap();
                assert!((t - if a == b { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn werner_examples() {
        let w = werner(0.25).unwrap();
        assert!(w.matrix().max_abs_diff(&CMatrix::identity(4).scale(0.25)) < 1e-15);
        let w = werner(1.0).unwrap();
        assert!(w.matrix().max_abs_diff(bell_state(false, false).matrix()) < 1e-15);
        let w = werner(0.6).unwrap();
        let overlap = trace_product_re(bell_state(false, false).matrix(), w.matrix()).unwrap();
        assert!((overlap - 0.6).abs() < 1e-14);
        assert!(matches!(werner(1.2), Err(FewError::OutOfRange { name: "F", .. })));
        assert!(werner(-0.01).is_err());
    }

    #[test]
    fn werner_spectrum() {
        for f in [0.0, 0.25, 0.5, 1.0] {
            let ev = werner(f).unwrap().eigenvalues();
            let mut expected = vec![f, (1.0 - f) / 3.0, (1.0 - f) / 3.0, (1.0 - f) / 3.0];
            expected.sort_by(f64::total_cmp);
            for (a, b) in ev.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12, "F={f}: {ev:?}");
            }
        }
    }

    #[test]
    fn ghz_w_examples() {
        let g = ghz_w_mixture(1.0).unwrap();
        assert!((g.purity() - 1.0).abs() < 1e-12);
        assert!((g.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((g.matrix()[(7, 7)].re - 0.5).abs() < 1e-15);

        let w = ghz_w_mixture(0.0).unwrap();
        for i in [4, 2, 1] {
            for j in [4, 2, 1] {
                assert!((w.matrix()[(i, j)].re - 1.0 / 3.0).abs() < 1e-15);
            }
        }
        let ev = ghz_w_mixture(0.5).unwrap().eigenvalues();
        assert!((ev[7] - 0.5).abs() < 1e-12 && (ev[6] - 0.5).abs() < 1e-12);
        assert!(ev[..6].iter().all(|v| v.abs() < 1e-12));
        assert!(ghz_w_mixture(1.5).is_err());
    }

    #[test]
    fn qutrit_family_ppt_structure() {
        for a in [2.0, 2.5, 3.0, 4.0, 5.0] {
            let rho = two_qutrit_alpha(a).unwrap();
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
        }
        let npt = two_qutrit_alpha(5.0).unwrap().min_partial_transpose_eigenvalue(&[false, true]).unwrap();
        assert!(npt < -1e-3, "{npt}");
        let ppt = two_qutrit_alpha(2.5).unwrap().min_partial_transpose_eigenvalue(&[false, true]).unwrap();
        assert!(ppt > -1e-12, "{ppt}");
        assert!(two_qutrit_alpha(1.9).is_err());
        assert!(two_qutrit_alpha(5.1).is_err());
    }

    #[test]
    fn qutrit_swap_symmetry() {
        // swapping the two qutrits exchanges sigma_+ and sigma_-: alpha <-> 5 - alpha
        let swap = |m: &CMatrix| {
            let mut out = CMatrix::zeros(9, 9);
            let sw = |i: usize| 3 * (i % 3) + i / 3;
            for i in 0..9 {
                for j in 0..9 {
                    out[(sw(i), sw(j))] = m[(i, j)];
                }
            }
            out
        };
        for a in [2.0, 2.3, 2.5, 3.0] {
            let lhs = swap(two_qutrit_alpha(a).unwrap().matrix());
            let rhs = two_qutrit_alpha(5.0 - a).unwrap();
            assert!(lhs.max_abs_diff(rhs.matrix()) < 1e-15);
        }
    }

    #[test]
    fn random_separable_properties() {
        let mut rng = seed::rng(11);
        let rho = random_separable(&[2, 2], 1, &mut rng).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-10);
        for _ in 0..20 {
            let rho = random_separable(&[2, 2], 16, &mut rng).unwrap();
            assert!(rho.min_partial_transpose_eigenvalue(&[false, true]).unwrap() > -1e-12);
        }
        let a = random_separable(&[2, 3], 5, &mut seed::rng(3)).unwrap();
        let b = random_separable(&[2, 3], 5, &mut seed::rng(3)).unwrap();
        assert_eq!(a, b);
        assert!(random_separable(&[2, 2], 0, &mut rng).is_err());
        assert_eq!(default_component_count(&[2, 2]), 16);
    }

    #[test]
    fn local_unitaries() {
        let b = bell_state(false, false);
        let same = apply_local_unitary(&b, &[CMatrix::identity(2), CMatrix::identity(2)]).unwrap();
        assert!(same.matrix().max_abs_diff(b.matrix()) < 1e-15);

        let rotated = apply_local_unitary(&b, &[pauli_z(), pauli_x()]).unwrap();
        assert!(rotated.matrix().max_abs_diff(bell_state(true, true).matrix()) < 1e-15);

        let mut rng = seed::rng(2);
        let w = werner(0.8).unwrap();
        let us = [random_unitary(2, &mut rng), random_unitary(2, &mut rng)];
        let out = apply_local_unitary(&w, &us).unwrap();
        for (x, y) in out.eigenvalues().iter().zip(w.eigenvalues()) {
            assert!((x - y).abs() < 1e-10);
        }

        let not_unitary = CMatrix::identity(2).scale(2.0);
        assert!(matches!(
            apply_local_unitary(&b, &[CMatrix::identity(2), not_unitary]),
            Err(FewError::NotUnitary { subsystem: 1, .. })
        ));
        assert!(apply_local_unitary(&b, &[CMatrix::identity(2)]).is_err());
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let m = CMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(matches!(DensityMatrix::new(m, &[2]), Err(FewError::NotPositive { .. })));
        let m = CMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(matches!(DensityMatrix::new(m, &[2]), Err(FewError::NotHermitian { .. })));
        let m = CMatrix::identity(2);
        assert!(matches!(DensityMatrix::new(m, &[2]), Err(FewError::TraceNotOne { .. })));
        let m = CMatrix::identity(4).scale(0.25);
        assert!(DensityMatrix::new(m, &[2, 3]).is_err());
    }

    #[test]
    fn bloch_vectors_cover_all_octants() {
        let mut rng = seed::rng(99);
        let mut seen = [false; 8];
        for _ in 0..10_000 {
            let p = ProductStateParams::random(&[2, 2], &mut rng).unwrap();
            for s in 0..2 {
                let (alpha, beta) = (p.angles()[2 * s], p.angles()[2 * s + 1]);
                let (x, y, z) = (
                    libm::sin(2.0 * beta) * libm::cos(alpha),
                    libm::sin(2.0 * beta) * libm::sin(alpha),
                    libm::cos(2.0 * beta),
                );
                let oct = (x > 0.0) as usize | ((y > 0.0) as usize) << 1 | ((z > 0.0) as usize) << 2;
                seen[oct] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
}
