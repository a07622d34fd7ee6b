//! Hermitian linear-algebra kernel.
//!
//! Everything here works on dense `d x d` complex matrices with `d` small
//! (at most a few dozen). Operators are vectorized column-major, which is
//! also nalgebra's storage order, so `vec(A)` is a plain copy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type Operator = DMatrix<Complex64>;

/// Relative Hermiticity tolerance accepted on input matrices before symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Trace tolerance accepted when constructing a [`QuantumState`].
pub const TRACE_TOL: f64 = 1e-10;
/// Two eigenvalues are treated as equal in the logarithmic mean below this log gap.
pub const LOGMEAN_EQUAL_TOL: f64 = 1e-9;
/// Smallest logarithmic mean for which `K_rho^{-1}` is still applied.
pub const KRHO_INV_FLOOR: f64 = 1e-15;

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(d: usize) -> Operator {
    Operator::identity(d, d)
}

pub fn diag(values: &[f64]) -> Operator {
    let d = values.len();
    Operator::from_fn(d, d, |i, j| if i == j { cr(values[i]) } else { cr(0.0) })
}

/// Builds a complex matrix from row-major real entries.
pub fn real_matrix(d: usize, rows: &[f64]) -> Operator {
    assert_eq!(rows.len(), d * d, "real_matrix expects d*d entries");
    Operator::from_fn(d, d, |i, j| cr(rows[i * d + j]))
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

pub fn anticommutator(a: &Operator, b: &Operator) -> Operator {
    a * b + b * a
}

pub fn trace(a: &Operator) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Largest entry modulus.
pub fn max_abs(a: &Operator) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn hermitian_part(a: &Operator) -> Operator {
    (a + a.adjoint()) * cr(0.5)
}

pub fn hermiticity_residual(a: &Operator) -> f64 {
    max_abs(&(a - a.adjoint()))
}

/// `tr(A^dagger B)`.
pub fn hs_inner(a: &Operator, b: &Operator) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn kron(a: &Operator, b: &Operator) -> Operator {
    a.kronecker(b)
}

fn check_square(a: &Operator) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::Input(format!(
            "expected a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

fn check_hermitian(a: &Operator) -> Result<()> {
    check_square(a)?;
    let res = hermiticity_residual(a);
    if res > HERMITIAN_TOL * max_abs(a).max(1.0) {
        return Err(Error::Input(format!(
            "matrix is not Hermitian (residual {res:e})"
        )));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Columns are orthonormal eigenvectors.
    pub basis: Operator,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U^dagger A U`.
    pub fn to_eigenbasis(&self, a: &Operator) -> Operator {
        self.basis.adjoint() * a * &self.basis
    }

    /// `U A U^dagger`.
    pub fn from_eigenbasis(&self, a: &Operator) -> Operator {
        &self.basis * a * self.basis.adjoint()
    }

    /// `U f(Lambda) U^dagger`, Hermitian by construction.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Operator {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        hermitian_part(&self.from_eigenbasis(&diag(&vals)))
    }

    pub fn reconstruct(&self) -> Operator {
        self.map(|x| x)
    }
}

pub fn herm_eig(a: &Operator) -> Result<EigenSystem> {
    check_hermitian(a)?;
    let sym = hermitian_part(a);
    let eig = sym.symmetric_eigen();
    let d = a.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let basis = Operator::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenSystem { eigenvalues, basis })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixFunction {
    Log,
    Power(f64),
    Exp,
}

pub fn matrix_function(a: &Operator, f: MatrixFunction) -> Result<Operator> {
    let eig = herm_eig(a)?;
    let needs_positive = match f {
        MatrixFunction::Log => true,
        MatrixFunction::Power(l) => l.fract() != 0.0,
        MatrixFunction::Exp => false,
    };
    if needs_positive {
        let lo = eig.eigenvalues[0];
        if lo <= 0.0 {
            return Err(Error::Domain { eigenvalue: lo });
        }
    }
    Ok(match f {
        MatrixFunction::Log => eig.map(f64::ln),
        MatrixFunction::Power(l) if l.fract() == 0.0 && l.abs() < i32::MAX as f64 => {
            eig.map(|x| x.powi(l as i32))
        }
        MatrixFunction::Power(l) => eig.map(|x| x.powf(l)),
        MatrixFunction::Exp => eig.map(f64::exp),
    })
}

/// A strictly positive, unit-trace density matrix together with its
/// eigendecomposition. Immutable: any new matrix is a new state.
#[derive(Clone, Debug)]
pub struct QuantumState {
    rho: Operator,
    eig: EigenSystem,
}

impl QuantumState {
    pub fn new(rho: Operator) -> Result<Self> {
        check_hermitian(&rho)?;
        let tr = trace(&rho);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Input(format!("state trace is {tr}, expected 1")));
        }
        Self::from_hermitian(hermitian_part(&rho))
    }

    /// Hermitizes and divides by the trace before validating positivity.
    pub fn normalized(m: &Operator) -> Result<Self> {
        check_square(m)?;
        let h = hermitian_part(m);
        let tr = trace(&h).re;
        if tr <= 0.0 {
            return Err(Error::Input(format!("cannot normalize: trace {tr}")));
        }
        Self::from_hermitian(h / cr(tr))
    }

    fn from_hermitian(rho: Operator) -> Result<Self> {
        let eig = herm_eig(&rho)?;
        if eig.eigenvalues[0] <= 0.0 {
            return Err(Error::Domain {
                eigenvalue: eig.eigenvalues[0],
            });
        }
        Ok(Self { rho, eig })
    }

    pub(crate) fn from_eigensystem(eig: EigenSystem) -> Result<Self> {
        if eig.eigenvalues[0] <= 0.0 {
            return Err(Error::Domain {
                eigenvalue: eig.eigenvalues[0],
            });
        }
        let rho = eig.reconstruct();
        Ok(Self { rho, eig })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::diagonal(&vec![1.0 / d as f64; d]).expect("uniform populations are valid")
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(diag(populations))
    }

    pub fn rho(&self) -> &Operator {
        &self.rho
    }

    pub fn into_operator(self) -> Operator {
        self.rho
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eig
    }

    /// Eigenvalues of the state, ascending.
    pub fn populations(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig.eigenvalues[0]
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn power(&self, lambda: f64) -> Operator {
        self.eig.map(|p| p.powf(lambda))
    }

    pub fn log(&self) -> Operator {
        self.eig.map(f64::ln)
    }

    /// `-tr(rho ln rho)`.
    pub fn entropy(&self) -> f64 {
        -self.eig.eigenvalues.iter().map(|&p| p * p.ln()).sum::<f64>()
    }
}

pub fn trace_distance(a: &Operator, b: &Operator) -> f64 {
    let diff = hermitian_part(&(a - b));
    let eig = herm_eig(&diff).expect("difference of Hermitian matrices");
    0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

/// `exp(-beta H) / Z`, computed after shifting `H` by its lowest eigenvalue.
pub fn gibbs_state(h: &Operator, beta: f64) -> Result<QuantumState> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Input(format!("inverse temperature must be positive, got {beta}")));
    }
    let eig = herm_eig(h)?;
    let e0 = eig.eigenvalues[0];
    let weights: Vec<f64> = eig.eigenvalues.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    // Ascending energies give descending populations; reverse into ascending order.
    let d = weights.len();
    let eigenvalues: Vec<f64> = weights.iter().rev().map(|w| w / z).collect();
    let basis = Operator::from_fn(d, d, |r, c| eig.basis[(r, d - 1 - c)]);
    QuantumState::from_eigensystem(EigenSystem { eigenvalues, basis })
}

/// Logarithmic mean `(p - q) / (ln p - ln q)`, continuous at `p = q`.
pub fn log_mean(p: f64, q: f64) -> f64 {
    let gap = p.ln() - q.ln();
    if gap.abs() < LOGMEAN_EQUAL_TOL {
        if p == q {
            p
        } else {
            0.5 * (p + q)
        }
    } else {
        (p - q) / gap
    }
}

/// `K_rho A = int_0^1 rho^lambda A rho^(1-lambda) dlambda`, via logarithmic means in the eigenbasis of `rho`.
pub fn krho_apply(rho: &QuantumState, a: &Operator) -> Operator {
    let eig = rho.eigen();
    let p = &eig.eigenvalues;
    let mut t = eig.to_eigenbasis(a);
    for n in 0..t.ncols() {
        for m in 0..t.nrows() {
            t[(m, n)] *= log_mean(p[m], p[n]);
        }
    }
    eig.from_eigenbasis(&t)
}

pub fn krho_inv_apply(rho: &QuantumState, a: &Operator) -> Result<Operator> {
    let eig = rho.eigen();
    let p = &eig.eigenvalues;
    let smallest = p[0];
    if smallest < KRHO_INV_FLOOR {
        return Err(Error::Conditioning { smallest });
    }
    let mut t = eig.to_eigenbasis(a);
    for n in 0..t.ncols() {
        for m in 0..t.nrows() {
            t[(m, n)] /= log_mean(p[m], p[n]);
        }
    }
    Ok(eig.from_eigenbasis(&t))
}

pub fn vectorize(a: &Operator) -> DVector<Complex64> {
    DVector::from_column_slice(a.as_slice())
}

pub fn unvectorize(v: &DVector<Complex64>, dim: usize) -> Operator {
    Operator::from_column_slice(dim, dim, v.as_slice())
}

/// Matrix unit `|i><j|` for column-major index `k = i + j d`.
pub fn matrix_unit(k: usize, dim: usize) -> Operator {
    let mut e = Operator::zeros(dim, dim);
    e[(k % dim, k / dim)] = cr(1.0);
    e
}

/// Orthonormal (Hilbert-Schmidt) basis of the real space of `d x d` Hermitian matrices.
pub fn hermitian_basis(dim: usize) -> Vec<Operator> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        let mut e = Operator::zeros(dim, dim);
        e[(i, i)] = cr(1.0);
        out.push(e);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut x = Operator::zeros(dim, dim);
            x[(i, j)] = cr(s);
            x[(j, i)] = cr(s);
            out.push(x);
            let mut y = Operator::zeros(dim, dim);
            y[(i, j)] = Complex64::new(0.0, s);
            y[(j, i)] = Complex64::new(0.0, -s);
            out.push(y);
        }
    }
    out
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn hermitian_coords(a: &Operator) -> DVector<f64> {
    let basis = hermitian_basis(a.nrows());
    DVector::from_iterator(basis.len(), basis.iter().map(|e| hs_inner(e, a).re))
}

pub fn from_hermitian_coords(x: &DVector<f64>, dim: usize) -> Operator {
    hermitian_basis(dim)
        .iter()
        .zip(x.iter())
        .fold(Operator::zeros(dim, dim), |acc, (e, &c)| acc + e * cr(c))
}

/// Linear map on `d x d` operators as a `d^2 x d^2` matrix on column-vectorized operators.
#[derive(Clone, Debug)]
pub struct Superoperator {
    matrix: DMatrix<Complex64>,
    dim: usize,
}

impl Superoperator {
    pub fn new(matrix: DMatrix<Complex64>, dim: usize) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::Input(format!(
                "superoperator for d = {dim} must be {0}x{0}",
                dim * dim
            )));
        }
        Ok(Self { matrix, dim })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim * dim, dim * dim),
            dim,
        }
    }

    /// Materializes `map` column by column, skipping the linearity spot-check.
    pub fn from_map_unchecked<F>(map: F, dim: usize) -> Self
    where
        F: Fn(&Operator) -> Operator + Sync,
    {
        let n = dim * dim;
        let columns: Vec<DVector<Complex64>> = (0..n)
            .into_par_iter()
            .map(|k| vectorize(&map(&matrix_unit(k, dim))))
            .collect();
        Self {
            matrix: DMatrix::from_columns(&columns),
            dim,
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, a: &Operator) -> Operator {
        unvectorize(&(&self.matrix * vectorize(a)), self.dim)
    }

    /// Hilbert-Schmidt dual: `tr(A^dagger L(B)) = tr(L*(A)^dagger B)`.
    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            dim: self.dim,
        }
    }

    /// `self o other`.
    pub fn compose(&self, other: &Superoperator) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
            dim: self.dim,
        }
    }

    pub fn add(&self, other: &Superoperator) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
            dim: self.dim,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * cr(s),
            dim: self.dim,
        }
    }

    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// Real matrix of the map in [`hermitian_basis`]; exact when the map preserves Hermiticity.
    pub fn real_representation(&self) -> DMatrix<f64> {
        let basis = hermitian_basis(self.dim);
        let images: Vec<Operator> = basis.iter().map(|e| self.apply(e)).collect();
        let n = basis.len();
        DMatrix::from_fn(n, n, |a, b| hs_inner(&basis[a], &images[b]).re)
    }
}

/// Materializes a linear operator map and spot-checks linearity on three random pairs.
pub fn superop_from_map<F>(map: F, dim: usize) -> Result<Superoperator>
where
    F: Fn(&Operator) -> Operator + Sync,
{
    let sup = Superoperator::from_map_unchecked(&map, dim);
    let mut rng = ChaCha8Rng::seed_from_u64(0x11ea_5eed);
    for _ in 0..3 {
        let a = crate::random::complex_matrix(dim, &mut rng);
        let b = crate::random::complex_matrix(dim, &mut rng);
        let (x, y) = (Complex64::new(0.7, -0.3), Complex64::new(-1.1, 0.4));
        let lhs = map(&(&a * x + &b * y));
        let rhs = map(&a) * x + map(&b) * y;
        let scale = max_abs(&lhs).max(max_abs(&rhs)).max(1.0);
        let residual = max_abs(&(&lhs - &rhs)) / scale;
        if residual > 1e-10 {
            return Err(Error::Nonlinear { residual });
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sigma_x() -> Operator {
        real_matrix(2, &[0.0, 1.0, 1.0, 0.0])
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let e = herm_eig(&sigma_x()).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_input_has_identity_basis() {
        let e = herm_eig(&diag(&[0.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0, 1.0]);
        assert!((e.basis.map(|z| z.norm()) - identity(2).map(|z| z.norm())).amax() < 1e-14);
    }

    #[test]
    fn herm_eig_rejects_non_hermitian_and_non_square() {
        let a = real_matrix(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(herm_eig(&a), Err(Error::Input(_))));
        let b = Operator::zeros(2, 3);
        assert!(matches!(herm_eig(&b), Err(Error::Input(_))));
    }

    #[test]
    fn diagonal_powers_and_log() {
        let r = matrix_function(&diag(&[0.25, 0.75]), MatrixFunction::Power(0.5)).unwrap();
        assert_abs_diff_eq!(r[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r[(1, 1)].re, 0.75f64.sqrt(), epsilon = 1e-15);
        let l = matrix_function(&identity(3), MatrixFunction::Log).unwrap();
        assert!(max_abs(&l) < 1e-15);
    }

    #[test]
    fn log_of_singular_matrix_reports_eigenvalue() {
        match matrix_function(&diag(&[0.0, 1.0]), MatrixFunction::Log) {
            Err(Error::Domain { eigenvalue }) => assert_eq!(eigenvalue, 0.0),
            other => panic!("expected domain error, got {other:?}"),
        }
        // integer powers are fine on singular input
        assert!(matrix_function(&diag(&[0.0, 1.0]), MatrixFunction::Power(2.0)).is_ok());
    }

    #[test]
    fn gibbs_examples() {
        let g = gibbs_state(&diag(&[0.0, 1.0]), 2f64.ln()).unwrap();
        assert_abs_diff_eq!(g.rho()[(0, 0)].re, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.rho()[(1, 1)].re, 1.0 / 3.0, epsilon = 1e-15);

        let g = gibbs_state(&Operator::zeros(4, 4), 3.0).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(g.rho()[(i, i)].re, 0.25, epsilon = 1e-15);
        }

        let g = gibbs_state(&diag(&[0.0, 1.0, 2.0]), 1.0).unwrap();
        let z = 1.0 + (-1f64).exp() + (-2f64).exp();
        for (i, e) in [0.0f64, 1.0, 2.0].iter().enumerate() {
            assert_abs_diff_eq!(g.rho()[(i, i)].re, (-e).exp() / z, epsilon = 1e-15);
        }
    }

    #[test]
    fn gibbs_survives_large_energies() {
        let g = gibbs_state(&diag(&[1000.0, 1001.0]), 1.0).unwrap();
        let z = 1.0 + (-1f64).exp();
        assert_abs_diff_eq!(g.rho()[(0, 0)].re, 1.0 / z, epsilon = 1e-14);
        assert!(gibbs_state(&diag(&[0.0, 1.0]), -1.0).is_err());
    }

    #[test]
    fn krho_examples() {
        let rho = QuantumState::diagonal(&[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        let k1 = krho_apply(&rho, &identity(2));
        assert!(max_abs(&(k1 - rho.rho())) < 1e-15);

        let a = real_matrix(2, &[0.0, 1.0, 0.0, 0.0]);
        let ka = krho_apply(&rho, &a);
        assert_abs_diff_eq!(ka[(0, 1)].re, (1.0 / 3.0) / 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(ka[(0, 1)].re, 0.480898346962988, epsilon = 1e-12);

        let d = diag(&[3.0, -2.0]);
        let kd = krho_apply(&rho, &d);
        assert_abs_diff_eq!(kd[(0, 0)].re, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(kd[(1, 1)].re, -2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn krho_inverse_examples() {
        let rho = crate::random::state(3, &mut ChaCha8Rng::seed_from_u64(3));
        let inv = krho_inv_apply(&rho, rho.rho()).unwrap();
        assert!(max_abs(&(inv - identity(3))) < 1e-12);

        let mixed = QuantumState::maximally_mixed(2);
        let a = real_matrix(2, &[1.0, 2.0, 3.0, 4.0]);
        let r = krho_inv_apply(&mixed, &a).unwrap();
        assert!(max_abs(&(r - a * cr(2.0))) < 1e-14);
    }

    #[test]
    fn krho_inverse_refuses_near_singular_state() {
        let rho = QuantumState::diagonal(&[1e-17, 1.0 - 1e-17]).unwrap();
        assert!(matches!(
            krho_inv_apply(&rho, &identity(2)),
            Err(Error::Conditioning { .. })
        ));
    }

    #[test]
    fn log_mean_branches() {
        assert_eq!(log_mean(0.3, 0.3), 0.3);
        let near = log_mean(0.3, 0.3 * (1.0 + 1e-12));
        assert_abs_diff_eq!(near, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(log_mean(2.0 / 3.0, 1.0 / 3.0), (1.0 / 3.0) / 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn superop_identity_and_commutator() {
        let id = superop_from_map(|a| a.clone(), 2).unwrap();
        assert!(max_abs(&(id.matrix() - DMatrix::<Complex64>::identity(4, 4))) < 1e-15);

        let h = diag(&[0.0, 1.0]);
        let ad = superop_from_map(|a| commutator(&h, a), 2).unwrap();
        let expected = [0.0, 1.0, -1.0, 0.0];
        for k in 0..4 {
            for l in 0..4 {
                let want = if k == l { expected[k] } else { 0.0 };
                assert_abs_diff_eq!(ad.matrix()[(k, l)].re, want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn superop_rejects_nonlinear_map() {
        let r = superop_from_map(|a| a * a, 2);
        assert!(matches!(r, Err(Error::Nonlinear { .. })));
    }

    #[test]
    fn superop_adjoint_is_hilbert_schmidt_dual() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = crate::random::complex_matrix(3, &mut rng);
        let y = crate::random::complex_matrix(3, &mut rng);
        let sup = superop_from_map(|a| &x * a * &y, 3).unwrap();
        let a = crate::random::complex_matrix(3, &mut rng);
        let b = crate::random::complex_matrix(3, &mut rng);
        let lhs = hs_inner(&a, &sup.apply(&b));
        let rhs = hs_inner(&sup.adjoint().apply(&a), &b);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn hermitian_basis_is_orthonormal_and_coords_roundtrip() {
        let basis = hermitian_basis(3);
        assert_eq!(basis.len(), 9);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(hs_inner(a, b).re, want, epsilon = 1e-15);
            }
        }
        let h = crate::random::hermitian(3, &mut ChaCha8Rng::seed_from_u64(1));
        let back = from_hermitian_coords(&hermitian_coords(&h), 3);
        assert!(max_abs(&(back - h)) < 1e-14);
    }

    #[test]
    fn state_validation() {
        assert!(QuantumState::diagonal(&[0.5, 0.6]).is_err());
        assert!(QuantumState::diagonal(&[1.0, 0.0]).is_err());
        let s = QuantumState::normalized(&diag(&[2.0, 2.0])).unwrap();
        assert_abs_diff_eq!(s.entropy(), 2f64.ln(), epsilon = 1e-15);
    }
}
