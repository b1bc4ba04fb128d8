//! Small dense complex matrices: products, Kronecker products and Hermitian
//! diagonalization by cyclic Jacobi rotations. Sized for the 4×4 and 8×8
//! operators that appear here, not for performance.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Row-major construction.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self {
            n,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let n = self.n * other.n;
        let mut out = Self::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.n {
                    for l in 0..other.n {
                        out[(i * other.n + k, j * other.n + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// Largest singular value, by power iteration on `A†A`.
    pub fn operator_norm(&self) -> f64 {
        let gram = &self.adjoint() * self;
        let (values, _) = gram.hermitian_eigen();
        values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Eigenvalues ascending and the matching orthonormal eigenvectors as columns.
    /// Only the Hermitian part of `self` is used.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, CMatrix) {
        let n = self.n;
        let mut a = self.clone();
        let mut v = Self::identity(n);
        let scale = a
            .data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
            .max(f64::MIN_POSITIVE);
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum();
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vecs = Self::zeros(n);
        for (new, &old) in order.iter().enumerate() {
            for r in 0..n {
                vecs[(r, new)] = v[(r, old)];
            }
        }
        (values, vecs)
    }

    /// `exp(-i θ H)` for Hermitian `H`.
    pub fn exp_i_hermitian(&self, theta: f64) -> Self {
        let (values, vecs) = self.hermitian_eigen();
        let phases: Vec<Complex64> = values
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -theta * e))
            .collect();
        &(&vecs * &Self::from_diagonal(&phases)) * &vecs.adjoint()
    }

    /// Eigen-decomposition of a unitary matrix: eigenphases in `(-π, π]` and
    /// eigenvectors as columns. Works through the Hermitian pencil
    /// `Re U + λ Im U`, which shares the eigenvectors of a normal `U`.
    pub fn unitary_eigen(&self) -> Option<(Vec<f64>, CMatrix)> {
        let adj = self.adjoint();
        let re = (self + &adj).scale(Complex64::new(0.5, 0.0));
        let im = (self - &adj).scale(Complex64::new(0.0, -0.5));
        for lambda in [
            0.618_033_988_749_895,
            1.324_717_957_244_746,
            -0.412_454_033_640_107,
            2.236_067_977_499_79,
        ] {
            let pencil = &re + &im.scale(Complex64::new(lambda, 0.0));
            let (_, vecs) = pencil.hermitian_eigen();
            let mut phases = Vec::with_capacity(self.n);
            let mut ok = true;
            for j in 0..self.n {
                let col = vecs.column(j);
                let image = self.mul_vec(&col);
                let mu: Complex64 = col.iter().zip(&image).map(|(c, u)| c.conj() * u).sum();
                let resid: f64 = image
                    .iter()
                    .zip(&col)
                    .map(|(u, c)| (u - mu * c).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if resid > 1e-10 {
                    ok = false;
                    break;
                }
                phases.push(mu.arg());
            }
            if ok {
                return Some((phases, vecs));
            }
        }
        None
    }
}

/// One complex Jacobi rotation zeroing `a[p][q]`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r < 1e-300 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let t = if tau == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G acts on columns p, q: [c, s·e^{iθ}; -s·e^{-iθ}, c] in the (p, q) block
    let gpp = Complex64::new(c, 0.0);
    let gqq = Complex64::new(c, 0.0);
    let gpq = phase * s;
    let gqp = -phase.conj() * s;
    let n = a.n;
    // A <- A G
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * gpp + aiq * gqp;
        a[(i, q)] = aip * gpq + aiq * gqq;
    }
    // A <- G† A
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = gpp.conj() * apj + gqp.conj() * aqj;
        a[(q, j)] = gpq.conj() * apj + gqq.conj() * aqj;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * gpp + viq * gqp;
        v[(i, q)] = vip * gpq + viq * gqq;
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Single-qubit Pauli matrices, `I`, `X`, `Y`, `Z` by letter.
pub fn pauli_matrix(letter: char) -> CMatrix {
    let (o, l, i) = (ZERO, ONE, Complex64::i());
    match letter {
        'I' => CMatrix::identity(2),
        'X' => CMatrix::from_rows(&[&[o, l], &[l, o]]),
        'Y' => CMatrix::from_rows(&[&[o, -i], &[i, o]]),
        'Z' => CMatrix::from_rows(&[&[l, o], &[o, -l]]),
        other => panic!("not a Pauli letter: {other}"),
    }
}

/// Tensor product of Pauli letters, leftmost letter most significant.
pub fn pauli_word(word: &str) -> CMatrix {
    word.chars()
        .map(pauli_matrix)
        .reduce(|acc, m| acc.kron(&m))
        .expect("empty Pauli word")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        // small LCG, enough for a deterministic fixture
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(next(), 0.0);
            for j in i + 1..n {
                let z = c(next(), next());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        for seed in 0..10 {
            let h = random_hermitian(6, seed);
            let (vals, vecs) = h.hermitian_eigen();
            let diag: Vec<Complex64> = vals.iter().map(|&v| c(v, 0.0)).collect();
            let back = &(&vecs * &CMatrix::from_diagonal(&diag)) * &vecs.adjoint();
            assert!(back.max_abs_diff(&h) < 1e-13);
            assert!((&vecs.adjoint() * &vecs).max_abs_diff(&CMatrix::identity(6)) < 1e-13);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn pauli_algebra() {
        let xy = &pauli_matrix('X') * &pauli_matrix('Y');
        assert!(xy.max_abs_diff(&pauli_matrix('Z').scale(Complex64::i())) < 1e-16);
        let zi = pauli_word("ZI");
        assert_eq!(zi[(0, 0)], ONE);
        assert_eq!(zi[(2, 2)], -ONE);
        assert_eq!(zi[(1, 1)], ONE);
    }

    #[test]
    fn exponential_of_pauli() {
        let theta = 0.37;
        let u = pauli_word("XY").exp_i_hermitian(theta);
        let expected = &CMatrix::identity(4).scale(c(theta.cos(), 0.0))
            - &pauli_word("XY").scale(c(0.0, theta.sin()));
        assert!(u.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn unitary_eigenphases() {
        let h = random_hermitian(4, 42);
        let u = h.exp_i_hermitian(0.8);
        let (phases, vecs) = u.unitary_eigen().unwrap();
        let (vals, _) = h.hermitian_eigen();
        let mut expected: Vec<f64> = vals.iter().map(|e| -0.8 * e).collect();
        let mut got = phases.clone();
        expected.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((&vecs.adjoint() * &vecs).max_abs_diff(&CMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn operator_norm_of_pauli_is_one() {
        assert!((pauli_word("XZ").operator_norm() - 1.0).abs() < 1e-14);
    }
}
