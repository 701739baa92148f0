//! Floating-point kernels: numeric rank, dense eigenvalues, the matrix
//! exponential, and complex rank/null-space helpers.
//!
//! Exact rational arithmetic makes every binding controllability decision;
//! the routines here serve eigenvalue tests, Gramians, and cross-checks.
//! Complex rank and null spaces go through the real representation
//! `[[Re, -Im], [Im, Re]]`, whose real rank is exactly twice the complex
//! rank, so a single real SVD backs all of them.

use nalgebra::{Complex, DMatrix, DVector};
use num_traits::ToPrimitive;

use crate::exact::RatMatrix;
use crate::{Error, Result};

/// Dense row-major matrix of 64-bit floats; construction rejects NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FloatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|x| x.is_nan()) {
            return Err(Error::InvalidArgument("NaN entry".into()));
        }
        Ok(FloatMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        FloatMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .map(|x| x.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub(crate) fn to_na(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_na(m: &DMatrix<f64>) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)]);
            }
        }
        FloatMatrix {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl RatMatrix {
    /// Nearest-float cast, the numeric twin used for eigen and Gramian work.
    pub fn to_float(&self) -> FloatMatrix {
        let mut data = Vec::with_capacity(self.nrows() * self.ncols());
        for i in 0..self.nrows() {
            for x in self.row(i) {
                data.push(x.to_f64().expect("finite rational"));
            }
        }
        FloatMatrix {
            rows: self.nrows(),
            cols: self.ncols(),
            data,
        }
    }
}

/// Default relative rank tolerance: `max(rows, cols) * machine epsilon`,
/// applied as a fraction of the largest singular value.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

const ITER_EPS: f64 = f64::EPSILON;
const RETRIES: u64 = 4;

fn iter_cap(n: usize) -> usize {
    3000 + 200 * n
}

/// Deterministic random orthogonal matrix (QR of a seeded Gaussian-ish
/// matrix). The iterative QR kernels can cycle on inputs whose eigen or
/// singular structure is too symmetric; conjugating by a random orthogonal
/// matrix preserves the spectrum and singular values while breaking the
/// symmetry, so failed factorizations are retried under such a change of
/// basis.
fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

fn svd_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let cap = iter_cap(m.nrows().max(m.ncols()));
    if let Some(svd) = nalgebra::linalg::SVD::try_new(m.clone(), false, false, ITER_EPS, cap) {
        return Ok(svd.singular_values.iter().copied().collect());
    }
    for attempt in 0..RETRIES {
        let ql = random_orthogonal(m.nrows(), 2 * attempt + 1);
        let qr = random_orthogonal(m.ncols(), 2 * attempt + 2);
        let mixed = ql.transpose() * m * qr;
        if let Some(svd) = nalgebra::linalg::SVD::try_new(mixed, false, false, ITER_EPS, cap) {
            return Ok(svd.singular_values.iter().copied().collect());
        }
    }
    Err(Error::NonConvergence("SVD".into()))
}

/// Numeric rank: the number of singular values above `tol * sigma_max`.
/// A zero matrix has rank 0. `tol` must be positive; see
/// [`default_rank_tol`] for the standard choice.
pub fn float_rank(m: &FloatMatrix, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("rank tolerance must be > 0".into()));
    }
    if m.rows == 0 || m.cols == 0 {
        return Ok(0);
    }
    let sv = svd_values(&m.to_na())?;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * smax).count())
}

/// Eigenvalues (with multiplicity) of a square real matrix, in no
/// particular order. Directed-graph system matrices are not symmetric, so
/// the result is complex in general.
pub fn eigenvalues(m: &FloatMatrix) -> Result<Vec<Complex<f64>>> {
    if m.rows != m.cols {
        return Err(Error::Dimension(format!(
            "eigenvalues of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    if m.rows == 0 {
        return Ok(Vec::new());
    }
    let a = m.to_na();
    let cap = iter_cap(m.rows);
    if let Some(schur) = nalgebra::linalg::Schur::try_new(a.clone(), ITER_EPS, cap) {
        return Ok(schur.complex_eigenvalues().iter().copied().collect());
    }
    for attempt in 0..RETRIES {
        let q = random_orthogonal(m.rows, 101 + attempt);
        let conjugated = q.transpose() * &a * &q;
        if let Some(schur) = nalgebra::linalg::Schur::try_new(conjugated, ITER_EPS, cap) {
            return Ok(schur.complex_eigenvalues().iter().copied().collect());
        }
    }
    Err(Error::NonConvergence("Schur".into()))
}

// Pade approximant orders and their scaling thresholds (1-norm).
const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120., 60., 12., 1.];
const B5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const B7: [f64; 8] = [17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.];
const B9: [f64; 10] = [
    17643225600.,
    8821612800.,
    2075673600.,
    302702400.,
    30270240.,
    2162160.,
    110880.,
    3960.,
    90.,
    1.,
];
const B13: [f64; 14] = [
    64764752532480000.,
    32382376266240000.,
    7771770303897600.,
    1187353796428800.,
    129060195264000.,
    10559470521600.,
    670442572800.,
    33522128640.,
    1323241920.,
    40840800.,
    960960.,
    16380.,
    182.,
    1.,
];

fn one_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade_uv(a: &DMatrix<f64>, b: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let a2 = a * a;
    let mut even = DMatrix::<f64>::identity(n, n) * b[0];
    let mut odd = DMatrix::<f64>::identity(n, n) * b[1];
    let mut power = DMatrix::<f64>::identity(n, n);
    for k in (2..b.len()).step_by(2) {
        power = &power * &a2;
        even += &power * b[k];
        if k + 1 < b.len() {
            odd += &power * b[k + 1];
        }
    }
    (a * odd, even)
}

fn pade_13_uv(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let b = &B13;
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u = a * (&a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1]);
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    (u, v)
}

/// Matrix exponential by scaling-and-squaring with diagonal Pade
/// approximants. Relative accuracy is near machine precision for
/// well-conditioned inputs; non-finite intermediate values are reported
/// as overflow.
pub fn expm(m: &FloatMatrix) -> Result<FloatMatrix> {
    if m.rows != m.cols {
        return Err(Error::Dimension(format!(
            "exponential of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let a = m.to_na();
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow("non-finite input entry".into()));
    }
    let norm = one_norm(&a);
    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = pade_uv(&a, &B3);
        (u, v, 0)
    } else if norm <= THETA_5 {
        let (u, v) = pade_uv(&a, &B5);
        (u, v, 0)
    } else if norm <= THETA_7 {
        let (u, v) = pade_uv(&a, &B7);
        (u, v, 0)
    } else if norm <= THETA_9 {
        let (u, v) = pade_uv(&a, &B9);
        (u, v, 0)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as u32;
        let scaled = &a / 2f64.powi(s as i32);
        let (u, v) = pade_13_uv(&scaled);
        (u, v, s)
    };
    let denom = &v - &u;
    let numer = &v + &u;
    let lu = denom.lu();
    let mut r = lu
        .solve(&numer)
        .ok_or_else(|| Error::Overflow("singular Pade denominator".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow("non-finite result entry".into()));
    }
    Ok(FloatMatrix::from_na(&r))
}

/// Real 2rx2c representation `[[Re, -Im], [Im, Re]]` of a complex matrix.
fn realify(m: &DMatrix<Complex<f64>>) -> DMatrix<f64> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = DMatrix::<f64>::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + c)] = z.re;
        }
    }
    out
}

/// Numeric rank of a complex matrix: half the real rank of its real
/// representation.
pub(crate) fn complex_rank(m: &DMatrix<Complex<f64>>, tol: f64) -> Result<usize> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0);
    }
    let sv = svd_values(&realify(m))?;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    let real_rank = sv.iter().filter(|&&s| s > tol * smax).count();
    Ok(real_rank / 2)
}

/// Orthonormal basis of the (numerical) null space of a complex matrix:
/// right singular vectors of the real representation whose singular value
/// is at most `tol * sigma_max`, mapped back to complex vectors and
/// orthonormalized over the complex field.
pub(crate) fn complex_nullspace(
    m: &DMatrix<Complex<f64>>,
    tol: f64,
) -> Result<Vec<DVector<Complex<f64>>>> {
    let cols = m.ncols();
    // Pad with zero rows so the thin SVD carries every right singular vector.
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::<Complex<f64>>::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let real = realify(&padded);
    let cap = iter_cap(rows.max(cols) * 2);
    // On convergence failure retry under random orthogonal mixing; the
    // right factor is undone afterwards so null vectors refer to `m`.
    let mut factored = None;
    let mut right: Option<DMatrix<f64>> = None;
    if let Some(svd) = nalgebra::linalg::SVD::try_new(real.clone(), false, true, ITER_EPS, cap) {
        factored = Some(svd);
    } else {
        for attempt in 0..RETRIES {
            let ql = random_orthogonal(2 * rows, 201 + 2 * attempt);
            let qr = random_orthogonal(2 * cols, 202 + 2 * attempt);
            let mixed = ql.transpose() * &real * &qr;
            if let Some(svd) = nalgebra::linalg::SVD::try_new(mixed, false, true, ITER_EPS, cap) {
                factored = Some(svd);
                right = Some(qr);
                break;
            }
        }
    }
    let svd = factored.ok_or_else(|| Error::NonConvergence("SVD".into()))?;
    let v_t = svd.v_t.as_ref().expect("SVD computed with v_t");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut basis: Vec<DVector<Complex<f64>>> = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if smax != 0.0 && s > tol * smax {
            continue;
        }
        let mixed_row: Vec<f64> = v_t.row(k).iter().copied().collect();
        let row: Vec<f64> = match &right {
            // v is a null vector of the mixed matrix; Q v is one of `m`.
            Some(q) => {
                let v = DVector::from_vec(mixed_row);
                (q * v).iter().copied().collect()
            }
            None => mixed_row,
        };
        let mut z = DVector::<Complex<f64>>::zeros(cols);
        for j in 0..cols {
            z[j] = Complex::new(row[j], row[j + cols]);
        }
        for b in &basis {
            let proj: Complex<f64> = b.iter().zip(z.iter()).map(|(a, x)| a.conj() * x).sum();
            for (zi, bi) in z.iter_mut().zip(b.iter()) {
                *zi -= proj * bi;
            }
        }
        let norm = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(z / Complex::new(norm, 0.0));
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio, RatMatrix};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn float_matrix_rejects_nan() {
        assert!(FloatMatrix::new(1, 2, vec![0.0, f64::NAN]).is_err());
        assert!(FloatMatrix::new(1, 2, vec![0.0, f64::INFINITY]).is_ok());
    }

    #[test]
    fn float_rank_identity_and_tiny_singular_value() {
        assert_eq!(float_rank(&FloatMatrix::identity(3), 1e-9).unwrap(), 3);
        let m = FloatMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1e-15]]).unwrap();
        assert_eq!(float_rank(&m, 1e-9).unwrap(), 1);
        assert_eq!(float_rank(&FloatMatrix::zeros(2, 2), 1e-9).unwrap(), 0);
        assert!(float_rank(&FloatMatrix::identity(2), 0.0).is_err());
    }

    #[test]
    fn float_rank_matches_exact_rank_on_random_rationals() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..500 {
            let rows = rng.gen_range(1..=8);
            let cols = rng.gen_range(1..=8);
            let mut m = RatMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m[(i, j)] = rat(rng.gen_range(-5..=5));
                }
            }
            if rows >= 2 && rng.gen_bool(0.4) {
                let (src, dst) = (rng.gen_range(0..rows), rng.gen_range(0..rows));
                for j in 0..cols {
                    m[(dst, j)] = m[(src, j)].clone() * ratio(rng.gen_range(1..=3), 1);
                }
            }
            assert_eq!(float_rank(&m.to_float(), 1e-9).unwrap(), m.rank());
        }
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = FloatMatrix::from_rows(&[&[1., 0., 0.], &[0., 2., 0.], &[0., 0., 3.]]).unwrap();
        let mut eigs: Vec<f64> = eigenvalues(&m).unwrap().iter().map(|z| z.re).collect();
        eigs.sort_by(f64::total_cmp);
        assert!(eigs
            .iter()
            .zip([1.0, 2.0, 3.0])
            .all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn eigenvalues_of_companion_of_x2_minus_1() {
        let m = FloatMatrix::from_rows(&[&[0., 1.], &[1., 0.]]).unwrap();
        let mut eigs: Vec<f64> = eigenvalues(&m).unwrap().iter().map(|z| z.re).collect();
        eigs.sort_by(f64::total_cmp);
        assert!((eigs[0] + 1.0).abs() < 1e-12 && (eigs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_can_be_complex() {
        let m = FloatMatrix::from_rows(&[&[0., -1.], &[1., 0.]]).unwrap();
        let eigs = eigenvalues(&m).unwrap();
        assert!(eigs.iter().any(|z| (z.im - 1.0).abs() < 1e-12));
        assert!(eigs.iter().any(|z| (z.im + 1.0).abs() < 1e-12));
    }

    #[test]
    fn expm_zero_is_identity() {
        let e = expm(&FloatMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e, FloatMatrix::identity(3));
    }

    #[test]
    fn expm_diagonal() {
        let m = FloatMatrix::from_rows(&[&[1.0, 0.0], &[0.0, -2.0]]).unwrap();
        let e = expm(&m).unwrap();
        assert!((e.get(0, 0) - 1f64.exp()).abs() < 1e-12);
        assert!((e.get(1, 1) - (-2f64).exp()).abs() < 1e-12);
        assert!(e.get(0, 1).abs() < 1e-14 && e.get(1, 0).abs() < 1e-14);
    }

    #[test]
    fn expm_nilpotent_truncates() {
        let m = FloatMatrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let e = expm(&m).unwrap();
        let want = FloatMatrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((e.get(i, j) - want.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn expm_rotation_closed_form() {
        let t = 1.3;
        let m = FloatMatrix::from_rows(&[&[0.0, -t], &[t, 0.0]]).unwrap();
        let e = expm(&m).unwrap();
        assert!((e.get(0, 0) - t.cos()).abs() < 1e-12);
        assert!((e.get(1, 0) - t.sin()).abs() < 1e-12);
    }

    #[test]
    fn expm_inverse_product_near_identity() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..20 {
            let n = rng.gen_range(1..=6);
            let mut data = vec![0.0; n * n];
            for x in data.iter_mut() {
                *x = rng.gen_range(-2.0..2.0);
            }
            for i in 0..n {
                data[i * n + i] -= 3.0;
            }
            let a = FloatMatrix::new(n, n, data).unwrap();
            let neg = FloatMatrix::new(n, n, a.data.iter().map(|x| -x).collect()).unwrap();
            let prod = expm(&a).unwrap().to_na() * expm(&neg).unwrap().to_na();
            let err = (&prod - DMatrix::<f64>::identity(n, n)).amax();
            assert!(err <= 1e-8, "n={n} err={err}");
        }
    }

    #[test]
    fn expm_large_norm_uses_squaring() {
        let m = FloatMatrix::from_rows(&[&[-30.0, 4.0], &[0.0, -20.0]]).unwrap();
        let e = expm(&m).unwrap();
        // Closed form for upper-triangular 2x2 with distinct eigenvalues.
        let want01 = 4.0 * ((-20f64).exp() - (-30f64).exp()) / 10.0;
        assert!((e.get(0, 0) - (-30f64).exp()).abs() < 1e-22);
        assert!((e.get(0, 1) - want01).abs() < 1e-18);
    }

    #[test]
    fn complex_rank_and_nullspace() {
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(1, 2, &[one, i]);
        assert_eq!(complex_rank(&m, 1e-12).unwrap(), 1);
        let ns = complex_nullspace(&m, 1e-12).unwrap();
        assert_eq!(ns.len(), 1);
        let z = &ns[0];
        let residual = (z[0] + i * z[1]).norm();
        assert!(residual < 1e-12, "residual {residual}");

        let full = DMatrix::from_row_slice(2, 2, &[one, i, -i, one * 2.0]);
        assert_eq!(complex_rank(&full, 1e-12).unwrap(), 2);
        assert!(complex_nullspace(&full, 1e-12).unwrap().is_empty());
    }

    #[test]
    fn complex_nullspace_of_real_singular_matrix() {
        let zero = Complex::new(0.0, 0.0);
        let one = Complex::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[one, one, one, one]);
        let ns = complex_nullspace(&m, 1e-12).unwrap();
        assert_eq!(ns.len(), 1);
        let z = &ns[0];
        assert!((z[0] + z[1]).norm() < 1e-12);
        let wide = DMatrix::from_row_slice(1, 3, &[one, zero, zero]);
        assert_eq!(complex_nullspace(&wide, 1e-12).unwrap().len(), 2);
    }
}
