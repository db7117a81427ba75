//! Covariance-matrix algebra for two-mode Gaussian states.
//!
//! Quadratures are ordered `(q_A, p_A, q_B, p_B, …)` and the covariance matrix
//! is `V_jk = ⟨{R_j, R_k}⟩`, so the vacuum has `V = 𝟙` and physical states
//! satisfy `V + iΩ ≥ 0` with `Ω = ⊕ [[0, 1], [-1, 0]]`.

use nalgebra::{DMatrix, Matrix4};
use std::f64::consts::PI;

use crate::error::{check_nonnegative, check_range, Error, Result};

/// Default slack on the symplectic eigenvalues when testing `ν ≥ 1`.
pub const DEFAULT_PHYSICALITY_TOL: f64 = 1e-9;
/// Maximum entry of `S Ω Sᵀ - Ω` accepted for a symplectic matrix.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Maximum entry of `V - Vᵀ` accepted for a covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// The generative triple of a two-mode squeezed thermal state: EPR squeezing
/// `s`, attenuator transmissivity `eta` and amplifier squeezing `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmstParams {
    s: f64,
    eta: f64,
    r: f64,
}

impl TmstParams {
    pub fn new(s: f64, eta: f64, r: f64) -> Result<Self> {
        check_nonnegative("s", s)?;
        check_range("eta", eta, 0.0, 1.0, "[0, 1]")?;
        check_nonnegative("r", r)?;
        Ok(Self { s, eta, r })
    }

    /// Pure two-mode squeezed vacuum, `(s, 1, 0)`.
    pub fn epr(s: f64) -> Result<Self> {
        Self::new(s, 1.0, 0.0)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `ς = tanh s`.
    pub fn varsigma(&self) -> f64 {
        self.s.tanh()
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.s, eta, self.r)
    }
}

/// Standard-form parameters `(a, b, c, d)` of a two-mode covariance matrix,
///
/// ```text
/// a . c .
/// . a . d
/// c . b .
/// . d . b
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardForm {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl StandardForm {
    /// Checked constructor: requires `a, b ≥ 1` and the bona fide condition.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::with_tolerance(a, b, c, d, DEFAULT_PHYSICALITY_TOL)
    }

    pub fn with_tolerance(a: f64, b: f64, c: f64, d: f64, tol: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            if !v.is_finite() {
                return Err(Error::Domain {
                    name,
                    value: v,
                    domain: "finite reals",
                });
            }
        }
        let sf = Self { a, b, c, d };
        sf.check_physical(tol)?;
        Ok(sf)
    }

    /// Unchecked constructor for forms that are physical by construction.
    pub(crate) fn from_parts(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn vacuum() -> Self {
        Self::from_parts(1.0, 1.0, 0.0, 0.0)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn is_tmst(&self) -> bool {
        (self.c + self.d).abs() <= 1e-12 * (1.0 + self.c.abs())
    }

    /// `det α = a²`.
    pub fn det_alpha(&self) -> f64 {
        self.a * self.a
    }

    /// `det V = (ab - c²)(ab - d²)`.
    pub fn det_v(&self) -> f64 {
        let ab = self.a * self.b;
        (ab - self.c * self.c) * (ab - self.d * self.d)
    }

    /// Symplectic eigenvalues `(ν₋, ν₊)` from the two-mode invariants
    /// `Δ = a² + b² + 2cd` and `det V`.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let delta = self.a * self.a + self.b * self.b + 2.0 * self.c * self.d;
        let det = self.det_v();
        let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
        let plus_sq = 0.5 * (delta + disc);
        let minus_sq = if plus_sq > 0.0 { det / plus_sq } else { 0.0 };
        (minus_sq.max(0.0).sqrt(), plus_sq.max(0.0).sqrt())
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.check_physical(tol).is_ok()
    }

    pub(crate) fn check_physical(&self, tol: f64) -> Result<()> {
        let ab = self.a * self.b;
        let positive = self.a >= 1.0 - tol
            && self.b >= 1.0 - tol
            && ab - self.c * self.c > 0.0
            && ab - self.d * self.d > 0.0;
        let nu_min = if positive {
            self.symplectic_eigenvalues().0
        } else {
            0.0
        };
        if positive && nu_min >= 1.0 - tol {
            Ok(())
        } else {
            Err(Error::NotPhysical {
                min_symplectic_eigenvalue: nu_min,
                tolerance: tol,
            })
        }
    }

    /// Rotate mode B by π when `c < 0`, flipping the signs of both `c` and `d`.
    /// Returns the normalized form and whether the flip was applied.
    pub fn canonicalized(&self) -> (Self, bool) {
        if self.c < 0.0 {
            (Self::from_parts(self.a, self.b, -self.c, -self.d), true)
        } else {
            (*self, false)
        }
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        Matrix4::new(
            a, 0.0, c, 0.0, //
            0.0, a, 0.0, d, //
            c, 0.0, b, 0.0, //
            0.0, d, 0.0, b,
        )
    }

    pub fn covariance(&self) -> CovarianceMatrix {
        CovarianceMatrix(DMatrix::from_iterator(4, 4, self.matrix().iter().copied()))
    }
}

/// Real symmetric `2N × 2N` covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(DMatrix<f64>);

impl CovarianceMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "covariance matrix must be square with even dimension, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let asymmetry = (&m - m.transpose()).amax();
        if asymmetry > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Ok(Self(m))
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(DMatrix::identity(2 * modes, 2 * modes))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn direct_sum(&self, other: &CovarianceMatrix) -> CovarianceMatrix {
        let (n, m) = (self.0.nrows(), other.0.nrows());
        let mut out = DMatrix::zeros(n + m, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(&self.0);
        out.view_mut((n, n), (m, m)).copy_from(&other.0);
        CovarianceMatrix(out)
    }

    /// Trace out one mode: delete its two rows and columns.
    pub fn discard_mode(&self, mode: usize) -> Result<CovarianceMatrix> {
        if mode >= self.modes() || self.modes() < 2 {
            return Err(Error::Dimension(format!(
                "cannot discard mode {mode} of a {}-mode state",
                self.modes()
            )));
        }
        let m = self
            .0
            .clone()
            .remove_rows(2 * mode, 2)
            .remove_columns(2 * mode, 2);
        Ok(CovarianceMatrix(m))
    }

    /// Congruence `S V Sᵀ`.
    pub fn transform(&self, s: &Symplectic) -> Result<CovarianceMatrix> {
        if s.0.nrows() != self.0.nrows() {
            return Err(Error::Dimension(format!(
                "symplectic is {}×{}, covariance is {}×{}",
                s.0.nrows(),
                s.0.ncols(),
                self.0.nrows(),
                self.0.ncols()
            )));
        }
        let out = &s.0 * &self.0 * s.0.transpose();
        Ok(CovarianceMatrix(0.5 * (&out + out.transpose())))
    }

    /// Symplectic eigenvalues in ascending order: moduli of the eigenvalues of
    /// `iΩV`, obtained as square roots of the spectrum of the symmetric matrix
    /// `V^½ Ωᵀ V Ω V^½`. Returns `None` when `V` is not positive definite.
    pub fn symplectic_eigenvalues(&self) -> Option<Vec<f64>> {
        let eig = self.0.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
            return None;
        }
        let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
        let omega = omega(self.modes());
        let m = &root * omega.transpose() * &self.0 * &omega * &root;
        let m = 0.5 * (&m + m.transpose());
        let mut nu_sq: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        nu_sq.sort_by(|x, y| x.total_cmp(y));
        Some(nu_sq.chunks(2).map(|pair| pair[0].max(0.0).sqrt()).collect())
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.symplectic_eigenvalues()
            .is_some_and(|nu| nu.iter().all(|&v| v >= 1.0 - tol))
    }

    /// Read `(a, b, c, d)` off a two-mode matrix already in standard form.
    pub fn to_standard_form(&self) -> Result<StandardForm> {
        if self.modes() != 2 {
            return Err(Error::Dimension(format!(
                "standard form needs two modes, got {}",
                self.modes()
            )));
        }
        let m = &self.0;
        let off = [
            m[(0, 1)],
            m[(0, 3)],
            m[(1, 2)],
            m[(2, 3)],
        ];
        let scale = m.amax().max(1.0);
        if off.iter().any(|v| v.abs() > 1e-12 * scale)
            || (m[(0, 0)] - m[(1, 1)]).abs() > 1e-12 * scale
            || (m[(2, 2)] - m[(3, 3)]).abs() > 1e-12 * scale
        {
            return Err(Error::Dimension("matrix is not in standard form".into()));
        }
        StandardForm::new(m[(0, 0)], m[(2, 2)], m[(0, 2)], m[(1, 3)])
    }
}

/// `Ω = ⊕ [[0, 1], [-1, 0]]` over `modes` modes.
pub fn omega(modes: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        o[(2 * k, 2 * k + 1)] = 1.0;
        o[(2 * k + 1, 2 * k)] = -1.0;
    }
    o
}

/// A real matrix satisfying `S Ω Sᵀ = Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct Symplectic(DMatrix<f64>);

impl Symplectic {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "symplectic matrix must be square with even dimension, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let residual = symplectic_residual(&m);
        if residual >= SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(Self(m))
    }

    pub fn identity(modes: usize) -> Self {
        Self(DMatrix::identity(2 * modes, 2 * modes))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.0)
    }

    /// Lift a two-mode transformation onto modes `(i, j)` of an `n`-mode system.
    pub fn embed(&self, i: usize, j: usize, n: usize) -> Result<Symplectic> {
        if self.modes() != 2 || i == j || i >= n || j >= n {
            return Err(Error::Dimension(format!(
                "cannot embed a {}-mode map on modes ({i}, {j}) of {n}",
                self.modes()
            )));
        }
        let mut out = DMatrix::identity(2 * n, 2 * n);
        let slots = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1];
        for (r, &gr) in slots.iter().enumerate() {
            for (c, &gc) in slots.iter().enumerate() {
                out[(gr, gc)] = self.0[(r, c)];
            }
        }
        Ok(Symplectic(out))
    }
}

/// Largest entry of `|S Ω Sᵀ - Ω|`.
pub fn symplectic_residual(m: &DMatrix<f64>) -> f64 {
    let o = omega(m.nrows() / 2);
    (m * &o * m.transpose() - o).amax()
}

/// Beam splitter of intensity transmissivity `eta` acting on `(A, A')`.
pub fn beam_splitter(eta: f64) -> Result<Symplectic> {
    check_range("eta", eta, 0.0, 1.0, "[0, 1]")?;
    let t = eta.sqrt();
    let u = (1.0 - eta).sqrt();
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        t, 0.0, -u, 0.0,
        0.0, t, 0.0, -u,
        u, 0.0, t, 0.0,
        0.0, u, 0.0, t,
    ]);
    Ok(Symplectic(m))
}

/// Two-mode squeezer with squeezing `r`.
pub fn two_mode_squeezer(r: f64) -> Symplectic {
    let (ch, sh) = (r.cosh(), r.sinh());
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        ch, 0.0, sh, 0.0,
        0.0, ch, 0.0, -sh,
        sh, 0.0, ch, 0.0,
        0.0, -sh, 0.0, ch,
    ]);
    Symplectic(m)
}

/// Validate `s` and apply it by congruence.
pub fn apply_symplectic(v: &CovarianceMatrix, s: DMatrix<f64>) -> Result<CovarianceMatrix> {
    v.transform(&Symplectic::new(s)?)
}

/// Two-mode squeezed vacuum: `a = b = cosh 2s`, `c = -d = sinh 2s`.
///
/// Negative `s` is accepted and yields `c < 0`.
pub fn epr_covariance(s: f64) -> StandardForm {
    let (ch, sh) = ((2.0 * s).cosh(), (2.0 * s).sinh());
    StandardForm::from_parts(ch, ch, sh, -sh)
}

/// Standard form of the TMST state produced by `A_r ∘ L_η` acting on mode A
/// of an EPR state with squeezing `s`.
pub fn tmst_covariance(p: &TmstParams) -> StandardForm {
    let (s, eta, r) = (p.s, p.eta, p.r);
    let ch2 = r.cosh().powi(2);
    let sh2 = r.sinh().powi(2);
    let b = (2.0 * s).cosh();
    let a = eta * ch2 * b + (1.0 - eta) * ch2 + sh2;
    let c = eta.sqrt() * r.cosh() * (2.0 * s).sinh();
    StandardForm::from_parts(a, b, c, -c)
}

/// Pure-loss channel on mode A of an EPR standard form. Only `b` is read.
pub fn loss_channel_on_a(epr: &StandardForm, eta: f64) -> Result<StandardForm> {
    check_range("eta", eta, 0.0, 1.0, "[0, 1]")?;
    let b = epr.b;
    let a = b * eta + 1.0 - eta;
    let c = (eta * (b * b - 1.0)).max(0.0).sqrt();
    Ok(StandardForm::from_parts(a, b, c, -c))
}

/// Covariance matrix of the TMST state built mode by mode: append a vacuum
/// ancilla, mix it with A on a beam splitter, drop it, append a second vacuum
/// ancilla, squeeze it jointly with A, drop it.
pub fn channel_pipeline_covariance(p: &TmstParams) -> Result<CovarianceMatrix> {
    let epr = epr_covariance(p.s).covariance();
    let after_loss = epr
        .direct_sum(&CovarianceMatrix::vacuum(1))
        .transform(&beam_splitter(p.eta)?.embed(0, 2, 3)?)?
        .discard_mode(2)?;
    after_loss
        .direct_sum(&CovarianceMatrix::vacuum(1))
        .transform(&two_mode_squeezer(p.r).embed(0, 2, 3)?)?
        .discard_mode(2)
}

/// `det α - det V`, both read from the assembled 4×4 matrix.
pub fn gaussian_steering_gap(sf: &StandardForm) -> f64 {
    let m = sf.matrix();
    let alpha = m.fixed_view::<2, 2>(0, 0).determinant();
    alpha - m.determinant()
}

/// A→B steerability by Gaussian measurements: strict `det α > det V`.
pub fn is_gaussian_steerable_a_to_b(sf: &StandardForm) -> Result<bool> {
    sf.check_physical(DEFAULT_PHYSICALITY_TOL)?;
    Ok(gaussian_steering_gap(sf) > 0.0)
}

/// Wigner function of the zero-mean Gaussian state at `xi = (q_A, p_A, q_B, p_B)`.
pub fn wigner_at(sf: &StandardForm, xi: [f64; 4]) -> Result<f64> {
    let m = sf.matrix();
    let chol = m.cholesky().ok_or(Error::Singular)?;
    let det = chol.determinant();
    if det <= 0.0 || !det.is_finite() {
        return Err(Error::Singular);
    }
    let x = nalgebra::Vector4::from(xi);
    let quad = x.dot(&chol.solve(&x));
    Ok((-quad).exp() / (PI * PI * det.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn epr_vacuum_and_values() {
        let v = epr_covariance(0.0);
        assert_eq!((v.a(), v.b(), v.c(), v.d()), (1.0, 1.0, 0.0, -0.0));
        let v = epr_covariance(0.5);
        assert_eq!(v.a(), 1f64.cosh());
        assert_eq!(v.b(), 1f64.cosh());
        assert_eq!(v.c(), 1f64.sinh());
        assert_eq!(v.d(), -1f64.sinh());
    }

    #[test]
    fn epr_is_pure() {
        let v = epr_covariance(0.5);
        let (nu_min, nu_max) = v.symplectic_eigenvalues();
        assert_abs_diff_eq!(nu_min, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(nu_max, 1.0, epsilon = 1e-12);
        let general = v.covariance().symplectic_eigenvalues().unwrap();
        assert_abs_diff_eq!(general[0], 1.0, epsilon = 1e-10);
        assert!(v.is_physical(DEFAULT_PHYSICALITY_TOL));
        for s in [0.0, 0.3, 1.0, 2.0, 3.0] {
            assert_abs_diff_eq!(epr_covariance(s).det_v(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn negative_squeezing_flips_c() {
        let v = epr_covariance(-0.5);
        assert!(v.c() < 0.0 && v.d() > 0.0);
        let (canon, flipped) = v.canonicalized();
        assert!(flipped);
        assert_eq!(canon, epr_covariance(0.5));
    }

    #[test]
    fn unphysical_forms_rejected() {
        assert!(matches!(
            StandardForm::new(1.0, 1.0, 0.5, -0.5),
            Err(Error::NotPhysical { .. })
        ));
        assert!(StandardForm::new(0.5, 3.0, 0.0, 0.0).is_err());
        assert!(StandardForm::new(-2.0, -2.0, 0.0, 0.0).is_err());
        assert!(StandardForm::new(f64::NAN, 1.0, 0.0, 0.0).is_err());
        assert!(StandardForm::new(2.0, 2.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn tmst_identity_channel_is_epr() {
        let p = TmstParams::new(0.7, 1.0, 0.0).unwrap();
        let t = tmst_covariance(&p);
        let e = epr_covariance(0.7);
        assert_abs_diff_eq!(t.a(), e.a(), epsilon = 1e-14);
        assert_abs_diff_eq!(t.c(), e.c(), epsilon = 1e-14);
    }

    #[test]
    fn tmst_full_loss_is_product() {
        let t = tmst_covariance(&TmstParams::new(0.8, 0.0, 0.0).unwrap());
        assert_eq!(t.c(), 0.0);
        assert_eq!(t.a(), 1.0);
        assert_eq!(t.b(), 1.6f64.cosh());
    }

    #[test]
    fn tmst_matches_pipeline() {
        let p = TmstParams::new(0.5, 0.6, 0.3).unwrap();
        let pipe = channel_pipeline_covariance(&p).unwrap();
        let direct = tmst_covariance(&p).covariance();
        assert_abs_diff_eq!((pipe.matrix() - direct.matrix()).amax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gate_identities() {
        assert_eq!(beam_splitter(1.0).unwrap(), Symplectic::identity(2));
        assert_eq!(two_mode_squeezer(0.0), Symplectic::identity(2));
        assert!(beam_splitter(0.5).unwrap().residual() < SYMPLECTIC_TOL);
        assert!(beam_splitter(1.2).is_err());
        assert!(beam_splitter(-0.1).is_err());
    }

    #[test]
    fn squeezer_on_vacuum_gives_epr() {
        let v = CovarianceMatrix::vacuum(2)
            .transform(&two_mode_squeezer(0.4))
            .unwrap();
        let sf = v.to_standard_form().unwrap();
        let e = epr_covariance(0.4);
        assert_abs_diff_eq!(sf.a(), e.a(), epsilon = 1e-14);
        assert_abs_diff_eq!(sf.c(), e.c(), epsilon = 1e-14);
        assert_abs_diff_eq!(sf.d(), e.d(), epsilon = 1e-14);
    }

    #[test]
    fn non_symplectic_rejected_with_residual() {
        let mut m = DMatrix::identity(4, 4);
        m[(0, 0)] = 2.0;
        let err = apply_symplectic(&CovarianceMatrix::vacuum(2), m).unwrap_err();
        match err {
            Error::NotSymplectic { residual } => assert_abs_diff_eq!(residual, 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn loss_channel_limits() {
        let e = epr_covariance(0.5);
        let same = loss_channel_on_a(&e, 1.0).unwrap();
        assert_abs_diff_eq!(same.a(), e.a(), epsilon = 1e-14);
        assert_abs_diff_eq!(same.c(), e.c(), epsilon = 1e-14);
        let lost = loss_channel_on_a(&e, 0.0).unwrap();
        assert_eq!(lost.a(), 1.0);
        assert_eq!(lost.c(), 0.0);
    }

    #[test]
    fn loss_channel_matches_six_by_six_embedding() {
        let e = epr_covariance(0.5);
        let closed = loss_channel_on_a(&e, 0.5).unwrap().covariance();
        let via = e
            .covariance()
            .direct_sum(&CovarianceMatrix::vacuum(1))
            .transform(&beam_splitter(0.5).unwrap().embed(0, 2, 3).unwrap())
            .unwrap()
            .discard_mode(2)
            .unwrap();
        assert_abs_diff_eq!((closed.matrix() - via.matrix()).amax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_steering_examples() {
        assert!(is_gaussian_steerable_a_to_b(&epr_covariance(0.1)).unwrap());
        let lossy = |eta| tmst_covariance(&TmstParams::new(0.5, eta, 0.0).unwrap());
        assert!(!is_gaussian_steerable_a_to_b(&lossy(0.4)).unwrap());
        assert!(is_gaussian_steerable_a_to_b(&lossy(0.6)).unwrap());
        assert!(!is_gaussian_steerable_a_to_b(&StandardForm::vacuum()).unwrap());
        let bad = StandardForm::from_parts(1.0, 1.0, 0.9, -0.9);
        assert!(is_gaussian_steerable_a_to_b(&bad).is_err());
    }

    #[test]
    fn wigner_at_origin() {
        let vac = wigner_at(&StandardForm::vacuum(), [0.0; 4]).unwrap();
        assert_abs_diff_eq!(vac, 1.0 / (PI * PI), epsilon = 1e-15);
        let epr = wigner_at(&epr_covariance(0.3), [0.0; 4]).unwrap();
        assert_abs_diff_eq!(epr, 1.0 / (PI * PI), epsilon = 1e-14);
        let singular = StandardForm::from_parts(1.0, 1.0, 1.0, -1.0);
        assert!(matches!(wigner_at(&singular, [0.0; 4]), Err(Error::Singular)));
    }

    #[test]
    fn general_and_two_mode_symplectic_eigenvalues_agree() {
        let sf = StandardForm::new(2.0, 3.0, 1.2, -0.7).unwrap();
        let (lo, hi) = sf.symplectic_eigenvalues();
        let gen = sf.covariance().symplectic_eigenvalues().unwrap();
        assert_abs_diff_eq!(gen[0], lo, epsilon = 1e-10);
        assert_abs_diff_eq!(gen[1], hi, epsilon = 1e-10);
    }

    #[test]
    fn covariance_validation() {
        let mut m = DMatrix::identity(4, 4);
        m[(0, 1)] = 0.1;
        assert!(matches!(
            CovarianceMatrix::new(m),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(CovarianceMatrix::new(DMatrix::identity(3, 3)).is_err());
        assert!(CovarianceMatrix::vacuum(1).discard_mode(0).is_err());
    }

    #[test]
    fn tmst_params_validation() {
        assert!(TmstParams::new(-0.1, 0.5, 0.0).is_err());
        assert!(TmstParams::new(0.1, 1.5, 0.0).is_err());
        assert!(TmstParams::new(0.1, 0.5, -1.0).is_err());
        assert!(TmstParams::new(0.1, f64::NAN, 0.0).is_err());
    }
}
