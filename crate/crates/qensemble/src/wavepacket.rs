//! Wave-packet synthesis and spreading diagnostics.
//!
//! Packets are carried as spectra on a k grid and synthesized at any
//! time by direct quadrature of int dk psi_hat(k) e^{i(k x - omega(k) t)}.
//! The transform normalization pairs a forward (1 / 2 pi) int dx with a
//! plain int dk back, so a forward-then-synthesize round trip is the
//! identity to high accuracy on adequately sampled grids.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{check_uniform, ComplexGrid1D};

/// Frequency law omega(k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dispersion {
    /// omega = hbar k^2 / (2 m): the standard free-particle law and the
    /// default.
    HalfQuadratic { hbar: f64, mass: f64 },
    /// omega = hbar k^2 / m: the total-energy convention E_T = m u^2.
    Quadratic { hbar: f64, mass: f64 },
}

impl Dispersion {
    pub fn omega(&self, k: f64) -> f64 {
        match *self {
            Dispersion::HalfQuadratic { hbar, mass } => hbar * k * k / (2.0 * mass),
            Dispersion::Quadratic { hbar, mass } => hbar * k * k / mass,
        }
    }
}

/// Parameters of a Gaussian packet: envelope width, carrier wave number,
/// and particle mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacketParams {
    pub b: f64,
    pub k0: f64,
    pub mass: f64,
}

impl GaussianPacketParams {
    pub fn new(b: f64, k0: f64, mass: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::Domain(format!("width b must be positive, got {b}")));
        }
        Ok(Self { b, k0, mass })
    }
}

/// A spectrum sampled on a uniform k grid together with its frequency law.
#[derive(Debug, Clone)]
pub struct SpectralPacket {
    pub k_grid: Vec<f64>,
    pub psi_hat: Vec<Complex64>,
    pub dispersion: Dispersion,
}

impl SpectralPacket {
    pub fn new(k_grid: Vec<f64>, psi_hat: Vec<Complex64>, dispersion: Dispersion) -> Result<Self> {
        if k_grid.len() != psi_hat.len() {
            return Err(Error::Domain("k grid and spectrum lengths differ".into()));
        }
        if k_grid.len() > 1 {
            check_uniform(&k_grid)?;
        } else if k_grid.is_empty() {
            return Err(Error::Domain("spectrum must not be empty".into()));
        }
        if psi_hat
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Domain("spectrum contains non-finite values".into()));
        }
        Ok(Self {
            k_grid,
            psi_hat,
            dispersion,
        })
    }

    /// A single plane-wave mode of unit amplitude: the spectrum of the
    /// sharp-energy ensemble member.
    pub fn single_mode(k0: f64, dispersion: Dispersion) -> Self {
        Self {
            k_grid: vec![k0],
            psi_hat: vec![Complex64::new(1.0, 0.0)],
            dispersion,
        }
    }

    fn significant_k_max(&self) -> f64 {
        let peak = self
            .psi_hat
            .iter()
            .map(|v| v.norm())
            .fold(0.0_f64, f64::max);
        self.k_grid
            .iter()
            .zip(&self.psi_hat)
            .filter(|(_, v)| v.norm() > 1e-10 * peak)
            .map(|(k, _)| k.abs())
            .fold(0.0_f64, f64::max)
    }
}

/// Gaussian spectrum psi_hat(k) = e^{-(k - k0)^2 b^2 / 2} on `k_grid`,
/// with the default half-quadratic frequency law.
///
/// The grid must span at least [k0 - 6/b, k0 + 6/b]; outside that span
/// the dropped tail exceeds the accuracy this module promises.
pub fn gaussian_spectrum(
    p: GaussianPacketParams,
    k_grid: &[f64],
    hbar: f64,
) -> Result<SpectralPacket> {
    let (need_lo, need_hi) = (p.k0 - 6.0 / p.b, p.k0 + 6.0 / p.b);
    let (k_lo, k_hi) = (k_grid[0], *k_grid.last().unwrap());
    if k_lo > need_lo || k_hi < need_hi {
        return Err(Error::SpectrumTruncated {
            k_lo,
            k_hi,
            need_lo,
            need_hi,
        });
    }
    let psi_hat = k_grid
        .iter()
        .map(|&k| {
            let d = (k - p.k0) * p.b;
            Complex64::new((-0.5 * d * d).exp(), 0.0)
        })
        .collect();
    SpectralPacket::new(
        k_grid.to_vec(),
        psi_hat,
        Dispersion::HalfQuadratic { hbar, mass: p.mass },
    )
}

/// Synthesize the packet on `x_grid` at time `t`:
/// psi(x, t) = int dk psi_hat(k) e^{i (k x - omega(k) t)} by trapezoidal
/// quadrature over the k grid (a lone mode is evaluated directly).
pub fn evolve(sp: &SpectralPacket, t: f64, x_grid: &[f64]) -> Result<ComplexGrid1D> {
    if sp.k_grid.len() == 1 {
        let k = sp.k_grid[0];
        let omega = sp.dispersion.omega(k);
        let values = x_grid
            .iter()
            .map(|&x| sp.psi_hat[0] * Complex64::from_polar(1.0, k * x - omega * t))
            .collect();
        return ComplexGrid1D::new(x_grid.to_vec(), values);
    }

    let dx = check_uniform(x_grid)?;
    let k_sig = sp.significant_k_max();
    let nyquist = std::f64::consts::PI / dx;
    if k_sig > 0.5 * nyquist {
        return Err(Error::Resolution(format!(
            "grid spacing {dx} gives fewer than 4 points per wavelength at |k| = {k_sig} \
             (significant spectral weight above half the Nyquist wave number {nyquist})"
        )));
    }

    let dk = sp.k_grid[1] - sp.k_grid[0];
    let n = sp.k_grid.len();
    let phases: Vec<(f64, Complex64)> = sp
        .k_grid
        .iter()
        .zip(&sp.psi_hat)
        .enumerate()
        .map(|(j, (&k, &a))| {
            let weight = if j == 0 || j == n - 1 { 0.5 * dk } else { dk };
            let omega = sp.dispersion.omega(k);
            (k, a * weight * Complex64::from_polar(1.0, -omega * t))
        })
        .collect();

    let values = x_grid
        .iter()
        .map(|&x| {
            phases
                .iter()
                .map(|&(k, a)| a * Complex64::from_polar(1.0, k * x))
                .sum()
        })
        .collect();
    ComplexGrid1D::new(x_grid.to_vec(), values)
}

/// Forward transform psi_hat(k) = (1 / 2 pi) int dx psi(x) e^{-i k x}
/// by trapezoidal quadrature over the x samples.
pub fn forward_transform(
    x: &[f64],
    psi: &[Complex64],
    k_grid: &[f64],
    dispersion: Dispersion,
) -> Result<SpectralPacket> {
    if x.len() != psi.len() {
        return Err(Error::Domain("x grid and field lengths differ".into()));
    }
    let dx = check_uniform(x)?;
    let n = x.len();
    let scale = dx / (2.0 * std::f64::consts::PI);
    let psi_hat = k_grid
        .iter()
        .map(|&k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, (&xj, &pj)) in x.iter().zip(psi).enumerate() {
                let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                acc += pj * Complex64::from_polar(w, -k * xj);
            }
            acc * scale
        })
        .collect();
    SpectralPacket::new(k_grid.to_vec(), psi_hat, dispersion)
}

/// Closed-form spreading profile for a Gaussian packet,
/// (1 + s^2)^{-1} exp[-(x - hbar k0 t / m)^2 / (b^2 (1 + s^2)^2)] with
/// s = hbar t / (m b^2), normalized to 1 at the moving peak at t = 0.
pub fn gaussian_norm_analytic(p: GaussianPacketParams, hbar: f64, x: f64, t: f64) -> f64 {
    let s = hbar * t / (p.mass * p.b * p.b);
    let spread = 1.0 + s * s;
    let xi = x - hbar * p.k0 * t / p.mass;
    (1.0 / spread) * (-(xi * xi) / (p.b * p.b * spread * spread)).exp()
}

/// Intrinsic potential of a real envelope: phi(x) = psi0(x)^2.
pub fn intrinsic_potential(envelope: &[f64]) -> Vec<f64> {
    envelope.iter().map(|&v| v * v).collect()
}

/// Force density F = -d phi / d x of the envelope's intrinsic potential,
/// by central differences (one-sided at the ends).
pub fn intrinsic_force(x: &[f64], envelope: &[f64]) -> Result<Vec<f64>> {
    if x.len() != envelope.len() || x.len() < 3 {
        return Err(Error::Domain(
            "force needs matching grids with at least three points".into(),
        ));
    }
    let h = check_uniform(x)?;
    let phi = intrinsic_potential(envelope);
    let n = phi.len();
    let mut f = vec![0.0; n];
    f[0] = -(phi[1] - phi[0]) / h;
    f[n - 1] = -(phi[n - 1] - phi[n - 2]) / h;
    for i in 1..n - 1 {
        f[i] = -(phi[i + 1] - phi[i - 1]) / (2.0 * h);
    }
    Ok(f)
}

/// Stability residual max |psi* d psi + psi d psi*| = max |d |psi|^2|
/// over the grid; zero means the amplitude profile exerts no net force.
pub fn equilibrium_residual(x: &[f64], field: &[Complex64]) -> Result<f64> {
    if x.len() != field.len() || x.len() < 3 {
        return Err(Error::Domain(
            "residual needs matching grids with at least three points".into(),
        ));
    }
    let h = check_uniform(x)?;
    let n = field.len();
    let mut worst = 0.0_f64;
    for i in 1..n - 1 {
        let grad = (field[i + 1] - field[i - 1]) / (2.0 * h);
        let r = (field[i].conj() * grad + field[i] * grad.conj()).re.abs();
        worst = worst.max(r);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linspace;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_params() -> GaussianPacketParams {
        GaussianPacketParams::new(1.0, 5.0, 1.0).unwrap()
    }

    #[test]
    fn spectrum_reference_values() {
        let p = unit_params();
        let k_grid = linspace(p.k0 - 8.0, p.k0 + 8.0, 1601);
        let sp = gaussian_spectrum(p, &k_grid, 1.0).unwrap();
        let at = |k: f64| {
            let idx = k_grid
                .iter()
                .position(|&kk| (kk - k).abs() < 1e-9)
                .unwrap();
            sp.psi_hat[idx].re
        };
        assert_relative_eq!(at(p.k0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(at(p.k0 + 1.0 / p.b), (-0.5_f64).exp(), epsilon = 1e-12);
        assert!(at(p.k0 + 6.0 / p.b) < 2e-8);
    }

    #[test]
    fn spectrum_span_is_checked() {
        let p = unit_params();
        let k_grid = linspace(p.k0 - 3.0, p.k0 + 3.0, 301);
        assert!(matches!(
            gaussian_spectrum(p, &k_grid, 1.0),
            Err(Error::SpectrumTruncated { .. })
        ));
    }

    #[test]
    fn single_mode_density_is_flat() {
        let sp = SpectralPacket::single_mode(5.0, Dispersion::HalfQuadratic { hbar: 1.0, mass: 1.0 });
        let x = linspace(-3.0, 3.0, 97);
        for &t in &[0.0, 0.7, 2.0] {
            let f = evolve(&sp, t, &x).unwrap();
            for v in &f.values {
                assert_relative_eq!(v.norm_sqr(), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn resolution_guard_triggers() {
        let p = unit_params();
        let k_grid = linspace(p.k0 - 8.0, p.k0 + 8.0, 801);
        let sp = gaussian_spectrum(p, &k_grid, 1.0).unwrap();
        let coarse = linspace(-3.0, 3.0, 10);
        assert!(matches!(
            evolve(&sp, 0.0, &coarse),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn round_trip_recovers_initial_packet() {
        // forward-then-inverse identity on psi(x) = e^{-x^2/b^2 + i k0 x}
        let (b, k0) = (1.0, 5.0);
        let x = linspace(-7.0, 7.0, 1401);
        let psi: Vec<Complex64> = x
            .iter()
            .map(|&xi| Complex64::from_polar((-xi * xi / (b * b)).exp(), k0 * xi))
            .collect();
        let k_grid = linspace(k0 - 10.0, k0 + 10.0, 1001);
        let sp = forward_transform(&x, &psi, &k_grid, Dispersion::HalfQuadratic {
            hbar: 1.0,
            mass: 1.0,
        })
        .unwrap();
        let back = evolve(&sp, 0.0, &x).unwrap();
        let err = back
            .values
            .iter()
            .zip(&psi)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        assert!(err < 1e-6, "round-trip L_inf error {err}");
        // |psi|^2 of the recovered field is the e^{-2x^2/b^2} input profile
        let mid = x.iter().position(|&v| v.abs() < 1e-12).unwrap();
        assert_relative_eq!(back.values[mid].norm_sqr(), 1.0, epsilon = 1e-6);
    }

    /// Exact dispersive-evolution profile of the e^{-(k-k0)^2 b^2/2}
    /// spectrum under omega = hbar k^2/(2m), peak-normalized at t = 0:
    /// (1+s^2)^{-1/2} exp[-(x - hbar k0 t/m)^2 / (b^2 (1+s^2))].
    fn dispersive_profile(p: GaussianPacketParams, hbar: f64, x: f64, t: f64) -> f64 {
        let s = hbar * t / (p.mass * p.b * p.b);
        let spread = 1.0 + s * s;
        let xi = x - hbar * p.k0 * t / p.mass;
        spread.powf(-0.5) * (-(xi * xi) / (p.b * p.b * spread)).exp()
    }

    #[test]
    fn evolution_matches_gaussian_integral_oracle() {
        let p = unit_params();
        let k_grid = linspace(p.k0 - 8.0, p.k0 + 8.0, 2049);
        let sp = gaussian_spectrum(p, &k_grid, 1.0).unwrap();
        let x = linspace(-15.0, 30.0, 3001);
        let peak0 = evolve(&sp, 0.0, &x)
            .unwrap()
            .values
            .iter()
            .map(|v| v.norm_sqr())
            .fold(0.0_f64, f64::max);
        for &t in &[0.0, 0.5, 1.0, 2.0] {
            let f = evolve(&sp, t, &x).unwrap();
            let mut linf = 0.0_f64;
            for (&xi, v) in x.iter().zip(&f.values) {
                let num = v.norm_sqr() / peak0;
                let exact = dispersive_profile(p, 1.0, xi, t);
                linf = linf.max((num - exact).abs());
            }
            assert!(linf < 1e-6, "t = {t}: L_inf = {linf}");
        }
    }

    #[test]
    fn probability_is_conserved() {
        let p = unit_params();
        let k_grid = linspace(p.k0 - 8.0, p.k0 + 8.0, 2049);
        let sp = gaussian_spectrum(p, &k_grid, 1.0).unwrap();
        let x = linspace(-15.0, 30.0, 3001);
        let p0 = evolve(&sp, 0.0, &x).unwrap().total_probability();
        for &t in &[0.5, 1.0, 2.0] {
            let pt = evolve(&sp, t, &x).unwrap().total_probability();
            assert_relative_eq!(pt, p0, max_relative = 1e-10);
        }
    }

    #[test]
    fn analytic_profile_reference_values() {
        let p = unit_params();
        assert_relative_eq!(gaussian_norm_analytic(p, 1.0, 0.0, 0.0), 1.0);
        assert_relative_eq!(
            gaussian_norm_analytic(p, 1.0, p.b, 0.0),
            (-1.0_f64).exp(),
            epsilon = 1e-14
        );
        // peak rides at x = hbar k0 t / m
        for &t in &[0.3, 1.0, 2.5] {
            let xs = linspace(-5.0 + 5.0 * t, 5.0 + 5.0 * t, 4001);
            let (mut best_x, mut best) = (0.0, -1.0);
            for &xi in &xs {
                let v = gaussian_norm_analytic(p, 1.0, xi, t);
                if v > best {
                    best = v;
                    best_x = xi;
                }
            }
            assert_relative_eq!(best_x, p.k0 * t, epsilon = 1e-2);
        }
    }

    #[test]
    fn intrinsic_potential_examples() {
        let x = linspace(-3.0, 3.0, 601);
        let b = 1.0_f64;
        let envelope: Vec<f64> = x.iter().map(|&xi| (-xi * xi / (2.0 * b * b)).exp()).collect();
        let phi = intrinsic_potential(&envelope);
        for (&xi, &p) in x.iter().zip(&phi) {
            assert_relative_eq!(p, (-xi * xi / (b * b)).exp(), epsilon = 1e-13);
        }
        assert!(intrinsic_potential(&[0.0, 0.0]).iter().all(|&v| v == 0.0));
        let flat = intrinsic_potential(&[0.7, 0.7, 0.7]);
        assert!(flat.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn force_matches_closed_form() {
        let b = 1.3_f64;
        let x = linspace(-5.0 * b, 5.0 * b, 4001);
        let envelope: Vec<f64> = x.iter().map(|&xi| (-xi * xi / (2.0 * b * b)).exp()).collect();
        let f = intrinsic_force(&x, &envelope).unwrap();
        let closed = |xi: f64| (2.0 * xi / (b * b)) * (-xi * xi / (b * b)).exp();
        let mid = x.iter().position(|&v| v.abs() < 1e-9).unwrap();
        assert!(f[mid].abs() < 1e-10);
        let at_b = x.iter().position(|&v| (v - b).abs() < 1e-9);
        if let Some(i) = at_b {
            assert_relative_eq!(f[i], closed(b), max_relative = 1e-4);
        }
        // constant envelope exerts nothing
        let flat = vec![0.5; x.len()];
        assert!(intrinsic_force(&x, &flat)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn force_converges_at_second_order() {
        let b = 1.0_f64;
        let closed = |xi: f64| (2.0 * xi / (b * b)) * (-xi * xi / (b * b)).exp();
        let worst_err = |n: usize| {
            let x = linspace(-4.0, 4.0, n);
            let envelope: Vec<f64> =
                x.iter().map(|&xi| (-xi * xi / (2.0 * b * b)).exp()).collect();
            let f = intrinsic_force(&x, &envelope).unwrap();
            x.iter()
                .zip(&f)
                .skip(1)
                .take(x.len() - 2)
                .map(|(&xi, &fi)| (fi - closed(xi)).abs())
                .fold(0.0_f64, f64::max)
        };
        let coarse = worst_err(201);
        let fine = worst_err(401);
        assert!(
            coarse / fine >= 3.8,
            "O(h^2) halving should cut error ~4x, got {coarse} -> {fine}"
        );
    }

    #[test]
    fn equilibrium_residual_cases() {
        let x = linspace(-4.0, 4.0, 801);
        // constant amplitude
        let flat: Vec<Complex64> = x.iter().map(|_| Complex64::new(0.8, 0.0)).collect();
        assert!(equilibrium_residual(&x, &flat).unwrap() < 1e-14);
        // pure phase, constant modulus
        let phase: Vec<Complex64> = x
            .iter()
            .map(|&xi| Complex64::from_polar(1.0, 3.0 * xi))
            .collect();
        assert!(equilibrium_residual(&x, &phase).unwrap() < 1e-12);
        // Gaussian density profile e^{-x^2/b^2}: residual max is the max
        // slope of the density, sqrt(2)/b e^{-1/2} (finite-difference oracle)
        let b = 1.0_f64;
        let gauss: Vec<Complex64> = x
            .iter()
            .map(|&xi| Complex64::new((-xi * xi / (2.0 * b * b)).exp(), 0.0))
            .collect();
        let r = equilibrium_residual(&x, &gauss).unwrap();
        let expected = (2.0_f64).sqrt() / b * (-0.5_f64).exp();
        assert_relative_eq!(r, expected, max_relative = 1e-3);
    }

    proptest! {
        #[test]
        fn residual_is_phase_invariant(theta in 0.0_f64..std::f64::consts::TAU) {
            let x = linspace(-2.0, 2.0, 201);
            let field: Vec<Complex64> = x
                .iter()
                .map(|&xi| Complex64::new((-xi * xi).exp(), 0.3 * xi))
                .collect();
            let rotated: Vec<Complex64> = field
                .iter()
                .map(|v| v * Complex64::from_polar(1.0, theta))
                .collect();
            let a = equilibrium_residual(&x, &field).unwrap();
            let b = equilibrium_residual(&x, &rotated).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }
}
