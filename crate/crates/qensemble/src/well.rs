//! Ensemble treatment of the 1D square potential well.
//!
//! Every interior wave number k1 in [0, k0] pairs with an exterior decay
//! constant k2 through k1^2 + k2^2 = m V0 / hbar^2. Members are even
//! cosine solutions matched to exponential tails at the walls; the
//! ensemble density integrates their squares over the allowed k ranges
//! and renormalizes.

use crate::ensemble::EnsembleDensity;
use crate::error::{Error, Result};
use crate::quadrature::{trapezoid, GaussLegendre, DEFAULT_ORDER};

/// Geometry and particle parameters of the well: V = 0 for |x| <= x0,
/// V = V0 outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellGeometry {
    /// Half-width of the well (m).
    pub x0: f64,
    /// Barrier height (J).
    pub v0: f64,
    /// Particle mass (kg).
    pub mass: f64,
    /// Reduced Planck constant (J s); 1 for nondimensional runs.
    pub hbar: f64,
}

impl WellGeometry {
    pub fn new(x0: f64, v0: f64, mass: f64, hbar: f64) -> Result<Self> {
        if !(x0 > 0.0 && v0 > 0.0 && mass > 0.0 && hbar > 0.0) {
            return Err(Error::Domain(format!(
                "well parameters must be positive: x0 = {x0}, V0 = {v0}, m = {mass}, hbar = {hbar}"
            )));
        }
        Ok(Self { x0, v0, mass, hbar })
    }

    /// m V0 / hbar^2, the square of the total wave-number budget.
    pub fn k_total_sq(&self) -> f64 {
        self.mass * self.v0 / (self.hbar * self.hbar)
    }
}

/// One member of the well ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellMember {
    /// Interior wave number (1/m).
    pub k1: f64,
    /// Exterior decay constant (1/m).
    pub k2: f64,
    /// Amplitude from the closed-form normalization.
    pub phi0: f64,
}

impl WellMember {
    /// Build the member for interior wave number `k1`, deriving its
    /// partner decay constant and closed-form amplitude.
    pub fn for_k1(k1: f64, g: &WellGeometry) -> Result<Self> {
        let k2 = partner_k(k1, g)?;
        let phi0 = member_amplitude(k1, k2, g)?;
        Ok(Self { k1, k2, phi0 })
    }
}

/// Exterior decay constant paired with interior wave number `k1`:
/// k2 = sqrt(m V0 / hbar^2 - k1^2). Involutive on [0, sqrt(m V0)/hbar].
pub fn partner_k(k1: f64, g: &WellGeometry) -> Result<f64> {
    let kt_sq = g.k_total_sq();
    if !(k1 >= 0.0) || k1 * k1 > kt_sq * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "k1 = {k1} outside [0, {}]",
            kt_sq.sqrt()
        )));
    }
    Ok((kt_sq - k1 * k1).max(0.0).sqrt())
}

/// Closed-form member amplitude
/// sqrt(m k2 / (1 + k2 x0)) e^{k2 x0} cos(k1 x0).
///
/// Flagged when cos(k1 x0) <= 0: the formula then returns a zero or
/// negative amplitude, which has no normalization reading.
pub fn member_amplitude(k1: f64, k2: f64, g: &WellGeometry) -> Result<f64> {
    let c = (k1 * g.x0).cos();
    let value = (g.mass * k2 / (1.0 + k2 * g.x0)).sqrt() * (k2 * g.x0).exp() * c;
    if c <= 0.0 {
        return Err(Error::FlaggedAmplitude { k1, value });
    }
    Ok(value)
}

/// Amplitude fixed by numerically normalizing int |phi|^2 dx = m.
///
/// The interior piece is integrated by quadrature; the exponential tails
/// are summed in closed form.
pub fn normalization_amplitude(k1: f64, g: &WellGeometry, order: usize) -> Result<f64> {
    let k2 = partner_k(k1, g)?;
    let c = (k1 * g.x0).cos();
    if c.abs() < 1e-12 {
        return Err(Error::SingularMember { k1 });
    }
    let rule = GaussLegendre::new(order);
    let interior_scale = (-2.0 * k2 * g.x0).exp() / (c * c);
    let i_in = rule.integrate(-g.x0, g.x0, |x| {
        let cc = (k1 * x).cos();
        interior_scale * cc * cc
    });
    let i_out = if k2 > 0.0 {
        (-2.0 * k2 * g.x0).exp() / k2
    } else {
        return Err(Error::Domain("k2 = 0 member is not normalizable".into()));
    };
    Ok((g.mass / (i_in + i_out)).sqrt())
}

/// Member wave function: phi0 e^{k2 x} left of the well,
/// phi0 e^{-k2 x0} cos(k1 x)/cos(k1 x0) inside, phi0 e^{-k2 x} right.
pub fn member_wavefunction(member: &WellMember, g: &WellGeometry, x: f64) -> Result<f64> {
    let c = (member.k1 * g.x0).cos();
    if c.abs() < 1e-12 {
        return Err(Error::SingularMember { k1: member.k1 });
    }
    let value = if x < -g.x0 {
        member.phi0 * (member.k2 * x).exp()
    } else if x > g.x0 {
        member.phi0 * (-member.k2 * x).exp()
    } else {
        member.phi0 * (-member.k2 * g.x0).exp() * (member.k1 * x).cos() / c
    };
    Ok(value)
}

/// How the exterior k integration is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WellIntegrationMode {
    /// Interior over k1 in [0, sqrt(m E)/hbar] and exterior over an
    /// independent k2 in [0, sqrt(m (V0 - E))/hbar].
    #[default]
    IndependentRanges,
    /// Exterior contribution driven by the same k1 range with
    /// k2 = partner(k1), for comparison.
    PairedRange,
}

/// Squared member amplitude combined with the interior profile; the
/// cos(k1 x0) factors of amplitude and wave function cancel exactly, so
/// the integrand is regular:
/// |phi(x)|^2 = m k2 / (1 + k2 x0) cos^2(k1 x) for |x| <= x0.
fn interior_integrand(k1: f64, x: f64, g: &WellGeometry) -> f64 {
    let k2 = (g.k_total_sq() - k1 * k1).max(0.0).sqrt();
    g.mass * k2 / (1.0 + k2 * g.x0) * (k1 * x).cos().powi(2)
}

/// |phi(x)|^2 outside the well for a member indexed by its decay
/// constant: m k2 / (1 + k2 x0) cos^2(k1(k2) x0) e^{-2 k2 (|x| - x0)}.
fn exterior_integrand(k2: f64, x_abs: f64, g: &WellGeometry) -> f64 {
    let k1 = (g.k_total_sq() - k2 * k2).max(0.0).sqrt();
    g.mass * k2 / (1.0 + k2 * g.x0)
        * (k1 * g.x0).cos().powi(2)
        * (-2.0 * k2 * (x_abs - g.x0)).exp()
}

/// Deletion intervals around the zeros of cos(k1 x0) within [0, k_hi],
/// each of total width 1e-6 * k_hi.
fn singular_deletions(g: &WellGeometry, k_hi: f64) -> Vec<(f64, f64)> {
    let mut zones = Vec::new();
    if k_hi <= 0.0 {
        return zones;
    }
    let half = 0.5e-6 * k_hi;
    let mut j = 0u32;
    loop {
        let k_star = (j as f64 + 0.5) * std::f64::consts::PI / g.x0;
        if k_star > k_hi + half {
            break;
        }
        zones.push((k_star - half, k_star + half));
        j += 1;
    }
    zones
}

/// Map interior deletion zones to the exterior variable k2 = partner(k1).
fn exterior_deletions(g: &WellGeometry, k2_hi: f64) -> Vec<(f64, f64)> {
    let kt_sq = g.k_total_sq();
    let mut zones: Vec<(f64, f64)> = singular_deletions(g, kt_sq.sqrt())
        .into_iter()
        .filter_map(|(lo, hi)| {
            let map = |k1: f64| (kt_sq - k1 * k1).max(0.0).sqrt();
            let (a, b) = (map(hi), map(lo));
            (a <= k2_hi).then_some((a, b.min(k2_hi)))
        })
        .collect();
    zones.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    zones
}

/// Unnormalized ensemble density at `x`.
fn raw_density(
    g: &WellGeometry,
    k0: f64,
    k0_prime: f64,
    x: f64,
    mode: WellIntegrationMode,
    rule: &GaussLegendre,
) -> f64 {
    let x_abs = x.abs();
    if x_abs <= g.x0 {
        let zones = singular_deletions(g, k0);
        rule.integrate_with_deletions(0.0, k0, &zones, |k1| interior_integrand(k1, x, g))
    } else {
        match mode {
            WellIntegrationMode::IndependentRanges => {
                let zones = exterior_deletions(g, k0_prime);
                rule.integrate_with_deletions(0.0, k0_prime, &zones, |k2| {
                    exterior_integrand(k2, x_abs, g)
                })
            }
            WellIntegrationMode::PairedRange => {
                let zones = singular_deletions(g, k0);
                rule.integrate_with_deletions(0.0, k0, &zones, |k1| {
                    let k2 = (g.k_total_sq() - k1 * k1).max(0.0).sqrt();
                    exterior_integrand(k2, x_abs, g)
                })
            }
        }
    }
}

/// Ensemble probability density of the well on `grid`, renormalized so
/// the density integrates to 1 over the grid's extent.
///
/// Requires the bound regime 0 < E_T < V0.
pub fn well_ensemble_density(
    g: &WellGeometry,
    e_total: f64,
    grid: &[f64],
    mode: WellIntegrationMode,
) -> Result<EnsembleDensity> {
    well_ensemble_density_with_order(g, e_total, grid, mode, DEFAULT_ORDER)
}

/// Same as [`well_ensemble_density`] with an explicit quadrature order.
pub fn well_ensemble_density_with_order(
    g: &WellGeometry,
    e_total: f64,
    grid: &[f64],
    mode: WellIntegrationMode,
    order: usize,
) -> Result<EnsembleDensity> {
    if !(e_total > 0.0 && e_total < g.v0) {
        return Err(Error::UnsupportedRegime(format!(
            "bound regime needs 0 < E_T < V0, got E_T = {e_total}, V0 = {}",
            g.v0
        )));
    }
    if grid.len() < 2 {
        return Err(Error::Domain("density grid needs at least two points".into()));
    }
    let k0 = (g.mass * e_total).sqrt() / g.hbar;
    let k0_prime = (g.mass * (g.v0 - e_total)).sqrt() / g.hbar;
    let rule = GaussLegendre::new(order);

    let raw: Vec<f64> = grid
        .iter()
        .map(|&x| raw_density(g, k0, k0_prime, x, mode, &rule))
        .collect();

    let norm = density_norm(g, k0, k0_prime, grid[0], *grid.last().unwrap(), mode, &rule);
    if !(norm > 0.0) {
        return Err(Error::Domain("density normalization vanished".into()));
    }
    Ok(EnsembleDensity {
        grid: grid.to_vec(),
        w: raw.iter().map(|&v| v / norm).collect(),
        rho_bar: 1.0 / norm,
    })
}

/// Integral of the unnormalized density over [x_lo, x_hi], split at the
/// well walls so each piece is smooth.
fn density_norm(
    g: &WellGeometry,
    k0: f64,
    k0_prime: f64,
    x_lo: f64,
    x_hi: f64,
    mode: WellIntegrationMode,
    rule: &GaussLegendre,
) -> f64 {
    let mut edges = vec![x_lo];
    for wall in [-g.x0, g.x0] {
        if wall > x_lo && wall < x_hi {
            edges.push(wall);
        }
    }
    edges.push(x_hi);
    edges
        .windows(2)
        .map(|e| rule.integrate(e[0], e[1], |x| raw_density(g, k0, k0_prime, x, mode, rule)))
        .sum()
}

/// Relative deviation between the closed-form amplitude and the
/// numerically normalized one for the same member.
pub fn amplitude_deviation(k1: f64, g: &WellGeometry) -> Result<f64> {
    let k2 = partner_k(k1, g)?;
    let formula = member_amplitude(k1, k2, g)?;
    let numeric = normalization_amplitude(k1, g, 128)?;
    Ok((formula - numeric).abs() / numeric)
}
