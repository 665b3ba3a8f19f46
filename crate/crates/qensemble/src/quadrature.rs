//! Gauss-Legendre quadrature.
//!
//! Nodes and weights are computed by Newton iteration on the Legendre
//! recurrence, which is accurate to machine precision for the orders used
//! here (tens to a few thousand).

/// Default order used by the density integrators.
pub const DEFAULT_ORDER: usize = 64;

/// A Gauss-Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build a rule with `order` nodes (`order >= 1`).
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th root of P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrate `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        half * acc
    }

    /// Integrate a complex-valued `f` over [a, b].
    pub fn integrate_complex<F>(&self, a: f64, b: f64, mut f: F) -> num_complex::Complex64
    where
        F: FnMut(f64) -> num_complex::Complex64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * w;
        }
        acc * half
    }

    /// Integrate `f` over [a, b] with the closed subintervals in `deleted`
    /// removed. Deletions are assumed disjoint and sorted.
    pub fn integrate_with_deletions<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        deleted: &[(f64, f64)],
        mut f: F,
    ) -> f64 {
        let mut acc = 0.0;
        let mut lo = a;
        for &(d_lo, d_hi) in deleted {
            let d_lo = d_lo.max(a);
            let d_hi = d_hi.min(b);
            if d_hi <= lo {
                continue;
            }
            if d_lo > lo {
                acc += self.integrate(lo, d_lo.min(b), &mut f);
            }
            lo = lo.max(d_hi);
            if lo >= b {
                return acc;
            }
        }
        if lo < b {
            acc += self.integrate(lo, b, &mut f);
        }
        acc
    }
}

/// Legendre polynomial P_n and its derivative at `x`.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Trapezoidal integral of samples `y` on (possibly non-uniform) grid `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    acc
}
