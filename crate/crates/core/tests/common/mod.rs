//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

const I_PI: Complex64 = Complex64::new(0.0, PI);

fn log(z: Complex64) -> Complex64 {
    let l = z.ln();
    if l.im <= -PI {
        Complex64::new(l.re, PI)
    } else {
        l
    }
}

/// Tanh-sinh quadrature of a complex integrand over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    let re = quadrature::double_exponential::integrate(|s| f(s).re, a, b, tol);
    let im = quadrature::double_exponential::integrate(|s| f(s).im, a, b, tol);
    Complex64::new(re.integral, im.integral)
}

/// `H(u) = 1/24 + (1/8π²) ∫₀ᵘ (log(1−t)/t + log t/(1−t)) dt` by quadrature.
pub fn h_by_quadrature(u: f64) -> f64 {
    let integrand = |t: f64| Complex64::new((1.0 - t).ln() / t + t.ln() / (1.0 - t), 0.0);
    1.0 / 24.0 + integrate(integrand, 0.0, u, 1e-14).re / (8.0 * PI * PI)
}

/// A point of the flattening surface reached by continuation: the shape and
/// the continuously tracked logarithms `l₁ = log z`, `l₂ = −log(1 − z)`.
#[derive(Clone, Copy, Debug)]
pub struct Tracked {
    pub z: Complex64,
    pub l1: Complex64,
    pub l2: Complex64,
    pub value: Complex64,
}

impl Tracked {
    /// The real branch at `u = 1/2`, where the value is `H(1/2) = 1/48`.
    pub fn base() -> Self {
        Tracked {
            z: Complex64::new(2.0, 0.0),
            l1: Complex64::new(2f64.ln(), 0.0),
            l2: I_PI,
            value: Complex64::new(1.0 / 48.0, 0.0),
        }
    }

    /// Moves along a straight segment that avoids 0 and 1, integrating
    /// `(l₂ dl₁ − l₁ dl₂ − iπ dl₁) / 8π²` when `integrate_value` is set.
    fn segment(self, to: Complex64, integrate_value: bool) -> Self {
        let (from, l1a, l2a) = (self.z, self.l1, self.l2);
        let dz = to - from;
        let at = |s: f64| {
            let z = from + dz * s;
            (z, l1a + log(z / from), l2a - log((1.0 - z) / (1.0 - from)))
        };
        let value = if integrate_value {
            let integrand = |s: f64| {
                let (z, l1, l2) = at(s);
                ((l2 - I_PI) / z - l1 / (1.0 - z)) * dz / (8.0 * PI * PI)
            };
            self.value + integrate(integrand, 0.0, 1.0, 1e-13)
        } else {
            self.value
        };
        let (_, l1, l2) = at(1.0);
        Tracked { z: to, l1, l2, value }
    }

    fn polyline(mut self, points: &[Complex64], integrate_value: bool) -> Self {
        for &p in points {
            self = self.segment(p, integrate_value);
        }
        self
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const HUB: Complex64 = Complex64::new(0.5, 1.0);

/// Counter-clockwise rectangle around 0 only, based at the hub; adds 2πi to l₁.
fn loop_around_zero(forward: bool) -> Vec<Complex64> {
    let mut pts = vec![c(-1.0, 1.0), c(-1.0, -1.0), c(0.5, -1.0), HUB];
    if !forward {
        pts = vec![c(0.5, -1.0), c(-1.0, -1.0), c(-1.0, 1.0), HUB];
    }
    pts
}

/// Counter-clockwise rectangle around 1 only, based at the hub; adds −2πi to l₂.
fn loop_around_one(forward: bool) -> Vec<Complex64> {
    let mut pts = vec![c(0.5, -1.0), c(2.0, -1.0), c(2.0, 1.0), HUB];
    if !forward {
        pts = vec![c(2.0, 1.0), c(2.0, -1.0), c(0.5, -1.0), HUB];
    }
    pts
}

/// Hub to target through the half-plane of the target.
fn approach(target: Complex64) -> Vec<Complex64> {
    if target.im >= 0.0 {
        vec![c(target.re, 5.0), target]
    } else {
        vec![c(0.5, -1.0), c(target.re, -5.0), target]
    }
}

/// Integrates the Chern–Simons differential from the real branch at `u = ½`
/// to the flattening `(z, p, q)`, with `l₁ = Log z + 2πi·p` and
/// `l₂ = −Log(1−z) + 2πi·q`. Returns the value and the tracked end point.
pub fn cs_by_path(z: Complex64, p: i64, q: i64) -> Tracked {
    let run = |loops0: i64, loops1: i64, integrate_value: bool| {
        let mut t = Tracked::base().segment(HUB, integrate_value);
        for _ in 0..loops0.abs() {
            t = t.polyline(&loop_around_zero(loops0 > 0), integrate_value);
        }
        for _ in 0..loops1.abs() {
            t = t.polyline(&loop_around_one(loops1 > 0), integrate_value);
        }
        t.polyline(&approach(z), integrate_value)
    };
    let plain = run(0, 0, false);
    let p0 = ((plain.l1 - log(z)).im / (2.0 * PI)).round() as i64;
    let q0 = ((plain.l2 + log(1.0 - z)).im / (2.0 * PI)).round() as i64;
    run(p - p0, q0 - q, true)
}

/// Clausen's function `Cl₂(θ) = Σ sin(kθ)/k²` for `0 < θ < 2π`, from
/// `Cl₂(θ) = θ − θ log θ + Σₖ ζ(2k)/(k(2k+1)) · θ (θ/2π)^{2k}`.
pub fn clausen(theta: f64) -> f64 {
    let zeta = |s: i32| -> f64 {
        if s == 2 {
            return PI * PI / 6.0;
        }
        (1..20000).map(|n| (n as f64).powi(-s)).sum()
    };
    let ratio = (theta / (2.0 * PI)).powi(2);
    let mut sum = theta - theta * theta.ln();
    let mut power = ratio;
    for k in 1..40 {
        sum += zeta(2 * k) / (k as f64 * (2 * k + 1) as f64) * theta * power;
        power *= ratio;
    }
    sum
}

/// Bloch–Wigner function on the unit circle: `D(e^{iθ}) = Cl₂(θ)`.
pub fn bloch_wigner_on_circle(theta: f64) -> f64 {
    clausen(theta)
}
