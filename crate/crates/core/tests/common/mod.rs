//! Shared oracle helpers for the integration suites: finite-difference
//! derivative estimates, quasi-random point sets and a characteristic
//! polynomial eigenvalue solver, all independent of the jet path they
//! cross-check.

#![allow(dead_code)]

use ivri_core::rates::{self, Gate};

/// Golden-ratio quasi-random points on `[lo, hi]`, skipping windows of
/// half-width `excl` around the listed centers.
pub fn quasi_random_points(n: usize, lo: f64, hi: f64, exclude: &[f64], excl: f64) -> Vec<f64> {
    const PHI: f64 = 0.618_033_988_749_894_9;
    (1..=n)
        .map(|i| lo + (hi - lo) * ((i as f64 * PHI) % 1.0))
        .filter(|v| exclude.iter().all(|c| (v - c).abs() >= excl))
        .collect()
}

/// Plain central stencils for k = 1, 2.
pub fn fd_central(f: &dyn Fn(f64) -> f64, v: f64, h: f64, k: usize) -> f64 {
    match k {
        1 => (f(v + h) - f(v - h)) / (2.0 * h),
        2 => (f(v + h) - 2.0 * f(v) + f(v - h)) / (h * h),
        3 => (f(v + 2.0 * h) - 2.0 * f(v + h) + 2.0 * f(v - h) - f(v - 2.0 * h)) / (2.0 * h * h * h),
        4 => {
            (f(v + 2.0 * h) - 4.0 * f(v + h) + 6.0 * f(v) - 4.0 * f(v - h) + f(v - 2.0 * h))
                / (h * h * h * h)
        }
        _ => panic!("unsupported derivative order {k}"),
    }
}

/// One Richardson extrapolation of the central stencil, cancelling the
/// leading h^2 truncation term; needed to resolve 3rd and 4th derivatives
/// at double precision.
pub fn fd_richardson(f: &dyn Fn(f64) -> f64, v: f64, h: f64, k: usize) -> f64 {
    (4.0 * fd_central(f, v, h, k) - fd_central(f, v, 2.0 * h, k)) / 3.0
}

/// Step factors per derivative order, multiplied by the function's length
/// scale; near the f64 optimum for the stencils above.
pub const FD_STEP_FACTORS: [f64; 4] = [1e-5, 2.4e-4, 2e-2, 2.4e-2];

/// Name, scalar evaluator, characteristic voltage scale (mV), gate and
/// whether this is the opening rate.
pub type RateEntry = (&'static str, Box<dyn Fn(f64) -> f64>, f64, Gate, bool);

/// The six rate functions with their characteristic voltage scales.
pub fn rate_table() -> Vec<RateEntry> {
    vec![
        ("alpha_n", Box::new(|v| rates::alpha(Gate::N, v)) as Box<dyn Fn(f64) -> f64>, 10.0, Gate::N, true),
        ("beta_n", Box::new(|v| rates::beta(Gate::N, v)), 80.0, Gate::N, false),
        ("alpha_m", Box::new(|v| rates::alpha(Gate::M, v)), 10.0, Gate::M, true),
        ("beta_m", Box::new(|v| rates::beta(Gate::M, v)), 18.0, Gate::M, false),
        ("alpha_h", Box::new(|v| rates::alpha(Gate::H, v)), 20.0, Gate::H, true),
        ("beta_h", Box::new(|v| rates::beta(Gate::H, v)), 10.0, Gate::H, false),
    ]
}

/// Checks jet derivatives of all six rates against the finite-difference
/// oracle at `n` quasi-random points; returns the worst mixed-relative
/// error observed. Tolerance floor per point: the natural derivative
/// magnitude `|f(v)| / L^k`.
pub fn worst_rate_fd_error(n: usize) -> f64 {
    let pts = quasi_random_points(n, -20.0, 110.0, &[10.0, 25.0], 0.5);
    let mut worst = 0.0f64;
    for (_name, f, scale, gate, is_alpha) in rate_table() {
        for v in &pts {
            let (aj, bj) = rates::rate_jet(gate, *v, 4);
            let jet = if is_alpha { aj } else { bj };
            for k in 1..=4usize {
                let h = FD_STEP_FACTORS[k - 1] * scale;
                let fd = if k <= 2 {
                    fd_central(f.as_ref(), *v, h, k)
                } else {
                    fd_richardson(f.as_ref(), *v, h, k)
                };
                let exact = jet.derivative(k);
                let floor = f(*v).abs() / scale.powi(k as i32);
                let err = (fd - exact).abs() / exact.abs().max(floor);
                worst = worst.max(err);
            }
        }
    }
    worst
}

/// Characteristic polynomial coefficients of a square matrix by the
/// Faddeev-LeVerrier recurrence: `p(x) = x^n + c[0] x^(n-1) + ... + c[n-1]`.
pub fn characteristic_polynomial(a: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = Vec::with_capacity(n);
    let mut m = a.clone(); // M_1 = A
    let mut c = -m.trace(); // c_1
    coeffs.push(c);
    for k in 2..=n {
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] += c;
        }
        m = a * shifted; // M_k = A (M_{k-1} + c_{k-1} I)
        c = -m.trace() / k as f64;
        coeffs.push(c);
    }
    coeffs
}

/// Roots of a monic polynomial by Durand-Kerner iteration (complex).
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<nalgebra::Complex<f64>> {
    use nalgebra::Complex;
    let n = coeffs.len();
    let eval = |z: Complex<f64>| {
        let mut acc = Complex::new(1.0, 0.0);
        for c in coeffs {
            acc = acc * z + Complex::new(*c, 0.0);
        }
        acc
    };
    // Deterministic non-real starting points.
    let mut roots: Vec<Complex<f64>> = (0..n)
        .map(|k| Complex::new(0.4, 0.9).powu(k as u32 + 1))
        .collect();
    for _ in 0..200 {
        let mut shift = 0.0f64;
        for i in 0..n {
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            shift = shift.max(delta.norm());
        }
        if shift < 1e-13 {
            break;
        }
    }
    roots
}
