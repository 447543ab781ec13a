//! Scalar special functions and quadrature nodes.
//!
//! Gamma-function ratios appearing in moment formulas are always of the form
//! Gamma(x+n)/Gamma(x), so they are evaluated as Pochhammer products instead
//! of going through log-Gamma.

/// Rising factorial x (x+1) ... (x+n-1).
pub fn pochhammer(x: f64, n: usize) -> f64 {
    let mut acc = 1.0;
    for j in 0..n {
        acc *= x + j as f64;
    }
    acc
}

/// (2n-1)!! with (-1)!! = 1.
pub fn double_factorial_odd(n: usize) -> f64 {
    let mut acc = 1.0;
    let mut k = 2 * n as i64 - 1;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Exponential remainder E_n(w) = e^w - sum_{j<n} w^j/j!.
///
/// Series branch for small |w| avoids the cancellation between e^w and the
/// Taylor polynomial; the direct branch is safe elsewhere because the
/// polynomial terms dominate.
pub fn exp_remainder(n: usize, w: f64) -> f64 {
    if n == 0 {
        return w.exp();
    }
    if w.abs() <= 1.0 {
        // sum_{j>=n} w^j / j!
        let mut term = w.powi(n as i32) / factorial(n);
        let mut acc = term;
        let mut j = n;
        loop {
            j += 1;
            term *= w / j as f64;
            let next = acc + term;
            if (next - acc).abs() <= f64::EPSILON * acc.abs() || j > n + 60 {
                acc = next;
                break;
            }
            acc = next;
        }
        acc
    } else {
        let mut poly = 0.0;
        let mut term = 1.0;
        for j in 0..n {
            if j > 0 {
                term *= w / j as f64;
            }
            poly += term;
        }
        w.exp() - poly
    }
}

/// Modified Bessel function K_nu(z) for z > 0, nu >= 0.
///
/// Trapezoidal evaluation of int_0^inf exp(-z cosh t) cosh(nu t) dt. The
/// integrand decays double-exponentially, so a fixed step reaches near
/// machine accuracy.
pub fn bessel_k(nu: f64, z: f64) -> f64 {
    assert!(z > 0.0, "bessel_k requires z > 0");
    assert!(nu >= 0.0, "bessel_k requires nu >= 0");
    if z > 700.0 {
        return 0.0; // underflow of exp(-z)
    }
    let h = 1.0e-2;
    let mut acc = 0.5 * (-z).exp(); // t = 0 term
    let mut t = h;
    loop {
        let term = (-z * t.cosh()).exp() * (nu * t).cosh();
        acc += term;
        if term < acc * 1e-18 && t > 1.0 {
            break;
        }
        t += h;
        if t > 500.0 {
            break;
        }
    }
    acc * h
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Hermite nodes and weights for weight exp(-x^2) on the real line.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let sqrt_pi = std::f64::consts::PI.sqrt();
    for i in 0..(n + 1) / 2 {
        // Initial guesses per Numerical Recipes ordering (largest root first).
        let mut x = match i {
            0 => ((2 * n + 1) as f64).sqrt() - 1.85575 * ((2 * n + 1) as f64).powf(-1.0 / 6.0),
            1 => nodes[n - 1] - 1.14 * (n as f64).powf(0.426) / nodes[n - 1],
            2 => 1.86 * nodes[n - 1] - 0.86 * nodes[n - 2],
            3 => 1.91 * nodes[n - 2] - 0.91 * nodes[n - 3],
            _ => 2.0 * nodes[n - i] - nodes[n - i + 1],
        };
        let mut dp = 0.0;
        for _ in 0..200 {
            // Orthonormal Hermite recurrence.
            let mut h0 = 1.0 / sqrt_pi.sqrt();
            let mut h1 = x * (2.0f64).sqrt() / sqrt_pi.sqrt();
            for k in 2..=n {
                let kf = k as f64;
                let h2 = x * (2.0 / kf).sqrt() * h1 - ((kf - 1.0) / kf).sqrt() * h0;
                h0 = h1;
                h1 = h2;
            }
            dp = (2.0 * n as f64).sqrt() * h0;
            let dx = h1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        let w = 2.0 / (dp * dp);
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        // Center node is exactly zero.
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Chebyshev (second kind) nodes and weights for weight sqrt(1-u^2)
/// on [-1, 1]; exact for polynomials of degree <= 2n-1.
pub fn gauss_chebyshev2(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 1..=n {
        let th = k as f64 * std::f64::consts::PI / (n as f64 + 1.0);
        nodes.push(th.cos());
        weights.push(std::f64::consts::PI / (n as f64 + 1.0) * th.sin() * th.sin());
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pochhammer_gamma_ratios() {
        // Gamma(3.5)/Gamma(1.5) = 1.5 * 2.5 = 3.75
        assert_relative_eq!(pochhammer(1.5, 2), 3.75);
        assert_relative_eq!(pochhammer(2.0, 3), 24.0);
        assert_relative_eq!(pochhammer(0.5, 0), 1.0);
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial_odd(0), 1.0);
        assert_eq!(double_factorial_odd(1), 1.0);
        assert_eq!(double_factorial_odd(2), 3.0);
        assert_eq!(double_factorial_odd(4), 105.0);
    }

    #[test]
    fn exp_remainder_small_and_large() {
        // E_2(w) = e^w - 1 - w
        for &w in &[-0.3, 0.7, -4.0, 12.0] {
            let direct = w.exp() - 1.0 - w;
            assert_relative_eq!(exp_remainder(2, w), direct, max_relative = 1e-12);
        }
        // tiny argument: series value ~ w^2/2
        let w = 1e-8;
        assert_relative_eq!(exp_remainder(2, w), w * w / 2.0, max_relative = 1e-6);
    }

    #[test]
    fn bessel_k_half_integer_closed_forms() {
        // K_{1/2}(z) = sqrt(pi/(2z)) e^{-z}
        for &z in &[0.3, 1.0, 2.5, 7.0, 20.0] {
            let exact = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp();
            assert_relative_eq!(bessel_k(0.5, z), exact, max_relative = 1e-12);
            // K_{3/2}(z) = K_{1/2}(z) (1 + 1/z)
            assert_relative_eq!(
                bessel_k(1.5, z),
                exact * (1.0 + 1.0 / z),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn bessel_k_known_values() {
        // Reference values (Abramowitz & Stegun / mpmath, 15 digits).
        assert_relative_eq!(bessel_k(0.0, 1.0), 0.421024438240708, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(1.0, 1.0), 0.601907230197235, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(0.0, 5.0), 3.691098334042594e-3, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(2.0, 3.0), 6.151045847174205e-2, max_relative = 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        // int_{-1}^{1} u^6 du = 2/7
        let v: f64 = x.iter().zip(&w).map(|(&u, &w)| w * u.powi(6)).sum();
        assert_relative_eq!(v, 2.0 / 7.0, max_relative = 1e-13);
        let s: f64 = w.iter().sum();
        assert_relative_eq!(s, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_hermite_moments() {
        let (x, w) = gauss_hermite(30);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let m0: f64 = w.iter().sum();
        assert_relative_eq!(m0, sqrt_pi, max_relative = 1e-12);
        let m2: f64 = x.iter().zip(&w).map(|(&u, &w)| w * u * u).sum();
        assert_relative_eq!(m2, sqrt_pi / 2.0, max_relative = 1e-12);
        let m4: f64 = x.iter().zip(&w).map(|(&u, &w)| w * u.powi(4)).sum();
        assert_relative_eq!(m4, sqrt_pi * 0.75, max_relative = 1e-12);
    }

    #[test]
    fn chebyshev2_moments() {
        let (x, w) = gauss_chebyshev2(10);
        // int sqrt(1-u^2) du = pi/2 ; int u^2 sqrt(1-u^2) du = pi/8
        let m0: f64 = w.iter().sum();
        assert_relative_eq!(m0, std::f64::consts::PI / 2.0, max_relative = 1e-13);
        let m2: f64 = x.iter().zip(&w).map(|(&u, &w)| w * u * u).sum();
        assert_relative_eq!(m2, std::f64::consts::PI / 8.0, max_relative = 1e-13);
    }
}
