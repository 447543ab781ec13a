//! Averages of matrix-valued functions over the unit sphere S^{m-1}.
//!
//! For m <= 4 a product-angle rule is used (trapezoid in the azimuth,
//! Gauss-Legendre / Gauss-Chebyshev in the polar angles); it is exact for
//! polynomial integrands of degree below the rule order. For m >= 4 a seeded
//! antithetic Monte Carlo estimator is also provided.

use crate::linalg::Mat;
use crate::special::{gauss_chebyshev2, gauss_legendre};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Nodes and weights of a product rule on S^{m-1}, weights summing to one.
/// Exact for polynomials of degree <= 2 * order - 1. Supports m in 2..=4.
pub fn sphere_rule(m: usize, order: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    assert!((2..=4).contains(&m), "product rule implemented for m in 2..=4");
    let k_phi = 2 * order + 2;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    match m {
        2 => {
            for k in 0..k_phi {
                let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / k_phi as f64;
                nodes.push(vec![phi.cos(), phi.sin()]);
                weights.push(1.0 / k_phi as f64);
            }
        }
        3 => {
            let (u, wu) = gauss_legendre(order);
            for (ui, &cu) in u.iter().enumerate() {
                let su = (1.0 - cu * cu).sqrt();
                for k in 0..k_phi {
                    let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / k_phi as f64;
                    nodes.push(vec![cu, su * phi.cos(), su * phi.sin()]);
                    weights.push(wu[ui] / (2.0 * k_phi as f64));
                }
            }
        }
        4 => {
            let (v, wv) = gauss_chebyshev2(order);
            let (u, wu) = gauss_legendre(order);
            let mut total = 0.0;
            for (vi, &cv) in v.iter().enumerate() {
                let sv = (1.0 - cv * cv).sqrt();
                for (ui, &cu) in u.iter().enumerate() {
                    let su = (1.0 - cu * cu).sqrt();
                    for k in 0..k_phi {
                        let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / k_phi as f64;
                        nodes.push(vec![cv, sv * cu, sv * su * phi.cos(), sv * su * phi.sin()]);
                        let w = wv[vi] * wu[ui];
                        weights.push(w);
                        total += w;
                    }
                }
            }
            for w in &mut weights {
                *w /= total;
            }
        }
        _ => unreachable!(),
    }
    (nodes, weights)
}

/// Deterministic sphere average of a matrix-valued function, m in 2..=4.
pub fn sphere_average<F>(m: usize, d: usize, order: usize, f: F) -> Mat
where
    F: Fn(&[f64]) -> Mat + Sync,
{
    let (nodes, weights) = sphere_rule(m, order);
    let partials: Vec<Mat> = nodes
        .par_iter()
        .zip(weights.par_iter())
        .map(|(x, &w)| f(x) * w)
        .collect();
    let mut acc = Mat::zeros(d, d);
    for p in partials {
        acc += p;
    }
    acc
}

/// Antithetic Monte Carlo sphere average with entrywise standard errors of
/// the mean. Deterministic for a fixed seed: samples are generated in
/// chunks whose partial sums are reduced in index order.
pub fn sphere_average_mc<F>(
    m: usize,
    d: usize,
    samples: usize,
    seed: u64,
    f: F,
) -> (Mat, Mat)
where
    F: Fn(&[f64]) -> Mat + Sync,
{
    let pairs = samples / 2;
    let chunk = 4096usize;
    let n_chunks = pairs.div_ceil(chunk);
    let results: Vec<(Mat, Mat, usize)> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(ci as u64));
            let lo = ci * chunk;
            let hi = ((ci + 1) * chunk).min(pairs);
            let mut sum = Mat::zeros(d, d);
            let mut sum2 = Mat::zeros(d, d);
            let mut xi = vec![0.0f64; m];
            for _ in lo..hi {
                loop {
                    let mut norm2 = 0.0;
                    for x in xi.iter_mut() {
                        *x = rng.sample(StandardNormal);
                        norm2 += *x * *x;
                    }
                    if norm2 > 1e-12 {
                        let n = norm2.sqrt();
                        for x in xi.iter_mut() {
                            *x /= n;
                        }
                        break;
                    }
                }
                let fp = f(&xi);
                let xin: Vec<f64> = xi.iter().map(|&x| -x).collect();
                let fn_ = f(&xin);
                let avg = (fp + fn_) * 0.5;
                for i in 0..d {
                    for j in 0..d {
                        sum[(i, j)] += avg[(i, j)];
                        sum2[(i, j)] += avg[(i, j)] * avg[(i, j)];
                    }
                }
            }
            (sum, sum2, hi - lo)
        })
        .collect();
    let mut sum = Mat::zeros(d, d);
    let mut sum2 = Mat::zeros(d, d);
    let mut count = 0usize;
    for (s, s2, c) in results {
        sum += s;
        sum2 += s2;
        count += c;
    }
    let mean = &sum / count as f64;
    let mut se = Mat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let var = (sum2[(i, j)] / count as f64 - mean[(i, j)] * mean[(i, j)]).max(0.0);
            se[(i, j)] = (var / count as f64).sqrt();
        }
    }
    (mean, se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar(f: f64) -> Mat {
        Mat::from_element(1, 1, f)
    }

    #[test]
    fn constant_and_odd_functions() {
        for m in 2..=4usize {
            let avg = sphere_average(m, 1, 8, |_| scalar(3.5));
            assert_relative_eq!(avg[(0, 0)], 3.5, max_relative = 1e-14);
            let odd = sphere_average(m, 1, 8, |x| scalar(x[0]));
            assert!(odd[(0, 0)].abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_moments() {
        // <xihat_i xihat_j> = delta_ij / m
        for m in 2..=4usize {
            for i in 0..m {
                let avg = sphere_average(m, 1, 8, |x| scalar(x[i] * x[i]));
                assert_relative_eq!(avg[(0, 0)], 1.0 / m as f64, max_relative = 1e-13);
            }
            let avg = sphere_average(m, 1, 8, |x| scalar(x[0] * x[1]));
            assert!(avg[(0, 0)].abs() < 1e-14);
        }
    }

    #[test]
    fn quartic_moments_match_moment_tensor() {
        // <xihat_0^4> = 3 / (m (m+2))
        for m in 2..=4usize {
            let avg = sphere_average(m, 1, 10, |x| scalar(x[0].powi(4)));
            let expect = 3.0 / (m as f64 * (m as f64 + 2.0));
            assert_relative_eq!(avg[(0, 0)], expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn monte_carlo_within_bands() {
        let m = 4usize;
        let (mean, se) = sphere_average_mc(m, 1, 80_000, 3, |x| scalar(x[0] * x[0]));
        let exact = 1.0 / m as f64;
        assert!(
            (mean[(0, 0)] - exact).abs() <= 4.0 * se[(0, 0)] + 1e-12,
            "mc {} exact {} se {}",
            mean[(0, 0)],
            exact,
            se[(0, 0)]
        );
    }
}
