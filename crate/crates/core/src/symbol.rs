//! Leading symbol of a constant-coefficient second-order operator with
//! endomorphism-valued coefficients: evaluation, spectral decomposition into
//! eigenvalues / multiplicities / projectors, expansion coefficients of the
//! projectors in powers of the symbol, and harmonic index decomposition.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_abs_diff, sym_eigen, unit, Mat, Vect};
use crate::special::{factorial, pochhammer};
use crate::symten::{canonical_tuples, sym_power, SymTensor, DEFAULT_RANK_CAP};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Constant coefficient tensor a^{mu nu} as an m x m symmetric array of
/// d x d symmetric endomorphism blocks.
#[derive(Clone, Debug)]
pub struct LeadingSymbol {
    pub m: usize,
    pub d: usize,
    blocks: Vec<Vec<Mat>>,
}

impl LeadingSymbol {
    /// Build from blocks, symmetrizing in the index pair and checking that
    /// the quadratic form is symmetric-matrix valued.
    pub fn new(m: usize, d: usize, blocks: Vec<Vec<Mat>>) -> Result<Self> {
        if blocks.len() != m || blocks.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidInput("block array must be m x m".into()));
        }
        let mut sym_blocks: Vec<Vec<Mat>> = vec![vec![Mat::zeros(d, d); m]; m];
        for mu in 0..m {
            for nu in 0..m {
                if blocks[mu][nu].shape() != (d, d) {
                    return Err(Error::InvalidInput("blocks must be d x d".into()));
                }
                sym_blocks[mu][nu] = 0.5 * (&blocks[mu][nu] + &blocks[nu][mu]);
            }
        }
        for mu in 0..m {
            for nu in mu..m {
                let b = &sym_blocks[mu][nu];
                if crate::linalg::asymmetry(b) > 1e-10 * (1.0 + max_abs(b)) {
                    return Err(Error::InvalidInput(format!(
                        "block ({mu},{nu}) is not a symmetric endomorphism"
                    )));
                }
            }
        }
        Ok(LeadingSymbol {
            m,
            d,
            blocks: sym_blocks,
        })
    }

    /// Extract blocks from any quadratic evaluator xi -> A(xi) by
    /// polarization.
    pub fn from_quadratic<F: Fn(&[f64]) -> Mat>(m: usize, d: usize, f: F) -> Result<Self> {
        let mut blocks: Vec<Vec<Mat>> = vec![vec![Mat::zeros(d, d); m]; m];
        let mut axis = vec![0.0; m];
        let diag: Vec<Mat> = (0..m)
            .map(|mu| {
                axis.iter_mut().for_each(|v| *v = 0.0);
                axis[mu] = 1.0;
                f(&axis)
            })
            .collect();
        for mu in 0..m {
            blocks[mu][mu] = diag[mu].clone();
            for nu in (mu + 1)..m {
                axis.iter_mut().for_each(|v| *v = 0.0);
                axis[mu] = 1.0;
                axis[nu] = 1.0;
                let cross = 0.5 * (f(&axis) - &diag[mu] - &diag[nu]);
                blocks[mu][nu] = cross.clone();
                blocks[nu][mu] = cross;
            }
        }
        LeadingSymbol::new(m, d, blocks)
    }

    pub fn block(&self, mu: usize, nu: usize) -> &Mat {
        &self.blocks[mu][nu]
    }

    pub fn blocks(&self) -> &Vec<Vec<Mat>> {
        &self.blocks
    }

    /// A(xi) = a^{mu nu} xi_mu xi_nu.
    pub fn eval(&self, xi: &[f64]) -> Mat {
        assert_eq!(xi.len(), self.m);
        let mut acc = Mat::zeros(self.d, self.d);
        for mu in 0..self.m {
            for nu in 0..self.m {
                if xi[mu] != 0.0 && xi[nu] != 0.0 {
                    acc.axpy(xi[mu] * xi[nu], &self.blocks[mu][nu], 1.0);
                }
            }
        }
        acc
    }

    /// Metric contraction g_{mu nu} a^{mu nu}.
    pub fn contracted(&self) -> Mat {
        let mut acc = Mat::zeros(self.d, self.d);
        for mu in 0..self.m {
            acc += &self.blocks[mu][mu];
        }
        acc
    }

    /// Blocks as an endomorphism-valued rank-2 symmetric tensor.
    pub fn as_tensor(&self) -> SymTensor<Mat> {
        let mut t = SymTensor::zeros(self.m, 2, &Mat::zeros(self.d, self.d));
        for mu in 0..self.m {
            for nu in mu..self.m {
                *t.entry_mut(&[mu as u8, nu as u8]) = self.blocks[mu][nu].clone();
            }
        }
        t
    }

    /// Column family J^alpha = a^{alpha beta} xihat_beta with the direction
    /// slot left open: entry `alpha` is the m-vector of blocks a^{. alpha}.
    pub fn column(&self, alpha: usize) -> Vec<Mat> {
        (0..self.m).map(|mu| self.blocks[mu][alpha].clone()).collect()
    }

    /// Laplace-type symbol g (x) I_d.
    pub fn laplace(m: usize, d: usize) -> Self {
        let blocks: Vec<Vec<Mat>> = (0..m)
            .map(|mu| {
                (0..m)
                    .map(|nu| {
                        if mu == nu {
                            Mat::identity(d, d)
                        } else {
                            Mat::zeros(d, d)
                        }
                    })
                    .collect()
            })
            .collect();
        LeadingSymbol::new(m, d, blocks).unwrap()
    }

    /// Restriction to the first `m_sub` tangent directions (same fiber).
    pub fn restrict(&self, m_sub: usize) -> Result<Self> {
        if m_sub == 0 || m_sub > self.m {
            return Err(Error::InvalidInput("invalid restriction dimension".into()));
        }
        let blocks: Vec<Vec<Mat>> = (0..m_sub)
            .map(|mu| (0..m_sub).map(|nu| self.blocks[mu][nu].clone()).collect())
            .collect();
        LeadingSymbol::new(m_sub, self.d, blocks)
    }
}

/// Options for the numerical spectral decomposition.
#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    /// Relative clustering tolerance for eigenvalue grouping.
    pub cluster_tol: f64,
    /// Seed for the random direction sample.
    pub seed: u64,
    /// Number of random unit directions beyond the deterministic ones.
    pub random_directions: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            cluster_tol: 1e-6,
            seed: 42,
            random_directions: 64,
        }
    }
}

/// Deterministic axis and rolling-diagonal directions plus seeded random
/// unit vectors.
pub fn sample_directions(m: usize, opts: &DecomposeOptions) -> Vec<Vect> {
    let mut dirs = Vec::new();
    for mu in 0..m {
        let mut v = Vect::zeros(m);
        v[mu] = 1.0;
        dirs.push(v);
    }
    if m > 1 {
        for mu in 0..m {
            let mut v = Vect::zeros(m);
            v[mu] = 1.0;
            v[(mu + 1) % m] = 1.0;
            dirs.push(unit(&v));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_directions {
        loop {
            let v = Vect::from_iterator(m, (0..m).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)));
            if v.norm() > 1e-8 {
                dirs.push(unit(&v));
                break;
            }
        }
    }
    dirs
}

fn cluster_sorted(vals: &[f64], tol_abs: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > tol_abs {
            let slice = &vals[start..i];
            let mean = slice.iter().sum::<f64>() / slice.len() as f64;
            out.push((mean, slice.len()));
            start = i;
        }
    }
    out
}

/// Spectral data of a leading symbol: eigenvalues mu_i of A on unit
/// directions, multiplicities, and the coefficients expanding each
/// projector in powers of A.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub symbol: LeadingSymbol,
    pub mu: Vec<f64>,
    pub mult: Vec<usize>,
    /// Row i expands projector i in powers A^0 .. A^{s-1} on unit vectors.
    pub c: Mat,
    /// Largest per-cluster eigenvalue spread over the sampled directions.
    pub spread: f64,
}

impl SpectralData {
    pub fn s(&self) -> usize {
        self.mu.len()
    }

    pub fn d(&self) -> usize {
        self.symbol.d
    }

    pub fn m(&self) -> usize {
        self.symbol.m
    }

    /// Projector onto the mu_i eigenspace at direction xi (0-homogeneous),
    /// through the product formula prod_{j != i} (A - mu_j)/(mu_i - mu_j).
    pub fn projector_at(&self, xi: &[f64], i: usize) -> Result<Mat> {
        let n2: f64 = xi.iter().map(|v| v * v).sum();
        if n2 <= 0.0 {
            return Err(Error::InvalidInput("projector needs xi != 0".into()));
        }
        let a = self.symbol.eval(xi) / n2;
        let d = self.d();
        let mut acc = Mat::identity(d, d);
        for j in 0..self.s() {
            if j == i {
                continue;
            }
            let gap = self.mu[i] - self.mu[j];
            if gap.abs() < 1e-12 * self.mu.last().unwrap().abs() {
                return Err(Error::DegenerateGap {
                    i,
                    k: j,
                    gap: gap.abs(),
                });
            }
            acc = acc * (&a - Mat::identity(d, d) * self.mu[j]) / gap;
        }
        Ok(acc)
    }

    /// Both evaluations of the power-sum constants: the moment-tensor route
    /// and sum_i d_i mu_i^n, with their difference.
    pub fn power_sum_dual(&self, n: usize, cap: usize) -> Result<(f64, f64, f64)> {
        let via_spectrum: f64 = self
            .mu
            .iter()
            .zip(self.mult.iter())
            .map(|(&mu, &di)| di as f64 * mu.powi(n as i32))
            .sum();
        let tensor = sym_power(&self.symbol.as_tensor(), n, cap)?;
        let coeff = factorial(2 * n)
            / (pochhammer(self.m() as f64 / 2.0, n)
                * 4.0f64.powi(n as i32)
                * factorial(n));
        let via_tensor = coeff * tensor.total_trace()?.trace();
        Ok((via_tensor, via_spectrum, via_tensor - via_spectrum))
    }
}

/// Numerically decompose a positive definite symbol whose spectrum does not
/// depend on the direction.
pub fn spectral_decompose(
    symbol: &LeadingSymbol,
    opts: &DecomposeOptions,
) -> Result<SpectralData> {
    let dirs = sample_directions(symbol.m, opts);
    let mut clusters_per_dir: Vec<Vec<(f64, usize)>> = Vec::with_capacity(dirs.len());
    let mut min_eig = f64::INFINITY;
    let mut max_eig: f64 = 0.0;
    for dir in &dirs {
        let a = symbol.eval(dir.as_slice());
        let vals = crate::linalg::sym_eigenvalues(&a);
        min_eig = min_eig.min(vals[0]);
        max_eig = max_eig.max(*vals.last().unwrap());
        clusters_per_dir.push(Vec::new());
        let scale = vals.last().unwrap().abs().max(1e-300);
        *clusters_per_dir.last_mut().unwrap() =
            cluster_sorted(&vals, opts.cluster_tol * scale);
    }
    if min_eig <= 0.0 {
        return Err(Error::NotPositiveDefinite(min_eig));
    }
    let s = clusters_per_dir[0].len();
    let mult: Vec<usize> = clusters_per_dir[0].iter().map(|c| c.1).collect();
    for (k, cl) in clusters_per_dir.iter().enumerate() {
        if cl.len() != s || cl.iter().map(|c| c.1).collect::<Vec<_>>() != mult {
            return Err(Error::NonInvariantSymbol(format!(
                "cluster structure differs between directions 0 and {k}"
            )));
        }
    }
    let mut mu = vec![0.0f64; s];
    let mut spread = 0.0f64;
    for i in 0..s {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for cl in &clusters_per_dir {
            let v = cl[i].0;
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        mu[i] = sum / clusters_per_dir.len() as f64;
        spread = spread.max(hi - lo);
    }
    if spread > opts.cluster_tol * max_eig {
        return Err(Error::NonInvariantSymbol(format!(
            "eigenvalue spread {spread:.3e} exceeds tolerance"
        )));
    }
    let c = vandermonde_coeffs(&mu)?;
    Ok(SpectralData {
        symbol: symbol.clone(),
        mu,
        mult,
        c,
        spread,
    })
}

/// Coefficients expanding each eigenprojector in powers of the unit-symbol:
/// row i of the result holds the monomial coefficients of
/// prod_{j != i} (x - mu_j)/(mu_i - mu_j). The matrix is the inverse of the
/// power matrix (mu_j^{k-1}) but is assembled from the product form rather
/// than a linear solve.
pub fn vandermonde_coeffs(mu: &[f64]) -> Result<Mat> {
    let s = mu.len();
    let scale = mu.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    let mut c = Mat::zeros(s, s);
    for i in 0..s {
        // poly coefficients of prod_{j != i} (x - mu_j), low to high degree
        let mut poly = vec![0.0f64; s];
        poly[0] = 1.0;
        let mut deg = 0;
        let mut denom = 1.0f64;
        for j in 0..s {
            if j == i {
                continue;
            }
            let gap = mu[i] - mu[j];
            if gap.abs() < 1e-12 * scale {
                return Err(Error::DegenerateGap {
                    i,
                    k: j,
                    gap: gap.abs(),
                });
            }
            denom *= gap;
            // multiply poly by (x - mu_j)
            for k in (0..=deg).rev() {
                poly[k + 1] += poly[k];
                poly[k] *= -mu[j];
            }
            deg += 1;
        }
        for k in 0..s {
            c[(i, k)] = poly[k] / denom;
        }
    }
    Ok(c)
}

/// Harmonic (trace-free) components of projector i: symmetric trace-free
/// tensors H_0, H_2, ..., H_{2(s-1)} with
/// Pi_i(xi) = sum_n H_{2n} xihat^{2n}.
pub fn harmonic_components(
    spec: &SpectralData,
    i: usize,
    cap: usize,
) -> Result<Vec<SymTensor<Mat>>> {
    let m = spec.m();
    let d = spec.d();
    let p = spec.s() - 1;
    if 2 * p > cap {
        return Err(Error::RankCap { rank: 2 * p, cap });
    }
    let zero = Mat::zeros(d, d);
    let g_end = {
        let mut t = SymTensor::zeros(m, 2, &zero);
        for v in 0..m as u8 {
            *t.entry_mut(&[v, v]) = Mat::identity(d, d);
        }
        t
    };
    // Promote the projector polynomial to a single rank-2p tensor:
    // S = sum_k c_ik Sym(g^{p-k+1 factors} v a^{k-1 factors}).
    let a_tensor = spec.symbol.as_tensor();
    let mut s_big = SymTensor::zeros(m, 2 * p, &zero);
    for k in 1..=spec.s() {
        let mut t = sym_power(&a_tensor, k - 1, cap)?;
        for _ in 0..(p - (k - 1)) {
            t = t.sym_product(&g_end);
        }
        s_big.add_scaled(&t, spec.c[(i, k - 1)]);
    }
    solve_harmonic_split(m, p, &s_big)
}

/// Split a symmetric rank-2p tensor S into S = sum_n Sym(g^{p-n} v H_{2n})
/// with every H_{2n} trace free.
fn solve_harmonic_split(m: usize, p: usize, s_big: &SymTensor<Mat>) -> Result<Vec<SymTensor<Mat>>> {
    let d = {
        let e = &s_big.entries()[0];
        e.nrows()
    };
    let zero = Mat::zeros(d, d);
    // Unknown layout: components of H_0, H_2, ..., H_{2p} concatenated.
    let tuples_by_n: Vec<Vec<Vec<u8>>> = (0..=p).map(|n| canonical_tuples(m, 2 * n)).collect();
    let offsets: Vec<usize> = {
        let mut off = vec![0usize];
        for n in 0..=p {
            off.push(off[n] + tuples_by_n[n].len());
        }
        off
    };
    let n_unknowns = offsets[p + 1];
    let g_pows: Vec<SymTensor<f64>> = (0..=p)
        .map(|j| sym_power(&crate::symten::metric(m), j, 2 * p + 2).unwrap())
        .collect();

    let big_tuples = canonical_tuples(m, 2 * p);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_unknowns);
    // Matching rows: [sum_n Sym(g^{p-n} v H_n)](I) = S(I).
    for tup in &big_tuples {
        let mut row = vec![0.0f64; n_unknowns];
        for n in 0..=p {
            let norm = 1.0 / binom(2 * p, 2 * n);
            // enumerate position subsets of size 2n for H
            let subsets = position_subsets(2 * p, 2 * n);
            for sub in &subsets {
                let mut h_idx = Vec::with_capacity(2 * n);
                let mut g_idx = Vec::with_capacity(2 * (p - n));
                let mut it = sub.iter().peekable();
                for (pos, &v) in tup.iter().enumerate() {
                    if it.peek() == Some(&&pos) {
                        h_idx.push(v);
                        it.next();
                    } else {
                        g_idx.push(v);
                    }
                }
                let gval = *g_pows[p - n].get(&g_idx);
                if gval == 0.0 {
                    continue;
                }
                h_idx.sort_unstable();
                let col = offsets[n] + crate::symten::tuple_rank(m, &h_idx);
                row[col] += norm * gval;
            }
        }
        rows.push(row);
    }
    // Trace-free rows for each H_{2n}, n >= 1.
    for n in 1..=p {
        for tup in &canonical_tuples(m, 2 * n - 2) {
            let mut row = vec![0.0f64; n_unknowns];
            for v in 0..m as u8 {
                let mut idx: Vec<u8> = tup.clone();
                idx.push(v);
                idx.push(v);
                idx.sort_unstable();
                row[offsets[n] + crate::symten::tuple_rank(m, &idx)] += 1.0;
            }
            rows.push(row);
        }
    }
    let nrows = rows.len();
    assert_eq!(nrows, n_unknowns, "harmonic split system must be square");
    let sys = Mat::from_fn(nrows, n_unknowns, |r, c| rows[r][c]);
    let lu = sys.lu();

    let mut components: Vec<SymTensor<Mat>> = (0..=p)
        .map(|n| SymTensor::zeros(m, 2 * n, &zero))
        .collect();
    for r in 0..d {
        for c in 0..d {
            let mut rhs = Vect::zeros(n_unknowns);
            for (ri, tup) in big_tuples.iter().enumerate() {
                rhs[ri] = s_big.get_sorted(tup)[(r, c)];
            }
            let sol = lu
                .solve(&rhs)
                .ok_or_else(|| Error::Numerics("singular harmonic split system".into()))?;
            for n in 0..=p {
                for (ti, tup) in tuples_by_n[n].iter().enumerate() {
                    components[n].entry_mut(tup)[(r, c)] = sol[offsets[n] + ti];
                }
            }
        }
    }
    Ok(components)
}

fn binom(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

fn position_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(n, k, v + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Evaluate a symmetric endomorphism-valued tensor on copies of one vector.
pub fn apply_vector(t: &SymTensor<Mat>, x: &[f64]) -> Mat {
    let d = t.entries()[0].nrows();
    let mut acc = Mat::zeros(d, d);
    for tup in t.tuples() {
        let mut counts = [0usize; 16];
        let mut prod = 1.0f64;
        for &v in tup {
            counts[v as usize] += 1;
            prod *= x[v as usize];
        }
        if prod == 0.0 {
            continue;
        }
        let mut mult = factorial(tup.len());
        for &c in counts.iter().take(t.m) {
            mult /= factorial(c);
        }
        acc.axpy(mult * prod, t.get_sorted(tup), 1.0);
    }
    acc
}
