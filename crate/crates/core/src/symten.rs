//! Dense totally-symmetric tensor algebra over an m-dimensional Euclidean
//! fiber of tangent indices, with Gaussian and unit-sphere moment tensors
//! and the sphere average of endomorphism-valued contraction chains.
//!
//! Storage is canonical: one entry per non-decreasing multi-index. All base
//! metrics are orthonormal (g = identity), matching the pointwise normal
//! frames in which every formula here is evaluated.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::special::{factorial, pochhammer};

/// Default cap on tensor rank for the public symmetric-power operations.
pub const DEFAULT_RANK_CAP: usize = 8;

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u64 / (j + 1) as u64;
    }
    acc
}

/// All non-decreasing multi-indices of the given rank over {0..m-1},
/// in lexicographic order.
pub fn canonical_tuples(m: usize, rank: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(binomial(m + rank.max(1) - 1, rank) as usize);
    let mut cur = vec![0u8; rank];
    fn rec(m: usize, rank: usize, pos: usize, start: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if pos == rank {
            out.push(cur.clone());
            return;
        }
        for v in start..m as u8 {
            cur[pos] = v;
            rec(m, rank, pos + 1, v, cur, out);
        }
    }
    rec(m, rank, 0, 0, &mut cur, &mut out);
    out
}

/// Lexicographic rank of a sorted multi-index among all canonical tuples.
pub fn tuple_rank(m: usize, tuple: &[u8]) -> usize {
    let r = tuple.len();
    let mut rank = 0usize;
    let mut prev = 0u8;
    for (pos, &c) in tuple.iter().enumerate() {
        let remaining = r - pos - 1;
        for w in prev..c {
            // completions with this position set to w
            rank += binomial(m - w as usize + remaining - 1, remaining) as usize;
        }
        prev = c;
    }
    rank
}

/// Element type stored per canonical component: scalars or endomorphisms.
pub trait Elem: Clone + Send + Sync {
    fn zeros_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, s: f64);
    fn scale_mut(&mut self, s: f64);
    /// Composition `self * other`, in that order.
    fn compose(&self, other: &Self) -> Self;
    fn max_abs(&self) -> f64;
}

impl Elem for f64 {
    fn zeros_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        *self += other * s;
    }
    fn scale_mut(&mut self, s: f64) {
        *self *= s;
    }
    fn compose(&self, other: &Self) -> Self {
        self * other
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
}

impl Elem for Mat {
    fn zeros_like(&self) -> Self {
        Mat::zeros(self.nrows(), self.ncols())
    }
    fn one_like(&self) -> Self {
        Mat::identity(self.nrows(), self.ncols())
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        self.axpy(s, other, 1.0);
    }
    fn scale_mut(&mut self, s: f64) {
        *self *= s;
    }
    fn compose(&self, other: &Self) -> Self {
        self * other
    }
    fn max_abs(&self) -> f64 {
        crate::linalg::max_abs(self)
    }
}

/// Totally symmetric tensor with canonical (sorted multi-index) storage.
#[derive(Clone, Debug)]
pub struct SymTensor<T: Elem> {
    pub m: usize,
    pub rank: usize,
    tuples: Vec<Vec<u8>>,
    entries: Vec<T>,
}

impl<T: Elem> SymTensor<T> {
    pub fn zeros(m: usize, rank: usize, proto: &T) -> Self {
        let tuples = canonical_tuples(m, rank);
        let entries = vec![proto.zeros_like(); tuples.len()];
        SymTensor {
            m,
            rank,
            tuples,
            entries,
        }
    }

    /// Rank-0 tensor holding a single value.
    pub fn scalar(m: usize, value: T) -> Self {
        SymTensor {
            m,
            rank: 0,
            tuples: vec![vec![]],
            entries: vec![value],
        }
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn tuples(&self) -> &[Vec<u8>] {
        &self.tuples
    }

    pub fn get(&self, idx: &[u8]) -> &T {
        let mut s = idx.to_vec();
        s.sort_unstable();
        &self.entries[tuple_rank(self.m, &s)]
    }

    pub fn get_sorted(&self, idx: &[u8]) -> &T {
        &self.entries[tuple_rank(self.m, idx)]
    }

    pub fn entry_mut(&mut self, idx: &[u8]) -> &mut T {
        let mut s = idx.to_vec();
        s.sort_unstable();
        let r = tuple_rank(self.m, &s);
        &mut self.entries[r]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn scale(&mut self, s: f64) {
        for e in &mut self.entries {
            e.scale_mut(s);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |acc, e| acc.max(e.max_abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.rank, other.rank);
        assert_eq!(self.m, other.m);
        let mut acc = 0.0f64;
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            let mut t = a.clone();
            t.add_scaled(b, -1.0);
            acc = acc.max(t.max_abs());
        }
        acc
    }

    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!(self.rank, other.rank);
        for (a, b) in self.entries.iter_mut().zip(other.entries.iter()) {
            a.add_scaled(b, s);
        }
    }

    /// Symmetrized tensor product with a factor of rank 1 or 2, the factor
    /// composing on the right of every accumulated value.
    pub fn sym_product(&self, rhs: &SymTensor<T>) -> SymTensor<T> {
        assert!(rhs.rank == 1 || rhs.rank == 2, "append factors of rank 1 or 2");
        assert_eq!(self.m, rhs.m);
        let r = self.rank + rhs.rank;
        let proto = self.entries[0].zeros_like();
        let mut out = SymTensor::zeros(self.m, r, &proto);
        let norm = 1.0 / binomial(r, rhs.rank) as f64;
        let out_tuples = out.tuples.clone();
        for (oi, tup) in out_tuples.iter().enumerate() {
            let acc = &mut out.entries[oi];
            if rhs.rank == 1 {
                let mut rest = vec![0u8; r - 1];
                for p in 0..r {
                    let mut k = 0;
                    for (q, &v) in tup.iter().enumerate() {
                        if q != p {
                            rest[k] = v;
                            k += 1;
                        }
                    }
                    let a = self.get_sorted(&rest);
                    let b = rhs.get(&[tup[p]]);
                    let prod = a.compose(b);
                    acc.add_scaled(&prod, norm);
                }
            } else {
                let mut rest = vec![0u8; r - 2];
                for p in 0..r {
                    for q in (p + 1)..r {
                        let mut k = 0;
                        for (w, &v) in tup.iter().enumerate() {
                            if w != p && w != q {
                                rest[k] = v;
                                k += 1;
                            }
                        }
                        let a = self.get_sorted(&rest);
                        let b = rhs.get(&[tup[p], tup[q]]);
                        let prod = a.compose(b);
                        acc.add_scaled(&prod, norm);
                    }
                }
            }
        }
        out
    }

    /// Contract one index pair with the metric, lowering rank by two.
    pub fn trace_pair(&self) -> SymTensor<T> {
        assert!(self.rank >= 2);
        let proto = self.entries[0].zeros_like();
        let mut out = SymTensor::zeros(self.m, self.rank - 2, &proto);
        let out_tuples = out.tuples.clone();
        let mut idx = vec![0u8; self.rank];
        for (oi, tup) in out_tuples.iter().enumerate() {
            let acc = &mut out.entries[oi];
            for v in 0..self.m as u8 {
                idx[..self.rank - 2].copy_from_slice(tup);
                idx[self.rank - 2] = v;
                idx[self.rank - 1] = v;
                idx.sort_unstable();
                acc.add_scaled(&self.entries[tuple_rank(self.m, &idx)], 1.0);
            }
        }
        out
    }

    /// Full metric contraction of an even-rank tensor down to one value.
    pub fn total_trace(&self) -> Result<T> {
        if self.rank % 2 != 0 {
            return Err(Error::OddRank(self.rank));
        }
        let mut cur = self.clone();
        while cur.rank > 0 {
            cur = cur.trace_pair();
        }
        Ok(cur.entries.into_iter().next().unwrap())
    }
}

/// ∨^n base for a symmetric rank-2 tensor, with index symmetrization
/// averaging the factor orderings it induces. n = 0 yields the rank-0 unit.
pub fn sym_power<T: Elem>(base: &SymTensor<T>, n: usize, cap: usize) -> Result<SymTensor<T>> {
    assert_eq!(base.rank, 2);
    if 2 * n > cap {
        return Err(Error::RankCap { rank: 2 * n, cap });
    }
    let mut acc = SymTensor::scalar(base.m, base.entries[0].one_like());
    for _ in 0..n {
        acc = acc.sym_product(base);
    }
    Ok(acc)
}

/// Identity metric as a rank-2 scalar tensor.
pub fn metric(m: usize) -> SymTensor<f64> {
    let mut g = SymTensor::zeros(m, 2, &0.0);
    for v in 0..m as u8 {
        *g.entry_mut(&[v, v]) = 1.0;
    }
    g
}

/// All perfect matchings of {0..2n-1} as lists of pairs.
pub fn perfect_matchings(n2: usize) -> Vec<Vec<(usize, usize)>> {
    assert!(n2 % 2 == 0);
    let mut out = Vec::new();
    let mut used = vec![false; n2];
    let mut cur = Vec::new();
    fn rec(
        n2: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let first = match used.iter().position(|&u| !u) {
            None => {
                out.push(cur.clone());
                return;
            }
            Some(f) => f,
        };
        used[first] = true;
        for second in (first + 1)..n2 {
            if used[second] {
                continue;
            }
            used[second] = true;
            cur.push((first, second));
            rec(n2, used, cur, out);
            cur.pop();
            used[second] = false;
        }
        used[first] = false;
    }
    rec(n2, &mut used, &mut cur, &mut out);
    out
}

/// Gaussian moment tensor <xi_{mu_1} ... xi_{mu_2n}> for weight exp(-|xi|^2):
/// sum over perfect matchings of metric factors, divided by 2^n.
pub fn gaussian_moment(m: usize, n: usize, cap: usize) -> Result<SymTensor<f64>> {
    if 2 * n > cap {
        return Err(Error::RankCap { rank: 2 * n, cap });
    }
    if n == 0 {
        return Ok(SymTensor::scalar(m, 1.0));
    }
    let mut out = SymTensor::zeros(m, 2 * n, &0.0);
    let matchings = perfect_matchings(2 * n);
    let scale = 0.5f64.powi(n as i32);
    let tuples = out.tuples.clone();
    for (oi, tup) in tuples.iter().enumerate() {
        let mut acc = 0.0;
        'matching: for mt in &matchings {
            for &(u, v) in mt {
                if tup[u] != tup[v] {
                    continue 'matching;
                }
            }
            acc += 1.0;
        }
        out.entries[oi] = acc * scale;
    }
    Ok(out)
}

/// Unit-sphere moment tensor <xihat_{mu_1} ... xihat_{mu_2n}>.
pub fn sphere_moment(m: usize, n: usize, cap: usize) -> Result<SymTensor<f64>> {
    let mut g = gaussian_moment(m, n, cap)?;
    g.scale(1.0 / pochhammer(m as f64 / 2.0, n));
    Ok(g)
}

/// Scalar prefactor of the sphere average of a degree-2q polynomial chain:
/// Gamma(m/2) (2q)! / (Gamma(m/2+q) 2^{2q} q!).
pub fn sphere_average_coeff(m: usize, q: usize) -> f64 {
    factorial(2 * q) / (pochhammer(m as f64 / 2.0, q) * 4.0f64.powi(q as i32) * factorial(q))
}

/// One factor of a contraction chain: endomorphism-valued blocks whose
/// direction slots are averaged over the unit sphere.
pub enum ChainFactor<'a> {
    /// Symmetric m x m family of d x d blocks; both slots averaged.
    Pair(&'a [Vec<Mat>]),
    /// m-vector of d x d blocks; its single slot averaged.
    Vector(Vec<Mat>),
}

impl<'a> ChainFactor<'a> {
    fn rank(&self) -> usize {
        match self {
            ChainFactor::Pair(_) => 2,
            ChainFactor::Vector(_) => 1,
        }
    }
}

/// Sphere average of an ordered product of endomorphism-valued blocks with
/// all direction slots contracted against the unit vector. Preserves the
/// multiplication order of the chain. An odd slot count averages to zero.
pub fn chain_average(m: usize, d: usize, factors: &[ChainFactor<'_>], cap: usize) -> Result<Mat> {
    let slots: usize = factors.iter().map(|f| f.rank()).sum();
    if slots % 2 == 1 {
        return Ok(Mat::zeros(d, d));
    }
    if slots > cap {
        return Err(Error::RankCap { rank: slots, cap });
    }
    let unit = Mat::identity(d, d);
    let mut acc = SymTensor::scalar(m, unit);
    for f in factors {
        let t = match f {
            ChainFactor::Pair(blocks) => {
                let mut t = SymTensor::zeros(m, 2, &Mat::zeros(d, d));
                for mu in 0..m {
                    for nu in mu..m {
                        *t.entry_mut(&[mu as u8, nu as u8]) = blocks[mu][nu].clone();
                    }
                }
                t
            }
            ChainFactor::Vector(cols) => {
                let mut t = SymTensor::zeros(m, 1, &Mat::zeros(d, d));
                for mu in 0..m {
                    *t.entry_mut(&[mu as u8]) = cols[mu].clone();
                }
                t
            }
        };
        acc = acc.sym_product(&t);
    }
    let q = slots / 2;
    let mut res = acc.total_trace()?;
    res *= sphere_average_coeff(m, q);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tuple_ranking_roundtrip() {
        for m in 1..=5 {
            for rank in 0..=4 {
                let tuples = canonical_tuples(m, rank);
                for (i, t) in tuples.iter().enumerate() {
                    assert_eq!(tuple_rank(m, t), i);
                }
            }
        }
    }

    #[test]
    fn metric_traces() {
        // tr_g g = m
        for m in 1..=6 {
            let g = metric(m);
            assert_relative_eq!(g.total_trace().unwrap(), m as f64);
        }
        // tr_g (v^1 g) = 2 for m = 2
        let g = metric(2);
        let p = sym_power(&g, 1, 8).unwrap();
        assert_relative_eq!(p.total_trace().unwrap(), 2.0);
    }

    /// Brute-force total trace by full index enumeration, independent of the
    /// canonical-storage contraction path.
    fn total_trace_brute(t: &SymTensor<f64>) -> f64 {
        let r = t.rank;
        assert!(r % 2 == 0);
        let pairs = r / 2;
        let mut acc = 0.0;
        let mut idx = vec![0u8; r];
        let count = (t.m as u64).pow(pairs as u32);
        for code in 0..count {
            let mut c = code;
            for p in 0..pairs {
                let v = (c % t.m as u64) as u8;
                c /= t.m as u64;
                idx[2 * p] = v;
                idx[2 * p + 1] = v;
            }
            acc += *t.get(&idx);
        }
        acc
    }

    #[test]
    fn sym_power_metric_total_trace_closed_form() {
        // tr_g (v^n g*) = poch(m/2, n) * 2^{2n} n! / (2n)!
        for m in 2..=5usize {
            for n in 1..=3usize {
                let g = metric(m);
                let p = sym_power(&g, n, 8).unwrap();
                let expected = pochhammer(m as f64 / 2.0, n) * 4.0f64.powi(n as i32)
                    * factorial(n)
                    / factorial(2 * n);
                assert_relative_eq!(p.total_trace().unwrap(), expected, max_relative = 1e-12);
                assert_relative_eq!(total_trace_brute(&p), expected, max_relative = 1e-12);
            }
        }
        // m = 3, n = 2 gives 5 exactly
        let p = sym_power(&metric(3), 2, 8).unwrap();
        assert_relative_eq!(p.total_trace().unwrap(), 5.0, max_relative = 1e-13);
        // m = 4, n = 2 gives 8
        let p = sym_power(&metric(4), 2, 8).unwrap();
        assert_relative_eq!(p.total_trace().unwrap(), 8.0, max_relative = 1e-13);
    }

    #[test]
    fn rank_cap_enforced() {
        let g = metric(3);
        assert!(matches!(
            sym_power(&g, 5, 8),
            Err(Error::RankCap { rank: 10, cap: 8 })
        ));
    }

    #[test]
    fn gaussian_moment_small_orders() {
        let m = 3;
        let g0 = gaussian_moment(m, 0, 8).unwrap();
        assert_relative_eq!(*g0.get(&[]), 1.0);
        // <xi_mu xi_nu> = g_{mu nu} / 2
        let g1 = gaussian_moment(m, 1, 8).unwrap();
        for a in 0..m as u8 {
            for b in 0..m as u8 {
                let expect = if a == b { 0.5 } else { 0.0 };
                assert_relative_eq!(*g1.get(&[a, b]), expect);
            }
        }
        // component (1,1,2,2) at n = 2: (g11 g22 + 2 g12 g12)/4 = 1/4
        let g2 = gaussian_moment(2, 2, 8).unwrap();
        assert_relative_eq!(*g2.get(&[0, 0, 1, 1]), 0.25);
        assert_relative_eq!(*g2.get(&[0, 0, 0, 0]), 0.75);
    }

    #[test]
    fn gaussian_moment_matches_monte_carlo() {
        // Monte Carlo over the standard Gaussian with weight exp(-|xi|^2)
        // (variance 1/2 per component), 3 sigma bands.
        let m = 3usize;
        let n = 2usize;
        let moment = gaussian_moment(m, n, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = 200_000usize;
        let tuples: Vec<Vec<u8>> = moment.tuples().to_vec();
        let mut sums = vec![0.0f64; tuples.len()];
        let mut sums2 = vec![0.0f64; tuples.len()];
        for _ in 0..samples {
            let xi: Vec<f64> = (0..m)
                .map(|_| {
                    let u: f64 = rng.sample(rand_distr::StandardNormal);
                    u / 2.0f64.sqrt()
                })
                .collect();
            for (ti, tup) in tuples.iter().enumerate() {
                let prod: f64 = tup.iter().map(|&v| xi[v as usize]).product();
                sums[ti] += prod;
                sums2[ti] += prod * prod;
            }
        }
        for (ti, tup) in tuples.iter().enumerate() {
            let mean = sums[ti] / samples as f64;
            let var = (sums2[ti] / samples as f64 - mean * mean) / samples as f64;
            let se = var.max(0.0).sqrt();
            let exact = *moment.get_sorted(tup);
            assert!(
                (exact - mean).abs() <= 3.0 * se + 1e-12,
                "component {tup:?}: exact {exact} vs mc {mean} (se {se})"
            );
        }
    }

    #[test]
    fn sphere_moment_normalization() {
        // <xihat xihat> = g/m and total trace 1 at every order
        for m in 2..=5usize {
            let s1 = sphere_moment(m, 1, 8).unwrap();
            assert_relative_eq!(*s1.get(&[0, 0]), 1.0 / m as f64, max_relative = 1e-14);
            for n in 1..=3usize {
                let sn = sphere_moment(m, n, 8).unwrap();
                assert_relative_eq!(sn.total_trace().unwrap(), 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn sphere_vs_gaussian_scaling_identity() {
        // sphere(n) * m (m+2) ... (m+2n-2) = 2^n * gaussian(n), entrywise
        for m in 2..=4usize {
            for n in 1..=3usize {
                let sp = sphere_moment(m, n, 8).unwrap();
                let ga = gaussian_moment(m, n, 8).unwrap();
                let prod: f64 = (0..n).map(|j| (m + 2 * j) as f64).product();
                for (a, b) in sp.entries().iter().zip(ga.entries().iter()) {
                    assert_relative_eq!(
                        a * prod,
                        b * 2.0f64.powi(n as i32),
                        max_relative = 1e-13,
                        epsilon = 1e-15
                    );
                }
            }
        }
    }

    #[test]
    fn moment_tensor_contracts_rank_by_rank() {
        for m in 2..=4usize {
            for n in 2..=3usize {
                let sn = sphere_moment(m, n, 8).unwrap();
                let down = sn.trace_pair();
                let expect = sphere_moment(m, n - 1, 8).unwrap();
                assert!(down.max_abs_diff(&expect) < 1e-14);
            }
        }
    }

    #[test]
    fn chain_average_identity_metric() {
        // Chain [a] with a = g (x) I: average is |xihat|^2 I = I.
        let m = 3;
        let d = 2;
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
        let avg = chain_average(m, d, &[ChainFactor::Pair(&blocks)], 8).unwrap();
        assert!(max_abs_diff(&avg, &Mat::identity(d, d)) < 1e-14);
    }

    #[test]
    fn chain_average_odd_slots_zero() {
        let m = 2;
        let d = 2;
        let cols: Vec<Mat> = (0..m).map(|_| Mat::identity(d, d)).collect();
        let avg = chain_average(m, d, &[ChainFactor::Vector(cols)], 8).unwrap();
        assert!(crate::linalg::max_abs(&avg) == 0.0, "odd chain must average to zero");
    }

    /// Independent evaluation of the chain average through the explicit
    /// matching enumeration applied to the dense moment tensor.
    fn chain_average_by_moment_tensor(
        m: usize,
        d: usize,
        factors: &[ChainFactor<'_>],
    ) -> Mat {
        let slots: usize = factors.iter().map(|f| f.rank()).sum();
        assert!(slots % 2 == 0);
        let q = slots / 2;
        let moment = sphere_moment(m, q, 32).unwrap();
        let mut acc = Mat::zeros(d, d);
        let mut idx = vec![0u8; slots];
        let count = (m as u64).pow(slots as u32);
        for code in 0..count {
            let mut c = code;
            for p in 0..slots {
                idx[p] = (c % m as u64) as u8;
                c /= m as u64;
            }
            let w = *moment.get(&idx);
            if w == 0.0 {
                continue;
            }
            let mut prod = Mat::identity(d, d);
            let mut pos = 0;
            for f in factors {
                match f {
                    ChainFactor::Pair(blocks) => {
                        prod = &prod * &blocks[idx[pos] as usize][idx[pos + 1] as usize];
                        pos += 2;
                    }
                    ChainFactor::Vector(cols) => {
                        prod = &prod * &cols[idx[pos] as usize];
                        pos += 1;
                    }
                }
            }
            acc += w * prod;
        }
        acc
    }

    #[test]
    fn chain_average_cross_checked_against_moment_contraction() {
        let m = 3usize;
        let d = 2usize;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut rand_sym = || {
            let mut v = Mat::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    v[(i, j)] = rng.gen_range(-1.0..1.0);
                }
            }
            let v = &v + v.transpose();
            v
        };
        let blocks: Vec<Vec<Mat>> = {
            let mut b: Vec<Vec<Mat>> = (0..m).map(|_| (0..m).map(|_| Mat::zeros(d, d)).collect()).collect();
            for mu in 0..m {
                for nu in mu..m {
                    let v = rand_sym();
                    b[mu][nu] = v.clone();
                    b[nu][mu] = v;
                }
            }
            b
        };
        let vecs: Vec<Mat> = (0..m).map(|_| rand_sym()).collect();
        let factors = vec![
            ChainFactor::Pair(&blocks),
            ChainFactor::Vector(vecs.clone()),
            ChainFactor::Pair(&blocks),
            ChainFactor::Vector(vecs.clone()),
        ];
        let fast = chain_average(m, d, &factors, 18).unwrap();
        let slow = chain_average_by_moment_tensor(m, d, &factors);
        assert!(
            max_abs_diff(&fast, &slow) < 1e-12 * slow.amax().max(1.0),
            "chain engine disagrees with dense moment contraction"
        );
    }
}
