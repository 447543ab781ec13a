//! Fiber-side data: fiber dimension, fiber metric, so(m) generator matrices
//! and the optional potential endomorphism, plus constructors for the
//! symmetric two-tensor bundles used as worked examples.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_abs_diff, Mat};

/// Index of the antisymmetric pair (a, b), a < b, in the generator list.
pub fn pair_index(m: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < m);
    // pairs (0,1), (0,2), ..., (0,m-1), (1,2), ...
    a * m - a * (a + 1) / 2 + (b - a - 1)
}

/// Number of generator pairs m(m-1)/2.
pub fn num_pairs(m: usize) -> usize {
    m * (m - 1) / 2
}

/// Orthonormal frame for the fiber of symmetric two-tensors over R^m:
/// first the m diagonal elements E_ii, then (E_ij + E_ji)/sqrt(2) for i < j,
/// orthonormal in the pairing (phi, psi) = phi_{mu nu} psi^{mu nu}.
#[derive(Clone, Debug)]
pub struct S2Frame {
    pub m: usize,
    pub basis: Vec<Mat>,
}

impl S2Frame {
    pub fn new(m: usize) -> Self {
        let mut basis = Vec::with_capacity(m * (m + 1) / 2);
        for i in 0..m {
            let mut e = Mat::zeros(m, m);
            e[(i, i)] = 1.0;
            basis.push(e);
        }
        let s = 1.0 / 2.0f64.sqrt();
        for i in 0..m {
            for j in (i + 1)..m {
                let mut e = Mat::zeros(m, m);
                e[(i, j)] = s;
                e[(j, i)] = s;
                basis.push(e);
            }
        }
        S2Frame { m, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a symmetric m x m tensor in this frame.
    pub fn to_coords(&self, phi: &Mat) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| (b.transpose() * phi).trace())
            .collect()
    }

    /// Matrix of a linear action on symmetric two-tensors in this frame.
    pub fn matrix_of<F: Fn(&Mat) -> Mat>(&self, action: F) -> Mat {
        let d = self.dim();
        let mut out = Mat::zeros(d, d);
        for (k, b) in self.basis.iter().enumerate() {
            let img = action(b);
            let col = self.to_coords(&img);
            for (l, &v) in col.iter().enumerate() {
                out[(l, k)] = v;
            }
        }
        out
    }

    /// Orthonormal basis of the trace-free subspace, expressed in frame
    /// coordinates (columns of the returned d x d0 matrix).
    pub fn trace_free_basis(&self) -> Mat {
        let m = self.m;
        let d = self.dim();
        let d0 = d - 1;
        let mut cols = Mat::zeros(d, d0);
        // Diagonal trace-free combinations (1,...,1,-k,0,...)/sqrt(k(k+1)).
        for k in 1..m {
            let norm = (k as f64 * (k + 1) as f64).sqrt();
            for i in 0..k {
                cols[(i, k - 1)] = 1.0 / norm;
            }
            cols[(k, k - 1)] = -(k as f64) / norm;
        }
        // Off-diagonal elements are already trace free.
        for p in 0..(d - m) {
            cols[(m + p, m - 1 + p)] = 1.0;
        }
        cols
    }
}

/// A vector bundle fiber with so(m) generator matrices.
///
/// Generators are stored per antisymmetric pair (alpha < beta) and satisfy
/// [T^{ab}, T^{cd}] = g^{bc} T^{ad} - g^{ac} T^{bd} - g^{bd} T^{ac} + g^{ad} T^{bc}.
#[derive(Clone, Debug)]
pub struct FiberBundle {
    pub m: usize,
    pub d: usize,
    /// Fiber metric, symmetric positive definite.
    pub metric: Mat,
    /// so(m) generators indexed by `pair_index`; empty means all zero.
    pub generators: Vec<Mat>,
    /// Optional potential endomorphism.
    pub q: Option<Mat>,
}

impl FiberBundle {
    /// Generator with explicit index pair, antisymmetrically extended.
    pub fn generator(&self, a: usize, b: usize) -> Mat {
        if self.generators.is_empty() || a == b {
            return Mat::zeros(self.d, self.d);
        }
        if a < b {
            self.generators[pair_index(self.m, a, b)].clone()
        } else {
            -self.generators[pair_index(self.m, b, a)].clone()
        }
    }

    pub fn has_generators(&self) -> bool {
        !self.generators.is_empty()
    }

    /// Largest violation of the so(m) commutation relations.
    pub fn commutation_defect(&self) -> f64 {
        if self.generators.is_empty() {
            return 0.0;
        }
        let m = self.m;
        let mut worst = 0.0f64;
        for a in 0..m {
            for b in (a + 1)..m {
                for c in 0..m {
                    for e in (c + 1)..m {
                        let tab = self.generator(a, b);
                        let tce = self.generator(c, e);
                        let lhs = &tab * &tce - &tce * &tab;
                        let mut rhs = Mat::zeros(self.d, self.d);
                        let del = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
                        rhs += self.generator(a, e) * del(b, c);
                        rhs -= self.generator(b, e) * del(a, c);
                        rhs -= self.generator(a, c) * del(b, e);
                        rhs += self.generator(b, c) * del(a, e);
                        worst = worst.max(max_abs_diff(&lhs, &rhs));
                    }
                }
            }
        }
        worst
    }

    /// Validate all structural invariants to the given tolerance.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.metric.nrows() != self.d || self.metric.ncols() != self.d {
            return Err(Error::BundleInvariant("fiber metric has wrong shape".into()));
        }
        if crate::linalg::asymmetry(&self.metric) > tol {
            return Err(Error::BundleInvariant("fiber metric not symmetric".into()));
        }
        let evals = crate::linalg::sym_eigenvalues(&self.metric);
        if evals[0] <= 0.0 {
            return Err(Error::BundleInvariant(
                "fiber metric not positive definite".into(),
            ));
        }
        if !self.generators.is_empty() && self.generators.len() != num_pairs(self.m) {
            return Err(Error::BundleInvariant(format!(
                "expected {} generator matrices, got {}",
                num_pairs(self.m),
                self.generators.len()
            )));
        }
        // Anti-self-adjointness with respect to the fiber metric:
        // (H T)^T = -H T.
        for t in &self.generators {
            if t.nrows() != self.d || t.ncols() != self.d {
                return Err(Error::BundleInvariant("generator has wrong shape".into()));
            }
            let ht = &self.metric * t;
            if max_abs(&(&ht + ht.transpose())) > tol * (1.0 + max_abs(&ht)) {
                return Err(Error::BundleInvariant(
                    "generator not anti-self-adjoint w.r.t. the fiber metric".into(),
                ));
            }
        }
        let defect = self.commutation_defect();
        if defect > tol {
            return Err(Error::BundleInvariant(format!(
                "so(m) commutation defect {defect:.3e} exceeds {tol:.1e}"
            )));
        }
        if let Some(q) = &self.q {
            let hq = &self.metric * q;
            if max_abs_diff(&hq, &hq.transpose().clone_owned()) > tol * (1.0 + max_abs(&hq)) {
                return Err(Error::BundleInvariant(
                    "potential not self-adjoint w.r.t. the fiber metric".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Generator action on symmetric two-tensors:
/// (T^{ab} phi)_{mu nu} = d^a_mu phi_{b nu} + d^a_nu phi_{mu b}
///                      - d^b_mu phi_{a nu} - d^b_nu phi_{mu a}.
fn s2_generator_action(m: usize, a: usize, b: usize, phi: &Mat) -> Mat {
    let mut out = Mat::zeros(m, m);
    for mu in 0..m {
        for nu in 0..m {
            let mut v = 0.0;
            if mu == a {
                v += phi[(b, nu)];
            }
            if nu == a {
                v += phi[(mu, b)];
            }
            if mu == b {
                v -= phi[(a, nu)];
            }
            if nu == b {
                v -= phi[(mu, a)];
            }
            out[(mu, nu)] = v;
        }
    }
    out
}

/// Bundle of symmetric two-tensors, fiber dimension m(m+1)/2.
pub fn make_s2_bundle(m: usize) -> Result<FiberBundle> {
    if m < 2 {
        return Err(Error::InvalidInput("symmetric two-tensors need m >= 2".into()));
    }
    let frame = S2Frame::new(m);
    let d = frame.dim();
    let mut generators = Vec::with_capacity(num_pairs(m));
    for a in 0..m {
        for b in (a + 1)..m {
            generators.push(frame.matrix_of(|phi| s2_generator_action(m, a, b, phi)));
        }
    }
    let bundle = FiberBundle {
        m,
        d,
        metric: Mat::identity(d, d),
        generators,
        q: None,
    };
    bundle.validate(1e-12)?;
    Ok(bundle)
}

/// Bundle of trace-free symmetric two-tensors, fiber dimension m(m+1)/2 - 1.
pub fn make_s20_bundle(m: usize) -> Result<FiberBundle> {
    if m < 3 {
        return Err(Error::InvalidInput(
            "trace-free symmetric two-tensors need m >= 3".into(),
        ));
    }
    let s2 = make_s2_bundle(m)?;
    let frame = S2Frame::new(m);
    let basis = frame.trace_free_basis();
    let d0 = basis.ncols();
    let generators: Vec<Mat> = s2
        .generators
        .iter()
        .map(|t| basis.transpose() * t * &basis)
        .collect();
    let bundle = FiberBundle {
        m,
        d: d0,
        metric: Mat::identity(d0, d0),
        generators,
        q: None,
    };
    bundle.validate(1e-12)?;
    Ok(bundle)
}

/// Trivial bundle with arbitrary fiber dimension and zero (or supplied)
/// generators; used for reduction tests.
pub fn make_laplace_bundle(m: usize, d: usize) -> FiberBundle {
    FiberBundle {
        m,
        d,
        metric: Mat::identity(d, d),
        generators: Vec::new(),
        q: None,
    }
}
