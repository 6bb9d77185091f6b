//! Shared oracles for the integration suites. Everything here is derived
//! independently of the library's flux formulas: the low-temperature flux is
//! rebuilt from first principles as Wick contractions of linearized
//! observables under the decoupled Ornstein–Uhlenbeck process, with the time
//! integrals done exactly through Lyapunov solves.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use rand_distr::StandardNormal;

use rotorflux::linalg::{lu_factor, Matrix};
use rotorflux::model::ChainSpec;

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(n: usize, m: usize) -> Mat {
    vec![vec![0.0; m]; n]
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            let ail = a[i][l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += ail * b[l][j];
            }
        }
    }
    out
}

pub fn trace(a: &Mat) -> f64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

pub fn transpose(a: &Mat) -> Mat {
    let (n, m) = (a.len(), a[0].len());
    let mut out = zeros(m, n);
    for i in 0..n {
        for j in 0..m {
            out[j][i] = a[i][j];
        }
    }
    out
}

/// out += scale * (u vᵀ + v uᵀ)/2
pub fn add_sym_outer(out: &mut Mat, u: &[f64], v: &[f64], scale: f64) {
    let n = u.len();
    for i in 0..n {
        for j in 0..n {
            out[i][j] += 0.5 * scale * (u[i] * v[j] + v[i] * u[j]);
        }
    }
}

/// Per-site 2×2 drift blocks of the decoupled chain, ordered (q_j, p_j).
fn site_drift(spec: &ChainSpec, j: usize) -> [[f64; 2]; 2] {
    [
        [0.0, -1.0 / spec.mass(j)],
        [spec.pinning(j), spec.bath_coupling(j)],
    ]
}

/// Solves A Y + Y Aᵀ = Q where A is block-diagonal with the per-site 2×2
/// drift blocks. Each (site i, site j) 2×2 block of Y decouples into a 4×4
/// linear system.
pub fn lyapunov_block_diag(spec: &ChainSpec, q: &Mat) -> Mat {
    let n = spec.n_sites();
    let dim = 2 * n;
    let idx = |site: usize, comp: usize| if comp == 0 { site } else { n + site };
    let mut y = zeros(dim, dim);
    for si in 0..n {
        let ai = site_drift(spec, si);
        for sj in 0..n {
            let aj = site_drift(spec, sj);
            // unknown vec(Y_ij) row-major: (A_i ⊗ I + I ⊗ A_j) y = vec(Q_ij)
            let mut sys = Matrix::zeros(4, 4);
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        for d in 0..2 {
                            let mut v = 0.0;
                            if b == d {
                                v += ai[a][c];
                            }
                            if a == c {
                                v += aj[b][d];
                            }
                            sys.set(2 * a + b, 2 * c + d, v);
                        }
                    }
                }
            }
            let rhs = [
                q[idx(si, 0)][idx(sj, 0)],
                q[idx(si, 0)][idx(sj, 1)],
                q[idx(si, 1)][idx(sj, 0)],
                q[idx(si, 1)][idx(sj, 1)],
            ];
            let sol = lu_factor(sys).expect("site drift blocks are stable").solve(&rhs);
            for a in 0..2 {
                for b in 0..2 {
                    y[idx(si, a)][idx(sj, b)] = sol[2 * a + b];
                }
            }
        }
    }
    y
}

/// Solves A Y + Y Aᵀ = Q for a general square A by unfolding into a dense
/// Kronecker system. Fine for the small matrices used in tests.
pub fn lyapunov_dense(a: &Mat, q: &Mat) -> Mat {
    let n = a.len();
    let dim = n * n;
    let mut sys = Matrix::zeros(dim, dim);
    let mut rhs = vec![0.0; dim];
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            rhs[row] = q[i][j];
            for k in 0..n {
                // (A Y)_{ij} picks Y_{kj}; (Y Aᵀ)_{ij} picks Y_{ik}
                let v = sys.get(row, k * n + j) + a[i][k];
                sys.set(row, k * n + j, v);
                let v = sys.get(row, i * n + k) + a[j][k];
                sys.set(row, i * n + k, v);
            }
        }
    }
    let sol = lu_factor(sys).expect("stable drift").solve(&rhs);
    let mut y = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            y[i][j] = sol[i * n + j];
        }
    }
    y
}

/// Exact steady-state bond currents of the harmonic chain with uniform NN
/// spring `k`: the stationary covariance solves A C + C Aᵀ = σσᵀ for the
/// full coupled drift, and the bond current is
/// (k/2)⟨(q_a − q_b)(p_a/m + p_b/m)⟩.
pub fn exact_harmonic_bond_currents(
    n: usize,
    spring: f64,
    pinning: f64,
    mass: f64,
    zeta: f64,
    temps: &[f64],
) -> Vec<f64> {
    let dim = 2 * n;
    let mut a = zeros(dim, dim);
    for j in 0..n {
        a[j][n + j] = -1.0 / mass;
        a[n + j][j] = pinning;
        a[n + j][n + j] = zeta;
    }
    for j in 0..n - 1 {
        a[n + j][j] += spring;
        a[n + j][j + 1] -= spring;
        a[n + j + 1][j + 1] += spring;
        a[n + j + 1][j] -= spring;
    }
    let mut q = zeros(dim, dim);
    for j in 0..n {
        q[n + j][n + j] = 2.0 * mass * zeta * temps[j];
    }
    let c = lyapunov_dense(&a, &q);
    (0..n - 1)
        .map(|b| {
            0.5 * spring / mass
                * (c[b][n + b] + c[b][n + b + 1] - c[b + 1][n + b] - c[b + 1][n + b + 1])
        })
        .collect()
}

/// Per-term ground truth [F_t, W₁, W₂, W₃] for the low-temperature flux;
/// see [`honest_flux_low_t`].
pub fn honest_flux_terms(spec: &ChainSpec, temps: &[f64], alpha: usize) -> [f64; 4] {
    let n = spec.n_sites();
    let dim = 2 * n;
    let kappa = spec.kappa();
    let k2 = kappa * kappa;

    // stationary covariance, diagonal blocks diag(T/M, mT)
    let mut cov = zeros(dim, dim);
    for j in 0..n {
        cov[j][j] = temps[j] / spec.pinning(j);
        cov[n + j][n + j] = spec.mass(j) * temps[j];
    }

    // linearized current: sum_{b>a} (lam k^2 / 2)(q_a - q_b)(p_a/m_a + p_b/m_b)
    let mut omega = zeros(dim, dim);
    for &(beta, lam) in spec.coupling().partners(alpha) {
        if beta <= alpha {
            continue;
        }
        let mut u = vec![0.0; dim];
        u[alpha] = 1.0;
        u[beta] = -1.0;
        let mut v = vec![0.0; dim];
        v[n + alpha] = 1.0 / spec.mass(alpha);
        v[n + beta] = 1.0 / spec.mass(beta);
        add_sym_outer(&mut omega, &u, &v, lam * k2 / 2.0);
    }

    // linearized boundary functional and time-integrated functionals
    let mut f_mat = zeros(dim, dim);
    let mut w1 = zeros(dim, dim);
    let mut w2 = zeros(dim, dim);
    let mut w3 = zeros(dim, dim);
    for j in 0..n {
        for &(l, lam) in spec.coupling().partners(j) {
            let norm = 2.0 * spec.bath_coupling(j) * spec.mass(j) * temps[j];
            let mut dq = vec![0.0; dim];
            dq[j] = 1.0;
            dq[l] = -1.0;
            let mut ej = vec![0.0; dim];
            ej[j] = 1.0;
            let mut pj = vec![0.0; dim];
            pj[n + j] = 1.0;
            let mut dp = vec![0.0; dim];
            dp[n + j] = 1.0 / spec.mass(j);
            dp[n + l] = -1.0 / spec.mass(l);
            add_sym_outer(&mut f_mat, &dq, &pj, lam * k2 / norm);
            add_sym_outer(&mut w1, &ej, &dq, lam * k2 * spec.pinning(j) / norm);
            add_sym_outer(&mut w2, &pj, &dq, lam * k2 * spec.bath_coupling(j) / norm);
            add_sym_outer(&mut w3, &pj, &dp, -lam * k2 / norm);
        }
    }

    // equal-time part: -2 tr(Omega C F C)
    let ft = -2.0 * trace(&matmul(&matmul(&omega, &cov), &matmul(&f_mat, &cov)));
    // time-integrated parts: -2 tr(Omega Y), A Y + Y A^T = C W C
    let mut terms = [ft, 0.0, 0.0, 0.0];
    for (slot, w) in [&w1, &w2, &w3].into_iter().enumerate() {
        let q = matmul(&cov, &matmul(w, &cov));
        let y = lyapunov_block_diag(spec, &q);
        terms[slot + 1] = -2.0 * trace(&matmul(&omega, &y));
    }
    terms
}

/// Ground-truth low-temperature flux across the cut right of `alpha`:
/// linearize the current observable and the interaction functionals, take
/// Wick contractions under the stationary decoupled Gaussian, and do the
/// time integrals by Lyapunov solves. Independent of the library's
/// closed-form transcriptions.
pub fn honest_flux_low_t(spec: &ChainSpec, temps: &[f64], alpha: usize) -> f64 {
    honest_flux_terms(spec, temps, alpha).iter().sum()
}

/// 2×2 matrix exponential of −tA by classical RK4 with a fine fixed step.
pub fn expm_neg_rk4(a: [[f64; 2]; 2], t: f64, steps: usize) -> [[f64; 2]; 2] {
    let rhs = |x: &[[f64; 2]; 2]| {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = -(a[i][0] * x[0][j] + a[i][1] * x[1][j]);
            }
        }
        out
    };
    let lin = |x: &[[f64; 2]; 2], k: &[[f64; 2]; 2], h: f64| {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = x[i][j] + h * k[i][j];
            }
        }
        out
    };
    let h = t / steps as f64;
    let mut x = [[1.0, 0.0], [0.0, 1.0]];
    for _ in 0..steps {
        let k1 = rhs(&x);
        let k2 = rhs(&lin(&x, &k1, h / 2.0));
        let k3 = rhs(&lin(&x, &k2, h / 2.0));
        let k4 = rhs(&lin(&x, &k3, h));
        for i in 0..2 {
            for j in 0..2 {
                x[i][j] += h / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
    }
    x
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (left, ml, fml) = simpson(f, a, fa, m, fm);
        let (right, mr, fmr) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, ml, fml, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, mr, fmr, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(a: &Mat) -> Mat {
    let n = a.len();
    let mut l = zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                assert!(s > 0.0, "matrix not positive definite");
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    l
}

/// One sample of N(0, Σ) given the Cholesky factor of Σ.
pub fn sample_gaussian(chol: &Mat, rng: &mut StdRng) -> Vec<f64> {
    let n = chol.len();
    let z: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    (0..n)
        .map(|i| (0..=i).map(|k| chol[i][k] * z[k]).sum())
        .collect()
}

/// Mean and standard error of a slice.
pub fn mean_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
