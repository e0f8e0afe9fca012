//! Bethe ansatz equations through the strictly convex master function.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dist, dot, norm, scale, sub};
use crate::report::{track, CheckReport};
use crate::root_system::{Multiplicity, RootSystem};
use crate::weyl::WeylGroup;

/// Regularity margin above which `μ̂` is certified regular.
pub const REGULARITY_TOL: f64 = 1e-9;
/// Margin below which `μ̂` is certified singular.
pub const SINGULARITY_TOL: f64 = 1e-12;

/// `∫_0^x arctan(t/c) dt`.
pub fn arctan_integral(x: f64, c: f64) -> f64 {
    x * (x / c).atan() - 0.5 * c * (x * x / (c * c)).ln_1p()
}

/// `S_k(μ, ξ)`.
pub fn master_value(rs: &RootSystem, k: &Multiplicity, mu: &[f64], xi: &[f64]) -> Result<f64> {
    k.require_positive(rs)?;
    let mut s = 0.5 * dot(xi, xi) - 2.0 * PI * dot(mu, xi);
    for a in 0..rs.num_roots() {
        let sq = dot(&rs.roots[a], &rs.roots[a]);
        s += 0.5 * sq * arctan_integral(rs.pair(xi, a), k.of_root(rs, a));
    }
    Ok(s)
}

/// `σ_ξ^k = Σ_{α∈Σ_0} arctan(ξ(α^∨)/k_α) α`.
pub fn sigma(rs: &RootSystem, k: &Multiplicity, xi: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; rs.rank];
    for a in 0..rs.num_roots() {
        let t = (rs.pair(xi, a) / k.of_root(rs, a)).atan();
        out = axpy(&out, t, &rs.roots[a]);
    }
    out
}

/// `ξ + σ_ξ^k - 2πμ`.
pub fn master_gradient(rs: &RootSystem, k: &Multiplicity, mu: &[f64], xi: &[f64]) -> Vec<f64> {
    let s = sigma(rs, k, xi);
    xi.iter()
        .zip(&s)
        .zip(mu)
        .map(|((x, s), m)| x + s - 2.0 * PI * m)
        .collect()
}

/// `B_ξ^k = I + ½ Σ_α k_α ‖α‖² α^∨ α^∨ᵀ / (k_α² + ξ(α^∨)²)`; independent of `μ`.
pub fn master_hessian(rs: &RootSystem, k: &Multiplicity, xi: &[f64]) -> DMatrix<f64> {
    let n = rs.rank;
    let mut h = DMatrix::identity(n, n);
    for a in 0..rs.num_roots() {
        let ka = k.of_root(rs, a);
        let x = rs.pair(xi, a);
        let w = 0.5 * ka * dot(&rs.roots[a], &rs.roots[a]) / (ka * ka + x * x);
        let c = &rs.coroots[a];
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] += w * c[i] * c[j];
            }
        }
    }
    h
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Convergence when `‖∇S‖ ≤ tol · max(1, ‖2πμ‖)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    Regular,
    Singular,
    /// Margin inside `[1e-12, 1e-9]`.
    Indeterminate,
}

impl Regularity {
    pub fn classify(margin: f64) -> Self {
        if margin > REGULARITY_TOL {
            Regularity::Regular
        } else if margin < SINGULARITY_TOL {
            Regularity::Singular
        } else {
            Regularity::Indeterminate
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapRow {
    /// Simple-root coefficients of `β`.
    pub root: Vec<i64>,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub lower_slack: f64,
    pub upper_slack: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapCertificate {
    /// Whether `μ` is dominant; bounds are only asserted in that case.
    pub applicable: bool,
    pub rows: Vec<GapRow>,
    pub min_slack: f64,
    /// `μ ∈ P^+` iff `μ̂` lies in the closed dominant chamber.
    pub dominance_consistent: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PauliCertificate {
    pub regular: bool,
    pub regularity: Regularity,
    pub margin: f64,
    /// Row-major matrix of `K_λ^k`.
    pub k_matrix: Vec<f64>,
    pub min_eigenvalue: f64,
    /// `max |K - B_{-iλ}|` over entries.
    pub hessian_deviation: f64,
    pub excluded: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetheSolution {
    pub system: String,
    pub weight: Vec<i64>,
    pub mu: Vec<f64>,
    pub mu_hat: Vec<f64>,
    /// `μ̂(a_i^∨)` for the simple coroots.
    pub mu_hat_pairings: Vec<f64>,
    pub lambda: Vec<Complex64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub min_hessian_eigenvalue: f64,
    pub bae_residual: f64,
    pub regular: bool,
    pub regularity: Regularity,
    pub regularity_margin: f64,
    pub gap: GapCertificate,
    pub pauli: PauliCertificate,
}

/// Eigenvalue bounds of a symmetric matrix.
pub fn symmetric_eigen_range(m: &DMatrix<f64>) -> (f64, f64) {
    let sym = (m + m.transpose()) * 0.5;
    let ev = sym.symmetric_eigenvalues();
    (ev.min(), ev.max())
}

/// Newton minimization of `S_k(μ, ·)` with Armijo backtracking.
pub fn solve_covector(
    rs: &RootSystem,
    k: &Multiplicity,
    mu: &[f64],
    opts: &SolveOptions,
) -> Result<(Vec<f64>, f64, usize, f64)> {
    k.require_positive(rs)?;
    let n = rs.rank as f64;
    let hk = rs.coxeter_k(k);
    let target = 2.0 * PI * norm(mu);
    let threshold = opts.tol * target.max(1.0);
    let mut xi = scale(mu, 2.0 * PI / (1.0 + hk / n));
    let mut min_eig = f64::INFINITY;
    let mut g = master_gradient(rs, k, mu, &xi);
    let mut gn = norm(&g);
    let mut it = 0;
    while gn > threshold {
        if it >= opts.max_iter {
            return Err(Error::NotConverged {
                iterations: it,
                grad_norm: gn,
            });
        }
        let h = master_hessian(rs, k, &xi);
        min_eig = min_eig.min(symmetric_eigen_range(&h).0);
        let chol = h
            .cholesky()
            .ok_or_else(|| Error::Linalg("Hessian is not positive definite".into()))?;
        let step = chol.solve(&DVector::from_column_slice(&g));
        let d: Vec<f64> = step.iter().map(|x| -x).collect();
        let slope = dot(&g, &d);
        let s0 = master_value(rs, k, mu, &xi)?;
        let mut t = 1.0;
        let mut next = axpy(&xi, t, &d);
        let mut halvings = 0;
        // Near the minimum the decrease of S drops below its rounding error,
        // so a full step that halves the gradient is accepted as well.
        let contracts = norm(&master_gradient(rs, k, mu, &next)) < 0.5 * gn;
        while !contracts && master_value(rs, k, mu, &next)? > s0 + 1e-4 * t * slope && halvings < 60 {
            t *= 0.5;
            halvings += 1;
            next = axpy(&xi, t, &d);
        }
        let g_next = master_gradient(rs, k, mu, &next);
        let gn_next = norm(&g_next);
        it += 1;
        if halvings == 60 && gn_next >= gn {
            // No further progress is possible in floating point.
            break;
        }
        xi = next;
        g = g_next;
        gn = gn_next;
    }
    if gn > threshold {
        return Err(Error::NotConverged {
            iterations: it,
            grad_norm: gn,
        });
    }
    if min_eig.is_infinite() {
        min_eig = symmetric_eigen_range(&master_hessian(rs, k, &xi)).0;
    }
    Ok((xi, gn, it, min_eig))
}

/// Solves the Bethe ansatz equations for the weight with the given
/// fundamental-weight coefficients and fills every certificate.
pub fn solve(
    rs: &RootSystem,
    wg: &WeylGroup,
    k: &Multiplicity,
    weight: &[i64],
    opts: &SolveOptions,
) -> Result<BetheSolution> {
    let mu = rs.weight(weight)?;
    let (mu_hat, grad_norm, iterations, min_eig) = solve_covector(rs, k, &mu, opts)?;
    let lambda: Vec<Complex64> = mu_hat.iter().map(|&x| Complex64::new(0.0, x)).collect();
    let margin = rs.regularity_margin(&lambda);
    let regularity = Regularity::classify(margin);
    let bae = bae_residual(rs, wg, k, &lambda);
    let gap = gap_certificate(rs, k, weight, &mu_hat)?;
    let pauli = pauli_certificate(rs, k, &lambda)?;
    Ok(BetheSolution {
        system: rs.name(),
        weight: weight.to_vec(),
        mu: mu.clone(),
        mu_hat_pairings: rs.weight_coordinates(&mu_hat),
        energy: dot(&mu_hat, &mu_hat),
        mu_hat,
        lambda,
        grad_norm,
        iterations,
        min_hessian_eigenvalue: min_eig,
        bae_residual: bae,
        regular: regularity == Regularity::Regular,
        regularity,
        regularity_margin: margin,
        gap,
        pauli,
    })
}

/// `‖μ̂ + σ_μ̂ - 2πμ‖`.
pub fn fixed_point_residual(rs: &RootSystem, k: &Multiplicity, mu: &[f64], mu_hat: &[f64]) -> f64 {
    norm(&master_gradient(rs, k, mu, mu_hat))
}

/// Maximum over `w ∈ W_0` of `|LHS - RHS|` in
/// `e^{wλ(φ^∨)} = (wλ(φ^∨)-k_φ)/(wλ(φ^∨)+k_φ) Π_{α∈Σ_0^+∩s_φΣ_0^-} (wλ(α^∨)-k_α)/(wλ(α^∨)+k_α)`.
pub fn bae_residual(rs: &RootSystem, wg: &WeylGroup, k: &Multiplicity, lambda: &[Complex64]) -> f64 {
    let phi = rs.highest_root;
    let roots: Vec<usize> = rs
        .positive_roots()
        .filter(|&a| !rs.is_positive(rs.index_of(&rs.reflect(phi, &rs.roots[a]), 1e-9).unwrap()))
        .collect();
    let kphi = k.of_root(rs, phi);
    let mut max = 0.0;
    for w in 0..wg.order() {
        let wl = wg.act_c(w, lambda);
        let xphi = rs.pair_c(&wl, phi);
        let lhs = xphi.exp();
        let mut rhs = (xphi - kphi) / (xphi + kphi);
        for &a in &roots {
            let x = rs.pair_c(&wl, a);
            let ka = k.of_root(rs, a);
            rhs *= (x - ka) / (x + ka);
        }
        track(&mut max, (lhs - rhs).norm());
    }
    max
}

pub fn gap_certificate(rs: &RootSystem, k: &Multiplicity, weight: &[i64], mu_hat: &[f64]) -> Result<GapCertificate> {
    let mu = rs.weight(weight)?;
    let n = rs.rank as f64;
    let hk = rs.coxeter_k(k);
    let dominant = weight.iter().all(|&c| c >= 0);
    let hat_dominant = (0..rs.rank).all(|i| rs.pair(mu_hat, i) >= -SINGULARITY_TOL);
    let mut rows = Vec::new();
    let mut min_slack = f64::INFINITY;
    if dominant {
        for b in rs.positive_roots() {
            let m = 2.0 * PI * rs.pair(&mu, b);
            let lower = m / (1.0 + hk / n);
            let value = rs.pair(mu_hat, b);
            let row = GapRow {
                root: rs.coefficients[b].clone(),
                lower,
                value,
                upper: m,
                lower_slack: value - lower,
                upper_slack: m - value,
            };
            min_slack = min_slack.min(row.lower_slack).min(row.upper_slack);
            rows.push(row);
        }
    }
    let consistent = dominant == hat_dominant;
    let tol = 1e-11 * (1.0 + 2.0 * PI * norm(&mu));
    Ok(GapCertificate {
        applicable: dominant,
        holds: consistent && (!dominant || min_slack >= -tol),
        rows,
        min_slack,
        dominance_consistent: consistent,
    })
}

/// Checks `0 ≤ σ_λ(β^∨) ≤ (h_k/n) λ(β^∨)` at a dominant `λ`; returns the
/// smallest slack of either inequality.
pub fn sigma_bound_slack(rs: &RootSystem, k: &Multiplicity, lambda: &[f64]) -> f64 {
    let s = sigma(rs, k, lambda);
    let ratio = rs.coxeter_k(k) / rs.rank as f64;
    rs.positive_roots()
        .map(|b| {
            let sb = rs.pair(&s, b);
            sb.min(ratio * rs.pair(lambda, b) - sb)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Matrix of `K_λ^k(v) = v + Σ_α k_α α(v) α^∨ / (k_α² - λ(α^∨)²)`.
pub fn k_matrix(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64]) -> DMatrix<f64> {
    let n = rs.rank;
    let mut m = DMatrix::identity(n, n);
    for a in 0..rs.num_roots() {
        let ka = k.of_root(rs, a);
        let x = rs.pair_c(lambda, a);
        let w = (ka / (ka * ka - x * x)).re;
        let c = &rs.coroots[a];
        let r = &rs.roots[a];
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += w * c[i] * r[j];
            }
        }
    }
    m
}

pub fn pauli_certificate(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64]) -> Result<PauliCertificate> {
    let scale_l = lambda.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let max_re = lambda.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    if max_re > 1e-12 * scale_l {
        return Err(Error::NotImaginary(max_re));
    }
    k.require_positive(rs)?;
    let km = k_matrix(rs, k, lambda);
    let xi: Vec<f64> = lambda.iter().map(|z| z.im).collect();
    let h = master_hessian(rs, k, &xi);
    let dev = (&km - &h).abs().max();
    let (min_eig, _) = symmetric_eigen_range(&km);
    let margin = rs.regularity_margin(lambda);
    let regularity = Regularity::classify(margin);
    let regular = regularity == Regularity::Regular;
    let reason = match regularity {
        Regularity::Regular => None,
        Regularity::Singular => Some("singular BAE solution: Pauli principle, no W-invariant state".to_string()),
        Regularity::Indeterminate => Some("regularity margin in the indeterminate band [1e-12, 1e-9]".to_string()),
    };
    let n = rs.rank;
    Ok(PauliCertificate {
        regular,
        regularity,
        margin,
        k_matrix: (0..n * n).map(|i| km[(i / n, i % n)]).collect(),
        min_eigenvalue: min_eig,
        hessian_deviation: dev,
        excluded: !regular,
        reason,
    })
}

/// `max_w ‖solve(wμ) - w·solve(μ)‖` over the whole Weyl group.
pub fn equivariance_check(
    rs: &RootSystem,
    wg: &WeylGroup,
    k: &Multiplicity,
    weight: &[i64],
    opts: &SolveOptions,
    tol: f64,
) -> Result<CheckReport> {
    let mu = rs.weight(weight)?;
    let (hat, ..) = solve_covector(rs, k, &mu, opts)?;
    let mut max = 0.0;
    for w in 0..wg.order() {
        let wmu = wg.act(w, &mu);
        let coeffs = rs.integral_coordinates(&wmu, 1e-9)?;
        let (hat_w, ..) = solve_covector(rs, k, &rs.weight(&coeffs)?, opts)?;
        track(&mut max, dist(&hat_w, &wg.act(w, &hat)));
    }
    Ok(CheckReport::new(format!("equivariance_{}", rs.name()), max, tol, wg.order()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitRow {
    pub k: f64,
    pub distance: f64,
    pub envelope: f64,
    /// Largest `|μ̂(β^∨) - 2πμ(β^∨)|` against the per-root gap width.
    pub max_pairing_gap: f64,
    pub pairing_envelope: f64,
    pub within: bool,
}

/// `‖μ̂_k - 2πμ‖` against `2π max_β μ(β^∨) (h_k/n)/(1 + h_k/n)` for each `k`,
/// applied to both root lengths.
pub fn impenetrable_limit_study(
    rs: &RootSystem,
    weight: &[i64],
    k_values: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<LimitRow>> {
    let mu = rs.weight(weight)?;
    let target = scale(&mu, 2.0 * PI);
    let n = rs.rank as f64;
    k_values
        .iter()
        .map(|&kv| {
            let k = Multiplicity::constant(kv);
            let (hat, ..) = solve_covector(rs, &k, &mu, opts)?;
            let hk = rs.coxeter_k(&k);
            let ratio = (hk / n) / (1.0 + hk / n);
            let max_pair = rs.positive_roots().map(|b| rs.pair(&mu, b)).fold(0.0, f64::max);
            let envelope = 2.0 * PI * max_pair * ratio;
            let d = sub(&hat, &target);
            let max_pairing_gap = rs
                .positive_roots()
                .map(|b| rs.pair(&d, b).abs() / (2.0 * PI * rs.pair(&mu, b).abs() * ratio).max(f64::MIN_POSITIVE))
                .filter(|x| x.is_finite())
                .fold(0.0, f64::max);
            let distance = norm(&d);
            Ok(LimitRow {
                k: kv,
                distance,
                envelope,
                max_pairing_gap,
                pairing_envelope: 1.0,
                within: distance <= envelope && max_pairing_gap <= 1.0 + 1e-9,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::CartanKind;

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn setup(kind: CartanKind, n: usize) -> (RootSystem, WeylGroup) {
        let rs = RootSystem::new(kind, n).unwrap();
        let wg = WeylGroup::new(&rs).unwrap();
        (rs, wg)
    }

    #[test]
    fn arctan_integral_matches_quadrature() {
        let (x, c) = (2.3, 0.7);
        let m = 20_000;
        let h = x / m as f64;
        let simpson: f64 = (0..=m)
            .map(|i| {
                let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * (i as f64 * h / c).atan()
            })
            .sum::<f64>()
            * h
            / 3.0;
        assert!((arctan_integral(x, c) - simpson).abs() < 1e-12);
    }

    #[test]
    fn a1_root_matches_bisection() {
        let (rs, wg) = setup(CartanKind::A, 1);
        let k = Multiplicity::constant(2.0);
        let sol = solve(&rs, &wg, &k, &[1], &SolveOptions::default()).unwrap();
        let t = bisect(|t| t + 4.0 * (t / 2.0).atan() - 2.0 * PI, 0.0, 2.0 * PI);
        assert!((sol.mu_hat_pairings[0] - t).abs() < 1e-10);
        assert!((t - 2.6135).abs() < 1e-3);
        assert!(sol.regular);
        assert!(sol.bae_residual < 1e-9);
        assert!(sol.gap.holds);
    }

    #[test]
    fn a1_gradient_pairing_formula() {
        let rs = RootSystem::new(CartanKind::A, 1).unwrap();
        let k = Multiplicity::constant(1.7);
        let mu = rs.fundamental_weights[0].clone();
        for t in [0.3, 1.9, -2.4] {
            let xi = scale(&rs.roots[0], t / 2.0);
            let g = master_gradient(&rs, &k, &mu, &xi);
            let want = t + 4.0 * (t / 1.7).atan() - 2.0 * PI;
            assert!((rs.pair(&g, 0) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weight_gives_zero() {
        let (rs, wg) = setup(CartanKind::B, 2);
        let sol = solve(&rs, &wg, &Multiplicity::new(1.0, 2.0), &[0, 0], &SolveOptions::default()).unwrap();
        assert!(sol.mu_hat.iter().all(|&x| x == 0.0));
        assert!(!sol.regular);
        assert!(sol.pauli.excluded);
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let rs = RootSystem::new(CartanKind::G, 2).unwrap();
        let k = Multiplicity::new(0.8, 2.5);
        let mu = rs.weight(&[1, 2]).unwrap();
        let xi = vec![0.7, -1.3];
        let h = master_hessian(&rs, &k, &xi);
        let eps = 1e-6;
        for j in 0..2 {
            let mut p = xi.clone();
            let mut m = xi.clone();
            p[j] += eps;
            m[j] -= eps;
            let gp = master_gradient(&rs, &k, &mu, &p);
            let gm = master_gradient(&rs, &k, &mu, &m);
            for i in 0..2 {
                assert!(((gp[i] - gm[i]) / (2.0 * eps) - h[(i, j)]).abs() < 1e-6);
            }
        }
        assert!(symmetric_eigen_range(&h).0 > 1.0);
    }

    #[test]
    fn pauli_exclusion_for_wall_weight() {
        let (rs, wg) = setup(CartanKind::A, 2);
        let sol = solve(&rs, &wg, &Multiplicity::constant(1.0), &[1, 0], &SolveOptions::default()).unwrap();
        assert!(sol.mu_hat_pairings[1].abs() < 1e-12);
        assert!(!sol.regular);
        assert!(sol.pauli.excluded);
        assert!(sol.pauli.hessian_deviation < 1e-10);
        assert!(sol.pauli.min_eigenvalue > 0.0);
    }

    #[test]
    fn k_matrix_at_zero() {
        let rs = RootSystem::new(CartanKind::B, 2).unwrap();
        let k = Multiplicity::new(1.5, 0.5);
        let zero = vec![Complex64::new(0.0, 0.0); 2];
        let km = k_matrix(&rs, &k, &zero);
        let mut want = DMatrix::identity(2, 2);
        for a in 0..rs.num_roots() {
            let ka = k.of_root(&rs, a);
            for i in 0..2 {
                for j in 0..2 {
                    want[(i, j)] += rs.coroots[a][i] * rs.roots[a][j] / ka;
                }
            }
        }
        assert!((km - want).abs().max() < 1e-14);
    }

    #[test]
    fn non_imaginary_lambda_rejected() {
        let rs = RootSystem::new(CartanKind::A, 1).unwrap();
        let l = vec![Complex64::new(0.5, 1.0)];
        assert!(pauli_certificate(&rs, &Multiplicity::constant(1.0), &l).is_err());
    }
}
