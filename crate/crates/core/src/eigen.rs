//! Bethe ansatz eigenfunctions and their finite-difference verification.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::{BetheSolution, REGULARITY_TOL};
use crate::error::{Error, Result};
use crate::exp_poly::ExpPolynomial;
use crate::linalg::{axpy, norm};
use crate::operators::q_simple;
use crate::report::track;
use crate::root_system::{AffineRoot, Multiplicity, RootSystem};
use crate::weyl::WeylGroup;

/// Pole threshold for `λ(α^∨)` in the c-function.
pub const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CFunctionValue {
    pub value: Complex64,
    pub pole_flag: bool,
}

/// `c̃_k(λ) = Π_{α>0} (λ(α^∨) + k_α) / λ(α^∨)`; infinite at poles.
pub fn c_tilde(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64]) -> CFunctionValue {
    let mut value = Complex64::new(1.0, 0.0);
    let mut pole = false;
    for a in rs.positive_roots() {
        let x = rs.pair_c(lambda, a);
        if x.norm() < POLE_TOL {
            pole = true;
        } else {
            value *= (x + k.of_root(rs, a)) / x;
        }
    }
    if pole {
        value = Complex64::new(f64::INFINITY, 0.0);
    }
    CFunctionValue {
        value,
        pole_flag: pole,
    }
}

/// Regularized c-function: vanishing factors are skipped.
pub fn c_reg(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64]) -> Complex64 {
    rs.positive_roots()
        .map(|a| (rs.pair_c(lambda, a), k.of_root(rs, a)))
        .filter(|(x, _)| x.norm() >= POLE_TOL)
        .map(|(x, ka)| (x + ka) / x)
        .product()
}

fn require_regular(rs: &RootSystem, lambda: &[Complex64]) -> Result<()> {
    let margin = rs.regularity_margin(lambda);
    if margin > REGULARITY_TOL {
        Ok(())
    } else {
        Err(Error::Singular { margin })
    }
}

/// `ψ_λ^k = (1/#W_0) Σ_w c̃_k(wλ) e^{wλ}` for regular `λ`.
pub fn psi_bethe(rs: &RootSystem, wg: &WeylGroup, k: &Multiplicity, lambda: &[Complex64]) -> Result<ExpPolynomial> {
    require_regular(rs, lambda)?;
    let inv = 1.0 / wg.order() as f64;
    let terms = (0..wg.order())
        .map(|w| {
            let wl = wg.act_c(w, lambda);
            let c = c_tilde(rs, k, &wl).value * inv;
            (wl, crate::exp_poly::Polynomial::constant(rs.rank, c))
        })
        .collect();
    Ok(ExpPolynomial::from_terms(rs.rank, terms))
}

/// `(1/#W_0) Σ_w c̃_k(wλ)`, expected to equal 1.
pub fn psi_normalization(rs: &RootSystem, wg: &WeylGroup, k: &Multiplicity, lambda: &[Complex64]) -> Complex64 {
    let s: Complex64 = (0..wg.order())
        .map(|w| c_tilde(rs, k, &wg.act_c(w, lambda)).value)
        .sum();
    s / wg.order() as f64
}

/// `Q_k(w) e^λ` for every `w ∈ W_0`, in enumeration order.
pub fn q_orbit(rs: &RootSystem, wg: &WeylGroup, k: &Multiplicity, lambda: &[Complex64]) -> Vec<ExpPolynomial> {
    let simple: Vec<usize> = (0..rs.rank)
        .map(|i| {
            (0..wg.order())
                .find(|&w| wg.elements[w].word == [i + 1])
                .expect("simple reflections are enumerated")
        })
        .collect();
    let mut out: Vec<Option<ExpPolynomial>> = vec![None; wg.order()];
    out[0] = Some(ExpPolynomial::exp(lambda));
    for w in 1..wg.order() {
        let i = wg.elements[w].word[0];
        let parent = wg.compose(simple[i - 1], w);
        let g = q_simple(rs, i, k, out[parent].as_ref().expect("parents precede children"));
        out[w] = Some(g);
    }
    out.into_iter().map(|g| g.unwrap()).collect()
}

/// `(1/#W_0) Σ_w Q_k(w) e^λ`.
pub fn psi_via_operators(rs: &RootSystem, wg: &WeylGroup, k: &Multiplicity, lambda: &[Complex64]) -> ExpPolynomial {
    let mut acc = ExpPolynomial::zero(rs.rank);
    for g in q_orbit(rs, wg, k, lambda) {
        acc.add_assign(&g);
    }
    acc.scale_real(1.0 / wg.order() as f64)
}

/// `ψ_λ^∞ = (1/#W_0) Π_{α>0} λ(α^∨)^{-1} Σ_w (-1)^{l(w)} e^{wλ}` for regular
/// `λ ∈ 2πi P`.
pub fn psi_impenetrable(rs: &RootSystem, wg: &WeylGroup, lambda: &[Complex64]) -> Result<ExpPolynomial> {
    let max_re = lambda.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    if max_re > 1e-12 {
        return Err(Error::NotImaginary(max_re));
    }
    let mu: Vec<f64> = lambda.iter().map(|z| z.im / (2.0 * PI)).collect();
    if rs.integral_coordinates(&mu, 1e-9).is_err() {
        return Err(Error::NotInWeightLattice);
    }
    require_regular(rs, lambda)?;
    let mut pref = Complex64::new(1.0 / wg.order() as f64, 0.0);
    for a in rs.positive_roots() {
        pref /= rs.pair_c(lambda, a);
    }
    let terms = (0..wg.order())
        .map(|w| {
            let c = pref * wg.sign(w);
            (wg.act_c(w, lambda), crate::exp_poly::Polynomial::constant(rs.rank, c))
        })
        .collect();
    Ok(ExpPolynomial::from_terms(rs.rank, terms))
}

/// `(1/#W_0) Σ_w e^{wλ}`.
pub fn psi_free(rs: &RootSystem, wg: &WeylGroup, lambda: &[Complex64]) -> ExpPolynomial {
    let c = Complex64::new(1.0 / wg.order() as f64, 0.0);
    let terms = (0..wg.order())
        .map(|w| (wg.act_c(w, lambda), crate::exp_poly::Polynomial::constant(rs.rank, c)))
        .collect();
    ExpPolynomial::from_terms(rs.rank, terms)
}

/// `W`-invariant extension of `ψ` from the closed fundamental alcove.
pub fn phi_eval(rs: &RootSystem, psi: &ExpPolynomial, v: &[f64]) -> Result<Complex64> {
    let (_, img) = rs.fold_to_alcove(v)?;
    Ok(psi.eval(&img))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMode {
    BetheK,
    Impenetrable,
    Free,
}

/// An eigenfunction `φ = G(ψ)` with its spectral data.
#[derive(Debug, Clone)]
pub struct EigenfunctionEval {
    pub lambda: Vec<Complex64>,
    pub mode: EigenMode,
    pub k: Multiplicity,
    pub psi: ExpPolynomial,
    /// `p_2(λ) = Σ λ_i²`; `Δφ = p_2(λ) φ` away from the walls.
    pub p2: Complex64,
}

impl EigenfunctionEval {
    pub fn from_lambda(rs: &RootSystem, wg: &WeylGroup, k: &Multiplicity, lambda: &[Complex64]) -> Result<Self> {
        let psi = psi_bethe(rs, wg, k, lambda)?;
        Ok(Self::assemble(lambda, EigenMode::BetheK, *k, psi))
    }

    pub fn from_solution(rs: &RootSystem, wg: &WeylGroup, k: &Multiplicity, sol: &BetheSolution) -> Result<Self> {
        Self::from_lambda(rs, wg, k, &sol.lambda)
    }

    pub fn impenetrable(rs: &RootSystem, wg: &WeylGroup, weight: &[i64]) -> Result<Self> {
        let lambda = lattice_lambda(rs, weight)?;
        let psi = psi_impenetrable(rs, wg, &lambda)?;
        let k = Multiplicity::constant(f64::INFINITY);
        Ok(Self::assemble(&lambda, EigenMode::Impenetrable, k, psi))
    }

    pub fn free(rs: &RootSystem, wg: &WeylGroup, weight: &[i64]) -> Result<Self> {
        let lambda = lattice_lambda(rs, weight)?;
        let psi = psi_free(rs, wg, &lambda);
        Ok(Self::assemble(&lambda, EigenMode::Free, Multiplicity::zero(), psi))
    }

    fn assemble(lambda: &[Complex64], mode: EigenMode, k: Multiplicity, psi: ExpPolynomial) -> Self {
        let p2 = lambda.iter().map(|z| z * z).sum();
        Self {
            lambda: lambda.to_vec(),
            mode,
            k,
            psi,
            p2,
        }
    }

    pub fn energy(&self) -> f64 {
        -self.p2.re
    }

    pub fn eval(&self, rs: &RootSystem, v: &[f64]) -> Result<Complex64> {
        phi_eval(rs, &self.psi, v)
    }

    /// Analytic representative of `φ` on the alcove containing `v`.
    pub fn representative(&self, rs: &RootSystem, v: &[f64]) -> Result<ExpPolynomial> {
        let (word, _) = rs.fold_to_alcove(v)?;
        let (m, b) = crate::operators::word_map(rs, &word);
        Ok(self.psi.pullback(&m, &b))
    }
}

/// `2πi μ` for integer fundamental-weight coefficients.
pub fn lattice_lambda(rs: &RootSystem, weight: &[i64]) -> Result<Vec<Complex64>> {
    Ok(rs
        .weight(weight)?
        .iter()
        .map(|&x| Complex64::new(0.0, 2.0 * PI * x))
        .collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenReport {
    pub step: f64,
    pub points: usize,
    /// `max |Δ_h φ - p_2(λ) φ| / max |p_2(λ) φ|` over the points.
    pub max_relative_residual: f64,
    pub max_abs_residual: f64,
}

/// Central second-difference Laplacian of `φ` against `p_2(λ) φ`.
pub fn verify_eigen(rs: &RootSystem, eig: &EigenfunctionEval, points: &[Vec<f64>], h: f64) -> Result<EigenReport> {
    let n = rs.rank;
    let mut max_abs = 0.0;
    let mut scale = 0.0;
    for v in points {
        let d = rs.wall_distance(v);
        if d <= 2.0 * h {
            return Err(Error::NearWall { distance: d });
        }
        let centre = eig.eval(rs, v)?;
        let mut lap = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = h;
            let p = eig.eval(rs, &axpy(v, 1.0, &e))?;
            let m = eig.eval(rs, &axpy(v, -1.0, &e))?;
            lap += (p - centre * 2.0 + m) / (h * h);
        }
        track(&mut max_abs, (lap - eig.p2 * centre).norm());
        track(&mut scale, (eig.p2 * centre).norm());
    }
    Ok(EigenReport {
        step: h,
        points: points.len(),
        max_relative_residual: max_abs / scale,
        max_abs_residual: max_abs,
    })
}

/// Observed order `log2(r(h)/r(h/2))` of the eigen-equation residual.
pub fn eigen_convergence_order(rs: &RootSystem, eig: &EigenfunctionEval, points: &[Vec<f64>], h: f64) -> Result<(f64, EigenReport, EigenReport)> {
    let coarse = verify_eigen(rs, eig, points, h)?;
    let fine = verify_eigen(rs, eig, points, 0.5 * h)?;
    let order = (coarse.max_abs_residual / fine.max_abs_residual).log2();
    Ok((order, coarse, fine))
}

/// Finite-difference stencil parameters for one-sided wall derivatives.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct JumpStencil {
    pub offset: f64,
    pub step: f64,
}

impl Default for JumpStencil {
    fn default() -> Self {
        Self {
            offset: 1e-6,
            step: 1e-4,
        }
    }
}

const NODES: usize = 5;

/// Weights `w` with `Σ_j w_j g(t_j) ≈ g^{(r)}(0)` at the nodes `t_j`.
fn stencil_weights(t: &[f64], r: usize) -> Vec<f64> {
    let m = t.len();
    let v = DMatrix::from_fn(m, m, |i, j| t[j].powi(i as i32));
    let mut rhs = DVector::zeros(m);
    rhs[r] = (1..=r).map(|x| x as f64).product();
    let w = v.lu().solve(&rhs).expect("distinct nodes");
    w.iter().copied().collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

/// Rigorous bound on `|∂_c^m f|` for a sum of exponentials with bounded
/// polynomial coefficients: `Σ |coef| (‖μ‖ ‖c‖)^m`.
fn derivative_bound(psi: &ExpPolynomial, c: &[f64], m: usize) -> f64 {
    let nc = norm(c);
    psi.terms()
        .iter()
        .map(|t| {
            let mu = t.exponent.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let re_growth = t.exponent.iter().map(|z| z.re.abs()).sum::<f64>();
            t.poly.sum_abs_coefficients() * (mu * nc).powi(m as i32) * re_growth.exp().max(1.0)
        })
        .sum()
}

/// One-sided derivatives `∂_c^r f(v ± 0c)` for `r = 0..=r_max` with their
/// error bounds.
pub fn one_sided_derivatives(
    f: &dyn Fn(&[f64]) -> Result<Complex64>,
    v: &[f64],
    c: &[f64],
    side: f64,
    r_max: usize,
    stencil: &JumpStencil,
    model: &ExpPolynomial,
) -> Result<Vec<(Complex64, f64)>> {
    let t: Vec<f64> = (0..NODES)
        .map(|j| side * (stencil.offset + j as f64 * stencil.step))
        .collect();
    let values: Vec<Complex64> = t
        .iter()
        .map(|&s| f(&axpy(v, s, c)))
        .collect::<Result<_>>()?;
    let b_trunc = derivative_bound(model, c, NODES);
    let b_round = 8.0 * f64::EPSILON * derivative_bound(model, c, 0);
    (0..=r_max)
        .map(|r| {
            let w = stencil_weights(&t, r);
            let d: Complex64 = w.iter().zip(&values).map(|(wj, fj)| fj * *wj).sum();
            let trunc: f64 = w
                .iter()
                .zip(&t)
                .map(|(wj, tj)| wj.abs() * tj.abs().powi(NODES as i32))
                .sum::<f64>()
                * b_trunc
                / factorial(NODES);
            let round: f64 = w.iter().map(|x| x.abs()).sum::<f64>() * b_round;
            Ok((d, trunc + round))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpOrderReport {
    pub order: usize,
    /// Largest `|jump - (1-(-1)^r) k_b ∂^{r-1}(v+0)|`.
    pub max_deviation: f64,
    /// Largest deviation divided by its certified noise floor.
    pub max_floor_ratio: f64,
    /// Largest relative deviation for odd orders.
    pub max_relative: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpReport {
    pub orders: Vec<JumpOrderReport>,
}

/// Derivative jump conditions of `f` across the walls `V_b` at the given
/// sub-regular points; `model` bounds the derivatives of the alcove pieces.
pub fn verify_jumps_with(
    rs: &RootSystem,
    k: &Multiplicity,
    f: &dyn Fn(&[f64]) -> Result<Complex64>,
    model: &ExpPolynomial,
    samples: &[(AffineRoot, Vec<f64>)],
    r_max: usize,
    stencil: &JumpStencil,
) -> Result<JumpReport> {
    let mut orders: Vec<JumpOrderReport> = (1..=r_max)
        .map(|order| JumpOrderReport {
            order,
            max_deviation: 0.0,
            max_floor_ratio: 0.0,
            max_relative: 0.0,
            samples: samples.len(),
        })
        .collect();
    for (b, v) in samples {
        if !rs.is_positive_affine(*b) {
            return Err(Error::Config("jump samples need positive affine roots".into()));
        }
        let other = crate::sampling::other_wall_distance(rs, *b, v);
        if other <= 1e-3 {
            return Err(Error::NotSubRegular { distance: other });
        }
        let c = &rs.coroots[b.base];
        let kb = k.of_affine(rs, *b);
        let plus = one_sided_derivatives(f, v, c, 1.0, r_max, stencil, model)?;
        let minus = one_sided_derivatives(f, v, c, -1.0, r_max, stencil, model)?;
        for r in 1..=r_max {
            let jump = plus[r].0 - minus[r].0;
            let factor = if r % 2 == 1 { 2.0 * kb } else { 0.0 };
            let rhs = plus[r - 1].0 * factor;
            let dev = (jump - rhs).norm();
            let floor = plus[r].1 + minus[r].1 + factor * plus[r - 1].1;
            let rep = &mut orders[r - 1];
            track(&mut rep.max_deviation, dev);
            track(&mut rep.max_floor_ratio, dev / floor);
            if r % 2 == 1 && factor > 0.0 {
                track(&mut rep.max_relative, dev / rhs.norm());
            }
        }
    }
    Ok(JumpReport { orders })
}

pub fn verify_jumps(
    rs: &RootSystem,
    eig: &EigenfunctionEval,
    samples: &[(AffineRoot, Vec<f64>)],
    r_max: usize,
    stencil: &JumpStencil,
) -> Result<JumpReport> {
    let f = |v: &[f64]| eig.eval(rs, v);
    verify_jumps_with(rs, &eig.k, &f, &eig.psi, samples, r_max, stencil)
}

/// `max |Q_k(a_0)ψ - ψ|` over coefficients, scaled by `1 + max |ψ|`.
pub fn bae_detector(rs: &RootSystem, k: &Multiplicity, psi: &ExpPolynomial) -> f64 {
    let q = q_simple(rs, 0, k, psi);
    q.max_difference(psi) / (1.0 + psi.max_abs_coefficient())
}

/// `max_v |k_{w_0}^{-1} ψ_{iμ̂_k}^k(v) - ψ_{2πiμ}^∞(v)| / max_v |ψ^∞(v)|` for
/// constant `k`, with `k_{w_0} = Π_{α>0} k_α`.
pub fn impenetrable_limit_identity(
    rs: &RootSystem,
    wg: &WeylGroup,
    weight: &[i64],
    k_value: f64,
    points: &[Vec<f64>],
    opts: &crate::bethe::SolveOptions,
) -> Result<f64> {
    let k = Multiplicity::constant(k_value);
    let sol = crate::bethe::solve(rs, wg, &k, weight, opts)?;
    let psi_k = psi_bethe(rs, wg, &k, &sol.lambda)?;
    let inf = EigenfunctionEval::impenetrable(rs, wg, weight)?;
    let kw0: f64 = rs.positive_roots().map(|a| k.of_root(rs, a)).product();
    let mut dev = 0.0;
    let mut scale = 0.0;
    for v in points {
        let want = inf.psi.eval(v);
        track(&mut dev, (psi_k.eval(v) / kw0 - want).norm());
        track(&mut scale, want.norm());
    }
    Ok(dev / scale)
}
