//! Checkers for the relations satisfied by the operators.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::exp_poly::ExpPolynomial;
use crate::linalg::{axpy, dot};
use crate::operators::{
    integral_op, intertwiner, intertwiner_exp_closed_form, q_reflect, q_simple, q_word, reflect,
    DunklImage, PiecewiseEval, PiecewiseFunction, Reflected,
};
use crate::report::{track, CheckReport};
use crate::root_system::{Multiplicity, RootSystem};
use crate::sampling::{random_poly, random_regular_point, random_wall_point};

/// Random exponential polynomial of degree at most 2 whose nonzero
/// exponents pair with every coroot to at least `0.25` in modulus.
pub fn sample_function<R: Rng>(rng: &mut R, rs: &RootSystem, nterms: usize) -> ExpPolynomial {
    let n = rs.rank;
    let mut terms = vec![(vec![Complex64::new(0.0, 0.0); n], random_poly(rng, n, 2))];
    while terms.len() < nterms {
        let mu: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-0.8..0.8), rng.gen_range(-2.0..2.0)))
            .collect();
        if rs.regularity_margin(&mu) < 0.25 {
            continue;
        }
        let deg = rng.gen_range(0..=2);
        terms.push((mu, random_poly(rng, n, deg)));
    }
    ExpPolynomial::from_terms(n, terms)
}

fn scaled(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + a.norm().max(b.norm()))
}

fn rel_diff(f: &ExpPolynomial, g: &ExpPolynomial) -> f64 {
    f.max_difference(g) / (1.0 + f.max_abs_coefficient().max(g.max_abs_coefficient()))
}

/// Coxeter order `m_ij` of two simple affine reflections, `None` if infinite.
pub fn coxeter_order(rs: &RootSystem, i: usize, j: usize) -> Option<usize> {
    let ai = rs.simple_affine(i).base;
    let aj = rs.simple_affine(j).base;
    let p = (rs.pair(&rs.roots[ai], aj) * rs.pair(&rs.roots[aj], ai)).round() as i64;
    match p {
        0 => Some(2),
        1 => Some(3),
        2 => Some(4),
        3 => Some(6),
        _ => None,
    }
}

/// `I(a)² f = 0` termwise for every simple affine root.
pub fn check_quadratic(rs: &RootSystem, fs: &[ExpPolynomial], tol: f64) -> CheckReport {
    let mut max = 0.0;
    for f in fs {
        for j in 0..=rs.rank {
            let a = rs.simple_affine(j);
            let g = integral_op(rs, a, &integral_op(rs, a, f));
            track(&mut max, g.max_abs_coefficient());
        }
    }
    CheckReport::new("quadratic_relation", max, tol, fs.len() * (rs.rank + 1))
}

/// Alternating words of length `m_ij` give the same `Q_k` action.
pub fn check_braid(rs: &RootSystem, k: &Multiplicity, fs: &[ExpPolynomial], tol: f64) -> CheckReport {
    let mut max = 0.0;
    let mut samples = 0;
    for i in 0..=rs.rank {
        for j in i + 1..=rs.rank {
            let Some(m) = coxeter_order(rs, i, j) else { continue };
            let w1: Vec<usize> = (0..m).map(|t| if t % 2 == 0 { i } else { j }).collect();
            let w2: Vec<usize> = (0..m).map(|t| if t % 2 == 0 { j } else { i }).collect();
            for f in fs {
                let d = rel_diff(&q_word(rs, &w1, k, f), &q_word(rs, &w2, k, f));
                track(&mut max, d);
                samples += 1;
            }
        }
    }
    CheckReport::new("braid_relations", max, tol, samples)
}

/// `Q_{k,a}² = id` for simple affine roots.
pub fn check_involution(rs: &RootSystem, k: &Multiplicity, fs: &[ExpPolynomial], tol: f64) -> CheckReport {
    let mut max = 0.0;
    for f in fs {
        for j in 0..=rs.rank {
            let g = q_simple(rs, j, k, &q_simple(rs, j, k, f));
            track(&mut max, rel_diff(&g, f));
        }
    }
    CheckReport::new("q_involution", max, tol, fs.len() * (rs.rank + 1))
}

/// `(Q_{k,a} f)(v) = f(v)` for `v ∈ V_a`.
pub fn check_wall_restriction<R: Rng>(
    rs: &RootSystem,
    k: &Multiplicity,
    f: &ExpPolynomial,
    points_per_wall: usize,
    rng: &mut R,
    tol: f64,
) -> CheckReport {
    let mut max = 0.0;
    for j in 0..=rs.rank {
        let a = rs.simple_affine(j);
        let q = q_reflect(rs, a, k, f);
        for _ in 0..points_per_wall {
            let v = random_wall_point(rng, rs, a, 1.5, 1e-3);
            track(&mut max, scaled(q.eval(&v), f.eval(&v)));
        }
    }
    CheckReport::new("wall_restriction", max, tol, points_per_wall * (rs.rank + 1))
}

/// `I(b)(f - s_b f) = 0`, and `I(b) g ≠ 0` for `g = f + s_b f ≠ 0`.
pub fn check_antisymmetry(rs: &RootSystem, fs: &[ExpPolynomial], tol: f64) -> CheckReport {
    let mut max = 0.0;
    let mut converse_ok = true;
    for f in fs {
        for j in 0..=rs.rank {
            let b = rs.simple_affine(j);
            let sf = reflect(rs, b, f);
            let anti = f.sub(&sf);
            track(&mut max, integral_op(rs, b, &anti).max_abs_coefficient());
            let sym = f.add(&sf);
            if sym.max_abs_coefficient() > 1e-6 && integral_op(rs, b, &sym).max_abs_coefficient() < 1e-6 {
                converse_ok = false;
            }
        }
    }
    let r = CheckReport::new("antisymmetry_kernel", max, tol, fs.len() * (rs.rank + 1));
    if converse_ok {
        r
    } else {
        CheckReport { pass: false, ..r }.with_note("a symmetric function was annihilated")
    }
}

/// `Q_{k,a} ∂_u - ∂_{s_{Da} u} Q_{k,a} = k_a Da(u)` as operators.
pub fn check_symbolic_cross<R: Rng>(
    rs: &RootSystem,
    k: &Multiplicity,
    fs: &[ExpPolynomial],
    rng: &mut R,
    tol: f64,
) -> CheckReport {
    let mut max = 0.0;
    for f in fs {
        for j in 0..=rs.rank {
            let a = rs.simple_affine(j);
            let u: Vec<f64> = (0..rs.rank).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let su = rs.reflect(a.base, &u);
            let lhs = q_reflect(rs, a, k, &f.directional_derivative(&u))
                .sub(&q_reflect(rs, a, k, f).directional_derivative(&su));
            let rhs = f.scale_real(k.of_affine(rs, a) * dot(&rs.roots[a.base], &u));
            track(&mut max, rel_diff(&lhs, &rhs));
        }
    }
    CheckReport::new("symbolic_cross_relation", max, tol, fs.len() * (rs.rank + 1))
}

/// `(D_u F)(s_a v) = (D_{s_{Da} u}(s_a F))(v) + k_a Da(u) F(v)` with `F = T_k f`.
pub fn check_cross_relation(
    rs: Arc<RootSystem>,
    k: &Multiplicity,
    j: usize,
    u: &[f64],
    f: &ExpPolynomial,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<CheckReport> {
    let a = rs.simple_affine(j);
    let big: Arc<dyn PiecewiseFunction> = Arc::new(PiecewiseEval::new(rs.clone(), *k, f.clone()));
    let du = DunklImage::new(big.clone(), u.to_vec(), *k);
    let su = rs.reflect(a.base, u);
    let reflected: Arc<dyn PiecewiseFunction> = Arc::new(Reflected::new(big.clone(), a));
    let dsu = DunklImage::new(reflected, su, *k);
    let ka = k.of_affine(&rs, a) * dot(&rs.roots[a.base], u);
    let mut max = 0.0;
    for v in points {
        let lhs = du.eval(&rs.affine_reflect(a, v))?;
        let rhs = dsu.eval(v)? + big.eval(v)? * ka;
        track(&mut max, scaled(lhs, rhs));
    }
    Ok(CheckReport::new(format!("cross_relation_a{j}"), max, tol, points.len()))
}

/// `[D_u, D_{u'}] T_k f = 0`.
pub fn check_commutator(
    rs: Arc<RootSystem>,
    k: &Multiplicity,
    u: &[f64],
    u2: &[f64],
    f: &ExpPolynomial,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<CheckReport> {
    let big: Arc<dyn PiecewiseFunction> = Arc::new(PiecewiseEval::new(rs, *k, f.clone()));
    let d1: Arc<dyn PiecewiseFunction> = Arc::new(DunklImage::new(big.clone(), u.to_vec(), *k));
    let d2: Arc<dyn PiecewiseFunction> = Arc::new(DunklImage::new(big, u2.to_vec(), *k));
    let d21 = DunklImage::new(d1, u2.to_vec(), *k);
    let d12 = DunklImage::new(d2, u.to_vec(), *k);
    let mut max = 0.0;
    for v in points {
        track(&mut max, scaled(d21.eval(v)?, d12.eval(v)?));
    }
    Ok(CheckReport::new("dunkl_commutator", max, tol, points.len()))
}

/// `T_k(∂_u f) = D_u^k(T_k f)`.
pub fn check_intertwining(
    rs: Arc<RootSystem>,
    k: &Multiplicity,
    u: &[f64],
    f: &ExpPolynomial,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<CheckReport> {
    let big: Arc<dyn PiecewiseFunction> = Arc::new(PiecewiseEval::new(rs.clone(), *k, f.clone()));
    let du = DunklImage::new(big, u.to_vec(), *k);
    let tdf = PiecewiseEval::new(rs, *k, f.directional_derivative(u));
    let mut max = 0.0;
    for v in points {
        track(&mut max, scaled(du.eval(v)?, tdf.eval(v)?));
    }
    Ok(CheckReport::new("intertwining", max, tol, points.len()))
}

/// `J_k ∂_u = ∂_{s_φ u} J_k`.
pub fn check_intertwiner_commutation<R: Rng>(
    rs: &RootSystem,
    k: &Multiplicity,
    fs: &[ExpPolynomial],
    rng: &mut R,
    tol: f64,
) -> CheckReport {
    let mut max = 0.0;
    for f in fs {
        let u: Vec<f64> = (0..rs.rank).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let su = rs.reflect(rs.highest_root, &u);
        let lhs = intertwiner(rs, k, &f.directional_derivative(&u));
        let rhs = intertwiner(rs, k, f).directional_derivative(&su);
        track(&mut max, rel_diff(&lhs, &rhs));
    }
    CheckReport::new("intertwiner_commutation", max, tol, fs.len())
}

/// `J_k e^μ` against its closed form.
pub fn check_intertwiner_closed_form(
    rs: &RootSystem,
    k: &Multiplicity,
    mus: &[Vec<Complex64>],
    tol: f64,
) -> CheckReport {
    let mut max = 0.0;
    for mu in mus {
        let direct = intertwiner(rs, k, &ExpPolynomial::exp(mu));
        track(&mut max, rel_diff(&direct, &intertwiner_exp_closed_form(rs, k, mu)));
    }
    CheckReport::new("intertwiner_closed_form", max, tol, mus.len())
}

/// Result of comparing `Σ_i D_i² T_k f` with Laplacians of `T_k f`.
#[derive(Debug, Clone)]
pub struct DescentReport {
    /// Nested Dunkl operators against the exact alcove Laplacian.
    pub symbolic: CheckReport,
    /// Exact alcove Laplacian against central finite differences.
    pub finite_difference: CheckReport,
}

/// `p_2(D^k) = Δ` on `W_0`-invariant `p_2 = ‖·‖²`, checked on `T_k f`.
pub fn check_w0_invariant_descent(
    rs: Arc<RootSystem>,
    k: &Multiplicity,
    f: &ExpPolynomial,
    points: &[Vec<f64>],
    tol: f64,
    fd_tol: f64,
) -> Result<DescentReport> {
    let n = rs.rank;
    let big: Arc<dyn PiecewiseFunction> = Arc::new(PiecewiseEval::new(rs.clone(), *k, f.clone()));
    let squares: Vec<DunklImage> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let d: Arc<dyn PiecewiseFunction> = Arc::new(DunklImage::new(big.clone(), e.clone(), *k));
            DunklImage::new(d, e, *k)
        })
        .collect();
    let mut sym = 0.0;
    let mut fd = 0.0;
    for v in points {
        let dunkl: Complex64 = squares.iter().map(|d| d.eval(v)).sum::<Result<Complex64>>()?;
        let rep = big.representative(v)?;
        let exact = rep.laplacian().eval(v);
        track(&mut sym, scaled(dunkl, exact));
        let h = (0.5 * rs.wall_distance(v)).min(1e-3);
        let centre = rep.eval(v);
        let mut lap = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let plus = big.eval(&axpy(v, h, &e))?;
            let minus = big.eval(&axpy(v, -h, &e))?;
            lap += (plus - centre * 2.0 + minus) / (h * h);
        }
        track(&mut fd, scaled(lap, exact));
    }
    Ok(DescentReport {
        symbolic: CheckReport::new("w0_invariant_descent", sym, tol, points.len()),
        finite_difference: CheckReport::new("laplacian_finite_difference", fd, fd_tol, points.len()),
    })
}

/// Regular sample points in a ball covering several alcoves.
pub fn regular_points<R: Rng>(rng: &mut R, rs: &RootSystem, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| random_regular_point(rng, rs, 1.6, 0.02))
        .collect()
}
