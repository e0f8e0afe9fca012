//! Integral operators, integral-reflection operators and the propagation
//! operator on exponential polynomials.

pub mod checks;
mod piecewise;

use num_complex::Complex64;

use crate::exp_poly::{ExpPolynomial, Polynomial};
use crate::linalg::cdot;
use crate::root_system::{AffineRoot, Multiplicity, RootSystem};

pub use piecewise::{chi, dunkl_eval, word_map, Analytic, DunklImage, PiecewiseEval, PiecewiseFunction, Reflected, REGULAR_TOL};

/// Below this `|μ(Da^∨)|` the integral uses the series branch.
pub const DEGENERATE_TOL: f64 = 1e-3;

/// Range of `|a(v)|` over which the series branch is accurate to roundoff.
const SERIES_RANGE: f64 = 20.0;

fn factorial(n: u32) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

/// `(I(a)f)(v) = ∫_0^{a(v)} f(v - t Da^∨) dt` in closed form.
pub fn integral_op(rs: &RootSystem, a: AffineRoot, f: &ExpPolynomial) -> ExpPolynomial {
    let n = rs.rank;
    let c = &rs.coroots[a.base];
    let da = &rs.roots[a.base];
    let av = Polynomial::affine(da, a.offset as f64);
    let one = Complex64::new(1.0, 0.0);
    let mut terms: Vec<(Vec<Complex64>, Polynomial)> = Vec::new();

    for t in f.terms() {
        let mu = &t.exponent;
        let nu = cdot(mu, c);
        // p(v - t c) = Σ_j t^j q_j(v)
        let deg = t.poly.degree();
        let mut q = Vec::with_capacity(deg as usize + 1);
        let mut dp = t.poly.clone();
        for j in 0..=deg {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 } / factorial(j);
            q.push(dp.scale(Complex64::new(s, 0.0)));
            dp = dp.directional_derivative(c);
        }
        // Truncation order of e^{-νt} for the series branch.
        let mut order = 0u32;
        if nu.norm() < DEGENERATE_TOL {
            let x = nu.norm() * SERIES_RANGE;
            let mut term = 1.0;
            while term > 1e-17 && order < 40 {
                order += 1;
                term *= x / order as f64;
            }
        }
        let max_pow = deg + order + 1;
        let mut apow = vec![Polynomial::one(n)];
        for i in 1..=max_pow as usize {
            let next = apow[i - 1].mul(&av);
            apow.push(next);
        }

        if nu.norm() < DEGENERATE_TOL {
            let mut poly = Polynomial::zero(n);
            for (j, qj) in q.iter().enumerate() {
                for r in 0..=order {
                    let coef = (-nu).powu(r) / factorial(r) / (j as f64 + r as f64 + 1.0);
                    poly.add_scaled(&qj.mul(&apow[j + r as usize + 1]), coef);
                }
            }
            terms.push((mu.clone(), poly));
        } else {
            let mut first = Polynomial::zero(n);
            let mut second = Polynomial::zero(n);
            for (j, qj) in q.iter().enumerate() {
                let jf = factorial(j as u32);
                first.add_scaled(qj, one * jf / nu.powu(j as u32 + 1));
                for i in 0..=j {
                    let coef = one * (jf / factorial(i as u32)) / nu.powu((j + 1 - i) as u32);
                    second.add_scaled(&qj.mul(&apow[i]), coef);
                }
            }
            let shift = (-nu * a.offset as f64).exp();
            let reflected: Vec<Complex64> = mu.iter().zip(da).map(|(m, d)| m - nu * d).collect();
            terms.push((mu.clone(), first));
            terms.push((reflected, second.scale(-shift)));
        }
    }
    ExpPolynomial::from_terms(n, terms)
}

/// `f ∘ s_a`.
pub fn reflect(rs: &RootSystem, a: AffineRoot, f: &ExpPolynomial) -> ExpPolynomial {
    let (m, b) = rs.affine_reflection_map(a);
    f.pullback(&m, &b)
}

/// `Q_{k,a} f = f ∘ s_a + k_a I(a) f`.
pub fn q_reflect(rs: &RootSystem, a: AffineRoot, k: &Multiplicity, f: &ExpPolynomial) -> ExpPolynomial {
    let ka = k.of_affine(rs, a);
    let base = reflect(rs, a, f);
    if ka == 0.0 {
        return base;
    }
    base.add(&integral_op(rs, a, f).scale_real(ka))
}

pub fn q_simple(rs: &RootSystem, j: usize, k: &Multiplicity, f: &ExpPolynomial) -> ExpPolynomial {
    q_reflect(rs, rs.simple_affine(j), k, f)
}

/// `Q_k(s_{w[0]} s_{w[1]} ⋯) f = Q_{w[0]}(Q_{w[1]}(⋯ f))` over affine simple
/// indices `0..=n`.
pub fn q_word(rs: &RootSystem, word: &[usize], k: &Multiplicity, f: &ExpPolynomial) -> ExpPolynomial {
    word.iter()
        .rev()
        .fold(f.clone(), |g, &j| q_simple(rs, j, k, &g))
}

/// Finite Weyl group element given by a word over `1..=n`.
pub fn q_weyl_word(rs: &RootSystem, word: &[usize], k: &Multiplicity, f: &ExpPolynomial) -> ExpPolynomial {
    q_word(rs, word, k, f)
}

/// `J_k = ∂_{φ^∨} Q_k(a_0) + k_φ`.
pub fn intertwiner(rs: &RootSystem, k: &Multiplicity, f: &ExpPolynomial) -> ExpPolynomial {
    let kphi = k.of_root(rs, rs.highest_root);
    q_simple(rs, 0, k, f)
        .directional_derivative(rs.phi_coroot())
        .add(&f.scale_real(kphi))
}

/// `J_k e^μ = -(μ(φ^∨) + k_φ) e^{μ(φ^∨)} e^{s_φ μ}`.
pub fn intertwiner_exp_closed_form(rs: &RootSystem, k: &Multiplicity, mu: &[Complex64]) -> ExpPolynomial {
    let kphi = k.of_root(rs, rs.highest_root);
    let p = rs.pair_c(mu, rs.highest_root);
    let smu = rs.reflect_c(rs.highest_root, mu);
    ExpPolynomial::exp(&smu).scale(-(p + kphi) * p.exp())
}

/// `Q_k(a_0) e^μ = -(k_φ/μ(φ^∨)) e^μ + ((μ(φ^∨)+k_φ)/μ(φ^∨)) e^{μ(φ^∨)} e^{s_φ μ}`.
pub fn q0_exp_closed_form(rs: &RootSystem, k: &Multiplicity, mu: &[Complex64]) -> ExpPolynomial {
    let kphi = k.of_root(rs, rs.highest_root);
    let p = rs.pair_c(mu, rs.highest_root);
    let smu = rs.reflect_c(rs.highest_root, mu);
    ExpPolynomial::exp(mu)
        .scale(-kphi / p)
        .add(&ExpPolynomial::exp(&smu).scale((p + kphi) / p * p.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::CartanKind;
    use crate::sampling::random_exp_poly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Composite Gauss-Legendre quadrature of the defining integral.
    fn quad(rs: &RootSystem, a: AffineRoot, f: &ExpPolynomial, v: &[f64]) -> Complex64 {
        let nodes = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.0, 0.568_888_888_888_888_9),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let upper = rs.affine_value(a, v);
        let panels = 200;
        let h = upper / panels as f64;
        let cvec = &rs.coroots[a.base];
        let mut s = c(0.0, 0.0);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in nodes {
                let t = mid + 0.5 * h * x;
                let pt = crate::linalg::axpy(v, -t, cvec);
                s += f.eval(&pt) * (0.5 * h * w);
            }
        }
        s
    }

    #[test]
    fn integral_matches_quadrature() {
        let rs = RootSystem::new(CartanKind::B, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for j in 0..=2 {
            let a = rs.simple_affine(j);
            let f = random_exp_poly(&mut rng, 2, 3, 2, 1.5);
            let g = integral_op(&rs, a, &f);
            for v in [[0.3, -0.4], [1.1, 0.7]] {
                let want = quad(&rs, a, &f, &v);
                assert!((g.eval(&v) - want).norm() < 1e-9 * (1.0 + want.norm()));
            }
        }
    }

    #[test]
    fn integral_of_constant_is_root_value() {
        let rs = RootSystem::new(CartanKind::A, 2).unwrap();
        let a = rs.simple_affine(0);
        let one = ExpPolynomial::constant(2, c(1.0, 0.0));
        let g = integral_op(&rs, a, &one);
        let v = [0.37, -1.2];
        assert!((g.eval(&v) - c(rs.affine_value(a, &v), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn integral_of_exponential_closed_form() {
        let rs = RootSystem::new(CartanKind::A, 1).unwrap();
        let a = rs.simple_affine(1);
        let mu = [c(0.3, 1.7)];
        let g = integral_op(&rs, a, &ExpPolynomial::exp(&mu));
        let nu = rs.pair_c(&mu, 0);
        let want = ExpPolynomial::exp(&mu)
            .sub(&reflect(&rs, a, &ExpPolynomial::exp(&mu)))
            .scale(1.0 / nu);
        assert!(g.approx_equal(&want, 1e-13));
    }

    #[test]
    fn degenerate_branch_is_continuous() {
        let rs = RootSystem::new(CartanKind::A, 1).unwrap();
        let a = rs.simple_affine(0);
        let v = [0.4];
        for eps in [5e-4, 1e-7, 1e-9] {
            let mu = [c(eps, 0.0)];
            let f = ExpPolynomial::term(Polynomial::variable(1, 0), &mu);
            let want = quad(&rs, a, &f, &v);
            assert!((integral_op(&rs, a, &f).eval(&v) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn q0_matches_closed_form() {
        let rs = RootSystem::new(CartanKind::G, 2).unwrap();
        let k = Multiplicity::new(1.3, 0.6);
        let mu = [c(0.2, 1.1), c(-0.5, 0.3)];
        let direct = q_simple(&rs, 0, &k, &ExpPolynomial::exp(&mu));
        assert!(direct.approx_equal(&q0_exp_closed_form(&rs, &k, &mu), 1e-12));
        let j = intertwiner(&rs, &k, &ExpPolynomial::exp(&mu));
        assert!(j.approx_equal(&intertwiner_exp_closed_form(&rs, &k, &mu), 1e-12));
    }

    #[test]
    fn zero_multiplicity_is_plain_reflection() {
        let rs = RootSystem::new(CartanKind::A, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_exp_poly(&mut rng, 2, 2, 2, 1.0);
        let g = q_word(&rs, &[1, 2], &Multiplicity::zero(), &f);
        let v = [0.3, 0.1];
        let img = rs.reflect(1, &rs.reflect(0, &v));
        assert!((g.eval(&v) - f.eval(&img)).norm() < 1e-12);
    }
}
