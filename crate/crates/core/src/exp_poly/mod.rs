//! Exponential polynomials `f(v) = Σ_μ p_μ(v) e^{μ(v)}`.

mod polynomial;

use std::collections::HashMap;

use num_complex::Complex64;

use crate::linalg::{cdot, mat_t_vec_c, stable_sum};

pub use polynomial::Polynomial;

/// Exponents closer than this in every component are identified.
pub const EXPONENT_TOL: f64 = 1e-10;
const GRID: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub exponent: Vec<Complex64>,
    pub poly: Polynomial,
}

/// Finite sum of polynomial-times-exponential terms with pairwise distinct
/// exponents and no zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolynomial {
    dim: usize,
    terms: Vec<Term>,
}

impl ExpPolynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self::from_terms(dim, vec![(vec![Complex64::new(0.0, 0.0); dim], Polynomial::constant(dim, c))])
    }

    /// `e^μ`.
    pub fn exp(mu: &[Complex64]) -> Self {
        let dim = mu.len();
        Self::from_terms(dim, vec![(mu.to_vec(), Polynomial::one(dim))])
    }

    pub fn exp_real(mu: &[f64]) -> Self {
        Self::exp(&mu.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// `p(v) e^{μ(v)}`.
    pub fn term(poly: Polynomial, mu: &[Complex64]) -> Self {
        let dim = mu.len();
        Self::from_terms(dim, vec![(mu.to_vec(), poly)])
    }

    pub fn from_terms(dim: usize, terms: Vec<(Vec<Complex64>, Polynomial)>) -> Self {
        let mut out = Self::zero(dim);
        out.terms = terms
            .into_iter()
            .map(|(exponent, poly)| Term { exponent, poly })
            .collect();
        out.canonicalize();
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges terms whose exponents agree to `EXPONENT_TOL` and drops zero
    /// coefficients.
    fn canonicalize(&mut self) {
        let terms = std::mem::take(&mut self.terms);
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            if t.poly.is_zero() {
                continue;
            }
            let found = candidate_keys(&t.exponent).into_iter().find_map(|key| {
                buckets.get(&key).and_then(|idx| {
                    idx.iter().copied().find(|&i| {
                        out[i]
                            .exponent
                            .iter()
                            .zip(&t.exponent)
                            .all(|(a, b)| (a.re - b.re).abs() <= EXPONENT_TOL && (a.im - b.im).abs() <= EXPONENT_TOL)
                    })
                })
            });
            match found {
                Some(i) => out[i].poly.add_assign(&t.poly),
                None => {
                    buckets.entry(cell(&t.exponent)).or_default().push(out.len());
                    out.push(t);
                }
            }
        }
        out.retain(|t| !t.poly.is_zero());
        self.terms = out;
    }

    pub fn eval(&self, v: &[f64]) -> Complex64 {
        stable_sum(
            self.terms
                .iter()
                .map(|t| t.poly.eval(v) * cdot(&t.exponent, v).exp()),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.terms.extend(other.terms.iter().cloned());
        self.canonicalize();
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.dim);
        out.terms = self
            .terms
            .iter()
            .map(|t| Term {
                exponent: t.exponent.clone(),
                poly: t.poly.scale(s),
            })
            .collect();
        out.canonicalize();
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        let mut out = Self::zero(self.dim);
        out.terms = self
            .terms
            .iter()
            .map(|t| Term {
                exponent: t.exponent.clone(),
                poly: t.poly.mul(p),
            })
            .collect();
        out.canonicalize();
        out
    }

    /// `∂_u(p e^μ) = (∂_u p + μ(u) p) e^μ`, termwise.
    pub fn directional_derivative(&self, u: &[f64]) -> Self {
        let mut out = Self::zero(self.dim);
        out.terms = self
            .terms
            .iter()
            .map(|t| {
                let mut poly = t.poly.directional_derivative(u);
                poly.add_scaled(&t.poly, cdot(&t.exponent, u));
                Term {
                    exponent: t.exponent.clone(),
                    poly,
                }
            })
            .collect();
        out.canonicalize();
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            let mut e = vec![0.0; self.dim];
            e[i] = 1.0;
            out.add_assign(&self.directional_derivative(&e).directional_derivative(&e));
        }
        out
    }

    /// `v ↦ f(Mv + b)`: the exponent `μ` becomes `Mᵀμ` and `e^{μ(b)}` is
    /// absorbed into the coefficient.
    pub fn pullback(&self, m: &[f64], b: &[f64]) -> Self {
        let mut out = Self::zero(self.dim);
        out.terms = self
            .terms
            .iter()
            .map(|t| {
                let factor = cdot(&t.exponent, b).exp();
                Term {
                    exponent: mat_t_vec_c(m, &t.exponent),
                    poly: t.poly.compose_affine(m, b).scale(factor),
                }
            })
            .collect();
        out.canonicalize();
        out
    }

    /// Largest coefficient difference over matched terms.
    pub fn max_difference(&self, other: &Self) -> f64 {
        self.sub(other)
            .terms
            .iter()
            .map(|t| t.poly.max_abs_coefficient())
            .fold(0.0, f64::max)
    }

    pub fn approx_equal(&self, other: &Self, tol: f64) -> bool {
        self.max_difference(other) < tol
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.poly.max_abs_coefficient())
            .fold(0.0, f64::max)
    }

    /// Coefficient polynomial of `e^μ`, if present.
    pub fn coefficient(&self, mu: &[Complex64]) -> Option<&Polynomial> {
        self.terms
            .iter()
            .find(|t| {
                t.exponent
                    .iter()
                    .zip(mu)
                    .all(|(a, b)| (a - b).norm() <= 10.0 * EXPONENT_TOL)
            })
            .map(|t| &t.poly)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.poly.degree()).max().unwrap_or(0)
    }
}

fn cell(mu: &[Complex64]) -> Vec<i64> {
    mu.iter()
        .flat_map(|z| [(z.re / GRID).floor() as i64, (z.im / GRID).floor() as i64])
        .collect()
}

/// Own cell plus neighbors across any boundary closer than a tenth of a cell.
fn candidate_keys(mu: &[Complex64]) -> Vec<Vec<i64>> {
    let mut keys: Vec<Vec<i64>> = vec![Vec::new()];
    for z in mu {
        for x in [z.re, z.im] {
            let s = x / GRID;
            let c = s.floor();
            let frac = s - c;
            let mut opts = vec![c as i64];
            if frac < 0.1 {
                opts.push(c as i64 - 1);
            }
            if frac > 0.9 {
                opts.push(c as i64 + 1);
            }
            keys = keys
                .into_iter()
                .flat_map(|k| {
                    opts.iter().map(move |&o| {
                        let mut k2 = k.clone();
                        k2.push(o);
                        k2
                    })
                })
                .collect();
        }
    }
    keys
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constants_and_exponentials() {
        let one = ExpPolynomial::constant(2, c(1.0, 0.0));
        assert_eq!(one.eval(&[3.0, -1.0]), c(1.0, 0.0));
        let f = ExpPolynomial::exp(&[c(0.3, 1.0), c(-2.0, 0.5)]);
        assert!((f.eval(&[0.0, 0.0]) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_matches_direct_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let mu = [c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))];
            let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let f = ExpPolynomial::term(Polynomial::variable(2, 0), &mu);
            let direct = v[0] * (mu[0] * v[0] + mu[1] * v[1]).exp();
            assert!((f.eval(&v) - direct).norm() <= 1e-12 * direct.norm());
        }
    }

    #[test]
    fn merging_nearby_exponents() {
        let a = ExpPolynomial::exp(&[c(1.0, 0.0)]);
        let b = ExpPolynomial::exp(&[c(1.0 + 3e-11, 0.0)]);
        assert_eq!(a.add(&b).num_terms(), 1);
        let z = a.sub(&a);
        assert!(z.is_zero());
        let boundary = ExpPolynomial::exp(&[c(GRID * 5.0, 0.0)]);
        let shifted = ExpPolynomial::exp(&[c(GRID * 5.0 - 2e-11, 0.0)]);
        assert_eq!(boundary.add(&shifted).num_terms(), 1);
    }

    #[test]
    fn derivative_product_rule() {
        let mu = [c(0.4, 1.3), c(-0.2, 0.7)];
        let u = [0.6, -1.1];
        let f = ExpPolynomial::term(Polynomial::variable(2, 0), &mu);
        let d = f.directional_derivative(&u);
        let v = [0.3, 0.9];
        let mu_u = mu[0] * u[0] + mu[1] * u[1];
        let e = (mu[0] * v[0] + mu[1] * v[1]).exp();
        let want = (u[0] + mu_u * v[0]) * e;
        assert!((d.eval(&v) - want).norm() < 1e-13);
    }

    #[test]
    fn approx_equal_detects_perturbation() {
        let f = ExpPolynomial::exp(&[c(0.0, 2.0)]);
        assert!(f.approx_equal(&f, 1e-12));
        let g = f.add(&ExpPolynomial::constant(1, c(1e-3, 0.0)));
        assert!(!f.approx_equal(&g, 1e-6));
    }

    #[test]
    fn pullback_identity_and_rotation() {
        let mu = [c(0.5, 1.0), c(-1.0, 0.0)];
        let f = ExpPolynomial::term(Polynomial::variable(2, 1), &mu);
        let id = crate::linalg::identity(2);
        assert!(f.pullback(&id, &[0.0, 0.0]).approx_equal(&f, 1e-15));
        let m = [0.0, -1.0, 1.0, 0.0];
        let b = [0.25, -0.5];
        let g = f.pullback(&m, &b);
        let v = [0.7, -0.3];
        let img = [-v[1] + b[0], v[0] + b[1]];
        assert!((g.eval(&v) - f.eval(&img)).norm() < 1e-13);
    }
}
