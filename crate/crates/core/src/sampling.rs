//! Random test data for the sampled relation checkers.

use num_complex::Complex64;
use rand::Rng;

use crate::exp_poly::{ExpPolynomial, Polynomial};
use crate::linalg::{axpy, dot};
use crate::root_system::{AffineRoot, RootSystem};

/// Random exponential polynomial with `nterms` terms of degree at most
/// `max_deg`. The first term is purely polynomial.
pub fn random_exp_poly<R: Rng>(rng: &mut R, dim: usize, nterms: usize, max_deg: u32, scale: f64) -> ExpPolynomial {
    let mut terms = Vec::with_capacity(nterms);
    for t in 0..nterms {
        let mu: Vec<Complex64> = if t == 0 {
            vec![Complex64::new(0.0, 0.0); dim]
        } else {
            (0..dim)
                .map(|_| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
                .collect()
        };
        terms.push((mu, random_poly(rng, dim, max_deg)));
    }
    ExpPolynomial::from_terms(dim, terms)
}

pub fn random_poly<R: Rng>(rng: &mut R, dim: usize, max_deg: u32) -> Polynomial {
    let mut p = Polynomial::zero(dim);
    let mut degrees = vec![vec![0u32; dim]];
    for _ in 0..max_deg {
        let mut next = Vec::new();
        for d in &degrees {
            for i in 0..dim {
                let mut e = d.clone();
                e[i] += 1;
                if !next.contains(&e) {
                    next.push(e);
                }
            }
        }
        degrees.extend(next.iter().filter(|&e| !degrees.contains(e)).cloned().collect::<Vec<_>>());
    }
    for d in degrees {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        p.add_monomial(d, c);
    }
    p
}

pub fn random_point<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-radius..radius)).collect()
}

/// Random point with every affine root value at least `margin` from `ℤ`.
pub fn random_regular_point<R: Rng>(rng: &mut R, rs: &RootSystem, radius: f64, margin: f64) -> Vec<f64> {
    loop {
        let v = random_point(rng, rs.rank, radius);
        if rs.affine_margin(&v) > margin {
            return v;
        }
    }
}

/// Random interior point of the fundamental alcove at distance at least
/// `margin` from its walls.
pub fn random_alcove_point<R: Rng>(rng: &mut R, rs: &RootSystem, margin: f64) -> Vec<f64> {
    loop {
        let weights: Vec<f64> = (0..=rs.rank).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
        let total: f64 = weights.iter().sum();
        let mut v = vec![0.0; rs.rank];
        for (w, p) in weights.iter().zip(&rs.alcove_vertices) {
            v = axpy(&v, w / total, p);
        }
        if rs.wall_distance(&v) > margin {
            return v;
        }
    }
}

/// Distance from `v` to the nearest affine hyperplane not parallel to `Da`.
pub fn other_wall_distance(rs: &RootSystem, a: AffineRoot, v: &[f64]) -> f64 {
    let alpha = &rs.roots[a.base];
    rs.positive_roots()
        .filter(|&b| {
            let beta = &rs.roots[b];
            let cos = dot(alpha, beta) / (dot(alpha, alpha) * dot(beta, beta)).sqrt();
            (cos.abs() - 1.0).abs() > 1e-9
        })
        .map(|b| {
            let beta = &rs.roots[b];
            let t = dot(beta, v);
            (t - t.round()).abs() / dot(beta, beta).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Sub-regular point on `V_a`: on the wall, at least `margin` from all others.
pub fn random_wall_point<R: Rng>(rng: &mut R, rs: &RootSystem, a: AffineRoot, radius: f64, margin: f64) -> Vec<f64> {
    let alpha = &rs.roots[a.base];
    loop {
        let v = random_point(rng, rs.rank, radius);
        let w = axpy(&v, -rs.affine_value(a, &v) / dot(alpha, alpha), alpha);
        if other_wall_distance(rs, a, &w) > margin {
            return w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::CartanKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wall_points_lie_on_the_wall() {
        let rs = RootSystem::new(CartanKind::B, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for j in 0..=2 {
            let a = rs.simple_affine(j);
            let v = random_wall_point(&mut rng, &rs, a, 1.0, 1e-3);
            assert!(rs.affine_value(a, &v).abs() < 1e-14);
        }
        let v = random_alcove_point(&mut rng, &rs, 0.01);
        assert!(rs.in_closed_alcove(&v, 0.0));
    }

    #[test]
    fn random_poly_has_all_monomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(random_poly(&mut rng, 2, 2).num_monomials(), 6);
    }
}
