use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::linalg::stable_sum;

/// Sparse complex polynomial in `nvars` real variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    coeffs: BTreeMap<Vec<u32>, Complex64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_monomial(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Complex64::new(1.0, 0.0))
    }

    /// The coordinate function `v ↦ v_i`.
    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut d = vec![0; nvars];
        d[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_monomial(d, Complex64::new(1.0, 0.0));
        p
    }

    /// `v ↦ ⟨c, v⟩ + c0`.
    pub fn affine(c: &[f64], c0: f64) -> Self {
        let n = c.len();
        let mut p = Self::constant(n, Complex64::new(c0, 0.0));
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0.0 {
                let mut d = vec![0; n];
                d[i] = 1;
                p.add_monomial(d, Complex64::new(ci, 0.0));
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_monomial(&mut self, degrees: Vec<u32>, c: Complex64) {
        debug_assert_eq!(degrees.len(), self.nvars);
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(degrees) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == Complex64::new(0.0, 0.0) {
                    e.remove();
                }
            }
        }
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn num_monomials(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.coeffs
            .keys()
            .map(|d| d.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn sum_abs_coefficients(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, v: &[f64]) -> Complex64 {
        stable_sum(self.coeffs.iter().map(|(d, c)| {
            let m: f64 = d
                .iter()
                .zip(v)
                .map(|(&k, &x)| if k == 0 { 1.0 } else { x.powi(k as i32) })
                .product();
            c * m
        }))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (d, c) in &other.coeffs {
            self.add_monomial(d.clone(), *c);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: Complex64) {
        for (d, c) in &other.coeffs {
            self.add_monomial(d.clone(), c * s);
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (d, c) in &self.coeffs {
            out.add_monomial(d.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (da, ca) in &self.coeffs {
            for (db, cb) in &other.coeffs {
                let d: Vec<u32> = da.iter().zip(db).map(|(x, y)| x + y).collect();
                out.add_monomial(d, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (d, c) in &self.coeffs {
            if d[i] > 0 {
                let mut e = d.clone();
                e[i] -= 1;
                out.add_monomial(e, c * d[i] as f64);
            }
        }
        out
    }

    pub fn directional_derivative(&self, u: &[f64]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (i, &ui) in u.iter().enumerate() {
            if ui != 0.0 {
                out.add_scaled(&self.partial(i), Complex64::new(ui, 0.0));
            }
        }
        out
    }

    /// `v ↦ p(Mv + b)` with `M` row-major.
    pub fn compose_affine(&self, m: &[f64], b: &[f64]) -> Self {
        let n = self.nvars;
        if self.degree() == 0 {
            return self.clone();
        }
        let images: Vec<Polynomial> = (0..n)
            .map(|i| Polynomial::affine(&m[i * n..(i + 1) * n], b[i]))
            .collect();
        let maxdeg = self.degree();
        let powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| {
                let mut ps = vec![Polynomial::one(n)];
                for k in 1..=maxdeg as usize {
                    let next = ps[k - 1].mul(p);
                    ps.push(next);
                }
                ps
            })
            .collect();
        let mut out = Self::zero(n);
        for (d, c) in &self.coeffs {
            let mut term = Polynomial::constant(n, *c);
            for (i, &k) in d.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&powers[i][k as usize]);
                }
            }
            out.add_assign(&term);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn arithmetic_and_eval() {
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let p = x.mul(&y).add(&x.pow(2).scale(c(3.0)));
        let v = [1.5, -2.0];
        assert!((p.eval(&v) - c(1.5 * -2.0 + 3.0 * 2.25)).norm() < 1e-14);
        assert_eq!(p.degree(), 2);
        assert!(p.add(&p.scale(c(-1.0))).is_zero());
    }

    #[test]
    fn derivative_and_composition() {
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let p = x.pow(3).add(&x.mul(&y));
        let d = p.directional_derivative(&[2.0, 1.0]);
        let v = [0.7, 0.2];
        let want = 2.0 * (3.0 * 0.49 + 0.2) + 0.7;
        assert!((d.eval(&v) - c(want)).norm() < 1e-13);

        let m = [0.0, 1.0, -1.0, 0.0];
        let b = [0.5, 2.0];
        let q = p.compose_affine(&m, &b);
        let w = [0.0 * v[0] + v[1] + 0.5, -v[0] + 2.0];
        assert!((q.eval(&v) - p.eval(&w)).norm() < 1e-13);
    }
}
