//! Finite irreducible root systems with their affine extension.
//!
//! Covectors and vectors are identified through the Euclidean metric of a
//! fixed orthonormal realization in which long roots have squared length 2.
//! Roots are generated exactly as integer combinations of the simple roots.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, cdot, dot};

/// Tolerance below which an affine root value counts as zero when folding.
pub const WALL_TOL: f64 = 1e-12;

/// Default rank cap for the infinite families A to D.
pub const DEFAULT_RANK_CAP: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CartanKind {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl CartanKind {
    pub fn letter(self) -> char {
        match self {
            CartanKind::A => 'A',
            CartanKind::B => 'B',
            CartanKind::C => 'C',
            CartanKind::D => 'D',
            CartanKind::E => 'E',
            CartanKind::F => 'F',
            CartanKind::G => 'G',
        }
    }
}

impl FromStr for CartanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(CartanKind::A),
            "B" => Ok(CartanKind::B),
            "C" => Ok(CartanKind::C),
            "D" => Ok(CartanKind::D),
            "E" => Ok(CartanKind::E),
            "F" => Ok(CartanKind::F),
            "G" => Ok(CartanKind::G),
            other => Err(Error::Config(format!("unknown Cartan type {other:?}"))),
        }
    }
}

impl fmt::Display for CartanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Order of the finite Weyl group from the classical formulas.
pub fn weyl_order(kind: CartanKind, rank: usize) -> u128 {
    let fact = |m: usize| (1..=m as u128).product::<u128>();
    match kind {
        CartanKind::A => fact(rank + 1),
        CartanKind::B | CartanKind::C => (1u128 << rank) * fact(rank),
        CartanKind::D => (1u128 << (rank - 1)) * fact(rank),
        CartanKind::E => match rank {
            6 => 51_840,
            7 => 2_903_040,
            _ => 696_729_600,
        },
        CartanKind::F => 1_152,
        CartanKind::G => 12,
    }
}

/// Affine root `a = Da + m` with `Da = roots[base]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineRoot {
    pub base: usize,
    pub offset: i64,
}

impl AffineRoot {
    pub fn new(base: usize, offset: i64) -> Self {
        Self { base, offset }
    }
}

/// Coupling constants, one per root length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub long: f64,
    pub short: f64,
}

impl Multiplicity {
    pub fn new(long: f64, short: f64) -> Self {
        Self { long, short }
    }

    pub fn constant(k: f64) -> Self {
        Self { long: k, short: k }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Values must be finite and nonnegative. The zero function is allowed
    /// for the operator layer, where it collapses to the plain `W`-action.
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if ok(self.long) && ok(self.short) {
            Ok(())
        } else {
            Err(Error::InvalidMultiplicity {
                long: self.long,
                short: self.short,
            })
        }
    }

    /// Strict positivity, required by the master function.
    pub fn require_positive(&self, rs: &RootSystem) -> Result<()> {
        self.validate()?;
        let short_used = !rs.is_simply_laced();
        if self.long > 0.0 && (!short_used || self.short > 0.0) {
            Ok(())
        } else {
            Err(Error::NonPositiveMultiplicity {
                long: self.long,
                short: self.short,
            })
        }
    }

    pub fn is_zero(&self) -> bool {
        self.long == 0.0 && self.short == 0.0
    }

    /// `k_α` for the root with index `root`.
    pub fn of_root(&self, rs: &RootSystem, root: usize) -> f64 {
        if rs.is_long[root] {
            self.long
        } else {
            self.short
        }
    }

    pub fn of_affine(&self, rs: &RootSystem, a: AffineRoot) -> f64 {
        self.of_root(rs, a.base)
    }
}

/// A finite irreducible root system in an orthonormal realization.
///
/// Roots are ordered with the positive roots first, sorted by height, with
/// the simple roots in positions `0..rank`. Root `i + num_positive` is `-root i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootSystem {
    pub kind: CartanKind,
    pub rank: usize,
    pub roots: Vec<Vec<f64>>,
    pub coroots: Vec<Vec<f64>>,
    /// Coefficients of each root in the simple-root basis.
    pub coefficients: Vec<Vec<i64>>,
    pub num_positive: usize,
    pub highest_root: usize,
    pub is_long: Vec<bool>,
    /// `cartan[i][j] = a_j(a_i^∨)`.
    pub cartan: Vec<Vec<i64>>,
    pub fundamental_weights: Vec<Vec<f64>>,
    pub fundamental_coweights: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    /// Vertices of the fundamental alcove: `0` and `ϖ_j / m_j`.
    pub alcove_vertices: Vec<Vec<f64>>,
}

impl RootSystem {
    /// Builds a root system with the default rank cap on the families A to D.
    pub fn new(kind: CartanKind, rank: usize) -> Result<Self> {
        Self::with_rank_cap(kind, rank, DEFAULT_RANK_CAP)
    }

    pub fn with_rank_cap(kind: CartanKind, rank: usize, cap: usize) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidCartanType {
            kind: kind.letter(),
            rank,
            reason: reason.to_string(),
        };
        let min = match kind {
            CartanKind::A => 1,
            CartanKind::B | CartanKind::C => 2,
            CartanKind::D => 4,
            _ => 0,
        };
        match kind {
            CartanKind::E if !(6..=8).contains(&rank) => return Err(invalid("E requires rank 6, 7 or 8")),
            CartanKind::F if rank != 4 => return Err(invalid("F requires rank 4")),
            CartanKind::G if rank != 2 => return Err(invalid("G requires rank 2")),
            CartanKind::A | CartanKind::B | CartanKind::C | CartanKind::D => {
                if rank < min {
                    return Err(invalid(&format!("rank must be at least {min}")));
                }
                if rank > cap {
                    return Err(invalid(&format!("rank exceeds the configured cap {cap}")));
                }
            }
            _ => {}
        }
        let simple = simple_roots(kind, rank);
        Ok(Self::from_simple_roots(kind, rank, simple))
    }

    fn from_simple_roots(kind: CartanKind, rank: usize, simple: Vec<Vec<f64>>) -> Self {
        let n = rank;
        let coroot = |a: &[f64]| {
            let s = 2.0 / dot(a, a);
            a.iter().map(|x| x * s).collect::<Vec<f64>>()
        };
        let simple_co: Vec<Vec<f64>> = simple.iter().map(|a| coroot(a)).collect();
        let cartan: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| dot(&simple[j], &simple_co[i]).round() as i64)
                    .collect()
            })
            .collect();

        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        let mut queue = VecDeque::new();
        for i in 0..n {
            let mut c = vec![0i64; n];
            c[i] = 1;
            seen.insert(c.clone(), ());
            queue.push_back(c);
        }
        let mut found = Vec::new();
        while let Some(c) = queue.pop_front() {
            for i in 0..n {
                let pairing: i64 = (0..n).map(|j| c[j] * cartan[i][j]).sum();
                let mut img = c.clone();
                img[i] -= pairing;
                if !seen.contains_key(&img) {
                    seen.insert(img.clone(), ());
                    queue.push_back(img);
                }
            }
            found.push(c);
        }
        let mut positive: Vec<Vec<i64>> = found
            .into_iter()
            .filter(|c| c.iter().all(|&x| x >= 0))
            .collect();
        positive.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let np = positive.len();
        let mut coefficients = positive.clone();
        coefficients.extend(positive.iter().map(|c| c.iter().map(|x| -x).collect()));

        let to_float = |c: &[i64]| {
            let mut v = vec![0.0; n];
            for (j, &cj) in c.iter().enumerate() {
                if cj != 0 {
                    v = axpy(&v, cj as f64, &simple[j]);
                }
            }
            v
        };
        let roots: Vec<Vec<f64>> = coefficients.iter().map(|c| to_float(c)).collect();
        let coroots: Vec<Vec<f64>> = roots.iter().map(|a| coroot(a)).collect();
        let max_sq = roots.iter().map(|a| dot(a, a)).fold(0.0, f64::max);
        let is_long: Vec<bool> = roots
            .iter()
            .map(|a| (dot(a, a) - max_sq).abs() < 1e-9)
            .collect();
        // The highest root is the unique positive root of maximal height.
        let highest_root = np - 1;

        let dual_basis = |rows: &[Vec<f64>]| {
            let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
            let inv = m.try_inverse().expect("simple roots are linearly independent");
            (0..n)
                .map(|i| (0..n).map(|r| inv[(r, i)]).collect::<Vec<f64>>())
                .collect::<Vec<Vec<f64>>>()
        };
        let fundamental_weights = dual_basis(&simple_co);
        let fundamental_coweights = dual_basis(&simple);

        let mut rho = vec![0.0; n];
        for a in &roots[..np] {
            rho = axpy(&rho, 0.5, a);
        }
        let marks = &coefficients[highest_root];
        let mut alcove_vertices = vec![vec![0.0; n]];
        for j in 0..n {
            alcove_vertices.push(
                fundamental_coweights[j]
                    .iter()
                    .map(|x| x / marks[j] as f64)
                    .collect(),
            );
        }

        Self {
            kind,
            rank,
            roots,
            coroots,
            coefficients,
            num_positive: np,
            highest_root,
            is_long,
            cartan,
            fundamental_weights,
            fundamental_coweights,
            rho,
            alcove_vertices,
        }
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.kind, self.rank)
    }

    pub fn is_simply_laced(&self) -> bool {
        self.is_long.iter().all(|&l| l)
    }

    pub fn is_positive(&self, root: usize) -> bool {
        root < self.num_positive
    }

    pub fn negate(&self, root: usize) -> usize {
        if root < self.num_positive {
            root + self.num_positive
        } else {
            root - self.num_positive
        }
    }

    pub fn positive_roots(&self) -> std::ops::Range<usize> {
        0..self.num_positive
    }

    pub fn phi(&self) -> &[f64] {
        &self.roots[self.highest_root]
    }

    pub fn phi_coroot(&self) -> &[f64] {
        &self.coroots[self.highest_root]
    }

    pub fn height(&self, root: usize) -> i64 {
        self.coefficients[root].iter().sum()
    }

    /// Looks up a root by its simple-root coefficients.
    pub fn index_of_coefficients(&self, c: &[i64]) -> Option<usize> {
        self.coefficients.iter().position(|x| x.as_slice() == c)
    }

    /// Looks up a root by coordinates.
    pub fn index_of(&self, v: &[f64], tol: f64) -> Option<usize> {
        self.roots
            .iter()
            .position(|a| a.iter().zip(v).all(|(x, y)| (x - y).abs() < tol))
    }

    /// `ξ(α^∨)`.
    pub fn pair(&self, xi: &[f64], root: usize) -> f64 {
        dot(xi, &self.coroots[root])
    }

    pub fn pair_c(&self, xi: &[Complex64], root: usize) -> Complex64 {
        cdot(xi, &self.coroots[root])
    }

    /// Reflection `s_α` of a vector or covector.
    pub fn reflect(&self, root: usize, v: &[f64]) -> Vec<f64> {
        axpy(v, -dot(v, &self.coroots[root]), &self.roots[root])
    }

    pub fn reflect_c(&self, root: usize, v: &[Complex64]) -> Vec<Complex64> {
        let p = cdot(v, &self.coroots[root]);
        v.iter()
            .zip(&self.roots[root])
            .map(|(x, a)| x - p * a)
            .collect()
    }

    /// Covector with the given fundamental-weight coefficients.
    pub fn weight(&self, coeffs: &[i64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.rank {
            return Err(Error::WeightDimension {
                expected: self.rank,
                got: coeffs.len(),
            });
        }
        let mut mu = vec![0.0; self.rank];
        for (i, &c) in coeffs.iter().enumerate() {
            mu = axpy(&mu, c as f64, &self.fundamental_weights[i]);
        }
        Ok(mu)
    }

    /// Fundamental-weight coordinates `ξ(a_i^∨)`.
    pub fn weight_coordinates(&self, xi: &[f64]) -> Vec<f64> {
        (0..self.rank).map(|i| self.pair(xi, i)).collect()
    }

    /// Integer coordinates of a weight, if `xi` lies in `P`.
    pub fn integral_coordinates(&self, xi: &[f64], tol: f64) -> Result<Vec<i64>> {
        self.weight_coordinates(xi)
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                if (p - p.round()).abs() <= tol {
                    Ok(p.round() as i64)
                } else {
                    Err(Error::NotIntegral { index: i, pairing: p })
                }
            })
            .collect()
    }

    pub fn is_dominant(&self, xi: &[f64]) -> bool {
        (0..self.rank).all(|i| self.pair(xi, i) >= -WALL_TOL)
    }

    /// Smallest `|λ(α^∨)|` over all roots.
    pub fn regularity_margin(&self, lambda: &[Complex64]) -> f64 {
        self.positive_roots()
            .map(|a| self.pair_c(lambda, a).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_regular(&self, lambda: &[Complex64], tol: f64) -> bool {
        self.regularity_margin(lambda) > tol
    }

    pub fn is_regular_real(&self, xi: &[f64], tol: f64) -> bool {
        let c: Vec<Complex64> = xi.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.is_regular(&c, tol)
    }

    /// `h_k = 2 Σ_{α∈Σ_0} 1/k_α`.
    pub fn coxeter_k(&self, k: &Multiplicity) -> f64 {
        2.0 * (0..self.num_roots())
            .map(|a| 1.0 / k.of_root(self, a))
            .sum::<f64>()
    }

    // -- affine structure --

    /// Simple affine root `a_j`; `a_0 = -φ + 1`.
    pub fn simple_affine(&self, j: usize) -> AffineRoot {
        if j == 0 {
            AffineRoot::new(self.negate(self.highest_root), 1)
        } else {
            AffineRoot::new(j - 1, 0)
        }
    }

    pub fn affine_value(&self, a: AffineRoot, v: &[f64]) -> f64 {
        dot(&self.roots[a.base], v) + a.offset as f64
    }

    pub fn is_positive_affine(&self, a: AffineRoot) -> bool {
        a.offset > 0 || (a.offset == 0 && self.is_positive(a.base))
    }

    /// `s_a v = v - a(v) Da^∨`.
    pub fn affine_reflect(&self, a: AffineRoot, v: &[f64]) -> Vec<f64> {
        axpy(v, -self.affine_value(a, v), &self.coroots[a.base])
    }

    /// Matrix and translation of `s_a` as `v ↦ Mv + b` (row-major `M`).
    pub fn affine_reflection_map(&self, a: AffineRoot) -> (Vec<f64>, Vec<f64>) {
        let n = self.rank;
        let c = &self.coroots[a.base];
        let d = &self.roots[a.base];
        let mut m = crate::linalg::identity(n);
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] -= c[i] * d[j];
            }
        }
        let b = c.iter().map(|x| -(a.offset as f64) * x).collect();
        (m, b)
    }

    /// Folds `v` into the closure of the fundamental alcove.
    ///
    /// Returns the word `[j_1, .., j_r]` (indices `0..=n`, `0` the affine
    /// reflection) with `image = s_{j_r} ⋯ s_{j_1} v`.
    pub fn fold_to_alcove(&self, v: &[f64]) -> Result<(Vec<usize>, Vec<f64>)> {
        let scale: f64 = v.iter().map(|x| x.abs()).sum();
        let cap = 10_000 + 1_000 * scale.ceil() as usize;
        let mut x = v.to_vec();
        let mut word = Vec::new();
        loop {
            let j = (0..=self.rank)
                .find(|&j| self.affine_value(self.simple_affine(j), &x) < -WALL_TOL);
            match j {
                None => return Ok((word, x)),
                Some(j) => {
                    if word.len() >= cap {
                        return Err(Error::FoldingCap(cap));
                    }
                    x = self.affine_reflect(self.simple_affine(j), &x);
                    word.push(j);
                }
            }
        }
    }

    /// Applies `s_{word[0]}` first, then `s_{word[1]}`, and so on.
    pub fn apply_word(&self, word: &[usize], v: &[f64]) -> Vec<f64> {
        word.iter().fold(v.to_vec(), |x, &j| {
            self.affine_reflect(self.simple_affine(j), &x)
        })
    }

    /// Smallest `|a(v)|` over all affine roots.
    pub fn wall_distance(&self, v: &[f64]) -> f64 {
        self.positive_roots()
            .map(|a| {
                let t = dot(&self.roots[a], v);
                (t - t.round()).abs() / dot(&self.roots[a], &self.roots[a]).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest `|a(v)|` (unnormalized) over all affine roots.
    pub fn affine_margin(&self, v: &[f64]) -> f64 {
        self.positive_roots()
            .map(|a| {
                let t = dot(&self.roots[a], v);
                (t - t.round()).abs()
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn in_closed_alcove(&self, v: &[f64], tol: f64) -> bool {
        (0..=self.rank).all(|j| self.affine_value(self.simple_affine(j), v) >= -tol)
    }

    /// All positive affine roots with `a(v) < 0`; finite for every `v`.
    pub fn negative_positive_affine_roots(&self, v: &[f64]) -> Vec<AffineRoot> {
        let mut out = Vec::new();
        for base in 0..self.num_roots() {
            let t = dot(&self.roots[base], v);
            let mut m = if self.is_positive(base) { 0 } else { 1 };
            while t + (m as f64) < 0.0 {
                out.push(AffineRoot::new(base, m));
                m += 1;
            }
        }
        out
    }
}

fn e(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

fn lin(dim: usize, terms: &[(usize, f64)]) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    for &(i, c) in terms {
        v[i] += c;
    }
    v
}

/// Orthonormal coordinates of the sum-zero hyperplane of `R^{n+1}`.
fn helmert(x: &[f64]) -> Vec<f64> {
    let n = x.len() - 1;
    (1..=n)
        .map(|k| {
            let s: f64 = x[..k].iter().sum();
            (s - k as f64 * x[k]) / ((k * (k + 1)) as f64).sqrt()
        })
        .collect()
}

/// Coordinates in an orthonormal basis of the span of `vs`.
fn project_to_span(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for b in &basis {
            w = axpy(&w, -dot(&w, b), b);
        }
        let nw = dot(&w, &w).sqrt();
        basis.push(w.iter().map(|x| x / nw).collect());
    }
    vs.iter()
        .map(|v| basis.iter().map(|b| dot(v, b)).collect())
        .collect()
}

fn simple_roots(kind: CartanKind, n: usize) -> Vec<Vec<f64>> {
    match kind {
        CartanKind::A => (0..n)
            .map(|i| helmert(&lin(n + 1, &[(i, 1.0), (i + 1, -1.0)])))
            .collect(),
        CartanKind::B => {
            let mut s: Vec<Vec<f64>> = (0..n - 1)
                .map(|i| lin(n, &[(i, 1.0), (i + 1, -1.0)]))
                .collect();
            s.push(e(n, n - 1));
            s
        }
        CartanKind::C => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let mut s: Vec<Vec<f64>> = (0..n - 1)
                .map(|i| lin(n, &[(i, r), (i + 1, -r)]))
                .collect();
            s.push(lin(n, &[(n - 1, std::f64::consts::SQRT_2)]));
            s
        }
        CartanKind::D => {
            let mut s: Vec<Vec<f64>> = (0..n - 1)
                .map(|i| lin(n, &[(i, 1.0), (i + 1, -1.0)]))
                .collect();
            s.push(lin(n, &[(n - 2, 1.0), (n - 1, 1.0)]));
            s
        }
        CartanKind::E => {
            let mut a1 = vec![-0.5; 8];
            a1[0] = 0.5;
            a1[7] = 0.5;
            let mut s = vec![a1, lin(8, &[(0, 1.0), (1, 1.0)])];
            for i in 0..6 {
                s.push(lin(8, &[(i + 1, 1.0), (i, -1.0)]));
            }
            s.truncate(n);
            if n == 8 {
                s
            } else {
                project_to_span(&s)
            }
        }
        CartanKind::F => vec![
            lin(4, &[(1, 1.0), (2, -1.0)]),
            lin(4, &[(2, 1.0), (3, -1.0)]),
            e(4, 3),
            vec![0.5, -0.5, -0.5, -0.5],
        ],
        CartanKind::G => {
            let r = 1.0 / 3f64.sqrt();
            vec![
                helmert(&lin(3, &[(0, r), (1, -r)])),
                helmert(&lin(3, &[(0, -2.0 * r), (1, r), (2, r)])),
            ]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(kind: CartanKind, n: usize) -> RootSystem {
        RootSystem::new(kind, n).unwrap()
    }

    fn all_types() -> Vec<RootSystem> {
        use CartanKind::*;
        [
            (A, 1),
            (A, 2),
            (A, 3),
            (B, 2),
            (B, 3),
            (C, 3),
            (D, 4),
            (E, 6),
            (E, 7),
            (E, 8),
            (F, 4),
            (G, 2),
        ]
        .into_iter()
        .map(|(k, n)| rs(k, n))
        .collect()
    }

    #[test]
    fn root_counts() {
        use CartanKind::*;
        let expected = [
            (A, 1, 1),
            (A, 2, 3),
            (A, 4, 10),
            (B, 2, 4),
            (B, 3, 9),
            (C, 3, 9),
            (D, 4, 12),
            (E, 6, 36),
            (E, 7, 63),
            (E, 8, 120),
            (F, 4, 24),
            (G, 2, 6),
        ];
        for (k, n, np) in expected {
            assert_eq!(rs(k, n).num_positive, np, "{k}{n}");
        }
    }

    #[test]
    fn a1_basics() {
        let r = rs(CartanKind::A, 1);
        assert_eq!(r.num_positive, 1);
        assert!((dot(&r.roots[0], &r.roots[0]) - 2.0).abs() < 1e-14);
        assert!((r.pair(&r.roots[0], 0) - 2.0).abs() < 1e-14);
        assert_eq!(r.highest_root, 0);
    }

    #[test]
    fn b2_and_g2_length_classes() {
        let b2 = rs(CartanKind::B, 2);
        let long = (0..4).filter(|&a| b2.is_long[a]).count();
        assert_eq!(long, 2);
        let g2 = rs(CartanKind::G, 2);
        assert_eq!(g2.num_positive, 6);
        for a in g2.positive_roots() {
            let p = g2.pair(&g2.roots[a], g2.highest_root).round() as i64;
            assert!((0..=2).contains(&p));
        }
    }

    #[test]
    fn long_roots_have_squared_length_two() {
        for r in all_types() {
            for a in 0..r.num_roots() {
                let sq = dot(&r.roots[a], &r.roots[a]);
                if r.is_long[a] {
                    assert!((sq - 2.0).abs() < 1e-12, "{}", r.name());
                }
                assert!((dot(&r.roots[a], &r.coroots[a]) - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_under_reflections() {
        for r in all_types() {
            for a in 0..r.num_roots() {
                for b in 0..r.num_roots() {
                    let img = r.reflect(a, &r.roots[b]);
                    assert!(r.index_of(&img, 1e-9).is_some(), "{}", r.name());
                }
            }
        }
    }

    #[test]
    fn highest_root_property() {
        for r in all_types() {
            let mut twos = 0;
            for a in r.positive_roots() {
                let p = r.pair(&r.roots[a], r.highest_root);
                let pr = p.round();
                assert!((p - pr).abs() < 1e-10);
                assert!((0.0..=2.0).contains(&pr), "{}", r.name());
                if pr == 2.0 {
                    twos += 1;
                }
            }
            assert_eq!(twos, 1);
        }
    }

    #[test]
    fn fundamental_weights_are_dual() {
        for r in all_types() {
            for i in 0..r.rank {
                for j in 0..r.rank {
                    let p = r.pair(&r.fundamental_weights[i], j);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((p - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rho_pairs_to_one_with_simple_coroots() {
        for r in all_types() {
            for i in 0..r.rank {
                assert!((r.pair(&r.rho, i) - 1.0).abs() < 1e-12);
            }
            assert!(r.is_dominant(&r.rho));
            assert!(r.is_regular_real(&r.rho, 1e-9));
        }
    }

    #[test]
    fn singular_examples() {
        let a2 = rs(CartanKind::A, 2);
        assert!(!a2.is_regular_real(&[0.0, 0.0], 1e-9));
        assert!(!a2.is_regular_real(&a2.fundamental_weights[0], 1e-9));
        assert!(a2.is_dominant(&a2.fundamental_weights[0]));
    }

    #[test]
    fn invalid_types_rejected() {
        assert!(RootSystem::new(CartanKind::D, 3).is_err());
        assert!(RootSystem::new(CartanKind::E, 5).is_err());
        assert!(RootSystem::new(CartanKind::G, 3).is_err());
        assert!(RootSystem::new(CartanKind::A, 7).is_err());
        assert!(RootSystem::with_rank_cap(CartanKind::A, 7, 8).is_ok());
        assert!("X".parse::<CartanKind>().is_err());
    }

    #[test]
    fn fold_a1_affine_reflection() {
        let r = rs(CartanKind::A, 1);
        let phi = r.phi().to_vec();
        let v: Vec<f64> = r.coroots[0].iter().map(|x| x * 0.6).collect();
        assert!((dot(&phi, &v) - 1.2).abs() < 1e-14);
        let (word, img) = r.fold_to_alcove(&v).unwrap();
        assert_eq!(word, vec![0]);
        assert!((dot(&phi, &img) - 0.8).abs() < 1e-14);
    }

    #[test]
    fn fold_inside_alcove_is_trivial() {
        let r = rs(CartanKind::A, 2);
        let v: Vec<f64> = r.rho.iter().map(|x| x * 0.2).collect();
        let (word, img) = r.fold_to_alcove(&v).unwrap();
        assert!(word.is_empty());
        assert_eq!(img, v);
    }

    #[test]
    fn fold_is_invertible() {
        let r = rs(CartanKind::B, 3);
        let v = vec![2.3, -1.7, 0.45];
        let (word, img) = r.fold_to_alcove(&v).unwrap();
        assert!(r.in_closed_alcove(&img, 1e-12));
        let rev: Vec<usize> = word.iter().rev().copied().collect();
        let back = r.apply_word(&rev, &img);
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_reflection_map_matches_reflection() {
        let r = rs(CartanKind::G, 2);
        let a = AffineRoot::new(3, 2);
        let (m, b) = r.affine_reflection_map(a);
        let v = vec![0.3, -0.8];
        let direct = r.affine_reflect(a, &v);
        let via = crate::linalg::add(&crate::linalg::mat_vec(&m, &v), &b);
        for (x, y) in direct.iter().zip(&via) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn alcove_vertices_lie_on_closure() {
        for r in all_types() {
            for v in &r.alcove_vertices {
                assert!(r.in_closed_alcove(v, 1e-12), "{}", r.name());
            }
        }
    }
}
