use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exp_poly::ExpPolynomial;
use crate::linalg::{add, identity, mat_mul, mat_vec};
use crate::operators::q_simple;
use crate::root_system::{AffineRoot, Multiplicity, RootSystem};

/// A function on `V` that is analytic on every alcove.
pub trait PiecewiseFunction: Send + Sync {
    fn root_system(&self) -> &RootSystem;

    /// Analytic representative on the alcove containing `v`.
    fn representative(&self, v: &[f64]) -> Result<Arc<ExpPolynomial>>;

    fn eval(&self, v: &[f64]) -> Result<Complex64> {
        Ok(self.representative(v)?.eval(v))
    }
}

/// Minimal `|a(v)|` required of points where Dunkl operators are evaluated.
pub const REGULAR_TOL: f64 = 1e-9;

/// `χ_a(v) = 1` iff `a(v) < 0`.
pub fn chi(rs: &RootSystem, a: AffineRoot, v: &[f64]) -> bool {
    rs.affine_value(a, v) < 0.0
}

/// A globally analytic function viewed as piecewise.
pub struct Analytic {
    rs: Arc<RootSystem>,
    f: Arc<ExpPolynomial>,
}

impl Analytic {
    pub fn new(rs: Arc<RootSystem>, f: ExpPolynomial) -> Self {
        Self { rs, f: Arc::new(f) }
    }
}

impl PiecewiseFunction for Analytic {
    fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    fn representative(&self, _v: &[f64]) -> Result<Arc<ExpPolynomial>> {
        Ok(self.f.clone())
    }
}

/// Affine map `v ↦ s_{j_r} ⋯ s_{j_1} v` of a folding word.
pub fn word_map(rs: &RootSystem, word: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let n = rs.rank;
    let mut m = identity(n);
    let mut b = vec![0.0; n];
    for &j in word {
        let (sm, sb) = rs.affine_reflection_map(rs.simple_affine(j));
        m = mat_mul(&sm, &m, n);
        b = add(&mat_vec(&sm, &b), &sb);
    }
    (m, b)
}

/// The propagation operator applied to `f`:
/// `(T_k f)(v) = (Q_k(w) f)(wv)` where `wv` is the folded image of `v`.
pub struct PiecewiseEval {
    rs: Arc<RootSystem>,
    k: Multiplicity,
    source: ExpPolynomial,
    /// `Q_{j_i} ⋯ Q_{j_1} f` keyed by the folding-word prefix `[j_1, .., j_i]`.
    q_cache: Mutex<HashMap<Vec<usize>, Arc<ExpPolynomial>>>,
    rep_cache: Mutex<HashMap<Vec<usize>, Arc<ExpPolynomial>>>,
}

impl PiecewiseEval {
    pub fn new(rs: Arc<RootSystem>, k: Multiplicity, source: ExpPolynomial) -> Self {
        let mut q = HashMap::new();
        q.insert(Vec::new(), Arc::new(source.clone()));
        Self {
            rs,
            k,
            source,
            q_cache: Mutex::new(q),
            rep_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn source(&self) -> &ExpPolynomial {
        &self.source
    }

    pub fn multiplicity(&self) -> &Multiplicity {
        &self.k
    }

    pub fn cached_alcoves(&self) -> usize {
        self.rep_cache.lock().unwrap().len()
    }

    /// `Q_k(w) f` for the element `w = s_{j_r} ⋯ s_{j_1}` of the folding word.
    pub fn q_of_fold_word(&self, word: &[usize]) -> Arc<ExpPolynomial> {
        let (mut start, mut g) = {
            let cache = self.q_cache.lock().unwrap();
            let mut i = word.len();
            loop {
                if let Some(g) = cache.get(&word[..i]) {
                    break (i, g.clone());
                }
                i -= 1;
            }
        };
        while start < word.len() {
            let next = Arc::new(q_simple(&self.rs, word[start], &self.k, &g));
            start += 1;
            self.q_cache
                .lock()
                .unwrap()
                .insert(word[..start].to_vec(), next.clone());
            g = next;
        }
        g
    }
}

impl PiecewiseFunction for PiecewiseEval {
    fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    fn representative(&self, v: &[f64]) -> Result<Arc<ExpPolynomial>> {
        let (word, _) = self.rs.fold_to_alcove(v)?;
        if let Some(r) = self.rep_cache.lock().unwrap().get(&word) {
            return Ok(r.clone());
        }
        let q = self.q_of_fold_word(&word);
        let (m, b) = word_map(&self.rs, &word);
        let rep = Arc::new(q.pullback(&m, &b));
        self.rep_cache.lock().unwrap().insert(word, rep.clone());
        Ok(rep)
    }
}

/// `(s_a F)(v) = F(s_a v)`.
pub struct Reflected {
    inner: Arc<dyn PiecewiseFunction>,
    a: AffineRoot,
}

impl Reflected {
    pub fn new(inner: Arc<dyn PiecewiseFunction>, a: AffineRoot) -> Self {
        Self { inner, a }
    }
}

impl PiecewiseFunction for Reflected {
    fn root_system(&self) -> &RootSystem {
        self.inner.root_system()
    }

    fn representative(&self, v: &[f64]) -> Result<Arc<ExpPolynomial>> {
        let rs = self.inner.root_system();
        let sv = rs.affine_reflect(self.a, v);
        let (m, b) = rs.affine_reflection_map(self.a);
        Ok(Arc::new(self.inner.representative(&sv)?.pullback(&m, &b)))
    }
}

/// `D_u^k F = ∂_u F + Σ_{a>0} k_a Da(u) χ_a s_a F`, defined on regular points.
pub struct DunklImage {
    inner: Arc<dyn PiecewiseFunction>,
    u: Vec<f64>,
    k: Multiplicity,
}

impl DunklImage {
    pub fn new(inner: Arc<dyn PiecewiseFunction>, u: Vec<f64>, k: Multiplicity) -> Self {
        Self { inner, u, k }
    }
}

impl PiecewiseFunction for DunklImage {
    fn root_system(&self) -> &RootSystem {
        self.inner.root_system()
    }

    fn representative(&self, v: &[f64]) -> Result<Arc<ExpPolynomial>> {
        let rs = self.inner.root_system();
        let margin = rs.affine_margin(v);
        if margin <= REGULAR_TOL {
            return Err(Error::NearWall { distance: margin });
        }
        let mut out = self.inner.representative(v)?.directional_derivative(&self.u);
        for a in rs.negative_positive_affine_roots(v) {
            let coef = self.k.of_affine(rs, a) * crate::linalg::dot(&rs.roots[a.base], &self.u);
            if coef == 0.0 {
                continue;
            }
            let sv = rs.affine_reflect(a, v);
            let (m, b) = rs.affine_reflection_map(a);
            let reflected = self.inner.representative(&sv)?.pullback(&m, &b);
            out.add_assign(&reflected.scale_real(coef));
        }
        Ok(Arc::new(out))
    }
}

/// `(D_u^k T_k f)(v)`.
pub fn dunkl_eval(p: Arc<dyn PiecewiseFunction>, u: &[f64], k: &Multiplicity, v: &[f64]) -> Result<Complex64> {
    DunklImage::new(p, u.to_vec(), *k).eval(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::CartanKind;
    use crate::sampling::random_exp_poly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_multiplicity_propagation_is_identity() {
        let rs = Arc::new(RootSystem::new(CartanKind::A, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_exp_poly(&mut rng, 2, 3, 2, 1.0);
        let t = PiecewiseEval::new(rs, Multiplicity::zero(), f.clone());
        for v in [[1.3, -0.4], [-2.2, 0.9], [0.1, 0.05]] {
            assert!((t.eval(&v).unwrap() - f.eval(&v)).norm() < 1e-10);
        }
    }

    #[test]
    fn alcove_representative_matches_definition() {
        let rs = Arc::new(RootSystem::new(CartanKind::B, 2).unwrap());
        let k = Multiplicity::new(0.7, 1.4);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let f = random_exp_poly(&mut rng, 2, 2, 1, 1.0);
        let t = PiecewiseEval::new(rs.clone(), k, f.clone());
        let v = [1.45, -0.83];
        let (word, img) = rs.fold_to_alcove(&v).unwrap();
        let rev: Vec<usize> = word.iter().rev().copied().collect();
        let want = crate::operators::q_word(&rs, &rev, &k, &f).eval(&img);
        assert!((t.eval(&v).unwrap() - want).norm() < 1e-10 * (1.0 + want.norm()));
    }

    #[test]
    fn dunkl_refuses_wall_points() {
        let rs = Arc::new(RootSystem::new(CartanKind::A, 1).unwrap());
        let f = ExpPolynomial::constant(1, Complex64::new(1.0, 0.0));
        let t: Arc<dyn PiecewiseFunction> = Arc::new(PiecewiseEval::new(rs, Multiplicity::constant(1.0), f));
        assert!(dunkl_eval(t, &[1.0], &Multiplicity::constant(1.0), &[0.0]).is_err());
    }
}
