//! Enumeration of the finite Weyl group `W_0`.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dist, mat_mul, mat_vec, mat_vec_c};
use crate::root_system::{weyl_order, RootSystem};

pub const DEFAULT_ORDER_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct WeylElement {
    /// Row-major matrix acting on vectors and covectors alike.
    pub matrix: Vec<f64>,
    /// `perm[α]` is the index of `w(α)`.
    pub perm: Vec<u32>,
    pub length: usize,
    /// Reduced word over the simple reflections `1..=n`; the element is
    /// `s_{word[0]} s_{word[1]} ⋯`.
    pub word: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeylGroup {
    pub rank: usize,
    pub elements: Vec<WeylElement>,
    pub longest: usize,
    #[serde(skip)]
    index: HashMap<Vec<u32>, usize>,
}

impl WeylGroup {
    pub fn new(rs: &RootSystem) -> Result<Self> {
        Self::with_cap(rs, DEFAULT_ORDER_CAP)
    }

    /// Breadth-first enumeration by left multiplication with simple
    /// reflections; BFS depth equals the length.
    pub fn with_cap(rs: &RootSystem, cap: u128) -> Result<Self> {
        let order = weyl_order(rs.kind, rs.rank);
        if order > cap {
            return Err(Error::WeylCapExceeded { order, cap });
        }
        let n = rs.rank;
        let nr = rs.num_roots();
        let simple_perm: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                (0..nr)
                    .map(|b| {
                        rs.index_of(&rs.reflect(i, &rs.roots[b]), 1e-9)
                            .expect("root system is closed under reflections")
                            as u32
                    })
                    .collect()
            })
            .collect();
        let simple_mat: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut m = crate::linalg::identity(n);
                let a = &rs.roots[i];
                let c = &rs.coroots[i];
                for r in 0..n {
                    for s in 0..n {
                        m[r * n + s] -= a[r] * c[s];
                    }
                }
                m
            })
            .collect();

        let id = WeylElement {
            matrix: crate::linalg::identity(n),
            perm: (0..nr as u32).collect(),
            length: 0,
            word: Vec::new(),
        };
        let mut index = HashMap::new();
        index.insert(id.perm.clone(), 0);
        let mut elements = vec![id];
        let mut head = 0;
        while head < elements.len() {
            for i in 0..n {
                let w = &elements[head];
                let perm: Vec<u32> = w
                    .perm
                    .iter()
                    .map(|&b| simple_perm[i][b as usize])
                    .collect();
                if index.contains_key(&perm) {
                    continue;
                }
                let mut word = vec![i + 1];
                word.extend_from_slice(&w.word);
                let el = WeylElement {
                    matrix: mat_mul(&simple_mat[i], &w.matrix, n),
                    perm: perm.clone(),
                    length: w.length + 1,
                    word,
                };
                index.insert(perm, elements.len());
                elements.push(el);
            }
            head += 1;
        }
        let longest = elements.len() - 1;
        Ok(Self {
            rank: n,
            elements,
            longest,
            index,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn act(&self, w: usize, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.elements[w].matrix, v)
    }

    pub fn act_c(&self, w: usize, v: &[Complex64]) -> Vec<Complex64> {
        mat_vec_c(&self.elements[w].matrix, v)
    }

    pub fn act_root(&self, w: usize, root: usize) -> usize {
        self.elements[w].perm[root] as usize
    }

    /// Index of `u w`.
    pub fn compose(&self, u: usize, w: usize) -> usize {
        let pu = &self.elements[u].perm;
        let perm: Vec<u32> = self.elements[w]
            .perm
            .iter()
            .map(|&b| pu[b as usize])
            .collect();
        self.index[&perm]
    }

    pub fn inverse(&self, w: usize) -> usize {
        let p = &self.elements[w].perm;
        let mut inv = vec![0u32; p.len()];
        for (i, &j) in p.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        self.index[&inv]
    }

    /// `#{α > 0 : wα < 0}`.
    pub fn inversion_count(&self, rs: &RootSystem, w: usize) -> usize {
        rs.positive_roots()
            .filter(|&a| !rs.is_positive(self.act_root(w, a)))
            .count()
    }

    /// `(-1)^{l(w)}`.
    pub fn sign(&self, w: usize) -> f64 {
        if self.elements[w].length.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Distinct images `wξ`, in enumeration order.
    pub fn orbit(&self, xi: &[f64]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for w in 0..self.order() {
            let img = self.act(w, xi);
            if !out.iter().any(|o| dist(o, &img) < 1e-9) {
                out.push(img);
            }
        }
        out
    }

    /// Elements fixing `xi`.
    pub fn stabilizer(&self, xi: &[f64], tol: f64) -> Vec<usize> {
        (0..self.order())
            .filter(|&w| dist(&self.act(w, xi), xi) < tol)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use crate::root_system::CartanKind;

    fn group(kind: CartanKind, n: usize) -> (RootSystem, WeylGroup) {
        let rs = RootSystem::new(kind, n).unwrap();
        let wg = WeylGroup::new(&rs).unwrap();
        (rs, wg)
    }

    #[test]
    fn orders_match_formula() {
        use CartanKind::*;
        for (k, n) in [(A, 1), (A, 2), (A, 3), (B, 2), (B, 3), (C, 3), (D, 4), (F, 4), (G, 2)] {
            let (rs, wg) = group(k, n);
            assert_eq!(wg.order() as u128, weyl_order(rs.kind, rs.rank));
        }
    }

    #[test]
    fn a2_lengths() {
        let (_, wg) = group(CartanKind::A, 2);
        let mut lens: Vec<usize> = wg.elements.iter().map(|e| e.length).collect();
        lens.sort();
        assert_eq!(lens, vec![0, 1, 1, 2, 2, 3]);
    }

    #[test]
    fn lengths_are_inversion_counts() {
        for (k, n) in [(CartanKind::B, 3), (CartanKind::G, 2), (CartanKind::D, 4)] {
            let (rs, wg) = group(k, n);
            for w in 0..wg.order() {
                assert_eq!(wg.inversion_count(&rs, w), wg.elements[w].length);
                assert_eq!(wg.elements[w].word.len(), wg.elements[w].length);
            }
            assert_eq!(wg.elements[wg.longest].length, rs.num_positive);
        }
    }

    #[test]
    fn matrices_are_orthogonal_and_match_perms() {
        let (rs, wg) = group(CartanKind::B, 3);
        for w in 0..wg.order() {
            for a in 0..rs.num_roots() {
                let img = wg.act(w, &rs.roots[a]);
                let b = wg.act_root(w, a);
                assert!(dist(&img, &rs.roots[b]) < 1e-12);
                for c in 0..rs.num_roots() {
                    let d = dot(&img, &wg.act(w, &rs.roots[c])) - dot(&rs.roots[a], &rs.roots[c]);
                    assert!(d.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn words_reproduce_elements() {
        let (rs, wg) = group(CartanKind::A, 3);
        let v = vec![0.3, -0.7, 1.1];
        for w in 0..wg.order() {
            let mut x = v.clone();
            for &i in wg.elements[w].word.iter().rev() {
                x = rs.reflect(i - 1, &x);
            }
            assert!(dist(&x, &wg.act(w, &v)) < 1e-12);
        }
    }

    #[test]
    fn group_closure_and_inverses() {
        let (_, wg) = group(CartanKind::G, 2);
        for u in 0..wg.order() {
            let ui = wg.inverse(u);
            assert_eq!(wg.compose(u, ui), 0);
            for w in 0..wg.order() {
                let uw = wg.compose(u, w);
                for x in 0..wg.order() {
                    assert_eq!(wg.compose(uw, x), wg.compose(u, wg.compose(w, x)));
                }
            }
        }
    }

    #[test]
    fn e7_enumeration_refused() {
        let rs = RootSystem::new(CartanKind::E, 7).unwrap();
        assert!(matches!(
            WeylGroup::new(&rs),
            Err(Error::WeylCapExceeded { .. })
        ));
    }

    #[test]
    fn orbit_of_fundamental_weight() {
        let (rs, wg) = group(CartanKind::A, 2);
        assert_eq!(wg.orbit(&rs.fundamental_weights[0]).len(), 3);
        assert_eq!(wg.orbit(&rs.rho).len(), 6);
        assert_eq!(wg.stabilizer(&rs.fundamental_weights[0], 1e-9).len(), 2);
    }
}
