//! Small dense helpers for the coordinate realization.
//!
//! Vectors and covectors share one orthonormal coordinate system, so both are
//! plain `[f64]` slices and pairings are Euclidean dot products. Square
//! matrices are stored row-major in a flat `Vec<f64>`.

use num_complex::Complex64;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn cdot(a: &[Complex64], b: &[f64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

pub fn mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| dot(&m[i * n..(i + 1) * n], v)).collect()
}

pub fn mat_vec_c(m: &[f64], v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    (0..n)
        .map(|i| (0..n).map(|j| v[j] * m[i * n + j]).sum())
        .collect()
}

/// `Mᵀ v`
pub fn mat_t_vec_c(m: &[f64], v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    (0..n)
        .map(|j| (0..n).map(|i| v[i] * m[i * n + j]).sum())
        .collect()
}

pub fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

pub fn transpose(m: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = m[i * n + j];
        }
    }
    out
}

/// Compensated (Neumaier) summation of complex terms.
pub fn stable_sum<I: IntoIterator<Item = Complex64>>(terms: I) -> Complex64 {
    let (mut sr, mut cr, mut si, mut ci) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for z in terms {
        neumaier(&mut sr, &mut cr, z.re);
        neumaier(&mut si, &mut ci, z.im);
    }
    Complex64::new(sr + cr, si + ci)
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_sum_recovers_small_terms() {
        let terms = [1e16, 1.0, -1e16, 1.0].map(|x| Complex64::new(x, -x));
        let s = stable_sum(terms);
        assert_eq!(s, Complex64::new(2.0, -2.0));
    }

    #[test]
    fn transpose_is_inverse_of_itself() {
        let m: Vec<f64> = (0..9).map(|x| x as f64).collect();
        assert_eq!(transpose(&transpose(&m, 3), 3), m);
        assert_eq!(mat_mul(&identity(3), &m, 3), m);
    }
}
