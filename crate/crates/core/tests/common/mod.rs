//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;

/// Upper-triangular relation lookup over raw bits, recomputing offsets by
/// walking the pair order.
pub fn rel(n: usize, bits: u64, i: usize, j: usize) -> bool {
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            if (a, b) == (i, j) {
                return bits >> k & 1 == 1;
            }
            k += 1;
        }
    }
    unreachable!("pair ({i}, {j}) outside n = {n}")
}

/// Triple scan for `C_ij = C_jk = 1, C_ik = 0`.
pub fn violations(n: usize, bits: u64) -> u32 {
    let mut r = 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if rel(n, bits, i, j) && rel(n, bits, j, k) && !rel(n, bits, i, k) {
                    r += 1;
                }
            }
        }
    }
    r
}

/// All transitive bit patterns for `n` elements, ascending.
pub fn brute_force_sets(n: usize) -> Vec<u64> {
    let q = n * (n - 1) / 2;
    (0..1u64 << q).filter(|&b| violations(n, b) == 0).collect()
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, descending.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Absolute gap of a reversible kernel from its symmetrised form.
pub fn reference_gap(t: &DMatrix<f64>, nu: &[f64]) -> f64 {
    let n = t.nrows();
    let s = DMatrix::from_fn(n, n, |a, b| (nu[a] / nu[b]).sqrt() * t[(a, b)]);
    let s = (&s + s.transpose()) * 0.5;
    let ev = jacobi_eigenvalues(&s);
    1.0 - ev[1..].iter().map(|x| x.abs()).fold(0.0, f64::max)
}
