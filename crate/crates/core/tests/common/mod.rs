//! Dense reference implementations and random problem generators used by the
//! integration tests. Nothing here touches the library's solver code paths.

#![allow(dead_code)]

use bicr_core::SparseMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Dense = Vec<Vec<f64>>;

pub fn mv(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(u, v)| u * v).sum()).collect()
}

pub fn mvt(a: &Dense, x: &[f64]) -> Vec<f64> {
    let n = a[0].len();
    (0..n).map(|j| a.iter().zip(x).map(|(row, xi)| row[j] * xi).sum()).collect()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(u, v)| u * v).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn lin(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

/// Textbook CG on a dense matrix; returns `||r_k|| / ||b||` per iterate.
pub fn cg_history(a: &Dense, b: &[f64], tol: f64, max_iter: usize) -> Vec<f64> {
    let bn = norm(b);
    let mut x = vec![0.0; b.len()];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut hist = vec![norm(&r) / bn];
    for _ in 0..max_iter {
        let ap = mv(a, &p);
        let rr = dot(&r, &r);
        let alpha = rr / dot(&p, &ap);
        x = lin(1.0, &x, alpha, &p);
        r = lin(1.0, &r, -alpha, &ap);
        hist.push(norm(&r) / bn);
        if norm(&r) / bn < tol {
            break;
        }
        let beta = dot(&r, &r) / rr;
        p = lin(1.0, &r, beta, &p);
    }
    hist
}

/// Dense Bi-CG with explicit shadow residual; returns the residual vectors.
pub fn bicg_residuals(a: &Dense, b: &[f64], shadow: &[f64], tol: f64, max_iter: usize) -> Vec<Vec<f64>> {
    let bn = norm(b);
    let mut r = b.to_vec();
    let mut rt = shadow.to_vec();
    let mut p = r.clone();
    let mut pt = rt.clone();
    let mut out = vec![r.clone()];
    for _ in 0..max_iter {
        let ap = mv(a, &p);
        let atp = mvt(a, &pt);
        let rho = dot(&rt, &r);
        let alpha = rho / dot(&pt, &ap);
        r = lin(1.0, &r, -alpha, &ap);
        rt = lin(1.0, &rt, -alpha, &atp);
        out.push(r.clone());
        if norm(&r) / bn < tol {
            break;
        }
        let beta = dot(&rt, &r) / rho;
        p = lin(1.0, &r, beta, &p);
        pt = lin(1.0, &rt, beta, &pt);
    }
    out
}

/// Dense Bi-CR that recomputes every product explicitly (no `q` recursion).
pub fn bicr_residuals(a: &Dense, b: &[f64], shadow: &[f64], tol: f64, max_iter: usize) -> Vec<Vec<f64>> {
    let bn = norm(b);
    let mut r = b.to_vec();
    let mut rt = shadow.to_vec();
    let mut p = r.clone();
    let mut pt = rt.clone();
    let mut out = vec![r.clone()];
    for _ in 0..max_iter {
        let ap = mv(a, &p);
        let atpt = mvt(a, &pt);
        let rho = dot(&rt, &mv(a, &r));
        let alpha = rho / dot(&atpt, &ap);
        r = lin(1.0, &r, -alpha, &ap);
        rt = lin(1.0, &rt, -alpha, &atpt);
        out.push(r.clone());
        if norm(&r) / bn < tol {
            break;
        }
        let beta = dot(&rt, &mv(a, &r)) / rho;
        p = lin(1.0, &r, beta, &p);
        pt = lin(1.0, &rt, beta, &pt);
    }
    out
}

pub fn relres_of(residuals: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let bn = norm(b);
    residuals.iter().map(|r| norm(r) / bn).collect()
}

pub fn rel_diff(u: f64, v: f64) -> f64 {
    if u == v {
        0.0
    } else {
        (u - v).abs() / u.abs().max(v.abs())
    }
}

/// Symmetric, strictly diagonally dominant (hence SPD) sparse matrix.
pub fn random_spd(rng: &mut StdRng, n: usize, density: f64) -> SparseMatrix {
    let mut off = vec![0.0; n];
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < density {
                let v: f64 = rng.gen_range(-1.0..1.0);
                triplets.push((i, j, v));
                triplets.push((j, i, v));
                off[i] += v.abs();
                off[j] += v.abs();
            }
        }
    }
    for (i, o) in off.iter().enumerate() {
        triplets.push((i, i, o + rng.gen_range(0.5..2.0)));
    }
    SparseMatrix::from_triplets(n, n, &triplets).unwrap()
}

/// Random rectangular sparse matrix.
pub fn random_sparse(rng: &mut StdRng, n_rows: usize, n_cols: usize, density: f64) -> SparseMatrix {
    let mut triplets = Vec::new();
    for i in 0..n_rows {
        for j in 0..n_cols {
            if rng.gen::<f64>() < density {
                triplets.push((i, j, rng.gen_range(-2.0..2.0)));
            }
        }
    }
    SparseMatrix::from_triplets(n_rows, n_cols, &triplets).unwrap()
}

pub fn random_vec(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
