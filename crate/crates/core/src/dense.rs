//! Small dense real matrices: nonsymmetric eigen-decomposition and LU solves.
//!
//! The eigensolver is the classical EISPACK pair: Householder reduction to
//! upper Hessenberg form (`orthes`) followed by the Francis double-shift QR
//! iteration with back-substitution for eigenvectors (`hqr2`), in the form
//! popularised by JAMA.

use std::cmp::Ordering;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::LinearOperator;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        DenseMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Leading `k × k` block.
    pub fn leading(&self, k: usize) -> DenseMatrix {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.data[i * k..(i + 1) * k].copy_from_slice(&self.row(i)[..k]);
        }
        m
    }

    /// True when every entry below the first subdiagonal is exactly zero.
    pub fn is_upper_hessenberg(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols.min(i.saturating_sub(1))).all(|j| self[(i, j)] == 0.0))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows
    }

    fn apply_to(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// Ordering used for every spectrum in the crate: decreasing modulus, then
/// decreasing real part, then increasing imaginary part.
pub fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(a.im.total_cmp(&b.im))
}

/// Eigenvalues with (optionally) eigenvectors, in [`spectral_order`].
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    /// One column per eigenvalue, unnormalised. Empty if not requested.
    pub vectors: Vec<Vec<Complex64>>,
}

/// Full eigen-decomposition of a general real square matrix.
pub fn eigen(a: &DenseMatrix, want_vectors: bool) -> Result<Eigen> {
    if !a.is_square() {
        return Err(Error::Dimension {
            expected: a.rows,
            found: a.cols,
        });
    }
    let mut h = a.clone();
    let mut v = if want_vectors {
        Some(DenseMatrix::identity(a.rows))
    } else {
        None
    };
    orthes(&mut h, v.as_mut());
    hqr2(h, v, want_vectors)
}

/// Eigen-decomposition of a matrix already in upper Hessenberg form.
pub fn eigen_hessenberg(h: &DenseMatrix, want_vectors: bool) -> Result<Eigen> {
    if !h.is_square() {
        return Err(Error::Dimension {
            expected: h.rows,
            found: h.cols,
        });
    }
    if !h.is_upper_hessenberg() {
        return Err(Error::InvalidArgument(
            "matrix has entries below the first subdiagonal".into(),
        ));
    }
    let v = want_vectors.then(|| DenseMatrix::identity(h.rows));
    hqr2(h.clone(), v, want_vectors)
}

/// Householder reduction to Hessenberg form; accumulates the similarity
/// transform into `v` when given. Leaves exact zeros below the subdiagonal.
fn orthes(h: &mut DenseMatrix, v: Option<&mut DenseMatrix>) {
    let n = h.rows;
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
    }
    if let Some(v) = v {
        for m in (1..high).rev() {
            if h[(m, m - 1)] == 0.0 {
                continue;
            }
            for i in m + 1..=high {
                ort[i] = h[(i, m - 1)];
            }
            for j in m..=high {
                let mut g = 0.0;
                for i in m..=high {
                    g += ort[i] * v[(i, j)];
                }
                g = (g / ort[m]) / h[(m, m - 1)];
                for i in m..=high {
                    v[(i, j)] += g * ort[i];
                }
            }
        }
    }
    for i in 2..n {
        for j in 0..i - 1 {
            h[(i, j)] = 0.0;
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// QR sweeps allowed per eigenvalue before giving up.
const MAX_SWEEPS: usize = 300;

#[allow(clippy::many_single_char_names)]
fn hqr2(mut h: DenseMatrix, mut v: Option<DenseMatrix>, want_vectors: bool) -> Result<Eigen> {
    let nn = h.rows;
    if nn == 0 {
        return Ok(Eigen {
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];
    let low = 0usize;
    let high = nn - 1;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z): (f64, f64, f64, f64, f64);
    let (mut w, mut x, mut y): (f64, f64, f64);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    // `n` is signed in the reference algorithm; track it as isize.
    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    while n >= low as isize {
        let nu = n as usize;
        let mut l = nu;
        while l > low {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            // one root
            h[(nu, nu)] += exshift;
            d[nu] = h[(nu, nu)];
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == nu - 1 {
            // two roots
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[(nu, nu)] += exshift;
            h[(nu - 1, nu - 1)] += exshift;
            x = h[(nu, nu)];
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != 0.0 {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
                x = h[(nu, nu - 1)];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;
                for j in nu - 1..nn {
                    z = h[(nu - 1, j)];
                    h[(nu - 1, j)] = q * z + p * h[(nu, j)];
                    h[(nu, j)] = q * h[(nu, j)] - p * z;
                }
                for i in 0..=nu {
                    z = h[(i, nu - 1)];
                    h[(i, nu - 1)] = q * z + p * h[(i, nu)];
                    h[(i, nu)] = q * h[(i, nu)] - p * z;
                }
                if let Some(v) = v.as_mut() {
                    for i in low..=high {
                        z = v[(i, nu - 1)];
                        v[(i, nu - 1)] = q * z + p * v[(i, nu)];
                        v[(i, nu)] = q * v[(i, nu)] - p * z;
                    }
                }
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[(nu, nu)];
            y = 0.0;
            w = 0.0;
            if l < nu {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }
            // Wilkinson's exceptional shift
            if iter == 10 {
                exshift += x;
                for i in low..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            // MATLAB's exceptional shift
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::EigenNotConverged {
                    unconverged: (low..=nu).collect(),
                });
            }

            // look for two consecutive small subdiagonal elements
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // double QR step on rows l..=n, columns m..=n
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                    if let Some(v) = v.as_mut() {
                        for i in low..=high {
                            p = x * v[(i, k)] + y * v[(i, k + 1)];
                            if notlast {
                                p += z * v[(i, k + 2)];
                                v[(i, k + 2)] -= p * r;
                            }
                            v[(i, k)] -= p;
                            v[(i, k + 1)] -= p * q;
                        }
                    }
                }
            }
        }
    }

    let values: Vec<Complex64> = d.iter().zip(&e).map(|(&re, &im)| Complex64::new(re, im)).collect();
    let vectors = match (want_vectors, v) {
        (true, Some(mut v)) => {
            back_substitute(&mut h, &mut v, &d, &e, norm);
            collect_vectors(&v, &e)
        }
        _ => Vec::new(),
    };
    Ok(sorted(values, vectors))
}

/// Eigenvectors of the quasi-triangular Schur factor, mapped back through
/// the accumulated transformations. Reuses the upper triangle of `h`.
#[allow(clippy::many_single_char_names)]
fn back_substitute(h: &mut DenseMatrix, v: &mut DenseMatrix, d: &[f64], e: &[f64], norm: f64) {
    let nn = h.rows;
    if norm == 0.0 {
        return;
    }
    let eps = f64::EPSILON;
    let (mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64);
    let (mut t, mut w, mut x, mut y): (f64, f64, f64, f64);
    for n in (0..nn).rev() {
        let p = d[n];
        let q = e[n];
        if q == 0.0 {
            let mut l = n;
            h[(n, n)] = 1.0;
            for i in (0..n).rev() {
                w = h[(i, i)] - p;
                r = 0.0;
                for j in l..=n {
                    r += h[(i, j)] * h[(j, n)];
                }
                if e[i] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        h[(i, n)] = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                    } else {
                        x = h[(i, i + 1)];
                        y = h[(i + 1, i)];
                        let qq = (d[i] - p) * (d[i] - p) + e[i] * e[i];
                        t = (x * s - z * r) / qq;
                        h[(i, n)] = t;
                        h[(i + 1, n)] = if x.abs() > z.abs() {
                            (-r - w * t) / x
                        } else {
                            (-s - y * t) / z
                        };
                    }
                    t = h[(i, n)].abs();
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            h[(j, n)] /= t;
                        }
                    }
                }
            }
        } else if q < 0.0 {
            let mut l = n - 1;
            if h[(n, n - 1)].abs() > h[(n - 1, n)].abs() {
                h[(n - 1, n - 1)] = q / h[(n, n - 1)];
                h[(n - 1, n)] = -(h[(n, n)] - p) / h[(n, n - 1)];
            } else {
                let (cr, ci) = cdiv(0.0, -h[(n - 1, n)], h[(n - 1, n - 1)] - p, q);
                h[(n - 1, n - 1)] = cr;
                h[(n - 1, n)] = ci;
            }
            h[(n, n - 1)] = 0.0;
            h[(n, n)] = 1.0;
            for i in (0..n.saturating_sub(1)).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=n {
                    ra += h[(i, j)] * h[(j, n - 1)];
                    sa += h[(i, j)] * h[(j, n)];
                }
                w = h[(i, i)] - p;
                if e[i] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        h[(i, n - 1)] = cr;
                        h[(i, n)] = ci;
                    } else {
                        x = h[(i, i + 1)];
                        y = h[(i + 1, i)];
                        let mut vr = (d[i] - p) * (d[i] - p) + e[i] * e[i] - q * q;
                        let vi = (d[i] - p) * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        h[(i, n - 1)] = cr;
                        h[(i, n)] = ci;
                        if x.abs() > z.abs() + q.abs() {
                            h[(i + 1, n - 1)] = (-ra - w * h[(i, n - 1)] + q * h[(i, n)]) / x;
                            h[(i + 1, n)] = (-sa - w * h[(i, n)] - q * h[(i, n - 1)]) / x;
                        } else {
                            let (cr, ci) = cdiv(-r - y * h[(i, n - 1)], -s - y * h[(i, n)], z, q);
                            h[(i + 1, n - 1)] = cr;
                            h[(i + 1, n)] = ci;
                        }
                    }
                    t = h[(i, n - 1)].abs().max(h[(i, n)].abs());
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            h[(j, n - 1)] /= t;
                            h[(j, n)] /= t;
                        }
                    }
                }
            }
        }
    }
    for j in (0..nn).rev() {
        for i in 0..nn {
            let mut acc = 0.0;
            for k in 0..=j {
                acc += v[(i, k)] * h[(k, j)];
            }
            v[(i, j)] = acc;
        }
    }
}

fn collect_vectors(v: &DenseMatrix, e: &[f64]) -> Vec<Vec<Complex64>> {
    let n = v.rows;
    let col = |j: usize| (0..n).map(move |i| v[(i, j)]);
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    while j < n {
        if e[j] == 0.0 {
            out.push(col(j).map(|x| Complex64::new(x, 0.0)).collect());
            j += 1;
        } else {
            // pair (j, j + 1): λ = d + i|e| has vector u + i w
            let plus: Vec<Complex64> = col(j).zip(col(j + 1)).map(|(a, b)| Complex64::new(a, b)).collect();
            let minus = plus.iter().map(|z| z.conj()).collect();
            out.push(plus);
            out.push(minus);
            j += 2;
        }
    }
    out
}

fn sorted(values: Vec<Complex64>, vectors: Vec<Vec<Complex64>>) -> Eigen {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| spectral_order(&values[a], &values[b]).then(a.cmp(&b)));
    let sorted_values = idx.iter().map(|&i| values[i]).collect();
    let sorted_vectors = if vectors.is_empty() {
        vectors
    } else {
        idx.iter().map(|&i| vectors[i].clone()).collect()
    };
    Eigen {
        values: sorted_values,
        vectors: sorted_vectors,
    }
}

/// Scales `v` to unit 2-norm and rotates it so that its largest-modulus
/// entry (first one on ties) is real and positive.
pub fn normalize_phase(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > best_abs {
            best = i;
            best_abs = a;
        }
    }
    let rot = v[best].conj() / (best_abs * norm);
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[best] = Complex64::new(v[best].re, 0.0);
}

/// LU factorisation with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension {
                expected: a.rows,
                found: a.cols,
            });
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs()))
                .unwrap_or(k);
            if lu[(pivot, k)] == 0.0 {
                return Err(Error::InvalidArgument("singular matrix".into()));
            }
            if pivot != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, pivot * n + j);
                }
                perm.swap(k, pivot);
            }
            let pk = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pk;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Solves `a x = b` with one step of iterative refinement.
pub fn solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let lu = Lu::new(a)?;
    let mut x = lu.solve(b);
    let ax = a.mul_vec(&x);
    let residual: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let dx = lu.solve(&residual);
    for (xi, di) in x.iter_mut().zip(dx) {
        *xi += di;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &DenseMatrix, lambda: Complex64, v: &[Complex64]) -> f64 {
        let n = a.rows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += a[(i, j)] * v[j];
            }
            worst = worst.max((acc - lambda * v[i]).norm());
        }
        worst / v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn permutation_spectrum() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let e = eigen(&a, true).unwrap();
        assert!((e.values[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((e.values[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        for (l, v) in e.values.iter().zip(&e.vectors) {
            assert!(residual(&a, *l, v) < 1e-14);
        }
    }

    #[test]
    fn triangular_spectrum_is_diagonal() {
        let a = DenseMatrix::from_rows(&[
            vec![0.5, 2.0, -1.0],
            vec![0.0, -0.25, 3.0],
            vec![0.0, 0.0, 0.75],
        ]);
        let e = eigen_hessenberg(&a, false).unwrap();
        let re: Vec<f64> = e.values.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![0.75, 0.5, -0.25]);
        assert!(e.values.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn three_cycle_is_on_unit_circle() {
        let a = DenseMatrix::from_rows(&[
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ]);
        let e = eigen(&a, true).unwrap();
        let c = (2.0 * std::f64::consts::PI / 3.0).cos();
        let s = (2.0 * std::f64::consts::PI / 3.0).sin();
        let want = [
            Complex64::new(1.0, 0.0),
            Complex64::new(c, -s),
            Complex64::new(c, s),
        ];
        for (got, want) in e.values.iter().zip(want) {
            assert!((got - want).norm() < 1e-14, "{got} vs {want}");
        }
        // conjugate pair is exact
        assert_eq!(e.values[1], e.values[2].conj());
        for (l, v) in e.values.iter().zip(&e.vectors) {
            assert!(residual(&a, *l, v) < 1e-13);
        }
    }

    #[test]
    fn rejects_non_hessenberg() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
        ]);
        assert!(eigen_hessenberg(&a, false).is_err());
    }

    #[test]
    fn empty_and_scalar() {
        assert!(eigen(&DenseMatrix::zeros(0, 0), true).unwrap().values.is_empty());
        let e = eigen(&DenseMatrix::from_rows(&[vec![0.3]]), true).unwrap();
        assert_eq!(e.values, vec![Complex64::new(0.3, 0.0)]);
        assert_eq!(e.vectors, vec![vec![Complex64::new(1.0, 0.0)]]);
    }

    #[test]
    fn phase_convention() {
        let mut v = vec![Complex64::new(0.0, 2.0), Complex64::new(0.0, -1.0)];
        normalize_phase(&mut v);
        assert!((v[0] - Complex64::new(2.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((v[1] - Complex64::new(-1.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert_eq!(v[0].im, 0.0);
    }

    #[test]
    fn lu_solve_with_refinement() {
        let a = DenseMatrix::from_rows(&[
            vec![1e-3, 2.0, 0.0],
            vec![1.0, 1.0, 1.0],
            vec![0.0, 3.0, 4.0],
        ]);
        let x_true = [0.5, -1.0, 2.0];
        let b = a.mul_vec(&x_true);
        let x = solve(&a, &b).unwrap();
        for (a, b) in x.iter().zip(x_true) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(solve(&DenseMatrix::zeros(2, 2), &[1.0, 1.0]).is_err());
    }
}
