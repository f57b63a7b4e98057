mod common;

use common::{eigenvalues, matching_distance};
use gmspec::dense::{eigen, eigen_hessenberg, solve, DenseMatrix};
use gmspec::Complex64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, hessenberg: bool) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if !hessenberg || i <= j + 1 {
                m[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
    }
    m
}

fn to_nalgebra(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Characteristic polynomial coefficients (monic, highest first) by the
/// Faddeev–LeVerrier recursion.
fn char_poly(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    let id = DMatrix::<f64>::identity(n, n);
    for k in 1..=n {
        m = a * &m + &id * coeffs[k - 1];
        let c = -(a * &m).trace() / k as f64;
        coeffs.push(c);
    }
    coeffs
}

/// Roots of a monic polynomial by Durand–Kerner iteration followed by
/// Newton polishing.
fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let deriv = |z: Complex64| {
        coeffs[..n]
            .iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * (n - k) as f64)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let prev = roots.clone();
        for i in 0..n {
            let denom = (0..n)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
        }
        if roots.iter().zip(&prev).all(|(a, b)| (a - b).norm() < 1e-16) {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let d = deriv(*r);
            if d.norm() > 0.0 {
                *r -= eval(*r) / d;
            }
        }
    }
    roots
}

#[test]
fn hessenberg_spectrum_matches_characteristic_polynomial_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let h = random_matrix(&mut rng, 5, true);
        let got = eigen_hessenberg(&h, false).unwrap().values;
        let want = poly_roots(&char_poly(&to_nalgebra(&h)));
        let d = matching_distance(&got, &want);
        assert!(d < 1e-10, "distance {d}: {got:?} vs {want:?}");
    }
}

#[test]
fn general_spectrum_matches_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [1, 2, 3, 7, 20, 60] {
        let a = random_matrix(&mut rng, n, false);
        let got = eigen(&a, false).unwrap().values;
        let want = eigenvalues(&to_nalgebra(&a));
        assert!(matching_distance(&got, &want) < 1e-10);
    }
}

#[test]
fn eigenvectors_have_small_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in [3, 10, 40] {
        let a = random_matrix(&mut rng, n, false);
        let e = eigen(&a, true).unwrap();
        for (l, v) in e.values.iter().zip(&e.vectors) {
            let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for i in 0..n {
                let av: Complex64 = (0..n).map(|j| a[(i, j)] * v[j]).sum();
                assert!((av - l * v[i]).norm() <= 1e-10 * scale);
            }
        }
    }
}

#[test]
fn spectrum_is_sorted_and_conjugate_closed() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let a = random_matrix(&mut rng, 30, false);
    let vals = eigen(&a, false).unwrap().values;
    for w in vals.windows(2) {
        assert!(w[0].norm() >= w[1].norm() - 1e-15);
    }
    for z in vals.iter().filter(|z| z.im != 0.0) {
        assert!(vals.contains(&z.conj()), "{z} has no exact conjugate");
    }
}

#[test]
fn dense_solve_matches_nalgebra_lu() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for n in [1, 5, 50] {
        let a = random_matrix(&mut rng, n, false);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = solve(&a, &b).unwrap();
        let want = to_nalgebra(&a).lu().solve(&nalgebra::DVector::from_vec(b)).unwrap();
        for (u, v) in x.iter().zip(want.iter()) {
            assert!((u - v).abs() <= 1e-9 * v.abs().max(1.0));
        }
    }
}
