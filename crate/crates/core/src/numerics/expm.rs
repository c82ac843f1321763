use alloc::vec::Vec;
use nalgebra::{ComplexField, DMatrix};
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::BandMatrix;
use crate::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn norm1<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|v| v.modulus()).sum::<f64>()).fold(0.0, f64::max)
}

/// Dense matrix exponential by degree-13 Padé with scaling and squaring.
pub fn expm<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension { expected: n, got: a.ncols() });
    }
    let nrm = norm1(a);
    if !nrm.is_finite() {
        return Err(Error::Domain("non-finite matrix in expm".into()));
    }
    let s = if nrm > THETA13 { Float::ceil(Float::log2(nrm / THETA13)) as i32 } else { 0 };
    let scale = T::from_real(Float::powi(2.0f64, -s));
    let a = a * scale;
    let b = |k: usize| T::from_real(PADE13[k]);
    let id = DMatrix::<T>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &id * b(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or(Error::Singular { row: 0 })?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// `e^{tA} v` for a band matrix by substepped truncated Taylor series.
pub fn expm_action<T: ComplexField<RealField = f64> + Copy>(
    a: &BandMatrix<T>,
    t: f64,
    v: &[T],
) -> Result<Vec<T>> {
    const DEGREE: usize = 40;
    const THETA: f64 = 6.0;
    let n = a.dim();
    let mut anorm: f64 = 0.0;
    let mut colsum = alloc::vec![0.0; n];
    for i in 0..n {
        for j in a.row_range(i) {
            colsum[j] += a.get(i, j).modulus();
        }
    }
    for c in colsum {
        anorm = anorm.max(c);
    }
    let steps = (Float::ceil(Float::abs(t) * anorm / THETA) as usize).max(1);
    let h = T::from_real(t / steps as f64);
    let mut f = v.to_vec();
    let sup = |x: &[T]| x.iter().map(|v| v.modulus()).fold(0.0, f64::max);
    for _ in 0..steps {
        let mut term = f.clone();
        let mut acc = f.clone();
        let mut small = 0;
        for k in 1..=DEGREE {
            let at = a.matvec(&term);
            let c = h / T::from_real(k as f64);
            for (tv, av) in term.iter_mut().zip(at) {
                *tv = c * av;
            }
            for (s, tv) in acc.iter_mut().zip(&term) {
                *s += *tv;
            }
            if sup(&term) <= 1e-17 * sup(&acc) {
                small += 1;
                if small == 2 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        f = acc;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex;

    #[test]
    fn exp_of_rotation() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -3.0, 3.0, 0.0]);
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - 3.0f64.cos()).abs() < 1e-13);
        assert!((e[(1, 0)] - 3.0f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn exp_of_jordan_block() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]).map(|v| Complex::new(v, 0.0));
        let e = expm(&a).unwrap();
        let e2 = 2.0f64.exp();
        assert!((e[(0, 0)].re - e2).abs() < 1e-12 * e2);
        assert!((e[(0, 1)].re - e2).abs() < 1e-12 * e2);
    }

    #[test]
    fn action_matches_dense() {
        let n = 30;
        let mut b = BandMatrix::<f64>::zeros(n, 1, 1);
        for i in 0..n {
            b.set(i, i, -2.0 * 50.0);
            if i > 0 {
                b.set(i, i - 1, 50.0);
            }
            if i + 1 < n {
                b.set(i, i + 1, 55.0);
            }
        }
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.2).sin()).collect();
        let x = expm_action(&b, 0.3, &v).unwrap();
        let d = expm(&(b.to_dense() * 0.3)).unwrap() * nalgebra::DVector::from_vec(v);
        for i in 0..n {
            assert!((x[i] - d[i]).abs() < 1e-11);
        }
    }
}
