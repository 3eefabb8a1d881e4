use std::fmt;

use serde::{Deserialize, Serialize};

use super::AlgebraError;

pub const MAX_DIM: usize = 8;

/// Square integer matrix of dimension 1..=8, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerMatrix {
    dim: usize,
    data: Vec<i64>,
}

impl IntegerMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, AlgebraError> {
        let dim = rows.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(AlgebraError::Dimension(dim));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(AlgebraError::NotSquare);
        }
        Ok(Self { dim, data: rows.concat() })
    }

    pub fn identity(dim: usize) -> Result<Self, AlgebraError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(AlgebraError::Dimension(dim));
        }
        let mut data = vec![0; dim * dim];
        (0..dim).for_each(|i| data[i * dim + i] = 1);
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.dim).map(<[i64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let data = (0..d * d).map(|idx| self.get(idx % d, idx / d)).collect();
        Self { dim: d, data }
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.iter().map(|&x| x as f64).collect()).collect()
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        self.data.chunks(self.dim).map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Some power up to (d−1)² + 1 is strictly positive (Wielandt bound).
    pub fn is_primitive(&self) -> bool {
        let d = self.dim;
        if self.data.iter().any(|&x| x < 0) {
            return false;
        }
        let base: Vec<bool> = self.data.iter().map(|&x| x > 0).collect();
        let mut power = base.clone();
        for _ in 0..(d - 1) * (d - 1) + 1 {
            if power.iter().all(|&x| x) {
                return true;
            }
            power = (0..d * d)
                .map(|idx| {
                    let (i, j) = (idx / d, idx % d);
                    (0..d).any(|k| power[i * d + k] && base[k * d + j])
                })
                .collect();
        }
        power.iter().all(|&x| x)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i128, AlgebraError> {
        let d = self.dim;
        let mut m: Vec<i128> = self.data.iter().map(|&x| i128::from(x)).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..d {
            if m[k * d + k] == 0 {
                match (k + 1..d).find(|&r| m[r * d + k] != 0) {
                    Some(r) => {
                        for c in 0..d {
                            m.swap(k * d + c, r * d + c);
                        }
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let num = m[i * d + j]
                        .checked_mul(m[k * d + k])
                        .and_then(|x| m[i * d + k].checked_mul(m[k * d + j]).and_then(|y| x.checked_sub(y)))
                        .ok_or(AlgebraError::Overflow("determinant"))?;
                    m[i * d + j] = num / prev;
                }
            }
            prev = m[k * d + k];
        }
        Ok(sign * m[(d - 1) * d + (d - 1)])
    }

    /// Monic characteristic polynomial det(xI − M), coefficients from degree 0 up to d,
    /// computed exactly by the Faddeev–LeVerrier recursion.
    pub fn characteristic_polynomial(&self) -> Result<Vec<i128>, AlgebraError> {
        let d = self.dim;
        let a: Vec<i128> = self.data.iter().map(|&x| i128::from(x)).collect();
        let mut coeffs = vec![0i128; d + 1];
        coeffs[d] = 1;
        let mut mk = vec![0i128; d * d];
        let err = || AlgebraError::Overflow("characteristic polynomial");
        for k in 1..=d {
            // M_k = A·M_{k−1} + c_{d−k+1}·I
            let mut next = vec![0i128; d * d];
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0i128;
                    for l in 0..d {
                        s = s.checked_add(a[i * d + l].checked_mul(mk[l * d + j]).ok_or_else(err)?).ok_or_else(err)?;
                    }
                    next[i * d + j] = s;
                }
                next[i * d + i] = next[i * d + i].checked_add(coeffs[d - k + 1]).ok_or_else(err)?;
            }
            mk = next;
            let mut tr = 0i128;
            for i in 0..d {
                for l in 0..d {
                    tr = tr.checked_add(a[i * d + l].checked_mul(mk[l * d + i]).ok_or_else(err)?).ok_or_else(err)?;
                }
            }
            coeffs[d - k] = -tr / k as i128;
        }
        Ok(coeffs)
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn primitivity() {
        assert!(m(&[&[1, 1], &[1, 0]]).is_primitive());
        assert!(!m(&[&[1, 0], &[0, 1]]).is_primitive());
        assert!(!m(&[&[0, 1], &[1, 0]]).is_primitive());
        assert!(m(&[&[1, 1, 0], &[1, 1, 1], &[1, 0, 0]]).is_primitive());
        // Needs exactly the Wielandt exponent (d−1)²+1 = 5 for d = 3.
        assert!(m(&[&[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]).is_primitive());
    }

    #[test]
    fn determinants() {
        assert_eq!(m(&[&[1, 1], &[1, 0]]).determinant().unwrap(), -1);
        assert_eq!(m(&[&[1, 2], &[1, 0]]).determinant().unwrap(), -2);
        assert_eq!(m(&[&[1, 1, 0], &[1, 1, 1], &[1, 0, 0]]).determinant().unwrap(), 1);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant().unwrap(), -1);
        assert_eq!(m(&[&[1, 1], &[1, 1]]).determinant().unwrap(), 0);
    }

    #[test]
    fn characteristic_polynomials() {
        // x² − x − 1
        assert_eq!(m(&[&[1, 1], &[1, 0]]).characteristic_polynomial().unwrap(), vec![-1, -1, 1]);
        // x³ − 2x² − 1
        assert_eq!(m(&[&[1, 1, 0], &[1, 1, 1], &[1, 0, 0]]).characteristic_polynomial().unwrap(), vec![-1, 0, -2, 1]);
    }

    fn small_matrix() -> impl Strategy<Value = IntegerMatrix> {
        (1usize..=5).prop_flat_map(|d| {
            proptest::collection::vec(-4i64..5, d * d).prop_map(move |data| IntegerMatrix { dim: d, data })
        })
    }

    proptest! {
        #[test]
        fn constant_term_is_signed_determinant(mat in small_matrix()) {
            let p = mat.characteristic_polynomial().unwrap();
            let sign = if mat.dim() % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(p[0], sign * mat.determinant().unwrap());
            prop_assert_eq!(mat.transpose().determinant().unwrap(), mat.determinant().unwrap());
        }
    }
}
