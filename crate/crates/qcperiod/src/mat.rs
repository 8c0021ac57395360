//! Small dense 3×3 matrix algebra over any [`Ring`].
//!
//! Three-dimensional frames are the natural size here: the cohomology of
//! the projective plane is three-dimensional, every connection matrix and
//! monodromy operator is 3×3, and the hypergeometric systems have rank 3.
//! Inverses go through the adjugate, so they exist exactly when the
//! determinant is invertible in the coefficient ring.

use crate::scalar::{Field, Ring};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat3<R: Ring>(pub [[R; 3]; 3]);

pub type Vec3<R> = [R; 3];

impl<R: Ring> Mat3<R> {
    pub fn from_rows(rows: [[R; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn zero() -> Self {
        Mat3(std::array::from_fn(|_| std::array::from_fn(|_| R::zero())))
    }

    pub fn identity() -> Self {
        Mat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { R::one() } else { R::zero() })
        }))
    }

    /// Diagonal matrix from three entries.
    pub fn diag(d: [R; 3]) -> Self {
        let mut m = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn entry(&self, i: usize, j: usize) -> &R {
        &self.0[i][j]
    }

    pub fn map<S: Ring>(&self, mut f: impl FnMut(&R) -> S) -> Mat3<S> {
        Mat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| f(&self.0[i][j]))
        }))
    }

    pub fn transpose(&self) -> Self {
        Mat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i].clone())
        }))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Mat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j].add_ref(&rhs.0[i][j]))
        }))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Mat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j].sub_ref(&rhs.0[i][j]))
        }))
    }

    pub fn neg(&self) -> Self {
        self.map(|e| e.neg_ref())
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|e| e.mul_ref(c))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Mat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = R::zero();
                for k in 0..3 {
                    acc = acc.add_ref(&self.0[i][k].mul_ref(&rhs.0[k][j]));
                }
                acc
            })
        }))
    }

    pub fn mul_vec(&self, v: &Vec3<R>) -> Vec3<R> {
        std::array::from_fn(|i| {
            let mut acc = R::zero();
            for k in 0..3 {
                acc = acc.add_ref(&self.0[i][k].mul_ref(&v[k]));
            }
            acc
        })
    }

    pub fn column(&self, j: usize) -> Vec3<R> {
        std::array::from_fn(|i| self.0[i][j].clone())
    }

    pub fn row(&self, i: usize) -> Vec3<R> {
        self.0[i].clone()
    }

    pub fn det(&self) -> R {
        let m = &self.0;
        let c0 = m[1][1].mul_ref(&m[2][2]).sub_ref(&m[1][2].mul_ref(&m[2][1]));
        let c1 = m[1][0].mul_ref(&m[2][2]).sub_ref(&m[1][2].mul_ref(&m[2][0]));
        let c2 = m[1][0].mul_ref(&m[2][1]).sub_ref(&m[1][1].mul_ref(&m[2][0]));
        m[0][0]
            .mul_ref(&c0)
            .sub_ref(&m[0][1].mul_ref(&c1))
            .add_ref(&m[0][2].mul_ref(&c2))
    }

    /// Transposed cofactor matrix; satisfies `self · adj = det · I` over any
    /// commutative ring.
    pub fn adjugate(&self) -> Self {
        let m = &self.0;
        let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0].mul_ref(&m[r1][c1]).sub_ref(&m[r0][c1].mul_ref(&m[r1][c0]))
        };
        // adj[i][j] = (−1)^{i+j} · minor with row j and column i removed.
        let rows = |skip: usize| -> (usize, usize) {
            match skip {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            }
        };
        Mat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let (r0, r1) = rows(j);
                let (c0, c1) = rows(i);
                let v = minor(r0, r1, c0, c1);
                if (i + j) % 2 == 0 {
                    v
                } else {
                    v.neg_ref()
                }
            })
        }))
    }

    pub fn trace(&self) -> R {
        self.0[0][0].add_ref(&self.0[1][1]).add_ref(&self.0[2][2])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|row| row.iter().all(|e| e.is_zero()))
    }
}

impl<F: Field> Mat3<F> {
    /// Inverse via the adjugate; `None` when the determinant has no inverse.
    pub fn try_inverse(&self) -> Option<Self> {
        let d_inv = self.det().try_inv()?;
        Some(self.adjugate().scale(&d_inv))
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Mat3<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..3 {
            writeln!(
                f,
                "[{}, {}, {}]",
                self.0[i][0], self.0[i][1], self.0[i][2]
            )?;
        }
        Ok(())
    }
}

/// Scalar product with the standard pairing vᵀw.
pub fn dot<R: Ring>(v: &Vec3<R>, w: &Vec3<R>) -> R {
    let mut acc = R::zero();
    for k in 0..3 {
        acc = acc.add_ref(&v[k].mul_ref(&w[k]));
    }
    acc
}
