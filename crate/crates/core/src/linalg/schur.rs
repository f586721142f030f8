//! Block inversion through Schur complements.

use super::matrix::RealMatrix;
use crate::error::{Error, Result};

/// Condition estimates above this count as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// The four blocks of `M⁻¹` for `M = [[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockInverse {
    pub top_left: RealMatrix,
    pub top_right: RealMatrix,
    pub bottom_left: RealMatrix,
    pub bottom_right: RealMatrix,
}

impl BlockInverse {
    pub fn assemble(&self) -> RealMatrix {
        let (p, q) = (self.top_left.rows(), self.bottom_right.rows());
        let mut m = RealMatrix::zeros(p + q, p + q);
        m.set_block(0, 0, &self.top_left);
        m.set_block(0, p, &self.top_right);
        m.set_block(p, 0, &self.bottom_left);
        m.set_block(p, p, &self.bottom_right);
        m
    }
}

/// Inverse by LU with partial pivoting. `None` when a pivot vanishes or the
/// 1-norm condition estimate exceeds [`CONDITION_LIMIT`].
pub fn try_inverse(m: &RealMatrix) -> Option<RealMatrix> {
    assert!(m.is_square());
    let n = m.rows();
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (piv, max) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if max == 0.0 || !max.is_finite() {
            return None;
        }
        if piv != k {
            perm.swap(piv, k);
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            if factor != 0.0 {
                for j in k + 1..n {
                    lu[(i, j)] -= factor * lu[(k, j)];
                }
            }
        }
    }
    let mut inv = RealMatrix::zeros(n, n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        for (i, c) in col.iter_mut().enumerate() {
            *c = if perm[i] == j { 1.0 } else { 0.0 };
        }
        for i in 0..n {
            let mut s = col[i];
            for k in 0..i {
                s -= lu[(i, k)] * col[k];
            }
            col[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in i + 1..n {
                s -= lu[(i, k)] * col[k];
            }
            col[i] = s / lu[(i, i)];
        }
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    let cond = m.norm_one() * inv.norm_one();
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return None;
    }
    Some(inv)
}

/// Inverse of `[[a, b], [c, d]]` from the Schur complements of `a` and `d`:
///
/// ```text
/// [ S⁻¹          −S⁻¹ b d⁻¹      ]     S = a − b d⁻¹ c
/// [ −d⁻¹ c S⁻¹   (d − c a⁻¹ b)⁻¹ ]
/// ```
pub fn schur_block_inverse(
    a: &RealMatrix,
    b: &RealMatrix,
    c: &RealMatrix,
    d: &RealMatrix,
) -> Result<BlockInverse> {
    let (p, q) = (a.rows(), d.rows());
    if !a.is_square() || !d.is_square() {
        return Err(Error::Dimension("diagonal blocks must be square".into()));
    }
    if b.rows() != p || b.cols() != q || c.rows() != q || c.cols() != p {
        return Err(Error::Dimension(format!(
            "off-diagonal blocks must be {p}x{q} and {q}x{p}, got {}x{} and {}x{}",
            b.rows(),
            b.cols(),
            c.rows(),
            c.cols()
        )));
    }
    let d_inv = try_inverse(d).ok_or(Error::SingularBlock("d"))?;
    let s = a.sub(&b.matmul(&d_inv)?.matmul(c)?)?;
    let s_inv = try_inverse(&s).ok_or(Error::SingularBlock("a - b d^-1 c"))?;
    let a_inv = try_inverse(a).ok_or(Error::SingularBlock("a"))?;
    let t = d.sub(&c.matmul(&a_inv)?.matmul(b)?)?;
    let t_inv = try_inverse(&t).ok_or(Error::SingularBlock("d - c a^-1 b"))?;

    let top_right = s_inv.matmul(b)?.matmul(&d_inv)?.scaled(-1.0);
    let bottom_left = d_inv.matmul(c)?.matmul(&s_inv)?.scaled(-1.0);
    Ok(BlockInverse {
        top_left: s_inv,
        top_right,
        bottom_left,
        bottom_right: t_inv,
    })
}
