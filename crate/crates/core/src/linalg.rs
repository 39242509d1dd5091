//! Dense matrices over a [`Field`], with exact elimination, characteristic
//! polynomials via Hessenberg reduction, and kernels of maps that are only
//! linear over the involution's fixed field.

use crate::numeric::{Fe, Field};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Fe::ONE;
        }
        m
    }

    pub fn scalar(n: usize, c: Fe) -> Mat {
        Mat::diag(&vec![c; n])
    }

    pub fn diag(entries: &[Fe]) -> Mat {
        let mut m = Mat::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Fe>) -> Mat {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Mat { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Fe) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix from row-major integers reduced into the prime field.
    pub fn from_ints(field: &Field, rows: usize, cols: usize, ints: &[i64]) -> Mat {
        assert_eq!(ints.len(), rows * cols, "matrix data length");
        Mat {
            rows,
            cols,
            data: ints.iter().map(|&n| field.from_i64(n)).collect(),
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

    pub fn data(&self) -> &[Fe] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Fe> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn map(&self, mut f: impl FnMut(Fe) -> Fe) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| f(e)).collect(),
        }
    }

    pub fn add(&self, field: &Field, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, field: &Field, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(&a, &b)| field.sub(a, b))
                .collect(),
        }
    }

    pub fn neg(&self, field: &Field) -> Mat {
        self.map(|e| field.neg(e))
    }

    pub fn scale(&self, field: &Field, c: Fe) -> Mat {
        self.map(|e| field.mul(e, c))
    }

    pub fn mul(&self, field: &Field, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o[(k, j)];
                    if !b.is_zero() {
                        let idx = i * o.cols + j;
                        out.data[idx] = field.add(out.data[idx], field.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, field: &Field, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(self.cols, v.len(), "shape mismatch in product");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Fe::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
            })
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise involution.
    pub fn conj(&self, field: &Field) -> Mat {
        self.map(|e| field.conj(e))
    }

    pub fn conj_transpose(&self, field: &Field) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| field.conj(self[(j, i)]))
    }

    pub fn trace(&self, field: &Field) -> Fe {
        (0..self.rows.min(self.cols)).fold(Fe::ZERO, |acc, i| field.add(acc, self[(i, i)]))
    }

    /// `[A, B] = AB - BA`.
    pub fn bracket(&self, field: &Field, o: &Mat) -> Mat {
        self.mul(field, o).sub(field, &o.mul(field, self))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, field: &Field) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = field.inv(m[(r, c)]);
            for j in c..m.cols {
                m[(r, j)] = field.mul(m[(r, j)], inv);
            }
            for i in 0..m.rows {
                let factor = m[(i, c)];
                if i != r && !factor.is_zero() {
                    for j in c..m.cols {
                        let t = field.mul(factor, m[(r, j)]);
                        m[(i, j)] = field.sub(m[(i, j)], t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, field: &Field) -> usize {
        self.rref(field).1.len()
    }

    /// A basis of `{v : Av = 0}` in reduced form.
    pub fn nullspace(&self, field: &Field) -> Vec<Vec<Fe>> {
        let (r, pivots) = self.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Fe::ZERO; self.cols];
                v[fc] = Fe::ONE;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = field.neg(r[(row, fc)]);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self, field: &Field) -> Option<Mat> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let aug = Mat::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)]
            } else if j - n == i {
                Fe::ONE
            } else {
                Fe::ZERO
            }
        });
        let (r, pivots) = aug.rref(field);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| r[(i, j + n)]))
    }

    pub fn det(&self, field: &Field) -> Fe {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Fe::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Fe::ZERO;
            };
            if p != c {
                m.swap_rows(p, c);
                det = field.neg(det);
            }
            let pivot = m[(c, c)];
            det = field.mul(det, pivot);
            let inv = field.inv(pivot);
            for i in c + 1..n {
                let factor = field.mul(m[(i, c)], inv);
                if !factor.is_zero() {
                    for j in c..n {
                        let t = field.mul(factor, m[(c, j)]);
                        m[(i, j)] = field.sub(m[(i, j)], t);
                    }
                }
            }
        }
        det
    }

    /// Coefficients of `det(zI - A)`, lowest degree first.
    pub fn charpoly(&self, field: &Field) -> Vec<Fe> {
        assert!(
            self.is_square(),
            "characteristic polynomial of a non-square matrix"
        );
        let n = self.rows;
        let mut h = self.clone();
        for j in 0..n.saturating_sub(2) {
            let Some(p) = (j + 1..n).find(|&i| !h[(i, j)].is_zero()) else {
                continue;
            };
            if p != j + 1 {
                h.swap_rows(p, j + 1);
                h.swap_cols(p, j + 1);
            }
            let inv = field.inv(h[(j + 1, j)]);
            for r in j + 2..n {
                let u = field.mul(h[(r, j)], inv);
                if u.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let t = field.mul(u, h[(j + 1, c)]);
                    h[(r, c)] = field.sub(h[(r, c)], t);
                }
                for i in 0..n {
                    let t = field.mul(u, h[(i, r)]);
                    h[(i, j + 1)] = field.add(h[(i, j + 1)], t);
                }
            }
        }
        // p[k] is the characteristic polynomial of the leading k x k block.
        let mut p: Vec<Vec<Fe>> = vec![vec![Fe::ONE]];
        for k in 0..n {
            let mut next = vec![Fe::ZERO; k + 2];
            for (d, &c) in p[k].iter().enumerate() {
                next[d + 1] = field.add(next[d + 1], c);
                next[d] = field.sub(next[d], field.mul(h[(k, k)], c));
            }
            let mut prod = Fe::ONE;
            for i in (0..k).rev() {
                prod = field.mul(prod, h[(i + 1, i)]);
                if prod.is_zero() {
                    break;
                }
                let coef = field.mul(h[(i, k)], prod);
                for (d, &c) in p[i].iter().enumerate() {
                    next[d] = field.sub(next[d], field.mul(coef, c));
                }
            }
            p.push(next);
        }
        p.pop().unwrap_or_else(|| vec![Fe::ONE])
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// Renders entries row by row, e.g. `[[1,0],[0,2]]`.
    pub fn format(&self, field: &Field) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let entries: Vec<String> = self.row(i).iter().map(|&e| field.format(e)).collect();
                format!("[{}]", entries.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Fe;
    fn index(&self, (i, j): (usize, usize)) -> &Fe {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Fe {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// A basis over the fixed field of the kernel of a fixed-field-linear map
/// `F^input_dim -> F^m`, given as a closure on coordinate vectors.
pub fn scalar_kernel(
    field: &Field,
    input_dim: usize,
    apply: impl Fn(&[Fe]) -> Vec<Fe>,
) -> Vec<Vec<Fe>> {
    let s = field.scalar_degree();
    let basis_scalars: Vec<Fe> = match s {
        1 => vec![Fe::ONE],
        _ => vec![Fe::ONE, field.generator()],
    };
    let mut columns: Vec<Vec<Fe>> = Vec::with_capacity(input_dim * s);
    for i in 0..input_dim {
        for &b in &basis_scalars {
            let mut v = vec![Fe::ZERO; input_dim];
            v[i] = b;
            let out = apply(&v);
            let mut col = Vec::with_capacity(out.len() * s);
            for e in out {
                col.extend_from_slice(&field.scalar_coords(e)[..s]);
            }
            columns.push(col);
        }
    }
    let out_len = columns.first().map_or(0, Vec::len);
    let m = Mat::from_fn(out_len, columns.len(), |i, j| columns[j][i]);
    m.nullspace(field)
        .into_iter()
        .map(|coords| {
            (0..input_dim)
                .map(|i| field.from_scalar_coords(&coords[i * s..(i + 1) * s]))
                .collect()
        })
        .collect()
}

/// A basis of the kernel of a fixed-field-linear map on coefficient vectors
/// `c ∈ F0^d`, returned as coefficient vectors with entries in `F0`.
pub fn coefficient_kernel(
    field: &Field,
    d: usize,
    apply: impl Fn(&[Fe]) -> Vec<Fe>,
) -> Vec<Vec<Fe>> {
    let s = field.scalar_degree();
    let columns: Vec<Vec<Fe>> = (0..d)
        .map(|i| {
            let mut c = vec![Fe::ZERO; d];
            c[i] = Fe::ONE;
            apply(&c)
                .into_iter()
                .flat_map(|e| field.scalar_coords(e).into_iter().take(s))
                .collect()
        })
        .collect();
    let rows = columns.first().map_or(0, Vec::len);
    Mat::from_fn(rows, d, |i, j| columns[j][i]).nullspace(field)
}

/// `Σ c_i b_i`.
pub fn combine(field: &Field, coeffs: &[Fe], basis: &[Mat]) -> Mat {
    let (r, c) = basis.first().map_or((0, 0), |b| (b.rows(), b.cols()));
    coeffs
        .iter()
        .zip(basis)
        .fold(Mat::zeros(r, c), |acc, (&k, b)| {
            acc.add(field, &b.scale(field, k))
        })
}

/// All fixed-field combinations of `basis`, in base-`q0` digit order with the
/// first basis vector varying fastest.
pub fn span_elements<'a>(
    field: &'a Field,
    basis: &'a [Vec<Fe>],
) -> impl Iterator<Item = Vec<Fe>> + 'a {
    let scalars = field.fixed_elements();
    let q0 = scalars.len() as u128;
    let len = basis.first().map_or(0, Vec::len);
    let total = q0.checked_pow(basis.len() as u32).unwrap_or(u128::MAX);
    (0..total).map(move |mut idx| {
        let mut v = vec![Fe::ZERO; len];
        for b in basis {
            let c = scalars[(idx % q0) as usize];
            idx /= q0;
            if !c.is_zero() {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = field.add(*x, field.mul(c, y));
                }
            }
        }
        v
    })
}

/// Number of elements in the fixed-field span of `dim` independent vectors.
pub fn span_size(field: &Field, dim: usize) -> Option<u64> {
    (field.fixed_order() as u64).checked_pow(dim as u32)
}

/// Evaluates a polynomial given lowest coefficient first.
pub fn poly_eval(field: &Field, coeffs: &[Fe], x: Fe) -> Fe {
    coeffs
        .iter()
        .rev()
        .fold(Fe::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Involution;

    fn f5() -> Field {
        Field::new(5, 1, Involution::Identity).unwrap()
    }

    #[test]
    fn inverse_and_det() {
        let f = f5();
        let a = Mat::from_ints(&f, 3, 3, &[1, 2, 0, 0, 1, 3, 4, 0, 2]);
        let inv = a.inverse(&f).unwrap();
        assert_eq!(a.mul(&f, &inv), Mat::identity(3));
        assert_eq!(a.det(&f), Fe::ONE);
        let singular = Mat::from_ints(&f, 3, 3, &[1, 2, 0, 0, 1, 3, 4, 0, 1]);
        assert_eq!(singular.det(&f), Fe::ZERO);
        assert!(singular.inverse(&f).is_none());
        let b = Mat::from_ints(&f, 2, 2, &[2, 1, 1, 1]);
        assert_eq!(b.det(&f), Fe::ONE);
        assert!(Mat::zeros(2, 2).inverse(&f).is_none());
    }

    #[test]
    fn nullspace_dimension() {
        let f = f5();
        let a = Mat::from_ints(&f, 2, 4, &[1, 1, 0, 0, 0, 0, 1, 1]);
        let ns = a.nullspace(&f);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(a.mul_vec(&f, &v).iter().all(|e| e.is_zero()));
        }
    }

    #[test]
    fn charpoly_matches_determinant_evaluation() {
        let f = Field::new(7, 1, Involution::Identity).unwrap();
        let a = Mat::from_ints(&f, 4, 4, &[1, 2, 3, 4, 0, 5, 6, 1, 2, 0, 1, 3, 4, 4, 0, 2]);
        let cp = a.charpoly(&f);
        assert_eq!(cp.len(), 5);
        assert_eq!(cp[4], Fe::ONE);
        for z in f.elements() {
            let zi_a = Mat::scalar(4, z).sub(&f, &a);
            assert_eq!(poly_eval(&f, &cp, z), zi_a.det(&f));
        }
    }

    #[test]
    fn scalar_kernel_of_trace_zero_condition() {
        // x + conj(x) = 0 on F9 is a 1-dimensional F3-subspace.
        let f = Field::new(3, 2, Involution::Frobenius).unwrap();
        let ker = scalar_kernel(&f, 1, |v| vec![f.add(v[0], f.conj(v[0]))]);
        assert_eq!(ker.len(), 1);
        let elems: Vec<_> = span_elements(&f, &ker).collect();
        assert_eq!(elems.len(), 3);
        for v in elems {
            assert_eq!(f.add(v[0], f.conj(v[0])), Fe::ZERO);
        }
    }
}
