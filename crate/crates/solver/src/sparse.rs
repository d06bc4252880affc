use numeric::{lit, Real};

/// Symmetric matrix in compressed-row form with both triangles stored and
/// sorted column indices.
#[derive(Debug, Clone)]
pub struct CsrMatrix<T> {
    pub(crate) row_ptr: Vec<usize>,
    pub(crate) cols: Vec<usize>,
    pub(crate) vals: Vec<T>,
    pub(crate) diag: Vec<usize>,
}

impl<T: Real> CsrMatrix<T> {
    /// Pattern from per-row neighbour lists (each must contain the row itself).
    pub fn from_pattern(mut rows: Vec<Vec<usize>>) -> Self {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut diag = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter_mut().enumerate() {
            r.sort_unstable();
            r.dedup();
            diag.push(cols.len() + r.binary_search(&i).expect("row lists its diagonal"));
            cols.extend_from_slice(r);
            row_ptr.push(cols.len());
        }
        let vals = vec![T::zero(); cols.len()];
        CsrMatrix { row_ptr, cols, vals, diag }
    }

    pub fn n(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// Position of entry `(i, j)` in the value array.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let r = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        r.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    pub fn clear(&mut self) {
        self.vals.iter_mut().for_each(|v| *v = T::zero());
    }

    pub fn mul(&self, x: &[T], y: &mut [T]) {
        for i in 0..self.n() {
            let mut s = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }
}

/// Incomplete Cholesky factor on the lower-triangular pattern of `A`.
#[derive(Debug, Clone)]
pub struct IncompleteCholesky<T> {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> IncompleteCholesky<T> {
    /// Factors `A + shift·diag(A)`, growing the shift until every pivot is positive.
    pub fn new(a: &CsrMatrix<T>, initial_shift: T) -> Self {
        let n = a.n();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        for i in 0..n {
            for k in a.row_ptr[i]..=a.diag[i] {
                cols.push(a.cols[k]);
            }
            row_ptr.push(cols.len());
        }
        let mut shift = initial_shift;
        loop {
            if let Some(vals) = Self::factor(a, &row_ptr, &cols, shift) {
                return IncompleteCholesky { row_ptr, cols, vals };
            }
            shift = if shift > T::zero() { shift * lit(10.0) } else { lit(1e-10) };
        }
    }

    fn factor(a: &CsrMatrix<T>, row_ptr: &[usize], cols: &[usize], shift: T) -> Option<Vec<T>> {
        let n = a.n();
        let mut vals = vec![T::zero(); cols.len()];
        let mut work = vec![T::zero(); n];
        let mut mark = vec![false; n];
        for i in 0..n {
            let (s0, s1) = (row_ptr[i], row_ptr[i + 1]);
            for k in s0..s1 {
                mark[cols[k]] = true;
                work[cols[k]] = T::zero();
            }
            let mut diag_sum = T::zero();
            for k in s0..s1 - 1 {
                let j = cols[k];
                let mut s = a.vals[a.row_ptr[i] + (k - s0)];
                for m in row_ptr[j]..row_ptr[j + 1] - 1 {
                    let c = cols[m];
                    if mark[c] {
                        s -= work[c] * vals[m];
                    }
                }
                let l = s / vals[row_ptr[j + 1] - 1];
                work[j] = l;
                vals[k] = l;
                diag_sum += l * l;
            }
            let d = a.vals[a.diag[i]] * (T::one() + shift) - diag_sum;
            for k in s0..s1 {
                mark[cols[k]] = false;
            }
            if !(d > T::zero()) || !d.is_finite() {
                return None;
            }
            vals[s1 - 1] = d.sqrt();
        }
        Some(vals)
    }

    /// Solves `L Lᵀ z = r`.
    pub fn apply(&self, r: &[T], z: &mut [T]) {
        let n = self.row_ptr.len() - 1;
        for i in 0..n {
            let mut s = r[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] - 1 {
                s -= self.vals[k] * z[self.cols[k]];
            }
            z[i] = s / self.vals[self.row_ptr[i + 1] - 1];
        }
        for i in (0..n).rev() {
            let d = self.vals[self.row_ptr[i + 1] - 1];
            z[i] /= d;
            let zi = z[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] - 1 {
                z[self.cols[k]] -= self.vals[k] * zi;
            }
        }
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn remove_mean<T: Real>(x: &mut [T]) {
    let m = x.iter().copied().sum::<T>() / T::from_usize(x.len()).unwrap();
    x.iter_mut().for_each(|v| *v -= m);
}

/// Outcome of a preconditioned conjugate-gradient solve.
#[derive(Debug, Clone, Copy)]
pub struct CgStats<T> {
    pub iterations: usize,
    pub relative_residual: T,
}

/// Preconditioned CG for `A x = b` starting from zero. With `singular` the
/// iteration is kept orthogonal to constants, the kernel of a Neumann operator.
pub fn pcg<T: Real>(
    a: &CsrMatrix<T>,
    pre: &IncompleteCholesky<T>,
    b: &[T],
    x: &mut [T],
    rel_tol: T,
    max_iter: usize,
    singular: bool,
) -> CgStats<T> {
    let n = a.n();
    x.iter_mut().for_each(|v| *v = T::zero());
    let mut r = b.to_vec();
    if singular {
        remove_mean(&mut r);
    }
    let bnorm = dot(&r, &r).sqrt();
    if bnorm == T::zero() {
        return CgStats { iterations: 0, relative_residual: T::zero() };
    }
    let mut z = vec![T::zero(); n];
    pre.apply(&r, &mut z);
    if singular {
        remove_mean(&mut z);
    }
    let mut p = z.clone();
    let mut q = vec![T::zero(); n];
    let mut rz = dot(&r, &z);
    let mut rel = T::one();
    for it in 1..=max_iter {
        a.mul(&p, &mut q);
        let alpha = rz / dot(&p, &q);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        rel = dot(&r, &r).sqrt() / bnorm;
        if rel <= rel_tol {
            return CgStats { iterations: it, relative_residual: rel };
        }
        pre.apply(&r, &mut z);
        if singular {
            remove_mean(&mut z);
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    CgStats { iterations: max_iter, relative_residual: rel }
}
