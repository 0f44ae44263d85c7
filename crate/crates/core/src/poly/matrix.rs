use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ring::Ring;
use super::{MultiPoly, PolyError};

/// Dense matrix of polynomials over a common ring.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    ring: Arc<Ring>,
    rows: usize,
    cols: usize,
    entries: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn zeros(ring: &Arc<Ring>, rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix {
            ring: ring.clone(),
            rows,
            cols,
            entries: vec![MultiPoly::zero(ring); rows * cols],
        }
    }

    pub fn identity(ring: &Arc<Ring>, n: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, MultiPoly::one(ring));
        }
        m
    }

    pub fn from_rows(ring: &Arc<Ring>, rows: Vec<Vec<MultiPoly>>) -> Result<PolyMatrix, PolyError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(PolyError::Shape(format!(
                    "ragged rows: expected {ncols} columns, found {}",
                    row.len()
                )));
            }
            for e in row {
                if !(Arc::ptr_eq(e.ring(), ring) || **e.ring() == **ring) {
                    return Err(PolyError::RingMismatch {
                        left: ring.to_string(),
                        right: e.ring().to_string(),
                    });
                }
                entries.push(e);
            }
        }
        Ok(PolyMatrix {
            ring: ring.clone(),
            rows: nrows,
            cols: ncols,
            entries,
        })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: MultiPoly) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[MultiPoly] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = PolyMatrix::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, PolyError> {
        if self.cols != other.rows {
            return Err(PolyError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = PolyMatrix::zeros(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let sum = out.get(i, j) + &(a * b);
                    out.set(i, j, sum);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix, PolyError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix, PolyError> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &PolyMatrix,
        f: impl Fn(&MultiPoly, &MultiPoly) -> MultiPoly,
    ) -> Result<PolyMatrix, PolyError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(PolyError::Shape(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, c: &MultiPoly) -> PolyMatrix {
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(MultiPoly::is_zero)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[MultiPoly]) -> Result<Vec<MultiPoly>, PolyError> {
        if v.len() != self.rows {
            return Err(PolyError::Shape(format!(
                "vector of length {} against {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut out = vec![MultiPoly::zero(&self.ring); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let e = self.get(i, j);
                if !e.is_zero() {
                    *o = &*o + &(vi * e);
                }
            }
        }
        Ok(out)
    }

    /// Integer matrix obtained by substituting `values[i]` for variable `i`.
    pub fn eval_int(&self, values: &[BigInt]) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.eval_int(values)).collect())
            .collect()
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> Result<MultiPoly, PolyError> {
        if self.rows != self.cols {
            return Err(PolyError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(MultiPoly::one(&self.ring));
        }
        let mut e = Echelon::new(self);
        e.run();
        if e.pivots.len() < n {
            return Ok(MultiPoly::zero(&self.ring));
        }
        let det = e.a[n - 1][n - 1].clone();
        Ok(if e.swaps % 2 == 1 { -det } else { det })
    }

    /// Generator of the left kernel `{v : v * self = 0}`.
    ///
    /// The kernel over the fraction field must be one-dimensional. The
    /// returned vector has polynomial entries with collective integer
    /// content one, and its first nonzero entry has a positive leading
    /// coefficient.
    pub fn left_kernel(&self) -> Result<Vec<MultiPoly>, PolyError> {
        if self.rows != self.cols {
            return Err(PolyError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let raw = self.transpose().right_kernel_vector()?;
        Ok(normalize_vector(raw))
    }

    /// One nonzero solution of `self * x = 0`, with polynomial entries that
    /// are signed maximal minors (Cramer's rule on the echelon form).
    fn right_kernel_vector(&self) -> Result<Vec<MultiPoly>, PolyError> {
        let mut e = Echelon::new(self);
        e.run();
        let rank = e.pivots.len();
        if self.cols != rank + 1 {
            return Err(PolyError::KernelDimension {
                rank,
                size: self.cols,
            });
        }
        let free = (0..self.cols)
            .find(|c| !e.pivots.contains(c))
            .expect("one non-pivot column");
        let mut x = vec![MultiPoly::zero(&self.ring); self.cols];
        x[free] = if rank == 0 {
            MultiPoly::one(&self.ring)
        } else {
            e.a[rank - 1][e.pivots[rank - 1]].clone()
        };
        for r in (0..rank).rev() {
            let pc = e.pivots[r];
            let mut acc = MultiPoly::zero(&self.ring);
            for j in pc + 1..self.cols {
                if !x[j].is_zero() && !e.a[r][j].is_zero() {
                    acc = &acc + &(&e.a[r][j] * &x[j]);
                }
            }
            x[pc] = (-acc).exact_div(&e.a[r][pc])?;
        }
        Ok(x)
    }
}

/// Row echelon form by Bareiss elimination. Pivots are chosen as the
/// lowest-index row with a nonzero entry in the current column.
struct Echelon {
    a: Vec<Vec<MultiPoly>>,
    pivots: Vec<usize>,
    swaps: usize,
}

impl Echelon {
    fn new(m: &PolyMatrix) -> Echelon {
        Echelon {
            a: (0..m.rows).map(|i| m.row(i).to_vec()).collect(),
            pivots: Vec::new(),
            swaps: 0,
        }
    }

    fn run(&mut self) {
        let rows = self.a.len();
        let cols = self.a.first().map_or(0, Vec::len);
        if rows == 0 {
            return;
        }
        let ring = self.a[0][0].ring().clone();
        let mut prev = MultiPoly::one(&ring);
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !self.a[i][c].is_zero()) else {
                continue;
            };
            if p != r {
                self.a.swap(p, r);
                self.swaps += 1;
            }
            let (top, bottom) = self.a.split_at_mut(r + 1);
            let pivot_row = &top[r];
            let pivot = &pivot_row[c];
            for row in bottom.iter_mut() {
                let factor = std::mem::replace(&mut row[c], MultiPoly::zero(&ring));
                for j in c + 1..cols {
                    let mut v = pivot * &row[j];
                    if !factor.is_zero() && !pivot_row[j].is_zero() {
                        v = v - &factor * &pivot_row[j];
                    }
                    row[j] = if prev.is_one() {
                        v
                    } else {
                        v.exact_div(&prev)
                            .expect("Bareiss quotients are exact")
                    };
                }
            }
            prev = pivot.clone();
            self.pivots.push(c);
            r += 1;
        }
    }
}

/// Clears integer content and fixes the sign of the first nonzero entry.
pub(crate) fn normalize_vector(v: Vec<MultiPoly>) -> Vec<MultiPoly> {
    let mut content = BigInt::zero();
    for p in &v {
        content = num_integer::Integer::gcd(&content, &p.content());
    }
    if content.is_zero() {
        return v;
    }
    let negative = v
        .iter()
        .find(|p| !p.is_zero())
        .and_then(|p| p.leading_term())
        .is_some_and(|(_, c)| c.is_negative());
    if negative {
        content = -content;
    }
    if content.is_one() {
        return v;
    }
    v.into_iter()
        .map(|p| p.div_scalar(&content).expect("content divides"))
        .collect()
}

/// Determinant of an integer matrix by fraction-free elimination.
pub fn integer_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let factor = std::mem::take(&mut row[k]);
            for j in k + 1..n {
                let v = &pivot_row[k] * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = pivot_row[k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Arc<Ring> {
        Ring::new(["alpha", "beta", "q"]).unwrap()
    }

    fn m(r: &Arc<Ring>, rows: &[&[&str]]) -> PolyMatrix {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|s| MultiPoly::parse(r, s).unwrap()).collect())
            .collect();
        PolyMatrix::from_rows(r, rows).unwrap()
    }

    #[test]
    fn two_state_kernel() {
        let r = ring();
        let q = m(&r, &[&["-alpha", "alpha"], &["beta", "-beta"]]);
        let k = q.left_kernel().unwrap();
        assert_eq!(k[0].to_string(), "beta");
        assert_eq!(k[1].to_string(), "alpha");
    }

    #[test]
    fn cycle_kernel_is_uniform() {
        let r = ring();
        let q = m(&r, &[&["-1", "1", "0"], &["0", "-1", "1"], &["1", "0", "-1"]]);
        let k = q.left_kernel().unwrap();
        assert!(k.iter().all(MultiPoly::is_one));
    }

    #[test]
    fn kernel_dimension_is_reported() {
        let r = ring();
        let z = PolyMatrix::zeros(&r, 3, 3);
        match z.left_kernel() {
            Err(PolyError::KernelDimension { rank, size }) => {
                assert_eq!((rank, size), (0, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
        let full = m(&r, &[&["1", "0"], &["0", "q"]]);
        assert!(matches!(
            full.left_kernel(),
            Err(PolyError::KernelDimension { rank: 2, .. })
        ));
    }

    #[test]
    fn determinant_matches_expansion() {
        let r = ring();
        let a = m(
            &r,
            &[
                &["alpha", "1", "q"],
                &["beta", "alpha + q", "0"],
                &["1", "beta", "alpha*beta"],
            ],
        );
        // cofactor expansion along the first row
        let expected = MultiPoly::parse(
            &r,
            "alpha*((alpha + q)*alpha*beta - 0*beta) - 1*(beta*alpha*beta - 0) + q*(beta*beta - (alpha + q))",
        )
        .unwrap();
        assert_eq!(a.determinant().unwrap(), expected);
    }

    #[test]
    fn determinant_with_row_swap() {
        let r = ring();
        let a = m(&r, &[&["0", "q"], &["alpha", "beta"]]);
        assert_eq!(a.determinant().unwrap().to_string(), "-alpha*q");
    }

    #[test]
    fn integer_determinant_small() {
        let a = vec![
            vec![BigInt::from(2), BigInt::from(-1), BigInt::from(0)],
            vec![BigInt::from(-1), BigInt::from(2), BigInt::from(-1)],
            vec![BigInt::from(0), BigInt::from(-1), BigInt::from(2)],
        ];
        assert_eq!(integer_determinant(a), BigInt::from(4));
        let swap = vec![
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(0)],
        ];
        assert_eq!(integer_determinant(swap), BigInt::from(-1));
    }
}
