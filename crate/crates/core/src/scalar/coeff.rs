//! The field interface shared by the exact and the floating backends.

use std::fmt::Debug;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::halfint::HalfInt;
use super::qscalar::QScalar;
use super::ratfunc::RatFunc;
use super::ScalarError;

/// Which coefficient field a model is built over.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float { z: f64 },
}

impl Backend {
    pub fn float(z: f64) -> Result<Self, ScalarError> {
        if z == 0.0 || !z.is_finite() {
            return Err(ScalarError::ZeroZ);
        }
        Ok(Backend::Float { z })
    }
}

/// Field operations needed by the matrix code. `RatFunc` is the exact field;
/// `f64` stands for values at a fixed `z`, which travels as `Param`.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync + 'static {
    type Param: Copy + Debug + Send + Sync + 'static;
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn inv_ref(&self) -> Option<Self>;

    fn from_ratfunc(r: &RatFunc, p: Self::Param) -> Result<Self, ScalarError>;
    fn to_qscalar(&self, p: Self::Param) -> QScalar;

    /// `s^e` with `s = q^(1/2)`.
    fn s_pow(e: i64, p: Self::Param) -> Self;

    /// Absolute value for float residuals; exact values report 0 or 1.
    fn magnitude(&self) -> f64;

    /// Basis of the right null space of a `rows.len() × ncols` matrix.
    fn nullspace(rows: &[Vec<Self>], ncols: usize) -> Vec<Vec<Self>>;

    /// Rank of a matrix given by rows.
    fn rank(rows: &[Vec<Self>], ncols: usize) -> usize;

    fn qnum(x: HalfInt, p: Self::Param) -> Self {
        Self::from_ratfunc(&RatFunc::qnum(x), p).expect("q-numbers have no poles")
    }
}

impl Coeff for RatFunc {
    type Param = ();
    const EXACT: bool = true;

    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn from_int(n: i64) -> Self {
        RatFunc::from_int(n)
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add_ref(&self, o: &Self) -> Self {
        RatFunc::add_ref(self, o)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        RatFunc::sub_ref(self, o)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        RatFunc::mul_ref(self, o)
    }
    fn neg_ref(&self) -> Self {
        RatFunc::neg_ref(self)
    }
    fn inv_ref(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn from_ratfunc(r: &RatFunc, _: ()) -> Result<Self, ScalarError> {
        Ok(r.clone())
    }
    fn to_qscalar(&self, _: ()) -> QScalar {
        QScalar::Exact(self.clone())
    }
    fn s_pow(e: i64, _: ()) -> Self {
        RatFunc::s_pow(e)
    }
    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }

    fn nullspace(rows: &[Vec<Self>], ncols: usize) -> Vec<Vec<Self>> {
        let (m, pivots) = rref(rows, ncols);
        let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![RatFunc::zero(); ncols];
                v[f] = RatFunc::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = m[r][f].neg_ref();
                }
                v
            })
            .collect()
    }

    fn rank(rows: &[Vec<Self>], ncols: usize) -> usize {
        rref(rows, ncols).1.len()
    }
}

/// Reduced row echelon form over the exact field; returns the reduced rows
/// and the pivot column of each nonzero row.
fn rref(rows: &[Vec<RatFunc>], ncols: usize) -> (Vec<Vec<RatFunc>>, Vec<usize>) {
    let mut m: Vec<Vec<RatFunc>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        // Prefer the simplest pivot to limit expression growth.
        let Some(p) = (r..m.len()).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| m[i][c].size()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = x.mul_ref(&inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *x = x.sub_ref(&f.mul_ref(pv));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

/// Relative singular-value threshold for numeric null spaces and ranks.
pub const SVD_TOL: f64 = 1e-10;

impl Coeff for f64 {
    type Param = f64;
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inv_ref(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
    fn from_ratfunc(r: &RatFunc, z: f64) -> Result<Self, ScalarError> {
        r.eval_f64((z / 2.0).exp()).ok_or(ScalarError::PoleAtZ { z })
    }
    fn to_qscalar(&self, z: f64) -> QScalar {
        QScalar::float(*self, z)
    }
    fn s_pow(e: i64, z: f64) -> Self {
        (e as f64 * z / 2.0).exp()
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn nullspace(rows: &[Vec<Self>], ncols: usize) -> Vec<Vec<Self>> {
        // Pad to at least `ncols` rows so the thin SVD exposes the whole null space.
        let nrows = rows.len().max(ncols);
        let m = DMatrix::from_fn(nrows, ncols, |i, j| rows.get(i).map_or(0.0, |r| r[j]));
        let svd = m.svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let cut = SVD_TOL * smax.max(f64::MIN_POSITIVE);
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] <= cut).collect();
        idx.sort_unstable();
        idx.iter().map(|&k| vt.row(k).iter().cloned().collect()).collect()
    }

    fn rank(rows: &[Vec<Self>], ncols: usize) -> usize {
        if rows.is_empty() || ncols == 0 {
            return 0;
        }
        let m = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
        let sv = m.singular_values();
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        sv.iter().filter(|&&x| x > SVD_TOL * smax).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_nullspace() {
        let s: RatFunc = "s".parse().unwrap();
        let rows = vec![vec![RatFunc::one(), s.clone(), RatFunc::zero()]];
        let ns = RatFunc::nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot = rows[0][0].mul_ref(&v[0]).add_ref(&rows[0][1].mul_ref(&v[1]));
            assert!(dot.is_zero());
        }
        assert_eq!(RatFunc::rank(&rows, 3), 1);
    }

    #[test]
    fn float_nullspace() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]];
        let ns = f64::nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        assert_eq!(f64::rank(&rows, 3), 1);
        let one = f64::nullspace(&[vec![1.0, -1.0]], 2);
        assert_eq!(one.len(), 1);
        assert!((one[0][0] - one[0][1]).abs() < 1e-14);
    }

    #[test]
    fn backend_rejects_zero_z() {
        assert!(Backend::float(0.0).is_err());
        assert!(Backend::float(0.3).is_ok());
    }
}
