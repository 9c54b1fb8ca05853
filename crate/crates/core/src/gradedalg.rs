//! Graded tensor algebra: homogeneous operators, Koszul-signed Kronecker
//! products, site embeddings and N-fold coproducts.
//!
//! Odd operators on site `i` carry a parity string on sites `< i`, so plain
//! matrix multiplication reproduces the graded product rule.

use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::SparseMatrix;
use crate::scalar::{Coeff, HalfInt, RatFunc};
use crate::superrep::{compare, Irrep, RelationReport};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_bit(b: u8) -> Self {
        if b.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() + rhs.bit())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Z2 degree of each basis vector.
pub type Grading = Arc<Vec<u8>>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GradedError {
    #[error("entry ({row},{col}) breaks homogeneity for a {parity} operator")]
    Inhomogeneous { row: usize, col: usize, parity: Parity },
    #[error("operands have different gradings or dimensions")]
    GradingMismatch,
    #[error("cannot add operators of different parity")]
    ParityMismatch,
    #[error("site index {0} out of range 1..={1}")]
    SiteOutOfRange(usize, usize),
}

/// A matrix with a basis grading and an operator parity; every stored entry
/// `(i,k)` satisfies `g(i) + g(k) = parity (mod 2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrix<T> {
    mat: SparseMatrix<T>,
    grading: Grading,
    parity: Parity,
}

impl<T: Coeff> GradedMatrix<T> {
    pub fn new(mat: SparseMatrix<T>, grading: Grading, parity: Parity) -> Result<Self, GradedError> {
        if mat.nrows() != grading.len() || mat.ncols() != grading.len() {
            return Err(GradedError::GradingMismatch);
        }
        if let Some((row, col)) = first_inhomogeneous(&mat, &grading, parity) {
            return Err(GradedError::Inhomogeneous { row, col, parity });
        }
        Ok(GradedMatrix { mat, grading, parity })
    }

    /// Wrap a matrix whose homogeneity is guaranteed by construction.
    pub(crate) fn from_parts(mat: SparseMatrix<T>, grading: Grading, parity: Parity) -> Self {
        debug_assert!(first_inhomogeneous(&mat, &grading, parity).is_none());
        GradedMatrix { mat, grading, parity }
    }

    pub fn identity(grading: Grading) -> Self {
        let n = grading.len();
        GradedMatrix { mat: SparseMatrix::identity(n), grading, parity: Parity::Even }
    }

    pub fn zero(grading: Grading, parity: Parity) -> Self {
        let n = grading.len();
        GradedMatrix { mat: SparseMatrix::zeros(n, n), grading, parity }
    }

    pub fn diagonal(d: Vec<T>, grading: Grading) -> Self {
        GradedMatrix { mat: SparseMatrix::diagonal(d), grading, parity: Parity::Even }
    }

    pub fn mat(&self) -> &SparseMatrix<T> {
        &self.mat
    }

    pub fn into_mat(self) -> SparseMatrix<T> {
        self.mat
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn dim(&self) -> usize {
        self.grading.len()
    }

    fn same_space(&self, other: &Self) -> Result<(), GradedError> {
        if self.grading != other.grading {
            return Err(GradedError::GradingMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, GradedError> {
        self.same_space(other)?;
        if self.mat.is_zero() {
            return Ok(other.clone());
        }
        if other.mat.is_zero() {
            return Ok(self.clone());
        }
        if self.parity != other.parity {
            return Err(GradedError::ParityMismatch);
        }
        Ok(GradedMatrix::from_parts(self.mat.add(&other.mat), self.grading.clone(), self.parity))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, GradedError> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GradedMatrix::from_parts(self.mat.neg(), self.grading.clone(), self.parity)
    }

    pub fn scale(&self, c: &T) -> Self {
        GradedMatrix::from_parts(self.mat.scale(c), self.grading.clone(), self.parity)
    }

    /// Composition; parities add.
    pub fn mul(&self, other: &Self) -> Result<Self, GradedError> {
        self.same_space(other)?;
        Ok(GradedMatrix::from_parts(self.mat.matmul(&other.mat), self.grading.clone(), self.parity + other.parity))
    }

    /// `[a, b} = ab - (-1)^{|a||b|} ba`.
    pub fn supercommutator(&self, other: &Self) -> Result<Self, GradedError> {
        self.same_space(other)?;
        let ab = self.mat.matmul(&other.mat);
        let ba = other.mat.matmul(&self.mat);
        let both_odd = self.parity == Parity::Odd && other.parity == Parity::Odd;
        let m = if both_odd { ab.add(&ba) } else { ab.sub(&ba) };
        Ok(GradedMatrix::from_parts(m, self.grading.clone(), self.parity + other.parity))
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U + Sync) -> GradedMatrix<U> {
        GradedMatrix { mat: self.mat.map(f), grading: self.grading.clone(), parity: self.parity }
    }
}

fn first_inhomogeneous<T: Coeff>(mat: &SparseMatrix<T>, grading: &[u8], parity: Parity) -> Option<(usize, usize)> {
    mat.entries().find(|(i, k, _)| (grading[*i] + grading[*k]) % 2 != parity.bit()).map(|(i, k, _)| (i, k))
}

/// `diag((-1)^{g(i)})`.
pub fn parity_matrix<T: Coeff>(grading: &[u8]) -> SparseMatrix<T> {
    SparseMatrix::diagonal(grading.iter().map(|g| if g % 2 == 0 { T::one() } else { T::one().neg_ref() }).collect())
}

/// Grading of a product basis: `g(i, k) = g_a(i) + g_b(k)`.
pub fn combine_grading(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().flat_map(|x| b.iter().map(move |y| (x + y) % 2)).collect()
}

/// Graded tensor product `A ⊗ B`, realized as `kron(A · P_A^{|B|}, B)`.
pub fn graded_kron<T: Coeff>(a: &GradedMatrix<T>, b: &GradedMatrix<T>) -> GradedMatrix<T> {
    let left = match b.parity {
        Parity::Even => a.mat.clone(),
        Parity::Odd => a.mat.matmul(&parity_matrix(&a.grading)),
    };
    GradedMatrix {
        mat: left.kron(&b.mat),
        grading: Arc::new(combine_grading(&a.grading, &b.grading)),
        parity: a.parity + b.parity,
    }
}

/// Sign convention for the exponent of the N-fold coproduct dressing of site `i`:
/// `Σ_k c · sgn(k - i) H_k` with `c = +1` (consistent with the two-fold
/// coproduct) or `c = -1` (the mirrored reading).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DressingSign {
    RightMinusLeft,
    LeftMinusRight,
}

/// Generators whose coproduct images can be built.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Generator {
    H,
    E,
    F,
    /// `q^{cH}` with `c` a half-integer.
    QPow(HalfInt),
}

/// `N` copies of one irrep with the product grading.
#[derive(Clone, Debug)]
pub struct SiteSpace<T: Coeff> {
    n: usize,
    irrep: Arc<Irrep<T>>,
    dim: usize,
    grading: Grading,
    /// `digits[b * n + k]`: basis index of site `k` in product state `b`.
    digits: Vec<u16>,
}

impl<T: Coeff> SiteSpace<T> {
    pub fn new(n: usize, irrep: Arc<Irrep<T>>) -> Self {
        assert!(n >= 1, "at least one site");
        let d = irrep.dim();
        let dim = d.checked_pow(n as u32).expect("dimension overflow");
        let mut digits = vec![0u16; dim * n];
        for b in 0..dim {
            let mut x = b;
            for k in (0..n).rev() {
                digits[b * n + k] = (x % d) as u16;
                x /= d;
            }
        }
        let g = irrep.grading();
        let grading = (0..dim).map(|b| (0..n).map(|k| g[digits[b * n + k] as usize]).sum::<u8>() % 2).collect();
        SiteSpace { n, irrep, dim, grading: Arc::new(grading), digits }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn site_dim(&self) -> usize {
        self.irrep.dim()
    }

    pub fn irrep(&self) -> &Arc<Irrep<T>> {
        &self.irrep
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn param(&self) -> T::Param {
        self.irrep.param()
    }

    /// Basis index of site `k` (0-based) in product state `b`.
    pub fn digit(&self, b: usize, k: usize) -> usize {
        self.digits[b * self.n + k] as usize
    }

    /// Product state index from per-site digits.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, d| acc * self.site_dim() + d)
    }

    /// `H_k` eigenvalue of site `k` (0-based) in state `b`.
    pub fn site_weight(&self, b: usize, k: usize) -> i64 {
        self.irrep.weights()[self.digit(b, k)]
    }

    /// Eigenvalues of `Δ^{(m)}(H) = Σ_{k≤m} H_k` on the product basis.
    pub fn weight_prefix(&self, m: usize) -> Vec<i64> {
        (0..self.dim).map(|b| (0..m).map(|k| self.site_weight(b, k)).sum()).collect()
    }

    /// `A_i = 1 ⊗ … ⊗ A ⊗ … ⊗ 1` (1-based `i`), built as nested graded products.
    pub fn embed_site(&self, a: &GradedMatrix<T>, i: usize) -> Result<GradedMatrix<T>, GradedError> {
        if i == 0 || i > self.n {
            return Err(GradedError::SiteOutOfRange(i, self.n));
        }
        if a.grading() != self.irrep.grading() {
            return Err(GradedError::GradingMismatch);
        }
        let id = GradedMatrix::identity(self.irrep.grading().clone());
        let mut acc = if i == 1 { a.clone() } else { id.clone() };
        for k in 2..=self.n {
            acc = graded_kron(&acc, if k == i { a } else { &id });
        }
        debug_assert_eq!(acc.grading(), &self.grading);
        Ok(GradedMatrix { grading: self.grading.clone(), ..acc })
    }

    /// Diagonal `s^{Σ_{k≤m} sgn(k-i) h_k}` (1-based `i`), i.e. `q^{(1/2)Σ sgn(k-i) H_k}`.
    pub fn dressing(&self, i: usize, m: usize, sign: DressingSign) -> Vec<T> {
        let p = self.param();
        let c = match sign {
            DressingSign::RightMinusLeft => 1,
            DressingSign::LeftMinusRight => -1,
        };
        (0..self.dim)
            .map(|b| {
                let e: i64 = (1..=m).map(|k| c * (k as i64 - i as i64).signum() * self.site_weight(b, k - 1)).sum();
                T::s_pow(e, p)
            })
            .collect()
    }

    /// `Δ^{(m)}(gen)` acting on the first `m` sites (identity on the rest).
    pub fn coproduct_prefix(&self, gen: Generator, m: usize, deformed: bool, sign: DressingSign) -> GradedMatrix<T> {
        assert!(m >= 1 && m <= self.n, "prefix length out of range");
        let p = self.param();
        match gen {
            Generator::H => GradedMatrix::diagonal(
                self.weight_prefix(m).into_iter().map(T::from_int).collect(),
                self.grading.clone(),
            ),
            Generator::QPow(c) => {
                let d = self
                    .weight_prefix(m)
                    .into_iter()
                    .map(|h| if deformed { T::s_pow(c.twice() * h, p) } else { T::one() })
                    .collect();
                GradedMatrix::diagonal(d, self.grading.clone())
            }
            Generator::E | Generator::F => {
                let a = if gen == Generator::E { self.irrep.e() } else { self.irrep.f() };
                let mut acc = SparseMatrix::zeros(self.dim, self.dim);
                for i in 1..=m {
                    let site = self.embed_site(a, i).expect("valid site").into_mat();
                    let term = if deformed { site.scale_cols(&self.dressing(i, m, sign)) } else { site };
                    acc = acc.add(&term);
                }
                GradedMatrix::from_parts(acc, self.grading.clone(), Parity::Odd)
            }
        }
    }

    /// `Δ^{(N)}(gen)`.
    pub fn coproduct_n(&self, gen: Generator, deformed: bool) -> GradedMatrix<T> {
        self.coproduct_prefix(gen, self.n, deformed, DressingSign::RightMinusLeft)
    }

    /// `η_i = E_i q^{(1/2)Σ sgn(k-i) H_k}` and the same with `F`, for `i = 1..N`.
    pub fn site_dressed_ops(&self) -> (Vec<GradedMatrix<T>>, Vec<GradedMatrix<T>>) {
        let build = |a: &GradedMatrix<T>| -> Vec<GradedMatrix<T>> {
            (1..=self.n)
                .map(|i| {
                    let site = self.embed_site(a, i).expect("valid site").into_mat();
                    let d = self.dressing(i, self.n, DressingSign::RightMinusLeft);
                    GradedMatrix::from_parts(site.scale_cols(&d), self.grading.clone(), Parity::Odd)
                })
                .collect()
        };
        (build(self.irrep.e()), build(self.irrep.f()))
    }
}

/// `{ΔE, ΔF} = (Δq^H - Δq^{-H})/(q - q^{-1})` (or `ΔH` when undeformed),
/// `[ΔH, ΔE] = ΔE` and `[ΔH, ΔF] = -ΔF` on the full space.
pub fn coproduct_homomorphism_check<T: Coeff>(space: &SiteSpace<T>, deformed: bool) -> RelationReport {
    let e = space.coproduct_n(Generator::E, deformed);
    let f = space.coproduct_n(Generator::F, deformed);
    homomorphism_checks(space, &e, &f, deformed)
}

/// The three homomorphism identities for given images of `E` and `F`.
pub fn homomorphism_checks<T: Coeff>(
    space: &SiteSpace<T>,
    e: &GradedMatrix<T>,
    f: &GradedMatrix<T>,
    deformed: bool,
) -> RelationReport {
    let h = space.coproduct_n(Generator::H, deformed);
    let rhs = if deformed {
        let p = space.param();
        let qp = space.coproduct_n(Generator::QPow(HalfInt::ONE), true);
        let qm = space.coproduct_n(Generator::QPow(-HalfInt::ONE), true);
        let inv = RatFunc::s_pow(2).sub_ref(&RatFunc::s_pow(-2)).inv().expect("nonzero");
        qp.mat().sub(qm.mat()).scale(&T::from_ratfunc(&inv, p).expect("no pole"))
    } else {
        h.mat().clone()
    };
    RelationReport {
        checks: vec![
            compare("{Delta(E), Delta(F)} = Delta([H]_q)", &e.mat().anticommutator(f.mat()), &rhs),
            compare("[Delta(H), Delta(E)] = Delta(E)", &h.mat().commutator(e.mat()), e.mat()),
            compare("[Delta(H), Delta(F)] = -Delta(F)", &h.mat().commutator(f.mat()), &f.mat().neg()),
        ],
    }
}

/// Images of `E`, `F` and the `H` weights on some tensor space, used to build
/// coproducts two factors at a time.
#[derive(Clone, Debug)]
pub struct Images<T: Coeff> {
    pub e: GradedMatrix<T>,
    pub weights: Vec<i64>,
    pub f: GradedMatrix<T>,
    pub param: T::Param,
}

impl<T: Coeff> Images<T> {
    pub fn of_irrep(r: &Irrep<T>) -> Self {
        Images { e: r.e().clone(), f: r.f().clone(), weights: r.weights().to_vec(), param: r.param() }
    }

    fn q_half(&self, sign: i64, deformed: bool) -> GradedMatrix<T> {
        let d = self.weights.iter().map(|h| if deformed { T::s_pow(sign * h, self.param) } else { T::one() }).collect();
        GradedMatrix::diagonal(d, self.e.grading().clone())
    }

    /// `Δ(E) = E ⊗ q^{H/2} + q^{-H/2} ⊗ E` (and `F` alike) on `self ⊗ right`.
    pub fn coproduct(&self, right: &Images<T>, deformed: bool) -> Images<T> {
        let lm = self.q_half(-1, deformed);
        let rp = right.q_half(1, deformed);
        let pair = |a: &GradedMatrix<T>, b: &GradedMatrix<T>| {
            graded_kron(a, &rp).try_add(&graded_kron(&lm, b)).expect("same parity")
        };
        let weights = self.weights.iter().flat_map(|x| right.weights.iter().map(move |y| x + y)).collect();
        Images { e: pair(&self.e, &right.e), f: pair(&self.f, &right.f), weights, param: self.param }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superrep::build_irrep;

    fn space(n: usize, g0: u8) -> SiteSpace<RatFunc> {
        SiteSpace::new(n, Arc::new(build_irrep(HalfInt::HALF, g0).unwrap()))
    }

    fn ket(sp: &SiteSpace<RatFunc>, digits: &[usize]) -> Vec<RatFunc> {
        let mut v = vec![RatFunc::zero(); sp.dim()];
        v[sp.index_of(digits)] = RatFunc::one();
        v
    }

    #[test]
    fn sign_rule_on_two_sites() {
        for (g0, sign) in [(1u8, -1i64), (0, 1)] {
            let sp = space(2, g0);
            let e2 = sp.embed_site(sp.irrep().e(), 2).unwrap();
            let v = e2.mat().mul_vec(&ket(&sp, &[0, 0]));
            let want: Vec<RatFunc> = ket(&sp, &[0, 1]).iter().map(|x| x.mul_ref(&RatFunc::from_int(sign))).collect();
            assert_eq!(v, want);
        }
    }

    #[test]
    fn odd_operators_anticommute_across_sites() {
        let sp = space(2, 1);
        let e = sp.irrep().e();
        let f = sp.irrep().f();
        let id = GradedMatrix::identity(sp.irrep().grading().clone());
        let lhs = graded_kron(&id, e).mul(&graded_kron(f, &id)).unwrap();
        let rhs = graded_kron(f, e).neg();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn two_site_coproduct_on_vacuum() {
        let sp = space(2, 1);
        let de = sp.coproduct_n(Generator::E, true);
        let v = de.mat().mul_vec(&ket(&sp, &[0, 0]));
        let s: RatFunc = "s".parse().unwrap();
        let mut want = vec![RatFunc::zero(); 9];
        want[sp.index_of(&[1, 0])] = s.inv().unwrap();
        want[sp.index_of(&[0, 1])] = s.neg_ref();
        assert_eq!(v, want);
    }

    #[test]
    fn total_weight_on_vacuum() {
        let sp = space(3, 1);
        let h = sp.coproduct_n(Generator::H, true);
        assert_eq!(h.mat().get(0, 0), RatFunc::from_int(-3));
        assert_eq!(h.parity(), Parity::Even);
    }

    #[test]
    fn qpow_coproduct_is_tensor_square() {
        let sp = space(2, 0);
        let qh = sp.coproduct_n(Generator::QPow(HalfInt::ONE), true);
        let one = sp.irrep().q_affine(2, 0);
        assert_eq!(qh, graded_kron(&one, &one));
    }

    #[test]
    fn dressed_ops_sum_to_coproduct() {
        for n in 1..=3 {
            let sp = space(n, 1);
            let (eta, phi) = sp.site_dressed_ops();
            let sum = |v: &[GradedMatrix<RatFunc>]| v.iter().skip(1).fold(v[0].clone(), |a, b| a.try_add(b).unwrap());
            assert_eq!(sum(&eta), sp.coproduct_n(Generator::E, true));
            assert_eq!(sum(&phi), sp.coproduct_n(Generator::F, true));
            if n == 1 {
                assert_eq!(&eta[0], sp.irrep().e());
            }
        }
    }

    #[test]
    fn eta_one_on_vacuum() {
        let sp = space(2, 1);
        let (eta, _) = sp.site_dressed_ops();
        let v = eta[0].mat().mul_vec(&ket(&sp, &[0, 0]));
        let mut want = vec![RatFunc::zero(); 9];
        want[sp.index_of(&[1, 0])] = RatFunc::s_pow(-1);
        assert_eq!(v, want);
    }

    #[test]
    fn coassociativity_matches_closed_form() {
        let r = build_irrep(HalfInt::HALF, 1).unwrap();
        let one = Images::of_irrep(&r);
        let left = one.coproduct(&one, true).coproduct(&one, true);
        let right = one.coproduct(&one.coproduct(&one, true), true);
        let sp = space(3, 1);
        let closed = sp.coproduct_n(Generator::E, true);
        assert_eq!(left.e.mat(), right.e.mat());
        assert_eq!(left.e.mat(), closed.mat());
        let mirrored = sp.coproduct_prefix(Generator::E, 3, true, DressingSign::LeftMinusRight);
        assert_ne!(mirrored.mat(), closed.mat());
    }

    #[test]
    fn inhomogeneous_rejected() {
        let g: Grading = Arc::new(vec![0, 1]);
        let m = SparseMatrix::<f64>::from_dense(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        assert!(matches!(
            GradedMatrix::new(m, g, Parity::Even),
            Err(GradedError::Inhomogeneous { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn homomorphism_identities() {
        let sp = space(2, 1);
        assert!(coproduct_homomorphism_check(&sp, true).all_pass());
        let cl = SiteSpace::new(3, Arc::new(build_irrep(HalfInt::HALF, 0).unwrap().classical().unwrap()));
        assert!(coproduct_homomorphism_check(&cl, false).all_pass());
        let fl = SiteSpace::new(3, Arc::new(build_irrep(HalfInt::HALF, 0).unwrap().to_float(0.3).unwrap()));
        let rep = coproduct_homomorphism_check(&fl, true);
        assert!(rep.all_pass() && rep.worst_residual() <= 1e-10);
        // Dropping the dressing breaks the anticommutator.
        let sp1 = SiteSpace::new(2, Arc::new(build_irrep(HalfInt::ONE, 0).unwrap()));
        let e = sp1.coproduct_n(Generator::E, false);
        let f = sp1.coproduct_n(Generator::F, false);
        let rep = homomorphism_checks(&sp1, &e, &f, true);
        assert!(!rep.checks[0].holds);
    }
}
