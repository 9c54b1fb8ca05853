//! Spin-j irreducible representations of U_q(osp(1|2)) and checks of the
//! defining relations, the Casimir and the Hopf data.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::gradedalg::{GradedMatrix, Grading, Parity};
use crate::linalg::SparseMatrix;
use crate::scalar::{Coeff, HalfInt, RatFunc, ScalarError};

/// Float identities are accepted below this normalized residual.
pub const FLOAT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("spin must be a non-negative half-integer, got {0}")]
    NegativeSpin(HalfInt),
    #[error("grading convention must be 0 or 1, got {0}")]
    BadGrading(u8),
    #[error("lowering recursion does not close: b_top = {got}, expected {expected}")]
    Closure { got: String, expected: String },
    #[error("relation {0} fails on the constructed representation")]
    RelationFailed(String),
    #[error("Casimir is not a multiple of the identity (entry {0},{1})")]
    NonScalarCasimir(usize, usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Spin-j representation with weights `h_m = -2j + m`, `E e_m = e_{m+1}`,
/// `F e_m = b_m e_{m-1}`, and grading `g(m) = (g0 + m) mod 2`.
#[derive(Clone, Debug)]
pub struct Irrep<T: Coeff> {
    spin: HalfInt,
    g0: u8,
    deformed: bool,
    weights: Vec<i64>,
    grading: Grading,
    e: GradedMatrix<T>,
    f: GradedMatrix<T>,
    param: T::Param,
}

/// The `b_m` sequence from `{E,F} = [H]_q` with `b_0 = 0`.
fn lowering_coefficients(spin: HalfInt) -> Result<Vec<RatFunc>, RepError> {
    let d = (2 * spin.twice() + 1) as usize;
    let h = |m: usize| HalfInt::from_int(m as i64 - spin.twice());
    let mut b = vec![RatFunc::zero(); d];
    for m in 0..d - 1 {
        b[m + 1] = RatFunc::qnum(h(m)).sub_ref(&b[m]);
    }
    let expected = RatFunc::qnum(h(d - 1));
    if b[d - 1] != expected {
        return Err(RepError::Closure { got: b[d - 1].to_string(), expected: expected.to_string() });
    }
    Ok(b)
}

/// Build the exact spin-`spin` representation with vacuum degree `g0` and
/// verify every defining relation before returning it.
pub fn build_irrep(spin: HalfInt, g0: u8) -> Result<Irrep<RatFunc>, RepError> {
    let r = build_unchecked(spin, g0)?;
    if let Some(bad) = verify_relations(&r).checks.into_iter().find(|c| !c.holds) {
        return Err(RepError::RelationFailed(bad.name));
    }
    Ok(r)
}

fn build_unchecked(spin: HalfInt, g0: u8) -> Result<Irrep<RatFunc>, RepError> {
    if spin.twice() < 0 {
        return Err(RepError::NegativeSpin(spin));
    }
    if g0 > 1 {
        return Err(RepError::BadGrading(g0));
    }
    let b = lowering_coefficients(spin)?;
    let d = b.len();
    let weights: Vec<i64> = (0..d as i64).map(|m| m - spin.twice()).collect();
    let grading: Grading = Arc::new((0..d).map(|m| ((g0 as usize + m) % 2) as u8).collect());
    let e = SparseMatrix::from_triplets(d, d, (0..d - 1).map(|m| (m + 1, m, RatFunc::one())).collect());
    let f = SparseMatrix::from_triplets(d, d, (0..d - 1).map(|m| (m, m + 1, b[m + 1].clone())).collect());
    Ok(Irrep {
        spin,
        g0,
        deformed: true,
        weights,
        e: GradedMatrix::new(e, grading.clone(), Parity::Odd).expect("E is odd"),
        f: GradedMatrix::new(f, grading.clone(), Parity::Odd).expect("F is odd"),
        grading,
        param: (),
    })
}

impl Irrep<RatFunc> {
    /// The same representation with every entry evaluated at `q = 1`.
    pub fn classical(&self) -> Result<Irrep<RatFunc>, RepError> {
        let at_one = |x: &RatFunc| {
            x.eval_at_one().map(RatFunc::from_rational).ok_or_else(|| ScalarError::PoleAtOne(x.to_string()))
        };
        let e = self.e.mat().try_map(at_one)?;
        let f = self.f.mat().try_map(at_one)?;
        Ok(Irrep {
            deformed: false,
            e: GradedMatrix::new(e, self.grading.clone(), Parity::Odd).expect("odd"),
            f: GradedMatrix::new(f, self.grading.clone(), Parity::Odd).expect("odd"),
            ..self.clone()
        })
    }

    /// Evaluate at `z` for the float backend.
    pub fn to_float(&self, z: f64) -> Result<Irrep<f64>, RepError> {
        self.convert(z)
    }

    /// Map every entry into another coefficient field.
    pub fn convert<U: Coeff>(&self, p: U::Param) -> Result<Irrep<U>, RepError> {
        let ev = |x: &RatFunc| U::from_ratfunc(x, p);
        Ok(Irrep {
            spin: self.spin,
            g0: self.g0,
            deformed: self.deformed,
            weights: self.weights.clone(),
            grading: self.grading.clone(),
            e: GradedMatrix::new(self.e.mat().try_map(ev)?, self.grading.clone(), Parity::Odd).expect("odd"),
            f: GradedMatrix::new(self.f.mat().try_map(ev)?, self.grading.clone(), Parity::Odd).expect("odd"),
            param: p,
        })
    }

    /// Replace one entry of `E`; used to inject faults in tests.
    pub fn with_e_entry(&self, row: usize, col: usize, value: RatFunc) -> Irrep<RatFunc> {
        let mut d = self.e.mat().to_dense();
        d[row][col] = value;
        let e = GradedMatrix::from_parts(SparseMatrix::from_dense(&d), self.grading.clone(), Parity::Odd);
        Irrep { e, ..self.clone() }
    }
}

impl<T: Coeff> Irrep<T> {
    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    pub fn g0(&self) -> u8 {
        self.g0
    }

    pub fn is_deformed(&self) -> bool {
        self.deformed
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn param(&self) -> T::Param {
        self.param
    }

    pub fn e(&self) -> &GradedMatrix<T> {
        &self.e
    }

    pub fn f(&self) -> &GradedMatrix<T> {
        &self.f
    }

    pub fn h(&self) -> GradedMatrix<T> {
        self.diag(|h| T::from_int(h))
    }

    pub fn e2(&self) -> GradedMatrix<T> {
        self.e.mul(&self.e).expect("same space")
    }

    pub fn f2(&self) -> GradedMatrix<T> {
        self.f.mul(&self.f).expect("same space")
    }

    /// Even diagonal operator `g(H)`.
    pub fn diag(&self, g: impl Fn(i64) -> T) -> GradedMatrix<T> {
        GradedMatrix::diagonal(self.weights.iter().map(|&h| g(h)).collect(), self.grading.clone())
    }

    /// `q^{aH + b}` with `a`, `b` given as twice their values (exponent of `s`
    /// is `a_twice·h + b_twice`). Treated as even.
    pub fn q_affine(&self, a_twice: i64, b_twice: i64) -> GradedMatrix<T> {
        let p = self.param;
        self.diag(|h| T::s_pow(a_twice * h + b_twice, p))
    }

    /// `q^{cH}`.
    pub fn q_pow(&self, c: HalfInt) -> GradedMatrix<T> {
        self.q_affine(c.twice(), 0)
    }

    /// `[H]_q` as a diagonal matrix.
    pub fn qnum_h(&self) -> GradedMatrix<T> {
        let p = self.param;
        self.diag(|h| T::qnum(HalfInt::from_int(h), p))
    }

    fn scalar(&self, r: &RatFunc) -> T {
        T::from_ratfunc(r, self.param).expect("no pole at generic q")
    }
}

/// Outcome of checking one identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub holds: bool,
    /// 0 for exact passes; normalized max residual for floats; 1 for exact failures.
    pub residual: f64,
    /// First offending entry, `"(i,j): value"`.
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn get(&self, name: &str) -> Option<&RelationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn worst_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn extend(&mut self, other: RelationReport) {
        self.checks.extend(other.checks);
    }
}

/// Compare two matrices exactly, or by normalized residual in floats.
pub fn compare<T: Coeff>(name: &str, lhs: &SparseMatrix<T>, rhs: &SparseMatrix<T>) -> RelationCheck {
    let diff = lhs.sub(rhs);
    let first_failure = |d: &SparseMatrix<T>| d.first_nonzero().map(|(i, j, x)| format!("({i},{j}): {x:?}"));
    if T::EXACT {
        let holds = diff.is_zero();
        RelationCheck {
            name: name.to_string(),
            holds,
            residual: if holds { 0.0 } else { 1.0 },
            first_failure: if holds { None } else { first_failure(&diff) },
        }
    } else {
        let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        let residual = diff.max_abs() / scale;
        let holds = residual <= FLOAT_TOL;
        RelationCheck {
            name: name.to_string(),
            holds,
            residual,
            first_failure: if holds { None } else { first_failure(&diff) },
        }
    }
}

fn comm<T: Coeff>(a: &GradedMatrix<T>, b: &GradedMatrix<T>) -> SparseMatrix<T> {
    a.mat().commutator(b.mat())
}

/// `κ (q^{aH+b} + q^{-aH-b})` with `a`, `b` twice their values.
fn kappa_cosh<T: Coeff>(r: &Irrep<T>, a_twice: i64, b_twice: i64) -> SparseMatrix<T> {
    let k = r.scalar(&RatFunc::kappa());
    r.q_affine(a_twice, b_twice).mat().add(r.q_affine(-a_twice, -b_twice).mat()).scale(&k)
}

/// Right-hand side of `[E², F²]` with the `EF` term scaled by `c`.
fn e2f2_rhs<T: Coeff>(r: &Irrep<T>, c: &T) -> SparseMatrix<T> {
    let p = r.param;
    let k = r.scalar(&RatFunc::kappa());
    let n = r.dim();
    let k2 = SparseMatrix::identity(n).scale(&k.mul_ref(&k));
    let qn = r.diag(|h| T::from_ratfunc(&RatFunc::qnum(HalfInt::from_twice(4 * h + 1)), p).unwrap());
    let qh = r.q_affine(2, 0).mat().sub(r.q_affine(-2, 0).mat());
    let ef = r.e.mat().matmul(r.f.mat());
    k2.sub(&qn.mat().scale(&k)).add(&qh.matmul(&ef).scale(c))
}

/// All defining relations: `{E,F} = [H]_q`, `[H,E] = E`, `[H,F] = -F`, and
/// the five `E²`/`F²` relations.
pub fn verify_relations<T: Coeff>(r: &Irrep<T>) -> RelationReport {
    let (e, f, h) = (r.e(), r.f(), r.h());
    let (e2, f2) = (r.e2(), r.f2());
    let p = r.param;
    let k = r.scalar(&RatFunc::kappa());
    // κ (q^{1/2} - q^{-1/2})
    let c = k.mul_ref(&T::s_pow(1, p).sub_ref(&T::s_pow(-1, p)));
    let two = T::from_int(2);
    let checks = vec![
        compare("{E,F} = [H]_q", &e.mat().anticommutator(f.mat()), r.qnum_h().mat()),
        compare("[H,E] = E", &comm(&h, e), e.mat()),
        compare("[H,F] = -F", &comm(&h, f), &f.mat().neg()),
        compare("[F^2,E] = kappa (q^{H+1/2} + q^{-H-1/2}) F", &comm(&f2, e), &kappa_cosh(r, 2, 1).matmul(f.mat())),
        compare(
            "[E^2,F] = -kappa (q^{H-1/2} + q^{-H+1/2}) E",
            &comm(&e2, f),
            &kappa_cosh(r, 2, -1).matmul(e.mat()).neg(),
        ),
        compare(
            "[E^2,F^2] = kappa^2 - kappa [2H+1/2]_q + kappa (q^{1/2} - q^{-1/2}) (q^H - q^{-H}) EF",
            &comm(&e2, &f2),
            &e2f2_rhs(r, &c),
        ),
        compare("[H,E^2] = 2 E^2", &comm(&h, &e2), &e2.mat().scale(&two)),
        compare("[H,F^2] = -2 F^2", &comm(&h, &f2), &f2.mat().scale(&two).neg()),
    ];
    RelationReport { checks }
}

/// `[E², F²]` with the `EF` coefficient `(q^H - q^{-H})` and no `κ (q^{1/2} - q^{-1/2})` factor.
pub fn e2f2_unscaled_check<T: Coeff>(r: &Irrep<T>) -> RelationCheck {
    compare(
        "[E^2,F^2] = kappa^2 - kappa [2H+1/2]_q + (q^H - q^{-H}) EF",
        &comm(&r.e2(), &r.f2()),
        &e2f2_rhs(r, &T::one()),
    )
}

/// Relations of the undeformed superalgebra on a `q = 1` representation.
pub fn verify_classical_relations<T: Coeff>(r: &Irrep<T>) -> RelationReport {
    let (e, f, h) = (r.e(), r.f(), r.h());
    let (e2, f2) = (r.e2(), r.f2());
    let two = T::from_int(2);
    let checks = vec![
        compare("{E,F} = H", &e.mat().anticommutator(f.mat()), h.mat()),
        compare("[H,E] = E", &comm(&h, e), e.mat()),
        compare("[H,F] = -F", &comm(&h, f), &f.mat().neg()),
        compare("{E,E} = 2 E^2", &e.mat().anticommutator(e.mat()), &e2.mat().scale(&two)),
        compare("{F,F} = 2 F^2", &f.mat().anticommutator(f.mat()), &f2.mat().scale(&two)),
        compare("[E^2,F] = -E", &comm(&e2, f), &e.mat().neg()),
        compare("[F^2,E] = F", &comm(&f2, e), f.mat()),
        compare("[H,E^2] = 2 E^2", &comm(&h, &e2), &e2.mat().scale(&two)),
        compare("[H,F^2] = -2 F^2", &comm(&h, &f2), &f2.mat().scale(&two).neg()),
        compare("[F^2,E^2] = H", &comm(&f2, &e2), h.mat()),
    ];
    RelationReport { checks }
}

/// `[H,F] = +F`, checked on a `q = 1` representation.
pub fn classical_hf_plus_check<T: Coeff>(r: &Irrep<T>) -> RelationCheck {
    compare("[H,F] = F", &comm(&r.h(), r.f()), r.f().mat())
}

/// Casimir in the form that is central:
/// `sinh²[z(H-1/2)]/sinh²z - κ^{-2} E²F² - 2cosh[z(H-1)] EF`.
pub fn casimir_operator<T: Coeff>(r: &Irrep<T>) -> GradedMatrix<T> {
    let p = r.param;
    let first = r.diag(|h| T::from_ratfunc(&RatFunc::sinh_ratio(HalfInt::from_twice(2 * h - 1), 2), p).unwrap());
    let kinv2 = r.scalar(&RatFunc::kappa().pow(-2).expect("kappa is nonzero"));
    let e2f2 = r.e2().mul(&r.f2()).expect("same space");
    let cosh = r.q_affine(2, -2).mat().add(r.q_affine(-2, 2).mat());
    let ef = r.e.mat().matmul(r.f.mat());
    let m = first.mat().sub(&e2f2.mat().scale(&kinv2)).sub(&cosh.matmul(&ef));
    GradedMatrix::from_parts(m, r.grading.clone(), Parity::Even)
}

/// Casimir written with `((q^{H-1/2} + q^{-H+1/2})/(q - q^{-1}))²`, `κ²`
/// and `(q^{H-1} - q^{-H+1})`.
pub fn casimir_operator_cosh_form<T: Coeff>(r: &Irrep<T>) -> GradedMatrix<T> {
    let p = r.param;
    let den = RatFunc::s_pow(2).sub_ref(&RatFunc::s_pow(-2));
    let first = r.diag(|h| {
        let x = RatFunc::s_pow(2 * h - 1).add_ref(&RatFunc::s_pow(1 - 2 * h)).div_ref(&den).unwrap();
        T::from_ratfunc(&x.mul_ref(&x), p).unwrap()
    });
    let k2 = r.scalar(&RatFunc::kappa().pow(2).unwrap());
    let e2f2 = r.e2().mul(&r.f2()).expect("same space");
    let sinh = r.q_affine(2, -2).mat().sub(r.q_affine(-2, 2).mat());
    let ef = r.e.mat().matmul(r.f.mat());
    let m = first.mat().sub(&e2f2.mat().scale(&k2)).sub(&sinh.matmul(&ef));
    GradedMatrix::from_parts(m, r.grading.clone(), Parity::Even)
}

/// `sinh²(z(2j+1/2)) / sinh²z`, the value of [`casimir_operator`] on spin `j`.
pub fn casimir_value(spin: HalfInt) -> RatFunc {
    RatFunc::sinh_ratio(HalfInt::from_twice(2 * spin.twice() + 1), 2)
}

/// The Casimir matrix and its scalar value; fails if it is not a multiple of 1.
pub fn casimir_matrix<T: Coeff>(r: &Irrep<T>) -> Result<(GradedMatrix<T>, T), RepError> {
    let c = casimir_operator(r);
    let lambda = c.mat().get(0, 0);
    let target = SparseMatrix::identity(r.dim()).scale(&lambda);
    let check = compare("casimir", c.mat(), &target);
    if !check.holds {
        let (i, j, _) = c.mat().sub(&target).first_nonzero().unwrap_or((0, 0, T::zero()));
        return Err(RepError::NonScalarCasimir(i, j));
    }
    Ok((c, lambda))
}

/// Scalar on the irrep and commuting with `E`, `F`, `H`.
pub fn casimir_checks<T: Coeff>(name: &str, r: &Irrep<T>, c: &GradedMatrix<T>) -> RelationReport {
    let lambda = c.mat().get(0, 0);
    let id = SparseMatrix::identity(r.dim()).scale(&lambda);
    let zero = SparseMatrix::zeros(r.dim(), r.dim());
    RelationReport {
        checks: vec![
            compare(&format!("{name} is scalar"), c.mat(), &id),
            compare(&format!("[{name}, E] = 0"), &comm(c, r.e()), &zero),
            compare(&format!("[{name}, F] = 0"), &comm(c, r.f()), &zero),
            compare(&format!("[{name}, H] = 0"), &comm(c, &r.h()), &zero),
        ],
    }
}

/// Antipode scalars: `σ(E) = -c_E E`, `σ(F) = -c_F F`, with `c` given as an `s` exponent.
#[derive(Clone, Copy, Debug)]
pub struct Antipode {
    pub e_s_exp: i64,
    pub f_s_exp: i64,
}

impl Antipode {
    /// `σ(E) = -qE`, `σ(F) = -q^{-1}F`.
    pub const Q: Antipode = Antipode { e_s_exp: 2, f_s_exp: -2 };
    /// `σ(E) = -q^{1/2}E`, `σ(F) = -q^{-1/2}F`.
    pub const Q_HALF: Antipode = Antipode { e_s_exp: 1, f_s_exp: -1 };
}

/// `σ` as an anti-homomorphism on the defining relations, and the counit.
pub fn hopf_data_check<T: Coeff>(r: &Irrep<T>) -> RelationReport {
    let mut rep = antipode_relation_checks(r, Antipode::Q);
    rep.extend(antipode_axiom_checks(r, Antipode::Q_HALF));
    rep.extend(counit_checks(r));
    rep
}

pub fn antipode_relation_checks<T: Coeff>(r: &Irrep<T>, s: Antipode) -> RelationReport {
    let p = r.param;
    let se = r.e.mat().scale(&T::s_pow(s.e_s_exp, p).neg_ref());
    let sf = r.f.mat().scale(&T::s_pow(s.f_s_exp, p).neg_ref());
    let sh = r.h().mat().neg();
    let n = r.dim();
    // σ({E,F}) = -(σF σE + σE σF) for odd E, F; [σH]_q = [-H]_q.
    let lhs_ef = se.anticommutator(&sf).neg();
    let rhs_ef = r.diag(|h| T::qnum(HalfInt::from_int(-h), p));
    // σ([H,E]) = σE σH - σH σE.
    let lhs_he = se.matmul(&sh).sub(&sh.matmul(&se));
    let lhs_hf = sf.matmul(&sh).sub(&sh.matmul(&sf));
    let qh = r.q_pow(HalfInt::ONE);
    let qmh = r.q_pow(-HalfInt::ONE);
    RelationReport {
        checks: vec![
            compare("sigma({E,F}) = [sigma(H)]_q", &lhs_ef, rhs_ef.mat()),
            compare("sigma([H,E]) = sigma(E)", &lhs_he, &se),
            compare("sigma([H,F]) = -sigma(F)", &lhs_hf, &sf.neg()),
            compare("sigma(q^H) sigma(q^-H) = 1", &qmh.mat().matmul(qh.mat()), &SparseMatrix::identity(n)),
        ],
    }
}

/// `m(σ ⊗ id)Δ(x) = ε(x)·1` for `x = E, F, H, q^H`.
pub fn antipode_axiom_checks<T: Coeff>(r: &Irrep<T>, s: Antipode) -> RelationReport {
    let p = r.param;
    let n = r.dim();
    let se = r.e.mat().scale(&T::s_pow(s.e_s_exp, p).neg_ref());
    let sf = r.f.mat().scale(&T::s_pow(s.f_s_exp, p).neg_ref());
    // Δ(E) = E ⊗ q^{H/2} + q^{-H/2} ⊗ E, and σ(q^{-H/2}) = q^{H/2}.
    let qh2 = r.q_pow(HalfInt::HALF);
    let ax_e = se.matmul(qh2.mat()).add(&qh2.mat().matmul(r.e.mat()));
    let ax_f = sf.matmul(qh2.mat()).add(&qh2.mat().matmul(r.f.mat()));
    let ax_h = r.h().mat().neg().add(r.h().mat());
    let ax_q = r.q_pow(-HalfInt::ONE).mat().matmul(r.q_pow(HalfInt::ONE).mat());
    let zero = SparseMatrix::zeros(n, n);
    let tag = format!("s^{}", s.e_s_exp);
    RelationReport {
        checks: vec![
            compare(&format!("m(sigma x id)Delta(E) = 0 [sigma(E) = -{tag} E]"), &ax_e, &zero),
            compare(&format!("m(sigma x id)Delta(F) = 0 [sigma(E) = -{tag} E]"), &ax_f, &zero),
            compare("m(sigma x id)Delta(H) = 0", &ax_h, &zero),
            compare("m(sigma x id)Delta(q^H) = 1", &ax_q, &SparseMatrix::identity(n)),
        ],
    }
}

/// Counit compatibility `(ε ⊗ id)Δ(x) = x = (id ⊗ ε)Δ(x)` for `x = E, F, H`,
/// with `ε(E) = ε(F) = ε(H) = 0` and `ε(q^{cH}) = 1`.
pub fn counit_checks<T: Coeff>(r: &Irrep<T>) -> RelationReport {
    let n = r.dim();
    let zero = SparseMatrix::<T>::zeros(n, n);
    let id = SparseMatrix::<T>::identity(n);
    let qp = r.q_pow(HalfInt::HALF);
    let qm = r.q_pow(-HalfInt::HALF);
    let mut checks = Vec::new();
    for (name, x) in [("E", r.e().mat().clone()), ("F", r.f().mat().clone())] {
        // Δ(x) = x ⊗ q^{H/2} + q^{-H/2} ⊗ x
        let left = x.scale(&T::one()).add(&zero.matmul(qp.mat()));
        let right = x.matmul(&id).add(&qm.mat().matmul(&zero));
        checks.push(compare(&format!("(epsilon x id)Delta({name}) = {name}"), &left, &x));
        checks.push(compare(&format!("(id x epsilon)Delta({name}) = {name}"), &right, &x));
    }
    let h = r.h();
    checks.push(compare("(epsilon x id)Delta(H) = H", &zero.add(h.mat()), h.mat()));
    RelationReport { checks }
}

/// `F E^k + (-1)^{k-1} E^k F` against a diagonal-function right-hand side,
/// for `k = 1..4j`. `corrected` selects
/// `E^{k-1} [sinh z(H+k-1/2) + (-1)^{k-1} sinh z(H-1/2)] / (2 sinh z cosh(z/2))`;
/// otherwise `(-1)^{k-1} E^{k-1} {(-1)^k cosh z(H+1/2) + cosh z(H-1/2)} / (2 sinh z cosh(z/2))`.
pub fn ladder_identity_checks<T: Coeff>(r: &Irrep<T>, corrected: bool) -> RelationReport {
    let p = r.param;
    let top = 2 * r.spin.twice();
    let denom = RatFunc::sinh_z(HalfInt::ONE)
        .mul_ref(&RatFunc::cosh_z(HalfInt::HALF))
        .scale_rational(&crate::scalar::rat(2, 1));
    let mut checks = Vec::new();
    for k in 1..=top {
        let ek = r.e.mat().pow(k as u32);
        let ek1 = r.e.mat().pow(k as u32 - 1);
        let sign = if (k - 1) % 2 == 0 { 1 } else { -1 };
        let lhs = r.f.mat().matmul(&ek).add(&ek.matmul(r.f.mat()).scale(&T::from_int(sign)));
        let g = r.diag(|h| {
            let num = if corrected {
                RatFunc::sinh_z(HalfInt::from_twice(2 * h + 2 * k - 1)).add_ref(
                    &RatFunc::sinh_z(HalfInt::from_twice(2 * h - 1)).scale_rational(&crate::scalar::rat(sign, 1)),
                )
            } else {
                let a = RatFunc::cosh_z(HalfInt::from_twice(2 * h + 1)).scale_rational(&crate::scalar::rat(-sign, 1));
                a.add_ref(&RatFunc::cosh_z(HalfInt::from_twice(2 * h - 1))).scale_rational(&crate::scalar::rat(sign, 1))
            };
            T::from_ratfunc(&num.div_ref(&denom).unwrap(), p).unwrap()
        });
        let rhs = ek1.matmul(g.mat());
        let form = if corrected { "sinh form" } else { "cosh form" };
        checks.push(compare(&format!("F E^{k} + (-1)^{} E^{k} F ({form})", k - 1), &lhs, &rhs));
    }
    RelationReport { checks }
}

/// `E^{4j+1} = F^{4j+1} = 0`, and odd generators only connect opposite degrees.
pub fn structure_checks<T: Coeff>(r: &Irrep<T>) -> RelationReport {
    let n = r.dim();
    let k = n as u32;
    let zero = SparseMatrix::zeros(n, n);
    let parity_ok = |m: &GradedMatrix<T>| m.mat().entries().all(|(i, j, _)| r.grading[i] != r.grading[j]);
    let flag = |name: &str, ok: bool| RelationCheck {
        name: name.to_string(),
        holds: ok,
        residual: if ok { 0.0 } else { 1.0 },
        first_failure: None,
    };
    let v0 = r.grading.iter().filter(|&&g| g == r.g0).count() as i64;
    RelationReport {
        checks: vec![
            compare("E^{4j+1} = 0", &r.e.mat().pow(k), &zero),
            compare("F^{4j+1} = 0", &r.f.mat().pow(k), &zero),
            flag("E, F connect opposite degrees", parity_ok(&r.e) && parity_ok(&r.f)),
            flag("vacuum-degree subspace has dimension 2j+1", v0 == r.spin.twice() + 1),
        ],
    }
}

/// Under `{H, E², F²}` the representation splits into strings of length
/// `2j+1` and `2j` with top weights `2j` and `2j-1`.
pub fn bosonic_sector_check<T: Coeff>(r: &Irrep<T>) -> RelationCheck {
    let e2 = r.e2();
    let f2 = r.f2();
    let n = r.dim();
    let rows = e2.mat().to_dense();
    let kernel = T::nullspace(&rows, n);
    let mut lengths = Vec::new();
    let mut tops = Vec::new();
    for v in &kernel {
        let Some(idx) = v.iter().position(|x| !x.is_zero()) else { continue };
        let mut top = idx;
        for (i, x) in v.iter().enumerate() {
            if !x.is_zero() && x.magnitude() > 1e-12 {
                top = i;
            }
        }
        tops.push(r.weights[top]);
        let mut w = v.clone();
        let mut len = 0;
        while w.iter().any(|x| x.magnitude() > 1e-12) && len <= n {
            len += 1;
            w = f2.mat().mul_vec(&w);
        }
        lengths.push(len as i64);
    }
    let mut pairs: Vec<(i64, i64)> = tops.into_iter().zip(lengths).collect();
    pairs.sort_unstable();
    let tj = r.spin.twice();
    let want: Vec<(i64, i64)> = if tj == 0 { vec![(0, 1)] } else { vec![(tj - 1, tj), (tj, tj + 1)] };
    let holds = pairs == want;
    RelationCheck {
        name: "even subalgebra content: spins j and j-1/2".to_string(),
        holds,
        residual: if holds { 0.0 } else { 1.0 },
        first_failure: (!holds).then(|| format!("{pairs:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn spin_half_matrices() {
        let r = build_irrep(HalfInt::HALF, 1).unwrap();
        assert_eq!(r.weights(), &[-1, 0, 1]);
        assert_eq!(r.e().mat().get(1, 0), RatFunc::one());
        assert_eq!(r.e().mat().get(2, 1), RatFunc::one());
        assert_eq!(r.f().mat().get(0, 1), RatFunc::from_int(-1));
        assert_eq!(r.f().mat().get(1, 2), RatFunc::one());
        assert_eq!(r.grading().as_slice(), &[1, 0, 1]);
    }

    #[test]
    fn trivial_irrep() {
        let r = build_irrep(HalfInt::ZERO, 0).unwrap();
        assert_eq!(r.dim(), 1);
        assert!(r.e().mat().is_zero() && r.f().mat().is_zero());
        let (_, v) = casimir_matrix(&r).unwrap();
        assert_eq!(v, casimir_value(HalfInt::ZERO));
    }

    #[test]
    fn spin_one_recursion() {
        let r = build_irrep(HalfInt::ONE, 1).unwrap();
        assert_eq!(r.weights(), &[-2, -1, 0, 1, 2]);
        assert_eq!(r.f().mat().get(0, 1), RatFunc::qnum(HalfInt::from_int(-2)));
        let b2 = RatFunc::qnum(HalfInt::from_int(-1)).sub_ref(&RatFunc::qnum(HalfInt::from_int(-2)));
        assert_eq!(r.f().mat().get(1, 2), b2);
        // {E,F} = [H]_q entrywise, independently of the builder's own check.
        let ef = r.e().mat().anticommutator(r.f().mat());
        for (m, &h) in r.weights().iter().enumerate() {
            assert_eq!(ef.get(m, m), RatFunc::qnum(HalfInt::from_int(h)));
        }
    }

    #[test]
    fn relations_hold_for_small_spins() {
        for t in 0..=4 {
            for g0 in [0, 1] {
                let r = build_irrep(half(t), g0).unwrap();
                let rep = verify_relations(&r);
                assert!(rep.all_pass(), "2j={t}: {rep:?}");
                assert!(structure_checks(&r).all_pass());
                assert!(bosonic_sector_check(&r).holds, "2j={t}");
            }
        }
    }

    #[test]
    fn perturbed_e_fails_anticommutator() {
        let r = build_irrep(HalfInt::HALF, 0).unwrap();
        let bad = r.with_e_entry(1, 0, RatFunc::from_int(2));
        let rep = verify_relations(&bad);
        assert!(!rep.get("{E,F} = [H]_q").unwrap().holds);
    }

    #[test]
    fn casimir_values() {
        for t in 0..=4 {
            let r = build_irrep(half(t), 1).unwrap();
            let (c, v) = casimir_matrix(&r).unwrap();
            assert_eq!(v, casimir_value(half(t)));
            assert!(casimir_checks("C", &r, &c).all_pass());
        }
        let r = build_irrep(HalfInt::HALF, 1).unwrap();
        let (_, v) = casimir_matrix(&r).unwrap();
        assert_eq!(v.eval_at_one().unwrap(), crate::scalar::rat(9, 4));
    }

    #[test]
    fn cosh_form_is_not_central() {
        let r = build_irrep(HalfInt::HALF, 1).unwrap();
        assert!(!casimir_checks("C", &r, &casimir_operator_cosh_form(&r)).all_pass());
    }

    #[test]
    fn e2f2_without_factor_fails() {
        let r = build_irrep(HalfInt::ONE, 0).unwrap();
        assert!(!e2f2_unscaled_check(&r).holds);
    }

    #[test]
    fn hopf_data() {
        for t in 1..=3 {
            let r = build_irrep(half(t), 1).unwrap();
            assert!(hopf_data_check(&r).all_pass());
            assert!(antipode_relation_checks(&r, Antipode::Q_HALF).all_pass());
            assert!(!antipode_axiom_checks(&r, Antipode::Q).all_pass());
        }
    }

    #[test]
    fn ladder_identity() {
        for t in 1..=4 {
            let r = build_irrep(half(t), 0).unwrap();
            assert!(ladder_identity_checks(&r, true).all_pass(), "2j={t}");
            assert!(!ladder_identity_checks(&r, false).checks[0].holds);
        }
    }

    #[test]
    fn classical_limit() {
        for t in 1..=3 {
            let r = build_irrep(half(t), 1).unwrap().classical().unwrap();
            assert!(verify_classical_relations(&r).all_pass(), "2j={t}");
            assert!(!classical_hf_plus_check(&r).holds);
        }
    }

    #[test]
    fn float_backend_relations() {
        let r = build_irrep(HalfInt::from_twice(3), 1).unwrap().to_float(0.7).unwrap();
        let rep = verify_relations(&r);
        assert!(rep.all_pass(), "{rep:?}");
        assert!(rep.worst_residual() <= FLOAT_TOL);
    }
}
