//! The commuting family `Δ^{(N)}H, C^{(2)}, …, C^{(N)}` and the Gaudin
//! Hamiltonians, deformed and at `q = 1`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gradedalg::{DressingSign, Generator, GradedMatrix, Parity, SiteSpace};
use crate::linalg::SparseMatrix;
use crate::scalar::{rat, Backend, Coeff, HalfInt, RatFunc, ScalarError};
use crate::superrep::{build_irrep, Irrep, RepError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Homogeneous chain: `n` sites of spin `spin`, vacuum degree `g0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n: usize,
    pub spin: HalfInt,
    pub backend: Backend,
    pub g0: u8,
}

impl ModelSpec {
    pub fn new(n: usize, spin: HalfInt, backend: Backend, g0: u8) -> Result<Self, ModelError> {
        let s = ModelSpec { n, spin, backend, g0 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n == 0 {
            return Err(ModelError::Invalid("at least one site is required".into()));
        }
        if self.spin.twice() < 0 {
            return Err(ModelError::Invalid(format!("negative spin {}", self.spin)));
        }
        if self.g0 > 1 {
            return Err(ModelError::Invalid(format!("grading must be 0 or 1, got {}", self.g0)));
        }
        if let Backend::Float { z } = self.backend {
            if z == 0.0 || !z.is_finite() {
                return Err(ModelError::Invalid("float backend needs a finite nonzero z".into()));
            }
        }
        Ok(())
    }

    /// Hilbert space dimension `(4j+1)^N`.
    pub fn dim(&self) -> usize {
        ((2 * self.spin.twice() + 1) as usize).pow(self.n as u32)
    }
}

/// Coefficient of `E²F²` in the Casimir, `κ^{-2} = (q^{1/2} + q^{-1/2})²`.
pub fn kappa_inv_sq() -> RatFunc {
    RatFunc::kappa().pow(-2).expect("kappa is nonzero")
}

/// All operators of one chain over the field `T`.
pub struct Model<T: Coeff> {
    space: SiteSpace<T>,
    classical: SiteSpace<T>,
    /// `Δ^{(m)}E`, `Δ^{(m)}F` for `m = 1..N` (index `m - 1`).
    e: Vec<GradedMatrix<T>>,
    f: Vec<GradedMatrix<T>>,
    casimirs: Vec<OnceLock<GradedMatrix<T>>>,
    classical_casimirs: Vec<OnceLock<GradedMatrix<T>>>,
    classical_ef: OnceLock<Vec<(GradedMatrix<T>, GradedMatrix<T>)>>,
}

impl Model<RatFunc> {
    pub fn exact(n: usize, spin: HalfInt, g0: u8) -> Result<Self, ModelError> {
        Model::build(n, spin, g0, ())
    }
}

impl Model<f64> {
    pub fn float(n: usize, spin: HalfInt, g0: u8, z: f64) -> Result<Self, ModelError> {
        if z == 0.0 || !z.is_finite() {
            return Err(ModelError::Invalid("float backend needs a finite nonzero z".into()));
        }
        Model::build(n, spin, g0, z)
    }
}

impl<T: Coeff> Model<T> {
    pub fn build(n: usize, spin: HalfInt, g0: u8, p: T::Param) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::Invalid("at least one site is required".into()));
        }
        let exact = build_irrep(spin, g0)?;
        let irrep: Irrep<T> = exact.convert(p)?;
        let classical: Irrep<T> = exact.classical()?.convert(p)?;
        Ok(Self::from_irreps(n, irrep, classical))
    }

    fn from_irreps(n: usize, irrep: Irrep<T>, classical: Irrep<T>) -> Self {
        let space = SiteSpace::new(n, Arc::new(irrep));
        let classical = SiteSpace::new(n, Arc::new(classical));
        let (e, f): (Vec<_>, Vec<_>) = (1..=n)
            .into_par_iter()
            .map(|m| {
                (
                    space.coproduct_prefix(Generator::E, m, true, DressingSign::RightMinusLeft),
                    space.coproduct_prefix(Generator::F, m, true, DressingSign::RightMinusLeft),
                )
            })
            .unzip();
        Model {
            space,
            classical,
            e,
            f,
            casimirs: (0..n).map(|_| OnceLock::new()).collect(),
            classical_casimirs: (0..n).map(|_| OnceLock::new()).collect(),
            classical_ef: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &SiteSpace<T> {
        &self.space
    }

    pub fn classical_space(&self) -> &SiteSpace<T> {
        &self.classical
    }

    pub fn param(&self) -> T::Param {
        self.space.param()
    }

    /// `Δ^{(m)}E` on the first `m` sites.
    pub fn e_prefix(&self, m: usize) -> &GradedMatrix<T> {
        &self.e[m - 1]
    }

    pub fn f_prefix(&self, m: usize) -> &GradedMatrix<T> {
        &self.f[m - 1]
    }

    fn classical_prefixes(&self) -> &[(GradedMatrix<T>, GradedMatrix<T>)] {
        self.classical_ef.get_or_init(|| {
            let sp = &self.classical;
            (1..=self.n())
                .into_par_iter()
                .map(|m| {
                    (
                        sp.coproduct_prefix(Generator::E, m, false, DressingSign::RightMinusLeft),
                        sp.coproduct_prefix(Generator::F, m, false, DressingSign::RightMinusLeft),
                    )
                })
                .collect()
        })
    }

    /// `Δ^{(m)}E`, deformed or at `q = 1`.
    pub fn e_prefix_of(&self, m: usize, deformed: bool) -> &GradedMatrix<T> {
        if deformed {
            self.e_prefix(m)
        } else {
            &self.classical_prefixes()[m - 1].0
        }
    }

    pub fn f_prefix_of(&self, m: usize, deformed: bool) -> &GradedMatrix<T> {
        if deformed {
            self.f_prefix(m)
        } else {
            &self.classical_prefixes()[m - 1].1
        }
    }

    /// The site space carrying the deformed or the `q = 1` irrep.
    pub fn space_of(&self, deformed: bool) -> &SiteSpace<T> {
        if deformed {
            &self.space
        } else {
            &self.classical
        }
    }

    /// `Δ^{(m)}H` eigenvalues on the product basis.
    pub fn h_prefix(&self, m: usize) -> Vec<i64> {
        self.space.weight_prefix(m)
    }

    pub fn h_total(&self) -> GradedMatrix<T> {
        self.space.coproduct_n(Generator::H, true)
    }

    /// `C^{(m)} = Δ^{(m)}C`, identity on sites `m+1..N`.
    pub fn casimir_m(&self, m: usize) -> &GradedMatrix<T> {
        assert!(m >= 1 && m <= self.n(), "prefix length out of range");
        self.casimirs[m - 1].get_or_init(|| self.deformed_casimir(m, &kappa_inv_sq()))
    }

    /// `Δ^{(m)}` of the `q = 1` Casimir `H² - 2{E², F²} - [E, F]`.
    pub fn casimir_m_classical(&self, m: usize) -> &GradedMatrix<T> {
        assert!(m >= 1 && m <= self.n(), "prefix length out of range");
        self.classical_casimirs[m - 1].get_or_init(|| self.classical_casimir(m))
    }

    /// `C^{(m)}` or its `q = 1` counterpart.
    pub fn casimir(&self, m: usize, deformed: bool) -> &GradedMatrix<T> {
        if deformed {
            self.casimir_m(m)
        } else {
            self.casimir_m_classical(m)
        }
    }

    /// `ℋ_q = C^{(N)}`.
    pub fn hamiltonian_q(&self) -> &GradedMatrix<T> {
        self.casimir_m(self.n())
    }

    /// `ℋ = Δ^{(N)}` of the `q = 1` Casimir: the pair sum plus one-body terms.
    pub fn hamiltonian_classical(&self) -> &GradedMatrix<T> {
        self.casimir_m_classical(self.n())
    }

    /// `Σ_{i≠j} H_iH_j - 2(E²_iF²_j + F²_iE²_j) - (E_iF_j - F_iE_j)` at `q = 1`.
    pub fn pair_sum_classical(&self) -> GradedMatrix<T> {
        let sp = &self.classical;
        let r = sp.irrep();
        let n = self.n();
        let emb = |a: &GradedMatrix<T>| -> Vec<SparseMatrix<T>> {
            (1..=n).map(|i| sp.embed_site(a, i).expect("site").into_mat()).collect()
        };
        let (h, e, f, e2, f2) = (emb(&r.h()), emb(r.e()), emb(r.f()), emb(&r.e2()), emb(&r.f2()));
        let two = T::from_int(2);
        let mut acc = SparseMatrix::zeros(self.dim(), self.dim());
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let t = h[i]
                    .matmul(&h[j])
                    .sub(&e2[i].matmul(&f2[j]).add(&f2[i].matmul(&e2[j])).scale(&two))
                    .sub(&e[i].matmul(&f[j]).sub(&f[i].matmul(&e[j])));
                acc = acc.add(&t);
            }
        }
        GradedMatrix::from_parts(acc, sp.grading().clone(), Parity::Even)
    }

    /// `C^{(m)}` with `κ²` in place of `κ^{-2}` in front of `E²F²`.
    pub fn casimir_m_kappa_squared(&self, m: usize) -> GradedMatrix<T> {
        self.deformed_casimir(m, &RatFunc::kappa().pow(2).expect("nonzero"))
    }

    /// `[Δ^{(N)}H, C^{(2)}, …, C^{(N)}]`.
    pub fn observable_family(&self) -> ObservableFamily<T> {
        self.family(true)
    }

    /// The same family at `q = 1`.
    pub fn observable_family_classical(&self) -> ObservableFamily<T> {
        self.family(false)
    }

    fn family(&self, deformed: bool) -> ObservableFamily<T> {
        let mut members = vec![("Delta(H)".to_string(), self.h_total())];
        for m in 2..=self.n() {
            members.push((format!("C^({m})"), self.casimir(m, deformed).clone()));
        }
        ObservableFamily { members }
    }

    fn diag_of(&self, m: usize, g: impl Fn(i64) -> T) -> Vec<T> {
        let mut cache: HashMap<i64, T> = HashMap::new();
        self.h_prefix(m).into_iter().map(|h| cache.entry(h).or_insert_with(|| g(h)).clone()).collect()
    }

    fn deformed_casimir(&self, m: usize, e2f2_coeff: &RatFunc) -> GradedMatrix<T> {
        let p = self.param();
        let (e, f) = (self.e_prefix(m).mat(), self.f_prefix(m).mat());
        let first = self.diag_of(m, |h| {
            T::from_ratfunc(&RatFunc::sinh_ratio(HalfInt::from_twice(2 * h - 1), 2), p).expect("no pole at generic q")
        });
        let cosh = self.diag_of(m, |h| T::s_pow(2 * h - 2, p).add_ref(&T::s_pow(2 - 2 * h, p)));
        let k = T::from_ratfunc(e2f2_coeff, p).expect("no pole");
        let (e2, f2) = rayon::join(|| e.matmul(e), || f.matmul(f));
        let (e2f2, ef) = rayon::join(|| e2.matmul(&f2), || e.matmul(f));
        let mat = SparseMatrix::diagonal(first).sub(&e2f2.scale(&k)).sub(&ef.scale_rows(&cosh));
        GradedMatrix::from_parts(mat, self.space.grading().clone(), Parity::Even)
    }

    fn classical_casimir(&self, m: usize) -> GradedMatrix<T> {
        let sp = &self.classical;
        let (e, f) = (self.e_prefix_of(m, false).mat(), self.f_prefix_of(m, false).mat());
        let h2: Vec<T> = self.h_prefix(m).into_iter().map(|h| T::from_int(h * h)).collect();
        let (e2, f2) = rayon::join(|| e.matmul(e), || f.matmul(f));
        let anti = e2.anticommutator(&f2).scale(&T::from_int(2));
        let mat = SparseMatrix::diagonal(h2).sub(&anti).sub(&e.commutator(f));
        GradedMatrix::from_parts(mat, sp.grading().clone(), Parity::Even)
    }
}

/// Named operators expected to commute pairwise.
#[derive(Clone, Debug)]
pub struct ObservableFamily<T: Coeff> {
    pub members: Vec<(String, GradedMatrix<T>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairResidual {
    pub a: String,
    pub b: String,
    /// `max|[A,B]| / max(1, max|A|·max|B|)` for floats; 0 or 1 when exact.
    pub residual: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CommutationReport {
    pub pairs: Vec<PairResidual>,
}

impl CommutationReport {
    pub fn all_commute(&self) -> bool {
        self.pairs.iter().all(|p| p.holds)
    }

    pub fn max_residual(&self) -> f64 {
        self.pairs.iter().map(|p| p.residual).fold(0.0, f64::max)
    }
}

/// Float commutators pass at or below this normalized residual.
pub const COMMUTATION_TOL: f64 = 1e-10;

/// Every pairwise commutator among `family` and `extra`.
pub fn commutation_audit<T: Coeff>(
    family: &ObservableFamily<T>,
    extra: &[(String, GradedMatrix<T>)],
) -> CommutationReport {
    let all: Vec<&(String, GradedMatrix<T>)> = family.members.iter().chain(extra).collect();
    let idx: Vec<(usize, usize)> = (0..all.len()).flat_map(|i| (i + 1..all.len()).map(move |j| (i, j))).collect();
    let pairs = idx
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (all[i].1.mat(), all[j].1.mat());
            let c = a.commutator(b);
            let (residual, holds) = if T::EXACT {
                let z = c.is_zero();
                (if z { 0.0 } else { 1.0 }, z)
            } else {
                let r = c.max_abs() / (a.max_abs() * b.max_abs()).max(1.0);
                (r, r <= COMMUTATION_TOL)
            };
            PairResidual { a: all[i].0.clone(), b: all[j].0.clone(), residual, holds }
        })
        .collect();
    CommutationReport { pairs }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    pub z_small: f64,
    /// `max|ℋ_q(z_small) - ℋ - 1/4|`.
    pub float_residual: f64,
    /// Entrywise `ℋ_q|_{q=1} - ℋ - 1/4 = 0`, when the exact check was run.
    pub exact_holds: Option<bool>,
}

/// Compare `ℋ_q` near `q = 1` with `ℋ + 1/4`.
pub fn limit_audit(n: usize, spin: HalfInt, g0: u8, z_small: f64, exact: bool) -> Result<LimitReport, ModelError> {
    let fm = Model::float(n, spin, g0, z_small)?;
    let quarter = SparseMatrix::identity(fm.dim()).scale(&0.25);
    let diff = fm.hamiltonian_q().mat().sub(fm.hamiltonian_classical().mat()).sub(&quarter);
    let exact_holds = if exact {
        let em = Model::exact(n, spin, g0)?;
        let at_one = em
            .hamiltonian_q()
            .mat()
            .try_map(|x| x.eval_at_one().map(RatFunc::from_rational).ok_or(ScalarError::PoleAtOne(x.to_string())))?;
        let q = SparseMatrix::identity(em.dim()).scale(&RatFunc::from_rational(rat(1, 4)));
        Some(at_one.sub(em.hamiltonian_classical().mat()).sub(&q).is_zero())
    } else {
        None
    };
    Ok(LimitReport { z_small, float_residual: diff.max_abs(), exact_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superrep::{casimir_matrix, casimir_value};

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::new(0, HalfInt::HALF, Backend::Exact, 0).is_err());
        assert!(ModelSpec::new(2, HalfInt::HALF, Backend::Exact, 2).is_err());
        assert!(ModelSpec::new(2, HalfInt::HALF, Backend::Float { z: 0.0 }, 0).is_err());
        assert_eq!(ModelSpec::new(3, HalfInt::ONE, Backend::Exact, 0).unwrap().dim(), 125);
    }

    #[test]
    fn single_site_hamiltonian_is_the_casimir() {
        let m = Model::exact(1, HalfInt::HALF, 1).unwrap();
        let (c, _) = casimir_matrix(&build_irrep(HalfInt::HALF, 1).unwrap()).unwrap();
        assert_eq!(m.hamiltonian_q().mat(), c.mat());
        let two = SparseMatrix::identity(3).scale(&RatFunc::from_int(2));
        assert_eq!(m.hamiltonian_classical().mat(), &two);
    }

    #[test]
    fn family_commutes_exactly() {
        for g0 in [0, 1] {
            let m = Model::exact(3, HalfInt::HALF, g0).unwrap();
            let extra = vec![("H_q".to_string(), m.hamiltonian_q().clone())];
            let rep = commutation_audit(&m.observable_family(), &extra);
            assert!(rep.all_commute(), "{rep:?}");
            assert_eq!(rep.pairs.len(), 6);
        }
    }

    #[test]
    fn injected_fault_is_reported() {
        let m = Model::exact(2, HalfInt::HALF, 0).unwrap();
        let mut fam = m.observable_family();
        let e = m.e_prefix(2).mat().clone();
        fam.members[1].1 = GradedMatrix::from_parts(e.add(&e.transpose()), m.space().grading().clone(), Parity::Odd);
        assert!(!commutation_audit(&fam, &[]).all_commute());
    }

    #[test]
    fn kappa_squared_casimir_is_not_central() {
        let m = Model::exact(2, HalfInt::HALF, 0).unwrap();
        let c = m.casimir_m_kappa_squared(2);
        assert!(!c.mat().commutator(m.e_prefix(2).mat()).is_zero());
        assert!(m.casimir_m(2).mat().commutator(m.e_prefix(2).mat()).is_zero());
    }

    #[test]
    fn pair_sum_differs_by_one_body_terms() {
        let m = Model::exact(3, HalfInt::HALF, 1).unwrap();
        let one_body = SparseMatrix::identity(m.dim()).scale(&RatFunc::from_int(6));
        assert_eq!(m.pair_sum_classical().mat().add(&one_body), *m.hamiltonian_classical().mat());
    }

    #[test]
    fn classical_casimir_on_single_site() {
        let m = Model::exact(2, HalfInt::HALF, 1).unwrap();
        let c1 = m.casimir_m_classical(1).mat();
        let v = c1.mul_vec(&(0..9).map(|i| RatFunc::from_int((i == 0) as i64)).collect::<Vec<_>>());
        assert_eq!(v[0], RatFunc::from_int(2));
        assert!(v[1..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn float_family_commutes() {
        let m = Model::float(4, HalfInt::HALF, 0, 0.7).unwrap();
        let extra = vec![("H_q".to_string(), m.hamiltonian_q().clone())];
        let rep = commutation_audit(&m.observable_family(), &extra);
        assert!(rep.all_commute(), "{}", rep.max_residual());
        let cl = commutation_audit(&m.observable_family_classical(), &[]);
        assert!(cl.all_commute());
    }

    #[test]
    fn limit_identity() {
        for n in [1, 2, 3] {
            let r = limit_audit(n, HalfInt::HALF, 1, 1e-4, true).unwrap();
            assert_eq!(r.exact_holds, Some(true), "N={n}");
            assert!(r.float_residual <= 2e-3 * n as f64, "N={n}: {}", r.float_residual);
        }
        let r = limit_audit(2, HalfInt::HALF, 0, 1e-4, false).unwrap();
        assert!(r.float_residual <= 1e-3);
        // First order in z.
        let r2 = limit_audit(2, HalfInt::HALF, 0, 5e-5, false).unwrap();
        assert!((r.float_residual / r2.float_residual - 2.0).abs() < 0.05);
    }

    #[test]
    fn prefix_one_casimir_is_scalar() {
        let m = Model::exact(2, HalfInt::ONE, 0).unwrap();
        let id = SparseMatrix::identity(m.dim()).scale(&casimir_value(HalfInt::ONE));
        assert_eq!(m.casimir_m(1).mat(), &id);
    }
}
