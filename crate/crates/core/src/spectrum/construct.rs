use std::collections::BTreeMap;

use rayon::prelude::*;

use super::label::{enumerate_ladders, ladder_spin_twice, StateLabel, Step};
use super::SpectrumError;
use crate::linalg::{vecops, SparseMatrix};
use crate::model::Model;
use crate::scalar::{rat, Coeff, HalfInt, RatFunc};

/// Float eigen-residuals pass at or below this normalized value.
pub const FLOAT_EIGEN_TOL: f64 = 1e-10;
/// Relative agreement required between a float closed form and the measured value.
const FLOAT_MATCH_TOL: f64 = 1e-8;

/// Kernel vectors along one ladder: `psis[0]` is the pseudo-vacuum and
/// `psis[i]` follows `steps[i-1]` with coefficients `alphas[i-1]`.
#[derive(Clone, Debug)]
pub struct PsiChain<T: Coeff> {
    pub steps: Vec<Step>,
    pub alphas: Vec<Vec<T>>,
    pub psis: Vec<Vec<T>>,
}

impl<T: Coeff> PsiChain<T> {
    pub fn psi(&self) -> &[T] {
        self.psis.last().expect("chain starts at the vacuum")
    }
}

/// `λ_n` from the closed form next to the value read off `C^{(n)}v`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueRecord<T: Coeff> {
    pub n: usize,
    pub closed_form: RatFunc,
    pub verified: T,
    pub agrees: bool,
}

/// A kernel vector with its joint eigenvalues; spans a multiplet of
/// dimension `2·two_l + 1` under `Δ^{(N)}E`.
#[derive(Clone, Debug)]
pub struct Multiplet<T: Coeff> {
    pub ladder: Vec<Step>,
    pub two_l: i64,
    pub chain: PsiChain<T>,
    pub eigenvalues: Vec<T>,
    pub records: Vec<EigenvalueRecord<T>>,
}

impl<T: Coeff> Multiplet<T> {
    pub fn dim(&self) -> usize {
        (2 * self.two_l + 1) as usize
    }
}

/// A common eigenvector of the family with `λ_1..λ_N`.
#[derive(Clone, Debug)]
pub struct EigenPacket<T: Coeff> {
    pub label: StateLabel,
    pub vector: Vec<T>,
    pub eigenvalues: Vec<T>,
    /// Twice the multiplet spin.
    pub two_l: i64,
    pub g0: u8,
}

/// `|↓…↓⟩`.
pub fn pseudo_vacuum<T: Coeff>(model: &Model<T>) -> Vec<T> {
    let mut v = vec![T::zero(); model.dim()];
    v[0] = T::one();
    v
}

fn two_j<T: Coeff>(model: &Model<T>) -> i64 {
    model.space().irrep().spin().twice()
}

/// `[Δ^{(s-1)}E]^{δm-i} (E_s)^i ψ_prev` for `i = 0..δm`.
fn ansatz<T: Coeff>(model: &Model<T>, deformed: bool, pred: &[T], s: usize, dm: usize) -> Vec<Vec<T>> {
    let sp = model.space_of(deformed);
    let es = sp.embed_site(sp.irrep().e(), s).expect("site in range").into_mat();
    let ep = model.e_prefix_of(s - 1, deformed).mat();
    let mut site_pows = vec![pred.to_vec()];
    for i in 0..dm {
        let next = es.mul_vec(&site_pows[i]);
        site_pows.push(next);
    }
    site_pows
        .into_iter()
        .enumerate()
        .map(|(i, mut v)| {
            for _ in 0..dm - i {
                v = ep.mul_vec(&v);
            }
            v
        })
        .collect()
}

/// Rows of `[v_0 … v_k]` restricted to coordinates where some `v_i` is nonzero.
fn support_rows<T: Coeff>(vs: &[Vec<T>]) -> Vec<Vec<T>> {
    let d = vs.first().map_or(0, |v| v.len());
    (0..d).filter(|&r| vs.iter().any(|v| !v[r].is_zero())).map(|r| vs.iter().map(|v| v[r].clone()).collect()).collect()
}

/// Coefficients `α_0 = 1, α_1, …, α_δm` putting the ansatz into `Ker Δ^{(s)}F`.
pub fn alpha_nullspace<T: Coeff>(
    model: &Model<T>,
    deformed: bool,
    pred: &[T],
    m_prev: usize,
    step: Step,
) -> Result<Vec<T>, SpectrumError> {
    let (m, s) = (step.m, step.s);
    if s < 2 || s > model.n() || m <= m_prev {
        return Err(SpectrumError::InvalidLabel(format!("step ({m},{s})")));
    }
    let dm = m - m_prev;
    let vs = ansatz(model, deformed, pred, s, dm);
    let rows = support_rows(&vs);
    // Independence of v_i, as the columns of `rows`.
    if T::rank(&rows, dm + 1) < dm + 1 {
        return Err(SpectrumError::DependentAnsatz { m, s });
    }
    let f = model.f_prefix_of(s, deformed).mat();
    let ws: Vec<Vec<T>> = vs.iter().map(|v| f.mul_vec(v)).collect();
    let rows = support_rows(&ws);
    let ns = if rows.is_empty() {
        // Every ansatz vector is already annihilated.
        (0..=dm).map(|i| (0..=dm).map(|k| if k == i { T::one() } else { T::zero() }).collect()).collect()
    } else {
        T::nullspace(&rows, dm + 1)
    };
    match ns.len() {
        0 => Err(SpectrumError::NoSolution { m, s }),
        1 => {
            let v = &ns[0];
            let inv =
                (v[0].magnitude() > 0.0).then(|| v[0].inv_ref()).flatten().ok_or(SpectrumError::NoSolution { m, s })?;
            Ok(v.iter().map(|x| x.mul_ref(&inv)).collect())
        }
        dim => Err(SpectrumError::MultipleSolutions { m, s, dim }),
    }
}

/// Kernel vector for `ladder` by iterating [`alpha_nullspace`] from the vacuum.
pub fn build_psi<T: Coeff>(model: &Model<T>, deformed: bool, ladder: &[Step]) -> Result<PsiChain<T>, SpectrumError> {
    let probe = StateLabel::new(ladder.last().map_or(0, |s| s.m), ladder.to_vec());
    if !probe.is_valid(model.n(), two_j(model)) {
        return Err(SpectrumError::InvalidLabel(probe.to_string()));
    }
    let mut chain = PsiChain { steps: ladder.to_vec(), alphas: Vec::new(), psis: vec![pseudo_vacuum(model)] };
    let mut m_prev = 0;
    for &step in ladder {
        let pred = chain.psi().to_vec();
        let alpha = alpha_nullspace(model, deformed, &pred, m_prev, step)?;
        let vs = ansatz(model, deformed, &pred, step.s, step.m - m_prev);
        let mut psi = vec![T::zero(); model.dim()];
        for (a, v) in alpha.iter().zip(&vs) {
            psi = vecops::add(&psi, &vecops::scale(v, a));
        }
        chain.alphas.push(alpha);
        chain.psis.push(psi);
        m_prev = step.m;
    }
    Ok(chain)
}

/// `[Δ^{(N)}E]^times v`.
pub fn raise<T: Coeff>(model: &Model<T>, deformed: bool, v: &[T], times: usize) -> Vec<T> {
    let e = model.e_prefix_of(model.n(), deformed).mat();
    let mut w = v.to_vec();
    for _ in 0..times {
        w = e.mul_vec(&w);
    }
    w
}

/// `φ = [Δ^{(N)}E]^{k - m_l} ψ` for the label's ladder.
pub fn build_phi<T: Coeff>(model: &Model<T>, deformed: bool, label: &StateLabel) -> Result<Vec<T>, SpectrumError> {
    let tj = two_j(model);
    if label.k < label.m_top()
        || label.k > label.m_top() + 2 * ladder_spin_twice(&label.ladder, model.n(), tj).max(0) as usize
    {
        return Err(SpectrumError::RaisedToZero(label.to_string()));
    }
    let chain = build_psi(model, deformed, &label.ladder)?;
    let v = raise(model, deformed, chain.psi(), label.k - label.m_top());
    if is_null(&v) {
        return Err(SpectrumError::RaisedToZero(label.to_string()));
    }
    Ok(v)
}

fn is_null<T: Coeff>(v: &[T]) -> bool {
    if T::EXACT {
        vecops::is_zero(v)
    } else {
        vecops::max_abs(v) == 0.0
    }
}

/// `λ_n` from the closed forms: `sinh²[z(ρ - 1/2)]/sinh²z` when deformed and
/// `(ρ - i + 1)(ρ - i) + 1/4` at `q = 1`, with `i` the last ladder step whose
/// site is `≤ n` and `ρ` the `Δ^{(n)}H` weight of that step's kernel vector.
pub fn eigenvalue_closed_form(ladder: &[Step], n: usize, two_j: i64, deformed: bool) -> RatFunc {
    let (i, m_i) = ladder.iter().enumerate().rfind(|(_, st)| st.s <= n).map_or((0, 0), |(idx, st)| (idx + 1, st.m));
    let rho = -two_j * n as i64 + m_i as i64;
    if deformed {
        RatFunc::sinh_ratio(HalfInt::from_twice(2 * rho - 1), 2)
    } else {
        let i = i as i64;
        RatFunc::from_rational(rat((rho - i + 1) * (rho - i), 1) + rat(1, 4))
    }
}

/// `λ` with `C v = λ v`, read at a pivot entry, and the normalized residual.
fn measure<T: Coeff>(c: &SparseMatrix<T>, v: &[T]) -> (T, f64, bool) {
    let cv = c.mul_vec(v);
    let p = if T::EXACT {
        vecops::pivot(v)
    } else {
        let (mut best, mut idx) = (0.0, None);
        for (i, x) in v.iter().enumerate() {
            if x.magnitude() > best {
                best = x.magnitude();
                idx = Some(i);
            }
        }
        idx
    };
    let Some(p) = p else { return (T::zero(), f64::INFINITY, false) };
    let lambda = cv[p].mul_ref(&v[p].inv_ref().expect("pivot is nonzero"));
    let r = vecops::sub(&cv, &vecops::scale(v, &lambda));
    if T::EXACT {
        let ok = vecops::is_zero(&r);
        (lambda, if ok { 0.0 } else { 1.0 }, ok)
    } else {
        let res = vecops::max_abs(&r) / (c.max_abs().max(1.0) * vecops::max_abs(v));
        (lambda, res, res <= FLOAT_EIGEN_TOL)
    }
}

fn agrees<T: Coeff>(closed: &RatFunc, verified: &T, p: T::Param) -> bool {
    match T::from_ratfunc(closed, p) {
        Ok(c) if T::EXACT => &c == verified,
        Ok(c) => {
            let d = c.sub_ref(verified).magnitude();
            d <= FLOAT_MATCH_TOL * c.magnitude().max(1.0)
        }
        Err(_) => false,
    }
}

/// Measured `λ_1..λ_N` on `v` with the closed form beside each.
pub fn eigenvalue_records<T: Coeff>(
    model: &Model<T>,
    deformed: bool,
    label: &StateLabel,
    v: &[T],
) -> Result<Vec<EigenvalueRecord<T>>, SpectrumError> {
    let tj = two_j(model);
    (1..=model.n())
        .map(|n| {
            let (verified, residual, ok) = measure(model.casimir(n, deformed).mat(), v);
            if !ok {
                return Err(SpectrumError::NotEigenvector { label: label.to_string(), n, residual });
            }
            let closed_form = eigenvalue_closed_form(&label.ladder, n, tj, deformed);
            let agrees = agrees(&closed_form, &verified, model.param());
            Ok(EigenvalueRecord { n, closed_form, verified, agrees })
        })
        .collect()
}

/// Verified `λ_1..λ_N`; fails if the closed form disagrees.
pub fn assign_eigenvalues<T: Coeff>(
    model: &Model<T>,
    deformed: bool,
    label: &StateLabel,
    v: &[T],
) -> Result<Vec<T>, SpectrumError> {
    let recs = eigenvalue_records(model, deformed, label, v)?;
    if let Some(bad) = recs.iter().find(|r| !r.agrees) {
        return Err(SpectrumError::ClosedFormMismatch {
            n: bad.n,
            closed: bad.closed_form.to_string(),
            verified: format!("{:?}", bad.verified),
        });
    }
    Ok(recs.into_iter().map(|r| r.verified).collect())
}

/// One kernel vector per ladder with its eigenvalues. Deformed closed forms
/// must agree; at `q = 1` the records keep both values.
pub fn multiplets<T: Coeff>(model: &Model<T>, deformed: bool) -> Result<Vec<Multiplet<T>>, SpectrumError> {
    let tj = two_j(model);
    enumerate_ladders(model.n(), tj)
        .into_par_iter()
        .map(|ladder| {
            let chain = build_psi(model, deformed, &ladder)?;
            let label = StateLabel::new(ladder.last().map_or(0, |s| s.m), ladder.clone());
            let records = eigenvalue_records(model, deformed, &label, chain.psi())?;
            if deformed {
                if let Some(bad) = records.iter().find(|r| !r.agrees) {
                    return Err(SpectrumError::ClosedFormMismatch {
                        n: bad.n,
                        closed: bad.closed_form.to_string(),
                        verified: format!("{:?}", bad.verified),
                    });
                }
            }
            Ok(Multiplet {
                two_l: ladder_spin_twice(&ladder, model.n(), tj),
                eigenvalues: records.iter().map(|r| r.verified.clone()).collect(),
                ladder,
                chain,
                records,
            })
        })
        .collect()
}

/// All `D` eigenpackets, each checked against every `C^{(n)}`, with the
/// completeness rank checked per `Δ^{(N)}H` sector.
pub fn full_basis<T: Coeff>(model: &Model<T>, deformed: bool) -> Result<Vec<EigenPacket<T>>, SpectrumError> {
    let g0 = model.space().irrep().g0();
    let mults = multiplets(model, deformed)?;
    let packets: Vec<Vec<EigenPacket<T>>> = mults
        .par_iter()
        .map(|mu| {
            let m = mu.ladder.last().map_or(0, |s| s.m);
            let mut v = mu.chain.psi().to_vec();
            let mut out = Vec::with_capacity(mu.dim());
            for k in m..m + mu.dim() {
                let label = StateLabel::new(k, mu.ladder.clone());
                if is_null(&v) {
                    return Err(SpectrumError::RaisedToZero(label.to_string()));
                }
                for (n, lambda) in (1..=model.n()).zip(&mu.eigenvalues) {
                    let c = model.casimir(n, deformed).mat();
                    let r = vecops::sub(&c.mul_vec(&v), &vecops::scale(&v, lambda));
                    let bad = if T::EXACT {
                        !vecops::is_zero(&r)
                    } else {
                        vecops::max_abs(&r) / (c.max_abs().max(1.0) * vecops::max_abs(&v)) > FLOAT_EIGEN_TOL
                    };
                    if bad {
                        let residual = if T::EXACT { 1.0 } else { vecops::max_abs(&r) };
                        return Err(SpectrumError::NotEigenvector { label: label.to_string(), n, residual });
                    }
                }
                let next = raise(model, deformed, &v, 1);
                out.push(EigenPacket { label, vector: v, eigenvalues: mu.eigenvalues.clone(), two_l: mu.two_l, g0 });
                v = next;
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    let packets: Vec<EigenPacket<T>> = packets.into_iter().flatten().collect();
    check_rank(model, &packets)?;
    Ok(packets)
}

fn check_rank<T: Coeff>(model: &Model<T>, packets: &[EigenPacket<T>]) -> Result<(), SpectrumError> {
    let weights = model.h_prefix(model.n());
    let base = -two_j(model) * model.n() as i64;
    let mut by_sector: BTreeMap<i64, Vec<&EigenPacket<T>>> = BTreeMap::new();
    for p in packets {
        by_sector.entry(base + p.label.k as i64).or_default().push(p);
    }
    let mut total = 0;
    for (w, ps) in by_sector {
        let coords: Vec<usize> = (0..weights.len()).filter(|&b| weights[b] == w).collect();
        let rows: Vec<Vec<T>> = ps.iter().map(|p| coords.iter().map(|&b| p.vector[b].clone()).collect()).collect();
        let rank = T::rank(&rows, coords.len());
        if rank != coords.len() || ps.len() != coords.len() {
            return Err(SpectrumError::RankDeficient { weight: w, rank, expected: coords.len() });
        }
        total += rank;
    }
    if total != model.dim() {
        return Err(SpectrumError::RankDeficient { weight: i64::MIN, rank: total, expected: model.dim() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n: usize, g0: u8) -> Model<RatFunc> {
        Model::exact(n, HalfInt::HALF, g0).unwrap()
    }

    fn r(s: &str) -> RatFunc {
        s.parse().unwrap()
    }

    #[test]
    fn vacuum_is_annihilated() {
        let m = model(3, 1);
        let v = pseudo_vacuum(&m);
        for k in 1..=3 {
            assert!(vecops::is_zero(&m.f_prefix(k).mat().mul_vec(&v)));
        }
        assert_eq!(m.h_prefix(3)[0], -3);
    }

    #[test]
    fn single_step_fbf() {
        let m = model(2, 1);
        let a = alpha_nullspace(&m, true, &pseudo_vacuum(&m), 0, Step { m: 1, s: 2 }).unwrap();
        assert_eq!(a, vec![RatFunc::one(), r("-s^-2")]);
    }

    #[test]
    fn double_step_bfb() {
        let m = model(2, 0);
        let chain = build_psi(&m, true, &[Step { m: 2, s: 2 }]).unwrap();
        // ∝ s|↑↓⟩ - |00⟩ - s^-1|↓↑⟩ with |↑↓⟩ = index 6, |00⟩ = 4, |↓↑⟩ = 2.
        let psi = chain.psi();
        let c = psi[4].neg_ref();
        assert_eq!(psi[6], r("s").mul_ref(&c));
        assert_eq!(psi[2], r("-s^-1").mul_ref(&c));
        assert!(psi.iter().enumerate().all(|(i, x)| [2, 4, 6].contains(&i) || x.is_zero()));
    }

    #[test]
    fn raising_and_its_limit() {
        let m = model(2, 1);
        let phi = build_phi(&m, true, &StateLabel::new(4, vec![])).unwrap();
        assert!(phi.iter().enumerate().all(|(i, x)| (i == 8) != x.is_zero()));
        assert!(matches!(build_phi(&m, true, &StateLabel::new(5, vec![])), Err(SpectrumError::RaisedToZero(_))));
    }

    #[test]
    fn eigenvalues_on_two_sites() {
        let m = model(2, 1);
        let l = StateLabel::new(1, vec![Step { m: 1, s: 2 }]);
        let v = build_phi(&m, true, &l).unwrap();
        let ev = assign_eigenvalues(&m, true, &l, &v).unwrap();
        let three_halves = RatFunc::sinh_ratio(HalfInt::from_twice(3), 2);
        assert_eq!(ev, vec![three_halves.clone(), three_halves]);
        let vac = build_phi(&m, true, &StateLabel::new(0, vec![])).unwrap();
        let ev = assign_eigenvalues(&m, true, &StateLabel::new(0, vec![]), &vac).unwrap();
        assert_eq!(ev[1], RatFunc::sinh_ratio(HalfInt::from_twice(5), 2));
    }

    #[test]
    fn complete_basis_exact() {
        for (n, g0) in [(1, 0), (2, 1), (2, 0), (3, 1)] {
            let b = full_basis(&model(n, g0), true).unwrap();
            assert_eq!(b.len(), 3usize.pow(n as u32));
        }
    }

    #[test]
    fn classical_records_flag_the_displayed_formula() {
        let m = model(1, 1);
        let mu = multiplets(&m, false).unwrap();
        let rec = &mu[0].records[0];
        assert_eq!(rec.verified, RatFunc::from_int(2));
        assert!(!rec.agrees);
    }

    #[test]
    fn invalid_ladder_rejected() {
        let m = model(2, 1);
        assert!(build_psi(&m, true, &[Step { m: 3, s: 2 }]).is_err());
        assert!(build_psi(&m, true, &[Step { m: 1, s: 1 }]).is_err());
    }
}
