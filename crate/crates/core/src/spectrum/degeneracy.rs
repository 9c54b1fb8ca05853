use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::SpectrumError;
use crate::linalg::SparseMatrix;
use crate::model::Model;

/// Relative tolerance for grouping numeric eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-8;

/// A joint eigenvalue tuple and the number of states carrying it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub eigenvalues: Vec<f64>,
    pub multiplicity: usize,
}

pub fn binomial(n: i64, k: i64) -> i128 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// Multiplicity of the spin-`l/2` multiplet (dimension `2l + 1`) in `N`
/// spin-1/2 sites:
/// `Σ_{k=l}^{⌊(N+l)/2⌋} C(N,2k-l)C(2k-l,k) - Σ_{k=l}^{⌊(N+l-1)/2⌋} C(N,2k-l+1)C(2k-l+1,k+1)`.
pub fn degeneracy_binomial(n: usize, l: i64) -> Result<i128, SpectrumError> {
    let nn = n as i64;
    if l < 0 || l > nn {
        return Err(SpectrumError::FormulaDomain { n, l });
    }
    let first: i128 = (l..=(nn + l).div_euclid(2)).map(|k| binomial(nn, 2 * k - l) * binomial(2 * k - l, k)).sum();
    let second: i128 =
        (l..=(nn + l - 1).div_euclid(2)).map(|k| binomial(nn, 2 * k - l + 1) * binomial(2 * k - l + 1, k + 1)).sum();
    Ok(first - second)
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (b - a).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Split sorted values into runs with relative gaps `<= tol`; gaps in
/// `(tol, 10·tol)` are ambiguous.
pub fn cluster_sorted(values: &[f64], tol: f64) -> Result<Vec<std::ops::Range<usize>>, SpectrumError> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() {
            if start < i {
                out.push(start..i);
            }
            break;
        }
        let g = rel_gap(values[i - 1], values[i]);
        if g <= tol {
            continue;
        }
        if g < 10.0 * tol {
            return Err(SpectrumError::ClusterAmbiguity(g));
        }
        out.push(start..i);
        start = i;
    }
    Ok(out)
}

fn dense_block(c: &SparseMatrix<f64>, coords: &[usize]) -> DMatrix<f64> {
    let b = c.submatrix(coords, coords);
    let mut d = DMatrix::zeros(b.nrows(), b.ncols());
    for (i, j, x) in b.entries() {
        d[(i, j)] = *x;
    }
    d
}

/// Right and left eigenvectors of an upper triangular `t`, as columns, by
/// back and forward substitution. Near-equal diagonal entries are kept apart
/// by `ε·scale`, as in LAPACK's `trevc`.
fn triangular_eigvecs(t: &DMatrix<f64>, scale: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = t.nrows();
    let smin = f64::EPSILON * scale;
    let guard = |d: f64| if d.abs() < smin { smin.copysign(d) } else { d };
    let mut y = DMatrix::zeros(n, n);
    let mut x = DMatrix::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = 1.0;
        for j in (0..k).rev() {
            let acc: f64 = (j + 1..=k).map(|l| t[(j, l)] * y[(l, k)]).sum();
            y[(j, k)] = -acc / guard(t[(j, j)] - lam);
        }
        x[(k, k)] = 1.0;
        for j in k + 1..n {
            let acc: f64 = (k..j).map(|l| x[(l, k)] * t[(l, j)]).sum();
            x[(j, k)] = -acc / guard(t[(j, j)] - lam);
        }
    }
    (y, x)
}

/// `λ_k` of `c` on the `k`-th eigenvector: the two-sided Rayleigh quotient
/// `wᵀCv / wᵀv`.
fn eigen_estimates(c: &DMatrix<f64>, v: &DMatrix<f64>, w: &DMatrix<f64>) -> Vec<f64> {
    let cv = c * v;
    (0..v.ncols()).map(|k| w.column(k).dot(&cv.column(k)) / w.column(k).dot(&v.column(k))).collect()
}

/// QR sweeps per dimension before a Schur attempt is abandoned.
const SCHUR_SWEEPS: usize = 40;

/// Looser grouping inside one sector: individual Schur values of a
/// degenerate eigenvalue scatter, their mean does not.
const SECTOR_TOL: f64 = 1e-6;

/// Replace each tuple by the mean of its group within the sector.
fn average_groups(tuples: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>, SpectrumError> {
    let mut groups: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    'outer: for (i, t) in tuples.iter().enumerate() {
        for (rep, members) in groups.iter_mut() {
            let worst = rep.iter().zip(t).map(|(a, b)| rel_gap(*a, *b)).fold(0.0, f64::max);
            if worst <= SECTOR_TOL {
                members.push(i);
                continue 'outer;
            }
            if worst < 10.0 * SECTOR_TOL {
                return Err(SpectrumError::ClusterAmbiguity(worst));
            }
        }
        groups.push((t.clone(), vec![i]));
    }
    let mut out = tuples.clone();
    for (_, members) in groups {
        let k = members.len() as f64;
        let mean: Vec<f64> =
            (0..tuples[members[0]].len()).map(|c| members.iter().map(|&i| tuples[i][c]).sum::<f64>() / k).collect();
        for i in members {
            out[i] = mean.clone();
        }
    }
    Ok(out)
}

/// Osborne balancing with powers of two: returns `d` such that
/// `D⁻¹AD` has comparable row and column norms. The blocks are not normal,
/// and balancing keeps the Schur diagonal accurate for larger `N`.
fn balance(a: &mut DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut d = vec![1.0; n];
    for _ in 0..100 {
        let mut done = true;
        for i in 0..n {
            let c: f64 = (0..n).filter(|&j| j != i).map(|j| a[(j, i)].abs()).sum();
            let r: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            // Column i scales by f, row i by 1/f.
            let (mut f, mut cf, mut rf) = (1.0, c, r);
            while cf < rf / 2.0 {
                f *= 2.0;
                cf *= 2.0;
                rf /= 2.0;
            }
            while cf > rf * 2.0 {
                f /= 2.0;
                cf /= 2.0;
                rf *= 2.0;
            }
            if f != 1.0 && cf + rf < 0.95 * (c + r) {
                done = false;
                d[i] *= f;
                a.row_mut(i).scale_mut(1.0 / f);
                a.column_mut(i).scale_mut(f);
            }
        }
        if done {
            break;
        }
    }
    d
}

fn apply_balance(b: &mut DMatrix<f64>, d: &[f64]) {
    for (i, &x) in d.iter().enumerate() {
        if x != 1.0 {
            b.row_mut(i).scale_mut(1.0 / x);
            b.column_mut(i).scale_mut(x);
        }
    }
}

/// Per-state eigenvalue tuples of `observables` in one weight sector. A random
/// combination is balanced and brought to real Schur form; its eigenvectors
/// are common to every `C_n`, which is then read off by two-sided Rayleigh
/// quotients.
fn sector_tuples(
    observables: &[&SparseMatrix<f64>],
    coords: &[usize],
    weights: &[f64],
    sector: i64,
) -> Result<Vec<Vec<f64>>, SpectrumError> {
    let mut blocks: Vec<DMatrix<f64>> = observables.iter().map(|c| dense_block(c, coords)).collect();
    let dim = coords.len();
    let mut a = DMatrix::zeros(dim, dim);
    for (b, w) in blocks.iter().zip(weights) {
        a += b * *w;
    }
    let d = balance(&mut a);
    for b in blocks.iter_mut() {
        apply_balance(b, &d);
    }
    let scale = a.amax().max(1.0);
    let (q, t) = nalgebra::Schur::try_new(a, f64::EPSILON, SCHUR_SWEEPS * dim.max(10))
        .ok_or(SpectrumError::Solver(sector))?
        .unpack();
    for i in 1..dim {
        if t[(i, i - 1)].abs() > 1e-9 * scale {
            return Err(SpectrumError::Solver(sector));
        }
    }
    let (y, x) = triangular_eigvecs(&t, scale);
    let (v, w) = (&q * y, &q * x);
    let diags: Vec<Vec<f64>> = blocks.iter().map(|b| eigen_estimates(b, &v, &w)).collect();
    average_groups((0..dim).map(|i| diags.iter().map(|d| d[i]).collect()).collect())
}

/// Greedy merge of per-state tuples into clusters, sorted by tuple.
fn merge(tuples: impl IntoIterator<Item = Vec<f64>>) -> Result<Vec<Cluster>, SpectrumError> {
    let mut clusters: Vec<Cluster> = Vec::new();
    'outer: for t in tuples {
        for c in clusters.iter_mut() {
            let worst = c.eigenvalues.iter().zip(&t).map(|(a, b)| rel_gap(*a, *b)).fold(0.0, f64::max);
            if worst <= CLUSTER_TOL {
                c.multiplicity += 1;
                continue 'outer;
            }
            if worst < 10.0 * CLUSTER_TOL {
                return Err(SpectrumError::ClusterAmbiguity(worst));
            }
        }
        clusters.push(Cluster { eigenvalues: t, multiplicity: 1 });
    }
    clusters.sort_by(|a, b| {
        a.eigenvalues
            .iter()
            .zip(&b.eigenvalues)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(clusters)
}

fn sectors(model: &Model<f64>) -> BTreeMap<i64, Vec<usize>> {
    let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (b, w) in model.h_prefix(model.n()).into_iter().enumerate() {
        out.entry(w).or_default().push(b);
    }
    out
}

/// Joint tuples of every state, sector by sector. A stalled Schur iteration is
/// retried with fresh weights.
fn state_tuples(model: &Model<f64>, obs: &[&SparseMatrix<f64>], seed: u64) -> Result<Vec<Vec<f64>>, SpectrumError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_sector: Vec<Vec<Vec<f64>>> = sectors(model)
        .into_iter()
        .map(|(w, coords)| {
            let weights: Vec<Vec<f64>> =
                (0..RETRIES).map(|_| obs.iter().map(|_| rng.random_range(0.5..1.5)).collect()).collect();
            (w, coords, weights)
        })
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(w, coords, weights)| {
            let mut last = SpectrumError::Solver(w);
            for ws in &weights {
                match sector_tuples(obs, &coords, ws, w) {
                    Ok(t) => return Ok(t),
                    Err(e @ SpectrumError::Solver(_)) => last = e,
                    Err(e) => return Err(e),
                }
            }
            Err(last)
        })
        .collect::<Result<_, _>>()?;
    Ok(per_sector.into_iter().flatten().collect())
}

const RETRIES: usize = 3;

fn observables(model: &Model<f64>, deformed: bool) -> Vec<&SparseMatrix<f64>> {
    (1..=model.n()).map(|n| model.casimir(n, deformed).mat()).collect()
}

/// Joint spectrum of `C^{(1)}, …, C^{(N)}` by numeric diagonalization,
/// clustered across `Δ^{(N)}H` sectors.
pub fn degeneracy_bruteforce(model: &Model<f64>, deformed: bool, seed: u64) -> Result<Vec<Cluster>, SpectrumError> {
    merge(state_tuples(model, &observables(model, deformed), seed)?)
}

/// Spectrum of the Hamiltonian `C^{(N)}` alone. Its blocks are highly
/// degenerate, so the values come from the joint eigenvectors.
pub fn hamiltonian_clusters(model: &Model<f64>, deformed: bool) -> Result<Vec<Cluster>, SpectrumError> {
    let tuples = state_tuples(model, &observables(model, deformed), 0)?;
    merge(tuples.into_iter().map(|t| vec![t[t.len() - 1]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::HalfInt;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(2, -1), 0);
    }

    #[test]
    fn formula_small_n() {
        let row = |n: usize| (0..=n as i64).map(|l| degeneracy_binomial(n, l).unwrap()).collect::<Vec<_>>();
        assert_eq!(row(2), vec![1, 1, 1]);
        assert_eq!(row(3), vec![1, 3, 2, 1]);
        assert_eq!(row(4), vec![3, 6, 6, 3, 1]);
        for n in 1..=10usize {
            let total: i128 = row(n).iter().enumerate().map(|(l, c)| c * (2 * l as i128 + 1)).sum();
            assert_eq!(total, 3i128.pow(n as u32));
        }
        assert!(degeneracy_binomial(2, 3).is_err());
    }

    #[test]
    fn clustering_rules() {
        assert_eq!(cluster_sorted(&[1.0, 1.0 + 1e-12, 2.0], 1e-8).unwrap(), vec![0..2, 2..3]);
        assert!(cluster_sorted(&[1.0, 1.0 + 5e-8], 1e-8).is_err());
    }

    #[test]
    fn two_sites() {
        let m = Model::float(2, HalfInt::HALF, 1, 0.5).unwrap();
        let c = degeneracy_bruteforce(&m, true, 7).unwrap();
        let mut sizes: Vec<usize> = c.iter().map(|c| c.multiplicity).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 5]);
        let e = |x: f64| (x * 0.5).sinh().powi(2) / 0.5f64.sinh().powi(2);
        let top = c.iter().find(|c| c.multiplicity == 5).unwrap();
        assert!((top.eigenvalues[1] - e(2.5)).abs() < 1e-9);
    }
}
