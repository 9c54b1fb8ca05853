//! Reference eigenstates of the two-site spin-1/2 chain and a projective diff
//! against the constructed basis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::Model;
use crate::scalar::{HalfInt, RatFunc};
use crate::spectrum::{full_basis, EigenPacket, SpectrumError, StateLabel, Step};

pub const APPENDIX2: &str = include_str!("../../data/appendix2.json");

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct GoldenFile {
    pub about: String,
    pub tables: BTreeMap<String, Vec<GoldenRow>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct GoldenRow {
    pub k: usize,
    pub ladder: Vec<[usize; 2]>,
    /// `x` in `sinh²(xz)/sinh²z`.
    pub c2: String,
    pub components: BTreeMap<String, String>,
}

impl GoldenRow {
    pub fn label(&self) -> StateLabel {
        StateLabel::new(self.k, self.ladder.iter().map(|&[m, s]| Step { m, s }).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RowDiff {
    pub table: String,
    pub label: String,
    pub state_matches: bool,
    pub eigenvalue_matches: bool,
    pub eigenvalue: String,
    /// Constructed vector rescaled to agree with the reference at its first entry.
    pub computed: BTreeMap<String, String>,
    pub golden: BTreeMap<String, String>,
}

impl RowDiff {
    pub fn matches(&self) -> bool {
        self.state_matches && self.eigenvalue_matches
    }
}

pub fn parse_golden(text: &str) -> Result<GoldenFile, String> {
    serde_json::from_str(text).map_err(|e| format!("golden data: {e}"))
}

const KET: [char; 3] = ['d', '0', 'u'];

fn ket_index(key: &str) -> Result<usize, String> {
    let digits: Vec<usize> = key
        .chars()
        .map(|c| KET.iter().position(|&k| k == c).ok_or_else(|| format!("bad ket {key}")))
        .collect::<Result<_, _>>()?;
    if digits.len() != 2 {
        return Err(format!("bad ket {key}"));
    }
    Ok(3 * digits[0] + digits[1])
}

fn ket_name(i: usize) -> String {
    [KET[i / 3], KET[i % 3]].iter().collect()
}

fn grading_of(table: &str) -> Result<u8, String> {
    match table {
        "fbf" => Ok(1),
        "bfb" => Ok(0),
        t => Err(format!("unknown table {t}")),
    }
}

fn diff_row(table: &str, row: &GoldenRow, packets: &[EigenPacket<RatFunc>]) -> Result<RowDiff, String> {
    let label = row.label();
    let mut golden = vec![RatFunc::zero(); 9];
    for (k, v) in &row.components {
        golden[ket_index(k)?] = v.parse().map_err(|e| format!("{k}: {e}"))?;
    }
    let x: HalfInt = row.c2.parse().map_err(|e| format!("c2: {e}"))?;
    let want = RatFunc::sinh_ratio(x, 2);
    let packet = packets.iter().find(|p| p.label == label);
    let (state_matches, eigenvalue_matches, eigenvalue, computed) = match packet {
        None => (false, false, String::new(), BTreeMap::new()),
        Some(p) => {
            let pivot = golden.iter().position(|g| !g.is_zero()).ok_or("empty reference row")?;
            let scaled: Vec<RatFunc> = if p.vector[pivot].is_zero() {
                p.vector.clone()
            } else {
                let c = golden[pivot].div_ref(&p.vector[pivot]).map_err(|e| e.to_string())?;
                p.vector.iter().map(|v| v.mul_ref(&c)).collect()
            };
            let computed = scaled
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (ket_name(i), v.to_string()))
                .collect();
            (scaled == golden, p.eigenvalues[1] == want, p.eigenvalues[1].to_string(), computed)
        }
    };
    Ok(RowDiff {
        table: table.to_string(),
        label: label.to_string(),
        state_matches,
        eigenvalue_matches,
        eigenvalue,
        computed,
        golden: row.components.clone(),
    })
}

/// Build both two-site bases and diff every reference row projectively.
pub fn compare_tables(golden: &GoldenFile) -> Result<Vec<RowDiff>, String> {
    let mut out = Vec::new();
    for (table, rows) in &golden.tables {
        let g0 = grading_of(table)?;
        let model = Model::exact(2, HalfInt::HALF, g0).map_err(|e| e.to_string())?;
        let packets = full_basis(&model, true).map_err(|e: SpectrumError| e.to_string())?;
        for row in rows {
            out.push(diff_row(table, row, &packets)?);
        }
    }
    Ok(out)
}
