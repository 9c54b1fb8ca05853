use std::fmt;

use serde::{Deserialize, Serialize};

/// One excitation step: `m` total excitations, last excited site `s` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Step {
    pub m: usize,
    pub s: usize,
}

/// `φ(k; m_l,s_l; …; m_1,s_1)`: `k` raisings in total on top of the kernel
/// vector reached through `ladder`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateLabel {
    pub ladder: Vec<Step>,
    pub k: usize,
}

impl StateLabel {
    pub fn new(k: usize, ladder: Vec<Step>) -> Self {
        StateLabel { ladder, k }
    }

    /// `m_l`, the excitation count of the kernel vector.
    pub fn m_top(&self) -> usize {
        self.ladder.last().map_or(0, |s| s.m)
    }

    /// Check the ladder rules for `n` sites of spin `two_j / 2`.
    pub fn is_valid(&self, n: usize, two_j: i64) -> bool {
        ladder_is_valid(&self.ladder, n, two_j)
            && self.k >= self.m_top()
            && self.k <= self.m_top() + 2 * ladder_spin_twice(&self.ladder, n, two_j).max(0) as usize
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "phi({}", self.k)?;
        if self.ladder.is_empty() {
            write!(f, ";0,0")?;
        }
        for st in self.ladder.iter().rev() {
            write!(f, ";{},{}", st.m, st.s)?;
        }
        write!(f, ")")
    }
}

/// Twice the multiplet spin `L = jN - m_l/2`.
pub fn ladder_spin_twice(ladder: &[Step], n: usize, two_j: i64) -> i64 {
    two_j * n as i64 - ladder.last().map_or(0, |s| s.m as i64)
}

/// Largest step allowed at site `s` after `m_prev` excitations: `min(4j, 4J)`
/// with `J = j(s-1) - m_prev/2` the spin already built on sites `1..s-1`.
fn max_step(two_j: i64, m_prev: usize, s: usize) -> i64 {
    let two_spin_prev = two_j * (s as i64 - 1) - m_prev as i64;
    (2 * two_j).min(2 * two_spin_prev)
}

fn ladder_is_valid(ladder: &[Step], n: usize, two_j: i64) -> bool {
    let (mut m, mut s) = (0usize, 1usize);
    for st in ladder {
        if st.s <= s || st.s > n || st.m <= m {
            return false;
        }
        if (st.m - m) as i64 > max_step(two_j, m, st.s) {
            return false;
        }
        m = st.m;
        s = st.s;
    }
    true
}

/// All ladders, one per multiplet, in lexicographic order.
pub fn enumerate_ladders(n: usize, two_j: i64) -> Vec<Vec<Step>> {
    fn go(n: usize, two_j: i64, cur: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
        out.push(cur.clone());
        let (m0, s0) = cur.last().map_or((0, 1), |st| (st.m, st.s));
        for s in s0 + 1..=n {
            let top = max_step(two_j, m0, s);
            for dm in 1..=top.max(0) as usize {
                cur.push(Step { m: m0 + dm, s });
                go(n, two_j, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, two_j, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Every state label, ordered by ladder then `k`.
pub fn enumerate_labels(n: usize, two_j: i64) -> Vec<StateLabel> {
    enumerate_ladders(n, two_j)
        .into_iter()
        .flat_map(|l| {
            let m = l.last().map_or(0, |s| s.m);
            let top = 2 * ladder_spin_twice(&l, n, two_j) as usize;
            (m..=m + top).map(move |k| StateLabel::new(k, l.clone()))
        })
        .collect()
}
