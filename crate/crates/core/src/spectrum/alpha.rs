use serde::{Deserialize, Serialize};

use super::SpectrumError;
use crate::scalar::{rat, HalfInt, RatFunc};

/// Which closed form of the kernel coefficients to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaVariant {
    /// Ratio formula for any spin at generic `q`.
    GeneralQ,
    /// Explicit `α_1`, `α_2` for spin 1/2 at generic `q`.
    JHalfQ,
    /// Ratio formula at `q = 1`.
    Classical,
}

/// Readings of the parameter `τ` in the closed forms for a step
/// `(m_prev, ·) → (m_new, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauCandidate {
    /// `Δ^{(s)}H` on the predecessor: `-2js + m_prev`.
    PredecessorWeight,
    /// `m_prev - s + 1`.
    StepFormula,
    /// `Δ^{(s)}H` on the new kernel vector: `-2js + m_new`.
    StateWeight,
}

pub fn tau_candidates(two_j: i64, m_prev: usize, m_new: usize, s: usize) -> [(TauCandidate, i64); 3] {
    let s = s as i64;
    [
        (TauCandidate::PredecessorWeight, -two_j * s + m_prev as i64),
        (TauCandidate::StepFormula, m_prev as i64 - s + 1),
        (TauCandidate::StateWeight, -two_j * s + m_new as i64),
    ]
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn sh(twice: i64) -> RatFunc {
    RatFunc::sinh_z(HalfInt::from_twice(twice))
}

fn ch(twice: i64) -> RatFunc {
    RatFunc::cosh_z(HalfInt::from_twice(twice))
}

/// `[α_0 = 1, α_1, …, α_δm]` from the selected closed form.
pub fn alpha_closed_form(
    variant: AlphaVariant,
    dm: usize,
    tau: i64,
    spin: HalfInt,
) -> Result<Vec<RatFunc>, SpectrumError> {
    let two_j = spin.twice();
    let max = match variant {
        AlphaVariant::JHalfQ => 2,
        _ => 2 * two_j.max(0) as usize,
    };
    if dm == 0 || dm > max || (variant == AlphaVariant::JHalfQ && two_j != 1) {
        return Err(SpectrumError::BadDeltaM { dm, max });
    }
    let d = dm as i64;
    match variant {
        AlphaVariant::JHalfQ => {
            let tq = RatFunc::qnum(HalfInt::from_int(tau));
            if dm == 1 {
                return Ok(vec![RatFunc::one(), RatFunc::s_pow(tau - 1).mul_ref(&tq)]);
            }
            let c = ch(2 * tau + 1).div_ref(&ch(1)).expect("cosh(z/2) is nonzero");
            let a1 = RatFunc::s_pow(tau).mul_ref(&c).neg_ref();
            let a2 = RatFunc::s_pow(2 * tau).mul_ref(&tq).mul_ref(&c);
            Ok(vec![RatFunc::one(), a1, a2])
        }
        AlphaVariant::GeneralQ => {
            let mut out = vec![RatFunc::one()];
            for i in 0..d {
                let num = sh(2 * (tau + d - i) - 1).scale_rational(&rat(sign(d - i), 1)).sub_ref(&sh(2 * tau - 1));
                let den = sh(two_j + 1).scale_rational(&rat(sign(two_j), 1)).add_ref(&sh(2 * i - two_j + 1));
                let ratio = num
                    .div_ref(&den)
                    .map_err(|_| SpectrumError::ZeroDenominator(i as usize))?
                    .mul_ref(&RatFunc::s_pow(tau + d - 2))
                    .scale_rational(&rat(sign(i + 1), 1));
                let next = out[i as usize].mul_ref(&ratio);
                out.push(next);
            }
            Ok(out)
        }
        AlphaVariant::Classical => {
            let mut out = vec![RatFunc::one()];
            for i in 0..d {
                // 2(-1)^{δm-i}(τ+δm-i-1/2) - 1 - 2τ = (-1)^{δm-i}(2τ+2δm-2i-1) - 1 - 2τ
                let num = sign(d - i) * (2 * tau + 2 * d - 2 * i - 1) - 1 - 2 * tau;
                let den = sign(i + 1) * (1 + 2 * two_j) + 2 * i + 1 - 2 * two_j;
                if den == 0 {
                    return Err(SpectrumError::ZeroDenominator(i as usize));
                }
                let next = out[i as usize].scale_rational(&rat(num, den));
                out.push(next);
            }
            Ok(out)
        }
    }
}
