//! Cuspidality: `Φf = 0` on expansions, and the combinatorial criterion for
//! eighth powers of theta products.

use serde::Serialize;

use super::SiegelFourierSeries;
use crate::chartheta::{explore_set_orbit, CharacteristicSet, OrbitSearch};
use crate::error::{Error, Result};

/// True iff `Φf` vanishes through the truncation of `f`.
pub fn is_cusp_qexp(f: &SiegelFourierSeries) -> Result<bool> {
    Ok(f.phi()?.is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CuspVerdict {
    /// Every translate of the set meets the characteristics killed by Φ.
    Cusp {
        orbit_size: usize,
    },
    /// This translate avoids them, so some `θ[S]⁸|γ` survives Φ.
    NotCusp {
        witness: Vec<String>,
    },
    Inconclusive {
        explored: usize,
    },
}

impl CuspVerdict {
    pub fn is_cusp(&self) -> Option<bool> {
        match self {
            CuspVerdict::Cusp { .. } => Some(true),
            CuspVerdict::NotCusp { .. } => Some(false),
            CuspVerdict::Inconclusive { .. } => None,
        }
    }
}

/// Decides whether `θ[S]⁸` is a cusp form by exploring the orbit of `S`:
/// since `θ[S]⁸|γ = θ[γ⁻¹S]⁸` and `Φθ[m] = 0` exactly when the last entry
/// of `a` is odd, the form is cuspidal iff every set in the orbit contains
/// such an `m`.
pub fn cuspidality_combinatorial(s: &CharacteristicSet, budget: usize) -> Result<CuspVerdict> {
    if !s.all_even() {
        return Err(Error::OddCharacteristic);
    }
    let killed = CharacteristicSet::last_a_odd(s.genus());
    let search = explore_set_orbit(s, budget, |t| {
        if t.intersects(&killed) {
            None
        } else {
            Some(
                t.members()
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>(),
            )
        }
    });
    Ok(match search {
        OrbitSearch::Exhausted(o) => CuspVerdict::Cusp {
            orbit_size: o.members.len(),
        },
        OrbitSearch::Found(witness) => CuspVerdict::NotCusp { witness },
        OrbitSearch::Inconclusive { explored } => CuspVerdict::Inconclusive { explored },
    })
}
