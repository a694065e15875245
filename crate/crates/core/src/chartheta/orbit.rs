//! Orbits of characteristic sets under `Sp_{2n}(F₂)`.

use std::collections::HashSet;

use rayon::prelude::*;

use super::characteristic::CharacteristicSet;
use super::symplectic::{generator_permutations, sp2n_f2_order};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetOrbit {
    /// Orbit members in ascending order.
    pub members: Vec<CharacteristicSet>,
    /// `|Sp_{2n}(F₂)| / |orbit|`.
    pub stabilizer_order: u128,
}

/// Outcome of a set-orbit search that may stop early.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitSearch<W> {
    /// The whole orbit was explored without the predicate firing.
    Exhausted(SetOrbit),
    /// The predicate fired on this orbit member.
    Found(W),
    /// The node budget ran out before either of the above.
    Inconclusive { explored: usize },
}

/// Breadth-first orbit exploration; `stop` is examined on every member and
/// ends the search when it returns `Some`.
pub fn explore_set_orbit<W: Send>(
    s: &CharacteristicSet,
    budget: usize,
    stop: impl Fn(&CharacteristicSet) -> Option<W> + Sync,
) -> OrbitSearch<W> {
    let n = s.genus();
    let perms = generator_permutations(n);
    let mut seen: HashSet<CharacteristicSet> = HashSet::new();
    if let Some(w) = stop(s) {
        return OrbitSearch::Found(w);
    }
    seen.insert(s.clone());
    let mut frontier = vec![s.clone()];
    while !frontier.is_empty() {
        let images: Vec<CharacteristicSet> = frontier
            .par_iter()
            .flat_map_iter(|set| perms.iter().map(move |p| set.permuted(p)))
            .collect();
        let mut next = Vec::new();
        for img in images {
            if seen.contains(&img) {
                continue;
            }
            if seen.len() >= budget {
                return OrbitSearch::Inconclusive {
                    explored: seen.len(),
                };
            }
            seen.insert(img.clone());
            next.push(img);
        }
        if let Some(w) = next.par_iter().find_map_first(&stop) {
            return OrbitSearch::Found(w);
        }
        frontier = next;
    }
    let mut members: Vec<CharacteristicSet> = seen.into_iter().collect();
    members.sort();
    let order = sp2n_f2_order(n);
    let size = members.len() as u128;
    debug_assert_eq!(order % size, 0);
    OrbitSearch::Exhausted(SetOrbit {
        members,
        stabilizer_order: order / size,
    })
}

/// The orbit of `s` and the order of its stabilizer.
pub fn set_orbit(s: &CharacteristicSet, budget: usize) -> Result<SetOrbit> {
    if !s.all_even() {
        return Err(Error::OddCharacteristic);
    }
    match explore_set_orbit::<()>(s, budget, |_| None) {
        OrbitSearch::Exhausted(o) => Ok(o),
        OrbitSearch::Found(()) => unreachable!("predicate never fires"),
        OrbitSearch::Inconclusive { .. } => Err(Error::BudgetExhausted { budget }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartheta::ThetaCharacteristic;

    #[test]
    fn full_even_set_is_fixed() {
        for n in 1..=3 {
            let o = set_orbit(&CharacteristicSet::even(n), 10).unwrap();
            assert_eq!(o.members.len(), 1);
            assert_eq!(o.stabilizer_order, sp2n_f2_order(n));
        }
        assert_eq!(sp2n_f2_order(2), 720);
    }

    #[test]
    fn singletons_sweep_the_even_characteristics() {
        for n in 1..=3 {
            let s = CharacteristicSet::from_members(n, [ThetaCharacteristic::from_index(n, 0)])
                .unwrap();
            let o = set_orbit(&s, 1000).unwrap();
            assert_eq!(o.members.len(), (1 << (n - 1)) * ((1 << n) + 1));
            // orbit size times stabilizer is the group order
            assert_eq!(
                o.members.len() as u128 * o.stabilizer_order,
                sp2n_f2_order(n)
            );
        }
    }

    #[test]
    fn complement_of_zero_in_genus_two() {
        let o = set_orbit(&CharacteristicSet::even_nonzero(2), 100).unwrap();
        assert_eq!(o.members.len(), 10);
        assert_eq!(o.stabilizer_order, 72);
    }

    #[test]
    fn budget_and_parity_errors() {
        let s =
            CharacteristicSet::from_members(2, [ThetaCharacteristic::from_index(2, 0)]).unwrap();
        assert!(matches!(
            set_orbit(&s, 3),
            Err(Error::BudgetExhausted { .. })
        ));
        let odd =
            CharacteristicSet::from_members(1, [ThetaCharacteristic::new(1, &[1], &[1]).unwrap()])
                .unwrap();
        assert!(matches!(set_orbit(&odd, 3), Err(Error::OddCharacteristic)));
    }

    #[test]
    fn product_set_orbit_in_genus_three() {
        let s =
            CharacteristicSet::product(&[CharacteristicSet::even(1), CharacteristicSet::even(2)]);
        assert_eq!(s.len(), 30);
        let o = set_orbit(&s, 100_000).unwrap();
        assert_eq!(
            o.members.len() as u128 * o.stabilizer_order,
            sp2n_f2_order(3)
        );
        assert!(o.members.iter().all(|m| m.len() == 30 && m.all_even()));
    }
}
