use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest genus for which characteristics are packed into machine words.
pub const MAX_GENUS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// `m = (a; b) ∈ F₂ⁿ × F₂ⁿ`, with bit `i` of `a` (resp. `b`) holding `aᵢ` (resp. `bᵢ`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaCharacteristic {
    n: u8,
    a: u16,
    b: u16,
}

impl ThetaCharacteristic {
    pub fn new(n: usize, a: &[u8], b: &[u8]) -> Result<Self> {
        if n == 0 || n > MAX_GENUS {
            return Err(Error::InvalidArgument(format!(
                "genus {n} outside 1..={MAX_GENUS}"
            )));
        }
        if a.len() != n || b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.len().max(b.len()),
            });
        }
        let pack = |v: &[u8]| -> Result<u16> {
            v.iter().enumerate().try_fold(0u16, |acc, (i, &x)| match x {
                0 => Ok(acc),
                1 => Ok(acc | (1 << i)),
                _ => Err(Error::InvalidArgument(format!(
                    "characteristic entry {x} not in {{0,1}}"
                ))),
            })
        };
        Ok(ThetaCharacteristic {
            n: n as u8,
            a: pack(a)?,
            b: pack(b)?,
        })
    }

    pub fn from_bits(n: usize, a: u16, b: u16) -> Self {
        let mask = ((1u32 << n) - 1) as u16;
        ThetaCharacteristic {
            n: n as u8,
            a: a & mask,
            b: b & mask,
        }
    }

    /// Inverse of [`ThetaCharacteristic::index`].
    pub fn from_index(n: usize, idx: usize) -> Self {
        let mask = (1usize << n) - 1;
        Self::from_bits(n, (idx & mask) as u16, ((idx >> n) & mask) as u16)
    }

    /// Position in `0..4ⁿ`: `a` in the low bits, `b` above.
    pub fn index(&self) -> usize {
        self.a as usize | ((self.b as usize) << self.n)
    }

    pub fn genus(&self) -> usize {
        self.n as usize
    }

    pub fn a_bits(&self) -> u16 {
        self.a
    }

    pub fn b_bits(&self) -> u16 {
        self.b
    }

    pub fn a(&self) -> Vec<u8> {
        (0..self.n).map(|i| ((self.a >> i) & 1) as u8).collect()
    }

    pub fn b(&self) -> Vec<u8> {
        (0..self.n).map(|i| ((self.b >> i) & 1) as u8).collect()
    }

    pub fn parity(&self) -> Parity {
        if (self.a & self.b).count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// `(m₁, m₂)`: stacks the `a` and `b` vectors.
    pub fn concat(&self, other: &ThetaCharacteristic) -> ThetaCharacteristic {
        let n1 = self.n as u32;
        ThetaCharacteristic {
            n: self.n + other.n,
            a: self.a | (other.a << n1),
            b: self.b | (other.b << n1),
        }
    }

    /// Splits into genus `n1` and `n − n1` parts.
    pub fn split(&self, n1: usize) -> (ThetaCharacteristic, ThetaCharacteristic) {
        let lo = ThetaCharacteristic::from_bits(n1, self.a, self.b);
        let hi = ThetaCharacteristic::from_bits(self.genus() - n1, self.a >> n1, self.b >> n1);
        (lo, hi)
    }

    pub fn last_a_is_odd(&self) -> bool {
        (self.a >> (self.n - 1)) & 1 == 1
    }

    /// Drops the last coordinate of `a` and `b`.
    pub fn drop_last(&self) -> ThetaCharacteristic {
        ThetaCharacteristic::from_bits(self.genus() - 1, self.a, self.b)
    }
}

impl fmt::Debug for ThetaCharacteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ThetaCharacteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |v: Vec<u8>| v.iter().map(|x| x.to_string()).collect::<String>();
        write!(f, "({};{})", s(self.a()), s(self.b()))
    }
}

/// Either `"a;b"` with 0/1 digit strings, e.g. `"10;01"`.
impl std::str::FromStr for ThetaCharacteristic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = s
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("expected a;b in {s:?}")))?;
        let digits = |t: &str| -> Result<Vec<u8>> {
            t.trim()
                .chars()
                .filter(|c| !matches!(c, ',' | ' '))
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::Parse(format!("bad digit {c:?}"))),
                })
                .collect()
        };
        let (a, b) = (digits(a)?, digits(b)?);
        ThetaCharacteristic::new(a.len(), &a, &b)
    }
}

impl Serialize for ThetaCharacteristic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn all_characteristics(n: usize) -> impl Iterator<Item = ThetaCharacteristic> {
    (0..1usize << (2 * n)).map(move |i| ThetaCharacteristic::from_index(n, i))
}

pub fn even_characteristics(n: usize) -> Vec<ThetaCharacteristic> {
    all_characteristics(n).filter(|m| m.is_even()).collect()
}

/// Enumerates all `4ⁿ` characteristics and counts each parity.
pub fn characteristic_counts(n: usize) -> (u64, u64) {
    all_characteristics(n).fold(
        (0, 0),
        |(e, o), m| if m.is_even() { (e + 1, o) } else { (e, o + 1) },
    )
}

/// A duplicate-free set of characteristics of one genus, stored as a bitset
/// over [`ThetaCharacteristic::index`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacteristicSet {
    n: u8,
    words: Box<[u64]>,
}

impl CharacteristicSet {
    pub fn empty(n: usize) -> Self {
        let words = (1usize << (2 * n)).div_ceil(64);
        CharacteristicSet {
            n: n as u8,
            words: vec![0u64; words].into_boxed_slice(),
        }
    }

    pub fn from_members(
        n: usize,
        members: impl IntoIterator<Item = ThetaCharacteristic>,
    ) -> Result<Self> {
        let mut s = Self::empty(n);
        for m in members {
            if m.genus() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.genus(),
                });
            }
            s.insert(m);
        }
        Ok(s)
    }

    /// `E_n`, the even characteristics.
    pub fn even(n: usize) -> Self {
        Self::from_members(n, even_characteristics(n)).expect("same genus")
    }

    /// `E_n^* = E_n ∖ {0}`.
    pub fn even_nonzero(n: usize) -> Self {
        let mut s = Self::even(n);
        s.remove(ThetaCharacteristic::from_index(n, 0));
        s
    }

    /// `S₁ × S₂ × …` inside genus `Σ nᵢ`.
    pub fn product(parts: &[CharacteristicSet]) -> Self {
        let mut acc: Vec<ThetaCharacteristic> = Vec::new();
        let mut genus = 0;
        for (k, part) in parts.iter().enumerate() {
            if k == 0 {
                acc = part.members();
            } else {
                acc = acc
                    .iter()
                    .flat_map(|m| part.members().into_iter().map(move |p| m.concat(&p)))
                    .collect();
            }
            genus += part.genus();
        }
        Self::from_members(genus, acc).expect("same genus")
    }

    pub fn genus(&self) -> usize {
        self.n as usize
    }

    pub fn insert(&mut self, m: ThetaCharacteristic) {
        let i = m.index();
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, m: ThetaCharacteristic) {
        let i = m.index();
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, m: &ThetaCharacteristic) -> bool {
        let i = m.index();
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }

    pub fn members(&self) -> Vec<ThetaCharacteristic> {
        let n = self.genus();
        self.indices()
            .map(|i| ThetaCharacteristic::from_index(n, i))
            .collect()
    }

    pub fn all_even(&self) -> bool {
        self.members().iter().all(|m| m.is_even())
    }

    /// Image under a permutation of characteristic indices.
    pub fn permuted(&self, perm: &[u16]) -> CharacteristicSet {
        let mut out = CharacteristicSet {
            n: self.n,
            words: vec![0u64; self.words.len()].into_boxed_slice(),
        };
        for i in self.indices() {
            let j = perm[i] as usize;
            out.words[j / 64] |= 1 << (j % 64);
        }
        out
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn intersects(&self, other: &CharacteristicSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    /// Characteristics whose `a`-vector has odd last entry, the ones killed
    /// by the Siegel Φ operator.
    pub fn last_a_odd(n: usize) -> Self {
        Self::from_members(n, all_characteristics(n).filter(|m| m.last_a_is_odd()))
            .expect("same genus")
    }
}

impl fmt::Debug for CharacteristicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(a: &[u8], b: &[u8]) -> ThetaCharacteristic {
        ThetaCharacteristic::new(a.len(), a, b).unwrap()
    }

    #[test]
    fn parity_examples() {
        assert_eq!(ch(&[0, 0], &[0, 0]).parity(), Parity::Even);
        assert_eq!(ch(&[1], &[1]).parity(), Parity::Odd);
        assert_eq!(ch(&[1, 0], &[0, 1]).parity(), Parity::Even);
        assert_eq!(ch(&[1, 1], &[1, 0]).parity(), Parity::Odd);
    }

    #[test]
    fn counts_match_closed_forms() {
        for n in 1..=5usize {
            let (e, o) = characteristic_counts(n);
            let p = 1u64 << (n - 1);
            assert_eq!((e, o), (p * ((1 << n) + 1), p * ((1 << n) - 1)));
        }
        assert_eq!(characteristic_counts(1), (3, 1));
        assert_eq!(characteristic_counts(2), (10, 6));
        assert_eq!(characteristic_counts(3), (36, 28));
    }

    #[test]
    fn index_roundtrip_and_parse() {
        for n in 1..=3 {
            for m in all_characteristics(n) {
                assert_eq!(ThetaCharacteristic::from_index(n, m.index()), m);
                assert_eq!(m.to_string().parse::<ThetaCharacteristic>().unwrap(), m);
            }
        }
        assert!("10;2".parse::<ThetaCharacteristic>().is_err());
        assert!("10;011".parse::<ThetaCharacteristic>().is_err());
    }

    #[test]
    fn concat_and_split() {
        let m1 = ch(&[1], &[0]);
        let m2 = ch(&[0, 1], &[1, 1]);
        let m = m1.concat(&m2);
        assert_eq!(m.a(), vec![1, 0, 1]);
        assert_eq!(m.b(), vec![0, 1, 1]);
        assert_eq!(m.split(1), (m1, m2));
    }

    #[test]
    fn product_sets() {
        let e12 =
            CharacteristicSet::product(&[CharacteristicSet::even(1), CharacteristicSet::even(2)]);
        assert_eq!(e12.genus(), 3);
        assert_eq!(e12.len(), 30);
        assert!(e12.all_even());
        let e111 = CharacteristicSet::product(&[
            CharacteristicSet::even(1),
            CharacteristicSet::even(1),
            CharacteristicSet::even(1),
        ]);
        assert_eq!(e111.len(), 27);
        assert_eq!(CharacteristicSet::even_nonzero(2).len(), 9);
    }
}
