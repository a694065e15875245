//! Exact 4×4 rational matrices, the membership test for `K(N)` and the
//! Atkin–Lehner elements `V_d`.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A 4×4 matrix over `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rational4(pub [[BigRational; 4]; 4]);

fn q(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

impl Rational4 {
    pub fn from_i64(rows: [[i64; 4]; 4]) -> Self {
        Rational4(rows.map(|r| r.map(q)))
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| q(i64::from(i == j)))
    }

    /// The standard `J = [[0, I], [−I, 0]]`.
    pub fn standard_j() -> Self {
        Self::from_fn(|i, j| {
            if j == i + 2 {
                q(1)
            } else if i == j + 2 {
                q(-1)
            } else {
                q(0)
            }
        })
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> BigRational) -> Self {
        Rational4(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.0[i][j]
    }

    pub fn mul(&self, other: &Rational4) -> Rational4 {
        Self::from_fn(|i, j| {
            (0..4).fold(BigRational::zero(), |acc, k| {
                acc + &self.0[i][k] * &other.0[k][j]
            })
        })
    }

    pub fn transpose(&self) -> Rational4 {
        Self::from_fn(|i, j| self.0[j][i].clone())
    }

    pub fn scale(&self, c: &BigRational) -> Rational4 {
        Self::from_fn(|i, j| &self.0[i][j] * c)
    }

    /// `M·J·ᵗM = c·J` for the returned `c`, if `M` is a symplectic
    /// similitude.
    pub fn similitude_factor(&self) -> Option<BigRational> {
        let j = Self::standard_j();
        let p = self.mul(&j).mul(&self.transpose());
        let c = p.0[0][2].clone();
        (p == j.scale(&c)).then_some(c)
    }

    pub fn is_symplectic(&self) -> bool {
        self.similitude_factor().is_some_and(|c| c.is_one())
    }
}

/// Rows of the `K(N)` pattern: `N` marks entries in `NZ`, `D` the entry in
/// `(1/N)Z`, `.` plain integers.
const PATTERN: [&str; 4] = [".N..", "...D", ".N..", "NNN."];

/// `M ∈ K(N)`: symplectic with the divisibility pattern
///
/// ```text
/// *   N*  *   *
/// *   *   *   */N
/// *   N*  *   *
/// N*  N*  N*  *
/// ```
pub fn is_paramodular(m: &Rational4, level: u64) -> bool {
    if level == 0 || !m.is_symplectic() {
        return false;
    }
    let n = q(level as i64);
    (0..4).all(|i| {
        (0..4).all(|j| {
            let x = m.get(i, j);
            match PATTERN[i].as_bytes()[j] {
                b'N' => (x / &n).is_integer(),
                b'D' => (x * &n).is_integer(),
                _ => x.is_integer(),
            }
        })
    })
}

/// `(1/√d)·M` with `M·J·ᵗM = d·J`; `√d` is never evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledSymplectic {
    matrix: Rational4,
    scale: u64,
}

impl ScaledSymplectic {
    pub fn new(matrix: Rational4, scale: u64) -> Result<Self> {
        if scale == 0 {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        match matrix.similitude_factor() {
            Some(c) if c == q(scale as i64) => Ok(ScaledSymplectic { matrix, scale }),
            _ => Err(Error::NotSymplectic(format!(
                " with similitude factor {scale}"
            ))),
        }
    }

    pub fn matrix(&self) -> &Rational4 {
        &self.matrix
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn mul(&self, other: &ScaledSymplectic) -> ScaledSymplectic {
        ScaledSymplectic {
            matrix: self.matrix.mul(&other.matrix),
            scale: self.scale * other.scale,
        }
    }

    /// The rational symplectic matrix `M/√d` when `d` is a perfect square.
    pub fn rational_form(&self) -> Option<Rational4> {
        let s = self.scale.sqrt();
        (s * s == self.scale).then(|| {
            self.matrix
                .scale(&BigRational::new(BigInt::one(), BigInt::from(s)))
        })
    }

    /// Membership in `K(N)` up to the scalars `±1`.
    pub fn projectively_in(&self, level: u64) -> bool {
        self.rational_form()
            .is_some_and(|m| is_paramodular(&m, level))
    }
}

/// `d ‖ N`: `d` divides `N` and is coprime to `N/d`.
pub fn is_exact_divisor(d: u64, level: u64) -> bool {
    d > 0 && level.is_multiple_of(d) && d.gcd(&(level / d)) == 1
}

pub fn exact_divisors(level: u64) -> Vec<u64> {
    (1..=level)
        .filter(|&d| is_exact_divisor(d, level))
        .collect()
}

pub fn is_squarefree(level: u64) -> bool {
    level > 0
        && (2..)
            .take_while(|p| p * p <= level)
            .all(|p| !level.is_multiple_of(p * p))
}

pub fn prime_divisors(level: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = level;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Parameters with `αδd − βγ(N/d) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BezoutParameters {
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub delta: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtkinLehner {
    pub level: u64,
    pub divisor: u64,
    pub parameters: BezoutParameters,
    pub element: ScaledSymplectic,
}

impl AtkinLehner {
    /// The `2×2` integral part `[[dα, β], [Nγ, dδ]]` of `√d·W_d`.
    pub fn w_matrix(&self) -> [[i64; 2]; 2] {
        let (n, d) = (self.level as i64, self.divisor as i64);
        let p = self.parameters;
        [[d * p.alpha, p.beta], [n * p.gamma, d * p.delta]]
    }
}

/// `V_d` for given parameters, after checking `d ‖ N` and the Bézout
/// condition.
pub fn atkin_lehner_with(level: u64, d: u64, p: BezoutParameters) -> Result<AtkinLehner> {
    if !is_exact_divisor(d, level) {
        return Err(Error::NotExactDivisor(d, level));
    }
    let (n, di, dp) = (level as i64, d as i64, (level / d) as i64);
    if p.alpha * p.delta * di - p.beta * p.gamma * dp != 1 {
        return Err(Error::InvalidArgument(format!(
            "{p:?} violates αδd − βγ(N/d) = 1"
        )));
    }
    let BezoutParameters {
        alpha,
        beta,
        gamma,
        delta,
    } = p;
    let m = Rational4::from_i64([
        [di * delta, -n * gamma, 0, 0],
        [-beta, di * alpha, 0, 0],
        [0, 0, di * alpha, beta],
        [0, 0, n * gamma, di * delta],
    ]);
    let element = ScaledSymplectic::new(m, d)?;
    Ok(AtkinLehner {
        level,
        divisor: d,
        parameters: p,
        element,
    })
}

/// `V_d`, with `β = 1, γ = −1, α = δ = 0` when `d = N` (giving `μ_N`) and
/// an extended-gcd solution otherwise.
pub fn make_atkin_lehner(level: u64, d: u64) -> Result<AtkinLehner> {
    if !is_exact_divisor(d, level) {
        return Err(Error::NotExactDivisor(d, level));
    }
    let p = if d == level {
        BezoutParameters {
            alpha: 0,
            beta: 1,
            gamma: -1,
            delta: 0,
        }
    } else {
        // d·x + (N/d)·y = 1, then α = x, δ = 1, β = −y, γ = 1
        let e = (d as i64).extended_gcd(&((level / d) as i64));
        debug_assert_eq!(e.gcd, 1);
        BezoutParameters {
            alpha: e.x,
            beta: -e.y,
            gamma: 1,
            delta: 1,
        }
    };
    atkin_lehner_with(level, d, p)
}

/// The Fricke element `μ_N`.
pub fn mu(level: u64) -> ScaledSymplectic {
    let n = level as i64;
    let m = Rational4::from_i64([[0, n, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -n, 0]]);
    ScaledSymplectic::new(m, level).expect("μ_N is a similitude of scale N")
}

/// Checks the group law of the Atkin–Lehner classes:
/// `V_{d₁}·V_{d₂}·V_{d₃} ∈ K(N)` projectively for `d₃ = d₁d₂/gcd(d₁,d₂)²`.
pub fn class_product_consistent(level: u64, d1: u64, d2: u64) -> Result<bool> {
    let g = d1.gcd(&d2);
    let d3 = d1 * d2 / (g * g);
    let v1 = make_atkin_lehner(level, d1)?;
    let v2 = make_atkin_lehner(level, d2)?;
    let v3 = make_atkin_lehner(level, d3)?;
    Ok(v1
        .element
        .mul(&v2.element)
        .mul(&v3.element)
        .projectively_in(level))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_members() {
        assert!(is_paramodular(&Rational4::standard_j(), 1));
        for n in 1..=12 {
            assert!(is_paramodular(&Rational4::identity(), n));
        }
        let mut t = Rational4::identity();
        t.0[1][3] = BigRational::new(1.into(), 5.into());
        assert!(is_paramodular(&t, 5));
        let mut tt = Rational4::identity();
        tt.0[3][1] = BigRational::new(1.into(), 5.into());
        assert!(tt.is_symplectic());
        assert!(!is_paramodular(&tt, 5));
        assert!(!is_paramodular(&Rational4::standard_j(), 2));
    }

    #[test]
    fn fricke_parameters_give_mu() {
        for n in [1u64, 2, 5, 6, 30] {
            assert_eq!(make_atkin_lehner(n, n).unwrap().element, mu(n));
        }
    }

    #[test]
    fn v2_of_level_6() {
        let v = make_atkin_lehner(6, 2).unwrap();
        assert_eq!(v.element.matrix().similitude_factor(), Some(q(2)));
        assert!(v.element.mul(&v.element).projectively_in(6));
        let other = atkin_lehner_with(
            6,
            2,
            BezoutParameters {
                alpha: -1,
                beta: 1,
                gamma: -1,
                delta: 1,
            },
        )
        .unwrap();
        assert!(other.element.mul(&v.element).projectively_in(6));
    }

    #[test]
    fn rejects_non_exact_divisors() {
        assert_eq!(make_atkin_lehner(12, 2), Err(Error::NotExactDivisor(2, 12)));
        assert!(make_atkin_lehner(6, 4).is_err());
        assert_eq!(exact_divisors(12), vec![1, 3, 4, 12]);
        assert_eq!(prime_divisors(30), vec![2, 3, 5]);
        assert!(is_squarefree(30) && !is_squarefree(12));
    }
}
