//! Highest-spin projector on an edge as an exact polynomial in S_k·S_l.
//!
//! The bond Hamiltonian projects the pair (S_k, S_l) onto total spin
//! J = S_k + S_l; expanding the product over the lower sectors
//! j ∈ |S_k−S_l| .. S_k+S_l−1 and substituting
//! (S_k+S_l)² = 2 S_k·S_l + S_k(S_k+1) + S_l(S_l+1) gives a polynomial of
//! degree 2·min(S_k, S_l) with rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Rational `n/d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// s(s+1) for a half-integer spin given as 2s.
fn casimir(spin2: u32) -> BigRational {
    ratio((spin2 as i64) * (spin2 as i64 + 2), 4)
}

/// Projector polynomial π(x) = Σ c_p x^p, x = S_k·S_l.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPolynomial {
    /// Doubled total spin 2(S_k + S_l) the projector selects.
    pub total_spin2: u32,
    /// c_0 ..= c_{2 S_min}, ascending powers.
    pub coefficients: Vec<BigRational>,
}

impl ProjectorPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Eigenvalue of S_k·S_l in the total-spin-J sector,
/// x_J = [J(J+1) − S_k(S_k+1) − S_l(S_l+1)]/2, spins passed doubled.
pub fn sector_eigenvalue(spin2_k: u32, spin2_l: u32, j2: u32) -> BigRational {
    (casimir(j2) - casimir(spin2_k) - casimir(spin2_l)) / ratio(2, 1)
}

/// Exact projector onto the highest total spin of an edge; spins passed
/// doubled (2S_k, 2S_l), both ≥ 1.
pub fn pair_projector(spin2_k: u32, spin2_l: u32) -> ProjectorPolynomial {
    assert!(spin2_k >= 1 && spin2_l >= 1, "spins must be at least 1/2");
    let top2 = spin2_k + spin2_l;
    let top_casimir = casimir(top2);
    let shift = casimir(spin2_k) + casimir(spin2_l);
    let lo2 = spin2_k.abs_diff(spin2_l);

    // Polynomial in x, coefficients ascending; start from 1.
    let mut poly = vec![BigRational::one()];
    let mut j2 = lo2;
    while j2 < top2 {
        let jc = casimir(j2);
        // factor: (2x + shift − j(j+1)) / (top(top+1) − j(j+1))
        let denom = top_casimir.clone() - jc.clone();
        let c0 = (shift.clone() - jc) / denom.clone();
        let c1 = ratio(2, 1) / denom;
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (p, c) in poly.iter().enumerate() {
            next[p] += c * c0.clone();
            next[p + 1] += c * c1.clone();
        }
        poly = next;
        j2 += 2;
    }
    ProjectorPolynomial { total_spin2: top2, coefficients: poly }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(p: &ProjectorPolynomial) -> Vec<BigRational> {
        p.coefficients.clone()
    }

    #[test]
    fn spin_one_pair() {
        let p = pair_projector(2, 2);
        assert_eq!(coeffs(&p), vec![ratio(1, 3), ratio(1, 2), ratio(1, 6)]);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn spin_three_half_pair() {
        let p = pair_projector(3, 3);
        assert_eq!(
            coeffs(&p),
            vec![ratio(11, 128), ratio(27, 160), ratio(29, 360), ratio(1, 90)]
        );
    }

    #[test]
    fn spin_two_pair() {
        let p = pair_projector(4, 4);
        assert_eq!(
            coeffs(&p),
            vec![ratio(0, 1), ratio(1, 28), ratio(1, 40), ratio(1, 180), ratio(1, 2520)]
        );
    }

    #[test]
    fn projector_is_one_on_top_sector_zero_below() {
        for &(s2k, s2l) in &[(2u32, 2u32), (3, 3), (4, 4), (2, 3), (1, 4), (3, 4)] {
            let p = pair_projector(s2k, s2l);
            let mut j2 = s2k.abs_diff(s2l);
            while j2 <= s2k + s2l {
                let x = sector_eigenvalue(s2k, s2l, j2);
                let v = p.eval(&x);
                if j2 == s2k + s2l {
                    assert!(v.is_one(), "top sector of ({s2k},{s2l})");
                } else {
                    assert!(v.is_zero(), "sector j2={j2} of ({s2k},{s2l})");
                }
                j2 += 2;
            }
        }
    }

    #[test]
    fn spin_one_sector_values() {
        // S=1 chain: x = 1 in the J=2 sector, x = −2 in the singlet.
        let p = pair_projector(2, 2);
        assert!(p.eval(&ratio(1, 1)).is_one());
        assert!(p.eval(&ratio(-2, 1)).is_zero());
    }

    #[test]
    fn degree_matches_min_spin() {
        assert_eq!(pair_projector(1, 4).degree(), 1);
        assert_eq!(pair_projector(3, 5).degree(), 3);
    }
}
