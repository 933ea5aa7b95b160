//! Polynomials in dot products of abstract unit vectors, with exact
//! integration of a vector over the sphere.
//!
//! A term is a multiset of unordered variable pairs, each pair standing for
//! the scalar product of two unit vectors; coefficients are exact rationals.
//! Integrating a vector Ω over the uniform sphere measure uses the moment
//! rule
//!
//!   ∫ dΩ/4π (Ω·x₁)···(Ω·x₂ₖ) = Σ_matchings ∏ (x_a·x_b) / (2k+1)!!
//!
//! (zero for odd powers), of which the k = 1 case is the q = 1/3 contraction
//! used throughout the ladder recursions. Pairs (x, x) collapse to 1.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A unit-vector variable: a boundary leg (σ slot) or a lattice site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Leg(u8),
    Site(u8),
}

pub type Pair = (Var, Var);

fn ordered(a: Var, b: Var) -> Pair {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Sorted multiset of pairs.
pub type Mono = Vec<Pair>;

#[derive(Debug, Clone, Default)]
pub struct DotPoly {
    pub terms: BTreeMap<Mono, BigRational>,
}

impl DotPoly {
    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        DotPoly { terms }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// Single term c·∏ pairs.
    pub fn term(c: BigRational, pairs: &[(Var, Var)]) -> Self {
        let mut mono: Mono = pairs.iter().map(|&(a, b)| ordered(a, b)).collect();
        mono.sort();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        DotPoly { terms }
    }

    fn add_term(&mut self, mono: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            // keep the map free of explicit zeros
            let key: Vec<Mono> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    /// self · (1 + c·(a·b))
    pub fn mul_binomial(&self, c: &BigRational, a: Var, b: Var) -> DotPoly {
        let p = ordered(a, b);
        let mut out = DotPoly::default();
        for (mono, coeff) in &self.terms {
            out.add_term(mono.clone(), coeff.clone());
            let mut m2 = mono.clone();
            let pos = m2.binary_search(&p).unwrap_or_else(|e| e);
            m2.insert(pos, p);
            out.add_term(m2, coeff * c);
        }
        out
    }

    /// Integrate the variable `v` over the unit sphere.
    pub fn integrate_out(&self, v: Var) -> DotPoly {
        let mut out = DotPoly::default();
        for (mono, coeff) in &self.terms {
            let mut partners: Vec<Var> = Vec::new();
            let mut rest: Mono = Vec::new();
            for &(a, b) in mono {
                if a == v && b == v {
                    // (Ω·Ω) = 1
                } else if a == v {
                    partners.push(b);
                } else if b == v {
                    partners.push(a);
                } else {
                    rest.push((a, b));
                }
            }
            if partners.len() % 2 == 1 {
                continue; // odd moment vanishes
            }
            if partners.is_empty() {
                out.add_term(mono.clone(), coeff.clone());
                continue;
            }
            let denom = double_factorial_odd(partners.len());
            let scale = coeff / BigRational::from(BigInt::from(denom));
            for_each_matching(&partners, &mut |pairs| {
                let mut m = rest.clone();
                for &(x, y) in pairs {
                    if x != y {
                        let p = ordered(x, y);
                        let pos = m.binary_search(&p).unwrap_or_else(|e| e);
                        m.insert(pos, p);
                    }
                    // (x·x) = 1: drop the pair
                }
                out.add_term(m, scale.clone());
            });
        }
        out
    }
}

/// (n+1)!! for an even partner count n: 3·5·…·(n+1).
fn double_factorial_odd(n: usize) -> u128 {
    let mut r: u128 = 1;
    let mut k: u128 = 3;
    for _ in 0..n / 2 {
        r *= k;
        k += 2;
    }
    r
}

/// Enumerate perfect matchings of `items` (with multiplicity).
fn for_each_matching(items: &[Var], f: &mut impl FnMut(&[(Var, Var)])) {
    let mut buf = Vec::with_capacity(items.len() / 2);
    let mut pool: Vec<Var> = items.to_vec();
    recurse(&mut pool, &mut buf, f);
}

fn recurse(pool: &mut Vec<Var>, buf: &mut Vec<(Var, Var)>, f: &mut impl FnMut(&[(Var, Var)])) {
    if pool.is_empty() {
        f(buf);
        return;
    }
    let first = pool.remove(0);
    for k in 0..pool.len() {
        let partner = pool.remove(k);
        buf.push((first, partner));
        recurse(pool, buf, f);
        buf.pop();
        pool.insert(k, partner);
    }
    pool.insert(0, first);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(3))
    }

    #[test]
    fn second_moment_is_q() {
        // ∫ (x·Ω)(Ω·y) = q (x·y)
        let x = Var::Leg(1);
        let y = Var::Leg(2);
        let s = Var::Site(0);
        let p = DotPoly::term(BigRational::one(), &[(x, s), (s, y)]);
        let out = p.integrate_out(s);
        assert_eq!(out.terms.len(), 1);
        assert_eq!(out.terms[&vec![ordered(x, y)]], q());
    }

    #[test]
    fn odd_moment_vanishes() {
        let x = Var::Leg(1);
        let s = Var::Site(0);
        let p = DotPoly::term(BigRational::one(), &[(x, s)]);
        assert!(p.integrate_out(s).terms.is_empty());
    }

    #[test]
    fn fourth_moment_pairings() {
        // ∫ (a·Ω)²(b·Ω)² = [2(a·b)² + 1] / 15
        let a = Var::Leg(1);
        let b = Var::Leg(2);
        let s = Var::Site(0);
        let p = DotPoly::term(BigRational::one(), &[(a, s), (a, s), (b, s), (b, s)]);
        let out = p.integrate_out(s);
        let ab = ordered(a, b);
        let fifteenth = BigRational::new(BigInt::from(1), BigInt::from(15));
        assert_eq!(out.terms[&vec![]], fifteenth.clone());
        // (a,a)(b,b) pairing collapses to 1; two cross pairings give (a·b)²
        assert_eq!(out.terms[&vec![ab, ab]], fifteenth * BigInt::from(2));
    }

    #[test]
    fn klt_site_elimination() {
        // ∫ dΩ (1 − Ω·Ω₁)(1 − Ω·Ω₂) = 1 + q Ω₁·Ω₂
        let o1 = Var::Site(1);
        let o2 = Var::Site(2);
        let s = Var::Site(0);
        let minus_one = -BigRational::one();
        let p = DotPoly::one()
            .mul_binomial(&minus_one, s, o1)
            .mul_binomial(&minus_one, s, o2);
        let out = p.integrate_out(s);
        assert_eq!(out.terms[&vec![]], BigRational::one());
        assert_eq!(out.terms[&vec![ordered(o1, o2)]], q());
    }

    #[test]
    fn klt_degree_three_site() {
        // ∫ dΩ ∏_{k=1..3}(1 − Ω·Ω_k) = 1 + q(Ω₁Ω₂ + Ω₂Ω₃ + Ω₃Ω₁)
        let o: Vec<Var> = (1..=3).map(Var::Site).collect();
        let s = Var::Site(0);
        let minus_one = -BigRational::one();
        let mut p = DotPoly::one();
        for &v in &o {
            p = p.mul_binomial(&minus_one, s, v);
        }
        let out = p.integrate_out(s);
        assert_eq!(out.terms.len(), 4);
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            assert_eq!(out.terms[&vec![ordered(o[i], o[j])]], q());
        }
    }
}
