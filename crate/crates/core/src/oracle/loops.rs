//! Loop/strand enumeration of the Z matrix.
//!
//! Expanding ∏_bonds (1 − Ω_i·Ω_j) over bond subsets Γ and contracting site
//! by site with the q = 1/3 rule turns Z into a sum over configurations:
//! components of Γ in which every site has even total degree (counting one
//! optional boundary insertion). A closed loop of L bonds weighs
//! (−1)^L q^{L−1}; an open strand of B bonds between two inserted boundary
//! sites weighs (−1)^B q^{B+1} and feeds the (σ_i·σ_j) coefficient of its
//! endpoint legs. Insertions are forced: exactly the odd-degree vertices of
//! Γ, which must all be boundary sites or the subset contributes zero.
//!
//! Scope: every contraction must be a second moment, so internal vertices may
//! have degree at most 3 and boundary vertices at most 2; fourth moments
//! (degree-4 crossings) are out of this oracle's scope by design.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::dense::Mat;
use crate::graph::SymmetricGraph;
use crate::transfer::{add_matching_product, PartialMatching};
use crate::{Error, Result};

/// Bond-subset budget: 2^24 configurations.
pub const MAX_BONDS: usize = 24;

/// Exact pair-coupling expansion of Z with raw signs (the coefficient of
/// ∏ σ_i·σ_j as it appears in the matrix, before any family sign
/// convention).
#[derive(Debug, Clone, PartialEq)]
pub struct LoopZ {
    pub legs: usize,
    pub coeff: BTreeMap<PartialMatching, BigRational>,
}

impl LoopZ {
    pub fn get(&self, mu: &PartialMatching) -> BigRational {
        self.coeff.get(mu).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Dense 2^legs matrix.
    pub fn to_matrix(&self) -> Mat {
        let mut z = Mat::zeros(1 << self.legs);
        for (mu, c) in &self.coeff {
            add_matching_product(&mut z, self.legs, mu, c.to_f64().unwrap());
        }
        z.symmetrize();
        z
    }
}

/// Enumerate all bond subsets of the half-graph and accumulate loop and
/// strand weights. Exact in rationals.
pub fn loop_enumerate_z(graph: &SymmetricGraph) -> Result<LoopZ> {
    graph.ensure_valid().map_err(|e| Error::OracleOutOfScope(e.to_string()))?;
    let bonds = graph.bonds();
    if bonds.len() > MAX_BONDS {
        return Err(Error::BudgetExceeded(format!(
            "{} bonds exceeds the 2^{MAX_BONDS} subset budget",
            bonds.len()
        )));
    }
    let n = graph.n_vertices();
    let mut leg_of = vec![usize::MAX; n];
    for (k, &b) in graph.boundary().iter().enumerate() {
        leg_of[b] = k;
    }
    for v in 0..n {
        let deg = graph.degree(v);
        if leg_of[v] != usize::MAX {
            if deg > 2 {
                return Err(Error::OracleOutOfScope(format!(
                    "boundary vertex {v} has degree {deg} > 2; the insertion could force a fourth moment"
                )));
            }
        } else if deg > 3 {
            return Err(Error::OracleOutOfScope(format!(
                "internal vertex {v} has degree {deg} > 3; fourth moments are not implemented"
            )));
        }
    }

    let legs = graph.boundary_size();
    let mut coeff: BTreeMap<PartialMatching, BigRational> = BTreeMap::new();
    let mut degree = vec![0u8; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];

    'subsets: for mask in 0u64..(1u64 << bonds.len()) {
        for v in adj.iter_mut() {
            v.clear();
        }
        degree.iter_mut().for_each(|d| *d = 0);
        let mut selected = Vec::new();
        for (e, &(i, j)) in bonds.iter().enumerate() {
            if (mask >> e) & 1 == 1 {
                degree[i] += 1;
                degree[j] += 1;
                adj[i].push(j);
                adj[j].push(i);
                selected.push((i, j));
            }
        }
        // Insertions are forced at odd-degree vertices; odd degree anywhere
        // off the boundary kills the term by parity.
        for v in 0..n {
            if degree[v] % 2 == 1 && leg_of[v] == usize::MAX {
                continue 'subsets;
            }
        }

        let (weight, matching) = resolve_components(&adj, &degree, &leg_of)?;
        let entry = coeff.entry(matching).or_insert_with(BigRational::zero);
        *entry += weight;
    }
    coeff.retain(|_, v| !v.is_zero());
    Ok(LoopZ { legs, coeff })
}

/// Walk the selected subgraph: cycles weigh (−1)^L q^{L−1}, endpoint-inserted
/// paths weigh (−1)^B q^{B+1} and record their leg pair.
fn resolve_components(
    adj: &[Vec<usize>],
    degree: &[u8],
    leg_of: &[usize],
) -> Result<(BigRational, PartialMatching)> {
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut num = BigInt::one();
    let mut qpow = 0u32;
    let mut pairs: Vec<(u8, u8)> = Vec::new();

    for start in 0..n {
        if visited[start] || degree[start] == 0 {
            continue;
        }
        // Walk from an odd-degree (strand end) vertex if the component has
        // one, else anywhere on the cycle.
        if degree[start] % 2 == 1 {
            let (bonds_used, end) = walk_path(adj, &mut visited, start);
            let leg_a = leg_of[start];
            let leg_b = leg_of[end];
            debug_assert!(leg_a != usize::MAX && leg_b != usize::MAX);
            if bonds_used % 2 == 1 {
                num = -num;
            }
            qpow += bonds_used as u32 + 1;
            pairs.push((leg_a as u8 + 1, leg_b as u8 + 1));
        }
    }
    for start in 0..n {
        if visited[start] || degree[start] == 0 {
            continue;
        }
        let bonds_used = walk_cycle(adj, &mut visited, start);
        if bonds_used % 2 == 1 {
            num = -num;
        }
        qpow += bonds_used as u32 - 1;
    }

    let weight = BigRational::new(num, BigInt::from(3u32).pow(qpow));
    let matching = PartialMatching::new(&pairs)
        .map_err(|_| Error::OracleOutOfScope("strand endpoints collide".into()))?;
    Ok((weight, matching))
}

/// Follow a path component from a degree-1 endpoint to the other endpoint.
/// Degrees in admissible subsets never exceed 2, and duplicate bonds are a
/// validation error, so "the neighbor that is not where we came from" is
/// unambiguous.
fn walk_path(adj: &[Vec<usize>], visited: &mut [bool], start: usize) -> (usize, usize) {
    let mut prev = usize::MAX;
    let mut cur = start;
    let mut bonds = 0;
    visited[cur] = true;
    while let Some(&next) = adj[cur].iter().find(|&&w| w != prev) {
        visited[next] = true;
        bonds += 1;
        prev = cur;
        cur = next;
    }
    (bonds, cur)
}

/// Traverse a cycle component and count its bonds.
fn walk_cycle(adj: &[Vec<usize>], visited: &mut [bool], start: usize) -> usize {
    let mut prev = usize::MAX;
    let mut cur = start;
    let mut bonds = 0;
    visited[cur] = true;
    loop {
        let next = *adj[cur]
            .iter()
            .find(|&&w| w != prev)
            .expect("cycle vertices have degree 2");
        bonds += 1;
        if next == start {
            return bonds;
        }
        visited[next] = true;
        prev = cur;
        cur = next;
    }
}
