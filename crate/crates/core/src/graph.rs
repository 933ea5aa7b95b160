//! Reflection-symmetric lattice half-graphs.
//!
//! A `SymmetricGraph` describes subsystem A of a reflection-symmetric graph:
//! its vertices, internal bonds, the ordered boundary set Λ_A of sites whose
//! mirror partner sits across the cut, and the spin at every vertex. In the
//! basic model the spin is pinned by the coordination number of the full
//! graph, 2S_k = deg_A(k) + [k ∈ Λ_A], and spins are stored doubled so all
//! arithmetic stays exact.
//!
//! Vertex numbering is row-major with y fastest, so identical inputs always
//! produce identical orderings; the boundary is listed in increasing y.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{Error, Result};

/// Lattice family tag carried for provenance and geometry-aware engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Open-boundary square lattice half, `nx` columns by `ny` rows.
    Square { nx: usize, ny: usize },
    /// Open-boundary hexagonal (brick-wall) lattice half; `ny` even.
    Hexagonal { nx: usize, ny: usize },
    Custom,
}

impl Family {
    fn tag(&self) -> String {
        match self {
            Family::Square { nx, ny } => format!("square({nx},{ny})"),
            Family::Hexagonal { nx, ny } => format!("hex({nx},{ny})"),
            Family::Custom => "custom".to_string(),
        }
    }

    fn parse(s: &str) -> Option<Family> {
        if s == "custom" {
            return Some(Family::Custom);
        }
        let (name, rest) = s.split_once('(')?;
        let inner = rest.strip_suffix(')')?;
        let (a, b) = inner.split_once(',')?;
        let nx = a.trim().parse().ok()?;
        let ny = b.trim().parse().ok()?;
        match name {
            "square" => Some(Family::Square { nx, ny }),
            "hex" => Some(Family::Hexagonal { nx, ny }),
            _ => None,
        }
    }
}

/// Violation reported by [`SymmetricGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// 2S_k ≠ deg(k) + [k ∈ Λ_A].
    SpinMismatch { vertex: usize, expected_spin2: u32, got_spin2: u32 },
    SelfLoop { vertex: usize },
    DuplicateBond { i: usize, j: usize },
    BondOutOfRange { i: usize, j: usize },
    BoundaryOutOfRange { vertex: usize },
    BoundaryNotSorted,
    BoundaryDuplicate { vertex: usize },
    /// Vertex participates in no bond and is not on the boundary.
    IsolatedVertex { vertex: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SpinMismatch { vertex, expected_spin2, got_spin2 } => write!(
                f,
                "vertex {vertex}: 2S = {got_spin2} but degree + cut = {expected_spin2}"
            ),
            Violation::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            Violation::DuplicateBond { i, j } => write!(f, "duplicate bond ({i},{j})"),
            Violation::BondOutOfRange { i, j } => write!(f, "bond ({i},{j}) out of range"),
            Violation::BoundaryOutOfRange { vertex } => {
                write!(f, "boundary vertex {vertex} out of range")
            }
            Violation::BoundaryNotSorted => write!(f, "boundary ids not sorted"),
            Violation::BoundaryDuplicate { vertex } => {
                write!(f, "boundary vertex {vertex} repeated")
            }
            Violation::IsolatedVertex { vertex } => {
                write!(f, "vertex {vertex} has no bond and is not on the boundary")
            }
        }
    }
}

/// Half-graph of a reflection-symmetric lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricGraph {
    n_vertices: usize,
    bonds: Vec<(usize, usize)>,
    boundary: Vec<usize>,
    spin2: Vec<u32>,
    family: Family,
}

impl SymmetricGraph {
    /// Half of the open-boundary square lattice, cut along the reflection
    /// axis next to column x = 1. Vertex (x, y) ↦ (x−1)·ny + (y−1) with
    /// x ∈ 1..=nx, y ∈ 1..=ny; |Λ_A| = ny.
    pub fn square(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::UnsupportedGeometry("square lattice needs nx, ny >= 1".into()));
        }
        let id = |x: usize, y: usize| (x - 1) * ny + (y - 1);
        let mut bonds = Vec::new();
        for x in 1..=nx {
            for y in 1..ny {
                bonds.push((id(x, y), id(x, y + 1)));
            }
        }
        for x in 1..nx {
            for y in 1..=ny {
                bonds.push((id(x, y), id(x + 1, y)));
            }
        }
        let boundary: Vec<usize> = (1..=ny).map(|y| id(1, y)).collect();
        Ok(Self::assemble(nx * ny, bonds, boundary, Family::Square { nx, ny }))
    }

    /// Half of the open-boundary hexagonal lattice in brick-wall coordinates:
    /// full zig-zag columns of `ny` sites, horizontal bonds where x + y is
    /// odd, cut bonds at column 1 on odd y. Requires even `ny`;
    /// |Λ_A| = ny/2.
    pub fn hexagonal(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::UnsupportedGeometry("hexagonal lattice needs nx, ny >= 1".into()));
        }
        if ny % 2 != 0 {
            return Err(Error::UnsupportedGeometry(format!(
                "hexagonal lattice needs even ny (got {ny})"
            )));
        }
        let id = |x: usize, y: usize| (x - 1) * ny + (y - 1);
        let mut bonds = Vec::new();
        for x in 1..=nx {
            for y in 1..ny {
                bonds.push((id(x, y), id(x, y + 1)));
            }
        }
        for x in 1..nx {
            for y in 1..=ny {
                if (x + y) % 2 == 1 {
                    bonds.push((id(x, y), id(x + 1, y)));
                }
            }
        }
        let boundary: Vec<usize> = (1..=ny).step_by(2).map(|y| id(1, y)).collect();
        Ok(Self::assemble(nx * ny, bonds, boundary, Family::Hexagonal { nx, ny }))
    }

    /// Hand-built graph; spins follow the basic-model rule automatically.
    pub fn custom(n_vertices: usize, bonds: Vec<(usize, usize)>, boundary: Vec<usize>) -> Self {
        Self::assemble(n_vertices, bonds, boundary, Family::Custom)
    }

    /// Like [`custom`](Self::custom) but with explicit spins, as read from
    /// interchange files; validation then checks them against the rule.
    pub fn with_spins(
        n_vertices: usize,
        bonds: Vec<(usize, usize)>,
        boundary: Vec<usize>,
        spin2: Vec<u32>,
        family: Family,
    ) -> Self {
        let bonds = normalize_bonds(bonds);
        SymmetricGraph { n_vertices, bonds, boundary, spin2, family }
    }

    fn assemble(
        n_vertices: usize,
        bonds: Vec<(usize, usize)>,
        boundary: Vec<usize>,
        family: Family,
    ) -> Self {
        let bonds = normalize_bonds(bonds);
        let mut spin2 = vec![0u32; n_vertices];
        for &(i, j) in &bonds {
            if i < n_vertices {
                spin2[i] += 1;
            }
            if j < n_vertices {
                spin2[j] += 1;
            }
        }
        for &b in &boundary {
            if b < n_vertices {
                spin2[b] += 1;
            }
        }
        SymmetricGraph { n_vertices, bonds, boundary, spin2, family }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    /// Ordered boundary set Λ_A.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn boundary_size(&self) -> usize {
        self.boundary.len()
    }

    /// Doubled spin 2S_k per vertex.
    pub fn spin2(&self) -> &[u32] {
        &self.spin2
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn degree(&self, v: usize) -> usize {
        self.bonds.iter().filter(|&&(i, j)| i == v || j == v).count()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary.binary_search(&v).is_ok()
    }

    /// Check every structural invariant; returns all violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n_vertices;
        let mut degree = vec![0u32; n];
        let mut seen = std::collections::HashSet::new();
        for &(i, j) in &self.bonds {
            if i >= n || j >= n {
                out.push(Violation::BondOutOfRange { i, j });
                continue;
            }
            if i == j {
                out.push(Violation::SelfLoop { vertex: i });
                continue;
            }
            if !seen.insert((i, j)) {
                out.push(Violation::DuplicateBond { i, j });
                continue;
            }
            degree[i] += 1;
            degree[j] += 1;
        }
        if !self.boundary.windows(2).all(|w| w[0] < w[1]) {
            if self.boundary.windows(2).any(|w| w[0] == w[1]) {
                for w in self.boundary.windows(2) {
                    if w[0] == w[1] {
                        out.push(Violation::BoundaryDuplicate { vertex: w[0] });
                    }
                }
            } else {
                out.push(Violation::BoundaryNotSorted);
            }
        }
        let mut on_boundary = vec![false; n];
        for &b in &self.boundary {
            if b >= n {
                out.push(Violation::BoundaryOutOfRange { vertex: b });
            } else {
                on_boundary[b] = true;
            }
        }
        for v in 0..n {
            let expected = degree[v] + u32::from(on_boundary[v]);
            let got = self.spin2.get(v).copied().unwrap_or(0);
            if expected != got {
                out.push(Violation::SpinMismatch {
                    vertex: v,
                    expected_spin2: expected,
                    got_spin2: got,
                });
            }
            if n > 1 && degree[v] == 0 && !on_boundary[v] {
                out.push(Violation::IsolatedVertex { vertex: v });
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(v))
        }
    }

    /// Graph interchange JSON: field names are part of the file contract.
    pub fn to_json(&self) -> serde_json::Value {
        let spin2: BTreeMap<String, u32> = self
            .spin2
            .iter()
            .enumerate()
            .map(|(k, &s)| (k.to_string(), s))
            .collect();
        json!({
            "vertices": (0..self.n_vertices).collect::<Vec<_>>(),
            "bonds": self.bonds.iter().map(|&(i, j)| vec![i, j]).collect::<Vec<_>>(),
            "boundary": self.boundary,
            "spin2": spin2,
            "family": self.family.tag(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::UnsupportedGeometry("graph file must be a JSON object".into()))?;
        let vertices: Vec<usize> = serde_json::from_value(
            obj.get("vertices").cloned().unwrap_or(serde_json::Value::Null),
        )?;
        let bonds: Vec<(usize, usize)> =
            serde_json::from_value(obj.get("bonds").cloned().unwrap_or(serde_json::Value::Null))?;
        let boundary: Vec<usize> = serde_json::from_value(
            obj.get("boundary").cloned().unwrap_or(serde_json::Value::Null),
        )?;
        let spin2_map: BTreeMap<String, u32> =
            serde_json::from_value(obj.get("spin2").cloned().unwrap_or(serde_json::Value::Null))?;
        let family = obj
            .get("family")
            .and_then(|f| f.as_str())
            .and_then(Family::parse)
            .unwrap_or(Family::Custom);
        let n = vertices.len();
        let mut spin2 = vec![0u32; n];
        for (k, s) in spin2_map {
            let idx: usize = k
                .parse()
                .map_err(|_| Error::UnsupportedGeometry(format!("bad spin2 key {k:?}")))?;
            if idx < n {
                spin2[idx] = s;
            }
        }
        Ok(SymmetricGraph::with_spins(n, bonds, boundary, spin2, family))
    }
}

fn normalize_bonds(bonds: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    let mut b: Vec<(usize, usize)> =
        bonds.into_iter().map(|(i, j)| if i <= j { (i, j) } else { (j, i) }).collect();
    b.sort();
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_1x1_is_single_cut_bond() {
        let g = SymmetricGraph::square(1, 1).unwrap();
        assert_eq!(g.n_vertices(), 1);
        assert!(g.bonds().is_empty());
        assert_eq!(g.boundary(), &[0]);
        assert_eq!(g.spin2(), &[1]); // S = 1/2
        assert!(g.validate().is_empty());
    }

    #[test]
    fn square_1x2_spins() {
        let g = SymmetricGraph::square(1, 2).unwrap();
        assert_eq!(g.n_vertices(), 2);
        assert_eq!(g.bonds(), &[(0, 1)]);
        assert_eq!(g.boundary_size(), 2);
        assert_eq!(g.spin2(), &[2, 2]); // both S = 1
    }

    #[test]
    fn square_2x2_structure() {
        let g = SymmetricGraph::square(2, 2).unwrap();
        assert_eq!(g.n_vertices(), 4);
        assert_eq!(g.bonds().len(), 4);
        assert_eq!(g.boundary(), &[0, 1]);
        // boundary column S = 3/2, interior column S = 1
        assert_eq!(g.spin2(), &[3, 3, 2, 2]);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn handshake_identity() {
        // Σ 2S_k = 2|B_A| + |Λ_A| for every generated lattice.
        for g in [
            SymmetricGraph::square(3, 4).unwrap(),
            SymmetricGraph::square(1, 5).unwrap(),
            SymmetricGraph::hexagonal(2, 6).unwrap(),
            SymmetricGraph::hexagonal(4, 4).unwrap(),
        ] {
            let total: u32 = g.spin2().iter().sum();
            assert_eq!(total as usize, 2 * g.bonds().len() + g.boundary_size());
            assert!(g.validate().is_empty());
        }
    }

    #[test]
    fn hexagonal_1x2_is_chain_head() {
        let g = SymmetricGraph::hexagonal(1, 2).unwrap();
        assert_eq!(g.boundary(), &[0]);
        assert_eq!(g.bonds(), &[(0, 1)]);
        assert_eq!(g.spin2(), &[2, 1]);
    }

    #[test]
    fn hexagonal_1x4_two_legs() {
        let g = SymmetricGraph::hexagonal(1, 4).unwrap();
        assert_eq!(g.boundary(), &[0, 2]);
        assert_eq!(g.bonds(), &[(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn hexagonal_2x2_is_chain_of_four() {
        let g = SymmetricGraph::hexagonal(2, 2).unwrap();
        assert_eq!(g.n_vertices(), 4);
        assert_eq!(g.boundary(), &[0]);
        // path (1,1)-(1,2)-(2,2)-(2,1): ids 0-1-3-2
        assert_eq!(g.bonds(), &[(0, 1), (1, 3), (2, 3)]);
        let deg: Vec<usize> = (0..4).map(|v| g.degree(v)).collect();
        assert_eq!(deg, vec![1, 2, 1, 2]);
    }

    #[test]
    fn hexagonal_rejects_odd_ny() {
        assert!(SymmetricGraph::hexagonal(2, 3).is_err());
    }

    #[test]
    fn validate_catches_bad_spin() {
        let mut g = SymmetricGraph::square(2, 2).unwrap();
        g.spin2[0] = 1;
        let v = g.validate();
        assert!(v.iter().any(|x| matches!(
            x,
            Violation::SpinMismatch { vertex: 0, expected_spin2: 3, got_spin2: 1 }
        )));
    }

    #[test]
    fn validate_catches_duplicate_bond() {
        let g = SymmetricGraph::with_spins(
            2,
            vec![(0, 1), (1, 0)],
            vec![],
            vec![1, 1],
            Family::Custom,
        );
        let v = g.validate();
        assert!(v.iter().any(|x| matches!(x, Violation::DuplicateBond { i: 0, j: 1 })));
    }

    #[test]
    fn json_round_trip() {
        let g = SymmetricGraph::hexagonal(2, 4).unwrap();
        let j = g.to_json();
        assert!(j.get("spin2").unwrap().is_object());
        let g2 = SymmetricGraph::from_json(&j).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn deterministic_construction() {
        assert_eq!(SymmetricGraph::square(3, 3).unwrap(), SymmetricGraph::square(3, 3).unwrap());
    }
}
