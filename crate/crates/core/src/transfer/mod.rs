//! Exact Z matrices for ladder geometries.
//!
//! Horizontal ladders: the Z matrix of an m-leg ladder is a rotation-invariant
//! multilinear function of the m boundary σ vectors, so it expands over
//! partial matchings of the legs with rational coefficients. One transfer
//! step (adding a lattice column) acts linearly on those coefficients; the
//! step matrix is derived here symbolically by integrating the new column's
//! unit vectors out with the sphere moment rules ([`dotpoly`]). For the
//! published 2- and 3-leg families this reproduces the known recursion
//! matrices entry for entry; for m ≥ 4 the same elimination defines the
//! generic step.
//!
//! Coefficients follow the sign convention in which published values are
//! nonnegative: a pair of legs (i, j) carries the parity sign of the lattice
//! path between the boundary sites (square: (−1)^{j−i}; hexagonal: +1), and
//! the stored coefficient is the magnitude-signed symbol (a_n, b_n, …). The
//! recursion matrices are then nonnegative and irreducible, which is what the
//! infinite-length Perron–Frobenius limits need.
//!
//! Vertical ladders (single column, growing height) are handled in
//! [`vertical`] by an exact integer Kronecker recursion.

pub mod dotpoly;
pub mod vertical;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::dense::Mat;
use crate::spectrum::{entropy_from_spectrum, EntropySpectrum};
use crate::{Error, Result};
use dotpoly::{DotPoly, Var};

/// Largest horizontal-ladder leg count handled by the generic step.
pub const MAX_LEGS: usize = 6;
/// Power-iteration budget for the infinite-length limit.
pub const MAX_POWER_ITERATIONS: usize = 100_000;
/// Rayleigh-quotient residual target for the infinite-length limit.
pub const POWER_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LadderFamily {
    Square,
    Hexagonal,
}

impl fmt::Display for LadderFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LadderFamily::Square => write!(f, "square"),
            LadderFamily::Hexagonal => write!(f, "hexagonal"),
        }
    }
}

/// Set of disjoint unordered leg pairs over {1..m}; the empty matching is the
/// constant term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartialMatching(Vec<(u8, u8)>);

impl PartialMatching {
    pub fn empty() -> Self {
        PartialMatching(Vec::new())
    }

    pub fn new(pairs: &[(u8, u8)]) -> Result<Self> {
        let mut v: Vec<(u8, u8)> =
            pairs.iter().map(|&(i, j)| if i <= j { (i, j) } else { (j, i) }).collect();
        v.sort();
        let mut seen = std::collections::HashSet::new();
        for &(i, j) in &v {
            if i == j || !seen.insert(i) || !seen.insert(j) {
                return Err(Error::UnsupportedGeometry(format!(
                    "indices not disjoint in matching {v:?}"
                )));
            }
        }
        Ok(PartialMatching(v))
    }

    pub fn pairs(&self) -> &[(u8, u8)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for PartialMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        for (i, j) in &self.0 {
            write!(f, "({i},{j})")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PartialMatching {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "()" {
            return Ok(PartialMatching::empty());
        }
        let mut pairs = Vec::new();
        for chunk in s.split(')').filter(|c| !c.is_empty()) {
            let inner = chunk
                .strip_prefix('(')
                .ok_or_else(|| Error::UnsupportedGeometry(format!("bad matching {s:?}")))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| Error::UnsupportedGeometry(format!("bad matching {s:?}")))?;
            let i = a.trim().parse::<u8>().map_err(|_| {
                Error::UnsupportedGeometry(format!("bad matching index in {s:?}"))
            })?;
            let j = b.trim().parse::<u8>().map_err(|_| {
                Error::UnsupportedGeometry(format!("bad matching index in {s:?}"))
            })?;
            pairs.push((i, j));
        }
        PartialMatching::new(&pairs)
    }
}

/// All partial matchings of {1..m}, ordered by size then lexicographically.
/// Counts follow the telephone numbers: 2, 4, 10, 26, 76 for m = 2..6.
pub fn matching_basis(m: usize) -> Vec<PartialMatching> {
    fn rec(avail: &[u8]) -> Vec<Vec<(u8, u8)>> {
        if avail.is_empty() {
            return vec![Vec::new()];
        }
        let first = avail[0];
        let rest = &avail[1..];
        let mut out = rec(rest);
        for k in 0..rest.len() {
            let mut rem: Vec<u8> = rest.to_vec();
            let partner = rem.remove(k);
            for mut tail in rec(&rem) {
                tail.push((first, partner));
                out.push(tail);
            }
        }
        out
    }
    let legs: Vec<u8> = (1..=m as u8).collect();
    let mut basis: Vec<PartialMatching> = rec(&legs)
        .into_iter()
        .map(|mut pairs| {
            pairs.sort();
            PartialMatching(pairs)
        })
        .collect();
    basis.sort_by(|a, b| (a.len(), &a.0).cmp(&(b.len(), &b.0)));
    basis.dedup();
    basis
}

/// Lattice-parity sign carried by a leg pair: the length of any path between
/// the two boundary sites is fixed mod 2 by bipartiteness.
pub fn pair_sign(family: LadderFamily, i: u8, j: u8) -> i64 {
    match family {
        LadderFamily::Square => {
            if (j - i) % 2 == 1 {
                -1
            } else {
                1
            }
        }
        LadderFamily::Hexagonal => 1,
    }
}

pub fn matching_sign(family: LadderFamily, mu: &PartialMatching) -> i64 {
    mu.pairs().iter().map(|&(i, j)| pair_sign(family, i, j)).product()
}

/// Pair-coupling expansion of a ladder Z matrix, in the sign convention of
/// the published symbols (coefficients of the published recursions).
#[derive(Debug, Clone, PartialEq)]
pub struct LadderCoefficients {
    pub family: LadderFamily,
    pub m: usize,
    pub n: usize,
    pub coeff: BTreeMap<PartialMatching, BigRational>,
}

impl LadderCoefficients {
    /// n = 0 state: coefficient 1 on the empty matching.
    pub fn initial(family: LadderFamily, m: usize) -> Self {
        let mut coeff = BTreeMap::new();
        coeff.insert(PartialMatching::empty(), BigRational::one());
        LadderCoefficients { family, m, n: 0, coeff }
    }

    pub fn get(&self, mu: &PartialMatching) -> BigRational {
        self.coeff.get(mu).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coefficient table as JSON with rationals rendered `"p/q"`.
    pub fn to_json(&self) -> serde_json::Value {
        let coeff: BTreeMap<String, String> =
            self.coeff.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        json!({
            "family": self.family.to_string(),
            "m": self.m,
            "n": self.n,
            "coeff": coeff,
        })
    }
}

/// One transfer step as an exact matrix over the matching basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionMatrix {
    pub basis: Vec<PartialMatching>,
    /// entries[row][col], row = output matching, col = input matching.
    pub entries: Vec<Vec<BigRational>>,
}

impl RecursionMatrix {
    pub fn apply(&self, state: &[BigRational]) -> Vec<BigRational> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(state)
                    .map(|(a, x)| a * x)
                    .fold(BigRational::zero(), |acc, t| acc + t)
            })
            .collect()
    }

    pub fn to_f64(&self) -> Mat {
        let n = self.basis.len();
        let mut m = Mat::zeros(n);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.to_f64().unwrap());
            }
        }
        m
    }

    pub fn matmul(&self, other: &RecursionMatrix) -> RecursionMatrix {
        let n = self.basis.len();
        let mut entries = vec![vec![BigRational::zero(); n]; n];
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for k in 0..n {
                if self.entries[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = &self.entries[i][k] * &other.entries[k][j];
                    entries[i][j] += t;
                }
            }
        }
        RecursionMatrix { basis: self.basis.clone(), entries }
    }
}

/// Which parity of column a hexagonal step lands on. The first column of a
/// hexagonal ladder puts the boundary on odd heights; subsequent columns
/// alternate, which is the printed T₁/T₂ alternation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HexStep {
    /// Step producing a column with boundary on odd heights (T₁).
    IntoOdd,
    /// Step producing a column with boundary on even heights (T₂).
    IntoEven,
}

/// Exact transfer engine for one (family, leg count).
#[derive(Debug, Clone)]
pub struct LadderEngine {
    family: LadderFamily,
    m: usize,
    basis: Vec<PartialMatching>,
    /// Square: one matrix. Hexagonal: [T₁ (into odd), T₂ (into even)].
    steps: Vec<RecursionMatrix>,
}

/// Infinite-length limit data.
#[derive(Debug, Clone)]
pub struct InfiniteLimit {
    pub spectrum: EntropySpectrum,
    /// Perron–Frobenius vector normalized to 1 on the empty matching,
    /// in basis order.
    pub pf_vector: Vec<f64>,
    pub eigenvalue: f64,
    pub iterations: usize,
}

impl LadderEngine {
    pub fn new(family: LadderFamily, m: usize) -> Result<Self> {
        if m == 0 || m > MAX_LEGS {
            return Err(Error::UnsupportedGeometry(format!(
                "ladder legs m = {m} outside 1..={MAX_LEGS}"
            )));
        }
        let basis = matching_basis(m);
        let steps = match family {
            LadderFamily::Square => vec![derive_step(family, m, &basis, HexStep::IntoOdd)],
            LadderFamily::Hexagonal => vec![
                derive_step(family, m, &basis, HexStep::IntoOdd),
                derive_step(family, m, &basis, HexStep::IntoEven),
            ],
        };
        Ok(LadderEngine { family, m, basis, steps })
    }

    pub fn family(&self) -> LadderFamily {
        self.family
    }

    pub fn legs(&self) -> usize {
        self.m
    }

    pub fn basis(&self) -> &[PartialMatching] {
        &self.basis
    }

    /// The step matrix; for hexagonal ladders the one that produces column
    /// parity `which`.
    pub fn recursion_matrix(&self, which: HexStep) -> &RecursionMatrix {
        match (self.family, which) {
            (LadderFamily::Square, _) => &self.steps[0],
            (LadderFamily::Hexagonal, HexStep::IntoOdd) => &self.steps[0],
            (LadderFamily::Hexagonal, HexStep::IntoEven) => &self.steps[1],
        }
    }

    fn step_for(&self, next_n: usize) -> &RecursionMatrix {
        match self.family {
            LadderFamily::Square => &self.steps[0],
            LadderFamily::Hexagonal => {
                if next_n % 2 == 1 {
                    &self.steps[0]
                } else {
                    &self.steps[1]
                }
            }
        }
    }

    fn state_vec(&self, state: &LadderCoefficients) -> Vec<BigRational> {
        self.basis.iter().map(|b| state.get(b)).collect()
    }

    fn from_vec(&self, n: usize, v: Vec<BigRational>) -> LadderCoefficients {
        let coeff = self
            .basis
            .iter()
            .cloned()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .collect();
        LadderCoefficients { family: self.family, m: self.m, n, coeff }
    }

    /// One column: n → n+1.
    pub fn step(&self, state: &LadderCoefficients) -> LadderCoefficients {
        let next_n = state.n + 1;
        let v = self.step_for(next_n).apply(&self.state_vec(state));
        self.from_vec(next_n, v)
    }

    /// Exact coefficients after n columns.
    pub fn coefficients_at(&self, n: usize) -> LadderCoefficients {
        let mut s = LadderCoefficients::initial(self.family, self.m);
        for _ in 0..n {
            s = self.step(&s);
        }
        s
    }

    /// Materialize the dense 2^m × 2^m Z matrix with the family sign pattern.
    pub fn z_matrix(&self, state: &LadderCoefficients) -> Mat {
        let dim = 1usize << self.m;
        let mut z = Mat::zeros(dim);
        for (mu, c) in &state.coeff {
            let signed = c.to_f64().unwrap() * matching_sign(self.family, mu) as f64;
            add_matching_product(&mut z, self.m, mu, signed);
        }
        z.symmetrize();
        z
    }

    /// Exact integer Z matrix scaled by 3^pow (coefficients have pure
    /// powers of 3 in their denominators). Cross-check surface for the
    /// vertical engine.
    pub fn z_matrix_scaled(&self, state: &LadderCoefficients) -> (Vec<i64>, u32) {
        let three = BigInt::from(3);
        let mut pow = 0u32;
        for c in state.coeff.values() {
            let mut d = c.denom().abs();
            let mut p = 0u32;
            while (&d % &three).is_zero() {
                d /= &three;
                p += 1;
            }
            assert!(d.is_one(), "ladder coefficient denominator not a power of 3");
            pow = pow.max(p);
        }
        let dim = 1usize << self.m;
        let mut z = vec![0i64; dim * dim];
        let scale = BigRational::from(three.pow(pow));
        for (mu, c) in &state.coeff {
            let scaled = (c * &scale).to_integer();
            let signed = scaled.to_i64().expect("scaled ladder coefficient overflows i64")
                * matching_sign(self.family, mu);
            add_matching_product_int(&mut z, self.m, mu, signed);
        }
        (z, pow)
    }

    /// Entropy of the length-n ladder.
    pub fn entropy(&self, n: usize) -> Result<EntropySpectrum> {
        let state = self.coefficients_at(n);
        self.entropy_of(&state)
    }

    pub fn entropy_of(&self, state: &LadderCoefficients) -> Result<EntropySpectrum> {
        let z = self.z_matrix(state);
        let d = crate::spectrum::eigvals_symmetric(&z)?;
        entropy_from_spectrum(&d, self.m)
    }

    /// n → ∞ limit through the Perron–Frobenius vector of the step matrix
    /// (of the two-column product for hexagonal ladders).
    pub fn infinite_limit(&self) -> Result<InfiniteLimit> {
        let mat = match self.family {
            LadderFamily::Square => self.steps[0].to_f64(),
            // a_{2k+1} = T₁ T₂ a_{2k−1}: the odd-parity fixed point
            LadderFamily::Hexagonal => self.steps[0].matmul(&self.steps[1]).to_f64(),
        };
        let n = mat.n();
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        let mut iterations = 0;
        loop {
            if iterations >= MAX_POWER_ITERATIONS {
                return Err(Error::PowerIterationDiverged(iterations));
            }
            let w = mat.matvec(&v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            let w: Vec<f64> = w.iter().map(|x| x / norm).collect();
            let mw = mat.matvec(&w);
            let lambda: f64 = w.iter().zip(&mw).map(|(a, b)| a * b).sum();
            let residual = w
                .iter()
                .zip(&mw)
                .map(|(a, b)| (b - lambda * a).powi(2))
                .sum::<f64>()
                .sqrt();
            iterations += 1;
            v = w;
            if residual <= POWER_TOL {
                let pf_vector: Vec<f64> = v.iter().map(|x| x / v[0]).collect();
                let coeff = self
                    .basis
                    .iter()
                    .zip(&pf_vector)
                    .filter(|(_, &c)| c != 0.0)
                    .map(|(b, &c)| {
                        (b.clone(), BigRational::from_float(c).expect("finite pf component"))
                    })
                    .collect();
                let state =
                    LadderCoefficients { family: self.family, m: self.m, n: usize::MAX, coeff };
                let spectrum = self.entropy_of(&state)?;
                return Ok(InfiniteLimit { spectrum, pf_vector, eigenvalue: lambda, iterations });
            }
        }
    }
}

/// Scatter coeff·∏_{(i,j)∈μ} (σ_i·σ_j) into a dense matrix over m qubits
/// (leg 1 = most significant bit).
pub fn add_matching_product(z: &mut Mat, m: usize, mu: &PartialMatching, coeff: f64) {
    let dim = 1usize << m;
    for col in 0..dim {
        scatter_column(m, mu, col, |row, f| z.add_to(row, col, coeff * f as f64));
    }
}

fn add_matching_product_int(z: &mut [i64], m: usize, mu: &PartialMatching, coeff: i64) {
    let dim = 1usize << m;
    for col in 0..dim {
        scatter_column(m, mu, col, |row, f| z[row * dim + col] += coeff * f);
    }
}

/// σ_i·σ_j acting on column basis states: the 4×4 dot-product matrix has
/// entries 1 on aligned pairs, −1 on anti-aligned, 2 on the swap.
fn scatter_column(m: usize, mu: &PartialMatching, col: usize, mut emit: impl FnMut(usize, i64)) {
    let bit = |leg: u8| m - leg as usize; // leg 1 = MSB
    let mut entries: Vec<(usize, i64)> = vec![(col, 1)];
    for &(i, j) in mu.pairs() {
        let bi = bit(i);
        let bj = bit(j);
        let mut next = Vec::with_capacity(entries.len() * 2);
        for (idx, val) in entries {
            let a = (idx >> bi) & 1;
            let b = (idx >> bj) & 1;
            if a == b {
                next.push((idx, val));
            } else {
                next.push((idx, -val));
                let swapped = idx ^ (1 << bi) ^ (1 << bj);
                next.push((swapped, 2 * val));
            }
        }
        entries = next;
    }
    for (row, val) in entries {
        emit(row, val);
    }
}

/// Derive one transfer step symbolically: attach the old coefficients to the
/// sites the previous boundary occupied, multiply the new column's boundary
/// and bond factors, and integrate every site out in height order.
fn derive_step(
    family: LadderFamily,
    m: usize,
    basis: &[PartialMatching],
    which: HexStep,
) -> RecursionMatrix {
    let minus_one = -BigRational::one();
    let one = BigRational::one();
    let nb = basis.len();
    let mut entries = vec![vec![BigRational::zero(); nb]; nb];
    let index: BTreeMap<&PartialMatching, usize> =
        basis.iter().enumerate().map(|(k, b)| (b, k)).collect();

    // Column geometry: site heights, which heights attach to the old state,
    // which carry the new boundary legs.
    let (heights, old_attach, new_legs): (Vec<u8>, Vec<u8>, Vec<u8>) = match family {
        LadderFamily::Square => {
            let h: Vec<u8> = (1..=m as u8).collect();
            (h.clone(), h.clone(), h)
        }
        LadderFamily::Hexagonal => {
            let h: Vec<u8> = (1..=2 * m as u8).collect();
            let odd: Vec<u8> = h.iter().copied().filter(|y| y % 2 == 1).collect();
            let even: Vec<u8> = h.iter().copied().filter(|y| y % 2 == 0).collect();
            match which {
                HexStep::IntoOdd => (h, even, odd),
                HexStep::IntoEven => (h, odd, even),
            }
        }
    };
    let leg_at_height: BTreeMap<u8, u8> =
        new_legs.iter().enumerate().map(|(k, &y)| (y, k as u8 + 1)).collect();

    for (col, mu) in basis.iter().enumerate() {
        // Raw input coefficient for the symbol basis vector e_μ.
        let raw_in = BigRational::from(BigInt::from(matching_sign(family, mu)));
        let pairs: Vec<(Var, Var)> = mu
            .pairs()
            .iter()
            .map(|&(i, j)| {
                (Var::Site(old_attach[i as usize - 1]), Var::Site(old_attach[j as usize - 1]))
            })
            .collect();
        let mut acc = DotPoly::term(raw_in, &pairs);
        let last = *heights.last().unwrap();
        for &y in &heights {
            if let Some(&leg) = leg_at_height.get(&y) {
                acc = acc.mul_binomial(&one, Var::Site(y), Var::Leg(leg));
            }
            if y < last {
                acc = acc.mul_binomial(&minus_one, Var::Site(y), Var::Site(y + 1));
            }
            acc = acc.integrate_out(Var::Site(y));
        }
        for (mono, c) in &acc.terms {
            let pairs: Vec<(u8, u8)> = mono
                .iter()
                .map(|&(a, b)| match (a, b) {
                    (Var::Leg(i), Var::Leg(j)) => (i, j),
                    _ => unreachable!("site variable survived integration"),
                })
                .collect();
            let nu = PartialMatching::new(&pairs).expect("legs appear at most once");
            let row = index[&nu];
            let signed = c * BigRational::from(BigInt::from(matching_sign(family, &nu)));
            entries[row][col] += signed;
        }
    }
    RecursionMatrix { basis: basis.to_vec(), entries }
}

/// Closed forms for the 2-leg coefficient pairs (a_n, b_n), evaluated in
/// floating point; must agree with the rational recursion to 1e−12 relative.
pub fn closed_form_2leg(family: LadderFamily, n: usize) -> (f64, f64) {
    match family {
        LadderFamily::Square => {
            let s = 19f64.sqrt();
            let zp = (5.0 + s) / 9.0;
            let zm = (5.0 - s) / 9.0;
            let d = zp.powi(n as i32) - zm.powi(n as i32);
            let t = zp.powi(n as i32) + zm.powi(n as i32);
            ((4.0 * d + s * t) / (2.0 * s), d / (2.0 * s))
        }
        LadderFamily::Hexagonal => {
            let s = 1627f64.sqrt();
            let zp = (41.0 + s) / 81.0;
            let zm = (41.0 - s) / 81.0;
            let d = zp.powi(n as i32) - zm.powi(n as i32);
            let t = zp.powi(n as i32) + zm.powi(n as i32);
            ((40.0 * d + s * t) / (2.0 * s), 3.0 * d / (2.0 * s))
        }
    }
}
