//! Direct strand sums for vertical columns.
//!
//! For the square column of height N the Z matrix is the sum over ordered
//! index tuples i₁ < i₂ < … < i₂ₙ of
//!
//!   qⁿ (−q)^{i₂−i₁} ⋯ (−q)^{i₂ₙ−i₂ₙ₋₁} (σ_{i₁}·σ_{i₂}) ⋯ (σ_{i₂ₙ₋₁}·σ_{i₂ₙ}),
//!
//! i.e. disjoint strand intervals, each weighing (−1)^gap q^{gap+1}. On the
//! hexagonal column the legs sit two lattice sites apart, so an interval of
//! leg gap g runs through 2g bonds and weighs q^{2g+1} with a plus sign.
//! Evaluated directly at the same power-of-three scale as the recursion, so
//! the two must agree bit for bit.

use crate::transfer::vertical::{ScaledIntMatrix, MAX_VERTICAL_SIZE};
use crate::transfer::{LadderFamily, PartialMatching};
use crate::{Error, Result};

/// Exact Z by strand enumeration; `size` as in
/// [`vertical_z`](crate::transfer::vertical::vertical_z).
pub fn strand_z(family: LadderFamily, size: usize) -> Result<ScaledIntMatrix> {
    if size == 0 || size > MAX_VERTICAL_SIZE {
        return Err(Error::UnsupportedGeometry(format!(
            "strand expansion size {size} outside 1..={MAX_VERTICAL_SIZE}"
        )));
    }
    // Scale covering every term: the square recursion sits at 3^N (N ≥ 2),
    // the hexagonal at 3^(2m−1); sizes 1 use scale 0.
    let scale_pow3 = match family {
        _ if size == 1 => 0,
        LadderFamily::Square => size as u32,
        LadderFamily::Hexagonal => 2 * size as u32 - 1,
    };
    let dim = 1usize << size;
    let mut data = vec![0i64; dim * dim];
    let full = 3i64.pow(scale_pow3);
    for i in 0..dim {
        data[i * dim + i] = full;
    }

    // Subsets of even cardinality, paired consecutively in sorted order.
    for mask in 1usize..(1 << size) {
        let k = mask.count_ones() as usize;
        if k % 2 == 1 {
            continue;
        }
        let mut legs: Vec<u8> = Vec::with_capacity(k);
        for bit in 0..size {
            if (mask >> bit) & 1 == 1 {
                legs.push(bit as u8 + 1);
            }
        }
        let mut sign = 1i64;
        let mut qpow = 0u32;
        let mut pairs = Vec::with_capacity(k / 2);
        for chunk in legs.chunks(2) {
            let gap = (chunk[1] - chunk[0]) as u32;
            match family {
                LadderFamily::Square => {
                    if gap % 2 == 1 {
                        sign = -sign;
                    }
                    qpow += gap + 1;
                }
                LadderFamily::Hexagonal => {
                    qpow += 2 * gap + 1;
                }
            }
            pairs.push((chunk[0], chunk[1]));
        }
        let coeff = sign * 3i64.pow(scale_pow3 - qpow);
        let matching = PartialMatching::new(&pairs).expect("consecutive pairs are disjoint");
        add_matching_product_scaled(&mut data, size, &matching, coeff);
    }
    Ok(ScaledIntMatrix { qubits: size, dim, scale_pow3, data })
}

fn add_matching_product_scaled(z: &mut [i64], m: usize, mu: &PartialMatching, coeff: i64) {
    let dim = 1usize << m;
    let bit = |leg: u8| m - leg as usize;
    for col in 0..dim {
        let mut entries: Vec<(usize, i64)> = vec![(col, coeff)];
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
                    next.push((idx ^ (1 << bi) ^ (1 << bj), 2 * val));
                }
            }
            entries = next;
        }
        for (row, val) in entries {
            z[row * dim + col] += val;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::vertical::vertical_z;

    #[test]
    fn size_one_is_identity() {
        let z = strand_z(LadderFamily::Square, 1).unwrap();
        assert_eq!(z.data, vec![1, 0, 0, 1]);
    }

    #[test]
    fn square_size_two_single_strand() {
        // 𝟙 − q² σ₁·σ₂ at scale 3²
        let z = strand_z(LadderFamily::Square, 2).unwrap();
        assert_eq!(z.data, vec![8, 0, 0, 0, 0, 10, -2, 0, 0, -2, 10, 0, 0, 0, 0, 8]);
    }

    #[test]
    fn matches_kronecker_recursion_bit_for_bit() {
        for family in [LadderFamily::Square, LadderFamily::Hexagonal] {
            for size in 1..=8usize {
                let a = strand_z(family, size).unwrap();
                let b = vertical_z(family, size).unwrap();
                let target = a.scale_pow3.max(b.scale_pow3);
                assert_eq!(
                    a.rescaled(target).data,
                    b.rescaled(target).data,
                    "{family} size {size}"
                );
            }
        }
    }
}
