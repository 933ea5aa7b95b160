//! Property tests for the structural invariants.

use proptest::prelude::*;

use vbsee::dense::Mat;
use vbsee::fit::{fit_area_law, ScalingDataset, ScalingPoint};
use vbsee::spectrum::{eig_symmetric, entropy_from_spectrum};
use vbsee::SymmetricGraph;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_scale_invariant(
        d in proptest::collection::vec(-2.0f64..2.0, 4),
        c in prop_oneof![(-8.0f64..-1e-3), (1e-3f64..8.0)],
    ) {
        prop_assume!(d.iter().any(|x| x.abs() > 1e-6));
        let scaled: Vec<f64> = d.iter().map(|x| x * c).collect();
        let a = entropy_from_spectrum(&d, 2).unwrap().entropy;
        let b = entropy_from_spectrum(&scaled, 2).unwrap().entropy;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn entropy_permutation_invariant(
        d in proptest::collection::vec(-2.0f64..2.0, 8),
        swap in (0usize..8, 0usize..8),
    ) {
        prop_assume!(d.iter().any(|x| x.abs() > 1e-6));
        let mut p = d.clone();
        p.swap(swap.0, swap.1);
        let a = entropy_from_spectrum(&d, 3).unwrap();
        let b = entropy_from_spectrum(&p, 3).unwrap();
        prop_assert!((a.entropy - b.entropy).abs() < 1e-13);
        prop_assert_eq!(a.eigenvalues, b.eigenvalues);
    }

    #[test]
    fn gram_matrices_have_nonnegative_spectra_and_reconstruct(
        entries in proptest::collection::vec(-1.0f64..1.0, 36),
    ) {
        // A = B Bᵀ: eigensolver must return a PSD spectrum up to noise and
        // reconstruct to 1e-10, and eigenvalue sums match the trace.
        let n = 6;
        let b = Mat::from_vec(n, entries);
        let mut gram = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += b.get(i, k) * b.get(j, k);
                }
                gram.set(i, j, acc);
            }
        }
        gram.symmetrize();
        let (d, v) = eig_symmetric(&gram).unwrap();
        let fro = gram.frobenius().max(1e-12);
        prop_assert!(gram.reconstruction_residual(&d, &v) <= 1e-10 * fro);
        for &x in &d {
            prop_assert!(x >= -1e-10 * fro);
        }
        let sum: f64 = d.iter().sum();
        prop_assert!((sum - gram.trace()).abs() <= 1e-10 * fro.max(1.0));
    }

    #[test]
    fn lattice_handshake_identity(nx in 1usize..5, ny in 1usize..7) {
        let g = SymmetricGraph::square(nx, ny).unwrap();
        let total: u32 = g.spin2().iter().sum();
        prop_assert_eq!(total as usize, 2 * g.bonds().len() + g.boundary_size());
        prop_assert!(g.validate().is_empty());
        if ny % 2 == 0 {
            let h = SymmetricGraph::hexagonal(nx, ny).unwrap();
            let total: u32 = h.spin2().iter().sum();
            prop_assert_eq!(total as usize, 2 * h.bonds().len() + h.boundary_size());
            prop_assert!(h.validate().is_empty());
            prop_assert_eq!(h.boundary_size(), ny / 2);
        }
    }

    #[test]
    fn fit_reparameterization(
        c in 0.01f64..0.2,
        delta in 0.5f64..1.2,
        alpha in 0.4f64..0.69,
        factor in 0.2f64..1.0,
    ) {
        let points: Vec<ScalingPoint> = (1..=10)
            .map(|l| ScalingPoint {
                boundary_size: l,
                per_bond_entropy: c / (l as f64).powf(delta) + alpha,
                stderr: 0.0,
            })
            .collect();
        let base = ScalingDataset { points: points.clone(), family: None, nx: None };
        let scaled = ScalingDataset {
            points: points
                .into_iter()
                .map(|mut p| {
                    p.per_bond_entropy *= factor;
                    p
                })
                .collect(),
            family: None,
            nx: None,
        };
        let f1 = fit_area_law(&base).unwrap();
        let f2 = fit_area_law(&scaled).unwrap();
        prop_assert!((f2.c - factor * f1.c).abs() < 1e-6 * (1.0 + f1.c.abs()));
        prop_assert!((f2.alpha - factor * f1.alpha).abs() < 1e-6);
        prop_assert!((f2.delta - f1.delta).abs() < 1e-6);
    }
}
