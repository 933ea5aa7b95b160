//! Cross-engine agreement: every graph where at least two exact engines
//! apply must give the same entropy, and Monte Carlo must agree within its
//! statistical error.

use vbsee::mc::{estimate_z, McConfig};
use vbsee::oracle::{doubled_graph, loop_enumerate_z, vbs_cut_entropy};
use vbsee::spectrum::{eigvals_symmetric, entropy_from_spectrum};
use vbsee::transfer::vertical::vertical_entropy;
use vbsee::transfer::{LadderEngine, LadderFamily};
use vbsee::SymmetricGraph;

/// Triple agreement of loop enumeration, brute-force RDM, and the transfer
/// engine on small ladders.
#[test]
fn triple_agreement_on_small_ladders() {
    let cases = [
        (LadderFamily::Square, 2usize, 2usize, 1usize),
        (LadderFamily::Square, 2, 2, 2),
        (LadderFamily::Hexagonal, 4, 2, 1),
        (LadderFamily::Hexagonal, 4, 2, 2),
        (LadderFamily::Hexagonal, 6, 3, 1),
    ];
    for (family, ny, m, nx) in cases {
        let graph = match family {
            LadderFamily::Square => SymmetricGraph::square(nx, ny).unwrap(),
            LadderFamily::Hexagonal => SymmetricGraph::hexagonal(nx, ny).unwrap(),
        };
        let transfer = LadderEngine::new(family, m).unwrap().entropy(nx).unwrap();

        let z = loop_enumerate_z(&graph).unwrap();
        let d = eigvals_symmetric(&z.to_matrix()).unwrap();
        let loops = entropy_from_spectrum(&d, m).unwrap();
        assert!(
            (loops.entropy - transfer.entropy).abs() < 1e-9,
            "loops vs transfer: {family} ny={ny} nx={nx}"
        );

        let (n, edges, a) = doubled_graph(&graph);
        if edges.len() <= vbsee::oracle::ed::MAX_EDGES {
            let ed = vbs_cut_entropy(n, &edges, &a).unwrap();
            assert!(
                (ed.entropy - transfer.entropy).abs() < 1e-9,
                "ed vs transfer: {family} ny={ny} nx={nx}: {} vs {}",
                ed.entropy,
                transfer.entropy
            );
        }
    }
}

/// The ED oracle also covers bulk square lattices where the loop oracle is
/// out of scope (degree-4 moments).
#[test]
fn ed_covers_degree_four_bulk() {
    let graph = SymmetricGraph::square(2, 3).unwrap();
    assert!(loop_enumerate_z(&graph).is_err());
    let (n, edges, a) = doubled_graph(&graph);
    let ed = vbs_cut_entropy(n, &edges, &a).unwrap();
    let transfer = LadderEngine::new(LadderFamily::Square, 3).unwrap().entropy(2).unwrap();
    assert!(
        (ed.per_bond - transfer.per_bond).abs() < 1e-9,
        "ed {} vs transfer {}",
        ed.per_bond,
        transfer.per_bond
    );
    // and both sit on the published Table 3 value
    assert!((ed.per_bond - 0.6325619).abs() < 5e-8);
}

/// Vertical engine against the horizontal one at single-column geometry,
/// entropy level, through height 6.
#[test]
fn vertical_matches_horizontal_entropies() {
    for family in [LadderFamily::Square, LadderFamily::Hexagonal] {
        for size in 1..=6usize {
            let v = vertical_entropy(family, size).unwrap();
            let h = LadderEngine::new(family, size).unwrap().entropy(1).unwrap();
            assert!(
                (v.per_bond - h.per_bond).abs() < 1e-12,
                "{family} size {size}"
            );
        }
    }
}

/// Monte Carlo smoke agreement at moderate samples (fast variant of the
/// acceptance criterion, run on every test invocation).
#[test]
fn mc_agrees_with_exact_at_moderate_samples() {
    let cases = [
        (LadderFamily::Square, 2usize, 2usize, 2usize),
        (LadderFamily::Hexagonal, 4, 2, 1),
    ];
    for (family, ny, m, nx) in cases {
        let graph = match family {
            LadderFamily::Square => SymmetricGraph::square(nx, ny).unwrap(),
            LadderFamily::Hexagonal => SymmetricGraph::hexagonal(nx, ny).unwrap(),
        };
        let exact = LadderEngine::new(family, m).unwrap().entropy(nx).unwrap().entropy;
        let est = estimate_z(&graph, &McConfig::weighted(400_000, 16, 31415)).unwrap();
        let (s, err) = est.entropy_with_error().unwrap();
        assert!(
            (s.entropy - exact).abs() <= 4.0 * err.max(1e-4),
            "{family} ny={ny} nx={nx}: {} ± {err} vs {exact}",
            s.entropy
        );
    }
}

/// A hand-built custom graph run through the interchange format and the
/// engines that accept it: a 4-site star is out of the loop oracle's scope,
/// but the chain is fine and matches the ED oracle.
#[test]
fn custom_graph_through_json() {
    let chain = SymmetricGraph::custom(4, vec![(0, 1), (1, 2), (2, 3)], vec![0]);
    let json = serde_json::to_string(&chain.to_json()).unwrap();
    let parsed = SymmetricGraph::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
    assert_eq!(chain, parsed);
    assert!(parsed.validate().is_empty());

    let z = loop_enumerate_z(&parsed).unwrap();
    let d = eigvals_symmetric(&z.to_matrix()).unwrap();
    let s = entropy_from_spectrum(&d, 1).unwrap();
    // Single-cut chain: flat two-state spectrum, exactly ln 2.
    assert!((s.entropy - vbsee::LN_2).abs() < 1e-12);

    let (n, edges, a) = doubled_graph(&parsed);
    let ed = vbs_cut_entropy(n, &edges, &a).unwrap();
    assert!((ed.entropy - vbsee::LN_2).abs() < 1e-9);
}
