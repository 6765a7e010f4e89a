//! Doob h-transforms and the trickle-up samplers that realize them.
//!
//! The transform of a transition row by a nonnegative function h is
//! `P^{(h)}(i,j) = h(i)^{-1} P(i,j) h(j)` on `{h > 0}`; for harmonic h each
//! produced row is checked to sum to exactly 1.


use num::{One, Signed, Zero};
use rand::Rng;

use crate::boundary::BoundaryMeasure;
use crate::engine::Tree;
use crate::numeric::Rat;
use crate::routing::RoutingState;
use crate::substrate::{format_word, GraphKind, VertexId};
use crate::{Result, TrickleError};

/// Transform one transition row by h. `row` lists `(state, probability)`
/// successors of `from`. Errors when `h(from) = 0`; asserts exact row
/// normalization, which holds whenever h is harmonic at `from`.
pub fn h_transform<S: Clone>(
    row: &[(S, Rat)],
    from: &S,
    h: &dyn Fn(&S) -> Rat,
) -> Result<Vec<(S, Rat)>> {
    let h_from = h(from);
    if h_from.is_zero() {
        return Err(TrickleError::ZeroAtSource);
    }
    if h_from.is_negative() {
        return Err(TrickleError::InvalidParameter("h must be nonnegative".into()));
    }
    let mut out = Vec::new();
    let mut total = Rat::zero();
    for (state, p) in row {
        let w = p * h(state) / &h_from;
        if w.is_positive() {
            total += &w;
            out.push((state.clone(), w));
        }
    }
    assert!(
        total.is_one(),
        "h-transformed row does not sum to 1 (h is not harmonic at the source)"
    );
    Ok(out)
}

/// Transition law of the transform of the tree-growth chain of `model` by
/// a function of trees.
pub fn h_transform_tree_step(
    model: &crate::engine::ChainModel,
    s: &Tree,
    h: &dyn Fn(&Tree) -> Rat,
) -> Result<Vec<(Tree, Rat)>> {
    let x = crate::engine::tree_to_state(&model.kind, s)?;
    let mut row = Vec::new();
    for (succ, p) in crate::oracle::full_step_law(model, &x)? {
        row.push((crate::engine::state_to_tree(&model.kind, &succ)?, p));
    }
    h_transform(&row, s, h)
}

/// Transition law of the digital-search-tree chain driven by μ: the mass
/// on adjoining the external vertex u is the cylinder mass μ_u. Masses over
/// the external vertices sum to 1 when μ is a measure on infinite paths
/// with μ_u > 0 on the tree.
pub fn dst_transition(s: &Tree, mu: &BoundaryMeasure) -> Result<Vec<(VertexId, Rat)>> {
    for v in &s.vertices {
        if mu.mass_at(v)?.is_zero() {
            return Err(TrickleError::InvalidState(format!(
                "μ vanishes at the tree vertex {}",
                format_word(v)
            )));
        }
    }
    let mut out = Vec::new();
    let mut total = Rat::zero();
    for u in s.external_vertices(&GraphKind::BinaryTree) {
        let m = mu.mass_at(&u)?;
        total += &m;
        out.push((u, m));
    }
    if !mu.is_unkilled() || !total.is_one() {
        return Err(TrickleError::InvalidState(
            "dst transition needs an unkilled measure with full mass on the externals".into(),
        ));
    }
    Ok(out)
}

/// One trickle-up move of the BST h-transform: the boundary path `v`
/// (a word of length ≥ H+1) rises until blocked by `w` and settles at the
/// first vacant prefix.
pub fn trickle_up_bst(w: &Tree, v: &VertexId) -> Result<Tree> {
    // H = max{l : v_1..v_l ∈ w}, max ∅ = 0
    let mut h = 0usize;
    for l in 1..=v.depth() {
        if w.contains(&VertexId(v.0[..l].to_vec())) {
            h = l;
        } else {
            break;
        }
    }
    if v.depth() < h + 1 {
        return Err(TrickleError::DepthInsufficient { have: v.depth(), need: h + 1 });
    }
    let mut grown = w.clone();
    grown.insert(VertexId(v.0[..h + 1].to_vec()));
    Ok(grown)
}

/// One trickle-up move of the Harris-Ulam h-transform: the killed path `v`
/// rises until blocked, then is inserted as the next new child.
pub fn trickle_up_harris_ulam(w: &Tree, v: &crate::boundary::KilledPath) -> Tree {
    // H = max{h : v_1..v_h ∈ w}
    let mut h = 0usize;
    for l in 1..=v.prefix.depth() {
        if w.contains(&VertexId(v.prefix.0[..l].to_vec())) {
            h = l;
        } else {
            break;
        }
    }
    let base = VertexId(v.prefix.0[..h].to_vec());
    // M = max{m : base + m ∈ w}
    let mut m = 0u32;
    while w.contains(&base.child(m + 1)) {
        m += 1;
    }
    let mut grown = w.clone();
    grown.insert(base.child(m + 1));
    grown
}

/// One step of the h-transformed CRP block-size chain: a draw v from the
/// ρ-law grows block v when it exists, and opens a new block otherwise
/// (v = ∞ always opens one).
pub fn crp_htransform_step(a: &RoutingState, v: Option<u64>) -> RoutingState {
    let m = a.block_count() as u64;
    match v {
        Some(k) if k >= 1 && k <= m => a.bump(k as usize - 1),
        _ => a.bump(m as usize),
    }
}

/// Sample the ρ-law over `[M] ∪ {∞}` by exact rational inversion.
pub fn sample_rho_draw<R: Rng>(rho: &[Rat], rng: &mut R) -> Option<u64> {
    let u = Rat::new(rng.gen::<u64>().into(), num::BigInt::one() << 64u16);
    let mut acc = Rat::zero();
    for (k, r) in rho.iter().enumerate() {
        acc += r;
        if u < acc {
            return Some(k as u64 + 1);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::KilledPath;
    use crate::engine::ChainModel;
    use crate::kernels::bst_extended_kernel;
    use crate::numeric::{rat, rat_int};
    use crate::routing::RoutingChainSpec;

    fn bst_model() -> ChainModel {
        ChainModel::new(
            GraphKind::BinaryTree,
            RoutingChainSpec::DirichletUrn { nu: vec![rat_int(1), rat_int(1)] },
        )
        .unwrap()
    }

    #[test]
    fn identity_h_leaves_rows_unchanged() {
        let model = bst_model();
        let s = Tree::from_words(&["e", "0"]);
        let row = h_transform_tree_step(&model, &s, &|_| Rat::one()).unwrap();
        for (_, p) in &row {
            assert_eq!(p, &rat(1, 3));
        }
        assert_eq!(row.len(), 3);
    }

    #[test]
    fn bst_with_fair_kernel_becomes_dst() {
        let model = bst_model();
        let mu = BoundaryMeasure::fair(7);
        let h = |t: &Tree| bst_extended_kernel(t, &mu).unwrap();
        for s in crate::oracle::enumerate_trees(&GraphKind::BinaryTree, 5, None).unwrap() {
            let row = h_transform_tree_step(&model, &s, &h).unwrap();
            for (t, p) in &row {
                let new: Vec<_> = t.vertices.difference(&s.vertices).collect();
                assert_eq!(new.len(), 1);
                assert_eq!(p, &rat(1, 1 << new[0].depth() as i64), "transition mass 2^-|u|");
            }
            // matches dst_transition entry by entry
            let dst = dst_transition(&s, &mu).unwrap();
            assert_eq!(dst.len(), row.len());
            for (u, p) in dst {
                let mut t = s.clone();
                t.insert(u);
                let q = row.iter().find(|(tt, _)| tt == &t).map(|(_, q)| q.clone());
                assert_eq!(q, Some(p));
            }
        }
    }

    #[test]
    fn dst_transition_examples() {
        let mu = BoundaryMeasure::fair(5);
        let row = dst_transition(&Tree::root_only(), &mu).unwrap();
        assert_eq!(
            row,
            vec![
                (VertexId::from_binary("0"), rat(1, 2)),
                (VertexId::from_binary("1"), rat(1, 2)),
            ]
        );
        let row = dst_transition(&Tree::from_words(&["e", "0"]), &mu).unwrap();
        assert_eq!(
            row,
            vec![
                (VertexId::from_binary("00"), rat(1, 4)),
                (VertexId::from_binary("01"), rat(1, 4)),
                (VertexId::from_binary("1"), rat(1, 2)),
            ]
        );
    }

    #[test]
    fn general_measure_dst_transition() {
        // splits 1/3 left at the root, fair below
        let mut mu = |u: &VertexId| if u.is_root() { rat(1, 3) } else { rat(1, 2) };
        let mu = BoundaryMeasure::from_binary_splits(4, &mut mu).unwrap();
        let row = dst_transition(&Tree::root_only(), &mu).unwrap();
        assert_eq!(
            row,
            vec![
                (VertexId::from_binary("0"), rat(1, 3)),
                (VertexId::from_binary("1"), rat(2, 3)),
            ]
        );
    }

    #[test]
    fn h_transform_zero_source_errors() {
        let row = vec![(1u32, Rat::one())];
        assert!(matches!(
            h_transform(&row, &0u32, &|_| Rat::zero()),
            Err(TrickleError::ZeroAtSource)
        ));
    }

    #[test]
    fn mallows_urn_transform_is_deterministic_path() {
        // h = kernel at Finite(2) makes the path (0,0),(1,0),(2,0),(2,1),...
        use crate::kernels::{mallows_urn_kernel, UrnBoundaryPoint};
        let p = rat(1, 3);
        let spec = RoutingChainSpec::MallowsUrn { p: p.clone() };
        let h = |s: &RoutingState| {
            mallows_urn_kernel((s.get(0), s.get(1)), UrnBoundaryPoint::Finite(2), &p)
        };
        let mut at = RoutingState::zero();
        let mut seen = vec![(at.get(0), at.get(1))];
        for _ in 0..50 {
            let row: Vec<(RoutingState, Rat)> = spec
                .transitions(&at)
                .unwrap()
                .into_iter()
                .map(|(slot, q)| (at.bump(slot), q))
                .collect();
            let transformed = h_transform(&row, &at, &h).unwrap();
            assert_eq!(transformed.len(), 1, "deterministic path");
            assert!(transformed[0].1.is_one());
            at = transformed[0].0.clone();
            seen.push((at.get(0), at.get(1)));
        }
        assert_eq!(&seen[..4], &[(0, 0), (1, 0), (2, 0), (2, 1)]);
        assert_eq!(seen[50], (2, 49));
    }

    #[test]
    fn qbinomial_urn_transform_deterministic_at_infinity() {
        use crate::kernels::{qbinomial_urn_kernel, UrnBoundaryPoint};
        let (q, r) = (rat(1, 2), rat(1, 2));
        let spec = RoutingChainSpec::QBinomialUrn { q: q.clone(), r: r.clone() };
        let h = |s: &RoutingState| {
            qbinomial_urn_kernel((s.get(0), s.get(1)), UrnBoundaryPoint::Infinity, &q, &r)
        };
        let mut at = RoutingState::zero();
        for i in 0..50u64 {
            assert_eq!((at.get(0), at.get(1)), (i, 0));
            let row: Vec<(RoutingState, Rat)> = spec
                .transitions(&at)
                .unwrap()
                .into_iter()
                .map(|(slot, w)| (at.bump(slot), w))
                .collect();
            let transformed = h_transform(&row, &at, &h).unwrap();
            assert_eq!(transformed.len(), 1);
            at = transformed[0].0.clone();
        }
    }

    #[test]
    fn trickle_up_bst_examples() {
        let w = Tree::root_only();
        let v = VertexId::from_binary("0111");
        assert_eq!(
            trickle_up_bst(&w, &v).unwrap(),
            Tree::from_words(&["e", "0"])
        );
        let w = Tree::from_words(&["e", "0", "1"]);
        let v = VertexId::from_binary("01");
        assert_eq!(
            trickle_up_bst(&w, &v).unwrap(),
            Tree::from_words(&["e", "0", "1", "01"])
        );
        let w = Tree::from_words(&["e", "1"]);
        let v = VertexId::from_binary("0");
        assert_eq!(
            trickle_up_bst(&w, &v).unwrap(),
            Tree::from_words(&["e", "0", "1"])
        );
        // too-short paths error
        let w = Tree::from_words(&["e", "0"]);
        assert!(trickle_up_bst(&w, &VertexId::from_binary("0")).is_err());
    }

    #[test]
    fn trickle_up_harris_ulam_examples() {
        // point mass at the all-killed path grows the root's children
        let mut w = Tree::root_only();
        let dead = KilledPath { prefix: VertexId::root(), killed: true };
        for n in 1..=5u32 {
            w = trickle_up_harris_ulam(&w, &dead);
            let want: Vec<String> =
                (1..=n).map(|k| k.to_string()).collect();
            let mut expect = Tree::root_only();
            for s in &want {
                expect.insert(crate::substrate::parse_word(s).unwrap());
            }
            assert_eq!(w, expect, "step {n}");
        }

        let w = Tree::from_words(&["e", "1"]);
        let v = KilledPath { prefix: VertexId(vec![1]), killed: true };
        assert_eq!(
            trickle_up_harris_ulam(&w, &v),
            Tree::from_words(&["e", "1", "11"])
        );

        let w = Tree::root_only();
        let v = KilledPath { prefix: VertexId(vec![2, 1, 1]), killed: false };
        assert_eq!(
            trickle_up_harris_ulam(&w, &v),
            Tree::from_words(&["e", "1"])
        );
    }

    #[test]
    fn crp_htransform_step_examples() {
        assert_eq!(
            crp_htransform_step(&RoutingState(vec![3]), Some(1)),
            RoutingState(vec![4])
        );
        assert_eq!(
            crp_htransform_step(&RoutingState(vec![3]), None),
            RoutingState(vec![3, 1])
        );
        assert_eq!(
            crp_htransform_step(&RoutingState(vec![2, 1]), Some(2)),
            RoutingState(vec![2, 2])
        );
        // a draw beyond the block count opens a new block
        assert_eq!(
            crp_htransform_step(&RoutingState(vec![2, 1]), Some(3)),
            RoutingState(vec![2, 1, 1])
        );
    }

    #[test]
    fn rho_draw_frequencies() {
        use rand::SeedableRng;
        let rho = vec![rat(1, 2), rat(1, 4)];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let n = 40_000;
        let mut counts = [0u64; 3];
        for _ in 0..n {
            match sample_rho_draw(&rho, &mut rng) {
                Some(1) => counts[0] += 1,
                Some(2) => counts[1] += 1,
                None => counts[2] += 1,
                _ => unreachable!(),
            }
        }
        let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        for (f, want) in freqs.iter().zip([0.5, 0.25, 0.25]) {
            assert!((f - want).abs() < 4.0 * (want * (1.0 - want) / n as f64).sqrt());
        }
    }
}
