//! Brute-force exact-rational reference computations.
//!
//! Everything here works straight from the one-step transition law and
//! never calls the closed-form hitting/kernel routines it is used to
//! validate. The full-chain distribution is a forward dynamic program over
//! [`TrickleState`]s; hitting probabilities are computed two ways (a
//! per-vertex path DP multiplied out, and a full-chain DP) and asserted
//! equal on every call.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::engine::{state_to_tree, ChainModel, Tree, TrickleState};
use crate::numeric::Rat;
use crate::routing::RoutingState;
use crate::substrate::{GraphKind, VertexId};
use crate::{Result, TrickleError};

/// Default cap on the number of states an enumeration may touch.
pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

/// Budget override: explicit value, else the `TRICKLE_BUDGET` environment
/// variable, else the default.
pub fn state_budget(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| {
            std::env::var("TRICKLE_BUDGET")
                .ok()
                .and_then(|v| v.parse::<f64>().ok())
                .map(|v| v as usize)
        })
        .unwrap_or(DEFAULT_STATE_BUDGET)
}

/// One-step law of the full chain from `state`: successor states with
/// exact probabilities (the particle's trickle path is integrated out).
pub fn full_step_law(
    model: &ChainModel,
    state: &TrickleState,
) -> Result<Vec<(TrickleState, Rat)>> {
    let mut out: BTreeMap<TrickleState, Rat> = BTreeMap::new();
    let mut stack = vec![(state.clone(), VertexId::root(), Rat::one())];
    while let Some((st, at, prob)) = stack.pop() {
        let xi = st.routing(&at);
        for (slot, p) in model.spec.transitions(&xi)? {
            let child = model.kind.child_at(&at, slot);
            let child_occupied = st.is_occupied(&model.kind, &child);
            let mut next = st.clone();
            let entry = next.per_vertex.entry(at.clone()).or_default();
            if entry.0.len() <= slot {
                entry.0.resize(slot + 1, 0);
            }
            entry.0[slot] += 1;
            let q = &prob * p;
            if child_occupied {
                stack.push((next, child, q));
            } else {
                *out.entry(next).or_insert_with(Rat::zero) += q;
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Exact distribution of the chain at time `n` started from the root-only
/// state: support and masses, summing to exactly 1.
pub fn exact_distribution(
    model: &ChainModel,
    n: u64,
    budget: Option<usize>,
) -> Result<BTreeMap<TrickleState, Rat>> {
    let budget = state_budget(budget);
    let mut dist: BTreeMap<TrickleState, Rat> = BTreeMap::new();
    dist.insert(TrickleState::initial(), Rat::one());
    for _ in 0..n {
        let mut next: BTreeMap<TrickleState, Rat> = BTreeMap::new();
        for (state, mass) in &dist {
            for (succ, p) in full_step_law(model, state)? {
                *next.entry(succ).or_insert_with(Rat::zero) += mass * p;
            }
            if next.len() > budget {
                return Err(TrickleError::BudgetExceeded(format!(
                    "distribution support exceeded {budget} states"
                )));
            }
        }
        dist = next;
    }
    debug_assert!(dist.values().sum::<Rat>().is_one());
    Ok(dist)
}

/// Same distribution keyed by occupied tree (tree substrates only).
pub fn exact_tree_distribution(
    model: &ChainModel,
    n: u64,
    budget: Option<usize>,
) -> Result<BTreeMap<Tree, Rat>> {
    let dist = exact_distribution(model, n, budget)?;
    let mut out = BTreeMap::new();
    for (state, mass) in dist {
        let t = state_to_tree(&model.kind, &state)?;
        *out.entry(t).or_insert_with(Rat::zero) += mass;
    }
    Ok(out)
}

/// Per-vertex hitting probability by lattice-path DP over the routing
/// chain's transition law (independent of the closed forms).
pub fn routing_hit_dp(model: &ChainModel, xi: &RoutingState, zeta: &RoutingState) -> Result<Rat> {
    if !xi.leq(zeta) {
        return Ok(Rat::zero());
    }
    let mut layer: BTreeMap<RoutingState, Rat> = BTreeMap::new();
    layer.insert(xi.clone(), Rat::one());
    for _ in xi.size()..zeta.size() {
        let mut next: BTreeMap<RoutingState, Rat> = BTreeMap::new();
        for (s, mass) in &layer {
            if !model.spec.state_valid(s) {
                continue;
            }
            for (slot, p) in model.spec.transitions(s)? {
                let t = s.bump(slot);
                if t.leq(zeta) {
                    *next.entry(t).or_insert_with(Rat::zero) += mass * p;
                }
            }
        }
        layer = next;
    }
    Ok(layer.remove(zeta).unwrap_or_else(Rat::zero))
}

/// Full-chain hitting probability `P^x{X hits y}`, computed two ways and
/// asserted equal: (i) the product over vertices of per-vertex hitting
/// probabilities, (ii) a forward DP on the full chain pruned to states
/// below `y`.
pub fn exact_hit_probability(
    model: &ChainModel,
    x: &TrickleState,
    y: &TrickleState,
    budget: Option<usize>,
) -> Result<Rat> {
    let budget = state_budget(budget);
    if !x.leq(y) {
        return Ok(Rat::zero());
    }

    // (i) product of per-vertex hits over vertices where y is nonzero
    let mut product = Rat::one();
    for (u, zeta) in &y.per_vertex {
        let xi = x.routing(u);
        product *= routing_hit_dp(model, &xi, zeta)?;
        if product.is_zero() {
            break;
        }
    }

    // (ii) forward DP on the full chain
    let steps = y.time() - x.time();
    let mut layer: BTreeMap<TrickleState, Rat> = BTreeMap::new();
    layer.insert(x.clone(), Rat::one());
    for _ in 0..steps {
        let mut next: BTreeMap<TrickleState, Rat> = BTreeMap::new();
        for (state, mass) in &layer {
            for (succ, p) in full_step_law(model, state)? {
                if succ.leq(y) {
                    *next.entry(succ).or_insert_with(Rat::zero) += mass * p;
                }
            }
            if next.len() > budget {
                return Err(TrickleError::BudgetExceeded(format!(
                    "hit DP support exceeded {budget} states"
                )));
            }
        }
        layer = next;
    }
    let dp = layer.remove(y).unwrap_or_else(Rat::zero);

    assert_eq!(
        product, dp,
        "per-vertex product and full-chain DP disagree for x={x:?}, y={y:?}"
    );
    Ok(dp)
}

/// All rooted trees with `n` vertices for a tree substrate, exhaustively
/// and duplicate-free (grown by external vertices).
pub fn enumerate_trees(kind: &GraphKind, n: usize, budget: Option<usize>) -> Result<Vec<Tree>> {
    if !kind.is_tree() {
        return Err(TrickleError::InvalidState(
            "tree enumeration needs a tree substrate".into(),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let budget = state_budget(budget);
    let mut layer: std::collections::BTreeSet<Tree> = [Tree::root_only()].into_iter().collect();
    for _ in 1..n {
        let mut next = std::collections::BTreeSet::new();
        for t in &layer {
            for v in t.external_vertices(kind) {
                let mut grown = t.clone();
                grown.insert(v);
                next.insert(grown);
                if next.len() > budget {
                    return Err(TrickleError::BudgetExceeded(format!(
                        "tree enumeration exceeded {budget} trees"
                    )));
                }
            }
        }
        layer = next;
    }
    Ok(layer.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::tree_to_state;
    use crate::numeric::{catalan_number, rat, rat_int};
    use crate::routing::RoutingChainSpec;

    fn bst_model() -> ChainModel {
        ChainModel::new(
            GraphKind::BinaryTree,
            RoutingChainSpec::DirichletUrn { nu: vec![rat_int(1), rat_int(1)] },
        )
        .unwrap()
    }

    #[test]
    fn distribution_at_zero_is_point_mass() {
        let model = bst_model();
        let dist = exact_distribution(&model, 0, None).unwrap();
        assert_eq!(dist.len(), 1);
        assert_eq!(dist[&TrickleState::initial()], rat_int(1));
    }

    #[test]
    fn bst_distribution_matches_subtree_product() {
        let model = bst_model();
        for n in 2..=5u64 {
            let dist = exact_tree_distribution(&model, n, None).unwrap();
            let total: Rat = dist.values().sum();
            assert!(total.is_one());
            for (t, mass) in &dist {
                let mut want = Rat::one();
                for u in &t.vertices {
                    want /= rat_int(t.subtree_count(u) as i64);
                }
                assert_eq!(mass, &want, "tree {}", t.serialize());
            }
        }
    }

    #[test]
    fn bst_balanced_tree_mass_at_two() {
        let model = bst_model();
        let dist = exact_tree_distribution(&model, 2, None).unwrap();
        let t = Tree::from_words(&["e", "0", "1"]);
        assert_eq!(dist[&t], rat(1, 3));
    }

    #[test]
    fn catalan_distribution_uniform() {
        let model = ChainModel::new(GraphKind::BinaryTree, RoutingChainSpec::CatalanUrn).unwrap();
        for n in 1..=5u64 {
            let dist = exact_tree_distribution(&model, n, None).unwrap();
            let c = catalan_number(n + 1);
            assert_eq!(dist.len().to_string(), c.to_string());
            let want = Rat::new(1.into(), c);
            for mass in dist.values() {
                assert_eq!(mass, &want);
            }
        }
    }

    #[test]
    fn composition_distribution_uniform() {
        let model =
            ChainModel::new(GraphKind::BinaryTree, RoutingChainSpec::SingleTrailHalf).unwrap();
        for n in 1..=8u64 {
            let dist = exact_distribution(&model, n, None).unwrap();
            assert_eq!(dist.len(), 1 << n);
            for mass in dist.values() {
                assert_eq!(mass, &rat(1, 1 << n));
            }
        }
    }

    #[test]
    fn hit_probability_root_to_tree_is_subtree_product() {
        let model = bst_model();
        let x = TrickleState::initial();
        for t in enumerate_trees(&GraphKind::BinaryTree, 4, None).unwrap() {
            let y = tree_to_state(&GraphKind::BinaryTree, &t).unwrap();
            let got = exact_hit_probability(&model, &x, &y, None).unwrap();
            let mut want = Rat::one();
            for u in &t.vertices {
                want /= rat_int(t.subtree_count(u) as i64);
            }
            assert_eq!(got, want);
        }
    }

    #[test]
    fn hit_probability_examples() {
        let model = bst_model();
        let kind = GraphKind::BinaryTree;
        let s = tree_to_state(&kind, &Tree::from_words(&["e", "0"])).unwrap();
        let t = tree_to_state(&kind, &Tree::from_words(&["e", "0", "1"])).unwrap();
        assert_eq!(exact_hit_probability(&model, &s, &t, None).unwrap(), rat(1, 3));
        // incomparable states hit with probability 0
        let u = tree_to_state(&kind, &Tree::from_words(&["e", "1", "11"])).unwrap();
        assert_eq!(exact_hit_probability(&model, &s, &u, None).unwrap(), rat_int(0));
    }

    #[test]
    fn enumerate_binary_trees_counts() {
        let kind = GraphKind::BinaryTree;
        assert_eq!(enumerate_trees(&kind, 1, None).unwrap().len(), 1);
        assert_eq!(enumerate_trees(&kind, 3, None).unwrap().len(), 5);
        assert_eq!(enumerate_trees(&kind, 4, None).unwrap().len(), 14);
    }

    #[test]
    fn enumerate_harris_ulam_trees_counts() {
        // plane-tree counts: C_{n-1}
        let kind = GraphKind::HarrisUlam(None);
        assert_eq!(enumerate_trees(&kind, 4, None).unwrap().len(), 5);
        let capped = GraphKind::HarrisUlam(Some(2));
        for t in enumerate_trees(&capped, 4, None).unwrap() {
            assert!(t.valid_for(&capped));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let model = bst_model();
        let err = exact_distribution(&model, 6, Some(10)).unwrap_err();
        assert!(matches!(err, TrickleError::BudgetExceeded(_)));
    }

    #[test]
    fn grid_distribution_sums_to_one() {
        let model = ChainModel::new(
            GraphKind::Grid2D,
            RoutingChainSpec::BernoulliWalk { p: vec![rat(1, 2), rat(1, 2)] },
        )
        .unwrap();
        let dist = exact_distribution(&model, 4, None).unwrap();
        let total: Rat = dist.values().sum();
        assert!(total.is_one());
        for state in dist.keys() {
            assert!(state.consistent(&GraphKind::Grid2D));
        }
    }
}
