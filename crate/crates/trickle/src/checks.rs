//! Named verification suites: exact-equality checks of closed forms
//! against the brute-force oracle, exact harmonicity checks, and the
//! Monte-Carlo statistics suite. The CLI `verify` command and the
//! acceptance test target both run these.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::boundary::{
    recover_labeling, AdmissibleLabeling,
    BoundaryMeasure,
};
use crate::engine::{
    replica_seed, state_to_tree, tree_to_state, ChainModel, Tree, Trickler, TrickleState,
};
use crate::kernels::{
    bst_extended_kernel, crp_block_kernel, crp_extended_kernel,
    mallows_tree_kernel, mallows_urn_kernel, prefix_chain_kernel, product_martin_kernel,
    qbinomial_urn_kernel, verify_perfect_memory, MallowsTarget, SpineTree, UrnBoundaryPoint,
};
use crate::numeric::{catalan_number, rat, rat_int, rat_to_f64, Rat};
use crate::oracle::{
    enumerate_trees, exact_tree_distribution, full_step_law, routing_hit_dp,
};
use crate::routing::{
    catalan_hit, gaussian_binomial, RoutingChainSpec, RoutingState,
};
use crate::stats::{
    chi_square_quantile, chi_square_statistic, ks_critical, ks_statistic, within_z,
};
use crate::substrate::{GraphKind, VertexId};
use crate::transforms::{dst_transition, h_transform_tree_step, trickle_up_bst};

type Check = std::result::Result<(), String>;

fn fail(msg: impl Into<String>) -> Check {
    Err(msg.into())
}

fn bst_model() -> ChainModel {
    ChainModel::new(
        GraphKind::BinaryTree,
        RoutingChainSpec::DirichletUrn { nu: vec![rat_int(1), rat_int(1)] },
    )
    .expect("valid model")
}

// ---------------------------------------------------------------------------
// 1. BST law
// ---------------------------------------------------------------------------

/// Exact distribution at times n ≤ `max_n` equals `Π_u (#t(u))^{-1}`.
pub fn check_bst_law(max_n: u64) -> Check {
    let model = bst_model();
    for n in 0..=max_n {
        let dist = exact_tree_distribution(&model, n, None).map_err(|e| e.to_string())?;
        let total: Rat = dist.values().sum();
        if !total.is_one() {
            return fail(format!("masses at n={n} sum to {total}"));
        }
        for (t, mass) in &dist {
            let mut want = Rat::one();
            for u in &t.vertices {
                want /= rat_int(t.subtree_count(u) as i64);
            }
            if mass != &want {
                return fail(format!("tree {} has mass {mass}, want {want}", t.serialize()));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 2. Catalan uniformity
// ---------------------------------------------------------------------------

/// Uniformity `1/C_{n+1}` for n ≤ `max_n`, and the urn marginals
/// `Q^n((0,0),(k,n-k)) = C_k C_{n-k} / C_{n+1}` for n ≤ `marginal_n`.
pub fn check_catalan_uniformity(max_n: u64, marginal_n: u64) -> Check {
    let model =
        ChainModel::new(GraphKind::BinaryTree, RoutingChainSpec::CatalanUrn).expect("model");
    for n in 0..=max_n {
        let dist = exact_tree_distribution(&model, n, None).map_err(|e| e.to_string())?;
        let c = catalan_number(n + 1);
        if dist.len().to_string() != c.to_string() {
            return fail(format!("support at n={n} has {} trees, want {c}", dist.len()));
        }
        let want = Rat::new(1.into(), c);
        for (t, mass) in &dist {
            if mass != &want {
                return fail(format!("tree {} has mass {mass}, want {want}", t.serialize()));
            }
        }
    }
    for n in 1..=marginal_n {
        for k in 0..=n {
            let want = Rat::new(
                catalan_number(k) * catalan_number(n - k),
                catalan_number(n + 1),
            );
            let got = catalan_hit((0, 0), (k, n - k));
            if got != want {
                return fail(format!("urn marginal at n={n}, k={k}: {got} want {want}"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 3. Product kernel vs oracle
// ---------------------------------------------------------------------------

/// States reachable with at most `max_particles` particles, grouped by time.
fn states_by_time(model: &ChainModel, max_particles: u64) -> Result<Vec<Vec<TrickleState>>, String> {
    let mut layers = vec![vec![TrickleState::initial()]];
    for _ in 1..max_particles {
        let mut next: std::collections::BTreeSet<TrickleState> = Default::default();
        for s in layers.last().expect("nonempty") {
            for (succ, _) in full_step_law(model, s).map_err(|e| e.to_string())? {
                next.insert(succ);
            }
        }
        layers.push(next.into_iter().collect());
    }
    Ok(layers)
}

/// For one family: on every pair x ⪯ y with at most `max_particles`
/// particles, the closed-form product kernel equals the oracle hitting
/// ratio, where the oracle hit is computed both as a full-chain DP and as
/// a product of per-vertex DPs (asserted equal).
pub fn check_product_kernel_family(model: &ChainModel, max_particles: u64) -> Check {
    let layers = states_by_time(model, max_particles)?;
    let all: Vec<&TrickleState> = layers.iter().flatten().collect();
    for y in &all {
        // backward full-chain DP over the lattice {x : x ⪯ y}
        let mut hit: BTreeMap<&TrickleState, Rat> = BTreeMap::new();
        hit.insert(y, Rat::one());
        let y_time = y.time();
        for t in (0..y_time).rev() {
            for x in &layers[t as usize] {
                if !x.leq(y) {
                    continue;
                }
                let mut acc = Rat::zero();
                for (succ, p) in full_step_law(model, x).map_err(|e| e.to_string())? {
                    if let Some(h) = hit.get(&succ) {
                        acc += p * h;
                    }
                }
                hit.insert(x, acc);
            }
        }
        let from_root = hit
            .get(&TrickleState::initial())
            .cloned()
            .unwrap_or_else(Rat::zero);
        if from_root.is_zero() {
            return fail(format!("state {y:?} unreachable from the root"));
        }
        for x in &all {
            if x.time() > y_time {
                continue;
            }
            let dp = if x.leq(y) {
                hit.get(*x).cloned().unwrap_or_else(Rat::zero)
            } else {
                Rat::zero()
            };
            // independent per-vertex product route
            let mut product = Rat::one();
            for (u, zeta) in &y.per_vertex {
                product *= routing_hit_dp(model, &x.routing(u), zeta).map_err(|e| e.to_string())?;
                if product.is_zero() {
                    break;
                }
            }
            if !x.leq(y) {
                product = Rat::zero();
            }
            if dp != product {
                return fail(format!(
                    "oracle routes disagree at x={x:?}, y={y:?}: dp={dp} product={product}"
                ));
            }
            let want = dp / &from_root;
            let got = product_martin_kernel(model, x, y);
            if got != want {
                return fail(format!(
                    "kernel mismatch at x={x:?}, y={y:?}: got {got}, oracle ratio {want}"
                ));
            }
        }
    }
    Ok(())
}

/// The family list exercised by the product-kernel criterion.
pub fn kernel_families() -> Vec<(String, ChainModel, u64)> {
    vec![
        ("bst".into(), bst_model(), 7),
        (
            "dirichlet(1/2,2)".into(),
            ChainModel::new(
                GraphKind::BinaryTree,
                RoutingChainSpec::DirichletUrn { nu: vec![rat(1, 2), rat_int(2)] },
            )
            .expect("model"),
            7,
        ),
        (
            "bernoulli-grid(1/3,2/3)".into(),
            ChainModel::new(
                GraphKind::Grid2D,
                RoutingChainSpec::BernoulliWalk { p: vec![rat(1, 3), rat(2, 3)] },
            )
            .expect("model"),
            7,
        ),
        (
            "crp(0,1)".into(),
            ChainModel::new(
                GraphKind::HarrisUlam(None),
                RoutingChainSpec::CrpBlocks { alpha: rat(0, 1), theta: rat_int(1) },
            )
            .expect("model"),
            7,
        ),
        (
            "mallows(1/3)".into(),
            ChainModel::new(
                GraphKind::BinaryTree,
                RoutingChainSpec::MallowsUrn { p: rat(1, 3) },
            )
            .expect("model"),
            7,
        ),
        (
            "qbinomial(1/2,1/2)".into(),
            ChainModel::new(
                GraphKind::BinaryTree,
                RoutingChainSpec::QBinomialUrn { q: rat(1, 2), r: rat(1, 2) },
            )
            .expect("model"),
            7,
        ),
        (
            "catalan".into(),
            ChainModel::new(GraphKind::BinaryTree, RoutingChainSpec::CatalanUrn).expect("model"),
            7,
        ),
        (
            "composition".into(),
            ChainModel::new(GraphKind::BinaryTree, RoutingChainSpec::SingleTrailHalf)
                .expect("model"),
            7,
        ),
    ]
}

pub fn check_product_kernels() -> Check {
    let results: Vec<Check> = kernel_families()
        .into_par_iter()
        .map(|(name, model, size)| {
            check_product_kernel_family(&model, size).map_err(|e| format!("[{name}] {e}"))
        })
        .collect();
    for r in results {
        r?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 4. DST as h-transform
// ---------------------------------------------------------------------------

/// h-transforming the BST chain by the fair-measure kernel yields the
/// 2^{-|u|} transition law, entry by entry, on all trees with at most
/// `max_vertices` vertices.
pub fn check_dst_h_transform(max_vertices: usize) -> Check {
    let model = bst_model();
    let mu = BoundaryMeasure::fair(max_vertices + 2);
    let h = |t: &Tree| bst_extended_kernel(t, &mu).expect("depth suffices");
    for size in 1..=max_vertices {
        for s in enumerate_trees(&GraphKind::BinaryTree, size, None).map_err(|e| e.to_string())? {
            let row = h_transform_tree_step(&model, &s, &h).map_err(|e| e.to_string())?;
            let dst = dst_transition(&s, &mu).map_err(|e| e.to_string())?;
            if row.len() != dst.len() {
                return fail(format!("row sizes differ at {}", s.serialize()));
            }
            for (u, p) in dst {
                if p != rat(1, 1 << u.depth()) {
                    return fail(format!("dst mass at {u:?} is {p}"));
                }
                let mut t = s.clone();
                t.insert(u.clone());
                match row.iter().find(|(tt, _)| tt == &t) {
                    Some((_, q)) if *q == p => {}
                    other => {
                        return fail(format!(
                            "transform at {} -> {u:?}: {other:?} want {p}",
                            s.serialize()
                        ))
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 5. Harmonicity of extended kernels
// ---------------------------------------------------------------------------

pub fn check_harmonicity() -> Check {
    check_bst_harmonicity()?;
    check_crp_harmonicity()?;
    check_urn_harmonicity()?;
    check_mallows_tree_harmonicity()
}

/// BST extended kernels are harmonic for rational boundary measures.
fn check_bst_harmonicity() -> Check {
    let mut seed_rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut measures = vec![BoundaryMeasure::fair(6)];
    // dyadic random measures
    for _ in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_rng.gen());
        let mut split = |_: &VertexId| rat(rng.gen_range(1..16), 16);
        measures.push(
            BoundaryMeasure::from_binary_splits(6, &mut split).map_err(|e| e.to_string())?,
        );
    }
    let kind = GraphKind::BinaryTree;
    for mu in &measures {
        for size in 1..=5usize {
            for s in enumerate_trees(&kind, size, None).map_err(|e| e.to_string())? {
                if s.depth() + 1 >= mu.depth {
                    continue;
                }
                let h_s = bst_extended_kernel(&s, mu).map_err(|e| e.to_string())?;
                let ext = s.external_vertices(&kind);
                let mut lhs = Rat::zero();
                for v in &ext {
                    let mut t = s.clone();
                    t.insert(v.clone());
                    lhs += bst_extended_kernel(&t, mu).map_err(|e| e.to_string())?
                        / rat_int(ext.len() as i64);
                }
                if lhs != h_s {
                    return fail(format!("bst harmonicity fails at {}", s.serialize()));
                }
            }
        }
    }
    Ok(())
}

/// CRP extended kernels are harmonic at each admissible parameter pair.
fn check_crp_harmonicity() -> Check {
    let cases = [
        (rat(0, 1), rat_int(1), vec![rat(1, 2), rat(1, 4)]),
        (rat(1, 2), rat(1, 2), vec![rat(1, 3), rat(1, 3), rat(1, 6)]),
        (rat(-1, 2), rat_int(1), vec![rat(2, 3), rat(1, 3)]),
        (rat(1, 3), rat_int(2), vec![rat(1, 5), Rat::zero(), rat(1, 5)]),
    ];
    for (alpha, theta, rho) in cases {
        let spec = RoutingChainSpec::CrpBlocks { alpha: alpha.clone(), theta: theta.clone() };
        let mut frontier = vec![RoutingState::zero()];
        let mut seen = std::collections::BTreeSet::new();
        while let Some(a) = frontier.pop() {
            if a.size() > 6 || !seen.insert(a.clone()) {
                continue;
            }
            if !a.is_zero() {
                let h = crp_extended_kernel(&a.0, &rho, &alpha, &theta)
                    .map_err(|e| e.to_string())?;
                if h.is_positive() {
                    let mut lhs = Rat::zero();
                    for (slot, p) in spec.transitions(&a).map_err(|e| e.to_string())? {
                        let b = a.bump(slot);
                        lhs += p
                            * crp_extended_kernel(&b.0, &rho, &alpha, &theta)
                                .map_err(|e| e.to_string())?;
                    }
                    if lhs != h {
                        return fail(format!(
                            "crp harmonicity fails at {a:?} (α={alpha}, θ={theta})"
                        ));
                    }
                }
            }
            for (slot, _) in spec.transitions(&a).map_err(|e| e.to_string())? {
                frontier.push(a.bump(slot));
            }
        }
    }
    Ok(())
}

/// Mallows and q-binomial urn kernels are harmonic at every boundary point.
fn check_urn_harmonicity() -> Check {
    let p = rat(1, 3);
    let mallows = RoutingChainSpec::MallowsUrn { p: p.clone() };
    let (q, r) = (rat(1, 2), rat(1, 2));
    let qbin = RoutingChainSpec::QBinomialUrn { q: q.clone(), r: r.clone() };
    let targets = [
        UrnBoundaryPoint::Finite(0),
        UrnBoundaryPoint::Finite(3),
        UrnBoundaryPoint::Finite(7),
        UrnBoundaryPoint::Infinity,
    ];
    for target in targets {
        for i in 0..8u64 {
            for j in 0..8u64 {
                let xi = RoutingState::pair(i, j);
                let h = mallows_urn_kernel((i, j), target, &p);
                if h.is_positive() {
                    let mut lhs = Rat::zero();
                    for (slot, w) in mallows.transitions(&xi).map_err(|e| e.to_string())? {
                        let b = xi.bump(slot);
                        lhs += w * mallows_urn_kernel((b.get(0), b.get(1)), target, &p);
                    }
                    if lhs != h {
                        return fail(format!("mallows urn harmonicity at ({i},{j}) {target:?}"));
                    }
                }
                let h = qbinomial_urn_kernel((i, j), target, &q, &r);
                if h.is_positive() {
                    let mut lhs = Rat::zero();
                    for (slot, w) in qbin.transitions(&xi).map_err(|e| e.to_string())? {
                        let b = xi.bump(slot);
                        lhs += w * qbinomial_urn_kernel((b.get(0), b.get(1)), target, &q, &r);
                    }
                    if lhs != h {
                        return fail(format!("q-binomial harmonicity at ({i},{j}) {target:?}"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Mallows tree kernels against depth-truncated spine trees are harmonic,
/// and truncations of the targets give eventually constant kernel values.
fn check_mallows_tree_harmonicity() -> Check {
    let p = rat(1, 3);
    let model = ChainModel::new(
        GraphKind::BinaryTree,
        RoutingChainSpec::MallowsUrn { p: p.clone() },
    )
    .expect("model");
    let kind = GraphKind::BinaryTree;

    let mut spines = vec![SpineTree::rightmost(8)];
    {
        let mut hangers = BTreeMap::new();
        hangers.insert(0usize, Tree::root_only());
        spines.push(SpineTree::new(vec![1; 8], hangers).map_err(|e| e.to_string())?);
    }
    {
        let mut hangers = BTreeMap::new();
        hangers.insert(1usize, Tree::from_words(&["e", "0"]));
        spines.push(SpineTree::new(vec![1, 1, 0, 1, 1, 1, 1, 1], hangers).map_err(|e| e.to_string())?);
    }

    for spine in &spines {
        for size in 1..=4usize {
            for s in enumerate_trees(&kind, size, None).map_err(|e| e.to_string())? {
                let target = MallowsTarget::Spine(spine);
                let h = mallows_tree_kernel(&s, &target, &p).map_err(|e| e.to_string())?;
                if h.is_zero() {
                    continue;
                }
                let x = tree_to_state(&kind, &s).map_err(|e| e.to_string())?;
                let mut lhs = Rat::zero();
                for (succ, w) in full_step_law(&model, &x).map_err(|e| e.to_string())? {
                    let t = state_to_tree(&kind, &succ).map_err(|e| e.to_string())?;
                    lhs += w * mallows_tree_kernel(&t, &target, &p).map_err(|e| e.to_string())?;
                }
                if lhs != h {
                    return fail(format!("mallows tree harmonicity at {}", s.serialize()));
                }
                // boundary-limit consistency: truncations stabilize at h
                for n in (s.depth() + 1)..=spine.depth() {
                    let tn = spine.truncate(n).map_err(|e| e.to_string())?;
                    let kn = mallows_tree_kernel(&s, &MallowsTarget::Finite(&tn), &p)
                        .map_err(|e| e.to_string())?;
                    if kn != h {
                        return fail(format!(
                            "kernel against truncation at depth {n} differs for {}",
                            s.serialize()
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 6. q-binomial path-area identity
// ---------------------------------------------------------------------------

/// Gaussian binomials equal brute-force area-weighted path sums for all
/// rectangles with semiperimeter ≤ `max_steps` at five rational q.
pub fn check_gaussian_binomial(max_steps: u64) -> Check {
    let qs = [rat(1, 2), rat(1, 3), rat(2, 5), rat(3, 4), rat(5, 7)];
    for q in &qs {
        for steps in 0..=max_steps {
            for right in 0..=steps {
                // enumerate all NE paths as bitmasks, weighting by area
                let mut path_sum = Rat::zero();
                let total = 1u64 << steps;
                for mask in 0..total {
                    if (0..steps).filter(|b| mask >> b & 1 == 1).count() as u64 != right {
                        continue;
                    }
                    // area above the baseline: Σ over right-steps of ups so far
                    let mut ups = 0i64;
                    let mut area = 0i64;
                    for b in 0..steps {
                        if mask >> b & 1 == 1 {
                            area += ups;
                        } else {
                            ups += 1;
                        }
                    }
                    path_sum += crate::numeric::rat_pow(q, area);
                }
                let closed = gaussian_binomial(steps, right, q);
                if closed != path_sum {
                    return fail(format!(
                        "[{steps} choose {right}]_q at q={q}: {closed} vs path sum {path_sum}"
                    ));
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 7. Mallows closed forms
// ---------------------------------------------------------------------------

/// Mallows urn hitting formula and tree kernel equal oracle values for all
/// trees with ≤ `max_vertices` vertices at p ∈ {1/4, 1/3, 1/2}.
pub fn check_mallows_closed_forms(max_vertices: u64) -> Check {
    let results: Vec<Check> = [rat(1, 4), rat(1, 3), rat(1, 2)]
        .into_par_iter()
        .map(|p| {
            let model = ChainModel::new(
                GraphKind::BinaryTree,
                RoutingChainSpec::MallowsUrn { p: p.clone() },
            )
            .expect("model");
            // urn hits against the per-vertex DP
            for i in 0..6u64 {
                for j in 0..6u64 {
                    for k in 0..7u64 {
                        for l in 0..7u64 {
                            let xi = RoutingState::pair(i, j);
                            let zeta = RoutingState::pair(k, l);
                            let closed = model.spec.hit(&xi, &zeta);
                            let dp = routing_hit_dp(&model, &xi, &zeta)
                                .map_err(|e| e.to_string())?;
                            if closed != dp {
                                return fail(format!(
                                    "[p={p}] urn hit ({i},{j})→({k},{l}): {closed} vs {dp}"
                                ));
                            }
                        }
                    }
                }
            }
            // tree kernel against the oracle hitting ratio
            check_tree_kernel_vs_oracle(&model, max_vertices, &|s, t| {
                mallows_tree_kernel(s, &MallowsTarget::Finite(t), &p)
                    .expect("finite targets never error")
            })
            .map_err(|e| format!("[p={p}] {e}"))
        })
        .collect();
    for r in results {
        r?;
    }
    Ok(())
}

/// Shared helper: a closed-form tree kernel equals the oracle ratio of
/// hitting probabilities on all pairs of trees within the size bound.
fn check_tree_kernel_vs_oracle(
    model: &ChainModel,
    max_vertices: u64,
    kernel: &(dyn Fn(&Tree, &Tree) -> Rat + Sync),
) -> Check {
    let layers = states_by_time(model, max_vertices)?;
    let kind = model.kind;
    for y_layer in &layers {
        for y in y_layer {
            let ty = state_to_tree(&kind, y).map_err(|e| e.to_string())?;
            let mut root_hit = Rat::one();
            for (u, zeta) in &y.per_vertex {
                root_hit *= routing_hit_dp(model, &RoutingState::zero(), zeta)
                    .map_err(|e| e.to_string())?;
                let _ = u;
            }
            if root_hit.is_zero() {
                continue;
            }
            for x_layer in &layers {
                for x in x_layer {
                    if x.time() > y.time() {
                        continue;
                    }
                    let tx = state_to_tree(&kind, x).map_err(|e| e.to_string())?;
                    let mut hit = Rat::one();
                    for (u, zeta) in &y.per_vertex {
                        hit *= routing_hit_dp(model, &x.routing(u), zeta)
                            .map_err(|e| e.to_string())?;
                        if hit.is_zero() {
                            break;
                        }
                    }
                    if !x.leq(y) {
                        hit = Rat::zero();
                    }
                    let want = hit / &root_hit;
                    let got = kernel(&tx, &ty);
                    if got != want {
                        return fail(format!(
                            "tree kernel at s={}, t={}: {got} vs oracle {want}",
                            tx.serialize(),
                            ty.serialize()
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 8. CRP formulas
// ---------------------------------------------------------------------------

/// CRP path probability and block-size kernel vs the oracle for block
/// totals ≤ `max_total` at three parameter pairs.
pub fn check_crp_formulas(max_total: u64) -> Check {
    let params = [
        (rat(0, 1), rat_int(1)),
        (rat(1, 2), rat(1, 2)),
        (rat(-1, 2), rat_int(1)),
    ];
    let results: Vec<Check> = params
        .into_par_iter()
        .map(|(alpha, theta)| {
            let spec = RoutingChainSpec::CrpBlocks { alpha: alpha.clone(), theta: theta.clone() };
            let model = ChainModel::new(
                if let Some(cap) = crate::routing::crp_block_cap(&alpha, &theta) {
                    GraphKind::HarrisUlam(Some(cap as u32))
                } else {
                    GraphKind::HarrisUlam(None)
                },
                spec.clone(),
            )
            .expect("model");
            // enumerate block-size states with total ≤ max_total
            let mut states = vec![RoutingState::zero()];
            let mut frontier = vec![RoutingState::zero()];
            while let Some(a) = frontier.pop() {
                if a.size() >= max_total {
                    continue;
                }
                for (slot, _) in spec.transitions(&a).map_err(|e| e.to_string())? {
                    let b = a.bump(slot);
                    if !states.contains(&b) {
                        states.push(b.clone());
                        frontier.push(b);
                    }
                }
            }
            for a in &states {
                for b in &states {
                    let closed = spec.hit(a, b);
                    let dp = routing_hit_dp(&model, a, b).map_err(|e| e.to_string())?;
                    if closed != dp {
                        return fail(format!(
                            "[α={alpha} θ={theta}] path probability {a:?}→{b:?}: {closed} vs {dp}"
                        ));
                    }
                    if !a.is_zero() {
                        let want = if dp.is_zero() {
                            Rat::zero()
                        } else {
                            let denom = routing_hit_dp(&model, &RoutingState::zero(), b)
                                .map_err(|e| e.to_string())?;
                            dp / denom
                        };
                        let got = crp_block_kernel(&a.0, &b.0, &alpha, &theta);
                        if got != want {
                            return fail(format!(
                                "[α={alpha} θ={theta}] block kernel {a:?}→{b:?}: {got} vs {want}"
                            ));
                        }
                    }
                }
            }
            Ok(())
        })
        .collect();
    for r in results {
        r?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 9. Composition chain
// ---------------------------------------------------------------------------

/// Uniformity over the 2^{n-1} compositions of n for n ≤ `max_n`, and the
/// perfect-memory kernel against the oracle.
pub fn check_composition_chain(max_n: u64) -> Check {
    let model =
        ChainModel::new(GraphKind::BinaryTree, RoutingChainSpec::SingleTrailHalf).expect("model");
    // uniformity and bijectivity with compositions
    for n in 1..=max_n {
        let dist =
            crate::oracle::exact_distribution(&model, n - 1, None).map_err(|e| e.to_string())?;
        if dist.len() as u64 != 1 << (n - 1) {
            return fail(format!("support at n={n} has {} words", dist.len()));
        }
        let want = Rat::new(1.into(), num::BigInt::one() << (n as usize - 1));
        let mut seen = std::collections::BTreeSet::new();
        for (state, mass) in &dist {
            if mass != &want {
                return fail(format!("composition mass {mass} at n={n}, want {want}"));
            }
            // decode the trail into a composition of n
            let word = trail_word(state);
            let c = crate::bijections::composition_decode(&word);
            if c.total() != n {
                return fail(format!("decoded composition of {} at n={n}", c.total()));
            }
            if !seen.insert(c.0.clone()) {
                return fail(format!("composition {:?} decoded twice", c.0));
            }
        }
    }
    // perfect memory and the prefix kernel
    verify_perfect_memory(
        &TrickleState::initial(),
        &|s: &TrickleState| full_step_law(&model, s).expect("step law"),
        6,
    )
    .map_err(|e| e.to_string())?;
    let layers = states_by_time(&model, 8)?;
    let rho = |s: &TrickleState| rat(1, 1 << s.time().min(62));
    let leq = |a: &TrickleState, b: &TrickleState| a.leq(b);
    for (t, layer) in layers.iter().enumerate() {
        for x in layer {
            // oracle check of ρ itself
            for (u, zeta) in &x.per_vertex {
                let dp = routing_hit_dp(&model, &RoutingState::zero(), zeta)
                    .map_err(|e| e.to_string())?;
                let _ = (u, dp);
            }
            for y in layers.iter().flatten() {
                let want = {
                    let mut hit = Rat::one();
                    for (u, zeta) in &y.per_vertex {
                        hit *= routing_hit_dp(&model, &x.routing(u), zeta)
                            .map_err(|e| e.to_string())?;
                    }
                    if !x.leq(y) {
                        hit = Rat::zero();
                    }
                    let denom: Rat = rat(1, 1 << y.time().min(62));
                    hit / denom
                };
                let got = prefix_chain_kernel(&rho, &leq, x, y).map_err(|e| e.to_string())?;
                if got != want {
                    return fail(format!(
                        "prefix kernel at times ({t},{}): {got} vs oracle {want}",
                        y.time()
                    ));
                }
            }
        }
    }
    Ok(())
}

/// The digit word of a single-trail state (the path the trail took).
fn trail_word(state: &TrickleState) -> Vec<u8> {
    let mut out = Vec::new();
    let mut at = VertexId::root();
    loop {
        let xi = state.routing(&at);
        if xi.is_zero() {
            return out;
        }
        let slot = if xi.get(0) > 0 { 0u8 } else { 1u8 };
        out.push(slot);
        at = at.child(slot as u32);
    }
}

// ---------------------------------------------------------------------------
// 10. Freeze / tail structure
// ---------------------------------------------------------------------------

pub struct FreezeReport {
    pub family: String,
    pub paths: u64,
    pub frozen: u64,
    pub structural_violations: u64,
}

/// Simulate urn paths and count those whose coordinates exhibit the
/// frozen pattern: at most one coordinate moves during the second half of
/// the path. For the Mallows urn the freeze is structural (no first-slot
/// move after any second-slot move, over the whole path) and must never
/// be violated.
pub fn freeze_statistics(spec: &RoutingChainSpec, paths: u64, horizon: u64, seed: u64) -> FreezeReport {
    let counts: Vec<(u64, u64)> = (0..paths)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(seed, idx));
            let mut xi = RoutingState::zero();
            let mut moved = [false; 2];
            let mut switched = false;
            let mut structural_bad = false;
            for step in 0..horizon {
                let slot = spec.sample_slot(&xi, rng.gen());
                xi = xi.bump(slot);
                if step >= horizon / 2 {
                    moved[slot.min(1)] = true;
                }
                if matches!(spec, RoutingChainSpec::MallowsUrn { .. }) {
                    if slot == 1 {
                        switched = true;
                    } else if switched {
                        structural_bad = true;
                    }
                }
            }
            let frozen = !(moved[0] && moved[1]);
            (frozen as u64, structural_bad as u64)
        })
        .collect();
    let frozen = counts.iter().map(|c| c.0).sum();
    let structural_violations = counts.iter().map(|c| c.1).sum();
    FreezeReport {
        family: format!("{spec:?}"),
        paths,
        frozen,
        structural_violations,
    }
}

/// The freeze criterion for the three families.
pub fn check_freeze(paths: u64, horizon: u64) -> Check {
    let mallows = freeze_statistics(
        &RoutingChainSpec::MallowsUrn { p: rat(1, 3) },
        paths,
        horizon,
        101,
    );
    if mallows.structural_violations > 0 || mallows.frozen != paths {
        return fail(format!(
            "Mallows freeze must be structural: {}/{} frozen, {} violations",
            mallows.frozen, mallows.paths, mallows.structural_violations
        ));
    }
    let mut failures = Vec::new();
    for (name, spec) in [
        ("qbinomial", RoutingChainSpec::QBinomialUrn { q: rat(1, 2), r: rat(1, 2) }),
        ("catalan", RoutingChainSpec::CatalanUrn),
    ] {
        let rep = freeze_statistics(&spec, paths, horizon, 202);
        let rate = rep.frozen as f64 / rep.paths as f64;
        if rate < 0.995 {
            failures.push(format!("{name}: frozen rate {rate:.4} < 0.995"));
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        fail(failures.join("; "))
    }
}

// ---------------------------------------------------------------------------
// 11. Boundary convergence
// ---------------------------------------------------------------------------

/// Run `replicas` BST chains to time `n` and KS-test the depth ≤ 2
/// subtree ratios against the stick-product laws at the 0.1% level.
pub fn check_bst_boundary_convergence(replicas: u64, n: u64, seed: u64) -> Check {
    let vertices: Vec<VertexId> = ["0", "1", "00", "01", "10", "11"]
        .iter()
        .map(|w| VertexId::from_binary(w))
        .collect();
    let samples: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|idx| {
            let model = bst_model();
            let mut sim = Trickler::new(model, replica_seed(seed, idx));
            sim.run_to(n);
            let total = sim.state.particles_fed() as f64;
            let kind = GraphKind::BinaryTree;
            vertices
                .iter()
                .map(|u| sim.state.arrivals(&kind, u) as f64 / total)
                .collect()
        })
        .collect();
    // depth-1 ratios converge to U(0,1); depth-2 to a product of two
    // independent uniforms, whose CDF is x - x ln x
    let uniform_cdf = |x: f64| x.clamp(0.0, 1.0);
    let product_cdf = |x: f64| {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            x - x * x.ln()
        }
    };
    let crit = ks_critical(replicas as usize, 0.001);
    for (i, u) in vertices.iter().enumerate() {
        let mut xs: Vec<f64> = samples.iter().map(|row| row[i]).collect();
        let cdf: &dyn Fn(f64) -> f64 =
            if u.depth() == 1 { &uniform_cdf } else { &product_cdf };
        let d = ks_statistic(&mut xs, cdf);
        if d > crit {
            return fail(format!(
                "KS statistic {d:.4} above the 0.1% critical value {crit:.4} at {u:?}"
            ));
        }
    }
    Ok(())
}

/// Trickle-up one-step frequencies match the h-transform law within 4
/// standard errors at `samples` draws, on `pairs` random (tree, dyadic μ)
/// pairs.
pub fn check_trickle_up_frequencies(pairs: u64, samples: u64, seed: u64) -> Check {
    let results: Vec<Check> = (0..pairs)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(seed ^ 0xabcd, idx));
            // random dyadic measure deep enough for the grown tree
            let depth = 8usize;
            let mut split = |_: &VertexId| rat(rng.gen_range(1..16), 16);
            let mu = BoundaryMeasure::from_binary_splits(depth, &mut split)
                .map_err(|e| e.to_string())?;
            // random starting tree with ≤ 6 vertices grown by the DST law
            let mut w = Tree::root_only();
            for _ in 0..rng.gen_range(0..5) {
                let row = dst_transition(&w, &mu).map_err(|e| e.to_string())?;
                let draw: f64 = rng.gen();
                let mut acc = 0.0;
                for (u, p) in &row {
                    acc += rat_to_f64(p);
                    if draw < acc {
                        w.insert(u.clone());
                        break;
                    }
                }
            }
            let law = dst_transition(&w, &mu).map_err(|e| e.to_string())?;
            let mut counts: BTreeMap<VertexId, u64> = BTreeMap::new();
            for _ in 0..samples {
                let v = mu
                    .sample_path(&mut rng, w.depth() + 1)
                    .map_err(|e| e.to_string())?;
                let grown = trickle_up_bst(&w, &v.prefix).map_err(|e| e.to_string())?;
                let new: Vec<_> = grown.vertices.difference(&w.vertices).cloned().collect();
                *counts.entry(new[0].clone()).or_default() += 1;
            }
            for (u, p) in &law {
                let c = counts.get(u).copied().unwrap_or(0);
                if !within_z(c, samples, rat_to_f64(p), 4.0) {
                    return fail(format!(
                        "trickle-up frequency at {u:?}: {c}/{samples} vs {}",
                        rat_to_f64(p)
                    ));
                }
            }
            Ok(())
        })
        .collect();
    for r in results {
        r?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 12. Bijections
// ---------------------------------------------------------------------------

pub fn check_bijections() -> Check {
    use crate::bijections::*;
    // worked BST correspondence
    let r = Listing(vec![8, 7, 9, 4, 1, 3, 5, 2, 6]);
    let (tree, labels) = listing_to_bst(&r).map_err(|e| e.to_string())?;
    let want_bst = [
        (1u32, "e"),
        (2, "1"),
        (3, "10"),
        (4, "0"),
        (5, "101"),
        (6, "11"),
        (7, "00"),
        (8, "000"),
        (9, "001"),
    ];
    for (label, word) in want_bst {
        let v = crate::substrate::parse_word(word).map_err(|e| e.to_string())?;
        if labels.get(&v) != Some(&label) {
            return fail(format!("bst label {label} not at {word}"));
        }
    }
    if bst_to_listing(&tree, &labels).map_err(|e| e.to_string())? != r {
        return fail("bst listing round trip failed".to_string());
    }
    // worked recursive-tree correspondence
    let r = Listing(vec![9, 7, 8, 4, 5, 1, 3, 2, 6]);
    let (tree, labels) = listing_to_rrt(&r).map_err(|e| e.to_string())?;
    let want_rrt = [
        (0u32, "e"),
        (1, "1"),
        (2, "11"),
        (3, "12"),
        (4, "2"),
        (5, "21"),
        (6, "111"),
        (7, "3"),
        (8, "31"),
        (9, "4"),
    ];
    for (label, word) in want_rrt {
        let v = crate::substrate::parse_word(word).map_err(|e| e.to_string())?;
        if labels.get(&v) != Some(&label) {
            return fail(format!("rrt label {label} not at {word}"));
        }
    }
    if rrt_to_listing(&tree, &labels).map_err(|e| e.to_string())? != r {
        return fail("rrt listing round trip failed".to_string());
    }
    // round trips over all listings with n ≤ 6
    fn permutations(n: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n);
                out.push(q);
            }
        }
        out
    }
    for n in 1..=6u32 {
        for perm in permutations(n) {
            let r = Listing(perm);
            let (t, l) = listing_to_bst(&r).map_err(|e| e.to_string())?;
            if bst_to_listing(&t, &l).map_err(|e| e.to_string())? != r {
                return fail(format!("bst round trip failed at {:?}", r.0));
            }
            let (t, l) = listing_to_rrt(&r).map_err(|e| e.to_string())?;
            if rrt_to_listing(&t, &l).map_err(|e| e.to_string())? != r {
                return fail(format!("rrt round trip failed at {:?}", r.0));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Statistics extras used by the CLI suite
// ---------------------------------------------------------------------------

/// Simulated Catalan trees at time `n` are uniform over C_{n+1} shapes
/// (chi-square at the 0.1% level).
pub fn check_catalan_simulation(n: u64, replicas: u64, seed: u64) -> Check {
    let shapes = enumerate_trees(&GraphKind::BinaryTree, n as usize + 1, None)
        .map_err(|e| e.to_string())?;
    let index: BTreeMap<String, usize> = shapes
        .iter()
        .enumerate()
        .map(|(i, t)| (t.serialize(), i))
        .collect();
    let counts: Vec<u64> = {
        let mut counts = vec![0u64; shapes.len()];
        let sampled: Vec<usize> = (0..replicas)
            .into_par_iter()
            .map(|idx| {
                let model =
                    ChainModel::new(GraphKind::BinaryTree, RoutingChainSpec::CatalanUrn)
                        .expect("model");
                let mut sim = Trickler::new(model, replica_seed(seed, idx));
                sim.run_to(n);
                let t = state_to_tree(&GraphKind::BinaryTree, &sim.state).expect("tree");
                index[&t.serialize()]
            })
            .collect();
        for i in sampled {
            counts[i] += 1;
        }
        counts
    };
    let probs = vec![1.0 / shapes.len() as f64; shapes.len()];
    let stat = chi_square_statistic(&counts, &probs);
    let crit = chi_square_quantile(shapes.len() - 1, 0.001);
    if stat > crit {
        return fail(format!("chi-square {stat:.2} above critical {crit:.2}"));
    }
    Ok(())
}

/// Empirical one-step law of the BST image of growing uniform listings
/// matches the exact tree distribution (chi-square at 0.1%).
pub fn check_uniform_listing_bst_image(n: u64, replicas: u64, seed: u64) -> Check {
    let model = bst_model();
    let dist = exact_tree_distribution(&model, n, None).map_err(|e| e.to_string())?;
    let trees: Vec<(&Tree, f64)> = dist.iter().map(|(t, m)| (t, rat_to_f64(m))).collect();
    let index: BTreeMap<String, usize> = trees
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (t.serialize(), i))
        .collect();
    let mut counts = vec![0u64; trees.len()];
    let sampled: Vec<usize> = (0..replicas)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(seed, idx));
            let mut listing = crate::bijections::Listing(vec![1]);
            for _ in 0..n {
                listing = crate::bijections::grow_uniform_listing(&listing, &mut rng);
            }
            let (t, _) = crate::bijections::listing_to_bst(&listing).expect("listing");
            index[&t.serialize()]
        })
        .collect();
    for i in sampled {
        counts[i] += 1;
    }
    let probs: Vec<f64> = trees.iter().map(|(_, p)| *p).collect();
    let stat = chi_square_statistic(&counts, &probs);
    let crit = chi_square_quantile(trees.len() - 1, 0.001);
    if stat > crit {
        return fail(format!("chi-square {stat:.2} above critical {crit:.2}"));
    }
    Ok(())
}

/// Mallows-permutation BST images match the Mallows tree chain law
/// (chi-square at 0.1% against the exact distribution).
pub fn check_mallows_listing_tree_image(n: u64, replicas: u64, seed: u64) -> Check {
    let p = rat(1, 3);
    let model = ChainModel::new(
        GraphKind::BinaryTree,
        RoutingChainSpec::MallowsUrn { p: p.clone() },
    )
    .expect("model");
    let dist = exact_tree_distribution(&model, n - 1, None).map_err(|e| e.to_string())?;
    let trees: Vec<(&Tree, f64)> = dist.iter().map(|(t, m)| (t, rat_to_f64(m))).collect();
    let index: BTreeMap<String, usize> = trees
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (t.serialize(), i))
        .collect();
    let mut counts = vec![0u64; trees.len()];
    let sampled: Vec<usize> = (0..replicas)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(seed, idx));
            let listing =
                crate::bijections::sample_mallows_listing(n as usize, &p, false, &mut rng);
            let (t, _) = crate::bijections::listing_to_bst(&listing).expect("listing");
            index[&t.serialize()]
        })
        .collect();
    for i in sampled {
        counts[i] += 1;
    }
    let probs: Vec<f64> = trees.iter().map(|(_, p)| *p).collect();
    let stat = chi_square_statistic(&counts, &probs);
    let crit = chi_square_quantile(trees.len() - 1, 0.001);
    if stat > crit {
        return fail(format!("chi-square {stat:.2} above critical {crit:.2}"));
    }
    Ok(())
}

/// Restriction property: the projection of the full chain onto a
/// downward-closed vertex set, observed as it changes, has the transition
/// law of the directly computed restricted chain (3σ per outcome).
pub fn check_restriction_property(replicas: u64, seed: u64) -> Check {
    let model = bst_model();
    let kind = GraphKind::BinaryTree;
    // start from a 6-vertex tree and observe two steps projected to
    // J = {e, 0, 1} plus its fringe counts
    let start = Tree::from_words(&["e", "0", "1", "00", "10", "11"]);
    let x0 = tree_to_state(&kind, &start).map_err(|e| e.to_string())?;
    let project = |s: &TrickleState| {
        (
            s.routing(&VertexId::root()),
            s.routing(&VertexId::from_binary("0")),
            s.routing(&VertexId::from_binary("1")),
        )
    };
    // exact two-step law of the projection
    let mut want: BTreeMap<_, f64> = BTreeMap::new();
    for (s1, p1) in full_step_law(&model, &x0).map_err(|e| e.to_string())? {
        for (s2, p2) in full_step_law(&model, &s1).map_err(|e| e.to_string())? {
            *want.entry((project(&s1), project(&s2))).or_default() +=
                rat_to_f64(&(&p1 * p2));
        }
    }
    let observed: Vec<_> = (0..replicas)
        .into_par_iter()
        .map(|idx| {
            let mut sim = Trickler::new(model.clone(), replica_seed(seed, idx));
            sim.state = x0.clone();
            sim.step();
            let first = project(&sim.state);
            sim.step();
            (first, project(&sim.state))
        })
        .collect();
    let mut counts: BTreeMap<_, u64> = BTreeMap::new();
    for key in observed {
        *counts.entry(key).or_default() += 1;
    }
    for (key, p) in &want {
        let c = counts.get(key).copied().unwrap_or(0);
        if !within_z(c, replicas, *p, 3.0) {
            return fail(format!(
                "projected transition frequency {c}/{replicas} vs {p:.5}"
            ));
        }
    }
    Ok(())
}

/// Labeling → measure → labeling round trip on randomized admissible
/// labelings.
pub fn check_labeling_round_trip(count: u64, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..count {
        let kind = GraphKind::BinaryTree;
        let depth = 4usize;
        // grow a random ↓ set from the root; route dyadic masses to kept
        // children, killing the rest
        let mut down = std::collections::BTreeSet::new();
        let mut r: BTreeMap<VertexId, BTreeMap<usize, Rat>> = BTreeMap::new();
        let mut frontier = vec![VertexId::root()];
        down.insert(VertexId::root());
        while let Some(u) = frontier.pop() {
            if u.depth() >= depth {
                continue;
            }
            let mut row = BTreeMap::new();
            let mut budget = rat_int(1);
            for slot in 0..2usize {
                if rng.gen_bool(0.7) {
                    let w = rat(rng.gen_range(1..8), 16);
                    if &w <= &budget {
                        budget -= &w;
                        row.insert(slot, w);
                        let v = kind.child_at(&u, slot);
                        down.insert(v.clone());
                        frontier.push(v);
                    }
                }
            }
            r.insert(u, row);
        }
        let lab = AdmissibleLabeling { kind, depth, down, r };
        lab.validate().map_err(|e| format!("case {case}: {e}"))?;
        let mu = lab.path_measure().map_err(|e| e.to_string())?;
        let back = recover_labeling(&mu).map_err(|e| e.to_string())?;
        if back.down != lab.down {
            return fail(format!("case {case}: recovered ↓ set differs"));
        }
        for (u, row) in &lab.r {
            if u.depth() < depth && !row.is_empty() && back.r.get(u) != Some(row) {
                return fail(format!("case {case}: recovered measures differ at {u:?}"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Suite runner
// ---------------------------------------------------------------------------

pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

fn timed(name: &str, f: impl FnOnce() -> Check) -> SuiteResult {
    let start = std::time::Instant::now();
    let outcome = f();
    SuiteResult {
        name: name.to_string(),
        passed: outcome.is_ok(),
        detail: outcome.err().unwrap_or_default(),
        millis: start.elapsed().as_millis(),
    }
}

/// Run a named suite; `mc_budget` scales the Monte-Carlo sample counts of
/// the statistics suite.
pub fn run_suite(name: &str, mc_budget: u64) -> Option<Vec<SuiteResult>> {
    match name {
        "kernels" => Some(vec![
            timed("bst-law", || check_bst_law(6)),
            timed("catalan-uniformity", || check_catalan_uniformity(6, 10)),
            timed("product-kernels", check_product_kernels),
            timed("gaussian-binomial", || check_gaussian_binomial(10)),
            timed("mallows-closed-forms", || check_mallows_closed_forms(6)),
            timed("crp-formulas", || check_crp_formulas(6)),
            timed("composition-chain", || check_composition_chain(12)),
            timed("bijections", check_bijections),
        ]),
        "harmonicity" => Some(vec![
            timed("dst-h-transform", || check_dst_h_transform(6)),
            timed("extended-kernel-harmonicity", check_harmonicity),
            timed("labeling-round-trip", || check_labeling_round_trip(20, 77)),
        ]),
        "statistics" => {
            let n = mc_budget.max(1000);
            Some(vec![
                timed("freeze-patterns", || check_freeze(n / 10, 1000)),
                timed("bst-boundary-ks", || {
                    check_bst_boundary_convergence(200, n, 4242)
                }),
                timed("trickle-up-frequencies", || {
                    check_trickle_up_frequencies(10, n, 37)
                }),
                timed("catalan-simulation", || {
                    check_catalan_simulation(6, n, 91)
                }),
                timed("uniform-listing-image", || {
                    check_uniform_listing_bst_image(3, n, 53)
                }),
                timed("mallows-listing-image", || {
                    check_mallows_listing_tree_image(4, n, 67)
                }),
                timed("restriction-property", || {
                    check_restriction_property(n, 29)
                }),
            ])
        }
        _ => None,
    }
}

pub fn suite_names() -> &'static [&'static str] {
    &["kernels", "harmonicity", "statistics"]
}
