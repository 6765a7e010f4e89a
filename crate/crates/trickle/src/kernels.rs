//! Interior and extended (boundary) Martin kernels for every chain family,
//! plus the generic product kernel of the full trickle-down chain.
//!
//! All kernels take the all-zero state (root-only tree) as the reference
//! state, so `K(reference, ·) = 1`.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::boundary::BoundaryMeasure;
use crate::engine::{ChainModel, Tree, TrickleState};
use crate::numeric::{factorial, rat_int, rat_pow, rising, Rat};
use crate::routing::{crp_block_cap, RoutingState};
use crate::substrate::VertexId;
use crate::{Result, TrickleError};

/// Per-vertex Martin kernel K^u(ξ, ζ) = hit(ξ→ζ)/hit(0→ζ) from the
/// family's closed-form hitting probabilities.
pub fn routing_kernel(model: &ChainModel, xi: &RoutingState, zeta: &RoutingState) -> Rat {
    if xi.is_zero() {
        return if model.spec.state_valid(zeta) { Rat::one() } else { Rat::zero() };
    }
    let up = model.spec.hit(xi, zeta);
    if up.is_zero() {
        return Rat::zero();
    }
    let down = model.spec.hit(&RoutingState::zero(), zeta);
    up / down
}

/// Martin kernel of the full chain: the product of the per-vertex kernels,
/// with finitely many non-unit factors; 0 unless x precedes y.
pub fn product_martin_kernel(model: &ChainModel, x: &TrickleState, y: &TrickleState) -> Rat {
    let mut acc = Rat::one();
    for (u, xi) in &x.per_vertex {
        if xi.is_zero() {
            continue;
        }
        acc *= routing_kernel(model, xi, &y.routing(u));
        if acc.is_zero() {
            return acc;
        }
    }
    acc
}

/// Boundary point of the Mallows and q-binomial urns: the one-point
/// compactification of the frozen first coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UrnBoundaryPoint {
    Finite(u64),
    Infinity,
}

// ---------------------------------------------------------------------------
// Binary search tree
// ---------------------------------------------------------------------------

/// BST Martin kernel in tree form:
/// `binom(#t,#s)^{-1} Π_{u∈s} #t(u)` when s ⊆ t, else 0.
pub fn bst_kernel(s: &Tree, t: &Tree) -> Rat {
    if !s.vertices.is_subset(&t.vertices) {
        return Rat::zero();
    }
    let choose = crate::numeric::binomial(t.len() as u64, s.len() as u64);
    let mut acc = Rat::from_integer(1.into()) / Rat::from_integer(choose);
    for u in &s.vertices {
        acc *= rat_int(t.subtree_count(u) as i64);
    }
    acc
}

/// Extended BST kernel `K(s, μ) = (#s)! Π_{u∈s} μ_u` against a boundary
/// measure on infinite binary paths.
pub fn bst_extended_kernel(s: &Tree, mu: &BoundaryMeasure) -> Result<Rat> {
    let mut acc = Rat::from_integer(factorial(s.len() as u64));
    for u in &s.vertices {
        acc *= mu.mass_at(u)?;
        if acc.is_zero() {
            return Ok(acc);
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Reinforced (Dirichlet) urns and space-time walks
// ---------------------------------------------------------------------------

/// Extended kernel of the reinforced urn with weights ν at a boundary
/// probability vector ρ over the child slots:
/// rising-factorial ratio times `Π_v ρ_v^{ξ_v}`.
pub fn dirichlet_extended_kernel(xi: &RoutingState, rho: &[Rat], nu: &[Rat]) -> Rat {
    let nu_total: Rat = nu.iter().sum();
    let mut acc = rising(&nu_total, xi.size());
    for (v, w) in nu.iter().enumerate() {
        acc /= rising(w, xi.get(v));
    }
    for (v, r) in rho.iter().enumerate() {
        if xi.get(v) > 0 {
            if r.is_zero() {
                return Rat::zero();
            }
            acc *= rat_pow(r, xi.get(v) as i64);
        }
    }
    acc
}

/// Extended kernel of the space-time walk: `Π_v (ρ_v/p_v)^{ξ_v}`.
pub fn spacetime_extended_kernel(xi: &RoutingState, rho: &[Rat], p: &[Rat]) -> Rat {
    let mut acc = Rat::one();
    for (v, pv) in p.iter().enumerate() {
        if xi.get(v) > 0 {
            if rho.get(v).map_or(true, |r| r.is_zero()) {
                return Rat::zero();
            }
            acc *= rat_pow(&(&rho[v] / pv), xi.get(v) as i64);
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Chinese restaurant block sizes
// ---------------------------------------------------------------------------

/// Interior Martin kernel of the CRP block-size chain in closed form.
pub fn crp_block_kernel(a: &[u64], b: &[u64], alpha: &Rat, theta: &Rat) -> Rat {
    let m = a.len();
    let n = b.len();
    if a.is_empty() {
        // reference state
        return if n == 0 || b.iter().all(|&x| x >= 1) { Rat::one() } else { Rat::zero() };
    }
    if n < m || a.iter().zip(b).any(|(x, y)| x > y) || b.iter().any(|&x| x == 0) {
        return Rat::zero();
    }
    if let Some(cap) = crp_block_cap(alpha, theta) {
        if n as u64 > cap {
            return Rat::zero();
        }
    }
    let p: u64 = a.iter().sum();
    let q: u64 = b.iter().sum();

    // (θ+1)...(θ+p-1) / [(θ+α)(θ+2α)...(θ+(m-1)α)]
    let mut acc = rising(&(theta + Rat::one()), p - 1);
    for k in 1..m {
        acc /= theta + rat_int(k as i64) * alpha;
    }
    // Π_k [(1-α)(2-α)...(a_k-1-α)]^{-1}
    for &ak in a {
        acc /= rising(&(Rat::one() - alpha), ak - 1);
    }
    // interleaving binomials of a→b over those of reference→b
    let mut delta_left = q - p;
    let mut b_left = q;
    for k in 0..m {
        let dk = b[k] - a[k];
        acc *= Rat::from_integer(crate::numeric::binomial(delta_left, dk));
        acc /= Rat::from_integer(crate::numeric::binomial(b_left - 1, b[k] - 1));
        delta_left -= dk;
        b_left -= b[k];
    }
    acc
}

/// Extended Martin kernel of the CRP block-size chain at a subprobability
/// sequence ρ (vanishes exactly when some needed block has no limit mass,
/// or the mass ahead of a needed new block is exhausted).
pub fn crp_extended_kernel(a: &[u64], rho: &[Rat], alpha: &Rat, theta: &Rat) -> Result<Rat> {
    if !crate::routing::crp_params_admissible(alpha, theta) {
        return Err(TrickleError::InvalidParameter(format!(
            "inadmissible CRP parameters ({alpha}, {theta})"
        )));
    }
    let total: Rat = rho.iter().sum();
    if rho.iter().any(|r| r.is_negative()) || total > Rat::one() {
        return Err(TrickleError::InvalidParameter(
            "ρ must be a subprobability sequence".into(),
        ));
    }
    let m = a.len();
    if a.iter().any(|&x| x == 0) {
        return Err(TrickleError::InvalidState("zero block size".into()));
    }
    let p: u64 = a.iter().sum();
    let mut acc = rising(&(theta + Rat::one()), p.saturating_sub(1));
    for k in 1..m {
        acc /= theta + rat_int(k as i64) * alpha;
    }
    for &ak in a {
        acc /= rising(&(Rat::one() - alpha), ak - 1);
    }
    for (k, &ak) in a.iter().enumerate() {
        let rk = rho.get(k).cloned().unwrap_or_else(Rat::zero);
        if ak >= 2 && rk.is_zero() {
            return Ok(Rat::zero());
        }
        acc *= rat_pow(&rk, ak as i64 - 1);
    }
    // trailing (1-ρ_1)(1-ρ_1-ρ_2)...(1-ρ_1-...-ρ_{m-1})
    let mut partial = Rat::zero();
    for k in 0..m.saturating_sub(1) {
        partial += rho.get(k).cloned().unwrap_or_else(Rat::zero);
        let factor = Rat::one() - &partial;
        if factor.is_zero() {
            return Ok(Rat::zero());
        }
        acc *= factor;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Mallows urn and tree
// ---------------------------------------------------------------------------

/// Interior Mallows urn kernel.
pub fn mallows_urn_kernel_interior(from: (u64, u64), to: (u64, u64), p: &Rat) -> Rat {
    let (i, j) = from;
    let (k, l) = to;
    let q = Rat::one() - p;
    if j == 0 && i <= k {
        rat_pow(&q, -(i as i64))
    } else if (1..=l).contains(&j) && i == k {
        rat_pow(&q, -(i as i64)) / p
    } else {
        Rat::zero()
    }
}

/// Extended Mallows urn kernel at a boundary point (the frozen value of
/// the first coordinate, or ∞).
pub fn mallows_urn_kernel(from: (u64, u64), target: UrnBoundaryPoint, p: &Rat) -> Rat {
    let (i, j) = from;
    let q = Rat::one() - p;
    match target {
        UrnBoundaryPoint::Finite(k) => {
            if j == 0 && i <= k {
                rat_pow(&q, -(i as i64))
            } else if j >= 1 && i == k {
                rat_pow(&q, -(i as i64)) / p
            } else {
                Rat::zero()
            }
        }
        UrnBoundaryPoint::Infinity => {
            if j == 0 {
                rat_pow(&q, -(i as i64))
            } else {
                Rat::zero()
            }
        }
    }
}

/// Infinite binary tree with a single infinite spine: stored as the spine
/// word to a finite depth plus the finite left subtrees ("hangers") at the
/// positions where the spine steps right. Whenever the spine steps left
/// there is nothing to its right, which is exactly the structural
/// condition `u1 ∈ t ⇒ #t(u0) < ∞`.
#[derive(Clone, Debug)]
pub struct SpineTree {
    /// Spine letters w_1 w_2 … to the stored depth.
    pub spine: Vec<u8>,
    /// For indices k with spine[k] == 1: the finite subtree rooted at
    /// (spine prefix of length k) + 0, in relative words. Missing entry
    /// means that subtree is empty.
    pub hangers: BTreeMap<usize, Tree>,
}

enum SubtreeView {
    Infinite,
    Finite(Vec<VertexId>),
}

impl SpineTree {
    pub fn new(spine: Vec<u8>, hangers: BTreeMap<usize, Tree>) -> Result<Self> {
        for (k, _) in &hangers {
            if *k >= spine.len() || spine[*k] != 1 {
                return Err(TrickleError::InvalidState(
                    "hangers may only sit where the spine steps right".into(),
                ));
            }
        }
        Ok(SpineTree { spine, hangers })
    }

    /// The all-ones spine with no hangers (the rightmost path).
    pub fn rightmost(depth: usize) -> Self {
        SpineTree { spine: vec![1; depth], hangers: BTreeMap::new() }
    }

    pub fn depth(&self) -> usize {
        self.spine.len()
    }

    /// Membership; errors when the stored depth cannot decide.
    pub fn contains(&self, u: &VertexId) -> Result<bool> {
        let mut k = 0usize;
        while k < u.0.len() {
            if k >= self.spine.len() {
                return Err(TrickleError::DepthInsufficient {
                    have: self.spine.len(),
                    need: u.0.len(),
                });
            }
            if u.0[k] != self.spine[k] as u32 {
                // branches off the spine at position k
                if self.spine[k] == 1 && u.0[k] == 0 {
                    let rel = VertexId(u.0[k + 1..].to_vec());
                    return Ok(self
                        .hangers
                        .get(&k)
                        .map_or(false, |h| h.contains(&rel)));
                }
                return Ok(false);
            }
            k += 1;
        }
        Ok(true) // spine prefix
    }

    /// Subtree of the spine tree weakly below `w`, in words relative to `w`.
    fn subtree_below(&self, w: &VertexId) -> Result<SubtreeView> {
        let mut k = 0usize;
        while k < w.0.len() {
            if k >= self.spine.len() {
                return Err(TrickleError::DepthInsufficient {
                    have: self.spine.len(),
                    need: w.0.len(),
                });
            }
            if w.0[k] != self.spine[k] as u32 {
                if self.spine[k] == 1 && w.0[k] == 0 {
                    let rel = VertexId(w.0[k + 1..].to_vec());
                    let out = match self.hangers.get(&k) {
                        None => Vec::new(),
                        Some(h) => h
                            .vertices
                            .iter()
                            .filter(|v| rel.is_prefix_of(v))
                            .map(|v| VertexId(v.0[rel.0.len()..].to_vec()))
                            .collect(),
                    };
                    return Ok(SubtreeView::Finite(out));
                }
                return Ok(SubtreeView::Finite(Vec::new()));
            }
            k += 1;
        }
        Ok(SubtreeView::Infinite)
    }

    /// Truncation to the finite tree of all members with depth ≤ n.
    pub fn truncate(&self, n: usize) -> Result<Tree> {
        if n > self.spine.len() {
            return Err(TrickleError::DepthInsufficient {
                have: self.spine.len(),
                need: n,
            });
        }
        let mut t = Tree::root_only();
        let mut prefix = VertexId::root();
        for k in 0..n {
            if let Some(h) = self.hangers.get(&k) {
                let base = prefix.child(0);
                for rel in &h.vertices {
                    let mut w = base.0.clone();
                    w.extend_from_slice(&rel.0);
                    if w.len() <= n {
                        t.insert(VertexId(w));
                    }
                }
            }
            prefix = prefix.child(self.spine[k] as u32);
            t.insert(prefix.clone());
        }
        Ok(t)
    }
}

/// Target of the Mallows tree kernel: a finite tree or a boundary spine
/// tree.
pub enum MallowsTarget<'a> {
    Finite(&'a Tree),
    Spine(&'a SpineTree),
}

/// L(s) = Σ_u #s(u0): total weight of left subtrees.
pub fn mallows_left_weight(s: &Tree) -> u64 {
    s.vertices
        .iter()
        .map(|u| s.subtree_count(&u.child(0)))
        .sum()
}

/// N(s) = #{u : u1 ∈ s}.
pub fn mallows_right_steps(s: &Tree) -> u64 {
    s.vertices.iter().filter(|u| !u.is_root() && u.0[u.0.len() - 1] == 1).count() as u64
}

/// Mallows tree kernel `(1-p)^{-L(s)} p^{-N(s)} I(s,t)`, where the
/// indicator demands that below every left sibling u0 of a right step of
/// s, the subtrees of s and t agree.
pub fn mallows_tree_kernel(s: &Tree, target: &MallowsTarget<'_>, p: &Rat) -> Result<Rat> {
    // subset test
    let contained = match target {
        MallowsTarget::Finite(t) => s.vertices.is_subset(&t.vertices),
        MallowsTarget::Spine(t) => {
            let mut all = true;
            for u in &s.vertices {
                if !t.contains(u)? {
                    all = false;
                    break;
                }
            }
            all
        }
    };
    if !contained {
        return Ok(Rat::zero());
    }
    // indicator I(s, t)
    for u in &s.vertices {
        if u.is_root() || u.0[u.0.len() - 1] != 1 {
            continue;
        }
        let parent = u.parent_word().expect("non-root");
        let left = parent.child(0);
        let s_sub: Vec<VertexId> = s
            .vertices
            .iter()
            .filter(|v| left.is_prefix_of(v))
            .map(|v| VertexId(v.0[left.0.len()..].to_vec()))
            .collect();
        let matches = match target {
            MallowsTarget::Finite(t) => {
                let t_sub: Vec<VertexId> = t
                    .vertices
                    .iter()
                    .filter(|v| left.is_prefix_of(v))
                    .map(|v| VertexId(v.0[left.0.len()..].to_vec()))
                    .collect();
                s_sub == t_sub
            }
            MallowsTarget::Spine(t) => match t.subtree_below(&left)? {
                SubtreeView::Infinite => false,
                SubtreeView::Finite(t_sub) => {
                    let mut t_sub = t_sub;
                    t_sub.sort();
                    s_sub == t_sub
                }
            },
        };
        if !matches {
            return Ok(Rat::zero());
        }
    }
    let l = mallows_left_weight(s);
    let n = mallows_right_steps(s);
    Ok(rat_pow(&(Rat::one() - p), -(l as i64)) * rat_pow(p, -(n as i64)))
}

// ---------------------------------------------------------------------------
// q-binomial urn
// ---------------------------------------------------------------------------

/// Interior q-binomial urn kernel in closed form.
pub fn qbinomial_urn_kernel_interior(
    from: (u64, u64),
    to: (u64, u64),
    q: &Rat,
    r: &Rat,
) -> Rat {
    let (i, j) = from;
    let (k, l) = to;
    if k < i || l < j {
        return Rat::zero();
    }
    // (1-q^{k-i+1})...(1-q^k) × (1-q^{ℓ-j+1})...(1-q^ℓ)
    //   / (1-q^{(k-i)+(ℓ-j)+1})...(1-q^{k+ℓ})
    let mut acc = Rat::one();
    for e in (k - i + 1)..=k {
        acc *= Rat::one() - rat_pow(q, e as i64);
    }
    for e in (l - j + 1)..=l {
        acc *= Rat::one() - rat_pow(q, e as i64);
    }
    for e in ((k - i) + (l - j) + 1)..=(k + l) {
        acc /= Rat::one() - rat_pow(q, e as i64);
    }
    acc *= rat_pow(r, -(i as i64)) * rat_pow(q, (j * (k - i)) as i64);
    for m in 0..j {
        acc /= Rat::one() - r * rat_pow(q, m as i64);
    }
    acc
}

/// Extended q-binomial urn kernel at a boundary point.
pub fn qbinomial_urn_kernel(
    from: (u64, u64),
    target: UrnBoundaryPoint,
    q: &Rat,
    r: &Rat,
) -> Rat {
    let (i, j) = from;
    match target {
        UrnBoundaryPoint::Finite(k) => {
            if i > k {
                return Rat::zero();
            }
            let mut acc = Rat::one();
            for e in (k - i + 1)..=k {
                acc *= Rat::one() - rat_pow(q, e as i64);
            }
            acc *= rat_pow(r, -(i as i64)) * rat_pow(q, (j * (k - i)) as i64);
            for m in 0..j {
                acc /= Rat::one() - r * rat_pow(q, m as i64);
            }
            acc
        }
        UrnBoundaryPoint::Infinity => {
            if j == 0 {
                rat_pow(r, -(i as i64))
            } else {
                Rat::zero()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Perfect-memory chains
// ---------------------------------------------------------------------------

/// Martin kernel of a chain with perfect memory: `ρ(i)^{-1} 1{i ≤ j}`,
/// with ρ the hitting probability from the reference state.
pub fn prefix_chain_kernel<S>(
    rho: &dyn Fn(&S) -> Rat,
    leq: &dyn Fn(&S, &S) -> bool,
    i: &S,
    j: &S,
) -> Result<Rat> {
    if !leq(i, j) {
        return Ok(Rat::zero());
    }
    let r = rho(i);
    if !r.is_positive() {
        return Err(TrickleError::InvalidState(
            "reference state cannot reach the source state".into(),
        ));
    }
    Ok(r.recip())
}

/// Verify the perfect-memory property for a chain given by a one-step law:
/// states reachable within `horizon` steps from the reference fall in
/// disjoint time slices with a unique predecessor each.
pub fn verify_perfect_memory<S: Ord + Clone>(
    reference: &S,
    step_law: &dyn Fn(&S) -> Vec<(S, Rat)>,
    horizon: usize,
) -> Result<()> {
    let mut time_of: BTreeMap<S, usize> = BTreeMap::new();
    let mut parent_of: BTreeMap<S, S> = BTreeMap::new();
    let mut layer = vec![reference.clone()];
    time_of.insert(reference.clone(), 0);
    for t in 0..horizon {
        let mut next = Vec::new();
        for s in &layer {
            for (succ, p) in step_law(s) {
                if !p.is_positive() {
                    continue;
                }
                if let Some(&t0) = time_of.get(&succ) {
                    if t0 != t + 1 {
                        return Err(TrickleError::PerfectMemoryViolated(
                            "state reachable at two different times".into(),
                        ));
                    }
                    if parent_of.get(&succ) != Some(s) {
                        return Err(TrickleError::PerfectMemoryViolated(
                            "two distinct states reach a common successor".into(),
                        ));
                    }
                } else {
                    time_of.insert(succ.clone(), t + 1);
                    parent_of.insert(succ.clone(), s.clone());
                    next.push(succ);
                }
            }
        }
        layer = next;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::tree_to_state;
    use crate::numeric::rat;
    use crate::routing::RoutingChainSpec;
    use crate::substrate::GraphKind;

    fn bst_model() -> ChainModel {
        ChainModel::new(
            GraphKind::BinaryTree,
            RoutingChainSpec::DirichletUrn { nu: vec![rat_int(1), rat_int(1)] },
        )
        .unwrap()
    }

    #[test]
    fn product_kernel_reference_state() {
        let model = bst_model();
        let y = tree_to_state(&GraphKind::BinaryTree, &Tree::from_words(&["e", "0", "01"]))
            .unwrap();
        assert_eq!(product_martin_kernel(&model, &TrickleState::initial(), &y), Rat::one());
    }

    #[test]
    fn product_kernel_bst_example() {
        let model = bst_model();
        let kind = GraphKind::BinaryTree;
        let s = tree_to_state(&kind, &Tree::from_words(&["e", "0"])).unwrap();
        let t = tree_to_state(&kind, &Tree::from_words(&["e", "0", "1"])).unwrap();
        assert_eq!(product_martin_kernel(&model, &s, &t), Rat::one());
        // incomparable
        let u = tree_to_state(&kind, &Tree::from_words(&["e", "1", "11"])).unwrap();
        assert_eq!(product_martin_kernel(&model, &s, &u), Rat::zero());
    }

    #[test]
    fn bst_kernel_examples() {
        let s = Tree::root_only();
        let t = Tree::from_words(&["e", "0", "1", "00"]);
        assert_eq!(bst_kernel(&s, &t), Rat::one());
        let s = Tree::from_words(&["e", "0"]);
        let t = Tree::from_words(&["e", "0", "1"]);
        assert_eq!(bst_kernel(&s, &t), Rat::one());
        let s = Tree::from_words(&["e", "1"]);
        let t = Tree::from_words(&["e", "0", "00"]);
        assert_eq!(bst_kernel(&s, &t), Rat::zero());
    }

    #[test]
    fn bst_kernel_matches_product_kernel() {
        let model = bst_model();
        let kind = GraphKind::BinaryTree;
        let trees = crate::oracle::enumerate_trees(&kind, 5, None).unwrap();
        for t in &trees {
            let y = tree_to_state(&kind, t).unwrap();
            for s in crate::oracle::enumerate_trees(&kind, 3, None).unwrap() {
                let x = tree_to_state(&kind, &s).unwrap();
                assert_eq!(
                    bst_kernel(&s, t),
                    product_martin_kernel(&model, &x, &y),
                    "s={} t={}",
                    s.serialize(),
                    t.serialize()
                );
            }
        }
    }

    #[test]
    fn bst_extended_kernel_examples() {
        let fair = BoundaryMeasure::fair(4);
        assert_eq!(bst_extended_kernel(&Tree::root_only(), &fair).unwrap(), Rat::one());
        let s = Tree::from_words(&["e", "0"]);
        assert_eq!(bst_extended_kernel(&s, &fair).unwrap(), Rat::one());
        let s = Tree::from_words(&["e", "0", "1"]);
        assert_eq!(bst_extended_kernel(&s, &fair).unwrap(), rat(3, 2));
        // depth shortfall errors
        let deep = Tree::from_words(&["e", "0", "00", "000", "0000", "00000"]);
        assert!(bst_extended_kernel(&deep, &fair).is_err());
    }

    #[test]
    fn bst_extended_kernel_harmonic() {
        // Σ_t P(s,t) h(t) = h(s) for the uniform external-vertex chain
        let mu = BoundaryMeasure::fair(5);
        let kind = GraphKind::BinaryTree;
        for s in crate::oracle::enumerate_trees(&kind, 4, None).unwrap() {
            let h_s = bst_extended_kernel(&s, &mu).unwrap();
            let mut lhs = Rat::zero();
            let ext = s.external_vertices(&kind);
            for v in &ext {
                let mut t = s.clone();
                t.insert(v.clone());
                lhs += bst_extended_kernel(&t, &mu).unwrap() / rat_int(ext.len() as i64);
            }
            assert_eq!(lhs, h_s, "harmonicity at {}", s.serialize());
        }
    }

    #[test]
    fn dirichlet_extended_kernel_examples() {
        let nu = vec![rat_int(1), rat_int(1)];
        let rho = vec![rat(1, 3), rat(2, 3)];
        assert_eq!(
            dirichlet_extended_kernel(&RoutingState::zero(), &rho, &nu),
            Rat::one()
        );
        // ν=(1,1), ξ=(1,0): 2 ρ_0
        assert_eq!(
            dirichlet_extended_kernel(&RoutingState::pair(1, 0), &rho, &nu),
            rat(2, 3)
        );
        let rho0 = vec![Rat::zero(), Rat::one()];
        assert_eq!(
            dirichlet_extended_kernel(&RoutingState::pair(1, 0), &rho0, &nu),
            Rat::zero()
        );
    }

    #[test]
    fn spacetime_extended_kernel_examples() {
        let p = vec![rat(1, 2), rat(1, 2)];
        assert_eq!(
            spacetime_extended_kernel(&RoutingState::pair(3, 1), &p, &p),
            Rat::one()
        );
        let rho = vec![rat(3, 4), rat(1, 4)];
        assert_eq!(
            spacetime_extended_kernel(&RoutingState::zero(), &rho, &p),
            Rat::one()
        );
        // (3/2)^2 · (1/2)
        assert_eq!(
            spacetime_extended_kernel(&RoutingState::pair(2, 1), &rho, &p),
            rat(9, 8)
        );
    }

    #[test]
    fn crp_block_kernel_matches_hit_ratio() {
        use crate::routing::crp_path_probability;
        for (alpha, theta) in [(rat(0, 1), rat_int(1)), (rat(1, 2), rat(1, 2)), (rat(-1, 2), rat_int(1))] {
            let states = crp_states_up_to(6, &alpha, &theta);
            for a in &states {
                if a.is_empty() {
                    continue;
                }
                for b in &states {
                    let want = {
                        let up = crp_path_probability(a, b, &alpha, &theta);
                        if up.is_zero() {
                            Rat::zero()
                        } else {
                            up / crp_path_probability(&[], b, &alpha, &theta)
                        }
                    };
                    assert_eq!(
                        crp_block_kernel(a, b, &alpha, &theta),
                        want,
                        "a={a:?} b={b:?} α={alpha} θ={theta}"
                    );
                }
            }
        }
    }

    fn crp_states_up_to(total: u64, alpha: &Rat, theta: &Rat) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        let mut frontier = vec![vec![]];
        while let Some(a) = frontier.pop() {
            let sum: u64 = a.iter().sum();
            if sum >= total {
                continue;
            }
            let mut succs = Vec::new();
            for k in 0..a.len() {
                let mut b = a.clone();
                b[k] += 1;
                succs.push(b);
            }
            if crp_block_cap(alpha, theta).map_or(true, |c| (a.len() as u64) < c) {
                let mut b = a.clone();
                b.push(1);
                succs.push(b);
            }
            for b in succs {
                if !out.contains(&b) {
                    out.push(b.clone());
                    frontier.push(b);
                }
            }
        }
        out
    }

    #[test]
    fn crp_extended_kernel_examples() {
        let (a0, t0) = (rat(0, 1), rat_int(1));
        let rho = vec![rat(1, 3), rat(1, 4)];
        assert_eq!(crp_extended_kernel(&[1], &rho, &a0, &t0).unwrap(), Rat::one());
        // a = (2): 2 ρ_1
        assert_eq!(crp_extended_kernel(&[2], &rho, &a0, &t0).unwrap(), rat(2, 3));
        // a_k ≥ 2 with ρ_k = 0 vanishes
        let rho0 = vec![Rat::zero()];
        assert_eq!(crp_extended_kernel(&[2], &rho0, &a0, &t0).unwrap(), Rat::zero());
        assert!(crp_extended_kernel(&[1], &rho, &rat(3, 2), &t0).is_err());
    }

    #[test]
    fn crp_extended_kernel_harmonic() {
        // Σ_b P(a,b) h(b) = h(a) at several parameter pairs and ρ
        let cases = [
            (rat(0, 1), rat_int(1), vec![rat(1, 2), rat(1, 4)]),
            (rat(1, 2), rat(1, 2), vec![rat(1, 3), rat(1, 3), rat(1, 6)]),
            (rat(-1, 2), rat_int(1), vec![rat(2, 3), rat(1, 3)]),
        ];
        for (alpha, theta, rho) in cases {
            let spec = RoutingChainSpec::CrpBlocks { alpha: alpha.clone(), theta: theta.clone() };
            for a in crp_states_up_to(5, &alpha, &theta) {
                if a.is_empty() {
                    continue;
                }
                let h = crp_extended_kernel(&a, &rho, &alpha, &theta).unwrap();
                let xi = RoutingState(a.clone());
                let mut lhs = Rat::zero();
                for (slot, p) in spec.transitions(&xi).unwrap() {
                    let b = xi.bump(slot);
                    lhs += p * crp_extended_kernel(&b.0, &rho, &alpha, &theta).unwrap();
                }
                assert_eq!(lhs, h, "a={a:?} α={alpha} θ={theta}");
            }
        }
    }

    #[test]
    fn mallows_urn_kernel_examples() {
        let p = rat(1, 3);
        assert_eq!(
            mallows_urn_kernel((0, 0), UrnBoundaryPoint::Finite(5), &p),
            Rat::one()
        );
        // ((2,0), Finite(5)): (2/3)^{-2} = 9/4
        assert_eq!(
            mallows_urn_kernel((2, 0), UrnBoundaryPoint::Finite(5), &p),
            rat(9, 4)
        );
        assert_eq!(
            mallows_urn_kernel((1, 1), UrnBoundaryPoint::Infinity, &p),
            Rat::zero()
        );
    }

    #[test]
    fn mallows_urn_kernels_harmonic() {
        let p = rat(1, 4);
        let spec = RoutingChainSpec::MallowsUrn { p: p.clone() };
        let targets = [
            UrnBoundaryPoint::Finite(0),
            UrnBoundaryPoint::Finite(3),
            UrnBoundaryPoint::Infinity,
        ];
        for target in targets {
            for i in 0..6u64 {
                for j in 0..6u64 {
                    let h = mallows_urn_kernel((i, j), target, &p);
                    if h.is_zero() {
                        continue;
                    }
                    let xi = RoutingState::pair(i, j);
                    let mut lhs = Rat::zero();
                    for (slot, q) in spec.transitions(&xi).unwrap() {
                        let b = xi.bump(slot);
                        lhs += q * mallows_urn_kernel((b.get(0), b.get(1)), target, &p);
                    }
                    assert_eq!(lhs, h, "({i},{j}) at {target:?}");
                }
            }
        }
    }

    #[test]
    fn qbinomial_urn_kernels_harmonic() {
        let (q, r) = (rat(1, 2), rat(1, 2));
        let spec = RoutingChainSpec::QBinomialUrn { q: q.clone(), r: r.clone() };
        let targets = [
            UrnBoundaryPoint::Finite(0),
            UrnBoundaryPoint::Finite(4),
            UrnBoundaryPoint::Infinity,
        ];
        for target in targets {
            for i in 0..6u64 {
                for j in 0..6u64 {
                    let h = qbinomial_urn_kernel((i, j), target, &q, &r);
                    if h.is_zero() {
                        continue;
                    }
                    let xi = RoutingState::pair(i, j);
                    let mut lhs = Rat::zero();
                    for (slot, w) in spec.transitions(&xi).unwrap() {
                        let b = xi.bump(slot);
                        lhs += w * qbinomial_urn_kernel((b.get(0), b.get(1)), target, &q, &r);
                    }
                    assert_eq!(lhs, h, "({i},{j}) at {target:?}");
                }
            }
        }
    }

    #[test]
    fn qbinomial_interior_kernel_is_hit_ratio() {
        let (q, r) = (rat(1, 3), rat(2, 5));
        use crate::routing::qbinomial_hit;
        for i in 0..4u64 {
            for j in 0..4u64 {
                for k in i..6u64 {
                    for l in j..6u64 {
                        let want = qbinomial_hit((i, j), (k, l), &q, &r)
                            / qbinomial_hit((0, 0), (k, l), &q, &r);
                        assert_eq!(
                            qbinomial_urn_kernel_interior((i, j), (k, l), &q, &r),
                            want,
                            "({i},{j})→({k},{l})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn qbinomial_infinity_example() {
        let (q, r) = (rat(1, 2), rat(1, 3));
        assert_eq!(
            qbinomial_urn_kernel((1, 0), UrnBoundaryPoint::Infinity, &q, &r),
            rat_int(3)
        );
    }

    #[test]
    fn mallows_tree_kernel_examples() {
        let p = rat(1, 3);
        let s = Tree::root_only();
        let t = Tree::from_words(&["e", "0", "1"]);
        assert_eq!(
            mallows_tree_kernel(&s, &MallowsTarget::Finite(&t), &p).unwrap(),
            Rat::one()
        );
        // s={e,1}, t={e,1,11}: L=0, N=1 → p^{-1}
        let s = Tree::from_words(&["e", "1"]);
        let t = Tree::from_words(&["e", "1", "11"]);
        assert_eq!(
            mallows_tree_kernel(&s, &MallowsTarget::Finite(&t), &p).unwrap(),
            rat_int(3)
        );
        // s={e,0}, t={e,0,1}: L=1, N=0 → (1-p)^{-1}
        let s = Tree::from_words(&["e", "0"]);
        let t = Tree::from_words(&["e", "0", "1"]);
        assert_eq!(
            mallows_tree_kernel(&s, &MallowsTarget::Finite(&t), &p).unwrap(),
            rat(3, 2)
        );
        // indicator failure: s has 1 and a left subtree smaller than t's
        let s = Tree::from_words(&["e", "1"]);
        let t = Tree::from_words(&["e", "0", "1"]);
        assert_eq!(
            mallows_tree_kernel(&s, &MallowsTarget::Finite(&t), &p).unwrap(),
            Rat::zero()
        );
    }

    #[test]
    fn mallows_tree_kernel_spine_targets() {
        let p = rat(1, 2);
        // spine 1,1,1 with a hanger {ε} at position 1 (vertex 10)
        let mut hangers = BTreeMap::new();
        hangers.insert(1usize, Tree::root_only());
        let spine = SpineTree::new(vec![1, 1, 1, 1], hangers).unwrap();
        // membership
        assert!(spine.contains(&VertexId::from_binary("11")).unwrap());
        assert!(spine.contains(&VertexId::from_binary("10")).unwrap());
        assert!(!spine.contains(&VertexId::from_binary("100")).unwrap());
        assert!(!spine.contains(&VertexId::from_binary("0")).unwrap());

        // s = {e,1,10,11}: contains the right step at 1 (11 ∈ s) with left
        // sibling subtree {10} matching the hanger
        let s = Tree::from_words(&["e", "1", "10", "11"]);
        let k = mallows_tree_kernel(&s, &MallowsTarget::Spine(&spine), &p).unwrap();
        // L(s)=1 (10 under 1's left child), N(s)=2 (1 and 11)
        assert_eq!(k, rat_int(8));

        // truncations are eventually constant at the spine value
        for n in 2..=4usize {
            let tn = spine.truncate(n).unwrap();
            assert_eq!(
                mallows_tree_kernel(&s, &MallowsTarget::Finite(&tn), &p).unwrap(),
                k,
                "truncation at {n}"
            );
        }

        // depth probes beyond the stored structure error out
        let deep = Tree::from_words(&["e", "1", "11", "111", "1111", "11111"]);
        assert!(mallows_tree_kernel(&deep, &MallowsTarget::Spine(&spine), &p).is_err());
    }

    #[test]
    fn mallows_tree_kernel_harmonic_against_spines() {
        // Σ_t P(s,t) h(t) = h(s) where P follows the Mallows trickle law
        let p = rat(1, 3);
        let model = ChainModel::new(
            GraphKind::BinaryTree,
            RoutingChainSpec::MallowsUrn { p: p.clone() },
        )
        .unwrap();
        let mut hangers = BTreeMap::new();
        hangers.insert(0usize, Tree::root_only());
        let spine = SpineTree::new(vec![1, 1, 1, 1, 1, 1], hangers).unwrap();
        let kind = GraphKind::BinaryTree;
        for s in crate::oracle::enumerate_trees(&kind, 3, None).unwrap() {
            let h = mallows_tree_kernel(&s, &MallowsTarget::Spine(&spine), &p).unwrap();
            if h.is_zero() {
                continue;
            }
            let x = tree_to_state(&kind, &s).unwrap();
            let mut lhs = Rat::zero();
            for (succ, w) in crate::oracle::full_step_law(&model, &x).unwrap() {
                let t = crate::engine::state_to_tree(&kind, &succ).unwrap();
                lhs += w * mallows_tree_kernel(&t, &MallowsTarget::Spine(&spine), &p).unwrap();
            }
            assert_eq!(lhs, h, "s={}", s.serialize());
        }
    }

    #[test]
    fn prefix_chain_kernel_basics() {
        let rho = |s: &u64| rat(1, 1 << *s.min(&20));
        let leq = |a: &u64, b: &u64| a <= b;
        assert_eq!(prefix_chain_kernel(&rho, &leq, &0, &5).unwrap(), Rat::one());
        assert_eq!(prefix_chain_kernel(&rho, &leq, &3, &7).unwrap(), rat_int(8));
        assert_eq!(prefix_chain_kernel(&rho, &leq, &7, &3).unwrap(), Rat::zero());
    }

    #[test]
    fn perfect_memory_detection() {
        // composition chain: words growing by one letter — perfect memory
        let step = |w: &Vec<u8>| {
            let mut out = Vec::new();
            for c in 0..2u8 {
                let mut v = w.clone();
                v.push(c);
                out.push((v, rat(1, 2)));
            }
            out
        };
        assert!(verify_perfect_memory(&Vec::<u8>::new(), &step, 6).is_ok());

        // a chain that merges states is rejected
        let merge = |s: &u64| vec![(s + 1, rat(1, 2)), (s + 2, rat(1, 2))];
        assert!(verify_perfect_memory(&0u64, &merge, 4).is_err());
    }
}
