//! The trickle-down engine: states, the one-particle step, deterministic
//! replays, and the tree/state correspondence on tree substrates.
//!
//! Time is indexed from 0: the time-0 state is the all-zero state with the
//! root occupied by the first particle, and the state at time n reflects
//! n+1 particles fed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::routing::{RoutingChainSpec, RoutingState};
use crate::substrate::{GraphKind, VertexId};
use crate::{Result, TrickleError};

/// A chain model: substrate plus the common routing family for every vertex.
#[derive(Clone, Debug)]
pub struct ChainModel {
    pub kind: GraphKind,
    pub spec: RoutingChainSpec,
}

impl ChainModel {
    pub fn new(kind: GraphKind, spec: RoutingChainSpec) -> Result<Self> {
        spec.validate()?;
        if let (Some(slots), Some(arity)) = (spec.slot_count(), kind.arity()) {
            if slots != arity {
                return Err(TrickleError::InvalidParameter(format!(
                    "family routes over {slots} slots but substrate {kind} has arity {arity}"
                )));
            }
        }
        Ok(ChainModel { kind, spec })
    }
}

/// Finite-support chain state: routing counts per occupied vertex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct TrickleState {
    pub per_vertex: BTreeMap<VertexId, RoutingState>,
}

impl TrickleState {
    /// Time-0 state: root occupied, all counts zero.
    pub fn initial() -> Self {
        TrickleState::default()
    }

    pub fn routing(&self, u: &VertexId) -> RoutingState {
        self.per_vertex.get(u).cloned().unwrap_or_default()
    }

    /// Time index: onward routings from the root.
    pub fn time(&self) -> u64 {
        self.routing(&VertexId::root()).size()
    }

    /// Particles fed so far (time + 1).
    pub fn particles_fed(&self) -> u64 {
        self.time() + 1
    }

    /// Arrivals at `u`: particles routed toward `u` by its parents.
    pub fn arrivals(&self, kind: &GraphKind, u: &VertexId) -> u64 {
        if u.is_root() {
            return self.particles_fed();
        }
        kind.parents(u)
            .iter()
            .map(|par| {
                let slot = kind.slot_of(par, u).expect("parent/child mismatch");
                self.routing(par).get(slot)
            })
            .sum()
    }

    /// A vertex is occupied once a particle has rested there.
    pub fn is_occupied(&self, kind: &GraphKind, u: &VertexId) -> bool {
        u.is_root() || self.arrivals(kind, u) >= 1
    }

    /// Occupied vertices in canonical order.
    pub fn occupied(&self, kind: &GraphKind) -> Vec<VertexId> {
        let mut out = vec![VertexId::root()];
        let mut seen: std::collections::BTreeSet<VertexId> = out.iter().cloned().collect();
        for (u, counts) in &self.per_vertex {
            for (slot, &c) in counts.0.iter().enumerate() {
                if c > 0 {
                    let v = kind.child_at(u, slot);
                    if seen.insert(v.clone()) {
                        out.push(v);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Local flow conservation at `u`: onward routings equal arrivals
    /// minus the resting particle.
    pub fn consistent_at(&self, kind: &GraphKind, u: &VertexId) -> bool {
        self.routing(u).size() == self.arrivals(kind, u).saturating_sub(1)
    }

    /// Consistency at every occupied vertex.
    pub fn consistent(&self, kind: &GraphKind) -> bool {
        self.occupied(kind).iter().all(|u| self.consistent_at(kind, u))
    }

    /// Componentwise comparison along the chain's partial order.
    pub fn leq(&self, other: &TrickleState) -> bool {
        self.per_vertex
            .iter()
            .all(|(u, xi)| xi.leq(&other.routing(u)))
    }
}

/// Rooted subtree of a tree substrate (prefix-closed vertex set containing
/// the root; Harris-Ulam trees are additionally closed under earlier
/// siblings).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Tree {
    pub vertices: std::collections::BTreeSet<VertexId>,
}

impl Tree {
    pub fn root_only() -> Self {
        Tree {
            vertices: [VertexId::root()].into_iter().collect(),
        }
    }

    pub fn from_words(words: &[&str]) -> Self {
        Tree {
            vertices: words
                .iter()
                .map(|w| crate::substrate::parse_word(w).expect("bad word"))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, u: &VertexId) -> bool {
        self.vertices.contains(u)
    }

    pub fn insert(&mut self, u: VertexId) {
        self.vertices.insert(u);
    }

    pub fn depth(&self) -> usize {
        self.vertices.iter().map(|u| u.depth()).max().unwrap_or(0)
    }

    /// #t(u) = number of tree vertices weakly below u.
    pub fn subtree_count(&self, u: &VertexId) -> u64 {
        self.vertices.iter().filter(|v| u.is_prefix_of(v)).count() as u64
    }

    /// Validity for a substrate: prefix-closed, rooted, and for
    /// Harris-Ulam closed under earlier siblings.
    pub fn valid_for(&self, kind: &GraphKind) -> bool {
        if !kind.is_tree() || !self.contains(&VertexId::root()) {
            return false;
        }
        self.vertices.iter().all(|u| {
            if kind.validate(u).is_err() {
                return false;
            }
            if let Some(p) = u.parent_word() {
                if !self.contains(&p) {
                    return false;
                }
                if matches!(kind, GraphKind::HarrisUlam(_)) {
                    let last = u.0[u.0.len() - 1];
                    for m in 1..last {
                        if !self.contains(&p.child(m)) {
                            return false;
                        }
                    }
                }
            }
            true
        })
    }

    /// External vertices: not in the tree, adjoinable in one step.
    pub fn external_vertices(&self, kind: &GraphKind) -> Vec<VertexId> {
        let mut out = Vec::new();
        for u in &self.vertices {
            match kind {
                GraphKind::BinaryTree => {
                    for v in kind.children(u) {
                        if !self.contains(&v) {
                            out.push(v);
                        }
                    }
                }
                GraphKind::HarrisUlam(cap) => {
                    let mut m = 1;
                    while self.contains(&u.child(m)) {
                        m += 1;
                    }
                    if cap.map_or(true, |c| m <= c) {
                        out.push(u.child(m));
                    }
                }
                GraphKind::Grid2D => unreachable!("tree substrate required"),
            }
        }
        out.sort();
        out
    }

    /// Canonical serialization: sorted vertex words, comma separated.
    pub fn serialize(&self) -> String {
        self.vertices
            .iter()
            .map(crate::substrate::format_word)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut vertices = std::collections::BTreeSet::new();
        for part in s.split(',') {
            vertices.insert(crate::substrate::parse_word(part)?);
        }
        Ok(Tree { vertices })
    }
}

/// Occupied set of a consistent state on a tree substrate.
pub fn state_to_tree(kind: &GraphKind, state: &TrickleState) -> Result<Tree> {
    if !kind.is_tree() {
        return Err(TrickleError::InvalidState(
            "tree/state correspondence needs a tree substrate".into(),
        ));
    }
    Ok(Tree {
        vertices: state.occupied(kind).into_iter().collect(),
    })
}

/// State whose routing counts are the subtree sizes of `t`:
/// `(x^u)^v = #{w in t : v ≤ w}`.
pub fn tree_to_state(kind: &GraphKind, t: &Tree) -> Result<TrickleState> {
    if !kind.is_tree() {
        return Err(TrickleError::InvalidState(
            "tree/state correspondence needs a tree substrate".into(),
        ));
    }
    if !t.valid_for(kind) {
        return Err(TrickleError::InvalidState(format!(
            "not a valid rooted tree for {kind}: {}",
            t.serialize()
        )));
    }
    let mut per_vertex = BTreeMap::new();
    for u in &t.vertices {
        let max_slot = match kind {
            GraphKind::BinaryTree => 2,
            GraphKind::HarrisUlam(_) => {
                let mut m = 0;
                while t.contains(&u.child(m as u32 + 1)) {
                    m += 1;
                }
                m
            }
            GraphKind::Grid2D => unreachable!(),
        };
        let mut counts = Vec::with_capacity(max_slot);
        for slot in 0..max_slot {
            counts.push(t.subtree_count(&kind.child_at(u, slot)));
        }
        while counts.last() == Some(&0) {
            counts.pop();
        }
        if !counts.is_empty() {
            per_vertex.insert(u.clone(), RoutingState(counts));
        }
    }
    Ok(TrickleState { per_vertex })
}

/// Per-vertex random stream derived from a master seed and the vertex
/// word by a stable hash; realizes the independence of the routing chains
/// and makes trajectories reproducible.
pub fn vertex_stream(master_seed: u64, u: &VertexId) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(fnv1a(master_seed, &u.0))
}

/// The `local_time`-th uniform draw of a vertex's stream, addressed
/// directly so simulations need not retain per-vertex generator state.
pub fn vertex_draw(master_seed: u64, word: &[u32], local_time: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(master_seed, word));
    rng.set_word_pos(2 * local_time as u128);
    rng.gen()
}

/// Seed for a replica index (adding replicas never perturbs existing ones).
pub fn replica_seed(master_seed: u64, replica: u64) -> u64 {
    fnv1a(
        master_seed ^ 0x9e37_79b9_7f4a_7c15,
        &[replica as u32, (replica >> 32) as u32],
    )
}

fn fnv1a(seed: u64, word: &[u32]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed.wrapping_mul(0x100_0000_01b3);
    for &c in word {
        for b in c.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
    }
    // final mix so short words diffuse
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^ (h >> 33)
}

/// A running simulation with per-vertex derived streams.
pub struct Trickler {
    pub model: ChainModel,
    pub state: TrickleState,
    master_seed: u64,
    sampler: crate::routing::SlotSampler,
}

/// One step's record for trajectory dumps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub n: u64,
    pub new_vertex: VertexId,
    pub occupied_count: u64,
}

impl Trickler {
    pub fn new(model: ChainModel, master_seed: u64) -> Self {
        let sampler = model.spec.sampler();
        Trickler {
            model,
            state: TrickleState::initial(),
            master_seed,
            sampler,
        }
    }

    /// Feed one particle at the root and trickle it down to rest.
    pub fn step(&mut self) -> StepRecord {
        if self.model.kind.is_tree() {
            return self.step_tree();
        }
        let kind = self.model.kind;
        let mut at = VertexId::root();
        loop {
            // `at` is occupied; route the particle one level down.
            let xi = self.state.routing(&at);
            let u01 = vertex_draw(self.master_seed, &at.0, xi.size());
            let slot = self.sampler.sample(&xi.0, u01);
            let child = kind.child_at(&at, slot);
            let child_occupied = self.state.is_occupied(&kind, &child);
            let entry = self.state.per_vertex.entry(at.clone()).or_default();
            if entry.0.len() <= slot {
                entry.0.resize(slot + 1, 0);
            }
            entry.0[slot] += 1;
            if !child_occupied {
                return StepRecord {
                    n: self.state.time(),
                    new_vertex: child,
                    occupied_count: self.state.particles_fed(),
                };
            }
            at = child;
        }
    }

    /// Tree-substrate step: on trees a child's occupancy is readable from
    /// its single parent's slot count, so the walk needs one map probe per
    /// level and allocates only for the vertex it finally occupies.
    fn step_tree(&mut self) -> StepRecord {
        let letter_base = match self.model.kind {
            GraphKind::HarrisUlam(_) => 1u32,
            _ => 0u32,
        };
        let mut path: Vec<u32> = Vec::with_capacity(64);
        loop {
            let (slot, child_occupied) =
                match self.state.per_vertex.get_mut(path.as_slice()) {
                    Some(entry) => {
                        let local: u64 = entry.0.iter().sum();
                        let u01 = vertex_draw(self.master_seed, &path, local);
                        let slot = self.sampler.sample(&entry.0, u01);
                        if entry.0.len() <= slot {
                            entry.0.resize(slot + 1, 0);
                        }
                        let occupied = entry.0[slot] >= 1;
                        entry.0[slot] += 1;
                        (slot, occupied)
                    }
                    None => {
                        let u01 = vertex_draw(self.master_seed, &path, 0);
                        let slot = self.sampler.sample(&[], u01);
                        let mut counts = vec![0; slot + 1];
                        counts[slot] = 1;
                        self.state
                            .per_vertex
                            .insert(VertexId(path.clone()), RoutingState(counts));
                        (slot, false)
                    }
                };
            path.push(letter_base + slot as u32);
            if !child_occupied {
                return StepRecord {
                    n: self.state.time(),
                    new_vertex: VertexId(path),
                    occupied_count: self.state.particles_fed(),
                };
            }
        }
    }

    /// Advance to time `n`.
    pub fn run_to(&mut self, n: u64) -> Vec<StepRecord> {
        let mut recs = Vec::new();
        while self.state.time() < n {
            recs.push(self.step());
        }
        recs
    }
}

/// Deterministic routing instructions: for each vertex, the sequence of
/// slots its successive routed particles take.
#[derive(Clone, Debug, Default)]
pub struct RoutingPlan {
    pub slots: BTreeMap<VertexId, Vec<usize>>,
}

impl RoutingPlan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, u: &str, slots: &[usize]) {
        self.slots
            .insert(crate::substrate::parse_word(u).expect("bad word"), slots.to_vec());
    }

    fn slot(&self, u: &VertexId, local_time: usize) -> Result<usize> {
        self.slots
            .get(u)
            .and_then(|s| s.get(local_time))
            .copied()
            .ok_or_else(|| {
                TrickleError::Other(format!(
                    "routing instructions for {u:?} exhausted at local time {local_time}"
                ))
            })
    }
}

/// Clock value a_n^u under a deterministic plan: particles routed onward
/// from `u` by time `n`.
pub fn clock(kind: &GraphKind, plan: &RoutingPlan, u: &VertexId, n: u64) -> Result<u64> {
    let state = replay(kind, plan, n)?;
    Ok(state.routing(u).size())
}

/// Replay the construction for `n` time steps (n+1 particles) under a
/// deterministic plan; returns x_n.
pub fn replay(kind: &GraphKind, plan: &RoutingPlan, n: u64) -> Result<TrickleState> {
    let mut state = TrickleState::initial();
    for _ in 0..n {
        let mut at = VertexId::root();
        loop {
            let local = state.routing(&at).size() as usize;
            let slot = plan.slot(&at, local)?;
            let child = kind.child_at(&at, slot);
            let child_occupied = state.is_occupied(kind, &child);
            let entry = state.per_vertex.entry(at.clone()).or_default();
            if entry.0.len() <= slot {
                entry.0.resize(slot + 1, 0);
            }
            entry.0[slot] += 1;
            if !child_occupied {
                break;
            }
            at = child;
        }
    }
    debug_assert!(state.consistent(kind));
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, rat_int};

    fn grid_plan() -> RoutingPlan {
        // A consistent reconstruction of the worked grid example, oriented
        // so the clock sequence below sits at the vertex (0,1): the root
        // routes r,r,u,u,r,u,r,u,r,u,r,u.
        let mut plan = RoutingPlan::new();
        plan.set("e", &[0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
        // (1,0) routes up, up, right, right, up
        plan.set("(1,0)", &[1, 1, 0, 0, 1]);
        // (0,1) routes right, right, right, up, up
        plan.set("(0,1)", &[0, 0, 0, 1, 1]);
        // (1,1) routes up first, then arbitrary
        plan.set("(1,1)", &[1, 0, 0, 0, 0]);
        // everything else alternates right/up
        for i in 0..=12u32 {
            for j in 0..=12u32 {
                let v = VertexId::grid(i, j);
                plan.slots.entry(v).or_insert_with(|| {
                    (0..12).map(|k| k % 2).collect()
                });
            }
        }
        plan
    }

    #[test]
    fn replay_time_zero_is_empty() {
        let state = replay(&GraphKind::Grid2D, &grid_plan(), 0).unwrap();
        assert!(state.per_vertex.is_empty());
        assert_eq!(state.particles_fed(), 1);
    }

    #[test]
    fn quincunx_clock_sequence() {
        // clock at (0,1) over times 0..5 reads 0,0,0,0,1,1
        let plan = grid_plan();
        let kind = GraphKind::Grid2D;
        let u = VertexId::grid(0, 1);
        let got: Vec<u64> = (0..=5).map(|n| clock(&kind, &plan, &u, n).unwrap()).collect();
        assert_eq!(got, vec![0, 0, 0, 0, 1, 1]);
    }

    #[test]
    fn quincunx_state_after_five_particles() {
        // After 5 particles the root has routed (2,2). The printed source
        // for this configuration gives one vertex a pair that violates
        // flow conservation; the values asserted here are the unique
        // consistent completion.
        let kind = GraphKind::Grid2D;
        let state = replay(&kind, &grid_plan(), 4).unwrap();
        assert_eq!(state.routing(&VertexId::root()), RoutingState::pair(2, 2));
        assert_eq!(state.routing(&VertexId::grid(1, 0)), RoutingState::pair(0, 1));
        assert_eq!(state.routing(&VertexId::grid(0, 1)), RoutingState::pair(1, 0));
        assert_eq!(state.routing(&VertexId::grid(1, 1)), RoutingState::pair(0, 1));
        assert_eq!(state.per_vertex.len(), 4);
        assert!(state.consistent(&kind));
    }

    #[test]
    fn quincunx_at_twelve() {
        // 13 particles fed: root clock 12, root counts (6,6), and the two
        // depth-1 vertices have each routed 5 onward.
        let kind = GraphKind::Grid2D;
        let plan = grid_plan();
        let state = replay(&kind, &plan, 12).unwrap();
        assert_eq!(state.particles_fed(), 13);
        assert_eq!(state.routing(&VertexId::root()), RoutingState::pair(6, 6));
        assert_eq!(clock(&kind, &plan, &VertexId::grid(1, 0), 12).unwrap(), 5);
        assert_eq!(clock(&kind, &plan, &VertexId::grid(0, 1), 12).unwrap(), 5);
        assert_eq!(state.routing(&VertexId::grid(1, 0)), RoutingState::pair(2, 3));
        assert_eq!(state.routing(&VertexId::grid(0, 1)), RoutingState::pair(3, 2));
        assert!(state.consistent(&kind));
    }

    #[test]
    fn step_keeps_consistency_and_monotonicity() {
        let model = ChainModel::new(
            GraphKind::BinaryTree,
            RoutingChainSpec::DirichletUrn { nu: vec![rat_int(1), rat_int(1)] },
        )
        .unwrap();
        let mut sim = Trickler::new(model, 7);
        let mut prev = sim.state.clone();
        let mut prev_occ = prev.occupied(&GraphKind::BinaryTree).len();
        for _ in 0..60 {
            let rec = sim.step();
            assert!(sim.state.consistent(&GraphKind::BinaryTree));
            assert!(prev.leq(&sim.state));
            let occ = sim.state.occupied(&GraphKind::BinaryTree).len();
            assert_eq!(occ, prev_occ + 1, "occupied set grows by one");
            assert!(!prev.is_occupied(&GraphKind::BinaryTree, &rec.new_vertex));
            prev = sim.state.clone();
            prev_occ = occ;
        }
    }

    #[test]
    fn step_reproducible_for_fixed_seed() {
        let model = ChainModel::new(
            GraphKind::BinaryTree,
            RoutingChainSpec::MallowsUrn { p: rat(1, 3) },
        )
        .unwrap();
        let mut a = Trickler::new(model.clone(), 42);
        let mut b = Trickler::new(model, 42);
        a.run_to(200);
        b.run_to(200);
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn grid_trickler_runs() {
        let model = ChainModel::new(
            GraphKind::Grid2D,
            RoutingChainSpec::BernoulliWalk { p: vec![rat(1, 2), rat(1, 2)] },
        )
        .unwrap();
        let mut sim = Trickler::new(model, 3);
        sim.run_to(50);
        assert!(sim.state.consistent(&GraphKind::Grid2D));
        assert_eq!(sim.state.particles_fed(), 51);
    }

    #[test]
    fn tree_state_round_trip_examples() {
        let kind = GraphKind::BinaryTree;
        let t = Tree::from_words(&["e", "0", "1"]);
        let x = tree_to_state(&kind, &t).unwrap();
        assert_eq!(x.routing(&VertexId::root()), RoutingState::pair(1, 1));
        assert_eq!(x.per_vertex.len(), 1);
        assert_eq!(state_to_tree(&kind, &x).unwrap(), t);

        let t = Tree::from_words(&["e", "1", "10"]);
        let x = tree_to_state(&kind, &t).unwrap();
        assert_eq!(x.routing(&VertexId::root()), RoutingState::pair(0, 2));
        assert_eq!(x.routing(&VertexId::from_binary("1")), RoutingState::pair(1, 0));
        assert_eq!(state_to_tree(&kind, &x).unwrap(), t);

        let t = Tree::root_only();
        let x = tree_to_state(&kind, &t).unwrap();
        assert!(x.per_vertex.is_empty());
        assert_eq!(state_to_tree(&kind, &x).unwrap(), t);
    }

    #[test]
    fn subtree_count_examples() {
        let t = Tree::from_words(&["e", "0", "1"]);
        assert_eq!(t.subtree_count(&VertexId::root()), 3);
        assert_eq!(t.subtree_count(&VertexId::from_binary("0")), 1);
        let t = Tree::from_words(&["e", "1", "10", "11"]);
        assert_eq!(t.subtree_count(&VertexId::from_binary("1")), 3);
    }

    #[test]
    fn harris_ulam_tree_validity() {
        let kind = GraphKind::HarrisUlam(None);
        assert!(Tree::from_words(&["e", "1", "2", "21"]).valid_for(&kind));
        // sibling gap: 2 requires 1
        assert!(!Tree::from_words(&["e", "2"]).valid_for(&kind));
        let capped = GraphKind::HarrisUlam(Some(2));
        assert!(!Tree::from_words(&["e", "1", "2", "3"]).valid_for(&capped));
    }

    #[test]
    fn external_vertices_examples() {
        let kind = GraphKind::BinaryTree;
        let t = Tree::from_words(&["e", "0"]);
        let ext = t.external_vertices(&kind);
        assert_eq!(
            ext,
            vec![
                VertexId::from_binary("00"),
                VertexId::from_binary("01"),
                VertexId::from_binary("1")
            ]
        );
        let hu = GraphKind::HarrisUlam(None);
        let t = Tree::from_words(&["e", "1", "2"]);
        let ext = t.external_vertices(&hu);
        // one external per tree vertex
        assert_eq!(ext.len(), 3);
        assert!(ext.contains(&VertexId(vec![3])));
        assert!(ext.contains(&VertexId(vec![1, 1])));
        assert!(ext.contains(&VertexId(vec![2, 1])));
    }
}
