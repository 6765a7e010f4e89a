//! Boundary objects: measures on killed path space, admissible labelings,
//! empirical ratio estimators, and stick-breaking samplers of the limit
//! random measures.
//!
//! Exact mode carries rational cylinder masses and is what kernels and
//! h-transforms consume; sampling mode carries f64 masses and feeds the
//! statistical tests only. The two modes are separate types so they cannot
//! be mixed accidentally.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use num::{One, Signed, Zero};
use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::engine::Tree;
use crate::numeric::{format_rat, parse_rat, rat_int, Rat};
use crate::substrate::{format_word, parse_word, GraphKind, VertexId};
use crate::{Result, TrickleError};

/// A directed root path, possibly killed at its end (suffix ⋄⋄⋄…).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KilledPath {
    /// Endpoint of the traversed prefix (tree substrates: the path is its
    /// set of prefixes).
    pub prefix: VertexId,
    /// True when the path dies at `prefix`; false when `prefix` is merely
    /// as far as the stored depth could resolve an infinite path.
    pub killed: bool,
}

/// Depth-truncated measure on killed path space, exact cylinder masses.
///
/// `mass[u]` is the mass of paths passing through `u`; `killed[u]` the
/// mass dying exactly at `u`. Consistency `μ_u = κ_u + Σ_children μ_v`
/// holds exactly at every stored vertex above the truncation depth.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMeasure {
    pub kind: GraphKind,
    pub depth: usize,
    mass: BTreeMap<VertexId, Rat>,
    killed: BTreeMap<VertexId, Rat>,
}

impl BoundaryMeasure {
    /// Build from explicit cylinder and killed masses; verifies the
    /// consistency identity at every vertex of depth < `depth`.
    pub fn new(
        kind: GraphKind,
        depth: usize,
        mass: BTreeMap<VertexId, Rat>,
        killed: BTreeMap<VertexId, Rat>,
    ) -> Result<Self> {
        if !kind.is_tree() {
            return Err(TrickleError::InvalidState(
                "boundary measures live on tree substrates".into(),
            ));
        }
        let m = BoundaryMeasure { kind, depth, mass, killed };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        if !self.mass_at(&VertexId::root())?.is_one() {
            return Err(TrickleError::InvalidState("root mass must be 1".into()));
        }
        for (u, mu) in &self.mass {
            if mu.is_negative() {
                return Err(TrickleError::InvalidState("negative cylinder mass".into()));
            }
            if u.depth() >= self.depth {
                continue;
            }
            let children_total: Rat = self
                .mass
                .iter()
                .filter(|(v, _)| v.parent_word().as_ref() == Some(u))
                .map(|(_, m)| m.clone())
                .sum();
            let kappa = self.killed_at(u)?;
            if &(children_total + kappa) != mu {
                return Err(TrickleError::InvalidState(format!(
                    "mass at {} does not split into children plus killed mass",
                    format_word(u)
                )));
            }
        }
        Ok(())
    }

    /// μ_u; zero for unlisted vertices within depth, error beyond depth.
    pub fn mass_at(&self, u: &VertexId) -> Result<Rat> {
        if u.depth() > self.depth {
            return Err(TrickleError::DepthInsufficient {
                have: self.depth,
                need: u.depth(),
            });
        }
        Ok(self.mass.get(u).cloned().unwrap_or_else(Rat::zero))
    }

    /// κ_u.
    pub fn killed_at(&self, u: &VertexId) -> Result<Rat> {
        if u.depth() > self.depth {
            return Err(TrickleError::DepthInsufficient {
                have: self.depth,
                need: u.depth(),
            });
        }
        Ok(self.killed.get(u).cloned().unwrap_or_else(Rat::zero))
    }

    /// True when no mass is killed within the stored depth.
    pub fn is_unkilled(&self) -> bool {
        self.killed.values().all(|k| k.is_zero())
    }

    /// The fair coin-tossing measure on infinite binary paths, to `depth`.
    pub fn fair(depth: usize) -> Self {
        let mut mass = BTreeMap::new();
        let mut frontier = vec![(VertexId::root(), Rat::one())];
        while let Some((u, m)) = frontier.pop() {
            if u.depth() < depth {
                for c in 0..2u32 {
                    frontier.push((u.child(c), &m / rat_int(2)));
                }
            }
            mass.insert(u, m);
        }
        BoundaryMeasure {
            kind: GraphKind::BinaryTree,
            depth,
            mass,
            killed: BTreeMap::new(),
        }
    }

    /// Binary measure with independent per-vertex splits (mass sent left);
    /// no killing.
    pub fn from_binary_splits(
        depth: usize,
        split: &mut dyn FnMut(&VertexId) -> Rat,
    ) -> Result<Self> {
        let mut mass = BTreeMap::new();
        let mut frontier = vec![(VertexId::root(), Rat::one())];
        while let Some((u, m)) = frontier.pop() {
            if u.depth() < depth {
                let w = split(&u);
                if w.is_negative() || w > Rat::one() {
                    return Err(TrickleError::InvalidParameter(
                        "split weight outside [0,1]".into(),
                    ));
                }
                frontier.push((u.child(0), &m * &w));
                frontier.push((u.child(1), &m * (Rat::one() - &w)));
            }
            mass.insert(u, m);
        }
        BoundaryMeasure::new(GraphKind::BinaryTree, depth, mass, BTreeMap::new())
    }

    /// Sample a killed path by relative cylinder masses. Descends until the
    /// path dies or reaches `need_depth`; exceeding the stored depth is an
    /// error rather than an extrapolation.
    pub fn sample_path<R: Rng>(&self, rng: &mut R, need_depth: usize) -> Result<KilledPath> {
        if need_depth > self.depth {
            return Err(TrickleError::DepthInsufficient {
                have: self.depth,
                need: need_depth,
            });
        }
        let mut at = VertexId::root();
        loop {
            if at.depth() >= need_depth {
                return Ok(KilledPath { prefix: at, killed: false });
            }
            let mu = self.mass_at(&at)?;
            // exact inversion of a uniform u64 scaled into [0, μ_u)
            let u = Rat::new(rng.gen::<u64>().into(), num::BigInt::one() << 64u16) * &mu;
            let mut acc = self.killed_at(&at)?;
            if u < acc {
                return Ok(KilledPath { prefix: at, killed: true });
            }
            let children: Vec<(VertexId, Rat)> = self
                .mass
                .range(at.clone()..)
                .take_while(|(v, _)| at.is_prefix_of(v))
                .filter(|(v, _)| v.parent_word().as_ref() == Some(&at))
                .map(|(v, m)| (v.clone(), m.clone()))
                .collect();
            let mut chosen = None;
            for (v, m) in children {
                acc += &m;
                if u < acc {
                    chosen = Some(v);
                    break;
                }
            }
            match chosen {
                Some(v) => at = v,
                None => {
                    return Err(TrickleError::InvalidState(
                        "cylinder masses did not cover the draw".into(),
                    ))
                }
            }
        }
    }

    /// Serialize: header line, then "word TAB mass TAB killed-mass" rows
    /// with exact rationals.
    pub fn save<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "# boundary-measure kind={} depth={} mode=exact",
            self.kind, self.depth
        )?;
        let mut words: BTreeSet<&VertexId> = self.mass.keys().collect();
        words.extend(self.killed.keys());
        for u in words {
            writeln!(
                w,
                "{}\t{}\t{}",
                format_word(u),
                format_rat(&self.mass.get(u).cloned().unwrap_or_else(Rat::zero)),
                format_rat(&self.killed.get(u).cloned().unwrap_or_else(Rat::zero)),
            )?;
        }
        Ok(())
    }

    pub fn load<R: BufRead>(kind: GraphKind, r: &mut R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| TrickleError::Other("empty boundary-measure file".into()))?
            .map_err(|e| TrickleError::Other(e.to_string()))?;
        let depth: usize = header
            .split_whitespace()
            .find_map(|tok| tok.strip_prefix("depth=").and_then(|v| v.parse().ok()))
            .ok_or_else(|| TrickleError::Other("missing depth in header".into()))?;
        let mut mass = BTreeMap::new();
        let mut killed = BTreeMap::new();
        for line in lines {
            let line = line.map_err(|e| TrickleError::Other(e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let u = parse_word(cols.next().unwrap_or_default())?;
            let m = parse_rat(cols.next().unwrap_or("0"))?;
            let k = parse_rat(cols.next().unwrap_or("0"))?;
            if !m.is_zero() {
                mass.insert(u.clone(), m);
            }
            if !k.is_zero() {
                killed.insert(u, k);
            }
        }
        BoundaryMeasure::new(kind, depth, mass, killed)
    }
}

/// Depth-truncated labeling of the substrate with ↓ (reachable) and †
/// symbols, plus a subprobability routing measure at each ↓ vertex.
#[derive(Clone, Debug)]
pub struct AdmissibleLabeling {
    pub kind: GraphKind,
    pub depth: usize,
    pub down: BTreeSet<VertexId>,
    /// r^u: child-slot → mass, sparse, for u ∈ down.
    pub r: BTreeMap<VertexId, BTreeMap<usize, Rat>>,
}

impl AdmissibleLabeling {
    /// Check admissibility and compatibility to the stored depth: the root
    /// is ↓, and a non-root vertex is ↓ exactly when some ↓-parent routes
    /// positive mass to it.
    pub fn validate(&self) -> Result<()> {
        if !self.kind.is_tree() {
            return Err(TrickleError::BadLabeling("tree substrate required".into()));
        }
        if !self.down.contains(&VertexId::root()) {
            return Err(TrickleError::BadLabeling("root must be labeled ↓".into()));
        }
        for u in &self.down {
            if u.depth() > self.depth {
                return Err(TrickleError::BadLabeling(
                    "↓ vertex beyond stored depth".into(),
                ));
            }
            let r = self.r.get(u).cloned().unwrap_or_default();
            let total: Rat = r.values().sum();
            if r.values().any(|m| m.is_negative()) || total > Rat::one() {
                return Err(TrickleError::BadLabeling(format!(
                    "r^{} is not a subprobability",
                    format_word(u)
                )));
            }
            if u.depth() == self.depth {
                continue;
            }
            for (slot, m) in &r {
                let v = self.kind.child_at(u, *slot);
                if m.is_positive() && !self.down.contains(&v) {
                    return Err(TrickleError::BadLabeling(format!(
                        "{} receives mass but is labeled †",
                        format_word(&v)
                    )));
                }
            }
        }
        for v in &self.down {
            if v.is_root() || v.depth() > self.depth {
                continue;
            }
            let parent = v.parent_word().expect("non-root");
            let slot = self.kind.slot_of(&parent, v).expect("child slot");
            let fed = self.down.contains(&parent)
                && self
                    .r
                    .get(&parent)
                    .and_then(|r| r.get(&slot))
                    .map_or(false, |m| m.is_positive());
            if !fed {
                return Err(TrickleError::BadLabeling(format!(
                    "{} is labeled ↓ but receives no mass",
                    format_word(v)
                )));
            }
        }
        Ok(())
    }

    /// The unique path measure of the labeling: cylinder masses are the
    /// products of routing masses along the root path, and the killed mass
    /// at u is the deficit of r^u times the mass reaching u.
    pub fn path_measure(&self) -> Result<BoundaryMeasure> {
        self.validate()?;
        let mut mass = BTreeMap::new();
        let mut killed = BTreeMap::new();
        let mut frontier = vec![(VertexId::root(), Rat::one())];
        while let Some((u, m)) = frontier.pop() {
            let r = self.r.get(&u).cloned().unwrap_or_default();
            if u.depth() < self.depth {
                let total: Rat = r.values().sum();
                let kappa = &m * (Rat::one() - total);
                if !kappa.is_zero() {
                    killed.insert(u.clone(), kappa);
                }
                for (slot, w) in &r {
                    if w.is_positive() {
                        frontier.push((self.kind.child_at(&u, *slot), &m * w));
                    }
                }
            }
            mass.insert(u, m);
        }
        BoundaryMeasure::new(self.kind, self.depth, mass, killed)
    }
}

/// Recover the labeling from a path measure via the cylinder-mass ratios;
/// inverse of [`AdmissibleLabeling::path_measure`].
pub fn recover_labeling(mu: &BoundaryMeasure) -> Result<AdmissibleLabeling> {
    let mut down = BTreeSet::new();
    let mut r: BTreeMap<VertexId, BTreeMap<usize, Rat>> = BTreeMap::new();
    let mut frontier = vec![VertexId::root()];
    while let Some(u) = frontier.pop() {
        let mu_u = mu.mass_at(&u)?;
        if !mu_u.is_positive() {
            continue;
        }
        down.insert(u.clone());
        if u.depth() >= mu.depth {
            continue;
        }
        let mut row = BTreeMap::new();
        for (v, mv) in mu
            .mass
            .range(u.clone()..)
            .take_while(|(v, _)| u.is_prefix_of(v))
            .filter(|(v, _)| v.parent_word().as_ref() == Some(&u))
        {
            if mv.is_positive() {
                let slot = mu.kind.slot_of(&u, v).expect("child slot");
                row.insert(slot, mv / &mu_u);
                frontier.push(v.clone());
            }
        }
        r.insert(u, row);
    }
    let lab = AdmissibleLabeling { kind: mu.kind, depth: mu.depth, down, r };
    lab.validate()?;
    Ok(lab)
}

/// Empirical boundary ratios of a finite tree: `#t(u)/#t` for every vertex
/// within depth `d` that is in `t` or adjacent below it.
pub fn empirical_ratios(kind: &GraphKind, t: &Tree, d: usize) -> BTreeMap<VertexId, Rat> {
    let total = rat_int(t.len() as i64);
    let mut out = BTreeMap::new();
    for u in &t.vertices {
        if u.depth() <= d {
            out.insert(u.clone(), rat_int(t.subtree_count(u) as i64) / &total);
        }
        let child_window = match kind {
            GraphKind::HarrisUlam(None) => {
                // up to the first vacant child, to keep the report finite
                let mut m = 0usize;
                while t.contains(&u.child(m as u32 + 1)) {
                    m += 1;
                }
                m + 1
            }
            _ => kind.arity().unwrap_or(2),
        };
        for v in kind.children(u).take(child_window) {
            if v.depth() <= d && !out.contains_key(&v) {
                out.insert(v.clone(), rat_int(t.subtree_count(&v) as i64) / &total);
            }
        }
    }
    out
}

/// f64 boundary measure used by samplers and statistical tests only.
#[derive(Clone, Debug)]
pub struct SampledMeasure {
    pub depth: usize,
    pub mass: BTreeMap<VertexId, f64>,
}

impl SampledMeasure {
    pub fn mass_at(&self, u: &VertexId) -> f64 {
        self.mass.get(u).copied().unwrap_or(0.0)
    }
}

/// Limit measure of the binary search tree chain: independent uniform
/// stick pairs (U, 1-U) per vertex, masses multiplied down the tree.
pub fn sample_bst_limit_measure<R: Rng>(rng: &mut R, depth: usize) -> SampledMeasure {
    sample_beta_splits(|_| (1.0, 1.0), rng, depth)
}

/// Beta-stick limit measure: the left stick at `u` is Beta(θ_u, η_u).
/// With θ_u = ν_{u0}, η_u = ν_{u1} for a directing measure ν this is the
/// Ferguson (Dirichlet) random measure.
pub fn sample_dirichlet_measure<R: Rng>(
    params: &dyn Fn(&VertexId) -> (f64, f64),
    rng: &mut R,
    depth: usize,
) -> Result<SampledMeasure> {
    let (a, b) = params(&VertexId::root());
    if a <= 0.0 || b <= 0.0 {
        return Err(TrickleError::InvalidParameter(
            "beta parameters must be positive".into(),
        ));
    }
    Ok(sample_beta_splits(params, rng, depth))
}

fn sample_beta_splits<R: Rng>(
    params: impl Fn(&VertexId) -> (f64, f64),
    rng: &mut R,
    depth: usize,
) -> SampledMeasure {
    let mut mass = BTreeMap::new();
    let mut frontier = vec![(VertexId::root(), 1.0f64)];
    while let Some((u, m)) = frontier.pop() {
        if u.depth() < depth {
            let (a, b) = params(&u);
            let w = Beta::new(a, b).expect("positive beta parameters").sample(rng);
            // masses live on a 2^-40 grid where f64 addition is exact, so
            // the stick identity left + right == m holds exactly
            let left = quantize(m * w).clamp(0.0, m);
            let right = m - left;
            frontier.push((u.child(0), left));
            frontier.push((u.child(1), right));
        }
        mass.insert(u, m);
    }
    SampledMeasure { depth, mass }
}

const STICK_GRID: f64 = (1u64 << 40) as f64;

fn quantize(x: f64) -> f64 {
    (x * STICK_GRID).round() / STICK_GRID
}

/// GEM stick weights: U_k = B_k Π_{i<k}(1-B_i) with B_k ~ Beta(1-α, θ+kα).
/// For α < 0 with θ = -Mα the construction degenerates at k = M and the
/// sampler emits exactly M sticks summing to 1.
pub fn sample_gem<R: Rng>(alpha: f64, theta: f64, k: usize, rng: &mut R) -> Result<Vec<f64>> {
    let admissible = if alpha < 0.0 {
        let m = -theta / alpha;
        (m - m.round()).abs() < 1e-12 && m >= 1.0
    } else {
        alpha < 1.0 && theta > -alpha
    };
    if !admissible {
        return Err(TrickleError::InvalidParameter(format!(
            "inadmissible GEM parameters ({alpha}, {theta})"
        )));
    }
    let cap = if alpha < 0.0 {
        Some((-theta / alpha).round() as usize)
    } else {
        None
    };
    let count = cap.map_or(k, |m| k.min(m));
    let mut out = Vec::with_capacity(count);
    let mut remaining = 1.0f64;
    for idx in 1..=count {
        let b = theta + idx as f64 * alpha;
        let stick = if cap == Some(idx) {
            // Beta(1-α, 0+) is a point mass at 1
            remaining
        } else {
            remaining * Beta::new(1.0 - alpha, b).expect("admissible").sample(rng)
        };
        out.push(stick);
        remaining -= stick;
    }
    Ok(out)
}
