//! Per-vertex routing chains: transition laws, state-space checks, and
//! closed-form hitting probabilities for every chain family.
//!
//! A routing state is the vector of counts of particles routed onward to
//! each child slot. Chains only ever move by `+e_v`, so a state's size is
//! its local time.

use std::collections::HashMap;
use std::sync::Mutex;

use num::{BigInt, One, Signed, Zero};

use crate::numeric::{
    binomial, multinomial, rat_int, rat_pow, rat_to_f64, rising, Rat,
};
use crate::{Result, TrickleError};

/// Counts of onward routings per child slot (dense, trailing zeros trimmed).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct RoutingState(pub Vec<u64>);

impl RoutingState {
    pub fn zero() -> Self {
        RoutingState(Vec::new())
    }

    pub fn pair(a: u64, b: u64) -> Self {
        let mut s = RoutingState(vec![a, b]);
        s.trim();
        s
    }

    pub fn get(&self, slot: usize) -> u64 {
        self.0.get(slot).copied().unwrap_or(0)
    }

    /// |ξ| = Σ_v ξ^v.
    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// ξ + e_slot.
    pub fn bump(&self, slot: usize) -> Self {
        let mut w = self.0.clone();
        if w.len() <= slot {
            w.resize(slot + 1, 0);
        }
        w[slot] += 1;
        RoutingState(w)
    }

    /// Componentwise ≤.
    pub fn leq(&self, other: &RoutingState) -> bool {
        (0..self.0.len().max(other.0.len())).all(|i| self.get(i) <= other.get(i))
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    /// Number of leading nonzero entries; valid block-count for CRP states.
    pub fn block_count(&self) -> usize {
        self.0.len()
    }
}

/// Chain family with exact rational parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum RoutingChainSpec {
    /// Reinforced urn: slot v drawn with weight ν_v + ξ^v.
    DirichletUrn { nu: Vec<Rat> },
    /// Space-time walk: iid steps, slot v with probability p_v.
    BernoulliWalk { p: Vec<Rat> },
    /// Two-parameter Chinese-restaurant block sizes, in order of appearance.
    CrpBlocks { alpha: Rat, theta: Rat },
    /// Mallows urn: right steps until a single switch, then up forever.
    MallowsUrn { p: Rat },
    /// q-binomial urn: right with probability r q^j from (i,j).
    QBinomialUrn { q: Rat, r: Rat },
    /// Uniform-binary-tree (Catalan) urn.
    CatalanUrn,
    /// Single trail with a fair first step (composition chain routing).
    SingleTrailHalf,
}

impl RoutingChainSpec {
    /// Parameter-domain checks.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TrickleError::InvalidParameter(m));
        match self {
            RoutingChainSpec::DirichletUrn { nu } => {
                if nu.len() < 2 || nu.iter().any(|v| !v.is_positive()) {
                    return bad(format!("Dirichlet weights must be positive, got {nu:?}"));
                }
            }
            RoutingChainSpec::BernoulliWalk { p } => {
                let total: Rat = p.iter().sum();
                if p.len() < 2 || p.iter().any(|v| !v.is_positive()) || !total.is_one() {
                    return bad("Bernoulli step law must be strictly positive and sum to 1".into());
                }
            }
            RoutingChainSpec::CrpBlocks { alpha, theta } => {
                if !crp_params_admissible(alpha, theta) {
                    return bad(format!(
                        "CRP parameters need alpha<0, theta=-M*alpha or 0<=alpha<1, theta>-alpha; got ({alpha}, {theta})"
                    ));
                }
            }
            RoutingChainSpec::MallowsUrn { p } => {
                if !p.is_positive() || *p >= Rat::one() {
                    return bad(format!("Mallows p must lie in (0,1), got {p}"));
                }
            }
            RoutingChainSpec::QBinomialUrn { q, r } => {
                for (name, v) in [("q", q), ("r", r)] {
                    if !v.is_positive() || *v >= Rat::one() {
                        return bad(format!("q-binomial {name} must lie in (0,1), got {v}"));
                    }
                }
            }
            RoutingChainSpec::CatalanUrn | RoutingChainSpec::SingleTrailHalf => {}
        }
        Ok(())
    }

    /// Number of child slots the family routes over (`None` = unbounded).
    pub fn slot_count(&self) -> Option<usize> {
        match self {
            RoutingChainSpec::DirichletUrn { nu } => Some(nu.len()),
            RoutingChainSpec::BernoulliWalk { p } => Some(p.len()),
            RoutingChainSpec::CrpBlocks { alpha, theta } => {
                crp_block_cap(alpha, theta).map(|m| m as usize)
            }
            _ => Some(2),
        }
    }

    /// Membership in the family's state space S^u.
    pub fn state_valid(&self, xi: &RoutingState) -> bool {
        match self {
            RoutingChainSpec::DirichletUrn { nu } => xi.0.len() <= nu.len(),
            RoutingChainSpec::BernoulliWalk { p } => xi.0.len() <= p.len(),
            RoutingChainSpec::CrpBlocks { alpha, theta } => {
                // blocks in order of appearance: no gaps
                let within_cap = crp_block_cap(alpha, theta)
                    .map_or(true, |m| xi.0.len() <= m as usize);
                within_cap && xi.0.iter().all(|&b| b >= 1)
            }
            RoutingChainSpec::MallowsUrn { .. } => xi.0.len() <= 2,
            RoutingChainSpec::QBinomialUrn { .. } => xi.0.len() <= 2,
            RoutingChainSpec::CatalanUrn => xi.0.len() <= 2,
            RoutingChainSpec::SingleTrailHalf => {
                xi.0.len() <= 2 && xi.0.iter().filter(|&&c| c > 0).count() <= 1
            }
        }
    }

    /// One-step law at ξ: list of `(slot, probability)` with strictly
    /// positive entries summing to exactly 1.
    pub fn transitions(&self, xi: &RoutingState) -> Result<Vec<(usize, Rat)>> {
        if !self.state_valid(xi) {
            return Err(TrickleError::InvalidState(format!(
                "{xi:?} is outside the state space of {self:?}"
            )));
        }
        let out = match self {
            RoutingChainSpec::DirichletUrn { nu } => {
                let total: Rat = nu.iter().sum::<Rat>() + rat_int(xi.size() as i64);
                nu.iter()
                    .enumerate()
                    .map(|(v, w)| (v, (w + rat_int(xi.get(v) as i64)) / &total))
                    .collect()
            }
            RoutingChainSpec::BernoulliWalk { p } => {
                p.iter().cloned().enumerate().collect()
            }
            RoutingChainSpec::CrpBlocks { alpha, theta } => {
                let m = xi.block_count();
                let p_total = rat_int(xi.size() as i64) + theta;
                let mut out: Vec<(usize, Rat)> = Vec::new();
                for k in 0..m {
                    out.push((k, (rat_int(xi.get(k) as i64) - alpha) / &p_total));
                }
                let cap = crp_block_cap(alpha, theta);
                if cap.map_or(true, |c| (m as u64) < c) {
                    let new_block = (theta + rat_int(m as i64) * alpha) / &p_total;
                    if new_block.is_positive() {
                        out.push((m, new_block));
                    }
                }
                out
            }
            RoutingChainSpec::MallowsUrn { p } => {
                if xi.get(1) == 0 {
                    vec![(0, Rat::one() - p), (1, p.clone())]
                } else {
                    vec![(1, Rat::one())]
                }
            }
            RoutingChainSpec::QBinomialUrn { q, r } => {
                let right = r * rat_pow(q, xi.get(1) as i64);
                vec![(0, right.clone()), (1, Rat::one() - right)]
            }
            RoutingChainSpec::CatalanUrn => {
                let up = catalan_up_exact(xi.get(0), xi.get(1));
                vec![(0, Rat::one() - &up), (1, up)]
            }
            RoutingChainSpec::SingleTrailHalf => {
                let half = Rat::new(BigInt::one(), BigInt::from(2));
                if xi.is_zero() {
                    vec![(0, half.clone()), (1, half)]
                } else if xi.get(0) > 0 {
                    vec![(0, Rat::one())]
                } else {
                    vec![(1, Rat::one())]
                }
            }
        };
        debug_assert!(out.iter().all(|(_, p)| p.is_positive()));
        debug_assert!(out.iter().map(|(_, p)| p).sum::<Rat>().is_one());
        Ok(out)
    }

    /// Closed-form hitting probability `Q^{ξ}{Y hits ζ}`; 0 when ζ is
    /// unreachable from ξ.
    pub fn hit(&self, xi: &RoutingState, zeta: &RoutingState) -> Rat {
        if !xi.leq(zeta) {
            return Rat::zero();
        }
        match self {
            RoutingChainSpec::DirichletUrn { nu } => dirichlet_urn_hit(xi, zeta, nu),
            RoutingChainSpec::BernoulliWalk { p } => bernoulli_walk_hit(xi, zeta, p),
            RoutingChainSpec::CrpBlocks { alpha, theta } => {
                crp_path_probability(&xi.0, &zeta.0, alpha, theta)
            }
            RoutingChainSpec::MallowsUrn { p } => mallows_hit(
                (xi.get(0), xi.get(1)),
                (zeta.get(0), zeta.get(1)),
                p,
            ),
            RoutingChainSpec::QBinomialUrn { q, r } => qbinomial_hit(
                (xi.get(0), xi.get(1)),
                (zeta.get(0), zeta.get(1)),
                q,
                r,
            ),
            RoutingChainSpec::CatalanUrn => {
                catalan_hit((xi.get(0), xi.get(1)), (zeta.get(0), zeta.get(1)))
            }
            RoutingChainSpec::SingleTrailHalf => single_trail_hit(xi, zeta),
        }
    }

    /// Sample one slot in f64 (simulation mode; exact mode never calls this).
    pub fn sample_slot(&self, xi: &RoutingState, u01: f64) -> usize {
        SlotSampler::new(self).sample(&xi.0, u01)
    }

    /// Precompile the f64 sampling form for hot simulation loops.
    pub fn sampler(&self) -> SlotSampler {
        SlotSampler::new(self)
    }
}

/// f64 form of a family's one-step law, with rational parameters converted
/// once up front.
#[derive(Clone, Debug)]
pub enum SlotSampler {
    Dirichlet { nu: Vec<f64>, total: f64 },
    Bernoulli { cumulative: Vec<f64> },
    Crp { alpha: f64, theta: f64, cap: Option<u64> },
    Mallows { stay: f64 },
    QBinomial { q: f64, r: f64 },
    Catalan,
    SingleTrail,
}

impl SlotSampler {
    fn new(spec: &RoutingChainSpec) -> Self {
        match spec {
            RoutingChainSpec::DirichletUrn { nu } => {
                let nu: Vec<f64> = nu.iter().map(rat_to_f64).collect();
                let total = nu.iter().sum();
                SlotSampler::Dirichlet { nu, total }
            }
            RoutingChainSpec::BernoulliWalk { p } => {
                let mut acc = 0.0;
                let cumulative = p
                    .iter()
                    .map(|w| {
                        acc += rat_to_f64(w);
                        acc
                    })
                    .collect();
                SlotSampler::Bernoulli { cumulative }
            }
            RoutingChainSpec::CrpBlocks { alpha, theta } => SlotSampler::Crp {
                alpha: rat_to_f64(alpha),
                theta: rat_to_f64(theta),
                cap: crp_block_cap(alpha, theta),
            },
            RoutingChainSpec::MallowsUrn { p } => {
                SlotSampler::Mallows { stay: 1.0 - rat_to_f64(p) }
            }
            RoutingChainSpec::QBinomialUrn { q, r } => {
                SlotSampler::QBinomial { q: rat_to_f64(q), r: rat_to_f64(r) }
            }
            RoutingChainSpec::CatalanUrn => SlotSampler::Catalan,
            RoutingChainSpec::SingleTrailHalf => SlotSampler::SingleTrail,
        }
    }

    /// Draw the next slot given the current counts.
    pub fn sample(&self, counts: &[u64], u01: f64) -> usize {
        let get = |i: usize| counts.get(i).copied().unwrap_or(0);
        match self {
            SlotSampler::Dirichlet { nu, total } => {
                let size: u64 = counts.iter().sum();
                let scale = total + size as f64;
                let mut acc = 0.0;
                for (v, w) in nu.iter().enumerate() {
                    acc += (w + get(v) as f64) / scale;
                    if u01 < acc {
                        return v;
                    }
                }
                nu.len() - 1
            }
            SlotSampler::Bernoulli { cumulative } => {
                for (v, edge) in cumulative.iter().enumerate() {
                    if u01 < *edge {
                        return v;
                    }
                }
                cumulative.len() - 1
            }
            SlotSampler::Crp { alpha, theta, cap } => {
                let m = counts.len();
                let size: u64 = counts.iter().sum();
                let scale = theta + size as f64;
                let mut acc = 0.0;
                for (k, &c) in counts.iter().enumerate() {
                    acc += (c as f64 - alpha) / scale;
                    if u01 < acc {
                        return k;
                    }
                }
                if cap.map_or(true, |c| (m as u64) < c) {
                    m
                } else {
                    m - 1
                }
            }
            SlotSampler::Mallows { stay } => {
                if get(1) > 0 {
                    1
                } else {
                    usize::from(u01 >= *stay)
                }
            }
            SlotSampler::QBinomial { q, r } => {
                let right = r * q.powi(get(1) as i32);
                usize::from(u01 >= right)
            }
            SlotSampler::Catalan => {
                let up = catalan_up_f64(get(0), get(1));
                usize::from(u01 >= 1.0 - up)
            }
            SlotSampler::SingleTrail => {
                if counts.iter().all(|&c| c == 0) {
                    usize::from(u01 >= 0.5)
                } else if get(0) > 0 {
                    0
                } else {
                    1
                }
            }
        }
    }
}

/// CRP parameter admissibility: α<0 with θ=-Mα for some M∈ℕ, or 0≤α<1
/// with θ>-α.
pub fn crp_params_admissible(alpha: &Rat, theta: &Rat) -> bool {
    if alpha.is_negative() {
        let m = -(theta / alpha);
        m.is_integer() && m.is_positive()
    } else {
        *alpha < Rat::one() && *theta > -alpha.clone()
    }
}

/// Maximal block count M (finite only when α<0).
pub fn crp_block_cap(alpha: &Rat, theta: &Rat) -> Option<u64> {
    if alpha.is_negative() {
        let m = -(theta / alpha);
        Some(m.to_integer().try_into().unwrap_or(u64::MAX))
    } else {
        None
    }
}

/// Hitting probability of the multicolor reinforced urn: the chance of
/// adding ζ-ξ across slots in some order, by exchangeability a multinomial
/// count times the common path weight.
pub fn dirichlet_urn_hit(xi: &RoutingState, zeta: &RoutingState, nu: &[Rat]) -> Rat {
    if !xi.leq(zeta) || zeta.0.len() > nu.len() {
        return Rat::zero();
    }
    let diffs: Vec<u64> = (0..nu.len()).map(|v| zeta.get(v) - xi.get(v)).collect();
    let orders = Rat::from_integer(multinomial(&diffs));
    let mut num = Rat::one();
    for (v, w) in nu.iter().enumerate() {
        num *= rising(&(w + rat_int(xi.get(v) as i64)), diffs[v]);
    }
    let nu_total: Rat = nu.iter().sum();
    let den = rising(
        &(nu_total + rat_int(xi.size() as i64)),
        zeta.size() - xi.size(),
    );
    orders * num / den
}

/// Hitting probability of the iid-steps walk.
pub fn bernoulli_walk_hit(xi: &RoutingState, zeta: &RoutingState, p: &[Rat]) -> Rat {
    if !xi.leq(zeta) || zeta.0.len() > p.len() {
        return Rat::zero();
    }
    let diffs: Vec<u64> = (0..p.len()).map(|v| zeta.get(v) - xi.get(v)).collect();
    let mut acc = Rat::from_integer(multinomial(&diffs));
    for (v, pv) in p.iter().enumerate() {
        acc *= rat_pow(pv, diffs[v] as i64);
    }
    acc
}

/// Probability that the CRP block-size chain visits block sizes `b`
/// starting from block sizes `a` (blocks in order of appearance).
///
/// Each interleaving of the required insertions has the same weight
/// (numerators are fixed per block, denominators run over total size), so
/// the probability is the common weight times the interleaving count.
/// Empty products are 1.
pub fn crp_path_probability(a: &[u64], b: &[u64], alpha: &Rat, theta: &Rat) -> Rat {
    let m = a.len();
    let n = b.len();
    if n < m
        || a.iter().zip(b).any(|(x, y)| x > y)
        || a.iter().any(|&x| x == 0)
        || b.iter().any(|&x| x == 0)
    {
        return Rat::zero();
    }
    if let Some(cap) = crp_block_cap(alpha, theta) {
        if n as u64 > cap {
            return Rat::zero();
        }
    }
    let p: u64 = a.iter().sum();
    let q: u64 = b.iter().sum();

    // new-block openings: (θ+mα)(θ+(m+1)α)...(θ+(n-1)α)
    let mut weight = Rat::one();
    for k in m..n {
        weight *= theta + rat_int(k as i64) * alpha;
    }
    // growth of old blocks from a_k to b_k and of new blocks from 1 to b_k
    for k in 0..m {
        weight *= rising(&(rat_int(a[k] as i64) - alpha), b[k] - a[k]);
    }
    for k in m..n {
        weight *= rising(&(Rat::one() - alpha), b[k] - 1);
    }
    // common denominator (θ+p)(θ+p+1)...(θ+q-1)
    weight /= rising(&(theta + rat_int(p as i64)), q - p);

    // interleavings: distribute the q-p steps over old blocks, then over
    // the new blocks whose first entries must appear in block order
    let mut count = BigInt::one();
    let mut remaining = q - p;
    for k in 0..m {
        count *= binomial(remaining, b[k] - a[k]);
        remaining -= b[k] - a[k];
    }
    for k in m..n {
        // the earliest remaining step opens block k+1
        count *= binomial(remaining - 1, b[k] - 1);
        remaining -= b[k];
    }
    weight * Rat::from_integer(count)
}

/// Probability that the Mallows urn visits (k,ℓ) from (i,j).
pub fn mallows_hit(from: (u64, u64), to: (u64, u64), p: &Rat) -> Rat {
    let (i, j) = from;
    let (k, l) = to;
    let q = Rat::one() - p;
    if j == 0 && l == 0 && i <= k {
        rat_pow(&q, (k - i) as i64)
    } else if j == 0 && l >= 1 && i <= k {
        rat_pow(&q, (k - i) as i64) * p
    } else if (1..=l).contains(&j) && i == k {
        Rat::one()
    } else {
        Rat::zero()
    }
}

/// Gaussian binomial coefficient `[n choose k]_q` via the exact product
/// formula; equals the area-weighted sum over north-east lattice paths.
pub fn gaussian_binomial(n: u64, k: u64, q: &Rat) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut num = Rat::one();
    let mut den = Rat::one();
    for i in 1..=k {
        num *= Rat::one() - rat_pow(q, (n - k + i) as i64);
        den *= Rat::one() - rat_pow(q, i as i64);
    }
    num / den
}

/// Probability that the q-binomial urn visits (k,ℓ) from (i,j): the
/// Gaussian binomial times the weight of the lowest path.
pub fn qbinomial_hit(from: (u64, u64), to: (u64, u64), q: &Rat, r: &Rat) -> Rat {
    let (i, j) = from;
    let (k, l) = to;
    if k < i || l < j {
        return Rat::zero();
    }
    gaussian_binomial((k - i) + (l - j), k - i, q) * qbinomial_base_path(from, to, q, r)
}

/// Weight `R((i,j),(k,ℓ))` of the path through (k,j): all right steps
/// first, then all up steps.
pub fn qbinomial_base_path(from: (u64, u64), to: (u64, u64), q: &Rat, r: &Rat) -> Rat {
    let (i, j) = from;
    let (k, l) = to;
    let mut acc = rat_pow(&(r * rat_pow(q, j as i64)), (k - i) as i64);
    for m in j..l {
        acc *= Rat::one() - r * rat_pow(q, m as i64);
    }
    acc
}

/// Single-trail hitting probability (fair first step, deterministic after).
pub fn single_trail_hit(xi: &RoutingState, zeta: &RoutingState) -> Rat {
    let on_axis = |s: &RoutingState| s.0.iter().filter(|&&c| c > 0).count() <= 1;
    if !on_axis(xi) || !on_axis(zeta) || !xi.leq(zeta) {
        return Rat::zero();
    }
    if xi == zeta {
        return Rat::one();
    }
    if xi.is_zero() {
        // must branch in ζ's direction
        Rat::new(BigInt::one(), BigInt::from(2))
    } else {
        // same axis is implied by ξ ≤ ζ and single-trail support
        Rat::one()
    }
}

// ---------------------------------------------------------------------------
// Catalan urn
// ---------------------------------------------------------------------------

/// Time-(i+j) marginal C_i C_j / C_{i+j+1} of the Catalan urn.
fn catalan_marginal(i: u64, j: u64) -> Rat {
    use crate::numeric::catalan_number;
    Rat::new(
        catalan_number(i) * catalan_number(j),
        catalan_number(i + j + 1),
    )
}

/// Q((i,j),(i,j+1)) for the Catalan urn, exact.
///
/// Base row: Q((0,j),(0,j+1)) = (j+3)(2j+1)/((j+2)(2j+3)). Interior
/// entries solve the one-step balance of the marginals
///   π(i,j+1) = π(i-1,j+1)·(1-up(i-1,j+1)) + π(i,j)·up(i,j).
/// Every computed entry is asserted to lie in [0,1].
pub fn catalan_up_exact(i: u64, j: u64) -> Rat {
    fn compute(i: u64, j: u64) -> Rat {
        if i == 0 {
            let j = j as i64;
            return Rat::new(
                BigInt::from((j + 3) * (2 * j + 1)),
                BigInt::from((j + 2) * (2 * j + 3)),
            );
        }
        let up_left = catalan_up_exact(i - 1, j + 1);
        let val = (catalan_marginal(i, j + 1)
            - catalan_marginal(i - 1, j + 1) * (Rat::one() - up_left))
            / catalan_marginal(i, j);
        assert!(
            !val.is_negative() && val <= Rat::one(),
            "Catalan urn entry out of [0,1] at ({i},{j})"
        );
        val
    }

    static CACHE: Mutex<Option<HashMap<(u64, u64), Rat>>> = Mutex::new(None);
    if let Some(v) = CACHE.lock().unwrap().get_or_insert_with(HashMap::new).get(&(i, j)) {
        return v.clone();
    }
    let v = compute(i, j);
    CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert((i, j), v.clone());
    v
}

/// f64 variant of [`catalan_up_exact`] for long simulations; same
/// recursion evaluated in log-space marginals.
pub fn catalan_up_f64(i: u64, j: u64) -> f64 {
    fn ln_catalan(n: u64) -> f64 {
        // ln C_n = ln binom(2n,n) - ln(n+1)
        let n = n as f64;
        ln_gamma(2.0 * n + 1.0) - 2.0 * ln_gamma(n + 1.0) - (n + 1.0).ln()
    }
    fn ln_gamma(x: f64) -> f64 {
        // Lanczos approximation, g=7
        const COEF: [f64; 9] = [
            0.999_999_999_999_809_9,
            676.520_368_121_885_1,
            -1259.139_216_722_402_8,
            771.323_428_777_653_1,
            -176.615_029_162_140_6,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_572e-6,
            1.505_632_735_149_311_6e-7,
        ];
        if x < 0.5 {
            return std::f64::consts::PI.ln()
                - (std::f64::consts::PI * x).sin().ln()
                - ln_gamma(1.0 - x);
        }
        let x = x - 1.0;
        let mut a = COEF[0];
        let t = x + 7.5;
        for (i, c) in COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
    fn marginal_ln(i: u64, j: u64) -> f64 {
        ln_catalan(i) + ln_catalan(j) - ln_catalan(i + j + 1)
    }
    fn compute(i: u64, j: u64, memo: &mut HashMap<(u64, u64), f64>) -> f64 {
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if i == 0 {
            let j = j as f64;
            (j + 3.0) * (2.0 * j + 1.0) / ((j + 2.0) * (2.0 * j + 3.0))
        } else {
            let up_left = compute(i - 1, j + 1, memo);
            let pi_ij1 = marginal_ln(i, j + 1).exp();
            let pi_i1j1 = marginal_ln(i - 1, j + 1).exp();
            let pi_ij = marginal_ln(i, j).exp();
            ((pi_ij1 - pi_i1j1 * (1.0 - up_left)) / pi_ij).clamp(0.0, 1.0)
        };
        memo.insert((i, j), v);
        v
    }

    static CACHE: Mutex<Option<HashMap<(u64, u64), f64>>> = Mutex::new(None);
    let mut guard = CACHE.lock().unwrap();
    let memo = guard.get_or_insert_with(HashMap::new);
    compute(i, j, memo)
}

/// Exact hitting probability of the Catalan urn by forward recursion over
/// the rectangle between the two states (entries are memoized globally).
pub fn catalan_hit(from: (u64, u64), to: (u64, u64)) -> Rat {
    let (i, j) = from;
    let (k, l) = to;
    if k < i || l < j {
        return Rat::zero();
    }
    // DP over reach probabilities from (i,j)
    let w = (k - i) as usize + 1;
    let h = (l - j) as usize + 1;
    let mut reach = vec![vec![Rat::zero(); h]; w];
    reach[0][0] = Rat::one();
    for di in 0..w {
        for dj in 0..h {
            if reach[di][dj].is_zero() {
                continue;
            }
            let cur = reach[di][dj].clone();
            let up = catalan_up_exact(i + di as u64, j + dj as u64);
            if di + 1 < w {
                reach[di + 1][dj] += &cur * (Rat::one() - &up);
            }
            if dj + 1 < h {
                reach[di][dj + 1] += cur * up;
            }
        }
    }
    reach[w - 1][h - 1].clone()
}

/// Full Catalan transition table for all states with `i+j < max_total`,
/// as rows `(state, [(successor, probability); 2])`.
pub type TransitionTable = Vec<(RoutingState, Vec<(RoutingState, Rat)>)>;

pub fn catalan_table(max_total: u64) -> TransitionTable {
    let mut rows = Vec::new();
    for total in 0..max_total {
        for i in 0..=total {
            let j = total - i;
            let st = RoutingState::pair(i, j);
            let up = catalan_up_exact(i, j);
            rows.push((
                st,
                vec![
                    (RoutingState::pair(i + 1, j), Rat::one() - &up),
                    (RoutingState::pair(i, j + 1), up),
                ],
            ));
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{catalan_number, rat};

    fn st(a: u64, b: u64) -> RoutingState {
        RoutingState::pair(a, b)
    }

    #[test]
    fn dirichlet_transitions_bst() {
        // Polya urn from (2,0) with unit weights: (3/4, 1/4)
        let spec = RoutingChainSpec::DirichletUrn { nu: vec![rat_int(1), rat_int(1)] };
        let t = spec.transitions(&st(2, 0)).unwrap();
        assert_eq!(t, vec![(0, rat(3, 4)), (1, rat(1, 4))]);
    }

    #[test]
    fn mallows_transitions() {
        let spec = RoutingChainSpec::MallowsUrn { p: rat(1, 3) };
        assert_eq!(
            spec.transitions(&st(2, 0)).unwrap(),
            vec![(0, rat(2, 3)), (1, rat(1, 3))]
        );
        assert_eq!(spec.transitions(&st(2, 1)).unwrap(), vec![(1, rat_int(1))]);
    }

    #[test]
    fn catalan_transition_symmetry_at_origin() {
        let spec = RoutingChainSpec::CatalanUrn;
        let t = spec.transitions(&RoutingState::zero()).unwrap();
        assert_eq!(t, vec![(0, rat(1, 2)), (1, rat(1, 2))]);
    }

    #[test]
    fn transition_rows_sum_to_one() {
        let specs = vec![
            RoutingChainSpec::DirichletUrn { nu: vec![rat(1, 2), rat_int(2), rat_int(1)] },
            RoutingChainSpec::BernoulliWalk { p: vec![rat(1, 3), rat(2, 3)] },
            RoutingChainSpec::CrpBlocks { alpha: rat(1, 2), theta: rat(1, 2) },
            RoutingChainSpec::CrpBlocks { alpha: rat(-1, 2), theta: rat_int(1) },
            RoutingChainSpec::MallowsUrn { p: rat(1, 4) },
            RoutingChainSpec::QBinomialUrn { q: rat(1, 2), r: rat(1, 2) },
            RoutingChainSpec::CatalanUrn,
            RoutingChainSpec::SingleTrailHalf,
        ];
        for spec in specs {
            spec.validate().unwrap();
            // walk the reachable states to size 6 and check each row
            let mut frontier = vec![RoutingState::zero()];
            let mut seen = std::collections::BTreeSet::new();
            while let Some(s) = frontier.pop() {
                if s.size() >= 6 || !seen.insert(s.clone()) {
                    continue;
                }
                let row = spec.transitions(&s).unwrap();
                let total: Rat = row.iter().map(|(_, p)| p).sum();
                assert!(total.is_one(), "{spec:?} at {s:?} sums to {total}");
                for (slot, p) in row {
                    assert!(p.is_positive());
                    frontier.push(s.bump(slot));
                }
            }
        }
    }

    #[test]
    fn dirichlet_hit_examples() {
        let nu = vec![rat_int(1), rat_int(1)];
        // both two-step paths: 1/2*1/3 + 1/2*1/3 = 1/3
        assert_eq!(dirichlet_urn_hit(&st(0, 0), &st(1, 1), &nu), rat(1, 3));
        // single path 1/2 * 2/3
        assert_eq!(dirichlet_urn_hit(&st(0, 0), &st(2, 0), &nu), rat(1, 3));
        assert_eq!(dirichlet_urn_hit(&st(1, 1), &st(1, 1), &nu), rat_int(1));
        assert_eq!(dirichlet_urn_hit(&st(2, 0), &st(1, 1), &nu), rat_int(0));
    }

    #[test]
    fn crp_path_probability_examples() {
        let (a0, t0) = (rat_int(0), rat_int(1));
        assert_eq!(crp_path_probability(&[], &[1], &a0, &t0), rat_int(1));
        assert_eq!(crp_path_probability(&[1], &[1, 1], &a0, &t0), rat(1, 2));
        assert_eq!(crp_path_probability(&[1], &[2], &a0, &t0), rat(1, 2));
        // incompatible blocks
        assert_eq!(crp_path_probability(&[2], &[1, 1], &a0, &t0), rat_int(0));
    }

    #[test]
    fn mallows_hit_cases() {
        let p = rat(1, 3);
        assert_eq!(mallows_hit((0, 0), (2, 0), &p), rat(4, 9));
        assert_eq!(mallows_hit((0, 0), (2, 3), &p), rat(4, 27));
        assert_eq!(mallows_hit((1, 2), (1, 5), &p), rat_int(1));
        assert_eq!(mallows_hit((1, 2), (2, 5), &p), rat_int(0));
        assert_eq!(mallows_hit((0, 0), (0, 0), &p), rat_int(1));
    }

    #[test]
    fn gaussian_binomial_small() {
        let q = rat(2, 5);
        assert_eq!(gaussian_binomial(2, 1, &q), Rat::one() + &q);
        // two paths with areas 0 and 1
        assert_eq!(gaussian_binomial(5, 0, &q), Rat::one());
        assert_eq!(gaussian_binomial(3, 5, &q), Rat::zero());
        // 1 + q + 2q^2 + q^3 + q^4 at q=2/5
        let want = Rat::one()
            + &q
            + rat_int(2) * rat_pow(&q, 2)
            + rat_pow(&q, 3)
            + rat_pow(&q, 4);
        assert_eq!(gaussian_binomial(4, 2, &q), want);
    }

    #[test]
    fn qbinomial_hit_examples() {
        let (q, r) = (rat(1, 3), rat(1, 2));
        // r(1-r)(1+q)
        let want = &r * (Rat::one() - &r) * (Rat::one() + &q);
        assert_eq!(qbinomial_hit((0, 0), (1, 1), &q, &r), want);
        assert_eq!(qbinomial_hit((3, 2), (3, 2), &q, &r), Rat::one());
        // single vertical path (1-r)(1-rq)
        let want = (Rat::one() - &r) * (Rat::one() - &r * &q);
        assert_eq!(qbinomial_hit((0, 0), (0, 2), &q, &r), want);
        assert_eq!(qbinomial_hit((1, 1), (0, 2), &q, &r), Rat::zero());
    }

    #[test]
    fn catalan_table_entries() {
        assert_eq!(catalan_up_exact(0, 0), rat(1, 2));
        assert_eq!(catalan_up_exact(0, 1), rat(4, 5));
        // symmetry Q((j,i),(j,i+1)) = 1 - Q((i,j),(i,j+1))
        for i in 0..5u64 {
            for j in 0..5u64 {
                let a = catalan_up_exact(i, j);
                let b = catalan_up_exact(j, i);
                assert_eq!(a + b, Rat::one(), "symmetry at ({i},{j})");
            }
        }
    }

    #[test]
    fn catalan_two_step_marginal() {
        // Q^2((0,0),(1,1)) = C_1 C_1 / C_3 = 1/5
        assert_eq!(catalan_hit((0, 0), (1, 1)), rat(1, 5));
    }

    #[test]
    fn catalan_marginals_match_catalan_numbers() {
        for n in 1..=10u64 {
            for k in 0..=n {
                let want = Rat::new(
                    catalan_number(k) * catalan_number(n - k),
                    catalan_number(n + 1),
                );
                assert_eq!(catalan_hit((0, 0), (k, n - k)), want, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn catalan_f64_matches_exact() {
        for i in 0..12u64 {
            for j in 0..12u64 {
                let exact = rat_to_f64(&catalan_up_exact(i, j));
                let approx = catalan_up_f64(i, j);
                assert!((exact - approx).abs() < 1e-9, "({i},{j}): {exact} vs {approx}");
            }
        }
    }

    #[test]
    fn crp_parameter_domain() {
        assert!(RoutingChainSpec::CrpBlocks { alpha: rat(-1, 2), theta: rat(3, 2) }
            .validate()
            .is_ok());
        assert!(RoutingChainSpec::CrpBlocks { alpha: rat(-1, 2), theta: rat(5, 4) }
            .validate()
            .is_err());
        assert!(RoutingChainSpec::CrpBlocks { alpha: rat(3, 2), theta: rat_int(1) }
            .validate()
            .is_err());
    }

    #[test]
    fn mallows_freeze_is_structural() {
        // after the switch, only the second coordinate moves
        let spec = RoutingChainSpec::MallowsUrn { p: rat(1, 2) };
        let t = spec.transitions(&st(3, 4)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, 1);
    }

    #[test]
    fn single_trail_hits() {
        assert_eq!(single_trail_hit(&RoutingState::zero(), &st(3, 0)), rat(1, 2));
        assert_eq!(single_trail_hit(&st(1, 0), &st(4, 0)), rat_int(1));
        assert_eq!(single_trail_hit(&st(1, 0), &st(0, 2)), rat_int(0));
        assert_eq!(single_trail_hit(&RoutingState::zero(), &RoutingState::zero()), rat_int(1));
    }
}
