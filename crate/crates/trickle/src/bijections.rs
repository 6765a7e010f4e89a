//! Permutation encodings and auxiliary chains: listing → binary-search-tree
//! and listing → recursive-tree bijections, uniform listing growth, Mallows
//! permutation sampling, and the composition chain.

use std::collections::BTreeMap;

use rand::Rng;

use crate::engine::Tree;
use crate::numeric::rat_to_f64;
use crate::substrate::VertexId;
use crate::{Rat, Result, TrickleError};

/// Ordered listing r(1..n): `r(k)` is the element of rank k, so the
/// underlying permutation is `π(r(k)) = k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Listing(pub Vec<u32>);

impl Listing {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries must be a permutation of 1..=n.
    pub fn validate(&self) -> Result<()> {
        let n = self.0.len();
        let mut seen = vec![false; n + 1];
        for &x in &self.0 {
            if x == 0 || x as usize > n || seen[x as usize] {
                return Err(TrickleError::InvalidState(format!(
                    "not a listing of [{n}]: {:?}",
                    self.0
                )));
            }
            seen[x as usize] = true;
        }
        Ok(())
    }

    /// π with π(r(k)) = k, 1-based.
    pub fn pi(&self) -> Vec<u32> {
        let n = self.0.len();
        let mut pi = vec![0u32; n + 1];
        for (k, &x) in self.0.iter().enumerate() {
            pi[x as usize] = k as u32 + 1;
        }
        pi
    }

    pub fn serialize(&self) -> String {
        self.0
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(s: &str) -> Result<Self> {
        let vals: std::result::Result<Vec<u32>, _> =
            s.split(',').map(|p| p.trim().parse()).collect();
        let listing = Listing(vals.map_err(|_| {
            TrickleError::InvalidParameter(format!("cannot parse listing {s:?}"))
        })?);
        listing.validate()?;
        Ok(listing)
    }
}

/// A composition of an integer: ordered positive parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composition(pub Vec<u64>);

impl Composition {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

/// Labeled tree: vertex → label.
pub type Labeling = BTreeMap<VertexId, u32>;

/// Build the binary search tree of a listing: label k sits where the value
/// π(k) lands under successive comparison-driven insertions (smaller keys
/// go left). Root label is 1.
pub fn listing_to_bst(r: &Listing) -> Result<(Tree, Labeling)> {
    r.validate()?;
    let pi = r.pi();
    let mut tree = Tree::root_only();
    let mut labels = Labeling::new();
    let mut key_at: BTreeMap<VertexId, u32> = BTreeMap::new();
    for label in 1..=r.len() as u32 {
        let key = pi[label as usize];
        let mut at = VertexId::root();
        while key_at.contains_key(&at) {
            at = if key < key_at[&at] { at.child(0) } else { at.child(1) };
        }
        key_at.insert(at.clone(), key);
        tree.insert(at.clone());
        labels.insert(at, label);
    }
    Ok((tree, labels))
}

/// Invert [`listing_to_bst`]: the in-order traversal of the labeled tree
/// reads out the listing.
pub fn bst_to_listing(tree: &Tree, labels: &Labeling) -> Result<Listing> {
    fn walk(tree: &Tree, labels: &Labeling, at: &VertexId, out: &mut Vec<u32>) {
        if !tree.contains(at) {
            return;
        }
        walk(tree, labels, &at.child(0), out);
        out.push(labels[at]);
        walk(tree, labels, &at.child(1), out);
    }
    let mut out = Vec::new();
    walk(tree, labels, &VertexId::root(), &mut out);
    let listing = Listing(out);
    listing.validate()?;
    Ok(listing)
}

/// Build the recursive (Harris-Ulam) tree of a listing: label i attaches
/// as the next child of the rightmost earlier smaller element (of the root
/// label 0 when there is none).
pub fn listing_to_rrt(r: &Listing) -> Result<(Tree, Labeling)> {
    r.validate()?;
    let n = r.len() as u32;
    let pi = r.pi();
    let mut tree = Tree::root_only();
    let mut labels = Labeling::new();
    let mut vertex_of: BTreeMap<u32, VertexId> = BTreeMap::new();
    labels.insert(VertexId::root(), 0);
    vertex_of.insert(0, VertexId::root());
    for i in 1..=n {
        let pos = pi[i as usize];
        // rightmost earlier smaller element, label 0 when none
        let mut parent_label = 0u32;
        for j in 1..pos {
            let elem = r.0[j as usize - 1];
            if elem < i {
                parent_label = elem;
            }
        }
        let u = vertex_of[&parent_label].clone();
        let mut q = 1u32;
        while tree.contains(&u.child(q)) {
            q += 1;
        }
        let v = u.child(q);
        tree.insert(v.clone());
        labels.insert(v.clone(), i);
        vertex_of.insert(i, v);
    }
    Ok((tree, labels))
}

/// Invert [`listing_to_rrt`]: insert each label directly after its parent
/// label (at the front for the root).
pub fn rrt_to_listing(tree: &Tree, labels: &Labeling) -> Result<Listing> {
    let mut parent_label: BTreeMap<u32, u32> = BTreeMap::new();
    for (v, &lab) in labels {
        if let Some(p) = v.parent_word() {
            parent_label.insert(lab, labels[&p]);
        }
    }
    if tree.len() != labels.len() {
        return Err(TrickleError::InvalidState("labels must cover the tree".into()));
    }
    let n = tree.len() as u32 - 1;
    let mut out: Vec<u32> = Vec::new();
    for i in 1..=n {
        let s = *parent_label
            .get(&i)
            .ok_or_else(|| TrickleError::InvalidState(format!("label {i} missing")))?;
        if s == 0 {
            out.insert(0, i);
        } else {
            let pos = out
                .iter()
                .position(|&x| x == s)
                .ok_or_else(|| TrickleError::InvalidState("parent labels not increasing".into()))?;
            out.insert(pos + 1, i);
        }
    }
    let listing = Listing(out);
    listing.validate()?;
    Ok(listing)
}

/// Insert n+1 into one of the n+1 slots of a listing, uniformly.
pub fn grow_uniform_listing<R: Rng>(r: &Listing, rng: &mut R) -> Listing {
    let n = r.len();
    let slot = rng.gen_range(0..=n);
    let mut out = r.0.clone();
    out.insert(slot, n as u32 + 1);
    Listing(out)
}

/// Sample a Mallows listing: elements 1, 2, … go into vacant slots with
/// geometrically distributed numbers of skipped vacancies.
///
/// `finite = true` draws the n-element model (each gap truncated to the
/// remaining vacancies); `finite = false` draws the first n elements of the
/// model on all of ℕ (plain geometric gaps), which is what the Mallows tree
/// chain grows.
pub fn sample_mallows_listing<R: Rng>(n: usize, p: &Rat, finite: bool, rng: &mut R) -> Listing {
    let pf = rat_to_f64(p);
    // slot index (1-based, sparse) → element
    let mut filled: BTreeMap<u64, u32> = BTreeMap::new();
    for elem in 1..=n as u32 {
        let remaining = (n + 1 - elem as usize) as u64;
        let gap = if finite {
            // truncated geometric on {0,..,remaining-1}
            let trunc = 1.0 - (1.0 - pf).powi(remaining as i32);
            let u: f64 = rng.gen::<f64>() * trunc;
            let mut k = 0u64;
            let mut acc = 0.0;
            loop {
                acc += (1.0 - pf).powi(k as i32) * pf;
                if u < acc || k + 1 >= remaining {
                    break;
                }
                k += 1;
            }
            k
        } else {
            // plain geometric: failures before the first success
            let u: f64 = rng.gen();
            (u.ln() / (1.0 - pf).ln()).floor().max(0.0) as u64
        };
        // walk to the (gap+1)-th vacant slot
        let mut slot = 0u64;
        let mut vacancies = 0u64;
        loop {
            slot += 1;
            if !filled.contains_key(&slot) {
                if vacancies == gap {
                    break;
                }
                vacancies += 1;
            }
        }
        filled.insert(slot, elem);
    }
    Listing(filled.into_values().collect())
}

/// One step of the composition chain: append a fair digit.
pub fn composition_step<R: Rng>(word: &mut Vec<u8>, rng: &mut R) {
    word.push(rng.gen_range(0..2u8));
}

/// Decode a digit word into a composition: starting from (1), a letter 1
/// appends a new part of size 1 and a letter 0 grows the last part.
pub fn composition_decode(word: &[u8]) -> Composition {
    let mut parts = vec![1u64];
    for &digit in word {
        if digit == 1 {
            parts.push(1);
        } else {
            *parts.last_mut().expect("nonempty") += 1;
        }
    }
    Composition(parts)
}

/// Encode a composition back into its digit word.
pub fn composition_encode(c: &Composition) -> Vec<u8> {
    let mut word = Vec::new();
    for (i, &part) in c.0.iter().enumerate() {
        if i > 0 {
            word.push(1);
        }
        word.extend(std::iter::repeat(0).take(part as usize - 1));
    }
    word
}
