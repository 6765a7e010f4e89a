//! Substrate graphs: the complete binary tree, Harris-Ulam trees with an
//! optional branching cap, and the two-dimensional grid.
//!
//! Vertices are words of child indices; the empty word is the root. All
//! three substrates are graded, so the word length equals the graph
//! distance from the root. Grid vertices are pairs `(i, j)` stored in the
//! canonical word `0^i 1^j` (a `0` letter is the move `(i,j) -> (i+1,j)`,
//! a `1` letter the move `(i,j) -> (i,j+1)`).

use std::fmt;

use num::BigInt;

use crate::numeric::binomial;
use crate::{Result, TrickleError};

/// Address of a vertex: a word of child indices, empty at the root.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexId(pub Vec<u32>);

impl VertexId {
    pub fn root() -> Self {
        VertexId(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// Append one child index.
    pub fn child(&self, index: u32) -> Self {
        let mut w = self.0.clone();
        w.push(index);
        VertexId(w)
    }

    /// Drop the last letter; `None` at the root.
    pub fn parent_word(&self) -> Option<Self> {
        if self.is_root() {
            None
        } else {
            Some(VertexId(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// Prefix test (the tree partial order on words).
    pub fn is_prefix_of(&self, other: &VertexId) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Grid vertex `(i, j)` in canonical word form.
    pub fn grid(i: u32, j: u32) -> Self {
        let mut w = vec![0; i as usize];
        w.extend(std::iter::repeat(1).take(j as usize));
        VertexId(w)
    }

    /// Coordinates of a canonical grid word.
    pub fn grid_coords(&self) -> (u32, u32) {
        let i = self.0.iter().filter(|&&c| c == 0).count() as u32;
        (i, self.0.len() as u32 - i)
    }

    /// Word from binary digits given as a string, e.g. "010".
    pub fn from_binary(s: &str) -> Self {
        VertexId(s.chars().map(|c| c as u32 - '0' as u32).collect())
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VertexId({})", format_word(self))
    }
}

impl std::borrow::Borrow<[u32]> for VertexId {
    fn borrow(&self) -> &[u32] {
        &self.0
    }
}

/// Serialize a word: the root prints as "e", other words as digit strings
/// (dot-separated when any letter exceeds 9).
pub fn format_word(v: &VertexId) -> String {
    if v.is_root() {
        return "e".to_string();
    }
    if v.0.iter().all(|&c| c <= 9) {
        v.0.iter().map(|c| c.to_string()).collect()
    } else {
        v.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Parse the output of [`format_word`] ("" and "e" both mean the root).
pub fn parse_word(s: &str) -> Result<VertexId> {
    let s = s.trim();
    if s.is_empty() || s == "e" {
        return Ok(VertexId::root());
    }
    let bad = || TrickleError::InvalidVertex {
        kind: "word".into(),
        vertex: s.into(),
    };
    if s.contains('.') {
        let letters: std::result::Result<Vec<u32>, _> =
            s.split('.').map(|p| p.parse::<u32>()).collect();
        return Ok(VertexId(letters.map_err(|_| bad())?));
    }
    if s.starts_with('(') {
        // grid form "(i,j)"
        let inner = s.trim_start_matches('(').trim_end_matches(')');
        let mut it = inner.splitn(2, ',');
        let i: u32 = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let j: u32 = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        return Ok(VertexId::grid(i, j));
    }
    let letters: std::result::Result<Vec<u32>, _> =
        s.chars().map(|c| c.to_digit(10).ok_or(())).collect();
    Ok(VertexId(letters.map_err(|_| bad())?))
}

/// The three substrate families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    /// Complete rooted binary tree on words over `{0,1}`.
    BinaryTree,
    /// Harris-Ulam tree on words over `{1,..,cap}` (`None` = unbounded).
    HarrisUlam(Option<u32>),
    /// Grid on pairs `(i,j)` with edges to `(i+1,j)` and `(i,j+1)`.
    Grid2D,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::BinaryTree => write!(f, "binary"),
            GraphKind::HarrisUlam(None) => write!(f, "harris-ulam"),
            GraphKind::HarrisUlam(Some(m)) => write!(f, "harris-ulam({m})"),
            GraphKind::Grid2D => write!(f, "grid"),
        }
    }
}

impl GraphKind {
    /// True when the substrate is a tree (unique root paths).
    pub fn is_tree(&self) -> bool {
        !matches!(self, GraphKind::Grid2D)
    }

    /// Validate a vertex encoding against this substrate.
    pub fn validate(&self, u: &VertexId) -> Result<()> {
        let ok = match self {
            GraphKind::BinaryTree => u.0.iter().all(|&c| c <= 1),
            GraphKind::HarrisUlam(cap) => u
                .0
                .iter()
                .all(|&c| c >= 1 && cap.map_or(true, |m| c <= m)),
            GraphKind::Grid2D => {
                // canonical form: zeros before ones
                u.0.iter().all(|&c| c <= 1)
                    && u.0.windows(2).all(|w| w[0] <= w[1])
            }
        };
        if ok {
            Ok(())
        } else {
            Err(TrickleError::InvalidVertex {
                kind: self.to_string(),
                vertex: format_word(u),
            })
        }
    }

    /// Number of children of every vertex, `None` when unbounded.
    pub fn arity(&self) -> Option<usize> {
        match self {
            GraphKind::BinaryTree | GraphKind::Grid2D => Some(2),
            GraphKind::HarrisUlam(cap) => cap.map(|m| m as usize),
        }
    }

    /// Child with local index `slot` (0-based). Harris-Ulam child indices
    /// are the letters `slot+1`.
    pub fn child_at(&self, u: &VertexId, slot: usize) -> VertexId {
        match self {
            GraphKind::BinaryTree => u.child(slot as u32),
            GraphKind::HarrisUlam(_) => u.child(slot as u32 + 1),
            GraphKind::Grid2D => {
                let (i, j) = u.grid_coords();
                if slot == 0 {
                    VertexId::grid(i + 1, j)
                } else {
                    VertexId::grid(i, j + 1)
                }
            }
        }
    }

    /// β(u): immediate successors in canonical order. Lazy for the
    /// unbounded Harris-Ulam substrate.
    pub fn children<'a>(&'a self, u: &VertexId) -> Box<dyn Iterator<Item = VertexId> + 'a> {
        let u = u.clone();
        match self {
            GraphKind::BinaryTree => {
                Box::new((0..2u32).map(move |c| u.child(c)))
            }
            GraphKind::HarrisUlam(Some(m)) => {
                let m = *m;
                Box::new((1..=m).map(move |c| u.child(c)))
            }
            GraphKind::HarrisUlam(None) => Box::new((1u32..).map(move |c| u.child(c))),
            GraphKind::Grid2D => {
                let (i, j) = u.grid_coords();
                Box::new(
                    [VertexId::grid(i + 1, j), VertexId::grid(i, j + 1)].into_iter(),
                )
            }
        }
    }

    /// α(u): immediate predecessors; empty exactly at the root.
    pub fn parents(&self, u: &VertexId) -> Vec<VertexId> {
        match self {
            GraphKind::BinaryTree | GraphKind::HarrisUlam(_) => {
                u.parent_word().into_iter().collect()
            }
            GraphKind::Grid2D => {
                let (i, j) = u.grid_coords();
                let mut ps = Vec::new();
                if i > 0 {
                    ps.push(VertexId::grid(i - 1, j));
                }
                if j > 0 {
                    ps.push(VertexId::grid(i, j - 1));
                }
                ps
            }
        }
    }

    /// Local slot of `v` among the children of `u`, if `v` is a child.
    pub fn slot_of(&self, u: &VertexId, v: &VertexId) -> Option<usize> {
        match self {
            GraphKind::BinaryTree => {
                (v.parent_word().as_ref() == Some(u)).then(|| v.0[v.0.len() - 1] as usize)
            }
            GraphKind::HarrisUlam(_) => (v.parent_word().as_ref() == Some(u))
                .then(|| v.0[v.0.len() - 1] as usize - 1),
            GraphKind::Grid2D => {
                let (i, j) = u.grid_coords();
                let (k, l) = v.grid_coords();
                if (k, l) == (i + 1, j) {
                    Some(0)
                } else if (k, l) == (i, j + 1) {
                    Some(1)
                } else {
                    None
                }
            }
        }
    }

    /// Partial order: true iff there is a directed path `u -> .. -> v`
    /// (including `u == v`).
    pub fn is_leq(&self, u: &VertexId, v: &VertexId) -> bool {
        match self {
            GraphKind::BinaryTree | GraphKind::HarrisUlam(_) => u.is_prefix_of(v),
            GraphKind::Grid2D => {
                let (a, b) = u.grid_coords();
                let (c, d) = v.grid_coords();
                a <= c && b <= d
            }
        }
    }

    /// Exact number of directed paths from `u` to `v`.
    pub fn count_paths(&self, u: &VertexId, v: &VertexId) -> BigInt {
        if !self.is_leq(u, v) {
            return BigInt::from(0);
        }
        match self {
            GraphKind::BinaryTree | GraphKind::HarrisUlam(_) => BigInt::from(1),
            GraphKind::Grid2D => {
                let (a, b) = u.grid_coords();
                let (c, d) = v.grid_coords();
                binomial((c - a + d - b) as u64, (c - a) as u64)
            }
        }
    }

    /// Serialize a vertex in this substrate's preferred display form.
    pub fn format_vertex(&self, u: &VertexId) -> String {
        match self {
            GraphKind::Grid2D => {
                let (i, j) = u.grid_coords();
                format!("({i},{j})")
            }
            _ => format_word(u),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_children() {
        let k = GraphKind::BinaryTree;
        let u = VertexId::from_binary("01");
        let ch: Vec<_> = k.children(&u).collect();
        assert_eq!(ch, vec![VertexId::from_binary("010"), VertexId::from_binary("011")]);
    }

    #[test]
    fn grid_children_in_order() {
        let k = GraphKind::Grid2D;
        let ch: Vec<_> = k.children(&VertexId::grid(1, 2)).collect();
        assert_eq!(ch, vec![VertexId::grid(2, 2), VertexId::grid(1, 3)]);
    }

    #[test]
    fn harris_ulam_lazy_children() {
        let k = GraphKind::HarrisUlam(None);
        let ch: Vec<_> = k.children(&VertexId::root()).take(3).collect();
        assert_eq!(ch, vec![VertexId(vec![1]), VertexId(vec![2]), VertexId(vec![3])]);
    }

    #[test]
    fn parents_examples() {
        assert_eq!(
            GraphKind::Grid2D.parents(&VertexId::grid(1, 1)),
            vec![VertexId::grid(0, 1), VertexId::grid(1, 0)]
        );
        assert_eq!(
            GraphKind::BinaryTree.parents(&VertexId::from_binary("10")),
            vec![VertexId::from_binary("1")]
        );
        assert!(GraphKind::HarrisUlam(None).parents(&VertexId::root()).is_empty());
        assert!(GraphKind::Grid2D.parents(&VertexId::root()).is_empty());
    }

    #[test]
    fn leq_examples() {
        let b = GraphKind::BinaryTree;
        assert!(b.is_leq(&VertexId::from_binary("0"), &VertexId::from_binary("010")));
        assert!(b.is_leq(&VertexId::from_binary("0"), &VertexId::from_binary("0")));
        let g = GraphKind::Grid2D;
        assert!(!g.is_leq(&VertexId::grid(2, 0), &VertexId::grid(1, 3)));
    }

    #[test]
    fn count_paths_examples() {
        let g = GraphKind::Grid2D;
        // all north-east lattice paths from (0,0) to (2,1): RRU, RUR, URR
        assert_eq!(g.count_paths(&VertexId::root(), &VertexId::grid(2, 1)), BigInt::from(3));
        let b = GraphKind::BinaryTree;
        assert_eq!(
            b.count_paths(&VertexId::from_binary("0"), &VertexId::from_binary("01")),
            BigInt::from(1)
        );
        assert_eq!(
            b.count_paths(&VertexId::from_binary("1"), &VertexId::from_binary("01")),
            BigInt::from(0)
        );
    }

    #[test]
    fn word_round_trip() {
        for s in ["e", "", "010", "12", "(3,4)"] {
            let v = parse_word(s).unwrap();
            let back = parse_word(&format_word(&v)).unwrap();
            assert_eq!(v, back);
        }
        let v = VertexId(vec![10, 2]);
        assert_eq!(format_word(&v), "10.2");
        assert_eq!(parse_word("10.2").unwrap(), v);
    }

    #[test]
    fn grid_display() {
        let g = GraphKind::Grid2D;
        assert_eq!(g.format_vertex(&VertexId::grid(1, 2)), "(1,2)");
    }

    #[test]
    fn validation() {
        assert!(GraphKind::BinaryTree.validate(&VertexId(vec![0, 2])).is_err());
        assert!(GraphKind::HarrisUlam(Some(2)).validate(&VertexId(vec![3])).is_err());
        assert!(GraphKind::HarrisUlam(Some(2)).validate(&VertexId(vec![2, 1])).is_ok());
        // non-canonical grid word 10
        assert!(GraphKind::Grid2D.validate(&VertexId(vec![1, 0])).is_err());
    }

    #[test]
    fn children_parent_duality() {
        for kind in [GraphKind::BinaryTree, GraphKind::HarrisUlam(Some(3)), GraphKind::Grid2D] {
            let mut frontier = vec![VertexId::root()];
            for _ in 0..3 {
                let mut next = Vec::new();
                for u in &frontier {
                    for v in kind.children(u).take(4) {
                        assert!(kind.parents(&v).contains(u));
                        assert!(kind.count_paths(&VertexId::root(), &v) >= BigInt::from(1));
                        next.push(v);
                    }
                }
                frontier = next;
            }
        }
    }
}
