//! Permutations, top-k lists and display sets over a universe `0..n`.
//!
//! A [`Ranking`] stores both views of a permutation: `order[i]` is the item in
//! position `i` (most preferred first) and `position[x]` is the position of
//! item `x`. Lower item labels are "better" under the identity ranking, which
//! is the reference every identity-centred formula in this crate assumes.
//! [`relabel`] and [`relabel_topk`] move an arbitrary central ranking onto the
//! identity.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A full ranking of the items `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Ranking {
    order: Vec<usize>,
    #[serde(skip)]
    position: Vec<usize>,
}

impl Ranking {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (pos, &item) in order.iter().enumerate() {
            if item >= n {
                return Err(Error::InvalidRanking {
                    n,
                    detail: format!("item {item} out of range"),
                });
            }
            if position[item] != usize::MAX {
                return Err(Error::InvalidRanking {
                    n,
                    detail: format!("item {item} repeated"),
                });
            }
            position[item] = pos;
        }
        Ok(Self { order, position })
    }

    /// Builds a ranking from 1-indexed labels, as rankings are usually written by hand.
    pub fn from_one_indexed(order: &[usize]) -> Result<Self> {
        if order.contains(&0) {
            return Err(Error::InvalidRanking {
                n: order.len(),
                detail: "label 0 in a 1-indexed ranking".into(),
            });
        }
        Self::new(order.iter().map(|&x| x - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        let order: Vec<usize> = (0..n).collect();
        Self {
            position: order.clone(),
            order,
        }
    }

    pub fn reversal(n: usize) -> Self {
        Self::new((0..n).rev().collect()).expect("reversal is a permutation")
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Item → position view (`σ = π⁻¹`).
    pub fn positions(&self) -> &[usize] {
        &self.position
    }

    pub fn item_at(&self, pos: usize) -> usize {
        self.order[pos]
    }

    pub fn position_of(&self, item: usize) -> usize {
        self.position[item]
    }

    /// `true` when `x` is ranked ahead of `y`.
    pub fn prefers(&self, x: usize, y: usize) -> bool {
        self.position[x] < self.position[y]
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Ranking {
        Ranking {
            order: self.position.clone(),
            position: self.order.clone(),
        }
    }

    /// Composition `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Ranking) -> Result<Ranking> {
        check_same_n(self.n(), other.n())?;
        Ranking::new(other.order.iter().map(|&i| self.order[i]).collect())
    }

    /// The first `k` entries as a top-k list.
    pub fn prefix(&self, k: usize) -> TopKList {
        assert!(k <= self.n(), "prefix length {k} exceeds n = {}", self.n());
        TopKList {
            items: self.order[..k].to_vec(),
            n: self.n(),
        }
    }

    /// Swaps the items in positions `pos` and `pos + 1`.
    pub fn swap_adjacent(&self, pos: usize) -> Ranking {
        let mut order = self.order.clone();
        order.swap(pos, pos + 1);
        Ranking::new(order).expect("swap preserves permutation")
    }
}

impl TryFrom<Vec<usize>> for Ranking {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Ranking::new(order)
    }
}

impl From<Ranking> for Vec<usize> {
    fn from(r: Ranking) -> Self {
        r.order
    }
}

impl fmt::Debug for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ranking{:?}", self.order)
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.order)
    }
}

/// An ordered list of `k` distinct items, the top of some full ranking.
///
/// `k = 0` is allowed only through [`TopKList::empty`], which stands for the
/// root of the ranking tree (nothing chosen yet).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TopKList {
    items: Vec<usize>,
    n: usize,
}

impl TopKList {
    pub fn new(items: Vec<usize>, n: usize) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidTopK {
                n,
                detail: "empty list".into(),
            });
        }
        if items.len() > n {
            return Err(Error::InvalidTopK {
                n,
                detail: format!("{} items", items.len()),
            });
        }
        let mut seen = vec![false; n];
        for &x in &items {
            if x >= n {
                return Err(Error::InvalidTopK {
                    n,
                    detail: format!("item {x} out of range"),
                });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidTopK {
                    n,
                    detail: format!("item {x} repeated"),
                });
            }
        }
        Ok(Self { items, n })
    }

    pub fn from_one_indexed(items: &[usize], n: usize) -> Result<Self> {
        if items.contains(&0) {
            return Err(Error::InvalidTopK {
                n,
                detail: "label 0 in a 1-indexed list".into(),
            });
        }
        Self::new(items.iter().map(|&x| x - 1).collect(), n)
    }

    /// The empty prefix.
    pub fn empty(n: usize) -> Self {
        Self {
            items: Vec::new(),
            n,
        }
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn k(&self) -> usize {
        self.items.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.items.last().copied()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.items.contains(&x)
    }

    /// Concatenation `self ⊕ y`.
    pub fn push(&self, y: usize) -> Result<TopKList> {
        let mut items = self.items.clone();
        items.push(y);
        TopKList::new(items, self.n)
    }

    /// The list without its last item.
    pub fn parent(&self) -> TopKList {
        let mut items = self.items.clone();
        items.pop();
        TopKList { items, n: self.n }
    }

    /// Items not in the list, ascending.
    pub fn complement(&self) -> Vec<usize> {
        let mut listed = vec![false; self.n];
        for &x in &self.items {
            listed[x] = true;
        }
        (0..self.n).filter(|&x| !listed[x]).collect()
    }

    /// `true` when `self` is a prefix of `ranking`.
    pub fn is_prefix_of(&self, ranking: &Ranking) -> bool {
        self.n == ranking.n() && ranking.order()[..self.k()] == self.items[..]
    }
}

impl fmt::Debug for TopKList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TopK{:?}/{}", self.items, self.n)
    }
}

impl fmt::Display for TopKList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.items)
    }
}

/// A set of at least two items offered together, stored ascending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DisplaySet {
    items: Vec<usize>,
    n: usize,
}

impl DisplaySet {
    pub fn new(mut items: Vec<usize>, n: usize) -> Result<Self> {
        items.sort_unstable();
        if items.len() < 2 {
            return Err(Error::InvalidDisplay(format!(
                "needs at least two items, got {}",
                items.len()
            )));
        }
        if items.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDisplay("repeated item".into()));
        }
        if let Some(&max) = items.last() {
            if max >= n {
                return Err(Error::InvalidDisplay(format!(
                    "item {max} outside universe of {n}"
                )));
            }
        }
        Ok(Self { items, n })
    }

    pub fn from_one_indexed(items: &[usize], n: usize) -> Result<Self> {
        if items.contains(&0) {
            return Err(Error::InvalidDisplay("label 0 in a 1-indexed set".into()));
        }
        Self::new(items.iter().map(|&x| x - 1).collect(), n)
    }

    pub fn full(n: usize) -> Self {
        assert!(n >= 2, "a display set needs at least two items");
        Self {
            items: (0..n).collect(),
            n,
        }
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, x: usize) -> bool {
        self.items.binary_search(&x).is_ok()
    }

    /// Number of members with a smaller label than `x` (0-based rank of `x` in the set).
    pub fn relative_rank(&self, x: usize) -> Result<usize> {
        self.items
            .binary_search(&x)
            .map_err(|_| Error::NotInDisplay { item: x })
    }

    /// `true` when every listed item belongs to the set.
    pub fn contains_all(&self, pi_k: &TopKList) -> bool {
        pi_k.items().iter().all(|&x| self.contains(x))
    }
}

impl fmt::Debug for DisplaySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Display{:?}/{}", self.items, self.n)
    }
}

/// `π*⁻¹ ∘ π`: re-expresses `pi` in the coordinates where `center` is the identity.
pub fn relabel(pi: &Ranking, center: &Ranking) -> Result<Ranking> {
    check_same_n(center.n(), pi.n())?;
    Ranking::new(pi.order().iter().map(|&x| center.position_of(x)).collect())
}

/// Top-k version of [`relabel`]: each item is replaced by its position in `center`.
pub fn relabel_topk(pi_k: &TopKList, center: &Ranking) -> Result<TopKList> {
    check_same_n(center.n(), pi_k.n())?;
    Ok(TopKList {
        items: pi_k
            .items()
            .iter()
            .map(|&x| center.position_of(x))
            .collect(),
        n: pi_k.n(),
    })
}

/// Relabels a display set so that `center` becomes the identity.
pub fn relabel_display(s: &DisplaySet, center: &Ranking) -> Result<DisplaySet> {
    check_same_n(center.n(), s.n())?;
    DisplaySet::new(
        s.items().iter().map(|&x| center.position_of(x)).collect(),
        s.n(),
    )
}

pub(crate) fn check_same_n(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::SizeMismatch { expected, actual })
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, items: &[usize]) -> fmt::Result {
    write!(f, "(")?;
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_view_matches_paper_example() {
        // π = (3,1,2) ↔ σ = (2,3,1)
        let pi = Ranking::from_one_indexed(&[3, 1, 2]).unwrap();
        let sigma: Vec<usize> = pi.positions().iter().map(|p| p + 1).collect();
        assert_eq!(sigma, vec![2, 3, 1]);
        assert!(pi.prefers(2, 0));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Ranking::new(vec![0, 0, 1]).is_err());
        assert!(Ranking::new(vec![0, 3, 1]).is_err());
        assert!(TopKList::new(vec![], 3).is_err());
        assert!(TopKList::new(vec![1, 1], 3).is_err());
        assert!(DisplaySet::new(vec![1], 3).is_err());
        assert!(DisplaySet::new(vec![1, 1], 3).is_err());
        assert!(DisplaySet::new(vec![1, 3], 3).is_err());
    }

    #[test]
    fn relabel_identities() {
        let pi = Ranking::new(vec![2, 0, 3, 1]).unwrap();
        assert_eq!(relabel(&pi, &Ranking::identity(4)).unwrap(), pi);
        assert!(relabel(&pi, &pi).unwrap().is_identity());
        assert!(relabel(&pi, &Ranking::identity(5)).is_err());
    }

    #[test]
    fn inverse_and_compose() {
        let pi = Ranking::new(vec![2, 0, 3, 1]).unwrap();
        assert!(pi.compose(&pi.inverse()).unwrap().is_identity());
        assert!(pi.inverse().compose(&pi).unwrap().is_identity());
        // relabel(π, π*) = π*⁻¹ π
        let center = Ranking::new(vec![1, 3, 0, 2]).unwrap();
        assert_eq!(
            relabel(&pi, &center).unwrap(),
            center.inverse().compose(&pi).unwrap()
        );
    }

    #[test]
    fn display_relative_rank() {
        let s = DisplaySet::new(vec![6, 1, 3], 7).unwrap();
        assert_eq!(s.items(), &[1, 3, 6]);
        assert_eq!(s.relative_rank(6).unwrap(), 2);
        assert!(s.relative_rank(2).is_err());
    }

    #[test]
    fn serde_roundtrip_validates() {
        let pi = Ranking::new(vec![1, 2, 0]).unwrap();
        let json = serde_json::to_string(&pi).unwrap();
        assert_eq!(json, "[1,2,0]");
        let back: Ranking = serde_json::from_str(&json).unwrap();
        assert_eq!(back.position_of(0), 2);
        assert!(serde_json::from_str::<Ranking>("[1,1,0]").is_err());
    }
}
