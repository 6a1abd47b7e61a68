//! Distance-constraint sets and their samplers.
//!
//! Three constraint families share one container: triplets (same-class pair
//! closer than a cross-class pair sharing the anchor), signed pairs (same or
//! different class with sign r = ±1), and quadruples (a same-class pair
//! closer than an unrelated cross-class pair). Samplers draw uniformly with
//! replacement from the valid combinations, so duplicate constraints are
//! allowed and every draw is reproducible from the seed.

use crate::rng::{sub_rng, STREAM_CONSTRAINTS};
use crate::{Error, Result};
use rand::Rng;

/// Which constraint family a set holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    Triplet,
    Pair,
    Quad,
}

/// A sampled set of distance constraints with a shared margin.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    kind: ConstraintKind,
    triplets: Vec<[usize; 3]>,
    /// (i, j, sign): sign +1 for same-class pairs, −1 for different-class.
    pairs: Vec<(usize, usize, i8)>,
    quads: Vec<[usize; 4]>,
    margin: f64,
}

impl ConstraintSet {
    /// Triplet set (anchor, same-class, other-class) with margin 1.
    pub fn from_triplets(triplets: Vec<[usize; 3]>) -> Self {
        Self { kind: ConstraintKind::Triplet, triplets, pairs: Vec::new(), quads: Vec::new(), margin: 1.0 }
    }

    /// Signed pair set with margin 1; sign must be ±1.
    pub fn from_pairs(pairs: Vec<(usize, usize, i8)>) -> Result<Self> {
        if pairs.iter().any(|&(_, _, r)| r != 1 && r != -1) {
            return Err(Error::InvalidArgument("pair sign must be +1 or -1".into()));
        }
        Ok(Self { kind: ConstraintKind::Pair, triplets: Vec::new(), pairs, quads: Vec::new(), margin: 1.0 })
    }

    /// Quadruple set (i, j, k, l) with margin 1.
    pub fn from_quads(quads: Vec<[usize; 4]>) -> Self {
        Self { kind: ConstraintKind::Quad, triplets: Vec::new(), pairs: Vec::new(), quads, margin: 1.0 }
    }

    /// Replaces the margin; must be positive.
    pub fn with_margin(mut self, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("margin must be positive, got {}", b)));
        }
        self.margin = b;
        Ok(self)
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Number of constraints of the active kind.
    pub fn len(&self) -> usize {
        match self.kind {
            ConstraintKind::Triplet => self.triplets.len(),
            ConstraintKind::Pair => self.pairs.len(),
            ConstraintKind::Quad => self.quads.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn triplet_terms(&self) -> &[[usize; 3]] {
        &self.triplets
    }

    pub fn pair_terms(&self) -> &[(usize, usize, i8)] {
        &self.pairs
    }

    pub fn quad_terms(&self) -> &[[usize; 4]] {
        &self.quads
    }

    /// Largest example index referenced, if any constraint exists.
    pub fn max_index(&self) -> Option<usize> {
        let tri = self.triplets.iter().flatten().copied().max();
        let pair = self.pairs.iter().flat_map(|&(i, j, _)| [i, j]).max();
        let quad = self.quads.iter().flatten().copied().max();
        [tri, pair, quad].into_iter().flatten().max()
    }

    /// Checks index ranges and the class relations each kind promises:
    /// triplets y_i = y_j ≠ y_k, pair signs matching label equality, quads
    /// y_i = y_j and y_k ≠ y_l.
    pub fn validate_labels(&self, labels: &[usize]) -> Result<()> {
        let n = labels.len();
        let check = |idx: usize| -> Result<()> {
            if idx >= n {
                return Err(Error::InvalidData(format!("constraint index {} out of range (n={})", idx, n)));
            }
            Ok(())
        };
        for &[i, j, k] in &self.triplets {
            check(i)?;
            check(j)?;
            check(k)?;
            if labels[i] != labels[j] || labels[i] == labels[k] {
                return Err(Error::InvalidData(format!(
                    "triplet ({},{},{}) violates class pattern",
                    i, j, k
                )));
            }
        }
        for &(i, j, r) in &self.pairs {
            check(i)?;
            check(j)?;
            let same = labels[i] == labels[j];
            if same != (r == 1) {
                return Err(Error::InvalidData(format!("pair ({},{}) sign {} mismatches labels", i, j, r)));
            }
        }
        for &[i, j, k, l] in &self.quads {
            check(i)?;
            check(j)?;
            check(k)?;
            check(l)?;
            if labels[i] != labels[j] || labels[k] == labels[l] {
                return Err(Error::InvalidData(format!(
                    "quad ({},{},{},{}) violates class pattern",
                    i, j, k, l
                )));
            }
        }
        Ok(())
    }
}

/// Per-class member lists used by the samplers.
struct ClassIndex {
    members: Vec<Vec<usize>>,
    /// For each class, every example of a different class.
    others: Vec<Vec<usize>>,
    /// Position of each example within its own class list.
    position: Vec<usize>,
}

impl ClassIndex {
    fn build(labels: &[usize]) -> Result<Self> {
        let n = labels.len();
        let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes];
        let mut position = vec![0usize; n];
        for (i, &y) in labels.iter().enumerate() {
            position[i] = members[y].len();
            members[y].push(i);
        }
        let present: Vec<usize> = (0..classes).filter(|&c| !members[c].is_empty()).collect();
        if present.len() < 2 {
            return Err(Error::InvalidData("constraints need at least two classes".into()));
        }
        for &c in &present {
            if members[c].len() < 2 {
                return Err(Error::InvalidData(format!(
                    "class {} has a single member; no same-class pair exists",
                    c
                )));
            }
        }
        let mut others: Vec<Vec<usize>> = vec![Vec::new(); classes];
        for c in 0..classes {
            others[c] = (0..n).filter(|&i| labels[i] != c).collect();
        }
        Ok(Self { members, others, position })
    }

    /// Uniform same-class partner of `i`, excluding `i` itself.
    fn same_class_partner<R: Rng>(&self, i: usize, class: usize, rng: &mut R) -> usize {
        let group = &self.members[class];
        let mut r = rng.gen_range(0..group.len() - 1);
        if r >= self.position[i] {
            r += 1;
        }
        group[r]
    }

    fn other_class_point<R: Rng>(&self, class: usize, rng: &mut R) -> usize {
        let pool = &self.others[class];
        pool[rng.gen_range(0..pool.len())]
    }
}

/// Samples `count` triplets (anchor, same-class partner, other-class point),
/// uniformly with replacement, reproducible per seed.
pub fn build_triplets(labels: &[usize], count: usize, seed: u64) -> Result<ConstraintSet> {
    if count == 0 {
        return Err(Error::InvalidArgument("constraint count must be positive".into()));
    }
    let index = ClassIndex::build(labels)?;
    let mut rng = sub_rng(seed, STREAM_CONSTRAINTS);
    let n = labels.len();
    let mut triplets = Vec::with_capacity(count);
    for _ in 0..count {
        let i = rng.gen_range(0..n);
        let class = labels[i];
        let j = index.same_class_partner(i, class, &mut rng);
        let k = index.other_class_point(class, &mut rng);
        triplets.push([i, j, k]);
    }
    Ok(ConstraintSet::from_triplets(triplets))
}

/// Samples `count` signed pairs: the first ⌈count/2⌉ are same-class (+1),
/// the rest different-class (−1); reproducible per seed.
pub fn build_pairs(labels: &[usize], count: usize, seed: u64) -> Result<ConstraintSet> {
    if count == 0 {
        return Err(Error::InvalidArgument("constraint count must be positive".into()));
    }
    let index = ClassIndex::build(labels)?;
    let mut rng = sub_rng(seed, STREAM_CONSTRAINTS);
    let n = labels.len();
    let positives = count - count / 2;
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..positives {
        let i = rng.gen_range(0..n);
        let j = index.same_class_partner(i, labels[i], &mut rng);
        pairs.push((i, j, 1i8));
    }
    for _ in 0..count / 2 {
        let i = rng.gen_range(0..n);
        let k = index.other_class_point(labels[i], &mut rng);
        pairs.push((i, k, -1i8));
    }
    ConstraintSet::from_pairs(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_respect_class_pattern() {
        let labels = vec![0, 0, 1, 1];
        let cs = build_triplets(&labels, 4, 9).unwrap();
        assert_eq!(cs.len(), 4);
        cs.validate_labels(&labels).unwrap();
    }

    #[test]
    fn all_distinct_labels_rejected() {
        let labels = vec![0, 1, 2, 3];
        let err = build_triplets(&labels, 3, 1).unwrap_err();
        assert!(err.to_string().contains("single member"), "{}", err);
    }

    #[test]
    fn singleton_class_rejected() {
        let labels = vec![0, 0, 1, 1, 2];
        let err = build_triplets(&labels, 3, 1).unwrap_err();
        assert!(err.to_string().contains("class 2"), "{}", err);
    }

    #[test]
    fn single_class_rejected() {
        let labels = vec![0, 0, 0];
        assert!(build_pairs(&labels, 2, 1).is_err());
    }

    #[test]
    fn zero_count_rejected() {
        let labels = vec![0, 0, 1, 1];
        assert!(build_triplets(&labels, 0, 1).is_err());
        assert!(build_pairs(&labels, 0, 1).is_err());
    }

    #[test]
    fn sampled_triplets_within_enumeration() {
        // n=4 with classes {0,0,1,1}: enumerate every valid triplet and
        // check the sampler never leaves that set.
        let labels = vec![0usize, 0, 1, 1];
        let mut valid = std::collections::HashSet::new();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    if j != i && labels[i] == labels[j] && labels[i] != labels[k] {
                        valid.insert([i, j, k]);
                    }
                }
            }
        }
        assert_eq!(valid.len(), 8);
        for seed in 0..30u64 {
            let cs = build_triplets(&labels, 25, seed).unwrap();
            for t in cs.triplet_terms() {
                assert!(valid.contains(t), "sampled invalid triplet {:?}", t);
            }
        }
    }

    #[test]
    fn pairs_balanced_and_within_enumeration() {
        let labels = vec![0usize, 0, 1, 1];
        let cs = build_pairs(&labels, 4, 3).unwrap();
        let pos = cs.pair_terms().iter().filter(|&&(_, _, r)| r == 1).count();
        let neg = cs.pair_terms().iter().filter(|&&(_, _, r)| r == -1).count();
        assert_eq!((pos, neg), (2, 2));
        cs.validate_labels(&labels).unwrap();
        // Odd counts put the extra draw on the same-class side.
        let odd = build_pairs(&labels, 5, 3).unwrap();
        let pos_odd = odd.pair_terms().iter().filter(|&&(_, _, r)| r == 1).count();
        assert_eq!(pos_odd, 3);
    }

    #[test]
    fn deterministic_per_seed() {
        let labels = vec![0usize, 1, 0, 1, 0, 1, 2, 2];
        let a = build_triplets(&labels, 40, 77).unwrap();
        let b = build_triplets(&labels, 40, 77).unwrap();
        assert_eq!(a.triplet_terms(), b.triplet_terms());
        let c = build_triplets(&labels, 40, 78).unwrap();
        assert_ne!(a.triplet_terms(), c.triplet_terms());
    }

    #[test]
    fn margin_validation() {
        let cs = ConstraintSet::from_triplets(vec![[0, 1, 2]]);
        assert!(cs.clone().with_margin(0.0).is_err());
        assert!(cs.clone().with_margin(-1.0).is_err());
        assert_eq!(cs.with_margin(2.5).unwrap().margin(), 2.5);
    }

    #[test]
    fn validate_labels_catches_bad_sets() {
        let labels = vec![0usize, 0, 1, 1];
        let bad_triplet = ConstraintSet::from_triplets(vec![[0, 2, 3]]);
        assert!(bad_triplet.validate_labels(&labels).is_err());
        let out_of_range = ConstraintSet::from_triplets(vec![[0, 1, 9]]);
        assert!(out_of_range.validate_labels(&labels).is_err());
        let bad_pair = ConstraintSet::from_pairs(vec![(0, 1, -1)]).unwrap();
        assert!(bad_pair.validate_labels(&labels).is_err());
        let good_quad = ConstraintSet::from_quads(vec![[0, 1, 2, 0]]);
        good_quad.validate_labels(&labels).unwrap();
    }
}
