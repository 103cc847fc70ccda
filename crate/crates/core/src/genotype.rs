//! Upper-layer solution representation.
//!
//! A genotype is a permutation of `1..=n_dim` where ids `1..=n_segs` are
//! real paint segments of the planned side and `n_segs+1..=n_dim` are
//! dummies. The permutation is cut into equal-length contiguous slots, one
//! per planned-side arm in row order; a slot lists that arm's visits.

use std::fmt;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scene::{ScenarioConfig, SegmentId, VehicleScene};

/// Dimensions shared by every genotype of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n_segs: usize,
    pub n_dim: usize,
    pub n_arms_side: usize,
}

impl Layout {
    pub fn new(n_segs: usize, n_dummies: usize, n_arms_side: usize) -> Self {
        let n_dim = n_segs + n_dummies;
        assert!(
            n_arms_side > 0 && n_dim.is_multiple_of(n_arms_side),
            "genotype length {n_dim} must split evenly over {n_arms_side} arms"
        );
        Self {
            n_segs,
            n_dim,
            n_arms_side,
        }
    }

    pub fn for_scene(scene: &VehicleScene, cfg: &ScenarioConfig) -> Self {
        Self::new(scene.n_segs(), cfg.n_d as usize, scene.n_arms_side())
    }

    pub fn slot_len(&self) -> usize {
        self.n_dim / self.n_arms_side
    }

    pub fn slot(&self, arm: usize) -> Range<usize> {
        let len = self.slot_len();
        arm * len..(arm + 1) * len
    }

    pub fn slot_of(&self, position: usize) -> usize {
        position / self.slot_len()
    }

    pub fn is_dummy(&self, id: SegmentId) -> bool {
        id as usize > self.n_segs
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UpperSolution {
    genes: Vec<SegmentId>,
}

impl UpperSolution {
    pub fn new(genes: Vec<SegmentId>) -> Self {
        Self { genes }
    }

    pub fn identity(layout: &Layout) -> Self {
        Self::new((1..=layout.n_dim as SegmentId).collect())
    }

    pub fn random<R: Rng + ?Sized>(layout: &Layout, rng: &mut R) -> Self {
        let mut x = Self::identity(layout);
        x.genes.shuffle(rng);
        x
    }

    pub fn genes(&self) -> &[SegmentId] {
        &self.genes
    }

    pub fn genes_mut(&mut self) -> &mut [SegmentId] {
        &mut self.genes
    }

    pub fn into_genes(self) -> Vec<SegmentId> {
        self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn swap(&mut self, i: usize, j: usize) {
        self.genes.swap(i, j);
    }

    /// Position of every id, indexed by id (index 0 unused).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.genes.len() + 1];
        for (k, &g) in self.genes.iter().enumerate() {
            if let Some(p) = pos.get_mut(g as usize) {
                *p = k;
            }
        }
        pos
    }
}

/// Real segments visited by each planned-side arm, in visit order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ArmAssignment {
    pub arms: Vec<Vec<SegmentId>>,
}

impl ArmAssignment {
    pub fn total(&self) -> usize {
        self.arms.iter().map(Vec::len).sum()
    }
}

/// Strips dummies and splits the permutation into arm slots.
pub fn decode(x: &UpperSolution, layout: &Layout) -> ArmAssignment {
    let arms = (0..layout.n_arms_side)
        .map(|a| {
            x.genes[layout.slot(a)]
                .iter()
                .copied()
                .filter(|&g| !layout.is_dummy(g))
                .collect()
        })
        .collect();
    ArmAssignment { arms }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GenotypeViolation {
    pub length: Option<(usize, usize)>,
    /// Id and every position at which it occurs.
    pub duplicates: Vec<(SegmentId, Vec<usize>)>,
    pub missing: Vec<SegmentId>,
    /// Position and offending value.
    pub out_of_range: Vec<(usize, SegmentId)>,
}

impl fmt::Display for GenotypeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some((got, want)) = self.length {
            parts.push(format!("length {got}, expected {want}"));
        }
        for (id, pos) in &self.duplicates {
            parts.push(format!("id {id} repeated at positions {pos:?}"));
        }
        if !self.missing.is_empty() {
            parts.push(format!("missing ids {:?}", self.missing));
        }
        for (pos, id) in &self.out_of_range {
            parts.push(format!("id {id} at position {pos} is out of range"));
        }
        write!(f, "{}", parts.join("; "))
    }
}

impl std::error::Error for GenotypeViolation {}

/// Checks the permutation invariant.
pub fn validate(x: &UpperSolution, layout: &Layout) -> Result<(), GenotypeViolation> {
    let mut report = GenotypeViolation::default();
    if x.len() != layout.n_dim {
        report.length = Some((x.len(), layout.n_dim));
    }
    let mut seen: Vec<Vec<usize>> = vec![Vec::new(); layout.n_dim + 1];
    for (k, &g) in x.genes.iter().enumerate() {
        match seen.get_mut(g as usize) {
            Some(list) if g != 0 => list.push(k),
            _ => report.out_of_range.push((k, g)),
        }
    }
    for (id, pos) in seen.into_iter().enumerate().skip(1) {
        match pos.len() {
            0 => report.missing.push(id as SegmentId),
            1 => {}
            _ => report.duplicates.push((id as SegmentId, pos)),
        }
    }
    if report == GenotypeViolation::default() {
        Ok(())
    } else {
        Err(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_two_arms_four_segments() {
        let layout = Layout::new(4, 0, 2);
        let a = decode(&UpperSolution::identity(&layout), &layout);
        assert_eq!(a.arms, vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn slot_order_is_visit_order() {
        // Real ids 1..=8, dummies 9..=10; first arm visits 2, 7, 6.
        let layout = Layout::new(8, 2, 2);
        let x = UpperSolution::new(vec![2, 7, 9, 6, 1, 3, 4, 5, 10, 8]);
        let a = decode(&x, &layout);
        assert_eq!(a.arms[0], vec![2, 7, 6, 1]);
        assert_eq!(a.arms[1], vec![3, 4, 5, 8]);
    }

    #[test]
    fn dummy_only_slot_decodes_empty() {
        let layout = Layout::new(2, 2, 2);
        let x = UpperSolution::new(vec![3, 4, 1, 2]);
        assert_eq!(decode(&x, &layout).arms, vec![vec![], vec![1, 2]]);
    }

    #[test]
    fn validate_accepts_permutation() {
        let layout = Layout::new(5, 1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(validate(&UpperSolution::random(&layout, &mut rng), &layout).is_ok());
    }

    #[test]
    fn validate_names_repeated_id() {
        let layout = Layout::new(6, 0, 2);
        let x = UpperSolution::new(vec![1, 5, 3, 4, 5, 6]);
        let err = validate(&x, &layout).unwrap_err();
        assert_eq!(err.duplicates, vec![(5, vec![1, 4])]);
        assert_eq!(err.missing, vec![2]);
        assert!(err.to_string().contains("id 5"));
    }

    #[test]
    fn validate_flags_missing_dummy() {
        let layout = Layout::new(4, 2, 2);
        let x = UpperSolution::new(vec![1, 2, 3, 4, 5]);
        let err = validate(&x, &layout).unwrap_err();
        assert_eq!(err.missing, vec![6]);
        assert_eq!(err.length, Some((5, 6)));
    }
}
