//! Initial population with arm boundaries aligned across panels.
//!
//! A reference stack is built from the side panel with the most strokes,
//! continued over the roof when there is one (roof width read as extra
//! height). Boundaries between arms are chosen as stack indices, turned
//! into height thresholds, and applied to every panel, so each arm paints
//! the same height band everywhere. The first individual splits the stack
//! evenly; further individuals shift the boundaries depth-first.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genotype::{Layout, UpperSolution};
use crate::scene::{PanelId, PanelKind, ScenarioConfig, SegmentId, VehicleScene};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedingError {
    #[error("scene has no vertical side panel to align boundaries on")]
    NoVerticalPanel,
}

/// Side panel with the most segments, lowest id on ties.
pub fn select_reference_panel(scene: &VehicleScene) -> Result<PanelId, SeedingError> {
    scene
        .panels
        .iter()
        .filter(|p| p.kind == PanelKind::VerticalSide)
        .max_by(|a, b| a.segments.len().cmp(&b.segments.len()).then(b.id.cmp(&a.id)))
        .map(|p| p.id)
        .ok_or(SeedingError::NoVerticalPanel)
}

/// Height scale shared by all panels: `y` on vertical panels; on hood and
/// roof, the top of the reference panel plus the distance in from the
/// panel's outer edge.
#[derive(Debug, Clone)]
pub struct HeightScale {
    side_top: f64,
    edges: Vec<(PanelId, f64)>,
}

impl HeightScale {
    pub fn new(scene: &VehicleScene, reference: PanelId) -> Self {
        let side_top = scene
            .panel(reference)
            .segments
            .iter()
            .map(|&s| scene.segment(s).midpoint().y)
            .fold(f64::NEG_INFINITY, f64::max);
        let edges = scene
            .panels
            .iter()
            .filter(|p| matches!(p.kind, PanelKind::Hood | PanelKind::Roof))
            .map(|p| {
                let edge = p
                    .segments
                    .iter()
                    .map(|&s| scene.segment(s).midpoint().z.abs())
                    .fold(f64::NEG_INFINITY, f64::max);
                (p.id, edge)
            })
            .collect();
        Self { side_top, edges }
    }

    pub fn height(&self, scene: &VehicleScene, seg: SegmentId) -> f64 {
        let s = scene.segment(seg);
        let m = s.midpoint();
        match self.edges.iter().find(|(p, _)| *p == s.panel_id) {
            Some(&(_, edge)) => self.side_top + (edge - m.z.abs()),
            None => m.y,
        }
    }
}

/// Reference stack: reference panel plus roof, sorted by merged height.
pub fn reference_stack(scene: &VehicleScene, scale: &HeightScale, reference: PanelId) -> Vec<f64> {
    let mut stack: Vec<f64> = scene
        .panels
        .iter()
        .filter(|p| p.id == reference || p.kind == PanelKind::Roof)
        .flat_map(|p| p.segments.iter().map(|&s| scale.height(scene, s)))
        .collect();
    stack.sort_by(f64::total_cmp);
    stack
}

/// Boundary indices into the reference stack, one per arm pair; arm `a`
/// owns stack entries `[h_a, h_{a+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySet {
    pub heights: Vec<usize>,
}

impl BoundarySet {
    pub fn equal_split(n_stack: usize, n_arms: usize) -> Self {
        let heights = (1..n_arms)
            .map(|i| ((i * n_stack) as f64 / n_arms as f64).round() as usize)
            .collect();
        Self { heights }
    }

    /// Strictly increasing with every block nonempty.
    pub fn is_valid(&self, n_stack: usize) -> bool {
        let mut prev = 0;
        for &h in &self.heights {
            if h <= prev || h >= n_stack {
                return false;
            }
            prev = h;
        }
        true
    }

    /// Height thresholds halfway between the stack entries either side of
    /// each boundary. Boundaries at or past the ends of a short stack give
    /// infinite thresholds.
    pub fn thresholds(&self, stack: &[f64]) -> Vec<f64> {
        self.heights
            .iter()
            .map(|&h| match h {
                0 => f64::NEG_INFINITY,
                h if h >= stack.len() => f64::INFINITY,
                h => 0.5 * (stack[h - 1] + stack[h]),
            })
            .collect()
    }
}

/// Depth-first boundary enumeration: boundary `i` is shifted by
/// `+1..=+δ` then `-1..=-δ`, and every full combination is emitted.
/// Invalid sets are skipped. Stops after `limit` sets.
pub fn shifted_boundaries(base: &BoundarySet, delta: u32, n_stack: usize, limit: usize) -> Vec<BoundarySet> {
    fn extend(
        base: &BoundarySet,
        cur: &mut Vec<usize>,
        shifts: &[i64],
        n_stack: usize,
        limit: usize,
        out: &mut Vec<BoundarySet>,
    ) {
        if out.len() >= limit {
            return;
        }
        let i = cur.len();
        if i == base.heights.len() {
            let set = BoundarySet {
                heights: cur.clone(),
            };
            if set.is_valid(n_stack) {
                out.push(set);
            }
            return;
        }
        for &s in shifts {
            let h = base.heights[i] as i64 + s;
            if h < 0 {
                continue;
            }
            cur.push(h as usize);
            extend(base, cur, shifts, n_stack, limit, out);
            cur.pop();
        }
    }
    let d = i64::from(delta);
    let shifts: Vec<i64> = (1..=d).chain((1..=d).map(|s| -s)).collect();
    let mut out = Vec::new();
    if delta > 0 && !base.heights.is_empty() {
        extend(base, &mut Vec::new(), &shifts, n_stack, limit, &mut out);
    }
    out
}

/// Everything needed to turn boundary sets into genotypes.
#[derive(Debug, Clone)]
pub struct Seeder<'a> {
    scene: &'a VehicleScene,
    layout: Layout,
    scale: HeightScale,
    pub stack: Vec<f64>,
    /// Real segments in within-slot visit order: panels front to back,
    /// then bottom to top.
    order: Vec<SegmentId>,
}

impl<'a> Seeder<'a> {
    pub fn new(scene: &'a VehicleScene, cfg: &ScenarioConfig) -> Result<Self, SeedingError> {
        let reference = select_reference_panel(scene)?;
        let scale = HeightScale::new(scene, reference);
        let stack = reference_stack(scene, &scale, reference);
        let front = |p: PanelId| {
            scene
                .panel(p)
                .segments
                .iter()
                .map(|&s| {
                    let seg = scene.segment(s);
                    seg.endpoint_a.x.max(seg.endpoint_b.x)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let mut order: Vec<SegmentId> = scene.segments.iter().map(|s| s.id).collect();
        order.sort_by(|&a, &b| {
            let (sa, sb) = (scene.segment(a), scene.segment(b));
            front(sb.panel_id)
                .total_cmp(&front(sa.panel_id))
                .then(sa.panel_id.cmp(&sb.panel_id))
                .then(sa.height_index.cmp(&sb.height_index))
        });
        Ok(Self {
            scene,
            layout: Layout::for_scene(scene, cfg),
            scale,
            stack,
            order,
        })
    }

    pub fn equal_split(&self) -> BoundarySet {
        BoundarySet::equal_split(self.stack.len(), self.layout.n_arms_side)
    }

    /// Arm of every real segment under the thresholds, before any
    /// capacity adjustment.
    pub fn project(&self, set: &BoundarySet) -> Vec<usize> {
        let th = set.thresholds(&self.stack);
        self.scene
            .segments
            .iter()
            .map(|s| {
                let h = self.scale.height(self.scene, s.id);
                th.iter().filter(|&&t| t < h).count()
            })
            .collect()
    }

    /// Genotype for a boundary set. Arms over their slot capacity hand
    /// their highest segments up to the next arm, then (for the top arm)
    /// their lowest down to the previous one.
    pub fn individual(&self, set: &BoundarySet) -> UpperSolution {
        let n = self.layout.n_arms_side;
        let cap = self.layout.slot_len();
        let arm_of = self.project(set);
        let mut slots: Vec<Vec<SegmentId>> = vec![Vec::new(); n];
        for &s in &self.order {
            slots[arm_of[(s - 1) as usize]].push(s);
        }
        let height = |s: &SegmentId| self.scale.height(self.scene, *s);
        for a in 0..n.saturating_sub(1) {
            while slots[a].len() > cap {
                let (i, _) = slots[a]
                    .iter()
                    .enumerate()
                    .max_by(|x, y| height(x.1).total_cmp(&height(y.1)))
                    .expect("nonempty");
                let s = slots[a].remove(i);
                slots[a + 1].push(s);
            }
        }
        for a in (1..n).rev() {
            while slots[a].len() > cap {
                let (i, _) = slots[a]
                    .iter()
                    .enumerate()
                    .min_by(|x, y| height(x.1).total_cmp(&height(y.1)))
                    .expect("nonempty");
                let s = slots[a].remove(i);
                slots[a - 1].push(s);
            }
        }
        let rank: Vec<usize> = {
            let mut r = vec![0; self.order.len()];
            for (i, &s) in self.order.iter().enumerate() {
                r[(s - 1) as usize] = i;
            }
            r
        };
        let mut dummy = self.layout.n_segs as SegmentId;
        let mut genes = Vec::with_capacity(self.layout.n_dim);
        for mut slot in slots {
            slot.sort_by_key(|&s| rank[(s - 1) as usize]);
            let fill = cap - slot.len();
            genes.extend(slot);
            for _ in 0..fill {
                dummy += 1;
                genes.push(dummy);
            }
        }
        UpperSolution::new(genes)
    }

    /// Equal split first, then shifted boundary sets, at most `limit` in all.
    pub fn seeded(&self, delta: u32, limit: usize) -> Vec<UpperSolution> {
        if limit == 0 {
            return Vec::new();
        }
        let base = self.equal_split();
        let mut out = vec![self.individual(&base)];
        for set in shifted_boundaries(&base, delta, self.stack.len(), limit - 1) {
            out.push(self.individual(&set));
        }
        out
    }
}

/// Seeded individuals followed by random permutations up to `n_pop`.
pub fn build_seed_population<R: Rng + ?Sized>(
    scene: &VehicleScene,
    cfg: &ScenarioConfig,
    n_pop: usize,
    rng: &mut R,
) -> Result<Vec<UpperSolution>, SeedingError> {
    let seeder = Seeder::new(scene, cfg)?;
    let mut pop = seeder.seeded(cfg.delta, n_pop);
    let layout = Layout::for_scene(scene, cfg);
    while pop.len() < n_pop {
        pop.push(UpperSolution::random(&layout, rng));
    }
    Ok(pop)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_split_indices() {
        assert_eq!(BoundarySet::equal_split(12, 3).heights, vec![4, 8]);
        assert_eq!(BoundarySet::equal_split(20, 3).heights, vec![7, 13]);
        assert!(BoundarySet::equal_split(2, 4).heights.len() == 3);
        assert!(!BoundarySet::equal_split(2, 4).is_valid(2));
    }

    #[test]
    fn short_stack_thresholds_are_finite_or_infinite() {
        let set = BoundarySet::equal_split(1, 2);
        assert_eq!(set.heights, vec![1]);
        assert_eq!(set.thresholds(&[5.0]), vec![f64::INFINITY]);
        let set = BoundarySet { heights: vec![0, 1, 2] };
        assert_eq!(set.thresholds(&[1.0, 3.0]), vec![f64::NEG_INFINITY, 2.0, f64::INFINITY]);
    }

    #[test]
    fn two_boundaries_delta_one_gives_four_shifts() {
        let base = BoundarySet { heights: vec![4, 8] };
        let sets = shifted_boundaries(&base, 1, 12, 100);
        let got: Vec<Vec<usize>> = sets.into_iter().map(|s| s.heights).collect();
        assert_eq!(got, vec![vec![5, 9], vec![5, 7], vec![3, 9], vec![3, 7]]);
    }

    #[test]
    fn enumeration_count_and_cap() {
        let base = BoundarySet {
            heights: vec![10, 20, 30],
        };
        assert_eq!(shifted_boundaries(&base, 3, 40, 1000).len(), 216);
        assert_eq!(shifted_boundaries(&base, 3, 40, 50).len(), 50);
        assert!(shifted_boundaries(&base, 0, 40, 50).is_empty());
    }

    #[test]
    fn invalid_sets_skipped() {
        let base = BoundarySet { heights: vec![1, 2] };
        for s in shifted_boundaries(&base, 2, 4, 100) {
            assert!(s.is_valid(4), "{:?}", s.heights);
        }
    }
}
