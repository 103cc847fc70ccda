//! Genotype repair operators applied to every offspring.
//!
//! All operators only swap genes, so the permutation and slot sizes are
//! preserved.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::genotype::{Layout, UpperSolution};
use crate::scene::{PanelId, PanelKind, SegmentId, VehicleScene};
use crate::sim::SimContext;

/// Which planned-side arms can ever hold each segment fully in range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reachability {
    n_segs: usize,
    /// `slot * n_segs + (segment - 1)`
    table: Vec<bool>,
}

impl Reachability {
    pub fn from_context(ctx: &SimContext<'_>) -> Self {
        let n_segs = ctx.scene.n_segs();
        let table = (0..ctx.n_slots())
            .flat_map(|slot| (1..=n_segs as SegmentId).map(move |s| (slot, s)))
            .map(|(slot, s)| !ctx.never_reachable(slot, s))
            .collect();
        Self { n_segs, table }
    }

    /// `rows[slot][segment - 1]`
    pub fn from_rows(rows: Vec<Vec<bool>>) -> Self {
        let n_segs = rows.first().map_or(0, Vec::len);
        Self {
            n_segs,
            table: rows.into_iter().flatten().collect(),
        }
    }

    /// Dummies are reachable by every arm.
    pub fn reachable(&self, slot: usize, id: SegmentId) -> bool {
        id as usize > self.n_segs || self.table[slot * self.n_segs + id as usize - 1]
    }

    pub fn reachable_by_any(&self, id: SegmentId) -> bool {
        let slots = self.table.len() / self.n_segs.max(1);
        (0..slots).any(|a| self.reachable(a, id))
    }

    /// Genes placed in a slot whose arm can never paint them.
    pub fn violations(&self, x: &UpperSolution, layout: &Layout) -> usize {
        x.genes()
            .iter()
            .enumerate()
            .filter(|&(k, &g)| !self.reachable(layout.slot_of(k), g))
            .count()
    }
}

/// Moves every never-reachable gene into another slot whose arm can reach
/// it, trading with the first gene (scanning from the start) that is itself
/// reachable in the vacated slot. Returns the number of swaps.
pub fn repair_reachability(x: &mut UpperSolution, layout: &Layout, reach: &Reachability) -> usize {
    let mut swaps = 0;
    for k in 0..x.len() {
        let g = x.genes()[k];
        let a = layout.slot_of(k);
        if reach.reachable(a, g) {
            continue;
        }
        let partner = (0..x.len()).find(|&j| {
            let b = layout.slot_of(j);
            b != a && reach.reachable(b, g) && reach.reachable(a, x.genes()[j])
        });
        if let Some(j) = partner {
            x.swap(k, j);
            swaps += 1;
        }
    }
    swaps
}

/// Moves back-door segments out of the rearmost arm's slot. Returns the
/// number of swaps.
pub fn repair_back_door(
    x: &mut UpperSolution,
    layout: &Layout,
    scene: &VehicleScene,
    reach: &Reachability,
) -> usize {
    let is_back_door =
        |g: SegmentId| !layout.is_dummy(g) && scene.panel_of(g).kind == PanelKind::BackDoor;
    let last = layout.n_arms_side - 1;
    let mut swaps = 0;
    for k in layout.slot(last) {
        let g = x.genes()[k];
        if !is_back_door(g) {
            continue;
        }
        let partner = (0..layout.slot(last).start).find(|&j| {
            let h = x.genes()[j];
            !is_back_door(h) && reach.reachable(layout.slot_of(j), g) && reach.reachable(last, h)
        });
        if let Some(j) = partner {
            x.swap(k, j);
            swaps += 1;
        }
    }
    swaps
}

/// Gene positions of each panel's segments, grouped by slot.
fn panel_positions(x: &UpperSolution, layout: &Layout, scene: &VehicleScene) -> BTreeMap<PanelId, Vec<Vec<usize>>> {
    let mut map: BTreeMap<PanelId, Vec<Vec<usize>>> = BTreeMap::new();
    for (k, &g) in x.genes().iter().enumerate() {
        if layout.is_dummy(g) {
            continue;
        }
        let slots = map
            .entry(scene.segment(g).panel_id)
            .or_insert_with(|| vec![Vec::new(); layout.n_arms_side]);
        slots[layout.slot_of(k)].push(k);
    }
    map
}

/// On every vertically mounted panel, keeps each arm's segment count but
/// hands out the panel bottom-to-top in contiguous blocks by arm row, each
/// block visited bottom-to-top. Returns the number of panels changed.
pub fn repair_bottom_up(x: &mut UpperSolution, layout: &Layout, scene: &VehicleScene) -> usize {
    let mut changed = 0;
    for (panel, slots) in panel_positions(x, layout, scene) {
        if !scene.panel(panel).kind.is_vertical() {
            continue;
        }
        let mut segs: Vec<SegmentId> = slots.iter().flatten().map(|&k| x.genes()[k]).collect();
        segs.sort_by_key(|&s| scene.segment(s).height_index);
        let mut next = segs.into_iter();
        let mut any = false;
        for positions in &slots {
            for &k in positions {
                let s = next.next().expect("counts match");
                if x.genes()[k] != s {
                    x.genes_mut()[k] = s;
                    any = true;
                }
            }
        }
        changed += usize::from(any);
    }
    changed
}

/// Trades whole panel shares between pairs of arms so fewer arms touch
/// each panel: arm `a1`'s segments on panel `m2` take the places of arm
/// `a2`'s segments on panel `m1` and vice versa, when the counts match.
/// Pairs are tried in lexicographic (panel pair, arm pair) order until no
/// trade helps. Returns the number of trades.
pub fn repair_few_arms(
    x: &mut UpperSolution,
    layout: &Layout,
    scene: &VehicleScene,
    reach: &Reachability,
) -> usize {
    let mut trades = 0;
    'search: loop {
        let map = panel_positions(x, layout, scene);
        let panels: Vec<&Vec<Vec<usize>>> = map.values().collect();
        for m1 in 0..panels.len() {
            for m2 in m1 + 1..panels.len() {
                for a1 in 0..layout.n_arms_side {
                    for a2 in 0..layout.n_arms_side {
                        if a1 == a2 {
                            continue;
                        }
                        let give = &panels[m2][a1];
                        let take = &panels[m1][a2];
                        if give.is_empty() || give.len() != take.len() {
                            continue;
                        }
                        // Only worth it when each arm ends up leaving a panel.
                        if panels[m1][a1].is_empty() || panels[m2][a2].is_empty() {
                            continue;
                        }
                        let ok = give.iter().zip(take).all(|(&p, &q)| {
                            reach.reachable(a2, x.genes()[p]) && reach.reachable(a1, x.genes()[q])
                        });
                        if !ok {
                            continue;
                        }
                        for (&p, &q) in give.iter().zip(take) {
                            x.swap(p, q);
                        }
                        trades += 1;
                        continue 'search;
                    }
                }
            }
        }
        break;
    }
    trades
}

/// Operator switches. Reachability and back-door repair are always on;
/// the other two are ablation factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairFlags {
    pub bottom_up: bool,
    pub few_arms: bool,
}

impl Default for RepairFlags {
    fn default() -> Self {
        Self {
            bottom_up: true,
            few_arms: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RepairStats {
    pub reachability: usize,
    pub back_door: usize,
    pub bottom_up: usize,
    pub few_arms: usize,
}

impl std::ops::AddAssign for RepairStats {
    fn add_assign(&mut self, o: Self) {
        self.reachability += o.reachability;
        self.back_door += o.back_door;
        self.bottom_up += o.bottom_up;
        self.few_arms += o.few_arms;
    }
}

/// Runs the operators in order: reachability, back door, bottom-up, few
/// arms. Bottom-up runs again after a few-arms trade, since trades move
/// segments without regard to height.
pub fn apply_repairs(
    x: &mut UpperSolution,
    layout: &Layout,
    scene: &VehicleScene,
    reach: &Reachability,
    back_door_rule: bool,
    flags: RepairFlags,
) -> RepairStats {
    let mut stats = RepairStats {
        reachability: repair_reachability(x, layout, reach),
        ..RepairStats::default()
    };
    if back_door_rule {
        stats.back_door = repair_back_door(x, layout, scene, reach);
    }
    if flags.bottom_up {
        stats.bottom_up = repair_bottom_up(x, layout, scene);
    }
    if flags.few_arms {
        stats.few_arms = repair_few_arms(x, layout, scene, reach);
        if stats.few_arms > 0 && flags.bottom_up {
            stats.bottom_up += repair_bottom_up(x, layout, scene);
        }
    }
    stats
}
