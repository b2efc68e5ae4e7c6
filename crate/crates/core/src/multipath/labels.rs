//! Multi-label shortest-path trees: up to `kappa` labels per vertex, kept
//! pairwise dissimilar and within `max_diff` of the vertex's cheapest label.
//!
//! In the plain layout every augmented vertex owns `kappa` slots. The pooled
//! layout grows two trees in one arena: a shortest-path tree with the
//! cheapest label of every augmented vertex, and a pooled tree whose `kappa`
//! slots are shared by a group of augmented vertices (the 24 orientations of
//! one grid vertex). Each tree only extends into its own labels.

use std::collections::BinaryHeap;

use crate::dissimilarity::{AreaConfig, StationProfile};
use crate::graph::AugVertex;
use crate::scalar::Scalar;
use crate::search::HeapEntry;

pub(crate) const NO_LABEL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Label<T> {
    pub vertex: AugVertex,
    pub g: T,
    pub parent: u32,
    pub settled: bool,
    pub dead: bool,
    /// Belongs to the pooled tree.
    pub pooled: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LabelRules<T> {
    pub kappa: usize,
    /// Percent over the vertex's cheapest label.
    pub max_diff: T,
    pub area: AreaConfig<T>,
    /// Planar position of the tree root in meters.
    pub root: (T, T),
}

pub(crate) struct LabelTree<T> {
    rules: LabelRules<T>,
    /// `kappa` slots per state (plain) or per group (pooled).
    slots: Vec<u32>,
    /// Pooled layout only: cheapest label per state.
    best: Vec<u32>,
    /// States per group; 0 in the plain layout.
    group: usize,
    pub labels: Vec<Label<T>>,
    pub heap: BinaryHeap<HeapEntry<T>>,
}

impl<T: Scalar> LabelTree<T> {
    pub fn new(states: usize, rules: LabelRules<T>) -> Self {
        LabelTree {
            rules,
            slots: vec![NO_LABEL; states * rules.kappa],
            best: Vec::new(),
            group: 0,
            labels: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    /// Pooled layout; consecutive runs of `group` states share slots.
    pub fn pooled(states: usize, group: usize, rules: LabelRules<T>) -> Self {
        LabelTree {
            rules,
            slots: vec![NO_LABEL; states / group * rules.kappa],
            best: vec![NO_LABEL; states],
            group,
            labels: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    #[inline]
    fn slots_of(&self, state: usize) -> &[u32] {
        let k = self.rules.kappa;
        &self.slots[state * k..(state + 1) * k]
    }

    /// Slot range of the labels a child of `parent` at `state` competes with.
    #[inline]
    fn range(&self, state: usize) -> std::ops::Range<usize> {
        let k = self.rules.kappa;
        let owner = if self.group > 0 { state / self.group } else { state };
        owner * k..(owner + 1) * k
    }

    fn seed_one(&mut self, state: usize, vertex: AugVertex, key: T, pooled: bool) {
        let id = self.labels.len() as u32;
        self.labels.push(Label { vertex, g: T::zero(), parent: NO_LABEL, settled: false, dead: false, pooled });
        let start = self.range(state).start;
        let first = if self.group > 0 && !pooled { &mut self.best[state] } else { &mut self.slots[start] };
        if *first == NO_LABEL {
            *first = id;
        }
        self.heap.push(HeapEntry { key, vertex, slot: id });
    }

    /// Roots a label at `state` (one per tree in the pooled layout).
    pub fn seed(&mut self, state: usize, vertex: AugVertex, key: T) {
        self.seed_one(state, vertex, key, false);
        if self.group > 0 {
            self.seed_one(state, vertex, key, true);
        }
    }

    pub fn min_key(&self) -> Option<T> {
        self.heap.peek().map(|e| e.key)
    }

    /// Pops one heap entry; `Some(None)` for a stale entry.
    pub fn pop(&mut self) -> Option<Option<u32>> {
        let e = self.heap.pop()?;
        let l = &mut self.labels[e.slot as usize];
        if l.dead || l.settled {
            return Some(None);
        }
        l.settled = true;
        Some(Some(e.slot))
    }

    /// Live labels at `state`, in slot order.
    pub fn live(&self, state: usize) -> impl Iterator<Item = u32> + '_ {
        self.slots_of(state).iter().copied().filter(|&id| id != NO_LABEL)
    }

    pub fn settled_at(&self, state: usize) -> impl Iterator<Item = u32> + '_ {
        self.live(state).filter(|&id| self.labels[id as usize].settled)
    }

    /// True once every slot a child of `parent` at `state` could take holds a settled label.
    pub fn is_closed(&self, state: usize, parent: u32) -> bool {
        let done = |&id: &u32| id != NO_LABEL && self.labels[id as usize].settled;
        if self.group > 0 && !self.labels[parent as usize].pooled {
            done(&self.best[state])
        } else {
            self.slots[self.range(state)].iter().all(done)
        }
    }

    pub fn cheapest(&self, state: usize) -> T {
        self.live(state).map(|id| self.labels[id as usize].g).fold(T::infinity(), T::min)
    }

    /// Vertices from the root to label `id`.
    pub fn unwind(&self, id: u32) -> Vec<AugVertex> {
        let mut out = Vec::new();
        let mut cur = id;
        while cur != NO_LABEL {
            let l = &self.labels[cur as usize];
            out.push(l.vertex);
            cur = l.parent;
        }
        out.reverse();
        out
    }

    fn profile(&self, id: u32, tail: Option<AugVertex>) -> StationProfile<T> {
        let mut cols: Vec<(u32, u32)> = Vec::new();
        let mut cur = id;
        while cur != NO_LABEL {
            let l = &self.labels[cur as usize];
            cols.push((l.vertex.x, l.vertex.y));
            cur = l.parent;
        }
        if let Some(t) = tail {
            cols.push((t.x, t.y));
        }
        StationProfile::new(cols)
    }

    fn push_label(&mut self, w: AugVertex, g: T, parent: u32) -> u32 {
        let id = self.labels.len() as u32;
        self.labels.push(Label { vertex: w, g, parent, settled: false, dead: false, pooled: false });
        id
    }

    /// Puts a new label into `slot`, retiring its previous occupant.
    fn place(&mut self, slot: usize, w: AugVertex, g: T, parent: u32) -> Option<u32> {
        let old = self.slots[slot];
        if old != NO_LABEL {
            self.labels[old as usize].dead = true;
        }
        let id = self.push_label(w, g, parent);
        self.slots[slot] = id;
        Some(id)
    }

    fn similar(&self, area: &AreaConfig<T>, candidate: &StationProfile<T>, id: u32) -> bool {
        let pct = area.percent(candidate.area_to(&self.profile(id, None), area.dxy));
        !area.is_dissimilar(pct)
    }

    /// Area normalization for partial paths ending at `w`.
    fn area_at(&self, w: &AugVertex) -> AreaConfig<T> {
        let dxy = self.rules.area.dxy;
        let (px, py) = w.position().planar(dxy);
        let dist = ((px - self.rules.root.0).powi(2) + (py - self.rules.root.1).powi(2)).sqrt();
        self.rules.area.with_endpoint_distance(dist.max(dxy))
    }

    /// Applies the label rules to a candidate `parent -> w` with cost `g`.
    /// Returns the new label id when the candidate is kept; the caller pushes it.
    pub fn offer(&mut self, state: usize, w: AugVertex, g: T, parent: u32) -> Option<u32> {
        if self.group > 0 && !self.labels[parent as usize].pooled {
            let b = self.best[state];
            if b != NO_LABEL && (g >= self.labels[b as usize].g || self.labels[b as usize].settled) {
                return None;
            }
            if b != NO_LABEL {
                self.labels[b as usize].dead = true;
            }
            let id = self.push_label(w, g, parent);
            self.best[state] = id;
            return Some(id);
        }
        let range = self.range(state);
        let live: Vec<usize> = range.clone().filter(|&s| self.slots[s] != NO_LABEL).collect();
        let id = if live.is_empty() {
            self.place(range.start, w, g, parent)
        } else if range.len() == 1 {
            let l = &self.labels[self.slots[range.start] as usize];
            if g < l.g && !l.settled {
                self.place(range.start, w, g, parent)
            } else {
                None
            }
        } else {
            let cheapest = live.iter().map(|&s| self.labels[self.slots[s] as usize].g).fold(T::infinity(), T::min);
            if g > (T::one() + self.rules.max_diff / T::lit(100.0)) * cheapest {
                return None;
            }
            let area = self.area_at(&w);
            let candidate = self.profile(parent, Some(w));
            self.compete(range, &live, &area, &candidate, w, g, parent)
        }?;
        self.labels[id as usize].pooled = self.group > 0;
        Some(id)
    }

    /// Slot rules among the labels in `range`: a candidate similar to none
    /// takes a free slot or displaces the dearest label, one similar to a
    /// single label may replace it, one similar to several is dropped.
    /// Settled labels are never displaced.
    #[allow(clippy::too_many_arguments)]
    fn compete(
        &mut self,
        range: std::ops::Range<usize>,
        live: &[usize],
        area: &AreaConfig<T>,
        candidate: &StationProfile<T>,
        w: AugVertex,
        g: T,
        parent: u32,
    ) -> Option<u32> {
        let similar: Vec<usize> =
            live.iter().copied().filter(|&s| self.similar(area, candidate, self.slots[s])).collect();
        let target = match similar.as_slice() {
            [] if live.len() < range.len() => {
                let free = range.clone().find(|&s| self.slots[s] == NO_LABEL).expect("a free slot");
                return self.place(free, w, g, parent);
            }
            [] => *live
                .iter()
                .max_by(|a, b| {
                    self.labels[self.slots[**a] as usize].g.total_cmp_finite(&self.labels[self.slots[**b] as usize].g)
                })
                .expect("non-empty"),
            [s] => *s,
            _ => return None,
        };
        let l = &self.labels[self.slots[target] as usize];
        if g < l.g && !l.settled {
            self.place(target, w, g, parent)
        } else {
            None
        }
    }
}
