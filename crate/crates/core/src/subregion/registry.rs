//! Persistent set of detected enclosed sub-regions.

use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use crate::frontier::FrontierSet;
use crate::world::GridMap;

/// Axis-aligned box in world meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self { x_min, x_max, y_min, y_max }
    }

    pub fn is_valid(&self) -> bool {
        self.x_min < self.x_max && self.y_min < self.y_max
    }

    pub fn center(&self) -> Point2<f64> {
        Point2::new((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)
    }

    pub fn contains(&self, p: &Point2<f64>) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min).max(0.0) * (self.y_max - self.y_min).max(0.0)
    }

    pub fn union(&self, other: &Bounds) -> Bounds {
        Bounds::new(
            self.x_min.min(other.x_min),
            self.x_max.max(other.x_max),
            self.y_min.min(other.y_min),
            self.y_max.max(other.y_max),
        )
    }

    pub fn iou(&self, other: &Bounds) -> f64 {
        let inter = Bounds::new(
            self.x_min.max(other.x_min),
            self.x_max.min(other.x_max),
            self.y_min.max(other.y_min),
            self.y_max.min(other.y_max),
        )
        .area();
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnclosedRegion {
    pub bounds: Bounds,
    pub alive: bool,
}

impl EnclosedRegion {
    pub fn new(bounds: Bounds) -> Self {
        debug_assert!(bounds.is_valid());
        Self { bounds, alive: true }
    }

    pub fn center(&self) -> Point2<f64> {
        self.bounds.center()
    }
}

/// Overlap above which a re-detection is folded into an existing region.
pub const MERGE_IOU: f64 = 0.5;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionRegistry {
    regions: Vec<EnclosedRegion>,
}

impl RegionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn regions(&self) -> &[EnclosedRegion] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn alive(&self) -> impl Iterator<Item = &EnclosedRegion> {
        self.regions.iter().filter(|r| r.alive)
    }

    /// Folds `candidate` into the alive region it overlaps most (IoU above
    /// [`MERGE_IOU`]) by taking the union box; otherwise appends it. Returns
    /// the index of the affected region.
    pub fn merge(&mut self, candidate: EnclosedRegion) -> usize {
        let best = self
            .regions
            .iter()
            .enumerate()
            .filter(|(_, r)| r.alive)
            .map(|(i, r)| (i, r.bounds.iou(&candidate.bounds)))
            .filter(|&(_, iou)| iou > MERGE_IOU)
            .fold(None::<(usize, f64)>, |acc, (i, iou)| match acc {
                Some((_, best)) if best >= iou => acc,
                _ => Some((i, iou)),
            });
        match best {
            Some((i, _)) => {
                let r = &mut self.regions[i];
                r.bounds = r.bounds.union(&candidate.bounds);
                i
            }
            None => {
                self.regions.push(EnclosedRegion { alive: true, ..candidate });
                self.regions.len() - 1
            }
        }
    }

    /// Retires every alive region whose box holds no frontier cell center.
    pub fn retire(&mut self, frontiers: &FrontierSet, map: &GridMap) {
        for r in self.regions.iter_mut().filter(|r| r.alive) {
            r.alive = frontiers.iter().any(|c| r.bounds.contains(&map.center(c)));
        }
    }
}

/// Functional form of [`RegionRegistry::merge`].
pub fn registry_merge(registry: &RegionRegistry, candidate: EnclosedRegion) -> RegionRegistry {
    let mut next = registry.clone();
    next.merge(candidate);
    next
}

/// Functional form of [`RegionRegistry::retire`].
pub fn registry_retire(registry: &RegionRegistry, frontiers: &FrontierSet, map: &GridMap) -> RegionRegistry {
    let mut next = registry.clone();
    next.retire(frontiers, map);
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Cell;

    fn region(x0: f64, x1: f64, y0: f64, y1: f64) -> EnclosedRegion {
        EnclosedRegion::new(Bounds::new(x0, x1, y0, y1))
    }

    #[test]
    fn merge_rules() {
        let reg = registry_merge(&RegionRegistry::new(), region(0.0, 4.0, 0.0, 4.0));
        assert_eq!(reg.len(), 1);
        let same = registry_merge(&reg, region(0.0, 4.0, 0.0, 4.0));
        assert_eq!(same.len(), 1);
        assert_eq!(same, reg);
        let disjoint = registry_merge(&reg, region(10.0, 12.0, 0.0, 4.0));
        assert_eq!(disjoint.len(), 2);
        // IoU 3/5 merges into the union box
        let shifted = registry_merge(&reg, region(1.0, 5.0, 0.0, 4.0));
        assert_eq!(shifted.len(), 1);
        assert_eq!(shifted.regions()[0].bounds, Bounds::new(0.0, 5.0, 0.0, 4.0));
        // IoU exactly 1/3 does not
        assert_eq!(registry_merge(&reg, region(2.0, 6.0, 0.0, 4.0)).len(), 2);
    }

    #[test]
    fn retire_without_frontiers() {
        let mut map = GridMap::new(10, 10, 1.0);
        let mut f = FrontierSet::new(map.len());
        let cells: Vec<usize> = [(1, 1), (2, 1), (3, 1)].iter().map(|&(x, y)| map.index(x, y)).collect();
        for &c in &cells {
            map.observe(c, Cell::Free);
        }
        f.update(&map, &cells).unwrap();
        let mut reg = RegionRegistry::new();
        reg.merge(region(0.0, 5.0, 0.0, 5.0));
        reg.merge(region(6.0, 9.0, 6.0, 9.0));
        reg.retire(&f, &map);
        assert!(reg.regions()[0].alive);
        assert!(!reg.regions()[1].alive);
        assert_eq!(reg.alive().count(), 1);
    }
}
