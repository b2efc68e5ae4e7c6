//! Percentage area difference between paths and the path-set acceptance rule.
//!
//! Paths are projected onto the x-y plane and read as curves over the x grid
//! axis (the station axis). A path that visits several cells in one x column
//! is represented there by the mean of its y values; outside its x extent a
//! curve continues at its nearest defined value. The area between two curves
//! is integrated with the trapezoid rule over unit stations and normalized by
//! `map_width * endpoint_distance`.

use crate::error::{CorridorError, Result};
use crate::scalar::Scalar;
use crate::search::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaConfig<T> {
    /// Minimum pairwise area difference, in percent.
    pub min_diff: T,
    /// Map width in meters.
    pub map_width: T,
    /// Straight-line distance between the shared endpoints in meters.
    pub endpoint_distance: T,
    /// Horizontal grid spacing in meters.
    pub dxy: T,
}

impl<T: Scalar> AreaConfig<T> {
    pub fn new(min_diff: T, map_width: T, endpoint_distance: T, dxy: T) -> Self {
        AreaConfig { min_diff, map_width, endpoint_distance, dxy }
    }

    /// Same config normalized for paths ending `endpoint_distance` meters apart.
    pub fn with_endpoint_distance(&self, endpoint_distance: T) -> Self {
        AreaConfig { endpoint_distance, ..*self }
    }

    pub fn percent(&self, area: T) -> T {
        T::lit(100.0) * area / (self.map_width * self.endpoint_distance)
    }

    #[inline]
    pub fn is_dissimilar(&self, percent: T) -> bool {
        percent >= self.min_diff
    }
}

/// Mean lateral position (grid units) per x station of a planar path.
#[derive(Debug, Clone, PartialEq)]
pub struct StationProfile<T> {
    x0: i64,
    ybar: Vec<T>,
}

impl<T: Scalar> StationProfile<T> {
    /// Builds the profile in one pass over the columns plus one over the stations.
    pub fn new(columns: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut ops = 0;
        Self::counted(columns, &mut ops)
    }

    pub fn counted(columns: impl IntoIterator<Item = (u32, u32)>, ops: &mut u64) -> Self {
        let mut x0 = i64::MAX;
        let mut sums: Vec<(T, u32)> = Vec::new();
        for (x, y) in columns {
            *ops += 1;
            let x = x as i64;
            if sums.is_empty() {
                x0 = x;
            } else if x < x0 {
                let shift = (x0 - x) as usize;
                sums.splice(0..0, std::iter::repeat((T::zero(), 0)).take(shift));
                x0 = x;
            }
            let k = (x - x0) as usize;
            if k >= sums.len() {
                sums.resize(k + 1, (T::zero(), 0));
            }
            sums[k].0 += T::from_u32(y).unwrap();
            sums[k].1 += 1;
        }
        let mut ybar: Vec<T> = Vec::with_capacity(sums.len());
        for (s, c) in &sums {
            *ops += 1;
            ybar.push(if *c > 0 { *s / T::from_u32(*c).unwrap() } else { T::nan() });
        }
        // stations skipped by the path are interpolated from their neighbors
        // (8-connected paths never skip, but hand-built polylines may)
        for i in 0..ybar.len() {
            if ybar[i].is_nan() {
                let prev = (0..i).rev().find(|&j| !ybar[j].is_nan());
                let next = (i + 1..ybar.len()).find(|&j| !ybar[j].is_nan());
                ybar[i] = match (prev, next) {
                    (Some(a), Some(b)) => {
                        let t = T::from_usize_lossy(i - a) / T::from_usize_lossy(b - a);
                        ybar[a] + (ybar[b] - ybar[a]) * t
                    }
                    (Some(a), None) => ybar[a],
                    (None, Some(b)) => ybar[b],
                    (None, None) => T::zero(),
                };
            }
        }
        StationProfile { x0: if x0 == i64::MAX { 0 } else { x0 }, ybar }
    }

    pub fn of_path(path: &Path<T>) -> Self {
        Self::new(path.columns())
    }

    pub fn x_range(&self) -> (i64, i64) {
        (self.x0, self.x0 + self.ybar.len() as i64 - 1)
    }

    /// Lateral position at station `x`, extended as a constant outside the path's extent.
    #[inline]
    pub fn at(&self, x: i64) -> T {
        let k = (x - self.x0).clamp(0, self.ybar.len() as i64 - 1);
        self.ybar[k as usize]
    }

    /// Projected area in square meters between two profiles.
    pub fn area_to(&self, other: &Self, dxy: T) -> T {
        let mut ops = 0;
        self.area_to_counted(other, dxy, &mut ops)
    }

    pub fn area_to_counted(&self, other: &Self, dxy: T, ops: &mut u64) -> T {
        if self.ybar.is_empty() || other.ybar.is_empty() {
            return T::zero();
        }
        let lo = self.x0.min(other.x0);
        let hi = self.x_range().1.max(other.x_range().1);
        let half = T::lit(0.5);
        let mut area = T::zero();
        let mut prev = (self.at(lo) - other.at(lo)).abs();
        for x in lo + 1..=hi {
            *ops += 1;
            let d = (self.at(x) - other.at(x)).abs();
            area += (prev + d) * half;
            prev = d;
        }
        area * dxy * dxy
    }
}

/// Percentage area difference of two paths sharing both endpoints.
pub fn area_diff<T: Scalar>(p: &Path<T>, q: &Path<T>, cfg: &AreaConfig<T>) -> Result<T> {
    if p.is_empty() || q.is_empty() {
        return Err(CorridorError::EmptyPath);
    }
    if p.first().position() != q.first().position() || p.last().position() != q.last().position() {
        return Err(CorridorError::EndpointMismatch);
    }
    let area = StationProfile::of_path(p).area_to(&StationProfile::of_path(q), cfg.dxy);
    Ok(cfg.percent(area))
}

/// Outcome of offering a candidate to an accepted path set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Add,
    Replace(usize),
    Reject,
}

/// Up to `k` accepted paths, pairwise at least `min_diff` apart.
#[derive(Debug, Clone)]
pub struct PathSet<T> {
    k: usize,
    cfg: AreaConfig<T>,
    max_diff: T,
    paths: Vec<Path<T>>,
    profiles: Vec<StationProfile<T>>,
}

impl<T: Scalar> PathSet<T> {
    /// `max_diff` is in percent over the optimal cost.
    pub fn new(k: usize, cfg: AreaConfig<T>, max_diff: T) -> Self {
        PathSet { k, cfg, max_diff, paths: Vec::new(), profiles: Vec::new() }
    }

    pub fn paths(&self) -> &[Path<T>] {
        &self.paths
    }

    pub fn into_paths(self) -> Vec<Path<T>> {
        self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.paths.len() >= self.k
    }

    pub fn config(&self) -> &AreaConfig<T> {
        &self.cfg
    }

    pub fn cost_limit(&self, opt_cost: T) -> T {
        (T::one() + self.max_diff / T::lit(100.0)) * opt_cost
    }

    /// Area percentages from `profile` to every accepted path.
    pub fn areas_to(&self, profile: &StationProfile<T>) -> Vec<T> {
        self.profiles
            .iter()
            .map(|p| self.cfg.percent(profile.area_to(p, self.cfg.dxy)))
            .collect()
    }

    /// Decides what to do with `candidate` without mutating the set.
    pub fn decide(&self, candidate: &Path<T>, profile: &StationProfile<T>, opt_cost: T) -> Decision {
        let cost = candidate.total_cost();
        if cost > self.cost_limit(opt_cost) {
            return Decision::Reject;
        }
        let similar: Vec<usize> = self
            .areas_to(profile)
            .iter()
            .enumerate()
            .filter(|(_, &a)| !self.cfg.is_dissimilar(a))
            .map(|(i, _)| i)
            .collect();
        match similar.as_slice() {
            [] if !self.is_full() => Decision::Add,
            [] => {
                let (worst, worst_cost) = self.most_expensive().expect("full set is non-empty");
                if cost < worst_cost {
                    Decision::Replace(worst)
                } else {
                    Decision::Reject
                }
            }
            [only] if cost < self.paths[*only].total_cost() => Decision::Replace(*only),
            _ => Decision::Reject,
        }
    }

    /// Offers `candidate`, applying the decision.
    pub fn offer(&mut self, candidate: Path<T>, opt_cost: T) -> Decision {
        let profile = StationProfile::of_path(&candidate);
        let decision = self.decide(&candidate, &profile, opt_cost);
        match decision {
            Decision::Add => {
                self.paths.push(candidate);
                self.profiles.push(profile);
            }
            Decision::Replace(i) => {
                self.paths[i] = candidate;
                self.profiles[i] = profile;
            }
            Decision::Reject => {}
        }
        decision
    }

    /// Drops paths whose cost exceeds the limit for a (new, lower) optimum.
    pub fn prune_above(&mut self, opt_cost: T) {
        let limit = self.cost_limit(opt_cost);
        let keep: Vec<bool> = self.paths.iter().map(|p| p.total_cost() <= limit).collect();
        let mut i = 0;
        self.paths.retain(|_| {
            i += 1;
            keep[i - 1]
        });
        let mut i = 0;
        self.profiles.retain(|_| {
            i += 1;
            keep[i - 1]
        });
    }

    fn most_expensive(&self) -> Option<(usize, T)> {
        self.paths
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.total_cost()))
            .fold(None, |best: Option<(usize, T)>, (i, c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((i, c)),
            })
    }

    /// Minimum pairwise area percentage of the accepted set (infinite below two paths).
    pub fn min_pairwise(&self) -> T {
        let mut best = T::infinity();
        for i in 0..self.profiles.len() {
            for j in i + 1..self.profiles.len() {
                best = best.min(self.cfg.percent(self.profiles[i].area_to(&self.profiles[j], self.cfg.dxy)));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(x0: u32, x1: u32, y: u32) -> Vec<(u32, u32)> {
        (x0..=x1).map(|x| (x, y)).collect()
    }

    #[test]
    fn identical_profiles_have_zero_area() {
        let p = StationProfile::<f64>::new(line(0, 40, 5));
        assert_eq!(p.area_to(&p, 10.0), 0.0);
    }

    #[test]
    fn parallel_offset_rectangle() {
        // 400 m span, 100 m lateral offset, 200 m wide map
        let p = StationProfile::<f64>::new(line(0, 40, 0));
        let q = StationProfile::<f64>::new(line(0, 40, 10));
        let cfg = AreaConfig::new(12.0, 200.0, 400.0, 10.0);
        let pct = cfg.percent(p.area_to(&q, 10.0));
        assert!((pct - 50.0).abs() < 1e-9);
        assert_eq!(p.area_to(&q, 10.0), q.area_to(&p, 10.0));
    }

    #[test]
    fn backtracking_uses_station_mean() {
        let p = StationProfile::<f64>::new(vec![(0, 0), (1, 0), (1, 2), (2, 2)]);
        assert_eq!(p.ybar, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn constant_extension_outside_extent() {
        let p = StationProfile::<f64>::new(line(0, 4, 0));
        let q = StationProfile::<f64>::new(line(2, 4, 1));
        // q extends left at y=1: unit offset over four unit stations
        assert_eq!(p.area_to(&q, 1.0), 4.0);
    }
}
