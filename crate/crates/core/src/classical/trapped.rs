use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::classical::map::OpenMapSpec;
use crate::error::{Error, Result};
use crate::stats::{linear_fit, LinearFit};

/// Default cap on the number of cells a trapped-set sample may hold.
pub const DEFAULT_CELL_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Points trapped in the future: vertical strips over a Cantor set in x.
    Forward,
    /// Points trapped in the past: horizontal strips over a Cantor set in y.
    Backward,
    /// Intersection of both.
    Full,
}

/// Cylinder cover of a trapped set at refinement `depth`.
///
/// Each cell is stored by the base-`D` codes of its admissible words (most
/// significant digit first) along x and along y; a one-sided sample leaves
/// the other coordinate at code 0 with zero refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct TrappedSetSample {
    pub map: OpenMapSpec,
    pub depth: usize,
    pub direction: Direction,
    pub cells: Vec<(u64, u64)>,
}

/// Axis-aligned cell in the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

impl TrappedSetSample {
    fn x_depth(&self) -> usize {
        match self.direction {
            Direction::Forward | Direction::Full => self.depth,
            Direction::Backward => 0,
        }
    }

    fn y_depth(&self) -> usize {
        match self.direction {
            Direction::Backward | Direction::Full => self.depth,
            Direction::Forward => 0,
        }
    }

    /// Left edge of the interval whose base-M expansion starts with the
    /// kept symbols encoded (base D) in `code`.
    fn edge(&self, code: u64, digits: usize) -> f64 {
        let d = self.map.kept_count() as u64;
        let m = self.map.branches() as f64;
        let mut rest = code;
        let mut syms = vec![0usize; digits];
        for slot in syms.iter_mut().rev() {
            *slot = self.map.kept()[(rest % d) as usize];
            rest /= d;
        }
        let mut x = 0.0;
        let mut scale = 1.0 / m;
        for s in syms {
            x += s as f64 * scale;
            scale /= m;
        }
        x
    }

    pub fn rect(&self, index: usize) -> Rect {
        let (cx, cy) = self.cells[index];
        let m = self.map.branches() as f64;
        let (nx, ny) = (self.x_depth(), self.y_depth());
        Rect {
            x0: self.edge(cx, nx),
            y0: self.edge(cy, ny),
            width: m.powi(-(nx as i32)),
            height: m.powi(-(ny as i32)),
        }
    }

    /// Number of distinct cells after coarsening to refinement `level`.
    pub fn count_at(&self, level: usize) -> usize {
        assert!(level <= self.depth);
        let d = self.map.kept_count() as u64;
        let drop = (self.depth - level) as u32;
        let div = d.pow(drop);
        let (sx, sy) = (self.x_depth() > 0, self.y_depth() > 0);
        let coarse: BTreeSet<(u64, u64)> = self
            .cells
            .iter()
            .map(|&(x, y)| {
                (
                    if sx { x / div } else { 0 },
                    if sy { y / div } else { 0 },
                )
            })
            .collect();
        coarse.len()
    }
}

/// Cylinder cover of the forward, backward or full trapped set.
pub fn trapped_set_sample(
    map: &OpenMapSpec,
    depth: usize,
    direction: Direction,
) -> Result<TrappedSetSample> {
    trapped_set_sample_with_cap(map, depth, direction, DEFAULT_CELL_CAP)
}

pub fn trapped_set_sample_with_cap(
    map: &OpenMapSpec,
    depth: usize,
    direction: Direction,
    cap: u128,
) -> Result<TrappedSetSample> {
    map.validate()?;
    if depth == 0 {
        return Err(Error::domain("depth must be >= 1"));
    }
    let d = map.kept_count();
    let per_axis = checked_pow(d, depth);
    let total = match direction {
        Direction::Full => per_axis.and_then(|p| p.checked_mul(p)),
        _ => per_axis,
    };
    let required = total.unwrap_or(u128::MAX);
    if required > cap {
        return Err(Error::Capacity {
            what: "trapped-set cells",
            required,
            cap,
        });
    }
    // Coordinates must stay resolvable: M^-depth above the f64 underflow.
    if (depth as f64) * (map.branches() as f64).log2() > 1000.0 {
        return Err(Error::domain("depth too large for cell coordinates"));
    }
    let per_axis = per_axis.expect("bounded by cap") as u64;
    let cells: Vec<(u64, u64)> = match direction {
        Direction::Forward => (0..per_axis).map(|x| (x, 0)).collect(),
        Direction::Backward => (0..per_axis).map(|y| (0, y)).collect(),
        Direction::Full => (0..per_axis)
            .flat_map(|x| (0..per_axis).map(move |y| (x, y)))
            .collect(),
    };
    Ok(TrappedSetSample {
        map: map.clone(),
        depth,
        direction,
        cells,
    })
}

/// Box-counting estimate with the raw points behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionEstimate {
    pub dimension: f64,
    /// `(ln cell size, ln count)` per depth.
    pub points: Vec<(f64, f64)>,
    pub fit: LinearFit,
    pub analytic: f64,
}

/// Least-squares slope of `ln count` against `ln(1/cell size)` over the
/// inclusive depth range.
pub fn box_dimension(
    sample: &TrappedSetSample,
    depth_range: (usize, usize),
) -> Result<DimensionEstimate> {
    let (lo, hi) = depth_range;
    if lo == 0 || lo > hi || hi > sample.depth {
        return Err(Error::domain(format!(
            "depth range {lo}..={hi} outside 1..={}",
            sample.depth
        )));
    }
    if hi - lo + 1 < 3 {
        return Err(Error::FitDegenerate(format!(
            "box counting needs at least 3 depths, got {}",
            hi - lo + 1
        )));
    }
    let ln_m = (sample.map.branches() as f64).ln();
    let mut points = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for level in lo..=hi {
        let count = sample.count_at(level) as f64;
        let ln_size = -(level as f64) * ln_m;
        points.push((ln_size, count.ln()));
        xs.push(-ln_size);
        ys.push(count.ln());
    }
    let fit = linear_fit(&xs, &ys, 3)?;
    let analytic = match sample.direction {
        Direction::Full => sample.map.trapped_set_dimension(),
        _ => sample.map.cantor_dimension(),
    };
    Ok(DimensionEstimate {
        dimension: fit.slope,
        points,
        fit,
        analytic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(m: usize, keep: &[usize]) -> OpenMapSpec {
        OpenMapSpec::new(m, keep.to_vec()).unwrap()
    }

    #[test]
    fn closed_map_covers_square() {
        let s = trapped_set_sample(&map(3, &[0, 1, 2]), 2, Direction::Full).unwrap();
        assert_eq!(s.cells.len(), 81);
        let area: f64 = (0..s.cells.len()).map(|i| {
            let r = s.rect(i);
            r.width * r.height
        }).sum();
        assert!((area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cantor_corners() {
        let s = trapped_set_sample(&map(3, &[0, 2]), 1, Direction::Full).unwrap();
        let mut corners: Vec<(f64, f64)> = (0..4).map(|i| {
            let r = s.rect(i);
            assert!((r.width - 1.0 / 3.0).abs() < 1e-15);
            assert!((r.height - 1.0 / 3.0).abs() < 1e-15);
            (r.x0, r.y0)
        }).collect();
        corners.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let t = 2.0 / 3.0;
        assert_eq!(corners, vec![(0.0, 0.0), (0.0, t), (t, 0.0), (t, t)]);
    }

    #[test]
    fn forward_strips_enumerated() {
        // Admissible 2-letter words over {1, 3} in base 5: 11, 13, 31, 33.
        let s = trapped_set_sample(&map(5, &[1, 3]), 2, Direction::Forward).unwrap();
        let mut lefts: Vec<f64> = (0..s.cells.len()).map(|i| {
            let r = s.rect(i);
            assert!((r.width - 1.0 / 25.0).abs() < 1e-15);
            assert_eq!(r.height, 1.0);
            r.x0
        }).collect();
        lefts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [6.0 / 25.0, 8.0 / 25.0, 16.0 / 25.0, 18.0 / 25.0];
        for (a, b) in lefts.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn capacity_error() {
        let err = trapped_set_sample(&map(10, &(0..10).collect::<Vec<_>>()), 4, Direction::Full)
            .unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        assert!(trapped_set_sample(&map(3, &[0]), 0, Direction::Forward).is_err());
    }

    #[test]
    fn cells_are_disjoint() {
        let s = trapped_set_sample(&map(4, &[0, 2, 3]), 2, Direction::Full).unwrap();
        let rects: Vec<Rect> = (0..s.cells.len()).map(|i| s.rect(i)).collect();
        for (i, a) in rects.iter().enumerate() {
            for b in &rects[i + 1..] {
                let overlap_x = a.x0.max(b.x0) < (a.x0 + a.width).min(b.x0 + b.width) - 1e-15;
                let overlap_y = a.y0.max(b.y0) < (a.y0 + a.height).min(b.y0 + b.height) - 1e-15;
                assert!(!(overlap_x && overlap_y));
            }
        }
    }

    #[test]
    fn box_dimension_examples() {
        let full = trapped_set_sample(&map(3, &[0, 1, 2]), 5, Direction::Full).unwrap();
        assert!((box_dimension(&full, (1, 5)).unwrap().dimension - 2.0).abs() < 1e-9);

        let cantor = trapped_set_sample(&map(3, &[0, 2]), 8, Direction::Full).unwrap();
        let est = box_dimension(&cantor, (1, 8)).unwrap();
        assert!((est.dimension - 2.0 * 2f64.ln() / 3f64.ln()).abs() < 1e-9);
        assert!(est.fit.rms_residual < 1e-9);

        let point = trapped_set_sample(&map(2, &[0]), 6, Direction::Full).unwrap();
        assert!(box_dimension(&point, (1, 6)).unwrap().dimension.abs() < 1e-9);

        let one_sided = trapped_set_sample(&map(5, &[1, 3]), 6, Direction::Backward).unwrap();
        let est = box_dimension(&one_sided, (2, 6)).unwrap();
        assert!((est.dimension - 2f64.ln() / 5f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn degenerate_fit() {
        let s = trapped_set_sample(&map(3, &[0, 2]), 4, Direction::Full).unwrap();
        assert!(matches!(box_dimension(&s, (1, 2)), Err(Error::FitDegenerate(_))));
        assert!(box_dimension(&s, (1, 5)).is_err());
    }
}
