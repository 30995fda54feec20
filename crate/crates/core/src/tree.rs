//! Breadth-first indexing of the ball `B_n` in the (d+1)-regular tree.
//!
//! The base point has index `0` and `d + 1` children; every other vertex has
//! `d` children. Level `k` occupies `offsets[k]..offsets[k+1]` and the children
//! of the `q`-th vertex of level `k ≥ 1` are positions `q·d .. q·d + d` of level
//! `k + 1`. The leftmost vertex of each level, `offsets[k]`, lies on a fixed
//! geodesic ray from the base point.

use crate::error::{Error, Result};
use alloc::vec::Vec;
use core::ops::Range;

/// Default cap on materialized vertices.
pub const DEFAULT_MAX_VERTICES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallLayout {
    d: usize,
    depth: u32,
    offsets: Vec<usize>,
}

impl BallLayout {
    pub fn new(d: u32, depth: u32, max_vertices: usize) -> Result<Self> {
        let d = d as usize;
        let mut offsets = Vec::with_capacity(depth as usize + 2);
        offsets.push(0);
        let mut total: usize = 1;
        let mut level: usize = 1;
        offsets.push(1);
        for k in 1..=depth {
            level = if k == 1 {
                d + 1
            } else {
                level.saturating_mul(d)
            };
            total = total.saturating_add(level);
            if total > max_vertices {
                return Err(Error::Resource {
                    what: "ball vertex count",
                    requested: total,
                    cap: max_vertices,
                });
            }
            offsets.push(total);
        }
        Ok(Self {
            d,
            depth,
            offsets,
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.offsets[self.depth as usize + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn level(&self, k: u32) -> Range<usize> {
        self.offsets[k as usize]..self.offsets[k as usize + 1]
    }

    pub fn sphere(&self) -> Range<usize> {
        self.level(self.depth)
    }

    pub fn level_of(&self, v: usize) -> u32 {
        // offsets is sorted; partition_point finds the first offset > v
        (self.offsets.partition_point(|&o| o <= v) - 1) as u32
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        if v == 0 {
            return None;
        }
        let k = self.level_of(v);
        if k == 1 {
            return Some(0);
        }
        let q = v - self.offsets[k as usize];
        Some(self.offsets[k as usize - 1] + q / self.d)
    }

    /// Children inside the ball (empty on the sphere).
    pub fn children(&self, v: usize) -> Range<usize> {
        let k = self.level_of(v);
        if k >= self.depth {
            return 0..0;
        }
        if k == 0 {
            return self.level(1);
        }
        let q = v - self.offsets[k as usize];
        let start = self.offsets[k as usize + 1] + q * self.d;
        start..start + self.d
    }

    /// Vertex at distance `k` on the fixed ray.
    pub fn ray_vertex(&self, k: u32) -> usize {
        self.offsets[k as usize]
    }
}
