use crate::error::{Error, Result};
use crate::math::pos;
use crate::params::{Level, TreeParams};
use crate::tree::BallLayout;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

/// The free field on `B_n`, indexed as in [`BallLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct GffBall {
    pub layout: BallLayout,
    pub values: Vec<f64>,
}

impl GffBall {
    pub fn depth(&self) -> u32 {
        self.layout.depth()
    }
}

/// Samples the field level by level: the base point is `N(0, σ²)` and each
/// child is `parent/d + √(σ²(1−1/d²))·Z` with fresh `Z` per child.
pub fn sample_gff_ball<R: Rng + ?Sized>(
    n: u32,
    params: &TreeParams,
    max_vertices: usize,
    rng: &mut R,
) -> Result<GffBall> {
    let layout = BallLayout::new(params.d(), n, max_vertices)?;
    let values = sample_gff_on(&layout, params, rng);
    Ok(GffBall { layout, values })
}

pub fn sample_gff_on<R: Rng + ?Sized>(layout: &BallLayout, params: &TreeParams, rng: &mut R) -> Vec<f64> {
    let mut values = alloc::vec![0.0; layout.len()];
    let c = params.contraction();
    let s = libm::sqrt(params.child_variance());
    values[0] = params.sigma() * rng.sample::<f64, _>(StandardNormal);
    for k in 0..layout.depth() {
        for v in layout.level(k) {
            let mean = c * values[v];
            for ch in layout.children(v) {
                values[ch] = mean + s * rng.sample::<f64, _>(StandardNormal);
            }
        }
    }
    values
}

/// Independent "blocked" marks: a vertex is blocked when some trajectory of the
/// interlacement has it as its closest point to the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct VacancyMarks {
    pub layout: BallLayout,
    pub level: Level,
    pub blocked: Vec<bool>,
}

impl VacancyMarks {
    /// The geodesic from the base point to `v` avoids the interlacement iff
    /// no vertex on it is blocked.
    pub fn geodesic_vacant(&self, mut v: usize) -> bool {
        loop {
            if self.blocked[v] {
                return false;
            }
            match self.layout.parent(v) {
                Some(p) => v = p,
                None => return true,
            }
        }
    }
}

pub fn sample_vacancy_marks<R: Rng + ?Sized>(
    v: Level,
    n: u32,
    params: &TreeParams,
    max_vertices: usize,
    rng: &mut R,
) -> Result<VacancyMarks> {
    let layout = BallLayout::new(params.d(), n, max_vertices)?;
    let vac = params.vacancy_probs(v);
    let blocked = (0..layout.len())
        .map(|i| {
            let keep = if i == 0 { vac.p0 } else { vac.p };
            !(rng.random::<f64>() < keep)
        })
        .collect();
    Ok(VacancyMarks {
        layout,
        level: v,
        blocked,
    })
}

/// Trace of the interlacement at level `v` on `B_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterlacementWindow {
    pub layout: BallLayout,
    pub level: Level,
    pub occupied: Vec<bool>,
    pub trajectory_count: u64,
}

impl InterlacementWindow {
    pub fn is_void(&self) -> bool {
        self.trajectory_count == 0
    }
}

pub fn sample_interlacement_window<R: Rng + ?Sized>(
    v: Level,
    n: u32,
    params: &TreeParams,
    max_vertices: usize,
    rng: &mut R,
) -> Result<InterlacementWindow> {
    if n == 0 {
        return Err(Error::domain("the interlacement window needs depth n >= 1"));
    }
    let layout = BallLayout::new(params.d(), n, max_vertices)?;
    let (occupied, trajectory_count) = window_on(&layout, v, params, rng);
    Ok(InterlacementWindow {
        layout,
        level: v,
        occupied,
        trajectory_count,
    })
}

/// Samples the window on a prepared layout of depth `≥ 1`.
///
/// The number of trajectories meeting `B_n` is Poisson with mean
/// `v·cap(B_n)`; each enters uniformly on the sphere and then runs as a simple
/// random walk. A step out of the ball comes back to the same sphere vertex
/// with probability `1/d`, otherwise the trajectory has left for good. The
/// backward halves never meet `B_n`.
pub fn window_on<R: Rng + ?Sized>(
    layout: &BallLayout,
    v: Level,
    params: &TreeParams,
    rng: &mut R,
) -> (Vec<bool>, u64) {
    let n = layout.depth();
    debug_assert!(n >= 1);
    let mut occupied = alloc::vec![false; layout.len()];
    let mean = v.get() * params.ball_capacity(n);
    if !(mean > 0.0) {
        return (occupied, 0);
    }
    let count = Poisson::new(mean)
        .expect("positive finite Poisson mean")
        .sample(rng) as u64;
    let d = params.d() as usize;
    let back = 1.0 / params.df();
    let sphere = layout.sphere();
    for _ in 0..count {
        let mut x = sphere.start + rng.random_range(0..sphere.len());
        let mut level = n;
        occupied[x] = true;
        loop {
            let j = rng.random_range(0..=d);
            if level == n {
                if j == 0 {
                    x = layout.parent(x).expect("sphere vertex has a parent");
                    level -= 1;
                } else if !rng.random_bool(back) {
                    break;
                }
            } else if level == 0 {
                x = layout.children(0).start + j;
                level = 1;
            } else if j == 0 {
                x = layout.parent(x).expect("non-root vertex has a parent");
                level -= 1;
            } else {
                x = layout.children(x).start + (j - 1);
                level += 1;
            }
            occupied[x] = true;
        }
    }
    (occupied, count)
}

/// Conditional-on-`φ` independent edge percolation at height `a`.
///
/// Entry `v ≥ 1` is the edge between `v` and its parent; it is open with
/// probability `1 − exp(−2(φ_v − a)⁺(φ_parent − a)⁺)`. Entry `0` is unused.
pub fn sample_lupu_edges<R: Rng + ?Sized>(phi: &GffBall, a: f64, rng: &mut R) -> Vec<bool> {
    lupu_on(&phi.layout, &phi.values, a, rng)
}

pub(crate) fn lupu_on<R: Rng + ?Sized>(
    layout: &BallLayout,
    values: &[f64],
    a: f64,
    rng: &mut R,
) -> Vec<bool> {
    let mut open = alloc::vec![false; layout.len()];
    for k in 0..layout.depth() {
        for v in layout.level(k) {
            let up = pos(values[v] - a);
            if up == 0.0 {
                continue;
            }
            for ch in layout.children(v) {
                let w = 2.0 * up * pos(values[ch] - a);
                if w > 0.0 {
                    open[ch] = rng.random::<f64>() < -libm::expm1(-w);
                }
            }
        }
    }
    open
}
