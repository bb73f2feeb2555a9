//! User-induced blockage: binary masks and per-element attenuation.
//!
//! A blocked element keeps a fraction `β` of its channel amplitude. The static
//! model uses one `β` for all blocked elements; the dynamic model carries a
//! mask and per-element attenuation for every frame.

use num_complex::Complex;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{ensure, ensure_len, Error, Result};
use crate::geometry::{ArrayGeometry, Layout};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockagePattern {
    /// Uniformly random subset of elements.
    #[default]
    RandomSubset,
    /// Contiguous block of grid cells, as a finger resting on the screen.
    Rectangle,
    /// Consecutive run of perimeter elements, as a palm gripping the chassis.
    EdgeSegment,
}

impl BlockagePattern {
    pub fn name(&self) -> &'static str {
        match self {
            BlockagePattern::RandomSubset => "random-subset",
            BlockagePattern::Rectangle => "rectangle",
            BlockagePattern::EdgeSegment => "edge-segment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockageSpec<T> {
    /// Fraction of elements blocked, in [0, 1].
    pub ratio: T,
    /// Amplitude fraction retained by a blocked element, in (0, 1].
    pub beta: T,
    pub pattern: BlockagePattern,
}

impl<T: Scalar> BlockageSpec<T> {
    pub fn new(ratio: T, beta: T, pattern: BlockagePattern) -> Result<Self> {
        let spec = Self {
            ratio,
            beta,
            pattern,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.ratio >= T::zero() && self.ratio <= T::one(), || {
            format!("blockage ratio must lie in [0, 1], got {}", self.ratio)
        })?;
        validate_beta(self.beta)
    }

    /// Number of blocked elements out of `elements`, rounding halves away from zero.
    pub fn blocked_count(&self, elements: usize) -> usize {
        blocked_count(self.ratio, elements)
    }
}

fn validate_beta<T: Scalar>(beta: T) -> Result<()> {
    ensure(beta > T::zero() && beta <= T::one(), || {
        format!("attenuation factor must lie in (0, 1], got {beta}")
    })
}

/// `round(ratio·elements)` with ties away from zero; 0.5 of 49 blocks 25.
pub fn blocked_count<T: Scalar>(ratio: T, elements: usize) -> usize {
    let k = (ratio * T::from_usize_lossy(elements)).round();
    k.to_usize().unwrap_or(0).min(elements)
}

/// Per-element blocked indicator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockageMask {
    blocked: Vec<bool>,
}

impl BlockageMask {
    pub fn new(blocked: Vec<bool>) -> Self {
        Self { blocked }
    }

    pub fn none(elements: usize) -> Self {
        Self::new(vec![false; elements])
    }

    pub fn from_indices(elements: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut blocked = vec![false; elements];
        for i in indices {
            blocked[i] = true;
        }
        Self { blocked }
    }

    pub fn len(&self) -> usize {
        self.blocked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocked.is_empty()
    }

    pub fn is_blocked(&self, s: usize) -> bool {
        self.blocked[s]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.blocked
    }

    pub fn popcount(&self) -> usize {
        self.blocked.iter().filter(|&&b| b).count()
    }
}

/// Draws a mask with exactly `round(ratio·S)` blocked elements.
pub fn generate_mask<T: Scalar, R: Rng + ?Sized>(
    spec: &BlockageSpec<T>,
    geom: &ArrayGeometry<T>,
    rng: &mut R,
) -> Result<BlockageMask> {
    spec.validate()?;
    let n = geom.len();
    let k = spec.blocked_count(n);
    if k == 0 {
        return Ok(BlockageMask::none(n));
    }
    if k == n {
        return Ok(BlockageMask::new(vec![true; n]));
    }
    match (spec.pattern, geom.layout()) {
        (BlockagePattern::RandomSubset, _) => {
            Ok(BlockageMask::from_indices(n, index::sample(rng, n, k)))
        }
        (BlockagePattern::Rectangle, Layout::Grid { cols, rows }) => {
            Ok(rectangle_mask(cols, rows, k, rng))
        }
        (BlockagePattern::EdgeSegment, Layout::Perimeter) => {
            let start = rng.random_range(0..n);
            Ok(BlockageMask::from_indices(
                n,
                (0..k).map(|i| (start + i) % n),
            ))
        }
        (pattern, layout) => Err(Error::PatternMismatch {
            pattern: pattern.name(),
            layout: layout.name(),
        }),
    }
}

/// Smallest near-square `(width, height)` block of cells holding `k` elements.
fn rectangle_shape(cols: usize, rows: usize, k: usize) -> (usize, usize) {
    let mut width = (k as f64).sqrt().ceil() as usize;
    width = width.clamp(1, cols);
    let mut height = k.div_ceil(width);
    if height > rows {
        height = rows;
        width = k.div_ceil(rows).min(cols);
    }
    (width, height)
}

/// Blocks `k` cells of a rectangle whose bottom-right cell (the anchor) is drawn
/// uniformly among positions where the rectangle fits; cells nearest the
/// anchor are kept first.
fn rectangle_mask<R: Rng + ?Sized>(
    cols: usize,
    rows: usize,
    k: usize,
    rng: &mut R,
) -> BlockageMask {
    let (width, height) = rectangle_shape(cols, rows, k);
    let anchor_col = rng.random_range(width - 1..cols);
    let anchor_row = rng.random_range(height - 1..rows);
    let mut cells: Vec<(usize, usize)> = (0..height)
        .flat_map(|dr| (0..width).map(move |dc| (anchor_row - dr, anchor_col - dc)))
        .collect();
    cells.sort_by_key(|&(r, c)| {
        let (dr, dc) = (anchor_row - r, anchor_col - c);
        (dr * dr + dc * dc, r, c)
    });
    BlockageMask::from_indices(
        cols * rows,
        cells.into_iter().take(k).map(|(r, c)| r * cols + c),
    )
}

/// Scales blocked entries by `β`; unblocked entries are copied unchanged.
pub fn apply_static<T: Scalar>(
    h: &ChannelRealization<T>,
    mask: &BlockageMask,
    beta: T,
) -> Result<ChannelRealization<T>> {
    ensure_len(h.len(), mask.len())?;
    validate_beta(beta)?;
    let blocked =
        h.h.iter()
            .zip(mask.as_slice())
            .map(|(&z, &b)| if b { z * beta } else { z })
            .collect();
    Ok(ChannelRealization {
        h: blocked,
        params: h.params,
        seed_tag: h.seed_tag,
    })
}

/// Mask and per-element attenuation at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicBlockageFrame<T> {
    pub mask: BlockageMask,
    /// Per-element retained amplitude; only consulted where the mask is set.
    pub beta: Vec<T>,
}

impl<T: Scalar> DynamicBlockageFrame<T> {
    pub fn new(mask: BlockageMask, beta: Vec<T>) -> Result<Self> {
        ensure_len(mask.len(), beta.len())?;
        for &b in &beta {
            validate_beta(b)?;
        }
        Ok(Self { mask, beta })
    }

    pub fn uniform(mask: BlockageMask, beta: T) -> Result<Self> {
        let n = mask.len();
        Self::new(mask, vec![beta; n])
    }
}

/// Applies every frame to the same underlying channel.
pub fn apply_dynamic<T: Scalar>(
    h: &ChannelRealization<T>,
    frames: &[DynamicBlockageFrame<T>],
) -> Result<Vec<ChannelRealization<T>>> {
    frames
        .iter()
        .map(|frame| {
            ensure_len(h.len(), frame.mask.len())?;
            ensure_len(h.len(), frame.beta.len())?;
            let out: Vec<Complex<T>> =
                h.h.iter()
                    .zip(frame.mask.as_slice())
                    .zip(&frame.beta)
                    .map(|((&z, &b), &beta)| if b { z * beta } else { z })
                    .collect();
            Ok(ChannelRealization {
                h: out,
                params: h.params,
                seed_tag: h.seed_tag,
            })
        })
        .collect()
}

/// Shape of a synthetic fingertip moving over the screen grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerConfig<T> {
    /// Core footprint in grid cells.
    pub core_width: usize,
    pub core_height: usize,
    /// Attenuation inside the core.
    pub beta_near: T,
    /// Attenuation on the one-cell ring around the core.
    pub beta_far: T,
}

impl<T: Scalar> Default for FingerConfig<T> {
    fn default() -> Self {
        Self {
            core_width: 2,
            core_height: 2,
            beta_near: T::lit(0.1),
            beta_far: T::lit(0.5),
        }
    }
}

impl<T: Scalar> FingerConfig<T> {
    fn validate(&self, cols: usize, rows: usize) -> Result<()> {
        validate_beta(self.beta_near)?;
        validate_beta(self.beta_far)?;
        ensure(
            (1..=cols).contains(&self.core_width) && (1..=rows).contains(&self.core_height),
            || {
                format!(
                    "finger core {}x{} does not fit a {cols}x{rows} grid",
                    self.core_width, self.core_height
                )
            },
        )
    }
}

/// Frames for a fingertip whose core's top-left cell random-walks one cell per
/// frame (reflecting at the grid edges). The core is attenuated by
/// `beta_near`, the surrounding ring (clipped to the grid) by `beta_far`.
pub fn generate_finger_trajectory<T: Scalar, R: Rng + ?Sized>(
    geom: &ArrayGeometry<T>,
    frames: usize,
    finger: &FingerConfig<T>,
    rng: &mut R,
) -> Result<Vec<DynamicBlockageFrame<T>>> {
    let Layout::Grid { cols, rows } = geom.layout() else {
        return Err(Error::PatternMismatch {
            pattern: "finger-trajectory",
            layout: geom.layout().name(),
        });
    };
    ensure(frames >= 1, || "trajectory needs at least one frame".into())?;
    finger.validate(cols, rows)?;

    let max_col = cols - finger.core_width;
    let max_row = rows - finger.core_height;
    let mut col = rng.random_range(0..=max_col);
    let mut row = rng.random_range(0..=max_row);

    let mut out = Vec::with_capacity(frames);
    for t in 0..frames {
        if t > 0 {
            // Vertical moves on rows, horizontal on columns; single-cell axes cannot move.
            let (pos, max) = if rng.random_bool(0.5) {
                (&mut col, max_col)
            } else {
                (&mut row, max_row)
            };
            let forward = rng.random_bool(0.5);
            *pos = reflect_step(*pos, max, forward);
        }
        out.push(finger_frame(cols, rows, col, row, finger)?);
    }
    Ok(out)
}

/// One step along an axis `0..=max`, bouncing off either end.
fn reflect_step(pos: usize, max: usize, forward: bool) -> usize {
    if max == 0 {
        return 0;
    }
    match (forward, pos) {
        (true, p) if p == max => p - 1,
        (true, p) => p + 1,
        (false, 0) => 1,
        (false, p) => p - 1,
    }
}

fn finger_frame<T: Scalar>(
    cols: usize,
    rows: usize,
    col: usize,
    row: usize,
    finger: &FingerConfig<T>,
) -> Result<DynamicBlockageFrame<T>> {
    let n = cols * rows;
    let mut blocked = vec![false; n];
    let mut beta = vec![T::one(); n];
    let ring_c0 = col.saturating_sub(1);
    let ring_r0 = row.saturating_sub(1);
    let ring_c1 = (col + finger.core_width).min(cols - 1);
    let ring_r1 = (row + finger.core_height).min(rows - 1);
    for r in ring_r0..=ring_r1 {
        for c in ring_c0..=ring_c1 {
            let core = (col..col + finger.core_width).contains(&c)
                && (row..row + finger.core_height).contains(&r);
            let s = r * cols + c;
            blocked[s] = true;
            beta[s] = if core {
                finger.beta_near
            } else {
                finger.beta_far
            };
        }
    }
    DynamicBlockageFrame::new(BlockageMask::new(blocked), beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::LinkParams;
    use crate::geometry::{edge_layout, screen_layout, EdgeArrayConfig, ScreenArrayConfig};
    use crate::rng::{trial_rng, Substream};
    use proptest::prelude::*;

    fn grid(n: usize) -> ArrayGeometry<f64> {
        screen_layout(&ScreenArrayConfig::new(n, n, 0.005).unwrap()).unwrap()
    }

    fn params() -> LinkParams<f64> {
        LinkParams {
            carrier_hz: 28e9,
            distance_m: 3.0,
            path_loss_exponent: 2.5,
            reference_distance_m: 1.0,
            alpha: 1.0,
            noise_power_w: 1.0,
            tx_power_w: 1.0,
            extra_loss_db: 0.0,
        }
    }

    fn channel(values: &[(f64, f64)]) -> ChannelRealization<f64> {
        ChannelRealization::new(
            values
                .iter()
                .map(|&(re, im)| Complex::new(re, im))
                .collect(),
            params(),
            0,
        )
        .unwrap()
    }

    fn spec(ratio: f64, pattern: BlockagePattern) -> BlockageSpec<f64> {
        BlockageSpec::new(ratio, 0.1, pattern).unwrap()
    }

    #[test]
    fn extreme_ratios() {
        let g = grid(7);
        let mut rng = trial_rng(1, 0, Substream::ScreenMask);
        assert_eq!(
            generate_mask(&spec(0.0, BlockagePattern::RandomSubset), &g, &mut rng)
                .unwrap()
                .popcount(),
            0
        );
        assert_eq!(
            generate_mask(&spec(1.0, BlockagePattern::Rectangle), &g, &mut rng)
                .unwrap()
                .popcount(),
            49
        );
    }

    #[test]
    fn half_of_forty_nine_rounds_up() {
        let g = grid(7);
        let mut rng = trial_rng(1, 0, Substream::ScreenMask);
        for pattern in [BlockagePattern::RandomSubset, BlockagePattern::Rectangle] {
            let m = generate_mask(&spec(0.5, pattern), &g, &mut rng).unwrap();
            assert_eq!(m.popcount(), 25);
        }
    }

    #[test]
    fn rectangle_is_contiguous_and_in_grid() {
        let g = grid(7);
        for trial in 0..50 {
            let mut rng = trial_rng(9, trial, Substream::ScreenMask);
            let m = generate_mask(&spec(0.2, BlockagePattern::Rectangle), &g, &mut rng).unwrap();
            assert_eq!(m.popcount(), 10);
            let cells: Vec<(usize, usize)> = (0..49)
                .filter(|&s| m.is_blocked(s))
                .map(|s| (s / 7, s % 7))
                .collect();
            let (r0, r1) = (
                cells.iter().map(|c| c.0).min().unwrap(),
                cells.iter().map(|c| c.0).max().unwrap(),
            );
            let (c0, c1) = (
                cells.iter().map(|c| c.1).min().unwrap(),
                cells.iter().map(|c| c.1).max().unwrap(),
            );
            // 10 cells fit a 4x3 bounding box.
            assert!((c1 - c0 + 1) * (r1 - r0 + 1) <= 12);
        }
    }

    #[test]
    fn edge_segment_is_consecutive_on_the_perimeter() {
        let g = edge_layout(&EdgeArrayConfig::new(10, 0.07, 0.15).unwrap()).unwrap();
        let mut rng = trial_rng(3, 0, Substream::EdgeMask);
        let m = generate_mask(&spec(0.3, BlockagePattern::EdgeSegment), &g, &mut rng).unwrap();
        assert_eq!(m.popcount(), 3);
        let idx: Vec<usize> = (0..10).filter(|&s| m.is_blocked(s)).collect();
        let runs = (0..10)
            .filter(|&s| m.is_blocked(s) && !m.is_blocked((s + 9) % 10))
            .count();
        assert_eq!(runs, 1, "blocked elements {idx:?} not one run");
    }

    #[test]
    fn pattern_mismatch() {
        let edge = edge_layout(&EdgeArrayConfig::new(10, 0.07, 0.15).unwrap()).unwrap();
        let mut rng = trial_rng(3, 0, Substream::EdgeMask);
        assert!(matches!(
            generate_mask(&spec(0.3, BlockagePattern::Rectangle), &edge, &mut rng),
            Err(Error::PatternMismatch { .. })
        ));
        assert!(matches!(
            generate_mask(&spec(0.3, BlockagePattern::EdgeSegment), &grid(3), &mut rng),
            Err(Error::PatternMismatch { .. })
        ));
        assert!(generate_finger_trajectory(&edge, 3, &FingerConfig::default(), &mut rng).is_err());
    }

    #[test]
    fn static_identities() {
        let h = channel(&[(1.0, 2.0), (-0.5, 0.25), (3.0, -1.0)]);
        let any = BlockageMask::new(vec![true, false, true]);
        assert_eq!(apply_static(&h, &any, 1.0).unwrap().h, h.h);
        assert_eq!(
            apply_static(&h, &BlockageMask::none(3), 0.1).unwrap().h,
            h.h
        );
        let all = apply_static(&h, &BlockageMask::new(vec![true; 3]), 0.1).unwrap();
        for (a, b) in all.h.iter().zip(&h.h) {
            assert_eq!(*a, b * 0.1);
        }
        assert!(matches!(
            apply_static(&h, &BlockageMask::none(2), 0.5),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(apply_static(&h, &any, 0.0).is_err());
    }

    #[test]
    fn dynamic_reduces_to_static() {
        let h = channel(&[(1.0, 2.0), (-0.5, 0.25), (3.0, -1.0)]);
        let mask = BlockageMask::new(vec![false, true, true]);
        let frames = [DynamicBlockageFrame::uniform(mask.clone(), 0.3).unwrap()];
        let out = apply_dynamic(&h, &frames).unwrap();
        assert_eq!(out[0], apply_static(&h, &mask, 0.3).unwrap());

        let clear = [
            DynamicBlockageFrame::uniform(BlockageMask::none(3), 0.2).unwrap(),
            DynamicBlockageFrame::uniform(BlockageMask::none(3), 0.7).unwrap(),
        ];
        for frame in apply_dynamic(&h, &clear).unwrap() {
            assert_eq!(frame.h, h.h);
        }
    }

    #[test]
    fn dynamic_attenuation_change_halves_component() {
        let h = channel(&[(1.0, 2.0), (-0.5, 0.25)]);
        let mask = BlockageMask::new(vec![true, false]);
        let frames = [
            DynamicBlockageFrame::new(mask.clone(), vec![0.5, 1.0]).unwrap(),
            DynamicBlockageFrame::new(mask, vec![0.25, 1.0]).unwrap(),
        ];
        let out = apply_dynamic(&h, &frames).unwrap();
        assert_eq!(out[1].h[0], out[0].h[0] * 0.5);
        assert_eq!(out[0].h[1], out[1].h[1]);
        let short = [DynamicBlockageFrame::uniform(BlockageMask::none(1), 0.5).unwrap()];
        assert!(apply_dynamic(&h, &short).is_err());
    }

    #[test]
    fn single_frame_trajectory_is_a_static_rectangle() {
        let g = grid(5);
        let finger = FingerConfig::default();
        let mut rng = trial_rng(4, 0, Substream::ScreenMask);
        let frames = generate_finger_trajectory(&g, 1, &finger, &mut rng).unwrap();
        assert_eq!(frames.len(), 1);
        let f = &frames[0];
        let cells: Vec<usize> = (0..25).filter(|&s| f.mask.is_blocked(s)).collect();
        let near = cells.iter().filter(|&&s| f.beta[s] == 0.1).count();
        assert_eq!(near, 4);
        let (c0, c1) = (
            cells.iter().map(|s| s % 5).min().unwrap(),
            cells.iter().map(|s| s % 5).max().unwrap(),
        );
        let (r0, r1) = (
            cells.iter().map(|s| s / 5).min().unwrap(),
            cells.iter().map(|s| s / 5).max().unwrap(),
        );
        assert_eq!(cells.len(), (c1 - c0 + 1) * (r1 - r0 + 1));
        assert!(cells.iter().all(|&s| f.beta[s] == 0.1 || f.beta[s] == 0.5));
    }

    #[test]
    fn trajectory_is_seeded_and_stays_in_grid() {
        let g = grid(3);
        let finger = FingerConfig {
            core_width: 1,
            core_height: 1,
            ..FingerConfig::default()
        };
        let run = |seed| {
            let mut rng = trial_rng(seed, 0, Substream::ScreenMask);
            generate_finger_trajectory(&g, 200, &finger, &mut rng).unwrap()
        };
        let a = run(11);
        assert_eq!(a, run(11));
        let mut previous: Option<usize> = None;
        for frame in &a {
            let core: Vec<usize> = (0..9)
                .filter(|&s| frame.mask.is_blocked(s) && frame.beta[s] == 0.1)
                .collect();
            assert_eq!(core.len(), 1);
            if let Some(p) = previous {
                let (dr, dc) = ((p / 3).abs_diff(core[0] / 3), (p % 3).abs_diff(core[0] % 3));
                assert_eq!(dr + dc, 1, "anchor must move exactly one cell");
            }
            previous = Some(core[0]);
        }
    }

    #[test]
    fn reflection_at_edges() {
        assert_eq!(reflect_step(0, 4, false), 1);
        assert_eq!(reflect_step(4, 4, true), 3);
        assert_eq!(reflect_step(2, 4, true), 3);
        assert_eq!(reflect_step(0, 0, true), 0);
    }

    proptest! {
        #[test]
        fn popcount_matches_rounding(ratio in 0.0f64..=1.0, n in 1usize..9, seed in 0u64..1000) {
            let g = grid(n);
            let mut rng = trial_rng(seed, 0, Substream::ScreenMask);
            for pattern in [BlockagePattern::RandomSubset, BlockagePattern::Rectangle] {
                let m = generate_mask(&spec(ratio, pattern), &g, &mut rng).unwrap();
                prop_assert_eq!(m.popcount(), (ratio * (n * n) as f64).round() as usize);
            }
        }

        #[test]
        fn blockage_never_increases_norm(
            bits in proptest::collection::vec(any::<bool>(), 6),
            beta in 1e-6f64..=1.0,
            re in proptest::collection::vec(-5.0f64..5.0, 6),
            im in proptest::collection::vec(-5.0f64..5.0, 6),
        ) {
            let h = channel(&re.iter().copied().zip(im.iter().copied()).collect::<Vec<_>>());
            let mask = BlockageMask::new(bits);
            let out = apply_static(&h, &mask, beta).unwrap();
            prop_assert!(out.norm_sqr() <= h.norm_sqr());
            for s in 0..6 {
                if !mask.is_blocked(s) {
                    prop_assert_eq!(out.h[s], h.h[s]);
                }
            }
            let twice = apply_static(&out, &mask, beta).unwrap();
            let squared = apply_static(&h, &mask, beta * beta).unwrap();
            for (a, b) in twice.h.iter().zip(&squared.h) {
                prop_assert!((a - b).norm() <= 1e-14 * (1.0 + b.norm()));
            }
        }
    }
}
