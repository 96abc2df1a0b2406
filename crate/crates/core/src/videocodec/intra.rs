//! H.264-style luma intra predictors for 4×4 and 8×8 blocks (the 8×8 ones
//! without reference smoothing).

use crate::blocks::{Block, PixelPlane};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntraMode {
    Vertical = 0,
    Horizontal = 1,
    Dc = 2,
    DiagDownLeft = 3,
    DiagDownRight = 4,
    VerticalRight = 5,
    HorizontalDown = 6,
    VerticalLeft = 7,
    HorizontalUp = 8,
}

impl IntraMode {
    pub const ALL: [IntraMode; 9] = [
        IntraMode::Vertical,
        IntraMode::Horizontal,
        IntraMode::Dc,
        IntraMode::DiagDownLeft,
        IntraMode::DiagDownRight,
        IntraMode::VerticalRight,
        IntraMode::HorizontalDown,
        IntraMode::VerticalLeft,
        IntraMode::HorizontalUp,
    ];

    pub fn from_id(id: u8) -> Result<Self> {
        Self::ALL.get(id as usize).copied().ok_or_else(|| Error::invalid(format!("intra mode {id} out of range")))
    }

    pub fn id(self) -> u8 {
        self as u8
    }

    /// Whether the mode's reference samples exist for `nb`.
    pub fn is_available(self, nb: &Neighbors) -> bool {
        use IntraMode::*;
        match self {
            Dc => true,
            Vertical | DiagDownLeft | VerticalLeft => nb.has_top,
            Horizontal | HorizontalUp => nb.has_left,
            DiagDownRight | VerticalRight | HorizontalDown => nb.has_top && nb.has_left && nb.has_corner,
        }
    }
}

/// Reference samples of one block after substitution: `top` holds 2N
/// samples (above and above-right), `left` N samples, `corner` the
/// above-left sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Neighbors {
    pub n: usize,
    pub top: Vec<i32>,
    pub left: Vec<i32>,
    pub corner: i32,
    pub has_top: bool,
    pub has_left: bool,
    pub has_corner: bool,
    pub has_top_right: bool,
}

const MISSING: i32 = 128;

impl Neighbors {
    /// Gathers the references of the block at `origin` from `plane`, whose
    /// samples are taken as rounded 8-bit values. Blocks are decoded in raster
    /// order, so the above-right block exists whenever it is inside the plane.
    pub fn gather(plane: &PixelPlane, origin: (usize, usize), n: usize) -> Self {
        let (x, y) = origin;
        let px = |xx: usize, yy: usize| plane.get(xx, yy).round().clamp(0.0, 255.0) as i32;
        let has_top = y > 0;
        let has_left = x > 0;
        let has_corner = has_top && has_left;
        let has_top_right = has_top && x + n < plane.width();
        let mut top = vec![MISSING; 2 * n];
        if has_top {
            for i in 0..n {
                top[i] = px(x + i, y - 1);
            }
            for i in n..2 * n {
                top[i] = if has_top_right { px(x + i, y - 1) } else { top[n - 1] };
            }
        }
        let left = if has_left { (0..n).map(|j| px(x - 1, y + j)).collect() } else { vec![MISSING; n] };
        let corner = if has_corner { px(x - 1, y - 1) } else { MISSING };
        Self { n, top, left, corner, has_top, has_left, has_corner, has_top_right }
    }

    /// Sample above the block at column `i` (`-1` is the corner).
    #[inline]
    fn t(&self, i: isize) -> i32 {
        if i < 0 {
            self.corner
        } else {
            self.top[i as usize]
        }
    }

    /// Sample left of the block at row `j` (`-1` is the corner).
    #[inline]
    fn l(&self, j: isize) -> i32 {
        if j < 0 {
            self.corner
        } else {
            self.left[j as usize]
        }
    }
}

fn dc_value(nb: &Neighbors) -> i32 {
    let n = nb.n as i32;
    let shift = n.trailing_zeros();
    let st: i32 = nb.top[..nb.n].iter().sum();
    let sl: i32 = nb.left.iter().sum();
    match (nb.has_top, nb.has_left) {
        (true, true) => (st + sl + n) >> (shift + 1),
        (true, false) => (st + (n >> 1)) >> shift,
        (false, true) => (sl + (n >> 1)) >> shift,
        (false, false) => MISSING,
    }
}

/// Prediction for `mode` from substituted references.
pub fn intra_predict(mode: IntraMode, nb: &Neighbors) -> Result<Block> {
    let n = nb.n;
    crate::blocks::check_block_size(n)?;
    let ni = n as isize;
    let mut s = vec![0.0; n * n];
    let f3 = |a: i32, b: i32, c: i32| (a + 2 * b + c + 2) >> 2;
    let f2 = |a: i32, b: i32| (a + b + 1) >> 1;
    let dc = dc_value(nb);
    for y in 0..ni {
        for x in 0..ni {
            let v = match mode {
                IntraMode::Vertical => nb.t(x),
                IntraMode::Horizontal => nb.l(y),
                IntraMode::Dc => dc,
                IntraMode::DiagDownLeft => {
                    if x == ni - 1 && y == ni - 1 {
                        (nb.t(2 * ni - 2) + 3 * nb.t(2 * ni - 1) + 2) >> 2
                    } else {
                        f3(nb.t(x + y), nb.t(x + y + 1), nb.t(x + y + 2))
                    }
                }
                IntraMode::DiagDownRight => {
                    if x > y {
                        f3(nb.t(x - y - 2), nb.t(x - y - 1), nb.t(x - y))
                    } else if x < y {
                        f3(nb.l(y - x - 2), nb.l(y - x - 1), nb.l(y - x))
                    } else {
                        f3(nb.t(0), nb.corner, nb.l(0))
                    }
                }
                IntraMode::VerticalRight => {
                    let z = 2 * x - y;
                    if z >= 0 && z % 2 == 0 {
                        f2(nb.t(x - (y >> 1) - 1), nb.t(x - (y >> 1)))
                    } else if z >= 0 {
                        f3(nb.t(x - (y >> 1) - 2), nb.t(x - (y >> 1) - 1), nb.t(x - (y >> 1)))
                    } else if z == -1 {
                        f3(nb.l(0), nb.corner, nb.t(0))
                    } else {
                        f3(nb.l(y - 2 * x - 1), nb.l(y - 2 * x - 2), nb.l(y - 2 * x - 3))
                    }
                }
                IntraMode::HorizontalDown => {
                    let z = 2 * y - x;
                    if z >= 0 && z % 2 == 0 {
                        f2(nb.l(y - (x >> 1) - 1), nb.l(y - (x >> 1)))
                    } else if z >= 0 {
                        f3(nb.l(y - (x >> 1) - 2), nb.l(y - (x >> 1) - 1), nb.l(y - (x >> 1)))
                    } else if z == -1 {
                        f3(nb.l(0), nb.corner, nb.t(0))
                    } else {
                        f3(nb.t(x - 2 * y - 1), nb.t(x - 2 * y - 2), nb.t(x - 2 * y - 3))
                    }
                }
                IntraMode::VerticalLeft => {
                    let b = x + (y >> 1);
                    if y % 2 == 0 {
                        f2(nb.t(b), nb.t(b + 1))
                    } else {
                        f3(nb.t(b), nb.t(b + 1), nb.t(b + 2))
                    }
                }
                IntraMode::HorizontalUp => {
                    let z = x + 2 * y;
                    let b = y + (x >> 1);
                    if z > 2 * ni - 3 {
                        nb.l(ni - 1)
                    } else if z == 2 * ni - 3 {
                        (nb.l(ni - 2) + 3 * nb.l(ni - 1) + 2) >> 2
                    } else if z % 2 == 0 {
                        f2(nb.l(b), nb.l(b + 1))
                    } else {
                        f3(nb.l(b), nb.l(b + 1), nb.l(b + 2))
                    }
                }
            };
            s[(y * ni + x) as usize] = v as f64;
        }
    }
    Ok(Block { origin: (0, 0), size: n, samples: s })
}

pub fn sad(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Available mode with the smallest SAD against `block`; ties go to the
/// smaller mode id.
pub fn choose_mode(block: &Block, nb: &Neighbors) -> Result<IntraMode> {
    let mut best = (f64::INFINITY, IntraMode::Dc);
    for mode in IntraMode::ALL {
        if !mode.is_available(nb) {
            continue;
        }
        let cost = sad(&block.samples, &intra_predict(mode, nb)?.samples);
        if cost < best.0 {
            best = (cost, mode);
        }
    }
    Ok(best.1)
}
