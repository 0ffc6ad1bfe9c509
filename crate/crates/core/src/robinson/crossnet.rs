use serde::Serialize;

use super::tiler::RobinsonTiling;
use crate::error::Result;
use crate::symbolic::Sym;
use crate::toeplitz::{OneNet, TwoNet};

/// Default width of the border band whose defects are reported apart.
pub const NET_BORDER: usize = 2;

/// Checks of one level: crosses with period `2^(level+1)` in both axes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub period: usize,
    /// Chosen residues `(x mod period, y mod period)`.
    pub offset: (usize, usize),
    /// Interior lattice points of the chosen class.
    pub lattice_points: usize,
    /// Interior lattice points without a cross.
    pub missing: Vec<(usize, usize)>,
    /// Interior crosses in the two mixed classes, which a net forbids.
    pub stray: Vec<(usize, usize)>,
    /// Defects of either kind inside the border band.
    pub border_defects: usize,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossNetReport {
    pub width: usize,
    pub height: usize,
    pub border: usize,
    /// True when the window is too small to hold any level.
    pub vacuous: bool,
    pub levels: Vec<LevelReport>,
    /// The 2-net read off the chosen offsets (level `n` of the report is
    /// level `n + 1` of each component).
    pub net: Option<TwoNet>,
}

impl CrossNetReport {
    pub fn consistent(&self) -> bool {
        self.levels.iter().all(|l| l.consistent)
    }

    /// Lowest inconsistent level.
    pub fn first_inconsistent(&self) -> Option<usize> {
        self.levels.iter().find(|l| !l.consistent).map(|l| l.level)
    }
}

/// Compares the cross positions of `tiling` with a 2-net, level by level
/// for `0..=max_level`. Level `n` has period `2^(n+1)` and lives inside the
/// residue class left free by the lower levels; the best of the four
/// candidate classes is chosen and then checked on cells at least `border`
/// away from the window edge.
pub fn verify_cross_net(
    tiling: &RobinsonTiling,
    crosses: &[Sym],
    max_level: usize,
    border: usize,
) -> Result<CrossNetReport> {
    let (w, h) = (tiling.width, tiling.height);
    let mut report = CrossNetReport {
        width: w,
        height: h,
        border,
        vacuous: true,
        levels: Vec::new(),
        net: None,
    };
    if w < 2 || h < 2 {
        return Ok(report);
    }
    let is_cross = |x: usize, y: usize| crosses.contains(&tiling.get(x, y));
    let inside =
        |x: usize, y: usize| x >= border && y >= border && x + border < w && y + border < h;
    let (mut hole_x, mut hole_y) = (0usize, 0usize);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for level in 0..=max_level.min(30) {
        let period = 1usize << (level + 1);
        let half = period / 2;
        // Four candidate classes inside the current hole.
        let mut best: Option<(i64, usize, usize)> = None;
        for ax in [hole_x, hole_x + half] {
            for ay in [hole_y, hole_y + half] {
                let (bx, by) = (ax ^ half, ay ^ half);
                let mut score = 0i64;
                for y in 0..h {
                    for x in 0..w {
                        if !inside(x, y) || !is_cross(x, y) {
                            continue;
                        }
                        let (rx, ry) = (x % period, y % period);
                        if (rx, ry) == (ax, ay) {
                            score += 1;
                        } else if (rx, ry) == (ax, by) || (rx, ry) == (bx, ay) {
                            score -= 1;
                        }
                    }
                }
                if best.is_none_or(|(s, _, _)| score > s) {
                    best = Some((score, ax, ay));
                }
            }
        }
        let (_, ax, ay) = best.expect("four candidates");
        let (bx, by) = (ax ^ half, ay ^ half);
        let mut lattice_points = 0;
        let (mut missing, mut stray, mut border_defects) = (Vec::new(), Vec::new(), 0);
        for y in 0..h {
            for x in 0..w {
                let (rx, ry) = (x % period, y % period);
                let on_lattice = (rx, ry) == (ax, ay);
                let mixed = (rx, ry) == (ax, by) || (rx, ry) == (bx, ay);
                let defect = (on_lattice && !is_cross(x, y)) || (mixed && is_cross(x, y));
                if !inside(x, y) {
                    border_defects += usize::from(defect);
                    continue;
                }
                lattice_points += usize::from(on_lattice);
                if defect && on_lattice {
                    missing.push((x, y));
                } else if defect {
                    stray.push((x, y));
                }
            }
        }
        if lattice_points == 0 {
            break;
        }
        report.vacuous = false;
        let consistent = missing.is_empty() && stray.is_empty();
        report.levels.push(LevelReport {
            level,
            period,
            offset: (ax, ay),
            lattice_points,
            missing,
            stray,
            border_defects,
            consistent,
        });
        xs.push(ax as u64);
        ys.push(ay as u64);
        (hole_x, hole_y) = (bx, by);
    }
    if let (Ok(horizontal), Ok(vertical)) = (OneNet::new(xs), OneNet::new(ys)) {
        if horizontal.depth() > 0 {
            report.net = Some(TwoNet {
                horizontal,
                vertical,
            });
        }
    }
    Ok(report)
}
