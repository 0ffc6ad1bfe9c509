use std::collections::HashMap;

use serde::Serialize;

use super::alphabet::Sym;
use super::count::enumerate_patterns_limited;
use super::pattern::RectWindow;
use super::spec::SftSpec;
use crate::error::{Error, Result};

/// Two admissible probe windows that agree below the top row but put
/// different symbols above the center.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    /// Rows below the top row, bottom first.
    pub context: Vec<Vec<Sym>>,
    pub first_top: Vec<Sym>,
    pub second_top: Vec<Sym>,
}

/// Outcome of a south-determinism probe. A pass only certifies the probe
/// size: every admissible `(2w+1) x h` window is determined at its top
/// center by its lower `h-1` rows.
#[derive(Clone, Debug, Serialize)]
pub struct DeterminismReport {
    pub deterministic: bool,
    pub probe_width: usize,
    pub probe_height: usize,
    pub windows_checked: usize,
    pub counterexample: Option<Counterexample>,
}

/// Exhaustive south-determinism probe on `(2 * probe_width + 1) x probe_height`
/// windows (`probe_height >= 2`); `budget` caps the number of windows.
pub fn check_south_deterministic(
    spec: &SftSpec,
    probe_height: usize,
    probe_width: usize,
    budget: usize,
) -> Result<DeterminismReport> {
    if spec.dimension() != 2 {
        return Err(Error::DimensionMismatch(
            "south determinism needs a 2D spec".into(),
        ));
    }
    if probe_height < 2 {
        return Err(Error::InvalidInput("probe height must be >= 2".into()));
    }
    let w = 2 * probe_width + 1;
    let window = RectWindow::new(2, (0, 0), (w as u32, probe_height as u32))?;
    let windows = enumerate_patterns_limited(spec, &window, 0, budget).map_err(|e| match e {
        Error::Budget(_) => Error::Budget(format!(
            "probe {w}x{probe_height} has more than {budget} admissible windows; no verdict"
        )),
        other => other,
    })?;
    let mut seen: HashMap<Vec<Vec<Sym>>, (Sym, Vec<Sym>)> = HashMap::new();
    for p in &windows {
        let mut rows = p.rows();
        let top = rows.pop().expect("height >= 2");
        let center = top[probe_width];
        if let Some((c, other_top)) = seen.get(&rows) {
            if *c != center {
                return Ok(DeterminismReport {
                    deterministic: false,
                    probe_width,
                    probe_height,
                    windows_checked: windows.len(),
                    counterexample: Some(Counterexample {
                        context: rows,
                        first_top: other_top.clone(),
                        second_top: top,
                    }),
                });
            }
        } else {
            seen.insert(rows, (center, top));
        }
    }
    Ok(DeterminismReport {
        deterministic: true,
        probe_width,
        probe_height,
        windows_checked: windows.len(),
        counterexample: None,
    })
}
