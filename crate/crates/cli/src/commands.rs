use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use caentropy::ca::{
    ca_from_sft, identity_rule, shift_rule, space_time_pgm, split_count_identity, xor_ca, CaRule,
    RowMode,
};
use caentropy::entropy::{
    count_grid, entropy_series, series_tsv, verify_block_substitution, verify_simulation_bound,
    verify_slice_stack, CountGrid, SliceForm,
};
use caentropy::macrotile::{
    feasibility, init_grid, run_schedule, validate_schedule, MacrotileGrid, Neighbors, NextTile,
    ScheduleOutcome, ScheduleParams,
};
use caentropy::robinson::{
    cross_highlight_ppm, robinson_set, tile_rectangle, tiling_pgm, verify_cross_net, Boundary,
    TilingOutcome, NET_BORDER,
};
use caentropy::symbolic::{count_patterns, Alphabet, RectWindow, SftSpec};
use caentropy::toeplitz::{
    build_one_net, decode_density_prefix, generate_toeplitz_window, never_halts,
    power_of_two_exponent, Decoded, DensityMachine, MachineDocument, SWord, SymbolSequence,
};
use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::job::{Output, Status};

#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Count the admissible patterns of a spec on one window.
    Count(CountArgs),
    /// Generate a Toeplitz window and optionally decode it.
    Toeplitz(ToeplitzArgs),
    /// Tile a rectangle with the Robinson set and check the cross net.
    Robinson(RobinsonArgs),
    /// Entropy series of a spec on growing square windows.
    Entropy(EntropyArgs),
    /// Run a cellular automaton and draw its space-time diagram.
    Ca(CaArgs),
    /// Check the split counting identity on windows up to a length.
    Split(SplitArgs),
    /// Run the seven-phase macrotile schedule on a fixture.
    Macrotile(MacrotileArgs),
    /// Check the block-size schedule restrictions.
    Schedule(ScheduleArgs),
    /// Check the simulation bound between two count grids.
    VerifySim(VerifySimArgs),
    /// Classify a stack of slice words.
    Slices(SlicesArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Count(_) => "count",
            Command::Toeplitz(_) => "toeplitz",
            Command::Robinson(_) => "robinson",
            Command::Entropy(_) => "entropy",
            Command::Ca(_) => "ca",
            Command::Split(_) => "split",
            Command::Macrotile(_) => "macrotile",
            Command::Schedule(_) => "schedule",
            Command::VerifySim(_) => "verify-sim",
            Command::Slices(_) => "slices",
        }
    }

    /// Resolved parameters, as echoed in the manifest.
    pub fn params(&self) -> Result<Value> {
        let mut tagged = serde_json::to_value(self)?;
        Ok(tagged
            .get_mut(self.name())
            .map(Value::take)
            .unwrap_or(Value::Null))
    }

    pub fn run(&self, out: &mut Output) -> Result<Status> {
        match self {
            Command::Count(a) => count(a, out),
            Command::Toeplitz(a) => toeplitz(a, out),
            Command::Robinson(a) => robinson(a, out),
            Command::Entropy(a) => entropy(a, out),
            Command::Ca(a) => ca(a, out),
            Command::Split(a) => split(a, out),
            Command::Macrotile(a) => macrotile(a, out),
            Command::Schedule(a) => schedule(a, out),
            Command::VerifySim(a) => verify_sim(a, out),
            Command::Slices(a) => slices(a, out),
        }
    }
}

fn load_spec(path: &Path) -> Result<SftSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SftSpec::from_json(&text).with_context(|| format!("parsing spec {}", path.display()))
}

fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn window(spec: &SftSpec, width: u32, height: Option<u32>) -> RectWindow {
    if spec.dimension() == 1 {
        RectWindow::line(width)
    } else {
        RectWindow::rect(width, height.unwrap_or(width))
    }
}

fn bits(text: &str, what: &str) -> Result<Vec<u8>> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => bail!("{what} must be a string of 0 and 1, got `{text}`"),
        })
        .collect()
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountArgs {
    /// Spec file (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Window width, or length for 1D specs.
    #[arg(long, visible_alias = "length")]
    pub width: u32,
    /// Window height for 2D specs; defaults to the width.
    #[arg(long)]
    #[serde(default)]
    pub height: Option<u32>,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub margin: usize,
    /// Also write every count up to the window as a grid.
    #[arg(long)]
    #[serde(default)]
    pub grid: bool,
}

fn count(a: &CountArgs, out: &mut Output) -> Result<Status> {
    let spec = load_spec(&a.spec)?;
    let w = window(&spec, a.width, a.height);
    let count = count_patterns(&spec, &w, a.margin)?;
    let (width, height) = (
        a.width,
        if spec.dimension() == 1 {
            1
        } else {
            a.height.unwrap_or(a.width)
        },
    );
    out.json(
        "count.json",
        &json!({
            "spec": spec.name().unwrap_or("unnamed"),
            "dimension": spec.dimension(),
            "window": [width, height],
            "margin": a.margin,
            "count": count.to_string(),
        }),
    )?;
    if a.grid {
        let grid = count_grid(&spec, width as usize, height as usize, a.margin)?;
        out.json("grid.json", &grid)?;
    }
    println!("{count}");
    Ok(Status::Ok)
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToeplitzArgs {
    /// Sequence prefix, with an optional `~c` constant tail.
    #[arg(long)]
    pub alpha: String,
    /// Alphabet letters; defaults to the distinct letters of `alpha`.
    #[arg(long)]
    #[serde(default)]
    pub alphabet: Option<String>,
    /// Net choices, one 0/1 per level, padded with 0 to the needed depth.
    #[arg(long, default_value = "")]
    #[serde(default)]
    pub choices: String,
    /// Window length, a power of two.
    #[arg(long)]
    pub length: usize,
    /// Letter on the uncovered cell; defaults to the first letter.
    #[arg(long)]
    #[serde(default)]
    pub hole: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub decode: bool,
}

fn toeplitz(a: &ToeplitzArgs, out: &mut Output) -> Result<Status> {
    let letters = match &a.alphabet {
        Some(l) => l.clone(),
        None => {
            let mut l: Vec<char> = a
                .alpha
                .chars()
                .filter(|&c| c != '~' && !c.is_whitespace())
                .collect();
            l.sort_unstable();
            l.dedup();
            l.into_iter().collect()
        }
    };
    let alphabet = Alphabet::from_chars(&letters)?;
    let alpha = SymbolSequence::parse(alphabet.clone(), &a.alpha)?;
    let depth = power_of_two_exponent(a.length)?;
    let mut choices = bits(&a.choices, "choices")?;
    if choices.len() < depth.max(1) {
        choices.resize(depth.max(1), 0);
    }
    let net = build_one_net(&choices)?;
    let hole = match &a.hole {
        Some(h) => alphabet.sym(h)?,
        None => 0,
    };
    let w = generate_toeplitz_window(&alpha, &net, a.length, hole)?;
    let word = w.render();
    let decoded = if a.decode {
        Some(match decode_density_prefix(&w.letters)? {
            Decoded::Word(v) => json!({ "word": alphabet.format_word(&v) }),
            Decoded::NotToeplitz { level } => json!({ "not_toeplitz": level }),
        })
    } else {
        None
    };
    out.json(
        "toeplitz.json",
        &json!({
            "alpha": alpha.render(),
            "alphabet": alphabet.symbols(),
            "net": net.offsets(),
            "length": a.length,
            "word": word,
            "decoded": decoded,
        }),
    )?;
    println!("{word}");
    if let Some(d) = &decoded {
        println!(
            "decoded: {}",
            d.get("word")
                .and_then(Value::as_str)
                .unwrap_or("not Toeplitz")
        );
    }
    Ok(Status::Ok)
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobinsonArgs {
    /// Side of the square window.
    #[arg(long)]
    pub size: usize,
    /// Highest cross-net level to check.
    #[arg(long, default_value_t = 3)]
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// Branching budget of the tiler.
    #[arg(long, default_value_t = 1_000_000)]
    #[serde(default = "default_nodes")]
    pub nodes: u64,
}

fn default_levels() -> usize {
    3
}

fn default_nodes() -> u64 {
    1_000_000
}

fn robinson(a: &RobinsonArgs, out: &mut Output) -> Result<Status> {
    let set = robinson_set();
    let tiling = match tile_rectangle(&set.spec, a.size, a.size, &Boundary::Free, a.nodes)? {
        TilingOutcome::Tiled(t) => t,
        TilingOutcome::Untileable => {
            out.json("net.json", &json!({ "untileable": true }))?;
            println!("untileable");
            return Ok(Status::Violation);
        }
    };
    out.text("tiling.json", &(tiling.to_json()? + "\n"))?;
    out.bytes("tiling.pgm", &tiling_pgm(&tiling, set.tiles.len())?)?;
    out.bytes(
        "crosses.ppm",
        &cross_highlight_ppm(&tiling, &set.crosses, set.tiles.len())?,
    )?;
    let report = verify_cross_net(&tiling, &set.crosses, a.levels, NET_BORDER)?;
    out.json("net.json", &report)?;
    for l in &report.levels {
        println!(
            "level {} period {}: {}",
            l.level,
            l.period,
            if l.consistent {
                "consistent"
            } else {
                "inconsistent"
            }
        );
    }
    Ok(Status::from_pass(report.consistent()))
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Largest window side.
    #[arg(long)]
    pub r_max: usize,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub margin: usize,
}

fn entropy(a: &EntropyArgs, out: &mut Output) -> Result<Status> {
    let spec = load_spec(&a.spec)?;
    let report = entropy_series(&spec, a.r_max, a.margin)?;
    out.json("entropy.json", &report)?;
    out.text("series.tsv", &series_tsv(&report.samples))?;
    for s in &report.samples {
        println!("{}\t{}\t{}", s.size, s.count, s.bits);
    }
    Ok(Status::Ok)
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Periodic,
    Shrinking,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    Xor,
    Shift,
    Identity,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaArgs {
    /// Rule file (JSON lookup table).
    #[arg(long, group = "source")]
    #[serde(default)]
    pub rule: Option<PathBuf>,
    /// Built-in rule over {0, 1}.
    #[arg(long, group = "source")]
    #[serde(default)]
    pub builtin: Option<Builtin>,
    /// Derive the rule from a south-deterministic 2D spec.
    #[arg(long, group = "source")]
    #[serde(default)]
    pub sft: Option<PathBuf>,
    /// Radius used with `--sft`.
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_radius")]
    pub radius: usize,
    /// Initial row.
    #[arg(long)]
    pub init: String,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Mode::Periodic)]
    #[serde(default = "default_mode")]
    pub mode: Mode,
}

fn default_radius() -> usize {
    1
}

fn default_mode() -> Mode {
    Mode::Periodic
}

fn ca(a: &CaArgs, out: &mut Output) -> Result<Status> {
    let rule: CaRule = match (&a.rule, a.builtin, &a.sft) {
        (Some(path), None, None) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            CaRule::from_json(&text).with_context(|| format!("parsing rule {}", path.display()))?
        }
        (None, Some(b), None) => match b {
            Builtin::Xor => xor_ca(),
            Builtin::Shift => shift_rule(Alphabet::from_chars("01")?),
            Builtin::Identity => identity_rule(Alphabet::from_chars("01")?),
        },
        (None, None, Some(path)) => ca_from_sft(&load_spec(path)?, a.radius)?,
        _ => bail!("give exactly one of --rule, --builtin and --sft"),
    };
    let init = rule.alphabet().parse_word(&a.init)?;
    let mode = match a.mode {
        Mode::Periodic => RowMode::Periodic,
        Mode::Shrinking => RowMode::Shrinking,
    };
    let block = rule.space_time(&init, a.steps, mode)?;
    out.text("rule.json", &(rule.to_json()? + "\n"))?;
    out.json("spacetime.json", &block)?;
    out.bytes(
        "spacetime.pgm",
        &space_time_pgm(&block, rule.alphabet().len())?,
    )?;
    for row in block.rows.iter().rev() {
        println!("{}", rule.alphabet().format_word(row));
    }
    Ok(Status::Ok)
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Projection to {0, 1}, one digit per letter.
    #[arg(long)]
    pub projection: String,
    /// Largest window length (side, for 2D specs).
    #[arg(long)]
    pub length: u32,
    /// Most base patterns to enumerate per window.
    #[arg(long, default_value_t = 1 << 22)]
    #[serde(default = "default_limit")]
    pub limit: usize,
}

fn default_limit() -> usize {
    1 << 22
}

fn split(a: &SplitArgs, out: &mut Output) -> Result<Status> {
    let spec = load_spec(&a.spec)?;
    let projection = bits(&a.projection, "projection")?;
    let mut rows = Vec::new();
    let mut pass = true;
    for n in 1..=a.length {
        let id = split_count_identity(&spec, &projection, &window(&spec, n, None), a.limit)?;
        println!(
            "{n}\t{}\t{}\t{}",
            id.left,
            id.right,
            if id.holds { "holds" } else { "fails" }
        );
        pass &= id.holds;
        rows.push(json!({ "length": n, "identity": id }));
    }
    out.json("split.json", &json!({ "holds": pass, "windows": rows }))?;
    Ok(Status::from_pass(pass))
}

/// A macrotile row with its neighbours and the machine it simulates.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacrotileFixture {
    pub grid: MacrotileGrid,
    pub neighbors: Neighbors,
    pub machine: MachineDocument,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacrotileArgs {
    /// Fixture file (grid, neighbours, machine).
    #[arg(long, group = "source")]
    #[serde(default)]
    pub fixture: Option<PathBuf>,
    /// Build the standard consistent fixture at this level instead.
    #[arg(long, group = "source")]
    #[serde(default)]
    pub example: Option<u32>,
    /// Width constant of the built fixture.
    #[arg(long, default_value_t = 5)]
    #[serde(default = "default_c1")]
    pub c1: u64,
    /// Step budget; defaults to the worktime of the level.
    #[arg(long)]
    #[serde(default)]
    pub budget: Option<u64>,
}

fn default_c1() -> u64 {
    5
}

/// Consistent row at level `n`: a Toeplitz Check row, a one-entry program
/// keeping the centre letter, and neighbours at addresses 0 and 2.
fn example_fixture(n: u32, c1: u64) -> Result<MacrotileFixture> {
    let machine = never_halts(&["0", "1"])?;
    let width = usize::try_from(
        c1.checked_mul(3u64.checked_pow(n).context("level too large")?)
            .context("width overflow")?,
    )?;
    let len = width.next_power_of_two();
    let choices = vec![0; len.trailing_zeros().max(1) as usize];
    let alpha = SymbolSequence::parse(Alphabet::from_chars("01")?, "1011001011~0")?;
    let row = generate_toeplitz_window(&alpha, &build_one_net(&choices)?, len, 0)?;
    let check: Vec<u8> = row.letters[..width].iter().map(|&s| s as u8).collect();
    let own = check[0];
    let prog = vec![0, own, 0, own];
    let prog_text: String = prog.iter().map(|b| char::from(b'0' + b)).collect();
    let describe = |addr, check| -> String {
        let tile = NextTile {
            level: n + 1,
            addr,
            age: 0,
            prog: prog.clone(),
            check,
        };
        tile.encode().iter().map(|g| g.to_char()).collect()
    };
    let neighbors = Neighbors {
        left: describe(0, 0),
        right: describe(2, 0),
    };
    let build = |c2| {
        init_grid(
            n,
            &ScheduleParams::new(c1, c2)?,
            &describe(1, own),
            &check,
            &prog_text,
        )
    };
    let c2 = feasibility(&build(1)?, &neighbors, &machine)?.c2;
    Ok(MacrotileFixture {
        grid: build(c2)?,
        neighbors,
        machine: machine.to_document(),
    })
}

fn macrotile(a: &MacrotileArgs, out: &mut Output) -> Result<Status> {
    let fixture = match (&a.fixture, a.example) {
        (Some(path), None) => load_json::<MacrotileFixture>(path)?,
        (None, Some(n)) => example_fixture(n, a.c1)?,
        _ => bail!("give exactly one of --fixture and --example"),
    };
    let machine: DensityMachine = fixture.machine.clone().into_machine()?;
    let mut grid = fixture.grid.clone();
    let (_, worktime) = grid.params.dims(grid.level)?;
    let budget = a.budget.unwrap_or(worktime);
    let run = run_schedule(&mut grid, &fixture.neighbors, &machine, budget)?;
    out.json("fixture.json", &fixture)?;
    out.json("run.json", &run)?;
    out.text("grid.json", &(grid.to_json()? + "\n"))?;
    out.bytes("heatmap.pgm", &grid.heatmap_pgm()?)?;
    for t in &run.traces {
        println!("phase {} {}: {} steps", t.phase, t.name, t.steps);
    }
    println!(
        "total {} of {} steps: {:?}",
        run.total_steps, run.worktime, run.outcome
    );
    Ok(Status::from_pass(run.outcome == ScheduleOutcome::Completed))
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleArgs {
    pub c1: u64,
    pub c2: u64,
    pub n_max: u32,
}

fn schedule(a: &ScheduleArgs, out: &mut Output) -> Result<Status> {
    let report = validate_schedule(&ScheduleParams::new(a.c1, a.c2)?, a.n_max)?;
    out.json("schedule.json", &report)?;
    for c in &report.checks {
        println!(
            "{}: {}",
            c.name,
            if c.passes {
                "pass".to_string()
            } else {
                format!("fails at {:?}", c.failing_levels)
            }
        );
    }
    Ok(Status::from_pass(report.all_pass))
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySimArgs {
    /// Count grid of the simulating spec.
    #[arg(long, requires = "y")]
    #[serde(default)]
    pub x: Option<PathBuf>,
    /// Count grid of the simulated spec.
    #[arg(long)]
    #[serde(default)]
    pub y: Option<PathBuf>,
    /// Simulated spec; the simulating one is its exact block substitution.
    #[arg(long, conflicts_with_all = ["x", "y"])]
    #[serde(default)]
    pub blowup: Option<PathBuf>,
    #[arg(long)]
    pub block_width: usize,
    #[arg(long)]
    pub block_height: usize,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub radius: usize,
    #[arg(long)]
    pub k_max: usize,
    #[arg(long)]
    pub r_max: usize,
}

fn verify_sim(a: &VerifySimArgs, out: &mut Output) -> Result<Status> {
    let (b, t, l) = (a.block_width, a.block_height, a.radius);
    let report = match (&a.x, &a.y, &a.blowup) {
        (Some(x), Some(y), None) => {
            let (x, y): (CountGrid, CountGrid) = (load_json(x)?, load_json(y)?);
            verify_simulation_bound(&x, &y, b, t, l, a.k_max, a.r_max)?
        }
        (None, None, Some(spec)) => {
            verify_block_substitution(&load_spec(spec)?, b, t, l, a.k_max, a.r_max)?
        }
        _ => bail!("give either --x and --y, or --blowup"),
    };
    out.json("simulation.json", &report)?;
    match report.first_violation {
        None => println!("all {} cells pass", report.cells.len()),
        Some((k, r)) => println!("bound fails at ({k}, {r})"),
    }
    Ok(Status::from_pass(report.pass))
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlicesArgs {
    /// One slice word per line.
    #[arg(long)]
    pub stack: PathBuf,
    /// Machine files of the family; defaults to three machines that never halt.
    #[arg(long = "machine")]
    #[serde(default)]
    pub machines: Vec<PathBuf>,
    /// Steps granted to each machine.
    #[arg(long, default_value_t = 4)]
    #[serde(default = "default_budget")]
    pub budget: usize,
}

fn default_budget() -> usize {
    4
}

fn slices(a: &SlicesArgs, out: &mut Output) -> Result<Status> {
    let text =
        fs::read_to_string(&a.stack).with_context(|| format!("reading {}", a.stack.display()))?;
    let stack = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| SWord::parse(l.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let family = if a.machines.is_empty() {
        (0..3)
            .map(|_| never_halts(&["0", "1"]))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        a.machines
            .iter()
            .map(|p| {
                load_json::<MachineDocument>(p)?
                    .into_machine()
                    .map_err(Into::into)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let form = verify_slice_stack(&stack, &family, a.budget)?;
    let label = match &form {
        SliceForm::A => "form A".to_string(),
        SliceForm::B { .. } => "form B".to_string(),
        SliceForm::C => "form C".to_string(),
        SliceForm::Violation { index, .. } => format!("violation at slice {index}"),
    };
    out.json("slices.json", &json!({ "label": label, "result": form }))?;
    println!("{label}");
    Ok(Status::from_pass(!matches!(
        form,
        SliceForm::Violation { .. }
    )))
}
