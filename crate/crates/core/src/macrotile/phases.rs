use std::collections::VecDeque;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::grid::{AgentState, MacrotileGrid};
use super::tile::{pad_row, parse_glyphs, Glyph, Layout, NextTile};
use crate::error::{Error, Result};
use crate::toeplitz::{DensityMachine, MachineRun};

pub const PHASE_NAMES: [&str; 7] = [
    "send-mail",
    "check-level",
    "check-coordinates",
    "transmit-check",
    "check-input",
    "force-self-similarity",
    "update-state",
];

/// Description words of the macrotiles on either side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Neighbors {
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Ok,
    Reject { cell: Option<usize>, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTrace {
    pub phase: u8,
    pub name: String,
    /// Exact step tally: agent moves, in-place agent actions and
    /// synchronous track updates.
    pub steps: u64,
    /// Step tallies of the sub-operations, in order.
    pub parts: Vec<u64>,
    /// Cells the agent visited, for information.
    pub space: usize,
    pub verdict: Verdict,
}

impl PhaseTrace {
    pub fn is_ok(&self) -> bool {
        self.verdict == Verdict::Ok
    }
}

/// Step accounting for one phase.
struct Tally<'a> {
    grid: &'a mut MacrotileGrid,
    steps: u64,
    reach: usize,
    parts: Vec<u64>,
    mark: u64,
}

type Checked<T> = std::result::Result<T, (Option<usize>, String)>;

fn reject<T>(cell: usize, reason: impl Into<String>) -> Checked<T> {
    Err((Some(cell), reason.into()))
}

impl<'a> Tally<'a> {
    fn walk_to(&mut self, x: usize) {
        let at = self.grid.agent.position;
        self.steps += at.abs_diff(x) as u64;
        self.grid.agent.position = x;
        self.reach = self.reach.max(x + 1);
    }

    /// One action without moving.
    fn act(&mut self) {
        self.steps += 1;
    }

    fn sync(&mut self, steps: u64) {
        self.steps += steps;
    }

    fn part(&mut self) {
        self.parts.push(self.steps - self.mark);
        self.mark = self.steps;
    }

    fn width(&self) -> usize {
        self.grid.width()
    }
}

fn parse_info(row: &[Glyph], what: &str) -> Checked<(NextTile, Layout)> {
    NextTile::parse(row).map_err(|(cell, e)| (Some(cell), format!("{what}: {e}")))
}

fn mail_row(track: impl Iterator<Item = Option<Glyph>>, what: &str) -> Checked<Vec<Glyph>> {
    track
        .enumerate()
        .map(|(x, g)| g.ok_or((Some(x), format!("{what} is empty"))))
        .collect()
}

fn neighbor_row(word: &str, width: usize) -> Result<Vec<Glyph>> {
    pad_row(&parse_glyphs(word)?, width)
}

fn next_dims(grid: &MacrotileGrid) -> Result<(u64, u64)> {
    grid.params.dims(grid.level + 1)
}

/// Executes one workperiod in place.
pub fn run_phase(
    grid: &mut MacrotileGrid,
    phase: u8,
    neighbors: &Neighbors,
    machine: &DensityMachine,
) -> Result<PhaseTrace> {
    if let AgentState::Rejected(p) = grid.agent.state {
        return Err(Error::InvalidInput(format!(
            "worktime already rejected in phase {p}"
        )));
    }
    if !(1..=7).contains(&phase) || phase != grid.phase + 1 {
        return Err(Error::InvalidInput(format!(
            "phase {phase} cannot follow phase {}",
            grid.phase
        )));
    }
    let left = neighbor_row(&neighbors.left, grid.width())?;
    let right = neighbor_row(&neighbors.right, grid.width())?;
    let next = next_dims(grid)?;
    grid.agent.state = AgentState::Working(phase);
    let mut tally = Tally {
        grid,
        steps: 0,
        reach: 0,
        parts: Vec::new(),
        mark: 0,
    };
    let outcome = match phase {
        1 => send_mail(&mut tally, &left, &right),
        2 => check_level(&mut tally),
        3 => check_coordinates(&mut tally, next),
        4 => transmit_check(&mut tally),
        5 => check_input(&mut tally, machine),
        6 => force_self_similarity(&mut tally),
        _ => update_state(&mut tally, next),
    };
    let Tally {
        grid,
        steps,
        reach,
        parts,
        ..
    } = tally;
    grid.time += steps;
    for c in &mut grid.cells {
        c.age += steps;
    }
    let verdict = match outcome {
        Ok(()) => {
            grid.phase = phase;
            grid.agent.state = if phase == 7 {
                AgentState::Done
            } else {
                AgentState::Ready
            };
            Verdict::Ok
        }
        Err((cell, reason)) => {
            grid.agent.state = AgentState::Rejected(phase);
            Verdict::Reject { cell, reason }
        }
    };
    Ok(PhaseTrace {
        phase,
        name: PHASE_NAMES[phase as usize - 1].into(),
        steps,
        parts,
        space: reach,
        verdict,
    })
}

/// Every tile copies its description letter into a mail track, then the
/// tracks shift one cell per step for `B` steps: Lmail to the right,
/// Rmail to the left. Afterwards each track holds a neighbour's row.
fn send_mail(t: &mut Tally, left: &[Glyph], right: &[Glyph]) -> Checked<()> {
    let b = t.width();
    if let Some(x) = t.grid.cells.iter().position(|c| c.lmail.is_some()) {
        return reject(x, "Lmail track is not clear");
    }
    if let Some(x) = t.grid.cells.iter().position(|c| c.rmail.is_some()) {
        return reject(x, "Rmail track is not clear");
    }
    let info = t.grid.info_row();
    let mut track: VecDeque<Glyph> = info.iter().copied().collect();
    t.sync(1);
    for s in 0..b {
        track.pop_back();
        track.push_front(left[b - 1 - s]);
        t.sync(1);
    }
    for (c, g) in t.grid.cells.iter_mut().zip(&track) {
        c.lmail = Some(*g);
    }
    t.part();
    let mut track: VecDeque<Glyph> = info.iter().copied().collect();
    t.sync(1);
    for &g in right {
        track.pop_front();
        track.push_back(g);
        t.sync(1);
    }
    for (c, g) in t.grid.cells.iter_mut().zip(&track) {
        c.rmail = Some(*g);
    }
    t.part();
    Ok(())
}

/// The description must open with `1^(n+1)/`; Level is `1^n` on every tile.
fn check_level(t: &mut Tally) -> Checked<()> {
    let level = t.grid.cells[0].level.clone();
    if level.is_empty() || level.chars().any(|c| c != '1') {
        return reject(0, "Level is not a unary word");
    }
    if let Some(x) = t.grid.cells.iter().position(|c| c.level != level) {
        return reject(x, "Level differs between tiles");
    }
    let n = level.len();
    if n != t.grid.level as usize {
        return reject(
            0,
            format!("Level 1^{n} on a row built for level {}", t.grid.level),
        );
    }
    for x in 0..=n + 1 {
        if x >= t.width() {
            return reject(t.width() - 1, "description row too short for the level");
        }
        t.walk_to(x);
        let want = if x <= n { Glyph::One } else { Glyph::Slash };
        if t.grid.cells[x].info != want {
            return reject(
                x,
                format!(
                    "Info is {} where the next level expects {want}",
                    t.grid.cells[x].info
                ),
            );
        }
    }
    t.part();
    let row = t.grid.info_row();
    let (_, layout) = parse_info(&row, "malformed description")?;
    t.walk_to(layout.end.min(t.width() - 1));
    t.walk_to(0);
    t.part();
    Ok(())
}

fn number_bits(v: u64) -> Vec<Glyph> {
    format!("{v:b}")
        .chars()
        .map(|c| Glyph::bit(c == '1'))
        .collect()
}

/// Writes `value` in binary on the Work track, with the cost of deriving it
/// by repeated tripling.
fn write_work(t: &mut Tally, value: u64, passes: &[BigUint]) -> Checked<usize> {
    let digits = number_bits(value);
    if digits.len() > t.width() {
        return reject(
            t.width() - 1,
            "Work track too short for the schedule constant",
        );
    }
    if let Some(x) = t.grid.cells[..digits.len()]
        .iter()
        .position(|c| c.work.is_some())
    {
        return reject(x, "Work track is not blank");
    }
    for p in passes {
        let end = (p.bits() as usize).min(t.width()).max(1) - 1;
        t.walk_to(end);
        t.walk_to(0);
    }
    for (x, d) in digits.iter().enumerate() {
        t.walk_to(x);
        t.grid.cells[x].work = Some(d.to_string());
    }
    t.walk_to(0);
    Ok(digits.len())
}

fn clear_work(t: &mut Tally, len: usize) {
    for x in 0..len {
        t.walk_to(x);
        t.grid.cells[x].work = None;
    }
    t.walk_to(0);
}

/// Local coordinate constraints, then `Addr′ = left Addr′ + 1 mod B(n+1)`
/// and `Age′ = left Age′`.
fn check_coordinates(t: &mut Tally, (next_b, next_t): (u64, u64)) -> Checked<()> {
    if let Some(x) = t
        .grid
        .cells
        .iter()
        .enumerate()
        .position(|(x, c)| c.addr != x as u64)
    {
        return reject(x, "Addr does not increase by one");
    }
    let age = t.grid.cells[0].age;
    if let Some(x) = t.grid.cells.iter().position(|c| c.age != age) {
        return reject(x, "Age differs along the row");
    }
    let (own, own_layout) = parse_info(&t.grid.info_row(), "malformed description")?;
    let lrow = mail_row(t.grid.cells.iter().map(|c| c.lmail), "Lmail")?;
    let (left, left_layout) = parse_info(&lrow, "malformed left description")?;
    let rrow = mail_row(t.grid.cells.iter().map(|c| c.rmail), "Rmail")?;
    parse_info(&rrow, "malformed right description")?;

    let params = t.grid.params.clone();
    let mut passes: Vec<BigUint> = Vec::new();
    let mut v = BigUint::from(params.c1);
    for _ in 0..=t.grid.level {
        v *= 3u32;
        passes.push(v.clone());
    }
    let len = write_work(t, next_b, &passes)?;
    t.part();
    t.walk_to(
        own_layout
            .field_end(1)
            .max(left_layout.field_end(1))
            .min(t.width() - 1),
    );
    t.walk_to(0);
    if own.addr >= next_b || left.addr >= next_b {
        return reject(own_layout.start(1), format!("Addr′ outside [0, {next_b})"));
    }
    if own.addr != (left.addr + 1) % next_b {
        return reject(
            own_layout.start(1),
            format!(
                "Addr′ {} does not follow left Addr′ {}",
                own.addr, left.addr
            ),
        );
    }
    clear_work(t, len);
    t.part();
    let len = write_work(t, next_t, &[BigUint::from(next_t)])?;
    t.part();
    t.walk_to(
        own_layout
            .field_end(2)
            .max(left_layout.field_end(2))
            .min(t.width() - 1),
    );
    t.walk_to(0);
    if own.age >= next_t {
        return reject(own_layout.start(2), format!("Age′ outside [0, {next_t})"));
    }
    if own.age != left.age {
        return reject(
            own_layout.start(2),
            format!("Age′ {} differs from left Age′ {}", own.age, left.age),
        );
    }
    clear_work(t, len);
    t.part();
    Ok(())
}

/// `Check′` must equal the Check letter at address 0.
fn transmit_check(t: &mut Tally) -> Checked<()> {
    let (own, layout) = parse_info(&t.grid.info_row(), "malformed description")?;
    t.walk_to(0);
    t.act();
    let bit = t.grid.cells[0].check;
    let at = layout.start(4);
    t.walk_to(at);
    if own.check != bit {
        return reject(
            at,
            format!("Check′ {} differs from Check {bit} at address 0", own.check),
        );
    }
    t.walk_to(0);
    t.part();
    Ok(())
}

/// `n` steps of the machine on the Check row with Work as scratch; the
/// row is rejected iff the machine halts.
fn check_input(t: &mut Tally, machine: &DensityMachine) -> Checked<()> {
    if let Some(x) = t.grid.cells.iter().position(|c| c.work.is_some()) {
        return reject(x, "Work track is not blank");
    }
    let names: Vec<String> = t.grid.cells.iter().map(|c| c.check.to_string()).collect();
    let input: Vec<&str> = names.iter().map(String::as_str).collect();
    let n = t.grid.level as usize;
    let run = machine.run_with_tape(&input, n);
    let executed = match run.run {
        MachineRun::Halted { steps } => steps,
        MachineRun::Running { steps } => steps,
    };
    t.sync(executed as u64);
    if run.reach >= t.width() {
        return reject(t.width() - 1, "machine left the row");
    }
    t.reach = t.reach.max(run.reach + 1);
    t.grid.agent.position = run.head;
    for x in 0..=run.reach.min(run.tape.len().saturating_sub(1)) {
        t.grid.cells[x].work = Some(machine.tape().name(run.tape[x]).to_string());
    }
    t.part();
    if let MachineRun::Halted { steps } = run.run {
        return reject(
            run.head,
            format!("machine halted after {steps} of {n} steps"),
        );
    }
    t.walk_to(0);
    t.part();
    Ok(())
}

/// `Prog′` on the description row must spell the Prog track exactly.
fn force_self_similarity(t: &mut Tally) -> Checked<()> {
    let (own, layout) = parse_info(&t.grid.info_row(), "malformed description")?;
    let start = layout.start(3);
    for (i, &bit) in own.prog.iter().enumerate() {
        t.walk_to(i);
        let letter = t.grid.cells[i].prog;
        t.walk_to(start + i);
        if letter != Glyph::bit(bit == 1) {
            return reject(i, format!("Prog letter {i} is {letter}, Prog′ has {bit}"));
        }
    }
    let p = own.prog.len();
    if p < t.width() {
        t.walk_to(p);
        if t.grid.cells[p].prog != Glyph::Sharp {
            return reject(p, "Prog is longer than Prog′");
        }
    }
    t.walk_to(0);
    t.part();
    Ok(())
}

/// Looks up `(left Check′, Check′, right Check′)` in the program, writes
/// the result, increments `Age′` modulo `T(n+1)` and clears the scratch tracks.
fn update_state(t: &mut Tally, (_, next_t): (u64, u64)) -> Checked<()> {
    let (own, layout) = parse_info(&t.grid.info_row(), "malformed description")?;
    let lrow = mail_row(t.grid.cells.iter().map(|c| c.lmail), "Lmail")?;
    let (left, left_layout) = parse_info(&lrow, "malformed left description")?;
    let rrow = mail_row(t.grid.cells.iter().map(|c| c.rmail), "Rmail")?;
    let (right, right_layout) = parse_info(&rrow, "malformed right description")?;
    t.walk_to(left_layout.start(4));
    t.walk_to(layout.start(4));
    t.walk_to(right_layout.start(4));
    t.part();
    let prog: Vec<u8> = t.grid.cells.iter().map_while(|c| c.prog.as_bit()).collect();
    let triple = [left.check, own.check, right.check];
    let found = NextTile::lookup(&prog, triple);
    let scanned = found.map_or(prog.len(), |(e, _)| 4 * e + 4);
    t.walk_to(0);
    t.walk_to(scanned.max(1) - 1);
    t.part();
    let Some((_, out)) = found else {
        return reject(
            scanned.max(1) - 1,
            format!("no program entry for {triple:?}"),
        );
    };
    let next = NextTile {
        age: (own.age + 1) % next_t,
        check: out,
        ..own
    };
    let word = next.encode();
    if word.len() > t.width() {
        return reject(t.width() - 1, "next description overflows the row");
    }
    let row = pad_row(&word, t.width()).expect("length checked");
    let last = layout.end.max(word.len()).min(t.width());
    for x in layout.start(2)..last {
        if t.grid.cells[x].info != row[x] {
            t.walk_to(x);
            t.grid.cells[x].info = row[x];
        }
    }
    t.part();
    for c in &mut t.grid.cells {
        c.lmail = None;
        c.rmail = None;
    }
    t.sync(1);
    let used = t
        .grid
        .cells
        .iter()
        .rposition(|c| c.work.is_some())
        .map_or(0, |x| x + 1);
    clear_work(t, used);
    t.part();
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ScheduleOutcome {
    Completed,
    Rejected {
        phase: u8,
        cell: Option<usize>,
        reason: String,
    },
    /// The phases need more steps than the worktime provides.
    Infeasible {
        needed: u64,
        worktime: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleRun {
    pub level: u32,
    pub width: u64,
    pub worktime: u64,
    pub total_steps: u64,
    pub traces: Vec<PhaseTrace>,
    pub outcome: ScheduleOutcome,
}

fn run_remaining(
    grid: &mut MacrotileGrid,
    neighbors: &Neighbors,
    machine: &DensityMachine,
    cap: u64,
) -> Result<(Vec<PhaseTrace>, u64, Option<ScheduleOutcome>)> {
    let mut traces = Vec::new();
    let mut total = 0u64;
    for phase in grid.phase + 1..=7 {
        let trace = run_phase(grid, phase, neighbors, machine)?;
        total += trace.steps;
        let verdict = trace.verdict.clone();
        traces.push(trace);
        if let Verdict::Reject { cell, reason } = verdict {
            return Ok((
                traces,
                total,
                Some(ScheduleOutcome::Rejected {
                    phase,
                    cell,
                    reason,
                }),
            ));
        }
        if total > cap {
            return Ok((
                traces,
                total,
                Some(ScheduleOutcome::Infeasible {
                    needed: total,
                    worktime: cap,
                }),
            ));
        }
    }
    Ok((traces, total, None))
}

/// Runs the remaining phases in order, stopping at the first rejection or
/// once `budget` steps are spent.
pub fn run_schedule(
    grid: &mut MacrotileGrid,
    neighbors: &Neighbors,
    machine: &DensityMachine,
    budget: u64,
) -> Result<ScheduleRun> {
    let (width, worktime) = grid.params.dims(grid.level)?;
    if budget < worktime {
        return Err(Error::InvalidInput(format!(
            "budget {budget} below the worktime {worktime}"
        )));
    }
    let (traces, total_steps, stopped) = run_remaining(grid, neighbors, machine, budget)?;
    let outcome = match stopped {
        Some(ScheduleOutcome::Infeasible { needed, .. }) => {
            ScheduleOutcome::Infeasible { needed, worktime }
        }
        Some(o) => o,
        None if total_steps > worktime => ScheduleOutcome::Infeasible {
            needed: total_steps,
            worktime,
        },
        None => ScheduleOutcome::Completed,
    };
    Ok(ScheduleRun {
        level: grid.level,
        width,
        worktime,
        total_steps,
        traces,
        outcome,
    })
}

/// Smallest `c2` whose worktime covers the phases of a fresh copy of `grid`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    pub level: u32,
    pub width: u64,
    pub c2: u64,
    pub steps: u64,
    pub worktime: u64,
    pub outcome: ScheduleOutcome,
}

pub fn feasibility(
    grid: &MacrotileGrid,
    neighbors: &Neighbors,
    machine: &DensityMachine,
) -> Result<Feasibility> {
    let mut c2 = 1u64;
    loop {
        let mut g = grid.clone();
        g.params.c2 = c2;
        let (width, worktime) = g.params.dims(g.level)?;
        let (_, steps, stopped) = run_remaining(&mut g, neighbors, machine, u64::MAX)?;
        if steps <= worktime && worktime > 1 {
            let outcome = stopped.unwrap_or(ScheduleOutcome::Completed);
            return Ok(Feasibility {
                level: g.level,
                width,
                c2,
                steps,
                worktime,
                outcome,
            });
        }
        c2 = (c2 + 1).max(steps.div_ceil(width));
    }
}
