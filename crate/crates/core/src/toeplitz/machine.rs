//! Table-driven Turing machines over one-sided tapes and the wrapper that
//! runs them on decoded Toeplitz prefixes.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::decode::{decode_density_prefix, Decoded};
use crate::entropy::Pi1Stream;
use crate::error::{Error, Result};
use crate::symbolic::{Alphabet, Sym};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub write: Sym,
    pub step: Move,
    pub next: usize,
}

/// A deterministic machine. One transition is one step; a missing
/// transition leaves the machine idling forever (it never halts). Input
/// letters outside the tape alphabet make it halt before the first step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityMachine {
    name: String,
    states: Vec<String>,
    tape: Alphabet,
    blank: Sym,
    start: usize,
    halt: usize,
    table: HashMap<(usize, Sym), Transition>,
}

/// Result of running a machine for a bounded number of steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MachineRun {
    Halted { steps: usize },
    Running { steps: usize },
}

/// Bounded run together with the final tape and head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeRun {
    pub run: MachineRun,
    pub tape: Vec<Sym>,
    pub head: usize,
    /// Rightmost cell the head visited.
    pub reach: usize,
}

impl DensityMachine {
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        tape: Alphabet,
        blank: Sym,
        start: usize,
        halt: usize,
        table: HashMap<(usize, Sym), Transition>,
    ) -> Result<Self> {
        let n = states.len();
        if start >= n || halt >= n {
            return Err(Error::InvalidInput(
                "start or halt state out of range".into(),
            ));
        }
        if !tape.contains(blank) {
            return Err(Error::InvalidInput("blank outside tape alphabet".into()));
        }
        for (&(q, s), t) in &table {
            if q >= n || t.next >= n || !tape.contains(s) || !tape.contains(t.write) {
                return Err(Error::InvalidInput(
                    "transition refers to unknown state or symbol".into(),
                ));
            }
            if q == halt {
                return Err(Error::InvalidInput(
                    "halt state has outgoing transitions".into(),
                ));
            }
        }
        Ok(DensityMachine {
            name: name.into(),
            states,
            tape,
            blank,
            start,
            halt,
            table,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tape(&self) -> &Alphabet {
        &self.tape
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Runs on the named input letters for at most `max_steps` steps.
    pub fn run(&self, input: &[&str], max_steps: usize) -> MachineRun {
        self.run_with_tape(input, max_steps).run
    }

    /// Like [`DensityMachine::run`], also returning the final tape.
    pub fn run_with_tape(&self, input: &[&str], max_steps: usize) -> TapeRun {
        let mut tape = Vec::with_capacity(input.len() + 1);
        for name in input {
            match self.tape.index(name) {
                Some(s) => tape.push(s),
                None => {
                    return TapeRun {
                        run: MachineRun::Halted { steps: 0 },
                        tape,
                        head: 0,
                        reach: 0,
                    }
                }
            }
        }
        let (mut head, mut state, mut reach) = (0usize, self.start, 0usize);
        let mut run = if state == self.halt {
            MachineRun::Halted { steps: max_steps }
        } else {
            MachineRun::Running { steps: max_steps }
        };
        for step in 0..max_steps {
            if state == self.halt {
                run = MachineRun::Halted { steps: step };
                break;
            }
            if head == tape.len() {
                tape.push(self.blank);
            }
            let Some(t) = self.table.get(&(state, tape[head])) else {
                run = MachineRun::Running { steps: max_steps };
                break;
            };
            tape[head] = t.write;
            match t.step {
                Move::L => head = head.saturating_sub(1),
                Move::R => head += 1,
                Move::S => {}
            }
            reach = reach.max(head);
            state = t.next;
            run = if state == self.halt {
                MachineRun::Halted { steps: step + 1 }
            } else {
                MachineRun::Running { steps: step + 1 }
            };
        }
        TapeRun {
            run,
            tape,
            head,
            reach,
        }
    }

    pub fn to_document(&self) -> MachineDocument {
        let mut transitions: Vec<TransitionDocument> = self
            .table
            .iter()
            .map(|(&(q, s), t)| TransitionDocument {
                state: self.states[q].clone(),
                read: self.tape.name(s).to_string(),
                write: self.tape.name(t.write).to_string(),
                step: t.step,
                next: self.states[t.next].clone(),
            })
            .collect();
        transitions.sort_by(|a, b| (&a.state, &a.read).cmp(&(&b.state, &b.read)));
        MachineDocument {
            name: self.name.clone(),
            states: self.states.clone(),
            tape: self.tape.symbols().to_vec(),
            blank: self.tape.name(self.blank).to_string(),
            start: self.states[self.start].clone(),
            halt: self.states[self.halt].clone(),
            transitions,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<MachineDocument>(text)?.into_machine()
    }
}

/// JSON transition-table form of a [`DensityMachine`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineDocument {
    pub name: String,
    pub states: Vec<String>,
    pub tape: Vec<String>,
    pub blank: String,
    pub start: String,
    pub halt: String,
    pub transitions: Vec<TransitionDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDocument {
    pub state: String,
    pub read: String,
    pub write: String,
    #[serde(rename = "move")]
    pub step: Move,
    pub next: String,
}

impl MachineDocument {
    pub fn into_machine(self) -> Result<DensityMachine> {
        let tape = Alphabet::new(self.tape)?;
        let state = |name: &str| {
            self.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown state `{name}`")))
        };
        let mut table = HashMap::new();
        for t in &self.transitions {
            let key = (state(&t.state)?, tape.sym(&t.read)?);
            let tr = Transition {
                write: tape.sym(&t.write)?,
                step: t.step,
                next: state(&t.next)?,
            };
            if table.insert(key, tr).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate transition for ({}, {})",
                    t.state, t.read
                )));
            }
        }
        let blank = tape.sym(&self.blank)?;
        let (start, halt) = (state(&self.start)?, state(&self.halt)?);
        DensityMachine::new(
            self.name,
            self.states.clone(),
            tape,
            blank,
            start,
            halt,
            table,
        )
    }
}

fn tape_with_blank(letters: &[&str]) -> Result<(Alphabet, Sym)> {
    let mut names: Vec<String> = letters.iter().map(|s| s.to_string()).collect();
    if !names.iter().any(|s| s == "_") {
        names.push("_".into());
    }
    let a = Alphabet::new(names)?;
    let blank = a.sym("_")?;
    Ok((a, blank))
}

/// Halts before its first step.
pub fn halt_immediately(letters: &[&str]) -> Result<DensityMachine> {
    let (tape, blank) = tape_with_blank(letters)?;
    DensityMachine::new(
        "halt-immediately",
        vec!["h".into()],
        tape,
        blank,
        0,
        0,
        HashMap::new(),
    )
}

/// Never halts on inputs over `letters`.
pub fn never_halts(letters: &[&str]) -> Result<DensityMachine> {
    let (tape, blank) = tape_with_blank(letters)?;
    let table = (0..tape.len() as Sym)
        .map(|s| {
            (
                (0, s),
                Transition {
                    write: s,
                    step: Move::R,
                    next: 0,
                },
            )
        })
        .collect();
    DensityMachine::new(
        "never-halts",
        vec!["run".into(), "h".into()],
        tape,
        blank,
        0,
        1,
        table,
    )
}

/// Halts after one step iff the first input letter is `letter`.
pub fn halt_on_first(letters: &[&str], letter: &str) -> Result<DensityMachine> {
    let (tape, blank) = tape_with_blank(letters)?;
    let target = tape.sym(letter)?;
    let mut table = HashMap::new();
    for s in 0..tape.len() as Sym {
        let next = if s == target { 1 } else { 2 };
        table.insert(
            (0, s),
            Transition {
                write: s,
                step: Move::S,
                next,
            },
        );
    }
    DensityMachine::new(
        format!("halt-on-first-{letter}"),
        vec!["q0".into(), "h".into(), "idle".into()],
        tape,
        blank,
        0,
        1,
        table,
    )
}

/// Walks right and halts exactly at step `steps` on every input.
pub fn halt_after(letters: &[&str], steps: usize) -> Result<DensityMachine> {
    if steps == 0 {
        return halt_immediately(letters);
    }
    let (tape, blank) = tape_with_blank(letters)?;
    let mut states: Vec<String> = (0..steps).map(|i| format!("q{i}")).collect();
    states.push("h".into());
    let mut table = HashMap::new();
    for i in 0..steps {
        for s in 0..tape.len() as Sym {
            table.insert(
                (i, s),
                Transition {
                    write: s,
                    step: Move::R,
                    next: i + 1,
                },
            );
        }
    }
    DensityMachine::new(
        format!("halt-after-{steps}"),
        states,
        tape,
        blank,
        0,
        steps,
        table,
    )
}

/// Outcome of the density wrapper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WrapperOutcome {
    /// The inner machine halted within `t` steps on the prefix decoded at loop `t`.
    Halted { t: usize },
    /// No halt within `loops` loops (budget or input length exhausted).
    StillRunning { loops: usize },
    /// The prefix of length `2^t` is not a Toeplitz window.
    RejectedInput { t: usize, level: usize },
}

/// For `t = 1, 2, ...`: decode `x[0, 2^t)` to `t` letters and run `inner`
/// for `t` steps on them; report the first halting loop.
pub fn density_machine_run(
    inner: &DensityMachine,
    x: &[Sym],
    alphabet: &Alphabet,
    budget: usize,
) -> Result<WrapperOutcome> {
    if budget == 0 {
        return Err(Error::InvalidInput("loop budget must be >= 1".into()));
    }
    let mut loops = 0;
    for t in 1..=budget.min(62) {
        if (1usize << t) > x.len() {
            break;
        }
        loops = t;
        match decode_density_prefix(&x[..1 << t])? {
            Decoded::NotToeplitz { level } => {
                return Ok(WrapperOutcome::RejectedInput { t, level })
            }
            Decoded::Word(v) => {
                let names: Vec<&str> = v.iter().map(|&s| alphabet.name(s)).collect();
                if let MachineRun::Halted { .. } = inner.run(&names, t) {
                    return Ok(WrapperOutcome::Halted { t });
                }
            }
        }
    }
    Ok(WrapperOutcome::StillRunning { loops })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Cmp {
    Equal,
    Greater,
    Less,
}

/// Remaining binary digits of an approximant: `None` stands for values
/// at least one, which no prefix can exceed.
type Expansion = Option<BigRational>;

fn next_digit(e: &Expansion) -> (u8, Expansion) {
    match e {
        None => (1, None),
        Some(r) => {
            let two_r = r * BigRational::from_integer(2.into());
            if two_r >= BigRational::one() {
                (1, Some(two_r - BigRational::one()))
            } else {
                (0, Some(two_r))
            }
        }
    }
}

/// Machine over binary sequences that halts at step `s` exactly when the
/// first `s` digits already certify a value above the approximant
/// `q_min(s, m)`: the first digit where the prefix and the terminating
/// expansion of the approximant differ is a 1 in the prefix. It never
/// halts on expansions of numbers at most the last approximant.
pub fn pi1_interval_machine(alpha: &Pi1Stream) -> Result<DensityMachine> {
    const MAX_STATES: usize = 100_000;
    let q = alpha.approximants();
    let m = q.len();
    let start_exp: Vec<(Cmp, Expansion)> = q
        .iter()
        .map(|v| (Cmp::Equal, (v < &BigRational::one()).then(|| v.clone())))
        .collect();
    // State: digits read so far (capped at m) and comparisons with the
    // approximants that can still matter.
    type Key = (
        usize,
        Vec<(Cmp, Option<(num_bigint::BigInt, num_bigint::BigInt)>)>,
    );
    let key_of = |s: usize, v: &[(Cmp, Expansion)]| -> Key {
        (
            s,
            v.iter()
                .map(|(c, e)| {
                    (
                        *c,
                        e.as_ref().map(|r| (r.numer().clone(), r.denom().clone())),
                    )
                })
                .collect(),
        )
    };
    let mut index: BTreeMap<Key, usize> = BTreeMap::new();
    let mut nodes: Vec<(usize, Vec<(Cmp, Expansion)>)> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(key_of(0, &start_exp), 0);
    nodes.push((0, start_exp));
    queue.push_back(0);
    let mut edges: Vec<(usize, Sym, Option<usize>)> = Vec::new();
    while let Some(id) = queue.pop_front() {
        let (s, entries) = nodes[id].clone();
        let s1 = (s + 1).min(m);
        let first = s1 - 1;
        for digit in 0..2u8 {
            let mut next = Vec::with_capacity(entries.len());
            for (c, e) in &entries {
                let (cmp, exp) = match c {
                    Cmp::Equal => {
                        let (d, rest) = next_digit(e);
                        match digit.cmp(&d) {
                            std::cmp::Ordering::Greater => {
                                (Cmp::Greater, Some(BigRational::zero()))
                            }
                            std::cmp::Ordering::Less => (Cmp::Less, Some(BigRational::zero())),
                            std::cmp::Ordering::Equal => (Cmp::Equal, rest),
                        }
                    }
                    other => (*other, Some(BigRational::zero())),
                };
                next.push((cmp, exp));
            }
            // Drop approximants that can no longer be consulted.
            let base_before = if s == 0 { 0 } else { s.min(m) - 1 };
            let drop = first - base_before;
            let next: Vec<_> = next.into_iter().skip(drop).collect();
            let target = if next[0].0 == Cmp::Greater {
                None
            } else {
                let key = key_of(s1, &next);
                Some(*index.entry(key).or_insert_with(|| {
                    nodes.push((s1, next.clone()));
                    queue.push_back(nodes.len() - 1);
                    nodes.len() - 1
                }))
            };
            if nodes.len() > MAX_STATES {
                return Err(Error::Budget(format!(
                    "comparison machine above {MAX_STATES} states"
                )));
            }
            edges.push((id, digit as Sym, target));
        }
    }
    let (tape, blank) = tape_with_blank(&["0", "1"])?;
    let halt = nodes.len();
    let mut states: Vec<String> = (0..nodes.len()).map(|i| format!("c{i}")).collect();
    states.push("reject".into());
    let mut table = HashMap::new();
    for (from, digit, to) in edges {
        let sym = tape.sym(if digit == 0 { "0" } else { "1" })?;
        table.insert(
            (from, sym),
            Transition {
                write: sym,
                step: Move::R,
                next: to.unwrap_or(halt),
            },
        );
    }
    let name = format!(
        "interval-below-{}",
        crate::entropy::format_rational(alpha.last())
    );
    DensityMachine::new(name, states, tape, blank, 0, halt, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    fn run(m: &DensityMachine, input: &str, steps: usize) -> MachineRun {
        let b = bits(input);
        let refs: Vec<&str> = b.iter().map(String::as_str).collect();
        m.run(&refs, steps)
    }

    #[test]
    fn stock_machines() {
        let h = halt_immediately(&["0", "1"]).unwrap();
        assert_eq!(run(&h, "1", 5), MachineRun::Halted { steps: 0 });
        let n = never_halts(&["0", "1"]).unwrap();
        assert_eq!(run(&n, "0101", 50), MachineRun::Running { steps: 50 });
        let f = halt_on_first(&["0", "1"], "1").unwrap();
        assert_eq!(run(&f, "10", 1), MachineRun::Halted { steps: 1 });
        assert_eq!(run(&f, "01", 10), MachineRun::Running { steps: 10 });
        let a = halt_after(&["0", "1"], 3).unwrap();
        assert_eq!(run(&a, "1", 2), MachineRun::Running { steps: 2 });
        assert_eq!(run(&a, "1", 3), MachineRun::Halted { steps: 3 });
        assert_eq!(run(&n, "2", 3), MachineRun::Halted { steps: 0 });
    }

    #[test]
    fn json_round_trip() {
        let f = halt_on_first(&["0", "1"], "1").unwrap();
        let back = DensityMachine::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        assert!(DensityMachine::from_json(r#"{"name":"x"}"#).is_err());
    }

    #[test]
    fn wrapper_examples() {
        let a = Alphabet::from_chars("01").unwrap();
        let x = a.parse_word("10111010").unwrap();
        let h = halt_immediately(&["0", "1"]).unwrap();
        assert_eq!(
            density_machine_run(&h, &x, &a, 10).unwrap(),
            WrapperOutcome::Halted { t: 1 }
        );
        let n = never_halts(&["0", "1"]).unwrap();
        assert_eq!(
            density_machine_run(&n, &x, &a, 2).unwrap(),
            WrapperOutcome::StillRunning { loops: 2 }
        );
        assert_eq!(
            density_machine_run(&n, &x, &a, 9).unwrap(),
            WrapperOutcome::StillRunning { loops: 3 }
        );
        let f = halt_on_first(&["0", "1"], "1").unwrap();
        assert_eq!(
            density_machine_run(&f, &x, &a, 5).unwrap(),
            WrapperOutcome::Halted { t: 1 }
        );
        let bad = a.parse_word("0110").unwrap();
        assert_eq!(
            density_machine_run(&n, &bad, &a, 5).unwrap(),
            WrapperOutcome::RejectedInput { t: 2, level: 1 }
        );
        assert!(density_machine_run(&n, &x, &a, 0).is_err());
    }

    fn stream(t: &[&str]) -> Pi1Stream {
        Pi1Stream::from_texts(t, "test").unwrap()
    }

    #[test]
    fn interval_machine_examples() {
        let one = pi1_interval_machine(&stream(&["1"])).unwrap();
        for input in ["1111111111", "0000000000", "1010101010"] {
            assert!(
                matches!(run(&one, input, 10), MachineRun::Running { .. }),
                "{input}"
            );
        }
        let zero = pi1_interval_machine(&stream(&["0"])).unwrap();
        assert_eq!(run(&zero, "0001000", 10), MachineRun::Halted { steps: 4 });
        assert!(matches!(
            run(&zero, "00000000", 8),
            MachineRun::Running { .. }
        ));
        let m = pi1_interval_machine(&stream(&["3/4", "5/8"])).unwrap();
        assert_eq!(run(&m, "11000000", 8), MachineRun::Halted { steps: 2 });
        assert!(matches!(run(&m, "10100000", 8), MachineRun::Running { .. }));
        assert_eq!(run(&m, "10100001", 8), MachineRun::Halted { steps: 8 });
        assert_eq!(run(&m, "2", 8), MachineRun::Halted { steps: 0 });
    }

    #[test]
    fn interval_machine_with_periodic_expansion() {
        // 1/3 = 0.010101...
        let m = pi1_interval_machine(&stream(&["1/3"])).unwrap();
        assert!(matches!(
            run(&m, "0101010101", 10),
            MachineRun::Running { .. }
        ));
        assert!(matches!(
            run(&m, "0101010100", 10),
            MachineRun::Running { .. }
        ));
        assert_eq!(run(&m, "0101011", 10), MachineRun::Halted { steps: 7 });
    }
}
