//! 1-nets, Toeplitz density windows, the density decoder and machines
//! reading sequences through it.

mod decode;
mod machine;
mod net;
mod sequence;
mod sets;
mod window;

pub use decode::{decode_density_prefix, Decoded};
pub use machine::{
    density_machine_run, halt_after, halt_immediately, halt_on_first, never_halts,
    pi1_interval_machine, DensityMachine, MachineDocument, MachineRun, Move, TapeRun, Transition,
    TransitionDocument, WrapperOutcome,
};
pub use net::{build_one_net, OneNet, TwoNet, MAX_DEPTH};
pub use sequence::{tilde_equiv, SymbolSequence, Tilde};
pub use sets::{
    s_membership_check, s_prime_check, SClause, SLetter, SPrimeVerdict, SVerdict, SWord,
};
pub use window::{
    build_d_star_window, frequency_target, generate_toeplitz_window, letter_frequency,
    power_of_two_exponent, ToeplitzWindow,
};
