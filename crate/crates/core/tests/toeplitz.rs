mod common;

use caentropy::entropy::Pi1Stream;
use caentropy::symbolic::{Alphabet, Sym};
use caentropy::toeplitz::{
    build_d_star_window, build_one_net, decode_density_prefix, density_machine_run,
    frequency_target, generate_toeplitz_window, halt_after, halt_immediately, halt_on_first,
    letter_frequency, never_halts, pi1_interval_machine, s_membership_check, s_prime_check,
    tilde_equiv, Decoded, DensityMachine, MachineRun, OneNet, SLetter, SPrimeVerdict, SWord,
    SymbolSequence, Tilde, WrapperOutcome,
};
use common::{allowed_by_swap, consistent_alphas};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn bits() -> Alphabet {
    Alphabet::from_chars("01").unwrap()
}

fn seq(alphabet: &Alphabet, text: &str) -> SymbolSequence {
    SymbolSequence::parse(alphabet.clone(), text).unwrap()
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[test]
fn one_net_examples() {
    assert_eq!(build_one_net(&[0]).unwrap().offsets(), &[0]);
    assert_eq!(build_one_net(&[0, 0]).unwrap().offsets(), &[0, 1]);
    assert_eq!(build_one_net(&[1, 0]).unwrap().offsets(), &[1, 0]);
    assert!(build_one_net(&[]).is_err());
    assert!(OneNet::new(vec![0, 2]).is_err());
}

#[test]
fn window_examples() {
    let b = bits();
    let net = OneNet::new(vec![0, 1, 3]).unwrap();
    assert_eq!(
        generate_toeplitz_window(&seq(&b, "101"), &net, 8, 0)
            .unwrap()
            .render(),
        "10111010"
    );
    let short = OneNet::new(vec![0, 1]).unwrap();
    let w = generate_toeplitz_window(&seq(&b, "11"), &short, 4, 0).unwrap();
    assert_eq!(w.render(), "1110");
    assert_eq!(letter_frequency(&w.letters, 1).unwrap(), ratio(3, 4));
    assert_eq!(frequency_target(&[1, 1], 1), ratio(3, 4));
    assert_eq!(
        letter_frequency(&[0, 0, 0, 0], 1).unwrap(),
        BigRational::zero()
    );
    let long = b.parse_word("10111010").unwrap();
    assert_eq!(letter_frequency(&long, 1).unwrap(), ratio(5, 8));
    assert_eq!(frequency_target(&[1, 0, 1], 1), ratio(5, 8));
    assert!(letter_frequency(&[], 1).is_err());
}

#[test]
fn d_star_examples() {
    let b = bits();
    let net = OneNet::new(vec![0, 1, 3]).unwrap();
    let p = build_d_star_window(&seq(&b, "101"), &net, 8, 3, 0).unwrap();
    assert_eq!(p.render(&b), "10111010/10111010/10111010");
    let p = build_d_star_window(&seq(&b, "101"), &net, 8, 1, 0).unwrap();
    assert_eq!(p.render(&b), "10111010");
    let p = build_d_star_window(&seq(&b, "000"), &net, 8, 2, 0).unwrap();
    assert_eq!(p.render(&b), "00000000/00000000");
}

#[test]
fn tilde_examples() {
    let b = bits();
    assert_eq!(
        tilde_equiv(&seq(&b, "010~0"), &seq(&b, "010~0")).unwrap(),
        Tilde::Equivalent
    );
    assert_eq!(
        tilde_equiv(&seq(&b, "1~0"), &seq(&b, "0~1")).unwrap(),
        Tilde::Equivalent
    );
    assert_eq!(
        tilde_equiv(&seq(&b, "100~0"), &seq(&b, "010~0")).unwrap(),
        Tilde::NotEquivalent
    );
    assert_eq!(
        tilde_equiv(&seq(&b, "010"), &seq(&b, "010")).unwrap(),
        Tilde::Undetermined
    );
    assert_eq!(
        tilde_equiv(&seq(&b, "00"), &seq(&b, "11")).unwrap(),
        Tilde::NotEquivalent
    );
}

#[test]
fn decoder_examples() {
    let a = Alphabet::from_chars("a").unwrap();
    assert_eq!(
        decode_density_prefix(&a.parse_word("aaaa").unwrap()).unwrap(),
        Decoded::Word(vec![0, 0])
    );
    let b = bits();
    assert_eq!(
        decode_density_prefix(&b.parse_word("10111010").unwrap()).unwrap(),
        Decoded::Word(b.parse_word("101").unwrap())
    );
    assert_eq!(
        decode_density_prefix(&b.parse_word("0110").unwrap()).unwrap(),
        Decoded::NotToeplitz { level: 1 }
    );
    assert!(decode_density_prefix(&[0, 1, 0]).is_err());
}

#[test]
fn wrapper_examples() {
    let b = bits();
    let x = b.parse_word("10111010").unwrap();
    let h = halt_immediately(&["0", "1"]).unwrap();
    assert_eq!(
        density_machine_run(&h, &x[..2], &b, 4).unwrap(),
        WrapperOutcome::Halted { t: 1 }
    );
    let n = never_halts(&["0", "1"]).unwrap();
    assert_eq!(
        density_machine_run(&n, &x, &b, 2).unwrap(),
        WrapperOutcome::StillRunning { loops: 2 }
    );
    let f = halt_on_first(&["0", "1"], "1").unwrap();
    assert_eq!(
        density_machine_run(&f, &x, &b, 8).unwrap(),
        WrapperOutcome::Halted { t: 1 }
    );
}

fn run_bits(m: &DensityMachine, input: &[u8], steps: usize) -> MachineRun {
    let names: Vec<&str> = input
        .iter()
        .map(|&d| if d == 0 { "0" } else { "1" })
        .collect();
    m.run(&names, steps)
}

#[test]
fn interval_machine_examples() {
    let one = pi1_interval_machine(&Pi1Stream::from_texts(&["1"], "constant").unwrap()).unwrap();
    assert!(matches!(
        run_bits(&one, &[1; 16], 16),
        MachineRun::Running { .. }
    ));
    let zero = pi1_interval_machine(&Pi1Stream::from_texts(&["0"], "constant").unwrap()).unwrap();
    assert!(matches!(
        run_bits(&zero, &[0; 16], 16),
        MachineRun::Running { .. }
    ));
    assert_eq!(
        run_bits(&zero, &[0, 0, 1, 0], 4),
        MachineRun::Halted { steps: 3 }
    );
    let m = pi1_interval_machine(&Pi1Stream::from_texts(&["3/4", "5/8"], "two steps").unwrap())
        .unwrap();
    assert_eq!(
        run_bits(&m, &[1, 1, 0, 0, 0, 0], 6),
        MachineRun::Halted { steps: 2 }
    );
    let json = m.to_json().unwrap();
    assert_eq!(DensityMachine::from_json(&json).unwrap(), m);
}

#[test]
fn s_examples() {
    let fam: Vec<DensityMachine> = (0..3).map(|_| never_halts(&["0", "1"]).unwrap()).collect();
    let check = |t: &str| {
        s_membership_check(&SWord::parse(t).unwrap(), &fam, 4)
            .unwrap()
            .position()
    };
    assert_eq!(check("♯♯♯♯"), None);
    assert_eq!(check("♯01"), Some(2));
    assert_eq!(check("**3′*"), Some(4));
    let pair = |a: &str, b: &str| {
        s_prime_check(
            &SWord::parse(a).unwrap(),
            &SWord::parse(b).unwrap(),
            &fam,
            4,
        )
        .unwrap()
    };
    assert!(pair("####~#", "####~#").is_rejected());
    assert!(!pair("****~*", "****~*").is_rejected());
    assert!(pair("**1'2'10", "**1'2'10").is_rejected());
    assert!(!pair("**1'2'10", "**1'3'10").is_rejected());
}

// Independent reading of the wrapper: loop t decodes the first 2^t letters
// and halts when the inner machine does within t steps.
fn halting_loop(inner: &DensityMachine, x: &[Sym], budget: usize) -> Option<usize> {
    let mut t = 1;
    while t <= budget && (1 << t) <= x.len() {
        match decode_density_prefix(&x[..1 << t]).unwrap() {
            Decoded::NotToeplitz { .. } => return Some(t),
            Decoded::Word(v) => {
                let names: Vec<&str> = v.iter().map(|&s| if s == 0 { "0" } else { "1" }).collect();
                if matches!(inner.run(&names, t), MachineRun::Halted { .. }) {
                    return Some(t);
                }
            }
        }
        t += 1;
    }
    None
}

fn arb_alpha(max_len: usize) -> impl Strategy<Value = (usize, Vec<Sym>)> {
    (2usize..=3, 1..=max_len)
        .prop_flat_map(|(a, n)| (Just(a), proptest::collection::vec(0..a as Sym, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nets_are_disjoint(choices in proptest::collection::vec(0u8..2, 1..=16)) {
        let net = build_one_net(&choices).unwrap();
        let k = net.offsets();
        for m in 0..k.len() {
            for j in 0..m {
                prop_assert_ne!(k[m] % (1 << (j + 1)), k[j]);
            }
        }
    }

    #[test]
    fn one_hole_per_window(choices in proptest::collection::vec(0u8..2, 1..=10), start in -5000i64..5000) {
        let net = build_one_net(&choices).unwrap();
        let n = net.depth();
        let holes = (start..start + (1 << n)).filter(|&c| net.level_of(c, n).is_none()).count();
        prop_assert_eq!(holes, 1);
    }

    #[test]
    fn frequency_bound((a, alpha) in arb_alpha(10), seed in proptest::collection::vec(0u8..2, 10), hole in 0u16..3) {
        let alphabet = Alphabet::numeric(a).unwrap();
        let n = alpha.len();
        let net = build_one_net(&seed[..n]).unwrap();
        let s = SymbolSequence::new(alphabet, alpha.clone(), None).unwrap();
        let w = generate_toeplitz_window(&s, &net, 1 << n, hole % a as u16).unwrap();
        let bound = ratio(2, 1 << n);
        for sym in 0..a as Sym {
            let err = letter_frequency(&w.letters, sym).unwrap() - frequency_target(&alpha, sym);
            prop_assert!(err.abs() <= bound);
        }
    }

    #[test]
    fn decoder_matches_oracle((a, alpha) in arb_alpha(8), seed in proptest::collection::vec(0u8..2, 8)) {
        let alphabet = Alphabet::numeric(a).unwrap();
        let n = alpha.len();
        let net = build_one_net(&seed[..n]).unwrap();
        let s = SymbolSequence::new(alphabet, alpha.clone(), None).unwrap();
        for hole in 0..a as Sym {
            let w = generate_toeplitz_window(&s, &net, 1 << n, hole).unwrap();
            let Decoded::Word(v) = decode_density_prefix(&w.letters).unwrap() else {
                return Err(TestCaseError::fail("genuine window rejected"));
            };
            let consistent = consistent_alphas(&w.letters);
            prop_assert!(consistent.contains(&alpha));
            for other in &consistent {
                prop_assert!(allowed_by_swap(&v, other), "v={:?} other={:?}", v, other);
            }
        }
    }

    #[test]
    fn subsampling_keeps_the_code(
        alpha in proptest::collection::vec(0 as Sym..2, 10),
        seed in proptest::collection::vec(0u8..2, 10),
        step in prop_oneof![Just(3usize), Just(5usize)],
        hole in 0 as Sym..2,
    ) {
        let net = build_one_net(&seed).unwrap();
        let s = SymbolSequence::new(bits(), alpha.clone(), None).unwrap();
        let w = generate_toeplitz_window(&s, &net, 1 << 10, hole).unwrap();
        let sub: Vec<Sym> = (0..128).map(|i| w.letters[i * step]).collect();
        let Decoded::Word(v) = decode_density_prefix(&sub).unwrap() else {
            return Err(TestCaseError::fail("sub-sampled window rejected"));
        };
        prop_assert!(allowed_by_swap(&v, &alpha[..7]));
        // The sub-sampled net places the same levels on the kept cells.
        let subnet = net.subsample(step as u64).unwrap();
        for (i, &c) in sub.iter().enumerate() {
            if let Some(j) = subnet.level_of(i as i64, 7) {
                prop_assert_eq!(c, alpha[j - 1]);
            }
        }
    }

    #[test]
    fn wrapper_agrees_and_is_monotone(
        alpha in proptest::collection::vec(0 as Sym..2, 6),
        seed in proptest::collection::vec(0u8..2, 6),
        extension in proptest::collection::vec(0 as Sym..2, 0..64),
        which in 0usize..4,
        cut in 1usize..=6,
    ) {
        let net = build_one_net(&seed).unwrap();
        let s = SymbolSequence::new(bits(), alpha, None).unwrap();
        let x = generate_toeplitz_window(&s, &net, 64, 0).unwrap().letters;
        let inner = match which {
            0 => halt_after(&["0", "1"], 3).unwrap(),
            1 => halt_on_first(&["0", "1"], "1").unwrap(),
            2 => halt_on_first(&["0", "1"], "0").unwrap(),
            _ => never_halts(&["0", "1"]).unwrap(),
        };
        let prefix = &x[..1 << cut];
        let got = density_machine_run(&inner, prefix, &bits(), 10).unwrap();
        let expected = halting_loop(&inner, prefix, 10);
        match got {
            WrapperOutcome::Halted { t } | WrapperOutcome::RejectedInput { t, .. } => {
                prop_assert_eq!(Some(t), expected);
                let mut longer = prefix.to_vec();
                longer.extend_from_slice(&extension);
                let again = density_machine_run(&inner, &longer, &bits(), 10).unwrap();
                prop_assert_eq!(again, got);
            }
            WrapperOutcome::StillRunning { loops } => {
                prop_assert_eq!(expected, None);
                prop_assert_eq!(loops, cut);
            }
        }
    }

    #[test]
    fn interval_machine_matches_rational_oracle(
        raw in proptest::collection::vec((0i64..40, 1i64..13), 1..4),
        input in proptest::collection::vec(0u8..2, 1..24),
    ) {
        let mut q: Vec<BigRational> = raw.iter().map(|&(p, d)| ratio(p, d)).collect();
        q.sort();
        q.reverse();
        let stream = Pi1Stream::new(q.clone(), "random").unwrap();
        let m = pi1_interval_machine(&stream).unwrap();
        // Halt at the first s whose prefix value already exceeds q_min(s, m).
        let mut expected = None;
        let mut value = BigRational::zero();
        let mut weight = BigRational::one();
        for (s, &d) in input.iter().enumerate() {
            weight /= BigRational::from_integer(2.into());
            if d == 1 {
                value += &weight;
            }
            if value > q[s.min(q.len() - 1)] {
                expected = Some(s + 1);
                break;
            }
        }
        let got = run_bits(&m, &input, input.len());
        match expected {
            Some(steps) => prop_assert_eq!(got, MachineRun::Halted { steps }),
            None => {
                let running = matches!(got, MachineRun::Running { .. });
                prop_assert!(running);
            }
        }
    }

    #[test]
    fn s_prime_rejections_persist(
        a in proptest::collection::vec(0usize..8, 1..10),
        b in proptest::collection::vec(0usize..8, 1..10),
        extra in proptest::collection::vec((0usize..8, 0usize..8), 0..6),
    ) {
        let letter = |i: usize| match i {
            0 => SLetter::Star,
            1..=4 => SLetter::Digit(i as u8 - 1),
            5 | 6 => SLetter::Bit(i as u8 - 5),
            _ => SLetter::Sharp,
        };
        let len = a.len().min(b.len());
        let z = SWord { prefix: a[..len].iter().map(|&i| letter(i)).collect(), tail: None };
        let zp = SWord { prefix: b[..len].iter().map(|&i| letter(i)).collect(), tail: None };
        let fam: Vec<DensityMachine> = (0..16).map(|_| never_halts(&["0", "1"]).unwrap()).collect();
        let first = s_prime_check(&z, &zp, &fam, 6).unwrap();
        let mut z2 = z.clone();
        let mut zp2 = zp.clone();
        for &(x, y) in &extra {
            z2.prefix.push(letter(x));
            zp2.prefix.push(letter(y));
        }
        let second = s_prime_check(&z2, &zp2, &fam, 6).unwrap();
        if let SPrimeVerdict::Rejected { position, .. } = first {
            prop_assert_eq!(second.position(), Some(position));
        }
    }
}

#[test]
fn genuine_counter_pairs_are_accepted() {
    let fam: Vec<DensityMachine> = (0..2).map(|_| never_halts(&["0", "1"]).unwrap()).collect();
    let payload = "10111010";
    for k in 1..=2usize {
        let last = (1u32 << (2 * k)) - 1;
        let word = |w: u32| {
            let digits: String = (0..k)
                .rev()
                .map(|i| format!("{}'", (w >> (2 * i)) & 3))
                .collect();
            format!("{}{digits}{payload}", "*".repeat(k))
        };
        for w in 0..last {
            let (z, zp) = (
                SWord::parse(&word(w)).unwrap(),
                SWord::parse(&word(w + 1)).unwrap(),
            );
            for len in 1..=z.len() {
                let cut = |s: &SWord| SWord {
                    prefix: s.prefix[..len].to_vec(),
                    tail: None,
                };
                assert!(
                    !s_prime_check(&cut(&z), &cut(&zp), &fam, 3)
                        .unwrap()
                        .is_rejected(),
                    "{z} {zp} {len}"
                );
            }
        }
        let z = SWord::parse(&word(last)).unwrap();
        let sharps = SWord {
            prefix: vec![SLetter::Sharp; z.len()],
            tail: Some(SLetter::Sharp),
        };
        assert!(!s_prime_check(&z, &sharps, &fam, 3).unwrap().is_rejected());
        let stars = SWord {
            prefix: vec![SLetter::Star; z.len()],
            tail: Some(SLetter::Star),
        };
        let zero = SWord::parse(&word(0)).unwrap();
        assert!(!s_prime_check(&stars, &zero, &fam, 3).unwrap().is_rejected());
        assert!(s_prime_check(&stars, &z, &fam, 3).unwrap().is_rejected());
    }
}
