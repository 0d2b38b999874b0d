//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p virtmod --test acceptance`.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use virtmod::arith::{Element, RingTag};
use virtmod::matring::{decompose_regular, regular_uniform_dimension, MatrixRingSpec};
use virtmod::modpid::{is_isomorphic, structure, Presentation, StructureDescriptor};
use virtmod::oracle::{self, FiniteModule, OracleConfig};
use virtmod::smith::{invariant_factors, smith_normal_form, verify_snf, MatrixOverDomain};
use virtmod::taxonomy::{self, ks_certify, VirtualError, Witness};

/// Wall-clock budget for the oracle gate.
const ORACLE_GATE_SECONDS: f64 = 300.0;
const SNF_MATRICES_PER_RING: usize = 200;
const SNF_TRANSFORMS_PER_MATRIX: usize = 50;
const SNF_MAX_DIM: usize = 8;
const SNF_MAX_ABS_ENTRY: i64 = 100;
const SNF_MAX_DEGREE: usize = 5;
const KS_PAIRS: usize = 500;
const DECOMPOSITION_SAMPLES: usize = 500;
const REGULAR_MAX_N: usize = 5;
const HIERARCHY_FACTOR_POOL: [i64; 7] = [2, 3, 4, 5, 8, 9, 12];
const ESSENTIAL_BOUND: usize = 96;
const EXTENDING_BOUND: usize = 64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn z(v: i64) -> Element {
    RingTag::Integers.from_i64(v)
}

fn zd(r: usize, f: &[i64]) -> StructureDescriptor {
    StructureDescriptor::from_diagonal(RingTag::Integers, r, &f.iter().map(|&v| z(v)).collect::<Vec<_>>()).unwrap()
}

fn random_element(rng: &mut ChaCha8Rng, ring: RingTag) -> Element {
    match ring {
        RingTag::Integers => z(rng.gen_range(-SNF_MAX_ABS_ENTRY..=SNF_MAX_ABS_ENTRY)),
        _ => {
            let x = ring.x().unwrap();
            let deg = rng.gen_range(0..=SNF_MAX_DEGREE);
            let mut e = ring.zero();
            for k in 0..=deg {
                let c = ring.from_i64(rng.gen_range(-9..=9));
                e = &e + &(&c * &x.pow(k as u32));
            }
            e
        }
    }
}

/// Small multiplier for elementary operations.
fn random_multiplier(rng: &mut ChaCha8Rng, ring: RingTag) -> Element {
    let c = ring.from_i64(rng.gen_range(-3..=3));
    match ring.x() {
        Some(x) if rng.gen_bool(0.5) => &c * &x,
        _ => c,
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, ring: RingTag, rows: usize, cols: usize) -> MatrixOverDomain {
    let mut m = MatrixOverDomain::zero(ring, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            // sparse enough that non-trivial invariant factors show up
            if rng.gen_bool(0.6) {
                m.set(i, j, random_element(rng, ring));
            }
        }
    }
    m
}

/// `U * a * V` for random products of elementary matrices.
fn random_unimodular_change(rng: &mut ChaCha8Rng, a: &MatrixOverDomain) -> MatrixOverDomain {
    let ring = a.ring();
    let mut m = a.clone();
    for _ in 0..6 {
        if rng.gen_bool(0.5) && m.rows() >= 2 {
            let (i, j) = distinct_pair(rng, m.rows());
            match rng.gen_range(0..3) {
                0 => m.swap_rows(i, j),
                1 => m.scale_row(i, &ring.from_i64(-1)),
                _ => m.add_row_multiple(i, j, &random_multiplier(rng, ring)),
            }
        } else if m.cols() >= 2 {
            let (i, j) = distinct_pair(rng, m.cols());
            match rng.gen_range(0..2) {
                0 => m.swap_cols(i, j),
                _ => m.add_col_multiple(i, j, &random_multiplier(rng, ring)),
            }
        }
    }
    m
}

fn distinct_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

fn ac1_oracle_gate() -> Outcome {
    let config = OracleConfig::default();
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    for (predicate, bound) in [
        ("virtually_semisimple", 96),
        ("virtually_simple", 96),
        ("embeds", 64),
        ("quasi_injective", 64),
        ("summand_via_purity", 64),
    ] {
        match oracle::validate(predicate, bound, &config) {
            Ok(r) => {
                pass &= r.mismatches.is_empty();
                notes.push(format!("{predicate}<={bound}: {} checked, {} mismatches", r.checked, r.mismatches.len()));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{predicate}: {e}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs <= ORACLE_GATE_SECONDS;
    notes.push(format!("{secs:.1}s of {ORACLE_GATE_SECONDS}s"));
    outcome(pass, notes.join("; "))
}

fn ac2_named_examples() -> Outcome {
    let z4 = zd(0, &[4]);
    let integers = zd(1, &[]);
    let fully = taxonomy::check_fully_virtually_semisimple(&integers).unwrap();
    let checks = [
        ("Z/4 not vss", !taxonomy::is_virtually_semisimple(&z4).unwrap()),
        ("Z completely vss", taxonomy::is_completely_virtually_semisimple(&integers).unwrap()),
        ("Z virtually simple", taxonomy::is_virtually_simple(&integers).unwrap()),
        ("Z not fully vss", !fully.value),
        ("witness Z/4", fully.witness == Some(Witness::Quotient(z4.clone()))),
    ];
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    outcome(failed.is_empty(), if failed.is_empty() { "5 of 5 exact".into() } else { failed.join(", ") })
}

fn ac3_snf_certification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rings = [RingTag::Integers, RingTag::poly_fp(7).unwrap(), RingTag::PolyOverRationals];
    let mut failures = Vec::new();
    let mut checked = 0;
    for ring in rings {
        for k in 0..SNF_MATRICES_PER_RING {
            let rows = rng.gen_range(1..=SNF_MAX_DIM);
            let cols = rng.gen_range(1..=SNF_MAX_DIM);
            let a = random_matrix(&mut rng, ring, rows, cols);
            let r = smith_normal_form(&a);
            if verify_snf(&a, &r) != Ok(true) {
                failures.push(format!("{ring} #{k} verify"));
                continue;
            }
            let factors = invariant_factors(&a);
            for _ in 0..SNF_TRANSFORMS_PER_MATRIX {
                let b = random_unimodular_change(&mut rng, &a);
                if invariant_factors(&b) != factors {
                    failures.push(format!("{ring} #{k} invariance"));
                    break;
                }
            }
            checked += 1;
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} matrices certified, {} failures {:?}", failures.len(), failures.iter().take(3).collect::<Vec<_>>()),
    )
}

/// Rank and per-prime multiplicities of a multiset of `Z` and `Z/p`.
fn multiplicities(list: &[StructureDescriptor]) -> (usize, BTreeMap<Element, usize>) {
    let mut rank = 0;
    let mut simples = BTreeMap::new();
    for s in list {
        if s.free_rank() == 1 {
            rank += 1;
        } else {
            *simples.entry(s.invariant_factors()[0].clone()).or_insert(0) += 1;
        }
    }
    (rank, simples)
}

fn count_embeds(a: &[StructureDescriptor], b: &[StructureDescriptor]) -> bool {
    let (ra, sa) = multiplicities(a);
    let (rb, sb) = multiplicities(b);
    ra <= rb && sa.iter().all(|(p, m)| sb.get(p).copied().unwrap_or(0) >= *m)
}

fn random_vs_multiset(rng: &mut ChaCha8Rng) -> Vec<StructureDescriptor> {
    let len = rng.gen_range(1..=6);
    (0..len)
        .map(|_| {
            let pick = rng.gen_range(0..4);
            if pick == 0 {
                zd(1, &[])
            } else {
                zd(0, &[[2, 3, 5, 7][rng.gen_range(0..4)]])
            }
        })
        .collect()
}

fn ac4_krull_schmidt() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut certified, mut refused, mut errors) = (0, 0, Vec::new());
    for k in 0..KS_PAIRS {
        let left = random_vs_multiset(&mut rng);
        let right = if rng.gen_bool(0.5) {
            let mut r = left.clone();
            r.shuffle(&mut rng);
            r
        } else {
            random_vs_multiset(&mut rng)
        };
        let l2r = count_embeds(&left, &right);
        let r2l = count_embeds(&right, &left);
        match ks_certify(&left, &right) {
            Ok(cert) if l2r && r2l && cert.verify(&left, &right) => certified += 1,
            Err(VirtualError::NotSubisomorphic { left_into_right, right_into_left })
                if !(l2r && r2l) && left_into_right == l2r && right_into_left == r2l =>
            {
                refused += 1
            }
            other => errors.push(format!("#{k}: {other:?}")),
        }
    }
    outcome(
        errors.is_empty(),
        format!("{certified} certified, {refused} refused with correct direction, {} exceptions", errors.len()),
    )
}

fn random_vss_descriptor(rng: &mut ChaCha8Rng, ring: RingTag) -> StructureDescriptor {
    let primes: Vec<Element> = match ring {
        RingTag::Integers => [2, 3, 5, 7, 11].iter().map(|&p| z(p)).collect(),
        _ => {
            let x = ring.x().unwrap();
            vec![x.clone(), &x + &ring.one(), &(&x * &x) + &ring.from_i64(2), &x + &ring.from_i64(3)]
        }
    };
    let r = rng.gen_range(0..=3);
    let count = rng.gen_range(0..=4);
    let entries: Vec<Element> = (0..count)
        .map(|_| {
            // squarefree: product of a random subset of distinct primes
            let mut e = ring.one();
            for p in &primes {
                if rng.gen_bool(0.4) {
                    e = &e * p;
                }
            }
            if e.is_one() {
                primes[0].clone()
            } else {
                e
            }
        })
        .collect();
    StructureDescriptor::from_diagonal(ring, r, &entries).unwrap()
}

fn ac5_decomposition_uniqueness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rings = [RingTag::Integers, RingTag::poly_fp(5).unwrap()];
    let mut failures = Vec::new();
    for k in 0..DECOMPOSITION_SAMPLES {
        let ring = rings[k % rings.len()];
        let s = random_vss_descriptor(&mut rng, ring);
        let d = match taxonomy::decompose_virtually_simple(&s) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("#{k} {s}: {e}"));
                continue;
            }
        };
        let reassembled = d.reassemble(ring).unwrap();
        let p = s.to_presentation();
        let changed = random_unimodular_change(&mut rng, p.relations());
        let again = structure(&Presentation::new(ring, p.generators(), changed).unwrap());
        let d2 = taxonomy::decompose_virtually_simple(&again).unwrap();
        if !is_isomorphic(&reassembled, &s).unwrap() || d.descriptors() != d2.descriptors() {
            failures.push(format!("#{k} {s}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} samples, {} failures {:?}", DECOMPOSITION_SAMPLES, failures.len(), failures.first()),
    )
}

fn ac6_regular_module() -> Outcome {
    let bases = [RingTag::Integers, RingTag::poly_fp(2).unwrap(), RingTag::poly_fp(5).unwrap(), RingTag::PolyOverRationals];
    let mut failures = Vec::new();
    let mut checked = 0;
    for base in bases {
        for n in 1..=REGULAR_MAX_N {
            let spec = MatrixRingSpec::new(n, base).unwrap();
            let (d, cert) = decompose_regular(spec).unwrap();
            let summands = d.descriptors();
            let ok = summands.len() == n
                && summands.iter().all(|s| *s == StructureDescriptor::free(base, 1))
                && summands.iter().all(|s| taxonomy::is_virtually_simple(s).unwrap())
                && cert.pairing.len() == n
                && regular_uniform_dimension(spec).unwrap() == n;
            if !ok {
                failures.push(format!("M_{n}({base})"));
            }
            checked += 1;
        }
    }
    outcome(failures.is_empty(), format!("{checked} rings, failures {failures:?}"))
}

fn ac7_hierarchy() -> Outcome {
    let mut pool = Vec::new();
    for r in 0..=2 {
        for len in 0..=3usize {
            let mut idx = vec![0usize; len];
            loop {
                let entries: Vec<i64> = idx.iter().map(|&i| HIERARCHY_FACTOR_POOL[i]).collect();
                pool.push(zd(r, &entries));
                // next non-decreasing index tuple
                let mut k = len;
                while k > 0 && idx[k - 1] == HIERARCHY_FACTOR_POOL.len() - 1 {
                    k -= 1;
                }
                if k == 0 {
                    break;
                }
                idx[k - 1] += 1;
                let v = idx[k - 1];
                for slot in &mut idx[k..] {
                    *slot = v;
                }
            }
        }
    }
    let mut counterexamples = Vec::new();
    for s in &pool {
        let vss = taxonomy::is_virtually_semisimple(s).unwrap();
        let completely = taxonomy::is_completely_virtually_semisimple(s).unwrap();
        let fully = taxonomy::is_fully_virtually_semisimple(s).unwrap();
        let qi = taxonomy::is_quasi_injective(s).unwrap();
        let ss = taxonomy::is_semisimple(s).unwrap();
        if (fully && !completely) || (completely && !vss) || (qi && vss && !ss) {
            counterexamples.push(s.to_string());
        }
    }
    outcome(
        counterexamples.is_empty(),
        format!("{} descriptors, {} counterexamples", pool.len(), counterexamples.len()),
    )
}

fn ac8_essential_extensions() -> Outcome {
    let config = OracleConfig::default();
    let mut vss_groups = 0;
    let mut failures = Vec::new();
    for orders in oracle::groups_up_to(ESSENTIAL_BOUND) {
        let g = FiniteModule::new(&orders, &config).unwrap();
        if !oracle::is_vss_bruteforce(&g, &config).unwrap() {
            continue;
        }
        vss_groups += 1;
        let soc = oracle::socle(&g, &config).unwrap();
        let whole = g.descriptor();
        for s in oracle::enumerate_submodules(&g, &config).unwrap() {
            if soc.is_subgroup_of(&s) && *s.descriptor() != whole {
                failures.push(format!("{g}: {}", s.descriptor()));
            }
        }
    }
    outcome(failures.is_empty(), format!("{vss_groups} vss groups, {} failures", failures.len()))
}

fn ac9_extending() -> Outcome {
    let config = OracleConfig::default();
    let mut semisimple = 0;
    let mut failures = Vec::new();
    for orders in oracle::groups_up_to(EXTENDING_BOUND) {
        // semisimple means every cyclic order is prime
        if !orders.iter().all(|&n| (2..n).all(|d| n % d != 0)) {
            continue;
        }
        semisimple += 1;
        let g = FiniteModule::new(&orders, &config).unwrap();
        if !oracle::is_extending_bruteforce(&g, &config).unwrap().value {
            failures.push(g.to_string());
        }
    }
    let g = FiniteModule::new(&[8, 2], &config).unwrap();
    let verdict = oracle::is_extending_bruteforce(&g, &config).unwrap();
    let subs = oracle::enumerate_submodules(&g, &config).unwrap();
    let witness_ok = match &verdict.witness {
        Some(w) => {
            let no_complement = oracle::complement(&g, &subs, w).is_none();
            let closed = !subs.iter().any(|b| b != w && oracle::is_essential_in(w, b, &subs));
            no_complement && closed
        }
        None => false,
    };
    let witness_text = verdict
        .witness
        .as_ref()
        .map(|w| format!("{} generated by {:?}", w.descriptor(), w.generators().iter().map(|&x| g.element(x)).collect::<Vec<_>>()))
        .unwrap_or_default();
    outcome(
        failures.is_empty() && !verdict.value && witness_ok,
        format!(
            "{semisimple} semisimple groups extending, {} failures; Z/8 + Z/2 not extending, closed non-summand {witness_text}",
            failures.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Outcome); 9] = [
        ("AC1", "oracle gate", ac1_oracle_gate),
        ("AC2", "named examples", ac2_named_examples),
        ("AC3", "SNF certification", ac3_snf_certification),
        ("AC4", "Krull-Schmidt pairing", ac4_krull_schmidt),
        ("AC5", "decomposition uniqueness", ac5_decomposition_uniqueness),
        ("AC6", "regular module of M_n(D)", ac6_regular_module),
        ("AC7", "hierarchy", ac7_hierarchy),
        ("AC8", "essential extensions of vss groups", ac8_essential_extensions),
        ("AC9", "extending oracle", ac9_extending),
    ];
    // optional ids on the command line select a subset, e.g. `-- AC1 AC3`
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let mut all = true;
    for (id, name, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        all &= o.pass;
        println!(
            "[{}] {id} {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
