//! Acceptance criteria. Run with
//!
//! ```text
//! cargo test -p bcmm-cli --test acceptance -- --nocapture
//! ```
//!
//! to see one PASS/FAIL line per criterion.

use std::cell::Cell;
use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use bcmm_core::experiment::{self, ExperimentConfig, ExperimentKind};
use bcmm_core::oracle::{self, NaiveVector};
use bcmm_core::patio;
use bcmm_core::{
    capacity_report, orthonormalize, pairwise_ands, prefix_union, recall, train,
    verify_orthonormal, BinaryVector, PatternSet, SplitMix64,
};

type Outcome = Result<String, String>;

const SEED: u64 = 0x5EED_BC3D;

fn random_set(rng: &mut SplitMix64, p: usize, q: usize, density: f64) -> PatternSet {
    PatternSet::new(
        (0..q)
            .map(|_| rng.binary_vector(p, density).unwrap())
            .collect(),
    )
    .unwrap()
}

fn naive(s: &PatternSet) -> Vec<NaiveVector> {
    s.iter().map(NaiveVector::from).collect()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    check(elapsed < limit, || {
        format!("{what} took {elapsed:?}, limit {limit:?}")
    })
}

/// Worst excess of nonzero-basis count over `p` seen by criteria 2 and 3.
struct Tally {
    worst_excess: Cell<i64>,
    checked: Cell<u64>,
}

impl Tally {
    fn record(&self, nonzero: usize, p: usize) {
        self.checked.set(self.checked.get() + 1);
        let excess = nonzero as i64 - p as i64;
        if excess > self.worst_excess.get() {
            self.worst_excess.set(excess);
        }
    }
}

fn c1_perfect_recall() -> Outcome {
    let start = Instant::now();
    let mut rng = SplitMix64::new(SEED);
    let mut total = 0;
    for p in [8, 64, 256] {
        let keys = PatternSet::identity(p).unwrap();
        let values = random_set(&mut rng, p, p, 0.5);
        let mem = train(&keys, &values, false).map_err(|e| e.to_string())?;
        for (k, key) in keys.iter().enumerate() {
            let r = recall(&mem, key).unwrap();
            check(r.response == values[k], || {
                format!("p={p}: key {k} recalled wrongly")
            })?;
            total += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(1), "recall sweep")?;
    Ok(format!(
        "{total}/{total} exact recalls in {:?}",
        start.elapsed()
    ))
}

fn c2_bop_orthogonality(tally: &Tally) -> Outcome {
    let start = Instant::now();
    let mut rng = SplitMix64::new(SEED ^ 2);
    let mut violations = 0;
    for _ in 0..10_000 {
        let keys = random_set(&mut rng, 32, 32, 0.5);
        let basis = orthonormalize(&keys);
        let report = verify_orthonormal(&basis.basis);
        violations += report.violating_pairs.len();
        tally.record(basis.nonzero_count(), 32);
    }
    check(violations == 0, || format!("{violations} violating pairs"))?;
    within(start.elapsed(), Duration::from_secs(10), "10k sets")?;
    Ok(format!(
        "10000 sets, 0 violating pairs in {:?}",
        start.elapsed()
    ))
}

/// Compares every packed kernel on one instance; returns the mismatch count.
fn oracle_mismatches(keys: &PatternSet, values: &PatternSet, tally: &Tally) -> usize {
    let mut bad = 0;
    let (nk, nv) = (naive(keys), naive(values));

    // inner AND on every key pair
    for i in 0..keys.len() {
        for j in i..keys.len() {
            let packed = u8::from(bool::from(keys[i].inner_and(&keys[j]).unwrap()));
            bad += usize::from(packed != oracle::naive_inner_and(&nk[i], &nk[j]).unwrap());
        }
    }

    let basis = orthonormalize(keys);
    tally.record(basis.nonzero_count(), keys.dimension());
    let nb = oracle::naive_bop(&nk).unwrap();
    bad += usize::from(naive(&basis.basis) != nb);

    for (pre, eff) in [(false, &nk), (true, &nb)] {
        let mem = train(keys, values, pre).unwrap();
        let m = oracle::naive_train(eff, &nv).unwrap();
        bad += usize::from(oracle::naive_matrix(mem.matrix()) != m);
        for (k, key) in keys.iter().enumerate() {
            // Raw recall of the key itself, preprocessed recall of its basis vector.
            let stim = if pre { &basis.basis[k] } else { key };
            let resp = mem.matrix().matvec_and(stim).unwrap();
            bad += usize::from(
                NaiveVector::from(&resp) != oracle::naive_recall(&m, &stim.into()).unwrap(),
            );
        }
    }
    bad
}

fn c3_oracle_equivalence(tally: &Tally) -> Outcome {
    let start = Instant::now();
    let mut rng = SplitMix64::new(SEED ^ 3);
    let mut mismatches = 0;
    let mut exhaustive = 0;
    for p in 1..=4usize {
        for q in 1..=3usize {
            for code in 0..(1u64 << (p * q)) {
                let keys = PatternSet::new(
                    (0..q)
                        .map(|k| {
                            BinaryVector::from_fn(p, |i| (code >> (k * p + i)) & 1 == 1).unwrap()
                        })
                        .collect(),
                )
                .unwrap();
                let values = random_set(&mut rng, p, q, 0.5);
                mismatches += oracle_mismatches(&keys, &values, tally);
                exhaustive += 1;
            }
        }
    }
    let densities = [0.5, 0.1, 0.02, 0.005];
    for t in 0..1000 {
        let keys = random_set(&mut rng, 257, 64, densities[t % densities.len()]);
        let values = random_set(&mut rng, 257, 64, 0.5);
        mismatches += oracle_mismatches(&keys, &values, tally);
    }
    check(mismatches == 0, || format!("{mismatches} mismatches"))?;
    Ok(format!(
        "{exhaustive} exhaustive + 1000 random (p=257, q=64) instances, 0 mismatches in {:?}",
        start.elapsed()
    ))
}

fn c4_capacity_bound(tally: &Tally) -> Outcome {
    check(tally.checked.get() > 0, || "no trials recorded".into())?;
    check(tally.worst_excess.get() <= 0, || {
        format!("nonzero count exceeded p by {}", tally.worst_excess.get())
    })?;
    let basis = orthonormalize(&PatternSet::identity(16).unwrap());
    let cap = capacity_report(&basis);
    check(cap.storable == 16 && cap.within_bound, || {
        format!("identity p=16: {cap:?}")
    })?;
    let mut rng = SplitMix64::new(SEED ^ 4);
    let values = random_set(&mut rng, 16, 16, 0.5);
    let mem = train(&basis.basis, &values, false).unwrap();
    let exact = (0..16)
        .filter(|&k| recall(&mem, &basis.basis[k]).unwrap().response == values[k])
        .count();
    check(exact == 16, || format!("identity p=16 recalled {exact}/16"))?;
    Ok(format!(
        "{} trials within bound; identity p=16 stores 16/16",
        tally.checked.get()
    ))
}

fn c5_capacity_maximum() -> Outcome {
    let shapes = [
        (7, 6, 0.5, 2000),
        (32, 32, 0.5, 1000),
        (64, 128, 0.05, 300),
        (16, 16, 0.2, 1000),
        (128, 256, 0.01, 100),
    ];
    let mut trials = 0;
    for (p, q, key_density, n) in shapes {
        let config = ExperimentConfig {
            p,
            q,
            trials: n,
            seed: SEED,
            key_density,
            ..Default::default()
        };
        let report =
            experiment::run(ExperimentKind::Capacity, &config).map_err(|e| e.to_string())?;
        for t in &report.trials {
            check(t.perfect_recall == t.nonzero_basis, || {
                format!(
                    "p={p} q={q} trial {}: {} perfect vs {} nonzero",
                    t.trial, t.perfect_recall, t.nonzero_basis
                )
            })?;
        }
        check(report.passed(), || format!("p={p} q={q}: failed trials"))?;
        trials += report.trials.len();
    }
    Ok(format!(
        "{trials} trials, perfect recall == nonzero basis in all"
    ))
}

fn c6_superset() -> Outcome {
    let mut rng = SplitMix64::new(SEED ^ 6);
    let mut violations = 0;
    let mut recalls = 0;
    for t in 0..1000 {
        let p = [8, 33, 64, 100][t % 4];
        let q = 1 + (rng.next_u64() % 48) as usize;
        let density = [0.5, 0.1, 0.03][t % 3];
        let keys = random_set(&mut rng, p, q, density);
        let values = random_set(&mut rng, p, q, 0.5);
        let mem = train(&keys, &values, false).unwrap();
        for (k, key) in keys.iter().enumerate() {
            if key.is_zero() {
                continue;
            }
            let resp = recall(&mem, key).unwrap().response;
            violations += usize::from(!values[k].and_not(&resp).unwrap().is_zero());
            recalls += 1;
        }
    }
    check(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("1000 memories, {recalls} recalls, 0 violations"))
}

fn canonical(v: &BinaryVector) -> bool {
    BinaryVector::from_words(v.dimension(), v.words().to_vec()).is_ok()
}

fn c7_invariants() -> Outcome {
    let mut rng = SplitMix64::new(SEED ^ 7);
    let mut sets = 0;
    for p in [1, 63, 64, 65, 128, 1000] {
        for t in 0..200 {
            let q = 1 + (rng.next_u64() % 40) as usize;
            let density = [0.5, 0.05, 2.0 / p as f64][t % 3].min(1.0);
            let keys = random_set(&mut rng, p, q, density);
            let out = orthonormalize(&keys);
            let c = &out.basis;
            for k in 0..q {
                check(c[k].and_not(&keys[k]).unwrap().is_zero(), || {
                    format!("p={p}: support containment at {k}")
                })?;
                let via_in = keys[k].and_not(&prefix_union(&keys, k).unwrap()).unwrap();
                let via_out = keys[k].and_not(&prefix_union(c, k).unwrap()).unwrap();
                check(c[k] == via_in && c[k] == via_out, || {
                    format!("p={p}: prefix identity at {k}")
                })?;
                check(canonical(&c[k]), || format!("p={p}: padding at {k}"))?;
            }
            check(
                prefix_union(c, q).unwrap() == prefix_union(&keys, q).unwrap(),
                || format!("p={p}: union not preserved"),
            )?;
            check(orthonormalize(c).basis == *c, || {
                format!("p={p}: not idempotent")
            })?;

            let values = random_set(&mut rng, p, q, 0.5);
            let mem = train(&keys, &values, t % 2 == 0).unwrap();
            check(mem.matrix().rows().iter().all(canonical), || {
                format!("p={p}: matrix padding")
            })?;
            let x = keys[0].xor(&values[0]).unwrap();
            check(
                canonical(&x) && canonical(&mem.matrix().matvec_and(&x).unwrap()),
                || format!("p={p}: vector padding"),
            )?;
            sets += 1;
        }
    }
    Ok(format!("{sets} fuzzed sets across 6 boundary dimensions"))
}

fn c8_performance() -> Outcome {
    let mut rng = SplitMix64::new(SEED ^ 8);
    let keys = random_set(&mut rng, 4096, 1024, 0.002);
    let start = Instant::now();
    let basis = orthonormalize(&keys);
    let bop_time = start.elapsed();
    within(bop_time, Duration::from_secs(1), "BOP p=4096 q=1024")?;

    let keys = random_set(&mut rng, 1024, 1024, 0.5);
    let values = random_set(&mut rng, 1024, 1024, 0.5);
    let start = Instant::now();
    let mem = train(&keys, &values, false).unwrap();
    let mut set_bits = 0;
    for key in &keys {
        set_bits += recall(&mem, key).unwrap().response.support_count();
    }
    let sweep_time = start.elapsed();
    within(
        sweep_time,
        Duration::from_secs(1),
        "train + recall p=1024 q=1024",
    )?;
    std::hint::black_box((basis, set_bits));
    Ok(format!(
        "BOP {bop_time:?}, train+recall sweep {sweep_time:?}"
    ))
}

fn c9_fig4_demo() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("basis.txt");
    let input = dir.path().join("keys.txt");
    let status = Command::new(env!("CARGO_BIN_EXE_bcmm"))
        .args(["bop", "--verify", "--output"])
        .arg(&out)
        .arg("--save-input")
        .arg(&input)
        .env_remove("BCMM_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    check(status.status.success(), || {
        String::from_utf8_lossy(&status.stderr).into_owned()
    })?;
    let basis = patio::read_pattern_set(&out).map_err(|e| e.to_string())?;
    let keys = patio::read_pattern_set(&input).map_err(|e| e.to_string())?;
    check((basis.dimension(), basis.len()) == (7, 6), || {
        "demo shape is not 7x6".into()
    })?;
    check(orthonormalize(&keys).basis == basis, || {
        "basis is not the BOP of the demo keys".into()
    })?;
    let y = pairwise_ands(&basis);
    check(y.len() == 15 && y.iter().all(BinaryVector::is_zero), || {
        "nonzero Y column".into()
    })?;
    // Each bit position is claimed by at most one basis vector.
    for j in 0..7 {
        let owners = basis.iter().filter(|c| c.get(j)).count();
        check(owners <= 1, || {
            format!("position {j} owned by {owners} vectors")
        })?;
    }
    Ok("7x6 demo basis, all 15 pairwise AND columns zero".into())
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/golden")
        .join(name)
}

fn c10_persistence() -> Outcome {
    let mut files = 0;
    for name in ["p7", "p70"] {
        for kind in ["keys", "values"] {
            let path = golden(&format!("{kind}_{name}.txt"));
            let bytes = fs::read(&path).map_err(|e| e.to_string())?;
            let set = patio::read_pattern_set(&path).map_err(|e| e.to_string())?;
            check(patio::format_pattern_set(&set).as_bytes() == bytes, || {
                format!("{path:?} differs")
            })?;
            files += 1;
        }
        for mode in ["raw", "pre"] {
            let path = golden(&format!("memory_{name}_{mode}.bcmm"));
            let bytes = fs::read(&path).map_err(|e| e.to_string())?;
            let mem = patio::decode_memory(&bytes).map_err(|e| e.to_string())?;
            check(patio::encode_memory(&mem).unwrap() == bytes, || {
                format!("{path:?} differs")
            })?;
            files += 1;
        }
    }
    // Fresh write of the same content also matches byte for byte.
    let keys = patio::read_pattern_set(golden("keys_p70.txt")).unwrap();
    let values = patio::read_pattern_set(golden("values_p70.txt")).unwrap();
    let mem = train(&keys, &values, true).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bcmm");
    patio::write_memory(&mem, &path).unwrap();
    check(
        fs::read(&path).unwrap() == fs::read(golden("memory_p70_pre.bcmm")).unwrap(),
        || "fresh p=70 memory differs from golden".into(),
    )?;
    Ok(format!("{files} golden files round-trip byte-exact"))
}

#[test]
fn acceptance() {
    let tally = Tally {
        worst_excess: Cell::new(i64::MIN),
        checked: Cell::new(0),
    };
    let results: Vec<(&str, Outcome)> = vec![
        (
            "C1 perfect recall under orthonormality",
            c1_perfect_recall(),
        ),
        (
            "C2 BOP orthogonality, 10k sets",
            c2_bop_orthogonality(&tally),
        ),
        ("C3 oracle equivalence", c3_oracle_equivalence(&tally)),
        ("C4 capacity bound", c4_capacity_bound(&tally)),
        (
            "C5 recall count equals surviving basis",
            c5_capacity_maximum(),
        ),
        ("C6 recall superset property", c6_superset()),
        ("C7 invariant suite at word boundaries", c7_invariants()),
        ("C8 performance", c8_performance()),
        ("C9 7x6 demo verification", c9_fig4_demo()),
        ("C10 golden-file persistence", c10_persistence()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
