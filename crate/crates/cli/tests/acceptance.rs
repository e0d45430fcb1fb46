//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};

use charp_cli::scan::{evaluate_cell, ScanRecord};
use charp_cli::{run, Cli};
use charp_core::cohom::{
    b1_dims, chi_b1, frobenius_htop_map, h0_quotient_basis, hasse_witt, htop_kernel_basis,
    B1Table, HypersurfaceDatum,
};
use charp_core::criteria::{
    acm_check_b1, default_window, fedder_is_split, fsplit_equivalence_check, is_ordinary_curve,
    kunneth_ulrich_check, ulrich_check_curve, ulrich_twist_obstruction,
};
use charp_core::families::{make_fermat, random_hypersurface, random_plane_curve, FamilySpec};
use charp_core::verdict::{Evidence, Verdict, VerdictValue};
use charp_core::{FpMatrix, Monomial, MultiPoly, PrimeField};
use clap::Parser;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn acm_cells(v: &Verdict) -> Result<&charp_core::verdict::AcmEvidence, String> {
    match &v.evidence {
        Evidence::Acm(e) => Ok(e),
        other => Err(format!("expected ACM evidence, got {other:?}")),
    }
}

fn fedder_coefficient(v: &Verdict) -> Result<u32, String> {
    match &v.evidence {
        Evidence::Fedder(e) => Ok(e.coefficient),
        other => Err(format!("expected Fedder evidence, got {other:?}")),
    }
}

fn fermat_quartic_p3() -> Outcome {
    let x = make_fermat(3, 3, 4).map_err(err)?;
    let split = fedder_is_split(&x).map_err(err)?;
    ensure!(!split.is_positive(), "Fedder says split");
    let row = b1_dims(&x, 0);
    ensure!(row.dims[1] == 1, "h^1(B^1) = {}, expected 1", row.dims[1]);
    let acm = acm_check_b1(&x, default_window(&x)).map_err(err)?;
    let expected = VerdictValue::FailsAt {
        twist: 0,
        index: 1,
        dimension: 1,
    };
    ensure!(acm.value == expected, "ACM verdict {:?}", acm.value);
    Ok("not split, h^1(B^1)=1, ACM fails-at(m=0, i=1, dim 1)".into())
}

fn fermat_quartic_p5() -> Outcome {
    let x = make_fermat(5, 3, 4).map_err(err)?;
    let split = fedder_is_split(&x).map_err(err)?;
    ensure!(split.is_positive(), "Fedder says not split");
    let c = fedder_coefficient(&split)?;
    ensure!(c == 4, "witness {c}, expected 4");
    let acm = acm_check_b1(&x, 8).map_err(err)?;
    ensure!(
        acm.value == VerdictValue::CertifiedBySplitting,
        "ACM verdict {:?}",
        acm.value
    );
    let e = acm_cells(&acm)?;
    ensure!(e.window == (-8, 0), "window {:?}", e.window);
    ensure!(
        e.cells.iter().all(|c| c.kernel_dim == 0),
        "nonzero kernel in {:?}",
        e.cells
    );
    Ok(format!("split (witness 4), ACM certified, {} cells all zero", e.cells.len()))
}

fn equivalence_random_quartics() -> Outcome {
    let mut checked = 0;
    for (p, seeds) in [(5u64, 0..50u64), (3, 0..20)] {
        for seed in seeds {
            let x = random_hypersurface(p, 3, 4, seed).map_err(err)?;
            let v = fsplit_equivalence_check(&x).map_err(err)?;
            ensure!(
                v.value == VerdictValue::Consistent,
                "p={p} seed={seed}: {:?}",
                v.evidence
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} quartic surfaces consistent"))
}

fn ulrich_matches_hasse_witt() -> Outcome {
    let mut ordinary = 0;
    let mut total = 0;
    for p in [3u64, 5] {
        for seed in 0..30 {
            let x = random_plane_curve(p, 4, seed).map_err(err)?;
            let hw = hasse_witt(&x).map_err(err)?;
            ensure!(hw.rows() == 3 && hw.cols() == 3, "p={p} seed={seed}: HW not 3x3");
            let u = ulrich_check_curve(&x).map_err(err)?;
            ensure!(
                u.is_positive() == hw.is_invertible(),
                "p={p} seed={seed}: Ulrich {} vs HW invertible {}",
                u.is_positive(),
                hw.is_invertible()
            );
            ordinary += usize::from(hw.is_invertible());
            total += 1;
        }
    }
    Ok(format!("{total} quartics agree ({ordinary} ordinary)"))
}

fn legendre_oracles() -> Outcome {
    let mut cells = 0;
    let mut supersingular = Vec::new();
    for p in [3u64, 5, 7, 11, 13] {
        for lambda in 2..p {
            let spec = FamilySpec::LegendreCubic { p, lambda };
            let verdicts = evaluate_cell(&spec).map_err(err)?;
            ensure!(
                verdicts[1].value == VerdictValue::Consistent,
                "oracles disagree at {spec}: {:?}",
                verdicts[1].evidence
            );
            let hw = hasse_witt(&spec.build().map_err(err)?).map_err(err)?;
            ensure!(
                verdicts[0].is_positive() == hw.is_invertible(),
                "ordinary verdict disagrees with Hasse-Witt at {spec}"
            );
            if !verdicts[0].is_positive() {
                supersingular.push((p, lambda));
            }
            cells += 1;
        }
    }
    Ok(format!("{cells} cells agree, supersingular {supersingular:?}"))
}

fn fermat_tables() -> Outcome {
    for (p, want) in [(7u64, true), (13, true), (2, false), (5, false)] {
        let x = make_fermat(p, 2, 3).map_err(err)?;
        let v = is_ordinary_curve(&x).map_err(err)?;
        ensure!(v.is_positive() == want, "Fermat cubic p={p}: ordinary={}", v.is_positive());
    }
    for (p, want) in [(5u64, true), (13, true), (3, false), (7, false), (11, false)] {
        let x = make_fermat(p, 3, 4).map_err(err)?;
        let v = fedder_is_split(&x).map_err(err)?;
        ensure!(v.is_positive() == want, "Fermat quartic p={p}: split={}", v.is_positive());
    }
    Ok("cubic ordinary at 7,13 not 2,5; quartic split at 5,13 not 3,7,11".into())
}

fn invoke(args: &[&str]) -> Result<(i32, String, String), String> {
    let cli = Cli::try_parse_from(std::iter::once("charp").chain(args.iter().copied()))
        .map_err(err)?;
    let (mut out, mut errs) = (Vec::new(), Vec::new());
    let code = run(&cli, &mut out, &mut errs).map_err(err)?;
    Ok((
        code,
        String::from_utf8(out).map_err(err)?,
        String::from_utf8(errs).map_err(err)?,
    ))
}

fn read_log(path: &std::path::Path) -> Result<Vec<ScanRecord>, String> {
    std::fs::read_to_string(path)
        .map_err(err)?
        .lines()
        .map(|l| ScanRecord::parse_line(l).map_err(err))
        .collect()
}

fn dwork_scan() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let serial = dir.path().join("dwork.jsonl");
    let parallel = dir.path().join("dwork-parallel.jsonl");
    let scan = |path: &std::path::Path, jobs: &str| {
        invoke(&[
            "scan", "--family", "dwork", "--p", "13", "--n", "2", "--lambda", "all", "--jobs", jobs,
            "--out", path.to_str().unwrap(),
        ])
    };
    let (code, first, log) = scan(&serial, "1")?;
    ensure!(code == 0, "exit code {code}");
    ensure!(log.starts_with("13 new records"), "first run: {log}");
    let records = read_log(&serial)?;
    ensure!(records.len() == 13, "{} rows", records.len());
    ensure!(records.iter().all(ScanRecord::digest_matches), "digest mismatch");

    let (_, second, log) = scan(&serial, "1")?;
    ensure!(log.starts_with("0 new records"), "rerun: {log}");
    ensure!(read_log(&serial)?.len() == 13, "rerun appended rows");
    ensure!(first == second, "summary changed on rerun");

    let split: Vec<u64> = records
        .iter()
        .filter(|r| r.verdicts[1].is_positive())
        .map(|r| match r.family {
            FamilySpec::Dwork { lambda, .. } => lambda,
            _ => u64::MAX,
        })
        .collect();
    ensure!(!split.is_empty(), "no split member");
    let summary: serde_json::Value = serde_json::from_str(&first).map_err(err)?;
    let counted = summary["counts"]["split"]["positive"].as_u64();
    ensure!(counted == Some(split.len() as u64), "summary split count {counted:?} vs {}", split.len());
    let non_split = summary["negative_members"]
        .get("split")
        .and_then(|v| v.as_array())
        .map_or(0, Vec::len);
    ensure!(non_split + split.len() == 13, "non-split members miscounted");

    scan(&parallel, "4")?;
    let strip = |mut rs: Vec<ScanRecord>| {
        rs.iter_mut().for_each(|r| r.timestamp.clear());
        rs
    };
    ensure!(
        strip(records) == strip(read_log(&parallel)?),
        "jobs=1 and jobs=4 logs differ"
    );
    Ok(format!(
        "13 rows, rerun adds 0, {} split (lambda {split:?}), {non_split} not split, jobs 1 == jobs 4",
        split.len()
    ))
}

fn kunneth_products() -> Outcome {
    let table = |p: u64| -> Result<B1Table, String> {
        let x = make_fermat(p, 2, 3).map_err(err)?;
        Ok(B1Table::compute(&x, -1..=1))
    };
    let ok = kunneth_ulrich_check(&[table(7)?, table(7)?]).map_err(err)?;
    ensure!(ok.value == VerdictValue::Holds, "ordinary x ordinary: {:?}", ok.value);
    let bad = kunneth_ulrich_check(&[table(5)?, table(7)?]).map_err(err)?;
    let Evidence::Kunneth(e) = &bad.evidence else {
        return Err("wrong evidence".into());
    };
    let cell = e.first_failure.as_ref().ok_or("supersingular factor not detected")?;
    ensure!(cell.k == 1 && cell.t == 1, "first failure at k={}, t={}", cell.k, cell.t);
    Ok(format!(
        "E7 x E7 Ulrich; E5 x E7 fails: {} = {} at k={}, t={}",
        cell.condition, cell.value, cell.k, cell.t
    ))
}

fn obstruction() -> Outcome {
    let x = make_fermat(3, 3, 4).map_err(err)?;
    let v = ulrich_twist_obstruction(&x, -10..=10).map_err(err)?;
    ensure!(v.value == VerdictValue::Obstructed, "verdict {:?}", v.value);
    let Evidence::Obstruction(e) = &v.evidence else {
        return Err("wrong evidence".into());
    };
    ensure!(e.rows.len() == 21, "{} rows", e.rows.len());
    let row = e.rows.iter().find(|r| r.t == 0).ok_or("no row at t=0")?;
    ensure!(row.chi_minus_one == 16, "chi(B^1(-1)) = {}", row.chi_minus_one);
    Ok(format!(
        "obstructed on [-10, 10]; t=0: chi(B^1(-1))={}, chi(B^1(-2))={}",
        row.chi_minus_one, row.chi_minus_two
    ))
}

fn rank_nullity(m: &FpMatrix) -> Result<(), String> {
    ensure!(
        m.rank() + m.kernel_dim() == m.cols(),
        "rank-nullity fails on a {}x{} matrix",
        m.rows(),
        m.cols()
    );
    for v in m.kernel_basis() {
        ensure!(m.apply(&v).map_err(err)?.iter().all(|&c| c == 0), "kernel vector not killed");
    }
    Ok(())
}

fn random_poly(rng: &mut ChaCha8Rng) -> MultiPoly {
    let p = [2u64, 3, 5, 7, 11, 13][rng.gen_range(0..6)];
    let nvars = rng.gen_range(1..4);
    let terms: Vec<(Monomial, u32)> = (0..rng.gen_range(0..6))
        .map(|_| {
            let e = (0..nvars).map(|_| rng.gen_range(0..4)).collect();
            (Monomial::new(e), rng.gen_range(0..p as u32))
        })
        .collect();
    MultiPoly::from_terms(PrimeField::new(p).unwrap(), nvars, terms)
}

fn invariant_suite() -> Outcome {
    let mut instances: Vec<HypersurfaceDatum> = Vec::new();
    for (p, n, d) in [(3u64, 3, 4), (5, 3, 4), (7, 2, 3), (5, 2, 4)] {
        instances.push(make_fermat(p, n, d).map_err(err)?);
    }
    for seed in 0..6 {
        instances.push(random_hypersurface(5, 3, 4, seed).map_err(err)?);
        instances.push(random_plane_curve(3, 4, seed).map_err(err)?);
    }
    let (mut rows, mut twists, mut matrices) = (0, 0, 0);
    for x in &instances {
        let top = x.canonical_level();
        let from = -default_window(x);
        for m in from..=top {
            let row = b1_dims(x, m);
            ensure!(row.euler_characteristic() == chi_b1(x, m), "chi additivity at m={m}");
            rows += 1;
            let dual = top - m;
            ensure!(
                htop_kernel_basis(x, m).len() == h0_quotient_basis(x, dual).len(),
                "Serre duality at m={m} for {}",
                x.polynomial()
            );
            twists += 1;
            rank_nullity(&frobenius_htop_map(x, m).matrix)?;
            matrices += 1;
        }
        if x.n() == 2 {
            rank_nullity(&hasse_witt(x).map_err(err)?)?;
            matrices += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let f = random_poly(&mut rng);
        let p = f.modulus();
        ensure!(
            f.pow(p as u64).map_err(err)? == f.scale_exponents(p).map_err(err)?,
            "f^p != f(x^p) for {f}"
        );
    }

    let mut permuted = 0;
    for seed in 0..20u64 {
        let (p, n, d) = [(2u64, 3, 4), (3, 3, 4), (5, 2, 4), (3, 2, 3)][(seed % 4) as usize];
        let x = random_hypersurface(p, n, d, seed).map_err(err)?;
        let mut perm: Vec<usize> = (0..x.nvars()).collect();
        perm.shuffle(&mut rng);
        let y = x.permute_vars(&perm).map_err(err)?;
        for s in -1..=1 {
            ensure!(b1_dims(&x, s).dims == b1_dims(&y, s).dims, "b1 dims differ under {perm:?}");
        }
        if x.degree() as usize <= x.n() + 1 {
            ensure!(
                fedder_is_split(&x).map_err(err)?.is_positive()
                    == fedder_is_split(&y).map_err(err)?.is_positive(),
                "splitting differs under {perm:?}"
            );
        }
        permuted += 1;
    }
    Ok(format!(
        "{rows} chi rows, {twists} duality twists, {matrices} matrices, 100 Frobenius polys, {permuted} permutations"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Fermat quartic surface, p = 3", fermat_quartic_p3),
        ("Fermat quartic surface, p = 5", fermat_quartic_p5),
        ("splitting equivalence on random quartic surfaces", equivalence_random_quartics),
        ("Ulrich B^1 vs Hasse-Witt on random plane quartics", ulrich_matches_hasse_witt),
        ("Legendre oracles", legendre_oracles),
        ("Fermat ordinarity and splitting tables", fermat_tables),
        ("Dwork scan, p = 13", dwork_scan),
        ("Kunneth products of elliptic curves", kunneth_products),
        ("Euler characteristic obstruction", obstruction),
        ("invariant suite", invariant_suite),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
