//! Acceptance run: one line per criterion, nonzero exit if any fails.
//! Set `HPL_BLESS=1` to rewrite the stored monitor witness.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use hpl_core::comptree::{build_comp_graph, check_incremental_binding_static};
use hpl_core::cpda::{build_cpda, safety_monitor};
use hpl_core::pda::{derive_pda, lockstep_check, parse_pda, pda_to_hors, roundtrip_safe_scheme, DeriveOptions};
use hpl_core::scheme::{is_safe_knu, parse_scheme, rewrite_tree, syntactic_safety_check};
use hpl_core::testkit::{corpus, PHI_TWICE, NON_HOMOGENEOUS, NON_IB};
use hpl_core::ValueTree;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn within(limit: Duration, start: Instant, detail: String) -> Verdict {
    let took = start.elapsed();
    if took > limit {
        Err(format!("{} but took {:.2?} (limit {:?})", detail, took, limit))
    } else {
        Ok(format!("{} in {:.2?}", detail, took))
    }
}

fn example_reproduction() -> Verdict {
    let start = Instant::now();
    let g = parse_scheme(PHI_TWICE).map_err(|e| e.to_string())?;
    let cg = build_comp_graph(&g);
    let m = build_cpda(&cg).map_err(|e| e.to_string())?;
    let p = derive_pda(&m, &cg, DeriveOptions { force: true, ..Default::default() }).map_err(|e| e.to_string())?;
    let expected = "(g (a) (g (a) (h (h (h (h (CUT)))))))";
    let trees = [rewrite_tree(&g, 6, 100_000), m.generate_tree(6, 100_000), p.generate_tree(6, 100_000)];
    for (engine, t) in ["rewrite", "cpda", "pda"].iter().zip(&trees) {
        if t.to_string() != expected {
            return Err(format!("{} engine gave {}", engine, t));
        }
    }
    within(Duration::from_secs(1), start, format!("all engines give {} (PDA built with force)", expected))
}

fn triple_agreement() -> Verdict {
    let start = Instant::now();
    let schemes = corpus();
    let orders: std::collections::BTreeSet<u32> = schemes.iter().map(|(_, g)| g.order()).collect();
    let non_homogeneous = schemes.iter().filter(|(_, g)| !g.all_homogeneous()).count();
    if schemes.len() < 10 || non_homogeneous == 0 || orders != [1, 2, 3].into() {
        return Err(format!(
            "corpus has {} schemes, orders {:?}, {} non-homogeneous",
            schemes.len(),
            orders,
            non_homogeneous
        ));
    }
    for (name, g) in &schemes {
        let cg = build_comp_graph(g);
        let m = build_cpda(&cg).map_err(|e| format!("{}: {}", name, e))?;
        let p = derive_pda(&m, &cg, DeriveOptions::default()).map_err(|e| format!("{}: {}", name, e))?;
        let r = rewrite_tree(g, 8, 100_000);
        let c = m.generate_tree(8, 100_000);
        let d = p.generate_tree(8, 100_000);
        if r != c || c != d {
            return Err(format!("{}: rewrite {} / cpda {} / pda {}", name, r, c, d));
        }
    }
    within(
        Duration::from_secs(10),
        start,
        format!("{} schemes, orders {:?}, {} non-homogeneous", schemes.len(), orders, non_homogeneous),
    )
}

fn safety_monitor_clean() -> Verdict {
    let mut configurations = 0;
    for (name, g) in corpus() {
        let cg = build_comp_graph(&g);
        let m = build_cpda(&cg).map_err(|e| e.to_string())?;
        let r = safety_monitor(&m, &cg, 10_000);
        if !r.is_clean() {
            return Err(format!("{}: {}", name, r.violations[0].describe(&m)));
        }
        configurations += r.configurations;
    }
    Ok(format!("{} configurations checked, no violations", configurations))
}

fn lockstep_clean() -> Verdict {
    let mut collapses = 0;
    for (name, g) in corpus() {
        let cg = build_comp_graph(&g);
        let m = build_cpda(&cg).map_err(|e| e.to_string())?;
        let p = derive_pda(&m, &cg, DeriveOptions::default()).map_err(|e| e.to_string())?;
        let r = lockstep_check(&m, &p, 2_000);
        if !r.is_clean() {
            return Err(format!("{}: {}", name, r.first_mismatch.unwrap_or_default()));
        }
        collapses += r.collapses;
    }
    if collapses == 0 {
        return Err("no collapse was executed".into());
    }
    Ok(format!("{} collapses matched by pops", collapses))
}

fn characterization() -> Verdict {
    let o = common::characterization::characterization();
    if o.passed() {
        Ok(o.to_string())
    } else {
        Err(o.to_string())
    }
}

fn stack_lemmas() -> Verdict {
    let outcomes = common::lemmas::all();
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.to_string()).collect();
    if !failed.is_empty() {
        return Err(failed.join("; "));
    }
    let least = outcomes.iter().map(|o| o.applicable).min().unwrap_or(0);
    Ok(format!(
        "{} properties x {} cases, at least {} applicable each",
        outcomes.len(),
        common::lemmas::CASES,
        least
    ))
}

fn back_translation() -> Verdict {
    let dir = fixture_dir().join("pda");
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "pda"))
        .collect();
    names.sort();
    if names.len() < 5 {
        return Err(format!("only {} machines", names.len()));
    }
    for path in &names {
        let name = path.file_name().unwrap().to_string_lossy();
        let p = parse_pda(&std::fs::read_to_string(path).unwrap()).map_err(|e| format!("{}: {}", name, e))?;
        let h = pda_to_hors(&p).map_err(|e| format!("{}: {}", name, e))?;
        if !h.all_homogeneous() || !syntactic_safety_check(&h).is_empty() {
            return Err(format!("{}: output is not safe", name));
        }
        if !check_incremental_binding_static(&build_comp_graph(&h)).is_empty() {
            return Err(format!("{}: output is not incrementally bound", name));
        }
        let (a, b) = (p.generate_tree(8, 100_000), rewrite_tree(&h, 8, 1_000_000));
        if a != b {
            return Err(format!("{}: machine {} but scheme {}", name, a, b));
        }
    }
    Ok(format!("{} machines", names.len()))
}

fn round_trip() -> Verdict {
    let g = parse_scheme(NON_HOMOGENEOUS).map_err(|e| e.to_string())?;
    let r = roundtrip_safe_scheme(&g).map_err(|e| e.to_string())?;
    if !is_safe_knu(&r) {
        return Err("emitted scheme is not safe".into());
    }
    let (a, b) = (rewrite_tree(&g, 8, 100_000), rewrite_tree(&r, 8, 1_000_000));
    if a != b {
        return Err(format!("{} vs {}", a, b));
    }
    if a == ValueTree::Cut || a.contains_divergent() {
        return Err(format!("trivial tree {}", a));
    }
    Ok(format!("safe scheme with {} rules, trees equal to depth 8", r.rules().len()))
}

fn negative_witness() -> Verdict {
    let g = parse_scheme(NON_IB).map_err(|e| e.to_string())?;
    let cg = build_comp_graph(&g);
    let m = build_cpda(&cg).map_err(|e| e.to_string())?;
    let r = safety_monitor(&m, &cg, 10_000);
    let Some(w) = r.violations.iter().find(|v| v.kind.is_decomposition_witness()) else {
        return Err(format!("no decomposition witness among {} violations", r.violation_count));
    };
    let found = format!("{}\n", w.describe(&m));
    let path = fixture_dir().join("non_ib_witness.txt");
    if std::env::var_os("HPL_BLESS").is_some() {
        std::fs::write(&path, &found).map_err(|e| e.to_string())?;
    }
    let stored = std::fs::read_to_string(&path).map_err(|e| format!("{}: {}", path.display(), e))?;
    if stored != found {
        return Err(format!("witness changed: {}", found.trim()));
    }
    Ok(format!("matches stored witness: {}", found.trim()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("example reproduction", example_reproduction),
        ("triple agreement", triple_agreement),
        ("safety monitor", safety_monitor_clean),
        ("lockstep", lockstep_clean),
        ("characterization", characterization),
        ("stack lemmas", stack_lemmas),
        ("back-translation", back_translation),
        ("round trip", round_trip),
        ("negative witness", negative_witness),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} ({}): PASS - {}", i + 1, name, detail),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({}): FAIL - {}", i + 1, name, detail);
            }
        }
    }
    println!("acceptance: {} of {} passed in {:.2?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
