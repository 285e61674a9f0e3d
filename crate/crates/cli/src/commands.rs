use std::fmt::Write;
use std::path::{Path, PathBuf};

use hpl_core::comptree::{build_comp_graph, check_incremental_binding_static, to_dot, CompGraph};
use hpl_core::cpda::{
    build_cpda, long_oview, oview, pview, safety_monitor, trace_run, traversal_log, Configuration, Machine,
    StepOutcome, TraceOptions,
};
use hpl_core::hostack::Sym;
use hpl_core::pda::{derive_pda, lockstep_check, parse_pda, pda_to_hors, DeriveOptions, PdaMachine};
use hpl_core::scheme::{
    is_safe_knu, parse_scheme, rewrite_tree_with, syntactic_safety_check, RecursionScheme,
};
use hpl_core::{Exec, ValueTree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::{Common, Derive, Engine, Format, Predicate, FIXTURE_DIR_VAR};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Core(#[from] hpl_core::Error),
    #[error("format `{0}` is not available for this command")]
    Format(&'static str),
}

impl CliError {
    pub fn code(&self) -> u8 {
        use hpl_core::Error as E;
        match self {
            CliError::Io { .. } | CliError::Format(_) => 2,
            CliError::Core(E::NotIncrementallyBound(_)) => 1,
            CliError::Core(E::Machine(_) | E::Stack(_) | E::BudgetExceeded(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

pub struct Output {
    pub text: String,
    pub ok: bool,
}

type Result<T> = std::result::Result<T, CliError>;

fn pass(text: String) -> Result<Output> {
    Ok(Output { text, ok: true })
}

fn resolve(path: &Path) -> PathBuf {
    if !path.exists() && path.is_relative() {
        if let Some(dir) = std::env::var_os(FIXTURE_DIR_VAR) {
            let p = Path::new(&dir).join(path);
            if p.exists() {
                return p;
            }
        }
    }
    path.to_path_buf()
}

fn read(path: &Path) -> Result<String> {
    let p = resolve(path);
    std::fs::read_to_string(&p).map_err(|source| CliError::Io { path: p, source })
}

fn load_scheme(c: &Common) -> Result<RecursionScheme> {
    Ok(parse_scheme(&read(&c.file)?)?)
}

fn fmt_name(f: Format) -> &'static str {
    match f {
        Format::Sexp => "sexp",
        Format::Json => "json",
        Format::Dot => "dot",
    }
}

/// The requested format, if it is one of `allowed`; the first is the default.
fn format(c: &Common, allowed: &[Format]) -> Result<Format> {
    match c.format {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(CliError::Format(fmt_name(f))),
    }
}

fn json_text(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn opts(d: Derive) -> DeriveOptions {
    DeriveOptions {
        uniform: d.uniform,
        force: d.force,
    }
}

fn pda_of(g: &RecursionScheme, d: Derive) -> Result<(CompGraph, Machine, PdaMachine)> {
    let cg = build_comp_graph(g);
    let m = build_cpda(&cg)?;
    let p = derive_pda(&m, &cg, opts(d))?;
    Ok((cg, m, p))
}

pub fn check(c: &Common, predicate: Predicate) -> Result<Output> {
    let f = format(c, &[Format::Sexp, Format::Json])?;
    let g = load_scheme(c)?;
    let nts: Vec<_> = g
        .nonterminals()
        .iter()
        .map(|n| (n.name.clone(), n.ty.to_string(), n.ty.is_homogeneous()))
        .collect();
    let homogeneous = g.all_homogeneous();
    let unsafe_ops = syntactic_safety_check(&g);
    let safe = is_safe_knu(&g);
    let ib = check_incremental_binding_static(&build_comp_graph(&g));
    let dead = g.dead_rules();
    let ok = match predicate {
        Predicate::Safe => safe,
        Predicate::Homogeneous => homogeneous,
        Predicate::Ib => ib.is_empty(),
        Predicate::All => safe && ib.is_empty(),
    };
    let text = if f == Format::Json {
        json_text(json!({
            "homogeneous": homogeneous,
            "nonterminals": nts.iter().map(|(n, t, h)| json!({"name": n, "type": t, "homogeneous": h})).collect::<Vec<_>>(),
            "safe": safe,
            "safety_violations": unsafe_ops.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "incrementally_bound": ib.is_empty(),
            "binding_violations": ib.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "dead_rules": dead,
        }))
    } else {
        let mut s = String::new();
        writeln!(s, "homogeneous: {}", yes(homogeneous)).unwrap();
        for (n, t, h) in &nts {
            writeln!(s, "  {} : {}  {}", n, t, if *h { "homogeneous" } else { "not homogeneous" }).unwrap();
        }
        writeln!(s, "safe: {}", yes(safe)).unwrap();
        for v in &unsafe_ops {
            writeln!(s, "  {}", v).unwrap();
        }
        writeln!(s, "incrementally-bound: {}", yes(ib.is_empty())).unwrap();
        for v in &ib {
            writeln!(s, "  {}", v).unwrap();
        }
        let dead: Vec<&str> = dead.iter().map(String::as_str).collect();
        writeln!(s, "dead rules: {}", if dead.is_empty() { "none".into() } else { dead.join(" ") }).unwrap();
        s
    };
    Ok(Output { text, ok })
}

pub fn tree(c: &Common, engine: Engine, depth: usize, budget: u64, sequential: bool, d: Derive) -> Result<Output> {
    let f = format(c, &[Format::Sexp, Format::Json])?;
    let g = load_scheme(c)?;
    let exec = if sequential { Exec::Sequential } else { Exec::default() };
    let t = match engine {
        Engine::Rewrite => rewrite_tree_with(&g, depth, budget, exec),
        Engine::Cpda => build_cpda(&build_comp_graph(&g))?.generate_tree_with(depth, budget, exec),
        Engine::Pda => pda_of(&g, d)?.2.generate_tree_with(depth, budget, exec),
    };
    pass(render_tree(&t, f))
}

fn render_tree(t: &ValueTree, f: Format) -> String {
    match f {
        Format::Json => json_text(json!({ "tree": t.to_string() })),
        _ => format!("{}\n", t),
    }
}

pub fn to_pda(c: &Common, d: Derive) -> Result<Output> {
    format(c, &[Format::Sexp])?;
    let g = load_scheme(c)?;
    let (_, _, p) = pda_of(&g, d)?;
    pass(p.normalize()?.to_text()?)
}

pub fn to_hors(c: &Common) -> Result<Output> {
    format(c, &[Format::Sexp])?;
    let p = parse_pda(&read(&c.file)?)?;
    pass(pda_to_hors(&p)?.to_string())
}

pub fn roundtrip(c: &Common, depth: usize, budget: u64, d: Derive) -> Result<Output> {
    let f = format(c, &[Format::Sexp, Format::Json])?;
    let g = load_scheme(c)?;
    let (_, _, p) = pda_of(&g, d)?;
    let out = pda_to_hors(&p)?;
    let before = rewrite_tree_with(&g, depth, budget, Exec::default());
    // Each source step may take several steps in the rebuilt scheme.
    let after = rewrite_tree_with(&out, depth, budget.saturating_mul(16), Exec::default());
    let equal = before == after;
    let safe = is_safe_knu(&out);
    let verdict = if equal { "PASS" } else { "FAIL" };
    let text = if f == Format::Json {
        json_text(json!({
            "scheme": out.to_string(),
            "safe": safe,
            "homogeneous": out.all_homogeneous(),
            "depth": depth,
            "tree_equal": equal,
            "verdict": verdict,
        }))
    } else {
        format!(
            "{}# safe: {}\n# tree comparison at depth {}: {}\n",
            out,
            yes(safe),
            depth,
            verdict
        )
    };
    Ok(Output { text, ok: equal && safe })
}

pub fn monitor(c: &Common, steps: usize) -> Result<Output> {
    let f = format(c, &[Format::Sexp, Format::Json])?;
    let g = load_scheme(c)?;
    let cg = build_comp_graph(&g);
    let m = build_cpda(&cg)?;
    let r = safety_monitor(&m, &cg, steps);
    let text = if f == Format::Json {
        json_text(serde_json::to_value(&r).expect("report serializes"))
    } else {
        let mut s = format!(
            "steps: {}\nconfigurations: {}\nviolations: {}\n",
            r.steps, r.configurations, r.violation_count
        );
        for v in &r.violations {
            writeln!(s, "  {}", v.describe(&m)).unwrap();
        }
        s
    };
    Ok(Output { text, ok: r.is_clean() })
}

pub fn lockstep(c: &Common, steps: usize, d: Derive) -> Result<Output> {
    let f = format(c, &[Format::Sexp, Format::Json])?;
    let g = load_scheme(c)?;
    let (_, m, p) = pda_of(&g, d)?;
    let r = lockstep_check(&m, &p, steps);
    let text = if f == Format::Json {
        json_text(serde_json::to_value(&r).expect("report serializes"))
    } else {
        let mut s = format!(
            "steps: {}\ncollapses: {}\nstack mismatches: {}\noutcome mismatches: {}\ncollapse mismatches: {}\n",
            r.steps, r.collapses, r.stack_mismatches, r.outcome_mismatches, r.collapse_mismatches
        );
        if let Some(first) = &r.first_mismatch {
            writeln!(s, "first mismatch: {}", first).unwrap();
        }
        s
    };
    Ok(Output { text, ok: r.is_clean() })
}

pub fn views(c: &Common, steps: usize, seed: u64) -> Result<Output> {
    let f = format(c, &[Format::Sexp, Format::Json])?;
    let g = load_scheme(c)?;
    let cg = build_comp_graph(&g);
    let m = build_cpda(&cg)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut path = Vec::new();
    let mut conf: Configuration = m.initial().clone();
    let mut taken = 0;
    while taken < steps {
        conf = match m.step(&conf) {
            StepOutcome::Internal(n) => n,
            StepOutcome::Output { mut succs, .. } if !succs.is_empty() => {
                let k = rng.gen_range(0..succs.len());
                path.push(k);
                succs.swap_remove(k)
            }
            _ => break,
        };
        taken += 1;
    }
    let names = |v: Vec<Sym>| v.into_iter().map(|s| m.label(s).to_string()).collect::<Vec<_>>();
    let p = names(pview(&conf));
    let o = names(oview(&conf, &cg));
    let lo = names(long_oview(&conf, &cg));
    let log = traversal_log(&m, &cg, taken, &path);
    let trace = trace_run(
        &m,
        taken,
        &TraceOptions {
            truncate: Some(100),
            path: path.clone(),
        },
    );
    let text = if f == Format::Json {
        json_text(json!({
            "steps": taken,
            "path": path,
            "stack": m.render_stack(&conf.stack),
            "pview": p,
            "oview": o,
            "long_oview": lo,
            "log": log.iter().map(|e| json!({"node": m.label(e.node), "justifier": e.justifier})).collect::<Vec<_>>(),
            "trace": trace,
        }))
    } else {
        let mut s = String::new();
        writeln!(s, "steps: {}", taken).unwrap();
        writeln!(s, "path: {:?}", path).unwrap();
        writeln!(s, "stack: {}", m.render_stack(&conf.stack)).unwrap();
        writeln!(s, "P-view: {}", p.join(" ")).unwrap();
        writeln!(s, "O-view: {}", o.join(" ")).unwrap();
        writeln!(s, "long O-view: {}", lo.join(" ")).unwrap();
        writeln!(s, "log:").unwrap();
        for (i, e) in log.iter().enumerate() {
            match e.justifier {
                Some(j) => writeln!(s, "  {} {} -> {}", i, cg.describe(e.node.into()), j).unwrap(),
                None => writeln!(s, "  {} {}", i, cg.describe(e.node.into())).unwrap(),
            }
        }
        writeln!(s, "trace:").unwrap();
        for l in trace {
            writeln!(s, "  {}", l).unwrap();
        }
        s
    };
    pass(text)
}

pub fn graph(c: &Common, binders: bool) -> Result<Output> {
    let f = format(c, &[Format::Dot, Format::Sexp])?;
    let g = load_scheme(c)?;
    let cg = build_comp_graph(&g);
    if f == Format::Dot {
        return pass(to_dot(&cg, binders));
    }
    let mut s = String::new();
    for (i, &root) in cg.rule_roots().iter().enumerate() {
        writeln!(s, "{}:", cg.rule_name(i)).unwrap();
        s.push_str(&cg.render_tree(root));
    }
    pass(s)
}
