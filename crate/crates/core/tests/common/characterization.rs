//! Safety of random schemes against homogeneity plus incremental binding,
//! and the static binding check against the unfolding one.

use hpl_core::comptree::{
    build_comp_graph, check_incremental_binding_static, check_incremental_binding_unfold, DEFAULT_UNFOLD_NODE_BOUND,
};
use hpl_core::scheme::is_safe_knu;
use hpl_core::testkit::random_scheme_source;
use hpl_core::scheme::parse_scheme;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{run_seeded, Outcome};

pub const SCHEMES: u32 = 500;

pub fn characterization() -> Outcome {
    run_seeded("safe iff homogeneous and incrementally bound", SCHEMES, |seed| {
        let src = random_scheme_source(&mut ChaCha8Rng::seed_from_u64(seed));
        let g = parse_scheme(&src).expect("generated schemes parse");
        prop_assert!(g.dead_rules().is_empty());
        let cg = build_comp_graph(&g);
        let ib = check_incremental_binding_static(&cg).is_empty();
        prop_assert_eq!(is_safe_knu(&g), g.all_homogeneous() && ib, "{}", src);
        let k = 2 * g.nonterminals().len();
        let unfolded = check_incremental_binding_unfold(&g, k, DEFAULT_UNFOLD_NODE_BOUND);
        prop_assert!(unfolded.is_ok(), "unfolding failed: {:?}\n{}", unfolded, src);
        prop_assert_eq!(unfolded.unwrap().is_empty(), ib, "static and unfolding checks differ\n{}", src);
        Ok(true)
    })
}
