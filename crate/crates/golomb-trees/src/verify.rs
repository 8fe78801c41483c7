//! The cross-verification suite behind the `verify` command.
//!
//! Every check pits at least two independent computation paths against
//! each other over a parameter grid: the memoized recursion, the
//! leaf-weight count on the trees, the structural pruning bookkeeping, and
//! the closed forms. All comparisons are exact integer equality; a check
//! reports the number of equalities it tested and up to a handful of
//! concrete counterexamples when something disagrees.

use std::collections::BTreeSet;

use crate::closed_forms::{
    closed_form_j1, closed_form_lambda1, frequency_lambda1, golomb_closed, reduce_params,
};
use crate::pruning::{prune, structurally_equal, verify_prune_identity};
use crate::recurrence::{
    analyze, eval_general, eval_golomb, FrequencyTable, GeneralParams, GolombParams,
    InitialConditions,
};
use crate::tree::{
    initial_conditions, labels_through, leaf_weight_sequence, prefix_view, TreeVariant,
};

/// Grid bounds for one suite run. Tree-backed checks run to `n_tree`,
/// closed-form checks to `n_closed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridConfig {
    pub j_max: i64,
    pub lambda_max: i64,
    pub s_max: i64,
    pub n_tree: usize,
    pub n_closed: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            j_max: 3,
            lambda_max: 3,
            s_max: 3,
            n_tree: 2000,
            n_closed: 20000,
        }
    }
}

const MAX_REPORTED_FAILURES: usize = 8;

/// Result of one named check: how many equalities were tested and which
/// ones failed (capped at a few printable examples).
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    name: &'static str,
    detail: String,
    cells: u64,
    failure_count: u64,
    failures: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            detail: String::new(),
            cells: 0,
            failure_count: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cells += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_REPORTED_FAILURES {
                self.failures.push(describe());
            }
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// Extra context shown in the report, e.g. the pinned instance a check
    /// pins down.
    pub fn detail(&self) -> &str {
        &self.detail
    }

    /// Number of exact equalities tested.
    pub fn cells(&self) -> u64 {
        self.cells
    }

    pub fn failure_count(&self) -> u64 {
        self.failure_count
    }

    pub fn failures(&self) -> &[String] {
        &self.failures
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

/// All check outcomes of one suite run.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    config: GridConfig,
    checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn config(&self) -> GridConfig {
        self.config
    }

    pub fn checks(&self) -> &[CheckOutcome] {
        &self.checks
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn total_cells(&self) -> u64 {
        self.checks.iter().map(CheckOutcome::cells).sum()
    }

    pub fn total_failures(&self) -> u64 {
        self.checks.iter().map(CheckOutcome::failure_count).sum()
    }
}

fn golomb_grid(config: &GridConfig) -> Vec<GolombParams> {
    let mut grid = Vec::new();
    for j in 1..=config.j_max {
        for s in 0..=config.s_max {
            for lambda in 1..=config.lambda_max {
                grid.push(GolombParams::new(j, s, lambda).expect("grid bounds are valid"));
            }
        }
    }
    grid
}

fn lambda1_grid(config: &GridConfig) -> Vec<GolombParams> {
    let mut grid = Vec::new();
    for j in 1..=config.j_max {
        for s in 0..=config.s_max {
            grid.push(GolombParams::new(j, s, 1).expect("grid bounds are valid"));
        }
    }
    grid
}

fn golomb_baseline(config: &GridConfig) -> CheckOutcome {
    let mut outcome = CheckOutcome::new("golomb-baseline");
    let params = GolombParams::new(1, 0, 1).expect("baseline parameters are valid");
    let init = InitialConditions::new(vec![1]).expect("non-empty");
    let seq = eval_golomb(params, &init, config.n_closed).expect("baseline evaluation succeeds");
    for n in 1..=config.n_closed {
        let expected = golomb_closed(n as i64);
        outcome.check(seq.get(n) == expected, || {
            format!("n={n}: recursion {} != closed {expected}", seq.get(n))
        });
    }
    outcome
}

fn odd_run_family(config: &GridConfig) -> CheckOutcome {
    let mut outcome = CheckOutcome::new("odd-run-family");
    let params = GeneralParams::new(1, 2, 0, 2).expect("parameters are valid");
    let init = InitialConditions::new(vec![1, 3, 3]).expect("non-empty");
    let seq = eval_general(params, &init, config.n_closed).expect("evaluation succeeds");
    let stats = analyze(&seq);
    outcome.check(stats.is_monotone, || "sequence is not monotone".to_string());
    outcome.check(!stats.is_slow, || {
        "sequence is slow, expected a step of 2".to_string()
    });
    let table = FrequencyTable::from_values(seq.values());
    let last = seq.last().expect("non-empty sequence");
    for (value, count) in table.iter() {
        outcome.check(value % 2 == 1, || format!("even value {value} occurred"));
        if value != last {
            outcome.check(count == value, || {
                format!("value {value} occurred {count} times, expected {value}")
            });
        }
    }
    outcome
}

fn weight_recursion(config: &GridConfig, variant: TreeVariant) -> CheckOutcome {
    let name = match variant {
        TreeVariant::Knot => "knot-weight-recursion",
        TreeVariant::Tail => "tail-weight-recursion",
    };
    let mut outcome = CheckOutcome::new(name);
    for params in golomb_grid(config) {
        let weights = leaf_weight_sequence(variant, params, config.n_tree);
        let init = initial_conditions(variant, params);
        let seq = eval_golomb(params, &init, config.n_tree).expect("grid evaluation succeeds");
        for n in 1..=config.n_tree {
            outcome.check(seq.get(n) == weights.get(n), || {
                format!(
                    "{params} n={n}: recursion {} != leaf weight {}",
                    seq.get(n),
                    weights.get(n)
                )
            });
        }
    }
    outcome
}

fn single_chain_collapse(config: &GridConfig) -> CheckOutcome {
    let mut outcome = CheckOutcome::new("single-chain-collapse");
    for params in lambda1_grid(config) {
        let knot = leaf_weight_sequence(TreeVariant::Knot, params, config.n_tree);
        let tail = leaf_weight_sequence(TreeVariant::Tail, params, config.n_tree);
        for n in 1..=config.n_tree {
            outcome.check(knot.get(n) == tail.get(n), || {
                format!(
                    "{params} n={n}: knot {} != tail {}",
                    knot.get(n),
                    tail.get(n)
                )
            });
        }
    }
    outcome
}

fn variant_value_sets(config: &GridConfig) -> CheckOutcome {
    let mut outcome = CheckOutcome::new("variant-value-sets");
    for params in golomb_grid(config) {
        let mut boundary = 0usize;
        let mut i = 0;
        loop {
            let through = labels_through(params, i);
            if through > config.n_tree as i128 {
                break;
            }
            boundary = through as usize;
            i += 1;
        }
        if boundary == 0 {
            continue;
        }
        let knot = leaf_weight_sequence(TreeVariant::Knot, params, boundary);
        let tail = leaf_weight_sequence(TreeVariant::Tail, params, boundary);
        let knot_values: BTreeSet<i64> = knot.values().iter().copied().collect();
        let tail_values: BTreeSet<i64> = tail.values().iter().copied().collect();
        outcome.check(knot_values == tail_values, || {
            format!("{params}: value sets diverge below label {boundary}")
        });
        outcome.check(knot.get(boundary) == tail.get(boundary), || {
            format!(
                "{params}: weights at the subtree boundary {boundary} diverge: {} vs {}",
                knot.get(boundary),
                tail.get(boundary)
            )
        });
    }
    outcome
}

fn general_specialization(config: &GridConfig) -> CheckOutcome {
    let mut outcome = CheckOutcome::new("general-specialization");
    for params in golomb_grid(config) {
        let step = params.step().expect("grid step fits");
        let general = GeneralParams::new(1, params.j(), params.s(), step)
            .expect("specialized parameters are valid");
        let init = initial_conditions(TreeVariant::Knot, params);
        let golomb = eval_golomb(params, &init, config.n_tree).expect("evaluation succeeds");
        let family = eval_general(general, &init, config.n_tree).expect("evaluation succeeds");
        for n in 1..=config.n_tree {
            outcome.check(golomb.get(n) == family.get(n), || {
                format!(
                    "{params} n={n}: specialized {} != general {}",
                    golomb.get(n),
                    family.get(n)
                )
            });
        }
    }
    outcome
}

fn residue_classes(config: &GridConfig) -> CheckOutcome {
    let mut outcome = CheckOutcome::new("residue-classes");
    for params in lambda1_grid(config) {
        let init = initial_conditions(TreeVariant::Knot, params);
        let seq = eval_golomb(params, &init, config.n_tree).expect("evaluation succeeds");
        for n in 1..=config.n_tree {
            let value = seq.get(n);
            outcome.check((value - 1) % params.j() == 0, || {
                format!("{params} n={n}: value {value} escapes the residue class")
            });
        }
    }
    outcome
}

fn prune_identity(config: &GridConfig) -> CheckOutcome {
    let mut outcome = CheckOutcome::new("prune-identity");
    for params in golomb_grid(config) {
        let from = params
            .initial_segment_len()
            .expect("grid segment length fits")
            + 1;
        let checks = verify_prune_identity(params, from, config.n_tree as i64)
            .expect("range starts above the initial segment");
        for check in checks {
            outcome.check(check.pass, || {
                format!(
                    "{params} n={}: structural d={} formula d={} drop={} match={}",
                    check.n,
                    check.d_structural,
                    check.d_formula,
                    check.weight_drop,
                    check.structural_match
                )
            });
        }
    }
    outcome
}

fn prune_pinned_instance() -> CheckOutcome {
    let mut outcome = CheckOutcome::new("prune-pinned-instance");
    let params = GolombParams::new(2, 4, 3).expect("instance parameters are valid");
    outcome.detail = format!("prune K(52) -> K(31) at {params}");
    let view = prefix_view(TreeVariant::Knot, params, 52);
    match prune(&view) {
        Ok(pruned) => {
            outcome.check(pruned.d() == 31, || format!("d={}, expected 31", pruned.d()));
            outcome.check(pruned.labels_removed() == 21, || {
                format!("labels_removed={}, expected 21", pruned.labels_removed())
            });
            outcome.check(pruned.weight_drop() == 6, || {
                format!("weight_drop={}, expected 6", pruned.weight_drop())
            });
            let direct = prefix_view(TreeVariant::Knot, params, 31);
            outcome.check(structurally_equal(pruned.result(), &direct), || {
                "pruned view differs from the direct view at cutoff 31".to_string()
            });
        }
        Err(err) => outcome.check(false, || format!("prune failed: {err}")),
    }
    outcome
}

fn run_length_formula(config: &GridConfig) -> CheckOutcome {
    let mut outcome = CheckOutcome::new("run-length-formula");
    for params in lambda1_grid(config) {
        let init = initial_conditions(TreeVariant::Knot, params);
        let seq = eval_golomb(params, &init, config.n_closed).expect("evaluation succeeds");
        let table = FrequencyTable::from_values(seq.values());
        let last = seq.last().expect("non-empty sequence");
        for (value, count) in table.iter() {
            if value == last {
                continue;
            }
            let expected =
                frequency_lambda1(params.j(), params.s(), value).expect("parameters are valid");
            outcome.check(count == expected, || {
                format!("{params}: value {value} occurred {count} times, formula says {expected}")
            });
        }
        let mut value = 1;
        while value < last {
            let expected =
                frequency_lambda1(params.j(), params.s(), value).expect("parameters are valid");
            outcome.check(table.count(value) == expected, || {
                format!(
                    "{params}: value {value} occurred {} times, formula says {expected}",
                    table.count(value)
                )
            });
            value += params.j();
        }
    }
    outcome
}

fn closed_form_agreement(config: &GridConfig) -> CheckOutcome {
    let mut outcome = CheckOutcome::new("closed-form-agreement");
    for params in lambda1_grid(config) {
        let init = initial_conditions(TreeVariant::Knot, params);
        let seq = eval_golomb(params, &init, config.n_closed).expect("evaluation succeeds");
        for n in 1..=config.n_closed {
            match closed_form_lambda1(params.j(), params.s(), n as i64) {
                Ok(value) => outcome.check(value == seq.get(n), || {
                    format!(
                        "{params} n={n}: closed form {value} != recursion {}",
                        seq.get(n)
                    )
                }),
                Err(err) => outcome.check(false, || format!("{params} n={n}: {err}")),
            }
        }
    }
    outcome
}

fn parameter_reduction(config: &GridConfig) -> CheckOutcome {
    let mut outcome = CheckOutcome::new("parameter-reduction");
    let n_max = config.n_closed.min(10_000) as i64;
    for j in 1..=config.j_max {
        for s in j..=j + 6 {
            let reduced = reduce_params(j, s).expect("s >= j by construction");
            for n in 1..=n_max {
                let direct = closed_form_lambda1(j, s, n);
                let shifted = closed_form_lambda1(j, reduced.r, n + reduced.alpha)
                    .map(|v| v - reduced.q * j);
                outcome.check(direct == shifted, || {
                    format!("j={j} s={s} n={n}: direct {direct:?} != reduced {shifted:?}")
                });
            }
        }
    }
    outcome
}

fn display_formula(config: &GridConfig) -> CheckOutcome {
    let mut outcome = CheckOutcome::new("display-formula");
    for s in 0..=6 {
        for n in 1..=config.n_closed as i64 {
            let display = closed_form_j1(s, n);
            let reference = closed_form_lambda1(1, s, n);
            outcome.check(display == reference, || {
                format!("s={s} n={n}: display {display:?} != closed form {reference:?}")
            });
            if s == 0 {
                let golomb = golomb_closed(n);
                outcome.check(display == Ok(golomb), || {
                    format!("n={n}: display {display:?} != golomb closed {golomb}")
                });
            }
        }
    }
    outcome
}

/// Runs every check against the given grid.
pub fn run_suite(config: &GridConfig) -> SuiteReport {
    let checks = vec![
        golomb_baseline(config),
        odd_run_family(config),
        weight_recursion(config, TreeVariant::Knot),
        weight_recursion(config, TreeVariant::Tail),
        single_chain_collapse(config),
        variant_value_sets(config),
        general_specialization(config),
        residue_classes(config),
        prune_identity(config),
        prune_pinned_instance(),
        run_length_formula(config),
        closed_form_agreement(config),
        parameter_reduction(config),
        display_formula(config),
    ];
    SuiteReport {
        config: *config,
        checks,
    }
}
