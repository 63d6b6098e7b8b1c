//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::time::Instant;

use prizealloc::analysis::{
    classify, fit_geometric, fit_proportional, FitParams, Tier, Tolerances,
};
use prizealloc::axioms::{
    check, run_axiom_matrix, Axiom, ConsistencyMode, MonotonicityMode, OrderMode, Relation,
    SampleBudget,
};
use prizealloc::cli::run_from_args;
use prizealloc::io::{load_prize_data, DataFormat, Report, ReportBody};
use prizealloc::model::{default_sum_tolerance, Competition, CompetitorId, EventSet, PrizeTable};
use prizealloc::rules::{
    allocate, bundled, prizes_by_position, CounterexampleRule, IntervalList, MonotoneFn,
    ParametricFamily, PiecewiseLinear, RuleSpec,
};
use prizealloc::solver::{solve_level, SolverConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TABLE_TOL: f64 = 1e-9;
const EQ_TOL: f64 = 1e-9;
const WITNESS_MARGIN: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-10;
const ROUND_TRIP_TOL: f64 = 1e-9;
const CASES: usize = 10_000;
const SEED: u64 = 20_190_101;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// Hand-transcribed tables: one string per n, rows for E = 1, 2, … separated
// by `|`, cells by spaces, fractions as `p/q`.
const GOLDEN: [(&str, &str, [&str; 3]); 5] = [
    (
        "interval:steps=1000",
        "1:6:1",
        [
            "1 0|1 1|2 1|2 2|3 2|3 3",
            "1 0 0|1 1 0|1 1 1|2 1 1|2 2 1|2 2 2",
            "1 0 0 0|1 1 0 0|1 1 1 0|1 1 1 1|2 1 1 1|2 2 1 1",
        ],
    ),
    (
        "wts:a=1",
        "1:6:1",
        [
            "1/2 1/2|1 1|2 1|3 1|4 1|5 1",
            "1/3 1/3 1/3|2/3 2/3 2/3|1 1 1|2 1 1|3 1 1|4 1 1",
            "1/4 1/4 1/4 1/4|1/2 1/2 1/2 1/2|3/4 3/4 3/4 3/4|1 1 1 1|2 1 1 1|3 1 1 1",
        ],
    ),
    (
        "sp:arithmetic",
        "1:8:1",
        [
            "1 0|3/2 1/2|2 1|5/2 3/2|3 2|7/2 5/2|4 3|9/2 7/2",
            "1 0 0|3/2 1/2 0|2 1 0|7/3 4/3 1/3|8/3 5/3 2/3|3 2 1|10/3 7/3 4/3|11/3 8/3 5/3",
            "1 0 0 0|3/2 1/2 0 0|2 1 0 0|7/3 4/3 1/3 0|8/3 5/3 2/3 0|3 2 1 0|13/4 9/4 5/4 1/4|7/2 5/2 3/2 1/2",
        ],
    ),
    (
        "cx:late-dollar",
        "1:8:1",
        [
            "1 0|1 1|2 1|2 2|3 2|3 3|4 3|4 4",
            "1 0 0|1 1 0|2 1 0|2 1 1|2 2 1|3 2 1|3 2 2|3 3 2",
            "1 0 0 0|1 1 0 0|2 1 0 0|2 1 1 0|2 2 1 0|3 2 1 0|3 2 1 1|3 2 2 1",
        ],
    ),
    (
        "param:hyperarithmetic",
        "1:8:1",
        [
            "1 0|2 0|5/2 1/2|3 1|7/2 3/2|4 2|9/2 5/2|5 3",
            "1 0 0|2 0 0|5/2 1/2 0|3 1 0|10/3 4/3 1/3|11/3 5/3 2/3|4 2 1|13/3 7/3 4/3",
            "1 0 0 0|2 0 0 0|5/2 1/2 0 0|3 1 0 0|10/3 4/3 1/3 0|11/3 5/3 2/3 0|4 2 1 0|17/4 9/4 5/4 1/4",
        ],
    ),
];

fn fraction(cell: &str) -> f64 {
    match cell.split_once('/') {
        Some((p, q)) => p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap(),
        None => cell.parse().unwrap(),
    }
}

fn golden_tables() -> Outcome {
    let mut cells = 0;
    let mut worst: f64 = 0.0;
    for (rule, range, blocks) in GOLDEN {
        let mut out = Vec::new();
        let code = run_from_args(
            [
                "prizealloc",
                "table",
                "--rule",
                rule,
                "--n",
                "2,3,4",
                "--endowments",
                range,
                "--json",
            ],
            &mut out,
            &mut std::io::sink(),
        );
        ensure(code == 0, || format!("{rule}: exit code {code}"))?;
        let report: Report = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        let ReportBody::Table { blocks: got } = report.result else {
            return Err(format!("{rule}: not a table"));
        };
        ensure(got.len() == 3, || format!("{rule}: {} blocks", got.len()))?;
        for (block, expected) in got.iter().zip(blocks) {
            let rows: Vec<&str> = expected.split('|').collect();
            ensure(block.rows.len() == rows.len(), || {
                format!("{rule} n={}: row count", block.n)
            })?;
            for (k, (row, want)) in block.rows.iter().zip(rows).enumerate() {
                ensure(row.endowment == (k + 1) as f64, || {
                    format!("{rule}: endowment {}", row.endowment)
                })?;
                let want: Vec<f64> = want.split(' ').map(fraction).collect();
                ensure(want.len() == block.n && row.prizes.len() == block.n, || {
                    format!("{rule}: width")
                })?;
                for (g, w) in row.prizes.iter().zip(&want) {
                    let err = (g - w).abs();
                    worst = worst.max(err);
                    cells += 1;
                    ensure(err <= TABLE_TOL, || {
                        format!(
                            "{rule} n={} E={}: got {:?}, want {:?}",
                            block.n, row.endowment, row.prizes, want
                        )
                    })?;
                }
            }
        }
    }
    Ok(format!("{cells} cells, max abs error {worst:.1e}"))
}

fn poker_fit() -> Outcome {
    let set = load_prize_data(Path::new("wcoop2019.json"), DataFormat::Json, None)
        .map_err(|e| e.to_string())?;
    let report = fit_geometric(&set.events[0], 0.01).map_err(|e| e.to_string())?;
    let FitParams::Geometric { lambda, .. } = report.params else {
        return Err("not a geometric fit".into());
    };
    ensure((0.708..=0.718).contains(&lambda), || {
        format!("lambda {lambda}")
    })?;
    ensure(report.max_rel_dev < 0.01, || {
        format!("deviation {}", report.max_rel_dev)
    })?;
    let tier = classify(&set, &Tolerances::default())
        .map_err(|e| e.to_string())?
        .tier;
    ensure(tier == Tier::LocallyConsistent, || format!("tier {tier}"))?;
    Ok(format!(
        "lambda {lambda:.4}, deviation {:.4}, tier {tier}",
        report.max_rel_dev
    ))
}

const GENESIS: [f64; 10] = [
    1674.0, 1014.0, 642.0, 456.0, 381.0, 337.0, 314.0, 291.0, 272.0, 253.0,
];

fn golf_classification() -> Outcome {
    let set = load_prize_data(Path::new("pga2019.json"), DataFormat::Json, None)
        .map_err(|e| e.to_string())?;
    let tol = Tolerances {
        tau_fit: 0.01,
        abs_slack: 1.0,
    };
    let c = classify(&set, &tol).map_err(|e| e.to_string())?;
    ensure(!c.geometric.verdict, || "geometric fit accepted".into())?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for event in &set.events {
        let r = fit_geometric(event, tol.tau_fit).map_err(|e| e.to_string())?;
        let FitParams::Geometric {
            min_ratio,
            max_ratio,
            ..
        } = r.params
        else {
            unreachable!()
        };
        lo = lo.min(min_ratio);
        hi = hi.max(max_ratio);
    }
    ensure(lo <= 0.61 && hi >= 0.83, || {
        format!("ratios span {lo:.3} to {hi:.3}")
    })?;
    ensure(c.proportional.verdict, || {
        format!("proportional deviation {}", c.proportional.max_rel_dev)
    })?;
    ensure(c.tier == Tier::TopConsistent, || format!("tier {}", c.tier))?;
    let FitParams::Proportional { shares } = &c.proportional.params else {
        unreachable!()
    };
    let genesis = set
        .events
        .iter()
        .find(|e| e.name.contains("Genesis"))
        .ok_or("no Genesis event")?;
    let rebuilt: Vec<f64> = shares
        .iter()
        .map(|s| s / 100.0 * genesis.endowment)
        .collect();
    for (k, (r, want)) in rebuilt.iter().zip(GENESIS).enumerate() {
        ensure((r - want).abs() <= 1.0, || {
            format!("position {}: {r:.2} vs {want}", k + 1)
        })?;
    }
    Ok(format!(
        "ratios {lo:.3} to {hi:.3}, tier {}, Genesis first prize {:.1}",
        c.tier, rebuilt[0]
    ))
}

// Rows in bundled order, columns in `Axiom::ALL` order.
const GOLDEN_MATRIX: [(&str, &str); 13] = [
    ("ed", "PPFFPPPPPPPPP"),
    ("wta", "PPPFPPFPPPPPP"),
    ("wts(1)", "PPFFPPFPFPPPP"),
    ("unit-step", "PPFFPFFPFPPPP"),
    ("geometric(0.5)", "PPPPPPPPPFFPP"),
    ("arithmetic", "PPPFPPFPFFFPP"),
    ("hyperarithmetic", "PPPFPPFPFFFFP"),
    ("golf-proportional", "PPPPPPPPPFFFP"),
    ("lowest-takes-all", "PFFFPFFPPPPPP"),
    ("threshold-switch", "PPFFFPFNFPPPP"),
    ("pair-favoritism", "FPFFPPFPPFFPP"),
    ("late-dollar", "PPFFPFFPFFFPP"),
    ("ed2-wta3", "PPFFPPFPPFFFF"),
];

fn symbol(code: char) -> &'static str {
    match code {
        'P' => "P",
        'F' => "F",
        _ => "N/A",
    }
}

fn axiom_matrix() -> Outcome {
    let rules = bundled();
    let budget = SampleBudget::default();
    let matrix = run_axiom_matrix(&rules, &budget).map_err(|e| e.to_string())?;
    ensure(matrix.rows.len() == GOLDEN_MATRIX.len(), || {
        format!("{} rows", matrix.rows.len())
    })?;
    let mut witnesses = 0;
    for ((label, verdicts), (want_label, want)) in matrix.rows.iter().zip(GOLDEN_MATRIX) {
        ensure(label == want_label, || {
            format!("row {label}, expected {want_label}")
        })?;
        let rule = &rules.iter().find(|(l, _)| l == label).unwrap().1;
        for ((axiom, v), code) in Axiom::ALL.iter().zip(verdicts).zip(want.chars()) {
            ensure(v.symbol() == symbol(code), || {
                format!(
                    "{label} {}: got {}, want {}",
                    axiom.name(),
                    v.symbol(),
                    symbol(code)
                )
            })?;
            if let Some(w) = v.witness() {
                let holds = w
                    .reverify(rule, budget.tolerance)
                    .map_err(|e| e.to_string())?;
                ensure(holds, || {
                    format!("{label} {}: witness does not re-verify", axiom.name())
                })?;
                // A strict relation is violated by a gap within tolerance,
                // so only the other relations carry a positive margin.
                let strict = matches!(w.relation, Relation::Less | Relation::Greater);
                ensure(strict || w.margin > WITNESS_MARGIN, || {
                    format!("{label} {}: margin {}", axiom.name(), w.margin)
                })?;
                witnesses += 1;
            }
        }
    }
    let geo = matrix
        .get("geometric(0.5)", Axiom::Consistency(ConsistencyMode::Full))
        .ok_or("missing cell")?;
    ensure(
        geo.witness().is_some_and(|w| w.margin > WITNESS_MARGIN),
        || "geometric witness margin".into(),
    )?;
    let hyper = matrix
        .get(
            "hyperarithmetic",
            Axiom::Consistency(ConsistencyMode::Local),
        )
        .ok_or("missing cell")?;
    ensure(
        hyper.witness().is_some_and(|w| w.margin > WITNESS_MARGIN),
        || "hyperarithmetic witness margin".into(),
    )?;
    Ok(format!(
        "{} rules x {} axioms match, {witnesses} witnesses re-verified",
        matrix.rows.len(),
        Axiom::ALL.len()
    ))
}

fn independence() -> Outcome {
    use Axiom::*;
    let budget = SampleBudget::default();
    let cases: [(CounterexampleRule, Axiom, Vec<Axiom>); 5] = [
        (
            CounterexampleRule::LowestTakesAll,
            OrderPreservation(OrderMode::Weak),
            vec![
                EndowmentMonotonicity(MonotonicityMode::Weak),
                Consistency(ConsistencyMode::Full),
            ],
        ),
        (
            CounterexampleRule::ThresholdSwitch,
            EndowmentMonotonicity(MonotonicityMode::Weak),
            vec![
                OrderPreservation(OrderMode::Weak),
                Consistency(ConsistencyMode::Full),
            ],
        ),
        (
            CounterexampleRule::pair_favoritism_default(),
            Anonymity,
            vec![
                OrderPreservation(OrderMode::Weak),
                EndowmentMonotonicity(MonotonicityMode::Weak),
                EndowmentMonotonicity(MonotonicityMode::WinnerStrict),
                Consistency(ConsistencyMode::Local),
                Consistency(ConsistencyMode::Top),
            ],
        ),
        (
            CounterexampleRule::LateDollar,
            EndowmentMonotonicity(MonotonicityMode::WinnerStrict),
            vec![
                Anonymity,
                OrderPreservation(OrderMode::Weak),
                Consistency(ConsistencyMode::Local),
                Consistency(ConsistencyMode::Top),
            ],
        ),
        (
            CounterexampleRule::Ed2Wta3,
            Consistency(ConsistencyMode::Local),
            vec![
                Anonymity,
                OrderPreservation(OrderMode::Weak),
                EndowmentMonotonicity(MonotonicityMode::WinnerStrict),
            ],
        ),
    ];
    let mut checked = 0;
    for (cx, fails, passes) in cases {
        let name = cx.name();
        let rule = RuleSpec::Counterexample(cx.clone());
        let mut failing = vec![fails];
        if matches!(cx, CounterexampleRule::Ed2Wta3) {
            failing.push(Consistency(ConsistencyMode::Top));
        }
        for axiom in failing {
            let v = check(&rule, axiom, &budget).map_err(|e| e.to_string())?;
            ensure(v.failed(), || {
                format!("{name} should fail {}", axiom.name())
            })?;
            checked += 1;
        }
        for axiom in passes {
            let v = check(&rule, axiom, &budget).map_err(|e| e.to_string())?;
            ensure(v.passed(), || {
                format!("{name} should pass {}", axiom.name())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} verdicts as expected"))
}

fn random_fn(rng: &mut ChaCha8Rng) -> MonotoneFn {
    match rng.random_range(0..5) {
        0 => MonotoneFn::Identity,
        1 => MonotoneFn::Linear(rng.random_range(0.0..=1.0)),
        2 => MonotoneFn::Shift(rng.random_range(0.0..3.0)),
        3 => MonotoneFn::Cap(rng.random_range(0.1..5.0)),
        _ => {
            let x0 = rng.random_range(0.0..2.0);
            let x1 = x0 + rng.random_range(0.1..3.0);
            let y1 = rng.random_range(0.0..=(x1 - x0));
            MonotoneFn::Piecewise(PiecewiseLinear::new(vec![(x0, 0.0), (x1, y1)]).unwrap())
        }
    }
}

fn random_parametric(rng: &mut ChaCha8Rng, n: usize) -> ParametricFamily {
    // f_k(x) = max(0, x - c_k)·s_k with c non-decreasing, s non-increasing.
    let mut fs = vec![MonotoneFn::Identity];
    let (mut c, mut s) = (0.0, 1.0);
    for _ in 1..n {
        c += rng.random_range(0.0..1.5);
        s *= rng.random_range(0.3..=1.0);
        fs.push(MonotoneFn::Piecewise(
            PiecewiseLinear::new(vec![(c, 0.0), (c + 1.0, s)]).unwrap(),
        ));
    }
    ParametricFamily::Listed(fs)
}

fn random_intervals(rng: &mut ChaCha8Rng) -> IntervalList {
    let mut list = Vec::new();
    let mut at = rng.random_range(0.0..1.0);
    for _ in 0..rng.random_range(0..5) {
        let len = rng.random_range(0.1..2.0);
        list.push((at, at + len));
        at += len + rng.random_range(0.0..1.0);
    }
    if rng.random_bool(0.3) {
        list.push((at, f64::INFINITY));
    }
    IntervalList::new(list).unwrap()
}

fn random_rule(rng: &mut ChaCha8Rng, family: &str, n: usize) -> RuleSpec {
    match family {
        "ed" => RuleSpec::Ed,
        "wta" => RuleSpec::Wta,
        "wts" => RuleSpec::Wts(rng.random_range(0.0..5.0)),
        "interval" => RuleSpec::Interval(random_intervals(rng)),
        "single-parametric" => RuleSpec::SingleParametric(random_fn(rng)),
        "parametric" => RuleSpec::Parametric(random_parametric(rng, n)),
        "geometric" => RuleSpec::geometric(rng.random_range(0.0..=1.0)).unwrap(),
        _ => {
            let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
            w.sort_by(|a, b| b.total_cmp(a));
            w[0] += 0.1;
            RuleSpec::proportional(w).unwrap()
        }
    }
}

fn random_competition(rng: &mut ChaCha8Rng, n: usize, e: f64) -> Competition {
    let mut ids: Vec<CompetitorId> = (1..=n + 3).map(CompetitorId::indexed).collect();
    ids.shuffle(rng);
    ids.truncate(n);
    Competition::new(prizealloc::model::Ranking::from_order(ids).unwrap(), e).unwrap()
}

fn unit_step_oracle(n: usize, e: f64) -> Vec<f64> {
    let avg = e / n as f64;
    if avg.fract() == 0.0 {
        return vec![avg; n];
    }
    let k = avg.ceil();
    let excess = e - n as f64 * (k - 1.0);
    let full = excess.floor() as usize;
    (0..n)
        .map(|r| match r.cmp(&full) {
            std::cmp::Ordering::Less => k,
            std::cmp::Ordering::Equal => k - 1.0 + excess.fract(),
            std::cmp::Ordering::Greater => k - 1.0,
        })
        .collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cfg = SolverConfig::default();
    let families = [
        "ed",
        "wta",
        "wts",
        "interval",
        "single-parametric",
        "parametric",
        "geometric",
        "proportional",
    ];
    let mut total = 0;
    for family in families {
        for _ in 0..CASES {
            let n = rng.random_range(1..=8);
            let e = if rng.random_bool(0.1) {
                0.0
            } else {
                rng.random_range(0.0..100.0)
            };
            let rule = random_rule(&mut rng, family, n);
            let comp = random_competition(&mut rng, n, e);
            let alloc =
                allocate(&rule, &comp).map_err(|err| format!("{rule} n={n} E={e}: {err}"))?;
            let p = alloc.by_position();
            ensure(
                (alloc.total() - e).abs() <= default_sum_tolerance(e),
                || format!("{rule} n={n} E={e}: sum {}", alloc.total()),
            )?;
            ensure(p.iter().all(|v| *v >= -EQ_TOL), || {
                format!("{rule}: negative prize {p:?}")
            })?;
            ensure(p.windows(2).all(|w| w[1] <= w[0] + EQ_TOL), || {
                format!("{rule} E={e}: order {p:?}")
            })?;
            if let RuleSpec::Parametric(fam) = &rule {
                let x = solve_level(fam, n, e, &cfg).map_err(|err| err.to_string())?;
                let residual = (fam.prizes(x, n).iter().sum::<f64>() - e).abs();
                ensure(residual <= RESIDUAL_TOL * e.max(1.0), || {
                    format!("{rule} E={e}: residual {residual}")
                })?;
            }
            if let RuleSpec::SingleParametric(f) = &rule {
                let fam = ParametricFamily::Iterates(f.clone());
                let x = solve_level(&fam, n, e, &cfg).map_err(|err| err.to_string())?;
                let residual = (fam.prizes(x, n).iter().sum::<f64>() - e).abs();
                ensure(residual <= RESIDUAL_TOL * e.max(1.0), || {
                    format!("{rule} E={e}: residual {residual}")
                })?;
            }
            total += 1;
        }
    }

    for (label, rule) in bundled()
        .into_iter()
        .filter(|(l, _)| l != "threshold-switch")
    {
        for _ in 0..CASES / 10 {
            let n = rng.random_range(1..=6);
            let e = rng.random_range(0.0..20.0);
            let d = rng.random_range(0.0..3.0);
            let lo = prizes_by_position(&rule, n, e, &cfg).map_err(|err| err.to_string())?;
            let hi = prizes_by_position(&rule, n, e + d, &cfg).map_err(|err| err.to_string())?;
            for (a, b) in lo.iter().zip(&hi) {
                ensure(*b >= a - EQ_TOL && b - a <= d + EQ_TOL, || {
                    format!("{label} n={n} E={e} d={d}: {lo:?} -> {hi:?}")
                })?;
            }
            total += 1;
        }
    }

    for _ in 0..CASES {
        let n = rng.random_range(1..=8);
        let e = rng.random_range(0.0..50.0);
        let lambda = rng.random_range(0.0..=1.0);
        let wts0 =
            prizes_by_position(&RuleSpec::Wts(0.0), n, e, &cfg).map_err(|err| err.to_string())?;
        let wta = prizes_by_position(&RuleSpec::Wta, n, e, &cfg).map_err(|err| err.to_string())?;
        ensure(close(&wts0, &wta, EQ_TOL), || {
            format!("wts(0) vs wta: {wts0:?} {wta:?}")
        })?;
        let geo = prizes_by_position(&RuleSpec::geometric(lambda).unwrap(), n, e, &cfg)
            .map_err(|err| err.to_string())?;
        let sp = prizes_by_position(
            &RuleSpec::SingleParametric(MonotoneFn::Linear(lambda)),
            n,
            e,
            &cfg,
        )
        .map_err(|err| err.to_string())?;
        let weights: Vec<f64> = (0..n as i32).map(|k| lambda.powi(k)).collect();
        let prop = prizes_by_position(&RuleSpec::proportional(weights).unwrap(), n, e, &cfg)
            .map_err(|err| err.to_string())?;
        ensure(
            close(&geo, &sp, EQ_TOL) && close(&geo, &prop, EQ_TOL),
            || format!("geometric({lambda}) n={n} E={e}: {geo:?} {sp:?} {prop:?}"),
        )?;
        let e_step = rng.random_range(0.0..(20.0 * n as f64));
        let step = prizes_by_position(&RuleSpec::unit_step(), n, e_step, &cfg)
            .map_err(|err| err.to_string())?;
        let oracle = unit_step_oracle(n, e_step);
        ensure(close(&step, &oracle, EQ_TOL), || {
            format!("unit-step n={n} E={e_step}: {step:?} vs {oracle:?}")
        })?;
        total += 1;
    }

    let grid: Vec<f64> = (0..=40).map(|k| k as f64 * 0.25).collect();
    let mut subsets_checked = 0;
    for round in 0..25 {
        let rule = if round == 0 {
            RuleSpec::unit_step()
        } else {
            RuleSpec::Interval(random_intervals(&mut rng))
        };
        for n in 2..=6 {
            let comp = Competition::canonical(n, 0.0).unwrap();
            let ids = comp.ranking().order().to_vec();
            for &e in &grid {
                let full = allocate(&rule, &comp.with_endowment(e).unwrap())
                    .map_err(|err| err.to_string())?;
                for mask in 1u32..(1 << n) - 1 {
                    let subset: Vec<CompetitorId> = ids
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, c)| c.clone())
                        .collect();
                    let money: f64 = subset.iter().map(|c| full.get(c).unwrap()).sum();
                    let reduced = allocate(&rule, &comp.reduced(&subset, money).unwrap())
                        .map_err(|err| err.to_string())?;
                    for c in &subset {
                        let (a, b) = (full.get(c).unwrap(), reduced.get(c).unwrap());
                        ensure((a - b).abs() <= EQ_TOL, || {
                            format!("{rule} n={n} E={e} {c}: {a} vs {b}")
                        })?;
                    }
                    subsets_checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{total} randomized cases, {subsets_checked} interval reductions exact"
    ))
}

fn fit_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let lambda = rng.random_range(0.05..=1.0);
        let m = rng.random_range(2..=12);
        let e = rng.random_range(1.0..1e5);
        let prizes = prizes_by_position(
            &RuleSpec::geometric(lambda).unwrap(),
            m,
            e,
            &SolverConfig::default(),
        )
        .map_err(|err| err.to_string())?;
        let table = PrizeTable::new("synthetic", e, prizes).map_err(|err| err.to_string())?;
        let r = fit_geometric(&table, 0.01).map_err(|err| err.to_string())?;
        let FitParams::Geometric { lambda: fitted, .. } = r.params else {
            unreachable!()
        };
        worst = worst.max((fitted - lambda).abs());
        ensure((fitted - lambda).abs() <= ROUND_TRIP_TOL, || {
            format!("lambda {lambda} fitted as {fitted}")
        })?;

        let mut w: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..1.0)).collect();
        w.sort_by(|a, b| b.total_cmp(a));
        let sum: f64 = w.iter().sum();
        let shares: Vec<f64> = w.iter().map(|v| v / sum * 100.0).collect();
        let events: Vec<PrizeTable> = (0..rng.random_range(1..4))
            .map(|k| {
                let purse = rng.random_range(10.0..1e4);
                PrizeTable::new(
                    format!("event {k}"),
                    purse,
                    shares.iter().map(|s| s / 100.0 * purse).collect(),
                )
                .unwrap()
            })
            .collect();
        let set = EventSet::new(events).map_err(|err| err.to_string())?;
        let r = fit_proportional(&set, &Tolerances::exact(1e-6)).map_err(|err| err.to_string())?;
        let FitParams::Proportional { shares: fitted } = r.params else {
            unreachable!()
        };
        for (a, b) in fitted.iter().zip(&shares) {
            worst = worst.max((a - b).abs());
            ensure((a - b).abs() <= ROUND_TRIP_TOL, || {
                format!("share {b} fitted as {a}")
            })?;
        }
        ensure(r.verdict, || "proportional round trip rejected".into())?;
    }
    Ok(format!(
        "1000 geometric and 1000 proportional round trips, max error {worst:.1e}"
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("golden tables", golden_tables),
        ("poker geometric fit", poker_fit),
        ("golf classification", golf_classification),
        ("axiom matrix regression", axiom_matrix),
        ("independence suite", independence),
        ("property suites", property_suites),
        ("fit round-trips", fit_round_trips),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {secs:.1}s)", k + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {} {name}: FAIL ({why}; {secs:.1}s)", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
