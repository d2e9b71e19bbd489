//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Pass a substring to run only matching
//! criteria.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use epdm_cli::validate::{selection_check, validate};
use epdm_cli::{parse_config, run_simulate, EngineChoice};
use epdm_core::dm::StaticNetwork;
use epdm_core::models::{ColoredParticles, Model};
use epdm_core::{
    rng, stats, Engine, ReactionKind, ReactionSpec, RuleError, RuleSet, SpecieId, Step,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let spent = start.elapsed();
    if spent > limit {
        Err(format!("took {:.1}s, limit {}s", spent.as_secs_f64(), limit.as_secs()))
    } else {
        Ok(())
    }
}

fn model(text: &str) -> Model {
    parse_config(&format!("{text}\nmax_time = 1")).unwrap().build_model().unwrap()
}

fn fire<R: RuleSet>(engine: &mut Engine<R>) -> Result<(), String> {
    match engine.step().map_err(|e| e.to_string())? {
        Step::Fired(_) => Ok(()),
        other => Err(format!("expected a reaction, got {other:?}")),
    }
}

/// Twelve channels over four species covering every reaction kind, with
/// two reactions sharing the A+B relation.
#[derive(Clone)]
struct Mixed;

impl RuleSet for Mixed {
    fn generate(&self, a: &SpecieId, b: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError> {
        let mut pair = [a.as_str(), b.as_str()];
        pair.sort();
        let spec = |rate: f64, products: &[(&str, u32)]| {
            ReactionSpec::new(rate, products.iter().map(|(s, m)| (SpecieId::new(*s), *m)))
        };
        Ok(match pair {
            ["", ""] => vec![spec(1.5, &[("A", 1)]), spec(0.5, &[("D", 1)])],
            ["", "A"] => vec![spec(0.3, &[])],
            ["", "B"] => vec![spec(0.7, &[("C", 1)])],
            ["", "C"] => vec![spec(0.2, &[("B", 2)])],
            ["A", "A"] => vec![spec(0.1, &[("B", 1)])],
            ["D", "D"] => vec![spec(0.05, &[])],
            ["A", "B"] => vec![spec(0.4, &[("C", 1)]), spec(0.25, &[("D", 1)])],
            ["B", "C"] => vec![spec(0.6, &[("A", 1)])],
            ["C", "D"] => vec![spec(0.9, &[("C", 1), ("D", 1)])],
            ["A", "D"] => vec![spec(0.15, &[("A", 2)])],
            _ => vec![],
        })
    }
}

fn mixed_state() -> BTreeMap<SpecieId, u64> {
    [("A", 3), ("B", 4), ("C", 2), ("D", 5)].into_iter().map(|(s, n)| (SpecieId::new(s), n)).collect()
}

fn structure_validity() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    for text in ["model = colliding\nN = 20\nk = 0.5\nn0 = 50", "model = colored\nN = 10\nOmega = 50", "model = birth_death_dimer"] {
        let m = model(text);
        let mut engine = Engine::new(m.clone(), &m.initial_state(), 2024).map_err(|e| e.to_string())?;
        let check = |engine: &Engine<Model>, step: usize| -> Result<(), String> {
            match engine.validate_structure().first() {
                None => Ok(()),
                Some(v) => Err(format!("{} after step {step}: {v}", m.name())),
            }
        };
        check(&engine, 0)?;
        for step in 1..=10_000 {
            fire(&mut engine)?;
            check(&engine, step)?;
        }
        details.push(format!("{} 10000 steps", m.name()));
    }
    within(Duration::from_secs(60), start)?;
    Ok(details.join(", "))
}

fn sampling_exactness() -> Outcome {
    let state = mixed_state();
    let universe: Vec<SpecieId> = state.keys().cloned().collect();
    let net = StaticNetwork::enumerate(&Mixed, &universe).map_err(|e| e.to_string())?;
    let kinds: std::collections::BTreeSet<String> =
        net.channels().iter().map(|c| format!("{:?}", c.kind)).collect();
    if kinds.len() != ReactionKind::ALL.len() {
        return Err(format!("only kinds {kinds:?} present"));
    }
    let check = selection_check(&Mixed, &net, &state, 100_000, 31)
        .map_err(|e| e.to_string())?
        .ok_or("state has zero propensity")?;
    ensure(
        check.channels >= 10 && check.test.p_value > 0.001,
        format!("{} channels, 4 kinds, 1e5 draws, chi2 = {:.2}, df = {}, p = {:.4}", check.channels, check.test.statistic, check.test.df, check.test.p_value),
    )
}

fn tau_distribution() -> Outcome {
    let initial: Vec<(SpecieId, u64)> = mixed_state().into_iter().collect();
    let engine = Engine::new(Mixed, &initial, 5).map_err(|e| e.to_string())?;
    let a = engine.total_propensity();
    let mut r = rng::seeded(77);
    let taus: Vec<f64> =
        (0..100_000).map(|_| engine.sample_tau(rng::open_closed_unit(&mut r)).expect("positive propensity")).collect();
    let ks = stats::ks_exponential(&taus, a);
    ensure(ks.p_value > 0.001, format!("a = {a}, 1e5 draws, D = {:.5}, p = {:.4}", ks.statistic, ks.p_value))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for text in [
        "model = birth_death_dimer\nb = 1\nd = 0.1\nc = 0.05\nu = 0.2\nmax_time = 5",
        "model = colored\nN = 3\nOmega = 3\nmax_time = 2",
    ] {
        let cfg = parse_config(&format!("{text}\nreplicates = 10000\nseed = 11\noracle_seed = 12\nalpha = 0.01")).unwrap();
        let report = validate(&cfg).map_err(|e| e.to_string())?;
        let worst = report.species.iter().map(|s| s.adjusted_p).fold(1.0, f64::min);
        ok &= report.marginals_pass();
        details.push(format!("{} T = {}: {} species, min Bonferroni p = {:.4}", report.model, report.horizon, report.species.len(), worst));
    }
    within(Duration::from_secs(600), start)?;
    ensure(ok, details.join("; "))
}

fn scaling() -> Outcome {
    let start = Instant::now();
    let base = "model = colliding\nk = 0.5\nn0 = 50\nmax_reactions = 5000\nreplicates = 10\nseed = 3";
    let epdm = parse_config(&format!("{base}\nengine = epdm\nsweep = 50, 100, 200, 400, 800, 1600")).unwrap();
    let dm = parse_config(&format!("{base}\nengine = dm\nsweep = 25, 50, 100, 200")).unwrap();
    let epdm = epdm_cli::bench::bench(&epdm).map_err(|e| e.to_string())?.slope(EngineChoice::Epdm);
    let dm = epdm_cli::bench::bench(&dm).map_err(|e| e.to_string())?.slope(EngineChoice::Dm);
    within(Duration::from_secs(1800), start)?;
    let (Some(e), Some(d)) = (epdm, dm) else {
        return Err(format!("slope undefined: epdm {epdm:?}, dm {dm:?}"));
    };
    ensure(
        (0.6..=1.4).contains(&e) && (1.6..=2.4).contains(&d),
        format!("epdm slope {e:.3} (want 0.6..1.4), dm slope {d:.3} (want 1.6..2.4)"),
    )
}

fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    status.lines().find(|l| l.starts_with("VmHWM"))?.split_whitespace().nth(1)?.parse().ok()
}

fn species_churn() -> Outcome {
    let mut details = Vec::new();
    for (n, omega) in [(50, 10_000), (100, 10_000), (200, 10_000), (400, 10_000), (100, 1_000_000)] {
        let m = ColoredParticles::new(n, omega, 0.5, 1).map_err(|e| e.to_string())?;
        let mut engine = Engine::new(m.clone(), &m.initial_state(), n ^ omega).map_err(|e| e.to_string())?;
        let mut seen = std::collections::HashSet::new();
        for step in 1..=5000 {
            fire(&mut engine)?;
            if engine.live_species() != n as usize {
                return Err(format!("N = {n}, Omega = {omega}: {} live species after reaction {step}", engine.live_species()));
            }
            seen.extend(engine.snapshot().into_keys());
        }
        details.push(format!("N = {n}, Omega = {omega}: {} distinct species visited", seen.len()));
    }
    if let Some(kb) = peak_rss_kb() {
        details.push(format!("peak RSS {} MiB", kb / 1024));
    }
    Ok(details.join("; "))
}

fn conservation() -> Outcome {
    let m = model("model = colliding\nN = 10\nk = 0.5\nn0 = 50");
    let mut engine = Engine::new(m.clone(), &m.initial_state(), 8).map_err(|e| e.to_string())?;
    let initial = engine.snapshot();
    for step in 1..=5000 {
        fire(&mut engine)?;
        if engine.snapshot() != initial {
            return Err(format!("colliding snapshot changed at reaction {step}"));
        }
    }
    let m = model("model = colored\nN = 10\nOmega = 50");
    let mut engine = Engine::new(m.clone(), &m.initial_state(), 8).map_err(|e| e.to_string())?;
    for step in 1..=5000 {
        fire(&mut engine)?;
        let total: u64 = engine.snapshot().values().sum();
        if total != 10 {
            return Err(format!("colored total {total} at reaction {step}"));
        }
    }
    Ok("colliding snapshot constant over 5000 reactions; colored total constant at 10 over 5000 reactions".to_string())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = parse_config("model = colored\nN = 20\nOmega = 100\nseed = 99\nmax_reactions = 5000\nsample_interval = 0.01").unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    run_simulate(&cfg, &a).map_err(|e| e.to_string())?;
    run_simulate(&cfg, &b).map_err(|e| e.to_string())?;
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    ensure(a == b, format!("two runs, {} bytes each, identical = {}", a.len(), a == b))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: &[Criterion] = &[
        ("structure validity", structure_validity),
        ("sampling exactness", sampling_exactness),
        ("tau distribution", tau_distribution),
        ("oracle equivalence", oracle_equivalence),
        ("scaling", scaling),
        ("species churn", species_churn),
        ("conservation", conservation),
        ("determinism", determinism),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".to_string()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
