use std::fmt::Write as _;

use expcycle_core::bitseq::{self, FREQ_MAX_BITS};
use expcycle_core::bounds::{self, rij_bound, rij_lemma_bound, Evaluation};
use expcycle_core::expmap::{self, decompose, trajectory};
use expcycle_core::survey::{self, artin_averages, run_survey};
use expcycle_core::{
    BitWidth, Budget, ConsistencyReport, CycleDecomposition, ExpMapParams, IntervalSpec,
    ReportOptions, SurveyAggregate, SurveyConfig, SurveyRecord, Trajectory,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::*;
use crate::render::Payload;
use crate::CliError;

type Out = Result<Payload, CliError>;

fn params(m: &MapArgs) -> Result<ExpMapParams, CliError> {
    Ok(ExpMapParams::new(m.p, m.g)?)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

#[derive(Serialize)]
struct TrajectoryOut {
    u0: u64,
    s: u64,
    t: u64,
    ell: u64,
    cycle_entry: u64,
}

impl From<Trajectory> for TrajectoryOut {
    fn from(t: Trajectory) -> Self {
        Self {
            u0: t.u0,
            s: t.tail,
            t: t.cycle_len,
            ell: t.len(),
            cycle_entry: t.cycle_entry,
        }
    }
}

#[derive(Serialize)]
struct AnalyzeOut {
    #[serde(flatten)]
    params: ExpMapParams,
    #[serde(flatten)]
    trajectory: Option<TrajectoryOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycles: Option<CycleDecomposition>,
}

pub fn analyze(a: &AnalyzeArgs, budget: &Budget) -> Out {
    let params = params(&a.map)?;
    let trajectory =
        a.u0.map(|u0| trajectory(&params, u0))
            .transpose()?
            .map(TrajectoryOut::from);
    let cycles = a.cycles.then(|| decompose(&params, budget)).transpose()?;
    Ok(Payload::new(&AnalyzeOut {
        params,
        trajectory,
        cycles,
    }))
}

fn bit_setup(b: &BitArgs) -> Result<(ExpMapParams, Trajectory, BitWidth), CliError> {
    let params = params(&b.map)?;
    let k = BitWidth::new(b.k)?;
    let traj = trajectory(&params, b.u0)?;
    Ok((params, traj, k))
}

#[derive(Serialize)]
struct TauOut {
    p: u64,
    g: u64,
    k: u32,
    #[serde(flatten)]
    trajectory: TrajectoryOut,
    tau: u64,
    tau_equals_t: bool,
}

pub fn tau(b: &BitArgs) -> Out {
    let (params, traj, k) = bit_setup(b)?;
    let tau = bitseq::tau(&params, &traj, k);
    Ok(Payload::new(&TauOut {
        p: params.p(),
        g: params.g(),
        k: k.get(),
        trajectory: traj.into(),
        tau,
        tau_equals_t: tau == traj.cycle_len,
    })
    .with_text(format!("{tau}\n")))
}

#[derive(Serialize)]
struct NuOut {
    p: u64,
    g: u64,
    k: u32,
    #[serde(flatten)]
    trajectory: TrajectoryOut,
    n: u64,
    nu: u64,
}

pub fn nu(a: &NuArgs) -> Out {
    let (params, traj, k) = bit_setup(&a.bits)?;
    let n = a.n.unwrap_or(traj.len());
    let nu = bitseq::nu(&params, &traj, k, n)?;
    Ok(Payload::new(&NuOut {
        p: params.p(),
        g: params.g(),
        k: k.get(),
        trajectory: traj.into(),
        n,
        nu,
    })
    .with_text(format!("{nu}\n")))
}

#[derive(Serialize)]
struct FreqOut {
    p: u64,
    g: u64,
    u0: u64,
    k: u32,
    ell: u64,
    distinct: u64,
    max_count: u64,
    threshold: u64,
    omega: Vec<u64>,
    counts: std::collections::BTreeMap<u64, u64>,
}

pub fn freq(a: &FreqArgs, budget: &Budget) -> Out {
    if a.threshold == 0 {
        return Err(CliError::Usage("--threshold must be at least 1".into()));
    }
    let (params, traj, k) = bit_setup(&a.bits)?;
    let table = bitseq::freq(&params, &traj, k, budget)?;
    let omega = bitseq::omega(&table, a.threshold).into_iter().collect();
    let mut csv = String::from("word,count\n");
    for (w, c) in &table.counts {
        let _ = writeln!(csv, "{w},{c}");
    }
    Ok(Payload::new(&FreqOut {
        p: params.p(),
        g: params.g(),
        u0: traj.u0,
        k: k.get(),
        ell: table.ell,
        distinct: table.counts.len() as u64,
        max_count: table.max_count(),
        threshold: a.threshold,
        omega,
        counts: table.counts,
    })
    .with_csv(csv))
}

#[derive(Serialize)]
struct FixedOut {
    p: u64,
    g: u64,
    k: u32,
    count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper_bound: Option<f64>,
}

pub fn fixed(a: &FixedArgs, budget: &Budget) -> Out {
    let params = params(&a.map)?;
    let count = expmap::fixed_point_count(&params, a.k, a.allow_large, budget)?;
    let upper_bound = match a.k {
        1 => Some(expmap::fixed_point_upper_bound(params.p())),
        3 => expmap::period_three_upper_bound(params.p(), params.g()),
        _ => None,
    };
    Ok(Payload::new(&FixedOut {
        p: params.p(),
        g: params.g(),
        k: a.k,
        count,
        upper_bound,
    })
    .with_text(format!("{count}\n")))
}

#[derive(Serialize)]
struct RcountOut {
    p: u64,
    g: u64,
    a: u64,
    b: u64,
    i: IntervalSpec,
    j: IntervalSpec,
    count: u64,
    /// Only when `#I = #J`.
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<Evaluation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lemma_bound: Option<Evaluation>,
}

pub fn rcount(a: &RcountArgs, budget: &Budget) -> Out {
    let params = params(&a.map)?;
    let (p, g) = (params.p(), params.g());
    let i = IntervalSpec::new(a.i_start, a.i_len, p)?;
    let j = IntervalSpec::new(a.j_start, a.j_len, p)?;
    let count = bounds::rcount(p, g, a.a, a.b, &i, &j, budget)?;
    let bound = (a.i_len == a.j_len)
        .then(|| rij_bound(p, params.order(), a.i_len).ok())
        .flatten();
    let lemma_bound = rij_lemma_bound(p, params.order(), a.i_len, a.j_len).ok();
    Ok(Payload::new(&RcountOut {
        p,
        g,
        a: a.a,
        b: a.b,
        i,
        j,
        count,
        bound,
        lemma_bound,
    })
    .with_text(format!("{count}\n")))
}

#[derive(Serialize)]
struct SumprodOut {
    p: u64,
    #[serde(flatten)]
    cards: bounds::SumProductCards,
    bound: Evaluation,
}

pub fn sumprod(a: &SumprodArgs, budget: &Budget) -> Out {
    let cards = bounds::sumprod_cards(a.p, &a.set, budget)?;
    let bound = bounds::sumprod_bound(a.p, cards.set_size)?;
    Ok(Payload::new(&SumprodOut {
        p: a.p,
        cards,
        bound,
    }))
}

#[derive(Serialize)]
struct SurveyOut<'a> {
    aggregate: &'a SurveyAggregate,
    records: &'a [SurveyRecord],
}

pub fn survey(a: &SurveyArgs, budget: &Budget) -> Out {
    let config = SurveyConfig::new(a.m, a.pairs, a.seed, a.workers)?;
    let records = run_survey(&config, budget)?;
    let mut aggregate = survey::aggregate(&records)?;
    aggregate.config = Some(config);
    let mut agg_json = serde_json::to_string_pretty(&aggregate).expect("json");
    agg_json.push('\n');
    Ok(Payload::new(&SurveyOut {
        aggregate: &aggregate,
        records: &records,
    })
    .with_csv(survey::to_csv(&records))
    .with_sidecar(".aggregate.json", agg_json))
}

pub fn artin(a: &ArtinArgs, budget: &Budget) -> Out {
    let averages = pool(a.workers)?.install(|| artin_averages(a.q, budget))?;
    let mut json = serde_json::to_value(averages).expect("json");
    let obj = json.as_object_mut().expect("object");
    match a.mode {
        ArtinSelect::Primitive => {
            obj.remove("all_bases");
        }
        ArtinSelect::All => {
            obj.remove("primitive_roots");
            obj.remove("artin_constant");
        }
        ArtinSelect::Both => {}
    }
    Ok(Payload::new(&json))
}

const REPORT_CSV_HEADER: &str =
    "p,g,u0,k,tail,cycle_len,ell,tau_k,nu_ell,max_frequency,omega_count,max_pair_count,rigorous_ok";

#[derive(Serialize)]
struct ReportOut {
    count: u64,
    tau_equals_t: u64,
    tau_equals_t_fraction: f64,
    rigorous_ok: bool,
    configs: Vec<ConsistencyReport>,
}

pub fn report(a: &ReportArgs, budget: &Budget) -> Out {
    if a.threshold == 0 {
        return Err(CliError::Usage("--threshold must be at least 1".into()));
    }
    // validate the whole grid before computing anything
    let mut grid = Vec::new();
    for &p in &a.p {
        for &g in &a.g {
            let params = ExpMapParams::new(p, g)?;
            let ks: Vec<u32> = if a.k.is_empty() {
                (1..=params.bit_length().min(FREQ_MAX_BITS)).collect()
            } else {
                a.k.clone()
            };
            for &u0 in &a.u0 {
                if !(1..p).contains(&u0) {
                    return Err(expcycle_core::Error::OutOfRange {
                        name: "u0",
                        value: u0,
                        lo: 1,
                        hi: p - 1,
                    }
                    .into());
                }
                for &k in &ks {
                    grid.push((params, u0, BitWidth::new(k)?));
                }
            }
        }
    }
    let options = ReportOptions {
        threshold: a.threshold,
        ..ReportOptions::default()
    };
    let configs: Vec<ConsistencyReport> = pool(a.workers)?.install(|| {
        grid.par_iter()
            .map(|(params, u0, k)| {
                let traj = trajectory(params, *u0)?;
                bounds::consistency_report(params, &traj, *k, &options, budget)
            })
            .collect::<expcycle_core::Result<_>>()
    })?;

    let mut csv = format!("{REPORT_CSV_HEADER}\n");
    for c in &configs {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.p,
            c.g,
            c.u0,
            c.k,
            c.tail,
            c.cycle_len,
            c.ell,
            c.tau_k,
            c.nu_ell,
            c.max_frequency,
            c.omega_count,
            c.max_pair_count,
            c.rigorous_ok()
        );
    }
    let count = configs.len() as u64;
    let tau_equals_t = configs.iter().filter(|c| c.tau_k == c.cycle_len).count() as u64;
    Ok(Payload::new(&ReportOut {
        count,
        tau_equals_t,
        tau_equals_t_fraction: if count == 0 {
            0.0
        } else {
            tau_equals_t as f64 / count as f64
        },
        rigorous_ok: configs.iter().all(ConsistencyReport::rigorous_ok),
        configs,
    })
    .with_csv(csv))
}
