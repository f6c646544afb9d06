//! Experiment sweeps: solve random instances over a grid of `(M, B)` values
//! with several solvers and reduction settings, and summarize runtime,
//! objective and optimality gap per cell.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Mutex;
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, RsepError};
use crate::model::Allocation;
use crate::pipeline::{solve, SolverConfig};
use crate::scenario::{generate, ScenarioSpec};
use crate::solvers::SolverId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Reductions {
    pub sparsity: bool,
    pub aggregation: bool,
}

impl Reductions {
    pub const NONE: Reductions = Reductions {
        sparsity: false,
        aggregation: false,
    };
    pub const SPARSITY: Reductions = Reductions {
        sparsity: true,
        aggregation: false,
    };
    pub const AGGREGATION: Reductions = Reductions {
        sparsity: false,
        aggregation: true,
    };

    pub fn label(self) -> &'static str {
        match (self.sparsity, self.aggregation) {
            (false, false) => "none",
            (true, false) => "sparsity",
            (false, true) => "aggregation",
            (true, true) => "sparsity+aggregation",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub m_values: Vec<usize>,
    pub b_values: Vec<usize>,
    pub repetitions: usize,
    pub solvers: Vec<SolverId>,
    pub reductions: Vec<Reductions>,
    pub solver: SolverConfig,
    /// Worker threads; `None` reads `RSEP_THREADS`, else uses rayon's default.
    pub threads: Option<usize>,
}

impl SweepConfig {
    pub fn new(m_values: Vec<usize>, b_values: Vec<usize>, repetitions: usize, solvers: Vec<SolverId>) -> Self {
        SweepConfig {
            m_values,
            b_values,
            repetitions,
            solvers,
            reductions: vec![Reductions::NONE],
            solver: SolverConfig::default(),
            threads: None,
        }
    }
}

/// One solver run on one generated instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub m: usize,
    pub b: usize,
    pub n_rb: usize,
    pub t: usize,
    pub density: f64,
    pub seed: u64,
    pub rep: usize,
    pub solver: SolverId,
    pub reductions: Reductions,
    pub objective: u64,
    pub certified: bool,
    pub elapsed: Duration,
    /// `(exact − objective) / exact` against a certified exact run on the
    /// same instance and reductions; 0 when both are 0.
    pub gap_vs_exact: Option<f64>,
    pub error: Option<String>,
    pub allocation: Option<Allocation>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    m: usize,
    b: usize,
    n_rb: usize,
    t: usize,
    density: f64,
    seed: u64,
    rep: usize,
    solver: &'a str,
    sparsity: bool,
    aggregation: bool,
    objective: u64,
    certified: bool,
    elapsed_us: f64,
    gap: Option<f64>,
    error: Option<&'a str>,
}

pub const CSV_HEADER: &str =
    "m,b,n_rb,t,density,seed,rep,solver,sparsity,aggregation,objective,certified,elapsed_us,gap,error";

impl ExperimentRecord {
    fn csv_row(&self) -> CsvRow<'_> {
        CsvRow {
            m: self.m,
            b: self.b,
            n_rb: self.n_rb,
            t: self.t,
            density: self.density,
            seed: self.seed,
            rep: self.rep,
            solver: self.solver.name(),
            sparsity: self.reductions.sparsity,
            aggregation: self.reductions.aggregation,
            objective: self.objective,
            certified: self.certified,
            elapsed_us: self.elapsed.as_secs_f64() * 1e6,
            gap: self.gap_vs_exact,
            error: self.error.as_deref(),
        }
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1e3
    }
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    #[serde(flatten)]
    row: CsvRow<'a>,
    allocation: Option<&'a Allocation>,
}

/// Streams records to CSV (and optionally JSON lines).
pub struct RecordWriter<W: Write> {
    csv: csv::Writer<W>,
    jsonl: Option<Box<dyn Write + Send>>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W) -> Self {
        RecordWriter {
            csv: csv::WriterBuilder::new().has_headers(true).from_writer(out),
            jsonl: None,
        }
    }

    pub fn with_jsonl(mut self, out: Box<dyn Write + Send>) -> Self {
        self.jsonl = Some(out);
        self
    }

    pub fn write(&mut self, record: &ExperimentRecord) -> Result<()> {
        self.csv.serialize(record.csv_row())?;
        if let Some(out) = self.jsonl.as_mut() {
            let doc = JsonRecord {
                row: record.csv_row(),
                allocation: record.allocation.as_ref(),
            };
            serde_json::to_writer(&mut *out, &doc)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.csv.flush()?;
        if let Some(out) = self.jsonl.as_mut() {
            out.flush()?;
        }
        Ok(())
    }
}

fn worker_count(config: &SweepConfig) -> Option<usize> {
    config.threads.or_else(|| {
        std::env::var("RSEP_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&n: &usize| n > 0)
    })
}

/// Runs every `(M, B)` point × repetition × reduction × solver and returns
/// the records in cell order (M outer, B, repetition, reduction, solver).
pub fn run_sweep(base: &ScenarioSpec, config: &SweepConfig) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::new();
    run_sweep_streaming(base, config, |r| {
        out.push(r.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Like [`run_sweep`], handing each record to `sink` as soon as all earlier
/// cells have completed, so the output order does not depend on scheduling.
pub fn run_sweep_streaming<F>(base: &ScenarioSpec, config: &SweepConfig, sink: F) -> Result<()>
where
    F: FnMut(&ExperimentRecord) -> Result<()> + Send,
{
    if config.repetitions == 0 {
        return Err(RsepError::InvalidParameter("repetitions must be at least 1".into()));
    }
    if config.solvers.is_empty() || config.reductions.is_empty() {
        return Err(RsepError::InvalidParameter("at least one solver and reduction setting required".into()));
    }
    let mut units = Vec::new();
    for &m in &config.m_values {
        for &b in &config.b_values {
            for rep in 0..config.repetitions {
                units.push((m, b, rep));
            }
        }
    }

    struct Ordered<F> {
        next: usize,
        pending: BTreeMap<usize, Vec<ExperimentRecord>>,
        sink: F,
        failure: Option<RsepError>,
    }
    let state = Mutex::new(Ordered {
        next: 0,
        pending: BTreeMap::new(),
        sink,
        failure: None,
    });

    let work = || {
        units.par_iter().enumerate().try_for_each(|(idx, &(m, b, rep))| -> Result<()> {
            let records = run_unit(base, config, m, b, rep)?;
            let mut guard = state.lock().expect("writer lock");
            let st = &mut *guard;
            st.pending.insert(idx, records);
            while let Some(batch) = st.pending.remove(&st.next) {
                for r in &batch {
                    if let Err(e) = (st.sink)(r) {
                        st.failure.get_or_insert(e);
                    }
                }
                st.next += 1;
            }
            Ok(())
        })
    };
    match worker_count(config) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RsepError::InvalidParameter(e.to_string()))?
            .install(work)?,
        None => work()?,
    }
    match state.into_inner().expect("writer lock").failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn run_unit(base: &ScenarioSpec, config: &SweepConfig, m: usize, b: usize, rep: usize) -> Result<Vec<ExperimentRecord>> {
    let spec = ScenarioSpec {
        m,
        b,
        seed: base.seed.wrapping_add(rep as u64),
        ..base.clone()
    };
    let instance = generate(&spec)?;
    let mut records = Vec::new();
    for &reductions in &config.reductions {
        let solver_config = SolverConfig {
            sparsity: reductions.sparsity,
            aggregation: reductions.aggregation,
            seed: config.solver.seed.wrapping_add(spec.seed),
            ..config.solver.clone()
        };
        let start = records.len();
        for &solver in &config.solvers {
            let mut record = ExperimentRecord {
                m,
                b,
                n_rb: spec.n_rb,
                t: spec.num_slots(),
                density: spec.adjacency_density,
                seed: spec.seed,
                rep,
                solver,
                reductions,
                objective: 0,
                certified: false,
                elapsed: Duration::ZERO,
                gap_vs_exact: None,
                error: None,
                allocation: None,
            };
            match solve(&instance, solver, &solver_config) {
                Ok(res) => {
                    record.objective = res.objective;
                    record.certified = res.certified;
                    record.elapsed = res.elapsed;
                    record.allocation = Some(res.allocation);
                }
                Err(e) => record.error = Some(e.to_string()),
            }
            records.push(record);
        }
        let exact = records[start..]
            .iter()
            .find(|r| r.solver == SolverId::Exact && r.certified)
            .map(|r| r.objective);
        if let Some(best) = exact {
            for r in &mut records[start..] {
                if r.error.is_none() {
                    r.gap_vs_exact = Some(relative_gap(best, r.objective));
                }
            }
        }
    }
    Ok(records)
}

/// `(exact − value) / exact`, or 0 when both are 0.
pub fn relative_gap(exact: u64, value: u64) -> f64 {
    if exact == 0 {
        0.0
    } else {
        (exact as f64 - value as f64) / exact as f64
    }
}

/// Aggregated statistic of one cell, in long format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub m: usize,
    pub b: usize,
    pub series: String,
    pub metric: &'static str,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

pub fn series_label(solver: SolverId, reductions: Reductions) -> String {
    match reductions {
        Reductions::NONE => solver.name().to_string(),
        r => format!("{}+{}", solver.name(), r.label()),
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (0 for fewer than two values).
pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mu = mean(values);
    (values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

/// Mean and standard deviation of objective, runtime and gap per
/// `(M, B, solver, reductions)` cell. Errored runs are skipped.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    type Key = (usize, usize, SolverId, Reductions);
    let mut cells: BTreeMap<Key, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.error.is_none()) {
        cells.entry((r.m, r.b, r.solver, r.reductions)).or_default().push(r);
    }
    let mut out = Vec::new();
    for ((m, b, solver, reductions), rs) in cells {
        let series = series_label(solver, reductions);
        let objective: Vec<f64> = rs.iter().map(|r| r.objective as f64).collect();
        let elapsed: Vec<f64> = rs.iter().map(|r| r.elapsed_ms()).collect();
        let gaps: Vec<f64> = rs.iter().filter_map(|r| r.gap_vs_exact).collect();
        let mut push = |metric, values: &[f64]| {
            if !values.is_empty() {
                out.push(SummaryRow {
                    m,
                    b,
                    series: series.clone(),
                    metric,
                    mean: mean(values),
                    std: std_dev(values),
                    count: values.len(),
                });
            }
        };
        push("objective", &objective);
        push("elapsed_ms", &elapsed);
        push("gap", &gaps);
    }
    out
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Looks up one summary value.
pub fn summary_mean(rows: &[SummaryRow], m: usize, b: usize, series: &str, metric: &str) -> Option<f64> {
    rows.iter()
        .find(|r| r.m == m && r.b == b && r.series == series && r.metric == metric)
        .map(|r| r.mean)
}

/// Mean linked RBs per cell for the relaxed and greedy solvers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkedCell {
    pub m: usize,
    pub b: usize,
    pub relaxed_mean: f64,
    pub mlf_mean: f64,
}

pub fn linked_rb_study(
    base: &ScenarioSpec,
    b_values: Vec<usize>,
    m_values: Vec<usize>,
    repetitions: usize,
    solver: SolverConfig,
) -> Result<(Vec<ExperimentRecord>, Vec<LinkedCell>)> {
    let config = SweepConfig {
        solver,
        ..SweepConfig::new(m_values.clone(), b_values.clone(), repetitions, vec![SolverId::Relaxed, SolverId::Mlf])
    };
    let records = run_sweep(base, &config)?;
    let summary = summarize(&records);
    let mut cells = Vec::new();
    for &m in &m_values {
        for &b in &b_values {
            cells.push(LinkedCell {
                m,
                b,
                relaxed_mean: summary_mean(&summary, m, b, "relaxed", "objective").unwrap_or(f64::NAN),
                mlf_mean: summary_mean(&summary, m, b, "mlf", "objective").unwrap_or(f64::NAN),
            });
        }
    }
    Ok((records, cells))
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties; NaN when either
/// side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let (mx, my) = (mean(&rx), mean(&ry));
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx).powi(2);
        vy += (b - my).powi(2);
    }
    cov / (vx * vy).sqrt()
}
