//! Experiment configs, runners and report rendering for the `cvqc-lab` binary.
//!
//! A run computes every row in memory first and only then writes the data
//! file (CSV or JSON), a `.summary.txt` table next to it and, for some
//! commands, a `.dump.json` debugging dump. A config error therefore never
//! leaves partial output behind.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::effverify::{self, BackendSuite, DelegatedInner, EffProver};
use crate::jordan;
use crate::partition::{self, EstimationMode, PartitionContext, PartitionParams, ProverStrategy, StrategyLayout};
use crate::protocol::{
    fiat_shamir, grinding_success, parallel_repeat, run_protocol, toy_protocol, trial_rng, AdversaryStrategy, Instance,
    OracleTable, Stats,
};
use crate::qsim::gates::random_projector_matrix;
use crate::tol;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime failure: {0}")]
    Runtime(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Parse(_) => 1,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    JordanDemo,
    PartitionClaims,
    RepetitionSweep,
    FsAttack,
    EffverifyDemo,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub output_path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

const TOP_LEVEL: [&str; 5] = ["command", "params", "seed", "output_path", "format"];

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Config file (if any), then `key=value` overrides. Keys other than the
    /// top-level fields go into `params`; values are parsed as JSON when
    /// possible and kept as strings otherwise.
    pub fn load(path: Option<&Path>, sets: &[String]) -> Result<Self, CliError> {
        let mut root = match path {
            Some(p) => {
                let text =
                    std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => return Err(CliError::Config("config must be a JSON object".into())),
                    Err(e) => return Err(CliError::Config(format!("{}: {e}", p.display()))),
                }
            }
            None => serde_json::Map::new(),
        };
        for kv in sets {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Config(format!("expected key=value, got {kv:?}")))?;
            let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
            if TOP_LEVEL.contains(&k) {
                root.insert(k.to_string(), v);
            } else {
                let params = root.entry("params").or_insert_with(|| Value::Object(Default::default()));
                let Value::Object(params) = params else {
                    return Err(CliError::Config("params must be an object".into()));
                };
                params.insert(k.to_string(), v);
            }
        }
        serde_json::from_value(Value::Object(root)).map_err(|e| CliError::Config(e.to_string()))
    }

    fn seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| CliError::Config("seed is required".into()))
    }

    fn typed<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        let map = self.params.clone().into_iter().collect();
        serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(format!("params: {e}")))
    }

    pub fn summary_path(&self) -> PathBuf {
        sibling(&self.output_path, "summary.txt")
    }

    pub fn dump_path(&self) -> PathBuf {
        sibling(&self.output_path, "dump.json")
    }
}

fn sibling(p: &Path, ext: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Caps the rayon pool at `CVQC_LAB_THREADS` workers when the variable is set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("CVQC_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Config(format!("CVQC_LAB_THREADS={v:?}")))?;
    // a pool that is already built keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// What every record reduces to in the summary table. `slack` is
/// nonnegative exactly when the row passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: String,
    pub claim_id: String,
    pub bound: f64,
    pub measured: f64,
    pub slack: f64,
    pub pass: bool,
}

trait Record: Serialize {
    fn summary(&self) -> SummaryRow;
}

macro_rules! record {
    ($t:ty) => {
        impl Record for $t {
            fn summary(&self) -> SummaryRow {
                SummaryRow {
                    label: self.label.clone(),
                    claim_id: self.claim_id.clone(),
                    bound: self.bound,
                    measured: self.measured,
                    slack: self.slack,
                    pass: self.pass,
                }
            }
        }
    };
}

/// `(slack, pass)` for `measured ≤ bound + tol`.
fn upper(measured: f64, bound: f64, tol: f64) -> (f64, bool) {
    let s = bound + tol - measured;
    (s, s >= 0.0)
}

/// `(slack, pass)` for `measured ≥ bound`.
fn lower(measured: f64, bound: f64) -> (f64, bool) {
    let s = measured - bound;
    (s, s >= 0.0)
}

/// `(slack, pass)` for a sampled rate within `SIGMAS` binomial σ of `p`.
fn binomial(rate: f64, p: f64, trials: u64) -> (f64, bool) {
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let s = tol::SIGMAS * sigma + 1e-12 - (rate - p).abs();
    (s, s >= 0.0)
}

#[derive(Debug, Serialize, Deserialize)]
struct JordanRecord {
    label: String,
    pair: u64,
    dim: usize,
    rank0: usize,
    rank1: usize,
    blocks_2d: usize,
    blocks_1d: usize,
    claim_id: String,
    bound: f64,
    measured: f64,
    slack: f64,
    pass: bool,
}
record!(JordanRecord);

#[derive(Debug, Serialize, Deserialize)]
struct PartitionRecord {
    label: String,
    seed: u64,
    m: usize,
    i: usize,
    gamma0: f64,
    #[serde(rename = "T")]
    big_t: usize,
    gamma: Option<f64>,
    mode: String,
    norm_psi0: Option<f64>,
    norm_psi1: Option<f64>,
    norm_err: Option<f64>,
    claim_id: String,
    bound: f64,
    measured: f64,
    slack: f64,
    pass: bool,
}
record!(PartitionRecord);

#[derive(Debug, Serialize, Deserialize)]
struct SweepRecord {
    label: String,
    m: usize,
    adversary: String,
    trials: u64,
    accepts: u64,
    rate: f64,
    queries: u64,
    claim_id: String,
    bound: f64,
    measured: f64,
    slack: f64,
    pass: bool,
}
record!(SweepRecord);

#[derive(Debug, Serialize, Deserialize)]
struct EffRecord {
    label: String,
    session: u64,
    time_bound: u64,
    prover: String,
    rounds: u8,
    accepted: bool,
    verifier_ops: u64,
    prover_ops: u64,
    message_bytes: u64,
    claim_id: String,
    bound: f64,
    measured: f64,
    slack: f64,
    pass: bool,
}
record!(EffRecord);

/// Rows of a finished run, serialized but not yet written.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub data: Vec<u8>,
    pub rows: Vec<SummaryRow>,
    pub dump: Option<String>,
}

impl RunOutput {
    fn new<R: Record>(records: &[R], format: Format, dump: Option<String>) -> Result<Self, CliError> {
        let data = match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for r in records {
                    w.serialize(r).map_err(runtime)?;
                }
                w.into_inner().map_err(runtime)?
            }
            Format::Json => {
                let mut v = serde_json::to_vec_pretty(records).map_err(runtime)?;
                v.push(b'\n');
                v
            }
        };
        Ok(Self { data, rows: records.iter().map(Record::summary).collect(), dump })
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub data_path: PathBuf,
    pub summary_path: PathBuf,
    pub dump_path: Option<PathBuf>,
    pub rows: usize,
    pub failures: usize,
}

/// Runs the experiment and writes its files. Rows that fail their claim are
/// reported, not turned into an error.
pub fn run(config: &ExperimentConfig) -> Result<RunReport, CliError> {
    let out = execute(config)?;
    let write = |p: &Path, bytes: &[u8]| std::fs::write(p, bytes).map_err(|e| runtime(format!("{}: {e}", p.display())));
    write(&config.output_path, &out.data)?;
    write(&config.summary_path(), render_rows(&out.rows).as_bytes())?;
    let dump_path = match &out.dump {
        Some(d) => {
            write(&config.dump_path(), d.as_bytes())?;
            Some(config.dump_path())
        }
        None => None,
    };
    Ok(RunReport {
        data_path: config.output_path.clone(),
        summary_path: config.summary_path(),
        dump_path,
        rows: out.rows.len(),
        failures: out.failures(),
    })
}

/// Computes a run without touching the filesystem.
pub fn execute(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let seed = config.seed()?;
    match config.command {
        Command::JordanDemo => jordan_demo(config.typed()?, seed, config.format),
        Command::PartitionClaims => partition_claims(config.typed()?, seed, config.format),
        Command::RepetitionSweep => repetition_sweep(config.typed()?, seed, config.format),
        Command::FsAttack => fs_attack(config.typed()?, seed, config.format),
        Command::EffverifyDemo => effverify_demo(config.typed()?, seed, config.format),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct JordanParams {
    pairs: u64,
    dim_min: usize,
    dim_max: usize,
}

impl Default for JordanParams {
    fn default() -> Self {
        Self { pairs: 20, dim_min: 2, dim_max: 12 }
    }
}

fn jordan_demo(p: JordanParams, seed: u64, format: Format) -> Result<RunOutput, CliError> {
    if p.dim_min < 1 || p.dim_min > p.dim_max || p.dim_max > 1 << 8 {
        return Err(CliError::Config(format!("dims {}..={} out of range", p.dim_min, p.dim_max)));
    }
    let mut records = Vec::new();
    let mut dump = None;
    for pair in 0..p.pairs {
        let mut rng = trial_rng(seed, pair);
        let dim = rng.gen_range(p.dim_min..=p.dim_max);
        let (r0, r1) = (rng.gen_range(0..=dim), rng.gen_range(0..=dim));
        let (p0, p1) = (random_projector_matrix(dim, r0, &mut rng), random_projector_matrix(dim, r1, &mut rng));
        let dec = jordan::decompose_matrices(&p0, &p1).map_err(runtime)?;
        let res = jordan::reconstruct_residuals(&dec, &p0, &p1).max();
        let eig = jordan::eigenphase_residual(&dec, &p0, &p1);
        if dump.is_none() {
            dump = Some(dec.to_json());
        }
        for (claim, bound, measured) in
            [("jordan-reconstruction", tol::RESIDUAL, res), ("jordan-eigenphase", tol::EIGPHASE, eig)]
        {
            let (slack, pass) = upper(measured, bound, 0.0);
            records.push(JordanRecord {
                label: format!("pair={pair}"),
                pair,
                dim,
                rank0: r0,
                rank1: r1,
                blocks_2d: dec.blocks2d.len(),
                blocks_1d: dec.blocks1d.len(),
                claim_id: claim.into(),
                bound,
                measured,
                slack,
                pass,
            });
        }
    }
    RunOutput::new(&records, format, dump)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PartitionClaimParams {
    m: usize,
    #[serde(rename = "T")]
    big_t: usize,
    gamma0: f64,
    strategies: u64,
    mode: EstimationMode,
    x_bits: usize,
    z_bits: usize,
    exclusivity: bool,
}

impl Default for PartitionClaimParams {
    fn default() -> Self {
        Self {
            m: 3,
            big_t: 16,
            gamma0: 1.0,
            strategies: 2,
            mode: EstimationMode::Ideal,
            x_bits: 1,
            z_bits: 0,
            exclusivity: true,
        }
    }
}

fn partition_claims(p: PartitionClaimParams, seed: u64, format: Format) -> Result<RunOutput, CliError> {
    let layout = StrategyLayout::new(p.m, p.x_bits, p.z_bits).map_err(|e| CliError::Config(e.to_string()))?;
    PartitionParams::new(p.m, 1, p.gamma0, p.big_t, 1, p.mode).map_err(|e| CliError::Config(e.to_string()))?;
    let mode = match p.mode {
        EstimationMode::Ideal => "ideal",
        EstimationMode::Kernel => "kernel",
    };
    let mut records = Vec::new();
    for sidx in 0..p.strategies {
        let s = ProverStrategy::random(layout, &mut trial_rng(seed, sidx));
        let psi = s.initial_state().map_err(runtime)?;
        for i in 1..=p.m {
            let ctx = PartitionContext::new(&s, i).map_err(runtime)?;
            let base = PartitionParams::new(p.m, i, p.gamma0, p.big_t, 1, p.mode).map_err(runtime)?;
            let row = |label: String, gamma: Option<f64>, norms: Option<(f64, f64, f64)>, claim: &str, bound: f64, measured: f64, tol: f64| {
                let (slack, pass) = upper(measured, bound, tol);
                PartitionRecord {
                    label,
                    seed: sidx,
                    m: p.m,
                    i,
                    gamma0: p.gamma0,
                    big_t: p.big_t,
                    gamma,
                    mode: mode.into(),
                    norm_psi0: norms.map(|n| n.0),
                    norm_psi1: norms.map(|n| n.1),
                    norm_err: norms.map(|n| n.2),
                    claim_id: claim.into(),
                    bound,
                    measured,
                    slack,
                    pass,
                }
            };
            let c1 = partition::claim1_grid_average(&ctx, &base, &psi).map_err(runtime)?;
            records.push(row(format!("s={sidx},i={i}"), None, None, "claim1", 6.0 / p.big_t as f64, c1, tol::CLAIM1_NEGL));
            for j in 1..=p.big_t {
                let params = base.with_gamma_index(j).map_err(runtime)?;
                let out = ctx.run_g(&params, &psi).map_err(runtime)?;
                let norms = Some((out.psi0.norm_sqr().sqrt(), out.psi1.norm_sqr().sqrt(), out.psi_err.norm_sqr().sqrt()));
                let label = format!("s={sidx},i={i},j={j}");
                let g = Some(params.gamma);
                if p.exclusivity {
                    let r = ctx.exclusivity_residual(&params, &psi).map_err(runtime)?;
                    records.push(row(label.clone(), g, norms, "claim2", 0.0, r, tol::RESIDUAL));
                }
                let half = 0.5 * psi.norm_sqr();
                records.push(row(label.clone(), g, norms, "claim3", half, partition::claim3_average(&out), tol::ATOL));
                if p.mode == EstimationMode::Ideal {
                    if let Some(acc) = partition::claim4_max_acceptance(&ctx, &out).map_err(runtime)? {
                        let bound = 2f64.powi(p.m as i32 - 1) * params.gamma;
                        records.push(row(label, g, norms, "claim4", bound, acc, tol::TEST_ROUND));
                    }
                }
            }
        }
    }
    RunOutput::new(&records, format, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SweepAdversary {
    Honest,
    TestOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ProtocolName {
    Toy,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SweepParams {
    protocol: ProtocolName,
    /// Shorthand for `m_min = m_max = m`.
    m: Option<usize>,
    m_min: usize,
    m_max: usize,
    adversary: SweepAdversary,
    trials: u64,
    n: usize,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            protocol: ProtocolName::Toy,
            m: None,
            m_min: 1,
            m_max: 8,
            adversary: SweepAdversary::TestOnly,
            trials: 100_000,
            n: 6,
        }
    }
}

/// Instance and claim for a sweep adversary: the test-only cheater runs on a
/// no-instance against `2^{−m}`, the honest prover on a yes-instance.
fn sweep_setup(adv: SweepAdversary, seed: u64) -> (AdversaryStrategy, Instance) {
    match adv {
        SweepAdversary::Honest => (AdversaryStrategy::Honest, Instance::yes(seed)),
        SweepAdversary::TestOnly => (AdversaryStrategy::TestOnly, Instance::no(seed)),
    }
}

fn repetition_sweep(p: SweepParams, seed: u64, format: Format) -> Result<RunOutput, CliError> {
    let (m_min, m_max) = p.m.map_or((p.m_min, p.m_max), |m| (m, m));
    if m_min == 0 || m_min > m_max || p.trials == 0 {
        return Err(CliError::Config(format!("need 1 <= m_min <= m_max and trials >= 1, got {m_min}..={m_max}")));
    }
    let base = toy_protocol(p.n).map_err(|e| CliError::Config(e.to_string()))?;
    let (adv, x) = sweep_setup(p.adversary, seed);
    let mut records = Vec::new();
    for m in m_min..=m_max {
        let rep = parallel_repeat(base, m).map_err(runtime)?;
        let st = run_protocol(&rep, &adv, &x, p.trials, seed.wrapping_add(m as u64)).map_err(runtime)?;
        let rate = st.accept_rate();
        let (claim, bound, (slack, pass)) = match p.adversary {
            SweepAdversary::TestOnly => {
                let b = 0.5f64.powi(m as i32);
                ("repetition-test-only", b, binomial(rate, b, p.trials))
            }
            SweepAdversary::Honest => ("repetition-completeness", 0.99, lower(rate, 0.99)),
        };
        records.push(sweep_record(format!("m={m}"), m, &adv, &st, claim, bound, slack, pass));
    }
    RunOutput::new(&records, format, None)
}

#[allow(clippy::too_many_arguments)]
fn sweep_record(
    label: String,
    m: usize,
    adv: &AdversaryStrategy,
    st: &Stats,
    claim: &str,
    bound: f64,
    slack: f64,
    pass: bool,
) -> SweepRecord {
    SweepRecord {
        label,
        m,
        adversary: adv.name(),
        trials: st.trials,
        accepts: st.accepts,
        rate: st.accept_rate(),
        queries: st.queries,
        claim_id: claim.into(),
        bound,
        measured: st.accept_rate(),
        slack,
        pass,
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FsParams {
    protocol: ProtocolName,
    m: usize,
    budgets: Vec<usize>,
    trials: u64,
    completeness_trials: u64,
    n: usize,
    oracle_seed: u64,
}

impl Default for FsParams {
    fn default() -> Self {
        Self {
            protocol: ProtocolName::Toy,
            m: 10,
            budgets: vec![1, 64, 512],
            trials: 4000,
            completeness_trials: 1000,
            n: 6,
            oracle_seed: 7,
        }
    }
}

fn fs_attack(p: FsParams, seed: u64, format: Format) -> Result<RunOutput, CliError> {
    if p.m == 0 || p.trials == 0 || p.completeness_trials == 0 || p.budgets.contains(&0) {
        return Err(CliError::Config("m, trials and every budget must be at least 1".into()));
    }
    let rep = parallel_repeat(toy_protocol(p.n).map_err(|e| CliError::Config(e.to_string()))?, p.m).map_err(runtime)?;
    let fs = fiat_shamir(rep, OracleTable::new(p.oracle_seed, p.m).map_err(runtime)?).map_err(runtime)?;
    let mut records = Vec::new();

    let honest = AdversaryStrategy::Honest;
    let st = run_protocol(&fs, &honest, &Instance::yes(seed), p.completeness_trials, seed).map_err(runtime)?;
    let (slack, pass) = lower(st.accept_rate(), 0.99);
    records.push(sweep_record("honest".into(), p.m, &honest, &st, "fs-completeness", 0.99, slack, pass));

    for (b, &q) in p.budgets.iter().enumerate() {
        let adv = AdversaryStrategy::FsGrinder { query_budget: q, inner: Box::new(AdversaryStrategy::TestOnly) };
        let st = run_protocol(&fs, &adv, &Instance::no(seed), p.trials, seed.wrapping_add(1 + b as u64)).map_err(runtime)?;
        let bound = grinding_success(p.m, q);
        let (slack, pass) = binomial(st.accept_rate(), bound, p.trials);
        records.push(sweep_record(format!("q={q}"), p.m, &adv, &st, "fs-grinding", bound, slack, pass));
    }
    RunOutput::new(&records, format, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SuiteName {
    Stub,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct EffParams {
    inner: ProtocolName,
    suite: SuiteName,
    time_bound: u64,
    trials: u64,
    n: usize,
    copies: usize,
    prover: EffProverParam,
    rounds: u8,
    oracle_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum EffProverParam {
    Honest,
    CorruptResponse,
    MismatchedProof,
}

impl Default for EffParams {
    fn default() -> Self {
        Self {
            inner: ProtocolName::Toy,
            suite: SuiteName::Stub,
            time_bound: 4096,
            trials: 10,
            n: 8,
            copies: 4,
            prover: EffProverParam::Honest,
            rounds: 4,
            oracle_seed: 9,
        }
    }
}

fn effverify_demo(p: EffParams, seed: u64, format: Format) -> Result<RunOutput, CliError> {
    if p.rounds != 2 && p.rounds != 4 {
        return Err(CliError::Config(format!("rounds must be 2 or 4, got {}", p.rounds)));
    }
    let inner = DelegatedInner::new(p.n, p.copies, p.time_bound, p.oracle_seed).map_err(|e| CliError::Config(e.to_string()))?;
    let suite = BackendSuite::stub();
    let prover = match p.prover {
        EffProverParam::Honest => EffProver::Honest,
        EffProverParam::CorruptResponse => EffProver::CorruptResponse,
        EffProverParam::MismatchedProof => EffProver::MismatchedProof,
    };
    let session_fn = if p.rounds == 4 { effverify::run_four_round } else { effverify::run_two_round_fs };
    let mut records = Vec::new();
    let mut dump = None;
    for t in 0..p.trials {
        let x = Instance::yes(seed.wrapping_add(t));
        let (verdict, sess) = session_fn(&suite, &inner, &x, prover, seed.wrapping_add(t)).map_err(runtime)?;
        let cost = effverify::cost_report(&sess).map_err(runtime)?;
        let got = verdict.is_accept() as u8 as f64;
        let (claim, bound) = match prover {
            EffProver::Honest => ("effverify-accept", 1.0),
            EffProver::MismatchedProof => ("effverify-reject", 0.0),
            EffProver::CorruptResponse => {
                // the composed verdict must match the inner verdict on the same e
                let e = suite.snark.extract(&sess.proof).ok_or_else(|| runtime("proof carries no witness"))?;
                let rho = suite.prg.expand(&sess.s, effverify::SEED_LEN, &mut 0).map_err(runtime)?;
                let (k, td) = inner.keygen(&x, &rho, &mut 0).map_err(runtime)?;
                ("effverify-composition", inner.v_out(&x, &k, &td, &e, &mut 0).is_accept() as u8 as f64)
            }
        };
        let slack = 0.0 - (got - bound).abs();
        if dump.is_none() {
            dump = Some(sess.to_json());
        }
        records.push(EffRecord {
            label: format!("session={t}"),
            session: t,
            time_bound: p.time_bound,
            prover: format!("{:?}", p.prover).to_lowercase(),
            rounds: p.rounds,
            accepted: verdict.is_accept(),
            verifier_ops: cost.verifier_ops,
            prover_ops: cost.prover_ops,
            message_bytes: cost.message_bytes,
            claim_id: claim.into(),
            bound,
            measured: got,
            slack,
            pass: slack >= 0.0,
        });
    }
    RunOutput::new(&records, format, dump)
}

const COLUMNS: [&str; 6] = ["label", "claim_id", "bound", "measured", "slack", "pass"];

/// Aligned table, one line per row, then one tally line per claim.
pub fn render_rows(rows: &[SummaryRow]) -> String {
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.label.replace(char::is_whitespace, "_"),
                r.claim_id.replace(char::is_whitespace, "_"),
                format!("{:.6e}", r.bound),
                format!("{:.6e}", r.measured),
                format!("{:.6e}", r.slack),
                if r.pass { "PASS" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let mut width = COLUMNS.map(str::len);
    for c in &cells {
        for k in 0..6 {
            width[k] = width[k].max(c[k].len());
        }
    }
    let line = |c: [&str; 6]| {
        let mut s = String::new();
        for k in 0..6 {
            let _ = write!(s, "{:<w$}", c[k], w = width[k]);
            if k < 5 {
                s.push_str("  ");
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(COLUMNS);
    for c in &cells {
        out += &line([&c[0], &c[1], &c[2], &c[3], &c[4], &c[5]]);
    }
    let mut tally: BTreeMap<&str, (usize, usize, f64)> = BTreeMap::new();
    for r in rows {
        let t = tally.entry(&r.claim_id).or_insert((0, 0, f64::INFINITY));
        t.0 += r.pass as usize;
        t.1 += 1;
        t.2 = t.2.min(r.slack);
    }
    if !tally.is_empty() {
        out.push('\n');
    }
    for (claim, (pass, total, worst)) in tally {
        let _ = writeln!(out, "{claim}: {pass}/{total} pass, worst slack {worst:.6e}");
    }
    out
}

/// Inverse of the table part of [`render_rows`].
pub fn parse_summary(text: &str) -> Result<Vec<SummaryRow>, CliError> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().map(|l| l.split_whitespace().collect()).unwrap_or_default();
    if header != COLUMNS {
        return Err(CliError::Parse(format!("unexpected header {header:?}")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| CliError::Parse(format!("{s:?}: {e}")));
    lines
        .take_while(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 6 {
                return Err(CliError::Parse(format!("expected 6 fields: {l:?}")));
            }
            let pass = match f[5] {
                "PASS" => true,
                "FAIL" => false,
                other => return Err(CliError::Parse(format!("pass column {other:?}"))),
            };
            Ok(SummaryRow {
                label: f[0].into(),
                claim_id: f[1].into(),
                bound: num(f[2])?,
                measured: num(f[3])?,
                slack: num(f[4])?,
                pass,
            })
        })
        .collect()
}

/// Summary rows of a data file written by [`run`]; the format follows the
/// extension (`.json`, anything else is CSV).
pub fn read_rows(data_file: &Path) -> Result<Vec<SummaryRow>, CliError> {
    let bytes = std::fs::read(data_file).map_err(|e| CliError::Parse(format!("{}: {e}", data_file.display())))?;
    if data_file.extension().is_some_and(|e| e == "json") {
        return serde_json::from_slice::<Vec<SummaryRow>>(&bytes).map_err(|e| CliError::Parse(e.to_string()));
    }
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    r.deserialize::<SummaryRow>().map(|row| row.map_err(|e| CliError::Parse(e.to_string()))).collect()
}

pub fn render_summary(data_file: &Path) -> Result<String, CliError> {
    Ok(render_rows(&read_rows(data_file)?))
}
