use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use csreg::experiments::{
    demo_graph, read_gset, run_maxcut, run_orthogonal, sparse_success_curve, success_curve,
    write_curve_csv, Baseline, InstanceKind, Method, SuccessCurveRow,
};
use csreg::linalg::standard_normal_matrix;
use csreg::quantize::{binarize, ternarize, QuantResult};
use csreg::regularizers::gradcheck::{finite_difference, relative_error};
use csreg::regularizers::{landscape_grid, write_landscape_csv, BetaMode, RegularizerKind};
use csreg::{DenseMatrix, DenseVector, FistaConfig, RngStream};
use serde::Serialize;
use serde_json::json;

use crate::sweep::parse_sweep;
use crate::{
    Cli, Command, Common, EigvecArgs, GradcheckArgs, LandscapeArgs, LandscapeKind, MaxcutArgs,
    OrthoArgs, QuantMode, QuantizeArgs, RecoverArgs, RecoverKind, RecoverMethod, SparseArgs,
    SparseKind, SparseMethod, TwobitArgs,
};

const DESK_TRIALS: usize = 100;
const PAPER_TRIALS: usize = 1000;

/// Why a run stopped early.
#[derive(Debug)]
pub enum Failure {
    /// The configuration was rejected before any computation.
    Config(String),
    /// A solver aborted or an artifact could not be written.
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<csreg::Error> for Failure {
    fn from(e: csreg::Error) -> Self {
        use csreg::Error::*;
        match e {
            Dimension(_) | InvalidArgument(_) | Incompatible(_) | Parse(_) => {
                Failure::Config(e.to_string())
            }
            RankDeficient { .. } | NonFinite(_) | NotDifferentiable(_) => {
                Failure::Runtime(e.into())
            }
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn config(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(Failure::Config(msg()))
    }
}

pub fn dispatch(cli: &Cli) -> Outcome {
    let common = &cli.common;
    if let Some(tol) = common.tol {
        check(tol > 0.0 && tol.is_finite(), || {
            format!("--tol must be positive, got {tol}")
        })?;
    }
    check(common.max_iter != Some(0), || {
        "--max-iter must be at least 1".into()
    })?;
    check(common.restarts != Some(0), || {
        "--restarts must be at least 1".into()
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs)
        .build()
        .map_err(|e| Failure::Runtime(e.into()))?;
    let (out, resolved) = pool.install(|| match &cli.command {
        Command::Recover(a) => recover(common, a),
        Command::Sparse(a) => sparse(common, a),
        Command::Eigvec(a) => eigvec(common, a),
        Command::Ortho(a) => ortho(common, a),
        Command::Twobit(a) => twobit(common, a),
        Command::Maxcut(a) => maxcut(common, a),
        Command::Quantize(a) => quantize(a),
        Command::Gradcheck(a) => gradcheck(common, a),
        Command::Landscape(a) => landscape(a),
    })?;
    write_manifest(cli, &out, resolved)
}

/// Solver settings after applying defaults and overrides.
#[derive(Debug, Serialize)]
struct Resolved {
    trials: Option<usize>,
    max_iter: usize,
    restarts: usize,
    stop_tol: f64,
}

fn solver_config(common: &Common, default_restarts: usize, default_max_iter: usize) -> FistaConfig {
    let defaults = FistaConfig::default();
    FistaConfig {
        max_iter: common.max_iter.unwrap_or(default_max_iter),
        restarts: common.restarts.unwrap_or(default_restarts),
        stop_tol: common.tol.unwrap_or(defaults.stop_tol),
        ..defaults
    }
}

fn resolved(cfg: &FistaConfig, trials: Option<usize>) -> Resolved {
    Resolved {
        trials,
        max_iter: cfg.max_iter,
        restarts: cfg.restarts,
        stop_tol: cfg.stop_tol,
    }
}

fn trials(common: &Common, explicit: Option<usize>) -> Result<usize, Failure> {
    let t = explicit.unwrap_or(if common.paper_scale {
        PAPER_TRIALS
    } else {
        DESK_TRIALS
    });
    check(t >= 1, || "--trials must be at least 1".into())?;
    Ok(t)
}

fn sweep(text: &str, flag: &str) -> Result<Vec<usize>, Failure> {
    parse_sweep(text).map_err(|e| config(format!("--{flag}: {e}")))
}

fn check_sizes(n: usize, ms: &[usize], allow_zero_m: bool) -> Outcome {
    check(n >= 1, || "--n must be at least 1".into())?;
    for &m in ms {
        check(m <= n, || format!("M = {m} exceeds N = {n}"))?;
        check(allow_zero_m || m >= 1, || "M must be at least 1".into())?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, Failure> {
    let file = fs::File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(Failure::Runtime)?;
    Ok(BufWriter::new(file))
}

fn write_curve(path: &Path, rows: &[SuccessCurveRow]) -> Outcome {
    let mut w = create(path)?;
    write_curve_csv(rows, &mut w)?;
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Outcome {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::Runtime(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn write_manifest(cli: &Cli, out: &Path, resolved: Option<Resolved>) -> Outcome {
    let manifest = json!({
        "tool": "csreg",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cli.common.seed,
        "artifact": out.display().to_string(),
        "config": cli,
        "resolved": resolved,
    });
    write_json(&manifest_path(out), &manifest)
}

type Ran = Result<(PathBuf, Option<Resolved>), Failure>;

fn recover(common: &Common, a: &RecoverArgs) -> Ran {
    let ms = sweep(&a.m, "m")?;
    check_sizes(a.n, &ms, false)?;
    let trials = trials(common, a.trials)?;
    let kind = match a.kind {
        RecoverKind::SymBinary => InstanceKind::SymBinary,
        RecoverKind::OneSidedBinary => InstanceKind::OneSidedBinary,
        RecoverKind::SymTernary => InstanceKind::SymTernary,
    };
    let method = match a.reg {
        RecoverMethod::Bin => Method::Regularizer(RegularizerKind::Bin),
        RecoverMethod::Osb => Method::Regularizer(RegularizerKind::Osb),
        RecoverMethod::Ter => Method::Regularizer(RegularizerKind::Ter),
        RecoverMethod::Bbin => Method::Regularizer(RegularizerKind::BBin),
        RecoverMethod::BinExp => Method::Regularizer(RegularizerKind::BinExp),
        RecoverMethod::FixedScale => {
            check(a.alpha.is_finite(), || "--alpha must be finite".into())?;
            Method::Regularizer(RegularizerKind::FixedScale(a.alpha))
        }
        RecoverMethod::LinfDr => Method::Baseline(Baseline::LinfDr),
        RecoverMethod::L1Dr => Method::Baseline(Baseline::L1Dr),
        RecoverMethod::BinBetaFixed => {
            check(a.beta.is_finite(), || "--beta must be finite".into())?;
            Method::Baseline(Baseline::BinBetaFixed(a.beta))
        }
        RecoverMethod::BinBetaJoint => Method::Baseline(Baseline::BinBetaJoint),
    };
    let cfg = solver_config(
        common,
        kind.default_restarts(),
        FistaConfig::default().max_iter,
    );
    let rows = success_curve(kind, &method, a.n, &ms, trials, common.seed, &cfg)?;
    write_curve(&a.out, &rows)?;
    Ok((a.out.clone(), Some(resolved(&cfg, Some(trials)))))
}

fn sparse(common: &Common, a: &SparseArgs) -> Ran {
    let ks = sweep(&a.k, "k")?;
    check_sizes(a.n, &[a.m], false)?;
    for &k in &ks {
        check((1..=a.n).contains(&k), || {
            format!("K = {k} must lie in [1, N = {}]", a.n)
        })?;
    }
    let trials = trials(common, a.trials)?;
    let family: fn(usize) -> InstanceKind = match a.kind {
        SparseKind::SparseOsb => InstanceKind::SparseOsb,
        SparseKind::SparseTer => InstanceKind::SparseTer,
    };
    let method = match a.reg {
        SparseMethod::Osb => Method::Regularizer(RegularizerKind::Osb),
        SparseMethod::Ter => Method::Regularizer(RegularizerKind::Ter),
        SparseMethod::L1Dr => Method::Baseline(Baseline::L1Dr),
    };
    let cfg = solver_config(common, 1, FistaConfig::default().max_iter);
    let rows = sparse_success_curve(family, &method, a.n, a.m, &ks, trials, common.seed, &cfg)?;
    write_curve(&a.out, &rows)?;
    Ok((a.out.clone(), Some(resolved(&cfg, Some(trials)))))
}

fn eigvec(common: &Common, a: &EigvecArgs) -> Ran {
    let ms = sweep(&a.m, "m")?;
    check_sizes(a.n, &ms, false)?;
    let trials = trials(common, a.trials)?;
    let method = if a.baseline {
        Method::Baseline(Baseline::EigMuJoint)
    } else {
        // an empty matrix binds to each instance's own matrix
        Method::Regularizer(RegularizerKind::Eig(DenseMatrix::zeros(0, 0)))
    };
    let kind = InstanceKind::Eigenvector;
    let cfg = solver_config(
        common,
        kind.default_restarts(),
        FistaConfig::default().max_iter,
    );
    let rows = success_curve(kind, &method, a.n, &ms, trials, common.seed, &cfg)?;
    write_curve(&a.out, &rows)?;
    Ok((a.out.clone(), Some(resolved(&cfg, Some(trials)))))
}

fn ortho(common: &Common, a: &OrthoArgs) -> Ran {
    let ms = sweep(&a.m, "m")?;
    check_sizes(a.n, &ms, true)?;
    check((1..=a.n).contains(&a.k), || {
        format!("K = {} must lie in [1, N = {}]", a.k, a.n)
    })?;
    check(a.trials >= 1, || "--trials must be at least 1".into())?;
    let cfg = solver_config(common, 1, 1000);
    let mut rows = Vec::with_capacity(ms.len());
    for (r, &m) in ms.iter().enumerate() {
        // disjoint stream ranges per sweep point
        let seed = common.seed.wrapping_add((r as u64) << 32);
        let s = run_orthogonal(a.n, a.k, m, a.trials, seed, &cfg)?;
        let p = s.success_rate;
        rows.push(SuccessCurveRow {
            ratio: m as f64 / a.n as f64,
            success_prob: p,
            stderr: (p * (1.0 - p) / a.trials as f64).sqrt(),
            trials: a.trials,
        });
    }
    rows.sort_by(|x, y| x.ratio.total_cmp(&y.ratio));
    write_curve(&a.out, &rows)?;
    Ok((a.out.clone(), Some(resolved(&cfg, Some(a.trials)))))
}

fn twobit(common: &Common, a: &TwobitArgs) -> Ran {
    let ms = sweep(&a.m, "m")?;
    check_sizes(a.n, &ms, true)?;
    check(a.lambda >= 0.0 && a.lambda.is_finite(), || {
        format!("--lambda must be nonnegative, got {}", a.lambda)
    })?;
    let trials = trials(common, a.trials)?;
    let kind = InstanceKind::TwoBit;
    let cfg = solver_config(
        common,
        kind.default_restarts(),
        FistaConfig::default().max_iter,
    );
    let method = Method::PenalizedEquispaced {
        bits: 2,
        lambda: a.lambda,
    };
    let rows = success_curve(kind, &method, a.n, &ms, trials, common.seed, &cfg)?;
    write_curve(&a.out, &rows)?;
    Ok((a.out.clone(), Some(resolved(&cfg, Some(trials)))))
}

fn maxcut(common: &Common, a: &MaxcutArgs) -> Ran {
    let (graph, default_lambda) = match (&a.source.demo, &a.source.graph) {
        (Some(name), _) => (demo_graph(name)?, 1.0),
        (_, Some(path)) => (read_gset(path)?, 1e-7),
        (None, None) => return Err(config("one of --demo or --graph is required")),
    };
    let lambda = a.lambda.unwrap_or(default_lambda);
    check(lambda >= 0.0 && lambda.is_finite(), || {
        format!("--lambda must be nonnegative, got {lambda}")
    })?;
    let cfg = solver_config(common, 10, FistaConfig::default().max_iter);
    let report = run_maxcut(
        &graph,
        lambda,
        cfg.restarts,
        &mut RngStream::new(common.seed, 0),
        &cfg,
    )?;
    let value = serde_json::to_value(&report).map_err(|e| Failure::Runtime(e.into()))?;
    write_json(&a.out, &value)?;
    Ok((a.out.clone(), Some(resolved(&cfg, None))))
}

fn read_weights(path: &Path) -> Result<DenseVector, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
    let values: Vec<f64> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| config(format!("invalid weight `{t}` in {}", path.display())))
        })
        .collect::<Result<_, _>>()?;
    check(!values.is_empty(), || {
        format!("{} contains no weights", path.display())
    })?;
    Ok(DenseVector::from_vec(values))
}

fn quantize(a: &QuantizeArgs) -> Ran {
    let w = read_weights(&a.input)?;
    let q: QuantResult = match a.mode {
        QuantMode::Binary => binarize(&w)?,
        QuantMode::Ternary => ternarize(&w)?,
    };
    let value = json!({
        "scale": q.scale,
        "threshold": q.threshold,
        "levels": q.levels.as_slice(),
        "objective": q.objective,
    });
    write_json(&a.out, &value)?;
    Ok((a.out.clone(), None))
}

fn gradcheck(common: &Common, a: &GradcheckArgs) -> Ran {
    check(a.n >= 2, || "--n must be at least 2".into())?;
    check(a.points >= 1, || "--points must be at least 1".into())?;
    let mut rng = RngStream::new(common.seed, 0);
    let n = a.n;
    let k = n.min(4);
    let kinds: Vec<(RegularizerKind, usize)> = vec![
        (RegularizerKind::Bin, n),
        (RegularizerKind::Osb, n),
        (RegularizerKind::Ter, n),
        (
            RegularizerKind::Eig(standard_normal_matrix(n, n, &mut rng)),
            n,
        ),
        (RegularizerKind::Om { k }, n * k),
        (RegularizerKind::Equ { bits: 2 }, 2 * n),
        (RegularizerKind::BBin, n),
        (RegularizerKind::BinExp, n),
        (RegularizerKind::FixedScale(1.0), n),
        (
            RegularizerKind::Ns(standard_normal_matrix(n.div_ceil(2), n, &mut rng)),
            n,
        ),
        (RegularizerKind::BaselineBinBeta(BetaMode::Fixed(1.0)), n),
        (RegularizerKind::BaselineBinBeta(BetaMode::Joint), n + 1),
    ];
    let mut w = create(&a.out)?;
    writeln!(w, "kind,points,worst_relative_error")?;
    for (kind, len) in &kinds {
        let mut worst: f64 = 0.0;
        for _ in 0..a.points {
            let x = rng.normal_vector(*len);
            let analytic = kind.gradient(&x)?;
            let fd = finite_difference(|p| kind.value(p).unwrap_or(f64::NAN), &x, 1e-6);
            worst = worst.max(relative_error(&fd, &analytic));
        }
        writeln!(
            w,
            "{},{},{}",
            kind.name(),
            a.points,
            csreg::fmt::sig(worst, 6)
        )?;
    }
    w.flush()?;
    Ok((a.out.clone(), None))
}

fn landscape(a: &LandscapeArgs) -> Ran {
    let kind = match a.reg {
        LandscapeKind::Bin => RegularizerKind::Bin,
        LandscapeKind::Osb => RegularizerKind::Osb,
        LandscapeKind::Ter => RegularizerKind::Ter,
        LandscapeKind::Bbin => RegularizerKind::BBin,
        LandscapeKind::BinExp => RegularizerKind::BinExp,
        LandscapeKind::NondiffSq => RegularizerKind::NonDiffSq,
        LandscapeKind::NondiffRoot => RegularizerKind::NonDiffRoot,
    };
    check(a.lo.is_finite() && a.hi.is_finite(), || {
        "--lo and --hi must be finite".into()
    })?;
    let rows = landscape_grid(&kind, a.lo, a.hi, a.resolution)?;
    let mut w = create(&a.out)?;
    write_landscape_csv(&mut w, &rows)?;
    w.flush()?;
    Ok((a.out.clone(), None))
}
