use dynframe::frame::{
    analyze, frame_bounds, frame_operator_closed_form, reconstruct, select_iteration_order,
    BoundMethod, IteratedSystem,
};
use dynframe::hardy::{min_norm_interpolant, surjectivity_probe};
use dynframe::sequences::single_factor_ratio_constant;
use dynframe::tensor::theorem5_experiment;
use dynframe::{carleson_infimum, generate, DiscSequence};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::config::{shorthand, Command, ExperimentConfig};
use crate::table::{emit, ReportTable};
use crate::CliError;

fn provenance(cfg: &ExperimentConfig) -> Map<String, Value> {
    let mut echo = Map::new();
    echo.insert("command".into(), cfg.command.name().into());
    echo.insert("a".into(), shorthand(&cfg.sequence).into());
    if let Some(b) = &cfg.factor_b {
        echo.insert("b".into(), shorthand(b).into());
    }
    echo.insert("klist".into(), Value::from(cfg.k_list.clone()));
    echo.insert("tol".into(), Value::from(cfg.tol));
    echo.insert("seed".into(), cfg.seed.map_or(Value::Null, Value::from));
    echo.insert("trials".into(), Value::from(cfg.trials));
    let mut p = Map::new();
    p.insert("config".into(), Value::Object(echo));
    p.insert("library".into(), "dynframe".into());
    p.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    p
}

/// Fresh generator for truncation `k`, so each cell is independent of the
/// order in which cells are computed.
fn cell_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn gen_table(seq: &DiscSequence) -> ReportTable {
    let mut t = ReportTable::new(&["k", "re", "im", "modulus", "weight"]);
    for (i, p) in seq.points().iter().enumerate() {
        t.push(vec![
            (i + 1).into(),
            p.re().into(),
            p.im().into(),
            p.modulus().into(),
            p.weight().into(),
        ]);
    }
    t
}

fn carleson_table(cfg: &ExperimentConfig, seq: &DiscSequence) -> ReportTable {
    let mut t = ReportTable::new(&["k", "infimum", "log_infimum", "argmin"]);
    for &k in &cfg.k_list {
        let c = carleson_infimum(&seq.prefix(k));
        t.push(vec![
            k.into(),
            c.value.into(),
            c.log_value.into(),
            (c.argmin + 1).into(),
        ]);
    }
    t
}

fn method_name(m: BoundMethod) -> &'static str {
    match m {
        BoundMethod::DenseEig => "dense_eig",
        BoundMethod::PowerIteration => "power_iteration",
    }
}

fn bounds_table(cfg: &ExperimentConfig, seq: &DiscSequence) -> Result<ReportTable, CliError> {
    let mut t = ReportTable::new(&["k", "lower_a", "upper_b", "condition", "method", "residual"]);
    for &k in &cfg.k_list {
        let system = IteratedSystem::new(seq.prefix(k), 0)?;
        let b = frame_bounds(&frame_operator_closed_form(&system), cfg.tol)?;
        t.push(vec![
            k.into(),
            b.lower.into(),
            b.upper.into(),
            b.condition().into(),
            method_name(b.method).into(),
            b.residual.into(),
        ]);
    }
    Ok(t)
}

fn tensor_table(cfg: &ExperimentConfig) -> Result<ReportTable, CliError> {
    let b = cfg
        .factor_b
        .as_ref()
        .expect("tensor configs carry two factors");
    let rows = theorem5_experiment(&cfg.sequence, b, &cfg.k_list, cfg.tol)?;
    let mut t = ReportTable::new(&[
        "k",
        "carleson_trunc",
        "lower_a",
        "upper_b",
        "ratio_c_hat",
        "ratio_satisfied",
    ]);
    for r in rows {
        t.push(vec![
            r.k.into(),
            r.carleson_trunc.into(),
            r.lower_a.into(),
            r.upper_b.into(),
            r.ratio_c_hat.into(),
            r.ratio_satisfied.into(),
        ]);
    }
    Ok(t)
}

fn interp_table(
    cfg: &ExperimentConfig,
    seq: &DiscSequence,
    seed: u64,
) -> Result<ReportTable, CliError> {
    let mut t = ReportTable::new(&[
        "k",
        "trials",
        "max_residual",
        "max_norm_sq",
        "gram_condition",
        "probe_max_ratio",
        "probe_min_ratio",
        "inv_sqrt_lower_a",
        "inv_sqrt_upper_b",
    ]);
    for &k in &cfg.k_list {
        let s = seq.prefix(k);
        let mut rng = cell_rng(seed, k);
        let mut max_residual = 0.0f64;
        let mut max_norm_sq = 0.0f64;
        let mut condition = f64::NAN;
        for _ in 0..cfg.trials {
            let r = min_norm_interpolant(&s, &random_vector(&mut rng, k), cfg.tol)?;
            max_residual = max_residual.max(r.residual);
            max_norm_sq = max_norm_sq.max(r.norm_sq);
            condition = r.gram_condition;
        }
        let probe = surjectivity_probe(&s, cfg.trials, seed)?;
        let bounds = frame_bounds(
            &frame_operator_closed_form(&IteratedSystem::new(s, 0)?),
            1e-10,
        )?;
        t.push(vec![
            k.into(),
            cfg.trials.into(),
            max_residual.into(),
            max_norm_sq.into(),
            condition.into(),
            probe.max_norm_ratio.into(),
            probe.min_norm_ratio.into(),
            (1.0 / bounds.lower.sqrt()).into(),
            (1.0 / bounds.upper.sqrt()).into(),
        ]);
    }
    Ok(t)
}

fn reconstruct_table(
    cfg: &ExperimentConfig,
    seq: &DiscSequence,
    seed: u64,
) -> Result<ReportTable, CliError> {
    let mut t = ReportTable::new(&["k", "n", "trials", "max_relative_error", "max_iterations"]);
    for &k in &cfg.k_list {
        let s = seq.prefix(k);
        let n = select_iteration_order(&s, cfg.tol);
        let system = IteratedSystem::new(s, n)?;
        let mut rng = cell_rng(seed, k);
        let mut worst = 0.0f64;
        let mut iterations = 0usize;
        for _ in 0..cfg.trials {
            let x = dynframe::linalg::CVector::from_vec(random_vector(&mut rng, k));
            let coeffs = analyze(&system, &x)?;
            let rec = reconstruct(&system, &coeffs, cfg.tol)?;
            let err = (&rec.x - &x).norm() / x.norm();
            worst = worst.max(err);
            iterations = iterations.max(rec.iterations);
        }
        t.push(vec![
            k.into(),
            n.into(),
            cfg.trials.into(),
            worst.into(),
            iterations.into(),
        ]);
    }
    Ok(t)
}

fn report_table(cfg: &ExperimentConfig, seq: &DiscSequence) -> Result<ReportTable, CliError> {
    let mut t = ReportTable::new(&[
        "k",
        "carleson_infimum",
        "lower_a",
        "upper_b",
        "condition",
        "ratio_c_hat",
        "tail_n",
    ]);
    for &k in &cfg.k_list {
        let s = seq.prefix(k);
        let c = carleson_infimum(&s);
        let ratio = if k >= 2 {
            Some(single_factor_ratio_constant(&s)?.c_hat)
        } else {
            None
        };
        let tail_n = select_iteration_order(&s, cfg.tol);
        let b = frame_bounds(
            &frame_operator_closed_form(&IteratedSystem::new(s, 0)?),
            cfg.tol,
        )?;
        t.push(vec![
            k.into(),
            c.value.into(),
            b.lower.into(),
            b.upper.into(),
            b.condition().into(),
            ratio.into(),
            tail_n.into(),
        ]);
    }
    Ok(t)
}

/// Builds the table for `cfg` without writing it anywhere.
pub fn build_table(cfg: &ExperimentConfig) -> Result<ReportTable, CliError> {
    let seed = cfg.seed;
    let need_seed = || {
        seed.ok_or_else(|| {
            CliError::Config(format!("--seed: required by '{}'", cfg.command.name()))
        })
    };
    let mut table = match cfg.command {
        Command::Tensor => tensor_table(cfg)?,
        cmd => {
            let seq = generate(&cfg.sequence)?;
            match cmd {
                Command::Gen => gen_table(&seq),
                Command::Carleson => carleson_table(cfg, &seq),
                Command::Bounds => bounds_table(cfg, &seq)?,
                Command::Interp => interp_table(cfg, &seq, need_seed()?)?,
                Command::Reconstruct => reconstruct_table(cfg, &seq, need_seed()?)?,
                Command::Report => report_table(cfg, &seq)?,
                Command::Tensor => unreachable!(),
            }
        }
    };
    table.provenance = provenance(cfg);
    Ok(table)
}

/// Runs the experiment and writes its table to `cfg.out` (stdout if unset).
pub fn run(cfg: &ExperimentConfig) -> Result<ReportTable, CliError> {
    let table = build_table(cfg)?;
    emit(&table, cfg.out.as_deref(), cfg.format)?;
    Ok(table)
}
