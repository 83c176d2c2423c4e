use std::collections::HashMap;
use std::path::Path;

use rls_refine::data::{
    downsample, extract_segments, gen_synthetic, parse_ngsim_csv, read_jsonl, split_dataset, write_jsonl, Dataset,
    Protocol, NGSIM_DT,
};
use rls_refine::eval::{metrics_csv_header, metrics_csv_row, rmse_paths, run_ablation};
use rls_refine::goal::{fit_goal_model, GoalFitConfig, InterpConfig};
use rls_refine::rollout::{
    fit_predictor, rollout_refined, rollout_vanilla, ArSolver, BackboneKind, PredictorFitConfig, RefineConfig,
};

use crate::config::{Feedback, FileConfig, List, SolverName, Switch};
use crate::files::{read_predictions, write_predictions, ModelFile, Prediction, MODEL_VERSION};
use crate::{AblateArgs, CliError, EvalArgs, FitArgs, GenSynthArgs, IngestArgs, ModelArgs, PredictArgs, ProtocolArgs, RefineArgs};

const NGSIM_DOWNSAMPLE: usize = 2;

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Dataset, CliError> {
    Ok(read_jsonl(path)?)
}

/// Flags/config entries for dt, tau and horizon, checked against `data`.
fn check_protocol(cfg: &FileConfig, args: &ProtocolArgs, data: Option<Protocol>, what: &str) -> Result<(), CliError> {
    let Some(data) = data else { return Ok(()) };
    let dt: Option<f64> = cfg.resolve_opt("dt", args.dt)?;
    let tau: Option<usize> = cfg.resolve_opt("tau", args.tau)?;
    let horizon: Option<usize> = cfg.resolve_opt("horizon", args.horizon)?;
    let wanted = Protocol {
        dt: dt.unwrap_or(data.dt),
        tau: tau.unwrap_or(data.tau),
        horizon: horizon.unwrap_or(data.horizon),
    };
    if !wanted.matches(&data) {
        return Err(CliError::Invalid(format!(
            "protocol mismatch: {what} has dt={} tau={} horizon={}, configured dt={} tau={} horizon={}",
            data.dt, data.tau, data.horizon, wanted.dt, wanted.tau, wanted.horizon
        )));
    }
    Ok(())
}

fn fit_configs(cfg: &FileConfig, a: &ModelArgs) -> Result<(PredictorFitConfig, GoalFitConfig), CliError> {
    let defaults = PredictorFitConfig::default();
    let goal_defaults = GoalFitConfig::default();
    let ridge = cfg.resolve("ridge", a.ridge, defaults.ridge_lambda)?;
    let solver = match cfg.resolve("solver", a.solver, SolverName::Batch)? {
        SolverName::Batch => ArSolver::Batch,
        SolverName::Rls => ArSolver::Rls {
            forgetting: cfg.resolve("forgetting", a.forgetting, 1.0)?,
        },
    };
    let predictor = PredictorFitConfig {
        window: cfg.resolve_opt("window", a.window)?,
        lag: cfg.resolve("lag", a.lag, defaults.lag)?,
        ridge_lambda: ridge,
        solver,
    };
    let goal = GoalFitConfig {
        anchor_steps: cfg.resolve("anchors", a.anchors.clone(), List(goal_defaults.anchor_steps))?.0,
        ridge_lambda: ridge,
        rotate: cfg.resolve("rotate", a.rotate, Switch(goal_defaults.rotate))?.0,
    };
    Ok((predictor, goal))
}

fn refine_config(cfg: &FileConfig, a: &RefineArgs, enabled: bool) -> Result<RefineConfig, CliError> {
    let d = RefineConfig::default();
    let rc = RefineConfig {
        refine_enabled: enabled,
        interp: InterpConfig {
            epsilon: cfg.resolve("eps", a.eps, d.interp.epsilon)?,
            beta: cfg.resolve("beta", a.beta, d.interp.beta)?,
        },
        feedback: cfg.resolve("feedback", a.feedback, Feedback(d.feedback))?.0,
        goal_cov_scale: cfg.resolve("goal_cov_scale", a.goal_cov_scale, d.goal_cov_scale)?,
    };
    rc.validate()?;
    Ok(rc)
}

fn fmt_list(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" ")
}

pub fn gen_synth(cfg: &FileConfig, a: GenSynthArgs) -> Result<(), CliError> {
    let scenario = cfg
        .resolve_opt("scenario", a.scenario)?
        .ok_or_else(|| CliError::Invalid("--scenario is required (cv, ca, lane-change, turn)".into()))?;
    let n = cfg.resolve("n", a.n, 1000)?;
    let noise = cfg.resolve("noise", a.noise, 0.0)?;
    let seed = cfg.resolve("seed", a.seed, 0)?;
    let ds = gen_synthetic(scenario, n, noise, seed)?;
    write_jsonl(&ds, &a.out)?;
    println!("wrote {} {} segments to {}", ds.len(), scenario.name(), a.out.display());
    Ok(())
}

pub fn ingest_ngsim(cfg: &FileConfig, a: IngestArgs) -> Result<(), CliError> {
    let stride = cfg.resolve("stride", a.stride, 10)?;
    let tau = cfg.resolve("tau", a.protocol.tau, Protocol::DEFAULT.tau)?;
    let horizon = cfg.resolve("horizon", a.protocol.horizon, Protocol::DEFAULT.horizon)?;
    let dt_out = NGSIM_DT * NGSIM_DOWNSAMPLE as f64;
    if let Some(dt) = cfg.resolve_opt::<f64>("dt", a.protocol.dt)? {
        if (dt - dt_out).abs() > 1e-9 {
            return Err(CliError::Invalid(format!(
                "NGSIM ingestion produces dt = {dt_out} s, configured dt = {dt}"
            )));
        }
    }

    let tracks = parse_ngsim_csv(&a.input)?;
    let down: Vec<_> = tracks.iter().map(|t| downsample(t, NGSIM_DOWNSAMPLE)).collect();
    let mut ds = extract_segments(&down, tau, horizon, stride);
    ds.source = a.input.display().to_string();
    write_jsonl(&ds, &a.out)?;
    println!(
        "{} tracks, {} segments ({} vehicles) written to {}",
        tracks.len(),
        ds.len(),
        ds.vehicle_ids().len(),
        a.out.display()
    );

    if let Some(dir) = a.split_dir {
        let ratios = cfg.resolve("split", a.split, List(vec![0.7, 0.1, 0.2]))?.0;
        let [train, val, test] = ratios[..] else {
            return Err(CliError::Invalid(format!(
                "--split needs three ratios, got {}",
                ratios.len()
            )));
        };
        let seed = cfg.resolve("seed", a.seed, 0)?;
        let (tr, va, te) = split_dataset(&ds, (train, val, test), seed)?;
        for (name, part) in [("train", &tr), ("val", &va), ("test", &te)] {
            let path = dir.join(format!("{name}.jsonl"));
            write_jsonl(part, &path)?;
            println!("{name}: {} segments, {} vehicles -> {}", part.len(), part.vehicle_ids().len(), path.display());
        }
    }
    Ok(())
}

pub fn fit(cfg: &FileConfig, a: FitArgs) -> Result<(), CliError> {
    let train = load(&a.train)?;
    let val = match &a.val {
        Some(p) => load(p)?,
        None => Dataset::default(),
    };
    let protocol = train
        .protocol()?
        .ok_or_else(|| CliError::Invalid(format!("{}: training set is empty", a.train.display())))?;
    check_protocol(cfg, &a.protocol, Some(protocol), "training data")?;
    check_protocol(cfg, &a.protocol, val.protocol()?, "validation data")?;

    let kind = cfg.resolve("predictor", a.predictor, BackboneKind::Ar)?;
    let (pcfg, gcfg) = fit_configs(cfg, &a.model)?;
    let predictor = fit_predictor(kind, &train, &val, &pcfg)?;
    let goal_model = fit_goal_model(&train, &val, &gcfg)?;

    let seconds = protocol.second_steps();
    println!(
        "fit {kind} on {} segments ({} validation)",
        train.len(),
        val.len()
    );
    println!(
        "  step covariance trace at {:?}: {}",
        seconds,
        fmt_list(seconds.iter().map(|&k| predictor.step_covs[k - 1].trace()))
    );
    println!(
        "  goal residual trace at {:?}: {}",
        goal_model.anchor_steps(),
        fmt_list(goal_model.anchors.iter().map(|m| m.residual_cov.trace()))
    );

    let model = ModelFile {
        predictor,
        goal_model,
        protocol,
        version: MODEL_VERSION,
    };
    model.write(&a.out)?;
    println!("model written to {}", a.out.display());
    Ok(())
}

pub fn predict(cfg: &FileConfig, a: PredictArgs) -> Result<(), CliError> {
    let model = ModelFile::read(&a.model)?;
    let data = load(&a.data)?;
    if let Some(p) = data.protocol()? {
        if !p.matches(&model.protocol) {
            return Err(CliError::Invalid(format!(
                "protocol mismatch: model dt={} tau={} horizon={}, data dt={} tau={} horizon={}",
                model.protocol.dt, model.protocol.tau, model.protocol.horizon, p.dt, p.tau, p.horizon
            )));
        }
    }
    let refine = cfg.resolve("refine", a.refine, Switch(true))?.0;
    let rc = refine_config(cfg, &a.refine_cfg, refine)?;
    let horizon = model.protocol.horizon;
    let backbone = model.predictor.backbone.name();

    let preds = data
        .segments
        .iter()
        .map(|s| {
            let est = if refine {
                rollout_refined(&model.predictor, &model.goal_model, &s.history, horizon, &rc)?
            } else {
                rollout_vanilla(&model.predictor, &s.history, horizon)?
            };
            Prediction::from_estimates(&s.segment_id, backbone, refine, &est)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    write_predictions(&a.out, &preds)?;
    println!(
        "{} {} predictions written to {}",
        preds.len(),
        if refine { "refined" } else { "vanilla" },
        a.out.display()
    );
    Ok(())
}

pub fn eval(_cfg: &FileConfig, a: EvalArgs) -> Result<(), CliError> {
    let preds = read_predictions(&a.predictions)?;
    let data = load(&a.data)?;
    let protocol = data
        .protocol()?
        .ok_or_else(|| CliError::Invalid(format!("{}: ground truth is empty", a.data.display())))?;

    let mut by_id: HashMap<&str, &Prediction> = HashMap::with_capacity(preds.len());
    for p in &preds {
        if by_id.insert(p.segment_id.as_str(), p).is_some() {
            return Err(CliError::Invalid(format!("duplicate prediction for segment {}", p.segment_id)));
        }
    }
    if preds.len() != data.len() {
        return Err(CliError::Invalid(format!(
            "shape mismatch: {} predictions for {} ground-truth segments",
            preds.len(),
            data.len()
        )));
    }
    let mut paths = Vec::with_capacity(data.len());
    let mut truth = Vec::with_capacity(data.len());
    for s in &data.segments {
        let p = by_id
            .get(s.segment_id.as_str())
            .ok_or_else(|| CliError::Invalid(format!("no prediction for segment {}", s.segment_id)))?;
        paths.push(p.mean_path());
        truth.push(s.future.as_slice());
    }
    let first = &preds[0];
    if preds.iter().any(|p| p.backbone != first.backbone || p.mode != first.mode) {
        return Err(CliError::Invalid("predictions mix backbones or modes".into()));
    }
    let metrics = rmse_paths(&paths, &truth, protocol.dt)?;
    let csv = format!(
        "{}\n{}\n",
        metrics_csv_header(metrics.rmse_at_seconds.len()),
        metrics_csv_row(&first.backbone, first.mode == "refined", &metrics)
    );
    write_text(a.out.as_deref(), &csv)
}

pub fn ablate(cfg: &FileConfig, a: AblateArgs) -> Result<(), CliError> {
    let train = load(&a.train)?;
    let val = match &a.val {
        Some(p) => load(p)?,
        None => Dataset::default(),
    };
    let test = load(&a.test)?;
    let kinds = cfg
        .resolve(
            "predictors",
            a.predictors.clone(),
            List(vec![BackboneKind::Cv, BackboneKind::Ca, BackboneKind::Ar]),
        )?
        .0;
    let (pcfg, gcfg) = fit_configs(cfg, &a.model)?;
    let rc = refine_config(cfg, &a.refine_cfg, true)?;

    let goal_model = fit_goal_model(&train, &val, &gcfg)?;
    let models = kinds
        .iter()
        .map(|&k| Ok((k.to_string(), fit_predictor(k, &train, &val, &pcfg)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let report = run_ablation(&test, &models, &goal_model, &rc)?;
    write_text(a.out.as_deref(), &report.to_csv())?;
    if let Some(out) = &a.out {
        for (name, _) in &models {
            if let Some(d) = report.deltas(name) {
                println!("{name}: vanilla − refined RMSE per second {}", fmt_list(d));
            }
        }
        println!("report written to {}", out.display());
    }
    Ok(())
}
