//! Flat `key = value` run configuration.
//!
//! Keys are the field names of `SearchConfig`, `OptimizerConfig` and
//! `SearchLimits`. Later assignments override earlier ones, so command-line
//! `--set` pairs are simply applied after the file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use qsynth_core::tasks::TaskConfig;

fn parse<V: FromStr>(key: &str, value: &str) -> Result<V>
where
    V::Err: Display,
{
    value.parse().map_err(|e| anyhow!("bad value `{value}` for `{key}`: {e}"))
}

/// Sets one field by name.
pub fn apply(cfg: &mut TaskConfig<f64>, key: &str, value: &str) -> Result<()> {
    let v = value.trim();
    match key.trim() {
        "n_candidates" => cfg.search.n_candidates = parse(key, v)?,
        "max_insert" => cfg.search.max_insert = parse(key, v)?,
        "p_two_qubit" => cfg.search.p_two_qubit = parse(key, v)?,
        "delete_tol_angle" => cfg.search.delete_tol_angle = parse(key, v)?,
        "delete_cost_budget" => cfg.search.delete_cost_budget = parse(key, v)?,
        "reopt_iters" => cfg.search.reopt_iters = parse(key, v)?,
        "lambda0" => cfg.optimizer.lambda0 = parse(key, v)?,
        "lambda_growth" => cfg.optimizer.lambda_growth = parse(key, v)?,
        "tikhonov" => cfg.optimizer.tikhonov = parse(key, v)?,
        "delta_conv" => cfg.optimizer.delta_conv = parse(key, v)?,
        "patience" => cfg.optimizer.patience = parse(key, v)?,
        "max_iters" => cfg.optimizer.max_iters = parse(key, v)?,
        "max_rounds" => cfg.limits.max_rounds = parse(key, v)?,
        "cost_floor" => cfg.limits.cost_floor = parse(key, v)?,
        "round_patience" => cfg.limits.round_patience = parse(key, v)?,
        "seed" => bail!("`seed` is set with --seed or --trial-seed, not in the config"),
        other => bail!("unknown config key `{other}`"),
    }
    Ok(())
}

/// Applies every assignment in `text`; `#` starts a comment.
pub fn apply_text(cfg: &mut TaskConfig<f64>, text: &str) -> Result<()> {
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", no + 1))?;
        apply(cfg, k, v).with_context(|| format!("line {}", no + 1))?;
    }
    Ok(())
}

/// Applies a `key=value` override.
pub fn apply_override(cfg: &mut TaskConfig<f64>, pair: &str) -> Result<()> {
    let (k, v) = pair.split_once('=').ok_or_else(|| anyhow!("override `{pair}` is not key=value"))?;
    apply(cfg, k, v)
}

/// Every tunable field, as it would be written to a config file.
pub fn snapshot(cfg: &TaskConfig<f64>) -> BTreeMap<String, String> {
    let s = &cfg.search;
    let o = &cfg.optimizer;
    let l = &cfg.limits;
    [
        ("n_candidates", s.n_candidates.to_string()),
        ("max_insert", s.max_insert.to_string()),
        ("p_two_qubit", s.p_two_qubit.to_string()),
        ("delete_tol_angle", s.delete_tol_angle.to_string()),
        ("delete_cost_budget", s.delete_cost_budget.to_string()),
        ("reopt_iters", s.reopt_iters.to_string()),
        ("lambda0", o.lambda0.to_string()),
        ("lambda_growth", o.lambda_growth.to_string()),
        ("tikhonov", o.tikhonov.to_string()),
        ("delta_conv", o.delta_conv.to_string()),
        ("patience", o.patience.to_string()),
        ("max_iters", o.max_iters.to_string()),
        ("max_rounds", l.max_rounds.to_string()),
        ("cost_floor", l.cost_floor.to_string()),
        ("round_patience", l.round_patience.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Inverse of [`snapshot`].
pub fn to_text(cfg: &TaskConfig<f64>) -> String {
    snapshot(cfg).iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
