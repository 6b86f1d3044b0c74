//! Subcommand implementations.

use crate::csvio::{fmt_f64, read_pairs_csv, write_pairs_csv, write_table};
use crate::manifest::RunManifest;
use crate::{FamilyArgs, Fig2Args, FitArgs, ModelArg, QuantilesArgs, SimulateArgs, TheoryArgs, VerifyArgs, WhatArg};
use invmax::exponent::FamilySpec;
use invmax::fit::{self, ConditionalModelKind};
use invmax::norming;
use invmax::simulate;
use invmax::{Error, ExponentFamily, ImsDistribution, RandomStream, Result};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::Path;

/// A family parameter value from the command line: scalar, or a sweep
/// `lo..hi[:count]` (log-spaced when lo > 0), accepted by `theory` only.
enum ParamValue {
    Scalar(f64),
    Sweep { lo: f64, hi: f64, count: usize },
}

fn parse_param(name: &str, raw: &str) -> Result<ParamValue> {
    if let Some((range, count)) = raw
        .split_once("..")
        .map(|(lo, rest)| match rest.split_once(':') {
            Some((hi, n)) => ((lo, hi), Some(n)),
            None => ((lo, rest), None),
        })
    {
        let lo: f64 = range.0.parse().map_err(|_| Error::Domain(format!("bad sweep start for --{name}: '{}'", range.0)))?;
        let hi: f64 = range.1.parse().map_err(|_| Error::Domain(format!("bad sweep end for --{name}: '{}'", range.1)))?;
        let count: usize = match count {
            Some(n) => n.parse().map_err(|_| Error::Domain(format!("bad sweep count for --{name}: '{n}'")))?,
            None => 12,
        };
        if count < 2 || !(lo < hi) {
            return Err(Error::Domain(format!("sweep for --{name} needs lo < hi and count >= 2")));
        }
        Ok(ParamValue::Sweep { lo, hi, count })
    } else {
        Ok(ParamValue::Scalar(raw.parse().map_err(|_| {
            Error::Domain(format!("parameter --{name} is not a number: '{raw}'"))
        })?))
    }
}

fn collect_params(args: &FamilyArgs) -> Result<Vec<(String, ParamValue)>> {
    let mut out = Vec::new();
    let mut push = |name: &str, v: &Option<String>| -> Result<()> {
        if let Some(raw) = v {
            out.push((name.to_string(), parse_param(name, raw)?));
        }
        Ok(())
    };
    push("lambda", &args.lambda)?;
    push("rho", &args.rho)?;
    push("nu", &args.nu)?;
    push("theta", &args.theta)?;
    push("phi", &args.phi)?;
    push("alpha", &args.alpha)?;
    push("r", &args.r)?;
    push("gamma", &args.gamma)?;
    push("kappa", &args.kappa)?;
    push("delta", &args.delta)?;
    Ok(out)
}

fn family_scalar(args: &FamilyArgs) -> Result<ExponentFamily> {
    let mut params = BTreeMap::new();
    for (name, v) in collect_params(args)? {
        match v {
            ParamValue::Scalar(x) => {
                params.insert(name, x);
            }
            ParamValue::Sweep { .. } => {
                return Err(Error::Domain(format!("--{name}: sweeps are only accepted by `theory`")));
            }
        }
    }
    FamilySpec { family_id: args.family.clone(), params }.build()
}

impl From<ModelArg> for ConditionalModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Canonical => ConditionalModelKind::Canonical,
            ModelArg::Smith => ConditionalModelKind::SmithNorming,
            ModelArg::Gamma => ConditionalModelKind::GammaNorming,
        }
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    if args.n == 0 {
        return Err(Error::Domain("sample size --n must be at least 1".into()));
    }
    let fam = family_scalar(&args.family)?;
    let set = simulate::sample(&fam, args.n, RandomStream::new(args.seed, args.stream))?;
    let body = write_pairs_csv(&args.out, &set.pairs)
        .map_err(|e| Error::Data(format!("cannot write {}: {e}", args.out.display())))?;
    let mut man = RunManifest::new("simulate");
    man.family = Some(fam.to_spec());
    man.seed = Some(args.seed);
    man.settings = json!({ "n": args.n, "stream_index": args.stream });
    man.record_output(&args.out, &body);
    man.write_alongside(&args.out)
        .map_err(|e| Error::Data(format!("cannot write manifest: {e}")))?;
    Ok(())
}

fn fit_output_json(f: &fit::ConditionalFit) -> serde_json::Value {
    let mut sorted = f.residuals.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let rq: BTreeMap<String, f64> = [0.025, 0.25, 0.5, 0.75, 0.975]
        .iter()
        .map(|&p| (format!("{p}"), fit::type7_quantile(&sorted, p)))
        .collect();
    json!({
        "model": f.kind.name(),
        "estimates": f.estimates,
        "stderr": null,
        "nll": f.nll,
        "converged": f.converged,
        "threshold": f.threshold_u,
        "n_exceed": f.n_exceed,
        "residual_quantiles": rq,
    })
}

pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let pairs = read_pairs_csv(&args.input)?;
    let kind: ConditionalModelKind = args.model.into();
    let fitted = fit::fit_pairs(&pairs, kind, args.threshold_quantile, args.empirical_threshold)?;
    let body = serde_json::to_string_pretty(&fit_output_json(&fitted)).expect("fit json");
    std::fs::write(&args.out, &body)
        .map_err(|e| Error::Data(format!("cannot write {}: {e}", args.out.display())))?;
    let mut man = RunManifest::new("fit");
    man.threshold_quantile = Some(args.threshold_quantile);
    man.settings = json!({
        "model": kind.name(),
        "empirical_threshold": args.empirical_threshold,
        "residual_quantile_convention": "type7",
        "input": args.input.display().to_string(),
    });
    man.record_output(&args.out, &body);
    if let Some(res_path) = &args.residuals {
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).filter(|&x| x > fitted.threshold_u).collect();
        let rows: Vec<Vec<String>> = xs
            .iter()
            .zip(&fitted.residuals)
            .map(|(x, z)| vec![fmt_f64(*x), fmt_f64(*z)])
            .collect();
        let body = write_table(res_path, &["x", "z"], &rows)
            .map_err(|e| Error::Data(format!("cannot write {}: {e}", res_path.display())))?;
        man.record_output(res_path, &body);
    }
    man.write_alongside(&args.out)
        .map_err(|e| Error::Data(format!("cannot write manifest: {e}")))?;
    if !fitted.converged {
        eprintln!("warning: optimizer did not converge; see converged=false in {}", args.out.display());
    }
    Ok(())
}

pub fn cmd_quantiles(args: &QuantilesArgs) -> Result<()> {
    let pairs = read_pairs_csv(&args.input)?;
    let kind: ConditionalModelKind = args.model.into();
    let fitted = fit::fit_pairs(&pairs, kind, args.threshold_quantile, args.empirical_threshold)?;
    let probs: Vec<f64> = parse_probs(&args.probs)?;
    let x_hi = args
        .x_max
        .unwrap_or_else(|| pairs.iter().map(|p| p.0).fold(0.0, f64::max));
    if !(x_hi > fitted.threshold_u) {
        return Err(Error::Domain(format!(
            "x grid top {x_hi} must exceed the threshold {}",
            fitted.threshold_u
        )));
    }
    let grid: Vec<f64> = (0..args.x_points)
        .map(|i| fitted.threshold_u + (x_hi - fitted.threshold_u) * (i + 1) as f64 / args.x_points as f64)
        .collect();
    let curves = fit::quantile_curves(&fitted, &probs, &grid)?;
    let mut rows = Vec::new();
    for c in &curves {
        for (x, q) in c.x_grid.iter().zip(&c.values) {
            rows.push(vec![fmt_f64(c.prob), fmt_f64(*x), fmt_f64(*q)]);
        }
    }
    let body = write_table(&args.out, &["p", "x", "q"], &rows)
        .map_err(|e| Error::Data(format!("cannot write {}: {e}", args.out.display())))?;
    let mut man = RunManifest::new("quantiles");
    man.threshold_quantile = Some(args.threshold_quantile);
    man.settings = json!({
        "model": kind.name(),
        "probs": probs,
        "residual_quantile_convention": "type7",
        "input": args.input.display().to_string(),
    });
    man.record_output(&args.out, &body);

    let fam = family_scalar(&args.family)?;
    man.family = Some(fam.to_spec());
    let d = ImsDistribution::new(fam);
    let mut rows = Vec::new();
    for &p in &probs {
        for &x in &grid {
            rows.push(vec![fmt_f64(p), fmt_f64(x), fmt_f64(d.conditional_quantile_exact(p, x)?)]);
        }
    }
    let theory_path = theory_sibling(&args.out);
    let body = write_table(&theory_path, &["p", "x", "q"], &rows)
        .map_err(|e| Error::Data(format!("cannot write {}: {e}", theory_path.display())))?;
    man.record_output(&theory_path, &body);
    man.write_alongside(&args.out)
        .map_err(|e| Error::Data(format!("cannot write manifest: {e}")))?;
    Ok(())
}

fn theory_sibling(out: &Path) -> std::path::PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    let ext = out.extension().map(|e| e.to_string_lossy().to_string()).unwrap_or_else(|| "csv".into());
    out.with_file_name(format!("{stem}_theory.{ext}"))
}

fn parse_probs(raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("bad probability '{s}'")))
                .and_then(|p| {
                    if p > 0.0 && p < 1.0 {
                        Ok(p)
                    } else {
                        Err(Error::Domain(format!("probability {p} outside (0,1)")))
                    }
                })
        })
        .collect()
}

pub fn cmd_theory(args: &TheoryArgs) -> Result<()> {
    let params = collect_params(&args.family)?;
    let mut sweep_param: Option<(String, Vec<f64>)> = None;
    let mut fixed = BTreeMap::new();
    for (name, v) in params {
        match v {
            ParamValue::Scalar(x) => {
                fixed.insert(name, x);
            }
            ParamValue::Sweep { lo, hi, count } => {
                if sweep_param.is_some() {
                    return Err(Error::Domain("at most one parameter may be a sweep".into()));
                }
                let values = if lo > 0.0 {
                    // log-spaced
                    (0..count)
                        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp())
                        .collect()
                } else {
                    (0..count)
                        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                        .collect()
                };
                sweep_param = Some((name, values));
            }
        }
    }
    let sweeps: Vec<BTreeMap<String, f64>> = match sweep_param {
        Some((name, values)) => values
            .into_iter()
            .map(|v| {
                let mut m = fixed.clone();
                m.insert(name.clone(), v);
                m
            })
            .collect(),
        None => vec![fixed],
    };

    // x grid with the level markers p1, p2, p3 inserted
    let markers = [(0.95f64, -(0.05f64.ln())), (1.0 - 1e-7, -(1e-7f64.ln())), (1.0 - 1e-13, -(1e-13f64.ln()))];
    let mut grid: Vec<(f64, Option<f64>)> = (0..args.x_points)
        .map(|i| (args.x_from + (args.x_to - args.x_from) * i as f64 / (args.x_points - 1) as f64, None))
        .collect();
    for (p, x) in markers {
        if x >= args.x_from && x <= args.x_to {
            grid.push((x, Some(p)));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut param_names: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    for params in &sweeps {
        let fam = FamilySpec { family_id: args.family.family.clone(), params: params.clone() }.build()?;
        if param_names.is_empty() {
            param_names = fam.params().keys().cloned().collect();
        }
        match args.what {
            WhatArg::Norming => {
                let np = norming::norming_for(&fam)?;
                for &(x, marker) in &grid {
                    let mut row: Vec<String> =
                        param_names.iter().map(|k| fmt_f64(fam.params()[k])).collect();
                    row.push(fmt_f64(x));
                    row.push(fmt_f64(np.a(x)));
                    row.push(fmt_f64(np.b(x)));
                    row.push(marker.map(|p| p.to_string()).unwrap_or_default());
                    rows.push(row);
                }
            }
            WhatArg::Limit => {
                let law = norming::limit_law_for(&fam)?;
                let z_lo = law.quantile(0.001)?;
                let z_hi = law.quantile(0.999)?;
                for i in 0..args.z_points {
                    let z = z_lo + (z_hi - z_lo) * i as f64 / (args.z_points - 1) as f64;
                    let mut row: Vec<String> =
                        param_names.iter().map(|k| fmt_f64(fam.params()[k])).collect();
                    row.push(fmt_f64(z));
                    row.push(fmt_f64(law.cdf(z)));
                    rows.push(row);
                }
            }
        }
    }
    let mut header: Vec<&str> = param_names.iter().map(String::as_str).collect();
    match args.what {
        WhatArg::Norming => header.extend(["x", "a", "b", "p_marker"]),
        WhatArg::Limit => header.extend(["z", "G"]),
    }
    let body = write_table(&args.out, &header, &rows)
        .map_err(|e| Error::Data(format!("cannot write {}: {e}", args.out.display())))?;
    let mut man = RunManifest::new("theory");
    man.settings = json!({
        "family": args.family.family,
        "what": match args.what { WhatArg::Norming => "norming", WhatArg::Limit => "limit" },
        "x_from": args.x_from, "x_to": args.x_to, "x_points": args.x_points,
    });
    man.record_output(&args.out, &body);
    man.write_alongside(&args.out)
        .map_err(|e| Error::Data(format!("cannot write manifest: {e}")))?;
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let reports = match args.suite.as_str() {
        "all" => invmax::verify::run_all()?,
        "moment" => vec![invmax::verify::suite_moment()?],
        "eta" => vec![invmax::verify::suite_eta()?],
        "endpoint-limit" => vec![invmax::verify::suite_endpoint_limit()?],
        "convergence" => vec![invmax::verify::suite_convergence()?],
        "variation" => vec![invmax::verify::suite_variation()?],
        other => return Err(Error::Domain(format!("unknown suite '{other}'"))),
    };
    let pass = reports.iter().all(|r| r.pass);
    let body = serde_json::to_string_pretty(&json!({ "pass": pass, "suites": reports }))
        .expect("report serializes");
    match &args.out {
        Some(path) => {
            std::fs::write(path, &body)
                .map_err(|e| Error::Data(format!("cannot write {}: {e}", path.display())))?;
            let mut man = RunManifest::new("verify");
            man.settings = json!({ "suite": args.suite });
            man.record_output(path, &body);
            man.write_alongside(path)
                .map_err(|e| Error::Data(format!("cannot write manifest: {e}")))?;
        }
        None => println!("{body}"),
    }
    for r in &reports {
        for c in &r.checks {
            eprintln!("[{}] {} {}", r.suite, if c.pass { "pass" } else { "FAIL" }, c.name);
        }
    }
    Ok(pass)
}

pub fn cmd_fig2(args: &Fig2Args) -> Result<()> {
    if args.reps == 0 || args.n == 0 {
        return Err(Error::Domain("--reps and --n must be at least 1".into()));
    }
    let fam = ExponentFamily::smith(args.lambda)?;
    let d = ImsDistribution::new(fam.clone());
    let u = -(1.0 - args.threshold).ln();
    let probs = [0.025, 0.5, 0.975];
    let grid: Vec<f64> = (0..args.x_points)
        .map(|i| u + 0.05 + (args.x_max - u - 0.05) * i as f64 / (args.x_points - 1) as f64)
        .collect();

    let kinds = [ConditionalModelKind::Canonical, ConditionalModelKind::SmithNorming];
    let mut acc = vec![vec![vec![0.0f64; grid.len()]; probs.len()]; kinds.len()];
    for rep in 0..args.reps {
        let set = simulate::sample(&fam, args.n, RandomStream::new(args.seed, rep as u64))?;
        for (ki, &kind) in kinds.iter().enumerate() {
            let fitted = fit::fit_pairs(&set.pairs, kind, args.threshold, false)?;
            let curves = fit::quantile_curves(&fitted, &probs, &grid)?;
            for (pi, c) in curves.iter().enumerate() {
                for (gi, v) in c.values.iter().enumerate() {
                    acc[ki][pi][gi] += v;
                }
            }
        }
    }
    let mut rows = Vec::new();
    for (ki, kind) in kinds.iter().enumerate() {
        let name = match kind {
            ConditionalModelKind::Canonical => "canonical",
            ConditionalModelKind::SmithNorming => "smithnorm",
            ConditionalModelKind::GammaNorming => unreachable!(),
        };
        for (pi, &p) in probs.iter().enumerate() {
            for (gi, &x) in grid.iter().enumerate() {
                rows.push(vec![
                    name.to_string(),
                    fmt_f64(p),
                    fmt_f64(x),
                    fmt_f64(acc[ki][pi][gi] / args.reps as f64),
                ]);
            }
        }
    }
    for &p in &probs {
        for &x in &grid {
            rows.push(vec![
                "theory".to_string(),
                fmt_f64(p),
                fmt_f64(x),
                fmt_f64(d.conditional_quantile_exact(p, x)?),
            ]);
        }
    }
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::Data(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let out = args.out_dir.join(format!("fig2_curves_lambda{}.csv", args.lambda));
    let body = write_table(&out, &["model", "p", "x", "q"], &rows)
        .map_err(|e| Error::Data(format!("cannot write {}: {e}", out.display())))?;
    let mut man = RunManifest::new("fig2");
    man.family = Some(fam.to_spec());
    man.seed = Some(args.seed);
    man.threshold_quantile = Some(args.threshold);
    man.settings = json!({
        "reps": args.reps, "n": args.n,
        "probs": probs, "x_max": args.x_max, "x_points": args.x_points,
        "residual_quantile_convention": "type7",
    });
    man.record_output(&out, &body);
    man.write_alongside(&out)
        .map_err(|e| Error::Data(format!("cannot write manifest: {e}")))?;
    Ok(())
}
