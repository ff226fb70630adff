use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use hill_spectra::asymptotics::{
    default_order_window, membership_diagnostic, mo_equivalence_report, remainders,
    MembershipDiagnostic, MoOptions, ReportDocument, Verdicts,
};
use hill_spectra::io::{write_weight_csv, PotentialSpec, WeightSpec};
use hill_spectra::seq_spaces::{convolution_bound_ratio, ProbeFamily};
use hill_spectra::spectral::{kronig_penney_gaps, BandGap};
use hill_spectra::weights::{check_theorem_conditions, estimate_orders, ConditionCheck};
use hill_spectra::{
    richardson_extrapolate, spectral_endpoints, FourierSequence, OrderEstimate, SpectralResult,
    Weight,
};

use crate::run::{
    config_error, AsymptoticsArgs, ConvLemmaArgs, Failure, FamilyChoice, Format, GapsArgs,
    MoCheckArgs, Output, WeightsArgs,
};

const ORACLE_TOL: f64 = 1e-13;

fn load_potential(path: &Path) -> Result<(PotentialSpec, FourierSequence), Failure> {
    let spec = PotentialSpec::load(path)
        .with_context(|| format!("reading potential spec {}", path.display()))
        .map_err(Failure::Config)?;
    let q = spec.build()?;
    Ok((spec, q))
}

fn load_weight(path: &Path) -> Result<Weight, Failure> {
    WeightSpec::load(path)
        .and_then(|s| s.build())
        .with_context(|| format!("reading weight spec {}", path.display()))
        .map_err(Failure::Config)
}

/// Galerkin sizes for an optionally extrapolated run.
fn size_plan(m: usize, extrapolate: bool, m_list: &Option<Vec<usize>>) -> Option<Vec<usize>> {
    match m_list {
        Some(list) => Some(list.clone()),
        None if extrapolate => Some(vec![m / 4, m / 2, m]),
        None => None,
    }
}

fn solve(
    q: &FourierSequence,
    m: usize,
    n_max: usize,
    plan: &Option<Vec<usize>>,
) -> Result<SpectralResult, Failure> {
    let res = match plan {
        Some(list) => richardson_extrapolate(q, n_max, list)?,
        None => spectral_endpoints(q, m, n_max)?,
    };
    Ok(res.validated()?)
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .context("serializing result")
        .map_err(Failure::Numeric)?;
    text.push('\n');
    Ok(text)
}

fn csv_text<F>(fill: F) -> Result<String, Failure>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>,
{
    let mut buf = Vec::new();
    {
        let mut wtr = csv::Writer::from_writer(&mut buf);
        fill(&mut wtr)
            .and_then(|_| wtr.flush().map_err(csv::Error::from))
            .context("writing CSV")
            .map_err(Failure::Numeric)?;
    }
    String::from_utf8(buf)
        .context("CSV output is not UTF-8")
        .map_err(Failure::Numeric)
}

#[derive(Serialize)]
struct GapsDocument<'a> {
    spectrum: &'a SpectralResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<&'a [BandGap]>,
}

pub fn gaps(args: &GapsArgs) -> Result<Output, Failure> {
    let (spec, q) = load_potential(&args.potential)?;
    let oracle = if args.oracle {
        let alpha = spec
            .is_delta_comb()
            .ok_or_else(|| config_error("--oracle needs a delta_comb potential"))?;
        Some(kronig_penney_gaps(alpha, args.n_max, ORACLE_TOL)?)
    } else {
        None
    };
    let plan = size_plan(args.m, args.extrapolate, &args.m_list);
    let res = solve(&q, args.m, args.n_max, &plan)?;

    let body = match args.out {
        Format::Json => json(&GapsDocument {
            spectrum: &res,
            oracle: oracle.as_deref(),
        })?,
        Format::Csv => csv_text(|w| {
            let mut header = vec!["n", "lambda_minus", "lambda_plus", "gamma"];
            if oracle.is_some() {
                header.extend([
                    "oracle_lambda_minus",
                    "oracle_lambda_plus",
                    "oracle_gamma",
                    "gamma_abs_error",
                ]);
            }
            w.write_record(&header)?;
            for n in 1..=res.n_max() {
                let mut row = vec![
                    n.to_string(),
                    res.minus[n - 1].to_string(),
                    res.plus[n - 1].to_string(),
                    res.gamma[n - 1].to_string(),
                ];
                if let Some(gaps) = &oracle {
                    let g = &gaps[n - 1];
                    row.extend([
                        g.minus.to_string(),
                        g.plus.to_string(),
                        g.gamma.to_string(),
                        (res.gamma[n - 1] - g.gamma).abs().to_string(),
                    ]);
                }
                w.write_record(&row)?;
            }
            Ok(())
        })?,
    };
    Ok(Output {
        format: args.out,
        body,
    })
}

fn parse_window(window: &[usize]) -> Result<(usize, usize), Failure> {
    match window {
        [lo, hi] if *lo >= 1 && lo < hi => Ok((*lo, *hi)),
        _ => Err(config_error(format!(
            "--fit-window must be `lo,hi` with 1 <= lo < hi, got {window:?}"
        ))),
    }
}

pub fn asymptotics(args: &AsymptoticsArgs) -> Result<Output, Failure> {
    let (spec, q) = load_potential(&args.potential)?;
    let window = parse_window(&args.fit_window)?;
    if window.1 > args.n_max {
        return Err(config_error("fit window extends past --n-max"));
    }
    let weight = match &args.weight {
        Some(path) => load_weight(path)?,
        None => Weight::constant(args.n_max)?,
    };
    let plan = size_plan(args.m, args.extrapolate, &args.m_list);
    let res = solve(&q, args.m, args.n_max, &plan)?;
    let s = args.s.or_else(|| spec.sobolev_index());
    let report = remainders(&q, &res, (1, args.n_max))?.with_fits(window, s);

    let q_abs: Vec<f64> = (1..=args.n_max).map(|k| q.coeff(k as i64).norm()).collect();
    let q_diag = membership_diagnostic(&q_abs, &weight, args.n_max)?;
    let gamma_diag = membership_diagnostic(&res.gamma, &weight, args.n_max)?;
    let doc = ReportDocument::new(&report, &q_diag, &gamma_diag);

    let body = match args.out {
        Format::Json => json(&doc)?,
        Format::Csv => csv_text(|w| {
            w.write_record(["n", "gamma", "q_abs", "remainder", "refined_remainder"])?;
            for (i, n) in (report.n_range.0..=report.n_range.1).enumerate() {
                w.write_record([
                    n.to_string(),
                    res.gamma[n - 1].to_string(),
                    q_abs[n - 1].to_string(),
                    report.remainder[i].to_string(),
                    report.refined_remainder[i].to_string(),
                ])?;
            }
            Ok(())
        })?,
    };
    Ok(Output {
        format: args.out,
        body,
    })
}

#[derive(Serialize)]
struct MoDocument<'a> {
    n_max: usize,
    truncation: usize,
    extrapolated: bool,
    orders: OrderEstimate,
    conditions: &'a ConditionCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<&'a str>,
    verdicts: Verdicts,
    agree: bool,
    q_diagnostic: &'a MembershipDiagnostic,
    gamma_diagnostic: &'a MembershipDiagnostic,
}

pub fn mo_check(args: &MoCheckArgs) -> Result<Output, Failure> {
    let (_, q) = load_potential(&args.potential)?;
    let weight = load_weight(&args.weight)?;
    let orders = match &args.orders {
        None => None,
        Some(v) => match v.as_slice() {
            [mu, rho] => Some(OrderEstimate {
                mu_hat: *mu,
                rho_hat: *rho,
                raw_mu: *mu,
                raw_rho: *rho,
                window: (0, 0),
            }),
            _ => return Err(config_error("--orders must be `mu,rho`")),
        },
    };
    let opts = MoOptions {
        orders,
        extrapolate: size_plan(args.m, args.extrapolate, &args.m_list),
    };
    let report = mo_equivalence_report(&q, &weight, args.m, args.n_max, &opts)?;
    let spectrum = report.spectrum.clone().validated()?;

    let body = match args.out {
        Format::Json => json(&MoDocument {
            n_max: args.n_max,
            truncation: spectrum.truncation,
            extrapolated: spectrum.extrapolated,
            orders: report.orders,
            conditions: &report.conditions,
            warning: report.warning.as_deref(),
            verdicts: Verdicts {
                q: report.q.verdict,
                gamma: report.gamma.verdict,
            },
            agree: report.agree,
            q_diagnostic: &report.q,
            gamma_diagnostic: &report.gamma,
        })?,
        Format::Csv => csv_text(|w| {
            w.write_record(["K", "partial_sum_q", "partial_sum_gamma"])?;
            for (i, k) in report.q.grid.iter().enumerate() {
                w.write_record([
                    k.to_string(),
                    report.q.partial_sums[i].to_string(),
                    report.gamma.partial_sums[i].to_string(),
                ])?;
            }
            Ok(())
        })?,
    };
    Ok(Output {
        format: args.out,
        body,
    })
}

#[derive(Serialize)]
struct WeightDocument<'a> {
    label: &'a str,
    #[serde(rename = "K")]
    len: usize,
    orders: OrderEstimate,
    conditions: ConditionCheck,
}

pub fn weights(args: &WeightsArgs) -> Result<Output, Failure> {
    let w = load_weight(&args.weight)?;
    let body = match args.out {
        Format::Csv => {
            let mut buf = Vec::new();
            write_weight_csv(&w, &mut buf)?;
            String::from_utf8(buf)
                .context("CSV output is not UTF-8")
                .map_err(Failure::Numeric)?
        }
        Format::Json => {
            let window = if args.k_min >= 2 && args.k_min < w.len() {
                (args.k_min, w.len())
            } else {
                default_order_window(w.len())?
            };
            let orders = estimate_orders(&w, window)?;
            let conditions = check_theorem_conditions(orders.mu_hat, orders.rho_hat)?;
            json(&WeightDocument {
                label: w.label(),
                len: w.len(),
                orders,
                conditions,
            })?
        }
    };
    Ok(Output {
        format: args.out,
        body,
    })
}

#[derive(Serialize)]
struct ConvDocument<'a> {
    s: f64,
    r: f64,
    t: f64,
    family: ProbeFamily,
    sizes: &'a [usize],
    ratios: &'a [f64],
}

pub fn conv_lemma(args: &ConvLemmaArgs) -> Result<Output, Failure> {
    let family = match args.family {
        FamilyChoice::Auto => ProbeFamily::for_regime(args.s, args.r, args.t),
        FamilyChoice::Damped => ProbeFamily::Damped,
        FamilyChoice::Witness => ProbeFamily::Witness,
    };
    let ratios = convolution_bound_ratio(args.s, args.r, args.t, &args.sizes, family)?;
    let body = match args.out {
        Format::Csv => csv_text(|w| {
            w.write_record(["N", "ratio"])?;
            for (n, r) in args.sizes.iter().zip(&ratios) {
                w.write_record([n.to_string(), r.to_string()])?;
            }
            Ok(())
        })?,
        Format::Json => json(&ConvDocument {
            s: args.s,
            r: args.r,
            t: args.t,
            family,
            sizes: &args.sizes,
            ratios: &ratios,
        })?,
    };
    Ok(Output {
        format: args.out,
        body,
    })
}
