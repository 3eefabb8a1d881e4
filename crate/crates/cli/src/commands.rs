use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use zscale::cutproject::{generate_model_set, CutProjectScheme, Window};
use zscale::numbertheory::{log_spaced, r_diagnostic, sieve};
use zscale::numeric::fmt_real;
use zscale::renorm::{cocycle_spectrum, exponent_report, ExponentReport};
use zscale::riesz::{BoundReport, TmFourierSeries};
use zscale::scaling::{
    catalogue_report, fit_log_quadratic, fit_power, scan, AnalyticProducer, GtmProducer, PurePointProducer, ScanResult,
    TmFourierProducer, ZProducer,
};
use zscale::stochastic::{empirical_z_curve, sample, z_analytic, Support, WeightedRealisation};
use zscale::substitution::patch_for_radius;
use zscale::{FieldNumber, QuadraticOrder};

use crate::config::{Command, FitArgs, FitModel, Format, GenerateArgs, LyapunovArgs, McArgs, RunConfig, TmBoundsArgs, ZscanArgs};
use crate::error::CliError;
use crate::systems::{System, EXTRA_SYSTEMS};
use crate::OUT_DIR_ENV;

type CsvResult = Result<(), csv::Error>;

/// Rendered output plus the file stem used when writing into the output directory.
struct Artifact {
    stem: String,
    bytes: Vec<u8>,
}

fn render<T: Serialize>(
    format: Format,
    stem: impl Into<String>,
    value: &T,
    csv: impl FnOnce(&mut Vec<u8>) -> CsvResult,
) -> Result<Artifact, CliError> {
    let bytes = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("output serialises");
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut buf = Vec::new();
            csv(&mut buf)?;
            buf
        }
    };
    Ok(Artifact { stem: stem.into(), bytes })
}

fn destination(config: &RunConfig, stem: &str) -> Option<PathBuf> {
    config.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|dir| Path::new(&dir).join(format!("{stem}.{}", config.format.extension())))
    })
}

pub fn execute(config: &RunConfig) -> Result<(), CliError> {
    let f = config.format;
    let artifact = match &config.command {
        Command::Generate(a) => generate(a, f)?,
        Command::Zscan(a) => zscan(a, f)?,
        Command::Fit(a) => fit(a, f)?,
        Command::Lyapunov(a) => lyapunov(a, f)?,
        Command::Mc(a) => mc(a, f)?,
        Command::TmBounds(a) => tm_bounds(a, f)?,
        Command::Systems => systems(f)?,
    };
    match destination(config, &artifact.stem) {
        Some(path) => std::fs::write(&path, &artifact.bytes).map_err(|e| CliError::Io { path, source: e }),
        None => std::io::stdout().write_all(&artifact.bytes).map_err(|e| CliError::Io { path: "<stdout>".into(), source: e }),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

fn generate(a: &GenerateArgs, f: Format) -> Result<Artifact, CliError> {
    let stem = format!("generate-{}", a.system.system);
    if !(a.radius > 0.0) {
        return Err(CliError::Config(format!("--radius must be positive, got {}", a.radius)));
    }
    match a.system.resolve()? {
        System::Substitution(rule) => {
            let patch = patch_for_radius(&rule, a.radius)?;
            render(f, stem, &patch, |w| patch.write_csv(w))
        }
        System::ModelSet { p } => {
            let scheme = CutProjectScheme::noble(p)?;
            let set = generate_model_set(&scheme, &Window::noble(&scheme), a.radius)?;
            render(f, stem, &set, |w| {
                let mut wr = csv::Writer::from_writer(w);
                wr.write_record(["position", "a", "b"])?;
                for x in &set.points {
                    wr.write_record([fmt_real(x.value()), x.a().to_string(), x.b().to_string()])?;
                }
                wr.flush()?;
                Ok(())
            })
        }
        System::Stochastic(model) => {
            let real = sample(&model, a.radius, a.seed)?;
            render(f, stem, &real, |w| real.write_csv(w))
        }
        System::Squarefree => {
            let m = a.radius.floor() as i64;
            let sv = sieve((m as u64).max(2))?;
            let positions: Vec<f64> = (-m..=m).map(|n| n as f64).collect();
            let weights = (-m..=m).map(|n| if sv.is_squarefree(n) == Some(true) { 1.0 } else { 0.0 }).collect();
            let real = WeightedRealisation { positions, weights, radius: a.radius, seed: a.seed, stream: 0, support: Support::Lattice };
            render(f, stem, &real, |w| real.write_csv(w))
        }
        System::ThueMorse => Err(CliError::Config("'tm' is a measure; use --system thue-morse for a patch".into())),
    }
}

fn parse_ratio(s: &str, natural: f64) -> Result<f64, CliError> {
    match s {
        "auto" => Ok(natural),
        "golden" => Ok(QuadraticOrder::golden().theta()),
        "silver" => Ok(1.0 + 2f64.sqrt()),
        _ => s.parse::<f64>().map_err(|_| CliError::Config(format!("--ratio: cannot parse '{s}'"))),
    }
}

fn pure_point(p: u32, cut: f64) -> Result<(Box<dyn ZProducer>, f64, f64), CliError> {
    let scheme = CutProjectScheme::noble(p)?;
    let s: FieldNumber = Window::noble(&scheme).length();
    let lambda = scheme.order().theta();
    Ok((Box::new(PurePointProducer::new(scheme, s, cut)), 0.4, lambda))
}

fn zscan(a: &ZscanArgs, f: Format) -> Result<Artifact, CliError> {
    let stem = format!("zscan-{}", a.system.system);
    let tm = |terms: usize| -> Result<(Box<dyn ZProducer>, f64, f64), CliError> {
        Ok((Box::new(TmFourierProducer::new(Arc::new(TmFourierSeries::new(terms)?))), 0.5, 2.0))
    };
    let (producer, k0, natural): (Box<dyn ZProducer>, f64, f64) = match a.system.resolve()? {
        System::Squarefree => {
            let ks = log_spaced(a.kmax, a.kmin, a.count);
            let d = r_diagnostic(&ks, a.generators)?;
            return render(f, stem, &d, |w| d.write_csv(w));
        }
        System::ModelSet { p } => pure_point(p, a.kstar_cut)?,
        System::ThueMorse => tm(a.terms)?,
        System::Stochastic(model) => (Box::new(AnalyticProducer::new(model)), 0.1, 2.0),
        System::Substitution(rule) => match rule.name() {
            "fibonacci" => pure_point(1, a.kstar_cut)?,
            "thue-morse" => tm(a.terms)?,
            name if name.starts_with("noble-") => pure_point(a.system.p.unwrap_or(1.0) as u32, a.kstar_cut)?,
            name if name.starts_with("gtm-") => {
                let (p, q) = (a.system.p.unwrap_or(1.0) as u32, a.system.q.unwrap_or(1.0) as u32);
                let producer = GtmProducer::new(p, q)?;
                let b = f64::from(producer.base());
                (Box::new(producer), 1.0 / b, b)
            }
            name => {
                return Err(CliError::Config(format!("{name} has no Z(k) producer; use `lyapunov` for its exponent")));
            }
        },
    };
    let ratio = parse_ratio(&a.ratio, natural)?;
    let result = scan(producer.as_ref(), a.k0.unwrap_or(k0), ratio, a.depth)?;
    render(f, stem, &result, |w| result.write_csv(w))
}

fn read_scan(path: &Path) -> Result<ScanResult, CliError> {
    let input_err = |line: u64, reason: String| CliError::Input { path: path.to_path_buf(), line, reason };
    let mut rd = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Io { path: path.to_path_buf(), source },
        other => input_err(1, format!("{other:?}")),
    })?;
    let headers = rd.headers().map_err(|e| input_err(1, e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let k_col = col("k").ok_or_else(|| input_err(1, "missing column 'k'".into()))?;
    let (z_col, is_log) = match (col("ln_Z"), col("Z")) {
        (Some(c), _) => (c, true),
        (None, Some(c)) => (c, false),
        _ => return Err(input_err(1, "missing column 'ln_Z' or 'Z'".into())),
    };
    let mut samples = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| input_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |c: usize, name: &str| -> Result<f64, CliError> {
            let s = rec.get(c).ok_or_else(|| input_err(line, format!("missing field '{name}'")))?;
            s.trim().parse::<f64>().map_err(|_| input_err(line, format!("cannot parse {name} = '{s}'")))
        };
        let k = field(k_col, "k")?;
        let z = field(z_col, if is_log { "ln_Z" } else { "Z" })?;
        if !(k > 0.0) {
            return Err(input_err(line, format!("k = {k} must be positive")));
        }
        samples.push((k, if is_log { z } else { z.ln() }));
    }
    Ok(ScanResult::from_samples(path.display().to_string(), &samples))
}

fn fit(a: &FitArgs, f: Format) -> Result<Artifact, CliError> {
    if a.catalogue {
        let names: Vec<&str> = a.systems.iter().map(String::as_str).collect();
        let report = catalogue_report((!names.is_empty()).then_some(names.as_slice()), a.seed)?;
        return render(f, "fit-catalogue", &report, |w| {
            let mut wr = csv::Writer::from_writer(w);
            wr.write_record(["system", "method", "measured", "predicted", "tolerance", "passed", "spread", "note"])?;
            for r in &report.rows {
                wr.write_record([
                    r.system.clone(),
                    r.method.clone(),
                    fmt_real(r.measured),
                    opt(r.predicted),
                    opt(r.tolerance),
                    r.passed.map(|p| p.to_string()).unwrap_or_default(),
                    opt(r.spread),
                    r.note.clone().unwrap_or_default(),
                ])?;
            }
            wr.flush()?;
            Ok(())
        });
    }
    let path = a.input.as_deref().ok_or_else(|| CliError::Config("fit needs --input or --catalogue".into()))?;
    let scan = read_scan(path)?.skip(a.skip);
    match a.model {
        FitModel::Power => {
            let fit = fit_power(&scan, a.predicted, a.tol)?;
            render(f, "fit-power", &fit, |w| {
                let mut wr = csv::Writer::from_writer(w);
                wr.write_record(["exponent", "ln_prefactor", "max_residual", "spread", "bounded", "predicted", "tolerance", "passed", "samples"])?;
                wr.write_record([
                    fmt_real(fit.exponent),
                    fmt_real(fit.ln_prefactor),
                    fmt_real(fit.max_residual),
                    fmt_real(fit.spread),
                    fit.bounded.to_string(),
                    opt(fit.predicted),
                    opt(fit.tolerance),
                    fit.passed.map(|p| p.to_string()).unwrap_or_default(),
                    fit.samples.to_string(),
                ])?;
                wr.flush()?;
                Ok(())
            })
        }
        FitModel::LogQuadratic => {
            let fit = fit_log_quadratic(&scan)?;
            render(f, "fit-log-quadratic", &fit, |w| {
                let mut wr = csv::Writer::from_writer(w);
                wr.write_record(["A", "B", "C", "max_residual", "samples"])?;
                wr.write_record([fmt_real(fit.a), fmt_real(fit.b), fmt_real(fit.c), fmt_real(fit.max_residual), fit.samples.to_string()])?;
                wr.flush()?;
                Ok(())
            })
        }
    }
}

#[derive(Serialize)]
struct LyapunovOutput {
    #[serde(flatten)]
    report: ExponentReport,
    /// Spectrum minus log λ.
    shifted_spectrum: Vec<Option<f64>>,
    cocycle: Option<CocycleOutput>,
}

#[derive(Serialize)]
struct CocycleOutput {
    k: f64,
    steps: usize,
    exponents: Vec<f64>,
}

fn lyapunov(a: &LyapunovArgs, f: Format) -> Result<Artifact, CliError> {
    let System::Substitution(rule) = a.system.resolve()? else {
        return Err(CliError::Config(format!("{} is not a substitution", a.system.system)));
    };
    let report = exponent_report(&rule)?;
    let ln_lambda = report.lambda.ln();
    let shifted_spectrum = report.lyapunov_spectrum.iter().map(|x| x.map(|v| v - ln_lambda)).collect();
    let cocycle = a
        .k
        .map(|k| Ok::<_, CliError>(CocycleOutput { k, steps: a.steps, exponents: cocycle_spectrum(&rule, k, a.steps, 10)? }))
        .transpose()?;
    let out = LyapunovOutput { report, shifted_spectrum, cocycle };
    render(f, format!("lyapunov-{}", rule.name()), &out, |w| {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["index", "lyapunov", "shifted", "cocycle"])?;
        for (i, (l, s)) in out.report.lyapunov_spectrum.iter().zip(&out.shifted_spectrum).enumerate() {
            let c = out.cocycle.as_ref().and_then(|c| c.exponents.get(i).copied());
            wr.write_record([i.to_string(), opt(*l), opt(*s), opt(c)])?;
        }
        wr.flush()?;
        Ok(())
    })
}

#[derive(Serialize)]
struct McRow {
    k: f64,
    z_empirical: f64,
    standard_error: f64,
    z_analytic: f64,
    /// (empirical − analytic) / standard error.
    deviation: f64,
}

fn mc(a: &McArgs, f: Format) -> Result<Artifact, CliError> {
    let System::Stochastic(model) = a.system.resolve()? else {
        return Err(CliError::Config(format!("{} is not a stochastic model", a.system.system)));
    };
    if a.points == 0 || !(a.kmax > 0.0) {
        return Err(CliError::Config("--points and --kmax must be positive".into()));
    }
    let real = sample(&model, a.radius, a.seed)?;
    // Two bins per Fourier spacing 1/(2R), rounded so every grid point is a bin edge.
    let per_point = ((a.kmax * 4.0 * a.radius) / a.points as f64).ceil() as usize;
    let bins = per_point * a.points;
    let curve = empirical_z_curve(&real, a.kmax, bins)?;
    let rows = (1..=a.points)
        .filter_map(|i| curve.iter().find(|z| z.bins == i * per_point))
        .map(|z| {
            let exact = z_analytic(&model, z.k)?;
            Ok(McRow {
                k: z.k,
                z_empirical: z.value,
                standard_error: z.standard_error,
                z_analytic: exact,
                deviation: (z.value - exact) / z.standard_error,
            })
        })
        .collect::<Result<Vec<_>, zscale::stochastic::StochasticError>>()?;
    render(f, format!("mc-{}", a.system.system), &rows, |w| {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["k", "Z_empirical", "standard_error", "Z_analytic", "deviation"])?;
        for r in &rows {
            wr.write_record([r.k, r.z_empirical, r.standard_error, r.z_analytic, r.deviation].map(fmt_real))?;
        }
        wr.flush()?;
        Ok(())
    })
}

fn tm_bounds(a: &TmBoundsArgs, f: Format) -> Result<Artifact, CliError> {
    let from = a.from.unwrap_or(a.n);
    if from > a.n {
        return Err(CliError::Config(format!("--from {from} exceeds --n {}", a.n)));
    }
    let series = (a.series_terms > 0).then(|| TmFourierSeries::new(a.series_terms)).transpose()?;
    let rows = (from..=a.n).map(|n| BoundReport::new(n, a.beta_terms, series.as_ref())).collect::<Result<Vec<_>, _>>()?;
    render(f, "tm-bounds", &rows, |w| {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["n", "lower", "improved_lower", "upper", "F_est"])?;
        for r in &rows {
            wr.write_record([r.n.to_string(), fmt_real(r.lower), fmt_real(r.improved_lower), fmt_real(r.upper), opt(r.f_est)])?;
        }
        wr.flush()?;
        Ok(())
    })
}

#[derive(Serialize)]
struct SystemEntry {
    name: &'static str,
    description: &'static str,
}

fn systems(f: Format) -> Result<Artifact, CliError> {
    let entries: Vec<SystemEntry> = zscale::substitution::CATALOGUE
        .iter()
        .chain(EXTRA_SYSTEMS)
        .map(|&(name, description)| SystemEntry { name, description })
        .collect();
    render(f, "systems", &entries, |w| {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["name", "description"])?;
        for e in &entries {
            wr.write_record([e.name, e.description])?;
        }
        wr.flush()?;
        Ok(())
    })
}
