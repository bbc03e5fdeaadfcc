mod output;

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use catastroagri_core::analytics::{
    build_series, rate_audit, summarize, top_k, AnalyticsError, Dimension, Filter, Metric, PeriodSource,
    RateConfig, SeriesSpec,
};
use catastroagri_core::ingest::{detect_format, export_csv, parse_csv, Dataset, FileFormat, HeaderMapping, IngestError};
use catastroagri_core::sarima::{
    fit, forecast, linear_trend_forecast, qq_data, simulate, validate, SarimaError, SarimaSpec,
};
use catastroagri_core::TimeSeries64;
use catastroagri_service::ServiceConfig;
use clap::{Parser, Subcommand, ValueEnum};
use rust_decimal::Decimal;

use output::{fmt_decimal, fmt_num, Table};

#[derive(Parser)]
#[command(name = "catastroagri", version, about = "Catastrophic agricultural insurance analytics")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Sarima,
    Linear,
}

#[derive(clap::Args)]
struct SeriesArgs {
    /// Register CSV file.
    file: PathBuf,
    /// Metric to aggregate per period: sown, insured, indemnity, producers.
    #[arg(long, default_value = "insured")]
    metric: String,
    /// Column whose values delimit periods (first-appearance order), or
    /// `record_order`; campaigns ascending when omitted.
    #[arg(long)]
    period_column: Option<String>,
    /// Restrict to records with dim=value (repeatable).
    #[arg(long = "filter")]
    filters: Vec<String>,
    /// Season length.
    #[arg(long, default_value_t = 12)]
    s: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a register file.
    Ingest { file: PathBuf },
    /// Group and total a register.
    Summarize {
        file: PathBuf,
        /// Comma-separated dimensions: campaign, province, district, sector, crop.
        #[arg(long)]
        by: String,
        #[arg(long = "filter")]
        filters: Vec<String>,
        /// Keep only the k largest groups by --metric.
        #[arg(long)]
        top: Option<usize>,
        #[arg(long, default_value = "indemnity")]
        metric: String,
    },
    /// Check which indemnity rates reproduce the recorded amounts.
    Audit {
        file: PathBuf,
        /// Comma-separated soles-per-hectare rates; bundled rates when omitted.
        #[arg(long)]
        rates: Option<String>,
    },
    /// Fit the seasonal airline model and run the adequacy checks.
    Fit {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Point forecasts for the next h periods.
    Forecast {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        h: usize,
        #[arg(long, value_enum, default_value_t = Method::Sarima)]
        method: Method,
    },
    /// Normal probability plot pairs for the fitted residuals.
    Qq {
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of built web UI assets.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
    /// Write a register CSV whose monthly insured area follows the airline model.
    Simulate {
        #[arg(long, default_value_t = 0.89, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, default_value_t = 0.92, allow_negative_numbers = true)]
        seasonal_theta: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 12)]
        s: usize,
        #[arg(long, default_value_t = 240)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Constant added to every observation.
        #[arg(long, default_value_t = 1000.0)]
        level: f64,
        /// First period label, YYYY-MM.
        #[arg(long, default_value = "2001-01")]
        start: String,
    },
}

/// Exit 1: bad input or usage. Exit 2: the computation itself failed.
enum Failure {
    Input(String),
    Computation(String),
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<AnalyticsError> for Failure {
    fn from(e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::Overflow | AnalyticsError::DegenerateInput(_) => Failure::Computation(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<SarimaError> for Failure {
    fn from(e: SarimaError) -> Self {
        Failure::Computation(format!("{} ({})", e, e.code()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn utf8(bytes: Vec<u8>) -> String {
    String::from_utf8(bytes).expect("CSV writer emits UTF-8")
}

fn load(path: &Path) -> Result<Dataset, Failure> {
    let name = path.display().to_string();
    if let FileFormat::Unsupported(ext) = detect_format(&name) {
        return Err(Failure::Input(format!("{name}: only .csv files are supported (got '.{ext}')")));
    }
    let bytes = fs::read(path).map_err(|e| Failure::Input(format!("{name}: {e}")))?;
    Ok(parse_csv(&bytes, &HeaderMapping::default(), &name)?)
}

fn run(cli: Cli) -> Result<String, Failure> {
    let format = cli.format;
    match cli.command {
        Command::Ingest { file } => ingest(&load(&file)?, format),
        Command::Summarize {
            file,
            by,
            filters,
            top,
            metric,
        } => summarize_cmd(&load(&file)?, &by, &filters, top, &metric, format),
        Command::Audit { file, rates } => audit(&load(&file)?, rates.as_deref(), format),
        Command::Fit { series, alpha } => fit_cmd(&series, alpha, format),
        Command::Forecast { series, h, method } => forecast_cmd(&series, h, method, format),
        Command::Qq { series } => qq_cmd(&series, format),
        Command::Serve { port, host, ui_dir } => serve(&host, port, ui_dir),
        Command::Simulate {
            theta,
            seasonal_theta,
            sigma,
            s,
            n,
            seed,
            level,
            start,
        } => simulate_cmd(theta, seasonal_theta, sigma, s, n, seed, level, &start),
    }
}

fn ingest(ds: &Dataset, format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Json => json(ds),
        Format::Csv => utf8(export_csv(&ds.records)),
        Format::Table => {
            let mut out = format!(
                "source: {}\nrecords: {}\nrow errors: {}\nrow warnings: {}\n",
                ds.source_name,
                ds.records.len(),
                ds.row_errors.len(),
                ds.row_warnings.len()
            );
            for issue in &ds.row_errors {
                out.push_str(&format!("  error   row {}: {}\n", issue.row, issue.message));
            }
            for issue in &ds.row_warnings {
                out.push_str(&format!("  warning row {}: {}\n", issue.row, issue.message));
            }
            out
        }
    })
}

fn summarize_cmd(
    ds: &Dataset,
    by: &str,
    filters: &[String],
    top: Option<usize>,
    metric: &str,
    format: Format,
) -> Result<String, Failure> {
    let dims = Dimension::parse_list(by)?;
    let filters = Filter::parse_terms(filters)?;
    let metric: Metric = metric.parse()?;
    let mut summary = summarize(&ds.records, &dims, &filters)?;
    if let Some(k) = top {
        summary.rows = top_k(&summary.rows, metric, k);
    }
    Ok(match format {
        Format::Json => json(&summary),
        Format::Csv => utf8(export_csv(&summary)),
        Format::Table => {
            let mut header: Vec<String> = dims.iter().map(|d| d.column_name().to_string()).collect();
            header.extend(["SOWN_HAS", "INSURED_HAS", "INDEMNITY_SOLES", "PRODUCERS", "RECORDS"].map(String::from));
            let mut table = Table::new(header, dims.len());
            let totals_cells = |t: &catastroagri_core::analytics::Totals| {
                vec![
                    fmt_decimal(t.total_sown_has),
                    fmt_decimal(t.total_insured_has),
                    fmt_decimal(t.total_indemnity_soles),
                    t.total_producers.to_string(),
                    t.record_count.to_string(),
                ]
            };
            for row in &summary.rows {
                let mut cells: Vec<String> = row.group_key.iter().map(|g| g.value.clone()).collect();
                cells.extend(totals_cells(&row.totals));
                table.push(cells);
            }
            let mut total = vec!["TOTAL".to_string()];
            total.extend(std::iter::repeat_n(String::new(), dims.len() - 1));
            total.extend(totals_cells(&summary.grand_total));
            table.push_footer(total);
            table.render()
        }
    })
}

fn audit(ds: &Dataset, rates: Option<&str>, format: Format) -> Result<String, Failure> {
    let rates: Vec<Decimal> = match rates {
        None => RateConfig::bundled().candidate_rates(),
        Some(raw) => raw
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Failure::Input(format!("'{s}' is not a decimal rate")))
            })
            .collect::<Result<_, _>>()?,
    };
    let result = rate_audit(&ds.records, &rates)?;
    Ok(match format {
        Format::Json => json(&result),
        Format::Csv => {
            let mut t = output::csv_table(&["RATE", "MATCHED", "DETERMINATE", "FRACTION"]);
            for m in &result.per_rate {
                t.push(vec![m.rate.to_string(), m.matched.to_string(), m.determinate.to_string(), fmt_num(m.fraction)]);
            }
            t.render_csv()
        }
        Format::Table => {
            let line: Vec<String> = result
                .per_rate
                .iter()
                .map(|m| format!("{}: {}/{}", m.rate, m.matched, m.determinate))
                .collect();
            let mut out = format!("{}\n", line.join(", "));
            if !result.unmatched.is_empty() {
                let rows: Vec<String> = result.unmatched.iter().map(|i| (i + 1).to_string()).collect();
                out.push_str(&format!("unmatched rows: {}\n", rows.join(", ")));
            }
            if !result.indeterminate.is_empty() {
                let rows: Vec<String> = result.indeterminate.iter().map(|i| (i + 1).to_string()).collect();
                out.push_str(&format!("indeterminate rows (zero area and amount): {}\n", rows.join(", ")));
            }
            out
        }
    })
}

fn load_series(args: &SeriesArgs) -> Result<TimeSeries64, Failure> {
    let ds = load(&args.file)?;
    if args.s == 0 {
        return Err(Failure::Input("--s must be at least 1".into()));
    }
    let period = match args.period_column.as_deref().map(str::trim) {
        None | Some("") => PeriodSource::Campaign,
        Some("record_order") | Some("order") => PeriodSource::RecordOrder,
        Some(col) => match col.parse::<Dimension>()? {
            Dimension::Campaign => PeriodSource::Campaign,
            d => PeriodSource::Column(d),
        },
    };
    let spec = SeriesSpec {
        metric: args.metric.parse()?,
        filters: Filter::parse_terms(&args.filters)?,
        period,
        seasonal_period: args.s,
    };
    Ok(build_series(&ds.records, &spec)?)
}

fn fit_cmd(args: &SeriesArgs, alpha: f64, format: Format) -> Result<String, Failure> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Failure::Input("--alpha must lie in (0, 1)".into()));
    }
    let series = load_series(args)?;
    let fitted = fit(&series, SarimaSpec::airline(args.s))?;
    let report = validate(&fitted, alpha);
    let coefficients = [("MA1", &fitted.ma), (&*format!("SMA{}", args.s), &fitted.seasonal_ma)]
        .map(|(name, c)| vec![name.to_string(), fmt_num(c.estimate), fmt_num(c.std_error), fmt_num(c.t_value), format!("{:.3}", c.p_value)]);
    Ok(match format {
        Format::Json => json(&serde_json::json!({
            "n": series.len(),
            "theta": fitted.ma,
            "seasonal_theta": fitted.seasonal_ma,
            "composite": fitted.composite,
            "sigma2": fitted.sigma2,
            "css": fitted.css,
            "residual_count": fitted.m,
            "diagnostics": report,
        })),
        Format::Csv => {
            let mut t = output::csv_table(&["TERM", "COEF", "SE", "T", "P"]);
            for row in coefficients {
                t.push(row);
            }
            t.render_csv()
        }
        Format::Table => {
            let mut out = format!(
                "ARIMA(0,1,1)(0,1,1){}  n = {}  residuals = {}\n\n",
                args.s,
                series.len(),
                fitted.m
            );
            let mut t = Table::new(["TERM", "COEF", "SE", "T", "P"].map(String::from).to_vec(), 1);
            for row in coefficients {
                t.push(row);
            }
            out.push_str(&t.render());
            out.push_str(&format!(
                "\nθΘ = {}   σ² = {}   CSS = {}\n\n",
                fmt_num(fitted.composite),
                fmt_num(fitted.sigma2),
                fmt_num(fitted.css)
            ));
            let mut lb = Table::new(["LAG", "Q", "DF", "P"].map(String::from).to_vec(), 0);
            for row in &report.ljung_box {
                lb.push(vec![row.lag.to_string(), fmt_num(row.q), row.df.to_string(), format!("{:.3}", row.p_value)]);
            }
            out.push_str(&lb.render());
            let mark = |b: bool| if b { "yes" } else { "no" };
            out.push_str(&format!(
                "\ninvertible (|θ|, |Θ| < 1): {}\nsignificant (p < {alpha}): {}\nwhite residuals (all LB p > {alpha}): {}\nverdict: {}\n",
                mark(report.condition_invertible),
                mark(report.condition_params_significant),
                mark(report.condition_whiteness),
                if report.verdict { "adequate" } else { "inadequate" }
            ));
            out
        }
    })
}

fn forecast_cmd(args: &SeriesArgs, h: usize, method: Method, format: Format) -> Result<String, Failure> {
    let series = load_series(args)?;
    let result = match method {
        Method::Linear => linear_trend_forecast(&series, h)?,
        Method::Sarima => {
            if h < 1 {
                return Err(SarimaError::HorizonInvalid.into());
            }
            let fitted = fit(&series, SarimaSpec::airline(args.s))?;
            forecast(&series, &fitted, h)?
        }
    };
    Ok(match format {
        Format::Json => json(&result),
        Format::Csv | Format::Table => {
            let mut t = match format {
                Format::Csv => output::csv_table(&["STEP", "FORECAST"]),
                _ => Table::new(vec!["STEP".into(), "FORECAST".into()], 0),
            };
            for (j, v) in result.point_forecasts.iter().enumerate() {
                t.push(vec![(j + 1).to_string(), fmt_num(*v)]);
            }
            if format == Format::Csv {
                t.render_csv()
            } else {
                t.render()
            }
        }
    })
}

fn qq_cmd(args: &SeriesArgs, format: Format) -> Result<String, Failure> {
    let series = load_series(args)?;
    let fitted = fit(&series, SarimaSpec::airline(args.s))?;
    let pairs = qq_data(fitted.scored_residuals())?;
    Ok(match format {
        Format::Json => json(&pairs),
        Format::Csv | Format::Table => {
            let mut t = match format {
                Format::Csv => output::csv_table(&["THEORETICAL", "RESIDUAL"]),
                _ => Table::new(vec!["THEORETICAL".into(), "RESIDUAL".into()], 0),
            };
            for (q, r) in pairs {
                t.push(vec![fmt_num(q), fmt_num(r)]);
            }
            if format == Format::Csv {
                t.render_csv()
            } else {
                t.render()
            }
        }
    })
}

fn serve(host: &str, port: u16, ui_dir: Option<PathBuf>) -> Result<String, Failure> {
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|_| Failure::Input(format!("'{host}:{port}' is not a socket address")))?;
    let mut config = ServiceConfig::from_env().map_err(Failure::Input)?;
    if let Some(dir) = &ui_dir {
        if !dir.is_dir() {
            return Err(Failure::Input(format!("{} is not a directory", dir.display())));
        }
    }
    config.ui_dir = ui_dir;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Computation(e.to_string()))?;
    eprintln!("listening on http://{addr}");
    runtime
        .block_on(catastroagri_service::serve(addr, config))
        .map_err(|e| Failure::Input(format!("cannot serve on {addr}: {e}")))?;
    Ok(String::new())
}

fn month_labels(start: &str, n: usize) -> Result<Vec<String>, Failure> {
    let bad = || Failure::Input(format!("--start must look like YYYY-MM, got '{start}'"));
    let (y, m) = start.split_once('-').ok_or_else(bad)?;
    let year: i64 = y.parse().map_err(|_| bad())?;
    let month: i64 = m.parse().map_err(|_| bad())?;
    if !(1..=12).contains(&month) {
        return Err(bad());
    }
    let first = year * 12 + month - 1;
    Ok((0..n as i64)
        .map(|k| {
            let idx = first + k;
            format!("{:04}-{:02}", idx / 12, idx % 12 + 1)
        })
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    theta: f64,
    seasonal_theta: f64,
    sigma: f64,
    s: usize,
    n: usize,
    seed: u64,
    level: f64,
    start: &str,
) -> Result<String, Failure> {
    let labels = month_labels(start, n)?;
    let series = simulate(theta, seasonal_theta, sigma, s, n, seed).map_err(|e| Failure::Input(e.to_string()))?;
    let mut t = output::csv_table(&[
        "YEAR",
        "PROVINCE",
        "DISTRICT",
        "SECTOR_EST",
        "NOM_CROP",
        "AREA_SEM_HAS",
        "AREA_ASEG_HAS",
        "AMOUNT_IND_SOLES",
        "NUM_PROD_BENIF",
    ]);
    for (label, v) in labels.into_iter().zip(series.values()) {
        let insured = Decimal::from_f64_retain(level + v)
            .ok_or_else(|| Failure::Input("simulated value out of range".into()))?
            .round_dp(2);
        if insured.is_sign_negative() {
            return Err(Failure::Input("simulated value fell below zero; raise --level".into()));
        }
        t.push(vec![
            label,
            "SIMULATED".into(),
            "ALL".into(),
            "ALL".into(),
            "ALL".into(),
            insured.to_string(),
            insured.to_string(),
            (insured * Decimal::from(400)).to_string(),
            "0".into(),
        ]);
    }
    Ok(t.render_csv())
}
