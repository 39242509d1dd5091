//! Command surface for the `dualpair` binary: configuration, dispatch,
//! report emission.

pub mod config;
pub mod report;
pub mod suite;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use dualpair::lattice::{epipelagic_dichotomy, is_selfdual, jumps, splitting_dims, tensor_jumps};
use dualpair::{DivisionKind, Sign, TildeModel};
use serde_json::{json, Value};

use config::{build_model, point, rationals, split_space, ConfigError, InstanceConfig, RunConfig};
use report::{Record, Report};
use suite::SplitCase;

/// Environment variable naming the report directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "DUALPAIR_OUT_DIR";

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLES: u64 = 10_000;
pub const JUMP_SAMPLES: u64 = 1_000;

/// Bundled instance configurations, addressable as `bundled:<name>`.
pub const BUNDLED: &[(&str, &str)] = &[
    ("sp2-o3", include_str!("../configs/sp2-o3.toml")),
    ("sp2-o4", include_str!("../configs/sp2-o4.toml")),
    ("o2-sp2", include_str!("../configs/o2-sp2.toml")),
    ("gl2-gl2", include_str!("../configs/gl2-gl2.toml")),
    ("gl3-gl3", include_str!("../configs/gl3-gl3.toml")),
    ("o4-sp4", include_str!("../configs/o4-sp4.toml")),
    ("sp4-o5", include_str!("../configs/sp4-o5.toml")),
    ("u1-ramified", include_str!("../configs/u1-ramified.toml")),
    ("u2-ramified", include_str!("../configs/u2-ramified.toml")),
];

pub fn bundled(name: &str) -> Option<RunConfig> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| RunConfig::parse(text).expect("bundled configs parse"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Jump set of a point, and tensor data when a partner is given.
    Jumps,
    /// Which pair types admit a pair of regular semisimple moment images.
    Classify {
        #[arg(long)]
        max_rank: Option<usize>,
    },
    /// Stable vectors in degree -1 of a graded model.
    StableSearch,
    /// Finite correspondence checks on stable instances of a model.
    Verify,
    /// The full invariant suite.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Jumps => "jumps",
            Command::Classify { .. } => "classify",
            Command::StableSearch => "stable-search",
            Command::Verify => "verify",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Md,
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "dualpair",
    version,
    about = "Exact finite checks for moment maps of dual pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file, or `bundled:<name>` for a shipped instance.
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// Seed for all sampling (default 1).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Size of the worker pool (default: logical cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Element budget for exhaustive enumerations.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Directory receiving `<command>.json` and `<command>.md`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

pub fn load_config(source: Option<&str>) -> Result<RunConfig, ConfigError> {
    match source {
        None => Ok(RunConfig::default()),
        Some(s) => match s.strip_prefix("bundled:") {
            Some(name) => bundled(name).ok_or_else(|| ConfigError::Key {
                key: "--config".into(),
                message: format!(
                    "no bundled config `{name}`; available: {}",
                    BUNDLED
                        .iter()
                        .map(|(n, _)| *n)
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            }),
            None => RunConfig::load(Path::new(s)),
        },
    }
}

/// Runs one command on a validated configuration. Command-line `seed` and
/// `budget` have already been folded into `cfg`.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Report, ConfigError> {
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let echo = serde_json::to_value(cfg).unwrap_or(Value::Null);
    let (records, data) = match command {
        Command::Jumps => run_jumps(cfg)?,
        Command::Classify { max_rank } => {
            let rank = max_rank
                .or(cfg.classify.as_ref().and_then(|c| c.max_rank))
                .unwrap_or(2);
            if !(1..=3).contains(&rank) {
                return Err(ConfigError::Key {
                    key: "--max-rank".into(),
                    message: "must be 1, 2 or 3".into(),
                });
            }
            let field = cfg.field_or(5)?;
            suite::classify_records(rank, &field, cfg.budget, seed)
        }
        Command::StableSearch => run_stable_search(cfg)?,
        Command::Verify => run_verify(cfg)?,
        Command::Selftest => (selftest(cfg, seed)?, Value::Null),
    };
    Ok(Report::new(command.name(), seed, echo, records, data))
}

fn instance_or_default(cfg: &RunConfig) -> (RunConfig, InstanceConfig) {
    match &cfg.instance {
        Some(i) => (cfg.clone(), i.clone()),
        None => {
            let b = bundled("sp2-o3").expect("bundled sp2-o3");
            let inst = b.instance.clone().expect("bundled instance");
            let merged = RunConfig {
                field: cfg.field.clone().or(b.field),
                ..cfg.clone()
            };
            (merged, inst)
        }
    }
}

fn run_stable_search(cfg: &RunConfig) -> Result<(Vec<Record>, Value), ConfigError> {
    let (cfg, inst) = instance_or_default(cfg);
    let field = cfg.field_or(3)?;
    let model = build_model(&inst, &field)?;
    let count = inst.count.unwrap_or(3);
    let budget = suite::default_budget(cfg.budget);
    let found = model.stable_instances(count, budget);
    let anchor = "stable vectors exist in degree -1";
    Ok(match found {
        Ok(list) => {
            let items: Vec<Value> = list
                .iter()
                .map(|i| {
                    json!({
                        "w": i.w_bar.format(&field),
                        "lambda": i.lam.format(&field),
                        "lambda_p": i.lam_p.format(&field),
                    })
                })
                .collect();
            let rec = Record::new(
                "stable search",
                anchor,
                list.len() >= count,
                format!(
                    "{} of {count} found in a space of size {:?}",
                    list.len(),
                    model.x_size()
                ),
            );
            (vec![rec], json!({ "instances": items }))
        }
        Err(e) => (
            vec![Record::new("stable search", anchor, false, e.to_string())],
            Value::Null,
        ),
    })
}

fn run_verify(cfg: &RunConfig) -> Result<(Vec<Record>, Value), ConfigError> {
    let (cfg, inst) = instance_or_default(cfg);
    let field = cfg.field_or(3)?;
    let model = build_model(&inst, &field)?;
    let budget = suite::default_budget(cfg.budget);
    let mut records = suite::correspondence_records(
        &instance_label(&inst),
        &model,
        inst.count.unwrap_or(3),
        budget,
    );
    if let Some(case) = split_case(&inst, &field, Some(model))? {
        records.push(suite::splitting_record(&case));
    }
    Ok((records, Value::Null))
}

fn instance_label(inst: &InstanceConfig) -> String {
    match inst.model.as_str() {
        "formed" => format!(
            "{}-{}",
            inst.first.as_deref().unwrap_or("?"),
            inst.second.as_deref().unwrap_or("?")
        ),
        "gl" => format!("GL{}-GL{}", inst.weights.len(), inst.weights_p.len()),
        _ => format!("U{}-U{} ramified", inst.n.unwrap_or(1), inst.n.unwrap_or(1)),
    }
}

/// The splitting-dimension case of a formed instance.
fn split_case(
    inst: &InstanceConfig,
    field: &std::sync::Arc<dualpair::Field>,
    model: Option<TildeModel>,
) -> Result<Option<SplitCase>, ConfigError> {
    if inst.model != "formed" {
        return Ok(None);
    }
    let first = config::lie_type(inst.first.as_deref().unwrap_or(""), "instance.first")?;
    let second = config::lie_type(inst.second.as_deref().unwrap_or(""), "instance.second")?;
    let v = split_space(field, first, "instance.first")?;
    let vp = split_space(field, second, "instance.second")?;
    let mk = |eps: Sign, plus: &[String], aniso: &[String], key: &str| -> Result<_, ConfigError> {
        let aniso = rationals(aniso, key)?;
        let n = aniso.len();
        dualpair::ApartmentPoint::new(
            DivisionKind::Split,
            eps,
            rationals(plus, key)?,
            aniso,
            vec![1; n],
        )
        .map_err(|e| ConfigError::Key {
            key: key.into(),
            message: e.to_string(),
        })
    };
    Ok(Some(SplitCase {
        label: instance_label(inst),
        pt: mk(v.eps(), &inst.point, &inst.aniso, "instance.point")?,
        ptp: mk(vp.eps(), &inst.point_p, &inst.aniso_p, "instance.point_p")?,
        m: inst.m.unwrap_or(2),
        model,
    }))
}

fn run_jumps(cfg: &RunConfig) -> Result<(Vec<Record>, Value), ConfigError> {
    let default_point = config::PointConfig {
        kind: "split".into(),
        eps: -1,
        plus: vec!["1/4".into()],
        aniso: vec![],
        aniso_units: vec![],
    };
    let (pc, partner, m) = match &cfg.jumps {
        Some(j) => (j.point.clone(), j.partner.clone(), j.m),
        None => (default_point, None, None),
    };
    let pt = point(&pc, "jumps.point")?;
    let j = jumps(&pt);
    let show = |js: &dualpair::JumpSet| -> Value {
        js.entries
            .iter()
            .map(|(r, k)| (dualpair::numeric::format_rational(r), json!(k)))
            .collect::<serde_json::Map<_, _>>()
            .into()
    };
    let mut records = vec![Record::new(
        "jump symmetry",
        "self-dual jump sets satisfy Jump = -Jump",
        is_selfdual(&pt) && j.is_symmetric(),
        format!(
            "{} jumps with total multiplicity {}",
            j.entries.len(),
            j.total()
        ),
    )];
    let mut data = json!({
        "period": dualpair::numeric::format_rational(&j.period),
        "jumps": show(&j),
    });
    if let Some(pp) = partner {
        let ptp = point(&pp, "jumps.partner")?;
        let jp = jumps(&ptp);
        match tensor_jumps(&j, &jp) {
            Ok(t) => {
                records.push(Record::new(
                    "tensor total",
                    "Jump(L (x) L') = Jump(L) + Jump(L')",
                    t.total() == pt.dim() * ptp.dim(),
                    format!("total multiplicity {}", t.total()),
                ));
                data["partner_jumps"] = show(&jp);
                data["tensor_jumps"] = show(&t);
            }
            Err(e) => records.push(Record::new(
                "tensor jumps",
                "tensor jumps",
                false,
                e.to_string(),
            )),
        }
        if let Some(m) = m {
            let d = epipelagic_dichotomy(&j, &jp, m);
            data["dichotomy"] = json!(format!("{d:?}"));
            records.push(Record::info(
                "dichotomy",
                "epipelagic dichotomy",
                format!("{d:?}"),
            ));
            if let Ok(dims) = splitting_dims(&pt, &ptp, m) {
                data["splitting"] = json!({
                    "dim_w": dims.dim_w, "dim_x": dims.dim_x, "dim_y": dims.dim_y, "total": dims.total,
                });
                records.push(suite::splitting_record(&SplitCase {
                    label: "configured".into(),
                    pt: pt.clone(),
                    ptp,
                    m,
                    model: None,
                }));
            }
        }
    }
    Ok((records, data))
}

/// Every module's invariants at desk scale. The classification runs up to
/// rank 1 here; `classify` covers rank 2.
pub fn selftest(cfg: &RunConfig, seed: u64) -> Result<Vec<Record>, ConfigError> {
    let samples = cfg
        .selftest
        .as_ref()
        .and_then(|s| s.samples)
        .unwrap_or(DEFAULT_SAMPLES);
    let flip = cfg.inject_star_sign();
    let budget = suite::default_budget(cfg.budget);
    let mut out = suite::field_checks();
    out.extend(suite::moment_checks(samples, seed, flip));
    out.extend(suite::oscillator_checks(samples, seed));
    out.extend(suite::p_oracle_checks(samples, seed));
    out.extend(suite::jump_checks(JUMP_SAMPLES, seed));
    for case in suite::random_split_cases(JUMP_SAMPLES, seed) {
        let r = suite::splitting_record(&case);
        if !r.passed() {
            out.push(r);
        }
    }
    out.push(Record::new(
        "splitting random configurations",
        "sfW = sfX + sfY with sfY maximal isotropic; sum of X^[mu] is W",
        !out.iter().any(|r| r.name.starts_with("splitting random")),
        format!("{JUMP_SAMPLES} epipelagic-compatible configurations"),
    ));
    let f5 = suite::prime_field(5);
    out.extend(suite::classify_records(1, &f5, cfg.budget, seed).0);
    for (name, _) in BUNDLED {
        let b = bundled(name).expect("bundled");
        let inst = b.instance.clone().expect("instance");
        let field = b.field_or(3)?;
        let model = build_model(&inst, &field)?;
        out.extend(suite::correspondence_records(
            &instance_label(&inst),
            &model,
            inst.count.unwrap_or(3),
            budget,
        ));
        if let Some(case) = split_case(&inst, &field, Some(model))? {
            out.push(suite::splitting_record(&case));
        }
    }
    Ok(out)
}

/// Parses arguments, runs, writes reports; returns the exit code.
pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut cfg = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return 2;
        }
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.budget.is_some() {
        cfg.budget = cli.budget;
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot start workers: {e}");
            return 2;
        }
    };
    let report = match pool.install(|| run(cli.command, &cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("config error: {e}");
            return 2;
        }
    };
    let out_dir = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
    if let Some(dir) = out_dir {
        if let Err(e) = write_reports(&dir, &report) {
            eprintln!("cannot write reports to {}: {e}", dir.display());
            return 2;
        }
    }
    match cli.format {
        Format::Json => print!("{}", report.to_json()),
        Format::Md => print!("{}", report.to_markdown()),
    }
    for r in report.records.iter().filter(|r| !r.passed()) {
        eprintln!("FAIL {} [{}]: {}", r.name, r.anchor, r.detail);
    }
    if report.passed() {
        0
    } else {
        1
    }
}

pub fn write_reports(dir: &Path, report: &Report) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(
        dir.join(format!("{}.json", report.command)),
        report.to_json(),
    )?;
    std::fs::write(
        dir.join(format!("{}.md", report.command)),
        report.to_markdown(),
    )
}
