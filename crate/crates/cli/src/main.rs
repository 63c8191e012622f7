use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tiltcheck_core::cache::load_or_build;
use tiltcheck_core::quiver::PRESETS;
use tiltcheck_core::report::{catalog_report, heart_report, reduce_report, CatalogReport, HeartReport, ReduceReport};
use tiltcheck_core::{classify, CatalogBounds, ClassifyOptions, Error, Field, IndecCatalog, Quiver, VerdictTable, Workbench};

#[derive(Parser)]
#[command(name = "tiltcheck", version, about = "Effaceability and Serre-closure of torsion pairs over Dynkin quivers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the indecomposable representations.
    Catalog(RunConfig),
    /// Run every checker on every torsion class.
    Classify(RunConfig),
    /// Trace the reduction chain of one torsion class.
    Reduce(WithId),
    /// Describe the tilted heart of one torsion class.
    Heart(WithId),
}

#[derive(Args)]
struct WithId {
    #[command(flatten)]
    cfg: RunConfig,
    /// Row id of the torsion class, as printed by `classify`.
    #[arg(long)]
    id: usize,
}

#[derive(Args)]
struct RunConfig {
    /// Preset name (A1..A5, A3b, A3c, D4, D5, E6) or path to a quiver file.
    #[arg(long)]
    quiver: String,
    #[arg(long, default_value_t = 2)]
    field: u32,
    #[arg(long = "max-ind", default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..64))]
    max_ind: u64,
    #[arg(long = "max-subdim", default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    max_subdim: u64,
    /// Summand bound for the epimorphism checker; 0 disables it.
    #[arg(long = "heart-bound", default_value_t = 256)]
    heart_bound: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// Directory for the catalog cache.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Exit codes: 0 pass, 1 mathematical disagreement, 2 usage error, 3 resource bounds.
fn code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::Parse { .. } | Error::Io(_)) => 2,
        Some(Error::SearchSpace(_) | Error::NotRepFinite(_)) => 3,
        _ => 1,
    }
}

fn load_quiver(src: &str) -> Result<(String, Quiver), Error> {
    if PRESETS.contains(&src) {
        return Ok((src.to_string(), Quiver::preset(src)?));
    }
    let text = std::fs::read_to_string(src)
        .map_err(|e| Error::Config(format!("'{src}' is neither a preset ({}) nor a readable file: {e}", PRESETS.join(", "))))?;
    Ok((src.to_string(), Quiver::parse(&text)?))
}

impl RunConfig {
    fn options(&self) -> ClassifyOptions {
        ClassifyOptions {
            max_indecs: self.max_ind as usize,
            max_subdim: self.max_subdim as usize,
            heart_bound: (self.heart_bound > 0).then_some(self.heart_bound),
            reduce: true,
        }
    }

    fn catalog(&self) -> Result<(String, IndecCatalog), Error> {
        let (name, q) = load_quiver(&self.quiver)?;
        let field = Field::new(self.field)?;
        let bounds = CatalogBounds { max_indecs: self.max_ind as usize, ..CatalogBounds::default() };
        let (cat, _) = load_or_build(self.cache.as_deref(), &q, field, bounds)?;
        Ok((name, cat))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.cmd {
        Cmd::Catalog(c) | Cmd::Classify(c) => c,
        Cmd::Reduce(w) | Cmd::Heart(w) => &w.cfg,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j as usize);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli.cmd)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code_for(&e))
        }
    }
}

fn run(cmd: &Cmd) -> anyhow::Result<u8> {
    let mut out = io::BufWriter::new(io::stdout().lock());
    let code = match cmd {
        Cmd::Catalog(cfg) => {
            let (name, cat) = cfg.catalog()?;
            write_catalog(&mut out, cfg.format, &catalog_report(&cat, &name))?;
            0
        }
        Cmd::Classify(cfg) => {
            let (name, cat) = cfg.catalog()?;
            let table = classify(&cat, &name, &cfg.options())?;
            write_table(&mut out, cfg.format, &table)?;
            if table.agreement {
                0
            } else {
                for r in table.torsion_classes.iter().filter(|r| !r.agree) {
                    eprintln!("disagreement on class {}: {}", r.id, serde_json::to_string(r)?);
                }
                1
            }
        }
        Cmd::Reduce(w) => {
            let (name, cat) = w.cfg.catalog()?;
            let wb = Workbench::new(&cat, w.cfg.max_subdim as usize)?;
            let t = wb.class(w.cfg.max_ind as usize, w.id)?;
            let r = reduce_report(&wb, &name, w.id, t)?;
            write_reduce(&mut out, w.cfg.format, &r)?;
            if let Some(v) = &r.violation {
                eprintln!("violation: {v}");
            }
            u8::from(r.violation.is_some())
        }
        Cmd::Heart(w) => {
            let (name, cat) = w.cfg.catalog()?;
            let wb = Workbench::new(&cat, w.cfg.max_subdim as usize)?;
            let t = wb.class(w.cfg.max_ind as usize, w.id)?;
            write_heart(&mut out, w.cfg.format, &heart_report(&wb, &name, w.id, t)?)?;
            0
        }
    };
    out.flush()?;
    Ok(code)
}

fn write_json(out: &mut impl Write, v: &impl Serialize) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn write_csv<R: Serialize>(out: &mut impl Write, rows: impl IntoIterator<Item = R>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_catalog(out: &mut impl Write, fmt: Format, r: &CatalogReport) -> anyhow::Result<()> {
    #[derive(Serialize)]
    struct Row<'a> {
        index: usize,
        label: &'a str,
        dims: String,
        projective: String,
        injective: String,
        simple: String,
    }
    match fmt {
        Format::Json => write_json(out, r),
        Format::Csv => write_csv(
            out,
            r.indecomposables.iter().map(|e| Row {
                index: e.index,
                label: &e.label,
                dims: join(&e.dims),
                projective: opt(e.projective),
                injective: opt(e.injective),
                simple: opt(e.simple),
            }),
        ),
        Format::Text => {
            writeln!(out, "quiver {} over F_{}: {} indecomposables", r.quiver.name, r.field, r.catalog_size)?;
            writeln!(out, "{:>4}  {:<8} {:<12} tags", "idx", "label", "dims")?;
            for e in &r.indecomposables {
                let tags: Vec<String> = [("P", e.projective), ("I", e.injective), ("S", e.simple)]
                    .iter()
                    .filter_map(|(t, v)| v.map(|v| format!("{t}{v}")))
                    .collect();
                writeln!(out, "{:>4}  {:<8} {:<12} {}", e.index, e.label, join(&e.dims), tags.join(","))?;
            }
            Ok(())
        }
    }
}

fn tri(v: Option<tiltcheck_core::TriState>) -> String {
    v.map(|t| serde_json::to_value(t).ok().and_then(|j| j.as_str().map(String::from)).unwrap_or_default()).unwrap_or_default()
}

fn write_table(out: &mut impl Write, fmt: Format, t: &VerdictTable) -> anyhow::Result<()> {
    #[derive(Serialize)]
    struct Row {
        id: usize,
        mask: String,
        t: String,
        size: usize,
        ext_projectives: String,
        finitely_generated: bool,
        serre_closed: bool,
        effaceable_yoneda: bool,
        effaceable_fiveterm: bool,
        condition4: String,
        chain_length: String,
        agree: bool,
        yoneda_gaps: String,
        fiveterm_missing: String,
        violation: String,
    }
    match fmt {
        Format::Json => write_json(out, t),
        Format::Csv => write_csv(
            out,
            t.torsion_classes.iter().map(|r| Row {
                id: r.id,
                mask: join(r.mask.iter()),
                t: r.t.join(" "),
                size: r.size,
                ext_projectives: join(r.ext_projectives.iter()),
                finitely_generated: r.finitely_generated,
                serre_closed: r.serre_closed,
                effaceable_yoneda: r.effaceable_yoneda,
                effaceable_fiveterm: r.effaceable_fiveterm,
                condition4: tri(r.condition4),
                chain_length: opt(r.chain_length),
                agree: r.agree,
                yoneda_gaps: join(r.yoneda_gaps.iter().map(|g| format!("{}:{}:{}", g.f, g.t, g.uncovered))),
                fiveterm_missing: join(&r.fiveterm_missing),
                violation: r.violation.clone().unwrap_or_default(),
            }),
        ),
        Format::Text => {
            let yn = |b: bool| if b { "yes" } else { "no" };
            writeln!(out, "quiver {} over F_{}: {} indecomposables, {} torsion classes", t.quiver.name, t.field, t.catalog_size, t.counts.classes)?;
            writeln!(out, "{:>4}  {:<28} {:>5} {:>6} {:>6} {:>6} {:>12} {:>5} {:>5}", "id", "T", "serre", "yoneda", "5term", "fg", "cond4", "chain", "agree")?;
            for r in &t.torsion_classes {
                let name = if r.t.is_empty() { "0".to_string() } else { r.t.join(",") };
                writeln!(
                    out,
                    "{:>4}  {:<28} {:>5} {:>6} {:>6} {:>6} {:>12} {:>5} {:>5}",
                    r.id,
                    name,
                    yn(r.serre_closed),
                    yn(r.effaceable_yoneda),
                    yn(r.effaceable_fiveterm),
                    yn(r.finitely_generated),
                    tri(r.condition4),
                    opt(r.chain_length),
                    yn(r.agree)
                )?;
                for g in &r.yoneda_gaps {
                    writeln!(out, "      gap: Ext1({}, {}) has {} uncovered dimension(s)", t.catalog[g.f].label, t.catalog[g.t].label, g.uncovered)?;
                }
                if let Some(v) = &r.violation {
                    writeln!(out, "      violation: {v}")?;
                }
            }
            writeln!(out, "passing {}, failing {}, agreement {}", t.counts.passing, t.counts.failing, yn(t.agreement))?;
            Ok(())
        }
    }
}

fn write_heart(out: &mut impl Write, fmt: Format, h: &HeartReport) -> anyhow::Result<()> {
    #[derive(Serialize)]
    struct Row<'a> {
        object: &'a str,
        projective: bool,
        simple_top_of: String,
    }
    let top_of = |o: &str| join(h.simple_tops.iter().filter(|s| s.top == o).map(|s| s.e.clone()));
    match fmt {
        Format::Json => write_json(out, h),
        Format::Csv => write_csv(
            out,
            h.indecomposables.iter().map(|o| Row { object: o, projective: h.projectives.contains(o), simple_top_of: top_of(o) }),
        ),
        Format::Text => {
            writeln!(out, "torsion class {}: T = {{{}}}, F = {{{}}}", h.id, h.t.join(", "), h.f.join(", "))?;
            writeln!(out, "heart indecomposables: {}", h.indecomposables.join(", "))?;
            writeln!(out, "projectives: {}", h.projectives.join(", "))?;
            for s in &h.simple_tops {
                writeln!(out, "simple top of {}: {} (End dim {}, self-orthogonal {})", s.e, s.top, s.end_dim, s.self_orthogonal)?;
            }
            Ok(())
        }
    }
}

fn write_reduce(out: &mut impl Write, fmt: Format, r: &ReduceReport) -> anyhow::Result<()> {
    #[derive(Serialize)]
    struct Row {
        level: usize,
        e: String,
        top: String,
        w: String,
        t_prime: String,
        ambient_effaceable: bool,
        induced_effaceable: bool,
        checks_pass: bool,
    }
    match fmt {
        Format::Json => write_json(out, r),
        Format::Csv => write_csv(
            out,
            r.steps.iter().map(|s| Row {
                level: s.step.level,
                e: s.e_label.clone(),
                top: s.top_label.clone(),
                w: s.w.join(" "),
                t_prime: s.t_prime.join(" "),
                ambient_effaceable: s.step.ambient_effaceable,
                induced_effaceable: s.step.induced_effaceable,
                checks_pass: s.step.checks.all_pass(),
            }),
        ),
        Format::Text => {
            writeln!(out, "torsion class {}: T = {{{}}}, serre closed: {}", r.id, r.t.join(", "), r.serre_closed)?;
            for s in &r.steps {
                writeln!(
                    out,
                    "level {}: E = {}, S = {}, W = {{{}}}, T' = {{{}}}, checks {}",
                    s.step.level,
                    s.e_label,
                    s.top_label,
                    s.w.join(", "),
                    s.t_prime.join(", "),
                    if s.step.checks.all_pass() { "pass" } else { "FAIL" }
                )?;
            }
            if let Some(v) = &r.violation {
                writeln!(out, "violation: {v}")?;
            }
            Ok(())
        }
    }
}
