use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hsm_core::constants::{self, ConstantChain};
use hsm_core::forms::{self, DescentOptions, FormParams, HardyWeight};
use hsm_core::geometry::{load_domain_file, DomainSpec};
use hsm_core::io::{self, Cell, RunManifest, Table};
use hsm_core::oned::{self, CorpusEntry};
use hsm_core::sphere::{self, SphereQuadrature, WeightField};
use hsm_core::{spectral, Error, Grid};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_VIOLATION: u8 = 4;

#[derive(Parser)]
#[command(name = "hsm", version, about = "Hardy-type inequality and weighted spectral bound checks")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Davies weight D_p on the active nodes of a grid.
    Weight(WeightArgs),
    /// One-dimensional ratio checks against (q+2)^2.
    #[command(name = "verify-1d")]
    Verify1d(Verify1dArgs),
    /// Forms and quotients of smooth test functions.
    Quotient(QuotientArgs),
    /// Gradient descent on a quotient.
    Minimize(MinimizeArgs),
    /// Negative spectrum of a weighted Schrodinger operator against its bound.
    Spectrum(SpectrumArgs),
    /// Constant chain for a dimension.
    Constants(ConstantsArgs),
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long)]
    h: f64,
    /// Sphere resolution: `M` for N = 2, `GL,AZ` for N = 3.
    #[arg(long, value_delimiter = ',')]
    resolution: Option<Vec<usize>>,
}

#[derive(Args)]
struct Verify1dArgs {
    /// Corpus spec; the built-in 100-function corpus when absent.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Comma-separated exponents q.
    #[arg(long, default_value = "2,3,4,6,10")]
    q: String,
    /// Comma-separated gradient powers p.
    #[arg(long, default_value = "2")]
    p: String,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum WeightChoice {
    Davies,
    Euclidean,
    None,
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    h: f64,
    #[arg(long, value_enum, default_value = "davies")]
    weight: WeightChoice,
    /// Sphere resolution for the Davies weight; N = 3 defaults to 32,64.
    #[arg(long, value_delimiter = ',')]
    resolution: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
}

#[derive(Args)]
struct QuotientArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Lebesgue exponent; the Sobolev exponent for N >= 3, 4 otherwise.
    #[arg(long)]
    q: Option<f64>,
    /// Number of smooth test functions.
    #[arg(long, default_value_t = 10)]
    count: usize,
}

#[derive(Args)]
struct MinimizeArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    q: Option<f64>,
    /// Minimize the Hardy ratio instead of the quotient.
    #[arg(long)]
    hardy_ratio: bool,
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    /// Index of the starting function in the seeded smooth corpus.
    #[arg(long, default_value_t = 0)]
    profile: usize,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// `const:c`, `well:depth:radius[:x,..]`, `bump:depth:radius[:x,..]` or `file:path`.
    #[arg(long)]
    potential: String,
    /// Riesz exponent for N = 1, 2.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Bound constant; the chain constant when absent.
    #[arg(long)]
    constant: Option<f64>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long = "N")]
    dim: usize,
    /// Interpolation exponent for N = 1, 2.
    #[arg(long)]
    q: Option<f64>,
    /// Riesz exponent for the Lieb-Thirring constant.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InfiniteWeight { .. }
            | Error::MissingWeight { .. }
            | Error::TooCloseToBoundary { .. }
            | Error::ZeroNorm
            | Error::NegativeForm { .. }
            | Error::NonpositiveForm { .. }
            | Error::NonFinite { .. }
            | Error::FactorizationBreakdown { .. }
            | Error::Eigen(_)
            | Error::SearchFailed => EXIT_NUMERIC,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: msg.into() }
}

type CmdResult = Result<u8, Failure>;

struct Ctx {
    seed: u64,
    threads: usize,
    out: Option<PathBuf>,
    start: Instant,
}

impl Ctx {
    fn manifest(&self, sub: &str) -> RunManifest {
        RunManifest::new(sub, self.seed, self.threads)
    }

    fn sink(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.out {
            Some(p) => Box::new(std::fs::File::create(p).map_err(|e| usage(format!("{}: {e}", p.display())))?),
            None => Box::new(std::io::stdout().lock()),
        })
    }

    fn emit_csv(&self, mut manifest: RunManifest, table: &Table) -> Result<(), Failure> {
        manifest.wall_time_s = Some(self.start.elapsed().as_secs_f64());
        io::write_csv(self.sink()?, &manifest, table)?;
        Ok(())
    }

    fn emit_json(&self, mut manifest: RunManifest, mut body: serde_json::Value) -> Result<(), Failure> {
        manifest.wall_time_s = Some(self.start.elapsed().as_secs_f64());
        body["manifest"] = serde_json::to_value(&manifest).map_err(|e| usage(e.to_string()))?;
        let mut w = self.sink()?;
        serde_json::to_writer_pretty(&mut w, &body).map_err(|e| usage(e.to_string()))?;
        writeln!(w).map_err(|e| usage(e.to_string()))?;
        Ok(())
    }
}

fn load_domain(path: &Path) -> Result<DomainSpec, Failure> {
    load_domain_file(path).map_err(|e| Failure { message: format!("{}: {e}", path.display()), ..e.into() })
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    let items: Vec<&str> = s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    if items.is_empty() {
        return Err(usage(format!("empty {what} list")));
    }
    items
        .iter()
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(usage(format!("invalid {what} value {t:?}"))),
        })
        .collect()
}

fn quadrature(dim: usize, resolution: &Option<Vec<usize>>, fallback_3d: Option<[usize; 2]>) -> Result<SphereQuadrature, Failure> {
    Ok(match (resolution, fallback_3d) {
        (Some(r), _) => SphereQuadrature::new(dim, r)?,
        (None, Some(r)) if dim == 3 => SphereQuadrature::new(3, &r)?,
        _ => SphereQuadrature::default_for(dim)?,
    })
}

fn coords(grid: &Grid, node: usize) -> Vec<Cell> {
    grid.coords(node).into_iter().map(Cell::Num).collect()
}

fn cmd_weight(ctx: &Ctx, a: &WeightArgs) -> CmdResult {
    let spec = load_domain(&a.domain)?;
    let dim = spec.domain.dim();
    let quad = quadrature(dim, &a.resolution, None)?;
    let grid = Grid::new(&spec.domain, a.h)?;
    let field = sphere::weight_field(&spec.domain, grid.clone(), a.p, &quad)?;
    let mut m = ctx.manifest("weight");
    m.input("domain", &spec.sha256)
        .param("p", a.p)
        .param("h", a.h)
        .param("resolution", fmt_res(quad.resolution()));
    let mut cols = vec!["node".to_string()];
    cols.extend((1..=dim).map(|i| format!("x{i}")));
    cols.push("D".into());
    let mut table = Table::new(&cols.iter().map(String::as_str).collect::<Vec<_>>());
    for node in grid.active_nodes() {
        if let Some(d) = field.get(*node) {
            let mut row = vec![Cell::Int(*node as i64)];
            row.extend(coords(&grid, *node));
            row.push(Cell::Num(d));
            table.push(row);
        }
    }
    ctx.emit_csv(m, &table)?;
    Ok(0)
}

fn fmt_res(r: &[usize]) -> String {
    r.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

fn cmd_verify1d(ctx: &Ctx, a: &Verify1dArgs) -> CmdResult {
    let qs = parse_list(&a.q, "q")?;
    let ps = parse_list(&a.p, "p")?;
    if let Some(p) = ps.iter().find(|p| **p < 2.0) {
        return Err(usage(format!("p must be >= 2, got {p}")));
    }
    let mut m = ctx.manifest("verify-1d");
    let corpus: Vec<CorpusEntry> = match &a.corpus {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            m.input("corpus", &io::sha256_hex(text.as_bytes()));
            oned::parse_corpus_spec(&text).map_err(|e| Failure { message: format!("{}: {e}", path.display()), ..e.into() })?
        }
        None => {
            m.param("corpus", "default");
            oned::default_corpus()
        }
    };
    m.param("q", &a.q).param("p", &a.p);
    let mut table = Table::new(&["id", "p", "q", "ratio", "t_star", "bound", "margin", "status"]);
    let (mut nonpositive, mut violations, mut numeric) = (Vec::new(), 0usize, None);
    for e in &corpus {
        for &p in &ps {
            let valid: Vec<f64> = qs.iter().copied().filter(|q| *q >= p).collect();
            if valid.len() < qs.len() {
                eprintln!("note: skipping q < p = {p}");
            }
            let results = oned::keyp_ratios(&e.function, p, &valid)?;
            for (q, r) in valid.iter().zip(results) {
                let head = vec![Cell::Text(e.id.clone()), Cell::Num(p), Cell::Num(*q)];
                let tail = match r {
                    Ok(r) if p == 2.0 => {
                        let bound = oned::key_bound(*q);
                        let margin = bound - r.ratio;
                        if margin < 0.0 {
                            violations += 1;
                        }
                        let status = if margin < 0.0 { "violation" } else { "ok" };
                        vec![Cell::Num(r.ratio), Cell::Num(r.t_star), Cell::Num(bound), Cell::Num(margin), Cell::Text(status.into())]
                    }
                    Ok(r) => vec![Cell::Num(r.ratio), Cell::Num(r.t_star), Cell::Text("".into()), Cell::Text("".into()), Cell::Text("reported".into())],
                    Err(Error::NonpositiveForm { .. }) => {
                        if nonpositive.last() != Some(&e.id) {
                            nonpositive.push(e.id.clone());
                        }
                        vec![Cell::Text("".into()), Cell::Text("".into()), Cell::Text("".into()), Cell::Text("".into()), Cell::Text("nonpositive-form".into())]
                    }
                    Err(err) => {
                        numeric.get_or_insert_with(|| format!("{}: {err}", e.id));
                        vec![Cell::Text("".into()), Cell::Text("".into()), Cell::Text("".into()), Cell::Text("".into()), Cell::Text("error".into())]
                    }
                };
                table.push(head.into_iter().chain(tail).collect());
            }
        }
    }
    if table.rows.is_empty() {
        return Err(usage("no (p, q) pair with q >= p"));
    }
    ctx.emit_csv(m, &table)?;
    if !nonpositive.is_empty() {
        eprintln!("nonpositive form: {}", nonpositive.join(", "));
        return Ok(EXIT_VIOLATION);
    }
    if violations > 0 {
        eprintln!("{violations} ratios exceed (q+2)^2");
        return Ok(EXIT_VIOLATION);
    }
    if let Some(msg) = numeric {
        return Err(Failure { code: EXIT_NUMERIC, message: msg });
    }
    Ok(0)
}

struct Field {
    spec: DomainSpec,
    grid: Arc<Grid>,
    weight: WeightField,
    params: FormParams,
}

fn build_field(a: &FieldArgs, m: &mut RunManifest, p: f64) -> Result<Field, Failure> {
    let spec = load_domain(&a.domain)?;
    let grid = Grid::new(&spec.domain, a.h)?;
    let dim = spec.domain.dim();
    m.input("domain", &spec.sha256).param("h", a.h).param("epsilon", a.epsilon);
    let (weight, hardy) = match a.weight {
        WeightChoice::Davies => {
            let quad = quadrature(dim, &a.resolution, Some([32, 64]))?;
            m.param("weight", "davies").param("resolution", fmt_res(quad.resolution()));
            (sphere::weight_field(&spec.domain, grid.clone(), p, &quad)?, HardyWeight::Davies)
        }
        WeightChoice::Euclidean => {
            m.param("weight", "euclidean");
            (WeightField::euclidean(grid.clone(), p), HardyWeight::Euclidean)
        }
        WeightChoice::None => {
            m.param("weight", "none");
            (WeightField::euclidean(grid.clone(), p), HardyWeight::None)
        }
    };
    let params = FormParams { p, epsilon: a.epsilon, hardy };
    params.validate()?;
    Ok(Field { spec, grid, weight, params })
}

fn default_q(dim: usize, q: Option<f64>) -> f64 {
    q.unwrap_or(if dim >= 3 { 2.0 * dim as f64 / (dim as f64 - 2.0) } else { 4.0 })
}

fn cmd_quotient(ctx: &Ctx, a: &QuotientArgs) -> CmdResult {
    let mut m = ctx.manifest("quotient");
    let f = build_field(&a.field, &mut m, 2.0)?;
    let dim = f.grid.dim();
    let q = default_q(dim, a.q);
    m.param("q", q).param("count", a.count);
    let mut table = Table::new(&["profile", "gradient", "hardy", "form", "quotient"]);
    for (i, prof) in forms::smooth_corpus(&f.spec.domain, a.count, ctx.seed).iter().enumerate() {
        let u = prof.sample(f.grid.clone());
        let grad = forms::gradient_power_integral(&u, 2.0);
        let hardy = forms::hardy_integral(&u, &f.weight, 2.0)?;
        let form = forms::hsm_form(&u, &f.weight, &f.params)?;
        let quotient = forms::hsm_quotient(&u, &f.weight, &f.params, q)?;
        table.push(vec![Cell::Int(i as i64), Cell::Num(grad), Cell::Num(hardy), Cell::Num(form), Cell::Num(quotient)]);
    }
    ctx.emit_csv(m, &table)?;
    Ok(0)
}

fn cmd_minimize(ctx: &Ctx, a: &MinimizeArgs) -> CmdResult {
    let mut m = ctx.manifest("minimize");
    let f = build_field(&a.field, &mut m, 2.0)?;
    let corpus = forms::smooth_corpus(&f.spec.domain, a.profile + 1, ctx.seed);
    let init = corpus
        .get(a.profile)
        .ok_or_else(|| usage("the smooth corpus is empty for this domain"))?
        .sample(f.grid.clone());
    if init.values().iter().all(|v| *v == 0.0) {
        return Err(Failure {
            code: EXIT_NUMERIC,
            message: format!("profile {} vanishes on this grid; refine h or pick another profile", a.profile),
        });
    }
    let opts = DescentOptions { iterations: a.iterations, ..Default::default() };
    m.param("iterations", a.iterations).param("profile", a.profile);
    let run = if a.hardy_ratio {
        m.param("objective", "hardy-ratio");
        forms::minimize_hardy_ratio(&init, &f.weight, &opts)?
    } else {
        let q = default_q(f.grid.dim(), a.q);
        m.param("objective", "quotient").param("q", q);
        forms::minimize_quotient(&init, &f.weight, &f.params, q, &opts)?
    };
    let mut table = Table::new(&["iteration", "quotient", "step"]);
    for r in &run.trace {
        table.push(vec![Cell::Int(r.iteration as i64), Cell::Num(r.quotient), Cell::Num(r.step)]);
    }
    ctx.emit_csv(m, &table)?;
    Ok(0)
}

fn cmd_spectrum(ctx: &Ctx, a: &SpectrumArgs) -> CmdResult {
    let mut m = ctx.manifest("spectrum");
    let f = build_field(&a.field, &mut m, 2.0)?;
    let dim = f.grid.dim();
    let pspec = io::parse_potential_spec(&a.potential)?;
    if let io::PotentialSpec::File(path) = &pspec {
        let bytes = std::fs::read(path).map_err(|e| usage(format!("{path}: {e}")))?;
        m.input("potential", &io::sha256_hex(&bytes));
    }
    m.param("potential", &a.potential);
    let v = pspec.build(&f.grid)?;
    let weight = (a.field.weight != WeightChoice::None).then_some(&f.weight);
    let (kind, l, report) = if dim >= 3 {
        let l = match a.constant {
            Some(l) => l,
            None => ConstantChain::sobolev(dim)?.ln.expect("sobolev chain has L_N"),
        };
        let op = spectral::assemble(&f.grid, weight, Some(&v), a.field.epsilon)?;
        let c = spectral::count_negative(&op)?;
        let bound = l * v.negative_part_integral(dim as f64 / 2.0);
        let report = spectral::SpectralReport {
            count: c.count,
            indeterminate: c.indeterminate,
            eigenvalues: None,
            statistic: c.count as f64,
            bound,
            slack: bound - c.count as f64,
            method: c.method,
        };
        ("clr", l, report)
    } else {
        let l = match a.constant {
            Some(l) => l,
            None => constants::hlt_chain_constant(dim, a.gamma)?.0,
        };
        m.param("gamma", a.gamma);
        let op = spectral::assemble(&f.grid, weight, Some(&v), a.field.epsilon)?;
        let ev = spectral::negative_eigenvalues(&op)?;
        let moment: f64 = ev.iter().map(|e| e.abs().powf(a.gamma)).sum();
        let bound = l * v.negative_part_integral(a.gamma + dim as f64 / 2.0);
        let report = spectral::SpectralReport {
            count: ev.len(),
            indeterminate: 0,
            eigenvalues: Some(ev),
            statistic: moment,
            bound,
            slack: bound - moment,
            method: spectral::Method::Dense,
        };
        ("hlt", l, report)
    };
    m.param("constant", l);
    if report.indeterminate > 0 {
        return Err(Failure {
            code: EXIT_NUMERIC,
            message: format!("{} eigenvalues too close to zero to classify", report.indeterminate),
        });
    }
    let violated = report.slack < 0.0;
    let body = serde_json::json!({
        "dim": dim,
        "bound_kind": kind,
        "constant": l,
        "report": report,
    });
    ctx.emit_json(m, body)?;
    Ok(if violated { EXIT_VIOLATION } else { 0 })
}

fn cmd_constants(ctx: &Ctx, a: &ConstantsArgs) -> CmdResult {
    let mut m = ctx.manifest("constants");
    m.param("N", a.dim).param("gamma", a.gamma);
    if a.dim == 0 {
        return Err(usage("N must be >= 1"));
    }
    let mut table = Table::new(&["quantity", "value", "formula"]);
    let mut add = |name: &str, v: f64, formula: &str| {
        table.push(vec![Cell::Text(name.into()), Cell::Num(v), Cell::Text(formula.into())]);
    };
    let push_chain = |c: &ConstantChain, add: &mut dyn FnMut(&str, f64, &str)| {
        let formula = |field: &str| {
            c.provenance.iter().find(|p| p.field == field).map(|p| p.formula).unwrap_or("")
        };
        add("q", c.q, formula("q"));
        if let Some(v) = c.cq {
            add("C_q", v, formula("C_q"));
        }
        if let Some(v) = c.kn {
            add("K_N", v, formula("K_N"));
        }
        if let Some(v) = c.ln {
            add("L_N", v, formula("L_N"));
        }
        add("theta", c.theta, formula("theta"));
        add("gamma", c.gamma, formula("gamma"));
        add("kappa", c.kappa, formula("kappa"));
        if let Some(v) = c.s {
            add("S", v, formula("S"));
        }
        if let Some(v) = c.lt {
            add("L_gamma", v, formula("L_gamma"));
        }
    };
    if a.dim >= 3 {
        push_chain(&ConstantChain::sobolev(a.dim)?, &mut add);
    } else {
        if let Some(q) = a.q {
            m.param("q", q);
            push_chain(&ConstantChain::interpolation(a.dim, q, Some(a.gamma))?, &mut add);
        }
        let (l, q) = constants::hlt_chain_constant(a.dim, a.gamma)?;
        add("L_hlt", l, "minimum over q of the interpolation chain");
        add("q_hlt", q, "minimizing q");
    }
    ctx.emit_csv(m, &table)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    let ctx = Ctx { seed: cli.seed, threads: rayon::current_num_threads(), out: cli.out, start: Instant::now() };
    let result = match &cli.command {
        Command::Weight(a) => cmd_weight(&ctx, a),
        Command::Verify1d(a) => cmd_verify1d(&ctx, a),
        Command::Quotient(a) => cmd_quotient(&ctx, a),
        Command::Minimize(a) => cmd_minimize(&ctx, a),
        Command::Spectrum(a) => cmd_spectrum(&ctx, a),
        Command::Constants(a) => cmd_constants(&ctx, a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
