mod cache;
mod error;
mod expr;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use powercount::arith::gcd;
use powercount::counting::{
    as_natural, closed_form, enumerate_count_bounded, enumerate_records, CountFamily, CountQuery, FormulaVariant,
    DEFAULT_ENUMERATION_BOUND,
};
use powercount::genfun::{generating_function, GfRequest, GfResult, GroupFamily, Statistic, Weighting};
use powercount::oracle::{build_group_with, BuildMethod, FormFamily, FormSpec, GroupTable, DEFAULT_SEED};
use powercount::powerclass::{companion_power_charpoly, multiplicity_semigroup};
use powercount::series::{RationalSeries, DEFAULT_ORDER};
use powercount::{Error, FieldCtx};

use crate::cache::{Cache, CacheRecord};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "powercount", version, about = "M-th powers in finite symplectic and orthogonal groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Neither read nor write the classification cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true, env = "POWERCOUNT_CACHE", default_value = "powercount-cache.txt")]
    cache_file: PathBuf,
    /// Seed for the random generators used to build large groups.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Largest number of candidate polynomials an enumeration may test.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_BOUND)]
    bound: u64,
    #[arg(long, global = true, default_value = "corrected")]
    formula_variant: FormulaVariant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CacheAction {
    Show,
    Clear,
    Verify,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a polynomial over F_q.
    Factor {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        poly: String,
    },
    /// Report power data for each irreducible factor of a polynomial.
    Classify {
        #[arg(long)]
        q: u64,
        #[arg(long = "M", default_value_t = 1)]
        m: u64,
        #[arg(long)]
        poly: String,
    },
    /// Closed-form polynomial counts, optionally against enumeration.
    Count {
        #[arg(long)]
        family: CountFamily,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[arg(long = "M", value_delimiter = ',', default_value = "1")]
        m: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        degree: Vec<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        e: Option<u64>,
        #[arg(long)]
        verify: bool,
    },
    /// Generating function as a truncated series.
    Series {
        #[arg(long)]
        group: GroupFamily,
        #[arg(long)]
        stat: Statistic,
        #[arg(long, default_value = "prob")]
        weight: Weighting,
        #[arg(long)]
        q: u64,
        #[arg(long = "M", default_value_t = 1)]
        m: u64,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
    },
    /// Compare series coefficients with brute-force group data.
    Verify {
        #[arg(long)]
        group: GroupFamily,
        #[arg(long)]
        q: u64,
        #[arg(long = "M", value_delimiter = ',', default_value = "1,2,3")]
        m: Vec<u64>,
        /// Half dimensions to check; `O` also checks odd dimension `2n + 1`.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "separable,semisimple,cyclic,regular")]
        stat: Vec<Statistic>,
        #[arg(long, value_delimiter = ',', default_value = "prob,classes")]
        weight: Vec<Weighting>,
    },
    /// List classified polynomials of one degree, or the elements of a small group.
    Enumerate {
        #[arg(long)]
        q: u64,
        #[arg(long = "M", value_delimiter = ',', default_value = "1")]
        m: Vec<u64>,
        #[arg(long, conflicts_with = "group")]
        degree: Option<u64>,
        /// Self-reciprocal irreducibles only.
        #[arg(long, requires = "degree")]
        srim: bool,
        /// One of sp, o+, o-, o0.
        #[arg(long, requires = "dim")]
        group: Option<FormFamily>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Inspect, clear or audit the classification cache.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
    },
}

struct Ctx {
    format: Format,
    seed: u64,
    bound: u64,
    variant: FormulaVariant,
    cache: Cache,
    out: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache = if cli.no_cache {
        Ok(Cache::disabled())
    } else {
        Cache::open(&cli.cache_file)
    };
    let result = cache.and_then(|cache| {
        let mut ctx = Ctx {
            format: cli.format,
            seed: cli.seed,
            bound: cli.bound,
            variant: cli.formula_variant,
            cache,
            out: String::new(),
        };
        let status = run(&mut ctx, cli.command);
        print!("{}", ctx.out);
        ctx.cache.save().and(status)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(ctx: &mut Ctx, command: Command) -> Result<(), CliError> {
    match command {
        Command::Factor { q, poly } => factor(ctx, q, &poly),
        Command::Classify { q, m, poly } => classify(ctx, q, m, &poly),
        Command::Count { family, q, m, degree, k, e, verify } => count(ctx, family, &q, &m, &degree, k, e, verify),
        Command::Series { group, stat, weight, q, m, order } => series(ctx, group, stat, weight, q, m, order),
        Command::Verify { group, q, m, n, stat, weight } => verify(ctx, group, q, &m, &n, &stat, &weight),
        Command::Enumerate { q, m, degree, srim, group, dim } => match (degree, group, dim) {
            (Some(d), None, _) => enumerate_polys(ctx, q, &m, d, srim),
            (None, Some(g), Some(dim)) => enumerate_group(ctx, g, dim, q, &m),
            _ => Err(CliError::Usage("enumerate needs --degree or --group with --dim".into())),
        },
        Command::Cache { action } => cache_command(ctx, action),
    }
}

fn field(q: u64) -> Result<powercount::gfq::Field, CliError> {
    Ok(FieldCtx::of_order(q)?)
}

fn csv_line(out: &mut String, fields: &[String]) {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(fields).expect("writing to memory");
    let bytes = w.into_inner().expect("writing to memory");
    out.push_str(std::str::from_utf8(&bytes).expect("fields are utf-8"));
}

fn emit_json(ctx: &mut Ctx, v: &Value) {
    ctx.out.push_str(&serde_json::to_string_pretty(v).expect("json values serialize"));
    ctx.out.push('\n');
}

fn factor(ctx: &mut Ctx, q: u64, poly: &str) -> Result<(), CliError> {
    let f = expr::parse_poly(&field(q)?, poly)?;
    let fac = f.factorize()?;
    match ctx.format {
        Format::Text => {
            for (g, mult) in &fac.factors {
                let suffix = if *mult > 1 { format!("^{mult}") } else { String::new() };
                writeln!(ctx.out, "({g}){suffix}").unwrap();
            }
        }
        Format::Json => {
            let factors: Vec<Value> = fac
                .factors
                .iter()
                .map(|(g, mult)| json!({"factor": g.to_string(), "text": g.to_text(), "degree": g.degree(), "multiplicity": mult}))
                .collect();
            emit_json(ctx, &json!({"q": q, "poly": f.to_text(), "factors": factors}));
        }
        Format::Csv => {
            csv_line(&mut ctx.out, &["degree", "multiplicity", "factor", "text"].map(String::from));
            for (g, mult) in &fac.factors {
                csv_line(&mut ctx.out, &[g.degree().to_string(), mult.to_string(), g.to_string(), g.to_text()]);
            }
        }
    }
    Ok(())
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn classify(ctx: &mut Ctx, q: u64, m: u64, poly: &str) -> Result<(), CliError> {
    let f = expr::parse_poly(&field(q)?, poly)?;
    let fac = f.factorize()?;
    let mut rows = Vec::new();
    for (g, _) in &fac.factors {
        if g.is_x() {
            return Err(CliError::Usage(format!("{f} has the factor x, which is not invertible")));
        }
        let rec = ctx.cache.classify(g, m)?;
        let companion = companion_power_charpoly(g, m)?.to_string();
        let generators = match multiplicity_semigroup(g, m) {
            Ok(gens) => Some(gens),
            Err(Error::AlreadyMPower) => None,
            Err(e) => return Err(e.into()),
        };
        rows.push((g.clone(), rec, companion, generators));
    }
    let yes = |b: bool| if b { "yes" } else { "no" };
    match ctx.format {
        Format::Text => {
            for (g, rec, companion, gens) in &rows {
                writeln!(ctx.out, "{}  {g}", rec.poly).unwrap();
                writeln!(ctx.out, "  degree {}, exponent {}, SRIM {}", rec.degree, rec.exponent, yes(g.is_srim())).unwrap();
                writeln!(ctx.out, "  M-power: {}", yes(rec.m_power)).unwrap();
                writeln!(ctx.out, "  M*-power: {}", yes(rec.mstar_power)).unwrap();
                writeln!(ctx.out, "  factor degrees of f(x^{m}): {}", join(&rec.spectrum, " ")).unwrap();
                let deg = if rec.degenerate.is_empty() { "none".to_string() } else { join(&rec.degenerate, " ") };
                writeln!(ctx.out, "  degenerate for n: {deg}").unwrap();
                writeln!(ctx.out, "  charpoly of C^{m}: {companion}").unwrap();
                if let Some(gens) = gens {
                    writeln!(ctx.out, "  multiplicity generators: {{{}}}", join(gens, ", ")).unwrap();
                }
            }
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(g, rec, companion, gens)| {
                    let mut v = serde_json::to_value(rec).expect("records serialize");
                    v["expression"] = json!(g.to_string());
                    v["srim"] = json!(g.is_srim());
                    v["companion_charpoly"] = json!(companion);
                    v["multiplicity_generators"] = json!(gens);
                    v
                })
                .collect();
            emit_json(ctx, &Value::Array(items));
        }
        Format::Csv => {
            let header = ["poly", "degree", "exponent", "srim", "m_power", "mstar_power", "spectrum", "degenerate", "companion_charpoly"];
            csv_line(&mut ctx.out, &header.map(String::from));
            for (g, rec, companion, _) in &rows {
                csv_line(
                    &mut ctx.out,
                    &[
                        rec.poly.clone(),
                        rec.degree.to_string(),
                        rec.exponent.to_string(),
                        g.is_srim().to_string(),
                        rec.m_power.to_string(),
                        rec.mstar_power.to_string(),
                        join(&rec.spectrum, " "),
                        join(&rec.degenerate, " "),
                        companion.clone(),
                    ],
                );
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn count(
    ctx: &mut Ctx,
    family: CountFamily,
    qs: &[u64],
    ms: &[u64],
    degrees: &[u64],
    k: Option<u64>,
    e: Option<u64>,
    verify: bool,
) -> Result<(), CliError> {
    let mut queries = Vec::new();
    for &q in qs {
        for &m in ms {
            if gcd(m, q) != 1 && qs.len() * ms.len() > 1 {
                continue;
            }
            for &degree in degrees {
                queries.push(CountQuery { family, q, m, degree, k, e });
            }
        }
    }
    let mut rows = Vec::new();
    let mut mismatches = 0;
    for query in &queries {
        let formula = closed_form(query, ctx.variant)?;
        let counted = if verify { Some(enumerate_count_bounded(query, ctx.bound)?) } else { None };
        let agrees = counted.map(|c| as_natural(&formula) == Some(c));
        if agrees == Some(false) {
            mismatches += 1;
        }
        rows.push((query, formula, counted, agrees));
    }
    match ctx.format {
        Format::Text => {
            for (query, formula, counted, agrees) in &rows {
                write!(ctx.out, "{query} = {formula} [{}]", ctx.variant).unwrap();
                if let (Some(c), Some(ok)) = (counted, agrees) {
                    write!(ctx.out, "  enumeration = {c} {}", if *ok { "ok" } else { "MISMATCH" }).unwrap();
                }
                ctx.out.push('\n');
            }
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(query, formula, counted, agrees)| {
                    json!({
                        "family": query.family.name(), "q": query.q, "M": query.m, "degree": query.degree,
                        "k": query.k, "e": query.e, "variant": ctx.variant.to_string(),
                        "formula": formula.to_string(), "enumeration": counted, "agrees": agrees,
                    })
                })
                .collect();
            emit_json(ctx, &Value::Array(items));
        }
        Format::Csv => {
            csv_line(&mut ctx.out, &["family", "q", "M", "degree", "k", "e", "variant", "formula", "enumeration", "agrees"].map(String::from));
            let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
            for (query, formula, counted, agrees) in &rows {
                csv_line(
                    &mut ctx.out,
                    &[
                        query.family.name().to_string(),
                        query.q.to_string(),
                        query.m.to_string(),
                        query.degree.to_string(),
                        opt(query.k),
                        opt(query.e),
                        ctx.variant.to_string(),
                        formula.to_string(),
                        opt(*counted),
                        agrees.map(|a| a.to_string()).unwrap_or_default(),
                    ],
                );
            }
        }
    }
    if mismatches > 0 {
        return Err(CliError::Mismatch(format!("{mismatches} closed forms differ from enumeration")));
    }
    Ok(())
}

fn series_csv(out: &mut String, component: &str, s: &RationalSeries) {
    for (i, c) in s.coeffs().iter().enumerate() {
        csv_line(out, &[component.to_string(), i.to_string(), c.numer().to_string(), c.denom().to_string()]);
    }
}

fn series(ctx: &mut Ctx, group: GroupFamily, stat: Statistic, weight: Weighting, q: u64, m: u64, order: usize) -> Result<(), CliError> {
    let req = GfRequest::new(group, stat, weight, q, m, order)?;
    let result = generating_function(&req)?;
    match (ctx.format, &result) {
        (Format::Text, GfResult::Sp(s)) => writeln!(ctx.out, "{s}").unwrap(),
        (Format::Text, GfResult::O(t)) => {
            if t.split {
                writeln!(ctx.out, "O+: {}\nO-: {}", t.plus, t.minus).unwrap();
            } else {
                writeln!(ctx.out, "O+ and O- combined: {}", t.plus).unwrap();
            }
            writeln!(ctx.out, "O0: {}", t.zero).unwrap();
        }
        (Format::Json, GfResult::Sp(s)) => emit_json(ctx, &json!(s.to_json())),
        (Format::Json, GfResult::O(t)) => emit_json(
            ctx,
            &json!({"plus": t.plus.to_json(), "minus": t.minus.to_json(), "zero": t.zero.to_json(), "split": t.split}),
        ),
        (Format::Csv, _) => {
            csv_line(&mut ctx.out, &["component", "power", "num", "den"].map(String::from));
            match &result {
                GfResult::Sp(s) => series_csv(&mut ctx.out, "sp", s),
                GfResult::O(t) => {
                    series_csv(&mut ctx.out, if t.split { "plus" } else { "plus+minus" }, &t.plus);
                    if t.split {
                        series_csv(&mut ctx.out, "minus", &t.minus);
                    }
                    series_csv(&mut ctx.out, "zero", &t.zero);
                }
            }
        }
    }
    Ok(())
}

struct VerifyRow {
    group: String,
    m: u64,
    stat: Statistic,
    weight: Weighting,
    n: usize,
    series: BigRational,
    oracle: BigRational,
    diagnostics: Vec<String>,
}

fn build(ctx: &Ctx, family: FormFamily, dim: usize, q: u64) -> Result<GroupTable, CliError> {
    Ok(build_group_with(&FormSpec::new(family, dim, q)?, BuildMethod::Auto, ctx.seed)?)
}

fn class_diagnostics(table: &GroupTable, stat: Statistic, m: u64) -> Result<Vec<String>, CliError> {
    let profiles = table.class_profiles()?;
    let flags = table.class_power_flags(m);
    Ok(table
        .classes()
        .iter()
        .zip(profiles)
        .filter(|(c, p)| flags[c.id] && p.has(stat) == Some(true))
        .map(|(c, p)| format!("{} class {} size {} charpoly {}", table.spec(), c.id, c.size, p.charpoly))
        .collect())
}

fn verify(
    ctx: &mut Ctx,
    group: GroupFamily,
    q: u64,
    ms: &[u64],
    ns: &[usize],
    stats: &[Statistic],
    weights: &[Weighting],
) -> Result<(), CliError> {
    let tampered = ctx.cache.audit();
    for (rec, fresh) in &tampered {
        let fresh = match fresh {
            Ok(r) => serde_json::to_string(r).expect("records serialize"),
            Err(e) => e.clone(),
        };
        writeln!(ctx.out, "cache record {} M={} disagrees with recomputation: {fresh}", rec.poly, rec.m).unwrap();
    }
    let order = ns.iter().copied().max().unwrap_or(1);
    let mut tables: Vec<(usize, FormFamily, GroupTable)> = Vec::new();
    for &n in ns {
        let families: &[(FormFamily, usize)] = match group {
            GroupFamily::Sp => &[(FormFamily::Sp, 2 * n)],
            GroupFamily::O => &[(FormFamily::Oplus, 2 * n), (FormFamily::Ominus, 2 * n), (FormFamily::Oodd, 2 * n + 1)],
        };
        for &(family, dim) in families {
            tables.push((n, family, build(ctx, family, dim, q)?));
        }
    }
    let mut rows = Vec::new();
    for &m in ms.iter().filter(|&&m| gcd(m, q) == 1) {
        for &stat in stats {
            for &weight in weights {
                let req = GfRequest::new(group, stat, weight, q, m, order)?;
                let result = generating_function(&req)?;
                for (n, family, table) in &tables {
                    let observed = table.empirical(stat, m)?.value(weight);
                    let (coeff, oracle, label) = match &result {
                        GfResult::Sp(s) => (s.coeff(*n), observed, table.spec().to_string()),
                        GfResult::O(t) => match family {
                            FormFamily::Oodd => (t.zero.coeff(*n), observed, table.spec().to_string()),
                            FormFamily::Oplus if t.split => (t.plus.coeff(*n), observed, table.spec().to_string()),
                            FormFamily::Ominus if t.split => (t.minus.coeff(*n), observed, table.spec().to_string()),
                            FormFamily::Ominus => continue,
                            _ => {
                                let (_, _, minus) = tables
                                    .iter()
                                    .find(|(k, f, _)| k == n && *f == FormFamily::Ominus)
                                    .expect("both even types are built");
                                let other = minus.empirical(stat, m)?.value(weight);
                                (t.plus.coeff(*n), observed + other, format!("O±({},{q})", 2 * n))
                            }
                        },
                    };
                    let diagnostics = if coeff == oracle { Vec::new() } else { class_diagnostics(table, stat, m)? };
                    rows.push(VerifyRow { group: label, m, stat, weight, n: *n, series: coeff, oracle, diagnostics });
                }
            }
        }
    }
    let failures = rows.iter().filter(|r| r.series != r.oracle).count();
    match ctx.format {
        Format::Text => {
            for r in &rows {
                let status = if r.series == r.oracle { "pass" } else { "FAIL" };
                writeln!(
                    ctx.out,
                    "{status} {} M={} {} {} u^{}: series {} oracle {}",
                    r.group, r.m, r.stat.name(), r.weight.name(), r.n, r.series, r.oracle
                )
                .unwrap();
                for d in &r.diagnostics {
                    writeln!(ctx.out, "    {d}").unwrap();
                }
            }
            writeln!(ctx.out, "{} checks, {} failures", rows.len(), failures).unwrap();
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "group": r.group, "M": r.m, "stat": r.stat.name(), "weight": r.weight.name(), "n": r.n,
                        "series": r.series.to_string(), "oracle": r.oracle.to_string(),
                        "pass": r.series == r.oracle, "diagnostics": r.diagnostics,
                    })
                })
                .collect();
            emit_json(ctx, &json!({"checks": items, "failures": failures, "cache_mismatches": tampered.len()}));
        }
        Format::Csv => {
            csv_line(&mut ctx.out, &["group", "M", "stat", "weight", "n", "series", "oracle", "pass"].map(String::from));
            for r in &rows {
                csv_line(
                    &mut ctx.out,
                    &[
                        r.group.clone(),
                        r.m.to_string(),
                        r.stat.name().to_string(),
                        r.weight.name().to_string(),
                        r.n.to_string(),
                        r.series.to_string(),
                        r.oracle.to_string(),
                        (r.series == r.oracle).to_string(),
                    ],
                );
            }
        }
    }
    if failures > 0 || !tampered.is_empty() {
        return Err(CliError::Mismatch(format!(
            "{failures} coefficient mismatches, {} stale cache records",
            tampered.len()
        )));
    }
    Ok(())
}

fn enumerate_polys(ctx: &mut Ctx, q: u64, ms: &[u64], degree: u64, srim: bool) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for &m in ms {
        for r in enumerate_records(q, m, degree, srim, ctx.bound)?.iter() {
            rows.push((m, r.clone()));
        }
    }
    match ctx.format {
        Format::Text => {
            for (m, r) in &rows {
                writeln!(
                    ctx.out,
                    "{}  M={m} exponent {} M-power {} M*-power {} factor degrees [{}]",
                    r.poly.to_text(),
                    r.exponent,
                    r.is_m_power,
                    r.is_mstar_power,
                    join(&r.spectrum, " ")
                )
                .unwrap();
            }
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(m, r)| {
                    json!({
                        "poly": r.poly.to_text(), "expression": r.poly.to_string(), "M": m, "exponent": r.exponent,
                        "self_reciprocal": r.self_reciprocal, "m_power": r.is_m_power,
                        "mstar_power": r.is_mstar_power, "spectrum": r.spectrum,
                    })
                })
                .collect();
            emit_json(ctx, &Value::Array(items));
        }
        Format::Csv => {
            csv_line(&mut ctx.out, &["poly", "M", "exponent", "self_reciprocal", "m_power", "mstar_power", "spectrum"].map(String::from));
            for (m, r) in &rows {
                csv_line(
                    &mut ctx.out,
                    &[
                        r.poly.to_text(),
                        m.to_string(),
                        r.exponent.to_string(),
                        r.self_reciprocal.to_string(),
                        r.is_m_power.to_string(),
                        r.is_mstar_power.to_string(),
                        join(&r.spectrum, " "),
                    ],
                );
            }
        }
    }
    Ok(())
}

fn enumerate_group(ctx: &mut Ctx, family: FormFamily, dim: usize, q: u64, ms: &[u64]) -> Result<(), CliError> {
    let table = build(ctx, family, dim, q)?;
    if let Some(&bad) = ms.iter().find(|&&m| m == 0) {
        return Err(CliError::Usage(format!("M = {bad} is not a positive integer")));
    }
    match ctx.format {
        Format::Csv => ctx.out.push_str(&table.snapshot_csv(ms)?),
        Format::Text => {
            let profiles = table.class_profiles()?;
            let flags: Vec<Vec<bool>> = ms.iter().map(|&m| table.class_power_flags(m)).collect();
            writeln!(ctx.out, "{}: {} elements, {} classes", table.spec(), table.order(), table.classes().len()).unwrap();
            for (c, p) in table.classes().iter().zip(profiles) {
                let powers: Vec<String> = ms.iter().zip(&flags).filter(|(_, f)| f[c.id]).map(|(m, _)| m.to_string()).collect();
                writeln!(
                    ctx.out,
                    "class {} size {} centralizer {} charpoly {} minpoly {} [{}] powers {{{}}}",
                    c.id,
                    c.size,
                    c.centralizer,
                    p.charpoly,
                    p.minpoly,
                    p.flag_string(),
                    powers.join(", ")
                )
                .unwrap();
            }
        }
        Format::Json => {
            let profiles = table.class_profiles()?;
            let flags: Vec<Vec<bool>> = ms.iter().map(|&m| table.class_power_flags(m)).collect();
            let classes: Vec<Value> = table
                .classes()
                .iter()
                .zip(profiles)
                .map(|(c, p)| {
                    let powers: Vec<u64> = ms.iter().zip(&flags).filter(|(_, f)| f[c.id]).map(|(m, _)| *m).collect();
                    json!({
                        "id": c.id, "size": c.size, "centralizer": c.centralizer,
                        "charpoly": p.charpoly.to_string(), "minpoly": p.minpoly.to_string(),
                        "separable": p.separable, "semisimple": p.semisimple, "cyclic": p.cyclic,
                        "regular": p.regular, "powers": powers,
                    })
                })
                .collect();
            emit_json(ctx, &json!({"group": table.spec().to_string(), "order": table.order(), "classes": classes}));
        }
    }
    Ok(())
}

fn cache_command(ctx: &mut Ctx, action: CacheAction) -> Result<(), CliError> {
    if !ctx.cache.is_enabled() {
        return Err(CliError::Usage("the cache is disabled by --no-cache".into()));
    }
    match action {
        CacheAction::Clear => {
            ctx.cache.clear();
            writeln!(ctx.out, "cache cleared").unwrap();
            Ok(())
        }
        CacheAction::Show => {
            let records: Vec<&CacheRecord> = ctx.cache.records().collect();
            match ctx.format {
                Format::Json => {
                    let v = serde_json::to_value(&records).expect("records serialize");
                    emit_json(ctx, &v);
                }
                Format::Text | Format::Csv => {
                    let mut out = String::new();
                    csv_line(&mut out, &["q", "M", "poly", "degree", "exponent", "m_power", "mstar_power", "degenerate", "spectrum"].map(String::from));
                    for r in &records {
                        csv_line(
                            &mut out,
                            &[
                                r.q.to_string(),
                                r.m.to_string(),
                                r.poly.clone(),
                                r.degree.to_string(),
                                r.exponent.to_string(),
                                r.m_power.to_string(),
                                r.mstar_power.to_string(),
                                join(&r.degenerate, " "),
                                join(&r.spectrum, " "),
                            ],
                        );
                    }
                    ctx.out.push_str(&out);
                }
            }
            Ok(())
        }
        CacheAction::Verify => {
            let stale = ctx.cache.audit();
            for (rec, _) in &stale {
                writeln!(ctx.out, "stale: {} M={}", rec.poly, rec.m).unwrap();
            }
            writeln!(ctx.out, "{} records, {} stale", ctx.cache.len(), stale.len()).unwrap();
            if stale.is_empty() {
                Ok(())
            } else {
                Err(CliError::Mismatch(format!("{} cache records disagree with recomputation", stale.len())))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use powercount::MonicPoly;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn series_text_constant_term() {
        let mut ctx = Ctx {
            format: Format::Text,
            seed: DEFAULT_SEED,
            bound: DEFAULT_ENUMERATION_BOUND,
            variant: FormulaVariant::Corrected,
            cache: Cache::disabled(),
            out: String::new(),
        };
        series(&mut ctx, GroupFamily::Sp, Statistic::Separable, Weighting::Probability, 3, 2, 4).unwrap();
        assert!(ctx.out.starts_with("1 + "));
        let f3 = FieldCtx::of_order(3).unwrap();
        assert_eq!(expr::parse_poly(&f3, "x^2-1").unwrap(), MonicPoly::from_ints(&f3, &[-1, 0, 1]).unwrap());
    }
}
