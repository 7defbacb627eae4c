use std::path::PathBuf;

use budgetmech::analysis::{
    check_payment_monotone, extend_query, gap_sweep, uniform_grid, Benchmark, ExtendedMechanism, MonotonicityReport,
};
use budgetmech::constructions::{
    example1_optimal_wc, example1_query, make_family, witness_mechanism, Example1Optimum, FamilyParams,
};
use budgetmech::feasibility::check_feasible;
use budgetmech::model::io::{
    distribution_from_json, distribution_to_json, mechanism_from_json, mechanism_to_json, to_json_string,
    MechanismRow,
};
use budgetmech::model::{ClassSpec, Rational};
use budgetmech::solvers::{brute_force_oracle, solve_class, SolverConfig};
use budgetmech::{Error, Result};
use serde::Serialize;

use crate::args::{
    Budgets, Cli, Command, Example1Args, ExtendArgs, FamilyArgs, FamilySelect, Format, SolveArgs, SweepArgs, VerifyArgs,
};
use crate::output::{read, resolve, write_atomic};

/// Runs one command and returns the path of its main output.
pub fn run(cli: Cli) -> Result<PathBuf> {
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::Family(a) => family(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Extend(a) => extend(a),
        Command::Example1(a) => example1(a),
    }
}

fn config(b: &Budgets) -> Result<SolverConfig> {
    if b.delta.is_negative() {
        return Err(Error::InvalidParameter(format!("delta must be nonnegative, got {}", b.delta)));
    }
    Ok(SolverConfig {
        indicator_cap: b.indicator_cap,
        enumeration_cap: b.enumeration_cap,
        oracle_grid_cap: b.oracle_grid_cap,
        delta: b.delta.clone(),
    })
}

fn params(f: &FamilySelect) -> FamilyParams {
    FamilyParams {
        k: f.k,
        n: f.n,
        b: f.b.clone(),
        h: f.h.clone(),
        eps: f.eps.clone(),
        precision: f.precision,
        ..FamilyParams::new(f.name)
    }
}

#[derive(Serialize)]
struct OracleOutput {
    class: ClassSpec,
    grid: u32,
    value: Rational,
    mechanism: Vec<MechanismRow>,
}

fn solve(a: SolveArgs) -> Result<PathBuf> {
    let d = distribution_from_json(&read(&a.input)?)?;
    let cfg = config(&a.budgets)?;
    let (json, mech) = match a.oracle_grid {
        Some(grid) => {
            let r = brute_force_oracle(&d, a.class, grid, &cfg)?;
            let out = OracleOutput {
                class: a.class,
                grid,
                value: r.value,
                mechanism: budgetmech::model::io::mechanism_rows(&r.mechanism),
            };
            (to_json_string(&out)?, r.mechanism)
        }
        None => {
            let r = solve_class(&d, a.class, &cfg)?;
            (to_json_string(&r)?, r.mechanism)
        }
    };
    if let Some(path) = &a.witness_output {
        write_atomic(path, &mechanism_to_json(&mech, d.label())?)?;
    }
    let path = resolve(a.out.output.as_deref(), "solve.json");
    write_atomic(&path, &json)?;
    Ok(path)
}

fn family(a: FamilyArgs) -> Result<PathBuf> {
    let p = params(&a.family);
    let fam = make_family(&p)?;
    match (fam.pair(), &a.upper_output) {
        (Some(pair), Some(upper)) => write_atomic(upper, &distribution_to_json(&pair.upper)?)?,
        (None, Some(_)) => {
            return Err(Error::InvalidParameter(format!("{} is not a pair family", p.name)));
        }
        _ => {}
    }
    if let Some(path) = &a.witness_output {
        let mech = witness_mechanism(&p)?;
        write_atomic(path, &mechanism_to_json(&mech, fam.primary().label())?)?;
    }
    let path = resolve(a.out.output.as_deref(), &format!("{}.json", p.name));
    write_atomic(&path, &distribution_to_json(fam.primary())?)?;
    Ok(path)
}

fn sweep(a: SweepArgs) -> Result<PathBuf> {
    let cfg = config(&a.budgets)?;
    let num: Benchmark = a.numerator.parse()?;
    let den: Benchmark = a.denominator.parse()?;
    let report = gap_sweep(&params(&a.family), &a.values, num, den, &cfg)?;
    let (body, ext) = match a.format {
        Format::Json => (report.to_json()?, "json"),
        Format::Csv => (report.to_csv()?, "csv"),
    };
    let path = resolve(a.out.output.as_deref(), &format!("sweep.{ext}"));
    write_atomic(&path, &body)?;
    Ok(path)
}

fn verify(a: VerifyArgs) -> Result<PathBuf> {
    let d = distribution_from_json(&read(&a.distribution)?)?;
    let (mech, _) = mechanism_from_json(&read(&a.mechanism)?)?;
    let report = check_feasible(&mech, &d, a.class)?;
    let path = resolve(a.out.output.as_deref(), "verify.json");
    write_atomic(&path, &to_json_string(&report)?)?;
    Ok(path)
}

#[derive(Serialize)]
struct ExtendOutput {
    label: String,
    pinned: bool,
    queries: Vec<MechanismRow>,
    monotonicity: MonotonicityReport,
}

fn extend(a: ExtendArgs) -> Result<PathBuf> {
    let (mech, label) = mechanism_from_json(&read(&a.mechanism)?)?;
    if mech.is_empty() {
        return Err(Error::InvalidParameter("mechanism file lists no types".into()));
    }
    if a.grid < 2 {
        return Err(Error::InvalidParameter(format!("grid needs at least 2 points per axis, got {}", a.grid)));
    }
    let max_of = |f: fn(&budgetmech::model::TypeKey) -> &Rational| {
        mech.iter().map(|(k, _)| f(k).clone()).max().unwrap_or_else(Rational::one)
    };
    let v_max = a.v_max.clone().unwrap_or_else(|| max_of(|k| &k.v));
    let w_max = a.w_max.clone().unwrap_or_else(|| max_of(|k| &k.w));
    let ext = if a.pinned {
        ExtendedMechanism::pinned(&mech)
    } else {
        ExtendedMechanism::from_mechanism(&mech)
    };
    let grid = uniform_grid(a.grid, &v_max, &w_max);
    let queries = grid
        .iter()
        .map(|(v, w)| {
            let l = extend_query(&ext, v, w);
            MechanismRow {
                v: v.clone(),
                w: w.clone(),
                q: l.q,
                p: l.p,
            }
        })
        .collect();
    let out = ExtendOutput {
        label,
        pinned: a.pinned,
        queries,
        monotonicity: check_payment_monotone(&ext, &grid),
    };
    let path = resolve(a.out.output.as_deref(), "extend.json");
    write_atomic(&path, &to_json_string(&out)?)?;
    Ok(path)
}

#[derive(Serialize)]
struct Example1Row {
    w: Rational,
    q: Rational,
    p: Rational,
    utility: Rational,
}

#[derive(Serialize)]
struct Example1Output {
    v_hat: Rational,
    optimum: Example1Optimum,
    /// Rational stand-in for the optimal critical budget used in the table.
    w_c: Rational,
    table: Vec<Example1Row>,
}

fn example1(a: Example1Args) -> Result<PathBuf> {
    if a.grid == 0 {
        return Err(Error::InvalidParameter("grid must be positive".into()));
    }
    let optimum = example1_optimal_wc(&a.v_hat, a.tolerance)?;
    let p = optimum.params(&a.v_hat)?;
    let n = a.grid as i64;
    let table = (0..=n)
        .map(|i| {
            let w = Rational::new(i, n);
            let l = example1_query(&p, &w)?;
            Ok(Example1Row {
                utility: l.utility(&p.v_hat),
                w,
                q: l.q,
                p: l.p,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let body = match a.format {
        Format::Json => to_json_string(&Example1Output {
            v_hat: a.v_hat.clone(),
            optimum,
            w_c: p.w_c.clone(),
            table,
        })?,
        Format::Csv => {
            let mut s = String::from("w,q,p,utility,q_decimal,p_decimal\n");
            for r in &table {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.w,
                    r.q,
                    r.p,
                    r.utility,
                    r.q.to_decimal_string(12),
                    r.p.to_decimal_string(12)
                ));
            }
            s
        }
    };
    let ext = if a.format == Format::Csv { "csv" } else { "json" };
    let path = resolve(a.out.output.as_deref(), &format!("example1.{ext}"));
    write_atomic(&path, &body)?;
    Ok(path)
}
