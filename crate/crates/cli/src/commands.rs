use std::io::Write;
use std::path::{Path, PathBuf};

use groupeq::reductions::{reduce_coloring, reduce_sat, verify_reduction, ReductionOutput, Variant};
use groupeq::solver::{check_id, solve_eq, EquationFile, GroupRef, SolverConfig};
use groupeq::structure::{HConstruction, StructureError};
use groupeq::term::length;
use groupeq::{Builtin, CnfInstance, ColoringInstance, FiniteGroup, GroupSpec, Subgroup};
use serde_json::{json, Value};

use crate::report::{CliError, Report, EXIT_INTERNAL};
use crate::{Cli, Command, Gadget, Mode};

pub fn run(cli: &Cli, report: &mut Report) -> Result<(), CliError> {
    let config = SolverConfig { cap: cli.cap, workers: cli.workers.max(1) };
    match &cli.command {
        Command::GroupInfo { group } => group_info(report, group),
        Command::Structure { group } => structure(report, group),
        Command::Construct { group, mode } => construct(report, group, *mode),
        Command::Reduce { group, instance, gadget, variant, out } => reduce(report, group, instance, *gadget, *variant, out),
        Command::Solve { equation } => decide(report, equation, &config, true),
        Command::CheckId { equation } => decide(report, equation, &config, false),
        Command::Verify { group, instance, gadget, variant } => verify(report, group, instance, *gadget, *variant, &config),
    }
}

fn read(report: &mut Report, path: &Path) -> Result<Vec<u8>, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    report.input(&path.display().to_string(), &bytes);
    Ok(bytes)
}

fn read_text(report: &mut Report, path: &Path) -> Result<String, CliError> {
    String::from_utf8(read(report, path)?).map_err(|_| CliError::invalid(format!("{} is not UTF-8", path.display())))
}

/// A group-spec path or `builtin:<name>`.
fn load_group(report: &mut Report, arg: &str) -> Result<FiniteGroup, CliError> {
    let group = report.timed("load_ms", || -> Result<_, CliError> {
        Ok(match arg.strip_prefix("builtin:") {
            Some(name) => Builtin::parse(name)?.build()?,
            None => {
                let text = std::fs::read_to_string(arg).map_err(|e| CliError::io(Path::new(arg), e))?;
                text.parse::<GroupSpec>()?.build()?
            }
        })
    })?;
    let bytes = match arg.strip_prefix("builtin:") {
        Some(_) => arg.as_bytes().to_vec(),
        None => std::fs::read(arg).map_err(|e| CliError::io(Path::new(arg), e))?,
    };
    report.input(arg, &bytes);
    Ok(group)
}

fn sub(s: &Subgroup) -> Value {
    json!({ "order": s.order(), "members": s.members() })
}

fn group_info(report: &mut Report, arg: &str) -> Result<(), CliError> {
    let g = load_group(report, arg)?;
    let center = g.center();
    let (nilpotent, solvable) = report.timed("analysis_ms", || (g.is_nilpotent_group(), g.is_solvable()));
    report.set("order", json!(g.order()));
    report.set("exponent", json!(g.exponent()));
    report.set("center_order", json!(center.order()));
    report.set("derived_order", json!(g.derived_subgroup().order()));
    report.set("abelian", json!(g.is_abelian()));
    report.set("nilpotent", json!(nilpotent));
    report.set("solvable", json!(solvable));
    report.summary.push(format!(
        "order {}, exponent {}, |Z| = {}, abelian {}, nilpotent {nilpotent}, solvable {solvable}",
        g.order(),
        g.exponent(),
        center.order(),
        g.is_abelian()
    ));
    Ok(())
}

fn structure(report: &mut Report, arg: &str) -> Result<(), CliError> {
    let g = load_group(report, arg)?;
    let whole = Subgroup::whole(&g);
    let (derived, lower, upper) =
        report.timed("series_ms", || (g.derived_series(), g.lower_central_series(&whole), g.upper_central_series()));
    let list = |v: &[Subgroup]| Value::Array(v.iter().map(sub).collect());
    report.set("order", json!(g.order()));
    report.set("derived_series", list(&derived));
    report.set("lower_central_series", list(&lower));
    report.set("upper_central_series", list(&upper));
    let fitting = report.timed("fitting_ms", || g.fitting_subgroup())?;
    report.set("fitting", sub(&fitting));
    let minimal = report.timed("normal_ms", || g.minimal_normal_subgroups());
    report.set("minimal_normal_subgroups", list(&minimal));
    match report.timed("normal_ms", || g.normal_subgroups()) {
        Ok(all) => report.set("normal_subgroup_orders", json!(all.iter().map(Subgroup::order).collect::<Vec<_>>())),
        Err(StructureError::TooLarge { .. }) => report.set("normal_subgroup_orders", Value::Null),
        Err(e) => return Err(e.into()),
    }
    let class = report.timed("classify_ms", || g.classify())?;
    report.set(
        "classification",
        json!({
            "kind": class.kind,
            "exponent": class.exponent,
            "l": class.l.as_ref().map(sub),
            "fitting_of_l": class.fitting_of_l.as_ref().map(sub),
        }),
    );
    report.summary.push(format!(
        "order {}, |F| = {}, classification {:?}{}",
        g.order(),
        fitting.order(),
        class.kind,
        class.exponent.map(|e| format!(" (exp(L/F(L)) = {e})")).unwrap_or_default()
    ));
    Ok(())
}

fn build_h(report: &mut Report, g: &FiniteGroup, mode: Mode) -> Result<HConstruction, CliError> {
    let c = report.timed("construct_ms", || match mode {
        Mode::Eq => g.construct_h_eq(),
        Mode::Id => g.construct_h_id(),
    })?;
    Ok(c)
}

fn construction_json(c: &HConstruction) -> Value {
    let chain: Vec<Value> = c
        .chain
        .iter()
        .map(|q| json!({ "kernel": sub(q.kernel()), "quotient_order": q.quotient().order() }))
        .collect();
    json!({
        "l": sub(&c.l),
        "exponent": c.exponent,
        "g": c.g,
        "driver": c.driver,
        "a": c.a,
        "chain": chain,
        "h_order": c.h.order(),
        "h_table": c.h.table(),
        "n": sub(&c.n),
        "g_in_h": c.g_in_h,
        "a_in_h": c.a_in_h,
        "centralizer": sub(&c.centralizer),
        "index": c.index,
        "index_over_2": c.index_over_2,
    })
}

fn construct(report: &mut Report, arg: &str, mode: Mode) -> Result<(), CliError> {
    let g = load_group(report, arg)?;
    let c = build_h(report, &g, mode)?;
    report.set("construction", construction_json(&c));
    report.summary.push(format!(
        "|L| = {}, {} quotient step(s), |H| = {}, |N| = {}, |H/C_H(N)| = {}",
        c.l.order(),
        c.chain.len(),
        c.h.order(),
        c.n.order(),
        c.index
    ));
    Ok(())
}

fn compile(
    report: &mut Report,
    arg: &str,
    instance: &Path,
    gadget: Gadget,
    mode: Mode,
) -> Result<(HConstruction, ReductionOutput), CliError> {
    let g = load_group(report, arg)?;
    let text = read_text(report, instance)?;
    let c = build_h(report, &g, mode)?;
    let variant = if mode == Mode::Eq { Variant::Eq } else { Variant::Id };
    let out = match gadget {
        Gadget::Coloring => {
            let graph: ColoringInstance = text.parse()?;
            report.timed("compile_ms", || reduce_coloring(&c.h, &c.n, &graph, variant))?
        }
        Gadget::Sat => {
            let cnf: CnfInstance = text.parse()?;
            report.timed("compile_ms", || reduce_sat(&c.h, &c.n, &cnf, variant))?
        }
    };
    report.set("h_order", json!(c.h.order()));
    report.set("n", sub(&c.n));
    report.set("index", json!(c.index));
    report.set("lhs_length", json!(length(&out.equation.lhs)));
    report.set("variables", json!(out.equation.variables().len()));
    report.set("search_space", json!(out.equation.search_space().to_string()));
    report.set("restricted_search_space", json!(out.restricted.search_space().to_string()));
    Ok((c, out))
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes every file to a temporary sibling first and renames only once all
/// of them are complete.
fn write_all_atomic(files: &[(PathBuf, Vec<u8>)]) -> Result<(), CliError> {
    let mut staged = Vec::new();
    for (path, bytes) in files {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
        tmp.write_all(bytes).and_then(|_| tmp.as_file().sync_all()).map_err(|e| CliError::io(path, e))?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    }
    Ok(())
}

fn reduce(report: &mut Report, arg: &str, instance: &Path, gadget: Gadget, mode: Mode, out: &Path) -> Result<(), CliError> {
    let (c, r) = compile(report, arg, instance, gadget, mode)?;
    let group_path = suffixed(out, ".group");
    let eq_path = suffixed(out, ".eq");
    let roles_path = suffixed(out, ".roles.json");
    let group_name = group_path.file_name().expect("prefix has a file name").to_string_lossy().into_owned();
    let group_text = GroupSpec::from_group(&c.h).to_string();
    let eq_text = EquationFile::from_instance(GroupRef::Path(PathBuf::from(&group_name)), &r.equation).to_string();
    let roles = json!({
        "role_map": r.role_map,
        "restricted": {
            "lhs": r.core.to_string(),
            "x_domain": r.target_subgroup.members(),
        },
    });
    let roles_text = serde_json::to_string_pretty(&roles).expect("plain JSON") + "\n";
    let files = vec![
        (group_path, group_text.into_bytes()),
        (eq_path, eq_text.into_bytes()),
        (roles_path, roles_text.into_bytes()),
    ];
    report.timed("write_ms", || write_all_atomic(&files))?;
    for (p, b) in &files {
        report.output(p, b);
    }
    report.set("role_map", json!(r.role_map));
    report.summary.push(format!(
        "compiled over H of order {} into {} variables, lhs length {}; wrote {}",
        c.h.order(),
        r.equation.variables().len(),
        length(&r.equation.lhs),
        files[1].0.display()
    ));
    Ok(())
}

fn decide(report: &mut Report, path: &Path, config: &SolverConfig, solve: bool) -> Result<(), CliError> {
    let text = read_text(report, path)?;
    let file: EquationFile = text.parse()?;
    let base = path.parent().unwrap_or(Path::new("."));
    if let GroupRef::Path(p) = &file.group {
        read(report, &base.join(p))?;
    }
    let group = report.timed("load_ms", || file.group.load(base))?;
    let inst = file.instance(group)?;
    report.set("group_order", json!(inst.group.order()));
    report.set("lhs", json!(inst.lhs.to_string()));
    report.set("rhs", json!(inst.rhs.to_string()));
    report.set("search_space", json!(inst.search_space().to_string()));
    if solve {
        let r = report.timed("solve_ms", || solve_eq(&inst, config))?;
        report.summary.push(format!(
            "{} after {} assignment(s)",
            if r.solvable { "solvable" } else { "no solution" },
            r.assignments_examined
        ));
        report.set("solvable", json!(r.solvable));
        report.set("witness", json!(r.witness));
        report.set("assignments_examined", json!(r.assignments_examined));
    } else {
        let r = report.timed("check_ms", || check_id(&inst, config))?;
        report.summary.push(format!(
            "identity {} after {} assignment(s)",
            if r.holds { "holds" } else { "fails" },
            r.assignments_examined
        ));
        report.set("holds", json!(r.holds));
        report.set("counterexample", json!(r.counterexample));
        report.set("assignments_examined", json!(r.assignments_examined));
    }
    Ok(())
}

fn verify(
    report: &mut Report,
    arg: &str,
    instance: &Path,
    gadget: Gadget,
    mode: Mode,
    config: &SolverConfig,
) -> Result<(), CliError> {
    let (_, r) = compile(report, arg, instance, gadget, mode)?;
    let v = report.timed("verify_ms", || verify_reduction(&r, config))?;
    report.set("verification", json!(v));
    report.summary.push(format!(
        "decided {}, restricted {}, oracle accepts {}: agreement {}",
        v.decided, v.restricted_decided, v.oracle_accepts, v.agreement
    ));
    if !v.agreement {
        return Err(CliError::new("disagreement", EXIT_INTERNAL, "compiled instance disagrees with the oracle"));
    }
    Ok(())
}
