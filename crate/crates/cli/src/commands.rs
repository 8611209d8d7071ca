//! One function per subcommand, each producing a [`Report`].

use capcalc_core::capacity::{
    capacity_closed_form, capacity_search, class_e_an, class_e_bn, emit_graph, search_range_start,
    staircase_point, SegmentShape,
};
use capcalc_core::classes::{is_obstructive_at, mu_at, reduce_class, ExceptionalClass, Verdict};
use capcalc_core::ech::{k_lower_bound_auto, lattice_count, min_degree, one_sided_bound, verify_table_t0, LatticeTriangle};
use capcalc_core::num::{format_rational, int, Rational};
use capcalc_core::quadratic::QuadraticNumber;
use capcalc_core::search::{inter_sol_less, sol_less};
use serde_json::{json, Value};

use crate::args::{CapacityArgs, ClassesArgs, Command, EchArgs, GraphArgs, Method, ReduceArgs, StairsArgs, VerifyArgs};
use crate::config::Config;
use crate::output::{to_csv, Report};
use crate::suite::{run_check, CHECKS};
use crate::CliError;

/// Decimal places shown next to exact values.
const DIGITS: usize = 12;

fn r(x: &Rational) -> String {
    format_rational(x)
}

fn quad(x: &QuadraticNumber) -> Value {
    json!({ "exact": x.to_string(), "decimal": x.to_decimal(DIGITS) })
}

fn classes_json(classes: &[ExceptionalClass]) -> Vec<String> {
    classes.iter().map(|c| c.compact()).collect()
}

pub fn dispatch(command: &Command, cfg: &Config) -> Result<Report, CliError> {
    match command {
        Command::Capacity(a) => capacity(a, cfg),
        Command::Classes(a) => classes(a, cfg),
        Command::Reduce(a) => reduce(a),
        Command::Stairs(a) => stairs(a),
        Command::Ech(a) => ech(a),
        Command::Graph(a) => graph(a),
        Command::Verify(a) => verify(a, cfg),
    }
}

fn capacity(args: &CapacityArgs, cfg: &Config) -> Result<Report, CliError> {
    let a = &args.a;
    let d_max = args.d_max.unwrap_or(cfg.d_max);
    let in_range = a >= &search_range_start() && a <= &int(9);
    if args.method == Method::Search && !in_range {
        return Err(CliError::Usage(format!("the search evaluator covers 48/7 ≤ a ≤ 9, got {}", r(a))));
    }
    let closed = capacity_closed_form(a)?;
    let searched = match (args.method, in_range) {
        (Method::Closed, _) | (_, false) => None,
        _ => Some(capacity_search(a, d_max)?),
    };
    let witnesses = match &searched {
        Some(s) => classes_json(&s.witnesses),
        None => closed.witness.iter().map(|c| c.compact()).collect(),
    };
    let agrees = searched.as_ref().map(|s| s.value == closed.value);
    let value = match (&searched, args.method) {
        (Some(s), Method::Search) => s.value.clone(),
        _ => closed.value.clone(),
    };
    let method = match (args.method, &searched) {
        (Method::Closed, _) | (Method::Both, None) => "closed",
        (Method::Search, _) => "search",
        (Method::Both, Some(_)) => "both",
    };
    let mut doc = json!({
        "a": r(a),
        "value": value.to_string(),
        "decimal": value.to_decimal(DIGITS),
        "regime": closed.regime.tag(),
        "witnesses": witnesses,
        "method": method,
    });
    if let Some(s) = &searched {
        doc["search"] = json!({ "d_max": d_max, "candidates": s.candidates, "agrees": agrees });
    }
    let row = vec![r(a), value.to_string(), value.to_decimal(DIGITS), closed.regime.tag(), witnesses.join(" ")];
    let mut report = Report::new(doc, vec!["a", "value", "decimal", "regime", "witnesses"], vec![row]);
    report.ok = agrees.unwrap_or(true);
    Ok(report)
}

fn classes(args: &ClassesArgs, cfg: &Config) -> Result<Report, CliError> {
    if let Some(a) = &args.query.at {
        let d_max = args.d_max.unwrap_or(cfg.d_max);
        let found = sol_less(a, d_max)?;
        let mut items = Vec::new();
        let mut rows = Vec::new();
        for c in &found {
            let mu = mu_at(c, a)?;
            let strict = is_obstructive_at(c, a)?;
            items.push(json!({ "class": c.compact(), "d": c.d, "length": c.length(), "mu": r(&mu), "obstructive": strict }));
            rows.push(vec![c.compact(), c.d.to_string(), c.length().to_string(), r(&mu), strict.to_string()]);
        }
        let doc = json!({ "at": r(a), "d_max": d_max, "classes": items });
        return Ok(Report::new(doc, vec!["class", "d", "length", "mu", "obstructive"], rows));
    }
    let k = args.query.interval.expect("clap requires --at or --interval");
    let d_max = match args.d_max {
        Some(d) => d,
        None => cfg
            .interval_bound(k)
            .ok_or_else(|| CliError::Usage(format!("no default interval bound for k = {k}; pass --dmax")))?,
    };
    let found = inter_sol_less(k, d_max)?;
    let rows = found.iter().map(|c| vec![c.compact(), c.d.to_string(), c.length().to_string()]).collect();
    let items: Vec<Value> = found.iter().map(|c| json!({ "class": c.compact(), "d": c.d, "length": c.length() })).collect();
    let doc = json!({ "interval": k, "d_max": d_max, "classes": items });
    Ok(Report::new(doc, vec!["class", "d", "length"], rows))
}

fn reduce(args: &ReduceArgs) -> Result<Report, CliError> {
    let red = reduce_class(&args.class)?;
    let (verdict, reason) = match red.verdict {
        Verdict::InE => ("in_e", None),
        Verdict::NotInE(why) => ("not_in_e", Some(why.as_str())),
    };
    let trace: Vec<String> = red.trace.iter().map(|c| c.compact()).collect();
    let rows = trace.iter().enumerate().map(|(i, t)| vec![i.to_string(), t.clone()]).collect();
    let doc = json!({
        "class": args.class.compact(),
        "verdict": verdict,
        "reason": reason,
        "steps": trace.len() - 1,
        "trace": trace,
    });
    Ok(Report::new(doc, vec!["step", "class"], rows))
}

fn stairs(args: &StairsArgs) -> Result<Report, CliError> {
    if args.n < 0 {
        return Err(CliError::Usage(format!("--n must be ≥ 0, got {}", args.n)));
    }
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for n in 0..=args.n {
        let s = staircase_point(n)?;
        let e_b = class_e_bn(n)?.compact();
        let e_a = if n >= 1 { Some(class_e_an(n)?.compact()) } else { None };
        items.push(json!({
            "n": n,
            "a_n": r(&s.a_n),
            "b_n": r(&s.b_n),
            "c_a_n": r(&s.c_at_a_n),
            "c_b_n": r(&s.c_at_b_n),
            "E_b_n": e_b,
            "E_a_n": e_a,
        }));
        rows.push(vec![
            n.to_string(),
            r(&s.a_n),
            r(&s.b_n),
            r(&s.c_at_a_n),
            r(&s.c_at_b_n),
            e_b,
            e_a.unwrap_or_default(),
        ]);
    }
    Ok(Report::new(json!({ "stairs": items }), vec!["n", "a_n", "b_n", "c_a_n", "c_b_n", "E_b_n", "E_a_n"], rows))
}

fn ech(args: &EchArgs) -> Result<Report, CliError> {
    if args.verify_tables {
        let checks = verify_table_t0()?;
        let ok = checks.iter().all(|c| c.passed);
        let items: Vec<Value> = checks
            .iter()
            .map(|c| json!({ "name": c.name, "status": if c.passed { "pass" } else { "fail" }, "detail": c.detail }))
            .collect();
        let rows = checks
            .iter()
            .map(|c| vec![c.name.clone(), if c.passed { "pass" } else { "fail" }.to_string(), c.detail.clone()])
            .collect();
        let mut report = Report::new(json!({ "checks": items, "passed": ok }), vec!["name", "status", "detail"], rows);
        report.ok = ok;
        return Ok(report);
    }
    let a = args.slope.as_ref().expect("clap requires --slope");
    if let Some(window) = args.k_bound {
        let k = k_lower_bound_auto(a, window)?;
        let doc = json!({
            "slope": r(a),
            "k_lower_bound": r(&k.value),
            "argmax": [k.argmax.0, k.argmax.1],
            "d": k.d,
            "window": [k.window.0, k.window.1],
        });
        let row = vec![r(a), r(&k.value), format!("{} {}", k.argmax.0, k.argmax.1), k.d.to_string()];
        return Ok(Report::new(doc, vec!["slope", "k_lower_bound", "argmax", "d"], vec![row]));
    }
    let (aa, bb) = match args.anchor.as_deref() {
        Some([x, y]) => (*x, *y),
        _ => return Err(CliError::Usage("pass --anchor A B, --k-bound N or --verify-tables".into())),
    };
    let t = LatticeTriangle::new(a, aa, bb)?;
    let count = lattice_count(&t)?;
    let d = min_degree(count.total);
    let k = t.level() / int(d);
    let one = one_sided_bound(a, aa, bb)?;
    let p = count.parts;
    let doc = json!({
        "slope": r(a),
        "anchor": [aa, bb],
        "count": count.total as i64,
        "s": count.s as i64,
        "d": d,
        "k": r(&k),
        "first": [count.first.0, count.first.1],
        "last": [count.last.0, count.last.1],
        "parts": { "alpha": p.alpha as i64, "beta": p.beta as i64, "gamma": p.gamma as i64, "delta": p.delta as i64, "epsilon": p.epsilon as i64 },
        "one_sided": { "d": one.d, "value": r(&one.value) },
    });
    let row = vec![count.total.to_string(), count.s.to_string(), d.to_string(), r(&k), one.d.to_string(), r(&one.value)];
    Ok(Report::new(doc, vec!["count", "s", "d", "k", "one_sided_d", "one_sided_value"], vec![row]))
}

fn graph(args: &GraphArgs) -> Result<Report, CliError> {
    let g = emit_graph(&args.from, &args.to, &args.step)?;
    let header = vec!["a", "c_decimal", "c_exact", "regime"];
    let rows: Vec<Vec<String>> = g
        .samples
        .iter()
        .map(|s| vec![r(&s.a), s.value.to_decimal(args.digits), s.value.to_string(), s.regime.tag()])
        .collect();
    let segments: Vec<Value> = g
        .segments
        .iter()
        .map(|s| {
            json!({
                "from": quad(&s.from),
                "to": quad(&s.to),
                "formula": s.formula(),
                "label": s.label,
                "sqrt": matches!(s.shape, SegmentShape::Sqrt),
                "witness": s.witness.as_ref().map(|c| c.compact()),
            })
        })
        .collect();
    let breakpoints: Vec<Value> = g.breakpoints().iter().map(quad).collect();
    let summary = json!({
        "from": r(&g.from),
        "to": r(&g.to),
        "step": r(&g.step),
        "segments": segments,
        "breakpoints": breakpoints,
        "continuous": g.is_continuous(),
        "nondecreasing": g.samples_nondecreasing(),
    });
    if let Some(path) = &args.out {
        std::fs::write(path, to_csv(&header, &rows))
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        let mut doc = summary;
        doc["out"] = json!(path.display().to_string());
        doc["samples"] = json!(rows.len());
        return Ok(Report::new(doc, vec!["out", "samples"], vec![vec![path.display().to_string(), rows.len().to_string()]]));
    }
    let samples: Vec<Value> = rows
        .iter()
        .map(|row| json!({ "a": row[0], "decimal": row[1], "exact": row[2], "regime": row[3] }))
        .collect();
    let mut doc = summary;
    doc["samples"] = json!(samples);
    Ok(Report::new(doc, header, rows))
}

fn verify(args: &VerifyArgs, cfg: &Config) -> Result<Report, CliError> {
    if args.list {
        let items: Vec<Value> = CHECKS.iter().map(|(n, d)| json!({ "name": n, "description": d })).collect();
        let rows = CHECKS.iter().map(|(n, d)| vec![n.to_string(), d.to_string()]).collect();
        return Ok(Report::new(json!({ "checks": items }), vec!["name", "description"], rows));
    }
    let names: Vec<&str> = if args.checks.is_empty() {
        CHECKS.iter().map(|(n, _)| *n).collect()
    } else {
        args.checks.iter().map(String::as_str).collect()
    };
    let mut items = Vec::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for name in names {
        let outcome = run_check(name, cfg)?;
        ok &= outcome.passed;
        let status = if outcome.passed { "pass" } else { "fail" };
        let mut item = json!({ "name": outcome.name, "status": status, "detail": outcome.detail });
        let mut row = vec![outcome.name.to_string(), status.to_string(), outcome.detail.clone()];
        if args.timing {
            item["millis"] = json!(outcome.millis as u64);
            row.push(outcome.millis.to_string());
        }
        items.push(item);
        rows.push(row);
    }
    let header = if args.timing { vec!["name", "status", "detail", "millis"] } else { vec!["name", "status", "detail"] };
    let mut report = Report::new(json!({ "checks": items, "passed": ok }), header, rows);
    report.ok = ok;
    Ok(report)
}
