//! The named verification checks behind `capcalc verify`.

use std::collections::BTreeSet;
use std::time::Instant;

use capcalc_core::capacity::{
    capacity_closed_form, capacity_search, class_b_ki, class_e_an, class_e_bn, decimal_error, gap_relative_error,
    staircase_point, table_t1_decimals, verify_ghost, verify_table_t1, b_ki_degree,
};
use capcalc_core::cfrac::{cf_expand, farey_weights};
use capcalc_core::classes::{find_center, is_diophantine, is_member, ExceptionalClass};
use capcalc_core::ech::{k_lower_bound, one_sided_bound, staircase_triangle, staircase_triangle_formula, verify_table_t0};
use capcalc_core::fib::{g, identity_suite};
use capcalc_core::num::{decimal_half_ulp, format_rational, int, ratio, Rational};
use capcalc_core::report::NamedCheck;
use capcalc_core::search::{enumerate_members, inter_sol_less, sol_less};
use capcalc_core::tables::{self, z_point, HIDDEN_TABLE, LATTICE_TABLE, SHORT_CLASSES};
use capcalc_core::weights::{last_numerator, mirror_product, mirror_product_direct, weight_expansion, weighted_coefficient_sums};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::config::Config;
use crate::CliError;

/// Every check with a one-line description, in run order.
pub const CHECKS: [(&str, &str); 12] = [
    ("eekfin", "members of E with d ≤ 6 and length ≤ 8 are exactly the seven short classes"),
    ("capacities", "c at the integers 1..9"),
    ("table_t1", "centres, local forms, μ, interval ends and gaps of the obstruction table"),
    ("table_t0", "lattice counts and N(d) for the lattice and hidden-class tables"),
    ("stairs", "E(b_n), E(a_n) for n ≤ 8 and c(b_n)"),
    ("ghost", "E(b_k(i)) for k ≤ 4, i ≤ 5, and the ghost-stairs profiles"),
    ("mirror", "the mirror product and coefficient sums for p, q ≤ 100"),
    ("farey_equiv", "Farey weights equal weight expansions for p, q ≤ 50"),
    ("identities", "the Fibonacci identity suite for indices ≤ 30"),
    ("zk_search", "point searches at 57/8 and at z_1..z_8"),
    ("interval_search", "interval searches on [7 + 1/(k+1), 7 + 1/k]"),
    ("ech_bound", "the lattice lower bound K(a) is at least c(a) at the table centres and b_n"),
];

/// The outcome of one check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

fn c(text: &str) -> ExceptionalClass {
    tables::class(text).normalized()
}

fn summarize(checks: &[NamedCheck]) -> (bool, String) {
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    if failed.is_empty() {
        (true, format!("{} sub-checks passed", checks.len()))
    } else {
        (false, failed.join("; "))
    }
}

fn sorted(classes: Vec<ExceptionalClass>) -> Vec<ExceptionalClass> {
    let set: BTreeSet<ExceptionalClass> = classes.into_iter().map(|c| c.normalized()).collect();
    set.into_iter().collect()
}

fn show(classes: &[ExceptionalClass]) -> String {
    let parts: Vec<String> = classes.iter().map(|c| c.compact()).collect();
    format!("[{}]", parts.join(", "))
}

fn eekfin() -> Result<(bool, String), CliError> {
    let found: BTreeSet<ExceptionalClass> = enumerate_members(6, 8).into_iter().map(|c| c.normalized()).collect();
    let expected: BTreeSet<ExceptionalClass> = SHORT_CLASSES.iter().map(|s| c(s)).collect();
    let ok = found == expected;
    let list: Vec<ExceptionalClass> = found.into_iter().collect();
    Ok((ok, format!("found {}", show(&list))))
}

fn capacities() -> Result<(bool, String), CliError> {
    let expected = [(1, "1"), (2, "2"), (3, "2"), (4, "2"), (5, "5/2"), (6, "5/2"), (7, "8/3"), (8, "17/6"), (9, "3")];
    let mut bad = Vec::new();
    for (a, want) in expected {
        let value = capacity_closed_form(&int(a))?.value.to_string();
        if value != want {
            bad.push(format!("c({a}) = {value}"));
        }
        if a >= 7 {
            let searched = capacity_search(&int(a), capcalc_core::capacity::DEFAULT_SEARCH_DEGREE)?.value.to_string();
            if searched != want {
                bad.push(format!("search c({a}) = {searched}"));
            }
        }
    }
    Ok(if bad.is_empty() { (true, "c(1..9) = 1, 2, 2, 2, 5/2, 5/2, 8/3, 17/6, 3".into()) } else { (false, bad.join("; ")) })
}

fn table_t1() -> Result<(bool, String), CliError> {
    let mut checks = verify_table_t1()?;
    for row in table_t1_decimals()? {
        let ok_u = decimal_error(&row.u, row.u_printed) <= decimal_half_ulp(row.u_printed);
        let ok_v = decimal_error(&row.v, row.v_printed) <= decimal_half_ulp(row.v_printed);
        let ok_gap = gap_relative_error(&row.gap, row.gap_printed) <= ratio(1, 100);
        checks.push(NamedCheck::new(
            format!("{} decimals", row.class),
            ok_u && ok_v && ok_gap,
            format!("u = {}, v = {}, gap = {}e-6", row.u.to_decimal(6), row.v.to_decimal(6), row.gap.scale(&int(1_000_000)).to_decimal(2)),
        ));
    }
    Ok(summarize(&checks))
}

fn table_t0() -> Result<(bool, String), CliError> {
    Ok(summarize(&verify_table_t0()?))
}

fn stairs() -> Result<(bool, String), CliError> {
    let mut bad = Vec::new();
    for n in 0..=8 {
        let mut classes = vec![class_e_bn(n)?];
        if n >= 1 {
            classes.push(class_e_an(n)?);
        }
        for e in classes {
            if !is_diophantine(&e) || !is_member(&e) {
                bad.push(format!("{} (n = {n}) is not an exceptional class", e.compact()));
            }
        }
        let s = staircase_point(n)?;
        let want = Rational::new(g(n + 2), g(n + 1));
        if capacity_closed_form(&s.b_n)?.value != want.clone() || s.c_at_b_n != want {
            bad.push(format!("c(b_{n}) ≠ {}", format_rational(&want)));
        }
    }
    let literal = [
        (2, "10;4^6,1^5"),
        (3, "65;25^6,19,6^3,1^7"),
        (4, "442;169^6,142,27^5,7^3,6,1^7"),
    ];
    for (n, text) in literal {
        if class_e_an(n)? != tables::class(text) {
            bad.push(format!("E(a_{n}) = {}", class_e_an(n)?.compact()));
        }
    }
    Ok(if bad.is_empty() { (true, "n = 0..8".into()) } else { (false, bad.join("; ")) })
}

fn ghost() -> Result<(bool, String), CliError> {
    let mut checks = Vec::new();
    for k in 1..=4 {
        for i in 0..=5 {
            let e = class_b_ki(k, i)?;
            let mut fails = Vec::new();
            if !is_diophantine(&e) {
                fails.push("not Diophantine");
            }
            if !is_member(&e) {
                fails.push("not in E");
            }
            if BigInt::from(e.d) != b_ki_degree(k, i) {
                fails.push("degree");
            }
            if i >= 3 && find_center(&e)?.is_some() {
                fails.push("has a centre");
            }
            checks.push(NamedCheck::new(format!("b_{k}({i}) {}", e.compact()), fails.is_empty(), fails.join(", ")));
        }
        checks.push(verify_ghost(k)?);
    }
    Ok(summarize(&checks))
}

fn mirror() -> Result<(bool, String), CliError> {
    let mut count = 0;
    for q in 1..=100i64 {
        for p in (q + 1)..=100i64 {
            let a = ratio(p, q);
            if a.denom().to_i64() != Some(q) {
                continue;
            }
            count += 1;
            let n = cf_expand(&a)?.last_index();
            let even = n % 2 == 0;
            let expected = if even { last_numerator(&a)? } else { BigInt::zero() };
            let fast = mirror_product(&a)?;
            let direct = mirror_product_direct(&a)?;
            let sums = weighted_coefficient_sums(&a)?;
            let want_sums = if even { (a.clone(), Rational::zero()) } else { (Rational::zero(), int(1)) };
            if fast != expected || direct != expected || sums != want_sums {
                return Ok((false, format!("fails at a = {p}/{q}")));
            }
        }
    }
    Ok((true, format!("{count} fractions")))
}

fn farey() -> Result<(bool, String), CliError> {
    let mut count = 0;
    for q in 1..=50i64 {
        for p in q..=50i64 {
            let a = ratio(p, q);
            count += 1;
            let farey = farey_weights(&a)?;
            if farey != weight_expansion(&a)?.flatten() {
                return Ok((false, format!("fails at a = {p}/{q}")));
            }
        }
    }
    Ok((true, format!("{count} fractions")))
}

fn identities() -> Result<(bool, String), CliError> {
    Ok(summarize(&identity_suite(30)))
}

fn zk_search(cfg: &Config) -> Result<(bool, String), CliError> {
    let mut bad = Vec::new();
    let found = sorted(sol_less(&ratio(57, 8), 48)?);
    if found != vec![c("48;18^7,3,2^7")] {
        bad.push(format!("57/8: {}", show(&found)));
    }
    for k in 1..=8 {
        let d = cfg.point_bound(k).ok_or_else(|| CliError::Usage(format!("no point bound for k = {k}")))?;
        let found = sorted(sol_less(&z_point(k), d)?);
        let expected = match k {
            6 => vec![c("40;15^7,2^6,1^2")],
            7 => vec![c("64;24^7,3^7,1^2")],
            _ => Vec::new(),
        };
        if found != expected {
            bad.push(format!("z_{k}: {}", show(&found)));
        }
    }
    Ok(if bad.is_empty() { (true, "57/8 and z_1..z_8 as expected".into()) } else { (false, bad.join("; ")) })
}

fn interval_search(cfg: &Config) -> Result<(bool, String), CliError> {
    let mut bad = Vec::new();
    for k in 1..=8 {
        let d = cfg.interval_bound(k).ok_or_else(|| CliError::Usage(format!("no interval bound for k = {k}")))?;
        let found = sorted(inter_sol_less(k, d)?);
        let expected = if k == 4 { vec![c("59;22^7,5^3,4,1^3")] } else { Vec::new() };
        if found != expected {
            bad.push(format!("k = {k}: {}", show(&found)));
        }
    }
    Ok(if bad.is_empty() { (true, "k = 1..8 as expected".into()) } else { (false, bad.join("; ")) })
}

/// Anchor window used for the table centres.
pub const ECH_WINDOW: i64 = 64;

fn ech_bound() -> Result<(bool, String), CliError> {
    let mut bad = Vec::new();
    let centers = LATTICE_TABLE.iter().map(|r| r.center).chain(HIDDEN_TABLE.iter().map(|r| r.center));
    for pq in centers {
        let a = tables::center(pq);
        let k = k_lower_bound(&a, ECH_WINDOW, ECH_WINDOW)?;
        let cap = capacity_closed_form(&a)?.value;
        if cap < k.value.clone() {
            bad.push(format!("K({}) ≥ {} < c = {}", format_rational(&a), format_rational(&k.value), cap));
        }
    }
    for n in 0..=6 {
        let s = staircase_point(n)?;
        let t = staircase_triangle(n)?;
        let gn = g(n).to_i64().expect("small");
        let bound = one_sided_bound(&s.b_n, 0, gn)?;
        if BigInt::from(t.count_by_rows()) != staircase_triangle_formula(n) {
            bad.push(format!("#T_{n}"));
        }
        if capacity_closed_form(&s.b_n)?.value < bound.value.clone() {
            bad.push(format!("K(b_{n}) ≥ {}", format_rational(&bound.value)));
        }
    }
    Ok(if bad.is_empty() { (true, "13 table centres and b_0..b_6".into()) } else { (false, bad.join("; ")) })
}

/// Runs one named check.
pub fn run_check(name: &str, cfg: &Config) -> Result<CheckOutcome, CliError> {
    let (name, _) = CHECKS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CliError::Usage(format!("unknown check `{name}` (try --list)")))?;
    let start = Instant::now();
    let (passed, detail) = match *name {
        "eekfin" => eekfin()?,
        "capacities" => capacities()?,
        "table_t1" => table_t1()?,
        "table_t0" => table_t0()?,
        "stairs" => stairs()?,
        "ghost" => ghost()?,
        "mirror" => mirror()?,
        "farey_equiv" => farey()?,
        "identities" => identities()?,
        "zk_search" => zk_search(cfg)?,
        "interval_search" => interval_search(cfg)?,
        "ech_bound" => ech_bound()?,
        _ => unreachable!("CHECKS lists every name"),
    };
    Ok(CheckOutcome { name, passed, detail, millis: start.elapsed().as_millis() })
}
