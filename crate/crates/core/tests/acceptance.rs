//! Acceptance suite. Runs each criterion in turn, prints one PASS/FAIL line
//! per criterion plus report-only stretch lines, and exits non-zero if any
//! gating criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use quadratura::bounds::{
    is_prime, mersenne_construction, prime_divisors, trustrum_upper, TOLERANCE,
};
use quadratura::geometry::validate;
use quadratura::model::{
    assignment_from_tiling, build_base_model, decode_solution, export_model, ExportFormat,
    IlpModel, VarId,
};
use quadratura::network::{
    combined_system, extract_network, layout_equations, potentials, recover_and_check, solve_sizes,
    Rational,
};
use quadratura::solver::{
    brute_force_oracle, collect_tilings, enumerate_feasible, enumerate_tilings, solve_ilp_generic,
    solve_min_squares, SolveOptions, Variant,
};
use quadratura::{Placement, Tiling};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn quilt13() -> Tiling {
    let ps = [
        (1, 1, 6),
        (1, 7, 7),
        (7, 1, 2),
        (7, 3, 3),
        (7, 6, 1),
        (8, 6, 2),
        (8, 8, 6),
        (9, 1, 2),
        (10, 3, 1),
        (10, 4, 4),
        (11, 1, 3),
    ];
    Tiling::checked(
        13,
        ps.iter()
            .map(|&(r, c, s)| Placement::new(r, c, s))
            .collect(),
    )
    .unwrap()
}

fn optimum(n: usize) -> Result<(usize, Tiling), String> {
    let r = solve_min_squares(n, &SolveOptions::default()).map_err(|e| format!("n={n}: {e}"))?;
    ensure(r.proven, || format!("n={n}: search not proven"))?;
    Ok((r.optimum, r.witness))
}

fn table_regression() -> Result<String, String> {
    let start = Instant::now();
    for (p, want) in [(2, 4), (3, 6), (5, 8), (7, 9), (11, 11), (13, 11)] {
        let (got, witness) = optimum(p)?;
        ensure(got == want, || format!("s({p}) = {got}, expected {want}"))?;
        ensure(validate(&witness).ok() && witness.len() == want, || {
            format!("bad witness for {p}")
        })?;
    }
    let t = start.elapsed();
    ensure(t <= Duration::from_secs(120), || format!("took {t:?}"))?;
    Ok(format!(
        "s(2,3,5,7,11,13) = 4,6,8,9,11,11 in {:.3}s",
        t.as_secs_f64()
    ))
}

fn uniqueness13() -> Result<String, String> {
    let start = Instant::now();
    let (best, _) = optimum(13)?;
    let all = collect_tilings(13, best, &SolveOptions::default()).map_err(|e| e.to_string())?;
    ensure(all.proven, || "collection was cut short".into())?;
    ensure(all.canonical.len() == 1, || {
        format!("{} orbits", all.canonical.len())
    })?;
    let form = all.canonical.iter().next().unwrap();
    let ms = form.multiset().unwrap().to_string();
    ensure(ms == "1^2 2^3 3^2 4^1 6^2 7^1", || format!("multiset {ms}"))?;
    ensure(*form == quilt13().canonical_form().unwrap(), || {
        "orbit differs from the quilt".into()
    })?;
    Ok(format!(
        "{} tilings with 11 squares, one orbit {ms}, {:.3}s",
        all.found,
        start.elapsed().as_secs_f64()
    ))
}

fn forced_variants() -> Result<String, String> {
    let mut report = Vec::new();
    for (size, want) in [(12, 26), (11, 16), (10, 13)] {
        let start = Instant::now();
        let opts = SolveOptions::with_variant(Variant::ForceCount { size, count: 1 });
        let r = solve_min_squares(13, &opts).map_err(|e| e.to_string())?;
        let t = start.elapsed();
        ensure(r.proven && r.optimum == want, || {
            format!("h={size}: {} (proven {})", r.optimum, r.proven)
        })?;
        ensure(r.witness.multiset().unwrap().count_of(size) == 1, || {
            format!("h={size}: witness")
        })?;
        ensure(t <= Duration::from_secs(300), || {
            format!("h={size} took {t:?}")
        })?;
        report.push(format!("h={size}:{want}"));
    }
    Ok(report.join(" "))
}

fn oracle_agreement() -> Result<String, String> {
    let start = Instant::now();
    let mut values = Vec::new();
    for n in 2..=5 {
        let (brute, _) = brute_force_oracle(n).map_err(|e| e.to_string())?;
        let model = build_base_model(n).map_err(|e| e.to_string())?;
        let (ilp, assignment) =
            solve_ilp_generic(&model, &SolveOptions::default()).map_err(|e| e.to_string())?;
        let decoded = decode_solution(&model, &assignment).map_err(|e| e.to_string())?;
        let (search, _) = optimum(n)?;
        ensure(
            brute as i64 == ilp && brute == search && decoded.len() == brute,
            || format!("n={n}: oracle {brute}, ilp {ilp}, search {search}"),
        )?;
        values.push(brute.to_string());
    }
    let t = start.elapsed();
    ensure(t <= Duration::from_secs(600), || format!("took {t:?}"))?;
    Ok(format!(
        "n=2..5 -> {} on all three, {:.3}s",
        values.join(","),
        t.as_secs_f64()
    ))
}

fn divisor_law() -> Result<String, String> {
    let mut s = BTreeMap::new();
    for n in 2..=20 {
        s.insert(n, optimum(n)?.0);
    }
    let mut composites = Vec::new();
    for n in (2..=20).filter(|&n| !is_prime(n as u64)) {
        let min = prime_divisors(n).into_iter().map(|p| s[&p]).min().unwrap();
        ensure(s[&n] == min, || {
            format!("s({n}) = {} but prime divisors give {min}", s[&n])
        })?;
        composites.push(format!("{n}:{}", s[&n]));
    }
    Ok(format!("composites {}", composites.join(" ")))
}

fn zero_residuals(t: &Tiling) -> Result<(), String> {
    let net = extract_network(t).map_err(|e| e.to_string())?;
    let rec = solve_sizes(&net).map_err(|e| e.to_string())?;
    ensure(rec.scale_dimension == 1, || "dimension".into())?;
    let pots = potentials(&net, &rec.sizes).ok_or("voltage law fails")?;
    let mut values: Vec<Rational> = rec
        .sizes
        .iter()
        .map(|&s| Rational::from_integer(s.into()))
        .collect();
    values.extend(pots);
    let sys = combined_system(&net);
    ensure(
        sys.residuals(&values)
            .iter()
            .all(|r| *r == Rational::from_integer(0.into())),
        || "nonzero Kirchhoff residual".into(),
    )?;
    let layout = layout_equations(t).map_err(|e| e.to_string())?;
    let actual: Vec<Rational> = t
        .placements()
        .iter()
        .map(|p| Rational::from_integer(p.size.into()))
        .collect();
    ensure(layout.is_satisfied_by(&actual), || {
        "nonzero layout residual".into()
    })?;
    ensure(recover_and_check(t).map_err(|e| e.to_string())?, || {
        "round trip failed".into()
    })
}

fn kirchhoff_round_trip() -> Result<String, String> {
    let net = extract_network(&quilt13()).map_err(|e| e.to_string())?;
    ensure(net.vertices.len() == 7 && net.edges.len() == 11, || {
        format!("{} vertices, {} edges", net.vertices.len(), net.edges.len())
    })?;
    let rec = solve_sizes(&net).map_err(|e| e.to_string())?;
    ensure(
        rec.sizes == [6, 7, 2, 3, 1, 2, 6, 2, 1, 4, 3] && rec.scale_dimension == 1,
        || format!("sizes {:?}", rec.sizes),
    )?;
    zero_residuals(&quilt13())?;
    let mut checked = 0;
    for n in 2..=13 {
        zero_residuals(&optimum(n)?.1).map_err(|e| format!("witness n={n}: {e}"))?;
        checked += 1;
    }
    let mut failure = None;
    let mut brute = 0;
    for n in 2..=4 {
        enumerate_tilings(n, |t| {
            brute += 1;
            if failure.is_none() {
                if let Err(e) = zero_residuals(t) {
                    failure = Some(format!("tiling {t:?}: {e}"));
                }
            }
        })
        .map_err(|e| e.to_string())?;
    }
    if let Some(f) = failure {
        return Err(f);
    }
    Ok(format!("7 vertices, 11 edges, sizes 6,7,2,3,1,2,6,2,1,4,3; {checked} witnesses and {brute} tilings round-trip"))
}

fn layout_system() -> Result<String, String> {
    let sys = layout_equations(&quilt13()).map_err(|e| e.to_string())?;
    let display: [&[usize]; 12] = [
        &[1, 2],
        &[3, 4, 5, 2],
        &[3, 4, 6, 7],
        &[8, 4, 6, 7],
        &[8, 9, 10, 7],
        &[11, 10, 7],
        &[1, 3, 8, 11],
        &[1, 4, 9, 11],
        &[1, 4, 10],
        &[1, 5, 6, 10],
        &[2, 6, 10],
        &[2, 7],
    ];
    let want: BTreeSet<Vec<usize>> = display
        .iter()
        .map(|row| {
            let mut v: Vec<usize> = row.iter().map(|k| k - 1).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let one = Rational::from_integer(1.into());
    let got: BTreeSet<Vec<usize>> = sys
        .rows
        .iter()
        .map(|r| {
            assert!(r.coefficients.values().all(|c| *c == one));
            r.coefficients.keys().copied().collect()
        })
        .collect();
    ensure(got == want, || format!("equations differ: {got:?}"))?;
    ensure(
        sys.rows
            .iter()
            .all(|r| r.rhs == Rational::from_integer(13.into())),
        || "rhs".into(),
    )?;
    let sizes: Vec<Rational> = [6, 7, 2, 3, 1, 2, 6, 2, 1, 4, 3]
        .iter()
        .map(|&s: &i64| Rational::from_integer(s.into()))
        .collect();
    ensure(sys.is_satisfied_by(&sizes), || {
        "true sizes leave a residual".into()
    })?;
    Ok(format!(
        "{} equations, identical to the displayed system, zero residual",
        sys.rows.len()
    ))
}

fn mersenne() -> Result<String, String> {
    let table = [
        (2, "1^5 2^1"),
        (3, "1^3 2^3 3^2 4^1"),
        (5, "1^3 2^3 4^3 8^3 15^2 16^1"),
    ];
    for r in 2..=10u32 {
        let t = mersenne_construction(r).map_err(|e| e.to_string())?;
        ensure(t.n() == (1 << r) - 1 && validate(&t).ok(), || {
            format!("r={r} invalid")
        })?;
        ensure(t.len() == 3 * r as usize, || {
            format!("r={r}: {} squares", t.len())
        })?;
        if let Some((_, want)) = table.iter().find(|(q, _)| *q == r) {
            let ms = t.multiset().unwrap().to_string();
            ensure(ms == *want, || format!("r={r}: {ms}"))?;
        }
    }
    Ok("r=2..10 valid with 3r squares; p=3,7,31 multisets match".into())
}

fn bound_sandwich() -> Result<String, String> {
    let mut parts = Vec::new();
    for p in [5usize, 7, 11, 13] {
        let s = optimum(p)?.0 as f64;
        let lower = (p as f64).log2().ceil();
        let upper = trustrum_upper(p).map_err(|e| e.to_string())?;
        ensure(lower <= s + TOLERANCE && s <= upper + TOLERANCE, || {
            format!("p={p}: {lower} <= {s} <= {upper}")
        })?;
        parts.push(format!("{lower}<={s}<={upper:.3}"));
    }
    Ok(parts.join(" "))
}

fn assignment_value(model: &IlpModel, a: &BTreeMap<VarId, i64>) -> Result<(), String> {
    for c in model.constraints() {
        let lhs = c.lhs(|v| a.get(&v).copied().unwrap_or(0));
        ensure(c.relation.holds(lhs, c.rhs), || {
            format!("{} violated", c.label)
        })?;
    }
    Ok(())
}

fn model_fidelity() -> Result<String, String> {
    let counts = [1, 5, 39, 471, 10667];
    for (n, &want) in (2..=6).zip(&counts) {
        let model = build_base_model(n).map_err(|e| e.to_string())?;
        let mut tilings = BTreeSet::new();
        let mut failure: Option<String> = None;
        enumerate_tilings(n, |t| {
            let sorted = t.sorted();
            if failure.is_none() {
                let a = assignment_from_tiling(&model, t);
                match a
                    .map_err(|e| e.to_string())
                    .and_then(|a| assignment_value(&model, &a))
                {
                    Ok(()) => {}
                    Err(e) => failure = Some(format!("n={n}: induced assignment: {e}")),
                }
            }
            tilings.insert(sorted);
        })
        .map_err(|e| e.to_string())?;
        let mut decoded = BTreeSet::new();
        enumerate_feasible(&model, &SolveOptions::default(), |a| {
            if failure.is_none() {
                match decode_solution(&model, a) {
                    Ok(t) => {
                        decoded.insert(t.sorted());
                    }
                    Err(e) => failure = Some(format!("n={n}: decode: {e}")),
                }
            }
        })
        .map_err(|e| e.to_string())?;
        if let Some(f) = failure {
            return Err(f);
        }
        ensure(tilings.len() == want && decoded == tilings, || {
            format!(
                "n={n}: {} tilings, {} decoded",
                tilings.len(),
                decoded.len()
            )
        })?;
    }
    let mut exports = 0;
    for n in 2..=8 {
        let model = build_base_model(n)
            .and_then(|m| m.add_y_link())
            .map_err(|e| e.to_string())?;
        for format in [ExportFormat::Lp, ExportFormat::Mps] {
            let a = export_model(&model, format);
            let b = export_model(&build_base_model(n).unwrap().add_y_link().unwrap(), format);
            ensure(a == b, || format!("n={n} export differs between runs"))?;
            exports += 1;
        }
    }
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    for format in [ExportFormat::Lp, ExportFormat::Mps] {
        let file = data.join(format!("square_4.{}", format.extension()));
        let frozen =
            std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
        ensure(
            export_model(&build_base_model(4).unwrap(), format) == frozen,
            || format!("{} changed", file.display()),
        )?;
    }
    Ok(format!(
        "bijection holds for n=2..6 ({}); {exports} exports stable",
        counts.map(|c| c.to_string()).join(",")
    ))
}

fn stretch(n: usize, want: usize, budget: Duration) -> String {
    let opts = SolveOptions {
        time_limit: Some(budget),
        ..Default::default()
    };
    let start = Instant::now();
    match solve_min_squares(n, &opts) {
        Ok(r) => {
            let verdict = if r.proven && r.optimum == want {
                "REACHED"
            } else {
                "MISSED"
            };
            format!(
                "stretch s({n}) = {} (expected {want}, proven {}) in {:.2}s: {verdict}",
                r.optimum,
                r.proven,
                start.elapsed().as_secs_f64()
            )
        }
        Err(e) => format!("stretch s({n}): {e}: MISSED"),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("small prime optima", table_regression),
        ("13x13 optimum is unique up to symmetry", uniqueness13),
        ("forced-size variants at n=13", forced_variants),
        ("oracle, ILP and search agree", oracle_agreement),
        ("divisor reduction for n<=20", divisor_law),
        ("Kirchhoff round trip", kirchhoff_round_trip),
        ("layout equations", layout_system),
        ("Mersenne construction", mersenne),
        ("bound sandwich", bound_sandwich),
        ("model fidelity", model_fidelity),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:.2}s] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:.2}s] {name}: {detail}", i + 1);
            }
        }
    }
    let _ = panic::take_hook();
    println!("{}", stretch(17, 12, Duration::from_secs(15 * 60)));
    println!("{}", stretch(19, 13, Duration::from_secs(2 * 3600)));
    println!("{}", stretch(23, 13, Duration::from_secs(2 * 3600)));
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
