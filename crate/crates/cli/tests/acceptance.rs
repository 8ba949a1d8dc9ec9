//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::{Command, Output};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;

use volcano_sha::arith;
use volcano_sha::ec::enumerate_classes;
use volcano_sha::gf::Field;
use volcano_sha::volcano::build_graph;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn crosscheck_p61() -> Output {
    Command::new(env!("CARGO_BIN_EXE_volcano"))
        .args(["crosscheck", "--p-max", "61", "--ell", "2,3", "--no-cache"])
        .env_remove("VOLCANO_CACHE_DIR")
        .output()
        .expect("binary runs")
}

/// Every strict component of every l-volcano, 5 <= p <= 199, l in {2, 3, 5}.
fn volcano_sweep() -> Verdict {
    let primes: Vec<u64> = (5..=199).filter(|&p| arith::is_prime(p)).collect();
    let per_prime: Vec<(u64, u64, Vec<String>)> = primes
        .par_iter()
        .map(|&p| {
            let k = Field::new(p, 1).unwrap();
            let table = enumerate_classes(&k).unwrap();
            let (mut strict, mut total, mut bad) = (0u64, 0u64, Vec::new());
            for t in table.ordinary_traces() {
                for ell in [2u64, 3, 5] {
                    if ell == p {
                        continue;
                    }
                    for g in build_graph(&k, t, ell).unwrap() {
                        total += 1;
                        if !g.is_strict() {
                            continue;
                        }
                        strict += 1;
                        let report = g.validate();
                        if !report.passed() || g.height_param() - 1 != g.conductor_valuation() {
                            let names: Vec<&str> = report.failures().map(|c| c.clause).collect();
                            bad.push(format!("p={p} t={t} l={ell}: {names:?}"));
                        }
                    }
                }
            }
            (strict, total, bad)
        })
        .collect();
    let strict: u64 = per_prime.iter().map(|r| r.0).sum();
    let total: u64 = per_prime.iter().map(|r| r.1).sum();
    let bad: Vec<&String> = per_prime.iter().flat_map(|r| &r.2).collect();
    verdict(
        bad.is_empty() && strict > 0,
        format!("{strict} strict of {total} components, {} failing {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()),
    )
}

fn suite<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["suites"].as_array().unwrap().iter().find(|s| s["name"] == name).unwrap_or_else(|| panic!("suite {name}"))
}

fn counter(s: &Value, key: &str) -> u64 {
    s["counters"][key].as_u64().unwrap_or(0)
}

fn clean(s: &Value) -> bool {
    s["failed"] == 0 && s["checks"].as_u64().unwrap_or(0) > 0
}

fn describe(s: &Value) -> String {
    let first = s["failures"].get(0).and_then(Value::as_str).unwrap_or("none");
    format!("{}: {} checks, {} failed (first: {first})", s["name"].as_str().unwrap(), s["checks"], s["failed"])
}

fn main() {
    let start = Instant::now();
    let sweep = std::thread::spawn(volcano_sweep);
    let run1 = crosscheck_p61();
    let run2 = crosscheck_p61();
    let doc: Value = serde_json::from_slice(&run1.stdout).expect("crosscheck emits JSON");

    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    results.push((1, "volcano validation sweep p <= 199, l in {2,3,5}", sweep.join().unwrap()));

    let milne = suite(&doc, "milne");
    results.push((
        2,
        "Milne identity #Sha(E/k(E)) = [End(E):Z[pi]]^2 vs oracle, p <= 61",
        verdict(clean(milne) && counter(milne, "nontrivial_f") > 0, describe(milne)),
    ));

    let bsd = suite(&doc, "bsd");
    results.push((
        3,
        "BSD identity #Sha R = 4q - t^2, F = E and downward paths of degree <= l^3",
        verdict(clean(bsd) && counter(bsd, "same") > 0 && counter(bsd, "downward") > 0, describe(bsd)),
    ));

    let (sigma, sigma_b) = (suite(&doc, "sigma"), suite(&doc, "sigma_b"));
    results.push((
        4,
        "sigma triples: legal, a + c = b, b = [l | q-1] + rank F[l](k), c = 2 iff clause 1, >= 10 non-rational",
        verdict(
            clean(sigma) && clean(sigma_b) && counter(sigma, "nonrational") >= 10,
            format!(
                "{}; {}; b = 1 + rank F[l](k) in {} of {} rational instances",
                describe(sigma),
                describe(sigma_b),
                counter(sigma_b, "b_equals_1_plus_rank"),
                counter(sigma_b, "instances")
            ),
        ),
    ));

    let oracle = suite(&doc, "oracle");
    let all_n = [2, 3, 4, 8, 9].iter().all(|n| counter(oracle, &format!("n{n}")) > 0);
    results.push((
        5,
        "oracle Sha[n] = gcd(n, n_O)^2 for >= 1000 pairs, n in {2,3,4,8,9}",
        verdict(
            clean(oracle) && all_n && counter(oracle, "pairs") >= 1000,
            format!("{}; pairs = {}", describe(oracle), counter(oracle, "pairs")),
        ),
    ));

    let noniso = suite(&doc, "non_isogenous");
    results.push((
        6,
        "non-isogenous Sha = (#E - #F)^2 for >= 200 pairs, equal traces never routed there",
        verdict(
            clean(noniso) && counter(noniso, "pairs") >= 200 && counter(noniso, "equal_trace_rejections") > 0,
            format!("{}; pairs = {}", describe(noniso), counter(noniso, "pairs")),
        ),
    ));

    let torsion = suite(&doc, "full_torsion");
    results.push((
        7,
        "full torsion E[2] => h_2 >= 1, E[4] => h_2 >= 2",
        verdict(
            clean(torsion) && counter(torsion, "full_2") > 0 && counter(torsion, "full_4") > 0,
            format!("{}; E[2]: {}, E[4]: {}", describe(torsion), counter(torsion, "full_2"), counter(torsion, "full_4")),
        ),
    ));

    let engine = suite(&doc, "engine");
    let covered = ["hasse", "group_law", "velu", "factorizations"].iter().all(|k| counter(engine, k) > 0);
    results.push((
        8,
        "engine: group law, Hasse bound, Velu trace preservation, factorization",
        verdict(clean(engine) && covered, describe(engine)),
    ));

    results.push((
        9,
        "determinism: two crosscheck --p-max 61 runs are byte-identical",
        verdict(
            run1.stdout == run2.stdout && !run1.stdout.is_empty(),
            format!("{} bytes vs {} bytes", run1.stdout.len(), run2.stdout.len()),
        ),
    ));

    let mut failed = 0;
    for (n, name, v) in &results {
        println!("criterion {n} [{}] {name} -- {}", if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("acceptance: {} passed, {failed} failed in {:.0?}", results.len() - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
