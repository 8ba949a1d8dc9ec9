//! Plain-text rendering of the JSON documents. Tables are derived from the
//! JSON value only, never from the underlying computation.

use std::fmt::Write;

use serde_json::Value;

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn grid(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        writeln!(out, "{}", padded.join("  ").trim_end()).unwrap();
    };
    line(headers.to_vec(), &mut out);
    line(widths.iter().map(|w| &"--------------------------------"[..(*w).min(32)]).collect(), &mut out);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

/// `key: value` lines for every scalar leaf, with dotted paths.
fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(xs) if xs.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        _ => writeln!(out, "{prefix}: {}", cell(v)).unwrap(),
    }
}

fn crosscheck(doc: &Value) -> String {
    let mut rows = Vec::new();
    for s in doc["suites"].as_array().into_iter().flatten() {
        let failed = s["failed"].as_u64().unwrap_or(0);
        let counters: Vec<String> =
            s["counters"].as_object().into_iter().flatten().map(|(k, v)| format!("{k}={}", cell(v))).collect();
        rows.push(vec![
            cell(&s["name"]),
            if failed == 0 { "PASS".into() } else { "FAIL".into() },
            cell(&s["checks"]),
            cell(&s["failed"]),
            counters.join(" "),
        ]);
    }
    let mut out = format!(
        "crosscheck p <= {} (descent p <= {}), l in {}\n\n",
        cell(&doc["p_max"]),
        cell(&doc["descent_p_max"]),
        cell(&doc["ells"])
    );
    out += &grid(&["suite", "status", "checks", "failed", "counters"], &rows);
    for s in doc["suites"].as_array().into_iter().flatten() {
        for f in s["failures"].as_array().into_iter().flatten() {
            writeln!(out, "{}: {}", cell(&s["name"]), cell(f)).unwrap();
        }
    }
    out
}

fn volcano(doc: &Value) -> String {
    let mut rows = Vec::new();
    for c in doc["components"].as_array().into_iter().flatten() {
        let v = &c["validation"];
        let failed: Vec<String> = v["clauses"]
            .as_array()
            .into_iter()
            .flatten()
            .filter(|cl| cl["passed"] == Value::Bool(false))
            .map(|cl| cell(&cl["clause"]))
            .collect();
        rows.push(vec![
            cell(&c["size"]),
            cell(&c["m"]),
            cell(&c["v_f"]),
            c["crater"].as_array().map_or(0, Vec::len).to_string(),
            cell(&c["kronecker"]),
            cell(&v["strict"]),
            if failed.is_empty() { "ok".into() } else { failed.join(",") },
        ]);
    }
    let head = format!(
        "l = {} volcanoes on p = {}, n = {}, t = {}\n\n",
        cell(&doc["ell"]),
        cell(&doc["p"]),
        cell(&doc["n"]),
        cell(&doc["t"])
    );
    head + &grid(&["size", "m", "v_l(f)", "crater", "kronecker", "strict", "clauses"], &rows)
}

fn classes(doc: &Value) -> String {
    let rows: Vec<Vec<String>> = doc["classes"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|c| ["t", "order", "f", "d_l", "size"].iter().map(|k| cell(&c[*k])).collect())
        .collect();
    format!("isogeny classes over GF({})\n\n", cell(&doc["q"])) + &grid(&["t", "N", "f", "d_L", "size"], &rows)
}

pub fn render(doc: &Value) -> String {
    match doc["schema"].as_str().unwrap_or("") {
        s if s.contains("/crosscheck/") => crosscheck(doc),
        s if s.contains("/volcano/") => volcano(doc),
        s if s.contains("/classes/") => classes(doc),
        _ => {
            let mut out = String::new();
            flatten("", doc, &mut out);
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn generic_flattening() {
        let doc = json!({"schema": "x/v1", "a": {"b": 1, "c": [1, 2]}, "d": [{"e": null}]});
        assert_eq!(render(&doc), "a.b: 1\na.c: [1,2]\nd[0].e: -\nschema: x/v1\n");
    }

    #[test]
    fn crosscheck_table_marks_failures() {
        let doc = json!({"schema": "volcano-sha/crosscheck/v1", "p_max": 7, "descent_p_max": 7, "ells": [2],
            "suites": [{"name": "volcano", "checks": 3, "failed": 1, "counters": {"strict": 3}, "failures": ["degree"]}]});
        let t = render(&doc);
        assert!(t.contains("FAIL") && t.contains("volcano: degree") && t.contains("strict=3"));
    }
}
