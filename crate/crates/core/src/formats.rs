//! Text inputs (rule descriptions, generating matrices, weights,
//! experiment plans) and CSV outputs.
//!
//! Text inputs are line oriented; `#` starts a comment and blank lines are
//! ignored. Parse errors carry 1-based line numbers.

use std::collections::BTreeMap;

use crate::arith::PolyZb;
use crate::experiment::{ExperimentPlan, ExperimentRow, Integrand};
use crate::nets::{GeneratingMatrices, PolyLatticeSpec};
use crate::search::Candidate;
use crate::sobolev::Weights;
use crate::transforms::RngSpec;
use crate::{Error, Result};

/// Renders a float with 17 significant digits, trailing zeros removed.
/// Values with decimal exponent in `-5..17` are positional, others use
/// `e` notation.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if neg { "-" } else { "" };
    if (-5..17).contains(&exp) {
        let body = if exp < 0 {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                format!("{}{}", digits, "0".repeat(int_len - digits.len()))
            } else {
                format!("{}.{}", &digits[..int_len], &digits[int_len..])
            }
        };
        format!("{sign}{body}")
    } else {
        let frac = &digits[1..];
        if frac.is_empty() {
            format!("{sign}{}e{exp}", &digits[..1])
        } else {
            format!("{sign}{}.{}e{exp}", &digits[..1], frac)
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-comment lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// `key=value` pairs; duplicate keys are rejected.
fn key_values(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut map = BTreeMap::new();
    for (ln, l) in lines(text) {
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| perr(ln, format!("expected key=value, got {l:?}")))?;
        let k = k.trim().to_ascii_lowercase();
        if map.insert(k.clone(), (ln, v.trim().to_string())).is_some() {
            return Err(perr(ln, format!("duplicate key {k:?}")));
        }
    }
    Ok(map)
}

fn at_line<T>(ln: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => perr(ln, other.to_string()),
    })
}

fn num<T: std::str::FromStr>(ln: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| perr(ln, format!("bad value {v:?} for {key}")))
}

/// Parses `a;b;c` where each part is a comma-separated coefficient list.
pub fn parse_poly_list(base: u32, s: &str) -> Result<Vec<PolyZb>> {
    s.split(';').map(|p| PolyZb::parse(base, p)).collect()
}

/// Inverse of [`parse_poly_list`].
pub fn format_poly_list(q: &[PolyZb]) -> String {
    q.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";")
}

/// Rule file: `b=`, `m=`, `n=`, `p=` and either `q=` (list
/// separated by `;`) or `q1=`, `q2=`, ... lines.
pub fn parse_spec(text: &str) -> Result<PolyLatticeSpec> {
    let kv = key_values(text)?;
    let get = |k: &str| kv.get(k).ok_or_else(|| perr(0, format!("missing key {k:?}")));
    let (lb, b) = get("b")?;
    let base: u32 = num(*lb, "b", b)?;
    let (lm, m) = get("m")?;
    let m: usize = num(*lm, "m", m)?;
    let (ln_, n) = get("n")?;
    let n: usize = num(*ln_, "n", n)?;
    let (lp, p) = get("p")?;
    let p = at_line(*lp, PolyZb::parse(base, p))?;
    let mut q = Vec::new();
    let mut last_line = *lp;
    if let Some((lq, v)) = kv.get("q") {
        q = at_line(*lq, parse_poly_list(base, v))?;
        last_line = *lq;
    } else {
        for j in 1.. {
            match kv.get(&format!("q{j}")) {
                Some((lq, v)) => {
                    q.push(at_line(*lq, PolyZb::parse(base, v))?);
                    last_line = *lq;
                }
                None => break,
            }
        }
    }
    if let Some((k, (l, _))) = kv
        .iter()
        .find(|(k, _)| !matches!(k.as_str(), "b" | "m" | "n" | "p" | "q") && !is_q_index(k, q.len()))
    {
        return Err(perr(*l, format!("unknown key {k:?}")));
    }
    at_line(last_line, PolyLatticeSpec::new(base, m, n, p, q))
}

fn is_q_index(k: &str, count: usize) -> bool {
    k.strip_prefix('q')
        .and_then(|d| d.parse::<usize>().ok())
        .is_some_and(|j| j >= 1 && j <= count)
}

pub fn format_spec(spec: &PolyLatticeSpec) -> String {
    let mut s = format!(
        "b={}\nm={}\nn={}\np={}\n",
        spec.base(),
        spec.m(),
        spec.n(),
        spec.modulus()
    );
    for (j, q) in spec.q().iter().enumerate() {
        s.push_str(&format!("q{}={}\n", j + 1, q));
    }
    s
}

/// Generating matrices: header `b m n s`, then `s` blocks of `n` rows with
/// `m` digits each.
pub fn parse_net(text: &str) -> Result<GeneratingMatrices> {
    let mut it = lines(text);
    let (hl, header) = it.next().ok_or_else(|| perr(0, "empty net file"))?;
    let h: Vec<usize> = header
        .split_whitespace()
        .map(|t| num(hl, "header", t))
        .collect::<Result<_>>()?;
    let [b, m, n, s] = h[..] else {
        return Err(perr(hl, "header must be `b m n s`"));
    };
    let mut mats = Vec::with_capacity(s);
    for _ in 0..s {
        let mut mat = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, l) = it.next().ok_or_else(|| perr(0, "net file ends early"))?;
            let row: Vec<u8> = l
                .split_whitespace()
                .map(|t| num(ln, "digit", t))
                .collect::<Result<_>>()?;
            if row.len() != m {
                return Err(perr(ln, format!("expected {m} digits, got {}", row.len())));
            }
            if let Some(&d) = row.iter().find(|&&d| d as usize >= b) {
                return Err(perr(ln, format!("digit {d} out of range for base {b}")));
            }
            mat.push(row);
        }
        mats.push(mat);
    }
    if let Some((ln, _)) = it.next() {
        return Err(perr(ln, "trailing content after the last matrix"));
    }
    at_line(hl, GeneratingMatrices::new(b as u32, n, m, mats))
}

pub fn format_net(g: &GeneratingMatrices) -> String {
    let mut s = format!("{} {} {} {}\n", g.base(), g.m(), g.n(), g.dim());
    for j in 0..g.dim() {
        for r in 0..g.n() {
            let row: Vec<String> = (0..g.m()).map(|c| g.entry(j, r, c).to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
    }
    s
}

/// Weights: `s=`, then `product: g1,g2,...` or one `table: mask=value` line
/// per subset (missing subsets are 0), optional `gamma_empty=`.
pub fn parse_weights(text: &str) -> Result<Weights> {
    let mut dim: Option<(usize, usize)> = None;
    let mut product: Option<(usize, Vec<f64>)> = None;
    let mut table: BTreeMap<usize, f64> = BTreeMap::new();
    let mut table_line = 0;
    let mut empty: Option<f64> = None;
    for (ln, l) in lines(text) {
        if let Some(rest) = l.strip_prefix("product:") {
            let g = rest
                .split(',')
                .map(|t| num(ln, "product weight", t.trim()))
                .collect::<Result<Vec<f64>>>()?;
            product = Some((ln, g));
        } else if let Some(rest) = l.strip_prefix("table:") {
            let (mask, v) = rest
                .split_once('=')
                .ok_or_else(|| perr(ln, "expected `table: mask=value`"))?;
            let mask: usize = num(ln, "mask", mask.trim())?;
            if table.insert(mask, num(ln, "table weight", v.trim())?).is_some() {
                return Err(perr(ln, format!("duplicate mask {mask}")));
            }
            table_line = ln;
        } else if let Some((k, v)) = l.split_once('=') {
            match k.trim() {
                "s" => dim = Some((ln, num(ln, "s", v.trim())?)),
                "gamma_empty" => empty = Some(num(ln, "gamma_empty", v.trim())?),
                other => return Err(perr(ln, format!("unknown key {other:?}"))),
            }
        } else {
            return Err(perr(ln, format!("unrecognised line {l:?}")));
        }
    }
    let (sl, s) = dim.ok_or_else(|| perr(0, "missing `s=`"))?;
    let ge = empty.unwrap_or(1.0);
    match (product, table.is_empty()) {
        (Some((pl, g)), true) => {
            if g.len() != s {
                return Err(perr(pl, format!("expected {s} product weights, got {}", g.len())));
            }
            at_line(pl, Weights::product_with_empty(g, ge))
        }
        (None, false) => {
            if s == 0 || s > crate::sobolev::MAX_TABLE_DIM {
                return Err(perr(sl, "weight tables need 1 <= s <= 16"));
            }
            let mut values = vec![0.0; 1 << s];
            for (&mask, &v) in &table {
                if mask == 0 || mask >= 1 << s {
                    return Err(perr(table_line, format!("mask {mask} out of range")));
                }
                values[mask] = v;
            }
            values[0] = ge;
            at_line(table_line, Weights::table(s, values))
        }
        (Some((pl, _)), false) => Err(perr(pl, "use either product or table weights, not both")),
        (None, true) => Err(perr(sl, "no weights given")),
    }
}

/// Experiment plan as `key=value` lines. Keys: `base`, `alpha`, `m_min`,
/// `m_max`, `weights` (product list), `replicates`, `candidates`,
/// `integrand` (`kernel` or `smooth:c`), `seed`, `stream`, `classic`,
/// `truncation`, `cwalsh`, `shift_precision`.
pub fn parse_plan(text: &str) -> Result<ExperimentPlan> {
    let kv = key_values(text)?;
    let get = |k: &str| kv.get(k).ok_or_else(|| perr(0, format!("missing key {k:?}")));
    let (l, v) = get("base")?;
    let base = num(*l, "base", v)?;
    let (l, v) = get("alpha")?;
    let alpha = num(*l, "alpha", v)?;
    let (l, v) = get("m_min")?;
    let m_min = num(*l, "m_min", v)?;
    let (l, v) = get("m_max")?;
    let m_max = num(*l, "m_max", v)?;
    let (wl, wv) = get("weights")?;
    let g = wv
        .split(',')
        .map(|t| num(*wl, "weights", t.trim()))
        .collect::<Result<Vec<f64>>>()?;
    let weights = at_line(*wl, Weights::product(g))?;
    let mut plan = ExperimentPlan::new(base, alpha, m_min, m_max, weights);
    for (k, (l, v)) in &kv {
        match k.as_str() {
            "base" | "alpha" | "m_min" | "m_max" | "weights" => {}
            "replicates" => plan.replicates = num(*l, k, v)?,
            "candidates" => plan.candidates = num(*l, k, v)?,
            "seed" => plan.rng.seed = num(*l, k, v)?,
            "stream" => plan.rng.stream = num(*l, k, v)?,
            "classic" => plan.classic = num(*l, k, v)?,
            "truncation" => plan.truncation = Some(num(*l, k, v)?),
            "cwalsh" => plan.c_walsh = Some(num(*l, k, v)?),
            "shift_precision" => plan.shift_precision = Some(num(*l, k, v)?),
            "integrand" => {
                plan.integrand = match v.split_once(':') {
                    None if v == "kernel" => Integrand::Kernel,
                    Some(("smooth", c)) => Integrand::Smooth { c: num(*l, k, c.trim())? },
                    _ => return Err(perr(*l, format!("unknown integrand {v:?}"))),
                }
            }
            other => return Err(perr(*l, format!("unknown key {other:?}"))),
        }
    }
    at_line(0, plan.validate())?;
    Ok(plan)
}

/// Points as CSV rows of floats (no header).
pub fn parse_points_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        let row = rec
            .iter()
            .map(|t| num(line, "coordinate", t))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = out.first().map(|r: &Vec<f64>| r.len()) {
            if row.len() != first {
                return Err(perr(line, format!("expected {first} columns, got {}", row.len())));
            }
        }
        out.push(row);
    }
    if out.is_empty() {
        return Err(perr(0, "no points"));
    }
    Ok(out)
}

fn csv_string(header: Option<&[&str]>, rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().flexible(false).from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h)?;
    }
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// One row per point, one column per coordinate, no header.
pub fn points_csv(rows: &[Vec<String>]) -> Result<String> {
    csv_string(None, rows.iter().cloned())
}

/// Ranking CSV. `seconds` is left empty unless given.
pub fn search_csv(ranked: &[Candidate], seconds: Option<f64>) -> Result<String> {
    let header = ["rank", "q", "bound_value", "T", "C_walsh", "seconds"];
    csv_string(
        Some(&header),
        ranked.iter().enumerate().map(|(i, c)| {
            vec![
                (i + 1).to_string(),
                format_poly_list(&c.q),
                format_float(c.merit.value),
                c.merit.truncation.to_string(),
                format_float(c.merit.c_walsh),
                seconds.map(format_float).unwrap_or_default(),
            ]
        }),
    )
}

/// One bound report row.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub q: Vec<PolyZb>,
    pub p: PolyZb,
    pub truncation: u32,
    pub c_walsh: f64,
    pub bound_value: f64,
    /// `None` when `alpha < 2`.
    pub existence_bound: Option<f64>,
    pub lambda_opt: Option<f64>,
}

pub fn bound_csv(rows: &[BoundRow]) -> Result<String> {
    let header = ["q", "p", "T", "C_walsh", "bound_value", "existence_bound", "lambda_opt"];
    csv_string(
        Some(&header),
        rows.iter().map(|r| {
            vec![
                format_poly_list(&r.q),
                r.p.to_string(),
                r.truncation.to_string(),
                format_float(r.c_walsh),
                format_float(r.bound_value),
                r.existence_bound.map(format_float).unwrap_or_default(),
                r.lambda_opt.map(format_float).unwrap_or_default(),
            ]
        }),
    )
}

pub fn experiment_csv(rows: &[ExperimentRow]) -> Result<String> {
    let header = [
        "m",
        "N",
        "rmse_estimate",
        "stderr",
        "theorem51_bound",
        "slope_so_far",
        "clamped",
        "n",
        "q",
    ];
    csv_string(
        Some(&header),
        rows.iter().map(|r| {
            vec![
                r.m.to_string(),
                r.points.to_string(),
                format_float(r.rmse),
                format_float(r.std_error),
                format_float(r.bound),
                r.slope_so_far.map(format_float).unwrap_or_default(),
                (r.clamped as u8).to_string(),
                r.n.to_string(),
                format_poly_list(&r.q),
            ]
        }),
    )
}

/// `RngSpec` from a seed, stream 0.
pub fn rng_from_seed(seed: u64) -> RngSpec {
    RngSpec::new(seed, 0)
}
