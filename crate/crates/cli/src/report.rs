//! Text and JSON reports. JSON is written by hand so that key order and
//! float formatting (17 significant digits) never depend on a serializer.

use std::fmt::Write;

use snewton::scalar::fmt_json;
use snewton::{Job, Matrix, NewtonRun, PadeApproximant, Series, StartClassification, StepRecord};

fn quote(s: &str) -> String {
    serde_json::Value::String(s.to_string()).to_string()
}

pub fn order_text(r: Option<i64>) -> String {
    r.map_or_else(|| "inf".to_string(), |r| r.to_string())
}

fn order_json(r: Option<i64>) -> String {
    r.map_or_else(|| "\"inf\"".to_string(), |r| r.to_string())
}

fn opt_json<V: ToString>(v: Option<V>) -> String {
    v.map_or_else(|| "null".to_string(), |v| v.to_string())
}

pub fn classification_text(c: &StartClassification) -> String {
    match c.rank {
        Some(r) => format!("{} (augmented Jacobian rank {} of {})\n", c.kind.as_str(), r, c.full_rank),
        None => format!("{}\n", c.kind.as_str()),
    }
}

pub fn classification_json(c: &StartClassification) -> String {
    format!(
        "{{\"classification\": {}, \"steps\": [], \"rank\": {}, \"full_rank\": {}}}\n",
        quote(c.kind.as_str()),
        opt_json(c.rank),
        c.full_rank
    )
}

fn step_json(run: usize, index: usize, s: &StepRecord) -> String {
    format!(
        "{{\"run\": {}, \"step\": {}, \"work_order\": {}, \"a\": {}, \"b\": {}, \"leading_rank\": {}, \"path\": {}, \"exact\": {}, \"accepted\": {}, \"residual_order\": {}}}",
        run,
        index + 1,
        s.work_order,
        s.a,
        opt_json(s.b),
        s.leading_rank,
        quote(s.path.as_str()),
        s.exact,
        s.accepted,
        order_json(s.residual_order)
    )
}

fn named_series_json(names: &[String], z: &[Series]) -> String {
    let items: Vec<String> = names
        .iter()
        .zip(z)
        .map(|(n, s)| format!("{{\"name\": {}, \"series\": {}}}", quote(n), s.to_json()))
        .collect();
    format!("[{}]", items.join(", "))
}

fn matrix_json(m: &Matrix<f64>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let row: Vec<String> = m
                .row(i)
                .iter()
                .map(|c| format!("[{}, {}]", fmt_json(c.re), fmt_json(c.im)))
                .collect();
            format!("[{}]", row.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(",\n      "))
}

pub struct SolveReport<'a> {
    pub job: &'a Job<f64>,
    pub classification: Option<&'a StartClassification>,
    pub runs: &'a [NewtonRun<f64>],
    /// Solutions mapped back through the transforms, with their residual order.
    pub originals: &'a [Option<(Vec<Series>, Option<i64>)>],
    pub blocks: Option<&'a [Option<Matrix<f64>>]>,
}

impl SolveReport<'_> {
    pub fn json(&self) -> String {
        let mut out = String::from("{\n");
        let class = self
            .classification
            .map_or_else(|| "null".to_string(), |c| quote(c.kind.as_str()));
        let _ = writeln!(out, "  \"classification\": {},", class);
        let steps: Vec<String> = self
            .runs
            .iter()
            .enumerate()
            .flat_map(|(k, r)| r.steps.iter().enumerate().map(move |(i, s)| step_json(k, i, s)))
            .collect();
        if steps.is_empty() {
            out.push_str("  \"steps\": [],\n");
        } else {
            let _ = writeln!(out, "  \"steps\": [\n    {}\n  ],", steps.join(",\n    "));
        }
        let names = self.job.system.var_names();
        let runs: Vec<String> = self
            .runs
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let mut s = format!(
                    "{{\"start\": {}, \"status\": {}, \"regular\": {}, \"steps\": {}, \"residual_order\": {},\n     \"series\": {}",
                    k,
                    quote(r.status.as_str()),
                    r.regular,
                    r.steps.len(),
                    order_json(r.converged_order),
                    named_series_json(names, &r.solution)
                );
                if let Some((x, order)) = &self.originals[k] {
                    let _ = write!(
                        s,
                        ",\n     \"original_residual_order\": {},\n     \"original\": {}",
                        order_json(*order),
                        named_series_json(self.job.original.var_names(), x)
                    );
                }
                if let Some(Some(m)) = self.blocks.map(|b| &b[k]) {
                    let _ = write!(s, ",\n     \"blocks\": {}", matrix_json(m));
                }
                s.push('}');
                s
            })
            .collect();
        let _ = writeln!(out, "  \"runs\": [\n    {}\n  ]", runs.join(",\n    "));
        out.push_str("}\n");
        out
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        if let Some(c) = self.classification {
            let _ = write!(out, "classification: {}", classification_text(c));
        }
        let t = self.job.system.t_name();
        let names = self.job.system.var_names();
        for (k, r) in self.runs.iter().enumerate() {
            let _ = writeln!(
                out,
                "run {}: {} after {} step(s), residual order {}",
                k,
                r.status.as_str(),
                r.steps.len(),
                order_text(r.converged_order)
            );
            if !r.steps.is_empty() {
                let _ = writeln!(
                    out,
                    "  {:>4} {:>5} {:>3} {:>3} {:>4}  {:<10} {:<5} {:<8} residual",
                    "step", "work", "a", "b", "rank", "path", "exact", "accepted"
                );
            }
            for (i, s) in r.steps.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  {:>4} {:>5} {:>3} {:>3} {:>4}  {:<10} {:<5} {:<8} {}",
                    i + 1,
                    s.work_order,
                    s.a,
                    s.b.map_or_else(|| "-".to_string(), |b| b.to_string()),
                    s.leading_rank,
                    s.path.as_str(),
                    s.exact,
                    s.accepted,
                    order_text(s.residual_order)
                );
            }
            for (n, s) in names.iter().zip(&r.solution) {
                let _ = writeln!(out, "  {} = {} + O({}^{})", n, s.render(t), t, s.order() + 1);
            }
            if let Some((x, order)) = &self.originals[k] {
                let _ = writeln!(out, "  original coordinates, residual order {}:", order_text(*order));
                for (n, s) in self.job.original.var_names().iter().zip(x) {
                    let _ = writeln!(out, "  {} = {}", n, s.render(t));
                }
            }
            if let Some(Some(m)) = self.blocks.map(|b| &b[k]) {
                let _ = writeln!(out, "  first step block matrix ({}x{}):", m.rows(), m.cols());
                for line in m.to_string().lines() {
                    let _ = writeln!(out, "    {}", line);
                }
            }
            let starts: Vec<String> = names
                .iter()
                .zip(&r.solution)
                .map(|(n, s)| format!("{} = {}", n, s.render(t)))
                .collect();
            let _ = writeln!(out, "  start series {};", starts.join("; "));
        }
        out
    }
}

pub fn pade_text(name: &str, p: &PadeApproximant<f64>) -> String {
    let num = Series::new(0, p.num.clone(), p.num.len() as i64);
    let den = Series::new(0, p.den.clone(), p.den.len() as i64);
    format!("{} ~ ({}) / ({})", name, num.render("t"), den.render("t"))
}

pub fn pade_list_json(items: &[(usize, String, PadeApproximant<f64>)]) -> String {
    let list: Vec<String> = items
        .iter()
        .map(|(k, name, p)| format!("{{\"run\": {}, \"name\": {}, \"approximant\": {}}}", k, quote(name), p.to_json()))
        .collect();
    format!("{{\"pade\": [\n  {}\n]}}\n", list.join(",\n  "))
}

pub fn residual_json(orders: &[Option<i64>]) -> String {
    let list: Vec<String> = orders
        .iter()
        .enumerate()
        .map(|(k, r)| format!("{{\"start\": {}, \"residual_order\": {}}}", k, order_json(*r)))
        .collect();
    format!("{{\"residuals\": [{}]}}\n", list.join(", "))
}
