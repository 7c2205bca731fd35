//! Reads the `runs[*].series` blocks of a `solve --json` report back in.

use num_complex::Complex;
use serde_json::Value;
use snewton::Series;

fn number(v: &Value) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("expected a number, found {}", v))
}

fn series(v: &Value) -> Result<Series, String> {
    let base = v["base"].as_i64().ok_or("series without integer `base`")?;
    let order = v["order"].as_i64().ok_or("series without integer `order`")?;
    let coeffs = v["coeffs"]
        .as_array()
        .ok_or("series without `coeffs` array")?
        .iter()
        .map(|c| match c.as_array().map(|a| a.as_slice()) {
            Some([re, im]) => Ok(Complex::new(number(re)?, number(im)?)),
            _ => Err(format!("coefficient must be [re, im], found {}", c)),
        })
        .collect::<Result<Vec<_>, String>>()?;
    if order < base + coeffs.len() as i64 - 1 {
        return Err(format!("series order {} below its last coefficient", order));
    }
    Ok(Series::new(base, coeffs, order))
}

/// One solution per run, ordered as `names`.
pub fn read_runs(text: &str, names: &[String]) -> Result<Vec<Vec<Series>>, String> {
    let doc: Value = serde_json::from_str(text).map_err(|e| format!("series JSON: {}", e))?;
    let runs = doc["runs"].as_array().ok_or("series JSON has no `runs` array")?;
    runs.iter()
        .map(|r| {
            let items = r["series"].as_array().ok_or("run without `series` array")?;
            names
                .iter()
                .map(|n| {
                    let item = items
                        .iter()
                        .find(|it| it["name"].as_str() == Some(n))
                        .ok_or_else(|| format!("series JSON has no entry for `{}`", n))?;
                    series(&item["series"])
                })
                .collect()
        })
        .collect()
}
