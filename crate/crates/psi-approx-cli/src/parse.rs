//! String forms used on the command line: weight specs, method tags, order
//! lists and ramp rules.

use anyhow::{anyhow, bail, Context, Result};
use psi_approx::summation::Method;
use psi_approx::PsiSpec;
use std::collections::BTreeMap;
use std::path::Path;

/// Split `name:key=value,key=value` into the name and its parameter map.
fn split_spec(s: &str) -> Result<(&str, BTreeMap<&str, &str>)> {
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n, r),
        None => (s, ""),
    };
    let mut params = BTreeMap::new();
    if !rest.is_empty() {
        for part in rest.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| anyhow!("expected key=value in '{part}'"))?;
            params.insert(k.trim(), v.trim());
        }
    }
    Ok((name, params))
}

fn take_f64(params: &mut BTreeMap<&str, &str>, key: &str) -> Result<Option<f64>> {
    match params.remove(key) {
        Some(v) => Ok(Some(v.parse::<f64>().with_context(|| format!("bad number for {key}: '{v}'"))?)),
        None => Ok(None),
    }
}

fn reject_leftovers(params: &BTreeMap<&str, &str>, what: &str) -> Result<()> {
    if let Some(k) = params.keys().next() {
        bail!("unknown parameter '{k}' for {what}");
    }
    Ok(())
}

/// Parse a weight spec: `power:r=2`, `powerlog:r=1,b=1`,
/// `exp:alpha=0.693147,r=1`, `log`, `tab:file=path.csv`.
pub fn parse_psi(s: &str) -> Result<PsiSpec> {
    let (name, mut params) = split_spec(s)?;
    let spec = match name {
        "power" => {
            let r = take_f64(&mut params, "r")?.ok_or_else(|| anyhow!("power needs r"))?;
            reject_leftovers(&params, "power")?;
            PsiSpec::power(r)?
        }
        "powerlog" => {
            let r = take_f64(&mut params, "r")?.ok_or_else(|| anyhow!("powerlog needs r"))?;
            let b = take_f64(&mut params, "b")?.unwrap_or(1.0);
            reject_leftovers(&params, "powerlog")?;
            PsiSpec::power_log(r, b)?
        }
        "exp" => {
            let alpha = take_f64(&mut params, "alpha")?.ok_or_else(|| anyhow!("exp needs alpha"))?;
            let r = take_f64(&mut params, "r")?.unwrap_or(1.0);
            reject_leftovers(&params, "exp")?;
            PsiSpec::exp(alpha, r)?
        }
        "log" => {
            reject_leftovers(&params, "log")?;
            PsiSpec::log()
        }
        "tab" => {
            let file = params.remove("file").ok_or_else(|| anyhow!("tab needs file=path.csv"))?;
            let file = file.to_string();
            reject_leftovers(&params, "tab")?;
            load_tabulated(Path::new(&file))?
        }
        other => bail!("unknown weight family '{other}'"),
    };
    Ok(spec)
}

/// Load a tabulated weight from a CSV file with header `t,psi`. The table
/// must at least halve across its range; validation of monotonicity and
/// convexity happens in the library.
fn load_tabulated(path: &Path) -> Result<PsiSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read weight table {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty weight table"))?;
    if header.trim() != "t,psi" {
        bail!("weight table must start with header 't,psi', got '{header}'");
    }
    let mut knots = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (t, v) = line
            .split_once(',')
            .ok_or_else(|| anyhow!("line {}: expected 't,psi'", i + 2))?;
        knots.push((
            t.trim().parse::<f64>().with_context(|| format!("line {}: bad t", i + 2))?,
            v.trim().parse::<f64>().with_context(|| format!("line {}: bad psi", i + 2))?,
        ));
    }
    let first = knots.first().ok_or_else(|| anyhow!("weight table has no rows"))?.1;
    Ok(PsiSpec::tabulated(knots, first / 2.0)?)
}

/// Parse one method tag: `u`, `vp`, `fourier`, `fejer`, `zygmund:s=2`,
/// `genz:file=phi.csv`. The ramp-adapted method binds to `psi` at run time.
pub fn parse_method(s: &str, psi: &PsiSpec) -> Result<Method> {
    let (name, mut params) = split_spec(s)?;
    let m = match name {
        "u" => Method::UPsi(psi.clone()),
        "vp" => Method::ValleePoussin,
        "fourier" => Method::Fourier,
        "fejer" => Method::Fejer,
        "zygmund" => {
            let s_exp = take_f64(&mut params, "s")?.ok_or_else(|| anyhow!("zygmund needs s"))?;
            Method::Zygmund { s: s_exp }
        }
        "genz" => {
            let file = params.remove("file").ok_or_else(|| anyhow!("genz needs file=phi.csv"))?;
            let phi = load_phi_table(Path::new(file))?;
            Method::GenZygmund { phi }
        }
        other => bail!("unknown method '{other}'"),
    };
    reject_leftovers(&params, name)?;
    Ok(m)
}

/// Load a taper generator table from a CSV file with header `k,phi`,
/// rows for k = 1, 2, ... in order.
fn load_phi_table(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read taper table {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty taper table"))?;
    if header.trim() != "k,phi" {
        bail!("taper table must start with header 'k,phi', got '{header}'");
    }
    let mut phi = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once(',')
            .ok_or_else(|| anyhow!("line {}: expected 'k,phi'", i + 2))?;
        let k: usize = k.trim().parse().with_context(|| format!("line {}: bad k", i + 2))?;
        if k != phi.len() + 1 {
            bail!("line {}: expected k={}, got k={k}", i + 2, phi.len() + 1);
        }
        phi.push(v.trim().parse::<f64>().with_context(|| format!("line {}: bad phi", i + 2))?);
    }
    Ok(phi)
}

/// Parse an order list: either comma-separated integers or a geometric
/// range `a:b:geomK` (factor `K`, endpoints included when hit).
pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    if let Some((a, rest)) = s.split_once(':') {
        let (b, step) = rest
            .split_once(':')
            .ok_or_else(|| anyhow!("range needs the form a:b:geomK"))?;
        let a: usize = a.parse().context("bad range start")?;
        let b: usize = b.parse().context("bad range end")?;
        let factor: f64 = step
            .strip_prefix("geom")
            .ok_or_else(|| anyhow!("only geometric ranges are supported, e.g. 16:1024:geom2"))?
            .parse()
            .context("bad geometric factor")?;
        if a == 0 || b < a || !(factor > 1.0) {
            bail!("need 1 <= a <= b and factor > 1, got {s}");
        }
        let mut out = Vec::new();
        let mut x = a as f64;
        while x.round() as usize <= b {
            let v = x.round() as usize;
            if out.last() != Some(&v) {
                out.push(v);
            }
            x *= factor;
        }
        Ok(out)
    } else {
        let mut out = Vec::new();
        for part in s.split(',') {
            out.push(part.trim().parse::<usize>().with_context(|| format!("bad order '{part}'"))?);
        }
        if out.is_empty() || out.windows(2).any(|w| w[1] <= w[0]) || out[0] == 0 {
            bail!("order list must be nonempty, positive and ascending");
        }
        Ok(out)
    }
}

/// Rule for choosing the ramp width from the order.
#[derive(Debug, Clone, PartialEq)]
pub enum PRule {
    Const(usize),
    HalfN,
    /// `p = round(T(n))` clamped to `[1, n]`.
    PeriodOfN,
    One,
}

pub fn parse_p_rule(s: &str) -> Result<PRule> {
    if let Some(v) = s.strip_prefix("const:") {
        return Ok(PRule::Const(v.parse().context("bad constant ramp width")?));
    }
    match s {
        "half_n" => Ok(PRule::HalfN),
        "t_of_n" => Ok(PRule::PeriodOfN),
        "one" => Ok(PRule::One),
        other => bail!("unknown ramp rule '{other}' (expected const:<k>, half_n, t_of_n, one)"),
    }
}

impl PRule {
    pub fn apply(&self, psi: &PsiSpec, n: usize) -> Result<usize> {
        Ok(match self {
            PRule::Const(k) => (*k).clamp(1, n),
            PRule::HalfN => (n / 2).max(1),
            PRule::PeriodOfN => {
                let period = psi.characteristics(n as f64)?.period;
                (period.round() as usize).clamp(1, n)
            }
            PRule::One => 1,
        })
    }
}

/// Parse a comma-separated list of floats.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number '{p}'")))
        .collect()
}
