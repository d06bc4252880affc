//! Experiment configuration.
//!
//! One experiment per TOML file. Lengths carry a unit (`"1/128 m"`,
//! `"25 cm"`, `"4 mm"`) and are converted to metres; every other quantity is a
//! plain number. Unknown keys are rejected, and each rejection names exactly
//! one offending key.

use std::fmt;
use std::path::Path;

use orlicz::{DensitySpec, SobolevParams};
use solver::{BoundaryCondition, Datum, DensityFn, Geometry, Mollifier, PointMass};
use toml::{Table, Value};

/// A rejected configuration: the dotted key path and what is wrong with it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(key: &str, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { key: key.to_string(), message: message.into() })
}

/// Names accepted in `checks`.
pub const CHECKS: [&str; 8] = ["truncation", "budget", "decay", "band", "cauchy", "monotone", "uniqueness", "regularity"];

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Newton stopping bound on the nodal residual.
    pub newton: f64,
    /// Truncation level `δ` of the monotonicity check.
    pub monotone_delta: f64,
    /// Exceedance level for uniqueness; `None` means `10·h`.
    pub uniqueness: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { newton: 1e-10, monotone_delta: 0.05, uniqueness: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub young: DensitySpec<f64>,
    /// Uniform coefficient `a`.
    pub weight: f64,
    pub geometry: Geometry<f64>,
    pub h: f64,
    pub bc: BoundaryCondition,
    pub datum: Datum<f64>,
    /// `None` keeps `σ = n`.
    pub sigma: Option<f64>,
    pub mollifier: Mollifier,
    pub k_list: Vec<usize>,
    pub taus: Option<Vec<f64>>,
    pub tolerances: Tolerances,
    /// Second mollifier shape for the uniqueness check.
    pub uniqueness_mollifier: Option<Mollifier>,
    pub out: Option<String>,
    /// Checks to run; `None` runs every applicable one.
    pub checks: Option<Vec<String>>,
    /// Whether to write SVG plots.
    pub plots: bool,
}

impl ExperimentConfig {
    pub fn dimension(&self) -> usize {
        self.geometry.dimension()
    }

    pub fn sobolev(&self) -> Option<SobolevParams<f64>> {
        let n = self.dimension();
        if n < 2 {
            return None;
        }
        Some(match self.sigma {
            Some(s) => SobolevParams::new(n, s).expect("validated at parse time"),
            None => SobolevParams::lipschitz(n).expect("n ≥ 2"),
        })
    }

    pub fn wants(&self, check: &str) -> bool {
        match &self.checks {
            Some(list) => list.iter().any(|c| c == check),
            None => check != "uniqueness" || self.uniqueness_mollifier.is_some(),
        }
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let root: Table = match text.parse() {
        Ok(t) => t,
        Err(e) => {
            let e: toml::de::Error = e;
            return err("<syntax>", e.message().to_string());
        }
    };
    only(&root, "", &["name", "out", "checks", "plots", "operator", "domain", "problem", "datum", "schedule", "tolerances", "uniqueness"])?;
    let name = match root.get("name") {
        Some(v) => string(v, "name")?.to_string(),
        None => return err("name", "missing"),
    };
    let out = root.get("out").map(|v| string(v, "out").map(str::to_string)).transpose()?;
    let plots = match root.get("plots") {
        Some(Value::Boolean(b)) => *b,
        Some(_) => return err("plots", "expected true or false"),
        None => true,
    };
    let checks = root.get("checks").map(|v| parse_checks(v, "checks")).transpose()?;

    let op = section(&root, "operator")?;
    only(op, "operator", &["family", "p", "beta", "breakpoints", "exponents", "weight"])?;
    let young = parse_young(op)?;
    let weight = opt_number(op, "operator.weight", "weight")?.unwrap_or(1.0);
    if !(weight > 0.0 && weight.is_finite()) {
        return err("operator.weight", "must be positive");
    }

    let dom = section(&root, "domain")?;
    let (geometry, h) = parse_domain(dom)?;

    let pb = match root.get("problem") {
        Some(Value::Table(t)) => Some(t),
        Some(_) => return err("problem", "expected a table"),
        None => None,
    };
    let empty = Table::new();
    let pb = pb.unwrap_or(&empty);
    only(pb, "problem", &["bc", "sigma", "mollifier"])?;
    let bc = match pb.get("bc").map(|v| string(v, "problem.bc")).transpose()? {
        None | Some("dirichlet") => BoundaryCondition::Dirichlet,
        Some("neumann") => BoundaryCondition::Neumann,
        Some(other) => return err("problem.bc", format!("unknown boundary condition `{other}` (dirichlet | neumann)")),
    };
    let sigma = opt_number(pb, "problem.sigma", "sigma")?;
    if let Some(s) = sigma {
        let n = geometry.dimension();
        if n < 2 {
            return err("problem.sigma", "only meaningful in two dimensions");
        }
        if !(s >= n as f64 && s.is_finite()) {
            return err("problem.sigma", format!("must satisfy sigma >= n = {n}"));
        }
    }
    let mollifier = pb.get("mollifier").map(|v| parse_mollifier(v, "problem.mollifier")).transpose()?.unwrap_or(Mollifier::Exponential);

    let datum = parse_datum(section(&root, "datum")?, &geometry)?;
    if bc == BoundaryCondition::Neumann {
        neumann_compatible(&datum, &geometry)?;
    }

    let sch = section(&root, "schedule")?;
    only(sch, "schedule", &["k", "taus"])?;
    let k_list = match sch.get("k") {
        Some(Value::Array(a)) => a
            .iter()
            .map(|v| match v {
                Value::Integer(i) if *i > 0 => Ok(*i as usize),
                _ => err("schedule.k", "entries must be positive integers"),
            })
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return err("schedule.k", "expected an array of integers"),
        None => return err("schedule.k", "missing"),
    };
    if k_list.len() < 3 || k_list.windows(2).any(|w| w[1] <= w[0]) {
        return err("schedule.k", "needs at least three strictly increasing scales");
    }
    let taus = match sch.get("taus") {
        Some(Value::Array(a)) => {
            let t = a.iter().map(|v| number(v, "schedule.taus")).collect::<Result<Vec<_>, _>>()?;
            if t.is_empty() || t.iter().any(|x| !(*x > 0.0)) {
                return err("schedule.taus", "entries must be positive");
            }
            Some(t)
        }
        Some(_) => return err("schedule.taus", "expected an array of numbers"),
        None => None,
    };

    let mut tolerances = Tolerances::default();
    if let Some(v) = root.get("tolerances") {
        let Value::Table(t) = v else { return err("tolerances", "expected a table") };
        only(t, "tolerances", &["newton", "monotone_delta", "uniqueness"])?;
        if let Some(x) = opt_number(t, "tolerances.newton", "newton")? {
            tolerances.newton = positive(x, "tolerances.newton")?;
        }
        if let Some(x) = opt_number(t, "tolerances.monotone_delta", "monotone_delta")? {
            tolerances.monotone_delta = positive(x, "tolerances.monotone_delta")?;
        }
        if let Some(x) = opt_number(t, "tolerances.uniqueness", "uniqueness")? {
            tolerances.uniqueness = Some(positive(x, "tolerances.uniqueness")?);
        }
    }
    let uniqueness_mollifier = match root.get("uniqueness") {
        Some(Value::Table(t)) => {
            only(t, "uniqueness", &["mollifier"])?;
            let m = match t.get("mollifier") {
                Some(v) => parse_mollifier(v, "uniqueness.mollifier")?,
                None => return err("uniqueness.mollifier", "missing"),
            };
            if m == mollifier {
                return err("uniqueness.mollifier", "must differ from problem.mollifier");
            }
            Some(m)
        }
        Some(_) => return err("uniqueness", "expected a table"),
        None => None,
    };
    if let Some(list) = &checks {
        if list.iter().any(|c| c == "uniqueness") && uniqueness_mollifier.is_none() {
            return err("uniqueness.mollifier", "required by the uniqueness check");
        }
    }

    Ok(ExperimentConfig {
        name,
        young,
        weight,
        geometry,
        h,
        bc,
        datum,
        sigma,
        mollifier,
        k_list,
        taus,
        tolerances,
        uniqueness_mollifier,
        out,
        checks,
        plots,
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    match std::fs::read_to_string(path) {
        Ok(text) => parse_config(&text),
        Err(e) => err("<file>", format!("{}: {e}", path.display())),
    }
}

/// Parses a `--checks` list such as `truncation,budget`.
pub fn parse_check_list(s: &str) -> Result<Vec<String>, ConfigError> {
    let list: Vec<String> = s.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect();
    for c in &list {
        if !CHECKS.contains(&c.as_str()) {
            return err("--checks", format!("unknown check `{c}` (one of {})", CHECKS.join(", ")));
        }
    }
    Ok(list)
}

fn only(t: &Table, path: &str, allowed: &[&str]) -> Result<(), ConfigError> {
    for key in t.keys() {
        if !allowed.contains(&key.as_str()) {
            let full = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
            return err(&full, "unknown key");
        }
    }
    Ok(())
}

fn section<'a>(root: &'a Table, key: &str) -> Result<&'a Table, ConfigError> {
    match root.get(key) {
        Some(Value::Table(t)) => Ok(t),
        Some(_) => err(key, "expected a table"),
        None => err(key, "missing section"),
    }
}

fn string<'a>(v: &'a Value, key: &str) -> Result<&'a str, ConfigError> {
    v.as_str().map_or_else(|| err(key, "expected a string"), Ok)
}

fn number(v: &Value, key: &str) -> Result<f64, ConfigError> {
    let x = match v {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        _ => return err(key, "expected a number"),
    };
    if x.is_finite() {
        Ok(x)
    } else {
        err(key, "must be finite")
    }
}

fn opt_number(t: &Table, key: &str, field: &str) -> Result<Option<f64>, ConfigError> {
    t.get(field).map(|v| number(v, key)).transpose()
}

fn req_number(t: &Table, key: &str, field: &str) -> Result<f64, ConfigError> {
    opt_number(t, key, field)?.map_or_else(|| err(key, "missing"), Ok)
}

fn positive(x: f64, key: &str) -> Result<f64, ConfigError> {
    if x > 0.0 {
        Ok(x)
    } else {
        err(key, "must be positive")
    }
}

fn scalar(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => s.trim().parse().ok(),
    }
}

/// `"<number or a/b> <m|cm|mm>"` in metres.
pub fn parse_length(s: &str) -> Option<f64> {
    let (num, unit) = s.trim().rsplit_once(' ')?;
    let scale = match unit {
        "m" => 1.0,
        "cm" => 1e-2,
        "mm" => 1e-3,
        _ => return None,
    };
    scalar(num).filter(|x| x.is_finite()).map(|x| x * scale)
}

fn length(v: &Value, key: &str) -> Result<f64, ConfigError> {
    match v {
        Value::String(s) => parse_length(s).map_or_else(|| err(key, format!("`{s}` is not a length such as \"1/32 m\"")), Ok),
        Value::Integer(_) | Value::Float(_) => err(key, "length needs a unit, e.g. \"0.5 m\""),
        _ => err(key, "expected a length string"),
    }
}

fn req_length(t: &Table, key: &str, field: &str) -> Result<f64, ConfigError> {
    t.get(field).map_or_else(|| err(key, "missing"), |v| length(v, key))
}

fn point(v: &Value, key: &str) -> Result<[f64; 2], ConfigError> {
    match v {
        Value::Array(a) if a.len() == 1 => Ok([length(&a[0], key)?, 0.0]),
        Value::Array(a) if a.len() == 2 => Ok([length(&a[0], key)?, length(&a[1], key)?]),
        _ => err(key, "expected [x] or [x, y] with units"),
    }
}

fn numbers(t: &Table, key: &str, field: &str) -> Result<Vec<f64>, ConfigError> {
    match t.get(field) {
        Some(Value::Array(a)) => a.iter().map(|v| number(v, key)).collect(),
        Some(_) => err(key, "expected an array of numbers"),
        None => err(key, "missing"),
    }
}

fn parse_checks(v: &Value, key: &str) -> Result<Vec<String>, ConfigError> {
    let Value::Array(a) = v else { return err(key, "expected an array of check names") };
    let list = a.iter().map(|c| string(c, key).map(str::to_string)).collect::<Result<Vec<_>, _>>()?;
    parse_check_list(&list.join(",")).map_err(|e| ConfigError { key: key.into(), message: e.message })
}

fn parse_mollifier(v: &Value, key: &str) -> Result<Mollifier, ConfigError> {
    match string(v, key)? {
        "exponential" => Ok(Mollifier::Exponential),
        "polynomial" => Ok(Mollifier::Polynomial),
        other => err(key, format!("unknown mollifier `{other}` (exponential | polynomial)")),
    }
}

fn parse_young(op: &Table) -> Result<DensitySpec<f64>, ConfigError> {
    let family = match op.get("family") {
        Some(v) => string(v, "operator.family")?,
        None => return err("operator.family", "missing"),
    };
    let p_gt_1 = |p: f64| if p > 1.0 { Ok(p) } else { err("operator.p", "must exceed 1") };
    match family {
        "power" => Ok(DensitySpec::PowerLaw { p: p_gt_1(req_number(op, "operator.p", "p")?)? }),
        "power-log" => {
            let p = p_gt_1(req_number(op, "operator.p", "p")?)?;
            let beta = req_number(op, "operator.beta", "beta")?;
            if beta < 0.0 {
                return err("operator.beta", "must be non-negative");
            }
            Ok(DensitySpec::PowerLog { p, beta })
        }
        "piecewise" => {
            let breakpoints = numbers(op, "operator.breakpoints", "breakpoints")?;
            let exponents = numbers(op, "operator.exponents", "exponents")?;
            if exponents.len() != breakpoints.len() + 1 {
                return err("operator.exponents", "needs one more entry than operator.breakpoints");
            }
            if breakpoints.iter().any(|b| !(*b > 0.0)) || breakpoints.windows(2).any(|w| w[1] <= w[0]) {
                return err("operator.breakpoints", "must be positive and increasing");
            }
            Ok(DensitySpec::PiecewiseDensity { breakpoints, exponents })
        }
        other => err("operator.family", format!("unknown family `{other}` (power | power-log | piecewise)")),
    }
}

fn parse_domain(d: &Table) -> Result<(Geometry<f64>, f64), ConfigError> {
    let shape = match d.get("shape") {
        Some(v) => string(v, "domain.shape")?,
        None => return err("domain.shape", "missing"),
    };
    let geometry = match shape {
        "interval" => {
            only(d, "domain", &["shape", "a", "b", "h"])?;
            let (a, b) = (req_length(d, "domain.a", "a")?, req_length(d, "domain.b", "b")?);
            if b <= a {
                return err("domain.b", "must exceed domain.a");
            }
            Geometry::Interval { a, b }
        }
        "rectangle" => {
            only(d, "domain", &["shape", "width", "height", "h"])?;
            let width = positive(req_length(d, "domain.width", "width")?, "domain.width")?;
            let height = positive(req_length(d, "domain.height", "height")?, "domain.height")?;
            Geometry::Rectangle { width, height }
        }
        "disc" => {
            only(d, "domain", &["shape", "radius", "h"])?;
            Geometry::Disc { radius: positive(req_length(d, "domain.radius", "radius")?, "domain.radius")? }
        }
        "annulus" => {
            only(d, "domain", &["shape", "inner", "outer", "h"])?;
            let inner = positive(req_length(d, "domain.inner", "inner")?, "domain.inner")?;
            let outer = req_length(d, "domain.outer", "outer")?;
            if outer <= inner {
                return err("domain.outer", "must exceed domain.inner");
            }
            Geometry::Annulus { inner, outer }
        }
        other => return err("domain.shape", format!("unknown shape `{other}` (interval | rectangle | disc | annulus)")),
    };
    let h = positive(req_length(d, "domain.h", "h")?, "domain.h")?;
    Ok((geometry, h))
}

fn parse_datum(d: &Table, geometry: &Geometry<f64>) -> Result<Datum<f64>, ConfigError> {
    only(d, "datum", &["density", "value", "c", "gradient", "center", "width", "mass", "point"])?;
    let density = match d.get("density").map(|v| string(v, "datum.density")).transpose()? {
        None => {
            if let Some(k) = ["value", "c", "gradient", "center", "width", "mass"].iter().find(|k| d.contains_key(**k)) {
                return err(&format!("datum.{k}"), "given without datum.density");
            }
            None
        }
        Some("constant") => Some(DensityFn::Constant(req_number(d, "datum.value", "value")?)),
        Some("affine") => {
            let c = req_number(d, "datum.c", "c")?;
            let g = numbers(d, "datum.gradient", "gradient")?;
            let g = match g.as_slice() {
                [x] => [*x, 0.0],
                [x, y] => [*x, *y],
                _ => return err("datum.gradient", "expected one or two components"),
            };
            Some(DensityFn::Affine { c, g })
        }
        Some("gaussian") => {
            let center = d.get("center").map_or_else(|| err("datum.center", "missing"), |v| point(v, "datum.center"))?;
            let width = positive(req_length(d, "datum.width", "width")?, "datum.width")?;
            Some(DensityFn::Gaussian { center, width, mass: req_number(d, "datum.mass", "mass")? })
        }
        Some(other) => return err("datum.density", format!("unknown density `{other}` (constant | affine | gaussian)")),
    };
    let mut masses = Vec::new();
    match d.get("point") {
        None => {}
        Some(Value::Array(a)) => {
            for (i, v) in a.iter().enumerate() {
                let key = format!("datum.point[{i}]");
                let Value::Table(t) = v else { return err(&key, "expected a table") };
                only(t, &key, &["at", "weight"])?;
                let at = t.get("at").map_or_else(|| err(&format!("{key}.at"), "missing"), |v| point(v, &format!("{key}.at")))?;
                if !geometry.contains_strictly(at) {
                    return err(&format!("{key}.at"), "point mass must lie strictly inside the domain");
                }
                masses.push(PointMass { at, weight: req_number(t, &format!("{key}.weight"), "weight")? });
            }
        }
        Some(_) => return err("datum.point", "expected an array of tables ([[datum.point]])"),
    }
    if density.is_none() && masses.is_empty() {
        return err("datum", "needs a density or at least one [[datum.point]]");
    }
    Ok(Datum { density, masses })
}

/// Neumann data must carry zero total mass. Densities are integrated exactly
/// for constant and affine data; Gaussians are integrated over `ℝⁿ`, which
/// rejects any Gaussian whose mass is not cancelled by point masses.
fn neumann_compatible(datum: &Datum<f64>, geometry: &Geometry<f64>) -> Result<(), ConfigError> {
    let density_total = match datum.density {
        Some(DensityFn::Gaussian { mass, .. }) => mass,
        Some(f) => f.integral_over(geometry, None),
        None => 0.0,
    };
    let points: f64 = datum.masses.iter().map(|m| m.weight).sum();
    let total = density_total + points;
    let scale = datum.masses.iter().map(|m| m.weight.abs()).sum::<f64>() + density_total.abs() + 1.0;
    if total.abs() > 1e-10 * scale {
        let key = if datum.masses.is_empty() { "datum.density" } else { "datum.point" };
        return err(
            key,
            format!("Neumann data must satisfy the compatibility condition f(Ω) = 0; total mass is {total:e}"),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISC: &str = r#"
name = "t"
[operator]
family = "power"
p = 1.5
[domain]
shape = "disc"
radius = "1 m"
h = "1/16 m"
[datum]
[[datum.point]]
at = ["0 m", "0 m"]
weight = 1.0
[schedule]
k = [2, 4, 8]
"#;

    #[test]
    fn lengths_carry_units() {
        assert_eq!(parse_length("1/128 m"), Some(1.0 / 128.0));
        assert_eq!(parse_length("25 cm"), Some(0.25));
        assert_eq!(parse_length("4 mm"), Some(0.004));
        assert_eq!(parse_length("0.5"), None);
        assert_eq!(parse_length("0.5 ft"), None);
    }

    #[test]
    fn parses_minimal_disc() {
        let c = parse_config(DISC).unwrap();
        assert_eq!(c.geometry, Geometry::Disc { radius: 1.0 });
        assert_eq!(c.h, 1.0 / 16.0);
        assert_eq!(c.k_list, vec![2, 4, 8]);
        assert_eq!(c.datum.masses.len(), 1);
        assert!(c.wants("decay") && !c.wants("uniqueness"));
    }

    #[test]
    fn each_rejection_names_its_key() {
        let cases = [
            (DISC.replace("p = 1.5", "p = 1.5\nq = 2"), "operator.q"),
            (DISC.replace("\"1/16 m\"", "0.0625"), "domain.h"),
            (DISC.replace("k = [2, 4, 8]", "k = [4, 2, 8]"), "schedule.k"),
            (DISC.replace("p = 1.5", "p = 0.5"), "operator.p"),
            (DISC.replace("[\"0 m\", \"0 m\"]", "[\"2 m\", \"0 m\"]"), "datum.point[0].at"),
            (DISC.replace("family = \"power\"", "family = \"cosh\""), "operator.family"),
            (format!("{DISC}\n[problem]\nbc = \"neumann\"\n"), "datum.point"),
            (format!("{DISC}\n[problem]\nsigma = 1.5\n"), "problem.sigma"),
        ];
        for (text, key) in cases {
            assert_eq!(parse_config(&text).unwrap_err().key, key, "{text}");
        }
    }

    #[test]
    fn neumann_accepts_balanced_data() {
        let text = DISC.replace("weight = 1.0", "weight = 1.0\n[[datum.point]]\nat = [\"0.5 m\", \"0 m\"]\nweight = -1.0")
            + "\n[problem]\nbc = \"neumann\"\n";
        assert_eq!(parse_config(&text).unwrap().bc, BoundaryCondition::Neumann);
        let text = DISC.replace("[datum]\n[[datum.point]]\nat = [\"0 m\", \"0 m\"]\nweight = 1.0", "[datum]\ndensity = \"constant\"\nvalue = 1.0")
            + "\n[problem]\nbc = \"neumann\"\n";
        assert_eq!(parse_config(&text).unwrap_err().key, "datum.density");
    }
}
