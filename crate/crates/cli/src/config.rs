//! Experiment configuration files (TOML or JSON) and their validation.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use pint_gfm_core::discretization::NodeFamily;
use pint_gfm_core::iterations::{parse_method, Method, PararealCoarse};
use pint_gfm_core::operators::{Approximation, Integrator, RkFormulation, RkMethod};
use serde::Deserialize;

pub const SEED_ENV: &str = "PINT_GFM_SEED";

/// All problems found in a configuration, one line each.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl ConfigError {
    pub fn single(problem: impl Into<String>) -> Self {
        Self {
            problems: vec![problem.into()],
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration")?;
        for p in &self.problems {
            write!(f, "\n  - {p}")?;
        }
        Ok(())
    }
}

/// A complex number written as `"re+imj"`, `[re, im]` or a plain real.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl ComplexValue {
    pub fn resolve(&self) -> Result<Complex64, String> {
        match self {
            ComplexValue::Real(re) => Ok(Complex64::new(*re, 0.0)),
            ComplexValue::Pair([re, im]) => Ok(Complex64::new(*re, *im)),
            ComplexValue::Text(s) => parse_complex(s),
        }
    }
}

/// Parses `"2j-0.2"`, `"-0.2+2j"`, `"1"`, `"-i"` and similar forms.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    // Split into signed terms at '+'/'-' not following an exponent marker.
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let mut value = Complex64::new(0.0, 0.0);
    for term in terms {
        let (body, imaginary) = match term.strip_suffix(['j', 'i']) {
            Some(body) => (body, true),
            None => (term, false),
        };
        let magnitude = match body {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => body
                .parse::<f64>()
                .map_err(|_| format!("cannot parse `{text}` as a complex number"))?,
        };
        if imaginary {
            value.im += magnitude;
        } else {
            value.re += magnitude;
        }
    }
    Ok(value)
}

/// `re+imj` with shortest round-trip formatting of both parts.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}j", z.re, -z.im)
    } else {
        format!("{}+{}j", z.re, z.im)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    /// `collocation` or `rk`.
    pub kind: String,
    pub node_family: Option<String>,
    /// Number of collocation nodes.
    pub nodes: Option<usize>,
    /// Runge-Kutta steps per block.
    pub steps: Option<usize>,
    pub rk_method: Option<String>,
    /// `interface`, `volume` or `volume_closed`.
    pub formulation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxSpec {
    /// `qdelta_be` or `rk`.
    pub kind: String,
    pub rk_method: Option<String>,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MethodSpec {
    Name(String),
    Table {
        name: String,
        omega: Option<f64>,
        /// Parareal coarse propagator: `approx`, `coarse` or `coarse_approx`.
        variant: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    VolumeError,
    InterfaceError,
    GfmBound,
    InterfaceEstimate,
    GanderHairer,
    LinearBound,
    Diagnostics,
}

impl OutputKind {
    pub const ALL: [OutputKind; 7] = [
        OutputKind::VolumeError,
        OutputKind::InterfaceError,
        OutputKind::GfmBound,
        OutputKind::InterfaceEstimate,
        OutputKind::GanderHairer,
        OutputKind::LinearBound,
        OutputKind::Diagnostics,
    ];
}

/// How the first iterate `u^0` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    #[default]
    Random,
    Zero,
    /// Sequential propagation with the cheapest available coarse propagator.
    Coarse,
}

/// Raw file contents before validation.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub name: Option<String>,
    pub lambda: ComplexValue,
    pub t_end: f64,
    pub u0: Option<ComplexValue>,
    pub n_blocks: usize,
    pub fine: IntegratorSpec,
    pub coarse: Option<IntegratorSpec>,
    pub approx: Option<ApproxSpec>,
    pub methods: Vec<MethodSpec>,
    pub iterations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub init: InitKind,
    pub outputs: Option<Vec<OutputKind>>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub name: String,
    pub lambda: Complex64,
    pub t_end: f64,
    pub u0: Complex64,
    pub n_blocks: usize,
    pub fine: Integrator,
    pub coarse: Option<Integrator>,
    pub approx: Option<Approximation>,
    pub methods: Vec<Method>,
    pub iterations: usize,
    pub seed: u64,
    pub init: InitKind,
    pub outputs: Vec<OutputKind>,
}

impl Experiment {
    pub fn dt(&self) -> f64 {
        self.t_end / self.n_blocks as f64
    }

    pub fn lam_dt(&self) -> Complex64 {
        self.lambda * self.dt()
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }
}

fn parse_family(name: &str) -> Result<NodeFamily, String> {
    match name {
        "equidistant" => Ok(NodeFamily::Equidistant),
        "equidistant_closed" => Ok(NodeFamily::EquidistantClosed),
        "lobatto" | "lobatto_legendre" => Ok(NodeFamily::LobattoLegendre),
        "radau_right" | "radau_ii" => Ok(NodeFamily::RadauRight),
        other => Err(format!("unknown node family `{other}`")),
    }
}

fn parse_rk(name: &str) -> Result<RkMethod, String> {
    match name {
        "backward_euler" | "be" => Ok(RkMethod::BackwardEuler),
        "heun" | "heun_rk2" => Ok(RkMethod::Heun),
        "rk4" | "classic_rk4" => Ok(RkMethod::ClassicRk4),
        other => Err(format!("unknown Runge-Kutta method `{other}`")),
    }
}

fn parse_formulation(name: &str) -> Result<RkFormulation, String> {
    match name {
        "interface" => Ok(RkFormulation::Interface),
        "volume" => Ok(RkFormulation::Volume),
        "volume_closed" => Ok(RkFormulation::VolumeClosed),
        other => Err(format!("unknown Runge-Kutta formulation `{other}`")),
    }
}

fn integrator(spec: &IntegratorSpec, field: &str, problems: &mut Vec<String>) -> Option<Integrator> {
    let mut fail = |msg: String| {
        problems.push(format!("{field}: {msg}"));
        None
    };
    match spec.kind.as_str() {
        "collocation" => {
            let family = match parse_family(spec.node_family.as_deref().unwrap_or("lobatto")) {
                Ok(f) => f,
                Err(e) => return fail(e),
            };
            match spec.nodes {
                Some(nodes) if nodes >= family.min_nodes() => Some(Integrator::Collocation { family, nodes }),
                Some(nodes) => fail(format!("{family} needs at least {} nodes, got {nodes}", family.min_nodes())),
                None => fail("`nodes` is required for collocation".into()),
            }
        }
        "rk" => {
            let method = match parse_rk(spec.rk_method.as_deref().unwrap_or("rk4")) {
                Ok(m) => m,
                Err(e) => return fail(e),
            };
            let formulation = match parse_formulation(spec.formulation.as_deref().unwrap_or("interface")) {
                Ok(f) => f,
                Err(e) => return fail(e),
            };
            match spec.steps {
                Some(steps) if steps >= 1 => Some(Integrator::RungeKutta {
                    method,
                    steps,
                    formulation,
                }),
                _ => fail("`steps` must be a positive integer for rk".into()),
            }
        }
        other => fail(format!("unknown integrator kind `{other}` (expected collocation or rk)")),
    }
}

fn approximation(spec: &ApproxSpec, problems: &mut Vec<String>) -> Option<Approximation> {
    match spec.kind.as_str() {
        "qdelta_be" => Some(Approximation::QDeltaBackwardEuler),
        "rk" => match parse_rk(spec.rk_method.as_deref().unwrap_or("backward_euler")) {
            Ok(method) => Some(Approximation::RungeKutta {
                method,
                steps: spec.steps,
            }),
            Err(e) => {
                problems.push(format!("approx: {e}"));
                None
            }
        },
        other => {
            problems.push(format!("approx: unknown kind `{other}` (expected qdelta_be or rk)"));
            None
        }
    }
}

fn method(spec: &MethodSpec) -> Result<Method, String> {
    match spec {
        MethodSpec::Name(name) => parse_method(name).map_err(|e| e.to_string()),
        MethodSpec::Table { name, omega, variant } => {
            let base = parse_method(name).map_err(|e| e.to_string())?;
            let method = match (base, omega) {
                (Method::Tmg { .. }, Some(w)) => Method::Tmg { omega: *w },
                (Method::DampedBlockJacobi { .. }, Some(w)) => Method::DampedBlockJacobi { omega: *w },
                (_, Some(_)) => return Err(format!("method `{name}` takes no omega")),
                (m, None) => m,
            };
            match (method, variant.as_deref()) {
                (m, None) => Ok(m),
                (Method::Parareal { .. }, Some(v)) => {
                    let coarse = match v {
                        "approx" => PararealCoarse::Approximate,
                        "coarse" => PararealCoarse::CoarseLevel,
                        "coarse_approx" => PararealCoarse::CoarseApproximate,
                        other => return Err(format!("unknown parareal variant `{other}`")),
                    };
                    Ok(Method::Parareal { coarse })
                }
                (_, Some(_)) => Err(format!("method `{name}` takes no variant")),
            }
        }
    }
}

fn needs_coarse(m: &Method) -> bool {
    matches!(
        m,
        Method::Tmg { .. }
            | Method::TmgFine
            | Method::TmgCoarse
            | Method::Pfasst
            | Method::Parareal {
                coarse: PararealCoarse::CoarseLevel | PararealCoarse::CoarseApproximate
            }
    )
}

fn needs_approx(m: &Method) -> bool {
    matches!(
        m,
        Method::ApproxBlockJacobi
            | Method::ApproxBlockGaussSeidel
            | Method::TmgFine
            | Method::TmgCoarse
            | Method::Pfasst
            | Method::Parareal {
                coarse: PararealCoarse::Approximate | PararealCoarse::CoarseApproximate
            }
    )
}

impl RawConfig {
    pub fn validate(&self, default_name: &str) -> Result<Experiment, ConfigError> {
        let mut problems = Vec::new();
        let lambda = self.lambda.resolve().unwrap_or_else(|e| {
            problems.push(format!("lambda: {e}"));
            Complex64::new(0.0, 0.0)
        });
        let u0 = match &self.u0 {
            Some(v) => v.resolve().unwrap_or_else(|e| {
                problems.push(format!("u0: {e}"));
                Complex64::new(1.0, 0.0)
            }),
            None => Complex64::new(1.0, 0.0),
        };
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            problems.push(format!("t_end: must be positive, got {}", self.t_end));
        }
        if self.n_blocks == 0 {
            problems.push("n_blocks: must be at least 1".into());
        }
        let fine = integrator(&self.fine, "fine", &mut problems);
        let coarse = self
            .coarse
            .as_ref()
            .and_then(|c| integrator(c, "coarse", &mut problems));
        let approx = self.approx.as_ref().and_then(|a| approximation(a, &mut problems));
        if self.methods.is_empty() {
            problems.push("methods: at least one method is required".into());
        }
        let mut methods = Vec::new();
        for (i, spec) in self.methods.iter().enumerate() {
            match method(spec) {
                Ok(m) => {
                    if needs_coarse(&m) && self.coarse.is_none() {
                        problems.push(format!("methods[{i}]: `{m}` needs a [coarse] section"));
                    }
                    if needs_approx(&m) && self.approx.is_none() {
                        problems.push(format!("methods[{i}]: `{m}` needs an [approx] section"));
                    }
                    methods.push(m);
                }
                Err(e) => problems.push(format!("methods[{i}]: {e}")),
            }
        }
        let seed = match std::env::var(SEED_ENV) {
            Ok(text) => text.trim().parse().unwrap_or_else(|_| {
                problems.push(format!("{SEED_ENV}: `{text}` is not an unsigned integer"));
                self.seed
            }),
            Err(_) => self.seed,
        };
        let outputs = match &self.outputs {
            Some(list) if list.is_empty() => {
                problems.push("outputs: empty list".into());
                Vec::new()
            }
            Some(list) => list.clone(),
            None => OutputKind::ALL.to_vec(),
        };
        if !problems.is_empty() {
            return Err(ConfigError { problems });
        }
        Ok(Experiment {
            name: self.name.clone().unwrap_or_else(|| default_name.to_string()),
            lambda,
            t_end: self.t_end,
            u0,
            n_blocks: self.n_blocks,
            fine: fine.expect("validated"),
            coarse,
            approx,
            methods,
            iterations: self.iterations,
            seed,
            init: self.init,
            outputs,
        })
    }
}

/// Parses TOML, or JSON when the text starts with `{`.
pub fn parse_config(text: &str, default_name: &str) -> Result<Experiment, ConfigError> {
    let raw: RawConfig = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| ConfigError::single(format!("JSON: {e}")))?
    } else {
        toml::from_str(text).map_err(|e| ConfigError::single(format!("TOML: {e}")))?
    };
    raw.validate(default_name)
}

pub fn load_config(path: &Path) -> Result<Experiment, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::single(format!("cannot read {}: {e}", path.display())))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("experiment");
    parse_config(&text, stem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("2j-0.2").unwrap(), Complex64::new(-0.2, 2.0));
        assert_eq!(parse_complex("-0.2+2j").unwrap(), Complex64::new(-0.2, 2.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-4").unwrap(), Complex64::new(-4.0, 0.0));
        assert_eq!(parse_complex("1e-3-1.5e+2j").unwrap(), Complex64::new(1e-3, -150.0));
        assert!(parse_complex("abc").is_err());
        let z = Complex64::new(-0.125, -2.5);
        assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        assert_eq!(format_complex(Complex64::new(1.0, 0.5)), "1+0.5j");
    }
}
