//! JSON scenario manifests: validation and execution into report documents.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::{
    degeneracy_profile, hoop_check, royden_bound_report, schwarz_bound_report, three_circle_check, volume_bound_report,
    BoundSettings, HoopMode, DEFAULT_BOUND_TOL,
};
use crate::expr::parse_expression;
use crate::functionals::{bisectional_range, k_ricci_extremes, ricci_extremes, scalar};
use crate::geometry::{catalog, curvature_tensor, model_curvature, KahlerChart, ModelCurvature, Region};
use crate::identities::{
    averaging_identity_check, check_identity, psh_check, sandwich_random_check, HypothesisSampling, IdentityKind,
    PshQuantity, DEFAULT_IDENTITY_TOL, SANDWICH_TOL,
};
use crate::maps::HoloMap;
use crate::report::{point_json, ConstantSource, Hypothesis, ReportDocument, ReportEntry};
use crate::sampling::{Sampler, Shape};
use crate::{Error, Result, C64};

pub const DEFAULT_ORDER: usize = 4;
pub const DEFAULT_AVERAGING_SAMPLES: usize = 20_000;
pub const DEFAULT_SANDWICH_COUNT: usize = 100;
pub const DEFAULT_SPHERE_SAMPLES: usize = 64;
pub const PSH_TOL: f64 = 1e-8;
pub const THREE_CIRCLE_TOL: f64 = 1e-9;
/// Imaginary part allowed when evaluating a real potential.
pub const POTENTIAL_REALITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum RegionSpec {
    Whole,
    Ball(f64),
    Polydisk(f64),
}

impl RegionSpec {
    fn region(&self) -> Result<Region> {
        match *self {
            RegionSpec::Whole => Ok(Region::Whole),
            RegionSpec::Ball(r) | RegionSpec::Polydisk(r) if !(r > 0.0) => {
                Err(Error::config(format!("region radius must be positive, got {r}")))
            }
            RegionSpec::Ball(radius) => Ok(Region::Ball { radius }),
            RegionSpec::Polydisk(radius) => Ok(Region::Polydisk { radius }),
        }
    }
}

/// A chart given by catalog name, Kähler potential or metric components.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl ChartSpec {
    pub fn build(&self) -> Result<KahlerChart> {
        let given = [self.catalog.is_some(), self.potential.is_some(), self.metric.is_some()];
        if given.iter().filter(|b| **b).count() != 1 {
            return Err(Error::config("a chart needs exactly one of 'catalog', 'potential' or 'metric'"));
        }
        if let Some(name) = &self.catalog {
            if self.region.is_some() {
                return Err(Error::config("catalog charts carry their own region"));
            }
            return catalog(name, self.dim, self.scale);
        }
        if self.scale.is_some() {
            return Err(Error::config("'scale' only applies to catalog charts"));
        }
        let region = self.region.as_ref().unwrap_or(&RegionSpec::Whole).region()?;
        let name = self.name.clone().unwrap_or_else(|| "custom".into());
        if let Some(text) = &self.potential {
            return KahlerChart::from_potential(name, self.dim, parse_expression(text)?, region);
        }
        let rows = self.metric.as_ref().expect("checked above");
        let comps = rows
            .iter()
            .map(|row| row.iter().map(|t| parse_expression(t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        KahlerChart::from_components(name, self.dim, comps, region)
    }

    pub fn model(&self) -> Option<ModelCurvature> {
        self.catalog.as_ref().and_then(|n| model_curvature(n, self.dim, self.scale).ok())
    }

    pub fn label(&self) -> String {
        match (&self.catalog, &self.name) {
            (Some(c), _) => match self.scale {
                Some(s) => format!("{c}({}, {s})", self.dim),
                None => format!("{c}({})", self.dim),
            },
            (None, Some(n)) => n.clone(),
            (None, None) => "custom".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub count: usize,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub shape: Shape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChartRole {
    Domain,
    #[default]
    Target,
}

/// One entry of the `checks` list. Which fields apply depends on `kind`.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub advisory: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<PshQuantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartRole>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_per_sphere: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<HoopMode>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

pub const CHECK_KINDS: &[&str] = &[
    "boch1",
    "boch2",
    "log_w",
    "psh",
    "sandwich",
    "averaging",
    "schwarz",
    "volume",
    "royden",
    "hoop",
    "three_circle",
    "degeneracy_profile",
];

fn allowed_fields(kind: &str) -> Option<Vec<&'static str>> {
    const COMMON: [&str; 4] = ["kind", "label", "tolerance", "advisory"];
    let extra: &'static [&'static str] = match kind {
        "boch1" | "boch2" | "log_w" => &["sampler", "direction"],
        "psh" => &["sampler", "quantity"],
        "sandwich" => &["count"],
        "averaging" => &["weights", "point", "chart", "samples", "kappa"],
        "schwarz" | "volume" | "royden" => &["sampler", "K", "kappa"],
        "hoop" => &["sampler", "mode", "K", "kappa"],
        "three_circle" => &["radii", "samples_per_sphere"],
        "degeneracy_profile" => &["radii", "directions"],
        _ => return None,
    };
    let mut all = COMMON.to_vec();
    all.extend_from_slice(extra);
    Some(all)
}

impl CheckSpec {
    fn needs_map(&self) -> bool {
        !matches!(self.kind.as_str(), "sandwich" | "averaging")
    }

    fn uses_sampler(&self) -> bool {
        matches!(self.kind.as_str(), "boch1" | "boch2" | "log_w" | "psh" | "schwarz" | "volume" | "royden" | "hoop")
    }

    fn uses_seed(&self) -> bool {
        self.uses_sampler() || matches!(self.kind.as_str(), "sandwich" | "averaging" | "three_circle")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default = "schema_one")]
    pub schema: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<ChartSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<ChartSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerSpec>,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

fn schema_one() -> u32 {
    1
}

/// Command-line overrides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    /// Replaces every check tolerance.
    pub tol: Option<f64>,
    /// Replaces every seed in the manifest.
    pub seed: Option<u64>,
    /// Replaces every sampler count.
    pub points: Option<usize>,
    /// Jet order used for the left-hand sides of identities and psh checks.
    pub order: usize,
    pub details: bool,
    pub threads: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { tol: None, seed: None, points: None, order: DEFAULT_ORDER, details: false, threads: None }
    }
}

fn complex_vec(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

/// Charts, map and settings built from a validated manifest.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub manifest: Manifest,
    pub domain: Option<Arc<KahlerChart>>,
    pub target: Option<Arc<KahlerChart>>,
    pub map: Option<HoloMap>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Manifest> {
        let raw: Value = serde_json::from_str(text).map_err(|e| Error::config(format!("manifest is not valid JSON: {e}")))?;
        if let Some(checks) = raw.get("checks").and_then(Value::as_array) {
            for (i, c) in checks.iter().enumerate() {
                let obj = c.as_object().ok_or_else(|| Error::config(format!("check {i} is not an object")))?;
                let kind = obj
                    .get("kind")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::config(format!("check {i} has no 'kind'")))?;
                let allowed = allowed_fields(kind).ok_or_else(|| {
                    Error::config(format!("check {i}: unknown kind '{kind}' (known: {})", CHECK_KINDS.join(", ")))
                })?;
                for key in obj.keys() {
                    if !allowed.contains(&key.as_str()) {
                        return Err(Error::config(format!("check {i} ({kind}): field '{key}' does not apply")));
                    }
                }
            }
        }
        serde_json::from_value(raw).map_err(|e| Error::config(format!("invalid manifest: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read manifest {}: {e}", path.display())))?;
        Manifest::from_json(&text)
    }

    /// Validates and builds the charts and map.
    pub fn build(&self) -> Result<Scenario> {
        if self.schema != 1 {
            return Err(Error::config(format!("unsupported manifest schema {}", self.schema)));
        }
        let domain = self.domain.as_ref().map(|c| c.build().map(Arc::new)).transpose()?;
        let target = self.target.as_ref().map(|c| c.build().map(Arc::new)).transpose()?;
        let map = match &self.map {
            None => None,
            Some(comps) => {
                let (d, t) = match (&domain, &target) {
                    (Some(d), Some(t)) => (d.clone(), t.clone()),
                    _ => return Err(Error::config("a map needs both 'domain' and 'target'")),
                };
                let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
                Some(HoloMap::parse(d, t, &refs)?)
            }
        };
        let mut labels = BTreeSet::new();
        for (i, c) in self.checks.iter().enumerate() {
            if allowed_fields(&c.kind).is_none() {
                return Err(Error::config(format!("check {i}: unknown kind '{}'", c.kind)));
            }
            if c.needs_map() && map.is_none() {
                return Err(Error::config(format!("check {i} ({}) needs 'map'", c.kind)));
            }
            if c.uses_sampler() && c.sampler.is_none() && self.sampler.is_none() {
                return Err(Error::config(format!("check {i} ({}) needs a sampler", c.kind)));
            }
            if c.uses_seed() {
                let has_seed = self.seed.is_some() || c.sampler.as_ref().or(self.sampler.as_ref()).is_some_and(|s| s.seed.is_some());
                if !has_seed {
                    return Err(Error::config(format!("check {i} ({}) samples but no seed is given", c.kind)));
                }
            }
            if let Some(t) = c.tolerance {
                if !(t >= 0.0) {
                    return Err(Error::config(format!("check {i}: tolerance must be nonnegative")));
                }
            }
            let label = c.label.clone().unwrap_or_else(|| c.kind.clone());
            if !labels.insert(label.clone()) {
                return Err(Error::config(format!("duplicate check label '{label}'")));
            }
        }
        Ok(Scenario { manifest: self.clone(), domain, target, map })
    }
}

fn check_potential_real(spec: Option<&ChartSpec>, chart: Option<&Arc<KahlerChart>>, points: &[Vec<C64>]) -> Result<()> {
    let (Some(spec), Some(chart)) = (spec, chart) else { return Ok(()) };
    if spec.potential.is_none() {
        return Ok(());
    }
    let phi = chart.potential().expect("potential chart");
    for p in points {
        if !chart.contains(p) {
            continue;
        }
        let v = phi.eval(p)?;
        if v.im.abs() > POTENTIAL_REALITY_TOL * (1.0 + v.re.abs()) {
            return Err(Error::MetricValidity(format!("potential is not real at {p:?}: imaginary part {:e}", v.im)));
        }
    }
    Ok(())
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Scenario> {
        Manifest::from_path(path)?.build()
    }

    pub fn from_json(text: &str) -> Result<Scenario> {
        Manifest::from_json(text)?.build()
    }

    pub fn seed(&self, opts: &RunOptions) -> u64 {
        opts.seed.or(self.manifest.seed).unwrap_or(0)
    }

    fn sampler(&self, check: &CheckSpec, opts: &RunOptions) -> Result<Sampler> {
        let spec = check
            .sampler
            .as_ref()
            .or(self.manifest.sampler.as_ref())
            .ok_or_else(|| Error::config(format!("check '{}' needs a sampler", check.kind)))?;
        let seed = opts.seed.or(spec.seed).or(self.manifest.seed).unwrap_or(0);
        Ok(Sampler {
            count: opts.points.unwrap_or(spec.count),
            radius: spec.radius,
            seed,
            shape: spec.shape,
            center: spec.center.clone(),
        })
    }

    fn map(&self) -> Result<&HoloMap> {
        self.map.as_ref().ok_or_else(|| Error::config("this check needs a map"))
    }

    fn tolerance(&self, check: &CheckSpec, opts: &RunOptions, default: f64) -> f64 {
        opts.tol.or(check.tolerance).unwrap_or(default)
    }

    fn constant(&self, check_value: Option<f64>, global: Option<f64>) -> Option<f64> {
        check_value.or(global)
    }

    fn hypothesis_sampling(&self, seed: u64) -> HypothesisSampling {
        let mut hs = HypothesisSampling::default();
        hs.search.seed = seed;
        hs
    }

    fn sample_points(&self, check: &CheckSpec, opts: &RunOptions) -> Result<(Sampler, Vec<Vec<C64>>)> {
        let f = self.map()?;
        let sampler = self.sampler(check, opts)?;
        let pts = sampler.points(f.m())?;
        if pts.is_empty() {
            return Err(Error::config(format!("check '{}' has an empty sampler", check.kind)));
        }
        check_potential_real(self.manifest.domain.as_ref(), self.domain.as_ref(), &pts)?;
        Ok((sampler, pts))
    }

    fn run_check(&self, check: &CheckSpec, opts: &RunOptions) -> Result<ReportEntry> {
        let seed = self.seed(opts);
        let kind = check.kind.as_str();
        let entry = match kind {
            "boch1" | "boch2" | "log_w" => {
                let ik = match kind {
                    "boch1" => IdentityKind::Boch1,
                    "boch2" => IdentityKind::Boch2,
                    _ => IdentityKind::LogW,
                };
                let f = self.map()?;
                let (sampler, pts) = self.sample_points(check, opts)?;
                let dirs = match &check.direction {
                    Some(d) => vec![complex_vec(d); pts.len()],
                    None => sampler.directions(f.m()),
                };
                let tol = self.tolerance(check, opts, DEFAULT_IDENTITY_TOL);
                ReportEntry::Check(check_identity(ik, f, &pts, &dirs, tol, opts.order)?)
            }
            "psh" => {
                let q = check.quantity.ok_or_else(|| Error::config("psh check needs 'quantity'"))?;
                let (_, pts) = self.sample_points(check, opts)?;
                let tol = self.tolerance(check, opts, PSH_TOL);
                ReportEntry::Check(psh_check(q, self.map()?, &pts, tol, opts.order, &self.hypothesis_sampling(seed))?)
            }
            "sandwich" => {
                let count = opts.points.or(check.count).unwrap_or(DEFAULT_SANDWICH_COUNT);
                let tol = self.tolerance(check, opts, SANDWICH_TOL);
                ReportEntry::Check(sandwich_random_check(count, seed, tol)?)
            }
            "averaging" => return self.run_averaging(check, opts),
            "schwarz" | "volume" | "royden" => {
                let f = self.map()?;
                let (_, pts) = self.sample_points(check, opts)?;
                let settings = BoundSettings {
                    tol: self.tolerance(check, opts, DEFAULT_BOUND_TOL),
                    hypotheses: self.hypothesis_sampling(seed),
                };
                let k = self.constant(check.k, self.manifest.constants.k);
                let kappa = self.constant(check.kappa, self.manifest.constants.kappa);
                ReportEntry::Bound(match kind {
                    "schwarz" => schwarz_bound_report(f, &pts, k, kappa, &settings)?,
                    "volume" => volume_bound_report(f, &pts, k, kappa, &settings)?,
                    _ => royden_bound_report(f, &pts, k, kappa, &settings)?,
                })
            }
            "hoop" => {
                let mode = check.mode.ok_or_else(|| Error::config("hoop check needs 'mode'"))?;
                let (_, pts) = self.sample_points(check, opts)?;
                let settings = BoundSettings {
                    tol: self.tolerance(check, opts, DEFAULT_BOUND_TOL),
                    hypotheses: self.hypothesis_sampling(seed),
                };
                let k = self.constant(check.k, self.manifest.constants.k);
                let kappa = self.constant(check.kappa, self.manifest.constants.kappa);
                ReportEntry::Bound(hoop_check(self.map()?, &pts, mode, k, kappa, &settings)?)
            }
            "three_circle" => {
                let radii = check.radii.as_ref().ok_or_else(|| Error::config("three_circle needs 'radii'"))?;
                let radii: [f64; 3] = radii
                    .as_slice()
                    .try_into()
                    .map_err(|_| Error::config("three_circle needs exactly three radii"))?;
                let count = opts.points.or(check.samples_per_sphere).unwrap_or(DEFAULT_SPHERE_SAMPLES);
                let tol = self.tolerance(check, opts, THREE_CIRCLE_TOL);
                ReportEntry::Check(three_circle_check(self.map()?, radii, count, seed, tol, &self.hypothesis_sampling(seed))?)
            }
            "degeneracy_profile" => {
                let radii = check.radii.as_ref().ok_or_else(|| Error::config("degeneracy_profile needs 'radii'"))?;
                let dirs: Vec<Vec<C64>> = check
                    .directions
                    .as_ref()
                    .ok_or_else(|| Error::config("degeneracy_profile needs 'directions'"))?
                    .iter()
                    .map(|d| complex_vec(d))
                    .collect();
                ReportEntry::Profile(degeneracy_profile(self.map()?, &dirs, radii)?)
            }
            other => return Err(Error::config(format!("unknown check kind '{other}'"))),
        };
        Ok(entry)
    }

    fn run_averaging(&self, check: &CheckSpec, opts: &RunOptions) -> Result<ReportEntry> {
        let role = check.chart.unwrap_or_default();
        let (chart, spec) = match role {
            ChartRole::Target => (self.target.as_ref(), self.manifest.target.as_ref()),
            ChartRole::Domain => (self.domain.as_ref(), self.manifest.domain.as_ref()),
        };
        let chart = chart.ok_or_else(|| Error::config("averaging check needs the chosen chart"))?;
        let point = match &check.point {
            Some(p) => complex_vec(p),
            None => vec![C64::new(0.0, 0.0); chart.dim()],
        };
        let weights = complex_vec(check.weights.as_ref().ok_or_else(|| Error::config("averaging needs 'weights'"))?);
        let cp = curvature_tensor(chart, &point)?;
        let kappa = match check.kappa {
            Some(v) => Some(Hypothesis {
                name: "kappa".into(),
                statement: "H <= -kappa".into(),
                value: v,
                source: ConstantSource::Analytic,
                sampled_extreme: None,
                holds_on_samples: true,
            }),
            None => spec.and_then(|s| s.model()).and_then(|m| {
                let hmax = m.holomorphic_sectional.1;
                (hmax < 0.0).then(|| Hypothesis {
                    name: "kappa".into(),
                    statement: "H <= -kappa (catalog model)".into(),
                    value: -hmax,
                    source: ConstantSource::Analytic,
                    sampled_extreme: None,
                    holds_on_samples: true,
                })
            }),
        };
        let samples = opts.points.or(check.samples).unwrap_or(DEFAULT_AVERAGING_SAMPLES);
        let tol = self.tolerance(check, opts, DEFAULT_BOUND_TOL);
        let out = averaging_identity_check(&cp, &weights, kappa, samples, self.seed(opts), tol)?;
        Ok(match out.inequality {
            None => ReportEntry::Check(out.identity),
            Some(ineq) => {
                // identity and inequality travel together; the bound carries the identity data
                let mut ineq = ineq;
                ineq.set("identity_passed", out.identity.passed);
                ineq.set("algebraic", out.algebraic);
                ineq.set("quadrature", out.estimate);
                ineq.set("stderr", out.stderr);
                if !out.identity.passed {
                    ineq.passed = false;
                    ineq.status = crate::report::CheckStatus::Fail;
                    ineq.notes.push("quadrature disagrees with the algebraic form".into());
                }
                ReportEntry::Bound(ineq)
            }
        })
    }

    /// Runs every check in declaration order.
    pub fn run(&self, opts: &RunOptions) -> Result<ReportDocument> {
        with_threads(opts.threads, || {
            let mut entries = Vec::with_capacity(self.manifest.checks.len());
            for check in &self.manifest.checks {
                let mut entry = self.run_check(check, opts)?;
                if let Some(label) = &check.label {
                    set_label(&mut entry, label);
                }
                if check.advisory {
                    entry.mark_advisory();
                }
                if !opts.details {
                    entry.strip_details();
                }
                entries.push(entry);
            }
            Ok(ReportDocument::new(self.manifest.name.clone(), self.seed(opts), entries))
        })
    }

    /// Pointwise curvature summary of the domain and target charts at the sampler points.
    pub fn curvature(&self, opts: &RunOptions) -> Result<CurvatureDocument> {
        with_threads(opts.threads, || {
            let seed = self.seed(opts);
            let spec = self
                .manifest
                .sampler
                .as_ref()
                .ok_or_else(|| Error::config("curvature report needs a top-level sampler"))?;
            let mut charts = Vec::new();
            for (role, chart, cspec) in [
                ("domain", self.domain.as_ref(), self.manifest.domain.as_ref()),
                ("target", self.target.as_ref(), self.manifest.target.as_ref()),
            ] {
                let (Some(chart), Some(cspec)) = (chart, cspec) else { continue };
                let sampler = Sampler {
                    count: opts.points.unwrap_or(spec.count),
                    radius: spec.radius,
                    seed: opts.seed.or(spec.seed).unwrap_or(seed),
                    shape: spec.shape,
                    center: None,
                };
                let pts = match (role, &self.map) {
                    ("target", Some(f)) => {
                        sampler.points(f.m())?.iter().map(|p| f.image(p)).collect::<Result<Vec<_>>>()?
                    }
                    _ => sampler.points(chart.dim())?,
                };
                check_potential_real(Some(cspec), Some(chart), &pts)?;
                charts.push(chart_curvature(role, chart, cspec, &pts, seed)?);
            }
            if charts.is_empty() {
                return Err(Error::config("curvature report needs a domain or target chart"));
            }
            Ok(CurvatureDocument { schema: crate::report::SCHEMA_VERSION, scenario: self.manifest.name.clone(), seed, charts })
        })
    }
}

fn set_label(entry: &mut ReportEntry, label: &str) {
    match entry {
        ReportEntry::Check(c) => c.label = label.to_string(),
        ReportEntry::Bound(b) => b.label = label.to_string(),
        ReportEntry::Profile(p) => p.label = label.to_string(),
    }
}

fn with_threads<T: Send>(threads: Option<usize>, run: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => run(),
        Some(0) => Err(Error::config("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(format!("cannot build thread pool: {e}")))?
            .install(run),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCurvature {
    pub point: Vec<[f64; 2]>,
    pub holomorphic_sectional: [f64; 2],
    pub bisectional: [f64; 2],
    pub ricci: [f64; 2],
    pub scalar: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelSummary {
    pub holomorphic_sectional: [f64; 2],
    pub bisectional: [f64; 2],
    pub ricci: [f64; 2],
    pub scalar: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartCurvature {
    pub role: String,
    pub chart: String,
    pub dim: usize,
    /// Ranges over all points: `[min, max]`.
    pub holomorphic_sectional: [f64; 2],
    pub bisectional: [f64; 2],
    pub ricci: [f64; 2],
    pub scalar: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSummary>,
    pub points: Vec<PointCurvature>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureDocument {
    pub schema: u32,
    pub scenario: String,
    pub seed: u64,
    pub charts: Vec<ChartCurvature>,
}

impl CurvatureDocument {
    pub fn to_json(&self) -> String {
        crate::report::to_json_string(self)
    }
}

fn chart_curvature(role: &str, chart: &KahlerChart, spec: &ChartSpec, pts: &[Vec<C64>], seed: u64) -> Result<ChartCurvature> {
    use rayon::prelude::*;
    let hs = HypothesisSampling::default();
    let rows: Vec<Result<PointCurvature>> = pts
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let cp = curvature_tensor(chart, p)?;
            let mut cfg = hs.search;
            cfg.seed = seed;
            let h = k_ricci_extremes(&cp, 1, &cfg)?;
            let b = bisectional_range(&cp, hs.probes, seed.wrapping_add(i as u64))?;
            let r = ricci_extremes(&cp)?;
            Ok(PointCurvature {
                point: point_json(p),
                holomorphic_sectional: [h.min, h.max],
                bisectional: [b.0, b.1],
                ricci: [r.0, r.1],
                scalar: scalar(&cp),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let span = |get: &dyn Fn(&PointCurvature) -> [f64; 2]| {
        rows.iter().fold([f64::INFINITY, f64::NEG_INFINITY], |acc, r| {
            let v = get(r);
            [acc[0].min(v[0]), acc[1].max(v[1])]
        })
    };
    Ok(ChartCurvature {
        role: role.into(),
        chart: spec.label(),
        dim: chart.dim(),
        holomorphic_sectional: span(&|r| r.holomorphic_sectional),
        bisectional: span(&|r| r.bisectional),
        ricci: span(&|r| r.ricci),
        scalar: span(&|r| [r.scalar, r.scalar]),
        model: spec.model().map(|m| ModelSummary {
            holomorphic_sectional: [m.holomorphic_sectional.0, m.holomorphic_sectional.1],
            bisectional: [m.bisectional.0, m.bisectional.1],
            ricci: [m.ricci.0, m.ricci.1],
            scalar: m.scalar,
        }),
        points: rows,
    })
}

/// Parses, validates and runs a manifest file.
pub fn run_scenario(path: &Path, opts: &RunOptions) -> Result<ReportDocument> {
    Scenario::from_path(path)?.run(opts)
}
