//! Scenario files: strict JSON parsing that reports every violation with its field path.

use std::path::Path;

use serde_json::{Map, Value};

use crate::dissipator::LambdaQuadrature;
use crate::dynamics::IntegratorOptions;
use crate::error::{Error, Result};
use crate::linops::{gibbs_state, Operator, QuantumState};
use crate::model::{presets, BathSpec, GaussianScheme, Scheme, SpectralFunction, SystemModel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub enum InitialState {
    Gibbs { beta: f64 },
    Diagonal(Vec<f64>),
    /// Highest level with weight `1 - mixing`, the rest spread uniformly.
    PureExcited { mixing: f64 },
    Matrix(Operator),
    MaximallyMixed,
    /// Drawn from the scenario seed.
    Random,
}

#[derive(Clone, Debug)]
pub struct OnsagerConfig {
    /// Reference inverse temperature; defaults to the first bath's.
    pub beta: Option<f64>,
    pub dx: f64,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub random_states: usize,
    pub trajectories: usize,
    pub t_end: f64,
    /// Collision times in units of the inverse smallest Bohr gap.
    pub collision_times: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub t_span: (f64, f64),
    pub initial: InitialState,
    pub integrator: IntegratorOptions,
    pub onsager: OnsagerConfig,
    pub verify: VerifyConfig,
}

#[derive(Clone, Debug)]
pub struct OutputConfig {
    pub sample_dt: Option<f64>,
    /// Append flattened Re/Im parts of the state to every trajectory row.
    pub write_state: bool,
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub hamiltonian: Operator,
    pub baths: Vec<BathSpec>,
    pub lambda: LambdaQuadrature,
    pub run: RunConfig,
    pub output: OutputConfig,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn build_model(&self) -> Result<SystemModel> {
        let mut m = SystemModel::new(self.hamiltonian.clone(), self.baths.clone())?;
        m.lambda = self.lambda;
        Ok(m)
    }

    pub fn initial_state(&self, seed: u64) -> Result<QuantumState> {
        let d = self.hamiltonian.nrows();
        match &self.run.initial {
            InitialState::Gibbs { beta } => gibbs_state(&self.hamiltonian, *beta),
            InitialState::Diagonal(p) => QuantumState::diagonal(p),
            InitialState::PureExcited { mixing } => {
                let eig = crate::linops::herm_eig(&self.hamiltonian)?;
                let rest = mixing / (d - 1) as f64;
                let mut p = vec![rest; d];
                p[d - 1] = 1.0 - mixing;
                QuantumState::new(eig.from_eigenbasis(&crate::linops::diag(&p)))
            }
            InitialState::Matrix(m) => QuantumState::new(m.clone()),
            InitialState::MaximallyMixed => Ok(QuantumState::maximally_mixed(d)),
            InitialState::Random => {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                Ok(crate::random::state(d, &mut rng))
            }
        }
    }
}

pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ScenarioConfig> {
    let value: Value = serde_json::from_str(text)?;
    let mut v = Validator::default();
    let cfg = v.scenario(&value);
    match cfg {
        Some(c) if v.errors.is_empty() => Ok(c),
        _ => Err(Error::Schema(v.errors)),
    }
}

#[derive(Default)]
struct Validator {
    errors: Vec<String>,
}

type Obj = Map<String, Value>;

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl Validator {
    fn err(&mut self, path: &str, msg: impl std::fmt::Display) {
        self.errors.push(format!("{path}: {msg}"));
    }

    fn object<'a>(&mut self, v: &'a Value, path: &str, allowed: &[&str]) -> Option<&'a Obj> {
        let Some(map) = v.as_object() else {
            self.err(path, "expected an object");
            return None;
        };
        for k in map.keys() {
            if !allowed.contains(&k.as_str()) {
                self.err(&join(path, k), format!("unknown key (allowed: {})", allowed.join(", ")));
            }
        }
        Some(map)
    }

    /// Object with a `kind` tag; returns the tag.
    fn tagged<'a>(&mut self, v: &'a Value, path: &str, kinds: &[(&str, &[&str])]) -> Option<(&'a str, &'a Obj)> {
        let Some(map) = v.as_object() else {
            self.err(path, "expected an object with a \"kind\" field");
            return None;
        };
        let Some(kind) = map.get("kind").and_then(Value::as_str) else {
            self.err(&join(path, "kind"), "missing or not a string");
            return None;
        };
        let Some((_, fields)) = kinds.iter().find(|k| k.0 == kind) else {
            let names: Vec<&str> = kinds.iter().map(|k| k.0).collect();
            self.err(&join(path, "kind"), format!("unknown kind {kind:?} (expected one of {})", names.join(", ")));
            return None;
        };
        let mut allowed = vec!["kind"];
        allowed.extend_from_slice(fields);
        self.object(v, path, &allowed).map(|m| (kind, m))
    }

    fn f64_opt(&mut self, map: &Obj, key: &str, path: &str) -> Option<f64> {
        match map.get(key) {
            None | Some(Value::Null) => None,
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => Some(x),
                _ => {
                    self.err(&join(path, key), "expected a finite number");
                    None
                }
            },
        }
    }

    fn f64_req(&mut self, map: &Obj, key: &str, path: &str) -> Option<f64> {
        if !map.contains_key(key) {
            self.err(&join(path, key), "required");
            return None;
        }
        self.f64_opt(map, key, path)
    }

    fn positive(&mut self, x: Option<f64>, path: &str) -> Option<f64> {
        match x {
            Some(v) if v > 0.0 => Some(v),
            Some(v) => {
                self.err(path, format!("must be positive, got {v}"));
                None
            }
            None => None,
        }
    }

    fn uint(&mut self, map: &Obj, key: &str, path: &str, default: u64) -> u64 {
        match map.get(key) {
            None => default,
            Some(v) => v.as_u64().unwrap_or_else(|| {
                self.err(&join(path, key), "expected a non-negative integer");
                default
            }),
        }
    }

    fn boolean(&mut self, map: &Obj, key: &str, path: &str, default: bool) -> bool {
        match map.get(key) {
            None => default,
            Some(v) => v.as_bool().unwrap_or_else(|| {
                self.err(&join(path, key), "expected a boolean");
                default
            }),
        }
    }

    fn numbers(&mut self, v: &Value, path: &str) -> Option<Vec<f64>> {
        let Some(arr) = v.as_array() else {
            self.err(path, "expected an array of numbers");
            return None;
        };
        let mut out = Vec::with_capacity(arr.len());
        for (i, x) in arr.iter().enumerate() {
            match x.as_f64() {
                Some(f) if f.is_finite() => out.push(f),
                _ => {
                    self.err(&format!("{path}[{i}]"), "expected a finite number");
                    return None;
                }
            }
        }
        Some(out)
    }

    fn rows(&mut self, v: &Value, path: &str) -> Option<Vec<Vec<f64>>> {
        let Some(arr) = v.as_array() else {
            self.err(path, "expected an array of rows");
            return None;
        };
        let rows: Option<Vec<Vec<f64>>> = arr
            .iter()
            .enumerate()
            .map(|(i, r)| self.numbers(r, &format!("{path}[{i}]")))
            .collect();
        let rows = rows?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            self.err(path, "expected a non-empty square matrix");
            return None;
        }
        Some(rows)
    }

    /// `{"real": [[...]], "imag": [[...]]}` with `imag` optional.
    fn matrix(&mut self, map: &Obj, path: &str) -> Option<Operator> {
        let re = match map.get("real") {
            Some(v) => self.rows(v, &join(path, "real"))?,
            None => {
                self.err(&join(path, "real"), "required");
                return None;
            }
        };
        let n = re.len();
        let im = match map.get("imag") {
            Some(v) => {
                let im = self.rows(v, &join(path, "imag"))?;
                if im.len() != n {
                    self.err(
                        &join(path, "imag"),
                        format!("is {0}x{0} but {1} is {n}x{n}", im.len(), join(path, "real")),
                    );
                    return None;
                }
                im
            }
            None => vec![vec![0.0; n]; n],
        };
        Some(Operator::from_fn(n, n, |i, j| num_complex::Complex64::new(re[i][j], im[i][j])))
    }

    fn scenario(&mut self, v: &Value) -> Option<ScenarioConfig> {
        let map = self.object(v, "", &["schema_version", "seed", "model", "run", "output"])?;
        if let Some(s) = map.get("schema_version") {
            if s.as_u64() != Some(SCHEMA_VERSION as u64) {
                self.err("schema_version", format!("unsupported, expected {SCHEMA_VERSION}"));
            }
        }
        let seed = self.uint(map, "seed", "", 0);
        let model = match map.get("model") {
            Some(m) => self.model(m, "model"),
            None => {
                self.err("model", "required");
                None
            }
        };
        let dim = model.as_ref().map(|m| m.0.nrows());
        let run = self.run(map.get("run").unwrap_or(&Value::Object(Map::new())), "run", dim);
        let output = self.output(map.get("output").unwrap_or(&Value::Object(Map::new())), "output");
        let (hamiltonian, baths, lambda) = model?;
        Some(ScenarioConfig {
            hamiltonian,
            baths,
            lambda,
            run: run?,
            output: output?,
            seed,
        })
    }

    fn model(&mut self, v: &Value, path: &str) -> Option<(Operator, Vec<BathSpec>, LambdaQuadrature)> {
        let map = self.object(v, path, &["hamiltonian", "baths", "lambda_quadrature"])?;
        let h = match map.get("hamiltonian") {
            Some(h) => self.hamiltonian(h, &join(path, "hamiltonian")),
            None => {
                self.err(&join(path, "hamiltonian"), "required");
                None
            }
        };
        if let Some(h) = &h {
            if h.nrows() < 2 {
                self.err(&join(path, "hamiltonian"), "dimension must be at least 2");
            }
            if crate::linops::hermiticity_residual(h) > 1e-10 {
                self.err(&join(path, "hamiltonian"), "not Hermitian");
            }
        }
        let mut lambda = LambdaQuadrature::default();
        if let Some(lq) = map.get("lambda_quadrature") {
            let p = join(path, "lambda_quadrature");
            if let Some(m) = self.object(lq, &p, &["nodes", "analytic"]) {
                lambda.nodes = self.uint(m, "nodes", &p, 32) as usize;
                if lambda.nodes == 0 {
                    self.err(&join(&p, "nodes"), "must be positive");
                }
                lambda.analytic = self.boolean(m, "analytic", &p, true);
            }
        }
        let bp = join(path, "baths");
        let baths: Vec<Option<BathSpec>> = match map.get("baths").and_then(Value::as_array) {
            Some(arr) if !arr.is_empty() => arr
                .iter()
                .enumerate()
                .map(|(i, b)| self.bath(b, &format!("{bp}[{i}]"), h.as_ref(), &join(path, "hamiltonian")))
                .collect(),
            _ => {
                self.err(&bp, "expected a non-empty array");
                vec![None]
            }
        };
        let baths: Option<Vec<BathSpec>> = baths.into_iter().collect();
        Some((h?, baths?, lambda))
    }

    fn hamiltonian(&mut self, v: &Value, path: &str) -> Option<Operator> {
        let (kind, m) = self.tagged(
            v,
            path,
            &[
                ("qubit", &["energy"]),
                ("oscillator", &["levels", "omega"]),
                ("random", &["dim", "seed"]),
                ("three_level", &[]),
                ("matrix", &["real", "imag"]),
            ],
        )?;
        match kind {
            "qubit" => {
                let e = self.f64_req(m, "energy", path);
                let e = self.positive(e, &join(path, "energy"))?;
                Some(presets::qubit(e))
            }
            "oscillator" => {
                let n = self.uint(m, "levels", path, 0) as usize;
                if !(2..=16).contains(&n) {
                    self.err(&join(path, "levels"), "must be between 2 and 16");
                }
                let w = self.f64_req(m, "omega", path);
                let w = self.positive(w, &join(path, "omega"))?;
                (2..=16).contains(&n).then(|| presets::oscillator(n, w))
            }
            "random" => {
                let d = self.uint(m, "dim", path, 0) as usize;
                if !(2..=16).contains(&d) {
                    self.err(&join(path, "dim"), "must be between 2 and 16");
                    return None;
                }
                let seed = self.uint(m, "seed", path, 0);
                Some(presets::random_hermitian(d, seed))
            }
            "three_level" => Some(presets::three_level().0),
            _ => self.matrix(m, path),
        }
    }

    fn bath(&mut self, v: &Value, path: &str, h: Option<&Operator>, h_path: &str) -> Option<BathSpec> {
        let map = self.object(v, path, &["beta", "spectral", "coupling", "scheme"])?;
        let beta = self.f64_req(map, "beta", path);
        let beta = self.positive(beta, &join(path, "beta"));
        let spectral = match map.get("spectral") {
            Some(s) => self.spectral(s, &join(path, "spectral")),
            None => {
                self.err(&join(path, "spectral"), "required");
                None
            }
        };
        let cp = join(path, "coupling");
        let coupling = match map.get("coupling") {
            Some(c) => self.coupling(c, &cp, h),
            None => {
                self.err(&cp, "required");
                None
            }
        };
        if let (Some(c), Some(h)) = (&coupling, h) {
            if c.nrows() != h.nrows() {
                self.err(&cp, format!("is {0}x{0} but {h_path} is {1}x{1}", c.nrows(), h.nrows()));
                return None;
            }
            if crate::linops::hermiticity_residual(c) > 1e-10 {
                self.err(&cp, "not Hermitian");
            }
        }
        let scheme = match map.get("scheme") {
            Some(s) => self.scheme(s, &join(path, "scheme")),
            None => Some(Scheme::Davies),
        };
        Some(BathSpec {
            beta: beta?,
            spectral: spectral?,
            coupling: coupling?,
            scheme: scheme?,
        })
    }

    fn spectral(&mut self, v: &Value, path: &str) -> Option<SpectralFunction> {
        let (kind, m) = self.tagged(
            v,
            path,
            &[
                ("ohmic", &["amplitude", "cutoff"]),
                ("gibbs_exponential", &["amplitude"]),
                ("table", &["points"]),
            ],
        )?;
        let amplitude = |s: &mut Self| {
            let a = s.f64_req(m, "amplitude", path)?;
            if a < 0.0 {
                s.err(&join(path, "amplitude"), format!("must be non-negative, got {a}"));
                return None;
            }
            Some(a)
        };
        match kind {
            "ohmic" => {
                let amplitude = amplitude(self);
                let cutoff = match self.f64_opt(m, "cutoff", path) {
                    Some(c) => self.positive(Some(c), &join(path, "cutoff")),
                    None => Some(f64::INFINITY),
                };
                Some(SpectralFunction::Ohmic {
                    amplitude: amplitude?,
                    cutoff: cutoff?,
                })
            }
            "gibbs_exponential" => Some(SpectralFunction::GibbsExponential { amplitude: amplitude(self)? }),
            _ => {
                let pp = join(path, "points");
                let Some(arr) = m.get("points").and_then(Value::as_array) else {
                    self.err(&pp, "expected an array of [nu, value] pairs");
                    return None;
                };
                let mut pts = Vec::new();
                for (i, p) in arr.iter().enumerate() {
                    match self.numbers(p, &format!("{pp}[{i}]")) {
                        Some(x) if x.len() == 2 => pts.push((x[0], x[1])),
                        Some(_) => self.err(&format!("{pp}[{i}]"), "expected [nu, value]"),
                        None => {}
                    }
                }
                match SpectralFunction::table(pts) {
                    Ok(t) => Some(t),
                    Err(e) => {
                        self.err(&pp, e);
                        None
                    }
                }
            }
        }
    }

    fn coupling(&mut self, v: &Value, path: &str, h: Option<&Operator>) -> Option<Operator> {
        let (kind, m) = self.tagged(
            v,
            path,
            &[
                ("sigma_x", &[]),
                ("sigma_z", &[]),
                ("position", &[]),
                ("three_level", &[]),
                ("random", &["seed"]),
                ("matrix", &["real", "imag"]),
            ],
        )?;
        let d = h.map(|h| h.nrows());
        match kind {
            "sigma_x" => Some(presets::sigma_x()),
            "sigma_z" => Some(presets::sigma_z()),
            "three_level" => Some(presets::three_level().1),
            "position" | "random" => {
                let Some(d) = d else {
                    self.err(path, "needs a valid hamiltonian to infer its dimension");
                    return None;
                };
                if kind == "position" {
                    Some(presets::position(d))
                } else {
                    let seed = self.uint(m, "seed", path, 0);
                    Some(presets::random_hermitian(d, seed))
                }
            }
            _ => self.matrix(m, path),
        }
    }

    fn scheme(&mut self, v: &Value, path: &str) -> Option<Scheme> {
        let (kind, m) = self.tagged(
            v,
            path,
            &[
                ("davies", &[]),
                ("single_q", &[]),
                ("gaussian", &["collision_time", "half_width_factor", "points_per_peak", "panels_per_peak", "centers"]),
            ],
        )?;
        match kind {
            "davies" => Some(Scheme::Davies),
            "single_q" => Some(Scheme::SingleQ),
            _ => {
                let t = self.f64_req(m, "collision_time", path);
                let t = self.positive(t, &join(path, "collision_time"))?;
                let mut g = GaussianScheme::new(t);
                if let Some(k) = self.f64_opt(m, "half_width_factor", path) {
                    g.half_width_factor = self.positive(Some(k), &join(path, "half_width_factor"))?;
                }
                g.points_per_peak = self.uint(m, "points_per_peak", path, 15) as usize;
                if g.points_per_peak == 0 {
                    self.err(&join(path, "points_per_peak"), "must be positive");
                }
                g.panels_per_peak = self.uint(m, "panels_per_peak", path, 4) as usize;
                if g.panels_per_peak == 0 {
                    self.err(&join(path, "panels_per_peak"), "must be positive");
                }
                if let Some(c) = m.get("centers") {
                    g.centers = Some(self.numbers(c, &join(path, "centers"))?);
                }
                Some(Scheme::Gaussian(g))
            }
        }
    }

    fn run(&mut self, v: &Value, path: &str, dim: Option<usize>) -> Option<RunConfig> {
        let map = self.object(v, path, &["t_span", "initial_state", "integrator", "onsager", "verify"])?;
        let mut t_span = (0.0, 50.0);
        if let Some(ts) = map.get("t_span") {
            let p = join(path, "t_span");
            if let Some(x) = self.numbers(ts, &p) {
                if x.len() == 2 && x[1] >= x[0] {
                    t_span = (x[0], x[1]);
                } else {
                    self.err(&p, "expected [t0, t1] with t1 >= t0");
                }
            }
        }
        let initial = match map.get("initial_state") {
            Some(s) => self.initial(s, &join(path, "initial_state"), dim),
            None => Some(InitialState::MaximallyMixed),
        };
        let integrator = match map.get("integrator") {
            Some(i) => self.integrator(i, &join(path, "integrator")),
            None => Some(IntegratorOptions::default()),
        };
        let mut onsager = OnsagerConfig { beta: None, dx: 1e-3 };
        if let Some(o) = map.get("onsager") {
            let p = join(path, "onsager");
            if let Some(m) = self.object(o, &p, &["beta", "dx"]) {
                if let Some(b) = self.f64_opt(m, "beta", &p) {
                    onsager.beta = self.positive(Some(b), &join(&p, "beta"));
                }
                if let Some(dx) = self.f64_opt(m, "dx", &p) {
                    onsager.dx = self.positive(Some(dx), &join(&p, "dx")).unwrap_or(1e-3);
                }
            }
        }
        let mut verify = VerifyConfig {
            random_states: 50,
            trajectories: 3,
            t_end: 40.0,
            collision_times: vec![1.0, 2.0, 4.0, 8.0],
        };
        if let Some(o) = map.get("verify") {
            let p = join(path, "verify");
            if let Some(m) = self.object(o, &p, &["random_states", "trajectories", "t_end", "collision_times"]) {
                verify.random_states = self.uint(m, "random_states", &p, 50) as usize;
                verify.trajectories = self.uint(m, "trajectories", &p, 3) as usize;
                if let Some(t) = self.f64_opt(m, "t_end", &p) {
                    verify.t_end = self.positive(Some(t), &join(&p, "t_end")).unwrap_or(40.0);
                }
                if let Some(c) = m.get("collision_times") {
                    let cp = join(&p, "collision_times");
                    if let Some(c) = self.numbers(c, &cp) {
                        if c.len() < 2 || c.iter().any(|&x| x <= 0.0) {
                            self.err(&cp, "expected at least two positive values");
                        } else {
                            verify.collision_times = c;
                        }
                    }
                }
            }
        }
        Some(RunConfig {
            t_span,
            initial: initial?,
            integrator: integrator?,
            onsager,
            verify,
        })
    }

    fn initial(&mut self, v: &Value, path: &str, dim: Option<usize>) -> Option<InitialState> {
        let (kind, m) = self.tagged(
            v,
            path,
            &[
                ("gibbs", &["beta"]),
                ("diagonal", &["populations"]),
                ("pure_excited", &["mixing"]),
                ("matrix", &["real", "imag"]),
                ("maximally_mixed", &[]),
                ("random", &[]),
            ],
        )?;
        match kind {
            "gibbs" => {
                let b = self.f64_req(m, "beta", path);
                Some(InitialState::Gibbs {
                    beta: self.positive(b, &join(path, "beta"))?,
                })
            }
            "diagonal" => {
                let p = join(path, "populations");
                let pops = self.numbers(m.get("populations").unwrap_or(&Value::Null), &p)?;
                if let Some(d) = dim {
                    if pops.len() != d {
                        self.err(&p, format!("has {} entries but model.hamiltonian is {d}x{d}", pops.len()));
                    }
                }
                if pops.iter().any(|&x| x <= 0.0) || (pops.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
                    self.err(&p, "populations must be positive and sum to 1");
                }
                Some(InitialState::Diagonal(pops))
            }
            "pure_excited" => {
                let mixing = self.f64_opt(m, "mixing", path).unwrap_or(1e-3);
                if !(mixing > 0.0 && mixing < 1.0) {
                    self.err(&join(path, "mixing"), "must lie in (0, 1)");
                }
                Some(InitialState::PureExcited { mixing })
            }
            "matrix" => {
                let op = self.matrix(m, path)?;
                if let Some(d) = dim {
                    if op.nrows() != d {
                        self.err(path, format!("is {0}x{0} but model.hamiltonian is {d}x{d}", op.nrows()));
                    }
                }
                Some(InitialState::Matrix(op))
            }
            "maximally_mixed" => Some(InitialState::MaximallyMixed),
            _ => Some(InitialState::Random),
        }
    }

    fn integrator(&mut self, v: &Value, path: &str) -> Option<IntegratorOptions> {
        let m = self.object(
            v,
            path,
            &["rel_tol", "abs_tol", "initial_step", "max_step", "positivity_floor", "max_retries"],
        )?;
        let mut o = IntegratorOptions::default();
        for (key, slot) in [
            ("rel_tol", &mut o.rel_tol),
            ("abs_tol", &mut o.abs_tol),
            ("initial_step", &mut o.initial_step),
            ("max_step", &mut o.max_step),
        ] {
            if let Some(x) = self.f64_opt(m, key, path) {
                if let Some(x) = self.positive(Some(x), &join(path, key)) {
                    *slot = x;
                }
            }
        }
        if let Some(x) = self.f64_opt(m, "positivity_floor", path) {
            if x < 0.0 {
                self.err(&join(path, "positivity_floor"), "must be non-negative");
            }
            o.positivity_floor = x;
        }
        o.max_retries = self.uint(m, "max_retries", path, o.max_retries as u64) as usize;
        Some(o)
    }

    fn output(&mut self, v: &Value, path: &str) -> Option<OutputConfig> {
        let m = self.object(v, path, &["sample_dt", "write_state"])?;
        let sample_dt = match self.f64_opt(m, "sample_dt", path) {
            Some(x) => Some(self.positive(Some(x), &join(path, "sample_dt"))?),
            None => None,
        };
        Some(OutputConfig {
            sample_dt,
            write_state: self.boolean(m, "write_state", path, false),
        })
    }
}

/// Operator to `{"real": [[...]], "imag": [[...]]}`.
pub fn operator_json(a: &Operator) -> Value {
    let rows = |f: fn(&num_complex::Complex64) -> f64| {
        Value::Array(
            (0..a.nrows())
                .map(|i| Value::Array((0..a.ncols()).map(|j| Value::from(f(&a[(i, j)]))).collect()))
                .collect(),
        )
    };
    serde_json::json!({ "real": rows(|z| z.re), "imag": rows(|z| z.im) })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": {
            "hamiltonian": {"kind": "qubit", "energy": 1.0},
            "baths": [{"beta": 1.0, "spectral": {"kind": "ohmic", "amplitude": 0.1}, "coupling": {"kind": "sigma_x"}}]
        }
    }"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse_config_str(MINIMAL).unwrap();
        assert_eq!(c.lambda, LambdaQuadrature::default());
        assert_eq!(c.baths[0].scheme, Scheme::Davies);
        assert_eq!(c.run.integrator, IntegratorOptions::default());
        assert!(c.build_model().is_ok());
    }

    #[test]
    fn all_violations_reported_with_paths() {
        let text = r#"{
            "model": {
                "hamiltonian": {"kind": "qubit", "energy": 1.0},
                "baths": [
                    {"beta": -1.0, "spectral": {"kind": "ohmic", "amplitude": 0.1}, "coupling": {"kind": "sigma_x"}},
                    {"beta": 1.0, "spectral": {"kind": "ohmic", "amplitude": 0.1, "colour": 1},
                     "coupling": {"kind": "matrix", "real": [[0,1,0],[1,0,0],[0,0,0]]}}
                ]
            },
            "bogus": 1
        }"#;
        match parse_config_str(text) {
            Err(Error::Schema(errs)) => {
                let all = errs.join("\n");
                assert!(all.contains("model.baths[0].beta: must be positive"), "{all}");
                assert!(all.contains("model.baths[1].spectral.colour: unknown key"), "{all}");
                assert!(all.contains("model.baths[1].coupling: is 3x3 but model.hamiltonian is 2x2"), "{all}");
                assert!(all.contains("bogus: unknown key"), "{all}");
                assert_eq!(errs.len(), 4);
            }
            other => panic!("expected schema errors, got {other:?}"),
        }
    }

    #[test]
    fn flat_spectrum_rejected_at_model_build() {
        let text = MINIMAL.replace(
            r#"{"kind": "ohmic", "amplitude": 0.1}"#,
            r#"{"kind": "table", "points": [[-5, 1], [5, 1]]}"#,
        );
        let c = parse_config_str(&text).unwrap();
        match c.build_model() {
            Err(e @ Error::Kms { .. }) => assert_eq!(e.exit_code(), 2),
            other => panic!("expected KMS error, got {other:?}"),
        }
    }
}
