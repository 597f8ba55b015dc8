//! INI-style run configuration: strict parsing with line numbers, schema
//! validation, defaults, and a canonical serialization that round-trips.

use anyhow::{anyhow, bail, Result};
use resonance_core::sweep::IsolationThreshold;
use resonance_core::{Geometry, GridPolicy, Observable, PotentialFamily, PotentialModel};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSection {
    pub kind: String,
    pub params: BTreeMap<String, f64>,
    pub tail_exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySection {
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub ell: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericsSection {
    pub hbar: f64,
    pub hbar_list: Vec<f64>,
    pub points_per_wavelength: f64,
    pub oversample: f64,
    pub richardson: bool,
    pub seed: u64,
    pub iso_c: f64,
    pub iso_exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub ell_min: f64,
    pub ell_max: f64,
    pub n_ell: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySection {
    pub observable: String,
    pub interior_index: usize,
    pub side: String,
    pub max_levels: usize,
    pub wkb_n_max: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub potential: PotentialSection,
    pub geometry: GeometrySection,
    pub numerics: NumericsSection,
    pub sweep: SweepSection,
    pub study: StudySection,
}

const GAUSSIAN_KEYS: &[&str] = &["b_minus", "b_plus", "p_minus", "p_plus", "w_minus", "w_plus"];
const SQUARE_KEYS: &[&str] = &[
    "height_minus",
    "height_plus",
    "minus_lo",
    "minus_hi",
    "plus_lo",
    "plus_hi",
];

fn family_keys(kind: &str) -> Result<&'static [&'static str]> {
    match kind {
        "two_gaussian_barriers" => Ok(GAUSSIAN_KEYS),
        "square_barriers" => Ok(SQUARE_KEYS),
        "constant" => Ok(&["value"]),
        "infinite_well_zero" => Ok(&[]),
        other => bail!("unknown potential kind `{other}`"),
    }
}

/// Raw `section.key -> (value, line)` map from the INI text.
fn raw_parse(text: &str) -> Result<BTreeMap<String, (String, usize)>> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| anyhow!("line {lineno}: malformed section header `{line}`"))?;
            section = name.trim().to_string();
            if !matches!(
                section.as_str(),
                "potential" | "geometry" | "numerics" | "sweep" | "study"
            ) {
                bail!("line {lineno}: unknown section `[{section}]`");
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {lineno}: expected `key = value`, got `{line}`"))?;
        if section.is_empty() {
            bail!("line {lineno}: key outside any section");
        }
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let full = format!("{section}.{key}");
        if out.insert(full.clone(), (value, lineno)).is_some() {
            bail!("line {lineno}: duplicate key `{full}`");
        }
    }
    Ok(out)
}

struct Fields {
    map: BTreeMap<String, (String, usize)>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.map.remove(key)
    }

    fn f64_req(&mut self, key: &str) -> Result<f64> {
        let (v, line) = self
            .take(key)
            .ok_or_else(|| anyhow!("missing required key `{key}`"))?;
        v.parse::<f64>()
            .map_err(|_| anyhow!("line {line}: `{key}` is not numeric: `{v}`"))
    }

    fn f64_opt(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            None => Ok(default),
            Some((v, line)) => v
                .parse::<f64>()
                .map_err(|_| anyhow!("line {line}: `{key}` is not numeric: `{v}`")),
        }
    }

    fn usize_opt(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            None => Ok(default),
            Some((v, line)) => v
                .parse::<usize>()
                .map_err(|_| anyhow!("line {line}: `{key}` is not a non-negative integer: `{v}`")),
        }
    }

    fn u64_opt(&mut self, key: &str, default: u64) -> Result<u64> {
        match self.take(key) {
            None => Ok(default),
            Some((v, line)) => v
                .parse::<u64>()
                .map_err(|_| anyhow!("line {line}: `{key}` is not an integer: `{v}`")),
        }
    }

    fn bool_opt(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            None => Ok(default),
            Some((v, line)) => match v.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => bail!("line {line}: `{key}` must be true or false, got `{v}`"),
            },
        }
    }

    fn string_opt(&mut self, key: &str, default: &str) -> String {
        self.take(key).map(|(v, _)| v).unwrap_or_else(|| default.to_string())
    }
}

/// Parses and validates a config; defaults are filled in.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let map = raw_parse(text)?;
    let mut f = Fields { map };

    let (kind, _) = f
        .take("potential.kind")
        .ok_or_else(|| anyhow!("missing required key `potential.kind`"))?;
    let keys = family_keys(&kind)?;
    let mut params = BTreeMap::new();
    for &k in keys {
        params.insert(k.to_string(), f.f64_req(&format!("potential.{k}"))?);
    }
    let tail_exponent = f.f64_opt("potential.tail_exponent", 2.0)?;

    let omega_minus = f.f64_req("geometry.omega_minus")?;
    let omega_plus = f.f64_req("geometry.omega_plus")?;
    let ell = match f.take("geometry.ell") {
        None => None,
        Some((v, line)) => Some(
            v.parse::<f64>()
                .map_err(|_| anyhow!("line {line}: `geometry.ell` is not numeric: `{v}`"))?,
        ),
    };

    let hbar = f.f64_req("numerics.hbar")?;
    let hbar_list = match f.take("numerics.hbar_list") {
        None => Vec::new(),
        Some((v, line)) => v
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    anyhow!("line {line}: `numerics.hbar_list` entry not numeric: `{s}`")
                })
            })
            .collect::<Result<Vec<f64>>>()?,
    };
    let numerics = NumericsSection {
        hbar,
        hbar_list,
        points_per_wavelength: f.f64_opt("numerics.points_per_wavelength", 20.0)?,
        oversample: f.f64_opt("numerics.oversample", 2.0)?,
        richardson: f.bool_opt("numerics.richardson", true)?,
        seed: f.u64_opt("numerics.seed", 12345)?,
        iso_c: f.f64_opt("numerics.iso_c", 1.0)?,
        iso_exponent: f.f64_opt("numerics.iso_exponent", 4.0)?,
    };

    let sweep = SweepSection {
        ell_min: f.f64_opt("sweep.ell_min", 8.0)?,
        ell_max: f.f64_opt("sweep.ell_max", 12.0)?,
        n_ell: f.usize_opt("sweep.n_ell", 400)?,
        k: f.usize_opt("sweep.k", 20)?,
    };

    let study = StudySection {
        observable: f.string_opt("study.observable", "gap_right"),
        interior_index: f.usize_opt("study.interior_index", 0)?,
        side: f.string_opt("study.side", "right"),
        max_levels: f.usize_opt("study.max_levels", 4)?,
        wkb_n_max: f.usize_opt("study.wkb_n_max", 4)?,
    };

    if let Some((key, (_, line))) = f.map.iter().next() {
        bail!("line {line}: unknown key `{key}`");
    }

    let cfg = RunConfig {
        potential: PotentialSection {
            kind,
            params,
            tail_exponent,
        },
        geometry: GeometrySection {
            omega_minus,
            omega_plus,
            ell,
        },
        numerics,
        sweep,
        study,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    let n = &cfg.numerics;
    if !(n.hbar > 0.0) || !n.hbar.is_finite() {
        bail!("numerics.hbar must be positive and finite, got {}", n.hbar);
    }
    for &h in &n.hbar_list {
        if !(h > 0.0) || !h.is_finite() {
            bail!("numerics.hbar_list entries must be positive, got {h}");
        }
    }
    if !(n.points_per_wavelength >= 4.0) {
        bail!("numerics.points_per_wavelength must be at least 4");
    }
    if !(n.oversample >= 1.0) {
        bail!("numerics.oversample must be at least 1");
    }
    if !(cfg.sweep.ell_min < cfg.sweep.ell_max) {
        bail!("sweep.ell_min must be below sweep.ell_max");
    }
    if cfg.sweep.n_ell < 2 {
        bail!("sweep.n_ell must be at least 2");
    }
    if cfg.sweep.k < 1 {
        bail!("sweep.k must be at least 1");
    }
    if !matches!(cfg.study.observable.as_str(), "gap_left" | "gap_right" | "t_bound") {
        bail!(
            "study.observable must be gap_left, gap_right or t_bound, got `{}`",
            cfg.study.observable
        );
    }
    if !matches!(cfg.study.side.as_str(), "left" | "right") {
        bail!("study.side must be left or right, got `{}`", cfg.study.side);
    }
    if !(cfg.geometry.omega_minus < 0.0 && cfg.geometry.omega_plus > 0.0) {
        bail!("need geometry.omega_minus < 0 < geometry.omega_plus");
    }
    // construct the model once so family errors surface at parse time
    cfg.model()?;
    Ok(())
}

impl RunConfig {
    pub fn model(&self) -> Result<PotentialModel> {
        let p = &self.potential;
        let get = |k: &str| -> f64 { p.params[k] };
        let family = match p.kind.as_str() {
            "two_gaussian_barriers" => PotentialFamily::TwoGaussianBarriers {
                b_minus: get("b_minus"),
                b_plus: get("b_plus"),
                p_minus: get("p_minus"),
                p_plus: get("p_plus"),
                w_minus: get("w_minus"),
                w_plus: get("w_plus"),
            },
            "square_barriers" => PotentialFamily::SquareBarriers {
                height_minus: get("height_minus"),
                height_plus: get("height_plus"),
                minus_edges: (get("minus_lo"), get("minus_hi")),
                plus_edges: (get("plus_lo"), get("plus_hi")),
            },
            "constant" => PotentialFamily::Constant { value: get("value") },
            "infinite_well_zero" => PotentialFamily::InfiniteWellZero,
            other => bail!("unknown potential kind `{other}`"),
        };
        PotentialModel::new(family, p.tail_exponent).map_err(|e| anyhow!("{e}"))
    }

    /// Box half-width for single-geometry commands.
    pub fn ell(&self) -> f64 {
        self.geometry
            .ell
            .unwrap_or(0.5 * (self.sweep.ell_min + self.sweep.ell_max))
    }

    pub fn geometry(&self) -> Result<Geometry> {
        Geometry::new(self.geometry.omega_minus, self.geometry.omega_plus, self.ell())
            .map_err(|e| anyhow!("{e}"))
    }

    pub fn policy(&self) -> GridPolicy {
        GridPolicy {
            points_per_wavelength: self.numerics.points_per_wavelength,
            oversample: self.numerics.oversample,
            richardson: self.numerics.richardson,
            seed: self.numerics.seed,
            e_max: None,
        }
    }

    pub fn isolation(&self) -> IsolationThreshold {
        IsolationThreshold {
            c: self.numerics.iso_c,
            exponent: self.numerics.iso_exponent,
        }
    }

    pub fn observable(&self) -> Observable {
        match self.study.observable.as_str() {
            "gap_left" => Observable::GapLeft,
            "t_bound" => Observable::TBound,
            _ => Observable::GapRight,
        }
    }

    /// hbar values for multi-hbar commands, falling back to the single one.
    pub fn hbar_values(&self) -> Vec<f64> {
        if self.numerics.hbar_list.is_empty() {
            vec![self.numerics.hbar]
        } else {
            self.numerics.hbar_list.clone()
        }
    }

    /// Fixed-order serialization; parsing it back reproduces the config.
    pub fn to_canonical_string(&self) -> String {
        let mut s = String::new();
        s.push_str("[potential]\n");
        s.push_str(&format!("kind = {}\n", self.potential.kind));
        for (k, v) in &self.potential.params {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s.push_str(&format!("tail_exponent = {}\n", self.potential.tail_exponent));
        s.push_str("\n[geometry]\n");
        s.push_str(&format!("omega_minus = {}\n", self.geometry.omega_minus));
        s.push_str(&format!("omega_plus = {}\n", self.geometry.omega_plus));
        if let Some(ell) = self.geometry.ell {
            s.push_str(&format!("ell = {ell}\n"));
        }
        s.push_str("\n[numerics]\n");
        let n = &self.numerics;
        s.push_str(&format!("hbar = {}\n", n.hbar));
        if !n.hbar_list.is_empty() {
            let list: Vec<String> = n.hbar_list.iter().map(|h| h.to_string()).collect();
            s.push_str(&format!("hbar_list = {}\n", list.join(",")));
        }
        s.push_str(&format!("points_per_wavelength = {}\n", n.points_per_wavelength));
        s.push_str(&format!("oversample = {}\n", n.oversample));
        s.push_str(&format!("richardson = {}\n", n.richardson));
        s.push_str(&format!("seed = {}\n", n.seed));
        s.push_str(&format!("iso_c = {}\n", n.iso_c));
        s.push_str(&format!("iso_exponent = {}\n", n.iso_exponent));
        s.push_str("\n[sweep]\n");
        s.push_str(&format!("ell_min = {}\n", self.sweep.ell_min));
        s.push_str(&format!("ell_max = {}\n", self.sweep.ell_max));
        s.push_str(&format!("n_ell = {}\n", self.sweep.n_ell));
        s.push_str(&format!("k = {}\n", self.sweep.k));
        s.push_str("\n[study]\n");
        s.push_str(&format!("observable = {}\n", self.study.observable));
        s.push_str(&format!("interior_index = {}\n", self.study.interior_index));
        s.push_str(&format!("side = {}\n", self.study.side));
        s.push_str(&format!("max_levels = {}\n", self.study.max_levels));
        s.push_str(&format!("wkb_n_max = {}\n", self.study.wkb_n_max));
        s
    }

    /// First 8 bytes of the SHA-256 of the canonical serialization, hex.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_canonical_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}
