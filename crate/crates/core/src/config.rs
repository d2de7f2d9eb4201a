//! JSON run configuration.
//!
//! Every field has a default, so `{}` is a valid configuration describing the
//! baseline transwell scenario. Lengths are in metres, times in microseconds,
//! pressures in Pa unless the field name says otherwise.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::axisource::SourceForm;
use crate::eos::{Material, MaterialParams};
use crate::error::ConfigError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub grid: GridConfig,
    pub transwell: TranswellConfig,
    pub hydrophone: HydrophoneConfig,
    pub materials: MaterialsConfig,
    pub shock: ShockConfig,
    pub numerics: NumericsConfig,
    /// Defaults to the three on-axis gauges placed relative to the transwell.
    pub gauges: Option<Vec<GaugeConfig>>,
    pub frame_times_us: Vec<f64>,
    pub t_end_us: f64,
    /// Absolute vapour pressure of water used for cavitation flags.
    pub p_vapor: f64,
    pub output_dir: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            transwell: TranswellConfig::default(),
            hydrophone: HydrophoneConfig::default(),
            materials: MaterialsConfig::default(),
            shock: ShockConfig::default(),
            numerics: NumericsConfig::default(),
            gauges: None,
            frame_times_us: vec![30.0, 60.0, 63.2, 69.6, 84.8, 134.4],
            t_end_us: 134.4,
            p_vapor: 2339.0,
            output_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_r: usize,
    pub n_z: usize,
    pub r_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_r: 200, n_z: 400, r_max: 0.02, z_min: 0.0, z_max: 0.04 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TranswellConfig {
    /// Proximal (shock-facing) water face.
    pub z_start: f64,
    pub length: f64,
    pub radius: f64,
}

impl Default for TranswellConfig {
    fn default() -> Self {
        Self { z_start: 0.010, length: 0.017, radius: 0.0085 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HydrophoneConfig {
    pub enabled: bool,
    pub radius: f64,
    /// Axial position of the rod tip; defaults to the transwell mid-plane.
    pub tip_z: Option<f64>,
    /// Water face the rod enters through; it runs from there to the tip.
    pub entry: HydrophoneEntry,
}

impl Default for HydrophoneConfig {
    fn default() -> Self {
        Self { enabled: false, radius: 0.001425, tip_z: None, entry: HydrophoneEntry::Distal }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HydrophoneEntry {
    /// Through the downstream face, the one the shock reaches last.
    #[default]
    Distal,
    Proximal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialsConfig {
    pub air: MaterialParams,
    pub water: MaterialParams,
    pub polystyrene: MaterialParams,
}

impl Default for MaterialsConfig {
    fn default() -> Self {
        Self { air: MaterialParams::air(), water: MaterialParams::water(), polystyrene: MaterialParams::polystyrene() }
    }
}

impl MaterialsConfig {
    pub fn get(&self, m: Material) -> MaterialParams {
        match m {
            Material::Air => self.air,
            Material::Water => self.water,
            Material::Polystyrene => self.polystyrene,
        }
    }

    pub fn table(&self) -> [MaterialParams; 3] {
        [self.air, self.water, self.polystyrene]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileKind {
    StepHold,
    StepExponential { tau_us: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShockConfig {
    pub peak_psi: f64,
    pub profile: ProfileKind,
    /// Time at which the post-shock state starts entering at z-min.
    pub arrival_us: f64,
    pub ambient_pressure: f64,
}

impl Default for ShockConfig {
    fn default() -> Self {
        Self { peak_psi: 13.0, profile: ProfileKind::StepHold, arrival_us: 0.0, ambient_pressure: crate::eos::ATM_PA }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub cfl: f64,
    pub limiter: bool,
    pub transverse: bool,
    pub source: bool,
    pub source_form: SourceForm,
    pub strang: bool,
    pub threads: Option<usize>,
    pub exact_tol: f64,
    pub exact_max_iter: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            cfl: 0.45,
            limiter: true,
            transverse: true,
            source: true,
            source_form: SourceForm::Conservative,
            strang: false,
            threads: None,
            exact_tol: 1e-10,
            exact_max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    pub id: String,
    pub r: f64,
    pub z: f64,
}

/// On-axis gauges near the proximal face, at the mid-plane and next to the
/// distal face where the cell monolayer sits.
pub fn default_gauges(t: &TranswellConfig) -> Vec<GaugeConfig> {
    vec![
        GaugeConfig { id: "1".into(), r: 0.0, z: t.z_start + 0.001 },
        GaugeConfig { id: "2".into(), r: 0.0, z: t.z_start + 0.5 * t.length },
        GaugeConfig { id: "3".into(), r: 0.0, z: t.z_start + t.length - 0.0005 },
    ]
}

impl Config {
    pub fn from_json_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: Config = serde_json::from_str(s).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn resolved_gauges(&self) -> Vec<GaugeConfig> {
        self.gauges.clone().unwrap_or_else(|| default_gauges(&self.transwell))
    }

    pub fn peak_overpressure(&self) -> f64 {
        self.shock.peak_psi * crate::eos::PSI_PA
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        for m in self.materials.table() {
            m.validate().map_err(ConfigError::Invalid)?;
        }
        if self.materials.air.label != Material::Air
            || self.materials.water.label != Material::Water
            || self.materials.polystyrene.label != Material::Polystyrene
        {
            return bad("material labels do not match their slots".into());
        }
        if !(self.numerics.cfl > 0.0 && self.numerics.cfl < 1.0) {
            return bad(format!("cfl must lie in (0, 1), got {}", self.numerics.cfl));
        }
        if !(self.numerics.exact_tol > 0.0) || self.numerics.exact_max_iter == 0 {
            return bad("exact solver tolerance and iteration cap must be positive".into());
        }
        if !(self.t_end_us > 0.0) {
            return bad(format!("t_end_us must be positive, got {}", self.t_end_us));
        }
        if !(self.shock.peak_psi > 0.0) {
            return bad(format!("peak overpressure must be positive, got {} psi", self.shock.peak_psi));
        }
        if !(self.shock.ambient_pressure > 0.0) {
            return bad("ambient pressure must be positive".into());
        }
        if let ProfileKind::StepExponential { tau_us } = self.shock.profile {
            if !(tau_us > 0.0) {
                return bad(format!("profile decay time must be positive, got {tau_us}"));
            }
        }
        if !(self.p_vapor > 0.0) {
            return bad(format!("p_vapor must be positive, got {}", self.p_vapor));
        }
        if self.frame_times_us.iter().any(|t| !(*t > 0.0) || *t > self.t_end_us) {
            return bad("frame times must lie in (0, t_end_us]".into());
        }
        if self.frame_times_us.windows(2).any(|w| w[1] <= w[0]) {
            return bad("frame times must be strictly increasing".into());
        }
        if let Some(0) = self.numerics.threads {
            return bad("threads must be at least 1".into());
        }
        let gauges = self.resolved_gauges();
        let mut ids: Vec<&str> = gauges.iter().map(|g| g.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return bad("duplicate gauge id".into());
        }
        if gauges.iter().any(|g| g.id.is_empty() || g.id.contains(['/', '\\'])) {
            return bad("gauge ids must be non-empty and contain no path separators".into());
        }
        Ok(())
    }
}
