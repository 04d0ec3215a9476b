//! Scenario configuration (TOML). Every table rejects unknown keys and every
//! field has a default, so an empty file is a valid configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use symfield::rep::RepDescriptor;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub ccr: CcrConfig,
    pub grading: GradingConfig,
    pub hvz: HvzConfig,
    pub demo2d: Demo2dConfig,
    pub aniso: AnisoConfig,
    pub membership: MembershipConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            output_dir: None,
            ccr: Default::default(),
            grading: Default::default(),
            hvz: Default::default(),
            demo2d: Default::default(),
            aniso: Default::default(),
            membership: Default::default(),
        }
    }
}

/// Fractions of the box limit along the translation direction.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self { lo: 0.7, hi: 0.98, count: 6 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CcrConfig {
    /// Backends checked at `xi`, `eta` (finite backends: all lattice pairs).
    pub backends: Vec<RepDescriptor>,
    /// Balanced d = 1 grids for the refinement sweep.
    pub refinement: Vec<usize>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub tol_exact: f64,
    pub tol_grid: f64,
    pub noise_floor: f64,
}

impl Default for CcrConfig {
    fn default() -> Self {
        Self {
            backends: [2, 3, 4, 8].iter().map(|&n| RepDescriptor::Finweyl { n, d: 1 }).collect(),
            refinement: vec![64, 128, 256, 512],
            xi: vec![0.7, -0.4],
            eta: vec![-0.3, 0.9],
            tol_exact: 1e-13,
            tol_grid: 1e-6,
            noise_floor: 1e-12,
        }
    }
}

/// One dichotomy case: generator `exp(-(phi(xi)/width)^2)` with `xi` at angle
/// `xi_angle`, projected onto the line at angle `e_angle`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineCase {
    pub xi_angle: f64,
    pub e_angle: f64,
    #[serde(default = "one")]
    pub width: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GradingConfig {
    pub m: usize,
    pub cases: Vec<LineCase>,
    pub schedule: ScheduleConfig,
    pub tol: f64,
    pub decompose_tol: f64,
    pub morphism_pairs: usize,
    pub morphism_tol: f64,
}

impl Default for GradingConfig {
    fn default() -> Self {
        use std::f64::consts::FRAC_PI_2 as H;
        use std::f64::consts::FRAC_PI_4 as Q;
        let pairs = [(0.0, 0.0), (0.0, H), (H, H), (H, 0.0), (Q, Q), (Q, 3.0 * Q), (0.3, 0.3), (1.1, 0.3)];
        Self {
            m: 256,
            cases: pairs
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| LineCase { xi_angle: a, e_angle: b, width: if i % 2 == 0 { 1.0 } else { 2f64.sqrt() } })
                .collect(),
            schedule: ScheduleConfig::default(),
            tol: 1e-3,
            decompose_tol: 1e-2,
            morphism_pairs: 4,
            morphism_tol: 1e-2,
        }
    }
}

/// `strength * exp(-(s / width)^2)` where `s = direction . q` when a direction
/// is given and `|q - center|` otherwise; `q` is the position projected onto
/// the orthogonal complement of `span(e_i : i in along)` in X.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    #[serde(default)]
    pub along: Vec<usize>,
    pub strength: f64,
    #[serde(default = "one")]
    pub width: f64,
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum Dispersion {
    /// `|k|^2`
    Square,
    /// `sqrt(|k|^2 + mass^2) - mass`
    Relativistic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleBoxConfig {
    pub l_small: f64,
    pub l_large: f64,
    #[serde(default = "default_match")]
    pub match_tol: f64,
    #[serde(default = "default_rel")]
    pub rel_tol: f64,
}

fn default_match() -> f64 {
    1e-2
}

fn default_rel() -> f64 {
    0.05
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HvzConfig {
    pub d: usize,
    pub m: usize,
    /// Box half-width; the balanced grid is used when absent.
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub dispersion: Dispersion,
    pub mass: f64,
    pub potentials: Vec<PotentialConfig>,
    pub cluster_factor: f64,
    pub form_shift: f64,
    pub hsr_fractions: Vec<f64>,
    pub double_box: Option<DoubleBoxConfig>,
}

impl Default for HvzConfig {
    fn default() -> Self {
        Self {
            d: 1,
            m: 128,
            l: None,
            dispersion: Dispersion::Square,
            mass: 1.0,
            potentials: vec![PotentialConfig { along: vec![], strength: -5.0, width: 1.0, direction: None, center: None }],
            cluster_factor: 3.0,
            form_shift: 0.75,
            hsr_fractions: vec![],
            double_box: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Demo2dConfig {
    pub m: usize,
    pub thetas: Vec<f64>,
    pub dilations: Vec<f64>,
    pub tol: f64,
}

impl Default for Demo2dConfig {
    fn default() -> Self {
        Self {
            m: 256,
            thetas: vec![std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_3, 1.2],
            dilations: vec![0.1, 0.3, 0.5],
            tol: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum AnisoPotential {
    /// `a_minus + (a_plus - a_minus)(1 + tanh q)/2`
    Step,
    /// `strength * exp(-q^2)`
    Bump,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Differ,
    Agree,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnisoConfig {
    pub m: usize,
    pub potential: AnisoPotential,
    pub a_minus: f64,
    pub a_plus: f64,
    pub strength: f64,
    pub schedule: ScheduleConfig,
    pub tol: f64,
    pub expect: Option<Expectation>,
}

impl Default for AnisoConfig {
    fn default() -> Self {
        Self {
            m: 512,
            potential: AnisoPotential::Step,
            a_minus: 0.0,
            a_plus: 1.0,
            strength: -2.0,
            schedule: ScheduleConfig::default(),
            tol: 1e-3,
            expect: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MembershipConfig {
    pub m: Vec<usize>,
    /// Probe radius is `scale_factor / m`.
    pub scale_factor: f64,
    pub tol: f64,
    pub basis_angle: f64,
    pub basis_tol: f64,
}

impl Default for MembershipConfig {
    fn default() -> Self {
        Self { m: vec![128, 256, 512], scale_factor: 4.0, tol: 1e-2, basis_angle: 0.37, basis_tol: 1e-8 }
    }
}

fn check(cond: bool, msg: &str, errs: &mut Vec<String>) {
    if !cond {
        errs.push(msg.to_string());
    }
}

fn pow2(m: usize) -> bool {
    m >= 4 && m.is_power_of_two()
}

fn check_schedule(s: &ScheduleConfig, name: &str, errs: &mut Vec<String>) {
    check(s.lo > 0.0 && s.lo < s.hi && s.hi <= 1.0, &format!("{name}.schedule: need 0 < lo < hi <= 1"), errs);
    check(s.count >= 4, &format!("{name}.schedule.count must be at least 4"), errs);
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        let mut e = Vec::new();
        let c = &self.ccr;
        check(c.xi.len() == 2 && c.eta.len() == 2, "ccr.xi and ccr.eta must have length 2", &mut e);
        check(c.refinement.iter().all(|&m| pow2(m)), "ccr.refinement: grid sizes must be powers of two >= 4", &mut e);
        for b in &c.backends {
            match *b {
                RepDescriptor::Finweyl { n, d } => check(n >= 2 && d == 1, "ccr.backends: finweyl needs N >= 2, d = 1", &mut e),
                RepDescriptor::Grid { d, m, l } => {
                    check(d == 1 && pow2(m) && l > 0.0, "ccr.backends: grid needs d = 1, m a power of two, L > 0", &mut e)
                }
                RepDescriptor::Regular { n, m, l } => {
                    check(n == 1 && pow2(m) && l > 0.0, "ccr.backends: regular needs n = 1, m a power of two, L > 0", &mut e)
                }
            }
        }
        let g = &self.grading;
        check(pow2(g.m), "grading.m must be a power of two >= 4", &mut e);
        check(g.cases.iter().all(|c| c.width > 0.0), "grading.cases: width must be positive", &mut e);
        check_schedule(&g.schedule, "grading", &mut e);
        let h = &self.hvz;
        check(h.d == 1 || h.d == 2, "hvz.d must be 1 or 2", &mut e);
        check(pow2(h.m), "hvz.m must be a power of two >= 4", &mut e);
        check(h.l.is_none_or(|l| l > 0.0), "hvz.L must be positive", &mut e);
        check(h.cluster_factor > 0.0 && h.form_shift >= 0.0, "hvz: cluster_factor > 0 and form_shift >= 0", &mut e);
        check(h.hsr_fractions.iter().all(|f| *f > 0.0 && *f <= 1.0), "hvz.hsr_fractions must lie in (0, 1]", &mut e);
        for p in &h.potentials {
            check(p.along.iter().all(|&a| a < h.d), "hvz.potentials.along: axis index out of range", &mut e);
            check(p.along.len() < h.d, "hvz.potentials: a potential on all of X is not an interaction", &mut e);
            check(p.width > 0.0, "hvz.potentials.width must be positive", &mut e);
            check(p.direction.as_ref().is_none_or(|v| v.len() == h.d), "hvz.potentials.direction must have length d", &mut e);
            check(p.center.as_ref().is_none_or(|v| v.len() == h.d), "hvz.potentials.center must have length d", &mut e);
        }
        if let Some(b) = &h.double_box {
            check(b.l_small > 0.0 && b.l_small < b.l_large, "hvz.double_box: need 0 < l_small < l_large", &mut e);
        }
        let d = &self.demo2d;
        check(pow2(d.m), "demo2d.m must be a power of two >= 4", &mut e);
        check(d.thetas.iter().all(|t| t.sin().abs() > 1e-6), "demo2d.thetas must avoid multiples of pi", &mut e);
        let a = &self.aniso;
        check(pow2(a.m), "aniso.m must be a power of two >= 4", &mut e);
        check_schedule(&a.schedule, "aniso", &mut e);
        let m = &self.membership;
        check(!m.m.is_empty() && m.m.iter().all(|&x| pow2(x)), "membership.m: nonempty list of powers of two", &mut e);
        check(m.scale_factor > 0.0, "membership.scale_factor must be positive", &mut e);
        if e.is_empty() {
            Ok(())
        } else {
            Err(e.join("; "))
        }
    }

    /// SHA-256 of the resolved configuration (defaults filled in) as JSON.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canon.as_bytes()))
    }
}
