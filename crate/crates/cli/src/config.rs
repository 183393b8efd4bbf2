use ctxobs_core::linalg::ToleranceConfig;
use serde::Serialize;

/// Environment variable selecting the default tolerance profile.
pub const TOL_PROFILE_ENV: &str = "CTXOBS_TOL_PROFILE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TolProfile {
    Default,
    Strict,
    Loose,
}

impl TolProfile {
    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "default" => Some(Self::Default),
            "strict" => Some(Self::Strict),
            "loose" => Some(Self::Loose),
            _ => None,
        }
    }

    pub fn tolerances(self) -> ToleranceConfig {
        let base = ToleranceConfig::default();
        match self {
            Self::Default => base,
            Self::Strict => ToleranceConfig {
                tol_rank: base.tol_rank / 100.0,
                tol_eig_cluster: base.tol_eig_cluster / 100.0,
                tol_hermitian: base.tol_hermitian / 100.0,
                tol_compare: base.tol_compare / 100.0,
            },
            Self::Loose => ToleranceConfig {
                tol_rank: base.tol_rank * 100.0,
                tol_eig_cluster: base.tol_eig_cluster * 100.0,
                tol_hermitian: base.tol_hermitian * 100.0,
                tol_compare: base.tol_compare * 100.0,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Serializable mirror of the tolerance policy, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ToleranceReport {
    pub tol_rank: f64,
    pub tol_eig_cluster: f64,
    pub tol_hermitian: f64,
    pub tol_compare: f64,
}

impl From<&ToleranceConfig> for ToleranceReport {
    fn from(cfg: &ToleranceConfig) -> Self {
        Self {
            tol_rank: cfg.tol_rank,
            tol_eig_cluster: cfg.tol_eig_cluster,
            tol_hermitian: cfg.tol_hermitian,
            tol_compare: cfg.tol_compare,
        }
    }
}

/// Per-run configuration: seed, tolerances, output sink and format.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: ToleranceConfig,
    pub format: OutputFormat,
    pub out: Option<std::path::PathBuf>,
}

impl RunConfig {
    pub fn resolve(
        seed: u64,
        format: OutputFormat,
        out: Option<std::path::PathBuf>,
        flag_profile: Option<TolProfile>,
    ) -> Result<Self, String> {
        let profile = match flag_profile {
            Some(p) => p,
            None => match std::env::var(TOL_PROFILE_ENV) {
                Ok(name) => TolProfile::from_name(&name).ok_or(format!(
                    "unknown tolerance profile {name:?} in {TOL_PROFILE_ENV} (expected default, strict or loose)"
                ))?,
                Err(_) => TolProfile::Default,
            },
        };
        let tolerances = profile.tolerances();
        tolerances.validate().map_err(|e| e.to_string())?;
        Ok(Self { seed, tolerances, format, out })
    }
}
