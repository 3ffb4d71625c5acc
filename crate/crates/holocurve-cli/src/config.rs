//! Job configuration: a TOML file naming the field sources, initial data
//! and numeric knobs. Field sources are paths (resolved relative to the
//! config file) or `builtin:<name>` for the bundled cases. Domain keys in
//! the config override the field file's own domain block.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use holocurve_core::bundled;
use holocurve_core::contour::ContourSpec;
use holocurve_core::fieldexpr::{parse_field, parse_field_file, Field};
use holocurve_core::lincomplex::{C64, CVector, DomainBox, Interval};
use holocurve_core::odesolve::{Certify, PicardOptions, TubeSampling};
use holocurve_core::verify::VerifyConfig;
use holocurve_core::{Error, Result};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Field source: a path or `builtin:<name>`.
    pub phi: Option<String>,
    /// Direction field for sensitivity jobs; shares the domain of phi.
    pub dphi: Option<String>,
    /// Initial value, complex literals like "1" or "0.5+0.25i".
    pub xi: Option<Vec<String>>,
    /// Initial-value direction for sensitivity jobs.
    pub dxi: Option<Vec<String>>,
    pub dimension: Option<usize>,
    /// Domain overrides; when present they replace the field file's block.
    pub t0: Option<f64>,
    pub half_width: Option<f64>,
    pub center: Option<Vec<String>>,
    pub radius: Option<f64>,
    pub norm_p: Option<f64>,
    pub grid_size: Option<usize>,
    pub contour_nodes: Option<usize>,
    pub contour_radius: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_iter: Option<usize>,
    /// Explicit contraction tube radius (overrides the ladder search).
    pub b1: Option<f64>,
    pub force: Option<bool>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub cross_check_tol: Option<f64>,
    pub cross_check_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyKnobs>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyKnobs {
    pub suite: Option<String>,
    pub kth_poly_cases: Option<usize>,
    pub superpose_cases: Option<usize>,
    pub solution_map_cases: Option<usize>,
    pub chi_dchi_samples: Option<usize>,
    pub chi_continuity_samples: Option<usize>,
    pub chi_remainder_samples: Option<usize>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<(JobConfig, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Parameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: JobConfig = toml::from_str(&text).map_err(|e| {
            Error::Parameter(format!("invalid config {}: {e}", path.display()))
        })?;
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((cfg, base))
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size.unwrap_or(257)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(1e-12)
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter.unwrap_or(200)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn cross_check_tol(&self) -> f64 {
        self.cross_check_tol.unwrap_or(1e-6)
    }

    pub fn cross_check_step(&self) -> f64 {
        self.cross_check_step.unwrap_or(1e-4)
    }

    pub fn contour_spec(&self) -> Result<ContourSpec> {
        ContourSpec::new(
            self.contour_nodes.unwrap_or(64),
            self.contour_radius.unwrap_or(0.5),
        )
    }

    pub fn picard_options(&self, force_flag: bool) -> Result<PicardOptions> {
        let certify = if let Some(b1) = self.b1 {
            Certify::ExplicitB1(b1)
        } else if force_flag || self.force.unwrap_or(false) {
            Certify::Force
        } else {
            Certify::Require
        };
        Ok(PicardOptions {
            grid_size: self.grid_size(),
            tol: self.tolerance(),
            max_iter: self.max_iter(),
            certify,
            contour: self.contour_spec()?,
            sampling: TubeSampling::default(),
        })
    }

    pub fn verify_config(&self) -> Result<VerifyConfig> {
        let mut vc = VerifyConfig {
            seed: self.seed(),
            grid_size: self.grid_size(),
            contour: self.contour_spec()?,
            tol: self.tolerance(),
            max_iter: self.max_iter(),
            ..VerifyConfig::default()
        };
        if let Some(k) = &self.verify {
            if let Some(v) = k.kth_poly_cases {
                vc.kth_poly_cases = v;
            }
            if let Some(v) = k.superpose_cases {
                vc.superpose_cases = v;
            }
            if let Some(v) = k.solution_map_cases {
                vc.solution_map_cases = v;
            }
            if let Some(v) = k.chi_dchi_samples {
                vc.chi_dchi_samples = v;
            }
            if let Some(v) = k.chi_continuity_samples {
                vc.chi_continuity_samples = v;
            }
            if let Some(v) = k.chi_remainder_samples {
                vc.chi_remainder_samples = v;
            }
        }
        Ok(vc)
    }

    /// Load the main field, applying any domain overrides.
    pub fn load_phi(&self, base: &Path) -> Result<Field> {
        let source = self
            .phi
            .as_deref()
            .ok_or_else(|| Error::Parameter("config needs a 'phi' field source".into()))?;
        let field = load_field(source, base)?;
        let field = self.apply_domain_overrides(field)?;
        if let Some(n) = self.dimension {
            if field.dim() != n {
                return Err(Error::Parameter(format!(
                    "config says dimension {n} but the field has {}",
                    field.dim()
                )));
            }
        }
        Ok(field)
    }

    /// Load the direction field, re-homed onto phi's domain.
    pub fn load_dphi(&self, base: &Path, phi: &Field) -> Result<Option<Field>> {
        let Some(source) = self.dphi.as_deref() else {
            return Ok(None);
        };
        let raw = load_field(source, base)?;
        if raw.dim() != phi.dim() {
            return Err(Error::Parameter(format!(
                "dphi has dimension {} but phi has {}",
                raw.dim(),
                phi.dim()
            )));
        }
        Ok(Some(Field::new(raw.expr().clone(), phi.domain().clone())?))
    }

    pub fn parse_xi(&self, dim: usize) -> Result<CVector> {
        let entries = self
            .xi
            .as_ref()
            .ok_or_else(|| Error::Parameter("config needs initial data 'xi'".into()))?;
        parse_vector(entries, dim, "xi")
    }

    pub fn parse_dxi(&self, dim: usize) -> Result<CVector> {
        match &self.dxi {
            Some(entries) => parse_vector(entries, dim, "dxi"),
            None => Ok(CVector::zero(dim)),
        }
    }

    fn apply_domain_overrides(&self, field: Field) -> Result<Field> {
        let any = self.t0.is_some()
            || self.half_width.is_some()
            || self.center.is_some()
            || self.radius.is_some()
            || self.norm_p.is_some();
        if !any {
            return Ok(field);
        }
        let old = field.domain();
        let interval = Interval::new(
            self.t0.unwrap_or_else(|| old.interval().t0()),
            self.half_width.unwrap_or_else(|| old.interval().half_width()),
        )?;
        let center = match &self.center {
            Some(entries) => parse_vector(entries, field.dim(), "center")?,
            None => old.center().clone(),
        };
        let domain = DomainBox::new(
            interval,
            center,
            self.radius.unwrap_or_else(|| old.radius()),
            self.norm_p.unwrap_or_else(|| old.norm_p()),
        )?;
        Field::new(field.expr().clone(), domain)
    }
}

/// A complex literal in the expression grammar ("1", "-0.5+0.25i", ...).
pub fn parse_complex(text: &str) -> Result<C64> {
    let fe = parse_field(text, 1)?;
    let coord = &fe.coords()[0];
    if coord.contains_state() || coord.contains_time() {
        return Err(Error::Parameter(format!(
            "'{text}' is not a constant expression"
        )));
    }
    Ok(coord.eval(0.0, &[]))
}

fn parse_vector(entries: &[String], dim: usize, what: &str) -> Result<CVector> {
    if entries.len() != dim {
        return Err(Error::Parameter(format!(
            "{what} has {} entries but the field dimension is {dim}",
            entries.len()
        )));
    }
    let mut out = Vec::with_capacity(dim);
    for e in entries {
        out.push(parse_complex(e)?);
    }
    Ok(CVector::new(out))
}

fn load_field(source: &str, base: &Path) -> Result<Field> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return bundled::field(name);
    }
    let path = if Path::new(source).is_absolute() {
        PathBuf::from(source)
    } else {
        base.join(source)
    };
    let text = std::fs::read_to_string(&path).map_err(|e| {
        Error::Parameter(format!("cannot read field file {}: {e}", path.display()))
    })?;
    parse_field_file(&text)
}
