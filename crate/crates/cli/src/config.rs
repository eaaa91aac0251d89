//! Problem configuration documents (TOML) and their conversion to core types.

use serde::{Deserialize, Serialize};

use specasym_core::solutions::BirkhoffSettings;
use specasym_core::spectrum::{CauchySettings, LocateSettings};
use specasym_core::{
    AssociatedMatrix, BoundaryForm, BoundarySpec, ClassTag, CoefficientFunction, ExpressionSpec, IntegrationSettings,
    MatrixFunction, Operator, ProblemSpec, C,
};

use crate::error::CliError;

/// Complex number written as `[re, im]`.
pub type Complex = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub order: Order,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Indices>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Coefficient>>,
    pub boundary: Boundary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_form: Option<WeightForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_matrix: Option<RawMatrix>,
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Order {
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Indices {
    pub i: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    L1,
    L2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coefficient {
    Zero {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        class: Option<Class>,
    },
    Constant {
        value: Complex,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        class: Option<Class>,
    },
    PiecewisePoly {
        breakpoints: Vec<f64>,
        /// Monomial coefficients in `x` for each piece.
        coeffs: Vec<Vec<Complex>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        class: Option<Class>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Form {
    pub p: usize,
    /// Coefficients of the lower quasi-derivatives; empty means all zero.
    #[serde(default)]
    pub u: Vec<Complex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    pub r: usize,
    pub left: Vec<Form>,
    pub right: Vec<Form>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightForm {
    pub p0: usize,
    #[serde(default)]
    pub u0: Vec<Complex>,
}

/// An associated matrix given entry by entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMatrix {
    pub entries: Vec<Vec<Coefficient>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub newton: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cauchy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birkhoff: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_min: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
    /// Anchor radius of the numbering disk in the `t`-plane.
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub seed_radius: Option<f64>,
    /// Opening of the extended sector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

/// Command-line values that take precedence over `[settings]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub l_min: Option<i64>,
    pub l_max: Option<i64>,
    pub kappa: Option<usize>,
    pub seed_radius: Option<f64>,
}

/// Settings after overrides and defaults.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub l_min: i64,
    pub l_max: i64,
    pub kappa: Option<usize>,
    pub h: f64,
    pub integration: IntegrationSettings,
    pub locate: LocateSettings,
    pub cauchy: CauchySettings,
    pub birkhoff: BirkhoffSettings,
}

pub const DEFAULT_L_MAX: i64 = 10;
/// Integration tolerances below rounding level only shrink steps to the floor.
pub const MIN_TOL: f64 = 1e-14;
pub const MAX_TOL: f64 = 1e-3;

fn cx(v: &Complex) -> C {
    C::new(v[0], v[1])
}

fn config_err(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.into(),
        message: message.into(),
    }
}

impl ProblemConfig {
    /// Parses a TOML document; errors name the offending field.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let de = toml::Deserializer::parse(text).map_err(|e| config_err("<document>", e.message()))?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(if path == "." { "<document>".to_string() } else { path }, e.inner().message())
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration documents always serialize")
    }

    /// Structural checks that do not need the core constructors.
    fn check(&self) -> Result<(), CliError> {
        match (&self.coefficients, &self.raw_matrix) {
            (Some(_), Some(_)) => return Err(config_err("raw_matrix", "give either coefficients or raw_matrix, not both")),
            (None, None) => return Err(config_err("coefficients", "one of coefficients or raw_matrix is required")),
            (Some(_), None) if self.indices.is_none() => return Err(config_err("indices", "required with coefficients")),
            _ => {}
        }
        if self.boundary.r != self.boundary.left.len() {
            return Err(config_err(
                "boundary.r",
                format!("r = {} but {} left forms are given", self.boundary.r, self.boundary.left.len()),
            ));
        }
        let s = &self.settings;
        if let (Some(a), Some(b)) = (s.l_min, s.l_max) {
            if a > b {
                return Err(config_err("settings.l_min", format!("l_min = {a} exceeds l_max = {b}")));
            }
        }
        for (name, v) in [
            ("settings.tolerances.integration", s.tolerances.integration),
            ("settings.tolerances.newton", s.tolerances.newton),
            ("settings.tolerances.cauchy", s.tolerances.cauchy),
            ("settings.tolerances.birkhoff", s.tolerances.birkhoff),
            ("settings.R", s.seed_radius),
            ("settings.h", s.h),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(config_err(name, format!("must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.order.n
    }

    pub fn expression(&self) -> Result<Option<ExpressionSpec>, CliError> {
        let (Some(coeffs), Some(idx)) = (&self.coefficients, &self.indices) else {
            return Ok(None);
        };
        let fs = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| coefficient(c, &format!("coefficients[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(ExpressionSpec::new(self.order.n, idx.i.clone(), fs)?))
    }

    pub fn boundary_spec(&self) -> BoundarySpec {
        let forms = |fs: &[Form]| fs.iter().map(|f| form(f.p, &f.u)).collect();
        BoundarySpec::new(
            forms(&self.boundary.left),
            forms(&self.boundary.right),
            self.weight_form.as_ref().map(|w| form(w.p0, &w.u0)),
        )
    }

    pub fn problem(&self) -> Result<ProblemSpec, CliError> {
        let operator = match self.expression()? {
            Some(e) => Operator::Expression(e),
            None => {
                let raw = self.raw_matrix.as_ref().expect("checked at parse time");
                let n = self.order.n;
                if raw.entries.len() != n {
                    return Err(config_err("raw_matrix.entries", format!("expected {n} rows, got {}", raw.entries.len())));
                }
                let mut rows = Vec::with_capacity(n);
                for (i, row) in raw.entries.iter().enumerate() {
                    if row.len() != n {
                        return Err(config_err(
                            format!("raw_matrix.entries[{i}]"),
                            format!("expected {n} entries, got {}", row.len()),
                        ));
                    }
                    rows.push(
                        row.iter()
                            .enumerate()
                            .map(|(j, c)| coefficient(c, &format!("raw_matrix.entries[{i}][{j}]")))
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                Operator::Raw(AssociatedMatrix::from_raw(MatrixFunction::from_rows(rows))?)
            }
        };
        Ok(ProblemSpec::new(operator, self.boundary_spec())?)
    }

    pub fn resolve(&self, o: &Overrides) -> Result<Resolved, CliError> {
        let s = &self.settings;
        let l_min = o.l_min.or(s.l_min).unwrap_or(1);
        let l_max = o.l_max.or(s.l_max).unwrap_or(DEFAULT_L_MAX.max(l_min));
        if l_min > l_max {
            return Err(config_err("settings.l_min", format!("l_min = {l_min} exceeds l_max = {l_max}")));
        }
        let kappa = o.kappa.or(s.kappa);
        if let Some(k) = kappa {
            if k < 1 || k > 2 * self.order.n {
                return Err(config_err("settings.kappa", format!("must lie in 1..={}", 2 * self.order.n)));
            }
        }
        let mut integration = IntegrationSettings::default();
        if let Some(t) = o.tol.or(s.tolerances.integration) {
            if !(MIN_TOL..=MAX_TOL).contains(&t) {
                return Err(config_err("tol", format!("must lie in [{MIN_TOL:e}, {MAX_TOL:e}], got {t:e}")));
            }
            integration.rel_tol = t;
        }
        let mut locate = LocateSettings {
            integration: integration.clone(),
            kappa,
            seed_radius: o.seed_radius.or(s.seed_radius),
            ..LocateSettings::default()
        };
        if let Some(t) = s.tolerances.newton {
            locate.newton_tol = t;
        }
        let mut cauchy = CauchySettings::default();
        if let Some(t) = s.tolerances.cauchy {
            cauchy.rel_tol = t;
        }
        let mut birkhoff = BirkhoffSettings::default();
        if let Some(t) = s.tolerances.birkhoff {
            birkhoff.tol = t;
        }
        Ok(Resolved {
            l_min,
            l_max,
            kappa,
            h: s.h.unwrap_or(1.0),
            integration,
            locate,
            cauchy,
            birkhoff,
        })
    }
}

fn form(p: usize, u: &[Complex]) -> BoundaryForm {
    if u.is_empty() {
        BoundaryForm::new(p, vec![C::new(0.0, 0.0); p])
    } else {
        BoundaryForm::new(p, u.iter().map(cx).collect())
    }
}

fn tag(c: Option<Class>) -> ClassTag {
    match c {
        Some(Class::L1) => ClassTag::L1,
        _ => ClassTag::L2,
    }
}

fn coefficient(c: &Coefficient, path: &str) -> Result<CoefficientFunction, CliError> {
    let f = match c {
        Coefficient::Zero { class } => CoefficientFunction::zero().with_class(tag(*class)),
        Coefficient::Constant { value, class } => CoefficientFunction::constant(cx(value)).with_class(tag(*class)),
        Coefficient::PiecewisePoly {
            breakpoints,
            coeffs,
            class,
        } => {
            let pieces = coeffs.iter().map(|p| p.iter().map(cx).collect()).collect();
            CoefficientFunction::piecewise(breakpoints.clone(), pieces, tag(*class)).map_err(|e| match e {
                specasym_core::Error::Validation { field, message } => config_err(format!("{path}.{field}"), message),
                other => other.into(),
            })?
        }
    };
    Ok(f)
}
