use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{random_element, BlockMatrix, CMatrix, WStarSpace, ONE};
use crate::error::{Error, Result};
use crate::io::{element_from_json, space_from_json};
use crate::powers::PowersSpec;
use crate::rng::{derive_seed, rng_from_seed};

/// Largest stage dimension materialized as an explicit matrix.
pub const DEFAULT_STAGE_CAP: usize = 1 << 12;

pub const FAMILY_NAMES: &[&str] = &[
    "constant_element",
    "tensor_power_diag",
    "twisted",
    "unitary_twist",
    "matrix_unit_power",
    "random_bounded",
    "block_scalars",
    "scaled_matrix_unit",
    "custom",
];

fn half() -> f64 {
    0.5
}

fn unit() -> f64 {
    1.0
}

/// A named sequence generator. Families tied to Powers stages live on
/// `(M_2, φ_λ)^{⊗n}`; the others live on a fixed list of block sizes,
/// with a fresh random faithful state at every stage when `seed` is given
/// and the normalized trace otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `x_n = value · 1`.
    ConstantElement {
        #[serde(default = "unit")]
        value: f64,
        #[serde(default = "half")]
        lambda: f64,
    },
    /// `x_n = diag(c, c)^{⊗n}`.
    TensorPowerDiag {
        c: f64,
        #[serde(default = "half")]
        lambda: f64,
    },
    /// `x_n = (a^{it})^{⊗n} diag(c, c)^{⊗n}`.
    Twisted {
        c: f64,
        t: f64,
        #[serde(default = "half")]
        lambda: f64,
    },
    /// `x_n = (a^{it})^{⊗n}`.
    UnitaryTwist {
        t: f64,
        #[serde(default = "half")]
        lambda: f64,
    },
    /// `x_n = (c e_ij)^{⊗n}`.
    MatrixUnitPower {
        i: usize,
        j: usize,
        #[serde(default = "unit")]
        c: f64,
        #[serde(default = "half")]
        lambda: f64,
    },
    /// Random element of operator norm `bound` at every stage.
    RandomBounded {
        dims: Vec<usize>,
        #[serde(default = "unit")]
        bound: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        space_seed: Option<u64>,
    },
    /// The central element with scalar `values[k]` on block `k`.
    BlockScalars {
        dims: Vec<usize>,
        values: Vec<f64>,
        #[serde(default)]
        space_seed: Option<u64>,
    },
    /// `x_n = rate^n e_ij` inside block `block`.
    ScaledMatrixUnit {
        dims: Vec<usize>,
        #[serde(default)]
        block: usize,
        i: usize,
        j: usize,
        #[serde(default = "half")]
        rate: f64,
        #[serde(default)]
        space_seed: Option<u64>,
    },
    /// Explicit stages in the space/element file formats; the last stage repeats.
    Custom { stages: Vec<CustomStage>, bound: Option<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CustomStage {
    pub space: serde_json::Value,
    pub element: serde_json::Value,
}

impl FamilySpec {
    /// Builds a family from its name and a JSON object of parameters.
    pub fn from_name_and_params(name: &str, params: &serde_json::Value) -> Result<Self> {
        let mut obj = match params {
            serde_json::Value::Object(m) => m.clone(),
            serde_json::Value::Null => serde_json::Map::new(),
            _ => return Err(Error::BadParameter("params must be a JSON object".into())),
        };
        obj.insert("family".into(), serde_json::Value::String(name.into()));
        Self::from_json_value(&serde_json::Value::Object(obj))
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let name = v
            .get("family")
            .and_then(|f| f.as_str())
            .ok_or_else(|| Error::BadParameter("missing string field `family`".into()))?;
        if !FAMILY_NAMES.contains(&name) {
            return Err(Error::UnknownFamily(name.into()));
        }
        serde_json::from_value(v.clone()).map_err(|e| Error::BadParameter(format!("{name}: {e}")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::ConstantElement { .. } => "constant_element",
            FamilySpec::TensorPowerDiag { .. } => "tensor_power_diag",
            FamilySpec::Twisted { .. } => "twisted",
            FamilySpec::UnitaryTwist { .. } => "unitary_twist",
            FamilySpec::MatrixUnitPower { .. } => "matrix_unit_power",
            FamilySpec::RandomBounded { .. } => "random_bounded",
            FamilySpec::BlockScalars { .. } => "block_scalars",
            FamilySpec::ScaledMatrixUnit { .. } => "scaled_matrix_unit",
            FamilySpec::Custom { .. } => "custom",
        }
    }

    /// Compact JSON description.
    pub fn label(&self) -> String {
        match self {
            FamilySpec::Custom { stages, .. } => format!("custom({} stages)", stages.len()),
            _ => serde_json::to_string(self).expect("family serializes"),
        }
    }

    fn lambda(&self) -> Option<f64> {
        match *self {
            FamilySpec::ConstantElement { lambda, .. }
            | FamilySpec::TensorPowerDiag { lambda, .. }
            | FamilySpec::Twisted { lambda, .. }
            | FamilySpec::UnitaryTwist { lambda, .. }
            | FamilySpec::MatrixUnitPower { lambda, .. } => Some(lambda),
            _ => None,
        }
    }
}

/// One stage `(space_n, x_n)`. Tensor stages keep the factor and are only
/// expanded on request.
#[derive(Clone, Debug)]
pub enum Stage {
    Dense { space: WStarSpace, x: BlockMatrix },
    /// `scalar · factor^{⊗n}` on `factor_space^{⊗n}`.
    Tensor { factor_space: WStarSpace, factor: BlockMatrix, n: usize, scalar: Complex64 },
}

impl Stage {
    pub fn dim(&self) -> usize {
        match self {
            Stage::Dense { space, .. } => space.total_dim(),
            Stage::Tensor { factor_space, n, .. } => {
                factor_space.total_dim().checked_pow(*n as u32).unwrap_or(usize::MAX)
            }
        }
    }

    pub fn op_norm(&self) -> f64 {
        match self {
            Stage::Dense { x, .. } => x.op_norm(),
            Stage::Tensor { factor, n, scalar, .. } => scalar.norm() * factor.op_norm().powi(*n as i32),
        }
    }

    /// `‖x_n‖^#`; for tensor stages `φ(x*x)` and `φ(xx*)` factor over the product state.
    pub fn sharp_norm(&self) -> f64 {
        match self {
            Stage::Dense { space, x } => space.sharp_norm(x),
            Stage::Tensor { factor_space, factor, n, scalar } => {
                let l = factor_space.state(&(&factor.adjoint() * factor)).re.max(0.0);
                let r = factor_space.state(&(factor * &factor.adjoint())).re.max(0.0);
                let k = *n as i32;
                scalar.norm() * (0.5 * (l.powi(k) + r.powi(k))).sqrt()
            }
        }
    }

    pub fn state(&self) -> Complex64 {
        match self {
            Stage::Dense { space, x } => space.state(x),
            Stage::Tensor { factor_space, factor, n, scalar } => scalar * factor_space.state(factor).powi(*n as i32),
        }
    }

    /// Explicit `(space, x)`, refusing dimensions above `cap`.
    pub fn materialize(&self, cap: usize) -> Result<(WStarSpace, BlockMatrix)> {
        match self {
            Stage::Dense { space, x } => Ok((space.clone(), x.clone())),
            Stage::Tensor { factor_space, factor, n, scalar } => {
                let dim = self.dim();
                if dim > cap {
                    return Err(Error::DimensionCap { dim, cap });
                }
                let space = factor_space.tensor_power(*n)?;
                let mut x = factor.clone();
                for _ in 1..*n {
                    x = x.kron(factor)?;
                }
                Ok((space, x.scale(*scalar)))
            }
        }
    }

    /// Stagewise product `self · other`.
    pub fn mul(&self, other: &Stage, cap: usize) -> Result<Stage> {
        if let (
            Stage::Tensor { factor_space: s1, factor: f1, n: n1, scalar: c1 },
            Stage::Tensor { factor_space: s2, factor: f2, n: n2, scalar: c2 },
        ) = (self, other)
        {
            if n1 == n2 && s1.density().same_shape(s2.density()) && s1.density().max_abs_diff(s2.density()) == 0.0 {
                return Ok(Stage::Tensor { factor_space: s1.clone(), factor: f1 * f2, n: *n1, scalar: c1 * c2 });
            }
        }
        let (s1, x1) = self.materialize(cap)?;
        let (s2, x2) = other.materialize(cap)?;
        if !s1.density().same_shape(s2.density()) || s1.density().max_abs_diff(s2.density()) != 0.0 {
            return Err(Error::BadParameter("stage spaces of the two sequences differ".into()));
        }
        Ok(Stage::Dense { space: s1, x: &x1 * &x2 })
    }
}

/// A family together with its declared uniform norm bound.
#[derive(Clone, Debug)]
pub struct StageSequence {
    pub family: FamilySpec,
    pub uniform_bound: f64,
    pub dim_cap: usize,
    custom: Vec<(WStarSpace, BlockMatrix)>,
}

fn space_for(dims: &[usize], space_seed: Option<u64>, n: usize) -> Result<WStarSpace> {
    match space_seed {
        Some(s) => crate::algebra::random_faithful_space(dims, derive_seed(s, n as u64)),
        None => Ok(WStarSpace::tracial(dims)),
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::BadParameter(format!("block sizes must be positive, got {dims:?}")));
    }
    Ok(())
}

impl StageSequence {
    /// Validates the parameters. The uniform bound defaults to the family's
    /// own `bound` field where it has one and to the stage-1 operator norm
    /// otherwise, which is the supremum for geometric families with ratio at most 1.
    pub fn new(family: FamilySpec) -> Result<Self> {
        Self::with_bound(family, None)
    }

    pub fn with_bound(family: FamilySpec, bound: Option<f64>) -> Result<Self> {
        if let Some(lambda) = family.lambda() {
            PowersSpec::Lambda { lambda }.validate()?;
        }
        let mut custom = Vec::new();
        match &family {
            FamilySpec::MatrixUnitPower { i, j, .. } if *i > 1 || *j > 1 => {
                return Err(Error::BadParameter(format!("matrix unit index ({i}, {j}) outside M_2")));
            }
            FamilySpec::RandomBounded { dims, bound, .. } => {
                check_dims(dims)?;
                if !(*bound >= 0.0) {
                    return Err(Error::BadParameter(format!("bound must be nonnegative, got {bound}")));
                }
            }
            FamilySpec::BlockScalars { dims, values, .. } => {
                check_dims(dims)?;
                if values.len() != dims.len() {
                    return Err(Error::BadParameter(format!(
                        "{} values for {} blocks",
                        values.len(),
                        dims.len()
                    )));
                }
            }
            FamilySpec::ScaledMatrixUnit { dims, block, i, j, rate, .. } => {
                check_dims(dims)?;
                if *block >= dims.len() || *i >= dims[*block] || *j >= dims[*block] {
                    return Err(Error::BadParameter(format!("matrix unit ({block}; {i}, {j}) outside {dims:?}")));
                }
                if !(*rate > 0.0) {
                    return Err(Error::BadParameter(format!("rate must be positive, got {rate}")));
                }
            }
            FamilySpec::Custom { stages, .. } => {
                if stages.is_empty() {
                    return Err(Error::BadParameter("custom family needs at least one stage".into()));
                }
                for s in stages {
                    let space = space_from_json(&s.space.to_string())?;
                    let x = element_from_json(&s.element.to_string())?;
                    x.check_dims(&space.dims())?;
                    custom.push((space, x));
                }
            }
            _ => {}
        }
        let mut seq = StageSequence { family, uniform_bound: f64::INFINITY, dim_cap: DEFAULT_STAGE_CAP, custom };
        seq.uniform_bound = match (bound, &seq.family) {
            (Some(b), _) => b,
            (None, FamilySpec::Custom { bound: Some(b), .. }) => *b,
            (None, FamilySpec::RandomBounded { bound, .. }) => *bound,
            (None, _) => seq.raw_stage(1)?.op_norm(),
        };
        Ok(seq)
    }

    pub fn with_dim_cap(mut self, cap: usize) -> Self {
        self.dim_cap = cap;
        self
    }

    fn powers_factor(lambda: f64) -> WStarSpace {
        PowersSpec::Lambda { lambda }.space().expect("validated")
    }

    fn raw_stage(&self, n: usize) -> Result<Stage> {
        if n == 0 {
            return Err(Error::BadParameter("stages are numbered from 1".into()));
        }
        let tensor = |lambda: f64, factor: BlockMatrix, scalar: Complex64| Stage::Tensor {
            factor_space: Self::powers_factor(lambda),
            factor,
            n,
            scalar,
        };
        Ok(match &self.family {
            &FamilySpec::ConstantElement { value, lambda } => {
                tensor(lambda, BlockMatrix::identity(&[2]), Complex64::new(value, 0.0))
            }
            &FamilySpec::TensorPowerDiag { c, lambda } => {
                tensor(lambda, BlockMatrix::identity(&[2]).scale_real(c), ONE)
            }
            &FamilySpec::Twisted { c, t, lambda } => {
                let u = Self::powers_factor(lambda).complex_power(Complex64::new(0.0, t));
                tensor(lambda, u.scale_real(c), ONE)
            }
            &FamilySpec::UnitaryTwist { t, lambda } => {
                let u = Self::powers_factor(lambda).complex_power(Complex64::new(0.0, t));
                tensor(lambda, u, ONE)
            }
            &FamilySpec::MatrixUnitPower { i, j, c, lambda } => {
                let mut e = CMatrix::zeros(2, 2);
                e[(i, j)] = Complex64::new(c, 0.0);
                tensor(lambda, BlockMatrix::from_block(e), ONE)
            }
            FamilySpec::RandomBounded { dims, bound, seed, space_seed } => {
                let space = space_for(dims, *space_seed, n)?;
                let mut rng = rng_from_seed(derive_seed(*seed, n as u64));
                Stage::Dense { space, x: random_element(dims, &mut rng).scale_real(*bound) }
            }
            FamilySpec::BlockScalars { dims, values, space_seed } => {
                let space = space_for(dims, *space_seed, n)?;
                let v: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                Stage::Dense { space, x: BlockMatrix::block_scalars(dims, &v) }
            }
            FamilySpec::ScaledMatrixUnit { dims, block, i, j, rate, space_seed } => {
                let space = space_for(dims, *space_seed, n)?;
                let mut x = BlockMatrix::zeros(dims);
                x.blocks_mut()[*block][(*i, *j)] = Complex64::new(rate.powi(n as i32), 0.0);
                Stage::Dense { space, x }
            }
            FamilySpec::Custom { .. } => {
                let (space, x) = self.custom[(n - 1).min(self.custom.len() - 1)].clone();
                Stage::Dense { space, x }
            }
        })
    }

    /// Stage `n >= 1`, checked against the uniform bound up to relative rounding.
    pub fn stage(&self, n: usize) -> Result<Stage> {
        let s = self.raw_stage(n)?;
        let norm = s.op_norm();
        if !(norm <= self.uniform_bound * (1.0 + 1e-12)) {
            return Err(Error::BoundViolated { stage: n, norm, bound: self.uniform_bound });
        }
        Ok(s)
    }

    /// Ideal sequences on the same stage spaces: diagonal and twisted
    /// geometric families and scaled matrix units.
    pub fn default_probes(&self) -> Vec<StageSequence> {
        let families = match &self.family {
            f if f.lambda().is_some() => {
                let lambda = f.lambda().expect("checked");
                vec![
                    FamilySpec::TensorPowerDiag { c: 0.5, lambda },
                    FamilySpec::Twisted { c: 0.5, t: 1.0, lambda },
                    FamilySpec::MatrixUnitPower { i: 0, j: 1, c: 0.5, lambda },
                    FamilySpec::MatrixUnitPower { i: 1, j: 1, c: 0.5, lambda },
                ]
            }
            FamilySpec::RandomBounded { dims, space_seed, .. }
            | FamilySpec::BlockScalars { dims, space_seed, .. }
            | FamilySpec::ScaledMatrixUnit { dims, space_seed, .. } => {
                let mut out = Vec::new();
                for (block, &d) in dims.iter().enumerate() {
                    out.push(FamilySpec::ScaledMatrixUnit {
                        dims: dims.clone(),
                        block,
                        i: 0,
                        j: d - 1,
                        rate: 0.5,
                        space_seed: *space_seed,
                    });
                    out.push(FamilySpec::ScaledMatrixUnit {
                        dims: dims.clone(),
                        block,
                        i: d - 1,
                        j: 0,
                        rate: 0.5,
                        space_seed: *space_seed,
                    });
                }
                out
            }
            _ => Vec::new(),
        };
        families.into_iter().map(|f| StageSequence::new(f).expect("catalog parameters are valid")).collect()
    }
}
