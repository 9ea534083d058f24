//! Square polynomial systems cutting out the Fano scheme in the standard
//! affine chart of the Grassmannian.
//!
//! A chart point is the row-major top `(n−r)×(r+1)` block of a plane matrix
//! whose bottom `(r+1)×(r+1)` block is the identity.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, FanoError, Result};
use crate::exact::{ExactMatrix, ExactVector, GaussianRational, Monomial, SparsePoly};
use crate::problem::FanoType;

/// Local coordinates of a plane: the top block of its plane matrix.
pub type ChartPoint = ExactVector;
/// A tangent direction in chart coordinates.
pub type TangentVector = ExactVector;

/// A point of the coefficient space: one form of degree `dᵢ` per entry of d•.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormSystem {
    fano_type: FanoType,
    forms: Vec<SparsePoly>,
}

impl FormSystem {
    pub fn new(fano_type: FanoType, forms: Vec<SparsePoly>) -> Result<Self> {
        check_dim(fano_type.s(), forms.len())?;
        let nv = fano_type.n() as usize + 1;
        for (f, &d) in forms.iter().zip(fano_type.degrees()) {
            check_dim(nv, f.num_vars())?;
            if !f.is_homogeneous_of(d) {
                return Err(FanoError::NotHomogeneous(d));
            }
        }
        Ok(Self { fano_type, forms })
    }

    pub fn fano_type(&self) -> &FanoType {
        &self.fano_type
    }

    pub fn forms(&self) -> &[SparsePoly] {
        &self.forms
    }

    /// `F(A·x)`: the forms after the linear change of coordinates `x ↦ A·x`.
    pub fn transform(&self, a: &ExactMatrix) -> Result<FormSystem> {
        let nv = self.fano_type.n() as usize + 1;
        check_dim(nv, a.rows())?;
        check_dim(nv, a.cols())?;
        let images: Vec<SparsePoly> = (0..nv).map(|i| SparsePoly::linear(a.row(i))).collect();
        let forms = self
            .forms
            .iter()
            .map(|f| f.substitute_linear(&images))
            .collect::<Result<Vec<_>>>()?;
        FormSystem::new(self.fano_type.clone(), forms)
    }

    /// Coefficient-wise sum, used to check that `G` depends linearly on `F`.
    pub fn add(&self, other: &FormSystem) -> Result<FormSystem> {
        if self.fano_type != other.fano_type {
            return Err(FanoError::InvalidType("adding systems of different types".into()));
        }
        let forms = self
            .forms
            .iter()
            .zip(&other.forms)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        FormSystem::new(self.fano_type.clone(), forms)
    }
}

/// `(n+1)×(r+1)` matrix whose columns span the plane with chart coordinates `x`.
pub fn plane_matrix(r: u32, n: u32, x: &[GaussianRational]) -> Result<ExactMatrix> {
    let k = r as usize + 1;
    let top = (n - r) as usize;
    check_dim(top * k, x.len())?;
    let mut m = ExactMatrix::zeros(n as usize + 1, k);
    for i in 0..top {
        for j in 0..k {
            m.set(i, j, x[i * k + j].clone());
        }
    }
    for j in 0..k {
        m.set(top + j, j, GaussianRational::from_int(1));
    }
    Ok(m)
}

/// Chart coordinates as the variables of a polynomial ring.
pub fn symbolic_chart(r: u32, n: u32) -> Vec<SparsePoly> {
    let m = ((r + 1) * (n - r)) as usize;
    (0..m).map(|i| SparsePoly::var(m, i)).collect()
}

/// Restriction of `f` to the plane with (possibly symbolic) chart entries
/// `chart`, all living in one ring. Returns the `C(d+r, r)` coefficients of
/// the restricted form, listed by parameter monomial in descending graded-lex
/// order (`s_0^d` first).
pub fn restrict_form(f: &SparsePoly, r: u32, chart: &[SparsePoly]) -> Result<Vec<SparsePoly>> {
    let k = r as usize + 1;
    let nv = f.num_vars();
    if nv < k || (nv - k) * k != chart.len() {
        return Err(FanoError::Dimension { expected: (nv.saturating_sub(k)) * k, found: chart.len() });
    }
    let d = f.degree().unwrap_or(0);
    if !f.is_homogeneous_of(d) {
        return Err(FanoError::NotHomogeneous(d));
    }
    let ring = chart.first().map(SparsePoly::num_vars).unwrap_or(0);
    for c in chart {
        check_dim(ring, c.num_vars())?;
    }
    let total = ring + k;
    let param = |j: usize| SparsePoly::var(total, ring + j);
    let mut images = Vec::with_capacity(nv);
    for i in 0..nv - k {
        let mut img = SparsePoly::zero(total);
        for j in 0..k {
            img = img.add(&chart[i * k + j].with_trailing_vars(k).mul(&param(j))?)?;
        }
        images.push(img);
    }
    images.extend((0..k).map(param));
    let restricted = f.substitute_linear(&images)?;
    let mut by_param = restricted.split_trailing(k);
    Ok(Monomial::all_of_degree(k, d)
        .into_iter()
        .map(|m| by_param.remove(&m).unwrap_or_else(|| SparsePoly::zero(ring)))
        .collect())
}

/// Numeric restriction at an exact chart point.
pub fn restrict_form_at(f: &SparsePoly, r: u32, x: &[GaussianRational]) -> Result<ExactVector> {
    let chart: Vec<SparsePoly> = x.iter().map(|c| SparsePoly::constant(0, c.clone())).collect();
    Ok(restrict_form(f, r, &chart)?
        .into_iter()
        .map(|p| p.coefficient_of(&Monomial(vec![])).expect("constant ring"))
        .collect())
}

/// The square system `G` in the chart, with lazily built derivatives.
#[derive(Debug)]
pub struct SquareSystem {
    num_vars: usize,
    polys: Vec<SparsePoly>,
    source: Option<FormSystem>,
    jacobian: OnceLock<Vec<Vec<SparsePoly>>>,
}

impl Clone for SquareSystem {
    fn clone(&self) -> Self {
        Self {
            num_vars: self.num_vars,
            polys: self.polys.clone(),
            source: self.source.clone(),
            jacobian: OnceLock::new(),
        }
    }
}

impl PartialEq for SquareSystem {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && self.polys == other.polys && self.source == other.source
    }
}

impl SquareSystem {
    /// A square system not tied to any form system.
    pub fn new(polys: Vec<SparsePoly>) -> Result<Self> {
        let n = polys.len();
        for p in &polys {
            check_dim(n, p.num_vars())?;
        }
        Ok(Self { num_vars: n, polys, source: None, jacobian: OnceLock::new() })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn polys(&self) -> &[SparsePoly] {
        &self.polys
    }

    pub fn source(&self) -> Option<&FormSystem> {
        self.source.as_ref()
    }

    /// Total degree of each equation (0 for a vanishing equation).
    pub fn degrees(&self) -> Vec<u32> {
        self.polys.iter().map(|p| p.degree().unwrap_or(0)).collect()
    }

    pub fn eval(&self, x: &[GaussianRational]) -> Result<ExactVector> {
        check_dim(self.num_vars, x.len())?;
        self.polys.iter().map(|p| p.eval(x)).collect()
    }

    /// Partial derivatives `∂g_i/∂x_j`, built once.
    pub fn jacobian_polys(&self) -> &[Vec<SparsePoly>] {
        self.jacobian.get_or_init(|| {
            self.polys
                .iter()
                .map(|p| (0..self.num_vars).map(|j| p.derivative(j)).collect())
                .collect()
        })
    }

    pub fn jacobian_at(&self, x: &[GaussianRational]) -> Result<ExactMatrix> {
        check_dim(self.num_vars, x.len())?;
        let rows = self
            .jacobian_polys()
            .iter()
            .map(|row| row.iter().map(|p| p.eval(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            return Ok(ExactMatrix::zeros(0, 0));
        }
        ExactMatrix::from_rows(rows)
    }

    /// `(vᵀ H_i(x) v)_i`, read off as twice the `ε²` coefficient of `g_i(x + εv)`.
    pub fn hessian_quadratic(&self, x: &[GaussianRational], v: &[GaussianRational]) -> Result<ExactVector> {
        check_dim(self.num_vars, x.len())?;
        check_dim(self.num_vars, v.len())?;
        let images: Vec<SparsePoly> = x
            .iter()
            .zip(v)
            .map(|(a, b)| {
                let mut p = SparsePoly::constant(1, a.clone());
                p.add_term(Monomial(vec![1]), b.clone());
                p
            })
            .collect();
        let two = GaussianRational::from_int(2);
        self.polys
            .iter()
            .map(|g| Ok(&g.substitute_linear(&images)?.coefficient_of(&Monomial(vec![2]))? * &two))
            .collect()
    }
}

/// Concatenation of the restricted-form coefficients of every form of `F`.
pub fn build_square_system(f: &FormSystem) -> Result<SquareSystem> {
    let t = f.fano_type();
    t.require_fano()?;
    let chart = symbolic_chart(t.r(), t.n());
    let mut polys = Vec::with_capacity(t.grassmannian_dim());
    for form in f.forms() {
        polys.extend(restrict_form(form, t.r(), &chart)?);
    }
    let mut g = SquareSystem::new(polys)?;
    g.source = Some(f.clone());
    Ok(g)
}

#[derive(Serialize, Deserialize)]
struct RawForms {
    fano_type: FanoType,
    forms: Vec<String>,
}

impl Serialize for FormSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawForms {
            fano_type: self.fano_type.clone(),
            forms: self.forms.iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawForms::deserialize(d)?;
        let nv = raw.fano_type.n() as usize + 1;
        let forms = raw
            .forms
            .iter()
            .map(|f| SparsePoly::parse(f, nv))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        FormSystem::new(raw.fano_type, forms).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RawSquare {
    num_vars: usize,
    equations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<FormSystem>,
}

impl Serialize for SquareSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawSquare {
            num_vars: self.num_vars,
            equations: self.polys.iter().map(ToString::to_string).collect(),
            source: self.source.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SquareSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSquare::deserialize(d)?;
        let polys = raw
            .equations
            .iter()
            .map(|p| SparsePoly::parse(p, raw.num_vars))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        let mut g = SquareSystem::new(polys).map_err(serde::de::Error::custom)?;
        g.source = raw.source;
        Ok(g)
    }
}
