//! Instances of a Fano problem: random ones, and ones forced to contain a
//! prescribed plane `ℓ` with a prescribed tangent direction `v`.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, FanoError, Result};
use crate::exact::{ExactMatrix, ExactVector, GaussianRational, Monomial, SparsePoly};
use crate::problem::FanoType;
use crate::system::{restrict_form, ChartPoint, FormSystem, TangentVector};

/// Linear conditions `matrix · c = rhs` on the coefficient vector `c` of `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub matrix: ExactMatrix,
    pub rhs: ExactVector,
}

impl ConstraintSystem {
    pub fn stack(&self, other: &ConstraintSystem) -> Result<ConstraintSystem> {
        let mut rhs = self.rhs.clone();
        rhs.extend(other.rhs.iter().cloned());
        Ok(ConstraintSystem { matrix: self.matrix.vstack(&other.matrix)?, rhs })
    }
}

/// Monomials indexing the coefficients of each form, descending graded-lex.
pub fn coefficient_layout(t: &FanoType) -> Vec<Vec<Monomial>> {
    let nv = t.n() as usize + 1;
    t.degrees().iter().map(|&d| Monomial::all_of_degree(nv, d)).collect()
}

/// Dimension of the coefficient space.
pub fn coefficient_dim(t: &FanoType) -> usize {
    coefficient_layout(t).iter().map(Vec::len).sum()
}

/// Flattens `F` into its coefficient vector.
pub fn coefficient_vector(f: &FormSystem) -> ExactVector {
    let layout = coefficient_layout(f.fano_type());
    f.forms()
        .iter()
        .zip(&layout)
        .flat_map(|(form, monos)| monos.iter().map(|m| form.coefficient_of(m).expect("same ring")))
        .collect()
}

/// Inverse of [`coefficient_vector`].
pub fn form_system_from_coefficients(t: &FanoType, c: &[GaussianRational]) -> Result<FormSystem> {
    check_dim(coefficient_dim(t), c.len())?;
    let nv = t.n() as usize + 1;
    let mut offset = 0;
    let mut forms = Vec::new();
    for monos in coefficient_layout(t) {
        let terms = monos.iter().cloned().zip(c[offset..offset + monos.len()].iter().cloned());
        forms.push(SparsePoly::from_terms(nv, terms)?);
        offset += monos.len();
    }
    FormSystem::new(t.clone(), forms)
}

/// A Gaussian rational with parts `p/q`, `p ∈ [−10, 10]`, `q ∈ [1, 10]`.
pub(crate) fn small_gaussian(rng: &mut impl Rng) -> GaussianRational {
    GaussianRational::from_parts(
        rng.gen_range(-10..=10),
        rng.gen_range(1..=10),
        rng.gen_range(-10..=10),
        rng.gen_range(1..=10),
    )
}

/// A random instance; identical seeds give identical systems.
pub fn random_form_system(t: &FanoType, seed: u64) -> Result<FormSystem> {
    t.require_fano()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let c: ExactVector = (0..coefficient_dim(t)).map(|_| small_gaussian(&mut rng)).collect();
        let f = form_system_from_coefficients(t, &c)?;
        if f.forms().iter().all(|p| !p.is_zero()) {
            return Ok(f);
        }
    }
}

/// Origin of the chart: the plane spanned by the last `r+1` basis vectors.
pub fn default_plane(t: &FanoType) -> ChartPoint {
    vec![GaussianRational::zero(); t.grassmannian_dim()]
}

/// The rank-two direction with chart entries `(0,0)` and `(1,1)` set to 1.
///
/// Rank one (a single basis vector) makes the forged zero degenerate, and
/// so does full rank once `r ≥ 2`: in both cases the Jacobian kernel at
/// `x_ℓ` is more than one-dimensional.
pub fn default_tangent(t: &FanoType) -> TangentVector {
    let cols = t.r() as usize + 1;
    let mut v = vec![GaussianRational::zero(); t.grassmannian_dim()];
    v[0] = GaussianRational::from_int(1);
    v[cols + 1] = GaussianRational::from_int(1);
    v
}

/// Rows of `G_F(ℓ + εv)` as linear functionals of `F`, split by order in ε.
fn restricted_rows(t: &FanoType, ell: &[GaussianRational], v: &[GaussianRational], order: u32) -> Result<ConstraintSystem> {
    check_dim(t.grassmannian_dim(), ell.len())?;
    check_dim(t.grassmannian_dim(), v.len())?;
    let chart: Vec<SparsePoly> = ell
        .iter()
        .zip(v)
        .map(|(a, b)| {
            let mut p = SparsePoly::constant(1, a.clone());
            p.add_term(Monomial(vec![1]), b.clone());
            p
        })
        .collect();
    let eps = Monomial(vec![order]);
    let layout = coefficient_layout(t);
    let cols = coefficient_dim(t);
    let rows = t.equation_count() as usize;
    let mut m = ExactMatrix::zeros(rows, cols);
    let (mut row0, mut col0) = (0, 0);
    let nv = t.n() as usize + 1;
    for monos in &layout {
        let mut len = 0;
        for (c, mono) in monos.iter().enumerate() {
            let f = SparsePoly::from_terms(nv, [(mono.clone(), GaussianRational::from_int(1))])?;
            let coeffs = restrict_form(&f, t.r(), &chart)?;
            len = coeffs.len();
            for (b, p) in coeffs.iter().enumerate() {
                m.set(row0 + b, col0 + c, p.coefficient_of(&eps)?);
            }
        }
        row0 += len;
        col0 += monos.len();
    }
    Ok(ConstraintSystem { matrix: m, rhs: vec![GaussianRational::zero(); rows] })
}

/// Conditions equivalent to `G_F(x_ℓ) = 0`.
pub fn containment_constraints(t: &FanoType, ell: &[GaussianRational]) -> Result<ConstraintSystem> {
    let zero = vec![GaussianRational::zero(); t.grassmannian_dim()];
    restricted_rows(t, ell, &zero, 0)
}

/// Conditions equivalent to `DG_F(x_ℓ)·v = 0`.
pub fn tangency_constraints(t: &FanoType, ell: &[GaussianRational], v: &[GaussianRational]) -> Result<ConstraintSystem> {
    if v.iter().all(Zero::is_zero) {
        return Err(FanoError::ZeroTangent);
    }
    restricted_rows(t, ell, v, 1)
}

/// A random instance containing `ℓ` with `v` tangent to its Fano scheme:
/// a random combination of a kernel basis of the stacked constraints.
pub fn constrained_form_system(t: &FanoType, ell: &[GaussianRational], v: &[GaussianRational], seed: u64) -> Result<FormSystem> {
    t.require_fano()?;
    let cons = containment_constraints(t, ell)?.stack(&tangency_constraints(t, ell, v)?)?;
    let basis = cons.matrix.kernel_basis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let mut c = vec![GaussianRational::zero(); coefficient_dim(t)];
        for b in &basis {
            let w = small_gaussian(&mut rng);
            for (ci, bi) in c.iter_mut().zip(b) {
                if !bi.is_zero() {
                    *ci += &(bi * &w);
                }
            }
        }
        let f = form_system_from_coefficients(t, &c)?;
        if f.forms().iter().all(|p| !p.is_zero()) {
            return Ok(f);
        }
    }
    Err(FanoError::Numerical(format!("constraints for {t} force a vanishing form")))
}

/// A random invertible change of coordinates on `ℂ^{n+1}` with small entries.
pub fn random_coordinate_change(n: u32, seed: u64) -> ExactMatrix {
    let nv = n as usize + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut a = ExactMatrix::identity(nv);
        for i in 0..nv {
            for j in 0..nv {
                let e = GaussianRational::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=4));
                a.set(i, j, &e + a.get(i, j));
            }
        }
        if a.rank() == nv {
            return a;
        }
    }
}
