use crate::error::{Error, Result};
use crate::fem::{Mesh, NodalField};

/// L² norm and gradient seminorm of `coarse - fine` for nested 1D meshes,
/// computed exactly in the fine space.
pub fn nested_error(coarse: &NodalField, fine: &NodalField) -> Result<(f64, f64)> {
    let (Mesh::D1(c), Mesh::D1(f)) = (coarse.mesh, fine.mesh) else {
        return Err(Error::ParameterDomain(
            "nested errors are implemented for 1D meshes".into(),
        ));
    };
    let (nc, nf) = (c.interior() + 1, f.interior() + 1);
    if nf % nc != 0 {
        return Err(Error::ParameterDomain(format!(
            "mesh with {nc} elements is not nested in one with {nf}"
        )));
    }
    let d: Vec<f64> = (1..nf)
        .map(|k| coarse.value_at(&[f.node(k)]) - fine.values[k - 1])
        .collect();
    let diff = NodalField::new(fine.mesh, d)?;
    Ok((diff.l2_norm_sq().sqrt(), diff.h1_seminorm_sq().sqrt()))
}
