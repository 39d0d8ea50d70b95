use super::spec::{ModeKind, SystemSpec};
use crate::error::Result;
use crate::fock::{embed, ladder_lower, BasisDescriptor, OperatorMatrix};

/// A jump operator with the rate multiplying its dissipator
/// `D[o] rho = o rho o^dag - {o^dag o, rho} / 2`.
#[derive(Clone, Debug)]
pub struct CollapseOp {
    pub op: OperatorMatrix,
    pub rate: f64,
}

/// Channels of one mode: `(a, kappa)` for optical modes, `(b, gamma (n_th + 1))`
/// and `(b^dag, gamma n_th)` for mechanical ones. Zero-rate channels are
/// omitted.
pub fn mode_collapse_ops(
    basis: &BasisDescriptor,
    label: &str,
    kind: ModeKind,
    damping: f64,
    n_th: f64,
) -> Result<Vec<CollapseOp>> {
    let mut out = Vec::new();
    if damping == 0.0 {
        return Ok(out);
    }
    let b = embed(&ladder_lower(basis.dim_of(label)?)?, basis, label)?;
    match kind {
        ModeKind::Optical => out.push(CollapseOp { op: b, rate: damping }),
        ModeKind::Mechanical => {
            if n_th > 0.0 {
                out.push(CollapseOp { op: b.adjoint(), rate: damping * n_th });
            }
            out.insert(0, CollapseOp { op: b, rate: damping * (n_th + 1.0) });
        }
    }
    Ok(out)
}

pub fn build_collapse_ops(spec: &SystemSpec) -> Result<Vec<CollapseOp>> {
    spec.validate()?;
    let basis = spec.basis()?;
    let mut out = Vec::new();
    for m in &spec.modes {
        out.extend(mode_collapse_ops(&basis, &m.label, m.kind, m.damping, m.n_th)?);
    }
    Ok(out)
}
