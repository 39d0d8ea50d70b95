use super::spec::{CouplingKind, Frame, ModeKind, QuadraticForm, SystemSpec};
use crate::error::{Error, Result};
use crate::fock::{embed, ladder_lower, number_op, BasisDescriptor, OperatorMatrix};
use crate::C64;

fn lower_on(basis: &BasisDescriptor, label: &str) -> Result<OperatorMatrix> {
    embed(&ladder_lower(basis.dim_of(label)?)?, basis, label)
}

fn number_on(basis: &BasisDescriptor, label: &str) -> Result<OperatorMatrix> {
    embed(&number_op(basis.dim_of(label)?)?, basis, label)
}

/// `x^dag y + x y^dag` for two lowering operators.
fn exchange(x: &OperatorMatrix, y: &OperatorMatrix) -> Result<OperatorMatrix> {
    x.adjoint().matmul(y)?.add(&x.matmul(&y.adjoint())?)
}

/// `-g a^dag a (2 b^dag b + 1)`: the quadratic coupling after dropping the
/// `b^2` and `b^dag^2` terms. Its `-g a^dag a` part is the static shift that
/// turns the detuning into `omega_c - omega_d - g`. Assumes
/// `omega_membrane >> g`; that regime is not checked.
pub fn rwa_quadratic_term(
    g: f64,
    cavity: &str,
    membrane: &str,
    basis: &BasisDescriptor,
) -> Result<OperatorMatrix> {
    let na = number_on(basis, cavity)?;
    let nb = number_on(basis, membrane)?;
    let id = OperatorMatrix::identity(basis.clone());
    let two_nb_plus_one = nb.lincomb(C64::new(2.0, 0.0), &id, C64::new(1.0, 0.0))?;
    na.matmul(&two_nb_plus_one)?.scale_real(-g).into_hermitian()
}

/// `-g a^dag a (b + b^dag)^2` including the counter-rotating terms.
pub fn full_quadratic_term(
    g: f64,
    cavity: &str,
    membrane: &str,
    basis: &BasisDescriptor,
) -> Result<OperatorMatrix> {
    let na = number_on(basis, cavity)?;
    let b = lower_on(basis, membrane)?;
    let x = b.add(&b.adjoint())?;
    na.matmul(&x.matmul(&x)?)?.scale_real(-g).into_hermitian()
}

/// Time-independent Hamiltonian of a [`SystemSpec`].
///
/// Free terms `omega n`, quadratic optomechanical couplings in the form the
/// spec selects, phonon tunneling and photon hopping. In the
/// rotating-at-drive frame every optical frequency becomes
/// `omega - omega_d` and the drive adds `eps (a^dag + a)`. A drive in the lab
/// frame would make the Hamiltonian time dependent and is rejected.
pub fn build_full_hamiltonian(spec: &SystemSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    if spec.frame == Frame::Lab && spec.drive.is_some() {
        return Err(Error::Unsupported(
            "a lab-frame drive is time dependent; use the rotating-at-drive frame".into(),
        ));
    }
    let basis = spec.basis()?;
    let omega_d = match spec.frame {
        Frame::RotatingAtDrive => spec.drive.as_ref().map(|d| d.frequency).unwrap_or(0.0),
        Frame::Lab => 0.0,
    };

    let mut h = OperatorMatrix::zeros(basis.clone());
    for m in &spec.modes {
        let freq = match m.kind {
            ModeKind::Optical => m.frequency - omega_d,
            ModeKind::Mechanical => m.frequency,
        };
        if freq != 0.0 {
            h = h.add(&number_on(&basis, &m.label)?.scale_real(freq))?;
        }
    }

    for c in &spec.couplings {
        let [p, q] = &c.endpoints;
        let term = match c.kind {
            CouplingKind::QuadraticOptomech => match spec.quadratic_form {
                QuadraticForm::Rwa => rwa_quadratic_term(c.strength, p, q, &basis)?,
                QuadraticForm::Full => full_quadratic_term(c.strength, p, q, &basis)?,
            },
            CouplingKind::PhononTunnel | CouplingKind::PhotonHop => {
                exchange(&lower_on(&basis, p)?, &lower_on(&basis, q)?)?.scale_real(c.strength)
            }
        };
        h = h.add(&term)?;
    }

    if let (Frame::RotatingAtDrive, Some(d)) = (spec.frame, &spec.drive) {
        let a = lower_on(&basis, &d.target)?;
        h = h.add(&a.add(&a.adjoint())?.scale_real(d.amplitude))?;
    }
    h.into_hermitian()
}
