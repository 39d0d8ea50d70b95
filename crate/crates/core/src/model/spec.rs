use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::BasisDescriptor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeKind {
    Optical,
    Mechanical,
}

/// One bosonic mode. `damping` is kappa for optical modes and gamma for
/// mechanical ones; `n_th` is the bath occupancy (always 0 for optical).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub label: String,
    pub kind: ModeKind,
    pub frequency: f64,
    #[serde(default)]
    pub damping: f64,
    #[serde(default)]
    pub n_th: f64,
    pub dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    /// `-g a^dag a (b + b^dag)^2`
    QuadraticOptomech,
    /// `V (b^dag b' + b b'^dag)`
    PhononTunnel,
    /// `J (a^dag a' + a a'^dag)`
    PhotonHop,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub kind: CouplingKind,
    pub strength: f64,
    /// For quadratic couplings: `[optical, mechanical]`.
    pub endpoints: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub amplitude: f64,
    pub frequency: f64,
    pub target: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    #[default]
    Lab,
    RotatingAtDrive,
}

/// Which form of the quadratic optomechanical term to build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadraticForm {
    /// `(b + b^dag)^2` with its `b^2` and `b^dag^2` parts.
    Full,
    /// `b b^dag + b^dag b = 2 b^dag b + 1`.
    #[default]
    Rwa,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// Name of the frequency every rate is measured in (documentation only).
    #[serde(default)]
    pub reference_frequency_label: String,
    pub modes: Vec<ModeSpec>,
    #[serde(default)]
    pub couplings: Vec<CouplingSpec>,
    #[serde(default)]
    pub drive: Option<DriveSpec>,
    #[serde(default)]
    pub frame: Frame,
    #[serde(default)]
    pub quadratic_form: QuadraticForm,
}

impl SystemSpec {
    pub fn mode(&self, label: &str) -> Result<&ModeSpec> {
        self.modes
            .iter()
            .find(|m| m.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn basis(&self) -> Result<BasisDescriptor> {
        BasisDescriptor::new(self.modes.iter().map(|m| (m.label.clone(), m.dim)))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.modes.is_empty() {
            return bad("no modes".into());
        }
        for m in &self.modes {
            let finite = [m.frequency, m.damping, m.n_th].iter().all(|v| v.is_finite());
            if !finite || m.frequency < 0.0 || m.damping < 0.0 || m.n_th < 0.0 {
                return bad(format!("mode `{}` needs finite frequency, damping, n_th >= 0", m.label));
            }
            if m.kind == ModeKind::Optical && m.n_th != 0.0 {
                return bad(format!("optical mode `{}` cannot have a thermal bath", m.label));
            }
        }
        // labels and dims
        self.basis()?;

        for c in &self.couplings {
            if !c.strength.is_finite() {
                return bad(format!("coupling {:?} has non-finite strength", c.kind));
            }
            let [p, q] = &c.endpoints;
            if p == q {
                return bad(format!("coupling endpoints must differ (`{p}`)"));
            }
            let (kp, kq) = (self.mode(p)?.kind, self.mode(q)?.kind);
            let ok = match c.kind {
                CouplingKind::QuadraticOptomech => kp == ModeKind::Optical && kq == ModeKind::Mechanical,
                CouplingKind::PhononTunnel => kp == ModeKind::Mechanical && kq == ModeKind::Mechanical,
                CouplingKind::PhotonHop => kp == ModeKind::Optical && kq == ModeKind::Optical,
            };
            if !ok {
                return bad(format!("{:?} cannot connect `{p}` ({kp:?}) and `{q}` ({kq:?})", c.kind));
            }
        }

        let hops: Vec<&CouplingSpec> = self
            .couplings
            .iter()
            .filter(|c| c.kind == CouplingKind::PhotonHop)
            .collect();
        if hops.len() > 1 {
            let hub_of = |h: &CouplingSpec| h.endpoints.clone();
            let first = hub_of(hops[0]);
            let hub = first.iter().find(|l| hops.iter().all(|h| h.endpoints.contains(l)));
            if hub.is_none() {
                return bad("photon hopping must form a star around one cavity".into());
            }
        }

        if let Some(d) = &self.drive {
            if !(d.amplitude >= 0.0) || !d.frequency.is_finite() {
                return bad("drive amplitude must be >= 0 and frequency finite".into());
            }
            if self.mode(&d.target)?.kind != ModeKind::Optical {
                return bad(format!("drive target `{}` is not optical", d.target));
            }
        }
        if self.frame == Frame::RotatingAtDrive && self.drive.is_none() {
            return bad("rotating-at-drive frame requires a drive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn device() -> SystemSpec {
        SystemSpec {
            reference_frequency_label: "omega_m1".into(),
            modes: vec![
                ModeSpec { label: "a".into(), kind: ModeKind::Optical, frequency: 2.0, damping: 0.1, n_th: 0.0, dim: 2 },
                ModeSpec { label: "b1".into(), kind: ModeKind::Mechanical, frequency: 1.0, damping: 0.01, n_th: 1.0, dim: 3 },
                ModeSpec { label: "b2".into(), kind: ModeKind::Mechanical, frequency: 0.05, damping: 0.001, n_th: 0.0, dim: 3 },
            ],
            couplings: vec![
                CouplingSpec { kind: CouplingKind::QuadraticOptomech, strength: 0.01, endpoints: ["a".into(), "b1".into()] },
                CouplingSpec { kind: CouplingKind::PhononTunnel, strength: 0.02, endpoints: ["b1".into(), "b2".into()] },
            ],
            drive: None,
            frame: Frame::Lab,
            quadratic_form: QuadraticForm::Rwa,
        }
    }

    #[test]
    fn valid_device() {
        device().validate().unwrap();
    }

    #[test]
    fn rejects_wrong_endpoint_kinds() {
        let mut s = device();
        s.couplings[0].endpoints = ["b1".into(), "a".into()];
        assert!(s.validate().is_err());
        let mut s = device();
        s.couplings[1].endpoints = ["b1".into(), "nope".into()];
        assert!(matches!(s.validate(), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn rejects_rotating_frame_without_drive() {
        let mut s = device();
        s.frame = Frame::RotatingAtDrive;
        assert!(s.validate().is_err());
    }

    #[test]
    fn rejects_non_star_hops() {
        let mut s = device();
        for (i, l) in ["c1", "c2", "c3", "c4"].iter().enumerate() {
            s.modes.push(ModeSpec {
                label: l.to_string(),
                kind: ModeKind::Optical,
                frequency: 1.0 + i as f64,
                damping: 0.0,
                n_th: 0.0,
                dim: 2,
            });
        }
        let hop = |p: &str, q: &str| CouplingSpec {
            kind: CouplingKind::PhotonHop,
            strength: 0.1,
            endpoints: [p.into(), q.into()],
        };
        s.couplings.push(hop("c1", "c2"));
        s.couplings.push(hop("c1", "c3"));
        s.validate().unwrap();
        s.couplings.push(hop("c3", "c4"));
        assert!(s.validate().is_err());
    }
}
