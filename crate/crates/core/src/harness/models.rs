//! Model sources: built-in toy Hamiltonians and interaction files.

use std::fmt;
use std::path::PathBuf;

use nalgebra::DMatrix;
use rand::Rng;

use super::HarnessError;
use crate::shadow::stream_rng;
use crate::shell_model::{
    build_hamiltonian, enumerate_basis, parse_interaction, InteractionData, ReducedHamiltonian,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToyModel {
    /// 16 physical states on 4 qubits. `|0000⟩` lies in a three-dimensional
    /// invariant subspace that also holds the ground state, so three
    /// evolved states span it exactly.
    He6Like,
    /// Two neutrons in `p3/2` and `p1/2` with a pairing force, `Jz = 0`:
    /// five determinants on 3 qubits.
    Pairing,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSource {
    Toy(ToyModel),
    File(PathBuf),
}

impl ModelSource {
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s.trim() {
            "toy:he6like" => Ok(Self::Toy(ToyModel::He6Like)),
            "toy:pairing" => Ok(Self::Toy(ToyModel::Pairing)),
            other => match other.strip_prefix("file:") {
                Some(path) if !path.trim().is_empty() => Ok(Self::File(PathBuf::from(path.trim()))),
                _ => Err(HarnessError::Config(format!(
                    "unknown model `{other}` (expected toy:he6like, toy:pairing or file:<path>)"
                ))),
            },
        }
    }
}

impl fmt::Display for ModelSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Toy(ToyModel::He6Like) => write!(f, "toy:he6like"),
            Self::Toy(ToyModel::Pairing) => write!(f, "toy:pairing"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Particle content for file-based models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Nucleons {
    pub protons: usize,
    pub neutrons: usize,
    pub twice_jz: Option<i32>,
}

const HE6LIKE_SEED: u64 = 0x5EED_0006;

/// Energies (MeV) of the block that contains `|0000⟩`; the first is the
/// ground state.
const HE6LIKE_LOW_BLOCK: [f64; 3] = [-30.0, -27.3, -23.1];

pub fn he6like_matrix() -> DMatrix<f64> {
    let d = 16;
    let mut rng = stream_rng(HE6LIKE_SEED);
    let mut g = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    g.column_mut(0).fill(0.0);
    g[(0, 0)] = 1.0;
    let q = g.qr().q();
    let y = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0))
        .qr()
        .q();
    let mut vectors = q.clone();
    let low = q.columns(0, 3) * &y;
    vectors.columns_mut(0, 3).copy_from(&low);
    let mut energies = HE6LIKE_LOW_BLOCK.to_vec();
    energies.extend((3..d).map(|_| rng.gen_range(-27.0..-6.0)));
    let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(energies));
    let h = &vectors * lambda * vectors.transpose();
    (&h + h.transpose()) * 0.5
}

pub const PAIRING_INTERACTION: &str = "\
# two-level pairing model, neutrons only
SHELL p3/2 3 - -1
SHELL p1/2 1 - -1
SPE p3/2 0.0
SPE p1/2 2.0
TBME p3/2 p3/2 p3/2 p3/2 0 2 -2.0
TBME p3/2 p3/2 p1/2 p1/2 0 2 -1.4142135623730951
TBME p1/2 p1/2 p1/2 p1/2 0 2 -1.0
TBME p3/2 p1/2 p3/2 p1/2 2 2 -0.5
TBME p3/2 p3/2 p3/2 p3/2 2 2 -0.6
";

pub fn pairing_hamiltonian() -> Result<ReducedHamiltonian, HarnessError> {
    let data = parse_interaction(PAIRING_INTERACTION)?;
    let basis = enumerate_basis(&data, 0, 2, Some(0))?;
    Ok(build_hamiltonian(&data, &basis)?)
}

pub fn toy_hamiltonian(model: ToyModel) -> Result<ReducedHamiltonian, HarnessError> {
    match model {
        ToyModel::He6Like => Ok(ReducedHamiltonian::from_physical(
            &he6like_matrix(),
            Vec::new(),
        )?),
        ToyModel::Pairing => pairing_hamiltonian(),
    }
}

pub fn load_hamiltonian(
    source: &ModelSource,
    nucleons: Option<Nucleons>,
) -> Result<ReducedHamiltonian, HarnessError> {
    match source {
        ModelSource::Toy(t) => toy_hamiltonian(*t),
        ModelSource::File(path) => {
            let nucleons = nucleons.ok_or_else(|| {
                HarnessError::Config("file models need `protons` and `neutrons`".into())
            })?;
            let data = InteractionData::from_file(path).map_err(|e| match e {
                crate::shell_model::ShellModelError::Io(io) => HarnessError::Config(format!(
                    "cannot read interaction file {}: {io}",
                    path.display()
                )),
                other => other.into(),
            })?;
            let basis = enumerate_basis(
                &data,
                nucleons.protons,
                nucleons.neutrons,
                nucleons.twice_jz,
            )?;
            Ok(build_hamiltonian(&data, &basis)?)
        }
    }
}
