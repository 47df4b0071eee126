//! Named example channels bundled with every certificate that can be built for them.

use std::fmt;
use std::str::FromStr;

use super::{commuting_kraus_factorization, lift_rational_mixture};
use crate::certificates::{MatrixFactorizationCert, MixtureTerm, RationalMixtureCert};
use crate::channels::{clock_power, dephasing, depolarizing, weyl_mixture, QuantumChannel};
use crate::free_group::FreeGroupWitness;
use crate::linalg::{ComplexMatrix, Rational};
use crate::{Error, Limits, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZooName {
    /// `x ↦ Σ E_ii x E_ii` on `M_d`.
    Dephasing(usize),
    /// `S_k`.
    Depolarizing(usize),
    /// Dephasing on `M_2` with Kraus operators `E_11, E_22`.
    M2Example,
}

impl ZooName {
    pub const LISTING: [&'static str; 3] = ["dephasing-<d>", "depolarizing-<k>", "paper-m2-example"];
}

impl fmt::Display for ZooName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZooName::Dephasing(d) => write!(f, "dephasing-{d}"),
            ZooName::Depolarizing(k) => write!(f, "depolarizing-{k}"),
            ZooName::M2Example => f.write_str("paper-m2-example"),
        }
    }
}

fn parameter(s: &str, family: &str) -> Option<Option<usize>> {
    let rest = s.strip_prefix(family)?;
    let arg = rest
        .strip_prefix('-')
        .or_else(|| rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')))?;
    Some(arg.parse().ok().filter(|&v| v >= 1))
}

impl FromStr for ZooName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownName(s.to_string());
        if s == "paper-m2-example" {
            return Ok(ZooName::M2Example);
        }
        if let Some(d) = parameter(s, "dephasing") {
            return d.map(ZooName::Dephasing).ok_or_else(unknown);
        }
        if let Some(k) = parameter(s, "depolarizing") {
            return k.map(ZooName::Depolarizing).ok_or_else(unknown);
        }
        Err(unknown())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZooEntry {
    pub name: ZooName,
    pub channel: QuantumChannel,
    pub mixture: RationalMixtureCert,
    pub lift: MatrixFactorizationCert,
    pub spin: Option<MatrixFactorizationCert>,
    pub witness: Option<FreeGroupWitness>,
}

fn diagonal_entry(name: ZooName, d: usize, tol: f64, limits: &Limits) -> Result<ZooEntry> {
    limits.check_dim(d)?;
    let channel = dephasing(d)?;
    let c = Rational::new(1, d as i128)?;
    let terms = (0..d)
        .map(|j| MixtureTerm {
            coefficient: c,
            unitary: clock_power(d, j),
        })
        .collect();
    let mixture = RationalMixtureCert::new(d, 1, terms)?;
    let lift = lift_rational_mixture(&mixture, tol, limits)?;
    let units: Vec<ComplexMatrix> = (0..d).map(|i| ComplexMatrix::unit(d, i, i)).collect();
    let spin = commuting_kraus_factorization(&units, tol, limits)?;
    Ok(ZooEntry {
        name,
        channel,
        mixture,
        lift,
        spin: Some(spin),
        witness: Some(FreeGroupWitness::diagonal(d)?),
    })
}

/// Builds the channel and its certificates; each certificate is verified on the way.
pub fn zoo(name: ZooName, tol: f64, limits: &Limits) -> Result<ZooEntry> {
    match name {
        ZooName::M2Example => diagonal_entry(name, 2, tol, limits),
        ZooName::Dephasing(d) => diagonal_entry(name, d, tol, limits),
        ZooName::Depolarizing(k) => {
            limits.check_dim(k.checked_mul(k).ok_or(Error::Overflow)?)?;
            let channel = depolarizing(k)?;
            let (cs, us) = weyl_mixture(k)?;
            let terms = cs
                .into_iter()
                .zip(us)
                .map(|(coefficient, unitary)| MixtureTerm { coefficient, unitary })
                .collect();
            let mixture = RationalMixtureCert::new(k, 1, terms)?;
            let lift = lift_rational_mixture(&mixture, tol, limits)?;
            Ok(ZooEntry {
                name,
                channel,
                mixture,
                lift,
                spin: None,
                witness: None,
            })
        }
    }
}
