//! File formats, unitary sources and parameter scans behind the `absep`
//! command-line tool.

pub mod io;
pub mod scan;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use absep_core::unitaries::{example_unitary, haar_random, ExampleUnitary, GlobalUnitary};
use anyhow::{anyhow, bail, Result};

/// Default phases of the two-qutrit example unitary.
pub const U4_DEFAULT_PHASES: (f64, f64) = (PI / 18.0, 5.0 * PI / 6.0);

/// Where a command takes its global unitary from.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitarySource {
    Example(ExampleUnitary),
    Identity,
    Search,
    Haar(u64),
    File(PathBuf),
}

impl FromStr for UnitarySource {
    type Err = anyhow::Error;

    /// `paper:U1`..`paper:U4[:phi1,phi2]` (or `example:`), `identity`,
    /// `search`, `haar:SEED`, `file:PATH`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "identity" {
            return Ok(UnitarySource::Identity);
        }
        if s == "search" {
            return Ok(UnitarySource::Search);
        }
        if let Some(seed) = s.strip_prefix("haar:") {
            return Ok(UnitarySource::Haar(seed.parse()?));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(UnitarySource::File(PathBuf::from(path)));
        }
        let name = s
            .strip_prefix("paper:")
            .or_else(|| s.strip_prefix("example:"))
            .ok_or_else(|| anyhow!("unknown unitary source `{s}`"))?;
        let (id, args) = name.split_once(':').unwrap_or((name, ""));
        let u = match (id.to_ascii_uppercase().as_str(), args) {
            ("U1", "") => ExampleUnitary::U1,
            ("U2", "") => ExampleUnitary::U2,
            ("U3", "") => ExampleUnitary::U3,
            ("U4", "") => ExampleUnitary::U4 { phi1: U4_DEFAULT_PHASES.0, phi2: U4_DEFAULT_PHASES.1 },
            ("U4", phases) => {
                let (a, b) = phases.split_once(',').ok_or_else(|| anyhow!("expected U4:phi1,phi2"))?;
                ExampleUnitary::U4 { phi1: a.trim().parse()?, phi2: b.trim().parse()? }
            }
            _ => bail!("unknown example unitary `{name}`"),
        };
        Ok(UnitarySource::Example(u))
    }
}

impl UnitarySource {
    /// The fixed unitary on `C^dim`, or `None` for `search`.
    pub fn resolve(&self, dim: usize) -> Result<Option<GlobalUnitary>> {
        let u = match self {
            UnitarySource::Search => return Ok(None),
            UnitarySource::Identity => GlobalUnitary::identity(dim),
            UnitarySource::Haar(seed) => haar_random(dim, *seed).with_label(format!("haar:{seed}")),
            UnitarySource::Example(id) => example_unitary(*id)?,
            UnitarySource::File(path) => io::read_unitary(path)?,
        };
        if u.dim() != dim {
            bail!("unitary `{}` acts on dimension {}, the state on {}", u.label(), u.dim(), dim);
        }
        Ok(Some(u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sources() {
        assert_eq!("paper:U1".parse::<UnitarySource>().unwrap(), UnitarySource::Example(ExampleUnitary::U1));
        assert_eq!("example:u3".parse::<UnitarySource>().unwrap(), UnitarySource::Example(ExampleUnitary::U3));
        assert_eq!(
            "paper:U4:0.5,1".parse::<UnitarySource>().unwrap(),
            UnitarySource::Example(ExampleUnitary::U4 { phi1: 0.5, phi2: 1.0 })
        );
        assert_eq!("haar:7".parse::<UnitarySource>().unwrap(), UnitarySource::Haar(7));
        assert!("paper:U9".parse::<UnitarySource>().is_err());
        assert!("bogus".parse::<UnitarySource>().is_err());
    }

    #[test]
    fn dimension_is_checked() {
        assert!(UnitarySource::Example(ExampleUnitary::U1).resolve(8).is_err());
        assert!(UnitarySource::Search.resolve(8).unwrap().is_none());
    }
}
