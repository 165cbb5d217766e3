//! One-parameter scans of the two-qutrit example families, with bisected
//! onsets of `det H_2 < 0` and of a negative partial transpose.

use absep_core::detection::{moments, thm1_test, HankelOutcome};
use absep_core::linalg::eigvals_hermitian;
use absep_core::maps::PositiveMapSpec;
use absep_core::states::{example_state, DensityMatrix, ExampleState};
use absep_core::unitaries::{example_unitary, ExampleUnitary, GlobalUnitary};
use anyhow::Result;
use serde::Serialize;

/// Scanned state family; the unitary is fixed per family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanFamily {
    /// Two-qutrit isotropic states under `U3`.
    Isotropic3,
    /// Noisy bound-entangled family under `U4(phi1, phi2)`.
    Rho4 { b: f64, phi1: f64, phi2: f64 },
}

impl ScanFamily {
    pub fn rho4_default() -> Self {
        let (phi1, phi2) = crate::U4_DEFAULT_PHASES;
        ScanFamily::Rho4 { b: 1.5, phi1, phi2 }
    }

    pub fn state(&self, p: f64) -> Result<DensityMatrix> {
        Ok(match *self {
            ScanFamily::Isotropic3 => example_state(ExampleState::Rho3 { p })?,
            ScanFamily::Rho4 { b, .. } => example_state(ExampleState::Rho4 { p, b })?,
        })
    }

    pub fn unitary(&self) -> Result<GlobalUnitary> {
        Ok(match *self {
            ScanFamily::Isotropic3 => example_unitary(ExampleUnitary::U3)?,
            ScanFamily::Rho4 { phi1, phi2, .. } => example_unitary(ExampleUnitary::U4 { phi1, phi2 })?,
        })
    }

    /// Verdict label of a violated row. The transpose is decomposable, so a
    /// violation on the noisy bound-entangled family is read as "not
    /// absolutely PPT".
    fn refuted_label(&self) -> &'static str {
        match self {
            ScanFamily::Isotropic3 => "NotAbsolutelySeparable",
            ScanFamily::Rho4 { .. } => "NotAbsolutelyPPT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub p: f64,
    pub thm1_margin: f64,
    #[serde(rename = "detH1")]
    pub det_h1: f64,
    #[serde(rename = "detH2")]
    pub det_h2: f64,
    pub verdict: String,
}

pub fn scan_row(family: &ScanFamily, u: &GlobalUnitary, p: f64) -> Result<ScanRow> {
    let state = family.state(p)?;
    let s = PositiveMapSpec::transpose(3).normalized_output(&state, u)?;
    let m = moments(&s, 5);
    let thm1 = thm1_test(&m)?;
    let h1 = HankelOutcome::from_moments(1, &m)?;
    let h2 = HankelOutcome::from_moments(2, &m)?;
    let violated = thm1.violated || h1.violated || h2.violated;
    Ok(ScanRow {
        p,
        thm1_margin: thm1.margin,
        det_h1: h1.determinant,
        det_h2: h2.determinant,
        verdict: if violated { family.refuted_label() } else { "Inconclusive" }.to_string(),
    })
}

/// Smallest eigenvalue of the partial transpose of `U ρ(p) U†`.
pub fn rotated_pt_min_eigenvalue(family: &ScanFamily, u: &GlobalUnitary, p: f64) -> Result<f64> {
    let rotated = family.state(p)?.conjugated(u.matrix())?;
    let pt = PositiveMapSpec::transpose(3).apply_one_sided(&rotated)?;
    let ev = eigvals_hermitian(&pt.hermitian_part())?;
    Ok(ev[ev.len() - 1])
}

/// First `p` in `[lo, hi]` where `pred` turns true: a `points`-point scan
/// finds the first true grid point, then bisection narrows the bracket to
/// `tol`. `None` when `pred` is false on the whole grid; the left end is
/// returned when it is already true there.
pub fn first_onset(
    mut pred: impl FnMut(f64) -> Result<bool>,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> Result<Option<f64>> {
    let n = points.max(2) - 1;
    let at = |i: usize| lo + (hi - lo) * i as f64 / n as f64;
    let mut first = None;
    for i in 0..=n {
        if pred(at(i))? {
            first = Some(i);
            break;
        }
    }
    let Some(i) = first else { return Ok(None) };
    if i == 0 {
        return Ok(Some(lo));
    }
    let (mut a, mut b) = (at(i - 1), at(i));
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if pred(mid)? {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// Slack on sign tests that only absorbs rounding, e.g. `det H_2 = 0` of the
/// maximally mixed end point.
pub const SIGN_SLACK: f64 = 1e-15;

/// Onset of a negative `det H_2(S_T)` (sign change, not the 1e-9 verdict
/// slack used per row).
pub fn det_h2_onset(family: &ScanFamily, tol: f64) -> Result<Option<f64>> {
    let u = family.unitary()?;
    first_onset(|p| Ok(scan_row(family, &u, p)?.det_h2 < -SIGN_SLACK), 0.0, 1.0, 101, tol)
}

/// Onset of a negative eigenvalue in the partial transpose of `U ρ(p) U†`.
pub fn npt_onset(family: &ScanFamily, tol: f64) -> Result<Option<f64>> {
    let u = family.unitary()?;
    first_onset(|p| Ok(rotated_pt_min_eigenvalue(family, &u, p)? < -SIGN_SLACK), 0.0, 1.0, 101, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub rows: Vec<ScanRow>,
    /// `(name, onset)` pairs written as `# threshold` lines.
    pub thresholds: Vec<(String, Option<f64>)>,
}

pub fn run_scan(family: &ScanFamily, points: usize, tol: f64) -> Result<ScanOutput> {
    let u = family.unitary()?;
    let n = points.max(2) - 1;
    let rows = (0..=n).map(|i| scan_row(family, &u, i as f64 / n as f64)).collect::<Result<Vec<_>>>()?;
    let mut thresholds = vec![("detH2".to_string(), det_h2_onset(family, tol)?)];
    if matches!(family, ScanFamily::Rho4 { .. }) {
        thresholds.push(("npt".to_string(), npt_onset(family, tol)?));
    }
    Ok(ScanOutput { rows, thresholds })
}

/// CSV with header `p,thm1_margin,detH1,detH2,verdict`, followed by one
/// `# threshold NAME VALUE` line per onset (`none` if not reached).
pub fn to_csv(scan: &ScanOutput) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &scan.rows {
        w.serialize(row)?;
    }
    let mut text = String::from_utf8(w.into_inner()?)?;
    for (name, value) in &scan.thresholds {
        match value {
            Some(v) => text.push_str(&format!("# threshold {name} {v}\n")),
            None => text.push_str(&format!("# threshold {name} none\n")),
        }
    }
    Ok(text)
}
