//! Report bundle: `report.json` (certificate + summaries) and `curves.csv`
//! (one row per curve, including cloud words).
//!
//! Every numeric is stored as a decimal string tagged with the mantissa
//! width it was computed at; nothing rounds through binary64. Writers are
//! deterministic: identical inputs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{contains, Containment, Functional, HullCertificate, SimplexPoint, Verdict};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed report: {0}")]
    Malformed(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportScalar {
    pub dec: String,
    pub precision_bits: usize,
}

impl ReportScalar {
    pub fn of(s: &Scalar) -> Self {
        ReportScalar { dec: s.to_decimal(), precision_bits: s.precision() }
    }

    pub fn to_scalar(&self) -> Result<Scalar, ReportError> {
        let prec = self.precision_bits.max(crate::scalar::MIN_PRECISION);
        Scalar::from_decimal(&self.dec, prec)
            .map_err(|e| ReportError::Malformed(format!("bad decimal {}: {e}", self.dec)))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexReport {
    pub curve_id: String,
    pub bary: Vec<ReportScalar>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FacetReport {
    pub v0: usize,
    pub v1: usize,
    pub coeffs: Vec<ReportScalar>,
    pub azimuthal: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HullReport {
    pub verdict: String,
    pub vertices: Vec<VertexReport>,
    pub facets: Vec<FacetReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CloudSummary {
    pub total_words: usize,
    pub distinct_points: usize,
    pub nonhyperbolic: usize,
    pub dedup_dropped: usize,
    pub containment_tolerance: ReportScalar,
    pub violations: usize,
    pub max_outside_margin: Option<ReportScalar>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlackRow {
    pub depth: usize,
    pub sides: Vec<ReportScalar>,
    pub slack: ReportScalar,
    pub predicted: ReportScalar,
    pub ratio: ReportScalar,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AngleLawRow {
    pub slope: String,
    pub exterior_angle: ReportScalar,
    pub predicted: ReportScalar,
    pub ratio: ReportScalar,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdjustmentReport {
    pub multipliers: Vec<ReportScalar>,
    pub evaluations: usize,
    pub margin: ReportScalar,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecordRow {
    pub word: String,
    pub ratio: ReportScalar,
}

/// One row of `curves.csv`.
#[derive(Clone, Debug)]
pub struct CurveRow {
    pub curve_id: String,
    pub kind: &'static str,
    pub lengths: Vec<Scalar>,
    pub bary: Vec<Scalar>,
    pub is_vertex: bool,
    pub exterior_angle: Option<Scalar>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportBundle {
    pub scenario: String,
    pub config: Vec<(String, String)>,
    pub input_hash: String,
    pub precision_bits: usize,
    pub cloud_precision_bits: usize,
    pub hull: HullReport,
    pub curve_count: usize,
    pub cloud: CloudSummary,
    pub witness: Option<String>,
    pub slack_regression: Option<Vec<SlackRow>>,
    pub angle_law: Option<Vec<AngleLawRow>>,
    pub adjustment: Option<AdjustmentReport>,
    pub record_breakers: Option<Vec<RecordRow>>,
    pub lift_multiplicities: Option<Vec<(String, u32)>>,
    pub caveats: Vec<String>,
}

impl ReportBundle {
    pub fn verdict(&self) -> Verdict {
        if self.hull.verdict == "certified" {
            Verdict::Certified
        } else {
            Verdict::Partial
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<ReportBundle, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Rebuilds the hull certificate (functionals recomputed from the stored
    /// vertex cycle) for containment rechecks.
    pub fn hull_certificate(&self) -> Result<HullCertificate, ReportError> {
        let vertices: Vec<SimplexPoint> = self
            .hull
            .vertices
            .iter()
            .map(|v| {
                let bary = v.bary.iter().map(|b| b.to_scalar()).collect::<Result<Vec<_>, _>>()?;
                Ok(SimplexPoint { bary })
            })
            .collect::<Result<Vec<_>, ReportError>>()?;
        if vertices.len() < 3 {
            return Err(ReportError::Malformed("hull has fewer than 3 vertices".into()));
        }
        let prec = vertices.iter().map(|v| v.precision()).max().unwrap();
        let mut centroid = vec![Scalar::zero(prec); 3];
        for v in &vertices {
            for k in 0..3 {
                centroid[k] = &centroid[k] + &v.bary[k];
            }
        }
        let n = vertices.len();
        let mut facets = Vec::with_capacity(n);
        for i in 0..n {
            let u = &vertices[i].bary;
            let w = &vertices[(i + 1) % n].bary;
            let mut c = vec![
                &(&u[1] * &w[2]) - &(&u[2] * &w[1]),
                &(&u[2] * &w[0]) - &(&u[0] * &w[2]),
                &(&u[0] * &w[1]) - &(&u[1] * &w[0]),
            ];
            let mut at = Scalar::zero(prec);
            for k in 0..3 {
                at = &at + &(&c[k] * &centroid[k]);
            }
            if at.is_negative() {
                for ck in &mut c {
                    *ck = -&*ck;
                }
            }
            let functional = Functional::new(c)
                .ok_or_else(|| ReportError::Malformed("degenerate facet".into()))?;
            let azimuthal = crate::cone::azimuthal(&functional);
            facets.push(crate::cone::Facet { v0: i, v1: (i + 1) % n, functional, azimuthal });
        }
        let sources = (0..n).collect();
        let verdict = self.verdict();
        Ok(HullCertificate { vertices, sources, facets, verdict })
    }
}

/// Writes `curves.csv`: curve_id, kind, len1..3 and bary1..3 as full
/// precision decimals, is_vertex, exterior_angle.
pub fn write_csv(rows: &[CurveRow]) -> String {
    let mut out = String::new();
    out.push_str("curve_id,kind,len1,len2,len3,bary1,bary2,bary3,is_vertex,exterior_angle\n");
    for r in rows {
        let _ = write!(out, "{},{}", r.curve_id, r.kind);
        for l in &r.lengths {
            let _ = write!(out, ",{}", l.to_decimal());
        }
        for b in &r.bary {
            let _ = write!(out, ",{}", b.to_decimal());
        }
        let _ = write!(out, ",{}", r.is_vertex);
        match &r.exterior_angle {
            Some(a) => {
                let _ = writeln!(out, ",{}", a.to_decimal());
            }
            None => {
                let _ = writeln!(out, ",");
            }
        }
    }
    out
}

/// A parsed csv row: id, kind, barycentric coordinates.
pub struct CsvPoint {
    pub curve_id: String,
    pub kind: String,
    pub bary: Vec<Scalar>,
}

/// Reads back the barycentric columns of `curves.csv` at 256 bits
/// (sufficient for the 1e-12 containment tolerance).
pub fn read_csv_points(text: &str) -> Result<Vec<CsvPoint>, ReportError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 9 {
            return Err(ReportError::Malformed(format!("csv line {} has {} columns", i + 1, cols.len())));
        }
        let mut bary = Vec::with_capacity(3);
        for c in &cols[5..8] {
            bary.push(
                Scalar::from_decimal(c, 256)
                    .map_err(|e| ReportError::Malformed(format!("csv line {}: {e}", i + 1)))?,
            );
        }
        out.push(CsvPoint { curve_id: cols[0].into(), kind: cols[1].into(), bary });
    }
    Ok(out)
}

pub struct VerifyOutcome {
    pub checked: usize,
    pub violations: usize,
    pub max_outside_margin: Option<Scalar>,
}

/// Containment-only recheck of stored points against the stored hull.
pub fn verify_containment(
    bundle: &ReportBundle,
    points: &[CsvPoint],
    tol: &Scalar,
) -> Result<VerifyOutcome, ReportError> {
    let hull = bundle.hull_certificate()?;
    let mut violations = 0usize;
    let mut max_margin: Option<Scalar> = None;
    for p in points {
        let sp = SimplexPoint { bary: p.bary.clone() };
        match contains(&hull, &sp, tol)
            .map_err(|e| ReportError::Malformed(format!("containment: {e}")))?
        {
            Containment::Inside | Containment::Boundary => {}
            Containment::Outside { margin } => {
                violations += 1;
                if max_margin.as_ref().map_or(true, |m| margin > *m) {
                    max_margin = Some(margin);
                }
            }
        }
    }
    Ok(VerifyOutcome { checked: points.len(), violations, max_outside_margin: max_margin })
}

/// SHA-256 of the input bytes, as lowercase hex.
pub fn content_hash(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        let _ = write!(s, "{b:02x}");
    }
    s
}

pub fn write_bundle(dir: &Path, bundle: &ReportBundle, rows: &[CurveRow], svg: &str) -> Result<(), ReportError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), bundle.to_json())?;
    std::fs::write(dir.join("curves.csv"), write_csv(rows))?;
    std::fs::write(dir.join("cone.svg"), svg)?;
    Ok(())
}
