//! Scenario orchestration: builds the representation, assembles simple-curve
//! multi-lengths, computes and certifies the hull, runs the word-cloud
//! containment check, and emits the report bundle.
//!
//! Working precision escalates from the configured floor to
//! max(configured, ⌈3·Λmax/ln 2⌉ + 64), where Λmax is the largest curve
//! length the scenario produces: slacks and exterior angles scale like
//! e^(−2Λ) and must stay above the arithmetic noise floor. Word clouds are
//! evaluated at a fixed 320 bits, which leaves ~80 decimal digits of
//! headroom over the 1e-12 containment tolerance.

use thiserror::Error;

use crate::cone::{
    self, certify, contains, convex_hull, default_collinearity_tol, hull_vertex_angles,
    projectivize, Containment, HullCertificate, MultiLength, Verdict,
};
use crate::config::{eval_scalar, ConfigError, ScenarioConfig, ScenarioKind};
use crate::fricke::{
    self, farey_enumerate, mutation_slacks, parse_mutation_path, peripheral_length,
    realize_traces_unchecked, slope_word, Slope, TorusRep, TraceTriple, TriangleSides,
};
use crate::polygons::{
    build_chain_polygon, multiplicative_adjust, CurveLabel, EmbeddedPolygon, PolygonError,
};
use crate::report::{
    content_hash, AdjustmentReport, AngleLawRow, CloudSummary, CurveRow, FacetReport, HullReport,
    RecordRow, ReportBundle, ReportScalar, SlackRow, VertexReport,
};
use crate::scalar::Scalar;
use crate::wordgen::{
    enumerate_words, jordan_cloud, nonconjugacy_witness, record_breaker_scan, CloudOutcome,
    GeneratorImages, Word, WordKind, WordgenError,
};

/// Precision used for brute-force cloud evaluation.
pub const CLOUD_PRECISION: usize = 320;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("trace engine error: {0}")]
    Fricke(#[from] fricke::FrickeError),
    #[error("polygon error: {0}")]
    Polygon(#[from] PolygonError),
    #[error("cone error: {0}")]
    Cone(#[from] cone::ConeError),
    #[error("word engine error: {0}")]
    Wordgen(#[from] WordgenError),
    #[error("{0}")]
    Other(String),
}

/// A named simple-curve class with its multi-length.
struct SimpleCurve {
    id: String,
    kind: &'static str,
    ml: MultiLength,
    multiplicity: Option<u32>,
}

pub struct ScenarioResult {
    pub bundle: ReportBundle,
    pub rows: Vec<CurveRow>,
    /// Cloud points in barycentric f64 for rendering.
    pub cloud_bary: Vec<[f64; 3]>,
}

/// Precision needed so that slacks ~ e^(−2Λ) stay above the noise floor.
fn escalated_precision(base: usize, lambda_max: &Scalar) -> usize {
    let bits = 3.0 * lambda_max.to_f64() * std::f64::consts::LOG2_E;
    base.max(bits.ceil() as usize + 64)
}

pub fn run_scenario(cfg: &ScenarioConfig, config_text: &str) -> Result<ScenarioResult, ScenarioError> {
    match cfg.scenario {
        ScenarioKind::Pants => run_pants(cfg, config_text),
        ScenarioKind::Hexagon => run_polygon_family(cfg, config_text),
        ScenarioKind::Ngon => run_polygon_family(cfg, config_text),
        ScenarioKind::Fish => run_fish(cfg, config_text),
        ScenarioKind::Custom => run_custom(cfg, config_text),
    }
}

// ---------------------------------------------------------------------------
// shared assembly
// ---------------------------------------------------------------------------

struct HullAssembly {
    hull: HullCertificate,
    rows: Vec<CurveRow>,
}

/// Projects the curves, builds and certifies the hull, and classifies every
/// curve (vertex flag + exterior angle).
fn assemble_hull(
    curves: &[SimpleCurve],
    collinearity_tol: &Scalar,
) -> Result<HullAssembly, ScenarioError> {
    let points: Vec<cone::SimplexPoint> = curves
        .iter()
        .map(|c| projectivize(&c.ml))
        .collect::<Result<Vec<_>, _>>()?;
    let hull = certify(convex_hull(&points, collinearity_tol)?);
    let angles = hull_vertex_angles(&hull);
    let mut rows = Vec::with_capacity(curves.len());
    for (i, c) in curves.iter().enumerate() {
        let vertex_pos = hull.sources.iter().position(|&s| s == i);
        let (is_vertex, exterior_angle) = match vertex_pos {
            Some(k) => (true, angles.get(k).cloned()),
            None => (false, None),
        };
        rows.push(CurveRow {
            curve_id: c.id.clone(),
            kind: c.kind,
            lengths: c.ml.coords.clone(),
            bary: points[i].bary.clone(),
            is_vertex,
            exterior_angle,
        });
    }
    Ok(HullAssembly { hull, rows })
}

fn hull_report(curves: &[SimpleCurve], hull: &HullCertificate) -> HullReport {
    let verdict = match hull.verdict {
        Verdict::Certified => "certified",
        Verdict::Partial => "partial",
    };
    let vertices = hull
        .vertices
        .iter()
        .zip(&hull.sources)
        .map(|(v, &src)| VertexReport {
            curve_id: curves[src].id.clone(),
            bary: v.bary.iter().map(ReportScalar::of).collect(),
        })
        .collect();
    let facets = hull
        .facets
        .iter()
        .map(|f| FacetReport {
            v0: f.v0,
            v1: f.v1,
            coeffs: f.functional.c.iter().map(ReportScalar::of).collect(),
            azimuthal: f.azimuthal,
        })
        .collect();
    HullReport { verdict: verdict.into(), vertices, facets }
}

struct CloudCheck {
    summary: CloudSummary,
    rows: Vec<CurveRow>,
    bary: Vec<[f64; 3]>,
    outcome: CloudOutcome,
}

/// Evaluates the word cloud and checks every point against the hull at the
/// barycentric tolerance 1e-12.
fn run_cloud(
    images: &GeneratorImages,
    kind: WordKind,
    generator_count: usize,
    max_len: usize,
    hull: &HullCertificate,
) -> Result<CloudCheck, ScenarioError> {
    let words = enumerate_words(kind, generator_count, max_len);
    let outcome = jordan_cloud(images, &words);
    let tol = Scalar::from_decimal("1e-12", 256).expect("literal");
    let mut violations = 0usize;
    let mut max_margin: Option<Scalar> = None;
    let mut rows = Vec::with_capacity(outcome.points.len());
    let mut bary = Vec::with_capacity(outcome.points.len());
    for p in &outcome.points {
        if hull.vertices.len() >= 3 {
            match contains(hull, &p.sp, &tol)? {
                Containment::Inside | Containment::Boundary => {}
                Containment::Outside { margin } => {
                    violations += 1;
                    if max_margin.as_ref().map_or(true, |m| margin > *m) {
                        max_margin = Some(margin);
                    }
                }
            }
        }
        rows.push(CurveRow {
            curve_id: p.word.spell(),
            kind: "word",
            lengths: p.ml.coords.clone(),
            bary: p.sp.bary.clone(),
            is_vertex: false,
            exterior_angle: None,
        });
        let mut b = [0.0f64; 3];
        for k in 0..3 {
            b[k] = p.sp.bary[k].to_f64();
        }
        bary.push(b);
    }
    let summary = CloudSummary {
        total_words: words.len(),
        distinct_points: outcome.points.len(),
        nonhyperbolic: outcome.nonhyperbolic.len(),
        dedup_dropped: outcome.dedup_dropped,
        containment_tolerance: ReportScalar::of(&tol),
        violations,
        max_outside_margin: max_margin.as_ref().map(ReportScalar::of),
    };
    Ok(CloudCheck { summary, rows, bary, outcome })
}

/// Top record-breaker ratios against the first azimuthal facet functional.
fn record_diagnostic(cloud: &CloudCheck, hull: &HullCertificate) -> Option<Vec<RecordRow>> {
    let facet = hull.facets.iter().find(|f| f.azimuthal)?;
    let scan = record_breaker_scan(&cloud.outcome.points, &facet.functional).ok()?;
    Some(
        scan.records
            .into_iter()
            .take(10)
            .map(|(w, r)| RecordRow { word: w.spell(), ratio: ReportScalar::of(&r) })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// pants
// ---------------------------------------------------------------------------

fn vector_param(cfg: &ScenarioConfig, key: &str, prec: usize, default: [u64; 3]) -> Result<[Scalar; 3], ScenarioError> {
    let full = format!("{}.{key}", cfg.scenario.name());
    match cfg.raw.get(&full) {
        None => Ok(default.map(|v| Scalar::from_u64(v, prec))),
        Some(text) => {
            let parts: Vec<&str> = text.split(',').collect();
            if parts.len() != 3 {
                return Err(ScenarioError::Config(ConfigError::Invalid {
                    key: full,
                    reason: "expected three comma-separated values".into(),
                }));
            }
            let mut out = Vec::with_capacity(3);
            for p in parts {
                let v = eval_scalar(p, prec)?;
                if !v.is_positive() {
                    return Err(ScenarioError::Config(ConfigError::NonPositive(full)));
                }
                out.push(v);
            }
            Ok([out[0].clone(), out[1].clone(), out[2].clone()])
        }
    }
}

/// Holonomy generators of a hyperbolic pair of pants with boundary lengths
/// (la, lb, lab): traces (2cosh(la/2), 2cosh(lb/2), −2cosh(lab/2)).
fn pants_generators(la: &Scalar, lb: &Scalar, lab: &Scalar) -> (crate::hyp2::Isometry, crate::hyp2::Isometry) {
    let prec = la.precision();
    let two = Scalar::from_u64(2, prec);
    let ta = &two * &(la / &two).cosh();
    let tb = &two * &(lb / &two).cosh();
    let tab = -&(&two * &(lab / &two).cosh());
    realize_traces_unchecked(&ta, &tb, &tab)
}

fn run_pants(cfg: &ScenarioConfig, config_text: &str) -> Result<ScenarioResult, ScenarioError> {
    let prec = cfg.precision_bits;
    let va = vector_param(cfg, "va", prec, [2, 2, 1])?;
    let vb = vector_param(cfg, "vb", prec, [1, 2, 2])?;
    let vab = vector_param(cfg, "vab", prec, [2, 1, 2])?;
    let curves = vec![
        SimpleCurve { id: "a".into(), kind: "peripheral", ml: MultiLength::new(va.to_vec())?, multiplicity: None },
        SimpleCurve { id: "b".into(), kind: "peripheral", ml: MultiLength::new(vb.to_vec())?, multiplicity: None },
        SimpleCurve { id: "ab".into(), kind: "peripheral", ml: MultiLength::new(vab.to_vec())?, multiplicity: None },
    ];
    let assembly = assemble_hull(&curves, &default_collinearity_tol(prec))?;
    // matrices at cloud precision
    let images = GeneratorImages {
        components: (0..3)
            .map(|i| {
                let cp = |v: &Scalar| v.with_precision(CLOUD_PRECISION);
                let (ma, mb) = pants_generators(&cp(&va[i]), &cp(&vb[i]), &cp(&vab[i]));
                vec![ma.clone(), ma.inverse(), mb.clone(), mb.inverse()]
            })
            .collect(),
    };
    let cloud = run_cloud(&images, WordKind::FreeRank2, 2, cfg.word_max_len, &assembly.hull)?;
    let witness = nonconjugacy_witness(
        &images,
        WordKind::FreeRank2,
        6,
        &Scalar::from_decimal("1e-9", 256).expect("literal"),
    )
    .ok()
    .map(|w| w.spell());
    let records = record_diagnostic(&cloud, &assembly.hull);
    let bundle = ReportBundle {
        scenario: "pants".into(),
        config: cfg.raw.echo(),
        input_hash: content_hash(config_text.as_bytes()),
        precision_bits: prec,
        cloud_precision_bits: CLOUD_PRECISION,
        hull: hull_report(&curves, &assembly.hull),
        curve_count: curves.len(),
        cloud: cloud.summary,
        witness,
        slack_regression: None,
        angle_law: None,
        adjustment: None,
        record_breakers: records,
        lift_multiplicities: None,
        caveats: standard_caveats(),
    };
    let mut rows = assembly.rows;
    rows.extend(cloud.rows);
    Ok(ScenarioResult { bundle, rows, cloud_bary: cloud.bary })
}

fn standard_caveats() -> Vec<String> {
    vec![
        "pairwise nonconjugacy of components is witnessed by length spectra, not proved".into(),
        "discreteness of trace-coordinate representations is validated, not certified".into(),
    ]
}

// ---------------------------------------------------------------------------
// hexagon / n-gon
// ---------------------------------------------------------------------------

/// Multi-lengths of all edge and chord classes for three shifted polygons.
fn polygon_classes(
    polys: &[EmbeddedPolygon; 3],
) -> Result<Vec<SimpleCurve>, ScenarioError> {
    let systems: Vec<Vec<(CurveLabel, Scalar)>> = polys
        .iter()
        .map(|p| p.labelled_length_system())
        .collect::<Result<Vec<_>, _>>()?;
    let chords0 = polys[0].enumerate_chords()?;
    let n = polys[0].side_count();
    let mut out = Vec::with_capacity(systems[0].len());
    for (idx, (label, _)) in systems[0].iter().enumerate() {
        let coords: Vec<Scalar> = systems.iter().map(|s| s[idx].1.clone()).collect();
        let multiplicity = match label {
            CurveLabel::Edge(_) => Some(2),
            CurveLabel::Chord(i, j) => {
                // parity class is shift-invariant
                let d = (j - i) % 2;
                let _ = &chords0;
                Some(if d == 0 { 2 } else { 4 })
            }
        };
        let kind = match label {
            CurveLabel::Edge(_) => "edge",
            CurveLabel::Chord(_, _) => "chord",
        };
        let _ = n;
        out.push(SimpleCurve { id: label.to_string(), kind, ml: MultiLength::new(coords)?, multiplicity });
    }
    Ok(out)
}

/// Azimuthality margin of the hull of the given points: positive iff the
/// hull has at least `target_vertices` vertices and every facet is
/// azimuthal. Drives the multiplicative adjustment search.
fn hull_margin(curves: &[SimpleCurve], tol: &Scalar, target_vertices: usize) -> Scalar {
    let prec = tol.precision();
    let points: Vec<cone::SimplexPoint> = match curves
        .iter()
        .map(|c| projectivize(&c.ml))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(p) => p,
        Err(_) => return Scalar::from_i64(-1_000_000, prec),
    };
    let hull = match convex_hull(&points, tol) {
        Ok(h) => h,
        Err(_) => return Scalar::from_i64(-1_000_000, prec),
    };
    if hull.vertices.len() < target_vertices {
        let shortfall = (target_vertices - hull.vertices.len()) as i64;
        return Scalar::from_i64(-1000 * shortfall, prec);
    }
    let mut worst: Option<Scalar> = None;
    for f in &hull.facets {
        let mut c = f.functional.c.clone();
        c.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut sum = Scalar::zero(prec);
        for ci in &f.functional.c {
            sum = &sum + ci;
        }
        let margin = if c[0].is_negative() {
            c[1].min(&sum)
        } else {
            -&(&c[0] + &Scalar::from_decimal("0.001", prec).expect("literal"))
        };
        if worst.as_ref().map_or(true, |w| margin < *w) {
            worst = Some(margin);
        }
    }
    worst.unwrap_or_else(|| Scalar::from_i64(-1_000_000, prec))
}

struct PolygonScenario {
    genus: usize,
    /// Chain parameters of P1, P2 (adjustable) and P3 (fixed).
    p1: Vec<Scalar>,
    p2: Vec<Scalar>,
    p3: Vec<Scalar>,
    target_vertices: usize,
}

fn polygon_scenario_params(cfg: &ScenarioConfig, prec: usize) -> Result<PolygonScenario, ScenarioError> {
    match cfg.scenario {
        ScenarioKind::Hexagon => {
            let x = cfg.scalar_param("x", prec)?;
            let delta = cfg.scalar_param("delta", prec)?;
            let y = &x * &delta;
            let params = vec![x.clone(), y, x];
            Ok(PolygonScenario { genus: 2, p1: params.clone(), p2: params.clone(), p3: params, target_vertices: 6 })
        }
        ScenarioKind::Ngon => {
            let g: usize = cfg
                .raw
                .get("ngon.g")
                .unwrap_or("3")
                .parse()
                .map_err(|_| ConfigError::Invalid { key: "ngon.g".into(), reason: "integer".into() })?;
            if g < 2 {
                return Err(ScenarioError::Config(ConfigError::NonPositive("ngon.g".into())));
            }
            let x = cfg.scalar_param("x", prec)?;
            let count = 2 * g - 1;
            // documented incommensurable exponents alpha_k = (8 + k*sqrt2)/8
            let sqrt2 = Scalar::from_u64(2, prec).sqrt();
            let eight = Scalar::from_u64(8, prec);
            let alphas: Vec<Scalar> = (0..count)
                .map(|k| &(&eight + &(&Scalar::from_u64(k as u64, prec) * &sqrt2)) / &eight)
                .collect();
            let p12: Vec<Scalar> = vec![x.clone(); count];
            let p3: Vec<Scalar> = alphas.iter().map(|a| x.pow(a)).collect();
            Ok(PolygonScenario {
                genus: g,
                p1: p12.clone(),
                p2: p12,
                p3,
                target_vertices: 4 * g - 1,
            })
        }
        _ => unreachable!("polygon scenario"),
    }
}

fn build_three(
    genus: usize,
    p1: &[Scalar],
    p2: &[Scalar],
    p3: &[Scalar],
) -> Result<[EmbeddedPolygon; 3], ScenarioError> {
    Ok([
        build_chain_polygon(genus, p1)?.with_shift(0),
        build_chain_polygon(genus, p2)?.with_shift(1),
        build_chain_polygon(genus, p3)?.with_shift(2),
    ])
}

fn run_polygon_family(cfg: &ScenarioConfig, config_text: &str) -> Result<ScenarioResult, ScenarioError> {
    // estimation pass at the configured precision floor
    let est = polygon_scenario_params(cfg, cfg.precision_bits)?;
    let polys = build_three(est.genus, &est.p1, &est.p2, &est.p3)?;
    let curves = polygon_classes(&polys)?;
    let mut lambda_max = Scalar::zero(64);
    for c in &curves {
        for coord in &c.ml.coords {
            lambda_max = lambda_max.max(coord);
        }
    }
    let prec = escalated_precision(cfg.precision_bits, &lambda_max);
    // full pass
    let sc = polygon_scenario_params(cfg, prec)?;
    let tol = default_collinearity_tol(prec);
    let polys = build_three(sc.genus, &sc.p1, &sc.p2, &sc.p3)?;
    let curves = polygon_classes(&polys)?;
    let margin0 = hull_margin(&curves, &tol, sc.target_vertices);
    let mut adjustment: Option<AdjustmentReport> = None;
    let (final_polys, final_curves) = if margin0.is_positive() {
        (polys, curves)
    } else {
        // adjust the chain parameters of P1 and P2 by bounded multiplicative
        // amounts; P3 stays fixed
        let base: Vec<Scalar> = sc.p1.iter().chain(sc.p2.iter()).cloned().collect();
        let np = sc.p1.len();
        let genus = sc.genus;
        let p3 = sc.p3.clone();
        let target = sc.target_vertices;
        let mut objective = |cand: &[Scalar]| -> Scalar {
            let (c1, c2) = cand.split_at(np);
            match build_three(genus, c1, c2, &p3) {
                Ok(ps) => match polygon_classes(&ps) {
                    Ok(cs) => hull_margin(&cs, &tol, target),
                    Err(_) => Scalar::from_i64(-1_000_000, prec),
                },
                Err(_) => Scalar::from_i64(-1_000_000, prec),
            }
        };
        let outcome = multiplicative_adjust(&base, &mut objective)?;
        let (c1, c2) = outcome.params.split_at(np);
        let polys = build_three(sc.genus, c1, c2, &sc.p3)?;
        let curves = polygon_classes(&polys)?;
        adjustment = Some(AdjustmentReport {
            multipliers: outcome.multipliers.iter().map(ReportScalar::of).collect(),
            evaluations: outcome.evaluations,
            margin: ReportScalar::of(&outcome.margin),
        });
        (polys, curves)
    };
    let assembly = assemble_hull(&final_curves, &tol)?;
    // cloud generators at cloud precision (rebuild the polygons there)
    let cp = |v: &Scalar| v.with_precision(CLOUD_PRECISION);
    let cp_vec = |v: &[Scalar]| v.iter().map(cp).collect::<Vec<_>>();
    let (f1, f2): (Vec<Scalar>, Vec<Scalar>) = match &adjustment {
        None => (cp_vec(&sc.p1), cp_vec(&sc.p2)),
        Some(_) => {
            // recover adjusted params at cloud precision from the final polygons'
            // seam lengths: parameters are exactly the e_k lengths
            (
                chain_params_of(&final_polys[0]),
                chain_params_of(&final_polys[1]),
            )
        }
    };
    if std::env::var("LIMITCONE_DEBUG_PARAMS").is_ok() {
        eprintln!("DBG f1: {:?}", f1.iter().map(|v| v.to_decimal_sig(6)).collect::<Vec<_>>());
        eprintln!("DBG f2: {:?}", f2.iter().map(|v| v.to_decimal_sig(6)).collect::<Vec<_>>());
        eprintln!("DBG adjusted: {}", adjustment.is_some());
    }
    let cloud_polys = build_three(sc.genus, &f1, &f2, &cp_vec(&sc.p3))?;
    let images = GeneratorImages {
        components: cloud_polys.iter().map(|p| p.reflection_generators()).collect(),
    };
    let gens = 2 * sc.genus + 2;
    let cloud = run_cloud(&images, WordKind::EvenReflection, gens, cfg.word_max_len, &assembly.hull)?;
    let witness = nonconjugacy_witness(
        &images,
        WordKind::EvenReflection,
        4,
        &Scalar::from_decimal("1e-9", 256).expect("literal"),
    )
    .ok()
    .map(|w| w.spell());
    let records = record_diagnostic(&cloud, &assembly.hull);
    let lift = final_curves
        .iter()
        .filter_map(|c| c.multiplicity.map(|m| (c.id.clone(), m)))
        .collect::<Vec<_>>();
    let bundle = ReportBundle {
        scenario: cfg.scenario.name().into(),
        config: cfg.raw.echo(),
        input_hash: content_hash(config_text.as_bytes()),
        precision_bits: prec,
        cloud_precision_bits: CLOUD_PRECISION,
        hull: hull_report(&final_curves, &assembly.hull),
        curve_count: final_curves.len(),
        cloud: cloud.summary,
        witness,
        slack_regression: None,
        angle_law: None,
        adjustment,
        record_breakers: records,
        lift_multiplicities: Some(lift),
        caveats: standard_caveats(),
    };
    let mut rows = assembly.rows;
    rows.extend(cloud.rows);
    Ok(ScenarioResult { bundle, rows, cloud_bary: cloud.bary })
}

/// Chain parameters recovered from a built polygon (at cloud precision):
/// e_0 and e_{2g-2} are the polygon sides holding those edges; the interior
/// seams are the chords of the corresponding side pairs. Falling back to
/// reading them from the structure avoids re-running the adjustment search.
fn chain_params_of(p: &EmbeddedPolygon) -> Vec<Scalar> {
    // e_0 is physical side 0; e_{2g-2} is the side holding the last chain
    // edge; interior seams are chords. Rather than re-deriving the mapping,
    // rebuild from the stored side lengths: parameters are e_0, seams, e_last.
    // The seam chords are recomputed in cloud precision by the caller via
    // build_chain_polygon, so here we only need the parameter lengths.
    let g = p.genus;
    let n = 2 * g + 2;
    let cp = |v: &Scalar| v.with_precision(CLOUD_PRECISION);
    let mut params = Vec::with_capacity(2 * g - 1);
    params.push(cp(&p.sides[0].length));
    if let Ok(chords) = p.enumerate_chords() {
        // interior seams in chain order e_1 .. e_{2g-3}
        for k in 1..=(2 * g - 3) {
            let (i, j) = seam_side_pair(g, k);
            let rec = chords
                .iter()
                .find(|c| (c.side_i, c.side_j) == (i.min(j), i.max(j)))
                .expect("seam chord exists");
            params.push(cp(&rec.length));
        }
    }
    params.push(cp(&p.sides[seam_last_side(g)].length));
    let _ = n;
    params
}

/// Polygon side pair whose chord is the chain seam e_k (1 ≤ k ≤ 2g−3),
/// read off the boundary-walk structure.
fn seam_side_pair(g: usize, k: usize) -> (usize, usize) {
    // walk the same boundary traversal symbolically to locate seam feet
    let n_pent = 2 * g - 2;
    let out_idx = |kk: usize| if kk % 2 == 1 { 2usize } else { 3 };
    // segment list as (pentagon, side) with polygon side indices
    let mut side_of_seg: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    let mut groups: Vec<Vec<(usize, usize)>> = vec![vec![(1, 0)]];
    let (mut kk, mut j) = (1usize, 0usize);
    loop {
        let mut jn = (j + 1) % 5;
        let mut k2 = kk;
        let mut merged = false;
        loop {
            if k2 < n_pent && jn == out_idx(k2) {
                k2 += 1;
                jn = 1;
                merged = true;
            } else if k2 > 1 && jn == 0 {
                k2 -= 1;
                jn = out_idx(k2) + 1;
                merged = true;
            } else {
                break;
            }
        }
        if (k2, jn) == (1, 0) {
            break;
        }
        if merged {
            groups.last_mut().unwrap().push((k2, jn));
        } else {
            groups.push(vec![(k2, jn)]);
        }
        kk = k2;
        j = jn;
    }
    for (side, grp) in groups.iter().enumerate() {
        for seg in grp {
            side_of_seg.insert(*seg, side);
        }
    }
    // seam e_k = out-side of pentagon k; its feet lie on the polygon sides
    // containing the neighbouring segments (out-1) and (out+1) of pentagon k
    let o = out_idx(k);
    let before = side_of_seg[&(k, o - 1)];
    let after = side_of_seg[&(k, (o + 1) % 5)];
    (before, after)
}

/// Polygon side index holding the last chain edge e_{2g-2}.
fn seam_last_side(g: usize) -> usize {
    // in the boundary walk, e_{2g-2} is side `out_idx` of the last pentagon,
    // emitted as its own polygon side
    let n_pent = 2 * g - 2;
    let out_idx = |kk: usize| if kk % 2 == 1 { 2usize } else { 3 };
    let mut groups: Vec<Vec<(usize, usize)>> = vec![vec![(1, 0)]];
    let (mut kk, mut j) = (1usize, 0usize);
    loop {
        let mut jn = (j + 1) % 5;
        let mut k2 = kk;
        let mut merged = false;
        loop {
            if k2 < n_pent && jn == out_idx(k2) {
                k2 += 1;
                jn = 1;
                merged = true;
            } else if k2 > 1 && jn == 0 {
                k2 -= 1;
                jn = out_idx(k2) + 1;
                merged = true;
            } else {
                break;
            }
        }
        if (k2, jn) == (1, 0) {
            break;
        }
        if merged {
            groups.last_mut().unwrap().push((k2, jn));
        } else {
            groups.push(vec![(k2, jn)]);
        }
        kk = k2;
        j = jn;
    }
    groups
        .iter()
        .position(|grp| grp == &vec![(n_pent, out_idx(n_pent))])
        .expect("last chain edge is a full polygon side")
}

// ---------------------------------------------------------------------------
// fish
// ---------------------------------------------------------------------------

fn fish_rep(a: &Scalar, b: &Scalar) -> Result<TorusRep, ScenarioError> {
    let prec = a.precision().max(b.precision());
    let two = Scalar::from_u64(2, prec);
    let (la, lb) = (&two * a, &two * b);
    let rows: Vec<[Scalar; 3]> = vec![
        [la.clone(), lb.clone(), lb.clone()],
        [lb.clone(), la.clone(), lb.clone()],
        [lb.clone(), lb.clone(), la.clone()],
    ];
    Ok(TorusRep::from_length_triples(&rows)?)
}

fn run_fish(cfg: &ScenarioConfig, config_text: &str) -> Result<ScenarioResult, ScenarioError> {
    // estimation pass
    let a0 = cfg.scalar_param("a", cfg.precision_bits)?;
    let b0 = cfg.scalar_param("b", cfg.precision_bits)?;
    let family: Vec<Slope> = farey_enumerate(cfg.q_max).into_iter().map(|(s, _, _)| s).collect();
    let est_rep = fish_rep(&a0, &b0)?;
    let mut lambda_max = Scalar::zero(64);
    for s in &family {
        for i in 0..3 {
            lambda_max = lambda_max.max(&est_rep.slope_length(i, *s)?);
        }
    }
    let prec = escalated_precision(cfg.precision_bits, &lambda_max);
    let a = cfg.scalar_param("a", prec)?;
    let b = cfg.scalar_param("b", prec)?;
    let rep = fish_rep(&a, &b)?;
    // hull merge tolerance below the smallest predicted exterior angle
    // (theta ~ (K/2a) e^(-lambda) q, so e^(-lambda_max) with headroom)
    let tol = {
        let floor = (-&lambda_max.with_precision(prec)).exp();
        default_collinearity_tol(prec).min(&(&floor * &Scalar::two_pow(-60, prec)))
    };
    let mut curves = Vec::with_capacity(family.len() + 1);
    for s in &family {
        let coords: Vec<Scalar> =
            (0..3).map(|i| rep.slope_length(i, *s)).collect::<Result<Vec<_>, _>>()?;
        curves.push(SimpleCurve {
            id: format!("slope{s}"),
            kind: "slope",
            ml: MultiLength::new(coords)?,
            multiplicity: None,
        });
    }
    let peri: Vec<Scalar> = (0..3)
        .map(|i| {
            peripheral_length(rep.component(i))
                .ok_or_else(|| ScenarioError::Other("peripheral curve is not hyperbolic".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    curves.push(SimpleCurve {
        id: "peripheral".into(),
        kind: "peripheral",
        ml: MultiLength::new(peri)?,
        multiplicity: None,
    });
    let assembly = assemble_hull(&curves, &tol)?;
    // Eq (5.9) angle-law rows for slopes in (0,1) with 2 <= q <= 10, from the
    // xi-polyline of component 1
    let angle_law = {
        let pts = rep.xi_points(0, cfg.q_max.min(20))?;
        let k_const = (&(&a + &b) + &b).exp();
        let two_a = &Scalar::from_u64(2, prec) * &a;
        let mut rows = Vec::new();
        for idx in 1..pts.len().saturating_sub(1) {
            let (s, _) = pts[idx];
            if s.q < 2 || s.q > 10 {
                continue;
            }
            let (pm, p0, pp) = (&pts[idx - 1].1, &pts[idx].1, &pts[idx + 1].1);
            let v1 = [&p0[0] - &pm[0], &p0[1] - &pm[1]];
            let v2 = [&pp[0] - &p0[0], &pp[1] - &p0[1]];
            let cross = &(&v1[0] * &v2[1]) - &(&v1[1] * &v2[0]);
            let dot = &(&v1[0] * &v2[0]) + &(&v1[1] * &v2[1]);
            let angle = cross.atan2(&dot);
            let lam = rep.slope_length(0, s)?;
            let predicted =
                &(&(&k_const / &two_a) * &(-&lam).exp()) * &Scalar::from_i64(s.q, prec);
            let ratio = &angle / &predicted;
            rows.push(AngleLawRow {
                slope: s.to_string(),
                exterior_angle: ReportScalar::of(&angle),
                predicted: ReportScalar::of(&predicted),
                ratio: ReportScalar::of(&ratio),
            });
        }
        Some(rows)
    };
    // Prop 5.1 slack regression at >= 2304 bits on the component-1 triangle
    let slack_regression = {
        let sprec = prec.max(2304);
        let tau = TriangleSides::new(
            a.with_precision(sprec),
            b.with_precision(sprec),
            b.with_precision(sprec),
        );
        let path = parse_mutation_path("ABABABABAB").expect("valid path");
        let steps = mutation_slacks(&tau, &path)?;
        Some(
            steps
                .iter()
                .map(|st| SlackRow {
                    depth: st.depth,
                    sides: st.sides.iter().map(ReportScalar::of).collect(),
                    slack: ReportScalar::of(&st.slack),
                    predicted: ReportScalar::of(&st.predicted),
                    ratio: ReportScalar::of(&(&st.slack / &st.predicted)),
                })
                .collect(),
        )
    };
    // cloud at cloud precision
    let rep_cloud = fish_rep(&a.with_precision(CLOUD_PRECISION), &b.with_precision(CLOUD_PRECISION))?;
    let images = GeneratorImages {
        components: (0..3)
            .map(|i| {
                let (ma, mb) = rep_cloud.generators(i);
                vec![ma.clone(), ma.inverse(), mb.clone(), mb.inverse()]
            })
            .collect(),
    };
    let cloud = run_cloud(&images, WordKind::FreeRank2, 2, cfg.word_max_len, &assembly.hull)?;
    let witness = nonconjugacy_witness(
        &images,
        WordKind::FreeRank2,
        6,
        &Scalar::from_decimal("1e-9", 256).expect("literal"),
    )
    .ok()
    .map(|w| w.spell());
    let records = record_diagnostic(&cloud, &assembly.hull);
    let bundle = ReportBundle {
        scenario: "fish".into(),
        config: cfg.raw.echo(),
        input_hash: content_hash(config_text.as_bytes()),
        precision_bits: prec,
        cloud_precision_bits: CLOUD_PRECISION,
        hull: hull_report(&curves, &assembly.hull),
        curve_count: curves.len(),
        cloud: cloud.summary,
        witness,
        slack_regression,
        angle_law,
        adjustment: None,
        record_breakers: records,
        lift_multiplicities: None,
        caveats: standard_caveats(),
    };
    let mut rows = assembly.rows;
    rows.extend(cloud.rows);
    Ok(ScenarioResult { bundle, rows, cloud_bary: cloud.bary })
}

// ---------------------------------------------------------------------------
// custom
// ---------------------------------------------------------------------------

/// Custom scenario: explicit labelled multi-length vectors, hull and
/// certificate only (no representation, hence no word cloud).
fn run_custom(cfg: &ScenarioConfig, config_text: &str) -> Result<ScenarioResult, ScenarioError> {
    let prec = cfg.precision_bits;
    let count: usize = cfg
        .raw
        .get("custom.count")
        .ok_or_else(|| ConfigError::Missing("custom.count".into()))?
        .parse()
        .map_err(|_| ConfigError::Invalid { key: "custom.count".into(), reason: "integer".into() })?;
    let mut curves = Vec::with_capacity(count);
    for i in 1..=count {
        let key = format!("custom.curve{i}");
        let text = cfg.raw.require(&key)?;
        let (id, vals) = text.split_once(':').ok_or_else(|| ConfigError::Invalid {
            key: key.clone(),
            reason: "expected `name: v1, v2, v3`".into(),
        })?;
        let coords: Vec<Scalar> = vals
            .split(',')
            .map(|v| eval_scalar(v, prec))
            .collect::<Result<Vec<_>, _>>()?;
        if coords.len() != 3 {
            return Err(ScenarioError::Config(ConfigError::Invalid {
                key,
                reason: "expected three coordinates".into(),
            }));
        }
        curves.push(SimpleCurve {
            id: id.trim().to_string(),
            kind: "edge",
            ml: MultiLength::new(coords)?,
            multiplicity: None,
        });
    }
    let assembly = assemble_hull(&curves, &default_collinearity_tol(prec))?;
    let bundle = ReportBundle {
        scenario: "custom".into(),
        config: cfg.raw.echo(),
        input_hash: content_hash(config_text.as_bytes()),
        precision_bits: prec,
        cloud_precision_bits: CLOUD_PRECISION,
        hull: hull_report(&curves, &assembly.hull),
        curve_count: curves.len(),
        cloud: CloudSummary {
            total_words: 0,
            distinct_points: 0,
            nonhyperbolic: 0,
            dedup_dropped: 0,
            containment_tolerance: ReportScalar::of(&Scalar::from_decimal("1e-12", 256).expect("literal")),
            violations: 0,
            max_outside_margin: None,
        },
        witness: None,
        slack_regression: None,
        angle_law: None,
        adjustment: None,
        record_breakers: None,
        lift_multiplicities: None,
        caveats: vec!["custom scenario: no representation, containment not checked".into()],
    };
    Ok(ScenarioResult { bundle, rows: assembly.rows, cloud_bary: Vec::new() })
}

// ---------------------------------------------------------------------------
// helpers shared with the acceptance suite
// ---------------------------------------------------------------------------

/// Builds fish generator images at the given precision (used by tests).
pub fn fish_images(a: f64, b: f64, prec: usize) -> GeneratorImages {
    let two = Scalar::from_u64(2, prec);
    let mk = |x: f64, y: f64, z: f64| {
        TraceTriple::new(
            &two * &Scalar::from_f64(x, prec).cosh(),
            &two * &Scalar::from_f64(y, prec).cosh(),
            &two * &Scalar::from_f64(z, prec).cosh(),
        )
        .expect("traces > 2")
    };
    let rep = TorusRep::from_triples(vec![mk(a, b, b), mk(b, a, b), mk(b, b, a)]);
    GeneratorImages {
        components: (0..3)
            .map(|i| {
                let (ma, mb) = rep.generators(i);
                vec![ma.clone(), ma.inverse(), mb.clone(), mb.inverse()]
            })
            .collect(),
    }
}

/// Slope word as a `Word` (free letters).
pub fn slope_cloud_word(s: Slope) -> Word {
    Word::parse_free(&slope_word(s)).expect("slope words are over a,b,A,B")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pants_scenario_certifies_the_paper_triangle() {
        let text = "scenario = pants\nword_max_len = 6\n";
        let cfg = ScenarioConfig::parse(text).unwrap();
        let result = run_scenario(&cfg, text).unwrap();
        assert_eq!(result.bundle.hull.verdict, "certified");
        assert_eq!(result.bundle.hull.vertices.len(), 3);
        assert_eq!(result.bundle.cloud.violations, 0);
        assert!(result.bundle.witness.is_some());
        assert!(result.bundle.cloud.distinct_points > 0);
    }

    #[test]
    fn custom_scenario_partial_square() {
        let text = "scenario = custom\n[custom]\ncount = 4\ncurve1 = p: 1, 3, 3\ncurve2 = q: 3, 1, 3\ncurve3 = r: 3, 3, 1\ncurve4 = s: 0.5, 2.0, 2.2\n";
        let cfg = ScenarioConfig::parse(text).unwrap();
        let result = run_scenario(&cfg, text).unwrap();
        assert_eq!(result.bundle.curve_count, 4);
        assert!(result.bundle.hull.vertices.len() >= 3);
    }

    #[test]
    fn seam_side_pairs_match_known_structures() {
        // hexagon (g=2): seam e_1 joins polygon sides 1 and 4
        assert_eq!(seam_side_pair(2, 1), (1, 4));
        assert_eq!(seam_last_side(2), 3);
        // g=3 (from the boundary-walk structure): e_1 = {1,6}, e_2 = {2,6}, e_3 = {2,5}
        assert_eq!(seam_side_pair(3, 1), (1, 6));
        assert_eq!(seam_side_pair(3, 2), (2, 6));
        assert_eq!(seam_side_pair(3, 3), (2, 5));
        assert_eq!(seam_last_side(3), 4);
    }
}
