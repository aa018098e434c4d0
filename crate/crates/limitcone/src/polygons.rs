//! Right-angled hyperbolic (2g+2)-gons built as pentagon chains.
//!
//! A polygon P(x₀, …, x_{2g−2}) is assembled from 2g−2 right-angled
//! pentagons Q₁, …, Q_{2g−2}; Q_k and Q_{k+1} share the edge e_k, whose
//! length is the parameter x_k. Inside Q_k (counterclockwise), e_k sits two
//! sides after e_{k−1} when k is odd and two sides before when k is even.
//! The first pentagon is anchored with e₀ on the imaginary axis starting at
//! i, so every construction is reproducible bit for bit.

use thiserror::Error;

use crate::hyp2::{self, HPoint, Hyp2Error, Isometry, OrientedGeodesic};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum PolygonError {
    #[error("pentagon parameters must be positive")]
    NonPositiveParam,
    #[error("embedding failure: {0}")]
    EmbeddingFailure(String),
    #[error("perpendicular foot lands outside side {0}")]
    FootOutsideSide(usize),
    #[error("adjustment failed; best margin {best_margin}")]
    AdjustmentFailed { best_margin: String },
    #[error(transparent)]
    Geometry(#[from] Hyp2Error),
}

/// Free parameters (x, y) of the right-angled pentagon P'(x, y).
#[derive(Clone, Debug)]
pub struct PentagonParams {
    pub x: Scalar,
    pub y: Scalar,
}

impl PentagonParams {
    pub fn new(x: Scalar, y: Scalar) -> Result<Self, PolygonError> {
        if !x.is_positive() || !y.is_positive() {
            return Err(PolygonError::NonPositiveParam);
        }
        Ok(PentagonParams { x, y })
    }
}

/// Side lengths of the right-angled pentagon P'(x, y) in counterclockwise
/// cyclic order:
/// (arcsinh(cosh y / sinh x), x, arccosh(1/(tanh x tanh y)), y, arcsinh(cosh x / sinh y)).
pub fn pentagon_sides(p: &PentagonParams) -> [Scalar; 5] {
    let x = &p.x;
    let y = &p.y;
    let prec = x.precision().max(y.precision());
    let one = Scalar::one(prec);
    let s1 = (&y.cosh() / &x.sinh()).asinh();
    let s3 = (&one / &(&x.tanh() * &y.tanh())).acosh();
    let s5 = (&x.cosh() / &y.sinh()).asinh();
    [s1, x.clone(), s3, y.clone(), s5]
}

/// Sides of the chain pentagon with in-side (length u) at position 0 and
/// out-side (length v) at position 2 (counterclockwise).
fn pent_out2(u: &Scalar, v: &Scalar) -> [Scalar; 5] {
    let prec = u.precision().max(v.precision());
    let one = Scalar::one(prec);
    [
        u.clone(),
        (&one / &(&u.tanh() * &v.tanh())).acosh(),
        v.clone(),
        (&u.cosh() / &v.sinh()).asinh(),
        (&v.cosh() / &u.sinh()).asinh(),
    ]
}

/// Same with the out-side at position 3 (the mirror-image chain step).
fn pent_out3(u: &Scalar, v: &Scalar) -> [Scalar; 5] {
    let prec = u.precision().max(v.precision());
    let one = Scalar::one(prec);
    [
        u.clone(),
        (&v.cosh() / &u.sinh()).asinh(),
        (&u.cosh() / &v.sinh()).asinh(),
        v.clone(),
        (&one / &(&u.tanh() * &v.tanh())).acosh(),
    ]
}

struct PlacedPentagon {
    sides: [Scalar; 5],
    verts: Vec<HPoint>,
    geos: Vec<OrientedGeodesic>,
    frames: Vec<Isometry>,
    out_idx: usize,
}

fn walk_pentagon(
    anchor: &Isometry,
    sides: &[Scalar; 5],
    prec: usize,
) -> Result<WalkedPentagon, PolygonError> {
    let half_pi = &Scalar::pi(prec) / &Scalar::from_u64(2, prec);
    let turn = Isometry::rotation_about_i(&half_pi);
    let mut flag = anchor.clone();
    let mut loop_prod = Isometry::identity(prec);
    let mut verts = Vec::with_capacity(5);
    let mut geos = Vec::with_capacity(5);
    let mut flags_after = Vec::with_capacity(5);
    let i_pt = HPoint::i(prec);
    let std_axis = OrientedGeodesic::from_f64(0.0, f64::INFINITY, prec);
    let mut frames = Vec::with_capacity(5);
    let mut scale = Scalar::one(prec);
    for len in sides {
        verts.push(flag.apply_interior(&i_pt));
        geos.push(flag.apply_geodesic(&std_axis));
        frames.push(flag.clone());
        let step = Isometry::translation(len);
        flag = flag.compose(&step);
        loop_prod = loop_prod.compose(&step);
        for e in loop_prod.entries().iter().flatten().chain(flag.entries().iter().flatten()) {
            scale = scale.max(&e.abs());
        }
        flags_after.push(flag.clone());
        flag = flag.compose(&turn);
        loop_prod = loop_prod.compose(&turn);
    }
    // rounding in the walk is relative to the largest intermediate entry
    let tol = &scale * &Scalar::two_pow(24 - prec as i64, prec);
    if !loop_prod.approx_eq_projective(&Isometry::identity(prec), &tol) {
        return Err(PolygonError::EmbeddingFailure(format!(
            "pentagon walk does not close: {loop_prod:?}"
        )));
    }
    Ok(WalkedPentagon { verts, geos, frames, flags_after, scale })
}

struct WalkedPentagon {
    verts: Vec<HPoint>,
    geos: Vec<OrientedGeodesic>,
    /// Flag at the start of each side: maps (0, ∞) to the side geodesic and
    /// i to the start vertex. All side-local computations conjugate through
    /// these frames instead of subtracting huge boundary coordinates.
    frames: Vec<Isometry>,
    flags_after: Vec<Isometry>,
    scale: Scalar,
}

/// One side of an embedded polygon: the supporting geodesic (oriented along
/// the counterclockwise traversal) and the total side length.
#[derive(Clone, Debug)]
pub struct PolygonSide {
    pub geodesic: OrientedGeodesic,
    pub length: Scalar,
    /// Flag taking (0, ∞) to the side geodesic and i to the side's start.
    frame: Isometry,
}

impl PolygonSide {
    /// Reflection across the side geodesic, by conjugation through the frame
    /// (no cancellation-prone endpoint arithmetic).
    pub fn reflection(&self) -> Isometry {
        let prec = self.length.precision();
        let one = Scalar::one(prec);
        let zero = Scalar::zero(prec);
        let mirror = Isometry::new([[-&one, zero.clone()], [zero, one]]);
        self.frame.compose(&mirror).compose(&self.frame.inverse())
    }

    pub fn frame(&self) -> &Isometry {
        &self.frame
    }
}

/// A right-angled convex hyperbolic (2g+2)-gon realized in the upper
/// half-plane, with a cyclic labelling shift: the curve at abstract label ℓ
/// lives at physical position (ℓ − shift) mod (2g+2).
pub struct EmbeddedPolygon {
    pub genus: usize,
    pub shift: usize,
    pub vertices: Vec<HPoint>,
    pub sides: Vec<PolygonSide>,
    /// Largest matrix-entry magnitude seen while placing the pentagons;
    /// conditions every validation tolerance.
    magnitude: Scalar,
}

/// Abstract curve label shared across shifted copies of a polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CurveLabel {
    Edge(usize),
    Chord(usize, usize),
}

impl std::fmt::Display for CurveLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurveLabel::Edge(e) => write!(f, "edge{e}"),
            CurveLabel::Chord(i, j) => write!(f, "chord{i}-{j}"),
        }
    }
}

/// Lift multiplicity on the doubled surface: 2 for edges and same-parity
/// chords (two twice-longer loops), 4 for mixed-parity chords (one
/// four-times-longer loop). Identical in all coordinates, so it cancels
/// under projectivization; recorded for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityClass {
    Same,
    Mixed,
}

/// A chord: the common perpendicular segment between two sides at cyclic
/// distance ≥ 3.
#[derive(Clone, Debug)]
pub struct ChordRecord {
    pub side_i: usize,
    pub side_j: usize,
    pub geodesic: OrientedGeodesic,
    pub length: Scalar,
    pub parity_class: ParityClass,
}

impl ChordRecord {
    pub fn lift_multiplicity(&self) -> u32 {
        match self.parity_class {
            ParityClass::Same => 2,
            ParityClass::Mixed => 4,
        }
    }
}

/// Builds the right-angled (2g+2)-gon whose pentagon-chain shared edges
/// e₀, …, e_{2g−2} have exactly the given lengths.
pub fn build_chain_polygon(g: usize, params: &[Scalar]) -> Result<EmbeddedPolygon, PolygonError> {
    assert!(g >= 2, "genus must be at least 2");
    assert_eq!(params.len(), 2 * g - 1, "need 2g-1 chain parameters");
    if params.iter().any(|p| !p.is_positive()) {
        return Err(PolygonError::NonPositiveParam);
    }
    let prec = params.iter().map(|p| p.precision()).max().unwrap();
    let n_pent = 2 * g - 2;
    let pi = Scalar::pi(prec);
    let mut pents: Vec<PlacedPentagon> = Vec::with_capacity(n_pent);
    let mut anchor = Isometry::identity(prec);
    let mut magnitude = Scalar::one(prec);
    for k in 1..=n_pent {
        let (u, v) = (&params[k - 1], &params[k]);
        let (sides, out_idx) =
            if k % 2 == 1 { (pent_out2(u, v), 2usize) } else { (pent_out3(u, v), 3usize) };
        let walked = walk_pentagon(&anchor, &sides, prec)?;
        magnitude = magnitude.max(&walked.scale);
        if k < n_pent {
            anchor = walked.flags_after[out_idx].compose(&Isometry::rotation_about_i(&pi));
        }
        pents.push(PlacedPentagon {
            sides,
            verts: walked.verts,
            geos: walked.geos,
            frames: walked.frames,
            out_idx,
        });
    }

    // boundary walk: traverse pentagon sides counterclockwise, jumping across
    // shared seams; a jump fuses collinear segments into one polygon side
    let mut groups: Vec<Vec<(usize, usize)>> = vec![vec![(1, 0)]];
    let (mut k, mut j) = (1usize, 0usize);
    loop {
        let mut jn = (j + 1) % 5;
        let mut kk = k;
        let mut merged = false;
        loop {
            if kk < n_pent && jn == pents[kk - 1].out_idx {
                kk += 1;
                jn = 1;
                merged = true;
            } else if kk > 1 && jn == 0 {
                kk -= 1;
                jn = pents[kk - 1].out_idx + 1;
                merged = true;
            } else {
                break;
            }
        }
        if (kk, jn) == (1, 0) {
            break;
        }
        if merged {
            groups.last_mut().unwrap().push((kk, jn));
        } else {
            groups.push(vec![(kk, jn)]);
        }
        k = kk;
        j = jn;
    }
    let n_sides = 2 * g + 2;
    if groups.len() != n_sides {
        return Err(PolygonError::EmbeddingFailure(format!(
            "boundary walk produced {} sides, expected {n_sides}",
            groups.len()
        )));
    }

    let mut sides = Vec::with_capacity(n_sides);
    let mut vertices = Vec::with_capacity(n_sides);
    for grp in &groups {
        let (k0, j0) = grp[0];
        let geodesic = pents[k0 - 1].geos[j0].clone();
        let frame = pents[k0 - 1].frames[j0].clone();
        let frame_inv = frame.inverse();
        let mut length = Scalar::zero(prec);
        for (seg_idx, &(kk, jj)) in grp.iter().enumerate() {
            length = &length + &pents[kk - 1].sides[jj];
            if seg_idx == 0 {
                continue;
            }
            // fused segments share the supporting geodesic exactly when the
            // frame transition is a pure translation along the standard axis
            let d = frame_inv.compose(&pents[kk - 1].frames[jj]);
            let e = d.entries();
            let diag = e[0][0].abs().max(&e[1][1].abs());
            let off = e[0][1].abs().max(&e[1][0].abs());
            // off-diagonal rounding noise scales with the squared flag magnitude
            let floor = &diag + &(&magnitude * &magnitude);
            if off > &floor * &Scalar::two_pow(24 - prec as i64, prec) {
                return Err(PolygonError::EmbeddingFailure(
                    "fused boundary segments are not collinear".into(),
                ));
            }
        }
        vertices.push(pents[k0 - 1].verts[j0].clone());
        sides.push(PolygonSide { geodesic, length, frame });
    }

    let polygon = EmbeddedPolygon { genus: g, shift: 0, vertices, sides, magnitude };
    polygon.validate()?;
    Ok(polygon)
}

/// Diagnostic: reports the construction magnitude and endpoint separations.
pub fn debug_build(g: usize, params: &[Scalar]) -> String {
    match build_chain_polygon(g, params) {
        Ok(p) => format!("ok: magnitude exponent {}", p.magnitude.exponent()),
        Err(e) => format!("err: {e}"),
    }
}

impl EmbeddedPolygon {
    pub fn side_count(&self) -> usize {
        self.sides.len()
    }

    pub fn precision(&self) -> usize {
        self.sides
            .iter()
            .map(|s| s.length.precision())
            .max()
            .unwrap_or(crate::scalar::MIN_PRECISION)
    }

    /// The same polygon with its cyclic labelling shifted by `shift`.
    pub fn with_shift(mut self, shift: usize) -> Self {
        self.shift = shift % self.side_count();
        self
    }

    /// Physical position of the abstract label ℓ under this labelling.
    pub fn physical(&self, label: usize) -> usize {
        let n = self.side_count();
        (label + n - self.shift % n) % n
    }

    /// Map into the side's axis coordinates (side geodesic becomes (0, ∞)).
    fn side_axis_inverse(&self, i: usize) -> Isometry {
        self.sides[i].frame.inverse()
    }

    /// Checks the defining invariants: right angles at every vertex,
    /// all vertices weakly on the interior side of every side geodesic
    /// (convexity), and counterclockwise orientation.
    pub fn validate(&self) -> Result<(), PolygonError> {
        let prec = self.precision();
        let n = self.side_count();
        // conditioned tolerance: rounding residues grow with the squared
        // construction magnitude; a genuine construction bug shows up at
        // macroscopic scale, so the two must stay separated
        let tol = {
            let m2 = &self.magnitude * &self.magnitude;
            let conditioned = &m2 * &Scalar::two_pow(36 - prec as i64, prec);
            let bug_scale = Scalar::two_pow(-30, prec);
            if conditioned >= bug_scale {
                return Err(PolygonError::EmbeddingFailure(format!(
                    "precision {prec} too low to validate a polygon of this size",
                )));
            }
            conditioned
        };
        // right angles: reflections in consecutive sides compose to a
        // rotation by pi, i.e. a traceless product (relative to entry size)
        for i in 0..n {
            let r1 = self.sides[i].reflection();
            let r2 = self.sides[(i + 1) % n].reflection();
            let prod = r2.compose(&r1);
            let mag = |m: &Isometry| {
                m.entries().iter().flatten().fold(Scalar::one(prec), |acc, e| acc.max(&e.abs()))
            };
            let scale = &mag(&r1) * &mag(&r2);
            let defect = &prod.trace().abs() / &scale;
            if defect > tol {
                return Err(PolygonError::EmbeddingFailure(format!(
                    "sides {i} and {} do not meet at a right angle (defect {})",
                    (i + 1) % n,
                    defect.to_decimal_sig(6)
                )));
            }
        }
        // convexity + ccw orientation: every vertex not on side i lies
        // strictly left of the oriented side geodesic
        for i in 0..n {
            let inv = self.side_axis_inverse(i);
            for (vi, v) in self.vertices.iter().enumerate() {
                if vi == i || vi == (i + 1) % n {
                    continue;
                }
                let w = inv.apply_interior(v);
                if !w.x.is_negative() {
                    return Err(PolygonError::EmbeddingFailure(format!(
                        "vertex {vi} is not left of side {i}: polygon is not convex ccw"
                    )));
                }
            }
        }
        Ok(())
    }

    /// All chords: one per unordered side pair at cyclic distance ≥ 3,
    /// exactly (g+1)(2g−3) of them.
    pub fn enumerate_chords(&self) -> Result<Vec<ChordRecord>, PolygonError> {
        let n = self.side_count();
        let prec = self.precision();
        let two = Scalar::from_u64(2, prec);
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (j - i).min(n - (j - i));
                if d < 3 {
                    continue;
                }
                // the product of the two side reflections translates along
                // the common perpendicular by twice the chord length
                let m = self.sides[j].reflection().compose(&self.sides[i].reflection());
                let length = &hyp2::translation_length(&m)? / &two;
                // chord axis in side-i coordinates: a perpendicular crossing
                // of (0, ∞) with endpoints (-h, h); the foot sits at height h
                let mut geodesic: Option<OrientedGeodesic> = None;
                for side_idx in [i, j] {
                    let inv = self.side_axis_inverse(side_idx);
                    let local = hyp2::axis(&inv.compose(&m).compose(&self.sides[side_idx].frame))?;
                    let (u, w) = (&local.backward, &local.forward);
                    if u.is_infinity() || w.is_infinity() {
                        return Err(PolygonError::FootOutsideSide(side_idx));
                    }
                    let prod = -&(u.coordinate() * w.coordinate());
                    if !prod.is_positive() {
                        return Err(PolygonError::FootOutsideSide(side_idx));
                    }
                    let foot_param = prod.sqrt().ln();
                    let v0 = inv.apply_interior(&self.vertices[side_idx]);
                    let v1 = inv.apply_interior(&self.vertices[(side_idx + 1) % n]);
                    let (mut lo, mut hi) = (v0.y.ln(), v1.y.ln());
                    if lo > hi {
                        std::mem::swap(&mut lo, &mut hi);
                    }
                    if foot_param <= lo || foot_param >= hi {
                        return Err(PolygonError::FootOutsideSide(side_idx));
                    }
                    if side_idx == i {
                        geodesic = Some(self.sides[i].frame.apply_geodesic(&local));
                    }
                }
                let geodesic = geodesic.expect("set for side i");
                let parity_class =
                    if (j - i) % 2 == 0 { ParityClass::Same } else { ParityClass::Mixed };
                out.push(ChordRecord { side_i: i, side_j: j, geodesic, length, parity_class });
            }
        }
        let g = self.genus;
        let expected = (g + 1) * (2 * g - 3);
        if out.len() != expected {
            return Err(PolygonError::EmbeddingFailure(format!(
                "chord count {} differs from (g+1)(2g-3) = {expected}",
                out.len()
            )));
        }
        let _ = prec;
        Ok(out)
    }

    /// Geometric length of every abstract curve label under this polygon's
    /// labelling shift.
    pub fn labelled_length_system(&self) -> Result<Vec<(CurveLabel, Scalar)>, PolygonError> {
        let n = self.side_count();
        let chords = self.enumerate_chords()?;
        let mut out = Vec::with_capacity(n + chords.len());
        for label in 0..n {
            out.push((CurveLabel::Edge(label), self.sides[self.physical(label)].length.clone()));
        }
        for label_i in 0..n {
            for label_j in (label_i + 1)..n {
                let d = (label_j - label_i).min(n - (label_j - label_i));
                if d < 3 {
                    continue;
                }
                let (pi, pj) = {
                    let a = self.physical(label_i);
                    let b = self.physical(label_j);
                    (a.min(b), a.max(b))
                };
                let rec = chords
                    .iter()
                    .find(|c| c.side_i == pi && c.side_j == pj)
                    .expect("cyclic distance is shift-invariant");
                out.push((CurveLabel::Chord(label_i, label_j), rec.length.clone()));
            }
        }
        Ok(out)
    }

    /// Reflections across the side geodesics, indexed by abstract label.
    pub fn reflection_generators(&self) -> Vec<Isometry> {
        (0..self.side_count())
            .map(|label| self.sides[self.physical(label)].reflection())
            .collect()
    }
}

/// Outcome of a multiplicative adjustment search.
#[derive(Clone, Debug)]
pub struct AdjustOutcome {
    pub params: Vec<Scalar>,
    pub multipliers: Vec<Scalar>,
    pub margin: Scalar,
    pub evaluations: usize,
}

/// Deterministic coordinate-descent line search over per-parameter
/// multipliers in [1/8, 8] (dyadically refined grid of powers of two).
/// The objective returns a margin; the target is satisfied when it is
/// positive. Returns the first satisfying parameter vector found, or
/// `AdjustmentFailed` carrying the best margin achieved.
pub fn multiplicative_adjust(
    base: &[Scalar],
    objective: &mut dyn FnMut(&[Scalar]) -> Scalar,
) -> Result<AdjustOutcome, PolygonError> {
    let prec = base.iter().map(|p| p.precision()).max().unwrap_or(64);
    let n = base.len();
    // multiplier exponents in eighths of a binary power: m = 2^(e/8), e in [-24, 24]
    let apply = |exps: &[i64]| -> (Vec<Scalar>, Vec<Scalar>) {
        let mut params = Vec::with_capacity(n);
        let mut mults = Vec::with_capacity(n);
        for (p, &e) in base.iter().zip(exps) {
            let m = Scalar::two_pow(1, prec)
                .pow(&(&Scalar::from_i64(e, prec) / &Scalar::from_u64(8, prec)));
            params.push(p * &m);
            mults.push(m);
        }
        (params, mults)
    };
    let mut exps = vec![0i64; n];
    let mut evals = 0usize;
    let (params0, mults0) = apply(&exps);
    let mut best_margin = objective(&params0);
    evals += 1;
    if best_margin.is_positive() {
        return Ok(AdjustOutcome { params: params0, multipliers: mults0, margin: best_margin, evaluations: evals });
    }
    for step in [8i64, 4, 2, 1] {
        loop {
            let mut improved = false;
            for i in 0..n {
                let mut accepted = exps[i];
                for cand in [accepted - step, accepted + step] {
                    if !(-24..=24).contains(&cand) {
                        continue;
                    }
                    exps[i] = cand;
                    let (params, mults) = apply(&exps);
                    let margin = objective(&params);
                    evals += 1;
                    if margin > best_margin {
                        best_margin = margin.clone();
                        accepted = cand;
                        improved = true;
                        if best_margin.is_positive() {
                            return Ok(AdjustOutcome {
                                params,
                                multipliers: mults,
                                margin: best_margin,
                                evaluations: evals,
                            });
                        }
                    }
                }
                exps[i] = accepted;
            }
            if !improved {
                break;
            }
        }
    }
    Err(PolygonError::AdjustmentFailed { best_margin: best_margin.to_decimal_sig(12) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp2::translation_length;

    const P: usize = 320;

    fn s(f: f64) -> Scalar {
        Scalar::from_f64(f, P)
    }

    fn dec(v: &str) -> Scalar {
        Scalar::from_decimal(v, P).unwrap()
    }

    #[test]
    fn pentagon_sides_closed_forms() {
        // x = y = arcsinh(1): sinh = 1, cosh = sqrt 2, tanh = 1/sqrt 2
        let x = Scalar::one(P).asinh();
        let p = PentagonParams::new(x.clone(), x.clone()).unwrap();
        let sides = pentagon_sides(&p);
        let root2 = Scalar::from_u64(2, P).sqrt();
        let want0 = root2.asinh();
        let want2 = Scalar::from_u64(2, P).acosh();
        let tol = Scalar::two_pow(-280, P);
        assert!((&sides[0] - &want0).abs() < tol);
        assert!((&sides[1] - &x).abs() < tol);
        assert!((&sides[2] - &want2).abs() < tol);
        assert!((&sides[3] - &x).abs() < tol);
        assert!((&sides[4] - &want0).abs() < tol);
        // swapping x and y reverses the tuple
        let p2 = PentagonParams::new(s(0.25), s(0.75)).unwrap();
        let p2r = PentagonParams::new(s(0.75), s(0.25)).unwrap();
        let a = pentagon_sides(&p2);
        let b = pentagon_sides(&p2r);
        for k in 0..5 {
            assert!((&a[k] - &b[4 - k]).abs() < tol);
        }
        // nonpositive parameter rejected
        assert!(PentagonParams::new(s(0.0), s(1.0)).is_err());
    }

    #[test]
    fn pentagon_walk_closure() {
        // placing five right angles with pentagon_sides lengths returns to
        // the starting flag
        let p = PentagonParams::new(s(0.3), s(0.9)).unwrap();
        let sides = pentagon_sides(&p);
        let r = walk_pentagon(&Isometry::identity(P), &sides, P);
        assert!(r.is_ok());
        // a wrong tuple does not close
        let mut bad = sides.clone();
        bad[2] = &bad[2] + &s(0.1);
        assert!(walk_pentagon(&Isometry::identity(P), &bad, P).is_err());
    }

    #[test]
    fn hexagon_structure_and_frozen_lengths() {
        // x = 1e-4, y = 8e-4
        let x = dec("1e-4");
        let y = dec("8e-4");
        let hex = build_chain_polygon(2, &[x.clone(), y.clone(), x.clone()]).unwrap();
        assert_eq!(hex.side_count(), 6);
        // frozen oracle side lengths: (x, C+E, A, x, C+E, A)
        let long = dec("24.8584326686887299055539222122603221826315637220133818876074835260526744685551");
        let mid = dec("9.90348787336942564500960158359570060531375798312843341957883883764191892335231");
        let tol = Scalar::two_pow(-250, P);
        assert!((&hex.sides[0].length - &x).abs() < tol);
        assert!((&hex.sides[1].length - &long).abs() < tol);
        assert!((&hex.sides[2].length - &mid).abs() < tol);
        assert!((&hex.sides[3].length - &x).abs() < tol);
        assert!((&hex.sides[4].length - &long).abs() < tol);
        assert!((&hex.sides[5].length - &mid).abs() < tol);
        // chords 0-3, 1-4, 2-5; the seam chord 1-4 has length exactly y
        let chords = hex.enumerate_chords().unwrap();
        assert_eq!(chords.len(), 3);
        let find = |i: usize, j: usize| chords.iter().find(|c| c.side_i == i && c.side_j == j).unwrap();
        assert!((&find(1, 4).length - &y).abs() < Scalar::two_pow(-200, P));
        // paper asymptotics: chords are (2X+2Y, y, 2Y) + O(1) with |O(1)| < 3
        let big_x = -&x.ln();
        let big_y = -&y.ln();
        let two = s(2.0);
        let expect03 = &(&two * &big_x) + &(&two * &big_y);
        let expect25 = &two * &big_y;
        assert!((&find(0, 3).length - &expect03).abs() < s(3.0));
        assert!((&find(2, 5).length - &expect25).abs() < s(3.0));
        // edge asymptotics against the table (x, X+2Y, X, ...) + O(1) < 3
        assert!((&hex.sides[1].length - &(&big_x + &(&two * &big_y))).abs() < s(3.0));
        assert!((&hex.sides[2].length - &big_x).abs() < s(3.0));
        // parity classes
        assert_eq!(find(0, 3).parity_class, ParityClass::Mixed);
        assert_eq!(find(0, 3).lift_multiplicity(), 4);
    }

    #[test]
    fn hexagon_central_symmetry() {
        // params (x, y, x) give a centrally symmetric hexagon: the rotation
        // by pi about the midpoint of the seam chord 1-4 maps vertex j to
        // vertex j+3
        let x = s(0.2);
        let y = s(0.5);
        let hex = build_chain_polygon(2, &[x.clone(), y.clone(), x.clone()]).unwrap();
        let chords = hex.enumerate_chords().unwrap();
        let seam = chords.iter().find(|c| c.side_i == 1 && c.side_j == 4).unwrap();
        // midpoint of the seam segment in the seam's axis coordinates
        let to_axis = seam.geodesic.from_standard_axis();
        let inv = to_axis.inverse();
        let f1 = inv.apply_interior(&foot_on(&hex, seam, 1));
        let f2 = inv.apply_interior(&foot_on(&hex, seam, 4));
        let mid_t = &(&f1.y.ln() + &f2.y.ln()) / &s(2.0);
        let mover = to_axis.compose(&Isometry::translation(&mid_t));
        let rot = mover
            .compose(&Isometry::rotation_about_i(&Scalar::pi(P)))
            .compose(&mover.inverse());
        for j in 0..6 {
            let im = rot.apply_interior(&hex.vertices[j]);
            let target = &hex.vertices[(j + 3) % 6];
            let dist = im.dist(target);
            assert!(dist < Scalar::two_pow(-260, P), "vertex {j}: moved {dist:?}");
        }
    }

    // foot of the chord on side `side`: intersection with the side geodesic
    fn foot_on(p: &EmbeddedPolygon, c: &ChordRecord, side: usize) -> HPoint {
        let inv = p.sides[side].geodesic.from_standard_axis().inverse();
        let mapped = inv.apply_geodesic(&c.geodesic);
        let prod = -&(mapped.backward.coordinate() * mapped.forward.coordinate());
        let h = prod.sqrt();
        p.sides[side]
            .geodesic
            .from_standard_axis()
            .apply_interior(&HPoint::new(Scalar::zero(P), h))
    }

    #[test]
    fn chord_counts_follow_the_formula() {
        for g in 2..=6usize {
            let params: Vec<Scalar> = (0..2 * g - 1).map(|k| s(0.2 + 0.01 * k as f64)).collect();
            let poly = build_chain_polygon(g, &params).unwrap();
            assert_eq!(poly.side_count(), 2 * g + 2);
            let chords = poly.enumerate_chords().unwrap();
            assert_eq!(chords.len(), (g + 1) * (2 * g - 3), "genus {g}");
        }
    }

    #[test]
    fn reflection_length_duality() {
        // translation_length(r_i r_j) = 2 * chord length
        let poly = build_chain_polygon(2, &[s(0.3), s(0.6), s(0.4)]).unwrap();
        let gens = poly.reflection_generators();
        let reltol = Scalar::two_pow(32 - P as i64, P);
        for c in poly.enumerate_chords().unwrap() {
            let m = gens[c.side_i].compose(&gens[c.side_j]);
            let len = translation_length(&m).unwrap();
            let two_chord = &s(2.0) * &c.length;
            assert!((&(&len - &two_chord) / &two_chord).abs() < reltol);
        }
        // generators are involutions; adjacent products are rotations by pi
        let idn = Isometry::identity(P);
        let tol = Scalar::two_pow(-260, P);
        for g_ in &gens {
            assert!(g_.compose(g_).approx_eq_projective(&idn, &tol));
        }
        let adj = gens[0].compose(&gens[1]);
        assert!(adj.compose(&adj).approx_eq_projective(&idn, &Scalar::two_pow(-250, P)));
    }

    #[test]
    fn label_equivariance_under_shifts() {
        let poly0 = build_chain_polygon(2, &[s(0.3), s(0.6), s(0.4)]).unwrap();
        let sys0 = poly0.labelled_length_system().unwrap();
        let poly1 = build_chain_polygon(2, &[s(0.3), s(0.6), s(0.4)]).unwrap().with_shift(1);
        let sys1 = poly1.labelled_length_system().unwrap();
        // length of label l under shift 1 equals length of label l-1 under shift 0
        for (label, len) in &sys1 {
            if let CurveLabel::Edge(l) = label {
                let prev = CurveLabel::Edge((l + 5) % 6);
                let base = sys0.iter().find(|(k, _)| *k == prev).unwrap();
                assert!((len - &base.1).is_zero());
            }
        }
        // parity class is shift-invariant: chord labels keep their parity
        let poly2 = build_chain_polygon(2, &[s(0.3), s(0.6), s(0.4)]).unwrap().with_shift(2);
        for c in poly2.enumerate_chords().unwrap() {
            assert_eq!((c.side_j - c.side_i) % 2 == 0, c.parity_class == ParityClass::Same);
        }
    }

    #[test]
    fn hexagon_asymptotic_ratios() {
        // as x -> 0 with y = delta x: (edge-2 length)/|log x| -> 1 and
        // (chord 0-3 length)/|log x| -> 4
        let mut prev_edge_ratio: Option<f64> = None;
        let mut prev_chord_ratio: Option<f64> = None;
        for exp in [3, 5, 7] {
            let x = Scalar::from_decimal(&format!("1e-{exp}"), P).unwrap();
            let y = &x * &s(8.0);
            let hex = build_chain_polygon(2, &[x.clone(), y, x.clone()]).unwrap();
            let big_x = (-&x.ln()).to_f64();
            let e2 = hex.sides[2].length.to_f64() / big_x;
            let c03 = hex
                .enumerate_chords()
                .unwrap()
                .iter()
                .find(|c| c.side_i == 0 && c.side_j == 3)
                .unwrap()
                .length
                .to_f64()
                / big_x;
            if let (Some(pe), Some(pc)) = (prev_edge_ratio, prev_chord_ratio) {
                assert!((e2 - 1.0).abs() < (pe - 1.0).abs());
                assert!((c03 - 4.0).abs() < (pc - 4.0).abs());
            }
            prev_edge_ratio = Some(e2);
            prev_chord_ratio = Some(c03);
        }
        assert!((prev_edge_ratio.unwrap() - 1.0).abs() < 0.05);
        assert!((prev_chord_ratio.unwrap() - 4.0).abs() < 0.2);
    }

    #[test]
    fn adjust_noop_when_satisfied() {
        let base = vec![s(1.0), s(2.0)];
        let mut objective = |_: &[Scalar]| s(1.0);
        let out = multiplicative_adjust(&base, &mut objective).unwrap();
        assert_eq!(out.evaluations, 1);
        for m in &out.multipliers {
            assert!((m - &Scalar::one(P)).is_zero());
        }
    }

    #[test]
    fn adjust_finds_a_feasible_box_point() {
        // satisfied iff first param in (3, 5) and second in (0.1, 0.2)
        let base = vec![s(1.0), s(1.0)];
        let mut objective = |p: &[Scalar]| {
            let a = p[0].to_f64();
            let b = p[1].to_f64();
            let m1 = (a - 3.0).min(5.0 - a);
            let m2 = (b - 0.1).min(0.2 - b);
            s(m1.min(m2))
        };
        let out = multiplicative_adjust(&base, &mut objective).unwrap();
        assert!(out.margin.is_positive());
        let a = out.params[0].to_f64();
        let b = out.params[1].to_f64();
        assert!(a > 3.0 && a < 5.0 && b > 0.1 && b < 0.2);
    }

    #[test]
    fn adjust_reports_infeasible_objectives() {
        let base = vec![s(1.0)];
        let mut objective = |p: &[Scalar]| -&(&p[0].abs() + &s(1.0));
        match multiplicative_adjust(&base, &mut objective) {
            Err(PolygonError::AdjustmentFailed { .. }) => {}
            other => panic!("expected AdjustmentFailed, got {other:?}"),
        }
    }
}
