//! Multi-length vectors, projectivization, 2D convex hulls with facet
//! functionals, and azimuthality certificates.
//!
//! A facet functional Ω = Σ cᵢeᵢ* is azimuthal when exactly one coefficient
//! is negative and Σ cᵢ > 0: its nonnegative half-space then contains all but
//! one corner ray of the Weyl chamber and the central ray in its interior.
//! Hulls are computed for d = 3 only, by a monotone chain over the affine
//! chart (b₂, b₃) with sign decisions at an explicit collinearity tolerance.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConeError {
    #[error("cannot projectivize the zero vector")]
    ZeroVector,
    #[error("hull is degenerate (fewer than 3 vertices)")]
    DegenerateHull,
    #[error("hulls are implemented for d = 3 only (got d = {0})")]
    UnsupportedDimension(usize),
    #[error("multi-length coordinates must be nonnegative")]
    NegativeCoordinate,
}

/// A vector of translation lengths, one per representation component.
#[derive(Clone, Debug)]
pub struct MultiLength {
    pub coords: Vec<Scalar>,
}

impl MultiLength {
    pub fn new(coords: Vec<Scalar>) -> Result<Self, ConeError> {
        if coords.iter().any(|c| c.is_negative()) {
            return Err(ConeError::NegativeCoordinate);
        }
        Ok(MultiLength { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// A point of the projectivized Weyl chamber in barycentric coordinates
/// (nonnegative, summing to 1).
#[derive(Clone, Debug)]
pub struct SimplexPoint {
    pub bary: Vec<Scalar>,
}

impl SimplexPoint {
    pub fn precision(&self) -> usize {
        self.bary.iter().map(|b| b.precision()).max().unwrap_or(crate::scalar::MIN_PRECISION)
    }

    /// Coordinates in the equilateral-triangle chart (d = 3).
    pub fn chart(&self) -> [Scalar; 2] {
        let prec = self.precision();
        let two = Scalar::from_u64(2, prec);
        let half = &Scalar::one(prec) / &two;
        let s3h = &Scalar::from_u64(3, prec).sqrt() / &two;
        [&self.bary[1] + &(&self.bary[2] * &half), &self.bary[2] * &s3h]
    }

    pub fn dist_linf(&self, other: &SimplexPoint) -> Scalar {
        let mut best = Scalar::zero(self.precision());
        for (a, b) in self.bary.iter().zip(&other.bary) {
            let d = (a - b).abs();
            if d > best {
                best = d;
            }
        }
        best
    }
}

/// v / Σv.
pub fn projectivize(v: &MultiLength) -> Result<SimplexPoint, ConeError> {
    let prec = v.coords.iter().map(|c| c.precision()).max().unwrap_or(64);
    let mut sum = Scalar::zero(prec);
    for c in &v.coords {
        sum = &sum + c;
    }
    if !sum.is_positive() {
        return Err(ConeError::ZeroVector);
    }
    Ok(SimplexPoint { bary: v.coords.iter().map(|c| c / &sum).collect() })
}

/// Coefficients of a linear form Σ cᵢeᵢ*, stored with largest |cᵢ| = 1.
#[derive(Clone, Debug)]
pub struct Functional {
    pub c: Vec<Scalar>,
}

impl Functional {
    /// Normalizes so the largest |coefficient| is 1; rejects the zero form.
    pub fn new(c: Vec<Scalar>) -> Option<Self> {
        let mut mx: Option<Scalar> = None;
        for ci in &c {
            let a = ci.abs();
            if mx.as_ref().map_or(true, |m| a > *m) {
                mx = Some(a);
            }
        }
        let mx = mx?;
        if mx.is_zero() {
            return None;
        }
        Some(Functional { c: c.iter().map(|ci| ci / &mx).collect() })
    }

    pub fn eval(&self, p: &SimplexPoint) -> Scalar {
        let prec = p.precision();
        let mut acc = Scalar::zero(prec);
        for (ci, bi) in self.c.iter().zip(&p.bary) {
            acc = &acc + &(ci * bi);
        }
        acc
    }
}

/// Exactly one negative coefficient, the rest ≥ 0, and positive sum.
/// All-nonnegative functionals are supporting but not azimuthal.
pub fn azimuthal(f: &Functional) -> bool {
    let neg = f.c.iter().filter(|c| c.is_negative()).count();
    if neg != 1 {
        return false;
    }
    let prec = f.c.iter().map(|c| c.precision()).max().unwrap_or(64);
    let mut sum = Scalar::zero(prec);
    for c in &f.c {
        sum = &sum + c;
    }
    sum.is_positive()
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// Indices into the certificate's vertex list.
    pub v0: usize,
    pub v1: usize,
    pub functional: Functional,
    pub azimuthal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Partial,
}

/// Ordered hull vertices, per-facet supporting functionals, and the
/// azimuthality verdict.
#[derive(Clone, Debug)]
pub struct HullCertificate {
    pub vertices: Vec<SimplexPoint>,
    /// Index of the input point realizing each vertex.
    pub sources: Vec<usize>,
    pub facets: Vec<Facet>,
    pub verdict: Verdict,
}

fn orient(p: &[Scalar; 2], q: &[Scalar; 2], r: &[Scalar; 2]) -> Scalar {
    let ux = &q[0] - &p[0];
    let uy = &q[1] - &p[1];
    let vx = &r[0] - &p[0];
    let vy = &r[1] - &p[1];
    &(&ux * &vy) - &(&uy * &vx)
}

/// Convex hull of projectivized points (d = 3), with facet functionals
/// computed but azimuthality not yet evaluated (`certify` does that).
/// Collinear points within `collinearity_tol` are merged into facets.
pub fn convex_hull(
    points: &[SimplexPoint],
    collinearity_tol: &Scalar,
) -> Result<HullCertificate, ConeError> {
    if points.is_empty() {
        return Err(ConeError::DegenerateHull);
    }
    let d = points[0].bary.len();
    if d != 3 {
        return Err(ConeError::UnsupportedDimension(d));
    }
    // chart (b2, b3); ccw in this chart is ccw in the equilateral chart
    let charted: Vec<(usize, [Scalar; 2])> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, [p.bary[1].clone(), p.bary[2].clone()]))
        .collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&charted[i].1, &charted[j].1);
        a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap())
    });
    // drop exact-duplicate chart points (keep the first in sorted order)
    let mut uniq: Vec<usize> = Vec::with_capacity(order.len());
    for &i in &order {
        if let Some(&j) = uniq.last() {
            let same = (&charted[i].1[0] - &charted[j].1[0]).is_zero()
                && (&charted[i].1[1] - &charted[j].1[1]).is_zero();
            if same {
                continue;
            }
        }
        uniq.push(i);
    }
    let chain = |iter: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut h: Vec<usize> = Vec::new();
        for i in iter {
            while h.len() >= 2 {
                let o = orient(
                    &charted[h[h.len() - 2]].1,
                    &charted[h[h.len() - 1]].1,
                    &charted[i].1,
                );
                if o <= *collinearity_tol {
                    h.pop();
                } else {
                    break;
                }
            }
            h.push(i);
        }
        h
    };
    let lower = chain(&mut uniq.iter().copied());
    let upper = chain(&mut uniq.iter().rev().copied());
    let mut cycle: Vec<usize> = Vec::new();
    cycle.extend_from_slice(&lower[..lower.len().saturating_sub(1)]);
    cycle.extend_from_slice(&upper[..upper.len().saturating_sub(1)]);
    if cycle.is_empty() {
        cycle = vec![uniq[0]];
    }
    let vertices: Vec<SimplexPoint> = cycle.iter().map(|&i| points[i].clone()).collect();
    let sources = cycle;
    if vertices.len() < 3 {
        return Ok(HullCertificate { vertices, sources, facets: Vec::new(), verdict: Verdict::Partial });
    }
    // facet functionals: cross product of consecutive vertex rays, signed
    // nonnegative on the hull
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
        let mut at_centroid = Scalar::zero(prec);
        for k in 0..3 {
            at_centroid = &at_centroid + &(&c[k] * &centroid[k]);
        }
        if at_centroid.is_negative() {
            for ck in &mut c {
                *ck = -&*ck;
            }
        }
        let functional = Functional::new(c).expect("hull edge spans two distinct rays");
        facets.push(Facet { v0: i, v1: (i + 1) % n, functional, azimuthal: false });
    }
    Ok(HullCertificate { vertices, sources, facets, verdict: Verdict::Partial })
}

/// Default hull collinearity tolerance 2^(−precision/2).
pub fn default_collinearity_tol(prec: usize) -> Scalar {
    Scalar::two_pow(-((prec / 2) as i64), prec)
}

/// Evaluates azimuthality of every facet; the verdict becomes `Certified`
/// exactly when the hull is nondegenerate and every facet is azimuthal.
pub fn certify(mut hull: HullCertificate) -> HullCertificate {
    let mut all = !hull.facets.is_empty();
    for f in &mut hull.facets {
        f.azimuthal = azimuthal(&f.functional);
        all &= f.azimuthal;
    }
    hull.verdict = if all && hull.vertices.len() >= 3 { Verdict::Certified } else { Verdict::Partial };
    hull
}

/// Where a queried point sits relative to a hull.
#[derive(Clone, Debug)]
pub enum Containment {
    Inside,
    Boundary,
    Outside { margin: Scalar },
}

/// Sign of every facet functional at `p`, with margin reporting.
pub fn contains(
    hull: &HullCertificate,
    p: &SimplexPoint,
    tol: &Scalar,
) -> Result<Containment, ConeError> {
    if hull.vertices.len() < 3 {
        return Err(ConeError::DegenerateHull);
    }
    let mut min_val: Option<Scalar> = None;
    for f in &hull.facets {
        let v = f.functional.eval(p);
        if min_val.as_ref().map_or(true, |m| v < *m) {
            min_val = Some(v);
        }
    }
    let m = min_val.expect("nondegenerate hull has facets");
    if m < -&tol.clone() {
        Ok(Containment::Outside { margin: -&m })
    } else if m <= *tol {
        Ok(Containment::Boundary)
    } else {
        Ok(Containment::Inside)
    }
}

/// Exterior angles (equilateral chart) at each hull vertex, in cycle order.
pub fn hull_vertex_angles(hull: &HullCertificate) -> Vec<Scalar> {
    let n = hull.vertices.len();
    if n < 3 {
        return Vec::new();
    }
    let charts: Vec<[Scalar; 2]> = hull.vertices.iter().map(|v| v.chart()).collect();
    (0..n)
        .map(|i| {
            let pm = &charts[(i + n - 1) % n];
            let p0 = &charts[i];
            let pp = &charts[(i + 1) % n];
            let v1 = [&p0[0] - &pm[0], &p0[1] - &pm[1]];
            let v2 = [&pp[0] - &p0[0], &pp[1] - &p0[1]];
            let cross = &(&v1[0] * &v2[1]) - &(&v1[1] * &v2[0]);
            let dot = &(&v1[0] * &v2[0]) + &(&v1[1] * &v2[1]);
            cross.atan2(&dot)
        })
        .collect()
}

/// Classification of an input point against the hull of the whole input set.
#[derive(Clone, Debug)]
pub enum Extremality {
    /// A hull vertex; the exterior angle (in the equilateral chart) is
    /// positive exactly when the supporting line is nonunique.
    Vertex { exterior_angle: Scalar },
    EdgeInterior,
    Interior,
}

/// Classifies every input point against the hull of all inputs.
pub fn extremality_report(
    points: &[SimplexPoint],
    collinearity_tol: &Scalar,
) -> Result<Vec<Extremality>, ConeError> {
    if points.len() < 3 {
        return Err(ConeError::DegenerateHull);
    }
    let hull = convex_hull(points, collinearity_tol)?;
    if hull.vertices.len() < 3 {
        return Err(ConeError::DegenerateHull);
    }
    let n = hull.vertices.len();
    let charts: Vec<[Scalar; 2]> = hull.vertices.iter().map(|v| v.chart()).collect();
    let mut vertex_angle: Vec<Scalar> = Vec::with_capacity(n);
    for i in 0..n {
        let pm = &charts[(i + n - 1) % n];
        let p0 = &charts[i];
        let pp = &charts[(i + 1) % n];
        let v1 = [&p0[0] - &pm[0], &p0[1] - &pm[1]];
        let v2 = [&pp[0] - &p0[0], &pp[1] - &p0[1]];
        let cross = &(&v1[0] * &v2[1]) - &(&v1[1] * &v2[0]);
        let dot = &(&v1[0] * &v2[0]) + &(&v1[1] * &v2[1]);
        vertex_angle.push(cross.atan2(&dot));
    }
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let mut class = None;
        for (i, v) in hull.vertices.iter().enumerate() {
            if p.dist_linf(v) <= *collinearity_tol {
                class = Some(Extremality::Vertex { exterior_angle: vertex_angle[i].clone() });
                break;
            }
        }
        if class.is_none() {
            let on_edge = hull
                .facets
                .iter()
                .any(|f| f.functional.eval(p).abs() <= *collinearity_tol);
            class = Some(if on_edge { Extremality::EdgeInterior } else { Extremality::Interior });
        }
        out.push(class.unwrap());
    }
    Ok(out)
}

/// One trial of the azimuthal slack inequality: for Ω azimuthal with
/// negative coefficient at i₀, σ ∈ (0,1)³, X = (−log σᵢ), X′ = (−log(1−σᵢ)),
/// c = Ω(1,1,1):  Ω(X) ≥ c·X_{i0}  or  Ω(X′) ≥ c·X′_{i0}.
/// Evaluates in f64 and reverifies near-ties at 256 bits.
pub fn azimuthal_slack_inequality(omega: &[f64; 3], sigma: &[f64; 3]) -> bool {
    debug_assert!(omega.iter().filter(|c| **c < 0.0).count() == 1);
    let i0 = omega.iter().position(|c| *c < 0.0).expect("one negative coefficient");
    let c: f64 = omega.iter().sum();
    debug_assert!(c > 0.0);
    let x: Vec<f64> = sigma.iter().map(|s| -s.ln()).collect();
    let xp: Vec<f64> = sigma.iter().map(|s| -(1.0 - s).ln()).collect();
    let omx: f64 = omega.iter().zip(&x).map(|(o, v)| o * v).sum();
    let omxp: f64 = omega.iter().zip(&xp).map(|(o, v)| o * v).sum();
    let m1 = omx - c * x[i0];
    let m2 = omxp - c * xp[i0];
    let scale = omx.abs() + omxp.abs() + 1.0;
    if m1.max(m2) > 1e-9 * scale {
        return true;
    }
    if m1.max(m2) < -1e-9 * scale {
        return false;
    }
    // near-tie: recheck at high precision
    let prec = 256;
    let sg: Vec<Scalar> = sigma.iter().map(|s| Scalar::from_f64(*s, prec)).collect();
    let om: Vec<Scalar> = omega.iter().map(|o| Scalar::from_f64(*o, prec)).collect();
    let one = Scalar::one(prec);
    let xs: Vec<Scalar> = sg.iter().map(|s| -&s.ln()).collect();
    let xps: Vec<Scalar> = sg.iter().map(|s| -&(&one - s).ln()).collect();
    let dot = |v: &[Scalar]| {
        let mut acc = Scalar::zero(prec);
        for (o, t) in om.iter().zip(v) {
            acc = &acc + &(o * t);
        }
        acc
    };
    let mut csum = Scalar::zero(prec);
    for o in &om {
        csum = &csum + o;
    }
    let h1 = &dot(&xs) - &(&csum * &xs[i0]);
    let h2 = &dot(&xps) - &(&csum * &xps[i0]);
    !h1.is_negative() || !h2.is_negative()
}
