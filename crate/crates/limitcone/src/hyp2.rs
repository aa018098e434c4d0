//! Upper half-plane hyperbolic geometry.
//!
//! The model is fixed: H² is the upper half-plane, its boundary is P¹ℝ with
//! ∞ represented projectively as (1, 0). Isometries are 2×2 real matrices of
//! determinant ±1; orientation-reversing elements act as z ↦ (a z̄ + b)/(c z̄ + d).
//! All operations are pure and all types immutable.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Hyp2Error {
    #[error("isometry is not hyperbolic (|tr| <= 2)")]
    NonHyperbolic,
    #[error("isometry is orientation-reversing")]
    OrientationReversing,
    #[error("degenerate boundary configuration")]
    Degenerate,
    #[error("geodesics cross")]
    Crossing,
    #[error("geodesics share an endpoint")]
    Asymptotic,
    #[error("resolution {0} is not hyperbolic (cosh value < 1)")]
    NonHyperbolicResolution(usize),
}

/// A point of P¹ℝ as a projective pair (u, v), canonicalized to v = 1 for
/// finite points and (1, 0) for the point at infinity.
#[derive(Clone, Debug)]
pub struct BoundaryPoint {
    u: Scalar,
    v: Scalar,
}

impl BoundaryPoint {
    pub fn finite(u: Scalar) -> Self {
        let prec = u.precision();
        BoundaryPoint { u, v: Scalar::one(prec) }
    }

    pub fn infinity(prec: usize) -> Self {
        BoundaryPoint { u: Scalar::one(prec), v: Scalar::zero(prec) }
    }

    /// Canonicalizes an arbitrary projective pair; (0, 0) is rejected.
    pub fn from_pair(u: Scalar, v: Scalar) -> Result<Self, Hyp2Error> {
        if u.is_zero() && v.is_zero() {
            return Err(Hyp2Error::Degenerate);
        }
        if v.is_zero() {
            Ok(BoundaryPoint::infinity(u.precision()))
        } else {
            Ok(BoundaryPoint::finite(&u / &v))
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.v.is_zero()
    }

    /// Finite coordinate; panics on the point at infinity.
    pub fn coordinate(&self) -> &Scalar {
        assert!(!self.is_infinity(), "coordinate of the point at infinity");
        &self.u
    }

    pub fn precision(&self) -> usize {
        self.u.precision()
    }

    /// `u_a v_b - v_a u_b`; vanishes exactly when the points coincide.
    pub fn det(&self, other: &BoundaryPoint) -> Scalar {
        &(&self.u * &other.v) - &(&self.v * &other.u)
    }

    /// Equality at the boundary tolerance 2^(16-precision).
    pub fn approx_eq(&self, other: &BoundaryPoint) -> bool {
        match (self.is_infinity(), other.is_infinity()) {
            (true, true) => true,
            (true, false) | (false, true) => false,
            (false, false) => {
                let prec = self.precision().min(other.precision());
                let tol = Scalar::two_pow(16 - prec as i64, prec);
                (&self.u - &other.u).abs() <= tol
            }
        }
    }
}

/// A point of the upper half-plane.
#[derive(Clone, Debug)]
pub struct HPoint {
    pub x: Scalar,
    pub y: Scalar,
}

impl HPoint {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        assert!(y.is_positive(), "point must lie in the upper half-plane");
        HPoint { x, y }
    }

    pub fn i(prec: usize) -> Self {
        HPoint::new(Scalar::zero(prec), Scalar::one(prec))
    }

    /// Hyperbolic distance.
    pub fn dist(&self, other: &HPoint) -> Scalar {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        let prec = dx.precision().max(dy.precision());
        let num = &(&dx * &dx) + &(&dy * &dy);
        let yy = &self.y * &other.y;
        let den = &yy + &yy;
        let arg = &Scalar::one(prec) + &(&num / &den);
        arg.acosh()
    }
}

/// An oriented geodesic given by its ordered pair of ideal endpoints.
#[derive(Clone, Debug)]
pub struct OrientedGeodesic {
    pub backward: BoundaryPoint,
    pub forward: BoundaryPoint,
}

impl OrientedGeodesic {
    pub fn new(backward: BoundaryPoint, forward: BoundaryPoint) -> Result<Self, Hyp2Error> {
        if backward.det(&forward).is_zero() {
            return Err(Hyp2Error::Degenerate);
        }
        Ok(OrientedGeodesic { backward, forward })
    }

    /// Convenience constructor; `f64::INFINITY` stands for the point at infinity.
    pub fn from_f64(b: f64, f: f64, prec: usize) -> Self {
        let mk = |t: f64| {
            if t.is_infinite() {
                BoundaryPoint::infinity(prec)
            } else {
                BoundaryPoint::finite(Scalar::from_f64(t, prec))
            }
        };
        OrientedGeodesic::new(mk(b), mk(f)).expect("distinct endpoints")
    }

    pub fn reversed(&self) -> Self {
        OrientedGeodesic { backward: self.forward.clone(), forward: self.backward.clone() }
    }

    pub fn precision(&self) -> usize {
        self.backward.precision().max(self.forward.precision())
    }

    /// An orientation-preserving isometry taking the standard axis (0, ∞)
    /// to this geodesic.
    pub fn from_standard_axis(&self) -> Isometry {
        let prec = self.precision();
        let one = Scalar::one(prec);
        let zero = Scalar::zero(prec);
        match (self.backward.is_infinity(), self.forward.is_infinity()) {
            (true, true) => unreachable!("endpoints distinct"),
            (false, true) => {
                // z + p
                let p = self.backward.coordinate().clone();
                Isometry::new([[one.clone(), p], [zero, one]])
            }
            (true, false) => {
                // (q z - 1) / z
                let q = self.forward.coordinate().clone();
                Isometry::new([[q, -&one], [one, zero]])
            }
            (false, false) => {
                let p = self.backward.coordinate().clone();
                let q = self.forward.coordinate().clone();
                if q > p {
                    // (q z + p) / (z + 1)
                    Isometry::new([[q, p], [one.clone(), one]])
                } else {
                    // (q z - p) / (z - 1)
                    Isometry::new([[q, -&p], [one.clone(), -&one]])
                }
            }
        }
    }

    /// The point at signed parameter `t` along the geodesic (the image of
    /// i·e^t under the standard parametrization).
    pub fn point_at(&self, t: &Scalar) -> HPoint {
        let m = self.from_standard_axis();
        let prec = self.precision().max(t.precision());
        m.apply_interior(&HPoint::new(Scalar::zero(prec), t.exp()))
    }
}

/// An isometry of H²: a real 2×2 matrix normalized to |det| = 1, together
/// with the sign of its determinant. It is identified with its negation.
#[derive(Clone)]
pub struct Isometry {
    m: [[Scalar; 2]; 2],
    orientation: i8,
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Isometry[[{:?}, {:?}], [{:?}, {:?}]] or={}",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1], self.orientation
        )
    }
}

impl Isometry {
    /// Normalizes the matrix to |det| = 1; panics on a singular matrix.
    pub fn new(m: [[Scalar; 2]; 2]) -> Self {
        let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
        assert!(!det.is_zero(), "singular matrix is not an isometry");
        let orientation = if det.is_positive() { 1 } else { -1 };
        let scale = det.abs().sqrt();
        let n = m.map(|row| row.map(|e| &e / &scale));
        Isometry { m: n, orientation }
    }

    pub fn identity(prec: usize) -> Self {
        let one = Scalar::one(prec);
        let zero = Scalar::zero(prec);
        Isometry::new([[one.clone(), zero.clone()], [zero, one]])
    }

    /// Translation by `t` along the standard axis (0, ∞).
    pub fn translation(t: &Scalar) -> Self {
        let prec = t.precision();
        let half = t / &Scalar::from_u64(2, prec);
        let e = half.exp();
        let zero = Scalar::zero(prec);
        Isometry::new([[e.clone(), zero.clone()], [zero, &Scalar::one(prec) / &e]])
    }

    /// Rotation by angle `theta` (counterclockwise) about the point i.
    pub fn rotation_about_i(theta: &Scalar) -> Self {
        let prec = theta.precision();
        let half = theta / &Scalar::from_u64(2, prec);
        let c = half.cos();
        let s = half.sin();
        Isometry::new([[c.clone(), s.clone()], [-&s, c]])
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn entries(&self) -> &[[Scalar; 2]; 2] {
        &self.m
    }

    pub fn trace(&self) -> Scalar {
        &self.m[0][0] + &self.m[1][1]
    }

    pub fn determinant(&self) -> Scalar {
        &(&self.m[0][0] * &self.m[1][1]) - &(&self.m[0][1] * &self.m[1][0])
    }

    /// Matrix product; entries are real, so the composed action is the
    /// product matrix with multiplied orientation signs.
    pub fn compose(&self, rhs: &Isometry) -> Isometry {
        let a = &self.m;
        let b = &rhs.m;
        // |det| drifts from 1 only at ulp scale per product, far below the
        // 2^(16-precision) normalization bound, so no renormalization here
        let out = [
            [
                &(&a[0][0] * &b[0][0]) + &(&a[0][1] * &b[1][0]),
                &(&a[0][0] * &b[0][1]) + &(&a[0][1] * &b[1][1]),
            ],
            [
                &(&a[1][0] * &b[0][0]) + &(&a[1][1] * &b[1][0]),
                &(&a[1][0] * &b[0][1]) + &(&a[1][1] * &b[1][1]),
            ],
        ];
        Isometry { m: out, orientation: self.orientation * rhs.orientation }
    }

    pub fn inverse(&self) -> Isometry {
        let [[a, b], [c, d]] = &self.m;
        let m = if self.orientation == 1 {
            [[d.clone(), -b], [-c, a.clone()]]
        } else {
            [[-d, b.clone()], [c.clone(), -a]]
        };
        Isometry { m, orientation: self.orientation }
    }

    /// Projective action on the boundary circle P¹ℝ.
    pub fn apply_boundary(&self, p: &BoundaryPoint) -> BoundaryPoint {
        let u = &(&self.m[0][0] * &p.u) + &(&self.m[0][1] * &p.v);
        let v = &(&self.m[1][0] * &p.u) + &(&self.m[1][1] * &p.v);
        BoundaryPoint::from_pair(u, v).expect("isometries are injective on the boundary")
    }

    pub fn apply_geodesic(&self, l: &OrientedGeodesic) -> OrientedGeodesic {
        OrientedGeodesic {
            backward: self.apply_boundary(&l.backward),
            forward: self.apply_boundary(&l.forward),
        }
    }

    /// Action on an interior point (conjugating first when orientation-reversing).
    pub fn apply_interior(&self, z: &HPoint) -> HPoint {
        let y = if self.orientation == 1 { z.y.clone() } else { -&z.y };
        let [[a, b], [c, d]] = &self.m;
        let rx = &(a * &z.x) + b;
        let ry = a * &y;
        let sx = &(c * &z.x) + d;
        let sy = c * &y;
        let den = &(&sx * &sx) + &(&sy * &sy);
        let wx = &(&(&rx * &sx) + &(&ry * &sy)) / &den;
        let wy = &(&(&ry * &sx) - &(&rx * &sy)) / &den;
        HPoint::new(wx, wy)
    }

    /// Entrywise comparison up to a global sign, same orientation.
    pub fn approx_eq_projective(&self, rhs: &Isometry, tol: &Scalar) -> bool {
        if self.orientation != rhs.orientation {
            return false;
        }
        let close = |sign: i8| {
            self.m.iter().flatten().zip(rhs.m.iter().flatten()).all(|(a, b)| {
                let b = if sign == 1 { b.clone() } else { -b };
                (a - &b).abs() <= *tol
            })
        };
        close(1) || close(-1)
    }
}

/// Translation length 2·arccosh(|tr|/2) of a hyperbolic isometry.
pub fn translation_length(m: &Isometry) -> Result<Scalar, Hyp2Error> {
    if m.orientation() != 1 {
        return Err(Hyp2Error::OrientationReversing);
    }
    let t = m.trace().abs();
    let prec = t.precision();
    let two = Scalar::from_u64(2, prec);
    if t <= two {
        return Err(Hyp2Error::NonHyperbolic);
    }
    Ok(&two * &(&t / &two).acosh())
}

/// Oriented translation axis (repelling, attracting) of a hyperbolic isometry.
pub fn axis(m: &Isometry) -> Result<OrientedGeodesic, Hyp2Error> {
    if m.orientation() != 1 {
        return Err(Hyp2Error::OrientationReversing);
    }
    let tr = m.trace();
    let prec = tr.precision();
    let two = Scalar::from_u64(2, prec);
    if tr.abs() <= two {
        return Err(Hyp2Error::NonHyperbolic);
    }
    // normalize the lift so the trace is positive: eigenvalues lam+ > 1 > lam- > 0
    let flip = tr.is_negative();
    let e = |i: usize, j: usize| -> Scalar {
        if flip {
            -&m.m[i][j]
        } else {
            m.m[i][j].clone()
        }
    };
    let t = tr.abs();
    let disc = (&(&t * &t) - &Scalar::from_u64(4, prec)).sqrt();
    let lam_plus = &(&t + &disc) / &two;
    let lam_minus = &Scalar::one(prec) / &lam_plus;
    let (a, b, c, d) = (e(0, 0), e(0, 1), e(1, 0), e(1, 1));
    if c.is_zero() {
        // fixed points: infinity (eigenvalue a) and b/(d-a) (eigenvalue d)
        let other = BoundaryPoint::finite(&b / &(&d - &a));
        let inf = BoundaryPoint::infinity(prec);
        if a > d {
            OrientedGeodesic::new(other, inf)
        } else {
            OrientedGeodesic::new(inf, other)
        }
    } else {
        let attracting = BoundaryPoint::finite(&(&lam_plus - &d) / &c);
        let repelling = BoundaryPoint::finite(&(&lam_minus - &d) / &c);
        OrientedGeodesic::new(repelling, attracting)
    }
}

/// Cross ratio [a : b : c : d], normalized so that [∞ : 0 : 1 : t] = t.
pub fn cross_ratio(
    a: &BoundaryPoint,
    b: &BoundaryPoint,
    c: &BoundaryPoint,
    d: &BoundaryPoint,
) -> Result<Scalar, Hyp2Error> {
    if a.det(b).is_zero() || c.det(d).is_zero() {
        return Err(Hyp2Error::Degenerate);
    }
    let num = &a.det(c) * &b.det(d);
    let den = &a.det(d) * &b.det(c);
    if den.is_zero() {
        return Err(Hyp2Error::Degenerate);
    }
    Ok(&num / &den)
}

/// Asymptotic slack log |[x⁻ : y⁻ : x⁺ : y⁺]| of two flow lines.
pub fn asymptotic_slack(l: &OrientedGeodesic, lp: &OrientedGeodesic) -> Result<Scalar, Hyp2Error> {
    for (p, q) in [
        (&l.backward, &lp.backward),
        (&l.backward, &lp.forward),
        (&l.forward, &lp.backward),
        (&l.forward, &lp.forward),
    ] {
        if p.det(q).is_zero() {
            return Err(Hyp2Error::Degenerate);
        }
    }
    let cr = cross_ratio(&l.backward, &lp.backward, &l.forward, &lp.forward)?;
    Ok(cr.abs().ln())
}

fn cyclic_sign(p: &BoundaryPoint, q: &BoundaryPoint, r: &BoundaryPoint) -> i8 {
    let v = &(&p.det(q) * &q.det(r)) * &r.det(p);
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// True when the unoriented geodesics cross (endpoints interleave on P¹ℝ).
pub fn crosses(l: &OrientedGeodesic, lp: &OrientedGeodesic) -> bool {
    let s1 = cyclic_sign(&l.backward, &lp.backward, &l.forward);
    let s2 = cyclic_sign(&l.backward, &lp.forward, &l.forward);
    s1 != 0 && s2 != 0 && s1 != s2
}

/// Crossing angle θ ∈ (0, π) of two crossing flow lines, or `None` when they
/// do not cross. Satisfies X(l, lp) = −log cos²(θ/2) and
/// X(l, −lp) = −log sin²(θ/2).
pub fn crossing_angle(
    l: &OrientedGeodesic,
    lp: &OrientedGeodesic,
) -> Result<Option<Scalar>, Hyp2Error> {
    let x = asymptotic_slack(l, lp)?;
    if !crosses(l, lp) {
        return Ok(None);
    }
    let prec = x.precision();
    // cos²(θ/2) = e^(-X); clamp rounding residue at the domain boundary
    let sigma = (-&x).exp().min(&Scalar::one(prec));
    let theta = &Scalar::from_u64(2, prec) * &sigma.sqrt().acos();
    Ok(Some(theta))
}

/// Common perpendicular of two disjoint, non-asymptotic geodesics, oriented
/// from its foot on `l` to its foot on `lp`, with the distance between the lines.
pub fn common_perpendicular(
    l: &OrientedGeodesic,
    lp: &OrientedGeodesic,
) -> Result<(OrientedGeodesic, Scalar), Hyp2Error> {
    for (p, q) in [
        (&l.backward, &lp.backward),
        (&l.backward, &lp.forward),
        (&l.forward, &lp.backward),
        (&l.forward, &lp.forward),
    ] {
        if p.approx_eq(q) {
            return Err(Hyp2Error::Asymptotic);
        }
    }
    if crosses(l, lp) {
        return Err(Hyp2Error::Crossing);
    }
    // product of the two reflections translates along the perpendicular by 2L
    let m = reflection(lp).compose(&reflection(l));
    let prec = l.precision().max(lp.precision());
    let length = &translation_length(&m)? / &Scalar::from_u64(2, prec);
    let perp = axis(&m)?;
    Ok((perp, length))
}

/// Orientation-reversing involution fixing the geodesic pointwise.
pub fn reflection(l: &OrientedGeodesic) -> Isometry {
    let prec = l.precision();
    let one = Scalar::one(prec);
    let zero = Scalar::zero(prec);
    match (l.backward.is_infinity(), l.forward.is_infinity()) {
        (true, true) => unreachable!("endpoints distinct"),
        (true, false) | (false, true) => {
            // vertical line x = v: z -> 2v - conj(z)
            let v = if l.backward.is_infinity() {
                l.forward.coordinate().clone()
            } else {
                l.backward.coordinate().clone()
            };
            let two_v = &v + &v;
            Isometry::new([[-&one, two_v], [zero, one]])
        }
        (false, false) => {
            // half-circle, center c radius r: z -> (c conj(z) + r² - c²)/(conj(z) - c)
            let p = l.backward.coordinate();
            let q = l.forward.coordinate();
            let two = Scalar::from_u64(2, prec);
            let c = &(p + q) / &two;
            let r = (q - p).abs() / &two;
            let rr = &r * &r;
            let cc = &c * &c;
            Isometry::new([[c.clone(), &rr - &cc], [one, -&c]])
        }
    }
}

/// Resolved lengths (λ(γ'), λ(γ''), λ(γ''')) of a crossing of two geodesic
/// loop segments of lengths `l2`, `l3` meeting at angle `theta`:
///
/// cosh(λ'/2)   = 2 cosh(l2/2) cosh(l3/2) sin²(θ/2) − cosh((l2−l3)/2)
/// cosh(λ''/2)  = cosh(l2/2) cos(θ/2)
/// cosh(λ'''/2) = cosh(l3/2) cos(θ/2)
pub fn resolve_crossing(
    l2: &Scalar,
    l3: &Scalar,
    theta: &Scalar,
) -> Result<(Scalar, Scalar, Scalar), Hyp2Error> {
    let prec = l2.precision().max(l3.precision()).max(theta.precision());
    let one = Scalar::one(prec);
    let two = Scalar::from_u64(2, prec);
    assert!(l2.is_positive() && l3.is_positive(), "segment lengths must be positive");
    assert!(theta.is_positive() && *theta < Scalar::pi(prec), "angle must lie in (0, pi)");
    let ch2 = (l2 / &two).cosh();
    let ch3 = (l3 / &two).cosh();
    let th2 = theta / &two;
    let s = th2.sin();
    let c = th2.cos();
    let rhs1 = &(&(&(&two * &ch2) * &ch3) * &(&s * &s)) - &(&(l2 - l3) / &two).cosh();
    let rhs2 = &ch2 * &c;
    let rhs3 = &ch3 * &c;
    for (k, rhs) in [(1usize, &rhs1), (2, &rhs2), (3, &rhs3)] {
        if *rhs < one {
            return Err(Hyp2Error::NonHyperbolicResolution(k));
        }
    }
    Ok((&two * &rhs1.acosh(), &two * &rhs2.acosh(), &two * &rhs3.acosh()))
}
