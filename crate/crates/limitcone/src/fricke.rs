//! Trace coordinates for the one-holed torus.
//!
//! A representation of the free group F₂ = π₁(one-holed torus) is captured by
//! a Markoff map: a trace at every complementary region of the Farey tree,
//! determined by its values on the base triangle of slopes (0/1, 1/1, 1/0)
//! through the recursion t_mediant = t_parentA · t_parentB − t_comediant.
//! The lift convention keeps every trace > 2.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::hyp2::Isometry;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrickeError {
    #[error("trace out of range (must be > 2)")]
    TraceOutOfRange,
    #[error("trace fell to {0} <= 2 at slope {1}; representation left the certified regime")]
    NotDiscretelike(String, Slope),
    #[error("lengths must be positive")]
    LengthNonPositive,
    #[error("representation is not convex cocompact ({0})")]
    NonConvexCocompact(String),
    #[error("slack at depth {0} is below the noise floor at the current precision")]
    PrecisionExhausted(usize),
    #[error("mutation path backtracks at step {0}")]
    BacktrackingPath(usize),
    #[error("invalid mutation path character {0:?}")]
    BadPathChar(char),
}

/// A slope p/q ∈ P¹ℚ in lowest terms with q ≥ 0; the slope 1/0 is ∞.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Self {
        assert!(q != 0 || p != 0, "0/0 is not a slope");
        let (mut p, mut q) = if q < 0 { (-p, -q) } else { (p, q) };
        let g = gcd(p.unsigned_abs(), q.unsigned_abs()) as i64;
        p /= g;
        q /= g;
        if q == 0 {
            p = 1;
        }
        Slope { p, q }
    }

    pub fn infinity() -> Self {
        Slope { p: 1, q: 0 }
    }

    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Traces at the three base regions, in the fixed slope order (0/1, 1/1, 1/0).
#[derive(Clone, Debug)]
pub struct TraceTriple {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

/// The base region a mutation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    A,
    B,
    C,
}

impl TraceTriple {
    /// Requires all traces > 2 (the chosen lift convention).
    pub fn new(a: Scalar, b: Scalar, c: Scalar) -> Result<Self, FrickeError> {
        let two = Scalar::from_u64(2, a.precision());
        if a <= two || b <= two || c <= two {
            return Err(FrickeError::TraceOutOfRange);
        }
        Ok(TraceTriple { a, b, c })
    }

    pub fn precision(&self) -> usize {
        self.a.precision().max(self.b.precision()).max(self.c.precision())
    }
}

/// Replaces the chosen slot by (product of the other two) − (old value).
/// The output may violate the > 2 convention; the caller validates.
pub fn markoff_mutate(t: &TraceTriple, slot: Slot) -> TraceTriple {
    match slot {
        Slot::A => TraceTriple { a: &(&t.b * &t.c) - &t.a, b: t.b.clone(), c: t.c.clone() },
        Slot::B => TraceTriple { a: t.a.clone(), b: &(&t.a * &t.c) - &t.b, c: t.c.clone() },
        Slot::C => TraceTriple { a: t.a.clone(), b: t.b.clone(), c: &(&t.a * &t.b) - &t.c },
    }
}

/// Trace T = A² + B² + C² − ABC − 2 of the commutator of a generating pair.
pub fn commutator_trace(t: &TraceTriple) -> Scalar {
    let sq = &(&(&t.a * &t.a) + &(&t.b * &t.b)) + &(&t.c * &t.c);
    let prod = &(&t.a * &t.b) * &t.c;
    &(&sq - &prod) - &Scalar::from_u64(2, t.precision())
}

/// Peripheral (boundary) length 2·arccosh(−T/2); `None` when T > −2.
pub fn peripheral_length(t: &TraceTriple) -> Option<Scalar> {
    let big_t = commutator_trace(t);
    let prec = big_t.precision();
    let two = Scalar::from_u64(2, prec);
    if big_t > -&two {
        return None;
    }
    Some(&two * &(&(-&big_t) / &two).acosh())
}

/// Fricke parametrization: matrices (m_a, m_b) with tr(m_a) = A,
/// tr(m_b) = B, tr(m_a·m_b) = C, built as
/// m_a = [[A, −1], [1, 0]], m_b = [[0, ζ], [−ζ⁻¹, B]], ζ = (C + √(C²−4))/2.
pub fn realize_traces(
    a: &Scalar,
    b: &Scalar,
    c: &Scalar,
) -> Result<(Isometry, Isometry), FrickeError> {
    let prec = a.precision().max(b.precision()).max(c.precision());
    let two = Scalar::from_u64(2, prec);
    if *a <= two || *b <= two || *c <= two {
        return Err(FrickeError::TraceOutOfRange);
    }
    Ok(realize_traces_unchecked(a, b, c))
}

/// Same construction for any traces with |C| ≥ 2 (the pair-of-pants
/// scenarios use C ≤ −2, where ζ lands in [−1, 0)).
pub fn realize_traces_unchecked(a: &Scalar, b: &Scalar, c: &Scalar) -> (Isometry, Isometry) {
    let prec = a.precision().max(b.precision()).max(c.precision());
    let one = Scalar::one(prec);
    let zero = Scalar::zero(prec);
    let two = Scalar::from_u64(2, prec);
    let disc = (&(c * c) - &Scalar::from_u64(4, prec)).sqrt();
    let zeta = &(c + &disc) / &two;
    let m_a = Isometry::new([[a.clone(), -&one], [one.clone(), zero.clone()]]);
    let m_b = Isometry::new([[zero, zeta.clone()], [-&(&one / &zeta), b.clone()]]);
    (m_a, m_b)
}

/// All slopes with max(|p|, q) ≤ q_max (finite in every sector of P¹ℚ),
/// each tagged with its Farey parents. Parents are reported in canonical
/// form; the mediant identity p = p′ + p″, q = q′ + q″ holds after choosing
/// the projective sign of each parent representative, and every pair is
/// unimodular: |p′q″ − q′p″| = 1.
pub fn farey_enumerate(q_max: i64) -> Vec<(Slope, Slope, Slope)> {
    assert!(q_max >= 1);
    let mut out: Vec<(Slope, Slope, Slope)> = vec![
        (Slope::new(0, 1), Slope::infinity(), Slope::new(-1, 1)),
        (Slope::new(1, 1), Slope::new(0, 1), Slope::infinity()),
        (Slope::infinity(), Slope::new(2, 1), Slope::new(1, 1)),
    ];
    fn rec(l: (i64, i64), r: (i64, i64), q_max: i64, out: &mut Vec<(Slope, Slope, Slope)>) {
        let m = (l.0 + r.0, l.1 + r.1);
        if m.0.abs() > q_max || m.1.abs() > q_max {
            return;
        }
        out.push((Slope::new(m.0, m.1), Slope::new(l.0, l.1), Slope::new(r.0, r.1)));
        rec(l, m, q_max, out);
        rec(m, r, q_max, out);
    }
    rec((0, 1), (1, 1), q_max, &mut out); // slopes in (0, 1)
    rec((1, 1), (1, 0), q_max, &mut out); // slopes in (1, ∞)
    rec((-1, 0), (0, 1), q_max, &mut out); // slopes in (−∞, 0)
    out.sort_by_key(|(s, _, _)| (s.q == 0, s.q, s.p));
    out.dedup_by_key(|(s, _, _)| *s);
    out
}

/// A multi-Fuchsian one-holed-torus representation: one Markoff map per
/// component, addressed by the base triple, with a per-component trace memo.
pub struct TorusRep {
    components: Vec<TraceTriple>,
    caches: Vec<Mutex<HashMap<Slope, Scalar>>>,
}

impl TorusRep {
    pub fn from_triples(components: Vec<TraceTriple>) -> Self {
        let caches = components.iter().map(|_| Mutex::new(HashMap::new())).collect();
        TorusRep { components, caches }
    }

    /// Builds the representation from a matrix of curve lengths: row i holds
    /// the lengths of the slope (0/1, 1/1, 1/0) curves in component i.
    /// Validates T < −2 per component and traces > 2 to a shallow Farey depth.
    pub fn from_length_triples(rows: &[[Scalar; 3]]) -> Result<Self, FrickeError> {
        let mut components = Vec::with_capacity(rows.len());
        for row in rows {
            let mut traces = Vec::with_capacity(3);
            for len in row {
                if !len.is_positive() {
                    return Err(FrickeError::LengthNonPositive);
                }
                let prec = len.precision();
                let half = len / &Scalar::from_u64(2, prec);
                traces.push(&Scalar::from_u64(2, prec) * &half.cosh());
            }
            let triple = TraceTriple::new(traces[0].clone(), traces[1].clone(), traces[2].clone())
                .map_err(|_| FrickeError::NonConvexCocompact("base trace <= 2".into()))?;
            let big_t = commutator_trace(&triple);
            let prec = big_t.precision();
            if big_t >= -&Scalar::from_u64(2, prec) {
                return Err(FrickeError::NonConvexCocompact(format!(
                    "commutator trace {} >= -2",
                    big_t.to_decimal_sig(8)
                )));
            }
            components.push(triple);
        }
        let rep = TorusRep::from_triples(components);
        // shallow sanity sweep of the Markoff map (Farey depth 4)
        for (s, _, _) in farey_enumerate(5) {
            for i in 0..rep.components.len() {
                rep.slope_trace(i, s).map_err(|e| {
                    FrickeError::NonConvexCocompact(format!("shallow trace check failed: {e}"))
                })?;
            }
        }
        Ok(rep)
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &TraceTriple {
        &self.components[i]
    }

    pub fn precision(&self) -> usize {
        self.components.iter().map(|t| t.precision()).max().unwrap_or(crate::scalar::MIN_PRECISION)
    }

    /// Matrix images (ρ(a), ρ(b)) of the free generators in component `i`.
    pub fn generators(&self, i: usize) -> (Isometry, Isometry) {
        let t = &self.components[i];
        // realize_traces takes traces of (a, b, ab) = (t(0/1), t(1/0), t(1/1))
        realize_traces_unchecked(&t.a, &t.c, &t.b)
    }

    /// Trace of the simple closed curve of slope `s` in component `i`,
    /// by the memoized mediant recursion.
    pub fn slope_trace(&self, i: usize, s: Slope) -> Result<Scalar, FrickeError> {
        let t = &self.components[i];
        let two = Scalar::from_u64(2, t.precision());
        if let Some(v) = self.caches[i].lock().unwrap().get(&s) {
            return Ok(v.clone());
        }
        let base = match (s.p, s.q) {
            (0, 1) => Some(t.a.clone()),
            (1, 1) => Some(t.b.clone()),
            (1, 0) => Some(t.c.clone()),
            _ => None,
        };
        if let Some(v) = base {
            return Ok(v);
        }
        // pick the sector and walk the Stern–Brocot tree toward s
        let (mut l, mut r, mut tl, mut tr, mut td) = if s.p >= 0 && s.q >= 1 && s.p <= s.q {
            ((0i64, 1i64), (1i64, 1i64), t.a.clone(), t.b.clone(), t.c.clone())
        } else if s.p >= s.q && s.q >= 1 {
            ((1, 1), (1, 0), t.b.clone(), t.c.clone(), t.a.clone())
        } else {
            ((-1, 0), (0, 1), t.c.clone(), t.a.clone(), t.b.clone())
        };
        loop {
            let m = (l.0 + r.0, l.1 + r.1);
            let tm = &(&tl * &tr) - &td;
            if tm <= two {
                return Err(FrickeError::NotDiscretelike(
                    tm.to_decimal_sig(8),
                    Slope::new(m.0, m.1),
                ));
            }
            if Slope::new(m.0, m.1) == s {
                self.caches[i].lock().unwrap().insert(s, tm.clone());
                return Ok(tm);
            }
            if s.p * m.1 - s.q * m.0 < 0 {
                r = m;
                td = tr;
                tr = tm;
            } else {
                l = m;
                td = tl;
                tl = tm;
            }
        }
    }

    /// Geodesic length 2·arccosh(t/2) of the slope-`s` curve in component `i`.
    pub fn slope_length(&self, i: usize, s: Slope) -> Result<Scalar, FrickeError> {
        let t = self.slope_trace(i, s)?;
        let prec = t.precision();
        let two = Scalar::from_u64(2, prec);
        Ok(&two * &(&t / &two).acosh())
    }

    /// ξ points ξ_{p/q} = (λ(γ_{0/1}) / λ(γ_{p/q})) · (q, p) for all slopes
    /// in [0, 1] with q ≤ q_max, in increasing slope order.
    pub fn xi_points(
        &self,
        i: usize,
        q_max: i64,
    ) -> Result<Vec<(Slope, [Scalar; 2])>, FrickeError> {
        let mut slopes: Vec<Slope> = farey_enumerate(q_max)
            .into_iter()
            .map(|(s, _, _)| s)
            .filter(|s| s.q >= 1 && s.p >= 0 && s.p <= s.q)
            .collect();
        slopes.sort_by(|x, y| (x.p * y.q).cmp(&(y.p * x.q)));
        let norm = self.slope_length(i, Slope::new(0, 1))?;
        let mut out = Vec::with_capacity(slopes.len());
        for s in slopes {
            let lam = self.slope_length(i, s)?;
            let scale = &norm / &lam;
            let prec = scale.precision();
            let q = Scalar::from_i64(s.q, prec);
            let p = Scalar::from_i64(s.p, prec);
            out.push((s, [&scale * &q, &scale * &p]));
        }
        Ok(out)
    }
}

/// Sides of a hyperbolic triangle (half-lengths of the corresponding
/// simple closed curves).
#[derive(Clone, Debug)]
pub struct TriangleSides {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl TriangleSides {
    pub fn new(a: Scalar, b: Scalar, c: Scalar) -> Self {
        assert!(&a + &b > c && &b + &c > a && &c + &a > b, "strict triangle inequality required");
        assert!(a.is_positive() && b.is_positive() && c.is_positive());
        TriangleSides { a, b, c }
    }
}

/// One step of a mutation run: the sorted sides, the measured slack
/// a + b − c, and the predicted slack K·e^(−2(a+b)).
#[derive(Clone, Debug)]
pub struct MutationStep {
    pub depth: usize,
    pub sides: [Scalar; 3],
    pub slack: Scalar,
    pub predicted: Scalar,
}

/// Parses a mutation path over slots {A, B, C}; rejects immediate backtracking.
pub fn parse_mutation_path(path: &str) -> Result<Vec<Slot>, FrickeError> {
    let mut out = Vec::with_capacity(path.len());
    for (i, ch) in path.chars().enumerate() {
        let slot = match ch {
            'A' | 'a' => Slot::A,
            'B' | 'b' => Slot::B,
            'C' | 'c' => Slot::C,
            other => return Err(FrickeError::BadPathChar(other)),
        };
        if out.last() == Some(&slot) {
            return Err(FrickeError::BacktrackingPath(i));
        }
        out.push(slot);
    }
    Ok(out)
}

/// Runs a non-backtracking mutation path in trace coordinates, reporting at
/// every depth the sorted half-length sides, the measured slack a+b−c, and
/// the prediction K·e^(−2(a+b)) with K = e^(a₀+b₀+c₀).
pub fn mutation_slacks(
    tau0: &TriangleSides,
    path: &[Slot],
) -> Result<Vec<MutationStep>, FrickeError> {
    let prec = tau0.a.precision().max(tau0.b.precision()).max(tau0.c.precision());
    let two = Scalar::from_u64(2, prec);
    let k_const = (&(&tau0.a + &tau0.b) + &tau0.c).exp();
    let mut triple =
        TraceTriple::new(&two * &tau0.a.cosh(), &two * &tau0.b.cosh(), &two * &tau0.c.cosh())
            .map_err(|_| FrickeError::TraceOutOfRange)?;
    let mut out: Vec<MutationStep> = Vec::with_capacity(path.len() + 1);
    let record = |depth: usize, t: &TraceTriple, out: &mut Vec<MutationStep>| {
        let mut sides = [(&t.a / &two).acosh(), (&t.b / &two).acosh(), (&t.c / &two).acosh()];
        sides.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let slack = &(&sides[0] + &sides[1]) - &sides[2];
        let predicted = &k_const * &(-&(&two * &(&sides[0] + &sides[1]))).exp();
        // noise floor: the largest side is known to ~2^(32-prec) relative
        let noise = &sides[2] * &Scalar::two_pow(32 - prec as i64, prec);
        if depth > 0 && slack <= noise {
            return Err(FrickeError::PrecisionExhausted(depth));
        }
        out.push(MutationStep { depth, sides, slack, predicted });
        Ok(())
    };
    record(0, &triple, &mut out)?;
    for (k, slot) in path.iter().enumerate() {
        triple = markoff_mutate(&triple, *slot);
        let two_chk = Scalar::from_u64(2, triple.precision());
        for (v, slot_name) in [(&triple.a, "A"), (&triple.b, "B"), (&triple.c, "C")] {
            if *v <= two_chk {
                return Err(FrickeError::NotDiscretelike(
                    format!("{slot_name}={}", v.to_decimal_sig(8)),
                    Slope::new(0, 1),
                ));
            }
        }
        record(k + 1, &triple, &mut out)?;
    }
    Ok(out)
}

/// Free-group word (over `a`, `b` and inverses `A`, `B`) representing the
/// simple closed curve of slope `s`, by the Stern–Brocot concatenation rule
/// w(mediant) = w(parentA)·w(parentB) with w(0/1) = "a", w(1/1) = "ab",
/// w(1/0) = "b"; negative slopes use the mirror tree with w(−∞) = "B".
pub fn slope_word(s: Slope) -> String {
    match (s.p, s.q) {
        (0, 1) => return "a".into(),
        (1, 1) => return "ab".into(),
        (1, 0) => return "b".into(),
        (-1, 1) => return "Ba".into(),
        _ => {}
    }
    let (mut l, mut r, mut wl, mut wr): ((i64, i64), (i64, i64), String, String) =
        if s.p >= 0 && s.q >= 1 && s.p <= s.q {
            ((0, 1), (1, 1), "a".into(), "ab".into())
        } else if s.p >= s.q && s.q >= 1 {
            ((1, 1), (1, 0), "ab".into(), "b".into())
        } else {
            ((-1, 0), (0, 1), "B".into(), "a".into())
        };
    loop {
        let m = (l.0 + r.0, l.1 + r.1);
        let wm = format!("{wl}{wr}");
        if Slope::new(m.0, m.1) == s {
            return wm;
        }
        if s.p * m.1 - s.q * m.0 < 0 {
            r = m;
            wr = wm;
        } else {
            l = m;
            wl = wm;
        }
    }
}
