//! Brute-force group-element enumeration and Jordan-projection clouds.
//!
//! Words come in two kinds: cyclically reduced words in the rank-2 free
//! group (one-holed torus and pants scenarios) and even products of side
//! reflections of a right-angled polygon (closed-surface scenarios). The
//! even reflection words have squares inside the surface group and
//! projectivize identically, so even-word clouds probe exactly the
//! projectivized limit cone.
//!
//! Enumeration emits one canonical representative per {conjugacy, inversion}
//! orbit (minimal over cyclic rotations and reversal), with proper powers
//! excluded: they are projectively redundant by homogeneity of the Jordan
//! projection.

use rayon::prelude::*;
use thiserror::Error;

use crate::cone::{projectivize, MultiLength, SimplexPoint};
use crate::hyp2::Isometry;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordgenError {
    #[error("cloud is empty")]
    EmptyCloud,
    #[error("functional is not azimuthal")]
    NotAzimuthal,
    #[error("no separating word found up to length {0}")]
    NotFound(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordKind {
    /// Letters 0 = a, 1 = a⁻¹, 2 = b, 3 = b⁻¹; cyclically reduced.
    FreeRank2,
    /// Letters are reflection-generator indices; even length, no
    /// immediate repetition (cyclically).
    EvenReflection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    pub letters: Vec<u8>,
    pub kind: WordKind,
}

impl Word {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn spell(&self) -> String {
        match self.kind {
            WordKind::FreeRank2 => self
                .letters
                .iter()
                .map(|l| ['a', 'A', 'b', 'B'][*l as usize])
                .collect(),
            WordKind::EvenReflection => self
                .letters
                .iter()
                .map(|l| format!("r{l}"))
                .collect::<Vec<_>>()
                .join("."),
        }
    }

    /// Parses a free word like "aabB" into letters.
    pub fn parse_free(s: &str) -> Option<Word> {
        let mut letters = Vec::with_capacity(s.len());
        for ch in s.chars() {
            letters.push(match ch {
                'a' => 0u8,
                'A' => 1,
                'b' => 2,
                'B' => 3,
                _ => return None,
            });
        }
        Some(Word { letters, kind: WordKind::FreeRank2 })
    }
}

fn free_inverse_letter(l: u8) -> u8 {
    l ^ 1
}

/// Inverse class representative sequence: reversal, with letters inverted
/// for free words (reflections are involutions).
fn inverse_seq(letters: &[u8], kind: WordKind) -> Vec<u8> {
    let mut out: Vec<u8> = letters.iter().rev().copied().collect();
    if kind == WordKind::FreeRank2 {
        for l in &mut out {
            *l = free_inverse_letter(*l);
        }
    }
    out
}

fn min_rotation_leq(w: &[u8], cand: &[u8]) -> bool {
    // true if some rotation of `cand` is strictly smaller than w
    let n = cand.len();
    for r in 0..n {
        for k in 0..n {
            let c = cand[(r + k) % n];
            match c.cmp(&w[k]) {
                std::cmp::Ordering::Less => return true,
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    false
}

fn is_canonical(w: &[u8], kind: WordKind) -> bool {
    if min_rotation_leq(w, w) {
        return false;
    }
    let inv = inverse_seq(w, kind);
    if inv != w && min_rotation_leq(w, &inv) {
        return false;
    }
    // also reject when a rotation of the inverse equals w... handled above
    true
}

fn is_proper_power(w: &[u8]) -> bool {
    let n = w.len();
    for d in 1..n {
        if n % d != 0 {
            continue;
        }
        if (0..n).all(|k| w[k] == w[(k + d) % n]) {
            return true;
        }
    }
    false
}

fn cyclically_valid(w: &[u8], kind: WordKind) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    let bad = |x: u8, y: u8| match kind {
        WordKind::FreeRank2 => y == free_inverse_letter(x),
        WordKind::EvenReflection => x == y,
    };
    for k in 0..n {
        if n > 1 && bad(w[k], w[(k + 1) % n]) {
            return false;
        }
    }
    if kind == WordKind::EvenReflection && n == 1 {
        return false;
    }
    true
}

/// One canonical representative per {conjugacy class, inversion} orbit of
/// cyclically valid words up to `max_len`, in (length, lexicographic) order.
/// Proper powers are excluded.
pub fn enumerate_words(kind: WordKind, generator_count: usize, max_len: usize) -> Vec<Word> {
    assert!(max_len >= 1);
    let alphabet: u8 = match kind {
        WordKind::FreeRank2 => {
            assert_eq!(generator_count, 2);
            4
        }
        WordKind::EvenReflection => u8::try_from(generator_count).expect("small alphabet"),
    };
    let lengths: Vec<usize> = (1..=max_len)
        .filter(|n| kind != WordKind::EvenReflection || n % 2 == 0)
        .collect();
    let mut out: Vec<Word> = Vec::new();
    for n in lengths {
        if n == 1 {
            // single letters: canonical ones only (a, b for the free group)
            for l in 0..alphabet {
                let w = vec![l];
                if cyclically_valid(&w, kind) && is_canonical(&w, kind) {
                    out.push(Word { letters: w, kind });
                }
            }
            continue;
        }
        // parallel over the first two letters; enumeration order preserved
        let prefixes: Vec<(u8, u8)> = (0..alphabet)
            .flat_map(|x| (0..alphabet).map(move |y| (x, y)))
            .collect();
        let chunks: Vec<Vec<Word>> = prefixes
            .par_iter()
            .map(|&(x, y)| {
                let mut acc = Vec::new();
                let bad = |p: u8, q: u8| match kind {
                    WordKind::FreeRank2 => q == free_inverse_letter(p),
                    WordKind::EvenReflection => p == q,
                };
                // the first letter of a minimal rotation is minimal in the word
                if bad(x, y) || y < x {
                    return acc;
                }
                let mut buf = vec![0u8; n];
                buf[0] = x;
                buf[1] = y;
                dfs(&mut buf, 2, alphabet, kind, &mut acc);
                fn dfs(
                    buf: &mut Vec<u8>,
                    pos: usize,
                    alphabet: u8,
                    kind: WordKind,
                    acc: &mut Vec<Word>,
                ) {
                    let n = buf.len();
                    let bad = |p: u8, q: u8| match kind {
                        WordKind::FreeRank2 => q == free_inverse_letter(p),
                        WordKind::EvenReflection => p == q,
                    };
                    if pos == n {
                        if !bad(buf[n - 1], buf[0])
                            && is_canonical(buf, kind)
                            && !is_proper_power(buf)
                        {
                            acc.push(Word { letters: buf.clone(), kind });
                        }
                        return;
                    }
                    for l in buf[0]..alphabet {
                        if bad(buf[pos - 1], l) {
                            continue;
                        }
                        buf[pos] = l;
                        dfs(buf, pos + 1, alphabet, kind, acc);
                    }
                }
                acc
            })
            .collect();
        for c in chunks {
            out.extend(c);
        }
    }
    out
}

/// Matrix images of the letter alphabet, one inner vector per component.
/// For free words the order is [a, a⁻¹, b, b⁻¹]; for reflection words it is
/// the generator list itself.
pub struct GeneratorImages {
    pub components: Vec<Vec<Isometry>>,
}

impl GeneratorImages {
    pub fn evaluate(&self, component: usize, word: &Word) -> Isometry {
        let gens = &self.components[component];
        let prec = gens[0].entries()[0][0].precision();
        let mut m = Isometry::identity(prec);
        for l in &word.letters {
            m = m.compose(&gens[*l as usize]);
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct CloudPoint {
    pub word: Word,
    pub ml: MultiLength,
    pub sp: SimplexPoint,
}

/// A word whose image is non-hyperbolic in some component (reported, never
/// silently dropped).
#[derive(Clone, Debug)]
pub struct NonHyperbolicWord {
    pub word: Word,
    pub component: usize,
}

#[derive(Debug)]
pub struct CloudOutcome {
    pub points: Vec<CloudPoint>,
    pub nonhyperbolic: Vec<NonHyperbolicWord>,
    /// Words dropped by the rounded-trace-vector deduplication.
    pub dedup_dropped: usize,
}

/// Jordan projections of the words under the given matrix images,
/// deduplicated by trace vectors rounded to 64 fractional bits.
pub fn jordan_cloud(images: &GeneratorImages, words: &[Word]) -> CloudOutcome {
    let d = images.components.len();
    // traces per word, in parallel; identity-like and elliptic words land at
    // |tr| <= 2 only up to rounding, so classify against a noise margin of
    // 2^(-prec/2), far below the systole gap 2cosh(sys/2) - 2 of any
    // certified scenario
    let traces: Vec<Result<Vec<Scalar>, usize>> = words
        .par_iter()
        .map(|w| {
            let mut ts = Vec::with_capacity(d);
            for i in 0..d {
                let m = images.evaluate(i, w);
                let t = m.trace().abs();
                let prec = t.precision();
                let threshold =
                    &Scalar::from_u64(2, prec) + &Scalar::two_pow(-((prec / 2) as i64), prec);
                if t <= threshold {
                    return Err(i);
                }
                ts.push(t);
            }
            Ok(ts)
        })
        .collect();
    // sequential dedup in enumeration order
    let mut seen = std::collections::HashSet::new();
    let mut survivors: Vec<(usize, Vec<Scalar>)> = Vec::new();
    let mut nonhyperbolic = Vec::new();
    let mut dropped = 0usize;
    for (idx, tr) in traces.into_iter().enumerate() {
        match tr {
            Err(component) => {
                nonhyperbolic.push(NonHyperbolicWord { word: words[idx].clone(), component })
            }
            Ok(ts) => {
                let key: Vec<(i8, i64, Vec<u64>)> = ts.iter().map(|t| t.dedup_key(64)).collect();
                if seen.insert(key) {
                    survivors.push((idx, ts));
                } else {
                    dropped += 1;
                }
            }
        }
    }
    // lengths for the survivors, in parallel
    let points: Vec<CloudPoint> = survivors
        .par_iter()
        .map(|(idx, ts)| {
            let coords: Vec<Scalar> = ts
                .iter()
                .map(|t| {
                    let prec = t.precision();
                    let two = Scalar::from_u64(2, prec);
                    &two * &(t / &two).acosh()
                })
                .collect();
            let ml = MultiLength::new(coords).expect("lengths are positive");
            let sp = projectivize(&ml).expect("hyperbolic in every component");
            CloudPoint { word: words[*idx].clone(), ml, sp }
        })
        .collect();
    CloudOutcome { points, nonhyperbolic, dedup_dropped: dropped }
}

/// Finite record-breaker scan: sorted by the length in the distinguished
/// coordinate i₀ (where Ω is negative), emit the running minima of
/// Ω(ml)/ml[i₀].
pub struct ScanOutcome {
    pub records: Vec<(Word, Scalar)>,
    /// The infinite sequence may end in powers of a single element; a finite
    /// scan cannot see that tail.
    pub caveat: &'static str,
}

pub fn record_breaker_scan(
    cloud: &[CloudPoint],
    omega: &crate::cone::Functional,
) -> Result<ScanOutcome, WordgenError> {
    if cloud.is_empty() {
        return Err(WordgenError::EmptyCloud);
    }
    if !crate::cone::azimuthal(omega) {
        return Err(WordgenError::NotAzimuthal);
    }
    let i0 = omega.c.iter().position(|c| c.is_negative()).expect("azimuthal");
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    order.sort_by(|&a, &b| {
        cloud[a].ml.coords[i0].partial_cmp(&cloud[b].ml.coords[i0]).unwrap().then(a.cmp(&b))
    });
    let mut records = Vec::new();
    let mut best: Option<Scalar> = None;
    for idx in order {
        let p = &cloud[idx];
        let prec = p.ml.coords[i0].precision();
        let mut val = Scalar::zero(prec);
        for (c, l) in omega.c.iter().zip(&p.ml.coords) {
            val = &val + &(c * l);
        }
        let ratio = &val / &p.ml.coords[i0];
        if best.as_ref().map_or(true, |b| ratio < *b) {
            best = Some(ratio.clone());
            records.push((p.word.clone(), ratio));
        }
    }
    Ok(ScanOutcome {
        records,
        caveat: "finite scan; the infinite record-breaker sequence may end in powers of a single element",
    })
}

/// Searches words by increasing length for one whose component lengths are
/// pairwise distinct beyond the relative tolerance. Exhaustion does not
/// certify conjugacy.
pub fn nonconjugacy_witness(
    images: &GeneratorImages,
    kind: WordKind,
    max_len: usize,
    rel_tol: &Scalar,
) -> Result<Word, WordgenError> {
    let gens = images.components[0].len();
    let generator_count = match kind {
        WordKind::FreeRank2 => 2,
        WordKind::EvenReflection => gens,
    };
    let words = enumerate_words(kind, generator_count, max_len);
    let cloud = jordan_cloud(images, &words);
    for p in &cloud.points {
        let c = &p.ml.coords;
        let d = c.len();
        let mut ok = true;
        'outer: for i in 0..d {
            for j in (i + 1)..d {
                let scale = c[i].abs().max(&c[j].abs());
                if (&c[i] - &c[j]).abs() <= &scale * rel_tol {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if ok {
            return Ok(p.word.clone());
        }
    }
    Err(WordgenError::NotFound(max_len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Functional;
    use crate::fricke::{slope_word, Slope, TorusRep, TraceTriple};

    const P: usize = 256;

    fn s(f: f64) -> Scalar {
        Scalar::from_f64(f, P)
    }

    fn fish_images() -> GeneratorImages {
        let two = s(2.0);
        let mk = |a: f64, b: f64, c: f64| {
            TraceTriple::new(
                &two * &s(a).cosh(),
                &two * &s(b).cosh(),
                &two * &s(c).cosh(),
            )
            .unwrap()
        };
        let rep = TorusRep::from_triples(vec![mk(6.0, 8.0, 8.0), mk(8.0, 6.0, 8.0), mk(8.0, 8.0, 6.0)]);
        let components = (0..3)
            .map(|i| {
                let (ma, mb) = rep.generators(i);
                vec![ma.clone(), ma.inverse(), mb.clone(), mb.inverse()]
            })
            .collect();
        GeneratorImages { components }
    }

    #[test]
    fn free_enumeration_small_lengths() {
        let w1 = enumerate_words(WordKind::FreeRank2, 2, 1);
        let spell: Vec<String> = w1.iter().map(|w| w.spell()).collect();
        assert_eq!(spell, vec!["a", "b"]);
        let w2 = enumerate_words(WordKind::FreeRank2, 2, 2);
        let spell2: Vec<String> = w2.iter().map(|w| w.spell()).collect();
        // squares a², b² are proper powers and excluded
        assert_eq!(spell2, vec!["a", "b", "ab", "aB"]);
    }

    #[test]
    fn even_reflection_pairs() {
        let w = enumerate_words(WordKind::EvenReflection, 6, 2);
        assert_eq!(w.len(), 15); // r_i r_j with i < j
        for word in &w {
            assert_eq!(word.len(), 2);
            assert!(word.letters[0] < word.letters[1]);
        }
    }

    #[test]
    fn enumeration_counts_are_orbit_counts() {
        // length-3 free classes up to conjugacy+inversion, no proper powers:
        // necklaces of cyclically reduced length-3 words: 3^3+3·... direct
        // check against a brute-force orbit count
        let max_len = 5;
        let words = enumerate_words(WordKind::FreeRank2, 2, max_len);
        // brute force: count orbits of cyclically valid sequences
        let mut orbits = std::collections::HashSet::new();
        for n in 1..=max_len {
            let mut seq = vec![0u8; n];
            loop {
                if cyclically_valid(&seq, WordKind::FreeRank2) && !is_proper_power(&seq) {
                    // orbit canonical form
                    let mut best: Option<Vec<u8>> = None;
                    let inv = inverse_seq(&seq, WordKind::FreeRank2);
                    for cand in [&seq, &inv] {
                        for r in 0..n {
                            let rot: Vec<u8> =
                                (0..n).map(|k| cand[(r + k) % n]).collect();
                            if best.as_ref().map_or(true, |b| rot < *b) {
                                best = Some(rot);
                            }
                        }
                    }
                    orbits.insert((n, best.unwrap()));
                }
                // increment
                let mut carry = true;
                for digit in seq.iter_mut().rev() {
                    if carry {
                        *digit += 1;
                        if *digit == 4 {
                            *digit = 0;
                        } else {
                            carry = false;
                        }
                    }
                }
                if carry {
                    break;
                }
            }
        }
        assert_eq!(words.len(), orbits.len());
    }

    #[test]
    fn fish_cloud_base_slopes() {
        let images = fish_images();
        let w = Word::parse_free(&slope_word(Slope::new(0, 1))).unwrap();
        let cloud = jordan_cloud(&images, &[w]);
        assert_eq!(cloud.points.len(), 1);
        let ml = &cloud.points[0].ml;
        let want = [s(12.0), s(16.0), s(16.0)];
        for (a, b) in ml.coords.iter().zip(&want) {
            assert!((a - b).abs() < Scalar::two_pow(-200, P), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn word_square_doubles_lengths() {
        let images = fish_images();
        let w = Word::parse_free("ab").unwrap();
        let ww = Word::parse_free("abab").unwrap();
        let cloud = jordan_cloud(&images, &[w, ww]);
        assert_eq!(cloud.points.len(), 2);
        let (p1, p2) = (&cloud.points[0], &cloud.points[1]);
        for (a, b) in p1.ml.coords.iter().zip(&p2.ml.coords) {
            assert!((&(&s(2.0) * a) - b).abs() < Scalar::two_pow(-180, P));
        }
        assert!(p1.sp.dist_linf(&p2.sp) < Scalar::two_pow(-180, P));
    }

    #[test]
    fn inverse_words_share_multilength() {
        let images = fish_images();
        let w = Word::parse_free("aabab").unwrap();
        let winv = Word::parse_free(&"BABAA".chars().rev().collect::<String>()).unwrap();
        // note: inverse of aabab is BABAA read right-to-left
        let cloud = jordan_cloud(&images, &[w, winv]);
        // both define the same class, so dedup keeps a single point
        assert_eq!(cloud.points.len() + cloud.dedup_dropped, 2);
        assert_eq!(cloud.points.len(), 1);
    }

    #[test]
    fn conjugation_invariance_spot_check() {
        let images = fish_images();
        let w = Word::parse_free("aab").unwrap();
        let conj = Word::parse_free("baabB").unwrap(); // b (aab) b^-1
        let cloud = jordan_cloud(&images, &[w, conj]);
        assert_eq!(cloud.points.len(), 1, "conjugate words share the trace vector");
    }

    #[test]
    fn record_scan_basics() {
        let images = fish_images();
        let words = enumerate_words(WordKind::FreeRank2, 2, 4);
        let cloud = jordan_cloud(&images, &words);
        let omega = Functional::new(vec![s(-1.0), s(1.0), s(1.0)]).unwrap();
        let scan = record_breaker_scan(&cloud.points, &omega).unwrap();
        assert!(!scan.records.is_empty());
        // ratios strictly decrease along the record sequence
        for w in scan.records.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
        // scaling the cloud leaves words and ratios unchanged
        let scaled: Vec<CloudPoint> = cloud
            .points
            .iter()
            .map(|p| CloudPoint {
                word: p.word.clone(),
                ml: MultiLength::new(p.ml.coords.iter().map(|c| &s(2.0) * c).collect()).unwrap(),
                sp: p.sp.clone(),
            })
            .collect();
        let scan2 = record_breaker_scan(&scaled, &omega).unwrap();
        assert_eq!(scan.records.len(), scan2.records.len());
        for (a, b) in scan.records.iter().zip(&scan2.records) {
            assert_eq!(a.0, b.0);
            assert!((&a.1 - &b.1).abs() < Scalar::two_pow(-180, P));
        }
        // single-point cloud returns that point
        let single = record_breaker_scan(&cloud.points[..1], &omega).unwrap();
        assert_eq!(single.records.len(), 1);
        // empty cloud errors
        assert!(matches!(record_breaker_scan(&[], &omega), Err(WordgenError::EmptyCloud)));
    }

    #[test]
    fn witness_found_for_fish_and_not_for_identical() {
        let images = fish_images();
        let tol = s(1e-9);
        let w = nonconjugacy_witness(&images, WordKind::FreeRank2, 6, &tol).unwrap();
        assert!(!w.is_empty());
        // identical components can never be separated
        let one = images.components[0].clone();
        let same = GeneratorImages { components: vec![one.clone(), one.clone(), one] };
        assert!(matches!(
            nonconjugacy_witness(&same, WordKind::FreeRank2, 5, &tol),
            Err(WordgenError::NotFound(5))
        ));
    }
}
