//! Similarity functions mapping two cleaned values to a score in `[0, 1]`.

use std::fmt;

use thiserror::Error;

use crate::record::ComparatorKind;

/// Mean earth radius used by [`haversine_m`].
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Distance at or beyond which two coordinates are considered unrelated.
pub const GEO_CUTOFF_M: f64 = 100.0;

const WINKLER_SCALE: f64 = 0.1;
const WINKLER_PREFIX_CAP: usize = 4;

/// A similarity score clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Similarity(f64);

impl Similarity {
    pub const ZERO: Similarity = Similarity(0.0);
    pub const ONE: Similarity = Similarity(1.0);

    /// Clamps into range; NaN maps to zero.
    pub fn new(value: f64) -> Self {
        if value.is_nan() {
            Similarity(0.0)
        } else {
            Similarity(value.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComparatorError {
    #[error("not a number: {0:?}")]
    NotANumber(String),
    #[error("malformed coordinate: {0:?}")]
    MalformedCoordinate(String),
    #[error("coordinate out of range: {0}")]
    OutOfRange(f64),
}

/// Edit distance with unit costs over Unicode scalar values.
pub fn levenshtein_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (short, long) = if a.len() <= b.len() {
        (&a, &b)
    } else {
        (&b, &a)
    };
    if short.is_empty() {
        return long.len();
    }

    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, lc) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, sc) in short.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(lc != sc);
            row[j + 1] = (diag + cost).min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[short.len()]
}

/// `1 - d(a, b) / max(|a|, |b|)`; two empty strings are identical.
pub fn levenshtein_sim(a: &str, b: &str) -> Similarity {
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return Similarity::ONE;
    }
    let d = levenshtein_distance(a, b);
    Similarity::new(1.0 - d as f64 / max_len as f64)
}

/// Plain Jaro similarity.
pub fn jaro_sim(a: &str, b: &str) -> Similarity {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    // work on (shorter, longer) so the float expression is order independent
    let (s, l) = if (a.len(), &a) <= (b.len(), &b) {
        (&a, &b)
    } else {
        (&b, &a)
    };
    if s.is_empty() && l.is_empty() {
        return Similarity::ONE;
    }
    if s.is_empty() {
        return Similarity::ZERO;
    }

    let window = (l.len() / 2).saturating_sub(1);
    let mut s_matched = vec![false; s.len()];
    let mut l_matched = vec![false; l.len()];
    let mut matches = 0usize;
    for (i, sc) in s.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(l.len());
        for j in lo..hi {
            if !l_matched[j] && l[j] == *sc {
                s_matched[i] = true;
                l_matched[j] = true;
                matches += 1;
                break;
            }
        }
    }
    if matches == 0 {
        return Similarity::ZERO;
    }

    let s_seq = s.iter().zip(&s_matched).filter(|(_, &m)| m).map(|(c, _)| c);
    let l_seq = l.iter().zip(&l_matched).filter(|(_, &m)| m).map(|(c, _)| c);
    let half_transpositions = s_seq.zip(l_seq).filter(|(x, y)| x != y).count();

    let m = matches as f64;
    let t = half_transpositions as f64 / 2.0;
    Similarity::new((m / s.len() as f64 + m / l.len() as f64 + (m - t) / m) / 3.0)
}

/// Jaro similarity with the Winkler common-prefix boost (scale 0.1, at most
/// four prefix characters).
pub fn jaro_winkler_sim(a: &str, b: &str) -> Similarity {
    let jaro = jaro_sim(a, b).value();
    let prefix = a
        .chars()
        .zip(b.chars())
        .take(WINKLER_PREFIX_CAP)
        .take_while(|(x, y)| x == y)
        .count();
    Similarity::new(jaro + prefix as f64 * WINKLER_SCALE * (1.0 - jaro))
}

/// 1.0 iff the strings are byte-wise equal.
pub fn exact_sim(a: &str, b: &str) -> Similarity {
    if a == b {
        Similarity::ONE
    } else {
        Similarity::ZERO
    }
}

fn parse_number(s: &str) -> Result<f64, ComparatorError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| ComparatorError::NotANumber(s.to_string()))
}

/// Ratio of the smaller to the larger number.
///
/// Equal values score 1.0 (including zero against zero). Anything involving a
/// negative number or a single zero scores 0.0 unless the values are equal.
pub fn numeric_sim(a: &str, b: &str) -> Result<Similarity, ComparatorError> {
    let x = parse_number(a)?;
    let y = parse_number(b)?;
    if x == y {
        return Ok(Similarity::ONE);
    }
    if x <= 0.0 || y <= 0.0 {
        return Ok(Similarity::ZERO);
    }
    Ok(Similarity::new(x.min(y) / x.max(y)))
}

/// Great-circle distance in meters between two points given in decimal
/// degrees.
pub fn haversine_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Result<f64, ComparatorError> {
    for lat in [lat1, lat2] {
        if !(-90.0..=90.0).contains(&lat) {
            return Err(ComparatorError::OutOfRange(lat));
        }
    }
    for lon in [lon1, lon2] {
        if !(-180.0..=180.0).contains(&lon) {
            return Err(ComparatorError::OutOfRange(lon));
        }
    }
    let phi1 = lat1.to_radians();
    let phi2 = lat2.to_radians();
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    Ok(2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin())
}

/// Parses `"lat,lon"` in decimal degrees.
pub fn parse_coordinate(s: &str) -> Result<(f64, f64), ComparatorError> {
    let malformed = || ComparatorError::MalformedCoordinate(s.to_string());
    let (lat, lon) = s.split_once(',').ok_or_else(malformed)?;
    let lat: f64 = lat.trim().parse().map_err(|_| malformed())?;
    let lon: f64 = lon.trim().parse().map_err(|_| malformed())?;
    if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
        return Err(malformed());
    }
    Ok((lat, lon))
}

/// Linear decay from 1.0 at zero distance to 0.0 at [`GEO_CUTOFF_M`].
pub fn geo_sim(p: &str, q: &str) -> Result<Similarity, ComparatorError> {
    let (lat1, lon1) = parse_coordinate(p)?;
    let (lat2, lon2) = parse_coordinate(q)?;
    let d = haversine_m(lat1, lon1, lat2, lon2)?;
    if d >= GEO_CUTOFF_M {
        Ok(Similarity::ZERO)
    } else {
        Ok(Similarity::new(1.0 - d / GEO_CUTOFF_M))
    }
}

/// Compares two single values with the given comparator.
pub fn compare(kind: ComparatorKind, a: &str, b: &str) -> Result<Similarity, ComparatorError> {
    match kind {
        ComparatorKind::Levenshtein => Ok(levenshtein_sim(a, b)),
        ComparatorKind::JaroWinkler => Ok(jaro_winkler_sim(a, b)),
        ComparatorKind::Exact => Ok(exact_sim(a, b)),
        ComparatorKind::Numeric => numeric_sim(a, b),
        ComparatorKind::Geoposition => geo_sim(a, b),
    }
}

/// Best similarity over the cross product of two value lists.
///
/// Returns `None` (missing evidence) when either list is empty or no value
/// pair could be compared.
pub fn compare_values(kind: ComparatorKind, va: &[String], vb: &[String]) -> Option<Similarity> {
    let mut best: Option<Similarity> = None;
    for a in va {
        for b in vb {
            if let Ok(sim) = compare(kind, a, b) {
                if best.is_none_or(|cur| sim > cur) {
                    best = Some(sim);
                }
                if sim == Similarity::ONE {
                    return best;
                }
            }
        }
    }
    best
}
