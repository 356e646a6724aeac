use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::ToneError;

/// Pitch levels run from 0 to this value.
pub const TOP_LEVEL: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pitch {
    Level(u8),
    Contour(u8, u8),
}

impl fmt::Display for Pitch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pitch::Level(l) => write!(f, "{l}"),
            Pitch::Contour(a, b) => write!(f, "{a}-{b}"),
        }
    }
}

impl FromStr for Pitch {
    type Err = ToneError;

    fn from_str(s: &str) -> Result<Self, ToneError> {
        let level = |x: &str| -> Result<u8, ToneError> {
            match x.parse::<u8>() {
                Ok(l) if l <= TOP_LEVEL => Ok(l),
                _ => Err(ToneError::BadPitch(s.to_string())),
            }
        };
        match s.split_once('-') {
            None => Ok(Pitch::Level(level(s)?)),
            Some((a, b)) => {
                let (a, b) = (level(a)?, level(b)?);
                if a == b {
                    return Err(ToneError::BadPitch(s.to_string()));
                }
                Ok(Pitch::Contour(a, b))
            }
        }
    }
}

/// A phrase as a sequence of syllables, each with a level or a contour.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PitchTrack {
    pub id: Option<String>,
    pub syllables: Vec<(String, Pitch)>,
}

impl PitchTrack {
    /// Successive pitch differences, contours included.
    pub fn differences(&self) -> Vec<i32> {
        let mut levels = Vec::new();
        for (_, p) in &self.syllables {
            match *p {
                Pitch::Level(l) => levels.push(l as i32),
                Pitch::Contour(a, b) => levels.extend([a as i32, b as i32]),
            }
        }
        levels.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

impl fmt::Display for PitchTrack {
    /// `syl:level` items separated by spaces; the `syl:` part is left out
    /// for syllables with no text.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(id) = &self.id {
            write!(f, "[{id}] ")?;
        }
        for (i, (text, p)) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if text.is_empty() {
                write!(f, "{p}")?;
            } else {
                write!(f, "{text}:{p}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for PitchTrack {
    type Err = ToneError;

    fn from_str(s: &str) -> Result<Self, ToneError> {
        let mut rest = s.trim();
        let mut id = None;
        if let Some(r) = rest.strip_prefix('[') {
            let (name, after) = r.split_once(']').ok_or_else(|| ToneError::BadPitch(s.to_string()))?;
            id = Some(name.trim().to_string());
            rest = after;
        }
        let mut syllables = Vec::new();
        for item in rest.split_whitespace() {
            let (text, level) = match item.rsplit_once(':') {
                Some((t, l)) => (t.to_string(), l),
                None => (String::new(), item),
            };
            syllables.push((text, level.parse()?));
        }
        Ok(PitchTrack { id, syllables })
    }
}

/// One line of a track file. `track` is `None` for a cell marked
/// `missing`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackRecord {
    pub id: String,
    pub track: Option<PitchTrack>,
}

/// Reads one track per line, optionally prefixed by `[id]`. Lines without
/// an id are named `line<N>`.
pub fn parse_tracks(text: &str) -> Result<Vec<TrackRecord>, ToneError> {
    let mut out: Vec<TrackRecord> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |e: ToneError| ToneError::Parse { line: n + 1, msg: e.to_string() };
        let (id, body) = match line.strip_prefix('[').and_then(|r| r.split_once(']')) {
            Some((id, body)) => (id.trim().to_string(), body.trim()),
            None if line.starts_with('[') => return Err(err(ToneError::BadPitch(line.to_string()))),
            None => (format!("line{}", n + 1), line),
        };
        if out.iter().any(|r| r.id == id) {
            return Err(ToneError::Parse { line: n + 1, msg: format!("duplicate track id `{id}`") });
        }
        let record = if body == "missing" {
            None
        } else {
            let mut track: PitchTrack = body.parse().map_err(err)?;
            track.id = Some(id.clone());
            Some(track)
        };
        out.push(TrackRecord { id, track: record });
    }
    Ok(out)
}

/// Counts of pitch steps between adjacent tones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Census {
    /// Counts for -2, -1, +1 and +2; all four keys are always present.
    pub counts: BTreeMap<i32, usize>,
    /// Steps of any other size, with the track they occur in.
    pub unclassified: Vec<(String, i32)>,
    /// Tracks examined.
    pub tracks: usize,
}

pub const CENSUS_INTERVALS: [i32; 4] = [-2, -1, 1, 2];

/// Tallies every nonzero pitch step, within or across syllables. A step
/// of 0 is a repeated tone and is not an interval.
pub fn interval_census<'a>(tracks: impl IntoIterator<Item = &'a PitchTrack>) -> Census {
    let mut c = Census { counts: CENSUS_INTERVALS.iter().map(|&k| (k, 0)).collect(), ..Census::default() };
    for t in tracks {
        c.tracks += 1;
        for d in t.differences() {
            if d == 0 {
                continue;
            }
            match c.counts.get_mut(&d) {
                Some(n) => *n += 1,
                None => c.unclassified.push((t.id.clone().unwrap_or_default(), d)),
            }
        }
    }
    c
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, n) in &self.counts {
            writeln!(f, "{k:+}\t{n}")?;
        }
        for (id, d) in &self.unclassified {
            writeln!(f, "unclassified\t{id}\t{d:+}")?;
        }
        Ok(())
    }
}
