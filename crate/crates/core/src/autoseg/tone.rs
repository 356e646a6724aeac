use std::fmt;
use std::str::FromStr;

use super::chart::{Chart, SYL, TONE};
use super::pitch::{Pitch, PitchTrack};
use super::ToneError;

/// Level assigned to the first H when rendering.
pub const FIRST_HIGH: i32 = 3;
/// Level of an all-L phrase.
pub const ALL_LOW: i32 = 1;
/// Highest renderable level.
pub const MAX_LEVEL: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tone {
    H,
    L,
}

impl fmt::Display for Tone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tone::H => "H",
            Tone::L => "L",
        })
    }
}

impl FromStr for Tone {
    type Err = ToneError;

    fn from_str(s: &str) -> Result<Self, ToneError> {
        match s {
            "H" => Ok(Tone::H),
            "L" => Ok(Tone::L),
            other => Err(ToneError::BadTone(other.to_string())),
        }
    }
}

/// The tones realized on one syllable. `downstep` lowers the first tone,
/// which must then be an H.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SyllableTones {
    pub text: String,
    pub tones: Vec<Tone>,
    pub downstep: bool,
}

/// A tonal transcription such as `HL.L.H.H.!H.L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ToneString {
    syllables: Vec<SyllableTones>,
}

impl ToneString {
    /// Checks that each syllable has one tone or a two-tone contour of
    /// distinct tones, and that every downstepped H follows an H.
    pub fn new(syllables: Vec<SyllableTones>) -> Result<Self, ToneError> {
        let mut prev: Option<Tone> = None;
        for (i, s) in syllables.iter().enumerate() {
            let ok = match s.tones.as_slice() {
                [_] => true,
                [a, b] => a != b,
                _ => false,
            };
            if !ok {
                return Err(ToneError::BadContour(i));
            }
            if s.downstep && (s.tones[0] != Tone::H || prev != Some(Tone::H)) {
                return Err(ToneError::BadDownstep(i));
            }
            prev = s.tones.last().copied();
        }
        Ok(ToneString { syllables })
    }

    pub fn syllables(&self) -> &[SyllableTones] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Realized tones in order: (syllable index, tone, downstepped).
    fn flat(&self) -> Vec<(usize, Tone, bool)> {
        let mut out = Vec::new();
        for (i, s) in self.syllables.iter().enumerate() {
            for (k, &t) in s.tones.iter().enumerate() {
                out.push((i, t, k == 0 && s.downstep));
            }
        }
        out
    }

    /// Copies syllable texts from `texts`, which must be as long.
    pub fn with_texts<S: AsRef<str>>(mut self, texts: &[S]) -> Self {
        for (s, t) in self.syllables.iter_mut().zip(texts) {
            s.text = t.as_ref().to_string();
        }
        self
    }
}

impl fmt::Display for ToneString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            if s.downstep {
                f.write_str("!")?;
            }
            for t in &s.tones {
                write!(f, "{t}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for ToneString {
    type Err = ToneError;

    fn from_str(s: &str) -> Result<Self, ToneError> {
        let mut syllables = Vec::new();
        for part in s.trim().split('.') {
            let (downstep, rest) = match part.strip_prefix('!') {
                Some(r) => (true, r),
                None => (false, part),
            };
            let tones = rest.chars().map(|c| c.to_string().parse()).collect::<Result<Vec<Tone>, _>>()?;
            syllables.push(SyllableTones { text: String::new(), tones, downstep });
        }
        ToneString::new(syllables)
    }
}

/// Reads the tones on each syllable of a chart. An H is downstepped when
/// it is realized for the first time, the tone before it on the tone tier
/// is a floating L, and the nearest earlier linked tone is an H.
pub fn tones_of_chart(chart: &Chart) -> Result<ToneString, ToneError> {
    let syl = chart.tier(SYL)?;
    let tone = chart.tier(TONE)?;
    let labels = &chart.tiers[tone].labels;
    let tone_at = |k: usize| labels[k].parse::<Tone>();
    let mut out = Vec::new();
    let mut seen = vec![false; labels.len()];
    for (s, text) in chart.tiers[syl].labels.iter().enumerate() {
        let linked = chart.linked(syl, s, tone);
        let first = *linked.first().ok_or(ToneError::UnassociatedSyllable(s))?;
        let tones = linked.iter().map(|&k| tone_at(k)).collect::<Result<Vec<_>, _>>()?;
        let downstep = tones[0] == Tone::H
            && !seen[first]
            && first > 0
            && chart.is_floating(tone, first - 1)
            && tone_at(first - 1)? == Tone::L
            && match (0..first - 1).rev().find(|&k| !chart.is_floating(tone, k)) {
                Some(k) => tone_at(k)? == Tone::H,
                None => false,
            };
        for &k in &linked {
            seen[k] = true;
        }
        out.push(SyllableTones { text: text.clone(), tones, downstep });
    }
    ToneString::new(out)
}

/// Pitch steps between consecutive realized tones.
pub fn tone_intervals(t: &ToneString) -> Vec<i32> {
    t.flat()
        .windows(2)
        .map(|w| {
            let ((s1, a, _), (s2, b, down)) = (w[0], w[1]);
            match (a, b) {
                (Tone::H, Tone::H) if down => -1,
                (Tone::H, Tone::L) => -2,
                (Tone::L, Tone::H) if s1 == s2 => 2,
                (Tone::L, Tone::H) => 1,
                _ => 0,
            }
        })
        .collect()
}

/// Terrace-tone realization: the first H sits at level 3 and every other
/// level follows from [`tone_intervals`]. The track is raised if it dips
/// below 0; a phrase with no H sits at level 1.
pub fn render_pitch(t: &ToneString) -> Result<PitchTrack, ToneError> {
    let flat = t.flat();
    if flat.is_empty() {
        return Ok(PitchTrack::default());
    }
    let steps = tone_intervals(t);
    let mut levels = vec![0i32; flat.len()];
    for k in 1..flat.len() {
        levels[k] = levels[k - 1] + steps[k - 1];
    }
    let anchor = match flat.iter().position(|&(_, tone, _)| tone == Tone::H) {
        Some(k) => FIRST_HIGH - levels[k],
        None => ALL_LOW - levels[0],
    };
    let min = levels.iter().min().unwrap() + anchor;
    let shift = anchor + if min < 0 { -min } else { 0 };
    let levels: Vec<i32> = levels.iter().map(|l| l + shift).collect();
    if let Some(&max) = levels.iter().find(|&&l| l > MAX_LEVEL) {
        return Err(ToneError::RangeExceeded(max));
    }
    let mut at = 0;
    let mut syllables = Vec::new();
    for s in t.syllables() {
        let p = match s.tones.len() {
            1 => Pitch::Level(levels[at] as u8),
            _ => Pitch::Contour(levels[at] as u8, levels[at + 1] as u8),
        };
        at += s.tones.len();
        syllables.push((s.text.clone(), p));
    }
    Ok(PitchTrack { id: None, syllables })
}

/// Recovers tones from a pitch track by reading each pitch step: across
/// syllables -2 is H.L, -1 is H.!H, +1 is L.H and 0 repeats the tone;
/// within a syllable -2 is HL and +2 is LH.
pub fn transcribe_pitch(p: &PitchTrack) -> Result<ToneString, ToneError> {
    // (syllable index, level)
    let mut points = Vec::new();
    for (i, (_, pitch)) in p.syllables.iter().enumerate() {
        match *pitch {
            Pitch::Level(l) => points.push((i, l as i32)),
            Pitch::Contour(a, b) => {
                points.push((i, a as i32));
                points.push((i, b as i32));
            }
        }
    }
    if points.is_empty() {
        return Err(ToneError::UndeterminedRegister);
    }
    // Tone before and after each step; `None` for a level step.
    let mut steps = Vec::new();
    for w in points.windows(2) {
        let ((s1, a), (s2, b)) = (w[0], w[1]);
        let d = b - a;
        let within = s1 == s2;
        let pair = match (within, d) {
            (false, 0) => None,
            (false, -2) | (true, -2) => Some((Tone::H, Tone::L, false)),
            (false, -1) => Some((Tone::H, Tone::H, true)),
            (false, 1) | (true, 2) => Some((Tone::L, Tone::H, false)),
            _ => return Err(ToneError::UnmappableInterval { position: s2, interval: d }),
        };
        steps.push((s2, d, pair));
    }
    let first = steps
        .iter()
        .find_map(|&(_, _, pair)| pair.map(|(before, _, _)| before))
        .ok_or(ToneError::UndeterminedRegister)?;

    let mut tones = vec![(first, false)];
    for &(position, interval, pair) in &steps {
        let prev = tones.last().unwrap().0;
        match pair {
            None => tones.push((prev, false)),
            Some((before, after, down)) => {
                if before != prev {
                    return Err(ToneError::UnmappableInterval { position, interval });
                }
                tones.push((after, down));
            }
        }
    }

    let mut out: Vec<SyllableTones> = p
        .syllables
        .iter()
        .map(|(text, _)| SyllableTones { text: text.clone(), tones: Vec::new(), downstep: false })
        .collect();
    for (&(s, _), &(tone, down)) in points.iter().zip(&tones) {
        if out[s].tones.is_empty() {
            out[s].downstep = down;
        }
        out[s].tones.push(tone);
    }
    ToneString::new(out)
}
