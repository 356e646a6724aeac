//! Autosegmental charts and tone.
//!
//! A [`Chart`] is a set of tiers with association lines between them. The
//! tone operations read a syllable tier `syl` and a tone tier `tone`, spread
//! H tones, read off tonal transcriptions, and convert between tones and
//! the five-level pitch tracks of a terrace-tone language.

mod chart;
mod pitch;
mod tone;

use thiserror::Error;

pub use chart::{apply_hts, Association, Chart, Tier, SYL, TONE};
pub use pitch::{interval_census, parse_tracks, Census, Pitch, PitchTrack, TrackRecord, CENSUS_INTERVALS, TOP_LEVEL};
pub use tone::{
    render_pitch, tone_intervals, tones_of_chart, transcribe_pitch, SyllableTones, Tone, ToneString, ALL_LOW,
    FIRST_HIGH, MAX_LEVEL,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToneError {
    #[error("association {0:?} points outside its tiers")]
    DanglingAssociation(Association),
    #[error("associations {0:?} and {1:?} cross")]
    Crossing(Association, Association),
    #[error("chart has no tier named `{0}`")]
    MissingTier(String),
    #[error("{syllables} syllables but {tones} tones")]
    LengthMismatch { syllables: usize, tones: usize },
    #[error("syllable {0} has no tone")]
    UnassociatedSyllable(usize),
    #[error("`{0}` is not a tone (expected H or L)")]
    BadTone(String),
    #[error("syllable {0} must carry one tone or two different tones")]
    BadContour(usize),
    #[error("downstep on syllable {0} must mark an H that follows an H")]
    BadDownstep(usize),
    #[error("bad pitch `{0}`")]
    BadPitch(String),
    #[error("level {0} is above the top of the pitch range")]
    RangeExceeded(i32),
    #[error("a flat track does not determine H or L")]
    UndeterminedRegister,
    #[error("interval {interval:+} at syllable {position} has no tonal reading")]
    UnmappableInterval { position: usize, interval: i32 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
