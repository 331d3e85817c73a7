//! Header-validity types: terms, denotations, operators and notation.

pub mod denote;
pub mod notation;
pub mod term;

pub use denote::{
    denote, denote_capped, denote_within, entails, equiv, from_denotation, subtype, CapExceeded, Denotation, InstSet,
    DEFAULT_MAX_DENOTATION,
};
pub use notation::{format_denotation, parse_notation, InstNames, NotationError};
pub use term::{HeaderType, Kind};
