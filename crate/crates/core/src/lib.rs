//! Exact coevent engine for the n-site quantum hopper.
//!
//! Histories of a particle hopping on `Z_n` carry amplitudes in `Z[ζ_m]`.
//! An event (set of histories) is precluded when its quantal measure
//! vanishes; the multiplicative scheme then picks out primitive coevents
//! `F*` whose supports `F` are the minimal sets contained in no precluded
//! event. Everything here is decided exactly: cyclotomic zero tests,
//! big-integer counts, rational averages.

pub mod analysis;
pub mod cli;
pub mod coevents;
pub mod cyclotomic;
pub mod error;
pub mod histories;
pub mod limits;
pub mod measure;
pub mod model;

pub use cyclotomic::CycInt;
pub use error::{Error, Result};
pub use histories::{enumerate, Event, FinalSite, History, HistorySpace};
pub use limits::Limits;
pub use model::{initial_state, InitialState, LatticeSpec, StateLabel};
