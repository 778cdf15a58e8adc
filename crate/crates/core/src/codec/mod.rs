//! Three-phase code: list code for data and hash, separator block, key code.

pub mod gf;
pub mod hash;
pub mod keycode;
pub mod listcode;
pub mod plan;
pub mod segmented;
pub mod three_phase;

pub use gf::BinaryField;
pub use hash::{hash_message, message_chunks, poly_hash, HashParams};
pub use keycode::{build_key_code, KeyCode, KeyCodeParams};
pub use listcode::{build_list_code, idle_state, list_decode, DecodeBudget, ListCode, ListCodeParams, ListDecodeOutput, ListEntry, ScoreRule};
pub use plan::{interleave_allocation, ramp_step, ramp_windows, Allocation, InterleaveParams, Layout, Phase, PhasePlan};
pub use segmented::{ExcessProfile, Segment, SegmentedCode};
pub use three_phase::{build_three_phase, disambiguate, DecodeOutcome, DecodeStatus, ThreePhaseCode, ThreePhaseParams};
