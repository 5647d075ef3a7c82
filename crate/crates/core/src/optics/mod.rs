//! Passive linear-optics simulator for the reading transceivers.
//!
//! States are tracked as one complex amplitude per spatial mode. For a
//! coherent probe these are the coherent amplitudes themselves; for a single
//! photon they are its wavefunction over modes. Both evolve identically
//! under passive optics, so the same pixel, loss and interferometer code
//! serves both, and only detection differs.

mod detect;
mod hadamard;
mod pipeline;
mod state;

pub(crate) use detect::resolve as detect_resolve;
pub use detect::{detect_coherent, detect_single_photon, ClickProfile, DetectionOutcome};
pub use hadamard::{
    beam_splitter, green_machine, green_machine_in_place, hadamard_codebook, hadamard_sign,
    prepare_wstate, HadamardCodebook,
};
pub use pipeline::{read_cycle, ReadScheme, Transceiver, MAX_SIMULATED_MODES};
pub use state::{apply_uniform_loss, modulate, ModeAmplitudes, PixelPattern, StateKind};
