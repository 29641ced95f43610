//! Physical model of the biexciton–exciton cascade.

pub mod ensemble;
pub mod params;
pub mod simulate;
pub mod stream;

pub use ensemble::{
    coherent_weight, dcp_curve, ensemble_state, hh_vv_coherence, pl_decay, source_state,
};
pub use params::{CascadeParams, HBAR_UEV_NS, SPIN_SCATTERING_NS, X_LIFETIME_NS};
pub use simulate::{pulse_count, simulate};
pub use stream::{read_events, write_events, EventStream, CH_XX, CH_X_CO, CH_X_CROSS, NUM_CHANNELS};
