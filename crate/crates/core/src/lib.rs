//! Simulation and control synthesis for a driven two-qubit anisotropic Ising
//! system, worked in the Bell basis.
//!
//! The crate builds the exact Bell-basis propagators of the single-axis
//! driven Ising Hamiltonian, cross-checks them against an independent
//! spectral oracle, and synthesizes magnetic-pulse prescriptions realizing
//! evolution loops, Bell-state exchange operations and the generalized
//! diagonal/antidiagonal gate families. On top of that sit concurrence
//! dynamics with field-tuning prescriptions, an S³ representation chart for
//! trajectory export, gate equivalences and an Ising-driven teleportation
//! protocol.

pub mod error;
pub mod entanglement;
pub mod evolution;
pub mod gates;
pub mod geometry;
pub mod math;
pub mod model;
pub mod state;
pub mod synthesis;
pub mod verify;

pub use error::Error;
pub use entanglement::{ConcurrenceTrace, TuningField};
pub use evolution::{FormClass, SectorMatrix, UnitaryBell};
pub use gates::{EquivalenceReport, GateExpr, MeasurementBasis, TeleportOutcome};
pub use geometry::{ChartPoint, Projection, Trajectory};
pub use math::{C64, Mat2, Mat4};
pub use model::{Axis, DerivedParams, EigenBasis, EnergySpectrum, PhysicalParams, Sign};
pub use state::{Basis, TwoQubitState};
pub use synthesis::{ExchangeSelectors, LoopSelectors, PulseSpec, SynthesisError, TwoPulseSpec};
pub use verify::SuiteReport;
