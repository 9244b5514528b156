//! Simulation of accelerated population transfer in a three-level Λ system.
//!
//! The jump protocol applies the dark-state Hamiltonian at `N` fixed mixing
//! angles for `π/Ω` each, which cancels every diabatic error exactly. A
//! Gaussian-pulse STIRAP implementation serves as the adiabatic baseline.
//!
//! Conventions: basis `{|0>, |-1>, |+1>}`, time in µs, angular frequencies in
//! rad/µs. User-facing quantities (ns, MHz as quantity/2π) are converted in
//! [`units`].

pub mod experiments;
pub mod figures;
pub mod io;
pub mod model;
pub mod propagate;
pub mod schedules;
pub mod smallmat;
pub mod units;

pub use experiments::{Protocol, ProtocolKind, ScanPoint, ScanResult};
pub use propagate::{PopulationSample, PopulationTrace, PropagateError};
pub use schedules::{JumpSchedule, StirapConfig};
pub use smallmat::{ComplexMatrix, StateVector};
