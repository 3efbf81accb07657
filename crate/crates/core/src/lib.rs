//! Electromagnetically induced grating in a four-level N-type atom driven by
//! a composite optical vortex: susceptibilities, field profiles and
//! Fraunhofer diffraction orders.

pub mod atomic;
pub mod diffraction;
pub mod fields;
pub mod runner;
