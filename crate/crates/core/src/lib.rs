//! Exact lattice, incidence-geometry and elliptic-fibration machinery for
//! Enriques quotients of the supersingular K3 surface of Artin invariant 1
//! in characteristic 2.

pub mod exactlat;
pub mod json;
pub mod pg4;
pub mod nsmodel;
pub mod dynkin;
pub mod fibrations;
pub mod quotient;
