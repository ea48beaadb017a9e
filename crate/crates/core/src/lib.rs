//! Homology polynomials of Legendrian rational links in `J¹(S¹)`, with a
//! front-diagram Morse oracle and a census of link classes.

pub mod census;
pub mod cli;
pub mod front;
pub mod gamma;
pub mod laurent;
pub mod morse;
pub mod notation;
pub mod render;
