pub mod expr;
pub mod diffop;
pub mod potentials;
pub mod xform;
pub mod liealg;
pub mod numeric;
