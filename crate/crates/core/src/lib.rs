pub mod extform;
pub mod gf2;
pub mod matroid;
pub mod rational;
pub mod graphic;
pub mod decomp;
pub mod par;
pub mod samples;
pub mod verify;
