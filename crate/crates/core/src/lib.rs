pub mod exterior;
pub mod field;
pub mod pfaffloci;
pub mod scanner;
pub mod session;
pub mod chords;
pub mod dualside;
pub mod orbits8;
