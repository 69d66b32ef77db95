pub mod exponents;
pub mod params;
pub mod finwidths;
pub mod seqmodel;
pub mod allocator;
pub mod verify;
pub mod cli;
