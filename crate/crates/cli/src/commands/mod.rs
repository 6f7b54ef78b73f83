pub mod construct;
pub mod evolve;
pub mod greens_cmd;
pub mod scatter;
pub mod verify;
