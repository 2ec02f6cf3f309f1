pub mod divergence;
pub mod exact;
pub mod exponent;
pub mod tradeoff;
pub mod verify;
