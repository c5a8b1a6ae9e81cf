//! B-free integers and sets of multiples: exact densities, window measures on
//! finite quotients, block statistics of the B-free subshift and tautness
//! diagnostics.

pub mod cli;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod primes;
pub mod sets;
pub mod sieve;
pub mod taut;
pub mod window;

pub use density::{exact_density, DensityEstimate, ExactDensity, Limits};
pub use dynamics::{Block, BlockSet};
pub use error::{Error, ErrorKind, Result};
pub use sets::{BSet, FamilySpec, Modulus};
pub use sieve::{sieve_interval, EtaSegment};
