pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod laurent;
pub mod loopmat;
pub mod orbits;
pub mod rational;
pub mod superroots;
pub mod verify;
pub mod zastava;

pub use config::{ColoredDivisor, StalkParity};
pub use error::{Error, Result};
pub use laurent::{LaurentScalar, TruncatedSeries, Valuation};
pub use loopmat::{GroupPattern, LoopMatrix, Orientation, PatternTag};
pub use orbits::{classify, classify_point, semi_infinite_weight, stratum_b, BStratum, OrbitPoint};
pub use rational::Rational;
pub use superroots::{RootVector, SuperWeight};
pub use zastava::{Cor813, DimReport};
