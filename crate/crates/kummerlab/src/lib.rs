//! Kummer function spaces over the p-adic integers: Mahler expansions,
//! digit-lifting zero and fixed-point solvers, and p-adic L-functions of
//! quadratic characters together with their Bernoulli-number backends.

pub mod arith;
pub mod charnum;
pub mod error;
pub mod fermat;
pub mod lfunc;
pub mod mahler;
pub mod padic;
pub mod solver;

pub use charnum::{Backend, QuadChar};
pub use error::{Error, Result};
pub use fermat::TSpec;
pub use lfunc::{LplSpec, PairReport, ScanKind, ScanResult, StructureReport};
pub use mahler::{Bound, Classification, DegenerateFn, KummerFn, Label};
pub use padic::{DigitExpansion, PadicApprox};
pub use solver::{FixedPointResult, TwoZeros, ZeroMethod, ZeroResult};
