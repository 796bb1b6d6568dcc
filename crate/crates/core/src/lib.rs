//! Theta functions with rational characteristics and verifiers for the
//! identities that relate them.
//!
//! The crate is organised bottom-up:
//!
//! - [`genus1`]: Jacobi theta functions, characteristic thetas, Dedekind eta.
//! - [`genus2`]: two-variable theta functions over symmetric period matrices.
//! - [`landen`]: Landen transformations of order `p`, ratio and phase identities,
//!   the Gauss AGM step.
//! - [`double_product`]: products of two genus-1 thetas written as genus-2 sums.
//! - [`cubic`]: the Borwein `a`, `b`, `c` series and ternary cube-sum identities.
//! - [`qexact`]: exact truncated q-series over the integers.
//! - [`registry`]: the catalog of runnable identity checks.
//!
//! Nome conventions: `q = e^{πiτ}` everywhere except [`genus1::dedekind_eta`],
//! which uses `q = e^{2πiτ}`.

pub mod characteristic;
pub mod cubic;
pub mod double_product;
pub mod error;
pub mod genus1;
pub mod genus2;
pub mod landen;
pub mod numeric;
pub mod qexact;
pub mod registry;
pub mod report;

pub use characteristic::{rat, CharPair, CharQuad};
pub use error::{Error, Result};
pub use genus1::TauPoint;
pub use genus2::{PeriodMatrix2, SymmetricTau};
pub use numeric::Tolerance;
pub use report::{IdentityReport, ParamValue, Params, Side, Verdict};

pub use num_complex::Complex64;
pub use num_rational::Rational64;
