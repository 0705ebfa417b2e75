//! Classification of weighted composition operators `W = M_u C_φ` on
//! discrete weighted measure spaces.
//!
//! The closed-form path computes the sequence `J_n` with `W*ⁿWⁿ = M_{J_n}`
//! and reads off isometry, m-isometry, quasi-isometry and quasi-m-isometry
//! from alternating binomial sums of it. The [`matrix_oracle`] rebuilds `W`
//! as a dense matrix and checks every verdict from the operator definitions.
//!
//! ```
//! use wcomp::measure_space::load_space;
//! use wcomp::classifier::{classify, DEFAULT_TOLERANCE};
//!
//! let sys = load_space(r#"{"masses": [1, 1], "phi": [0, 0], "u": [1, 1]}"#).unwrap();
//! let v = classify(&sys.space, &sys.u, &sys.phi, 1, DEFAULT_TOLERANCE).unwrap();
//! assert!(!v.is_isometry && v.is_quasi_isometry);
//! ```

pub mod classifier;
pub mod cli;
pub mod error;
pub mod exact;
pub mod interval_examples;
pub mod matrix_oracle;
pub mod measure_space;
pub mod operator_calculus;

pub use error::{Error, Result};
