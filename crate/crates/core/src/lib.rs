//! Exact non-signaling channel simulation: distortion, Rényi capacities,
//! error and strong converse exponents, and the finite-blocklength bounds
//! that connect them.
//!
//! Quantities are in nats. Most routines are generic over the scalar type;
//! the aliases below fix it to `f64`.

// Numeric kernels index several parallel arrays at once, and `!(x > 0.0)`
// is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exponents;
pub mod io;
pub mod lp;
pub mod msgsize;
pub mod nsdist;
pub mod optim;
pub mod prob;
pub mod protocol;
pub mod renyi;
pub mod scalar;
pub mod srbounds;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use exponents::{
    correction_sequences, ee_ach_bound, ee_conv_bound, error_exponent, sc_exponent, sce_ach_bound, sce_conv_bound,
    CorrectionSequences, ExponentResult, ExponentSolver, FiniteBound,
};
pub use msgsize::{effective_rate, MessageSize};
pub use nsdist::{
    eps_ns_iid, eps_ns_iid_bruteforce, eps_ns_iid_with, eps_ns_oneshot, eps_ns_oneshot_relaxed, ReducedConfig,
    ReducedFormulation, ReducedInstance, Reference, SolveReport, SolveStatus,
};
pub use prob::{channel_tvd, positive_part_gap, tensor_power, tvd, Channel, Pmf};
pub use renyi::{max_information, mutual_information, renyi_capacity, renyi_divergence, CapacityResult, RenyiOrder};
pub use scalar::{Real, Scalar};
pub use srbounds::{sr_exponents, sr_sandwich, sr_success_sandwich, SrExponents, SrSandwich};
pub use types::{ConditionalType, TypeMixture, TypeVector};

pub type Pmf64 = Pmf<f64>;
pub type Channel64 = Channel<f64>;
pub type ExactPmf = Pmf<num_rational::BigRational>;
pub type ExactChannel = Channel<num_rational::BigRational>;
pub type SolveReport64 = SolveReport<f64>;
