//! Asymmetric quantum cloning machines: construction, optimal phase-covariant
//! trade-offs, no-signaling feasibility and entanglement of the outputs.
//!
//! The crate is organized bottom-up:
//!
//! * [`qlinalg`]: dense complex matrices, tensor products, partial traces and
//!   transposes, Hermitian spectra.
//! * [`cloner`]: the `1 → 2` cloning isometry in dimension `d`, its outputs,
//!   fidelities and shrinking factors.
//! * [`pcopt`]: phase-covariant shrinking factors and the optimal asymmetric frontier.
//! * [`nosignal`]: two-qubit correlation tensors, the no-signaling constraint and
//!   the `η_A² + η_B² ≤ 1` feasibility bound.
//! * [`entangle`]: partial-transpose spectra, negativity, concurrence and the 3-tangle.
//!
//! ```
//! use qcloning::cloner::{apply, equatorial_state, ClonerParams};
//!
//! let p = ClonerParams::phase_covariant(2, 0.5, 0.5).unwrap();
//! let out = apply(&p, &equatorial_state(2, &[0.0, 1.0]).unwrap()).unwrap();
//! assert!((out.f_a - (0.5 + 1.0 / 8f64.sqrt())).abs() < 1e-12);
//! ```

pub mod cloner;
pub mod entangle;
pub mod error;
pub mod nosignal;
pub mod pcopt;
pub mod qlinalg;

pub use error::{Error, Result};
pub use qlinalg::{ComplexMatrix, SubsystemShape};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cloning-machine.md")]
    mod cloning_machine {}
    #[doc = include_str!("../../../book/src/phase-covariant.md")]
    mod phase_covariant {}
    #[doc = include_str!("../../../book/src/no-signaling.md")]
    mod no_signaling {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/cli-and-plotting.md")]
    mod cli_and_plotting {}
}
