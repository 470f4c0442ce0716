//! Permutation-invariant operators on `n`-fold tensor powers in the orbit
//! basis, their Schur–Weyl block diagonalization and the symmetric seesaw
//! for lower bounds on `n`-copy channel fidelity.
//!
//! The layers, bottom up:
//!
//! * [`orbit`] and [`marginal`]: count-matrix orbit bases and exact
//!   combinatorics on orbit coefficients.
//! * [`link`]: channel concatenation on orbit coefficients.
//! * [`schur_weyl`] and [`block`]: the maps `ψ`, `ψ̃` into irreducible blocks
//!   and the constraint algebra performed there.
//! * [`algebra`]: the same for block-diagonal (classical-quantum) algebras.
//! * [`channels`] and [`seesaw`]: Choi matrices, fidelities and the
//!   alternating optimization.
//! * [`validate`]: dense-oracle self-checks.

pub mod algebra;
pub mod block;
pub mod channels;
pub mod combinatorics;
pub mod error;
pub mod linalg;
pub mod link;
pub mod marginal;
pub mod orbit;
pub mod schur_weyl;
pub mod seesaw;
pub mod validate;

pub use algebra::{AlgebraSpec, AlgebraTables, FlagProfile};
pub use block::{BlockLayout, BlockMap, BlockRep, Gauge};
pub use channels::{entanglement_fidelity, reference_curve, ChoiMatrix, ReferenceCurve};
pub use combinatorics::Exact;
pub use error::{Error, Result};
pub use link::{RefCoefficients, TripartiteTable};
pub use marginal::MarginalData;
pub use orbit::{CountMatrix, OrbitBasis, OrbitCoefficients, Side, Support, SystemSpec, C64};
pub use schur_weyl::{ChangeOfBasis, Partition, PolyMethod};
pub use seesaw::{seesaw_flagged, seesaw_run, sweep, SeesawConfig, SeesawResult, TableProvider};
