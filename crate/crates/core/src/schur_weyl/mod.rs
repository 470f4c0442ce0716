//! Schur–Weyl block diagonalization of the orbit basis.
//!
//! Blocks are indexed by partitions `λ` of `n` with at most `d` rows. Block
//! `λ` has size `m_λ` (semistandard tableaux) and appears `f_λ` times
//! (standard tableaux). Matrix elements of orbit matrices in the Young
//! basis are the coefficients of encoding polynomials `f_{τ,γ}`, computed
//! either from count functions or by differential operators.

mod change_of_basis;
mod count_functions;
mod differential;
mod partition;
mod poly;
mod tableau;
mod transition;

pub use change_of_basis::{gram, ChangeOfBasis, LambdaData, PolyMethod, CACHE_MAGIC, CACHE_VERSION};
pub use count_functions::encoding_poly_m1;
pub use differential::{column_shifted, constant_polynomial, encoding_poly_m2, leading_minor, row_shifted};
pub use partition::{partitions, ssyt_count, syt_count, Partition};
pub use poly::{minor, EncodingPolynomial};
pub use tableau::{ssyt_enumerate, Tableau};
pub use transition::{transition_action, MulSide};
