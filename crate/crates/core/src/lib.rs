//! Finite monoid toolkit for binary relations and lattice-valued
//! correspondences: composition kernels, an irreducibility sieve with
//! associate-class reduction, idempotent localization, and homomorphism
//! certificates.

pub mod boolrel;
pub mod cert;
pub mod error;
pub mod lattice;
pub mod sieve;

pub use boolrel::{Relation, SetSize};
pub use cert::{Certificate, CertifyOptions, HomImage, HomMode, Verdict};
pub use error::{Error, Result};
pub use lattice::{Correspondence, Lattice, LatticeElement, Localizer};
pub use sieve::{Classification, SieveMode, Status};
