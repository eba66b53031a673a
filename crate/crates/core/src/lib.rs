//! M-th powers in finite symplectic and orthogonal groups.
//!
//! The crate decides, from polynomial and conjugacy-class data, which elements of
//! `Sp(2n, q)` and `O^±(n, q)` are M-th powers, counts the relevant polynomial
//! families in closed form and by enumeration, assembles the corresponding
//! generating functions as exact truncated power series, and checks everything
//! against brute-force enumeration of small groups.

pub mod arith;
pub mod counting;
pub mod error;
pub mod genfun;
pub mod gfq;
pub mod linalg;
pub mod oracle;
pub mod polyring;
pub mod powerclass;
pub mod series;

pub use error::{Error, Result};
pub use gfq::{Field, FieldCtx, FieldElem};
pub use polyring::{Factorization, MilnorType, MonicPoly};
