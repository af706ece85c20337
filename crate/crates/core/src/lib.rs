//! Covering spaces of finite 2-complexes via the Galois correspondence:
//! coset enumeration, low-index subgroups, fundamental-group presentations,
//! and the covers they determine.

pub mod complex;
pub mod corpus;
pub mod coset;
pub mod cover;
pub mod frontend;
pub mod lens;
pub mod lowindex;
pub mod presentation;
pub mod words;
