//! Finite posets, finite Heyting algebras, and the duality between them,
//! specialised to étale H-algebras and presheaves on finite posets.

pub mod cli;
pub mod duality;
pub mod etale;
pub mod heyting;
pub mod limits;
pub mod oracle;
pub mod poset;
pub mod presheaf;
pub mod suites;
