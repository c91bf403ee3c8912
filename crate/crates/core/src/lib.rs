//! Exact arithmetic codings of hyperbolic automorphisms of the 2-torus.
//!
//! The crate is organised bottom-up:
//!
//! * [`qfield`]: exact arithmetic in real quadratic fields, units of orders.
//! * [`mat`]: 2×2 integer matrices.
//! * [`binforms`]: indefinite binary quadratic forms, reduction, representation.
//! * [`glz`]: hyperbolic matrices in GL(2,Z), conjugacy and the associated form.
//! * [`betasym`]: β-expansions for quadratic units, admissible words and compacta.
//! * [`coding`]: homoclinic points, arithmetic codings and their fundamental domains.

pub mod betasym;
pub mod binforms;
pub mod coding;
pub mod error;
pub mod glz;
pub mod json_int;
pub mod mat;
pub mod qfield;
