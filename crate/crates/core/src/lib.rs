// NaN must fail every validity check, so negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auditor;
pub mod cli;
pub mod constitutive;
pub mod field_grid;
pub mod solver;
