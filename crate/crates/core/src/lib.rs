//! Digit-level multiplier construction, simulation and transistor costing.
//!
//! The crate builds binary and quaternary multipliers out of a small
//! behavioral cell library, checks them exhaustively against integer
//! arithmetic and prices them under fixed transistor-count schemes.
//!
//! - [`value`]: wire ranges, digit vectors, radix conversion
//! - [`cells`]: the cell library and its truth tables
//! - [`netlist`]: ranged nets, instances, validation, evaluation, JSON form
//! - [`generators`]: partial products, column compression, final adders
//! - [`costing`]: cost schemes, bills of cells, comparisons
//! - [`verify`]: exhaustive and sampled oracle checks
//! - [`report`]: the reproduction report for the published tables

pub mod cells;
pub mod costing;
pub mod generators;
pub mod netlist;
pub mod report;
pub mod value;
pub mod verify;
