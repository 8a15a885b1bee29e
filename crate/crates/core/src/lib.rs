// SPDX-License-Identifier: Apache-2.0
//! Gate-level netlist tooling: parsing, Liberty libraries, three-valued
//! simulation with coverage, technology mapping, coverage-guided fuzzing,
//! differential comparison, and library tamper detection.

pub mod clima;
pub mod diff;
pub mod fuzz;
pub mod gen;
pub mod liberty;
pub mod logic;
pub mod mapper;
pub mod netlist;
pub mod sim;
pub mod stimulus;
pub mod vcd;
