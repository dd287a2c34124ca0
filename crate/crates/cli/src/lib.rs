//! Library side of the `dualrisk` command-line tool: built-in reference
//! tables with embedded golden values, figure data series, and the output
//! formatting shared by the binary and the acceptance suite.

pub mod figures;
pub mod output;
pub mod tables;
