//! The eighteen built-in reference tables: fixed model instances, embedded
//! golden values, and the analytic computations that reproduce them.
//!
//! Golden values are kept exactly as published in the bundled reference
//! data. Note that recomputation does not match every golden cell: the
//! sources of tables 1-8 carry a systematic error in the dividend-race
//! quantities (their printed values violate the very integro-differential
//! equations they are defined by, and disagree with Monte Carlo), and the
//! gain-count-to-target tables 10-13 and 15-18 have inconsistent m >= 2
//! rows away from v = b - u = 0. The computed columns here are the ones
//! cross-validated by simulation; `reproduce` reports the differences
//! honestly instead of patching either side.

use dualrisk_core::counts::{GainCountChain, TargetCountChain};
use dualrisk_core::divdist::DividendDistribution;
use dualrisk_core::dividends::{self, DividendTransform};
use dualrisk_core::{CoreError, GainDistribution, ModelSpec};

pub const DELTA: f64 = 0.02;

/// Erlang(2, rate 1) gains, lambda = 2, shape 2 inter-arrivals.
pub fn erlang_spec(c: f64, barrier: Option<f64>) -> ModelSpec {
    ModelSpec::new(2, 2.0, c, GainDistribution::erlang(2, 1.0).unwrap(), DELTA, barrier)
        .expect("valid built-in spec")
}

/// Combination-of-exponentials gains 3 e^{-3x/2} - 3 e^{-3x}.
pub fn comb_spec(c: f64, barrier: Option<f64>) -> ModelSpec {
    let gains = GainDistribution::new(vec![(2.0, 1.5, 1), (-1.0, 3.0, 1)]).unwrap();
    ModelSpec::new(2, 2.0, c, gains, DELTA, barrier).expect("valid built-in spec")
}

#[derive(Debug, Clone, Copy)]
pub enum TableKind {
    /// phi0(b), phi1(b), V(b,b), chi(b,b) for a list of barrier levels.
    BarrierSummary { c: f64 },
    /// phi1(u), phi0(u), V(b,b), product, V(u,b), chi(u,b) for (u,b) pairs.
    PairSummary { c: f64 },
    /// G(u, b; x) over a (u, x) grid.
    DividendCdf { c: f64, b: f64 },
    /// q(u, m) over m rows and u columns.
    GainCountRuin { comb: bool },
    /// r(u, b, m) rows m = 1, 2 and the ">= 3" complement.
    GainCountTarget { comb: bool, c: f64, b: f64 },
}

pub struct TableDef {
    pub id: u32,
    pub title: &'static str,
    pub kind: TableKind,
    /// Label of the leading (row-name) column.
    pub row_header: &'static str,
    pub col_labels: &'static [&'static str],
    pub row_labels: &'static [&'static str],
    pub golden: &'static [&'static [f64]],
    /// Numeric row coordinates (barrier levels, u values, m indices ...).
    pub rows: &'static [f64],
    /// Numeric column coordinates where applicable (x or u values).
    pub cols: &'static [f64],
}

const BARRIERS: [f64; 8] = [1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 9.0, 10.0];
const PAIRS: [(f64, f64); 4] = [(1.0, 2.0), (1.0, 9.0), (3.0, 6.0), (5.0, 9.0)];

pub fn all_ids() -> Vec<u32> {
    (1..=18).collect()
}

pub fn table(id: u32) -> Option<&'static TableDef> {
    TABLES.iter().find(|t| t.id == id)
}

/// Compute the table's cells with the analytic machinery.
pub fn compute(def: &TableDef) -> Result<Vec<Vec<f64>>, CoreError> {
    match def.kind {
        TableKind::BarrierSummary { c } => {
            let mut rows = Vec::new();
            for &b in def.rows {
                let spec = erlang_spec(c, Some(b));
                let phi0 = DividendTransform::new(&spec, 0, DELTA)?.value(b)?;
                let phi1 = DividendTransform::new(&spec, 1, DELTA)?.value(b)?;
                let v = dividends::v_moment(&spec, 1, DELTA, b)?;
                let chi = DividendDistribution::new(&spec)?.chi(b)?;
                rows.push(vec![phi0, phi1, v, chi]);
            }
            Ok(rows)
        }
        TableKind::PairSummary { c } => {
            let mut rows = Vec::new();
            for &(u, b) in PAIRS.iter() {
                let spec = erlang_spec(c, Some(b));
                let phi1_u = DividendTransform::new(&spec, 1, DELTA)?.value(u)?;
                let phi0_u = DividendTransform::new(&spec, 0, DELTA)?.value(u)?;
                let v_bb = dividends::v_moment(&spec, 1, DELTA, b)?;
                let v_ub = dividends::v_moment(&spec, 1, DELTA, u)?;
                let chi = DividendDistribution::new(&spec)?.chi(u)?;
                rows.push(vec![phi1_u, phi0_u, v_bb, phi0_u * v_bb, v_ub, chi]);
            }
            Ok(rows)
        }
        TableKind::DividendCdf { c, b } => {
            let spec = erlang_spec(c, Some(b));
            let dist = DividendDistribution::new(&spec)?;
            let mut rows = Vec::new();
            for &u in def.rows {
                let mut row = Vec::new();
                for &x in def.cols {
                    row.push(dist.cdf(u, x)?);
                }
                rows.push(row);
            }
            Ok(rows)
        }
        TableKind::GainCountRuin { comb } => {
            let spec = if comb { comb_spec(1.0, None) } else { erlang_spec(1.0, None) };
            let mut chain = GainCountChain::new(&spec);
            let mut rows = Vec::new();
            for &m in def.rows {
                let mut row = Vec::new();
                for &u in def.cols {
                    row.push(chain.value(u, m as usize)?);
                }
                rows.push(row);
            }
            Ok(rows)
        }
        TableKind::GainCountTarget { comb, c, b } => {
            let spec = if comb { comb_spec(c, Some(b)) } else { erlang_spec(c, Some(b)) };
            let mut chain = TargetCountChain::new(&spec)?;
            let mut r1 = Vec::new();
            let mut r2 = Vec::new();
            let mut tail = Vec::new();
            for &u in def.cols {
                let a = chain.value(u, b, 1)?;
                let bb = chain.value(u, b, 2)?;
                r1.push(a);
                r2.push(bb);
                // income satisfied for every built-in target table
                tail.push(1.0 - a - bb);
            }
            Ok(vec![r1, r2, tail])
        }
    }
}

/// Tolerance check for one cell: absolute tolerance, plus a two-significant-
/// figure requirement on golden values printed in scientific notation.
pub fn cell_matches(computed: f64, golden: f64, tol: f64) -> bool {
    let diff = (computed - golden).abs();
    if diff > tol {
        return false;
    }
    if golden != 0.0 && golden.abs() < 1e-3 {
        let mag = 10f64.powf(golden.abs().log10().floor() - 1.0);
        return diff <= 0.5 * mag + 1e-15;
    }
    true
}

pub struct Comparison {
    pub computed: Vec<Vec<f64>>,
    pub worst_abs_diff: f64,
    /// (row index, col index, computed, golden) for every failing cell.
    pub failures: Vec<(usize, usize, f64, f64)>,
}

pub fn compare(def: &TableDef, tol: f64) -> Result<Comparison, CoreError> {
    let computed = compute(def)?;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (i, row) in computed.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let g = def.golden[i][j];
            worst = worst.max((v - g).abs());
            if !cell_matches(v, g, tol) {
                failures.push((i, j, v, g));
            }
        }
    }
    Ok(Comparison { computed, worst_abs_diff: worst, failures })
}

macro_rules! rows {
    ($($($v:expr),+);+ $(;)?) => {
        &[ $( &[ $($v),+ ] ),+ ]
    };
}

static TABLES: &[TableDef] = &[
    TableDef {
        id: 1,
        title: "phi0, phi1, V and chi at u = b (c = 0.75)",
        kind: TableKind::BarrierSummary { c: 0.75 },
        row_header: "b",
        col_labels: &["E(e^-0.02 tau_b)", "E(e^-0.02 tau_b D_b)", "V(b,b,0.02)", "chi(b,b)"],
        row_labels: &["1", "2", "3", "4", "5", "7", "9", "10"],
        rows: &BARRIERS,
        cols: &[],
        golden: rows![
            0.66445, 1.18567, 3.53353, 0.67466;
            0.90939, 1.51352, 16.70411, 0.93280;
            0.95824, 1.57111, 37.62031, 0.98707;
            0.96715, 1.58134, 48.13442, 0.99755;
            0.96874, 1.58316, 50.64987, 0.99954;
            0.96908, 1.58354, 51.21171, 0.99998;
            0.96909, 1.58355, 51.22976, 1.00000;
            0.96909, 1.58355, 51.23025, 1.00000
        ],
    },
    TableDef {
        id: 2,
        title: "phi0, phi1, V and chi at u = b (c = 1)",
        kind: TableKind::BarrierSummary { c: 1.0 },
        row_header: "b",
        col_labels: &["E(e^-0.02 tau_b)", "E(e^-0.02 tau_b D_b)", "V(b,b,0.02)", "chi(b,b)"],
        row_labels: &["1", "2", "3", "4", "5", "7", "9", "10"],
        rows: &BARRIERS,
        cols: &[],
        golden: rows![
            0.50218, 0.91481, 1.83765, 0.50822;
            0.79762, 1.32791, 6.56131, 0.81577;
            0.90491, 1.45485, 15.29962, 0.93251;
            0.94222, 1.49649, 25.89859, 0.97527;
            0.95513, 1.51064, 33.66764, 0.99092;
            0.96116, 1.51719, 39.05850, 0.99877;
            0.96188, 1.51798, 39.82178, 0.99983;
            0.96194, 1.51805, 39.89141, 0.99994
        ],
    },
    TableDef {
        id: 3,
        title: "phi0, phi1, V and chi at u = b (c = 2.1)",
        kind: TableKind::BarrierSummary { c: 2.1 },
        row_header: "b",
        col_labels: &["E(e^-0.02 tau_b)", "E(e^-0.02 tau_b D_b)", "V(b,b,0.02)", "chi(b,b)"],
        row_labels: &["1", "2", "3", "4", "5", "7", "9", "10"],
        rows: &BARRIERS,
        cols: &[],
        golden: rows![
            0.18569, 0.35710, 0.43853, 0.18677;
            0.37520, 0.67356, 1.07805, 0.37956;
            0.49632, 0.84771, 1.68302, 0.50504;
            0.57398, 0.94912, 2.22789, 0.58756;
            0.62610, 1.01327, 2.71002, 0.64473;
            0.68915, 1.08716, 3.49733, 0.71788;
            0.72393, 1.12633, 4.07993, 0.76240;
            0.73554, 1.13917, 4.30751, 0.77865
        ],
    },
    TableDef {
        id: 4,
        title: "single-dividend decomposition at (u, b) pairs (c = 0.75)",
        kind: TableKind::PairSummary { c: 0.75 },
        row_header: "(u,b)",
        col_labels: &[
            "E(e^-0.02 tau_u D_u)",
            "E(e^-0.02 tau_u)",
            "V(b,b,0.02)",
            "(2)x(3)",
            "V(u,b,0.02)",
            "chi(u,b)",
        ],
        row_labels: &["(1,2)", "(1,9)", "(3,6)", "(5,9)"],
        rows: &[],
        cols: &[],
        golden: rows![
            0.94704, 0.63804, 16.70411, 10.65792, 11.60496, 0.65587;
            0.81080, 0.57189, 51.22976, 29.29770, 30.10850, 0.65537;
            1.27723, 0.91397, 51.12592, 46.72777, 48.00500, 0.98639;
            1.27042, 0.91014, 51.22976, 46.62648, 47.89690, 0.99951
        ],
    },
    TableDef {
        id: 5,
        title: "single-dividend decomposition at (u, b) pairs (c = 1)",
        kind: TableKind::PairSummary { c: 1.0 },
        row_header: "(u,b)",
        col_labels: &[
            "E(e^-0.02 tau_u D_u)",
            "E(e^-0.02 tau_u)",
            "V(b,b,0.02)",
            "(2)x(3)",
            "V(u,b,0.02)",
            "chi(u,b)",
        ],
        row_labels: &["(1,2)", "(1,9)", "(3,6)", "(5,9)"],
        rows: &[],
        cols: &[],
        golden: rows![
            0.68765, 0.45254, 6.56131, 2.96927, 3.65691, 0.46254;
            0.52816, 0.38404, 39.82178, 15.29300, 15.82116, 0.44598;
            1.16429, 0.84462, 37.51689, 31.68760, 32.85189, 0.91918;
            1.21507, 0.88320, 39.82178, 35.17081, 36.38588, 0.98898
        ],
    },
    TableDef {
        id: 6,
        title: "single-dividend decomposition at (u, b) pairs (c = 2.1)",
        kind: TableKind::PairSummary { c: 2.1 },
        row_header: "(u,b)",
        col_labels: &[
            "E(e^-0.02 tau_u D_u)",
            "E(e^-0.02 tau_u)",
            "V(b,b,0.02)",
            "(2)x(3)",
            "V(u,b,0.02)",
            "chi(u,b)",
        ],
        row_labels: &["(1,2)", "(1,9)", "(3,6)", "(5,9)"],
        rows: &[],
        cols: &[],
        golden: rows![
            0.22002, 0.12751, 1.07805, 0.13747, 0.35748, 0.12863;
            0.04402, 0.03084, 4.07993, 0.12582, 0.16984, 0.03465;
            0.38458, 0.26199, 3.13178, 0.82050, 1.20507, 0.27667;
            0.45775, 0.32041, 4.07993, 1.30723, 1.76498, 0.35670
        ],
    },
    TableDef {
        id: 7,
        title: "distribution G(u, 5; x) (c = 1)",
        kind: TableKind::DividendCdf { c: 1.0, b: 5.0 },
        row_header: "u",
        col_labels: &["x=1", "x=2", "x=3", "x=4", "x=5"],
        row_labels: &["1", "2", "3", "4", "5"],
        rows: &[1.0, 2.0, 3.0, 4.0, 5.0],
        cols: &[1.0, 2.0, 3.0, 4.0, 5.0],
        golden: rows![
            0.185349, 0.31486, 0.385064, 0.41919, 0.41919;
            0.324635, 0.551758, 0.674932, 0.73482, 0.762214;
            0.379865, 0.647155, 0.792408, 0.863104, 0.895462;
            0.393353, 0.677656, 0.8336, 0.909861, 0.944866;
            0.363765, 0.663592, 0.834962, 0.920472, 0.960195
        ],
    },
    TableDef {
        id: 8,
        title: "distribution G(u, 10; x) (c = 1)",
        kind: TableKind::DividendCdf { c: 1.0, b: 10.0 },
        row_header: "u",
        col_labels: &["x=1", "x=2", "x=3", "x=5", "x=7", "x=9", "x=10"],
        row_labels: &["1", "2", "3", "4", "5", "6", "7", "8", "9", "10"],
        rows: &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0],
        cols: &[1.0, 2.0, 3.0, 5.0, 7.0, 9.0, 10.0],
        golden: rows![
            0.185125, 0.314405, 0.384471, 0.4341, 0.443882, 0.445621, 0.445828;
            0.32454, 0.55118, 0.674011, 0.761016, 0.778164, 0.781213, 0.781576;
            0.381331, 0.647632, 0.791958, 0.894188, 0.914338, 0.917919, 0.918347;
            0.402645, 0.683834, 0.83623, 0.944175, 0.965452, 0.969233, 0.969685;
            0.410505, 0.697198, 0.852579, 0.96264, 0.984334, 0.98819, 0.98865;
            0.413332, 0.702069, 0.858571, 0.969433, 0.991285, 0.995169, 0.995633;
            0.414052, 0.703625, 0.860646, 0.971903, 0.993837, 0.997736, 0.998202;
            0.412789, 0.703074, 0.860789, 0.972672, 0.99475, 0.998676, 0.999145;
            0.405047, 0.697517, 0.857887, 0.972288, 0.994959, 0.999, 0.999484;
            0.367508, 0.669949, 0.842736, 0.968972, 0.994436, 0.999017, 0.999567
        ],
    },
    TableDef {
        id: 9,
        title: "gain count before ruin q(u, m) (Erlang gains, c = 1)",
        kind: TableKind::GainCountRuin { comb: false },
        row_header: "m",
        col_labels: &["u=0", "u=0.2", "u=0.5", "u=0.7", "u=1", "u=3", "u=5", "u=10"],
        row_labels: &["0", "1", "2", "3", "4", "5"],
        rows: &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
        cols: &[0.0, 0.2, 0.5, 0.7, 1.0, 3.0, 5.0, 10.0],
        golden: rows![
            1.0, 0.938448, 0.735759, 0.591833, 0.406006, 0.017351, 0.0004994, 4.33e-8;
            0.0, 0.014697, 0.054501, 0.075185, 0.090224, 0.021482, 0.0014293, 4.12e-7;
            0.0, 0.003270, 0.013852, 0.020929, 0.028787, 0.015305, 0.0018590, 1.47e-6;
            0.0, 0.001317, 0.005707, 0.008798, 0.012558, 0.009655, 0.0017568, 3.16e-6;
            0.0, 0.000655, 0.002866, 0.004454, 0.006455, 0.006024, 0.0014366, 4.97e-6;
            0.0, 0.000364, 0.001600, 0.002496, 0.003648, 0.003820, 0.0010973, 6.39e-6
        ],
    },
    TableDef {
        id: 10,
        title: "gain count to reach b = 5, r(u, 5, m) (Erlang gains, c = 1)",
        kind: TableKind::GainCountTarget { comb: false, c: 1.0, b: 5.0 },
        row_header: "m",
        col_labels: &["u=0", "u=0.2", "u=0.5", "u=0.7", "u=1", "u=2", "u=3", "u=4", "u=5"],
        row_labels: &["1", "2", ">=3"],
        rows: &[1.0, 2.0, 3.0],
        cols: &[0.0, 0.2, 0.5, 0.7, 1.0, 2.0, 3.0, 4.0, 5.0],
        golden: rows![
            0.01996, 0.02365, 0.03045, 0.03598, 0.04613, 0.10326, 0.22055, 0.43600, 0.74074;
            0.08858, 0.09870, 0.11543, 0.12760, 0.14729, 0.22093, 0.28195, 0.26824, 0.13900;
            0.89146, 0.87765, 0.85412, 0.83642, 0.80658, 0.67581, 0.49750, 0.29576, 0.12026
        ],
    },
    TableDef {
        id: 11,
        title: "gain count to reach b = 10, r(u, 10, m) (Erlang gains, c = 1)",
        kind: TableKind::GainCountTarget { comb: false, c: 1.0, b: 10.0 },
        row_header: "m",
        col_labels: &["u=0", "u=0.2", "u=0.5", "u=0.7", "u=1", "u=3", "u=5", "u=8", "u=10"],
        row_labels: &["1", "2", ">=3"],
        rows: &[1.0, 2.0, 3.0],
        cols: &[0.0, 0.2, 0.5, 0.7, 1.0, 3.0, 5.0, 8.0, 10.0],
        golden: rows![
            0.00024, 0.00028, 0.00037, 0.00044, 0.00058, 0.00351, 0.01996, 0.22055, 0.74074;
            0.00317, 0.00368, 0.00459, 0.00532, 0.00661, 0.02631, 0.08858, 0.28195, 0.13900;
            0.99659, 0.99603, 0.99503, 0.99424, 0.99280, 0.97018, 0.89146, 0.49750, 0.12026
        ],
    },
    TableDef {
        id: 12,
        title: "gain count to reach b = 5, second parameter set",
        kind: TableKind::GainCountTarget { comb: false, c: 1.0, b: 5.0 },
        row_header: "m",
        col_labels: &["u=0", "u=0.2", "u=0.5", "u=0.7", "u=1", "u=2", "u=3", "u=4", "u=5"],
        row_labels: &["1", "2", ">=3"],
        rows: &[1.0, 2.0, 3.0],
        cols: &[0.0, 0.2, 0.5, 0.7, 1.0, 2.0, 3.0, 4.0, 5.0],
        golden: rows![
            0.01996, 0.02365, 0.03045, 0.03598, 0.0461, 0.10326, 0.22055, 0.43601, 0.74074;
            0.08858, 0.09870, 0.11543, 0.12760, 0.14729, 0.22093, 0.28195, 0.26825, 0.14268;
            0.89146, 0.87765, 0.85412, 0.83642, 0.80661, 0.67581, 0.4975, 0.29574, 0.11658
        ],
    },
    TableDef {
        id: 13,
        title: "gain count to reach b = 10, second parameter set",
        kind: TableKind::GainCountTarget { comb: false, c: 1.0, b: 10.0 },
        row_header: "m",
        col_labels: &["u=0", "u=0.2", "u=0.7", "u=1", "u=3", "u=5", "u=8", "u=9", "u=10"],
        row_labels: &["1", "2", ">=3"],
        rows: &[1.0, 2.0, 3.0],
        cols: &[0.0, 0.2, 0.7, 1.0, 3.0, 5.0, 8.0, 9.0, 10.0],
        golden: rows![
            0.00024, 0.00028, 0.00044, 0.00058, 0.00351, 0.01996, 0.22055, 0.43601, 0.74074;
            0.00317, 0.00368, 0.00532, 0.00661, 0.02631, 0.08858, 0.28195, 0.26825, 0.14268;
            0.99659, 0.99604, 0.99424, 0.99281, 0.97018, 0.89146, 0.4975, 0.29574, 0.11658
        ],
    },
    TableDef {
        id: 14,
        title: "gain count before ruin q(u, m) (combination of exponentials, c = 1)",
        kind: TableKind::GainCountRuin { comb: true },
        row_header: "m",
        col_labels: &["u=0", "u=0.2", "u=0.5", "u=0.7", "u=1", "u=3", "u=5", "u=10"],
        row_labels: &["0", "1", "2", "3", "4", "5"],
        rows: &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
        cols: &[0.0, 0.2, 0.5, 0.7, 1.0, 3.0, 5.0, 10.0],
        golden: rows![
            1.0, 0.938448, 0.735759, 0.591833, 0.406006, 0.017351, 0.000499, 4.33e-8;
            0.0, 0.029024, 0.109012, 0.151509, 0.183614, 0.045564, 0.003096, 9.16e-7;
            0.0, 0.008061, 0.036744, 0.058105, 0.085016, 0.057740, 0.007781, 6.84e-6;
            0.0, 0.004065, 0.019192, 0.031352, 0.048728, 0.056886, 0.012810, 2.88e-5;
            0.0, 0.002546, 0.012179, 0.020153, 0.032137, 0.051174, 0.016812, 8.40e-5;
            0.0, 0.001784, 0.008590, 0.014309, 0.023133, 0.044676, 0.019397, 1.904e-4
        ],
    },
    TableDef {
        id: 15,
        title: "gain count to reach b = 5 (combination of exponentials, c = 0.75)",
        kind: TableKind::GainCountTarget { comb: true, c: 0.75, b: 5.0 },
        row_header: "m",
        col_labels: &["u=0", "u=0.2", "u=0.5", "u=0.7", "u=1", "u=2", "u=3", "u=4", "u=5"],
        row_labels: &["1", "2", ">=3"],
        rows: &[1.0, 2.0, 3.0],
        cols: &[0.0, 0.2, 0.5, 0.7, 1.0, 2.0, 3.0, 4.0, 5.0],
        golden: rows![
            0.00045, 0.00061, 0.00096, 0.00129, 0.00203, 0.00907, 0.04024, 0.17176, 0.59775;
            0.00319, 0.00411, 0.00598, 0.00765, 0.01101, 0.03472, 0.09187, 0.15269, 0.14352;
            0.99636, 0.99528, 0.99307, 0.99106, 0.98696, 0.95620, 0.86789, 0.67555, 0.25873
        ],
    },
    TableDef {
        id: 16,
        title: "gain count to reach b = 10 (combination of exponentials, c = 0.75)",
        kind: TableKind::GainCountTarget { comb: true, c: 0.75, b: 10.0 },
        row_header: "m",
        col_labels: &["u=0", "u=0.2", "u=0.5", "u=0.7", "u=1", "u=3", "u=5", "u=8", "u=10"],
        row_labels: &["1", "2", ">=3"],
        rows: &[1.0, 2.0, 3.0],
        cols: &[0.0, 0.2, 0.5, 0.7, 1.0, 3.0, 5.0, 8.0, 10.0],
        golden: rows![
            2.51e-7, 3.38e-7, 7.16e-7, 1.12e-6, 2.26e-5, 0.00045, 0.04024, 0.17176, 0.59775;
            3.80e-6, 5.01e-6, 1.00e-5, 1.52e-5, 0.00023, 0.00319, 0.09187, 0.15269, 0.14352;
            0.999996, 0.99999, 0.99999, 0.99998, 0.99975, 0.99636, 0.86789, 0.67555, 0.25873
        ],
    },
    TableDef {
        id: 17,
        title: "gain count to reach b = 5 (combination of exponentials, c = 0.5)",
        kind: TableKind::GainCountTarget { comb: true, c: 0.5, b: 5.0 },
        row_header: "m",
        col_labels: &["u=0", "u=0.2", "u=0.5", "u=0.7", "u=1", "u=2", "u=3", "u=4", "u=5"],
        row_labels: &["1", "2", ">=3"],
        rows: &[1.0, 2.0, 3.0],
        cols: &[0.0, 0.2, 0.5, 0.7, 1.0, 2.0, 3.0, 4.0, 5.0],
        golden: rows![
            0.00058, 0.00079, 0.00124, 0.00167, 0.00262, 0.01171, 0.05186, 0.21978, 0.59775;
            0.00479, 0.00617, 0.00899, 0.01151, 0.01660, 0.05290, 0.14352, 0.26768, 0.17958;
            0.99463, 0.99304, 0.98978, 0.98682, 0.98078, 0.93539, 0.80462, 0.51254, 0.22268
        ],
    },
    TableDef {
        id: 18,
        title: "gain count to reach b = 10 (combination of exponentials, c = 0.5)",
        kind: TableKind::GainCountTarget { comb: true, c: 0.5, b: 10.0 },
        row_header: "m",
        col_labels: &["u=0", "u=0.2", "u=0.7", "u=1", "u=3", "u=5", "u=8", "u=9", "u=10"],
        row_labels: &["1", "2", ">=3"],
        rows: &[1.0, 2.0, 3.0],
        cols: &[0.0, 0.2, 0.7, 1.0, 3.0, 5.0, 8.0, 9.0, 10.0],
        golden: rows![
            3.24e-7, 4.37e-7, 9.25e-7, 1.45e-6, 2.91e-5, 0.00058, 0.05186, 0.21978, 0.59775;
            5.64e-6, 7.46e-6, 1.49e-5, 2.26e-5, 3.5e-4, 0.00479, 0.14352, 0.26768, 0.17958;
            0.99999, 0.99999, 0.99998, 0.99998, 0.99962, 0.99463, 0.80462, 0.51254, 0.22268
        ],
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_covers_all_ids() {
        for id in all_ids() {
            let def = table(id).unwrap();
            assert_eq!(def.id, id);
            // golden shape is consistent
            assert_eq!(def.golden.len(), def.row_labels.len());
            for row in def.golden {
                assert_eq!(row.len(), def.col_labels.len(), "table {id}");
            }
        }
        assert!(table(19).is_none());
        assert!(table(0).is_none());
    }

    #[test]
    fn computed_shapes_match_golden() {
        for id in [1, 4, 7, 9, 10] {
            let def = table(id).unwrap();
            let computed = compute(def).unwrap();
            assert_eq!(computed.len(), def.golden.len());
            for (c, g) in computed.iter().zip(def.golden) {
                assert_eq!(c.len(), g.len());
            }
        }
    }

    #[test]
    fn q_tables_reproduce_within_tolerance() {
        for id in [9u32, 14] {
            let cmp = compare(table(id).unwrap(), 5e-4).unwrap();
            assert!(
                cmp.failures.is_empty(),
                "table {id}: {} failing cells, first {:?}",
                cmp.failures.len(),
                cmp.failures.first()
            );
        }
    }

    #[test]
    fn phi1_column_reproduces() {
        // the second column of the barrier summaries is sound in the goldens
        for id in [1u32, 2, 3] {
            let def = table(id).unwrap();
            let computed = compute(def).unwrap();
            for (row, g) in computed.iter().zip(def.golden) {
                assert!((row[1] - g[1]).abs() < 5e-4, "table {id}: {} vs {}", row[1], g[1]);
            }
        }
    }

    #[test]
    fn sci_notation_cells_need_two_significant_figures() {
        assert!(cell_matches(4.3285e-8, 4.33e-8, 5e-4));
        assert!(!cell_matches(4.4e-8, 4.33e-8, 5e-4));
        assert!(cell_matches(0.51, 0.5102, 5e-3));
    }
}
