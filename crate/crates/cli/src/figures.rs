//! Data series behind the reference figures. No rendering: each figure id
//! yields the plotted points as a table.

use crate::output::{Cell, Table};
use crate::tables::{comb_spec, erlang_spec};
use dualrisk_core::counts::GainCountChain;
use dualrisk_core::divdist::DividendDistribution;
use dualrisk_core::CoreError;

pub fn all_ids() -> Vec<u32> {
    (1..=7).collect()
}

pub fn figure(id: u32) -> Result<Table, CoreError> {
    match id {
        1 => cdf_curves_erlang(),
        2 => density_curves(false, 1.0),
        3 => density_curves(false, 2.1),
        4 => count_pmf(false),
        5 => cdf_curves_comb(),
        6 => density_curves(true, 0.75),
        7 => count_pmf(true),
        _ => Err(CoreError::InvalidArgument(format!(
            "unknown figure id {id}; valid ids are 1..=7"
        ))),
    }
}

/// G(u, b; x) as a function of u, for b = 5 and b = 10 (Erlang gains, c = 1).
fn cdf_curves_erlang() -> Result<Table, CoreError> {
    let mut t = Table::new(vec!["b", "x", "u", "G"]);
    for (b, xs) in [
        (5.0, vec![1.0, 2.0, 3.0, 4.0, 5.0]),
        (10.0, vec![1.0, 2.0, 3.0, 5.0, 7.0, 9.0, 10.0]),
    ] {
        let dist = DividendDistribution::new(&erlang_spec(1.0, Some(b)))?;
        for &x in &xs {
            let rep = dist.cdf_representation(x)?;
            let steps = (b * 10.0) as usize;
            for i in 0..=steps {
                let u = b * i as f64 / steps as f64;
                t.push(vec![Cell::Num(b), Cell::Num(x), Cell::Num(u), Cell::Num(rep.evaluate(u)?)]);
            }
        }
    }
    Ok(t)
}

/// G(u, 5; x) for the combination-of-exponentials gains, c = 0.75.
fn cdf_curves_comb() -> Result<Table, CoreError> {
    let mut t = Table::new(vec!["x", "u", "G"]);
    let b = 5.0;
    let dist = DividendDistribution::new(&comb_spec(0.75, Some(b)))?;
    for x in [1.0, 2.0, 3.0, 4.0, 5.0] {
        let rep = dist.cdf_representation(x)?;
        for i in 0..=50 {
            let u = b * i as f64 / 50.0;
            t.push(vec![Cell::Num(x), Cell::Num(u), Cell::Num(rep.evaluate(u)?)]);
        }
    }
    Ok(t)
}

/// Defective and conditional first-dividend densities g(u, 5; x) and
/// g(u, 5; x)/chi(u, 5) for u = 1..5.
fn density_curves(comb: bool, c: f64) -> Result<Table, CoreError> {
    let b = 5.0;
    let spec = if comb { comb_spec(c, Some(b)) } else { erlang_spec(c, Some(b)) };
    let dist = DividendDistribution::new(&spec)?;
    let mut t = Table::new(vec!["u", "x", "g", "g_conditional"]);
    for u in [1.0, 2.0, 3.0, 4.0, 5.0] {
        let chi = dist.chi(u)?;
        for i in 1..=160 {
            let x = 0.05 * i as f64;
            let g = dist.density(u, x)?;
            t.push(vec![Cell::Num(u), Cell::Num(x), Cell::Num(g), Cell::Num(g / chi)]);
        }
    }
    Ok(t)
}

/// q(1, m), the gain-count pmf before ruin from u = 1, c = 1.
fn count_pmf(comb: bool) -> Result<Table, CoreError> {
    let spec = if comb { comb_spec(1.0, None) } else { erlang_spec(1.0, None) };
    let mut chain = GainCountChain::new(&spec);
    let mut t = Table::new(vec!["m", "q"]);
    for m in 0..=20usize {
        t.push(vec![Cell::Num(m as f64), Cell::Num(chain.value(1.0, m)?)]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_builds() {
        for id in all_ids() {
            let t = figure(id).unwrap();
            assert!(!t.rows.is_empty(), "figure {id}");
        }
        assert!(figure(8).is_err());
    }

    #[test]
    fn density_has_single_interior_maximum() {
        // g(1, 5, .) rises then falls
        let t = figure(2).unwrap();
        let g1: Vec<f64> = t
            .rows
            .iter()
            .filter(|r| matches!(r[0], Cell::Num(u) if u == 1.0))
            .map(|r| match r[2] {
                Cell::Num(v) => v,
                _ => unreachable!(),
            })
            .collect();
        let peak = g1
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(peak > 0 && peak < g1.len() - 1);
        for w in g1[..=peak].windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
        for w in g1[peak..].windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
    }
}
