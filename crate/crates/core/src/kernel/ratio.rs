//! The return-probability ratio `p(x,x;t) / p(y,y;t)` on a glued graph.

use std::fmt::Write as _;

use super::{heat_kernel_diag, KernelError, KernelSeries, Semantics};
use crate::graph::{GraphError, WeightedGraph};
use crate::numeric::g17;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub t: usize,
    pub p_xx: f64,
    pub p_yy: f64,
    pub ratio: f64,
    /// Beyond the exactness horizon of at least one of the two kernels.
    pub approx: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioTable {
    pub rows: Vec<RatioRow>,
    /// Largest `t` at which both kernels are exact.
    pub exact_horizon: usize,
    pub approximate: bool,
}

impl RatioTable {
    pub fn from_series(p_xx: &KernelSeries, p_yy: &KernelSeries, approximate: bool) -> Self {
        let exact_horizon = p_xx.exact_horizon.min(p_yy.exact_horizon);
        let rows = p_xx
            .values
            .iter()
            .zip(&p_yy.values)
            .enumerate()
            .map(|(t, (&a, &b))| RatioRow { t, p_xx: a, p_yy: b, ratio: a / b, approx: t > exact_horizon })
            .collect();
        Self { rows, exact_horizon, approximate }
    }

    pub fn ratio(&self, t: usize) -> Option<f64> {
        self.rows.get(t).map(|r| r.ratio)
    }

    /// CSV with header `t,p_xx,p_yy,ratio`; approximate tables add an
    /// `approx` column holding `*` on rows past the exact horizon.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,p_xx,p_yy,ratio");
        out.push_str(if self.approximate { ",approx\n" } else { "\n" });
        for r in &self.rows {
            write!(out, "{},{},{},{}", r.t, g17(r.p_xx), g17(r.p_yy), g17(r.ratio)).unwrap();
            if self.approximate {
                out.push(',');
                if r.approx {
                    out.push('*');
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Both diagonal kernels up to `T`. Without `allow_approximate` the run is
/// refused when `T` exceeds either exact horizon.
pub fn ratio_experiment(g: &WeightedGraph, t_max: usize, allow_approximate: bool) -> Result<RatioTable, KernelError> {
    let x = g.x().ok_or(GraphError::MissingMarker("x"))?;
    let y = g.y().ok_or(GraphError::MissingMarker("y"))?;
    let achievable = super::exact_horizon(g, x).min(super::exact_horizon(g, y));
    if t_max > achievable && !allow_approximate {
        return Err(KernelError::HorizonShortfall { requested: t_max, achievable });
    }
    let (p_xx, p_yy) = rayon::join(
        || heat_kernel_diag(g, x, t_max, Semantics::Lazy),
        || heat_kernel_diag(g, y, t_max, Semantics::Lazy),
    );
    Ok(RatioTable::from_series(&p_xx?, &p_yy?, allow_approximate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_graph, glue, BoxSpec};

    #[test]
    fn symmetric_glue_gives_unit_ratio() {
        let h = enumerate_graph(|p| p[0].abs() <= 1 || p[1] % 4 == 0, &BoxSpec::cube(2, 30).unwrap()).unwrap();
        let g = glue(&h, &h, 0.25).unwrap();
        let table = ratio_experiment(&g, 30, false).unwrap();
        assert_eq!(table.rows.len(), 31);
        assert!(table.rows.iter().all(|r| r.ratio == 1.0 && !r.approx));
        assert!(table.to_csv().starts_with("t,p_xx,p_yy,ratio\n0,1,1,1\n1,"));
    }

    #[test]
    fn horizon_shortfall() {
        let z = enumerate_graph(|_| true, &BoxSpec::cube(2, 5).unwrap()).unwrap();
        let g = glue(&z, &z, 0.25).unwrap();
        assert_eq!(
            ratio_experiment(&g, 8, false).unwrap_err(),
            KernelError::HorizonShortfall { requested: 8, achievable: 5 }
        );
        let table = ratio_experiment(&g, 8, true).unwrap();
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,p_xx,p_yy,ratio,approx");
        assert!(lines[6].ends_with(','));
        assert!(lines[7].ends_with(",*"));
    }

    #[test]
    fn zero_horizon_single_row() {
        let z = enumerate_graph(|_| true, &BoxSpec::cube(1, 2).unwrap()).unwrap();
        let g = glue(&z, &z, 0.5).unwrap();
        assert_eq!(ratio_experiment(&g, 0, false).unwrap().to_csv(), "t,p_xx,p_yy,ratio\n0,1,1,1\n");
        assert!(ratio_experiment(&z, 0, false).is_err());
    }
}
