use std::fmt::Write as _;
use std::io::{self, Write};

use crate::ranker::{Algorithm, FeatureMask};
use crate::rdf::PayLevelDomain;
use crate::slp::Position;

pub const REPORT_HEADER: &str = "fold\talgo\tmask\tposition\tmap\tmrr5";

/// A reporting column: one position or all queries together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Position(Position),
    Overall,
}

impl Scope {
    pub const ALL: [Scope; 4] = [
        Scope::Position(Position::Sts),
        Scope::Position(Position::Ps),
        Scope::Position(Position::Ots),
        Scope::Overall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Position(p) => p.as_str(),
            Scope::Overall => "overall",
        }
    }

    fn index(self) -> usize {
        match self {
            Scope::Position(p) => p.index(),
            Scope::Overall => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub map: f64,
    pub mrr5: f64,
    pub queries: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoldResult {
    /// One-based fold number.
    pub fold: usize,
    pub test_pld: PayLevelDomain,
    pub algorithm: Algorithm,
    pub mask: FeatureMask,
    /// Indexed like [`Scope::ALL`]; `None` when the fold had no usable queries.
    pub cells: [Option<Cell>; 4],
}

impl FoldResult {
    pub fn cell(&self, scope: Scope) -> Option<Cell> {
        self.cells[scope.index()]
    }
}

/// Mean and sample standard deviation over the folds that produced a value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aggregate {
    pub map_mean: f64,
    pub map_stddev: f64,
    pub mrr5_mean: f64,
    pub mrr5_stddev: f64,
    pub folds: usize,
}

fn mean_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub algorithms: Vec<Algorithm>,
    pub masks: Vec<FeatureMask>,
    pub folds: Vec<FoldResult>,
}

impl EvalReport {
    pub fn new(algorithms: Vec<Algorithm>, masks: Vec<FeatureMask>, mut folds: Vec<FoldResult>) -> Self {
        let order = |r: &FoldResult| {
            (
                r.fold,
                algorithms.iter().position(|a| *a == r.algorithm),
                masks.iter().position(|m| *m == r.mask),
            )
        };
        folds.sort_by_key(order);
        EvalReport {
            algorithms,
            masks,
            folds,
        }
    }

    pub fn aggregate(&self, algorithm: Algorithm, mask: FeatureMask, scope: Scope) -> Option<Aggregate> {
        let cells: Vec<Cell> = self
            .folds
            .iter()
            .filter(|r| r.algorithm == algorithm && r.mask == mask)
            .filter_map(|r| r.cell(scope))
            .collect();
        if cells.is_empty() {
            return None;
        }
        let (map_mean, map_stddev) = mean_stddev(&cells.iter().map(|c| c.map).collect::<Vec<_>>());
        let (mrr5_mean, mrr5_stddev) = mean_stddev(&cells.iter().map(|c| c.mrr5).collect::<Vec<_>>());
        Some(Aggregate {
            map_mean,
            map_stddev,
            mrr5_mean,
            mrr5_stddev,
            folds: cells.len(),
        })
    }

    /// Mean overall MAP, the headline number of a configuration.
    pub fn mean_map(&self, algorithm: Algorithm, mask: FeatureMask) -> Option<f64> {
        self.aggregate(algorithm, mask, Scope::Overall).map(|a| a.map_mean)
    }

    fn combos(&self) -> impl Iterator<Item = (Algorithm, FeatureMask)> + '_ {
        self.algorithms
            .iter()
            .flat_map(|&a| self.masks.iter().map(move |&m| (a, m)))
    }

    /// Tab-separated report: one row per fold, configuration and scope,
    /// followed by `mean` and `stddev` rows.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{REPORT_HEADER}")?;
        for r in &self.folds {
            for scope in Scope::ALL {
                let (map, mrr) = match r.cell(scope) {
                    Some(c) => (format!("{:.6}", c.map), format!("{:.6}", c.mrr5)),
                    None => ("skipped".to_owned(), "skipped".to_owned()),
                };
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{map}\t{mrr}",
                    r.fold,
                    r.algorithm,
                    r.mask,
                    scope.as_str()
                )?;
            }
        }
        for label in ["mean", "stddev"] {
            for (a, m) in self.combos() {
                for scope in Scope::ALL {
                    let (map, mrr) = match self.aggregate(a, m, scope) {
                        Some(g) if label == "mean" => {
                            (format!("{:.6}", g.map_mean), format!("{:.6}", g.mrr5_mean))
                        }
                        Some(g) => (format!("{:.6}", g.map_stddev), format!("{:.6}", g.mrr5_stddev)),
                        None => ("skipped".to_owned(), "skipped".to_owned()),
                    };
                    writeln!(out, "{label}\t{a}\t{m}\t{}\t{map}\t{mrr}", scope.as_str())?;
                }
            }
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("report is UTF-8")
    }

    /// Fold-averaged MAP and MRR@5 laid out with one row per algorithm and
    /// mask, and a column pair per position.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<12}", "");
        for scope in Scope::ALL {
            let _ = write!(out, " | {:^15}", scope.as_str());
        }
        let _ = write!(out, "\n{:<4} {:<7}", "algo", "mask");
        for _ in Scope::ALL {
            let _ = write!(out, " | {:>6}  {:>6} ", "MAP", "MRR@5");
        }
        out.push('\n');
        for (a, m) in self.combos() {
            let _ = write!(out, "{:<4} {:<7}", a.as_str(), m.to_string());
            for scope in Scope::ALL {
                match self.aggregate(a, m, scope) {
                    Some(g) => {
                        let _ = write!(out, " | {:>6.3}  {:>6.3} ", g.map_mean, g.mrr5_mean);
                    }
                    None => {
                        let _ = write!(out, " | {:>6}  {:>6} ", "-", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(fold: usize, mask: FeatureMask, map: Option<f64>) -> FoldResult {
        let cell = map.map(|m| Cell {
            map: m,
            mrr5: m / 2.0,
            queries: 3,
        });
        FoldResult {
            fold,
            test_pld: PayLevelDomain::from_domain("t.org").unwrap(),
            algorithm: Algorithm::RandomForests,
            mask,
            cells: [cell, cell, None, cell],
        }
    }

    fn report() -> EvalReport {
        EvalReport::new(
            vec![Algorithm::RandomForests],
            vec![FeatureMask::POP, FeatureMask::SLP],
            vec![
                result(2, FeatureMask::SLP, Some(0.5)),
                result(1, FeatureMask::SLP, Some(1.0)),
                result(1, FeatureMask::POP, Some(0.25)),
                result(2, FeatureMask::POP, None),
            ],
        )
    }

    #[test]
    fn aggregates_skip_missing_folds() {
        let r = report();
        let g = r.aggregate(Algorithm::RandomForests, FeatureMask::SLP, Scope::Overall).unwrap();
        assert_eq!((g.map_mean, g.folds), (0.75, 2));
        assert!((g.map_stddev - 0.125f64.sqrt()).abs() < 1e-12);
        let g = r.aggregate(Algorithm::RandomForests, FeatureMask::POP, Scope::Overall).unwrap();
        assert_eq!((g.map_mean, g.map_stddev, g.folds), (0.25, 0.0, 1));
        assert!(r.aggregate(Algorithm::RandomForests, FeatureMask::POP, Scope::Position(Position::Ots)).is_none());
        assert!(r.aggregate(Algorithm::CoordinateAscent, FeatureMask::POP, Scope::Overall).is_none());
    }

    #[test]
    fn tsv_layout() {
        let tsv = report().to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], REPORT_HEADER);
        assert_eq!(lines[1], "1\trf\tpop\tsts\t0.250000\t0.125000");
        assert_eq!(lines[3], "1\trf\tpop\tots\tskipped\tskipped");
        assert!(lines.contains(&"2\trf\tpop\toverall\tskipped\tskipped"));
        assert!(lines.contains(&"mean\trf\tslp\toverall\t0.750000\t0.375000"));
        assert!(lines.iter().any(|l| l.starts_with("stddev\trf\tslp\toverall\t0.353553")));
        assert_eq!(lines.len(), 1 + 4 * 4 + 2 * 2 * 4);
        assert!(lines.iter().all(|l| l.split('\t').count() == 6));
    }

    #[test]
    fn table_has_one_row_per_configuration() {
        let table = report().to_table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].contains("overall"));
        assert!(lines[3].starts_with("rf   slp"));
        assert!(lines[3].contains("0.750"));
    }
}
