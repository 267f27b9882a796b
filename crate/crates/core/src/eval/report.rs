use std::fmt::Write;

use super::metrics::{EvalMetrics, Fraction};

const HEADER: [&str; 7] = ["Condition", "Accuracy", "AP", "CVRR", "FAR-NE", "LA", "Runs"];

/// Fixed-width table, one row per condition in input order. Accuracy is a
/// percentage to one decimal, the rest are fractions to three; undefined
/// metrics print as "-". Values are single-run point estimates.
pub fn render_report<N: AsRef<str>>(rows: &[(N, EvalMetrics)]) -> String {
    let name_width = rows
        .iter()
        .map(|(n, _)| n.as_ref().chars().count())
        .chain([HEADER[0].len()])
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    line(&mut out, name_width, HEADER.map(str::to_string));
    for (name, m) in rows {
        line(
            &mut out,
            name_width,
            [
                name.as_ref().to_string(),
                percent(&m.accuracy),
                ratio(&m.abstention_precision),
                ratio(&m.cvrr),
                ratio(&m.far_ne),
                ratio(&m.licensed_accuracy),
                "n=1".to_string(),
            ],
        );
    }
    out
}

fn line(out: &mut String, name_width: usize, cells: [String; 7]) {
    let [name, acc, ap, cvrr, far, la, runs] = cells;
    writeln!(out, "{name:<name_width$}  {acc:>8}  {ap:>6}  {cvrr:>6}  {far:>6}  {la:>6}  {runs:>4}")
        .expect("writing to a String cannot fail");
}

fn percent(f: &Fraction) -> String {
    f.value().map_or_else(|| "-".into(), |v| format!("{:.1}%", 100.0 * v))
}

fn ratio(f: &Fraction) -> String {
    f.value().map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table5() -> EvalMetrics {
        EvalMetrics {
            accuracy: Fraction::new(891, 1000),
            abstention_precision: Fraction::new(40, 40),
            cvrr: Fraction::new(1, 2),
            far_ne: Fraction::new(0, 30),
            licensed_accuracy: Fraction::new(500, 500),
        }
    }

    #[test]
    fn single_row() {
        let text = render_report(&[("ORACLE", table5())]);
        let row = text.lines().nth(1).unwrap();
        let cells: Vec<_> = row.split_whitespace().collect();
        assert_eq!(cells, ["ORACLE", "89.1%", "1.000", "0.500", "0.000", "1.000", "n=1"]);
        assert_eq!(text, render_report(&[("ORACLE", table5())]));
    }

    #[test]
    fn header_only_when_empty() {
        let text = render_report::<&str>(&[]);
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("Condition"));
    }

    #[test]
    fn rows_in_input_order_and_undefined_dash() {
        let text = render_report(&[("ORACLE", table5()), ("BASELINE", EvalMetrics::default())]);
        let names: Vec<_> = text.lines().skip(1).map(|l| l.split_whitespace().next().unwrap()).collect();
        assert_eq!(names, ["ORACLE", "BASELINE"]);
        let baseline: Vec<_> = text.lines().nth(2).unwrap().split_whitespace().collect();
        assert_eq!(baseline, ["BASELINE", "-", "-", "-", "-", "-", "n=1"]);
        let widths: Vec<_> = text.lines().map(|l| l.chars().count()).collect();
        assert!(widths.windows(2).all(|w| w[0] == w[1]));
    }
}
