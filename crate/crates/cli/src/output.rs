//! CSV and JSON writers. Floats use 17 significant digits and `.` as the
//! decimal separator regardless of locale.

use std::io::{self, Write};

use serde::Serialize;
use weakval_core::scenarios::ScenarioReport;
use weakval_core::weakmeas::PointerDistribution;

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_exact_csv(out: &mut (impl Write + ?Sized), dist: &PointerDistribution) -> io::Result<()> {
    writeln!(out, "P,density")?;
    for (p, d) in dist.grid.iter().zip(&dist.density) {
        writeln!(out, "{},{}", float(*p), float(*d))?;
    }
    Ok(())
}

pub fn write_sampled_csv(out: &mut (impl Write + ?Sized), grid: &[f64], counts: &[u64]) -> io::Result<()> {
    writeln!(out, "P,count")?;
    for (p, c) in grid.iter().zip(counts) {
        writeln!(out, "{},{c}", float(*p))?;
    }
    Ok(())
}

pub fn write_report_csv(out: &mut (impl Write + ?Sized), report: &ScenarioReport) -> io::Result<()> {
    writeln!(out, "kind,target,expected,computed,error,pass")?;
    let opt = |v: Option<f64>| v.map(float).unwrap_or_default();
    for e in &report.entries {
        writeln!(
            out,
            "{},\"{}\",{},{},{},{}",
            e.kind,
            e.target.replace('"', "\"\""),
            float(e.expected),
            opt(e.computed),
            opt(e.error),
            e.pass
        )?;
    }
    Ok(())
}

pub fn write_json(out: &mut (impl Write + ?Sized), value: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-2.0), "-2.0000000000000000e0");
        assert_eq!(float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn exact_csv_has_header() {
        let dist = PointerDistribution {
            grid: vec![-1.0, 1.0],
            density: vec![0.5, 0.5],
            post_selection_probability: 1.0,
        };
        let mut buf = Vec::new();
        write_exact_csv(&mut buf, &dist).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("P,density"));
        assert_eq!(text.lines().count(), 3);
    }
}
