//! Plain-text and CSV renderings of certificates, crosschecks and curves.
//!
//! CSV files have a header row, LF line endings, and floats printed with
//! 17 significant digits.

use std::fmt::Write as _;

use crate::concordance::Concordance;
use crate::oracle::CrosscheckReport;
use crate::positivity::PositivityCertificate;

pub const REPORT_VERSION: u32 = 1;

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_from_records(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 csv")
}

/// Numeric table as CSV.
pub fn numeric_csv<const N: usize>(header: [&str; N], rows: &[[f64; N]]) -> String {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|&x| fmt_f64(x)).collect()).collect();
    csv_from_records(&header, &rows)
}

/// `r, value, d1, d2`.
pub fn profile_csv(rows: &[[f64; 4]]) -> String {
    numeric_csv(["r", "value", "d1", "d2"], rows)
}

/// `r, K_rt, K_ri, K_ti, K_ij`.
pub fn sectionals_csv(rows: &[[f64; 5]]) -> String {
    numeric_csv(["r", "K_rt", "K_ri", "K_ti", "K_ij"], rows)
}

/// One row per grid point: location, minimum, per-strategy minima and
/// the argmin complement basis flattened row by row.
pub fn certificate_csv(cert: &PositivityCertificate) -> String {
    let width = cert
        .points
        .iter()
        .map(|p| p.plane.basis.len() * p.plane.dim_ambient)
        .max()
        .unwrap_or(0);
    let mut header: Vec<String> = ["region", "r", "t", "min", "generic", "structured"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if let Some(first) = cert.points.first() {
        let d = first.plane.dim_ambient;
        for k in 0..width {
            header.push(format!("e{}_{}", k / d, k % d));
        }
    }
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let rows: Vec<Vec<String>> = cert
        .points
        .iter()
        .map(|pm| {
            let mut row = vec![
                pm.region.clone().unwrap_or_default(),
                fmt_f64(pm.point.r),
                pm.point.t.map(fmt_f64).unwrap_or_default(),
                fmt_f64(pm.value),
                opt(pm.generic),
                opt(pm.structured),
            ];
            let flat: Vec<String> = pm
                .plane
                .basis
                .iter()
                .flat_map(|v| v.components.iter().map(|&x| fmt_f64(x)))
                .collect();
            row.extend(flat);
            row.resize(header.len(), String::new());
            row
        })
        .collect();
    csv_from_records(&header, &rows)
}

/// Versioned `key = value` summary of a certificate.
pub fn certificate_text(cert: &PositivityCertificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# intercurv certificate v{REPORT_VERSION}");
    let _ = writeln!(s, "model = {}", cert.model_id);
    let _ = writeln!(s, "p = {}", cert.p);
    let _ = writeln!(s, "grid = {}x{}", cert.grid.nr, cert.grid.nt);
    let _ = writeln!(s, "points = {}", cert.points.len());
    let _ = writeln!(s, "strategy = {}", cert.strategy.name());
    let _ = writeln!(s, "seed = {}", cert.seed);
    let _ = writeln!(s, "tolerance = {}", fmt_f64(cert.tolerance));
    let _ = writeln!(s, "min_value = {}", fmt_f64(cert.min_value));
    if let Some(region) = &cert.argmin_region {
        let _ = writeln!(s, "argmin_region = {region}");
    }
    let _ = writeln!(s, "argmin_r = {}", fmt_f64(cert.argmin_point.r));
    if let Some(t) = cert.argmin_point.t {
        let _ = writeln!(s, "argmin_t = {}", fmt_f64(t));
    }
    for (i, v) in cert.argmin_plane.basis.iter().enumerate() {
        let comps: Vec<String> = v.components.iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(s, "argmin_complement_{i} = {}", comps.join(" "));
    }
    let _ = writeln!(s, "max_strategy_gap = {}", fmt_f64(cert.max_disagreement));
    let _ = writeln!(s, "verdict = {}", cert.verdict.name());
    s
}

/// `model, region, point, residual`; points as space-separated coordinates.
pub fn crosscheck_csv(rep: &CrosscheckReport) -> String {
    let header: Vec<String> = ["model", "region", "point", "residual"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|row| {
            let pt: Vec<String> = row.coords.iter().map(|&x| fmt_f64(x)).collect();
            vec![
                rep.model_id.clone(),
                row.region.clone(),
                pt.join(" "),
                fmt_f64(row.residual),
            ]
        })
        .collect();
    csv_from_records(&header, &rows)
}

pub fn crosscheck_text(rep: &CrosscheckReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# intercurv crosscheck v{REPORT_VERSION}");
    let _ = writeln!(s, "model = {}", rep.model_id);
    let _ = writeln!(s, "samples = {}", rep.rows.len());
    let _ = writeln!(s, "h = {}", fmt_f64(rep.h));
    let _ = writeln!(s, "tol = {}", fmt_f64(rep.tol));
    let _ = writeln!(s, "max_residual = {}", fmt_f64(rep.max_residual));
    let _ = writeln!(s, "pass = {}", rep.pass());
    s
}

pub fn concordance_text(c: &Concordance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# intercurv concordance v{REPORT_VERSION}");
    let _ = writeln!(s, "C = {}", fmt_f64(c.c));
    let _ = writeln!(s, "L = {}", fmt_f64(c.l));
    let _ = writeln!(s, "sup_f1 = {}", fmt_f64(c.f_bounds.0));
    let _ = writeln!(s, "sup_f2 = {}", fmt_f64(c.f_bounds.1));
    let _ = writeln!(s, "boundary_residual_0 = {}", fmt_f64(c.boundary_residuals.0));
    let _ = writeln!(s, "boundary_residual_1 = {}", fmt_f64(c.boundary_residuals.1));
    let _ = writeln!(s, "min_value = {}", fmt_f64(c.certificate.min_value));
    let _ = writeln!(s, "verdict = {}", c.certificate.verdict.name());
    s
}

/// `(coordinate, min)` along the first base coordinate, minimizing over
/// the second one where present.
pub fn min_profile(cert: &PositivityCertificate) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::new();
    for pm in &cert.points {
        match out.last_mut() {
            Some(last) if last[0] == pm.point.r => last[1] = last[1].min(pm.value),
            _ => out.push([pm.point.r, pm.value]),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_lf_and_full_precision() {
        let s = profile_csv(&[[0.0, 1.0 / 3.0, -2.0, 1e-300]]);
        assert!(!s.contains('\r'));
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("r,value,d1,d2"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row[1], 1.0 / 3.0);
        assert_eq!(row[3], 1e-300);
    }
}
