//! Text renderings of a [`StudyResult`]. Both formats contain only the
//! numerical results, so reruns of the same config produce identical bytes.

use std::fmt::Write;

use crate::study::StudyResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

pub const CSV_HEADER: &str = "r,h,E_L_u,E_W1_u,E_L_p,rho_L_u,rho_W1_u,rho_L_p";

pub fn emit_report(result: &StudyResult, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => to_csv(result),
        ReportFormat::Markdown => to_markdown(result),
    }
}

/// One row per level and norm order; rate cells on the first level are empty.
pub fn to_csv(result: &StudyResult) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for rep in &result.reports {
        for row in &rep.rows {
            let _ = write!(
                out,
                "{},{:.6},{:.6e},{:.6e},{:.6e}",
                rep.r, row.h, row.errors[0], row.errors[1], row.errors[2]
            );
            match row.rates {
                Some(r) => {
                    let _ = writeln!(out, ",{:.4},{:.4},{:.4}", r[0], r[1], r[2]);
                }
                None => out.push_str(",,,\n"),
            }
        }
    }
    out
}

/// One table per norm order, columns `h, E1, rho1, E2, rho2, E3, rho3`.
pub fn to_markdown(result: &StudyResult) -> String {
    let mut out = String::new();
    for (k, rep) in result.reports.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let r = rep.r;
        let _ = writeln!(out, "### r = {r}\n");
        let _ = writeln!(
            out,
            "| h | E^{{{r}(1)}} | rho^{{{r}(1)}} | E^{{{r}(2)}} | rho^{{{r}(2)}} | E^{{{r}(3)}} | rho^{{{r}(3)}} |"
        );
        out.push_str("|---:|---:|---:|---:|---:|---:|---:|\n");
        for row in &rep.rows {
            let _ = write!(out, "| {:.6} |", row.h);
            for i in 0..3 {
                let rate = row.rates.map_or_else(|| "---".to_string(), |r| format!("{:.4}", r[i]));
                let _ = write!(out, " {:.6e} | {rate} |", row.errors[i]);
            }
            out.push('\n');
        }
    }
    out
}
