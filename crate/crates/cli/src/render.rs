use std::fmt::Write;

use awspace_core::report::BracketsReport;

fn verdict(pass: bool, color: bool) -> &'static str {
    match (pass, color) {
        (true, true) => "\x1b[32mPASS\x1b[0m",
        (false, true) => "\x1b[31mFAIL\x1b[0m",
        (true, false) => "PASS",
        (false, false) => "FAIL",
    }
}

pub fn brackets_table(report: &BracketsReport, color: bool) -> String {
    let p = &report.params;
    let mut out = String::new();
    let _ = writeln!(out, "bracket identities for k={} l={} t={}", p.k, p.l, p.t);
    let _ = writeln!(
        out,
        "{:<32} {:<6} {:>24} {:>24} {:>10}",
        "bracket", "target", "expected", "computed", "|diff|"
    );
    for row in &report.lemma51_rows {
        let _ = writeln!(
            out,
            "{:<32} {:<6} {:>24} {:>24} {:>10.2e} {}",
            row.bracket,
            row.target,
            row.expected,
            row.computed,
            row.abs_diff,
            verdict(row.pass, color)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "structure constants over (Z, X0..X6), nonzero entries with i < j (max residual {:.2e}):",
        report.max_expansion_residual
    );
    for e in &report.structure_constants {
        let _ = writeln!(
            out,
            "  [{}, {}] -> {:<2} {:>24}",
            e.left, e.right, e.component, e.value
        );
    }
    let _ = writeln!(out, "{}", verdict(report.pass, color));
    out
}
