//! Canonical report serialization. JSON is the authoritative format: keys
//! in fixed order, floats printed with 17 significant digits, no
//! whitespace, so equal sweeps produce equal bytes. CSV is a lossy
//! convenience export (it drops the hypothesis report and config echo).

use super::{IdSummary, ResolvedConfig, Summary, TrialReport};

/// 17 significant digits round-trip every f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn json_str(s: &str) -> String {
    format!("\"{}\"", escape_json(s))
}

fn json_opt_str(s: &Option<String>) -> String {
    match s {
        Some(v) => json_str(v),
        None => "null".into(),
    }
}

fn json_opt_f64(v: &Option<f64>) -> String {
    match v {
        Some(x) => fmt_f64(*x),
        None => "null".into(),
    }
}

fn config_json(cfg: &ResolvedConfig) -> String {
    let ids: Vec<String> = cfg.ids.iter().map(|id| json_str(id.name())).collect();
    let dims: Vec<String> = cfg.dims.iter().map(|d| d.to_string()).collect();
    let atoms: Vec<String> = cfg.atoms.iter().map(|a| a.to_string()).collect();
    let norms: Vec<String> = cfg.norm_tokens.iter().map(|t| json_str(t)).collect();
    let thetas: Vec<String> = cfg.theta_grid.iter().map(|t| fmt_f64(*t)).collect();
    let pqrs: Vec<String> = cfg
        .pqr_grid
        .iter()
        .map(|(p, q, r)| format!("[{},{},{}]", fmt_f64(*p), fmt_f64(*q), fmt_f64(*r)))
        .collect();
    format!(
        "{{\"inequality_ids\":[{}],\"trials\":{},\"dims\":[{}],\"atoms\":[{}],\"norms\":[{}],\
         \"seed\":{},\"theta_grid\":[{}],\"pqr_grid\":[{}],\"format\":{},\"out_path\":{},\
         \"tol_ineq\":{}}}",
        ids.join(","),
        cfg.trials,
        dims.join(","),
        atoms.join(","),
        norms.join(","),
        cfg.seed,
        thetas.join(","),
        pqrs.join(","),
        json_str(match cfg.format {
            super::ReportFormat::Json => "json",
            super::ReportFormat::Csv => "csv",
        }),
        json_opt_str(&cfg.out_path),
        fmt_f64(cfg.tol_ineq),
    )
}

fn report_json(r: &TrialReport) -> String {
    let hyp: Vec<String> = r.hypothesis_report.iter().map(|h| json_str(h)).collect();
    format!(
        "{{\"id\":{},\"trial\":{},\"seed\":{},\"dim\":{},\"norm\":{},\"theta\":{},\"p\":{},\
         \"q\":{},\"r\":{},\"lhs\":{},\"rhs\":{},\"margin\":{},\"relative_margin\":{},\
         \"violation\":{},\"hypothesis_report\":[{}],\"wall_time\":{}}}",
        json_str(r.id.name()),
        r.trial,
        r.seed,
        r.dim,
        json_opt_str(&r.norm),
        json_opt_f64(&r.theta),
        json_opt_f64(&r.p),
        json_opt_f64(&r.q),
        json_opt_f64(&r.r),
        fmt_f64(r.lhs),
        fmt_f64(r.rhs),
        fmt_f64(r.margin),
        fmt_f64(r.relative_margin),
        r.violation,
        hyp.join(","),
        fmt_f64(r.wall_time),
    )
}

fn id_summary_json(s: &IdSummary) -> String {
    format!(
        "{{\"id\":{},\"count\":{},\"min_margin\":{},\"median_margin\":{},\
         \"min_relative_margin\":{},\"violations\":{},\"sharpest_seed\":{}}}",
        json_str(s.id.name()),
        s.count,
        fmt_f64(s.min_margin),
        fmt_f64(s.median_margin),
        fmt_f64(s.min_relative_margin),
        s.violations,
        s.sharpest_seed,
    )
}

fn summary_json(s: &Summary) -> String {
    let per_id: Vec<String> = s.per_id.iter().map(id_summary_json).collect();
    format!(
        "{{\"total_reports\":{},\"total_violations\":{},\"per_id\":[{}]}}",
        s.total_reports,
        s.total_violations,
        per_id.join(","),
    )
}

/// Full sweep output: `{config, reports, summary}` as one compact line.
pub fn write_json(cfg: &ResolvedConfig, reports: &[TrialReport], summary: &Summary) -> String {
    let rows: Vec<String> = reports.iter().map(report_json).collect();
    format!(
        "{{\"config\":{},\"reports\":[{}],\"summary\":{}}}\n",
        config_json(cfg),
        rows.join(","),
        summary_json(summary),
    )
}

/// Column order is fixed: id, trial, seed, dim, norm, theta, p, q, r, lhs,
/// rhs, margin, relative_margin, violation, wall_time. Optional cells are
/// left empty.
pub fn write_csv(reports: &[TrialReport]) -> String {
    let mut out = String::from(
        "id,trial,seed,dim,norm,theta,p,q,r,lhs,rhs,margin,relative_margin,violation,wall_time\n",
    );
    let opt_f = |v: &Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.id.name(),
            r.trial,
            r.seed,
            r.dim,
            r.norm.as_deref().unwrap_or(""),
            opt_f(&r.theta),
            opt_f(&r.p),
            opt_f(&r.q),
            opt_f(&r.r),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.margin),
            fmt_f64(r.relative_margin),
            r.violation,
            fmt_f64(r.wall_time),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{run_sweep, summarize, SweepConfig};
    use super::*;

    fn tiny_cfg() -> ResolvedConfig {
        SweepConfig {
            inequality_ids: vec!["gruss_scalar".into(), "p1".into()],
            trials: 2,
            dims: vec![2],
            atoms: vec![2],
            norms: vec!["op".into()],
            seed: 5,
            ..Default::default()
        }
        .resolve(None)
        .unwrap()
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, 1.0, -0.25, 1.0 / 3.0, 1e-300, -1e300, f64::MIN_POSITIVE] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn json_is_valid_and_repeatable() {
        let cfg = tiny_cfg();
        let reports = run_sweep(&cfg).unwrap();
        let summary = summarize(&reports).unwrap();
        let a = write_json(&cfg, &reports, &summary);
        let b = write_json(&cfg, &run_sweep(&cfg).unwrap(), &summary);
        assert_eq!(a, b);

        let parsed: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert!(parsed.get("config").is_some());
        assert_eq!(parsed["reports"].as_array().unwrap().len(), reports.len());
        assert!(parsed["summary"]["total_violations"].as_u64().is_some());
        let first = &parsed["reports"][0];
        for key in [
            "id",
            "trial",
            "seed",
            "dim",
            "norm",
            "theta",
            "p",
            "q",
            "r",
            "lhs",
            "rhs",
            "margin",
            "relative_margin",
            "violation",
            "hypothesis_report",
            "wall_time",
        ] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn csv_has_header_and_row_per_report() {
        let cfg = tiny_cfg();
        let reports = run_sweep(&cfg).unwrap();
        let csv = write_csv(&reports);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), reports.len() + 1);
        assert!(lines[0].starts_with("id,trial,seed,dim,norm"));
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), 15);
        }
    }

    #[test]
    fn string_escaping_covers_specials() {
        assert_eq!(escape_json("a\"b\\c\nd"), "a\\\"b\\\\c\\nd");
        assert_eq!(escape_json("\u{1}"), "\\u0001");
    }
}
