//! Machine-readable output.
//!
//! Every float is written in 17-significant-digit scientific decimal
//! form, which round-trips f64 exactly; all iteration follows replicate
//! order, so identical configurations produce byte-identical JSON and
//! CSV.

use crate::engine::{RunResult, RunStatus};
use crate::malthus::MalthusProfile;
use crate::stats::{EnsembleReport, TargetedEstimate};
use std::fmt::Write;

/// 17-significant-digit decimal form, exact for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| "null".to_string())
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn float_array(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
    format!("[{}]", items.join(", "))
}

pub fn status_str(status: RunStatus) -> &'static str {
    match status {
        RunStatus::Survived => "survived",
        RunStatus::Extinct => "extinct",
        RunStatus::Capped => "capped",
    }
}

/// Flat `key=value` block for the solved profile.
pub fn profile_keyvalues(profile: &MalthusProfile) -> String {
    format!(
        "alpha={}\nbeta={}\nc_star={}\ngrowth_constant={}\nslope={}\n",
        fmt_f64(profile.alpha),
        fmt_f64(profile.beta),
        fmt_f64(profile.c_star),
        fmt_f64(profile.growth_constant),
        fmt_f64(profile.slope),
    )
}

pub fn profile_json(profile: &MalthusProfile) -> String {
    format!(
        "{{\"alpha\": {}, \"beta\": {}, \"c_star\": {}, \"growth_constant\": {}, \"slope\": {}}}",
        fmt_f64(profile.alpha),
        fmt_f64(profile.beta),
        fmt_f64(profile.c_star),
        fmt_f64(profile.growth_constant),
        fmt_f64(profile.slope),
    )
}

/// One run as a JSON object (atom lists as arrays of decimal floats).
pub fn run_result_json(run: &RunResult) -> String {
    let census: Vec<String> = run
        .census
        .iter()
        .map(|c| {
            format!(
                "{{\"label\": {}, \"value\": {}}}",
                json_string(&c.label),
                fmt_f64(c.value)
            )
        })
        .collect();
    format!(
        "{{\n  \"status\": \"{}\",\n  \"horizon\": {},\n  \"ell_t\": {},\n  \"window\": {},\n  \
         \"n_alive\": {},\n  \"n_born\": {},\n  \"n_dead\": {},\n  \"z_t\": {},\n  \
         \"m_pendant\": {},\n  \"m_interior\": {},\n  \"pendant_atoms\": {},\n  \
         \"interior_atoms\": {},\n  \"census\": [{}]\n}}\n",
        status_str(run.status),
        fmt_f64(run.horizon),
        fmt_f64(run.ell_t),
        fmt_f64(run.window),
        run.n_alive,
        run.n_born,
        run.n_dead,
        fmt_f64(run.z_t),
        fmt_opt(run.m_pendant),
        fmt_opt(run.m_interior),
        float_array(run.pendant_atoms.atoms()),
        float_array(run.interior_atoms.atoms()),
        census.join(", "),
    )
}

fn targeted_json(t: &TargetedEstimate) -> String {
    format!(
        "{{\"value\": {}, \"stderr\": {}, \"target\": {}, \"rel_error\": {}}}",
        fmt_f64(t.value),
        fmt_f64(t.stderr),
        fmt_f64(t.target),
        fmt_f64(t.rel_error),
    )
}

/// The aggregated ensemble report as a JSON object.
pub fn report_json(report: &EnsembleReport) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"model\": {},", json_string(&report.model_label));
    let _ = writeln!(out, "  \"profile\": {},", profile_json(&report.profile));
    let _ = writeln!(out, "  \"horizon\": {},", fmt_f64(report.horizon));
    let _ = writeln!(out, "  \"ell_t\": {},", fmt_f64(report.ell_t));
    let _ = writeln!(out, "  \"window\": {},", fmt_f64(report.window));
    let _ = writeln!(
        out,
        "  \"replicates\": {{\"requested\": {}, \"survived\": {}, \"extinct\": {}, \"capped\": {}}},",
        report.replicates.requested,
        report.replicates.survived,
        report.replicates.extinct,
        report.replicates.capped,
    );
    let _ = writeln!(
        out,
        "  \"martingale_mean\": {{\"value\": {}, \"stderr\": {}}},",
        fmt_f64(report.martingale_mean.value),
        fmt_f64(report.martingale_mean.stderr),
    );
    let _ = writeln!(
        out,
        "  \"growth_ratio\": {},",
        targeted_json(&report.growth_ratio)
    );

    let census: Vec<String> = report
        .census
        .iter()
        .map(|c| {
            format!(
                "{{\"label\": {}, \"estimate\": {}}}",
                json_string(&c.label),
                targeted_json(&c.estimate)
            )
        })
        .collect();
    let _ = writeln!(out, "  \"census\": [{}],", census.join(", "));

    let rows: Vec<String> = report
        .exceedance
        .iter()
        .map(|r| {
            format!(
                "{{\"x\": {}, \"pendant\": {}, \"interior\": {}, \"pendant_fraction\": {}}}",
                fmt_f64(r.x),
                targeted_json(&r.pendant),
                targeted_json(&r.interior),
                fmt_opt(r.pendant_fraction),
            )
        })
        .collect();
    let _ = writeln!(out, "  \"exceedance\": [{}],", rows.join(", "));

    let _ = writeln!(
        out,
        "  \"max_law\": {{\"pendant_sup_distance\": {}, \"interior_sup_distance\": {}}},",
        fmt_f64(report.max_law.pendant),
        fmt_f64(report.max_law.interior),
    );

    let laplace: Vec<String> = report
        .laplace
        .iter()
        .map(|l| {
            format!(
                "{{\"label\": {}, \"empirical\": {}, \"limiting\": {}, \"abs_error\": {}}}",
                json_string(&l.label),
                fmt_f64(l.empirical),
                fmt_f64(l.limiting),
                fmt_f64(l.abs_error),
            )
        })
        .collect();
    let _ = writeln!(out, "  \"laplace\": [{}],", laplace.join(", "));

    let _ = writeln!(
        out,
        "  \"slope\": {{\"pendant_mean_over_t\": {}, \"interior_mean_over_t\": {}}}",
        fmt_opt(report.slope.pendant),
        fmt_opt(report.slope.interior),
    );
    out.push_str("}\n");
    out
}

/// Atom CSV: one row per retained atom, `kind` is `p` or `i`.
pub fn atoms_csv(runs: &[RunResult]) -> String {
    let mut out = String::from("replicate,kind,position\n");
    for (i, run) in runs.iter().enumerate() {
        for &a in run.pendant_atoms.atoms() {
            let _ = writeln!(out, "{i},p,{}", fmt_f64(a));
        }
        for &a in run.interior_atoms.atoms() {
            let _ = writeln!(out, "{i},i,{}", fmt_f64(a));
        }
    }
    out
}

/// Maxima CSV: one row per replicate; absent maxima are empty fields.
pub fn maxima_csv(runs: &[RunResult]) -> String {
    let mut out = String::from("replicate,status,z_t,mp,mi\n");
    for (i, run) in runs.iter().enumerate() {
        let mp = run.m_pendant.map(fmt_f64).unwrap_or_default();
        let mi = run.m_interior.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            out,
            "{i},{},{},{mp},{mi}",
            status_str(run.status),
            fmt_f64(run.z_t)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, SimulationConfig};
    use crate::model::{LifetimeOffspringModel, OffspringLaw};
    use crate::stats::{run_ensemble, AnalysisOptions};

    fn sample_ensemble() -> (Vec<RunResult>, EnsembleReport) {
        let model =
            LifetimeOffspringModel::exp_lifetime(1.0, OffspringLaw::Constant { k: 2 }).unwrap();
        let profile = MalthusProfile::solve(&model).unwrap();
        let ensemble = run_ensemble(
            &model,
            &profile,
            &SimulationConfig::new(5.0, 7),
            &AnalysisOptions::default(),
            120,
        )
        .unwrap();
        (ensemble.runs, ensemble.report)
    }

    #[test]
    fn floats_round_trip_and_carry_17_digits() {
        for x in [
            0.0,
            1.0,
            -1.0,
            0.5,
            1.0 / 3.0,
            -1.2345678901234567e-180,
            9.87654321e200,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
            let mantissa = s.trim_start_matches('-');
            let digits = mantissa
                .split('e')
                .next()
                .unwrap()
                .chars()
                .filter(|c| c.is_ascii_digit())
                .count();
            assert_eq!(digits, 17, "{s}");
        }
    }

    #[test]
    fn run_json_is_valid_and_deterministic() {
        let model =
            LifetimeOffspringModel::exp_lifetime(1.0, OffspringLaw::Constant { k: 2 }).unwrap();
        let profile = MalthusProfile::solve(&model).unwrap();
        let config = SimulationConfig::new(6.0, 11);
        let a = run_result_json(&run(&model, &profile, &config, &[]));
        let b = run_result_json(&run(&model, &profile, &config, &[]));
        assert_eq!(a, b);
        let parsed: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed["status"], "survived");
        assert!(parsed["pendant_atoms"].is_array());
        assert!(parsed["m_pendant"].is_number());
    }

    #[test]
    fn report_json_is_valid() {
        let (_, report) = sample_ensemble();
        let text = report_json(&report);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(parsed["profile"]["alpha"].is_number());
        assert_eq!(parsed["replicates"]["requested"], 120);
        assert!(parsed["exceedance"].as_array().unwrap().len() >= 4);
        assert!(parsed["laplace"].as_array().unwrap().len() >= 3);
    }

    #[test]
    fn csv_outputs_have_expected_shape() {
        let (runs, _) = sample_ensemble();
        let atoms = atoms_csv(&runs);
        let total_atoms: usize = runs
            .iter()
            .map(|r| r.pendant_atoms.len() + r.interior_atoms.len())
            .sum();
        assert_eq!(atoms.lines().count(), total_atoms + 1);
        assert!(atoms.starts_with("replicate,kind,position\n"));

        let maxima = maxima_csv(&runs);
        assert_eq!(maxima.lines().count(), runs.len() + 1);
        assert!(maxima.starts_with("replicate,status,z_t,mp,mi\n"));
        // an extinct run leaves the mp field empty
        if let Some((i, _)) = runs
            .iter()
            .enumerate()
            .find(|(_, r)| r.status == RunStatus::Extinct)
        {
            let line = maxima.lines().nth(i + 1).unwrap();
            assert!(line.contains(",extinct,"));
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[3], "");
        }
    }

    #[test]
    fn profile_outputs_agree() {
        let model =
            LifetimeOffspringModel::exp_lifetime(1.0, OffspringLaw::Constant { k: 2 }).unwrap();
        let profile = MalthusProfile::solve(&model).unwrap();
        let kv = profile_keyvalues(&profile);
        assert!(kv.contains("alpha="));
        assert!(kv.lines().count() == 5);
        let parsed: serde_json::Value = serde_json::from_str(&profile_json(&profile)).unwrap();
        let alpha: f64 = parsed["alpha"].as_f64().unwrap();
        assert!((alpha - 1.0).abs() < 1e-9);
    }
}
