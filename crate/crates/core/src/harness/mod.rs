//! File formats, solver reports, and the Monte Carlo experiments behind the
//! command-line tool.

pub mod experiments;
pub mod system_file;

use serde::Serialize;

use crate::error::Result;
use crate::hpoly::PolySystem;
use crate::rigid::{solve, Outcome, TrackerSettings};
use crate::rng::{stream, trial_rng};
use crate::unitary::UnitaryTuple;
use crate::zeros::residuals;

pub use experiments::{
    gamma_moment, kappa_moment, lipschitz, step_scaling, to_csv, with_threads, CsvRecord, GammaMomentRecord,
    KappaMomentRecord, LipschitzRecord, StepScalingRecord,
};
pub use system_file::{parse_system, serialize_system};

/// Everything `rigid-hc solve` prints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub outcome: String,
    pub certified: bool,
    pub steps: u64,
    pub path_length: f64,
    /// `(re, im)` of each homogeneous coordinate, unit norm.
    pub zero: Vec<(f64, f64)>,
    /// `|f_i(z)| / ‖f_i‖_W`
    pub residuals: Vec<f64>,
    pub contraction_ratios: Vec<f64>,
}

impl SolveReport {
    /// Exit status of the command-line tool: 0 certified, 1 tracked but not
    /// certified, 3 tracking failure.
    pub fn exit_code(&self) -> i32 {
        if self.outcome != Outcome::Success.as_str() {
            3
        } else if self.certified {
            0
        } else {
            1
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("outcome {}\n", self.outcome));
        s.push_str(&format!("certified {}\n", self.certified));
        s.push_str(&format!("steps {}\n", self.steps));
        s.push_str(&format!("path_length {:?}\n", self.path_length));
        s.push_str("zero\n");
        for (re, im) in &self.zero {
            s.push_str(&format!("  {re:?} {im:?}\n"));
        }
        let res: Vec<String> = self.residuals.iter().map(|r| format!("{r:?}")).collect();
        s.push_str(&format!("residuals {}\n", res.join(" ")));
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Solves `F` with the identity target, drawing the start pair from the
/// `(seed, solve)` stream. On success the reported zero is the certificate's
/// refined iterate; otherwise it is the last tracked point.
pub fn solve_report(f: &PolySystem<f64>, seed: u64, settings: &TrackerSettings<f64>) -> Result<SolveReport> {
    let mut rng = trial_rng(seed, stream::SOLVE, 0);
    let id = UnitaryTuple::identity(f.n());
    let out = solve(f, &id, &mut rng, settings)?;
    let certified = out.certified();
    let (zero, ratios) = match &out.certificate {
        Some(c) => (c.refined.clone(), c.contraction_ratios.clone()),
        None => (out.zero.clone(), Vec::new()),
    };
    Ok(SolveReport {
        outcome: out.stats.outcome.to_string(),
        certified,
        steps: out.stats.steps_k,
        path_length: out.stats.path_length_t,
        zero: zero.rep().iter().map(|c| (c.re, c.im)).collect(),
        residuals: residuals(f, &id, &zero)?,
        contraction_ratios: ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadric_report() {
        let f = parse_system(include_str!("../../data/quadric.polysys")).unwrap();
        let r = solve_report(&f, 42, &TrackerSettings::default()).unwrap();
        assert_eq!(r.exit_code(), 0);
        assert!(r.residuals[0] <= 1e-10);
        let (a, b) = (r.zero[0], r.zero[1]);
        // zeros of x0² − x1² are [1 : ±1]
        let ratio = num_complex::Complex::new(b.0, b.1) / num_complex::Complex::new(a.0, a.1);
        assert!((ratio.re.abs() - 1.0).abs() <= 1e-10 && ratio.im.abs() <= 1e-10);
        assert_eq!(r, solve_report(&f, 42, &TrackerSettings::default()).unwrap());
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["certified"], true);
    }
}
