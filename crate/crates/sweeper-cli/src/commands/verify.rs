use serde_json::json;
use sweeper_core::oracle;
use sweeper_core::screen::duality_metrics;
use sweeper_core::superposition::{CoherenceMode, SuperposedField};
use sweeper_core::trajectories::{integrate_trajectory, run_ensemble};

use crate::commands::{build_field_with_mode, config_error, ensure_out_dir, linspace};
use crate::config::{ModeKind, RunConfig};
use crate::error::CliError;
use crate::table::{write_report, Meta};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Informational,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Informational => "informational",
        }
    }
}

struct Check {
    name: &'static str,
    status: Status,
    detail: String,
}

struct Session<'a> {
    cfg: &'a RunConfig,
    /// Diagnostic hook: zero the current's sine cross term everywhere.
    zero_sin_term: bool,
}

impl Session<'_> {
    fn field(&self, attenuation: f64, mode: CoherenceMode) -> Result<SuperposedField, CliError> {
        let field = build_field_with_mode(self.cfg, attenuation, mode)?;
        if self.zero_sin_term {
            field.with_sin_term_scale(0.0).map_err(config_error)
        } else {
            Ok(field)
        }
    }

    /// Max relative deviation of the assembled density and current from the
    /// independently evaluated packet, across a battery of attenuations.
    fn oracle_current_equivalence(&self) -> Result<Check, CliError> {
        let cfg = self.cfg;
        let reach = cfg.half_separation + 26.0 * cfg.sigma0;
        let xs = linspace(-reach, reach, 200);
        let ts = linspace(0.0, cfg.t_end, 50);
        let mut worst: f64 = 0.0;
        for &a in &[1.0, 1e-1, 1e-4, 1e-8] {
            let field = self.field(a, CoherenceMode::Coherent { extra_phase: 0.0 })?;
            let mut max_p_dev: f64 = 0.0;
            let mut max_j_dev: f64 = 0.0;
            let mut max_p: f64 = 0.0;
            let mut max_j: f64 = 0.0;
            for &t in &ts {
                for &x in &xs {
                    let s = field.total_current(x, t);
                    let psi =
                        oracle::superposed_packet(&field.params, &field.ch1, &field.ch2, 0.0, x, t);
                    let p_ref = oracle::qm_density(&psi);
                    let j_ref = oracle::qm_current(&field.params, &psi);
                    max_p_dev = max_p_dev.max((s.density - p_ref).abs());
                    max_j_dev = max_j_dev.max((s.current - j_ref).abs());
                    max_p = max_p.max(p_ref.abs());
                    max_j = max_j.max(j_ref.abs());
                }
            }
            worst = worst.max(max_p_dev / max_p).max(max_j_dev / max_j);
        }
        let status = if worst <= 1e-10 { Status::Pass } else { Status::Fail };
        Ok(Check {
            name: "oracle_current_equivalence",
            status,
            detail: format!("max relative deviation {worst:.3e} (budget 1e-10)"),
        })
    }

    /// Continuity defect must shrink at second order in the stencil step for
    /// coherent configurations. The decoherent modes drop the cosine density
    /// term but keep the sine current term, so their defect converges to
    /// that term's divergence instead; for them the check is informational.
    fn continuity_convergence(&self) -> Result<Check, CliError> {
        let cfg = self.cfg;
        let coherent = cfg.mode == ModeKind::Coherent;
        let field = self.field(cfg.attenuation.max(1e-2), cfg.coherence_mode())?;

        let mut state = 0x9E3779B97F4A7C15u64;
        let mut unit = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / 9007199254740992.0
        };
        let reach = cfg.half_separation + 6.0 * cfg.sigma0;
        let t_lo = 0.2 * cfg.t_end;
        let mut checked = 0;
        let mut ratio_lo = f64::INFINITY;
        let mut ratio_hi = f64::NEG_INFINITY;
        let mut attempts = 0;
        while checked < 20 && attempts < 200 {
            attempts += 1;
            let x = -reach + 2.0 * reach * unit();
            let t = t_lo + (cfg.t_end - t_lo) * unit();
            let r1 = oracle::continuity_residual(&field, x, t, 0.1, 0.1).abs();
            let r2 = oracle::continuity_residual(&field, x, t, 0.05, 0.05).abs();
            if r1 < 1e-13 || r2 < 1e-13 {
                continue;
            }
            checked += 1;
            let q = r1 / r2;
            ratio_lo = ratio_lo.min(q);
            ratio_hi = ratio_hi.max(q);
        }
        let in_band = checked >= 20 && ratio_lo >= 3.5 && ratio_hi <= 4.5;
        let (status, detail) = if coherent {
            (
                if in_band { Status::Pass } else { Status::Fail },
                format!(
                    "defect ratios under step halving in [{ratio_lo:.2}, {ratio_hi:.2}] \
                     over {checked} points (budget 4 +- 0.5)"
                ),
            )
        } else {
            (
                Status::Informational,
                format!(
                    "decoherent mode keeps the sine current without its density partner; \
                     the defect converges to that term's divergence, not zero \
                     (ratios in [{ratio_lo:.2}, {ratio_hi:.2}])"
                ),
            )
        };
        Ok(Check { name: "continuity_convergence", status, detail })
    }

    fn duality_identity(&self) -> Check {
        let mut worst: f64 = 0.0;
        for i in 0..50 {
            let a = 10f64.powf(-12.0 + 12.0 * i as f64 / 49.0);
            worst = worst.max(duality_metrics(a).residual.abs());
        }
        Check {
            name: "duality_identity",
            status: if worst <= 1e-12 { Status::Pass } else { Status::Fail },
            detail: format!("max |D^2 + V^2 - 1| = {worst:.3e} (budget 1e-12)"),
        }
    }

    /// Reduced ordering battery: adjacent launch order must survive the
    /// whole integration at a balanced, a moderate, and a deep attenuation.
    fn ordering_preservation(&self) -> Result<Check, CliError> {
        let mut spec = self.cfg.ensemble_spec();
        spec.n_per_slit = 60;
        let mut worst_violations = 0u64;
        let mut details = Vec::new();
        for &a in &[1.0, 1e-4, 1e-10] {
            let field = self.field(a, self.cfg.coherence_mode())?;
            let result = run_ensemble(&field, &spec).map_err(config_error)?;
            worst_violations += result.ordering.violations;
            details.push(format!("a={a:e}: {} violations", result.ordering.violations));
        }
        Ok(Check {
            name: "ordering_preservation",
            status: if worst_violations == 0 { Status::Pass } else { Status::Fail },
            detail: details.join("; "),
        })
    }

    /// A trajectory seeded exactly on the symmetry line of a balanced pair
    /// must stay there. Checked in the two modes that preserve the mirror
    /// symmetry; the fixed-phase mode breaks it by construction.
    fn midline_invariance(&self) -> Result<Check, CliError> {
        let cfg = self.cfg;
        let spec = cfg.ensemble_spec();
        let budget = 1e-12 * cfg.t_end;
        let mut worst: f64 = 0.0;
        for mode in [CoherenceMode::Coherent { extra_phase: 0.0 }, CoherenceMode::DecoherentAveraged]
        {
            let field = self.field(1.0, mode)?;
            let (traj, _) = integrate_trajectory(&field, 1, 0.0, &spec).map_err(config_error)?;
            let drift = traj.x.iter().cloned().fold(0.0f64, |m, v| m.max(v.abs()));
            worst = worst.max(drift);
        }
        Ok(Check {
            name: "midline_invariance",
            status: if worst <= budget { Status::Pass } else { Status::Fail },
            detail: format!("max midline drift {worst:.3e} (budget {budget:.3e})"),
        })
    }
}

pub fn run(cfg: &RunConfig, zero_sin_term: bool) -> Result<(), CliError> {
    ensure_out_dir(&cfg.out_dir)?;
    let meta = Meta::new(cfg.sha256());
    let session = Session { cfg, zero_sin_term };

    let checks = vec![
        session.oracle_current_equivalence()?,
        session.continuity_convergence()?,
        session.duality_identity(),
        session.ordering_preservation()?,
        session.midline_invariance()?,
    ];

    for check in &checks {
        println!("check {}: {} ({})", check.name, check.status.as_str(), check.detail);
    }
    let passed = checks.iter().all(|c| c.status != Status::Fail);

    write_report(
        &cfg.out_dir,
        "verify_report.json",
        &json!({
            "tool": meta.tool,
            "config_sha256": meta.config_sha256,
            "sin_term_zeroed": zero_sin_term,
            "passed": passed,
            "checks": checks.iter().map(|c| json!({
                "name": c.name,
                "status": c.status.as_str(),
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        }),
    )?;

    if passed {
        println!("verification passed");
        Ok(())
    } else {
        println!("verification FAILED");
        Err(CliError::VerifyFailed)
    }
}
