use super::poll::{mix, poll_step};
use super::{
    functional_eval, Phase, PollSnapshot, SearchConfig, SearchError, SearchTrace, Termination,
    ToleranceMode, TraceRecord,
};
use crate::fem::{residual_norm, LinearSystem};
use crate::sampler::Sampler;
use crate::scalar::Real;

/// `max|b| / max|A|`, or `1` when either vanishes.
pub fn default_alpha0<T: Real>(sys: &LinearSystem<T>) -> f64 {
    let bmax = sys.rhs().iter().fold(0.0f64, |m, v| m.max(v.as_f64().abs()));
    let amax = sys.matrix().max_abs().as_f64();
    if bmax > 0.0 && amax > 0.0 && (bmax / amax).is_finite() {
        bmax / amax
    } else {
        1.0
    }
}

/// Runs polls from the Dirichlet-consistent zero guess until the residual
/// target, scale underflow or the iteration cap.
pub fn run<T: Real, S: Sampler<T> + ?Sized>(
    sys: &LinearSystem<T>,
    cfg: &SearchConfig,
    sampler: &S,
) -> Result<SearchTrace<T>, SearchError> {
    cfg.validate()?;
    let functional = cfg.functional_for(sys);
    let alpha0 = cfg.alpha0.unwrap_or_else(|| default_alpha0(sys));
    let mut u = sys.initial_guess();
    let r0 = residual_norm(sys, &u)?.as_f64();
    let target = match cfg.tolerance_mode {
        ToleranceMode::Relative => cfg.tolerance * r0,
        ToleranceMode::Absolute => cfg.tolerance,
    };
    // tracked through exact gains so the record is monotone
    let mut f_cur = functional_eval(sys, &u, functional)?;
    let mut residual = r0;
    let mut alpha = alpha0;
    let mut phase = if cfg.expansion { Phase::Expansion } else { Phase::Contraction };
    let mut records = vec![TraceRecord {
        iter: 0,
        alpha,
        functional: f_cur.as_f64(),
        residual,
        success: false,
        phase: Phase::Initial,
    }];
    let mut snapshots = Vec::new();

    let termination = loop {
        let iter = records.len() - 1;
        if residual <= target || residual == 0.0 {
            break Termination::Converged;
        }
        if alpha < 1e-14 * alpha0 {
            break Termination::AlphaUnderflow;
        }
        if iter >= cfg.max_iterations {
            break Termination::MaxIterations;
        }
        let a = T::of(alpha);
        let out = poll_step(sys, &u, a, cfg.method, functional, sampler, cfg.reads, mix(cfg.seed, iter as u64))?;
        if cfg.record_snapshots {
            snapshots.push(PollSnapshot {
                iter: iter + 1,
                alpha: a,
                u: u.clone(),
                u_a: out.u_a.clone(),
            });
        }
        let used = alpha;
        let used_phase = phase;
        let success = match out.best {
            Some(best) => {
                u = best.u;
                f_cur += best.gain;
                residual = residual_norm(sys, &u)?.as_f64();
                if phase == Phase::Expansion {
                    alpha *= cfg.growth;
                }
                true
            }
            None => {
                phase = Phase::Contraction;
                alpha *= cfg.shrink;
                false
            }
        };
        records.push(TraceRecord {
            iter: iter + 1,
            alpha: used,
            functional: f_cur.as_f64(),
            residual,
            success,
            phase: used_phase,
        });
    };

    Ok(SearchTrace {
        records,
        solution: u,
        termination,
        initial_residual: r0,
        snapshots,
    })
}
