use super::{Method, PollSnapshot, SearchError};
use crate::fem::LinearSystem;
use crate::ising::{
    build_frame, decode, map_lsq, map_spd, nested_compose, to_standard, Functional, NestedFrame,
    NestedGrid, SearchFrame, StandardIsing,
};
use crate::linalg::dot;
use crate::sampler::{sample_batch, Sample, Sampler};
use crate::scalar::Real;

/// A decoded point and its change `L(u) - L(u_i)` of the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<T> {
    pub u: Vec<T>,
    pub gain: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PollOutcome<T> {
    /// Lowest candidate if it strictly improves the objective.
    pub best: Option<Candidate<T>>,
    /// Step-one choice of a hyperoctant poll.
    pub u_a: Option<Vec<T>>,
    pub samples: Vec<Sample<T>>,
}

impl<T: Real> PollOutcome<T> {
    pub fn success(&self) -> bool {
        self.best.is_some()
    }
}

pub(crate) fn mix(seed: u64, k: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `L(u + delta) - L(u)` from the residual `r = A u - b`, avoiding the
/// cancellation of two large functional values.
fn gain<T: Real>(sys: &LinearSystem<T>, r: &[T], delta: &[T], functional: Functional) -> T {
    let ad = sys.matrix().matvec(delta);
    match functional {
        Functional::Energy => dot(delta, r) + T::of(0.5) * dot(delta, &ad),
        Functional::LeastSquares => T::of(2.0) * dot(&ad, r) + dot(&ad, &ad),
    }
}

fn frame_hamiltonian<T: Real>(
    sys: &LinearSystem<T>,
    frame: &SearchFrame<T>,
    functional: Functional,
) -> Result<StandardIsing<T>, SearchError> {
    let m = match functional {
        Functional::Energy => map_spd(sys, frame)?,
        Functional::LeastSquares => map_lsq(sys, frame)?,
    };
    Ok(to_standard(&m))
}

fn nested_grid(method: Method) -> Option<NestedGrid> {
    match method {
        Method::Poll3 => Some(NestedGrid::D3),
        Method::Poll4 => Some(NestedGrid::D4),
        _ => None,
    }
}

/// Evaluates decoded points; returns the lowest (first on ties) candidate.
fn evaluate<T: Real>(
    sys: &LinearSystem<T>,
    u: &[T],
    r: &[T],
    points: Vec<Vec<T>>,
    functional: Functional,
) -> Option<Candidate<T>> {
    let mut best: Option<Candidate<T>> = None;
    for p in points {
        let delta: Vec<T> = p.iter().zip(u).map(|(&a, &b)| a - b).collect();
        let g = gain(sys, r, &delta, functional);
        if best.as_ref().is_none_or(|b| g < b.gain) {
            best = Some(Candidate { u: p, gain: g });
        }
    }
    best
}

fn improving<T: Real>(c: Option<Candidate<T>>) -> Option<Candidate<T>> {
    c.filter(|c| c.gain < T::zero())
}

/// One poll of `method` around `u` with scale `alpha`.
#[allow(clippy::too_many_arguments)]
pub fn poll_step<T: Real, S: Sampler<T> + ?Sized>(
    sys: &LinearSystem<T>,
    u: &[T],
    alpha: T,
    method: Method,
    functional: Functional,
    sampler: &S,
    reads: usize,
    seed: u64,
) -> Result<PollOutcome<T>, SearchError> {
    if method == Method::Hyperoctant {
        return hyperoctant_step(sys, u, alpha, functional, sampler, reads, seed);
    }
    let r = sys.residual(u)?;
    let zeros = vec![T::zero(); u.len()];
    let (samples, points) = match nested_grid(method) {
        None => {
            let frame = build_frame(sys, u, alpha, &zeros)?;
            let h = frame_hamiltonian(sys, &frame, functional)?;
            let samples = sample_batch(sampler, &h, reads, seed)?;
            let points = samples
                .iter()
                .map(|s| decode(&frame, &s.spins))
                .collect::<Result<Vec<_>, _>>()?;
            (samples, points)
        }
        Some(grid) => {
            let frame = NestedFrame::for_grid(sys, u, alpha, grid)?;
            let h = to_standard(&nested_compose(sys, &frame, functional)?);
            let samples = sample_batch(sampler, &h, reads, seed)?;
            let points = samples
                .iter()
                .map(|s| frame.decode(&s.spins))
                .collect::<Result<Vec<_>, _>>()?;
            (samples, points)
        }
    };
    Ok(PollOutcome {
        best: improving(evaluate(sys, u, &r, points, functional)),
        u_a: None,
        samples,
    })
}

/// Two-step poll: `u_a` is the best of `u + alpha D2`; the second poll
/// covers `(u + u_a)/2 + (alpha/2) D2`, which lies in the hyperoctant of
/// `u_a` relative to `u`.
pub fn hyperoctant_step<T: Real, S: Sampler<T> + ?Sized>(
    sys: &LinearSystem<T>,
    u: &[T],
    alpha: T,
    functional: Functional,
    sampler: &S,
    reads: usize,
    seed: u64,
) -> Result<PollOutcome<T>, SearchError> {
    let r = sys.residual(u)?;
    let zeros = vec![T::zero(); u.len()];
    let f1 = build_frame(sys, u, alpha, &zeros)?;
    let h1 = frame_hamiltonian(sys, &f1, functional)?;
    let mut samples = sample_batch(sampler, &h1, reads, seed)?;
    let p1 = samples
        .iter()
        .map(|s| decode(&f1, &s.spins))
        .collect::<Result<Vec<_>, _>>()?;
    let step1 = evaluate(sys, u, &r, p1, functional);
    let u_a = step1.as_ref().map_or_else(|| u.to_vec(), |c| c.u.clone());

    let half = alpha / T::of(2.0);
    let delta: Vec<T> = u_a.iter().zip(u).map(|(&a, &b)| (a - b) / T::of(2.0)).collect();
    let f2 = build_frame(sys, u, half, &delta)?;
    let h2 = frame_hamiltonian(sys, &f2, functional)?;
    let s2 = sample_batch(sampler, &h2, reads, mix(seed, 1))?;
    let p2 = s2
        .iter()
        .map(|s| decode(&f2, &s.spins))
        .collect::<Result<Vec<_>, _>>()?;
    let step2 = evaluate(sys, u, &r, p2, functional);
    samples.extend(s2);

    let best = match (step1, step2) {
        (Some(a), Some(b)) => Some(if b.gain < a.gain { b } else { a }),
        (a, b) => a.or(b),
    };
    Ok(PollOutcome {
        best: improving(best),
        u_a: Some(u_a),
        samples,
    })
}

/// The standard-form Hamiltonians a recorded poll sampled from, in order.
pub fn poll_hamiltonians<T: Real>(
    sys: &LinearSystem<T>,
    snapshot: &PollSnapshot<T>,
    method: Method,
    functional: Functional,
) -> Result<Vec<StandardIsing<T>>, SearchError> {
    let u = &snapshot.u;
    let alpha = snapshot.alpha;
    let zeros = vec![T::zero(); u.len()];
    match (method, nested_grid(method)) {
        (_, Some(grid)) => {
            let frame = NestedFrame::for_grid(sys, u, alpha, grid)?;
            Ok(vec![to_standard(&nested_compose(sys, &frame, functional)?)])
        }
        (Method::Hyperoctant, None) => {
            let f1 = build_frame(sys, u, alpha, &zeros)?;
            let mut out = vec![frame_hamiltonian(sys, &f1, functional)?];
            if let Some(u_a) = &snapshot.u_a {
                let delta: Vec<T> = u_a.iter().zip(u).map(|(&a, &b)| (a - b) / T::of(2.0)).collect();
                let f2 = build_frame(sys, u, alpha / T::of(2.0), &delta)?;
                out.push(frame_hamiltonian(sys, &f2, functional)?);
            }
            Ok(out)
        }
        _ => {
            let f = build_frame(sys, u, alpha, &zeros)?;
            Ok(vec![frame_hamiltonian(sys, &f, functional)?])
        }
    }
}
