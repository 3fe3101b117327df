//! Quantitative measures of the thermalized states: entanglement fidelity,
//! bipartite and tripartite mutual information, partial-transpose spectra
//! and negativity.
//!
//! Every measure exists in two forms. The numeric form works directly on the
//! truncated operators and is the ground truth of this crate; the internal
//! consistency of the operator model is what the route-equivalence checks
//! pin down. The `*_closed` forms evaluate the printed closed-form
//! expressions literally, as an audit overlay: several of them disagree with
//! the operator model (the fidelity prefactors, the W-state information
//! series, and the threshold implied by the printed partial-transpose
//! spectrum), and the sweep reports the difference per row instead of
//! pretending the two always coincide.
//!
//! Mutual information is reported in bits throughout, matching the log2
//! series; the entropy routine itself also offers nats.

use crate::channel::{ChannelParams, KrausSet};
use crate::error::{Error, Result};
use crate::fock::{von_neumann_entropy, DensityOperator, LogBase};
use crate::states::{
    final_rho_ab_closed, ThermalizedSystem, StateKind, MODE_A, MODE_B, MODE_C,
};

/// Partial-transpose eigenvalues in (-1e-10, 0) are truncation noise and are
/// treated as zero; only values below this count toward the negativity.
pub const NEGATIVE_EIG_CUTOFF: f64 = -1e-10;

/// Negativity level that counts as "still entangled" in the threshold
/// bisection.
pub const THRESHOLD_NEG_CUTOFF: f64 = 1e-9;

/// Bisection bracket and resolution for the vanishing point of the W-state
/// negativity. The bracket contains both candidate thresholds with margin.
pub const THRESHOLD_BRACKET: (f64, f64) = (0.5, 1.2);
pub const THRESHOLD_GAMMA_TOL: f64 = 1e-6;

/// The threshold quoted alongside the closed forms: 0.783.
pub const QUOTED_THRESHOLD: f64 = 0.783;

/// Rate where the closed-form partial-transpose spectrum stops producing
/// negative eigenvalues: each spectral pair has a negative member exactly
/// when sinh(gamma) < 1, i.e. up to arcsinh(1) = ln(1 + sqrt 2) ~ 0.881374.
pub fn closed_form_threshold() -> f64 {
    1.0f64.asinh()
}

/// Below this rate the W-state closed information series (which carries a
/// log2 tanh^2 term) is refused rather than extrapolated.
pub const W_CLOSED_MIN_GAMMA: f64 = 1e-6;

fn xlog2(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Scalar helpers shared by the closed-form series:
/// W_n = 2 + n/sinh^2, W'_n = 2 + (n+1)/cosh^2 and the spectral pair
/// M_n^+- = 1 + tanh^2 + (n+1)/cosh^2
///          +- sqrt(1 - tanh^2 + 1/cosh^2) sqrt(1 + 3 tanh^2 + (n+1)/cosh^2).
/// W_0 takes its limit value 2 (the n = 0 numerator vanishes before the
/// 1/sinh^2 can blow up).
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormHelpers {
    tanh_sq: f64,
    cosh_sq: f64,
    sinh_sq: f64,
}

impl ClosedFormHelpers {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "expansion rate must be finite and nonnegative, got {gamma}"
            )));
        }
        Ok(Self {
            tanh_sq: gamma.tanh().powi(2),
            cosh_sq: gamma.cosh().powi(2),
            sinh_sq: gamma.sinh().powi(2),
        })
    }

    pub fn tanh_sq(&self) -> f64 {
        self.tanh_sq
    }

    pub fn cosh_sq(&self) -> f64 {
        self.cosh_sq
    }

    pub fn w_n(&self, n: usize) -> f64 {
        if n == 0 {
            2.0
        } else {
            2.0 + n as f64 / self.sinh_sq
        }
    }

    pub fn w_prime_n(&self, n: usize) -> f64 {
        2.0 + (n + 1) as f64 / self.cosh_sq
    }

    fn m_pair(&self, n: usize) -> (f64, f64) {
        let u = (n + 1) as f64 / self.cosh_sq;
        let mid = 1.0 + self.tanh_sq + u;
        let radical = (1.0 - self.tanh_sq + 1.0 / self.cosh_sq).sqrt()
            * (1.0 + 3.0 * self.tanh_sq + u).sqrt();
        (mid + radical, mid - radical)
    }

    pub fn m_plus(&self, n: usize) -> f64 {
        self.m_pair(n).0
    }

    pub fn m_minus(&self, n: usize) -> f64 {
        self.m_pair(n).1
    }
}

/// Entanglement fidelity sum_n (tr(rho (I (x) A_n)))^2 of the channel acting
/// on the second mode of a two-mode state. Only the bands of the Kraus
/// family are touched.
pub fn entanglement_fidelity_numeric(rho: &DensityOperator, ks: &KrausSet) -> Result<f64> {
    let layout = rho.layout();
    if layout.num_modes() != 2 {
        return Err(Error::DimensionMismatch(
            "entanglement fidelity expects a two-mode state".into(),
        ));
    }
    let f = ks.params().fock_dim();
    if layout.dims()[1] != f {
        return Err(Error::DimensionMismatch(format!(
            "second mode has dimension {}, Kraus side is {f}",
            layout.dims()[1]
        )));
    }
    let d_a = layout.dims()[0];
    let m = rho.matrix();
    let mut fidelity = 0.0;
    for n in 0..ks.len() {
        let band = ks.band(n);
        let mut tr = 0.0;
        for a in 0..d_a {
            let base = a * f;
            for (j, &bj) in band.iter().enumerate() {
                tr += m[(base + j, base + j + n)] * bj;
            }
        }
        fidelity += tr * tr;
    }
    Ok(fidelity)
}

/// Literal evaluation of the printed closed-form fidelities:
/// GHZ (1 + 1/cosh^2)^2 / (4 cosh^2), W (2 + 1/cosh^2)^2 / (9 cosh^2).
/// The operator model gives 1/cosh (not squared) inside the bracket; both
/// agree only at gamma = 0 and the sweep records the gap.
pub fn fidelity_closed_paper(kind: StateKind, gamma: f64) -> f64 {
    let c2 = gamma.cosh().powi(2);
    match kind {
        StateKind::Ghz => (1.0 + 1.0 / c2).powi(2) / (4.0 * c2),
        StateKind::W => (2.0 + 1.0 / c2).powi(2) / (9.0 * c2),
    }
}

/// Base-2 mutual information S(A) + S(B) - S(AB) between two disjoint
/// groups of modes that together cover the state.
pub fn mutual_information(
    rho: &DensityOperator,
    part_a: &[usize],
    part_b: &[usize],
) -> Result<f64> {
    let modes = rho.layout().num_modes();
    let mut seen = vec![false; modes];
    for &m in part_a.iter().chain(part_b) {
        if m >= modes {
            return Err(Error::OutOfRange { index: m, dim: modes });
        }
        if seen[m] {
            return Err(Error::InvalidArgument(format!(
                "mode {m} appears in both partitions"
            )));
        }
        seen[m] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidArgument(
            "partitions must cover every mode of the state".into(),
        ));
    }
    let s_a = von_neumann_entropy(&rho.partial_trace(part_a)?, LogBase::Two)?;
    let s_b = von_neumann_entropy(&rho.partial_trace(part_b)?, LogBase::Two)?;
    let s_ab = von_neumann_entropy(rho, LogBase::Two)?;
    Ok(s_a + s_b - s_ab)
}

/// Literal partial sum of the printed bipartite information series.
///
/// GHZ: 1 + 1/(2 cosh^2) sum tanh^2n [ (W_n - 2) log2(W_n - 2)
///        - (W_n - 1) log2(W_n - 1) ]
/// W:   log2 3 - 5/3 - log2(3 cosh^2)/(3 cosh^2) - log2(tanh^2)/3
///        - 1/(6 cosh^2) sum tanh^2n [ M+ log2 M+ + M- log2 M-
///          - 2 W_n log2 W_n - (2/cosh^2) log2(tanh^2n / (6 cosh^2)) ]
///
/// The last W term is evaluated as n log2(tanh^2) - log2(6 cosh^2) so the
/// partial sums survive the underflow of tanh^2n at large n. The W series
/// diverges as gamma -> 0 and is refused below `W_CLOSED_MIN_GAMMA`.
pub fn bipartite_mi_closed(kind: StateKind, gamma: f64, n_terms: usize) -> Result<f64> {
    let h = ClosedFormHelpers::new(gamma)?;
    match kind {
        StateKind::Ghz => {
            let mut acc = 0.0;
            let mut t2n = 1.0;
            for n in 0..=n_terms {
                if t2n == 0.0 {
                    break;
                }
                let w = h.w_n(n);
                acc += t2n * (xlog2(w - 2.0) - xlog2(w - 1.0));
                t2n *= h.tanh_sq;
            }
            Ok(1.0 + acc / (2.0 * h.cosh_sq))
        }
        StateKind::W => {
            if gamma < W_CLOSED_MIN_GAMMA {
                return Err(Error::Domain(format!(
                    "the printed W information series diverges as the rate \
                     vanishes; got gamma = {gamma:e}, use the numeric path"
                )));
            }
            let log_t2 = h.tanh_sq.log2();
            let log_6c2 = (6.0 * h.cosh_sq).log2();
            let mut acc = 0.0;
            let mut t2n = 1.0;
            for n in 0..=n_terms {
                if t2n == 0.0 {
                    break;
                }
                let tail_log = n as f64 * log_t2 - log_6c2;
                acc += t2n
                    * (xlog2(h.m_plus(n)) + xlog2(h.m_minus(n)) - 2.0 * xlog2(h.w_n(n))
                        - 2.0 / h.cosh_sq * tail_log);
                t2n *= h.tanh_sq;
            }
            Ok(3.0f64.log2() - 5.0 / 3.0 - (3.0 * h.cosh_sq).log2() / (3.0 * h.cosh_sq)
                - log_t2 / 3.0
                - acc / (6.0 * h.cosh_sq))
        }
    }
}

/// Numeric tripartite information I(A:B) + I(A:C) - I(A:BC) of the
/// three-party state, from the seven entropies of its marginals (bits).
/// Identically zero whenever the total state is pure.
pub fn tripartite_mi_numeric(sys: &ThermalizedSystem) -> Result<f64> {
    let s = |keep: &[usize]| -> Result<f64> {
        von_neumann_entropy(&sys.marginal(keep)?, LogBase::Two)
    };
    Ok(s(&[MODE_A])? + s(&[MODE_B])? + s(&[MODE_C])?
        - s(&[MODE_A, MODE_B])?
        - s(&[MODE_A, MODE_C])?
        - s(&[MODE_B, MODE_C])?
        + s(&[MODE_A, MODE_B, MODE_C])?)
}

/// Literal partial sum of the printed tripartite information series; same
/// guards and underflow handling as `bipartite_mi_closed`.
pub fn tripartite_mi_closed(kind: StateKind, gamma: f64, n_terms: usize) -> Result<f64> {
    let h = ClosedFormHelpers::new(gamma)?;
    match kind {
        StateKind::Ghz => {
            let mut acc = 0.0;
            let mut t2n = 1.0;
            for n in 0..=n_terms {
                if t2n == 0.0 {
                    break;
                }
                let w = h.w_n(n);
                let wp = h.w_prime_n(n);
                acc += t2n
                    * (xlog2(w - 2.0) + xlog2(wp - 2.0) - xlog2(w - 1.0) - xlog2(wp - 1.0));
                t2n *= h.tanh_sq;
            }
            Ok(1.0 + acc / (2.0 * h.cosh_sq))
        }
        StateKind::W => {
            if gamma < W_CLOSED_MIN_GAMMA {
                return Err(Error::Domain(format!(
                    "the printed W information series diverges as the rate \
                     vanishes; got gamma = {gamma:e}, use the numeric path"
                )));
            }
            let log_t2 = h.tanh_sq.log2();
            let log_6c2 = (6.0 * h.cosh_sq).log2();
            let mut acc = 0.0;
            let mut t2n = 1.0;
            for n in 0..=n_terms {
                if t2n == 0.0 {
                    break;
                }
                let tail_log = n as f64 * log_t2 - log_6c2;
                acc += t2n
                    * (xlog2(h.m_plus(n)) + xlog2(h.m_minus(n))
                        - xlog2(h.w_n(n))
                        - xlog2(h.w_prime_n(n))
                        - 2.0 / h.cosh_sq * tail_log);
                t2n *= h.tanh_sq;
            }
            Ok(3.0f64.log2() - 8.0 / 3.0
                - 2.0 * (3.0 * h.cosh_sq).log2() / (3.0 * h.cosh_sq)
                - log_t2 / 3.0
                - acc / (3.0 * h.cosh_sq))
        }
    }
}

/// Sum of |lambda| over the genuinely negative eigenvalues of the partial
/// transpose on the given mode. Eigenvalues inside the noise window
/// (`NEGATIVE_EIG_CUTOFF`, 0) count as zero.
pub fn negativity(rho: &DensityOperator, sub: usize) -> Result<f64> {
    let pt = rho.partial_transpose(sub)?;
    let evals = pt.eigenvalues()?;
    Ok(evals
        .into_iter()
        .filter(|&l| l < NEGATIVE_EIG_CUTOFF)
        .map(|l| -l)
        .sum())
}

/// Literal evaluation of the printed partial-transpose spectral pair for the
/// thermalized W state,
///
/// lambda_n^+- = tanh^2n / (6 cosh^2) [ X_n +- sqrt(X_n^2 - 4 tanh^2
///               + 4/cosh^2) ],  X_n = 1 + n/sinh^2 + tanh^2,
///
/// returned as (plus, minus). Undefined at gamma = 0 (1/sinh^2).
pub fn pt_spectrum_w_closed(gamma: f64, n: usize) -> Result<(f64, f64)> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(
            "the printed spectral pair carries 1/sinh^2 and needs gamma > 0".into(),
        ));
    }
    let (t2, c2, s2) = (gamma.tanh().powi(2), gamma.cosh().powi(2), gamma.sinh().powi(2));
    let x = 1.0 + n as f64 / s2 + t2;
    let radical = (x * x - 4.0 * t2 + 4.0 / c2).sqrt();
    let scale = t2.powi(n as i32) / (6.0 * c2);
    Ok((scale * (x + radical), scale * (x - radical)))
}

/// Negativity implied by the printed spectral pairs: sum of |lambda| over
/// the negative members of the first `n_terms + 1` pairs.
pub fn negativity_w_closed(gamma: f64, n_terms: usize) -> Result<f64> {
    let mut acc = 0.0;
    for n in 0..=n_terms {
        let (plus, minus) = pt_spectrum_w_closed(gamma, n)?;
        if plus < 0.0 {
            acc -= plus;
        }
        if minus < 0.0 {
            acc -= minus;
        }
    }
    Ok(acc)
}

/// Largest rate at which the W-state negativity still exceeds
/// `THRESHOLD_NEG_CUTOFF`, located by bisection over `THRESHOLD_BRACKET`
/// with auto-selected truncation at every probe. The GHZ partial transpose
/// never goes negative, so there is nothing to bisect for it.
pub fn negativity_threshold(kind: StateKind, tail_tol: f64) -> Result<f64> {
    if kind == StateKind::Ghz {
        return Err(Error::Unsupported(
            "the GHZ partial transpose has no negative eigenvalues at any \
             rate; the threshold only exists for the W state"
            .into(),
        ));
    }
    let probe = |gamma: f64| -> Result<f64> {
        let params = ChannelParams::auto(gamma, tail_tol)?;
        let rho = final_rho_ab_closed(StateKind::W, &params)?;
        negativity(&rho, 0)
    };
    let (mut lo, mut hi) = THRESHOLD_BRACKET;
    if probe(lo)? <= THRESHOLD_NEG_CUTOFF || probe(hi)? > THRESHOLD_NEG_CUTOFF {
        return Err(Error::Domain(format!(
            "negativity does not change sign over [{lo}, {hi}]"
        )));
    }
    while hi - lo > THRESHOLD_GAMMA_TOL {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? > THRESHOLD_NEG_CUTOFF {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Which measure a sweep row reports.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Fidelity,
    MiAb,
    MiAbc,
    Negativity,
}

impl Measure {
    pub const ALL: [Measure; 4] =
        [Measure::Fidelity, Measure::MiAb, Measure::MiAbc, Measure::Negativity];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Fidelity => "fidelity",
            Measure::MiAb => "mi_ab",
            Measure::MiAbc => "mi_abc",
            Measure::Negativity => "negativity",
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fidelity" => Ok(Measure::Fidelity),
            "mi-ab" | "mi_ab" => Ok(Measure::MiAb),
            "mi-abc" | "mi_abc" => Ok(Measure::MiAbc),
            "negativity" => Ok(Measure::Negativity),
            other => Err(Error::InvalidArgument(format!(
                "unknown measure '{other}' (expected fidelity, mi-ab, mi-abc \
                 or negativity)"
            ))),
        }
    }
}

use std::str::FromStr;

/// One sweep row: a measure of one state at one rate, numeric value first,
/// closed-form value and the gap when a printed form exists.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MeasureRecord {
    pub gamma: f64,
    pub kind: StateKind,
    pub measure: Measure,
    pub value_numeric: f64,
    pub value_closed: Option<f64>,
    pub abs_diff: Option<f64>,
    pub truncation: usize,
    pub tail_bound: f64,
}

impl MeasureRecord {
    pub fn new(
        gamma: f64,
        kind: StateKind,
        measure: Measure,
        value_numeric: f64,
        value_closed: Option<f64>,
        params: &ChannelParams,
    ) -> Self {
        Self {
            gamma,
            kind,
            measure,
            value_numeric,
            value_closed,
            abs_diff: value_closed.map(|c| (value_numeric - c).abs()),
            truncation: params.truncation(),
            tail_bound: params.tail_bound(),
        }
    }
}
