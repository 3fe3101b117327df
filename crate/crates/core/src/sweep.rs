//! Sweep orchestration: evaluate the requested measures for every state on
//! a rate grid, attach closed-form overlays where they exist, and emit the
//! rows deterministically.
//!
//! Determinism is a hard requirement here: the same configuration must
//! produce byte-identical output on every run, with or without the thread
//! pool. Each (rate, state) task is pure and self-contained, the parallel
//! map preserves task order, and the final sort key (rate, state, measure)
//! is total, so the parallel and serial paths produce the same rows in the
//! same order bit for bit.
//!
//! Numbers are printed with 12 significant digits; `truncation` is an
//! integer column. Fields with no closed form stay empty in CSV and null in
//! JSON.

use crate::channel::{apply_channel, choi_min_eigenvalue, kraus_set, ChannelParams};
use crate::error::{Error, Result};

use crate::measures::{
    bipartite_mi_closed, closed_form_threshold, entanglement_fidelity_numeric,
    fidelity_closed_paper, mutual_information, negativity, negativity_threshold,
    negativity_w_closed, tripartite_mi_closed, tripartite_mi_numeric, Measure, MeasureRecord,
    QUOTED_THRESHOLD,
};
use crate::states::{final_rho_ab_closed, reduced_initial_fock, thermalize, StateKind, MODE_A, MODE_B};
use std::fmt;
use std::str::FromStr;

/// Below this rate the closed W information series is left out of sweep
/// rows even though the routine itself still accepts the value: the series
/// needs ever more terms and ever more cancellation as the rate shrinks,
/// and the rows would report noise as if it were a reference value.
pub const SWEEP_W_CLOSED_MIN_GAMMA: f64 = 1e-4;

/// Whether closed-form columns are computed and which rows are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormMode {
    /// Numeric values only; closed columns stay empty.
    NumericOnly,
    /// Keep only rows that have a printed closed form, and fill it in.
    PaperOnly,
    /// Every row, closed column filled where a printed form exists.
    Both,
}

impl ClosedFormMode {
    pub fn name(self) -> &'static str {
        match self {
            ClosedFormMode::NumericOnly => "numeric",
            ClosedFormMode::PaperOnly => "paper",
            ClosedFormMode::Both => "both",
        }
    }
}

impl fmt::Display for ClosedFormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClosedFormMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "numeric" => Ok(ClosedFormMode::NumericOnly),
            "paper" => Ok(ClosedFormMode::PaperOnly),
            "both" => Ok(ClosedFormMode::Both),
            other => Err(Error::InvalidArgument(format!(
                "unknown closed-form mode '{other}' (expected numeric, paper or both)"
            ))),
        }
    }
}

/// Output syntax for the sweep rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown output format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// Fock-space cutoff selection: per-rate automatic from the tail tolerance,
/// or one explicit cutoff for every rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationChoice {
    Auto,
    Explicit(usize),
}

impl TruncationChoice {
    pub fn params(self, gamma: f64, tail_tol: f64) -> Result<ChannelParams> {
        match self {
            TruncationChoice::Auto => ChannelParams::auto(gamma, tail_tol),
            TruncationChoice::Explicit(n) => ChannelParams::new(gamma, n, tail_tol),
        }
    }
}

impl fmt::Display for TruncationChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruncationChoice::Auto => f.write_str("auto"),
            TruncationChoice::Explicit(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for TruncationChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(TruncationChoice::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(TruncationChoice::Explicit(n)),
            _ => Err(Error::InvalidArgument(format!(
                "truncation must be 'auto' or an integer >= 1, got '{s}'"
            ))),
        }
    }
}

/// Everything a sweep needs: which states and measures, the rate grid,
/// cutoff policy and the closed-form mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub kinds: Vec<StateKind>,
    pub measures: Vec<Measure>,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_step: f64,
    pub truncation: TruncationChoice,
    pub tail_tol: f64,
    pub closed_form: ClosedFormMode,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            kinds: StateKind::ALL.to_vec(),
            measures: Measure::ALL.to_vec(),
            gamma_min: 0.0,
            gamma_max: 2.0,
            gamma_step: 0.01,
            truncation: TruncationChoice::Auto,
            tail_tol: crate::channel::DEFAULT_TAIL_TOL,
            closed_form: ClosedFormMode::Both,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::InvalidArgument("no states selected".into()));
        }
        if self.measures.is_empty() {
            return Err(Error::InvalidArgument("no measures selected".into()));
        }
        for v in [self.gamma_min, self.gamma_max, self.gamma_step] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(
                    "rate grid parameters must be finite".into(),
                ));
            }
        }
        if self.gamma_min < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "rate grid starts below zero: {}",
                self.gamma_min
            )));
        }
        if self.gamma_max < self.gamma_min {
            return Err(Error::InvalidArgument(format!(
                "empty rate grid: max {} below min {}",
                self.gamma_max, self.gamma_min
            )));
        }
        if self.gamma_step <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "rate step must be positive, got {}",
                self.gamma_step
            )));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail tolerance must lie in (0, 1), got {}",
                self.tail_tol
            )));
        }
        Ok(())
    }

    fn normalized_kinds(&self) -> Vec<StateKind> {
        let mut kinds = self.kinds.clone();
        kinds.sort();
        kinds.dedup();
        kinds
    }

    fn normalized_measures(&self) -> Vec<Measure> {
        let mut measures = self.measures.clone();
        measures.sort();
        measures.dedup();
        measures
    }
}

/// The rate grid min, min + step, ..., with floor((max - min)/step) + 1
/// points. Points are computed as min + i * step (never by accumulation) so
/// each is as close to the intended value as one rounding allows.
pub fn gamma_grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| min + i as f64 * step).collect()
}

/// The closed-form overlay for one row, or None where no printed form
/// exists (GHZ negativity) or where the series is refused (W information
/// at rates below `SWEEP_W_CLOSED_MIN_GAMMA`, spectra at rate zero).
/// Series partial sums run to n = N so the closed and numeric paths share
/// one cutoff; the tail bound column quantifies what both discard.
fn closed_value(
    kind: StateKind,
    measure: Measure,
    gamma: f64,
    params: &ChannelParams,
) -> Result<Option<f64>> {
    let terms = params.truncation();
    Ok(match measure {
        Measure::Fidelity => Some(fidelity_closed_paper(kind, gamma)),
        Measure::MiAb => match kind {
            StateKind::Ghz => Some(bipartite_mi_closed(kind, gamma, terms)?),
            StateKind::W => {
                if gamma >= SWEEP_W_CLOSED_MIN_GAMMA {
                    Some(bipartite_mi_closed(kind, gamma, terms)?)
                } else {
                    None
                }
            }
        },
        Measure::MiAbc => match kind {
            StateKind::Ghz => Some(tripartite_mi_closed(kind, gamma, terms)?),
            StateKind::W => {
                if gamma >= SWEEP_W_CLOSED_MIN_GAMMA {
                    Some(tripartite_mi_closed(kind, gamma, terms)?)
                } else {
                    None
                }
            }
        },
        Measure::Negativity => match kind {
            StateKind::Ghz => None,
            StateKind::W => {
                if gamma > 0.0 {
                    Some(negativity_w_closed(gamma, terms)?)
                } else {
                    None
                }
            }
        },
    })
}

/// All requested measures of one state at one rate. The thermalized system
/// is built once and shared across the measures.
fn evaluate_point(
    kind: StateKind,
    gamma: f64,
    measures: &[Measure],
    truncation: TruncationChoice,
    tail_tol: f64,
    closed_form: ClosedFormMode,
) -> Result<Vec<MeasureRecord>> {
    let params = truncation.params(gamma, tail_tol)?;
    let needs_state = measures.iter().any(|m| *m != Measure::Fidelity);
    let sys = if needs_state {
        Some(thermalize(kind, &params)?)
    } else {
        None
    };
    let needs_ab = measures
        .iter()
        .any(|m| matches!(m, Measure::MiAb | Measure::Negativity));
    let rho_ab = match &sys {
        Some(sys) if needs_ab => Some(sys.rho_ab()?),
        _ => None,
    };

    let mut rows = Vec::with_capacity(measures.len());
    for &measure in measures {
        let value_numeric = match measure {
            Measure::Fidelity => {
                let ks = kraus_set(&params);
                let rho0 = reduced_initial_fock(kind, params.fock_dim())?;
                entanglement_fidelity_numeric(&rho0, &ks)?
            }
            Measure::MiAb => {
                mutual_information(rho_ab.as_ref().unwrap(), &[MODE_A], &[MODE_B])?
            }
            Measure::MiAbc => tripartite_mi_numeric(sys.as_ref().unwrap())?,
            Measure::Negativity => negativity(rho_ab.as_ref().unwrap(), MODE_A)?,
        };
        let value_closed = if closed_form == ClosedFormMode::NumericOnly {
            None
        } else {
            closed_value(kind, measure, gamma, &params)?
        };
        if closed_form == ClosedFormMode::PaperOnly && value_closed.is_none() {
            continue;
        }
        rows.push(MeasureRecord::new(
            gamma,
            kind,
            measure,
            value_numeric,
            value_closed,
            &params,
        ));
    }
    Ok(rows)
}

fn sweep_tasks(cfg: &SweepConfig) -> (Vec<(f64, StateKind)>, Vec<Measure>) {
    let kinds = cfg.normalized_kinds();
    let measures = cfg.normalized_measures();
    let grid = gamma_grid(cfg.gamma_min, cfg.gamma_max, cfg.gamma_step);
    let mut tasks = Vec::with_capacity(grid.len() * kinds.len());
    for &gamma in &grid {
        for &kind in &kinds {
            tasks.push((gamma, kind));
        }
    }
    (tasks, measures)
}

fn sort_rows(rows: &mut [MeasureRecord]) {
    rows.sort_by(|a, b| {
        a.gamma
            .total_cmp(&b.gamma)
            .then_with(|| a.kind.name().cmp(b.kind.name()))
            .then_with(|| a.measure.name().cmp(b.measure.name()))
    });
}

/// Run the sweep on the rayon pool. Task order is preserved through the
/// parallel map, so output is identical to `run_sweep_serial`.
#[cfg(feature = "parallel")]
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<MeasureRecord>> {
    use rayon::prelude::*;

    cfg.validate()?;
    let (tasks, measures) = sweep_tasks(cfg);
    let nested: Vec<Vec<MeasureRecord>> = tasks
        .par_iter()
        .map(|&(gamma, kind)| {
            evaluate_point(kind, gamma, &measures, cfg.truncation, cfg.tail_tol, cfg.closed_form)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<MeasureRecord> = nested.into_iter().flatten().collect();
    sort_rows(&mut rows);
    Ok(rows)
}

/// Without the thread pool the sweep *is* the serial loop.
#[cfg(not(feature = "parallel"))]
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<MeasureRecord>> {
    run_sweep_serial(cfg)
}

/// Single-threaded sweep; the reference implementation the parallel path
/// must reproduce bit for bit.
pub fn run_sweep_serial(cfg: &SweepConfig) -> Result<Vec<MeasureRecord>> {
    cfg.validate()?;
    let (tasks, measures) = sweep_tasks(cfg);
    let mut rows = Vec::new();
    for (gamma, kind) in tasks {
        rows.extend(evaluate_point(
            kind,
            gamma,
            &measures,
            cfg.truncation,
            cfg.tail_tol,
            cfg.closed_form,
        )?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// 12 significant digits, fixed point down to 1e-4 and scientific below,
/// zero as a bare "0". Total and deterministic in the input bits.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        format!("{:.*}", (11 - exp).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

/// CSV column order; fixed, with the header always present.
pub const CSV_HEADER: &str =
    "gamma,kind,measure,value_numeric,value_closed,abs_diff,truncation,tail_bound";

/// Render rows as CSV. Optional fields render as empty cells.
pub fn emit_csv(rows: &[MeasureRecord]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let opt = |v: Option<f64>| v.map(fmt_sig12).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_sig12(r.gamma),
            r.kind.name(),
            r.measure.name(),
            fmt_sig12(r.value_numeric),
            opt(r.value_closed),
            opt(r.abs_diff),
            r.truncation,
            fmt_sig12(r.tail_bound),
        ));
    }
    out
}

/// Render rows as a JSON array of objects mirroring the CSV columns.
pub fn emit_json(rows: &[MeasureRecord]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)
        .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// The vanishing point of the W-state negativity, next to the two reference
/// values a reader will want to compare against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    /// Bisection result on the numeric negativity.
    pub gamma_star: f64,
    /// The 0.783 figure quoted next to the printed spectra.
    pub quoted: f64,
    /// arcsinh(1) = ln(1 + sqrt 2), where the printed spectral pairs stop
    /// going negative.
    pub closed_form: f64,
}

/// Locate the W-state threshold and package it with the reference values.
pub fn find_threshold(kind: StateKind, tail_tol: f64) -> Result<ThresholdReport> {
    let gamma_star = negativity_threshold(kind, tail_tol)?;
    Ok(ThresholdReport {
        gamma_star,
        quoted: QUOTED_THRESHOLD,
        closed_form: closed_form_threshold(),
    })
}

impl fmt::Display for ThresholdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "W-state negativity threshold")?;
        writeln!(f, "  numeric bisection  gamma* = {:.6}", self.gamma_star)?;
        writeln!(f, "  quoted value       {:.6}", self.quoted)?;
        writeln!(f, "  arcsinh(1)         {:.6}", self.closed_form)?;
        writeln!(
            f,
            "  gamma* - quoted       = {:+.6}",
            self.gamma_star - self.quoted
        )?;
        writeln!(
            f,
            "  gamma* - arcsinh(1)   = {:+.2e}",
            self.gamma_star - self.closed_form
        )?;
        write!(
            f,
            "  quoted - arcsinh(1)   = {:+.6}",
            self.quoted - self.closed_form
        )
    }
}

/// Residual budget for the three construction routes and for the Choi
/// spectrum in `verify_channel`.
pub const ROUTE_RESIDUAL_TOL: f64 = 1e-10;
pub const CHOI_EIG_TOL: f64 = -1e-10;
/// Norm loss budget for the thermalized purifications.
pub const PURITY_DEFECT_TOL: f64 = 1e-9;
/// Slack on top of the analytic tail bound when checking the measured
/// completeness defect against it.
pub const COMPLETENESS_SLACK: f64 = 1e-12;

/// Everything `verify_channel` measured, plus enough context to explain
/// the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub gamma: f64,
    pub truncation: usize,
    pub requested_auto: bool,
    pub capped: bool,
    pub tail_bound: f64,
    /// Trace-preservation defect on the vacuum column, to be compared
    /// against `tail_bound` + slack.
    pub vacuum_defect: f64,
    /// Largest per-column defect across the whole truncated basis. Grows
    /// toward 1 at the edge columns by construction; reported, not gated.
    pub worst_column_defect: f64,
    /// Smallest eigenvalue of the Choi matrix; complete positivity wants
    /// this to be nonnegative up to roundoff.
    pub choi_min_eig: f64,
    /// Per state: largest pairwise max-norm distance between the three
    /// routes to the evolved two-party state (purified reduction, Kraus
    /// application, direct assembly).
    pub route_residuals: Vec<(StateKind, f64)>,
    /// Per state: entropy carried by the norm the truncated purification
    /// lost.
    pub purity_defects: Vec<(StateKind, f64)>,
}

impl VerificationReport {
    /// Hard failures: checks the truncated model must pass at the chosen
    /// cutoff. A purity defect over budget is downgraded to a warning when
    /// the cutoff selection was automatic and hit the cap, because then the
    /// cutoff is known to be too small for the requested tolerance and the
    /// defect says nothing new.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.vacuum_defect > self.tail_bound + COMPLETENESS_SLACK {
            out.push(format!(
                "vacuum completeness defect {:.3e} exceeds tail bound {:.3e}",
                self.vacuum_defect, self.tail_bound
            ));
        }
        if self.choi_min_eig < CHOI_EIG_TOL {
            out.push(format!(
                "Choi matrix has eigenvalue {:.3e} below {CHOI_EIG_TOL:.0e}",
                self.choi_min_eig
            ));
        }
        for &(kind, r) in &self.route_residuals {
            if r > ROUTE_RESIDUAL_TOL {
                out.push(format!(
                    "{kind}: construction routes disagree by {r:.3e} (budget {ROUTE_RESIDUAL_TOL:.0e})"
                ));
            }
        }
        if !(self.requested_auto && self.capped) {
            for &(kind, d) in &self.purity_defects {
                if d > PURITY_DEFECT_TOL {
                    out.push(format!(
                        "{kind}: purification lost {d:.3e} bits of norm entropy (budget {PURITY_DEFECT_TOL:.0e})"
                    ));
                }
            }
        }
        out
    }

    /// Soft notices worth printing even on success.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.capped {
            out.push(format!(
                "cutoff capped at {}: the tail bound {:.3e} exceeds the requested tolerance",
                self.truncation, self.tail_bound
            ));
        }
        if self.requested_auto && self.capped {
            for &(kind, d) in &self.purity_defects {
                if d > PURITY_DEFECT_TOL {
                    out.push(format!(
                        "{kind}: purity defect {d:.3e} over budget, expected at the capped cutoff"
                    ));
                }
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "channel verification at gamma = {} (cutoff {}{}, tail bound {:.3e})",
            self.gamma,
            self.truncation,
            if self.capped { ", capped" } else { "" },
            self.tail_bound
        )?;
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "  [{}] vacuum completeness defect {:.3e} (bound {:.3e})",
            verdict(self.vacuum_defect <= self.tail_bound + COMPLETENESS_SLACK),
            self.vacuum_defect,
            self.tail_bound
        )?;
        writeln!(
            f,
            "  [info] worst column defect {:.3e} (edge columns lose their support by construction)",
            self.worst_column_defect
        )?;
        writeln!(
            f,
            "  [{}] Choi minimum eigenvalue {:.3e}",
            verdict(self.choi_min_eig >= CHOI_EIG_TOL),
            self.choi_min_eig
        )?;
        for &(kind, r) in &self.route_residuals {
            writeln!(
                f,
                "  [{}] {kind}: route residual {r:.3e}",
                verdict(r <= ROUTE_RESIDUAL_TOL)
            )?;
        }
        for &(kind, d) in &self.purity_defects {
            let ok = d <= PURITY_DEFECT_TOL || (self.requested_auto && self.capped);
            let tag = if d <= PURITY_DEFECT_TOL {
                "PASS"
            } else if ok {
                "WARN"
            } else {
                "FAIL"
            };
            writeln!(f, "  [{tag}] {kind}: purity defect {d:.3e}")?;
        }
        for w in self.warnings() {
            writeln!(f, "  note: {w}")?;
        }
        write!(
            f,
            "verdict: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Audit the truncated channel at one rate: trace preservation on the
/// vacuum column against the analytic tail bound, complete positivity via
/// the Choi spectrum, agreement of the three routes to the evolved
/// two-party state, and the norm kept by the truncated purifications.
pub fn verify_channel(
    gamma: f64,
    truncation: TruncationChoice,
    tail_tol: f64,
) -> Result<VerificationReport> {
    let params = truncation.params(gamma, tail_tol)?;
    let ks = kraus_set(&params);
    let choi_min_eig = choi_min_eigenvalue(&ks)?;

    let mut route_residuals = Vec::new();
    let mut purity_defects = Vec::new();
    for kind in StateKind::ALL {
        let sys = thermalize(kind, &params)?;
        let purified = sys.rho_ab()?;
        let assembled = final_rho_ab_closed(kind, &params)?;
        let evolved = apply_channel(
            &reduced_initial_fock(kind, params.fock_dim())?,
            &ks,
            MODE_B,
        )?;
        let r = purified
            .max_abs_diff(&assembled)?
            .max(purified.max_abs_diff(&evolved)?)
            .max(assembled.max_abs_diff(&evolved)?);
        route_residuals.push((kind, r));
        purity_defects.push((kind, sys.purity_defect()));
    }

    Ok(VerificationReport {
        gamma,
        truncation: params.truncation(),
        requested_auto: truncation == TruncationChoice::Auto,
        capped: params.capped(),
        tail_bound: params.tail_bound(),
        vacuum_defect: ks.completeness_defect(),
        worst_column_defect: ks.worst_column_defect(),
        choi_min_eig,
        route_residuals,
        purity_defects,
    })
}
