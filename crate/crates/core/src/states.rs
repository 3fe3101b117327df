//! Tripartite GHZ/W states, their reductions, and the thermalized finals.
//!
//! Alice and Charlie hold qubits that never feel the horizon. Bob's qubit
//! rides the field mode: under expansion |0>_B becomes the two-mode squeezed
//! vacuum and |1>_B the squeezed one-particle state, each entangling Bob's
//! visible region-I mode with a hidden region-II partner. The hidden mode is
//! traced out immediately (Bob only ever occupies one region), leaving a
//! mixed state on A (x) B_I (x) C.
//!
//! The same final two-party state rho'_AB is produced by three routes that
//! must agree elementwise:
//!   1. purify, then trace (this module's `thermalize`),
//!   2. the direct series construction (`final_rho_ab_closed`),
//!   3. the operator-sum channel applied to the initial reduction
//!      (`channel::apply_channel` on `reduced_initial_fock`).
//! Keeping the full purification around means every marginal (A, B, C, AB,
//! AC, BC, ABC) is cut from one object, so no pair of marginals can disagree
//! about the truncation.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channel::{squeezed_one, squeezed_vacuum, ChannelParams};
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, ModeLayout, MultiModeKet};

/// Mode indices inside the purified four-mode layout (2, N+1, N+1, 2).
pub const MODE_A: usize = 0;
pub const MODE_B: usize = 1;
pub const MODE_B_HIDDEN: usize = 2;
pub const MODE_C: usize = 3;

/// Which maximally entangled three-qubit class the observers start from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Ghz,
    W,
}

impl StateKind {
    pub const ALL: [StateKind; 2] = [StateKind::Ghz, StateKind::W];

    pub fn name(self) -> &'static str {
        match self {
            StateKind::Ghz => "ghz",
            StateKind::W => "w",
        }
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(StateKind::Ghz),
            "w" => Ok(StateKind::W),
            other => Err(Error::InvalidArgument(format!(
                "unknown state kind '{other}' (expected ghz or w)"
            ))),
        }
    }
}

/// (|000> + |111>) / sqrt(2) on three qubits.
pub fn ghz_ket() -> MultiModeKet {
    let layout = ModeLayout::new(&[2, 2, 2]).expect("static layout");
    let mut amps = vec![0.0; 8];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    amps[0b000] = s;
    amps[0b111] = s;
    MultiModeKet::from_amplitudes(layout, amps).expect("static amplitudes")
}

/// (|100> + |010> + |001>) / sqrt(3) on three qubits.
pub fn w_ket() -> MultiModeKet {
    let layout = ModeLayout::new(&[2, 2, 2]).expect("static layout");
    let mut amps = vec![0.0; 8];
    let s = 1.0 / 3.0f64.sqrt();
    amps[0b100] = s;
    amps[0b010] = s;
    amps[0b001] = s;
    MultiModeKet::from_amplitudes(layout, amps).expect("static amplitudes")
}

fn initial_ket(kind: StateKind) -> MultiModeKet {
    match kind {
        StateKind::Ghz => ghz_ket(),
        StateKind::W => w_ket(),
    }
}

/// Initial two-qubit reduction after tracing Charlie:
/// GHZ -> (|00><00| + |11><11|) / 2,
/// W   -> (|10><10| + |10><01| + |01><10| + |01><01| + |00><00|) / 3.
pub fn reduced_initial(kind: StateKind) -> DensityOperator {
    initial_ket(kind)
        .reduced_density(&[0, 1])
        .expect("three-qubit ket reduces on [0, 1]")
}

/// The same reduction with Bob's qubit embedded into the bottom of a Fock
/// space of the given dimension, ready to feed through the channel.
pub fn reduced_initial_fock(kind: StateKind, fock_dim: usize) -> Result<DensityOperator> {
    if fock_dim < 2 {
        return Err(Error::InvalidArgument(
            "embedding a qubit needs Fock dimension at least 2".into(),
        ));
    }
    let small = reduced_initial(kind);
    let layout = ModeLayout::new(&[2, fock_dim])?;
    let side = 2 * fock_dim;
    let mut mat = DMatrix::zeros(side, side);
    for a_r in 0..2 {
        for b_r in 0..2 {
            for a_c in 0..2 {
                for b_c in 0..2 {
                    mat[(a_r * fock_dim + b_r, a_c * fock_dim + b_c)] =
                        small.matrix()[(a_r * 2 + b_r, a_c * 2 + b_c)];
                }
            }
        }
    }
    DensityOperator::from_matrix(layout, mat)
}

/// The purified four-mode state and its three-party reduction.
#[derive(Debug, Clone)]
pub struct ThermalizedSystem {
    kind: StateKind,
    params: ChannelParams,
    total_pure: MultiModeKet,
    rho_abc: DensityOperator,
}

impl ThermalizedSystem {
    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    /// The full purification over A (x) B_I (x) B_II (x) C.
    pub fn total_pure(&self) -> &MultiModeKet {
        &self.total_pure
    }

    /// Three-party state with the hidden mode traced out.
    pub fn rho_abc(&self) -> &DensityOperator {
        &self.rho_abc
    }

    /// Any marginal of the purification; indices refer to the four-mode
    /// layout (`MODE_A` .. `MODE_C`). The hidden mode is traced whenever it
    /// is not explicitly kept.
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityOperator> {
        self.total_pure.reduced_density(keep)
    }

    /// Final two-party state rho'_AB.
    pub fn rho_ab(&self) -> Result<DensityOperator> {
        self.marginal(&[MODE_A, MODE_B])
    }

    /// Entropy (bits) of the total state. |psi><psi| has the single nonzero
    /// eigenvalue |psi|^2, so this is -nu log2 nu with nu the squared norm;
    /// it vanishes up to the truncated tail.
    pub fn purity_defect(&self) -> f64 {
        let nu = self.total_pure.norm_sq();
        if nu <= 0.0 {
            return 0.0;
        }
        (-nu * nu.log2()).max(0.0)
    }
}

/// Substitute Bob's |0> and |1> with the squeezed expansions inside the
/// chosen tripartite ket and trace nothing yet: the result is the pure
/// four-mode state. The three-party reduction (hidden mode traced) is built
/// alongside.
pub fn thermalize(kind: StateKind, params: &ChannelParams) -> Result<ThermalizedSystem> {
    let f = params.fock_dim();
    let sv = squeezed_vacuum(params);
    let so = squeezed_one(params);
    let layout = ModeLayout::new(&[2, f, f, 2])?;
    let mut amps = vec![0.0; layout.total_dim()];

    // scatter coef * |a>_A (x) w (x) |c>_C into the four-mode amplitude vector
    let mut add_branch = |a: usize, two_mode: &MultiModeKet, c: usize, coef: f64| {
        for (flat, &v) in two_mode.amplitudes().iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let (i, j) = (flat / f, flat % f);
            amps[((a * f + i) * f + j) * 2 + c] += coef * v;
        }
    };
    match kind {
        StateKind::Ghz => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            add_branch(0, &sv, 0, s);
            add_branch(1, &so, 1, s);
        }
        StateKind::W => {
            let s = 1.0 / 3.0f64.sqrt();
            add_branch(1, &sv, 0, s);
            add_branch(0, &so, 0, s);
            add_branch(0, &sv, 1, s);
        }
    }

    let total_pure = MultiModeKet::from_amplitudes(layout, amps)?;
    let rho_abc = total_pure.reduced_density(&[MODE_A, MODE_B, MODE_C])?;
    Ok(ThermalizedSystem { kind, params: *params, total_pure, rho_abc })
}

/// Direct term-by-term construction of the final rho'_AB on (2, N+1),
/// truncated exactly where the purification route truncates:
///
/// GHZ: 1/(2 cosh^2) sum_n tanh^2n [ |0n><0n|
///        + (n+1)/cosh^2 |1 n+1><1 n+1| ]
/// W:   1/(3 cosh^2) sum_n tanh^2n [ |1n><1n| + |0n><0n|
///        + (n+1)/cosh^2 |0 n+1><0 n+1|
///        + sqrt(n+1)/cosh ( |1n><0 n+1| + |0 n+1><1n| ) ]
///
/// Terms that would reference |n+1> beyond the cutoff are dropped, which is
/// precisely what tracing the truncated purification does.
pub fn final_rho_ab_closed(kind: StateKind, params: &ChannelParams) -> Result<DensityOperator> {
    let f = params.fock_dim();
    let c = params.gamma().cosh();
    let (c2, t2) = (c * c, params.gamma().tanh().powi(2));
    let layout = ModeLayout::new(&[2, f])?;
    let mut mat = DMatrix::zeros(2 * f, 2 * f);
    let idx = |a: usize, n: usize| a * f + n;

    match kind {
        StateKind::Ghz => {
            let mut w = 1.0 / (2.0 * c2);
            for n in 0..f {
                mat[(idx(0, n), idx(0, n))] += w;
                if n + 1 < f {
                    mat[(idx(1, n + 1), idx(1, n + 1))] += w * (n + 1) as f64 / c2;
                }
                w *= t2;
            }
        }
        StateKind::W => {
            let mut w = 1.0 / (3.0 * c2);
            for n in 0..f {
                mat[(idx(1, n), idx(1, n))] += w;
                mat[(idx(0, n), idx(0, n))] += w;
                if n + 1 < f {
                    mat[(idx(0, n + 1), idx(0, n + 1))] += w * (n + 1) as f64 / c2;
                    let cross = w * ((n + 1) as f64).sqrt() / c;
                    mat[(idx(1, n), idx(0, n + 1))] += cross;
                    mat[(idx(0, n + 1), idx(1, n))] += cross;
                }
                w *= t2;
            }
        }
    }
    DensityOperator::from_matrix(layout, mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_channel, kraus_set};

    const TOL: f64 = 1e-14;

    #[test]
    fn ghz_amplitudes() {
        let k = ghz_ket();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(k.amplitude(&[0, 0, 0]).unwrap(), s);
        assert_eq!(k.amplitude(&[1, 1, 1]).unwrap(), s);
        let zeros = k.amplitudes().iter().filter(|&&a| a == 0.0).count();
        assert_eq!(zeros, 6);
        assert!((k.norm_sq() - 1.0).abs() < TOL);
    }

    #[test]
    fn w_amplitudes_and_reduction() {
        let k = w_ket();
        let s = 1.0 / 3.0f64.sqrt();
        assert_eq!(k.amplitude(&[1, 0, 0]).unwrap(), s);
        assert_eq!(k.amplitude(&[0, 1, 0]).unwrap(), s);
        assert_eq!(k.amplitude(&[0, 0, 1]).unwrap(), s);
        assert_eq!(k.amplitude(&[0, 0, 0]).unwrap(), 0.0);

        let rho = reduced_initial(StateKind::W);
        let third = 1.0 / 3.0;
        // basis order on (2,2): 00, 01, 10, 11
        assert!((rho.matrix()[(2, 2)] - third).abs() < TOL); // |10><10|
        assert!((rho.matrix()[(2, 1)] - third).abs() < TOL); // |10><01|
        assert!((rho.matrix()[(1, 2)] - third).abs() < TOL);
        assert!((rho.matrix()[(1, 1)] - third).abs() < TOL); // |01><01|
        assert!((rho.matrix()[(0, 0)] - third).abs() < TOL); // |00><00|
        assert!((rho.trace() - 1.0).abs() < TOL);
    }

    #[test]
    fn ghz_reduction_is_the_even_mixture() {
        let rho = reduced_initial(StateKind::Ghz);
        assert!((rho.matrix()[(0, 0)] - 0.5).abs() < TOL);
        assert!((rho.matrix()[(3, 3)] - 0.5).abs() < TOL);
        assert!(rho.matrix()[(0, 3)].abs() < TOL);
        assert!((rho.trace() - 1.0).abs() < TOL);
    }

    #[test]
    fn zero_rate_thermalization_is_the_original_state() {
        let params = ChannelParams::auto(0.0, 1e-12).unwrap();
        for kind in StateKind::ALL {
            let sys = thermalize(kind, &params).unwrap();
            // at gamma = 0 the auto truncation is 1, so B_I is itself a qubit
            let expect = initial_ket(kind).density();
            assert!(sys.rho_abc().max_abs_diff(&expect).unwrap() < TOL);
            assert!(sys.purity_defect() < 1e-12);
        }
    }

    #[test]
    fn closed_series_entries_at_half_rate() {
        let params = ChannelParams::new(0.5, 17, 1e-12).unwrap();
        let rho = final_rho_ab_closed(StateKind::Ghz, &params).unwrap();
        let f = params.fock_dim();
        // |0 1><0 1| entry: tanh^2 / (2 cosh^2)
        assert!((rho.matrix()[(1, 1)] - 0.083_973_848_139_340_376).abs() < TOL);
        // |1 1><1 1| entry: (1/cosh^2) / (2 cosh^2)
        let c2 = 0.5f64.cosh().powi(2);
        assert!((rho.matrix()[(f + 1, f + 1)] - 1.0 / (2.0 * c2 * c2)).abs() < TOL);
    }

    #[test]
    fn closed_series_at_zero_rate() {
        let params = ChannelParams::new(0.0, 6, 1e-12).unwrap();
        let rho = final_rho_ab_closed(StateKind::Ghz, &params).unwrap();
        let f = params.fock_dim();
        assert!((rho.matrix()[(0, 0)] - 0.5).abs() < TOL);
        assert!((rho.matrix()[(f + 1, f + 1)] - 0.5).abs() < TOL);
        assert!((rho.trace() - 1.0).abs() < TOL);
    }

    #[test]
    fn three_routes_agree() {
        let params = ChannelParams::auto(0.5, 1e-12).unwrap();
        for kind in StateKind::ALL {
            let sys = thermalize(kind, &params).unwrap();
            let traced = sys.rho_ab().unwrap();
            let closed = final_rho_ab_closed(kind, &params).unwrap();
            let ks = kraus_set(&params);
            let pushed = apply_channel(
                &reduced_initial_fock(kind, params.fock_dim()).unwrap(),
                &ks,
                1,
            )
            .unwrap();
            assert!(traced.max_abs_diff(&closed).unwrap() < 1e-10, "{kind}");
            assert!(closed.max_abs_diff(&pushed).unwrap() < 1e-10, "{kind}");
        }
    }

    #[test]
    fn alice_and_charlie_marginals_match_for_ghz() {
        let params = ChannelParams::auto(0.7, 1e-12).unwrap();
        let sys = thermalize(StateKind::Ghz, &params).unwrap();
        let a = sys.marginal(&[MODE_A]).unwrap();
        let c = sys.marginal(&[MODE_C]).unwrap();
        assert!(a.max_abs_diff(&c).unwrap() < 1e-12);
    }

    #[test]
    fn state_kind_round_trips() {
        for kind in StateKind::ALL {
            assert_eq!(kind.name().parse::<StateKind>().unwrap(), kind);
        }
        assert!("GHZ".parse::<StateKind>().is_ok());
        assert!("bell".parse::<StateKind>().is_err());
        assert_eq!(serde_json::to_string(&StateKind::Ghz).unwrap(), "\"ghz\"");
    }
}
