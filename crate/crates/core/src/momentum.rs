//! Per-point momentum from a short (3-point) and a long (7-point) centred
//! window of point results, each boosted by an exponential streak bonus.
//!
//! For player X at point n, with r = +½ for a won point and −½ for a lost one:
//!
//! ```text
//! M(n) = (Σ_{n−1..n+1} r + ±α·e^{2k}) / |window| + ½
//! N(n) = (Σ_{n−3..n+3} r + ±β·e^{k})  / |window| + ½
//! P(n) = clamp(w₁·M(n) + w₂·N(n), 0, 1)
//! ```
//!
//! `k` is the trailing run of the point-n victor. The bonus is positive for
//! the run holder and negative for the opponent, and only applies once
//! `k ≥ streak_min`. Windows are truncated at the match edges and divided by
//! the number of points actually inside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{MatchTimeline, Player};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MomentumParams {
    pub w1: f64,
    pub w2: f64,
    /// short-window growth factor of the run holder; the opponent uses −alpha1
    pub alpha1: f64,
    /// long-window growth factor of the run holder; the opponent uses −beta1
    pub beta1: f64,
    pub k_cap: u32,
    pub streak_min: u32,
    /// How many points before n the run may reach back. `None` follows the run
    /// to the start of the match (still capped at `k_cap`).
    pub streak_lookback: Option<usize>,
    /// Use past-only windows `[n−2h, n]` instead of centred ones.
    pub causal: bool,
}

impl Default for MomentumParams {
    fn default() -> Self {
        Self {
            w1: 0.7,
            w2: 0.3,
            alpha1: 0.0012,
            beta1: 0.0025,
            k_cap: 7,
            streak_min: 2,
            streak_lookback: Some(3),
            causal: false,
        }
    }
}

impl MomentumParams {
    pub fn alpha2(&self) -> f64 {
        -self.alpha1
    }

    pub fn beta2(&self) -> f64 {
        -self.beta1
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w1 >= 0.0 && self.w2 >= 0.0) || (self.w1 + self.w2 - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("window weights must be non-negative and sum to 1, got {} + {}", self.w1, self.w2)));
        }
        if !self.alpha1.is_finite() || !self.beta1.is_finite() {
            return Err(Error::Config("growth factors must be finite".into()));
        }
        if self.streak_min == 0 {
            return Err(Error::Config("streak_min must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Window {
    /// half width 1
    Short,
    /// half width 3
    Long,
}

impl Window {
    pub fn half_width(self) -> usize {
        match self {
            Window::Short => 1,
            Window::Long => 3,
        }
    }
}

fn check_n(victors: &[Player], n: usize) -> Result<()> {
    if n == 0 || n > victors.len() {
        return Err(Error::OutOfRange { index: n, len: victors.len() });
    }
    Ok(())
}

/// `+½` when `player` won point `n` (1-based), `−½` otherwise.
pub fn point_result<F: Scalar>(victors: &[Player], n: usize, player: Player) -> Result<F> {
    check_n(victors, n)?;
    Ok(if victors[n - 1] == player { F::lit(0.5) } else { F::lit(-0.5) })
}

/// Holder and length of the run ending at point `n` (1-based).
pub fn streak_at(victors: &[Player], n: usize, params: &MomentumParams) -> Result<(Player, u32)> {
    check_n(victors, n)?;
    let holder = victors[n - 1];
    let max_back = params.streak_lookback.unwrap_or(usize::MAX).min(n - 1);
    let mut k = 1;
    while (k as usize) <= max_back && victors[n - 1 - k as usize] == holder {
        k += 1;
    }
    Ok((holder, k.min(params.k_cap)))
}

/// Streak bonus seen by `player` at point `n` for the given window.
pub fn streak_bonus<F: Scalar>(
    victors: &[Player],
    n: usize,
    player: Player,
    window: Window,
    params: &MomentumParams,
) -> Result<F> {
    let (holder, k) = streak_at(victors, n, params)?;
    if k < params.streak_min {
        return Ok(F::zero());
    }
    let (factor, growth) = match window {
        Window::Short => (params.alpha1, F::count(2 * k as usize).exp()),
        Window::Long => (params.beta1, F::count(k as usize).exp()),
    };
    let magnitude = F::lit(factor) * growth;
    Ok(if holder == player { magnitude } else { -magnitude })
}

/// `M(n)` for [`Window::Short`], `N(n)` for [`Window::Long`]; not clamped.
pub fn window_score<F: Scalar>(
    victors: &[Player],
    n: usize,
    player: Player,
    window: Window,
    params: &MomentumParams,
) -> Result<F> {
    check_n(victors, n)?;
    let h = window.half_width();
    let (lo, hi) = if params.causal {
        (n.saturating_sub(2 * h).max(1), n)
    } else {
        (n.saturating_sub(h).max(1), (n + h).min(victors.len()))
    };
    let mut sum = F::zero();
    for s in lo..=hi {
        sum = sum + point_result::<F>(victors, s, player)?;
    }
    let bonus: F = streak_bonus(victors, n, player, window, params)?;
    Ok((sum + bonus) / F::count(hi - lo + 1) + F::lit(0.5))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerMomentum<F> {
    pub momentum: Vec<F>,
    pub short: Vec<F>,
    pub long: Vec<F>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumSeries<F> {
    pub p1: PlayerMomentum<F>,
    pub p2: PlayerMomentum<F>,
    /// run length ending at each point (after lookback and cap)
    pub streak: Vec<u32>,
    pub streak_holder: Vec<Player>,
}

impl<F: Scalar> MomentumSeries<F> {
    pub fn len(&self) -> usize {
        self.streak.len()
    }

    pub fn is_empty(&self) -> bool {
        self.streak.is_empty()
    }

    pub fn player(&self, p: Player) -> &PlayerMomentum<F> {
        match p {
            Player::One => &self.p1,
            Player::Two => &self.p2,
        }
    }
}

pub fn momentum_series<F: Scalar>(victors: &[Player], params: &MomentumParams) -> Result<MomentumSeries<F>> {
    params.validate()?;
    let (w1, w2) = (F::lit(params.w1), F::lit(params.w2));
    let one_player = |p: Player| -> Result<PlayerMomentum<F>> {
        let mut out = PlayerMomentum {
            momentum: Vec::with_capacity(victors.len()),
            short: Vec::with_capacity(victors.len()),
            long: Vec::with_capacity(victors.len()),
        };
        for n in 1..=victors.len() {
            let m: F = window_score(victors, n, p, Window::Short, params)?;
            let l: F = window_score(victors, n, p, Window::Long, params)?;
            out.momentum.push((w1 * m + w2 * l).max(F::zero()).min(F::one()));
            out.short.push(m);
            out.long.push(l);
        }
        Ok(out)
    };
    let mut streak = Vec::with_capacity(victors.len());
    let mut streak_holder = Vec::with_capacity(victors.len());
    for n in 1..=victors.len() {
        let (h, k) = streak_at(victors, n, params)?;
        streak.push(k);
        streak_holder.push(h);
    }
    Ok(MomentumSeries { p1: one_player(Player::One)?, p2: one_player(Player::Two)?, streak, streak_holder })
}

pub fn timeline_momentum<F: Scalar>(timeline: &MatchTimeline, params: &MomentumParams) -> Result<MomentumSeries<F>> {
    momentum_series(&timeline.victors(), params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Peak,
    Trough,
}

/// Strict interior local extrema; plateaus are not reported.
pub fn local_extrema<F: Scalar>(series: &[F]) -> Vec<(usize, Extremum)> {
    series
        .windows(3)
        .enumerate()
        .filter_map(|(i, w)| {
            if w[1] > w[0] && w[1] > w[2] {
                Some((i + 1, Extremum::Peak))
            } else if w[1] < w[0] && w[1] < w[2] {
                Some((i + 1, Extremum::Trough))
            } else {
                None
            }
        })
        .collect()
}
