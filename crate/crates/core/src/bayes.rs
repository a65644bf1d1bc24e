//! Serve-conditioned win probabilities and four-level point labels.
//!
//! Each observation unit (point, game or set) has a server and a winner. Both
//! players are counted from their own perspective, so every unit contributes
//! one "serving" observation and one "receiving" observation. Under that
//! pooling `P(serve) = 1/2` is constant and Bayes' rule
//! `P(W|B) = P(B|W)·P(W)/P(B)` reduces to wins-while-serving over serves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{MatchTimeline, Player};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Point,
    Game,
    Set,
}

/// One (server, winner) observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServeOutcome {
    pub server: Player,
    pub winner: Player,
}

/// Raw counts behind the posteriors. Indexed by [`Player::index`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServeCounts {
    pub serves: [u64; 2],
    pub wins_on_serve: [u64; 2],
    /// units won by each player regardless of server
    pub wins: [u64; 2],
}

impl ServeCounts {
    pub fn observe(&mut self, o: ServeOutcome) {
        self.serves[o.server.index()] += 1;
        self.wins[o.winner.index()] += 1;
        if o.server == o.winner {
            self.wins_on_serve[o.server.index()] += 1;
        }
    }

    /// Order-independent merge of partial counts.
    pub fn merge(mut self, other: ServeCounts) -> ServeCounts {
        for p in 0..2 {
            self.serves[p] += other.serves[p];
            self.wins_on_serve[p] += other.wins_on_serve[p];
            self.wins[p] += other.wins[p];
        }
        self
    }

    pub fn units(&self) -> u64 {
        self.serves[0] + self.serves[1]
    }

    pub fn pooled_wins_on_serve(&self) -> u64 {
        self.wins_on_serve[0] + self.wins_on_serve[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServeWinStats<F> {
    pub p_win_given_serve: F,
    pub p_lose_given_serve: F,
    /// per player `P(player wins | player serves)`
    pub per_player: [F; 2],
    pub counts: ServeCounts,
    pub unit: Unit,
    pub smoothed: bool,
}

/// Serve outcomes of one timeline at the requested granularity.
///
/// A game's server is the server of its first point, its winner the victor of
/// its last point; sets likewise.
pub fn serve_outcomes(timeline: &MatchTimeline, unit: Unit) -> Vec<ServeOutcome> {
    let recs = &timeline.records;
    match unit {
        Unit::Point => recs
            .iter()
            .map(|r| ServeOutcome { server: r.server, winner: r.point_victor })
            .collect(),
        Unit::Game | Unit::Set => {
            let mut out = Vec::new();
            let mut start = 0;
            for i in 0..recs.len() {
                let ends = match unit {
                    Unit::Game => timeline.ends_game(i),
                    _ => timeline.ends_set(i),
                };
                if ends {
                    out.push(ServeOutcome { server: recs[start].server, winner: recs[i].point_victor });
                    start = i + 1;
                }
            }
            out
        }
    }
}

pub fn count_serves(timelines: &[MatchTimeline], unit: Unit) -> ServeCounts {
    timelines
        .iter()
        .map(|t| {
            serve_outcomes(t, unit).into_iter().fold(ServeCounts::default(), |mut c, o| {
                c.observe(o);
                c
            })
        })
        .fold(ServeCounts::default(), ServeCounts::merge)
}

fn ratio<F: Scalar>(num: u64, den: u64, smooth: bool) -> F {
    if smooth {
        F::lit((num + 1) as f64) / F::lit((den + 2) as f64)
    } else {
        F::lit(num as f64) / F::lit(den as f64)
    }
}

/// Pooled `P(win | serve)` from raw counts; add-one smoothing when `smooth`.
pub fn posterior_from_counts<F: Scalar>(counts: ServeCounts, unit: Unit, smooth: bool) -> Result<ServeWinStats<F>> {
    if counts.units() == 0 {
        return Err(Error::InsufficientData(format!("no {unit:?} with an identified server")));
    }
    let p_win: F = ratio(counts.pooled_wins_on_serve(), counts.units(), smooth);
    let per_player = [0, 1].map(|p| {
        if counts.serves[p] == 0 && !smooth {
            F::nan()
        } else {
            ratio(counts.wins_on_serve[p], counts.serves[p], smooth)
        }
    });
    Ok(ServeWinStats {
        p_win_given_serve: p_win,
        p_lose_given_serve: F::one() - p_win,
        per_player,
        counts,
        unit,
        smoothed: smooth,
    })
}

pub fn estimate_serve_win_posterior<F: Scalar>(
    timelines: &[MatchTimeline],
    unit: Unit,
    smooth: bool,
) -> Result<ServeWinStats<F>> {
    posterior_from_counts(count_serves(timelines, unit), unit, smooth)
}

/// The same posterior evaluated through Bayes' rule on the pooled
/// player-perspective events: B = "this player serves", W = "this player wins".
pub fn posterior_via_bayes_rule<F: Scalar>(counts: ServeCounts) -> Result<F> {
    let units = counts.units();
    if units == 0 {
        return Err(Error::InsufficientData("no units".into()));
    }
    let perspectives = F::lit((2 * units) as f64);
    // every unit has exactly one server and one winner
    let p_b = F::lit(units as f64) / perspectives;
    let p_w = F::lit((counts.wins[0] + counts.wins[1]) as f64) / perspectives;
    let won = counts.wins[0] + counts.wins[1];
    let p_b_given_w = F::lit(counts.pooled_wins_on_serve() as f64) / F::lit(won as f64);
    Ok(p_b_given_w * p_w / p_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    /// player two wins on own serve
    L0,
    /// player two wins against serve
    LLose,
    /// player one wins against serve
    LWin,
    /// player one wins on own serve
    L1,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::L0, Level::LLose, Level::LWin, Level::L1];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Level> {
        Self::ALL.get(i).copied()
    }

    pub fn for_point(victor: Player, server: Player) -> Level {
        match (victor, server) {
            (Player::One, Player::One) => Level::L1,
            (Player::One, Player::Two) => Level::LWin,
            (Player::Two, Player::One) => Level::LLose,
            (Player::Two, Player::Two) => Level::L0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassLabel {
    pub level: Level,
    pub value: f64,
}

/// Numeric values of the four levels: `0 < p_lose < p_win < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelScale {
    pub p_lose: f64,
    pub p_win: f64,
}

impl LabelScale {
    pub fn new(p_lose: f64, p_win: f64) -> Result<Self> {
        if !(0.0 < p_lose && p_lose < p_win && p_win < 1.0) {
            return Err(Error::UnorderedLevels { p_lose, p_win });
        }
        Ok(Self { p_lose, p_win })
    }

    pub fn from_stats<F: Scalar>(stats: &ServeWinStats<F>) -> Result<Self> {
        Self::new(stats.p_lose_given_serve.as_f64(), stats.p_win_given_serve.as_f64())
    }

    pub fn value(&self, level: Level) -> f64 {
        match level {
            Level::L0 => 0.0,
            Level::LLose => self.p_lose,
            Level::LWin => self.p_win,
            Level::L1 => 1.0,
        }
    }

    pub fn label(&self, level: Level) -> ClassLabel {
        ClassLabel { level, value: self.value(level) }
    }

    pub fn classes(&self) -> Vec<ClassLabel> {
        Level::ALL.iter().map(|&l| self.label(l)).collect()
    }
}

pub fn label_points(timeline: &MatchTimeline, scale: &LabelScale) -> Vec<ClassLabel> {
    timeline
        .records
        .iter()
        .map(|r| scale.label(Level::for_point(r.point_victor, r.server)))
        .collect()
}
