//! Point-by-point match CSV ingestion: parsing, cleaning and feature derivation.
//!
//! The expected layout is one row per point with the column names of
//! [`Column::name`]. Alternate header spellings are handled through a
//! [`ColumnMap`].
//!
//! Cleaning rules:
//! - `AD` and negative game scores become [`AD_SCORE`].
//! - Missing continuous values take the per-match column mean; missing integer
//!   and flag values take the per-match column mode.
//! - Shot letters map `F → 1`, `B → 2`, anything else `→ 0`.
//! - An invalid `point_victor` is recovered from the cumulative points-won
//!   columns when possible; an invalid `server` from the mode of its game.
//!   Rows that cannot be repaired, or that lack `match_id`/`point_no`, are
//!   rejected and listed in the report.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric stand-in for an advantage score.
pub const AD_SCORE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn from_id(id: i64) -> Option<Self> {
        match id {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }

    pub fn id(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    /// 0 for player one, 1 for player two.
    pub fn index(self) -> usize {
        self.id() as usize - 1
    }

    pub fn opponent(self) -> Self {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Kind {
    Id,
    Text,
    /// integer-valued state; mode imputation
    Int,
    /// {0,1}; mode imputation
    Flag,
    /// real-valued; mean imputation
    Continuous,
    Score,
    Shot,
    /// {1,2}; repaired specially
    PlayerId,
}

macro_rules! columns {
    ($( $variant:ident => $name:literal, $kind:ident, $required:literal; )*) => {
        /// Canonical input columns.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Column { $( $variant ),* }

        impl Column {
            pub const ALL: &'static [Column] = &[ $( Column::$variant ),* ];

            pub fn name(self) -> &'static str {
                match self { $( Column::$variant => $name ),* }
            }

            fn kind(self) -> Kind {
                match self { $( Column::$variant => Kind::$kind ),* }
            }

            pub fn is_required(self) -> bool {
                match self { $( Column::$variant => $required ),* }
            }
        }
    };
}

columns! {
    MatchId => "match_id", Id, true;
    Player1 => "player1", Text, false;
    Player2 => "player2", Text, false;
    SetNo => "set_no", Int, true;
    GameNo => "game_no", Int, true;
    PointNo => "point_no", Id, true;
    P1Sets => "p1_sets", Int, true;
    P2Sets => "p2_sets", Int, true;
    P1Games => "p1_games", Int, true;
    P2Games => "p2_games", Int, true;
    P1Score => "p1_score", Score, true;
    P2Score => "p2_score", Score, true;
    Server => "server", PlayerId, true;
    ServeNo => "serve_no", Int, true;
    PointVictor => "point_victor", PlayerId, true;
    P1PointsWon => "p1_points_won", Int, false;
    P2PointsWon => "p2_points_won", Int, false;
    P1Ace => "p1_ace", Flag, false;
    P2Ace => "p2_ace", Flag, false;
    P1DoubleFault => "p1_double_fault", Flag, false;
    P2DoubleFault => "p2_double_fault", Flag, false;
    P1UnfErr => "p1_unf_err", Flag, false;
    P2UnfErr => "p2_unf_err", Flag, false;
    P1NetPt => "p1_net_pt", Flag, false;
    P2NetPt => "p2_net_pt", Flag, false;
    P1BreakPt => "p1_break_pt", Flag, false;
    P2BreakPt => "p2_break_pt", Flag, false;
    P1BreakPtWon => "p1_break_pt_won", Flag, false;
    P2BreakPtWon => "p2_break_pt_won", Flag, false;
    P1BreakPtMissed => "p1_break_pt_missed", Flag, false;
    P2BreakPtMissed => "p2_break_pt_missed", Flag, false;
    WinnerShotType => "winner_shot_type", Shot, false;
    P1DistanceRun => "p1_distance_run", Continuous, false;
    P2DistanceRun => "p2_distance_run", Continuous, false;
    RallyCount => "rally_count", Int, false;
    SpeedMph => "speed_mph", Continuous, false;
}

impl Column {
    fn idx(self) -> usize {
        self as usize
    }

    pub fn from_name(name: &str) -> Option<Column> {
        Column::ALL.iter().copied().find(|c| c.name() == name)
    }
}

/// Maps canonical column names to the header names used by an input file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColumnMap {
    renames: BTreeMap<String, String>,
}

impl ColumnMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads `canonical` from the header named `header`.
    pub fn with(mut self, canonical: &str, header: &str) -> Result<Self> {
        if Column::from_name(canonical).is_none() {
            return Err(Error::Config(format!("unknown canonical column {canonical:?}")));
        }
        self.renames.insert(canonical.to_string(), header.to_string());
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for k in self.renames.keys() {
            if Column::from_name(k).is_none() {
                return Err(Error::Config(format!("unknown canonical column {k:?}")));
            }
        }
        Ok(())
    }

    pub fn header_for(&self, column: Column) -> &str {
        self.renames.get(column.name()).map_or(column.name(), String::as_str)
    }
}

/// One unvalidated CSV row; cells are indexed by [`Column`].
#[derive(Debug, Clone, PartialEq)]
pub struct RawPoint {
    /// 1-based line number in the source file (header is line 1).
    pub line: usize,
    cells: Vec<Option<String>>,
}

impl RawPoint {
    pub fn get(&self, column: Column) -> Option<&str> {
        self.cells[column.idx()].as_deref()
    }

    pub fn set(&mut self, column: Column, value: Option<String>) {
        self.cells[column.idx()] = value;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    /// Which canonical columns the header provided.
    present: Vec<bool>,
    pub rows: Vec<RawPoint>,
}

impl RawTable {
    pub fn has_column(&self, column: Column) -> bool {
        self.present[column.idx()]
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "N/A" | "NaN" | "nan" | "null" | "NULL" | "None")
}

/// Reads the raw table. Fails on an empty file or a missing required column.
pub fn read_raw(raw: &[u8], columns: &ColumnMap) -> Result<RawTable> {
    columns.validate()?;
    if raw.iter().all(u8::is_ascii_whitespace) {
        return Err(Error::EmptyInput);
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(raw);
    let headers = reader.headers()?.clone();
    let mut positions = vec![None; Column::ALL.len()];
    for &col in Column::ALL {
        let name = columns.header_for(col);
        positions[col.idx()] = headers.iter().position(|h| h == name);
        if col.is_required() && positions[col.idx()].is_none() {
            return Err(Error::MissingColumn(col.name().to_string()));
        }
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let cells = positions
            .iter()
            .map(|p| {
                p.and_then(|p| rec.get(p))
                    .filter(|c| !is_missing(c))
                    .map(str::to_string)
            })
            .collect();
        rows.push(RawPoint { line: i + 2, cells });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(RawTable { present: positions.iter().map(Option::is_some).collect(), rows })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerFlags {
    pub ace: bool,
    pub double_fault: bool,
    pub unforced_error: bool,
    pub net_point: bool,
    pub break_point: bool,
    pub break_point_won: bool,
    pub break_point_missed: bool,
}

/// One cleaned point. Per-player quantities are indexed by [`Player::index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub match_id: String,
    pub set_no: u32,
    pub game_no: u32,
    pub point_no: u32,
    pub server: Player,
    pub point_victor: Player,
    pub serve_no: u8,
    pub score: [f64; 2],
    pub games: [u32; 2],
    pub sets: [u32; 2],
    pub points_won: [u32; 2],
    /// 1 forehand, 2 backhand, 0 unknown / no winner.
    pub shot_type_code: u8,
    pub distance_run: [f64; 2],
    pub rally_count: u32,
    pub speed_mph: f64,
    pub flags: [PlayerFlags; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchTimeline {
    pub match_id: String,
    pub players: (String, String),
    pub records: Vec<PointRecord>,
}

impl MatchTimeline {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn victors(&self) -> Vec<Player> {
        self.records.iter().map(|r| r.point_victor).collect()
    }

    pub fn servers(&self) -> Vec<Player> {
        self.records.iter().map(|r| r.server).collect()
    }

    /// Whether point `i` (0-based) is the last point of its game.
    pub fn ends_game(&self, i: usize) -> bool {
        match self.records.get(i + 1) {
            None => true,
            Some(next) => {
                let cur = &self.records[i];
                (next.set_no, next.game_no) != (cur.set_no, cur.game_no)
            }
        }
    }

    /// Whether point `i` (0-based) is the last point of its set.
    pub fn ends_set(&self, i: usize) -> bool {
        match self.records.get(i + 1) {
            None => true,
            Some(next) => next.set_no != self.records[i].set_no,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnReport {
    /// `AD` or negative scores replaced by [`AD_SCORE`].
    pub replaced: usize,
    pub imputed_mean: usize,
    pub imputed_mode: usize,
    /// shot letters mapped to codes
    pub mapped: usize,
    /// identity/consistency repairs (victor, server, cumulative points)
    pub repaired: usize,
}

impl ColumnReport {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedRow {
    pub line: usize,
    pub match_id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub rows_in: usize,
    pub rows_out: usize,
    pub ad_replacements: usize,
    pub imputations: usize,
    pub repairs: usize,
    pub columns: BTreeMap<String, ColumnReport>,
    pub rejected: Vec<RejectedRow>,
}

impl CleaningReport {
    fn col(&mut self, c: Column) -> &mut ColumnReport {
        self.columns.entry(c.name().to_string()).or_default()
    }

    fn finish(&mut self) {
        self.columns.retain(|_, v| !v.is_empty());
        self.ad_replacements = self.columns.values().map(|c| c.replaced).sum();
        self.imputations = self.columns.values().map(|c| c.imputed_mean + c.imputed_mode).sum();
        self.repairs = self.columns.values().map(|c| c.repaired).sum();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cleaned {
    /// Ordered by match_id then point_no.
    pub records: Vec<PointRecord>,
    pub players: BTreeMap<String, (String, String)>,
    pub report: CleaningReport,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Parsed {
    Missing,
    Invalid,
    Value(f64),
}

fn parse_number(cell: Option<&str>) -> Parsed {
    match cell {
        None => Parsed::Missing,
        Some(s) => match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Parsed::Value(v),
            _ => Parsed::Invalid,
        },
    }
}

fn parse_index(cell: Option<&str>) -> Option<u32> {
    let v = cell?.parse::<f64>().ok()?;
    (v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64).then_some(v as u32)
}

fn mode(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v.round() as i64).or_default() += 1;
    }
    // highest count, ties to the smaller value
    counts
        .into_iter()
        .fold(None, |best: Option<(i64, usize)>, (v, c)| match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((v, c)),
        })
        .map(|(v, _)| v as f64)
}

/// Cleans a raw table. Rows are grouped per match and ordered by `point_no`.
pub fn clean(table: &RawTable) -> Result<Cleaned> {
    let mut report = CleaningReport { rows_in: table.rows.len(), ..Default::default() };

    let mut groups: BTreeMap<String, BTreeMap<u32, &RawPoint>> = BTreeMap::new();
    for row in &table.rows {
        let Some(match_id) = row.get(Column::MatchId) else {
            report.rejected.push(RejectedRow {
                line: row.line,
                match_id: None,
                reason: "missing match_id".into(),
            });
            continue;
        };
        let Some(point_no) = parse_index(row.get(Column::PointNo)) else {
            report.rejected.push(RejectedRow {
                line: row.line,
                match_id: Some(match_id.to_string()),
                reason: "missing or invalid point_no".into(),
            });
            continue;
        };
        let group = groups.entry(match_id.to_string()).or_default();
        if group.contains_key(&point_no) {
            report.rejected.push(RejectedRow {
                line: row.line,
                match_id: Some(match_id.to_string()),
                reason: format!("duplicate point_no {point_no}"),
            });
            continue;
        }
        group.insert(point_no, row);
    }

    let mut records = Vec::new();
    let mut players = BTreeMap::new();
    for (match_id, rows) in &groups {
        let rows: Vec<&RawPoint> = rows.values().copied().collect();
        let first_text = |c: Column| rows.iter().find_map(|r| r.get(c)).map(str::to_string);
        players.insert(
            match_id.clone(),
            (
                first_text(Column::Player1).unwrap_or_else(|| "player1".into()),
                first_text(Column::Player2).unwrap_or_else(|| "player2".into()),
            ),
        );
        records.extend(clean_match(match_id, &rows, table, &mut report)?);
    }
    report.rows_out = records.len();
    report.finish();
    Ok(Cleaned { records, players, report })
}

fn clean_match(
    match_id: &str,
    rows: &[&RawPoint],
    table: &RawTable,
    report: &mut CleaningReport,
) -> Result<Vec<PointRecord>> {
    let n = rows.len();
    // numeric matrix, NaN = needs imputation
    let mut values: HashMap<Column, Vec<f64>> = HashMap::new();
    let impossible = |c: Column| Error::ImputationImpossible {
        match_id: match_id.to_string(),
        column: c.name().to_string(),
    };

    for &col in Column::ALL {
        let kind = col.kind();
        if matches!(kind, Kind::Id | Kind::Text) {
            continue;
        }
        if !table.has_column(col) {
            continue;
        }
        let mut v = Vec::with_capacity(n);
        for row in rows {
            let cell = row.get(col);
            let x = match kind {
                Kind::Score => match cell {
                    Some(s) if s.eq_ignore_ascii_case("AD") => {
                        report.col(col).replaced += 1;
                        AD_SCORE
                    }
                    _ => match parse_number(cell) {
                        Parsed::Value(x) if x < 0.0 => {
                            report.col(col).replaced += 1;
                            AD_SCORE
                        }
                        Parsed::Value(x) => x,
                        _ => f64::NAN,
                    },
                },
                Kind::Shot => match cell {
                    Some("F") | Some("f") => {
                        report.col(col).mapped += 1;
                        1.0
                    }
                    Some("B") | Some("b") => {
                        report.col(col).mapped += 1;
                        2.0
                    }
                    Some("1") => 1.0,
                    Some("2") => 2.0,
                    Some("0") => 0.0,
                    None => 0.0,
                    Some(_) => {
                        report.col(col).mapped += 1;
                        0.0
                    }
                },
                Kind::PlayerId => match parse_number(cell) {
                    Parsed::Value(x) if x == 1.0 || x == 2.0 => x,
                    _ => f64::NAN,
                },
                Kind::Flag => match parse_number(cell) {
                    Parsed::Value(x) if x == 0.0 || x == 1.0 => x,
                    _ => f64::NAN,
                },
                Kind::Int => match parse_number(cell) {
                    Parsed::Value(x) if x >= 0.0 && x.fract() == 0.0 => x,
                    _ => f64::NAN,
                },
                Kind::Continuous => match parse_number(cell) {
                    Parsed::Value(x) if x >= 0.0 => x,
                    _ => f64::NAN,
                },
                Kind::Id | Kind::Text => unreachable!(),
            };
            v.push(x);
        }
        values.insert(col, v);
    }

    // imputation of plain numeric columns
    for &col in Column::ALL {
        let Some(v) = values.get_mut(&col) else { continue };
        let kind = col.kind();
        if kind == Kind::PlayerId || kind == Kind::Shot {
            continue;
        }
        if col == Column::P1PointsWon || col == Column::P2PointsWon {
            continue;
        }
        let missing = v.iter().filter(|x| x.is_nan()).count();
        if missing == 0 {
            continue;
        }
        if missing == v.len() {
            return Err(impossible(col));
        }
        let observed = v.iter().copied().filter(|x| !x.is_nan());
        let fill = match kind {
            Kind::Continuous | Kind::Score => {
                let (s, c) = observed.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
                report.col(col).imputed_mean += missing;
                s / c as f64
            }
            _ => {
                report.col(col).imputed_mode += missing;
                mode(observed).expect("non-empty")
            }
        };
        v.iter_mut().filter(|x| x.is_nan()).for_each(|x| *x = fill);
    }

    let get = |values: &HashMap<Column, Vec<f64>>, c: Column, i: usize| -> f64 {
        values.get(&c).map_or(0.0, |v| v[i])
    };

    // server: mode within (set_no, game_no)
    {
        let server = values.get(&Column::Server).cloned().expect("required column");
        let mut repaired = server.clone();
        let mut keep = vec![true; n];
        for i in 0..n {
            if !server[i].is_nan() {
                continue;
            }
            let key = (get(&values, Column::SetNo, i), get(&values, Column::GameNo, i));
            let m = mode((0..n).filter(|&j| {
                !server[j].is_nan()
                    && (get(&values, Column::SetNo, j), get(&values, Column::GameNo, j)) == key
            })
            .map(|j| server[j]));
            match m {
                Some(s) => {
                    repaired[i] = s;
                    report.col(Column::Server).repaired += 1;
                }
                None => keep[i] = false,
            }
        }
        values.insert(Column::Server, repaired);
        reject_rows(&mut values, rows, &keep, match_id, "server unrecoverable", report);
    }
    let live = live_rows(&values, rows.len());
    let rows: Vec<&RawPoint> = live.iter().map(|&i| rows[i]).collect();
    compact(&mut values, &live);
    let n = rows.len();

    // point_victor: recover from cumulative counters
    {
        let victor = values.get(&Column::PointVictor).cloned().expect("required column");
        let pw = [
            values.get(&Column::P1PointsWon).cloned(),
            values.get(&Column::P2PointsWon).cloned(),
        ];
        let mut repaired = victor.clone();
        let mut keep = vec![true; n];
        for i in 0..n {
            if !victor[i].is_nan() {
                continue;
            }
            let recovered = match (&pw[0], &pw[1]) {
                (Some(a), Some(b)) => {
                    let (pa, pb) = if i == 0 { (0.0, 0.0) } else { (a[i - 1], b[i - 1]) };
                    let da = a[i] - pa;
                    let db = b[i] - pb;
                    if da == 1.0 && db == 0.0 {
                        Some(1.0)
                    } else if db == 1.0 && da == 0.0 {
                        Some(2.0)
                    } else {
                        None
                    }
                }
                _ => None,
            };
            match recovered {
                Some(v) => {
                    repaired[i] = v;
                    report.col(Column::PointVictor).repaired += 1;
                }
                None => keep[i] = false,
            }
        }
        values.insert(Column::PointVictor, repaired);
        reject_rows(&mut values, &rows, &keep, match_id, "point_victor unrecoverable", report);
    }
    let live = live_rows(&values, rows.len());
    let rows: Vec<&RawPoint> = live.iter().map(|&i| rows[i]).collect();
    compact(&mut values, &live);
    let n = rows.len();

    // cumulative points won must agree with the victor sequence
    let victors: Vec<Player> = values[&Column::PointVictor]
        .iter()
        .map(|&v| Player::from_id(v as i64).expect("validated"))
        .collect();
    let mut cumulative = [vec![0u32; n], vec![0u32; n]];
    let mut acc = [0u32; 2];
    for (i, v) in victors.iter().enumerate() {
        acc[v.index()] += 1;
        cumulative[0][i] = acc[0];
        cumulative[1][i] = acc[1];
    }
    for (p, col) in [(0, Column::P1PointsWon), (1, Column::P2PointsWon)] {
        if let Some(v) = values.get(&col) {
            let bad = v
                .iter()
                .zip(&cumulative[p])
                .filter(|(&x, &c)| x.is_nan() || x != c as f64)
                .count();
            report.col(col).repaired += bad;
        }
    }

    let servers: Vec<Player> = values[&Column::Server]
        .iter()
        .map(|&v| Player::from_id(v as i64).expect("validated"))
        .collect();
    let flag = |c: Column, i: usize| get(&values, c, i) == 1.0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let point_no = parse_index(rows[i].get(Column::PointNo)).expect("validated");
        let pf = |ace, df, ue, np, bp, bpw, bpm| PlayerFlags {
            ace: flag(ace, i),
            double_fault: flag(df, i),
            unforced_error: flag(ue, i),
            net_point: flag(np, i),
            break_point: flag(bp, i),
            break_point_won: flag(bpw, i),
            break_point_missed: flag(bpm, i),
        };
        use Column as C;
        out.push(PointRecord {
            match_id: match_id.to_string(),
            set_no: get(&values, C::SetNo, i).max(1.0) as u32,
            game_no: get(&values, C::GameNo, i).max(1.0) as u32,
            point_no,
            server: servers[i],
            point_victor: victors[i],
            serve_no: get(&values, C::ServeNo, i).clamp(1.0, 2.0) as u8,
            score: [get(&values, C::P1Score, i), get(&values, C::P2Score, i)],
            games: [get(&values, C::P1Games, i) as u32, get(&values, C::P2Games, i) as u32],
            sets: [get(&values, C::P1Sets, i) as u32, get(&values, C::P2Sets, i) as u32],
            points_won: [cumulative[0][i], cumulative[1][i]],
            shot_type_code: get(&values, C::WinnerShotType, i) as u8,
            distance_run: [get(&values, C::P1DistanceRun, i), get(&values, C::P2DistanceRun, i)],
            rally_count: get(&values, C::RallyCount, i).round() as u32,
            speed_mph: get(&values, C::SpeedMph, i),
            flags: [
                pf(C::P1Ace, C::P1DoubleFault, C::P1UnfErr, C::P1NetPt, C::P1BreakPt, C::P1BreakPtWon, C::P1BreakPtMissed),
                pf(C::P2Ace, C::P2DoubleFault, C::P2UnfErr, C::P2NetPt, C::P2BreakPt, C::P2BreakPtWon, C::P2BreakPtMissed),
            ],
        });
    }
    Ok(out)
}

// Rejected rows are marked by a NaN in the synthetic `MatchId` slot.
fn reject_rows(
    values: &mut HashMap<Column, Vec<f64>>,
    rows: &[&RawPoint],
    keep: &[bool],
    match_id: &str,
    reason: &str,
    report: &mut CleaningReport,
) {
    let marks: Vec<f64> = keep.iter().map(|&k| if k { 0.0 } else { f64::NAN }).collect();
    for (row, _) in rows.iter().zip(keep).filter(|(_, &k)| !k) {
        report.rejected.push(RejectedRow {
            line: row.line,
            match_id: Some(match_id.to_string()),
            reason: reason.to_string(),
        });
    }
    values.insert(Column::MatchId, marks);
}

fn live_rows(values: &HashMap<Column, Vec<f64>>, n: usize) -> Vec<usize> {
    match values.get(&Column::MatchId) {
        Some(marks) => (0..n).filter(|&i| !marks[i].is_nan()).collect(),
        None => (0..n).collect(),
    }
}

fn compact(values: &mut HashMap<Column, Vec<f64>>, live: &[usize]) {
    values.remove(&Column::MatchId);
    for v in values.values_mut() {
        *v = live.iter().map(|&i| v[i]).collect();
    }
}

/// Groups cleaned records into per-match timelines ordered by match_id.
pub fn group_timelines(cleaned: &Cleaned) -> Vec<MatchTimeline> {
    let mut out: Vec<MatchTimeline> = Vec::new();
    for rec in &cleaned.records {
        match out.last_mut() {
            Some(t) if t.match_id == rec.match_id => t.records.push(rec.clone()),
            _ => out.push(MatchTimeline {
                match_id: rec.match_id.clone(),
                players: cleaned
                    .players
                    .get(&rec.match_id)
                    .cloned()
                    .unwrap_or_else(|| ("player1".into(), "player2".into())),
                records: vec![rec.clone()],
            }),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub timelines: Vec<MatchTimeline>,
    pub report: CleaningReport,
}

/// Parses, cleans and groups a point-by-point CSV.
pub fn parse_match_csv(raw: &[u8], columns: &ColumnMap) -> Result<Corpus> {
    let table = read_raw(raw, columns)?;
    let cleaned = clean(&table)?;
    Ok(Corpus { timelines: group_timelines(&cleaned), report: cleaned.report })
}

fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Writes timelines in canonical column layout with normalized values.
pub fn write_clean_csv<W: Write>(timelines: &[MatchTimeline], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(Column::ALL.iter().map(|c| c.name()))?;
    for t in timelines {
        for r in &t.records {
            let b = |x: bool| if x { "1".to_string() } else { "0".to_string() };
            let f = &r.flags;
            let row: Vec<String> = Column::ALL
                .iter()
                .map(|c| match c {
                    Column::MatchId => r.match_id.clone(),
                    Column::Player1 => t.players.0.clone(),
                    Column::Player2 => t.players.1.clone(),
                    Column::SetNo => r.set_no.to_string(),
                    Column::GameNo => r.game_no.to_string(),
                    Column::PointNo => r.point_no.to_string(),
                    Column::P1Sets => r.sets[0].to_string(),
                    Column::P2Sets => r.sets[1].to_string(),
                    Column::P1Games => r.games[0].to_string(),
                    Column::P2Games => r.games[1].to_string(),
                    Column::P1Score => fmt_num(r.score[0]),
                    Column::P2Score => fmt_num(r.score[1]),
                    Column::Server => r.server.id().to_string(),
                    Column::ServeNo => r.serve_no.to_string(),
                    Column::PointVictor => r.point_victor.id().to_string(),
                    Column::P1PointsWon => r.points_won[0].to_string(),
                    Column::P2PointsWon => r.points_won[1].to_string(),
                    Column::P1Ace => b(f[0].ace),
                    Column::P2Ace => b(f[1].ace),
                    Column::P1DoubleFault => b(f[0].double_fault),
                    Column::P2DoubleFault => b(f[1].double_fault),
                    Column::P1UnfErr => b(f[0].unforced_error),
                    Column::P2UnfErr => b(f[1].unforced_error),
                    Column::P1NetPt => b(f[0].net_point),
                    Column::P2NetPt => b(f[1].net_point),
                    Column::P1BreakPt => b(f[0].break_point),
                    Column::P2BreakPt => b(f[1].break_point),
                    Column::P1BreakPtWon => b(f[0].break_point_won),
                    Column::P2BreakPtWon => b(f[1].break_point_won),
                    Column::P1BreakPtMissed => b(f[0].break_point_missed),
                    Column::P2BreakPtMissed => b(f[1].break_point_missed),
                    Column::WinnerShotType => r.shot_type_code.to_string(),
                    Column::P1DistanceRun => fmt_num(r.distance_run[0]),
                    Column::P2DistanceRun => fmt_num(r.distance_run[1]),
                    Column::RallyCount => r.rally_count.to_string(),
                    Column::SpeedMph => fmt_num(r.speed_mph),
                })
                .collect();
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub const FEATURE_NAMES: [&str; 10] = [
    "score_diff",
    "game_diff",
    "set_diff",
    "streak_len_p1",
    "streak_len_p2",
    "unforced_error_ratio_p1",
    "unforced_error_ratio_p2",
    "distance_run_diff",
    "serve_indicator",
    "psychological_factor",
];

/// Per-point features, oriented from player one's side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    /// cumulative points won, p1 − p2
    pub score_diff: f64,
    pub game_diff: f64,
    pub set_diff: f64,
    pub streak_len_p1: f64,
    pub streak_len_p2: f64,
    pub unforced_error_ratio_p1: f64,
    pub unforced_error_ratio_p2: f64,
    /// metres, p1 − p2
    pub distance_run_diff: f64,
    /// 1 when player one serves
    pub serve_indicator: f64,
    pub psychological_factor: f64,
}

impl FeatureRow {
    pub fn to_array(&self) -> [f64; 10] {
        [
            self.score_diff,
            self.game_diff,
            self.set_diff,
            self.streak_len_p1,
            self.streak_len_p2,
            self.unforced_error_ratio_p1,
            self.unforced_error_ratio_p2,
            self.distance_run_diff,
            self.serve_indicator,
            self.psychological_factor,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    pub match_id: String,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn names() -> Vec<String> {
        FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = FEATURE_NAMES.iter().position(|&n| n == name)?;
        Some(self.rows.iter().map(|r| r.to_array()[j]).collect())
    }

    /// Rows converted to the requested scalar type.
    pub fn matrix<F: crate::Scalar>(&self) -> Vec<Vec<F>> {
        self.rows
            .iter()
            .map(|r| r.to_array().iter().map(|&x| F::lit(x)).collect())
            .collect()
    }

    /// Pre-point view: row n carries the state after point n − 1, except the
    /// serve indicator which is known before the point is played.
    pub fn lagged(&self) -> FeatureTable {
        let neutral = FeatureRow {
            score_diff: 0.0,
            game_diff: 0.0,
            set_diff: 0.0,
            streak_len_p1: 0.0,
            streak_len_p2: 0.0,
            unforced_error_ratio_p1: 0.0,
            unforced_error_ratio_p2: 0.0,
            distance_run_diff: 0.0,
            serve_indicator: 0.0,
            psychological_factor: 0.5,
        };
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let prev = if i == 0 { neutral } else { self.rows[i - 1] };
                FeatureRow { serve_indicator: r.serve_indicator, ..prev }
            })
            .collect();
        FeatureTable { match_id: self.match_id.clone(), rows }
    }
}

/// Consecutive points won by `player` ending at each point.
pub fn streak_lengths(victors: &[Player], player: Player) -> Vec<u32> {
    let mut run = 0;
    victors
        .iter()
        .map(|&v| {
            run = if v == player { run + 1 } else { 0 };
            run
        })
        .collect()
}

/// Logistic squash of (break points won − double faults − opponent streak), slope 1.
pub fn psychological_factor(break_points_won: u32, double_faults: u32, opponent_streak: u32) -> f64 {
    let x = break_points_won as f64 - double_faults as f64 - opponent_streak as f64;
    crate::softmax::sigmoid(x).clamp(0.0, 1.0)
}

pub fn derive_features(timeline: &MatchTimeline) -> FeatureTable {
    let victors = timeline.victors();
    let s1 = streak_lengths(&victors, Player::One);
    let s2 = streak_lengths(&victors, Player::Two);
    let mut unf = [0u32; 2];
    let mut bpw = 0u32;
    let mut df = 0u32;
    let rows = timeline
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            for p in 0..2 {
                unf[p] += r.flags[p].unforced_error as u32;
            }
            bpw += r.flags[0].break_point_won as u32;
            df += r.flags[0].double_fault as u32;
            let played = (i + 1) as f64;
            FeatureRow {
                score_diff: r.points_won[0] as f64 - r.points_won[1] as f64,
                game_diff: r.games[0] as f64 - r.games[1] as f64,
                set_diff: r.sets[0] as f64 - r.sets[1] as f64,
                streak_len_p1: s1[i] as f64,
                streak_len_p2: s2[i] as f64,
                unforced_error_ratio_p1: unf[0] as f64 / played,
                unforced_error_ratio_p2: unf[1] as f64 / played,
                distance_run_diff: r.distance_run[0] - r.distance_run[1],
                serve_indicator: if r.server == Player::One { 1.0 } else { 0.0 },
                psychological_factor: psychological_factor(bpw, df, s2[i]),
            }
        })
        .collect();
    FeatureTable { match_id: timeline.match_id.clone(), rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "match_id,set_no,game_no,point_no,p1_sets,p2_sets,p1_games,p2_games,p1_score,p2_score,server,serve_no,point_victor,speed_mph,winner_shot_type,p1_unf_err";

    fn csv(rows: &[&str]) -> Vec<u8> {
        let mut s = String::from(HEADER);
        for r in rows {
            s.push('\n');
            s.push_str(r);
        }
        s.into_bytes()
    }

    #[test]
    fn three_rows_one_match() {
        let raw = csv(&[
            "m1,1,1,1,0,0,0,0,0,0,1,1,1,100,F,0",
            "m1,1,1,2,0,0,0,0,15,0,1,1,1,110,B,0",
            "m1,1,1,3,0,0,0,0,30,0,1,1,2,120,0,1",
        ]);
        let c = parse_match_csv(&raw, &ColumnMap::new()).unwrap();
        assert_eq!(c.timelines.len(), 1);
        assert_eq!(c.timelines[0].len(), 3);
        assert_eq!(c.timelines[0].records[2].points_won, [2, 1]);
    }

    #[test]
    fn interleaved_matches_are_split_and_ordered() {
        let raw = csv(&[
            "B,1,1,2,0,0,0,0,15,0,1,1,1,100,0,0",
            "A,1,1,1,0,0,0,0,0,0,1,1,1,100,0,0",
            "B,1,1,1,0,0,0,0,0,0,2,1,2,100,0,0",
            "A,1,1,2,0,0,0,0,15,0,1,1,2,100,0,0",
        ]);
        let c = parse_match_csv(&raw, &ColumnMap::new()).unwrap();
        let ids: Vec<_> = c.timelines.iter().map(|t| t.match_id.as_str()).collect();
        assert_eq!(ids, ["A", "B"]);
        for t in &c.timelines {
            let nos: Vec<u32> = t.records.iter().map(|r| r.point_no).collect();
            assert_eq!(nos, [1, 2]);
        }
    }

    #[test]
    fn missing_required_column_is_named() {
        let raw = b"match_id,set_no,game_no,point_no,p1_sets,p2_sets,p1_games,p2_games,p1_score,p2_score,server,serve_no\nm,1,1,1,0,0,0,0,0,0,1,1\n";
        match parse_match_csv(raw, &ColumnMap::new()) {
            Err(Error::MissingColumn(c)) => assert_eq!(c, "point_victor"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse_match_csv(b"", &ColumnMap::new()), Err(Error::EmptyInput)));
        assert!(matches!(parse_match_csv(HEADER.as_bytes(), &ColumnMap::new()), Err(Error::EmptyInput)));
    }

    #[test]
    fn ad_becomes_fifty_and_shot_letters_map() {
        let raw = csv(&[
            "m,1,1,1,0,0,0,0,40,AD,1,1,2,100,B,0",
            "m,1,1,2,0,0,0,0,-1,40,1,1,1,100,F,0",
        ]);
        let c = parse_match_csv(&raw, &ColumnMap::new()).unwrap();
        let r = &c.timelines[0].records;
        assert_eq!(r[0].score, [40.0, 50.0]);
        assert_eq!(r[1].score, [50.0, 40.0]);
        assert_eq!(r[0].shot_type_code, 2);
        assert_eq!(r[1].shot_type_code, 1);
        assert_eq!(c.report.ad_replacements, 2);
    }

    #[test]
    fn speed_mean_imputation() {
        let raw = csv(&[
            "m,1,1,1,0,0,0,0,0,0,1,1,1,100,0,0",
            "m,1,1,2,0,0,0,0,15,0,1,1,1,,0,0",
            "m,1,1,3,0,0,0,0,30,0,1,1,1,120,0,0",
        ]);
        let c = parse_match_csv(&raw, &ColumnMap::new()).unwrap();
        assert_eq!(c.timelines[0].records[1].speed_mph, 110.0);
        assert_eq!(c.report.columns["speed_mph"].imputed_mean, 1);
    }

    #[test]
    fn imputation_is_per_match() {
        let raw = csv(&[
            "a,1,1,1,0,0,0,0,0,0,1,1,1,100,0,0",
            "a,1,1,2,0,0,0,0,15,0,1,1,1,,0,0",
            "b,1,1,1,0,0,0,0,0,0,1,1,1,200,0,0",
        ]);
        let c = parse_match_csv(&raw, &ColumnMap::new()).unwrap();
        assert_eq!(c.timelines[0].records[1].speed_mph, 100.0);
    }

    #[test]
    fn column_entirely_missing_for_a_match() {
        let raw = csv(&[
            "m,1,1,1,0,0,0,0,0,0,1,1,1,,0,0",
            "m,1,1,2,0,0,0,0,15,0,1,1,1,NA,0,0",
        ]);
        match parse_match_csv(&raw, &ColumnMap::new()) {
            Err(Error::ImputationImpossible { column, .. }) => assert_eq!(column, "speed_mph"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unrecoverable_victor_and_missing_ids_are_reported() {
        let raw = csv(&[
            "m,1,1,1,0,0,0,0,0,0,1,1,1,100,0,0",
            "m,1,1,2,0,0,0,0,15,0,1,1,7,100,0,0",
            "m,1,1,,0,0,0,0,15,0,1,1,1,100,0,0",
            ",1,1,4,0,0,0,0,15,0,1,1,1,100,0,0",
        ]);
        let c = parse_match_csv(&raw, &ColumnMap::new()).unwrap();
        assert_eq!(c.timelines[0].len(), 1);
        assert_eq!(c.report.rejected.len(), 3);
        assert_eq!(c.report.rows_out, 1);
    }

    #[test]
    fn victor_recovered_from_points_won() {
        let raw = b"match_id,set_no,game_no,point_no,p1_sets,p2_sets,p1_games,p2_games,p1_score,p2_score,server,serve_no,point_victor,p1_points_won,p2_points_won\n\
m,1,1,1,0,0,0,0,0,0,1,1,1,1,0\n\
m,1,1,2,0,0,0,0,15,0,1,1,,1,1\n";
        let c = parse_match_csv(raw, &ColumnMap::new()).unwrap();
        assert_eq!(c.timelines[0].records[1].point_victor, Player::Two);
        assert_eq!(c.report.columns["point_victor"].repaired, 1);
    }

    #[test]
    fn server_repaired_from_game_mode() {
        let raw = csv(&[
            "m,1,1,1,0,0,0,0,0,0,2,1,1,100,0,0",
            "m,1,1,2,0,0,0,0,15,0,0,1,1,100,0,0",
            "m,1,1,3,0,0,0,0,30,0,2,1,1,100,0,0",
        ]);
        let c = parse_match_csv(&raw, &ColumnMap::new()).unwrap();
        assert_eq!(c.timelines[0].records[1].server, Player::Two);
    }

    #[test]
    fn column_remapping() {
        let raw = HEADER.replace("point_victor", "winner") + "\nm,1,1,1,0,0,0,0,0,0,1,1,2,100,0,0";
        let map = ColumnMap::new().with("point_victor", "winner").unwrap();
        let c = parse_match_csv(raw.as_bytes(), &map).unwrap();
        assert_eq!(c.timelines[0].records[0].point_victor, Player::Two);
        assert!(ColumnMap::new().with("nonsense", "x").is_err());
    }

    fn timeline_from_victors(v: &[u8]) -> MatchTimeline {
        let rows: Vec<String> = v
            .iter()
            .enumerate()
            .map(|(i, w)| format!("m,1,1,{},0,0,0,0,0,0,1,1,{w},100,0,{}", i + 1, (i % 4 == 0) as u8))
            .collect();
        let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
        parse_match_csv(&csv(&refs), &ColumnMap::new()).unwrap().timelines.remove(0)
    }

    #[test]
    fn streaks() {
        let f = derive_features(&timeline_from_victors(&[1, 1, 1]));
        assert_eq!(f.column("streak_len_p1").unwrap(), [1.0, 2.0, 3.0]);
        let f = derive_features(&timeline_from_victors(&[1, 2, 1]));
        assert_eq!(f.column("streak_len_p1").unwrap(), [1.0, 0.0, 1.0]);
        assert_eq!(f.column("streak_len_p2").unwrap(), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn unforced_error_ratio() {
        // errors at points 1 and 5 (i % 4 == 0)
        let f = derive_features(&timeline_from_victors(&[1; 8]));
        assert_eq!(f.rows[7].unforced_error_ratio_p1, 0.25);
    }

    #[test]
    fn lagged_view_shifts_state() {
        let f = derive_features(&timeline_from_victors(&[1, 1, 2]));
        let l = f.lagged();
        assert_eq!(l.rows[0].streak_len_p1, 0.0);
        assert_eq!(l.rows[2].streak_len_p1, 2.0);
        assert_eq!(l.rows[2].serve_indicator, f.rows[2].serve_indicator);
    }

    #[test]
    fn clean_roundtrip_is_idempotent() {
        let raw = csv(&[
            "m,1,1,1,0,0,0,0,40,AD,1,1,2,,B,0",
            "m,1,1,2,0,0,0,0,-1,40,1,1,1,100,F,1",
            "m,1,1,3,0,0,0,0,30,0,1,1,1,120,x,0",
        ]);
        let first = parse_match_csv(&raw, &ColumnMap::new()).unwrap();
        let mut buf = Vec::new();
        write_clean_csv(&first.timelines, &mut buf).unwrap();
        let second = parse_match_csv(&buf, &ColumnMap::new()).unwrap();
        assert_eq!(first.timelines, second.timelines);
        assert_eq!(second.report.imputations, 0);
        assert_eq!(second.report.ad_replacements, 0);
        assert_eq!(second.report.repairs, 0);
        let mut again = Vec::new();
        write_clean_csv(&second.timelines, &mut again).unwrap();
        assert_eq!(buf, again);
    }
}
