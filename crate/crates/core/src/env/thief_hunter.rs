//! Thief and hunter: the agent (thief) tries to reach a goal cell on the
//! hunter's side of a walled grid without being caught.

use std::path::Path;

use super::{content_lines, Game, Side, StepResult, DEFAULT_STEP_LIMIT};
use crate::condition::Situation;
use crate::error::{Error, Result};
use crate::rng::SessionRng;

pub const ACTIONS: usize = 5;
pub const UP: usize = 0;
pub const DOWN: usize = 1;
pub const LEFT: usize = 2;
pub const RIGHT: usize = 3;
pub const STANDBY: usize = 4;

const LABELS: [&str; ACTIONS] = ["up", "down", "left", "right", "standby"];
const MOVES: [(i64, i64); ACTIONS] = [(-1, 0), (1, 0), (0, -1), (0, 1), (0, 0)];
const COORD_BITS: usize = 3;

pub const GOAL_REWARD: f64 = 100.0;
pub const CATCH_REWARD: f64 = 100.0;
pub const LEFT_HALF_PENALTY: f64 = -10.0;

static DEFAULT_MAP: &str = include_str!("../../data/thief_hunter.txt");

pub type Cell = (usize, usize);

#[derive(Clone, Debug, PartialEq)]
pub struct ThiefHunterMap {
    rows: usize,
    cols: usize,
    obstacles: Vec<bool>,
    goals: Vec<Cell>,
    /// First column of the hunter's half.
    midline: usize,
    agent_start: Cell,
    opponent_start: Cell,
}

impl ThiefHunterMap {
    /// Header `grid <rows> <cols>`, then one line per row of `.` free, `X`
    /// obstacle, `G` goal, `A`/`O` start cells, with a `|` between the last
    /// column of the thief's half and the first of the hunter's.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let header = lines.next().ok_or_else(|| Error::Parse("empty map file".into()))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 3 || dims[0] != "grid" {
            return Err(Error::Parse(format!("bad map header {header:?}")));
        }
        let parse_dim = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad dimension {s:?}")));
        let (rows, cols) = (parse_dim(dims[1])?, parse_dim(dims[2])?);
        if rows > 1 << COORD_BITS || cols > 1 << COORD_BITS {
            return Err(Error::EncodingOverflow { value: rows.max(cols) - 1, bits: COORD_BITS });
        }
        let mut obstacles = vec![false; rows * cols];
        let (mut goals, mut agent, mut opponent, mut midline) = (Vec::new(), None, None, None);
        let body: Vec<&str> = lines.collect();
        if body.len() != rows {
            return Err(Error::Parse(format!("expected {rows} rows, found {}", body.len())));
        }
        for (r, line) in body.iter().enumerate() {
            let mut c = 0;
            for ch in line.trim().chars() {
                match ch {
                    '|' => {
                        if midline.is_some_and(|m| m != c) {
                            return Err(Error::Parse(format!("midline moves in row {r}")));
                        }
                        midline = Some(c);
                        continue;
                    }
                    '.' => {}
                    'X' => obstacles[r * cols + c.min(cols - 1)] = true,
                    'G' => goals.push((r, c)),
                    'A' => agent = Some((r, c)),
                    'O' => opponent = Some((r, c)),
                    other => return Err(Error::InvalidSymbol(other)),
                }
                c += 1;
            }
            if c != cols {
                return Err(Error::Parse(format!("row {r} has {c} cells, expected {cols}")));
            }
        }
        let midline = midline.ok_or_else(|| Error::Parse("no midline marker".into()))?;
        let agent_start = agent.ok_or_else(|| Error::Parse("no thief start cell".into()))?;
        let opponent_start = opponent.ok_or_else(|| Error::Parse("no hunter start cell".into()))?;
        if goals.is_empty() {
            return Err(Error::Parse("no goal cell".into()));
        }
        if opponent_start.1 < midline {
            return Err(Error::Parse("hunter starts left of the midline".into()));
        }
        Ok(ThiefHunterMap { rows, cols, obstacles, goals, midline, agent_start, opponent_start })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn goals(&self) -> &[Cell] {
        &self.goals
    }

    pub fn midline(&self) -> usize {
        self.midline
    }

    pub fn start(&self, side: Side) -> Cell {
        match side {
            Side::Agent => self.agent_start,
            Side::Opponent => self.opponent_start,
        }
    }

    pub fn is_obstacle(&self, cell: Cell) -> bool {
        self.obstacles[cell.0 * self.cols + cell.1]
    }

    pub fn is_goal(&self, cell: Cell) -> bool {
        self.goals.contains(&cell)
    }

    pub fn in_left_half(&self, cell: Cell) -> bool {
        cell.1 < self.midline
    }

    /// Cell reached by `action`, or `None` if it is off the grid or blocked.
    pub fn neighbour(&self, cell: Cell, action: usize) -> Option<Cell> {
        let (dr, dc) = MOVES[action];
        let r = cell.0 as i64 + dr;
        let c = cell.1 as i64 + dc;
        if r < 0 || c < 0 || r >= self.rows as i64 || c >= self.cols as i64 {
            return None;
        }
        let n = (r as usize, c as usize);
        (!self.is_obstacle(n)).then_some(n)
    }

    /// Every open cell, row-major.
    pub fn free_cells(&self) -> Vec<Cell> {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .filter(|&c| !self.is_obstacle(c))
            .collect()
    }
}

impl Default for ThiefHunterMap {
    fn default() -> Self {
        ThiefHunterMap::parse(DEFAULT_MAP).expect("bundled map parses")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThiefHunterState {
    pub agent: Cell,
    pub opponent: Cell,
}

/// Agent row, agent column, opponent row, opponent column; three bits each.
pub fn encode_thief_hunter(state: &ThiefHunterState) -> Result<Situation> {
    let (a, o) = (state.agent, state.opponent);
    Situation::from_fields(&[(a.0, COORD_BITS), (a.1, COORD_BITS), (o.0, COORD_BITS), (o.1, COORD_BITS)])
}

pub fn decode_thief_hunter(s: &Situation) -> ThiefHunterState {
    let f = s.to_fields(&[COORD_BITS; 4]);
    ThiefHunterState { agent: (f[0], f[1]), opponent: (f[2], f[3]) }
}

fn manhattan(a: Cell, b: Cell) -> usize {
    a.0.abs_diff(b.0) + a.1.abs_diff(b.1)
}

#[derive(Clone, Debug)]
pub struct ThiefHunter {
    map: ThiefHunterMap,
    state: ThiefHunterState,
    steps: usize,
    step_limit: usize,
    done: bool,
}

impl ThiefHunter {
    pub fn new(map: ThiefHunterMap, step_limit: usize) -> Self {
        let state = ThiefHunterState { agent: map.start(Side::Agent), opponent: map.start(Side::Opponent) };
        ThiefHunter { map, state, steps: 0, step_limit, done: false }
    }

    pub fn map(&self) -> &ThiefHunterMap {
        &self.map
    }

    pub fn state(&self) -> ThiefHunterState {
        self.state
    }

    pub fn set_state(&mut self, state: ThiefHunterState) -> Result<()> {
        let ok = |c: Cell| c.0 < self.map.rows && c.1 < self.map.cols && !self.map.is_obstacle(c);
        if !ok(state.agent) || !ok(state.opponent) || self.map.in_left_half(state.opponent) {
            return Err(Error::InvalidConfig(format!("invalid thief-and-hunter state {state:?}")));
        }
        self.state = state;
        self.done = false;
        Ok(())
    }

    fn goal_distance(&self, cell: Cell) -> usize {
        self.map.goals.iter().map(|&g| manhattan(cell, g)).min().expect("map has a goal")
    }

    /// Lowest-index legal move that strictly shortens the Manhattan distance
    /// to the nearest goal.
    pub fn approach_goal(&self) -> Option<usize> {
        let here = self.goal_distance(self.state.agent);
        (0..STANDBY).find(|&a| {
            self.map.neighbour(self.state.agent, a).is_some_and(|n| self.goal_distance(n) < here)
        })
    }

    /// In the hunter's half only: lowest-index legal move that strictly
    /// lengthens the Manhattan distance to the hunter.
    pub fn avoid_opponent(&self) -> Option<usize> {
        if self.map.in_left_half(self.state.agent) {
            return None;
        }
        let here = manhattan(self.state.agent, self.state.opponent);
        (0..STANDBY).find(|&a| {
            self.map
                .neighbour(self.state.agent, a)
                .is_some_and(|n| manhattan(n, self.state.opponent) > here)
        })
    }

    fn opponent_target(&self, action: usize) -> Cell {
        match self.map.neighbour(self.state.opponent, action) {
            Some(n) if !self.map.in_left_half(n) => n,
            _ => self.state.opponent,
        }
    }
}

impl Default for ThiefHunter {
    fn default() -> Self {
        ThiefHunter::new(ThiefHunterMap::default(), DEFAULT_STEP_LIMIT)
    }
}

impl Game for ThiefHunter {
    fn reset(&mut self, _: &mut SessionRng) {
        self.state =
            ThiefHunterState { agent: self.map.start(Side::Agent), opponent: self.map.start(Side::Opponent) };
        self.steps = 0;
        self.done = false;
    }

    fn step(&mut self, agent: usize, opponent: usize, _: &mut SessionRng) -> Result<StepResult> {
        if self.done {
            return Err(Error::GameOver);
        }
        for a in [agent, opponent] {
            if a >= ACTIONS {
                return Err(Error::InvalidAction { action: a, count: ACTIONS });
            }
        }
        let (pa, po) = (self.state.agent, self.state.opponent);
        let ta = self.map.neighbour(pa, agent).unwrap_or(pa);
        let to = self.opponent_target(opponent);
        self.state = ThiefHunterState { agent: ta, opponent: to };
        self.steps += 1;

        let caught = ta == to || (ta == po && to == pa);
        let (mut agent_reward, mut opponent_reward, mut winner) = (0.0, 0.0, None);
        if caught {
            agent_reward = -CATCH_REWARD;
            opponent_reward = CATCH_REWARD;
            winner = Some(Side::Opponent);
        } else if self.map.is_goal(ta) {
            agent_reward = GOAL_REWARD;
            winner = Some(Side::Agent);
        } else if self.map.in_left_half(ta) {
            agent_reward = LEFT_HALF_PENALTY;
        }
        let terminal = winner.is_some() || self.steps >= self.step_limit;
        self.done = terminal;
        Ok(StepResult { agent_reward, opponent_reward, terminal, winner })
    }

    fn situation(&self, side: Side) -> Situation {
        let s = match side {
            Side::Agent => self.state,
            Side::Opponent => ThiefHunterState { agent: self.state.opponent, opponent: self.state.agent },
        };
        encode_thief_hunter(&s).expect("map size checked at load")
    }

    fn advice(&self, side: Side) -> Vec<Option<usize>> {
        match side {
            Side::Agent => vec![self.approach_goal(), self.avoid_opponent()],
            Side::Opponent => Vec::new(),
        }
    }

    fn action_count(&self, _: Side) -> usize {
        ACTIONS
    }

    fn situation_width(&self) -> usize {
        4 * COORD_BITS
    }

    fn steps(&self) -> usize {
        self.steps
    }

    fn action_label(&self, _: Side, action: usize) -> String {
        LABELS.get(action).copied().unwrap_or("?").to_string()
    }
}
