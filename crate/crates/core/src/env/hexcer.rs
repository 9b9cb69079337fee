//! Hexcer: two-player soccer on a board of hexagons.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;

use super::{content_lines, Game, Side, StepResult, DEFAULT_STEP_LIMIT};
use crate::condition::Situation;
use crate::error::{Error, Result};
use crate::rng::SessionRng;

pub const ACTIONS: usize = 7;
pub const UPPER_LEFT: usize = 0;
pub const UPPER_RIGHT: usize = 1;
pub const RIGHT: usize = 2;
pub const LOWER_RIGHT: usize = 3;
pub const LOWER_LEFT: usize = 4;
pub const LEFT: usize = 5;
pub const STANDBY: usize = 6;

const LABELS: [&str; ACTIONS] = ["upper-left", "upper-right", "right", "lower-right", "lower-left", "left", "standby"];

/// (row, doubled column) offsets, indexed by action.
const MOVES: [(i64, i64); ACTIONS] = [(-1, -1), (-1, 1), (0, 2), (1, 1), (1, -1), (0, -2), (0, 0)];

const CELL_BITS: usize = 6;

static DEFAULT_BOARD: &str = include_str!("../../data/hexcer.txt");

/// Board geometry. Cells are numbered left to right, top to bottom.
#[derive(Clone, Debug, PartialEq)]
pub struct HexBoard {
    cells: Vec<(i64, i64)>,
    lookup: HashMap<(i64, i64), usize>,
    agent_goal: usize,
    opponent_goal: usize,
    agent_start: usize,
    opponent_start: usize,
    ball: Option<Side>,
}

impl HexBoard {
    /// Header `hex <rows> <columns>`, then one line per row where the
    /// character column of each cell is its doubled horizontal coordinate.
    /// `G` marks the two goals (the right one is the agent's target), `A` and
    /// `O` the starting cells. A lowercase `a` or `o` marks a start cell
    /// whose player holds the ball at reset; otherwise the ball goes to a
    /// random player.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let header = lines.next().ok_or_else(|| Error::Parse("empty board file".into()))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 3 || dims[0] != "hex" {
            return Err(Error::Parse(format!("bad board header {header:?}")));
        }
        let rows: usize = dims[1].parse().map_err(|_| Error::Parse(format!("bad row count {:?}", dims[1])))?;
        let mut cells = Vec::new();
        let (mut goals, mut agent, mut opponent, mut ball) = (Vec::new(), None, None, None);
        let body: Vec<&str> = lines.collect();
        if body.len() != rows {
            return Err(Error::Parse(format!("expected {rows} rows, found {}", body.len())));
        }
        for (r, line) in body.iter().enumerate() {
            for (x, ch) in line.chars().enumerate() {
                let idx = cells.len();
                match ch {
                    ' ' => continue,
                    '.' => {}
                    'G' => goals.push(idx),
                    'A' => agent = Some(idx),
                    'O' => opponent = Some(idx),
                    'a' => {
                        agent = Some(idx);
                        ball = Some(Side::Agent);
                    }
                    'o' => {
                        opponent = Some(idx);
                        ball = Some(Side::Opponent);
                    }
                    other => return Err(Error::InvalidSymbol(other)),
                }
                cells.push((r as i64, x as i64));
            }
        }
        if cells.len() > 1 << CELL_BITS {
            return Err(Error::EncodingOverflow { value: cells.len() - 1, bits: CELL_BITS });
        }
        let lookup: HashMap<(i64, i64), usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        if goals.len() != 2 {
            return Err(Error::Parse(format!("expected two goal cells, found {}", goals.len())));
        }
        goals.sort_by_key(|&g| cells[g].1);
        let agent_start = agent.ok_or_else(|| Error::Parse("no agent start cell".into()))?;
        let opponent_start = opponent.ok_or_else(|| Error::Parse("no opponent start cell".into()))?;
        Ok(HexBoard {
            cells,
            lookup,
            agent_goal: goals[1],
            opponent_goal: goals[0],
            agent_start,
            opponent_start,
            ball,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Goal the given side scores in.
    pub fn goal(&self, side: Side) -> usize {
        match side {
            Side::Agent => self.agent_goal,
            Side::Opponent => self.opponent_goal,
        }
    }

    pub fn start(&self, side: Side) -> usize {
        match side {
            Side::Agent => self.agent_start,
            Side::Opponent => self.opponent_start,
        }
    }

    /// Who holds the ball at reset; `None` means a random player.
    pub fn starting_ball(&self) -> Option<Side> {
        self.ball
    }

    /// Cell reached from `cell` by `action`; `None` when it leaves the board.
    pub fn neighbour(&self, cell: usize, action: usize) -> Option<usize> {
        let (r, x) = self.cells[cell];
        let (dr, dx) = MOVES[action];
        self.lookup.get(&(r + dr, x + dx)).copied()
    }

    /// (row, doubled column) of a cell.
    pub fn coordinates(&self, cell: usize) -> (i64, i64) {
        self.cells[cell]
    }
}

impl Default for HexBoard {
    fn default() -> Self {
        HexBoard::parse(DEFAULT_BOARD).expect("bundled board parses")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HexcerState {
    pub agent: usize,
    pub opponent: usize,
    pub ball: Side,
}

/// Six-bit agent cell index followed by six-bit opponent cell index.
pub fn encode_hexcer(state: &HexcerState) -> Result<Situation> {
    for v in [state.agent, state.opponent] {
        if v >= 1 << CELL_BITS {
            return Err(Error::EncodingOverflow { value: v, bits: CELL_BITS });
        }
    }
    Situation::from_fields(&[(state.agent, CELL_BITS), (state.opponent, CELL_BITS)])
}

/// Cell indices (agent, opponent) of an encoded situation.
pub fn decode_hexcer(s: &Situation) -> (usize, usize) {
    let f = s.to_fields(&[CELL_BITS, CELL_BITS]);
    (f[0], f[1])
}

#[derive(Clone, Debug)]
pub struct Hexcer {
    board: HexBoard,
    state: HexcerState,
    steps: usize,
    step_limit: usize,
    done: bool,
}

impl Hexcer {
    pub fn new(board: HexBoard, step_limit: usize) -> Self {
        let state = HexcerState {
            agent: board.start(Side::Agent),
            opponent: board.start(Side::Opponent),
            ball: Side::Agent,
        };
        Hexcer { board, state, steps: 0, step_limit, done: false }
    }

    pub fn board(&self) -> &HexBoard {
        &self.board
    }

    pub fn state(&self) -> HexcerState {
        self.state
    }

    /// Places both players and the ball; clears the finished flag.
    pub fn set_state(&mut self, state: HexcerState) -> Result<()> {
        let n = self.board.cell_count();
        if state.agent >= n || state.opponent >= n || state.agent == state.opponent {
            return Err(Error::InvalidConfig(format!("invalid hexcer state {state:?}")));
        }
        self.state = state;
        self.done = false;
        Ok(())
    }

    fn target(&self, from: usize, action: usize) -> usize {
        self.board.neighbour(from, action).unwrap_or(from)
    }

    /// Advice of the single heuristic: head for the scoring side.
    pub fn heuristic(&self, side: Side) -> Option<usize> {
        let (cell, dir) = match side {
            Side::Agent => (self.state.agent, RIGHT),
            Side::Opponent => (self.state.opponent, LEFT),
        };
        self.board.neighbour(cell, dir).map(|_| dir)
    }
}

impl Default for Hexcer {
    fn default() -> Self {
        Hexcer::new(HexBoard::default(), DEFAULT_STEP_LIMIT)
    }
}

fn check_action(action: usize) -> Result<()> {
    if action >= ACTIONS {
        return Err(Error::InvalidAction { action, count: ACTIONS });
    }
    Ok(())
}

impl Game for Hexcer {
    fn reset(&mut self, rng: &mut SessionRng) {
        self.state = HexcerState {
            agent: self.board.start(Side::Agent),
            opponent: self.board.start(Side::Opponent),
            ball: match self.board.starting_ball() {
                Some(side) => side,
                None if rng.gen_bool(0.5) => Side::Agent,
                None => Side::Opponent,
            },
        };
        self.steps = 0;
        self.done = false;
    }

    fn step(&mut self, agent: usize, opponent: usize, rng: &mut SessionRng) -> Result<StepResult> {
        if self.done {
            return Err(Error::GameOver);
        }
        check_action(agent)?;
        check_action(opponent)?;
        let (pa, po) = (self.state.agent, self.state.opponent);
        let (ta, to) = (self.target(pa, agent), self.target(po, opponent));
        // Contested cell (which includes walking into a player who stays put)
        // or a swap: both hold their ground and the ball goes to either player
        // at random.
        let collision = ta == to || (ta == po && to == pa);
        if collision {
            self.state.ball = if rng.gen_bool(0.5) { Side::Agent } else { Side::Opponent };
        } else {
            self.state.agent = ta;
            self.state.opponent = to;
        }
        self.steps += 1;

        let scorer = match self.state.ball {
            Side::Agent if self.state.agent == self.board.goal(Side::Agent) => Some(Side::Agent),
            Side::Opponent if self.state.opponent == self.board.goal(Side::Opponent) => Some(Side::Opponent),
            _ => None,
        };
        let (agent_reward, opponent_reward) = match scorer {
            Some(Side::Agent) => (100.0, -100.0),
            Some(Side::Opponent) => (-100.0, 100.0),
            None => (0.0, 0.0),
        };
        let terminal = scorer.is_some() || self.steps >= self.step_limit;
        self.done = terminal;
        Ok(StepResult { agent_reward, opponent_reward, terminal, winner: scorer })
    }

    fn situation(&self, side: Side) -> Situation {
        let s = match side {
            Side::Agent => self.state,
            Side::Opponent => HexcerState { agent: self.state.opponent, opponent: self.state.agent, ..self.state },
        };
        encode_hexcer(&s).expect("board size checked at load")
    }

    fn advice(&self, side: Side) -> Vec<Option<usize>> {
        vec![self.heuristic(side)]
    }

    fn action_count(&self, _: Side) -> usize {
        ACTIONS
    }

    fn situation_width(&self) -> usize {
        2 * CELL_BITS
    }

    fn steps(&self) -> usize {
        self.steps
    }

    fn action_label(&self, _: Side, action: usize) -> String {
        LABELS.get(action).copied().unwrap_or("?").to_string()
    }
}
