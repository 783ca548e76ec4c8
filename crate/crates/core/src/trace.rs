//! Replayable move traces and their JSON-lines file format.
//!
//! ```text
//! {"version":1,"m":3,"k":2,"d":1,"background":"halfspace"}
//! {"from":[-1],"axis":0,"sign":1}
//! ...
//! {"claim":{"row":4}}
//! ```
//!
//! One header line, one line per move, and an optional claim trailer of
//! either `{"claim":{"row":n}}` or `{"claim":{"count":c,"at":[..]}}`.
//! Every line ends with `\n`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::board::{BoardState, GameParams, Move, Position};
use crate::error::{Error, Result};

pub const TRACE_VERSION: u32 = 1;

/// What a trace promises about its final board.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    /// Some cell on this row holds a checker.
    Row(i64),
    /// The cell holds at least this many checkers.
    Count { count: i64, at: Position },
}

impl Claim {
    pub fn holds(&self, board: &BoardState) -> Result<bool> {
        match self {
            Claim::Row(row) => Ok(board.delta().keys().any(|p| {
                p.row() == *row && board.count_at(p).map(|c| c > 0).unwrap_or(false)
            })),
            Claim::Count { count, at } => Ok(board.count_at(at)? >= *count),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveTrace {
    pub params: GameParams,
    pub moves: Vec<Move>,
    pub claim: Option<Claim>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    version: u32,
    m: u64,
    k: usize,
    d: usize,
    background: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveLine {
    from: Vec<i64>,
    axis: usize,
    sign: i8,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ClaimBody {
    Count { count: i64, at: Vec<i64> },
    Row { row: i64 },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClaimLine {
    claim: ClaimBody,
}

impl MoveTrace {
    pub fn new(params: GameParams, moves: Vec<Move>, claim: Option<Claim>) -> Self {
        Self {
            params,
            moves,
            claim,
        }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Final board after replaying every move on the initial half-space board.
    pub fn replay(&self) -> Result<BoardState> {
        BoardState::initial(self.params).replay(&self.moves)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let header = Header {
            version: TRACE_VERSION,
            m: self.params.m,
            k: self.params.k,
            d: self.params.d,
            background: "halfspace".to_string(),
        };
        push_line(&mut out, &header);
        for mv in &self.moves {
            push_line(
                &mut out,
                &MoveLine {
                    from: mv.from.0.clone(),
                    axis: mv.axis,
                    sign: mv.sign,
                },
            );
        }
        if let Some(claim) = &self.claim {
            let body = match claim {
                Claim::Row(row) => ClaimBody::Row { row: *row },
                Claim::Count { count, at } => ClaimBody::Count {
                    count: *count,
                    at: at.0.clone(),
                },
            };
            push_line(&mut out, &ClaimLine { claim: body });
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::TraceFormat { line, message };
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| err(0, "trace must end with a newline".into()))?;
        let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let (_, first) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let header: Header =
            serde_json::from_str(first).map_err(|e| err(1, format!("bad header: {e}")))?;
        if header.version != TRACE_VERSION {
            return Err(err(1, format!("unsupported version {}", header.version)));
        }
        if header.background != "halfspace" {
            return Err(err(1, format!("unsupported background {:?}", header.background)));
        }
        let params = GameParams::new(header.m, header.k, header.d)
            .map_err(|e| err(1, e.to_string()))?;

        let mut moves = Vec::new();
        let mut claim = None;
        for (n, line) in lines {
            if claim.is_some() {
                return Err(err(n, "content after claim trailer".into()));
            }
            let value: Value =
                serde_json::from_str(line).map_err(|e| err(n, format!("invalid JSON: {e}")))?;
            if value.get("claim").is_some() {
                let parsed: ClaimLine = serde_json::from_value(value)
                    .map_err(|e| err(n, format!("bad claim: {e}")))?;
                claim = Some(match parsed.claim {
                    ClaimBody::Row { row } => Claim::Row(row),
                    ClaimBody::Count { count, at } => {
                        if at.len() != params.d {
                            return Err(err(n, "claim position has wrong dimension".into()));
                        }
                        Claim::Count {
                            count,
                            at: Position(at),
                        }
                    }
                });
                continue;
            }
            let mv: MoveLine =
                serde_json::from_value(value).map_err(|e| err(n, format!("bad move: {e}")))?;
            if mv.from.len() != params.d {
                return Err(err(n, "move origin has wrong dimension".into()));
            }
            if mv.axis >= params.d {
                return Err(err(n, format!("axis {} out of range", mv.axis)));
            }
            if mv.sign != 1 && mv.sign != -1 {
                return Err(err(n, format!("sign must be 1 or -1, got {}", mv.sign)));
            }
            moves.push(Move::new(Position(mv.from), mv.axis, mv.sign));
        }
        Ok(Self {
            params,
            moves,
            claim,
        })
    }
}

fn push_line<T: Serialize>(out: &mut String, value: &T) {
    out.push_str(&serde_json::to_string(value).expect("trace lines serialize"));
    out.push('\n');
}
