//! Particles travelling along edges.

use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::diagram::{Dir, EdgeId};

/// Anything the engine can move around: an edge, a direction and some bits.
pub trait TokenLike: Clone + Ord + Hash + fmt::Debug + Send + Sync {
    fn edge(&self) -> EdgeId;
    fn dir(&self) -> Dir;
    /// Same bits, different place.
    fn moved(&self, edge: EdgeId, dir: Dir) -> Self;
    /// Whether two tokens meeting head-on on one edge cancel to 1 (rather
    /// than 0).
    fn bits_match(&self, other: &Self) -> bool;
    fn bits(&self) -> Vec<u8>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Token {
    pub edge: EdgeId,
    pub dir: Dir,
    pub bit: u8,
}

impl Token {
    pub fn new(edge: EdgeId, dir: Dir, bit: u8) -> Token {
        Token { edge, dir, bit }
    }

    pub fn down(edge: EdgeId, bit: u8) -> Token {
        Token::new(edge, Dir::Down, bit)
    }

    pub fn up(edge: EdgeId, bit: u8) -> Token {
        Token::new(edge, Dir::Up, bit)
    }
}

impl TokenLike for Token {
    fn edge(&self) -> EdgeId {
        self.edge
    }

    fn dir(&self) -> Dir {
        self.dir
    }

    fn moved(&self, edge: EdgeId, dir: Dir) -> Self {
        Token {
            edge,
            dir,
            bit: self.bit,
        }
    }

    fn bits_match(&self, other: &Self) -> bool {
        self.bit == other.bit
    }

    fn bits(&self) -> Vec<u8> {
        vec![self.bit]
    }
}

/// A token of the mixed-process machine, carrying one bit for each copy of
/// the doubled diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroundToken {
    pub edge: EdgeId,
    pub dir: Dir,
    pub x: u8,
    pub y: u8,
}

impl GroundToken {
    pub fn new(edge: EdgeId, dir: Dir, x: u8, y: u8) -> GroundToken {
        GroundToken { edge, dir, x, y }
    }
}

impl TokenLike for GroundToken {
    fn edge(&self) -> EdgeId {
        self.edge
    }

    fn dir(&self) -> Dir {
        self.dir
    }

    fn moved(&self, edge: EdgeId, dir: Dir) -> Self {
        GroundToken {
            edge,
            dir,
            x: self.x,
            y: self.y,
        }
    }

    fn bits_match(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y
    }

    fn bits(&self) -> Vec<u8> {
        vec![self.x, self.y]
    }
}
