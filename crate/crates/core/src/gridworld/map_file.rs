//! ASCII map files.
//!
//! ```text
//! ; optional comment on the first line
//! #######
//! #..S..#
//! #######
//! ```
//!
//! `#` is an obstacle, `.` is free space and `S` marks the single free start
//! cell. The first text row is the top (largest y) of the map.

use thiserror::Error;

use super::{Cell, CellState, GridError, OccupancyGrid, Point, Pose};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapParseError {
    #[error("map is empty")]
    Empty,
    #[error("line {line}: expected {expected} columns, found {found}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: illegal character {found:?}")]
    IllegalChar {
        line: usize,
        column: usize,
        found: char,
    },
    #[error("map has no start cell 'S'")]
    NoStart,
    #[error("line {line}, column {column}: second start cell 'S'")]
    MultipleStarts { line: usize, column: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// A parsed map: ground truth plus the start pose at the `S` cell center.
#[derive(Clone, Debug)]
pub struct LoadedMap {
    pub grid: OccupancyGrid,
    pub start: Pose,
}

pub fn load_map(text: &str, resolution: f64) -> Result<LoadedMap, MapParseError> {
    let mut rows: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .collect();
    if rows.first().is_some_and(|(_, l)| l.starts_with(';')) {
        rows.remove(0);
    }
    while rows.last().is_some_and(|(_, l)| l.is_empty()) {
        rows.pop();
    }
    let Some(&(_, first)) = rows.first() else {
        return Err(MapParseError::Empty);
    };
    let width = first.chars().count();
    if width == 0 {
        return Err(MapParseError::Empty);
    }
    let height = rows.len();

    let mut cells = vec![CellState::Unknown; width * height];
    let mut start: Option<Cell> = None;
    for (row, &(line, text)) in rows.iter().enumerate() {
        let found = text.chars().count();
        if found != width {
            return Err(MapParseError::Ragged {
                line,
                expected: width,
                found,
            });
        }
        let y = height - 1 - row;
        for (col, ch) in text.chars().enumerate() {
            let state = match ch {
                '#' => CellState::Occupied,
                '.' => CellState::Free,
                'S' => {
                    if start.is_some() {
                        return Err(MapParseError::MultipleStarts {
                            line,
                            column: col + 1,
                        });
                    }
                    start = Some(Cell::new(col as i32, y as i32));
                    CellState::Free
                }
                other => {
                    return Err(MapParseError::IllegalChar {
                        line,
                        column: col + 1,
                        found: other,
                    })
                }
            };
            cells[y * width + col] = state;
        }
    }
    let start = start.ok_or(MapParseError::NoStart)?;
    let grid = OccupancyGrid::from_cells(width, height, resolution, Point::default(), cells)?;
    let c = grid.cell_center(start);
    Ok(LoadedMap {
        grid,
        start: Pose::new(c.x, c.y, 0.0),
    })
}
