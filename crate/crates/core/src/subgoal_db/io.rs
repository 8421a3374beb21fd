//! Little-endian binary layout:
//!
//! ```text
//! b"KNNSDB1" 0x01 | u32 width | u32 height | u32 N | N × (u32 k, k × u32 id)
//! ```
//!
//! with `id = y * width + x`. The kd-index is rebuilt on load.

use std::io::{self, Read, Write};

use super::{SubgoalDatabase, SubgoalRecord};
use crate::grid::{Coord, GridMap};

pub const MAGIC: &[u8; 7] = b"KNNSDB1";
pub const VERSION: u8 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("not a subgoal database (bad magic)")]
    BadMagic,
    #[error("unsupported database version {0}")]
    UnsupportedVersion(u8),
    #[error("database is for a {db_width}x{db_height} map, map is {map_width}x{map_height}")]
    DimensionMismatch { db_width: u32, db_height: u32, map_width: u32, map_height: u32 },
    #[error("truncated database stream")]
    Truncated,
    #[error("record {record}: state id {id} is outside the map")]
    StateOutOfBounds { record: usize, id: u32 },
    #[error("record {record}: {count} states, need at least 2")]
    InvalidRecord { record: usize, count: u32 },
    #[error(transparent)]
    Io(io::Error),
}

impl From<io::Error> for FormatError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            FormatError::Truncated
        } else {
            FormatError::Io(e)
        }
    }
}

/// Writes `db` in the binary layout. Output depends only on the records.
pub fn save_database<W: Write>(db: &SubgoalDatabase, mut sink: W) -> io::Result<()> {
    let mut buf = Vec::with_capacity(20 + 4 * (db.len() + db.stored_states() as usize));
    buf.extend_from_slice(MAGIC);
    buf.push(VERSION);
    for v in [db.width(), db.height(), db.len() as u32] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for r in db.records() {
        buf.extend_from_slice(&(r.states().len() as u32).to_le_bytes());
        for s in r.states() {
            buf.extend_from_slice(&(s.y * db.width() + s.x).to_le_bytes());
        }
    }
    sink.write_all(&buf)?;
    sink.flush()
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, FormatError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Reads a database and checks it against `map`'s dimensions.
pub fn load_database<R: Read>(mut source: R, map: &GridMap) -> Result<SubgoalDatabase, FormatError> {
    let mut magic = [0u8; 7];
    source.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(FormatError::BadMagic);
    }
    let mut version = [0u8; 1];
    source.read_exact(&mut version)?;
    if version[0] != VERSION {
        return Err(FormatError::UnsupportedVersion(version[0]));
    }
    let width = read_u32(&mut source)?;
    let height = read_u32(&mut source)?;
    if width != map.width() || height != map.height() {
        return Err(FormatError::DimensionMismatch {
            db_width: width,
            db_height: height,
            map_width: map.width(),
            map_height: map.height(),
        });
    }
    let n = read_u32(&mut source)? as usize;
    let cells = map.cell_count() as u64;
    // don't trust n for preallocation; a truncated file would claim anything
    let mut records = Vec::with_capacity(n.min(1 << 16));
    for record in 0..n {
        let k = read_u32(&mut source)?;
        if k < 2 {
            return Err(FormatError::InvalidRecord { record, count: k });
        }
        let mut states = Vec::with_capacity((k as usize).min(1 << 16));
        for _ in 0..k {
            let id = read_u32(&mut source)?;
            if u64::from(id) >= cells {
                return Err(FormatError::StateOutOfBounds { record, id });
            }
            states.push(Coord::new(id % width, id / width));
        }
        records.push(SubgoalRecord::new(states));
    }
    Ok(SubgoalDatabase::new(width, height, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgoal_db::{build_database, BuildOptions};

    fn sample() -> (GridMap, SubgoalDatabase) {
        let map = crate::grid::maps::maze(40, 40, crate::grid::maps::MazeStyle::corridors(2), 7);
        let db = build_database(&map, 25, 11, &BuildOptions::default()).unwrap();
        (map, db)
    }

    #[test]
    fn round_trip() {
        let (map, db) = sample();
        let mut bytes = Vec::new();
        save_database(&db, &mut bytes).unwrap();
        let back = load_database(&bytes[..], &map).unwrap();
        assert_eq!(back, db);
        assert_eq!(back.index(), db.index());
    }

    #[test]
    fn exact_layout() {
        let db = SubgoalDatabase::new(
            3,
            2,
            vec![SubgoalRecord::new(vec![Coord::new(0, 0), Coord::new(1, 1), Coord::new(2, 0)])],
        );
        let mut bytes = Vec::new();
        save_database(&db, &mut bytes).unwrap();
        let mut expected = b"KNNSDB1\x01".to_vec();
        for v in [3u32, 2, 1, 3, 0, 4, 2] {
            expected.extend_from_slice(&v.to_le_bytes());
        }
        assert_eq!(bytes, expected);
    }

    #[test]
    fn rejects_bad_input() {
        let (map, db) = sample();
        let mut bytes = Vec::new();
        save_database(&db, &mut bytes).unwrap();

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(load_database(&bad[..], &map), Err(FormatError::BadMagic)));

        let mut bad = bytes.clone();
        bad[7] = 2;
        assert!(matches!(load_database(&bad[..], &map), Err(FormatError::UnsupportedVersion(2))));

        let small = GridMap::open(32, 32);
        assert!(matches!(load_database(&bytes[..], &small), Err(FormatError::DimensionMismatch { .. })));

        assert!(matches!(load_database(&bytes[..bytes.len() - 1], &map), Err(FormatError::Truncated)));
        assert!(matches!(load_database(&bytes[..5], &map), Err(FormatError::Truncated)));

        // first state id of the first record
        let mut bad = bytes.clone();
        bad[24..28].copy_from_slice(&(40u32 * 40).to_le_bytes());
        assert!(matches!(load_database(&bad[..], &map), Err(FormatError::StateOutOfBounds { record: 0, .. })));

        let mut bad = bytes;
        bad[20..24].copy_from_slice(&1u32.to_le_bytes());
        assert!(matches!(load_database(&bad[..], &map), Err(FormatError::InvalidRecord { record: 0, count: 1 })));
    }
}
