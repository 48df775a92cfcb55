//! Best-effort persistence of solver memo tables.
//!
//! File layout: magic, format version, a caller-chosen ruleset tag, then a
//! stream of records `table:u8, key_len:u32, key bytes, value:u32` (all
//! little-endian). A file whose header does not match is ignored, as is a
//! file that fails to parse anywhere; nothing is loaded from it.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::cram::GridBoard;
use crate::engine::{Convention, Nimber, Outcome, Ruleset, Solver};
use crate::heap::HeapPosition;
use crate::push::{Phase, PushPosition};

const MAGIC: &[u8; 4] = b"GLMC";
const VERSION: u32 = 1;

const TABLE_NORMAL: u8 = 0;
const TABLE_MISERE: u8 = 1;
const TABLE_GRUNDY: u8 = 2;

/// Byte encoding of a position for the cache file.
pub trait CacheKey: Sized {
    fn encode(&self, out: &mut Vec<u8>);
    fn decode(bytes: &[u8]) -> Option<Self>;
}

impl CacheKey for HeapPosition {
    fn encode(&self, out: &mut Vec<u8>) {
        for h in self.heaps() {
            out.extend_from_slice(&h.to_le_bytes());
        }
    }

    fn decode(bytes: &[u8]) -> Option<Self> {
        if !bytes.len().is_multiple_of(8) {
            return None;
        }
        let heaps: Vec<u64> = bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Some(HeapPosition::new(&heaps))
    }
}

fn phase_byte(p: Phase) -> u8 {
    match p {
        Phase::BeforeButton => 1,
        Phase::AfterButton => 2,
    }
}

fn byte_phase(b: u8) -> Option<Phase> {
    match b {
        1 => Some(Phase::BeforeButton),
        2 => Some(Phase::AfterButton),
        _ => None,
    }
}

impl<P: CacheKey> CacheKey for PushPosition<P> {
    fn encode(&self, out: &mut Vec<u8>) {
        out.push(phase_byte(self.phase));
        self.inner.encode(out);
    }

    fn decode(bytes: &[u8]) -> Option<Self> {
        let (&first, rest) = bytes.split_first()?;
        Some(PushPosition {
            phase: byte_phase(first)?,
            inner: P::decode(rest)?,
        })
    }
}

impl CacheKey for GridBoard {
    fn encode(&self, out: &mut Vec<u8>) {
        out.push(self.rows() as u8);
        out.push(self.cols() as u8);
        out.push(phase_byte(self.phase));
        out.extend_from_slice(&self.occupancy().to_le_bytes());
    }

    fn decode(bytes: &[u8]) -> Option<Self> {
        let [m, n, phase, occ @ ..] = bytes else {
            return None;
        };
        let occ = u64::from_le_bytes(occ.try_into().ok()?);
        GridBoard::new(*m as u32, *n as u32, occ, byte_phase(*phase)?).ok()
    }
}

/// What happened on load.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadStatus {
    Missing,
    Loaded {
        entries: usize,
    },
    /// The file was present but unusable; the solver is unchanged.
    Ignored {
        reason: String,
    },
}

fn outcome_code(o: Outcome) -> u32 {
    match o {
        Outcome::P => 0,
        Outcome::N => 1,
    }
}

fn code_outcome(v: u32) -> Option<Outcome> {
    match v {
        0 => Some(Outcome::P),
        1 => Some(Outcome::N),
        _ => None,
    }
}

fn push_record(buf: &mut Vec<u8>, table: u8, key: &[u8], value: u32) {
    buf.push(table);
    buf.extend_from_slice(&(key.len() as u32).to_le_bytes());
    buf.extend_from_slice(key);
    buf.extend_from_slice(&value.to_le_bytes());
}

/// Writes every memo entry of `solver` to `path`, replacing the file
/// atomically.
pub fn save<R>(solver: &Solver<R>, path: &Path, tag: &str) -> io::Result<usize>
where
    R: Ruleset,
    R::Position: CacheKey,
{
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(tag.len() as u32).to_le_bytes());
    buf.extend_from_slice(tag.as_bytes());
    let mut key = Vec::new();
    let mut count = 0;
    for (conv, table) in [
        (Convention::Normal, TABLE_NORMAL),
        (Convention::Misere, TABLE_MISERE),
    ] {
        for (p, &o) in solver.outcome_table(conv) {
            key.clear();
            p.encode(&mut key);
            push_record(&mut buf, table, &key, outcome_code(o));
            count += 1;
        }
    }
    for (p, &g) in solver.grundy_table() {
        key.clear();
        p.encode(&mut key);
        push_record(&mut buf, TABLE_GRUNDY, &key, g.0);
        count += 1;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&buf)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(count)
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        if self.bytes.len() < n {
            return None;
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Some(head)
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
    }
}

enum Entry<P> {
    Outcome(Convention, P, Outcome),
    Grundy(P, Nimber),
}

fn parse<P: CacheKey>(bytes: &[u8], tag: &str) -> Result<Vec<Entry<P>>, String> {
    let mut r = Reader { bytes };
    if r.take(4) != Some(MAGIC.as_slice()) {
        return Err("not a memo cache file".into());
    }
    let version = r.u32().ok_or("truncated header")?;
    if version != VERSION {
        return Err(format!("format version {version}, expected {VERSION}"));
    }
    let tag_len = r.u32().ok_or("truncated header")? as usize;
    let file_tag = r.take(tag_len).ok_or("truncated header")?;
    if file_tag != tag.as_bytes() {
        return Err(format!(
            "cache is for `{}`, not `{tag}`",
            String::from_utf8_lossy(file_tag)
        ));
    }
    let mut entries = Vec::new();
    while !r.bytes.is_empty() {
        let table = r.take(1).ok_or("truncated record")?[0];
        let len = r.u32().ok_or("truncated record")? as usize;
        let key = P::decode(r.take(len).ok_or("truncated record")?).ok_or("bad key")?;
        let value = r.u32().ok_or("truncated record")?;
        entries.push(match table {
            TABLE_NORMAL | TABLE_MISERE => {
                let conv = if table == TABLE_NORMAL {
                    Convention::Normal
                } else {
                    Convention::Misere
                };
                Entry::Outcome(conv, key, code_outcome(value).ok_or("bad outcome")?)
            }
            TABLE_GRUNDY => Entry::Grundy(key, Nimber(value)),
            _ => return Err(format!("unknown table {table}")),
        });
    }
    Ok(entries)
}

/// Loads entries from `path` into `solver`, up to its memo cap.
pub fn load<R>(solver: &mut Solver<R>, path: &Path, tag: &str) -> LoadStatus
where
    R: Ruleset,
    R::Position: CacheKey,
{
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return LoadStatus::Missing,
        Err(e) => {
            return LoadStatus::Ignored {
                reason: e.to_string(),
            }
        }
    };
    let entries = match parse::<R::Position>(&bytes, tag) {
        Ok(e) => e,
        Err(reason) => return LoadStatus::Ignored { reason },
    };
    let cap = solver.cap();
    let mut loaded = 0;
    for e in entries {
        if solver.stats().entries as usize >= cap {
            break;
        }
        match e {
            Entry::Outcome(conv, p, o) => {
                solver.outcome_table_mut(conv).insert(p, o);
            }
            Entry::Grundy(p, g) => {
                solver.grundy_table_mut().insert(p, g);
            }
        }
        loaded += 1;
    }
    LoadStatus::Loaded { entries: loaded }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cram::{self, PushCram};
    use crate::heap::HeapGame;
    use crate::push::Compound;

    fn temp_path(name: &str) -> std::path::PathBuf {
        std::env::temp_dir().join(format!("gamelab-cache-{}-{name}", std::process::id()))
    }

    #[test]
    fn heap_round_trip() {
        let path = temp_path("heap");
        let mut s = Solver::new(HeapGame::Wythoff);
        let p = HeapPosition::new(&[9, 14]);
        let o = s.outcome(&p, Convention::Normal).unwrap();
        let m = s.outcome(&p, Convention::Misere).unwrap();
        let g = s.grundy(&p).unwrap();
        let saved = save(&s, &path, "wythoff").unwrap();
        assert_eq!(saved as u64, s.stats().entries);

        let mut warm = Solver::new(HeapGame::Wythoff);
        assert_eq!(
            load(&mut warm, &path, "wythoff"),
            LoadStatus::Loaded { entries: saved }
        );
        assert_eq!(warm.stats().entries, s.stats().entries);
        assert_eq!(warm.outcome(&p, Convention::Normal).unwrap(), o);
        assert_eq!(warm.outcome(&p, Convention::Misere).unwrap(), m);
        assert_eq!(warm.grundy(&p).unwrap(), g);
        assert_eq!(warm.stats().computed, 0);
        fs::remove_file(&path).unwrap();
    }

    #[test]
    fn mismatched_or_corrupt_files_are_ignored() {
        let path = temp_path("mismatch");
        let mut s = Solver::new(HeapGame::Nim);
        s.outcome(&HeapPosition::new(&[3, 4]), Convention::Normal)
            .unwrap();
        save(&s, &path, "nim").unwrap();

        let mut other = Solver::new(HeapGame::Nim);
        assert!(matches!(
            load(&mut other, &path, "euclid"),
            LoadStatus::Ignored { .. }
        ));
        assert_eq!(other.stats().entries, 0);

        let mut bytes = fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 2);
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load(&mut other, &path, "nim"),
            LoadStatus::Ignored { .. }
        ));
        assert_eq!(other.stats().entries, 0);

        fs::write(&path, b"junk").unwrap();
        assert!(matches!(
            load(&mut other, &path, "nim"),
            LoadStatus::Ignored { .. }
        ));
        fs::remove_file(&path).unwrap();
        assert_eq!(load(&mut other, &path, "nim"), LoadStatus::Missing);
    }

    #[test]
    fn push_and_board_keys_round_trip() {
        let p = PushPosition::after(HeapPosition::new(&[0, 7, 2]));
        let mut buf = Vec::new();
        p.encode(&mut buf);
        assert_eq!(PushPosition::<HeapPosition>::decode(&buf), Some(p));

        let path = temp_path("cram");
        let mut s = cram::new_solver();
        let b = GridBoard::empty(3, 6).unwrap();
        let o = cram::cram_outcome(&mut s, &b).unwrap();
        save(&s, &path, "push-cram").unwrap();
        let mut warm = Solver::new(PushCram);
        assert!(matches!(
            load(&mut warm, &path, "push-cram"),
            LoadStatus::Loaded { .. }
        ));
        assert_eq!(cram::cram_outcome(&mut warm, &b).unwrap(), o);
        fs::remove_file(&path).unwrap();

        let path = temp_path("push");
        let mut s = Solver::new(Compound::NimEuclid.ruleset());
        let q = PushPosition::before(HeapPosition::new(&[7, 12]));
        assert!(s.outcome(&q, Convention::Normal).unwrap().is_p());
        save(&s, &path, "nim-euclid").unwrap();
        let mut warm = Solver::new(Compound::NimEuclid.ruleset());
        load(&mut warm, &path, "nim-euclid");
        assert!(warm.outcome(&q, Convention::Normal).unwrap().is_p());
        assert_eq!(warm.stats().computed, 0);
        fs::remove_file(&path).unwrap();
    }
}
