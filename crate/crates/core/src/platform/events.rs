use super::PlatformError;
use crate::analysis::{PreferenceRecord, Source};
use crate::game::Action;
use crate::matchmaking::{Resolution, RoomEvent, Seat};
use crate::protocol::Stage;
use serde::{Deserialize, Serialize};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

/// One line of the event log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    /// Milliseconds on the service clock.
    pub ts: u64,
    #[serde(flatten)]
    pub body: EventBody,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum EventBody {
    SessionCreated { session_id: String, condition_id: u32 },
    /// A room opened with its initial tables and seeds.
    RoomOpened { room_id: String, events: Vec<RoomEvent> },
    TablesAdded { room_id: String, count: u32 },
    Seated { room_id: String, seat: Seat },
    /// A Player-1 move; the round is over for its session.
    MoveSubmitted { room_id: String, table_id: u32, session_id: String, action: Action, source: Source },
    /// A Player-2 move resolved a table; the round is over for its session.
    TrialResolved { room_id: String, resolution: Resolution },
    PreferenceChosen { record: PreferenceRecord },
    StageAdvanced { session_id: String, to: Stage },
    SurveySubmitted { session_id: String, answers: serde_json::Value },
    /// Idle past the timeout; the seat is released.
    SessionAbandoned { session_id: String },
    /// Removed for a technical error before the choice.
    SessionDropped { session_id: String },
}

impl EventBody {
    pub fn kind(&self) -> &'static str {
        match self {
            EventBody::SessionCreated { .. } => "SessionCreated",
            EventBody::RoomOpened { .. } => "RoomOpened",
            EventBody::TablesAdded { .. } => "TablesAdded",
            EventBody::Seated { .. } => "Seated",
            EventBody::MoveSubmitted { .. } => "MoveSubmitted",
            EventBody::TrialResolved { .. } => "TrialResolved",
            EventBody::PreferenceChosen { .. } => "PreferenceChosen",
            EventBody::StageAdvanced { .. } => "StageAdvanced",
            EventBody::SurveySubmitted { .. } => "SurveySubmitted",
            EventBody::SessionAbandoned { .. } => "SessionAbandoned",
            EventBody::SessionDropped { .. } => "SessionDropped",
        }
    }
}

/// The append-only log, in memory and optionally mirrored to a JSONL file.
#[derive(Debug, Default)]
pub struct EventLog {
    events: Vec<Event>,
    file: Option<(PathBuf, BufWriter<File>)>,
}

impl EventLog {
    pub fn in_memory() -> Self {
        EventLog::default()
    }

    /// Opens (or creates) the log at `path` and loads it. A torn final
    /// line, left by a crash mid-write, is cut off; damage anywhere else
    /// is an error.
    pub fn open(path: &Path) -> Result<Self, PlatformError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(path)?;
        let (events, good_len) = read_events(BufReader::new(&file))?;
        if good_len < file.metadata()?.len() {
            file.set_len(good_len)?;
            file.seek(SeekFrom::End(0))?;
        }
        Ok(EventLog { events, file: Some((path.to_path_buf(), BufWriter::new(file))) })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn path(&self) -> Option<&Path> {
        self.file.as_ref().map(|(p, _)| p.as_path())
    }

    /// Writes and flushes `event` before keeping it in memory.
    pub fn append(&mut self, event: Event) -> Result<(), PlatformError> {
        if let Some((_, w)) = &mut self.file {
            serde_json::to_writer(&mut *w, &event).map_err(|e| PlatformError::Log(e.to_string()))?;
            w.write_all(b"\n")?;
            w.flush()?;
        }
        self.events.push(event);
        Ok(())
    }

    pub fn to_jsonl(&self) -> Vec<u8> {
        crate::analysis::to_jsonl(&self.events)
    }
}

/// Parses events, returning them and the byte length of the intact prefix.
pub fn read_events<R: BufRead>(mut input: R) -> Result<(Vec<Event>, u64), PlatformError> {
    let mut events: Vec<Event> = Vec::new();
    let mut good = 0u64;
    let mut line = String::new();
    loop {
        line.clear();
        let n = input.read_line(&mut line)?;
        if n == 0 {
            break;
        }
        let complete = line.ends_with('\n');
        match serde_json::from_str::<Event>(line.trim_end()) {
            Ok(e) if complete => {
                let expected = events.len() as u64;
                if e.seq != expected {
                    return Err(PlatformError::Log(format!("event {} out of sequence (expected {expected})", e.seq)));
                }
                events.push(e);
                good += n as u64;
            }
            _ if line.trim().is_empty() && complete => good += n as u64,
            Ok(_) => break,
            Err(e) => {
                // only the final line may be torn
                let mut rest = String::new();
                input.read_to_string(&mut rest)?;
                if !rest.trim().is_empty() {
                    return Err(PlatformError::Log(format!("corrupt event after seq {}: {e}", events.len())));
                }
                break;
            }
        }
    }
    Ok((events, good))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn created(seq: u64) -> Event {
        Event { seq, ts: seq * 10, body: EventBody::SessionCreated { session_id: format!("s{seq}"), condition_id: 0 } }
    }

    #[test]
    fn wire_format() {
        let json = serde_json::to_string(&created(3)).unwrap();
        assert_eq!(json, r#"{"seq":3,"ts":30,"kind":"SessionCreated","payload":{"session_id":"s3","condition_id":0}}"#);
        assert_eq!(serde_json::from_str::<Event>(&json).unwrap(), created(3));
    }

    #[test]
    fn torn_tail_is_cut_and_appending_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log").join("events.jsonl");
        {
            let mut log = EventLog::open(&path).unwrap();
            log.append(created(0)).unwrap();
            log.append(created(1)).unwrap();
        }
        let mut bytes = std::fs::read(&path).unwrap();
        let full = bytes.len();
        bytes.extend_from_slice(br#"{"seq":2,"ts":20,"kind":"Sess"#);
        std::fs::write(&path, &bytes).unwrap();

        let mut log = EventLog::open(&path).unwrap();
        assert_eq!(log.len(), 2);
        assert_eq!(std::fs::metadata(&path).unwrap().len() as usize, full);
        log.append(created(2)).unwrap();
        drop(log);
        assert_eq!(EventLog::open(&path).unwrap().events(), &[created(0), created(1), created(2)]);
    }

    #[test]
    fn damage_before_the_tail_is_an_error() {
        let text = format!(
            "{}\nnot json\n{}\n",
            serde_json::to_string(&created(0)).unwrap(),
            serde_json::to_string(&created(1)).unwrap()
        );
        assert!(read_events(text.as_bytes()).is_err());
        let gap = format!("{}\n", serde_json::to_string(&created(1)).unwrap());
        assert!(read_events(gap.as_bytes()).is_err());
    }
}
