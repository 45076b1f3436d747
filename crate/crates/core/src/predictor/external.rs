//! External predictor client: UTF-8 JSON over HTTP, with newline-delimited
//! transcript logging and deterministic replay.
//!
//! Request body:
//! ```json
//! { "goal": "621", "agent": [3, 4], "k": 5,
//!   "seen_occupancy": ["--0", "011"],
//!   "semantics": [ {"cell": [0, 2], "room_number": "621"} ],
//!   "pattern_notes": [] }
//! ```
//! Response body:
//! ```json
//! { "reasoning": "...", "patterns": [], "region": "right" }
//! ```
//! A missing or unrecognized `region` is treated as abstention with the raw
//! text preserved in the reasoning. Transport and timeout failures surface as
//! errors; the control loop maps them to abstention so episodes keep running.

use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::belief::Region;
use crate::grid::{ATTR_ROOM_NUMBER, ATTR_SIGN_TEXT};

use super::{GoalRegionPredictor, PredictionQuery, PredictionResult, PredictorError};

/// Serialize a query into the wire request body. `k` is the window side
/// length of the run the query belongs to.
pub fn build_wire_request(query: &PredictionQuery<'_>, k: usize) -> Value {
    #[derive(Serialize)]
    struct WireSemEntry<'a> {
        cell: [usize; 2],
        #[serde(skip_serializing_if = "Option::is_none")]
        room_number: Option<&'a str>,
        #[serde(skip_serializing_if = "Option::is_none")]
        sign_text: Option<&'a str>,
    }
    let semantics: Vec<WireSemEntry> = query
        .seen_sem
        .iter_non_empty()
        .map(|(cell, attrs)| WireSemEntry {
            cell: [cell.row, cell.col],
            room_number: attrs.get(ATTR_ROOM_NUMBER).map(String::as_str),
            sign_text: attrs.get(ATTR_SIGN_TEXT).map(String::as_str),
        })
        .collect();
    serde_json::json!({
        "goal": query.goal,
        "agent": [query.agent_pos.row, query.agent_pos.col],
        "k": k,
        "seen_occupancy": query.seen_occ.to_row_strings(),
        "semantics": semantics,
        "pattern_notes": query.pattern_notes,
    })
}

/// Lenient response parsing: absent fields default, malformed region strings
/// become abstention with the raw text kept in the reasoning.
pub fn parse_wire_response(value: &Value) -> PredictionResult {
    let reasoning =
        value.get("reasoning").and_then(Value::as_str).unwrap_or_default().to_string();
    let patterns = value
        .get("patterns")
        .and_then(Value::as_array)
        .map(|items| {
            items.iter().filter_map(Value::as_str).map(str::to_string).collect()
        })
        .unwrap_or_default();
    match value.get("region") {
        None | Some(Value::Null) => PredictionResult { reasoning, patterns, region: None },
        Some(raw) => {
            let parsed = raw.as_str().and_then(|s| Region::from_str(s).ok());
            let reasoning = match (&parsed, raw.as_str()) {
                (None, _) => {
                    format!("{reasoning} [unrecognized region: {raw}]").trim().to_string()
                }
                _ => reasoning,
            };
            PredictionResult { reasoning, patterns, region: parsed }
        }
    }
}

/// POST a JSON body and parse the JSON reply.
pub fn post_json(
    agent: &ureq::Agent,
    endpoint: &str,
    body: &Value,
    timeout: Duration,
) -> Result<Value, PredictorError> {
    let mut response = agent.post(endpoint).send_json(body).map_err(|e| match e {
        ureq::Error::Timeout(_) => PredictorError::Timeout(timeout),
        other => PredictorError::Transport(other.to_string()),
    })?;
    response
        .body_mut()
        .read_json::<Value>()
        .map_err(|e| PredictorError::Transport(format!("invalid response body: {e}")))
}

/// One logged request/response exchange.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TranscriptRecord {
    pub t: usize,
    pub request: Value,
    pub response: Value,
}

/// Appends newline-delimited JSON transcript records to a writer. Shared so
/// the run loop and predictor can both hold it.
#[derive(Clone)]
pub struct TranscriptWriter {
    sink: Arc<Mutex<Box<dyn Write + Send>>>,
}

impl TranscriptWriter {
    pub fn new(sink: Box<dyn Write + Send>) -> Self {
        Self { sink: Arc::new(Mutex::new(sink)) }
    }

    pub fn append(&self, record: &TranscriptRecord) {
        let mut sink = self.sink.lock().expect("transcript writer poisoned");
        serde_json::to_writer(&mut *sink, record).expect("transcript record serializes");
        sink.write_all(b"\n").expect("transcript write");
        sink.flush().expect("transcript flush");
    }
}

/// A full transcript, as parsed back from NDJSON.
#[derive(Debug, Clone, Default)]
pub struct Transcript {
    pub records: Vec<TranscriptRecord>,
}

impl Transcript {
    pub fn from_reader(reader: impl Read) -> Result<Self, serde_json::Error> {
        let mut records = Vec::new();
        for line in BufReader::new(reader).lines() {
            let line = line.map_err(serde_json::Error::io)?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line)?);
        }
        Ok(Self { records })
    }
}

/// Live HTTP client for an external goal-region predictor.
pub struct ExternalPredictor {
    endpoint: String,
    timeout: Duration,
    k: usize,
    agent: ureq::Agent,
    transcript: Option<TranscriptWriter>,
    queries: usize,
}

impl ExternalPredictor {
    pub fn new(endpoint: impl Into<String>, timeout: Duration, k: usize) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self {
            endpoint: endpoint.into(),
            timeout,
            k,
            agent,
            transcript: None,
            queries: 0,
        }
    }

    /// Log every request/response pair for later replay.
    pub fn with_transcript(mut self, writer: TranscriptWriter) -> Self {
        self.transcript = Some(writer);
        self
    }
}

impl GoalRegionPredictor for ExternalPredictor {
    fn predict(&mut self, query: &PredictionQuery<'_>) -> Result<PredictionResult, PredictorError> {
        let t = self.queries;
        self.queries += 1;
        let request = build_wire_request(query, self.k);
        let outcome = post_json(&self.agent, &self.endpoint, &request, self.timeout);
        if let Some(writer) = &self.transcript {
            let response = outcome.as_ref().cloned().unwrap_or(Value::Null);
            writer.append(&TranscriptRecord { t, request, response });
        }
        outcome.map(|v| parse_wire_response(&v))
    }

    fn deterministic(&self) -> bool {
        false
    }
}

/// Replays recorded responses by query ordinal, reproducing the original
/// episode without any network access.
pub struct TranscriptReplayPredictor {
    responses: Vec<Value>,
    next: usize,
}

impl TranscriptReplayPredictor {
    pub fn new(transcript: &Transcript) -> Self {
        Self { responses: transcript.records.iter().map(|r| r.response.clone()).collect(), next: 0 }
    }
}

impl GoalRegionPredictor for TranscriptReplayPredictor {
    fn predict(&mut self, _query: &PredictionQuery<'_>) -> Result<PredictionResult, PredictorError> {
        let t = self.next;
        self.next += 1;
        match self.responses.get(t) {
            Some(Value::Null) => Err(PredictorError::Transport("replayed failure".into())),
            Some(value) => Ok(parse_wire_response(value)),
            None => Err(PredictorError::ReplayExhausted(t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn response_with_region_parses() {
        let result = parse_wire_response(&serde_json::json!({"region": "right"}));
        assert_eq!(result.region, Some(Region::Right));
        assert!(result.reasoning.is_empty());
    }

    #[test]
    fn out_of_enum_region_becomes_abstention_with_raw_text() {
        let result = parse_wire_response(&serde_json::json!({
            "reasoning": "guessing",
            "region": "NORTHWEST"
        }));
        assert_eq!(result.region, None);
        assert!(result.reasoning.contains("NORTHWEST"));
        assert!(result.reasoning.contains("guessing"));
    }

    #[test]
    fn null_region_is_plain_abstention() {
        let result = parse_wire_response(&serde_json::json!({"region": null, "patterns": ["p"]}));
        assert_eq!(result.region, None);
        assert_eq!(result.patterns, vec!["p"]);
    }

    #[derive(Clone, Default)]
    struct SharedBuf(Arc<Mutex<Vec<u8>>>);

    impl Write for SharedBuf {
        fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
            self.0.lock().unwrap().extend_from_slice(buf);
            Ok(buf.len())
        }

        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }

    #[test]
    fn transcript_round_trips_through_ndjson() {
        let records = vec![
            TranscriptRecord {
                t: 0,
                request: serde_json::json!({"goal": "1"}),
                response: serde_json::json!({"region": "up"}),
            },
            TranscriptRecord { t: 1, request: serde_json::json!({}), response: Value::Null },
        ];
        let buffer = SharedBuf::default();
        let writer = TranscriptWriter::new(Box::new(buffer.clone()));
        for record in &records {
            writer.append(record);
        }
        let bytes = buffer.0.lock().unwrap().clone();
        let transcript = Transcript::from_reader(&bytes[..]).unwrap();
        assert_eq!(transcript.records.len(), 2);
        assert_eq!(transcript.records[1].response, Value::Null);
        let mut replay = TranscriptReplayPredictor::new(&transcript);
        let belief = crate::perception::AgentBelief::new(2, 2);
        let query = PredictionQuery {
            goal: "1",
            agent_pos: crate::grid::Cell::new(0, 0),
            seen_occ: &belief.seen_occ,
            seen_sem: &belief.seen_sem,
            pattern_notes: &belief.pattern_notes,
        };
        assert_eq!(replay.predict(&query).unwrap().region, Some(Region::Up));
        assert!(replay.predict(&query).is_err()); // replayed failure
        assert!(matches!(replay.predict(&query), Err(PredictorError::ReplayExhausted(2))));
    }
}
