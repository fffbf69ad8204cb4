//! Sessions, task timing, click validation and the append-only journal.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use clickbench::clicks::{Device, DEFAULT_DIAG_FRACTION};
use clickbench::dataset::{
    validate_batch, write_clicks_csv, ClickRecord, ClickType, ClickValidator, DatasetManifest,
    BATCH_SIZE, CLICK_COLUMNS,
};
use clickbench::imaging::{load_mask_png, BinaryMask};
use image::RgbImage;
use log::{info, warn};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clock::Clock;
use crate::error::CollectError;
use crate::render::{placeholder_image, render_target, DisplayMode, Target};

/// Whole image shown before the target.
pub const IMAGE_MS: u64 = 1500;
pub const TARGET_MS: u64 = 2000;
pub const TEXT_TARGET_MS: u64 = 2500;
/// Image shown again with clicking disabled.
pub const LOCKED_MS: u64 = 1500;
/// Tolerated shortfall of server-observed time against the phase schedule.
pub const SLACK_MS: u64 = 250;

pub fn target_ms(mode: DisplayMode) -> u64 {
    if mode == DisplayMode::Text {
        TEXT_TARGET_MS
    } else {
        TARGET_MS
    }
}

/// Milliseconds from the start of a task until clicking is allowed.
pub fn unlock_ms(mode: DisplayMode) -> u64 {
    IMAGE_MS + target_ms(mode) + LOCKED_MS
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub image_ms: u64,
    pub target_ms: u64,
    pub locked_ms: u64,
}

impl PhaseTimings {
    pub fn for_mode(mode: DisplayMode) -> Self {
        Self {
            image_ms: IMAGE_MS,
            target_ms: target_ms(mode),
            locked_ms: LOCKED_MS,
        }
    }
}

/// One collectable object.
struct CollectInstance {
    id: String,
    image_stem: String,
    object_stem: String,
    image: Option<PathBuf>,
    gt: BinaryMask,
    description: Option<String>,
}

struct Session {
    participant: String,
    device: Device,
    mode: DisplayMode,
    tasks: Vec<String>,
    valid: Vec<bool>,
    rows: Vec<ClickRecord>,
    batch_valid: Option<bool>,
}

struct Task {
    session: String,
    instance: usize,
    position: usize,
    issued_ms: Option<u64>,
    done: bool,
}

#[derive(Default)]
struct State {
    sessions: HashMap<String, Session>,
    tasks: HashMap<String, Task>,
    seen: HashMap<String, HashSet<usize>>,
    /// Rows of completed valid batches, in completion order.
    exported: Vec<ClickRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewSession {
    pub device: Device,
    /// Stable participant identifier; a fresh one is assigned when absent.
    #[serde(default)]
    pub participant: Option<String>,
    #[serde(default)]
    pub mode: Option<DisplayMode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub participant: String,
    pub display_mode: DisplayMode,
    pub tasks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskView {
    pub task_id: String,
    pub instance: String,
    pub position: usize,
    pub display_mode: DisplayMode,
    pub phases: PhaseTimings,
    pub image_url: String,
    pub target_url: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NextTask {
    Task(TaskView),
    Done { batch_valid: Option<bool> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickSubmission {
    pub x: u32,
    pub y: u32,
    /// Size the image was displayed at.
    pub w: u32,
    pub h: u32,
    /// Client-measured time from the start of the task to the click.
    pub client_elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickReceipt {
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valid: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Set once the tenth click of the batch is in.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_valid: Option<bool>,
}

impl ClickReceipt {
    fn rejected(reason: impl Into<String>) -> Self {
        Self {
            accepted: false,
            valid: None,
            reason: Some(reason.into()),
            batch_valid: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StoreConfig {
    pub default_mode: DisplayMode,
    pub seed: u64,
    pub diag_fraction: f64,
    pub journal: PathBuf,
}

impl StoreConfig {
    pub fn new(journal: impl Into<PathBuf>) -> Self {
        Self {
            default_mode: DisplayMode::Cutout,
            seed: 0,
            diag_fraction: DEFAULT_DIAG_FRACTION,
            journal: journal.into(),
        }
    }
}

const JOURNAL_PREFIX: [&str; 5] = ["session", "participant", "position", "received_ms", "valid"];

/// Collection state shared by all request handlers.
pub struct Store {
    dataset: String,
    instances: Vec<CollectInstance>,
    by_id: HashMap<String, usize>,
    config: StoreConfig,
    clock: Arc<dyn Clock>,
    state: RwLock<State>,
    rng: Mutex<ChaCha8Rng>,
    journal: Mutex<csv::Writer<File>>,
}

fn file_stem(p: &Path) -> Option<String> {
    p.file_stem().map(|s| s.to_string_lossy().into_owned())
}

impl Store {
    /// Loads every ground-truth mask of the manifest and replays an existing
    /// journal so earlier sessions keep counting.
    pub fn open(
        manifest: &DatasetManifest,
        config: StoreConfig,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, CollectError> {
        let mut instances = Vec::with_capacity(manifest.instances.len());
        for e in &manifest.instances {
            let gt = load_mask_png(manifest.resolve(&e.gt))?;
            instances.push(CollectInstance {
                id: e.id.clone(),
                image_stem: e
                    .image
                    .as_deref()
                    .and_then(file_stem)
                    .unwrap_or_else(|| e.id.clone()),
                object_stem: file_stem(&e.gt).unwrap_or_default(),
                image: e.image.as_ref().map(|p| manifest.resolve(p)),
                gt,
                description: e.description.clone(),
            });
        }
        if instances.len() < BATCH_SIZE {
            return Err(CollectError::BadRequest(format!(
                "a batch needs {BATCH_SIZE} distinct instances, the manifest has {}",
                instances.len()
            )));
        }
        let by_id = instances
            .iter()
            .enumerate()
            .map(|(i, inst)| (inst.id.clone(), i))
            .collect();

        let existing = config.journal.is_file()
            && std::fs::metadata(&config.journal).map_or(0, |m| m.len()) > 0;
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        let io_err = |e: std::io::Error| {
            CollectError::Internal(format!("{}: {e}", config.journal.display()))
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&config.journal)
            .map_err(io_err)?;
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(file);
        if !existing {
            let header: Vec<&str> = JOURNAL_PREFIX
                .iter()
                .chain(CLICK_COLUMNS.iter())
                .copied()
                .collect();
            writer
                .write_record(&header)
                .map_err(|e| CollectError::Internal(e.to_string()))?;
            writer.flush().map_err(io_err)?;
        }

        let store = Self {
            dataset: manifest.name.clone(),
            instances,
            by_id,
            config,
            clock,
            state: RwLock::new(State::default()),
            rng: Mutex::new(rng),
            journal: Mutex::new(writer),
        };
        if existing {
            let replayed = store.replay()?;
            *store.state.write().unwrap() = replayed;
        }
        Ok(store)
    }

    fn replay(&self) -> Result<State, CollectError> {
        let bad = |m: String| {
            CollectError::Internal(format!("journal {}: {m}", self.config.journal.display()))
        };
        let mut rdr =
            csv::Reader::from_path(&self.config.journal).map_err(|e| bad(e.to_string()))?;
        let mut state = State::default();
        let mut order: Vec<String> = Vec::new();
        for row in rdr.records() {
            let row = row.map_err(|e| bad(e.to_string()))?;
            let session = row[0].to_string();
            let participant = row[1].to_string();
            let valid: bool = row[4]
                .parse()
                .map_err(|_| bad(format!("bad valid flag {:?}", &row[4])))?;
            let fields =
                csv::StringRecord::from(row.iter().skip(JOURNAL_PREFIX.len()).collect::<Vec<_>>());
            let headers = csv::StringRecord::from(CLICK_COLUMNS.to_vec());
            let record: ClickRecord = fields
                .deserialize(Some(&headers))
                .map_err(|e| bad(e.to_string()))?;
            if let Some(&i) = self.by_id.get(&record.full_stem) {
                state.seen.entry(participant.clone()).or_default().insert(i);
            }
            let s = state.sessions.entry(session.clone()).or_insert_with(|| {
                order.push(session.clone());
                Session {
                    participant,
                    device: record.device,
                    mode: self.config.default_mode,
                    tasks: Vec::new(),
                    valid: Vec::new(),
                    rows: Vec::new(),
                    batch_valid: None,
                }
            });
            s.valid.push(valid);
            s.rows.push(record);
            if s.valid.len() == BATCH_SIZE {
                let ok = validate_batch(&s.valid).map_err(|e| bad(e.to_string()))?;
                s.batch_valid = Some(ok);
                if ok {
                    state.exported.extend(s.rows.iter().cloned());
                }
            }
        }
        info!("replayed {} journal sessions", order.len());
        Ok(state)
    }

    fn fresh_id(&self, prefix: char) -> String {
        let v: u64 = self.rng.lock().unwrap().random();
        format!("{prefix}{v:016x}")
    }

    pub fn create_session(&self, req: NewSession) -> Result<SessionInfo, CollectError> {
        if req.device == Device::Simulated {
            return Err(CollectError::BadRequest(
                "device must be pc or mobile".into(),
            ));
        }
        let participant = req.participant.unwrap_or_else(|| self.fresh_id('p'));
        let mode = req.mode.unwrap_or(self.config.default_mode);
        let session_id = self.fresh_id('s');

        let mut state = self.state.write().unwrap();
        let seen = state.seen.get(&participant);
        let mut unseen: Vec<usize> = (0..self.instances.len())
            .filter(|i| seen.is_none_or(|s| !s.contains(i)))
            .collect();
        if unseen.len() < BATCH_SIZE {
            return Err(CollectError::Conflict(format!(
                "participant {participant} has only {} unseen instances left",
                unseen.len()
            )));
        }
        unseen.shuffle(&mut *self.rng.lock().unwrap());
        let chosen = &unseen[..BATCH_SIZE];
        state
            .seen
            .entry(participant.clone())
            .or_default()
            .extend(chosen.iter().copied());

        let mut tasks = Vec::with_capacity(BATCH_SIZE);
        for (position, &instance) in chosen.iter().enumerate() {
            let id = self.fresh_id('t');
            state.tasks.insert(
                id.clone(),
                Task {
                    session: session_id.clone(),
                    instance,
                    position,
                    issued_ms: None,
                    done: false,
                },
            );
            tasks.push(id);
        }
        state.sessions.insert(
            session_id.clone(),
            Session {
                participant: participant.clone(),
                device: req.device,
                mode,
                tasks,
                valid: Vec::new(),
                rows: Vec::new(),
                batch_valid: None,
            },
        );
        Ok(SessionInfo {
            session_id,
            participant,
            display_mode: mode,
            tasks: BATCH_SIZE,
        })
    }

    /// The first unfinished task of the session; starts its clock on first fetch.
    pub fn next_task(&self, session_id: &str) -> Result<NextTask, CollectError> {
        let now = self.clock.now_ms();
        let mut state = self.state.write().unwrap();
        let session = state
            .sessions
            .get(session_id)
            .ok_or_else(|| CollectError::NotFound(format!("session {session_id}")))?;
        let mode = session.mode;
        let batch_valid = session.batch_valid;
        let pending = session
            .tasks
            .iter()
            .find(|t| !state.tasks[*t].done)
            .cloned();
        let Some(task_id) = pending else {
            return Ok(NextTask::Done { batch_valid });
        };
        let task = state.tasks.get_mut(&task_id).expect("task of session");
        task.issued_ms.get_or_insert(now);
        Ok(NextTask::Task(TaskView {
            instance: self.instances[task.instance].id.clone(),
            position: task.position,
            display_mode: mode,
            phases: PhaseTimings::for_mode(mode),
            image_url: format!("/task/{task_id}/image"),
            target_url: format!("/task/{task_id}/target?mode={mode}"),
            task_id,
        }))
    }

    fn task_instance(&self, task_id: &str) -> Result<(usize, DisplayMode), CollectError> {
        let state = self.state.read().unwrap();
        let task = state
            .tasks
            .get(task_id)
            .ok_or_else(|| CollectError::NotFound(format!("task {task_id}")))?;
        Ok((task.instance, state.sessions[&task.session].mode))
    }

    fn photo(&self, instance: usize) -> Result<RgbImage, CollectError> {
        let inst = &self.instances[instance];
        match &inst.image {
            Some(p) => Ok(image::open(p)
                .map_err(|e| CollectError::Internal(format!("{}: {e}", p.display())))?
                .into_rgb8()),
            None => Ok(placeholder_image(&inst.gt)),
        }
    }

    pub fn image(&self, task_id: &str) -> Result<RgbImage, CollectError> {
        let (instance, _) = self.task_instance(task_id)?;
        self.photo(instance)
    }

    /// Target presentation; `mode` defaults to the session's display mode.
    pub fn target(&self, task_id: &str, mode: Option<DisplayMode>) -> Result<Target, CollectError> {
        let (instance, session_mode) = self.task_instance(task_id)?;
        let inst = &self.instances[instance];
        let mode = mode.unwrap_or(session_mode);
        if mode == DisplayMode::Text {
            return render_target(
                &placeholder_image(&inst.gt),
                &inst.gt,
                mode,
                inst.description.as_deref(),
            );
        }
        render_target(
            &self.photo(instance)?,
            &inst.gt,
            mode,
            inst.description.as_deref(),
        )
    }

    pub fn submit_click(
        &self,
        task_id: &str,
        click: ClickSubmission,
    ) -> Result<ClickReceipt, CollectError> {
        let now = self.clock.now_ms();
        if click.w == 0 || click.h == 0 || click.x >= click.w || click.y >= click.h {
            return Err(CollectError::BadRequest(format!(
                "click ({}, {}) outside the {}x{} display",
                click.x, click.y, click.w, click.h
            )));
        }
        let mut guard = self.state.write().unwrap();
        let state = &mut *guard;
        let task = state
            .tasks
            .get_mut(task_id)
            .ok_or_else(|| CollectError::NotFound(format!("task {task_id}")))?;
        if task.done {
            return Err(CollectError::Conflict(format!(
                "task {task_id} already has a click"
            )));
        }
        let issued = task
            .issued_ms
            .ok_or_else(|| CollectError::Conflict(format!("task {task_id} was never started")))?;
        let session = state
            .sessions
            .get_mut(&task.session)
            .expect("session of task");
        let unlock = unlock_ms(session.mode);
        if click.client_elapsed_ms < unlock {
            return Ok(ClickReceipt::rejected(format!(
                "click at {} ms comes before clicking opens at {unlock} ms",
                click.client_elapsed_ms
            )));
        }
        if now.saturating_sub(issued) + SLACK_MS < unlock {
            return Ok(ClickReceipt::rejected(format!(
                "server saw the click {} ms after the task started, sooner than the {unlock} ms schedule allows",
                now.saturating_sub(issued)
            )));
        }

        let inst = &self.instances[task.instance];
        let record = ClickRecord {
            dataset: self.dataset.clone(),
            image_stem: inst.image_stem.clone(),
            object_stem: inst.object_stem.clone(),
            model_type: String::new(),
            click_type: ClickType::First,
            full_stem: inst.id.clone(),
            device: session.device,
            x: click.x,
            y: click.y,
            w: click.w,
            h: click.h,
        };
        let valid = ClickValidator::new(&inst.gt, self.config.diag_fraction).is_valid(&record);
        self.append_journal(
            &task.session,
            &session.participant,
            task.position,
            now,
            valid,
            &record,
        )?;

        task.done = true;
        session.valid.push(valid);
        session.rows.push(record);
        if session.valid.len() == BATCH_SIZE {
            let ok = validate_batch(&session.valid).map_err(CollectError::from)?;
            session.batch_valid = Some(ok);
            if ok {
                state.exported.extend(session.rows.iter().cloned());
            } else {
                warn!("session {} failed the batch check", task.session);
            }
        }
        Ok(ClickReceipt {
            accepted: true,
            valid: Some(valid),
            reason: None,
            batch_valid: session.batch_valid,
        })
    }

    fn append_journal(
        &self,
        session: &str,
        participant: &str,
        position: usize,
        received_ms: u64,
        valid: bool,
        record: &ClickRecord,
    ) -> Result<(), CollectError> {
        let mut w = self.journal.lock().unwrap();
        let row = [
            session.to_string(),
            participant.to_string(),
            position.to_string(),
            received_ms.to_string(),
            valid.to_string(),
            record.dataset.clone(),
            record.image_stem.clone(),
            record.object_stem.clone(),
            record.model_type.clone(),
            "first".into(),
            record.full_stem.clone(),
            serde_json::to_value(record.device)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
            record.x.to_string(),
            record.y.to_string(),
            record.w.to_string(),
            record.h.to_string(),
        ];
        w.write_record(&row)
            .map_err(|e| CollectError::Internal(e.to_string()))?;
        w.flush().map_err(|e| CollectError::Internal(e.to_string()))
    }

    /// Click table of all completed valid batches.
    pub fn export_csv<W: Write>(&self, out: W) -> Result<(), CollectError> {
        let rows = self.state.read().unwrap().exported.clone();
        write_clicks_csv(out, &rows).map_err(CollectError::from)
    }
}
