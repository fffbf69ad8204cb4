//! HTTP service that runs timed click-collection sessions.
//!
//! Each session shows a participant ten distinct objects. A task is the
//! image, then the target object, then the image again with clicking
//! locked; only a click after the locked phase is accepted. A batch counts
//! when at least seven of its ten clicks land on or near the object, and only
//! counted batches appear in the exported click table.

mod clock;
mod error;
mod render;
mod server;
mod store;

pub use clock::{Clock, ManualClock, SystemClock};
pub use error::CollectError;
pub use render::{
    placeholder_image, render_target, DisplayMode, Target, BACKGROUND_GRAY, HIGHLIGHT_GREEN,
    HIGHLIGHT_WIDTH,
};
pub use server::{router, serve};
pub use store::{
    target_ms, unlock_ms, ClickReceipt, ClickSubmission, NewSession, NextTask, PhaseTimings,
    SessionInfo, Store, StoreConfig, TaskView, IMAGE_MS, LOCKED_MS, SLACK_MS, TARGET_MS,
    TEXT_TARGET_MS,
};
