//! JSON-lines segmenter adapter protocol.
//!
//! The harness writes one [`WireRequest`] per line to the adapter's stdin and
//! reads one [`WireResponse`] per line from its stdout. Masks travel as
//! row-major run lengths starting with the zero-run.

use std::collections::HashMap;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use image::{GrayImage, ImageFormat, Luma};
use log::{debug, warn};
use serde::{Deserialize, Serialize};

use super::segmenter::{SegmentRequest, Segmenter, SegmenterFactory};
use crate::error::{Error, Result};
use crate::imaging::{rle_decode, rle_encode, BinaryMask};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireClick {
    pub x: i64,
    pub y: i64,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireRequest {
    pub id: String,
    /// A file path, or a base64-encoded PNG.
    pub image: String,
    pub clicks: Vec<WireClick>,
    pub prev_mask: Option<Vec<u64>>,
}

impl WireRequest {
    /// Width and height of the request image.
    pub fn image_dims(&self) -> Result<(usize, usize)> {
        let path = Path::new(&self.image);
        let (w, h) = if path.is_file() {
            image::image_dimensions(path).map_err(|e| Error::format(&self.image, e.to_string()))?
        } else {
            let bytes = STANDARD
                .decode(self.image.trim())
                .map_err(|e| Error::format("image", format!("neither a file nor base64: {e}")))?;
            let img = image::load_from_memory(&bytes)
                .map_err(|e| Error::format("image", e.to_string()))?;
            (img.width(), img.height())
        };
        Ok((w as usize, h as usize))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Base64 of an 8-bit PNG rendering of `mask` (0 / 255).
pub fn encode_png_base64(mask: &BinaryMask) -> String {
    let img = GrayImage::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
        Luma([if mask.get(x as usize, y as usize) {
            255
        } else {
            0
        }])
    });
    let mut bytes = io::Cursor::new(Vec::new());
    img.write_to(&mut bytes, ImageFormat::Png)
        .expect("in-memory png encoding");
    STANDARD.encode(bytes.into_inner())
}

/// Adapter side of the protocol: answers each request line with `handler`.
/// Malformed lines and handler errors become `error` responses.
pub fn serve_adapter<R, W, F>(reader: R, mut writer: W, mut handler: F) -> io::Result<()>
where
    R: BufRead,
    W: Write,
    F: FnMut(&WireRequest) -> Result<BinaryMask>,
{
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = match serde_json::from_str::<WireRequest>(&line) {
            Ok(req) => match handler(&req) {
                Ok(mask) => WireResponse {
                    id: req.id,
                    mask: Some(rle_encode(&mask)),
                    error: None,
                },
                Err(e) => WireResponse {
                    id: req.id,
                    mask: None,
                    error: Some(e.to_string()),
                },
            },
            Err(e) => WireResponse {
                id: String::new(),
                mask: None,
                error: Some(format!("bad request: {e}")),
            },
        };
        serde_json::to_writer(&mut writer, &response)?;
        writer.write_all(b"\n")?;
        writer.flush()?;
    }
    Ok(())
}

/// An adapter process started with `sh -c <command>`.
pub struct ProcessSegmenter {
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
    counter: u64,
    inline_images: HashMap<String, String>,
}

impl ProcessSegmenter {
    pub fn spawn(command: &str) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Adapter(format!("cannot start {command:?}: {e}")))?;
        let stdin = child.stdin.take();
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self {
            child,
            stdin,
            stdout,
            counter: 0,
            inline_images: HashMap::new(),
        })
    }

    fn image_field(&mut self, request: &SegmentRequest<'_>) -> String {
        let inst = request.instance;
        if let Some(path) = &inst.image {
            return path.display().to_string();
        }
        self.inline_images
            .entry(inst.id.clone())
            .or_insert_with(|| encode_png_base64(&inst.gt))
            .clone()
    }
}

impl Segmenter for ProcessSegmenter {
    fn segment(&mut self, request: &SegmentRequest<'_>) -> Result<BinaryMask> {
        self.counter += 1;
        let id = format!("{}#{}", request.instance.id, self.counter);
        let wire = WireRequest {
            id: id.clone(),
            image: self.image_field(request),
            clicks: request
                .clicks
                .iter()
                .map(|c| WireClick {
                    x: c.x as i64,
                    y: c.y as i64,
                    positive: c.polarity.is_positive(),
                })
                .collect(),
            prev_mask: request.prev_mask.map(rle_encode),
        };
        let mut line = serde_json::to_string(&wire).expect("request serializes");
        line.push('\n');
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| Error::Adapter("adapter stdin closed".into()))?;
        stdin
            .write_all(line.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| Error::Adapter(format!("write to adapter: {e}")))?;

        let mut reply = String::new();
        let n = self
            .stdout
            .read_line(&mut reply)
            .map_err(|e| Error::Adapter(format!("read from adapter: {e}")))?;
        if n == 0 {
            return Err(Error::Adapter("adapter closed its output".into()));
        }
        let resp: WireResponse = serde_json::from_str(&reply)
            .map_err(|e| Error::Adapter(format!("malformed response: {e}")))?;
        if resp.id != id {
            return Err(Error::Adapter(format!(
                "response id {:?} does not match {id:?}",
                resp.id
            )));
        }
        if let Some(err) = resp.error {
            return Err(Error::Adapter(err));
        }
        let runs = resp
            .mask
            .ok_or_else(|| Error::Adapter("response has neither mask nor error".into()))?;
        let (w, h) = request.instance.gt.dims();
        rle_decode(&runs, w, h).map_err(|e| Error::Adapter(e.to_string()))
    }
}

impl Drop for ProcessSegmenter {
    fn drop(&mut self) {
        drop(self.stdin.take());
        let deadline = Instant::now() + Duration::from_secs(2);
        while Instant::now() < deadline {
            match self.child.try_wait() {
                Ok(Some(status)) => {
                    debug!("adapter exited with {status}");
                    return;
                }
                Ok(None) => thread::sleep(Duration::from_millis(10)),
                Err(_) => break,
            }
        }
        warn!("adapter did not exit after its input closed, killing it");
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Spawns one adapter process per worker.
#[derive(Clone, Debug)]
pub struct ProcessSegmenterFactory {
    command: String,
}

impl ProcessSegmenterFactory {
    /// Fails unless the command's program can be found, so a misspelled
    /// adapter is reported before any instance is evaluated.
    pub fn new(command: impl Into<String>) -> Result<Self> {
        let command = command.into();
        let program = command
            .split_whitespace()
            .next()
            .ok_or_else(|| Error::Adapter("empty adapter command".into()))?;
        if resolve_program(program).is_none() {
            return Err(Error::Adapter(format!(
                "adapter program {program:?} not found"
            )));
        }
        Ok(Self { command })
    }

    pub fn command(&self) -> &str {
        &self.command
    }
}

impl SegmenterFactory for ProcessSegmenterFactory {
    fn connect(&self) -> Result<Box<dyn Segmenter>> {
        Ok(Box::new(ProcessSegmenter::spawn(&self.command)?))
    }
}

fn resolve_program(program: &str) -> Option<PathBuf> {
    let program = program.trim_matches(|c| c == '\'' || c == '"');
    if program.contains('/') {
        let p = PathBuf::from(program);
        return p.is_file().then_some(p);
    }
    std::env::var_os("PATH").and_then(|paths| {
        std::env::split_paths(&paths)
            .map(|dir| dir.join(program))
            .find(|p| p.is_file())
    })
}
