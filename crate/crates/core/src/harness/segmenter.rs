use super::run::Instance;
use crate::clicks::Click;
use crate::error::Result;
use crate::imaging::BinaryMask;

pub struct SegmentRequest<'a> {
    pub instance: &'a Instance,
    /// Full click history, oldest first.
    pub clicks: &'a [Click],
    pub prev_mask: Option<&'a BinaryMask>,
}

/// An interactive segmentation method.
pub trait Segmenter {
    fn segment(&mut self, request: &SegmentRequest<'_>) -> Result<BinaryMask>;
}

/// Creates one segmenter per worker.
pub trait SegmenterFactory: Sync {
    fn connect(&self) -> Result<Box<dyn Segmenter>>;
}

impl<F> SegmenterFactory for F
where
    F: Fn() -> Result<Box<dyn Segmenter>> + Sync,
{
    fn connect(&self) -> Result<Box<dyn Segmenter>> {
        self()
    }
}

/// Returns the ground truth on any click.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleSegmenter;

impl Segmenter for OracleSegmenter {
    fn segment(&mut self, request: &SegmentRequest<'_>) -> Result<BinaryMask> {
        Ok(request.instance.gt.clone())
    }
}

/// Never predicts anything.
#[derive(Clone, Copy, Debug, Default)]
pub struct EmptySegmenter;

impl Segmenter for EmptySegmenter {
    fn segment(&mut self, request: &SegmentRequest<'_>) -> Result<BinaryMask> {
        let (w, h) = request.instance.gt.dims();
        Ok(BinaryMask::new(w, h))
    }
}

/// Union of radius-`r` disks around positive clicks minus the disks around
/// negative clicks.
pub fn disk_segmenter(
    clicks: &[Click],
    (width, height): (usize, usize),
    radius: f64,
) -> BinaryMask {
    let r2 = radius * radius;
    let mut pos = BinaryMask::new(width, height);
    let mut neg = BinaryMask::new(width, height);
    let reach = radius.floor() as i64;
    for c in clicks {
        let target = if c.polarity.is_positive() {
            &mut pos
        } else {
            &mut neg
        };
        let (cx, cy) = (c.x as i64, c.y as i64);
        for y in (cy - reach).max(0)..=(cy + reach).min(height as i64 - 1) {
            for x in (cx - reach).max(0)..=(cx + reach).min(width as i64 - 1) {
                let d2 = ((x - cx).pow(2) + (y - cy).pow(2)) as f64;
                if d2 <= r2 {
                    target.set(x as usize, y as usize, true);
                }
            }
        }
    }
    pos.and_not(&neg).expect("same dims")
}

#[derive(Clone, Copy, Debug)]
pub struct DiskSegmenter {
    pub radius: f64,
}

impl Segmenter for DiskSegmenter {
    fn segment(&mut self, request: &SegmentRequest<'_>) -> Result<BinaryMask> {
        Ok(disk_segmenter(
            request.clicks,
            request.instance.gt.dims(),
            self.radius,
        ))
    }
}
