//! Track preprocessing: frame-rate normalization, training-set filtering and
//! bounding-box geometry.

use log::debug;
use serde::{Deserialize, Serialize};

use super::track::{BBox, ImageSize, Occlusion, PedestrianTrack};
use crate::error::{Error, Result};

/// Default minimum box height kept in the training split, in pixels.
pub const DEFAULT_MIN_HEIGHT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl std::str::FromStr for Split {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(Error::InvalidArgument(format!(
                "unknown split `{other}` (train, val, test)"
            ))),
        }
    }
}

/// Brings 60 fps tracks down to 30 fps by keeping every second frame.
pub fn downsample_track(track: &PedestrianTrack) -> Result<PedestrianTrack> {
    match track.frame_rate {
        30 => Ok(track.clone()),
        60 => Ok(PedestrianTrack {
            frame_rate: 30,
            frames: track.frames.iter().step_by(2).cloned().collect(),
            ..track.clone()
        }),
        other => Err(Error::UnsupportedFrameRate(other)),
    }
}

/// Drops fully occluded frames and frames whose raw box is shorter than
/// `min_height`. Only the training split is filtered; other splits pass
/// through untouched.
pub fn filter_training_track(
    track: &PedestrianTrack,
    split: Split,
    min_height: f64,
) -> PedestrianTrack {
    if split != Split::Train {
        return track.clone();
    }
    PedestrianTrack {
        frames: track
            .frames
            .iter()
            .filter(|f| f.occlusion != Occlusion::Full && f.bbox.height() >= min_height)
            .cloned()
            .collect(),
        ..track.clone()
    }
}

/// Applies downsampling and split-dependent filtering to a whole split,
/// dropping tracks that end up empty.
pub fn prepare_tracks(
    tracks: &[PedestrianTrack],
    split: Split,
    min_height: f64,
) -> Result<Vec<PedestrianTrack>> {
    let mut out = Vec::with_capacity(tracks.len());
    let mut dropped = 0usize;
    for t in tracks {
        let t = filter_training_track(&downsample_track(t)?, split, min_height);
        if t.is_empty() {
            dropped += 1;
        } else {
            out.push(t);
        }
    }
    if dropped > 0 {
        debug!("{dropped} {split:?} tracks emptied by filtering and dropped");
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareBox {
    pub bbox: BBox,
    /// The square did not fit in the image and was shrunk to its smaller side.
    pub shrunk: bool,
}

fn place(center: f64, side: f64, limit: f64) -> f64 {
    (center - side / 2.0).clamp(0.0, limit - side)
}

/// Squares a box around its center with side `max(width, height)`. Boxes
/// crossing an image border are shifted inward; the side shrinks only when it
/// exceeds the image's smaller dimension.
pub fn square_bbox(bbox: BBox, image: ImageSize) -> Result<SquareBox> {
    if !bbox.is_valid() {
        return Err(Error::InvalidBox(format!("{bbox:?}")));
    }
    if image.width == 0 || image.height == 0 {
        return Err(Error::InvalidArgument("zero image dimension".into()));
    }
    let (w, h) = (image.width as f64, image.height as f64);
    let mut side = bbox.width().max(bbox.height());
    let shrunk = side > w.min(h);
    if shrunk {
        side = w.min(h);
    }
    let (cx, cy) = bbox.center();
    let x1 = place(cx, side, w);
    let y1 = place(cy, side, h);
    Ok(SquareBox {
        bbox: BBox::new(x1, y1, x1 + side, y1 + side),
        shrunk,
    })
}

/// Box center divided by image width and height.
pub fn normalize_center(bbox: BBox, image: ImageSize) -> Result<(f64, f64)> {
    if image.width == 0 || image.height == 0 {
        return Err(Error::InvalidArgument("zero image dimension".into()));
    }
    let (cx, cy) = bbox.center();
    Ok((cx / image.width as f64, cy / image.height as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::track::{FrameRecord, Movement, Orientation};
    use proptest::prelude::*;

    const HD: ImageSize = ImageSize {
        width: 1920,
        height: 1080,
    };

    fn frame(i: u32, height: f64, occlusion: Occlusion) -> FrameRecord {
        FrameRecord {
            frame_index: i,
            bbox: BBox::new(100.0, 100.0, 130.0, 100.0 + height),
            occlusion,
            looking: false,
            orientation: Orientation::Front,
            movement: Movement::Standing,
            crossing: false,
            image_size: HD,
        }
    }

    fn track(fps: u32, p: usize) -> PedestrianTrack {
        PedestrianTrack {
            video_id: "v".into(),
            pedestrian_id: "p".into(),
            frame_rate: fps,
            frames: (0..p)
                .map(|i| frame(i as u32, 80.0, Occlusion::None))
                .collect(),
        }
    }

    #[test]
    fn downsample_sixty_to_thirty() {
        let t = downsample_track(&track(60, 40)).unwrap();
        assert_eq!(t.frame_rate, 30);
        assert_eq!(t.len(), 20);

        let t = downsample_track(&track(60, 41)).unwrap();
        assert_eq!(t.len(), 21);
        let kept: Vec<u32> = t.frames.iter().map(|f| f.frame_index).collect();
        assert_eq!(kept, (0..=40).step_by(2).collect::<Vec<_>>());
    }

    #[test]
    fn downsample_thirty_is_identity() {
        let t = track(30, 40);
        assert_eq!(downsample_track(&t).unwrap(), t);
    }

    #[test]
    fn downsample_rejects_other_rates() {
        assert!(matches!(
            downsample_track(&track(25, 4)),
            Err(Error::UnsupportedFrameRate(25))
        ));
    }

    #[test]
    fn downsample_idempotent_after_first() {
        let once = downsample_track(&track(60, 37)).unwrap();
        assert_eq!(downsample_track(&once).unwrap(), once);
    }

    #[test]
    fn height_filter_threshold() {
        let mut t = track(30, 0);
        t.frames = vec![
            frame(0, 40.0, Occlusion::None),
            frame(1, 60.0, Occlusion::None),
            frame(2, 80.0, Occlusion::None),
        ];
        let f = filter_training_track(&t, Split::Train, DEFAULT_MIN_HEIGHT);
        let heights: Vec<f64> = f.frames.iter().map(|r| r.bbox.height()).collect();
        assert_eq!(heights, vec![60.0, 80.0]);
    }

    #[test]
    fn fully_occluded_track_empties() {
        let mut t = track(30, 0);
        t.frames = (0..5).map(|i| frame(i, 200.0, Occlusion::Full)).collect();
        assert!(filter_training_track(&t, Split::Train, 50.0).is_empty());
    }

    #[test]
    fn partial_occlusion_kept() {
        let mut t = track(30, 0);
        t.frames = vec![frame(0, 200.0, Occlusion::Partial)];
        assert_eq!(filter_training_track(&t, Split::Train, 50.0).len(), 1);
    }

    #[test]
    fn other_splits_unchanged() {
        let mut t = track(30, 0);
        t.frames = vec![
            frame(0, 10.0, Occlusion::Full),
            frame(1, 20.0, Occlusion::None),
        ];
        assert_eq!(filter_training_track(&t, Split::Val, 50.0), t);
        assert_eq!(filter_training_track(&t, Split::Test, 50.0), t);
    }

    #[test]
    fn prepare_drops_empty_tracks() {
        let mut small = track(60, 0);
        small.frames = vec![frame(0, 10.0, Occlusion::None)];
        let out = prepare_tracks(&[small.clone(), track(60, 10)], Split::Train, 50.0).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].len(), 5);
        assert_eq!(
            prepare_tracks(&[small], Split::Test, 50.0).unwrap().len(),
            1
        );
    }

    #[test]
    fn square_centered() {
        let b = BBox::new(450.0, 400.0, 550.0, 600.0);
        let s = square_bbox(b, HD).unwrap();
        assert!(!s.shrunk);
        assert_eq!(s.bbox, BBox::new(400.0, 400.0, 600.0, 600.0));
        assert_eq!(s.bbox.center(), (500.0, 500.0));
    }

    #[test]
    fn square_identity() {
        let b = BBox::new(10.0, 20.0, 110.0, 120.0);
        assert_eq!(square_bbox(b, HD).unwrap().bbox, b);
    }

    /// Among all in-bounds placements of the square, picks the one whose
    /// center is nearest the original center, scanning on a fine grid.
    fn brute_force_placement(center: f64, side: f64, limit: f64) -> f64 {
        let steps = (limit * 4.0) as usize;
        (0..=steps)
            .map(|k| k as f64 / 4.0)
            .filter(|x1| x1 + side <= limit)
            .min_by(|a, b| {
                let da = (a + side / 2.0 - center).abs();
                let db = (b + side / 2.0 - center).abs();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap()
    }

    #[test]
    fn square_touching_left_edge_shifts_right() {
        let b = BBox::new(0.0, 400.0, 100.0, 600.0);
        let s = square_bbox(b, HD).unwrap();
        assert!(!s.shrunk);
        assert_eq!(s.bbox.width(), 200.0);
        assert_eq!(s.bbox.height(), 200.0);
        assert_eq!(s.bbox.x1, brute_force_placement(50.0, 200.0, 1920.0));
        assert_eq!(s.bbox.x1, 0.0);
        assert_eq!(s.bbox.center(), (100.0, 500.0));
    }

    #[test]
    fn square_too_large_is_shrunk() {
        let b = BBox::new(100.0, 0.0, 200.0, 1080.0);
        let img = ImageSize {
            width: 1920,
            height: 800,
        };
        let s = square_bbox(b, img).unwrap();
        assert!(s.shrunk);
        assert_eq!(s.bbox.width(), 800.0);
        assert!(s.bbox.y1 >= 0.0 && s.bbox.y2 <= 800.0);
    }

    #[test]
    fn centers_normalize() {
        let at = |x: f64, y: f64| BBox::new(x - 1.0, y - 1.0, x + 1.0, y + 1.0);
        assert_eq!(normalize_center(at(960.0, 540.0), HD).unwrap(), (0.5, 0.5));
        assert_eq!(normalize_center(at(0.0, 0.0), HD).unwrap(), (0.0, 0.0));
        assert_eq!(
            normalize_center(at(1920.0, 1080.0), HD).unwrap(),
            (1.0, 1.0)
        );
        let zero = ImageSize {
            width: 0,
            height: 10,
        };
        assert!(normalize_center(at(1.0, 1.0), zero).is_err());
    }

    proptest! {
        #[test]
        fn square_matches_bounds_oracle(
            x in 0.0f64..1800.0, y in 0.0f64..1000.0,
            w in 1.0f64..400.0, h in 1.0f64..400.0,
        ) {
            let x = x.round(); let y = y.round(); let w = w.round().max(1.0); let h = h.round().max(1.0);
            let b = BBox::new(x, y, (x + w).min(1920.0), (y + h).min(1080.0));
            prop_assume!(b.is_valid());
            let s = square_bbox(b, HD).unwrap();
            let side = b.width().max(b.height());
            prop_assert!(!s.shrunk);
            prop_assert!((s.bbox.width() - side).abs() < 1e-9);
            prop_assert!((s.bbox.height() - side).abs() < 1e-9);
            prop_assert!(s.bbox.x1 >= 0.0 && s.bbox.x2 <= 1920.0);
            prop_assert!(s.bbox.y1 >= 0.0 && s.bbox.y2 <= 1080.0);
            let (cx, cy) = b.center();
            prop_assert_eq!(s.bbox.x1, brute_force_placement(cx, side, 1920.0));
            prop_assert_eq!(s.bbox.y1, brute_force_placement(cy, side, 1080.0));
        }

        #[test]
        fn filter_idempotent(heights in proptest::collection::vec((0.0f64..120.0, 0u8..3), 0..30)) {
            let mut t = track(30, 0);
            t.frames = heights.iter().enumerate().map(|(i, &(h, o))| {
                let occ = Occlusion::try_from(o as i64).unwrap();
                frame(i as u32, h.max(0.5), occ)
            }).collect();
            let once = filter_training_track(&t, Split::Train, 50.0);
            prop_assert_eq!(filter_training_track(&once, Split::Train, 50.0), once);
        }

        #[test]
        fn normalized_center_in_unit_square(
            x1 in 0.0f64..1919.0, y1 in 0.0f64..1079.0, dw in 0.1f64..1920.0, dh in 0.1f64..1080.0,
        ) {
            let b = BBox::new(x1, y1, (x1 + dw).min(1920.0), (y1 + dh).min(1080.0));
            prop_assume!(b.is_valid());
            let (u, v) = normalize_center(b, HD).unwrap();
            prop_assert!((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v));
        }
    }
}
