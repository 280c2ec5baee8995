//! Pedestrian track annotations and the JSON-lines track format.
//!
//! One line per pedestrian:
//!
//! ```text
//! {"video_id":"video_0001","pedestrian_id":"0_1_3b","frame_rate":30,
//!  "frames":[{"frame":0,"bbox":[x1,y1,x2,y2],"occlusion":0,"looking":0,
//!             "orientation":2,"movement":1,"crossing":0,"image_size":[1920,1080]}, ...]}
//! ```

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self { x1, y1, x2, y2 }
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)
    }

    pub fn is_valid(&self) -> bool {
        [self.x1, self.y1, self.x2, self.y2]
            .iter()
            .all(|v| v.is_finite())
            && self.x2 > self.x1
            && self.y2 > self.y1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImageSize {
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Occlusion {
    None = 0,
    Partial = 1,
    Full = 2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Front = 0,
    Back = 1,
    Left = 2,
    Right = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Movement {
    Standing = 0,
    Moving = 1,
}

impl TryFrom<i64> for Occlusion {
    type Error = Error;
    fn try_from(code: i64) -> Result<Self> {
        match code {
            0 => Ok(Occlusion::None),
            1 => Ok(Occlusion::Partial),
            2 => Ok(Occlusion::Full),
            _ => Err(Error::UnknownCode {
                field: "occlusion",
                code,
            }),
        }
    }
}

impl TryFrom<i64> for Orientation {
    type Error = Error;
    fn try_from(code: i64) -> Result<Self> {
        match code {
            0 => Ok(Orientation::Front),
            1 => Ok(Orientation::Back),
            2 => Ok(Orientation::Left),
            3 => Ok(Orientation::Right),
            _ => Err(Error::UnknownCode {
                field: "orientation",
                code,
            }),
        }
    }
}

impl TryFrom<i64> for Movement {
    type Error = Error;
    fn try_from(code: i64) -> Result<Self> {
        match code {
            0 => Ok(Movement::Standing),
            1 => Ok(Movement::Moving),
            _ => Err(Error::UnknownCode {
                field: "movement",
                code,
            }),
        }
    }
}

fn binary(field: &'static str, code: i64) -> Result<bool> {
    match code {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(Error::UnknownCode { field, code }),
    }
}

/// Annotation of one pedestrian in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub frame_index: u32,
    pub bbox: BBox,
    pub occlusion: Occlusion,
    /// Pedestrian looks at the vehicle.
    pub looking: bool,
    pub orientation: Orientation,
    pub movement: Movement,
    /// Crossing label for this frame.
    pub crossing: bool,
    pub image_size: ImageSize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PedestrianTrack {
    pub video_id: String,
    pub pedestrian_id: String,
    pub frame_rate: u32,
    pub frames: Vec<FrameRecord>,
}

impl PedestrianTrack {
    /// Track length P.
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    frame: u32,
    bbox: [f64; 4],
    occlusion: i64,
    looking: i64,
    orientation: i64,
    movement: i64,
    crossing: i64,
    image_size: [u32; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrack {
    video_id: String,
    pedestrian_id: String,
    frame_rate: u32,
    frames: Vec<RawFrame>,
}

impl RawFrame {
    fn into_record(self) -> Result<FrameRecord> {
        let [x1, y1, x2, y2] = self.bbox;
        let bbox = BBox::new(x1, y1, x2, y2);
        if !bbox.is_valid() {
            return Err(Error::InvalidBox(format!(
                "frame {}: {:?} (need x2 > x1 and y2 > y1)",
                self.frame, self.bbox
            )));
        }
        Ok(FrameRecord {
            frame_index: self.frame,
            bbox,
            occlusion: Occlusion::try_from(self.occlusion)?,
            looking: binary("looking", self.looking)?,
            orientation: Orientation::try_from(self.orientation)?,
            movement: Movement::try_from(self.movement)?,
            crossing: binary("crossing", self.crossing)?,
            image_size: ImageSize {
                width: self.image_size[0],
                height: self.image_size[1],
            },
        })
    }

    fn from_record(r: &FrameRecord) -> Self {
        RawFrame {
            frame: r.frame_index,
            bbox: [r.bbox.x1, r.bbox.y1, r.bbox.x2, r.bbox.y2],
            occlusion: r.occlusion as i64,
            looking: r.looking as i64,
            orientation: r.orientation as i64,
            movement: r.movement as i64,
            crossing: r.crossing as i64,
            image_size: [r.image_size.width, r.image_size.height],
        }
    }
}

fn parse_line(line: &str) -> Result<PedestrianTrack> {
    let raw: RawTrack = serde_json::from_str(line)?;
    let frames = raw
        .frames
        .into_iter()
        .map(RawFrame::into_record)
        .collect::<Result<Vec<_>>>()?;
    if let Some(w) = frames
        .windows(2)
        .find(|w| w[1].frame_index <= w[0].frame_index)
    {
        return Err(Error::InvalidArgument(format!(
            "frame indices not strictly increasing ({} then {})",
            w[0].frame_index, w[1].frame_index
        )));
    }
    Ok(PedestrianTrack {
        video_id: raw.video_id,
        pedestrian_id: raw.pedestrian_id,
        frame_rate: raw.frame_rate,
        frames,
    })
}

/// Parses tracks from any reader. Blank lines are skipped; errors carry the
/// 1-based line number.
pub fn read_tracks<R: BufRead>(reader: R) -> Result<Vec<PedestrianTrack>> {
    let mut tracks = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let track = parse_line(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        tracks.push(track);
    }
    Ok(tracks)
}

/// Reads a JSON-lines track file.
pub fn parse_tracks(path: impl AsRef<Path>) -> Result<Vec<PedestrianTrack>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_tracks(BufReader::new(file))
}

pub fn write_tracks<W: Write>(mut w: W, tracks: &[PedestrianTrack]) -> std::io::Result<()> {
    for t in tracks {
        let raw = RawTrack {
            video_id: t.video_id.clone(),
            pedestrian_id: t.pedestrian_id.clone(),
            frame_rate: t.frame_rate,
            frames: t.frames.iter().map(RawFrame::from_record).collect(),
        };
        serde_json::to_writer(&mut w, &raw)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_tracks(path: impl AsRef<Path>, tracks: &[PedestrianTrack]) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_tracks(&mut w, tracks).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame_json(frame: u32, orientation: i64) -> String {
        format!(
            r#"{{"frame":{frame},"bbox":[10,20,30,80],"occlusion":0,"looking":1,"orientation":{orientation},"movement":1,"crossing":0,"image_size":[1920,1080]}}"#
        )
    }

    fn track_json(video: &str, ped: &str, frames: usize) -> String {
        let fs: Vec<String> = (0..frames).map(|i| frame_json(i as u32, 2)).collect();
        format!(
            r#"{{"video_id":"{video}","pedestrian_id":"{ped}","frame_rate":30,"frames":[{}]}}"#,
            fs.join(",")
        )
    }

    #[test]
    fn two_pedestrians_forty_frames() {
        let text = format!(
            "{}\n{}\n",
            track_json("v1", "p1", 40),
            track_json("v1", "p2", 40)
        );
        let tracks = read_tracks(text.as_bytes()).unwrap();
        assert_eq!(tracks.len(), 2);
        assert!(tracks.iter().all(|t| t.len() == 40));
        assert_eq!(tracks[1].pedestrian_id, "p2");
        let f = &tracks[0].frames[3];
        assert_eq!(f.frame_index, 3);
        assert_eq!(f.orientation, Orientation::Left);
        assert!(f.looking);
        assert_eq!(f.movement, Movement::Moving);
    }

    #[test]
    fn empty_input_is_empty_list() {
        assert!(read_tracks("".as_bytes()).unwrap().is_empty());
        assert!(read_tracks("\n\n".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn unknown_orientation_is_rejected() {
        let line = format!(
            r#"{{"video_id":"v","pedestrian_id":"p","frame_rate":30,"frames":[{}]}}"#,
            frame_json(0, 7)
        );
        let err = read_tracks(format!("{}\n", line).as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown orientation"), "{msg}");
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn malformed_record_names_line() {
        let text = format!("{}\n{{\"video_id\": 3}}\n", track_json("v", "p", 2));
        match read_tracks(text.as_bytes()).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn degenerate_box_rejected() {
        let line = r#"{"video_id":"v","pedestrian_id":"p","frame_rate":30,"frames":[{"frame":0,"bbox":[10,20,10,80],"occlusion":0,"looking":1,"orientation":0,"movement":1,"crossing":0,"image_size":[1920,1080]}]}"#;
        assert!(read_tracks(line.as_bytes()).is_err());
    }

    #[test]
    fn write_then_read() {
        let text = format!("{}\n", track_json("v9", "p3", 5));
        let tracks = read_tracks(text.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_tracks(&mut buf, &tracks).unwrap();
        assert_eq!(read_tracks(buf.as_slice()).unwrap(), tracks);
    }
}
