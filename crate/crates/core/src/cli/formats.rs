//! Text formats read by the command line.
//!
//! - path files: one sample per line, comma-separated coordinates;
//! - clip files: `frame,actor,joint,x,y[,z]` rows sorted by `(frame, actor, joint)`;
//! - manifests: `clip path,label name,split,actor count` per line;
//! - descriptors: `key = value` lines (`joints`, `dims`, `priority`, `mirror`,
//!   `horizontal_axis`, `classes`).
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sigcore::DiscretePath;
use crate::skeleton::{DatasetDescriptor, SkeletonClip};

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file))
}

fn csv_records(path: &Path) -> Result<Vec<(u64, Vec<String>)>> {
    let mut out = Vec::new();
    for rec in reader(path)?.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line());
            Error::format(path, line, e.to_string())
        })?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line());
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(path: &Path, line: u64, field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::format(path, Some(line), format!("`{field}` is not a valid {what}")))
}

/// Reads a path file; the dimension comes from the first sample.
pub fn read_path_file(path: &Path) -> Result<DiscretePath> {
    let rows = csv_records(path)?;
    let Some((_, first)) = rows.first() else {
        return Err(Error::format(path, None, "path file has no samples"));
    };
    let dim = first.len();
    let mut coords = Vec::with_capacity(rows.len() * dim);
    for (line, fields) in &rows {
        if fields.len() != dim {
            return Err(Error::format(
                path,
                Some(*line),
                format!("expected {dim} coordinates, found {}", fields.len()),
            ));
        }
        for f in fields {
            let v: f64 = parse_num(path, *line, f, "number")?;
            if !v.is_finite() {
                return Err(Error::format(path, Some(*line), "non-finite coordinate"));
            }
            coords.push(v);
        }
    }
    DiscretePath::new(dim, coords)
}

/// Reads a clip file. The actor count is the larger of `min_actors` and the
/// highest actor index present plus one; missing rows are invalid entries.
pub fn read_clip_file(path: &Path, descriptor: &DatasetDescriptor, min_actors: usize) -> Result<SkeletonClip> {
    let rows = csv_records(path)?;
    let (n, d) = (descriptor.joints, descriptor.dims);
    let mut parsed = Vec::with_capacity(rows.len());
    let mut prev: Option<(usize, usize, usize)> = None;
    for (line, fields) in &rows {
        if fields.len() != 3 + d {
            return Err(Error::format(
                path,
                Some(*line),
                format!("expected {} fields (frame, actor, joint, {d} coordinates), found {}", 3 + d, fields.len()),
            ));
        }
        let key: (usize, usize, usize) = (
            parse_num(path, *line, &fields[0], "frame index")?,
            parse_num(path, *line, &fields[1], "actor index")?,
            parse_num(path, *line, &fields[2], "joint index")?,
        );
        if key.2 >= n {
            return Err(Error::format(path, Some(*line), format!("joint {} out of range (N = {n})", key.2)));
        }
        if prev.is_some_and(|p| p >= key) {
            return Err(Error::format(path, Some(*line), "rows are not sorted by (frame, actor, joint) or repeat an entry"));
        }
        prev = Some(key);
        let mut xyz = Vec::with_capacity(d);
        for f in &fields[3..] {
            let v: f64 = parse_num(path, *line, f, "coordinate")?;
            if !v.is_finite() {
                return Err(Error::format(path, Some(*line), "non-finite coordinate"));
            }
            xyz.push(v);
        }
        parsed.push((key, xyz));
    }
    if parsed.is_empty() {
        return Err(Error::format(path, None, "clip file has no rows"));
    }
    let frames = parsed.iter().map(|((f, _, _), _)| f + 1).max().unwrap_or(1);
    let actors = parsed
        .iter()
        .map(|((_, a, _), _)| a + 1)
        .max()
        .unwrap_or(1)
        .max(min_actors.max(1));
    let mut coords = vec![0.0; frames * actors * n * d];
    let mut valid = vec![false; frames * actors * n];
    for ((f, a, j), xyz) in parsed {
        let e = (f * actors + a) * n + j;
        valid[e] = true;
        coords[e * d..(e + 1) * d].copy_from_slice(&xyz);
    }
    let id = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    SkeletonClip::new(id, [frames, actors, n, d], coords, valid)
}

/// Writes a clip in the clip-file format, valid entries only.
pub fn write_clip_file(path: &Path, clip: &SkeletonClip) -> Result<()> {
    let mut text = String::new();
    for f in 0..clip.frames() {
        for a in 0..clip.actors() {
            for j in 0..clip.joints() {
                if !clip.is_valid(f, a, j) {
                    continue;
                }
                text.push_str(&format!("{f},{a},{j}"));
                for v in clip.joint(f, a, j) {
                    text.push_str(&format!(",{v}"));
                }
                text.push('\n');
            }
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRecord {
    pub clip: PathBuf,
    pub label: usize,
    pub split: Split,
    pub actors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub records: Vec<ManifestRecord>,
}

impl DatasetManifest {
    /// Clip paths are resolved against the manifest's directory.
    pub fn read(path: &Path, descriptor: &DatasetDescriptor) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new("."));
        let mut records = Vec::new();
        for (line, fields) in csv_records(path)? {
            if fields.len() != 4 {
                return Err(Error::format(path, Some(line), format!("expected 4 fields, found {}", fields.len())));
            }
            let label = descriptor
                .class_names
                .iter()
                .position(|c| c == &fields[1])
                .ok_or_else(|| Error::format(path, Some(line), format!("unknown class `{}`", fields[1])))?;
            let split = match fields[2].as_str() {
                "train" => Split::Train,
                "test" => Split::Test,
                other => return Err(Error::format(path, Some(line), format!("split must be train or test, got `{other}`"))),
            };
            records.push(ManifestRecord {
                clip: base.join(&fields[0]),
                label,
                split,
                actors: parse_num(path, line, &fields[3], "actor count")?,
            });
        }
        Ok(Self { records })
    }

    /// Loads the labelled clips of one split, in manifest order.
    pub fn load_split(&self, split: Split, descriptor: &DatasetDescriptor) -> Result<Vec<SkeletonClip>> {
        self.records
            .iter()
            .filter(|r| r.split == split)
            .map(|r| Ok(read_clip_file(&r.clip, descriptor, r.actors)?.with_label(r.label)))
            .collect()
    }
}

fn parse_list(path: &Path, line: u64, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|s| parse_num(path, line, s.trim(), "joint index"))
        .collect()
}

pub fn read_descriptor(path: &Path) -> Result<DatasetDescriptor> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (mut joints, mut dims, mut priority, mut mirror, mut axis, mut classes) =
        (None, None, None, None, 0usize, None);
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (key, value) = l
            .split_once('=')
            .ok_or_else(|| Error::format(path, Some(line), "expected `key = value`"))?;
        let value = value.trim();
        match key.trim() {
            "joints" => joints = Some(parse_num(path, line, value, "joint count")?),
            "dims" => dims = Some(parse_num(path, line, value, "dimension")?),
            "priority" => priority = Some(parse_list(path, line, value)?),
            "mirror" => mirror = Some(parse_list(path, line, value)?),
            "horizontal_axis" => axis = parse_num(path, line, value, "axis")?,
            "classes" => classes = Some(value.split(',').map(|s| s.trim().to_string()).collect()),
            other => return Err(Error::format(path, Some(line), format!("unknown key `{other}`"))),
        }
    }
    let missing = |k: &str| Error::format(path, None, format!("missing key `{k}`"));
    let joints: usize = joints.ok_or_else(|| missing("joints"))?;
    let desc = DatasetDescriptor {
        joints,
        dims: dims.ok_or_else(|| missing("dims"))?,
        priority: priority.unwrap_or_else(|| (0..joints).collect()),
        mirror: mirror.unwrap_or_else(|| (0..joints).collect()),
        horizontal_axis: axis,
        class_names: classes.ok_or_else(|| missing("classes"))?,
    };
    desc.validate()
        .map_err(|e| Error::format(path, None, e.to_string()))?;
    Ok(desc)
}

pub fn write_descriptor(path: &Path, d: &DatasetDescriptor) -> Result<()> {
    let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let text = format!(
        "joints = {}\ndims = {}\npriority = {}\nmirror = {}\nhorizontal_axis = {}\nclasses = {}\n",
        d.joints,
        d.dims,
        list(&d.priority),
        list(&d.mirror),
        d.horizontal_axis,
        d.class_names.join(",")
    );
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
