//! Writes a synthetic dataset in the on-disk formats read by the `skelsig`
//! binary: a descriptor, one clip file per clip and a manifest.
//!
//! `cargo run --example export_dataset -- <out-dir>` then, for example,
//! `skelsig features extract --manifest <out-dir>/manifest.csv
//!  --descriptor <out-dir>/skeleton.desc --out <out-dir>/features`

use std::fs;
use std::path::PathBuf;

use skelsig::cli::{write_clip_file, write_descriptor};
use skelsig::skeleton::synthetic::{generate, SyntheticConfig};

fn main() -> skelsig::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "synthetic-data".into()));
    let data = generate(&SyntheticConfig::default())?;
    let clips = out.join("clips");
    fs::create_dir_all(&clips).map_err(|e| skelsig::Error::Io { path: clips.clone(), source: e })?;
    write_descriptor(&out.join("skeleton.desc"), &data.descriptor)?;
    let mut manifest = String::from("# clip,label,split,actors\n");
    for (split, set) in [("train", &data.train), ("test", &data.test)] {
        for clip in set {
            let name = format!("clips/{}.csv", clip.id);
            write_clip_file(&out.join(&name), clip)?;
            let label = &data.descriptor.class_names[clip.label.unwrap_or(0)];
            manifest.push_str(&format!("{name},{label},{split},{}\n", clip.actors()));
        }
    }
    let path = out.join("manifest.csv");
    fs::write(&path, manifest).map_err(|e| skelsig::Error::Io { path, source: e })?;
    println!(
        "wrote {} train and {} test clips to {}",
        data.train.len(),
        data.test.len(),
        out.display()
    );
    Ok(())
}
