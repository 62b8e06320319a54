//! Signature features of one skeleton clip: preprocessing, pathlet
//! enumeration, the block layout and the width of every block.
//!
//! `cargo run --release --example skeleton_features`

use skelsig::skeleton::synthetic::{generate, SyntheticConfig};
use skelsig::skeleton::{prepare_body, prepare_clip, BlockKind, Centering, FeatureConfig, FeatureExtractor};

fn main() -> skelsig::Result<()> {
    let data = generate(&SyntheticConfig { train_per_class: 1, test_per_class: 0, ..Default::default() })?;
    let clip = &data.train[0];
    println!(
        "clip `{}`: {} frames, {} joints, {}D, class {}",
        clip.id,
        clip.frames(),
        clip.joints(),
        clip.dims(),
        data.descriptor.class_names[clip.label.unwrap_or(0)]
    );

    let body = prepare_body(&prepare_clip(clip, Centering::Clip), 1)?;
    for (name, config) in [
        ("defaults", FeatureConfig::default()),
        ("dyadic temporal windows", FeatureConfig { dpsf: true, ..FeatureConfig::default() }),
    ] {
        let ex = FeatureExtractor::new(&config, &data.descriptor)?;
        let dims = ex.dimensions();
        println!("\n{name}:");
        println!("  D_sj {}  D_SP {}  D_ST {}  D_S {}", dims.joints, dims.pairs, dims.triples, dims.spatial);
        println!("  D_TJ {}  D_TS {}  D_T {}  D {}", dims.temporal_joints, dims.temporal_spatial, dims.temporal, dims.total);
        let layout = ex.layout();
        for kind in BlockKind::ALL {
            println!("  {kind:<8} total width {}", layout.width(kind));
        }
        let v = ex.extract(&body)?;
        let nonzero = v.values.iter().filter(|&&x| x != 0.0).count();
        println!("  extracted {} values ({nonzero} nonzero)", v.values.len());
    }
    Ok(())
}
