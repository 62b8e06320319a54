//! Single-hidden-layer linear network with dropconnect on the input layer,
//! its momentum-SGD training loop, and the body-count two-stage composition.

mod model;
mod train;
mod two_stage;

pub use model::{softmax, DropMask, LinearNetModel, MODEL_MAGIC, MODEL_VERSION};
pub use train::{
    gradient_check, loss_and_gradients, lr_schedule, train, EpochStats, Gradients, TrainConfig,
    TrainOutcome,
};
pub use two_stage::{
    rank_actors, stage_partition, train_two_stage, two_stage_predict, BodyCountTable, Stage,
    StageModel, TwoStageModel, TwoStagePrediction, MULTI_BODY_THRESHOLD,
};
