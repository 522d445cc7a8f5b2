//! Forward-pass inference for the map-completion network and its weight
//! file format.

pub mod codec;
pub mod layers;
pub mod model;
pub mod tensor;

pub use codec::{load_weights, save_weights};
pub use layers::{conv2d, transposed_conv2d, Layer, LayerKind, LayerSpec};
pub use model::{standard_layout, LearnedPredictor, PredictorWeights};
pub use tensor::Tensor;
