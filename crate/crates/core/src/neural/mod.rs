//! Feed-forward tanh towers, interaction functions, analytic backprop and SGD.
//!
//! Layer `l` maps `h_{l−1}` to `h_l = tanh(W_l h_{l−1} + b_l)` with `h_0`
//! the (sparse) bag-of-words input. Gradients are of `Δ = ½(Q − y)²` and
//! are produced from `dq = ∂Δ/∂Q = Q − y`:
//!
//! ```text
//! δ_L     = ∂Δ/∂h_L ⊙ (1 − h_L) ⊙ (1 + h_L)
//! δ_{l−1} = W_lᵀ δ_l ⊙ (1 − h_{l−1}) ⊙ (1 + h_{l−1})
//! ∂Δ/∂W_l = δ_l h_{l−1}ᵀ,   ∂Δ/∂b_l = δ_l
//! ```

pub mod checkpoint;
mod drrn;
mod interaction;
mod layer;
mod matrix;
mod mlp;

pub use drrn::{DrrnNet, DrrnShape, DrrnTrace};
pub use interaction::{Interaction, InteractionKind};
pub use layer::{
    flatten_params, param_mut, sgd_step, Dense, Gradients, LayerGrad, Parameters, Tower,
    INIT_RANGE,
};
pub use matrix::{dot, Matrix, SparseVec};
pub use mlp::{Mlp, MlpTrace};
