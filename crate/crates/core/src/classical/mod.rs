//! Symbolic dynamics of open baker maps: trapped sets, box dimension,
//! Birkhoff averages, topological pressure and rate functions.
//!
//! For these self-similar repellers the box and Hausdorff dimensions
//! coincide, so the box-counting estimate also answers Hausdorff-dimension
//! criteria.

mod map;
mod pressure;
mod rate;
mod trapped;
mod words;

pub use map::{DampingField, OpenMapSpec};
pub use pressure::{closed_form_pressure, pressure, pressure_with_cap, PressureEstimate, PressureMethod};
pub use rate::{
    birkhoff_average, rate_function, rate_function_empirical, rate_function_legendre, RateFunction,
    RateMethod, DEFAULT_EMPIRICAL_HORIZON,
};
pub use trapped::{
    box_dimension, trapped_set_sample, trapped_set_sample_with_cap, DimensionEstimate, Direction, Rect,
    TrappedSetSample, DEFAULT_CELL_CAP,
};
pub use words::DEFAULT_WORD_CAP;
