//! Static resource analysis: parameters, MACs, activation sizes and a
//! modeled memory footprint.

mod cost;
mod memory;
mod params;

pub use cost::{activation_sizes, flops_estimate};
pub use memory::{memory_estimate, MemoryAssumptions, MemoryEstimate, Mode, Optimizer, BYTES_PER_SCALAR};
pub use params::{
    count_params, count_params_layer, format_millions, tenths_of_million, LayerParams,
    ParamReport, BATCHNORM_PARAMS_PER_CHANNEL, BATCHNORM_TRAINABLE_PER_CHANNEL,
};
