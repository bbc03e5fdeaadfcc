//! Bundled reference data, compiled into the library.

/// Crop-level consolidation for the 2010-2011 campaign in Puno.
pub const PUNO_BY_CROP: &str = include_str!("../../../fixtures/puno_2010_2011_by_crop.csv");

/// Province-level consolidation for Puno, 2011.
pub const PUNO_BY_PROVINCE: &str = include_str!("../../../fixtures/puno_2011_by_province.csv");

/// Rate metadata for the two tables above.
pub const RATES_JSON: &str = include_str!("../../../fixtures/rates.json");

/// 240 months of insured area simulated from the airline model with
/// θ = 0.89, Θ = 0.92, σ = 10, s = 12, seed 7, level 5000.
pub const SIMULATED_AIRLINE: &str = include_str!("../../../fixtures/simulated_airline_240.csv");
