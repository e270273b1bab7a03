//! Multi-scale analysis ingredients: parameters, scale schedules, cube
//! classification, singular-cube counting and mass updates.

pub mod classify;
pub mod counting;
pub mod mass;
pub mod params;
pub mod schedule;

pub use classify::{
    classify, cube_eigenvalues, energy_grid, is_cnr, is_resonant, is_singular, is_tunnelling,
    resonance_width, singularity, ClassificationRecord, CnrReport, CnrVerdict, ResonanceSet, ScanMode,
};
pub use counting::{count_singular_subcubes, CountOptions, CountReport, SubcubeKind};
pub use mass::{ndrons_mass, next_mass_lower_bound, NdronsMass};
pub use params::{EnergyInterval, MsaParameters};
pub use schedule::{length_schedule, mass_schedule, MsaSchedule};
