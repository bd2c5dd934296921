use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fire::FireModuleSpec;
use super::xception::{ENTRY_MODULES, MIDDLE_MODULES};
use super::ZooError;

/// Exit-flow filter counts: block13's two separable convs (its residual
/// projection matches the second), then block14's two separable convs.
pub const XCEPTION_EXIT_FILTERS: [usize; 4] = [728, 1024, 1536, 2048];

/// Default fire modules for the three residual Entry-flow modules.
///
/// Each module keeps its original output width (128/256/728) so the
/// residual projections and everything downstream keep their shapes, while
/// the 3x3 expand sees fewer channels than the module's input.
pub const DEFAULT_ENTRY_FIRE: [FireModuleSpec; 3] = [
    FireModuleSpec::new(32, 48, 128),
    FireModuleSpec::new(64, 96, 256),
    FireModuleSpec::new(128, 192, 728),
];

/// Default fire module for each of the eight Middle-flow modules. With the
/// entry specs above and 101 classes this gives 15,830,533 parameters.
pub const DEFAULT_MIDDLE_FIRE: FireModuleSpec = FireModuleSpec::new(384, 672, 728);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizedConfig {
    pub entry_fire: Vec<FireModuleSpec>,
    pub middle_fire: Vec<FireModuleSpec>,
    #[serde(default = "default_exit")]
    pub exit_filters: [usize; 4],
}

fn default_exit() -> [usize; 4] {
    XCEPTION_EXIT_FILTERS
}

impl Default for OptimizedConfig {
    fn default() -> Self {
        Self {
            entry_fire: DEFAULT_ENTRY_FIRE.to_vec(),
            middle_fire: vec![DEFAULT_MIDDLE_FIRE; MIDDLE_MODULES.len()],
            exit_filters: XCEPTION_EXIT_FILTERS,
        }
    }
}

impl OptimizedConfig {
    pub fn validate(&self) -> Result<(), ZooError> {
        if self.entry_fire.len() != ENTRY_MODULES.len() {
            return Err(ZooError::InvalidConfig(format!(
                "entry_fire needs {} specs, got {}",
                ENTRY_MODULES.len(),
                self.entry_fire.len()
            )));
        }
        if self.middle_fire.len() != MIDDLE_MODULES.len() {
            return Err(ZooError::InvalidConfig(format!(
                "middle_fire needs {} specs, got {}",
                MIDDLE_MODULES.len(),
                self.middle_fire.len()
            )));
        }
        if self.exit_filters.contains(&0) {
            return Err(ZooError::InvalidConfig("exit_filters must be >= 1".into()));
        }
        for (key, spec) in self.fire_specs() {
            spec.check(&key)?;
        }
        Ok(())
    }

    /// Specs keyed by the module tag they apply to.
    pub fn fire_specs(&self) -> BTreeMap<String, FireModuleSpec> {
        ENTRY_MODULES
            .iter()
            .zip(&self.entry_fire)
            .chain(MIDDLE_MODULES.iter().zip(&self.middle_fire))
            .map(|(key, spec)| (key.to_string(), *spec))
            .collect()
    }
}
