use serde::{Deserialize, Serialize};

/// Integrator and subdivision settings; copied into every certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// Taylor order.
    pub order: usize,
    /// Bound on the Lagrange remainder of an accepted step.
    pub tol: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Bisection depth cap for covering checks and box subdivision.
    pub max_subdiv_depth: u32,
    /// Attempts at inflating a rough enclosure before the step is halved.
    pub rough_attempts: u32,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            order: 20,
            tol: 1e-16,
            h_min: 1e-4,
            h_max: 1.0,
            max_subdiv_depth: 12,
            rough_attempts: 8,
        }
    }
}
