//! Physical constants in the crate's unit system (μeV, ps, T).

/// Reduced Planck constant, μeV·ps.
pub const HBAR: f64 = 658.2119569;

/// Bohr magneton, μeV/T.
pub const MU_B: f64 = 57.88;

/// Immutable bundle of the unit-system constants, for code that wants to
/// carry them explicitly rather than reference the module consts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    /// μeV·ps
    pub hbar: f64,
    /// μeV/T
    pub mu_b: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: HBAR, mu_b: MU_B }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_matches_module_consts() {
        let c = PhysicalConstants::default();
        assert_eq!(c.hbar, HBAR);
        assert_eq!(c.mu_b, MU_B);
    }
}
