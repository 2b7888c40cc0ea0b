//! Published figures that the models reproduce only partially or not at all.
//!
//! Each entry pairs the reported value with what the implemented formula
//! gives for the same stated inputs. The CLI prints these with `--ledger`.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Discrepancy {
    pub id: &'static str,
    pub quantity: &'static str,
    pub reported: &'static str,
    pub computed: &'static str,
    pub note: &'static str,
}

pub const LIGHT_PEAK_RATE: Discrepancy = Discrepancy {
    id: "light-peak-rate",
    quantity: "maximum growth speed, light environment",
    reported: "0.91 mm/h at 36.4 mm",
    computed: "0.81375 mm/h at 32.55 mm (r*K/4 at K/2 with r=0.05, K=65.1)",
    note: "the logistic law with the reported light parameters cannot peak above r*K/4; the closed form is used",
};

pub const INITIAL_VELOCITY: Discrepancy = Discrepancy {
    id: "initial-velocity",
    quantity: "growth velocity at initial stem length",
    reported: "4.68 mm/h (dark), 2.60 mm/h (light)",
    computed: "at most 2.079 mm/h (dark) and 0.814 mm/h (light) anywhere on the logistic curve",
    note: "the velocities exceed the logistic maximum; they are accepted as user inputs and never derived",
};

pub const POWER_DENSITY: Discrepancy = Discrepancy {
    id: "power-density",
    quantity: "power density at sprouting",
    reported: "181e-6 W/kg (dark), 102e-6 W/kg (light)",
    computed: "2.383e-3 W/kg (60.5 mN x 4.68 mm/h / 0.033 g), 2.134e-3 W/kg (97.5 mN x 2.60 mm/h / 0.033 g)",
    note: "force x velocity / seed mass with the stated inputs does not give the reported values; the formula is used",
};

pub const ROLLING_RESISTANCE: Discrepancy = Discrepancy {
    id: "rolling-resistance",
    quantity: "rolling resistance of the 5 g rover",
    reported: "approximately 5 mN",
    computed: "0.4905 mN (mu_R=0.01 x 5 g x 9.81 m/s^2)",
    note: "factor-10 gap; the stall gate uses mu_R * m * g literally",
};

pub const ALL: [Discrepancy; 4] = [LIGHT_PEAK_RATE, INITIAL_VELOCITY, POWER_DENSITY, ROLLING_RESISTANCE];

pub fn find(id: &str) -> Option<&'static Discrepancy> {
    ALL.iter().find(|d| d.id == id)
}

impl std::fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}: reported {}; computed {}. {}",
            self.id, self.quantity, self.reported, self.computed, self.note
        )
    }
}
