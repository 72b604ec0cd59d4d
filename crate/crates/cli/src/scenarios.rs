//! Bundled scenario fixtures and the machine checks behind the `examples`
//! command.
//!
//! Every bundled scenario has a closed-form reference registered in
//! [`searchlight_core::oracle`] under the same name; the suite recomputes the
//! curves from the scenario file and holds them against those formulas.

use searchlight_core::oracle::ReferenceId;

/// A machine check applied to one bundled scenario's outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SuiteCheck {
    /// Run `curves` and compare every column that has a registered closed
    /// form against it, pointwise, within `tol`.
    CurvesMatch { tol: f64 },
    /// Run `compare` and hold both true-probability curves against their
    /// closed forms within `tol`; the blended plan must also be strictly
    /// ahead of the single-belief plan at every sampled t > 0.
    CompareMatch { tol: f64 },
    /// Run `mean-time`; both means must converge and match `expect`
    /// (subjective, true) within `tol`.
    MeanTimes { expect: (f64, f64), tol: f64 },
    /// Run `mean-time`; the true mean must be reported divergent.
    MeanTimeDivergent,
}

/// One scenario shipped inside the binary.
#[derive(Debug, Clone, Copy)]
pub struct BundledScenario {
    /// Matches both the JSON `name` field and the oracle registry entry.
    pub name: &'static str,
    pub json: &'static str,
    /// Run the comparison plans against the moment-matched condensed prior
    /// instead of the exact mixture.
    pub paper_mode: bool,
    pub checks: &'static [SuiteCheck],
}

impl BundledScenario {
    /// The closed-form registry entry backing this scenario's checks.
    pub fn reference(&self) -> ReferenceId {
        self.name
            .parse()
            .expect("every bundled scenario has a registered closed form")
    }
}

/// The full bundled corpus, in registry order.
pub fn bundled() -> &'static [BundledScenario] {
    BUNDLED
}

/// Look up one bundled scenario's raw JSON by name.
pub fn bundled_json(name: &str) -> Option<&'static str> {
    BUNDLED
        .iter()
        .find(|b| b.name == name)
        .map(|b| b.json)
}

static BUNDLED: &[BundledScenario] = &[
    BundledScenario {
        name: "example1",
        json: include_str!("../scenarios/example1.json"),
        paper_mode: false,
        checks: &[
            SuiteCheck::CurvesMatch { tol: 1e-10 },
            SuiteCheck::MeanTimes {
                expect: (2.0, 2.0),
                tol: 1e-6,
            },
        ],
    },
    BundledScenario {
        name: "clairvoyant",
        json: include_str!("../scenarios/clairvoyant.json"),
        paper_mode: false,
        checks: &[SuiteCheck::CurvesMatch { tol: 1e-10 }],
    },
    BundledScenario {
        name: "example2",
        json: include_str!("../scenarios/example2.json"),
        paper_mode: false,
        checks: &[SuiteCheck::CurvesMatch { tol: 1e-3 }],
    },
    BundledScenario {
        name: "example3",
        json: include_str!("../scenarios/example3.json"),
        paper_mode: false,
        checks: &[SuiteCheck::CurvesMatch { tol: 1e-10 }],
    },
    BundledScenario {
        name: "two_cell_rates",
        json: include_str!("../scenarios/two_cell_rates.json"),
        paper_mode: false,
        checks: &[SuiteCheck::CurvesMatch { tol: 1e-10 }],
    },
    BundledScenario {
        name: "interval_rate_gradient",
        json: include_str!("../scenarios/interval_rate_gradient.json"),
        paper_mode: false,
        checks: &[SuiteCheck::CurvesMatch { tol: 1e-4 }],
    },
    BundledScenario {
        name: "example4",
        json: include_str!("../scenarios/example4.json"),
        paper_mode: false,
        checks: &[SuiteCheck::CurvesMatch { tol: 1e-3 }],
    },
    BundledScenario {
        name: "example4_unit_h",
        json: include_str!("../scenarios/example4_unit_h.json"),
        paper_mode: false,
        checks: &[
            SuiteCheck::CurvesMatch { tol: 1e-3 },
            SuiteCheck::MeanTimes {
                expect: (6.0, 2.0),
                tol: 1e-3,
            },
        ],
    },
    BundledScenario {
        name: "example5",
        json: include_str!("../scenarios/example5.json"),
        paper_mode: false,
        checks: &[SuiteCheck::CurvesMatch { tol: 1e-10 }],
    },
    BundledScenario {
        name: "example6",
        json: include_str!("../scenarios/example6.json"),
        paper_mode: false,
        checks: &[SuiteCheck::CurvesMatch { tol: 1e-3 }],
    },
    BundledScenario {
        name: "example7",
        json: include_str!("../scenarios/example7.json"),
        paper_mode: false,
        checks: &[SuiteCheck::CompareMatch { tol: 1e-9 }],
    },
    BundledScenario {
        name: "example8",
        json: include_str!("../scenarios/example8.json"),
        // The single-Gaussian condensation step only reproduces the reference
        // curves when the condensed belief is moment-matched.
        paper_mode: true,
        checks: &[SuiteCheck::CompareMatch { tol: 2e-3 }],
    },
    BundledScenario {
        name: "core_annulus",
        json: include_str!("../scenarios/core_annulus.json"),
        paper_mode: false,
        checks: &[
            SuiteCheck::CurvesMatch { tol: 1e-6 },
            SuiteCheck::MeanTimeDivergent,
        ],
    },
];
