//! Ground truth: the target's actual location, used for true-detection
//! evaluation and fixed-target simulation.

use crate::domain::prior::DiscretizedPrior;
use crate::domain::space::SearchSpace;
use crate::error::{Error, Result};

/// The actual target position, resolved to a cell of the space at
/// construction time.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    cell: usize,
    point: Option<[f64; 2]>,
}

impl GroundTruth {
    /// Truth given as a cell index of a discrete space.
    pub fn at_cell(space: &SearchSpace, cell: usize) -> Result<Self> {
        if cell >= space.cells() {
            return Err(Error::TruthOutsideSpace(format!(
                "cell {cell} is outside a space of {} cells",
                space.cells()
            )));
        }
        Ok(Self { cell, point: None })
    }

    /// Truth given as coordinates; resolved to the containing grid cell.
    pub fn at_point(space: &SearchSpace, point: [f64; 2]) -> Result<Self> {
        match space {
            SearchSpace::Grid(g) => match g.locate(point) {
                Some(cell) => Ok(Self {
                    cell,
                    point: Some(point),
                }),
                None => Err(Error::TruthOutsideSpace(format!(
                    "point ({}, {}) lies outside the grid",
                    point[0], point[1]
                ))),
            },
            SearchSpace::Discrete { .. } => Err(Error::TruthOutsideSpace(
                "coordinate truth needs a grid space".into(),
            )),
        }
    }

    /// Cell containing the target. On grids the reported detection uses this
    /// cell's effort density, an O(h) approximation of the exact location.
    pub fn cell(&self) -> usize {
        self.cell
    }

    pub fn point(&self) -> Option<[f64; 2]> {
        self.point
    }

    /// True when the prior puts no mass on the target's cell; such a target
    /// is invisible to prior-driven planning.
    pub fn outside_prior_support(&self, prior: &DiscretizedPrior) -> bool {
        prior.value(self.cell) == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::prior::Prior;
    use crate::domain::space::Grid;

    #[test]
    fn cell_truth_bounds_checked() {
        let space = SearchSpace::discrete(3).unwrap();
        assert_eq!(GroundTruth::at_cell(&space, 2).unwrap().cell(), 2);
        assert!(GroundTruth::at_cell(&space, 3).is_err());
    }

    #[test]
    fn point_truth_resolves_to_containing_cell() {
        let grid = Grid::new_2d([-1.0, -1.0], [1.0, 1.0], 0.5).unwrap();
        let space = SearchSpace::Grid(grid);
        let t = GroundTruth::at_point(&space, [0.1, 0.1]).unwrap();
        assert_eq!(space.as_grid().unwrap().locate([0.1, 0.1]), Some(t.cell()));
        assert!(GroundTruth::at_point(&space, [2.0, 0.0]).is_err());
        let discrete = SearchSpace::discrete(2).unwrap();
        assert!(GroundTruth::at_point(&discrete, [0.0, 0.0]).is_err());
    }

    #[test]
    fn zero_mass_targets_are_flagged() {
        let space = SearchSpace::discrete(2).unwrap();
        let prior = Prior::DiscretePmf(vec![1.0, 0.0]).discretize(&space).unwrap();
        assert!(!GroundTruth::at_cell(&space, 0).unwrap().outside_prior_support(&prior));
        assert!(GroundTruth::at_cell(&space, 1).unwrap().outside_prior_support(&prior));
    }
}
