use super::{AreaGraph, AreaId, ModelError};
use crate::geometry::Point2D;

const ON_BOUNDARY_M: f64 = 1e-9;

impl AreaGraph {
    /// Deepest area that is an ancestor-or-self of both `a` and `b`.
    pub fn lowest_common_ancestor(&self, a: &str, b: &str) -> Result<String, ModelError> {
        let ia = self
            .area_id(a)
            .ok_or_else(|| ModelError::UnknownArea(a.into()))?;
        let ib = self
            .area_id(b)
            .ok_or_else(|| ModelError::UnknownArea(b.into()))?;
        self.lca_id(ia, ib)
            .map(|id| self.area(id).name.clone())
            .ok_or_else(|| ModelError::NoCommonAncestor(a.into(), b.into()))
    }

    pub fn lca_id(&self, a: AreaId, b: AreaId) -> Option<AreaId> {
        let chain_a = self.ancestors(a);
        let chain_b = self.ancestors(b);
        // align depths, then climb in lockstep
        let (mut i, mut j) = (0usize, 0usize);
        if chain_a.len() > chain_b.len() {
            i = chain_a.len() - chain_b.len();
        } else {
            j = chain_b.len() - chain_a.len();
        }
        while i < chain_a.len() && j < chain_b.len() {
            if chain_a[i] == chain_b[j] {
                return Some(chain_a[i]);
            }
            i += 1;
            j += 1;
        }
        None
    }

    /// Leaf area on `level` containing `p`. Points on a shared boundary go to
    /// the lexicographically smallest candidate name.
    pub fn locate_leaf_area(&self, p: Point2D, level: &str) -> Result<String, ModelError> {
        self.locate_leaf_id(p, level)
            .map(|id| self.area(id).name.clone())
    }

    pub fn locate_leaf_id(&self, p: Point2D, level: &str) -> Result<AreaId, ModelError> {
        let mut strict: Vec<AreaId> = Vec::new();
        let mut boundary: Vec<AreaId> = Vec::new();
        for id in self.leaf_ids() {
            let a = self.area(id);
            if a.level.as_deref() != Some(level) {
                continue;
            }
            if !a.polygon.bounds().expanded(ON_BOUNDARY_M).contains(p) {
                continue;
            }
            let d = a.polygon.boundary_distance(p);
            if d <= ON_BOUNDARY_M {
                boundary.push(id);
            } else if a.polygon.contains(p) {
                strict.push(id);
            }
        }
        match strict.len() {
            1 => Ok(strict[0]),
            0 => boundary
                .into_iter()
                .min_by(|x, y| self.area(*x).name.cmp(&self.area(*y).name))
                .ok_or_else(|| ModelError::NotInAnyArea {
                    x: p.x,
                    y: p.y,
                    level: level.into(),
                }),
            _ => {
                let mut names: Vec<String> = strict
                    .iter()
                    .map(|id| self.area(*id).name.clone())
                    .collect();
                names.sort();
                Err(ModelError::AmbiguousContainment(names))
            }
        }
    }
}
