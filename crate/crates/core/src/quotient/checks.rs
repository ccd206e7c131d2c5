//! Model-level cross-checks: integral-choice independence, the torsion
//! rebuild of MI, and uniqueness of the VII section incidence.

use super::config::{alternating_integral_sets, build_y_config, CurveConfigY, IntegralSet, Role};
use super::torsion::{config_from_solution, torsion_solutions};
use super::{descend, extra_classes_for, ExtraClasses, QuotientError, SurfaceKind, XModel};
use crate::dynkin::automorph::{find_isomorphism, ColoredGraph};
use crate::fibrations::Kodaira;
use crate::nsmodel::{NSClass, NSModel};
use serde::Serialize;

/// Class graph of a model, colored by effectivity.
pub fn model_graph(model: &XModel) -> ColoredGraph {
    model.graph().colored(true)
}

/// Curve graph of a K3 configuration, colored by fiber/section role.
pub fn config_graph(config: &CurveConfigY) -> ColoredGraph {
    let colors = config
        .roles
        .iter()
        .map(|r| match r {
            Role::Fiber { .. } => 1,
            Role::Section { .. } => 2,
            Role::Other => 3,
        })
        .collect();
    ColoredGraph::new(config.gram.clone(), colors)
}

pub fn models_isomorphic(a: &XModel, b: &XModel) -> bool {
    find_isomorphism(&model_graph(a), &model_graph(b)).is_some()
}

fn ns_extras(ns: &NSModel, config: &CurveConfigY, set: &IntegralSet) -> Result<ExtraClasses, QuotientError> {
    let cls = extra_classes_for(ns, config, set)?;
    let refs: Vec<&NSClass> = cls.iter().collect();
    ExtraClasses::from_ns(ns, config, &refs, "r")
}

#[derive(Clone, Debug, Serialize)]
pub struct ChoiceReport {
    pub assignments: usize,
    /// Per assignment: whether its model is isomorphic to the first one.
    pub isomorphic: Vec<bool>,
    pub extra_counts: Vec<usize>,
}

impl ChoiceReport {
    pub fn all_isomorphic(&self) -> bool {
        self.assignments > 0 && self.isomorphic.iter().all(|&x| x)
    }
}

/// Descend MI once per admissible integral assignment and compare.
pub fn mi_choice_independence(ns: &NSModel) -> Result<ChoiceReport, QuotientError> {
    let config = build_y_config(SurfaceKind::MI, ns)?;
    let sets = alternating_integral_sets(&config)?;
    let mut models = Vec::new();
    let mut extra_counts = Vec::new();
    for set in &sets {
        let extras = ns_extras(ns, &config, set)?;
        extra_counts.push(extras.len());
        models.push(descend(&config, set, &extras)?);
    }
    let first = model_graph(&models[0]);
    let isomorphic = models.iter().map(|m| find_isomorphism(&first, &model_graph(m)).is_some()).collect();
    Ok(ChoiceReport {
        assignments: sets.len(),
        isomorphic,
        extra_counts,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossValidation {
    pub torsion_solutions: usize,
    /// A role-preserving bijection torsion curves → generator curves exists.
    pub configs_isomorphic: bool,
    /// The transported integral set is admissible on the generator side.
    pub set_admissible: bool,
    pub models_isomorphic: bool,
}

impl CrossValidation {
    pub fn passed(&self) -> bool {
        self.configs_isomorphic && self.set_admissible && self.models_isomorphic
    }
}

/// Rebuild MI from the torsion solver on `(I6,I6,I6,I6; Z/6 x Z/3)` and
/// compare the descended class graph with the plane-model build.
pub fn mi_torsion_cross_validation(ns: &NSModel) -> Result<CrossValidation, QuotientError> {
    let pg = build_y_config(SurfaceKind::MI, ns)?;
    let fibers = [Kodaira::I(6); 4];
    let sols = torsion_solutions(&fibers, &[6, 3])?;
    let sol = sols.first().ok_or_else(|| QuotientError::Infeasible("no torsion solution for I6^4".into()))?;
    let tor = config_from_solution(&fibers, sol)?;
    let Some(perm) = find_isomorphism(&config_graph(&tor), &config_graph(&pg)) else {
        return Ok(CrossValidation {
            torsion_solutions: sols.len(),
            configs_isomorphic: false,
            set_admissible: false,
            models_isomorphic: false,
        });
    };
    let tor_set = alternating_integral_sets(&tor)?.swap_remove(0);
    let mut members: Vec<usize> = tor_set.members.iter().map(|&i| perm[i]).collect();
    members.sort();
    let pg_sets = alternating_integral_sets(&pg)?;
    let Some(pg_set) = pg_sets.iter().find(|s| s.members == members) else {
        return Ok(CrossValidation {
            torsion_solutions: sols.len(),
            configs_isomorphic: true,
            set_admissible: false,
            models_isomorphic: false,
        });
    };
    let extras = ns_extras(ns, &pg, pg_set)?;
    let a = descend(&pg, pg_set, &extras)?;
    let b = descend(&tor, &tor_set, &extras.transported(&perm))?;
    Ok(CrossValidation {
        torsion_solutions: sols.len(),
        configs_isomorphic: true,
        set_admissible: true,
        models_isomorphic: models_isomorphic(&a, &b),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    pub solutions: usize,
    /// Solutions whose configuration is isomorphic to the first.
    pub isomorphic_to_first: usize,
}

impl UniquenessReport {
    pub fn unique(&self) -> bool {
        self.solutions > 0 && self.solutions == self.isomorphic_to_first
    }
}

/// Whether every torsion-solver solution gives the same configuration up
/// to a role-preserving isomorphism.
pub fn torsion_uniqueness(fibers: &[Kodaira], torsion: &[usize]) -> Result<UniquenessReport, QuotientError> {
    let sols = torsion_solutions(fibers, torsion)?;
    let graphs: Vec<ColoredGraph> =
        sols.iter().map(|s| config_from_solution(fibers, s).map(|c| config_graph(&c))).collect::<Result<_, _>>()?;
    let iso = match graphs.first() {
        Some(g0) => graphs.iter().filter(|g| find_isomorphism(g0, g).is_some()).count(),
        None => 0,
    };
    Ok(UniquenessReport {
        solutions: sols.len(),
        isomorphic_to_first: iso,
    })
}
