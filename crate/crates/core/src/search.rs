//! Two-spin interaction templates and a seeded multi-start Nelder–Mead search
//! for coefficient vectors whose evolution realizes a target gate.
//!
//! The objective is the total leakage reported by [`verify_gate`]: smooth in
//! the coefficients, zero exactly on realizations, and blind to output phases.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::gate::{column_leakage, GateError, GateSpec};
use crate::linalg::{unitary_exponential, LinalgError};
use crate::pauli::{Hamiltonian, PauliError, PauliLabel, PauliTerm, SpinSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("expected {expected} parameters, got {actual}")]
    ParameterCount { expected: usize, actual: usize },
    #[error("pair ({0}, {1}) is invalid or repeated")]
    BadPair(usize, usize),
    #[error("pair {0} has an empty or invalid component list")]
    BadComponents(usize),
    #[error("non-finite objective value at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },
    #[error("invalid search configuration: {0}")]
    BadConfig(&'static str),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Gate(#[from] GateError),
}

pub type SearchResultOf<T> = Result<T, SearchError>;

/// All nine non-identity component pairs in row-major (x, y, z)² order.
pub fn all_components() -> Vec<(PauliLabel, PauliLabel)> {
    PauliLabel::NON_IDENTITY
        .iter()
        .flat_map(|&a| PauliLabel::NON_IDENTITY.iter().map(move |&b| (a, b)))
        .collect()
}

/// Which two-spin (and optionally one-spin) terms a Hamiltonian may contain.
///
/// Parameters are ordered pair by pair in listed order, components in the
/// order given for each pair, then `x, y, z` for every site when single-site
/// terms are enabled. A component `(P, Q)` on pair `(a, b)` means `P_a Q_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTemplate {
    system: SpinSystem,
    pairs: Vec<(usize, usize)>,
    pair_components: Vec<Vec<(PauliLabel, PauliLabel)>>,
    include_single_site: bool,
    duration: f64,
}

impl InteractionTemplate {
    /// Template over `pairs` with all nine components per pair.
    pub fn new(system: SpinSystem, pairs: Vec<(usize, usize)>) -> SearchResultOf<Self> {
        let components = vec![all_components(); pairs.len()];
        Self::with_components(system, pairs, components)
    }

    pub fn with_components(
        system: SpinSystem,
        pairs: Vec<(usize, usize)>,
        pair_components: Vec<Vec<(PauliLabel, PauliLabel)>>,
    ) -> SearchResultOf<Self> {
        let n = system.site_count();
        for (k, &(a, b)) in pairs.iter().enumerate() {
            let repeated = pairs[..k]
                .iter()
                .any(|&(c, d)| (c, d) == (a, b) || (c, d) == (b, a));
            if a == b || a >= n || b >= n || repeated {
                return Err(SearchError::BadPair(a, b));
            }
        }
        if pair_components.len() != pairs.len() {
            return Err(SearchError::BadComponents(pair_components.len()));
        }
        for (k, comps) in pair_components.iter().enumerate() {
            let valid = comps
                .iter()
                .all(|&(p, q)| p != PauliLabel::I && q != PauliLabel::I);
            if comps.is_empty() || !valid {
                return Err(SearchError::BadComponents(k));
            }
        }
        Ok(InteractionTemplate {
            system,
            pairs,
            pair_components,
            include_single_site: false,
            duration: 1.0,
        })
    }

    /// Every unordered pair `(a, b)` with `a < b`.
    pub fn all_pairs(system: SpinSystem) -> SearchResultOf<Self> {
        let n = system.site_count();
        let pairs = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Self::new(system, pairs)
    }

    /// Three spins A, B, C coupled only through B: pairs AB and BC, 18 parameters.
    pub fn loopless_three_spin() -> Self {
        Self::new(
            SpinSystem::with_sites(3).expect("three sites"),
            vec![(0, 1), (1, 2)],
        )
        .expect("static template")
    }

    pub fn with_single_site(mut self, include: bool) -> Self {
        self.include_single_site = include;
        self
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair_components(&self) -> &[Vec<(PauliLabel, PauliLabel)>] {
        &self.pair_components
    }

    pub fn include_single_site(&self) -> bool {
        self.include_single_site
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn parameter_count(&self) -> usize {
        let pair_params: usize = self.pair_components.iter().map(Vec::len).sum();
        let single = if self.include_single_site {
            3 * self.system.site_count()
        } else {
            0
        };
        pair_params + single
    }

    /// Factor lists in parameter order.
    pub fn term_layout(&self) -> Vec<Vec<(usize, PauliLabel)>> {
        let mut layout = Vec::with_capacity(self.parameter_count());
        for (&(a, b), comps) in self.pairs.iter().zip(&self.pair_components) {
            for &(p, q) in comps {
                layout.push(vec![(a, p), (b, q)]);
            }
        }
        if self.include_single_site {
            for site in 0..self.system.site_count() {
                for label in PauliLabel::NON_IDENTITY {
                    layout.push(vec![(site, label)]);
                }
            }
        }
        layout
    }

    /// Parameter index of component `(p, q)` on the pair listed as `(a, b)`.
    pub fn parameter_index(
        &self,
        pair: (usize, usize),
        component: (PauliLabel, PauliLabel),
    ) -> Option<usize> {
        let mut offset = 0;
        for (&listed, comps) in self.pairs.iter().zip(&self.pair_components) {
            if listed == pair {
                return comps
                    .iter()
                    .position(|&c| c == component)
                    .map(|k| offset + k);
            }
            offset += comps.len();
        }
        None
    }
}

/// Coefficients in a template's canonical parameter order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn zeros(len: usize) -> Self {
        ParameterVector(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Coefficients placing the XOR Hamiltonian inside [`InteractionTemplate::loopless_three_spin`].
pub fn xor_parameters(template: &InteractionTemplate) -> Option<ParameterVector> {
    use PauliLabel::*;
    let strong = std::f64::consts::PI * std::f64::consts::SQRT_2 / 4.0;
    let weak = -std::f64::consts::PI / 4.0;
    let mut params = ParameterVector::zeros(template.parameter_count());
    params.0[template.parameter_index((0, 1), (Z, Y))?] = strong;
    params.0[template.parameter_index((1, 2), (Z, Y))?] = strong;
    params.0[template.parameter_index((1, 2), (Y, X))?] = weak;
    Some(params)
}

/// Hamiltonian with the template's terms at the given coefficients; zero
/// coefficients are dropped.
pub fn realize(
    template: &InteractionTemplate,
    params: &ParameterVector,
) -> SearchResultOf<Hamiltonian> {
    let expected = template.parameter_count();
    if params.len() != expected {
        return Err(SearchError::ParameterCount {
            expected,
            actual: params.len(),
        });
    }
    let terms = template
        .term_layout()
        .into_iter()
        .zip(params.as_slice())
        .filter(|(_, &c)| c != 0.0)
        .map(|(factors, &c)| PauliTerm::new(c, factors))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Hamiltonian::new(template.system.clone(), terms)?)
}

/// Total leakage of the realized evolution against `spec`.
pub fn objective(
    template: &InteractionTemplate,
    params: &ParameterVector,
    spec: &GateSpec,
) -> SearchResultOf<f64> {
    let h = realize(template, params)?.assemble();
    let u = unitary_exponential(&h, template.duration)?;
    Ok(column_leakage(&u, spec)?.iter().sum())
}

pub fn relabel(h: &Hamiltonian, site_permutation: &[usize]) -> SearchResultOf<Hamiltonian> {
    Ok(h.relabel(site_permutation)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub rng_seed: u64,
    /// Starting coefficients are drawn uniformly from `[-init_scale, init_scale]`.
    pub init_scale: f64,
    pub success_tol: f64,
    pub max_iterations: usize,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop once `f_max − f_min` over the simplex falls below this...
    pub value_spread: f64,
    /// ...and no vertex is farther than this from the best in any coordinate.
    /// Guards against flat but wide simplices on symmetric objectives.
    pub simplex_size: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 200,
            rng_seed: 42,
            init_scale: 2.0,
            success_tol: 1e-6,
            max_iterations: 2000,
            initial_step: 1.0,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            value_spread: 1e-12,
            simplex_size: 1e-6,
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> SearchResultOf<()> {
        let positive = [
            (self.init_scale, "init_scale"),
            (self.success_tol, "success_tol"),
            (self.initial_step, "initial_step"),
            (self.reflection, "reflection"),
            (self.expansion, "expansion"),
            (self.contraction, "contraction"),
            (self.shrink, "shrink"),
            (self.value_spread, "value_spread"),
            (self.simplex_size, "simplex_size"),
        ];
        for (value, name) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SearchError::BadConfig(name));
            }
        }
        if self.restarts == 0 {
            return Err(SearchError::BadConfig("restarts"));
        }
        if self.max_iterations == 0 {
            return Err(SearchError::BadConfig("max_iterations"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOutcome {
    pub parameters: ParameterVector,
    pub value: f64,
    pub iterations: usize,
}

/// Nelder–Mead descent from `x0` with an axis-aligned initial simplex of edge
/// `config.initial_step`. Deterministic for a given `x0` and config.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &ParameterVector,
    config: &SearchConfig,
) -> SearchResultOf<MinimizeOutcome>
where
    F: FnMut(&[f64]) -> SearchResultOf<f64>,
{
    let n = x0.len();
    let mut evaluate = |x: &[f64], iteration: usize| -> SearchResultOf<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SearchError::NonFiniteObjective { iteration })
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let start = x0.as_slice().to_vec();
    let f0 = evaluate(&start, 0)?;
    simplex.push((start.clone(), f0));
    for k in 0..n {
        let mut v = start.clone();
        v[k] += config.initial_step;
        let fv = evaluate(&v, 0)?;
        simplex.push((v, fv));
    }

    let order =
        |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal);
    let mut iterations = 0;
    while iterations < config.max_iterations {
        simplex.sort_by(order);
        if n == 0
            || (simplex[n].1 - simplex[0].1 < config.value_spread
                && simplex_width(&simplex) < config.simplex_size)
        {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let toward = |coef: f64, from: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, x)| c + coef * (x - c))
                .collect()
        };

        let worst = simplex[n].0.clone();
        let (f_best, f_second_worst, f_worst) = (simplex[0].1, simplex[n - 1].1, simplex[n].1);

        let reflected = toward(-config.reflection, &worst);
        let f_r = evaluate(&reflected, iterations)?;
        if f_r < f_best {
            let expanded = toward(-config.reflection * config.expansion, &worst);
            let f_e = evaluate(&expanded, iterations)?;
            simplex[n] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
            continue;
        }
        if f_r < f_second_worst {
            simplex[n] = (reflected, f_r);
            continue;
        }
        let (contracted, f_c) = if f_r < f_worst {
            let outside = toward(-config.reflection * config.contraction, &worst);
            let f_c = evaluate(&outside, iterations)?;
            if f_c <= f_r {
                (outside, f_c)
            } else {
                (Vec::new(), f64::INFINITY)
            }
        } else {
            let inside = toward(config.contraction, &worst);
            let f_c = evaluate(&inside, iterations)?;
            if f_c < f_worst {
                (inside, f_c)
            } else {
                (Vec::new(), f64::INFINITY)
            }
        };
        if f_c.is_finite() {
            simplex[n] = (contracted, f_c);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let shrunk: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, x)| b + config.shrink * (x - b))
                .collect();
            let fs = evaluate(&shrunk, iterations)?;
            *vertex = (shrunk, fs);
        }
    }
    simplex.sort_by(order);
    let (best, value) = simplex.swap_remove(0);
    Ok(MinimizeOutcome {
        parameters: ParameterVector(best),
        value,
        iterations,
    })
}

/// Largest coordinate distance from the best (first) vertex.
fn simplex_width(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .flat_map(|(v, _)| v.iter().zip(best).map(|(x, b)| (x - b).abs()))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_parameters: ParameterVector,
    pub best_objective: f64,
    pub restart_index: usize,
    pub iterations_used: usize,
    pub succeeded: bool,
}

/// Random start for one restart; restart `k` uses stream `k` of the seeded generator.
pub fn restart_start(
    template: &InteractionTemplate,
    config: &SearchConfig,
    restart: usize,
) -> ParameterVector {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    rng.set_stream(restart as u64);
    ParameterVector(
        (0..template.parameter_count())
            .map(|_| rng.gen_range(-config.init_scale..=config.init_scale))
            .collect(),
    )
}

/// Run `config.restarts` seeded descents and keep the best by
/// `(objective, restart_index)`. Restarts run in parallel; the result does not
/// depend on scheduling.
pub fn search(
    template: &InteractionTemplate,
    spec: &GateSpec,
    config: &SearchConfig,
) -> SearchResultOf<SearchResult> {
    config.validate()?;
    let runs: Vec<(usize, MinimizeOutcome)> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let x0 = restart_start(template, config, restart);
            let outcome = nelder_mead(
                |x| objective(template, &ParameterVector(x.to_vec()), spec),
                &x0,
                config,
            )?;
            Ok((restart, outcome))
        })
        .collect::<SearchResultOf<_>>()?;

    let (restart_index, best) = runs
        .into_iter()
        .min_by(|(ia, a), (ib, b)| a.value.total_cmp(&b.value).then(ia.cmp(ib)))
        .expect("at least one restart");
    Ok(SearchResult {
        succeeded: best.value <= config.success_tol,
        best_objective: best.value,
        best_parameters: best.parameters,
        restart_index,
        iterations_used: best.iterations,
    })
}
