//! Bounded derivative-free simplex descent.
//!
//! A plain Nelder-Mead loop with the textbook coefficients (reflection 1,
//! expansion 2, contraction 1/2, shrink 1/2) and one addition: every
//! candidate vertex is clamped into a rectangular box before evaluation,
//! so the objective is never probed outside its domain. The best vertex is
//! never replaced by anything worse, which makes the recorded best-value
//! history non-increasing by construction.

/// Stopping knobs for one descent.
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Hard iteration cap.
    pub max_iterations: usize,
    /// Stop once the best value drops to this level.
    pub target: f64,
    /// Relative edge length of the initial simplex, as a fraction of the
    /// box width in each coordinate.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: 600,
            target: 0.0,
            initial_step: 0.12,
        }
    }
}

/// Outcome of one descent.
#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Best value seen after each iteration; non-increasing.
    pub history: Vec<f64>,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Simplex edge lengths below this diameter end the descent.
const POINT_SPREAD_TOL: f64 = 1e-13;
/// Value spread below this (together with the diameter test) ends it.
const VALUE_SPREAD_TOL: f64 = 1e-28;

fn clamp_into(point: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((x, &lo), &hi) in point.iter_mut().zip(lower).zip(upper) {
        *x = x.clamp(lo, hi);
    }
}

fn blend(centroid: &[f64], other: &[f64], coeff: f64) -> Vec<f64> {
    centroid
        .iter()
        .zip(other)
        .map(|(&c, &o)| c + coeff * (c - o))
        .collect()
}

/// Minimize `objective` over the box `[lower, upper]`, starting from
/// `seed`. `lower`, `upper`, and `seed` must share a nonzero length.
pub fn minimize(
    objective: &mut dyn FnMut(&[f64]) -> f64,
    seed: &[f64],
    lower: &[f64],
    upper: &[f64],
    options: &SimplexOptions,
) -> SimplexOutcome {
    let dims = seed.len();
    assert!(dims > 0, "simplex descent needs at least one coordinate");
    assert_eq!(lower.len(), dims);
    assert_eq!(upper.len(), dims);

    let mut evaluations = 0usize;
    let mut eval = |point: &mut Vec<f64>, count: &mut usize| -> f64 {
        clamp_into(point, lower, upper);
        *count += 1;
        objective(point)
    };

    // Initial simplex: the seed plus one displaced vertex per axis. When
    // the displacement would leave the box, step the other way instead so
    // the simplex keeps full rank.
    let mut start = seed.to_vec();
    clamp_into(&mut start, lower, upper);
    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dims + 1);
    let mut first = start.clone();
    let v = eval(&mut first, &mut evaluations);
    vertices.push((first, v));
    for axis in 0..dims {
        let width = upper[axis] - lower[axis];
        let mut step = options.initial_step * width;
        if start[axis] + step > upper[axis] {
            step = -step;
        }
        let mut vertex = start.clone();
        vertex[axis] += step;
        let value = eval(&mut vertex, &mut evaluations);
        vertices.push((vertex, value));
    }

    let mut history = Vec::new();
    let mut iterations = 0usize;
    while iterations < options.max_iterations {
        iterations += 1;
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = vertices[0].1;
        history.push(best);
        if best <= options.target {
            break;
        }

        let spread = vertices[dims].1 - best;
        let diameter = (0..dims)
            .map(|axis| {
                let lo = vertices
                    .iter()
                    .map(|(p, _)| p[axis])
                    .fold(f64::MAX, f64::min);
                let hi = vertices
                    .iter()
                    .map(|(p, _)| p[axis])
                    .fold(f64::MIN, f64::max);
                hi - lo
            })
            .fold(0.0f64, f64::max);
        if spread < VALUE_SPREAD_TOL && diameter < POINT_SPREAD_TOL {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dims];
        for (point, _) in &vertices[..dims] {
            for (c, &x) in centroid.iter_mut().zip(point) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= dims as f64;
        }

        let worst = vertices[dims].clone();
        let mut reflected = blend(&centroid, &worst.0, REFLECT);
        let reflected_value = eval(&mut reflected, &mut evaluations);

        if reflected_value < vertices[0].1 {
            let mut expanded = blend(&centroid, &worst.0, EXPAND);
            let expanded_value = eval(&mut expanded, &mut evaluations);
            vertices[dims] = if expanded_value < reflected_value {
                (expanded, expanded_value)
            } else {
                (reflected, reflected_value)
            };
            continue;
        }
        if reflected_value < vertices[dims - 1].1 {
            vertices[dims] = (reflected, reflected_value);
            continue;
        }

        // Contract toward the better of the worst vertex and its mirror.
        let (mut contracted, fallback) = if reflected_value < worst.1 {
            (blend(&centroid, &worst.0, CONTRACT), reflected_value)
        } else {
            (blend(&centroid, &worst.0, -CONTRACT), worst.1)
        };
        let contracted_value = eval(&mut contracted, &mut evaluations);
        if contracted_value < fallback {
            vertices[dims] = (contracted, contracted_value);
            continue;
        }

        // Shrink everything toward the best vertex, which stays put.
        let anchor = vertices[0].0.clone();
        for (point, value) in vertices.iter_mut().skip(1) {
            for (x, &a) in point.iter_mut().zip(&anchor) {
                *x = a + SHRINK * (*x - a);
            }
            *value = eval(point, &mut evaluations);
        }
    }

    vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
    history.push(vertices[0].1);
    SimplexOutcome {
        point: vertices[0].0.clone(),
        value: vertices[0].1,
        iterations,
        evaluations,
        history,
    }
}
