//! Deterministic low-dimensional minimizers: grid scan followed by
//! Nelder–Mead refinement from the best few grid points.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::states::random::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimConfig {
    /// Scan size: sphere points, total ball points, or total SU(2) angle
    /// triples (rounded to a cube).
    pub grid_points: usize,
    pub refine_starts: usize,
    /// Simplex diameter at which refinement stops.
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            grid_points: 4096,
            refine_starts: 8,
            tol: 1e-10,
            max_iters: 2000,
            seed: 0,
        }
    }
}

impl OptimConfig {
    /// Default budget for [`minimize_over_su2`]: a 24³ angle grid.
    pub fn su2_default() -> Self {
        Self {
            grid_points: 24 * 24 * 24,
            ..Self::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_grid_points(self, grid_points: usize) -> Self {
        Self { grid_points, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum<T> {
    pub point: T,
    pub value: f64,
    /// Best value seen during the scan, before refinement.
    pub grid_value: f64,
    pub evaluations: usize,
}

// ----------------------------------------------------------------- simplex

/// Result of one Nelder–Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead with standard coefficients (1, 2, ½, ½).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub tol: f64,
    pub max_iters: usize,
    /// Extra runs restarted from the incumbent with a shrunken simplex.
    pub restarts: usize,
}

impl NelderMead {
    pub fn from_config(cfg: &OptimConfig) -> Self {
        Self {
            tol: cfg.tol,
            max_iters: cfg.max_iters,
            restarts: 2,
        }
    }

    pub fn minimize(&self, f: impl Fn(&[f64]) -> f64, x0: &[f64], step: f64) -> SimplexResult {
        let mut best = self.run(&f, x0, step);
        let mut step = step;
        for _ in 0..self.restarts {
            step *= 0.1;
            let next = self.run(&f, &best.x, step);
            let improved = next.value < best.value;
            let evals = best.evaluations + next.evaluations;
            let iters = best.iterations + next.iterations;
            if improved {
                best = next;
            }
            best.evaluations = evals;
            best.iterations = iters;
            if !improved {
                break;
            }
        }
        best
    }

    fn run(&self, f: &impl Fn(&[f64]) -> f64, x0: &[f64], step: f64) -> SimplexResult {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step;
            let fx = f(&x);
            simplex.push((x, fx));
        }
        let mut evals = n + 1;
        let mut iters = 0;
        let mut converged = false;
        while iters < self.max_iters {
            // Stable sort keeps the older vertex first on ties.
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if diameter(&simplex) <= self.tol {
                converged = true;
                break;
            }
            iters += 1;
            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|v| v.0[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(1.0);
            let fr = f(&xr);
            evals += 1;
            if fr < simplex[0].1 {
                let xe = along(2.0);
                let fe = f(&xe);
                evals += 1;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[n].1 {
                    let x = along(0.5);
                    let fx = f(&x);
                    (x, fx)
                } else {
                    let x = along(-0.5);
                    let fx = f(&x);
                    (x, fx)
                };
                evals += 1;
                if fc < simplex[n].1.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let x_best = simplex[0].0.clone();
                    for v in simplex.iter_mut().skip(1) {
                        for (xi, bi) in v.0.iter_mut().zip(&x_best) {
                            *xi = bi + 0.5 * (*xi - bi);
                        }
                        v.1 = f(&v.0);
                    }
                    evals += n;
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        SimplexResult {
            x,
            value,
            iterations: iters,
            evaluations: evals,
            converged,
        }
    }
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let x0 = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|v| v.0.iter().zip(x0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// Indices of the `k` smallest values, ties broken by index. Candidates whose
/// value repeats an already chosen one to within `DUPLICATE_TOL` are skipped,
/// so symmetric copies of one basin do not exhaust the refinement budget.
fn best_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let k = k.max(1);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for &i in &idx {
        if chosen.len() == k {
            break;
        }
        let v = values[i];
        let repeat = chosen
            .iter()
            .any(|&c| (values[c] - v).abs() <= DUPLICATE_TOL * v.abs().max(1.0));
        if !repeat {
            chosen.push(i);
        }
    }
    for &i in &idx {
        if chosen.len() == k {
            break;
        }
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    chosen
}

/// Relative value separation below which two grid candidates count as copies.
const DUPLICATE_TOL: f64 = 1e-12;

// ------------------------------------------------------------------- sphere

/// Fibonacci lattice on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub points: Vec<[f64; 3]>,
}

impl SphereGrid {
    pub fn fibonacci(count: usize) -> Self {
        let golden = PI * (3.0 - 5f64.sqrt());
        let n = count.max(1) as f64;
        let points = (0..count.max(1))
            .map(|k| {
                let z = 1.0 - (2 * k + 1) as f64 / n;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = golden * k as f64;
                normalize([r * phi.cos(), r * phi.sin(), z])
            })
            .collect();
        Self { points }
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// Typical nearest-neighbour spacing.
    pub fn spacing(&self) -> f64 {
        (4.0 * PI / self.count() as f64).sqrt()
    }
}

pub fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n == 0.0 {
        [0.0, 0.0, 1.0]
    } else {
        [v[0] / n, v[1] / n, v[2] / n]
    }
}

/// Two unit vectors completing `m` to an orthonormal frame.
fn tangent_frame(m: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if m[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = helper[0] * m[0] + helper[1] * m[1] + helper[2] * m[2];
    let t1 = normalize([helper[0] - dot * m[0], helper[1] - dot * m[1], helper[2] - dot * m[2]]);
    let t2 = [
        m[1] * t1[2] - m[2] * t1[1],
        m[2] * t1[0] - m[0] * t1[2],
        m[0] * t1[1] - m[1] * t1[0],
    ];
    (t1, t2)
}

fn chart(m0: &[f64; 3], t1: &[f64; 3], t2: &[f64; 3], uv: &[f64]) -> [f64; 3] {
    normalize([
        m0[0] + uv[0] * t1[0] + uv[1] * t2[0],
        m0[1] + uv[0] * t1[1] + uv[1] * t2[1],
        m0[2] + uv[0] * t1[2] + uv[1] * t2[2],
    ])
}

pub fn minimize_on_sphere<F>(f: F, cfg: &OptimConfig) -> Minimum<[f64; 3]>
where
    F: Fn(&[f64; 3]) -> f64 + Sync,
{
    let grid = SphereGrid::fibonacci(cfg.grid_points);
    let values: Vec<f64> = grid.points.par_iter().map(&f).collect();
    let starts = best_indices(&values, cfg.refine_starts);
    let grid_value = values[starts[0]];
    let nm = NelderMead::from_config(cfg);
    let step = grid.spacing();
    let refined: Vec<(f64, [f64; 3], usize)> = starts
        .par_iter()
        .map(|&k| {
            let mut m = grid.points[k];
            let mut value = values[k];
            let mut evals = 0;
            // Re-centre the chart so the final iterate sits near its origin.
            let mut s = step;
            for _ in 0..3 {
                let (t1, t2) = tangent_frame(&m);
                let r = nm.minimize(|uv| f(&chart(&m, &t1, &t2, uv)), &[0.0, 0.0], s);
                evals += r.evaluations;
                if r.value <= value {
                    value = r.value;
                    m = chart(&m, &t1, &t2, &r.x);
                }
                s = (s * 0.01).max(cfg.tol * 10.0);
            }
            (value, m, evals)
        })
        .collect();
    let mut best = (grid_value, grid.points[starts[0]]);
    for (v, m, _) in &refined {
        if *v < best.0 {
            best = (*v, *m);
        }
    }
    Minimum {
        point: best.1,
        value: best.0,
        grid_value,
        evaluations: values.len() + refined.iter().map(|r| r.2).sum::<usize>(),
    }
}

// --------------------------------------------------------------------- ball

const BALL_SHELLS: usize = 8;

fn project_to_ball(x: &[f64]) -> [f64; 3] {
    let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt().max(1.0);
    [x[0] / n, x[1] / n, x[2] / n]
}

/// Minimizes over |b| ≤ 1: the centre plus radial shells of sphere points,
/// then simplex refinement in R³ through the projection x ↦ x / max(1, |x|).
pub fn minimize_on_ball<F>(f: F, cfg: &OptimConfig) -> Minimum<[f64; 3]>
where
    F: Fn(&[f64; 3]) -> f64 + Sync,
{
    let dirs = SphereGrid::fibonacci((cfg.grid_points / BALL_SHELLS).max(32));
    let mut points = vec![[0.0; 3]];
    for shell in 1..=BALL_SHELLS {
        let r = shell as f64 / BALL_SHELLS as f64;
        points.extend(dirs.points.iter().map(|d| [r * d[0], r * d[1], r * d[2]]));
    }
    let values: Vec<f64> = points.par_iter().map(&f).collect();
    let starts = best_indices(&values, cfg.refine_starts);
    let grid_value = values[starts[0]];
    let nm = NelderMead::from_config(cfg);
    let step = 1.0 / BALL_SHELLS as f64;
    let refined: Vec<SimplexResult> = starts
        .par_iter()
        .map(|&k| nm.minimize(|x| f(&project_to_ball(x)), &points[k], step))
        .collect();
    let mut best = (grid_value, points[starts[0]]);
    for r in &refined {
        if r.value < best.0 {
            best = (r.value, project_to_ball(&r.x));
        }
    }
    Minimum {
        point: best.1,
        value: best.0,
        grid_value,
        evaluations: values.len() + refined.iter().map(|r| r.evaluations).sum::<usize>(),
    }
}

// --------------------------------------------------------------------- SU(2)

/// Euler angles of U = Rz(α) Ry(β) Rz(γ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su2Params {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Su2Params {
    pub fn to_unitary(&self) -> ComplexMatrix {
        su2_from_angles(self.alpha, self.beta, self.gamma)
    }
}

pub fn su2_from_angles(alpha: f64, beta: f64, gamma: f64) -> ComplexMatrix {
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let sum = C64::from_polar(1.0, -(alpha + gamma) / 2.0);
    let diff = C64::from_polar(1.0, -(alpha - gamma) / 2.0);
    ComplexMatrix::from_rows(&[
        vec![sum * c, -diff * s],
        vec![diff.conj() * s, sum.conj() * c],
    ])
}

/// Angle-grid scan (per-axis count ⌊∛grid_points⌉, offset within a cell by
/// the seed) followed by simplex refinement in angle space.
pub fn minimize_over_su2<F>(f: F, cfg: &OptimConfig) -> Minimum<Su2Params>
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    let n = ((cfg.grid_points as f64).cbrt().round() as usize).max(2);
    let mut rng = rng_from_seed(cfg.seed);
    let offset: [f64; 3] = [rng.random(), rng.random(), rng.random()];
    let (da, db, dg) = (2.0 * PI / n as f64, PI / (n - 1) as f64, 2.0 * PI / n as f64);
    let angles: Vec<[f64; 3]> = (0..n * n * n)
        .map(|k| {
            let (i, j, l) = (k / (n * n), (k / n) % n, k % n);
            let beta = (j as f64 + offset[1] - 0.5).clamp(0.0, (n - 1) as f64) * db;
            [(i as f64 + offset[0]) * da, beta, (l as f64 + offset[2]) * dg]
        })
        .collect();
    let eval = |x: &[f64]| f(&su2_from_angles(x[0], x[1], x[2]));
    let values: Vec<f64> = angles.par_iter().map(|a| eval(a)).collect();
    let starts = best_indices(&values, cfg.refine_starts);
    let grid_value = values[starts[0]];
    let nm = NelderMead::from_config(cfg);
    let refined: Vec<SimplexResult> = starts
        .par_iter()
        .map(|&k| nm.minimize(eval, &angles[k], db.min(da) * 0.5))
        .collect();
    let mut best = (grid_value, angles[starts[0]].to_vec());
    for r in &refined {
        if r.value < best.0 {
            best = (r.value, r.x.clone());
        }
    }
    Minimum {
        point: Su2Params {
            alpha: best.1[0],
            beta: best.1[1],
            gamma: best.1[2],
        },
        value: best.0,
        grid_value,
        evaluations: values.len() + refined.iter().map(|r| r.evaluations).sum::<usize>(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> OptimConfig {
        OptimConfig {
            grid_points: 512,
            ..OptimConfig::default()
        }
    }

    #[test]
    fn fibonacci_points_are_unit_and_deterministic() {
        let g = SphereGrid::fibonacci(4096);
        assert_eq!(g.count(), 4096);
        for p in &g.points {
            assert!((p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 1.0).abs() < 1e-14);
        }
        assert_eq!(g, SphereGrid::fibonacci(4096));
    }

    #[test]
    fn linear_objective_on_sphere() {
        let r = minimize_on_sphere(|m| m[2], &OptimConfig::default());
        assert!((r.value + 1.0).abs() < 1e-12);
        assert!((r.point[2] + 1.0).abs() < 1e-6);
        assert!(r.value <= r.grid_value);
    }

    #[test]
    fn constant_objective() {
        assert_eq!(minimize_on_sphere(|_| 2.5, &small()).value, 2.5);
        assert_eq!(minimize_on_ball(|_| -1.0, &small()).value, -1.0);
    }

    #[test]
    fn anisotropic_norm_on_sphere() {
        // |mᵀT| with T = diag(3, 1, 1) has minimum 1 on the circle m_x = 0.
        let r = minimize_on_sphere(|m| (9.0 * m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt(), &small());
        assert!((r.value - 1.0).abs() < 1e-10);
        assert!(r.point[0].abs() < 1e-5);
    }

    #[test]
    fn ball_linear_and_quadratic() {
        let r = minimize_on_ball(|b| b[0] - 2.0 * b[1], &small());
        assert!((r.value + 5f64.sqrt()).abs() < 1e-10);
        let c = [0.2, -0.3, 0.1];
        let q = |b: &[f64; 3]| (0..3).map(|i| (b[i] - c[i]).powi(2)).sum::<f64>() + 0.5;
        let r = minimize_on_ball(q, &small());
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn su2_identity_distance() {
        let id = ComplexMatrix::identity(2);
        let cfg = OptimConfig::su2_default().with_grid_points(12 * 12 * 12).with_seed(3);
        let r = minimize_over_su2(|u| (u - &id).frobenius_norm().powi(2), &cfg);
        assert!(r.value < 1e-12);
        assert!((&r.point.to_unitary() - &id).max_abs() < 1e-5);
    }

    #[test]
    fn su2_params_are_unitary() {
        for k in 0..50 {
            let t = k as f64 * 0.37;
            assert!(su2_from_angles(t, t * 1.3, -t).unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn deterministic_results() {
        let f = |m: &[f64; 3]| (m[0] - 0.3).abs() + m[1] * m[2];
        assert_eq!(minimize_on_sphere(f, &small()), minimize_on_sphere(f, &small()));
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let nm = NelderMead {
            tol: 1e-12,
            max_iters: 5000,
            restarts: 2,
        };
        let r = nm.minimize(|x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2), &[-1.2, 1.0], 0.5);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
    }
}
