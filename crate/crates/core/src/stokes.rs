//! MINI element (P1 + cubic bubble velocity, P1 pressure) discretization of
//! the stationary Stokes problem with the deformation-rate viscous form,
//! homogeneous Dirichlet velocity and mean-zero pressure.

use std::sync::Arc;

use crate::error::Result;
use crate::geometry::{Point2, Vec2};
use crate::mesh::Mesh;
use crate::quadrature::QuadratureRule;
use crate::solver::{solve_symmetric_indefinite, SaddleOperator, SolveOutcome, SolverOptions, SparseMatrix, TripletBuilder};

const CONSTRAINED: usize = usize::MAX;

/// Bubble scaling so that `27 l0 l1 l2` equals one at the centroid.
pub const BUBBLE_SCALE: f64 = 27.0;

/// Velocity and pressure spaces on a mesh.
///
/// Free velocity unknowns are numbered `2 k + comp` for the k-th free vertex
/// followed by `2 (n_free + cell) + comp` for the bubbles.
#[derive(Clone, Debug)]
pub struct FemSpaces {
    mesh: Arc<Mesh>,
    free_index: Vec<usize>,
    n_free_vertices: usize,
}

impl FemSpaces {
    /// Spaces with boundary vertex velocities constrained to zero.
    pub fn new(mesh: Arc<Mesh>) -> Self {
        let flags = mesh.boundary.clone();
        Self::with_constraints(mesh, &flags)
    }

    /// Spaces without any Dirichlet constraint (used to probe the forms on
    /// fields that do not vanish on the boundary).
    pub fn without_boundary_conditions(mesh: Arc<Mesh>) -> Self {
        let flags = vec![false; mesh.num_vertices()];
        Self::with_constraints(mesh, &flags)
    }

    fn with_constraints(mesh: Arc<Mesh>, constrained: &[bool]) -> Self {
        let mut free_index = vec![CONSTRAINED; mesh.num_vertices()];
        let mut k = 0;
        for (v, &fixed) in constrained.iter().enumerate() {
            if !fixed {
                free_index[v] = k;
                k += 1;
            }
        }
        Self {
            mesh,
            free_index,
            n_free_vertices: k,
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn n_velocity(&self) -> usize {
        2 * (self.n_free_vertices + self.mesh.num_cells())
    }

    pub fn n_pressure(&self) -> usize {
        self.mesh.num_vertices()
    }

    /// Global free dof of a vertex velocity component, if not constrained.
    pub fn vertex_dof(&self, vertex: usize, comp: usize) -> Option<usize> {
        let k = self.free_index[vertex];
        (k != CONSTRAINED).then(|| 2 * k + comp)
    }

    pub fn bubble_dof(&self, cell: usize, comp: usize) -> usize {
        2 * (self.n_free_vertices + cell) + comp
    }

    /// Local velocity dofs: three vertex functions then the bubble, each
    /// with two components.
    fn local_dofs(&self, cell: usize) -> [[Option<usize>; 2]; 4] {
        let verts = self.mesh.cells[cell];
        let mut out = [[None; 2]; 4];
        for a in 0..3 {
            for comp in 0..2 {
                out[a][comp] = self.vertex_dof(verts[a], comp);
            }
        }
        out[3] = [Some(self.bubble_dof(cell, 0)), Some(self.bubble_dof(cell, 1))];
        out
    }

    /// Free velocity vector interpolating `f` at vertices, bubbles zero.
    pub fn interpolate_velocity(&self, f: impl Fn(Point2) -> Vec2) -> Vec<f64> {
        let mut out = vec![0.0; self.n_velocity()];
        for (v, x) in self.mesh.vertices.iter().enumerate() {
            let val = f(*x);
            for comp in 0..2 {
                if let Some(d) = self.vertex_dof(v, comp) {
                    out[d] = val[comp];
                }
            }
        }
        out
    }

    pub fn interpolate_pressure(&self, f: impl Fn(Point2) -> f64) -> Vec<f64> {
        self.mesh.vertices.iter().map(|x| f(*x)).collect()
    }
}

/// Values and gradients of the four scalar shape functions
/// `l0, l1, l2, 27 l0 l1 l2` at barycentric point `l`.
pub fn shape_functions(l: [f64; 3], grads: &[[f64; 2]; 3]) -> ([f64; 4], [[f64; 2]; 4]) {
    let b = BUBBLE_SCALE * l[0] * l[1] * l[2];
    let mut gb = [0.0; 2];
    for k in 0..2 {
        gb[k] = BUBBLE_SCALE
            * (l[1] * l[2] * grads[0][k] + l[0] * l[2] * grads[1][k] + l[0] * l[1] * grads[2][k]);
    }
    ([l[0], l[1], l[2], b], [grads[0], grads[1], grads[2], gb])
}

/// Viscous bilinear form variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViscousForm {
    /// `nu/2 int (du_j/dx_i + du_i/dx_j)(dv_j/dx_i + dv_i/dx_j)`.
    DeformationRate,
    /// `nu int du_j/dx_i dv_j/dx_i`; kept for comparison only.
    FullGradient,
}

/// Viscous operator on the free velocity dofs.
pub fn assemble_viscous(spaces: &FemSpaces, nu: f64) -> SparseMatrix {
    assemble_viscous_form(spaces, nu, ViscousForm::DeformationRate)
}

pub fn assemble_viscous_form(spaces: &FemSpaces, nu: f64, form: ViscousForm) -> SparseMatrix {
    let mesh = spaces.mesh();
    let rule = QuadratureRule::order4();
    let n = spaces.n_velocity();
    let mut t = TripletBuilder::with_capacity(n, n, 64 * mesh.num_cells());
    for cell in 0..mesh.num_cells() {
        let grads = mesh.barycentric_gradients(cell);
        let area = mesh.cell_area(cell);
        let mut local = [[0.0; 8]; 8];
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let (_, g) = shape_functions(*l, &grads);
            let wq = w * area * nu;
            for a in 0..4 {
                for b in 0..4 {
                    let gg = g[a][0] * g[b][0] + g[a][1] * g[b][1];
                    for c in 0..2 {
                        for d in 0..2 {
                            let v = match form {
                                ViscousForm::DeformationRate => {
                                    (if c == d { gg } else { 0.0 }) + g[a][d] * g[b][c]
                                }
                                ViscousForm::FullGradient => {
                                    if c == d {
                                        gg
                                    } else {
                                        0.0
                                    }
                                }
                            };
                            local[2 * a + c][2 * b + d] += wq * v;
                        }
                    }
                }
            }
        }
        let dofs = spaces.local_dofs(cell);
        for a in 0..4 {
            for c in 0..2 {
                let Some(row) = dofs[a][c] else { continue };
                for b in 0..4 {
                    for d in 0..2 {
                        if let Some(col) = dofs[b][d] {
                            t.push(row, col, local[2 * a + c][2 * b + d]);
                        }
                    }
                }
            }
        }
    }
    t.finalize().expect("dof indices are in range")
}

/// Divergence coupling `B[k, j] = -int psi_k div(phi_j)` (pressure rows,
/// free velocity columns) and the pressure integrals `c[k] = int psi_k`.
pub fn assemble_divergence(spaces: &FemSpaces) -> (SparseMatrix, Vec<f64>) {
    let mesh = spaces.mesh();
    let rule = QuadratureRule::order4();
    let np = spaces.n_pressure();
    let mut t = TripletBuilder::with_capacity(np, spaces.n_velocity(), 24 * mesh.num_cells());
    let mut c = vec![0.0; np];
    for cell in 0..mesh.num_cells() {
        let grads = mesh.barycentric_gradients(cell);
        let area = mesh.cell_area(cell);
        let verts = mesh.cells[cell];
        let mut local = [[0.0; 8]; 3];
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let (_, g) = shape_functions(*l, &grads);
            let wq = w * area;
            for k in 0..3 {
                for a in 0..4 {
                    for comp in 0..2 {
                        local[k][2 * a + comp] -= wq * l[k] * g[a][comp];
                    }
                }
            }
        }
        let dofs = spaces.local_dofs(cell);
        for k in 0..3 {
            c[verts[k]] += area / 3.0;
            for a in 0..4 {
                for comp in 0..2 {
                    if let Some(col) = dofs[a][comp] {
                        t.push(verts[k], col, local[k][2 * a + comp]);
                    }
                }
            }
        }
    }
    (t.finalize().expect("dof indices are in range"), c)
}

/// Consistent P1 mass matrix on the pressure space.
pub fn assemble_pressure_mass(spaces: &FemSpaces) -> SparseMatrix {
    let mesh = spaces.mesh();
    let np = spaces.n_pressure();
    let mut t = TripletBuilder::with_capacity(np, np, 9 * mesh.num_cells());
    for cell in 0..mesh.num_cells() {
        let area = mesh.cell_area(cell);
        let verts = mesh.cells[cell];
        for i in 0..3 {
            for j in 0..3 {
                let m = if i == j { area / 6.0 } else { area / 12.0 };
                t.push(verts[i], verts[j], m);
            }
        }
    }
    t.finalize().expect("dof indices are in range")
}

/// Load vector against every velocity basis function, constrained ones
/// included: `(vertex loads, bubble loads)`.
pub fn assemble_load_all<F>(mesh: &Mesh, force: F, rule: &QuadratureRule) -> (Vec<Vec2>, Vec<Vec2>)
where
    F: Fn(Point2) -> Vec2,
{
    let mut vertex = vec![[0.0; 2]; mesh.num_vertices()];
    let mut bubble = vec![[0.0; 2]; mesh.num_cells()];
    for cell in 0..mesh.num_cells() {
        let pts = mesh.cell_points(cell);
        let area = mesh.cell_area(cell);
        let verts = mesh.cells[cell];
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let x = crate::mesh::barycentric_to_point(&pts, *l);
            let f = force(x);
            if f == [0.0, 0.0] {
                continue;
            }
            let wq = w * area;
            let b = BUBBLE_SCALE * l[0] * l[1] * l[2];
            for a in 0..3 {
                vertex[verts[a]][0] += wq * l[a] * f[0];
                vertex[verts[a]][1] += wq * l[a] * f[1];
            }
            bubble[cell][0] += wq * b * f[0];
            bubble[cell][1] += wq * b * f[1];
        }
    }
    (vertex, bubble)
}

/// Right-hand side `(force, v_h)` on the free velocity dofs, summed over
/// cells in ascending order and quadrature points in rule order.
pub fn assemble_rhs<F>(spaces: &FemSpaces, force: F, quad_order: u32) -> Result<Vec<f64>>
where
    F: Fn(Point2) -> Vec2,
{
    let rule = QuadratureRule::for_order(quad_order)?;
    let mesh = spaces.mesh();
    let (vertex, bubble) = assemble_load_all(mesh, force, &rule);
    let mut rhs = vec![0.0; spaces.n_velocity()];
    for (v, load) in vertex.iter().enumerate() {
        for comp in 0..2 {
            if let Some(d) = spaces.vertex_dof(v, comp) {
                rhs[d] = load[comp];
            }
        }
    }
    for (cell, load) in bubble.iter().enumerate() {
        for comp in 0..2 {
            rhs[spaces.bubble_dof(cell, comp)] = load[comp];
        }
    }
    Ok(rhs)
}

/// Assembled discrete Stokes problem.
#[derive(Clone, Debug)]
pub struct StokesSystem {
    pub spaces: FemSpaces,
    pub op: SaddleOperator,
    pub rhs_u: Vec<f64>,
    pub nu: f64,
}

impl StokesSystem {
    pub fn assemble<F>(spaces: FemSpaces, nu: f64, force: F, quad_order: u32) -> Result<Self>
    where
        F: Fn(Point2) -> Vec2,
    {
        if !(nu > 0.0) {
            return Err(crate::Error::InvalidArgument(format!("viscosity must be positive, got {nu}")));
        }
        let a = assemble_viscous(&spaces, nu);
        let (b, c) = assemble_divergence(&spaces);
        let rhs_u = assemble_rhs(&spaces, force, quad_order)?;
        let op = SaddleOperator::new(a, b, Some(c))?;
        Ok(Self { spaces, op, rhs_u, nu })
    }

    /// Full right-hand side including the zero divergence and mean rows.
    pub fn rhs(&self) -> Vec<f64> {
        let mut r = self.rhs_u.clone();
        r.resize(self.op.dim(), 0.0);
        r
    }

    pub fn solve(&self, opts: &SolverOptions) -> Result<DiscreteSolution> {
        let outcome = solve_symmetric_indefinite(&self.op, &self.rhs(), opts)?;
        let sol = DiscreteSolution::from_outcome(&self.spaces, &outcome);
        Ok(sol.with_mean_zero_pressure())
    }
}

/// MINI-element velocity and P1 pressure on a mesh.
#[derive(Clone, Debug)]
pub struct DiscreteSolution {
    pub mesh: Arc<Mesh>,
    pub vertex_velocity: Vec<Vec2>,
    pub bubble_velocity: Vec<Vec2>,
    pub pressure: Vec<f64>,
    /// Pressure integrals `int psi_k`, used for the mean.
    pub pressure_weights: Vec<f64>,
    /// Relative residual certificate of the linear solve.
    pub residual: f64,
    pub iterations: usize,
}

impl DiscreteSolution {
    pub fn zero(mesh: Arc<Mesh>) -> Self {
        let nv = mesh.num_vertices();
        let nc = mesh.num_cells();
        let pressure_weights = pressure_integrals(&mesh);
        Self {
            mesh,
            vertex_velocity: vec![[0.0; 2]; nv],
            bubble_velocity: vec![[0.0; 2]; nc],
            pressure: vec![0.0; nv],
            pressure_weights,
            residual: 0.0,
            iterations: 0,
        }
    }

    fn from_outcome(spaces: &FemSpaces, outcome: &SolveOutcome) -> Self {
        let mut sol = Self::zero(spaces.mesh().clone());
        for v in 0..sol.vertex_velocity.len() {
            for comp in 0..2 {
                if let Some(d) = spaces.vertex_dof(v, comp) {
                    sol.vertex_velocity[v][comp] = outcome.x[d];
                }
            }
        }
        for cell in 0..sol.bubble_velocity.len() {
            for comp in 0..2 {
                sol.bubble_velocity[cell][comp] = outcome.x[spaces.bubble_dof(cell, comp)];
            }
        }
        let nu = spaces.n_velocity();
        sol.pressure.copy_from_slice(&outcome.x[nu..nu + spaces.n_pressure()]);
        sol.residual = outcome.residual;
        sol.iterations = outcome.iterations;
        sol
    }

    /// Free velocity coefficients in the numbering of `spaces`.
    pub fn velocity_vector(&self, spaces: &FemSpaces) -> Vec<f64> {
        let mut out = vec![0.0; spaces.n_velocity()];
        for (v, val) in self.vertex_velocity.iter().enumerate() {
            for comp in 0..2 {
                if let Some(d) = spaces.vertex_dof(v, comp) {
                    out[d] = val[comp];
                }
            }
        }
        for (cell, val) in self.bubble_velocity.iter().enumerate() {
            for comp in 0..2 {
                out[spaces.bubble_dof(cell, comp)] = val[comp];
            }
        }
        out
    }

    /// `int p_h dx`.
    pub fn pressure_integral(&self) -> f64 {
        self.pressure_weights
            .iter()
            .zip(&self.pressure)
            .map(|(c, p)| c * p)
            .sum()
    }

    /// Shifts the pressure by the constant that makes its integral zero.
    pub fn with_mean_zero_pressure(mut self) -> Self {
        let area: f64 = self.pressure_weights.iter().sum();
        let shift = self.pressure_integral() / area;
        for p in &mut self.pressure {
            *p -= shift;
        }
        self
    }
}

pub fn pressure_integrals(mesh: &Mesh) -> Vec<f64> {
    let mut c = vec![0.0; mesh.num_vertices()];
    for cell in 0..mesh.num_cells() {
        let a = mesh.cell_area(cell) / 3.0;
        for &v in &mesh.cells[cell] {
            c[v] += a;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AxisBox;

    fn mesh(n: usize) -> Arc<Mesh> {
        Arc::new(Mesh::uniform(n, AxisBox::symmetric_unit()).unwrap())
    }

    fn energy(a: &SparseMatrix, v: &[f64]) -> f64 {
        a.mul_vec(v).iter().zip(v).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn dof_counts() {
        let m = mesh(4);
        let s = FemSpaces::new(m.clone());
        assert_eq!(s.n_pressure(), 25);
        assert_eq!(s.n_velocity(), 2 * (9 + 32));
        let free = FemSpaces::without_boundary_conditions(m);
        assert_eq!(free.n_velocity(), 2 * (25 + 32));
    }

    #[test]
    fn bubble_normalization() {
        let g = [[0.0; 2]; 3];
        let (v, _) = shape_functions([1.0 / 3.0; 3], &g);
        assert!((v[3] - 1.0).abs() < 1e-15);
        let (v, _) = shape_functions([1.0, 0.0, 0.0], &g);
        assert_eq!(v[3], 0.0);
    }

    #[test]
    fn rigid_motions_have_zero_energy() {
        let s = FemSpaces::without_boundary_conditions(mesh(6));
        let a = assemble_viscous(&s, 1.0);
        assert!(a.asymmetry() < 1e-14);
        for field in [
            Box::new(|_: Point2| [1.0, 0.0]) as Box<dyn Fn(Point2) -> Vec2>,
            Box::new(|_| [0.0, 1.0]),
            Box::new(|x: Point2| [-x[1], x[0]]),
        ] {
            let v = s.interpolate_velocity(field);
            let scale = v.iter().map(|x| x * x).sum::<f64>();
            assert!(energy(&a, &v).abs() < 1e-12 * scale);
        }
        // stretching field: nu/2 int (2^2 + 2^2) over area 4
        let v = s.interpolate_velocity(|x| [x[0], -x[1]]);
        assert!((energy(&a, &v) - 16.0).abs() < 1e-11);
    }

    #[test]
    fn full_gradient_foil_sees_rotation() {
        let s = FemSpaces::without_boundary_conditions(mesh(6));
        let a = assemble_viscous_form(&s, 1.0, ViscousForm::FullGradient);
        let v = s.interpolate_velocity(|x| [-x[1], x[0]]);
        assert!((energy(&a, &v) - 8.0).abs() < 1e-11);
    }

    #[test]
    fn divergence_of_linear_fields() {
        let s = FemSpaces::without_boundary_conditions(mesh(5));
        let (b, c) = assemble_divergence(&s);
        assert!((c.iter().sum::<f64>() - 4.0).abs() < 1e-13);
        let ones = vec![1.0; s.n_pressure()];
        let v = s.interpolate_velocity(|x| [x[0], 0.0]);
        let bv = b.mul_vec(&v);
        let total: f64 = bv.iter().zip(&ones).map(|(a, b)| a * b).sum();
        assert!((total + 4.0).abs() < 1e-12);

        let rot = s.interpolate_velocity(|x| [-x[1], x[0]]);
        assert!(b.mul_vec(&rot).iter().all(|v| v.abs() < 1e-14));

        // bubbles are divergence-free on average
        let mut bubble = vec![0.0; s.n_velocity()];
        bubble[s.bubble_dof(7, 0)] = 1.0;
        bubble[s.bubble_dof(11, 1)] = 1.0;
        let total: f64 = b.mul_vec(&bubble).iter().sum();
        assert!(total.abs() < 1e-14);
    }

    #[test]
    fn rhs_partition_of_unity() {
        let m = mesh(8);
        let s = FemSpaces::new(m.clone());
        let zero = assemble_rhs(&s, |_| [0.0, 0.0], 6).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        let (vertex, _) = assemble_load_all(&m, |_| [1.0, 0.0], &QuadratureRule::order6());
        let total: f64 = vertex.iter().map(|v| v[0]).sum();
        assert!((total - 4.0).abs() < 1e-12);
        assert!(vertex.iter().all(|v| v[1] == 0.0));
    }

    #[test]
    fn zero_force_gives_zero_solution() {
        let sys = StokesSystem::assemble(FemSpaces::new(mesh(4)), 1.0, |_| [0.0, 0.0], 6).unwrap();
        let sol = sys.solve(&SolverOptions::default()).unwrap();
        assert!(sol.vertex_velocity.iter().all(|v| *v == [0.0, 0.0]));
        assert!(sol.pressure.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn mean_shift() {
        let mut sol = DiscreteSolution::zero(mesh(3));
        sol.pressure = vec![1.0; sol.pressure.len()];
        let shifted = sol.with_mean_zero_pressure();
        assert!(shifted.pressure.iter().all(|p| p.abs() < 1e-15));

        let mut sol = DiscreteSolution::zero(mesh(4));
        sol.pressure = sol.mesh.vertices.iter().map(|x| x[0]).collect();
        let before = sol.pressure.clone();
        let shifted = sol.with_mean_zero_pressure();
        for (a, b) in shifted.pressure.iter().zip(&before) {
            assert!((a - b).abs() < 1e-15);
        }

        let mut sol = DiscreteSolution::zero(mesh(5));
        sol.pressure = (0..sol.pressure.len()).map(|i| (i as f64 * 0.37).sin() + 3.0).collect();
        let shifted = sol.with_mean_zero_pressure();
        assert!(shifted.pressure_integral().abs() < 1e-14);
    }
}
