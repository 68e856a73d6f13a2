use crate::error::{Error, Result};
use crate::linalg::SymTridiag;

/// Uniform mesh of (0, 1) with `n` interior nodes x_k = k h, h = 1/(n+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mesh1D {
    n: usize,
}

impl Mesh1D {
    pub fn new(interior: usize) -> Result<Self> {
        if interior == 0 {
            return Err(Error::ParameterDomain(
                "a 1D mesh needs at least one interior node".into(),
            ));
        }
        Ok(Self { n: interior })
    }

    /// h = 2^{-k}: the midpoint is a node.
    pub fn dyadic(k: u32) -> Result<Self> {
        Self::new((1usize << k) - 1)
    }

    /// h = 1/(2^k + 1): the midpoint falls inside an element.
    pub fn shifted(k: u32) -> Result<Self> {
        Self::new(1usize << k)
    }

    pub fn interior(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n + 1) as f64
    }

    /// Node k = 0..=n+1 (0 and n+1 are the boundary).
    pub fn node(&self, k: usize) -> f64 {
        k as f64 / (self.n + 1) as f64
    }

    /// Unit-coefficient stiffness (1/h) tridiag(-1, 2, -1).
    pub fn stiffness(&self) -> SymTridiag {
        let h = self.h();
        SymTridiag::new(vec![2.0 / h; self.n], vec![-1.0 / h; self.n - 1])
    }

    /// Consistent mass h tridiag(1/6, 2/3, 1/6).
    pub fn mass(&self) -> SymTridiag {
        let h = self.h();
        SymTridiag::new(vec![2.0 * h / 3.0; self.n], vec![h / 6.0; self.n - 1])
    }

    /// Value of the hat of interior node k at x.
    pub fn hat(&self, k: usize, x: f64) -> f64 {
        (1.0 - (x - self.node(k)).abs() / self.h()).max(0.0)
    }
}

/// Uniform triangulation of the unit square: `n` subdivisions per axis,
/// each cell split by its diagonal from (x_i, y_j) to (x_{i+1}, y_{j+1}).
/// Interior nodes (i, j), 1 ≤ i, j ≤ n-1, are stored at (i-1)(n-1) + (j-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mesh2D {
    n: usize,
}

impl Mesh2D {
    pub fn new(subdivisions: usize) -> Result<Self> {
        if subdivisions < 2 {
            return Err(Error::ParameterDomain("a 2D mesh needs at least 2 subdivisions".into()));
        }
        Ok(Self { n: subdivisions })
    }

    pub fn dyadic(k: u32) -> Result<Self> {
        Self::new(1usize << k)
    }

    pub fn subdivisions(&self) -> usize {
        self.n
    }

    /// Interior nodes per axis.
    pub fn side(&self) -> usize {
        self.n - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        (i - 1) * (self.n - 1) + (j - 1)
    }

    /// Hat of the (possibly boundary) node (i, j) at (x, y).
    pub fn hat(&self, i: usize, j: usize, x: f64, y: f64) -> f64 {
        let xi = x / self.h() - i as f64;
        let eta = y / self.h() - j as f64;
        (1.0 - xi.abs().max(eta.abs()).max((xi - eta).abs())).max(0.0)
    }

    /// Triangles as vertex index triples (i, j), counter-clockwise.
    pub fn triangles(&self) -> impl Iterator<Item = [(usize, usize); 3]> + '_ {
        (0..self.n).flat_map(move |i| {
            (0..self.n).flat_map(move |j| {
                [
                    [(i, j), (i + 1, j), (i + 1, j + 1)],
                    [(i, j), (i + 1, j + 1), (i, j + 1)],
                ]
            })
        })
    }

    /// Triangle containing (x, y); on shared edges either neighbour.
    pub fn locate(&self, x: f64, y: f64) -> [(usize, usize); 3] {
        let n = self.n;
        let i = ((x * n as f64).floor() as isize).clamp(0, n as isize - 1) as usize;
        let j = ((y * n as f64).floor() as isize).clamp(0, n as isize - 1) as usize;
        let (dx, dy) = (x * n as f64 - i as f64, y * n as f64 - j as f64);
        if dx >= dy {
            [(i, j), (i + 1, j), (i + 1, j + 1)]
        } else {
            [(i, j), (i + 1, j + 1), (i, j + 1)]
        }
    }

    pub fn is_interior(&self, (i, j): (usize, usize)) -> bool {
        i >= 1 && j >= 1 && i < self.n && j < self.n
    }

    /// y = (5-point stiffness) x; the P1 stiffness of this mesh.
    pub fn stiffness_apply(&self, x: &[f64]) -> Vec<f64> {
        self.stencil_apply(x, 4.0, -1.0, 0.0)
    }

    /// y = M x, consistent mass: h²/2 on the diagonal, h²/12 to the axial
    /// and the (1,1)/(-1,-1) diagonal neighbours.
    pub fn mass_apply(&self, x: &[f64]) -> Vec<f64> {
        let h2 = self.h() * self.h();
        self.stencil_apply(x, h2 / 2.0, h2 / 12.0, h2 / 12.0)
    }

    fn stencil_apply(&self, x: &[f64], center: f64, axial: f64, diagonal: f64) -> Vec<f64> {
        let m = self.side() as isize;
        let at = |i: isize, j: isize| {
            if i < 0 || j < 0 || i >= m || j >= m {
                0.0
            } else {
                x[(i * m + j) as usize]
            }
        };
        (0..(m * m) as usize)
            .map(|idx| {
                let (i, j) = (idx as isize / m, idx as isize % m);
                center * at(i, j)
                    + axial * (at(i - 1, j) + at(i + 1, j) + at(i, j - 1) + at(i, j + 1))
                    + diagonal * (at(i - 1, j - 1) + at(i + 1, j + 1))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mesh {
    D1(Mesh1D),
    D2(Mesh2D),
}

impl Mesh {
    pub fn h(&self) -> f64 {
        match self {
            Mesh::D1(m) => m.h(),
            Mesh::D2(m) => m.h(),
        }
    }

    pub fn dofs(&self) -> usize {
        match self {
            Mesh::D1(m) => m.interior(),
            Mesh::D2(m) => m.side() * m.side(),
        }
    }

    /// Diagonal of the lumped mass (h or h²).
    pub fn lumped_weight(&self) -> f64 {
        match self {
            Mesh::D1(m) => m.h(),
            Mesh::D2(m) => m.h() * m.h(),
        }
    }

    pub fn mass_apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Mesh::D1(m) => m.mass().mul(x),
            Mesh::D2(m) => m.mass_apply(x),
        }
    }

    pub fn stiffness_apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Mesh::D1(m) => m.stiffness().mul(x),
            Mesh::D2(m) => m.stiffness_apply(x),
        }
    }
}

/// Finite element function by its interior nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    pub mesh: Mesh,
    pub values: Vec<f64>,
}

impl NodalField {
    pub fn new(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.dofs() {
            return Err(Error::ParameterDomain(format!(
                "expected {} nodal values, got {}",
                mesh.dofs(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver("non-finite nodal value".into()));
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: Mesh) -> Self {
        Self {
            mesh,
            values: vec![0.0; mesh.dofs()],
        }
    }

    /// ‖u_h‖²_{L²} = Uᵀ M U.
    pub fn l2_norm_sq(&self) -> f64 {
        dot(&self.mesh.mass_apply(&self.values), &self.values)
    }

    /// ‖∇u_h‖²_{L²} = Uᵀ S U.
    pub fn h1_seminorm_sq(&self) -> f64 {
        dot(&self.mesh.stiffness_apply(&self.values), &self.values)
    }

    /// Point value of the piecewise-linear interpolant.
    pub fn value_at(&self, point: &[f64]) -> f64 {
        match self.mesh {
            Mesh::D1(m) => {
                let x = point[0];
                let k = ((x / m.h()).floor() as usize).min(m.interior());
                let left = if k >= 1 { self.values[k - 1] } else { 0.0 };
                let right = if k < m.interior() { self.values[k] } else { 0.0 };
                let s = x / m.h() - k as f64;
                left * (1.0 - s) + right * s
            }
            Mesh::D2(m) => {
                let (x, y) = (point[0], point[1]);
                m.locate(x, y)
                    .iter()
                    .filter(|&&v| m.is_interior(v))
                    .map(|&(i, j)| self.values[m.index(i, j)] * m.hat(i, j, x, y))
                    .sum()
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
