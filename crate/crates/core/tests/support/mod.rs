//! Dense reference implementation of one time step on a small periodic grid.
//!
//! Every operator is assembled as an explicit matrix from its stencil, and
//! every linear system is solved by LU factorisation. Nothing here calls the
//! library's operators or solvers; only plain data crosses the boundary.

#![allow(dead_code)]

pub mod properties;

use nalgebra::{DMatrix, DVector};

use chns::{FaceField, FaceKind, FluidParams, Grid, Mobility, ScalarField, ScalarKind, SimState};

/// Periodic `n x n` grid of spacing `h`; cells and faces are numbered
/// `i + n j`, velocity vectors are `[u..., v...]`.
#[derive(Clone, Copy, Debug)]
pub struct Mesh {
    pub n: usize,
    pub h: f64,
}

impl Mesh {
    pub fn new(n: usize, length: f64) -> Self {
        Mesh { n, h: length / n as f64 }
    }

    pub fn cells(&self) -> usize {
        self.n * self.n
    }

    pub fn c(&self, i: isize, j: isize) -> usize {
        let n = self.n as isize;
        (i.rem_euclid(n) + n * j.rem_euclid(n)) as usize
    }

    pub fn u(&self, i: isize, j: isize) -> usize {
        self.c(i, j)
    }

    pub fn v(&self, i: isize, j: isize) -> usize {
        self.cells() + self.c(i, j)
    }

    pub fn weight(&self) -> f64 {
        self.h * self.h
    }

    /// Cell to face differences.
    pub fn grad(&self) -> DMatrix<f64> {
        let (n, h) = (self.n as isize, self.h);
        let mut m = DMatrix::zeros(2 * self.cells(), self.cells());
        for j in 0..n {
            for i in 0..n {
                m[(self.u(i, j), self.c(i, j))] += 1.0 / h;
                m[(self.u(i, j), self.c(i - 1, j))] -= 1.0 / h;
                m[(self.v(i, j), self.c(i, j))] += 1.0 / h;
                m[(self.v(i, j), self.c(i, j - 1))] -= 1.0 / h;
            }
        }
        m
    }

    /// Face to cell differences.
    pub fn div(&self) -> DMatrix<f64> {
        let (n, h) = (self.n as isize, self.h);
        let mut m = DMatrix::zeros(self.cells(), 2 * self.cells());
        for j in 0..n {
            for i in 0..n {
                let r = self.c(i, j);
                m[(r, self.u(i + 1, j))] += 1.0 / h;
                m[(r, self.u(i, j))] -= 1.0 / h;
                m[(r, self.v(i, j + 1))] += 1.0 / h;
                m[(r, self.v(i, j))] -= 1.0 / h;
            }
        }
        m
    }

    /// Five-point Laplacian written out directly.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.n as isize;
        let r = 1.0 / (self.h * self.h);
        let mut m = DMatrix::zeros(self.cells(), self.cells());
        for j in 0..n {
            for i in 0..n {
                let k = self.c(i, j);
                for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    m[(k, self.c(i + di, j + dj))] += r;
                }
                m[(k, k)] -= 4.0 * r;
            }
        }
        m
    }

    /// Cell to face arithmetic mean.
    pub fn avg(&self) -> DMatrix<f64> {
        let n = self.n as isize;
        let mut m = DMatrix::zeros(2 * self.cells(), self.cells());
        for j in 0..n {
            for i in 0..n {
                m[(self.u(i, j), self.c(i, j))] += 0.5;
                m[(self.u(i, j), self.c(i - 1, j))] += 0.5;
                m[(self.v(i, j), self.c(i, j))] += 0.5;
                m[(self.v(i, j), self.c(i, j - 1))] += 0.5;
            }
        }
        m
    }

    /// Mean of the four cells around corner `(i, j)` at `(i h, j h)`.
    pub fn corner(&self, f: &DVector<f64>, i: isize, j: isize) -> f64 {
        0.25 * (f[self.c(i - 1, j - 1)] + f[self.c(i, j - 1)] + f[self.c(i - 1, j)] + f[self.c(i, j)])
    }

    /// Skew-symmetric convection `rho (w.grad) u + div(rho w) u / 2` acting on
    /// `u`, built as the conservative finite-volume form over each velocity
    /// control volume minus half the mass imbalance of that volume. `rho` is
    /// a cell field; `None` means unit density.
    pub fn convection(&self, rho: Option<&DVector<f64>>, w: &DVector<f64>) -> DMatrix<f64> {
        let (n, h) = (self.n as isize, self.h);
        let rc = |i: isize, j: isize| rho.map_or(1.0, |r| r[self.c(i, j)]);
        let rk = |i: isize, j: isize| rho.map_or(1.0, |r| self.corner(r, i, j));
        let mut m = DMatrix::zeros(2 * self.cells(), 2 * self.cells());
        let mut volume = |row: usize, faces: [(f64, f64, usize); 4]| {
            // (sign, mass flux, neighbour) for east/west/north/south
            let mut imbalance = 0.0;
            for (sign, flux, nb) in faces {
                m[(row, nb)] += 0.5 * sign * flux / h;
                m[(row, row)] += 0.5 * sign * flux / h;
                imbalance += sign * flux / h;
            }
            m[(row, row)] -= 0.5 * imbalance;
        };
        for j in 0..n {
            for i in 0..n {
                let wu = |a: isize, b: isize| w[self.u(a, b)];
                let wv = |a: isize, b: isize| w[self.v(a, b)];
                let row = self.u(i, j);
                volume(
                    row,
                    [
                        (1.0, rc(i, j) * 0.5 * (wu(i, j) + wu(i + 1, j)), self.u(i + 1, j)),
                        (-1.0, rc(i - 1, j) * 0.5 * (wu(i - 1, j) + wu(i, j)), self.u(i - 1, j)),
                        (1.0, rk(i, j + 1) * 0.5 * (wv(i - 1, j + 1) + wv(i, j + 1)), self.u(i, j + 1)),
                        (-1.0, rk(i, j) * 0.5 * (wv(i - 1, j) + wv(i, j)), self.u(i, j - 1)),
                    ],
                );
                let row = self.v(i, j);
                volume(
                    row,
                    [
                        (1.0, rk(i + 1, j) * 0.5 * (wu(i + 1, j - 1) + wu(i + 1, j)), self.v(i + 1, j)),
                        (-1.0, rk(i, j) * 0.5 * (wu(i, j - 1) + wu(i, j)), self.v(i - 1, j)),
                        (1.0, rc(i, j) * 0.5 * (wv(i, j) + wv(i, j + 1)), self.v(i, j + 1)),
                        (-1.0, rc(i, j - 1) * 0.5 * (wv(i, j - 1) + wv(i, j)), self.v(i, j - 1)),
                    ],
                );
            }
        }
        m
    }

    /// `-div(nu (grad u + grad u^T))` as the Hessian of the dissipation
    /// `sum_cells nu (2 (du/dx)^2 + 2 (dv/dy)^2) + sum_corners nu_c shear^2`.
    pub fn neg_strain(&self, nu: &DVector<f64>) -> DMatrix<f64> {
        let (n, h) = (self.n as isize, self.h);
        let nc = self.cells();
        let mut ex: DMatrix<f64> = DMatrix::zeros(nc, 2 * nc);
        let mut ey: DMatrix<f64> = DMatrix::zeros(nc, 2 * nc);
        let mut sh: DMatrix<f64> = DMatrix::zeros(nc, 2 * nc);
        let mut nu_corner: DVector<f64> = DVector::zeros(nc);
        for j in 0..n {
            for i in 0..n {
                let k = self.c(i, j);
                ex[(k, self.u(i + 1, j))] += 1.0 / h;
                ex[(k, self.u(i, j))] -= 1.0 / h;
                ey[(k, self.v(i, j + 1))] += 1.0 / h;
                ey[(k, self.v(i, j))] -= 1.0 / h;
                // corner (i, j)
                sh[(k, self.u(i, j))] += 1.0 / h;
                sh[(k, self.u(i, j - 1))] -= 1.0 / h;
                sh[(k, self.v(i, j))] += 1.0 / h;
                sh[(k, self.v(i - 1, j))] -= 1.0 / h;
                nu_corner[k] = self.corner(nu, i, j);
            }
        }
        let two_nu = DMatrix::from_diagonal(&(nu * 2.0));
        ex.transpose() * &two_nu * &ex
            + ey.transpose() * &two_nu * &ey
            + sh.transpose() * DMatrix::from_diagonal(&nu_corner) * &sh
    }

    /// Mean-free solution of `lap x = b - mean(b)` by a bordered system.
    pub fn poisson(&self, b: &DVector<f64>) -> DVector<f64> {
        let nc = self.cells();
        let mut a = DMatrix::zeros(nc + 1, nc + 1);
        a.view_mut((0, 0), (nc, nc)).copy_from(&self.laplacian());
        for k in 0..nc {
            a[(k, nc)] = 1.0;
            a[(nc, k)] = 1.0;
        }
        let mean = b.mean();
        let mut rhs = DVector::zeros(nc + 1);
        for k in 0..nc {
            rhs[k] = b[k] - mean;
        }
        let x = a.lu().solve(&rhs).expect("bordered poisson is regular");
        x.rows(0, nc).into_owned()
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(b) * self.weight()
    }
}

/// Fields at one level, in oracle layout.
#[derive(Clone, Debug)]
pub struct Level {
    pub phi: DVector<f64>,
    pub mu: DVector<f64>,
    pub vel: DVector<f64>,
    pub increment: DVector<f64>,
    pub sav: [f64; 5],
}

#[derive(Clone, Debug)]
pub struct OracleState {
    pub now: Level,
    pub p: DVector<f64>,
    pub prev: Option<Level>,
}

fn clip(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

pub fn rho(phi: &DVector<f64>, p: &FluidParams) -> DVector<f64> {
    phi.map(|x| 0.5 * clip(x) * (p.rho1 - p.rho2) + 0.5 * (p.rho1 + p.rho2))
}

pub fn nu(phi: &DVector<f64>, p: &FluidParams) -> DVector<f64> {
    phi.map(|x| 0.5 * clip(x) * (p.nu1 - p.nu2) + 0.5 * (p.nu1 + p.nu2))
}

pub fn mobility(phi: &DVector<f64>, p: &FluidParams) -> DVector<f64> {
    phi.map(|x| match p.mobility {
        Mobility::Constant { m0 } => m0,
        Mobility::Degenerate { gamma } => gamma * (x * x - 1.0).powi(2),
    })
}

pub fn e0(mesh: &Mesh, phi: &DVector<f64>, p: &FluidParams) -> f64 {
    let sum: f64 = phi
        .iter()
        .map(|&x| 0.25 * (x * x - 1.0).powi(2) - 0.5 * p.s * x * x)
        .sum();
    p.lambda / p.epsilon * sum * mesh.weight()
}

/// `lambda (-eps lap phi + (phi^3 - phi) / eps)`.
pub fn chemical(mesh: &Mesh, phi: &DVector<f64>, p: &FluidParams) -> DVector<f64> {
    let lap = mesh.laplacian() * phi;
    DVector::from_fn(phi.len(), |k, _| {
        p.lambda * (-p.epsilon * lap[k] + (phi[k].powi(3) - phi[k]) / p.epsilon)
    })
}

/// One step of the scheme; second order only when `second` is requested and
/// a previous level exists.
pub fn step(mesh: &Mesh, st: &OracleState, p: &FluidParams, dt: f64, second: bool) -> OracleState {
    let nc = mesh.cells();
    let prev = if second { st.prev.as_ref() } else { None };
    let (a0, cn, cm, en, em) = match prev {
        Some(_) => (1.5, 2.0, -0.5, 2.0, -1.0),
        None => (1.0, 1.0, 0.0, 1.0, 0.0),
    };
    let now = &st.now;
    let comb = |x: &DVector<f64>, y: Option<&DVector<f64>>, a: f64, b: f64| match y {
        Some(y) => x * a + y * b,
        None => x * a,
    };
    let sav_prev = |k: usize| prev.map_or(0.0, |l| l.sav[k]);
    let star = |k: usize| en * now.sav[k] + em * sav_prev(k);
    let hist = |k: usize| cn * now.sav[k] + cm * sav_prev(k);
    let (r_s, q_s, rr_s, t_s, k_s) = (star(0), star(1), star(2), star(3), star(4));

    let phi_s = comb(&now.phi, prev.map(|l| &l.phi), en, em);
    let phi_h = comb(&now.phi, prev.map(|l| &l.phi), cn, cm);
    let mu_s = comb(&now.mu, prev.map(|l| &l.mu), en, em);
    let vel_s = comb(&now.vel, prev.map(|l| &l.vel), en, em);
    let vel_h = comb(&now.vel, prev.map(|l| &l.vel), cn, cm);

    let grad = mesh.grad();
    let div = mesh.div();
    let lap = mesh.laplacian();
    let avg = mesh.avg();

    // Cahn-Hilliard block
    let mf = &avg * mobility(&phi_s, p);
    let lm = &div * DMatrix::from_diagonal(&mf) * &grad;
    let mut a = DMatrix::zeros(2 * nc, 2 * nc);
    a.view_mut((0, 0), (nc, nc))
        .copy_from(&(DMatrix::identity(nc, nc) * (a0 / dt)));
    a.view_mut((0, nc), (nc, nc)).copy_from(&(-&lm));
    a.view_mut((nc, 0), (nc, nc)).copy_from(
        &(&lap * (p.lambda * p.epsilon) - DMatrix::identity(nc, nc) * (p.lambda * p.s / p.epsilon)),
    );
    a.view_mut((nc, nc), (nc, nc)).copy_from(&DMatrix::identity(nc, nc));
    let adv = &div * (avg.clone() * &phi_s).component_mul(&vel_s);
    let nl = phi_s.map(|x| x * x * x - x - p.s * x);
    let b1 = &phi_h / dt - &adv * q_s;
    let b2 = &nl * (p.lambda * r_s / p.epsilon);
    let mut b = DVector::zeros(2 * nc);
    b.rows_mut(0, nc).copy_from(&b1);
    b.rows_mut(nc, nc).copy_from(&b2);
    let x = a.lu().solve(&b).expect("cahn-hilliard block is regular");
    let phi1 = x.rows(0, nc).into_owned();
    let mu1 = x.rows(nc, nc).into_owned();

    let e0_hist = cn * e0(mesh, &now.phi, p) + cm * prev.map_or(0.0, |l| e0(mesh, &l.phi, p));
    let r_rhs = p.alpha
        * (-(a0 * e0(mesh, &phi1, p) - e0_hist)
            + p.lambda * r_s / p.epsilon * mesh.inner(&nl, &(&phi1 * a0 - &phi_h)));
    let r1 = (hist(0) + r_rhs) / a0;

    // momentum
    let rho_f1 = &avg * rho(&phi1, p);
    let rho_fn = &avg * rho(&now.phi, p);
    let rho_fm = prev.map(|l| &avg * rho(&l.phi, p));
    let rho_fh = comb(&rho_fn, rho_fm.as_ref(), cn, cm);
    let nu1 = nu(&phi1, p);
    let mass = (&rho_f1 * (1.5 * a0) - &rho_fh * 0.5) * (k_s / dt);
    let mom = DMatrix::from_diagonal(&mass) + mesh.neg_strain(&nu1);

    let p_ext = match prev {
        Some(l) => &st.p + &now.increment * (4.0 / 3.0) - &l.increment * (1.0 / 3.0),
        None => &st.p + &now.increment,
    };
    let jf = (&avg * mobility(&phi_s, p)).component_mul(&(&grad * &mu_s)) * (0.5 * (p.rho2 - p.rho1));
    let conv = mesh.convection(Some(&rho(&phi1, p)), &vel_s) * &vel_s;
    let flux = mesh.convection(None, &jf) * &vel_s;
    let explicit = conv + flux + &grad * &p_ext;
    let cap = (&avg * &phi_s).component_mul(&(&grad * &mu_s));
    let grav = DVector::from_fn(2 * nc, |k, _| rho_f1[k] * if k < nc { p.gravity[0] } else { p.gravity[1] });
    let rhs = rho_f1.component_mul(&vel_h) * (k_s / dt) - &explicit * rr_s - &cap * q_s + grav;
    let vel1 = mom.lu().solve(&rhs).expect("momentum system is regular");

    let rr1 = (hist(2) + dt * p.alpha * rr_s * mesh.inner(&explicit, &vel1)) / a0;

    let kinetic = |r: &DVector<f64>, u: &DVector<f64>| 0.5 * r.dot(&u.component_mul(u)) * mesh.weight();
    let e_hist = cn * kinetic(&rho_fn, &now.vel)
        + cm * match (prev, &rho_fm) {
            (Some(l), Some(r)) => kinetic(r, &l.vel),
            _ => 0.0,
        };
    let force = rho_f1.component_mul(&(&vel1 * a0 - &vel_h)) + (&rho_f1 * a0 - &rho_fh).component_mul(&vel1) * 0.5;
    let k_integrand = (-(a0 * kinetic(&rho_f1, &vel1) - e_hist) + k_s * mesh.inner(&force, &vel1)) / dt;
    let k1 = (hist(4) + dt * p.alpha * k_integrand) / a0;

    let q_integrand = mesh.inner(&adv, &mu1) + mesh.inner(&cap, &vel1);
    let q1 = (hist(1) + dt * p.alpha * q_s * q_integrand) / a0;

    // pressure
    let chi = p.rho1.min(p.rho2);
    let dv = &div * &vel1;
    let (inc, p1, t_integrand) = match prev {
        None => {
            let psi = mesh.poisson(&(&dv * (t_s * chi / (2.0 * dt))));
            let p1 = &st.p + &psi;
            let ti = mesh.inner(&p1, &dv);
            (psi, p1, ti)
        }
        Some(_) => {
            let omega = mesh.poisson(&(&dv * (t_s * 3.0 * chi / (2.0 * dt))));
            let nudiv = nu1.component_mul(&dv);
            let p1 = &omega + &st.p - &nudiv * t_s;
            let beta = 2.0 * dt / (3.0 * chi);
            let ti = mesh.inner(&p1, &dv) + beta * mesh.inner(&(&grad * &nudiv), &(&grad * &p1));
            (omega, p1, ti)
        }
    };
    let t1 = (hist(3) + dt * p.alpha * t_s * t_integrand) / a0;

    OracleState {
        now: Level {
            phi: phi1,
            mu: mu1,
            vel: vel1,
            increment: inc,
            sav: [r1, q1, rr1, t1, k1],
        },
        p: p1,
        prev: second.then(|| now.clone()),
    }
}

/// Face vector in oracle layout from a library face field on a periodic grid.
pub fn faces_to_vec(g: &Grid, f: &FaceField) -> DVector<f64> {
    let nc = g.n_cells();
    let mut out = DVector::zeros(2 * nc);
    for j in 0..g.ny {
        for i in 0..g.nx {
            out[i + g.nx * j] = f.u[g.uidx(i, j)];
            out[nc + i + g.nx * j] = f.v[g.vidx(i, j)];
        }
    }
    out
}

pub fn vec_to_faces(g: &Grid, x: &DVector<f64>) -> FaceField {
    let nc = g.n_cells();
    let mut f = FaceField::zeros(g, FaceKind::Velocity);
    for j in 0..g.ny {
        for i in 0..g.nx {
            f.u[g.uidx(i, j)] = x[i + g.nx * j];
            f.v[g.vidx(i, j)] = x[nc + i + g.nx * j];
        }
    }
    f
}

pub fn cells_to_vec(f: &ScalarField) -> DVector<f64> {
    DVector::from_column_slice(&f.data)
}

pub fn vec_to_cells(g: &Grid, kind: ScalarKind, x: &DVector<f64>) -> ScalarField {
    ScalarField::from_vec(g, kind, x.as_slice().to_vec()).expect("length matches grid")
}

/// Largest absolute difference between the library state and the oracle,
/// per named quantity.
pub fn compare(state: &SimState, o: &OracleState) -> Vec<(&'static str, f64)> {
    let g = &state.grid;
    let diff = |a: &DVector<f64>, b: &DVector<f64>| (a - b).amax();
    let sav = state.sav.current.as_array();
    let mut out = vec![
        ("phi", diff(&cells_to_vec(&state.phi), &o.now.phi)),
        ("mu", diff(&cells_to_vec(&state.mu), &o.now.mu)),
        ("velocity", diff(&faces_to_vec(g, &state.vel), &o.now.vel)),
        ("pressure", diff(&cells_to_vec(&state.p), &o.p)),
        ("increment", diff(&cells_to_vec(&state.increment), &o.now.increment)),
    ];
    for (k, name) in ["r", "Q", "R", "T", "K"].into_iter().enumerate() {
        out.push((name, (sav[k] - o.now.sav[k]).abs()));
    }
    out
}

/// Parameters exercising every term: density and viscosity contrast,
/// degenerate mobility, gravity and a large relaxation constant.
pub fn oracle_params(mobility: Mobility) -> FluidParams {
    FluidParams {
        rho1: 3.0,
        rho2: 1.0,
        nu1: 0.5,
        nu2: 0.1,
        lambda: 0.05,
        epsilon: 0.4,
        s: 2.0,
        alpha: 0.5,
        mobility,
        gravity: [0.1, -0.98],
    }
}

/// Smooth initial data on `[0, 2 pi]^2`; `phi` slightly overshoots 1 so the
/// clipping in the material laws is active.
pub fn oracle_initial(mesh: &Mesh, p: &FluidParams) -> OracleState {
    let n = mesh.n as isize;
    let h = mesh.h;
    let nc = mesh.cells();
    let mut phi = DVector::zeros(nc);
    let mut vel = DVector::zeros(2 * nc);
    for j in 0..n {
        for i in 0..n {
            let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            phi[mesh.c(i, j)] = 0.9 * x.sin() * (2.0 * y).cos() + 0.25 * (3.0 * x + y).cos();
            let (xu, yu) = (i as f64 * h, (j as f64 + 0.5) * h);
            vel[mesh.u(i, j)] = 0.3 * yu.sin() + 0.1 * xu.cos();
            let (xv, yv) = ((i as f64 + 0.5) * h, j as f64 * h);
            vel[mesh.v(i, j)] = 0.2 * (xv + yv).sin() - 0.05 * (2.0 * yv).cos();
        }
    }
    let mu = chemical(mesh, &phi, p);
    OracleState {
        now: Level {
            phi,
            mu,
            vel,
            increment: DVector::zeros(nc),
            sav: [1.0; 5],
        },
        p: DVector::zeros(nc),
        prev: None,
    }
}

/// The same initial data as a library state.
pub fn library_initial(g: &Grid, o: &OracleState) -> SimState {
    SimState::new(
        g.clone(),
        vec_to_cells(g, ScalarKind::Phi, &o.now.phi),
        vec_to_faces(g, &o.now.vel),
        vec_to_cells(g, ScalarKind::Mu, &o.now.mu),
    )
    .expect("valid initial state")
}

/// Worst field and auxiliary-variable mismatch between the library and the
/// oracle on an 8x8 periodic grid: one first-order step, and a second-order
/// run of two steps (bootstrap, then a genuine second-order step).
pub fn equivalence(mobility: Mobility) -> Vec<(String, f64)> {
    use chns::{BcSpec, Order, SchemeConfig, Tolerances};
    use chns::scheme::Stepper;

    let length = 2.0 * std::f64::consts::PI;
    let mesh = Mesh::new(8, length);
    let g = Grid::new(8, 8, length, length, BcSpec::PERIODIC).unwrap();
    let p = oracle_params(mobility);
    let dt = 0.02;
    let tol = Tolerances {
        ch: 1e-14,
        momentum: 1e-14,
        poisson: 1e-11,
        max_iter: 5000,
    };
    let o0 = oracle_initial(&mesh, &p);
    let mut out = Vec::new();
    for order in [Order::First, Order::Second] {
        let scheme = SchemeConfig::with_tolerances(order, dt, &p, tol).unwrap();
        let stepper = Stepper::new(&g, p.clone(), scheme).unwrap();
        let second = order == Order::Second;
        let mut lib = library_initial(&g, &o0);
        let mut ora = o0.clone();
        let steps = if second { 2 } else { 1 };
        for k in 0..steps {
            lib = stepper.advance(&lib).expect("library step").0;
            ora = step(&mesh, &ora, &p, dt, second);
            for (name, d) in compare(&lib, &ora) {
                out.push((format!("order {} step {}: {name}", order.as_u8(), k + 1), d));
            }
        }
    }
    out
}
