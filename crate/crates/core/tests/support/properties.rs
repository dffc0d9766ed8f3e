//! Discrete identities of the operators, evaluated on arbitrary fields.
//!
//! Each check returns a defect scaled by the natural size of the quantities
//! involved, so a correct implementation gives round-off (about 1e-15).

use chns::linsolve::solve_poisson;
use chns::ops;
use chns::{FaceField, FaceKind, Grid, ScalarField, ScalarKind};

/// Random inputs for one evaluation of every identity.
pub struct Sample {
    pub f: ScalarField,
    pub g: ScalarField,
    /// Positive cell fields.
    pub rho: ScalarField,
    pub nu: ScalarField,
    pub coef: ScalarField,
    pub u: FaceField,
    pub w: FaceField,
    pub j: FaceField,
}

/// Number of values [`Sample::from_values`] consumes for grid `g`.
pub fn sample_len(g: &Grid) -> usize {
    5 * g.n_cells() + 3 * (g.n_u() + g.n_v())
}

impl Sample {
    /// Builds a sample from values in `[-1, 1]`.
    pub fn from_values(g: &Grid, vals: &[f64]) -> Sample {
        assert_eq!(vals.len(), sample_len(g));
        let nc = g.n_cells();
        let nf = g.n_u() + g.n_v();
        let mut it = vals.chunks(nc);
        let mut cells = |kind, shift: f64| {
            let d: Vec<f64> = it.next().unwrap().iter().map(|v| v + shift).collect();
            ScalarField::from_vec(g, kind, d).unwrap()
        };
        let f = cells(ScalarKind::Generic, 0.0);
        let gg = cells(ScalarKind::Generic, 0.0);
        let rho = cells(ScalarKind::Generic, 2.0);
        let nu = cells(ScalarKind::Generic, 1.5);
        let coef = cells(ScalarKind::Generic, 1.0).map(|c| c.max(0.0));
        let rest = &vals[5 * nc..];
        let faces = |k: usize, kind| {
            let mut x = FaceField::from_flat(g, kind, &rest[k * nf..(k + 1) * nf]).unwrap();
            x.apply_wall_bc(g);
            x
        };
        Sample {
            f,
            g: gg,
            rho,
            nu,
            coef,
            u: faces(0, FaceKind::Velocity),
            w: faces(1, FaceKind::Velocity),
            j: faces(2, FaceKind::Flux),
        }
    }
}

fn cnorm(g: &Grid, a: &ScalarField) -> f64 {
    ops::norm_sq_cells(g, a).sqrt()
}

fn fnorm(g: &Grid, a: &FaceField) -> f64 {
    ops::norm_sq_faces(g, a).sqrt()
}

/// Smallest nonzero eigenvalue of `-lap` on grid `g`.
pub fn poisson_gap(g: &Grid) -> f64 {
    let axis = |n: usize, h: f64, periodic: bool| {
        let theta = if periodic { 2.0 } else { 1.0 } * std::f64::consts::PI / n as f64;
        (2.0 - 2.0 * theta.cos()) / (h * h)
    };
    axis(g.nx, g.hx, g.bc.x.is_periodic()).min(axis(g.ny, g.hy, g.bc.y.is_periodic()))
}

/// `(name, scaled defect)` for every identity.
pub fn defects(g: &Grid, s: &Sample) -> Vec<(&'static str, f64)> {
    let mut out = Vec::new();
    let (f, gg, u, w, j) = (&s.f, &s.g, &s.u, &s.w, &s.j);

    // summation by parts
    let gf = ops::gradient(g, f).unwrap();
    let divu = ops::divergence(g, u).unwrap();
    let a = ops::inner_faces(g, &gf, u);
    let b = -ops::inner_cells(g, f, &divu);
    let scale = fnorm(g, &gf) * fnorm(g, u) + cnorm(g, f) * cnorm(g, &divu);
    out.push(("summation by parts", (a - b).abs() / scale));

    // skew-symmetry of convection, as a bilinear form in the advected field
    let c_uu = ops::convection_momentum(g, &s.rho, w, u).unwrap();
    let c_ww = ops::convection_momentum(g, &s.rho, w, w).unwrap();
    let quad = ops::inner_faces(g, &c_uu, u);
    out.push(("convection skew (quadratic)", quad.abs() / (fnorm(g, &c_uu) * fnorm(g, u))));
    let x = ops::inner_faces(g, &c_uu, w) + ops::inner_faces(g, &c_ww, u);
    let scale = fnorm(g, &c_uu) * fnorm(g, w) + fnorm(g, &c_ww) * fnorm(g, u);
    out.push(("convection skew (bilinear)", x.abs() / scale));

    let f_uu = ops::flux_gradient_terms(g, j, u).unwrap();
    let f_ww = ops::flux_gradient_terms(g, j, w).unwrap();
    let quad = ops::inner_faces(g, &f_uu, u);
    out.push(("flux-term skew (quadratic)", quad.abs() / (fnorm(g, &f_uu) * fnorm(g, u))));
    let x = ops::inner_faces(g, &f_uu, w) + ops::inner_faces(g, &f_ww, u);
    let scale = fnorm(g, &f_uu) * fnorm(g, w) + fnorm(g, &f_ww) * fnorm(g, u);
    out.push(("flux-term skew (bilinear)", x.abs() / scale));

    // Poisson operator: symmetric, positive definite on mean-free fields
    let lf = ops::laplacian(g, f).unwrap();
    let lg = ops::laplacian(g, gg).unwrap();
    let x = ops::inner_cells(g, &lf, gg) - ops::inner_cells(g, f, &lg);
    let scale = cnorm(g, &lf) * cnorm(g, gg) + cnorm(g, f) * cnorm(g, &lg);
    out.push(("laplacian symmetry", x.abs() / scale));
    let energy = -ops::inner_cells(g, &lf, f);
    let f0 = f.map(|v| v - f.mean());
    let bound = poisson_gap(g) * ops::norm_sq_cells(g, &f0);
    out.push(("poisson definiteness", ((bound - energy) / (cnorm(g, &lf) * cnorm(g, f))).max(0.0)));
    let x = solve_poisson(g, f).unwrap();
    let res = ops::laplacian(g, &x).unwrap().lincomb(1.0, &f0, -1.0);
    out.push(("poisson solve residual", cnorm(g, &res) / cnorm(g, &f0)));
    out.push(("poisson solution mean", x.mean().abs() / x.max_abs()));

    // variable-coefficient operator
    let cf = ops::face_average(g, &s.coef).unwrap();
    let df = ops::div_coef_grad(g, &cf, f).unwrap();
    let dg = ops::div_coef_grad(g, &cf, gg).unwrap();
    let x = ops::inner_cells(g, &df, gg) - ops::inner_cells(g, f, &dg);
    let scale = cnorm(g, &df) * cnorm(g, gg) + cnorm(g, f) * cnorm(g, &dg);
    out.push(("div_coef_grad symmetry", x.abs() / scale));
    let q = ops::inner_cells(g, &df, f);
    out.push(("div_coef_grad semi-definiteness", (q / (cnorm(g, &df) * cnorm(g, f))).max(0.0)));

    // transport and capillary force cancel
    let adv = ops::advect_scalar(g, u, f).unwrap();
    let cap = ops::capillary_force(g, f, gg).unwrap();
    let x = ops::inner_cells(g, &adv, gg) + ops::inner_faces(g, &cap, u);
    let scale = cnorm(g, &adv) * cnorm(g, gg) + fnorm(g, &cap) * fnorm(g, u);
    out.push(("transport/capillary cancellation", x.abs() / scale));
    out.push(("advection conserves the integral", ops::integrate(g, &adv).abs() / (cnorm(g, &adv) * g.area().sqrt())));

    // viscous operator: symmetric, matches its dissipation
    let su = ops::strain_divergence(g, &s.nu, u).unwrap();
    let sw = ops::strain_divergence(g, &s.nu, w).unwrap();
    let x = ops::inner_faces(g, &su, w) - ops::inner_faces(g, &sw, u);
    let scale = fnorm(g, &su) * fnorm(g, w) + fnorm(g, &sw) * fnorm(g, u);
    out.push(("strain symmetry", x.abs() / scale));
    let diss = ops::strain_dissipation(g, &s.nu, u).unwrap();
    let x = -ops::inner_faces(g, &su, u) - diss;
    out.push(("strain dissipation identity", x.abs() / (fnorm(g, &su) * fnorm(g, u))));
    out.push(("strain dissipation sign", (-diss).max(0.0)));

    // linearity
    let comb = f.lincomb(2.0, gg, -0.5);
    let x = ops::laplacian(g, &comb).unwrap().lincomb(1.0, &lf.lincomb(2.0, &lg, -0.5), -1.0);
    out.push(("laplacian linearity", cnorm(g, &x) / cnorm(g, &lf)));
    let uw = u.lincomb(0.7, w, 1.3);
    let x = ops::strain_divergence(g, &s.nu, &uw).unwrap().lincomb(1.0, &su.lincomb(0.7, &sw, 1.3), -1.0);
    out.push(("strain linearity", fnorm(g, &x) / fnorm(g, &su)));
    out
}
