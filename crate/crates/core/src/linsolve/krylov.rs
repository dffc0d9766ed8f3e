use super::{LinearOperator, SolveReport};
use crate::ops::dot;

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += a * x);
}

fn residual(op: &dyn LinearOperator, b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; b.len()];
    op.apply(x, &mut r);
    r.iter_mut().zip(b).for_each(|(r, b)| *r = b - *r);
    r
}

fn inverse_diagonal(op: &dyn LinearOperator) -> Option<Vec<f64>> {
    op.diagonal().map(|d| {
        d.into_iter()
            .map(|v| if v != 0.0 && v.is_finite() { 1.0 / v } else { 1.0 })
            .collect()
    })
}

fn start(op: &dyn LinearOperator, b: &[f64], x0: Option<&[f64]>) -> Vec<f64> {
    assert_eq!(op.dim(), b.len(), "{}: rhs length mismatch", op.describe());
    match x0 {
        Some(x) => x.to_vec(),
        None => vec![0.0; b.len()],
    }
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive-definite
/// operators.
pub fn cg(
    op: &dyn LinearOperator,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, SolveReport) {
    let mut x = start(op, b, x0);
    let bn = norm(b);
    if bn == 0.0 {
        return (vec![0.0; b.len()], SolveReport::trivial());
    }
    let minv = inverse_diagonal(op);
    let precond = |r: &[f64]| -> Vec<f64> {
        match &minv {
            Some(m) => r.iter().zip(m).map(|(r, m)| r * m).collect(),
            None => r.to_vec(),
        }
    };
    let mut r = residual(op, b, &x);
    let mut rel = norm(&r) / bn;
    if rel <= tol {
        return (x, report(0, rel, true));
    }
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; b.len()];
    for it in 1..=max_iter {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return (x, report(it, rel, false));
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        rel = norm(&r) / bn;
        if rel <= tol {
            let true_rel = norm(&residual(op, b, &x)) / bn;
            if true_rel <= tol {
                return (x, report(it, true_rel, true));
            }
            r = residual(op, b, &x);
        }
        z = precond(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }
    let true_rel = norm(&residual(op, b, &x)) / bn;
    (x, report(max_iter, true_rel, true_rel <= tol))
}

/// Jacobi right-preconditioned BiCGStab for general operators.
pub fn bicgstab(
    op: &dyn LinearOperator,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, SolveReport) {
    let mut x = start(op, b, x0);
    let n = b.len();
    let bn = norm(b);
    if bn == 0.0 {
        return (vec![0.0; n], SolveReport::trivial());
    }
    let minv = inverse_diagonal(op);
    let precond = |v: &[f64], out: &mut [f64]| match &minv {
        Some(m) => out.iter_mut().zip(v).zip(m).for_each(|((o, v), m)| *o = v * m),
        None => out.copy_from_slice(v),
    };
    let mut r = residual(op, b, &x);
    let mut rel = norm(&r) / bn;
    if rel <= tol {
        return (x, report(0, rel, true));
    }
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return (x, report(it, rel, false));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        precond(&p, &mut phat);
        op.apply(&phat, &mut v);
        let rv = dot(&r_hat, &v);
        if rv == 0.0 {
            return (x, report(it, rel, false));
        }
        alpha = rho / rv;
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
        }
        if norm(&s) / bn <= tol {
            axpy(alpha, &phat, &mut x);
            let true_rel = norm(&residual(op, b, &x)) / bn;
            if true_rel <= tol {
                return (x, report(it, true_rel, true));
            }
            r = residual(op, b, &x);
            rel = true_rel;
            continue;
        }
        precond(&s, &mut shat);
        op.apply(&shat, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for k in 0..n {
            x[k] += alpha * phat[k] + omega * shat[k];
            r[k] = s[k] - omega * t[k];
        }
        rel = norm(&r) / bn;
        if rel <= tol {
            let true_rel = norm(&residual(op, b, &x)) / bn;
            if true_rel <= tol {
                return (x, report(it, true_rel, true));
            }
            r = residual(op, b, &x);
        }
    }
    let true_rel = norm(&residual(op, b, &x)) / bn;
    (x, report(max_iter, true_rel, true_rel <= tol))
}

/// CG for symmetric operators, BiCGStab otherwise.
pub fn solve_krylov(
    op: &dyn LinearOperator,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, SolveReport) {
    if op.is_symmetric() {
        cg(op, b, x0, tol, max_iter)
    } else {
        bicgstab(op, b, x0, tol, max_iter)
    }
}

/// Conjugate gradients for `A = c I + L S` where `L` and `S` are symmetric,
/// `L` positive semi-definite and `S` positive definite. `A` is then
/// self-adjoint and positive in the `S` inner product, which is the metric
/// used here. `s` and `l` write their result into the second argument.
pub fn solve_s_metric_cg(
    c: f64,
    s: &dyn Fn(&[f64], &mut [f64]),
    l: &dyn Fn(&[f64], &mut [f64]),
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, SolveReport) {
    let n = b.len();
    let bn = norm(b);
    if bn == 0.0 {
        return (vec![0.0; n], SolveReport::trivial());
    }
    let mut x = x0.map_or_else(|| vec![0.0; n], |x| x.to_vec());
    let mut tmp = vec![0.0; n];
    let apply_a = |x: &[f64], sx: &[f64], out: &mut [f64], tmp: &mut [f64]| {
        l(sx, tmp);
        out.iter_mut()
            .zip(x)
            .zip(tmp.iter())
            .for_each(|((o, x), t)| *o = c * x + t);
    };
    let true_residual = |x: &[f64], tmp: &mut [f64]| -> Vec<f64> {
        let mut sx = vec![0.0; n];
        s(x, &mut sx);
        let mut ax = vec![0.0; n];
        apply_a(x, &sx, &mut ax, tmp);
        ax.iter().zip(b).map(|(a, b)| b - a).collect()
    };
    let mut r = true_residual(&x, &mut tmp);
    let mut rel = norm(&r) / bn;
    if rel <= tol {
        return (x, report(0, rel, true));
    }
    let mut sr = vec![0.0; n];
    s(&r, &mut sr);
    let mut p = r.clone();
    let mut sp = sr.clone();
    let mut rho = dot(&r, &sr);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        apply_a(&p, &sp, &mut ap, &mut tmp);
        let pap = dot(&ap, &sp);
        if !(pap > 0.0) || !(rho > 0.0) {
            return (x, report(it, rel, false));
        }
        let alpha = rho / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        rel = norm(&r) / bn;
        if rel <= tol {
            let tr = true_residual(&x, &mut tmp);
            let true_rel = norm(&tr) / bn;
            if true_rel <= tol {
                return (x, report(it, true_rel, true));
            }
            r = tr;
        }
        s(&r, &mut sr);
        let rho_new = dot(&r, &sr);
        let beta = rho_new / rho;
        rho = rho_new;
        p.iter_mut().zip(&r).for_each(|(p, r)| *p = r + beta * *p);
        sp.iter_mut().zip(&sr).for_each(|(p, r)| *p = r + beta * *p);
    }
    let true_rel = norm(&true_residual(&x, &mut tmp)) / bn;
    (x, report(max_iter, true_rel, true_rel <= tol))
}

fn report(iterations: usize, final_residual: f64, converged: bool) -> SolveReport {
    SolveReport {
        iterations,
        final_residual,
        converged,
    }
}
