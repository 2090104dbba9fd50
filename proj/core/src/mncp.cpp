#include "tumblesim/mncp.hpp"

#include <Eigen/QR>
#include <Eigen/LU>

#include <cmath>
#include <limits>

namespace tumble {

namespace {

bool finite(const VecX& v) { return v.allFinite(); }

// Generalized Jacobian of the FB transform given raw [G; F] and dR/dz.
void fb_system(const MncpProblem& p, const VecX& z, const VecX& raw, const MatX& draw, VecX& phi, MatX& jac,
               Real eps)
{
    const int n = p.size();
    phi.resize(n);
    jac.resize(n, n);
    phi.head(p.n_eq) = raw.head(p.n_eq);
    jac.topRows(p.n_eq) = draw.topRows(p.n_eq);
    for (int i = 0; i < p.n_comp; ++i) {
        const int row = p.n_eq + i;
        const Real a = z[p.n_eq + i];
        const Real b = raw[row];
        const Real r = std::sqrt(a * a + b * b + 2.0 * eps * eps);
        phi[row] = a + b - r;
        Real da, db;
        if (r > 1e-300) {
            da = 1.0 - a / r;
            db = 1.0 - b / r;
        } else {
            da = db = 1.0 - 1.0 / std::sqrt(2.0);
        }
        jac.row(row) = db * draw.row(row);
        jac(row, p.n_eq + i) += da;
    }
}

void raw_with_jacobian(const MncpProblem& p, const VecX& z, VecX& raw, MatX& draw, Real fd_step)
{
    if (p.jacobian) {
        p.jacobian(z, raw, draw);
    } else {
        raw.resize(p.size());
        p.residual(z, raw);
        draw = fd_jacobian(p, z, fd_step);
    }
}

VecX fb_only(const MncpProblem& p, const VecX& z, const VecX& raw, Real eps = 0.0)
{
    VecX phi = raw;
    for (int i = 0; i < p.n_comp; ++i) {
        const Real a = z[p.n_eq + i], b = raw[p.n_eq + i];
        phi[p.n_eq + i] = eps > 0 ? a + b - std::sqrt(a * a + b * b + 2.0 * eps * eps) : fischer_burmeister(a, b);
    }
    return phi;
}

} // namespace

void SolverConfig::validate() const
{
    if (!(tolerance > 0))
        throw ModelError("solver tolerance must be positive");
    if (max_iters < 1)
        throw ModelError("solver max_iters must be at least 1");
}

std::string to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NonConvergence: return "non_convergence";
    case SolveStatus::SingularJacobian: return "singular_jacobian";
    case SolveStatus::NonFinite: return "non_finite";
    }
    return "unknown";
}

VecX fb_residual(const MncpProblem& p, const VecX& z)
{
    VecX raw(p.size());
    p.residual(z, raw);
    return fb_only(p, z, raw);
}

Real merit(const MncpProblem& p, const VecX& z)
{
    const VecX phi = fb_residual(p, z);
    if (!finite(phi))
        throw ModelError("complementarity residual is not finite");
    return phi.lpNorm<Eigen::Infinity>();
}

MatX fd_jacobian(const MncpProblem& p, const VecX& z, Real fd_step)
{
    const int n = p.size();
    MatX jac(n, n);
    VecX zp = z, rp(n), rm(n);
    for (int j = 0; j < n; ++j) {
        const Real h = fd_step * std::max(1.0, std::abs(z[j]));
        zp[j] = z[j] + h;
        p.residual(zp, rp);
        zp[j] = z[j] - h;
        p.residual(zp, rm);
        zp[j] = z[j];
        jac.col(j) = (rp - rm) / (2.0 * h);
    }
    return jac;
}

MatX jacobian(const MncpProblem& p, const VecX& z, Real fd_step)
{
    VecX raw;
    MatX draw;
    raw_with_jacobian(p, z, raw, draw, fd_step);
    return draw;
}

namespace {

// Semismooth Newton on the (optionally smoothed) FB system.
MncpResult newton(const MncpProblem& p, const VecX& z0, const SolverConfig& cfg, Real eps, Real tol, int max_iters)
{
    const int n = p.size();

    MncpResult res;
    res.z = z0;
    VecX raw, phi;
    MatX draw, jac;

    raw_with_jacobian(p, res.z, raw, draw, cfg.fd_step);
    fb_system(p, res.z, raw, draw, phi, jac, eps);
    if (!finite(phi) || !draw.allFinite()) {
        res.status = SolveStatus::NonFinite;
        res.residual = std::numeric_limits<Real>::infinity();
        return res;
    }
    Real inf_norm = phi.lpNorm<Eigen::Infinity>();
    res.merit_trace.push_back(inf_norm);

    for (int it = 0; it < max_iters; ++it) {
        if (inf_norm <= tol) {
            res.status = SolveStatus::Converged;
            res.residual = inf_norm;
            return res;
        }
        res.iterations = it + 1;

        VecX d = Eigen::PartialPivLU<MatX>(jac).solve(-phi);
        if (!d.allFinite() || (jac * d + phi).norm() > 1e-8 * (1.0 + phi.norm())) {
            // rank deficient, minimum-norm step
            MatX reg = jac.transpose() * jac;
            reg.diagonal().array() += cfg.regularization * (1.0 + reg.diagonal().cwiseAbs().maxCoeff());
            d = Eigen::CompleteOrthogonalDecomposition<MatX>(jac).solve(-phi);
            if (!d.allFinite())
                d = Eigen::CompleteOrthogonalDecomposition<MatX>(reg).solve(-(jac.transpose() * phi));
            if (!d.allFinite()) {
                res.status = SolveStatus::SingularJacobian;
                res.residual = inf_norm;
                return res;
            }
        }

        const Real psi = 0.5 * phi.squaredNorm();
        Real t = 1.0;
        VecX trial = res.z;
        VecX trial_phi;
        bool accepted = false;
        for (int k = 0; k <= cfg.max_backtracks; ++k) {
            trial = res.z + t * d;
            VecX tr(n);
            p.residual(trial, tr);
            trial_phi = fb_only(p, trial, tr, eps);
            if (finite(trial_phi) && 0.5 * trial_phi.squaredNorm() <= (1.0 - 2.0 * cfg.armijo_c * t) * psi) {
                accepted = true;
                break;
            }
            t *= cfg.backtrack;
        }
        if (!accepted) {
            // full step if it still lowers the inf-norm
            trial = res.z + d;
            VecX tr(n);
            p.residual(trial, tr);
            trial_phi = fb_only(p, trial, tr, eps);
            accepted = finite(trial_phi) && trial_phi.lpNorm<Eigen::Infinity>() < inf_norm;
        }
        if (!accepted) {
            // Levenberg-Marquardt on the merit
            const MatX jtj = jac.transpose() * jac;
            const VecX g = jac.transpose() * phi;
            Real lm = std::max(1e-12, 1e-6 * jtj.diagonal().maxCoeff());
            for (int k = 0; k < 24 && !accepted; ++k, lm *= 10.0) {
                MatX a = jtj;
                a.diagonal().array() += lm;
                const VecX dl = a.ldlt().solve(-g);
                if (!dl.allFinite())
                    continue;
                trial = res.z + dl;
                VecX tr(n);
                p.residual(trial, tr);
                trial_phi = fb_only(p, trial, tr, eps);
                accepted = finite(trial_phi) && 0.5 * trial_phi.squaredNorm() < (1.0 - 1e-8) * psi;
            }
            if (!accepted) {
                res.status = SolveStatus::NonConvergence;
                res.residual = inf_norm;
                return res;
            }
        }
        res.z = trial;
        raw_with_jacobian(p, res.z, raw, draw, cfg.fd_step);
        fb_system(p, res.z, raw, draw, phi, jac, eps);
        if (!finite(phi) || !draw.allFinite()) {
            res.status = SolveStatus::NonFinite;
            res.residual = std::numeric_limits<Real>::infinity();
            return res;
        }
        inf_norm = phi.lpNorm<Eigen::Infinity>();
        res.merit_trace.push_back(inf_norm);
    }
    res.residual = inf_norm;
    res.status = inf_norm <= tol ? SolveStatus::Converged : SolveStatus::NonConvergence;
    return res;
}

} // namespace

MncpResult solve(const MncpProblem& p, const VecX& z0, const SolverConfig& cfg)
{
    if (z0.size() != p.size())
        throw ModelError("warm start has the wrong dimension");
    MncpResult res = newton(p, z0, cfg, 0.0, cfg.tolerance, cfg.max_iters);
    if (res.converged() || res.status == SolveStatus::NonFinite || cfg.smoothing_levels <= 0)
        return res;

    // smoothing continuation: eps -> 0, each level warm-started from the last
    VecX z = res.z;
    int iters = res.iterations;
    std::vector<Real> trace = res.merit_trace;
    Real eps = cfg.smoothing_start;
    for (int k = 0; k < cfg.smoothing_levels; ++k, eps *= 0.1) {
        const auto lvl = newton(p, z, cfg, eps, 0.1 * eps, cfg.max_iters);
        iters += lvl.iterations;
        if (lvl.status != SolveStatus::NonFinite)
            z = lvl.z;
    }
    auto fin = newton(p, z, cfg, 0.0, cfg.tolerance, cfg.max_iters);
    iters += fin.iterations;
    trace.insert(trace.end(), fin.merit_trace.begin(), fin.merit_trace.end());
    if (fin.converged() || fin.residual < res.residual)
        res = std::move(fin);
    res.iterations = iters;
    res.merit_trace = std::move(trace);
    return res;
}

} // namespace tumble
