#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <future>
#include <sstream>

#include "caa/gravity.hpp"

namespace caa {

namespace {

constexpr double kGammaClamp = 30.0;  // separation guard for the logit part

double log1pexp(double x) {
    if (x > 35.0) return x;
    if (x < -35.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double logsumexp2(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

void check_finite(double v, const char* what, Eigen::Index row) {
    if (!std::isfinite(v))
        throw NumericError(std::string("non-finite ") + what + " at row " + std::to_string(row));
}

}  // namespace

double blockwise_sum(const Eigen::VectorXd& values, int workers) {
    constexpr Eigen::Index kBlock = 4096;
    const Eigen::Index n = values.size();
    const Eigen::Index n_blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(static_cast<std::size_t>(n_blocks), 0.0);
    auto run = [&](Eigen::Index b0, Eigen::Index b1) {
        for (Eigen::Index b = b0; b < b1; ++b) {
            const Eigen::Index start = b * kBlock;
            partial[static_cast<std::size_t>(b)] =
                values.segment(start, std::min(kBlock, n - start)).sum();
        }
    };
    if (workers <= 1 || n_blocks <= 1) {
        run(0, n_blocks);
    } else {
        const Eigen::Index per = (n_blocks + workers - 1) / workers;
        std::vector<std::future<void>> futs;
        for (Eigen::Index b0 = 0; b0 < n_blocks; b0 += per)
            futs.push_back(std::async(std::launch::async, run, b0, std::min(b0 + per, n_blocks)));
        for (auto& f : futs) f.get();
    }
    double total = 0.0;  // block order is fixed, so the result is worker-independent
    for (double p : partial) total += p;
    return total;
}

double poisson_loglik(const Eigen::VectorXd& beta, const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                      int workers) {
    Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd terms(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i)
        terms(i) = y(i) * eta(i) - std::exp(eta(i)) - std::lgamma(y(i) + 1.0);
    return blockwise_sum(terms, workers);
}

PoissonFit fit_poisson(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const FitOptions& opts) {
    if (y.size() == 0) throw UsageError("empty design");
    if (y.maxCoeff() <= 0.0) throw NumericError("degenerate all-zero outcome");

    const Eigen::Index p = X.cols();
    PoissonFit fit;
    fit.beta = Eigen::VectorXd::Zero(p);
    fit.beta(0) = std::log(y.mean());
    fit.loglik = poisson_loglik(fit.beta, y, X, opts.workers);

    // Newton with step halving.
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        fit.iterations = iter;
        Eigen::VectorXd mu = (X * fit.beta).array().exp();
        Eigen::VectorXd grad = X.transpose() * (y - mu);
        Eigen::MatrixXd hess = X.transpose() * mu.asDiagonal() * X;
        hess.diagonal().array() += 1e-10;
        Eigen::VectorXd step = hess.ldlt().solve(grad);

        double scale = 1.0;
        double new_ll = -std::numeric_limits<double>::infinity();
        Eigen::VectorXd candidate;
        for (int half = 0; half < 60; ++half) {
            candidate = fit.beta + scale * step;
            new_ll = poisson_loglik(candidate, y, X, opts.workers);
            if (std::isfinite(new_ll) && new_ll >= fit.loglik) break;
            scale *= 0.5;
        }
        if (!std::isfinite(new_ll) || new_ll < fit.loglik) break;  // no ascent possible

        const double rel = std::abs(new_ll - fit.loglik) / (std::abs(fit.loglik) + 1.0);
        fit.beta = candidate;
        fit.loglik = new_ll;
        mu = (X * fit.beta).array().exp();
        const double gmax = (X.transpose() * (y - mu)).cwiseAbs().maxCoeff();
        if (rel < opts.rel_tol && gmax < opts.grad_tol * std::max(1.0, std::abs(fit.loglik))) {
            fit.converged = true;
            break;
        }
    }
    if (!fit.converged) {
        Eigen::VectorXd mu = (X * fit.beta).array().exp();
        const double gmax = (X.transpose() * (y - mu)).cwiseAbs().maxCoeff();
        fit.converged = gmax < opts.grad_tol * std::max(1.0, std::abs(fit.loglik));
    }
    return fit;
}

double nb2_log_mass(double y, double mu, double alpha) {
    const double inv = 1.0 / alpha;
    const double lam = std::log1p(alpha * mu);  // ln(1 + alpha mu)
    double ll = -inv * lam;
    if (y > 0.0)
        ll += std::lgamma(y + inv) - std::lgamma(inv) - std::lgamma(y + 1.0) +
              y * (std::log(alpha * mu) - lam);
    return ll;
}

double zinb_loglik(const Eigen::VectorXd& beta, double ln_alpha, const Eigen::VectorXd& gamma,
                   const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                   int workers) {
    const double alpha = std::exp(ln_alpha);
    Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd z = W * gamma;
    Eigen::VectorXd terms(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double mu = std::exp(eta(i));
        const double ln_pi = -log1pexp(-z(i));
        const double ln_1mpi = -log1pexp(z(i));
        double t;
        if (y(i) == 0.0)
            t = logsumexp2(ln_pi, ln_1mpi + nb2_log_mass(0.0, mu, alpha));
        else
            t = ln_1mpi + nb2_log_mass(y(i), mu, alpha);
        check_finite(t, "log-likelihood term", i);
        terms(i) = t;
    }
    return blockwise_sum(terms, workers);
}

Eigen::MatrixXd zinb_scores(const Eigen::VectorXd& beta, double ln_alpha, const Eigen::VectorXd& gamma,
                            const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W) {
    const double alpha = std::exp(ln_alpha);
    const double inv = 1.0 / alpha;
    const Eigen::Index n = y.size(), p = X.cols(), q = W.cols();
    Eigen::MatrixXd scores(n, p + q + 1);
    Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd z = W * gamma;
    const double psi_inv = boost::math::digamma(inv);

    for (Eigen::Index i = 0; i < n; ++i) {
        const double mu = std::exp(eta(i));
        const double pi = 1.0 / (1.0 + std::exp(-z(i)));
        const double lam = std::log1p(alpha * mu);
        const double denom = 1.0 + alpha * mu;
        double d_eta, d_z, d_a;
        if (y(i) == 0.0) {
            const double ln_f0 = -inv * lam;
            const double f0 = std::exp(ln_f0);
            const double mix = pi + (1.0 - pi) * f0;
            d_eta = (1.0 - pi) * f0 * (-mu / denom) / mix;
            d_z = pi * (1.0 - pi) * (1.0 - f0) / mix;
            d_a = (1.0 - pi) * f0 * (lam * inv - mu / denom) / mix;
        } else {
            d_eta = (y(i) - mu) / denom;
            d_z = -pi;
            d_a = (lam - boost::math::digamma(y(i) + inv) + psi_inv) * inv + (y(i) - mu) / denom;
        }
        scores.block(i, 0, 1, p) = d_eta * X.row(i);
        scores.block(i, p, 1, q) = d_z * W.row(i);
        scores(i, p + q) = d_a;
    }
    return scores;
}

namespace {

struct Packed {
    Eigen::VectorXd theta;  // [beta, gamma, ln_alpha]
    Eigen::Index p, q;

    Eigen::VectorXd beta() const { return theta.head(p); }
    Eigen::VectorXd gamma() const { return theta.segment(p, q); }
    double ln_alpha() const { return theta(p + q); }
};

double packed_loglik(const Packed& pk, const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& W, int workers = 1) {
    return zinb_loglik(pk.beta(), pk.ln_alpha(), pk.gamma(), y, X, W, workers);
}

Eigen::VectorXd packed_gradient(const Packed& pk, const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                const Eigen::MatrixXd& W) {
    return zinb_scores(pk.beta(), pk.ln_alpha(), pk.gamma(), y, X, W).colwise().sum().transpose();
}

}  // namespace

ZinbFit fit_zinb(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                 const FitOptions& opts) {
    const Eigen::Index p = X.cols(), q = W.cols();
    const Eigen::Index n = y.size();
    if (n == 0) throw UsageError("empty design");
    const double zero_share =
        static_cast<double>((y.array() == 0.0).count()) / static_cast<double>(n);
    if (zero_share == 0.0 || zero_share == 1.0)
        throw NumericError("ZINB needs both zero and positive outcomes");

    // Starting values: Poisson count part, ln_alpha = 0, inflation intercept
    // from the excess-zero share, slope 0.
    PoissonFit pois = fit_poisson(y, X, opts);
    Packed pk{Eigen::VectorXd::Zero(p + q + 1), p, q};
    pk.theta.head(p) = pois.beta;
    Eigen::VectorXd mu0 = (X * pois.beta).array().exp();
    double nb_zero = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) nb_zero += std::exp(nb2_log_mass(0.0, mu0(i), 1.0));
    nb_zero /= static_cast<double>(n);
    const double excess = std::clamp(zero_share - nb_zero, 0.02, 0.98);
    pk.theta(p) = std::log(excess / (1.0 - excess));

    double ll = packed_loglik(pk, y, X, W, opts.workers);
    Eigen::VectorXd grad = packed_gradient(pk, y, X, W);
    const Eigen::Index dim = pk.theta.size();
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(dim, dim);

    ZinbFit fit;
    fit.iterations = 0;
    // BFGS ascent with Armijo backtracking.
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        fit.iterations = iter;
        Eigen::VectorXd direction = h_inv * grad;
        if (direction.dot(grad) <= 0.0) {  // reset on loss of ascent direction
            h_inv.setIdentity();
            direction = grad;
        }
        double step = 1.0;
        const double slope = direction.dot(grad);
        double new_ll = -std::numeric_limits<double>::infinity();
        Eigen::VectorXd theta_new;
        bool improved = false;
        for (int bt = 0; bt < 60; ++bt) {
            theta_new = pk.theta + step * direction;
            Packed trial{theta_new, p, q};
            try {
                new_ll = packed_loglik(trial, y, X, W, opts.workers);
            } catch (const NumericError&) {
                new_ll = -std::numeric_limits<double>::infinity();
            }
            if (std::isfinite(new_ll) && new_ll >= ll + 1e-4 * step * slope) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;  // stalled; convergence decided below

        Packed pk_new{theta_new, p, q};
        Eigen::VectorXd grad_new = packed_gradient(pk_new, y, X, W);
        Eigen::VectorXd s = theta_new - pk.theta;
        Eigen::VectorXd dg = grad_new - grad;  // note: ascent, so curvature sign flips
        const double sy = s.dot(-dg);
        if (sy > 1e-12) {
            // Standard BFGS inverse update on the negated gradient.
            Eigen::VectorXd yv = -dg;
            Eigen::MatrixXd left = Eigen::MatrixXd::Identity(dim, dim) - (s * yv.transpose()) / sy;
            h_inv = left * h_inv * left.transpose() + (s * s.transpose()) / sy;
        }

        const double rel = std::abs(new_ll - ll) / (std::abs(ll) + 1.0);
        pk.theta = theta_new;
        ll = new_ll;
        grad = grad_new;
        if (rel < opts.rel_tol && grad.cwiseAbs().maxCoeff() < opts.grad_tol) {
            fit.converged = true;
            break;
        }
    }
    if (!fit.converged) {
        // Stalled line searches at machine precision still count as converged
        // when the gradient is small relative to the objective scale.
        const double gmax = grad.cwiseAbs().maxCoeff();
        fit.converged = gmax < opts.grad_tol * std::max(1.0, std::abs(ll));
    }
    if (!fit.converged)
        throw NumericError("ZINB optimisation did not converge after " +
                           std::to_string(fit.iterations) + " iterations (gradient max-norm " +
                           std::to_string(grad.cwiseAbs().maxCoeff()) + ")");

    fit.beta = pk.beta();
    fit.gamma = pk.gamma();
    fit.ln_alpha = pk.ln_alpha();
    fit.loglik = ll;
    if (fit.gamma.cwiseAbs().maxCoeff() > kGammaClamp) {
        fit.separation_warning = true;
        fit.gamma = fit.gamma.cwiseMax(-kGammaClamp).cwiseMin(kGammaClamp);
    }
    fit.robust_cov = robust_covariance(fit, y, X, W);
    return fit;
}

ZinbFit fit_zinb(const DesignMatrix& design, const FitOptions& opts) {
    ZinbFit fit = fit_zinb(design.y, design.X, design.W, opts);
    fit.x_names = design.x_names;
    fit.w_names = design.w_names;
    return fit;
}

Eigen::MatrixXd robust_covariance(const ZinbFit& fit, const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& X, const Eigen::MatrixXd& W) {
    const Eigen::Index p = fit.beta.size(), q = fit.gamma.size();
    const Eigen::Index dim = p + q + 1;
    Packed pk{Eigen::VectorXd(dim), p, q};
    pk.theta.head(p) = fit.beta;
    pk.theta.segment(p, q) = fit.gamma;
    pk.theta(p + q) = fit.ln_alpha;

    // Observed information from central differences of the analytic gradient.
    Eigen::MatrixXd hess(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const double h = 1e-5 * std::max(1.0, std::abs(pk.theta(j)));
        Packed hi = pk, lo = pk;
        hi.theta(j) += h;
        lo.theta(j) -= h;
        hess.col(j) = (packed_gradient(hi, y, X, W) - packed_gradient(lo, y, X, W)) / (2.0 * h);
    }
    hess = 0.5 * (hess + hess.transpose());
    Eigen::MatrixXd info = -hess;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
    if (!lu.isInvertible()) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(info);
        const auto& sv = svd.singularValues();
        const double cond = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
        throw NumericError("singular observed information (condition number " +
                           std::to_string(cond) + ")");
    }
    Eigen::MatrixXd info_inv = lu.inverse();

    Eigen::MatrixXd scores = zinb_scores(fit.beta, fit.ln_alpha, fit.gamma, y, X, W);
    Eigen::MatrixXd meat = scores.transpose() * scores;
    Eigen::MatrixXd cov = info_inv * meat * info_inv;
    return 0.5 * (cov + cov.transpose());
}

std::string format_fit_report(const ZinbFit& fit, std::size_t n_rows) {
    const Eigen::Index p = fit.beta.size(), q = fit.gamma.size();
    auto se = [&](Eigen::Index k) { return std::sqrt(std::max(0.0, fit.robust_cov(k, k))); };
    auto pvalue = [](double zv) { return std::erfc(std::abs(zv) / std::sqrt(2.0)); };

    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(6);
    out << "variable\tcoef\trobust_se\tz\tp\n";
    auto emit = [&](const std::string& name, double coef, Eigen::Index k) {
        const double s = se(k);
        const double zv = s > 0.0 ? coef / s : 0.0;
        out << name << '\t' << coef << '\t' << s << '\t' << zv << '\t' << pvalue(zv) << '\n';
    };
    // Count covariates first, then the count constant, matching the published layout.
    for (Eigen::Index j = 1; j < p; ++j) emit(fit.x_names.at(j), fit.beta(j), j);
    for (Eigen::Index j = 0; j < q; ++j) emit(fit.w_names.at(j), fit.gamma(j), p + j);
    emit(fit.x_names.at(0), fit.beta(0), 0);
    emit("ln_alpha", fit.ln_alpha, p + q);

    auto ic = information_criteria(fit.loglik, static_cast<int>(fit.n_params()), n_rows);
    out << "lnL\t" << fit.loglik << "\nAIC\t" << ic.aic << "\nBIC\t" << ic.bic << "\nN\t" << n_rows
        << '\n';
    if (fit.separation_warning)
        out << "# warning: inflation coefficients clamped at |gamma| = 30 (possible separation)\n";
    return out.str();
}

}  // namespace caa
