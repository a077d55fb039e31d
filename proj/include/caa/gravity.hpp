#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "caa/geo.hpp"
#include "caa/network.hpp"
#include "caa/types.hpp"

namespace caa {

enum class GravityModel { M1, M2 };

std::string to_string(GravityModel m);
GravityModel parse_gravity_model(const std::string& token);

// Count-part covariate names for a model, in report order (excluding the
// intercept, which is always column 0 of X).
std::vector<std::string> dummy_names(GravityModel m);

// Dense design over all n(n-1)/2 pairs of the regression universe.
// X columns: intercept, ln_prod, ln_tt, dummies. W columns: intercept, ln_prod.
struct DesignMatrix {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    Eigen::MatrixXd W;
    std::vector<std::string> x_names;
    std::vector<std::string> w_names;
    std::vector<OrgPair> pairs;
    std::size_t fallback_rows = 0;  // rows whose travel time came from the great-circle fallback

    Eigen::Index n() const { return y.size(); }
};

struct DesignOptions {
    ImpedanceOptions impedance;
    bool mass_from_edge_weight_sum = false;  // use edge-weight sum instead of article counts for M_i
};

DesignMatrix build_design(const OrgNetwork& net, const TravelTimeTable& travel_times,
                          GravityModel model, const DesignOptions& opts = {});

struct FitOptions {
    double rel_tol = 1e-8;     // relative log-likelihood change
    double grad_tol = 1e-5;    // gradient max-norm
    int max_iterations = 500;
    int workers = 1;           // reduction width; results are worker-independent
};

struct PoissonFit {
    Eigen::VectorXd beta;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
};

double poisson_loglik(const Eigen::VectorXd& beta, const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                      int workers = 1);
PoissonFit fit_poisson(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const FitOptions& opts = {});

// NB2 log-mass ln f(y; mu, alpha), evaluated in log space.
double nb2_log_mass(double y, double mu, double alpha);

// Zero-inflated NB2: pi = logistic(W gamma) inflates zeros; mu = exp(X beta).
double zinb_loglik(const Eigen::VectorXd& beta, double ln_alpha, const Eigen::VectorXd& gamma,
                   const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                   int workers = 1);

// Per-row score in packed order [beta..., gamma..., ln_alpha]; summed rows give
// the gradient of zinb_loglik.
Eigen::MatrixXd zinb_scores(const Eigen::VectorXd& beta, double ln_alpha, const Eigen::VectorXd& gamma,
                            const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W);

struct ZinbFit {
    Eigen::VectorXd beta;           // count part, aligned with x_names
    double ln_alpha = 0.0;          // NB2 dispersion on the log scale
    Eigen::VectorXd gamma;          // inflation part, aligned with w_names
    double loglik = 0.0;
    Eigen::MatrixXd robust_cov;     // sandwich, packed order [beta, gamma, ln_alpha]
    bool converged = false;
    int iterations = 0;
    bool separation_warning = false;  // |gamma| diverged past the clamp bound
    std::vector<std::string> x_names;
    std::vector<std::string> w_names;

    double alpha() const { return std::exp(ln_alpha); }
    Eigen::Index n_params() const { return beta.size() + gamma.size() + 1; }
};

ZinbFit fit_zinb(const DesignMatrix& design, const FitOptions& opts = {});
ZinbFit fit_zinb(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                 const FitOptions& opts = {});

// Sandwich H^-1 S H^-1: H from central finite differences of the analytic
// gradient, S from per-row score outer products.
Eigen::MatrixXd robust_covariance(const ZinbFit& fit, const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& X, const Eigen::MatrixXd& W);

struct InformationCriteria {
    double aic = 0.0;
    double bic = 0.0;
};

InformationCriteria information_criteria(double loglik, int n_params, std::size_t n_rows);

// Coefficient table mirroring the published layout: count rows, constant,
// logit block, ln_alpha, then lnL / AIC / BIC / N.
std::string format_fit_report(const ZinbFit& fit, std::size_t n_rows);

// Parallel-safe deterministic reduction helper: fixed-block partial sums,
// combined in block order regardless of worker count.
double blockwise_sum(const Eigen::VectorXd& values, int workers = 1);

}  // namespace caa
