#include "covel/designs.hpp"

#include <cmath>

namespace covel {

const char* to_string(Design d) {
  switch (d) {
    case Design::identity_alt: return "identity_alt";
    case Design::banded_alt: return "banded_alt";
    case Design::sparse_alt: return "sparse_alt";
  }
  return "?";
}

Design parse_design(const std::string& name) {
  if (name == "identity_alt") return Design::identity_alt;
  if (name == "banded_alt") return Design::banded_alt;
  if (name == "sparse_alt") return Design::sparse_alt;
  throw Error(ErrorCode::bad_args, "unknown design '" + name +
                                       "' (expected identity_alt, banded_alt "
                                       "or sparse_alt)");
}

SymMatrix ar_banded_cov(Index p, double rho, Index tau) {
  if (p < 1 || tau < 1) {
    throw Error(ErrorCode::bad_args, "ar_banded_cov needs p >= 1 and tau >= 1");
  }
  SymMatrix s = SymMatrix::Zero(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = std::max<Index>(0, i - tau + 1); j < std::min(p, i + tau); ++j)
      s(i, j) = std::pow(rho, double(i > j ? i - j : j - i));
  return s;
}

SymMatrix moving_sum_cov(Index p, Index k) {
  if (p < 1 || k < 1) {
    throw Error(ErrorCode::bad_args, "moving_sum_cov needs p >= 1 and k >= 1");
  }
  SymMatrix s(p, p);
  for (Index a = 0; a < p; ++a)
    for (Index b = 0; b < p; ++b) {
      const Index overlap = k + 1 - (a > b ? a - b : b - a);
      s(a, b) = overlap > 0 ? double(overlap) / double(k) : 0.0;
    }
  return s;
}

MvNormal::MvNormal(const SymMatrix& sigma) {
  require_symmetric(sigma, "sigma", 1e-10);
  const Index p = sigma.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success && all_finite(Eigen::MatrixXd(llt.matrixL()))) {
    factor_ = llt.matrixL();
  } else {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
    const Eigen::VectorXd d = ldlt.vectorD();
    const double scale = std::max(1e-300, sigma.diagonal().cwiseAbs().maxCoeff());
    if (ldlt.info() != Eigen::Success || !all_finite(d) ||
        d.minCoeff() < -1e-10 * scale) {
      throw Error(ErrorCode::not_psd, "covariance is not positive semidefinite");
    }
    const Eigen::VectorXd root = d.cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd lower = Eigen::MatrixXd(ldlt.matrixL()) * root.asDiagonal();
    factor_ = ldlt.transpositionsP().transpose() * lower;
  }
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j)
      if (factor_(i, j) != 0.0 && j < i) lower_bandwidth_ = std::max(lower_bandwidth_, i - j);
  const bool lower_triangular = factor_.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero(0.0);
  banded_ = lower_triangular && 2 * (lower_bandwidth_ + 1) < p;
}

SampleMatrix MvNormal::sample(Index n, Stream& rng) const {
  const Index p = dim();
  const Eigen::MatrixXd z = rng.normal_matrix(n, p);
  if (!banded_) return z * factor_.transpose();
  SampleMatrix x = SampleMatrix::Zero(n, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = std::max<Index>(0, i - lower_bandwidth_); j <= i; ++j)
      if (factor_(i, j) != 0.0) x.col(i) += factor_(i, j) * z.col(j);
  return x;
}

SampleMatrix mvnormal_sample(const SymMatrix& sigma, Index n, Stream& rng) {
  return MvNormal(sigma).sample(n, rng);
}

namespace {

void validate(const DesignParams& d) {
  if (d.n < 1 || d.p < 1 || d.tau < 1) {
    throw Error(ErrorCode::bad_args, "design needs n, p, tau >= 1");
  }
  if (!std::isfinite(d.delta)) throw Error(ErrorCode::bad_args, "delta must be finite");
  if (d.design == Design::banded_alt && d.k < 1) {
    throw Error(ErrorCode::bad_args, "banded_alt needs k >= 1");
  }
  if (d.design == Design::sparse_alt && d.tau >= d.p) {
    throw Error(ErrorCode::bad_args, "sparse_alt needs tau + 1 <= p");
  }
}

double local_scale(const DesignParams& d) {
  return d.delta / std::pow(double(d.n), 0.25);
}

}  // namespace

SymMatrix design_covariance(const DesignParams& d) {
  validate(d);
  const SymMatrix ar = ar_banded_cov(d.p, 0.5, d.tau);
  switch (d.design) {
    case Design::identity_alt:
      return SymMatrix::Identity(d.p, d.p) +
             (d.delta * d.delta / std::sqrt(double(d.n))) * ar;
    case Design::banded_alt:
      return ar + (d.delta * d.delta / std::sqrt(double(d.n))) *
                      moving_sum_cov(d.p, d.k);
    case Design::sparse_alt: {
      SymMatrix s = ar;
      const double add = d.delta * d.delta;
      s(0, 0) += add;
      s(d.tau, d.tau) += add;
      s(0, d.tau) += add;
      s(d.tau, 0) += add;
      return s;
    }
  }
  return ar;
}

DesignGenerator::DesignGenerator(const DesignParams& params)
    : params_((validate(params), params)),
      ar_(ar_banded_cov(params.p, 0.5, params.tau)) {}

SampleMatrix DesignGenerator::draw(const ReplicateKey& key) const {
  const DesignParams& d = params_;
  Stream noise = key.stream(StreamRole::noise);
  Stream perturb = key.stream(StreamRole::perturbation);
  switch (d.design) {
    case Design::identity_alt: {
      SampleMatrix x = noise.normal_matrix(d.n, d.p);
      if (d.delta != 0.0) x += local_scale(d) * ar_.sample(d.n, perturb);
      return x;
    }
    case Design::banded_alt: {
      SampleMatrix x = ar_.sample(d.n, noise);
      if (d.delta != 0.0) {
        const Eigen::MatrixXd w = perturb.normal_matrix(d.n, d.p + d.k);
        Eigen::MatrixXd prefix = Eigen::MatrixXd::Zero(d.n, d.p + d.k + 1);
        for (Index c = 0; c < d.p + d.k; ++c) prefix.col(c + 1) = prefix.col(c) + w.col(c);
        const double s = local_scale(d) / std::sqrt(double(d.k));
        for (Index j = 0; j < d.p; ++j) {
          x.col(j) += s * (prefix.col(j + d.k + 1) - prefix.col(j));
        }
      }
      return x;
    }
    case Design::sparse_alt: {
      SampleMatrix x = ar_.sample(d.n, noise);
      if (d.delta != 0.0) {
        for (Index i = 0; i < d.n; ++i) {
          const double g = d.delta * perturb.normal();
          x(i, 0) += g;
          x(i, d.tau) += g;
        }
      }
      return x;
    }
  }
  return {};
}

SampleMatrix gen_identity_alt(Index n, Index p, Index tau, double delta,
                              const ReplicateKey& key) {
  return DesignGenerator({Design::identity_alt, n, p, tau, 0, delta}).draw(key);
}

SampleMatrix gen_banded_alt(Index n, Index p, Index tau, Index k, double delta,
                            const ReplicateKey& key) {
  return DesignGenerator({Design::banded_alt, n, p, tau, k, delta}).draw(key);
}

SampleMatrix gen_sparse_alt(Index n, Index p, Index tau, double delta,
                            const ReplicateKey& key) {
  return DesignGenerator({Design::sparse_alt, n, p, tau, 0, delta}).draw(key);
}

}  // namespace covel
