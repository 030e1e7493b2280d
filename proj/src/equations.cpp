#include "covel/equations.hpp"

#include <algorithm>
#include <cmath>

namespace covel {

const char* to_string(Method m) {
  switch (m) {
    case Method::L1: return "L1";
    case Method::L2: return "L2";
    case Method::L3: return "L3";
    case Method::L4: return "L4";
    case Method::L5: return "L5";
    case Method::sparse: return "L5-sparse";
  }
  return "?";
}

LinearFunctional::LinearFunctional(Eigen::VectorXd w) {
  if (w.size() == 0 || !all_finite(w)) {
    throw Error(ErrorCode::bad_args, "linear functional must be finite and non-empty");
  }
  if ((w.array() == 0.0).all()) {
    throw Error(ErrorCode::bad_args, "linear functional is identically zero");
  }
  w_ = std::move(w);
}

Eigen::VectorXd LinearFunctional::weights(Index p) const {
  if (!w_) return Eigen::VectorXd::Ones(p);
  if (w_->size() != p) {
    throw Error(ErrorCode::dimension_mismatch,
                "linear functional has length " + std::to_string(w_->size()) +
                    ", data dimension is " + std::to_string(p));
  }
  return *w_;
}

namespace {

// Centred halves (rows x_i and z_i) plus the target scale c.
struct Halves {
  Eigen::MatrixXd x;
  Eigen::MatrixXd z;
  double c = 1.0;
};

Halves centred_halves(const SampleMatrix& data, const MeanMode& mean) {
  const SplitView split = pair_split(data);
  const Index p = data.cols();
  Halves h;
  if (const auto* known = std::get_if<KnownMean>(&mean)) {
    if (known->mu.size() != p) {
      throw Error(ErrorCode::dimension_mismatch,
                  "mean vector has length " + std::to_string(known->mu.size()) +
                      ", data dimension is " + std::to_string(p));
    }
    h.x = split.first().rowwise() - known->mu.transpose();
    h.z = split.second().rowwise() - known->mu.transpose();
    h.c = 1.0;
  } else {
    h.x = split.first().rowwise() - split.first().colwise().mean();
    h.z = split.second().rowwise() - split.second().colwise().mean();
    const double n_half = double(split.half());
    h.c = (n_half - 1.0) / n_half;
  }
  return h;
}

// One estimating-equation component: which entries it sees (nullopt means
// the full matrix) and the target restricted to those entries.
struct Component {
  std::optional<BandMask> mask;
  std::optional<SymMatrix> target;  // already masked; nullopt means zero
};

Component make_component(std::optional<BandMask> mask,
                         const std::optional<SymMatrix>& target) {
  Component comp{mask, std::nullopt};
  if (target) {
    SymMatrix t = mask ? apply_mask(*target, *mask) : *target;
    if (!t.isZero(0.0)) comp.target = std::move(t);
  }
  return comp;
}

double rank1_sum(const Eigen::Ref<const Eigen::VectorXd>& a,
                 const Eigen::Ref<const Eigen::VectorXd>& b,
                 const std::optional<BandMask>& mask) {
  if (!mask) return a.sum() * b.sum();
  return masked_bilinear_rank1(a, b, *mask);
}

// Row-wise quadratic forms x_i' T x_i.
Eigen::VectorXd row_quadratic(const Eigen::MatrixXd& rows, const SymMatrix& t) {
  return (rows * t).cwiseProduct(rows).rowwise().sum();
}

// e_i = sum_{mask} (x_k x_l - c T_kl)(z_k z_l - c T_kl)
Eigen::VectorXd trace_component(const Halves& h, const Component& comp) {
  const Index n_pairs = h.x.rows();
  Eigen::VectorXd e(n_pairs);
  const Eigen::MatrixXd a = h.x.cwiseProduct(h.z);
  for (Index i = 0; i < n_pairs; ++i) {
    const Eigen::VectorXd ai = a.row(i).transpose();
    e(i) = rank1_sum(ai, ai, comp.mask);
  }
  if (comp.target) {
    const SymMatrix& t = *comp.target;
    e -= h.c * (row_quadratic(h.x, t) + row_quadratic(h.z, t));
    e.array() += h.c * h.c * t.squaredNorm();
  }
  return e;
}

// v_i = sum_{mask} w_k w_l (x_k x_l + z_k z_l - 2 c T_kl)
Eigen::VectorXd linear_component(const Halves& h, const Eigen::VectorXd& w,
                                 const Component& comp) {
  const Index n_pairs = h.x.rows();
  Eigen::VectorXd v(n_pairs);
  const Eigen::MatrixXd b = h.x * w.asDiagonal();
  const Eigen::MatrixXd d = h.z * w.asDiagonal();
  for (Index i = 0; i < n_pairs; ++i) {
    const Eigen::VectorXd bi = b.row(i).transpose();
    const Eigen::VectorXd di = d.row(i).transpose();
    v(i) = rank1_sum(bi, bi, comp.mask) + rank1_sum(di, di, comp.mask);
  }
  if (comp.target) {
    v.array() -= 2.0 * h.c * w.dot(*comp.target * w);
  }
  return v;
}

void check_bandwidth(Index tau, Index p) {
  if (tau < 1 || tau >= p) {
    throw Error(ErrorCode::bad_bandwidth,
                "bandwidth tau=" + std::to_string(tau) +
                    " outside [1, p) with p=" + std::to_string(p));
  }
}

void check_target(const std::optional<SymMatrix>& target, Index p) {
  if (target) require_square(*target, p, "target covariance");
}

ConstraintSet assemble(Eigen::VectorXd e, Eigen::VectorXd v, Method method,
                       ConstraintMeta meta) {
  ConstraintSet out;
  out.pairs.resize(e.size(), 2);
  out.pairs.col(0) = std::move(e);
  out.pairs.col(1) = std::move(v);
  out.method = method;
  out.meta = std::move(meta);
  if (!all_finite(out.pairs)) {
    throw Error(ErrorCode::bad_args, "constraint pairs are not finite");
  }
  return out;
}

ConstraintSet build_full(const SampleMatrix& data, const MeanMode& mean,
                         const SymMatrix& sigma0, const LinearFunctional& w,
                         Method method) {
  require_square(sigma0, data.cols(), "sigma0");
  if (!all_finite(sigma0)) {
    throw Error(ErrorCode::bad_args, "sigma0 has non-finite entries");
  }
  const Halves h = centred_halves(data, mean);
  const Eigen::VectorXd weights = w.weights(data.cols());
  const Component comp = make_component(std::nullopt, sigma0);
  return assemble(trace_component(h, comp), linear_component(h, weights, comp),
                  method, {data.cols(), std::nullopt, "sigma0", {}});
}

}  // namespace

ConstraintSet build_known_mean(const SampleMatrix& data,
                               const Eigen::VectorXd& mu,
                               const SymMatrix& sigma0,
                               const LinearFunctional& w) {
  return build_full(data, KnownMean{mu}, sigma0, w, Method::L1);
}

ConstraintSet build_unknown_mean(const SampleMatrix& data,
                                 const SymMatrix& sigma0,
                                 const LinearFunctional& w) {
  return build_full(data, UnknownMean{}, sigma0, w, Method::L2);
}

ConstraintSet build_banded(const SampleMatrix& data, Index tau,
                           const MeanMode& mean, const LinearFunctional& w,
                           const std::optional<SymMatrix>& target) {
  const Index p = data.cols();
  check_bandwidth(tau, p);
  check_target(target, p);
  const Halves h = centred_halves(data, mean);
  const Component comp = make_component(BandMask::band(p, tau), target);
  const Method method =
      std::holds_alternative<KnownMean>(mean) ? Method::L3 : Method::L4;
  return assemble(trace_component(h, comp),
                  linear_component(h, w.weights(p), comp), method,
                  {p, tau, target ? "target^(tau)" : "0", {}});
}

ConstraintSet build_corner(const SampleMatrix& data, Index tau,
                           const LinearFunctional& w, const MeanMode& mean,
                           const std::optional<SymMatrix>& target) {
  const Index p = data.cols();
  check_bandwidth(tau, p);
  const BandMask corner = BandMask::corner(p, tau);
  if (corner.empty()) {
    throw Error(ErrorCode::empty_corner,
                "corner mask is empty for p=" + std::to_string(p) +
                    ", tau=" + std::to_string(tau));
  }
  check_target(target, p);
  const Halves h = centred_halves(data, mean);
  const Component band = make_component(BandMask::band(p, tau), target);
  const Component corner_comp = make_component(corner, target);
  return assemble(trace_component(h, band),
                  linear_component(h, w.weights(p), corner_comp), Method::L5,
                  {p, tau, target ? "target^(tau)" : "0", {}});
}

std::vector<std::pair<Index, Index>> select_top_offband(const SymMatrix& cov,
                                                        Index tau,
                                                        Index top_k) {
  const Index p = cov.rows();
  require_square(cov, p, "covariance");
  check_bandwidth(tau, p);
  const std::int64_t admissible = std::int64_t(p - tau) * (p - tau + 1) / 2;
  if (top_k < 1 || top_k > admissible) {
    throw Error(ErrorCode::bad_split,
                "top_k=" + std::to_string(top_k) + " outside [1, " +
                    std::to_string(admissible) + "] admissible positions");
  }
  std::vector<std::pair<Index, Index>> cand;
  cand.reserve(std::size_t(admissible));
  for (Index r = tau; r < p; ++r)
    for (Index c = 0; c + tau <= r; ++c) cand.emplace_back(r, c);
  auto better = [&](const auto& a, const auto& b) {
    const double va = std::abs(cov(a.first, a.second));
    const double vb = std::abs(cov(b.first, b.second));
    if (va != vb) return va > vb;
    return a < b;
  };
  std::partial_sort(cand.begin(), cand.begin() + top_k, cand.end(), better);
  cand.resize(std::size_t(top_k));
  return cand;
}

ConstraintSet build_sparse_adaptive(const SampleMatrix& data, Index tau,
                                    double split_frac, Index top_k) {
  const Index n = data.rows();
  const Index p = data.cols();
  if (!(split_frac > 0.0 && split_frac < 1.0)) {
    throw Error(ErrorCode::bad_split, "split fraction must lie in (0, 1)");
  }
  check_bandwidth(tau, p);
  const Index n_select = Index(std::floor(split_frac * double(n) + 1e-9));
  const Index n_rest = n - n_select;
  if (n_select < 2 || n_rest < 4) {
    throw Error(ErrorCode::bad_split,
                "split of n=" + std::to_string(n) + " leaves " +
                    std::to_string(n_select) + " selection rows and " +
                    std::to_string(n_rest) +
                    " test rows (need >= 2 and >= 4)");
  }

  const auto selection = data.topRows(n_select);
  const Eigen::MatrixXd centred =
      selection.rowwise() - selection.colwise().mean();
  const SymMatrix cov =
      centred.transpose() * centred / double(n_select - 1);
  auto positions = select_top_offband(cov, tau, top_k);

  const SampleMatrix rest = data.bottomRows(n_rest);
  const Halves h = centred_halves(rest, UnknownMean{});
  const Component band = make_component(BandMask::band(p, tau), std::nullopt);
  Eigen::VectorXd e = trace_component(h, band);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(h.x.rows());
  for (const auto& [r, c] : positions) {
    v += h.x.col(r).cwiseProduct(h.x.col(c)) +
         h.z.col(r).cwiseProduct(h.z.col(c));
  }
  return assemble(std::move(e), std::move(v), Method::sparse,
                  {p, tau, "0", std::move(positions)});
}

}  // namespace covel
