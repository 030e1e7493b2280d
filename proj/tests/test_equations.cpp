// Unit tests: constraint-pair builders against explicit outer-product
// oracles.

#include <catch_amalgamated.hpp>

#include <numeric>

#include "covel/equations.hpp"
#include "oracles.hpp"

using namespace covel;
using Catch::Approx;

namespace {

void require_close(const Eigen::MatrixX2d& fast, const Eigen::MatrixX2d& slow) {
  REQUIRE(fast.rows() == slow.rows());
  for (Index i = 0; i < fast.rows(); ++i)
    for (int c = 0; c < 2; ++c) {
      INFO("pair " << i << " component " << c);
      CHECK(std::abs(fast(i, c) - slow(i, c)) <= 1e-9 * (1.0 + std::abs(slow(i, c))));
    }
}

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::bad_args;
}

SampleMatrix two_by_two(const Eigen::Vector2d& x, const Eigen::Vector2d& z) {
  // Rows: x, filler | z, filler; pair 0 is (x, z).
  SampleMatrix d(4, 2);
  d.row(0) = x.transpose();
  d.row(1) << 0.3, -0.7;
  d.row(2) = z.transpose();
  d.row(3) << 1.1, 0.4;
  return d;
}

}  // namespace

TEST_CASE("known-mean pairs", "[equations][L1]") {
  SECTION("hand expansion with identity target") {
    const SampleMatrix d = two_by_two({1, 0}, {0, 1});
    const ConstraintSet s = build_known_mean(d, Eigen::Vector2d::Zero(), SymMatrix::Identity(2, 2));
    CHECK(s.method == Method::L1);
    CHECK(s.pairs(0, 0) == Approx(0.0).margin(1e-15));
    CHECK(s.pairs(0, 1) == Approx(-2.0));
  }
  SECTION("zero target") {
    const SampleMatrix d = oracle::gaussian(10, 4, 3);
    const ConstraintSet s = build_known_mean(d, Eigen::VectorXd::Zero(4), SymMatrix::Zero(4, 4));
    for (Index i = 0; i < 5; ++i) {
      const Eigen::VectorXd x = d.row(i).transpose(), z = d.row(5 + i).transpose();
      CHECK(s.pairs(i, 0) == Approx(std::pow(x.dot(z), 2)));
      CHECK(s.pairs(i, 1) == Approx(std::pow(x.sum(), 2) + std::pow(z.sum(), 2)));
    }
  }
  SECTION("random instances match tr((xx' - S0)(zz' - S0))") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const int p = 1 + int(seed % 6);
      const SampleMatrix d = oracle::gaussian(9, p, seed);
      const Eigen::VectorXd mu = oracle::gaussian(p, 1, 50 + seed);
      const SymMatrix s0 = oracle::random_symmetric(p, 90 + seed);
      const Eigen::VectorXd w = oracle::gaussian(p, 1, 70 + seed);
      const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(p, p);
      require_close(build_known_mean(d, mu, s0, LinearFunctional(w)).pairs,
                    oracle::pairs_explicit(d, true, mu, s0, ones, ones, w));
    }
  }
  SECTION("degenerate two-point data at its own population covariance") {
    // Rows alternate between a and -a: every Y_i equals a a', so the pairs
    // vanish exactly when the target is a a'.
    Eigen::Vector3d a(0.5, -1.0, 2.0);
    SampleMatrix d(8, 3);
    for (Index i = 0; i < 8; ++i) d.row(i) = (i % 2 ? -1.0 : 1.0) * a.transpose();
    const SymMatrix pop = a * a.transpose();
    const ConstraintSet s = build_known_mean(d, Eigen::Vector3d::Zero(), pop);
    CHECK(s.pairs.cwiseAbs().maxCoeff() <= 1e-12);
    const SymMatrix other = SymMatrix::Identity(3, 3);
    const ConstraintSet t = build_known_mean(d, Eigen::Vector3d::Zero(), other);
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(3, 3);
    require_close(t.pairs, oracle::pairs_explicit(d, true, Eigen::Vector3d::Zero(), other, ones, ones,
                                                  Eigen::Vector3d::Ones()));
  }
  SECTION("dimension errors") {
    const SampleMatrix d = oracle::gaussian(8, 3, 1);
    CHECK(code_of([&] { build_known_mean(d, Eigen::VectorXd::Zero(3), SymMatrix::Identity(2, 2)); }) ==
          ErrorCode::dimension_mismatch);
    CHECK(code_of([&] { build_known_mean(d, Eigen::VectorXd::Zero(2), SymMatrix::Identity(3, 3)); }) ==
          ErrorCode::dimension_mismatch);
  }
}

TEST_CASE("unknown-mean pairs", "[equations][L2]") {
  SECTION("identical first-half rows centre to zero") {
    SampleMatrix d(4, 2);
    d << 1, 2, 1, 2, 0.5, -1, 2, 3;
    SymMatrix s0(2, 2);
    s0 << 2, 0.5, 0.5, 1;
    const double c = 0.5;
    const ConstraintSet s = build_unknown_mean(d, s0);
    const Eigen::Vector2d mean2 = (d.row(2) + d.row(3)).transpose() / 2.0;
    for (Index i = 0; i < 2; ++i) {
      const Eigen::Vector2d y = d.row(2 + i).transpose() - mean2;
      // u = 0 leaves tr((-c S0)(y y' - c S0)) = -c y'S0y + c^2 tr(S0^2).
      CHECK(s.pairs(i, 0) == Approx(-c * y.dot(s0 * y) + c * c * (s0 * s0).trace()));
      CHECK(s.pairs(i, 1) == Approx(std::pow(y.sum(), 2) - 2 * c * s0.sum()));
    }
    // Both halves constant: only the target term survives.
    SampleMatrix flat(4, 2);
    flat << 1, 2, 1, 2, -3, 5, -3, 5;
    const ConstraintSet f = build_unknown_mean(flat, s0);
    for (Index i = 0; i < 2; ++i) {
      CHECK(f.pairs(i, 0) == Approx(c * c * (s0 * s0).trace()));
      CHECK(f.pairs(i, 1) == Approx(-2 * c * s0.sum()));
    }
  }
  SECTION("zero target") {
    const SampleMatrix d = oracle::gaussian(10, 3, 8);
    const ConstraintSet s = build_unknown_mean(d, SymMatrix::Zero(3, 3));
    const Eigen::Vector3d m1 = d.topRows(5).colwise().mean().transpose();
    const Eigen::Vector3d m2 = d.middleRows(5, 5).colwise().mean().transpose();
    for (Index i = 0; i < 5; ++i) {
      const Eigen::Vector3d u = d.row(i).transpose() - m1, y = d.row(5 + i).transpose() - m2;
      CHECK(s.pairs(i, 0) == Approx(std::pow(u.dot(y), 2)));
      CHECK(s.pairs(i, 1) == Approx(std::pow(u.sum(), 2) + std::pow(y.sum(), 2)));
    }
  }
  SECTION("random instances match explicit Y* matrices") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const int p = 1 + int(seed % 5);
      const int n = 10 + int(seed % 3);
      const SampleMatrix d = oracle::gaussian(n, p, 400 + seed) + Eigen::MatrixXd::Constant(n, p, 3.0);
      const SymMatrix s0 = oracle::random_symmetric(p, 500 + seed);
      const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(p, p);
      require_close(build_unknown_mean(d, s0).pairs,
                    oracle::pairs_explicit(d, false, Eigen::VectorXd::Zero(p), s0, ones, ones,
                                           Eigen::VectorXd::Ones(p)));
    }
  }
}

TEST_CASE("banded pairs", "[equations][L3][L4]") {
  SECTION("two-entry mask, p = 2, tau = 1") {
    const Eigen::Vector2d x(1.5, -2.0), z(0.5, 3.0);
    const SampleMatrix d = two_by_two(x, z);
    const ConstraintSet s = build_banded(d, 1, KnownMean{Eigen::Vector2d::Zero()});
    CHECK(s.method == Method::L3);
    CHECK(s.pairs(0, 0) == Approx(2 * (x(0) * x(1)) * (z(0) * z(1))));
    CHECK(s.pairs(0, 1) == Approx(2 * x(0) * x(1) + 2 * z(0) * z(1)));
  }
  SECTION("bandwidth limits") {
    const SampleMatrix d = oracle::gaussian(8, 3, 2);
    CHECK(code_of([&] { build_banded(d, 3, UnknownMean{}); }) == ErrorCode::bad_bandwidth);
    CHECK(code_of([&] { build_banded(d, 0, UnknownMean{}); }) == ErrorCode::bad_bandwidth);
  }
  SECTION("random instances match masked explicit matrices") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const int p = 2 + int(seed % 6);
      const int tau = 1 + int(seed % (p - 1));
      const SampleMatrix d = oracle::gaussian(12, p, 600 + seed);
      const Eigen::MatrixXd band = oracle::band_mask(p, tau);
      const Eigen::VectorXd mu = oracle::gaussian(p, 1, 700 + seed);
      const Eigen::VectorXd w = oracle::gaussian(p, 1, 800 + seed);
      const SymMatrix target = oracle::random_symmetric(p, 900 + seed);
      INFO("p=" << p << " tau=" << tau);
      require_close(build_banded(d, tau, KnownMean{mu}, LinearFunctional(w)).pairs,
                    oracle::pairs_explicit(d, true, mu, Eigen::MatrixXd::Zero(p, p), band, band, w));
      const ConstraintSet l4 = build_banded(d, tau, UnknownMean{}, LinearFunctional(w));
      CHECK(l4.method == Method::L4);
      require_close(l4.pairs,
                    oracle::pairs_explicit(d, false, mu, Eigen::MatrixXd::Zero(p, p), band, band, w));
      require_close(build_banded(d, tau, UnknownMean{}, LinearFunctional(w), target).pairs,
                    oracle::pairs_explicit(d, false, mu, target, band, band, w));
    }
  }
  SECTION("tau = 1 equals the all-off-diagonal mask") {
    const int p = 5;
    const SampleMatrix d = oracle::gaussian(10, p, 11);
    Eigen::MatrixXd off = Eigen::MatrixXd::Ones(p, p);
    off.diagonal().setZero();
    require_close(build_banded(d, 1, UnknownMean{}).pairs,
                  oracle::pairs_explicit(d, false, Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p),
                                         off, off, Eigen::VectorXd::Ones(p)));
  }
  SECTION("target entries inside the band do not matter") {
    const int p = 6, tau = 2;
    const SampleMatrix d = oracle::gaussian(14, p, 12);
    SymMatrix t1 = SymMatrix::Identity(p, p);
    SymMatrix t2 = oracle::random_symmetric(p, 13).cwiseProduct(
        Eigen::MatrixXd::Ones(p, p) - oracle::band_mask(p, tau));
    const ConstraintSet a = build_banded(d, tau, UnknownMean{}, {}, t1);
    const ConstraintSet b = build_banded(d, tau, UnknownMean{}, {}, t2);
    const ConstraintSet c = build_banded(d, tau, UnknownMean{});
    CHECK(a.pairs == b.pairs);
    CHECK(a.pairs == c.pairs);
  }
}

TEST_CASE("corner pairs", "[equations][L5]") {
  SECTION("p = 4, tau = 2 has singleton corners") {
    const SampleMatrix d = oracle::gaussian(8, 4, 21);
    const ConstraintSet s = build_corner(d, 2);
    CHECK(s.method == Method::L5);
    const Eigen::Vector4d m1 = d.topRows(4).colwise().mean().transpose();
    const Eigen::Vector4d m2 = d.middleRows(4, 4).colwise().mean().transpose();
    for (Index i = 0; i < 4; ++i) {
      const Eigen::Vector4d u = d.row(i).transpose() - m1, y = d.row(4 + i).transpose() - m2;
      CHECK(s.pairs(i, 1) == Approx(2 * u(0) * u(3) + 2 * y(0) * y(3)));
    }
  }
  SECTION("invalid bandwidth and empty corners") {
    const SampleMatrix d3 = oracle::gaussian(8, 3, 22);
    CHECK(code_of([&] { build_corner(d3, 3); }) == ErrorCode::bad_bandwidth);
    CHECK(code_of([&] { build_corner(d3, 2); }) == ErrorCode::empty_corner);
  }
  SECTION("random instances match the masked-matrix oracle") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const int p = 4 + int(seed % 6);
      const int tau = 1 + int(seed % (p - 2));
      if ((p - tau) / 2 < 1) continue;
      const SampleMatrix d = oracle::gaussian(12, p, 1000 + seed);
      const Eigen::VectorXd w = oracle::gaussian(p, 1, 1100 + seed);
      INFO("p=" << p << " tau=" << tau);
      require_close(build_corner(d, tau, LinearFunctional(w)).pairs,
                    oracle::pairs_explicit(d, false, Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p),
                                           oracle::band_mask(p, tau), oracle::corner_mask(p, tau), w));
      const SymMatrix target = oracle::random_symmetric(p, 1200 + seed);
      const Eigen::VectorXd mu = oracle::gaussian(p, 1, 1300 + seed);
      require_close(build_corner(d, tau, LinearFunctional(w), KnownMean{mu}, target).pairs,
                    oracle::pairs_explicit(d, true, mu, target, oracle::band_mask(p, tau),
                                           oracle::corner_mask(p, tau), w));
    }
  }
}

TEST_CASE("sparse-adaptive pairs", "[equations][sparse]") {
  SECTION("sizes for n = 200 and a 40% selection block") {
    const SampleMatrix d = oracle::gaussian(200, 12, 31);
    const ConstraintSet s = build_sparse_adaptive(d, 5, 0.4, 4);
    CHECK(s.size() == 60);
    CHECK(s.method == Method::sparse);
    CHECK(s.meta.positions.size() == 4);
  }
  SECTION("a single admissible position") {
    const SampleMatrix d = oracle::gaussian(20, 3, 32);
    const ConstraintSet s = build_sparse_adaptive(d, 2, 0.4, 1);
    REQUIRE(s.meta.positions.size() == 1);
    CHECK(s.meta.positions[0] == std::pair<Index, Index>{2, 0});
    const SampleMatrix rest = d.bottomRows(12);
    const Eigen::Vector3d m1 = rest.topRows(6).colwise().mean().transpose();
    const Eigen::Vector3d m2 = rest.middleRows(6, 6).colwise().mean().transpose();
    for (Index i = 0; i < 6; ++i) {
      const Eigen::Vector3d u = rest.row(i).transpose() - m1, y = rest.row(6 + i).transpose() - m2;
      CHECK(s.pairs(i, 1) == Approx(u(2) * u(0) + y(2) * y(0)));
    }
  }
  SECTION("too many positions or too little data") {
    const SampleMatrix d = oracle::gaussian(20, 3, 33);
    CHECK(code_of([&] { build_sparse_adaptive(d, 2, 0.4, 2); }) == ErrorCode::bad_split);
    CHECK(code_of([&] { build_sparse_adaptive(d, 2, 0.0, 1); }) == ErrorCode::bad_split);
    CHECK(code_of([&] { build_sparse_adaptive(d, 2, 0.9, 1); }) == ErrorCode::bad_split);
    CHECK(code_of([&] { build_sparse_adaptive(d, 3, 0.4, 1); }) == ErrorCode::bad_bandwidth);
  }
  SECTION("selection and pairs match an exhaustive oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const int p = 6 + int(seed % 5), tau = 1 + int(seed % 3), n = 40 + int(seed % 7);
      const int top_k = 1 + int(seed % 4);
      const SampleMatrix d = oracle::gaussian(n, p, 1400 + seed);
      const ConstraintSet s = build_sparse_adaptive(d, tau, 0.4, top_k);
      const int n1 = int(std::floor(0.4 * n + 1e-9));
      const Eigen::MatrixXd sel = d.topRows(n1);
      const Eigen::MatrixXd centred = sel.rowwise() - sel.colwise().mean();
      const Eigen::MatrixXd cov = centred.transpose() * centred / double(n1 - 1);
      const auto expected = oracle::scan_top(cov, tau, top_k);
      REQUIRE(s.meta.positions.size() == expected.size());
      for (std::size_t k = 0; k < expected.size(); ++k) {
        CHECK(s.meta.positions[k].first == expected[k].first);
        CHECK(s.meta.positions[k].second == expected[k].second);
      }
      Eigen::MatrixXd vmask = Eigen::MatrixXd::Zero(p, p);
      for (const auto& [a, b] : expected) vmask(a, b) = 1.0;
      const Eigen::MatrixXd rest = d.bottomRows(n - n1);
      require_close(s.pairs, oracle::pairs_explicit(rest, false, Eigen::VectorXd::Zero(p),
                                                    Eigen::MatrixXd::Zero(p, p), oracle::band_mask(p, tau),
                                                    vmask, Eigen::VectorXd::Ones(p)));
    }
  }
  SECTION("ties are broken lexicographically") {
    SymMatrix cov = SymMatrix::Zero(5, 5);
    cov(3, 0) = cov(0, 3) = 1.0;
    cov(4, 1) = cov(1, 4) = -1.0;
    cov(4, 0) = cov(0, 4) = 1.0;
    const auto pos = select_top_offband(cov, 2, 2);
    CHECK(pos[0] == std::pair<Index, Index>{3, 0});
    CHECK(pos[1] == std::pair<Index, Index>{4, 0});
  }
}

TEST_CASE("builder invariants", "[equations][property]") {
  const int p = 7;
  const SampleMatrix d = oracle::gaussian(20, p, 41);
  const Eigen::VectorXd w = oracle::gaussian(p, 1, 42);
  const SymMatrix s0 = oracle::random_symmetric(p, 43);

  SECTION("v is unchanged by w -> -w") {
    const LinearFunctional plus(w), minus(-w);
    CHECK(build_known_mean(d, Eigen::VectorXd::Zero(p), s0, plus).pairs.col(1).isApprox(
        build_known_mean(d, Eigen::VectorXd::Zero(p), s0, minus).pairs.col(1), 1e-13));
    CHECK(build_unknown_mean(d, s0, plus).pairs.col(1).isApprox(
        build_unknown_mean(d, s0, minus).pairs.col(1), 1e-13));
    CHECK(build_banded(d, 2, UnknownMean{}, plus).pairs.col(1).isApprox(
        build_banded(d, 2, UnknownMean{}, minus).pairs.col(1), 1e-13));
    CHECK(build_corner(d, 2, plus).pairs.col(1).isApprox(build_corner(d, 2, minus).pairs.col(1), 1e-13));
  }

  SECTION("permuting the pairing permutes the pairs") {
    const Index N = 10;
    std::vector<Index> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[2], perm[7]);
    SampleMatrix shuffled(2 * N, p);
    for (Index i = 0; i < N; ++i) {
      shuffled.row(i) = d.row(perm[i]);
      shuffled.row(N + i) = d.row(N + perm[i]);
    }
    const auto check = [&](const ConstraintSet& a, const ConstraintSet& b) {
      for (Index i = 0; i < N; ++i) {
        CHECK(b.pairs(i, 0) == Approx(a.pairs(perm[i], 0)).epsilon(1e-13));
        CHECK(b.pairs(i, 1) == Approx(a.pairs(perm[i], 1)).epsilon(1e-13));
      }
    };
    check(build_known_mean(d, Eigen::VectorXd::Zero(p), s0), build_known_mean(shuffled, Eigen::VectorXd::Zero(p), s0));
    check(build_unknown_mean(d, s0), build_unknown_mean(shuffled, s0));
    check(build_banded(d, 3, UnknownMean{}), build_banded(shuffled, 3, UnknownMean{}));
    check(build_corner(d, 2), build_corner(shuffled, 2));
  }

  SECTION("linear functional validation") {
    CHECK_THROWS_AS(LinearFunctional(Eigen::VectorXd::Zero(3)), Error);
    CHECK_THROWS_AS(LinearFunctional(Eigen::VectorXd()), Error);
    CHECK_THROWS_AS(LinearFunctional(Eigen::VectorXd::Ones(3)).weights(4), Error);
    CHECK(LinearFunctional().weights(3) == Eigen::VectorXd::Ones(3));
  }
}
