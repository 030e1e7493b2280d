#include "covel/experiment.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>

#include "covel/calibration.hpp"

namespace covel {

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, PluginMethod>& registry() {
  static std::map<std::string, PluginMethod> r;
  return r;
}

struct Decision {
  double statistic;
  bool reject;
};

using Runner = std::function<Decision(const SampleMatrix&, const ReplicateKey&)>;

std::optional<std::function<ConstraintSet(const SampleMatrix&)>> base_builder(
    const std::string& tag, const DesignSpec& spec) {
  const Index p = spec.params.p;
  const Index tau = spec.params.tau;
  if (tag == "L1") {
    return [p](const SampleMatrix& x) {
      return build_known_mean(x, Eigen::VectorXd::Zero(p), SymMatrix::Identity(p, p));
    };
  }
  if (tag == "L2") {
    return [p](const SampleMatrix& x) {
      return build_unknown_mean(x, SymMatrix::Identity(p, p));
    };
  }
  if (tag == "L3") {
    return [p, tau](const SampleMatrix& x) {
      return build_banded(x, tau, KnownMean{Eigen::VectorXd::Zero(p)});
    };
  }
  if (tag == "L4") {
    return [tau](const SampleMatrix& x) { return build_banded(x, tau, UnknownMean{}); };
  }
  if (tag == "L5") {
    return [tau](const SampleMatrix& x) { return build_corner(x, tau); };
  }
  if (tag == "SPARSE") {
    const double frac = spec.split_frac;
    const Index top_k = spec.top_k;
    return [tau, frac, top_k](const SampleMatrix& x) {
      return build_sparse_adaptive(x, tau, frac, top_k);
    };
  }
  return std::nullopt;
}

Runner make_runner(const std::string& tag, const DesignSpec& spec) {
  const double alpha = spec.alpha;
  if (auto build = base_builder(tag, spec)) {
    return [build = *build, alpha](const SampleMatrix& x, const ReplicateKey&) {
      const TestOutcome out = evaluate(build(x), alpha);
      return Decision{out.statistic, out.reject};
    };
  }
  if (tag.rfind("BCEL-", 0) == 0) {
    if (auto build = base_builder(tag.substr(5), spec)) {
      const int b = spec.bootstrap_b;
      return [build = *build, alpha, b](const SampleMatrix& x, const ReplicateKey& key) {
        const std::uint64_t seed = key.stream(StreamRole::bootstrap)();
        const BootstrapResult res = bootstrap_calibrate(build(x), b, alpha, seed);
        return Decision{res.observed, res.reject};
      };
    }
  }
  std::lock_guard lock(registry_mutex());
  const auto it = registry().find(tag);
  if (it == registry().end()) {
    throw Error(ErrorCode::bad_args, "unknown method '" + tag + "'");
  }
  return [fn = it->second, spec](const SampleMatrix& x, const ReplicateKey& key) {
    return Decision{std::numeric_limits<double>::quiet_NaN(), fn(x, spec, key)};
  };
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

void register_method(const std::string& name, PluginMethod method) {
  if (name.empty() || !method) throw Error(ErrorCode::bad_args, "invalid plug-in method");
  std::lock_guard lock(registry_mutex());
  registry()[name] = std::move(method);
}

void unregister_method(const std::string& name) {
  std::lock_guard lock(registry_mutex());
  registry().erase(name);
}

void validate_methods(const std::vector<std::string>& methods) {
  if (methods.empty()) throw Error(ErrorCode::bad_args, "no methods requested");
  DesignSpec probe;
  probe.params.p = 2;
  for (const auto& m : methods) make_runner(m, probe);
}

std::vector<MethodTrace> run_replicates(const DesignSpec& spec, unsigned threads) {
  if (spec.replications < 1) throw Error(ErrorCode::bad_args, "replications must be >= 1");
  validate_methods(spec.methods);
  const DesignGenerator generator(spec.params);

  std::vector<Runner> runners;
  std::vector<MethodTrace> traces;
  for (const auto& m : spec.methods) {
    runners.push_back(make_runner(m, spec));
    MethodTrace t;
    t.method = m;
    t.statistics.assign(std::size_t(spec.replications),
                        std::numeric_limits<double>::quiet_NaN());
    t.rejects.assign(std::size_t(spec.replications), -1);
    traces.push_back(std::move(t));
  }

  parallel_for(std::size_t(spec.replications), threads, [&](std::size_t r) {
    const ReplicateKey key{spec.seed, r};
    SampleMatrix data;
    try {
      data = generator.draw(key);
    } catch (const Error&) {
      return;  // every method records a failure for this replicate
    }
    for (std::size_t m = 0; m < runners.size(); ++m) {
      try {
        const Decision d = runners[m](data, key);
        traces[m].statistics[r] = d.statistic;
        traces[m].rejects[r] = d.reject ? 1 : 0;
      } catch (const Error&) {
        traces[m].rejects[r] = -1;
      }
    }
  });
  return traces;
}

RateTable run_experiment(const DesignSpec& spec, unsigned threads) {
  RateTable table;
  for (const MethodTrace& t : run_replicates(spec, threads)) {
    RateRow row;
    row.params = spec.params;
    row.method = t.method;
    row.alpha = spec.alpha;
    row.reps = spec.replications;
    row.seed = spec.seed;
    int rejections = 0;
    for (const signed char r : t.rejects) {
      if (r < 0) ++row.failures;
      else rejections += r;
    }
    const int evaluated = row.reps - row.failures;
    row.rate = evaluated > 0 ? double(rejections) / double(evaluated)
                             : std::numeric_limits<double>::quiet_NaN();
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_rate_csv(const RateTable& table, std::ostream& out) {
  out << "design,n,p,tau,k,delta,method,alpha,rate,reps,failures,seed\n";
  for (const RateRow& r : table.rows) {
    out << to_string(r.params.design) << ',' << r.params.n << ',' << r.params.p
        << ',' << r.params.tau << ',' << r.params.k << ','
        << format_double(r.params.delta) << ',' << r.method << ','
        << format_double(r.alpha) << ',' << format_double(r.rate) << ','
        << r.reps << ',' << r.failures << ',' << r.seed << '\n';
  }
}

}  // namespace covel
