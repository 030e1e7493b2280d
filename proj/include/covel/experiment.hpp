#pragma once

// Monte-Carlo runner: replicate data from a design, apply each requested
// method, aggregate rejection rates.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "covel/designs.hpp"
#include "covel/hypothesis.hpp"

namespace covel {

struct DesignSpec {
  DesignParams params;
  /// Method tags: L1..L5, SPARSE, or BCEL-<base> (e.g. BCEL-L2), plus any
  /// name registered with register_method.
  std::vector<std::string> methods;
  double alpha = 0.05;
  int replications = 1000;
  std::uint64_t seed = 0;
  int bootstrap_b = 300;
  double split_frac = 0.4;
  Index top_k = 4;
};

struct RateRow {
  DesignParams params;
  std::string method;
  double alpha = 0.05;
  double rate = 0.0;
  int reps = 0;
  int failures = 0;
  std::uint64_t seed = 0;
};

struct RateTable {
  std::vector<RateRow> rows;
};

/// Per-replicate record of one method.
struct MethodTrace {
  std::string method;
  std::vector<double> statistics;  // NaN for failed replicates
  std::vector<signed char> rejects;  // 1 reject, 0 accept, -1 failed
};

/// Externally supplied test: returns true to reject. Randomness must come
/// from key.stream(StreamRole::plugin).
using PluginMethod = std::function<bool(const SampleMatrix& data,
                                        const DesignSpec& spec,
                                        const ReplicateKey& key)>;

/// Registers a method name usable in DesignSpec::methods (process-wide).
void register_method(const std::string& name, PluginMethod method);
void unregister_method(const std::string& name);

/// Checks every method tag resolves; throws BadArgs otherwise.
void validate_methods(const std::vector<std::string>& methods);

/// Runs all replicates, keeping per-replicate statistics.
std::vector<MethodTrace> run_replicates(const DesignSpec& spec,
                                        unsigned threads = 1);

RateTable run_experiment(const DesignSpec& spec, unsigned threads = 1);

/// CSV with header design,n,p,tau,k,delta,method,alpha,rate,reps,failures,seed
void write_rate_csv(const RateTable& table, std::ostream& out);

}  // namespace covel
