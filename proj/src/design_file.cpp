#include "covel/design_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace covel {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

class LineParser {
 public:
  LineParser(const std::string& source, std::size_t line)
      : where_(source + ":" + std::to_string(line) + ": ") {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::parse_error, where_ + msg);
  }

  template <typename T>
  T number(const std::string& text, const std::string& key) const {
    T value{};
    const char* b = text.data();
    const char* e = text.data() + text.size();
    const auto res = std::from_chars(b, e, value);
    if (text.empty() || res.ec != std::errc() || res.ptr != e) {
      fail("invalid value '" + text + "' for " + key);
    }
    return value;
  }

  template <typename T>
  std::vector<T> list(const std::string& value, const std::string& key) const {
    std::vector<T> out;
    for (const auto& item : split_list(value)) out.push_back(number<T>(item, key));
    if (out.empty()) fail("empty list for " + key);
    return out;
  }

 private:
  std::string where_;
};

}  // namespace

DesignGrid parse_design_file(std::istream& in, const std::string& source) {
  DesignGrid grid;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const LineParser lp(source, line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) lp.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) lp.fail("missing key");
    if (value.empty()) lp.fail("missing value for " + key);
    if (!seen.insert(key).second) lp.fail("duplicate key " + key);

    if (key == "design") {
      try {
        grid.design = parse_design(value);
      } catch (const Error& e) {
        lp.fail(e.what());
      }
    } else if (key == "n") {
      grid.n = lp.list<Index>(value, key);
    } else if (key == "p") {
      grid.p = lp.list<Index>(value, key);
    } else if (key == "tau") {
      grid.tau = lp.list<Index>(value, key);
    } else if (key == "k") {
      grid.k = lp.list<Index>(value, key);
    } else if (key == "delta") {
      grid.delta = lp.list<double>(value, key);
    } else if (key == "methods") {
      grid.methods = split_list(value);
    } else if (key == "alpha") {
      grid.alpha = lp.number<double>(value, key);
    } else if (key == "replications") {
      grid.replications = lp.number<int>(value, key);
    } else if (key == "seed") {
      grid.seed = lp.number<std::uint64_t>(value, key);
    } else if (key == "bootstrap_b") {
      grid.bootstrap_b = lp.number<int>(value, key);
    } else if (key == "split_frac") {
      grid.split_frac = lp.number<double>(value, key);
    } else if (key == "top_k") {
      grid.top_k = lp.number<Index>(value, key);
    } else {
      lp.fail("unknown key '" + key + "'");
    }
  }
  for (const char* required : {"design", "n", "p", "tau", "methods"}) {
    if (!seen.count(required)) {
      throw Error(ErrorCode::parse_error,
                  source + ": missing required key '" + required + "'");
    }
  }
  if (!(grid.alpha > 0.0 && grid.alpha < 1.0)) {
    throw Error(ErrorCode::parse_error, source + ": alpha must lie in (0, 1)");
  }
  if (grid.replications < 1) {
    throw Error(ErrorCode::parse_error, source + ": replications must be >= 1");
  }
  try {
    validate_methods(grid.methods);
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, source + ": " + e.what());
  }
  return grid;
}

DesignGrid parse_design_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "' for reading");
  return parse_design_file(in, path);
}

std::vector<DesignSpec> expand_grid(const DesignGrid& grid, std::uint64_t seed) {
  std::vector<DesignSpec> specs;
  for (Index n : grid.n)
    for (Index p : grid.p)
      for (Index tau : grid.tau) {
        std::vector<Index> ks = grid.k;
        if (ks.empty()) ks.push_back(grid.design == Design::banded_alt ? tau + 10 : 0);
        for (Index k : ks)
          for (double delta : grid.delta) {
            DesignSpec s;
            s.params = {grid.design, n, p, tau, k, delta};
            s.methods = grid.methods;
            s.alpha = grid.alpha;
            s.replications = grid.replications;
            s.seed = seed;
            s.bootstrap_b = grid.bootstrap_b;
            s.split_frac = grid.split_frac;
            s.top_k = grid.top_k;
            specs.push_back(std::move(s));
          }
      }
  return specs;
}

}  // namespace covel
