#include "fragkin/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "fragkin/errors.hpp"

namespace fragkin {

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error([&] {
        std::string msg = "invalid configuration";
        for (const auto& i : issues) {
          msg += "\n  ";
          if (i.line > 0) msg += "line " + std::to_string(i.line) + ": ";
          msg += i.message;
        }
        return msg;
      }()),
      issues_(std::move(issues)) {}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (text == "inf" || text == "+inf") {
    out = INFINITY;
    return true;
  }
  if (!text.empty() && text.front() == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_uint(const std::string& text, std::uint64_t& out) {
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s;
}

// One key of one section: how to read it into a configuration and how to print it.
struct Key {
  std::string section;
  std::string name;
  std::function<std::string(RunConfiguration&, const std::string&)> set;  // returns error text or ""
  std::function<std::string(const RunConfiguration&)> get;
};

template <class Member>
Key number_key(std::string section, std::string name, Member member) {
  return Key{std::move(section), name,
             [member, name](RunConfiguration& c, const std::string& v) -> std::string {
               double d;
               if (!parse_double(v, d)) return "key '" + name + "' expects a number, got '" + v + "'";
               member(c) = d;
               return {};
             },
             [member](const RunConfiguration& c) { return format_double(member(const_cast<RunConfiguration&>(c))); }};
}

template <class Member>
Key count_key(std::string section, std::string name, Member member) {
  return Key{std::move(section), name,
             [member, name](RunConfiguration& c, const std::string& v) -> std::string {
               std::uint64_t n;
               if (!parse_uint(v, n)) return "key '" + name + "' expects a non-negative integer, got '" + v + "'";
               member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(n);
               return {};
             },
             [member](const RunConfiguration& c) {
               return std::to_string(member(const_cast<RunConfiguration&>(c)));
             }};
}

template <class Member>
Key choice_key(std::string section, std::string name, std::vector<std::string> allowed, Member member) {
  return Key{std::move(section), name,
             [member, name, allowed](RunConfiguration& c, const std::string& v) -> std::string {
               if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
                 std::string msg = "key '" + name + "' must be one of";
                 for (const auto& a : allowed) msg += " " + a;
                 return msg + ", got '" + v + "'";
               }
               member(c) = v;
               return {};
             },
             [member](const RunConfiguration& c) { return member(const_cast<RunConfiguration&>(c)); }};
}

template <class Member>
Key list_key(std::string section, std::string name, Member member) {
  return Key{std::move(section), name,
             [member, name](RunConfiguration& c, const std::string& v) -> std::string {
               std::vector<double> out;
               if (v != "default") {
                 for (const auto& item : split_list(v)) {
                   double d;
                   if (!parse_double(item, d)) return "key '" + name + "' expects a comma-separated list of numbers";
                   out.push_back(d);
                 }
               }
               member(c) = std::move(out);
               return {};
             },
             [member](const RunConfiguration& c) {
               const auto& v = member(const_cast<RunConfiguration&>(c));
               return v.empty() ? std::string("default") : join_doubles(v);
             }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    // [grids]
    k.push_back(count_key("grids", "dim", [](RunConfiguration& c) -> int& { return c.grids.dim; }));
    k.push_back(number_key("grids", "length", [](RunConfiguration& c) -> double& { return c.grids.length; }));
    k.push_back(count_key("grids", "n", [](RunConfiguration& c) -> std::uint64_t& { return c.grids.n; }));
    k.push_back(number_key("grids", "xi_min", [](RunConfiguration& c) -> double& { return c.grids.xi_min; }));
    k.push_back(number_key("grids", "xi_max", [](RunConfiguration& c) -> double& { return c.grids.xi_max; }));
    k.push_back(count_key("grids", "m", [](RunConfiguration& c) -> std::uint64_t& { return c.grids.m; }));
    // [rates]
    k.push_back(choice_key("rates", "mode", {"power", "constant", "tabulated"},
                           [](RunConfiguration& c) -> std::string& { return c.rates.mode; }));
    k.push_back(number_key("rates", "theta_alpha", [](RunConfiguration& c) -> double& { return c.rates.theta_alpha; }));
    k.push_back(number_key("rates", "theta_beta", [](RunConfiguration& c) -> double& { return c.rates.theta_beta; }));
    k.push_back(number_key("rates", "alpha_scale", [](RunConfiguration& c) -> double& { return c.rates.alpha_scale; }));
    k.push_back(number_key("rates", "beta_scale", [](RunConfiguration& c) -> double& { return c.rates.beta_scale; }));
    k.push_back(number_key("rates", "c_alpha_lower", [](RunConfiguration& c) -> double& { return c.rates.c_alpha_lower; }));
    k.push_back(number_key("rates", "c_alpha_upper", [](RunConfiguration& c) -> double& { return c.rates.c_alpha_upper; }));
    k.push_back(number_key("rates", "c_beta_lower", [](RunConfiguration& c) -> double& { return c.rates.c_beta_lower; }));
    k.push_back(number_key("rates", "c_beta_upper", [](RunConfiguration& c) -> double& { return c.rates.c_beta_upper; }));
    k.push_back(number_key("rates", "alpha", [](RunConfiguration& c) -> double& { return c.rates.alpha; }));
    k.push_back(number_key("rates", "beta", [](RunConfiguration& c) -> double& { return c.rates.beta; }));
    k.push_back(choice_key("rates", "table", {}, [](RunConfiguration& c) -> std::string& { return c.rates.table; }));
    k.push_back(number_key("rates", "modulation", [](RunConfiguration& c) -> double& { return c.rates.modulation; }));
    // [frag_kernel]
    k.push_back(choice_key("frag_kernel", "family", {"power", "homogeneous", "separable", "tabulated", "zero"},
                           [](RunConfiguration& c) -> std::string& { return c.frag_kernel.family; }));
    k.push_back(number_key("frag_kernel", "nu", [](RunConfiguration& c) -> double& { return c.frag_kernel.nu; }));
    k.push_back(choice_key("frag_kernel", "profile", {"uniform", "power"},
                           [](RunConfiguration& c) -> std::string& { return c.frag_kernel.profile; }));
    k.push_back(choice_key("frag_kernel", "table", {}, [](RunConfiguration& c) -> std::string& { return c.frag_kernel.table; }));
    // [coag_kernel]
    k.push_back(choice_key("coag_kernel", "family", {"zero", "constant", "sum_power"},
                           [](RunConfiguration& c) -> std::string& { return c.coag_kernel.family; }));
    k.push_back(number_key("coag_kernel", "kappa0", [](RunConfiguration& c) -> double& { return c.coag_kernel.kappa0; }));
    k.push_back(number_key("coag_kernel", "exponent", [](RunConfiguration& c) -> double& { return c.coag_kernel.exponent; }));
    k.push_back(number_key("coag_kernel", "c_kappa", [](RunConfiguration& c) -> double& { return c.coag_kernel.c_kappa; }));
    k.push_back(number_key("coag_kernel", "rho", [](RunConfiguration& c) -> double& { return c.coag_kernel.rho; }));
    // [solver]
    k.push_back(number_key("solver", "dt", [](RunConfiguration& c) -> double& { return c.solver.dt; }));
    k.push_back(number_key("solver", "t_end", [](RunConfiguration& c) -> double& { return c.solver.t_end; }));
    k.push_back(number_key("solver", "safety", [](RunConfiguration& c) -> double& { return c.solver.safety; }));
    k.push_back(Key{"solver", "mode",
                    [](RunConfiguration& c, const std::string& v) -> std::string {
                      if (v == "strang") c.solver.mode = SolverMode::Strang;
                      else if (v == "picard") c.solver.mode = SolverMode::Picard;
                      else return "key 'mode' must be one of strang picard, got '" + v + "'";
                      return {};
                    },
                    [](const RunConfiguration& c) {
                      return std::string(c.solver.mode == SolverMode::Strang ? "strang" : "picard");
                    }});
    k.push_back(count_key("solver", "picard_kmax", [](RunConfiguration& c) -> int& { return c.solver.picard_kmax; }));
    k.push_back(number_key("solver", "picard_tol", [](RunConfiguration& c) -> double& { return c.solver.picard_tol; }));
    k.push_back(count_key("solver", "picard_nodes", [](RunConfiguration& c) -> int& { return c.solver.picard_nodes; }));
    k.push_back(Key{"solver", "positivity",
                    [](RunConfiguration& c, const std::string& v) -> std::string {
                      if (v == "guard") c.solver.positivity = PositivityPolicy::Guard;
                      else if (v == "patankar") c.solver.positivity = PositivityPolicy::Patankar;
                      else return "key 'positivity' must be one of guard patankar, got '" + v + "'";
                      return {};
                    },
                    [](const RunConfiguration& c) {
                      return std::string(c.solver.positivity == PositivityPolicy::Guard ? "guard" : "patankar");
                    }});
    k.push_back(count_key("solver", "output_every", [](RunConfiguration& c) -> std::uint64_t& { return c.solver.output_every; }));
    k.push_back(count_key("solver", "checkpoint_every",
                          [](RunConfiguration& c) -> std::uint64_t& { return c.solver.checkpoint_every; }));
    k.push_back(choice_key("solver", "checkpoint", {}, [](RunConfiguration& c) -> std::string& { return c.solver.checkpoint_path; }));
    k.push_back(number_key("solver", "blowup_factor", [](RunConfiguration& c) -> double& { return c.solver.blowup_factor; }));
    // [analysis]
    k.push_back(number_key("analysis", "p", [](RunConfiguration& c) -> double& { return c.analysis.p; }));
    k.push_back(number_key("analysis", "ell", [](RunConfiguration& c) -> double& { return c.analysis.ell; }));
    k.push_back(number_key("analysis", "delta", [](RunConfiguration& c) -> double& { return c.analysis.delta; }));
    k.push_back(choice_key("analysis", "certificate", {"required", "advisory"},
                           [](RunConfiguration& c) -> std::string& { return c.analysis.certificate; }));
    k.push_back(Key{"analysis", "norms",
                    [](RunConfiguration& c, const std::string& v) -> std::string {
                      std::vector<NormSpec> out;
                      if (v != "default") {
                        for (const auto& item : split_list(v)) {
                          std::istringstream in(item);
                          std::string a, b, s;
                          NormSpec n;
                          if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, s) ||
                              !parse_double(trim(a), n.p) || !parse_double(trim(b), n.ell) ||
                              !parse_double(trim(s), n.s))
                            return "key 'norms' expects 'default' or a list of p:ell:s triples";
                          out.push_back(n);
                        }
                      }
                      c.analysis.norms = std::move(out);
                      return {};
                    },
                    [](const RunConfiguration& c) {
                      if (c.analysis.norms.empty()) return std::string("default");
                      std::string s;
                      for (std::size_t i = 0; i < c.analysis.norms.size(); ++i) {
                        const auto& n = c.analysis.norms[i];
                        if (i) s += ", ";
                        s += format_double(n.p) + ":" + format_double(n.ell) + ":" + format_double(n.s);
                      }
                      return s;
                    }});
    k.push_back(list_key("analysis", "eta_samples", [](RunConfiguration& c) -> std::vector<double>& { return c.analysis.eta_samples; }));
    k.push_back(list_key("analysis", "ell_grid", [](RunConfiguration& c) -> std::vector<double>& { return c.analysis.ell_grid; }));
    k.push_back(number_key("analysis", "growth_tolerance",
                           [](RunConfiguration& c) -> double& { return c.analysis.growth_tolerance; }));
    // [initial_condition]
    k.push_back(choice_key("initial_condition", "preset", {"gaussian", "homogeneous", "random", "zero", "checkpoint"},
                           [](RunConfiguration& c) -> std::string& { return c.initial_condition.preset; }));
    k.push_back(number_key("initial_condition", "amplitude",
                           [](RunConfiguration& c) -> double& { return c.initial_condition.amplitude; }));
    k.push_back(number_key("initial_condition", "width", [](RunConfiguration& c) -> double& { return c.initial_condition.width; }));
    k.push_back(choice_key("initial_condition", "size_profile", {"exponential", "lognormal", "monodisperse"},
                           [](RunConfiguration& c) -> std::string& { return c.initial_condition.size_profile; }));
    k.push_back(number_key("initial_condition", "size_mean",
                           [](RunConfiguration& c) -> double& { return c.initial_condition.size_mean; }));
    k.push_back(number_key("initial_condition", "size_width",
                           [](RunConfiguration& c) -> double& { return c.initial_condition.size_width; }));
    k.push_back(choice_key("initial_condition", "checkpoint", {},
                           [](RunConfiguration& c) -> std::string& { return c.initial_condition.checkpoint; }));
    return k;
  }();
  return table;
}

const std::vector<std::string>& section_order() {
  static const std::vector<std::string> s{"grids",  "rates",    "frag_kernel",      "coag_kernel",
                                          "solver", "analysis", "initial_condition"};
  return s;
}

bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

void validate(const RunConfiguration& c, const std::map<std::string, int>& lines, std::vector<ConfigIssue>& issues) {
  auto line_of = [&](const std::string& key) {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  };
  auto check = [&](bool ok, const std::string& key, const std::string& message) {
    if (!ok) issues.push_back({line_of(key), message});
  };
  const auto& g = c.grids;
  check(g.dim == 1 || g.dim == 2, "grids.dim", "dim must be 1 or 2");
  check(g.length > 0.0 && std::isfinite(g.length), "grids.length", "length must be positive");
  check(g.n >= 8 && is_power_of_two(g.n), "grids.n", "n must be a power of two >= 8");
  check(g.xi_min > 0.0, "grids.xi_min", "xi_min must be positive");
  check(g.xi_max > g.xi_min && std::isfinite(g.xi_max), "grids.xi_max", "xi_max must exceed xi_min");
  check(g.m >= 16, "grids.m", "m must be at least 16");

  const auto& r = c.rates;
  if (r.mode == "power") {
    check(r.theta_alpha > 0.0, "rates.theta_alpha", "theta_alpha must be positive");
    check(r.theta_beta > 0.0, "rates.theta_beta", "theta_beta must be positive");
    check(r.alpha_scale > 0.0, "rates.alpha_scale", "alpha_scale must be positive");
    check(r.beta_scale > 0.0, "rates.beta_scale", "beta_scale must be positive");
    check(r.c_alpha_lower > 0.0 && r.c_alpha_lower <= r.c_alpha_upper, "rates.c_alpha_lower",
          "alpha envelope constants must satisfy 0 < lower <= upper");
    check(r.c_beta_lower > 0.0 && r.c_beta_lower <= r.c_beta_upper, "rates.c_beta_lower",
          "beta envelope constants must satisfy 0 < lower <= upper");
  } else if (r.mode == "constant") {
    check(r.alpha >= 0.0, "rates.alpha", "alpha must be >= 0");
    check(r.beta >= 0.0, "rates.beta", "beta must be >= 0");
  } else {
    check(!r.table.empty(), "rates.table", "tabulated rates need a table path");
  }
  check(r.modulation >= 0.0, "rates.modulation", "modulation amplitude must be >= 0");

  const auto& f = c.frag_kernel;
  if (f.family == "power" || f.profile == "power")
    check(f.nu > -1.0 && f.nu <= 0.0, "frag_kernel.nu", "nu must lie in (-1, 0]");
  if (f.family == "tabulated") check(!f.table.empty(), "frag_kernel.table", "tabulated kernel needs a table path");

  const auto& k = c.coag_kernel;
  check(k.rho > 0.0 && k.rho < 1.0, "coag_kernel.rho", "rho must lie in (0,1)");
  check(k.c_kappa > 0.0, "coag_kernel.c_kappa", "c_kappa must be positive");
  check(k.kappa0 >= 0.0, "coag_kernel.kappa0", "kappa0 must be >= 0");

  const auto& s = c.solver;
  check(s.dt > 0.0, "solver.dt", "dt must be positive");
  check(s.t_end > 0.0, "solver.t_end", "t_end must be positive");
  check(s.safety > 0.0 && s.safety <= 1.0, "solver.safety", "safety must lie in (0, 1]");
  check(s.picard_nodes >= 8, "solver.picard_nodes", "picard_nodes must be at least 8");
  check(s.picard_kmax >= 1, "solver.picard_kmax", "picard_kmax must be at least 1");
  check(s.picard_tol > 0.0, "solver.picard_tol", "picard_tol must be positive");
  check(s.output_every >= 1, "solver.output_every", "output_every must be at least 1");
  check(s.blowup_factor > 1.0, "solver.blowup_factor", "blowup_factor must exceed 1");

  const auto& a = c.analysis;
  check(a.p >= 1.0, "analysis.p", "p must be >= 1");
  check(a.ell >= 0.0, "analysis.ell", "ell must be >= 0");
  check(a.delta >= 0.0 && a.delta < 1.0, "analysis.delta", "delta must lie in [0,1)");
  check(a.growth_tolerance >= 0.0, "analysis.growth_tolerance", "growth_tolerance must be >= 0");
  for (const auto& n : a.norms)
    check(n.p >= 1.0 && n.ell >= 0.0 && n.s >= 0.0, "analysis.norms", "norms need p >= 1, ell >= 0, s >= 0");
  check(a.eta_samples.empty() || (a.eta_samples.size() >= 4 && std::is_sorted(a.eta_samples.begin(), a.eta_samples.end()) &&
                                  a.eta_samples.front() > 0.0),
        "analysis.eta_samples", "eta_samples need at least 4 positive increasing values");
  check(a.ell_grid.empty() || (std::is_sorted(a.ell_grid.begin(), a.ell_grid.end()) && a.ell_grid.front() >= 0.0),
        "analysis.ell_grid", "ell_grid must be ascending and >= 0");

  const auto& i = c.initial_condition;
  check(i.amplitude >= 0.0, "initial_condition.amplitude", "amplitude must be >= 0");
  check(i.width > 0.0, "initial_condition.width", "width must be positive");
  check(i.size_mean > 0.0, "initial_condition.size_mean", "size_mean must be positive");
  check(i.size_width > 0.0, "initial_condition.size_width", "size_width must be positive");
  if (i.preset == "checkpoint")
    check(!i.checkpoint.empty(), "initial_condition.checkpoint", "checkpoint preset needs a path");
}

}  // namespace

std::vector<NormSpec> RunConfiguration::norm_set() const {
  if (!analysis.norms.empty()) return analysis.norms;
  return default_norm_set(analysis.p, analysis.ell, coag_kernel.rho);
}

RunConfiguration parse_config(const std::string& text) {
  RunConfiguration cfg;
  std::vector<ConfigIssue> issues;
  std::map<std::string, int> seen;  // "section.key" -> line
  const auto& sections = section_order();
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back({line_no, "malformed section header"});
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
        issues.push_back({line_no, "unknown section [" + section + "]"});
        section = "?";
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({line_no, "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      issues.push_back({line_no, "key '" + key + "' appears before any section"});
      continue;
    }
    if (section == "?") continue;  // already reported
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Key& k) { return k.section == section && k.name == key; });
    if (it == table.end()) {
      issues.push_back({line_no, "unknown key '" + key + "' in [" + section + "]"});
      continue;
    }
    const std::string full = section + "." + key;
    if (seen.count(full)) {
      issues.push_back({line_no, "duplicate key '" + key + "' in [" + section + "]"});
      continue;
    }
    seen[full] = line_no;
    if (auto err = it->set(cfg, value); !err.empty()) issues.push_back({line_no, err});
  }
  validate(cfg, seen, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

std::string serialize_config(const RunConfiguration& config) {
  std::string out;
  for (const auto& section : section_order()) {
    if (!out.empty()) out += "\n";
    out += "[" + section + "]\n";
    for (const auto& k : keys()) {
      if (k.section != section) continue;
      const std::string value = k.get(config);
      out += k.name + (value.empty() ? " =" : " = " + value) + "\n";
    }
  }
  return out;
}

std::string config_hash(const RunConfiguration& config) {
  const std::string text = serialize_config(config);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[digest[i] >> 4];
    s += hex[digest[i] & 0xF];
  }
  return s;
}

}  // namespace fragkin
