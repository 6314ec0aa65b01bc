// Command line front end: JSON run configurations in, CSV tables out.
//
// Subcommands
//   density      connection coefficients and spectral density over a lambda set
//   distcheck    empirical distribution of theta0 mod pi against its limit
//   theorem2     preimage-measure convergence table
//   herglotz     both sides of the epsilon-gap bound
//   condition-a  Condition A ratio over an N schedule
//   bessel       oracle dump of J, Y and derivatives
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "valdist/appell_forms.hpp"
#include "valdist/bessel.hpp"
#include "valdist/boundary_m.hpp"
#include "valdist/grid.hpp"
#include "valdist/herglotz.hpp"
#include "valdist/potential.hpp"
#include "valdist/value_distribution.hpp"

using json = nlohmann::json;
using namespace valdist;

namespace {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> fields) {
    if (fields.size() != header_.size())
      throw std::logic_error("CsvTable: field count mismatch");
    rows_.push_back(std::move(fields));
  }

  void write(std::ostream& out) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
      out << header_[i] << (i + 1 < header_.size() ? "," : "\n");
    for (const auto& row : rows_)
      for (std::size_t i = 0; i < row.size(); ++i)
        out << row[i] << (i + 1 < row.size() ? "," : "\n");
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void emit(const CsvTable& table, const std::string& out_path) {
  if (out_path.empty()) {
    table.write(std::cout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw config_error("cannot open output path: " + out_path);
  table.write(out);
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
}

const json& require(const json& j, const std::string& key) {
  if (!j.contains(key)) throw config_error("config is missing \"" + key + "\"");
  return j.at(key);
}

double require_number(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw config_error("\"" + key + "\" must be a number");
  return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) throw config_error("\"" + key + "\" must be a non-empty array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw config_error("\"" + key + "\" must contain numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Potential parse_potential(const json& cfg) {
  const json& p = require(cfg, "potential");
  const std::string kind = require(p, "kind").get<std::string>();
  const double a = require_number(p, "a");
  try {
    if (kind == "zero") return Potential::zero(a);
    if (kind == "inverse_square") return Potential::inverse_square(require_number(p, "nu"), a);
    if (kind == "tabulated")
      return Potential::tabulated(number_list(require(p, "x"), "x"),
                                  number_list(require(p, "q"), "q"), a);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("invalid potential: ") + e.what());
  }
  throw config_error("unknown potential kind: " + kind);
}

IntegratorConfig parse_tolerances(const json& cfg, double rel_default = 1e-10,
                                  double abs_default = 1e-12) {
  IntegratorConfig out;
  out.rel_tol = rel_default;
  out.abs_tol = abs_default;
  if (cfg.contains("tolerances")) {
    const json& t = cfg.at("tolerances");
    if (t.contains("rel_tol")) out.rel_tol = t.at("rel_tol").get<double>();
    if (t.contains("abs_tol")) out.abs_tol = t.at("abs_tol").get<double>();
    if (t.contains("max_step")) out.max_step = t.at("max_step").get<double>();
  }
  try {
    out.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("invalid tolerances: ") + e.what());
  }
  return out;
}

struct LambdaGrid {
  Interval window;
  int n = 0;
};

LambdaGrid parse_lambda_grid(const json& cfg) {
  const json& l = require(cfg, "lambda");
  LambdaGrid g;
  g.window = {require_number(l, "lo"), require_number(l, "hi")};
  const double n = require_number(l, "n");
  g.n = static_cast<int>(n);
  if (!(g.window.lo < g.window.hi)) throw config_error("lambda: need lo < hi");
  if (g.n < 2 || g.n != n) throw config_error("lambda: n must be an integer >= 2");
  return g;
}

std::vector<double> parse_schedule(const json& cfg, const std::string& key, double floor) {
  std::vector<double> xs = number_list(require(cfg, key), key);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > floor)) throw config_error(key + ": entries must exceed " + fmt(floor));
    if (i > 0 && !(xs[i] > xs[i - 1])) throw config_error(key + ": entries must increase");
  }
  return xs;
}

IntervalUnion parse_set(const json& cfg) {
  const json& s = require(cfg, "set");
  if (!s.is_array()) throw config_error("\"set\" must be an array of [lo, hi] pairs");
  std::vector<Interval> parts;
  for (const auto& pair : s) {
    if (!pair.is_array() || pair.size() != 2)
      throw config_error("\"set\" entries must be [lo, hi] pairs");
    auto endpoint = [](const json& v, double inf_sign) {
      if (v.is_null()) return inf_sign * kInf;
      if (!v.is_number()) throw config_error("\"set\" endpoints must be numbers or null");
      return v.get<double>();
    };
    parts.push_back({endpoint(pair[0], -1.0), endpoint(pair[1], 1.0)});
  }
  try {
    return IntervalUnion(parts);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("invalid \"set\": ") + e.what());
  }
}

std::function<double(double)> parse_band_edge(const json& v, const std::string& name) {
  if (v.is_number()) {
    const double c = v.get<double>();
    return [c](double) { return c; };
  }
  if (v.is_object() && v.contains("edges") && v.contains("values")) {
    const auto edges = number_list(v.at("edges"), name + ".edges");
    const auto values = number_list(v.at("values"), name + ".values");
    if (values.size() != edges.size() + 1)
      throw config_error(name + ": need one more value than edges");
    return [edges, values](double l) {
      std::size_t i = 0;
      while (i < edges.size() && l > edges[i]) ++i;
      return values[i];
    };
  }
  throw config_error(name + " must be a number or a step spec {edges, values}");
}

BoundaryM parse_model(const json& cfg, const Potential& p, const IntegratorConfig& ic) {
  std::string which = "auto";
  if (cfg.contains("model")) which = cfg.at("model").get<std::string>();
  if (which == "auto") {
    switch (p.kind()) {
      case Potential::Kind::zero:
        which = "free";
        break;
      case Potential::Kind::inverse_square:
        which = "bessel";
        break;
      case Potential::Kind::tabulated:
        which = "appell";
        break;
    }
  }
  if (which == "free") return BoundaryM::free_model();
  if (which == "bessel") {
    if (p.kind() != Potential::Kind::inverse_square)
      throw config_error("model \"bessel\" needs an inverse_square potential");
    return BoundaryM::bessel_model(p.nu(), p.a());
  }
  if (which == "appell") return BoundaryM::appell_model(p, ic);
  throw config_error("unknown model: " + which);
}

int threads_from(const json& cfg, int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (cfg.contains("threads")) return cfg.at("threads").get<int>();
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_density(const json& cfg, const std::string& out_path, int cli_threads) {
  const Potential p = parse_potential(cfg);
  const IntegratorConfig ic = parse_tolerances(cfg, 1e-11, 1e-13);
  std::vector<double> lambdas;
  if (cfg.contains("lambda_values")) {
    lambdas = number_list(cfg.at("lambda_values"), "lambda_values");
  } else {
    const LambdaGrid g = parse_lambda_grid(cfg);
    const Eigen::ArrayXd grid = midpoint_grid(g.window, g.n);
    lambdas.assign(grid.data(), grid.data() + grid.size());
  }
  for (double l : lambdas)
    if (!(l > 0.0)) throw config_error("density: lambda values must be positive");
  std::vector<double> match_points;
  if (cfg.contains("match_points"))
    match_points = number_list(cfg.at("match_points"), "match_points");
  if (!p.decays_to_zero())
    throw config_error("density: potential must decay to zero for the matching route");

  struct Row {
    DensityResult d;
    std::optional<double> closed;
  };
  std::vector<Row> rows(lambdas.size());
  std::string failure;
  std::mutex failure_mutex;
  parallel_for_index(lambdas.size(), threads_from(cfg, cli_threads), [&](std::size_t i) {
    try {
      const ConnectionResult r = connection_coefficients(p, lambdas[i], match_points, ic);
      rows[i].d = density_from_coeffs(r.coeffs, lambdas[i]);
      if (p.kind() == Potential::Kind::zero)
        rows[i].closed = std::sqrt(lambdas[i]) / M_PI;
      else if (p.kind() == Potential::Kind::inverse_square)
        rows[i].closed = bessel_density(p.nu(), p.a(), lambdas[i]);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (failure.empty()) failure = "lambda = " + fmt(lambdas[i]) + ": " + e.what();
    }
  });
  if (!failure.empty()) throw std::runtime_error("density failed at " + failure);

  CsvTable table({"lambda", "a_tilde", "b_tilde", "c_tilde", "f_numeric", "f_closed_form",
                  "rel_error"});
  for (const Row& r : rows) {
    std::vector<std::string> fields{fmt(r.d.lambda), fmt(r.d.a_tilde), fmt(r.d.b_tilde),
                                    fmt(r.d.c_tilde), fmt(r.d.f)};
    if (r.closed) {
      fields.push_back(fmt(*r.closed));
      fields.push_back(fmt(std::abs(r.d.f - *r.closed) / std::abs(*r.closed)));
    } else {
      fields.emplace_back();
      fields.emplace_back();
    }
    table.add_row(std::move(fields));
  }
  emit(table, out_path);
  return 0;
}

int cmd_distcheck(const json& cfg, const std::string& out_path, int cli_threads) {
  const Potential p = parse_potential(cfg);
  const IntegratorConfig ic = parse_tolerances(cfg, 1e-8, 1e-10);
  const LambdaGrid g = parse_lambda_grid(cfg);
  const std::vector<double> xs = parse_schedule(cfg, "x_list", p.a() - 1e-12);
  const json& band_cfg = require(cfg, "band");
  const BandSpec band{parse_band_edge(require(band_cfg, "c"), "band.c"),
                      parse_band_edge(require(band_cfg, "d"), "band.d")};
  const BoundaryM model = parse_model(cfg, p, ic);

  const auto rows = uad_check(p, model, g.window, band, xs, g.n, ic,
                              SweepOptions{threads_from(cfg, cli_threads)});
  CsvTable table({"x", "empirical", "limit", "abs_error"});
  for (const auto& r : rows)
    table.add_row({fmt(r.x), fmt(r.empirical), fmt(r.limit), fmt(r.error)});
  emit(table, out_path);
  return 0;
}

int cmd_theorem2(const json& cfg, const std::string& out_path, int cli_threads) {
  const Potential p = parse_potential(cfg);
  const IntegratorConfig ic = parse_tolerances(cfg, 1e-8, 1e-10);
  const LambdaGrid g = parse_lambda_grid(cfg);
  const std::vector<double> xs = parse_schedule(cfg, "x_list", p.a());
  const IntervalUnion S = parse_set(cfg);
  const BoundaryM model = parse_model(cfg, p, ic);

  const auto rows = theorem2_table(p, model, S, g.window, xs, g.n, ic,
                                   SweepOptions{threads_from(cfg, cli_threads)});
  CsvTable table({"x", "empirical", "limit", "abs_error"});
  for (const auto& r : rows)
    table.add_row({fmt(r.x), fmt(r.empirical), fmt(r.limit), fmt(r.error)});
  emit(table, out_path);
  return 0;
}

int cmd_herglotz(const json& cfg, const std::string& out_path, int) {
  const json& f = require(cfg, "function");
  const std::string type = require(f, "type").get<std::string>();
  HerglotzFn fn;
  if (type == "rational") {
    RationalHerglotz r;
    if (f.contains("slope")) r.slope = f.at("slope").get<double>();
    if (f.contains("offset")) r.offset = f.at("offset").get<double>();
    if (f.contains("poles"))
      for (const auto& pole : f.at("poles"))
        r.poles.push_back({require_number(pole, "location"), require_number(pole, "weight")});
    try {
      fn = HerglotzFn::rational(r);
    } catch (const std::invalid_argument& e) {
      throw config_error(std::string("invalid rational function: ") + e.what());
    }
  } else if (type == "constant") {
    fn = HerglotzFn::constant(Complex(require_number(f, "re"), require_number(f, "im")));
  } else if (type == "truncated_m") {
    const Potential p = parse_potential(cfg);
    const IntegratorConfig ic = parse_tolerances(cfg, 1e-9, 1e-11);
    fn = herglotz_from_truncated(p, require_number(f, "b"), ic);
  } else {
    throw config_error("unknown herglotz function type: " + type);
  }

  const IntervalUnion S = parse_set(cfg);
  const json& w = require(cfg, "window");
  const Interval window{require_number(w, "lo"), require_number(w, "hi")};
  const double grid_n = require_number(cfg, "grid_n");
  const std::vector<double> eps_list = number_list(require(cfg, "eps_list"), "eps_list");

  CsvTable table({"eps", "lhs", "rhs", "lhs_le_rhs"});
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw config_error("eps_list entries must be positive");
    const GapResult g = theorem1_gap(fn, S, window, eps, static_cast<int>(grid_n));
    table.add_row({fmt(eps), fmt(g.lhs), fmt(g.rhs), g.lhs <= g.rhs ? "1" : "0"});
  }
  emit(table, out_path);
  return 0;
}

int cmd_condition_a(const json& cfg, const std::string& out_path, int) {
  const Potential p = parse_potential(cfg);
  const IntegratorConfig ic = parse_tolerances(cfg, 1e-10, 1e-12);
  const double lambda = require_number(cfg, "lambda_value");
  const json& m = require(cfg, "M");
  const Complex M(require_number(m, "re"), require_number(m, "im"));
  if (!(M.imag() > 0.0)) throw config_error("M must have positive imaginary part");
  const std::vector<double> ns = parse_schedule(cfg, "N_list", p.a());

  CsvTable table({"N", "ratio_re", "ratio_im", "ratio_abs"});
  for (double N : ns) {
    const Complex r = condition_a_ratio(p, lambda, M, N, ic);
    table.add_row({fmt(N), fmt(r.real()), fmt(r.imag()), fmt(std::abs(r))});
  }
  emit(table, out_path);
  return 0;
}

int cmd_bessel(const json& cfg, const std::string& out_path, int) {
  const double nu = require_number(cfg, "nu");
  std::vector<double> xs;
  if (cfg.contains("x_values")) {
    xs = number_list(cfg.at("x_values"), "x_values");
  } else {
    const json& g = require(cfg, "x_grid");
    const double lo = require_number(g, "lo"), hi = require_number(g, "hi");
    const int n = static_cast<int>(require_number(g, "n"));
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw config_error("invalid x_grid");
    std::string spacing = "log";
    if (g.contains("spacing")) spacing = g.at("spacing").get<std::string>();
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / (n - 1);
      xs.push_back(spacing == "log" ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
    }
  }

  CsvTable table({"x", "J", "Y", "Jprime", "Yprime", "wronskian_rel_err"});
  for (double x : xs) {
    if (!(x > 0.0)) throw config_error("bessel: x values must be positive");
    const BesselEval e = bessel_eval(nu, x);
    table.add_row(
        {fmt(x), fmt(e.J), fmt(e.Y), fmt(e.Jprime), fmt(e.Yprime), fmt(e.wronskian_defect())});
  }
  emit(table, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"value-distribution numerics for half-line Schrodinger operators"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_path, "output CSV path (default: stdout)");
    sub->add_option("--threads", threads, "worker threads (0 = auto)");
  };

  CLI::App* density = app.add_subcommand("density", "spectral density via frame matching");
  CLI::App* distcheck = app.add_subcommand("distcheck", "theta0 mod pi distribution table");
  CLI::App* herglotz = app.add_subcommand("herglotz", "epsilon-gap bound table");
  CLI::App* theorem2 = app.add_subcommand("theorem2", "preimage-measure convergence table");
  CLI::App* cond_a = app.add_subcommand("condition-a", "Condition A ratio schedule");
  CLI::App* bessel = app.add_subcommand("bessel", "Bessel oracle dump");
  for (CLI::App* sub : {density, distcheck, herglotz, theorem2, cond_a, bessel})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = load_config(config_path);
    if (density->parsed()) return cmd_density(cfg, out_path, threads);
    if (distcheck->parsed()) return cmd_distcheck(cfg, out_path, threads);
    if (herglotz->parsed()) return cmd_herglotz(cfg, out_path, threads);
    if (theorem2->parsed()) return cmd_theorem2(cfg, out_path, threads);
    if (cond_a->parsed()) return cmd_condition_a(cfg, out_path, threads);
    if (bessel->parsed()) return cmd_bessel(cfg, out_path, threads);
    return 2;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
