// sqwell: data files for the quenched infinite square well.

#include <sqwell/sqwell.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace {

using json = nlohmann::json;

enum ExitCode
{
  ok = 0,
  verification_failure = 1,
  usage_error = 2,
  non_convergence = 3,
};

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct Common
{
  std::optional<double> delta;
  std::optional<std::size_t> modes;
  std::optional<double> tol;
  std::string output = "-";
  std::string format = "csv";
};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Rows of numbers plus '#' header lines (csv) or a leading header object (jsonl).
class Table
{
public:
  Table(const Common& common, std::vector<std::string> columns)
    : jsonl_(common.format == "jsonl"), columns_(std::move(columns))
  {
    if (common.output == "-") {
      out_ = &std::cout;
    } else {
      file_ = std::make_unique<std::ofstream>(common.output);
      if (!*file_)
        throw UsageError("cannot open output file '" + common.output + "'");
      out_ = file_.get();
      path_ = common.output;
    }
  }

  void meta(const std::string& key, const std::string& value) { header_.emplace_back(key, value); }
  void meta(const std::string& key, double value) { meta(key, fmt(value)); }
  void meta(const std::string& key, std::size_t value) { meta(key, std::to_string(value)); }

  void row(const std::vector<double>& values)
  {
    flush_header();
    if (jsonl_) {
      json j = json::object();
      for (std::size_t i = 0; i < values.size(); ++i)
        j[columns_[i]] = values[i];
      *out_ << j.dump() << '\n';
    } else {
      for (std::size_t i = 0; i < values.size(); ++i)
        *out_ << (i ? "," : "") << fmt(values[i]);
      *out_ << '\n';
    }
  }

  /// Trailing summary: '#' lines in csv, one {"summary": ...} object in jsonl.
  void summary(const std::vector<std::pair<std::string, std::string>>& items)
  {
    flush_header();
    if (jsonl_) {
      json j = json::object();
      for (const auto& [k, v] : items)
        j[k] = v;
      *out_ << json{{"summary", j}}.dump() << '\n';
    } else {
      for (const auto& [k, v] : items)
        *out_ << "# " << k << ": " << v << '\n';
    }
  }

  void finish()
  {
    flush_header();
    out_->flush();
    if (!*out_)
      throw std::runtime_error("write failed for '" + (path_.empty() ? std::string("stdout") : path_) + "'");
  }

private:
  void flush_header()
  {
    if (header_done_)
      return;
    header_done_ = true;
    if (jsonl_) {
      json j = json::object();
      for (const auto& [k, v] : header_)
        j[k] = v;
      j["columns"] = columns_;
      *out_ << json{{"header", j}}.dump() << '\n';
    } else {
      for (const auto& [k, v] : header_)
        *out_ << "# " << k << ": " << v << '\n';
      for (std::size_t i = 0; i < columns_.size(); ++i)
        *out_ << (i ? "," : "") << columns_[i];
      *out_ << '\n';
    }
  }

  bool jsonl_;
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> header_;
  bool header_done_ = false;
  std::ostream* out_ = nullptr;
  std::unique_ptr<std::ofstream> file_;
  std::string path_;
};

sqwell::WellConfig require_config(const Common& c)
{
  if (!c.delta)
    throw UsageError("--delta is required");
  return sqwell::WellConfig::from_shift(*c.delta);
}

/// N from --n or --tol; a default applies when neither is given.
std::size_t resolve_modes(const Common& c, const sqwell::WellConfig& config, sqwell::Observable obs,
                          std::size_t fallback)
{
  if (c.modes && c.tol)
    throw UsageError("give either --n or --tol, not both");
  if (c.modes) {
    if (*c.modes == 0)
      throw UsageError("--n must be >= 1");
    return *c.modes;
  }
  if (c.tol)
    return sqwell::truncation_for_tolerance(config, obs, *c.tol);
  return fallback;
}

void provenance(Table& table, const Common& c, const sqwell::WellConfig& config, std::size_t modes)
{
  table.meta("sqwell", std::string(SQWELL_VERSION));
  table.meta("delta", config.delta());
  table.meta("L", config.width());
  table.meta("T", config.period());
  table.meta("N", modes);
  if (c.tol)
    table.meta("tol", *c.tol);
}

// ---------------------------------------------------------------- coeffs

struct CoeffsOptions
{
  std::string observable = "survival";
};

int run_coeffs(const Common& c, const CoeffsOptions& o)
{
  const auto config = require_config(c);
  const auto obs = o.observable == "survival" ? sqwell::Observable::survival : sqwell::Observable::coefficients;
  const auto modes = resolve_modes(c, config, obs, 100);
  const auto a = sqwell::ModeCoefficients::compute(config, modes);
  Table table(c, {"n", "a_n"});
  provenance(table, c, config, modes);
  if (c.tol) {
    table.meta("observable", o.observable);
    table.meta("tail_bound", sqwell::tail_bound(config, obs, modes));
  }
  for (std::size_t n = 1; n <= modes; ++n)
    table.row({static_cast<double>(n), a(n)});
  table.finish();
  return ok;
}

// ---------------------------------------------------------------- evolve

struct EvolveOptions
{
  std::size_t nx = 512;
  std::size_t nt = 512;
};

int run_evolve(const Common& c, const EvolveOptions& o)
{
  const auto config = require_config(c);
  const auto modes = resolve_modes(c, config, sqwell::Observable::coefficients, 2000);
  if (o.nx < 2 || o.nt < 2)
    throw UsageError("--nx and --nt must be >= 2");
  const auto a = sqwell::ModeCoefficients::compute(config, modes);
  const auto xs = sqwell::uniform_grid(0.0, config.width(), o.nx);
  const auto ts = sqwell::uniform_grid(0.0, config.period(), o.nt);
  const auto field = sqwell::density_field(config, a, xs, ts);

  Table table(c, {"t", "x", "density"});
  provenance(table, c, config, modes);
  table.meta("x_grid", "uniform [0, L] x " + std::to_string(o.nx));
  table.meta("t_grid", "uniform [0, T] x " + std::to_string(o.nt));
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j)
      table.row({ts[i], xs[j], field.at(i, j)});
  table.finish();
  return ok;
}

// ---------------------------------------------------------------- escape

struct EscapeOptions
{
  double t_min = 1e-9;
  double t_max = 1e-2;
  std::size_t points = 121;
  bool linear = false;
  bool with_zero = false;
};

int run_escape(const Common& c, const EscapeOptions& o)
{
  const auto config = require_config(c);
  const auto modes = resolve_modes(c, config, sqwell::Observable::survival, 100000);
  if (o.points < 2)
    throw UsageError("--points must be >= 2");
  auto times = o.linear ? sqwell::uniform_grid(o.t_min, o.t_max, o.points) : sqwell::log_grid(o.t_min, o.t_max, o.points);
  if (o.with_zero && times.front() > 0.0)
    times.insert(times.begin(), 0.0);

  using sqwell::Method;
  const Method methods[] = {Method::exact, Method::small_delta, Method::integral, Method::asymptote_free,
                            Method::asymptote_confined};
  std::vector<sqwell::TimeSeries> columns;
  for (auto m : methods)
    columns.push_back(sqwell::escape_series(config, times, m, modes));

  Table table(c, {"t", "exact", "small_delta", "integral", "asymptote_free", "asymptote_confined"});
  provenance(table, c, config, modes);
  table.meta("t_grid", std::string(o.linear ? "linear" : "log") + " [" + fmt(o.t_min) + ", " + fmt(o.t_max) +
                         "] x " + std::to_string(o.points) + (o.with_zero ? " plus t = 0" : ""));
  table.meta("transition_time", sqwell::transition_time(config.delta()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> r{times[i]};
    for (const auto& col : columns)
      r.push_back(col.values[i]);
    table.row(r);
  }
  table.finish();
  return ok;
}

// ---------------------------------------------------------------- universal

struct UniversalOptions
{
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 1001;
  long p_max = 4;
  double probe = 1e-4;
  std::string valleys_path;
};

int run_universal(const Common& c, const UniversalOptions& o)
{
  if (c.modes && c.tol)
    throw UsageError("give either --n or --tol, not both");
  std::size_t modes = c.modes.value_or(sqwell::default_universal_modes);
  if (c.tol) {
    modes = 2;
    while (sqwell::universal_tail_bound(modes) >= *c.tol) {
      if (modes > sqwell::default_mode_cap)
        throw sqwell::TruncationCapExceeded("tolerance " + fmt(*c.tol) + " needs more than " +
                                            std::to_string(sqwell::default_mode_cap) + " modes");
      modes *= 2;
    }
  }
  if (modes < 2)
    throw UsageError("--n must be >= 2");
  if (!(o.hi > o.lo) || o.points < 2)
    throw UsageError("need --lo < --hi and --points >= 2");

  const auto grid = sqwell::uniform_grid(o.lo, o.hi, o.points);
  const auto curve = sqwell::universal_curve(grid, modes);
  const auto valleys = sqwell::valley_locations(o.p_max, {o.probe, modes});

  Table table(c, {"xi", "F", "tail_bound"});
  table.meta("sqwell", std::string(SQWELL_VERSION));
  table.meta("N", modes);
  if (c.tol)
    table.meta("tol", *c.tol);
  table.meta("xi_grid", "uniform [" + fmt(o.lo) + ", " + fmt(o.hi) + "] x " + std::to_string(o.points));
  table.meta("valley_p_max", static_cast<std::size_t>(o.p_max));
  table.meta("valley_probe", o.probe);

  if (!o.valleys_path.empty()) {
    std::ofstream v(o.valleys_path);
    if (!v)
      throw UsageError("cannot open valley file '" + o.valleys_path + "'");
    v << "q,p,location,depth\n";
    for (const auto& val : valleys)
      v << val.q << ',' << val.p << ',' << fmt(val.location) << ',' << fmt(val.depth) << '\n';
    if (!v)
      throw std::runtime_error("write failed for '" + o.valleys_path + "'");
  } else {
    for (const auto& val : valleys)
      table.meta("valley", std::to_string(val.q) + "/" + std::to_string(val.p) + "^2 = " + fmt(val.location) +
                             " depth " + fmt(val.depth));
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    table.row({grid[i], curve.values[i], curve.tail_bound});
  table.finish();
  return ok;
}

// ---------------------------------------------------------------- fractal

struct FractalOptions
{
  double eps_min = 1e-5;
  double eps_max = 1e-2;
  std::size_t rulers = 13;
  bool histogram = false;
  double epsilon = 1e-5;
  std::size_t bins = 40;
  bool sigma = false;
  bool selftest = false;
};

int run_fractal(const Common& c, const FractalOptions& o)
{
  if (o.selftest) {
    const auto eps = sqwell::log_grid(1e-5, 1e-2, 13);
    std::vector<double> l;
    for (double e : eps)
      l.push_back(std::pow(e, -0.25));
    const auto fit = sqwell::dimension_fit(eps, l);
    Table table(c, {"epsilon", "length"});
    table.meta("sqwell", std::string(SQWELL_VERSION));
    table.meta("selftest", "l = eps^(-1/4)");
    for (std::size_t i = 0; i < fit.epsilons.size(); ++i)
      table.row({fit.epsilons[i], fit.lengths[i]});
    const bool pass = std::abs(fit.dimension - 1.25) < 1e-12;
    table.summary({{"D", fmt(fit.dimension)}, {"selftest", pass ? "pass" : "fail"}});
    table.finish();
    return pass ? ok : verification_failure;
  }

  if (o.histogram) {
    const auto sample = sqwell::phase_sum_samples(o.epsilon);
    const auto report = sqwell::normality_diagnostics(sample, o.bins);
    Table table(c, {"left", "right", "count"});
    table.meta("sqwell", std::string(SQWELL_VERSION));
    table.meta("epsilon", o.epsilon);
    table.meta("terms", sample.terms);
    table.meta("samples", report.samples);
    table.meta("bins", o.bins);
    for (const auto& b : report.histogram)
      table.row({b.left, b.right, static_cast<double>(b.count)});
    table.summary({{"mean", fmt(report.mean)},
                   {"stddev", fmt(report.stddev)},
                   {"skewness", report.skewness ? fmt(*report.skewness) : "undefined"},
                   {"excess_kurtosis", report.excess_kurtosis ? fmt(*report.excess_kurtosis) : "undefined"}});
    table.finish();
    return ok;
  }

  if (o.sigma) {
    const auto eps = sqwell::log_grid(o.eps_min, o.eps_max, o.rulers);
    std::vector<double> sig;
    for (double e : eps)
      sig.push_back(sqwell::phase_sum_samples(e).stddev);
    const auto fit = sqwell::log_log_fit(eps, sig);
    Table table(c, {"epsilon", "sigma"});
    table.meta("sqwell", std::string(SQWELL_VERSION));
    table.meta("eps_grid", "log [" + fmt(o.eps_min) + ", " + fmt(o.eps_max) + "] x " + std::to_string(o.rulers));
    for (std::size_t i = 0; i < eps.size(); ++i)
      table.row({eps[i], sig[i]});
    table.summary({{"slope", fmt(fit.slope)}, {"residual", fmt(fit.rms_residual)}});
    table.finish();
    return ok;
  }

  if (c.tol)
    throw UsageError("fractal takes --n, not --tol");
  const std::size_t modes = c.modes.value_or(1000000);
  const auto eps = sqwell::ruler_ladder(o.eps_min, o.eps_max, o.rulers);
  const auto lengths = sqwell::measure_universal_lengths(eps, modes);
  std::vector<double> printed, simplified;
  for (const auto& l : lengths) {
    printed.push_back(l.printed);
    simplified.push_back(l.simplified);
  }
  const auto fp = sqwell::dimension_fit(eps, printed);
  const auto fs = sqwell::dimension_fit(eps, simplified);

  Table table(c, {"epsilon", "l_printed", "l_simplified"});
  table.meta("sqwell", std::string(SQWELL_VERSION));
  table.meta("N", modes);
  table.meta("rulers", "1/M, log-spaced in [" + fmt(o.eps_min) + ", " + fmt(o.eps_max) + "] x " +
                         std::to_string(eps.size()));
  for (const auto& l : lengths)
    table.row({l.epsilon, l.printed, l.simplified});
  table.summary({{"D_printed", fmt(fp.dimension)},
                 {"D_simplified", fmt(fs.dimension)},
                 {"residual_printed", fmt(fp.residual)},
                 {"residual_simplified", fmt(fs.residual)}});
  table.finish();
  return ok;
}

// ---------------------------------------------------------------- oracle-check

struct OracleOptions
{
  std::size_t points = 4096;
  std::size_t steps = 10000;
  double t = 0.01;
  double threshold = 1e-3;
  bool coarse = false;
  bool json_report = false;
};

int run_oracle(Common c, const OracleOptions& o)
{
  if (!c.delta)
    c.delta = 0.2;
  const auto config = require_config(c);
  const std::size_t modes = resolve_modes(c, config, sqwell::Observable::coefficients, 20000);
  const std::size_t points = o.coarse ? 64 : o.points;
  const std::size_t steps = o.coarse ? 10 : o.steps;
  if (points < 3 || steps == 0 || !(o.t > 0.0))
    throw UsageError("need --points >= 3, --steps >= 1 and --t > 0");

  struct Check
  {
    std::string name;
    double value;
    double threshold;
    bool pass() const { return value < threshold; }
  };
  std::vector<Check> checks;

  const auto coeffs = sqwell::ModeCoefficients::compute(config, modes);
  const auto start = sqwell::quench_initial_state(config, points);
  const auto fd = sqwell::propagate(start, o.t / static_cast<double>(steps), steps);
  const auto spectral = sqwell::spectral_state(config, coeffs, points, o.t);
  checks.push_back({"l2_error", sqwell::l2_distance(fd, spectral), o.threshold});
  checks.push_back({"norm_drift", std::abs(sqwell::norm_squared(fd) - sqwell::norm_squared(start)), 1e-6});

  const auto aligned = sqwell::node_aligned_points(config, std::max<std::size_t>(points, 6000));
  const auto overlap = sqwell::overlap(sqwell::quench_initial_state(config, aligned),
                                       sqwell::spectral_state(config, coeffs, aligned, o.t));
  checks.push_back({"survival_vs_overlap", std::abs(overlap - sqwell::survival_amplitude(config, o.t, modes)), 1e-6});

  bool all = true;
  for (const auto& ch : checks)
    all = all && ch.pass();

  if (o.json_report) {
    json report = {{"sqwell", SQWELL_VERSION}, {"delta", config.delta()}, {"t", o.t},       {"N", modes},
                   {"points", points},         {"steps", steps},          {"pass", all}, {"checks", json::array()}};
    for (const auto& ch : checks)
      report["checks"].push_back({{"name", ch.name}, {"value", ch.value}, {"threshold", ch.threshold},
                                  {"pass", ch.pass()}});
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << "# sqwell " << SQWELL_VERSION << " oracle-check delta=" << fmt(config.delta()) << " t=" << fmt(o.t)
              << " N=" << modes << " points=" << points << " steps=" << steps << '\n';
    for (const auto& ch : checks)
      std::cout << (ch.pass() ? "PASS " : "FAIL ") << ch.name << " = " << fmt(ch.value) << " (threshold "
                << fmt(ch.threshold) << ")\n";
  }
  return all ? ok : verification_failure;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Quenched infinite square well: spectral data, escape curves, universal function"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  app.set_version_flag("--version", std::string(SQWELL_VERSION));

  Common common;
  app.add_option("--delta", common.delta, "wall shift (L = 1 + delta)");
  app.add_option("--n", common.modes, "mode truncation N");
  app.add_option("--tol", common.tol, "tail tolerance used to choose N");
  app.add_option("-o,--output", common.output, "output path, '-' for stdout");
  app.add_option("--format", common.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

  CoeffsOptions coeffs;
  auto* coeffs_cmd = app.add_subcommand("coeffs", "mode coefficients a_n");
  coeffs_cmd->add_option("--observable", coeffs.observable, "tail bound used with --tol")
    ->check(CLI::IsMember({"survival", "coefficients"}));

  EvolveOptions evolve;
  auto* evolve_cmd = app.add_subcommand("evolve", "density |psi(x,t)|^2 over [0,L] x [0,T]");
  evolve_cmd->add_option("--nx", evolve.nx, "x samples");
  evolve_cmd->add_option("--nt", evolve.nt, "t samples");

  EscapeOptions escape;
  auto* escape_cmd = app.add_subcommand("escape", "escape probability by every method");
  escape_cmd->add_option("--t-min", escape.t_min);
  escape_cmd->add_option("--t-max", escape.t_max);
  escape_cmd->add_option("--points", escape.points);
  escape_cmd->add_flag("--linear", escape.linear, "uniform instead of logarithmic time grid");
  escape_cmd->add_flag("--with-zero", escape.with_zero, "prepend a t = 0 row");

  UniversalOptions universal;
  auto* universal_cmd = app.add_subcommand("universal", "universal function F(xi) and its valleys");
  universal_cmd->add_option("--lo", universal.lo);
  universal_cmd->add_option("--hi", universal.hi);
  universal_cmd->add_option("--points", universal.points);
  universal_cmd->add_option("--p-max", universal.p_max, "largest p for valleys at q/p^2");
  universal_cmd->add_option("--probe", universal.probe, "neighbour offset for the minimum test");
  universal_cmd->add_option("--valleys", universal.valleys_path, "write the valley list here");

  FractalOptions fractal;
  auto* fractal_cmd = app.add_subcommand("fractal", "curve length of F against the ruler, and phase sums");
  fractal_cmd->add_option("--eps-min", fractal.eps_min);
  fractal_cmd->add_option("--eps-max", fractal.eps_max);
  fractal_cmd->add_option("--rulers", fractal.rulers);
  fractal_cmd->add_flag("--histogram", fractal.histogram, "histogram of the phase sums at --epsilon");
  fractal_cmd->add_option("--epsilon", fractal.epsilon);
  fractal_cmd->add_option("--bins", fractal.bins);
  fractal_cmd->add_flag("--sigma", fractal.sigma, "phase-sum spread against the ruler");
  fractal_cmd->add_flag("--selftest", fractal.selftest, "fit a synthetic eps^(-1/4) length");

  OracleOptions oracle;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "compare the spectral solution with a finite-difference run");
  oracle_cmd->add_option("--points", oracle.points);
  oracle_cmd->add_option("--steps", oracle.steps);
  oracle_cmd->add_option("--t", oracle.t);
  oracle_cmd->add_option("--threshold", oracle.threshold);
  oracle_cmd->add_flag("--coarse", oracle.coarse, "64 points and 10 steps");
  oracle_cmd->add_flag("--json", oracle.json_report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage_error;
  }

  try {
    if (*coeffs_cmd)
      return run_coeffs(common, coeffs);
    if (*evolve_cmd)
      return run_evolve(common, evolve);
    if (*escape_cmd)
      return run_escape(common, escape);
    if (*universal_cmd)
      return run_universal(common, universal);
    if (*fractal_cmd)
      return run_fractal(common, fractal);
    if (*oracle_cmd)
      return run_oracle(common, oracle);
  } catch (const sqwell::NonConvergence& e) {
    std::cerr << "sqwell: " << e.what() << '\n';
    return non_convergence;
  } catch (const UsageError& e) {
    std::cerr << "sqwell: " << e.what() << '\n';
    return usage_error;
  } catch (const sqwell::TruncationCapExceeded& e) {
    std::cerr << "sqwell: " << e.what() << '\n';
    return usage_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "sqwell: " << e.what() << '\n';
    return usage_error;
  } catch (const std::domain_error& e) {
    std::cerr << "sqwell: " << e.what() << '\n';
    return usage_error;
  } catch (const std::exception& e) {
    std::cerr << "sqwell: " << e.what() << '\n';
    return verification_failure;
  }
  return usage_error;
}
