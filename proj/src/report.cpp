#include "bowenlab/report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bowenlab/error.hpp"
#include "bowenlab/kernels.hpp"

namespace bowenlab {

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::TheoremCheck:
      return 2;
    case ErrorKind::Consistency:
      return 3;
    default:
      return 1;
  }
}

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Input:
      return "input error";
    case ErrorKind::Io:
      return "io error";
    case ErrorKind::Domain:
      return "domain error";
    case ErrorKind::ModelRejected:
      return "model rejected";
    case ErrorKind::EmptySubshift:
      return "empty subshift";
    case ErrorKind::Budget:
      return "budget exceeded";
    case ErrorKind::Precondition:
      return "precondition failed";
    case ErrorKind::Degenerate:
      return "degenerate";
    case ErrorKind::TheoremCheck:
      return "theorem check failed";
    case ErrorKind::Consistency:
      return "internal consistency error";
  }
  return "error";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
  return buf;
}

void write_csv(const Table& table, std::ostream& out) {
  require(!table.header.empty() && !table.rows.empty(), ErrorKind::Input, "refusing to write an empty table");
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    require(row.size() == table.header.size(), ErrorKind::Consistency, "table row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

void write_csv(const Table& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), ErrorKind::Io, "cannot open " + path + " for writing");
  write_csv(table, f);
  f.flush();
  require(static_cast<bool>(f), ErrorKind::Io, "failed writing " + path);
}

Table avoid_table(const AvoidSeries& series, int dimension) {
  Table t;
  t.header = {"depth", "n_states", "h_top"};
  for (int i = 1; i <= dimension; ++i) t.header.push_back("lyap_" + std::to_string(i));
  for (const char* c : {"s_star", "alpha0", "eps_n", "thmA_bound", "thmB_bound"}) t.header.emplace_back(c);
  for (const auto& r : series.rows) {
    std::vector<double> row{static_cast<double>(r.depth), static_cast<double>(r.n_states), r.h_top};
    for (int i = 0; i < dimension; ++i) row.push_back(r.lyapunov[static_cast<std::size_t>(i)]);
    row.insert(row.end(), {r.s_star, r.alpha0, r.eps_n(), r.bound_a, r.bound_b});
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double to_double(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::Input, std::string("cannot parse ") + what + " from '" + s + "'");
  }
  require(used == s.size() && std::isfinite(v), ErrorKind::Input,
          std::string("cannot parse ") + what + " from '" + s + "'");
  return v;
}

int to_int(const std::string& s, const char* what) {
  const double v = to_double(s, what);
  require(v == std::floor(v) && std::abs(v) < 1e9, ErrorKind::Input, std::string(what) + " must be an integer");
  return static_cast<int>(v);
}

Family parse_family(const std::string& f) {
  if (f == "sub") return Family::SubAdditivePhi;
  if (f == "super") return Family::SuperAdditivePsi;
  fail(ErrorKind::Input, "family must be sub or super");
}

std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

}  // namespace

std::pair<int, int> parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  require(parts.size() == 2, ErrorKind::Input, "range must look like lo:hi");
  const int lo = to_int(parts[0], "range start");
  const int hi = to_int(parts[1], "range end");
  require(lo <= hi, ErrorKind::Input, "range start exceeds its end");
  return {lo, hi};
}

std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  require(parts.size() == 3, ErrorKind::Input, "grid must look like lo:hi:steps");
  const double lo = to_double(parts[0], "grid start");
  const double hi = to_double(parts[1], "grid end");
  const int steps = to_int(parts[2], "grid steps");
  require(steps >= 1 && hi >= lo, ErrorKind::Input, "grid needs steps >= 1 and lo <= hi");
  std::vector<double> g;
  for (int i = 0; i <= steps; ++i) g.push_back(i == steps ? hi : lo + (hi - lo) * i / steps);
  return g;
}

Vector parse_point(const std::string& text) {
  const auto parts = split(text, ',');
  require(!parts.empty() && parts.size() <= kMaxDim, ErrorKind::Input, "target needs 1 to 3 coordinates");
  Vector y(static_cast<int>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) y[static_cast<int>(i)] = to_double(parts[i], "coordinate");
  return y;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dimension and pressure computations for expanding Markov maps"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--seed", seed, "Seed for Monte Carlo estimators");
  app.add_option("--threads", threads, "Worker threads (default: BOWENLAB_THREADS or all cores)");

  std::string model_path, family = "sub", out_path, s_text, grid_text, method = "spectral";
  int depth = 0;
  double eps = 0.01;
  auto* pressure = app.add_subcommand("pressure", "Topological pressure of the singular-value potentials");
  pressure->add_option("--model", model_path, "Model JSON")->required();
  pressure->add_option("--family", family, "sub (phi) or super (psi)")->check(CLI::IsMember({"sub", "super"}));
  auto* s_opt = pressure->add_option("--s", s_text, "Exponent s");
  auto* g_opt = pressure->add_option("--s-grid", grid_text, "Grid lo:hi:steps, written as CSV");
  s_opt->excludes(g_opt);
  pressure->add_option("--method", method, "spectral or separated")->check(CLI::IsMember({"spectral", "separated"}));
  pressure->add_option("--depth", depth, "Transfer depth m, or orbit length n for separated sets");
  pressure->add_option("--eps", eps, "Separation scale");
  pressure->add_option("--out", out_path, "CSV output path (grid only; default stdout)");

  double tol = 1e-10;
  auto* root = app.add_subcommand("root", "Zero of the pressure in s");
  root->add_option("--model", model_path, "Model JSON")->required();
  root->add_option("--family", family, "sub (alpha0) or super (s_star)")->check(CLI::IsMember({"sub", "super"}));
  root->add_option("--tol", tol, "Bracket width");

  std::string target, depths, theorem = "both";
  bool core_only = false;
  auto* avoid = app.add_subcommand("avoid", "Sub-repellers avoiding a target point");
  avoid->add_option("--model", model_path, "Model JSON")->required();
  avoid->add_option("--target", target, "Comma-separated coordinates")->required();
  avoid->add_option("--depths", depths, "Depth range lo:hi")->required();
  avoid->add_option("--theorem", theorem, "a, b or both")->check(CLI::IsMember({"a", "b", "both"}));
  avoid->add_option("--out", out_path, "CSV output path (default stdout)");
  avoid->add_flag("--core-only", core_only, "Forbid only the first cylinder containing the target");

  std::string measure = "parry";
  auto* lyap = app.add_subcommand("lyapunov", "Lyapunov spectrum");
  lyap->add_option("--model", model_path, "Model JSON")->required();
  lyap->add_option("--measure", measure, "parry or lebesgue")->check(CLI::IsMember({"parry", "lebesgue"}));
  lyap->add_option("--depth", depth, "Cocycle length");

  std::string forbid;
  auto* entropy = app.add_subcommand("entropy", "Topological entropy");
  entropy->add_option("--model", model_path, "Model JSON")->required();
  entropy->add_option("--forbid", forbid, "Words to forbid, e.g. 0.0,1.1.1");

  int max_depth = 12;
  auto* boxdim = app.add_subcommand("boxdim", "Box-counting dimension");
  boxdim->add_option("--model", model_path, "Model JSON")->required();
  boxdim->add_option("--max-depth", max_depth, "Number of grid scales");

  auto* selftest = app.add_subcommand("selftest", "Run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (threads != 0) kernels::set_thread_count(threads);
    if (*selftest) {
      bool ok = true;
      for (const auto& r : run_selftest()) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) out << "  (" << r.detail << ")";
        out << '\n';
        ok = ok && r.passed;
      }
      if (!ok) fail(ErrorKind::Consistency, "selftest failed");
      return 0;
    }

    const ModelSpec model = load_model(model_path);
    const Repeller rep(model);

    if (*pressure) {
      const Family fam = parse_family(family);
      const SpectralPressure sp(rep);
      auto evaluate = [&](Family f, double s) {
        if (method == "separated") return pressure_separated(rep, f, s, depth > 0 ? depth : 10, eps).value;
        if (depth == 1 || sp.mode() == SpectralPressure::Mode::Additive) return sp.value(f, s, std::max(1, depth));
        return pressure_limit(sp, f, s, depth > 0 ? depth : sp.default_depth()).value;
      };
      if (!grid_text.empty()) {
        Table t{{"s", "pressure_sub", "pressure_super"}, {}};
        for (double s : parse_grid(grid_text))
          t.rows.push_back({s, evaluate(Family::SubAdditivePhi, s), evaluate(Family::SuperAdditivePsi, s)});
        if (out_path.empty()) {
          write_csv(t, out);
        } else {
          write_csv(t, out_path);
        }
        return 0;
      }
      require(!s_text.empty(), ErrorKind::Input, "pressure needs --s or --s-grid");
      const double s = to_double(s_text, "s");
      out << "pressure = " << fixed9(evaluate(fam, s)) << '\n';
      return 0;
    }
    if (*root) {
      const Family fam = parse_family(family);
      const auto r = bowen_root(rep, fam, tol);
      const char* name = fam == Family::SubAdditivePhi ? "alpha0" : "s_star";
      out << name << " = " << fixed9(r.root) << '\n';
      if (r.degenerate) fail(ErrorKind::Degenerate, "zero topological entropy: the root is reported as 0");
      return 0;
    }
    if (*avoid) {
      const auto [lo, hi] = parse_range(depths);
      const TheoremSelect sel = theorem == "a" ? TheoremSelect::A : theorem == "b" ? TheoremSelect::B : TheoremSelect::Both;
      const auto series = avoid_series(rep, parse_point(target), lo, hi, sel,
                                       core_only ? AvoidConvention::CoreOnly : AvoidConvention::Closure, seed);
      const Table t = avoid_table(series, model.dimension());
      if (out_path.empty()) {
        write_csv(t, out);
      } else {
        write_csv(t, out_path);
      }
      for (const auto& v : series.violations) err << v << '\n';
      require_checks(series);
      return 0;
    }
    if (*lyap) {
      LyapunovSpectrum ls;
      if (measure == "lebesgue") {
        ls = lyapunov_lebesgue(model, depth > 0 ? depth : (model.locally_constant() ? 1 : 20), seed);
      } else {
        const Sft dom = dominant_component(rep.sft());
        const int dd = depth > 0 ? depth : (model.additive() ? 1 : (model.locally_constant() ? 16 : 20));
        ls = lyapunov_spectrum(Repeller(model, dom), parry_measure(dom), dd, seed);
      }
      for (std::size_t i = 0; i < ls.exponents.size(); ++i) {
        out << "lyap_" << i + 1 << " = " << fixed9(ls.exponents[i]);
        if (ls.monte_carlo) out << " +- " << format_number(ls.std_error[i]);
        out << '\n';
      }
      return 0;
    }
    if (*entropy) {
      Sft s = rep.sft();
      if (!forbid.empty()) {
        const auto words = parse_words(forbid);
        std::size_t n = 2;
        for (const auto& w : words) n = std::max(n, w.size());
        s = forbid_words(s, words, static_cast<int>(n));
      }
      out << "h_top = " << fixed9(topological_entropy(s)) << '\n';
      return 0;
    }
    if (*boxdim) {
      const auto b = box_dimension(rep, max_depth);
      out << "box_dim = " << fixed9(b.dimension) << '\n' << "residual = " << format_number(b.residual) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << error_kind_name(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace bowenlab
