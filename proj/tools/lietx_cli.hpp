#pragma once

// lietx command line front end. Exit codes: 0 ok, 2 input error, 3 grading
// violation, 4 resonance or unsupported case, 5 verification failure.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lietx/lietx.hpp"

namespace lietx::cli {

enum Exit : int { ok = 0, input_error = 2, grading_error = 3, unsupported = 4, verify_failed = 5 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string result;  // verify only
  std::optional<int> order;
  std::optional<int> cutoff;
  std::string mode = "float";
  std::string driver = "transform";
  bool reversible = false;
  double tol_resonance = 1e-10;
  double divisor_floor = 1e-6;
  double tolerance = 1e-10;
  std::string out;
  std::string format = "json";
  uint64_t seed = 1;
  double radius = 0.05;
  int samples = 64;
  std::string point;
  int steps = 10;
};

namespace detail {

/// Writes next to the target and renames, so a failed run leaves no partial file.
inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  const std::filesystem::path target(cfg.out);
  std::filesystem::path tmp = target;
  tmp += ".part";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write '" + tmp.string() + "'");
    f << text;
    f.flush();
    if (!f) {
      f.close();
      std::filesystem::remove(tmp);
      throw InputError("write to '" + tmp.string() + "' failed");
    }
  }
  std::filesystem::rename(tmp, target);
}

inline std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

template <class C>
MapSpec<C> load_spec(const RunConfig& cfg) {
  MapSpec<C> spec = map_spec_from_json<C>(read_json_file(cfg.input));
  if (cfg.order) {
    if (*cfg.order < 1) throw InputError("--order must be >= 1");
    spec.order = *cfg.order;
    spec.perturbation = spec.perturbation.resized(spec.order);
  }
  if (cfg.cutoff) {
    if (*cfg.cutoff < 0) throw InputError("--cutoff must be >= 0");
    spec.fourier_cutoff = *cfg.cutoff;
  }
  validate(spec);
  return spec;
}

inline SolverOptions solver_options(const RunConfig& cfg) {
  if (!(cfg.tol_resonance > 0) || !(cfg.divisor_floor > 0)) throw InputError("tolerances must be positive");
  return SolverOptions{cfg.tol_resonance, cfg.divisor_floor};
}

template <class C>
std::string sequences_csv(const std::vector<std::pair<std::string, const GeneratingSequence<C>*>>& seqs) {
  std::ostringstream os;
  os << csv_header();
  for (const auto& [name, g] : seqs) sequence_to_csv(os, name, *g);
  return os.str();
}

template <class C>
int cmd_represent(const RunConfig& cfg, std::ostream& out) {
  const MapSpec<C> spec = load_spec<C>(cfg);
  const Factorization<C> f = factor_map(spec);
  if (cfg.format == "csv")
    emit(cfg, sequences_csv<C>({{"V", &f.V}, {"W", &f.W}}), out);
  else
    emit(cfg, dump(representation_to_json(f, spec.order)), out);
  return ok;
}

template <class C>
int cmd_compose(const RunConfig& cfg, std::ostream& out) {
  const json doc = read_json_file(cfg.input);
  const auto X = sequence_from_json<C>(require_member(doc, "X"));
  const auto Y = sequence_from_json<C>(require_member(doc, "Y"));
  require_same(X.layout(), Y.layout(), "compose");
  int N = std::min(X.max_order(), Y.max_order());
  if (cfg.order) N = *cfg.order;
  if (N < 1) throw InputError("composition order must be >= 1");
  const auto Xn = X.resized(N);
  const auto Yn = Y.resized(N);
  const auto Z = compose_transforms(Xn, Yn, N);
  if (cfg.format == "csv")
    emit(cfg, sequences_csv<C>({{"X", &Xn}, {"Y", &Yn}, {"Z", &Z}}), out);
  else
    emit(cfg, dump(composition_to_json(Xn, Yn, Z)), out);
  return ok;
}

template <class C>
int cmd_normalize(const RunConfig& cfg, std::ostream& out) {
  const MapSpec<C> spec = load_spec<C>(cfg);
  const SolverOptions opt = solver_options(cfg);
  NormalFormResult<C> r;
  if (cfg.reversible) {
    if (cfg.driver != "transform") throw InputError("--reversible uses the transform driver");
    r = normalize_reversible(spec, opt).result;
  } else {
    r = normalize(spec, cfg.driver == "series" ? Driver::series : Driver::transform, opt);
  }
  if (cfg.format == "csv")
    emit(cfg, sequences_csv<C>({{"X", &r.X}, {"Z", &r.Z}, {"W", &r.W}}), out);
  else
    emit(cfg, dump(normal_form_to_json(r)), out);
  return ok;
}

/// First order whose defect exceeds tol, or -1.
inline int first_failure(const std::vector<double>& d, double tol) {
  for (size_t s = 0; s < d.size(); ++s)
    if (!(d[s] <= tol)) return static_cast<int>(s);
  return -1;
}

template <class C>
double scale_of(const GeneratingSequence<C>& g) {
  double m = 0.0;
  for (const auto& f : g) m = std::max(m, f.max_abs());
  return m;
}

inline json residual_json(const ResidualReport& r) {
  return json{{"radius", r.radius}, {"max_residual", r.max_residual}, {"mean_residual", r.mean_residual},
              {"order", r.order}};
}

template <class C>
int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  MapSpec<C> spec = load_spec<C>(cfg);
  const json res = read_json_file(cfg.result);
  const std::string type = require_member(res, "type").get<std::string>();
  const std::string mode = require_member(res, "mode").get<std::string>();
  if (mode != mode_name<C>()) throw InputError("result was produced in " + mode + " mode");

  json rep;
  rep["type"] = "verification";
  rep["mode"] = mode_name<C>();
  rep["result_type"] = type;
  int failed = -1;
  std::string failed_what;

  if (type == "representation") {
    const int N = io::require_int(res, "order");
    spec.order = N;
    spec.perturbation = spec.perturbation.resized(N);
    const auto V = sequence_from_json<C>(require_member(res, "V"));
    const auto W = sequence_from_json<C>(require_member(res, "W"));
    if (V.max_order() < N || W.max_order() < N) throw InputError("result sequences are shorter than the order");
    require_same(V.layout(), spec.layout(), "verify");
    const double tol = is_exact_v<C> ? 0.0 : cfg.tolerance * std::max({1.0, scale_of(V), scale_of(W)});
    const auto d = factorization_defects(spec, V.resized(N), W.resized(N));
    rep["tolerance"] = tol;
    rep["reconstruction_defects"] = d;
    failed = first_failure(d, tol);
    failed_what = "reconstruction";
  } else if (type == "normal_form") {
    NormalFormResult<C> r = normal_form_from_json<C>(res);
    require_same(r.X.layout(), spec.layout(), "verify");
    const int N = r.order;
    spec.order = N;
    spec.perturbation = spec.perturbation.resized(N);
    r.X = r.X.resized(N);
    r.Z = r.Z.resized(N);
    const auto W = factor_map(spec).W;
    const double tol =
        is_exact_v<C> ? 0.0 : cfg.tolerance * std::max({1.0, scale_of(r.X), scale_of(r.Z), scale_of(W)});
    rep["tolerance"] = tol;
    const auto wd = order_differences(r.W.resized(N), W);
    rep["W_defects"] = wd;
    r.W = W;
    const auto d = conjugacy_defects(spec, r);
    rep["conjugacy_defects"] = d;
    failed = first_failure(wd, tol);
    failed_what = "W";
    if (failed < 0) {
      failed = first_failure(d, tol);
      failed_what = "conjugacy";
    }
    if constexpr (!is_exact_v<C>) {
      if (!(cfg.radius > 0)) throw InputError("--radius must be positive");
      if (cfg.samples < 1) throw InputError("--samples must be >= 1");
      const auto a = conjugacy_residual(spec, r, cfg.radius, cfg.samples, cfg.seed);
      const auto b = conjugacy_residual(spec, r, cfg.radius / 2, cfg.samples, cfg.seed);
      rep["residual"] = residual_json(a);
      rep["residual_half_radius"] = residual_json(b);
      rep["residual_ratio"] = b.max_residual > 0 ? json(a.max_residual / b.max_residual) : json(nullptr);
      rep["seed"] = cfg.seed;
    }
  } else {
    throw InputError("cannot verify a result of type '" + type + "'");
  }

  rep["pass"] = failed < 0;
  rep["failed_order"] = failed < 0 ? json(nullptr) : json(failed);
  if (failed >= 0) rep["failed_check"] = failed_what;
  emit(cfg, dump(rep), out);
  return failed < 0 ? ok : verify_failed;
}

/// "0.1,0.2-0.3i,2i" -> complex coordinates.
inline std::vector<Complex> parse_point(const std::string& text) {
  std::vector<Complex> p;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw InputError("bad number '" + s + "' in --point");
    }
    if (used != s.size()) throw InputError("bad number '" + s + "' in --point");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    std::erase(item, ' ');
    if (item.empty()) throw InputError("empty coordinate in --point");
    if (item.back() != 'i') {
      p.emplace_back(number(item), 0.0);
      continue;
    }
    item.pop_back();
    size_t split = std::string::npos;
    for (size_t i = item.size(); i-- > 1;)
      if ((item[i] == '+' || item[i] == '-') && item[i - 1] != 'e' && item[i - 1] != 'E') {
        split = i;
        break;
      }
    auto imag = [&](std::string s) {
      if (s.empty() || s == "+") return 1.0;
      if (s == "-") return -1.0;
      return number(s);
    };
    if (split == std::string::npos)
      p.emplace_back(0.0, imag(item));
    else
      p.emplace_back(number(item.substr(0, split)), imag(item.substr(split)));
  }
  return p;
}

inline int cmd_iterate(const RunConfig& cfg, std::ostream& out) {
  const MapSpec<Complex> spec = load_spec<Complex>(cfg);
  if (cfg.steps < 0) throw InputError("--steps must be >= 0");
  const auto point = parse_point(cfg.point);
  if (static_cast<int>(point.size()) != spec.layout().size())
    throw InputError("--point needs " + std::to_string(spec.layout().size()) + " coordinates");
  const Trajectory t = iterate_numeric(spec, point, cfg.steps);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "step,component,re,im\n";
    for (size_t i = 0; i < t.points.size(); ++i)
      for (size_t j = 0; j < t.points[i].size(); ++j)
        os << i << ',' << j + 1 << ',' << json(t.points[i][j].real()).dump() << ','
           << json(t.points[i][j].imag()).dump() << '\n';
    emit(cfg, os.str(), out);
  } else {
    json doc;
    doc["type"] = "trajectory";
    doc["steps"] = static_cast<int>(t.points.size()) - 1;
    doc["diverged"] = t.diverged;
    json pts = json::array();
    for (const auto& p : t.points) {
      json row = json::array();
      for (const auto& z : p) row.push_back(json{{"re", z.real()}, {"im", z.imag()}});
      pts.push_back(std::move(row));
    }
    doc["points"] = std::move(pts);
    emit(cfg, dump(doc), out);
  }
  return ok;
}

template <class C>
int dispatch(const RunConfig& cfg, std::ostream& out) {
  if (cfg.command == "represent") return cmd_represent<C>(cfg, out);
  if (cfg.command == "compose") return cmd_compose<C>(cfg, out);
  if (cfg.command == "normalize") return cmd_normalize<C>(cfg, out);
  if (cfg.command == "verify") return cmd_verify<C>(cfg, out);
  return cmd_iterate(cfg, out);
}

}  // namespace detail

inline int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.mode == "exact") {
      if (cfg.command == "iterate") throw InputError("iterate runs in float mode only");
      return detail::dispatch<ExactComplex>(cfg, out);
    }
    return detail::dispatch<Complex>(cfg, out);
  } catch (const GradingError& e) {
    err << "grading error: " << e.what() << '\n';
    return grading_error;
  } catch (const ResonanceError& e) {
    err << "resonance: " << e.what() << '\n';
    return unsupported;
  } catch (const SymmetryError& e) {
    err << "symmetry: " << e.what() << '\n';
    return unsupported;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return input_error;
  } catch (const DimensionError& e) {
    err << "input error: " << e.what() << '\n';
    return input_error;
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << '\n';
    return input_error;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return input_error;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return input_error;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"lietx: Lie series, Lie transforms and normal forms of maps"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&cfg](CLI::App* c, bool solver) {
    c->add_option("--order", cfg.order, "Truncation order N (overrides the map file)");
    c->add_option("--cutoff", cfg.cutoff, "Order-1 Fourier cutoff K1 (overrides the map file)");
    c->add_option("--mode", cfg.mode, "Arithmetic")->check(CLI::IsMember({"float", "exact"}));
    c->add_option("--out", cfg.out, "Output file (default stdout)");
    c->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--seed", cfg.seed, "Random seed for sampling");
    if (solver) {
      c->add_option("--tol-resonance", cfg.tol_resonance, "Float mode: |divisor| below this is resonant");
      c->add_option("--divisor-floor", cfg.divisor_floor, "Float mode: |divisor| below this is near-resonant");
    }
  };

  auto* rep = app.add_subcommand("represent", "Factor a map as R o T_V and T_W o R");
  rep->add_option("spec", cfg.input, "Map specification (JSON)")->required();
  common(rep, false);

  auto* comp = app.add_subcommand("compose", "Compose two Lie transforms: T_Z = T_X o T_Y");
  comp->add_option("input", cfg.input, "JSON document with sequences X and Y")->required();
  common(comp, false);

  auto* norm = app.add_subcommand("normalize", "Compute the normal form of a map");
  norm->add_option("spec", cfg.input, "Map specification (JSON)")->required();
  norm->add_option("--driver", cfg.driver, "Normalization driver")->check(CLI::IsMember({"transform", "series"}));
  norm->add_flag("--reversible", cfg.reversible, "Assert the reversible symmetry calculus at every order");
  common(norm, true);

  auto* ver = app.add_subcommand("verify", "Check a representation or normal form against the map file");
  ver->add_option("spec", cfg.input, "Map specification (JSON)")->required();
  ver->add_option("result", cfg.result, "Output of represent or normalize")->required();
  ver->add_option("--tol", cfg.tolerance, "Float mode: relative coefficient tolerance");
  ver->add_option("--radius", cfg.radius, "Float mode: residual sampling radius");
  ver->add_option("--samples", cfg.samples, "Float mode: residual sample count");
  common(ver, false);

  auto* it = app.add_subcommand("iterate", "Iterate the map numerically");
  it->add_option("spec", cfg.input, "Map specification (JSON)")->required();
  it->add_option("--point", cfg.point, "Initial point, comma separated (a, a+bi, bi)")->required();
  it->add_option("--steps", cfg.steps, "Number of steps");
  common(it, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return execute(cfg, out, err);
}

}  // namespace lietx::cli
