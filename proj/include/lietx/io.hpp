#pragma once

// JSON and CSV serialization of sequences, map specifications and results.
//
// Sequence document:
//   {"dim": n, "angles": a, "order": N,
//    "terms": [{"order": s, "component": j, "mode": [k...], "exponents": [p...], "re": x, "im": y}]}
// Components are 1-based. "mode" holds Fourier indices (only when a > 0) and
// "exponents" the polynomial exponents. Exact coefficients are "p/q" strings.

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lietx/normalform.hpp"

namespace lietx {

using json = nlohmann::ordered_json;

/// Malformed or incompatible input documents.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace io {

inline mpq_class rational_from_json(const json& v) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return mpq_class(v.get<long>());
    if (v.is_number()) return parse_rational(v.dump());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  throw InputError("expected a number or a \"p/q\" string, got " + v.dump());
}

inline double double_from_json(const json& v) {
  if (v.is_number()) return v.get<double>();
  return rational_from_json(v).get_d();
}

template <class C>
C coefficient_from_json(const json& t) {
  const json zero = 0;
  const json& re = t.contains("re") ? t.at("re") : zero;
  const json& im = t.contains("im") ? t.at("im") : zero;
  if constexpr (is_exact_v<C>) {
    return C(rational_from_json(re), rational_from_json(im));
  } else {
    return C(double_from_json(re), double_from_json(im));
  }
}

/// Complex value given as {"re", "im"} or a bare number.
template <class C>
C value_from_json(const json& v) {
  if (v.is_object()) return coefficient_from_json<C>(v);
  if constexpr (is_exact_v<C>) {
    return C(rational_from_json(v));
  } else {
    return C(double_from_json(v), 0.0);
  }
}

template <class C>
void coefficient_to_json(json& t, const C& c) {
  if constexpr (is_exact_v<C>) {
    t["re"] = c.real().get_str();
    t["im"] = c.imag().get_str();
  } else {
    t["re"] = c.real();
    t["im"] = c.imag();
  }
}

inline std::vector<int> int_list(const json& t, const char* key) {
  if (!t.contains(key)) return {};
  const json& v = t.at(key);
  if (!v.is_array()) throw InputError(std::string("'") + key + "' must be an array");
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw InputError(std::string("'") + key + "' entries must be integers");
    out.push_back(x.get<int>());
  }
  return out;
}

inline int get_int(const json& doc, const char* key, int fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_number_integer()) throw InputError(std::string("'") + key + "' must be an integer");
  return doc.at(key).get<int>();
}

inline int require_int(const json& doc, const char* key) {
  if (!doc.contains(key)) throw InputError(std::string("missing '") + key + "'");
  return get_int(doc, key, 0);
}

/// Exponent from "mode" (angles) and "exponents" (polynomial variables).
inline Exponent term_exponent(const json& t, Layout layout) {
  std::vector<int> mode = int_list(t, "mode");
  std::vector<int> ex = int_list(t, "exponents");
  if (mode.empty()) mode.assign(static_cast<size_t>(layout.angles), 0);
  if (ex.empty()) ex.assign(static_cast<size_t>(layout.vars), 0);
  if (static_cast<int>(mode.size()) != layout.angles)
    throw InputError("term 'mode' has " + std::to_string(mode.size()) + " entries, expected " +
                     std::to_string(layout.angles));
  if (static_cast<int>(ex.size()) != layout.vars)
    throw InputError("term 'exponents' has " + std::to_string(ex.size()) + " entries, expected " +
                     std::to_string(layout.vars));
  Exponent e;
  try {
    for (int j = 0; j < layout.angles; ++j) e.set(j, mode[j]);
    for (int j = 0; j < layout.vars; ++j) {
      if (ex[j] < 0) throw InputError("negative polynomial exponent");
      e.set(layout.angles + j, ex[j]);
    }
  } catch (const std::out_of_range& err) {
    throw InputError(err.what());
  }
  return e;
}

template <class C>
void add_term(Graded<Field<C>>& g, const json& t, Layout layout, bool need_order) {
  if (!t.is_object()) throw InputError("terms must be objects");
  const int s = need_order ? require_int(t, "order") : get_int(t, "order", 0);
  const int j = require_int(t, "component");
  if (s < 0 || s > g.max_order()) throw InputError("term order " + std::to_string(s) + " out of range");
  if (j < 1 || j > layout.size()) throw InputError("component " + std::to_string(j) + " out of range");
  g[s][j - 1].add(term_exponent(t, layout), coefficient_from_json<C>(t));
}

template <class C>
json terms_to_json(const Graded<Field<C>>& g) {
  json terms = json::array();
  const Layout layout = g.layout();
  for (int s = 0; s <= g.max_order(); ++s) {
    for (int j = 0; j < layout.size(); ++j) {
      for (const auto& [e, c] : g[s][j].terms()) {
        json t;
        t["order"] = s;
        t["component"] = j + 1;
        if (layout.angles > 0) t["mode"] = lanes(e, 0, layout.angles);
        t["exponents"] = lanes(e, layout.angles, layout.size());
        coefficient_to_json(t, c);
        terms.push_back(std::move(t));
      }
    }
  }
  return terms;
}

}  // namespace io

template <class C>
json sequence_to_json(const Graded<Field<C>>& g) {
  json doc;
  doc["dim"] = g.layout().size();
  doc["angles"] = g.layout().angles;
  doc["order"] = g.max_order();
  doc["terms"] = io::terms_to_json(g);
  return doc;
}

template <class C>
Graded<Field<C>> sequence_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("sequence document must be an object");
  const int dim = io::require_int(doc, "dim");
  const int angles = io::get_int(doc, "angles", 0);
  const int N = io::require_int(doc, "order");
  if (dim < 1 || angles < 0 || angles > dim || dim > Exponent::kMaxLanes) throw InputError("bad dimensions");
  if (N < 0) throw InputError("bad order");
  const Layout layout{angles, dim - angles};
  Graded<Field<C>> g(N, Field<C>(layout));
  if (doc.contains("terms")) {
    if (!doc.at("terms").is_array()) throw InputError("'terms' must be an array");
    for (const auto& t : doc.at("terms")) io::add_term(g, t, layout, true);
  }
  return g;
}

/// Map specification: see README for the schema.
template <class C>
MapSpec<C> map_spec_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("map specification must be an object");
  if (!doc.contains("kind") || !doc.at("kind").is_string()) throw InputError("missing 'kind'");
  const std::string kind = doc.at("kind").get<std::string>();
  const int N = io::get_int(doc, "order", 1);
  if (N < 1) throw InputError("'order' must be >= 1");
  MapSpec<C> spec;
  spec.order = N;
  spec.fourier_cutoff = io::get_int(doc, "fourier_cutoff", 0);
  if (spec.fourier_cutoff < 0) throw InputError("'fourier_cutoff' must be >= 0");
  if (doc.contains("epsilon")) spec.epsilon = io::double_from_json(doc.at("epsilon"));
  if (doc.contains("form")) {
    const std::string form = doc.at("form").is_string() ? doc.at("form").get<std::string>() : "";
    if (form == "map")
      spec.form = MapForm::explicit_map;
    else if (form == "lie_transform")
      spec.form = MapForm::lie_transform;
    else
      throw InputError("'form' must be \"map\" or \"lie_transform\"");
  }

  if (kind == "linear") {
    if (!doc.contains("eigenvalues") || !doc.at("eigenvalues").is_array() || doc.at("eigenvalues").empty())
      throw InputError("linear map needs a nonempty 'eigenvalues' array");
    std::vector<C> eig;
    for (const auto& v : doc.at("eigenvalues")) eig.push_back(io::value_from_json<C>(v));
    if (static_cast<int>(eig.size()) > Exponent::kMaxLanes) throw InputError("too many variables");
    try {
      spec.unperturbed = LinearPart<C>::make(std::move(eig), io::int_list(doc, "log_branch"));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  } else if (kind == "kronecker") {
    const int n = io::require_int(doc, "angles");
    const int m = io::get_int(doc, "actions", 0);
    if (n < 1 || m < 0 || n + m > Exponent::kMaxLanes) throw InputError("bad angle/action counts");
    const Layout layout{n, m};
    std::vector<double> omega;
    if (doc.contains("omega")) {
      if (!doc.at("omega").is_array()) throw InputError("'omega' must be an array");
      for (const auto& v : doc.at("omega")) omega.push_back(io::double_from_json(v));
    }
    std::vector<C> phase;
    if (doc.contains("phase")) {
      if (!doc.at("phase").is_array()) throw InputError("'phase' must be an array");
      for (const auto& v : doc.at("phase")) phase.push_back(io::value_from_json<C>(v));
      if (omega.empty())
        for (const auto& p : phase) omega.push_back(std::arg(to_complex(p)));
    } else {
      for (double w : omega) phase.push_back(from_complex<C>(std::exp(Complex(0.0, w))));
    }
    if (static_cast<int>(omega.size()) != n || static_cast<int>(phase.size()) != n)
      throw InputError("need one frequency ('omega' or 'phase') per angle");
    for (const auto& p : phase)
      if (std::abs(std::abs(to_complex(p)) - 1.0) > 1e-12) throw InputError("'phase' entries must have modulus 1");
    std::vector<Series<C>> domega(static_cast<size_t>(n), Series<C>(layout));
    if (doc.contains("omega_action")) {
      if (!doc.at("omega_action").is_array()) throw InputError("'omega_action' must be an array");
      Graded<Field<C>> tmp(0, Field<C>(layout));
      for (const auto& t : doc.at("omega_action")) io::add_term(tmp, t, layout, false);
      for (int j = 0; j < n; ++j) domega[j] = tmp[0][j];
      for (int j = n; j < n + m; ++j)
        if (!tmp[0][j].empty()) throw InputError("'omega_action' components must be angle components");
    }
    try {
      spec.unperturbed = KroneckerPart<C>::make(n, m, std::move(phase), std::move(omega), std::move(domega),
                                                io::get_int(doc, "action_degree", 8));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  } else {
    throw InputError("unknown map kind '" + kind + "'");
  }

  const Layout layout = spec.layout();
  int top = N;
  if (doc.contains("perturbation")) {
    if (!doc.at("perturbation").is_array()) throw InputError("'perturbation' must be an array");
    for (const auto& t : doc.at("perturbation")) top = std::max(top, io::get_int(t, "order", 0));
  }
  spec.perturbation = Graded<Field<C>>(top, Field<C>(layout));
  if (doc.contains("perturbation"))
    for (const auto& t : doc.at("perturbation")) io::add_term(spec.perturbation, t, layout, true);
  spec.perturbation = spec.perturbation.resized(N);
  return spec;
}

inline json truncation_to_json(const TruncationReport& r) {
  json t;
  t["fourier_dropped"] = r.fourier_dropped;
  t["degree_dropped"] = r.degree_dropped;
  t["warnings"] = r.warnings;
  return t;
}

inline json diagnostics_to_json(const Diagnostics& d) {
  json j;
  if (std::isfinite(d.min_divisor))
    j["min_divisor"] = d.min_divisor;
  else
    j["min_divisor"] = nullptr;
  if (d.box_max_mode > 0 && std::isfinite(d.box_min_divisor)) {
    j["box_min_divisor"] = d.box_min_divisor;
    j["box_max_mode"] = d.box_max_mode;
  }
  json modes = json::array();
  for (const auto& m : d.resonant_modes) {
    json e;
    e["order"] = m.order;
    e["component"] = m.component < 0 ? json(nullptr) : json(m.component + 1);
    e["exponents"] = m.exponent;
    e["divisor"] = {{"re", m.divisor.real()}, {"im", m.divisor.imag()}};
    modes.push_back(std::move(e));
  }
  j["resonant_modes"] = std::move(modes);
  j["warnings"] = d.warnings;
  j["truncation"] = truncation_to_json(d.truncation);
  return j;
}

template <class C>
constexpr const char* mode_name() {
  return is_exact_v<C> ? "exact" : "float";
}

template <class C>
json representation_to_json(const Factorization<C>& f, int order) {
  json doc;
  doc["type"] = "representation";
  doc["mode"] = mode_name<C>();
  doc["order"] = order;
  doc["V"] = sequence_to_json(f.V);
  doc["W"] = sequence_to_json(f.W);
  doc["truncation"] = truncation_to_json(f.report);
  return doc;
}

template <class C>
json normal_form_to_json(const NormalFormResult<C>& r) {
  json doc;
  doc["type"] = "normal_form";
  doc["mode"] = mode_name<C>();
  doc["driver"] = to_string(r.driver);
  doc["order"] = r.order;
  doc["X"] = sequence_to_json(r.X);
  doc["Z"] = sequence_to_json(r.Z);
  doc["W"] = sequence_to_json(r.W);
  doc["diagnostics"] = diagnostics_to_json(r.diagnostics);
  return doc;
}

template <class C>
json composition_to_json(const GeneratingSequence<C>& X, const GeneratingSequence<C>& Y,
                         const GeneratingSequence<C>& Z) {
  json doc;
  doc["type"] = "composition";
  doc["mode"] = mode_name<C>();
  doc["order"] = Z.max_order();
  doc["X"] = sequence_to_json(X);
  doc["Y"] = sequence_to_json(Y);
  doc["Z"] = sequence_to_json(Z);
  return doc;
}

inline const json& require_member(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw InputError(std::string("result document lacks '") + key + "'");
  return doc.at(key);
}

template <class C>
NormalFormResult<C> normal_form_from_json(const json& doc) {
  NormalFormResult<C> r;
  const std::string driver = require_member(doc, "driver").get<std::string>();
  if (driver == "transform")
    r.driver = Driver::transform;
  else if (driver == "series")
    r.driver = Driver::series;
  else
    throw InputError("unknown driver '" + driver + "'");
  r.order = io::require_int(doc, "order");
  r.X = sequence_from_json<C>(require_member(doc, "X"));
  r.Z = sequence_from_json<C>(require_member(doc, "Z"));
  r.W = sequence_from_json<C>(require_member(doc, "W"));
  if (r.X.max_order() < r.order || r.Z.max_order() < r.order || r.W.max_order() < r.order)
    throw InputError("result sequences are shorter than the declared order");
  return r;
}

/// Flat CSV: series,order,component,mode,exponents,re,im (lists space separated).
template <class C>
void sequence_to_csv(std::ostream& os, const std::string& name, const Graded<Field<C>>& g) {
  const Layout layout = g.layout();
  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
  };
  for (int s = 0; s <= g.max_order(); ++s)
    for (int j = 0; j < layout.size(); ++j)
      for (const auto& [e, c] : g[s][j].terms()) {
        os << name << ',' << s << ',' << j + 1 << ',' << join(lanes(e, 0, layout.angles)) << ','
           << join(lanes(e, layout.angles, layout.size())) << ',';
        if constexpr (is_exact_v<C>) {
          os << c.real().get_str() << ',' << c.imag().get_str() << '\n';
        } else {
          json re = c.real();
          json im = c.imag();
          os << re.dump() << ',' << im.dump() << '\n';
        }
      }
}

inline const char* csv_header() { return "series,order,component,mode,exponents,re,im\n"; }

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

}  // namespace lietx
