#include "holointerp/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <unistd.h>

#include "holointerp/errors.hpp"
#include "json_util.hpp"

namespace holointerp {

using detail::json;

namespace {

// Reads one field, naming it in the diagnostic when its type is wrong.
template <class T>
T field(const json& doc, const char* name, T fallback) {
  if (!doc.contains(name)) return fallback;
  try {
    return doc.at(name).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + name + "' has the wrong type");
  }
}

std::vector<CPoint> points_from(const json& doc, const char* name) {
  if (!doc.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
  const json& arr = doc.at(name);
  if (!arr.is_array()) throw ParseError(std::string("field '") + name + "' must be an array of points");
  std::vector<CPoint> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    try {
      out.push_back(detail::point_from_json(arr[i]));
    } catch (const ParseError& e) {
      throw ParseError(std::string("field '") + name + "[" + std::to_string(i) + "]': " + e.what());
    }
  }
  return out;
}

json points_to(const std::vector<CPoint>& pts) {
  json out = json::array();
  for (const auto& z : pts) out.push_back(detail::point_to_json(z));
  return out;
}

VarietyModel variety_from(const json& v, std::size_t n) {
  if (!v.is_object()) throw ParseError("field 'variety' must be an object");
  const auto kind = field<std::string>(v, "kind", "");
  try {
    if (kind == "affine") {
      const CPoint base = v.contains("basepoint") ? detail::point_from_json(v.at("basepoint"))
                                                  : CPoint(CPoint::Zero(static_cast<Eigen::Index>(n)));
      std::vector<CPoint> basis;
      for (const auto& b : v.at("basis")) basis.push_back(detail::point_from_json(b));
      return VarietyModel::affine(base, basis);
    }
    if (kind == "graph") return VarietyModel::graph_curve(detail::complex_list_from_json(v.at("coefficients")), n);
  } catch (const json::exception& e) {
    throw ParseError(std::string("field 'variety': ") + e.what());
  } catch (const ParseError& e) {
    throw ParseError(std::string("field 'variety': ") + e.what());
  }
  throw ParseError("field 'variety.kind' must be \"affine\" or \"graph\"");
}

json variety_to(const VarietyModel& X) {
  if (X.kind() == VarietyModel::Kind::GraphCurve) {
    return {{"kind", "graph"}, {"coefficients", detail::complex_list_to_json(X.coefficients())}};
  }
  json basis = json::array();
  for (Eigen::Index c = 0; c < X.basis().cols(); ++c) basis.push_back(detail::point_to_json(X.basis().col(c)));
  return {{"kind", "affine"}, {"basepoint", detail::point_to_json(X.basepoint())}, {"basis", basis}};
}

json condition_to(const ConditionResult& c) {
  return {{"pass", c.pass}, {"value", c.value}, {"bound", c.bound}, {"samples", c.samples}, {"violations", c.violations}};
}

// One line per top-level key; nested values stay compact.
std::string dump_lines(const json& doc) {
  std::string out = "{\n";
  std::size_t i = 0;
  for (auto it = doc.begin(); it != doc.end(); ++it, ++i) {
    out += "  " + json(it.key()).dump() + ": " + it.value().dump() + (i + 1 < doc.size() ? ",\n" : "\n");
  }
  return out + "}\n";
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

// ---------------------------------------------------------------------------
// Problems

InterpolationProblem problem_from_json(const std::string& text) {
  const json doc = detail::parse_json(text);
  detail::require_version(doc);
  InterpolationProblem p;
  p.dimension = field<std::size_t>(doc, "dimension", 0);
  if (p.dimension < 1) throw ParseError("field 'dimension' is missing or zero");
  if (!doc.contains("variety")) throw ParseError("missing field 'variety'");
  p.variety = variety_from(doc.at("variety"), p.dimension);
  p.sources.points = points_from(doc, "sources");
  p.targets.points = points_from(doc, "targets");
  p.epsilon = field<double>(doc, "epsilon", p.epsilon);
  p.stages = field<std::size_t>(doc, "stages", p.stages);
  p.r1 = field<double>(doc, "r1", p.r1);
  p.r2 = field<double>(doc, "r2", p.r2);
  p.grid_density = field<double>(doc, "grid_density", p.grid_density);
  p.seed = field<std::uint64_t>(doc, "seed", p.seed);
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) throw ParseError("field 'tolerances' must be an object");
    p.tolerances.membership = field<double>(t, "membership", p.tolerances.membership);
    p.tolerances.match = field<double>(t, "match", p.tolerances.match);
    p.tolerances.duplicate = field<double>(t, "duplicate", p.tolerances.duplicate);
  }
  p.validate();
  return p;
}

std::string problem_to_json(const InterpolationProblem& p) {
  json doc = {{"format_version", 1},
              {"dimension", p.dimension},
              {"variety", variety_to(p.variety)},
              {"sources", points_to(p.sources.points)},
              {"targets", points_to(p.targets.points)},
              {"epsilon", p.epsilon},
              {"stages", p.stages},
              {"r1", p.r1},
              {"r2", p.r2},
              {"grid_density", p.grid_density},
              {"seed", p.seed},
              {"tolerances",
               {{"membership", p.tolerances.membership},
                {"match", p.tolerances.match},
                {"duplicate", p.tolerances.duplicate}}}};
  return dump_lines(doc);
}

InterpolationProblem load_problem(const std::string& path) { return problem_from_json(read_text(path)); }

SequenceSpec sequence_from_json(const std::string& text) {
  const json doc = detail::parse_json(text);
  detail::require_version(doc);
  SequenceSpec seq;
  seq.points = points_from(doc, "points");
  seq.min_separation = field<double>(doc, "min_separation", 0.0);
  return seq;
}

// ---------------------------------------------------------------------------
// Verification

bool VerificationReport::pass() const {
  if (!failure.empty()) return false;
  for (const auto& s : stages) {
    if (!s.pass()) return false;
  }
  return unmatched_inside == 0 && residual <= residual_tolerance;
}

VerificationReport verify(const AutWord& word, const InterpolationProblem& problem, const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto& P = problem;
  VerificationReport rep;
  rep.word_length = word.size();
  rep.seed = options.roundtrip_seed;
  rep.roundtrip_tolerance = static_cast<double>(std::max<std::size_t>(1, word.size())) * 1e-12;
  auto stop_clock = [&] {
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
  };
  if (word.dimension != P.dimension) {
    rep.failure = "word dimension differs from the problem";
    return stop_clock();
  }
  if (word.stages.size() != P.stages || word.schedule.size() != P.stages + 1) {
    rep.failure = "word has " + std::to_string(word.stages.size()) + " stages, problem asks for " +
                  std::to_string(P.stages);
    return stop_clock();
  }
  const double density = std::max(options.density, P.grid_density);
  try {
    rep.stages = evaluate_stages(P, word, density, options.offset);
  } catch (const Error& e) {
    rep.failure = e.what();
    return stop_clock();
  }

  const double final_radius = word.schedule[P.stages - 1];
  for (std::size_t j = 0; j < P.sources.size(); ++j) {
    double res = std::numeric_limits<double>::infinity();
    try {
      res = distance(eval(word, P.sources.points[j]), P.targets.points[j]);
    } catch (const Overflow&) {
    }
    if (res <= P.tolerances.match) {
      ++rep.matched;
      rep.residual = std::max(rep.residual, res);
    } else if (P.targets.points[j].norm() <= final_radius) {
      ++rep.unmatched_inside;
    }
  }

  // Inverse exactness on seeded points of the final ball.
  std::mt19937_64 rng(options.roundtrip_seed);
  const auto n = static_cast<Eigen::Index>(P.dimension);
  for (std::size_t i = 0; i < options.roundtrip_points;) {
    CPoint z(n);
    for (Eigen::Index k = 0; k < n; ++k) z[k] = Complex(2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1) * final_radius;
    if (z.norm() > final_radius) continue;
    ++i;
    ++rep.roundtrip_samples;
    try {
      rep.roundtrip = std::max(rep.roundtrip, distance(eval_inverse(word, eval(word, z)), z));
    } catch (const Overflow&) {
      ++rep.roundtrip_overflow;
    }
  }
  return stop_clock();
}

VerificationReport verify(const InterpolationResult& result, const InterpolationProblem& problem,
                          const VerifyOptions& options) {
  // Only the word is read; the engine's own stage records are ignored.
  return verify(result.word, problem, options);
}

std::string report_to_json(const VerificationReport& r) {
  json stages = json::array();
  for (const auto& s : r.stages) {
    stages.push_back({{"stage", s.stage},
                      {"radius", s.radius},
                      {"next_radius", s.next_radius},
                      {"word_length", s.word_length},
                      {"matched_count", s.matched_count},
                      {"level_discs", s.L.size()},
                      {"pass", s.pass()},
                      {"conditions",
                       {{"i", condition_to(s.cond_i)},
                        {"ii", condition_to(s.cond_ii)},
                        {"iii", condition_to(s.cond_iii)},
                        {"iv", condition_to(s.cond_iv)},
                        {"v", condition_to(s.cond_v)},
                        {"remark", condition_to(s.remark)}}}});
  }
  json doc = {{"format_version", 1},
              {"pass", r.pass()},
              {"stages", stages},
              {"final",
               {{"residual", r.residual},
                {"residual_tolerance", r.residual_tolerance},
                {"roundtrip", r.roundtrip},
                {"roundtrip_tolerance", r.roundtrip_tolerance},
                {"roundtrip_samples", r.roundtrip_samples},
                {"roundtrip_overflow", r.roundtrip_overflow},
                {"word_length", r.word_length},
                {"matched", r.matched},
                {"unmatched_inside", r.unmatched_inside},
                {"seed", r.seed},
                {"wall_seconds", r.wall_seconds}}}};
  if (!r.failure.empty()) doc["failure"] = r.failure;
  return dump_lines(doc);
}

std::string report_to_text(const VerificationReport& r) {
  std::ostringstream out;
  out.precision(3);
  out << (r.pass() ? "PASS" : "FAIL") << "\n";
  if (!r.failure.empty()) out << "  failure: " << r.failure << "\n";
  auto mark = [](const ConditionResult& c) { return c.pass ? "ok" : "FAIL"; };
  for (const auto& s : r.stages) {
    out << "stage " << s.stage << "  r=" << s.radius << "  letters=" << s.word_length << "  matched=" << s.matched_count
        << "  (i) " << mark(s.cond_i) << "  (ii) " << mark(s.cond_ii) << "  (iii) " << mark(s.cond_iii) << "  (iv) "
        << mark(s.cond_iv) << "  (v) " << mark(s.cond_v) << " " << s.cond_v.value << "/" << s.cond_v.bound
        << "  remark " << mark(s.remark) << "\n";
  }
  out << "residual " << r.residual << " (tol " << r.residual_tolerance << "), roundtrip " << r.roundtrip << " over "
      << r.roundtrip_samples - r.roundtrip_overflow << " of " << r.roundtrip_samples << " samples (tol "
      << r.roundtrip_tolerance << ", the rest overflow), matched " << r.matched << ", unmatched inside " << r.unmatched_inside
      << ", letters " << r.word_length << ", " << r.wall_seconds << " s\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Orbits

std::vector<OrbitCell> export_orbit(const std::vector<AutWord>& words, const std::vector<double>& schedule,
                                    const OrbitWindow& window, double resolution) {
  if (!(resolution > 0.0)) throw ValidationError("resolution", "must be positive");
  if (!(window.re_max > window.re_min && window.im_max > window.im_min)) {
    throw ValidationError("window", "must have positive width and height");
  }
  const std::size_t n = words.empty() ? std::max<std::size_t>(window.base.size(), 2) : words.front().dimension;
  CPoint z = window.base.size() == 0 ? CPoint(CPoint::Zero(static_cast<Eigen::Index>(n))) : window.base;
  if (static_cast<std::size_t>(z.size()) != n || window.coordinate >= n) {
    throw ValidationError("window", "coordinate or base point does not fit the dimension");
  }
  auto count = [&](double lo, double hi) { return static_cast<std::size_t>(std::floor((hi - lo) / resolution + 1e-9)) + 1; };
  const std::size_t nre = count(window.re_min, window.re_max);
  const std::size_t nim = count(window.im_min, window.im_max);
  std::vector<OrbitCell> cells;
  cells.reserve(nre * nim);
  for (std::size_t i = 0; i < nim; ++i) {
    const double im = window.im_min + static_cast<double>(i) * resolution;
    for (std::size_t k = 0; k < nre; ++k) {
      const double re = window.re_min + static_cast<double>(k) * resolution;
      z[static_cast<Eigen::Index>(window.coordinate)] = Complex(re, im);
      const Membership m = fb_membership(words, schedule, z);
      cells.push_back({re, im, m.inside ? 0 : m.stage});
    }
  }
  return cells;
}

std::string orbit_to_csv(const std::vector<OrbitCell>& cells) {
  // Shortest decimal that reads back to the same double.
  auto num = [](double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
  };
  std::string out = "re,im,escape_stage\n";
  for (const auto& c : cells) out += num(c.re) + "," + num(c.im) + "," + std::to_string(c.escape_stage) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Files

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << content;
    if (!out.flush()) throw Error("cannot write " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move " + tmp + " to " + path);
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace holointerp
