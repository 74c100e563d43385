#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "holointerp/errors.hpp"
#include "holointerp/harness.hpp"
#include "json.hpp"

using namespace holointerp;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "holointerp_test_harness";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = (scratch_dir() / name).string();
  std::ofstream(path) << text;
  return path;
}

nlohmann::json problem_doc(const InterpolationProblem& p) { return nlohmann::json::parse(problem_to_json(p)); }

// Escape stage by stepping the orbit directly.
std::size_t oracle_escape(const std::vector<AutWord>& words, const std::vector<double>& radii, CPoint z) {
  std::size_t last = 0;
  for (std::size_t k = 0; k < words.size(); ++k) {
    bool blown = false;
    for (const auto& letter : words[k].letters) {
      z = letter.apply(z);
      if (!(z.cwiseAbs().maxCoeff() <= 1e100)) {
        blown = true;
        break;
      }
    }
    if (blown) break;
    if (z.norm() <= radii[k]) last = k + 1;
  }
  return last == words.size() ? 0 : last + 1;
}

InterpolationProblem identity_problem() {
  InterpolationProblem p;
  p.variety = VarietyModel::first_axis(2);
  for (int j = 1; j <= 3; ++j) {
    p.sources.points.push_back(make_point({double(j), 0.0}));
    p.targets.points.push_back(make_point({double(j), 0.0}));
  }
  p.stages = 3;
  return p;
}

}  // namespace

TEST_CASE("problem file round trip") {
  const auto p = seeded_instance(7, 8);
  const auto q = load_problem(write_file("seeded.json", problem_to_json(p)));
  REQUIRE(q.sources.size() == 8);
  CHECK(q.targets.points == p.targets.points);
  CHECK(q.sources.points == p.sources.points);
  CHECK(q.epsilon == p.epsilon);
  CHECK(q.stages == p.stages);
  CHECK(q.seed == 7);
  CHECK(q.variety.distance(make_point({5.0, 0.0})) == 0.0);
  CHECK(problem_doc(q)["format_version"] == 1);
}

TEST_CASE("epsilon outside (0,1) is rejected by field") {
  auto doc = problem_doc(seeded_instance(7, 3));
  doc["epsilon"] = 1.5;
  try {
    problem_from_json(doc.dump());
    FAIL("accepted epsilon 1.5");
  } catch (const ValidationError& e) {
    CHECK(e.field == "epsilon");
    CHECK(e.reason == "must lie in (0,1)");
  }
}

TEST_CASE("source off the variety is rejected") {
  auto doc = problem_doc(seeded_instance(7, 3));
  doc["sources"][1][1] = {0.0, 1e-3};
  try {
    problem_from_json(doc.dump());
    FAIL("accepted a source off X");
  } catch (const ValidationError& e) {
    CHECK(e.field == "sources");
  }
}

TEST_CASE("malformed problem files raise parse errors") {
  CHECK_THROWS_AS(problem_from_json("{\"format_version\": 1,"), ParseError);
  auto doc = problem_doc(seeded_instance(7, 3));
  doc.erase("format_version");
  CHECK_THROWS_AS(problem_from_json(doc.dump()), ParseError);

  doc = problem_doc(seeded_instance(7, 3));
  doc["stages"] = "six";
  try {
    problem_from_json(doc.dump());
    FAIL("accepted a string for stages");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("stages") != std::string::npos);
  }

  doc = problem_doc(seeded_instance(7, 3));
  doc["targets"][0] = "far";
  CHECK_THROWS_AS(problem_from_json(doc.dump()), ParseError);
  CHECK_THROWS_AS(load_problem((scratch_dir() / "missing.json").string()), ParseError);
}

TEST_CASE("verify passes engine output and catches a deleted letter") {
  auto p = seeded_instance(3, 4);
  p.stages = 5;
  EngineOptions eo;
  eo.run_checks = false;
  const auto result = run_interpolation(p, eo);
  const auto rep = verify(result, p);
  CHECK(rep.pass());
  CHECK(rep.failure.empty());
  CHECK(rep.residual <= 1e-8);
  CHECK(rep.matched == 4);
  CHECK(rep.stages.size() == p.stages);
  CHECK(rep.roundtrip_samples == 1000);

  // Drop the last letter of the first stage that matches something.
  AutWord cut = result.word;
  std::size_t victim = cut.size();
  for (const auto& s : cut.stages) {
    if (s.end > s.begin) victim = s.end - 1;
  }
  REQUIRE(victim < cut.size());
  cut.letters.erase(cut.letters.begin() + static_cast<long>(victim));
  for (auto& s : cut.stages) {
    if (s.begin > victim) --s.begin;
    if (s.end > victim) --s.end;
  }
  const auto bad = verify(cut, p);
  CHECK_FALSE(bad.pass());

  // A word built for a different stage count.
  auto other = p;
  other.stages = 4;
  const auto mismatch = verify(result.word, other);
  CHECK_FALSE(mismatch.pass());
  CHECK_FALSE(mismatch.failure.empty());
}

TEST_CASE("identity problem verifies") {
  const auto p = identity_problem();
  const auto rep = verify(run_interpolation(p), p);
  CHECK(rep.pass());
  CHECK(rep.residual <= 1e-9);
  CHECK(rep.matched == 3);
}

TEST_CASE("report documents are versioned") {
  const auto p = identity_problem();
  const auto rep = verify(run_interpolation(p), p);
  const auto doc = nlohmann::json::parse(report_to_json(rep));
  CHECK(doc["format_version"] == 1);
  CHECK(doc["pass"] == true);
  CHECK(doc["stages"].size() == p.stages);
  CHECK(doc["final"]["matched"] == 3);
  CHECK(report_to_text(rep).rfind("PASS", 0) == 0);
}

TEST_CASE("orbit grid arithmetic and identity orbits") {
  const std::vector<AutWord> words(3, identity_word(2));
  const std::vector<double> radii{6.0, 6.5, 7.0};
  OrbitWindow w;
  w.re_min = -5.0;
  w.re_max = 5.0;
  w.im_min = -5.0;
  w.im_max = 5.0;
  const auto cells = export_orbit(words, radii, w, 1.0);
  CHECK(cells.size() == 121);
  std::size_t inside = 0;
  for (const auto& c : cells) inside += c.escape_stage == 0;
  CHECK(inside == 121 - 4);  // only the corners leave the first ball
  const auto csv = orbit_to_csv(cells);
  CHECK(csv.rfind("re,im,escape_stage\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 122);
  CHECK(orbit_to_csv(export_orbit(words, radii, w, 1.0)) == csv);

  w.re_max = w.re_min;
  CHECK_THROWS_AS(export_orbit(words, radii, w, 1.0), ValidationError);
}

TEST_CASE("orbit cells agree with direct iteration near a source") {
  auto p = seeded_instance(3, 4);
  p.stages = 5;
  EngineOptions eo;
  eo.run_checks = false;
  const auto result = run_interpolation(p, eo);
  const auto words = stage_words(result.word);
  OrbitWindow w;
  w.re_min = 3.0;
  w.re_max = 5.0;
  w.im_min = -1.0;
  w.im_max = 1.0;
  const auto cells = export_orbit(words, result.word.schedule, w, 0.25);
  std::size_t escaped = 0;
  for (const auto& c : cells) {
    const auto z = make_point({Complex(c.re, c.im), 0.0});
    CHECK(c.escape_stage == oracle_escape(words, result.word.schedule, z));
    if (c.escape_stage > 0) {
      ++escaped;
      CHECK(c.escape_stage <= p.stages);
    }
  }
  CHECK(escaped > 0);
  // The source (4, 0) itself sits on the grid and ends at its target.
  const auto at_source = std::find_if(cells.begin(), cells.end(), [](const OrbitCell& c) { return c.re == 4.0 && c.im == 0.0; });
  REQUIRE(at_source != cells.end());
  CHECK(at_source->escape_stage == 0);
}

TEST_CASE("atomic writes leave no temporary behind") {
  const auto path = (scratch_dir() / "atomic.txt").string();
  write_atomic(path, "first");
  write_atomic(path, "second");
  CHECK(read_text(path) == "second");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(scratch_dir())) files += e.path().filename().string().rfind("atomic", 0) == 0;
  CHECK(files == 1);
}
