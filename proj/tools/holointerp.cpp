// Command-line front end: solve, verify, orbit, normalize.
// Exit status: 0 PASS, 1 FAIL, 2 usage or parse error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "holointerp/errors.hpp"
#include "holointerp/harness.hpp"
#include "holointerp/relocation.hpp"

using namespace holointerp;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Args {
  std::string problem, word, out, report, sequence;
  std::optional<std::uint64_t> seed;
  double density = 4.0;
  std::vector<double> window;
  double res = 0.1;
  std::size_t coordinate = 0;
};

InterpolationProblem problem_with_seed(const Args& a) {
  auto p = load_problem(a.problem);
  if (a.seed) p.seed = *a.seed;
  return p;
}

VerifyOptions verify_options(const Args& a, const InterpolationProblem& p) {
  VerifyOptions o;
  o.density = a.density;
  o.roundtrip_seed = p.seed;
  return o;
}

void write_report(const std::string& path, const VerificationReport& rep) {
  if (path.empty()) return;
  write_atomic(path, report_to_json(rep));
  write_atomic(path + ".txt", report_to_text(rep));
}

int run_solve(const Args& a) {
  const auto p = problem_with_seed(a);
  EngineOptions eo;
  eo.run_checks = false;  // verification below recomputes everything
  const auto result = run_interpolation(p, eo);
  write_atomic(a.out, word_to_json(result.word));
  auto rep = verify(result, p, verify_options(a, p));
  write_report(a.report, rep);
  std::cout << report_to_text(rep);
  return rep.pass() ? kPass : kFail;
}

int run_verify(const Args& a) {
  const auto p = problem_with_seed(a);
  const auto word = word_from_json(read_text(a.word));
  const auto rep = verify(word, p, verify_options(a, p));
  write_report(a.report, rep);
  std::cout << report_to_text(rep);
  return rep.pass() ? kPass : kFail;
}

int run_orbit(const Args& a) {
  if (a.window.size() != 4) throw ValidationError("--window", "expects re_min,re_max,im_min,im_max");
  const auto word = word_from_json(read_text(a.word));
  OrbitWindow w;
  w.coordinate = a.coordinate;
  w.re_min = a.window[0];
  w.re_max = a.window[1];
  w.im_min = a.window[2];
  w.im_max = a.window[3];
  const auto cells = export_orbit(stage_words(word), word.schedule, w, a.res);
  write_atomic(a.out, orbit_to_csv(cells));
  std::size_t inside = 0;
  for (const auto& c : cells) inside += c.escape_stage == 0;
  std::cout << cells.size() << " cells, " << inside << " inside through every stage\n";
  return kPass;
}

int run_normalize(const Args& a) {
  const auto seq = sequence_from_json(read_text(a.sequence));
  const auto word = tame_normalize(seq);
  double worst = 0.0;
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const auto n = static_cast<Eigen::Index>(seq.points[j].size());
    CPoint e = CPoint::Zero(n);
    e[0] = static_cast<double>(j + 1);
    worst = std::max(worst, distance(eval(word, seq.points[j]), e));
  }
  if (!a.out.empty()) write_atomic(a.out, word_to_json(word));
  std::cout << "letters " << word.size() << ", residual to e_j " << worst << "\n";
  return worst <= 1e-9 ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpolation by Fatou-Bieberbach maps"};
  app.require_subcommand(1);
  Args a;

  auto* solve = app.add_subcommand("solve", "build the word for a problem and verify it");
  solve->add_option("problem", a.problem, "problem file")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", a.out, "word file to write")->required();
  solve->add_option("--report", a.report, "report file to write (JSON, plus .txt)")->required();
  solve->add_option("--seed", a.seed, "override the problem seed");
  solve->add_option("--density", a.density, "verification samples per unit length");

  auto* ver = app.add_subcommand("verify", "recompute every condition for a word");
  ver->add_option("problem", a.problem, "problem file")->required()->check(CLI::ExistingFile);
  ver->add_option("word", a.word, "word file")->required()->check(CLI::ExistingFile);
  ver->add_option("--report", a.report, "report file to write");
  ver->add_option("--seed", a.seed, "override the problem seed");
  ver->add_option("--density", a.density, "verification samples per unit length");

  auto* orbit = app.add_subcommand("orbit", "escape stages on a grid of one coordinate plane");
  orbit->add_option("word", a.word, "word file")->required()->check(CLI::ExistingFile);
  orbit->add_option("--window", a.window, "re_min,re_max,im_min,im_max")->required()->delimiter(',');
  orbit->add_option("--res", a.res, "grid spacing")->required();
  orbit->add_option("--out", a.out, "CSV file to write")->required();
  orbit->add_option("--coordinate", a.coordinate, "0-based coordinate spanning the plane");

  auto* norm = app.add_subcommand("normalize", "send a tame sequence to e_j");
  norm->add_option("sequence", a.sequence, "sequence file")->required()->check(CLI::ExistingFile);
  norm->add_option("--out", a.out, "word file to write");

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    std::cerr << "unknown subcommand '" << argv[1] << "'\n";
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (solve->parsed()) return run_solve(a);
    if (ver->parsed()) return run_verify(a);
    if (orbit->parsed()) return run_orbit(a);
    if (norm->parsed()) return run_normalize(a);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
