#include <string>

#include "holointerp/automorphism.hpp"
#include "json_util.hpp"

namespace holointerp {

using detail::json;

namespace {

json polynomial_to_json(const Polynomial& p) {
  switch (p.form()) {
    case Polynomial::Form::Dense:
      return {{"form", "dense"}, {"coefficients", detail::complex_list_to_json(p.coefficients())}};
    case Polynomial::Form::Factored:
      return {{"form", "factored"},
              {"scale", detail::complex_to_json(p.scale())},
              {"anchor", detail::complex_to_json(p.anchor())},
              {"roots", detail::complex_list_to_json(p.roots())},
              {"multiplicities", p.multiplicities()}};
    case Polynomial::Form::Lagrange:
      return {{"form", "lagrange"},
              {"nodes", detail::complex_list_to_json(p.nodes())},
              {"values", detail::complex_list_to_json(p.values())}};
  }
  return {};
}

Polynomial polynomial_from_json(const json& letter) {
  if (letter.contains("coefficients")) return Polynomial::dense(detail::complex_list_from_json(letter["coefficients"]));
  if (!letter.contains("polynomial")) throw ParseError("shear letter needs coefficients or polynomial");
  const json& p = letter["polynomial"];
  const std::string form = p.at("form").get<std::string>();
  if (form == "dense") return Polynomial::dense(detail::complex_list_from_json(p.at("coefficients")));
  if (form == "factored") {
    return Polynomial::factored(detail::complex_from_json(p.at("scale")), detail::complex_from_json(p.at("anchor")),
                                detail::complex_list_from_json(p.at("roots")),
                                p.at("multiplicities").get<std::vector<unsigned>>());
  }
  if (form == "lagrange") {
    return Polynomial::lagrange(detail::complex_list_from_json(p.at("nodes")),
                                detail::complex_list_from_json(p.at("values")));
  }
  throw ParseError("unknown polynomial form '" + form + "'");
}

json letter_to_json(const ElementaryAut& a) {
  json j;
  j["kind"] = to_string(a.kind);
  j["frame"] = detail::matrix_to_json(a.frame);
  if (a.kind == LetterKind::AffineUnitary) {
    j["translation"] = detail::point_to_json(a.translation);
    return j;
  }
  j["direction"] = a.direction;
  j["functional"] = a.functional;
  if (a.h.form() == Polynomial::Form::Dense) {
    j["coefficients"] = detail::complex_list_to_json(a.h.coefficients());
  } else {
    j["polynomial"] = polynomial_to_json(a.h);
  }
  return j;
}

ElementaryAut letter_from_json(const json& j, std::size_t n) {
  const std::string kind = j.at("kind").get<std::string>();
  CMatrix frame = detail::matrix_from_json(j.at("frame"), n);
  if (kind == "affine") {
    CPoint t = detail::point_from_json(j.at("translation"));
    if (static_cast<std::size_t>(t.size()) != n) throw ParseError("translation has the wrong dimension");
    return ElementaryAut::affine_unitary(std::move(frame), std::move(t));
  }
  const auto d = j.at("direction").get<std::size_t>();
  const auto c = j.at("functional").get<std::size_t>();
  if (kind == "shear") return ElementaryAut::shear(std::move(frame), d, c, polynomial_from_json(j));
  if (kind == "overshear") return ElementaryAut::overshear(std::move(frame), d, c, polynomial_from_json(j));
  throw ParseError("unknown letter kind '" + kind + "'");
}

}  // namespace

std::string word_to_json(const AutWord& word) {
  json doc;
  doc["format_version"] = 1;
  doc["dimension"] = word.dimension;
  doc["letters"] = json::array();
  for (const auto& a : word.letters) doc["letters"].push_back(letter_to_json(a));
  doc["stages"] = json::array();
  for (const auto& s : word.stages) doc["stages"].push_back({s.begin, s.end});
  doc["schedule"] = word.schedule;
  return doc.dump(1);
}

AutWord word_from_json(const std::string& text) {
  const json doc = detail::parse_json(text);
  return detail::guarded([&] {
    detail::require_version(doc);
    AutWord w;
    w.dimension = doc.at("dimension").get<std::size_t>();
    if (w.dimension < 2) throw ParseError("dimension must be at least 2");
    for (const auto& l : doc.at("letters")) w.push(letter_from_json(l, w.dimension));
    if (doc.contains("stages")) {
      for (const auto& s : doc["stages"]) {
        StageRange r{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()};
        if (r.begin > r.end || r.end > w.letters.size()) throw ParseError("stage range outside the word");
        w.stages.push_back(r);
      }
    }
    if (doc.contains("schedule")) w.schedule = doc["schedule"].get<std::vector<double>>();
    return w;
  });
}

}  // namespace holointerp
