#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "embedlab/embeddings.hpp"
#include "embedlab/error.hpp"
#include "embedlab/free_space.hpp"
#include "embedlab/metric_space.hpp"
#include "embedlab/rational.hpp"

namespace embedlab::io {

using nlohmann::json;

// {"label": "M"|"N0", "n": int, "points": [string], "dist": [[int]]}
inline json space_to_json(const TruncatedSpace& space) {
  json points = json::array();
  for (std::size_t i = 0; i < space.size(); ++i) points.push_back(space.name(i));
  json dist = json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < space.size(); ++j) row.push_back(space.at(i, j));
    dist.push_back(std::move(row));
  }
  return {{"label", to_string(space.label())},
          {"n", space.level()},
          {"points", std::move(points)},
          {"dist", std::move(dist)}};
}

inline SpaceLabel parse_label(const std::string& text) {
  if (text == "M") return SpaceLabel::MSpace;
  if (text == "N0") return SpaceLabel::N0Space;
  throw Error(ErrorKind::Validation, "unknown space label '" + text + "'");
}

inline TruncatedSpace space_from_json(const json& doc) {
  try {
    const SpaceLabel label = parse_label(doc.at("label").get<std::string>());
    const int n = doc.at("n").get<int>();
    std::vector<PointM> points;
    for (const auto& p : doc.at("points")) points.push_back(PointM::parse(p.get<std::string>()));
    const auto dist = doc.at("dist").get<std::vector<std::vector<int>>>();
    TruncatedSpace parsed = TruncatedSpace::from_matrix(label, n, std::move(points), dist);
    // Canonical documents come back as the canonical (table-backed) space.
    if (label == SpaceLabel::MSpace && n >= 1 && n <= 20 &&
        parsed.size() == static_cast<std::size_t>(n + (1 << n))) {
      TruncatedSpace canonical = TruncatedSpace::m_space(n, n);
      if (canonical == parsed) return canonical;
    }
    if (label == SpaceLabel::N0Space && n >= 1 && n <= PointM::kMaxElement &&
        parsed.size() == static_cast<std::size_t>(n + 1)) {
      TruncatedSpace canonical = TruncatedSpace::n0_space(n);
      if (canonical == parsed) return canonical;
    }
    return parsed;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("malformed space document: ") + e.what());
  }
}

// Header row "point,<names>", then one row per point.
inline std::string space_to_csv(const TruncatedSpace& space) {
  auto quote = [](const std::string& s) {
    return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
  };
  std::ostringstream out;
  out << "point";
  for (std::size_t j = 0; j < space.size(); ++j) out << ',' << quote(space.name(j));
  out << '\n';
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << quote(space.name(i));
    for (std::size_t j = 0; j < space.size(); ++j) out << ',' << space.at(i, j);
    out << '\n';
  }
  return out.str();
}

inline json violations_to_json(const TruncatedSpace& space, const MetricReport& report) {
  json out = json::array();
  for (const auto& v : report.violations) {
    json item = {{"kind", to_string(v.kind)},
                 {"x", space.name(v.i)},
                 {"y", space.name(v.j)},
                 {"value", v.value},
                 {"expected", v.expected}};
    if (v.kind == MetricViolation::Kind::Triangle) item["via"] = space.name(v.k);
    out.push_back(std::move(item));
  }
  return out;
}

// {"weights": {"<point>": "p/q", ...}}; plain JSON numbers are accepted too.
inline Molecule molecule_from_json(const TruncatedSpace& space, const json& doc) {
  try {
    std::map<PointM, Rational> weights;
    for (const auto& [key, value] : doc.at("weights").items()) {
      const PointM p = space.parse_point(key);
      Rational w;
      if (value.is_string()) w = parse_rational(value.get<std::string>());
      else if (value.is_number_integer()) w = Rational(value.get<long long>());
      else if (value.is_number()) w = parse_rational(value.dump());
      else throw Error(ErrorKind::Validation, "weight for " + key + " is not a number");
      weights[p] += w;
    }
    return Molecule(space, weights);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("malformed molecule document: ") + e.what());
  }
}

inline json free_norm_to_json(const TruncatedSpace& space, const FreeNormResult& r) {
  json plan = json::array();
  for (const auto& arc : r.primal.arcs)
    plan.push_back({{"from", space.name(arc.from)},
                    {"to", space.name(arc.to)},
                    {"mass", format_rational(arc.mass)}});
  json dual = json::object();
  for (const auto& [p, v] : r.dual.values) dual[space.name(p)] = format_rational(v);
  return {{"norm", format_rational(r.norm)},
          {"plan", std::move(plan)},
          {"dual", std::move(dual)},
          {"gap", format_rational(r.gap)}};
}

// {"label", "n", "target", "dim", "vectors": {"<point>": [numbers]}}
template <class T>
json embedding_to_json(const EmbeddingMap<T>& f) {
  json vectors = json::object();
  for (std::size_t i = 0; i < f.space->size(); ++i) {
    json row = json::array();
    for (const auto& x : f.vectors[i]) {
      if constexpr (std::is_floating_point_v<T>) row.push_back(x);
      else row.push_back(format_rational(x));
    }
    vectors[f.space->name(i)] = std::move(row);
  }
  return {{"label", to_string(f.space->label())},
          {"n", f.space->level()},
          {"target", to_string(f.norm)},
          {"dim", f.dim},
          {"vectors", std::move(vectors)}};
}

inline EmbeddingMap<double> embedding_from_json(const TruncatedSpace& space, const json& doc) {
  try {
    const Norm norm = parse_norm(doc.at("target").get<std::string>());
    const auto dim = doc.at("dim").get<std::size_t>();
    const auto& vectors = doc.at("vectors");
    std::vector<std::vector<double>> v(space.size());
    std::vector<bool> seen(space.size(), false);
    for (const auto& [key, row] : vectors.items()) {
      const std::size_t i = space.require_index(space.parse_point(key));
      for (const auto& x : row)
        v[i].push_back(x.is_string() ? to_double(parse_rational(x.get<std::string>()))
                                     : x.get<double>());
      seen[i] = true;
    }
    for (std::size_t i = 0; i < space.size(); ++i)
      if (!seen[i])
        throw Error(ErrorKind::Validation, "embedding has no image for " + space.name(i));
    return EmbeddingMap<double>(space, norm, dim, std::move(v));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("malformed embedding document: ") + e.what());
  }
}

}  // namespace embedlab::io
