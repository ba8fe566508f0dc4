#pragma once

// JSON ingestion and emission for cones, profiles, symbols and field specifications; fields are
// stored as little-endian complex64 arrays with a JSON sidecar {n, L, N}.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "conewave/cone_geometry.hpp"
#include "conewave/multiplier_engine.hpp"
#include "conewave/sphere_profiles.hpp"
#include "conewave/symbols.hpp"
#include "conewave/wavefront.hpp"

namespace conewave::io {

using json = nlohmann::json;

namespace detail {

inline const json& at(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* key) {
  const auto& v = at(j, key);
  if (!v.is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

inline double number_or(const json& j, const char* key, double dflt) {
  return j.contains(key) ? number(j, key) : dflt;
}

inline std::vector<double> vec(const json& v) {
  if (!v.is_array() || v.empty()) throw ConfigError("expected a non-empty numeric array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError("expected a numeric array");
    out.push_back(x.get<double>());
  }
  return out;
}

// Angles given either as "<key>Deg" (degrees) or "<key>" (radians).
inline double angle(const json& j, const std::string& key) {
  if (j.contains(key + "Deg")) return number(j, (key + "Deg").c_str()) * kDegree;
  return number(j, key.c_str());
}

}  // namespace detail

inline UnitVector unit_from_json(const json& v) { return UnitVector::normalized(detail::vec(v)); }

inline json unit_to_json(const UnitVector& u) { return json(u.vec()); }

inline ConeSpec cone_from_json(const json& j) {
  const std::string type = detail::at(j, "kind").get<std::string>();
  if (type == "circular") {
    const auto axis = unit_from_json(detail::at(j, "axis"));
    const bool open = j.value("open", false);
    if (j.contains("cosHalf")) {
      const double c = detail::number(j, "cosHalf");
      if (!(c >= -1.0 && c <= 1.0)) throw ConfigError("cosHalf must lie in [-1, 1]");
      return CircularCone(axis, c, open);
    }
    return CircularCone::from_half_angle(axis, detail::angle(j, "halfAngle"), open);
  }
  if (type == "whole") return CircularCone::whole_space(static_cast<std::size_t>(detail::number(j, "n")));
  if (type == "polyhedral") {
    std::vector<UnitVector> g;
    for (const auto& v : detail::at(j, "generators")) g.push_back(unit_from_json(v));
    return PolyhedralCone(std::move(g));
  }
  if (type == "halfspace") {
    std::vector<UnitVector> nv;
    for (const auto& v : j.value("normals", json::array())) nv.push_back(unit_from_json(v));
    return HalfspaceCone(static_cast<std::size_t>(detail::number(j, "n")), std::move(nv));
  }
  if (type == "zero") return ZeroCone{static_cast<std::size_t>(detail::number(j, "n"))};
  throw ConfigError("unknown cone type '" + type + "'");
}

inline json cone_to_json(const ConeSpec& c) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, CircularCone>) {
          if (k.is_whole_space()) return {{"kind", "whole"}, {"n", k.dim()}};
          return {{"kind", "circular"},
                  {"axis", k.axis().vec()},
                  {"cosHalf", k.cos_half()},
                  {"open", k.is_open()}};
        } else if constexpr (std::is_same_v<T, PolyhedralCone>) {
          json g = json::array();
          for (const auto& v : k.generators()) g.push_back(v.vec());
          return {{"kind", "polyhedral"}, {"generators", g}};
        } else if constexpr (std::is_same_v<T, HalfspaceCone>) {
          json g = json::array();
          for (const auto& v : k.normals()) g.push_back(v.vec());
          return {{"kind", "halfspace"}, {"n", k.dim()}, {"normals", g}};
        } else {
          return {{"kind", "zero"}, {"n", k.dim()}};
        }
      },
      c);
}

inline CircularCone circular_from_json(const json& j) {
  const auto c = cone_from_json(j);
  if (const auto* cc = std::get_if<CircularCone>(&c)) return *cc;
  throw ConfigError("expected a circular cone");
}

// Profile spec: {"kind": "caps", "caps": [...]}, {"kind": "grid", "thetaPhiValues": [...]} or
// {"n", "constant", "region"}. "n" may be omitted when the caps or a theta/phi grid imply it.
inline SphericalProfile profile_from_json(const json& j) {
  std::size_t n = 0;
  if (j.contains("n")) n = static_cast<std::size_t>(detail::number(j, "n"));
  else if (j.contains("caps") && j.at("caps").is_array() && !j.at("caps").empty())
    n = detail::vec(detail::at(j.at("caps").at(0), "axis")).size();
  else if (j.contains("thetaPhiValues")) n = 3;
  else throw ConfigError("missing key 'n'");
  std::optional<ConeSpec> support;
  if (j.contains("support")) support = cone_from_json(j.at("support"));
  if (j.contains("constant")) {
    const auto region = circular_from_json(detail::at(j, "region"));
    return SphericalProfile::constant(n, detail::number(j, "constant"), region);
  }
  if (j.contains("caps")) {
    std::vector<ProfileCap> caps;
    for (const auto& c : j.at("caps"))
      caps.push_back({unit_from_json(detail::at(c, "axis")), detail::angle(c, "halfAngle"), detail::number(c, "value")});
    return SphericalProfile::caps(n, std::move(caps), support);
  }
  const char* gridKey = j.contains("thetaPhiValues") ? "thetaPhiValues" : "grid";
  if (j.contains(gridKey)) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : j.at(gridKey)) rows.push_back(detail::vec(r));
    return SphericalProfile::grid(n, std::move(rows), support);
  }
  throw ConfigError("profile needs one of 'constant', 'caps', 'grid' or 'thetaPhiValues'");
}

// Cap list or point list describing supp phi_1-.
inline DirectionSet direction_set_from_json(const json& j) {
  DirectionSet s;
  for (const auto& p : j.value("points", json::array())) s.points.push_back(unit_from_json(p));
  for (const auto& c : j.value("caps", json::array()))
    s.caps.push_back(CircularCone::from_half_angle(unit_from_json(detail::at(c, "axis")), detail::angle(c, "halfAngle")));
  return s;
}

inline Symbol symbol_from_json(const json& j) {
  const std::string kind = detail::at(j, "kind").get<std::string>();
  if (kind == "one") return [](std::span<const double>) { return cplx(1.0); };
  if (kind == "sign") return sign_symbol();
  if (kind == "control") return control_symbol(detail::number(j, "R"));
  if (kind == "cutoff")
    return real_symbol(make_smooth_cutoff(cone_from_json(detail::at(j, "v0")), cone_from_json(detail::at(j, "vOuter")),
                                          detail::number_or(j, "R", 1.0), detail::number_or(j, "c0", 1.0)));
  if (kind == "homogeneous")
    return real_symbol(HomogeneousSymbol(profile_from_json(detail::at(j, "profile")), detail::number_or(j, "r", 1.0)));
  if (kind == "shift") {
    const auto a = detail::vec(detail::at(j, "a"));
    return [a](std::span<const double> xi) {
      double s = 0.0;
      for (std::size_t i = 0; i < xi.size() && i < a.size(); ++i) s += a[i] * xi[i];
      return std::exp(cplx(0.0, -s));
    };
  }
  throw ConfigError("unknown symbol kind '" + kind + "'");
}

// ---------------------------------------------------------------------------------------
// Fields.

inline void write_field(const std::filesystem::path& bin, const GridField& f) {
  f.validate();
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + bin.string());
  for (const auto& v : f.values) {
    const float parts[2] = {static_cast<float>(v.real()), static_cast<float>(v.imag())};
    unsigned char bytes[8];
    for (int k = 0; k < 2; ++k) {
      std::uint32_t u;
      std::memcpy(&u, &parts[k], 4);
      for (int b = 0; b < 4; ++b) bytes[4 * k + b] = static_cast<unsigned char>((u >> (8 * b)) & 0xFFu);
    }
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  std::ofstream side(std::filesystem::path(bin).replace_extension(".json"));
  side << json{{"n", f.n}, {"L", f.L}, {"N", f.N}, {"format", "complex64-le"}}.dump(2) << "\n";
}

inline GridField read_field(const std::filesystem::path& bin) {
  const auto sidePath = std::filesystem::path(bin).replace_extension(".json");
  std::ifstream side(sidePath);
  if (!side) throw ConfigError("missing field sidecar " + sidePath.string());
  json meta;
  try {
    side >> meta;
  } catch (const json::exception& e) {
    throw ConfigError("malformed field sidecar: " + std::string(e.what()));
  }
  GridField f{static_cast<std::size_t>(detail::number(meta, "n")), detail::number(meta, "L"),
              static_cast<std::size_t>(detail::number(meta, "N")), {}};
  f.values.resize(f.total());
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + bin.string());
  for (auto& v : f.values) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ConfigError("field file is shorter than its sidecar says");
    float parts[2];
    for (int k = 0; k < 2; ++k) {
      std::uint32_t u = 0;
      for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(bytes[4 * k + b]) << (8 * b);
      std::memcpy(&parts[k], &u, 4);
    }
    v = cplx(parts[0], parts[1]);
  }
  f.validate();
  return f;
}

// Input function for field specs that are sampled analytically.
inline std::function<cplx(std::span<const double>)> input_from_json(const json& j, double h) {
  const std::string kind = detail::at(j, "kind").get<std::string>();
  if (kind == "box") return box_indicator(detail::vec(detail::at(j, "half")), detail::number_or(j, "edge", 0.5));
  if (kind == "gaussian") {
    const double s = detail::number_or(j, "sigma", 1.0);
    return [s](std::span<const double> x) {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return cplx(std::exp(-0.5 * r2 / (s * s)), 0.0);
    };
  }
  if (kind == "log_singular") return log_singular_input(h);
  throw ConfigError("field kind '" + kind + "' cannot be used as a sampled input");
}

// Field spec: {"kind": box|gaussian|log_singular|delta|jump_sheet|file, "n", "L", "N", ...}.
inline GridField field_from_json(const json& j, const std::filesystem::path& base = {}) {
  const std::string kind = detail::at(j, "kind").get<std::string>();
  if (kind == "file") {
    auto p = std::filesystem::path(detail::at(j, "path").get<std::string>());
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p)) throw ConfigError("referenced field file does not exist: " + p.string());
    return read_field(p);
  }
  const auto n = static_cast<std::size_t>(detail::number(j, "n"));
  const double L = detail::number(j, "L");
  const auto N = static_cast<std::size_t>(detail::number(j, "N"));
  if (kind == "delta") {
    require(n == 2, "delta fields are 2-D");
    return delta_field(L, N, j.contains("x0") ? detail::vec(j.at("x0")) : std::vector<double>{0.0, 0.0});
  }
  if (kind == "jump_sheet") {
    require(n == 2, "jump sheet fields are 2-D");
    return jump_sheet_field(L, N);
  }
  return GridField::sample(n, L, N, input_from_json(j, L / static_cast<double>(N)));
}

inline EDescriptor space_from_json(const json& j) {
  return parse_space(detail::at(j, "tag").get<std::string>(), detail::number_or(j, "s", 0.0));
}

inline json condition_to_json(const ConditionReport& c) {
  json j{{"lhs", c.lhs}, {"rhsRaw", c.rhsRaw}, {"rhsScaled", c.rhsScaled}, {"holds", c.holds}, {"margin", c.margin()}};
  j["kappa"] = std::isfinite(c.kappa) ? json(c.kappa) : json(c.kappa > 0 ? "inf" : "-inf");
  j["s"] = c.s ? json(*c.s) : json(nullptr);
  return j;
}

}  // namespace conewave::io
