#pragma once
// The "latfact/1" JSON instance schema:
//
//   {
//     "schema": "latfact/1",
//     "measure":  {"weights": [..]},
//     "space":    {"family": "lebesgue", "s": 2},
//     "operator": {"matrix": [[..], ..], "codomain": {"family": "euclidean" | "domain" | "lebesgue", "s": ..}},
//     "p": 1, "q": 2, "tol": 1e-6, "budget": 24, "seed": 0,
//     "xi": {"atoms": [{"h": [..], "mass": ..}], "normalized": true},
//     "count": 100
//   }
//
// Every field except "schema" is optional at parse time; commands demand the
// fields they use.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "latfact/constants.hpp"
#include "latfact/snorm.hpp"

namespace latfact {

inline constexpr const char* kSchema = "latfact/1";

struct CodomainSpec {
  std::string family = "euclidean";
  double s = 2.0;  // lebesgue codomains only, uniform weights
  bool operator==(const CodomainSpec&) const = default;
};

struct XiAtomSpec {
  Vector h;
  double mass = 1.0;
  bool operator==(const XiAtomSpec&) const = default;
};

struct Instance {
  std::optional<Vector> weights;
  std::optional<double> s;
  std::optional<std::vector<Vector>> matrix;  // rows
  CodomainSpec codomain;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> tol;
  std::optional<int> budget;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<XiAtomSpec>> xi;
  bool xi_normalized = true;
  std::optional<int> count;
  bool operator==(const Instance&) const = default;
};

Instance parse_instance(const nlohmann::json& doc);
nlohmann::json to_json(const Instance& instance);
Instance load_instance(const std::filesystem::path& path);

LatticeNorm build_space(const Instance& instance);
LinearOperator build_operator(const Instance& instance);
ExponentTriple build_exponents(const Instance& instance);
DiscreteRadonMeasure build_xi(const Instance& instance);

nlohmann::json to_json(const Family& family);
nlohmann::json to_json(const ConstantEstimate& estimate);
nlohmann::json to_json(const DiscreteRadonMeasure& xi);

}  // namespace latfact
