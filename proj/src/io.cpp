#include <cmath>
#include <fstream>
#include <sstream>

#include "latfact/io.hpp"

namespace latfact {

using nlohmann::json;

namespace {

double number(const json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(std::string(what) + " must be finite");
  return v;
}

Vector numbers(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array of numbers");
  Vector out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

const json* member(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const json& object(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_object()) throw InputError(std::string(key) + " must be an object");
  return v;
}

}  // namespace

Instance parse_instance(const json& doc) {
  if (!doc.is_object()) throw InputError("instance must be a JSON object");
  const json* schema = member(doc, "schema");
  if (schema == nullptr || !schema->is_string() || schema->get<std::string>() != kSchema)
    throw InputError(std::string("instance must declare \"schema\": \"") + kSchema + "\"");

  Instance in;
  if (member(doc, "measure")) {
    const json& m = object(doc, "measure");
    if (!member(m, "weights")) throw InputError("measure.weights missing");
    in.weights = numbers(m.at("weights"), "measure.weights");
  }
  if (member(doc, "space")) {
    const json& s = object(doc, "space");
    const std::string family = s.value("family", "lebesgue");
    if (family != "lebesgue") throw InputError("space.family '" + family + "' is not supported");
    if (!member(s, "s")) throw InputError("space.s missing");
    in.s = number(s.at("s"), "space.s");
  }
  if (member(doc, "operator")) {
    const json& op = object(doc, "operator");
    if (!member(op, "matrix") || !op.at("matrix").is_array()) throw InputError("operator.matrix must be an array");
    std::vector<Vector> rows;
    for (const auto& r : op.at("matrix")) rows.push_back(numbers(r, "operator.matrix row"));
    in.matrix = std::move(rows);
    if (member(op, "codomain")) {
      const json& c = object(op, "codomain");
      in.codomain.family = c.value("family", "euclidean");
      if (in.codomain.family != "euclidean" && in.codomain.family != "domain" && in.codomain.family != "lebesgue")
        throw InputError("operator.codomain.family '" + in.codomain.family + "' is not supported");
      if (member(c, "s")) in.codomain.s = number(c.at("s"), "operator.codomain.s");
    }
  }
  if (member(doc, "p")) in.p = number(doc.at("p"), "p");
  if (member(doc, "q")) in.q = number(doc.at("q"), "q");
  if (member(doc, "tol")) in.tol = number(doc.at("tol"), "tol");
  if (member(doc, "budget")) {
    if (!doc.at("budget").is_number_integer()) throw InputError("budget must be an integer");
    in.budget = doc.at("budget").get<int>();
  }
  if (member(doc, "seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw InputError("seed must be a nonnegative integer");
    in.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (member(doc, "count")) {
    if (!doc.at("count").is_number_integer()) throw InputError("count must be an integer");
    in.count = doc.at("count").get<int>();
  }
  if (member(doc, "xi")) {
    const json& x = object(doc, "xi");
    if (!member(x, "atoms") || !x.at("atoms").is_array()) throw InputError("xi.atoms must be an array");
    std::vector<XiAtomSpec> atoms;
    for (const auto& a : x.at("atoms")) {
      if (!a.is_object() || !member(a, "h")) throw InputError("xi atoms need an \"h\" array");
      atoms.push_back(XiAtomSpec{numbers(a.at("h"), "xi atom h"), a.contains("mass") ? number(a.at("mass"), "xi mass") : 1.0});
    }
    in.xi = std::move(atoms);
    in.xi_normalized = x.value("normalized", true);
  }
  return in;
}

json to_json(const Instance& in) {
  json doc;
  doc["schema"] = kSchema;
  if (in.weights) doc["measure"] = {{"weights", *in.weights}};
  if (in.s) doc["space"] = {{"family", "lebesgue"}, {"s", *in.s}};
  if (in.matrix) {
    json codomain = {{"family", in.codomain.family}};
    if (in.codomain.family == "lebesgue") codomain["s"] = in.codomain.s;
    doc["operator"] = {{"matrix", *in.matrix}, {"codomain", codomain}};
  }
  if (in.p) doc["p"] = *in.p;
  if (in.q) doc["q"] = *in.q;
  if (in.tol) doc["tol"] = *in.tol;
  if (in.budget) doc["budget"] = *in.budget;
  if (in.seed) doc["seed"] = *in.seed;
  if (in.count) doc["count"] = *in.count;
  if (in.xi) {
    json atoms = json::array();
    for (const auto& a : *in.xi) atoms.push_back({{"h", a.h}, {"mass", a.mass}});
    doc["xi"] = {{"atoms", atoms}, {"normalized", in.xi_normalized}};
  }
  return doc;
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("instance " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_instance(doc);
}

LatticeNorm build_space(const Instance& in) {
  if (!in.weights) throw InputError("instance needs measure.weights");
  if (!in.s) throw InputError("instance needs space.s");
  return LatticeNorm::lebesgue(MeasureSpace(*in.weights), *in.s);
}

LinearOperator build_operator(const Instance& in) {
  const LatticeNorm x = build_space(in);
  if (!in.matrix) throw InputError("instance needs operator.matrix");
  const auto& rows = *in.matrix;
  if (rows.empty()) throw InputError("operator.matrix has no rows");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols) throw InputError("operator.matrix rows have different lengths");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  CodomainNorm codomain = CodomainNorm::euclidean(m.rows == 0 ? 1 : m.rows);
  if (in.codomain.family == "domain") {
    codomain = CodomainNorm::lattice(x);
  } else if (in.codomain.family == "lebesgue") {
    codomain = CodomainNorm::lattice(LatticeNorm::lebesgue(MeasureSpace::uniform(m.rows), in.codomain.s));
  }
  return LinearOperator(std::move(m), x, std::move(codomain));
}

ExponentTriple build_exponents(const Instance& in) {
  if (!in.p || !in.q) throw InputError("instance needs p and q");
  return ExponentTriple(*in.p, *in.q);
}

DiscreteRadonMeasure build_xi(const Instance& in) {
  if (!in.xi) throw InputError("instance needs xi.atoms");
  std::vector<DualVector> atoms;
  Vector masses;
  for (const auto& a : *in.xi) {
    atoms.push_back(DualVector{a.h, 0.0});
    masses.push_back(a.mass);
  }
  DiscreteRadonMeasure xi(std::move(atoms), std::move(masses));
  return in.xi_normalized ? xi.normalized_copy() : xi;
}

json to_json(const Family& family) {
  json out = json::array();
  for (const auto& f : family) out.push_back(f);
  return out;
}

json to_json(const ConstantEstimate& est) {
  return {{"kind", to_string(est.kind)},
          {"value", est.value},
          {"witness", to_json(est.witness)},
          {"budget_used", est.budget_used}};
}

json to_json(const DiscreteRadonMeasure& xi) {
  json atoms = json::array();
  for (std::size_t k = 0; k < xi.size(); ++k) atoms.push_back({{"h", xi.atoms()[k].h}, {"mass", xi.masses()[k]}});
  return {{"atoms", atoms}, {"normalized", xi.normalized()}};
}

}  // namespace latfact
