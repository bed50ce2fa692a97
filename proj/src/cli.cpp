#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "latfact/cli.hpp"
#include "latfact/factorization.hpp"
#include "latfact/search.hpp"

namespace latfact {

using nlohmann::json;

namespace {

constexpr std::size_t kAxiomSamples = 1000;
constexpr std::size_t kVerifySamples = 10000;
constexpr std::size_t kDefaultGridRandom = 256;
constexpr int kDefaultSupCount = 100;
constexpr double kSupGap = 1e-6;

class Assertions {
 public:
  void add(const std::string& name, bool passed, double value) {
    list_.push_back({{"name", name}, {"passed", passed}, {"value", value}});
    passed_ = passed_ && passed;
    lines_ << "  [" << (passed ? "PASS" : "FAIL") << "] " << name << " (" << value << ")\n";
  }
  bool passed() const { return passed_; }
  json to_json() const { return list_; }
  std::string text() const { return lines_.str(); }

 private:
  json list_ = json::array();
  bool passed_ = true;
  std::ostringstream lines_;
};

SearchBudget search_budget(int budget) {
  SearchBudget b;
  b.restarts = std::max(1, budget);
  return b;
}

Vector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector f(n);
  for (double& v : f) v = normal(rng);
  return f;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

RunResult check_space(const Scenario& sc) {
  const LatticeNorm x = build_space(sc.instance);
  const std::size_t n = x.dimension();
  auto rng = make_rng(sc.seed, 1);
  double triangle = 0.0;
  double homogeneity = 0.0;
  double monotone = 0.0;
  std::uniform_real_distribution<double> scalar(-3.0, 3.0);
  for (std::size_t i = 0; i < kAxiomSamples; ++i) {
    const Vector f = random_vector(n, rng);
    const Vector g = random_vector(n, rng);
    Vector sum(n), lower(n), scaled(n);
    const double a = scalar(rng);
    for (std::size_t w = 0; w < n; ++w) {
      sum[w] = f[w] + g[w];
      lower[w] = std::min(std::abs(f[w]), std::abs(g[w]));
      scaled[w] = a * f[w];
    }
    const double nf = x.evaluate(f);
    const double ng = x.evaluate(g);
    triangle = std::max(triangle, (x.evaluate(sum) - nf - ng) / (nf + ng));
    homogeneity = std::max(homogeneity, std::abs(x.evaluate(scaled) - std::abs(a) * nf) / (std::abs(a) * nf));
    monotone = std::max(monotone, (x.evaluate(lower) - nf) / nf);
  }
  double kothe = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vector h = random_vector(n, rng);
    const double closed = kothe_dual_norm(x, h);
    kothe = std::max(kothe, std::abs(closed - kothe_dual_norm_numeric(x, h)) / closed);
  }

  Assertions checks;
  checks.add("triangle inequality", triangle <= 1e-12, triangle);
  checks.add("absolute homogeneity", homogeneity <= 1e-12, homogeneity);
  checks.add("lattice monotonicity", monotone <= 1e-12, monotone);
  checks.add("Kothe dual closed form vs numeric", kothe <= 1e-7, kothe);

  RunResult r;
  r.report["space"] = x.describe();
  r.report["dimension"] = n;
  r.report["convexity_exponent"] = x.convexity_exponent();
  if (sc.instance.p) {
    const double p = *sc.instance.p;
    const auto est = p_convexity_estimate(x, p, search_budget(sc.budget), sc.seed);
    checks.add("p-convexity constant is 1", est.value <= 1.0 + 1e-9, est.value);
    r.report["p_convexity"] = to_json(est);
    const DualBall ball(x, p);
    if (const auto t = ball.dual_exponent()) r.report["dual_exponent"] = std::isinf(*t) ? json("inf") : json(*t);
  }
  r.report["assertions"] = checks.to_json();
  r.status = checks.passed() ? kExitPass : kExitFail;
  r.summary = "check-space: " + x.describe() + "\n" + checks.text();
  return r;
}

RunResult constants(const Scenario& sc) {
  const LinearOperator t = build_operator(sc.instance);
  const ExponentTriple e = build_exponents(sc.instance);
  const ChainReport chain = constant_chain_report(t, e, search_budget(sc.budget), sc.seed);

  Assertions checks;
  json records = json::array();
  for (const auto* est : {&chain.operator_norm, &chain.q_concavity, &chain.pq_concavity, &chain.q_summing})
    records.push_back(to_json(*est));
  for (const auto& c : chain.checks) checks.add(c.name, c.holds, c.upper - c.lower);

  RunResult r;
  r.report["estimates"] = records;
  r.report["assertions"] = checks.to_json();
  r.status = checks.passed() ? kExitPass : kExitFail;
  std::ostringstream s;
  s << "constants: p = " << e.p() << ", q = " << e.q() << "\n";
  s << "  " << std::left << std::setw(16) << "constant" << "estimate\n";
  for (const auto* est : {&chain.operator_norm, &chain.q_concavity, &chain.pq_concavity, &chain.q_summing})
    s << "  " << std::left << std::setw(16) << to_string(est->kind) << fmt(est->value) << "\n";
  r.summary = s.str() + checks.text();
  return r;
}

RunResult snorm_demo(const Scenario& sc) {
  const LatticeNorm x = build_space(sc.instance);
  const ExponentTriple e = build_exponents(sc.instance);
  const DiscreteRadonMeasure xi =
      sc.instance.xi ? build_xi(sc.instance) : DiscreteRadonMeasure::dirac(DualBall(x, e.p()).positive_unit());
  const SNormSpace s(x, e, xi);
  const std::size_t n = x.dimension();

  Assertions checks;
  const InclusionReport inclusion = inclusion_bound_check(s, kAxiomSamples, sc.seed);
  checks.add("||f||_S <= xi(B)^{1/q} ||f||_X", inclusion.within_bound, inclusion.max_ratio - inclusion.bound);
  if (s.saturated()) {
    auto rng = make_rng(sc.seed, 2);
    double triangle = 0.0;
    for (std::size_t i = 0; i < kAxiomSamples; ++i) {
      const Vector f = random_vector(n, rng);
      const Vector g = random_vector(n, rng);
      Vector sum(n);
      for (std::size_t w = 0; w < n; ++w) sum[w] = f[w] + g[w];
      const double bound = s.evaluate(f) + s.evaluate(g);
      triangle = std::max(triangle, (s.evaluate(sum) - bound) / bound);
    }
    checks.add("S triangle inequality", triangle <= 1e-10, triangle);
  }

  RunResult r;
  json norms = json::array();
  for (std::size_t w = 0; w < n; ++w) {
    Vector f(n, 0.0);
    f[w] = 1.0;
    norms.push_back({{"f", f}, {"s_norm", s.evaluate(f)}, {"x_norm", x.evaluate(f)}});
  }
  const Vector ones(n, 1.0);
  norms.push_back({{"f", ones}, {"s_norm", s.evaluate(ones)}, {"x_norm", x.evaluate(ones)}});
  r.report["xi"] = to_json(xi);
  r.report["saturated"] = s.saturated();
  if (s.saturation().witness_atom) r.report["annihilated_atom"] = *s.saturation().witness_atom;
  r.report["norms"] = norms;
  r.report["inclusion"] = {{"max_ratio", inclusion.max_ratio}, {"bound", inclusion.bound}};
  r.report["assertions"] = checks.to_json();
  r.status = checks.passed() ? kExitPass : kExitFail;
  std::ostringstream summary;
  summary << "snorm-demo: " << xi.size() << " atom(s), " << (s.saturated() ? "saturated" : "NOT saturated");
  if (s.saturation().witness_atom) summary << " (atom " << *s.saturation().witness_atom << " annihilated)";
  summary << "\n";
  r.summary = summary.str() + checks.text();
  return r;
}

json certificate_json(const DominationCertificate& cert) {
  return {{"xi", to_json(cert.xi)},
          {"C", cert.constant},
          {"residual", cert.residual},
          {"iterations", cert.iterations},
          {"converged", cert.converged},
          {"mixed", cert.mixed},
          {"witnesses", cert.witnesses.size()},
          {"diagnostic", cert.diagnostic}};
}

std::string certificate_table(const DominationCertificate& cert) {
  std::ostringstream s;
  s << "  C          " << fmt(cert.constant) << "\n";
  s << "  residual   " << fmt(cert.residual) << "\n";
  s << "  iterations " << cert.iterations << "\n";
  s << "  converged  " << (cert.converged ? "yes" : "no") << "\n";
  s << "  xi atoms:\n";
  for (std::size_t k = 0; k < cert.xi.size(); ++k) {
    s << "    mass " << std::setw(14) << std::left << fmt(cert.xi.masses()[k]) << " h = (";
    const auto& h = cert.xi.atoms()[k].h;
    for (std::size_t w = 0; w < h.size(); ++w) s << (w ? ", " : "") << fmt(h[w]);
    s << ")\n";
  }
  if (!cert.diagnostic.empty()) s << "  note: " << cert.diagnostic << "\n";
  return s.str();
}

DominationOptions domination_options(const Scenario& sc) {
  DominationOptions o;
  o.tol = sc.tol;
  o.budget = search_budget(sc.budget);
  o.seed = sc.seed;
  return o;
}

RunResult factorize(const Scenario& sc) {
  const LinearOperator t = build_operator(sc.instance);
  const ExponentTriple e = build_exponents(sc.instance);
  auto grid = default_dual_grid(t.domain(), e.p(), kDefaultGridRandom, sc.seed);
  const DominationCertificate cert = find_domination_measure(t, e, std::move(grid), domination_options(sc));

  Assertions checks;
  checks.add("solver converged", cert.converged, cert.residual);
  const double verified = verify_domination(cert, t, e, kVerifySamples, derive_seed(sc.seed, 99));
  checks.add("verify_domination residual <= tol", verified <= sc.tol, verified);
  const SNormSpace s = certificate_space(cert, t.domain());
  checks.add("xi saturated", s.saturated(), s.saturated() ? 1.0 : 0.0);

  RunResult r;
  r.report["certificate"] = certificate_json(cert);
  r.report["verify_residual"] = verified;
  r.report["assertions"] = checks.to_json();
  r.status = checks.passed() ? kExitPass : kExitFail;
  r.summary = "factorize: p = " + fmt(e.p()) + ", q = " + fmt(e.q()) + "\n" + certificate_table(cert) + checks.text();
  return r;
}

RunResult kakutani(const Scenario& sc) {
  const LatticeNorm x = build_space(sc.instance);
  const ExponentTriple e = build_exponents(sc.instance);
  auto grid = default_dual_grid(x, e.p(), kDefaultGridRandom, sc.seed);
  const KakutaniResult k = kakutani_equivalence(x, e, std::move(grid), domination_options(sc));

  Assertions checks;
  checks.add("solver converged", k.certificate.converged, k.certificate.residual);
  checks.add("a <= b", k.lower <= k.upper, k.upper - k.lower);

  RunResult r;
  r.report["certificate"] = certificate_json(k.certificate);
  r.report["a"] = k.lower;
  r.report["b"] = k.upper;
  r.report["assertions"] = checks.to_json();
  r.status = checks.passed() ? kExitPass : kExitFail;
  r.summary = "kakutani: a = " + fmt(k.lower) + ", b = " + fmt(k.upper) + "\n" + certificate_table(k.certificate) +
              checks.text();
  return r;
}

RunResult lemma_verify(const Scenario& sc) {
  const int count = sc.instance.count.value_or(kDefaultSupCount);
  if (count < 0) throw InputError("count must be nonnegative");
  static const std::pair<double, double> kPairs[] = {{1, 1}, {1, 2}, {2, 2}, {2, 3}};
  double worst = 0.0;
  json cases = json::array();
  for (int i = 0; i < count; ++i) {
    auto rng = make_rng(sc.seed, 1000 + static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<std::size_t> atoms(1, 4);
    std::uniform_int_distribution<std::size_t> members(1, 3);
    std::uniform_int_distribution<int> pair(0, 3);
    std::uniform_real_distribution<double> weight(0.5, 2.0);
    std::uniform_real_distribution<double> extra(0.0, 2.0);
    const std::size_t n = atoms(rng);
    const std::size_t m = members(rng);
    const auto [p, q] = kPairs[pair(rng)];
    const double s = i % 4 == 0 ? p : p + extra(rng);
    Vector w(n);
    for (double& v : w) v = weight(rng);
    Family family;
    for (std::size_t j = 0; j < m; ++j) family.push_back(random_vector(n, rng));

    const LatticeNorm x = LatticeNorm::lebesgue(MeasureSpace(w), s);
    const ExponentTriple e(p, q);
    const auto grid = default_dual_grid(x, p, 0, sc.seed);
    const double lhs = family_sup_lhs(x, e, family).value;
    const double rhs = std::max(family_sup_rhs(x, e, family, grid),
                                std::pow(dual_family_argmax(x, e, family, grid).value, 1.0 / q));
    const double gap = rhs > 0.0 ? std::abs(lhs - rhs) / rhs : std::abs(lhs);
    worst = std::max(worst, gap);
    cases.push_back({{"n", n}, {"members", m}, {"s", s}, {"p", p}, {"q", q}, {"lhs", lhs}, {"rhs", rhs}, {"gap", gap}});
  }
  Assertions checks;
  checks.add("max relative gap <= 1e-6", worst <= kSupGap, worst);
  RunResult r;
  r.report["count"] = count;
  r.report["max_relative_gap"] = worst;
  r.report["cases"] = cases;
  r.report["assertions"] = checks.to_json();
  r.status = checks.passed() ? kExitPass : kExitFail;
  r.summary = "lemma-verify: " + std::to_string(count) + " instances, max relative gap " + fmt(worst) + "\n" +
              checks.text();
  return r;
}

}  // namespace

const std::vector<std::string>& scenario_commands() {
  static const std::vector<std::string> kCommands = {"check-space", "constants", "snorm-demo",
                                                     "factorize",   "kakutani",  "lemma-verify"};
  return kCommands;
}

Scenario make_scenario(std::string command, Instance instance, std::optional<std::uint64_t> seed,
                       std::optional<double> tol, std::optional<int> budget) {
  const auto& commands = scenario_commands();
  if (std::find(commands.begin(), commands.end(), command) == commands.end())
    throw InputError("unknown command '" + command + "'");
  Scenario sc;
  sc.command = std::move(command);
  sc.seed = seed.value_or(instance.seed.value_or(0));
  sc.tol = tol.value_or(instance.tol.value_or(1e-6));
  sc.budget = budget.value_or(instance.budget.value_or(SearchBudget{}.restarts));
  if (!(sc.tol > 0.0)) throw InputError("tol must be positive");
  if (sc.budget < 1) throw InputError("budget must be at least 1");
  sc.instance = std::move(instance);
  return sc;
}

RunResult run(const Scenario& sc) {
  RunResult r;
  if (sc.command == "check-space") r = check_space(sc);
  else if (sc.command == "constants") r = constants(sc);
  else if (sc.command == "snorm-demo") r = snorm_demo(sc);
  else if (sc.command == "factorize") r = factorize(sc);
  else if (sc.command == "kakutani") r = kakutani(sc);
  else if (sc.command == "lemma-verify") r = lemma_verify(sc);
  else throw InputError("unknown command '" + sc.command + "'");
  json report;
  report["schema"] = kSchema;
  report["command"] = sc.command;
  report["seed"] = sc.seed;
  report["tol"] = sc.tol;
  report["budget"] = sc.budget;
  report["status"] = r.status;
  report["instance"] = to_json(sc.instance);
  report["result"] = std::move(r.report);
  r.report = std::move(report);
  return r;
}

std::vector<Instance> generate_instances(const std::string& kind, int count, std::size_t n, std::uint64_t seed) {
  if (kind != "lebesgue-space" && kind != "random-operator" && kind != "partition-xi")
    throw InputError("unsupported instance kind '" + kind + "'");
  if (count < 0) throw InputError("count must be nonnegative");
  if (n < 1 || n > 12) throw InputError("n must lie in [1, 12]");
  std::vector<Instance> out;
  for (int i = 0; i < count; ++i) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> weight(0.5, 2.0);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    Instance in;
    Vector w(n);
    for (double& v : w) v = weight(rng);
    in.weights = w;
    in.seed = seed;
    if (kind == "lebesgue-space") {
      static const double kExponents[] = {1.0, 1.5, 2.0, 3.0};
      in.s = kExponents[std::uniform_int_distribution<int>(0, 3)(rng)];
      in.p = 1.0;
      in.q = 2.0;
    } else if (kind == "random-operator") {
      in.s = std::uniform_int_distribution<int>(0, 1)(rng) ? 2.0 : 1.0;
      std::vector<Vector> rows(n, Vector(n));
      for (auto& row : rows)
        for (double& v : row) v = entry(rng);
      in.matrix = rows;
      in.p = 1.0;
      in.q = 2.0;
    } else {
      in.s = std::uniform_int_distribution<int>(1, 2)(rng);
      in.p = *in.s;
      in.q = 2.0 * *in.p;
      const std::size_t blocks = std::uniform_int_distribution<std::size_t>(1, n)(rng);
      // Every block receives one atom first, so each is nonempty and all atoms are covered.
      std::vector<std::size_t> owner(n);
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t k = 0; k < n; ++k)
        owner[order[k]] = k < blocks ? k : std::uniform_int_distribution<std::size_t>(0, blocks - 1)(rng);
      std::vector<XiAtomSpec> atoms(blocks);
      double total = 0.0;
      for (auto& a : atoms) {
        a.h.assign(n, 0.0);
        a.mass = weight(rng);
        total += a.mass;
      }
      for (auto& a : atoms) a.mass /= total;
      for (std::size_t w_i = 0; w_i < n; ++w_i) atoms[owner[w_i]].h[w_i] = 1.0;
      in.xi = atoms;
    }
    out.push_back(std::move(in));
  }
  return out;
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"latfact: norms, constants and domination certificates on finite Banach lattices"};
  std::string command;
  std::string instance_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> budget;
  std::string kind;
  int count = 1;
  std::size_t n = 2;
  app.add_option("command", command,
                 "check-space | constants | snorm-demo | factorize | kakutani | lemma-verify | generate")
      ->required();
  app.add_option("--instance", instance_path, "instance JSON file");
  app.add_option("--seed", seed, "seed for every random choice");
  app.add_option("--tol", tol, "solver tolerance");
  app.add_option("--budget", budget, "search restarts");
  app.add_option("--out", out_path, "report path (directory for generate)");
  app.add_option("--kind", kind, "generate: lebesgue-space | random-operator | partition-xi");
  app.add_option("--count", count, "generate: number of instances");
  app.add_option("--n", n, "generate: number of atoms");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (command == "generate") {
      if (out_path.empty()) throw InputError("generate needs --out <directory>");
      const auto instances = generate_instances(kind, count, n, seed.value_or(0));
      std::filesystem::create_directories(out_path);
      for (std::size_t i = 0; i < instances.size(); ++i) {
        std::ostringstream name;
        name << kind << "-" << std::setw(3) << std::setfill('0') << i << ".json";
        const auto path = std::filesystem::path(out_path) / name.str();
        std::ofstream file(path);
        if (!file) throw InputError("cannot write " + path.string());
        file << to_json(instances[i]).dump(2) << "\n";
      }
      out << "generated " << instances.size() << " " << kind << " instance(s) in " << out_path << "\n";
      return kExitPass;
    }
    const auto& commands = scenario_commands();
    if (std::find(commands.begin(), commands.end(), command) == commands.end())
      throw InputError("unknown command '" + command + "'");
    if (instance_path.empty()) throw InputError(command + " needs --instance <path>");
    const Scenario sc = make_scenario(command, load_instance(instance_path), seed, tol, budget);
    const RunResult r = run(sc);
    const std::string text = r.report.dump(2) + "\n";
    if (out_path.empty()) {
      out << text;
      err << r.summary;
    } else {
      std::ofstream file(out_path);
      if (!file) throw InputError("cannot write " + out_path);
      file << text;
      out << r.summary;
    }
    return r.status;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace latfact
