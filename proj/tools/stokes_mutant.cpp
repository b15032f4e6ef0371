#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "stokes_mutant/dubrovin.hpp"
#include "stokes_mutant/io.hpp"

using namespace sm;

namespace {

struct Variety {
  int pn = 0;
  std::vector<int> ci;

  void add(CLI::App* app) {
    auto* a = app->add_option("--pn", pn, "projective space P^n");
    auto* b = app->add_option("--ci", ci, "complete intersection: N d1 d2 ...")->expected(2, -1);
    a->excludes(b);
    b->excludes(a);
  }
  CompleteIntersection get() const {
    CompleteIntersection x;
    if (pn > 0) {
      x = CompleteIntersection::projective(pn);
    } else if (!ci.empty()) {
      x = CompleteIntersection{ci[0], std::vector<int>(ci.begin() + 1, ci.end())};
    } else {
      fail(ErrorKind::malformed, "give --pn N or --ci N d1 ...");
    }
    x.validate();
    return x;
  }
};

struct Numerics {
  double theta0 = 0.1;
  IntegratorConfig cfg;
  double tol_cmp = 1e-3;
  std::string convention = "auto";

  void add(CLI::App* app, bool compare) {
    app->add_option("--theta0", theta0, "reference direction (radians)");
    app->add_option("--order", cfg.order, "formal order at the matching radius");
    app->add_option("--rtol", cfg.rtol);
    app->add_option("--atol", cfg.atol);
    if (compare) {
      app->add_option("--tol-cmp", tol_cmp, "subspace and Gram comparison tolerance");
      app->add_option("--convention", convention, "Gamma convention")
          ->check(CLI::IsMember({"a", "b", "auto"}));
    }
  }
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty())
    std::cout << text;
  else
    write_text_file(out, text);
}

int cmd_validate(const std::string& path, double tol) {
  const Json j = read_json_file(path);
  const std::string k = kind_of(j);
  Report r;
  if (k == "stokes_data") {
    r = validate_stokes_data(stokes_from_json(j), tol);
  } else if (k == "mutation_system" || k == "asymptotic_frame") {
    r = validate_mutation_system(mutsys_from_json(j), tol);
  } else {
    fail(ErrorKind::malformed, "cannot validate kind '" + k + "'");
  }
  std::cout << r.text();
  std::cout << (r.ok() ? "valid\n" : "invalid\n");
  return r.ok() ? 0 : 1;
}

int cmd_mutate(const std::string& path, const std::string& word, const std::string& out) {
  const Json j = read_json_file(path);
  const std::string k = kind_of(j);
  if (k == "stokes_data") {
    const StokesData sd = stokes_from_json(j);
    check_shapes(sd);
    emit(out, dump(to_json(apply_braid(sd, BraidWord::parse(word, sd.m())))));
  } else if (k == "mutation_system") {
    const MutationSystem ms = mutsys_from_json(j);
    emit(out, dump(to_json(apply_braid(ms, BraidWord::parse(word, ms.m())))));
  } else {
    fail(ErrorKind::malformed, "cannot mutate kind '" + k + "'");
  }
  return 0;
}

int cmd_factor(const std::string& path, std::optional<double> theta0, const std::string& out) {
  const Json j = read_json_file(path);
  if (kind_of(j) != "stokes_multiplier") fail(ErrorKind::malformed, "expected kind 'stokes_multiplier'");
  const ExponentSet C = exponents_from_json(j.at("exponents"));
  std::vector<int> dims = j.at("dims").get<std::vector<int>>();
  const CMat g = matrix_from_json(j.at("g"));
  const double th = theta0 ? *theta0 : j.value("theta0", 0.1);
  const auto factors = factorize_stokes_multiplier(g, C, dims, th);
  Json a = Json::array();
  for (const auto& f : factors) a.push_back(Json{{"theta", f.theta}, {"g", to_json(f.g)}});
  emit(out, dump(Json{{"kind", "stokes_factors"}, {"theta0", th}, {"factors", a}}));
  return 0;
}

int cmd_info(const CompleteIntersection& ci, const std::string& out) {
  const auto ch = chern_integers(ci);
  Json j{{"kind", "fano_info"}, {"variety", ci.name()}, {"dim", ci.dim()}, {"index", ci.index()},
         {"degree", ci.degree()}, {"chern", ch}, {"euler", topological_euler(ci)},
         {"primitive_dim", ci.is_projective_space() ? 0 : primitive_dim(ci)}};
  if (ci.index() >= 2) {
    const auto C = exponents(ci);
    const double T = ci.index() * std::pow(ci.D(), 1.0 / ci.index());
    Json e = Json::array();
    for (const auto& x : C.entries()) e.push_back(Json{{"id", x.id}, {"value", to_json(x.value)}});
    j["T"] = T;
    j["exponents"] = e;
  }
  emit(out, dump(j));
  return 0;
}

int cmd_euler(const CompleteIntersection& ci, const std::string& out) {
  const int r = ci.index();
  Json rows = Json::array();
  for (int i = 0; i < r; ++i) {
    Json row = Json::array();
    for (int k = 0; k < r; ++k) row.push_back(euler_chi_hrr(ci, i, k));
    rows.push_back(row);
  }
  emit(out, dump(Json{{"kind", "euler_matrix"}, {"variety", ci.name()}, {"lines", r}, {"chi", rows}}));
  return 0;
}

GammaChoice convention_of(const std::string& s) {
  if (s == "a") return {GammaConvention::todd, true};
  if (s == "auto") {
    const auto res = resolve_gamma_convention({CompleteIntersection::projective(2), {4, {3}}}, 8, 5);
    if (!res.unique) fail(ErrorKind::numerical, "Gamma convention is not determined:\n" + res.text());
    return res.selected;
  }
  return {GammaConvention::sqrt_todd, true};
}

int cmd_gamma_basis(const CompleteIntersection& ci, const std::string& conv, const std::string& out) {
  const CohomologyModel X(ci);
  const GammaChoice g = convention_of(conv);
  const CMat G = gamma_matrix(X, g);
  Json lines = Json::array();
  for (int k = 0; k < std::max(1, ci.index()); ++k) {
    const CVec nu = mukai_vector(X, k);
    lines.push_back(Json{{"k", k}, {"mukai", to_json(CMat(nu))}, {"gamma_ch", to_json(CMat(gamma_ch(X, k)))},
                         {"gamma_of_mukai", to_json(CMat(G * nu))}});
  }
  emit(out, dump(Json{{"kind", "gamma_basis"}, {"variety", ci.name()}, {"convention", g.str()},
                      {"basis", "1, H, ..., H^d, then primitive"}, {"gamma", to_json(G)}, {"lines", lines}}));
  return 0;
}

int cmd_stokes(const CompleteIntersection& ci, const Numerics& nm, const std::string& out) {
  const QuantumData q(ci);
  AsymptoticSolver s(q, nm.cfg, Exec::parallel);
  const AsymptoticFrame fr = asymptotic_classes(s, nm.theta0);
  const MutationSystem ms = fr.system();
  const Report r = validate_mutation_system(ms, 1e-8);
  Json j = to_json(fr);
  j["variety"] = ci.name();
  j["gram"] = to_json(gram_matrix(ms));
  j["monodromy"] = to_json(derive_T(ms));
  j["valid"] = r.ok();
  emit(out, dump(j));
  if (!r.ok()) {
    std::cerr << r.text();
    return 2;
  }
  return 0;
}

int cmd_check(const CompleteIntersection& ci, const Numerics& nm, const std::string& out,
              const std::string& report) {
  DubrovinOptions opt;
  opt.theta0 = nm.theta0;
  opt.cfg = nm.cfg;
  opt.tol_cmp = nm.tol_cmp;
  opt.convention = nm.convention == "a"   ? DubrovinOptions::Convention::a
                   : nm.convention == "b" ? DubrovinOptions::Convention::b
                                          : DubrovinOptions::Convention::automatic;
  const DubrovinReport rep = dubrovin_check(ci, opt);
  const std::string md = rep.markdown();
  if (!report.empty()) write_text_file(report, md);
  if (!out.empty()) write_text_file(out, dump(to_json(rep)));
  std::cout << md;
  return rep.verdict ? 0 : 1;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::numerical: return 2;
    case ErrorKind::malformed: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mutation systems, Stokes data and the Dubrovin-type check"};
  app.require_subcommand(1);

  auto* mut = app.add_subcommand("mutsys", "mutation systems and Stokes data files");
  mut->require_subcommand(1);
  std::string path, word, out, report;
  double tol = kTolLin;
  std::optional<double> theta_opt;
  auto* validate = mut->add_subcommand("validate", "check the invariants of a file");
  validate->add_option("path", path)->required();
  validate->add_option("--tol", tol);
  auto* mutate = mut->add_subcommand("mutate", "apply a braid word (s1 s2^-1 delta ...)");
  mutate->add_option("path", path)->required();
  mutate->add_option("--word", word)->required();
  mutate->add_option("--out", out);
  auto* factor = mut->add_subcommand("factor", "factor a Stokes multiplier");
  factor->add_option("path", path)->required();
  factor->add_option("--theta0", theta_opt);
  factor->add_option("--out", out);

  Variety var;
  Numerics nm;
  std::string convention = "b";
  auto* fano = app.add_subcommand("fano", "classical data of a Fano complete intersection");
  fano->require_subcommand(1);
  auto* info = fano->add_subcommand("info");
  auto* euler = fano->add_subcommand("euler-matrix");
  auto* gbasis = fano->add_subcommand("gamma-basis");
  for (auto* c : {info, euler, gbasis}) {
    var.add(c);
    c->add_option("--out", out);
  }
  gbasis->add_option("--convention", convention)->check(CLI::IsMember({"a", "b", "auto"}));

  auto* stokes = app.add_subcommand("stokes", "A side from the quantum connection");
  stokes->require_subcommand(1);
  auto* compute = stokes->add_subcommand("compute", "asymptotic frame at theta0");
  var.add(compute);
  nm.add(compute, false);
  compute->add_option("--out", out);

  auto* dub = app.add_subcommand("dubrovin", "compare the A and B mutation systems");
  dub->require_subcommand(1);
  auto* check = dub->add_subcommand("check");
  var.add(check);
  nm.add(check, true);
  check->add_option("--out", out, "JSON report");
  check->add_option("--report", report, "markdown report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (validate->parsed()) return cmd_validate(path, tol);
    if (mutate->parsed()) return cmd_mutate(path, word, out);
    if (factor->parsed()) return cmd_factor(path, theta_opt, out);
    if (info->parsed()) return cmd_info(var.get(), out);
    if (euler->parsed()) return cmd_euler(var.get(), out);
    if (gbasis->parsed()) return cmd_gamma_basis(var.get(), convention, out);
    if (compute->parsed()) return cmd_stokes(var.get(), nm, out);
    if (check->parsed()) return cmd_check(var.get(), nm, out, report);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
