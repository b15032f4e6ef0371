#include "stokes_mutant/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace sm {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::malformed, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(fmt::format("missing field '{}'", key));
  return j.at(key);
}

Json ids(const ExponentSet& C, const Ordering& tau) {
  Json a = Json::array();
  for (int c : tau.seq) a.push_back(C[c].id);
  return a;
}

Ordering ordering_from_json(const Json& j, const ExponentSet& C) {
  if (!j.is_array() || static_cast<int>(j.size()) != C.size()) bad("tau must list every exponent id once");
  Ordering o;
  std::vector<int> seen(C.size(), 0);
  for (const auto& e : j) {
    if (!e.is_string()) bad("tau entries must be exponent ids");
    int c = 0;
    while (c < C.size() && C[c].id != e.get<std::string>()) ++c;
    if (c == C.size() || seen[c]++) bad("tau must list every exponent id once");
    o.seq.push_back(c);
  }
  return o;
}

std::vector<int> ints(const Json& j) {
  if (!j.is_array()) bad("expected an integer array");
  std::vector<int> v;
  for (const auto& e : j) {
    if (!e.is_number_integer()) bad("expected an integer array");
    v.push_back(e.get<int>());
  }
  return v;
}

Json tuple_json(const DirectionTuple& t, const ExponentSet& C) {
  Json o = Json::object();
  for (int c = 0; c < C.size(); ++c) o[C[c].id] = t.per_exponent[c];
  return o;
}

}  // namespace

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMat& m) {
  Json data = Json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k) data.push_back(to_json(m(i, k)));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Json to_json(const ExponentSet& C) {
  Json a = Json::array();
  for (const auto& e : C.entries()) a.push_back(Json{{"id", e.id}, {"value", to_json(e.value)}});
  return a;
}

Json to_json(const StokesData& sd) {
  Json j{{"kind", "stokes_data"}, {"exponents", to_json(sd.C)}, {"tau", ids(sd.C, sd.tau)},
         {"T", to_json(sd.T)}};
  Json blocks = Json::array();
  for (int c = 0; c < sd.m(); ++c) {
    Json b{{"id", sd.C[c].id}, {"T", to_json(sd.Tc[c])}, {"f", to_json(sd.f[c])},
           {"fstar", to_json(sd.fstar[c])}};
    if (!sd.block_grading.empty()) b["grading"] = sd.block_grading[c];
    blocks.push_back(std::move(b));
  }
  j["blocks"] = std::move(blocks);
  if (!sd.grading.empty()) j["grading"] = sd.grading;
  return j;
}

Json to_json(const MutationSystem& ms) {
  Json j{{"kind", "mutation_system"}, {"side", ms.side}, {"exponents", to_json(ms.C)},
         {"tau", ids(ms.C, ms.tau)}, {"P", to_json(ms.P)}};
  Json blocks = Json::array();
  for (int c = 0; c < ms.m(); ++c) {
    Json b{{"id", ms.C[c].id}, {"f", to_json(ms.f[c])}};
    if (!ms.block_grading.empty()) b["grading"] = ms.block_grading[c];
    blocks.push_back(std::move(b));
  }
  j["blocks"] = std::move(blocks);
  if (!ms.grading.empty()) j["grading"] = ms.grading;
  return j;
}

Json to_json(const AsymptoticFrame& fr) {
  const MutationSystem ms = fr.system();
  Json j = to_json(ms);
  j["kind"] = "asymptotic_frame";
  Json prov{{"single_direction", fr.single},
            {"theta", tuple_json(fr.tuple, fr.C)},
            {"order", ids(fr.C, fr.tau)},
            {"outer_radius", fr.R},
            {"rtol", fr.cfg.rtol},
            {"atol", fr.cfg.atol},
            {"formal_order", fr.cfg.order},
            {"exponent_values", "numeric; -T omega_k with T = r D^(1/r), 0 for the residual"}};
  Json radii = Json::object();
  for (int c = 0; c < fr.C.size(); ++c)
    if (fr.matching[c] > 0) radii[fr.C[c].id] = fr.matching[c];
  prov["matching_radii"] = radii;
  j["provenance"] = prov;
  return j;
}

Json to_json(const DubrovinReport& rep) {
  auto dist = [](const std::vector<BlockDistance>& v) {
    Json a = Json::array();
    for (const auto& d : v)
      a.push_back(Json{{"id", d.id}, {"dim_a", d.dim_a}, {"dim_b", d.dim_b}, {"distance", d.distance}});
    return a;
  };
  auto inv = [&](const std::vector<InversionCheck>& v) {
    Json a = Json::array();
    auto names = [&](const std::vector<int>& s) {
      Json x = Json::array();
      for (int c : s) x.push_back(rep.C[c].id);
      return x;
    };
    for (const auto& c : v)
      a.push_back(Json{{"id", c.id}, {"lhs", names(c.lhs)}, {"rhs", names(c.rhs)},
                       {"closed_form", names(c.closed)}, {"ok", c.ok()}});
    return a;
  };
  Json j{{"kind", "dubrovin_report"},
         {"variety", rep.variety},
         {"theta0", rep.theta0},
         {"gamma", rep.gamma.str()},
         {"gamma_note", rep.gamma_note},
         {"theta_bullet", tuple_json(rep.theta_bullet, rep.C)},
         {"phi_bullet", tuple_json(rep.phi_bullet, rep.C)},
         {"order_theta0", rep.order_theta0},
         {"order_bullet", rep.order_bullet},
         {"s", rep.s_word.str()},
         {"s_prime", rep.s_prime_word.str()},
         {"sigma", rep.sigma.str()},
         {"distances_theta0", dist(rep.at_theta0)},
         {"distances_bullet", dist(rep.at_bullet)},
         {"transport_phi", rep.transport_phi},
         {"transport_bullet", rep.transport_bullet},
         {"line_ids", rep.line_ids},
         {"gram_a", to_json(rep.gram_a)},
         {"gram_b", to_json(rep.gram_b)},
         {"gram_distance", rep.gram_distance},
         {"residual_consistency", rep.residual_consistency},
         {"inversions_first", inv(rep.inversions1)},
         {"inversions_second", inv(rep.inversions2)},
         {"tolerances", Json{{"cmp", rep.tol_cmp}, {"residual", rep.tol_residual},
                             {"rtol", rep.cfg.rtol}, {"atol", rep.cfg.atol},
                             {"formal_order", rep.cfg.order}}},
         {"integrations", rep.integrations},
         {"verdict", rep.verdict ? "pass" : "fail"}};
  return j;
}

cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad("complex numbers are [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

CMat matrix_from_json(const Json& j) {
  const Json& r = field(j, "rows");
  const Json& c = field(j, "cols");
  const Json& d = field(j, "data");
  if (!r.is_number_integer() || !c.is_number_integer() || r.get<long>() < 0 || c.get<long>() < 0)
    bad("matrix rows/cols must be nonnegative integers");
  const int rows = r.get<int>(), cols = c.get<int>();
  if (!d.is_array() || d.size() != static_cast<size_t>(rows) * cols)
    bad(fmt::format("matrix data must hold {}x{} entries", rows, cols));
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = complex_from_json(d[i * cols + k]);
  return m;
}

ExponentSet exponents_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) bad("exponents must be a nonempty array");
  std::vector<Exponent> e;
  for (const auto& x : j) {
    const Json& id = field(x, "id");
    if (!id.is_string()) bad("exponent id must be a string");
    e.push_back({id.get<std::string>(), complex_from_json(field(x, "value"))});
  }
  try {
    return ExponentSet(std::move(e));
  } catch (const Error& err) {
    bad(err.what());
  }
}

namespace {
template <class F>
void for_blocks(const Json& j, const ExponentSet& C, F&& each) {
  const Json& blocks = field(j, "blocks");
  if (!blocks.is_array() || static_cast<int>(blocks.size()) != C.size())
    bad("one block per exponent is required");
  for (int c = 0; c < C.size(); ++c) {
    const Json& id = field(blocks[c], "id");
    if (!id.is_string() || id.get<std::string>() != C[c].id)
      bad("blocks must follow the order of the exponent list");
    each(c, blocks[c]);
  }
}
}  // namespace

StokesData stokes_from_json(const Json& j) {
  if (kind_of(j) != "stokes_data") bad("expected kind 'stokes_data'");
  StokesData sd;
  sd.C = exponents_from_json(field(j, "exponents"));
  sd.tau = ordering_from_json(field(j, "tau"), sd.C);
  sd.T = matrix_from_json(field(j, "T"));
  const int m = sd.C.size();
  sd.Tc.resize(m);
  sd.f.resize(m);
  sd.fstar.resize(m);
  bool graded = false;
  std::vector<std::vector<int>> bg(m);
  for_blocks(j, sd.C, [&](int c, const Json& b) {
    sd.Tc[c] = matrix_from_json(field(b, "T"));
    sd.f[c] = matrix_from_json(field(b, "f"));
    sd.fstar[c] = matrix_from_json(field(b, "fstar"));
    if (b.contains("grading")) {
      graded = true;
      bg[c] = ints(b["grading"]);
    }
  });
  if (graded) sd.block_grading = bg;
  if (j.contains("grading")) sd.grading = ints(j["grading"]);
  return sd;
}

MutationSystem mutsys_from_json(const Json& j) {
  const std::string k = kind_of(j);
  if (k != "mutation_system" && k != "asymptotic_frame") bad("expected kind 'mutation_system'");
  MutationSystem ms;
  const Json& side = field(j, "side");
  if (!side.is_string()) bad("side must be a string");
  ms.side = side.get<std::string>();
  ms.C = exponents_from_json(field(j, "exponents"));
  ms.tau = ordering_from_json(field(j, "tau"), ms.C);
  ms.P = matrix_from_json(field(j, "P"));
  const int m = ms.C.size();
  ms.f.resize(m);
  bool graded = false;
  std::vector<std::vector<int>> bg(m);
  for_blocks(j, ms.C, [&](int c, const Json& b) {
    ms.f[c] = matrix_from_json(field(b, "f"));
    if (b.contains("grading")) {
      graded = true;
      bg[c] = ints(b["grading"]);
    }
  });
  if (graded) ms.block_grading = bg;
  if (j.contains("grading")) ms.grading = ints(j["grading"]);
  return ms;
}

namespace {
bool flat(const Json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j)
    if (e.is_structured() && !(e.is_array() && e.size() <= 2 && flat(e))) return false;
  return true;
}

void write(const Json& j, int indent, std::string& s) {
  const std::string pad(indent + 2, ' ');
  if (j.is_object() && !j.empty()) {
    s += "{\n";
    size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      s += pad + Json(it.key()).dump() + ": ";
      write(it.value(), indent + 2, s);
      s += i + 1 < j.size() ? ",\n" : "\n";
    }
    s += std::string(indent, ' ') + "}";
  } else if (j.is_array() && !j.empty() && !flat(j)) {
    s += "[\n";
    for (size_t i = 0; i < j.size(); ++i) {
      s += pad;
      write(j[i], indent + 2, s);
      s += i + 1 < j.size() ? ",\n" : "\n";
    }
    s += std::string(indent, ' ') + "]";
  } else {
    s += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
  }
}
}  // namespace

// Objects and nested arrays one entry per line; arrays of scalars and of
// [re, im] pairs stay on one line.
std::string dump(const Json& j) {
  std::string s;
  write(j, 0, s);
  return s + "\n";
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::validation, "cannot write " + path);
  out << text;
}

std::string kind_of(const Json& j) {
  const Json& k = field(j, "kind");
  if (!k.is_string()) bad("kind must be a string");
  return k.get<std::string>();
}

}  // namespace sm
