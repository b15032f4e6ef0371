#include <random>

#include "doctest.h"
#include "stokes_mutant/io.hpp"

using namespace sm;

namespace {
ErrorKind kind_of_failure(const std::string& text) {
  try {
    mutsys_from_json(parse_json(text));
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::structural;
}
}  // namespace

TEST_SUITE("io") {

TEST_CASE("complex and matrix encoding") {
  CHECK(dump(to_json(cplx(1.5, -2))) == "[1.5,-2.0]\n");
  CMat m(2, 3);
  m << 1, 2, 3, cplx(0, 1), 5, 6;
  const Json j = to_json(m);
  CHECK(j["rows"] == 2);
  CHECK(j["data"][3][1] == 1.0);  // row-major: (1,0) is the fourth entry
  CHECK(matrix_from_json(j) == m);
  CHECK(matrix_from_json(to_json(CMat(4, 0))).rows() == 4);
}

TEST_CASE("byte-identical round trip") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto sd = random_stokes_data(rng, {1, 2, 1});
    const std::string a = dump(to_json(sd));
    const StokesData back = stokes_from_json(parse_json(a));
    CHECK(dump(to_json(back)) == a);
    CHECK(stokes_diff(sd, back) == 0.0);
    const auto ms = random_mutation_system(rng, {2, 1});
    const std::string b = dump(to_json(ms));
    CHECK(dump(to_json(mutsys_from_json(parse_json(b)))) == b);
  }
  const auto bsys = build_b_mutation_system(CompleteIntersection{4, {3}},
                                            center_tuple(exponents({4, {3}}), 2, 0.1));
  const std::string c = dump(to_json(bsys));
  const MutationSystem back = mutsys_from_json(parse_json(c));
  CHECK(dump(to_json(back)) == c);
  CHECK(back.side == "B");
  CHECK(back.block_grading == bsys.block_grading);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_json("{\"kind\": "), Error);
  CHECK(kind_of_failure("{\"kind\": \"stokes_data\"}") == ErrorKind::malformed);
  CHECK(kind_of_failure("{\"side\": \"\"}") == ErrorKind::malformed);
  const std::string ok = dump(to_json(build_b_mutation_system(
      CompleteIntersection::projective(1), center_tuple(exponents(CompleteIntersection::projective(1)), 2, 0.1))));
  CHECK_NOTHROW(mutsys_from_json(parse_json(ok)));
  Json j = parse_json(ok);
  j["tau"][0] = "nope";
  CHECK(kind_of_failure(j.dump()) == ErrorKind::malformed);
  j = parse_json(ok);
  j["P"]["rows"] = 3;
  CHECK(kind_of_failure(j.dump()) == ErrorKind::malformed);
  j = parse_json(ok);
  j["blocks"][0]["f"]["data"][0] = Json::array({1, 2, 3});
  CHECK(kind_of_failure(j.dump()) == ErrorKind::malformed);
  j = parse_json(ok);
  std::swap(j["blocks"][0], j["blocks"][1]);
  CHECK(kind_of_failure(j.dump()) == ErrorKind::malformed);
}

}  // TEST_SUITE
