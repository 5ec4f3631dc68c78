#include "joint_gradcheck.hpp"

#include "doctest.h"

using namespace hdh;
using namespace hdh::gradcheck;

TEST_CASE("analytic gradients match central differences (squared error)") {
  Fixture f = Fixture::make(NormKind::L2, 17);
  CheckStats stats = run_check(f, 40, 1e-5, 1e-4, 7);
  CHECK(stats.checked == 40);
  CHECK(stats.failed == 0);
  INFO("worst rel err ", stats.worst_rel_err);
  CHECK(stats.worst_rel_err < 1e-4);
}

TEST_CASE("analytic gradients match central differences (absolute error)") {
  Fixture f = Fixture::make(NormKind::L1, 23);
  CheckStats stats = run_check(f, 40, 1e-5, 1e-4, 9);
  CHECK(stats.failed == 0);
}

TEST_CASE("the analytic gradient is reproducible") {
  Fixture f = Fixture::make(NormKind::L2, 31);
  UNetGrads<double> g1 = f.analytic();
  UNetGrads<double> g2 = f.analytic();
  for (size_t i = 0; i < g1.down_w.size(); ++i)
    CHECK((g1.down_w[i] - g2.down_w[i]).cwiseAbs().maxCoeff() == 0.0);
  for (size_t i = 0; i < g1.up_w.size(); ++i)
    CHECK((g1.up_w[i] - g2.up_w[i]).cwiseAbs().maxCoeff() == 0.0);
}
