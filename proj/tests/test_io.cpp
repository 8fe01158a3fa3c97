#include <gtest/gtest.h>

#include <cstdio>
#include <functional>
#include <sstream>

#include "hyperbell/hyperbell.hpp"

using namespace hyperbell;

namespace {

void expect_error_containing(const std::function<void()>& fn, const std::string& needle) {
  try {
    fn();
    FAIL() << "expected an error mentioning '" << needle << "'";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
        << "actual message: " << e.what();
  }
}

}

TEST(FunctionalJson, RoundTripPreservesEverything) {
  BellFunctional f = builtin_i18();
  json j = functional_to_json(f);
  BellFunctional g = functional_from_json(j, "test");
  EXPECT_EQ(g.name, f.name);
  EXPECT_EQ(g.nA, f.nA);
  EXPECT_EQ(g.nB, f.nB);
  EXPECT_LT((g.joint - f.joint).norm(), 1e-15);
  EXPECT_LT((g.margA - f.margA).norm(), 1e-15);
  EXPECT_LT((g.margB - f.margB).norm(), 1e-15);
  EXPECT_EQ(g.constant, f.constant);
  ASSERT_TRUE(g.bound_local && g.bound_qubit && g.bound_apparatus_max &&
              g.bound_quantum);
  EXPECT_EQ(*g.bound_local, *f.bound_local);
  EXPECT_EQ(*g.bound_qubit, *f.bound_qubit);
  EXPECT_EQ(*g.bound_apparatus_max, *f.bound_apparatus_max);
  EXPECT_EQ(*g.bound_quantum, *f.bound_quantum);
  EXPECT_EQ(j.at("schema_version").get<std::string>(), kSchemaVersion);
}

TEST(FunctionalJson, FileRoundTrip) {
  std::string path = "test_io_functional.json";
  save_functional(builtin_chsh(), path);
  BellFunctional g = load_functional(path);
  EXPECT_EQ(g.name, builtin_chsh().name);
  EXPECT_LT((g.joint - builtin_chsh().joint).norm(), 1e-15);
  EXPECT_EQ(g.constant, builtin_chsh().constant);
  std::remove(path.c_str());
  expect_error_containing([&] { load_functional(path); }, "cannot open");
}

TEST(FunctionalJson, ErrorsNameTheOffendingField) {
  json good = functional_to_json(builtin_i18());

  json j = good;
  j.erase("margA");
  expect_error_containing([&] { functional_from_json(j, "ctx"); }, "margA");

  j = good;
  j["joint"][1][2] = "oops";
  expect_error_containing([&] { functional_from_json(j, "ctx"); }, "(1,2)");

  j = good;
  j["margB"][0] = "x";
  expect_error_containing([&] { functional_from_json(j, "ctx"); }, "margB");

  j = good;
  j["nA"] = 0;
  expect_error_containing([&] { functional_from_json(j, "ctx"); }, "positive");

  j = good;
  j["joint"] = json::array();
  expect_error_containing([&] { functional_from_json(j, "ctx"); }, "joint");
}

TEST(FunctionalJson, BoundsAreOptionalButOrdered) {
  json j = functional_to_json(builtin_i18());
  j.erase("bounds");
  BellFunctional g = functional_from_json(j, "ctx");
  EXPECT_FALSE(g.bound_local.has_value());
  EXPECT_FALSE(g.bound_quantum.has_value());

  j = functional_to_json(builtin_i18());
  j["bounds"]["qubit"] = -1.0;  // below the local bound
  expect_error_containing([&] { functional_from_json(j, "ctx"); },
                          "local <= qubit <= quantum");
}

TEST(FunctionalJson, ZeroConstantIsOmitted) {
  BellFunctional f = builtin_i18();
  EXPECT_FALSE(functional_to_json(f).contains("constant"));
  BellFunctional g = functional_from_json(functional_to_json(f), "ctx");
  EXPECT_EQ(g.constant, 0.0);
  EXPECT_TRUE(functional_to_json(builtin_chsh()).contains("constant"));
}

TEST(SettingsJson, DegreesOnDiskRadiansInMemory) {
  AnalyzerSettings s;
  s.hwp1 = 30.0 * kDegree;
  s.qwp1 = 45.0 * kDegree;
  s.hwp2 = 12.5 * kDegree;
  s.hwp3 = 7.0 * kDegree;
  json j = settings_to_json(s);
  EXPECT_NEAR(j.at("hwp1").get<double>(), 30.0, 1e-12);
  EXPECT_NEAR(j.at("qwp1").get<double>(), 45.0, 1e-12);
  EXPECT_NEAR(j.at("qwp3").get<double>(), 0.0, 1e-12);
  AnalyzerSettings r = settings_from_json(j, "ctx");
  EXPECT_NEAR(r.hwp1, s.hwp1, 1e-15);
  EXPECT_NEAR(r.hwp2, s.hwp2, 1e-15);
  EXPECT_NEAR(r.hwp3, s.hwp3, 1e-15);
  expect_error_containing([&] { settings_from_json(json::object(), "ctx"); },
                          "hwp1");
}

TEST(SettingsJson, PlanRoundTripWithValue) {
  MeasurementPlan pa = reference_plan_a(), pb = reference_plan_b();
  json j = plan_to_json(pa, pb, 0.458337075596);
  LoadedPlans lp = plans_from_json(j, "ctx");
  ASSERT_EQ(lp.planA.settings.size(), pa.settings.size());
  ASSERT_EQ(lp.planB.settings.size(), pb.settings.size());
  for (std::size_t i = 0; i < pa.settings.size(); ++i) {
    EXPECT_NEAR(lp.planA.settings[i].hwp1, pa.settings[i].hwp1, 1e-12);
    EXPECT_NEAR(lp.planA.settings[i].hwp2, pa.settings[i].hwp2, 1e-12);
  }
  EXPECT_NEAR(lp.value, 0.458337075596, 1e-15);

  // The loaded plans must reproduce the working-point value exactly.
  Vec psi = make_state({Family::psi4});
  lp.planA.mode = lp.planB.mode = OutcomeMode::detector1_vs_rest;
  double v = evaluate_on_state(builtin_i18(), psi, lp.planA, lp.planB);
  EXPECT_NEAR(v, 0.458337075596, 1e-9);
}

TEST(TableWriter, CsvBytesAreDeterministic) {
  auto make = [] {
    TableWriter w("csv", {"x", "value"});
    w.header("version", kVersion);
    w.header("seed", "7");
    w.row({"0.5", "1.25"});
    w.row({"1", format_double(0.458337075596)});
    std::ostringstream os;
    w.write(os);
    return os.str();
  };
  std::string text = make();
  EXPECT_EQ(text, make());
  std::string expected = std::string("# version: ") + kVersion +
                         "\n# seed: 7\nx,value\n0.5,1.25\n1,0.458337075596\n";
  EXPECT_EQ(text, expected);
}

TEST(TableWriter, JsonCarriesHeaderColumnsRows) {
  TableWriter w("json", {"a", "b"});
  w.header("seed", "3");
  w.row({"1", "2"});
  std::ostringstream os;
  w.write(os);
  json j = json::parse(os.str());
  EXPECT_EQ(j.at("header").at("seed").get<std::string>(), "3");
  EXPECT_EQ(j.at("columns").size(), 2u);
  EXPECT_EQ(j.at("rows")[0][1].get<std::string>(), "2");
}

TEST(TableWriter, RejectsBadFormatAndRaggedRows) {
  EXPECT_THROW(TableWriter("xml", {"a"}), std::invalid_argument);
  TableWriter w("csv", {"a", "b"});
  EXPECT_THROW(w.row({"1"}), std::invalid_argument);
}

TEST(FormatDouble, TwelveSignificantDigits) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0.458337075596), "0.458337075596");
  EXPECT_EQ(format_double(-1.875), "-1.875");
  EXPECT_EQ(format_double(2.0 * std::sqrt(2.0)), "2.82842712475");
}
