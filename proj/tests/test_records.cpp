#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "mvac/errors.hpp"
#include "mvac/records.hpp"

using namespace mvac;
using nlohmann::json;

TEST(Records, VacuumSolutionJson) {
    const auto j = json::parse(to_json(bs_vacuum_exact(MarketParams(0.05, 0.04), 2)));
    EXPECT_EQ(j["regime"], "exact");
    EXPECT_EQ(j["roots"].size(), 2u);
    EXPECT_EQ(j["roots"][0]["phi_x"].get<double>(), 1.6770329614269008);
    EXPECT_TRUE(j["roots"][0]["phi_y"].is_null());
    EXPECT_EQ(j["symmetry"]["price"], "broken");
    EXPECT_TRUE(j["symmetry"]["volatility"].is_null());
    EXPECT_EQ(j["flags"]["approximate"], false);
}

TEST(Records, VacuumCsvMarksArbitraryFields) {
    const MGParams p{.r = 0.05, .lambda = 0.01, .mu = 0.02, .zeta = 0.1, .alpha = 1.0};
    std::ostringstream out;
    write_csv(out, mg_case_solver(p, std::log(0.04), 1, 0));
    EXPECT_EQ(out.str(),
              "regime,n,m,phi_x,phi_y,degeneracy,approximate\n"
              "case,1,0,0.5999999999999999,arbitrary,1,false\n");
    std::ostringstream bs;
    write_csv(bs, bs_vacuum_strong(MarketParams(0.05, 0.04), 2));
    EXPECT_EQ(bs.str(),
              "regime,n,m,phi_x,phi_y,degeneracy,approximate\n"
              "strong-field,2,,0,,1,true\n"
              "strong-field,2,,1.2000000000000002,,1,true\n");
}

TEST(Records, MartingaleReportRecordAndJson) {
    MartingaleReport r{.residual_max = 1e-9, .residual_l2 = 2e-9, .h = 0.01, .tolerance = 1e-3,
                       .rows_checked = 7, .pass = true};
    std::ostringstream out;
    write_record(out, to_record(r));
    EXPECT_EQ(out.str(),
              "residual_max=1e-09\nresidual_l2=2e-09\nh=0.01\ntolerance=0.001\n"
              "rows_checked=7\nverdict=pass\n");
    EXPECT_EQ(json::parse(to_json(r))["verdict"], "pass");
}

TEST(Records, OtherDocuments) {
    EXPECT_EQ(json::parse(error_json("no-root", "x"))["error"], "no-root");
    const auto reg = json::parse(to_json(classify_information_flow(MarketParams(0.05, 0.1))));
    EXPECT_EQ(reg["information_flow"], "preserved");
    EXPECT_EQ(reg["params"]["model"], "bs");
    const ConstraintRoot c{.y_star = -3.0, .residual = 0.0, .bracket_lo = -6.0, .bracket_hi = 0.0,
                           .iterations = 9};
    EXPECT_EQ(json::parse(to_json(c))["bracket"][0], -6.0);
    ConsistencyReport k;
    k.kind = ConsistencyReport::Kind::ParameterIdentity;
    EXPECT_EQ(json::parse(to_json(k))["kind"], "parameter-identity");
}

TEST(Records, CurveCsv) {
    const Grid1D g(0.0, 1.0, 3);
    std::ostringstream out;
    write_curve_csv(out, StateVector(g, {1.0, 2.0, 3.0}));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,S,value");
    std::getline(in, line);
    EXPECT_EQ(line, "0,1,1");
    const Grid2D g2(g, g);
    EXPECT_THROW(write_curve_csv(out, sample_extended_martingale_state(g2)), InvalidInput);
}
