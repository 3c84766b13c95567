#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mvac/config.hpp"
#include "mvac/errors.hpp"
#include "mvac/io.hpp"
#include "oracles.hpp"

using namespace mvac;

TEST(KeyValueConfig, ParsesCommentsAndWhitespace) {
    const auto cfg = KeyValueConfig::parse("# market\n r = 0.05 \n\nsigma_sq=0.04\nlabel = a b\n");
    EXPECT_DOUBLE_EQ(cfg.get_double("r"), 0.05);
    EXPECT_DOUBLE_EQ(cfg.get_double("sigma_sq"), 0.04);
    EXPECT_EQ(cfg.get("label").value(), "a b");
    EXPECT_FALSE(cfg.get("missing").has_value());
    EXPECT_DOUBLE_EQ(cfg.get_double("missing", 7.0), 7.0);
    EXPECT_THROW((void)cfg.get_double("missing"), InvalidInput);
    EXPECT_THROW((void)cfg.get_double("label"), InvalidInput);
}

TEST(KeyValueConfig, RejectsMalformedInput) {
    EXPECT_THROW(KeyValueConfig::parse("no equals sign\n"), InvalidInput);
    EXPECT_THROW(KeyValueConfig::parse("r = 1\nr = 2\n"), InvalidInput);
    EXPECT_THROW(KeyValueConfig::parse(" = 3\n"), InvalidInput);
}

TEST(KeyValueConfig, WriteThenParseRoundTrips) {
    KeyValueConfig cfg;
    cfg.set("r", format_number(0.1 + 0.2));
    cfg.set("n_points", "801");
    std::ostringstream out;
    cfg.write(out);
    const auto back = KeyValueConfig::parse(out.str());
    EXPECT_EQ(back.entries(), cfg.entries());
    EXPECT_EQ(back.get_double("r"), 0.1 + 0.2);
    EXPECT_EQ(back.get_int("n_points"), 801);
}

TEST(KeyValueConfig, BuildsDomainObjects) {
    const auto cfg = KeyValueConfig::parse(
        "r = 0.05\nsigma_sq = 0.04\nlambda = 0.01\nzeta = 0.1\n"
        "x_min = -2\nx_max = 2\nn_points = 41\ny_min = -4\ny_max = -2\nm_points = 21\n");
    EXPECT_EQ(market_params_from(cfg), MarketParams(0.05, 0.04));
    const auto mg = mg_params_from(cfg);
    EXPECT_DOUBLE_EQ(mg.lambda, 0.01);
    EXPECT_DOUBLE_EQ(mg.mu, 0.0);
    EXPECT_DOUBLE_EQ(mg.alpha, 1.0);
    EXPECT_EQ(grid1d_from(cfg), Grid1D(-2.0, 2.0, 41));
    const auto g2 = grid2d_from(cfg);
    EXPECT_EQ(g2.y_axis(), Grid1D(-4.0, -2.0, 21));
}

TEST(KeyValueConfig, LoadsFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "mvac_cfg_test.cfg";
    {
        std::ofstream f(path);
        f << "r = 0.03\n";
    }
    EXPECT_DOUBLE_EQ(KeyValueConfig::load(path).get_double("r"), 0.03);
    std::filesystem::remove(path);
    EXPECT_THROW(KeyValueConfig::load(path), InvalidInput);
}

TEST(FormatNumber, RoundTripsRandomDoubles) {
    oracle::Draws d(11);
    for (int i = 0; i < 2000; ++i) {
        const double v = d.uniform(-1.0, 1.0) * std::pow(10.0, d.integer(-300, 300));
        EXPECT_EQ(parse_number(format_number(v)), v);
    }
    EXPECT_EQ(parse_number(format_number(std::numeric_limits<double>::denorm_min())),
              std::numeric_limits<double>::denorm_min());
}

TEST(ParseNumber, StrictFullString) {
    EXPECT_DOUBLE_EQ(parse_number("1e-3"), 1e-3);
    EXPECT_DOUBLE_EQ(parse_number("-6"), -6.0);
    EXPECT_THROW((void)parse_number("1.0x"), InvalidInput);
    EXPECT_THROW((void)parse_number(""), InvalidInput);
}

TEST(CsvWriter, WritesHeaderAndRows) {
    std::ostringstream out;
    const std::vector<std::string> header{"a", "b", "c"};
    CsvWriter csv(out, header);
    csv.cell(0.5).cell(3LL).cell(std::string_view("x"));
    csv.end_row();
    EXPECT_EQ(out.str(), "a,b,c\n0.5,3,x\n");
}

TEST(KeyValueRecord, WritesInInsertionOrder) {
    std::ostringstream out;
    write_record(out, {{"z", "1"}, {"a", "2"}});
    EXPECT_EQ(out.str(), "z=1\na=2\n");
}

TEST(WriteFile, ReplacesContents) {
    const auto path = std::filesystem::temp_directory_path() / "mvac_write_file_test.txt";
    write_file(path, "first");
    write_file(path, "second");
    std::ifstream f(path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    EXPECT_EQ(text, "second");
    std::filesystem::remove(path);
}
