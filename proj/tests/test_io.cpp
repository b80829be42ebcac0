#include "test_support.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace accelode {
namespace {

TEST(FormatDouble, ShortestForms) {
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.5), "-2.5");
  EXPECT_EQ(format_double(1e-300), "1e-300");
}

TEST(FormatDouble, RoundTripsBitExactly) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100000; ++i) {
    const double x = std::bit_cast<double>(rng());
    if (!std::isfinite(x)) continue;
    EXPECT_EQ(std::bit_cast<std::uint64_t>(parse_double(format_double(x))), std::bit_cast<std::uint64_t>(x));
  }
  EXPECT_EQ(parse_double(format_double(std::numeric_limits<double>::denorm_min())),
            std::numeric_limits<double>::denorm_min());
}

TEST(ParseDouble, RejectsGarbage) {
  EXPECT_EQ(parse_double(" 3.25\r"), 3.25);
  EXPECT_THROW(parse_double("abc"), std::invalid_argument);
  EXPECT_THROW(parse_double("1.5x"), std::invalid_argument);
  EXPECT_THROW(parse_double(""), std::invalid_argument);
}

TEST(ContourCsv, RoundTrip) {
  const Contour c = level_set_contour(make_piecewise_gradient(5.0), 1.0, 100);
  std::stringstream ss;
  write_contour_csv(ss, c);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("q,p\n", 0), 0u);
  const Contour back = read_contour_csv(ss);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back.vertices()[i].q, c.vertices()[i].q);
    EXPECT_EQ(back.vertices()[i].p, c.vertices()[i].p);
  }
  std::stringstream again;
  write_contour_csv(again, back);
  EXPECT_EQ(again.str(), text);
}

TEST(ContourCsv, HeaderOptionalAndValidated) {
  std::istringstream plain("0,0\n1,0\n1,1\n0,1\n");
  EXPECT_NEAR(signed_area(read_contour_csv(plain)), 1.0, 1e-15);
  std::istringstream collinear("q,p\n0,0\n1,1\n2,2\n");
  EXPECT_THROW(read_contour_csv(collinear), std::invalid_argument);
  std::istringstream bad("q,p\n0;0\n");
  EXPECT_THROW(read_contour_csv(bad), std::invalid_argument);
}

TEST(MonitorCsv, Rows) {
  const std::vector<LyapunovSample> samples{{0.0, 1.0, 0.5, 1.0}, {1.0, 0.5, 0.5, 0.75}};
  std::ostringstream os;
  write_monitor_csv(os, samples);
  EXPECT_EQ(os.str(), "t_or_k,value,certified_bound\n0,1,1\n1,0.5,0.75\n");
}

}  // namespace
}  // namespace accelode
