#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "awing/io.hpp"

using namespace awing;

namespace {

std::filesystem::path temp_dir() {
  auto d = std::filesystem::temp_directory_path() / ("awing_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(Numbers, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(14.0), "14");
  EXPECT_EQ(io::format_double(-2.5e-7), "-2.5e-07");
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(io::parse_double(io::format_double(v)), v);
  }
}

TEST(Numbers, ParseErrors) {
  EXPECT_EQ(io::parse_double("+3.5"), 3.5);
  EXPECT_THROW(io::parse_double(""), ParseError);
  EXPECT_THROW(io::parse_double("1.5x"), ParseError);
  EXPECT_THROW(io::parse_size("-1"), ParseError);
  EXPECT_EQ(io::parse_size("42"), 42u);
  EXPECT_EQ(io::parse_double_list("1,2.5,-3"), (std::vector<double>{1, 2.5, -3}));
  EXPECT_THROW(io::parse_double_list("1,,2"), ParseError);
}

TEST(Heatmap, RoundTripIsFloatExact) {
  std::mt19937_64 rng(62);
  HeatmapStack s(3, {5, 7});
  for (auto& v : s.values()) v = static_cast<float>(std::uniform_real_distribution<double>(0, 1)(rng));
  const std::string bytes = io::encode_heatmap(s);
  EXPECT_EQ(bytes.size(), 16u + 4u * 105u);
  EXPECT_EQ(bytes.substr(0, 4), "HMAP");
  EXPECT_EQ(io::decode_heatmap(bytes), s);
  EXPECT_TRUE(io::decode_heatmap(bytes, true).has_boundary_channel());
}

TEST(Heatmap, LittleEndianHeader) {
  const std::string bytes = io::encode_heatmap(HeatmapStack(2, {3, 258}));
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 2);
  EXPECT_EQ(static_cast<unsigned char>(bytes[13]), 1);
}

TEST(Heatmap, RejectsBadInput) {
  EXPECT_THROW(io::decode_heatmap("HMA"), ParseError);
  EXPECT_THROW(io::decode_heatmap(std::string("XMAP") + std::string(12, '\0')), ParseError);
  std::string bytes = io::encode_heatmap(HeatmapStack(1, {2, 2}));
  bytes.pop_back();
  EXPECT_THROW(io::decode_heatmap(bytes), ParseError);
}

TEST(Heatmap, FileRoundTrip) {
  const auto dir = temp_dir();
  HeatmapStack s(1, {4, 4});
  s(0, 1, 2) = 0.5;
  io::write_heatmap(dir / "h.bin", s);
  EXPECT_EQ(io::read_heatmap(dir / "h.bin"), s);
  EXPECT_FALSE(std::filesystem::exists(dir / "h.bin.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(Annotations, ParseAndFormatRoundTrip) {
  std::istringstream in("# header\n\nimg1 64 48 10,12 20.5,30 1,2,0\nimg2 32 32 3,4,1\n");
  const auto all = io::parse_annotations(in);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].id, "img1");
  EXPECT_EQ(all[0].landmarks.frame(), (Frame{48, 64}));
  EXPECT_EQ(all[0].landmarks[1], (Point{20.5, 30}));
  EXPECT_EQ(all[0].landmarks.visibility(2), Visibility::Unlabeled);
  EXPECT_EQ(all[1].landmarks.visibility(0), Visibility::Occluded);
  EXPECT_EQ(io::format_annotation(all[0]), "img1 64 48 10,12 20.5,30 1,2,0");
  std::istringstream again(io::format_annotations(all));
  EXPECT_EQ(io::parse_annotations(again), all);
}

TEST(Annotations, Errors) {
  EXPECT_THROW(io::parse_annotation_line("img 64"), ParseError);
  EXPECT_THROW(io::parse_annotation_line("img 64 64 1;2"), ParseError);
  EXPECT_THROW(io::parse_annotation_line("img 64 64 1,2,3"), ParseError);
  EXPECT_THROW(io::parse_annotation_line("img 64 64 70,2"), OutOfFrameError);
  EXPECT_NO_THROW(io::parse_annotation_line("img 64 64 70,2,0"));
  EXPECT_THROW(io::read_annotations("/nonexistent/awing/file.txt"), Error);
}

TEST(KeyValues, Parsing) {
  std::istringstream in("# comment\nloss = awing  # trailing\n epochs=3\n\nfoo =\n");
  const auto kv = io::parse_key_values(in);
  EXPECT_EQ(kv.at("loss"), "awing");
  EXPECT_EQ(kv.at("epochs"), "3");
  EXPECT_EQ(kv.at("foo"), "");
  std::istringstream bad("novalue\n");
  EXPECT_THROW(io::parse_key_values(bad), ParseError);
  std::istringstream empty_key(" = 3\n");
  EXPECT_THROW(io::parse_key_values(empty_key), ParseError);
}

TEST(Files, AtomicWriteReplaces) {
  const auto dir = temp_dir();
  io::write_file_atomic(dir / "a.txt", "first");
  io::write_file_atomic(dir / "a.txt", "second");
  EXPECT_EQ(io::read_file(dir / "a.txt"), "second");
  EXPECT_THROW(io::write_file_atomic(dir / "missing" / "a.txt", "x"), Error);
  std::filesystem::remove_all(dir);
}
