#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lrr/errors.hpp"
#include "lrr/experiment.hpp"
#include "lrr/pgm.hpp"
#include "lrr/rng.hpp"
#include "test_support.hpp"

using namespace lrr;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Matrix random_image(Rng& rng, int rows, int cols) {
  Matrix x(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      x(i, j) = rng.next_double();
    }
  }
  return x;
}

}  // namespace

TEST(Pgm, LoadBinaryExample) {
  const auto path = temp_path("lrr_pgm_p5.pgm");
  write_bytes(path, std::string("P5\n2 2\n255\n") + '\x00' + '\xff' + '\x80' + '\x40');
  const Matrix image = load_pgm(path.string());
  ASSERT_EQ(image.rows(), 2);
  ASSERT_EQ(image.cols(), 2);
  EXPECT_DOUBLE_EQ(image(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(image(0, 1), 1.0);
  EXPECT_NEAR(image(1, 0), 128.0 / 255.0, 1e-12);
  EXPECT_NEAR(image(1, 1), 64.0 / 255.0, 1e-12);
  std::filesystem::remove(path);
}

TEST(Pgm, AsciiWithCommentsMatchesBinary) {
  const auto ascii_path = temp_path("lrr_pgm_p2.pgm");
  const auto binary_path = temp_path("lrr_pgm_p5_eq.pgm");
  write_bytes(ascii_path,
              "P2 # magic\n# full comment line\n2 # width\n2\n255 # maxval\n0 255\n128 64\n");
  write_bytes(binary_path, std::string("P5\n2 2\n255\n") + '\x00' + '\xff' + '\x80' + '\x40');
  const Matrix ascii = load_pgm(ascii_path.string());
  const Matrix binary = load_pgm(binary_path.string());
  EXPECT_EQ(ascii, binary);
  std::filesystem::remove(ascii_path);
  std::filesystem::remove(binary_path);
}

TEST(Pgm, RoundTripWithinQuantization) {
  Rng rng(501);
  const auto path = temp_path("lrr_pgm_roundtrip.pgm");
  const Matrix original = random_image(rng, 7, 5);
  save_pgm(original, path.string());
  const Matrix reloaded = load_pgm(path.string());
  EXPECT_LE((reloaded - original).lpNorm<Eigen::Infinity>(), 0.5 / 255.0 + 1e-12);
  std::filesystem::remove(path);
}

TEST(Pgm, SixteenBitRoundTrip) {
  Rng rng(503);
  const auto path = temp_path("lrr_pgm_16bit.pgm");
  const Matrix original = random_image(rng, 4, 6);
  save_pgm(original, path.string(), 65535);
  const Matrix reloaded = load_pgm(path.string());
  EXPECT_LE((reloaded - original).lpNorm<Eigen::Infinity>(), 0.5 / 65535.0 + 1e-12);
  std::filesystem::remove(path);
}

TEST(Pgm, SaveClampsAndRoundsHalfAway) {
  const auto path = temp_path("lrr_pgm_save.pgm");
  Matrix x(1, 3);
  x << 0.0, 1.7, 0.5;
  save_pgm(x, path.string());
  const std::string bytes = read_bytes(path);
  const std::string header = "P5\n3 1\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 3);
  EXPECT_EQ(bytes.substr(0, header.size()), header);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 0]), 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 1]), 255);  // clamped
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 2]), 128);  // 127.5 up
  std::filesystem::remove(path);
}

TEST(Pgm, LoadErrorsCarryByteOffsets) {
  const auto path = temp_path("lrr_pgm_bad.pgm");
  write_bytes(path, "P3\n2 2\n255\n");
  try {
    load_pgm(path.string());
    FAIL() << "expected parse error";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos);
  }
  write_bytes(path, std::string("P5\n2 2\n255\n") + '\x00');
  EXPECT_THROW(load_pgm(path.string()), IoError);
  write_bytes(path, "P5\n2 2\n0\n");
  EXPECT_THROW(load_pgm(path.string()), IoError);
  EXPECT_THROW(load_pgm("/nonexistent/image.pgm"), IoError);
  std::filesystem::remove(path);
}

TEST(Noise, ZeroVarianceIsIdentity) {
  Rng rng(521);
  const Matrix x = random_image(rng, 5, 5);
  EXPECT_EQ(add_gaussian_noise(x, 0.0, 7), x);
}

TEST(Noise, MomentsOnConstantImage) {
  const Matrix x = Matrix::Constant(200, 200, 0.5);
  const Matrix noisy = add_gaussian_noise(x, 0.01, 911);
  const Matrix delta = noisy - x;
  const double mean = delta.mean();
  EXPECT_LE(std::abs(mean), 3.0 * std::sqrt(0.01 / 40000.0));
  const double variance = (delta.array() - mean).square().mean();
  EXPECT_NEAR(variance, 0.01, 0.001);
}

TEST(Noise, DeterministicPerSeed) {
  Rng rng(523);
  const Matrix x = random_image(rng, 6, 6);
  EXPECT_EQ(add_gaussian_noise(x, 0.01, 42), add_gaussian_noise(x, 0.01, 42));
  EXPECT_NE(add_gaussian_noise(x, 0.01, 42), add_gaussian_noise(x, 0.01, 43));
}

TEST(Noise, RejectsNegativeVariance) {
  EXPECT_THROW(add_gaussian_noise(Matrix::Zero(2, 2), -0.1, 1), std::invalid_argument);
}

TEST(RelativeError, Examples) {
  Rng rng(541);
  const Matrix m = random_image(rng, 4, 4);
  EXPECT_DOUBLE_EQ(relative_error(m, m), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(Matrix::Zero(4, 4), m), 1.0);
  EXPECT_NEAR(relative_error(1.1 * m, m), 0.1, 1e-12);
  EXPECT_THROW(relative_error(m, Matrix::Zero(4, 4)), std::invalid_argument);
}

TEST(MakeInstance, FreedomRatioMatchesReferenceGeometries) {
  Rng rng(547);
  {
    const Matrix full = random_image(rng, 419, 400);
    const auto instance = make_instance(full, 30, 0.40, false, 42, 43);
    EXPECT_NEAR(instance.fr, 2.8323, 5e-5);
    EXPECT_EQ(instance.mask.dim(), 67040);
  }
  {
    const Matrix full = random_image(rng, 256, 256);
    const auto instance = make_instance(full, 30, 0.40, false, 42, 43);
    EXPECT_NEAR(instance.fr, 1.8129, 5e-5);
    EXPECT_EQ(instance.mask.dim(), 26214);
  }
}

TEST(MakeInstance, ExactFieldsAndNoiselessObservations) {
  Rng rng(557);
  const Matrix full = random_image(rng, 24, 20);
  const auto instance = make_instance(full, 3, 0.5, false, 7, 8);
  EXPECT_DOUBLE_EQ(instance.sr, static_cast<double>(instance.mask.dim()) / (24.0 * 20.0));
  EXPECT_DOUBLE_EQ(instance.fr,
                   static_cast<double>(instance.mask.dim()) / (3.0 * (24.0 + 20.0 - 3.0)));
  EXPECT_FALSE(instance.noisy);
  EXPECT_FALSE(instance.noise_seed.has_value());
  EXPECT_EQ(instance.observed, instance.mask.apply(instance.ground_truth));
  EXPECT_GE(instance.ground_truth.minCoeff(), 0.0);
  EXPECT_LE(instance.ground_truth.maxCoeff(), 1.0);
}

TEST(MakeInstance, FullSamplingAndUnderdeterminedFlag) {
  Rng rng(563);
  const Matrix full = random_image(rng, 20, 20);
  const auto everything = make_instance(full, 4, 1.0, false, 1, 2);
  EXPECT_EQ(everything.mask.dim(), 400);
  EXPECT_FALSE(everything.underdetermined);
  EXPECT_DOUBLE_EQ(everything.fr, 400.0 / (4.0 * 36.0));

  const auto starved = make_instance(full, 4, 0.1, false, 1, 2);
  EXPECT_LT(starved.fr, 1.0);
  EXPECT_TRUE(starved.underdetermined);
}

TEST(MakeInstance, DeterministicInAllSeeds) {
  Rng rng(569);
  const Matrix full = random_image(rng, 16, 16);
  const auto first = make_instance(full, 3, 0.6, true, 42, 43);
  const auto second = make_instance(full, 3, 0.6, true, 42, 43);
  EXPECT_EQ(first.observed, second.observed);
  EXPECT_EQ(first.mask.cells(), second.mask.cells());
  EXPECT_EQ(first.ground_truth, second.ground_truth);
}

TEST(MakeInstance, RejectsBadSamplingRatio) {
  Rng rng(571);
  const Matrix full = random_image(rng, 8, 8);
  EXPECT_THROW(make_instance(full, 2, 0.0, false, 1, 2), std::invalid_argument);
  EXPECT_THROW(make_instance(full, 2, 1.5, false, 1, 2), std::invalid_argument);
}

TEST(EmitTable, FormatsScientificRe) {
  const auto path = temp_path("lrr_table_fmt.csv");
  ExperimentRow row;
  row.image_name = "synthetic";
  row.algorithm = Algorithm::Svt;
  row.sr = 0.4;
  row.fr = 1.8129;
  row.rank_r = 30;
  row.noisy = false;
  row.re = 0.0735;
  row.iterations = 12;
  row.seconds = 1.5;
  row.seed = 42;
  emit_table({row}, path.string());
  const std::string text = read_bytes(path);
  EXPECT_NE(text.find("image,algorithm,sr,fr,rank,noisy,re,iterations,seconds,seed\n"),
            std::string::npos);
  EXPECT_NE(text.find(",7.35e-02,"), std::string::npos);
  EXPECT_NE(text.find("synthetic,SVT,"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(EmitTable, EmptyRowsGiveHeaderOnly) {
  const auto path = temp_path("lrr_table_empty.csv");
  emit_table({}, path.string());
  EXPECT_EQ(read_bytes(path), "image,algorithm,sr,fr,rank,noisy,re,iterations,seconds,seed\n");
  std::filesystem::remove(path);
}

TEST(EmitTable, ParseRoundTripIsStable) {
  const auto first_path = temp_path("lrr_table_rt1.csv");
  const auto second_path = temp_path("lrr_table_rt2.csv");
  std::vector<ExperimentRow> rows;
  for (int i = 0; i < 3; ++i) {
    ExperimentRow row;
    row.image_name = "img" + std::to_string(i);
    row.algorithm = static_cast<Algorithm>(i % 3);
    row.sr = 0.3 + 0.1 * i;
    row.fr = 1.0 + 0.37 * i;
    row.rank_r = 10 * (i + 1);
    row.noisy = i % 2 == 1;
    row.re = 0.0352 / (i + 1);
    row.iterations = 100 + i;
    row.seconds = 0.25 * i;
    row.seed = 42 + i;
    rows.push_back(row);
  }
  emit_table(rows, first_path.string());
  const auto parsed = parse_table(first_path.string());
  ASSERT_EQ(parsed.size(), rows.size());
  emit_table(parsed, second_path.string());
  EXPECT_EQ(read_bytes(first_path), read_bytes(second_path));
  std::filesystem::remove(first_path);
  std::filesystem::remove(second_path);
}

TEST(RunComparison, NoiseRaisesEveryRelativeError) {
  Rng rng(593);
  Matrix product = lrr::testing::random_low_rank(rng, 24, 24, 3);
  const double lo = product.minCoeff(), hi = product.maxCoeff();
  const Matrix full = ((product.array() - lo) / (hi - lo)).matrix();
  const auto clean = make_instance(full, 3, 0.6, false, 9, 10);
  const auto noisy = make_instance(full, 3, 0.6, true, 9, 10);
  ComparisonConfig config;
  config.baseline_max_iters = 100;
  const std::vector<Algorithm> all = {Algorithm::Rtrdc, Algorithm::Svt, Algorithm::Svp};
  const auto clean_rows = run_comparison(clean, all, config, "clean");
  const auto noisy_rows = run_comparison(noisy, all, config, "noisy");
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_GT(noisy_rows[i].re, clean_rows[i].re);
  }
}

TEST(RunComparison, EmptyAlgorithmListGivesNoRows) {
  Rng rng(577);
  const Matrix full = random_image(rng, 12, 12);
  const auto instance = make_instance(full, 2, 0.6, false, 5, 6);
  EXPECT_TRUE(run_comparison(instance, {}, ComparisonConfig{}, "none").empty());
}

TEST(RunComparison, RowsCarryInstanceMetadata) {
  Rng rng(587);
  Matrix product = lrr::testing::random_low_rank(rng, 24, 24, 3);
  const double lo = product.minCoeff(), hi = product.maxCoeff();
  const Matrix full = ((product.array() - lo) / (hi - lo)).matrix();
  const auto instance = make_instance(full, 3, 0.6, false, 9, 10);
  ComparisonConfig config;
  config.baseline_max_iters = 100;
  const auto rows = run_comparison(
      instance, {Algorithm::Rtrdc, Algorithm::Svt, Algorithm::Svp}, config, "tiny");
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.image_name, "tiny");
    EXPECT_DOUBLE_EQ(row.sr, instance.sr);
    EXPECT_DOUBLE_EQ(row.fr, instance.fr);
    EXPECT_EQ(row.rank_r, 3);
    EXPECT_FALSE(row.noisy);
    EXPECT_GE(row.re, 0.0);
    EXPECT_GT(row.iterations, 0);
    EXPECT_EQ(row.seed, 9u);
  }
  EXPECT_EQ(rows[0].algorithm, Algorithm::Rtrdc);
  EXPECT_LT(rows[0].re, 1e-2);
}
