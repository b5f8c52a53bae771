#include "support.hpp"

#include "ttcov/errors.hpp"
#include "ttcov/matrix_io.hpp"
#include "ttcov/synthgen.hpp"

#include <gtest/gtest.h>

namespace ttcov {
namespace {

TEST(MatrixIo, RoundTripIsExact) {
  const Matrix m = test::random_matrix(4, 3, 1) * 1e-7;
  EXPECT_EQ(parse_matrix(format_matrix(m)), m);
  const auto dir = test::scratch_dir("matrix_io");
  write_matrix(dir / "m.txt", m);
  EXPECT_EQ(read_matrix(dir / "m.txt"), m);
}

TEST(MatrixIo, MalformedInput) {
  EXPECT_THROW((void)parse_matrix(""), DataError);
  EXPECT_THROW((void)parse_matrix("2 2\n1 2\n3\n"), DataError);
  EXPECT_THROW((void)parse_matrix("1 2\n1 abc\n"), DataError);
  EXPECT_THROW((void)parse_matrix("1 1\nnan\n"), DataError);
  EXPECT_THROW((void)parse_matrix("1 1\n1 2\n"), DataError);
  EXPECT_THROW((void)parse_matrix("-1 2\n"), DataError);
  EXPECT_THROW((void)read_matrix("/nonexistent/m.txt"), IoError);
}

TEST(MatrixIo, AtomicWriteLeavesNoTemporaries) {
  const auto dir = test::scratch_dir("atomic");
  atomic_write(dir / "a.txt", "one");
  atomic_write(dir / "a.txt", "two");
  EXPECT_EQ(read_file(dir / "a.txt"), "two");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1);
  EXPECT_THROW(atomic_write("/nonexistent/dir/a.txt", "x"), IoError);
}

TEST(MatrixIo, GroundTruthRoundTrip) {
  const GroundTruth gt = gen_ground_truth({2, 3, 2}, 2, 3, {}, 5);
  const GroundTruth back = ground_truth_from_json(ground_truth_to_json(gt));
  EXPECT_EQ(back.shape, gt.shape);
  EXPECT_EQ(back.seed, gt.seed);
  ASSERT_EQ(back.b.size(), gt.b.size());
  for (std::size_t i = 0; i < gt.b.size(); ++i) EXPECT_EQ(back.b[i], gt.b[i]);
  EXPECT_EQ(true_covariance(back), true_covariance(gt));
  EXPECT_THROW((void)ground_truth_from_json("{}"), DataError);
  EXPECT_THROW((void)ground_truth_from_json("not json"), DataError);
}

TEST(MatrixIo, DataHashDistinguishes) {
  const Matrix a = test::random_matrix(3, 3, 1);
  Matrix b = a;
  EXPECT_EQ(data_hash(a), data_hash(b));
  b(2, 2) += 1e-15;
  EXPECT_NE(data_hash(a), data_hash(b));
}

}  // namespace
}  // namespace ttcov
