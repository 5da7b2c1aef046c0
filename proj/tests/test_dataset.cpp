// Copyright 2026 The tagm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "tagm/dataset.hpp"

namespace tagm {
namespace {

namespace fs = std::filesystem;

class DatasetTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tagm_dataset_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write_raw(const std::string& name, const std::vector<unsigned char>& bytes) const {
    std::ofstream out(path(name), std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }

  fs::path dir_;
};

IdxImages pattern_images(std::int64_t count) {
  IdxImages img;
  img.count = count;
  img.rows = 28;
  img.cols = 28;
  for (std::int64_t i = 0; i < count * 28 * 28; ++i) img.pixels.push_back(static_cast<std::uint8_t>(i * 7 % 256));
  return img;
}

TEST_F(DatasetTest, SingleZeroImage) {
  IdxImages img;
  img.count = 1;
  img.rows = img.cols = 28;
  img.pixels.assign(28 * 28, 0);
  write_idx_images(path("one"), img);
  const IdxImages back = read_idx_images(path("one"));
  EXPECT_EQ(back.count, 1);
  EXPECT_EQ(back.rows, 28);
  EXPECT_EQ(back.cols, 28);
  EXPECT_EQ(back.pixels, img.pixels);
  EXPECT_EQ(image_features(back), Matrix::Zero(1, 784));
}

TEST_F(DatasetTest, ByteExactRoundTripPlainAndGzip) {
  const IdxImages img = pattern_images(5);
  write_idx_images(path("plain"), img);
  write_idx_images(path("packed.gz"), img, true);
  EXPECT_EQ(read_idx_images(path("plain")).pixels, img.pixels);
  const IdxImages packed = read_idx_images(path("packed.gz"));
  EXPECT_EQ(packed.pixels, img.pixels);
  EXPECT_EQ(packed.at(3, 4, 5), img.pixels[(3 * 28 + 4) * 28 + 5]);
  EXPECT_LT(fs::file_size(path("packed.gz")), fs::file_size(path("plain")));
}

TEST_F(DatasetTest, ImageReaderRejectsLabelMagic) {
  write_idx_labels(path("labels"), {1, 2});
  EXPECT_THROW(read_idx_images(path("labels")), IdxFormatError);
}

TEST_F(DatasetTest, TruncatedImagePayload) {
  write_raw("short", {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 28, 0, 0, 0, 28, 1, 2, 3});
  EXPECT_THROW(read_idx_images(path("short")), IdxLengthError);
  write_raw("header", {0, 0, 8, 3, 0, 0});
  EXPECT_THROW(read_idx_images(path("header")), IdxLengthError);
}

TEST_F(DatasetTest, LabelsAreShifted) {
  write_idx_labels(path("labels.gz"), {0, 5, 9}, true);
  EXPECT_EQ(read_idx_labels(path("labels.gz")), (std::vector<int>{1, 6, 10}));
}

TEST_F(DatasetTest, LabelErrors) {
  write_raw("empty", {0, 0, 8, 1, 0, 0, 0, 1});
  EXPECT_THROW(read_idx_labels(path("empty")), IdxLengthError);
  write_idx_labels(path("big"), {3, 10});
  EXPECT_THROW(read_idx_labels(path("big")), IdxDataError);
  write_idx_images(path("images"), pattern_images(1));
  EXPECT_THROW(read_idx_labels(path("images")), IdxFormatError);
  EXPECT_THROW(read_idx_labels(path("missing")), std::runtime_error);
}

TEST(ImageFeatures, ScalingIsExact) {
  IdxImages img;
  img.count = 1;
  img.rows = 1;
  img.cols = 3;
  img.pixels = {0, 255, 51};
  const Matrix f = image_features(img);
  EXPECT_EQ(f(0, 0), 0.0);
  EXPECT_EQ(f(0, 1), 1.0);
  EXPECT_EQ(f(0, 2), 0.2);
}

TEST(SampleSet, SplitSizesAndInvariants) {
  const SampleSet set = synthetic_blobs(33, 10, 5, 0.2, 4);
  EXPECT_EQ(set.size(), 330);
  EXPECT_EQ(set.train.size(), 231u);
  EXPECT_EQ(set.test.size(), 99u);
  EXPECT_GE(set.features.minCoeff(), 0.0);
  EXPECT_LE(set.features.maxCoeff(), 1.0);
  std::vector<bool> seen(330, false);
  for (auto v : {set.train, set.test})
    for (Index r : v) {
      EXPECT_FALSE(seen[static_cast<std::size_t>(r)]);
      seen[static_cast<std::size_t>(r)] = true;
    }
  for (int l : set.labels) {
    EXPECT_GE(l, 1);
    EXPECT_LE(l, 10);
  }
}

TEST(SampleSet, RoundingOfTheSplit) {
  const SampleSet set = make_sample_set(Matrix::Zero(7, 1), {1, 1, 1, 2, 2, 2, 2}, 2);
  EXPECT_EQ(set.train.size(), 5u);  // round(4.9)
  EXPECT_EQ(set.test.size(), 2u);
  EXPECT_THROW(make_sample_set(Matrix::Zero(2, 1), {1, 3}, 2), std::invalid_argument);
  EXPECT_THROW(make_sample_set(Matrix::Constant(1, 1, 2.0), {1}, 2), std::invalid_argument);
}

TEST(Subsample, StratifiedCounts) {
  const SampleSet set = synthetic_blobs(80, 10, 4, 0.1, 2);
  const SampleSet sub = subsample(set, 50, 9);
  EXPECT_EQ(sub.size(), 500);
  for (Index c : sub.class_counts()) EXPECT_EQ(c, 50);
  EXPECT_EQ(sub.train.size(), 350u);
  EXPECT_EQ(sub.test.size(), 150u);
  std::map<int, int> train_hist;
  for (int l : sub.train_labels()) ++train_hist[l];
  for (const auto& [label, n] : train_hist) EXPECT_EQ(n, 35) << label;
}

TEST(Subsample, FullClassSizeIsAPermutation) {
  const SampleSet set = synthetic_blobs(20, 10, 3, 0.1, 2);
  const SampleSet sub = subsample(set, 20, 5);
  EXPECT_EQ(sub.features, set.features);
  EXPECT_EQ(sub.labels, set.labels);
}

TEST(Subsample, Deterministic) {
  const SampleSet set = synthetic_blobs(40, 10, 3, 0.1, 2);
  const SampleSet a = subsample(set, 10, 77);
  const SampleSet b = subsample(set, 10, 77);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.train, b.train);
  const SampleSet c = subsample(set, 10, 78);
  EXPECT_NE(a.features, c.features);
}

TEST(Subsample, TooLargeIsRejected) {
  const SampleSet set = synthetic_blobs(20, 10, 3, 0.1, 2);
  EXPECT_THROW(subsample(set, 21, 1), std::invalid_argument);
}

TEST_F(DatasetTest, LoadsMergedFiles) {
  const IdxImages train = pattern_images(20);
  const IdxImages test = pattern_images(10);
  std::vector<std::uint8_t> train_labels, test_labels;
  for (int i = 0; i < 20; ++i) train_labels.push_back(static_cast<std::uint8_t>(i % 10));
  for (int i = 0; i < 10; ++i) test_labels.push_back(static_cast<std::uint8_t>(i));
  write_idx_images(path("train-images-idx3-ubyte.gz"), train, true);
  write_idx_labels(path("train-labels-idx1-ubyte.gz"), train_labels, true);
  write_idx_images(path("t10k-images-idx3-ubyte"), test);
  write_idx_labels(path("t10k-labels-idx1-ubyte"), test_labels);
  const SampleSet set = load_fashion_mnist(dir_.string());
  EXPECT_EQ(set.size(), 30);
  EXPECT_EQ(set.dim(), 784);
  EXPECT_EQ(set.train.size(), 21u);
  for (Index c : set.class_counts()) EXPECT_EQ(c, 3);
  EXPECT_EQ(set.labels[20], 1);
  EXPECT_EQ(set.features(0, 1), 7.0 / 255.0);
}

TEST_F(DatasetTest, MissingFilesAreReported) {
  EXPECT_THROW(load_fashion_mnist(dir_.string()), std::runtime_error);
}

}  // namespace
}  // namespace tagm
