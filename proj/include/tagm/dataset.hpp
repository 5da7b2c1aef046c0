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

#ifndef TAGM_DATASET_HPP
#define TAGM_DATASET_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tagm/types.hpp"

namespace tagm {

/// Wrong magic number or malformed header.
struct IdxFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Header or payload shorter than announced.
struct IdxLengthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Payload values outside the allowed range.
struct IdxDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IdxImages {
  std::int64_t count = 0;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  /// count x rows x cols bytes, row-major.
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::int64_t image, std::int64_t r, std::int64_t c) const {
    return pixels[static_cast<std::size_t>((image * rows + r) * cols + c)];
  }
};

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
constexpr int kFashionClasses = 10;

/// Big-endian IDX image file; gzip-compressed input is decompressed
/// transparently.
IdxImages read_idx_images(const std::string& path);
/// Labels shifted from {0..9} to {1..10}.
std::vector<int> read_idx_labels(const std::string& path);

/// Writers for round trips and fixtures. `gzip` compresses the output.
void write_idx_images(const std::string& path, const IdxImages& images, bool gzip = false);
void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& raw,
                      bool gzip = false);

struct SampleSet {
  /// N x d, every value in [0, 1].
  Matrix features;
  /// N labels in {1..num_classes}.
  std::vector<int> labels;
  int num_classes = kFashionClasses;
  /// Row indices; |train| = round(0.7 N).
  std::vector<Index> train;
  std::vector<Index> test;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  std::vector<Index> class_counts() const;
  Matrix train_features() const;
  std::vector<int> train_labels() const;
};

constexpr double kTrainFraction = 0.7;
constexpr std::uint64_t kDefaultSplitSeed = 20'200'706;

/// Scales bytes by 1/255 and flattens each image.
Matrix image_features(const IdxImages& images);

/// Stratified train/test split with |train| = round(0.7 N): each class gets
/// floor(0.7 n_c) and the remainder goes to the classes with the largest
/// fractional parts.
SampleSet make_sample_set(Matrix features, std::vector<int> labels, int num_classes,
                          std::uint64_t split_seed = kDefaultSplitSeed);

/// Merges the standard train and test files found in `dir` (plain or .gz)
/// and splits them.
SampleSet load_fashion_mnist(const std::string& dir,
                             std::uint64_t split_seed = kDefaultSplitSeed);

/// Stratified deterministic subsample of `per_class` rows per class, re-split
/// 70/30. Throws std::invalid_argument when a class is too small.
SampleSet subsample(const SampleSet& set, Index per_class, std::uint64_t seed);

/// Offline substitute: `per_class` points per class scattered around random
/// centres in [0.2, 0.8]^dim with standard deviation `spread`, clamped to [0, 1].
SampleSet synthetic_blobs(Index per_class, int num_classes, Index dim, double spread,
                          std::uint64_t seed);

}  // namespace tagm

#endif  // TAGM_DATASET_HPP
