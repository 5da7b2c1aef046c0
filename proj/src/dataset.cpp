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

#include "tagm/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>

namespace tagm {

namespace {

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};
using GzHandle = std::unique_ptr<gzFile_s, GzCloser>;

class ByteReader {
 public:
  explicit ByteReader(const std::string& path) : path_(path), file_(gzopen(path.c_str(), "rb")) {
    if (!file_) throw std::runtime_error("cannot open '" + path + "'");
  }

  void read(void* dst, std::size_t n, const char* what) {
    std::size_t done = 0;
    auto* out = static_cast<char*>(dst);
    while (done < n) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(n - done, 1u << 30));
      const int got = gzread(file_.get(), out + done, chunk);
      if (got < 0) throw std::runtime_error("read error in '" + path_ + "'");
      if (got == 0) {
        throw IdxLengthError("'" + path_ + "': truncated " + what + " (expected " +
                             std::to_string(n) + " bytes, got " + std::to_string(done) + ")");
      }
      done += static_cast<std::size_t>(got);
    }
  }

  std::uint32_t u32(const char* what) {
    std::array<unsigned char, 4> b{};
    read(b.data(), b.size(), what);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
           (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  GzHandle file_;
};

void check_magic(const ByteReader& in, std::uint32_t got, std::uint32_t want) {
  if (got != want) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "bad magic 0x%08x (expected 0x%08x)", got, want);
    throw IdxFormatError("'" + in.path() + "': " + buf);
  }
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

void write_bytes(const std::string& path, const std::string& bytes, bool gzip) {
  if (gzip) {
    GzHandle f(gzopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    if (!bytes.empty() &&
        gzwrite(f.get(), bytes.data(), static_cast<unsigned>(bytes.size())) <= 0) {
      throw std::runtime_error("write error in '" + path + "'");
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

std::string find_file(const std::string& dir, const std::string& stem) {
  namespace fs = std::filesystem;
  for (const auto& name : {stem, stem + ".gz"}) {
    const fs::path p = fs::path(dir) / name;
    if (fs::exists(p)) return p.string();
  }
  throw std::runtime_error("'" + stem + "' (or .gz) not found in '" + dir + "'");
}

std::vector<std::vector<Index>> rows_by_class(const std::vector<int>& labels, int num_classes) {
  std::vector<std::vector<Index>> rows(static_cast<std::size_t>(num_classes));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    rows[static_cast<std::size_t>(labels[r] - 1)].push_back(static_cast<Index>(r));
  }
  return rows;
}

}  // namespace

IdxImages read_idx_images(const std::string& path) {
  ByteReader in(path);
  check_magic(in, in.u32("header"), kIdxImageMagic);
  IdxImages img;
  img.count = in.u32("header");
  img.rows = in.u32("header");
  img.cols = in.u32("header");
  img.pixels.resize(static_cast<std::size_t>(img.count * img.rows * img.cols));
  in.read(img.pixels.data(), img.pixels.size(), "payload");
  return img;
}

std::vector<int> read_idx_labels(const std::string& path) {
  ByteReader in(path);
  check_magic(in, in.u32("header"), kIdxLabelMagic);
  const std::uint32_t count = in.u32("header");
  std::vector<std::uint8_t> raw(count);
  in.read(raw.data(), raw.size(), "payload");
  std::vector<int> labels(count);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] >= kFashionClasses) {
      throw IdxDataError("'" + path + "': label " + std::to_string(raw[i]) + " at index " +
                         std::to_string(i) + " is out of range");
    }
    labels[i] = raw[i] + 1;
  }
  return labels;
}

void write_idx_images(const std::string& path, const IdxImages& images, bool gzip) {
  if (images.pixels.size() != static_cast<std::size_t>(images.count * images.rows * images.cols)) {
    throw std::invalid_argument("pixel buffer does not match the image shape");
  }
  std::string bytes;
  put_u32(bytes, kIdxImageMagic);
  put_u32(bytes, static_cast<std::uint32_t>(images.count));
  put_u32(bytes, static_cast<std::uint32_t>(images.rows));
  put_u32(bytes, static_cast<std::uint32_t>(images.cols));
  bytes.append(images.pixels.begin(), images.pixels.end());
  write_bytes(path, bytes, gzip);
}

void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& raw, bool gzip) {
  std::string bytes;
  put_u32(bytes, kIdxLabelMagic);
  put_u32(bytes, static_cast<std::uint32_t>(raw.size()));
  bytes.append(raw.begin(), raw.end());
  write_bytes(path, bytes, gzip);
}

std::vector<Index> SampleSet::class_counts() const {
  std::vector<Index> counts(static_cast<std::size_t>(num_classes), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l - 1)];
  return counts;
}

Matrix SampleSet::train_features() const {
  Matrix out(static_cast<Index>(train.size()), dim());
  for (std::size_t r = 0; r < train.size(); ++r) out.row(static_cast<Index>(r)) = features.row(train[r]);
  return out;
}

std::vector<int> SampleSet::train_labels() const {
  std::vector<int> out;
  out.reserve(train.size());
  for (Index r : train) out.push_back(labels[static_cast<std::size_t>(r)]);
  return out;
}

Matrix image_features(const IdxImages& images) {
  const Index d = images.rows * images.cols;
  Matrix out(images.count, d);
  for (Index i = 0; i < images.count; ++i) {
    for (Index j = 0; j < d; ++j) {
      out(i, j) = static_cast<double>(images.pixels[static_cast<std::size_t>(i * d + j)]) / 255.0;
    }
  }
  return out;
}

SampleSet make_sample_set(Matrix features, std::vector<int> labels, int num_classes,
                          std::uint64_t split_seed) {
  if (features.rows() != static_cast<Index>(labels.size())) {
    throw std::invalid_argument("feature rows and label count differ");
  }
  if (num_classes < 1) throw std::invalid_argument("need at least one class");
  for (int l : labels) {
    if (l < 1 || l > num_classes) {
      throw std::invalid_argument("label " + std::to_string(l) + " outside 1.." +
                                  std::to_string(num_classes));
    }
  }
  if (features.size() > 0 && (features.minCoeff() < 0.0 || features.maxCoeff() > 1.0)) {
    throw std::invalid_argument("features must lie in [0, 1]");
  }

  SampleSet set;
  set.features = std::move(features);
  set.labels = std::move(labels);
  set.num_classes = num_classes;

  auto rows = rows_by_class(set.labels, num_classes);
  const double n = static_cast<double>(set.labels.size());
  const auto target = static_cast<std::size_t>(std::llround(kTrainFraction * n));

  std::vector<std::size_t> take(rows.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < rows.size(); ++c) {
    const double exact = kTrainFraction * static_cast<double>(rows[c].size());
    take[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += take[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < target && r < remainders.size(); ++r, ++assigned) {
    ++take[remainders[r].second];
  }

  std::mt19937_64 rng(split_seed);
  for (std::size_t c = 0; c < rows.size(); ++c) {
    std::shuffle(rows[c].begin(), rows[c].end(), rng);
    set.train.insert(set.train.end(), rows[c].begin(), rows[c].begin() + static_cast<long>(take[c]));
    set.test.insert(set.test.end(), rows[c].begin() + static_cast<long>(take[c]), rows[c].end());
  }
  std::sort(set.train.begin(), set.train.end());
  std::sort(set.test.begin(), set.test.end());
  return set;
}

SampleSet load_fashion_mnist(const std::string& dir, std::uint64_t split_seed) {
  const IdxImages train_img = read_idx_images(find_file(dir, "train-images-idx3-ubyte"));
  const IdxImages test_img = read_idx_images(find_file(dir, "t10k-images-idx3-ubyte"));
  std::vector<int> labels = read_idx_labels(find_file(dir, "train-labels-idx1-ubyte"));
  const std::vector<int> test_labels = read_idx_labels(find_file(dir, "t10k-labels-idx1-ubyte"));
  if (train_img.rows != test_img.rows || train_img.cols != test_img.cols) {
    throw IdxFormatError("train and test images differ in shape");
  }
  if (static_cast<std::int64_t>(labels.size()) != train_img.count ||
      static_cast<std::int64_t>(test_labels.size()) != test_img.count) {
    throw IdxLengthError("image and label counts differ");
  }
  labels.insert(labels.end(), test_labels.begin(), test_labels.end());
  Matrix features(train_img.count + test_img.count, train_img.rows * train_img.cols);
  features.topRows(train_img.count) = image_features(train_img);
  features.bottomRows(test_img.count) = image_features(test_img);
  return make_sample_set(std::move(features), std::move(labels), kFashionClasses, split_seed);
}

SampleSet subsample(const SampleSet& set, Index per_class, std::uint64_t seed) {
  if (per_class < 1) throw std::invalid_argument("per_class must be positive");
  auto rows = rows_by_class(set.labels, set.num_classes);
  std::mt19937_64 rng(seed);
  std::vector<Index> chosen;
  for (std::size_t c = 0; c < rows.size(); ++c) {
    if (static_cast<Index>(rows[c].size()) < per_class) {
      throw std::invalid_argument("class " + std::to_string(c + 1) + " has only " +
                                  std::to_string(rows[c].size()) + " samples, fewer than " +
                                  std::to_string(per_class));
    }
    std::shuffle(rows[c].begin(), rows[c].end(), rng);
    chosen.insert(chosen.end(), rows[c].begin(), rows[c].begin() + per_class);
  }
  std::sort(chosen.begin(), chosen.end());

  Matrix features(static_cast<Index>(chosen.size()), set.dim());
  std::vector<int> labels;
  labels.reserve(chosen.size());
  for (std::size_t r = 0; r < chosen.size(); ++r) {
    features.row(static_cast<Index>(r)) = set.features.row(chosen[r]);
    labels.push_back(set.labels[static_cast<std::size_t>(chosen[r])]);
  }
  return make_sample_set(std::move(features), std::move(labels), set.num_classes, seed);
}

SampleSet synthetic_blobs(Index per_class, int num_classes, Index dim, double spread,
                          std::uint64_t seed) {
  if (per_class < 1 || num_classes < 2 || dim < 1 || !(spread >= 0.0)) {
    throw std::invalid_argument("invalid synthetic dataset shape");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(0.2, 0.8);
  std::normal_distribution<double> noise(0.0, spread);
  Matrix centres(num_classes, dim);
  for (Index c = 0; c < num_classes; ++c)
    for (Index j = 0; j < dim; ++j) centres(c, j) = centre(rng);

  const Index n = per_class * num_classes;
  Matrix features(n, dim);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) {
    const Index c = r % num_classes;
    labels[static_cast<std::size_t>(r)] = static_cast<int>(c) + 1;
    for (Index j = 0; j < dim; ++j) {
      features(r, j) = std::clamp(centres(c, j) + noise(rng), 0.0, 1.0);
    }
  }
  return make_sample_set(std::move(features), std::move(labels), num_classes, seed);
}

}  // namespace tagm
