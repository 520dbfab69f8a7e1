#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "fairlicit/schema.hpp"

namespace fairlicit {

// Maps cases to real coordinates, one block per feature. Ordinal features
// become a single level normalized to [0,1]; categorical features become a
// one-hot block scaled by 1/sqrt(2), so two distinct values sit exactly one
// unit apart inside the block.
class Encoder {
 public:
  struct Block {
    std::size_t feature = 0;  // schema index
    std::size_t offset = 0;
    std::size_t width = 0;
  };

  explicit Encoder(const FeatureSchema& schema, const std::set<std::string>& excluded = {})
      : schema_(schema) {
    std::size_t offset = 0;
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const auto& f = schema.features[i];
      if (excluded.count(f.name)) continue;
      const std::size_t width = f.kind == FeatureKind::ordinal ? 1 : f.values.size();
      blocks_.push_back({i, offset, width});
      offset += width;
    }
    dim_ = offset;
  }

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  // Value of coordinate `k` within feature block for value index `idx`.
  double coordinate(const FeatureDef& f, std::size_t idx, std::size_t k) const {
    if (f.kind == FeatureKind::ordinal) {
      const double lo = f.levels.front(), hi = f.levels.back();
      return (f.levels[idx] - lo) / (hi - lo);
    }
    return k == idx ? kOneHotScale : 0.0;
  }

  void encode_into(const Case& c, double* out) const {
    if (c.values.size() != schema_.size())
      throw SchemaMismatch("case '" + c.id + "' does not match the schema");
    for (const auto& b : blocks_) {
      const auto& f = schema_.features[b.feature];
      const auto idx = f.index_of(c.values[b.feature]);
      if (!idx)
        throw SchemaMismatch("case '" + c.id + "' has value '" + c.values[b.feature] +
                             "' outside feature " + f.name);
      for (std::size_t k = 0; k < b.width; ++k) out[b.offset + k] = coordinate(f, *idx, k);
    }
  }

  std::vector<double> encode(const Case& c) const {
    std::vector<double> out(dim_);
    encode_into(c, out.data());
    return out;
  }

  // Row-major matrix of all case encodings.
  std::vector<double> encode_all(const std::vector<Case>& cases) const {
    std::vector<double> out(cases.size() * dim_);
    for (std::size_t r = 0; r < cases.size(); ++r) encode_into(cases[r], out.data() + r * dim_);
    return out;
  }

  // Human-readable coordinate names: "feature" for ordinal blocks,
  // "feature=value" for categorical ones.
  std::vector<std::string> coordinate_names() const {
    std::vector<std::string> names;
    for (const auto& b : blocks_) {
      const auto& f = schema_.features[b.feature];
      if (f.kind == FeatureKind::ordinal) {
        names.push_back(f.name);
      } else {
        for (const auto& v : f.values) names.push_back(f.name + "=" + v);
      }
    }
    return names;
  }

  static inline const double kOneHotScale = 1.0 / std::sqrt(2.0);

 private:
  FeatureSchema schema_;
  std::vector<Block> blocks_;
  std::size_t dim_ = 0;
};

}  // namespace fairlicit
