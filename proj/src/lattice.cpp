#include "silt/lattice.hpp"

#include <stdexcept>
#include <string>

namespace silt {

std::size_t SiteHash::operator()(const Site& s) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::int32_t c : s) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return static_cast<std::size_t>(h);
}

void check_dimension(int d) {
  if (d < 1 || d > kMaxDim) {
    throw std::invalid_argument("dimension must lie in [1, " + std::to_string(kMaxDim) +
                                "], got " + std::to_string(d));
  }
}

Box::Box(int dim, int radius) : dim_(dim), radius_(radius), side_(2 * radius + 1), size_(1) {
  check_dimension(dim);
  if (radius < 0) throw std::invalid_argument("box radius must be nonnegative");
  stride_.resize(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    stride_[static_cast<std::size_t>(i)] = size_;
    size_ *= static_cast<std::size_t>(side_);
  }
}

bool Box::contains(const Site& s) const {
  for (int i = 0; i < dim_; ++i) {
    if (s[static_cast<std::size_t>(i)] < -radius_ || s[static_cast<std::size_t>(i)] > radius_) return false;
  }
  return true;
}

std::size_t Box::index(const Site& s) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim_; ++i) {
    const auto u = static_cast<std::size_t>(i);
    idx += static_cast<std::size_t>(s[u] + radius_) * stride_[u];
  }
  return idx;
}

Site Box::site(std::size_t index) const {
  Site s{};
  for (int i = 0; i < dim_; ++i) {
    s[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(index % static_cast<std::size_t>(side_)) - radius_;
    index /= static_cast<std::size_t>(side_);
  }
  return s;
}

Site Box::wrap(const Site& s) const {
  Site out{};
  for (int i = 0; i < dim_; ++i) {
    const auto u = static_cast<std::size_t>(i);
    std::int64_t v = (static_cast<std::int64_t>(s[u]) + radius_) % side_;
    if (v < 0) v += side_;
    out[u] = static_cast<std::int32_t>(v - radius_);
  }
  return out;
}

std::size_t Box::periodic_neighbor(std::size_t index, int axis, int direction) const {
  const auto u = static_cast<std::size_t>(axis);
  const std::size_t coord = (index / stride_[u]) % static_cast<std::size_t>(side_);
  std::size_t next = 0;
  if (direction > 0) {
    next = (coord + 1 == static_cast<std::size_t>(side_)) ? 0 : coord + 1;
  } else {
    next = (coord == 0) ? static_cast<std::size_t>(side_) - 1 : coord - 1;
  }
  return index - coord * stride_[u] + next * stride_[u];
}

}  // namespace silt
