#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace silt {

/// Largest lattice dimension supported by the fixed-capacity site type.
inline constexpr int kMaxDim = 8;

/// A point of Z^d. Coordinates beyond the active dimension are kept at zero so
/// that sites of equal dimension compare and hash consistently.
using Site = std::array<std::int32_t, kMaxDim>;

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept;
};

/// Throws std::invalid_argument unless 1 <= d <= kMaxDim.
void check_dimension(int d);

/// The cube Q_R = [-R, R]^d intersected with Z^d, stored densely with the first
/// coordinate varying fastest. Doubles as the discrete torus of side 2R+1.
class Box {
 public:
  Box(int dim, int radius);

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  int side() const { return side_; }
  std::size_t size() const { return size_; }

  bool contains(const Site& s) const;
  std::size_t index(const Site& s) const;
  Site site(std::size_t index) const;

  /// Representative of s in Q_R modulo 2R+1 in every coordinate.
  Site wrap(const Site& s) const;

  /// Index of the torus neighbour s + direction * e_axis.
  std::size_t periodic_neighbor(std::size_t index, int axis, int direction) const;

 private:
  int dim_;
  int radius_;
  int side_;
  std::size_t size_;
  std::vector<std::size_t> stride_;
};

}  // namespace silt
