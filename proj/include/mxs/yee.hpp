// SPDX-License-Identifier: Apache-2.0

#ifndef MXS_YEE_HPP
#define MXS_YEE_HPP

#include <array>
#include <span>
#include <stdexcept>
#include <vector>
#include "mxs/sparse.hpp"

namespace mxs
{

class GridError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//
// Uniform Cartesian mesh on [0,Lx]x[0,Ly]x[0,Lz]. PML layers are counted in cells,
// the same thickness on both sides of a direction.
//
struct YeeGrid
{
  std::array<Index, 3> cells{};
  std::array<double, 3> h{};
  std::array<double, 3> length{};
  std::array<Index, 3> pml_cells{};
  // Tangential E vanishes on z = 0 and z = Lz.
  bool pec_z = true;

  Index nx() const { return cells[0]; }
  Index ny() const { return cells[1]; }
  Index nz() const { return cells[2]; }
  double pml_thickness(int d) const { return static_cast<double>(pml_cells[d]) * h[d]; }
};

YeeGrid build_grid(std::array<Index, 3> cells, std::array<double, 3> box,
                   std::array<double, 3> pml_thickness, bool pec_z = true);

enum class Component : int
{
  Hx = 0,
  Hy = 1,
  Hz = 2,
  Ex = 3,
  Ey = 4,
  Ez = 5
};

struct DofCounts
{
  Index n = 0;
  Index n1 = 0;
  Index n2 = 0;
};

DofCounts dof_counts(const YeeGrid &grid);

//
// Augmented DOF numbering: every component owns (nx+1)(ny+1)(nz+1) slots, ordered
// Hx,Hy,Hz,Ex,Ey,Ez, each lexicographic in (i,j,k) with i fastest. E sits on cell
// edges, H on cell faces:
//   Ex (i+1/2, j, k)      Hx (i, j+1/2, k+1/2)
//   Ey (i, j+1/2, k)      Hy (i+1/2, j, k+1/2)
//   Ez (i, j, k+1/2)      Hz (i+1/2, j+1/2, k)
// Slots whose staggered index would leave the mesh are void, as are tangential E
// slots on PEC z-walls.
//
class DofMap
{
public:
  explicit DofMap(const YeeGrid &grid);

  const YeeGrid &grid() const { return grid_; }
  Index points_per_component() const { return p_; }
  Index n() const { return 6 * p_; }
  Index n1() const { return 3 * p_; }

  // Global index over the full (h, e) vector.
  Index index(Component c, Index i, Index j, Index k) const
  {
    return static_cast<Index>(c) * p_ + lattice(i, j, k);
  }
  Index lattice(Index i, Index j, Index k) const { return i + sx_ * (j + sy_ * k); }
  std::array<Index, 3> ijk(Index lattice_index) const;

  // Physical location of a slot, continuing the lattice for void slots.
  std::array<double, 3> position(Component c, Index i, Index j, Index k) const;
  std::array<double, 3> position(Index global) const;
  bool is_void(Component c, Index i, Index j, Index k) const;
  bool is_void(Index global) const { return void_mask_[global] != 0; }
  std::span<const unsigned char> void_mask() const { return void_mask_; }

  static std::array<double, 3> stagger(Component c);

private:
  YeeGrid grid_;
  Index sx_, sy_, p_;
  std::vector<unsigned char> void_mask_;
};

struct Sphere
{
  std::array<double, 3> center;
  double radius;
};

struct PhotonicCrystalScene
{
  std::vector<Sphere> spheres;
  double eps_inside = 8.9;
  double eps_outside = 1.0;

  // 3x3x3 spheres of radius 0.4 at (2.5+i, 2.5+j, 1.5+k), i,j,k = -1,0,1.
  static PhotonicCrystalScene reference();
};

struct MaterialFields
{
  Vector mu, sigma1;   // H slots, length n1
  Vector eps, sigma2;  // E slots, length n2
};

MaterialFields sample_materials(const DofMap &dofs, const PhotonicCrystalScene &scene);

// Discrete curl mapping e (n2) to h locations (n1); entries +-1/h. Void rows and
// columns are empty.
SparseMatrix assemble_curl(const DofMap &dofs);

//
// A = [[M1, K1], [-K2^T, M2]] with M1 = M_mu^-1 M_s1, K1 = M_mu^-1 K,
// M2 = M_eps^-1 M_s2, K2^T = M_eps^-1 K^T.
//
struct MaxwellBlocks
{
  SparseMatrix K, Kt;
  DiagonalMatrix M_mu, M_sigma1, M_eps, M_sigma2;
  Vector M1, M2;  // diagonals
  SparseMatrix K1, K2t;

  Index n1() const { return K.nrows; }
  Index n2() const { return K.ncols; }
  Index n() const { return n1() + n2(); }

  // y = A x
  void apply_A(std::span<const double> x, std::span<double> y) const;
  SparseMatrix assemble_A() const;
  // I + gamma A
  SparseMatrix assemble_shifted(double gamma) const;
};

MaxwellBlocks assemble_blocks(const DofMap &dofs, const MaterialFields &materials);

}  // namespace mxs

#endif  // MXS_YEE_HPP
