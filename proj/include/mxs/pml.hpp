// SPDX-License-Identifier: Apache-2.0

#ifndef MXS_PML_HPP
#define MXS_PML_HPP

#include <array>
#include <span>
#include <utility>
#include "mxs/sparse.hpp"
#include "mxs/yee.hpp"

namespace mxs
{

struct PmlParams
{
  int order = 2;
  double reflection = 1e-8;
  // Scales the reflection-rule value of sigma_max in every direction.
  double multiplier = 1.0;
  // Explicit per-direction sigma_max; negative entries fall back to the rule.
  std::array<double, 3> sigma_max{-1.0, -1.0, -1.0};

  // -(q+1) ln(R0) / (2 delta) * multiplier, or the explicit value.
  double resolved_sigma_max(const YeeGrid &grid, int d) const;
};

//
// Graded conductivities sigma_d = sigma_max_d (depth/thickness)^q sampled at every slot
// location of each field, void slots included (the lattice is continued past the
// walls). Index layout follows the per-field blocks of the DofMap.
//
struct SigmaProfiles
{
  // [direction][slot], slot in 0..n1 for H locations, 0..n2 for E locations
  std::array<Vector, 3> at_h;
  std::array<Vector, 3> at_e;
  std::array<double, 3> sigma_max{};
  int order = 2;

  Index n1() const { return static_cast<Index>(at_h[0].size()); }
};

double sigma_profile(double x, double length, double thickness, double sigma_max, int order);

SigmaProfiles build_sigma_profiles(const DofMap &dofs, const PmlParams &params);

// Adds the stretched-coordinate loss terms to the main equations: the x component of
// H (resp. E) receives mu (sigma_y + sigma_z) (resp. eps (sigma_y + sigma_z)), etc.
// Void slots are left untouched.
void add_pml_conductivity(const DofMap &dofs, const SigmaProfiles &profiles,
                          MaterialFields &materials);

//
// Auxiliary PML variables. Raw slots come in four blocks of n1 each:
//   0: psi1' = Sigma_E e          (fed back through K1)
//   1: psi2' = Sigma_H h          (fed back through -K2^T)
//   2: psi3' = -Sigma*_H h        (fed back through -I into h)
//   3: psi4' = -Sigma*_E e        (fed back through -I into e)
// A slot is kept iff its row of the untrimmed B2 is nonzero. The H/E split puts raw
// blocks 0 and 2 into the H part, 1 and 3 into the E part.
//
struct PmlCoupling
{
  DiagonalMatrix sigma_h, sigma_e;            // diag[sx, sy, sz] per field location
  DiagonalMatrix sigma_star_h, sigma_star_e;  // diag[sy*sz, sx*sz, sx*sy]
  std::vector<Index> kept;                    // sorted indices into 4*n1 raw slots
  SparseMatrix B1, B2;                        // m x n
  SparseMatrix B1H, B2H, B1E, B2E;            // m x n

  Index m() const { return static_cast<Index>(kept.size()); }
  Index n() const { return B1.ncols; }
  Index n1() const { return n() / 2; }
  int raw_block(Index slot) const { return static_cast<int>(kept[slot] / n1()); }
};

PmlCoupling assemble_coupling(const SigmaProfiles &profiles, const MaxwellBlocks &blocks);

// Untrimmed 4n1 x n matrices rebuilt from the trimmed ones (zero rows reinserted).
SparseMatrix untrim(const SparseMatrix &B, std::span<const Index> kept, Index raw_rows);

// [[Sigma*_H, K1 Sigma_E], [-K2^T Sigma_H, Sigma*_E]]
SparseMatrix b1t_b2_formula(const MaxwellBlocks &blocks, const PmlCoupling &coupling);
// y += alpha * B1^T B2 x via the block formula, without forming the product.
void apply_b1t_b2(const MaxwellBlocks &blocks, const PmlCoupling &coupling,
                  std::span<const double> x, std::span<double> y, double alpha);

//
// Extended operator [[A, B1^T], [-B2, 0]] of size N = n + m.
//
class ExtendedOperator
{
public:
  ExtendedOperator(const MaxwellBlocks &blocks, const PmlCoupling &coupling);

  Index n() const { return blocks_->n(); }
  Index m() const { return coupling_->m(); }
  Index size() const { return n() + m(); }
  const MaxwellBlocks &blocks() const { return *blocks_; }
  const PmlCoupling &coupling() const { return *coupling_; }

  void apply(std::span<const double> y, std::span<double> out) const;
  Vector apply(std::span<const double> y) const;
  // (I + gamma calA) y
  void apply_shifted(double gamma, std::span<const double> y, std::span<double> out) const;

  // Assembled calA; limited to N <= 1e5.
  SparseMatrix assemble() const;

private:
  const MaxwellBlocks *blocks_;
  const PmlCoupling *coupling_;
  SparseMatrix B1t_;
};

// I + gamma calA assembled, with no size cap.
SparseMatrix assemble_shifted_extended(const MaxwellBlocks &blocks,
                                       const PmlCoupling &coupling, double gamma);

struct NormPair
{
  double symmetric = 0.0;  // ||H||_1
  double skew = 0.0;       // ||S||_1
};

// 1-norms of the symmetric and skew parts of gamma^2 B1^T B2.
NormPair skew_symmetric_diagnostics(const PmlCoupling &coupling, double gamma);

}  // namespace mxs

#endif  // MXS_PML_HPP
