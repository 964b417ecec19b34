// SPDX-License-Identifier: Apache-2.0

#include "mxs/pml.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mxs
{

double PmlParams::resolved_sigma_max(const YeeGrid &grid, int d) const
{
  if (sigma_max[d] >= 0.0)
  {
    return sigma_max[d];
  }
  const double delta = grid.pml_thickness(d);
  if (delta <= 0.0)
  {
    return 0.0;
  }
  return -(order + 1) * std::log(reflection) / (2.0 * delta) * multiplier;
}

double sigma_profile(double x, double length, double thickness, double sigma_max, int order)
{
  if (thickness <= 0.0)
  {
    return 0.0;
  }
  const double depth = std::max(thickness - x, x - (length - thickness));
  if (depth <= 1e-12 * thickness)
  {
    return 0.0;
  }
  return sigma_max * std::pow(depth / thickness, order);
}

namespace
{

// Depth into the PML in cell units for a lattice coordinate xi (index + stagger).
double depth_cells(double xi, Index cells, Index pml)
{
  if (pml == 0)
  {
    return 0.0;
  }
  return std::max(static_cast<double>(pml) - xi, xi - static_cast<double>(cells - pml));
}

}  // namespace

SigmaProfiles build_sigma_profiles(const DofMap &dofs, const PmlParams &params)
{
  const YeeGrid &g = dofs.grid();
  SigmaProfiles s;
  s.order = params.order;
  for (int d = 0; d < 3; ++d)
  {
    s.sigma_max[d] = params.resolved_sigma_max(g, d);
    if (s.sigma_max[d] < 0.0 || !std::isfinite(s.sigma_max[d]))
    {
      throw std::invalid_argument("build_sigma_profiles: sigma_max must be nonnegative");
    }
  }
  const Index p = dofs.points_per_component();
  const Index n1 = dofs.n1();
  for (int d = 0; d < 3; ++d)
  {
    s.at_h[d].assign(static_cast<std::size_t>(n1), 0.0);
    s.at_e[d].assign(static_cast<std::size_t>(n1), 0.0);
  }
  for (int c = 0; c < 6; ++c)
  {
    const auto comp = static_cast<Component>(c);
    const auto st = DofMap::stagger(comp);
    auto &target = c < 3 ? s.at_h : s.at_e;
    const Index base = (c % 3) * p;
    for (Index l = 0; l < p; ++l)
    {
      const auto ijk = dofs.ijk(l);
      for (int d = 0; d < 3; ++d)
      {
        const double xi = static_cast<double>(ijk[d]) + st[d];
        const double depth = depth_cells(xi, g.cells[d], g.pml_cells[d]);
        if (depth > 0.0)
        {
          target[d][base + l] =
            s.sigma_max[d] * std::pow(depth / static_cast<double>(g.pml_cells[d]), params.order);
        }
      }
    }
  }
  return s;
}

void add_pml_conductivity(const DofMap &dofs, const SigmaProfiles &profiles,
                          MaterialFields &materials)
{
  const Index p = dofs.points_per_component();
  const Index n1 = dofs.n1();
  for (Index s = 0; s < n1; ++s)
  {
    const int c = static_cast<int>(s / p);
    // component c is stretched by the two transverse directions
    const int a = (c + 1) % 3, b = (c + 2) % 3;
    if (!dofs.is_void(s))
    {
      materials.sigma1[s] += materials.mu[s] * (profiles.at_h[a][s] + profiles.at_h[b][s]);
    }
    if (!dofs.is_void(n1 + s))
    {
      materials.sigma2[s] += materials.eps[s] * (profiles.at_e[a][s] + profiles.at_e[b][s]);
    }
  }
}

PmlCoupling assemble_coupling(const SigmaProfiles &profiles, const MaxwellBlocks &blocks)
{
  const Index n1 = blocks.n1();
  if (profiles.n1() != n1 || blocks.n2() != n1)
  {
    throw DimensionError("assemble_coupling: profiles and blocks disagree on n1");
  }
  const Index p = n1 / 3;
  PmlCoupling pc;
  pc.sigma_h.diag.resize(static_cast<std::size_t>(n1));
  pc.sigma_e.diag.resize(static_cast<std::size_t>(n1));
  pc.sigma_star_h.diag.resize(static_cast<std::size_t>(n1));
  pc.sigma_star_e.diag.resize(static_cast<std::size_t>(n1));
  for (Index s = 0; s < n1; ++s)
  {
    const int c = static_cast<int>(s / p);
    const int a = (c + 1) % 3, b = (c + 2) % 3;
    pc.sigma_h.diag[s] = profiles.at_h[c][s];
    pc.sigma_e.diag[s] = profiles.at_e[c][s];
    pc.sigma_star_h.diag[s] = profiles.at_h[a][s] * profiles.at_h[b][s];
    pc.sigma_star_e.diag[s] = profiles.at_e[a][s] * profiles.at_e[b][s];
  }

  const std::array<const Vector *, 4> b2_diag{&pc.sigma_e.diag, &pc.sigma_h.diag,
                                              &pc.sigma_star_h.diag, &pc.sigma_star_e.diag};
  for (int blk = 0; blk < 4; ++blk)
  {
    for (Index s = 0; s < n1; ++s)
    {
      if ((*b2_diag[blk])[s] != 0.0)
      {
        pc.kept.push_back(blk * n1 + s);
      }
    }
  }

  const SparseMatrix K1t = transpose(blocks.K1);  // row s: column s of K1
  const SparseMatrix K2 = transpose(blocks.K2t);  // row s: column s of K2^T
  const Index m = pc.m();
  const Index n = 2 * n1;
  RowBuilder b1h(m, n), b1e(m, n), b2h(m, n), b2e(m, n);
  auto copy_row = [](RowBuilder &rb, const SparseMatrix &M, Index row, Index offset, double f)
  {
    for (Index q = M.row_offsets[row]; q < M.row_offsets[row + 1]; ++q)
    {
      rb.push(offset + M.col_indices[q], f * M.values[q]);
    }
  };
  for (Index r = 0; r < m; ++r)
  {
    const int blk = static_cast<int>(pc.kept[r] / n1);
    const Index s = pc.kept[r] % n1;
    switch (blk)
    {
      case 0:
        copy_row(b1h, K1t, s, 0, 1.0);
        b2h.push(n1 + s, pc.sigma_e.diag[s]);
        break;
      case 1:
        copy_row(b1e, K2, s, n1, -1.0);
        b2e.push(s, pc.sigma_h.diag[s]);
        break;
      case 2:
        b1h.push(s, -1.0);
        b2h.push(s, -pc.sigma_star_h.diag[s]);
        break;
      default:
        b1e.push(n1 + s, -1.0);
        b2e.push(n1 + s, -pc.sigma_star_e.diag[s]);
        break;
    }
    b1h.finish_row();
    b1e.finish_row();
    b2h.finish_row();
    b2e.finish_row();
  }
  pc.B1H = b1h.build();
  pc.B1E = b1e.build();
  pc.B2H = b2h.build();
  pc.B2E = b2e.build();
  pc.B1 = add(pc.B1H, pc.B1E);
  pc.B2 = add(pc.B2H, pc.B2E);
  return pc;
}

SparseMatrix untrim(const SparseMatrix &B, std::span<const Index> kept, Index raw_rows)
{
  if (static_cast<Index>(kept.size()) != B.nrows)
  {
    throw DimensionError("untrim: kept list does not match row count");
  }
  SparseMatrix R(raw_rows, B.ncols);
  Index r = 0;
  for (Index i = 0; i < raw_rows; ++i)
  {
    if (r < B.nrows && kept[r] == i)
    {
      R.col_indices.insert(R.col_indices.end(), B.col_indices.begin() + B.row_offsets[r],
                           B.col_indices.begin() + B.row_offsets[r + 1]);
      R.values.insert(R.values.end(), B.values.begin() + B.row_offsets[r],
                      B.values.begin() + B.row_offsets[r + 1]);
      ++r;
    }
    R.row_offsets[i + 1] = R.nnz();
  }
  return R;
}

SparseMatrix b1t_b2_formula(const MaxwellBlocks &blocks, const PmlCoupling &coupling)
{
  const SparseMatrix S11 = coupling.sigma_star_h.to_sparse();
  const SparseMatrix S22 = coupling.sigma_star_e.to_sparse();
  const SparseMatrix S12 = scale_cols(blocks.K1, coupling.sigma_e.diag);
  const SparseMatrix S21 = scaled(scale_cols(blocks.K2t, coupling.sigma_h.diag), -1.0);
  const std::array<Index, 2> sizes{blocks.n1(), blocks.n2()};
  return block_matrix({{&S11, &S12}, {&S21, &S22}}, sizes, sizes);
}

void apply_b1t_b2(const MaxwellBlocks &blocks, const PmlCoupling &coupling,
                  std::span<const double> x, std::span<double> y, double alpha)
{
  const Index n1 = blocks.n1();
  if (static_cast<Index>(x.size()) != 2 * n1 || static_cast<Index>(y.size()) != 2 * n1)
  {
    throw DimensionError("apply_b1t_b2: length mismatch");
  }
  auto xh = x.subspan(0, n1), xe = x.subspan(n1);
  auto yh = y.subspan(0, n1), ye = y.subspan(n1);
  Vector se(static_cast<std::size_t>(n1)), sh(static_cast<std::size_t>(n1));
  for (Index i = 0; i < n1; ++i)
  {
    se[i] = coupling.sigma_e.diag[i] * xe[i];
    sh[i] = coupling.sigma_h.diag[i] * xh[i];
  }
  spmv_add(blocks.K1, se, yh, alpha);
  spmv_add(blocks.K2t, sh, ye, -alpha);
  for (Index i = 0; i < n1; ++i)
  {
    yh[i] += alpha * coupling.sigma_star_h.diag[i] * xh[i];
    ye[i] += alpha * coupling.sigma_star_e.diag[i] * xe[i];
  }
}

ExtendedOperator::ExtendedOperator(const MaxwellBlocks &blocks, const PmlCoupling &coupling)
  : blocks_(&blocks), coupling_(&coupling), B1t_(transpose(coupling.B1))
{
  if (coupling.n() != blocks.n())
  {
    throw DimensionError("ExtendedOperator: coupling and blocks disagree on n");
  }
}

void ExtendedOperator::apply(std::span<const double> y, std::span<double> out) const
{
  if (static_cast<Index>(y.size()) != size() || static_cast<Index>(out.size()) != size())
  {
    throw DimensionError("ExtendedOperator::apply: length mismatch");
  }
  auto yf = y.subspan(0, n()), ya = y.subspan(n());
  auto of = out.subspan(0, n()), oa = out.subspan(n());
  blocks_->apply_A(yf, of);
  spmv_add(B1t_, ya, of);
  spmv(coupling_->B2, yf, oa);
  for (auto &v : oa)
  {
    v = -v;
  }
}

Vector ExtendedOperator::apply(std::span<const double> y) const
{
  Vector out(y.size());
  apply(y, out);
  return out;
}

void ExtendedOperator::apply_shifted(double gamma, std::span<const double> y,
                                     std::span<double> out) const
{
  apply(y, out);
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    out[i] = y[i] + gamma * out[i];
  }
}

SparseMatrix ExtendedOperator::assemble() const
{
  if (size() > 100000)
  {
    throw DimensionError("ExtendedOperator::assemble: N > 1e5");
  }
  const SparseMatrix A = blocks_->assemble_A();
  const SparseMatrix mB2 = scaled(coupling_->B2, -1.0);
  const std::array<Index, 2> sizes{n(), m()};
  return block_matrix({{&A, &B1t_}, {&mB2, nullptr}}, sizes, sizes);
}

SparseMatrix assemble_shifted_extended(const MaxwellBlocks &blocks,
                                       const PmlCoupling &coupling, double gamma)
{
  const SparseMatrix IA = blocks.assemble_shifted(gamma);
  const SparseMatrix gB1t = scaled(transpose(coupling.B1), gamma);
  const SparseMatrix mgB2 = scaled(coupling.B2, -gamma);
  const SparseMatrix Im = SparseMatrix::identity(coupling.m());
  const std::array<Index, 2> sizes{blocks.n(), coupling.m()};
  return block_matrix({{&IA, &gB1t}, {&mgB2, &Im}}, sizes, sizes);
}

NormPair skew_symmetric_diagnostics(const PmlCoupling &coupling, double gamma)
{
  if (coupling.m() == 0)
  {
    return {};
  }
  const SparseMatrix P = scaled(multiply(transpose(coupling.B1), coupling.B2), gamma * gamma);
  return {one_norm(symmetric_part(P)), one_norm(skew_part(P))};
}

}  // namespace mxs
