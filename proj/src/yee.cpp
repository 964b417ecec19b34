// SPDX-License-Identifier: Apache-2.0

#include "mxs/yee.hpp"

#include <cmath>
#include <string>

namespace mxs
{

YeeGrid build_grid(std::array<Index, 3> cells, std::array<double, 3> box,
                   std::array<double, 3> pml_thickness, bool pec_z)
{
  YeeGrid g;
  g.pec_z = pec_z;
  for (int d = 0; d < 3; ++d)
  {
    if (cells[d] < 1)
    {
      throw GridError("build_grid: need at least one cell per direction");
    }
    if (!(box[d] > 0.0))
    {
      throw GridError("build_grid: box lengths must be positive");
    }
    if (pml_thickness[d] < 0.0)
    {
      throw GridError("build_grid: negative PML thickness");
    }
    g.cells[d] = cells[d];
    g.length[d] = box[d];
    g.h[d] = box[d] / static_cast<double>(cells[d]);
    const double ratio = pml_thickness[d] / g.h[d];
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    {
      throw GridError("build_grid: PML thickness " + std::to_string(pml_thickness[d]) +
                      " is not a whole number of cells in direction " + std::to_string(d));
    }
    g.pml_cells[d] = static_cast<Index>(rounded);
    if (2 * g.pml_cells[d] > cells[d])
    {
      throw GridError("build_grid: PML layers overlap in direction " + std::to_string(d));
    }
  }
  return g;
}

DofCounts dof_counts(const YeeGrid &grid)
{
  const Index p = (grid.nx() + 1) * (grid.ny() + 1) * (grid.nz() + 1);
  return {6 * p, 3 * p, 3 * p};
}

std::array<double, 3> DofMap::stagger(Component c)
{
  switch (c)
  {
    case Component::Hx: return {0.0, 0.5, 0.5};
    case Component::Hy: return {0.5, 0.0, 0.5};
    case Component::Hz: return {0.5, 0.5, 0.0};
    case Component::Ex: return {0.5, 0.0, 0.0};
    case Component::Ey: return {0.0, 0.5, 0.0};
    case Component::Ez: return {0.0, 0.0, 0.5};
  }
  return {};
}

DofMap::DofMap(const YeeGrid &grid)
  : grid_(grid), sx_(grid.nx() + 1), sy_(grid.ny() + 1),
    p_((grid.nx() + 1) * (grid.ny() + 1) * (grid.nz() + 1)),
    void_mask_(static_cast<std::size_t>(6 * p_), 0)
{
  for (int c = 0; c < 6; ++c)
  {
    const auto comp = static_cast<Component>(c);
    for (Index k = 0; k <= grid.nz(); ++k)
    {
      for (Index j = 0; j <= grid.ny(); ++j)
      {
        for (Index i = 0; i <= grid.nx(); ++i)
        {
          void_mask_[index(comp, i, j, k)] = is_void(comp, i, j, k) ? 1 : 0;
        }
      }
    }
  }
}

std::array<Index, 3> DofMap::ijk(Index l) const
{
  return {l % sx_, (l / sx_) % sy_, l / (sx_ * sy_)};
}

bool DofMap::is_void(Component c, Index i, Index j, Index k) const
{
  const auto s = stagger(c);
  const std::array<Index, 3> idx{i, j, k};
  for (int d = 0; d < 3; ++d)
  {
    if (s[d] != 0.0 && idx[d] == grid_.cells[d])
    {
      return true;
    }
  }
  if (grid_.pec_z && (c == Component::Ex || c == Component::Ey) &&
      (k == 0 || k == grid_.nz()))
  {
    return true;
  }
  return false;
}

std::array<double, 3> DofMap::position(Component c, Index i, Index j, Index k) const
{
  const auto s = stagger(c);
  return {(static_cast<double>(i) + s[0]) * grid_.h[0],
          (static_cast<double>(j) + s[1]) * grid_.h[1],
          (static_cast<double>(k) + s[2]) * grid_.h[2]};
}

std::array<double, 3> DofMap::position(Index global) const
{
  const auto c = static_cast<Component>(global / p_);
  const auto [i, j, k] = ijk(global % p_);
  return position(c, i, j, k);
}

PhotonicCrystalScene PhotonicCrystalScene::reference()
{
  PhotonicCrystalScene s;
  for (int k = -1; k <= 1; ++k)
  {
    for (int j = -1; j <= 1; ++j)
    {
      for (int i = -1; i <= 1; ++i)
      {
        s.spheres.push_back({{2.5 + i, 2.5 + j, 1.5 + k}, 0.4});
      }
    }
  }
  return s;
}

MaterialFields sample_materials(const DofMap &dofs, const PhotonicCrystalScene &scene)
{
  const Index n1 = dofs.n1();
  MaterialFields m;
  m.mu.assign(static_cast<std::size_t>(n1), 1.0);
  m.sigma1.assign(static_cast<std::size_t>(n1), 0.0);
  m.eps.assign(static_cast<std::size_t>(n1), 1.0);
  m.sigma2.assign(static_cast<std::size_t>(n1), 0.0);
  for (Index e = 0; e < n1; ++e)
  {
    const Index g = n1 + e;
    if (dofs.is_void(g))
    {
      continue;
    }
    const auto x = dofs.position(g);
    double eps = scene.eps_outside;
    for (const auto &s : scene.spheres)
    {
      const double dx = x[0] - s.center[0], dy = x[1] - s.center[1], dz = x[2] - s.center[2];
      if (dx * dx + dy * dy + dz * dz < s.radius * s.radius)
      {
        eps = scene.eps_inside;
        break;
      }
    }
    m.eps[e] = eps;
  }
  return m;
}

SparseMatrix assemble_curl(const DofMap &dofs)
{
  const Index n1 = dofs.n1();
  const YeeGrid &g = dofs.grid();
  const Index nx = g.nx(), ny = g.ny(), nz = g.nz();
  const std::array<double, 3> inv_h{1.0 / g.h[0], 1.0 / g.h[1], 1.0 / g.h[2]};

  RowBuilder rb(n1, n1);
  auto push_e = [&](Component c, Index i, Index j, Index k, double v)
  {
    if (!dofs.is_void(c, i, j, k))
    {
      rb.push(dofs.index(c, i, j, k) - n1, v);
    }
  };
  for (int c = 0; c < 3; ++c)
  {
    const auto comp = static_cast<Component>(c);
    for (Index k = 0; k <= nz; ++k)
    {
      for (Index j = 0; j <= ny; ++j)
      {
        for (Index i = 0; i <= nx; ++i)
        {
          if (!dofs.is_void(comp, i, j, k))
          {
            switch (comp)
            {
              case Component::Hx:  // dEz/dy - dEy/dz
                push_e(Component::Ez, i, j + 1, k, inv_h[1]);
                push_e(Component::Ez, i, j, k, -inv_h[1]);
                push_e(Component::Ey, i, j, k + 1, -inv_h[2]);
                push_e(Component::Ey, i, j, k, inv_h[2]);
                break;
              case Component::Hy:  // dEx/dz - dEz/dx
                push_e(Component::Ex, i, j, k + 1, inv_h[2]);
                push_e(Component::Ex, i, j, k, -inv_h[2]);
                push_e(Component::Ez, i + 1, j, k, -inv_h[0]);
                push_e(Component::Ez, i, j, k, inv_h[0]);
                break;
              default:  // Hz: dEy/dx - dEx/dy
                push_e(Component::Ey, i + 1, j, k, inv_h[0]);
                push_e(Component::Ey, i, j, k, -inv_h[0]);
                push_e(Component::Ex, i, j + 1, k, -inv_h[1]);
                push_e(Component::Ex, i, j, k, inv_h[1]);
                break;
            }
          }
          rb.finish_row();
        }
      }
    }
  }
  return rb.build();
}

MaxwellBlocks assemble_blocks(const DofMap &dofs, const MaterialFields &materials)
{
  const Index n1 = dofs.n1();
  auto check_len = [&](const Vector &v, const char *name)
  {
    if (static_cast<Index>(v.size()) != n1)
    {
      throw DimensionError(std::string("assemble_blocks: ") + name + " has wrong length");
    }
  };
  check_len(materials.mu, "mu");
  check_len(materials.sigma1, "sigma1");
  check_len(materials.eps, "eps");
  check_len(materials.sigma2, "sigma2");
  for (Index i = 0; i < n1; ++i)
  {
    if (!(materials.mu[i] > 0.0) && !dofs.is_void(i))
    {
      throw std::invalid_argument("assemble_blocks: nonpositive mu at H slot " +
                                  std::to_string(i));
    }
    if (!(materials.eps[i] > 0.0) && !dofs.is_void(n1 + i))
    {
      throw std::invalid_argument("assemble_blocks: nonpositive eps at E slot " +
                                  std::to_string(i));
    }
  }

  MaxwellBlocks b;
  b.K = assemble_curl(dofs);
  b.Kt = transpose(b.K);
  b.M_mu.diag = materials.mu;
  b.M_sigma1.diag = materials.sigma1;
  b.M_eps.diag = materials.eps;
  b.M_sigma2.diag = materials.sigma2;
  Vector inv_mu(static_cast<std::size_t>(n1)), inv_eps(static_cast<std::size_t>(n1));
  b.M1.resize(static_cast<std::size_t>(n1));
  b.M2.resize(static_cast<std::size_t>(n1));
  for (Index i = 0; i < n1; ++i)
  {
    // void slots may carry placeholder values; they only scale empty rows
    inv_mu[i] = materials.mu[i] > 0.0 ? 1.0 / materials.mu[i] : 1.0;
    inv_eps[i] = materials.eps[i] > 0.0 ? 1.0 / materials.eps[i] : 1.0;
    b.M1[i] = inv_mu[i] * materials.sigma1[i];
    b.M2[i] = inv_eps[i] * materials.sigma2[i];
  }
  b.K1 = scale_rows(inv_mu, b.K);
  b.K2t = scale_rows(inv_eps, b.Kt);
  return b;
}

void MaxwellBlocks::apply_A(std::span<const double> x, std::span<double> y) const
{
  const Index m = n1();
  if (static_cast<Index>(x.size()) != n() || static_cast<Index>(y.size()) != n())
  {
    throw DimensionError("MaxwellBlocks::apply_A: length mismatch");
  }
  auto xh = x.subspan(0, m), xe = x.subspan(m);
  auto yh = y.subspan(0, m), ye = y.subspan(m);
  spmv(K1, xe, yh);
  spmv(K2t, xh, ye);
  for (Index i = 0; i < m; ++i)
  {
    yh[i] += M1[i] * xh[i];
    ye[i] = M2[i] * xe[i] - ye[i];
  }
}

SparseMatrix MaxwellBlocks::assemble_A() const
{
  const SparseMatrix D1 = SparseMatrix::diagonal(M1);
  const SparseMatrix D2 = SparseMatrix::diagonal(M2);
  const SparseMatrix mK2t = scaled(K2t, -1.0);
  const std::array<Index, 2> sizes{n1(), n2()};
  return block_matrix({{&D1, &K1}, {&mK2t, &D2}}, sizes, sizes);
}

SparseMatrix MaxwellBlocks::assemble_shifted(double gamma) const
{
  Vector d1(M1.size()), d2(M2.size());
  for (std::size_t i = 0; i < M1.size(); ++i)
  {
    d1[i] = 1.0 + gamma * M1[i];
    d2[i] = 1.0 + gamma * M2[i];
  }
  const SparseMatrix D1 = SparseMatrix::diagonal(d1);
  const SparseMatrix D2 = SparseMatrix::diagonal(d2);
  const SparseMatrix gK1 = scaled(K1, gamma);
  const SparseMatrix mgK2t = scaled(K2t, -gamma);
  const std::array<Index, 2> sizes{n1(), n2()};
  return block_matrix({{&D1, &gK1}, {&mgK2t, &D2}}, sizes, sizes);
}

}  // namespace mxs
