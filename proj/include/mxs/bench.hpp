// SPDX-License-Identifier: Apache-2.0

#ifndef MXS_BENCH_HPP
#define MXS_BENCH_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>
#include "mxs/solvers.hpp"

namespace mxs
{

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

using Mesh = std::array<Index, 3>;

std::string mesh_label(const Mesh &mesh);
Mesh parse_mesh(const std::string &text);

//
// Benchmark settings. Text form: one "section.key = value" per line, '#' comments.
//
//   run.meshes        = 10x10x6, 20x20x12, 40x40x24
//   run.gamma         = 0.012
//   run.seed          = 1
//   run.out           = .
//   scene.eps_inside  = 8.9
//   scene.radius      = 0.4
//   pml.order         = 2
//   pml.reflection    = 1e-8
//   pml.multiplier    = 1
//   pml.sigma_max     = -1          (negative: reflection rule)
//   table2.tol        = 1e-6
//   table2.meshes     = 20x20x12, 40x40x24, 60x60x36
//   table3.tol        = 1e-10
//   table4.tol        = 1e-10       (or a comma list, one per mesh)
//   solver.restart    = 10
//   solver.maxiter    = 2000
//   solver.inner_tol  = 1e-12
//   solver.middle     = schur-cg    (or lu)
//   fs.ordering       = natural     (or aux-first)
//   ritz.k            = 24
//   ritz.mesh         = 20x20x12
//
struct BenchConfig
{
  std::vector<Mesh> meshes{{10, 10, 6}, {20, 20, 12}, {40, 40, 24}};
  std::vector<Mesh> table2_meshes{{20, 20, 12}, {40, 40, 24}, {60, 60, 36}};
  double gamma = 0.012;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  double eps_inside = 8.9;
  double radius = 0.4;
  PmlParams pml;
  double table2_tol = 1e-6;
  double table3_tol = 1e-10;
  std::vector<double> table4_tol{1e-10};
  Index restart = 10;
  Index maxiter = 2000;
  double inner_tol = 1e-12;
  MiddleOptions::Mode middle_mode = MiddleOptions::Mode::SchurCg;
  FsOptions::Ordering fs_ordering = FsOptions::Ordering::Natural;
  Index ritz_k = 24;
  Mesh ritz_mesh{20, 20, 12};

  static BenchConfig parse(std::istream &is);
  static BenchConfig load(const std::string &path);
  // Applies one "section.key" assignment; throws ConfigError on unknown keys.
  void set(const std::string &key, const std::string &value);

  ProblemSpec problem_spec(const Mesh &mesh) const;
  NestedOptions nested_options(double tol) const;
  double table4_tol_for(std::size_t row) const;
};

//
// Counter-based normal deviates: the k-th 64-bit word is splitmix64(seed + k * 0x9E3779B97F4A7C15),
// uniforms take its top 53 bits as (w >> 11 + 1) * 2^-53 in (0, 1], and normals come in
// Box-Muller pairs sqrt(-2 ln u1) (cos 2 pi u2, sin 2 pi u2).
//
class RngStream
{
public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  double next_uniform();
  double next_normal();
  Vector normal_vector(Index n);

private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

struct Table1Row
{
  Mesh mesh;
  Index N, n, m;
};

struct Table2Row
{
  Mesh mesh;
  bool converged = false;
  Index cycles = 0;
  Index matvecs = 0;
  double residual = 0.0;
  double h_norm = 0.0;
  double s_norm = 0.0;
  double seconds = 0.0;
  std::string error;
};

struct Table3Row
{
  Mesh mesh;
  bool converged = false;
  double residual = 0.0;
  double error = 0.0;  // ||x - x*|| / ||x*||
  Index outer = 0;
  Index max_inner = 0;
  double seconds = 0.0;
  std::string failure;
};

struct Table4Row
{
  Mesh mesh;
  std::string method;  // "nested" or "fs"
  double tol = 0.0;
  bool converged = false;
  Index iterations = 0;
  Index max_inner = 0;
  double residual = 0.0;
  double seconds = 0.0;       // solve time
  double setup_seconds = 0.0; // factorization time
  double fill1 = 0.0, fill2 = 0.0;
  std::string failure;
};

struct RitzRun
{
  std::string label;
  std::vector<std::complex<double>> values;
  double imag_ratio = 0.0;
  bool breakdown = false;
};

std::vector<Table1Row> run_table1(const BenchConfig &config);
std::vector<Table2Row> run_table2(const BenchConfig &config);
std::vector<Table3Row> run_table3(const BenchConfig &config);
std::vector<Table4Row> run_table4(const BenchConfig &config);
std::vector<RitzRun> run_ritz(const BenchConfig &config);
// Writes K, M_mu, M_eps, M_sigma1, M_sigma2, B1, B2 (and calA when N <= 1e5) for the
// first configured mesh; returns the file names written.
std::vector<std::string> dump_matrices(const BenchConfig &config);

void write_csv(std::ostream &os, const std::vector<Table1Row> &rows);
void write_csv(std::ostream &os, const std::vector<Table2Row> &rows);
void write_csv(std::ostream &os, const std::vector<Table3Row> &rows);
void write_csv(std::ostream &os, const std::vector<Table4Row> &rows);
void write_csv(std::ostream &os, const std::vector<RitzRun> &runs);

// Right-hand side (I + gamma calA) x* for a random-normal x* of the problem.
struct ExactRhs
{
  Vector x_star;
  Vector b;
};
ExactRhs make_exact_rhs(const Problem &problem, double gamma, std::uint64_t seed);

}  // namespace mxs

#endif  // MXS_BENCH_HPP
