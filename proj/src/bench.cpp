// SPDX-License-Identifier: Apache-2.0

#include "mxs/bench.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace mxs
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
  {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    item = trim(item);
    if (!item.empty())
    {
      out.push_back(item);
    }
  }
  return out;
}

double to_double(const std::string &key, const std::string &v)
{
  try
  {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size())
    {
      throw std::invalid_argument(v);
    }
    return d;
  }
  catch (const std::exception &)
  {
    throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
  }
}

Index to_index(const std::string &key, const std::string &v)
{
  const double d = to_double(key, v);
  if (d != std::floor(d) || d < 0)
  {
    throw ConfigError("config: " + key + " expects a nonnegative integer, got '" + v + "'");
  }
  return static_cast<Index>(d);
}

std::vector<Mesh> to_meshes(const std::string &key, const std::string &v)
{
  std::vector<Mesh> out;
  for (const auto &item : split_list(v))
  {
    try
    {
      out.push_back(parse_mesh(item));
    }
    catch (const ConfigError &e)
    {
      throw ConfigError("config: " + key + ": " + e.what());
    }
  }
  if (out.empty())
  {
    throw ConfigError("config: " + key + " needs at least one mesh");
  }
  return out;
}

std::string fmt(double v)
{
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string mesh_label(const Mesh &mesh)
{
  return std::to_string(mesh[0]) + "x" + std::to_string(mesh[1]) + "x" +
         std::to_string(mesh[2]);
}

Mesh parse_mesh(const std::string &text)
{
  std::string t = text;
  for (auto &ch : t)
  {
    if (ch == 'x' || ch == 'X' || ch == ',')
    {
      ch = ' ';
    }
  }
  std::istringstream is(t);
  Mesh m{};
  std::string rest;
  if (!(is >> m[0] >> m[1] >> m[2]) || (is >> rest) || m[0] < 1 || m[1] < 1 || m[2] < 1)
  {
    throw ConfigError("bad mesh '" + text + "', expected NXxNYxNZ or NX,NY,NZ");
  }
  return m;
}

void BenchConfig::set(const std::string &key, const std::string &value)
{
  const std::string v = trim(value);
  if (key == "run.meshes")
  {
    meshes = to_meshes(key, v);
  }
  else if (key == "run.gamma")
  {
    gamma = to_double(key, v);
    if (!(gamma >= 0.0))
    {
      throw ConfigError("config: run.gamma must be nonnegative");
    }
  }
  else if (key == "run.seed")
  {
    try
    {
      if (v.empty() || v.find('-') != std::string::npos)
      {
        throw std::invalid_argument(v);
      }
      seed = std::stoull(v);
    }
    catch (const std::exception &)
    {
      throw ConfigError("config: run.seed expects an unsigned integer, got '" + v + "'");
    }
  }
  else if (key == "run.out")
  {
    out_dir = v;
  }
  else if (key == "scene.eps_inside")
  {
    eps_inside = to_double(key, v);
  }
  else if (key == "scene.radius")
  {
    radius = to_double(key, v);
  }
  else if (key == "pml.order")
  {
    pml.order = static_cast<int>(to_index(key, v));
  }
  else if (key == "pml.reflection")
  {
    pml.reflection = to_double(key, v);
  }
  else if (key == "pml.multiplier")
  {
    pml.multiplier = to_double(key, v);
  }
  else if (key == "pml.sigma_max")
  {
    const double s = to_double(key, v);
    pml.sigma_max = {s, s, -1.0};
  }
  else if (key == "table2.tol")
  {
    table2_tol = to_double(key, v);
  }
  else if (key == "table2.meshes")
  {
    table2_meshes = to_meshes(key, v);
  }
  else if (key == "table3.tol")
  {
    table3_tol = to_double(key, v);
  }
  else if (key == "table4.tol")
  {
    table4_tol.clear();
    for (const auto &item : split_list(v))
    {
      table4_tol.push_back(to_double(key, item));
    }
    if (table4_tol.empty())
    {
      throw ConfigError("config: table4.tol needs at least one value");
    }
  }
  else if (key == "solver.restart")
  {
    restart = to_index(key, v);
  }
  else if (key == "solver.maxiter")
  {
    maxiter = to_index(key, v);
  }
  else if (key == "solver.inner_tol")
  {
    inner_tol = to_double(key, v);
  }
  else if (key == "solver.middle")
  {
    if (v == "schur-cg")
    {
      middle_mode = MiddleOptions::Mode::SchurCg;
    }
    else if (v == "lu")
    {
      middle_mode = MiddleOptions::Mode::Lu;
    }
    else
    {
      throw ConfigError("config: solver.middle must be schur-cg or lu");
    }
  }
  else if (key == "fs.ordering")
  {
    if (v == "natural")
    {
      fs_ordering = FsOptions::Ordering::Natural;
    }
    else if (v == "aux-first")
    {
      fs_ordering = FsOptions::Ordering::AuxFirst;
    }
    else
    {
      throw ConfigError("config: fs.ordering must be natural or aux-first");
    }
  }
  else if (key == "ritz.k")
  {
    ritz_k = to_index(key, v);
  }
  else if (key == "ritz.mesh")
  {
    ritz_mesh = parse_mesh(v);
  }
  else
  {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

BenchConfig BenchConfig::parse(std::istream &is)
{
  BenchConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line))
  {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
    {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

BenchConfig BenchConfig::load(const std::string &path)
{
  std::ifstream f(path);
  if (!f)
  {
    throw ConfigError("cannot open config file " + path);
  }
  return parse(f);
}

ProblemSpec BenchConfig::problem_spec(const Mesh &mesh) const
{
  ProblemSpec spec = reference_spec(mesh);
  spec.scene.eps_inside = eps_inside;
  for (auto &s : spec.scene.spheres)
  {
    s.radius = radius;
  }
  spec.pml = pml;
  return spec;
}

NestedOptions BenchConfig::nested_options(double tol) const
{
  NestedOptions o;
  o.gamma = gamma;
  o.restart = restart;
  o.tol = tol;
  o.maxiter = maxiter;
  o.middle.mode = middle_mode;
  o.middle.inner_tol = inner_tol;
  return o;
}

double BenchConfig::table4_tol_for(std::size_t row) const
{
  return table4_tol[std::min(row, table4_tol.size() - 1)];
}

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t RngStream::next_u64()
{
  return splitmix64(seed_ + (counter_++) * 0x9E3779B97F4A7C15ULL);
}

double RngStream::next_uniform()
{
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::next_normal()
{
  if (have_spare_)
  {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  have_spare_ = true;
  return r * std::cos(t);
}

Vector RngStream::normal_vector(Index n)
{
  Vector v(static_cast<std::size_t>(n));
  for (auto &x : v)
  {
    x = next_normal();
  }
  return v;
}

ExactRhs make_exact_rhs(const Problem &problem, double gamma, std::uint64_t seed)
{
  RngStream rng(seed);
  ExactRhs r;
  r.x_star = rng.normal_vector(problem.N());
  r.b.resize(r.x_star.size());
  problem.extended().apply_shifted(gamma, r.x_star, r.b);
  return r;
}

std::vector<Table1Row> run_table1(const BenchConfig &config)
{
  std::vector<Table1Row> rows;
  for (const auto &mesh : config.meshes)
  {
    const auto p = build_problem(config.problem_spec(mesh));
    rows.push_back({mesh, p->N(), p->n(), p->m()});
  }
  return rows;
}

std::vector<Table2Row> run_table2(const BenchConfig &config)
{
  std::vector<Table2Row> rows;
  for (const auto &mesh : config.table2_meshes)
  {
    Table2Row row;
    row.mesh = mesh;
    try
    {
      const auto p = build_problem(config.problem_spec(mesh));
      const NormPair norms = skew_symmetric_diagnostics(p->coupling, config.gamma);
      row.h_norm = norms.symmetric;
      row.s_norm = norms.skew;
      const NestedSchurSolver solver(p->blocks, p->coupling, config.nested_options(1e-6));
      RngStream rng(config.seed);
      const Vector x_star = rng.normal_vector(p->n());
      Vector b(x_star.size());
      solver.apply_outer(x_star, b);
      const LinearOperator T = solver.outer_operator();
      const LinearOperator P = solver.middle().as_operator();
      KrylovOptions ko;
      ko.tol = config.table2_tol;
      ko.maxiter = config.maxiter;
      const auto t0 = Clock::now();
      const SolveResult res = bicgstab2(T, &P, b, ko);
      row.seconds = seconds_since(t0);
      row.converged = res.report.converged;
      row.cycles = res.report.iterations;
      row.matvecs = res.report.matvecs;
      row.residual = res.report.final_residual;
    }
    catch (const std::exception &e)
    {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<Table3Row> run_table3(const BenchConfig &config)
{
  std::vector<Table3Row> rows;
  for (const auto &mesh : config.meshes)
  {
    Table3Row row;
    row.mesh = mesh;
    try
    {
      const auto p = build_problem(config.problem_spec(mesh));
      const ExactRhs rhs = make_exact_rhs(*p, config.gamma, config.seed);
      const NestedSchurSolver solver(p->blocks, p->coupling,
                                     config.nested_options(config.table3_tol));
      const SolveResult res = solver.solve(rhs.b);
      row.converged = res.report.converged;
      row.residual = res.report.final_residual;
      row.outer = res.report.iterations;
      row.max_inner = res.report.max_inner();
      row.seconds = res.report.wall_time;
      Vector d = res.x;
      axpy(-1.0, rhs.x_star, d);
      row.error = norm2(d) / norm2(rhs.x_star);
    }
    catch (const std::exception &e)
    {
      row.failure = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<Table4Row> run_table4(const BenchConfig &config)
{
  std::vector<Table4Row> rows;
  for (std::size_t k = 0; k < config.meshes.size(); ++k)
  {
    const auto &mesh = config.meshes[k];
    const double tol = config.table4_tol_for(k);
    const auto p = build_problem(config.problem_spec(mesh));
    const ExactRhs rhs = make_exact_rhs(*p, config.gamma, config.seed);

    Table4Row nested;
    nested.mesh = mesh;
    nested.method = "nested";
    nested.tol = tol;
    try
    {
      const auto t0 = Clock::now();
      const NestedSchurSolver solver(p->blocks, p->coupling, config.nested_options(tol));
      nested.setup_seconds = seconds_since(t0);
      const SolveResult res = solver.solve(rhs.b);
      nested.converged = res.report.converged;
      nested.iterations = res.report.iterations;
      nested.max_inner = res.report.max_inner();
      nested.residual = res.report.final_residual;
      nested.seconds = res.report.wall_time;
    }
    catch (const std::exception &e)
    {
      nested.failure = e.what();
    }
    rows.push_back(nested);

    Table4Row fs;
    fs.mesh = mesh;
    fs.method = "fs";
    fs.tol = tol;
    try
    {
      const auto t0 = Clock::now();
      const FsPreconditioner prec(p->blocks, p->coupling, config.gamma,
                                  FsOptions{config.fs_ordering});
      fs.setup_seconds = seconds_since(t0);
      fs.fill1 = prec.fill_ratio1();
      fs.fill2 = prec.fill_ratio2();
      const SolveResult res = solve_fs(p->extended(), prec, rhs.b, tol, config.maxiter);
      fs.converged = res.report.converged;
      fs.iterations = res.report.iterations;
      fs.residual = res.report.final_residual;
      fs.seconds = res.report.wall_time;
    }
    catch (const std::exception &e)
    {
      fs.failure = e.what();
    }
    rows.push_back(fs);
  }
  return rows;
}

std::vector<RitzRun> run_ritz(const BenchConfig &config)
{
  const auto p = build_problem(config.problem_spec(config.ritz_mesh));
  std::vector<RitzRun> runs;
  {
    const NestedSchurSolver solver(p->blocks, p->coupling,
                                   config.nested_options(config.table3_tol));
    RngStream rng(config.seed);
    const Vector v = rng.normal_vector(p->n());
    const LinearOperator T = solver.outer_operator();
    const LinearOperator P = solver.middle().as_operator();
    const RitzResult r = fom_ritz(T, &P, v, config.ritz_k);
    runs.push_back({"nested", r.values, r.imag_ratio(), r.breakdown});
  }
  {
    const FsPreconditioner prec(p->blocks, p->coupling, config.gamma,
                                FsOptions{config.fs_ordering});
    const ExtendedOperator op = p->extended();
    const double g = config.gamma;
    const LinearOperator A{op.size(), [&op, g](std::span<const double> x, std::span<double> y)
                           { op.apply_shifted(g, x, y); }};
    const LinearOperator P = prec.as_operator();
    RngStream rng(config.seed);
    const Vector v = rng.normal_vector(p->N());
    const RitzResult r = fom_ritz(A, &P, v, config.ritz_k);
    runs.push_back({"fs", r.values, r.imag_ratio(), r.breakdown});
  }
  return runs;
}

std::vector<std::string> dump_matrices(const BenchConfig &config)
{
  const auto p = build_problem(config.problem_spec(config.meshes.front()));
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  const std::string tag = mesh_label(config.meshes.front());
  std::vector<std::string> written;
  auto put = [&](const std::string &name, const SparseMatrix &A)
  {
    const auto path = (dir / (name + "_" + tag + ".mtx")).string();
    write_matrix_market(path, A);
    written.push_back(path);
  };
  put("K", p->blocks.K);
  put("M_mu", p->blocks.M_mu.to_sparse());
  put("M_eps", p->blocks.M_eps.to_sparse());
  put("M_sigma1", p->blocks.M_sigma1.to_sparse());
  put("M_sigma2", p->blocks.M_sigma2.to_sparse());
  put("B1", p->coupling.B1);
  put("B2", p->coupling.B2);
  if (p->N() <= 100000)
  {
    put("calA", p->extended().assemble());
  }
  return written;
}

void write_csv(std::ostream &os, const std::vector<Table1Row> &rows)
{
  os << "mesh,N,n,m\n";
  for (const auto &r : rows)
  {
    os << mesh_label(r.mesh) << ',' << r.N << ',' << r.n << ',' << r.m << '\n';
  }
}

void write_csv(std::ostream &os, const std::vector<Table2Row> &rows)
{
  os << "mesh,converged,bicgstab2_cycles,matvecs,true_residual,H_norm1,S_norm1,time_s,"
        "error\n";
  for (const auto &r : rows)
  {
    os << mesh_label(r.mesh) << ',' << r.converged << ',' << r.cycles << ',' << r.matvecs
       << ',' << fmt(r.residual) << ',' << fmt(r.h_norm) << ',' << fmt(r.s_norm) << ','
       << fmt(r.seconds) << ",\"" << r.error << "\"\n";
  }
}

void write_csv(std::ostream &os, const std::vector<Table3Row> &rows)
{
  os << "mesh,converged,true_residual,solution_error,outer_iterations,max_inner_iterations,"
        "time_s,error\n";
  for (const auto &r : rows)
  {
    os << mesh_label(r.mesh) << ',' << r.converged << ',' << fmt(r.residual) << ','
       << fmt(r.error) << ',' << r.outer << ',' << r.max_inner << ',' << fmt(r.seconds)
       << ",\"" << r.failure << "\"\n";
  }
}

void write_csv(std::ostream &os, const std::vector<Table4Row> &rows)
{
  os << "mesh,method,tol,converged,iterations,max_inner_iterations,true_residual,solve_time_s,"
        "setup_time_s,fill_ratio1,fill_ratio2,error\n";
  for (const auto &r : rows)
  {
    os << mesh_label(r.mesh) << ',' << r.method << ',' << fmt(r.tol) << ',' << r.converged
       << ',' << r.iterations << ',' << r.max_inner << ',' << fmt(r.residual) << ','
       << fmt(r.seconds) << ',' << fmt(r.setup_seconds) << ',' << fmt(r.fill1) << ','
       << fmt(r.fill2) << ",\"" << r.failure << "\"\n";
  }
}

void write_csv(std::ostream &os, const std::vector<RitzRun> &runs)
{
  os << "operator,re,im\n";
  for (const auto &run : runs)
  {
    for (const auto &v : run.values)
    {
      os << run.label << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
    }
  }
  for (const auto &run : runs)
  {
    os << "# " << run.label << " max|Im|/max|Re| = " << fmt(run.imag_ratio)
       << (run.breakdown ? " (breakdown, partial spectrum)" : "") << '\n';
  }
}

}  // namespace mxs
