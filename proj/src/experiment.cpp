#include "dlrk/experiment.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "dlrk/advection.hpp"
#include "dlrk/collision.hpp"

#ifndef DLRK_VERSION
#define DLRK_VERSION "0.0.0"
#endif

namespace dlrk {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view version() { return DLRK_VERSION; }

Problem parse_problem(std::string_view name) {
  if (name == "Sine") return Problem::Sine;
  if (name == "ShockTube") return Problem::ShockTube;
  if (name == "BkwHomogeneous") return Problem::BkwHomogeneous;
  if (name == "BgkSine") return Problem::BgkSine;
  if (name == "Custom") return Problem::Custom;
  throw ConfigError("unknown problem '" + std::string(name) + "'");
}

std::string_view to_string(Problem p) {
  switch (p) {
    case Problem::Sine: return "Sine";
    case Problem::ShockTube: return "ShockTube";
    case Problem::BkwHomogeneous: return "BkwHomogeneous";
    case Problem::BgkSine: return "BgkSine";
    case Problem::Custom: return "Custom";
  }
  return "?";
}

namespace {

// Field-path aware accessors for the config document.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& item : node_.items())
      if (!ok.count(item.key())) fail(item.key(), "unknown field");
  }

  bool has(const char* key) const { return node_.contains(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "expected a finite number");
    return d;
  }

  Index integer(const char* key, Index fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<Index>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  Vector array(const char* key) const {
    const json& v = node_.at(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    Vector out(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key, "expected an array of numbers");
      out(static_cast<Index>(i)) = v[i].get<double>();
    }
    return out;
  }

  Reader child(const char* key) const { return Reader(has(key) ? node_.at(key) : empty(), join(key)); }

  template <class F>
  auto parse(const char* key, F&& fn) const {
    try {
      return fn();
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(join(key) + ": " + msg);
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  std::string join(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& node_;
  std::string path_;
};

bool is_bgk(Problem p) { return p == Problem::BgkSine; }

double two_pi_x(double x) { return 2.0 * std::numbers::pi * x; }

}  // namespace

void ExperimentSpec::validate() const {
  if (snapshot_every < 1) throw ConfigError("output.snapshot_every: must be >= 1");
  if (is_bgk(problem) && solver.vgrid.dim != 1)
    throw ConfigError("velocity.dim: the BGK problem needs one velocity dimension");
  if (!is_bgk(problem) && problem != Problem::Custom && solver.vgrid.dim != 2)
    throw ConfigError("velocity.dim: Boltzmann problems need two velocity dimensions");
  if (problem == Problem::Custom) {
    if (!custom) throw ConfigError("custom: initial moments are required for the Custom problem");
    if (custom->cells() != solver.xgrid.n_x) throw ConfigError("custom: field length must equal grid.n_x");
    if (custom->dim() != solver.vgrid.dim) throw ConfigError("custom: velocity components must match velocity.dim");
  }
  if (solver.vgrid.dim == 1 && solver.method == Method::KslNonstiff)
    throw ConfigError("method: KslNonstiff needs two velocity dimensions");
  solver.validate();
}

ExperimentSpec parse_config(const json& doc) {
  const Reader root(doc, "");
  root.allow({"problem", "eps", "lambda", "dt", "t_final", "rank", "method", "sxl_tol", "truncation", "grid",
              "velocity", "collision", "output", "custom", "bkw_t0"});

  ExperimentSpec spec;
  spec.problem = root.parse("problem", [&] { return parse_problem(root.text("problem", "Sine")); });
  const Problem pb = spec.problem;
  SolverConfig& cfg = spec.solver;

  cfg.eps = root.number("eps", 1.0);
  if (!(cfg.eps > 0.0)) root.fail("eps", "must be positive");
  const bool fluid = cfg.eps < 1e-2;
  const bool shock = pb == Problem::ShockTube;

  // Grids
  const Reader grid = root.child("grid");
  grid.allow({"n_x", "x_min", "x_max", "boundary"});
  const Index nx_default = pb == Problem::BkwHomogeneous ? 4 : 100;
  const std::string bc_default = shock ? "neumann" : "periodic";
  const Boundary bc = grid.parse("boundary", [&] { return parse_boundary(grid.text("boundary", bc_default)); });
  cfg.xgrid = grid.parse("", [&] {
    return SpatialGrid::make(grid.integer("n_x", nx_default), grid.number("x_min", 0.0), grid.number("x_max", 1.0), bc);
  });

  const Reader vel = root.child("velocity");
  vel.allow({"dim", "n_v", "L_v"});
  const int dim = static_cast<int>(vel.integer("dim", is_bgk(pb) ? 1 : 2));
  const Index nv = vel.integer("n_v", is_bgk(pb) ? 64 : 32);
  cfg.vgrid = vel.parse("", [&] { return VelocityGrid::make(dim, nv, vel.number("L_v", 8.4)); });

  const Reader coll = root.child("collision");
  coll.allow({"R", "conservative"});
  cfg.collision_R = coll.number("R", cfg.vgrid.half_width);
  cfg.collision_conservative = coll.boolean("conservative", false);

  // Scheme
  cfg.method = root.parse("method", [&] {
    return parse_method(root.text("method", pb == Problem::BkwHomogeneous ? "FullTensor" : "DlrXL"));
  });
  Index rank_default = fluid ? 10 : 6;
  if (shock) rank_default = cfg.eps > 1e-4 ? 14 : 20;
  cfg.rank = root.integer("rank", rank_default);
  if (cfg.rank < 1) root.fail("rank", "must be >= 1");

  double dt_default = shock ? 1e-4 : 1e-3;
  if (pb == Problem::BkwHomogeneous) dt_default = 1e-2;
  cfg.dt = root.number("dt", dt_default);
  if (!(cfg.dt > 0.0)) root.fail("dt", "must be positive");
  cfg.t_final = root.number("t_final", pb == Problem::BkwHomogeneous ? 1.0 : 0.1);
  if (!(cfg.t_final >= 0.0)) root.fail("t_final", "must be nonnegative");

  double tol_default = fluid ? 0.05 : 1.0;
  if (shock) tol_default = fluid ? 0.01 : 1.0;
  cfg.sxl_tol = root.number("sxl_tol", tol_default);
  if (!(cfg.sxl_tol >= 0.0)) root.fail("sxl_tol", "must be nonnegative");

  if (is_bgk(pb)) {
    cfg.lambda = 1.0;
    spec.lambda_auto = false;
    if (root.has("lambda") && root.number("lambda", 1.0) != 1.0) root.fail("lambda", "the BGK problem fixes lambda = 1");
  } else if (!root.has("lambda") || (doc.at("lambda").is_string() && doc.at("lambda") == "Auto")) {
    cfg.lambda.reset();
    spec.lambda_auto = true;
  } else {
    const double lam = root.number("lambda", 0.0);
    if (!(lam > 0.0)) root.fail("lambda", "must be positive or \"Auto\"");
    cfg.lambda = lam;
    spec.lambda_auto = false;
  }

  const Reader trunc = root.child("truncation");
  trunc.allow({"mode", "threshold"});
  const std::string mode = trunc.text("mode", "FixedRank");
  if (mode == "FixedRank") {
    cfg.truncation = Truncation::fixed(cfg.rank);
  } else if (mode == "Threshold") {
    if (!trunc.has("threshold")) trunc.fail("threshold", "required in Threshold mode");
    const double th = trunc.number("threshold", 0.0);
    if (!(th >= 0.0)) trunc.fail("threshold", "must be nonnegative");
    cfg.truncation = Truncation::tail(th);
  } else {
    trunc.fail("mode", "expected FixedRank or Threshold");
  }

  const Reader out = root.child("output");
  out.allow({"dir", "snapshot_every", "dump_full"});
  spec.output_dir = out.text("dir", "");
  spec.snapshot_every = out.integer("snapshot_every", 100);
  spec.dump_full = out.boolean("dump_full", false);

  spec.bkw_t0 = root.number("bkw_t0", 2.0);

  if (root.has("custom")) {
    const Reader c = root.child("custom");
    c.allow({"rho", "u1", "u2", "T"});
    for (const char* key : {"rho", "u1", "T"})
      if (!c.has(key)) c.fail(key, "missing");
    const Vector rho = c.array("rho");
    const Vector T = c.array("T");
    Matrix u(rho.size(), dim);
    const Vector u1 = c.array("u1");
    if (u1.size() != rho.size() || T.size() != rho.size()) c.fail("", "fields must have equal length");
    u.col(0) = u1;
    if (dim == 2) {
      const Vector u2 = c.has("u2") ? c.array("u2") : Vector(Vector::Zero(rho.size()));
      if (u2.size() != rho.size()) c.fail("u2", "length mismatch");
      u.col(1) = u2;
    }
    spec.custom = MacroFields::from_primitive(rho, u, T);
  }

  spec.validate();
  return spec;
}

ExperimentSpec parse_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return parse_config(doc);
}

MacroFields initial_moments(const ExperimentSpec& spec) {
  const SpatialGrid& xg = spec.solver.xgrid;
  const int dim = spec.solver.vgrid.dim;
  const Index n = xg.n_x;
  Vector rho(n), T(n);
  Matrix u = Matrix::Zero(n, dim);
  switch (spec.problem) {
    case Problem::Sine:
      for (Index i = 0; i < n; ++i) {
        const double x = xg.center(i);
        rho(i) = (2.0 + std::sin(two_pi_x(x))) / 3.0;
        u(i, 0) = 0.2;
        T(i) = (3.0 + std::cos(two_pi_x(x))) / 4.0;
      }
      break;
    case Problem::ShockTube:
      for (Index i = 0; i < n; ++i) {
        const bool left = xg.center(i) <= 0.5;
        rho(i) = left ? 1.0 : 0.125;
        T(i) = left ? 1.0 : 0.25;
      }
      break;
    case Problem::BgkSine:
      for (Index i = 0; i < n; ++i) {
        const double x = xg.center(i);
        rho(i) = (2.0 + std::sin(two_pi_x(x))) / 3.0;
        u(i, 0) = 0.2 + 0.1 * std::cos(two_pi_x(x));
        T(i) = 1.0;
      }
      break;
    case Problem::BkwHomogeneous: {
      // Moments of the BKW profile: unit density and temperature, zero drift.
      rho.setOnes();
      T.setOnes();
      break;
    }
    case Problem::Custom: return *spec.custom;
  }
  return MacroFields::from_primitive(rho, u, T);
}

Vector bkw_profile(const VelocityGrid& vg, double t) {
  require(vg.dim == 2, "bkw_profile: two velocity dimensions required");
  const double K = 1.0 - 0.5 * std::exp(-t / 8.0);
  const Vector a = vg.speed_squared();
  Vector f(a.size());
  for (Index j = 0; j < a.size(); ++j) {
    const double g = std::exp(-a(j) / (2.0 * K)) / (2.0 * std::numbers::pi * K);
    f(j) = g * (2.0 - 1.0 / K + (1.0 - K) * a(j) / (2.0 * K * K));
  }
  return f;
}

Vector bkw_time_derivative(const VelocityGrid& vg, double t) {
  require(vg.dim == 2, "bkw_time_derivative: two velocity dimensions required");
  const double K = 1.0 - 0.5 * std::exp(-t / 8.0);
  const double dK = std::exp(-t / 8.0) / 16.0;
  const Vector a = vg.speed_squared();
  Vector df(a.size());
  for (Index j = 0; j < a.size(); ++j) {
    const double g = std::exp(-a(j) / (2.0 * K)) / (2.0 * std::numbers::pi * K);
    const double h = 2.0 - 1.0 / K + (1.0 - K) * a(j) / (2.0 * K * K);
    const double dg = g * (-1.0 / K + a(j) / (2.0 * K * K));
    const double dh = 1.0 / (K * K) + a(j) * (K - 2.0) / (2.0 * K * K * K);
    df(j) = dK * (dg * h + g * dh);
  }
  return df;
}

Matrix initial_field(const ExperimentSpec& spec) {
  const VelocityGrid& vg = spec.solver.vgrid;
  if (spec.problem == Problem::BkwHomogeneous) {
    const Vector f = bkw_profile(vg, spec.bkw_t0);
    return Vector::Ones(spec.solver.xgrid.n_x) * f.transpose();
  }
  const MacroFields m = initial_moments(spec);
  if (vg.dim == 1 && is_bgk(spec.problem)) return maxwellian_bgk_1v(m.rho, m.u.col(0), vg);
  return maxwellian(m, vg);
}

double RunManifest::max_relative_mass_drift() const {
  if (ledger.empty()) return 0.0;
  const double m0 = ledger.front().totals.mass;
  double worst = 0.0;
  for (const auto& s : ledger) worst = std::max(worst, std::abs(s.totals.mass - m0) / std::abs(m0));
  return worst;
}

json RunManifest::to_json() const {
  json j;
  j["config"] = config;
  j["version"] = version;
  j["wall_seconds"] = wall_seconds;
  j["steps"] = steps;
  j["collision_calls"] = collision_calls;
  json ranks = json::array();
  for (const auto& r : rank_history)
    ranks.push_back({{"step", r.step}, {"t", r.t}, {"rank_before_trunc", r.rank_before_trunc},
                     {"rank_after_trunc", r.rank_after_trunc}, {"augmented", r.augmented}});
  j["rank_history"] = ranks;
  json led = json::array();
  for (const auto& s : ledger) {
    std::vector<double> mom(s.totals.momentum.data(), s.totals.momentum.data() + s.totals.momentum.size());
    led.push_back({{"step", s.step}, {"t", s.t}, {"mass", s.totals.mass}, {"momentum", mom},
                   {"energy", s.totals.energy}});
  }
  j["conservation"] = led;
  j["max_relative_mass_drift"] = max_relative_mass_drift();
  return j;
}

namespace {

json echo_config(const ExperimentSpec& spec, double lambda) {
  const SolverConfig& c = spec.solver;
  json j;
  j["problem"] = to_string(spec.problem);
  j["eps"] = c.eps;
  j["lambda"] = lambda;
  j["lambda_auto"] = spec.lambda_auto;
  j["dt"] = c.dt;
  j["t_final"] = c.t_final;
  j["rank"] = c.rank;
  j["method"] = to_string(c.method);
  j["sxl_tol"] = c.sxl_tol;
  if (c.truncation.mode == Truncation::Mode::FixedRank)
    j["truncation"] = {{"mode", "FixedRank"}, {"rank", c.rank}};
  else
    j["truncation"] = {{"mode", "Threshold"}, {"threshold", c.truncation.threshold}};
  j["grid"] = {{"n_x", c.xgrid.n_x}, {"x_min", c.xgrid.x_min}, {"x_max", c.xgrid.x_max},
               {"boundary", to_string(c.xgrid.bc)}};
  j["velocity"] = {{"dim", c.vgrid.dim}, {"n_v", c.vgrid.n}, {"L_v", c.vgrid.half_width}};
  j["collision"] = {{"R", c.collision_R}, {"conservative", c.collision_conservative}};
  j["output"] = {{"dir", spec.output_dir.string()}, {"snapshot_every", spec.snapshot_every},
                 {"dump_full", spec.dump_full}};
  if (spec.problem == Problem::BkwHomogeneous) j["bkw_t0"] = spec.bkw_t0;
  return j;
}

template <class F>
auto with_step(Index step, F&& fn) {
  const std::string where = "step " + std::to_string(step) + ": ";
  try {
    return fn();
  } catch (const IntegrationFailure& e) {
    throw IntegrationFailure(where + e.what());
  } catch (const DomainError& e) {
    throw DomainError(where + e.what());
  }
}

}  // namespace

RunResult run_experiment(const ExperimentSpec& input) {
  input.validate();
  const auto t_start = std::chrono::steady_clock::now();
  ExperimentSpec spec = input;
  SolverConfig& cfg = spec.solver;
  const SpatialGrid& xg = cfg.xgrid;
  const VelocityGrid& vg = cfg.vgrid;
  const bool bgk = vg.dim == 1;

  const MacroFields m0 = initial_moments(spec);
  if (bgk) cfg.lambda = 1.0;
  else if (!cfg.lambda) cfg.lambda = 1.1 * loss_bound(m0.rho);

  const Matrix f0 = initial_field(spec);
  const auto steps = static_cast<Index>(std::llround(cfg.t_final / cfg.dt));

  std::optional<CollisionOperator> op;
  if (!bgk) op.emplace(vg, cfg.collision_R, cfg.collision_conservative);

  RunResult result;
  RunManifest& man = result.manifest;
  man.config = echo_config(spec, *cfg.lambda);
  man.version = std::string(version());
  man.steps = steps;

  const bool write = !spec.output_dir.empty();
  if (write) fs::create_directories(spec.output_dir);

  const bool full = cfg.method == Method::FullTensor;
  Matrix f;
  LowRankState state;
  if (full) f = f0;
  else state = from_full(f0, xg, vg, cfg.effective_truncation());

  auto moments_now = [&] { return full ? compute_moments_full(f, vg) : compute_moments_lowrank(state, vg); };
  auto record = [&](Index step, const MacroFields& m) {
    const double t = static_cast<double>(step) * cfg.dt;
    man.ledger.push_back({step, t, conserved_totals(m, xg)});
    const bool snap = step % spec.snapshot_every == 0 || step == steps;
    if (!snap) return;
    std::ostringstream name;
    name << "snap_" << std::setw(6) << std::setfill('0') << step << ".csv";
    result.snapshots.push_back({step, t, name.str()});
    if (!write) return;
    write_snapshot_csv(spec.output_dir / name.str(), xg, m);
    if (spec.dump_full) {
      std::ostringstream bin;
      bin << "full_" << std::setw(6) << std::setfill('0') << step << ".bin";
      write_full_dump(spec.output_dir / bin.str(), full ? f : evaluate_full(state), vg.n, vg.dim);
    }
  };

  MacroFields m = moments_now();
  record(0, m);
  for (Index n = 1; n <= steps; ++n) {
    StepReport rep;
    with_step(n, [&] {
      if (full) {
        f = bgk ? bgk_full_tensor_step(f, cfg) : full_tensor_step(f, cfg, *op, &rep);
      } else if (bgk) {
        const BgkVariant variant = cfg.method == Method::DlrXL ? BgkVariant::XL : BgkVariant::SXL;
        state = bgk_step(state, cfg, variant, &rep);
      } else {
        state = dlr_step(state, cfg, *op, &rep);
      }
      return 0;
    });
    man.collision_calls += rep.collision_calls;
    man.rank_history.push_back(
        {n, static_cast<double>(n) * cfg.dt, rep.rank_before_trunc, rep.rank_after_trunc, rep.augmented});
    m = moments_now();
    record(n, m);
  }
  result.final_moments = m;

  man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (write) {
    write_snapshot_index(spec.output_dir / "snapshots.csv", result.snapshots);
    write_rank_history(spec.output_dir / "rank_history.csv", man.rank_history);
    std::ofstream out(spec.output_dir / "manifest.json");
    out << std::setw(2) << man.to_json() << '\n';
  }
  return result;
}

FieldError relative_error(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "relative_error: size mismatch");
  const Vector d = a - b;
  FieldError e;
  const double nb2 = b.norm();
  const double nbi = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
  const double d2 = d.norm();
  const double di = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  e.l2 = nb2 > 0.0 ? d2 / nb2 : d2;
  e.linf = nbi > 0.0 ? di / nbi : di;
  return e;
}

std::vector<SnapshotMetrics> compare(const fs::path& run_a, const fs::path& run_b) {
  const auto ia = read_snapshot_index(run_a / "snapshots.csv");
  const auto ib = read_snapshot_index(run_b / "snapshots.csv");
  std::vector<SnapshotMetrics> rows;
  for (const auto& ea : ia) {
    const SnapshotEntry* match = nullptr;
    for (const auto& eb : ib)
      if (std::abs(eb.t - ea.t) <= 1e-9 * std::max(1.0, std::abs(ea.t))) match = &eb;
    if (!match) continue;
    const SnapshotTable a = read_snapshot_csv(run_a / ea.file);
    const SnapshotTable b = read_snapshot_csv(run_b / match->file);
    if (a.x.size() != b.x.size() || (a.x - b.x).cwiseAbs().maxCoeff() > 1e-12)
      throw ConfigError("compare: spatial grids differ");
    rows.push_back({ea.step, ea.t, relative_error(a.rho, b.rho), relative_error(a.u1, b.u1), relative_error(a.T, b.T)});
  }
  if (rows.empty()) throw ConfigError("compare: no snapshot times in common");
  return rows;
}

std::string metrics_csv(const std::vector<SnapshotMetrics>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "step,t,rho_l2,rho_linf,u1_l2,u1_linf,T_l2,T_linf\n";
  for (const auto& r : rows)
    out << r.step << ',' << r.t << ',' << r.rho.l2 << ',' << r.rho.linf << ',' << r.u1.l2 << ',' << r.u1.linf << ','
        << r.T.l2 << ',' << r.T.linf << '\n';
  return out.str();
}

std::string metrics_table(const std::vector<SnapshotMetrics>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "step" << std::setw(12) << "t";
  for (const char* h : {"rho L2", "rho Linf", "u1 L2", "u1 Linf", "T L2", "T Linf"}) out << std::setw(12) << h;
  out << '\n';
  out << std::scientific << std::setprecision(3);
  for (const auto& r : rows) {
    out << std::setw(8) << r.step << std::setw(12) << r.t;
    for (double v : {r.rho.l2, r.rho.linf, r.u1.l2, r.u1.linf, r.T.l2, r.T.linf}) out << std::setw(12) << v;
    out << '\n';
  }
  return out.str();
}

ModeCheck check_modes(Index n_v, double L, double R, std::uint64_t seed) {
  const KernelModes modes = KernelModes::build(n_v, L, R);
  const double s = std::numbers::pi / (2.0 * L);
  std::mt19937_64 rng(seed);
  ModeCheck out;

  // Tabulated weights against composite Gauss-Legendre quadrature of the Bessel integral.
  std::vector<std::pair<std::uint64_t, double>> entries(modes.table().begin(), modes.table().end());
  std::sort(entries.begin(), entries.end());
  std::uniform_int_distribution<std::size_t> pick(0, entries.size() - 1);
  const double scale = std::numbers::pi * R * R;
  constexpr int panels = 24;
  for (int trial = 0; trial < 64; ++trial) {
    const auto& [key, value] = entries[pick(rng)];
    const double a = s * std::sqrt(static_cast<double>(key >> 32));
    const double b = s * std::sqrt(static_cast<double>(key & 0xffffffffu));
    double integral = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double lo = R * k / panels;
      const double hi = R * (k + 1) / panels;
      integral += boost::math::quadrature::gauss<double, 30>::integrate(
          [&](double xi) { return xi * std::cyl_bessel_j(0.0, a * xi) * std::cyl_bessel_j(0.0, b * xi); }, lo, hi);
    }
    out.max_table_error = std::max(out.max_table_error, std::abs(2.0 * std::numbers::pi * integral - value) / scale);
  }

  // Fast path against the naive reference on smooth random data.
  const VelocityGrid vg = VelocityGrid::make(2, n_v, L);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  auto smooth = [&] {
    const double c1 = U(rng), c2 = U(rng), amp = 0.3 * U(rng);
    const Vector v1 = vg.component(0), v2 = vg.component(1);
    Vector f(vg.size());
    for (Index j = 0; j < f.size(); ++j) {
      const double r2 = (v1(j) - c1) * (v1(j) - c1) + (v2(j) - c2) * (v2(j) - c2);
      f(j) = std::exp(-r2 / 2.0) * (1.0 + amp * std::cos(v1(j))) / (2.0 * std::numbers::pi);
    }
    return f;
  };
  const Vector g = smooth();
  const Vector f = smooth();
  const Vector fast = q_bilinear(g, f, modes);
  const Vector ref = q_bilinear_reference(g, f, vg, R);
  out.fast_vs_reference = (fast - ref).cwiseAbs().maxCoeff() / std::max(ref.cwiseAbs().maxCoeff(), 1e-300);

  const Vector q = q_quadratic(f, modes);
  const double rho = f.sum() * vg.weight();
  out.mass_defect = std::abs(q.sum() * vg.weight()) / rho;

  out.passed = out.max_table_error <= 1e-12 && out.fast_vs_reference <= 1e-10 && out.mass_defect <= 1e-12;
  return out;
}

}  // namespace dlrk
