#include "nhanyon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "nhanyon/dynamics.hpp"
#include "nhanyon/otoc.hpp"
#include "nhanyon/spectra.hpp"
#include "nhanyon/symmetry.hpp"
#include "nhanyon/topology.hpp"

namespace nhanyon {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

int worker_count() {
  if (const char* env = std::getenv("NHANYON_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 16u));
}

struct TaskResult {
  json diagnostics;
  std::vector<std::string> files;
};

struct Task {
  std::string name;
  std::function<TaskResult()> work;
};

// Executes tasks over a small worker pool; results keep task order.
void run_tasks(const std::vector<Task>& tasks,
               std::vector<TaskResult>& results,
               std::vector<std::string>& errors) {
  results.assign(tasks.size(), {});
  std::vector<std::string> task_errors(tasks.size());
  std::atomic<std::size_t> next{0};
  const int n_workers =
      std::min<int>(worker_count(), static_cast<int>(tasks.size()));

  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        results[i] = tasks[i].work();
      } catch (const std::exception& e) {
        task_errors[i] = tasks[i].name + ": " + e.what();
      }
    }
  };
  if (n_workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  for (auto& e : task_errors)
    if (!e.empty()) errors.push_back(e);
}

class CsvFile {
 public:
  CsvFile(const fs::path& dir, const std::string& name,
          const std::string& header)
      : path_(dir / name), name_(name) {
    stream_ << header << "\n";
  }

  template <typename... Cols>
  void row(const Cols&... cols) {
    bool first = true;
    ((stream_ << (first ? "" : ","), first = false, put(cols)), ...);
    stream_ << "\n";
  }

  std::string close() {
    std::ofstream out(path_, std::ios::binary);
    out << stream_.str();
    if (!out) throw std::runtime_error("failed to write " + path_.string());
    return name_;
  }

 private:
  void put(double v) { stream_ << fmt(v); }
  void put(int v) { stream_ << v; }
  void put(const std::string& s) { stream_ << s; }

  fs::path path_;
  std::string name_;
  std::ostringstream stream_;
};

std::string write_spectrum_csv(const fs::path& dir, const std::string& name,
                               const Spectrum& spectrum) {
  CsvFile csv(dir, name, "index,re,im");
  for (Eigen::Index i = 0; i < spectrum.values.size(); ++i)
    csv.row(static_cast<int>(i), spectrum.values(i).real(),
            spectrum.values(i).imag());
  return csv.close();
}

std::string write_profile_csv(const fs::path& dir, const std::string& name,
                              const Eigen::MatrixXd& rows,
                              const std::vector<int>& row_ids) {
  CsvFile csv(dir, name, "state_index,site,rho");
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index x = 0; x < rows.cols(); ++x)
      csv.row(row_ids[static_cast<std::size_t>(i)], static_cast<int>(x) + 1,
              rows(i, x));
  return csv.close();
}

std::string write_density_csv(const fs::path& dir, const std::string& name,
                              const TimeSeries& series) {
  CsvFile csv(dir, name, "t,site,n");
  for (std::size_t k = 0; k < series.times.size(); ++k)
    for (Eigen::Index j = 0; j < series.density.cols(); ++j)
      csv.row(series.times[k], static_cast<int>(j) + 1,
              series.density(static_cast<Eigen::Index>(k), j));
  return csv.close();
}

std::string write_imbalance_csv(const fs::path& dir, const std::string& name,
                                const std::vector<double>& times,
                                const std::vector<double>& dn) {
  CsvFile csv(dir, name, "t,dN");
  for (std::size_t k = 0; k < times.size(); ++k) csv.row(times[k], dn[k]);
  return csv.close();
}

std::string write_gamma_csv(
    const fs::path& dir, const std::string& name,
    const std::vector<std::pair<double, Eigen::MatrixXd>>& slices) {
  CsvFile csv(dir, name, "t,q,r,gamma");
  for (const auto& [t, gamma] : slices)
    for (Eigen::Index q = 0; q < gamma.rows(); ++q)
      for (Eigen::Index r = 0; r < gamma.cols(); ++r)
        csv.row(t, static_cast<int>(q) + 1, static_cast<int>(r) + 1,
                gamma(q, r));
  return csv.close();
}

std::string write_otoc_csv(const fs::path& dir, const std::string& name,
                           const OtocGrid& raw, const OtocGrid& normalized) {
  CsvFile csv(dir, name, "t,j,k,re_F,im_F,abs_F_normalized");
  for (std::size_t it = 0; it < raw.times.size(); ++it)
    for (Eigen::Index j = 0; j < raw.f.rows(); ++j)
      csv.row(raw.times[it], static_cast<int>(j) + 1, raw.source,
              raw.f(j, static_cast<Eigen::Index>(it)).real(),
              raw.f(j, static_cast<Eigen::Index>(it)).imag(),
              std::abs(normalized.f(j, static_cast<Eigen::Index>(it))));
  return csv.close();
}

std::string write_winding_csv(const fs::path& dir, const std::string& name,
                              const std::vector<WindingScan>& scans) {
  CsvFile csv(dir, name, "re_Eb,im_Eb,W,residual");
  for (const auto& scan : scans)
    csv.row(scan.reference.real(), scan.reference.imag(), scan.winding,
            scan.residual);
  return csv.close();
}

std::string write_dt_csv(
    const fs::path& dir, const std::string& name,
    const std::vector<std::tuple<double, double, double, double>>& rows) {
  CsvFile csv(dir, name, "theta,U,dt_total,dt_longest");
  for (const auto& [theta, u, total, longest] : rows)
    csv.row(theta, u, total, longest);
  return csv.close();
}

}  // namespace

json ExperimentConfig::to_json() const {
  json j;
  j["preset"] = preset;
  auto set = [&j](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  set("L", sites);
  set("N", particles);
  set("cap", cap);
  set("theta", theta);
  set("U", onsite_u);
  set("alpha", alpha);
  set("J_L", hop_left);
  set("J_R", hop_right);
  set("bc", bc);
  set("phi", twist);
  set("tmax", t_max);
  set("dt", dt);
  set("beta", beta);
  set("slope_eps", slope_eps);
  set("method", method);
  set("initial", initial);
  set("source", source);
  set("exclude_center", exclude_center);
  if (!references.empty()) {
    json list = json::array();
    for (const cd& e : references) list.push_back({e.real(), e.imag()});
    j["Eb"] = list;
  }
  j["out"] = out_dir;
  j["allow_large"] = allow_large;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("preset")) c.preset = j["preset"].get<std::string>();
  auto get = [&j](const char* key, auto& opt) {
    using T = typename std::decay_t<decltype(opt)>::value_type;
    if (j.contains(key)) opt = j[key].get<T>();
  };
  get("L", c.sites);
  get("N", c.particles);
  get("cap", c.cap);
  get("theta", c.theta);
  get("U", c.onsite_u);
  get("alpha", c.alpha);
  get("J_L", c.hop_left);
  get("J_R", c.hop_right);
  get("bc", c.bc);
  get("phi", c.twist);
  get("tmax", c.t_max);
  get("dt", c.dt);
  get("beta", c.beta);
  get("slope_eps", c.slope_eps);
  get("method", c.method);
  get("initial", c.initial);
  get("source", c.source);
  get("exclude_center", c.exclude_center);
  if (j.contains("Eb"))
    for (const auto& e : j["Eb"])
      c.references.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
  if (j.contains("allow_large")) c.allow_large = j["allow_large"].get<bool>();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json j;
  in >> j;
  return from_json(j);
}

const std::vector<std::string>& known_presets() {
  static const std::vector<std::string> presets = {
      "fig1",          "fig2",           "fig3",
      "fig4",          "supp-winding",   "supp-hardcore",
      "supp-arrangements", "supp-weak-alpha", "supp-largeU",
      "supp-n3-correlation", "custom"};
  return presets;
}

ExperimentConfig validate_config(const ExperimentConfig& config,
                                 std::vector<std::string>& errors) {
  ExperimentConfig c = config;
  errors.clear();

  if (std::find(known_presets().begin(), known_presets().end(), c.preset) ==
      known_presets().end())
    errors.push_back("unknown preset '" + c.preset + "'");

  if (c.alpha && (c.hop_left || c.hop_right))
    errors.push_back(
        "alpha and explicit J_L/J_R are both set; choose one parameterization");
  if (c.hop_left && *c.hop_left <= 0.0) errors.push_back("J_L must be > 0");
  if (c.hop_right && *c.hop_right <= 0.0) errors.push_back("J_R must be > 0");

  // Preset defaults; explicit fields win.
  auto fill = [](auto& opt, auto value) {
    if (!opt) opt = value;
  };
  if (c.preset == "supp-weak-alpha") {
    fill(c.sites, 40);
    fill(c.t_max, 20.0);
  } else if (c.preset == "supp-hardcore") {
    fill(c.sites, 20);
    fill(c.cap, 1);
    fill(c.t_max, 10.0);
  } else if (c.preset == "fig4") {
    fill(c.sites, 7);
    fill(c.particles, 4);
    fill(c.beta, 1.0 / 6.0);
    fill(c.t_max, 3.0);
  } else if (c.preset == "supp-winding") {
    fill(c.sites, 20);
    fill(c.bc, std::string("pbc"));
    fill(c.hop_left, 1.0);
    fill(c.hop_right, 1.2);
  } else if (c.preset == "supp-n3-correlation") {
    fill(c.sites, 20);
    fill(c.particles, 3);
  } else if (c.preset == "fig3") {
    fill(c.t_max, 6.0);
    fill(c.onsite_u, 5.0);
  }
  fill(c.sites, 30);
  fill(c.particles, 2);
  fill(c.cap, 0);
  fill(c.theta, -kPi / 2.0);
  fill(c.onsite_u, 4.0);
  if (!c.hop_left && !c.hop_right) fill(c.alpha, 0.1);
  if (c.alpha) {
    c.hop_left = std::exp(-*c.alpha);
    c.hop_right = std::exp(*c.alpha);
  }
  fill(c.bc, std::string("obc"));
  fill(c.twist, 0.0);
  fill(c.t_max, 6.0);
  fill(c.dt, 0.05);
  fill(c.beta, 0.0);
  fill(c.method, std::string("auto"));
  fill(c.initial, std::string("center"));
  fill(c.source, (*c.sites + 1) / 2);
  fill(c.slope_eps, kSlopeEpsPerParticle * std::max(1, *c.particles));

  if (*c.bc != "obc" && *c.bc != "pbc")
    errors.push_back("bc must be 'obc' or 'pbc'");
  if (*c.bc == "obc" && *c.twist != 0.0)
    errors.push_back("a boundary twist phi requires bc=pbc");
  if (*c.method != "auto" && *c.method != "dense" && *c.method != "krylov")
    errors.push_back("method must be dense, krylov or auto");
  if (*c.cap < 0) errors.push_back("cap must be >= 0 (0 = softcore)");
  if (*c.dt <= 0.0) errors.push_back("dt must be > 0");
  if (*c.t_max < 0.0) errors.push_back("tmax must be >= 0");

  const bool imbalance_preset =
      c.preset == "fig2" || c.preset == "fig3" || c.preset == "supp-hardcore" ||
      c.preset == "supp-arrangements" || c.preset == "supp-weak-alpha" ||
      c.preset == "supp-largeU" || c.preset == "custom";
  if (imbalance_preset && *c.sites % 2 != 0 &&
      !c.exclude_center.value_or(false))
    errors.push_back(
        "odd chain length: the density imbalance drops the center site on odd "
        "chains; set exclude_center=true to opt in");
  fill(c.exclude_center, *c.sites % 2 != 0);

  if (c.preset == "supp-winding" && *c.bc != "pbc")
    errors.push_back("the winding preset needs periodic boundaries");

  const double ceiling = c.allow_large ? kDimCeilingLarge : kDimCeiling;
  int max_particles = *c.particles;
  if (c.preset == "fig3") max_particles = c.allow_large ? 6 : 4;
  const int cap_eff = *c.cap > 0 ? *c.cap : max_particles;
  const double dim_est =
      sector_dimension_estimate(*c.sites + 1, max_particles, cap_eff);
  if (dim_est > ceiling)
    errors.push_back("estimated Fock dimension " + fmt_short(dim_est) +
                     " exceeds the ceiling " + fmt_short(ceiling) +
                     (c.allow_large ? "" : " (use --allow-large)"));
  return c;
}

namespace {

struct RunContext {
  ExperimentConfig cfg;
  fs::path dir;

  ModelParams base_params() const {
    ModelParams p;
    p.sites = *cfg.sites;
    p.particles = *cfg.particles;
    p.hop_left = *cfg.hop_left;
    p.hop_right = *cfg.hop_right;
    p.theta = *cfg.theta;
    p.onsite_u = *cfg.onsite_u;
    p.boundary = *cfg.bc == "pbc" ? Boundary::periodic : Boundary::open;
    p.twist = *cfg.twist;
    p.cap = *cfg.cap;
    return p;
  }

  PropagationMethod method_for(const FockBasis& basis) const {
    if (*cfg.method == "dense") return PropagationMethod::dense;
    if (*cfg.method == "krylov") return PropagationMethod::krylov;
    return basis.dim() <= 4096 ? PropagationMethod::dense
                               : PropagationMethod::krylov;
  }

  Vec initial_state(const FockBasis& basis) const {
    const std::string& kind = *cfg.initial;
    if (kind == "center") return uniform_center_state(basis);
    const int L = basis.sites();
    const int mid = (L + 1) / 2;  // 1-based
    if (kind == "same-site") {
      std::vector<int> occ(L, 0);
      occ[mid - 1] = basis.particles();
      return fock_state(basis, occ);
    }
    if (kind == "separated") {
      if (basis.particles() != 2)
        throw std::invalid_argument("separated arrangement is a 2-particle "
                                    "initial state");
      std::vector<int> occ(L, 0);
      occ[mid - 2] = 1;
      occ[mid] = 1;
      return fock_state(basis, occ);
    }
    if (kind.rfind("occ:", 0) == 0) {
      std::vector<int> occ;
      std::stringstream ss(kind.substr(4));
      std::string item;
      while (std::getline(ss, item, ',')) occ.push_back(std::stoi(item));
      return fock_state(basis, occ);
    }
    throw std::invalid_argument("unknown initial state '" + kind + "'");
  }
};

TaskResult spectrum_profile_task(const RunContext& ctx, ModelParams params,
                                 const std::string& tag) {
  TaskResult res;
  const FockBasis basis = params.basis();
  params.boundary = Boundary::open;
  params.twist = 0.0;
  const Spectrum obc = eigendecompose(build_hamiltonian(params, basis));
  ModelParams pbc_params = params;
  pbc_params.boundary = Boundary::periodic;
  const Spectrum pbc = eigendecompose(build_hamiltonian(pbc_params, basis));

  res.files.push_back(
      write_spectrum_csv(ctx.dir, "spectrum_obc_" + tag + ".csv", obc));
  res.files.push_back(
      write_spectrum_csv(ctx.dir, "spectrum_pbc_" + tag + ".csv", pbc));

  const DensityProfile profile = density_profiles(obc, basis);
  std::vector<int> ids(profile.per_state.rows());
  std::iota(ids.begin(), ids.end(), 0);
  res.files.push_back(write_profile_csv(ctx.dir, "profile_" + tag + ".csv",
                                        profile.per_state, ids));

  res.diagnostics["obc_max_im"] = obc.values.imag().cwiseAbs().maxCoeff();
  res.diagnostics["pbc_max_im"] = pbc.values.imag().cwiseAbs().maxCoeff();
  res.diagnostics["obc_residual"] = obc.residual;
  json avg = json::array();
  for (Eigen::Index x = 0; x < profile.average.size(); ++x)
    avg.push_back(profile.average(x));
  res.diagnostics["average_profile"] = avg;
  return res;
}

TaskResult density_task(const RunContext& ctx, const ModelParams& params,
                        const Vec& psi0, const std::string& tag,
                        bool write_density) {
  TaskResult res;
  const FockBasis basis = params.basis();
  const TimeSeries series = density_series(params, basis, psi0, *ctx.cfg.t_max,
                                           *ctx.cfg.dt,
                                           ctx.method_for(basis));
  if (write_density)
    res.files.push_back(
        write_density_csv(ctx.dir, "density_" + tag + ".csv", series));
  const std::vector<double> dn = imbalance(series, *ctx.cfg.exclude_center);
  res.files.push_back(
      write_imbalance_csv(ctx.dir, "imbalance_" + tag + ".csv", series.times,
                          dn));
  const ReversedInterval rev =
      reversed_interval(dn, *ctx.cfg.dt, *ctx.cfg.slope_eps);
  res.diagnostics["dt_total"] = rev.total;
  res.diagnostics["dt_longest"] = rev.longest;
  res.diagnostics["final_imbalance"] = dn.back();
  return res;
}

std::vector<Task> plan_fig1(const RunContext& ctx) {
  struct Set {
    const char* tag;
    double theta, u;
  };
  const std::vector<Set> sets = {{"a", 0.0, 0.0},
                                 {"b", 0.0, 4.0},
                                 {"c", -kPi / 2.0, 0.0},
                                 {"d", -kPi / 2.0, 4.0}};
  std::vector<Task> tasks;
  for (const auto& set : sets) {
    ModelParams params = ctx.base_params();
    params.theta = set.theta;
    params.onsite_u = set.u;
    tasks.push_back({std::string("spectra_") + set.tag, [ctx, params, set] {
                       return spectrum_profile_task(ctx, params, set.tag);
                     }});
    tasks.push_back({std::string("density_") + set.tag, [ctx, params, set] {
                       ModelParams open = params;
                       open.boundary = Boundary::open;
                       open.twist = 0.0;
                       const FockBasis basis = open.basis();
                       return density_task(ctx, open,
                                           uniform_center_state(basis),
                                           set.tag, true);
                     }});
  }
  return tasks;
}

std::vector<Task> plan_fig2(const RunContext& ctx) {
  std::vector<Task> tasks;
  for (double alpha : {0.05, 0.1, 0.2, 0.3}) {
    ModelParams params = ctx.base_params();
    const double ratio = std::exp(alpha);
    params.hop_left = 1.0 / ratio;
    params.hop_right = ratio;
    const std::string tag = "alpha" + fmt_short(alpha);
    tasks.push_back({"imbalance_" + tag, [ctx, params, tag] {
                       const FockBasis basis = params.basis();
                       return density_task(ctx, params,
                                           uniform_center_state(basis), tag,
                                           false);
                     }});
  }
  for (double theta :
       {-3.0 * kPi / 4.0, -kPi / 2.0, -kPi / 4.0, 0.0, kPi / 4.0, kPi / 2.0,
        3.0 * kPi / 4.0, kPi}) {
    ModelParams params = ctx.base_params();
    params.theta = theta;
    const std::string tag = "theta" + fmt_short(theta / kPi) + "pi";
    tasks.push_back({"imbalance_" + tag, [ctx, params, tag] {
                       const FockBasis basis = params.basis();
                       return density_task(ctx, params,
                                           uniform_center_state(basis), tag,
                                           false);
                     }});
  }

  // Reversed-pumping duration over the (theta, U) plane; one task per theta
  // row, merged into dt_grid.csv once everything finished.
  for (int ti = -8; ti <= 8; ++ti) {
    const double theta = ti * kPi / 8.0;
    tasks.push_back({"dt_row_" + std::to_string(ti + 8), [ctx, theta] {
      TaskResult res;
      json rows = json::array();
      for (double u : {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 8.0, 11.0, 15.0}) {
        ModelParams params = ctx.base_params();
        params.theta = theta;
        params.onsite_u = u;
        const FockBasis basis = params.basis();
        const TimeSeries series =
            density_series(params, basis, uniform_center_state(basis),
                           *ctx.cfg.t_max, *ctx.cfg.dt, ctx.method_for(basis));
        const auto rev = reversed_interval(
            imbalance(series, *ctx.cfg.exclude_center), *ctx.cfg.dt,
            *ctx.cfg.slope_eps);
        rows.push_back({theta, u, rev.total, rev.longest});
      }
      res.diagnostics["dt_rows"] = rows;
      return res;
    }});
  }

  for (double u : {0.0, 4.0, 8.0}) {
    const std::string tag = "U" + fmt_short(u);
    tasks.push_back({"gamma_" + tag, [ctx, u, tag] {
      TaskResult res;
      ModelParams params = ctx.base_params();
      params.sites = 20;
      params.onsite_u = u;
      const FockBasis basis = params.basis();
      const OperatorMatrix h = build_hamiltonian(params, basis);
      const DensePropagator prop(h.dense());
      const Vec psi0 = uniform_center_state(basis);
      std::vector<std::pair<double, Eigen::MatrixXd>> slices;
      for (double t : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
        double log_norm = 0.0;
        const Vec psi = t == 0.0 ? psi0 : prop.apply(psi0, t, &log_norm);
        slices.emplace_back(t, density_correlation(psi, basis));
      }
      res.files.push_back(
          write_gamma_csv(ctx.dir, "gamma_" + tag + ".csv", slices));
      return res;
    }});
  }
  return tasks;
}

std::vector<Task> plan_fig3(const RunContext& ctx) {
  std::vector<Task> tasks;
  std::vector<int> particle_counts = {2, 3, 4};
  if (ctx.cfg.allow_large) particle_counts.push_back(6);
  for (int n : particle_counts) {
    const int sites = n == 3 ? 31 : 30;
    tasks.push_back({"dt_vs_U_N" + std::to_string(n), [ctx, n, sites] {
      TaskResult res;
      std::vector<std::tuple<double, double, double, double>> rows;
      for (double u : {0.0, 1.0, 3.0, 5.0, 8.0}) {
        ModelParams params = ctx.base_params();
        params.sites = sites;
        params.particles = n;
        params.onsite_u = u;
        const FockBasis basis = params.basis();
        const TimeSeries series =
            density_series(params, basis, uniform_center_state(basis),
                           *ctx.cfg.t_max, *ctx.cfg.dt, ctx.method_for(basis));
        const auto rev = reversed_interval(
            imbalance(series, sites % 2 != 0), *ctx.cfg.dt,
            kSlopeEpsPerParticle * n);
        rows.emplace_back(params.theta, u, rev.total, rev.longest);
        if (u == *ctx.cfg.onsite_u)
          res.files.push_back(write_imbalance_csv(
              ctx.dir, "imbalance_N" + std::to_string(n) + ".csv",
              series.times, imbalance(series, sites % 2 != 0)));
      }
      res.files.push_back(
          write_dt_csv(ctx.dir, "dt_vs_U_N" + std::to_string(n) + ".csv",
                       rows));
      return res;
    }});
  }
  return tasks;
}

std::vector<Task> plan_fig4(const RunContext& ctx) {
  std::vector<Task> tasks;
  std::vector<double> times;
  for (double t = 0.0; t <= *ctx.cfg.t_max + 1e-9; t += *ctx.cfg.dt * 2)
    times.push_back(t);

  for (double jr : {1.0, 1.02, 1.25}) {
    const std::string tag = "thermal_JR" + fmt_short(jr);
    tasks.push_back({"otoc_" + tag, [ctx, jr, tag, times] {
      TaskResult res;
      ModelParams params = ctx.base_params();
      params.hop_left = 1.0;
      params.hop_right = jr;
      const int k = (params.sites + 1) / 2;
      const OtocGrid grid = thermal_otoc(params, *ctx.cfg.beta, k, times);
      const OtocGrid norm = normalize_grid(grid, OtocNormalization::global_max);
      res.files.push_back(
          write_otoc_csv(ctx.dir, "otoc_" + tag + ".csv", grid, norm));
      res.diagnostics["conditioning_warning"] = grid.conditioning_warning;
      return res;
    }});
  }
  for (double jr : {1.0, 1.25, 1.5}) {
    const std::string tag = "state_JR" + fmt_short(jr);
    tasks.push_back({"otoc_" + tag, [ctx, jr, tag, times] {
      TaskResult res;
      ModelParams params = ctx.base_params();
      params.sites = 11;
      params.particles = 5;
      params.hop_left = 1.0;
      params.hop_right = jr;
      const FockBasis basis = params.basis();
      const int k = 6;
      const OtocGrid grid =
          state_otoc(params, uniform_center_state(basis), k, times);
      const OtocGrid norm =
          normalize_grid(grid, OtocNormalization::per_site_max);
      res.files.push_back(
          write_otoc_csv(ctx.dir, "otoc_" + tag + ".csv", grid, norm));
      return res;
    }});
  }
  return tasks;
}

std::vector<Task> plan_supp_winding(const RunContext& ctx) {
  std::vector<Task> tasks;
  struct Panel {
    const char* tag;
    double theta, u;
  };
  for (const Panel panel : {Panel{"a", -kPi / 2.0, 4.0}, Panel{"b", 0.0, 4.0}}) {
    tasks.push_back({std::string("winding_") + panel.tag, [ctx, panel] {
      TaskResult res;
      ModelParams params = ctx.base_params();
      params.boundary = Boundary::periodic;
      params.theta = panel.theta;
      params.onsite_u = panel.u;
      const FockBasis basis = params.basis();
      std::vector<cd> refs = ctx.cfg.references;
      if (refs.empty()) refs = {cd(0.0, 0.0), cd(-3.0, 0.0), cd(-4.1, 0.0)};
      std::vector<WindingScan> scans;
      for (const cd& e : refs)
        scans.push_back(winding_number(params, basis, e));
      res.files.push_back(write_winding_csv(
          ctx.dir, std::string("winding_") + panel.tag + ".csv", scans));
      for (const auto& s : scans)
        res.diagnostics["W(" + fmt_short(s.reference.real()) + "," +
                        fmt_short(s.reference.imag()) + ")"] = s.winding;
      return res;
    }});
  }
  return tasks;
}

std::vector<Task> plan_supp_hardcore(const RunContext& ctx) {
  return {{"hardcore", [ctx] {
    ModelParams params = ctx.base_params();
    params.cap = 1;
    const FockBasis basis = params.basis();
    return density_task(ctx, params, uniform_center_state(basis), "hardcore",
                        true);
  }}};
}

std::vector<Task> plan_supp_arrangements(const RunContext& ctx) {
  std::vector<Task> tasks;
  for (const std::string kind : {"center", "same-site", "separated"}) {
    const std::string tag = kind == "center" ? "adjacent" : kind;
    tasks.push_back({"arrangement_" + tag, [ctx, kind, tag] {
      RunContext local = ctx;
      local.cfg.initial = kind;
      ModelParams params = local.base_params();
      const FockBasis basis = params.basis();
      return density_task(local, params, local.initial_state(basis), tag,
                          false);
    }});
  }
  return tasks;
}

std::vector<Task> plan_supp_weak_alpha(const RunContext& ctx) {
  std::vector<Task> tasks;
  for (double alpha : {0.0, 0.001, 0.01}) {
    const std::string tag = "alpha" + fmt_short(alpha);
    tasks.push_back({"imbalance_" + tag, [ctx, alpha, tag] {
      ModelParams params = ctx.base_params();
      const double ratio = std::exp(alpha);
      params.hop_left = 1.0 / ratio;
      params.hop_right = ratio;
      const FockBasis basis = params.basis();
      return density_task(ctx, params, uniform_center_state(basis), tag,
                          false);
    }});
  }
  return tasks;
}

std::vector<Task> plan_supp_largeU(const RunContext& ctx) {
  std::vector<Task> tasks;
  for (int n : {2, 3}) {
    const int sites = n == 3 ? 31 : 30;
    tasks.push_back({"largeU_N" + std::to_string(n), [ctx, n, sites] {
      TaskResult res;
      std::vector<std::tuple<double, double, double, double>> rows;
      for (double u : {10.0, 15.0, 20.0, 30.0, 50.0}) {
        ModelParams params = ctx.base_params();
        params.sites = sites;
        params.particles = n;
        params.onsite_u = u;
        const FockBasis basis = params.basis();
        const TimeSeries series =
            density_series(params, basis, uniform_center_state(basis),
                           *ctx.cfg.t_max, *ctx.cfg.dt, ctx.method_for(basis));
        const auto rev = reversed_interval(
            imbalance(series, sites % 2 != 0), *ctx.cfg.dt,
            kSlopeEpsPerParticle * n);
        rows.emplace_back(params.theta, u, rev.total, rev.longest);
      }
      res.files.push_back(write_dt_csv(
          ctx.dir, "dt_largeU_N" + std::to_string(n) + ".csv", rows));
      return res;
    }});
  }
  return tasks;
}

std::vector<Task> plan_supp_n3_correlation(const RunContext& ctx) {
  std::vector<Task> tasks;
  for (double u : {0.0, 4.0}) {
    const std::string tag = "N3_U" + fmt_short(u);
    tasks.push_back({"gamma_" + tag, [ctx, u, tag] {
      TaskResult res;
      ModelParams params = ctx.base_params();
      params.sites = 20;
      params.particles = 3;
      params.onsite_u = u;
      const FockBasis basis = params.basis();
      const DensePropagator prop(build_hamiltonian(params, basis).dense());
      // Three particles on a 20-site chain have no exact center; put the
      // block one site left of middle.
      const Vec psi0 = uniform_center_state(basis, 9);
      std::vector<std::pair<double, Eigen::MatrixXd>> slices;
      for (double t : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        double log_norm = 0.0;
        const Vec psi = t == 0.0 ? psi0 : prop.apply(psi0, t, &log_norm);
        slices.emplace_back(t, density_correlation(psi, basis));
      }
      res.files.push_back(
          write_gamma_csv(ctx.dir, "gamma_" + tag + ".csv", slices));
      return res;
    }});
  }
  return tasks;
}

std::vector<Task> plan_custom(const RunContext& ctx) {
  std::vector<Task> tasks;
  tasks.push_back({"custom", [ctx] {
    TaskResult res;
    ModelParams params = ctx.base_params();
    const FockBasis basis = params.basis();

    if (basis.dim() <= 4096) {
      const Spectrum spec = eigendecompose(build_hamiltonian(params, basis));
      res.files.push_back(write_spectrum_csv(ctx.dir, "spectrum.csv", spec));
      if (basis.particles() > 0) {
        const DensityProfile profile = density_profiles(spec, basis);
        std::vector<int> ids(profile.per_state.rows());
        std::iota(ids.begin(), ids.end(), 0);
        res.files.push_back(write_profile_csv(ctx.dir, "profile.csv",
                                              profile.per_state, ids));
      }
      res.diagnostics["max_im"] = spec.values.imag().cwiseAbs().maxCoeff();
    }

    if (basis.particles() > 0 && *ctx.cfg.t_max > 0.0) {
      const Vec psi0 = ctx.initial_state(basis);
      const TimeSeries series = density_series(
          params, basis, psi0, *ctx.cfg.t_max, *ctx.cfg.dt,
          ctx.method_for(basis));
      res.files.push_back(write_density_csv(ctx.dir, "density.csv", series));
      if (basis.sites() % 2 == 0 || *ctx.cfg.exclude_center) {
        const auto dn = imbalance(series, *ctx.cfg.exclude_center);
        res.files.push_back(
            write_imbalance_csv(ctx.dir, "imbalance.csv", series.times, dn));
        const auto rev =
            reversed_interval(dn, *ctx.cfg.dt, *ctx.cfg.slope_eps);
        res.diagnostics["dt_total"] = rev.total;
      }
    }

    if (params.boundary == Boundary::periodic && !ctx.cfg.references.empty()) {
      std::vector<WindingScan> scans;
      for (const cd& e : ctx.cfg.references)
        scans.push_back(winding_number(params, basis, e));
      res.files.push_back(write_winding_csv(ctx.dir, "winding.csv", scans));
    }
    return res;
  }});
  return tasks;
}

std::string write_fig2_dt_grid(const RunContext& ctx,
                               const std::vector<TaskResult>& res,
                               const std::vector<Task>& tasks) {
  std::vector<std::tuple<double, double, double, double>> rows;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].name.rfind("dt_row_", 0) != 0) continue;
    if (!res[i].diagnostics.contains("dt_rows")) continue;
    for (const auto& r : res[i].diagnostics["dt_rows"])
      rows.emplace_back(r.at(0).get<double>(), r.at(1).get<double>(),
                        r.at(2).get<double>(), r.at(3).get<double>());
  }
  if (rows.empty()) return {};
  return write_dt_csv(ctx.dir, "dt_grid.csv", rows);
}

// The averaged-profile comparison file needs the per-set averages; runs as a
// follow-up task once the fig1 spectra tasks finished.
std::string write_fig1_average_comparison(const RunContext& ctx,
                                          const std::vector<TaskResult>& res,
                                          const std::vector<Task>& tasks) {
  Eigen::MatrixXd rows;
  std::vector<int> ids;
  int found = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].name.rfind("spectra_", 0) != 0) continue;
    if (!res[i].diagnostics.contains("average_profile")) continue;
    const auto& avg = res[i].diagnostics["average_profile"];
    if (rows.size() == 0)
      rows.resize(4, static_cast<Eigen::Index>(avg.size()));
    for (std::size_t x = 0; x < avg.size(); ++x)
      rows(found, static_cast<Eigen::Index>(x)) = avg[x].get<double>();
    ids.push_back(found);
    ++found;
  }
  if (found == 0) return {};
  Eigen::MatrixXd trimmed = rows.topRows(found);
  return write_profile_csv(ctx.dir, "profile_average_comparison.csv", trimmed,
                           ids);
}

}  // namespace

json RunManifest::to_json() const {
  json j;
  j["config"] = config;
  j["version"] = version;
  j["ok"] = ok;
  j["wall_time_s"] = wall_time_s;
  json files_json = json::array();
  for (const auto& f : files)
    files_json.push_back(
        {{"name", f.name}, {"digest", f.digest}, {"bytes", f.bytes}});
  j["files"] = files_json;
  j["task_errors"] = task_errors;
  j["diagnostics"] = diagnostics;
  return j;
}

RunManifest run_experiment(const ExperimentConfig& raw) {
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::string> errors;
  const ExperimentConfig cfg = validate_config(raw, errors);
  RunManifest manifest;
  manifest.config = cfg.to_json();
  if (!errors.empty()) {
    manifest.task_errors = errors;
    manifest.ok = false;
    return manifest;
  }

  RunContext ctx{cfg, fs::path(cfg.out_dir)};
  fs::create_directories(ctx.dir);

  std::vector<Task> tasks;
  if (cfg.preset == "fig1") tasks = plan_fig1(ctx);
  else if (cfg.preset == "fig2") tasks = plan_fig2(ctx);
  else if (cfg.preset == "fig3") tasks = plan_fig3(ctx);
  else if (cfg.preset == "fig4") tasks = plan_fig4(ctx);
  else if (cfg.preset == "supp-winding") tasks = plan_supp_winding(ctx);
  else if (cfg.preset == "supp-hardcore") tasks = plan_supp_hardcore(ctx);
  else if (cfg.preset == "supp-arrangements")
    tasks = plan_supp_arrangements(ctx);
  else if (cfg.preset == "supp-weak-alpha") tasks = plan_supp_weak_alpha(ctx);
  else if (cfg.preset == "supp-largeU") tasks = plan_supp_largeU(ctx);
  else if (cfg.preset == "supp-n3-correlation")
    tasks = plan_supp_n3_correlation(ctx);
  else tasks = plan_custom(ctx);

  std::vector<TaskResult> results;
  run_tasks(tasks, results, manifest.task_errors);

  std::vector<std::string> file_names;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (const auto& f : results[i].files) file_names.push_back(f);
    if (!results[i].diagnostics.is_null())
      manifest.diagnostics[tasks[i].name] = results[i].diagnostics;
  }
  if (cfg.preset == "fig1") {
    const std::string name =
        write_fig1_average_comparison(ctx, results, tasks);
    if (!name.empty()) file_names.push_back(name);
  }
  if (cfg.preset == "fig2") {
    const std::string name = write_fig2_dt_grid(ctx, results, tasks);
    if (!name.empty()) file_names.push_back(name);
  }

  std::sort(file_names.begin(), file_names.end());
  for (const auto& name : file_names) {
    std::ifstream in(ctx.dir / name, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    manifest.files.push_back(
        {name, fnv1a_digest(bytes), static_cast<std::uint64_t>(bytes.size())});
  }

  manifest.ok = manifest.task_errors.empty();
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  std::ofstream out(ctx.dir / "manifest.json", std::ios::binary);
  out << manifest.to_json().dump(2) << "\n";
  return manifest;
}

}  // namespace nhanyon
