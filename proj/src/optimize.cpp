#include "amdi/optimize.hpp"

#include <gsl/gsl_multimin.h>
#include <gsl/gsl_qrng.h>
#include <omp.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace amdi {

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// box for the quasi-random starts, in unconstrained coordinates
constexpr double kLo[5] = {-4.0, -4.0, -3.0, -3.0, -8.0};
constexpr double kHi[5] = {2.0, 1.0, 3.0, 3.0, 3.0};

constexpr double kInvalid = 1e12;

using Fn = std::function<double(const ParamVector&)>;

struct Objective {
  const ProtocolConfig* cfg;
  const Fn* f;
  int evals = 0;
};

double gsl_objective(const gsl_vector* v, void* params) {
  auto* o = static_cast<Objective*>(params);
  ++o->evals;
  std::vector<double> x(v->size);
  for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
  ParamVector p = from_unconstrained(x, params_of(*o->cfg), o->cfg->timing);
  if (!params_valid(p, o->cfg->timing.phase_locked)) return kInvalid;
  return (*o->f)(p);
}

struct StartResult {
  double f = kInvalid;
  std::vector<double> x;
  int evals = 0;
};

StartResult run_start(const ProtocolConfig& cfg, const OptimizeOptions& opt, const Fn& f, const std::vector<double>& x0) {
  const std::size_t dim = x0.size();
  Objective obj{&cfg, &f};
  gsl_multimin_function fn{&gsl_objective, dim, &obj};
  gsl_vector* x = gsl_vector_alloc(dim);
  gsl_vector* step = gsl_vector_alloc(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    gsl_vector_set(x, i, x0[i]);
    gsl_vector_set(step, i, 0.5);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
  gsl_multimin_fminimizer_set(s, &fn, x, step);
  while (obj.evals < opt.max_evals) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opt.size_tol) == GSL_SUCCESS) break;
  }
  StartResult r;
  r.f = gsl_multimin_fminimizer_minimum(s);
  r.evals = obj.evals;
  const gsl_vector* best = gsl_multimin_fminimizer_x(s);
  r.x.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) r.x[i] = gsl_vector_get(best, i);
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return r;
}

struct MultiStart {
  ParamVector params;
  int evaluations = 0;
  int best_start = 0;
};

MultiStart multistart(const ProtocolConfig& cfg, const OptimizeOptions& opt, std::optional<ParamVector> warm,
                      const Fn& f) {
  const bool locked = cfg.timing.phase_locked;
  const std::size_t dim = locked ? 4 : 5;
  const int n_starts = std::max(1, opt.starts);

  // start points: warm (or the configured point), then shifted Sobol points
  std::vector<std::vector<double>> x0(n_starts);
  x0[0] = to_unconstrained(warm ? *warm : params_of(cfg), cfg.timing);
  std::mt19937_64 rng(opt.seed);
  std::vector<double> shift(dim);
  for (auto& v : shift) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  gsl_qrng* q = gsl_qrng_alloc(gsl_qrng_sobol, static_cast<unsigned>(dim));
  std::vector<double> u(dim);
  for (int k = 1; k < n_starts; ++k) {
    gsl_qrng_get(q, u.data());
    x0[k].resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      double v = u[i] + shift[i];
      v -= std::floor(v);
      x0[k][i] = kLo[i] + v * (kHi[i] - kLo[i]);
    }
  }
  gsl_qrng_free(q);

  std::vector<StartResult> res(n_starts);
  const int threads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int k = 0; k < n_starts; ++k) res[k] = run_start(cfg, opt, f, x0[k]);

  MultiStart out;
  int best = 0;
  for (int k = 0; k < n_starts; ++k) {
    out.evaluations += res[k].evals;
    if (res[k].f < res[best].f) best = k;
  }
  out.best_start = best;
  out.params = from_unconstrained(res[best].x, params_of(cfg), cfg.timing);
  return out;
}

}  // namespace

ParamVector params_of(const ProtocolConfig& cfg) {
  return ParamVector{cfg.source.mu, cfg.source.nu, cfg.source.p_mu, cfg.source.p_nu, cfg.timing.t_c_s};
}

ProtocolConfig with_params(const ProtocolConfig& cfg, const ParamVector& p) {
  ProtocolConfig c = cfg;
  c.source.mu = p.mu;
  c.source.nu = p.nu;
  c.source.p_mu = p.p_mu;
  c.source.p_nu = p.p_nu;
  c.source.p_o = 1.0 - p.p_mu - p.p_nu;
  if (!cfg.timing.phase_locked) c.timing.t_c_s = p.t_c_s;
  return c;
}

double t_c_max(const TimingConfig& t) {
  const double rate = 2.0 * std::numbers::pi * t.delta_f_hz + t.omega_fiber_rad_s;
  if (!(rate > 0.0)) return 1.0;
  // T_mean = T_c / 2
  return 2.0 * std::numbers::pi / rate;
}

bool params_valid(const ParamVector& p, bool phase_locked) {
  if (!(p.nu > 0.0 && p.nu < p.mu && p.mu <= 1.5)) return false;
  if (!(p.p_mu >= 0.0 && p.p_nu >= 0.0 && p.p_mu + p.p_nu <= 1.0)) return false;
  if (!phase_locked && !(p.t_c_s > 0.0)) return false;
  return true;
}

std::vector<double> to_unconstrained(const ParamVector& p, const TimingConfig& timing) {
  const bool phase_locked = timing.phase_locked;
  auto clampp = [](double v) { return std::min(std::max(v, 1e-9), 1.0 - 1e-9); };
  std::vector<double> x{logit(clampp(p.mu / 1.5)), logit(clampp(p.nu / p.mu)), logit(clampp(p.p_mu)),
                        logit(clampp(p.p_nu / (1.0 - p.p_mu)))};
  if (!phase_locked) x.push_back(logit(clampp(p.t_c_s / t_c_max(timing))));
  return x;
}

ParamVector from_unconstrained(const std::vector<double>& x, const ParamVector& base, const TimingConfig& timing) {
  const bool phase_locked = timing.phase_locked;
  ParamVector p = base;
  p.mu = 1.5 * sig(x[0]);
  p.nu = p.mu * sig(x[1]);
  p.p_mu = sig(x[2]);
  p.p_nu = (1.0 - p.p_mu) * sig(x[3]);
  if (!phase_locked && x.size() > 4) p.t_c_s = t_c_max(timing) * sig(x[4]);
  return p;
}

double objective(const ProtocolConfig& cfg, Mode mode) {
  try {
    auto r = evaluate(cfg, mode, false);
    if (r.feasible && r.rate > 0.0) return -std::log(r.rate);
    return 1e6 + 10.0 * std::min(r.est.phi_raw, 2.0) + (-r.key_length_raw) / (r.n_tot + 1.0);
  } catch (const std::exception&) {
    return kInvalid;
  }
}

OptimizeResult optimize_point(const ProtocolConfig& cfg, const OptimizeOptions& opt, std::optional<ParamVector> warm) {
  Fn f = [&](const ParamVector& p) { return objective(with_params(cfg, p), opt.mode); };
  auto ms = multistart(cfg, opt, warm, f);
  OptimizeResult out;
  out.params = ms.params;
  out.evaluations = ms.evaluations;
  out.best_start = ms.best_start;
  out.result = evaluate(with_params(cfg, out.params), opt.mode, true);
  return out;
}

double mermin_objective(const ProtocolConfig& cfg, FiniteMode mode) {
  try {
    CountModel cm(cfg);
    auto m = mermin_lower_bound(expected_signed_counts(cm), cm, cfg.security, mode);
    return m.defined ? -m.m_lower : kInvalid;
  } catch (const std::exception&) {
    return kInvalid;
  }
}

MerminOptimum optimize_mermin(const ProtocolConfig& cfg, const OptimizeOptions& opt, FiniteMode mode,
                              std::optional<ParamVector> warm) {
  Fn f = [&](const ParamVector& p) { return mermin_objective(with_params(cfg, p), mode); };
  auto ms = multistart(cfg, opt, warm, f);
  MerminOptimum out;
  out.params = ms.params;
  out.evaluations = ms.evaluations;
  ProtocolConfig c = with_params(cfg, ms.params);
  CountModel cm(c);
  out.est = mermin_lower_bound(expected_signed_counts(cm), cm, c.security, mode);
  return out;
}

std::vector<MerminRow> scan_mermin_optimized(const ProtocolConfig& cfg, const std::vector<double>& d,
                                             const OptimizeOptions& opt, FiniteMode mode) {
  std::vector<MerminRow> out(d.size());
  std::optional<ParamVector> warm = params_of(cfg);
  for (std::size_t i = 0; i < d.size(); ++i) {
    ProtocolConfig c = cfg;
    c.channel.distance_km = d[i];
    auto m = optimize_mermin(c, opt, mode, warm);
    out[i].distance_km = d[i];
    out[i].est = m.est;
    if (m.est.defined && m.est.m_lower > 0.0) warm = m.params;
  }
  return out;
}

}  // namespace amdi
