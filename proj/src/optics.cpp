#include "amdi/optics.hpp"

#include <bit>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <stdexcept>

namespace amdi {

Link link_of(const ChannelModel& ch) { return Link{transmittance(ch), ch.p_d}; }

double bessel_i0(double x) { return boost::math::cyl_bessel_i(0, x); }

double bessel_i0m1(double x) {
  if (std::fabs(x) > 2.0) return bessel_i0(x) - 1.0;
  double t = x * x / 4.0, term = 1.0, sum = 0.0;
  for (int k = 1; k < 40; ++k) {
    term *= t / (double(k) * double(k));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

namespace {
int N_of(const IntensityVector& k) { return static_cast<int>(k.size()); }
double pow_1m(double pd, int n) { return std::exp(n * std::log1p(-pd)); }
double sum_eta_k(const IntensityVector& k, double eta) {
  double s = 0.0;
  for (double x : k) s += x;
  return eta * s;
}
}  // namespace

double port_alpha(const IntensityVector& k, int i, double eta) {
  int n = N_of(k);
  return eta * (k[i] + k[(i + 1) % n]) / 4.0;
}

double port_beta(const IntensityVector& k, int i, double eta) {
  int n = N_of(k);
  return eta * std::sqrt(k[i] * k[(i + 1) % n]) / 2.0;
}

std::vector<DetectorPair> detector_click_probs(const IntensityVector& k, const std::vector<double>& theta_hat,
                                               const Link& link) {
  int n = N_of(k);
  if (static_cast<int>(theta_hat.size()) != n) throw std::invalid_argument("theta_hat size mismatch");
  std::vector<DetectorPair> out(n);
  for (int i = 0; i < n; ++i) {
    double a = port_alpha(k, i, link.eta), b = port_beta(k, i, link.eta) * std::cos(theta_hat[i]);
    double xl = a + b, xr = a - b;
    out[i].left = -std::expm1(-xl) + link.p_d * std::exp(-xl);
    out[i].right = -std::expm1(-xr) + link.p_d * std::exp(-xr);
  }
  return out;
}

std::pair<double, double> single_click_prob_phase(const IntensityVector& k, int i, double th, const Link& link) {
  int n = N_of(k);
  double pre = pow_1m(link.p_d, 2 * n - 1) * std::exp(-sum_eta_k(k, link.eta));
  double a = port_alpha(k, i, link.eta), b = port_beta(k, i, link.eta) * std::cos(th);
  return {pre * (std::expm1(a + b) + link.p_d), pre * (std::expm1(a - b) + link.p_d)};
}

double port_click_prob(const IntensityVector& k, int i, const Link& link) {
  int n = N_of(k);
  double pre = 2.0 * pow_1m(link.p_d, 2 * n - 1) * std::exp(-sum_eta_k(k, link.eta));
  double a = port_alpha(k, i, link.eta), b = port_beta(k, i, link.eta);
  return pre * (bessel_i0m1(b) * std::exp(a) + std::expm1(a) + link.p_d);
}

double total_click_prob(const IntensityVector& k, const Link& link) {
  double s = 0.0;
  for (int i = 0; i < N_of(k); ++i) s += port_click_prob(k, i, link);
  return s;
}

IntensityChoice intensity_choice(const SourceConfig& s) {
  IntensityChoice c;
  c.value = {s.mu, s.nu, s.o};
  c.prob = {s.p_mu, s.p_nu, s.p_o};
  return c;
}

PortModel::PortModel(int n, const Link& l, const IntensityChoice& c) : n_users(n), link(l), choice(c) {
  double m = 0.0;
  for (int j = 0; j < 3; ++j) m += c.prob[j] * std::exp(-l.eta * c.value[j]);
  other_factor = std::pow(m, n - 2);
}

double PortModel::q_pair(double a, double b) const {
  double al = link.eta * (a + b) / 4.0, be = link.eta * std::sqrt(a * b) / 2.0;
  double pre = 2.0 * other_factor * pow_1m(link.p_d, 2 * n_users - 1) * std::exp(-link.eta * (a + b));
  return pre * (bessel_i0m1(be) * std::exp(al) + std::expm1(al) + link.p_d);
}

double PortModel::q_pair_phase(double a, double b, double theta, bool right) const {
  double al = link.eta * (a + b) / 4.0, be = link.eta * std::sqrt(a * b) / 2.0 * std::cos(theta);
  double pre = other_factor * pow_1m(link.p_d, 2 * n_users - 1) * std::exp(-link.eta * (a + b));
  return pre * (std::expm1(right ? al - be : al + be) + link.p_d);
}

double PortModel::q_port_total() const {
  double s = 0.0;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) s += choice.prob[x] * choice.prob[y] * q_pair(choice.value[x], choice.value[y]);
  return s;
}

double q_tot_port(int n, const SourceConfig& s, const Link& link) {
  return PortModel(n, link, intensity_choice(s)).q_port_total();
}

double q_tot(int n, const SourceConfig& s, const Link& link) { return n * q_tot_port(n, s, link); }

YieldTable single_photon_yields(const Link& link, YieldForm form) {
  double pd = link.p_d, eta = link.eta, ep = eta / 2.0;
  YieldTable t;
  t.y00 = 2.0 * pd * (1.0 - pd);
  t.y10 = t.y01 = (2.0 * pd * (1.0 - ep) + ep) * (1.0 - pd);
  if (form == YieldForm::printed)
    t.y11 = (2.0 * pd * (1.0 - ep) * (1.0 - ep) + 2.0 * ep * (1.0 - eta) + ep * ep / 2.0) * (1.0 - pd);
  else
    t.y11 = (2.0 * pd * (1.0 - ep) * (1.0 - ep) + 2.0 * ep * (1.0 - ep) + ep * ep) * (1.0 - pd);
  return t;
}

int parity(unsigned bits) { return std::popcount(bits) & 1; }

std::string pattern_string(unsigned bits, int n) {
  std::string s(n, 'L');
  for (int i = 0; i < n; ++i)
    if (bits >> i & 1u) s[i] = 'R';
  return s;
}

double pattern_yield_class(int n, bool correct, const Link& link, YieldForm form) {
  double e = link.eta, d = link.p_d, u = 1.0 - e;
  if (n == 3) {
    double w3 = e * e * e / 8.0, w2 = e * e * u / 4.0, w1 = e * u * u / 2.0, w0 = u * u * u;
    double err;
    if (form == YieldForm::printed)
      err = e * e * e * d / 16.0 + w2 * (d / 4.0 + d * d / 2.0) + w1 * d * d + w0 * d * d * d;
    else
      err = w3 * 1.5 * d + 3.0 * w2 * (0.75 * d + 0.5 * d * d) + 3.0 * w1 * d * d + w0 * d * d * d;
    double lead = correct ? e * e * e / 16.0 : 0.0;
    return std::pow(1.0 - d, 3) * (lead + err);
  }
  if (n == 4) {
    double p4 = std::pow(e, 4) / 16.0, p3 = e * e * e * u / 8.0, p2 = e * e * u * u / 4.0;
    double p1 = e * u * u * u / 2.0, po = std::pow(u, 4);
    double err;
    if (form == YieldForm::printed)
      err = p4 * (1.5 * d + 0.5 * d * d) + p3 * (0.5 * d + d * d) + p2 * (0.75 * d * d + 0.5 * d * d * d) +
            (e * e * u * u / 8.0) * d * d + 0.5 * p1 * d * d * d + po * std::pow(d, 4);
    else
      err = p4 * (1.5 * d + 0.5 * d * d) + 4.0 * p3 * (0.5 * d + d * d) + 4.0 * p2 * (0.75 * d * d + 0.5 * d * d * d) +
            2.0 * p2 * d * d + 4.0 * p1 * d * d * d + po * std::pow(d, 4);
    double lead = correct ? p4 / 4.0 : 0.0;
    return std::pow(1.0 - d, 4) * (lead + err);
  }
  if (form == YieldForm::printed) throw std::invalid_argument("printed pattern yields exist for N=3,4 only");
  return pattern_yield_routing_sum(n, correct, link);
}

double pattern_yield_routing_sum(int n, bool correct, const Link& link) {
  double e = link.eta, d = link.p_d;
  double total = 0.0;
  const unsigned full = (1u << n) - 1u;
  for (unsigned S = 0; S <= full; ++S) {
    int ns = std::popcount(S);
    double w = std::pow(e, ns) * std::pow(1.0 - e, n - ns) / std::pow(2.0, ns);
    // x bit i set: user i photon in the late slot (goes to port i), else early (port i-1)
    for (unsigned x = 0; x <= full; ++x) {
      if ((x & ~S) != 0u) continue;
      std::vector<int> occ(n, 0);
      for (int i = 0; i < n; ++i) {
        if (!(S >> i & 1u)) continue;
        int port = (x >> i & 1u) ? i : (i + n - 1) % n;
        ++occ[port];
      }
      bool all_one = true;
      int filled = 0;
      for (int j = 0; j < n; ++j) {
        if (occ[j] > 0) ++filled;
        if (occ[j] != 1) all_one = false;
      }
      if (S == full && all_one) continue;  // interfering pair handled below
      total += w * std::pow(0.5, filled) * std::pow(d, n - filled);
    }
  }
  if (correct) total += std::pow(e, n) * 4.0 / std::pow(4.0, n);
  return std::pow(1.0 - d, n) * total;
}

std::map<std::string, double> pattern_yields(int n, const Link& link, YieldForm form) {
  double yc = pattern_yield_class(n, true, link, form), ye = pattern_yield_class(n, false, link, form);
  std::map<std::string, double> out;
  for (unsigned b = 0; b < (1u << n); ++b) out[pattern_string(b, n)] = parity(b) == 0 ? yc : ye;
  return out;
}

}  // namespace amdi
