#include "amdi/fock.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace amdi {

double FockState::norm2() const {
  double s = 0.0;
  for (const auto& [o, a] : amp) s += std::norm(a);
  return s;
}

int FockState::max_photons() const {
  int m = 0;
  for (const auto& [o, a] : amp) {
    int t = 0;
    for (int x : o) t += x;
    m = std::max(m, t);
  }
  return m;
}

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }
double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

void add_network_image(const Occupation& occ, cplx c, const std::vector<std::vector<cplx>>& U, int n_out,
                       std::map<Occupation, cplx>& out) {
  std::map<Occupation, cplx> poly{{Occupation(n_out, 0), c}};
  for (std::size_t m = 0; m < occ.size(); ++m) {
    c = 1.0;
    for (int r = 0; r < occ[m]; ++r) {
      std::map<Occupation, cplx> next;
      for (const auto& [k, coef] : poly)
        for (int d = 0; d < n_out; ++d) {
          if (U[d][m] == cplx(0.0)) continue;
          Occupation k2 = k;
          ++k2[d];
          next[k2] += coef * U[d][m];
        }
      poly.swap(next);
    }
    if (occ[m] > 1)
      for (auto& [k, coef] : poly) coef /= std::sqrt(factorial(occ[m]));
  }
  for (const auto& [k, coef] : poly) {
    double f = 1.0;
    for (int x : k) f *= factorial(x);
    out[k] += coef * std::sqrt(f);
  }
}

}  // namespace

FockState apply_network(const FockState& in, const std::vector<std::vector<cplx>>& U, int n_out) {
  FockState res;
  res.n_modes = n_out;
  for (const auto& [occ, a] : in.amp) add_network_image(occ, a, U, n_out, res.amp);
  return res;
}

ClickDistribution propagate_network(const FockState& in, const std::vector<double>& t,
                                    const std::vector<std::vector<cplx>>& U, int n_out, double p_d, int cap) {
  if (in.max_photons() > cap) throw CapacityError("photon cap exceeded");
  const int nm = in.n_modes;
  Occupation maxn(nm, 0);
  for (const auto& [occ, a] : in.amp)
    for (int m = 0; m < nm; ++m) maxn[m] = std::max(maxn[m], occ[m]);

  std::map<Occupation, double> out_prob;
  Occupation loss(nm, 0);
  while (true) {
    FockState branch;
    branch.n_modes = nm;
    for (const auto& [occ, a] : in.amp) {
      double w = 1.0;
      bool ok = true;
      Occupation rest = occ;
      for (int m = 0; m < nm && ok; ++m) {
        if (loss[m] > occ[m]) {
          ok = false;
          break;
        }
        int n = occ[m], l = loss[m];
        w *= binom(n, l) * std::pow(t[m], n - l) * std::pow(1.0 - t[m], l);
        rest[m] = n - l;
      }
      if (ok && w > 0.0) branch.amp[rest] += a * std::sqrt(w);
    }
    if (!branch.amp.empty()) {
      FockState o = apply_network(branch, U, n_out);
      for (const auto& [k, a] : o.amp) out_prob[k] += std::norm(a);
    }
    int m = 0;
    for (; m < nm; ++m) {
      if (loss[m] < maxn[m]) {
        ++loss[m];
        break;
      }
      loss[m] = 0;
    }
    if (m == nm) break;
  }

  ClickDistribution dist;
  for (const auto& [k, p] : out_prob) {
    if (p == 0.0) continue;
    std::uint32_t lit = 0;
    std::vector<int> empty;
    for (int d = 0; d < n_out; ++d) {
      if (k[d] > 0)
        lit |= 1u << d;
      else
        empty.push_back(d);
    }
    if (p_d == 0.0) {
      dist[lit] += p;
      continue;
    }
    const std::uint32_t ne = static_cast<std::uint32_t>(empty.size());
    for (std::uint32_t s = 0; s < (1u << ne); ++s) {
      double w = p;
      std::uint32_t mask = lit;
      for (std::uint32_t j = 0; j < ne; ++j) {
        if (s >> j & 1u) {
          w *= p_d;
          mask |= 1u << empty[j];
        } else {
          w *= 1.0 - p_d;
        }
      }
      dist[mask] += w;
    }
  }
  return dist;
}

std::vector<std::vector<cplx>> ring_network(int n) {
  const double r = 1.0 / std::numbers::sqrt2;
  std::vector<std::vector<cplx>> U(2 * n, std::vector<cplx>(2 * n, 0.0));
  for (int i = 0; i < n; ++i) {
    int l_in = 2 * i + 1;                 // l_i
    int e_in = 2 * ((i + 1) % n);         // e_{i+1}
    int L = 2 * i, R = 2 * i + 1;
    U[L][l_in] = r;
    U[R][l_in] = -r;
    U[L][e_in] = r;
    U[R][e_in] = r;
  }
  return U;
}

FockState ring_x_input(const std::vector<double>& th) {
  const int n = static_cast<int>(th.size());
  FockState s;
  s.n_modes = 2 * n;
  for (unsigned x = 0; x < (1u << n); ++x) {
    Occupation o(2 * n, 0);
    double ph = 0.0;
    for (int i = 0; i < n; ++i) {
      if (x >> i & 1u) {
        o[2 * i + 1] = 1;
        ph += th[i];
      } else {
        o[2 * i] = 1;
      }
    }
    s.amp[o] = std::polar(std::pow(0.5, n / 2.0), ph);
  }
  return s;
}

ClickDistribution propagate(const FockState& in, int n, const Link& link, int cap) {
  std::vector<double> t(2 * n, link.eta);
  return propagate_network(in, t, ring_network(n), 2 * n, link.p_d, cap);
}

double pattern_probability(const ClickDistribution& dist, unsigned bits, int n) {
  std::uint32_t mask = 0;
  for (int i = 0; i < n; ++i) mask |= 1u << (2 * i + ((bits >> i) & 1u));
  auto it = dist.find(mask);
  return it == dist.end() ? 0.0 : it->second;
}

double port_yield_oracle(int a, int b, const Link& link) {
  FockState s;
  s.n_modes = 2;
  s.amp[{a, b}] = 1.0;
  const double r = 1.0 / std::numbers::sqrt2;
  // input 0 plays l_i, input 1 plays e_{i+1}
  std::vector<std::vector<cplx>> U{{r, r}, {-r, r}};
  auto dist = propagate_network(s, {link.eta / 2.0, link.eta / 2.0}, U, 2, link.p_d, 6);
  double p = 0.0;
  for (auto [mask, w] : dist)
    if (std::popcount(mask) == 1) p += w;
  return p;
}

ParityVerdict parity_rule_check(int n, double theta_g) {
  ParityVerdict v;
  const bool pi = std::fabs(std::remainder(theta_g, 2.0 * std::numbers::pi)) > 1e-9;
  v.expected_parity = pi ? 1 : 0;
  v.printed_rule_parity = pi ? (n % 2) : ((n - 1) % 2);
  // spread theta_g unevenly over the users; only the sum matters
  std::vector<double> th(n, 0.0);
  double rest = theta_g;
  for (int i = 0; i + 1 < n; ++i) {
    th[i] = 0.37 * (i + 1);
    rest -= th[i];
  }
  th[n - 1] = rest;
  auto dist = propagate(ring_x_input(th), n, Link{1.0, 0.0}, std::max(4, n));
  v.ok = true;
  for (unsigned b = 0; b < (1u << n); ++b) {
    if (pattern_probability(dist, b, n) < 1e-14) continue;
    int p = parity(b);
    v.observed.push_back(p);
    if (p != v.expected_parity) v.ok = false;
  }
  if (v.observed.empty()) v.ok = false;
  return v;
}

}  // namespace amdi
