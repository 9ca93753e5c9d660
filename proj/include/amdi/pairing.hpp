#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "amdi/model.hpp"

namespace amdi {

enum class Side : std::uint8_t { L = 0, R = 1 };

// A single-detector click. Carries no intensity or phase: pairing cannot look
// at the basis.
struct ClickEvent {
  std::int64_t time_bin = 0;
  int port = 1;  // 1..N
  Side side = Side::L;
  bool used = false;
};

struct PairingEvent {
  std::vector<std::size_t> members;  // stream indices, one per port, port 1 first
  std::int64_t span = 0;             // last minus first time bin
};

// Greedy N-nearest-clicks pairing over a time-ordered stream. From the earliest
// unused click, take the first unused click of every missing port while
// t - t_start <= tc_bins. A duplicate port inside the window is skipped. Either
// way the next attempt starts at the earliest unused click after the current
// start, which after a success is the first skipped duplicate.
// Marks members as used.
std::vector<PairingEvent> pair_stream(std::vector<ClickEvent>& events, int n_users, std::int64_t tc_bins);

// Incremental pair_stream over a stream delivered in time-ordered chunks.
// Gives the same pairs as one pair_stream call on the concatenation.
class StreamPairer {
 public:
  StreamPairer(int n_users, std::int64_t tc_bins);
  // horizon: last bin covered so far; later chunks start after it
  void feed(const std::vector<ClickEvent>& chunk, std::int64_t horizon);
  void finish();
  double pairs() const { return pairs_; }
  double span_sum() const { return span_sum_; }

 private:
  void run(std::int64_t horizon, bool final);
  int n_;
  std::int64_t tc_;
  std::vector<ClickEvent> buf_;
  std::vector<std::size_t> slot_;
  double pairs_ = 0.0, span_sum_ = 0.0;
};

// number of bins inside T_c as a real; +inf when phase locked
double tc_bins_real(const TimingConfig& t);

// n_tot = sum_i P q_i / (1 + (N-1)/prod_{j!=i}[1-(1-q_j)^{n_tc}]); n_tc = +inf
// makes every product 1
double analytic_pair_count(const std::vector<double>& q_ports, double pulses, double n_tc);

struct MonteCarloSpec {
  std::vector<double> q_ports;
  std::int64_t bins = 0;
  std::int64_t tc_bins = 1;
  std::uint64_t seed = 1;
  std::int64_t shard_bins = 0;  // 0: max(2^20, 10 tc_bins)
  int threads = 0;              // 0: OpenMP default

  std::int64_t effective_shard_bins() const;
};

struct MonteCarloResult {
  double pairs = 0.0;
  double mean_span = 0.0;  // bins
  double sigma = 0.0;      // sampling std of `pairs`, from shard scatter
  double clicks = 0.0;
  std::int64_t shards = 0;
};

// Bernoulli click streams, one per port, generated shard by shard from seeds
// derived from (seed, shard) and paired as one continuous stream. The shard
// plan depends only on the spec, so the result is identical for any thread
// count. sigma comes from batch means over shards.
MonteCarloResult monte_carlo_pair_count(const MonteCarloSpec& spec);

// one shard's click stream, time ordered, ties by port
std::vector<ClickEvent> generate_clicks(const std::vector<double>& q_ports, std::int64_t bins, std::uint64_t seed,
                                        std::int64_t shard);

// `time_bin,port,side` lines, side L or R
void write_clicks(std::ostream& os, const std::vector<ClickEvent>& events);
std::vector<ClickEvent> read_clicks(std::istream& is);

}  // namespace amdi
