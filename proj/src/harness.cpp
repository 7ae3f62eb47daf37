// Copyright 2026 The tomocr authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tomocr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace tomocr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Static partition of [0, count) across up to `threads` workers. The work
// function must only write to its own index slots.
template <typename Fn>
void parallel_for(std::int64_t count, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || count < 2) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::int64_t chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::int64_t lo = t * chunk;
    const std::int64_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::string to_string(Protocol p) {
  return p == Protocol::quantile ? "quantile" : "intersect-sweep";
}

std::string to_string(PairKind k) {
  return k == PairKind::vs_mixed ? "vs-mixed" : "vs-rotated";
}

PairKind pair_kind_from_string(const std::string& s) {
  if (s == "vs-mixed" || s == "vs_mixed") return PairKind::vs_mixed;
  if (s == "vs-rotated" || s == "vs_rotated") return PairKind::vs_rotated;
  throw std::invalid_argument("unknown pair kind: " + s);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c;
  const std::string protocol = j.at("protocol").get<std::string>();
  if (protocol == "quantile") c.protocol = Protocol::quantile;
  else if (protocol == "intersect-sweep" || protocol == "sweep")
    c.protocol = Protocol::intersect_sweep;
  else throw std::invalid_argument("unknown protocol: " + protocol);
  c.scheme = scheme_kind_from_string(j.at("scheme").get<std::string>());
  c.q = j.at("q").get<int>();
  for (const auto& r : j.at("regions"))
    c.regions.push_back(region_kind_from_string(r.get<std::string>()));
  c.delta = j.at("delta").get<double>();
  if (j.contains("n_grid"))
    for (const auto& n : j.at("n_grid")) c.n_grid.push_back(n.get<std::int64_t>());
  if (j.contains("n_total")) c.n_total = j.at("n_total").get<std::int64_t>();
  if (j.contains("repetitions")) c.repetitions = j.at("repetitions").get<int>();
  if (j.contains("pair")) {
    PairSpec spec;
    spec.kind = pair_kind_from_string(j.at("pair").at("kind").get<std::string>());
    spec.seed = j.at("pair").at("seed").get<std::uint64_t>();
    c.pair = spec;
  }
  if (j.contains("states")) c.states = j.at("states").get<int>();
  if (j.contains("ratio_samples")) c.ratio_samples = j.at("ratio_samples").get<int>();
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();

  if (c.q < 1) throw std::invalid_argument("config: q must be >= 1");
  if (!(c.delta > 0.0 && c.delta < 1.0))
    throw std::invalid_argument("config: delta must be in (0,1)");
  if (c.regions.empty()) throw std::invalid_argument("config: regions must not be empty");
  for (std::size_t i = 1; i < c.n_grid.size(); ++i)
    if (c.n_grid[i] <= c.n_grid[i - 1])
      throw std::invalid_argument("config: n_grid must be strictly increasing");
  if (c.repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
  if (c.protocol == Protocol::quantile) {
    if (c.n_total < 1) throw std::invalid_argument("config: quantile runs need n_total");
    if (c.states < 1 || c.ratio_samples < 1)
      throw std::invalid_argument("config: quantile runs need states and ratio_samples");
  } else if (!c.pair) {
    throw std::invalid_argument("config: sweep runs need a pair spec");
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string ExperimentConfig::to_json_text() const {
  nlohmann::json j;
  j["protocol"] = to_string(protocol);
  j["scheme"] = to_string(scheme);
  j["q"] = q;
  std::vector<std::string> rs;
  for (RegionKind r : regions) rs.push_back(to_string(r));
  j["regions"] = rs;
  j["delta"] = delta;
  if (!n_grid.empty()) j["n_grid"] = n_grid;
  if (n_total > 0) j["n_total"] = n_total;
  j["repetitions"] = repetitions;
  if (pair) j["pair"] = {{"kind", to_string(pair->kind)}, {"seed", pair->seed}};
  if (states > 0) j["states"] = states;
  if (ratio_samples > 0) j["ratio_samples"] = ratio_samples;
  j["master_seed"] = master_seed;
  j["out"] = out;
  j["threads"] = threads;
  return j.dump(2);
}

CVec base_state(int q) {
  const Index d = Index(1) << q;
  CVec psi = CVec::Zero(d);
  switch (q) {
    case 1: psi[0] = psi[1] = 1.0; break;
    case 2: psi[0] = psi[3] = 1.0; break;
    case 3: psi[0] = psi[7] = 1.0; break;
    case 4:
      psi[0b0000] = 1.0;
      psi[0b0011] = 1.0;
      psi[0b1100] = 1.0;
      psi[0b1111] = -1.0;
      break;
    default: throw std::invalid_argument("base_state: q must be 1..4");
  }
  return psi / psi.norm();
}

namespace {

CMat kron_power(const CMat& u, int q) {
  CMat out = CMat::Identity(1, 1);
  for (int i = 0; i < q; ++i) out = kron(out, u).eval();
  return out;
}

double rotated_overlap(const CVec& psi, int q, double theta) {
  // U_z(theta) = exp(i theta sigma_z) is diagonal; the overlap is
  // |sum_k |psi_k|^2 e^{i theta (q - 2 w(k))}|^2 with w the Hamming weight.
  Complex acc = 0.0;
  for (Index k = 0; k < psi.size(); ++k) {
    int w = 0;
    for (Index b = k; b > 0; b >>= 1) w += int(b & 1);
    acc += std::norm(psi[k]) * std::exp(Complex(0, theta * double(q - 2 * w)));
  }
  return std::norm(acc);
}

}  // namespace

std::pair<DensityMatrix, DensityMatrix> target_state_pair(PairKind kind, int q, RngStream& rng) {
  if (q < 1 || q > 4) throw std::invalid_argument("target_state_pair: q must be 1..4");
  const Index d = Index(1) << q;
  const CVec psi_base = base_state(q);
  constexpr double kTargetOverlap = 0.63;

  for (int attempt = 0; attempt < 100; ++attempt) {
    const CMat u = kron_power(haar_random_su2(rng), q);
    const CVec psi = u * psi_base;
    DensityMatrix rho1(psi * psi.adjoint());
    if (kind == PairKind::vs_mixed)
      return {std::move(rho1), DensityMatrix(CMat::Identity(d, d) / double(d))};

    // first downward crossing of overlap(theta) = 0.63 on (0, pi/2]
    const auto f = [&](double theta) { return rotated_overlap(psi, q, theta) - kTargetOverlap; };
    constexpr int kScan = 1024;
    double lo = 0.0, hi = 0.0;
    for (int i = 1; i <= kScan; ++i) {
      const double theta = 0.5 * M_PI * double(i) / kScan;
      if (f(theta) < 0.0) {
        lo = 0.5 * M_PI * double(i - 1) / kScan;
        hi = theta;
        break;
      }
    }
    if (hi == 0.0) continue;  // 0.63 unreachable for this U, redraw
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (f(mid) > 0.0) lo = mid;
      else hi = mid;
      if (std::abs(f(mid)) < 1e-12) break;
    }
    const double theta = 0.5 * (lo + hi);
    CVec uz_diag(d);
    for (Index k = 0; k < d; ++k) {
      int w = 0;
      for (Index b = k; b > 0; b >>= 1) w += int(b & 1);
      uz_diag[k] = std::exp(Complex(0, theta * double(q - 2 * w)));
    }
    const CVec psi2 = uz_diag.asDiagonal() * psi;
    DensityMatrix rho2(psi2 * psi2.adjoint());
    if (std::abs(overlap(rho1, rho2) - kTargetOverlap) > 1e-8) continue;
    return {std::move(rho1), std::move(rho2)};
  }
  throw std::runtime_error("target_state_pair: could not reach overlap 0.63 after 100 redraws");
}

QuantileReport run_quantile_experiment(const ExperimentConfig& config) {
  const auto start = Clock::now();
  if (config.protocol != Protocol::quantile)
    throw std::invalid_argument("run_quantile_experiment: wrong protocol");
  SchemePtr scheme = build_scheme(config.scheme, config.q);
  for (RegionKind kind : config.regions) {
    if (kind != RegionKind::A && kind != RegionKind::C1 && kind != RegionKind::C2)
      throw std::invalid_argument("quantile protocol supports regions A, C1, C2 only");
    if (kind == RegionKind::A && config.scheme == SchemeKind::local_sic && config.q >= 2)
      throw UnsupportedSchemeError("region A is unsupported for multiqubit local SIC-POVMs");
  }

  QuantileReport report;
  report.config = config;
  for (RegionKind kind : config.regions)
    report.per_state[kind].assign(config.states, 0.0);

  for (int st = 0; st < config.states; ++st) {
    RngStream state_rng = RngStream::derive(config.master_seed, {0xa11ce, std::uint64_t(st)});
    const DensityMatrix rho = haar_random_pure(scheme->dim, state_rng);
    const QuantileContext ctx = make_quantile_context(scheme, rho, config.n_total, config.delta);
    std::map<RegionKind, std::vector<double>> samples;
    for (RegionKind kind : config.regions) samples[kind].assign(config.ratio_samples, 0.0);
    parallel_for(config.ratio_samples, config.threads, [&](std::int64_t rep) {
      RngStream rng = RngStream::derive(config.master_seed,
                                        {std::uint64_t(st), std::uint64_t(rep), 0});
      const FrequencyData f = scheme->sample_counts(ctx.probs, ctx.n, rng);
      for (RegionKind kind : config.regions)
        samples.at(kind)[rep] = quantile_ratio(kind, ctx, f);
    });
    for (RegionKind kind : config.regions)
      report.per_state[kind][st] = empirical_quantile(samples.at(kind), config.delta);
  }
  for (RegionKind kind : config.regions) {
    const auto& v = report.per_state[kind];
    report.aggregate[kind] = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    report.min_state[kind] = *std::min_element(v.begin(), v.end());
    report.max_state[kind] = *std::max_element(v.begin(), v.end());
  }
  report.runtime_seconds = seconds_since(start);
  return report;
}

std::string QuantileReport::to_csv() const {
  std::ostringstream os;
  os << "state_index,region,quantile\n";
  for (const auto& [kind, values] : per_state)
    for (std::size_t st = 0; st < values.size(); ++st)
      os << st << "," << to_string(kind) << "," << format_double(values[st]) << "\n";
  return os.str();
}

namespace {

struct SweepWork {
  SchemePtr scheme;
  std::vector<RVec> probs1;
  std::vector<RVec> probs2;
  double delta = 0.0;
};

SweepWork make_sweep_work(const ExperimentConfig& config) {
  SweepWork work;
  work.scheme = build_scheme(config.scheme, config.q);
  work.delta = config.delta;
  RngStream pair_rng(config.pair->seed, 0x9a17);
  const auto pair = target_state_pair(config.pair->kind, config.q, pair_rng);
  work.probs1 = work.scheme->born_probabilities(pair.first.matrix());
  work.probs2 = work.scheme->born_probabilities(pair.second.matrix());
  return work;
}

Region build_intersection_region(const SweepWork& work, RegionKind kind,
                                 const FrequencyData& f) {
  switch (kind) {
    case RegionKind::A: {
      const RVec xhat = lsq_general_bloch(*work.scheme, f);
      return build_region_A(bloch_expand(xhat), f.N, work.scheme->q, work.delta,
                            work.scheme->kind);
    }
    case RegionKind::B:
      return build_region_B(*work.scheme, f, work.delta);
    case RegionKind::C2: {
      const RVec xhat = lsq_general_bloch(*work.scheme, f);
      const RVec p_hat = work.scheme->stat.traceless * xhat.tail(xhat.size() - 1) +
                         work.scheme->stat.offset;
      const double eps =
          epsilon_C2(work.delta, work.scheme->dim, work.scheme->sigma2_max(f.n));
      return build_region_C2(work.scheme, p_hat, eps);
    }
    default:
      throw std::invalid_argument("intersection sweep supports regions A, B, C2 only");
  }
}

}  // namespace

SweepReport run_intersection_sweep(const ExperimentConfig& config) {
  const auto start = Clock::now();
  if (config.protocol != Protocol::intersect_sweep)
    throw std::invalid_argument("run_intersection_sweep: wrong protocol");
  if (!config.pair) throw std::invalid_argument("run_intersection_sweep: missing pair spec");

  SweepWork work = make_sweep_work(config);

  SweepReport report;
  report.config = config;

  for (RegionKind kind : config.regions) {
    if (kind != RegionKind::A && kind != RegionKind::B && kind != RegionKind::C2)
      throw std::invalid_argument("intersection sweep supports regions A, B, C2 only");
    const std::vector<std::int64_t> grid =
        config.n_grid.empty() ? pilot_n_grid(config, kind) : config.n_grid;
    for (std::size_t ni = 0; ni < grid.size(); ++ni) {
      const std::int64_t N = grid[ni];
      const std::int64_t n = N / work.scheme->num_settings;
      if (n < 1) continue;
      if (kind == RegionKind::A) {
        // skip grid points below the validity threshold of epsilon_A
        try {
          epsilon_A(n * work.scheme->num_settings, config.q, config.delta,
                    work.scheme->kind);
        } catch (const InvalidRegimeError&) {
          continue;
        }
      }
      std::vector<char> intersects(config.repetitions, 0);
      std::vector<char> undecided(config.repetitions, 0);
      parallel_for(config.repetitions, config.threads, [&](std::int64_t rep) {
        RngStream rng = RngStream::derive(
            config.master_seed, {std::uint64_t(ni), std::uint64_t(rep), 0xb0b});
        const FrequencyData f1 = work.scheme->sample_counts(work.probs1, n, rng);
        const FrequencyData f2 = work.scheme->sample_counts(work.probs2, n, rng);
        const Region r1 = build_intersection_region(work, kind, f1);
        const Region r2 = build_intersection_region(work, kind, f2);
        const FeasibilityVerdict verdict = decide_intersection(r1, r2);
        // undecided counts as intersecting (conservative)
        intersects[rep] = verdict.status != FeasStatus::infeasible;
        undecided[rep] = verdict.status == FeasStatus::undecided;
      });
      SweepRow row;
      row.N = n * work.scheme->num_settings;
      row.region = kind;
      row.repetitions = config.repetitions;
      int hits = 0, undec = 0;
      for (int rep = 0; rep < config.repetitions; ++rep) {
        hits += intersects[rep];
        undec += undecided[rep];
      }
      row.frequency = double(hits) / double(config.repetitions);
      row.std_err = std::sqrt(row.frequency * (1.0 - row.frequency) /
                              double(config.repetitions));
      row.undecided = undec;
      report.rows.push_back(row);
    }
  }
  report.runtime_seconds = seconds_since(start);
  return report;
}

std::string SweepReport::to_csv() const {
  std::ostringstream os;
  os << "N,region,frequency,std_err,undecided,repetitions\n";
  for (const SweepRow& row : rows)
    os << row.N << "," << to_string(row.region) << "," << format_double(row.frequency)
       << "," << format_double(row.std_err) << "," << row.undecided << ","
       << row.repetitions << "\n";
  return os.str();
}

std::vector<SweepRow> SweepReport::rows_for(RegionKind kind) const {
  std::vector<SweepRow> out;
  for (const SweepRow& row : rows)
    if (row.region == kind) out.push_back(row);
  return out;
}

double crossover_from_rows(const std::vector<SweepRow>& rows) {
  for (std::size_t i = rows.size(); i-- > 1;) {
    const SweepRow& a = rows[i - 1];
    const SweepRow& b = rows[i];
    if (a.frequency >= 0.5 && b.frequency < 0.5) {
      const double la = std::log(double(a.N));
      const double lb = std::log(double(b.N));
      const double t = (0.5 - a.frequency) / (b.frequency - a.frequency);
      return std::exp(la + t * (lb - la));
    }
  }
  throw std::runtime_error("crossover_estimate: no 0.5 crossing inside the grid");
}

double crossover_estimate(const SweepReport& report, RegionKind kind) {
  return crossover_from_rows(report.rows_for(kind));
}

void write_report_files(const std::string& out_stem, const std::string& csv,
                        const ExperimentConfig& config, double runtime_seconds) {
  {
    std::ofstream f(out_stem + ".csv");
    if (!f) throw std::runtime_error("cannot write " + out_stem + ".csv");
    f << csv;
  }
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config.to_json_text());
  j["versions"] = {{"tomocr", "0.1.0"},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  j["runtime_seconds"] = runtime_seconds;
  std::ofstream f(out_stem + ".json");
  if (!f) throw std::runtime_error("cannot write " + out_stem + ".json");
  f << j.dump(2) << "\n";
}

std::vector<std::int64_t> pilot_n_grid(const ExperimentConfig& config, RegionKind kind) {
  // coarse scan, then 12 log-spaced points per decade around the bracket
  ExperimentConfig pilot = config;
  pilot.repetitions = std::max(10, config.repetitions / 10);
  pilot.regions = {kind};
  std::int64_t lo = 30;
  if (kind == RegionKind::A) {
    const std::int64_t settings =
        config.scheme == SchemeKind::pauli ? std::int64_t(std::llround(std::pow(3.0, config.q)))
                                           : 1;
    std::int64_t min_n = region_A_min_samples(config.q, config.delta, config.scheme);
    lo = std::max(lo, ((min_n + settings - 1) / settings) * settings);
  }
  const std::int64_t hi = 3'000'000;
  std::vector<std::int64_t> scan;
  for (int i = 0; i < 4; ++i) {
    const double t = double(i) / 3.0;
    scan.push_back(std::int64_t(std::round(double(lo) * std::pow(double(hi) / double(lo), t))));
  }
  pilot.n_grid = scan;
  SweepReport coarse = run_intersection_sweep(pilot);
  const auto rows = coarse.rows_for(kind);
  double bracket_lo = double(lo), bracket_hi = double(hi);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i - 1].frequency >= 0.5 && rows[i].frequency < 0.5) {
      bracket_lo = double(rows[i - 1].N);
      bracket_hi = double(rows[i].N);
    }
  }
  const double span_lo = bracket_lo / std::pow(10.0, 0.4);
  const double span_hi = bracket_hi * std::pow(10.0, 0.4);
  std::vector<std::int64_t> grid;
  const int points = std::max(4, int(std::ceil(12.0 * std::log10(span_hi / span_lo))));
  for (int i = 0; i <= points; ++i) {
    const double t = double(i) / double(points);
    const std::int64_t N =
        std::int64_t(std::round(span_lo * std::pow(span_hi / span_lo, t)));
    if (grid.empty() || N > grid.back()) grid.push_back(N);
  }
  return grid;
}

}  // namespace tomocr
