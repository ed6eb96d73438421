#include "tordiss/error.hpp"
#include "tordiss/maps.hpp"
#include "tordiss/parallel.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace tordiss {

namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct FftBuffers {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;
  FftBuffers(int d, int64_t N) {
    int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= N;
    in = fftw_alloc_complex(static_cast<size_t>(total));
    out = fftw_alloc_complex(static_cast<size_t>(total));
    std::vector<int> dims(static_cast<size_t>(d), static_cast<int>(N));
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft(d, dims.data(), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~FftBuffers() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;
};

int64_t wrap(int64_t j, int64_t N) { return ((j % N) + N) % N; }

}  // namespace

GalerkinMatrix koopman_matrix(const SampledMap& map, const GridPtr& grid, unsigned jobs, double drop_tol) {
  const int d = map.dim();
  const int64_t N = map.samples();
  const int64_t K = grid->cutoff();
  if (grid->dim() != d) throw DimensionError("grid and map dimensions differ");
  if (N < 4 * K) throw ConfigError("dense.N", "anti-aliasing rule needs N >= 4K");
  const int64_t total = map.sample_count();
  const int64_t n_modes = grid->size();
  const double scale = 1.0 / static_cast<double>(total);

  std::vector<std::vector<Eigen::Triplet<cplx, int64_t>>> cols(static_cast<size_t>(n_modes));
  std::vector<double> leaked(static_cast<size_t>(n_modes), 0.0);
  std::vector<std::vector<int64_t>> sample_index(static_cast<size_t>(total));
  for (int64_t s = 0; s < total; ++s) {
    std::vector<int64_t> n(static_cast<size_t>(d));
    int64_t r = s;
    for (int i = d - 1; i >= 0; --i) {
      n[static_cast<size_t>(i)] = r % N;
      r /= N;
    }
    sample_index[static_cast<size_t>(s)] = std::move(n);
  }
  // FFT output position of every grid row
  std::vector<int64_t> row_pos(static_cast<size_t>(n_modes));
  for (int64_t j = 0; j < n_modes; ++j) {
    ModeIndex m = grid->mode(j);
    int64_t p = 0;
    for (int i = 0; i < d; ++i) p = p * N + wrap(m[static_cast<size_t>(i)], N);
    row_pos[static_cast<size_t>(j)] = p;
  }

  jobs = std::max(1u, jobs);
  const int64_t chunks = std::min<int64_t>(jobs, n_modes);
  parallel_for(chunks, jobs, [&](int64_t chunk) {
    FftBuffers buf(d, N);
    constexpr double tau = 2 * std::numbers::pi;
    for (int64_t c = chunk; c < n_modes; c += chunks) {
      ModeIndex k = grid->mode(c);
      for (int64_t s = 0; s < total; ++s) {
        double ph = tau * map.phase(k, sample_index[static_cast<size_t>(s)]);
        buf.in[s][0] = std::cos(ph);
        buf.in[s][1] = std::sin(ph);
      }
      fftw_execute_dft(buf.plan, buf.in, buf.out);
      double retained = 0;
      auto& col = cols[static_cast<size_t>(c)];
      for (int64_t j = 0; j < n_modes; ++j) {
        const auto& o = buf.out[row_pos[static_cast<size_t>(j)]];
        cplx v(o[0] * scale, o[1] * scale);
        retained += std::norm(v);
        if (std::abs(v) > drop_tol) col.emplace_back(j, c, v);
      }
      leaked[static_cast<size_t>(c)] = std::max(0.0, 1.0 - retained);
    }
  });

  std::vector<Eigen::Triplet<cplx, int64_t>> all;
  for (auto& c : cols) all.insert(all.end(), c.begin(), c.end());
  SparseC m(n_modes, n_modes);
  m.setFromTriplets(all.begin(), all.end());
  GalerkinMatrix out{DenseOperator(grid, std::move(m)), std::move(leaked), 0.0};
  for (double l : out.leaked) out.max_leak = std::max(out.max_leak, l);
  return out;
}

void transported_modes(const SampledMap& map, const std::vector<ModeIndex>& ks, int n_max, int64_t M,
                       const TransportVisitor& visit, double drop_tol) {
  const int d = map.dim();
  for (const auto& k : ks)
    if (static_cast<int>(k.size()) != d) throw DimensionError("mode dimension mismatch");
  if (n_max < 0) throw std::invalid_argument("n must be nonnegative");
  FftBuffers buf(d, M);
  int64_t total = 1;
  for (int i = 0; i < d; ++i) total *= M;
  constexpr double tau = 2 * std::numbers::pi;
  const bool exact = map.delta() == 0.0;
  const IntMatrix At = map.matrix().transpose();
  const double delta = map.delta();
  // orbit of the sample grid: integer residues when F maps grid points to grid points
  std::vector<int64_t> y(static_cast<size_t>(total * d));
  std::vector<double> x(exact ? 0 : static_cast<size_t>(total * d));
  for (int64_t s = 0; s < total; ++s) {
    int64_t r = s;
    for (int i = d - 1; i >= 0; --i) {
      y[static_cast<size_t>(s * d + i)] = r % M;
      if (!exact) x[static_cast<size_t>(s * d + i)] = static_cast<double>(r % M) / static_cast<double>(M);
      r /= M;
    }
  }
  std::vector<int64_t> zi(static_cast<size_t>(d));
  std::vector<double> zd(static_cast<size_t>(d));
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) {
      for (int64_t s = 0; s < total; ++s) {
        if (exact) {
          int64_t* p = &y[static_cast<size_t>(s * d)];
          for (int i = 0; i < d; ++i) {
            __int128 acc = 0;
            for (int j = 0; j < d; ++j) acc += static_cast<__int128>(At(i, j)) * p[j];
            zi[static_cast<size_t>(i)] = static_cast<int64_t>(((acc % M) + M) % M);
          }
          std::copy(zi.begin(), zi.end(), p);
        } else {
          double* p = &x[static_cast<size_t>(s * d)];
          p[0] += delta * std::sin(tau * p[1]);
          p[1] += delta * std::sin(tau * p[0]);
          for (int i = 0; i < d; ++i) {
            double acc = 0;
            for (int j = 0; j < d; ++j) acc += static_cast<double>(At(i, j)) * p[j];
            zd[static_cast<size_t>(i)] = acc - std::floor(acc);
          }
          std::copy(zd.begin(), zd.end(), p);
        }
      }
    }
    for (size_t ki = 0; ki < ks.size(); ++ki) {
      const auto& k = ks[ki];
      for (int64_t s = 0; s < total; ++s) {
        double ph;
        if (exact) {
          __int128 acc = 0;
          for (int i = 0; i < d; ++i)
            acc += static_cast<__int128>(k[static_cast<size_t>(i)]) * y[static_cast<size_t>(s * d + i)];
          ph = static_cast<double>(static_cast<int64_t>(((acc % M) + M) % M)) / static_cast<double>(M);
        } else {
          double acc = 0;
          for (int i = 0; i < d; ++i) acc += static_cast<double>(k[static_cast<size_t>(i)]) * x[static_cast<size_t>(s * d + i)];
          ph = acc - std::floor(acc);
        }
        buf.in[s][0] = std::cos(tau * ph);
        buf.in[s][1] = std::sin(tau * ph);
      }
      fftw_execute_dft(buf.plan, buf.in, buf.out);
      std::vector<std::pair<ModeIndex, cplx>> out;
      const double scale = 1.0 / static_cast<double>(total);
      for (int64_t s = 0; s < total; ++s) {
        cplx v(buf.out[s][0] * scale, buf.out[s][1] * scale);
        if (std::abs(v) <= drop_tol) continue;
        ModeIndex j(static_cast<size_t>(d));
        int64_t r = s;
        for (int i = d - 1; i >= 0; --i) {
          int64_t m = r % M;
          j[static_cast<size_t>(i)] = m > M / 2 ? m - M : m;
          r /= M;
        }
        out.emplace_back(std::move(j), v);
      }
      visit(n, ki, out);
    }
  }
}

std::vector<std::pair<ModeIndex, cplx>> transported_mode(const SampledMap& map, const ModeIndex& k, int n,
                                                         int64_t M, double drop_tol) {
  std::vector<std::pair<ModeIndex, cplx>> result;
  transported_modes(
      map, {k}, n, M,
      [&](int step, size_t, const std::vector<std::pair<ModeIndex, cplx>>& c) {
        if (step == n) result = c;
      },
      drop_tol);
  return result;
}

}  // namespace tordiss
