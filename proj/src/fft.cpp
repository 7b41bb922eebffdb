#include "magctrl/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

#include "magctrl/parallel.hpp"

namespace magctrl {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::array<int, 4>, PlanPair>& plan_cache() {
  static auto* m = new std::map<std::array<int, 4>, PlanPair>();
  return *m;
}

PlanPair get_plans(const Grid& g) {
  std::array<int, 4> key = {g.d, g.n[0], g.n[1], g.n[2]};
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<cplx> scratch(static_cast<std::size_t>(g.size()));
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  PlanPair pp;
  pp.fwd = fftw_plan_dft(g.d, g.n.data(), p, p, FFTW_FORWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  pp.bwd = fftw_plan_dft(g.d, g.n.data(), p, p, FFTW_BACKWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!pp.fwd || !pp.bwd) throw std::runtime_error("fftw planning failed");
  cache[key] = pp;
  return pp;
}

}  // namespace

void fft_forward_inplace(const Grid& g, std::vector<cplx>& x) {
  if (static_cast<std::int64_t>(x.size()) != g.size())
    throw std::invalid_argument("fft: size mismatch");
  PlanPair pp = get_plans(g);
  auto* p = reinterpret_cast<fftw_complex*>(x.data());
  fftw_execute_dft(pp.fwd, p, p);
}

void fft_inverse_inplace(const Grid& g, std::vector<cplx>& x) {
  if (static_cast<std::int64_t>(x.size()) != g.size())
    throw std::invalid_argument("fft: size mismatch");
  PlanPair pp = get_plans(g);
  auto* p = reinterpret_cast<fftw_complex*>(x.data());
  fftw_execute_dft(pp.bwd, p, p);
  const double inv = 1.0 / static_cast<double>(g.size());
  parallel_for(g.size(), [&](std::int64_t i) { x[static_cast<std::size_t>(i)] *= inv; });
}

void fft_forward(const Grid& g, const std::vector<cplx>& in, std::vector<cplx>& out) {
  out = in;
  fft_forward_inplace(g, out);
}

void fft_inverse(const Grid& g, const std::vector<cplx>& in, std::vector<cplx>& out) {
  out = in;
  fft_inverse_inplace(g, out);
}

}  // namespace magctrl
