#include "magctrl/propagator.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include <lapacke.h>

#include "magctrl/dense.hpp"
#include "magctrl/parallel.hpp"
#include "magctrl/state.hpp"

namespace magctrl {

namespace {

constexpr double kSegmentTol = 1e-9;
constexpr int kMaxKrylovDim = 80;
constexpr double kSubstepBudget = 40.0;  // target tau * spread per substep

std::map<std::pair<std::uint64_t, std::string>, std::shared_ptr<EigData>> g_eig_cache;
std::mutex g_eig_mutex;

std::string control_key(const std::vector<double>& u) {
  std::string key;
  char buf[32];
  for (double v : u) {
    std::snprintf(buf, sizeof buf, "%.12e;", v);
    key += buf;
  }
  return key;
}

std::shared_ptr<EigData> cached_eig(const ControlSystem& sys, const std::vector<double>& u) {
  const auto key = std::make_pair(sys.id, control_key(u));
  {
    std::lock_guard<std::mutex> lock(g_eig_mutex);
    auto it = g_eig_cache.find(key);
    if (it != g_eig_cache.end()) return it->second;
  }
  auto H = assemble(sys, u);
  auto eig = std::make_shared<EigData>(eig_hermitian(std::move(H), static_cast<int>(sys.grid.size())));
  std::lock_guard<std::mutex> lock(g_eig_mutex);
  g_eig_cache.emplace(key, eig);
  return eig;
}

// raw (unweighted) vector dot products; the uniform cell volume cancels
cplx vdot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return parallel_sum_c(static_cast<std::int64_t>(a.size()), [&](std::int64_t i) {
    return std::conj(a[static_cast<std::size_t>(i)]) * b[static_cast<std::size_t>(i)];
  });
}

double vnorm(const std::vector<cplx>& a) {
  const double s = parallel_sum(static_cast<std::int64_t>(a.size()), [&](std::int64_t i) {
    return std::norm(a[static_cast<std::size_t>(i)]);
  });
  return std::sqrt(s);
}

// One Lanczos exponential step with full reorthogonalization. Returns the
// a-posteriori error estimate, or a negative value when the subspace cap was
// reached without meeting the tolerance.
double lanczos_step(const ControlSystem& sys, const std::vector<double>& u,
                    double tau, WaveFunction& psi, double tol, int& dim_used) {
  const std::size_t n = psi.v.size();
  const double beta0 = vnorm(psi.v);
  if (beta0 == 0.0) return 0.0;

  std::vector<std::vector<cplx>> V;
  std::vector<double> alpha, beta;  // beta[j] couples v_j to v_{j+1}
  V.emplace_back(psi.v);
  parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t i) {
    V[0][static_cast<std::size_t>(i)] /= beta0;
  });

  WaveFunction work(psi.grid);
  double err = -1.0;

  for (int j = 0; j < kMaxKrylovDim; ++j) {
    work.v = V[static_cast<std::size_t>(j)];
    WaveFunction hw = apply_hamiltonian(sys, u, work);
    const double a = std::real(vdot(V[static_cast<std::size_t>(j)], hw.v));
    alpha.push_back(a);
    parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t i) {
      const auto ii = static_cast<std::size_t>(i);
      cplx w = hw.v[ii] - a * V[static_cast<std::size_t>(j)][ii];
      if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * V[static_cast<std::size_t>(j - 1)][ii];
      hw.v[ii] = w;
    });
    // full reorthogonalization keeps the basis orthonormal to roundoff,
    // which is what keeps the propagated norm pinned to 1
    for (int i = 0; i <= j; ++i) {
      const cplx c = vdot(V[static_cast<std::size_t>(i)], hw.v);
      parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t k) {
        hw.v[static_cast<std::size_t>(k)] -= c * V[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      });
    }
    const double b = vnorm(hw.v);
    const int m = j + 1;

    // e^{-i tau T_m} e_1 through the real symmetric tridiagonal eigensolve
    std::vector<double> diag(alpha), off(beta);
    off.resize(static_cast<std::size_t>(std::max(0, m - 1)));
    std::vector<double> Z(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', m, diag.data(),
                                          off.data(), Z.data(), m);
    if (info != 0) throw std::runtime_error("lanczos: dstev failed");
    std::vector<cplx> y(static_cast<std::size_t>(m), cplx{0.0, 0.0});
    for (int q = 0; q < m; ++q) {
      const cplx factor = std::polar(1.0, -tau * diag[static_cast<std::size_t>(q)]) *
                          Z[static_cast<std::size_t>(q) * static_cast<std::size_t>(m)];
      for (int r = 0; r < m; ++r)
        y[static_cast<std::size_t>(r)] += factor * Z[static_cast<std::size_t>(q) * static_cast<std::size_t>(m) + static_cast<std::size_t>(r)];
    }

    const double est = std::abs(tau) * b * std::abs(y[static_cast<std::size_t>(m - 1)]);
    const bool happy = b <= 1e-12 * std::max(1.0, std::abs(a));
    if (est <= tol || happy || m == kMaxKrylovDim) {
      if (est <= tol || happy) err = est;
      dim_used = std::max(dim_used, m);
      // psi = beta0 * V_m y
      parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t k) {
        const auto kk = static_cast<std::size_t>(k);
        cplx s{0.0, 0.0};
        for (int r = 0; r < m; ++r) s += V[static_cast<std::size_t>(r)][kk] * y[static_cast<std::size_t>(r)];
        psi.v[kk] = beta0 * s;
      });
      return err;
    }

    beta.push_back(b);
    V.emplace_back(hw.v);
    parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t k) {
      V.back()[static_cast<std::size_t>(k)] /= b;
    });
  }
  return err;
}

void evolve_krylov(const ControlSystem& sys, const std::vector<double>& u,
                   double tau, WaveFunction& psi, EvolveInfo* info, int depth = 0) {
  if (depth > 24) throw std::runtime_error("evolve_krylov: refinement did not converge");
  const double spread = hamiltonian_spread_bound(sys, u);
  const int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(tau) * spread / kSubstepBudget)));
  const double h = tau / substeps;
  const double tol = kSegmentTol / substeps;
  for (int s = 0; s < substeps; ++s) {
    WaveFunction saved = psi;
    int dim = 0;
    const double err = lanczos_step(sys, u, h, psi, tol, dim);
    if (err < 0.0) {
      // subspace cap hit: halve this substep and recurse
      psi = std::move(saved);
      evolve_krylov(sys, u, h / 2.0, psi, info, depth + 1);
      evolve_krylov(sys, u, h / 2.0, psi, info, depth + 1);
    } else if (info) {
      info->err_estimate += err;
      info->max_dim = std::max(info->max_dim, dim);
    }
    if (info) ++info->substeps;
  }
}

}  // namespace

void evolve_constant(const ControlSystem& sys, const std::vector<double>& u,
                     double tau, WaveFunction& psi, Method method, EvolveInfo* info) {
  if (!(psi.grid == sys.grid)) throw std::invalid_argument("evolve_constant: grid mismatch");
  if (u.size() != static_cast<std::size_t>(sys.m()))
    throw std::invalid_argument("evolve_constant: control vector size mismatch");
  if (tau == 0.0) return;
  Method m = method;
  if (m == Method::Auto)
    m = sys.grid.size() <= 1024 ? Method::DenseEig : Method::Krylov;
  if (m == Method::DenseEig) {
    auto eig = cached_eig(sys, u);
    eig_evolve(*eig, tau, psi.v);
    if (info) {
      info->used_dense = true;
      ++info->substeps;
    }
  } else {
    evolve_krylov(sys, u, tau, psi, info);
  }
}

void clear_eig_cache() {
  std::lock_guard<std::mutex> lock(g_eig_mutex);
  g_eig_cache.clear();
}

std::size_t eig_cache_entries() {
  std::lock_guard<std::mutex> lock(g_eig_mutex);
  return g_eig_cache.size();
}

WaveFunction execute(const ControlSystem& sys, const Schedule& sched,
                     const WaveFunction& psi0, const ExecOptions& opts,
                     ExecInfo* info) {
  WaveFunction psi = psi0;
  ExecInfo local;
  for (const auto& seg : sched.segments) {
    switch (seg.kind) {
      case SegmentKind::Evolve:
        evolve_constant(sys, seg.u, seg.duration, psi, opts.method);
        local.evolve_time += seg.duration;
        break;
      case SegmentKind::Kick:
        if (opts.kick_mode == KickMode::Ideal) {
          if (seg.kick_phase.v.size() != psi.v.size())
            throw std::invalid_argument("execute: kick field size mismatch");
          phase_multiply(psi, seg.kick_phase, 1.0);
        } else {
          if (!seg.has_coeffs)
            throw std::invalid_argument(
                "execute: pulsed mode needs span coefficients on every kick");
          std::vector<double> burst(seg.kick_coeffs.size());
          for (std::size_t j = 0; j < burst.size(); ++j)
            burst[j] = -seg.kick_coeffs[j] / opts.eps_kick;
          evolve_constant(sys, burst, opts.eps_kick, psi, opts.method);
          local.evolve_time += opts.eps_kick;
        }
        break;
      case SegmentKind::GlobalPhase: {
        const cplx f = std::polar(1.0, seg.phase);
        parallel_for(static_cast<std::int64_t>(psi.v.size()), [&](std::int64_t i) {
          psi.v[static_cast<std::size_t>(i)] *= f;
        });
        local.global_phase += seg.phase;
        break;
      }
    }
    ++local.segments;
    local.norm_drift_max = std::max(local.norm_drift_max, std::abs(norm(psi) - 1.0));
  }
  if (info) *info = local;
  return psi;
}

}  // namespace magctrl
