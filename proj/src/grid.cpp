#include "magctrl/grid.hpp"

#include <sstream>
#include <stdexcept>

namespace magctrl {
namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate(const Grid& g) {
  if (g.d < 1 || g.d > 3) throw std::invalid_argument("grid: d must be 1..3");
  std::int64_t total = 1;
  for (int a = 0; a < g.d; ++a) {
    const int N = g.n[static_cast<std::size_t>(a)];
    if (!is_pow2(N)) throw std::invalid_argument("grid: N must be a power of two");
    total *= N;
  }
  if (total > (std::int64_t{1} << 20))
    throw std::invalid_argument("grid: total points exceed 2^20");
  if (g.domain == Domain::Line && !(g.L > 0.0))
    throw std::invalid_argument("grid: Line needs L > 0");
}

}  // namespace

Grid Grid::torus(int d, int n_per_axis) {
  Grid g;
  g.domain = Domain::Torus;
  g.d = d;
  for (int a = 0; a < d; ++a) g.n[static_cast<std::size_t>(a)] = n_per_axis;
  validate(g);
  return g;
}

Grid Grid::line(int d, int n_per_axis, double L) {
  Grid g;
  g.domain = Domain::Line;
  g.d = d;
  g.L = L;
  for (int a = 0; a < d; ++a) g.n[static_cast<std::size_t>(a)] = n_per_axis;
  validate(g);
  return g;
}

std::string Grid::describe() const {
  std::ostringstream os;
  os << (domain == Domain::Torus ? "torus" : "line") << " d=" << d << " n=";
  for (int a = 0; a < d; ++a) os << (a ? "x" : "") << n[static_cast<std::size_t>(a)];
  if (domain == Domain::Line) os << " L=" << L;
  return os.str();
}

}  // namespace magctrl
