#pragma once
#include "magctrl/grid.hpp"

namespace magctrl {

// d-dimensional complex FFT on a Grid, backed by cached FFTW plans
// (FFTW_ESTIMATE, new-array execution; plan creation is mutex-guarded).
// inverse() includes the 1/prod(N) factor, so inverse(forward(x)) == x.
void fft_forward(const Grid& g, const std::vector<cplx>& in, std::vector<cplx>& out);
void fft_inverse(const Grid& g, const std::vector<cplx>& in, std::vector<cplx>& out);

void fft_forward_inplace(const Grid& g, std::vector<cplx>& x);
void fft_inverse_inplace(const Grid& g, std::vector<cplx>& x);

}  // namespace magctrl
