#pragma once

#include <complex>

namespace dce {

using cplx = std::complex<double>;

}  // namespace dce
