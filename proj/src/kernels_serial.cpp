#include <algorithm>
#include <cmath>
#include <cstddef>

#include "hlc/kernels.hpp"

namespace hlc::kernels::serial {

#define HLC_FOR
#define HLC_FOR_SUM(a)
#define HLC_FOR_SUM2(a, b)
#define HLC_FOR_MAX(a)

#include "kernels_body.inc"

}  // namespace hlc::kernels::serial
