#pragma once

#include "gak/alignment.hpp"
#include "gak/bench.hpp"
#include "gak/cross_validation.hpp"
#include "gak/dtw.hpp"
#include "gak/errors.hpp"
#include "gak/ga_kernel.hpp"
#include "gak/gram.hpp"
#include "gak/ground_kernel.hpp"
#include "gak/matrix.hpp"
#include "gak/svm.hpp"
#include "gak/timeseries.hpp"

namespace gak {

inline constexpr const char* version = "0.1.0";
inline constexpr int dataset_format_version = 1;
inline constexpr int gram_format_version = 1;

}  // namespace gak
