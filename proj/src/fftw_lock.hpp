#pragma once

#include <mutex>

namespace fracheat::detail {

// FFTW's planner is not thread-safe; execution on distinct arrays is. Every
// plan creation and destruction in the library holds this lock.
std::mutex& fftw_planner_mutex();

}  // namespace fracheat::detail
