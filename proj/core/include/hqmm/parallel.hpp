/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_PARALLEL_HPP
#define HQMM_PARALLEL_HPP

#include <functional>

namespace hqmm {

// Runs fn(0) .. fn(count - 1) on at most `jobs` worker threads. Each index
// must touch only its own outputs; callers combine results afterwards in a
// fixed order so the outcome is independent of scheduling. The first
// exception thrown by any index is rethrown on the caller's thread.
void parallel_for(int count, int jobs, const std::function<void(int)> &fn);

} // namespace hqmm

#endif
