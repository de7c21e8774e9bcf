#pragma once

namespace sts {

// Thread budget for parallel kernels. Controlled by the STS_THREADS
// environment variable (0 or unset = all available cores). Read once.
int thread_budget();

}  // namespace sts
