#pragma once

namespace starlocal {

// Execution policy for the kernels that have both implementations.  The
// parallel path must produce bit-identical results to the serial one;
// tests compare the two directly.
enum class ExecPolicy { serial, parallel };

// Number of OpenMP threads the parallel policy would use (1 when built
// without OpenMP).
int max_threads();

}  // namespace starlocal
