#pragma once

namespace monofact {

/// Selects the OpenMP kernel or the serial reference loop it is tested against.
enum class Execution { serial, parallel };

/// Worker threads the parallel kernels will use.
int max_threads();
/// 0 keeps the OpenMP default.
void set_threads(int threads);

}  // namespace monofact
