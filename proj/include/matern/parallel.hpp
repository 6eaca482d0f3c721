#pragma once

namespace matern {

/// Caps the worker pool used by every parallel loop in the library.
/// Values < 1 restore the hardware default.
void set_num_threads(int threads);
int num_threads();
int hardware_threads();

}  // namespace matern
