#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace gmeas {

/// Library logger ("gmeas"), created on first use with level `warn`.
spdlog::logger& logger();

}  // namespace gmeas
