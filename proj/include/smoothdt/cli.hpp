#pragma once

#include <string>
#include <vector>

namespace smoothdt {

/// Command-line entry point. Subcommands: learn, sz-check,
/// propagation-check, coeff-recovery, oracle-coeffs.
/// Returns 0 on success, 1 on validation or I/O errors, 2 when a learn
/// campaign's FAIL rate exceeds the configured limit.
int cli(const std::vector<std::string>& args);

} // namespace smoothdt
