#pragma once

#include <string>
#include <vector>

namespace symflow::cli {

/// Dispatches a subcommand (train, eval, check-invariants, check-equivariance,
/// density, gradcheck). Exit code 0 on success or a passing check, 1 on a
/// failing check, 2 on usage errors. Numeric results are also written to
/// <out>/report.json when --out is given.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace symflow::cli
