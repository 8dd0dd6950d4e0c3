#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace trajkit {

/// Entry point of the trajkit command. Summaries go to `out`, JSON error
/// reports to `err`. Returns 0 on success, 1 on failure, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trajkit
