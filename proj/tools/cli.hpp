#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wealthlab::cli {

/// Entry point shared by the executable and the tests. Exit codes: 0 on
/// success, 1 on a model or runtime failure, 2 on bad usage or input.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* version() noexcept;

}  // namespace wealthlab::cli
