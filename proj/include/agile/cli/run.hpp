#pragma once

#include <string>
#include <vector>

namespace agile::cli {

// Entry point shared by the binary and the tests. args excludes the
// program name. Exit codes: 0 success, 2 usage error, 3 data error,
// 4 transport error, 1 unexpected failure.
int run(const std::vector<std::string>& args);

}  // namespace agile::cli
