#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace affmem::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitAnalysis = 3;

inline constexpr const char* kStoreEnvVar = "AFFMEM_STORE";
inline constexpr const char* kDefaultStore = "./affmem-store";

// Runs one CLI invocation. args excludes the program name. Results go to
// out, warnings and errors to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace affmem::cli
