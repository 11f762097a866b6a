#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilhodge {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitValidation = 2,
    kExitInternal = 3,
};

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Usage and validation errors map to 1 and 2; anything else, including a
/// failed internal invariant, to 3.
int exit_code_for(const std::exception& e);

/// Runs one `nilhodge` invocation; args[0] is the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nilhodge
