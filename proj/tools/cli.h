#ifndef JAMOEVAL_TOOLS_CLI_H_
#define JAMOEVAL_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace jamoeval {

// Runs the jamoeval command line. `args` excludes the program name.
// Returns 0 on success, 1 on invalid data, 2 on usage errors.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jamoeval

#endif  // JAMOEVAL_TOOLS_CLI_H_
