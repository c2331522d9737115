#ifndef PAN_CLI_HPP
#define PAN_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace pan::cli {

// Full command-line entry point; returns the process exit status
// (0 ok, 2 usage, 3 data, 4 numeric, 5 internal). Reports go to `out`,
// error documents to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pan::cli

#endif
