#ifndef SEMSEARCH_CLI_H_
#define SEMSEARCH_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace semsearch {

// Entry point of the semsearch tool. args excludes the program name.
// Returns the process exit code: 0 success, 1 failure, 2 usage error.
int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err);

}  // namespace semsearch

#endif  // SEMSEARCH_CLI_H_
