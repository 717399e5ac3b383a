#ifndef NCT_CLI_HPP
#define NCT_CLI_HPP

#include <string>
#include <vector>

namespace nct {

/// Exit codes: 0 ok, 2 config error, 3 mesh error, 4 solver failure,
/// 5 verification threshold failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace nct

#endif
