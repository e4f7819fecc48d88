#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace flywheel::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageError = 2,
    kConfigError = 3,
    kNumericalError = 4,
    kIoError = 5,
};

/// Entry point for `flywheel <evaluate|analyze|optimize> ...`; args exclude the program name.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "t1,t2,...,tn". Throws std::invalid_argument on an empty list or a bad number.
std::vector<double> parse_thickness_list(const std::string& text);

} // namespace flywheel::cli
