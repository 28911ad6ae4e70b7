#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace thermoprep::validation {

/// Canned suite names accepted by run_suite.
std::vector<std::string> suite_names();

/// Runs one suite, writes <out_dir>/<name>.csv and <out_dir>/<name>.json and
/// prints one line per criterion to `log`. Returns 0 when every criterion
/// passes, 1 when one fails, 2 for an unknown name and 4 on write failure.
int run_suite(const std::string& name, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace thermoprep::validation
