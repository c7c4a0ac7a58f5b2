#pragma once

#include <string>

#include "wflowcli/report.hpp"
#include "wflowcli/spec_io.hpp"

namespace wflow::cli {

/// True for one of: identities, hardy, reflexivity, approximation, nogo, all.
bool is_known_suite(const std::string& suite);

/// Execute one suite (or all applicable ones) against the input and return
/// the anchored records. For kind "algebra" inputs only the reflexivity
/// suite applies. Throws InputError on unusable inputs or suite names.
Report run_suite(const SystemSpec& spec, const std::string& suite);

/// 0 when no record failed, 1 otherwise; input errors surface as
/// exceptions before a report exists and map to exit code 2 in the CLI.
int exit_code(const Report& report);

}  // namespace wflow::cli
