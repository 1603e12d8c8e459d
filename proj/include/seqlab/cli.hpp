#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seqlab::cli {

// Runs one seqlab command. `args` excludes the program name. The report goes
// to `out` (one JSON document, or CSV with --format csv), diagnostics to
// `err`. Returns 0 when the claim holds or the construction succeeded, 1 when
// a conflict or failure was found, 2 on usage or precondition errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqlab::cli
