#pragma once

#include <iosfwd>
#include <string>

#include "proofsmith/io.hpp"
#include "proofsmith/verifier.hpp"

namespace proofsmith {

// Answers one protocol request line with one response object.
OrderedJson handle_verifier_request(Verifier& verifier, const std::string& line);

// Serves the JSON-lines verifier protocol until `in` reaches EOF.
// Returns the number of requests answered.
std::size_t serve_verifier(Verifier& verifier, std::istream& in, std::ostream& out);

}  // namespace proofsmith
