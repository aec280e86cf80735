#pragma once

#include <string>
#include <vector>

namespace mqp {

// Renders a real with 6 significant digits ("%g"): 6001215 -> "6.00122e+06",
// 8.3333... -> "8.33333", 150000 -> "150000".
std::string format_real(double value);

// Renders a real so that parsing the text recovers the exact value; whole
// numbers print without an exponent.  Used by the catalog writer.
std::string format_exact(double value);

std::vector<std::string> split(const std::string& text, char sep);

// Trims ASCII whitespace from both ends.
std::string trim(const std::string& text);

// Collapses every whitespace run to a single space and trims: used when
// comparing emitted plan files token-for-token.
std::vector<std::string> tokens_of(const std::string& text);

std::string join_strings(const std::vector<std::string>& parts, const std::string& sep);

}  // namespace mqp
