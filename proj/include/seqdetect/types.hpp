#pragma once

#include <string>
#include <string_view>

namespace seqdetect {

enum class Hypothesis { H0, H1 };

enum class Decision { accept_h0, accept_h1, truncated };

/// Distribution family of a fixed-size statistic: energy (scaled chi-square)
/// or in-phase/quadrature energy ratio (scaled Fisher-F with equal df).
enum class Family { chi2, fisher };

std::string_view to_string(Hypothesis h) noexcept;
std::string_view to_string(Decision d) noexcept;
std::string_view to_string(Family f) noexcept;

// Parsers throw ArgumentError on unknown names.
Hypothesis parse_hypothesis(std::string_view text);
Family parse_family(std::string_view text);

}  // namespace seqdetect
