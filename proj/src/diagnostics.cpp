#include "seqdetect/diagnostics.hpp"

#include <iostream>
#include <mutex>
#include <string>

#include "seqdetect/errors.hpp"
#include "seqdetect/types.hpp"

namespace seqdetect {

namespace {

std::mutex& handler_mutex()
{
    static std::mutex m;
    return m;
}

WarningHandler& current_handler()
{
    static WarningHandler handler = [](std::string_view msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler)
{
    std::lock_guard lock(handler_mutex());
    WarningHandler previous = std::move(current_handler());
    current_handler() = std::move(handler);
    return previous;
}

void warn(std::string_view message)
{
    std::lock_guard lock(handler_mutex());
    if (current_handler())
        current_handler()(message);
}

std::string_view to_string(Hypothesis h) noexcept
{
    return h == Hypothesis::H0 ? "H0" : "H1";
}

std::string_view to_string(Decision d) noexcept
{
    switch (d) {
    case Decision::accept_h0:
        return "accept_H0";
    case Decision::accept_h1:
        return "accept_H1";
    case Decision::truncated:
        return "truncated";
    }
    return "unknown";
}

std::string_view to_string(Family f) noexcept
{
    return f == Family::chi2 ? "chi2" : "fisher";
}

Hypothesis parse_hypothesis(std::string_view text)
{
    if (text == "H0" || text == "h0")
        return Hypothesis::H0;
    if (text == "H1" || text == "h1")
        return Hypothesis::H1;
    throw ArgumentError("unknown hypothesis '" + std::string(text) + "' (expected H0 or H1)");
}

Family parse_family(std::string_view text)
{
    if (text == "chi2")
        return Family::chi2;
    if (text == "fisher")
        return Family::fisher;
    throw ArgumentError("unknown family '" + std::string(text) + "' (expected chi2 or fisher)");
}

}  // namespace seqdetect
