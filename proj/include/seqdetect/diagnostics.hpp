#pragma once

#include <functional>
#include <string_view>

namespace seqdetect {

using WarningHandler = std::function<void(std::string_view)>;

/// Route library warnings (approximation validity, series range, ...) to a
/// custom sink. The default writes "warning: <msg>" to stderr. Passing an
/// empty handler silences warnings. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

/// RAII capture used by tests and by the CLI's --quiet flag.
class ScopedWarningHandler {
public:
    explicit ScopedWarningHandler(WarningHandler handler)
        : previous_(set_warning_handler(std::move(handler))) {}
    ~ScopedWarningHandler() { set_warning_handler(std::move(previous_)); }
    ScopedWarningHandler(const ScopedWarningHandler&) = delete;
    ScopedWarningHandler& operator=(const ScopedWarningHandler&) = delete;

private:
    WarningHandler previous_;
};

}  // namespace seqdetect
