#include "oamsim/diag.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace oamsim::diag {

namespace {
std::mutex g_mu;
WarningHandler& handler() {
    static WarningHandler h = [](const std::string& m) { std::cerr << "warning: " << m << "\n"; };
    return h;
}
}  // namespace

WarningHandler set_warning_handler(WarningHandler h) {
    std::lock_guard lk(g_mu);
    return std::exchange(handler(), std::move(h));
}

void warn(const std::string& msg) {
    std::lock_guard lk(g_mu);
    if (handler()) handler()(msg);
}

}  // namespace oamsim::diag
