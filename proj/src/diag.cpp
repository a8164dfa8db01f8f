#include "mmfso/diag.hpp"

#include <iostream>
#include <mutex>

namespace mmfso {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

std::function<void(const std::string&)>& sink() {
    static std::function<void(const std::string&)> s;
    return s;
}

}  // namespace

void warn(const std::string& message) {
    std::lock_guard lock(sink_mutex());
    if (sink()) {
        sink()(message);
        return;
    }
    std::cerr << "warning: " << message << '\n';
}

void set_warning_sink(std::function<void(const std::string&)> s) {
    std::lock_guard lock(sink_mutex());
    sink() = std::move(s);
}

}  // namespace mmfso
