#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <utility>

namespace ondat::log {

using Handler = std::function<void(const std::string&)>;

namespace detail {

inline std::mutex& mutex() {
	static std::mutex m;
	return m;
}

inline Handler& handler() {
	static Handler h = [](const std::string& msg) { std::clog << "[ondat] warning: " << msg << '\n'; };
	return h;
}

} // namespace detail

/// Replace the warning sink; a null handler restores the default (clog).
inline void set_warning_handler(Handler h) {
	std::lock_guard lock(detail::mutex());
	if (h) {
		detail::handler() = std::move(h);
	} else {
		detail::handler() = [](const std::string& msg) { std::clog << "[ondat] warning: " << msg << '\n'; };
	}
}

inline void warn(const std::string& msg) {
	std::lock_guard lock(detail::mutex());
	detail::handler()(msg);
}

} // namespace ondat::log
