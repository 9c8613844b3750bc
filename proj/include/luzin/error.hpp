#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace luzin {

enum class Errc {
    invalid_input,
    capacity,
    scale_search_exhausted,
    bandwidth_exhausted,
    unsupported_input,
    resolution_exhausted,
    enumeration_exhausted,
    universal_set_too_shallow,
    internal_invariant,
};

inline std::string_view to_string(Errc e) {
    switch (e) {
        case Errc::invalid_input: return "invalid-input";
        case Errc::capacity: return "capacity";
        case Errc::scale_search_exhausted: return "scale-search-exhausted";
        case Errc::bandwidth_exhausted: return "bandwidth-exhausted";
        case Errc::unsupported_input: return "unsupported-input";
        case Errc::resolution_exhausted: return "resolution-exhausted";
        case Errc::enumeration_exhausted: return "enumeration-exhausted";
        case Errc::universal_set_too_shallow: return "universal-set-too-shallow";
        case Errc::internal_invariant: return "internal-invariant";
    }
    return "unknown";
}

// `achieved` carries the best value reached before giving up (NaN if none).
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, double achieved = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), achieved_(achieved) {}

    Errc code() const noexcept { return code_; }
    double achieved() const noexcept { return achieved_; }

private:
    Errc code_;
    double achieved_;
};

inline void require(bool cond, Errc code, const std::string& what) {
    if (!cond) throw Error(code, what);
}

}  // namespace luzin
