#pragma once

#include "toposcope/error.hpp"

#include <optional>
#include <string>

namespace testing {

struct Failure {
    toposcope::ErrorCode code;
    std::string message;
    std::string param;
};

/// Runs fn and returns the toposcope::Error it threw, if any.
template <typename Fn>
std::optional<Failure> failure_of(Fn&& fn)
{
    try {
        fn();
    } catch (const toposcope::Error& e) {
        return Failure{e.code(), e.what(), e.param()};
    }
    return std::nullopt;
}

template <typename Fn>
bool fails_with(toposcope::ErrorCode code, Fn&& fn)
{
    const auto f = failure_of(fn);
    return f && f->code == code;
}

} // namespace testing
