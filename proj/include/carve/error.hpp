#pragma once

#include <stdexcept>
#include <string>

namespace carve {

enum class Errc {
    file_not_found,
    unsupported_format,
    corrupt_image,
    io_failure,
    dimension_mismatch,
    invalid_seam,
    image_too_large,
    empty_image,
    width_too_small,
    invalid_target,
    target_too_large,
    empty_mask,
    insufficient_data,
    size_exceeds_source,
    solver_cap_violated,
    empty_input,
    usage_error,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace carve
