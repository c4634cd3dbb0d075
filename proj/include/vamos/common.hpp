#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vamos {

// Error taxonomy. The CLI maps config_error to exit code 2 and every other
// vamos::error to exit code 3.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : error {
    using error::error;
};

// Bad magic, truncated payload, non-finite values, unparsable files.
struct data_error : error {
    using error::error;
};

struct shape_error : error {
    using error::error;
};

struct index_error : error {
    using error::error;
};

// Negative predictions and similar out-of-domain inputs.
struct domain_error : error {
    using error::error;
};

// Fixed-mask generation could not place the requested events disjointly.
struct capacity_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

} // namespace vamos
