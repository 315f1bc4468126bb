// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hmf {

enum class Errc {
    invalid_argument,  // bad parameter (t outside [0,1], empty list, ...)
    variant_mismatch,  // point does not belong to the given space
    domain_mismatch,   // map states live on different domains/targets/boundaries
    non_convergence,   // iteration cap exceeded
    config,            // configuration parse or validation failure
    io,                // file system failure
    numeric,           // singular solve or similar numerical failure
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

} // namespace hmf
