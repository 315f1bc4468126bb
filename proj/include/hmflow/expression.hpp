// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "hmflow/errors.hpp"

namespace hmf {

namespace detail {
struct ExprNode;
}

/// Arithmetic expression in the vertex coordinates, used for initial and
/// boundary map presets on Euclidean targets. Supports + - * / ^, parentheses,
/// the variables x and y, the constants pi and e, and the usual single
/// argument functions (sin cos tan exp log sqrt abs sinh cosh tanh).
class Expression {
  public:
    static Expression parse(const std::string& text);
    double eval(double x, double y = 0.0) const;
    const std::string& text() const { return text_; }

  private:
    std::string text_;
    std::shared_ptr<const detail::ExprNode> root_;
};

} // namespace hmf
