// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

namespace aiva::agent {

enum class Expression { kHappy, kSad, kAngry, kFear, kLove, kBored, kCalm, kNeutral };

std::string to_string(Expression e);
Expression parse_expression(const std::string& name);

/// Sentiment label → avatar expression.
class ExpressionMap {
 public:
  explicit ExpressionMap(std::map<std::string, Expression> entries);

  /// positive/neutral/negative map to happy/neutral/sad; other labels map to
  /// the expression of the same name, ignoring case. Throws ValueError for a
  /// label with no expression.
  static ExpressionMap for_labels(const std::vector<std::string>& labels);

  /// Throws ValueError for a label outside the map.
  Expression map(const std::string& label) const;
  const std::map<std::string, Expression>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, Expression> entries_;
};

}  // namespace aiva::agent
