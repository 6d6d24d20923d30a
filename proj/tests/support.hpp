#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "dcforge/problems.hpp"

namespace dcforge::test {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Vector scalar(double v) { return Vector::Constant(1, v); }

inline double max_abs(const Vector& v) { return v.lpNorm<Eigen::Infinity>(); }

/// Zoo names with seed placeholders replaced by seeds 1 to 3.
inline std::vector<std::string> concrete_zoo() {
  std::vector<std::string> out;
  for (const auto& name : zoo_names()) {
    const auto pos = name.find("<seed>");
    if (pos == std::string::npos) {
      out.push_back(name);
      continue;
    }
    for (int s = 1; s <= 3; ++s) out.push_back(name.substr(0, pos) + std::to_string(s));
  }
  return out;
}

}  // namespace dcforge::test
