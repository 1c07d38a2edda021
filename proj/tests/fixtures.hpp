#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "slicecount/program.hpp"

namespace fixture {

inline std::string dataPath(const std::string& name) { return std::string(SLICECOUNT_TEST_DATA) + "/" + name; }

inline std::string readData(const std::string& name) {
  std::ifstream in(dataPath(name));
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Storage indices of the labelled nodes of the running example.
namespace running {
inline constexpr slicecount::NodeIndex q0 = 19, q1 = 17, q2 = 18, q3 = 9, q4 = 4, q5 = 8, q6 = 16, q7 = 2,
                                       q8 = 6, q9 = 12, q10 = 15, q13 = 3, q15 = 7;
}

inline slicecount::Program runningExample() { return slicecount::Program::parse(readData("running_example.pt")); }

// x1..x9 are variables 0..8 in the running example.
inline slicecount::Monomial x(std::initializer_list<int> idx) {
  std::vector<slicecount::VariableId> v;
  for (int i : idx) v.push_back(static_cast<slicecount::VariableId>(i - 1));
  return slicecount::Monomial(v);
}

}  // namespace fixture
