#include "malvis/ngram.hpp"

#include <string>

#include "malvis/error.hpp"

namespace malvis {

double green_at(const ByteStream& data, std::size_t index) {
  if (index >= data.size()) {
    raise(ErrorCode::IndexOutOfRange, "index " + std::to_string(index) +
                                          " >= stream length " +
                                          std::to_string(data.size()));
  }
  if (index + 1 >= data.size()) return 0.0;
  return static_cast<double>(bigram_value(data[index], data[index + 1])) / 65535.0;
}

}  // namespace malvis
