#include "mlrank/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace mlrank {

int resolve_thread_count(std::optional<int> requested) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("MLRANK_THREADS")) {
    const std::string_view text(env);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc{} && ptr == text.data() + text.size() && value > 0) return value;
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

} // namespace mlrank
