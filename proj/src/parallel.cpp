#include "spherosim/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace spherosim {
namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) { g_threads.store(std::max(1, n)); }
int threads() { return g_threads.load(); }

}  // namespace spherosim
