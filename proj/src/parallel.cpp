#include "schrlat/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace schrlat {

namespace {
std::atomic<unsigned> g_threads{std::max(1u, std::thread::hardware_concurrency())};
}

unsigned thread_count() { return g_threads.load(); }

void set_thread_count(unsigned n) { g_threads.store(std::max(1u, n)); }

}  // namespace schrlat
