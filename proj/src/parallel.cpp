#include "gffmod/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gffmod {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("GFFMOD_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (...) {
    }
  }
  return 1;
}

std::atomic<int>& threads_setting() {
  static std::atomic<int> t{initial_threads()};
  return t;
}

}  // namespace

int default_threads() { return threads_setting().load(); }

void set_default_threads(int threads) { threads_setting().store(threads > 0 ? threads : 1); }

}  // namespace gffmod
