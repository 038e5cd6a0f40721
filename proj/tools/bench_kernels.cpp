// Times the data-parallel kernels against their serial reference paths and
// verifies that both produce bitwise-identical results.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "hiphome/geometry.hpp"
#include "hiphome/metrics.hpp"
#include "hiphome/parallel.hpp"
#include "hiphome/reference2d.hpp"
#include "hiphome/velocity.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

struct Timed {
  double serial_ms = 0.0;
  double parallel_ms = 0.0;
  bool identical = false;
};

void report(const char* name, const Timed& t) {
  std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n", name,
              t.serial_ms, t.parallel_ms, t.serial_ms / t.parallel_ms,
              t.identical ? "bitwise equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int repeats = 3;
  if (argc > 1) repeats = std::max(1, std::atoi(argv[1]));
  std::printf("threads available: %d, repeats: %d\n", hiphome::hardware_threads(), repeats);

  using namespace hiphome;
  const ChannelDomain dom = make_domain(2.0, 0.2, 0.2);
  const VelocityProfile prof = VelocityProfile::poiseuille(10.0, dom.epsilon);
  const ProblemData pb = make_problem(dom, 1.0, 1.0, 0.0, 1.0);
  int mismatches = 0;

  // Full-order assembly: the row-gather loop is the parallel kernel; the
  // factorisation afterwards is shared.
  {
    Timed t;
    std::vector<double> op_serial, op_parallel;
    for (int r = 0; r < repeats; ++r) {
      auto t0 = clock_type::now();
      Reference2D ref(pb, prof, dom, 801, 81, Exec::Serial);
      t.serial_ms += ms_since(t0) / repeats;
      if (r == 0) op_serial = ref.solve_steady().values;
    }
    for (int r = 0; r < repeats; ++r) {
      auto t0 = clock_type::now();
      Reference2D ref(pb, prof, dom, 801, 81, Exec::Parallel);
      t.parallel_ms += ms_since(t0) / repeats;
      if (r == 0) op_parallel = ref.solve_steady().values;
    }
    t.identical = op_serial.size() == op_parallel.size() &&
                  std::memcmp(op_serial.data(), op_parallel.data(),
                              op_serial.size() * sizeof(double)) == 0;
    mismatches += !t.identical;
    report("reference2d assembly", t);
  }

  // Composite-Simpson norm of a transcendental field on a fine lattice.
  {
    Timed t;
    const FieldEvaluator field = [](double x, double z) {
      return std::sin(3.0 * x) * std::exp(4.0 * z) + std::cos(x * (1.0 + 5.0 * z));
    };
    double n_serial = 0.0, n_parallel = 0.0;
    for (int r = 0; r < repeats; ++r) {
      auto t0 = clock_type::now();
      n_serial = l2_norm(field, dom, 3201, 161, Exec::Serial);
      t.serial_ms += ms_since(t0) / repeats;
    }
    for (int r = 0; r < repeats; ++r) {
      auto t0 = clock_type::now();
      n_parallel = l2_norm(field, dom, 3201, 161, Exec::Parallel);
      t.parallel_ms += ms_since(t0) / repeats;
    }
    t.identical = std::memcmp(&n_serial, &n_parallel, sizeof(double)) == 0;
    mismatches += !t.identical;
    report("l2 norm 3201x161", t);
  }

  if (mismatches != 0) {
    std::printf("FAIL: %d kernel(s) diverged between serial and parallel paths\n", mismatches);
    return 1;
  }
  std::printf("all kernels bitwise equal across execution policies\n");
  return 0;
}
