#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "gmlab/csv.hpp"
#include "gmlab/errors.hpp"
#include "gmlab/simulate.hpp"

namespace gmlab {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot writer assumes a little-endian host");

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error("truncated snapshot header");
  return v;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,xi,ubar_alpha,u_min,u_max,u_l2\n";
  for (std::size_t k = 0; k < traj.step_count(); ++k) {
    csv_row(out, {fmt17(traj.step_times[k]), fmt17(traj.xi_series[k]),
                  fmt17(traj.ubar_alpha_series[k]), fmt17(traj.u_min_series[k]),
                  fmt17(traj.u_max_series[k]), fmt17(traj.u_l2_series[k])});
  }
}

void write_field_snapshots(const Trajectory& traj, std::ostream& out) {
  put_u64(out, traj.grid.n());
  put_u64(out, static_cast<std::uint64_t>(traj.grid.dim()));
  put_u64(out, traj.u_frames.size());
  for (const auto& f : traj.u_frames)
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

Snapshots read_field_snapshots(std::istream& in) {
  Snapshots s;
  s.n = get_u64(in);
  s.dim = get_u64(in);
  const std::uint64_t count = get_u64(in);
  if (s.dim != 1 && s.dim != 2) throw Error("snapshot dimension must be 1 or 2");
  const std::size_t cells = s.dim == 1 ? s.n : s.n * s.n;
  s.frames.assign(count, std::vector<double>(cells));
  for (auto& f : s.frames)
    if (!in.read(reinterpret_cast<char*>(f.data()),
                 static_cast<std::streamsize>(cells * sizeof(double))))
      throw Error("truncated snapshot frame");
  return s;
}

}  // namespace gmlab
