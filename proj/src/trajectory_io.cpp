#include "evac/trajectory_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "evac/error.hpp"

namespace evac {

namespace {

constexpr char kMagic[8] = {'E', 'V', 'A', 'C', 'T', 'R', 'J', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagPayoffs = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof buf);
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof buf)) throw ConfigError("trajectory file truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(T{buf[i]} << (8 * i));
  return value;
}

}  // namespace

void write_trajectory(const Trajectory& trajectory, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(trajectory.node_count()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(trajectory.timesteps()));
  put_le<std::uint32_t>(out, trajectory.has_payoffs() ? kFlagPayoffs : 0);
  put_le<std::uint64_t>(out, trajectory.seed);
  put_le<std::uint64_t>(out, trajectory.config_digest);

  const std::size_t bytes_per_frame = (trajectory.node_count() + 7) / 8;
  std::vector<char> frame(bytes_per_frame);
  for (std::size_t t = 0; t < trajectory.frame_count(); ++t) {
    const auto words = trajectory.frame_words(t);
    for (std::size_t b = 0; b < bytes_per_frame; ++b) {
      frame[b] = static_cast<char>(words[b / 8] >> (8 * (b % 8)));
    }
    out.write(frame.data(), static_cast<std::streamsize>(frame.size()));
  }
  if (trajectory.has_payoffs()) {
    for (std::size_t t = 0; t < trajectory.frame_count(); ++t) {
      for (double w : trajectory.payoffs(t)) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(w));
    }
  }
}

Trajectory read_trajectory(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw ConfigError("not a trajectory file (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) throw ConfigError("unsupported trajectory version " + std::to_string(version));
  const auto node_count = get_le<std::uint32_t>(in);
  const auto timesteps = get_le<std::uint32_t>(in);
  const auto flags = get_le<std::uint32_t>(in);

  Trajectory trajectory(node_count, timesteps);
  trajectory.seed = get_le<std::uint64_t>(in);
  trajectory.config_digest = get_le<std::uint64_t>(in);

  const std::size_t bytes_per_frame = (std::size_t{node_count} + 7) / 8;
  std::vector<unsigned char> frame(bytes_per_frame);
  for (std::size_t t = 0; t < trajectory.frame_count(); ++t) {
    if (!in.read(reinterpret_cast<char*>(frame.data()), static_cast<std::streamsize>(frame.size()))) {
      throw ConfigError("trajectory file truncated at frame " + std::to_string(t));
    }
    auto words = trajectory.frame_words(t);
    std::fill(words.begin(), words.end(), 0);
    for (std::size_t b = 0; b < bytes_per_frame; ++b) words[b / 8] |= std::uint64_t{frame[b]} << (8 * (b % 8));
  }
  trajectory.recount();
  if (flags & kFlagPayoffs) {
    std::vector<double> w(node_count);
    for (std::size_t t = 0; t < trajectory.frame_count(); ++t) {
      for (auto& value : w) value = std::bit_cast<double>(get_le<std::uint64_t>(in));
      trajectory.set_payoffs(t, w);
    }
  }
  return trajectory;
}

void save_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_trajectory(trajectory, out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trajectory '" + path.string() + "'");
  return read_trajectory(in);
}

}  // namespace evac
