#include "robustam/instance_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace robustam {

namespace {

constexpr char kMagic[4] = {'R', 'A', 'M', 'I'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "instance files are little-endian; byte swapping not wired up");

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::filesystem::path& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw IoError("instance: truncated file " + path.string());
  }
  return value;
}

}  // namespace

void save_instance(const ProblemInstance& inst,
                   const std::filesystem::path& path) {
  if (!inst.seeds.operator_from_seed) {
    throw IoError(
        "instance: operator was not built from a recorded seed; cannot save");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("instance: cannot write " + path.string());
  }
  out.write(kMagic, 4);
  write_pod(out, kVersion);
  const bool hadamard = inst.op.kind() == OperatorKind::hadamard;
  write_pod(out, static_cast<std::uint8_t>(hadamard ? 1 : 0));
  write_pod(out, static_cast<std::uint64_t>(inst.op.rows()));
  write_pod(out, static_cast<std::uint64_t>(inst.op.cols()));
  write_pod(out, static_cast<std::uint64_t>(hadamard ? inst.op.cols() : 0));
  write_pod(out,
            static_cast<std::uint64_t>(hadamard ? inst.op.modulations() : 0));
  write_pod(out, inst.outlier_fraction);
  write_pod(out, inst.seeds.master);
  write_pod(out, inst.seeds.operator_seed);
  write_pod(out, inst.seeds.instance_seed);
  write_pod(out, static_cast<std::uint8_t>(1));
  write_pod(out, static_cast<std::uint64_t>(inst.outlier_support.size()));
  out.write(reinterpret_cast<const char*>(inst.b.data()),
            static_cast<std::streamsize>(sizeof(double) * inst.b.size()));
  out.write(reinterpret_cast<const char*>(inst.x_star.data()),
            static_cast<std::streamsize>(sizeof(double) * inst.x_star.size()));
  for (Index idx : inst.outlier_support) {
    write_pod(out, static_cast<std::uint64_t>(idx));
  }
  if (!out) {
    throw IoError("instance: write failed for " + path.string());
  }
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("instance: cannot open " + path.string());
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("instance: bad magic in " + path.string());
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kVersion) {
    throw IoError("instance: unsupported version " + std::to_string(version) +
                  " in " + path.string());
  }
  const auto kind = read_pod<std::uint8_t>(in, path);
  const auto m = static_cast<Index>(read_pod<std::uint64_t>(in, path));
  const auto d = static_cast<Index>(read_pod<std::uint64_t>(in, path));
  const auto n = static_cast<Index>(read_pod<std::uint64_t>(in, path));
  const auto k = static_cast<Index>(read_pod<std::uint64_t>(in, path));
  const auto eta = read_pod<double>(in, path);
  SeedManifest seeds;
  seeds.master = read_pod<std::uint64_t>(in, path);
  seeds.operator_seed = read_pod<std::uint64_t>(in, path);
  seeds.instance_seed = read_pod<std::uint64_t>(in, path);
  seeds.operator_from_seed = read_pod<std::uint8_t>(in, path) != 0;
  const auto support_count =
      static_cast<Index>(read_pod<std::uint64_t>(in, path));
  if (m < 1 || d < 1 || support_count > m) {
    throw IoError("instance: inconsistent header in " + path.string());
  }

  ProblemInstance inst;
  inst.outlier_fraction = eta;
  inst.seeds = seeds;
  inst.b.resize(m);
  in.read(reinterpret_cast<char*>(inst.b.data()),
          static_cast<std::streamsize>(sizeof(double) * m));
  inst.x_star.resize(d);
  in.read(reinterpret_cast<char*>(inst.x_star.data()),
          static_cast<std::streamsize>(sizeof(double) * d));
  if (!in) {
    throw IoError("instance: truncated payload in " + path.string());
  }
  inst.outlier_support.resize(static_cast<std::size_t>(support_count));
  for (auto& idx : inst.outlier_support) {
    idx = static_cast<Index>(read_pod<std::uint64_t>(in, path));
  }

  if (kind == 1) {
    if (n != d || k * n != m) {
      throw IoError("instance: inconsistent hadamard shape in " +
                    path.string());
    }
    inst.op = hadamard_ensemble(n, k, seeds.operator_seed);
  } else {
    inst.op = gaussian_ensemble(d, m, seeds.operator_seed);
  }
  return inst;
}

}  // namespace robustam
